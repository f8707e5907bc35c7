use liectrl::cli;

fn main() {
    std::process::exit(cli::run());
}
