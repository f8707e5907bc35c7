//! Solution computations: the automorphism flow of the drift field, the
//! finite limit-product approximation, the inner-derivation closed form,
//! cocycle concatenation for piecewise controls, translation of solutions to
//! arbitrary initial points, and the RK4 oracle with its ODE-residual check.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matcore::{self, Scalar};
use crate::models::{
    FlowBackend, GroupElement, LinearControlSystem, PiecewiseControl, Trajectory,
};

/// Constraint drift above this level triggers a warning on the RK4 oracle.
pub const DRIFT_WARN: f64 = 1e-6;

/// The automorphism `phi_t` of the drift field, frozen at one value of `t`.
enum FlowMap<T: Scalar> {
    /// conjugation by exp(tX)
    Inner { left: DMatrix<T>, right: DMatrix<T> },
    /// exp o e^{tD} o log (nilpotent models)
    ExpLog { etd: DMatrix<f64> },
}

impl<T: Scalar> FlowMap<T> {
    fn new(system: &LinearControlSystem<T>, t: f64) -> Result<Self> {
        match system.model.flow_backend {
            FlowBackend::InnerConjugation => {
                let x = system.derivation.inner_generator_matrix().ok_or_else(|| {
                    Error::UnsupportedFlow(format!(
                        "the {} flow needs an inner derivation, but none was given; \
                         supply the derivation as an inner generator",
                        system.model.name
                    ))
                })?;
                Ok(FlowMap::Inner {
                    left: matcore::expm(&x, t)?,
                    right: matcore::expm(&x, -t)?,
                })
            }
            FlowBackend::ExpLogTransport => {
                if !system.model.flags.nilpotent {
                    return Err(Error::UnsupportedFlow(format!(
                        "exp-log transport requires a nilpotent model, \
                         but {} is not nilpotent",
                        system.model.name
                    )));
                }
                Ok(FlowMap::ExpLog {
                    etd: matcore::expm(&system.derivation.matrix, t)?,
                })
            }
        }
    }

    fn apply(&self, system: &LinearControlSystem<T>, m: &DMatrix<T>) -> Result<DMatrix<T>> {
        match self {
            FlowMap::Inner { left, right } => Ok(left * m * right),
            FlowMap::ExpLog { etd } => {
                let log = matcore::logm_unipotent(m)?;
                let coords = system.model.coords_of(&log)?;
                system.model.exp_of(&(etd * coords), 1.0)
            }
        }
    }
}

/// `phi_t(g)`: the value of the drift automorphism flow at `g`.
pub fn automorphism_flow<T: Scalar>(
    system: &LinearControlSystem<T>,
    t: f64,
    g: &GroupElement<T>,
) -> Result<GroupElement<T>> {
    let map = FlowMap::new(system, t)?;
    let m = map.apply(system, &g.matrix)?;
    GroupElement::new(system.model.clone(), m)
}

/// Finite product `P_n = F_0 F_1 ... F_{n-1}` with
/// `F_i = phi_{i t/n}(exp((t/n) W))` and `W = sum u_j Y_j`; `i = 0` is the
/// leftmost factor. As `n` grows this converges (first order) to the exact
/// solution at the identity.
pub fn product_formula_solution<T: Scalar>(
    system: &LinearControlSystem<T>,
    u: &DVector<f64>,
    t: f64,
    n: usize,
) -> Result<GroupElement<T>> {
    if n == 0 {
        return Err(Error::InvalidInput("product formula needs n >= 1".into()));
    }
    let w = system.combined_field(u)?;
    let h = t / n as f64;
    let step = FlowMap::new(system, h)?;
    // F_{i+1} = phi_h(F_i), so one flow application per factor.
    let mut factor = system.model.exp_of(&w, h)?;
    let mut product = system.model.identity_matrix();
    for i in 0..n {
        product *= &factor;
        if i + 1 < n {
            factor = step.apply(system, &factor)?;
        }
    }
    GroupElement::with_tolerance(system.model.clone(), product, product_tol(n))
}

/// Constraint tolerance for an `n`-factor product: rounding in the factors
/// accumulates roughly linearly with their count.
fn product_tol(n: usize) -> f64 {
    crate::models::GROUP_TOL * (1.0 + n as f64 / 256.0)
}

/// Closed-form solution `exp(t(X + sum u_j Y_j)) exp(-tX)` for systems whose
/// derivation is inner with generator `X`.
pub fn inner_closed_form_solution<T: Scalar>(
    system: &LinearControlSystem<T>,
    u: &DVector<f64>,
    t: f64,
) -> Result<GroupElement<T>> {
    let x = system.derivation.inner_generator.as_ref().ok_or_else(|| {
        Error::UnsupportedFlow(
            "the closed-form solution needs an inner derivation".into(),
        )
    })?;
    let w = system.combined_field(u)?;
    let invariant = system.model.realize(&(x + &w));
    let drift = system.model.realize(x);
    let m = matcore::expm(&invariant, t)? * matcore::expm(&drift, -t)?;
    GroupElement::new(system.model.clone(), m)
}

/// Per-segment solver selection for [`solve_piecewise`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Product { n: usize },
    Closed,
    Rk4 { steps_per_unit: usize },
}

impl SolveMethod {
    pub fn tag(&self) -> String {
        match self {
            SolveMethod::Product { n } => format!("product:{n}"),
            SolveMethod::Closed => "closed".into(),
            SolveMethod::Rk4 { steps_per_unit } => format!("rk4:{steps_per_unit}"),
        }
    }
}

/// Solves the system from the identity under a piecewise-constant control,
/// concatenating per-segment solutions with the cocycle rule
/// `phi_{t+s}(u, e) = phi_s(u_2, e) * phi_s(phi_t(u_1, e))`.
pub fn solve_piecewise<T: Scalar>(
    system: &LinearControlSystem<T>,
    control: &PiecewiseControl,
    method: SolveMethod,
    samples_per_segment: usize,
) -> Result<Trajectory<T>> {
    if samples_per_segment == 0 {
        return Err(Error::InvalidInput("samples_per_segment must be >= 1".into()));
    }
    let mut times = vec![0.0];
    let mut points = vec![GroupElement::identity(system.model.clone())];
    let mut offset = 0.0;
    let mut start = system.model.identity_matrix();

    for segment in &control.segments {
        let tau = segment.duration;
        let k = samples_per_segment;
        let local = match method {
            SolveMethod::Rk4 { steps_per_unit } => {
                rk4_from_identity(system, &segment.u, tau, k, steps_per_unit)?
            }
            _ => (1..=k)
                .map(|j| {
                    let s = tau * j as f64 / k as f64;
                    let p = match method {
                        SolveMethod::Product { n } => {
                            product_formula_solution(system, &segment.u, s, n)?
                        }
                        SolveMethod::Closed => {
                            inner_closed_form_solution(system, &segment.u, s)?
                        }
                        SolveMethod::Rk4 { .. } => unreachable!(),
                    };
                    Ok((s, p.matrix))
                })
                .collect::<Result<Vec<_>>>()?,
        };
        let point_tol = match method {
            SolveMethod::Product { n } => product_tol(n),
            _ => crate::models::GROUP_TOL,
        };
        for (s, at_identity) in local {
            let carried = FlowMap::new(system, s)?.apply(system, &start)?;
            let m = at_identity * carried;
            times.push(offset + s);
            points.push(GroupElement::with_tolerance(
                system.model.clone(),
                m,
                point_tol,
            )?);
        }
        offset += tau;
        start = points.last().unwrap().matrix.clone();
    }
    Trajectory::new(times, points, &method.tag())
}

/// Translates a solution that starts at the identity to one starting at `g`:
/// pointwise `phi_t(u, g) = phi_t(u, e) * phi_t(g)`.
pub fn translate_solution<T: Scalar>(
    system: &LinearControlSystem<T>,
    traj_at_e: &Trajectory<T>,
    g: &GroupElement<T>,
) -> Result<Trajectory<T>> {
    let first = &traj_at_e.points[0].matrix;
    let id = system.model.identity_matrix();
    if matcore::frobenius(&(first - &id)) > 1e-8 {
        return Err(Error::InvalidInput(
            "translate_solution needs a trajectory that starts at the identity".into(),
        ));
    }
    let mut points = Vec::with_capacity(traj_at_e.len());
    for (t, p) in traj_at_e.times.iter().zip(&traj_at_e.points) {
        let carried = FlowMap::new(system, *t)?.apply(system, &g.matrix)?;
        points.push(GroupElement::new(system.model.clone(), &p.matrix * carried)?);
    }
    Trajectory::new(
        traj_at_e.times.clone(),
        points,
        &format!("{}+translated", traj_at_e.method_tag),
    )
}

/// The drift vector field evaluated in the ambient matrix space.
enum DriftField<T: Scalar> {
    /// X(g) = Xm g - g Xm
    Inner { xm: DMatrix<T> },
    /// central finite difference of the exp-log flow
    FiniteDiff { forward: FlowMap<T>, backward: FlowMap<T>, h: f64 },
}

const FD_STEP: f64 = 1e-6;

impl<T: Scalar> DriftField<T> {
    fn new(system: &LinearControlSystem<T>) -> Result<Self> {
        if let Some(xm) = system.derivation.inner_generator_matrix() {
            Ok(DriftField::Inner { xm })
        } else {
            Ok(DriftField::FiniteDiff {
                forward: FlowMap::new(system, FD_STEP)?,
                backward: FlowMap::new(system, -FD_STEP)?,
                h: FD_STEP,
            })
        }
    }

    fn eval(&self, system: &LinearControlSystem<T>, g: &DMatrix<T>) -> Result<DMatrix<T>> {
        match self {
            DriftField::Inner { xm } => Ok(xm * g - g * xm),
            DriftField::FiniteDiff { forward, backward, h } => {
                let plus = forward.apply(system, g)?;
                let minus = backward.apply(system, g)?;
                Ok((plus - minus).map(|x| x * T::from_real(0.5 / h)))
            }
        }
    }
}

/// RK4 segment integrator from the identity under a constant control,
/// reporting the state at `k` equally spaced sample times.
fn rk4_from_identity<T: Scalar>(
    system: &LinearControlSystem<T>,
    u: &DVector<f64>,
    tau: f64,
    k: usize,
    steps_per_unit: usize,
) -> Result<Vec<(f64, DMatrix<T>)>> {
    check_step_density(steps_per_unit)?;
    let drift = DriftField::new(system)?;
    let wm = system.model.realize(&system.combined_field(u)?);
    let mut g = system.model.identity_matrix();
    let mut out = Vec::with_capacity(k);
    for j in 1..=k {
        let s0 = tau * (j - 1) as f64 / k as f64;
        let s1 = tau * j as f64 / k as f64;
        let span = s1 - s0;
        let substeps = ((span * steps_per_unit as f64).ceil() as usize).max(1);
        let dt = span / substeps as f64;
        for _ in 0..substeps {
            g = rk4_step(system, &drift, &wm, &g, dt)?;
        }
        out.push((s1, g.clone()));
    }
    Ok(out)
}

fn check_step_density(steps_per_unit: usize) -> Result<()> {
    if steps_per_unit < 10 {
        return Err(Error::Numerical(format!(
            "rk4 oracle requires at least 10 steps per unit time, got {steps_per_unit}"
        )));
    }
    Ok(())
}

fn rk4_step<T: Scalar>(
    system: &LinearControlSystem<T>,
    drift: &DriftField<T>,
    wm: &DMatrix<T>,
    g: &DMatrix<T>,
    dt: f64,
) -> Result<DMatrix<T>> {
    let f = |g: &DMatrix<T>| -> Result<DMatrix<T>> {
        Ok(drift.eval(system, g)? + wm * g)
    };
    let half = T::from_real(dt / 2.0);
    let full = T::from_real(dt);
    let sixth = T::from_real(dt / 6.0);
    let two = T::from_real(2.0);
    let k1 = f(g)?;
    let k2 = f(&(g + k1.map(|x| x * half)))?;
    let k3 = f(&(g + k2.map(|x| x * half)))?;
    let k4 = f(&(g + k3.map(|x| x * full)))?;
    let incr = k1 + k2.map(|x| x * two) + k3.map(|x| x * two) + k4;
    Ok(g + incr.map(|x| x * sixth))
}

/// Independent classical RK4 integration of
/// `dg/dt = X(g) + sum u_j Y_j g` in the ambient matrix space, from `g0`,
/// recording one sample per step. Constraint drift is monitored, not
/// projected away; beyond `DRIFT_WARN` a warning goes to standard error.
pub fn rk4_oracle<T: Scalar>(
    system: &LinearControlSystem<T>,
    control: &PiecewiseControl,
    g0: &GroupElement<T>,
    steps_per_unit_time: usize,
) -> Result<Trajectory<T>> {
    check_step_density(steps_per_unit_time)?;
    let drift = DriftField::new(system)?;
    let mut g = g0.matrix.clone();
    let mut t = 0.0;
    let mut times = vec![0.0];
    let mut points = vec![g0.clone()];
    let mut max_drift = 0.0f64;
    for segment in &control.segments {
        let wm = system.model.realize(&system.combined_field(&segment.u)?);
        let steps = ((segment.duration * steps_per_unit_time as f64).ceil() as usize).max(1);
        let dt = segment.duration / steps as f64;
        for _ in 0..steps {
            g = rk4_step(system, &drift, &wm, &g, dt)?;
            t += dt;
            let point = GroupElement::new(system.model.clone(), g.clone())?;
            max_drift = max_drift.max(point.constraint_residual());
            times.push(t);
            points.push(point);
        }
    }
    if max_drift > DRIFT_WARN {
        eprintln!(
            "warning: rk4 oracle constraint drift reached {max_drift:.3e} \
             (threshold {DRIFT_WARN:.0e})"
        );
    }
    Trajectory::new(times, points, &format!("rk4:{steps_per_unit_time}"))
}

/// Maximum normalized defect of a sampled curve against the system ODE,
/// using central differences on interior samples. Samples whose difference
/// stencil straddles a control-segment boundary are skipped.
pub fn ode_residual<T: Scalar>(
    system: &LinearControlSystem<T>,
    traj: &Trajectory<T>,
    control: &PiecewiseControl,
) -> Result<f64> {
    if traj.len() < 100 {
        return Err(Error::Numerical(format!(
            "ode_residual needs at least 100 samples, got {}",
            traj.len()
        )));
    }
    let drift = DriftField::new(system)?;
    let scale = traj
        .points
        .iter()
        .map(|p| matcore::frobenius(&p.matrix))
        .fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for i in 1..traj.len() - 1 {
        let (t_prev, t_next) = (traj.times[i - 1], traj.times[i + 1]);
        if control.segment_index_at(t_prev) != control.segment_index_at(t_next * (1.0 - 1e-12)) {
            continue;
        }
        let dt = t_next - t_prev;
        let deriv = (&traj.points[i + 1].matrix - &traj.points[i - 1].matrix)
            .map(|x| x * T::from_real(1.0 / dt));
        let u = control.u_at(traj.times[i]);
        let wm = system.model.realize(&system.combined_field(u)?);
        let g = &traj.points[i].matrix;
        let field = drift.eval(system, g)? + wm * g;
        worst = worst.max(matcore::frobenius(&(deriv - field)));
    }
    Ok(worst / scale.max(1e-300))
}
