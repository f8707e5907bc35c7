//! Dense small-matrix arithmetic shared by every other module: commutator
//! bracket, matrix exponential, nilpotent logarithm, eigenvalues, and span
//! bookkeeping. Matrices are `nalgebra::DMatrix` over either `f64` or
//! `Complex<f64>`; the generic bound is the [`Scalar`] alias.

use nalgebra::{ComplexField, DMatrix, DVector};

use crate::error::{Error, Result};

/// Scalar field of a matrix realization: `f64` or `Complex<f64>`.
pub trait Scalar: ComplexField<RealField = f64> + Copy {}
impl<T> Scalar for T where T: ComplexField<RealField = f64> + Copy {}

pub type C64 = nalgebra::Complex<f64>;

/// Projection residuals below `RANK_TOL` times the largest vector norm count
/// as zero in all span and rank computations.
pub const RANK_TOL: f64 = 1e-9;

/// Induced 1-norm (maximum absolute column sum).
pub fn one_norm<T: Scalar>(m: &DMatrix<T>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|x| x.modulus()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn frobenius<T: Scalar>(m: &DMatrix<T>) -> f64 {
    m.iter().map(|x| x.modulus_squared()).sum::<f64>().sqrt()
}

pub fn all_finite<T: Scalar>(m: &DMatrix<T>) -> bool {
    m.iter().all(|x| x.real().is_finite() && x.imaginary().is_finite())
}

fn check_square<T: Scalar>(m: &DMatrix<T>, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{what}: expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Commutator `[A, B] = AB - BA`.
pub fn bracket<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> Result<DMatrix<T>> {
    check_square(a, "bracket")?;
    check_square(b, "bracket")?;
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "bracket: {}x{} vs {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    Ok(a * b - b * a)
}

/// `e^{tA}` by scaling-and-squaring around a truncated-series core.
///
/// The argument is halved until its 1-norm is at most 0.5, the series is
/// summed to below roundoff, and the result is squared back up.
pub fn expm<T: Scalar>(a: &DMatrix<T>, t: f64) -> Result<DMatrix<T>> {
    check_square(a, "expm")?;
    if !all_finite(a) || !t.is_finite() {
        return Err(Error::NonFinite("expm input"));
    }
    let n = a.nrows();
    let b = a.map(|x| x * T::from_real(t));
    let norm = one_norm(&b);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scale = T::from_real(2f64.powi(-squarings));
    let scaled = b.map(|x| x * scale);

    let mut term = DMatrix::<T>::identity(n, n);
    let mut sum = DMatrix::<T>::identity(n, n);
    for k in 1..=30u32 {
        term = &term * &scaled;
        term = term.map(|x| x * T::from_real(1.0 / k as f64));
        sum += &term;
        if one_norm(&term) < 1e-18 {
            break;
        }
    }
    let mut result = sum;
    for _ in 0..squarings {
        result = &result * &result;
    }
    Ok(result)
}

/// Logarithm of a unipotent matrix via the terminating Mercator series
/// `log(I + K) = K - K^2/2 + K^3/3 - ...` with `K = M - I`.
pub fn logm_unipotent<T: Scalar>(m: &DMatrix<T>) -> Result<DMatrix<T>> {
    check_square(m, "logm_unipotent")?;
    let n = m.nrows();
    let k = m - DMatrix::<T>::identity(n, n);

    // K^n must vanish for the series to terminate.
    let mut power = k.clone();
    for _ in 1..n {
        power = &power * &k;
    }
    let residual = one_norm(&power);
    if residual > 1e-9 * (1.0 + one_norm(&k)) {
        return Err(Error::NotUnipotent { residual });
    }

    let mut sum = DMatrix::<T>::zeros(n, n);
    let mut term = DMatrix::<T>::identity(n, n);
    for j in 1..n.max(2) {
        term = &term * &k;
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        sum += term.map(|x| x * T::from_real(sign / j as f64));
    }
    Ok(sum)
}

/// All eigenvalues of a real matrix, with multiplicity, as complex numbers.
/// Conjugate pairs come out exactly conjugate (they are read off 2x2 blocks
/// of the real Schur form).
pub fn eigenvalues(a: &DMatrix<f64>) -> Result<Vec<C64>> {
    check_square(a, "eigenvalues")?;
    if !all_finite(a) {
        return Err(Error::NonFinite("eigenvalues input"));
    }
    let n = a.nrows();
    let max_sweeps = 100 * n;
    let schur = nalgebra::linalg::Schur::try_new(a.clone(), 1e-14, max_sweeps)
        .ok_or(Error::EigenNonConvergence { max_sweeps })?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Orthonormal basis of the span of `vectors`, by modified Gram-Schmidt with
/// re-orthogonalization. Residuals below `tol` times the largest input norm
/// are discarded. Empty input yields an empty basis.
pub fn span_union(vectors: &[DVector<f64>], tol: f64) -> Vec<DVector<f64>> {
    let scale = vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut basis: Vec<DVector<f64>> = Vec::new();
    if scale == 0.0 {
        return basis;
    }
    for v in vectors {
        assert_eq!(v.len(), vectors[0].len(), "span_union: mixed dimensions");
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&r);
                r -= b * c;
            }
        }
        let norm = r.norm();
        if norm >= tol * scale {
            basis.push(r / norm);
        }
    }
    basis
}

/// Component of `v` orthogonal to the given orthonormal basis.
pub fn project_out(v: &DVector<f64>, basis: &[DVector<f64>]) -> DVector<f64> {
    let mut r = v.clone();
    for _ in 0..2 {
        for b in basis {
            let c = b.dot(&r);
            r -= b * c;
        }
    }
    r
}
