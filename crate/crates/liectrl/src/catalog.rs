//! Concrete group models: Heisenberg, abelian R^2 (translations), GL(n)+,
//! SL(2), SU(2), SO(3), SO(2,1)_0, together with the closed-form exponentials
//! of the three-dimensional groups.

use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matcore::{self, C64, Scalar};
use crate::models::{
    derivation_from_inner, ClassFlags, FlowBackend, GroupConstraint, GroupElement,
    LieGroupModel, LinearControlSystem, lorentz_form_matrix,
};

fn unit_matrix<T: Scalar>(n: usize, i: usize, j: usize, v: T) -> DMatrix<T> {
    let mut m = DMatrix::zeros(n, n);
    m[(i, j)] = v;
    m
}

/// Heisenberg group as 3x3 upper-unipotent matrices, identified with
/// (x, y, z) coordinates. Basis: X1 = E12, X2 = E23, X3 = E13, so
/// [X1, X2] = X3 and X3 spans the center.
pub fn heisenberg() -> Arc<LieGroupModel<f64>> {
    static MODEL: OnceLock<Arc<LieGroupModel<f64>>> = OnceLock::new();
    MODEL
        .get_or_init(|| {
            LieGroupModel::new(
                "heisenberg",
                vec![
                    unit_matrix(3, 0, 1, 1.0),
                    unit_matrix(3, 1, 2, 1.0),
                    unit_matrix(3, 0, 2, 1.0),
                ],
                ClassFlags { nilpotent: true, solvable: true, semisimple: false },
                GroupConstraint::UpperUnipotent,
                FlowBackend::ExpLogTransport,
                None,
            )
            .expect("heisenberg model is well formed")
        })
        .clone()
}

/// Abelian R^2 realized as 3x3 translation matrices. Any 2x2 matrix is a
/// valid derivation (the bracket vanishes identically).
pub fn r2() -> Arc<LieGroupModel<f64>> {
    static MODEL: OnceLock<Arc<LieGroupModel<f64>>> = OnceLock::new();
    MODEL
        .get_or_init(|| {
            LieGroupModel::new(
                "r2",
                vec![unit_matrix(3, 0, 2, 1.0), unit_matrix(3, 1, 2, 1.0)],
                ClassFlags { nilpotent: true, solvable: true, semisimple: false },
                GroupConstraint::UpperUnipotent,
                FlowBackend::ExpLogTransport,
                None,
            )
            .expect("r2 model is well formed")
        })
        .clone()
}

/// SL(2, R) with basis {H, E, F}: H = diag(1,-1), E = E12, F = E21.
pub fn sl2() -> Arc<LieGroupModel<f64>> {
    static MODEL: OnceLock<Arc<LieGroupModel<f64>>> = OnceLock::new();
    MODEL
        .get_or_init(|| {
            let h = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0]));
            LieGroupModel::new(
                "sl2",
                vec![h, unit_matrix(2, 0, 1, 1.0), unit_matrix(2, 1, 0, 1.0)],
                ClassFlags { nilpotent: false, solvable: false, semisimple: true },
                GroupConstraint::UnitDeterminant,
                FlowBackend::InnerConjugation,
                Some(sl2_exp_closed),
            )
            .expect("sl2 model is well formed")
        })
        .clone()
}

/// SU(2) as complex 2x2 anti-Hermitian traceless matrices:
/// basis i*sigma_3, i*sigma_2, i*sigma_1 (real coordinates).
pub fn su2() -> Arc<LieGroupModel<C64>> {
    static MODEL: OnceLock<Arc<LieGroupModel<C64>>> = OnceLock::new();
    MODEL
        .get_or_init(|| {
            let i = C64::new(0.0, 1.0);
            let one = C64::new(1.0, 0.0);
            let mut u1 = DMatrix::zeros(2, 2);
            u1[(0, 0)] = i;
            u1[(1, 1)] = -i;
            let mut u2 = DMatrix::zeros(2, 2);
            u2[(0, 1)] = one;
            u2[(1, 0)] = -one;
            let mut u3 = DMatrix::zeros(2, 2);
            u3[(0, 1)] = i;
            u3[(1, 0)] = i;
            LieGroupModel::new(
                "su2",
                vec![u1, u2, u3],
                ClassFlags { nilpotent: false, solvable: false, semisimple: true },
                GroupConstraint::SpecialUnitary,
                FlowBackend::InnerConjugation,
                Some(su2_exp_closed),
            )
            .expect("su2 model is well formed")
        })
        .clone()
}

/// SO(3) with the standard rotation generators.
pub fn so3() -> Arc<LieGroupModel<f64>> {
    static MODEL: OnceLock<Arc<LieGroupModel<f64>>> = OnceLock::new();
    MODEL
        .get_or_init(|| {
            let lx = unit_matrix(3, 2, 1, 1.0) + unit_matrix(3, 1, 2, -1.0);
            let ly = unit_matrix(3, 0, 2, 1.0) + unit_matrix(3, 2, 0, -1.0);
            let lz = unit_matrix(3, 1, 0, 1.0) + unit_matrix(3, 0, 1, -1.0);
            LieGroupModel::new(
                "so3",
                vec![lx, ly, lz],
                ClassFlags { nilpotent: false, solvable: false, semisimple: true },
                GroupConstraint::SpecialOrthogonal,
                FlowBackend::InnerConjugation,
                Some(so3_exp_closed),
            )
            .expect("so3 model is well formed")
        })
        .clone()
}

/// Identity component of SO(2,1): matrices preserving diag(1, 1, -1).
pub fn so21() -> Arc<LieGroupModel<f64>> {
    static MODEL: OnceLock<Arc<LieGroupModel<f64>>> = OnceLock::new();
    MODEL
        .get_or_init(|| {
            let r12 = unit_matrix(3, 1, 0, 1.0) + unit_matrix(3, 0, 1, -1.0);
            let b1 = unit_matrix(3, 0, 2, 1.0) + unit_matrix(3, 2, 0, 1.0);
            let b2 = unit_matrix(3, 1, 2, 1.0) + unit_matrix(3, 2, 1, 1.0);
            LieGroupModel::new(
                "so21",
                vec![r12, b1, b2],
                ClassFlags { nilpotent: false, solvable: false, semisimple: true },
                GroupConstraint::LorentzForm,
                FlowBackend::InnerConjugation,
                Some(so21_exp_closed),
            )
            .expect("so21 model is well formed")
        })
        .clone()
}

/// GL(n, R)+ with the elementary-matrix basis E_ij in row-major order.
pub fn gl_plus(n: usize) -> Result<Arc<LieGroupModel<f64>>> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("gl_plus requires n >= 2, got {n}")));
    }
    let mut basis = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            basis.push(unit_matrix(n, i, j, 1.0));
        }
    }
    LieGroupModel::new(
        "gl_plus",
        basis,
        ClassFlags::default(),
        GroupConstraint::PositiveDeterminant,
        FlowBackend::InnerConjugation,
        None,
    )
}

/// The system `dg/dt = Ag - gA + sum u_j B_j g` on GL(n)+.
pub fn gl_linear_system(
    a: &DMatrix<f64>,
    b_list: &[DMatrix<f64>],
) -> Result<LinearControlSystem<f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch("gl_linear_system: A must be square".into()));
    }
    let model = gl_plus(n)?;
    for b in b_list {
        if b.nrows() != n || b.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "gl_linear_system: B must be {n}x{n}"
            )));
        }
    }
    let x = model.coords_of(a)?;
    let derivation = derivation_from_inner(model.clone(), &x)?;
    let fields = b_list
        .iter()
        .map(|b| model.coords_of(b))
        .collect::<Result<Vec<_>>>()?;
    LinearControlSystem::new(model, derivation, fields, None)
}

/// Group element of the Heisenberg model from (x, y, z) coordinates.
pub fn heisenberg_point(x: f64, y: f64, z: f64) -> GroupElement<f64> {
    let model = heisenberg();
    let mut m = DMatrix::identity(3, 3);
    m[(0, 1)] = x;
    m[(1, 2)] = y;
    m[(0, 2)] = z;
    GroupElement { model, matrix: m }
}

/// The (x, y, z) coordinates of a Heisenberg group element.
pub fn heisenberg_xyz(g: &GroupElement<f64>) -> (f64, f64, f64) {
    (g.matrix[(0, 1)], g.matrix[(1, 2)], g.matrix[(0, 2)])
}

// Branch threshold on x = t^2 * mu; below it the series expansions are used,
// which keeps the closed forms continuous across the eigenvalue-sign change.
const BRANCH_TOL: f64 = 1e-4;
const ALGEBRA_MEMBER_TOL: f64 = 1e-10;

/// cosh(sqrt(x)) continued through x <= 0 (= cos(sqrt(-x))).
fn cosh_sqrt(x: f64) -> f64 {
    if x > BRANCH_TOL {
        x.sqrt().cosh()
    } else if x < -BRANCH_TOL {
        (-x).sqrt().cos()
    } else {
        1.0 + x / 2.0 + x * x / 24.0 + x * x * x / 720.0
    }
}

/// sinh(sqrt(x))/sqrt(x) continued through x <= 0 (= sin(sqrt(-x))/sqrt(-x)).
fn sinhc_sqrt(x: f64) -> f64 {
    if x > BRANCH_TOL {
        let s = x.sqrt();
        s.sinh() / s
    } else if x < -BRANCH_TOL {
        let s = (-x).sqrt();
        s.sin() / s
    } else {
        1.0 + x / 6.0 + x * x / 120.0 + x * x * x / 5040.0
    }
}

/// (cosh(sqrt(x)) - 1)/x continued through x <= 0.
fn coshm1_over(x: f64) -> f64 {
    if x > BRANCH_TOL {
        (x.sqrt().cosh() - 1.0) / x
    } else if x < -BRANCH_TOL {
        ((-x).sqrt().cos() - 1.0) / x
    } else {
        0.5 + x / 24.0 + x * x / 720.0 + x * x * x / 40320.0
    }
}

/// Shared core for traceless 2x2: eigenvalues are +/- sqrt(mu) with
/// mu = -det(Z), and e^{tZ} = cosh(t lam) I + sinh(t lam)/lam Z.
fn exp_traceless_2x2<T: Scalar>(z: &DMatrix<T>, t: f64, mu: f64) -> DMatrix<T> {
    let x = t * t * mu;
    let c = T::from_real(cosh_sqrt(x));
    let s = T::from_real(t * sinhc_sqrt(x));
    DMatrix::<T>::identity(2, 2).map(|e| e * c) + z.map(|e| e * s)
}

/// Closed-form exponential on sl(2): functional calculus on a traceless
/// 2x2 real matrix.
pub fn sl2_exp_closed(z: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    if z.nrows() != 2 || z.ncols() != 2 {
        return Err(Error::DimensionMismatch("sl2_exp_closed expects 2x2".into()));
    }
    let scale = 1.0 + matcore::frobenius(z);
    if z.trace().abs() > 1e-10 * scale {
        return Err(Error::InvalidInput(format!(
            "sl2_exp_closed: matrix is not traceless (trace {:.3e})",
            z.trace()
        )));
    }
    Ok(exp_traceless_2x2(z, t, -z.determinant()))
}

/// Closed-form exponential on su(2): anti-Hermitian traceless 2x2 complex.
pub fn su2_exp_closed(z: &DMatrix<C64>, t: f64) -> Result<DMatrix<C64>> {
    if z.nrows() != 2 || z.ncols() != 2 {
        return Err(Error::DimensionMismatch("su2_exp_closed expects 2x2".into()));
    }
    let scale = 1.0 + matcore::frobenius(z);
    let anti = z.adjoint() + z;
    if matcore::frobenius(&anti) > ALGEBRA_MEMBER_TOL * scale
        || z.trace().norm() > ALGEBRA_MEMBER_TOL * scale
    {
        return Err(Error::InvalidInput(
            "su2_exp_closed: matrix is not anti-Hermitian traceless".into(),
        ));
    }
    // det(Z) is real and nonnegative here, so mu = -det <= 0: trig branch.
    Ok(exp_traceless_2x2(z, t, -z.determinant().re))
}

fn exp_quadratic_3x3(z: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
    // eigenvalues {0, +lam, -lam} with lam^2 = trace(Z^2)/2
    let z2 = z * z;
    let mu = z2.trace() / 2.0;
    let x = t * t * mu;
    DMatrix::identity(3, 3) + z * (t * sinhc_sqrt(x)) + z2 * (t * t * coshm1_over(x))
}

/// Closed-form exponential on so(3) (Rodrigues on the trigonometric branch).
pub fn so3_exp_closed(z: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    if z.nrows() != 3 || z.ncols() != 3 {
        return Err(Error::DimensionMismatch("so3_exp_closed expects 3x3".into()));
    }
    let scale = 1.0 + matcore::frobenius(z);
    if matcore::frobenius(&(z.transpose() + z)) > ALGEBRA_MEMBER_TOL * scale {
        return Err(Error::InvalidInput(
            "so3_exp_closed: matrix is not skew-symmetric".into(),
        ));
    }
    Ok(exp_quadratic_3x3(z, t))
}

/// Closed-form exponential on so(2,1), skew with respect to diag(1, 1, -1).
pub fn so21_exp_closed(z: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    if z.nrows() != 3 || z.ncols() != 3 {
        return Err(Error::DimensionMismatch("so21_exp_closed expects 3x3".into()));
    }
    let scale = 1.0 + matcore::frobenius(z);
    let j = lorentz_form_matrix::<f64>(3);
    let residual = matcore::frobenius(&(z.transpose() * &j + &j * z));
    if residual > ALGEBRA_MEMBER_TOL * scale {
        return Err(Error::InvalidInput(
            "so21_exp_closed: matrix is not in so(2,1)".into(),
        ));
    }
    Ok(exp_quadratic_3x3(z, t))
}

/// Closed-form solution `exp_closed(X + sum u_j Y_j, t) * exp_closed(X, -t)`
/// on a 3-dimensional catalog group with its own exponential.
pub fn closed_solution_3dim<T: Scalar>(
    system: &LinearControlSystem<T>,
    u: &DVector<f64>,
    t: f64,
) -> Result<GroupElement<T>> {
    let exp_closed = system.model.exp_closed.ok_or_else(|| {
        Error::UnsupportedFlow(format!(
            "{} has no group-specific closed-form exponential",
            system.model.name
        ))
    })?;
    let x = system.derivation.inner_generator.as_ref().ok_or_else(|| {
        Error::UnsupportedFlow("closed_solution_3dim needs an inner derivation".into())
    })?;
    let w = system.combined_field(u)?;
    let invariant = system.model.realize(&(x + &w));
    let drift = system.model.realize(x);
    let m = exp_closed(&invariant, t)? * exp_closed(&drift, -t)?;
    GroupElement::new(system.model.clone(), m)
}
