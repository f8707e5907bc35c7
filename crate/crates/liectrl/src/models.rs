//! Data model: group models with a fixed algebra basis and structure
//! constants, algebra and group elements, derivations, control systems, and
//! piecewise-constant controls.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matcore::{self, Scalar};

/// Residual above which a matrix fails its group's defining constraint.
pub const GROUP_TOL: f64 = 1e-8;
/// Residual above which a stored structure constant disagrees with the
/// matrix realization, or a derivation fails the Leibniz rule.
pub const ALGEBRA_TOL: f64 = 1e-10;

/// How the automorphism flow of the drift field is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowBackend {
    /// `g -> exp(tX) g exp(-tX)`; needs an inner generator.
    InnerConjugation,
    /// `g -> exp(e^{tD} log g)`; needs a globally invertible exponential,
    /// i.e. a nilpotent model.
    ExpLogTransport,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ClassFlags {
    pub nilpotent: bool,
    pub solvable: bool,
    pub semisimple: bool,
}

/// Defining constraint of the group inside its ambient matrix space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupConstraint {
    None,
    /// det = 1
    UnitDeterminant,
    /// U* U = I and det = 1
    SpecialUnitary,
    /// R^T R = I and det = 1
    SpecialOrthogonal,
    /// R^T J R = J with J = diag(1, 1, -1), det = 1
    LorentzForm,
    /// upper triangular with unit diagonal
    UpperUnipotent,
    /// det > 0
    PositiveDeterminant,
}

impl GroupConstraint {
    pub fn residual<T: Scalar>(&self, m: &DMatrix<T>) -> f64 {
        let n = m.nrows();
        match self {
            GroupConstraint::None => 0.0,
            GroupConstraint::UnitDeterminant => (m.determinant() - T::one()).modulus(),
            GroupConstraint::SpecialUnitary => {
                let g = m.adjoint() * m - DMatrix::<T>::identity(n, n);
                matcore::frobenius(&g) + (m.determinant() - T::one()).modulus()
            }
            GroupConstraint::SpecialOrthogonal => {
                let g = m.transpose() * m - DMatrix::<T>::identity(n, n);
                matcore::frobenius(&g) + (m.determinant() - T::one()).modulus()
            }
            GroupConstraint::LorentzForm => {
                let j = lorentz_form_matrix::<T>(n);
                let g = m.transpose() * &j * m - &j;
                matcore::frobenius(&g) + (m.determinant() - T::one()).modulus()
            }
            GroupConstraint::UpperUnipotent => {
                let mut r = 0.0f64;
                for i in 0..n {
                    r += (m[(i, i)] - T::one()).modulus();
                    for jj in 0..i {
                        r += m[(i, jj)].modulus();
                    }
                }
                r
            }
            GroupConstraint::PositiveDeterminant => {
                if m.determinant().real() > 0.0 {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }
}

pub fn lorentz_form_matrix<T: Scalar>(n: usize) -> DMatrix<T> {
    let mut j = DMatrix::<T>::identity(n, n);
    j[(n - 1, n - 1)] = -T::one();
    j
}

/// Structure constants `c^k_{ij}` of a `dim`-dimensional algebra.
#[derive(Debug, Clone)]
pub struct StructureConstants {
    dim: usize,
    c: Vec<f64>,
}

impl StructureConstants {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, c: vec![0.0; dim * dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.c[(k * self.dim + i) * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, k: usize, i: usize, j: usize, value: f64) {
        self.c[(k * self.dim + i) * self.dim + j] = value;
    }

    /// Coordinate bracket `[v, w]_k = sum_{ij} c^k_{ij} v_i w_j`.
    pub fn bracket(&self, v: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        let d = self.dim;
        let mut out = DVector::zeros(d);
        for i in 0..d {
            let vi = v[i];
            if vi == 0.0 {
                continue;
            }
            for j in 0..d {
                let vw = vi * w[j];
                if vw == 0.0 {
                    continue;
                }
                for k in 0..d {
                    out[k] += self.get(k, i, j) * vw;
                }
            }
        }
        out
    }
}

/// Least-squares map from flattened ambient matrices to basis coordinates.
#[derive(Debug, Clone)]
struct CoordSolver {
    bmat: DMatrix<f64>,
    pinv: DMatrix<f64>,
}

fn flatten<T: Scalar>(m: &DMatrix<T>) -> DVector<f64> {
    let mut v = Vec::with_capacity(2 * m.len());
    for x in m.iter() {
        v.push(x.real());
        v.push(x.imaginary());
    }
    DVector::from_vec(v)
}

impl CoordSolver {
    fn new<T: Scalar>(basis: &[DMatrix<T>]) -> Result<Self> {
        let cols: Vec<DVector<f64>> = basis.iter().map(flatten).collect();
        let bmat = DMatrix::from_columns(&cols);
        let btb = bmat.tr_mul(&bmat);
        let inv = btb.try_inverse().ok_or_else(|| {
            Error::InvalidInput("basis matrices are not linearly independent".into())
        })?;
        let pinv = inv * bmat.transpose();
        Ok(Self { bmat, pinv })
    }

    fn coords(&self, flat: &DVector<f64>) -> (DVector<f64>, f64) {
        let coords = &self.pinv * flat;
        let residual = (&self.bmat * &coords - flat).norm();
        (coords, residual)
    }
}

/// A matrix Lie group with a fixed basis of its algebra.
/// Group-specific closed-form exponential `(Z, t) -> exp(tZ)`.
pub type ExpClosedFn<T> = fn(&DMatrix<T>, f64) -> Result<DMatrix<T>>;

#[derive(Debug, Clone)]
pub struct LieGroupModel<T: Scalar> {
    pub name: String,
    pub dim: usize,
    pub ambient: usize,
    pub basis: Vec<DMatrix<T>>,
    pub structure: StructureConstants,
    pub flags: ClassFlags,
    pub constraint: GroupConstraint,
    pub flow_backend: FlowBackend,
    /// Group-specific closed-form exponential, when one exists.
    pub exp_closed: Option<ExpClosedFn<T>>,
    coord_solver: CoordSolver,
}

impl<T: Scalar> LieGroupModel<T> {
    /// Builds a model from a basis of ambient matrices. Structure constants
    /// are computed from matrix brackets; the basis must close.
    pub fn new(
        name: &str,
        basis: Vec<DMatrix<T>>,
        flags: ClassFlags,
        constraint: GroupConstraint,
        flow_backend: FlowBackend,
        exp_closed: Option<ExpClosedFn<T>>,
    ) -> Result<Arc<Self>> {
        if basis.is_empty() {
            return Err(Error::InvalidInput(format!("{name}: empty basis")));
        }
        let ambient = basis[0].nrows();
        for b in &basis {
            if b.nrows() != ambient || b.ncols() != ambient {
                return Err(Error::DimensionMismatch(format!(
                    "{name}: basis matrices must all be {ambient}x{ambient}"
                )));
            }
        }
        let dim = basis.len();
        let solver = CoordSolver::new(&basis)?;
        let scale = basis
            .iter()
            .map(matcore::frobenius)
            .fold(0.0, f64::max)
            .max(1.0);

        let mut structure = StructureConstants::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                let br = matcore::bracket(&basis[i], &basis[j])?;
                let (coords, residual) = solver.coords(&flatten(&br));
                if residual > ALGEBRA_TOL * scale * scale {
                    return Err(Error::InvalidInput(format!(
                        "{name}: basis does not close under the bracket \
                         (pair ({i},{j}), residual {residual:.3e})"
                    )));
                }
                for k in 0..dim {
                    structure.set(k, i, j, coords[k]);
                }
            }
        }

        Ok(Arc::new(Self {
            name: name.to_string(),
            dim,
            ambient,
            basis,
            structure,
            flags,
            constraint,
            flow_backend,
            exp_closed,
            coord_solver: solver,
        }))
    }

    /// Ambient matrix of the algebra element with the given coordinates.
    pub fn realize(&self, coords: &DVector<f64>) -> DMatrix<T> {
        let mut m = DMatrix::<T>::zeros(self.ambient, self.ambient);
        for (i, b) in self.basis.iter().enumerate() {
            m += b.map(|x| x * T::from_real(coords[i]));
        }
        m
    }

    /// Coordinates of an ambient algebra matrix; errors if the matrix is not
    /// in the span of the basis.
    pub fn coords_of(&self, m: &DMatrix<T>) -> Result<DVector<f64>> {
        let flat = flatten(m);
        let (coords, residual) = self.coord_solver.coords(&flat);
        if residual > 1e-8 * (1.0 + flat.norm()) {
            return Err(Error::InvalidInput(format!(
                "matrix is not in the algebra of {} (residual {residual:.3e})",
                self.name
            )));
        }
        Ok(coords)
    }

    pub fn bracket_coords(&self, v: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        self.structure.bracket(v, w)
    }

    /// Group exponential of the algebra element with the given coordinates,
    /// using the closed form when the model has one.
    pub fn exp_of(&self, coords: &DVector<f64>, t: f64) -> Result<DMatrix<T>> {
        let z = self.realize(coords);
        match self.exp_closed {
            Some(f) => f(&z, t),
            None => matcore::expm(&z, t),
        }
    }

    pub fn identity_matrix(&self) -> DMatrix<T> {
        DMatrix::identity(self.ambient, self.ambient)
    }
}

/// Element of the model's Lie algebra, as a real coordinate vector.
#[derive(Debug, Clone)]
pub struct AlgebraElement<T: Scalar> {
    pub model: Arc<LieGroupModel<T>>,
    pub coords: DVector<f64>,
}

impl<T: Scalar> AlgebraElement<T> {
    pub fn new(model: Arc<LieGroupModel<T>>, coords: DVector<f64>) -> Result<Self> {
        if coords.len() != model.dim {
            return Err(Error::DimensionMismatch(format!(
                "algebra element: expected {} coordinates, got {}",
                model.dim,
                coords.len()
            )));
        }
        if !coords.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("algebra element coordinates"));
        }
        Ok(Self { model, coords })
    }

    pub fn zero(model: Arc<LieGroupModel<T>>) -> Self {
        let coords = DVector::zeros(model.dim);
        Self { model, coords }
    }

    pub fn matrix(&self) -> DMatrix<T> {
        self.model.realize(&self.coords)
    }
}

/// Group element; construction checks the model's defining constraint.
#[derive(Debug, Clone)]
pub struct GroupElement<T: Scalar> {
    pub model: Arc<LieGroupModel<T>>,
    pub matrix: DMatrix<T>,
}

impl<T: Scalar> GroupElement<T> {
    pub fn new(model: Arc<LieGroupModel<T>>, matrix: DMatrix<T>) -> Result<Self> {
        Self::with_tolerance(model, matrix, GROUP_TOL)
    }

    /// Like [`GroupElement::new`] with a caller-chosen constraint tolerance.
    /// Long matrix products accumulate rounding roughly linearly in the
    /// factor count, so bulk solvers scale the tolerance accordingly.
    pub fn with_tolerance(
        model: Arc<LieGroupModel<T>>,
        matrix: DMatrix<T>,
        tol: f64,
    ) -> Result<Self> {
        if matrix.nrows() != model.ambient || matrix.ncols() != model.ambient {
            return Err(Error::DimensionMismatch(format!(
                "group element: expected {0}x{0}, got {1}x{2}",
                model.ambient,
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if !matcore::all_finite(&matrix) {
            return Err(Error::NonFinite("group element"));
        }
        let residual = model.constraint.residual(&matrix);
        if residual > tol {
            return Err(Error::InvalidInput(format!(
                "matrix violates the {} group constraint (residual {residual:.3e})",
                model.name
            )));
        }
        Ok(Self { model, matrix })
    }

    pub fn identity(model: Arc<LieGroupModel<T>>) -> Self {
        let matrix = model.identity_matrix();
        Self { model, matrix }
    }

    pub fn constraint_residual(&self) -> f64 {
        self.model.constraint.residual(&self.matrix)
    }
}

/// Derivation of the algebra, stored as its matrix in the fixed basis.
#[derive(Debug, Clone)]
pub struct Derivation<T: Scalar> {
    pub model: Arc<LieGroupModel<T>>,
    pub matrix: DMatrix<f64>,
    /// Present when the derivation is `ad(X)`; coordinates of `X`.
    pub inner_generator: Option<DVector<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeibnizViolation {
    pub i: usize,
    pub j: usize,
    pub residual: f64,
}

impl<T: Scalar> Derivation<T> {
    /// Wraps a matrix as a derivation; errors unless the Leibniz rule holds
    /// on all basis pairs.
    pub fn new(model: Arc<LieGroupModel<T>>, matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != model.dim || matrix.ncols() != model.dim {
            return Err(Error::DimensionMismatch(format!(
                "derivation: expected {0}x{0}, got {1}x{2}",
                model.dim,
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let d = Self { model, matrix, inner_generator: None };
        let violations = d.validate();
        if let Some(v) = violations.first() {
            return Err(Error::InvalidInput(format!(
                "matrix is not a derivation: Leibniz fails on basis pair \
                 ({}, {}) with residual {:.3e}",
                v.i, v.j, v.residual
            )));
        }
        Ok(d)
    }

    /// Leibniz-rule report: one entry per failing basis pair.
    pub fn validate(&self) -> Vec<LeibnizViolation> {
        let dim = self.model.dim;
        let scale = 1.0 + matcore::frobenius(&self.matrix.clone());
        let mut out = Vec::new();
        for i in 0..dim {
            for j in (i + 1)..dim {
                let ei = unit_vector(dim, i);
                let ej = unit_vector(dim, j);
                let lhs = &self.matrix * self.model.bracket_coords(&ei, &ej);
                let di = self.matrix.column(i).into_owned();
                let dj = self.matrix.column(j).into_owned();
                let rhs = self.model.bracket_coords(&di, &ej)
                    + self.model.bracket_coords(&ei, &dj);
                let residual = (lhs - rhs).norm();
                if residual > ALGEBRA_TOL * scale {
                    out.push(LeibnizViolation { i, j, residual });
                }
            }
        }
        out
    }

    pub fn is_inner(&self) -> bool {
        self.inner_generator.is_some()
    }

    /// Ambient matrix of the inner generator, when present.
    pub fn inner_generator_matrix(&self) -> Option<DMatrix<T>> {
        self.inner_generator.as_ref().map(|x| self.model.realize(x))
    }
}

fn unit_vector(dim: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(dim);
    v[i] = 1.0;
    v
}

/// `ad(X)` as a derivation: column `j` holds the coordinates of
/// `[X, basis_j]`.
pub fn derivation_from_inner<T: Scalar>(
    model: Arc<LieGroupModel<T>>,
    x: &DVector<f64>,
) -> Result<Derivation<T>> {
    if x.len() != model.dim {
        return Err(Error::DimensionMismatch(format!(
            "inner generator: expected {} coordinates, got {}",
            model.dim,
            x.len()
        )));
    }
    let dim = model.dim;
    let mut matrix = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        let col = model.bracket_coords(x, &unit_vector(dim, j));
        matrix.set_column(j, &col);
    }
    Ok(Derivation { model, matrix, inner_generator: Some(x.clone()) })
}

#[derive(Debug, Clone)]
pub struct ControlRange {
    pub min: DVector<f64>,
    pub max: DVector<f64>,
}

/// The system `dg/dt = X(g) + sum_j u_j Y_j(g)`.
#[derive(Debug, Clone)]
pub struct LinearControlSystem<T: Scalar> {
    pub model: Arc<LieGroupModel<T>>,
    pub derivation: Derivation<T>,
    /// Coordinates of the right-invariant control fields `Y_j`.
    pub control_fields: Vec<DVector<f64>>,
    pub control_range: Option<ControlRange>,
}

impl<T: Scalar> LinearControlSystem<T> {
    pub fn new(
        model: Arc<LieGroupModel<T>>,
        derivation: Derivation<T>,
        control_fields: Vec<DVector<f64>>,
        control_range: Option<ControlRange>,
    ) -> Result<Self> {
        if control_fields.is_empty() {
            return Err(Error::InvalidInput(
                "a linear control system needs at least one control field".into(),
            ));
        }
        for (j, y) in control_fields.iter().enumerate() {
            if y.len() != model.dim {
                return Err(Error::DimensionMismatch(format!(
                    "control field {j}: expected {} coordinates, got {}",
                    model.dim,
                    y.len()
                )));
            }
        }
        if let Some(r) = &control_range {
            let m = control_fields.len();
            if r.min.len() != m || r.max.len() != m {
                return Err(Error::DimensionMismatch(
                    "control range must have one bound per control channel".into(),
                ));
            }
            if r.min.iter().zip(r.max.iter()).any(|(lo, hi)| lo > hi) {
                return Err(Error::InvalidInput("control range has min > max".into()));
            }
        }
        Ok(Self { model, derivation, control_fields, control_range })
    }

    pub fn num_controls(&self) -> usize {
        self.control_fields.len()
    }

    /// Coordinates of `sum_j u_j Y_j`.
    pub fn combined_field(&self, u: &DVector<f64>) -> Result<DVector<f64>> {
        if u.len() != self.num_controls() {
            return Err(Error::DimensionMismatch(format!(
                "control vector: expected {} channels, got {}",
                self.num_controls(),
                u.len()
            )));
        }
        let mut w = DVector::zeros(self.model.dim);
        for (j, y) in self.control_fields.iter().enumerate() {
            w += y * u[j];
        }
        Ok(w)
    }
}

#[derive(Debug, Clone)]
pub struct ControlSegment {
    pub duration: f64,
    pub u: DVector<f64>,
}

/// Piecewise-constant control: an ordered list of (duration, value) segments.
#[derive(Debug, Clone)]
pub struct PiecewiseControl {
    pub segments: Vec<ControlSegment>,
}

impl PiecewiseControl {
    pub fn new(segments: Vec<ControlSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidInput("control has no segments".into()));
        }
        for (i, s) in segments.iter().enumerate() {
            if !(s.duration > 0.0 && s.duration.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "segment {i} has non-positive or non-finite duration {}",
                    s.duration
                )));
            }
            if !s.u.iter().all(|x| x.is_finite()) {
                return Err(Error::NonFinite("control segment value"));
            }
        }
        Ok(Self { segments })
    }

    pub fn constant(duration: f64, u: DVector<f64>) -> Result<Self> {
        Self::new(vec![ControlSegment { duration, u }])
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Index of the segment containing time `t` (right-open intervals; the
    /// final instant belongs to the last segment).
    pub fn segment_index_at(&self, t: f64) -> usize {
        let mut acc = 0.0;
        for (i, s) in self.segments.iter().enumerate() {
            acc += s.duration;
            if t < acc {
                return i;
            }
        }
        self.segments.len() - 1
    }

    pub fn u_at(&self, t: f64) -> &DVector<f64> {
        &self.segments[self.segment_index_at(t)].u
    }
}

/// Sampled solution curve.
#[derive(Debug, Clone)]
pub struct Trajectory<T: Scalar> {
    pub times: Vec<f64>,
    pub points: Vec<GroupElement<T>>,
    pub method_tag: String,
}

impl<T: Scalar> Trajectory<T> {
    pub fn new(times: Vec<f64>, points: Vec<GroupElement<T>>, method_tag: &str) -> Result<Self> {
        if times.len() != points.len() {
            return Err(Error::DimensionMismatch(
                "trajectory: times and points differ in length".into(),
            ));
        }
        if times.is_empty() || times[0] != 0.0 {
            return Err(Error::InvalidInput("trajectory must start at t = 0".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("trajectory times must be increasing".into()));
        }
        Ok(Self { times, points, method_tag: method_tag.to_string() })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn endpoint(&self) -> &GroupElement<T> {
        self.points.last().expect("trajectory is never empty")
    }

    pub fn max_constraint_residual(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.constraint_residual())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use nalgebra::{dmatrix, dvector};

    #[test]
    fn catalog_structure_constants_match_brackets() {
        // LieGroupModel::new recomputes and checks closure; instantiating
        // every catalog model exercises the consistency invariant.
        catalog::heisenberg();
        catalog::r2();
        catalog::sl2();
        catalog::su2();
        catalog::so3();
        catalog::so21();
        catalog::gl_plus(2).unwrap();
        catalog::gl_plus(3).unwrap();
    }

    #[test]
    fn structure_constants_antisymmetric() {
        let m = catalog::sl2();
        for i in 0..m.dim {
            for j in 0..m.dim {
                for k in 0..m.dim {
                    assert!((m.structure.get(k, i, j) + m.structure.get(k, j, i)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn inner_derivation_zero_generator() {
        let m = catalog::heisenberg();
        let d = derivation_from_inner(m, &dvector![0.0, 0.0, 0.0]).unwrap();
        assert_eq!(matcore::one_norm(&d.matrix.map(|x| x)), 0.0);
    }

    #[test]
    fn inner_derivation_heisenberg() {
        // ad(X1): X2 -> X3, X1 and X3 -> 0.
        let m = catalog::heisenberg();
        let d = derivation_from_inner(m, &dvector![1.0, 0.0, 0.0]).unwrap();
        let expected = dmatrix![0.0, 0.0, 0.0; 0.0, 0.0, 0.0; 0.0, 1.0, 0.0];
        assert_eq!(d.matrix, expected);
    }

    #[test]
    fn inner_derivation_sl2_diag() {
        // basis {H, E, F}: ad(H) = diag(0, 2, -2).
        let m = catalog::sl2();
        let d = derivation_from_inner(m, &dvector![1.0, 0.0, 0.0]).unwrap();
        let expected = dmatrix![0.0, 0.0, 0.0; 0.0, 2.0, 0.0; 0.0, 0.0, -2.0];
        assert!((d.matrix.clone() - expected).norm() < 1e-12);
    }

    #[test]
    fn inner_derivations_always_pass_leibniz() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let models = [catalog::sl2(), catalog::so3(), catalog::heisenberg()];
        for m in models {
            for _ in 0..20 {
                let x = DVector::from_fn(m.dim, |_, _| rng.gen_range(-1.0..1.0));
                let d = derivation_from_inner(m.clone(), &x).unwrap();
                assert!(d.validate().is_empty());
            }
        }
    }

    #[test]
    fn validate_derivation_zero_matrix() {
        let m = catalog::heisenberg();
        let d = Derivation::new(m, DMatrix::zeros(3, 3)).unwrap();
        assert!(d.validate().is_empty());
    }

    #[test]
    fn validate_derivation_heisenberg_pattern() {
        let m = catalog::heisenberg();
        let mat = dmatrix![
            1.0, 0.5, 0.0;
            0.25, 2.0, 0.0;
            0.7, -0.3, 3.0
        ];
        assert!(Derivation::new(m, mat).is_ok());
    }

    #[test]
    fn validate_derivation_trace_relation_violation() {
        let m = catalog::heisenberg();
        let mat = dmatrix![
            1.0, 0.0, 0.0;
            0.0, 2.0, 0.0;
            0.0, 0.0, 7.0   // should be 3
        ];
        let d = Derivation { model: m, matrix: mat, inner_generator: None };
        let v = d.validate();
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].i, v[0].j), (0, 1));
    }

    #[test]
    fn group_element_constraint_enforced() {
        let m = catalog::sl2();
        assert!(GroupElement::new(m.clone(), dmatrix![2.0, 0.0; 0.0, 1.0]).is_err());
        assert!(GroupElement::new(m, dmatrix![2.0, 0.0; 0.0, 0.5]).is_ok());
    }

    #[test]
    fn piecewise_control_rejects_bad_durations() {
        assert!(PiecewiseControl::constant(-1.0, dvector![0.0]).is_err());
        assert!(PiecewiseControl::constant(0.0, dvector![0.0]).is_err());
        assert!(PiecewiseControl::constant(f64::INFINITY, dvector![0.0]).is_err());
    }

    #[test]
    fn coords_roundtrip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for m in [catalog::so21(), catalog::sl2()] {
            for _ in 0..10 {
                let v = DVector::from_fn(m.dim, |_, _| rng.gen_range(-2.0..2.0));
                let back = m.coords_of(&m.realize(&v)).unwrap();
                assert!((back - v).norm() < 1e-12);
            }
        }
        // complex model
        let su2 = catalog::su2();
        let v = dvector![0.3, -0.7, 1.1];
        let back = su2.coords_of(&su2.realize(&v)).unwrap();
        assert!((back - v).norm() < 1e-12);
    }

    #[test]
    fn coords_of_rejects_outside_algebra() {
        let m = catalog::sl2();
        // identity has nonzero trace, not in sl(2)
        assert!(m.coords_of(&DMatrix::identity(2, 2)).is_err());
    }
}
