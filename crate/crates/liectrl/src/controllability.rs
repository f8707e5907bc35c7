//! Lie-algebraic controllability diagnostics: the subalgebra generated by
//! the control fields, its saturation under the derivation, the rank
//! condition, derivation-invariance, the spectral split of the saturated
//! subalgebra, and a verdict engine that combines them.

use nalgebra::{DMatrix, DVector};
use serde_json::json;

use crate::error::{Error, Result};
use crate::matcore::{self, Scalar, RANK_TOL};
use crate::models::{Derivation, LieGroupModel, LinearControlSystem, StructureConstants};

/// Real parts within this band of zero count as zero in [`eigensplit`].
pub const ZERO_BAND: f64 = 1e-9;

/// Smallest bracket-closed subspace containing the generators, as an
/// orthonormal coordinate basis. Computed by saturation: bracket all pairs,
/// adjoin new directions, repeat until the dimension stabilizes.
pub fn bracket_closure<T: Scalar>(
    model: &LieGroupModel<T>,
    generators: &[DVector<f64>],
) -> Vec<DVector<f64>> {
    let mut basis = matcore::span_union(generators, RANK_TOL);
    loop {
        let mut candidates = basis.clone();
        for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                candidates.push(model.bracket_coords(&basis[i], &basis[j]));
            }
        }
        let next = matcore::span_union(&candidates, RANK_TOL);
        if next.len() == basis.len() {
            return next;
        }
        basis = next;
    }
}

/// Span of `{D^i v : v in basis, 0 <= i < dim}`; the power bound suffices by
/// Cayley–Hamilton. Includes `i = 0`, so the input subspace is contained in
/// the result.
pub fn d_orbit<T: Scalar>(
    derivation: &Derivation<T>,
    subspace_basis: &[DVector<f64>],
) -> Vec<DVector<f64>> {
    let dim = derivation.matrix.nrows();
    let mut all = Vec::with_capacity(subspace_basis.len() * dim);
    for v in subspace_basis {
        let mut current = v.clone();
        for _ in 0..dim {
            all.push(current.clone());
            current = &derivation.matrix * current;
        }
    }
    matcore::span_union(&all, RANK_TOL)
}

/// Basis of the control subalgebra: the bracket closure of the control
/// fields alone.
pub fn compute_a<T: Scalar>(system: &LinearControlSystem<T>) -> Vec<DVector<f64>> {
    bracket_closure(&system.model, &system.control_fields)
}

/// Basis of the saturated subalgebra: the bracket closure of the
/// derivation-orbit of the control subalgebra.
pub fn compute_h<T: Scalar>(system: &LinearControlSystem<T>) -> Vec<DVector<f64>> {
    let a = compute_a(system);
    let orbit = d_orbit(&system.derivation, &a);
    bracket_closure(&system.model, &orbit)
}

/// The rank condition holds exactly when the saturated subalgebra is the
/// whole algebra.
pub fn rank_condition<T: Scalar>(system: &LinearControlSystem<T>) -> bool {
    compute_h(system).len() == system.model.dim
}

/// True iff `D v` lies in the given subspace for every basis vector `v`.
pub fn is_d_invariant<T: Scalar>(
    derivation: &Derivation<T>,
    subspace_basis: &[DVector<f64>],
) -> bool {
    subspace_basis.iter().all(|v| {
        let image = &derivation.matrix * v;
        let residual = matcore::project_out(&image, subspace_basis);
        residual.norm() <= RANK_TOL * (1.0 + image.norm())
    })
}

/// Dimensions `(dim h+, dim h0, dim h-)` of the generalized eigenspaces of
/// the derivation restricted to the given subspace, classified by the sign
/// of the eigenvalue real part with a `ZERO_BAND` neutral band.
pub fn eigensplit<T: Scalar>(
    derivation: &Derivation<T>,
    h_basis: &[DVector<f64>],
) -> Result<(usize, usize, usize)> {
    if h_basis.is_empty() {
        return Ok((0, 0, 0));
    }
    let ortho = matcore::span_union(h_basis, RANK_TOL);
    if ortho.len() != h_basis.len() {
        return Err(Error::Numerical(
            "eigensplit received a rank-deficient basis".into(),
        ));
    }
    let dim = derivation.matrix.nrows();
    let k = ortho.len();
    let b = DMatrix::from_columns(&ortho.iter().map(DVector::clone).collect::<Vec<_>>());
    debug_assert_eq!(b.shape(), (dim, k));
    let db = &derivation.matrix * &b;
    let restricted = b.transpose() * &db;
    // the subspace must be invariant for the restriction to be meaningful
    let defect = &db - &b * &restricted;
    if defect.norm() > 1e-8 * (1.0 + db.norm()) {
        return Err(Error::Numerical(format!(
            "eigensplit: subspace is not derivation-invariant (defect {:.3e})",
            defect.norm()
        )));
    }
    let eigs = matcore::eigenvalues(&restricted)?;
    let (mut plus, mut zero, mut minus) = (0, 0, 0);
    for lambda in eigs {
        if lambda.re.abs() < ZERO_BAND {
            zero += 1;
        } else if lambda.re > 0.0 {
            plus += 1;
        } else {
            minus += 1;
        }
    }
    Ok((plus, zero, minus))
}

/// Tagged conclusion of one decision rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictKind {
    NotControllableOnG,
    ControllableOnH,
    NotControllableOnH,
    Inconclusive,
}

impl VerdictKind {
    pub fn code(&self) -> &'static str {
        match self {
            VerdictKind::NotControllableOnG => "NOT_CONTROLLABLE_ON_G",
            VerdictKind::ControllableOnH => "CONTROLLABLE_ON_H",
            VerdictKind::NotControllableOnH => "NOT_CONTROLLABLE_ON_H",
            VerdictKind::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// Which hypotheses fired and what they imply, in plain language.
    pub trail: String,
}

#[derive(Debug, Clone)]
pub struct ControllabilityReport {
    pub a_basis: Vec<DVector<f64>>,
    pub h_basis: Vec<DVector<f64>>,
    pub dim_a: usize,
    pub dim_h: usize,
    pub dim_g: usize,
    pub rank_condition: bool,
    pub a_is_d_invariant: bool,
    /// (dim h+, dim h0, dim h-)
    pub split_dims: (usize, usize, usize),
    /// All decision rules that fired, in rule order; the first is primary.
    pub verdicts: Vec<Verdict>,
}

impl ControllabilityReport {
    pub fn primary(&self) -> &Verdict {
        &self.verdicts[0]
    }

    pub fn to_json(&self) -> serde_json::Value {
        let vecs = |basis: &[DVector<f64>]| -> Vec<Vec<f64>> {
            basis.iter().map(|v| v.iter().copied().collect()).collect()
        };
        json!({
            "a_basis": vecs(&self.a_basis),
            "h_basis": vecs(&self.h_basis),
            "dim_a": self.dim_a,
            "dim_h": self.dim_h,
            "dim_g": self.dim_g,
            "rank_condition": self.rank_condition,
            "a_is_D_invariant": self.a_is_d_invariant,
            "split_dims": [self.split_dims.0, self.split_dims.1, self.split_dims.2],
            "verdicts": self.verdicts.iter().map(|v| json!({
                "verdict": v.kind.code(),
                "trail": v.trail,
            })).collect::<Vec<_>>(),
        })
    }
}

fn bounded_range<T: Scalar>(system: &LinearControlSystem<T>) -> bool {
    system.control_range.as_ref().is_some_and(|r| {
        r.min.iter().all(|x| x.is_finite()) && r.max.iter().all(|x| x.is_finite())
    })
}

/// Runs every decision rule over the Lie-algebraic data of the system and
/// assembles the full report. Rules are evaluated in a fixed order and all
/// that fire are recorded; the first is the primary verdict.
pub fn controllability_report<T: Scalar>(
    system: &LinearControlSystem<T>,
) -> Result<ControllabilityReport> {
    let a_basis = compute_a(system);
    let h_basis = compute_h(system);
    let (dim_a, dim_h, dim_g) = (a_basis.len(), h_basis.len(), system.model.dim);
    let rank = dim_h == dim_g;
    let a_inv = is_d_invariant(&system.derivation, &a_basis);
    let split = eigensplit(&system.derivation, &h_basis)?;
    let neutral = split == (0, dim_h, 0);
    let on_all = if rank {
        "; h is the whole algebra, so this holds on all of G"
    } else {
        ""
    };

    let mut verdicts = Vec::new();
    if dim_h < dim_g {
        verdicts.push(Verdict {
            kind: VerdictKind::NotControllableOnG,
            trail: format!(
                "dim h = {dim_h} < dim g = {dim_g}: trajectories from the identity stay \
                 in a proper subgroup, so the system is not controllable on G"
            ),
        });
    }
    if a_inv {
        verdicts.push(Verdict {
            kind: VerdictKind::ControllableOnH,
            trail: format!(
                "the control subalgebra is invariant under the derivation, hence equals \
                 h; the system is controllable on the subgroup generated by h{on_all}"
            ),
        });
    }
    if system.model.flags.solvable && neutral {
        verdicts.push(Verdict {
            kind: VerdictKind::ControllableOnH,
            trail: format!(
                "the group is solvable and the derivation restricted to h has only \
                 eigenvalues with zero real part; the system is controllable on the \
                 subgroup generated by h{on_all}"
            ),
        });
    }
    if system.model.flags.nilpotent && bounded_range(system) {
        if neutral {
            verdicts.push(Verdict {
                kind: VerdictKind::ControllableOnH,
                trail: format!(
                    "the group is nilpotent, the control range is bounded, and the \
                     derivation restricted to h has only eigenvalues with zero real \
                     part; the system is controllable on the subgroup generated by \
                     h{on_all}"
                ),
            });
        } else {
            verdicts.push(Verdict {
                kind: VerdictKind::NotControllableOnH,
                trail: format!(
                    "the group is nilpotent, the control range is bounded, and the \
                     derivation restricted to h has {} eigenvalue(s) with positive and \
                     {} with negative real part; the system is not controllable on the \
                     subgroup generated by h{on_all}",
                    split.0, split.2
                ),
            });
        }
    }
    if verdicts.is_empty() {
        verdicts.push(Verdict {
            kind: VerdictKind::Inconclusive,
            trail: "no decision rule applies: h has full rank, the control subalgebra \
                    is not derivation-invariant, and neither the solvable nor the \
                    bounded-nilpotent hypotheses hold"
                .into(),
        });
    }

    Ok(ControllabilityReport {
        a_basis,
        h_basis,
        dim_a,
        dim_h,
        dim_g,
        rank_condition: rank,
        a_is_d_invariant: a_inv,
        split_dims: split,
        verdicts,
    })
}

fn span_of_brackets(
    sc: &StructureConstants,
    left: &[DVector<f64>],
    right: &[DVector<f64>],
) -> Vec<DVector<f64>> {
    let mut all = Vec::with_capacity(left.len() * right.len());
    for v in left {
        for w in right {
            all.push(sc.bracket(v, w));
        }
    }
    matcore::span_union(&all, RANK_TOL)
}

fn standard_basis(dim: usize) -> Vec<DVector<f64>> {
    (0..dim)
        .map(|i| DVector::from_fn(dim, |r, _| if r == i { 1.0 } else { 0.0 }))
        .collect()
}

/// Solvability via the derived series of the structure constants.
pub fn is_solvable(sc: &StructureConstants) -> bool {
    let mut series = standard_basis(sc.dim());
    loop {
        let next = span_of_brackets(sc, &series, &series);
        if next.is_empty() {
            return true;
        }
        if next.len() >= series.len() {
            return false;
        }
        series = next;
    }
}

/// Nilpotency via the lower central series of the structure constants.
pub fn is_nilpotent(sc: &StructureConstants) -> bool {
    let full = standard_basis(sc.dim());
    let mut series = full.clone();
    loop {
        let next = span_of_brackets(sc, &full, &series);
        if next.is_empty() {
            return true;
        }
        if next.len() >= series.len() {
            return false;
        }
        series = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::models::{derivation_from_inner, ControlRange};
    use nalgebra::{dmatrix, dvector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn e(dim: usize, i: usize) -> DVector<f64> {
        DVector::from_fn(dim, |r, _| if r == i { 1.0 } else { 0.0 })
    }

    fn span_contains(basis: &[DVector<f64>], v: &DVector<f64>) -> bool {
        matcore::project_out(v, basis).norm() < 1e-9 * (1.0 + v.norm())
    }

    #[test]
    fn closure_of_subalgebra_is_unchanged() {
        let model = catalog::heisenberg();
        let center = vec![dvector![0.0, 0.0, 3.0]];
        let basis = bracket_closure(&model, &center);
        assert_eq!(basis.len(), 1);
        assert!(span_contains(&basis, &e(3, 2)));
    }

    #[test]
    fn closure_heisenberg_generators_fill_algebra() {
        let model = catalog::heisenberg();
        let basis = bracket_closure(&model, &[e(3, 0), e(3, 1)]);
        assert_eq!(basis.len(), 3);
    }

    #[test]
    fn closure_sl2_e_f_fill_algebra() {
        // [E, F] = H
        let model = catalog::sl2();
        let basis = bracket_closure(&model, &[e(3, 1), e(3, 2)]);
        assert_eq!(basis.len(), 3);
    }

    #[test]
    fn closure_is_idempotent_and_monotone() {
        let model = catalog::sl2();
        let small = bracket_closure(&model, &[e(3, 1)]);
        let again = bracket_closure(&model, &small);
        assert_eq!(small.len(), again.len());
        let large = bracket_closure(&model, &[e(3, 1), e(3, 2)]);
        assert!(large.len() >= small.len());
        for v in &small {
            assert!(span_contains(&large, v));
        }
    }

    #[test]
    fn d_orbit_zero_derivation_is_identity() {
        let model = catalog::heisenberg();
        let d = crate::models::Derivation::new(model, DMatrix::zeros(3, 3)).unwrap();
        let orbit = d_orbit(&d, &[dvector![1.0, 2.0, 0.0]]);
        assert_eq!(orbit.len(), 1);
    }

    #[test]
    fn d_orbit_rotation_fills_plane() {
        let model = catalog::r2();
        let d = crate::models::Derivation::new(
            model,
            dmatrix![0.0, -1.0; 1.0, 0.0],
        )
        .unwrap();
        let orbit = d_orbit(&d, &[dvector![1.0, 0.0]]);
        assert_eq!(orbit.len(), 2);
    }

    #[test]
    fn d_orbit_heisenberg_center_stays_central() {
        let model = catalog::heisenberg();
        let d = crate::models::Derivation::new(
            model,
            dmatrix![1.0, 2.0, 0.0; 0.0, 3.0, 0.0; 0.0, 0.0, 4.0],
        )
        .unwrap();
        let orbit = d_orbit(&d, &[e(3, 2)]);
        assert_eq!(orbit.len(), 1);
        assert!(span_contains(&orbit, &e(3, 2)));
    }

    fn heis_system(
        d: DMatrix<f64>,
        ys: Vec<DVector<f64>>,
        range: Option<ControlRange>,
    ) -> LinearControlSystem<f64> {
        let model = catalog::heisenberg();
        let der = crate::models::Derivation::new(model.clone(), d).unwrap();
        LinearControlSystem::new(model, der, ys, range).unwrap()
    }

    #[test]
    fn compute_h_spanning_fields() {
        let sys = heis_system(
            DMatrix::zeros(3, 3),
            vec![e(3, 0), e(3, 1), e(3, 2)],
            None,
        );
        assert_eq!(compute_h(&sys).len(), 3);
        assert!(rank_condition(&sys));
    }

    #[test]
    fn compute_h_heisenberg_central_field() {
        let sys = heis_system(
            dmatrix![1.0, 0.0, 0.0; 0.0, -1.0, 0.0; 0.0, 0.0, 0.0],
            vec![dvector![0.0, 0.0, 2.0]],
            None,
        );
        let h = compute_h(&sys);
        assert_eq!(h.len(), 1);
        assert!(span_contains(&h, &e(3, 2)));
        assert!(!rank_condition(&sys));
    }

    #[test]
    fn compute_h_sl2_single_and_two_fields() {
        let model = catalog::sl2();
        // D = ad(H), Y = E: the orbit of span{E} is span{E}
        let der = derivation_from_inner(model.clone(), &e(3, 0)).unwrap();
        let sys = LinearControlSystem::new(
            model.clone(),
            der.clone(),
            vec![e(3, 1)],
            None,
        )
        .unwrap();
        let h = compute_h(&sys);
        assert_eq!(h.len(), 1);
        assert!(span_contains(&h, &e(3, 1)));
        let sys2 =
            LinearControlSystem::new(model, der, vec![e(3, 1), e(3, 2)], None).unwrap();
        assert_eq!(compute_h(&sys2).len(), 3);
    }

    #[test]
    fn rank_condition_rotation_on_plane() {
        let model = catalog::r2();
        let der = crate::models::Derivation::new(
            model.clone(),
            dmatrix![0.0, -1.0; 1.0, 0.0],
        )
        .unwrap();
        let sys =
            LinearControlSystem::new(model, der, vec![dvector![1.0, 0.0]], None).unwrap();
        assert!(rank_condition(&sys));
    }

    #[test]
    fn invariance_zero_derivation_and_center() {
        let model = catalog::heisenberg();
        let zero = crate::models::Derivation::new(model.clone(), DMatrix::zeros(3, 3)).unwrap();
        assert!(is_d_invariant(&zero, &[e(3, 0)]));
        let d = crate::models::Derivation::new(
            model.clone(),
            dmatrix![0.7, 0.2, 0.0; -0.1, 0.3, 0.0; 0.5, -0.9, 1.0],
        )
        .unwrap();
        assert!(is_d_invariant(&d, &[e(3, 2)]));
        let r2 = catalog::r2();
        let rot =
            crate::models::Derivation::new(r2, dmatrix![0.0, -1.0; 1.0, 0.0]).unwrap();
        assert!(!is_d_invariant(&rot, &[dvector![1.0, 0.0]]));
        let _ = Arc::strong_count(&model);
    }

    #[test]
    fn eigensplit_nilpotent_and_diagonal() {
        let model = catalog::heisenberg();
        let full = vec![e(3, 0), e(3, 1), e(3, 2)];
        let nil = crate::models::Derivation::new(
            model.clone(),
            dmatrix![0.0, 1.0, 0.0; 0.0, 0.0, 0.0; 0.0, 0.0, 0.0],
        )
        .unwrap();
        assert_eq!(eigensplit(&nil, &full).unwrap(), (0, 3, 0));
        let diag = crate::models::Derivation::new(
            model.clone(),
            DMatrix::from_diagonal(&dvector![1.0, -1.0, 0.0]),
        )
        .unwrap();
        assert_eq!(eigensplit(&diag, &full).unwrap(), (1, 1, 1));
        // triangular with eigenvalues {1, -2, -1}
        let tri = crate::models::Derivation::new(
            model,
            dmatrix![1.0, 5.0, 0.0; 0.0, -2.0, 0.0; 0.0, 0.0, -1.0],
        )
        .unwrap();
        assert_eq!(eigensplit(&tri, &full).unwrap(), (1, 0, 2));
    }

    #[test]
    fn eigensplit_rejects_non_invariant_subspace() {
        let model = catalog::r2();
        let rot =
            crate::models::Derivation::new(model, dmatrix![0.0, -1.0; 1.0, 0.0]).unwrap();
        assert!(matches!(
            eigensplit(&rot, &[dvector![1.0, 0.0]]),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn eigensplit_invariant_under_basis_shuffle() {
        let model = catalog::heisenberg();
        let d = crate::models::Derivation::new(
            model,
            dmatrix![0.3, 0.8, 0.0; 0.1, -0.5, 0.0; 0.4, 0.2, -0.2],
        )
        .unwrap();
        let b1 = vec![e(3, 0), e(3, 1), e(3, 2)];
        let mixed = vec![
            dvector![1.0, 1.0, 0.0],
            dvector![0.0, 1.0, 1.0],
            dvector![1.0, 0.0, 1.0],
        ];
        let s1 = eigensplit(&d, &matcore::span_union(&b1, 1e-12)).unwrap();
        let s2 = eigensplit(&d, &matcore::span_union(&mixed, 1e-12)).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn report_heisenberg_central_not_controllable_on_g() {
        let sys = heis_system(
            dmatrix![1.0, 0.0, 0.0; 0.0, -1.0, 0.0; 0.0, 0.0, 0.0],
            vec![dvector![0.0, 0.0, 2.0]],
            None,
        );
        let report = controllability_report(&sys).unwrap();
        assert_eq!(report.primary().kind, VerdictKind::NotControllableOnG);
        assert_eq!(report.dim_h, 1);
        assert!(!report.rank_condition);
        // the center is derivation-invariant, so the on-H rule also fires
        assert!(report
            .verdicts
            .iter()
            .any(|v| v.kind == VerdictKind::ControllableOnH));
    }

    #[test]
    fn report_spanning_fields_controllable() {
        let sys = heis_system(
            dmatrix![0.5, 0.0, 0.0; 0.0, 0.5, 0.0; 0.0, 0.0, 1.0],
            vec![e(3, 0), e(3, 1), e(3, 2)],
            None,
        );
        let report = controllability_report(&sys).unwrap();
        assert_eq!(report.primary().kind, VerdictKind::ControllableOnH);
        assert!(report.rank_condition);
        assert!(report.a_is_d_invariant);
        assert!(report.primary().trail.contains("all of G"));
    }

    #[test]
    fn report_nilpotent_bounded_hyperbolic_not_controllable_on_h() {
        // D swaps the two generator directions: eigenvalues {1, -1, 0} on h = g,
        // a = span{X1} is not invariant, so the bounded-nilpotent rule decides.
        let sys = heis_system(
            dmatrix![0.0, 1.0, 0.0; 1.0, 0.0, 0.0; 0.0, 0.0, 0.0],
            vec![e(3, 0)],
            Some(ControlRange {
                min: dvector![-1.0],
                max: dvector![1.0],
            }),
        );
        let report = controllability_report(&sys).unwrap();
        assert_eq!(report.dim_h, 3);
        assert!(!report.a_is_d_invariant);
        assert_eq!(report.split_dims, (1, 1, 1));
        assert_eq!(report.primary().kind, VerdictKind::NotControllableOnH);
    }

    #[test]
    fn report_nilpotent_bounded_neutral_controllable_on_h() {
        let sys = heis_system(
            dmatrix![0.0, 1.0, 0.0; 0.0, 0.0, 0.0; 0.0, 0.0, 0.0],
            vec![e(3, 1)],
            Some(ControlRange {
                min: dvector![-1.0],
                max: dvector![1.0],
            }),
        );
        let report = controllability_report(&sys).unwrap();
        assert!(!report.a_is_d_invariant);
        assert_eq!(report.split_dims, (0, report.dim_h, 0));
        assert_eq!(report.primary().kind, VerdictKind::ControllableOnH);
    }

    #[test]
    fn report_inconclusive_on_semisimple_without_invariance() {
        // sl2, D = ad(H), single field E + F: a is not invariant, h = sl2,
        // the spectrum of ad(H) is {2, 0, -2}, and sl2 is neither solvable
        // nor nilpotent.
        let model = catalog::sl2();
        let der = derivation_from_inner(model.clone(), &e(3, 0)).unwrap();
        let sys = LinearControlSystem::new(
            model,
            der,
            vec![dvector![0.0, 1.0, 1.0]],
            None,
        )
        .unwrap();
        let report = controllability_report(&sys).unwrap();
        assert!(report.rank_condition);
        assert_eq!(report.primary().kind, VerdictKind::Inconclusive);
    }

    #[test]
    fn h_is_always_d_invariant_and_a_equals_h_iff_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..25 {
            let model = catalog::sl2();
            let x = DVector::from_fn(3, |_, _| rng.gen_range(-1.0..1.0));
            let y = DVector::from_fn(3, |_, _| rng.gen_range(-1.0..1.0));
            let der = derivation_from_inner(model.clone(), &x).unwrap();
            let sys = LinearControlSystem::new(model, der, vec![y], None).unwrap();
            let a = compute_a(&sys);
            let h = compute_h(&sys);
            assert!(is_d_invariant(&sys.derivation, &h));
            let equal = a.len() == h.len();
            assert_eq!(equal, is_d_invariant(&sys.derivation, &a));
        }
    }

    #[test]
    fn series_flags_match_catalog() {
        let h = catalog::heisenberg();
        assert!(is_nilpotent(&h.structure) && is_solvable(&h.structure));
        let r = catalog::r2();
        assert!(is_nilpotent(&r.structure) && is_solvable(&r.structure));
        let s = catalog::sl2();
        assert!(!is_nilpotent(&s.structure) && !is_solvable(&s.structure));
        let o = catalog::so3();
        assert!(!is_nilpotent(&o.structure) && !is_solvable(&o.structure));
        let u = catalog::su2();
        assert!(!is_solvable(&u.structure));
        let l = catalog::so21();
        assert!(!is_solvable(&l.structure));
    }

    #[test]
    fn report_json_shape() {
        let sys = heis_system(
            dmatrix![1.0, 0.0, 0.0; 0.0, -1.0, 0.0; 0.0, 0.0, 0.0],
            vec![dvector![0.0, 0.0, 2.0]],
            None,
        );
        let value = controllability_report(&sys).unwrap().to_json();
        assert_eq!(value["dim_g"], 3);
        assert_eq!(value["dim_h"], 1);
        assert_eq!(value["rank_condition"], false);
        assert_eq!(value["split_dims"].as_array().unwrap().len(), 3);
        assert_eq!(
            value["verdicts"][0]["verdict"],
            "NOT_CONTROLLABLE_ON_G"
        );
        assert!(value["verdicts"][0]["trail"].as_str().unwrap().len() > 10);
    }
}
