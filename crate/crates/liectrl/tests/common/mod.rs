#![allow(dead_code)]

//! Seeded random generators shared by the integration test suites.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use liectrl::matcore::{self, Scalar};
use liectrl::models::{
    derivation_from_inner, Derivation, GroupElement, LieGroupModel, LinearControlSystem,
};

pub fn random_coords<R: Rng>(rng: &mut R, dim: usize) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0))
}

/// Random algebra coordinates whose realized matrix has Frobenius norm <= cap.
pub fn capped_coords<T: Scalar, R: Rng>(
    model: &LieGroupModel<T>,
    rng: &mut R,
    cap: f64,
) -> DVector<f64> {
    let c = random_coords(rng, model.dim);
    let norm = matcore::frobenius(&model.realize(&c));
    if norm > cap {
        c * (cap / norm)
    } else {
        c
    }
}

/// Random system with an inner derivation and a single control field,
/// both generators bounded by 1 in Frobenius norm.
pub fn random_inner_system<T: Scalar, R: Rng>(
    model: &Arc<LieGroupModel<T>>,
    rng: &mut R,
) -> LinearControlSystem<T> {
    let x = capped_coords(model.as_ref(), rng, 1.0);
    let y = capped_coords(model.as_ref(), rng, 1.0);
    let derivation = derivation_from_inner(model.clone(), &x).unwrap();
    LinearControlSystem::new(model.clone(), derivation, vec![y], None).unwrap()
}

/// Random group element: the exponential of a bounded algebra element.
pub fn random_group_element<T: Scalar, R: Rng>(
    model: &Arc<LieGroupModel<T>>,
    rng: &mut R,
    cap: f64,
) -> GroupElement<T> {
    let c = capped_coords(model.as_ref(), rng, cap);
    let m = model.exp_of(&c, 1.0).unwrap();
    GroupElement::new(model.clone(), m).unwrap()
}

/// Random derivation of the Heisenberg algebra: in the basis
/// (X1, X2, X3 = [X1, X2]) these are exactly the matrices with
/// a13 = a23 = 0 and a33 = a11 + a22.
pub fn random_heisenberg_derivation<R: Rng>(
    model: &Arc<LieGroupModel<f64>>,
    rng: &mut R,
) -> Derivation<f64> {
    let a11 = rng.gen_range(-1.0..1.0);
    let a22 = rng.gen_range(-1.0..1.0);
    let mut m = DMatrix::zeros(3, 3);
    m[(0, 0)] = a11;
    m[(0, 1)] = rng.gen_range(-1.0..1.0);
    m[(1, 0)] = rng.gen_range(-1.0..1.0);
    m[(1, 1)] = a22;
    m[(2, 0)] = rng.gen_range(-1.0..1.0);
    m[(2, 1)] = rng.gen_range(-1.0..1.0);
    m[(2, 2)] = a11 + a22;
    Derivation::new(model.clone(), m).unwrap()
}
