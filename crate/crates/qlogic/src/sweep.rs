//! Seeded random instances for Hilbert-space sweeps.

use qlogic_core::hilbert::{
    CMatrix, CVector, DensityOperator, ProjectionOperator, PureVector, C64,
};
use rand::Rng;

/// Uniform-ish random unit vector (components in the unit square, then
/// normalized).
pub fn unit_vector<R: Rng>(rng: &mut R, dim: usize) -> PureVector {
    loop {
        let v = CVector::from_iterator(
            dim,
            (0..dim).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))),
        );
        if v.norm() > 1e-3 {
            return PureVector::normalized(v).expect("nonzero");
        }
    }
}

/// Projection onto the span of `rank` random vectors.
pub fn projection_of_rank<R: Rng>(rng: &mut R, dim: usize, rank: usize) -> ProjectionOperator {
    let vs: Vec<CVector> = (0..rank)
        .map(|_| unit_vector(rng, dim).vector().clone())
        .collect();
    ProjectionOperator::onto_span(dim, &vs, 1e-6).expect("dimensions agree")
}

/// Projection of uniformly random rank in `0..=dim`.
pub fn projection<R: Rng>(rng: &mut R, dim: usize) -> ProjectionOperator {
    let rank = rng.random_range(0..=dim);
    projection_of_rank(rng, dim, rank)
}

pub fn rank_one<R: Rng>(rng: &mut R, dim: usize) -> ProjectionOperator {
    ProjectionOperator::rank_one(&unit_vector(rng, dim))
}

/// Diagonal density operator with weights bounded away from zero.
pub fn diagonal_density<R: Rng>(rng: &mut R, dim: usize) -> (DensityOperator, Vec<f64>) {
    let w: Vec<f64> = (0..dim).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    let w: Vec<f64> = w.iter().map(|x| x / total).collect();
    let m = CMatrix::from_fn(dim, dim, |i, j| {
        C64::new(if i == j { w[i] } else { 0.0 }, 0.0)
    });
    (DensityOperator::new(m, 1e-9).expect("valid weights"), w)
}

/// Random diagonal 0/1 mask, nonempty when `nonempty` is set.
pub fn mask<R: Rng>(rng: &mut R, dim: usize, nonempty: bool) -> Vec<bool> {
    let mut m: Vec<bool> = (0..dim).map(|_| rng.random_bool(0.5)).collect();
    if nonempty && !m.contains(&true) {
        let i = rng.random_range(0..dim);
        m[i] = true;
    }
    m
}
