//! Projections and density operators on `C^d`: the trace formula for
//! conditional probabilities, the `efe = s·e` transition criterion, tensor
//! embeddings and pure-state cloning checks.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Tolerance for invariant checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Tolerance for exactly representable (commuting) cases.
pub const EXACT_TOLERANCE: f64 = 1e-12;

fn c(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

fn check_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::InvalidOperator(format!(
            "matrix is {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    (m - m.adjoint()).norm() <= tol
}

fn trace(m: &CMatrix) -> f64 {
    m.trace().re
}

/// A unit vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureVector {
    v: CVector,
}

impl PureVector {
    pub fn new(v: CVector, tol: f64) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::InvalidOperator("empty vector".into()));
        }
        if (v.norm() - 1.0).abs() > tol {
            return Err(Error::InvalidOperator(format!(
                "vector has norm {}",
                v.norm()
            )));
        }
        Ok(PureVector { v })
    }

    /// Scales a nonzero vector to unit length.
    pub fn normalized(v: CVector) -> Result<Self> {
        let n = v.norm();
        if v.is_empty() || n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidOperator(
                "cannot normalize a zero vector".into(),
            ));
        }
        Ok(PureVector { v: v.unscale(n) })
    }

    pub fn from_real(xs: &[f64]) -> Result<Self> {
        Self::normalized(CVector::from_iterator(xs.len(), xs.iter().map(|&x| c(x))))
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn vector(&self) -> &CVector {
        &self.v
    }

    /// `ξ ⊗ η`.
    pub fn tensor(&self, other: &PureVector) -> PureVector {
        PureVector {
            v: self.v.kronecker(&other.v),
        }
    }

    /// `|⟨ξ|η⟩|²`.
    pub fn overlap(&self, other: &PureVector) -> f64 {
        self.v.dotc(&other.v).norm_sqr()
    }
}

/// A self-adjoint idempotent matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionOperator {
    m: CMatrix,
}

impl ProjectionOperator {
    pub fn new(m: CMatrix, tol: f64) -> Result<Self> {
        check_square(&m)?;
        if !is_hermitian(&m, tol) {
            return Err(Error::InvalidOperator(
                "projection is not self-adjoint".into(),
            ));
        }
        if (&m * &m - &m).norm() > tol {
            return Err(Error::InvalidOperator(
                "projection is not idempotent".into(),
            ));
        }
        Ok(ProjectionOperator { m })
    }

    pub fn identity(dim: usize) -> Self {
        ProjectionOperator {
            m: CMatrix::identity(dim, dim),
        }
    }

    pub fn zero(dim: usize) -> Self {
        ProjectionOperator {
            m: CMatrix::zeros(dim, dim),
        }
    }

    /// `|ξ⟩⟨ξ|`.
    pub fn rank_one(xi: &PureVector) -> Self {
        ProjectionOperator {
            m: &xi.v * xi.v.adjoint(),
        }
    }

    /// Projection onto the span of `vectors` (Gram-Schmidt; vectors within
    /// `tol` of the current span are skipped).
    pub fn onto_span(dim: usize, vectors: &[CVector], tol: f64) -> Result<Self> {
        let mut basis: Vec<CVector> = Vec::new();
        for v in vectors {
            check_dims(dim, v.len())?;
            let mut w = v.clone();
            for b in &basis {
                let p = b.dotc(&w);
                w -= b * p;
            }
            let n = w.norm();
            if n > tol {
                basis.push(w.unscale(n));
            }
        }
        let mut m = CMatrix::zeros(dim, dim);
        for b in &basis {
            m += b * b.adjoint();
        }
        Ok(ProjectionOperator { m })
    }

    /// Diagonal projection with ones where `mask` is set.
    pub fn diagonal(mask: &[bool]) -> Self {
        let d = DVector::from_iterator(
            mask.len(),
            mask.iter().map(|&b| c(if b { 1.0 } else { 0.0 })),
        );
        ProjectionOperator {
            m: CMatrix::from_diagonal(&d),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn rank(&self) -> usize {
        trace(&self.m).round() as usize
    }

    /// `1 - e`.
    pub fn complement(&self) -> Self {
        ProjectionOperator {
            m: CMatrix::identity(self.dim(), self.dim()) - &self.m,
        }
    }
}

/// A positive semidefinite matrix of unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    m: CMatrix,
}

impl DensityOperator {
    pub fn new(m: CMatrix, tol: f64) -> Result<Self> {
        check_square(&m)?;
        if !is_hermitian(&m, tol) {
            return Err(Error::InvalidOperator(
                "density operator is not self-adjoint".into(),
            ));
        }
        if (trace(&m) - 1.0).abs() > tol {
            return Err(Error::InvalidOperator(format!(
                "density operator has trace {}",
                trace(&m)
            )));
        }
        // Symmetrize before the eigen solver, which reads one triangle only.
        let h = (&m + m.adjoint()).unscale(2.0);
        let min = h
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min < -tol {
            return Err(Error::InvalidOperator(format!(
                "density operator has eigenvalue {min}"
            )));
        }
        Ok(DensityOperator { m })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOperator {
            m: CMatrix::identity(dim, dim).unscale(dim as f64),
        }
    }

    pub fn pure(xi: &PureVector) -> Self {
        DensityOperator {
            m: &xi.v * xi.v.adjoint(),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }
}

/// A matrix with `U†U = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryOperator {
    m: CMatrix,
}

impl UnitaryOperator {
    pub fn new(m: CMatrix, tol: f64) -> Result<Self> {
        let d = check_square(&m)?;
        if (m.adjoint() * &m - CMatrix::identity(d, d)).norm() > tol {
            return Err(Error::InvalidOperator("matrix is not unitary".into()));
        }
        Ok(UnitaryOperator { m })
    }

    pub fn identity(dim: usize) -> Self {
        UnitaryOperator {
            m: CMatrix::identity(dim, dim),
        }
    }

    /// The permutation matrix sending basis vector `j` to `perm[j]`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let d = perm.len();
        let mut seen = alloc::vec![false; d];
        let mut m = CMatrix::zeros(d, d);
        for (j, &i) in perm.iter().enumerate() {
            if i >= d || core::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidOperator("not a permutation".into()));
            }
            m[(i, j)] = c(1.0);
        }
        Ok(UnitaryOperator { m })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }
}

/// `tr(a·e·f·e) / tr(a·e)`: the probability of `f` after measuring `e`
/// in the state `a`.
pub fn trace_cond_prob(
    a: &DensityOperator,
    e: &ProjectionOperator,
    f: &ProjectionOperator,
    tol: f64,
) -> Result<f64> {
    check_dims(a.dim(), e.dim())?;
    check_dims(a.dim(), f.dim())?;
    let ae = &a.m * &e.m;
    let denom = trace(&ae);
    if denom <= tol {
        return Err(Error::ZeroProbability);
    }
    Ok(trace(&(ae * &f.m * &e.m)) / denom)
}

/// `s` with `efe = s·e`, if it exists. `s` is the least-squares fit
/// `tr(efe·e)/tr(e)`; `None` when the residual exceeds `tol` or `e = 0`.
pub fn transition_exists(
    e: &ProjectionOperator,
    f: &ProjectionOperator,
    tol: f64,
) -> Result<Option<f64>> {
    check_dims(e.dim(), f.dim())?;
    let te = trace(&e.m);
    if te <= tol {
        return Ok(None);
    }
    let efe = &e.m * &f.m * &e.m;
    let s = trace(&(&efe * &e.m)) / te;
    Ok(((efe - e.m.scale(s)).norm() <= tol).then_some(s))
}

/// `⟨ξ|fξ⟩`.
pub fn atom_transition(xi: &PureVector, f: &ProjectionOperator) -> Result<f64> {
    check_dims(f.dim(), xi.dim())?;
    Ok(xi.v.dotc(&(&f.m * &xi.v)).re)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

/// `e ⊗ 1` or `1 ⊗ e`.
pub fn tensor_embed(e: &ProjectionOperator, side: Side, other_dim: usize) -> ProjectionOperator {
    let id = CMatrix::identity(other_dim, other_dim);
    let m = match side {
        Side::First => e.m.kronecker(&id),
        Side::Second => id.kronecker(&e.m),
    };
    ProjectionOperator { m }
}

/// `e ⊗ f`, the meet of `e ⊗ 1` and `1 ⊗ f`.
pub fn tensor_meet(e: &ProjectionOperator, f: &ProjectionOperator) -> ProjectionOperator {
    ProjectionOperator {
        m: e.m.kronecker(&f.m),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lemma2MatrixReport {
    pub first: f64,
    pub second: f64,
    pub joint: f64,
}

/// `ℙ(e2⊗f2 | e1⊗f1) = ℙ(e2|e1)·ℙ(f2|f1)` within `tol`.
pub fn lemma2_matrix_check(
    e1: &ProjectionOperator,
    e2: &ProjectionOperator,
    f1: &ProjectionOperator,
    f2: &ProjectionOperator,
    tol: f64,
) -> Result<Lemma2MatrixReport> {
    check_dims(e1.dim(), e2.dim())?;
    check_dims(f1.dim(), f2.dim())?;
    let need = |x: Option<f64>, what: &str| {
        x.ok_or_else(|| Error::PreconditionFailed(format!("{what} transition does not exist")))
    };
    let first = need(transition_exists(e1, e2, tol)?, "first factor")?;
    let second = need(transition_exists(f1, f2, tol)?, "second factor")?;
    let g1 = tensor_meet(e1, f1);
    let g2 = tensor_meet(e2, f2);
    let joint = transition_exists(&g1, &g2, tol)?
        .ok_or_else(|| Error::CheckFailed("joint transition does not exist".into()))?;
    if (joint - first * second).abs() > tol {
        return Err(Error::CheckFailed(format!(
            "joint {joint} differs from product {}",
            first * second
        )));
    }
    Ok(Lemma2MatrixReport {
        first,
        second,
        joint,
    })
}

/// Whether `U(ξ ⊗ f)` equals `ξ ⊗ ξ` up to phase for every `ξ` in `c`.
pub fn test_unitary_cloner(
    u: &UnitaryOperator,
    c: &[PureVector],
    f: &PureVector,
    tol: f64,
) -> Result<bool> {
    let d = f.dim();
    check_dims(d * d, u.dim())?;
    for xi in c {
        check_dims(d, xi.dim())?;
        let out = &u.m * xi.tensor(f).v;
        let target = xi.tensor(xi);
        let lhs = &out * out.adjoint();
        let rhs = &target.v * target.v.adjoint();
        if (lhs - rhs).norm() > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoCloningReport {
    /// `|⟨ξ1|ξ2⟩|²`.
    pub s: f64,
    pub s_squared: f64,
    pub cloneable: bool,
}

/// A pair of pure states can be cloned together only if `s² = s`.
pub fn no_cloning_witness(xi1: &PureVector, xi2: &PureVector, tol: f64) -> Result<NoCloningReport> {
    check_dims(xi1.dim(), xi2.dim())?;
    let s = xi1.overlap(xi2);
    Ok(NoCloningReport {
        s,
        s_squared: s * s,
        cloneable: s.abs() <= tol || (s - 1.0).abs() <= tol,
    })
}

/// Whether conditional probabilities on the projection lattice of `C^dim`
/// are unique. They are not for `dim = 2`, where every pair of distinct
/// atoms generates a copy of MO1.
pub fn unique_conditionals(dim: usize) -> bool {
    dim != 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = DEFAULT_TOLERANCE;

    fn random_vector(rng: &mut ChaCha8Rng, d: usize) -> PureVector {
        let v = CVector::from_iterator(
            d,
            (0..d).map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))),
        );
        PureVector::normalized(v).unwrap()
    }

    fn random_projection(rng: &mut ChaCha8Rng, d: usize) -> ProjectionOperator {
        let k = rng.random_range(0..=d);
        let vs: Vec<CVector> = (0..k).map(|_| random_vector(rng, d).v).collect();
        ProjectionOperator::onto_span(d, &vs, 1e-6).unwrap()
    }

    #[test]
    fn trace_formula_examples() {
        let a = DensityOperator::maximally_mixed(3);
        let e = ProjectionOperator::diagonal(&[true, true, false]);
        let f = ProjectionOperator::diagonal(&[false, true, true]);
        assert!((trace_cond_prob(&a, &e, &f, TOL).unwrap() - 0.5).abs() < EXACT_TOLERANCE);
        assert!((trace_cond_prob(&a, &e, &e, TOL).unwrap() - 1.0).abs() < EXACT_TOLERANCE);
        assert!(trace_cond_prob(&a, &e, &e.complement(), TOL).unwrap().abs() < EXACT_TOLERANCE);
        let zero = ProjectionOperator::zero(3);
        assert_eq!(
            trace_cond_prob(&a, &zero, &f, TOL),
            Err(Error::ZeroProbability)
        );
    }

    #[test]
    fn transition_examples() {
        let e = ProjectionOperator::diagonal(&[true, true, false]);
        assert!((transition_exists(&e, &e, TOL).unwrap().unwrap() - 1.0).abs() < TOL);
        let eta = PureVector::from_real(&[0.0, 1.0, 1.0]).unwrap();
        let f = ProjectionOperator::rank_one(&eta);
        assert_eq!(transition_exists(&e, &f, TOL).unwrap(), None);

        let xi = PureVector::from_real(&[1.0, 0.0, 0.0]).unwrap();
        let g = ProjectionOperator::rank_one(&PureVector::from_real(&[1.0, 1.0, 0.0]).unwrap());
        assert!((atom_transition(&xi, &g).unwrap() - 0.5).abs() < TOL);
        assert!(
            (atom_transition(&xi, &ProjectionOperator::rank_one(&xi)).unwrap() - 1.0).abs() < TOL
        );
        assert!(
            atom_transition(&xi, &ProjectionOperator::rank_one(&xi).complement())
                .unwrap()
                .abs()
                < TOL
        );
    }

    #[test]
    fn embeddings() {
        let id = ProjectionOperator::identity(2);
        assert_eq!(
            tensor_embed(&id, Side::First, 3),
            ProjectionOperator::identity(6)
        );
        let xi = PureVector::from_real(&[1.0, 2.0]).unwrap();
        let e = ProjectionOperator::rank_one(&xi);
        let big = tensor_embed(&e, Side::Second, 3);
        assert_eq!(big.rank(), 3);
        ProjectionOperator::new(big.matrix().clone(), TOL).unwrap();
        let f = ProjectionOperator::rank_one(&PureVector::from_real(&[1.0, -1.0]).unwrap());
        let prod =
            tensor_embed(&e, Side::First, 2).matrix() * tensor_embed(&f, Side::Second, 2).matrix();
        assert!((prod - tensor_meet(&e, &f).matrix()).norm() < TOL);
    }

    #[test]
    fn validation() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(0.0), c(0.0)]);
        assert!(ProjectionOperator::new(m.clone(), TOL).is_err());
        assert!(UnitaryOperator::new(m, TOL).is_err());
        let bad = CMatrix::from_row_slice(2, 2, &[c(1.5), c(0.0), c(0.0), c(-0.5)]);
        assert!(DensityOperator::new(bad, TOL).is_err());
        assert!(PureVector::new(CVector::from_element(2, c(1.0)), TOL).is_err());
        assert!(UnitaryOperator::permutation(&[0, 0]).is_err());
    }

    #[test]
    fn cloner_examples() {
        let zero = PureVector::from_real(&[1.0, 0.0]).unwrap();
        let one = PureVector::from_real(&[0.0, 1.0]).unwrap();
        let plus = PureVector::from_real(&[1.0, 1.0]).unwrap();
        // |a,b> -> |a, a xor b> with basis index 2a + b.
        let cnot = UnitaryOperator::permutation(&[0, 1, 3, 2]).unwrap();
        assert!(test_unitary_cloner(&cnot, &[zero.clone(), one.clone()], &zero, TOL).unwrap());
        assert!(!test_unitary_cloner(&cnot, &[zero.clone(), plus.clone()], &zero, TOL).unwrap());
        assert!(test_unitary_cloner(
            &UnitaryOperator::identity(4),
            core::slice::from_ref(&zero),
            &zero,
            TOL
        )
        .unwrap());
        let r = no_cloning_witness(&zero, &plus, TOL).unwrap();
        assert!((r.s - 0.5).abs() < TOL && (r.s_squared - 0.25).abs() < TOL && !r.cloneable);
        assert!(no_cloning_witness(&zero, &one, TOL).unwrap().cloneable);
        assert!(no_cloning_witness(&plus, &plus, TOL).unwrap().cloneable);
        assert!(matches!(
            test_unitary_cloner(
                &cnot,
                core::slice::from_ref(&zero),
                &PureVector::from_real(&[1.0, 0.0, 0.0]).unwrap(),
                TOL
            ),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn random_rank_one_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let d = rng.random_range(2..=4);
            let xi = random_vector(&mut rng, d);
            let f = random_projection(&mut rng, d);
            let e = ProjectionOperator::rank_one(&xi);
            let s = transition_exists(&e, &f, TOL).unwrap().unwrap();
            assert!((s - atom_transition(&xi, &f).unwrap()).abs() < TOL);

            let [e1, e2, f1, f2] =
                [0; 4].map(|_| ProjectionOperator::rank_one(&random_vector(&mut rng, d)));
            let r = lemma2_matrix_check(&e1, &e2, &f1, &f2, TOL).unwrap();
            assert!((r.joint - r.first * r.second).abs() < TOL);
        }
    }

    #[test]
    fn conditional_is_additive() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let d = rng.random_range(2..=4);
            let xi = random_vector(&mut rng, d);
            let a = DensityOperator::pure(&xi).matrix().scale(0.5)
                + DensityOperator::maximally_mixed(d).matrix().scale(0.5);
            let a = DensityOperator::new(a, TOL).unwrap();
            let e = random_projection(&mut rng, d);
            if e.rank() == 0 {
                continue;
            }
            let f = random_projection(&mut rng, d);
            let p = trace_cond_prob(&a, &e, &f, TOL).unwrap();
            let q = trace_cond_prob(&a, &e, &f.complement(), TOL).unwrap();
            assert!((p + q - 1.0).abs() < TOL);
            assert!((-TOL..=1.0 + TOL).contains(&p));
        }
    }

    #[test]
    fn commuting_case_is_classical() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let d = rng.random_range(2..=5);
            let w: Vec<f64> = (0..d).map(|_| rng.random_range(0.1..1.0)).collect();
            let total: f64 = w.iter().sum();
            let a =
                CMatrix::from_diagonal(&DVector::from_iterator(d, w.iter().map(|x| c(x / total))));
            let a = DensityOperator::new(a, TOL).unwrap();
            let em: Vec<bool> = (0..d).map(|i| i == 0 || rng.random_bool(0.5)).collect();
            let fm: Vec<bool> = (0..d).map(|_| rng.random_bool(0.5)).collect();
            let (e, f) = (
                ProjectionOperator::diagonal(&em),
                ProjectionOperator::diagonal(&fm),
            );
            let num: f64 = (0..d)
                .filter(|&i| em[i] && fm[i])
                .map(|i| w[i] / total)
                .sum();
            let den: f64 = (0..d).filter(|&i| em[i]).map(|i| w[i] / total).sum();
            assert!(
                (trace_cond_prob(&a, &e, &f, TOL).unwrap() - num / den).abs() < EXACT_TOLERANCE
            );
        }
    }

    #[test]
    fn cloning_implies_cloneable_pairs() {
        // Random permutation unitaries on C^2 ⊗ C^2 with basis-vector inputs
        // and random superpositions.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let basis: Vec<PureVector> = (0..2)
            .map(|i| {
                PureVector::from_real(&[(i == 0) as u8 as f64, (i == 1) as u8 as f64]).unwrap()
            })
            .collect();
        for _ in 0..200 {
            let mut perm = [0usize, 1, 2, 3];
            for i in (1..4).rev() {
                perm.swap(i, rng.random_range(0..=i));
            }
            let u = UnitaryOperator::permutation(&perm).unwrap();
            let c = [
                basis[rng.random_range(0..2)].clone(),
                random_vector(&mut rng, 2),
            ];
            let f = basis[0].clone();
            if test_unitary_cloner(&u, &c, &f, TOL).unwrap() {
                assert!(no_cloning_witness(&c[0], &c[1], TOL).unwrap().cloneable);
            }
        }
    }
}
