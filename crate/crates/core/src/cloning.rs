//! Cloning transformations: automorphisms of the ambient logic that copy
//! the atomic state of the first subsystem onto the second.
//!
//! For atoms `e`, `f` of the factor, the states `ρ` with `ρ∘π1 = ℙ_e` and
//! `ρ∘π2 = ℙ_f` are exactly the atomic state `ℙ_{π1e ∧ π2f}` when (I), (J)
//! and (F)(G)(H) hold. The cloning condition is therefore evaluated on
//! those finitely many atomic states; [`is_cloning_by_vertices`] checks
//! the same condition on every polytope vertex of the qualifying face
//! instead.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;
use core::ops::ControlFlow;

use num_traits::{One, Zero};

use crate::compat::{self, Budget};
use crate::composite::{Check, CompositeLogic};
use crate::error::{Error, Result};
use crate::logic::{Element, FiniteLogic};
use crate::morphisms::{for_each_automorphism, Automorphism};
use crate::rational::to_pq;
use crate::state::{ConditionF, State, StateConfig, StatePolytope};
use crate::Rational;

/// A composite with both polytopes and verified hypotheses.
#[derive(Clone, Debug)]
pub struct CloneContext {
    composite: CompositeLogic,
    factor: StatePolytope,
    ambient: StatePolytope,
}

impl CloneContext {
    /// Verifies (I), (J) and (F)(G)(H) on the ambient logic.
    pub fn new(
        mut composite: CompositeLogic,
        config: &StateConfig,
        budget: &mut Budget,
    ) -> Result<Self> {
        if composite.checked_i() == Check::Unchecked {
            composite.check_condition_i(budget)?;
        }
        if composite.checked_j() == Check::Unchecked {
            composite.check_condition_j();
        }
        if composite.checked_i() != Check::Holds || composite.checked_j() != Check::Holds {
            return Err(Error::PreconditionFailed(
                "composite must satisfy (I) and (J)".into(),
            ));
        }
        let factor = StatePolytope::new(composite.factor(), config)?;
        let ambient = StatePolytope::new(composite.ambient(), config)?;
        if let ConditionF::Fails { element } = ambient.check_condition_f() {
            return Err(Error::PreconditionFailed(format!(
                "ambient logic fails (F) at {}",
                composite.ambient().label(element)
            )));
        }
        if !ambient.check_condition_g().holds() {
            return Err(Error::PreconditionFailed("ambient logic fails (G)".into()));
        }
        if !ambient.check_condition_h().holds() {
            return Err(Error::PreconditionFailed("ambient logic fails (H)".into()));
        }
        Ok(CloneContext {
            composite,
            factor,
            ambient,
        })
    }

    pub fn composite(&self) -> &CompositeLogic {
        &self.composite
    }

    pub fn factor_states(&self) -> &StatePolytope {
        &self.factor
    }

    pub fn ambient_states(&self) -> &StatePolytope {
        &self.ambient
    }

    fn factor(&self) -> &FiniteLogic {
        self.composite.factor()
    }

    fn ambient(&self) -> &FiniteLogic {
        self.composite.ambient()
    }

    /// `π1e ∧ π2f` and its atomic state.
    fn grid_state(&self, e: Element, f: Element) -> Result<(Element, State)> {
        let g = self.composite.meet_embed(e, f)?;
        Ok((g, self.ambient.atomic_state(g)?))
    }
}

/// A set `C` of atoms to be cloned onto the blank atom `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CloneProblem {
    c: Vec<Element>,
    f: Element,
}

impl CloneProblem {
    pub fn new(ctx: &CloneContext, c: &[Element], f: Element) -> Result<Self> {
        let c: Vec<Element> = c
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if c.is_empty() {
            return Err(Error::PreconditionFailed(
                "the set of atoms to clone is empty".into(),
            ));
        }
        let factor = ctx.factor();
        for &x in c.iter().chain([&f]) {
            if x.index() >= factor.len() || !factor.is_atom(x) {
                return Err(Error::NotAnAtom(x.index()));
            }
        }
        Ok(CloneProblem { c, f })
    }

    pub fn atoms(&self) -> &[Element] {
        &self.c
    }

    pub fn blank(&self) -> Element {
        self.f
    }
}

/// The two cloning criteria for one automorphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CloningVerdict {
    /// `(T*ρ)∘π1 = ρ∘π1 = (T*ρ)∘π2` on the qualifying atomic states.
    pub definition: bool,
    /// `T⁻¹(π1e ∧ π2f) = π1e ∧ π2e` for every `e ∈ C`.
    pub grid: bool,
}

impl CloningVerdict {
    pub fn agree(&self) -> bool {
        self.definition == self.grid
    }
}

/// Precomputed atomic states for the pairs `(e, f)` and `(e, e)`.
struct PairData {
    /// `π1e ∧ π2f`.
    g: Element,
    /// `π1e ∧ π2e`.
    diagonal: Element,
    state: State,
}

impl PairData {
    fn new(ctx: &CloneContext, e: Element, f: Element) -> Result<Self> {
        let (g, state) = ctx.grid_state(e, f)?;
        let diagonal = ctx.composite.meet_embed(e, e)?;
        Ok(PairData { g, diagonal, state })
    }

    fn verdict(&self, ctx: &CloneContext, t: &Automorphism) -> CloningVerdict {
        CloningVerdict {
            definition: cloning_condition(ctx, t, &self.state),
            grid: t.apply_inverse(self.g) == self.diagonal,
        }
    }
}

/// `(T*ρ)∘π1 = ρ∘π1 = (T*ρ)∘π2`.
fn cloning_condition(ctx: &CloneContext, t: &Automorphism, rho: &State) -> bool {
    let (pi1, pi2) = (ctx.composite.pi1(), ctx.composite.pi2());
    ctx.factor().elements().all(|x| {
        let base = rho.value(pi1.apply(x));
        rho.value(t.apply(pi1.apply(x))) == base && rho.value(t.apply(pi2.apply(x))) == base
    })
}

pub fn is_cloning_transformation(
    ctx: &CloneContext,
    problem: &CloneProblem,
    t: &Automorphism,
) -> Result<CloningVerdict> {
    let mut out = CloningVerdict {
        definition: true,
        grid: true,
    };
    for &e in &problem.c {
        let v = PairData::new(ctx, e, problem.f)?.verdict(ctx, t);
        out.definition &= v.definition;
        out.grid &= v.grid;
    }
    Ok(out)
}

/// The cloning condition on every ambient vertex with `ρ(π1e) = 1` and
/// `ρ(π2f) = 1`, for each `e ∈ C`. Pullback is affine, so the face's
/// vertices decide the whole face.
pub fn is_cloning_by_vertices(
    ctx: &CloneContext,
    problem: &CloneProblem,
    t: &Automorphism,
) -> Result<bool> {
    let (pi1, pi2) = (ctx.composite.pi1(), ctx.composite.pi2());
    for &e in &problem.c {
        let pe = ctx.factor.atomic_state(e)?;
        let pf = ctx.factor.atomic_state(problem.f)?;
        let (a, b) = (pi1.apply(e), pi2.apply(problem.f));
        for v in ctx.ambient.face(a).filter(|v| v.value(b).is_one()) {
            if ctx.composite.restrict1(v) != pe || ctx.composite.restrict2(v) != pf {
                return Err(Error::CheckFailed(format!(
                    "a state with value 1 on {} and {} does not restrict to the atomic states",
                    ctx.ambient().label(a),
                    ctx.ambient().label(b)
                )));
            }
            if !cloning_condition(ctx, t, v) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Swaps `π1e ∧ π2e` with `π1e ∧ π2f` for every `e ∈ C`, fixes the other
/// atoms and extends by joins.
pub fn classical_cloner(ctx: &CloneContext, problem: &CloneProblem) -> Result<Automorphism> {
    let l = ctx.ambient();
    let all: Vec<Element> = l.elements().collect();
    if !compat::is_boolean_subalgebra(l, &all) {
        return Err(Error::NotBoolean);
    }
    let mut atom_image: Vec<Element> = (0..l.len()).map(Element).collect();
    for &e in &problem.c {
        let d = PairData::new(ctx, e, problem.f)?;
        atom_image[d.g.index()] = d.diagonal;
        atom_image[d.diagonal.index()] = d.g;
    }
    let map: Vec<usize> = l
        .elements()
        .map(|x| {
            l.atoms_below(x)
                .into_iter()
                .try_fold(l.zero(), |acc, a| l.orth_join(acc, atom_image[a.index()]))
                .map(Element::index)
        })
        .collect::<Option<_>>()
        .ok_or_else(|| {
            Error::ConstructionFailed("images of disjoint atoms are not orthogonal".into())
        })?;
    let t = Automorphism::new(l, &map).map_err(|e| Error::ConstructionFailed(format!("{e}")))?;
    let v = is_cloning_transformation(ctx, problem, &t)?;
    if !v.definition {
        return Err(Error::ConstructionFailed(
            "swap does not satisfy the cloning condition".into(),
        ));
    }
    Ok(t)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CloneReport {
    pub problem: CloneProblem,
    /// First cloner in enumeration order.
    pub cloner: Option<Automorphism>,
    pub cloners: u64,
    pub automorphisms: u64,
    /// Automorphisms on which the two criteria disagree.
    pub divergences: u64,
    /// `ℙ(e2|e1)` for `e1, e2 ∈ C` (rows `e1`); `None` if it does not exist.
    pub pairwise: Vec<Vec<Option<Rational>>>,
    pub orthogonal: bool,
    /// `cloner.is_some()` implies `orthogonal`.
    pub theorem_consistent: bool,
}

fn pairwise_table(ctx: &CloneContext, c: &[Element]) -> Result<Vec<Vec<Option<Rational>>>> {
    c.iter()
        .map(|&e1| {
            c.iter()
                .map(|&e2| Ok(ctx.factor.transition_probability(e2, e1)?.s().cloned()))
                .collect()
        })
        .collect()
}

/// Exhaustive search over all automorphisms of the ambient logic.
pub fn clone_search(
    ctx: &CloneContext,
    problem: &CloneProblem,
    budget: &mut Budget,
) -> Result<CloneReport> {
    Ok(clone_search_many(ctx, core::slice::from_ref(problem), budget)?.remove(0))
}

/// [`clone_search`] for several problems sharing one enumeration.
pub fn clone_search_many(
    ctx: &CloneContext,
    problems: &[CloneProblem],
    budget: &mut Budget,
) -> Result<Vec<CloneReport>> {
    // Distinct (e, f) pairs across all problems.
    let pairs: Vec<(Element, Element)> = problems
        .iter()
        .flat_map(|p| p.c.iter().map(move |&e| (e, p.f)))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let data: Vec<PairData> = pairs
        .iter()
        .map(|&(e, f)| PairData::new(ctx, e, f))
        .collect::<Result<_>>()?;
    let members: Vec<Vec<usize>> = problems
        .iter()
        .map(|p| {
            p.c.iter()
                .map(|&e| pairs.binary_search(&(e, p.f)).expect("collected above"))
                .collect()
        })
        .collect();
    let mut reports: Vec<CloneReport> = problems
        .iter()
        .map(|p| {
            let orthogonal =
                p.c.iter()
                    .all(|&a| p.c.iter().all(|&b| a == b || ctx.factor().orthogonal(a, b)));
            Ok(CloneReport {
                problem: p.clone(),
                cloner: None,
                cloners: 0,
                automorphisms: 0,
                divergences: 0,
                pairwise: pairwise_table(ctx, &p.c)?,
                orthogonal,
                theorem_consistent: true,
            })
        })
        .collect::<Result<_>>()?;
    let mut verdicts = alloc::vec![CloningVerdict { definition: false, grid: false }; pairs.len()];
    let total = for_each_automorphism(ctx.ambient(), budget, |t| {
        for (v, d) in verdicts.iter_mut().zip(&data) {
            *v = d.verdict(ctx, t);
        }
        for (r, idx) in reports.iter_mut().zip(&members) {
            let definition = idx.iter().all(|&i| verdicts[i].definition);
            let grid = idx.iter().all(|&i| verdicts[i].grid);
            if definition != grid {
                r.divergences += 1;
            }
            if definition {
                r.cloners += 1;
                if r.cloner.is_none() {
                    r.cloner = Some(t.clone());
                }
            }
        }
        ControlFlow::Continue(())
    })?;
    for r in &mut reports {
        r.automorphisms = total;
        r.theorem_consistent = r.cloner.is_none() || r.orthogonal;
    }
    Ok(reports)
}

/// Both evaluations of `ℙ(π1e2 ∧ π2f | π1e1 ∧ π2f)` for one pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateEntry {
    pub e1: Element,
    pub e2: Element,
    /// `ℙ(e2|e1)` in the factor.
    pub s: Rational,
    /// Through `T⁻¹` and the product identity: `ℙ(e2|e1)²`.
    pub pullback: Rational,
    /// Directly: `ℙ(e2|e1)·ℙ(f|f)`.
    pub direct: Rational,
}

/// Replays the forcing argument `s² = s` for every pair in `C`, given a
/// cloner `t`.
pub fn theorem1_certificate(
    ctx: &CloneContext,
    problem: &CloneProblem,
    t: &Automorphism,
) -> Result<Vec<CertificateEntry>> {
    let v = is_cloning_transformation(ctx, problem, t)?;
    if !v.definition {
        return Err(Error::PreconditionFailed(
            "the automorphism is not a cloning transformation".into(),
        ));
    }
    let f = problem.f;
    let mut out = Vec::new();
    for &e1 in &problem.c {
        for &e2 in &problem.c {
            let fail = |detail: alloc::string::String| Error::CertificateFailed {
                e1: e1.index(),
                e2: e2.index(),
                detail,
            };
            let s = ctx
                .factor
                .transition_probability(e2, e1)?
                .s()
                .cloned()
                .ok_or_else(|| {
                    fail("transition probability between atoms does not exist".into())
                })?;
            let g1 = ctx.composite.meet_embed(e1, f)?;
            let g2 = ctx.composite.meet_embed(e2, f)?;
            let value = |to: Element, from: Element| -> Result<Rational> {
                ctx.ambient
                    .transition_probability(to, from)?
                    .s()
                    .cloned()
                    .ok_or_else(|| {
                        fail(format!(
                            "no transition probability from {} to {}",
                            ctx.ambient().label(from),
                            ctx.ambient().label(to)
                        ))
                    })
            };
            let pullback = value(t.apply_inverse(g2), t.apply_inverse(g1))?;
            let direct = value(g2, g1)?;
            if pullback != &s * &s {
                return Err(fail(format!(
                    "pullback route gives {}, expected {}",
                    to_pq(&pullback),
                    to_pq(&(&s * &s))
                )));
            }
            if direct != s {
                return Err(fail(format!(
                    "direct route gives {}, expected {}",
                    to_pq(&direct),
                    to_pq(&s)
                )));
            }
            if pullback != direct || !(s.is_zero() || s.is_one()) {
                return Err(fail(format!("{} is not idempotent", to_pq(&s))));
            }
            out.push(CertificateEntry {
                e1,
                e2,
                s,
                pullback,
                direct,
            });
        }
    }
    Ok(out)
}
