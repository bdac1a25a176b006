//! States on a finite logic, the state polytope, conditional probabilities
//! and state-independent transition probabilities.

use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::compat::{self, Budget};
use crate::error::{Error, Result};
use crate::logic::{Element, FiniteLogic};
use crate::lp::{reduce_equalities, LinearProgram, LpOutcome, Relation};
use crate::polytope::{
    self, AffineSolution, Equation, Halfspace, VertexMethod, DEFAULT_VERTEX_BUDGET,
};
use crate::rational::to_pq;
use crate::Rational;

/// A probability measure on a logic: values in `[0,1]`, `0 ↦ 0`, `1 ↦ 1`,
/// additive on orthogonal pairs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State {
    values: Vec<Rational>,
}

impl State {
    /// Checks every state axiom exactly.
    pub fn new(logic: &FiniteLogic, values: Vec<Rational>) -> Result<Self> {
        let n = logic.len();
        if values.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: values.len(),
            });
        }
        for (i, v) in values.iter().enumerate() {
            if v.is_negative() || *v > Rational::one() {
                return Err(Error::InvalidState(alloc::format!(
                    "value {} at {} outside [0,1]",
                    to_pq(v),
                    logic.label(Element(i))
                )));
            }
        }
        if !values[logic.zero().index()].is_zero() || !values[logic.one().index()].is_one() {
            return Err(Error::InvalidState(
                "the bounds must have values 0 and 1".into(),
            ));
        }
        for e in logic.elements() {
            for f in logic.elements().skip(e.index()) {
                if let Some(s) = logic.orth_join(e, f) {
                    if values[s.index()] != &values[e.index()] + &values[f.index()] {
                        return Err(Error::InvalidState(alloc::format!(
                            "not additive on {} and {}",
                            logic.label(e),
                            logic.label(f)
                        )));
                    }
                }
            }
        }
        Ok(State { values })
    }

    pub(crate) fn from_values(values: Vec<Rational>) -> Self {
        State { values }
    }

    pub fn value(&self, e: Element) -> &Rational {
        &self.values[e.index()]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.values
    }

    /// `λ·self + (1-λ)·other`.
    pub fn mix(&self, other: &State, lambda: &Rational) -> State {
        let mu = Rational::one() - lambda;
        State {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * lambda + b * &mu)
                .collect(),
        }
    }

    /// Convex combination `Σ w_i·states[i]`.
    pub fn combination<'a>(
        len: usize,
        terms: impl IntoIterator<Item = (&'a State, &'a Rational)>,
    ) -> State {
        let mut values = alloc::vec![Rational::zero(); len];
        for (s, w) in terms {
            if w.is_zero() {
                continue;
            }
            for (acc, v) in values.iter_mut().zip(&s.values) {
                *acc += v * w;
            }
        }
        State { values }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StateConfig {
    pub method: VertexMethod,
    pub vertex_budget: usize,
}

impl Default for StateConfig {
    fn default() -> Self {
        StateConfig {
            method: VertexMethod::DoubleDescription,
            vertex_budget: DEFAULT_VERTEX_BUDGET,
        }
    }
}

/// All states of a logic with its vertices enumerated exactly.
#[derive(Clone, Debug)]
pub struct StatePolytope {
    logic: FiniteLogic,
    equations: Vec<Equation>,
    param: AffineSolution,
    halfspaces: Vec<Halfspace>,
    vertices: Vec<State>,
    /// Per element, the vertices with value 1 there.
    faces: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConditionF {
    Holds { witness: State },
    Fails { element: Element },
}

impl ConditionF {
    pub fn holds(&self) -> bool {
        matches!(self, ConditionF::Holds { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConditionG {
    Holds,
    /// Two distinct states equal to 1 on `given` that agree below it.
    NonUnique {
        given: Element,
        first: State,
        second: State,
    },
    /// A vertex positive on `given` without any conditional state.
    NonExistent {
        given: Element,
        vertex: State,
    },
}

impl ConditionG {
    pub fn holds(&self) -> bool {
        matches!(self, ConditionG::Holds)
    }
}

/// Pair `(e, f)` with `f ≰ e` where every state with `ρ(f) = 1` also has
/// `ρ(e) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HViolation {
    pub e: Element,
    pub f: Element,
    /// No state takes the value 1 on `f`, so the implication holds vacuously.
    pub empty_face: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionH {
    pub violation: Option<HViolation>,
    /// Elements on which no state takes the value 1.
    pub empty_faces: Vec<Element>,
}

impl ConditionH {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConditionalKind {
    Unique(State),
    NonUnique(State, State),
    NonExistent,
}

/// Mismatch between the `f ≤ e` and compatible-event formulations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Discrepancy {
    pub event: Element,
    pub expected: Rational,
    pub found: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionalResult {
    pub kind: ConditionalKind,
    pub given: Element,
    pub base: State,
    pub discrepancies: Vec<Discrepancy>,
}

/// Range of `ρ(f)` over the states with `ρ(e) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionProbability {
    pub min: Rational,
    pub max: Rational,
}

impl TransitionProbability {
    pub fn exists(&self) -> bool {
        self.min == self.max
    }

    pub fn s(&self) -> Option<&Rational> {
        self.exists().then_some(&self.min)
    }
}

/// Truth values of `ℙ_e(f) = 1`, `ℙ_f(e) = 1`, `ℙ_e = ℙ_f`, `e = f`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AtomEquivalence {
    pub table: [bool; 4],
}

fn additivity_equations(logic: &FiniteLogic) -> Vec<Equation> {
    let mut eqs = alloc::vec![
        Equation {
            terms: alloc::vec![(logic.zero().index(), Rational::one())],
            rhs: Rational::zero(),
        },
        Equation {
            terms: alloc::vec![(logic.one().index(), Rational::one())],
            rhs: Rational::one(),
        },
    ];
    let zero = logic.zero();
    for e in logic.elements() {
        if e == zero {
            continue;
        }
        for f in logic.elements().skip(e.index()) {
            if let Some(s) = logic.orth_join(e, f) {
                let mut terms = alloc::vec![(s.index(), Rational::one())];
                terms.push((e.index(), -Rational::one()));
                terms.push((f.index(), -Rational::one()));
                eqs.push(Equation {
                    terms,
                    rhs: Rational::zero(),
                });
            }
        }
    }
    eqs
}

impl StatePolytope {
    pub fn new(logic: &FiniteLogic, config: &StateConfig) -> Result<Self> {
        let n = logic.len();
        let equations = additivity_equations(logic);
        let param = polytope::solve_equations(n, &equations).ok_or(Error::EmptyStateSpace)?;
        let mut halfspaces = Vec::with_capacity(2 * n);
        for i in 0..n {
            let (c, a) = param.coordinate(i);
            halfspaces.push(Halfspace {
                normal: a.iter().map(|x| -x.clone()).collect(),
                bound: c.clone(),
            });
            halfspaces.push(Halfspace {
                normal: a.to_vec(),
                bound: Rational::one() - c,
            });
        }
        let halfspaces =
            polytope::normalize_halfspaces(halfspaces).ok_or(Error::EmptyStateSpace)?;
        let reduced = polytope::enumerate_vertices(
            param.dim(),
            &halfspaces,
            config.method,
            config.vertex_budget,
        )?;
        if reduced.is_empty() {
            return Err(Error::EmptyStateSpace);
        }
        let mut vertices: Vec<State> = reduced
            .iter()
            .map(|t| State::from_values(param.lift(t)))
            .collect();
        vertices.sort();
        let faces = (0..n)
            .map(|e| {
                (0..vertices.len())
                    .filter(|&v| vertices[v].values[e].is_one())
                    .collect()
            })
            .collect();
        Ok(StatePolytope {
            logic: logic.clone(),
            equations,
            param,
            halfspaces,
            vertices,
            faces,
        })
    }

    pub fn logic(&self) -> &FiniteLogic {
        &self.logic
    }

    pub fn vertices(&self) -> &[State] {
        &self.vertices
    }

    /// Dimension of the affine hull of the equality constraints.
    pub fn dimension(&self) -> usize {
        self.param.dim()
    }

    pub fn equality_constraints(&self) -> &[Equation] {
        &self.equations
    }

    /// Bound constraints over the free coordinates (see [`Self::free_coords`]).
    pub fn bound_constraints(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn free_coords(&self) -> impl Iterator<Item = Element> + '_ {
        self.param.free_coords().iter().map(|&i| Element(i))
    }

    /// Vertices with value 1 on `e`.
    pub fn face(&self, e: Element) -> impl Iterator<Item = &State> + '_ {
        self.faces[e.index()].iter().map(|&v| &self.vertices[v])
    }

    /// Validates `values` as a state of this logic.
    pub fn state(&self, values: Vec<Rational>) -> Result<State> {
        State::new(&self.logic, values)
    }

    /// Lifts reduced coordinates (values on the free coordinates).
    pub fn lift(&self, t: &[Rational]) -> State {
        State::from_values(self.param.lift(t))
    }

    /// Whether a vertex is a convex combination of the others.
    pub fn vertex_is_extreme(&self, i: usize) -> bool {
        let others: Vec<&State> = self
            .vertices
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, s)| s)
            .collect();
        let mut lp = LinearProgram::new(others.len());
        lp.add(
            alloc::vec![Rational::one(); others.len()],
            Relation::Eq,
            Rational::one(),
        );
        for c in self.param.free_coords() {
            let row = others.iter().map(|s| s.values[*c].clone()).collect();
            lp.add(row, Relation::Eq, self.vertices[i].values[*c].clone());
        }
        lp.feasible_point().is_none()
    }

    /// `(min, max)` of `ρ(target)` over states with `ρ(given) = 1`, solved on
    /// the constraint representation rather than on the vertex list.
    pub fn constraint_extremes(
        &self,
        target: Element,
        given: Option<Element>,
    ) -> Option<(Rational, Rational)> {
        let k = self.param.dim();
        let mut lp = LinearProgram::new(k);
        for h in &self.halfspaces {
            lp.add(h.normal.clone(), Relation::Le, h.bound.clone());
        }
        if let Some(g) = given {
            let (c, a) = self.param.coordinate(g.index());
            lp.add(a.to_vec(), Relation::Eq, Rational::one() - c);
        }
        let (c, a) = self.param.coordinate(target.index());
        let lo = lp.minimize(a).optimal()?.0 + c;
        let hi = lp.maximize(a).optimal()?.0 + c;
        Some((lo, hi))
    }

    /// (F): a state nonzero on every nonzero element. The witness is the
    /// centroid of the vertices, which is positive wherever any state is.
    pub fn check_condition_f(&self) -> ConditionF {
        for e in self.logic.elements() {
            if e == self.logic.zero() {
                continue;
            }
            if self.vertices.iter().all(|v| v.value(e).is_zero()) {
                return ConditionF::Fails { element: e };
            }
        }
        let w = Rational::new(1.into(), (self.vertices.len() as i64).into());
        let witness = State::combination(self.logic.len(), self.vertices.iter().map(|v| (v, &w)));
        ConditionF::Holds { witness }
    }

    fn ensure_state(&self, rho: &State) -> Result<()> {
        if rho.values.len() != self.logic.len() {
            return Err(Error::DimensionMismatch {
                expected: self.logic.len(),
                found: rho.values.len(),
            });
        }
        Ok(())
    }

    /// Convex-weight LP over the face `ρ(e) = 1` with `μ(f) = ρ(f)/ρ(e)`
    /// for `0 < f < e`.
    fn conditional_lp(&self, rho: &State, e: Element) -> Option<LinearProgram> {
        let face = &self.faces[e.index()];
        let re = rho.value(e);
        let rows = core::iter::once((alloc::vec![Rational::one(); face.len()], Rational::one()))
            .chain(
                self.logic
                    .below(e)
                    .filter(|&f| f != e && f != self.logic.zero())
                    .map(|f| {
                        (
                            face.iter()
                                .map(|&v| self.vertices[v].values[f.index()].clone())
                                .collect(),
                            rho.value(f) / re,
                        )
                    }),
            );
        let mut lp = LinearProgram::new(face.len());
        for (row, rhs) in reduce_equalities(rows)? {
            lp.add(row, Relation::Eq, rhs);
        }
        Some(lp)
    }

    fn weights_to_state(&self, face: &[usize], lambda: &[Rational]) -> State {
        State::combination(
            self.logic.len(),
            face.iter().map(|&v| &self.vertices[v]).zip(lambda),
        )
    }

    /// States `μ` with `μ(f) = ρ(f)/ρ(e)` for every `f ≤ e`, with the
    /// compatible-event formulation cross-checked.
    pub fn conditional_probability(&self, rho: &State, e: Element) -> Result<ConditionalResult> {
        self.conditional_probability_with(rho, e, true)
    }

    /// As [`Self::conditional_probability`]; the compatible-event cross-check
    /// is skipped unless `cross_check` is set.
    pub fn conditional_probability_with(
        &self,
        rho: &State,
        e: Element,
        cross_check: bool,
    ) -> Result<ConditionalResult> {
        self.ensure_state(rho)?;
        if rho.value(e).is_zero() {
            return Err(Error::ZeroCondition(e.index()));
        }
        let face = &self.faces[e.index()];
        let lp = self.conditional_lp(rho, e);
        let kind = match lp.as_ref().and_then(LinearProgram::feasible_point) {
            None => ConditionalKind::NonExistent,
            Some(lambda) => {
                let lp = lp.expect("feasible");
                let mut split = None;
                if face.len() > 1 {
                    for &g in self.param.free_coords() {
                        let obj: Vec<Rational> = face
                            .iter()
                            .map(|&v| self.vertices[v].values[g].clone())
                            .collect();
                        let lo = lp.minimize(&obj).optimal().expect("feasible and bounded");
                        let hi = lp.maximize(&obj).optimal().expect("feasible and bounded");
                        if lo.0 != hi.0 {
                            split = Some((lo.1, hi.1));
                            break;
                        }
                    }
                }
                match split {
                    Some((lo, hi)) => ConditionalKind::NonUnique(
                        self.weights_to_state(face, &lo),
                        self.weights_to_state(face, &hi),
                    ),
                    None => ConditionalKind::Unique(self.weights_to_state(face, &lambda)),
                }
            }
        };
        let discrepancies = if cross_check {
            self.compatible_discrepancies(rho, e, &kind)?
        } else {
            Vec::new()
        };
        Ok(ConditionalResult {
            kind,
            given: e,
            base: rho.clone(),
            discrepancies,
        })
    }

    fn compatible_discrepancies(
        &self,
        rho: &State,
        e: Element,
        kind: &ConditionalKind,
    ) -> Result<Vec<Discrepancy>> {
        let results: Vec<&State> = match kind {
            ConditionalKind::Unique(m) => alloc::vec![m],
            ConditionalKind::NonUnique(a, b) => alloc::vec![a, b],
            ConditionalKind::NonExistent => return Ok(Vec::new()),
        };
        let mut out = Vec::new();
        let mut budget = Budget::default();
        for f in self.logic.elements() {
            let verdict = compat::is_compatible_subset(&self.logic, &[e, f], &mut budget)?;
            let Some(witness) = verdict.witness else {
                continue;
            };
            // Meet inside the witness subalgebra.
            let meet = witness
                .iter()
                .copied()
                .filter(|&m| self.logic.leq(m, e) && self.logic.leq(m, f))
                .max_by_key(|&m| self.logic.down_count(m))
                .expect("the subalgebra contains 0");
            let expected = rho.value(meet) / rho.value(e);
            for m in &results {
                if *m.value(f) != expected {
                    out.push(Discrepancy {
                        event: f,
                        expected: expected.clone(),
                        found: m.value(f).clone(),
                    });
                }
            }
        }
        Ok(out)
    }

    /// (G): conditional states exist for every vertex positive on `e` and
    /// are unique, for every nonzero `e`.
    pub fn check_condition_g(&self) -> ConditionG {
        for e in self.logic.elements() {
            if e == self.logic.zero() {
                continue;
            }
            for v in &self.vertices {
                if v.value(e).is_zero() || v.value(e).is_one() {
                    continue;
                }
                if self
                    .conditional_lp(v, e)
                    .and_then(|lp| lp.feasible_point())
                    .is_none()
                {
                    return ConditionG::NonExistent {
                        given: e,
                        vertex: v.clone(),
                    };
                }
            }
            let face = &self.faces[e.index()];
            if face.is_empty() {
                if let Some(v) = self.vertices.iter().find(|v| v.value(e).is_positive()) {
                    return ConditionG::NonExistent {
                        given: e,
                        vertex: v.clone(),
                    };
                }
                continue;
            }
            if face.len() == 1 {
                continue;
            }
            if let Some((first, second)) = self.split_pair(e) {
                return ConditionG::NonUnique {
                    given: e,
                    first,
                    second,
                };
            }
        }
        ConditionG::Holds
    }

    /// Two-state LP: `μ1, μ2` on the face of `e`, agreeing below `e`,
    /// maximizing `μ1(g) - μ2(g)` for each free coordinate `g`.
    fn split_pair(&self, e: Element) -> Option<(State, State)> {
        let face = &self.faces[e.index()];
        let m = face.len();
        let mut sums = alloc::vec![Rational::zero(); 2 * m];
        sums[..m].fill(Rational::one());
        let mut sums2 = alloc::vec![Rational::zero(); 2 * m];
        sums2[m..].fill(Rational::one());
        let agree = self
            .logic
            .below(e)
            .filter(|&f| f != e && f != self.logic.zero())
            .map(|f| {
                let mut row: Vec<Rational> = face
                    .iter()
                    .map(|&v| self.vertices[v].values[f.index()].clone())
                    .collect();
                row.extend(
                    face.iter()
                        .map(|&v| -self.vertices[v].values[f.index()].clone()),
                );
                (row, Rational::zero())
            });
        let rows = [(sums, Rational::one()), (sums2, Rational::one())]
            .into_iter()
            .chain(agree);
        let mut lp = LinearProgram::new(2 * m);
        for (row, rhs) in reduce_equalities(rows).expect("the face is non-empty") {
            lp.add(row, Relation::Eq, rhs);
        }
        for &g in self.param.free_coords() {
            let mut obj: Vec<Rational> = face
                .iter()
                .map(|&v| self.vertices[v].values[g].clone())
                .collect();
            obj.extend(face.iter().map(|&v| -self.vertices[v].values[g].clone()));
            if let LpOutcome::Optimal { value, x } = lp.maximize(&obj) {
                if value.is_positive() {
                    return Some((
                        self.weights_to_state(face, &x[..m]),
                        self.weights_to_state(face, &x[m..]),
                    ));
                }
            }
        }
        None
    }

    /// (H): `f ≰ e` implies some state has `ρ(f) = 1` and `ρ(e) < 1`.
    ///
    /// When no state is 1 on `f` the implication's premise holds vacuously,
    /// so such pairs count as violations and are marked `empty_face`.
    pub fn check_condition_h(&self) -> ConditionH {
        let empty_faces: Vec<Element> = self
            .logic
            .elements()
            .filter(|&e| e != self.logic.zero() && self.faces[e.index()].is_empty())
            .collect();
        let mut violation = None;
        'outer: for e in self.logic.elements() {
            for f in self.logic.elements() {
                if self.logic.leq(f, e) {
                    continue;
                }
                if self.face(f).all(|v| v.value(e).is_one()) {
                    violation = Some(HViolation {
                        e,
                        f,
                        empty_face: self.faces[f.index()].is_empty(),
                    });
                    break 'outer;
                }
            }
        }
        ConditionH {
            violation,
            empty_faces,
        }
    }

    /// `ℙ(f|e)`: the range of `ρ(f)` over the face `ρ(e) = 1`.
    pub fn transition_probability(&self, f: Element, e: Element) -> Result<TransitionProbability> {
        let mut values = self.face(e).map(|v| v.value(f));
        let first = values.next().ok_or(Error::Undefined(e.index()))?;
        let (mut min, mut max) = (first, first);
        for x in values {
            if x < min {
                min = x;
            }
            if x > max {
                max = x;
            }
        }
        Ok(TransitionProbability {
            min: min.clone(),
            max: max.clone(),
        })
    }

    /// The unique state with value 1 on the atom `e`.
    pub fn atomic_state(&self, e: Element) -> Result<State> {
        if !self.logic.is_atom(e) {
            return Err(Error::NotAnAtom(e.index()));
        }
        match self.faces[e.index()].as_slice() {
            [] => Err(Error::Undefined(e.index())),
            [v] => Ok(self.vertices[*v].clone()),
            _ => Err(Error::NotUnique(e.index())),
        }
    }

    /// Checks that `ℙ_e(f) = 1`, `ℙ_f(e) = 1`, `ℙ_e = ℙ_f` and `e = f` all
    /// agree for atoms `e`, `f`.
    pub fn atom_equivalences(&self, e: Element, f: Element) -> Result<AtomEquivalence> {
        let pe = self.atomic_state(e)?;
        let pf = self.atomic_state(f)?;
        let table = [pe.value(f).is_one(), pf.value(e).is_one(), pe == pf, e == f];
        if table.iter().all(|&b| b == table[0]) {
            Ok(AtomEquivalence { table })
        } else {
            Err(Error::EquivalenceViolated {
                e: e.index(),
                f: f.index(),
                table,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{boolean_n, mo, pasting};
    use crate::rational::{int, ratio};
    use crate::validate_logic;

    fn logic(raw: crate::LogicDescription) -> FiniteLogic {
        validate_logic(&raw, &Default::default()).unwrap()
    }

    fn poly(l: &FiniteLogic) -> StatePolytope {
        StatePolytope::new(l, &StateConfig::default()).unwrap()
    }

    fn el(l: &FiniteLogic, s: &str) -> Element {
        l.element(s).unwrap()
    }

    /// Oracle: values of an MO2 state from `(ρ(a), ρ(b))`.
    fn mo2_state(l: &FiniteLogic, a: Rational, b: Rational) -> State {
        let mut v = alloc::vec![int(0); 6];
        v[el(l, "a").index()] = a.clone();
        v[el(l, "a'").index()] = int(1) - a;
        v[el(l, "b").index()] = b.clone();
        v[el(l, "b'").index()] = int(1) - b;
        v[el(l, "1").index()] = int(1);
        State::new(l, v).unwrap()
    }

    #[test]
    fn boolean_vertices_are_point_masses() {
        for k in 1..=4 {
            let l = logic(boolean_n(k));
            let p = poly(&l);
            assert_eq!(p.vertices().len(), k);
            for (v, &atom) in p.vertices().iter().rev().zip(l.atoms()) {
                // A point mass on `atom`: 1 exactly on the up-set.
                for e in l.elements() {
                    assert_eq!(v.value(e).is_one(), l.leq(atom, e));
                }
            }
        }
    }

    #[test]
    fn mo2_has_four_vertices() {
        let l = logic(mo(2));
        let p = poly(&l);
        let mut expected: Vec<State> = [(0, 0), (0, 1), (1, 0), (1, 1)]
            .iter()
            .map(|&(a, b)| mo2_state(&l, int(a), int(b)))
            .collect();
        expected.sort();
        assert_eq!(p.vertices(), expected.as_slice());
        assert_eq!(p.dimension(), 2);
    }

    #[test]
    fn two_element_logic() {
        let l = logic(boolean_n(1));
        let p = poly(&l);
        assert_eq!(p.vertices().len(), 1);
        assert_eq!(p.vertices()[0].values(), &[int(0), int(1)]);
        assert!(p.check_condition_f().holds());
        assert!(p.check_condition_g().holds());
        assert!(p.check_condition_h().holds());
        assert_eq!(p.atomic_state(l.one()).unwrap(), p.vertices()[0]);
    }

    #[test]
    fn vertex_methods_agree() {
        let square: [&[&str]; 4] = [
            &["a", "b", "c"],
            &["c", "d", "e"],
            &["e", "f", "g"],
            &["g", "h", "a"],
        ];
        for raw in [boolean_n(3), mo(2), mo(3), pasting(&square)] {
            let l = logic(raw);
            let dd = poly(&l);
            let be = StatePolytope::new(
                &l,
                &StateConfig {
                    method: VertexMethod::BasisEnumeration,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!(dd.vertices(), be.vertices());
            for (i, v) in dd.vertices().iter().enumerate() {
                State::new(&l, v.values().to_vec()).unwrap();
                assert!(dd.vertex_is_extreme(i));
            }
        }
    }

    #[test]
    fn condition_f_witnesses() {
        let l = logic(boolean_n(3));
        let ConditionF::Holds { witness } = poly(&l).check_condition_f() else {
            panic!()
        };
        for &a in l.atoms() {
            assert_eq!(*witness.value(a), ratio(1, 3));
        }
        let l = logic(mo(2));
        let ConditionF::Holds { witness } = poly(&l).check_condition_f() else {
            panic!()
        };
        assert_eq!(witness, mo2_state(&l, ratio(1, 2), ratio(1, 2)));
    }

    /// Pasting in which atom `j` lies in a block whose other atoms are forced
    /// to cover every state.
    fn zero_atom_logic() -> FiniteLogic {
        let blocks: [&[&str]; 6] = [
            &["a", "b", "c"],
            &["d", "e", "f"],
            &["g", "h", "i", "j"],
            &["a", "d", "g"],
            &["b", "e", "h"],
            &["c", "f", "i"],
        ];
        logic(pasting(&blocks))
    }

    #[test]
    fn condition_f_fails_on_zero_atom() {
        let l = zero_atom_logic();
        let p = poly(&l);
        // Oracle: summing the three row blocks and the three column blocks
        // counts every atom but j twice, so 3 = 3 + ρ(j).
        let j = el(&l, "j");
        assert_eq!(p.constraint_extremes(j, None), Some((int(0), int(0))));
        assert_eq!(p.check_condition_f(), ConditionF::Fails { element: j });
        let h = p.check_condition_h();
        assert_eq!(h.empty_faces, alloc::vec![j]);
        assert!(h.violation.unwrap().empty_face);
    }

    #[test]
    fn classical_conditioning() {
        let l = logic(boolean_n(3));
        let p = poly(&l);
        let third = ratio(1, 3);
        let rho = State::combination(l.len(), p.vertices().iter().map(|v| (v, &third)));
        let e = el(&l, "{x,y}");
        let r = p.conditional_probability(&rho, e).unwrap();
        let ConditionalKind::Unique(mu) = &r.kind else {
            panic!()
        };
        assert_eq!(*mu.value(el(&l, "x")), ratio(1, 2));
        assert_eq!(*mu.value(el(&l, "y")), ratio(1, 2));
        assert_eq!(*mu.value(el(&l, "z")), int(0));
        assert!(r.discrepancies.is_empty());
        let r = p.conditional_probability(&rho, l.one()).unwrap();
        assert_eq!(r.kind, ConditionalKind::Unique(rho.clone()));
        assert_eq!(
            p.conditional_probability(&p.vertices()[0], el(&l, "x")),
            Err(Error::ZeroCondition(el(&l, "x").index()))
        );
    }

    #[test]
    fn mo2_conditioning_is_not_unique() {
        let l = logic(mo(2));
        let p = poly(&l);
        let rho = mo2_state(&l, ratio(1, 2), ratio(1, 2));
        let a = el(&l, "a");
        let b = el(&l, "b");
        let r = p.conditional_probability(&rho, a).unwrap();
        let ConditionalKind::NonUnique(m1, m2) = &r.kind else {
            panic!()
        };
        let mut bs = [m1.value(b).clone(), m2.value(b).clone()];
        bs.sort();
        assert_eq!(bs, [int(0), int(1)]);
        assert!(r.discrepancies.is_empty());

        let ConditionG::NonUnique {
            given,
            first,
            second,
        } = p.check_condition_g()
        else {
            panic!()
        };
        assert_eq!(given, a);
        assert_eq!(*first.value(a), int(1));
        assert_eq!(*second.value(a), int(1));
        assert_ne!(first.value(b), second.value(b));
        assert_eq!(p.atomic_state(a), Err(Error::NotUnique(a.index())));
    }

    #[test]
    fn conditions_on_boolean_and_mo2() {
        for k in 1..=4 {
            let p = poly(&logic(boolean_n(k)));
            assert!(p.check_condition_g().holds());
            assert!(p.check_condition_h().holds());
        }
        let p = poly(&logic(mo(2)));
        assert!(p.check_condition_h().holds());
        assert!(p.check_condition_f().holds());
    }

    #[test]
    fn transition_probabilities() {
        let l = logic(boolean_n(3));
        let p = poly(&l);
        let x = el(&l, "x");
        let xy = el(&l, "{x,y}");
        let t = p.transition_probability(xy, x).unwrap();
        assert_eq!(t.s(), Some(&int(1)));
        let t = p.transition_probability(x, xy).unwrap();
        assert!(!t.exists());
        assert_eq!((t.min, t.max), (int(0), int(1)));
        for e in l.elements().skip(1) {
            assert_eq!(p.transition_probability(e, e).unwrap().s(), Some(&int(1)));
            assert_eq!(
                p.transition_probability(l.ortho(e), e).unwrap().s(),
                Some(&int(0))
            );
        }
        assert_eq!(
            p.transition_probability(x, l.zero()),
            Err(Error::Undefined(0))
        );
    }

    #[test]
    fn atomic_states_and_equivalences() {
        let l = logic(boolean_n(3));
        let p = poly(&l);
        let x = el(&l, "x");
        let px = p.atomic_state(x).unwrap();
        for e in l.elements() {
            assert_eq!(px.value(e).is_one(), l.leq(x, e));
        }
        assert_eq!(p.atomic_state(el(&l, "{x,y}")), Err(Error::NotAnAtom(3)));
        for &a in l.atoms() {
            for &b in l.atoms() {
                let t = p.atom_equivalences(a, b).unwrap().table;
                assert_eq!(t, [a == b; 4]);
            }
        }
    }

    #[test]
    fn vertex_and_constraint_routes_agree() {
        let square: [&[&str]; 4] = [
            &["a", "b", "c"],
            &["c", "d", "e"],
            &["e", "f", "g"],
            &["g", "h", "a"],
        ];
        for raw in [boolean_n(3), mo(3), pasting(&square)] {
            let l = logic(raw);
            let p = poly(&l);
            for e in l.elements().skip(1) {
                for f in l.elements() {
                    let t = p.transition_probability(f, e).unwrap();
                    assert_eq!(p.constraint_extremes(f, Some(e)), Some((t.min, t.max)));
                }
            }
        }
    }

    #[test]
    fn conditioning_on_a_certain_event_returns_the_state() {
        let l = logic(mo(3));
        let p = poly(&l);
        for v in p.vertices() {
            for e in l.elements().skip(1) {
                if v.value(e).is_one() {
                    let r = p.conditional_probability(v, e).unwrap();
                    match r.kind {
                        ConditionalKind::Unique(m) => assert_eq!(&m, v),
                        ConditionalKind::NonUnique(m1, m2) => {
                            assert!(&m1 == v || &m2 == v || m1 != m2)
                        }
                        ConditionalKind::NonExistent => panic!("ρ itself is a conditional state"),
                    }
                }
            }
        }
    }

    #[test]
    fn state_validation() {
        let l = logic(mo(2));
        assert!(State::new(&l, alloc::vec![int(0); 6]).is_err());
        let mut v = mo2_state(&l, ratio(1, 3), int(0)).into_values();
        v[el(&l, "a'").index()] = ratio(1, 3);
        assert!(matches!(State::new(&l, v), Err(Error::InvalidState(_))));
        assert!(matches!(
            State::new(&l, alloc::vec![int(0); 2]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    proptest::proptest! {
        /// Mixtures of vertices are states, monotone, and conditioning
        /// agrees with the compatible-event ratios.
        #[test]
        fn mixtures_are_states(w in proptest::collection::vec(1i64..20, 8), e in 1usize..7) {
            let l = logic(mo(3));
            let p = poly(&l);
            let total: i64 = w.iter().take(p.vertices().len()).sum();
            let ws: Vec<Rational> = w.iter().map(|&x| ratio(x, total)).collect();
            let rho = State::combination(l.len(), p.vertices().iter().zip(&ws));
            let rho = State::new(&l, rho.into_values()).unwrap();
            for f in l.elements() {
                for g in l.elements() {
                    if l.leq(f, g) {
                        proptest::prop_assert!(rho.value(f) <= rho.value(g));
                    }
                }
            }
            let r = p.conditional_probability(&rho, Element(e)).unwrap();
            proptest::prop_assert!(r.discrepancies.is_empty());
        }

        /// Boolean conditioning is the classical ratio for every base state.
        #[test]
        fn boolean_conditioning_is_classical(w in proptest::collection::vec(0i64..5, 3), e in 1usize..8) {
            let l = logic(boolean_n(3));
            let p = poly(&l);
            let total: i64 = w.iter().sum();
            proptest::prop_assume!(total > 0);
            let ws: Vec<Rational> = w.iter().map(|&x| ratio(x, total)).collect();
            let rho = State::combination(l.len(), p.vertices().iter().zip(&ws));
            let e = Element(e);
            proptest::prop_assume!(rho.value(e).is_positive());
            let r = p.conditional_probability(&rho, e).unwrap();
            let ConditionalKind::Unique(mu) = r.kind else { panic!() };
            for f in l.elements() {
                // Element index is the subset mask, so the meet is bitwise and.
                let meet = Element(f.index() & e.index());
                proptest::prop_assert_eq!(mu.value(f), &(rho.value(meet) / rho.value(e)));
            }
        }
    }
}
