//! Morphisms between logics, pulled-back states and automorphism search.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;
use core::ops::ControlFlow;

use fixedbitset::FixedBitSet;

use crate::compat::Budget;
use crate::error::{Error, LemmaDetail, Result};
use crate::logic::{Element, FiniteLogic};
use crate::state::{State, StatePolytope};
use crate::Rational;

pub const DEFAULT_AUTOMORPHISM_BUDGET: u64 = 10_000_000;

/// An order- and complement-preserving, unit-preserving map.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Morphism {
    map: Vec<Element>,
    target_len: usize,
}

impl Morphism {
    pub fn apply(&self, e: Element) -> Element {
        self.map[e.index()]
    }

    pub fn map(&self) -> &[Element] {
        &self.map
    }

    pub fn source_len(&self) -> usize {
        self.map.len()
    }

    pub fn target_len(&self) -> usize {
        self.target_len
    }

    /// First pair of elements sharing an image.
    pub fn injectivity_witness(&self) -> Option<(Element, Element)> {
        let mut seen = alloc::vec![usize::MAX; self.target_len];
        for (i, t) in self.map.iter().enumerate() {
            let slot = &mut seen[t.index()];
            if *slot != usize::MAX {
                return Some((Element(*slot), Element(i)));
            }
            *slot = i;
        }
        None
    }

    pub fn is_injective(&self) -> bool {
        self.injectivity_witness().is_none()
    }

    pub fn identity(logic: &FiniteLogic) -> Self {
        Morphism {
            map: logic.elements().collect(),
            target_len: logic.len(),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Morphism) -> Morphism {
        Morphism {
            map: other.map.iter().map(|&e| self.apply(e)).collect(),
            target_len: self.target_len,
        }
    }
}

/// Checks the morphism conditions exhaustively.
pub fn validate_morphism(
    source: &FiniteLogic,
    target: &FiniteLogic,
    map: &[usize],
) -> Result<Morphism> {
    if map.len() != source.len() {
        return Err(Error::MapLength {
            expected: source.len(),
            found: map.len(),
        });
    }
    if let Some(&bad) = map.iter().find(|&&t| t >= target.len()) {
        return Err(Error::Malformed(format!("image index {bad} out of range")));
    }
    let m = Morphism {
        map: map.iter().map(|&t| Element(t)).collect(),
        target_len: target.len(),
    };
    if m.apply(source.one()) != target.one() {
        return Err(Error::UnitNotPreserved);
    }
    for e in source.elements() {
        if m.apply(source.ortho(e)) != target.ortho(m.apply(e)) {
            return Err(Error::OrthoNotPreserved(e.index()));
        }
    }
    for e1 in source.elements() {
        for e2 in source.up_set(e1).ones().map(Element) {
            if !target.leq(m.apply(e1), m.apply(e2)) {
                return Err(Error::NotOrderPreserving(e1.index(), e2.index()));
            }
        }
    }
    Ok(m)
}

/// A bijective morphism of a logic onto itself whose inverse is also a
/// morphism.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Automorphism {
    forward: Morphism,
    inverse: Morphism,
}

impl Automorphism {
    pub fn new(logic: &FiniteLogic, map: &[usize]) -> Result<Self> {
        let forward = validate_morphism(logic, logic, map)?;
        if let Some((a, b)) = forward.injectivity_witness() {
            return Err(Error::NotInjective(a.index(), b.index()));
        }
        let mut inv = alloc::vec![0usize; logic.len()];
        for (i, t) in forward.map.iter().enumerate() {
            inv[t.index()] = i;
        }
        let inverse = validate_morphism(logic, logic, &inv).map_err(|_| Error::NotBijective)?;
        Ok(Automorphism { forward, inverse })
    }

    pub fn identity(logic: &FiniteLogic) -> Self {
        let id = Morphism::identity(logic);
        Automorphism {
            forward: id.clone(),
            inverse: id,
        }
    }

    pub fn apply(&self, e: Element) -> Element {
        self.forward.apply(e)
    }

    pub fn apply_inverse(&self, e: Element) -> Element {
        self.inverse.apply(e)
    }

    pub fn morphism(&self) -> &Morphism {
        &self.forward
    }

    pub fn inverse(&self) -> Automorphism {
        Automorphism {
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        Automorphism {
            forward: self.forward.compose(&other.forward),
            inverse: other.inverse.compose(&self.inverse),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.forward
            .map
            .iter()
            .enumerate()
            .all(|(i, e)| e.index() == i)
    }
}

/// `(T*ρ)(e) = ρ(T e)`.
///
/// # Panics
/// If the pulled-back values fail the state axioms, which a valid
/// morphism rules out.
pub fn dual_state(source: &FiniteLogic, t: &Morphism, rho: &State) -> State {
    let values = source
        .elements()
        .map(|e| rho.value(t.apply(e)).clone())
        .collect();
    State::new(source, values).expect("pullback along a morphism is a state")
}

/// Precomputed data for enumerating automorphisms through atom images.
struct AtomSearch<'l> {
    logic: &'l FiniteLogic,
    atoms: Vec<Element>,
    orth: Vec<bool>,
    up_counts: Vec<usize>,
    /// Non-atom nonzero elements by increasing height, each as an orthogonal
    /// join of an atom and a smaller element.
    plan: Vec<(Element, Element, Element)>,
    covers: Vec<(Element, Element)>,
    cover_bits: FixedBitSet,
}

impl<'l> AtomSearch<'l> {
    fn new(logic: &'l FiniteLogic) -> Self {
        let atoms = logic.atoms().to_vec();
        let k = atoms.len();
        let orth = (0..k * k)
            .map(|ij| logic.orthogonal(atoms[ij / k], atoms[ij % k]))
            .collect();
        let up_counts = atoms
            .iter()
            .map(|&a| logic.up_set(a).count_ones(..))
            .collect();
        let mut order: Vec<Element> = logic
            .elements()
            .filter(|&e| e != logic.zero() && !logic.is_atom(e))
            .collect();
        order.sort_by_key(|&e| (logic.down_count(e), e));
        let plan = order
            .into_iter()
            .map(|e| {
                let x = *atoms
                    .iter()
                    .find(|&&a| logic.leq(a, e))
                    .expect("finite logics are atomic");
                let r = logic
                    .inf(e, logic.ortho(x))
                    .expect("orthomodular decomposition exists");
                (e, x, r)
            })
            .collect();
        let covers = logic.hasse_pairs();
        let n = logic.len();
        let mut cover_bits = FixedBitSet::with_capacity(n * n);
        for &(e, f) in &covers {
            cover_bits.insert(e.index() * n + f.index());
        }
        AtomSearch {
            logic,
            atoms,
            orth,
            up_counts,
            plan,
            covers,
            cover_bits,
        }
    }

    fn consistent(&self, image: &[usize], depth: usize, candidate: usize) -> bool {
        let k = self.atoms.len();
        if self.up_counts[depth] != self.up_counts[candidate] {
            return false;
        }
        (0..depth).all(|j| self.orth[depth * k + j] == self.orth[candidate * k + image[j]])
    }

    /// Extends an atom permutation and verifies the result.
    fn extend(&self, image: &[usize]) -> Option<Automorphism> {
        let logic = self.logic;
        let n = logic.len();
        let mut map = alloc::vec![Element(usize::MAX); n];
        map[logic.zero().index()] = logic.zero();
        for (i, a) in self.atoms.iter().enumerate() {
            map[a.index()] = self.atoms[image[i]];
        }
        for &(e, x, r) in &self.plan {
            map[e.index()] = logic.orth_join(map[x.index()], map[r.index()])?;
        }
        let mut hit = FixedBitSet::with_capacity(n);
        for t in &map {
            if hit.put(t.index()) {
                return None;
            }
        }
        for e in logic.elements() {
            if map[logic.ortho(e).index()] != logic.ortho(map[e.index()]) {
                return None;
            }
        }
        for &(e, f) in &self.covers {
            if !self
                .cover_bits
                .contains(map[e.index()].index() * n + map[f.index()].index())
            {
                return None;
            }
        }
        let mut inverse = alloc::vec![Element(0); n];
        for (i, t) in map.iter().enumerate() {
            inverse[t.index()] = Element(i);
        }
        Some(Automorphism {
            forward: Morphism { map, target_len: n },
            inverse: Morphism {
                map: inverse,
                target_len: n,
            },
        })
    }
}

/// Streams every automorphism in lexicographic order of atom images.
/// Returns the number visited.
pub fn for_each_automorphism<F>(
    logic: &FiniteLogic,
    budget: &mut Budget,
    mut visit: F,
) -> Result<u64>
where
    F: FnMut(&Automorphism) -> ControlFlow<()>,
{
    let search = AtomSearch::new(logic);
    let k = search.atoms.len();
    let mut image = alloc::vec![0usize; k];
    let mut used = alloc::vec![false; k];
    let mut count = 0u64;
    // Iterative backtracking: next[d] is the next candidate to try at depth d.
    let mut next = alloc::vec![0usize; k + 1];
    let mut depth = 0usize;
    loop {
        if depth == k {
            budget.spend(1)?;
            if let Some(t) = search.extend(&image) {
                count += 1;
                if visit(&t).is_break() {
                    return Ok(count);
                }
            }
            if depth == 0 {
                return Ok(count);
            }
            depth -= 1;
            used[image[depth]] = false;
            continue;
        }
        let mut advanced = false;
        while next[depth] < k {
            let c = next[depth];
            next[depth] += 1;
            if !used[c] && search.consistent(&image, depth, c) {
                budget.spend(1)?;
                image[depth] = c;
                used[c] = true;
                depth += 1;
                next[depth] = 0;
                advanced = true;
                break;
            }
        }
        if !advanced {
            if depth == 0 {
                return Ok(count);
            }
            depth -= 1;
            used[image[depth]] = false;
        }
    }
}

/// The full automorphism group.
pub fn automorphisms(logic: &FiniteLogic, budget: &mut Budget) -> Result<Vec<Automorphism>> {
    let mut out = Vec::new();
    for_each_automorphism(logic, budget, |t| {
        out.push(t.clone());
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Transition probabilities on both sides of a morphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma1aReport {
    pub source: Rational,
    pub target: Rational,
}

/// `ℙ(T e2 | T e1) = ℙ(e2 | e1)`.
pub fn check_lemma1a(
    source: &StatePolytope,
    target: &StatePolytope,
    t: &Morphism,
    e1: Element,
    e2: Element,
) -> Result<Lemma1aReport> {
    let lhs = source.transition_probability(e2, e1)?;
    let Some(s) = lhs.s() else {
        return Err(Error::PreconditionFailed(format!(
            "transition probability from {} to {} does not exist",
            source.logic().label(e1),
            source.logic().label(e2)
        )));
    };
    let (t1, t2) = (t.apply(e1), t.apply(e2));
    if t1 == target.logic().zero() {
        return Err(Error::PreconditionFailed(
            "image of the conditioning event is 0".into(),
        ));
    }
    let violated = |found: Option<Rational>, message: &str| Error::LemmaViolated {
        lemma: "Lemma 1(a)",
        detail: Box::new(LemmaDetail {
            message: message.into(),
            expected: Some(s.clone()),
            found,
        }),
    };
    let rhs = match target.transition_probability(t2, t1) {
        Ok(r) => r,
        Err(Error::Undefined(_)) => {
            return Err(violated(
                None,
                "no state is 1 on the image of the conditioning event",
            ))
        }
        Err(e) => return Err(e),
    };
    match rhs.s() {
        Some(v) if v == s => Ok(Lemma1aReport {
            source: s.clone(),
            target: v.clone(),
        }),
        Some(v) => Err(violated(Some(v.clone()), "transition probabilities differ")),
        None => Err(violated(
            None,
            "image transition probability does not exist",
        )),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma1bReport {
    /// `T⁻¹ f`.
    pub preimage: Element,
    pub pulled_back: State,
}

/// `T* ℙ_f = ℙ_{T⁻¹ f}` for an atom `f`.
pub fn check_lemma1b(poly: &StatePolytope, t: &Automorphism, f: Element) -> Result<Lemma1bReport> {
    let logic = poly.logic();
    let violated = |message: &str| Error::LemmaViolated {
        lemma: "Lemma 1(b)",
        detail: Box::new(LemmaDetail {
            message: message.into(),
            expected: None,
            found: None,
        }),
    };
    let pf = poly.atomic_state(f)?;
    let preimage = t.apply_inverse(f);
    if !logic.is_atom(preimage) {
        return Err(violated("preimage of the atom is not an atom"));
    }
    let pulled_back = dual_state(logic, t.morphism(), &pf);
    let expected = poly.atomic_state(preimage)?;
    for e in logic.elements() {
        if pulled_back.value(e) != expected.value(e) {
            return Err(Error::LemmaViolated {
                lemma: "Lemma 1(b)",
                detail: Box::new(LemmaDetail {
                    message: format!("pulled-back atomic state differs at {}", logic.label(e)),
                    expected: Some(expected.value(e).clone()),
                    found: Some(pulled_back.value(e).clone()),
                }),
            });
        }
    }
    Ok(Lemma1bReport {
        preimage,
        pulled_back,
    })
}
