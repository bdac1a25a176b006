//! Finite orthomodular posets: validation and order queries.
//!
//! A [`FiniteLogic`] is built from a [`LogicDescription`] by taking the
//! reflexive-transitive closure of the generating pairs and checking the
//! orthomodular poset axioms exhaustively. Nothing here assumes a lattice:
//! suprema and infima are searched for and may be missing.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Axiom, Error, Result};

pub const DEFAULT_MAX_ELEMENTS: usize = 256;

const NO_JOIN: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ValidateConfig {
    pub max_elements: usize,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        ValidateConfig {
            max_elements: DEFAULT_MAX_ELEMENTS,
        }
    }
}

/// An event of a specific logic, identified by its canonical index.
///
/// Operations taking an `Element` panic if the index is out of range for the
/// logic they are called on, the same way slice indexing does.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element(pub usize);

impl Element {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Unvalidated logic input: labels, generating order pairs `(i, j)` meaning
/// `i ≤ j`, the orthocomplement as an index map, and the bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicDescription {
    pub labels: Vec<String>,
    pub le_pairs: Vec<(usize, usize)>,
    pub ortho: Vec<usize>,
    pub zero: usize,
    pub one: usize,
}

/// A validated finite orthomodular poset.
///
/// Elements are indexed canonically: `0` at index 0, `1` at index `n - 1`,
/// every other element in its input order.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteLogic {
    labels: Vec<String>,
    up: Vec<FixedBitSet>,
    down: Vec<FixedBitSet>,
    up_count: Vec<usize>,
    down_count: Vec<usize>,
    ortho: Vec<usize>,
    orth_join: Vec<u32>,
    atoms: Vec<Element>,
}

impl fmt::Debug for FiniteLogic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteLogic")
            .field("n", &self.len())
            .field("labels", &self.labels)
            .finish()
    }
}

/// Raw order data over the description's own indices.
struct Order {
    up: Vec<FixedBitSet>,
    down: Vec<FixedBitSet>,
    up_count: Vec<usize>,
    down_count: Vec<usize>,
}

impl Order {
    fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }

    fn sup(&self, a: usize, b: usize) -> Option<usize> {
        let mut bounds = self.up[a].clone();
        bounds.intersect_with(&self.up[b]);
        extreme(&bounds, &self.up, &self.up_count)
    }

    fn inf(&self, a: usize, b: usize) -> Option<usize> {
        let mut bounds = self.down[a].clone();
        bounds.intersect_with(&self.down[b]);
        extreme(&bounds, &self.down, &self.down_count)
    }
}

/// Least element of `set` with respect to the relation given by `rel`
/// (`rel[u]` is everything on the far side of `u`), if unique.
fn extreme(set: &FixedBitSet, rel: &[FixedBitSet], count: &[usize]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for u in set.ones() {
        if best.is_none_or(|b| count[u] > count[b]) {
            best = Some(u);
        }
    }
    let u = best?;
    if set.is_subset(&rel[u]) {
        Some(u)
    } else {
        None
    }
}

fn check_shape(raw: &LogicDescription, config: &ValidateConfig) -> Result<()> {
    let n = raw.labels.len();
    if n > config.max_elements {
        return Err(Error::TooLarge {
            size: n,
            limit: config.max_elements,
        });
    }
    if n < 2 {
        return Err(Error::Malformed("a logic needs distinct 0 and 1".into()));
    }
    let mut seen = BTreeSet::new();
    for l in &raw.labels {
        if l.is_empty() {
            return Err(Error::Malformed("empty label".into()));
        }
        if !seen.insert(l.as_str()) {
            return Err(Error::Malformed(format!("duplicate label {l:?}")));
        }
    }
    if raw.ortho.len() != n {
        return Err(Error::Malformed(format!(
            "ortho has {} entries for {n} labels",
            raw.ortho.len()
        )));
    }
    let in_range = |i: usize| i < n;
    if !raw.ortho.iter().copied().all(in_range)
        || !raw
            .le_pairs
            .iter()
            .all(|&(i, j)| in_range(i) && in_range(j))
        || !in_range(raw.zero)
        || !in_range(raw.one)
    {
        return Err(Error::Malformed("index out of range".into()));
    }
    if raw.zero == raw.one {
        return Err(Error::Malformed("0 and 1 coincide".into()));
    }
    Ok(())
}

fn closure(n: usize, pairs: &[(usize, usize)]) -> Vec<FixedBitSet> {
    let mut up: Vec<FixedBitSet> = (0..n)
        .map(|i| {
            let mut s = FixedBitSet::with_capacity(n);
            s.insert(i);
            s
        })
        .collect();
    for &(i, j) in pairs {
        up[i].insert(j);
    }
    // Warshall on bit rows.
    for k in 0..n {
        let row_k = up[k].clone();
        for row in up.iter_mut() {
            if row.contains(k) {
                row.union_with(&row_k);
            }
        }
    }
    up
}

fn transpose(rows: &[FixedBitSet]) -> Vec<FixedBitSet> {
    let n = rows.len();
    let mut out = vec_of_sets(n);
    for (i, row) in rows.iter().enumerate() {
        for j in row.ones() {
            out[j].insert(i);
        }
    }
    out
}

fn vec_of_sets(n: usize) -> Vec<FixedBitSet> {
    (0..n).map(|_| FixedBitSet::with_capacity(n)).collect()
}

/// Validates a description against the orthomodular poset axioms.
///
/// Witness indices in errors refer to the description's own indexing.
pub fn validate_logic(raw: &LogicDescription, config: &ValidateConfig) -> Result<FiniteLogic> {
    check_shape(raw, config)?;
    let n = raw.labels.len();
    let up = closure(n, &raw.le_pairs);
    for a in 0..n {
        for b in up[a].ones() {
            if b != a && up[b].contains(a) {
                return Err(Error::NotAPartialOrder { a, b });
            }
        }
    }
    let down = transpose(&up);
    let order = Order {
        up_count: up.iter().map(|s| s.count_ones(..)).collect(),
        down_count: down.iter().map(|s| s.count_ones(..)).collect(),
        up,
        down,
    };
    let (zero, one) = (raw.zero, raw.one);
    if order.up_count[zero] != n || order.down_count[one] != n {
        return Err(Error::NoBounds);
    }
    let ortho = &raw.ortho;
    for e in 0..n {
        if ortho[ortho[e]] != e {
            return Err(Error::OrthoNotInvolutive(e));
        }
    }
    if ortho[zero] != one {
        return Err(Error::AxiomViolation {
            axiom: Axiom::D,
            e: zero,
            f: ortho[zero],
        });
    }

    // (A)
    for e in 0..n {
        for f in order.up[e].ones() {
            if !order.leq(ortho[f], ortho[e]) {
                return Err(Error::AxiomViolation {
                    axiom: Axiom::A,
                    e,
                    f,
                });
            }
        }
    }
    // (C): every orthogonal pair has a supremum; remembered for later.
    let mut orth_join = alloc::vec![NO_JOIN; n * n];
    for e in 0..n {
        for f in order.down[ortho[e]].ones() {
            match order.sup(e, f) {
                Some(s) => orth_join[e * n + f] = s as u32,
                None => {
                    return Err(Error::AxiomViolation {
                        axiom: Axiom::C,
                        e,
                        f,
                    })
                }
            }
        }
    }
    // (D)
    for e in 0..n {
        if orth_join[e * n + ortho[e]] as usize != one {
            return Err(Error::AxiomViolation {
                axiom: Axiom::D,
                e,
                f: ortho[e],
            });
        }
    }
    // (E), scanning e outer and f ≤ e inner.
    for e in 0..n {
        for f in order.down[e].ones() {
            let ok = match order.inf(e, ortho[f]) {
                Some(m) => orth_join[f * n + m] as usize == e,
                None => false,
            };
            if !ok {
                return Err(Error::AxiomViolation {
                    axiom: Axiom::E,
                    e,
                    f,
                });
            }
        }
    }

    Ok(reindex(raw, order, orth_join))
}

/// Moves 0 to the front and 1 to the back, keeping everything else in order.
fn reindex(raw: &LogicDescription, order: Order, orth_join: Vec<u32>) -> FiniteLogic {
    let n = raw.labels.len();
    let mut old_of_new = Vec::with_capacity(n);
    old_of_new.push(raw.zero);
    old_of_new.extend((0..n).filter(|&i| i != raw.zero && i != raw.one));
    old_of_new.push(raw.one);
    let mut new_of_old = alloc::vec![0; n];
    for (new, &old) in old_of_new.iter().enumerate() {
        new_of_old[old] = new;
    }
    let map_set = |s: &FixedBitSet| {
        let mut out = FixedBitSet::with_capacity(n);
        for i in s.ones() {
            out.insert(new_of_old[i]);
        }
        out
    };
    let up: Vec<FixedBitSet> = old_of_new.iter().map(|&o| map_set(&order.up[o])).collect();
    let down: Vec<FixedBitSet> = old_of_new
        .iter()
        .map(|&o| map_set(&order.down[o]))
        .collect();
    let mut joins = alloc::vec![NO_JOIN; n * n];
    for a in 0..n {
        for b in 0..n {
            let j = orth_join[old_of_new[a] * n + old_of_new[b]];
            if j != NO_JOIN {
                joins[a * n + b] = new_of_old[j as usize] as u32;
            }
        }
    }
    let mut logic = FiniteLogic {
        labels: old_of_new.iter().map(|&o| raw.labels[o].clone()).collect(),
        up_count: up.iter().map(|s| s.count_ones(..)).collect(),
        down_count: down.iter().map(|s| s.count_ones(..)).collect(),
        up,
        down,
        ortho: old_of_new
            .iter()
            .map(|&o| new_of_old[raw.ortho[o]])
            .collect(),
        orth_join: joins,
        atoms: Vec::new(),
    };
    logic.atoms = (1..n)
        .filter(|&e| logic.down_count[e] == 2)
        .map(Element)
        .collect();
    logic
}

impl FiniteLogic {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// Always false: a valid logic has at least `0` and `1`.
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn zero(&self) -> Element {
        Element(0)
    }

    pub fn one(&self) -> Element {
        Element(self.len() - 1)
    }

    pub fn elements(&self) -> impl DoubleEndedIterator<Item = Element> + ExactSizeIterator {
        (0..self.len()).map(Element)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, e: Element) -> &str {
        &self.labels[e.0]
    }

    pub fn element(&self, label: &str) -> Option<Element> {
        self.labels.iter().position(|l| l == label).map(Element)
    }

    #[inline]
    pub fn leq(&self, e: Element, f: Element) -> bool {
        self.up[e.0].contains(f.0)
    }

    #[inline]
    pub fn ortho(&self, e: Element) -> Element {
        Element(self.ortho[e.0])
    }

    /// `e ⊥ f`, i.e. `e ≤ f'`.
    #[inline]
    pub fn orthogonal(&self, e: Element, f: Element) -> bool {
        self.leq(e, self.ortho(f))
    }

    /// Elements above `e` (including `e`), as a bit set over indices.
    pub fn up_set(&self, e: Element) -> &FixedBitSet {
        &self.up[e.0]
    }

    /// Elements below `e` (including `e`).
    pub fn down_set(&self, e: Element) -> &FixedBitSet {
        &self.down[e.0]
    }

    pub fn below(&self, e: Element) -> impl Iterator<Item = Element> + '_ {
        self.down[e.0].ones().map(Element)
    }

    /// Supremum of an orthogonal pair; `None` if the pair is not orthogonal.
    #[inline]
    pub fn orth_join(&self, e: Element, f: Element) -> Option<Element> {
        let j = self.orth_join[e.0 * self.len() + f.0];
        (j != NO_JOIN).then_some(Element(j as usize))
    }

    pub fn try_sup(&self, e: Element, f: Element) -> Option<Element> {
        if let Some(j) = self.orth_join(e, f) {
            return Some(j);
        }
        let mut bounds = self.up[e.0].clone();
        bounds.intersect_with(&self.up[f.0]);
        extreme(&bounds, &self.up, &self.up_count).map(Element)
    }

    pub fn try_inf(&self, e: Element, f: Element) -> Option<Element> {
        let mut bounds = self.down[e.0].clone();
        bounds.intersect_with(&self.down[f.0]);
        extreme(&bounds, &self.down, &self.down_count).map(Element)
    }

    pub fn sup(&self, e: Element, f: Element) -> Result<Element> {
        self.try_sup(e, f).ok_or(Error::NoSupremum(e.0, f.0))
    }

    pub fn inf(&self, e: Element, f: Element) -> Result<Element> {
        self.try_inf(e, f).ok_or(Error::NoInfimum(e.0, f.0))
    }

    pub fn atoms(&self) -> &[Element] {
        &self.atoms
    }

    pub fn is_atom(&self, e: Element) -> bool {
        e.0 != 0 && self.down_count[e.0] == 2
    }

    /// Number of elements below `e`, `e` included.
    pub fn down_count(&self, e: Element) -> usize {
        self.down_count[e.0]
    }

    /// Atoms below `e`, in index order.
    pub fn atoms_below(&self, e: Element) -> Vec<Element> {
        self.atoms
            .iter()
            .copied()
            .filter(|&a| self.leq(a, e))
            .collect()
    }

    /// `f` covers `e`: `e < f` with nothing strictly between.
    pub fn covers(&self, e: Element, f: Element) -> bool {
        if e == f || !self.leq(e, f) {
            return false;
        }
        let mut between = self.up[e.0].clone();
        between.intersect_with(&self.down[f.0]);
        between.count_ones(..) == 2
    }

    /// The covering pairs `(e, f)` with `f` covering `e`, sorted.
    pub fn hasse_pairs(&self) -> Vec<(Element, Element)> {
        let mut out = Vec::new();
        for e in self.elements() {
            for f in self.up[e.0].ones().map(Element) {
                if self.covers(e, f) {
                    out.push((e, f));
                }
            }
        }
        out
    }

    /// Canonical description: labels in canonical order, Hasse covers as
    /// generating pairs.
    pub fn to_description(&self) -> LogicDescription {
        LogicDescription {
            labels: self.labels.clone(),
            le_pairs: self
                .hasse_pairs()
                .into_iter()
                .map(|(e, f)| (e.0, f.0))
                .collect(),
            ortho: self.ortho.clone(),
            zero: 0,
            one: self.len() - 1,
        }
    }

    /// Debug rendering of a set of elements by label.
    pub fn render(&self, set: &[Element]) -> String {
        let mut s = String::from("{");
        for (i, e) in set.iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            s.push_str(self.label(*e));
        }
        s.push('}');
        s
    }
}

impl fmt::Display for FiniteLogic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atoms: Vec<String> = self
            .atoms
            .iter()
            .map(|&a| self.label(a).to_string())
            .collect();
        write!(f, "logic with {} elements, atoms {:?}", self.len(), atoms)
    }
}
