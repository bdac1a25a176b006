//! Compatibility of subsets: containment in a Boolean subalgebra.
//!
//! The search closes the members under `'`, joins of orthogonal pairs and
//! meets. Any Boolean subalgebra containing the members contains that
//! closure, and the closure is itself an ortholattice under the induced
//! order, so the members are compatible exactly when the closure exists and
//! is distributive. A meet that does not exist in the ambient poset ends the
//! search with "not compatible".

use alloc::vec::Vec;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::logic::{Element, FiniteLogic};

pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000;

/// Counts search nodes against a limit.
#[derive(Clone, Debug)]
pub struct Budget {
    limit: u64,
    used: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    pub fn spend(&mut self, n: u64) -> Result<()> {
        self.used += n;
        if self.used > self.limit {
            Err(Error::SearchBudgetExceeded(self.limit))
        } else {
            Ok(())
        }
    }

    pub fn used(&self) -> u64 {
        self.used
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_NODE_BUDGET)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatVerdict {
    pub compatible: bool,
    /// A Boolean subalgebra containing the members, sorted by index.
    pub witness: Option<Vec<Element>>,
}

/// Smallest subset containing `members`, 0 and 1 that is closed under `'`,
/// orthogonal joins and meets; `None` when some required meet is missing.
pub fn closure(
    logic: &FiniteLogic,
    members: &[Element],
    budget: &mut Budget,
) -> Result<Option<Vec<Element>>> {
    let mut present = FixedBitSet::with_capacity(logic.len());
    let mut queue: Vec<Element> = Vec::new();
    let push = |x: Element, present: &mut FixedBitSet, queue: &mut Vec<Element>| {
        if !present.put(x.0) {
            queue.push(x);
        }
    };
    for &x in [logic.zero(), logic.one()].iter().chain(members) {
        push(x, &mut present, &mut queue);
    }
    let mut i = 0;
    while i < queue.len() {
        let x = queue[i];
        push(logic.ortho(x), &mut present, &mut queue);
        budget.spend(i as u64 + 1)?;
        for j in 0..=i {
            let y = queue[j];
            if let Some(s) = logic.orth_join(x, y) {
                push(s, &mut present, &mut queue);
            }
            match logic.try_inf(x, y) {
                Some(m) => push(m, &mut present, &mut queue),
                None => return Ok(None),
            }
        }
        i += 1;
    }
    queue.sort_unstable();
    Ok(Some(queue))
}

/// Whether `set` is a Boolean subalgebra of `logic`: contains 0 and 1, is
/// closed under `'` and orthogonal joins, and is a distributive
/// ortholattice in the induced order.
pub fn is_boolean_subalgebra(logic: &FiniteLogic, set: &[Element]) -> bool {
    let mut members = FixedBitSet::with_capacity(logic.len());
    for &x in set {
        members.insert(x.0);
    }
    if !members.contains(0) || !members.contains(logic.len() - 1) {
        return false;
    }
    let elems: Vec<Element> = members.ones().map(Element).collect();
    let m = elems.len();
    let pos = |x: Element| elems.binary_search(&x).ok();
    for &x in &elems {
        if !members.contains(logic.ortho(x).0) {
            return false;
        }
        for &y in &elems {
            if let Some(s) = logic.orth_join(x, y) {
                if !members.contains(s.0) {
                    return false;
                }
            }
        }
    }
    // Induced lattice operations as position tables.
    let leq = |a: usize, b: usize| logic.leq(elems[a], elems[b]);
    let mut meet = alloc::vec![0usize; m * m];
    let mut join = alloc::vec![0usize; m * m];
    for a in 0..m {
        for b in a..m {
            let lower: Vec<usize> = (0..m).filter(|&z| leq(z, a) && leq(z, b)).collect();
            let upper: Vec<usize> = (0..m).filter(|&z| leq(a, z) && leq(b, z)).collect();
            let glb = lower
                .iter()
                .copied()
                .find(|&g| lower.iter().all(|&z| leq(z, g)));
            let lub = upper
                .iter()
                .copied()
                .find(|&g| upper.iter().all(|&z| leq(g, z)));
            match (glb, lub) {
                (Some(g), Some(l)) => {
                    meet[a * m + b] = g;
                    meet[b * m + a] = g;
                    join[a * m + b] = l;
                    join[b * m + a] = l;
                }
                _ => return false,
            }
        }
    }
    let (bottom, top) = (0, m - 1);
    for a in 0..m {
        let Some(c) = pos(logic.ortho(elems[a])) else {
            return false;
        };
        if meet[a * m + c] != bottom || join[a * m + c] != top {
            return false;
        }
    }
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                let lhs = meet[a * m + join[b * m + c]];
                let rhs = join[meet[a * m + b] * m + meet[a * m + c]];
                if lhs != rhs {
                    return false;
                }
            }
        }
    }
    true
}

pub fn is_compatible_subset(
    logic: &FiniteLogic,
    members: &[Element],
    budget: &mut Budget,
) -> Result<CompatVerdict> {
    match closure(logic, members, budget)? {
        Some(c) => {
            budget.spend((c.len() * c.len()) as u64)?;
            if is_boolean_subalgebra(logic, &c) {
                Ok(CompatVerdict {
                    compatible: true,
                    witness: Some(c),
                })
            } else {
                Ok(CompatVerdict {
                    compatible: false,
                    witness: None,
                })
            }
        }
        None => Ok(CompatVerdict {
            compatible: false,
            witness: None,
        }),
    }
}

/// Maximal compatible subsets of `set` (deduplicated, sorted input).
fn maximal_compatible(
    logic: &FiniteLogic,
    set: &[Element],
    budget: &mut Budget,
) -> Result<Vec<Vec<Element>>> {
    if is_compatible_subset(logic, set, budget)?.compatible {
        return Ok(alloc::vec![set.to_vec()]);
    }
    let k = set.len();
    if k >= 63 || (1u64 << k) > budget.limit {
        return Err(Error::SearchBudgetExceeded(budget.limit));
    }
    let mut masks: Vec<u64> = (0..(1u64 << k)).collect();
    masks.sort_by_key(|m| core::cmp::Reverse(m.count_ones()));
    let mut maximal: Vec<u64> = Vec::new();
    for m in masks {
        if maximal.iter().any(|&big| m & big == m) {
            continue;
        }
        budget.spend(1)?;
        let subset: Vec<Element> = (0..k)
            .filter(|&i| m >> i & 1 == 1)
            .map(|i| set[i])
            .collect();
        if is_compatible_subset(logic, &subset, budget)?.compatible {
            maximal.push(m);
        }
    }
    Ok(maximal
        .into_iter()
        .map(|m| {
            (0..k)
                .filter(|&i| m >> i & 1 == 1)
                .map(|i| set[i])
                .collect()
        })
        .collect())
}

fn normalized(set: &[Element]) -> Vec<Element> {
    let mut v = set.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Whether every compatible subset of `s1` united with every compatible
/// subset of `s2` is compatible. Compatibility is inherited by subsets, so
/// checking unions of maximal compatible subsets suffices.
pub fn mutually_compatible(
    logic: &FiniteLogic,
    s1: &[Element],
    s2: &[Element],
    budget: &mut Budget,
) -> Result<bool> {
    let (s1, s2) = (normalized(s1), normalized(s2));
    let left = maximal_compatible(logic, &s1, budget)?;
    let right = maximal_compatible(logic, &s2, budget)?;
    for a in &left {
        for b in &right {
            let union = normalized(&[a.as_slice(), b.as_slice()].concat());
            if !is_compatible_subset(logic, &union, budget)?.compatible {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders;
    use crate::validate_logic;

    fn logic(raw: crate::LogicDescription) -> FiniteLogic {
        validate_logic(&raw, &Default::default()).unwrap()
    }

    fn el(l: &FiniteLogic, names: &[&str]) -> Vec<Element> {
        names.iter().map(|s| l.element(s).unwrap()).collect()
    }

    /// Exhaustive oracle: some superset of `members` is a Boolean subalgebra.
    fn brute_force_compatible(l: &FiniteLogic, members: &[Element]) -> bool {
        let n = l.len();
        let need: u64 = members.iter().fold(0, |m, e| m | 1 << e.0);
        (0u64..(1 << n)).filter(|s| s & need == need).any(|s| {
            let set: Vec<Element> = (0..n).filter(|&i| s >> i & 1 == 1).map(Element).collect();
            is_boolean_subalgebra(l, &set)
        })
    }

    #[test]
    fn singleton_witness_is_four_element_algebra() {
        let mo2 = logic(builders::mo(2));
        let v = is_compatible_subset(&mo2, &el(&mo2, &["a"]), &mut Budget::default()).unwrap();
        assert!(v.compatible);
        assert_eq!(v.witness.unwrap(), el(&mo2, &["0", "a", "a'", "1"]));
    }

    #[test]
    fn mo2_cross_block_pair_is_incompatible() {
        let mo2 = logic(builders::mo(2));
        let v = is_compatible_subset(&mo2, &el(&mo2, &["a", "b"]), &mut Budget::default()).unwrap();
        assert!(!v.compatible);
        assert!(!brute_force_compatible(&mo2, &el(&mo2, &["a", "b"])));
    }

    #[test]
    fn closure_agrees_with_exhaustive_search() {
        for raw in [
            builders::mo(2),
            builders::mo(3),
            builders::boolean_n(3),
            builders::mo(1),
        ] {
            let l = logic(raw);
            let n = l.len();
            for mask in 0u64..(1 << n) {
                if mask.count_ones() > 3 {
                    continue;
                }
                let members: Vec<Element> = (0..n)
                    .filter(|&i| mask >> i & 1 == 1)
                    .map(Element)
                    .collect();
                let fast = is_compatible_subset(&l, &members, &mut Budget::default())
                    .unwrap()
                    .compatible;
                assert_eq!(fast, brute_force_compatible(&l, &members), "{members:?}");
            }
        }
    }

    #[test]
    fn pairwise_orthogonal_sets_are_compatible() {
        let blocks: [&[&str]; 4] = [
            &["a", "b", "c"],
            &["c", "d", "e"],
            &["e", "f", "g"],
            &["g", "h", "a"],
        ];
        for raw in [
            builders::mo(3),
            builders::boolean_n(4),
            builders::pasting(&blocks),
        ] {
            let l = logic(raw);
            let atoms = l.atoms().to_vec();
            for mask in 1u64..(1 << atoms.len()) {
                let set: Vec<Element> = (0..atoms.len())
                    .filter(|&i| mask >> i & 1 == 1)
                    .map(|i| atoms[i])
                    .collect();
                let orth = set
                    .iter()
                    .all(|&x| set.iter().all(|&y| x == y || l.orthogonal(x, y)));
                if orth {
                    assert!(
                        is_compatible_subset(&l, &set, &mut Budget::default())
                            .unwrap()
                            .compatible
                    );
                }
            }
        }
    }

    #[test]
    fn boolean_logic_everything_compatible() {
        let b = logic(builders::boolean_n(3));
        let all: Vec<Element> = b.elements().collect();
        let v = is_compatible_subset(&b, &all, &mut Budget::default()).unwrap();
        assert!(v.compatible);
        assert!(mutually_compatible(&b, &all[..4], &all[3..], &mut Budget::default()).unwrap());
    }

    #[test]
    fn mutual_compatibility_examples() {
        let mo2 = logic(builders::mo(2));
        let a = el(&mo2, &["a"]);
        let b = el(&mo2, &["b"]);
        assert!(!mutually_compatible(&mo2, &a, &b, &mut Budget::default()).unwrap());
        let block = el(&mo2, &["0", "a", "a'", "1"]);
        assert!(mutually_compatible(&mo2, &block, &block, &mut Budget::default()).unwrap());
        // Neither side compatible on its own, but the definition only asks
        // about compatible pieces.
        let all: Vec<Element> = mo2.elements().collect();
        assert!(!mutually_compatible(&mo2, &all, &all, &mut Budget::default()).unwrap());
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let b = logic(builders::boolean_n(4));
        let all: Vec<Element> = b.elements().collect();
        let err = is_compatible_subset(&b, &all, &mut Budget::new(10)).unwrap_err();
        assert_eq!(err, Error::SearchBudgetExceeded(10));
    }

    proptest::proptest! {
        #[test]
        fn compatibility_is_inherited_by_subsets(mask in 0u64..(1 << 8), drop in 0usize..8) {
            let l = logic(builders::mo(3));
            let members: Vec<Element> = (0..8).filter(|&i| mask >> i & 1 == 1).map(Element).collect();
            if is_compatible_subset(&l, &members, &mut Budget::default()).unwrap().compatible && !members.is_empty() {
                let mut smaller = members.clone();
                smaller.remove(drop % members.len());
                proptest::prop_assert!(is_compatible_subset(&l, &smaller, &mut Budget::default()).unwrap().compatible);
            }
        }

        #[test]
        fn mutual_compatibility_is_symmetric(m1 in 0u64..(1 << 8), m2 in 0u64..(1 << 8)) {
            let l = logic(builders::mo(3));
            let s1: Vec<Element> = (0..8).filter(|&i| m1 >> i & 1 == 1).map(Element).collect();
            let s2: Vec<Element> = (0..8).filter(|&i| m2 >> i & 1 == 1).map(Element).collect();
            let ab = mutually_compatible(&l, &s1, &s2, &mut Budget::default()).unwrap();
            let ba = mutually_compatible(&l, &s2, &s1, &mut Budget::default()).unwrap();
            proptest::prop_assert_eq!(ab, ba);
        }
    }
}
