//! Constructors for the standard small logics: Boolean algebras, the
//! Chinese lanterns `MO_n`, the hexagon `O6` and pastings of Boolean blocks.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::logic::LogicDescription;

/// Label of a subset given by `mask` over `names`: `0`, `1`, the atom name
/// for singletons, `{x,y}` otherwise.
pub fn subset_label(names: &[&str], mask: u64) -> String {
    let n = names.len();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    match mask {
        0 => "0".into(),
        m if m == full => "1".into(),
        m if m.count_ones() == 1 => names[m.trailing_zeros() as usize].to_string(),
        m => {
            let parts: Vec<&str> = (0..n)
                .filter(|&i| m >> i & 1 == 1)
                .map(|i| names[i])
                .collect();
            format!("{{{}}}", parts.join(","))
        }
    }
}

/// The powerset of `atoms`, element index = bit mask.
pub fn boolean(atoms: &[&str]) -> LogicDescription {
    let k = atoms.len();
    assert!(k < 31, "boolean algebra too large");
    let n = 1usize << k;
    let full = n - 1;
    let mut le_pairs = Vec::new();
    for m in 0..n {
        for b in 0..k {
            if m >> b & 1 == 0 {
                le_pairs.push((m, m | 1 << b));
            }
        }
    }
    LogicDescription {
        labels: (0..n).map(|m| subset_label(atoms, m as u64)).collect(),
        le_pairs,
        ortho: (0..n).map(|m| full ^ m).collect(),
        zero: 0,
        one: full,
    }
}

/// `2^k` with atoms named `x`, `y`, `z`, `w`, then `a0`, `a1`, ...
pub fn boolean_n(k: usize) -> LogicDescription {
    let names: Vec<String> = default_atom_names(k);
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    boolean(&refs)
}

fn default_atom_names(k: usize) -> Vec<String> {
    const BASE: [&str; 4] = ["x", "y", "z", "w"];
    if k == 1 {
        return alloc::vec!["1".into()];
    }
    (0..k)
        .map(|i| {
            if k <= 4 {
                BASE[i].into()
            } else {
                format!("a{i}")
            }
        })
        .collect()
}

/// `MO_n`: `n` orthogonal pairs `a, a'`, `b, b'`, ... pasted at 0 and 1.
pub fn mo(n: usize) -> LogicDescription {
    assert!((1..=26).contains(&n));
    let names: Vec<(String, String)> = (0..n)
        .map(|i| {
            let c = (b'a' + i as u8) as char;
            (c.to_string(), format!("{c}'"))
        })
        .collect();
    let blocks: Vec<Vec<&str>> = names
        .iter()
        .map(|(p, q)| alloc::vec![p.as_str(), q.as_str()])
        .collect();
    let refs: Vec<&[&str]> = blocks.iter().map(Vec::as_slice).collect();
    pasting(&refs)
}

/// The hexagon `0 < x < y < 1`, `0 < y' < x' < 1`: an ortholattice that is
/// not orthomodular.
pub fn o6() -> LogicDescription {
    LogicDescription {
        labels: ["0", "x", "y", "y'", "x'", "1"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        le_pairs: alloc::vec![(0, 1), (1, 2), (2, 5), (0, 3), (3, 4), (4, 5)],
        ortho: alloc::vec![5, 4, 3, 2, 1, 0],
        zero: 0,
        one: 5,
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            self.0[hi] = lo;
        }
    }
}

/// Pastes Boolean blocks (maximal sets of pairwise orthogonal atoms) along
/// shared atoms, identifying shared atoms and their complements.
///
/// The result is only an orthomodular poset when the block diagram is free
/// of short loops; [`validate_logic`](crate::validate_logic) decides that.
pub fn pasting(blocks: &[&[&str]]) -> LogicDescription {
    let mut offsets = Vec::with_capacity(blocks.len());
    let mut total = 0usize;
    for b in blocks {
        assert!(b.len() < 16, "block too large");
        offsets.push(total);
        total += 1 << b.len();
    }
    let node = |b: usize, mask: usize| offsets[b] + mask;
    let full = |b: usize| (1usize << blocks[b].len()) - 1;
    let mut uf = UnionFind((0..total).collect());
    for b in 1..blocks.len() {
        uf.union(node(0, 0), node(b, 0));
        uf.union(node(0, full(0)), node(b, full(b)));
    }
    let mut first_seen: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for (b, atoms) in blocks.iter().enumerate() {
        for (i, &a) in atoms.iter().enumerate() {
            match first_seen.get(a) {
                Some(&(b0, i0)) => {
                    uf.union(node(b0, 1 << i0), node(b, 1 << i));
                    uf.union(node(b0, full(b0) ^ 1 << i0), node(b, full(b) ^ 1 << i));
                }
                None => {
                    first_seen.insert(a, (b, i));
                }
            }
        }
    }

    // Class ordering: 0 first, 1 last, the rest by rank then first appearance.
    let mut classes: BTreeMap<usize, (u32, usize)> = BTreeMap::new();
    for b in 0..blocks.len() {
        for mask in 0..=full(b) {
            let id = node(b, mask);
            let root = uf.find(id);
            let rank = if mask == 0 {
                0
            } else if mask == full(b) {
                u32::MAX
            } else {
                mask.count_ones()
            };
            let entry = classes.entry(root).or_insert((rank, id));
            if mask != 0 && mask != full(b) {
                entry.0 = entry.0.min(rank);
            }
        }
    }
    let mut order: Vec<(u32, usize, usize)> = classes
        .iter()
        .map(|(&r, &(rank, id))| (rank, id, r))
        .collect();
    order.sort();
    let index_of: BTreeMap<usize, usize> = order
        .iter()
        .enumerate()
        .map(|(i, &(_, _, r))| (r, i))
        .collect();
    let n = order.len();

    let mut labels = alloc::vec![String::new(); n];
    let mut ortho = alloc::vec![0usize; n];
    let mut le_pairs = Vec::new();
    // Label priority: singleton, co-singleton, bound, local subset.
    let mut label_rank = alloc::vec![u8::MAX; n];
    for (b, atoms) in blocks.iter().enumerate() {
        let f = full(b);
        for mask in 0..=f {
            let i = index_of[&uf.find(node(b, mask))];
            ortho[i] = index_of[&uf.find(node(b, f ^ mask))];
            for bit in 0..atoms.len() {
                if mask >> bit & 1 == 0 {
                    le_pairs.push((i, index_of[&uf.find(node(b, mask | 1 << bit))]));
                }
            }
            let (rank, label) = if mask.count_ones() == 1 {
                (0, atoms[mask.trailing_zeros() as usize].to_string())
            } else if mask == 0 {
                (2, "0".into())
            } else if mask == f {
                (2, "1".into())
            } else if (f ^ mask).count_ones() == 1 {
                (
                    1,
                    format!("{}'", atoms[(f ^ mask).trailing_zeros() as usize]),
                )
            } else {
                let parts: Vec<&str> = (0..atoms.len())
                    .filter(|&k| mask >> k & 1 == 1)
                    .map(|k| atoms[k])
                    .collect();
                (3, format!("{{{}}}", parts.join(",")))
            };
            if rank < label_rank[i] {
                label_rank[i] = rank;
                labels[i] = label;
            }
        }
    }
    le_pairs.sort_unstable();
    le_pairs.dedup();
    LogicDescription {
        labels,
        le_pairs,
        ortho,
        zero: 0,
        one: n - 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate_logic;

    #[test]
    fn mo2_shape() {
        let raw = mo(2);
        assert_eq!(raw.labels, ["0", "a", "a'", "b", "b'", "1"]);
        let l = validate_logic(&raw, &Default::default()).unwrap();
        assert_eq!(l.atoms().len(), 4);
    }

    #[test]
    fn single_block_pasting_is_boolean() {
        let l = validate_logic(&pasting(&[&["x", "y", "z"]]), &Default::default()).unwrap();
        assert_eq!(l.len(), 8);
        assert_eq!(l.atoms().len(), 3);
    }

    #[test]
    fn boolean_labels() {
        let raw = boolean_n(3);
        assert_eq!(raw.labels[0b011], "{x,y}");
        assert_eq!(raw.labels[0b100], "z");
        assert_eq!(raw.labels[7], "1");
    }

    #[test]
    fn square_pasting_is_an_orthomodular_poset() {
        // Loop of four 3-atom blocks: an OMP that is not a lattice.
        let blocks: [&[&str]; 4] = [
            &["a", "b", "c"],
            &["c", "d", "e"],
            &["e", "f", "g"],
            &["g", "h", "a"],
        ];
        let l = validate_logic(&pasting(&blocks), &Default::default()).unwrap();
        assert_eq!(l.atoms().len(), 8);
    }
}
