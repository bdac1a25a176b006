//! Exact two-phase simplex over rationals with Bland's anti-cycling rule.
//!
//! All variables are non-negative. Problems here are small (a few dozen
//! rows), so a dense tableau is used.

use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
struct Row {
    coeffs: Vec<Rational>,
    rel: Relation,
    rhs: Rational,
}

/// A linear program over `x ≥ 0`.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    num_vars: usize,
    rows: Vec<Row>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, x: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<(Rational, Vec<Rational>)> {
        match self {
            LpOutcome::Optimal { value, x } => Some((value, x)),
            _ => None,
        }
    }
}

struct Tableau {
    /// `m` constraint rows followed by the objective row; last column is the rhs.
    a: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn m(&self) -> usize {
        self.basis.len()
    }

    fn rhs(&self, i: usize) -> &Rational {
        &self.a[i][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.a[r][c].clone();
        if !p.is_one() {
            for v in self.a[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &p;
                }
            }
        }
        let pivot_row = core::mem::take(&mut self.a[r]);
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.a[r] = pivot_row;
        self.basis[r] = c;
    }

    /// Minimizes the objective stored in the last row over columns for
    /// which `allowed` holds. Returns false if unbounded.
    fn run(&mut self, allowed: &dyn Fn(usize) -> bool) -> bool {
        let obj = self.m();
        loop {
            // Bland: lowest-index improving column.
            let Some(c) = (0..self.cols).find(|&j| allowed(j) && self.a[obj][j].is_negative())
            else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..obj {
                let aij = &self.a[i][c];
                if aij.is_positive() {
                    let ratio = self.rhs(i) / aij;
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => {
                            ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                        }
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }

    /// Installs `cost` (over all columns) as the objective row, expressed in
    /// terms of the current basis.
    fn set_objective(&mut self, cost: &[Rational]) {
        let obj = self.m();
        let mut row: Vec<Rational> = cost.to_vec();
        row.push(Rational::zero());
        for i in 0..obj {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (v, a) in row.iter_mut().zip(&self.a[i]) {
                if !a.is_zero() {
                    *v -= cb * a;
                }
            }
        }
        self.a[obj] = row;
    }
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn add(&mut self, coeffs: Vec<Rational>, rel: Relation, rhs: Rational) {
        assert_eq!(coeffs.len(), self.num_vars);
        self.rows.push(Row { coeffs, rel, rhs });
    }

    pub fn add_sparse(&mut self, terms: &[(usize, Rational)], rel: Relation, rhs: Rational) {
        let mut coeffs = alloc::vec![Rational::zero(); self.num_vars];
        for (j, c) in terms {
            coeffs[*j] += c;
        }
        self.add(coeffs, rel, rhs);
    }

    pub fn maximize(&self, objective: &[Rational]) -> LpOutcome {
        let neg: Vec<Rational> = objective.iter().map(|c| -c).collect();
        match self.minimize(&neg) {
            LpOutcome::Optimal { value, x } => LpOutcome::Optimal { value: -value, x },
            other => other,
        }
    }

    pub fn feasible_point(&self) -> Option<Vec<Rational>> {
        let zero = alloc::vec![Rational::zero(); self.num_vars];
        self.minimize(&zero).optimal().map(|(_, x)| x)
    }

    pub fn minimize(&self, objective: &[Rational]) -> LpOutcome {
        assert_eq!(objective.len(), self.num_vars);
        let n = self.num_vars;
        let m = self.rows.len();
        // Normalize to non-negative right-hand sides.
        let rows: Vec<Row> = self
            .rows
            .iter()
            .map(|r| {
                if r.rhs.is_negative() {
                    Row {
                        coeffs: r.coeffs.iter().map(|c| -c).collect(),
                        rel: match r.rel {
                            Relation::Le => Relation::Ge,
                            Relation::Ge => Relation::Le,
                            Relation::Eq => Relation::Eq,
                        },
                        rhs: -&r.rhs,
                    }
                } else {
                    r.clone()
                }
            })
            .collect();
        let slacks = rows.iter().filter(|r| r.rel != Relation::Eq).count();
        let artificials = rows.iter().filter(|r| r.rel != Relation::Le).count();
        let first_art = n + slacks;
        let cols = first_art + artificials;

        let mut a = Vec::with_capacity(m + 1);
        let mut basis = Vec::with_capacity(m);
        let (mut s, mut t) = (n, first_art);
        for r in &rows {
            let mut row = alloc::vec![Rational::zero(); cols + 1];
            row[..n].clone_from_slice(&r.coeffs);
            row[cols] = r.rhs.clone();
            match r.rel {
                Relation::Le => {
                    row[s] = Rational::one();
                    basis.push(s);
                    s += 1;
                }
                Relation::Ge => {
                    row[s] = -Rational::one();
                    s += 1;
                    row[t] = Rational::one();
                    basis.push(t);
                    t += 1;
                }
                Relation::Eq => {
                    row[t] = Rational::one();
                    basis.push(t);
                    t += 1;
                }
            }
            a.push(row);
        }
        a.push(alloc::vec![Rational::zero(); cols + 1]);
        let mut tab = Tableau { a, basis, cols };

        // Phase I.
        if artificials > 0 {
            let cost: Vec<Rational> = (0..cols)
                .map(|j| {
                    if j >= first_art {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect();
            tab.set_objective(&cost);
            tab.run(&|_| true);
            if !tab.a[tab.m()][cols].is_zero() {
                return LpOutcome::Infeasible;
            }
            // Drive remaining artificials (all at zero) out of the basis.
            let mut i = 0;
            while i < tab.m() {
                if tab.basis[i] >= first_art {
                    match (0..first_art).find(|&j| !tab.a[i][j].is_zero()) {
                        Some(j) => tab.pivot(i, j),
                        None => {
                            tab.a.remove(i);
                            tab.basis.remove(i);
                            continue;
                        }
                    }
                }
                i += 1;
            }
        }

        // Phase II.
        let mut cost: Vec<Rational> = alloc::vec![Rational::zero(); cols];
        cost[..n].clone_from_slice(objective);
        tab.set_objective(&cost);
        if !tab.run(&|j| j < first_art) {
            return LpOutcome::Unbounded;
        }
        let mut x = alloc::vec![Rational::zero(); n];
        for (i, &b) in tab.basis.iter().enumerate() {
            if b < n {
                x[b] = tab.rhs(i).clone();
            }
        }
        let value = x
            .iter()
            .zip(objective)
            .fold(Rational::zero(), |acc, (xi, ci)| acc + xi * ci);
        LpOutcome::Optimal { value, x }
    }
}

/// Drops linearly dependent rows from an equality system `row · x = rhs`.
/// Returns `None` if the system is inconsistent. The kept rows are
/// returned in reduced form.
pub fn reduce_equalities(
    rows: impl IntoIterator<Item = (Vec<Rational>, Rational)>,
) -> Option<Vec<(Vec<Rational>, Rational)>> {
    let mut basis: Vec<(usize, Vec<Rational>, Rational)> = Vec::new();
    for (mut coeffs, mut rhs) in rows {
        for (p, b, brhs) in &basis {
            if coeffs[*p].is_zero() {
                continue;
            }
            let f = coeffs[*p].clone();
            for (c, bc) in coeffs.iter_mut().zip(b) {
                *c -= &f * bc;
            }
            rhs -= &f * brhs;
        }
        let Some(p) = coeffs.iter().position(|c| !c.is_zero()) else {
            if rhs.is_zero() {
                continue;
            }
            return None;
        };
        let inv = coeffs[p].recip();
        for c in coeffs.iter_mut() {
            *c *= &inv;
        }
        rhs *= &inv;
        basis.push((p, coeffs, rhs));
    }
    Some(basis.into_iter().map(|(_, c, r)| (c, r)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use alloc::vec;

    #[test]
    fn dependent_rows_are_dropped() {
        let rows = vec![
            (vec![int(1), int(1), int(0)], int(1)),
            (vec![int(0), int(1), int(1)], int(1)),
            (vec![int(1), int(2), int(1)], int(2)),
        ];
        assert_eq!(reduce_equalities(rows.clone()).unwrap().len(), 2);
        let mut bad = rows;
        bad[2].1 = ratio(5, 2);
        assert!(reduce_equalities(bad).is_none());
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 -> 36 at (2, 6).
        let mut lp = LinearProgram::new(2);
        lp.add(vec![int(1), int(0)], Relation::Le, int(4));
        lp.add(vec![int(0), int(2)], Relation::Le, int(12));
        lp.add(vec![int(3), int(2)], Relation::Le, int(18));
        let (v, x) = lp.maximize(&[int(3), int(5)]).optimal().unwrap();
        assert_eq!(v, int(36));
        assert_eq!(x, vec![int(2), int(6)]);
    }

    #[test]
    fn equality_and_ge_rows() {
        // min x + y, x + y = 1, x ≥ 1/3, y ≥ 1/4.
        let mut lp = LinearProgram::new(2);
        lp.add(vec![int(1), int(1)], Relation::Eq, int(1));
        lp.add(vec![int(1), int(0)], Relation::Ge, ratio(1, 3));
        lp.add(vec![int(0), int(1)], Relation::Ge, ratio(1, 4));
        let (v, _) = lp.minimize(&[int(1), int(1)]).optimal().unwrap();
        assert_eq!(v, int(1));
        let (v, x) = lp.maximize(&[int(1), int(0)]).optimal().unwrap();
        assert_eq!(v, ratio(3, 4));
        assert_eq!(x[1], ratio(1, 4));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.add(vec![int(1)], Relation::Ge, int(2));
        lp.add(vec![int(1)], Relation::Le, int(1));
        assert_eq!(lp.maximize(&[int(1)]), LpOutcome::Infeasible);
        let mut lp = LinearProgram::new(2);
        lp.add(vec![int(1), int(-1)], Relation::Le, int(1));
        assert_eq!(lp.maximize(&[int(1), int(0)]), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_equalities_and_negative_rhs() {
        let mut lp = LinearProgram::new(2);
        lp.add(vec![int(1), int(1)], Relation::Eq, int(1));
        lp.add(vec![int(2), int(2)], Relation::Eq, int(2));
        lp.add(vec![int(-1), int(0)], Relation::Le, ratio(-1, 2));
        let (v, x) = lp.minimize(&[int(1), int(0)]).optimal().unwrap();
        assert_eq!(v, ratio(1, 2));
        assert_eq!(x, vec![ratio(1, 2), ratio(1, 2)]);
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example, which cycles under the largest-coefficient rule.
        let mut lp = LinearProgram::new(4);
        lp.add(
            vec![ratio(1, 4), int(-60), ratio(-1, 25), int(9)],
            Relation::Le,
            int(0),
        );
        lp.add(
            vec![ratio(1, 2), int(-90), ratio(-1, 50), int(3)],
            Relation::Le,
            int(0),
        );
        lp.add(vec![int(0), int(0), int(1), int(0)], Relation::Le, int(1));
        let (v, _) = lp
            .maximize(&[ratio(3, 4), int(-150), ratio(1, 50), int(-6)])
            .optimal()
            .unwrap();
        assert_eq!(v, ratio(1, 20));
    }

    proptest::proptest! {
        /// On boxes the optimum is attained at a corner chosen by the signs.
        #[test]
        fn box_optimum_matches_corner(c in proptest::collection::vec(-5i64..5, 3), u in proptest::collection::vec(1i64..6, 3)) {
            let mut lp = LinearProgram::new(3);
            for (j, &bound) in u.iter().enumerate() {
                lp.add_sparse(&[(j, int(1))], Relation::Le, int(bound));
            }
            let cost: Vec<Rational> = c.iter().map(|&v| int(v)).collect();
            let (v, _) = lp.maximize(&cost).optimal().unwrap();
            let expected: i64 = (0..3).map(|j| if c[j] > 0 { c[j] * u[j] } else { 0 }).sum();
            proptest::prop_assert_eq!(v, int(expected));
        }
    }
}
