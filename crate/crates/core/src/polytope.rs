//! Exact polyhedral geometry: affine solution of sparse equation systems
//! and vertex enumeration of bounded polytopes.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use fixedbitset::FixedBitSet;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::Rational;

pub const DEFAULT_VERTEX_BUDGET: usize = 100_000;

/// `Σ coeff·x_j = rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub terms: Vec<(usize, Rational)>,
    pub rhs: Rational,
}

/// `x_p = constant + Σ coeff·x_j` over non-pivot `j`.
#[derive(Clone, Debug, Default)]
struct Expr {
    constant: Rational,
    terms: BTreeMap<usize, Rational>,
}

impl Expr {
    fn add_scaled(&mut self, other: &Expr, factor: &Rational) {
        self.constant += &other.constant * factor;
        for (&j, c) in &other.terms {
            let entry = self.terms.entry(j).or_insert_with(Rational::zero);
            *entry += c * factor;
            if entry.is_zero() {
                self.terms.remove(&j);
            }
        }
    }
}

/// Solution set of a linear system as an affine image
/// `x = offset + Σ_j t_j·direction_j`, where `t_j` is the free coordinate
/// `x[free[j]]`.
#[derive(Clone, Debug)]
pub struct AffineSolution {
    n: usize,
    free: Vec<usize>,
    /// Per coordinate: constant and dense coefficients over `free`.
    rows: Vec<(Rational, Vec<Rational>)>,
}

impl AffineSolution {
    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    /// Dimension of the solution set.
    pub fn dim(&self) -> usize {
        self.free.len()
    }

    pub fn free_coords(&self) -> &[usize] {
        &self.free
    }

    /// `(constant, coefficients over the free coordinates)` for coordinate `i`.
    pub fn coordinate(&self, i: usize) -> (&Rational, &[Rational]) {
        let (c, a) = &self.rows[i];
        (c, a)
    }

    /// Lifts reduced coordinates back to the full vector.
    pub fn lift(&self, t: &[Rational]) -> Vec<Rational> {
        self.rows
            .iter()
            .map(|(c, a)| {
                a.iter()
                    .zip(t)
                    .fold(c.clone(), |acc, (ai, ti)| acc + ai * ti)
            })
            .collect()
    }

    /// Projects a full vector onto the free coordinates.
    pub fn reduce(&self, x: &[Rational]) -> Vec<Rational> {
        self.free.iter().map(|&j| x[j].clone()).collect()
    }
}

/// Solves a sparse system exactly; `None` if it is inconsistent.
///
/// Pivots are chosen at the largest column of each reduced equation, and
/// equations are processed in order of their largest column, which keeps
/// the elimination almost free of back-substitution when larger indices
/// denote larger events.
pub fn solve_equations(n: usize, equations: &[Equation]) -> Option<AffineSolution> {
    let mut order: Vec<&Equation> = equations.iter().collect();
    order.sort_by_key(|eq| eq.terms.iter().map(|t| t.0).max());
    let mut pivots: BTreeMap<usize, Expr> = BTreeMap::new();
    for eq in order {
        // Residual form: constant + Σ c_j x_j = 0.
        let mut form = Expr {
            constant: -eq.rhs.clone(),
            terms: BTreeMap::new(),
        };
        for (j, c) in &eq.terms {
            if c.is_zero() {
                continue;
            }
            match pivots.get(j) {
                Some(p) => form.add_scaled(p, c),
                None => {
                    let one_term = Expr {
                        constant: Rational::zero(),
                        terms: [(*j, Rational::one())].into_iter().collect(),
                    };
                    form.add_scaled(&one_term, c);
                }
            }
        }
        let Some((&p, coef)) = form.terms.iter().next_back() else {
            if form.constant.is_zero() {
                continue;
            }
            return None;
        };
        let scale = -coef.recip();
        form.terms.remove(&p);
        let mut expr = Expr::default();
        expr.add_scaled(&form, &scale);
        for other in pivots.values_mut() {
            if let Some(c) = other.terms.remove(&p) {
                other.add_scaled(&expr, &c);
            }
        }
        pivots.insert(p, expr);
    }
    let free: Vec<usize> = (0..n).filter(|j| !pivots.contains_key(j)).collect();
    let pos: BTreeMap<usize, usize> = free.iter().enumerate().map(|(k, &j)| (j, k)).collect();
    let k = free.len();
    let rows = (0..n)
        .map(|i| match pivots.get(&i) {
            Some(expr) => {
                let mut a = alloc::vec![Rational::zero(); k];
                for (j, c) in &expr.terms {
                    a[pos[j]] = c.clone();
                }
                (expr.constant.clone(), a)
            }
            None => {
                let mut a = alloc::vec![Rational::zero(); k];
                a[pos[&i]] = Rational::one();
                (Rational::zero(), a)
            }
        })
        .collect();
    Some(AffineSolution { n, free, rows })
}

/// `normal · t ≤ bound`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Halfspace {
    pub normal: Vec<Rational>,
    pub bound: Rational,
}

impl Halfspace {
    pub fn slack(&self, t: &[Rational]) -> Rational {
        let lhs = self
            .normal
            .iter()
            .zip(t)
            .fold(Rational::zero(), |acc, (a, x)| acc + a * x);
        &self.bound - lhs
    }

    fn support(&self) -> usize {
        self.normal.iter().filter(|a| !a.is_zero()).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum VertexMethod {
    #[default]
    DoubleDescription,
    BasisEnumeration,
}

/// Removes duplicates and constant rows. Returns `None` if a constant row
/// is violated (empty polytope).
pub fn normalize_halfspaces(mut hs: Vec<Halfspace>) -> Option<Vec<Halfspace>> {
    let mut out = Vec::with_capacity(hs.len());
    hs.sort();
    hs.dedup();
    for h in hs {
        if h.support() == 0 {
            if h.bound.is_negative() {
                return None;
            }
        } else {
            out.push(h);
        }
    }
    Some(out)
}

/// Vertices of `{t : h.normal·t ≤ h.bound}` in dimension `dim`, which must
/// be contained in the unit cube. Output is sorted.
pub fn enumerate_vertices(
    dim: usize,
    halfspaces: &[Halfspace],
    method: VertexMethod,
    budget: usize,
) -> Result<Vec<Vec<Rational>>> {
    let Some(hs) = normalize_halfspaces(halfspaces.to_vec()) else {
        return Ok(Vec::new());
    };
    if dim == 0 {
        return Ok(alloc::vec![Vec::new()]);
    }
    let mut out = match method {
        VertexMethod::DoubleDescription => double_description(dim, &hs, budget)?,
        VertexMethod::BasisEnumeration => basis_enumeration(dim, &hs, budget)?,
    };
    out.sort();
    out.dedup();
    Ok(out)
}

struct Vertex {
    point: Vec<Rational>,
    tight: FixedBitSet,
}

fn double_description(dim: usize, hs: &[Halfspace], budget: usize) -> Result<Vec<Vec<Rational>>> {
    // Start from the simplex {t ≥ 0, Σt ≤ dim}, which contains the unit cube.
    let mut constraints: Vec<Halfspace> = Vec::with_capacity(dim + 1 + hs.len());
    for j in 0..dim {
        let mut normal = alloc::vec![Rational::zero(); dim];
        normal[j] = -Rational::one();
        constraints.push(Halfspace {
            normal,
            bound: Rational::zero(),
        });
    }
    constraints.push(Halfspace {
        normal: alloc::vec![Rational::one(); dim],
        bound: Rational::from_integer((dim as i64).into()),
    });
    let mut rest: Vec<&Halfspace> = hs.iter().collect();
    rest.sort_by_key(|h| h.support());
    constraints.extend(rest.into_iter().cloned());
    let total = constraints.len();

    let mut vertices: Vec<Vertex> = Vec::with_capacity(dim + 1);
    {
        let mut tight = FixedBitSet::with_capacity(total);
        tight.insert_range(0..dim);
        vertices.push(Vertex {
            point: alloc::vec![Rational::zero(); dim],
            tight,
        });
        for j in 0..dim {
            let mut point = alloc::vec![Rational::zero(); dim];
            point[j] = Rational::from_integer((dim as i64).into());
            let mut tight = FixedBitSet::with_capacity(total);
            tight.insert_range(0..dim);
            tight.set(j, false);
            tight.insert(dim);
            vertices.push(Vertex { point, tight });
        }
    }

    for (idx, h) in constraints.iter().enumerate().skip(dim + 1) {
        let slacks: Vec<Rational> = vertices.iter().map(|v| h.slack(&v.point)).collect();
        if slacks.iter().all(|s| !s.is_negative()) {
            for (v, s) in vertices.iter_mut().zip(&slacks) {
                if s.is_zero() {
                    v.tight.insert(idx);
                }
            }
            continue;
        }
        let plus: Vec<usize> = (0..vertices.len())
            .filter(|&i| slacks[i].is_positive())
            .collect();
        let minus: Vec<usize> = (0..vertices.len())
            .filter(|&i| slacks[i].is_negative())
            .collect();
        let mut created = Vec::new();
        for &u in &plus {
            for &w in &minus {
                let mut common = vertices[u].tight.clone();
                common.intersect_with(&vertices[w].tight);
                if common.count_ones(..) + 1 < dim {
                    continue;
                }
                let adjacent = vertices
                    .iter()
                    .enumerate()
                    .all(|(x, v)| x == u || x == w || !common.is_subset(&v.tight));
                if !adjacent {
                    continue;
                }
                let (su, sw) = (&slacks[u], &slacks[w]);
                let denom = su - sw;
                let point: Vec<Rational> = vertices[u]
                    .point
                    .iter()
                    .zip(&vertices[w].point)
                    .map(|(pu, pw)| (su * pw - sw * pu) / &denom)
                    .collect();
                common.insert(idx);
                created.push(Vertex {
                    point,
                    tight: common,
                });
            }
        }
        let mut next: Vec<Vertex> = Vec::with_capacity(vertices.len() + created.len());
        for (v, s) in vertices.into_iter().zip(&slacks) {
            if s.is_positive() {
                next.push(v);
            } else if s.is_zero() {
                let mut v = v;
                v.tight.insert(idx);
                next.push(v);
            }
        }
        next.extend(created);
        if next.len() > budget {
            return Err(Error::VertexBudgetExceeded(budget));
        }
        vertices = next;
        if vertices.is_empty() {
            break;
        }
    }
    Ok(vertices.into_iter().map(|v| v.point).collect())
}

/// Solves the square system `rows · t = rhs`; `None` if singular.
pub fn solve_square(mut rows: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let k = rows.len();
    for col in 0..k {
        let p = (col..k).find(|&r| !rows[r][col].is_zero())?;
        rows.swap(col, p);
        rhs.swap(col, p);
        let inv = rows[col][col].recip();
        for v in rows[col].iter_mut() {
            *v *= &inv;
        }
        rhs[col] *= &inv;
        for r in 0..k {
            if r != col && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                let (src, dst) = if r < col {
                    let (a, b) = rows.split_at_mut(col);
                    (&b[0], &mut a[r])
                } else {
                    let (a, b) = rows.split_at_mut(r);
                    (&a[col], &mut b[0])
                };
                for (d, s) in dst.iter_mut().zip(src) {
                    *d -= &f * s;
                }
                let delta = &f * &rhs[col];
                rhs[r] -= delta;
            }
        }
    }
    Some(rhs)
}

fn basis_enumeration(dim: usize, hs: &[Halfspace], budget: usize) -> Result<Vec<Vec<Rational>>> {
    let m = hs.len();
    if m < dim {
        return Ok(Vec::new());
    }
    if binomial(m, dim) > budget as u128 {
        return Err(Error::VertexBudgetExceeded(budget));
    }
    let mut out = Vec::new();
    let mut pick: Vec<usize> = (0..dim).collect();
    loop {
        let rows = pick.iter().map(|&i| hs[i].normal.clone()).collect();
        let rhs = pick.iter().map(|&i| hs[i].bound.clone()).collect();
        if let Some(t) = solve_square(rows, rhs) {
            if hs.iter().all(|h| !h.slack(&t).is_negative()) {
                out.push(t);
            }
        }
        // Next combination in lexicographic order.
        let mut i = dim;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if pick[i] < m - dim + i {
                pick[i] += 1;
                for j in i + 1..dim {
                    pick[j] = pick[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return acc;
        }
    }
    acc
}
