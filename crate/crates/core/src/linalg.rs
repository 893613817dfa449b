//! Exact sparse linear algebra over Q.
//!
//! Two tools: [`Decomposer`] expresses vectors in a fixed spanning list (used
//! for basis coordinates), and [`RowReducer`] keeps a fraction-free reduced
//! row echelon form over the integers (used for constraint systems).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::Rational;

pub type SparseVec<K> = BTreeMap<K, Rational>;

/// `dst += c * src`, dropping entries that cancel.
pub fn axpy<K: Ord + Clone>(dst: &mut SparseVec<K>, c: &Rational, src: &SparseVec<K>) {
    if c.is_zero() {
        return;
    }
    for (k, v) in src {
        let slot = dst.entry(k.clone()).or_insert_with(Rational::zero);
        *slot += c * v;
        if slot.is_zero() {
            dst.remove(k);
        }
    }
}

struct EchelonRow<K> {
    pivot: K,
    vec: SparseVec<K>,
    combo: SparseVec<usize>,
}

/// Echelon form of a list of vectors that remembers how each row was formed
/// from the originals, so arbitrary vectors in the span can be decomposed.
pub struct Decomposer<K: Ord + Clone> {
    rows: Vec<EchelonRow<K>>,
    dependent: Vec<usize>,
}

impl<K: Ord + Clone> Decomposer<K> {
    pub fn new(vectors: &[SparseVec<K>]) -> Self {
        let mut d = Decomposer { rows: Vec::new(), dependent: Vec::new() };
        for (i, v) in vectors.iter().enumerate() {
            let mut combo = SparseVec::new();
            combo.insert(i, Rational::one());
            let (rest, combo) = d.reduce(v.clone(), combo);
            match rest.keys().next().cloned() {
                Some(pivot) => d.rows.push(EchelonRow { pivot, vec: rest, combo }),
                None => d.dependent.push(i),
            }
        }
        d
    }

    fn reduce(&self, mut v: SparseVec<K>, mut combo: SparseVec<usize>) -> (SparseVec<K>, SparseVec<usize>) {
        for row in &self.rows {
            if let Some(x) = v.get(&row.pivot) {
                let c = -(x / &row.vec[&row.pivot]);
                axpy(&mut v, &c, &row.vec);
                axpy(&mut combo, &c, &row.combo);
            }
        }
        (v, combo)
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Indices of input vectors that were linearly dependent on earlier ones.
    pub fn dependent(&self) -> &[usize] {
        &self.dependent
    }

    /// Coefficients `a_i` with `v = Σ a_i vectors[i]`, or `None` if `v` is outside the span.
    pub fn decompose(&self, v: &SparseVec<K>) -> Option<SparseVec<usize>> {
        let (rest, combo) = self.reduce(v.clone(), SparseVec::new());
        if rest.is_empty() {
            Some(combo.into_iter().map(|(i, c)| (i, -c)).collect())
        } else {
            None
        }
    }

    pub fn contains(&self, v: &SparseVec<K>) -> bool {
        self.reduce(v.clone(), SparseVec::new()).0.is_empty()
    }
}

pub fn rank_of<K: Ord + Clone>(vectors: &[SparseVec<K>]) -> usize {
    Decomposer::new(vectors).rank()
}

type IntRow = BTreeMap<usize, BigInt>;

fn make_primitive(row: &mut IntRow) {
    let mut g = BigInt::zero();
    for v in row.values() {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    let lead_negative = row.values().next().is_some_and(|v| v.is_negative());
    if g.is_zero() {
        return;
    }
    if lead_negative {
        g = -g;
    }
    if !g.is_one() {
        for v in row.values_mut() {
            *v = &*v / &g;
        }
    }
}

fn to_int_row(row: &SparseVec<usize>) -> IntRow {
    let mut l = BigInt::one();
    for v in row.values() {
        l = l.lcm(v.denom());
    }
    let mut out: IntRow = row
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(k, v)| (*k, v.numer() * (&l / v.denom())))
        .collect();
    make_primitive(&mut out);
    out
}

// r := a*r - b*p, entries that vanish are removed
fn combine(r: &IntRow, a: &BigInt, p: &IntRow, b: &BigInt) -> IntRow {
    let mut out = IntRow::new();
    for (k, v) in r {
        out.insert(*k, v * a);
    }
    for (k, v) in p {
        let slot = out.entry(*k).or_insert_with(BigInt::zero);
        *slot -= v * b;
    }
    out.retain(|_, v| !v.is_zero());
    make_primitive(&mut out);
    out
}

/// Fraction-free reduced row echelon form, built one constraint at a time.
#[derive(Default)]
pub struct RowReducer {
    ncols: usize,
    rows: Vec<IntRow>,
    pivots: BTreeMap<usize, usize>,
}

impl RowReducer {
    pub fn new(ncols: usize) -> Self {
        RowReducer { ncols, ..Default::default() }
    }

    /// Adds a row; returns true when it increased the rank.
    pub fn push(&mut self, row: &SparseVec<usize>) -> bool {
        debug_assert!(row.keys().all(|k| *k < self.ncols));
        let mut r = to_int_row(row);
        let hits: Vec<usize> = r.keys().filter(|k| self.pivots.contains_key(k)).copied().collect();
        for col in hits {
            let Some(b) = r.get(&col).cloned() else { continue };
            let p = &self.rows[self.pivots[&col]];
            r = combine(&r, &p[&col], p, &b);
        }
        let Some(&pc) = r.keys().next() else { return false };
        for row in self.rows.iter_mut() {
            if let Some(b) = row.get(&pc).cloned() {
                *row = combine(row, &r[&pc], &r, &b);
            }
        }
        self.pivots.insert(pc, self.rows.len());
        self.rows.push(r);
        true
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Basis of `{x : Ax = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<SparseVec<usize>> {
        let mut out = Vec::new();
        for f in (0..self.ncols).filter(|c| !self.pivots.contains_key(c)) {
            let mut x = SparseVec::new();
            x.insert(f, Rational::one());
            for (&pc, &ri) in &self.pivots {
                let row = &self.rows[ri];
                if let Some(a) = row.get(&f) {
                    x.insert(pc, -Rational::new(a.clone(), row[&pc].clone()));
                }
            }
            out.push(x);
        }
        out
    }

    /// Whether `x` satisfies every stored constraint.
    pub fn annihilates(&self, x: &SparseVec<usize>) -> bool {
        self.rows.iter().all(|row| {
            let mut s = Rational::zero();
            for (k, a) in row {
                if let Some(v) = x.get(k) {
                    s += v * Rational::from_integer(a.clone());
                }
            }
            s.is_zero()
        })
    }
}

/// Solves the square system `a x = b` by Gauss–Jordan elimination.
pub fn solve_dense(a: &[Vec<Rational>], b: &[Rational]) -> Result<Vec<Rational>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero()).ok_or(Error::SingularForm)?;
        m.swap(col, piv);
        let inv = m[col][col].recip();
        for v in m[col].iter_mut() {
            *v *= &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let t = &m[col][c] * &f;
                    m[r][c] -= t;
                }
            }
        }
    }
    Ok(m.into_iter().map(|r| r[n].clone()).collect())
}

pub fn dense_rank(rows: &[Vec<Rational>]) -> usize {
    let sparse: Vec<SparseVec<usize>> = rows
        .iter()
        .map(|r| r.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (i, v.clone())).collect())
        .collect();
    rank_of(&sparse)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{frac, q};

    fn sv(entries: &[(usize, i64)]) -> SparseVec<usize> {
        entries.iter().map(|(k, v)| (*k, q(*v))).collect()
    }

    #[test]
    fn decompose_recovers_combination() {
        let vs = vec![sv(&[(0, 1), (1, 1)]), sv(&[(1, 1), (2, 1)]), sv(&[(0, 1), (2, -1)])];
        let d = Decomposer::new(&vs);
        assert_eq!(d.rank(), 2);
        assert_eq!(d.dependent(), &[2]);
        let target = sv(&[(0, 2), (1, 5), (2, 3)]);
        let c = d.decompose(&target).unwrap();
        let mut back = SparseVec::new();
        for (i, a) in &c {
            axpy(&mut back, a, &vs[*i]);
        }
        assert_eq!(back, target);
        assert!(d.decompose(&sv(&[(0, 1)])).is_none());
    }

    #[test]
    fn nullspace_of_small_system() {
        // x0 + x1 = 0, x1 - 2 x2 = 0 over 4 columns
        let mut r = RowReducer::new(4);
        assert!(r.push(&sv(&[(0, 1), (1, 1)])));
        assert!(r.push(&sv(&[(1, 1), (2, -2)])));
        assert!(!r.push(&sv(&[(0, 2), (2, 4)])));
        let ns = r.nullspace();
        assert_eq!(ns.len(), 2);
        for x in &ns {
            assert!(r.annihilates(x));
        }
    }

    #[test]
    fn fraction_free_handles_rational_rows() {
        let mut r = RowReducer::new(2);
        let row: SparseVec<usize> = [(0, frac(1, 3)), (1, frac(-1, 2))].into_iter().collect();
        r.push(&row);
        let ns = r.nullspace();
        assert_eq!(ns, vec![[(0, frac(3, 2)), (1, q(1))].into_iter().collect()]);
    }

    #[test]
    fn dense_solve() {
        let a = vec![vec![q(2), q(-1)], vec![q(-1), q(0)]];
        let x = solve_dense(&a, &[q(2), q(-1)]).unwrap();
        assert_eq!(x, vec![q(1), q(0)]);
        let sing = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert_eq!(solve_dense(&sing, &[q(0), q(0)]), Err(Error::SingularForm));
    }
}
