//! Finitary matrices, almost-scalar diagonals, the structural matrices `s`
//! and the involutions σ and τ.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::exact::{rational_from_json, rational_json, Rational};

/// Anything we put in a matrix: Q itself, or Laurent polynomials over Q.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Scalar for T where
    T: Clone
        + fmt::Debug
        + PartialEq
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
{
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UniverseKind {
    Plain,
    Doubled,
    DoubledPlusOne,
}

/// A truncation of one of the index sets `I`, `2I = I ⊔ (I + n)` or `2I+1`.
/// Indices are 1-based; in doubled universes `i` and `n+i` are partners.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexUniverse {
    pub kind: UniverseKind,
    pub n: usize,
}

impl IndexUniverse {
    pub fn plain(n: usize) -> Self {
        IndexUniverse { kind: UniverseKind::Plain, n }
    }

    pub fn doubled(n: usize) -> Self {
        IndexUniverse { kind: UniverseKind::Doubled, n }
    }

    pub fn doubled_plus_one(n: usize) -> Self {
        IndexUniverse { kind: UniverseKind::DoubledPlusOne, n }
    }

    pub fn size(&self) -> usize {
        match self.kind {
            UniverseKind::Plain => self.n,
            UniverseKind::Doubled => 2 * self.n,
            UniverseKind::DoubledPlusOne => 2 * self.n + 1,
        }
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.size()
    }

    pub fn contains(&self, i: usize) -> bool {
        (1..=self.size()).contains(&i)
    }

    /// The index paired with `i` by `s` (the extra index `2n+1` pairs with itself).
    pub fn partner(&self, i: usize) -> usize {
        let n = self.n;
        match self.kind {
            UniverseKind::Plain => i,
            _ if i <= n => i + n,
            _ if i <= 2 * n => i - n,
            _ => i,
        }
    }

    /// `ε̃(i)` as `(j, ±1)` meaning `±ε_j`; `None` for the zero weight of index `2n+1`.
    pub fn epsilon_of(&self, i: usize) -> Option<(usize, i64)> {
        let n = self.n;
        match self.kind {
            UniverseKind::Plain => Some((i, 1)),
            _ if i <= n => Some((i, 1)),
            _ if i <= 2 * n => Some((i - n, -1)),
            _ => None,
        }
    }

    /// Block-respecting inclusion into a larger universe of the same kind.
    pub fn embed_index(&self, i: usize, target: &IndexUniverse) -> usize {
        let (n, m) = (self.n, target.n);
        match self.kind {
            UniverseKind::Plain => i,
            _ if i <= n => i,
            _ if i <= 2 * n => i - n + m,
            _ => 2 * m + 1,
        }
    }
}

impl fmt::Display for IndexUniverse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            UniverseKind::Plain => write!(f, "Plain({})", self.n),
            UniverseKind::Doubled => write!(f, "Doubled({})", self.n),
            UniverseKind::DoubledPlusOne => write!(f, "DoubledPlusOne({})", self.n),
        }
    }
}

/// A matrix with finitely many nonzero entries; zeros are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct FinitaryMatrix<S: Scalar = Rational> {
    universe: IndexUniverse,
    entries: BTreeMap<(usize, usize), S>,
}

impl<S: Scalar> FinitaryMatrix<S> {
    pub fn zero(universe: IndexUniverse) -> Self {
        FinitaryMatrix { universe, entries: BTreeMap::new() }
    }

    pub fn unit(universe: IndexUniverse, i: usize, j: usize) -> Self {
        let mut m = Self::zero(universe);
        m.add_entry(i, j, S::one());
        m
    }

    pub fn from_triplets<I: IntoIterator<Item = (usize, usize, S)>>(universe: IndexUniverse, it: I) -> Result<Self> {
        let mut m = Self::zero(universe);
        for (i, j, v) in it {
            for k in [i, j] {
                if !universe.contains(k) {
                    return Err(Error::IndexOutOfRange { index: k, size: universe.size() });
                }
            }
            m.add_entry(i, j, v);
        }
        Ok(m)
    }

    pub fn universe(&self) -> IndexUniverse {
        self.universe
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &S)> {
        self.entries.iter().map(|((i, j), v)| (*i, *j, v))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(S::zero)
    }

    /// Adds `v` at `(i, j)`. Panics on indices outside the universe.
    pub fn add_entry(&mut self, i: usize, j: usize, v: S) {
        assert!(
            self.universe.contains(i) && self.universe.contains(j),
            "entry ({i},{j}) outside {}",
            self.universe
        );
        if v.is_zero() {
            return;
        }
        let slot = self.entries.entry((i, j)).or_insert_with(S::zero);
        *slot = slot.clone() + v;
        if slot.is_zero() {
            self.entries.remove(&(i, j));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn trace(&self) -> S {
        self.entries.iter().filter(|((i, j), _)| i == j).fold(S::zero(), |a, (_, v)| a + v.clone())
    }

    pub fn transpose(&self) -> Self {
        FinitaryMatrix {
            universe: self.universe,
            entries: self.entries.iter().map(|((i, j), v)| ((*j, *i), v.clone())).collect(),
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.universe != other.universe {
            return Err(Error::UniverseMismatch(format!("{} vs {}", self.universe, other.universe)));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for ((i, j), v) in &other.entries {
            out.add_entry(*i, *j, v.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.universe);
        for ((i, j), v) in &self.entries {
            out.add_entry(*i, *j, v.clone() * c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        FinitaryMatrix {
            universe: self.universe,
            entries: self.entries.iter().map(|(k, v)| (*k, -v.clone())).collect(),
        }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.universe);
        for ((i, k), a) in &self.entries {
            for ((_, j), b) in other.entries.range((*k, 0)..(*k + 1, 0)) {
                out.add_entry(*i, *j, a.clone() * b.clone());
            }
        }
        Ok(out)
    }
}

/// `[x, y] = xy - yx`.
pub fn mat_bracket<S: Scalar>(x: &FinitaryMatrix<S>, y: &FinitaryMatrix<S>) -> Result<FinitaryMatrix<S>> {
    let xy = x.try_mul(y)?;
    let yx = y.try_mul(x)?;
    xy.try_add(&yx.neg())
}

impl FinitaryMatrix<Rational> {
    /// Splits off the diagonal: `(off-diagonal part, diagonal entries)`.
    pub fn split_diagonal(&self) -> (Self, DiagExt) {
        let mut off = Self::zero(self.universe);
        let mut d = DiagExt::zero();
        for ((i, j), v) in &self.entries {
            if i == j {
                d.add_finite(*i, v.clone());
            } else {
                off.add_entry(*i, *j, v.clone());
            }
        }
        (off, d)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.entries.iter().map(|((i, j), v)| json!([i, j, rational_json(v)])).collect())
    }

    pub fn from_json(universe: IndexUniverse, v: &Value) -> Result<Self> {
        let arr = v.as_array().ok_or_else(|| Error::Parse("matrix must be a list of [i, j, value]".into()))?;
        let mut trip = Vec::new();
        for t in arr {
            let t = t.as_array().filter(|t| t.len() == 3).ok_or_else(|| Error::Parse(format!("bad triplet {t}")))?;
            let idx = |v: &Value| {
                v.as_u64().map(|x| x as usize).ok_or_else(|| Error::Parse(format!("bad index {v}")))
            };
            trip.push((idx(&t[0])?, idx(&t[1])?, rational_from_json(&t[2])?));
        }
        Self::from_triplets(universe, trip)
    }
}

/// A diagonal matrix `finite + scalar·ι`, with `ι` the identity of the
/// (infinite) index set. Represents almost-scalar diagonals exactly.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DiagExt {
    finite: BTreeMap<usize, Rational>,
    scalar: Rational,
}

impl DiagExt {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn iota() -> Self {
        DiagExt { finite: BTreeMap::new(), scalar: Rational::one() }
    }

    pub fn unit(i: usize) -> Self {
        let mut d = Self::zero();
        d.add_finite(i, Rational::one());
        d
    }

    pub fn from_finite<I: IntoIterator<Item = (usize, Rational)>>(it: I) -> Self {
        let mut d = Self::zero();
        for (i, v) in it {
            d.add_finite(i, v);
        }
        d
    }

    pub fn with_scalar(mut self, s: Rational) -> Self {
        self.scalar = s;
        self
    }

    pub fn add_finite(&mut self, i: usize, v: Rational) {
        if v.is_zero() {
            return;
        }
        let slot = self.finite.entry(i).or_insert_with(Rational::zero);
        *slot += v;
        if slot.is_zero() {
            self.finite.remove(&i);
        }
    }

    pub fn finite(&self) -> &BTreeMap<usize, Rational> {
        &self.finite
    }

    pub fn scalar(&self) -> &Rational {
        &self.scalar
    }

    pub fn finite_entry(&self, i: usize) -> Rational {
        self.finite.get(&i).cloned().unwrap_or_else(Rational::zero)
    }

    /// The actual diagonal entry at index `i`.
    pub fn value_at(&self, i: usize) -> Rational {
        self.finite_entry(i) + &self.scalar
    }

    pub fn finite_trace(&self) -> Rational {
        self.finite.values().fold(Rational::zero(), |a, v| a + v)
    }

    pub fn is_zero(&self) -> bool {
        self.finite.is_empty() && self.scalar.is_zero()
    }

    pub fn add(&self, other: &DiagExt) -> DiagExt {
        let mut out = self.clone();
        for (i, v) in &other.finite {
            out.add_finite(*i, v.clone());
        }
        out.scalar += &other.scalar;
        out
    }

    pub fn scale(&self, c: &Rational) -> DiagExt {
        if c.is_zero() {
            return DiagExt::zero();
        }
        DiagExt {
            finite: self.finite.iter().map(|(i, v)| (*i, v * c)).collect(),
            scalar: &self.scalar * c,
        }
    }

    pub fn neg(&self) -> DiagExt {
        self.scale(&-Rational::one())
    }

    pub fn sub(&self, other: &DiagExt) -> DiagExt {
        self.add(&other.neg())
    }

    /// The finite part as a matrix (the ι part is dropped).
    pub fn finite_matrix(&self, universe: IndexUniverse) -> FinitaryMatrix<Rational> {
        let mut m = FinitaryMatrix::zero(universe);
        for (i, v) in &self.finite {
            m.add_entry(*i, *i, v.clone());
        }
        m
    }

    pub fn to_json(&self) -> Value {
        let f: Map<String, Value> = self.finite.iter().map(|(i, v)| (i.to_string(), rational_json(v))).collect();
        json!({ "finite": f, "scalar": rational_json(&self.scalar) })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("diagonal must be an object".into()))?;
        let mut d = DiagExt::zero();
        if let Some(f) = obj.get("finite") {
            let f = f.as_object().ok_or_else(|| Error::Parse("\"finite\" must be an object".into()))?;
            for (k, val) in f {
                let i: usize = k.parse().map_err(|_| Error::Parse(format!("bad index {k:?}")))?;
                if i == 0 {
                    return Err(Error::Parse("indices are 1-based".into()));
                }
                d.add_finite(i, rational_from_json(val)?);
            }
        }
        if let Some(s) = obj.get("scalar") {
            d.scalar = rational_from_json(s)?;
        }
        Ok(d)
    }
}

/// `[p, x]` for a diagonal `p`: entry `(i, j)` is scaled by `p_i - p_j`.
pub fn diag_bracket(p: &DiagExt, x: &FinitaryMatrix<Rational>) -> FinitaryMatrix<Rational> {
    let mut out = FinitaryMatrix::zero(x.universe());
    for (i, j, v) in x.entries() {
        if i != j {
            out.add_entry(i, j, v * (p.finite_entry(i) - p.finite_entry(j)));
        }
    }
    out
}

/// Splits `p` on a finite window into a traceless part `h`, a scalar and
/// what is left off the window: on the window, `p = h + scalar·ι`.
pub fn normalize_almost_scalar(p: &DiagExt, window: &[usize]) -> (DiagExt, Rational, DiagExt) {
    assert!(!window.is_empty(), "window must be nonempty");
    let vals: Vec<Rational> = window.iter().map(|i| p.value_at(*i)).collect();
    let mean = vals.iter().fold(Rational::zero(), |a, v| a + v) / Rational::from_integer((window.len() as i64).into());
    let h = DiagExt::from_finite(window.iter().zip(&vals).map(|(i, v)| (*i, v - &mean)));
    let mut residual = DiagExt::zero().with_scalar(p.scalar.clone());
    for (i, v) in &p.finite {
        if !window.contains(i) {
            residual.add_finite(*i, v.clone());
        }
    }
    for i in window {
        residual.add_finite(*i, -p.scalar.clone());
    }
    (h, mean, residual)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    B,
    C,
    D,
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// The matrix `s` of types B, C, D; it defines the forms whose isometry
/// algebras are `o_{2I+1}`, `sp_{2I}` and `o_{2I}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StructuralS {
    pub letter: Letter,
    pub universe: IndexUniverse,
}

impl StructuralS {
    pub fn new(letter: Letter, universe: IndexUniverse) -> Result<Self> {
        let ok = matches!(
            (letter, universe.kind),
            (Letter::B, UniverseKind::DoubledPlusOne) | (Letter::C, UniverseKind::Doubled) | (Letter::D, UniverseKind::Doubled)
        );
        if !ok {
            return Err(Error::UniverseMismatch(format!("no structural matrix of type {letter} on {universe}")));
        }
        Ok(StructuralS { letter, universe })
    }

    /// Row `i` of `s` has a single nonzero entry: `(column, sign)`.
    pub fn entry_of_row(&self, i: usize) -> (usize, i64) {
        let n = self.universe.n;
        let j = self.universe.partner(i);
        let sign = if self.letter == Letter::C && i <= n { -1 } else { 1 };
        (j, sign)
    }

    pub fn matrix<S: Scalar>(&self) -> FinitaryMatrix<S> {
        let mut m = FinitaryMatrix::zero(self.universe);
        for i in self.universe.indices() {
            let (j, sign) = self.entry_of_row(i);
            m.add_entry(i, j, if sign > 0 { S::one() } else { -S::one() });
        }
        m
    }

    /// `(v, w) = vᵗ s w`.
    pub fn pairing(&self, v: &BTreeMap<usize, Rational>, w: &BTreeMap<usize, Rational>) -> Rational {
        let mut acc = Rational::zero();
        for (i, a) in v {
            let (j, sign) = self.entry_of_row(*i);
            if let Some(b) = w.get(&j) {
                acc += a * b * Rational::from_integer(sign.into());
            }
        }
        acc
    }
}

/// `σ(x) = -s xᵗ s` for B and D, `σ(x) = s xᵗ s` for C.
pub fn sigma<S: Scalar>(s: &StructuralS, x: &FinitaryMatrix<S>) -> Result<FinitaryMatrix<S>> {
    if x.universe() != s.universe {
        return Err(Error::UniverseMismatch(format!("σ of type {} on {} applied to {}", s.letter, s.universe, x.universe())));
    }
    let sm: FinitaryMatrix<S> = s.matrix();
    let y = sm.try_mul(&x.transpose())?.try_mul(&sm)?;
    Ok(if s.letter == Letter::C { y } else { y.neg() })
}

/// σ on a diagonal; ι is sent to -ι for every type.
pub fn sigma_diag(s: &StructuralS, p: &DiagExt) -> Result<DiagExt> {
    let m = sigma(s, &p.finite_matrix(s.universe))?;
    let (off, mut d) = m.split_diagonal();
    debug_assert!(off.is_zero());
    d.scalar = -p.scalar.clone();
    Ok(d)
}

fn tau_index(u: &IndexUniverse, i: usize) -> usize {
    let j0 = u.n;
    match i {
        _ if i == j0 => 2 * j0,
        _ if i == 2 * j0 => j0,
        _ => i,
    }
}

fn check_tau_universe(u: &IndexUniverse) -> Result<()> {
    if u.kind != UniverseKind::Doubled {
        return Err(Error::UniverseMismatch(format!("τ needs a Doubled universe, got {u}")));
    }
    Ok(())
}

/// `τ(x) = g x g` where `g` swaps the distinguished pair `j₀ = n+1`, `-j₀ = 2n+2`
/// of the universe `Doubled(n+1)`.
pub fn tau<S: Scalar>(x: &FinitaryMatrix<S>) -> Result<FinitaryMatrix<S>> {
    let u = x.universe();
    check_tau_universe(&u)?;
    let mut out = FinitaryMatrix::zero(u);
    for (i, j, v) in x.entries() {
        out.add_entry(tau_index(&u, i), tau_index(&u, j), v.clone());
    }
    Ok(out)
}

pub fn tau_diag(u: &IndexUniverse, p: &DiagExt) -> Result<DiagExt> {
    check_tau_universe(u)?;
    let mut d = DiagExt::zero().with_scalar(p.scalar.clone());
    for (i, v) in p.finite() {
        d.add_finite(tau_index(u, *i), v.clone());
    }
    Ok(d)
}
