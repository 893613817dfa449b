//! The split simple algebras `sl`, `o_{2n+1}`, `sp_{2n}`, `o_{2n}` at
//! truncation, their root systems, coroots and the grading modules 𝔰.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exact::{q, Rational};
use crate::linalg::{Decomposer, SparseVec};
use crate::matrix::{mat_bracket, sigma, DiagExt, FinitaryMatrix, IndexUniverse, Letter, StructuralS};

/// An integral combination of the functionals `ε_i`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight(BTreeMap<usize, i64>);

impl Weight {
    pub fn zero() -> Self {
        Weight::default()
    }

    pub fn eps(i: usize) -> Self {
        Weight::from_coeffs([(i, 1)])
    }

    pub fn from_coeffs<I: IntoIterator<Item = (usize, i64)>>(it: I) -> Self {
        let mut w = Weight::zero();
        for (i, c) in it {
            w.add_coeff(i, c);
        }
        w
    }

    fn add_coeff(&mut self, i: usize, c: i64) {
        let slot = self.0.entry(i).or_insert(0);
        *slot += c;
        if *slot == 0 {
            self.0.remove(&i);
        }
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, i64> {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, o: &Weight) -> Weight {
        let mut w = self.clone();
        for (i, c) in &o.0 {
            w.add_coeff(*i, *c);
        }
        w
    }

    pub fn scale(&self, k: i64) -> Weight {
        Weight::from_coeffs(self.0.iter().map(|(i, c)| (*i, c * k)))
    }

    pub fn neg(&self) -> Weight {
        self.scale(-1)
    }

    pub fn sub(&self, o: &Weight) -> Weight {
        self.add(&o.neg())
    }

    /// Standard inner product `(ε_i, ε_j) = δ_ij`.
    pub fn inner(&self, o: &Weight) -> i64 {
        self.0.iter().map(|(i, c)| c * o.0.get(i).copied().unwrap_or(0)).sum()
    }

    pub fn norm2(&self) -> i64 {
        self.inner(self)
    }

    /// `⟨ν, μ⟩ = 2(ν,μ)/(μ,μ)`; panics if that is not an integer.
    pub fn cartan_integer(&self, mu: &Weight) -> i64 {
        let (num, den) = (2 * self.inner(mu), mu.norm2());
        assert!(den != 0 && num % den == 0, "⟨{self},{mu}⟩ is not integral");
        num / den
    }

    /// `Σ c_i (finite_i + scalar)`.
    pub fn eval(&self, p: &DiagExt) -> Rational {
        self.0.iter().fold(Rational::zero(), |a, (i, c)| a + p.value_at(*i) * q(*c))
    }

    /// Half the weight, if every coefficient is even.
    pub fn half(&self) -> Option<Weight> {
        self.0.values().all(|c| c % 2 == 0).then(|| Weight::from_coeffs(self.0.iter().map(|(i, c)| (*i, c / 2))))
    }

    pub fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }

    /// Parses the `Display` form, e.g. `"ε1-ε2"`, `"2ε1"`, `"-ε1-ε3"`, `"0"`.
    pub fn parse(s: &str) -> Result<Weight> {
        let s = s.trim().replace('−', "-").replace("eps", "ε").replace('e', "ε");
        if s == "0" {
            return Ok(Weight::zero());
        }
        let bad = || Error::Parse(format!("bad weight {s:?}"));
        let mut w = Weight::zero();
        let mut rest = s.as_str();
        while !rest.is_empty() {
            let (sign, r) = match rest.as_bytes()[0] {
                b'-' => (-1, &rest[1..]),
                b'+' => (1, &rest[1..]),
                _ => (1, rest),
            };
            let pos = r.find('ε').ok_or_else(bad)?;
            let c: i64 = if pos == 0 { 1 } else { r[..pos].parse().map_err(|_| bad())? };
            let r = &r[pos + 'ε'.len_utf8()..];
            let end = r.find(['+', '-']).unwrap_or(r.len());
            let i: usize = r[..end].parse().map_err(|_| bad())?;
            w.add_coeff(i, sign * c);
            rest = &r[end..];
        }
        Ok(w)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (n, (i, c)) in self.0.iter().enumerate() {
            let sign = if *c < 0 { "-" } else if n > 0 { "+" } else { "" };
            let a = c.abs();
            if a == 1 {
                write!(f, "{sign}ε{i}")?;
            } else {
                write!(f, "{sign}{a}ε{i}")?;
            }
        }
        Ok(())
    }
}

/// Weight of the matrix unit `e_kl` with respect to the diagonal Cartan.
pub fn unit_weight(u: &IndexUniverse, k: usize, l: usize) -> Weight {
    let mut w = Weight::zero();
    if let Some((i, c)) = u.epsilon_of(k) {
        w.add_coeff(i, c);
    }
    if let Some((i, c)) = u.epsilon_of(l) {
        w.add_coeff(i, -c);
    }
    w
}

/// Locally finite root system types, including BC for the twisted grading.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RootKind {
    A,
    B,
    C,
    D,
    BC,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RootLengthClass {
    Short,
    Long,
    ExtraLong,
}

impl fmt::Display for RootLengthClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RootLengthClass::Short => "short",
            RootLengthClass::Long => "long",
            RootLengthClass::ExtraLong => "extraLong",
        })
    }
}

/// The finite root system of `kind` on `ε_1..ε_n` (for A: `ε_i − ε_j`, `i, j ≤ n`).
pub fn roots(kind: RootKind, n: usize) -> Vec<Weight> {
    let mut out = Vec::new();
    let e = Weight::eps;
    for i in 1..=n {
        for j in 1..=n {
            if i == j {
                continue;
            }
            match kind {
                RootKind::A => out.push(e(i).sub(&e(j))),
                _ => {
                    out.push(e(i).sub(&e(j)));
                    if i < j {
                        out.push(e(i).add(&e(j)));
                        out.push(e(i).add(&e(j)).neg());
                    }
                }
            }
        }
        if matches!(kind, RootKind::B | RootKind::BC) {
            out.push(e(i));
            out.push(e(i).neg());
        }
        if matches!(kind, RootKind::C | RootKind::BC) {
            out.push(e(i).scale(2));
            out.push(e(i).scale(-2));
        }
    }
    out.sort();
    out
}

/// Length class of a root of `kind`, by squared length in the ε-metric.
pub fn root_length(kind: RootKind, n: usize, mu: &Weight) -> Result<RootLengthClass> {
    let all = roots(kind, n);
    if !all.contains(mu) {
        return Err(Error::NotARoot(format!("{mu} in {kind:?}{n}")));
    }
    // by absolute length, so that rank-one systems classify like their larger relatives
    Ok(match (kind, mu.norm2()) {
        (RootKind::A | RootKind::D, _) | (RootKind::B | RootKind::BC, 1) | (RootKind::C, 2) => RootLengthClass::Short,
        (RootKind::BC, 4) => RootLengthClass::ExtraLong,
        _ => RootLengthClass::Long,
    })
}

/// `Δ^red`: roots whose half is not a root.
pub fn is_reduced_root(kind: RootKind, n: usize, mu: &Weight) -> bool {
    let all = roots(kind, n);
    all.contains(mu) && mu.half().is_none_or(|h| !all.contains(&h))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SimpleType {
    pub letter: Letter,
    pub rank: usize,
}

impl SimpleType {
    pub fn new(letter: Letter, rank: usize) -> Result<Self> {
        let min = match letter {
            Letter::A | Letter::B | Letter::C => 2,
            Letter::D => 3,
        };
        if rank < min {
            return Err(Error::InvalidRank { what: format!("type {letter}"), rank, reason: format!("need rank >= {min}") });
        }
        Ok(SimpleType { letter, rank })
    }

    pub fn universe(&self) -> IndexUniverse {
        universe_for(self.letter, self.rank)
    }

    pub fn root_kind(&self) -> RootKind {
        match self.letter {
            Letter::A => RootKind::A,
            Letter::B => RootKind::B,
            Letter::C => RootKind::C,
            Letter::D => RootKind::D,
        }
    }

    pub fn dim(&self) -> usize {
        let n = self.rank;
        match self.letter {
            Letter::A => n * n - 1,
            Letter::B | Letter::C => n * (2 * n + 1),
            Letter::D => n * (2 * n - 1),
        }
    }
}

pub fn universe_for(letter: Letter, n: usize) -> IndexUniverse {
    match letter {
        Letter::A => IndexUniverse::plain(n),
        Letter::B => IndexUniverse::doubled_plus_one(n),
        Letter::C | Letter::D => IndexUniverse::doubled(n),
    }
}

/// Rescales to coprime integer entries with a positive leading entry.
pub fn primitive(m: &FinitaryMatrix) -> FinitaryMatrix {
    let mut l = BigInt::one();
    let mut g = BigInt::zero();
    for (_, _, v) in m.entries() {
        l = l.lcm(v.denom());
    }
    for (_, _, v) in m.entries() {
        g = g.gcd(&(v.numer() * (&l / v.denom())));
    }
    if g.is_zero() {
        return m.clone();
    }
    let lead_neg = m.entries().next().is_some_and(|(_, _, v)| v.is_negative());
    let f = Rational::new(if lead_neg { -l } else { l }, g);
    m.scale(&f)
}

fn mat_key_vec(m: &FinitaryMatrix) -> SparseVec<(usize, usize)> {
    m.entries().map(|(i, j, v)| ((i, j), v.clone())).collect()
}

/// Independent members of `cands`, in order, made primitive.
fn independent(cands: Vec<FinitaryMatrix>) -> Vec<FinitaryMatrix> {
    let cands: Vec<FinitaryMatrix> = cands.into_iter().filter(|m| !m.is_zero()).collect();
    let vecs: Vec<_> = cands.iter().map(mat_key_vec).collect();
    let dec = Decomposer::new(&vecs);
    cands.iter().enumerate().filter(|(i, _)| !dec.dependent().contains(i)).map(|(_, m)| primitive(m)).collect()
}

/// Root vectors of the `sign`-eigenspace of σ inside `sl` on `s.universe`,
/// grouped by weight. `sign = +1` is `o`/`sp`, `sign = -1` is 𝔰.
pub fn eigen_root_vectors(s: &StructuralS, sign: i64) -> BTreeMap<Weight, Vec<FinitaryMatrix>> {
    let u = s.universe;
    let mut groups: BTreeMap<Weight, Vec<FinitaryMatrix>> = BTreeMap::new();
    for k in u.indices() {
        for l in u.indices() {
            if k == l {
                continue;
            }
            let x = FinitaryMatrix::unit(u, k, l);
            let sx = sigma(s, &x).expect("universe fixed by s");
            let p = x.try_add(&sx.scale(&q(sign))).unwrap();
            groups.entry(unit_weight(&u, k, l)).or_default().push(p);
        }
    }
    groups.into_iter().map(|(w, c)| (w, independent(c))).filter(|(_, c)| !c.is_empty()).collect()
}

/// Root-space basis followed by the Cartan basis, without rank validation.
pub fn simple_basis(letter: Letter, n: usize) -> Vec<(Weight, FinitaryMatrix)> {
    let u = universe_for(letter, n);
    let mut out = Vec::new();
    match letter {
        Letter::A => {
            let mut rv: Vec<(Weight, FinitaryMatrix)> = Vec::new();
            for i in 1..=n {
                for j in 1..=n {
                    if i != j {
                        rv.push((unit_weight(&u, i, j), FinitaryMatrix::unit(u, i, j)));
                    }
                }
            }
            rv.sort_by(|a, b| a.0.cmp(&b.0));
            out.extend(rv);
        }
        _ => {
            let s = StructuralS::new(letter, u).unwrap();
            for (w, vs) in eigen_root_vectors(&s, 1) {
                for v in vs {
                    out.push((w.clone(), v));
                }
            }
        }
    }
    for h in cartan_basis(letter, n) {
        out.push((Weight::zero(), h.finite_matrix(u)));
    }
    out
}

/// `e_ii − e_{i+1,i+1}` for A; `e_ii − e_{n+i,n+i}` for B, C, D.
pub fn cartan_basis(letter: Letter, n: usize) -> Vec<DiagExt> {
    match letter {
        Letter::A => (1..n).map(|i| DiagExt::from_finite([(i, q(1)), (i + 1, q(-1))])).collect(),
        _ => (1..=n).map(|i| DiagExt::from_finite([(i, q(1)), (n + i, q(-1))])).collect(),
    }
}

pub fn basis_of(t: &SimpleType) -> Vec<(Weight, FinitaryMatrix)> {
    simple_basis(t.letter, t.rank)
}

/// `s x = sign · xᵗ s`: `sign = -1` cuts out `o`/`sp`, `sign = +1` cuts out 𝔰.
pub fn satisfies_relation(s: &StructuralS, x: &FinitaryMatrix, sign: i64) -> bool {
    let sm: FinitaryMatrix = s.matrix();
    let lhs = sm.try_mul(x).unwrap();
    let rhs = x.transpose().try_mul(&sm).unwrap().scale(&q(sign));
    lhs == rhs
}

fn root_vector(t: &SimpleType, mu: &Weight) -> Result<FinitaryMatrix> {
    basis_of(t)
        .into_iter()
        .find(|(w, _)| w == mu && !w.is_zero())
        .map(|(_, m)| m)
        .ok_or_else(|| Error::NotARoot(format!("{mu} in {:?}{}", t.letter, t.rank)))
}

/// `μ∨ = [e_μ, f_μ]`, normalized by `μ(μ∨) = 2`; its action on every root
/// vector is checked against the Cartan integers.
pub fn coroot(t: &SimpleType, mu: &Weight) -> Result<DiagExt> {
    let e = root_vector(t, mu)?;
    let f = root_vector(t, &mu.neg())?;
    let (off, h) = mat_bracket(&e, &f)?.split_diagonal();
    let val = mu.eval(&h);
    if !off.is_zero() || val.is_zero() {
        return Err(Error::NotInAlgebra(format!("[e_μ, f_μ] for μ = {mu} is not a usable Cartan element")));
    }
    let h = h.scale(&(q(2) / val));
    for (nu, x) in basis_of(t) {
        if nu.is_zero() {
            continue;
        }
        let want = x.scale(&q(nu.cartan_integer(mu)));
        if crate::matrix::diag_bracket(&h, &x) != want {
            return Err(Error::NotInAlgebra(format!("coroot of {mu} acts wrongly on the {nu} root space")));
        }
    }
    Ok(h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModuleKind {
    NaturalVector,
    SymmetricPart,
}

/// The module 𝔰 over the fixed algebra `g` that fills the odd degrees of a twisted loop algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GradingModule {
    pub kind: ModuleKind,
    pub s: StructuralS,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModuleElement {
    Vector(SparseVec<usize>),
    Matrix(FinitaryMatrix),
}

impl GradingModule {
    /// `𝔰 = F^{2n+1}` over `o_{2n+1}`.
    pub fn natural(n: usize) -> Self {
        let s = StructuralS::new(Letter::B, IndexUniverse::doubled_plus_one(n)).unwrap();
        GradingModule { kind: ModuleKind::NaturalVector, s }
    }

    /// `𝔰 = {x ∈ sl_{2n} | sx = xᵗs}` over `sp_{2n}`.
    pub fn symmetric_c(n: usize) -> Self {
        let s = StructuralS::new(Letter::C, IndexUniverse::doubled(n)).unwrap();
        GradingModule { kind: ModuleKind::SymmetricPart, s }
    }

    /// `𝔰 = {x ∈ sl_{2n+1} | sx = xᵗs}` over `o_{2n+1}`.
    pub fn symmetric_b(n: usize) -> Self {
        let s = StructuralS::new(Letter::B, IndexUniverse::doubled_plus_one(n)).unwrap();
        GradingModule { kind: ModuleKind::SymmetricPart, s }
    }

    pub fn contains(&self, v: &ModuleElement) -> bool {
        match (self.kind, v) {
            (ModuleKind::NaturalVector, ModuleElement::Vector(v)) => v.keys().all(|i| self.s.universe.contains(*i)),
            (ModuleKind::SymmetricPart, ModuleElement::Matrix(m)) => {
                m.universe() == self.s.universe && m.trace().is_zero() && satisfies_relation(&self.s, m, 1)
            }
            _ => false,
        }
    }

    /// Weight basis of 𝔰 (zero weight included).
    pub fn basis(&self) -> Vec<(Weight, ModuleElement)> {
        let u = self.s.universe;
        match self.kind {
            ModuleKind::NaturalVector => u
                .indices()
                .map(|i| {
                    let w = u.epsilon_of(i).map(|(j, c)| Weight::from_coeffs([(j, c)])).unwrap_or_default();
                    (w, ModuleElement::Vector([(i, q(1))].into_iter().collect()))
                })
                .collect(),
            ModuleKind::SymmetricPart => {
                let mut out: Vec<(Weight, ModuleElement)> = eigen_root_vectors(&self.s, -1)
                    .into_iter()
                    .flat_map(|(w, vs)| vs.into_iter().map(move |v| (w.clone(), ModuleElement::Matrix(v))))
                    .collect();
                for d in symmetric_zero_basis(&u) {
                    out.push((Weight::zero(), ModuleElement::Matrix(d.finite_matrix(u))));
                }
                out
            }
        }
    }
}

/// Traceless diagonals in the −1 eigenspace of σ: differences of
/// `e_kk + e_{n+k,n+k}`, plus `e_nn + e_{2n,2n} − 2e_{2n+1,2n+1}` when the universe has an extra index.
pub fn symmetric_zero_basis(u: &IndexUniverse) -> Vec<DiagExt> {
    let n = u.n;
    let pair = |k: usize| DiagExt::from_finite([(k, q(1)), (n + k, q(1))]);
    let mut out: Vec<DiagExt> = (1..n).map(|k| pair(k).sub(&pair(k + 1))).collect();
    if u.size() == 2 * n + 1 {
        out.push(pair(n).sub(&DiagExt::unit(2 * n + 1).scale(&q(2))));
    }
    out
}

/// `x·v` for B^(2), `[x, v]` for the matrix modules.
pub fn module_action(m: &GradingModule, x: &FinitaryMatrix, v: &ModuleElement) -> Result<ModuleElement> {
    if x.universe() != m.s.universe {
        return Err(Error::UniverseMismatch(format!("{} acting on a module over {}", x.universe(), m.s.universe)));
    }
    match (m.kind, v) {
        (ModuleKind::NaturalVector, ModuleElement::Vector(v)) => Ok(ModuleElement::Vector(mat_vec(x, v))),
        (ModuleKind::SymmetricPart, ModuleElement::Matrix(y)) => Ok(ModuleElement::Matrix(mat_bracket(x, y)?)),
        _ => Err(Error::UniverseMismatch("module element of the wrong shape".into())),
    }
}

pub fn mat_vec(x: &FinitaryMatrix, v: &SparseVec<usize>) -> SparseVec<usize> {
    let mut out = SparseVec::new();
    for (i, j, a) in x.entries() {
        if let Some(b) = v.get(&j) {
            crate::linalg::axpy(&mut out, a, &[(i, b.clone())].into_iter().collect());
        }
    }
    out
}

/// `(v, w) = vᵗ s w`.
pub fn d_form(v: &SparseVec<usize>, w: &SparseVec<usize>, s: &StructuralS) -> Rational {
    s.pairing(v, w)
}

/// `D_{v,w}(u) = (w,u)v − (v,u)w`, i.e. `v (sᵗw)ᵗ − w (sᵗv)ᵗ`.
pub fn d_operator(v: &SparseVec<usize>, w: &SparseVec<usize>, s: &StructuralS) -> FinitaryMatrix {
    let st = |x: &SparseVec<usize>| {
        let mut out = SparseVec::new();
        for (c, a) in x {
            let (b, sign) = s.entry_of_row(*c);
            crate::linalg::axpy(&mut out, &q(sign), &[(b, a.clone())].into_iter().collect());
        }
        out
    };
    let (sw, sv) = (st(w), st(v));
    let mut d = FinitaryMatrix::zero(s.universe);
    for (a, va) in v {
        for (b, x) in &sw {
            d.add_entry(*a, *b, va * x);
        }
    }
    for (a, wa) in w {
        for (b, x) in &sv {
            d.add_entry(*a, *b, -(wa * x));
        }
    }
    d
}

/// Dimension of the smallest subspace containing `seeds` and stable under
/// `ad g` for every `g` in `acting` (the action is supplied by `act`).
pub fn closure_dim<T, F>(acting: &[FinitaryMatrix], seeds: Vec<T>, key: impl Fn(&T) -> SparseVec<(usize, usize)>, act: F) -> usize
where
    T: Clone,
    F: Fn(&FinitaryMatrix, &T) -> T,
{
    let mut basis: Vec<SparseVec<(usize, usize)>> = Vec::new();
    let mut frontier = Vec::new();
    for s in seeds {
        let k = key(&s);
        if !k.is_empty() && !Decomposer::new(&basis).contains(&k) {
            basis.push(k);
            frontier.push(s);
        }
    }
    while let Some(x) = frontier.pop() {
        for g in acting {
            let y = act(g, &x);
            let k = key(&y);
            if !k.is_empty() && !Decomposer::new(&basis).contains(&k) {
                basis.push(k);
                frontier.push(y);
            }
        }
    }
    basis.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mk(letter: Letter, n: usize) -> SimpleType {
        SimpleType::new(letter, n).unwrap()
    }

    fn vkey(v: &ModuleElement) -> SparseVec<(usize, usize)> {
        match v {
            ModuleElement::Vector(v) => v.iter().map(|(i, a)| ((*i, 0), a.clone())).collect(),
            ModuleElement::Matrix(m) => mat_key_vec(m),
        }
    }

    #[test]
    fn dimensions_match_formulas() {
        for (l, n) in [(Letter::A, 2), (Letter::A, 4), (Letter::B, 2), (Letter::B, 3), (Letter::C, 2), (Letter::C, 3), (Letter::D, 3), (Letter::D, 4)] {
            let t = mk(l, n);
            let b = basis_of(&t);
            assert_eq!(b.len(), t.dim(), "{l}{n}");
            let nroots = b.iter().filter(|(w, _)| !w.is_zero()).count();
            assert_eq!(nroots, roots(t.root_kind(), n).len());
            // every root space one-dimensional
            let mut ws: Vec<_> = b.iter().filter(|(w, _)| !w.is_zero()).map(|(w, _)| w.clone()).collect();
            ws.dedup();
            assert_eq!(ws.len(), nroots);
        }
    }

    #[test]
    fn c2_root_lengths() {
        let b = basis_of(&mk(Letter::C, 2));
        let long = b.iter().filter(|(w, _)| !w.is_zero() && root_length(RootKind::C, 2, w).unwrap() == RootLengthClass::Long).count();
        assert_eq!(long, 4);
        assert_eq!(b.len(), 10);
    }

    #[test]
    fn defining_relations_hold() {
        for (l, n) in [(Letter::B, 2), (Letter::C, 3), (Letter::D, 3)] {
            let t = mk(l, n);
            let s = StructuralS::new(l, t.universe()).unwrap();
            for (_, x) in basis_of(&t) {
                assert!(satisfies_relation(&s, &x, -1), "{l}{n}: {x:?}");
                assert!(x.trace().is_zero());
            }
        }
    }

    #[test]
    fn coroots() {
        let a2 = mk(Letter::A, 2);
        let h = coroot(&a2, &Weight::parse("ε1-ε2").unwrap()).unwrap();
        assert_eq!(h, DiagExt::from_finite([(1, q(1)), (2, q(-1))]));
        let c2 = mk(Letter::C, 2);
        let h = coroot(&c2, &Weight::parse("2ε1").unwrap()).unwrap();
        let x = root_vector(&c2, &Weight::parse("ε1-ε2").unwrap()).unwrap();
        assert_eq!(crate::matrix::diag_bracket(&h, &x), x);
        assert!(coroot(&c2, &Weight::parse("ε1").unwrap()).is_err());
    }

    #[test]
    fn length_classes() {
        let e1 = Weight::eps(1);
        assert_eq!(root_length(RootKind::BC, 2, &e1).unwrap(), RootLengthClass::Short);
        assert_eq!(root_length(RootKind::BC, 2, &e1.scale(2)).unwrap(), RootLengthClass::ExtraLong);
        assert_eq!(root_length(RootKind::BC, 2, &Weight::parse("ε1+ε2").unwrap()).unwrap(), RootLengthClass::Long);
        assert_eq!(root_length(RootKind::A, 3, &Weight::parse("ε1-ε2").unwrap()).unwrap(), RootLengthClass::Short);
        assert!(root_length(RootKind::A, 3, &e1).is_err());
        assert_eq!(root_length(RootKind::BC, 1, &e1.scale(2)).unwrap(), RootLengthClass::ExtraLong);
        assert_eq!(root_length(RootKind::C, 1, &e1.scale(2)).unwrap(), RootLengthClass::Long);
        assert!(!is_reduced_root(RootKind::BC, 2, &e1.scale(2)));
        assert!(is_reduced_root(RootKind::BC, 2, &e1));
    }

    #[test]
    fn weight_text_roundtrip() {
        for s in ["0", "ε1-ε2", "2ε1", "-ε1-ε3", "-2ε2"] {
            assert_eq!(Weight::parse(s).unwrap().to_string(), s);
        }
        assert!(Weight::parse("x1").is_err());
    }

    #[test]
    fn rank_floors() {
        assert!(SimpleType::new(Letter::A, 1).is_err());
        assert!(SimpleType::new(Letter::B, 1).is_err());
        assert!(SimpleType::new(Letter::D, 2).is_err());
    }

    #[test]
    fn module_dimensions() {
        // C^(2): dim 𝔰 = 2n²−n−1; BC^(2): 2n²+3n; B^(2): 2n+1
        for n in 2..=3 {
            assert_eq!(GradingModule::symmetric_c(n).basis().len(), 2 * n * n - n - 1);
            assert_eq!(GradingModule::symmetric_b(n).basis().len(), 2 * n * n + 3 * n);
            assert_eq!(GradingModule::natural(n).basis().len(), 2 * n + 1);
        }
        for m in [GradingModule::symmetric_c(2), GradingModule::symmetric_b(2), GradingModule::natural(2)] {
            for (_, v) in m.basis() {
                assert!(m.contains(&v));
            }
        }
    }

    #[test]
    fn natural_action_on_o3() {
        // o_3 on Doubled+1(1): indices 1, 2 paired, 3 the extra one.
        let m = GradingModule::natural(1);
        let x = basis_of_unchecked(Letter::B, 1).into_iter().find(|(w, _)| *w == Weight::eps(1)).unwrap().1;
        // the ε1 root vector is e_13 − e_32 (made primitive)
        assert_eq!(x, FinitaryMatrix::from_triplets(m.s.universe, [(1, 3, q(1)), (3, 2, q(-1))]).unwrap());
        let v = ModuleElement::Vector([(3, q(1))].into_iter().collect());
        assert_eq!(module_action(&m, &x, &v).unwrap(), ModuleElement::Vector([(1, q(1))].into_iter().collect()));
        let v2 = ModuleElement::Vector([(2, q(1))].into_iter().collect());
        assert_eq!(module_action(&m, &x, &v2).unwrap(), ModuleElement::Vector([(3, q(-1))].into_iter().collect()));
    }

    fn basis_of_unchecked(l: Letter, n: usize) -> Vec<(Weight, FinitaryMatrix)> {
        simple_basis(l, n)
    }

    #[test]
    fn module_closures() {
        for m in [GradingModule::symmetric_c(2), GradingModule::symmetric_b(2), GradingModule::natural(2)] {
            let g: Vec<FinitaryMatrix> = simple_basis(m.s.letter, m.s.universe.n).into_iter().map(|(_, x)| x).collect();
            let basis = m.basis();
            for (_, v) in &basis {
                for x in &g {
                    assert!(m.contains(&module_action(&m, x, v).unwrap()));
                }
            }
            // 𝔰 is irreducible: any single weight vector generates all of it
            for (_, v) in basis.iter().step_by(3) {
                let d = closure_dim(&g, vec![v.clone()], vkey, |x, y| module_action(&m, x, y).unwrap());
                assert_eq!(d, basis.len());
            }
        }
    }

    #[test]
    fn symmetric_part_brackets_into_g() {
        let m = GradingModule::symmetric_c(2);
        let basis = m.basis();
        for (_, a) in &basis {
            for (_, b) in &basis {
                let (ModuleElement::Matrix(a), ModuleElement::Matrix(b)) = (a, b) else { unreachable!() };
                let c = mat_bracket(a, b).unwrap();
                assert!(satisfies_relation(&m.s, &c, -1));
            }
        }
    }

    #[test]
    fn d_operator_properties() {
        let s = StructuralS::new(Letter::B, IndexUniverse::doubled_plus_one(1)).unwrap();
        let e = |i: usize| -> SparseVec<usize> { [(i, q(1))].into_iter().collect() };
        // oracle: D_{e1,e3}(u) = (e3,u) e1 − (e1,u) e3, evaluated on each basis vector
        let d = d_operator(&e(1), &e(3), &s);
        for u in 1..=3 {
            let col = mat_vec(&d, &e(u));
            let mut want = SparseVec::new();
            crate::linalg::axpy(&mut want, &d_form(&e(3), &e(u), &s), &e(1));
            crate::linalg::axpy(&mut want, &-d_form(&e(1), &e(u), &s), &e(3));
            assert_eq!(col, want);
        }
        assert_eq!(d, FinitaryMatrix::from_triplets(s.universe, [(1, 3, q(1)), (3, 2, q(-1))]).unwrap());
        assert!(d_operator(&e(2), &e(2), &s).is_zero());
        assert_eq!(d_operator(&e(3), &e(1), &s), d.neg());
        assert!(satisfies_relation(&s, &d, -1));
    }

    #[test]
    fn d_operators_span_o() {
        for n in 1..=2 {
            let s = StructuralS::new(Letter::B, IndexUniverse::doubled_plus_one(n)).unwrap();
            let e = |i: usize| -> SparseVec<usize> { [(i, q(1))].into_iter().collect() };
            let ds: Vec<_> = s
                .universe
                .indices()
                .flat_map(|i| s.universe.indices().map(move |j| (i, j)))
                .map(|(i, j)| mat_key_vec(&d_operator(&e(i), &e(j), &s)))
                .collect();
            assert_eq!(crate::linalg::rank_of(&ds), n * (2 * n + 1));
        }
    }

    #[test]
    fn single_root_space_generates_g() {
        for (l, n) in [(Letter::A, 3), (Letter::B, 2), (Letter::C, 3), (Letter::D, 3)] {
            let b = simple_basis(l, n);
            let g: Vec<FinitaryMatrix> = b.iter().map(|(_, x)| x.clone()).collect();
            for (w, x) in b.iter().filter(|(w, _)| !w.is_zero()).step_by(2) {
                let d = closure_dim(&g, vec![x.clone()], mat_key_vec, |a, y| mat_bracket(a, y).unwrap());
                assert_eq!(d, g.len(), "{l}{n} from {w}");
            }
        }
    }
}
