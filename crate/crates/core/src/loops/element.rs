//! Loop algebra types and graded elements.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::exact::{q, rational_from_json, rational_json, LaurentPoly, Rational};
use crate::linalg::{axpy, SparseVec};
use crate::matrix::{
    diag_bracket, mat_bracket, sigma, sigma_diag, tau, tau_diag, DiagExt, FinitaryMatrix, IndexUniverse, Letter,
    StructuralS,
};
use crate::simple::{d_operator, universe_for, GradingModule, ModuleKind, RootKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LoopTag {
    A1,
    B1,
    C1,
    D1,
    B2,
    C2,
    BC2,
}

impl LoopTag {
    pub const ALL: [LoopTag; 7] = [LoopTag::A1, LoopTag::B1, LoopTag::C1, LoopTag::D1, LoopTag::B2, LoopTag::C2, LoopTag::BC2];

    pub fn is_twisted(&self) -> bool {
        matches!(self, LoopTag::B2 | LoopTag::C2 | LoopTag::BC2)
    }

    /// Letter of the degree-zero algebra `g`.
    pub fn g_letter(&self) -> Letter {
        match self {
            LoopTag::A1 => Letter::A,
            LoopTag::B1 | LoopTag::B2 | LoopTag::BC2 => Letter::B,
            LoopTag::C1 | LoopTag::C2 => Letter::C,
            LoopTag::D1 => Letter::D,
        }
    }

    /// The root system grading the algebra.
    pub fn root_kind(&self) -> RootKind {
        match self {
            LoopTag::A1 => RootKind::A,
            LoopTag::B1 | LoopTag::B2 => RootKind::B,
            LoopTag::C1 | LoopTag::C2 => RootKind::C,
            LoopTag::D1 => RootKind::D,
            LoopTag::BC2 => RootKind::BC,
        }
    }

    pub fn min_rank(&self) -> usize {
        match self {
            LoopTag::A1 => 2,
            LoopTag::D1 => 3,
            _ => 1,
        }
    }
}

impl fmt::Display for LoopTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for LoopTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        LoopTag::ALL
            .into_iter()
            .find(|t| t.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidType(format!("{s:?} (expected one of A1, B1, C1, D1, B2, C2, BC2)")))
    }
}

/// Which part of a twisted algebra lives in a given degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    G,
    S,
}

/// One of the seven locally loop algebras truncated to rank `n` and degrees `|k| ≤ window`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LoopType {
    pub tag: LoopTag,
    pub rank: usize,
    pub window: i32,
    universe: IndexUniverse,
    ambient: bool,
}

impl LoopType {
    pub fn new(tag: LoopTag, rank: usize, window: i32) -> Result<Self> {
        if rank < tag.min_rank() {
            return Err(Error::InvalidRank {
                what: tag.to_string(),
                rank,
                reason: format!("need rank >= {}", tag.min_rank()),
            });
        }
        if window < 0 {
            return Err(Error::InvalidType(format!("window must be nonnegative, got {window}")));
        }
        Ok(LoopType { tag, rank, window, universe: universe_for(tag.g_letter(), rank), ambient: false })
    }

    /// `sl` of an arbitrary universe (used to twist `sl_{2n}`, `sl_{2n+1}` by σ̂).
    pub fn a1_over(universe: IndexUniverse, window: i32) -> Result<Self> {
        let mut t = LoopType::new(LoopTag::A1, universe.size(), window)?;
        t.universe = universe;
        Ok(t)
    }

    /// For a twisted type: the untwisted algebra `(g ⊕ 𝔰) ⊗ F[t^±1]` containing it.
    pub fn ambient(&self) -> Self {
        assert!(self.tag.is_twisted(), "{} is untwisted", self.tag);
        LoopType { ambient: true, ..*self }
    }

    pub fn is_ambient(&self) -> bool {
        self.ambient
    }

    pub fn with_window(&self, window: i32) -> Self {
        LoopType { window, ..*self }
    }

    pub fn universe(&self) -> IndexUniverse {
        self.universe
    }

    pub fn in_window(&self, k: i32) -> bool {
        k.abs() <= self.window
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        -self.window..=self.window
    }

    pub fn structural_s(&self) -> Option<StructuralS> {
        match self.tag.g_letter() {
            Letter::A => None,
            l => Some(StructuralS::new(l, self.universe).unwrap()),
        }
    }

    pub fn module(&self) -> Option<GradingModule> {
        match self.tag {
            LoopTag::B2 => Some(GradingModule::natural(self.rank)),
            LoopTag::C2 => Some(GradingModule::symmetric_c(self.rank)),
            LoopTag::BC2 => Some(GradingModule::symmetric_b(self.rank)),
            _ => None,
        }
    }

    fn has_vectors(&self) -> bool {
        self.module().is_some_and(|m| m.kind == ModuleKind::NaturalVector)
    }

    /// Components present in degree `k`.
    pub fn components(&self, k: i32) -> Vec<Component> {
        if !self.tag.is_twisted() {
            vec![Component::G]
        } else if self.ambient {
            vec![Component::G, Component::S]
        } else if k.rem_euclid(2) == 0 {
            vec![Component::G]
        } else {
            vec![Component::S]
        }
    }

    /// The generator `e'` of the diagonal complement `T'` of the Cartan part in degree `k`, if any:
    /// `e_NN` for A-type, `e_nn + e_{2n,2n}` in odd degrees of C2 and BC2.
    pub fn complement_generator(&self, k: i32) -> Option<DiagExt> {
        let n = self.universe.n;
        match self.tag {
            LoopTag::A1 => Some(DiagExt::unit(self.universe.size())),
            LoopTag::C2 | LoopTag::BC2 if !self.ambient && k.rem_euclid(2) == 1 => {
                Some(DiagExt::from_finite([(n, q(1)), (2 * n, q(1))]))
            }
            _ => None,
        }
    }

    pub fn descriptor(&self) -> Value {
        json!({ "type": self.tag.to_string(), "rank": self.rank, "window": self.window })
    }
}

/// The data of one t-degree: an off-diagonal matrix, a diagonal (with ι part)
/// and, for B^(2), a vector of the natural module.
#[derive(Clone, Debug, PartialEq)]
pub struct Fiber {
    pub matrix: FinitaryMatrix,
    pub diag: DiagExt,
    pub vector: SparseVec<usize>,
}

impl Fiber {
    pub fn zero(u: IndexUniverse) -> Self {
        Fiber { matrix: FinitaryMatrix::zero(u), diag: DiagExt::zero(), vector: SparseVec::new() }
    }

    /// Splits the diagonal of `m` into the diagonal part.
    pub fn from_matrix(m: &FinitaryMatrix) -> Self {
        let (matrix, diag) = m.split_diagonal();
        Fiber { matrix, diag, vector: SparseVec::new() }
    }

    pub fn from_diag(u: IndexUniverse, d: DiagExt) -> Self {
        Fiber { diag: d, ..Fiber::zero(u) }
    }

    pub fn from_vector(u: IndexUniverse, v: SparseVec<usize>) -> Self {
        Fiber { vector: v, ..Fiber::zero(u) }
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero() && self.diag.is_zero() && self.vector.is_empty()
    }

    pub fn add(&self, o: &Fiber) -> Fiber {
        let (m, d) = self.matrix.try_add(&o.matrix).expect("fibers share a universe").split_diagonal();
        debug_assert!(d.is_zero());
        let mut v = self.vector.clone();
        axpy(&mut v, &Rational::one(), &o.vector);
        Fiber { matrix: m, diag: self.diag.add(&o.diag), vector: v }
    }

    pub fn scale(&self, c: &Rational) -> Fiber {
        let mut v = SparseVec::new();
        axpy(&mut v, c, &self.vector);
        Fiber { matrix: self.matrix.scale(c), diag: self.diag.scale(c), vector: v }
    }

    /// Off-diagonal plus finite diagonal part, as one matrix.
    pub fn full_matrix(&self) -> FinitaryMatrix {
        self.matrix.try_add(&self.diag.finite_matrix(self.matrix.universe())).unwrap()
    }

    fn act_on_vector(&self, v: &SparseVec<usize>) -> SparseVec<usize> {
        let mut out = crate::simple::mat_vec(&self.matrix, v);
        for (i, a) in v {
            let c = self.diag.value_at(*i) * a;
            axpy(&mut out, &c, &[(*i, Rational::one())].into_iter().collect());
        }
        out
    }

    fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("matrix".into(), self.matrix.to_json());
        m.insert("diag".into(), self.diag.to_json());
        if !self.vector.is_empty() {
            let v: Map<String, Value> = self.vector.iter().map(|(i, a)| (i.to_string(), rational_json(a))).collect();
            m.insert("vector".into(), Value::Object(v));
        }
        Value::Object(m)
    }

    fn from_json(u: IndexUniverse, v: &Value) -> Result<Fiber> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("fiber must be an object".into()))?;
        for k in obj.keys() {
            if !["matrix", "diag", "vector"].contains(&k.as_str()) {
                return Err(Error::Parse(format!("unknown fiber field {k:?}")));
            }
        }
        let mut f = match obj.get("matrix") {
            Some(m) => Fiber::from_matrix(&FinitaryMatrix::from_json(u, m)?),
            None => Fiber::zero(u),
        };
        if let Some(d) = obj.get("diag") {
            f.diag = f.diag.add(&DiagExt::from_json(d)?);
        }
        if let Some(vec) = obj.get("vector") {
            let vec = vec.as_object().ok_or_else(|| Error::Parse("\"vector\" must be an object".into()))?;
            for (i, a) in vec {
                let i: usize = i.parse().map_err(|_| Error::Parse(format!("bad index {i:?}")))?;
                if !u.contains(i) {
                    return Err(Error::IndexOutOfRange { index: i, size: u.size() });
                }
                axpy(&mut f.vector, &rational_from_json(a)?, &[(i, Rational::one())].into_iter().collect());
            }
        }
        Ok(f)
    }
}

/// `[a, b]` inside one fiber algebra. For the natural module of B^(2):
/// `[x + v, y + w] = [x, y] + D_{v,w} + (xw − yv)`.
pub fn fiber_bracket(ty: &LoopType, a: &Fiber, b: &Fiber) -> Fiber {
    let u = ty.universe();
    let mut m = mat_bracket(&a.matrix, &b.matrix).expect("fibers share a universe");
    m = m.try_add(&diag_bracket(&a.diag, &b.matrix)).unwrap();
    m = m.try_add(&diag_bracket(&b.diag, &a.matrix).neg()).unwrap();
    let mut vector = SparseVec::new();
    if ty.has_vectors() && !(a.vector.is_empty() && b.vector.is_empty()) {
        let s = ty.structural_s().unwrap();
        m = m.try_add(&d_operator(&a.vector, &b.vector, &s)).unwrap();
        vector = a.act_on_vector(&b.vector);
        axpy(&mut vector, &-Rational::one(), &b.act_on_vector(&a.vector));
    }
    let mut f = Fiber::from_matrix(&m);
    f.vector = vector;
    debug_assert_eq!(f.matrix.universe(), u);
    f
}

/// An element of `(g + T) ⊗ F[t^±1] ⊕ Fc ⊕ Fd⁰`, stored degree by degree.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedElement {
    universe: IndexUniverse,
    body: BTreeMap<i32, Fiber>,
    central: Rational,
    deriv: Rational,
}

impl GradedElement {
    pub fn zero(ty: &LoopType) -> Self {
        Self::zero_on(ty.universe())
    }

    pub fn zero_on(universe: IndexUniverse) -> Self {
        GradedElement { universe, body: BTreeMap::new(), central: Rational::zero(), deriv: Rational::zero() }
    }

    pub fn homogeneous(ty: &LoopType, k: i32, f: Fiber) -> Self {
        let mut x = Self::zero(ty);
        x.add_fiber(k, f);
        x
    }

    pub fn from_matrix(ty: &LoopType, m: &FinitaryMatrix, k: i32) -> Self {
        Self::homogeneous(ty, k, Fiber::from_matrix(m))
    }

    pub fn unit(ty: &LoopType, i: usize, j: usize, k: i32) -> Self {
        Self::from_matrix(ty, &FinitaryMatrix::unit(ty.universe(), i, j), k)
    }

    pub fn diag(ty: &LoopType, p: DiagExt, k: i32) -> Self {
        Self::homogeneous(ty, k, Fiber::from_diag(ty.universe(), p))
    }

    pub fn vector(ty: &LoopType, v: SparseVec<usize>, k: i32) -> Self {
        Self::homogeneous(ty, k, Fiber::from_vector(ty.universe(), v))
    }

    /// The central element `c`.
    pub fn c(ty: &LoopType) -> Self {
        GradedElement { central: Rational::one(), ..Self::zero(ty) }
    }

    /// The degree derivation `d⁰`.
    pub fn d(ty: &LoopType) -> Self {
        GradedElement { deriv: Rational::one(), ..Self::zero(ty) }
    }

    pub fn universe(&self) -> IndexUniverse {
        self.universe
    }

    pub fn body(&self) -> &BTreeMap<i32, Fiber> {
        &self.body
    }

    pub fn fiber(&self, k: i32) -> Option<&Fiber> {
        self.body.get(&k)
    }

    pub fn central(&self) -> &Rational {
        &self.central
    }

    pub fn deriv(&self) -> &Rational {
        &self.deriv
    }

    pub fn set_central(&mut self, c: Rational) {
        self.central = c;
    }

    pub fn set_deriv(&mut self, d: Rational) {
        self.deriv = d;
    }

    pub fn degrees(&self) -> impl Iterator<Item = i32> + '_ {
        self.body.keys().copied()
    }

    pub fn add_fiber(&mut self, k: i32, f: Fiber) {
        if f.is_zero() {
            return;
        }
        let new = match self.body.remove(&k) {
            Some(old) => old.add(&f),
            None => f,
        };
        if !new.is_zero() {
            self.body.insert(k, new);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.body.is_empty() && self.central.is_zero() && self.deriv.is_zero()
    }

    /// The loop part only (no `c`, no `d⁰`).
    pub fn loop_part(&self) -> Self {
        GradedElement { central: Rational::zero(), deriv: Rational::zero(), ..self.clone() }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (k, f) in &o.body {
            out.add_fiber(*k, f.clone());
        }
        out.central += &o.central;
        out.deriv += &o.deriv;
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero_on(self.universe);
        }
        GradedElement {
            universe: self.universe,
            body: self.body.iter().map(|(k, f)| (*k, f.scale(c))).collect(),
            central: &self.central * c,
            deriv: &self.deriv * c,
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// `d⁰` applied to the loop part: `x ⊗ t^k ↦ k x ⊗ t^k`.
    pub fn apply_d0(&self) -> Self {
        let mut out = Self::zero_on(self.universe);
        for (k, f) in &self.body {
            out.add_fiber(*k, f.scale(&q(*k as i64)));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (k, f) in &self.body {
            m.insert(k.to_string(), f.to_json());
        }
        m.insert("c".into(), rational_json(&self.central));
        m.insert("d".into(), rational_json(&self.deriv));
        Value::Object(m)
    }

    /// Parses the JSON form; degrees are checked against the window.
    pub fn from_json(ty: &LoopType, v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("element must be a JSON object".into()))?;
        let mut x = Self::zero(ty);
        let mut outside = Vec::new();
        for (key, val) in obj {
            match key.as_str() {
                "c" => x.central = rational_from_json(val)?,
                "d" => x.deriv = rational_from_json(val)?,
                k => {
                    let k: i32 = k.parse().map_err(|_| Error::Parse(format!("unknown key {k:?}")))?;
                    if !ty.in_window(k) {
                        outside.push(k);
                    }
                    x.add_fiber(k, Fiber::from_json(ty.universe(), val)?);
                }
            }
        }
        if !outside.is_empty() {
            return Err(Error::WindowOverflow { degrees: outside, window: ty.window });
        }
        Ok(x)
    }
}

fn check_window(ty: &LoopType, degrees: impl IntoIterator<Item = i32>) -> Result<()> {
    let mut bad: Vec<i32> = degrees.into_iter().filter(|k| !ty.in_window(*k)).collect();
    bad.sort();
    bad.dedup();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::WindowOverflow { degrees: bad, window: ty.window })
    }
}

/// The loop bracket `[x ⊗ t^m, y ⊗ t^n] = [x, y] ⊗ t^{m+n}`, with `d⁰`
/// acting by degree. No cocycle term: see [`crate::forms::extended_bracket`].
pub fn loop_bracket(ty: &LoopType, x: &GradedElement, y: &GradedElement) -> Result<GradedElement> {
    check_window(ty, x.body.keys().flat_map(|m| y.body.keys().map(move |n| m + n)))?;
    let mut out = GradedElement::zero(ty);
    for (m, a) in &x.body {
        for (n, b) in &y.body {
            out.add_fiber(m + n, fiber_bracket(ty, a, b));
        }
    }
    if !x.deriv.is_zero() {
        out = out.add(&y.loop_part().apply_d0().scale(&x.deriv));
    }
    if !y.deriv.is_zero() {
        out = out.sub(&x.loop_part().apply_d0().scale(&y.deriv));
    }
    Ok(out)
}

/// `s_m(x ⊗ t^k) = x ⊗ t^{k+m}` on the loop part. Odd shifts of a twisted
/// algebra leave it, so they are refused here (see [`shift_unchecked`]).
pub fn shift(ty: &LoopType, m: i32, x: &GradedElement) -> Result<GradedElement> {
    if ty.tag.is_twisted() && !ty.is_ambient() && m % 2 != 0 {
        return Err(Error::NotInAlgebra(format!("odd shift s_{m} does not preserve {}", ty.tag)));
    }
    shift_unchecked(ty, m, x)
}

pub fn shift_unchecked(ty: &LoopType, m: i32, x: &GradedElement) -> Result<GradedElement> {
    check_window(ty, x.body.keys().map(|k| k + m))?;
    let mut out = GradedElement::zero(ty);
    for (k, f) in &x.body {
        out.add_fiber(k + m, f.clone());
    }
    Ok(out)
}

/// `σ̂(x ⊗ t^m) = (±1)^m σ(x) ⊗ t^m` on `sl` of a doubled universe; with
/// `twisted = false` the sign is dropped. Fixes `c` and `d⁰`.
pub fn hat_sigma(ty: &LoopType, letter: Letter, twisted: bool, x: &GradedElement) -> Result<GradedElement> {
    let s = StructuralS::new(letter, ty.universe())?;
    let mut out = GradedElement { central: x.central.clone(), deriv: x.deriv.clone(), ..GradedElement::zero(ty) };
    for (k, f) in &x.body {
        let sign = if twisted && k.rem_euclid(2) == 1 { -Rational::one() } else { Rational::one() };
        let mut g = Fiber::from_matrix(&sigma(&s, &f.matrix)?);
        g.diag = g.diag.add(&sigma_diag(&s, &f.diag)?);
        out.add_fiber(*k, g.scale(&sign));
    }
    Ok(out)
}

/// `τ̂(x ⊗ t^m) = (−1)^m τ(x) ⊗ t^m` on `o_{2n+2}` loops.
pub fn hat_tau(ty: &LoopType, x: &GradedElement) -> Result<GradedElement> {
    if ty.tag != LoopTag::D1 {
        return Err(Error::InvalidType(format!("τ̂ is defined on D1, not {}", ty.tag)));
    }
    let mut out = GradedElement { central: x.central.clone(), deriv: x.deriv.clone(), ..GradedElement::zero(ty) };
    for (k, f) in &x.body {
        let sign = if k.rem_euclid(2) == 1 { -Rational::one() } else { Rational::one() };
        let mut g = Fiber::from_matrix(&tau(&f.matrix)?);
        g.diag = g.diag.add(&tau_diag(&ty.universe(), &f.diag)?);
        out.add_fiber(*k, g.scale(&sign));
    }
    Ok(out)
}

/// Inclusion of the rank-`n` truncation into the rank-`n'` one.
#[derive(Clone, Copy, Debug)]
pub struct Embedding {
    pub source: LoopType,
    pub target: LoopType,
}

impl Embedding {
    pub fn new(source: LoopType, target: LoopType) -> Result<Self> {
        if source.tag != target.tag || source.universe.kind != target.universe.kind {
            return Err(Error::UniverseMismatch(format!("cannot embed {} into {}", source.tag, target.tag)));
        }
        if target.rank < source.rank || target.window < source.window {
            return Err(Error::InvalidRank {
                what: "embedding target".into(),
                rank: target.rank,
                reason: "target must be at least as large as the source".into(),
            });
        }
        Ok(Embedding { source, target })
    }

    pub fn index(&self, i: usize) -> usize {
        self.source.universe.embed_index(i, &self.target.universe)
    }
}

pub fn embed(e: &Embedding, x: &GradedElement) -> GradedElement {
    let tu = e.target.universe();
    let mut out = GradedElement { central: x.central.clone(), deriv: x.deriv.clone(), ..GradedElement::zero(&e.target) };
    for (k, f) in &x.body {
        let mut g = Fiber::zero(tu);
        for (i, j, v) in f.matrix.entries() {
            g.matrix.add_entry(e.index(i), e.index(j), v.clone());
        }
        let mut d = DiagExt::zero().with_scalar(f.diag.scalar().clone());
        for (i, v) in f.diag.finite() {
            d.add_finite(e.index(*i), v.clone());
        }
        g.diag = d;
        g.vector = f.vector.iter().map(|(i, v)| (e.index(*i), v.clone())).collect();
        out.add_fiber(*k, g);
    }
    out
}

/// Rewrites a matrix-type loop element as a matrix over `F[t^±1]`.
pub fn to_laurent_matrix(x: &GradedElement) -> Result<FinitaryMatrix<LaurentPoly>> {
    let mut m = FinitaryMatrix::zero(x.universe);
    for (k, f) in &x.body {
        if !f.vector.is_empty() || !f.diag.scalar().is_zero() {
            return Err(Error::NotInAlgebra("only finite matrix parts have a Laurent-matrix form".into()));
        }
        for (i, j, v) in f.full_matrix().entries() {
            m.add_entry(i, j, LaurentPoly::monomial(v.clone(), *k));
        }
    }
    Ok(m)
}

pub fn from_laurent_matrix(ty: &LoopType, m: &FinitaryMatrix<LaurentPoly>) -> GradedElement {
    let mut out = GradedElement::zero(ty);
    for (i, j, p) in m.entries() {
        for (k, c) in p.terms() {
            let mut unit = FinitaryMatrix::zero(ty.universe());
            unit.add_entry(i, j, c.clone());
            out.add_fiber(k, Fiber::from_matrix(&unit));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::frac;

    fn a1(n: usize, k: i32) -> LoopType {
        LoopType::new(LoopTag::A1, n, k).unwrap()
    }

    #[test]
    fn tags_parse() {
        for t in LoopTag::ALL {
            assert_eq!(t.to_string().parse::<LoopTag>().unwrap(), t);
        }
        assert!(matches!("X9".parse::<LoopTag>(), Err(Error::InvalidType(_))));
    }

    #[test]
    fn tensor_bracket_cancels_degrees() {
        let ty = a1(2, 3);
        let x = GradedElement::unit(&ty, 1, 2, 1);
        let y = GradedElement::unit(&ty, 2, 1, -1);
        let h = GradedElement::diag(&ty, DiagExt::from_finite([(1, q(1)), (2, q(-1))]), 0);
        assert_eq!(loop_bracket(&ty, &x, &y).unwrap(), h);
    }

    #[test]
    fn d0_acts_by_degree() {
        let ty = a1(2, 3);
        let x = GradedElement::unit(&ty, 1, 2, 3);
        let d = GradedElement::d(&ty);
        assert_eq!(loop_bracket(&ty, &d, &x).unwrap(), x.scale(&q(3)));
        assert_eq!(loop_bracket(&ty, &x, &d).unwrap(), x.scale(&q(-3)));
    }

    #[test]
    fn overflow_is_an_error() {
        let ty = a1(2, 2);
        let x = GradedElement::unit(&ty, 1, 2, 2);
        let y = GradedElement::unit(&ty, 2, 1, 1);
        assert_eq!(loop_bracket(&ty, &x, &y), Err(Error::WindowOverflow { degrees: vec![3], window: 2 }));
        assert!(shift(&ty, 1, &x).is_err());
    }

    #[test]
    fn b2_vector_bracket() {
        let ty = LoopType::new(LoopTag::B2, 1, 3).unwrap();
        let s = ty.structural_s().unwrap();
        let e = |i: usize| -> SparseVec<usize> { [(i, q(1))].into_iter().collect() };
        for (a, b) in [(1, 3), (1, 2), (3, 2)] {
            let x = GradedElement::vector(&ty, e(a), 1);
            let y = GradedElement::vector(&ty, e(b), 1);
            let want = GradedElement::from_matrix(&ty, &d_operator(&e(a), &e(b), &s), 2);
            assert_eq!(loop_bracket(&ty, &x, &y).unwrap(), want);
        }
    }

    #[test]
    fn b2_module_action_in_bracket() {
        let ty = LoopType::new(LoopTag::B2, 1, 3).unwrap();
        // ε1 root vector of o_3 is e13 − e32; it sends e3 to e1
        let x = FinitaryMatrix::from_triplets(ty.universe(), [(1, 3, q(1)), (3, 2, q(-1))]).unwrap();
        let xe = GradedElement::from_matrix(&ty, &x, 0);
        let v = GradedElement::vector(&ty, [(3, q(1))].into_iter().collect(), 1);
        let want = GradedElement::vector(&ty, [(1, q(1))].into_iter().collect(), 1);
        assert_eq!(loop_bracket(&ty, &xe, &v).unwrap(), want);
        assert_eq!(loop_bracket(&ty, &v, &xe).unwrap(), want.neg());
    }

    #[test]
    fn hat_sigma_on_sp() {
        let u = IndexUniverse::doubled(2);
        let ty = LoopType::a1_over(u, 3).unwrap();
        let s = StructuralS::new(Letter::C, u).unwrap();
        // e_{1,3} is in sp (fixed by σ_C)
        let x = FinitaryMatrix::unit(u, 1, 3);
        assert_eq!(sigma(&s, &x).unwrap(), x);
        let even = GradedElement::from_matrix(&ty, &x, 2);
        let odd = GradedElement::from_matrix(&ty, &x, 1);
        assert_eq!(hat_sigma(&ty, Letter::C, true, &even).unwrap(), even);
        assert_eq!(hat_sigma(&ty, Letter::C, true, &odd).unwrap(), odd.neg());
        let mixed = even.add(&GradedElement::unit(&ty, 2, 1, -1)).add(&GradedElement::c(&ty));
        let back = hat_sigma(&ty, Letter::C, true, &hat_sigma(&ty, Letter::C, true, &mixed).unwrap()).unwrap();
        assert_eq!(back, mixed);
    }

    #[test]
    fn shifts() {
        let ty = a1(3, 3);
        let x = GradedElement::unit(&ty, 1, 2, 1).add(&GradedElement::unit(&ty, 3, 1, -1)).add(&GradedElement::c(&ty));
        assert_eq!(shift(&ty, 0, &x).unwrap(), x.loop_part());
        assert_eq!(shift(&ty, -2, &shift(&ty, 2, &x).unwrap()).unwrap(), x.loop_part());
        let c2 = LoopType::new(LoopTag::C2, 2, 3).unwrap();
        assert!(shift(&c2, 1, &GradedElement::zero(&c2)).is_err());
    }

    #[test]
    fn embedding_respects_blocks() {
        let s = LoopType::new(LoopTag::C2, 2, 2).unwrap();
        let t = LoopType::new(LoopTag::C2, 3, 2).unwrap();
        let e = Embedding::new(s, t).unwrap();
        assert_eq!((1..=4).map(|i| e.index(i)).collect::<Vec<_>>(), vec![1, 2, 4, 5]);
        let x = GradedElement::unit(&s, 1, 4, 0).add(&GradedElement::diag(&s, DiagExt::unit(3).with_scalar(q(1)), 1));
        let y = embed(&e, &x);
        assert_eq!(y.fiber(0).unwrap().matrix.get(1, 5), q(1));
        assert_eq!(y.fiber(1).unwrap().diag, DiagExt::unit(4).with_scalar(q(1)));
        assert!(Embedding::new(t, s).is_err());
    }

    #[test]
    fn laurent_matrix_route() {
        let ty = a1(2, 4);
        let x = GradedElement::unit(&ty, 1, 2, 1).add(&GradedElement::unit(&ty, 2, 1, -2).scale(&frac(1, 2)));
        let y = GradedElement::diag(&ty, DiagExt::from_finite([(1, q(1)), (2, q(-1))]), 1).add(&GradedElement::unit(&ty, 2, 1, 0));
        let lx = to_laurent_matrix(&x).unwrap();
        let ly = to_laurent_matrix(&y).unwrap();
        let via = from_laurent_matrix(&ty, &mat_bracket(&lx, &ly).unwrap());
        assert_eq!(via, loop_bracket(&ty, &x, &y).unwrap());
    }

    #[test]
    fn json_roundtrip() {
        let ty = LoopType::new(LoopTag::B2, 2, 3).unwrap();
        let x = GradedElement::vector(&ty, [(5, frac(2, 3))].into_iter().collect(), 1)
            .add(&GradedElement::unit(&ty, 1, 2, -2))
            .add(&GradedElement::c(&ty).scale(&q(4)));
        assert_eq!(GradedElement::from_json(&ty, &x.to_json()).unwrap(), x);
        let far = json!({"5": {"matrix": [], "diag": {"finite": {}, "scalar": "0"}}});
        assert!(matches!(GradedElement::from_json(&ty, &far), Err(Error::WindowOverflow { .. })));
    }
}
