//! Truncated algebras with an explicit homogeneous basis, coordinates and
//! structure constants.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::forms::{extended_bracket, FormSpec};
use crate::linalg::{axpy, Decomposer, RowReducer, SparseVec};
use crate::matrix::{DiagExt, FinitaryMatrix, Letter};
use crate::simple::{cartan_basis, simple_basis, unit_weight, ModuleElement, Weight};

use super::element::{hat_sigma, hat_tau, loop_bracket, Component, Fiber, GradedElement, LoopTag, LoopType};

/// Which summands beyond the core are included.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AlgebraOptions {
    /// `⊕ Fc` with the cocycle bracket.
    pub central: bool,
    /// `⊕ Fd⁰`.
    pub derivation: bool,
    /// The diagonal complement `T'` in every degree where it exists.
    pub complement: bool,
    /// `ι` in every degree (A-type only).
    pub iota: bool,
}

impl AlgebraOptions {
    pub fn core() -> Self {
        Self::default()
    }

    pub fn extended() -> Self {
        AlgebraOptions { central: true, ..Self::default() }
    }

    /// Core `⊕ Fc ⊕ Fd⁰`.
    pub fn minimal_lala() -> Self {
        AlgebraOptions { central: true, derivation: true, ..Self::default() }
    }

    /// `(core + T') ⊗ F[t^±1] ⊕ Fc ⊕ Fd⁰`.
    pub fn maximal_lala() -> Self {
        AlgebraOptions { central: true, derivation: true, complement: true, iota: false }
    }

    /// `Û`: A-type with the full diagonal, ι included.
    pub fn hat_u() -> Self {
        AlgebraOptions { central: true, derivation: true, complement: true, iota: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisKind {
    /// Nonzero weight.
    Root,
    /// Zero weight inside the core (Cartan of `g`, or `𝔰₀`).
    Zero,
    Complement,
    Iota,
    Central,
    Derivation,
}

#[derive(Clone, Debug)]
pub struct BasisElement {
    pub label: String,
    pub degree: i32,
    pub weight: Weight,
    pub kind: BasisKind,
    pub component: Option<Component>,
    pub element: GradedElement,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum FKey {
    Off(usize, usize),
    Diag(usize),
    Scalar,
    Vec(usize),
}

fn flatten(f: &Fiber) -> SparseVec<FKey> {
    let mut v = SparseVec::new();
    for (i, j, a) in f.matrix.entries() {
        v.insert(FKey::Off(i, j), a.clone());
    }
    for (i, a) in f.diag.finite() {
        v.insert(FKey::Diag(*i), a.clone());
    }
    if !f.diag.scalar().is_zero() {
        v.insert(FKey::Scalar, f.diag.scalar().clone());
    }
    for (i, a) in &f.vector {
        v.insert(FKey::Vec(*i), a.clone());
    }
    v
}

struct Slice {
    members: Vec<usize>,
    dec: Decomposer<FKey>,
}

/// A truncated loop algebra (possibly extended) with a homogeneous weight basis.
pub struct LoopAlgebra {
    ty: LoopType,
    opts: AlgebraOptions,
    form: FormSpec,
    basis: Vec<BasisElement>,
    slices: BTreeMap<i32, Slice>,
    central: Option<usize>,
    deriv: Option<usize>,
}

impl fmt::Debug for LoopAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LoopAlgebra({:?}, {:?}, dim {})", self.ty, self.opts, self.basis.len())
    }
}

fn fiber_basis(ty: &LoopType, k: i32, opts: &AlgebraOptions) -> Vec<(String, Weight, BasisKind, Option<Component>, Fiber)> {
    let u = ty.universe();
    let n = ty.rank;
    let mut out = Vec::new();
    for comp in ty.components(k) {
        let tag = match comp {
            Component::G => "g",
            Component::S => "s",
        };
        let mut items: Vec<(Weight, Fiber)> = Vec::new();
        match comp {
            Component::G if ty.tag.g_letter() == Letter::A => {
                let size = u.size();
                let plain = crate::matrix::IndexUniverse::plain(size);
                let mut rv = Vec::new();
                for i in 1..=size {
                    for j in 1..=size {
                        if i != j {
                            rv.push((unit_weight(&plain, i, j), Fiber::from_matrix(&FinitaryMatrix::unit(u, i, j))));
                        }
                    }
                }
                rv.sort_by(|a, b| a.0.cmp(&b.0));
                items.extend(rv);
                for h in cartan_basis(Letter::A, size) {
                    items.push((Weight::zero(), Fiber::from_diag(u, h)));
                }
            }
            Component::G => {
                for (w, m) in simple_basis(ty.tag.g_letter(), n) {
                    items.push((w, Fiber::from_matrix(&m)));
                }
            }
            Component::S => {
                for (w, v) in ty.module().expect("twisted type").basis() {
                    let f = match v {
                        ModuleElement::Vector(v) => Fiber::from_vector(u, v),
                        ModuleElement::Matrix(m) => Fiber::from_matrix(&m),
                    };
                    items.push((w, f));
                }
            }
        }
        let mut seen: BTreeMap<Weight, usize> = BTreeMap::new();
        for (w, f) in items {
            let c = seen.entry(w.clone()).or_insert(0);
            *c += 1;
            let kind = if w.is_zero() { BasisKind::Zero } else { BasisKind::Root };
            let suffix = if *c > 1 || w.is_zero() { format!("#{c}") } else { String::new() };
            out.push((format!("{tag}[{w}]{suffix}⊗t^{k}"), w, kind, Some(comp), f));
        }
    }
    if opts.complement {
        if let Some(e) = ty.complement_generator(k) {
            out.push((format!("e'⊗t^{k}"), Weight::zero(), BasisKind::Complement, None, Fiber::from_diag(u, e)));
        }
    }
    if opts.iota {
        out.push((format!("ι⊗t^{k}"), Weight::zero(), BasisKind::Iota, None, Fiber::from_diag(u, DiagExt::iota())));
    }
    out
}

impl LoopAlgebra {
    pub fn new(ty: LoopType, opts: AlgebraOptions, form: FormSpec) -> Result<Self> {
        if opts.iota && ty.tag != LoopTag::A1 {
            return Err(Error::InvalidType(format!("ι is only adjoined to A-type algebras, not {}", ty.tag)));
        }
        let mut basis = Vec::new();
        let mut slices = BTreeMap::new();
        for k in ty.degrees() {
            let mut members = Vec::new();
            let mut vecs = Vec::new();
            for (label, weight, kind, component, f) in fiber_basis(&ty, k, &opts) {
                members.push(basis.len());
                vecs.push(flatten(&f));
                basis.push(BasisElement { label, degree: k, weight, kind, component, element: GradedElement::homogeneous(&ty, k, f) });
            }
            let dec = Decomposer::new(&vecs);
            if !dec.dependent().is_empty() {
                return Err(Error::NotInAlgebra(format!("degree {k} basis of {} is dependent", ty.tag)));
            }
            slices.insert(k, Slice { members, dec });
        }
        let mut central = None;
        let mut deriv = None;
        if opts.central {
            central = Some(basis.len());
            basis.push(BasisElement {
                label: "c".into(),
                degree: 0,
                weight: Weight::zero(),
                kind: BasisKind::Central,
                component: None,
                element: GradedElement::c(&ty),
            });
        }
        if opts.derivation {
            deriv = Some(basis.len());
            basis.push(BasisElement {
                label: "d".into(),
                degree: 0,
                weight: Weight::zero(),
                kind: BasisKind::Derivation,
                component: None,
                element: GradedElement::d(&ty),
            });
        }
        Ok(LoopAlgebra { ty, opts, form, basis, slices, central, deriv })
    }

    pub fn with_defaults(ty: LoopType, opts: AlgebraOptions) -> Result<Self> {
        Self::new(ty, opts, FormSpec::default())
    }

    pub fn ty(&self) -> &LoopType {
        &self.ty
    }

    pub fn options(&self) -> &AlgebraOptions {
        &self.opts
    }

    pub fn form(&self) -> &FormSpec {
        &self.form
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn element(&self, i: usize) -> &GradedElement {
        &self.basis[i].element
    }

    pub fn central_index(&self) -> Option<usize> {
        self.central
    }

    pub fn deriv_index(&self) -> Option<usize> {
        self.deriv
    }

    /// Basis indices of the loop part of degree `k`.
    pub fn slice(&self, k: i32) -> &[usize] {
        self.slices.get(&k).map(|s| s.members.as_slice()).unwrap_or(&[])
    }

    /// Basis indices of degree `k`, including `c` and `d⁰` in degree 0.
    pub fn degree_indices(&self, k: i32) -> Vec<usize> {
        let mut v = self.slice(k).to_vec();
        if k == 0 {
            v.extend(self.central);
            v.extend(self.deriv);
        }
        v
    }

    /// Coordinates in the basis; errors if `x` is not in the algebra.
    pub fn coordinates(&self, x: &GradedElement) -> Result<SparseVec<usize>> {
        let mut out = SparseVec::new();
        for (k, f) in x.body() {
            let slice = self.slices.get(k).ok_or(Error::WindowOverflow { degrees: vec![*k], window: self.ty.window })?;
            let c = slice
                .dec
                .decompose(&flatten(f))
                .ok_or_else(|| Error::NotInAlgebra(format!("degree {k} component of an element of {}", self.ty.tag)))?;
            for (i, a) in c {
                out.insert(slice.members[i], a);
            }
        }
        for (val, idx, what) in [(x.central(), self.central, "c"), (x.deriv(), self.deriv, "d⁰")] {
            if !val.is_zero() {
                let i = idx.ok_or_else(|| Error::NotInAlgebra(format!("{what} is not adjoined")))?;
                out.insert(i, val.clone());
            }
        }
        Ok(out)
    }

    pub fn contains(&self, x: &GradedElement) -> bool {
        self.coordinates(x).is_ok()
    }

    pub fn from_coordinates(&self, c: &SparseVec<usize>) -> GradedElement {
        let mut x = GradedElement::zero(&self.ty);
        for (i, a) in c {
            x = x.add(&self.basis[*i].element.scale(a));
        }
        x
    }

    /// The algebra's bracket: the cocycle bracket when `c` is adjoined, the plain loop bracket otherwise.
    pub fn bracket(&self, x: &GradedElement, y: &GradedElement) -> Result<GradedElement> {
        if self.opts.central {
            extended_bracket(&self.form, &self.ty, x, y)
        } else {
            loop_bracket(&self.ty, x, y)
        }
    }

    pub fn bracket_coords(&self, a: usize, b: usize) -> Result<SparseVec<usize>> {
        self.coordinates(&self.bracket(&self.basis[a].element, &self.basis[b].element)?)
    }

    /// All structure constants whose product degree is in the window.
    pub fn structure_table(&self) -> Result<StructureTable> {
        let n = self.dim();
        let rows: Vec<Vec<Option<SparseVec<usize>>>> = (0..n)
            .into_par_iter()
            .map(|a| {
                (0..n)
                    .map(|b| {
                        if self.ty.in_window(self.basis[a].degree + self.basis[b].degree) {
                            self.bracket_coords(a, b).map(Some)
                        } else {
                            Ok(None)
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(StructureTable { dim: n, entries: rows.into_iter().flatten().collect() })
    }

    /// Per-degree dimensions of the loop part.
    pub fn graded_dims(&self) -> BTreeMap<i32, usize> {
        self.slices.iter().map(|(k, s)| (*k, s.members.len())).collect()
    }
}

/// `[b_a, b_b] = Σ_e C[a][b][e] b_e`, for pairs whose product stays in the window.
#[derive(Clone, Debug)]
pub struct StructureTable {
    pub dim: usize,
    entries: Vec<Option<SparseVec<usize>>>,
}

impl StructureTable {
    pub fn get(&self, a: usize, b: usize) -> Option<&SparseVec<usize>> {
        self.entries[a * self.dim + b].as_ref()
    }

    /// Overwrites one structure constant (used to inject faults in tests).
    pub fn set(&mut self, a: usize, b: usize, v: SparseVec<usize>) {
        self.entries[a * self.dim + b] = Some(v);
    }

    /// `[x, y]` for coordinate vectors; `None` if some needed product is out of window.
    pub fn bracket(&self, x: &SparseVec<usize>, y: &SparseVec<usize>) -> Option<SparseVec<usize>> {
        let mut out = SparseVec::new();
        for (a, xa) in x {
            for (b, yb) in y {
                let e = self.get(*a, *b)?;
                axpy(&mut out, &(xa * yb), e);
            }
        }
        Some(out)
    }
}

pub fn unit_vec(i: usize) -> SparseVec<usize> {
    [(i, Rational::one())].into_iter().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Automorphism {
    /// `σ̂` of the given letter; `twisted` includes the sign `(−1)^m`.
    SigmaHat { letter: Letter, twisted: bool },
    /// `τ̂` on `o_{2n+2}` loops.
    TauHat,
}

/// The fixed points of an automorphism, degree by degree.
pub struct FixedAlgebra {
    pub source: LoopType,
    pub result: LoopType,
    pub slices: BTreeMap<i32, Vec<GradedElement>>,
}

impl FixedAlgebra {
    pub fn graded_dims(&self) -> BTreeMap<i32, usize> {
        self.slices.iter().map(|(k, v)| (*k, v.len())).collect()
    }
}

pub fn fixed_algebra(ty: &LoopType, auto: Automorphism) -> Result<FixedAlgebra> {
    use crate::matrix::UniverseKind as K;
    let u = ty.universe();
    let result = match (ty.tag, u.kind, auto) {
        (LoopTag::A1, K::Doubled, Automorphism::SigmaHat { letter: Letter::C, twisted: true }) => LoopType::new(LoopTag::C2, u.n, ty.window)?,
        (LoopTag::A1, K::DoubledPlusOne, Automorphism::SigmaHat { letter: Letter::B, twisted: true }) => LoopType::new(LoopTag::BC2, u.n, ty.window)?,
        (LoopTag::A1, K::Doubled, Automorphism::SigmaHat { letter: Letter::C, twisted: false }) => LoopType::new(LoopTag::C1, u.n, ty.window)?,
        (LoopTag::A1, K::Doubled, Automorphism::SigmaHat { letter: Letter::D, twisted: false }) => LoopType::new(LoopTag::D1, u.n, ty.window)?,
        (LoopTag::A1, K::DoubledPlusOne, Automorphism::SigmaHat { letter: Letter::B, twisted: false }) => LoopType::new(LoopTag::B1, u.n, ty.window)?,
        (LoopTag::D1, K::Doubled, Automorphism::TauHat) => LoopType::new(LoopTag::B2, u.n - 1, ty.window)?,
        _ => return Err(Error::InvalidType(format!("{auto:?} is not defined on {} over {u}", ty.tag))),
    };
    let alg = LoopAlgebra::with_defaults(*ty, AlgebraOptions::core())?;
    let apply = |x: &GradedElement| match auto {
        Automorphism::SigmaHat { letter, twisted } => hat_sigma(ty, letter, twisted, x),
        Automorphism::TauHat => hat_tau(ty, x),
    };
    let mut slices = BTreeMap::new();
    for k in ty.degrees() {
        let members = alg.slice(k);
        let pos: BTreeMap<usize, usize> = members.iter().enumerate().map(|(p, i)| (*i, p)).collect();
        // columns: coordinates of (auto − id)(b_i); rows: one per output coordinate
        let mut rows: BTreeMap<usize, SparseVec<usize>> = BTreeMap::new();
        for (col, i) in members.iter().enumerate() {
            let x = alg.element(*i);
            let diff = alg.coordinates(&apply(x)?.sub(x))?;
            for (e, a) in diff {
                rows.entry(pos[&e]).or_default().insert(col, a);
            }
        }
        let mut rr = RowReducer::new(members.len());
        for r in rows.values() {
            rr.push(r);
        }
        let fixed = rr
            .nullspace()
            .into_iter()
            .map(|v| alg.from_coordinates(&v.into_iter().map(|(p, a)| (members[p], a)).collect()))
            .collect();
        slices.insert(k, fixed);
    }
    Ok(FixedAlgebra { source: *ty, result, slices })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;
    use crate::matrix::IndexUniverse;

    fn alg(tag: LoopTag, n: usize, k: i32, opts: AlgebraOptions) -> LoopAlgebra {
        LoopAlgebra::with_defaults(LoopType::new(tag, n, k).unwrap(), opts).unwrap()
    }

    #[test]
    fn graded_dimensions() {
        // (type, rank, even-degree dim, odd-degree dim)
        for (tag, n, even, odd) in [
            (LoopTag::A1, 3, 8, 8),
            (LoopTag::B1, 2, 10, 10),
            (LoopTag::C1, 2, 10, 10),
            (LoopTag::D1, 3, 15, 15),
            (LoopTag::B2, 2, 10, 5),
            (LoopTag::C2, 2, 10, 5),
            (LoopTag::BC2, 2, 10, 14),
        ] {
            let a = alg(tag, n, 2, AlgebraOptions::core());
            let d = a.graded_dims();
            assert_eq!(d[&0], even, "{tag}");
            assert_eq!(d[&2], even, "{tag}");
            assert_eq!(d[&1], odd, "{tag}");
            assert_eq!(d[&-1], odd, "{tag}");
        }
    }

    #[test]
    fn coordinates_roundtrip_and_reject() {
        let a = alg(LoopTag::C2, 2, 2, AlgebraOptions::extended());
        for i in 0..a.dim() {
            assert_eq!(a.coordinates(a.element(i)).unwrap(), unit_vec(i));
        }
        // e_12 at odd degree is not in 𝔰
        let bad = GradedElement::unit(a.ty(), 1, 2, 1);
        assert!(a.coordinates(&bad).is_err());
        // d⁰ not adjoined
        assert!(a.coordinates(&GradedElement::d(a.ty())).is_err());
    }

    #[test]
    fn complements_and_iota() {
        let m = alg(LoopTag::C2, 2, 1, AlgebraOptions::maximal_lala());
        assert_eq!(m.slice(1).len(), 6);
        assert_eq!(m.slice(0).len(), 10);
        let u = alg(LoopTag::A1, 2, 1, AlgebraOptions::hat_u());
        assert_eq!(u.slice(0).len(), 5);
        assert!(LoopAlgebra::with_defaults(LoopType::new(LoopTag::C1, 2, 1).unwrap(), AlgebraOptions::hat_u()).is_err());
    }

    #[test]
    fn twisted_parity_closure() {
        let a = alg(LoopTag::BC2, 2, 3, AlgebraOptions::core());
        let t = a.structure_table().unwrap();
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                if let Some(e) = t.get(i, j) {
                    let want = a.basis()[i].degree + a.basis()[j].degree;
                    assert!(e.keys().all(|x| a.basis()[*x].degree == want));
                }
            }
        }
    }

    #[test]
    fn degree_zero_fixed_part_is_sp() {
        let ty = LoopType::a1_over(IndexUniverse::doubled(2), 1).unwrap();
        let f = fixed_algebra(&ty, Automorphism::SigmaHat { letter: Letter::C, twisted: true }).unwrap();
        let direct = alg(LoopTag::C2, 2, 1, AlgebraOptions::core());
        for x in &f.slices[&0] {
            assert!(direct.contains(x));
        }
        assert_eq!(f.slices[&0].len(), 10);
        assert_eq!(f.graded_dims(), direct.graded_dims());
    }

    #[test]
    fn untwisted_fixed_algebras() {
        for (u, letter, tag) in [
            (IndexUniverse::doubled(2), Letter::C, LoopTag::C1),
            (IndexUniverse::doubled_plus_one(2), Letter::B, LoopTag::B1),
            (IndexUniverse::doubled(3), Letter::D, LoopTag::D1),
        ] {
            let ty = LoopType::a1_over(u, 1).unwrap();
            let f = fixed_algebra(&ty, Automorphism::SigmaHat { letter, twisted: false }).unwrap();
            assert_eq!(f.result.tag, tag);
            let direct = LoopAlgebra::with_defaults(f.result, AlgebraOptions::core()).unwrap();
            assert_eq!(f.graded_dims(), direct.graded_dims());
        }
    }

    #[test]
    fn table_bracket_matches_direct() {
        let a = alg(LoopTag::A1, 2, 2, AlgebraOptions::minimal_lala());
        let t = a.structure_table().unwrap();
        let x: SparseVec<usize> = [(a.slice(0)[0], q(2)), (a.slice(1)[1], q(-1))].into_iter().collect();
        let y: SparseVec<usize> = [(a.slice(-1)[0], q(3)), (a.deriv_index().unwrap(), q(1))].into_iter().collect();
        let direct = a.bracket(&a.from_coordinates(&x), &a.from_coordinates(&y)).unwrap();
        assert_eq!(a.coordinates(&direct).unwrap(), t.bracket(&x, &y).unwrap());
    }
}
