//! Invariant bilinear forms, the affine cocycle, and the Cartan elements `t_ξ`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::exact::{q, rational_from_json, rational_json, Rational};
use crate::linalg::{solve_dense, RowReducer, SparseVec};
use crate::loops::{loop_bracket, Fiber, GradedElement, LoopAlgebra, LoopType};
use crate::matrix::DiagExt;
use crate::simple::Weight;

/// Values of `ψ_m` on the complement generator `e'` and on `ι`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PsiEntry {
    pub ee: Rational,
    pub ei: Rational,
    pub ii: Rational,
}

impl PsiEntry {
    pub fn is_zero(&self) -> bool {
        self.ee.is_zero() && self.ei.is_zero() && self.ii.is_zero()
    }
}

/// Parameters of the invariant form `B`.
///
/// On the core `B = traceScale·(tr ⊗ ε)`; on the diagonal complement and `ι`
/// it is the table `ψ_{|m|}`; `B(c, d⁰) = 1`, `B(d⁰, d⁰) = dd`, and `c`, `d⁰`
/// are orthogonal to the loop part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormSpec {
    pub trace_scale: Rational,
    pub psi: BTreeMap<u32, PsiEntry>,
    pub dd: Rational,
}

impl Default for FormSpec {
    fn default() -> Self {
        let mut psi = BTreeMap::new();
        psi.insert(0, PsiEntry { ii: Rational::one(), ..PsiEntry::default() });
        FormSpec { trace_scale: Rational::one(), psi, dd: Rational::zero() }
    }
}

impl FormSpec {
    pub fn new(trace_scale: Rational) -> Result<Self> {
        if trace_scale.is_zero() {
            return Err(Error::Parse("traceScale must be nonzero".into()));
        }
        Ok(FormSpec { trace_scale, ..Self::default() })
    }

    pub fn with_psi(mut self, m: u32, entry: PsiEntry) -> Self {
        if entry.is_zero() {
            self.psi.remove(&m);
        } else {
            self.psi.insert(m, entry);
        }
        self
    }

    pub fn with_dd(mut self, dd: Rational) -> Self {
        self.dd = dd;
        self
    }

    pub fn psi_at(&self, m: i32) -> PsiEntry {
        self.psi.get(&m.unsigned_abs()).cloned().unwrap_or_default()
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("traceScale".into(), rational_json(&self.trace_scale));
        m.insert("psi0_iota".into(), rational_json(&self.psi_at(0).ii));
        m.insert("dd".into(), rational_json(&self.dd));
        let psi: Map<String, Value> = self
            .psi
            .iter()
            .map(|(k, e)| {
                let mut o = Map::new();
                o.insert("ee".into(), rational_json(&e.ee));
                o.insert("ei".into(), rational_json(&e.ei));
                o.insert("ii".into(), rational_json(&e.ii));
                (k.to_string(), Value::Object(o))
            })
            .collect();
        m.insert("psi".into(), Value::Object(psi));
        Value::Object(m)
    }

    /// Accepts `{"traceScale", "psi0_iota", "dd", "psi": {m: {"ee","ei","ii"}}}`; all keys optional.
    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("form spec must be an object".into()))?;
        let mut spec = FormSpec::default();
        if let Some(psi) = obj.get("psi") {
            let psi = psi.as_object().ok_or_else(|| Error::Parse("\"psi\" must be an object".into()))?;
            spec.psi.clear();
            for (k, e) in psi {
                let m: u32 = k.parse().map_err(|_| Error::Parse(format!("bad ψ degree {k:?}")))?;
                let get = |name: &str| e.get(name).map(rational_from_json).transpose().map(|x| x.unwrap_or_default());
                spec = spec.with_psi(m, PsiEntry { ee: get("ee")?, ei: get("ei")?, ii: get("ii")? });
            }
        }
        for (key, val) in obj {
            match key.as_str() {
                "traceScale" => spec.trace_scale = rational_from_json(val)?,
                "psi0_iota" => {
                    let e = PsiEntry { ii: rational_from_json(val)?, ..spec.psi_at(0) };
                    spec = spec.with_psi(0, e);
                }
                "dd" => spec.dd = rational_from_json(val)?,
                "psi" => {}
                k => return Err(Error::Parse(format!("unknown form field {k:?}"))),
            }
        }
        if spec.trace_scale.is_zero() {
            return Err(Error::Parse("traceScale must be nonzero".into()));
        }
        Ok(spec)
    }
}

// Σ a_ij b_ji over the off-diagonal parts.
fn off_trace(a: &Fiber, b: &Fiber) -> Rational {
    let mut acc = Rational::zero();
    for (i, j, x) in a.matrix.entries() {
        let y = b.matrix.get(j, i);
        if !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

fn finite_dot(a: &DiagExt, b: &DiagExt) -> Rational {
    a.finite().iter().fold(Rational::zero(), |acc, (i, x)| acc + x * b.finite_entry(*i))
}

/// `B` on a fiber of degree `m` against a fiber of degree `−m`.
fn fiber_form(spec: &FormSpec, ty: &LoopType, m: i32, a: &Fiber, b: &Fiber) -> Rational {
    let mut core = off_trace(a, b);
    // split each diagonal as h + a·e' with h traceless, so ψ governs the e' direction
    let (ca, cb) = match ty.complement_generator(m) {
        Some(e) => {
            let te = e.finite_trace();
            let ca = a.diag.finite_trace() / &te;
            let cb = b.diag.finite_trace() / &te;
            let ha = DiagExt::from_finite(a.diag.finite().clone()).sub(&e.scale(&ca));
            let hb = DiagExt::from_finite(b.diag.finite().clone()).sub(&e.scale(&cb));
            core += finite_dot(&ha, &hb) + &ca * finite_dot(&e, &hb) + &cb * finite_dot(&ha, &e);
            (ca, cb)
        }
        None => {
            core += finite_dot(&a.diag, &b.diag);
            (Rational::zero(), Rational::zero())
        }
    };
    if let Some(s) = ty.structural_s() {
        if !a.vector.is_empty() && !b.vector.is_empty() {
            core += q(2) * s.pairing(&a.vector, &b.vector);
        }
    }
    let psi = spec.psi_at(m);
    let (sa, sb) = (a.diag.scalar(), b.diag.scalar());
    let extra = &ca * &cb * &psi.ee + (&ca * sb + sa * &cb) * &psi.ei + sa * sb * &psi.ii;
    &spec.trace_scale * core + extra
}

/// `B(x, y)`.
pub fn form_eval(spec: &FormSpec, ty: &LoopType, x: &GradedElement, y: &GradedElement) -> Rational {
    let mut acc = Rational::zero();
    for (m, a) in x.body() {
        if let Some(b) = y.fiber(-m) {
            acc += fiber_form(spec, ty, *m, a, b);
        }
    }
    acc += x.central() * y.deriv() + x.deriv() * y.central();
    acc += x.deriv() * y.deriv() * &spec.dd;
    acc
}

/// `φ(u, v) = B(d⁰u, v)` on loop parts.
pub fn cocycle(spec: &FormSpec, ty: &LoopType, u: &GradedElement, v: &GradedElement) -> Rational {
    form_eval(spec, ty, &u.loop_part().apply_d0(), &v.loop_part())
}

/// The loop bracket plus `φ(x, y)·c`.
pub fn extended_bracket(spec: &FormSpec, ty: &LoopType, x: &GradedElement, y: &GradedElement) -> Result<GradedElement> {
    let mut z = loop_bracket(ty, x, y)?;
    let phi = cocycle(spec, ty, x, y);
    let c = z.central() + phi;
    z.set_central(c);
    Ok(z)
}

/// An element of `H = T ⊕ Fc ⊕ Fd⁰`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanElement {
    pub h: DiagExt,
    pub c: Rational,
    pub d: Rational,
}

impl CartanElement {
    pub fn to_element(&self, ty: &LoopType) -> GradedElement {
        let mut x = GradedElement::diag(ty, self.h.clone(), 0);
        x.set_central(self.c.clone());
        x.set_deriv(self.d.clone());
        x
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("h".into(), self.h.to_json());
        m.insert("c".into(), rational_json(&self.c));
        m.insert("d".into(), rational_json(&self.d));
        Value::Object(m)
    }
}

/// A root `ξ = μ + kδ`: `ξ(h) = μ(h)`, `ξ(c) = 0`, `ξ(d⁰) = k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct AffineRoot {
    pub weight: Weight,
    pub degree: i32,
}

impl AffineRoot {
    pub fn delta() -> Self {
        AffineRoot { weight: Weight::zero(), degree: 1 }
    }

    pub fn eval(&self, x: &GradedElement) -> Rational {
        let h = x.fiber(0).map(|f| self.weight.eval(&f.diag)).unwrap_or_default();
        h + x.deriv() * q(self.degree as i64)
    }
}

/// The basis of `H` inside an algebra: degree-0 zero-weight elements, `c` and `d⁰`.
pub fn cartan_indices(alg: &LoopAlgebra) -> Vec<usize> {
    alg.degree_indices(0).into_iter().filter(|i| alg.basis()[*i].weight.is_zero() && is_diagonal(alg.element(*i))).collect()
}

fn is_diagonal(x: &GradedElement) -> bool {
    x.body().values().all(|f| f.matrix.is_zero() && f.vector.is_empty())
}

/// The unique `t_ξ ∈ H` with `B(h, t_ξ) = ξ(h)` for every `h` in the truncated `H`.
pub fn t_xi(alg: &LoopAlgebra, xi: &AffineRoot) -> Result<CartanElement> {
    let ty = alg.ty();
    let idx = cartan_indices(alg);
    let gram: Vec<Vec<Rational>> = idx
        .iter()
        .map(|i| idx.iter().map(|j| form_eval(alg.form(), ty, alg.element(*i), alg.element(*j))).collect())
        .collect();
    let rhs: Vec<Rational> = idx.iter().map(|i| xi.eval(alg.element(*i))).collect();
    let sol = solve_dense(&gram, &rhs)?;
    let mut t = GradedElement::zero(ty);
    for (i, a) in idx.iter().zip(&sol) {
        t = t.add(&alg.element(*i).scale(a));
    }
    Ok(CartanElement {
        h: t.fiber(0).map(|f| f.diag.clone()).unwrap_or_default(),
        c: t.central().clone(),
        d: t.deriv().clone(),
    })
}

/// Per degree `m`: a basis of `{x ∈ L_m : B(x, L_{−m}) = 0}` (with `c`, `d⁰` in degree 0).
pub fn radical_of_form(alg: &LoopAlgebra) -> BTreeMap<i32, Vec<GradedElement>> {
    use rayon::prelude::*;
    let ty = alg.ty();
    ty.degrees()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|m| {
            let here = alg.degree_indices(m);
            let there = alg.degree_indices(-m);
            let mut rr = RowReducer::new(here.len());
            for j in &there {
                let row: SparseVec<usize> = here
                    .iter()
                    .enumerate()
                    .map(|(p, i)| (p, form_eval(alg.form(), ty, alg.element(*i), alg.element(*j))))
                    .filter(|(_, v)| !v.is_zero())
                    .collect();
                rr.push(&row);
            }
            let kernel = rr
                .nullspace()
                .into_iter()
                .map(|v| alg.from_coordinates(&v.into_iter().map(|(p, a)| (here[p], a)).collect()))
                .collect();
            (m, kernel)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::frac;
    use crate::loops::{AlgebraOptions, LoopTag};

    fn a1(n: usize, k: i32) -> LoopType {
        LoopType::new(LoopTag::A1, n, k).unwrap()
    }

    #[test]
    fn trace_pairing_and_grading() {
        let ty = a1(2, 3);
        let spec = FormSpec::new(q(3)).unwrap();
        let x = GradedElement::unit(&ty, 1, 2, 1);
        let y = GradedElement::unit(&ty, 2, 1, -1);
        assert_eq!(form_eval(&spec, &ty, &x, &y), q(3));
        assert_eq!(form_eval(&spec, &ty, &GradedElement::unit(&ty, 1, 2, 2), &GradedElement::unit(&ty, 2, 1, 3)), q(0));
        assert_eq!(form_eval(&spec, &ty, &GradedElement::c(&ty), &GradedElement::d(&ty)), q(1));
        assert_eq!(cocycle(&spec, &ty, &x, &y), q(3));
        assert_eq!(cocycle(&spec, &ty, &x, &x), q(0));
    }

    #[test]
    fn star_bracket() {
        let ty = a1(2, 3);
        let spec = FormSpec::default();
        let x = GradedElement::unit(&ty, 1, 2, 1);
        let y = GradedElement::unit(&ty, 2, 1, -1);
        let want = GradedElement::diag(&ty, DiagExt::from_finite([(1, q(1)), (2, q(-1))]), 0).add(&GradedElement::c(&ty));
        assert_eq!(extended_bracket(&spec, &ty, &x, &y).unwrap(), want);
        // Cartan pair: only the central term survives
        let h = DiagExt::from_finite([(1, q(1)), (2, q(-1))]);
        let hh = GradedElement::diag(&ty, h.clone(), 2);
        let hh2 = GradedElement::diag(&ty, h, -2);
        assert_eq!(extended_bracket(&spec, &ty, &hh, &hh2).unwrap(), GradedElement::c(&ty).scale(&q(4)));
    }

    #[test]
    fn t_delta_is_c() {
        for tag in LoopTag::ALL {
            let ty = LoopType::new(tag, tag.min_rank().max(2), 2).unwrap();
            let alg = LoopAlgebra::with_defaults(ty, AlgebraOptions::minimal_lala()).unwrap();
            let t = t_xi(&alg, &AffineRoot::delta()).unwrap();
            assert_eq!(t, CartanElement { h: DiagExt::zero(), c: q(1), d: q(0) }, "{tag}");
            let t3 = t_xi(&alg, &AffineRoot { weight: Weight::zero(), degree: 3 }).unwrap();
            assert_eq!(t3.c, q(3));
        }
    }

    #[test]
    fn singular_gram_is_reported() {
        let alg = LoopAlgebra::with_defaults(a1(2, 1), AlgebraOptions::extended()).unwrap();
        assert_eq!(t_xi(&alg, &AffineRoot::delta()), Err(Error::SingularForm));
    }

    #[test]
    fn radical_on_hat_u() {
        let alg = LoopAlgebra::with_defaults(a1(3, 2), AlgebraOptions::hat_u()).unwrap();
        let rad = radical_of_form(&alg);
        let iota = DiagExt::iota();
        for m in [-2, -1, 1, 2] {
            assert_eq!(rad[&m].len(), 1);
            let x = &rad[&m][0];
            let f = x.fiber(m).unwrap();
            assert!(f.matrix.is_zero() && f.diag.finite().is_empty() && f.diag.scalar() != &q(0));
            assert_eq!(f.diag.scale(&f.diag.scalar().recip()), iota);
        }
        assert!(rad[&0].is_empty());
        let degenerate = FormSpec::default().with_psi(0, PsiEntry::default());
        let alg0 = LoopAlgebra::new(a1(3, 1), AlgebraOptions::hat_u(), degenerate).unwrap();
        assert_eq!(radical_of_form(&alg0)[&0].len(), 1);
    }

    #[test]
    fn spec_json_roundtrip() {
        let spec = FormSpec::new(frac(3, 2)).unwrap().with_dd(q(5)).with_psi(2, PsiEntry { ee: q(1), ei: q(0), ii: q(-1) });
        assert_eq!(FormSpec::from_json(&spec.to_json()).unwrap(), spec);
        let small = serde_json::json!({"traceScale": "1", "psi0_iota": "1", "dd": "0"});
        assert_eq!(FormSpec::from_json(&small).unwrap(), FormSpec::default());
        assert!(FormSpec::from_json(&serde_json::json!({"traceScale": "0"})).is_err());
    }
}
