//! Seeded checks of the invariant form, the cocycle and FPAT.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::Result;
use crate::exact::{q, rational_json, Rational};
use crate::forms::{cocycle, form_eval, radical_of_form, t_xi, AffineRoot, FormSpec};
use crate::linalg::SparseVec;
use crate::loops::{loop_bracket, AlgebraOptions, BasisKind, GradedElement, LoopAlgebra, LoopTag, LoopType};
use crate::matrix::DiagExt;
use crate::simple::Weight;

use super::report::{Check, VerificationReport};
use super::torus::weight_spaces;

pub const DEFAULT_SEED: u64 = 0x5eed;

/// Random combinations of one to three basis elements with degrees in `|k| ≤ window / 3`,
/// so that every double bracket of three samples stays in the window.
pub struct Sampler<'a> {
    alg: &'a LoopAlgebra,
    pool: Vec<usize>,
    rng: ChaCha8Rng,
}

impl<'a> Sampler<'a> {
    pub fn new(alg: &'a LoopAlgebra, seed: u64) -> Self {
        let r = alg.ty().window / 3;
        let pool = (0..alg.dim()).filter(|i| alg.basis()[*i].degree.abs() <= r).collect();
        Sampler { alg, pool, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn sample(&mut self) -> GradedElement {
        let terms = self.rng.gen_range(1..=3);
        let mut v = SparseVec::new();
        for _ in 0..terms {
            let i = self.pool[self.rng.gen_range(0..self.pool.len())];
            let c: i64 = self.rng.gen_range(-3..=3);
            if c != 0 {
                v.insert(i, q(c));
            }
        }
        self.alg.from_coordinates(&v)
    }

    pub fn triple(&mut self) -> [GradedElement; 3] {
        [self.sample(), self.sample(), self.sample()]
    }
}

/// The algebra on which form identities are tested: the maximal LALA, or `Û` for A-type.
pub fn form_algebra(ty: &LoopType, form: &FormSpec) -> Result<LoopAlgebra> {
    let opts = if ty.tag == LoopTag::A1 { AlgebraOptions::hat_u() } else { AlgebraOptions::maximal_lala() };
    LoopAlgebra::new(*ty, opts, form.clone())
}

fn first_failure<F>(n: usize, s: &mut Sampler, mut f: F) -> Result<Option<Value>>
where
    F: FnMut(&[GradedElement; 3]) -> Result<Option<Value>>,
{
    for _ in 0..n {
        let t = s.triple();
        if let Some(w) = f(&t)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

fn triple_json(t: &[GradedElement; 3]) -> Value {
    json!(t.iter().map(GradedElement::to_json).collect::<Vec<_>>())
}

/// Symmetry, grading, invariance and `d⁰`-skewness of `B`, the cyclic cocycle identity, FPAT,
/// `t_δ = c`, and (A-type) the radical of `B` on `Û`.
pub fn check_forms(ty: &LoopType, form: &FormSpec, seed: u64, samples: usize) -> Result<VerificationReport> {
    let alg = form_algebra(ty, form)?;
    let mut report = VerificationReport::new("forms", json!({"algebra": ty.descriptor(), "form": form.to_json(), "seed": seed}));
    let b = |x: &GradedElement, y: &GradedElement| form_eval(form, ty, x, y);

    let mut s = Sampler::new(&alg, seed);
    let w = first_failure(samples, &mut s, |t| {
        Ok((b(&t[0], &t[1]) != b(&t[1], &t[0])).then(|| triple_json(t)))
    })?;
    report.push(Check::from_witness("symmetric", json!({"samples": samples}), w));

    let mut pairs = 0;
    let mut witness = None;
    'grading: for x in 0..alg.dim() {
        for y in 0..alg.dim() {
            let (bx, by) = (&alg.basis()[x], &alg.basis()[y]);
            if bx.degree + by.degree == 0 || matches!(bx.kind, BasisKind::Central | BasisKind::Derivation) {
                continue;
            }
            pairs += 1;
            let v = b(&bx.element, &by.element);
            if !v.is_zero() {
                witness = Some(json!({"pair": [bx.label, by.label], "value": rational_json(&v)}));
                break 'grading;
            }
        }
    }
    report.push(Check::from_witness("graded", json!({"pairs": pairs}), witness));

    let mut s = Sampler::new(&alg, seed.wrapping_add(1));
    let w = first_failure(samples, &mut s, |[x, y, z]| {
        let lhs = b(&alg.bracket(x, y)?, z);
        let rhs = b(x, &alg.bracket(y, z)?);
        Ok((lhs != rhs).then(|| json!({"triple": triple_json(&[x.clone(), y.clone(), z.clone()]), "lhs": rational_json(&lhs), "rhs": rational_json(&rhs)})))
    })?;
    report.push(Check::from_witness("invariant", json!({"samples": samples}), w));

    let mut s = Sampler::new(&alg, seed.wrapping_add(2));
    let w = first_failure(samples, &mut s, |t| {
        let (x, y) = (t[0].loop_part(), t[1].loop_part());
        let v = b(&x.apply_d0(), &y) + b(&x, &y.apply_d0());
        Ok((!v.is_zero()).then(|| triple_json(t)))
    })?;
    report.push(Check::from_witness("d0_skew", json!({"samples": samples}), w));

    report.push(check_cocycle(ty, form, seed.wrapping_add(3), samples.max(1000))?);

    let (check, t_delta) = fpat(ty, form)?;
    report.push(check);
    let w = (t_delta != GradedElement::c(ty)).then(|| json!({"t_delta": t_delta.to_json()}));
    report.push(Check::from_witness("t_delta_is_c", json!({}), w));

    if ty.tag == LoopTag::A1 {
        report.push(radical_check(&alg, form));
    }
    Ok(report)
}

/// `φ([u,v],w) + φ([v,w],u) + φ([w,u],v) = 0` and `φ(u,v) = −φ(v,u)` on seeded random core triples.
pub fn check_cocycle(ty: &LoopType, form: &FormSpec, seed: u64, samples: usize) -> Result<Check> {
    let core = LoopAlgebra::new(*ty, AlgebraOptions::core(), form.clone())?;
    let mut s = Sampler::new(&core, seed);
    let phi = |x: &GradedElement, y: &GradedElement, z: &GradedElement| -> Result<Rational> {
        Ok(cocycle(form, ty, &loop_bracket(ty, x, y)?, z))
    };
    let w = first_failure(samples, &mut s, |t| {
        let [u, v, w] = t;
        let sum = phi(u, v, w)? + phi(v, w, u)? + phi(w, u, v)?;
        let antisym = cocycle(form, ty, u, v) + cocycle(form, ty, v, u);
        Ok((!sum.is_zero() || !antisym.is_zero()).then(|| json!({"triple": triple_json(t), "cyclic_sum": rational_json(&sum)})))
    })?;
    Ok(Check::from_witness("cocycle", json!({"samples": samples}), w))
}

/// `[x, y] = B(x, y)·t_ξ` on every pair of root-space basis vectors `x ∈ L_ξ`, `y ∈ L_{−ξ}`,
/// in the minimal LALA. Returns the check and `t_δ`.
pub fn fpat(ty: &LoopType, form: &FormSpec) -> Result<(Check, GradedElement)> {
    let alg = LoopAlgebra::new(*ty, AlgebraOptions::minimal_lala(), form.clone())?;
    let spaces = weight_spaces(&alg);
    let mut cache: BTreeMap<(Weight, i32), GradedElement> = BTreeMap::new();
    let mut pairs = 0;
    let mut witness = None;
    'outer: for ((mu, k), xs) in &spaces {
        if mu.is_zero() && *k == 0 {
            continue;
        }
        let Some(ys) = spaces.get(&(mu.neg(), -k)) else { continue };
        let key = (mu.clone(), *k);
        if !cache.contains_key(&key) {
            let t = t_xi(&alg, &AffineRoot { weight: mu.clone(), degree: *k })?;
            cache.insert(key.clone(), t.to_element(ty));
        }
        let t = &cache[&key];
        for x in xs {
            for y in ys {
                let (ex, ey) = (alg.element(*x), alg.element(*y));
                pairs += 1;
                let lhs = alg.bracket(ex, ey)?;
                let rhs = t.scale(&form_eval(form, ty, ex, ey));
                if lhs != rhs {
                    witness = Some(json!({
                        "root": mu.to_string(), "degree": k,
                        "pair": [alg.basis()[*x].label, alg.basis()[*y].label],
                        "bracket": lhs.to_json(), "expected": rhs.to_json(),
                    }));
                    break 'outer;
                }
            }
        }
    }
    let t_delta = t_xi(&alg, &AffineRoot::delta())?.to_element(ty);
    Ok((Check::from_witness("fpat", json!({"pairs": pairs, "roots": cache.len()}), witness), t_delta))
}

fn radical_check(alg: &LoopAlgebra, form: &FormSpec) -> Check {
    let ty = alg.ty();
    let rad = radical_of_form(alg);
    let mut witness = None;
    let mut dims = BTreeMap::new();
    for (m, basis) in &rad {
        dims.insert(m.to_string(), basis.len());
        let psi = form.psi_at(*m);
        // ι⊗t^m pairs to zero with everything exactly when ψ does not see it
        let expect = usize::from(psi.ii.is_zero() && psi.ei.is_zero());
        let iota = GradedElement::diag(ty, DiagExt::iota(), *m);
        let ok = basis.len() == expect && basis.iter().all(|x| spans_iota(x, &iota));
        if !ok && witness.is_none() {
            witness = Some(json!({"degree": m, "radical": basis.iter().map(GradedElement::to_json).collect::<Vec<_>>(), "expected_dim": expect}));
        }
    }
    Check::from_witness("radical_on_hat_u", json!(dims), witness)
}

fn spans_iota(x: &GradedElement, iota: &GradedElement) -> bool {
    let Some(f) = x.body().values().next() else { return false };
    let s = f.diag.scalar();
    !s.is_zero() && *x == iota.scale(s)
}
