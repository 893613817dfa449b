use std::collections::{BTreeMap, VecDeque};

use num_traits::Zero;
use serde_json::json;

use crate::error::Result;
use crate::linalg::{RowReducer, SparseVec};
use crate::loops::{BasisKind, GradedElement, LoopAlgebra};

use super::report::{Check, VerificationReport};

/// Closes the generators under brackets (products leaving the window are
/// dropped) and compares the span with every graded piece of the core.
pub fn generation_check(alg: &LoopAlgebra, generators: &[GradedElement]) -> Result<VerificationReport> {
    let ty = alg.ty();
    let n = alg.dim();
    let gens: Vec<(i32, SparseVec<usize>)> = generators
        .iter()
        .map(|g| Ok((homogeneous_degree(alg, g)?, alg.coordinates(g)?)))
        .collect::<Result<_>>()?;
    let mut per_degree: BTreeMap<i32, RowReducer> = ty.degrees().map(|k| (k, RowReducer::new(n))).collect();
    let mut queue: VecDeque<(i32, SparseVec<usize>)> = VecDeque::new();
    for g in &gens {
        if per_degree.get_mut(&g.0).unwrap().push(&g.1) {
            queue.push_back(g.clone());
        }
    }
    while let Some((k, v)) = queue.pop_front() {
        let x = alg.from_coordinates(&v);
        for (gk, gv) in &gens {
            if !ty.in_window(k + gk) {
                continue;
            }
            let z = alg.bracket(&alg.from_coordinates(gv), &x)?;
            let zc = alg.coordinates(&z)?;
            if !zc.is_empty() && per_degree.get_mut(&(k + gk)).unwrap().push(&zc) {
                queue.push_back((k + gk, zc));
            }
        }
    }
    let mut dims = BTreeMap::new();
    let mut witness = None;
    for k in ty.degrees() {
        let full = alg.degree_indices(k).into_iter().filter(|i| alg.basis()[*i].kind != BasisKind::Derivation).count();
        let got = per_degree[&k].rank();
        dims.insert(k.to_string(), json!({"generated": got, "dim": full}));
        if got != full && witness.is_none() {
            witness = Some(json!({"degree": k, "generated": got, "dim": full}));
        }
    }
    let mut report = VerificationReport::new("generation", ty.descriptor());
    report.push(Check::from_witness("spans_window", json!(dims), witness));
    Ok(report)
}

fn homogeneous_degree(alg: &LoopAlgebra, x: &GradedElement) -> Result<i32> {
    let ds: Vec<i32> = x.degrees().collect();
    let extra = !(x.central().is_zero() && x.deriv().is_zero());
    match ds.as_slice() {
        [] => Ok(0),
        [0] => Ok(0),
        [k] if !extra => Ok(*k),
        _ => Err(crate::Error::NotInAlgebra(format!("generator of {} is not homogeneous", alg.ty().tag))),
    }
}

/// `g ⊗ 1` together with `x_β ⊗ t` and `x_{−β} ⊗ t^{−1}` for the first root `β` present in degree 1.
pub fn standard_generators(alg: &LoopAlgebra) -> Vec<GradedElement> {
    let mut out: Vec<GradedElement> = alg
        .slice(0)
        .iter()
        .filter(|i| alg.basis()[**i].kind != BasisKind::Complement && alg.basis()[**i].kind != BasisKind::Iota)
        .map(|i| alg.element(*i).clone())
        .collect();
    let beta = alg.slice(1).iter().find(|i| !alg.basis()[**i].weight.is_zero()).map(|i| alg.basis()[*i].weight.clone());
    if let Some(beta) = beta {
        let pick = |k: i32, w: &crate::simple::Weight| {
            alg.slice(k).iter().find(|i| alg.basis()[**i].weight == *w).map(|i| alg.element(*i).clone())
        };
        out.extend(pick(1, &beta));
        out.extend(pick(-1, &beta.neg()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loops::{AlgebraOptions, LoopTag, LoopType};

    fn alg(tag: LoopTag, n: usize) -> LoopAlgebra {
        LoopAlgebra::with_defaults(LoopType::new(tag, n, 2).unwrap(), AlgebraOptions::core()).unwrap()
    }

    #[test]
    fn standard_generators_span() {
        for (tag, n) in [(LoopTag::A1, 2), (LoopTag::C2, 2), (LoopTag::B2, 2), (LoopTag::BC2, 2)] {
            let a = alg(tag, n);
            let r = generation_check(&a, &standard_generators(&a)).unwrap();
            assert!(r.passed(), "{tag}: {:?}", r.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn degree_zero_alone_stays_in_degree_zero() {
        let a = alg(LoopTag::A1, 2);
        let gens: Vec<GradedElement> = standard_generators(&a).into_iter().filter(|g| g.degrees().all(|k| k == 0)).collect();
        let r = generation_check(&a, &gens).unwrap();
        let c = r.check("spans_window").unwrap();
        assert!(!c.passed);
        assert_eq!(c.detail["0"]["generated"], c.detail["0"]["dim"]);
        assert_eq!(c.detail["1"]["generated"], 0);
    }
}
