use std::collections::BTreeMap;

use serde_json::json;

use crate::error::Result;
use crate::forms::{t_xi, AffineRoot};
use crate::linalg::{rank_of, Decomposer, RowReducer, SparseVec};
use crate::loops::{unit_vec, LoopAlgebra, StructureTable};
use crate::simple::Weight;

use super::jacobi::coords_json;
use super::report::{Check, VerificationReport};
use super::torus::weight_spaces;

/// Elements of degree `m` commuting with every basis element they can be bracketed with in the window.
pub fn center_in_degree(alg: &LoopAlgebra, table: &StructureTable, m: i32) -> Vec<SparseVec<usize>> {
    let unknowns = alg.degree_indices(m);
    let mut rr = RowReducer::new(unknowns.len());
    for b in 0..alg.dim() {
        let mut rows: BTreeMap<usize, SparseVec<usize>> = BTreeMap::new();
        for (p, a) in unknowns.iter().enumerate() {
            let Some(e) = table.get(*a, b) else { continue };
            for (k, v) in e {
                rows.entry(*k).or_default().insert(p, v.clone());
            }
        }
        for r in rows.values() {
            rr.push(r);
        }
    }
    rr.nullspace().into_iter().map(|v| v.into_iter().map(|(p, a)| (unknowns[p], a)).collect()).collect()
}

pub fn compute_center(alg: &LoopAlgebra, table: &StructureTable, all_degrees: bool) -> BTreeMap<i32, Vec<SparseVec<usize>>> {
    let degrees: Vec<i32> = if all_degrees { alg.ty().degrees().collect() } else { vec![0] };
    degrees.into_iter().map(|m| (m, center_in_degree(alg, table, m))).collect()
}

fn same_span(a: &[SparseVec<usize>], b: &[SparseVec<usize>]) -> bool {
    let d = Decomposer::new(a);
    d.rank() == rank_of(b) && b.iter().all(|v| d.contains(v))
}

/// Centers of the plain and the centrally extended core, the `[L_0^m, L_0^{−m}]`
/// witness, the 1-vs-2 dichotomy for `Σ_m [L_μ^m, L_{−μ}^{−m}]`, and `t_δ ∈ Z`.
pub fn check_center(plain: &LoopAlgebra, extended: &LoopAlgebra, lala: &LoopAlgebra) -> Result<VerificationReport> {
    let tp = plain.structure_table()?;
    let te = extended.structure_table()?;
    let mut report = VerificationReport::new("center", plain.ty().descriptor());

    let zp = compute_center(plain, &tp, true);
    let total: usize = zp.values().map(Vec::len).sum();
    let witness = zp.iter().find(|(_, v)| !v.is_empty()).map(|(k, v)| json!({"degree": k, "element": coords_json(plain, &v[0])}));
    report.push(Check::from_witness("plain_center_zero", json!({"dim": total}), witness));

    let c = extended.central_index().expect("extended algebra has c");
    let ze = compute_center(extended, &te, true);
    let found: Vec<SparseVec<usize>> = ze.values().flatten().cloned().collect();
    let ok = same_span(&found, &[unit_vec(c)]);
    report.push(Check::from_witness(
        "extended_center_is_c",
        json!({"dim": found.len()}),
        (!ok).then(|| json!({"center": found.iter().map(|v| coords_json(extended, v)).collect::<Vec<_>>()})),
    ));

    // [L_0^m, L_0^{-m}] over m ≠ 0
    let spaces = weight_spaces(extended);
    let mut brackets = Vec::new();
    for m in 1..=extended.ty().window {
        let (Some(xs), Some(ys)) = (spaces.get(&(Weight::zero(), m)), spaces.get(&(Weight::zero(), -m))) else { continue };
        for x in xs {
            for y in ys {
                if let Some(e) = te.get(*x, *y) {
                    brackets.push(e.clone());
                }
            }
        }
    }
    let ok = same_span(&brackets, &found);
    report.push(Check::from_witness(
        "zero_weight_brackets_span_center",
        json!({"brackets": brackets.len(), "rank": rank_of(&brackets)}),
        (!ok).then(|| json!({"rank": rank_of(&brackets)})),
    ));

    // Σ_m [L_μ^m, L_{−μ}^{−m}] has dimension 1 (loop) and 2 (extension)
    let mut witness = None;
    let mut roots_checked = 0;
    for (alg, table, want) in [(plain, &tp, 1usize), (extended, &te, 2usize)] {
        let spaces = weight_spaces(alg);
        let mut per_root: BTreeMap<Weight, Vec<SparseVec<usize>>> = BTreeMap::new();
        for ((mu, m), xs) in &spaces {
            if mu.is_zero() {
                continue;
            }
            let Some(ys) = spaces.get(&(mu.neg(), -m)) else { continue };
            for x in xs {
                for y in ys {
                    if let Some(e) = table.get(*x, *y) {
                        per_root.entry(mu.clone()).or_default().push(e.clone());
                    }
                }
            }
        }
        for (mu, vs) in &per_root {
            roots_checked += 1;
            let r = rank_of(vs);
            if r != want && witness.is_none() {
                witness = Some(json!({"root": mu.to_string(), "extended": want == 2, "dim": r, "expected": want}));
            }
        }
    }
    report.push(Check::from_witness("root_bracket_dims", json!({"roots_checked": roots_checked}), witness));

    // t_δ lies in the center
    let t = t_xi(lala, &AffineRoot::delta())?;
    let telem = t.to_element(lala.ty());
    let coords = lala.coordinates(&telem)?;
    let mut witness = None;
    for b in 0..lala.dim() {
        let z = lala.bracket(&telem, lala.element(b))?;
        if !z.is_zero() {
            witness = Some(json!({"t_delta": coords_json(lala, &coords), "target": lala.basis()[b].label}));
            break;
        }
    }
    report.push(Check::from_witness("t_delta_central", json!({"t_delta": t.to_json()}), witness));
    Ok(report)
}
