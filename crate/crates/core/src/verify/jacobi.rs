use rayon::prelude::*;
use serde_json::{json, Value};

use crate::exact::rational_json;
use crate::linalg::{axpy, SparseVec};
use crate::loops::{LoopAlgebra, StructureTable};

use super::report::{Check, VerificationReport};

/// Coordinates as `{label: "p/q"}`.
pub fn coords_json(alg: &LoopAlgebra, v: &SparseVec<usize>) -> Value {
    Value::Object(v.iter().map(|(i, a)| (alg.basis()[*i].label.clone(), rational_json(a))).collect())
}

fn interior(alg: &LoopAlgebra, a: usize, b: usize, c: usize) -> bool {
    let d = |i: usize| alg.basis()[i].degree;
    let ty = alg.ty();
    [d(a) + d(b), d(b) + d(c), d(a) + d(c), d(a) + d(b) + d(c)].into_iter().all(|k| ty.in_window(k))
}

// [[a,b],c] through the table
fn nested(t: &StructureTable, a: usize, b: usize, c: usize) -> Option<SparseVec<usize>> {
    let mut out = SparseVec::new();
    for (e, x) in t.get(a, b)? {
        axpy(&mut out, x, t.get(*e, c)?);
    }
    Some(out)
}

/// Jacobi on every triple `a ≤ b ≤ c` of basis elements whose nested products
/// stay in the window, plus antisymmetry of every in-window pair.
pub fn check_jacobi(alg: &LoopAlgebra, table: &StructureTable, suite: &str) -> VerificationReport {
    let n = alg.dim();
    let mut report = VerificationReport::new(suite, alg.ty().descriptor());

    let anti: Option<Value> = (0..n).into_par_iter().find_map_first(|a| {
        (a..n).find_map(|b| {
            let (x, y) = (table.get(a, b)?, table.get(b, a)?);
            let mut sum = x.clone();
            axpy(&mut sum, &num_traits::One::one(), y);
            (!sum.is_empty()).then(|| {
                json!({"pair": [alg.basis()[a].label, alg.basis()[b].label], "sum": coords_json(alg, &sum)})
            })
        })
    });
    report.push(Check::from_witness("antisymmetry", json!({"pairs": n * (n + 1) / 2}), anti));

    let results: Vec<(usize, Option<Value>)> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut count = 0;
            for b in a..n {
                for c in b..n {
                    if !interior(alg, a, b, c) {
                        continue;
                    }
                    count += 1;
                    let mut sum = SparseVec::new();
                    let one = num_traits::One::one();
                    for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
                        match nested(table, x, y, z) {
                            Some(v) => axpy(&mut sum, &one, &v),
                            None => {
                                let w = json!({"triple": [x, y, z], "reason": "structure constant missing"});
                                return (count, Some(w));
                            }
                        }
                    }
                    if !sum.is_empty() {
                        let labels: Vec<&str> = [a, b, c].iter().map(|i| alg.basis()[*i].label.as_str()).collect();
                        return (count, Some(json!({"triple": labels, "jacobiator": coords_json(alg, &sum)})));
                    }
                }
            }
            (count, None)
        })
        .collect();
    let triples: usize = results.iter().map(|r| r.0).sum();
    let witness = results.into_iter().find_map(|r| r.1);
    report.push(Check::from_witness("jacobi", json!({"dim": n, "interior_triples": triples}), witness));
    report
}
