//! Coherence of the directed system (rank embeddings) and of the twisted
//! constructions (fixed points of σ̂ and τ̂).

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::Result;
use crate::forms::form_eval;
use crate::loops::{
    embed, fixed_algebra, hat_sigma, hat_tau, loop_bracket, AlgebraOptions, Automorphism, Embedding, GradedElement,
    LoopAlgebra, LoopTag, LoopType,
};
use crate::matrix::{IndexUniverse, Letter};

use super::report::{Check, VerificationReport};

/// The rank pair used for the embedding check: `n → n+1`, starting from the smallest allowed rank ≥ 2.
pub fn embedding_ranks(tag: LoopTag) -> (usize, usize) {
    let n = tag.min_rank().max(2);
    (n, n + 1)
}

/// `ι_{n→n'}` commutes with the extended bracket and preserves the form, on every basis image.
pub fn check_embedding(tag: LoopTag, from: usize, to: usize, window: i32) -> Result<VerificationReport> {
    let src = LoopAlgebra::with_defaults(LoopType::new(tag, from, window)?, AlgebraOptions::extended())?;
    let tgt = LoopAlgebra::with_defaults(LoopType::new(tag, to, window)?, AlgebraOptions::extended())?;
    let e = Embedding::new(*src.ty(), *tgt.ty())?;
    let mut report = VerificationReport::new(
        "embedding",
        json!({"type": tag.to_string(), "from": from, "to": to, "window": window}),
    );
    let images: Vec<GradedElement> = (0..src.dim()).map(|i| embed(&e, src.element(i))).collect();
    let outside = images.iter().position(|x| !tgt.contains(x));
    report.push(Check::from_witness(
        "images_in_target",
        json!({"basis": src.dim()}),
        outside.map(|i| json!({"element": src.basis()[i].label})),
    ));

    let n = src.dim();
    let deg = |i: usize| src.basis()[i].degree;
    let results: Vec<(usize, usize, Option<Value>)> = (0..n)
        .into_par_iter()
        .map(|a| {
            let (mut brackets, mut forms) = (0, 0);
            for b in a..n {
                if src.ty().in_window(deg(a) + deg(b)) {
                    brackets += 1;
                    let lhs = embed(&e, &src.bracket(src.element(a), src.element(b)).expect("in window"));
                    let rhs = tgt.bracket(&images[a], &images[b]).expect("in window");
                    if lhs != rhs {
                        let w = json!({"check": "bracket", "pair": [src.basis()[a].label, src.basis()[b].label]});
                        return (brackets, forms, Some(w));
                    }
                }
                if deg(a) + deg(b) == 0 {
                    forms += 1;
                    let lhs = form_eval(src.form(), src.ty(), src.element(a), src.element(b));
                    let rhs = form_eval(tgt.form(), tgt.ty(), &images[a], &images[b]);
                    if lhs != rhs {
                        let w = json!({"check": "form", "pair": [src.basis()[a].label, src.basis()[b].label]});
                        return (brackets, forms, Some(w));
                    }
                }
            }
            (brackets, forms, None)
        })
        .collect();
    let brackets: usize = results.iter().map(|r| r.0).sum();
    let forms: usize = results.iter().map(|r| r.1).sum();
    let (bw, fw): (Vec<_>, Vec<_>) =
        results.into_iter().filter_map(|r| r.2).partition(|w| w["check"] == "bracket");
    report.push(Check::from_witness("brackets_commute", json!({"pairs": brackets}), bw.into_iter().next()));
    report.push(Check::from_witness("form_restricts", json!({"pairs": forms}), fw.into_iter().next()));
    Ok(report)
}

/// The three twists: `(source, automorphism)` whose fixed points should be C2, BC2 and B2 at rank `n`.
pub fn twist_sources(n: usize, window: i32) -> Result<Vec<(LoopType, Automorphism)>> {
    Ok(vec![
        (LoopType::a1_over(IndexUniverse::doubled(n), window)?, Automorphism::SigmaHat { letter: Letter::C, twisted: true }),
        (
            LoopType::a1_over(IndexUniverse::doubled_plus_one(n), window)?,
            Automorphism::SigmaHat { letter: Letter::B, twisted: true },
        ),
        (LoopType::new(LoopTag::D1, n + 1, window)?, Automorphism::TauHat),
    ])
}

/// Graded dimensions of the fixed algebra against the direct construction, membership where both
/// live on the same index set, and closure of the fixed points under the bracket.
pub fn check_twist(source: &LoopType, auto: Automorphism) -> Result<VerificationReport> {
    let f = fixed_algebra(source, auto)?;
    let direct = LoopAlgebra::with_defaults(f.result, AlgebraOptions::core())?;
    let mut report = VerificationReport::new(
        "twist",
        json!({"source": source.descriptor(), "automorphism": format!("{auto:?}"), "result": f.result.descriptor()}),
    );
    let fixed = f.graded_dims();
    let built = direct.graded_dims();
    let rows: BTreeMap<String, Value> =
        fixed.iter().map(|(k, d)| (k.to_string(), json!({"fixed": d, "direct": built.get(k)}))).collect();
    let witness = fixed
        .iter()
        .find(|(k, d)| built.get(k) != Some(d))
        .map(|(k, d)| json!({"degree": k, "fixed": d, "direct": built.get(k)}));
    report.push(Check::from_witness("graded_dims", json!(rows), witness));

    if source.universe() == f.result.universe() {
        let w = f.slices.iter().find_map(|(k, xs)| {
            xs.iter().position(|x| !direct.contains(x)).map(|p| json!({"degree": k, "element": xs[p].to_json()}))
        });
        report.push(Check::from_witness("fixed_in_direct", json!({}), w));
    }

    let apply = |x: &GradedElement| match auto {
        Automorphism::SigmaHat { letter, twisted } => hat_sigma(source, letter, twisted, x),
        Automorphism::TauHat => hat_tau(source, x),
    };
    let mut pairs = 0;
    let mut witness = None;
    'outer: for (k, xs) in &f.slices {
        for (l, ys) in &f.slices {
            if !source.in_window(k + l) {
                continue;
            }
            for x in xs {
                for y in ys {
                    pairs += 1;
                    let z = loop_bracket(source, x, y)?;
                    if apply(&z)? != z {
                        witness = Some(json!({"degrees": [k, l], "bracket": z.to_json()}));
                        break 'outer;
                    }
                }
            }
        }
    }
    report.push(Check::from_witness("fixed_points_closed", json!({"pairs": pairs}), witness));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a1_embedding_small() {
        let r = check_embedding(LoopTag::A1, 2, 3, 1).unwrap();
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn b2_embedding_small() {
        let r = check_embedding(LoopTag::B2, 1, 2, 1).unwrap();
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn twists_at_rank_two() {
        for (src, auto) in twist_sources(2, 1).unwrap() {
            let r = check_twist(&src, auto).unwrap();
            assert!(r.passed(), "{auto:?}: {:?}", r.failures().collect::<Vec<_>>());
        }
    }
}
