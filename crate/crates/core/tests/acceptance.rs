//! One line per acceptance criterion. Every comparison is exact equality of rationals.
//!
//! Run with `cargo test -p loopforge-core --test acceptance -- --nocapture` to see the lines.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use loopforge::exact::{frac, q};
use loopforge::forms::FormSpec;
use loopforge::loops::{AlgebraOptions, GradedElement, LoopAlgebra, LoopTag, LoopType};
use loopforge::matrix::DiagExt;
use loopforge::verify::center::check_center;
use loopforge::verify::derivations::{check_extension, solve_diagonal_derivations};
use loopforge::verify::formsuite::{check_cocycle, check_forms, fpat, DEFAULT_SEED};
use loopforge::verify::jacobi::check_jacobi;
use loopforge::verify::rootdatum::{check_root_datum, RootDatum};
use loopforge::verify::spectrum::{ad_spectrum, harmonic, spectrum_obstruction, DiagonalOperator, Verdict};
use loopforge::verify::structure::{check_embedding, check_twist, embedding_ranks, twist_sources};
use loopforge::verify::torus::check_lie_torus;
use loopforge::verify::VerificationReport;

const RANKS: [(LoopTag, usize); 7] = [
    (LoopTag::A1, 3),
    (LoopTag::B1, 2),
    (LoopTag::C1, 2),
    (LoopTag::D1, 3),
    (LoopTag::B2, 2),
    (LoopTag::C2, 2),
    (LoopTag::BC2, 2),
];
const K: i32 = 3;

type Outcome = Result<String, String>;

fn ty(tag: LoopTag, n: usize, k: i32) -> LoopType {
    LoopType::new(tag, n, k).unwrap()
}

fn alg(tag: LoopTag, n: usize, k: i32, opts: AlgebraOptions) -> LoopAlgebra {
    LoopAlgebra::with_defaults(ty(tag, n, k), opts).unwrap()
}

fn require(r: &VerificationReport, what: &str) -> Result<(), String> {
    match r.failures().next() {
        None => Ok(()),
        Some(c) => Err(format!("{what}: {} failed, witness {}", c.name, c.witness.clone().unwrap_or_default())),
    }
}

fn jacobi_all() -> Outcome {
    let mut triples = 0;
    for (tag, n) in RANKS {
        let a = alg(tag, n, K, AlgebraOptions::core());
        let r = check_jacobi(&a, &a.structure_table().unwrap(), "jacobi");
        require(&r, &format!("{tag}"))?;
        triples += r.check("jacobi").unwrap().detail["interior_triples"].as_u64().unwrap();
    }
    Ok(format!("{triples} interior triples over seven cores"))
}

fn central_extension() -> Outcome {
    let mut triples = 0;
    for (tag, n) in RANKS {
        let a = alg(tag, n, K, AlgebraOptions::extended());
        let r = check_jacobi(&a, &a.structure_table().unwrap(), "jacobi");
        require(&r, &format!("{tag} extended"))?;
        triples += r.check("jacobi").unwrap().detail["interior_triples"].as_u64().unwrap();
        let c = check_cocycle(a.ty(), &FormSpec::default(), DEFAULT_SEED, 1000).unwrap();
        if !c.passed {
            return Err(format!("{tag}: cocycle witness {}", c.witness.unwrap()));
        }
    }
    Ok(format!("{triples} interior triples; 1000 cocycle triples per type"))
}

fn form_properties() -> Outcome {
    for (tag, n) in RANKS {
        let r = check_forms(&ty(tag, n, K), &FormSpec::default(), DEFAULT_SEED, 200).unwrap();
        for name in ["symmetric", "graded", "invariant", "d0_skew"] {
            let c = r.check(name).unwrap();
            if !c.passed {
                return Err(format!("{tag}: {name} witness {}", c.witness.clone().unwrap()));
            }
        }
        if tag == LoopTag::A1 {
            let c = r.check("radical_on_hat_u").unwrap();
            if !c.passed {
                return Err(format!("radical witness {}", c.witness.clone().unwrap()));
            }
            // the radical is 0 at degree 0 and span{ι⊗t^m} elsewhere
            let dims = &c.detail;
            for m in -K..=K {
                let want = u64::from(m != 0);
                if dims[m.to_string()].as_u64() != Some(want) {
                    return Err(format!("radical dim at degree {m}: {}", dims[m.to_string()]));
                }
            }
        }
    }
    Ok("symmetric, graded, invariant, d⁰-skew on seven types; radical of B on Û as expected".into())
}

fn fpat_all() -> Outcome {
    let mut pairs = 0;
    for (tag, n) in RANKS {
        let t = ty(tag, n, K);
        let (c, t_delta) = fpat(&t, &FormSpec::default()).unwrap();
        if !c.passed {
            return Err(format!("{tag}: {}", c.witness.unwrap()));
        }
        if t_delta != GradedElement::c(&t) {
            return Err(format!("{tag}: t_δ = {}", t_delta.to_json()));
        }
        pairs += c.detail["pairs"].as_u64().unwrap();
    }
    Ok(format!("{pairs} root-space pairs; t_δ = c for all seven"))
}

fn torus_and_datum() -> Outcome {
    for (tag, n) in RANKS {
        for opts in [AlgebraOptions::core(), AlgebraOptions::extended()] {
            let a = alg(tag, n, K, opts);
            let r = check_lie_torus(&a, &a.structure_table().unwrap());
            require(&r, &format!("{tag}"))?;
        }
        require(&check_root_datum(&RootDatum::builtin(tag, 3)).unwrap(), &format!("{tag} datum"))?;
    }
    let mutants = RootDatum::mutants(3);
    for (rd, axiom) in &mutants {
        let r = check_root_datum(rd).unwrap();
        let c = r.check(axiom).unwrap();
        if c.passed || c.witness.is_none() {
            return Err(format!("{} should fail {axiom}", rd.name));
        }
    }
    Ok(format!("LT1–LT5 on 14 cores; S0–S4 on 7 built-ins; {} mutants rejected", mutants.len()))
}

fn derivation_classification() -> Outcome {
    let mut runs = Vec::new();
    for (tag, n) in RANKS {
        for m in -2..=2 {
            let s = solve_diagonal_derivations(&ty(tag, n, K), m, 2).map_err(|e| format!("{tag} m={m}: {e}"))?;
            if !s.matches() {
                return Err(format!(
                    "{tag} m={m}: solved {} predicted {} (⊆ {}, ⊇ {})",
                    s.dim(),
                    s.predicted_rank,
                    s.predicted_in_solved,
                    s.solved_in_predicted
                ));
            }
            runs.push(format!("{tag}/{m}:{}", s.dim()));
        }
    }
    Ok(format!("{} runs match, dims {}", runs.len(), runs.join(" ")))
}

fn shift_lemmas() -> Outcome {
    let mut checked = 0;
    for tag in [LoopTag::B2, LoopTag::C2, LoopTag::BC2] {
        for m in [-1, 1] {
            let s = solve_diagonal_derivations(&ty(tag, 2, 5), m, 2).unwrap();
            for d in &s.solved {
                let r = check_extension(&s.algebra, d, 2).unwrap();
                require(&r, &format!("{tag} m={m}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} odd derivations commute with s_±2 and extend"))
}

fn center() -> Outcome {
    for (tag, n) in RANKS {
        let r = check_center(
            &alg(tag, n, K, AlgebraOptions::core()),
            &alg(tag, n, K, AlgebraOptions::extended()),
            &alg(tag, n, K, AlgebraOptions::minimal_lala()),
        )
        .unwrap();
        require(&r, &format!("{tag}"))?;
    }
    Ok("plain center 0, extended center Fc, [L_0^m, L_0^−m] = Fc, root dims 1 vs 2".into())
}

fn spectrum() -> Outcome {
    let t = ty(LoopTag::A1, 4, 1);
    let d = DiagonalOperator::new(harmonic(4), q(1));
    for m in 1..=4usize {
        for n in (1..=4usize).filter(|n| *n != m) {
            let ev = ad_spectrum(&t, &d, &[GradedElement::unit(&t, m, n, 0)]).unwrap();
            let want = frac(1, m as i64) - frac(1, n as i64);
            if ev[0] != want {
                return Err(format!("e_{m}{n}: {} ≠ {want}", ev[0]));
            }
        }
    }
    let h = spectrum_obstruction(&harmonic(4), 4, 1, 12).unwrap();
    let z = spectrum_obstruction(&DiagExt::zero(), 4, 1, 12).unwrap();
    if h.verdict != Verdict::Distinguishable || z.verdict != Verdict::Inconclusive {
        return Err(format!("verdicts {} / {}", h.verdict, z.verdict));
    }
    Ok("1/m − 1/n on e_mn⊗t⁰; harmonic distinguishable, p = 0 inconclusive".into())
}

fn embeddings() -> Outcome {
    let mut done = Vec::new();
    for (tag, _) in RANKS {
        let (from, to) = embedding_ranks(tag);
        require(&check_embedding(tag, from, to, 2).unwrap(), &format!("{tag}"))?;
        done.push(format!("{tag} {from}→{to}"));
    }
    Ok(done.join(", "))
}

fn twists() -> Outcome {
    let mut done = Vec::new();
    for (src, auto) in twist_sources(2, K).unwrap() {
        let r = check_twist(&src, auto).unwrap();
        require(&r, &format!("{auto:?}"))?;
        done.push(r.subject["result"]["type"].as_str().unwrap().to_string());
    }
    Ok(format!("fixed algebras match {} degree by degree", done.join(", ")))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("Jacobi on seven cores", jacobi_all),
        ("central extension and cocycle", central_extension),
        ("form properties", form_properties),
        ("FPAT and t_δ = c", fpat_all),
        ("torus axioms and root data", torus_and_datum),
        ("derivation classification", derivation_classification),
        ("shift lemmas and extension", shift_lemmas),
        ("center", center),
        ("spectrum obstruction", spectrum),
        ("directed union coherence", embeddings),
        ("twist consistency", twists),
    ];
    let mut failed = Vec::new();
    println!();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                println!("FAIL {:>2} {name} ({secs:.1}s): {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
