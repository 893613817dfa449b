use std::sync::OnceLock;

use proptest::prelude::*;

use loopforge::exact::{frac, q, Rational};
use loopforge::forms::{form_eval, FormSpec};
use loopforge::linalg::SparseVec;
use loopforge::loops::{shift, AlgebraOptions, GradedElement, LoopAlgebra, LoopTag, LoopType};
use loopforge::matrix::DiagExt;
use loopforge::verify::rootdatum::Progression;
use loopforge::verify::spectrum::{ad_spectrum, DiagonalOperator};

const TYPES: [(LoopTag, usize); 7] = [
    (LoopTag::A1, 3),
    (LoopTag::B1, 2),
    (LoopTag::C1, 2),
    (LoopTag::D1, 3),
    (LoopTag::B2, 2),
    (LoopTag::C2, 2),
    (LoopTag::BC2, 2),
];

// Maximal algebras (with T′, c and d⁰) at window 3, built once.
fn algebras() -> &'static Vec<LoopAlgebra> {
    static ALGS: OnceLock<Vec<LoopAlgebra>> = OnceLock::new();
    ALGS.get_or_init(|| {
        TYPES
            .iter()
            .map(|(tag, n)| {
                let ty = LoopType::new(*tag, *n, 3).unwrap();
                let opts = if *tag == LoopTag::A1 { AlgebraOptions::hat_u() } else { AlgebraOptions::maximal_lala() };
                LoopAlgebra::with_defaults(ty, opts).unwrap()
            })
            .collect()
    })
}

// An element of degree within ±1, from (basis pick, coefficient) pairs.
fn element(alg: &LoopAlgebra, picks: &[(usize, i64)]) -> GradedElement {
    let pool: Vec<usize> = (0..alg.dim()).filter(|i| alg.basis()[*i].degree.abs() <= 1).collect();
    let v: SparseVec<usize> = picks
        .iter()
        .filter(|(_, c)| *c != 0)
        .map(|(i, c)| (pool[i % pool.len()], q(*c)))
        .collect();
    alg.from_coordinates(&v)
}

fn picks() -> impl Strategy<Value = Vec<(usize, i64)>> {
    prop::collection::vec((0usize..10_000, -4i64..=4), 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bracket_is_antisymmetric(t in 0usize..7, a in picks(), b in picks()) {
        let alg = &algebras()[t];
        let (x, y) = (element(alg, &a), element(alg, &b));
        let xy = alg.bracket(&x, &y).unwrap();
        let yx = alg.bracket(&y, &x).unwrap();
        prop_assert!(xy.add(&yx).is_zero());
    }

    #[test]
    fn jacobi_on_random_elements(t in 0usize..7, a in picks(), b in picks(), c in picks()) {
        let alg = &algebras()[t];
        let (x, y, z) = (element(alg, &a), element(alg, &b), element(alg, &c));
        let br = |u: &GradedElement, v: &GradedElement| alg.bracket(u, v).unwrap();
        let sum = br(&br(&x, &y), &z).add(&br(&br(&y, &z), &x)).add(&br(&br(&z, &x), &y));
        prop_assert!(sum.is_zero());
    }

    #[test]
    fn form_is_symmetric_and_invariant(t in 0usize..7, a in picks(), b in picks(), c in picks()) {
        let alg = &algebras()[t];
        let (ty, f) = (alg.ty(), FormSpec::default());
        let (x, y, z) = (element(alg, &a), element(alg, &b), element(alg, &c));
        prop_assert_eq!(form_eval(&f, ty, &x, &y), form_eval(&f, ty, &y, &x));
        let lhs = form_eval(&f, ty, &alg.bracket(&x, &y).unwrap(), &z);
        let rhs = form_eval(&f, ty, &x, &alg.bracket(&y, &z).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn coordinates_roundtrip(t in 0usize..7, a in picks()) {
        let alg = &algebras()[t];
        let x = element(alg, &a);
        prop_assert_eq!(alg.from_coordinates(&alg.coordinates(&x).unwrap()), x.clone());
        let back = GradedElement::from_json(alg.ty(), &x.to_json()).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn even_shifts_compose(t in 0usize..7, a in picks(), j in -1i32..=1, k in -1i32..=1) {
        let alg = &algebras()[t];
        let x = element(alg, &a).loop_part();
        let ty = alg.ty();
        let (j, k) = (2 * j, 2 * k);
        if x.degrees().all(|d| ty.in_window(d + j) && ty.in_window(d + j + k) && ty.in_window(d + k)) {
            let lhs = shift(ty, k, &shift(ty, j, &x).unwrap()).unwrap();
            prop_assert_eq!(lhs, shift(ty, j + k, &x).unwrap());
        }
    }

    #[test]
    fn progression_arithmetic_is_closed(r1 in 0i64..4, m1 in 1i64..4, r2 in 0i64..4, m2 in 1i64..4,
                                        k in -3i64..=3, s in -5i64..=5, t in -5i64..=5) {
        let (p, o) = (Progression::new(r1, m1), Progression::new(r2, m2));
        let (a, b) = (r1 + s * m1, r2 + t * m2);
        prop_assert!(p.contains(a) && o.contains(b));
        prop_assert!(p.minus_multiple(k, &o).contains(a - k * b));
        prop_assert!(p.sum(&o).contains(a + b));
        prop_assert!(p.doubled().contains(2 * a));
    }

    #[test]
    fn spectrum_matches_formula(ps in prop::collection::vec((-6i64..=6, 1i64..=6), 3),
                                a in -4i64..=4, i in 1usize..=3, j in 1usize..=3, k in -2i32..=2) {
        prop_assume!(i != j);
        let ty = LoopType::new(LoopTag::A1, 3, 2).unwrap();
        let p = DiagExt::from_finite(ps.iter().enumerate().map(|(n, (u, v))| (n + 1, frac(*u, *v))));
        let ev = ad_spectrum(&ty, &DiagonalOperator::new(p, q(a)), &[GradedElement::unit(&ty, i, j, k)]).unwrap();
        let pi = frac(ps[i - 1].0, ps[i - 1].1);
        let pj = frac(ps[j - 1].0, ps[j - 1].1);
        let want: Rational = q(a) * q(k as i64) + pi - pj;
        prop_assert_eq!(ev[0].clone(), want);
    }
}
