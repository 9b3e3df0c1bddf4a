use std::collections::BTreeSet;

use proptest::prelude::*;
use rug::{Integer, Rational};

use cubic_thue::bounds::{prop1_bound, sine_bound, BakerConfig};
use cubic_thue::config::Config;
use cubic_thue::cubicfield::{cubic_discriminant, CubicField, FieldElement};
use cubic_thue::family::example_family;
use cubic_thue::interval::{ComplexInterval, Interval};
use cubic_thue::reduction::unit_reduce;
use cubic_thue::solver::{brute_force_oracle, exhaustive_box_scan, solve_box, SearchSpec};
use cubic_thue::tracer::trace_solution;

fn element() -> impl Strategy<Value = FieldElement> {
    prop::array::uniform3(-100i64..=100).prop_map(FieldElement::from_i64s)
}

fn has_rational_root(c: &[i64; 3]) -> bool {
    // Monic: rational roots are integer divisors of the constant term.
    let d = c[2];
    if d == 0 {
        return true;
    }
    (1..=d.unsigned_abs() as i64)
        .filter(|r| d % r == 0)
        .flat_map(|r| [r, -r])
        .any(|r| r * r * r + c[0] * r * r + c[1] * r + c[2] == 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn norm_and_trace_match_conjugates(x in element(), d in 1i64..=4) {
        prop_assume!(!x.is_zero());
        let fam = example_family(d).unwrap();
        let k = fam.field();
        let (r, c) = k.embed(&x, 1e-30);
        let prec = r.prec();
        let prod = &r * &c.abs_sqr();
        let sum = &r + &c.re.mul_i64(2);
        let n = Interval::from_rational(prec, &k.norm(&x));
        let t = Interval::from_rational(prec, &k.trace(&x));
        prop_assert!(prod.overlaps(&n), "norm {} vs {}", n, prod);
        prop_assert!(sum.overlaps(&t), "trace {} vs {}", t, sum);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn addition_is_exact(x in element(), y in element()) {
        prop_assert_eq!(&(&x + &y) - &y, x);
    }

    #[test]
    fn finer_requests_do_not_widen(x in element()) {
        prop_assume!(!x.is_zero());
        let fam = example_family(1).unwrap();
        let (r1, c1) = fam.field().embed(&x, 1e-20);
        let (r2, c2) = fam.field().embed(&x, 1e-40);
        prop_assert!(r2.width_f64() <= r1.width_f64());
        prop_assert!(c2.max_width() <= c1.max_width());
        prop_assert!(r1.overlaps(&r2));
    }

    #[test]
    fn accepted_fields_are_complex_and_irreducible(c in prop::array::uniform3(-30i64..=30)) {
        let disc = cubic_discriminant(&Integer::from(c[0]), &Integer::from(c[1]), &Integer::from(c[2]));
        let accepted = CubicField::from_i64([1, c[0], c[1], c[2]]).is_ok();
        prop_assert_eq!(accepted, disc < 0 && !has_rational_root(&c));
    }

    #[test]
    fn unit_reduction_reconstructs(x in prop::array::uniform3(-50i64..=50), d in 1i64..=5) {
        let g = FieldElement::from_i64s(x);
        prop_assume!(!g.is_zero());
        let fam = example_family(d).unwrap();
        let k = fam.field();
        let dec = unit_reduce(&fam, &g).unwrap();
        prop_assert_eq!(k.mul(&k.pow(fam.epsilon(), dec.ell).unwrap(), &dec.xi), g);
        let half = dec.regulator.div(&Interval::from_i64(dec.regulator.prec(), 2));
        prop_assert!(dec.balance.hi().to_f64() <= half.hi().to_f64() + 1e-9);
        prop_assert_eq!(Rational::from(k.norm(&dec.xi).abs_ref()), dec.norm_abs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pruned_solver_equals_oracle(d in 1i64..=6, k in 1i64..=60, lo in -6i64..=0, len in 0i64..=6, y_max in 1u64..=400) {
        let fam = example_family(d).unwrap();
        let spec = SearchSpec::new(k, lo, lo + len, y_max);
        let a = solve_box(&fam, &spec);
        prop_assert_eq!(&a, &brute_force_oracle(&fam, &spec));
        let keys: BTreeSet<_> = a.iter().map(|r| r.triple()).collect();
        for r in &a {
            let v = fam.form_at(r.n).evaluate(&r.x, &r.y);
            prop_assert!(v == r.value && v != 0 && v.cmp_abs(&spec.k).is_le());
            // The forms are odd.
            prop_assert!(keys.contains(&(r.n, (-&r.x).into(), (-&r.y).into())));
        }
    }

    #[test]
    fn oracle_equals_literal_box(d in 1i64..=4, k in 1i64..=40, b in 5u64..=40) {
        let fam = example_family(d).unwrap();
        let spec = SearchSpec::new(k, -4, 4, b);
        let lit = exhaustive_box_scan(&fam, &spec, b);
        let bound = Integer::from(b);
        let ora: Vec<_> = brute_force_oracle(&fam, &spec)
            .into_iter()
            .filter(|r| r.x.cmp_abs(&bound).is_le())
            .collect();
        prop_assert_eq!(lit, ora);
    }

    #[test]
    fn sine_bound_decreasing(n in 0i64..1000, c in 0.01f64..5.0) {
        prop_assert!(sine_bound(n + 1, c) < sine_bound(n, c));
        prop_assert!(sine_bound(-n - 1, c) < sine_bound(n, c));
        prop_assert!(sine_bound(n, c + 0.01) < sine_bound(n, c));
    }

    #[test]
    fn prop1_is_deterministic(a in 1.0f64..5.0, b in 3.0f64..100.0) {
        let cfg = BakerConfig::default();
        let x = prop1_bound(&cfg, 3, [a, a, a], b).unwrap();
        let y = prop1_bound(&cfg, 3, [a, a, a], b).unwrap();
        prop_assert_eq!(x.to_bits(), y.to_bits());
    }
}

#[test]
fn negative_n_solutions_match_swapped() {
    // F_{-m}(x, y) = -F_{m-2}(y, x).
    let fam = example_family(1).unwrap();
    let spec = SearchSpec::new(20, -5, 3, 300);
    let sols = solve_box(&fam, &spec);
    for m in 2..=5 {
        let neg: BTreeSet<_> = sols.iter().filter(|r| r.n == -m).map(|r| (r.x.clone(), r.y.clone())).collect();
        let pos: BTreeSet<_> = sols
            .iter()
            .filter(|r| r.n == m - 2)
            .map(|r| (r.y.clone(), r.x.clone()))
            .collect();
        assert_eq!(neg, pos, "m = {m}");
    }
}

#[test]
fn traces_of_swept_solutions() {
    let cfg = Config::default();
    for d in [1, 2, 4] {
        let fam = example_family(d).unwrap();
        let k = Integer::from(30);
        let spec = SearchSpec::new(30, -4, 6, 300);
        for r in solve_box(&fam, &spec) {
            let c = trace_solution(&fam, r.n, &r.x, &r.y, Some(&k), &cfg).unwrap();
            let t = &c.trace;
            assert!(t.sum_contains_zero() && t.purely_imaginary(1e-20) && t.forms_agree);
            assert!(t.classification.as_ref().unwrap().domination_holds);
            assert!(c.ledger.iter().all(|row| row.lhs.is_finite()));
            if let Some(l) = &c.lambda {
                assert!(l.h_bound_holds && l.identity_holds && l.relation_holds);
                if let Some(b) = &l.baker {
                    assert!(b.holds);
                }
            }
        }
    }
}

#[test]
fn log_check_matches_direct_log() {
    // Independent check: |log z| via f64 complex arithmetic.
    for (re, im) in [(1.25, 0.0), (0.8, 0.3), (1.1, -0.4), (0.6, 0.1)] {
        let z = ComplexInterval::new(Interval::point(128, re), Interval::point(128, im));
        let c = cubic_thue::bounds::log_near_one_check(&z).unwrap();
        let direct = ((re * re + im * im).sqrt().ln().powi(2) + im.atan2(re).powi(2)).sqrt();
        assert!((c.lhs.mid_f64() - direct).abs() < 1e-14);
        assert!(c.holds);
    }
}
