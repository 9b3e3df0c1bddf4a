//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so that the lines are always printed.
//! A criterion listed in `KNOWN_FAILURES` is still evaluated and reported
//! as FAIL; it only does not change the exit status.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Complete, Integer};

use cubic_thue::bounds::{calibrate_c2, sine_chain, exp_minus_one_check, log_near_one_check, sine_bound_holds};
use cubic_thue::config::Config;
use cubic_thue::cubicfield::FieldElement;
use cubic_thue::family::{coefficient_sequence, example_family, swap_identity_check, BinaryCubicForm};
use cubic_thue::heights::{abs_log_height, regulator};
use cubic_thue::interval::{ComplexInterval, Interval};
use cubic_thue::reduction::unit_reduce;
use cubic_thue::solver::{brute_force_oracle, solve_box, k_sweep, SearchSpec};
use cubic_thue::tracer::{trace_solution, TermCase};

/// Criterion 8 asks for `|sin(δ1 + nδ2)| ≥ (√2/2)|γ1γ2^n − 1|`. With
/// `δ1 = 0` this reads `|cos(nδ2/2)| ≥ √2/2`, false for about half of all
/// `n`; only the form with `(−1)^ℓ·γ1γ2^n` is true.
const KNOWN_FAILURES: &[u32] = &[8];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn crit1() -> Outcome {
    let cube = BinaryCubicForm::from_i64([1, -3, 3, -1]);
    for d in 1..=5i64 {
        let fam = example_family(d).unwrap();
        if fam.form_at(-1) != cube {
            return outcome(false, format!("F_-1 differs for D = {d}"));
        }
        for n in -20..=20 {
            if !swap_identity_check(&fam, n).holds {
                return outcome(false, format!("swap identity fails at D = {d}, n = {n}"));
            }
        }
        let seq = coefficient_sequence(d, -22, 20).unwrap();
        if !seq.recurrence_holds {
            return outcome(false, format!("recurrence fails for D = {d}"));
        }
        let initial = [
            (0, 3 * d * d),
            (-1, 3),
            (-2, -3 * d),
        ];
        for (n, v) in initial {
            if *seq.get(n).unwrap() != v {
                return outcome(false, format!("a_{n} wrong for D = {d}"));
            }
        }
        // Independent oracle: run the recurrence from a_{-2}, a_{-1}, a_0
        // in both directions and compare with the forms' X²Y coefficients.
        let (c2, c1) = (Integer::from(3 * d * d), Integer::from(3 * d));
        let mut a: std::collections::BTreeMap<i64, Integer> =
            initial.iter().map(|&(n, v)| (n, Integer::from(v))).collect();
        for n in 1..=20 {
            let v = (&c2 * &a[&(n - 1)]).complete() + (&c1 * &a[&(n - 2)]).complete() + &a[&(n - 3)];
            a.insert(n, v);
        }
        for n in (-22..=-3).rev() {
            // a_n = a_{n+3} − 3D²a_{n+2} − 3D·a_{n+1}.
            let v = Integer::from(&a[&(n + 3)] - (&c2 * &a[&(n + 2)]).complete()) - (&c1 * &a[&(n + 1)]).complete();
            a.insert(n, v);
        }
        for n in -20..=20 {
            if fam.form_at(n).a[1] != (-&a[&n]).complete() {
                return outcome(false, format!("a_{n} disagrees with F_{n} for D = {d}"));
            }
        }
    }
    outcome(true, "D in 1..5, n in [-20, 20]")
}

fn crit2() -> Outcome {
    let seq = coefficient_sequence(2, -2, 1).unwrap();
    let r = &seq.discrepancy;
    let pass = r.a1_trace == 156 && r.a1_swapped_order == 102 && r.corrected_matches() && !r.swapped_order_matches();
    outcome(
        pass,
        format!(
            "D = 2: tr(eps^2) = {}, order (3D, 3D^2) gives {}, order (3D^2, 3D) gives {}",
            r.a1_trace, r.a1_swapped_order, r.a1_corrected
        ),
    )
}

fn crit3() -> Outcome {
    let mut worst_h = 0f64;
    let mut worst_m = 0f64;
    for d in 1..=5 {
        let fam = example_family(d).unwrap();
        let r = regulator(&fam, 1e-25).unwrap();
        let h = abs_log_height(fam.field(), fam.epsilon(), 1e-25).unwrap();
        let dh = (&h.height - &r.div(&Interval::from_i64(r.prec(), 3))).abs();
        worst_h = worst_h.max(dh.hi().to_f64());
        let (re, c) = fam.field().embed(fam.epsilon(), 1e-30);
        let dm = (&c.abs() - &re.sqrt().recip()).abs();
        worst_m = worst_m.max(dm.hi().to_f64());
    }
    outcome(
        worst_h <= 1e-12 && worst_m <= 1e-20,
        format!("max |h(eps) - R/3| <= {worst_h:.2e}, max ||eps'| - eps^(-1/2)| <= {worst_m:.2e}"),
    )
}

fn crit4() -> Outcome {
    let fam = example_family(1).unwrap();
    let k = fam.field();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = f64::NEG_INFINITY;
    let mut done = 0;
    while done < 200 {
        let c: [i64; 3] = std::array::from_fn(|_| rng.random_range(-50..=50));
        let g = FieldElement::from_i64s(c);
        if g.is_zero() {
            continue;
        }
        let d = unit_reduce(&fam, &g).unwrap();
        if k.mul(&k.pow(fam.epsilon(), d.ell).unwrap(), &d.xi) != g {
            return outcome(false, format!("reconstruction fails for {g}"));
        }
        let half_r = d.regulator.div(&Interval::from_i64(d.regulator.prec(), 2));
        let slack = (&d.balance - &half_r).hi().to_f64();
        if slack > 1e-9 {
            return outcome(false, format!("balance exceeds R/2 for {g}"));
        }
        worst = worst.max(slack);
        done += 1;
    }
    outcome(true, format!("200 elements, max(balance - R/2) = {worst:.3e}"))
}

fn crit5() -> Outcome {
    let cfg = Config::default();
    let (mut traces, mut third) = (0, 0);
    let mut cases = [0usize; 3];
    for d in 1..=3 {
        let fam = example_family(d).unwrap();
        let spec = SearchSpec::new(10, -8, 8, 1000);
        let k = Integer::from(10);
        for r in solve_box(&fam, &spec) {
            let cert = match trace_solution(&fam, r.n, &r.x, &r.y, Some(&k), &cfg) {
                Ok(c) => c,
                Err(e) => return outcome(false, format!("D = {d} ({}, {}, {}): {e}", r.n, r.x, r.y)),
            };
            let t = &cert.trace;
            let cls = t.classification.as_ref().unwrap();
            let ok = t.sum_contains_zero() && t.purely_imaginary(1e-20) && cls.domination_holds;
            if !ok {
                return outcome(false, format!("D = {d} ({}, {}, {}): audit fails", r.n, r.x, r.y));
            }
            cases[cls.case as usize] += 1;
            if cls.case == TermCase::T2T3 {
                third += 1;
                let l = cert.lambda.as_ref().unwrap();
                if !l.h_bound_holds {
                    return outcome(false, format!("|h| > |l| + 2 at D = {d} ({}, {}, {})", r.n, r.x, r.y));
                }
            }
            traces += 1;
        }
    }
    outcome(
        true,
        format!(
            "{traces} traces (T1T2: {}, T1T3: {}, T2T3: {}), {third} with |h| <= |l| + 2 checked",
            cases[0], cases[1], cases[2]
        ),
    )
}

fn crit6() -> Outcome {
    let mut counts = Vec::new();
    for d in 1..=3 {
        let fam = example_family(d).unwrap();
        let spec = SearchSpec::new(10, -8, 8, 10_000);
        let a = solve_box(&fam, &spec);
        let b = brute_force_oracle(&fam, &spec);
        if a != b {
            return outcome(false, format!("D = {d}: pruned and oracle outputs differ"));
        }
        for r in &a {
            let v = fam.form_at(r.n).evaluate(&r.x, &r.y);
            if v != r.value || v == 0 || Integer::from(v.abs_ref()) > 10 {
                return outcome(false, format!("D = {d}: record ({}, {}, {}) fails re-verification", r.n, r.x, r.y));
            }
        }
        counts.push(a.len());
    }
    outcome(true, format!("solutions per D = 1, 2, 3: {counts:?}"))
}

fn crit7() -> Outcome {
    let mut added = Vec::new();
    for d in 1..=3 {
        let fam = example_family(d).unwrap();
        let spec = SearchSpec::new(10, -8, 8, 10_000);
        let a = solve_box(&fam, &spec);
        let b = solve_box(&fam, &spec.with_y_max(20_000));
        added.push(b.len() as i64 - a.len() as i64);
    }
    outcome(added.iter().all(|&v| v == 0), format!("solutions added per D = 1, 2, 3: {added:?}"))
}

fn crit8() -> Outcome {
    let fam = example_family(1).unwrap();
    let (_, c) = fam.field().embed(fam.epsilon(), 1e-30);
    let theta = c.arg_positive().unwrap();
    let zero = Interval::zero(theta.prec());
    let cal = match calibrate_c2(&zero, &theta, 10_000) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let round_trip = cal.worst_n.is_none_or(|n| sine_bound_holds(&zero, &theta, n, cal.c2));
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut literal, mut signed, mut odd) = (0, 0, 0);
    for _ in 0..100 {
        let n = rng.random_range(1..=10_000i64) * if rng.random_bool(0.5) { 1 } else { -1 };
        let ch = sine_chain(&zero, &theta, n);
        literal += ch.holds_literal as u32;
        signed += ch.holds_signed as u32;
        odd += ch.ell_parity_odd as u32;
    }
    let pass = cal.c2.is_finite() && round_trip && literal == 100;
    outcome(
        pass,
        format!(
            "c2 = {:.6} (worst n = {:?}, round trip {}), literal chain holds for {literal}/100 n, \
             signed chain (-1)^l holds for {signed}/100 ({odd} with odd l)",
            cal.c2,
            cal.worst_n,
            if round_trip { "ok" } else { "fails" }
        ),
    )
}

fn crit9() -> Outcome {
    let prec = 128;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut min_a = f64::INFINITY;
    let mut min_b = f64::INFINITY;
    for _ in 0..1000 {
        let (r, phi) = (rng.random_range(1e-6..1.0f64).sqrt(), rng.random_range(0.0..std::f64::consts::TAU));
        let t = ComplexInterval::new(Interval::point(prec, r * phi.cos()), Interval::point(prec, r * phi.sin()));
        let a = exp_minus_one_check(&t);
        if !(a.holds && a.margin.is_positive()) {
            return outcome(false, format!("part (a) fails at t = {t}"));
        }
        min_a = min_a.min(a.margin.lo().to_f64());
        let (r, phi) = (0.4999 * rng.random_range(1e-6..1.0f64).sqrt(), rng.random_range(0.0..std::f64::consts::TAU));
        let z = ComplexInterval::new(Interval::point(prec, 1.0 + r * phi.cos()), Interval::point(prec, r * phi.sin()));
        let b = match log_near_one_check(&z) {
            Ok(b) => b,
            Err(e) => return outcome(false, format!("part (b) at z = {z}: {e}")),
        };
        if !(b.holds && b.margin.is_positive()) {
            return outcome(false, format!("part (b) fails at z = {z}"));
        }
        min_b = min_b.min(b.margin.lo().to_f64());
    }
    outcome(true, format!("1000 samples each, min margins {min_a:.3e} (a), {min_b:.3e} (b)"))
}

fn crit10() -> Outcome {
    let fam = example_family(1).unwrap();
    let template = SearchSpec::new(1, -8, 8, 10_000);
    let rows = k_sweep(&fam, &[2, 5, 10, 20], &template);
    let maxes: Vec<f64> = rows.iter().map(|r| r.log_max_quantity.unwrap_or(f64::NEG_INFINITY)).collect();
    let monotone = maxes.windows(2).all(|w| w[0] <= w[1]);
    let finite = rows.iter().all(|r| r.fitted_exponent.is_some_and(f64::is_finite));
    let desc: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "k={}: {} sols, exponent {:.4}, kappa4 {:.4}",
                r.k,
                r.solutions,
                r.fitted_exponent.unwrap_or(f64::NAN),
                r.kappa4_emp.unwrap_or(f64::NAN)
            )
        })
        .collect();
    outcome(monotone && finite, desc.join("; "))
}

fn main() {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 10] = [
        (1, "example-family identities", Duration::from_secs(5), crit1),
        (2, "recurrence order discrepancy", Duration::from_secs(5), crit2),
        (3, "height and regulator", Duration::from_secs(5), crit3),
        (4, "unit reduction", Duration::from_secs(30), crit4),
        (5, "unit-equation audit", Duration::from_secs(120), crit5),
        (6, "solver equals oracle", Duration::from_secs(300), crit6),
        (7, "box stability", Duration::from_secs(600), crit7),
        (8, "sine-bound calibration and chain", Duration::from_secs(60), crit8),
        (9, "exponential estimates", Duration::from_secs(10), crit9),
        (10, "sweep over k", Duration::from_secs(600), crit10),
    ];
    let mut unexpected = Vec::new();
    for (id, name, limit, f) in criteria {
        let start = Instant::now();
        let o = f();
        let took = start.elapsed();
        let pass = o.pass && took <= limit;
        let known = KNOWN_FAILURES.contains(&id);
        let tag = match (pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!(
            "criterion {id:>2}: {tag} - {name}: {} [{:.2}s, limit {}s]",
            o.detail,
            took.as_secs_f64(),
            limit.as_secs()
        );
        if !pass && !known {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
