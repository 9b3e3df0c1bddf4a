//! Exhaustive solving of `0 < |F_n(x, y)| ≤ k` for `n` in a range and
//! `|y| ≤ y_max`, with `x` unrestricted.
//!
//! [`solve_box`] prunes each `(n, y)` stripe with certified enclosures of
//! the conjugates of `β = ε^n·α`, using
//! `F_n(x, y) = (x − βy)·((x − u)² + v²)` with `u = Re(β′)·y`,
//! `v = Im(β′)·y`. [`brute_force_oracle`] uses no embeddings at all: it
//! splits `x ↦ F_n(x, y)` into monotone pieces with exact integer square
//! roots and binary-searches each piece.

use std::cmp::Ordering;

use rayon::prelude::*;
use rug::ops::DivRounding;
use rug::{Complete, Integer};
use serde::Serialize;

use crate::family::{BinaryCubicForm, FormFamily};
use crate::interval::{ComplexInterval, Interval};
use crate::reduction::{decompose_solution, Decomposition};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchSpec {
    pub k: Integer,
    pub n_lo: i64,
    pub n_hi: i64,
    pub y_max: u64,
    pub exclude_trivial: bool,
    pub exclude_degenerate: bool,
}

impl SearchSpec {
    pub fn new(k: i64, n_lo: i64, n_hi: i64, y_max: u64) -> Self {
        SearchSpec {
            k: Integer::from(k),
            n_lo,
            n_hi,
            y_max,
            exclude_trivial: true,
            exclude_degenerate: true,
        }
    }

    pub fn with_y_max(&self, y_max: u64) -> Self {
        SearchSpec {
            y_max,
            ..self.clone()
        }
    }

    fn ns(&self, fam: &FormFamily) -> Vec<i64> {
        (self.n_lo..=self.n_hi)
            .filter(|&n| !(self.exclude_degenerate && fam.is_degenerate(n)))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct SolutionRecord {
    pub n: i64,
    pub x: Integer,
    pub y: Integer,
    pub value: Integer,
    /// `gcd(x, y) = 1`.
    pub primitive: bool,
    pub decomposition: Option<Decomposition>,
}

impl SolutionRecord {
    fn new(n: i64, x: Integer, y: Integer, value: Integer) -> Self {
        let primitive = x.clone().gcd(&y) == 1;
        SolutionRecord {
            n,
            x,
            y,
            value,
            primitive,
            decomposition: None,
        }
    }

    pub fn key(&self) -> (i64, &Integer, &Integer) {
        (self.n, &self.y, &self.x)
    }

    pub fn triple(&self) -> (i64, Integer, Integer) {
        (self.n, self.x.clone(), self.y.clone())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "n": self.n,
            "x": self.x.to_string(),
            "y": self.y.to_string(),
            "value": self.value.to_string(),
            "primitive": self.primitive,
        });
        if let Some(d) = &self.decomposition {
            v["ell"] = d.ell.into();
            v["xi1"] = d.xi.to_strings().to_vec().into();
        }
        v
    }
}

impl PartialEq for SolutionRecord {
    fn eq(&self, o: &Self) -> bool {
        self.key() == o.key() && self.value == o.value
    }
}

impl Eq for SolutionRecord {}

fn sort_records(v: &mut [SolutionRecord]) {
    v.sort_by(|a, b| a.key().cmp(&b.key()));
}

/// `0 < |v| ≤ k`.
fn admissible(v: &Integer, k: &Integer) -> bool {
    *v != 0 && v.cmp_abs(k) != Ordering::Greater
}

/// Solutions with `x·y = 0`: `y = 0` needs `|x|³ ≤ k`, `x = 0` needs
/// `|a3|·|y|³ ≤ k`.
fn trivial_solutions(form: &BinaryCubicForm, n: i64, spec: &SearchSpec) -> Vec<SolutionRecord> {
    let mut out = Vec::new();
    let c = spec.k.clone().root(3);
    let c = c.to_i64().unwrap_or(i64::MAX / 4);
    for x in -c..=c {
        if x == 0 {
            continue;
        }
        let v = form.evaluate_i64(x, 0);
        if admissible(&v, &spec.k) {
            out.push(SolutionRecord::new(n, Integer::from(x), Integer::new(), v));
        }
    }
    for y in -(c.min(spec.y_max as i64))..=c.min(spec.y_max as i64) {
        if y == 0 {
            continue;
        }
        let v = form.evaluate_i64(0, y);
        if admissible(&v, &spec.k) {
            out.push(SolutionRecord::new(n, Integer::new(), Integer::from(y), v));
        }
    }
    out
}

/// `|x| ≤ |y|·(2 + 2A) + k + 2`, `A = max|a_i|`, contains every `x` with
/// `|F(x, y)| ≤ k` for a monic form and `y ≠ 0`.
pub fn x_bound(form: &BinaryCubicForm, y: &Integer, k: &Integer) -> Integer {
    let a = form.a[1..]
        .iter()
        .map(|c| c.clone().abs())
        .max()
        .unwrap_or_default();
    let ya = y.clone().abs();
    (ya * (a * 2u32 + 2u32)) + k + 2u32
}

struct Stripe<'a> {
    form: &'a BinaryCubicForm,
    y: Integer,
    k: &'a Integer,
}

impl Stripe<'_> {
    fn eval(&self, x: &Integer) -> Integer {
        if let (Some(xi), Some(yi)) = (x.to_i128(), self.y.to_i128()) {
            if let Some(v) = self.form.evaluate_i128(xi, yi) {
                return Integer::from(v);
            }
        }
        self.form.evaluate(x, &self.y)
    }

    /// Appends every `x ∈ [lo, hi]` with `0 < |F(x, y)| ≤ k`, assuming
    /// `F(·, y)` is monotone on the range.
    fn scan_monotone(&self, lo: &Integer, hi: &Integer, out: &mut Vec<Integer>) {
        if lo > hi {
            return;
        }
        let increasing = self.eval(lo) <= self.eval(hi);
        let neg_k = (-self.k).complete();
        // First x with f(x) ≥ −k (increasing) or f(x) ≤ k (decreasing).
        let enters = |v: &Integer| {
            if increasing {
                *v >= neg_k
            } else {
                v <= self.k
            }
        };
        let leaves = |v: &Integer| {
            if increasing {
                v > self.k
            } else {
                *v < neg_k
            }
        };
        let first = self.partition_point(lo, hi, &enters);
        let Some(first) = first else { return };
        let mut x = first;
        while &x <= hi {
            let v = self.eval(&x);
            if leaves(&v) {
                break;
            }
            if admissible(&v, self.k) {
                out.push(x.clone());
            }
            x += 1;
        }
    }

    /// Smallest `x ∈ [lo, hi]` with `pred(f(x))`, for a predicate that is
    /// monotone along the range.
    fn partition_point(
        &self,
        lo: &Integer,
        hi: &Integer,
        pred: &dyn Fn(&Integer) -> bool,
    ) -> Option<Integer> {
        if !pred(&self.eval(hi)) {
            return None;
        }
        let mut a = lo.clone();
        let mut b = hi.clone();
        while a < b {
            let mid: Integer = (&a + &b).complete() >> 1;
            // Floor division keeps mid in [a, b).
            let mid = if mid < a { a.clone() } else { mid };
            if pred(&self.eval(&mid)) {
                b = mid;
            } else {
                a = mid + 1;
            }
        }
        Some(a)
    }

    fn scan_all(&self, lo: &Integer, hi: &Integer, out: &mut Vec<Integer>) {
        let mut x = lo.clone();
        while &x <= hi {
            if admissible(&self.eval(&x), self.k) {
                out.push(x.clone());
            }
            x += 1;
        }
    }

    /// Exact search over `|x| ≤ x_bound`, no embeddings involved.
    fn oracle(&self) -> Vec<Integer> {
        let a1 = &self.form.a[1];
        let a2 = &self.form.a[2];
        let xb = x_bound(self.form, &self.y, self.k);
        let lo = (-&xb).complete();
        let mut out = Vec::new();
        // f'(x) = 3x² + 2·a1·y·x + a2·y²; critical points
        // (−a1·y ± √(Δ·y²))/3 with Δ = a1² − 3·a2.
        let delta = (a1 * a1).complete() - (a2 * 3u32).complete();
        if delta <= 0 {
            self.scan_monotone(&lo, &xb, &mut out);
            return out;
        }
        let y2 = (&self.y * &self.y).complete();
        let s = (delta * y2).sqrt();
        let b = -(a1 * &self.y).complete();
        let floor3 = |v: Integer| v.div_floor(Integer::from(3));
        let ceil3 = |v: Integer| v.div_ceil(Integer::from(3));
        // c− ∈ ((b − s − 1)/3, (b − s)/3], c+ ∈ [(b + s)/3, (b + s + 1)/3).
        let g1_lo = floor3((&b - &s).complete() - 1u32) - 1u32;
        let g1_hi = ceil3((&b - &s).complete()) + 1u32;
        let g2_lo = floor3((&b + &s).complete()) - 1u32;
        let g2_hi = ceil3((&b + &s).complete() + 1u32) + 1u32;
        let clamp = |v: Integer| v.clamp(&lo, &xb).clone();
        let (g1_lo, g1_hi, g2_lo, g2_hi) = (clamp(g1_lo), clamp(g1_hi), clamp(g2_lo), clamp(g2_hi));
        self.scan_monotone(&lo, &(&g1_lo - 1u32).complete(), &mut out);
        if (&g1_hi + 1u32).complete() >= g2_lo {
            self.scan_all(&g1_lo, &g2_hi, &mut out);
        } else {
            self.scan_all(&g1_lo, &g1_hi, &mut out);
            self.scan_monotone(&(&g1_hi + 1u32).complete(), &(&g2_lo - 1u32).complete(), &mut out);
            self.scan_all(&g2_lo, &g2_hi, &mut out);
        }
        self.scan_monotone(&(&g2_hi + 1u32).complete(), &xb, &mut out);
        out.sort();
        out.dedup();
        out
    }
}

fn y_values(y_max: u64) -> impl Iterator<Item = i64> {
    let m = y_max as i64;
    (-m..=m).filter(|&y| y != 0)
}

fn collect(mut recs: Vec<SolutionRecord>) -> Vec<SolutionRecord> {
    sort_records(&mut recs);
    recs.dedup_by(|a, b| a.key() == b.key());
    recs
}

/// Exact ground truth for the search box, sorted by `(n, y, x)`.
pub fn brute_force_oracle(fam: &FormFamily, spec: &SearchSpec) -> Vec<SolutionRecord> {
    if spec.k < 1 {
        return Vec::new();
    }
    let ns = spec.ns(fam);
    let forms: Vec<(i64, BinaryCubicForm)> = ns.iter().map(|&n| (n, fam.form_at(n))).collect();
    let mut recs: Vec<SolutionRecord> = forms
        .par_iter()
        .flat_map_iter(|(n, form)| {
            let n = *n;
            y_values(spec.y_max).flat_map(move |y| {
                let st = Stripe {
                    form,
                    y: Integer::from(y),
                    k: &spec.k,
                };
                st.oracle()
                    .into_iter()
                    .map(|x| {
                        let v = st.eval(&x);
                        SolutionRecord::new(n, x, Integer::from(y), v)
                    })
                    .collect::<Vec<_>>()
            })
        })
        .collect();
    if !spec.exclude_trivial {
        for (n, form) in &forms {
            recs.extend(trivial_solutions(form, *n, spec));
        }
    } else {
        recs.retain(|r| r.x != 0);
    }
    collect(recs)
}

/// Direct evaluation of every `(n, x, y)` with `|x| ≤ x_max`,
/// `|y| ≤ y_max`. Only usable on small boxes.
pub fn exhaustive_box_scan(fam: &FormFamily, spec: &SearchSpec, x_max: u64) -> Vec<SolutionRecord> {
    if spec.k < 1 {
        return Vec::new();
    }
    let xm = x_max as i64;
    let ym = spec.y_max as i64;
    let mut recs = Vec::new();
    for n in spec.ns(fam) {
        let form = fam.form_at(n);
        for y in -ym..=ym {
            for x in -xm..=xm {
                if spec.exclude_trivial && (x == 0 || y == 0) {
                    continue;
                }
                let v = form.evaluate_i64(x, y);
                if admissible(&v, &spec.k) {
                    recs.push(SolutionRecord::new(n, Integer::from(x), Integer::from(y), v));
                }
            }
        }
    }
    collect(recs)
}

/// Certified data for one `n`.
struct Conjugates {
    beta: Interval,
    re: Interval,
    im_abs: Interval,
    /// `|β − Re β′|`.
    gap: Interval,
    fast: Option<FastConstants>,
}

/// An enclosure `[lo, hi]` of a real number split as `int + [lo, hi]`
/// with `int` exact and the fractional bounds rounded outward.
#[derive(Clone, Copy)]
struct Split {
    int: i128,
    lo: f64,
    hi: f64,
}

impl Split {
    fn of(x: &Interval) -> Option<Split> {
        let (mid, _) = Interval::new(x.mid(), x.mid()).integer_hull()?;
        let int = mid.to_i128()?;
        let off = x - &Interval::from_integer(x.prec(), &mid);
        Some(Split {
            int,
            lo: off.lo().to_f64_round(rug::float::Round::Down),
            hi: off.hi().to_f64_round(rug::float::Round::Up),
        })
    }

    /// `int·y` exactly and an outward f64 enclosure of the rest.
    fn times(&self, y: i64) -> Option<(i128, f64, f64)> {
        let yf = y as f64;
        let (a, b) = (self.lo * yf, self.hi * yf);
        let (lo, hi) = (a.min(b), a.max(b));
        let pad = lo.abs().max(hi.abs()) * 1e-15 + 1e-300;
        Some((self.int.checked_mul(y as i128)?, lo - pad, hi + pad))
    }
}

/// Per-`n` constants for the double-precision pruning path.
#[derive(Clone, Copy)]
struct FastConstants {
    beta: Split,
    re: Split,
    gap_lo: f64,
    im_lo: f64,
    coeffs: [i128; 4],
}

fn conjugates_of(fam: &FormFamily, form: &BinaryCubicForm, n: i64, bits: u32) -> Conjugates {
    let e = fam.field().embeddings(bits);
    let eps_r = e.real(fam.epsilon());
    let eps_c: ComplexInterval = e.complex(fam.epsilon());
    // Powers of the embedded unit avoid cancellation in large coordinates.
    let beta = &eps_r.powi(n) * &e.real(fam.alpha());
    let bc = &eps_c.powi(n) * &e.complex(fam.alpha());
    let gap = (&beta - &bc.re).abs();
    let im_abs = bc.im.abs();
    let coeffs = [
        form.a[0].to_i128(),
        form.a[1].to_i128(),
        form.a[2].to_i128(),
        form.a[3].to_i128(),
    ];
    let fast = (|| {
        Some(FastConstants {
            beta: Split::of(&beta)?,
            re: Split::of(&bc.re)?,
            gap_lo: gap.lo().to_f64_round(rug::float::Round::Down),
            im_lo: im_abs.lo().to_f64_round(rug::float::Round::Down),
            coeffs: [coeffs[0]?, coeffs[1]?, coeffs[2]?, coeffs[3]?],
        })
    })();
    Conjugates {
        beta,
        re: bc.re,
        im_abs,
        gap,
        fast,
    }
}

/// Counters for one pruned run.
#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct SolveStats {
    pub stripes: u64,
    pub evaluations: u64,
    /// Stripes planned with multiprecision intervals instead of doubles.
    pub interval_plans: u64,
    /// Stripes searched with the exact monotone scan.
    pub fallbacks: u64,
}

/// Largest candidate range tried directly before the exact monotone scan
/// is used for the stripe.
const MAX_CANDIDATES: i128 = 1 << 16;

enum StripePlan {
    Ranges(Vec<(i128, i128)>),
    Fallback,
}

fn count_ok(ranges: &[(i128, i128)]) -> bool {
    let total: i128 = ranges
        .iter()
        .filter(|(a, b)| a <= b)
        .map(|(a, b)| b - a + 1)
        .sum();
    total <= MAX_CANDIDATES
}

/// Integer range `base + [floor(lo − r), ceil(hi + r)]`.
fn fast_range(base: i128, lo: f64, hi: f64, r: f64) -> Option<(i128, i128)> {
    let r = r * (1.0 + 1e-12);
    let a = (lo - r).floor() - 1.0;
    let b = (hi + r).ceil() + 1.0;
    let lim = 2f64.powi(100);
    if !(a.is_finite() && b.is_finite() && a.abs() < lim && b.abs() < lim) {
        return None;
    }
    Some((base.checked_add(a as i128)?, base.checked_add(b as i128)?))
}

/// Candidate ranges in double precision, `None` when the stripe needs the
/// multiprecision path.
fn plan_fast(c: &FastConstants, y: i64, k: f64) -> Option<StripePlan> {
    let ya = y.unsigned_abs() as f64;
    let d = c.gap_lo * ya * (1.0 - 1e-15);
    let v = c.im_lo * ya * (1.0 - 1e-15);
    if !(d > 0.0) {
        return None;
    }
    let (bint, blo, bhi) = c.beta.times(y)?;
    let (uint, ulo, uhi) = c.re.times(y)?;
    let half = d / 2.0;
    let mut r1 = half.min(k / (half * half + v * v));
    let r0 = (v > 0.0).then(|| k / (v * v));
    if let Some(r0) = r0 {
        r1 = r1.min(r0);
    }
    let r2 = (2.0 * k / d).sqrt();
    let a = fast_range(bint, blo, bhi, r1)?;
    let mut b = fast_range(uint, ulo, uhi, r2)?;
    if let Some(r0) = r0 {
        if let Some((lo0, hi0)) = fast_range(bint, blo, bhi, r0) {
            b = (b.0.max(lo0), b.1.min(hi0));
        }
    }
    let ranges = vec![a, b];
    Some(if count_ok(&ranges) {
        StripePlan::Ranges(ranges)
    } else {
        StripePlan::Fallback
    })
}

/// Candidate ranges with multiprecision intervals. The split between the
/// two regions uses the lower bound `d_lo` of `|βy − u|`: if
/// `|x − βy| ≤ d_lo/2` then `|x − u| ≥ d_lo/2`, otherwise
/// `(x − u)² + v² < 2k/d_lo`.
fn plan_interval(c: &Conjugates, y: i64, k: &Integer) -> StripePlan {
    let prec = c.beta.prec();
    let yi = Interval::from_i64(prec, y);
    let ya = Interval::from_i64(prec, y.abs());
    let kk = Interval::from_integer(prec, k);
    let center = &c.beta * &yi;
    let u = &c.re * &yi;
    let lower = |r: &Interval| {
        let l = r.lo().clone();
        Interval::new(l.clone(), l)
    };
    let v = lower(&(&c.im_abs * &ya));
    let d = lower(&(&c.gap * &ya));
    let v_pos = v.is_positive();
    let d_pos = d.is_positive();
    if !v_pos && !d_pos {
        return StripePlan::Fallback;
    }
    let around = |mid: &Interval, r: &Interval| -> Option<(i128, i128)> {
        let rr = Interval::new(r.hi().clone(), r.hi().clone());
        let (a, _) = (mid - &rr).integer_hull()?;
        let (_, b) = (mid + &rr).integer_hull()?;
        Some((a.to_i128()?, b.to_i128()?))
    };
    let r0 = v_pos.then(|| kk.div(&v.sqr()));
    let mut ranges = Vec::new();
    if d_pos {
        let half = d.div(&Interval::from_i64(prec, 2));
        let denom = &half.sqr() + &v.sqr();
        let mut r1 = half.min(&kk.div(&denom));
        if let Some(r0) = &r0 {
            r1 = r1.min(r0);
        }
        let r2 = kk.mul_i64(2).div(&d).sqrt();
        let Some(a) = around(&center, &r1) else {
            return StripePlan::Fallback;
        };
        let Some(mut b) = around(&u, &r2) else {
            return StripePlan::Fallback;
        };
        if let Some(r0) = &r0 {
            if let Some((lo0, hi0)) = around(&center, r0) {
                b = (b.0.max(lo0), b.1.min(hi0));
            }
        }
        ranges.push(a);
        ranges.push(b);
    } else if let Some(r0) = &r0 {
        match around(&center, r0) {
            Some(a) => ranges.push(a),
            None => return StripePlan::Fallback,
        }
    }
    if count_ok(&ranges) {
        StripePlan::Ranges(ranges)
    } else {
        StripePlan::Fallback
    }
}

/// Pruned search; identical output to [`brute_force_oracle`].
pub fn solve_box(fam: &FormFamily, spec: &SearchSpec) -> Vec<SolutionRecord> {
    solve_box_with_stats(fam, spec).0
}

fn eval_fast(c: &[i128; 4], x: i128, y: i128) -> Option<i128> {
    let y2 = y.checked_mul(y)?;
    let mut acc = c[0].checked_mul(x)?.checked_add(c[1].checked_mul(y)?)?;
    acc = acc.checked_mul(x)?.checked_add(c[2].checked_mul(y2)?)?;
    acc.checked_mul(x)?.checked_add(c[3].checked_mul(y2.checked_mul(y)?)?)
}

fn search_stripe(
    n: i64,
    form: &BinaryCubicForm,
    conj: &Conjugates,
    y: i64,
    k: &Integer,
    k_f64: f64,
    k_i128: Option<i128>,
) -> (Vec<SolutionRecord>, SolveStats) {
    let st = Stripe {
        form,
        y: Integer::from(y),
        k,
    };
    let mut stats = SolveStats {
        stripes: 1,
        ..SolveStats::default()
    };
    let plan = match conj.fast.as_ref().and_then(|c| plan_fast(c, y, k_f64)) {
        Some(p) => p,
        None => {
            stats.interval_plans += 1;
            plan_interval(conj, y, k)
        }
    };
    let mut recs = Vec::new();
    match plan {
        StripePlan::Ranges(ranges) => {
            for (a, b) in ranges {
                for x in a..=b {
                    stats.evaluations += 1;
                    let fast = match (conj.fast.as_ref(), k_i128) {
                        (Some(c), Some(kk)) => eval_fast(&c.coeffs, x, y as i128).map(|v| (v, kk)),
                        _ => None,
                    };
                    match fast {
                        Some((v, kk)) => {
                            if v != 0 && v.abs() <= kk {
                                recs.push(SolutionRecord::new(
                                    n,
                                    Integer::from(x),
                                    Integer::from(y),
                                    Integer::from(v),
                                ));
                            }
                        }
                        None => {
                            let xi = Integer::from(x);
                            let v = st.eval(&xi);
                            if admissible(&v, k) {
                                recs.push(SolutionRecord::new(n, xi, Integer::from(y), v));
                            }
                        }
                    }
                }
            }
        }
        StripePlan::Fallback => {
            stats.fallbacks += 1;
            for x in st.oracle() {
                let v = st.eval(&x);
                recs.push(SolutionRecord::new(n, x, Integer::from(y), v));
            }
        }
    }
    (recs, stats)
}

pub fn solve_box_with_stats(fam: &FormFamily, spec: &SearchSpec) -> (Vec<SolutionRecord>, SolveStats) {
    if spec.k < 1 {
        return (Vec::new(), SolveStats::default());
    }
    let ns = spec.ns(fam);
    let data: Vec<(i64, BinaryCubicForm, Conjugates)> = ns
        .par_iter()
        .map(|&n| {
            let form = fam.form_at(n);
            let conj = conjugates_of(fam, &form, n, 192);
            (n, form, conj)
        })
        .collect();
    let k_f64 = spec.k.to_f64() * (1.0 + 1e-12);
    let k_i128 = spec.k.to_i128();
    let ym = spec.y_max as i64;
    let per_n: Vec<(Vec<SolutionRecord>, SolveStats)> = data
        .par_iter()
        .flat_map_iter(|(n, form, conj)| {
            (-ym..=ym)
                .filter(|&y| y != 0)
                .map(move |y| search_stripe(*n, form, conj, y, &spec.k, k_f64, k_i128))
        })
        .collect();
    let mut stats = SolveStats::default();
    let mut recs = Vec::new();
    for (r, s) in per_n {
        recs.extend(r);
        stats.stripes += s.stripes;
        stats.evaluations += s.evaluations;
        stats.interval_plans += s.interval_plans;
        stats.fallbacks += s.fallbacks;
    }
    if !spec.exclude_trivial {
        for (n, form, _) in &data {
            recs.extend(trivial_solutions(form, *n, spec));
        }
    } else {
        recs.retain(|r| r.x != 0);
    }
    (collect(recs), stats)
}

/// Fills in the unit reduction of every nontrivial record.
pub fn attach_decompositions(fam: &FormFamily, k: &Integer, recs: &mut [SolutionRecord]) {
    recs.par_iter_mut().for_each(|r| {
        if r.x != 0 && r.y != 0 {
            r.decomposition = decompose_solution(fam, r.n, &r.x, &r.y, Some(k))
                .ok()
                .map(|s| s.dec);
        }
    });
}

/// One row of the sweep over `k`.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub k: String,
    pub solutions: usize,
    /// `log max{ε^{|n|}, |x|, |y|}` over the solutions.
    pub log_max_quantity: Option<f64>,
    /// `log(max)/log k`, for `k ≥ 2`.
    pub fitted_exponent: Option<f64>,
    /// `min log(|F|/κ3)/log Q` with `κ3 = 1/2`, over solutions with `Q > 1`.
    pub kappa4_emp: Option<f64>,
    /// No new solutions when `y_max` is doubled.
    pub box_stable: bool,
    pub added_when_doubled: usize,
}

/// `log max{ε^{|n|}, |x|, |y|}` as a double.
fn log_quantity(log_eps: f64, r: &SolutionRecord) -> f64 {
    let lx = int_log(&r.x);
    let ly = int_log(&r.y);
    (log_eps * r.n.unsigned_abs() as f64).max(lx).max(ly)
}

fn int_log(v: &Integer) -> f64 {
    let a = v.clone().abs();
    if a == 0 {
        return f64::NEG_INFINITY;
    }
    let (m, e) = a.to_f64_exp();
    m.ln() + e as f64 * std::f64::consts::LN_2
}

pub fn k_sweep(fam: &FormFamily, ks: &[i64], template: &SearchSpec) -> Vec<SweepRow> {
    let log_eps = {
        let (re, _) = fam.field().embed(fam.epsilon(), 1e-20);
        re.ln().mid_f64()
    };
    ks.iter()
        .map(|&k| {
            let spec = SearchSpec {
                k: Integer::from(k),
                ..template.clone()
            };
            let sols = solve_box(fam, &spec);
            let doubled = solve_box(fam, &spec.with_y_max(template.y_max * 2));
            let added = doubled.len().saturating_sub(sols.len());
            let logs: Vec<f64> = sols.iter().map(|r| log_quantity(log_eps, r)).collect();
            let log_max = logs.iter().cloned().fold(None, |m: Option<f64>, v| {
                Some(m.map_or(v, |m| m.max(v)))
            });
            let fitted = (k >= 2).then(|| log_max.map(|l| l / (k as f64).ln())).flatten();
            let kappa4 = sols
                .iter()
                .zip(&logs)
                .filter(|(_, &l)| l > 0.0)
                .map(|(r, &l)| (int_log(&r.value) + std::f64::consts::LN_2) / l)
                .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v))));
            SweepRow {
                k: k.to_string(),
                solutions: sols.len(),
                log_max_quantity: log_max,
                fitted_exponent: fitted,
                kappa4_emp: kappa4,
                box_stable: added == 0 && doubled.len() == sols.len(),
                added_when_doubled: added,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::example_family;

    fn keys(v: &[SolutionRecord]) -> Vec<(i64, Integer, Integer)> {
        v.iter().map(|r| r.triple()).collect()
    }

    #[test]
    fn oracle_matches_literal_scan() {
        let fam = example_family(1).unwrap();
        let spec = SearchSpec::new(2, -5, 5, 50);
        let lit = exhaustive_box_scan(&fam, &spec, 50);
        let ora: Vec<SolutionRecord> = brute_force_oracle(&fam, &spec)
            .into_iter()
            .filter(|r| r.x.cmp_abs(&Integer::from(50)) != Ordering::Greater)
            .collect();
        assert_eq!(keys(&lit), keys(&ora));
        assert!(lit
            .iter()
            .any(|r| r.n == 0 && r.x == 1 && r.y == -1 && r.value == 2));
        assert!(lit.iter().all(|r| r.n != -1));
    }

    #[test]
    fn pruned_matches_oracle_small() {
        for d in 1..=3 {
            let fam = example_family(d).unwrap();
            let spec = SearchSpec::new(10, -8, 8, 200);
            let (pruned, stats) = solve_box_with_stats(&fam, &spec);
            assert_eq!(keys(&pruned), keys(&brute_force_oracle(&fam, &spec)), "D = {d}");
            assert!(stats.evaluations < stats.stripes * 8);
        }
    }

    #[test]
    fn zero_k_gives_nothing() {
        let fam = example_family(1).unwrap();
        let spec = SearchSpec::new(0, -2, 2, 10);
        assert!(solve_box(&fam, &spec).is_empty());
        assert!(brute_force_oracle(&fam, &spec).is_empty());
    }

    #[test]
    fn trivial_and_degenerate_included_on_request() {
        let fam = example_family(1).unwrap();
        let mut spec = SearchSpec::new(8, -1, -1, 5);
        spec.exclude_trivial = false;
        spec.exclude_degenerate = false;
        let a = solve_box(&fam, &spec);
        let b = exhaustive_box_scan(&fam, &spec, 40);
        assert_eq!(keys(&a), keys(&b));
        assert!(a.iter().any(|r| r.y == 0));
    }

    #[test]
    fn records_are_closed_under_negation() {
        let fam = example_family(2).unwrap();
        let recs = solve_box(&fam, &SearchSpec::new(10, -3, 3, 100));
        for r in &recs {
            assert!(admissible(&fam.form_at(r.n).evaluate(&r.x, &r.y), &Integer::from(10)));
            let neg = (r.n, (-&r.x).complete(), (-&r.y).complete());
            assert!(recs.iter().any(|s| s.triple() == neg));
        }
    }
}
