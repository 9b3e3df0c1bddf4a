//! Lower bounds for linear forms in logarithms, the sine bound and its
//! empirical calibration, and the two elementary exponential estimates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::{ComplexInterval, Interval};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("delta1 + n*delta2 is a multiple of pi for n = {0}")]
    DegenerateAngle(i64),
    #[error("|z - 1| is not certainly below 1/2")]
    OutOfDomain,
}

pub const PLACEHOLDER_WARNING: &str =
    "c0 and c1 are placeholder values (default 1.0), not proven constants";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BakerConfig {
    pub c0: f64,
    pub c1: f64,
    pub c2_default: f64,
}

impl Default for BakerConfig {
    fn default() -> Self {
        BakerConfig {
            c0: 1.0,
            c1: 1.0,
            c2_default: 1.0,
        }
    }
}

impl BakerConfig {
    pub fn validate(&self) -> Result<(), BoundsError> {
        for (name, v) in [("c0", self.c0), ("c1", self.c1), ("c2_default", self.c2_default)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(BoundsError::InvalidParameters(format!("{name} must be positive")));
            }
        }
        Ok(())
    }

    pub fn is_placeholder(&self) -> bool {
        self.c0 == 1.0 && self.c1 == 1.0
    }
}

/// Exponent of the three-logarithm bound:
/// `−c0·D⁵·log D·log A0·log A1·log A2·log B`.
pub fn prop1_log_bound(
    cfg: &BakerConfig,
    degree: u32,
    log_a: [f64; 3],
    b: f64,
) -> Result<f64, BoundsError> {
    cfg.validate()?;
    if degree < 2 {
        return Err(BoundsError::InvalidParameters("degree must be at least 2".into()));
    }
    let dd = degree as f64;
    if log_a.iter().any(|&l| !(l >= 1.0 / dd)) {
        return Err(BoundsError::InvalidParameters(
            "log A_i must be at least 1/D".into(),
        ));
    }
    if !(b >= std::f64::consts::E) {
        return Err(BoundsError::InvalidParameters("B must be at least e".into()));
    }
    Ok(-cfg.c0 * dd.powi(5) * dd.ln() * log_a[0] * log_a[1] * log_a[2] * b.ln())
}

pub fn prop1_bound(
    cfg: &BakerConfig,
    degree: u32,
    log_a: [f64; 3],
    b: f64,
) -> Result<f64, BoundsError> {
    prop1_log_bound(cfg, degree, log_a, b).map(f64::exp)
}

/// Exponent of the two-logarithm bound `−c1·log B·log A1·log A2` with
/// `log A_i = max(e, h_i)`.
pub fn prop2_log_bound(cfg: &BakerConfig, h1: f64, h2: f64, b: f64) -> Result<f64, BoundsError> {
    cfg.validate()?;
    if !(h1 >= 0.0 && h2 >= 0.0) {
        return Err(BoundsError::InvalidParameters("heights must be nonnegative".into()));
    }
    if !(b >= 2.0) {
        return Err(BoundsError::InvalidParameters("B must be at least 2".into()));
    }
    let e = std::f64::consts::E;
    Ok(-cfg.c1 * b.ln() * h1.max(e) * h2.max(e))
}

pub fn prop2_bound(cfg: &BakerConfig, h1: f64, h2: f64, b: f64) -> Result<f64, BoundsError> {
    prop2_log_bound(cfg, h1, h2, b).map(f64::exp)
}

/// `(|n| + 2)^{−c2}`.
pub fn sine_bound(n: i64, c2: f64) -> f64 {
    ((n.unsigned_abs() + 2) as f64).powf(-c2)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub delta1: String,
    pub delta2: String,
    #[serde(rename = "N")]
    pub n_max: u64,
    pub c2: f64,
    /// `n` attaining the calibrated exponent.
    pub worst_n: Option<i64>,
    pub skipped: Vec<i64>,
}

fn sine_at(delta1: &Interval, delta2: &Interval, n: i64) -> Interval {
    (delta1 + &delta2.mul_i64(n)).sin()
}

/// Upper bound for `−log|sin(δ1 + nδ2)| / log(|n| + 2)`, `None` when the
/// sine enclosure contains 0.
fn needed_exponent(delta1: &Interval, delta2: &Interval, n: i64) -> Result<Option<f64>, i64> {
    let s = sine_at(delta1, delta2, n).abs();
    if s.contains_zero() {
        return if s.hi().is_zero() { Err(n) } else { Ok(None) };
    }
    let prec = s.prec();
    let num = -s.ln();
    let den = Interval::from_i64(prec, n.unsigned_abs() as i64 + 2).ln();
    let c = num.div(&den);
    Ok(Some(c.hi().to_f64_round(rug::float::Round::Up)))
}

/// Holds when `|sin(δ1 + nδ2)|·(|n| + 2)^{c2} ≥ 1` is certified.
pub fn sine_bound_holds(delta1: &Interval, delta2: &Interval, n: i64, c2: f64) -> bool {
    let s = sine_at(delta1, delta2, n).abs();
    let prec = s.prec();
    let base = Interval::from_i64(prec, n.unsigned_abs() as i64 + 2);
    let lhs = &s * &base.powf(&Interval::point(prec, c2));
    Interval::one(prec).certainly_le(&lhs)
}

/// Smallest `c2` (rounded up to a double) with
/// `|sin(δ1 + nδ2)|·(|n| + 2)^{c2} ≥ 1` for all certified `0 < |n| ≤ N`.
pub fn calibrate_c2(
    delta1: &Interval,
    delta2: &Interval,
    n_max: u64,
) -> Result<CalibrationResult, BoundsError> {
    let n_max_i = i64::try_from(n_max)
        .map_err(|_| BoundsError::InvalidParameters("N too large".into()))?;
    let ns: Vec<i64> = (1..=n_max_i).flat_map(|n| [-n, n]).collect();
    let results: Vec<(i64, Result<Option<f64>, i64>)> = ns
        .par_iter()
        .map(|&n| (n, needed_exponent(delta1, delta2, n)))
        .collect();
    let mut skipped = Vec::new();
    let mut c2 = 0.0f64;
    let mut worst = None;
    for (n, r) in results {
        match r {
            Err(n) => return Err(BoundsError::DegenerateAngle(n)),
            Ok(None) => skipped.push(n),
            Ok(Some(c)) => {
                if c > c2 || worst.is_none() {
                    c2 = c2.max(c);
                    worst = Some(n);
                }
            }
        }
    }
    skipped.sort_unstable();
    // Make the round trip certain at the worst n despite outward rounding.
    if let Some(w) = worst {
        while !sine_bound_holds(delta1, delta2, w, c2) {
            c2 = next_up(c2);
        }
    }
    Ok(CalibrationResult {
        delta1: delta1.mid_string(25),
        delta2: delta2.mid_string(25),
        n_max,
        c2,
        worst_n: worst,
        skipped,
    })
}

fn next_up(x: f64) -> f64 {
    let bumped = f64::from_bits(x.to_bits() + 1);
    // Several ulps at a time keeps the loop short.
    bumped + (bumped - x) * 1e3
}

/// One step of the argument deriving the sine bound from the two-logarithm
/// bound, with `γ_j = e^{iδ_j}` and `ℓ` the nearest integer to
/// `(δ1 + nδ2)/π` (floor on ties).
#[derive(Clone, Debug)]
pub struct ChainCheck {
    pub n: i64,
    pub sine: Interval,
    pub ell_parity_odd: bool,
    /// `(√2/2)·|γ1γ2^n − 1|`.
    pub rhs_literal: Interval,
    pub holds_literal: bool,
    /// `(√2/2)·|(−1)^ℓ·γ1γ2^n − 1|`.
    pub rhs_signed: Interval,
    pub holds_signed: bool,
}

pub fn sine_chain(delta1: &Interval, delta2: &Interval, n: i64) -> ChainCheck {
    let prec = delta1.prec();
    let phi = delta1 + &delta2.mul_i64(n);
    let sine = phi.sin().abs();
    let z = ComplexInterval::cis(&phi);
    let one = ComplexInterval::one(prec);
    let half_sqrt2 = Interval::from_i64(prec, 2).sqrt().div(&Interval::from_i64(prec, 2));
    let rhs_literal = &half_sqrt2 * &(&z - &one).abs();
    let ratio = phi.div(&Interval::pi(prec));
    // Nearest integer with floor on ties: ceil(u − 1/2).
    let shifted = &ratio - &Interval::point(prec, 0.5);
    let ell = rug::Float::with_val(prec, shifted.hi().ceil_ref())
        .to_integer()
        .expect("finite");
    let odd = ell.is_odd();
    let signed = if odd { -z } else { z };
    let rhs_signed = &half_sqrt2 * &(&signed - &one).abs();
    ChainCheck {
        n,
        holds_literal: rhs_literal.certainly_le(&sine),
        holds_signed: rhs_signed.certainly_le(&sine),
        sine,
        ell_parity_odd: odd,
        rhs_literal,
        rhs_signed,
    }
}

#[derive(Clone, Debug)]
pub struct LogExpCheck {
    pub lhs: Interval,
    pub rhs: Interval,
    /// `rhs − lhs`.
    pub margin: Interval,
    pub holds: bool,
}

impl LogExpCheck {
    fn new(lhs: Interval, rhs: Interval) -> Self {
        let margin = &rhs - &lhs;
        let holds = lhs.certainly_le(&rhs);
        LogExpCheck {
            lhs,
            rhs,
            margin,
            holds,
        }
    }
}

/// `|e^t − 1| ≤ |t|·max(1, |e^t|)`.
pub fn exp_minus_one_check(t: &ComplexInterval) -> LogExpCheck {
    let prec = t.prec();
    let et = t.exp();
    let lhs = (&et - &ComplexInterval::one(prec)).abs();
    let rhs = &t.abs() * &et.abs().max(&Interval::one(prec));
    LogExpCheck::new(lhs, rhs)
}

/// `|log z| ≤ 2|z − 1|` for `|z − 1| < 1/2`, principal logarithm.
pub fn log_near_one_check(z: &ComplexInterval) -> Result<LogExpCheck, BoundsError> {
    let prec = z.prec();
    let d = (z - &ComplexInterval::one(prec)).abs();
    if !d.certainly_lt(&Interval::point(prec, 0.5)) {
        return Err(BoundsError::OutOfDomain);
    }
    let log = z.ln().ok_or(BoundsError::OutOfDomain)?;
    Ok(LogExpCheck::new(log.abs(), d.mul_i64(2)))
}
