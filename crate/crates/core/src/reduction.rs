//! Unit reduction `γ = ε^ℓ·ξ1` with the conjugates of `ξ1` balanced
//! around `|N(γ)|^{1/3}`.

use rug::{Integer, Rational};
use thiserror::Error;

use crate::cubicfield::{CubicField, FieldElement};
use crate::family::FormFamily;
use crate::heights::{regulator, HeightError};
use crate::interval::Interval;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("zero element")]
    ZeroElement,
    #[error("epsilon^n alpha is rational for n = {0}")]
    DegenerateN(i64),
    #[error("F_n(x, y) = 0")]
    ZeroValue,
    #[error("x·y = 0")]
    TrivialXY,
    #[error("|F_n(x, y)| = {value} exceeds k = {k}")]
    ExceedsBound { value: Integer, k: Integer },
    #[error("k must be at least 1")]
    InvalidBound,
    #[error(transparent)]
    Height(#[from] HeightError),
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub ell: i64,
    pub xi: FieldElement,
    /// `m = |N(γ)|`.
    pub norm_abs: Rational,
    /// `max_j |log(|σ_j(ξ1)| / m^{1/3})|`.
    pub balance: Interval,
    /// `(log|γ| − log(m)/3) / R` for the real embedding; `ℓ` rounds it.
    pub ratio: Interval,
    pub regulator: Interval,
}

/// Working precision for the rounding step, in bits.
const START_BITS: u32 = 128;
const MAX_BITS: u32 = 4096;

fn tol_for(bits: u32) -> f64 {
    2f64.powi(-(bits as i32 - 16).min(1000))
}

fn balance_of(k: &CubicField, xi: &FieldElement, log_m3: &Interval, bits: u32) -> Interval {
    let e = k.embeddings(bits);
    let lr = &e.real(xi).abs().ln() - log_m3;
    let lc = &e.complex(xi).abs().ln() - log_m3;
    lr.abs().max(&lc.abs())
}

/// `ℓ` is the integer nearest to `(log|σ_real(γ)| − log(m)/3)/R`, ties
/// to the smaller one.
pub fn unit_reduce(fam: &FormFamily, gamma: &FieldElement) -> Result<Decomposition, ReductionError> {
    if gamma.is_zero() {
        return Err(ReductionError::ZeroElement);
    }
    let k = fam.field();
    let m = Rational::from(k.norm(gamma).abs_ref());
    let mut bits = START_BITS;
    let (ell, ratio, r, log_m3) = loop {
        let r = regulator(fam, tol_for(bits))?;
        let prec = r.prec().max(bits);
        let e = k.embeddings(prec);
        let lg = e.real(gamma).abs().ln();
        let log_m3 = Interval::from_rational(prec, &m)
            .ln()
            .div(&Interval::from_i64(prec, 3));
        let ratio = (&lg - &log_m3).div(&r);
        let shifted = &ratio - &Interval::point(prec, 0.5);
        // ceil(u − 1/2) rounds to nearest with ties going down.
        let c_lo = ceil_of(shifted.lo());
        let c_hi = ceil_of(shifted.hi());
        if c_lo == c_hi || bits >= MAX_BITS {
            break (c_lo, ratio, r, log_m3);
        }
        bits *= 2;
    };
    let ell_i = ell.to_i64().expect("exponent fits in i64");
    let xi = k.mul(&k.pow(fam.epsilon(), -ell_i).expect("unit"), gamma);
    let balance = balance_of(k, &xi, &log_m3, ratio.prec());
    Ok(Decomposition {
        ell: ell_i,
        xi,
        norm_abs: m,
        balance,
        ratio,
        regulator: r,
    })
}

fn ceil_of(f: &rug::Float) -> Integer {
    let c = rug::Float::with_val(f.prec(), f.ceil_ref());
    c.to_integer().expect("finite")
}

/// Decomposition of a solution of `0 < |F_n(x, y)| ≤ k`.
#[derive(Clone, Debug)]
pub struct SolutionDecomposition {
    pub n: i64,
    pub x: Integer,
    pub y: Integer,
    pub value: Integer,
    pub k: Integer,
    pub gamma: FieldElement,
    pub dec: Decomposition,
    /// `log max{house(ξ1), 1/|ξ1|, 1/|ξ1′|} / log k`, present for `k ≥ 2`.
    pub kappa9_emp: Option<Interval>,
}

/// `γ = x − ε^n·α·y`, its value `N(γ) = F_n(x, y)` and its unit reduction.
/// `k` defaults to `max(2, |F_n(x, y)|)`.
pub fn decompose_solution(
    fam: &FormFamily,
    n: i64,
    x: &Integer,
    y: &Integer,
    k: Option<&Integer>,
) -> Result<SolutionDecomposition, ReductionError> {
    if fam.is_degenerate(n) {
        return Err(ReductionError::DegenerateN(n));
    }
    if *x == 0 || *y == 0 {
        return Err(ReductionError::TrivialXY);
    }
    let value = fam.form_at(n).evaluate(x, y);
    if value == 0 {
        return Err(ReductionError::ZeroValue);
    }
    let abs_value = Integer::from(value.abs_ref());
    let k = match k {
        Some(k) if *k < 1 => return Err(ReductionError::InvalidBound),
        Some(k) => k.clone(),
        None => abs_value.clone().max(Integer::from(2)),
    };
    if abs_value > k {
        return Err(ReductionError::ExceedsBound { value, k });
    }
    let field = fam.field();
    let beta = fam.beta(n);
    let gamma = &FieldElement::from_rational(Rational::from(x))
        - &beta.scale(&Rational::from(y));
    let dec = unit_reduce(fam, &gamma)?;
    let kappa9_emp = (k >= 2).then(|| {
        let e = field.embeddings(dec.ratio.prec());
        let a = e.real(&dec.xi).abs();
        let b = e.complex(&dec.xi).abs();
        let big = a.max(&b).max(&a.recip()).max(&b.recip());
        big.ln().div(&Interval::from_integer(a.prec(), &k).ln())
    });
    Ok(SolutionDecomposition {
        n,
        x: x.clone(),
        y: y.clone(),
        value,
        k,
        gamma,
        dec,
        kappa9_emp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::example_family;

    #[test]
    fn units_reduce_to_one() {
        let fam = example_family(1).unwrap();
        let k = fam.field();
        let g = k.pow(fam.epsilon(), 5).unwrap();
        let d = unit_reduce(&fam, &g).unwrap();
        assert_eq!(d.ell, 5);
        assert_eq!(d.xi, k.one());
        assert!(d.balance.contains_f64(0.0));
        let d = unit_reduce(&fam, &k.one()).unwrap();
        assert_eq!((d.ell, d.xi), (0, k.one()));
        assert!(matches!(
            unit_reduce(&fam, &FieldElement::zero()),
            Err(ReductionError::ZeroElement)
        ));
    }

    #[test]
    fn small_element_minimizes_balance() {
        let fam = example_family(1).unwrap();
        let k = fam.field();
        let g = &FieldElement::from_integer(2) - fam.epsilon();
        let d = unit_reduce(&fam, &g).unwrap();
        assert_eq!(k.mul(&k.pow(fam.epsilon(), d.ell).unwrap(), &d.xi), g);
        let half_r = d.regulator.div(&Interval::from_i64(128, 2));
        assert!(d.balance.hi().to_f64() <= half_r.hi().to_f64() + 1e-9);
        let log_m3 = Interval::from_rational(256, &d.norm_abs).ln().div(&Interval::from_i64(256, 3));
        let best = (-10..=10)
            .min_by(|&a, &b| {
                let xa = k.mul(&k.pow(fam.epsilon(), -a).unwrap(), &g);
                let xb = k.mul(&k.pow(fam.epsilon(), -b).unwrap(), &g);
                let ba = balance_of(k, &xa, &log_m3, 256).mid_f64();
                let bb = balance_of(k, &xb, &log_m3, 256).mid_f64();
                ba.partial_cmp(&bb).unwrap()
            })
            .unwrap();
        assert_eq!(best, d.ell);
    }

    #[test]
    fn solution_examples() {
        let fam = example_family(1).unwrap();
        let one = Integer::from(1);
        let s = decompose_solution(&fam, 0, &one, &Integer::from(-1), None).unwrap();
        assert_eq!(s.value, 2);
        assert_eq!(s.dec.norm_abs, 2);
        assert!(s.kappa9_emp.is_some());
        assert!(matches!(
            decompose_solution(&fam, -1, &one, &Integer::from(5), None),
            Err(ReductionError::DegenerateN(-1))
        ));
        assert!(matches!(
            decompose_solution(&fam, 0, &one, &Integer::new(), None),
            Err(ReductionError::TrivialXY)
        ));
        assert!(matches!(
            decompose_solution(&fam, 0, &Integer::from(7), &one, Some(&Integer::from(2))),
            Err(ReductionError::ExceedsBound { .. })
        ));
    }
}
