//! Mahler measures, absolute logarithmic heights, the regulator and a
//! sufficient test for fundamentality of the unit.

use rug::{Integer, Rational};
use thiserror::Error;

use crate::cubicfield::{maximal_order_discriminant, CubicField, FieldElement};
use crate::family::FormFamily;
use crate::interval::{bits_for_tolerance, ComplexInterval, Interval};
use crate::poly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeightError {
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("zero element")]
    ZeroElement,
    #[error("element is not a unit greater than 1")]
    NotAUnit,
    #[error("could not reach the requested precision")]
    PrecisionExhausted,
}

#[derive(Clone, Debug)]
pub struct HeightReport {
    pub mahler: Interval,
    pub height: Interval,
    pub degree_used: u32,
}

const MAX_BITS: u32 = 1 << 14;

fn mahler_at(coeffs: &[Integer], prec: u32) -> Option<Interval> {
    let q = poly::to_rational(coeffs);
    let (lc, parts) = poly::squarefree_decomposition(&q);
    let mut m = Interval::from_rational(prec, &lc).abs();
    let one = Interval::one(prec);
    for (g, e) in parts {
        if g.len() <= 1 {
            continue;
        }
        let zg = poly::primitive_part(&g);
        // Monic squarefree factor: its measure is the product over roots.
        let lead = Rational::from(zg[0].clone());
        let monic_scale = Interval::from_rational(prec, &lead).abs();
        let clusters = poly::root_clusters(&zg, prec)?;
        let mut mg = monic_scale.recip();
        let mut scaled = one.clone();
        for c in &clusters {
            let r = c.modulus().max(&one);
            scaled = &scaled * &r.powi(c.count as i64);
        }
        mg = &mg * &(&monic_scale * &scaled);
        m = &m * &mg.powi(e as i64);
    }
    Some(m)
}

/// `M(f) = |a0|·∏ max(1, |root|)`, enclosure of relative width ≤ `tol`.
pub fn mahler_measure(coeffs: &[Integer], tol: f64) -> Result<Interval, HeightError> {
    let start = coeffs.iter().position(|c| *c != 0);
    let Some(start) = start else {
        return Err(HeightError::ZeroPolynomial);
    };
    let coeffs = &coeffs[start..];
    let mut bits = bits_for_tolerance(tol);
    while bits <= MAX_BITS {
        if let Some(m) = mahler_at(coeffs, bits) {
            let scale = m.hi().to_f64().max(1.0);
            if m.width_f64() <= tol * scale {
                return Ok(m);
            }
        }
        bits *= 2;
    }
    Err(HeightError::PrecisionExhausted)
}

pub fn mahler_measure_rational(coeffs: &[Rational], tol: f64) -> Result<Interval, HeightError> {
    if coeffs.iter().all(|c| *c == 0) {
        return Err(HeightError::ZeroPolynomial);
    }
    let den = coeffs
        .iter()
        .fold(Integer::from(1), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<Integer> = coeffs
        .iter()
        .map(|c| (Rational::from(c * &den)).into_numer_denom().0)
        .collect();
    let m = mahler_measure(&ints, tol / 2.0)?;
    Ok(m.div(&Interval::from_integer(m.prec(), &den)))
}

/// `h(x) = (1/deg)·log M(minimal polynomial of x over Z)`.
pub fn abs_log_height(
    k: &CubicField,
    x: &FieldElement,
    tol: f64,
) -> Result<HeightReport, HeightError> {
    if x.is_zero() {
        return Err(HeightError::ZeroElement);
    }
    let minpoly = k.minimal_poly(x);
    let zpoly = poly::primitive_part(&minpoly);
    let degree = (zpoly.len() - 1) as u32;
    let mahler = mahler_measure(&zpoly, tol / 4.0)?;
    let height = mahler.ln().div(&Interval::from_i64(mahler.prec(), degree as i64));
    Ok(HeightReport {
        mahler,
        height,
        degree_used: degree,
    })
}

/// `(1/d)·Σ log⁺|c|` over all `d` conjugates of an algebraic integer.
pub fn height_from_conjugates(conjugates: &[ComplexInterval]) -> Interval {
    let prec = conjugates[0].prec();
    let one = Interval::one(prec);
    let mut s = Interval::zero(prec);
    for c in conjugates {
        s = &s + &c.abs().max(&one).ln();
    }
    s.div(&Interval::from_i64(prec, conjugates.len() as i64))
}

/// `R = log ε` for the real embedding of the family unit.
pub fn regulator(fam: &FormFamily, tol: f64) -> Result<Interval, HeightError> {
    unit_log(fam.field(), fam.epsilon(), tol)
}

/// `log` of the real embedding of a unit `> 1`.
pub fn unit_log(k: &CubicField, eps: &FieldElement, tol: f64) -> Result<Interval, HeightError> {
    if !k.is_unit(eps) {
        return Err(HeightError::NotAUnit);
    }
    let mut t = tol.min(1e-3);
    loop {
        let (re, _) = k.embed(eps, t);
        if !Interval::one(re.prec()).certainly_lt(&re) {
            return Err(HeightError::NotAUnit);
        }
        let r = re.ln();
        if r.width_f64() <= tol || re.prec() >= MAX_BITS {
            return Ok(r);
        }
        t /= 2f64.powi(32);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fundamentality {
    ProvedFundamental,
    Unknown,
}

#[derive(Clone, Debug)]
pub struct FundamentalityCertificate {
    pub status: Fundamentality,
    /// Field discriminant, or a bound of no larger absolute value.
    pub field_disc: Integer,
    pub disc_exact: bool,
    /// `4·ε^{3/2} + 24`.
    pub threshold: Interval,
    /// `|d_K| − threshold`.
    pub margin: Interval,
}

/// If `|d_K| ≥ 4ε^{3/2} + 24` then `ε` is not a proper power of a unit
/// `> 1`, because the fundamental unit `ε0` of a complex cubic field
/// satisfies `|d_K| < 4ε0³ + 24`.
pub fn check_fundamental(fam: &FormFamily) -> Result<FundamentalityCertificate, HeightError> {
    check_fundamental_unit(fam.field(), fam.epsilon())
}

pub fn check_fundamental_unit(
    k: &CubicField,
    eps: &FieldElement,
) -> Result<FundamentalityCertificate, HeightError> {
    let r = unit_log(k, eps, 1e-30)?;
    let prec = r.prec();
    let e32 = (&r * &Interval::point(prec, 1.5)).exp();
    let threshold = &e32.mul_i64(4) + &Interval::from_i64(prec, 24);
    let cert = maximal_order_discriminant(k);
    let abs_disc = Interval::from_integer(prec, &Integer::from(cert.value.abs_ref()));
    let margin = &abs_disc - &threshold;
    let status = if threshold.certainly_le(&abs_disc) {
        Fundamentality::ProvedFundamental
    } else {
        Fundamentality::Unknown
    };
    Ok(FundamentalityCertificate {
        status,
        field_disc: cert.value,
        disc_exact: cert.exact,
        threshold,
        margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::example_family;

    fn ints(v: &[i64]) -> Vec<Integer> {
        v.iter().map(|&c| Integer::from(c)).collect()
    }

    #[test]
    fn mahler_examples() {
        let m = mahler_measure(&ints(&[1, -2]), 1e-20).unwrap();
        assert!(m.contains_f64(2.0) && m.width_f64() < 1e-20);
        let m = mahler_measure(&ints(&[1, 0, 1]), 1e-20).unwrap();
        assert!(m.contains_f64(1.0));
        let m = mahler_measure(&ints(&[1, -3, -3, -1]), 1e-20).unwrap();
        assert!((m.mid_f64() - 3.847_322_101_863_072).abs() < 1e-12);
        assert_eq!(mahler_measure(&ints(&[0, 0]), 1e-5), Err(HeightError::ZeroPolynomial));
        // Repeated roots: (X − 2)²(X² + 1).
        let m = mahler_measure(&ints(&[1, -4, 5, -4, 4]), 1e-20).unwrap();
        assert!(m.contains_f64(4.0));
    }

    #[test]
    fn heights_of_simple_elements() {
        let fam = example_family(1).unwrap();
        let k = fam.field();
        let h = abs_log_height(k, &k.one(), 1e-20).unwrap();
        assert!(h.height.contains_f64(0.0));
        let h = abs_log_height(k, &FieldElement::from_integer(2), 1e-20).unwrap();
        assert!((h.height.mid_f64() - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(h.degree_used, 1);
        let r = regulator(&fam, 1e-25).unwrap();
        let h = abs_log_height(k, fam.epsilon(), 1e-25).unwrap();
        let diff = &h.height.mul_i64(3) - &r;
        assert!(diff.contains_zero() && diff.width_f64() < 1e-20);
        // log(1/(∛2 − 1)) = log(1 + ∛2 + ∛4).
        let expected = (&(&Interval::one(128) + &Interval::from_i64(128, 2).cbrt())
            + &Interval::from_i64(128, 4).cbrt())
            .ln();
        assert!(r.overlaps(&expected));
        assert!((r.mid_f64() - 1.347_377_348).abs() < 1e-9);
    }

    #[test]
    fn regulator_of_square_doubles() {
        let fam = example_family(2).unwrap();
        let k = fam.field();
        let r = regulator(&fam, 1e-25).unwrap();
        assert!((r.mid_f64() - 12.4869_f64.ln()).abs() < 1e-4);
        let e2 = k.mul(fam.epsilon(), fam.epsilon());
        let r2 = unit_log(k, &e2, 1e-25).unwrap();
        assert!((&r2 - &r.mul_i64(2)).contains_zero());
        assert_eq!(
            unit_log(k, &FieldElement::from_integer(2), 1e-10),
            Err(HeightError::NotAUnit)
        );
    }

    #[test]
    fn fundamentality() {
        for d in [1, 2, 4] {
            let fam = example_family(d).unwrap();
            let c = check_fundamental(&fam).unwrap();
            assert_eq!(c.status, Fundamentality::ProvedFundamental, "D = {d}");
        }
        let fam = example_family(1).unwrap();
        let k = fam.field();
        let e2 = k.mul(fam.epsilon(), fam.epsilon());
        assert_eq!(
            check_fundamental_unit(k, &e2).unwrap().status,
            Fundamentality::Unknown
        );
    }
}
