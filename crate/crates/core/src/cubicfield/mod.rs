//! Exact arithmetic in a cubic field `K = Q(t)`, `t` a root of a monic
//! integral cubic with exactly one real root, together with certified
//! embeddings of `K` into `R` and `C`.
//!
//! Elements are kept in the power basis `1, t, t²` with rational
//! coordinates; norms, traces, inverses and characteristic polynomials
//! all come from the exact matrix of multiplication by the element.
//!
//! The real embedding sends `t` to the real root `r`; the complex
//! embedding `σ` sends it to the root with positive imaginary part.

mod element;
mod order;

use std::fmt;

use rug::{Float, Integer, Rational};
use thiserror::Error;

use crate::interval::{bits_for_tolerance, ComplexInterval, Interval};
use crate::poly;

pub use element::FieldElement;
pub use order::{maximal_order_discriminant, DiscriminantCertificate};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("polynomial is not monic (leading coefficient {0})")]
    NonMonic(Integer),
    #[error("polynomial has the rational root {0}")]
    ReduciblePolynomial(Integer),
    #[error("polynomial has three real roots (discriminant {0} > 0)")]
    TotallyReal(Integer),
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero element has no house, height or decomposition")]
    ZeroElement,
    #[error("expected four coefficients, got {0}")]
    WrongDegree(usize),
}

/// `Q(t)` for `t` a root of `X³ + p1·X² + p2·X + p3`.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicField {
    min_poly: [Integer; 4],
    disc: Integer,
    real_isolation: (Rational, Rational),
}

/// Enclosures of the two distinguished roots at one working precision.
/// Evaluating elements through this avoids re-isolating the roots.
#[derive(Clone, Debug)]
pub struct Embeddings {
    prec: u32,
    real_root: Interval,
    complex_root: ComplexInterval,
}

/// Discriminant of `X³ + b·X² + c·X + d`.
pub fn cubic_discriminant(b: &Integer, c: &Integer, d: &Integer) -> Integer {
    let b2 = Integer::from(b * b);
    let c2 = Integer::from(c * c);
    let mut disc = Integer::from(&b2 * &c2);
    disc -= Integer::from(&c2 * c) * 4;
    disc -= Integer::from(&b2 * b) * d * 4u32;
    disc -= Integer::from(d * d) * 27u32;
    disc += Integer::from(b * c) * d * 18u32;
    disc
}

fn sign_at(coeffs: &[Integer], x: &Rational) -> std::cmp::Ordering {
    poly::eval_rational(coeffs, x).cmp0()
}

impl CubicField {
    /// Build the field from `[1, p1, p2, p3]` (leading coefficient first).
    pub fn new(coeffs: &[Integer]) -> Result<Self, FieldError> {
        if coeffs.len() != 4 {
            return Err(FieldError::WrongDegree(coeffs.len()));
        }
        if coeffs[0] != 1 {
            return Err(FieldError::NonMonic(coeffs[0].clone()));
        }
        let min_poly = [
            coeffs[0].clone(),
            coeffs[1].clone(),
            coeffs[2].clone(),
            coeffs[3].clone(),
        ];
        if let Some(root) = rational_root(&min_poly) {
            return Err(FieldError::ReduciblePolynomial(root));
        }
        let disc = cubic_discriminant(&min_poly[1], &min_poly[2], &min_poly[3]);
        if disc > 0 {
            return Err(FieldError::TotallyReal(disc));
        }
        // disc == 0 would mean a repeated, hence rational, root.
        debug_assert!(disc != 0);

        let bound = poly::cauchy_bound(&min_poly);
        let mut lo = Rational::from(-&bound);
        let mut hi = bound;
        let target = Rational::from((1, 1024));
        while Rational::from(&hi - &lo) > target {
            let mid = Rational::from(&lo + &hi) / 2u32;
            if sign_at(&min_poly, &mid) == std::cmp::Ordering::Less {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(CubicField {
            min_poly,
            disc,
            real_isolation: (lo, hi),
        })
    }

    pub fn from_i64(coeffs: [i64; 4]) -> Result<Self, FieldError> {
        let c: Vec<Integer> = coeffs.iter().map(|&v| Integer::from(v)).collect();
        Self::new(&c)
    }

    pub fn min_poly(&self) -> &[Integer; 4] {
        &self.min_poly
    }

    pub fn disc(&self) -> &Integer {
        &self.disc
    }

    /// Rational interval isolating the real root (coarse, width ≤ 1/1024).
    pub fn real_isolation(&self) -> &(Rational, Rational) {
        &self.real_isolation
    }

    /// Rational box `(re_lo, re_hi, im_lo, im_hi)` around the root with
    /// positive imaginary part, of width about `2^-bits`.
    pub fn complex_isolation(&self, bits: u32) -> [Rational; 4] {
        let z = self.embeddings(bits).complex_root;
        let to_q = |f: &Float| f.to_rational().expect("finite enclosure");
        [
            to_q(z.re.lo()),
            to_q(z.re.hi()),
            to_q(z.im.lo()),
            to_q(z.im.hi()),
        ]
    }

    /// Rational bracket of the real root with width about `2^-bits`
    /// (relative to its size), certified by an exact sign change.
    pub fn real_root_bracket(&self, bits: u32) -> (Rational, Rational) {
        let work = bits + 16;
        let (ilo, ihi) = &self.real_isolation;
        let f = &self.min_poly;
        let mut x = Float::with_val(work, Rational::from(ilo + ihi) / 2u32);
        let flo = Float::with_val(work, ilo);
        let fhi = Float::with_val(work, ihi);
        let mut newton_ok = true;
        for _ in 0..(2 * (32 - work.leading_zeros()) + 8) {
            let mut v = Float::with_val(work, 0);
            let mut d = Float::with_val(work, 0);
            for c in f {
                d = d * &x + &v;
                v = v * &x + c;
            }
            if d.is_zero() {
                newton_ok = false;
                break;
            }
            let step = Float::with_val(work, &v / &d);
            x -= step;
            if x < flo || x > fhi || !x.is_finite() {
                newton_ok = false;
                break;
            }
        }
        if newton_ok {
            let scale = {
                let a = Float::with_val(53, x.abs_ref());
                if a > 1 {
                    a
                } else {
                    Float::with_val(53, 1)
                }
            };
            let mut delta = Float::with_val(work, Float::i_exp(1, -(bits as i32))) * scale;
            let xq = x.to_rational().expect("finite");
            for _ in 0..16 {
                let dq = delta.to_rational().expect("finite");
                let lo = Rational::from(&xq - &dq);
                let hi = Rational::from(&xq + &dq);
                let slo = sign_at(f, &lo);
                let shi = sign_at(f, &hi);
                if slo == std::cmp::Ordering::Less && shi == std::cmp::Ordering::Greater {
                    return (lo, hi);
                }
                delta *= 4;
            }
        }
        // Fallback: exact bisection from the stored isolation.
        let (mut lo, mut hi) = self.real_isolation.clone();
        for _ in 0..(bits + 16) {
            let mid = Rational::from(&lo + &hi) / 2u32;
            if sign_at(f, &mid) == std::cmp::Ordering::Less {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, hi)
    }

    /// Root enclosures at `bits` of working precision.
    pub fn embeddings(&self, bits: u32) -> Embeddings {
        let (lo, hi) = self.real_root_bracket(bits);
        let real_root = Interval::from_rational_bounds(bits, &lo, &hi);
        // X³ + p1X² + p2X + p3 = (X − r)(X² + pX + q), p = p1 + r, q = −p3/r.
        let p = &Interval::from_integer(bits, &self.min_poly[1]) + &real_root;
        let q = (-Interval::from_integer(bits, &self.min_poly[3])).div(&real_root);
        let half_p = p.div(&Interval::from_i64(bits, 2));
        let im_sq = &q - &half_p.sqr();
        let complex_root = ComplexInterval::new(-half_p, im_sq.sqrt());
        Embeddings {
            prec: bits,
            real_root,
            complex_root,
        }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::from_integer(1)
    }

    pub fn generator(&self) -> FieldElement {
        FieldElement::new([Rational::new(), Rational::from(1), Rational::new()])
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let x = a.coords();
        let y = b.coords();
        let mut d: [Rational; 5] = Default::default();
        for i in 0..3 {
            if x[i] == 0 {
                continue;
            }
            for j in 0..3 {
                d[i + j] += Rational::from(&x[i] * &y[j]);
            }
        }
        let p = &self.min_poly;
        for k in (3..5).rev() {
            let c = std::mem::take(&mut d[k]);
            if c == 0 {
                continue;
            }
            d[k - 1] -= Rational::from(&c * &p[1]);
            d[k - 2] -= Rational::from(&c * &p[2]);
            d[k - 3] -= Rational::from(&c * &p[3]);
        }
        let [d0, d1, d2, _, _] = d;
        FieldElement::new([d0, d1, d2])
    }

    /// Matrix of multiplication by `x`; column `j` holds `x · t^j`.
    pub fn multiplication_matrix(&self, x: &FieldElement) -> [[Rational; 3]; 3] {
        let mut m: [[Rational; 3]; 3] = Default::default();
        let mut basis = self.one();
        for j in 0..3 {
            let col = self.mul(x, &basis);
            for (i, c) in col.coords().iter().enumerate() {
                m[i][j] = c.clone();
            }
            basis = self.mul(&basis, &self.generator());
        }
        m
    }

    pub fn norm(&self, x: &FieldElement) -> Rational {
        det3(&self.multiplication_matrix(x))
    }

    pub fn trace(&self, x: &FieldElement) -> Rational {
        let m = self.multiplication_matrix(x);
        Rational::from(&m[0][0] + &m[1][1]) + &m[2][2]
    }

    /// Characteristic polynomial `X³ − e1·X² + e2·X − e3`, leading first.
    pub fn char_poly(&self, x: &FieldElement) -> [Rational; 4] {
        let m = self.multiplication_matrix(x);
        let e1 = Rational::from(&m[0][0] + &m[1][1]) + &m[2][2];
        let minor = |a: usize, b: usize| {
            Rational::from(&m[a][a] * &m[b][b]) - Rational::from(&m[a][b] * &m[b][a])
        };
        let e2 = minor(0, 1) + minor(0, 2) + minor(1, 2);
        let e3 = det3(&m);
        [Rational::from(1), -e1, e2, -e3]
    }

    /// Minimal polynomial over Q: degree 1 for rationals, else the
    /// characteristic polynomial (every irrational element has degree 3).
    pub fn minimal_poly(&self, x: &FieldElement) -> Vec<Rational> {
        if let Some(q) = x.as_rational() {
            vec![Rational::from(1), -q]
        } else {
            self.char_poly(x).to_vec()
        }
    }

    pub fn is_integral(&self, x: &FieldElement) -> bool {
        self.char_poly(x).iter().all(|c| *c.denom() == 1)
    }

    pub fn is_unit(&self, x: &FieldElement) -> bool {
        if !self.is_integral(x) {
            return false;
        }
        let n = self.norm(x);
        n == 1 || n == -1
    }

    pub fn inv(&self, x: &FieldElement) -> Result<FieldElement, FieldError> {
        let m = self.multiplication_matrix(x);
        let det = det3(&m);
        if det == 0 {
            return Err(FieldError::DivisionByZero);
        }
        // Cramer on M·v = e0.
        let mut v: [Rational; 3] = Default::default();
        for (col, slot) in v.iter_mut().enumerate() {
            let mut mm = m.clone();
            for (row, line) in mm.iter_mut().enumerate() {
                line[col] = Rational::from(u32::from(row == 0));
            }
            *slot = det3(&mm) / &det;
        }
        Ok(FieldElement::new(v))
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, x: &FieldElement, n: i64) -> Result<FieldElement, FieldError> {
        let mut base = if n < 0 { self.inv(x)? } else { x.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        Ok(acc)
    }

    /// Enclosures of the real image and of `σ(x)`, each of width at most `tol`.
    pub fn embed(&self, x: &FieldElement, tol: f64) -> (Interval, ComplexInterval) {
        let mut bits = bits_for_tolerance(tol);
        loop {
            let e = self.embeddings(bits);
            let r = e.real(x);
            let c = e.complex(x);
            let ok = r.width_f64() <= tol && c.max_width() <= tol;
            if ok || bits >= 1 << 16 {
                return (r, c);
            }
            bits *= 2;
        }
    }

    /// `max(|x|, |σ(x)|)`, width at most `tol`.
    pub fn house(&self, x: &FieldElement, tol: f64) -> Result<Interval, FieldError> {
        if x.is_zero() {
            return Err(FieldError::ZeroElement);
        }
        let (r, c) = self.embed(x, tol / 2.0);
        Ok(r.abs().max(&c.abs()))
    }
}

impl fmt::Display for CubicField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.min_poly;
        write!(f, "Q(t), t^3 + ({})t^2 + ({})t + ({})", p[1], p[2], p[3])
    }
}

impl Embeddings {
    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn real_root(&self) -> &Interval {
        &self.real_root
    }

    pub fn complex_root(&self) -> &ComplexInterval {
        &self.complex_root
    }

    pub fn real(&self, x: &FieldElement) -> Interval {
        let c = x.coords();
        let prec = self.prec;
        let mut acc = Interval::from_rational(prec, &c[2]);
        acc = &(&acc * &self.real_root) + &Interval::from_rational(prec, &c[1]);
        &(&acc * &self.real_root) + &Interval::from_rational(prec, &c[0])
    }

    pub fn complex(&self, x: &FieldElement) -> ComplexInterval {
        let c = x.coords();
        let prec = self.prec;
        let q = |v: &Rational| ComplexInterval::real(Interval::from_rational(prec, v));
        let mut acc = q(&c[2]);
        acc = &(&acc * &self.complex_root) + &q(&c[1]);
        &(&acc * &self.complex_root) + &q(&c[0])
    }

    /// The three conjugates: real, `σ`, `σ̄`.
    pub fn conjugates(&self, x: &FieldElement) -> [ComplexInterval; 3] {
        let s = self.complex(x);
        [ComplexInterval::real(self.real(x)), s.clone(), s.conj()]
    }
}

pub(crate) fn det3(m: &[[Rational; 3]; 3]) -> Rational {
    let t = |a: &Rational, b: &Rational, c: &Rational| Rational::from(a * b) * c;
    let mut d = t(&m[0][0], &m[1][1], &m[2][2]);
    d += t(&m[0][1], &m[1][2], &m[2][0]);
    d += t(&m[0][2], &m[1][0], &m[2][1]);
    d -= t(&m[0][2], &m[1][1], &m[2][0]);
    d -= t(&m[0][0], &m[1][2], &m[2][1]);
    d -= t(&m[0][1], &m[1][0], &m[2][2]);
    d
}

/// A rational root of a monic integer cubic must be an integer dividing
/// the constant term.
fn rational_root(p: &[Integer; 4]) -> Option<Integer> {
    let c = &p[3];
    if *c == 0 {
        return Some(Integer::new());
    }
    let n = Integer::from(c.abs_ref());
    let mut d = Integer::from(1);
    while Integer::from(&d * &d) <= n {
        if n.is_divisible(&d) {
            let e = Integer::from(&n / &d);
            for cand in [d.clone(), -d.clone(), e.clone(), -e] {
                if poly::eval_integer(p, &cand) == 0 {
                    return Some(cand);
                }
            }
        }
        d += 1;
    }
    None
}
