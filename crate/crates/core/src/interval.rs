//! Certified real intervals and complex boxes over MPFR.
//!
//! Every operation rounds its lower endpoint toward −∞ and its upper
//! endpoint toward +∞, so the true value of any expression evaluated on
//! enclosures stays inside the resulting enclosure. MPFR functions are
//! correctly rounded, which is what makes the endpoint rounding sound
//! for the transcendental functions as well.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::float::{Constant, Round, Special};
use rug::{Float, Integer, Rational};

/// Closed interval `[lo, hi]` with MPFR endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    lo: Float,
    hi: Float,
}

fn round_pair<T>(prec: u32, lo: T, hi: T) -> (Float, Float)
where
    Float: rug::ops::AssignRound<T, Round = Round, Ordering = Ordering>,
{
    let (lo, _) = Float::with_val_round(prec, lo, Round::Down);
    let (hi, _) = Float::with_val_round(prec, hi, Round::Up);
    (lo, hi)
}

fn min_f(a: Float, b: Float) -> Float {
    if a.is_nan() || b.is_nan() {
        return Float::with_val(a.prec(), Special::NegInfinity);
    }
    if a <= b {
        a
    } else {
        b
    }
}

fn max_f(a: Float, b: Float) -> Float {
    if a.is_nan() || b.is_nan() {
        return Float::with_val(a.prec(), Special::Infinity);
    }
    if a >= b {
        a
    } else {
        b
    }
}

impl Interval {
    pub fn new(lo: Float, hi: Float) -> Self {
        debug_assert!(lo.is_nan() || hi.is_nan() || lo <= hi, "inverted interval");
        Interval { lo, hi }
    }

    pub fn point(prec: u32, value: f64) -> Self {
        let (lo, hi) = round_pair(prec, value, value);
        Interval { lo, hi }
    }

    pub fn zero(prec: u32) -> Self {
        Self::point(prec, 0.0)
    }

    pub fn one(prec: u32) -> Self {
        Self::point(prec, 1.0)
    }

    pub fn from_integer(prec: u32, value: &Integer) -> Self {
        let (lo, hi) = round_pair(prec, value, value);
        Interval { lo, hi }
    }

    pub fn from_i64(prec: u32, value: i64) -> Self {
        let (lo, hi) = round_pair(prec, value, value);
        Interval { lo, hi }
    }

    pub fn from_rational(prec: u32, value: &Rational) -> Self {
        let (lo, hi) = round_pair(prec, value, value);
        Interval { lo, hi }
    }

    /// Hull of two rationals, `lo ≤ hi`.
    pub fn from_rational_bounds(prec: u32, lo: &Rational, hi: &Rational) -> Self {
        let (lo, _) = Float::with_val_round(prec, lo, Round::Down);
        let (hi, _) = Float::with_val_round(prec, hi, Round::Up);
        Interval { lo, hi }
    }

    /// The whole real line; the result of dividing by an interval containing zero.
    pub fn entire(prec: u32) -> Self {
        Interval {
            lo: Float::with_val(prec, Special::NegInfinity),
            hi: Float::with_val(prec, Special::Infinity),
        }
    }

    pub fn pi(prec: u32) -> Self {
        let (lo, hi) = round_pair(prec, Constant::Pi, Constant::Pi);
        Interval { lo, hi }
    }

    pub fn two_pi(prec: u32) -> Self {
        Self::pi(prec).mul_i64(2)
    }

    pub fn prec(&self) -> u32 {
        self.lo.prec().max(self.hi.prec())
    }

    pub fn lo(&self) -> &Float {
        &self.lo
    }

    pub fn hi(&self) -> &Float {
        &self.hi
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// Upper bound of `hi − lo`.
    pub fn width(&self) -> Float {
        let (w, _) = Float::with_val_round(self.prec(), &self.hi - &self.lo, Round::Up);
        w
    }

    pub fn width_f64(&self) -> f64 {
        self.width().to_f64_round(Round::Up)
    }

    pub fn mid(&self) -> Float {
        let mut m = Float::with_val(self.prec() + 1, &self.lo + &self.hi);
        m /= 2;
        m
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid().to_f64()
    }

    /// Upper bound of `max(|x − mid|)`.
    pub fn radius(&self) -> Float {
        let m = self.mid();
        let (a, _) = Float::with_val_round(self.prec(), &self.hi - &m, Round::Up);
        let (b, _) = Float::with_val_round(self.prec(), &m - &self.lo, Round::Up);
        max_f(a, b)
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0 && self.hi >= 0
    }

    pub fn contains_f64(&self, v: f64) -> bool {
        self.lo <= v && self.hi >= v
    }

    pub fn contains_rational(&self, v: &Rational) -> bool {
        self.lo <= *v && self.hi >= *v
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.lo <= other.lo && self.hi >= other.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo > 0
    }

    pub fn is_negative(&self) -> bool {
        self.hi < 0
    }

    /// Certainly `self < other` for every pair of points.
    pub fn certainly_lt(&self, other: &Interval) -> bool {
        self.hi < other.lo
    }

    pub fn certainly_le(&self, other: &Interval) -> bool {
        self.hi <= other.lo
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: min_f(self.lo.clone(), other.lo.clone()),
            hi: max_f(self.hi.clone(), other.hi.clone()),
        }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = max_f(self.lo.clone(), other.lo.clone());
        let hi = min_f(self.hi.clone(), other.hi.clone());
        if lo <= hi {
            Some(Interval { lo, hi })
        } else {
            None
        }
    }

    /// Pointwise maximum of two intervals.
    pub fn max(&self, other: &Interval) -> Interval {
        Interval {
            lo: max_f(self.lo.clone(), other.lo.clone()),
            hi: max_f(self.hi.clone(), other.hi.clone()),
        }
    }

    pub fn min(&self, other: &Interval) -> Interval {
        Interval {
            lo: min_f(self.lo.clone(), other.lo.clone()),
            hi: min_f(self.hi.clone(), other.hi.clone()),
        }
    }

    /// Re-round the endpoints outward at a new precision.
    pub fn with_prec(&self, prec: u32) -> Interval {
        let (lo, hi) = round_pair(prec, &self.lo, &self.hi);
        Interval { lo, hi }
    }

    pub fn abs(&self) -> Interval {
        if self.lo >= 0 {
            self.clone()
        } else if self.hi <= 0 {
            -self
        } else {
            let neg_lo = Float::with_val(self.prec(), -&self.lo);
            Interval {
                lo: Float::with_val(self.prec(), 0),
                hi: max_f(neg_lo, self.hi.clone()),
            }
        }
    }

    pub fn sqr(&self) -> Interval {
        let a = self.abs();
        let prec = self.prec();
        let (lo, hi) = round_pair(prec, a.lo.square_ref(), a.hi.square_ref());
        Interval { lo, hi }
    }

    pub fn mul_i64(&self, k: i64) -> Interval {
        self * &Interval::from_i64(self.prec(), k)
    }

    pub fn recip(&self) -> Interval {
        let prec = self.prec();
        if self.contains_zero() {
            return Interval::entire(prec);
        }
        let (lo, hi) = round_pair(prec, self.hi.recip_ref(), self.lo.recip_ref());
        Interval { lo, hi }
    }

    pub fn div(&self, other: &Interval) -> Interval {
        if other.contains_zero() {
            return Interval::entire(self.prec().max(other.prec()));
        }
        self * &other.recip()
    }

    /// Square root, with the domain clamped to `[0, ∞)`.
    pub fn sqrt(&self) -> Interval {
        let prec = self.prec();
        let lo = if self.lo <= 0 {
            Float::with_val(prec, 0)
        } else {
            Float::with_val_round(prec, self.lo.sqrt_ref(), Round::Down).0
        };
        let hi = if self.hi <= 0 {
            Float::with_val(prec, 0)
        } else {
            Float::with_val_round(prec, self.hi.sqrt_ref(), Round::Up).0
        };
        Interval { lo, hi }
    }

    pub fn cbrt(&self) -> Interval {
        let (lo, hi) = round_pair(self.prec(), self.lo.cbrt_ref(), self.hi.cbrt_ref());
        Interval { lo, hi }
    }

    pub fn exp(&self) -> Interval {
        let (lo, hi) = round_pair(self.prec(), self.lo.exp_ref(), self.hi.exp_ref());
        Interval { lo, hi }
    }

    /// Natural logarithm; a nonpositive lower endpoint maps to −∞.
    pub fn ln(&self) -> Interval {
        let prec = self.prec();
        let lo = if self.lo <= 0 {
            Float::with_val(prec, Special::NegInfinity)
        } else {
            Float::with_val_round(prec, self.lo.ln_ref(), Round::Down).0
        };
        let hi = if self.hi <= 0 {
            Float::with_val(prec, Special::NegInfinity)
        } else {
            Float::with_val_round(prec, self.hi.ln_ref(), Round::Up).0
        };
        Interval { lo, hi }
    }

    /// `self^e` for positive `self`, via `exp(e · ln self)`.
    pub fn powf(&self, e: &Interval) -> Interval {
        (e * &self.ln()).exp()
    }

    pub fn powi(&self, n: i64) -> Interval {
        if n == 0 {
            return Interval::one(self.prec());
        }
        let mut base = if n < 0 { self.recip() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Interval::one(self.prec());
        // Even powers go through `sqr`, which keeps them nonnegative.
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr();
            }
        }
        acc
    }

    pub fn sin(&self) -> Interval {
        self.trig(false)
    }

    pub fn cos(&self) -> Interval {
        self.trig(true)
    }

    // Endpoint evaluation plus a check for interior extrema: cos has a
    // maximum at 2jπ and a minimum at (2j+1)π, sin is cos shifted by π/2.
    fn trig(&self, cosine: bool) -> Interval {
        let prec = self.prec();
        if !self.is_finite() || self.width() >= 6 {
            return Interval::new(Float::with_val(prec, -1), Float::with_val(prec, 1));
        }
        let (a_lo, a_hi, b_lo, b_hi) = if cosine {
            (
                Float::with_val_round(prec, self.lo.cos_ref(), Round::Down).0,
                Float::with_val_round(prec, self.lo.cos_ref(), Round::Up).0,
                Float::with_val_round(prec, self.hi.cos_ref(), Round::Down).0,
                Float::with_val_round(prec, self.hi.cos_ref(), Round::Up).0,
            )
        } else {
            (
                Float::with_val_round(prec, self.lo.sin_ref(), Round::Down).0,
                Float::with_val_round(prec, self.lo.sin_ref(), Round::Up).0,
                Float::with_val_round(prec, self.hi.sin_ref(), Round::Down).0,
                Float::with_val_round(prec, self.hi.sin_ref(), Round::Up).0,
            )
        };
        let mut lo = min_f(a_lo, b_lo);
        let mut hi = max_f(a_hi, b_hi);
        // Extremum locations: cos peaks at jπ, sin at π/2 + jπ; scaled by 1/π.
        let pi = Interval::pi(prec + 16);
        let shift = if cosine {
            Interval::zero(prec + 16)
        } else {
            Interval::point(prec + 16, 0.5)
        };
        let scaled = &self.with_prec(prec + 16).div(&pi) - &shift;
        let first = scaled.lo.clone().ceil();
        let last = scaled.hi.clone().floor();
        if first <= last {
            let mut j = first.to_integer().unwrap_or_default();
            let end = last.to_integer().unwrap_or_default();
            // Width < 6 keeps this to at most two extrema.
            while j <= end {
                // Even j is a maximum (+1), odd j a minimum (−1).
                if j.is_even() {
                    hi = Float::with_val(prec, 1);
                } else {
                    lo = Float::with_val(prec, -1);
                }
                j += 1;
            }
        }
        let one = Float::with_val(prec, 1);
        let minus_one = Float::with_val(prec, -1);
        Interval {
            lo: max_f(lo, minus_one),
            hi: min_f(hi, one),
        }
    }

    /// Nearest integer to every point of the interval, when unique.
    pub fn unique_integer(&self) -> Option<Integer> {
        let first = self.lo.clone().ceil();
        let last = self.hi.clone().floor();
        if first == last {
            first.to_integer()
        } else {
            None
        }
    }

    /// Integers `⌊lo⌋` and `⌈hi⌉`.
    pub fn integer_hull(&self) -> Option<(Integer, Integer)> {
        if !self.is_finite() {
            return None;
        }
        Some((
            self.lo.clone().floor().to_integer()?,
            self.hi.clone().ceil().to_integer()?,
        ))
    }

    /// Decimal rendering of the midpoint, `digits` significant digits.
    pub fn mid_string(&self, digits: usize) -> String {
        float_to_string(&self.mid(), digits)
    }

    /// Decimal rendering of an upper bound for the radius.
    pub fn radius_string(&self) -> String {
        let r = self.radius();
        let r = Float::with_val_round(53, &r, Round::Up).0;
        float_to_string(&r, 6)
    }

    /// `{"mid": "...", "rad": "..."}` with decimal strings.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({"mid": self.mid_string(30), "rad": self.radius_string()})
    }
}

pub fn float_to_string(f: &Float, digits: usize) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    if !f.is_finite() {
        return f.to_string();
    }
    let s = f.to_string_radix(10, Some(digits.max(1)));
    normalise_decimal(&s)
}

// MPFR writes `1.2500000e3`; turn that into something a JSON consumer can
// parse as a plain decimal literal.
fn normalise_decimal(s: &str) -> String {
    let (mant, exp) = match s.find('e') {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().unwrap_or(0)),
        None => (s, 0),
    };
    let (sign, mant) = match mant.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", mant),
    };
    let (int_part, frac_part) = match mant.find('.') {
        Some(i) => (&mant[..i], &mant[i + 1..]),
        None => (mant, ""),
    };
    let frac_trimmed = frac_part.trim_end_matches('0');
    if exp == 0 || exp.abs() > 30 {
        let body = if frac_trimmed.is_empty() {
            int_part.to_string()
        } else {
            format!("{int_part}.{frac_trimmed}")
        };
        return if exp == 0 {
            format!("{sign}{body}")
        } else {
            format!("{sign}{body}e{exp}")
        };
    }
    let digits: String = format!("{int_part}{frac_trimmed}");
    let point = int_part.len() as i64 + exp;
    let out = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if point as usize >= digits.len() {
        format!("{digits}{}", "0".repeat(point as usize - digits.len()))
    } else {
        format!("{}.{}", &digits[..point as usize], &digits[point as usize..])
    };
    let out = out.trim_start_matches('0');
    let out = if out.is_empty() || out.starts_with('.') {
        format!("0{out}")
    } else {
        out.to_string()
    };
    format!("{sign}{out}")
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            float_to_string(&self.lo, 20),
            float_to_string(&self.hi, 20)
        )
    }
}

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: Float::with_val(self.hi.prec(), -&self.hi),
            hi: Float::with_val(self.lo.prec(), -&self.lo),
        }
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        -&self
    }
}

impl Add for &Interval {
    type Output = Interval;
    fn add(self, rhs: &Interval) -> Interval {
        let prec = self.prec().max(rhs.prec());
        let (lo, hi) = round_pair(prec, &self.lo + &rhs.lo, &self.hi + &rhs.hi);
        Interval { lo, hi }
    }
}

impl Sub for &Interval {
    type Output = Interval;
    fn sub(self, rhs: &Interval) -> Interval {
        let prec = self.prec().max(rhs.prec());
        let (lo, hi) = round_pair(prec, &self.lo - &rhs.hi, &self.hi - &rhs.lo);
        Interval { lo, hi }
    }
}

impl Mul for &Interval {
    type Output = Interval;
    fn mul(self, rhs: &Interval) -> Interval {
        let prec = self.prec().max(rhs.prec());
        let ends = [
            (&self.lo, &rhs.lo),
            (&self.lo, &rhs.hi),
            (&self.hi, &rhs.lo),
            (&self.hi, &rhs.hi),
        ];
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for (a, b) in ends {
            // 0 · ∞ contributes 0 in interval arithmetic.
            let (d, u) = if a.is_zero() || b.is_zero() {
                (Float::with_val(prec, 0), Float::with_val(prec, 0))
            } else {
                (
                    Float::with_val_round(prec, a * b, Round::Down).0,
                    Float::with_val_round(prec, a * b, Round::Up).0,
                )
            };
            lo = Some(match lo {
                Some(cur) => min_f(cur, d),
                None => d,
            });
            hi = Some(match hi {
                Some(cur) => max_f(cur, u),
                None => u,
            });
        }
        Interval {
            lo: lo.expect("four products"),
            hi: hi.expect("four products"),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident, $t:ty) => {
        impl $tr<$t> for $t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&$t> for $t {
            type Output = $t;
            fn $m(self, rhs: &$t) -> $t {
                (&self).$m(rhs)
            }
        }
        impl $tr<$t> for &$t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add, Interval);
forward_owned!(Sub, sub, Interval);
forward_owned!(Mul, mul, Interval);

/// Rectangular complex enclosure `re + i·im`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexInterval {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexInterval {
    pub fn new(re: Interval, im: Interval) -> Self {
        ComplexInterval { re, im }
    }

    pub fn real(re: Interval) -> Self {
        let prec = re.prec();
        ComplexInterval {
            re,
            im: Interval::zero(prec),
        }
    }

    pub fn zero(prec: u32) -> Self {
        Self::real(Interval::zero(prec))
    }

    pub fn one(prec: u32) -> Self {
        Self::real(Interval::one(prec))
    }

    /// `i · t`.
    pub fn imag(t: Interval) -> Self {
        let prec = t.prec();
        ComplexInterval {
            re: Interval::zero(prec),
            im: t,
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn conj(&self) -> Self {
        ComplexInterval {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn abs_sqr(&self) -> Interval {
        &self.re.sqr() + &self.im.sqr()
    }

    pub fn abs(&self) -> Interval {
        self.abs_sqr().sqrt()
    }

    pub fn scale(&self, k: &Interval) -> Self {
        ComplexInterval {
            re: &self.re * k,
            im: &self.im * k,
        }
    }

    pub fn recip(&self) -> Self {
        let d = self.abs_sqr();
        if d.contains_zero() {
            let prec = self.prec();
            return ComplexInterval::new(Interval::entire(prec), Interval::entire(prec));
        }
        let inv = d.recip();
        ComplexInterval {
            re: &self.re * &inv,
            im: -(&self.im * &inv),
        }
    }

    pub fn div(&self, other: &ComplexInterval) -> Self {
        self * &other.recip()
    }

    pub fn powi(&self, n: i64) -> Self {
        if n == 0 {
            return ComplexInterval::one(self.prec());
        }
        let mut base = if n < 0 { self.recip() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = ComplexInterval::one(self.prec());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Principal argument in `(−π, π]`. `None` when the box meets the
    /// origin; a box straddling the negative real axis is handled by
    /// rotating through π.
    pub fn arg(&self) -> Option<Interval> {
        if self.contains_zero() || !self.is_finite() {
            return None;
        }
        let prec = self.prec();
        let straddles_cut = self.re.hi < 0 && self.im.contains_zero();
        if straddles_cut {
            let rotated = -self;
            let inner = rotated.arg()?;
            // arg(z) = arg(−z) + π, taken continuously across the cut.
            return Some(&inner + &Interval::pi(prec));
        }
        let corners = [
            (&self.im.lo, &self.re.lo),
            (&self.im.lo, &self.re.hi),
            (&self.im.hi, &self.re.lo),
            (&self.im.hi, &self.re.hi),
        ];
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for (y, x) in corners {
            let d = Float::with_val_round(prec, y.atan2_ref(x), Round::Down).0;
            let u = Float::with_val_round(prec, y.atan2_ref(x), Round::Up).0;
            lo = Some(match lo {
                Some(c) => min_f(c, d),
                None => d,
            });
            hi = Some(match hi {
                Some(c) => max_f(c, u),
                None => u,
            });
        }
        Some(Interval::new(lo?, hi?))
    }

    /// Argument normalised into `[0, 2π)` (an enclosure straddling 0 keeps
    /// its lower endpoint near 2π and may exceed 2π by its width).
    pub fn arg_positive(&self) -> Option<Interval> {
        let a = self.arg()?;
        let prec = a.prec();
        if a.lo < 0 {
            Some(&a + &Interval::two_pi(prec))
        } else {
            Some(a)
        }
    }

    /// `e^{iφ}`.
    pub fn cis(phi: &Interval) -> Self {
        ComplexInterval {
            re: phi.cos(),
            im: phi.sin(),
        }
    }

    pub fn exp(&self) -> Self {
        ComplexInterval::cis(&self.im).scale(&self.re.exp())
    }

    /// Principal logarithm `ln|z| + i·arg z`.
    pub fn ln(&self) -> Option<Self> {
        Some(ComplexInterval {
            re: self.abs().ln(),
            im: self.arg()?,
        })
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        ComplexInterval {
            re: self.re.with_prec(prec),
            im: self.im.with_prec(prec),
        }
    }

    pub fn max_width(&self) -> f64 {
        self.re.width_f64().max(self.im.width_f64())
    }

    pub fn overlaps(&self, other: &ComplexInterval) -> bool {
        self.re.overlaps(&other.re) && self.im.overlaps(&other.im)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({"re": self.re.to_json(), "im": self.im.to_json()})
    }
}

impl fmt::Display for ComplexInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + i{}", self.re, self.im)
    }
}

impl Neg for &ComplexInterval {
    type Output = ComplexInterval;
    fn neg(self) -> ComplexInterval {
        ComplexInterval {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

impl Neg for ComplexInterval {
    type Output = ComplexInterval;
    fn neg(self) -> ComplexInterval {
        -&self
    }
}

impl Add for &ComplexInterval {
    type Output = ComplexInterval;
    fn add(self, rhs: &ComplexInterval) -> ComplexInterval {
        ComplexInterval {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &ComplexInterval {
    type Output = ComplexInterval;
    fn sub(self, rhs: &ComplexInterval) -> ComplexInterval {
        ComplexInterval {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul for &ComplexInterval {
    type Output = ComplexInterval;
    fn mul(self, rhs: &ComplexInterval) -> ComplexInterval {
        ComplexInterval {
            re: &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            im: &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        }
    }
}

forward_owned!(Add, add, ComplexInterval);
forward_owned!(Sub, sub, ComplexInterval);
forward_owned!(Mul, mul, ComplexInterval);

/// Bits needed for an absolute error of roughly `tol` on quantities of unit size.
pub fn bits_for_tolerance(tol: f64) -> u32 {
    let tol = if tol > 0.0 { tol } else { f64::MIN_POSITIVE };
    let bits = (-tol.log2()).ceil().max(0.0) as u32;
    (bits + 32).max(64)
}
