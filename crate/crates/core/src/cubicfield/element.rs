use std::fmt;
use std::ops::{Add, Neg, Sub};

use rug::{Integer, Rational};

/// An element `c0 + c1·t + c2·t²` of a cubic field. Addition does not
/// need the field; products go through [`super::CubicField`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct FieldElement {
    coords: [Rational; 3],
}

impl FieldElement {
    pub fn new(coords: [Rational; 3]) -> Self {
        FieldElement { coords }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_integer(v: i64) -> Self {
        Self::from_rational(Rational::from(v))
    }

    pub fn from_rational(v: Rational) -> Self {
        FieldElement {
            coords: [v, Rational::new(), Rational::new()],
        }
    }

    pub fn from_i64s(c: [i64; 3]) -> Self {
        FieldElement::new(c.map(Rational::from))
    }

    pub fn coords(&self) -> &[Rational; 3] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| *c == 0)
    }

    pub fn as_rational(&self) -> Option<Rational> {
        (self.coords[1] == 0 && self.coords[2] == 0).then(|| self.coords[0].clone())
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }

    pub fn scale(&self, k: &Rational) -> Self {
        FieldElement {
            coords: [
                Rational::from(&self.coords[0] * k),
                Rational::from(&self.coords[1] * k),
                Rational::from(&self.coords[2] * k),
            ],
        }
    }

    /// Common denominator of the coordinates.
    pub fn denominator(&self) -> Integer {
        self.coords
            .iter()
            .fold(Integer::from(1), |acc, c| acc.lcm(c.denom()))
    }

    /// Coordinates as exact decimal or fraction strings.
    pub fn to_strings(&self) -> [String; 3] {
        self.coords.clone().map(|c| c.to_string())
    }

    pub fn parse(coords: &[String]) -> Option<Self> {
        if coords.len() != 3 {
            return None;
        }
        let mut out: [Rational; 3] = Default::default();
        for (slot, s) in out.iter_mut().zip(coords) {
            *slot = Rational::from_str_radix(s.trim(), 10).ok()?;
        }
        Some(FieldElement::new(out))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = &self.coords;
        write!(f, "{a} + ({b})t + ({c})t^2")
    }
}

impl<'a> Add<&'a FieldElement> for &FieldElement {
    type Output = FieldElement;
    fn add(self, o: &'a FieldElement) -> FieldElement {
        FieldElement {
            coords: [
                Rational::from(&self.coords[0] + &o.coords[0]),
                Rational::from(&self.coords[1] + &o.coords[1]),
                Rational::from(&self.coords[2] + &o.coords[2]),
            ],
        }
    }
}

impl<'a> Sub<&'a FieldElement> for &FieldElement {
    type Output = FieldElement;
    fn sub(self, o: &'a FieldElement) -> FieldElement {
        FieldElement {
            coords: [
                Rational::from(&self.coords[0] - &o.coords[0]),
                Rational::from(&self.coords[1] - &o.coords[1]),
                Rational::from(&self.coords[2] - &o.coords[2]),
            ],
        }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            coords: self.coords.clone().map(|c| -c),
        }
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, o: FieldElement) -> FieldElement {
        &self + &o
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, o: FieldElement) -> FieldElement {
        &self - &o
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        let x = FieldElement::new([Rational::from((1, 3)), Rational::from(-4), Rational::new()]);
        let s = x.to_strings();
        assert_eq!(FieldElement::parse(&s), Some(x.clone()));
        assert_eq!(x.denominator(), 3);
        assert!(FieldElement::parse(&["1".into(), "x".into(), "0".into()]).is_none());
    }
}
