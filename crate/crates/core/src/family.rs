//! Unit-indexed families of binary cubic forms
//! `F_n(X, Y) = N(X − ε^n·α·Y)` and the example family built from
//! `ε = (∛(D³+1) − D)^{-1}`.

use std::fmt;

use rug::{Complete, Integer, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cubicfield::{CubicField, FieldElement, FieldError};
use crate::interval::Interval;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("form is reducible over Q")]
    ReducibleForm,
    #[error("epsilon is not a unit")]
    NotAUnit,
    #[error("real embedding of epsilon is not greater than 1")]
    EpsilonNotAboveOne,
    #[error("alpha is not an irrational algebraic integer")]
    BadAlpha,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// `a0·X³ + a1·X²Y + a2·XY² + a3·Y³`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryCubicForm {
    pub a: [Integer; 4],
}

impl BinaryCubicForm {
    pub fn new(a: [Integer; 4]) -> Self {
        BinaryCubicForm { a }
    }

    pub fn from_i64(a: [i64; 4]) -> Self {
        BinaryCubicForm {
            a: a.map(Integer::from),
        }
    }

    pub fn evaluate(&self, x: &Integer, y: &Integer) -> Integer {
        // Homogeneous Horner: ((a0·x + a1·y)·x + a2·y²)·x + a3·y³.
        let mut acc = (&self.a[0] * x).complete();
        acc += (&self.a[1] * y).complete();
        acc *= x;
        let y2 = (y * y).complete();
        acc += (&self.a[2] * &y2).complete();
        acc *= x;
        acc += (&self.a[3] * &(&y2 * y).complete()).complete();
        acc
    }

    /// Checked machine-integer evaluation; `None` on overflow.
    pub fn evaluate_i128(&self, x: i128, y: i128) -> Option<i128> {
        let c = [
            self.a[0].to_i128()?,
            self.a[1].to_i128()?,
            self.a[2].to_i128()?,
            self.a[3].to_i128()?,
        ];
        let y2 = y.checked_mul(y)?;
        let mut acc = c[0].checked_mul(x)?.checked_add(c[1].checked_mul(y)?)?;
        acc = acc.checked_mul(x)?.checked_add(c[2].checked_mul(y2)?)?;
        acc.checked_mul(x)?
            .checked_add(c[3].checked_mul(y2.checked_mul(y)?)?)
    }

    pub fn evaluate_i64(&self, x: i64, y: i64) -> Integer {
        match self.evaluate_i128(x as i128, y as i128) {
            Some(v) => Integer::from(v),
            None => self.evaluate(&Integer::from(x), &Integer::from(y)),
        }
    }

    /// `G(X, Y) = F(Y, X)`.
    pub fn swapped(&self) -> Self {
        let [a0, a1, a2, a3] = self.a.clone();
        BinaryCubicForm::new([a3, a2, a1, a0])
    }

    pub fn negated(&self) -> Self {
        BinaryCubicForm::new(self.a.clone().map(|c| -c))
    }

    /// A rational point `[p : q]` where the form vanishes, if any.
    pub fn rational_zero(&self) -> Option<(Integer, Integer)> {
        let [a0, _, _, a3] = &self.a;
        if *a0 == 0 {
            return Some((Integer::from(1), Integer::new()));
        }
        if *a3 == 0 {
            return Some((Integer::new(), Integer::from(1)));
        }
        let num = divisors(a3);
        let den = divisors(a0);
        for q in &den {
            for p in &num {
                for p in [p.clone(), (-p).complete()] {
                    if p.clone().gcd(q) != 1 {
                        continue;
                    }
                    if self.evaluate(&p, q) == 0 {
                        return Some((p, q.clone()));
                    }
                }
            }
        }
        None
    }

    pub fn is_irreducible(&self) -> bool {
        self.rational_zero().is_none()
    }

    /// `F(X, 1)`, leading coefficient first.
    pub fn dehomogenized(&self) -> [Integer; 4] {
        self.a.clone()
    }

    pub fn to_strings(&self) -> [String; 4] {
        self.a.clone().map(|c| c.to_string())
    }
}

impl fmt::Display for BinaryCubicForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.a[0], self.a[1], self.a[2], self.a[3])
    }
}

fn divisors(n: &Integer) -> Vec<Integer> {
    let n = n.clone().abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = Integer::from(1);
    while (&d * &d).complete() <= n {
        if n.is_divisible(&d) {
            let e = (&n / &d).complete();
            if e != d {
                large.push(e);
            }
            small.push(d.clone());
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Substitution produced by [`normalize`]: solutions `(x, y)` of
/// `|F| ≤ k` map to solutions `(a0·x, y)` of `|F̃| ≤ a0²·k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scaling {
    pub a0: Integer,
}

impl Scaling {
    pub fn is_identity(&self) -> bool {
        self.a0 == 1
    }

    pub fn map_x(&self, x: &Integer) -> Integer {
        (&self.a0 * x).complete()
    }

    pub fn map_k(&self, k: &Integer) -> Integer {
        (&self.a0 * &self.a0).complete() * k
    }
}

/// `F̃(T, Y) = T³ + a1·T²Y + a0·a2·TY² + a0²·a3·Y³`, so that
/// `a0²·F(X, Y) = F̃(a0·X, Y)`.
pub fn normalize(f: &BinaryCubicForm) -> Result<(BinaryCubicForm, Scaling), FamilyError> {
    if !f.is_irreducible() {
        return Err(FamilyError::ReducibleForm);
    }
    let [a0, a1, a2, a3] = &f.a;
    let g = BinaryCubicForm::new([
        Integer::from(1),
        a1.clone(),
        (a0 * a2).complete(),
        (a0 * a0).complete() * a3,
    ]);
    Ok((g, Scaling { a0: a0.clone() }))
}

/// Where a family came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    /// Parameter of the example family, if this is one.
    pub d: Option<i64>,
    /// Original form before normalization, when it was not monic.
    pub original: Option<BinaryCubicForm>,
    pub scaling: Scaling,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FormFamily {
    field: CubicField,
    alpha: FieldElement,
    epsilon: FieldElement,
    provenance: Provenance,
}

/// Serializable description of a family; numbers are decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyRecord {
    pub min_poly: Vec<String>,
    pub alpha_coords: Vec<String>,
    pub epsilon_coords: Vec<String>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<i64>,
}

/// Exact check of `F_{-n}(X, Y) = −F_{n−2}(Y, X)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SwapCheck {
    pub n: i64,
    pub holds: bool,
    pub lhs: BinaryCubicForm,
    pub rhs: BinaryCubicForm,
}

/// Trace sequence `a_n = tr(ε^{n+1})` of the example family together
/// with the recurrence checks.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSequence {
    pub d: i64,
    pub start: i64,
    pub values: Vec<Integer>,
    /// `a_{n+3} = 3D²·a_{n+2} + 3D·a_{n+1} + a_n` holds on the range.
    pub recurrence_holds: bool,
    pub discrepancy: RecurrenceDiscrepancy,
}

/// `a_1` from the trace, from the recurrence with coefficients
/// `(3D², 3D)` and from the swapped order `(3D, 3D²)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecurrenceDiscrepancy {
    pub a1_trace: Integer,
    pub a1_corrected: Integer,
    pub a1_swapped_order: Integer,
}

impl RecurrenceDiscrepancy {
    pub fn corrected_matches(&self) -> bool {
        self.a1_corrected == self.a1_trace
    }

    pub fn swapped_order_matches(&self) -> bool {
        self.a1_swapped_order == self.a1_trace
    }
}

impl CoefficientSequence {
    pub fn get(&self, n: i64) -> Option<&Integer> {
        let i = n.checked_sub(self.start)?;
        usize::try_from(i).ok().and_then(|i| self.values.get(i))
    }
}

fn check_d(d: i64) -> Result<(), FamilyError> {
    match d {
        -1 => Err(FamilyError::InvalidParameter(
            "D = -1 makes D^3 + 1 vanish".into(),
        )),
        0 => Err(FamilyError::InvalidParameter(
            "D = 0 gives epsilon = 1".into(),
        )),
        _ if d.unsigned_abs() > 1_000_000 => Err(FamilyError::InvalidParameter(format!(
            "D = {d} is out of range"
        ))),
        _ => Ok(()),
    }
}

impl FormFamily {
    /// Family `N(X − ε^n·α·Y)` for `α` an irrational algebraic integer and
    /// `ε` a unit whose real embedding exceeds 1.
    pub fn new(
        field: CubicField,
        alpha: FieldElement,
        epsilon: FieldElement,
    ) -> Result<Self, FamilyError> {
        Self::with_provenance(
            field,
            alpha,
            epsilon,
            Provenance {
                d: None,
                original: None,
                scaling: Scaling { a0: Integer::from(1) },
            },
        )
    }

    fn with_provenance(
        field: CubicField,
        alpha: FieldElement,
        epsilon: FieldElement,
        provenance: Provenance,
    ) -> Result<Self, FamilyError> {
        if alpha.is_rational() || !field.is_integral(&alpha) {
            return Err(FamilyError::BadAlpha);
        }
        if !field.is_unit(&epsilon) {
            return Err(FamilyError::NotAUnit);
        }
        let (re, _) = field.embed(&epsilon, 1e-30);
        if !Interval::one(re.prec()).certainly_lt(&re) {
            return Err(FamilyError::EpsilonNotAboveOne);
        }
        Ok(FormFamily {
            field,
            alpha,
            epsilon,
            provenance,
        })
    }

    /// Family whose base form is `f`; the form is normalized first and
    /// `α` is the root of `F̃(X, 1)`. `epsilon` is given in the power
    /// basis of that root.
    pub fn from_form(f: &BinaryCubicForm, epsilon: &[Rational; 3]) -> Result<Self, FamilyError> {
        let (g, scaling) = normalize(f)?;
        let field = CubicField::new(&g.a)?;
        let alpha = field.generator();
        let original = (!scaling.is_identity()).then(|| f.clone());
        Self::with_provenance(
            field,
            alpha,
            FieldElement::new(epsilon.clone()),
            Provenance {
                d: None,
                original,
                scaling,
            },
        )
    }

    pub fn field(&self) -> &CubicField {
        &self.field
    }

    pub fn alpha(&self) -> &FieldElement {
        &self.alpha
    }

    pub fn epsilon(&self) -> &FieldElement {
        &self.epsilon
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn example_d(&self) -> Option<i64> {
        self.provenance.d
    }

    /// `β_n = ε^n·α`.
    pub fn beta(&self, n: i64) -> FieldElement {
        let e = self.field.pow(&self.epsilon, n).expect("units are invertible");
        self.field.mul(&e, &self.alpha)
    }

    /// `ε^n·α ∈ Q`; then `F_n` is a cube of a linear form.
    pub fn is_degenerate(&self, n: i64) -> bool {
        self.beta(n).is_rational()
    }

    pub fn form_at(&self, n: i64) -> BinaryCubicForm {
        self.form_of(&self.beta(n))
    }

    /// `N(X − β·Y) = X³ − tr(β)·X²Y + N(β)·tr(β⁻¹)·XY² − N(β)·Y³`.
    pub fn form_of(&self, beta: &FieldElement) -> BinaryCubicForm {
        let [_, c1, c2, c3] = self.field.char_poly(beta);
        // char poly X³ − e1 X² + e2 X − e3 with e2 = N(β)·tr(β⁻¹).
        let int = |q: Rational| {
            assert_eq!(*q.denom(), 1, "algebraic integer expected");
            q.into_numer_denom().0
        };
        BinaryCubicForm::new([Integer::from(1), int(c1), int(c2), int(c3)])
    }

    pub fn to_record(&self) -> FamilyRecord {
        FamilyRecord {
            min_poly: self.field.min_poly().iter().map(|c| c.to_string()).collect(),
            alpha_coords: self.alpha.to_strings().to_vec(),
            epsilon_coords: self.epsilon.to_strings().to_vec(),
            d: self.provenance.d,
        }
    }

    pub fn from_record(rec: &FamilyRecord) -> Result<Self, FamilyError> {
        let bad = |what: &str| FamilyError::InvalidParameter(format!("unparsable {what}"));
        if rec.min_poly.len() != 4 {
            return Err(bad("min_poly"));
        }
        let mut poly = Vec::with_capacity(4);
        for s in &rec.min_poly {
            poly.push(Integer::from_str_radix(s.trim(), 10).map_err(|_| bad("min_poly"))?);
        }
        let field = CubicField::new(&poly)?;
        let alpha = FieldElement::parse(&rec.alpha_coords).ok_or_else(|| bad("alpha_coords"))?;
        let epsilon =
            FieldElement::parse(&rec.epsilon_coords).ok_or_else(|| bad("epsilon_coords"))?;
        Self::with_provenance(
            field,
            alpha,
            epsilon,
            Provenance {
                d: rec.d,
                original: None,
                scaling: Scaling { a0: Integer::from(1) },
            },
        )
    }
}

/// The field `X³ + 3D·X² + 3D²·X − 1` generated by `t = ε^{-1}`, with
/// `α = ε = t² + 3D·t + 3D²`.
pub fn example_family(d: i64) -> Result<FormFamily, FamilyError> {
    check_d(d)?;
    let dd = Integer::from(d);
    let field = CubicField::new(&[
        Integer::from(1),
        (&dd * 3u32).complete(),
        (&dd * &dd).complete() * 3u32,
        Integer::from(-1),
    ])?;
    let eps = FieldElement::new([
        Rational::from(3 * d * d),
        Rational::from(3 * d),
        Rational::from(1),
    ]);
    FormFamily::with_provenance(
        field,
        eps.clone(),
        eps,
        Provenance {
            d: Some(d),
            original: None,
            scaling: Scaling { a0: Integer::from(1) },
        },
    )
}

/// `a_n = tr(ε^{n+1})` for `n` in `lo..=hi`, checked against the
/// recurrence from the minimal polynomial `X³ − 3D²X² − 3DX − 1` of `ε`.
pub fn coefficient_sequence(d: i64, lo: i64, hi: i64) -> Result<CoefficientSequence, FamilyError> {
    check_d(d)?;
    if lo > hi {
        return Err(FamilyError::InvalidParameter("empty range".into()));
    }
    let fam = example_family(d)?;
    let k = fam.field();
    let mut p = k.pow(fam.epsilon(), lo + 1)?;
    let mut values = Vec::with_capacity((hi - lo + 1) as usize);
    for _ in lo..=hi {
        let t = k.trace(&p);
        values.push(t.into_numer_denom().0);
        p = k.mul(&p, fam.epsilon());
    }
    let c2 = Integer::from(3 * d * d);
    let c1 = Integer::from(3 * d);
    let step = |a2: &Integer, a1: &Integer, a0: &Integer, x: &Integer, y: &Integer| {
        (x * a2).complete() + (y * a1).complete() + a0
    };
    let recurrence_holds = values
        .windows(4)
        .all(|w| step(&w[2], &w[1], &w[0], &c2, &c1) == w[3]);

    let tr = |n: i64| -> Integer {
        let e = k.pow(fam.epsilon(), n + 1).expect("unit");
        k.trace(&e).into_numer_denom().0
    };
    let (a0, am1, am2) = (tr(0), tr(-1), tr(-2));
    let discrepancy = RecurrenceDiscrepancy {
        a1_trace: tr(1),
        a1_corrected: step(&a0, &am1, &am2, &c2, &c1),
        a1_swapped_order: step(&a0, &am1, &am2, &c1, &c2),
    };
    Ok(CoefficientSequence {
        d,
        start: lo,
        values,
        recurrence_holds,
        discrepancy,
    })
}

/// `b_n = −a_{−n−2}`; the example form is `X³ − a_n·X²Y − b_n·XY² − Y³`.
pub fn b_coefficient(seq: &CoefficientSequence, n: i64) -> Option<Integer> {
    seq.get(-n - 2).map(|a| (-a).complete())
}

pub fn negative_n_swap(f: &BinaryCubicForm) -> BinaryCubicForm {
    f.swapped()
}

pub fn swap_identity_check(fam: &FormFamily, n: i64) -> SwapCheck {
    let lhs = fam.form_at(-n);
    let rhs = fam.form_at(n - 2).swapped().negated();
    SwapCheck {
        n,
        holds: lhs == rhs,
        lhs,
        rhs,
    }
}
