//! Numerical replay of the finiteness argument for one solution: the
//! three-term unit equation, the case split on the two dominant terms,
//! the inequality ledger and, in the third case, the linear form `Λ`.

use rug::Integer;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::bounds::{log_near_one_check, prop1_log_bound, BakerConfig, LogExpCheck};
use crate::config::Config;
use crate::cubicfield::FieldElement;
use crate::family::{swap_identity_check, FormFamily};
use crate::heights::height_from_conjugates;
use crate::interval::{ComplexInterval, Interval};
use crate::reduction::{decompose_solution, Decomposition, ReductionError, SolutionDecomposition};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TracerError {
    #[error("cannot certify the trace within the configured precision cap")]
    PrecisionExhausted,
    #[error("term magnitudes cannot be ordered at the configured precision cap")]
    AmbiguousOrdering,
    #[error("the two dominant terms are not T2 and T3")]
    NotThirdCase,
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

/// Which two of `T1, T2, T3` have the largest absolute values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TermCase {
    #[serde(rename = "T1T2_dominant")]
    T1T2,
    #[serde(rename = "T1T3_dominant")]
    T1T3,
    #[serde(rename = "T2T3_dominant")]
    T2T3,
}

impl TermCase {
    pub fn name(self) -> &'static str {
        match self {
            TermCase::T1T2 => "T1T2_dominant",
            TermCase::T1T3 => "T1T3_dominant",
            TermCase::T2T3 => "T2T3_dominant",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub case: TermCase,
    /// Indices by decreasing magnitude; the first two may be tied.
    pub order: [usize; 3],
    pub magnitudes: [Interval; 3],
    /// `|a| / |b|` for the two largest terms.
    pub ratio: Interval,
    /// `|a| ≤ 2|b|`, certified.
    pub domination_holds: bool,
}

/// Case split from certified magnitudes. `None` when the smallest term
/// cannot be separated from the middle one.
pub fn classify_magnitudes(m: &[Interval; 3]) -> Option<Classification> {
    let smallest = (0..3).find(|&i| {
        (0..3)
            .filter(|&j| j != i)
            .all(|j| m[i].certainly_lt(&m[j]))
    })?;
    let (i, j) = match smallest {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let case = match smallest {
        0 => TermCase::T2T3,
        1 => TermCase::T1T3,
        _ => TermCase::T1T2,
    };
    let (a, b) = if m[i].mid_f64() >= m[j].mid_f64() { (i, j) } else { (j, i) };
    let domination_holds =
        m[a].certainly_le(&m[b].mul_i64(2)) && m[b].certainly_le(&m[a].mul_i64(2));
    Some(Classification {
        case,
        order: [a, b, smallest],
        magnitudes: m.clone(),
        ratio: m[a].div(&m[b]),
        domination_holds,
    })
}

/// Embedded data shared by the trace, ledger and `Λ` computations.
#[derive(Clone, Debug)]
pub struct Embedded {
    pub bits: u32,
    pub eps: Interval,
    pub eps_c: ComplexInterval,
    pub alpha: Interval,
    pub alpha_c: ComplexInterval,
    pub xi: Interval,
    pub xi_c: ComplexInterval,
    pub xi_conjugates: [ComplexInterval; 3],
    pub beta_conjugates: [ComplexInterval; 3],
}

impl Embedded {
    fn new(fam: &FormFamily, n: i64, xi: &FieldElement, bits: u32) -> Self {
        let e = fam.field().embeddings(bits);
        let eps = e.real(fam.epsilon());
        let eps_c = e.complex(fam.epsilon());
        let alpha = e.real(fam.alpha());
        let alpha_c = e.complex(fam.alpha());
        let beta_conjugates = [
            ComplexInterval::real(&eps.powi(n) * &alpha),
            &eps_c.powi(n) * &alpha_c,
            &eps_c.conj().powi(n) * &alpha_c.conj(),
        ];
        let xi_conjugates = e.conjugates(xi);
        Embedded {
            bits,
            eps,
            eps_c,
            alpha,
            alpha_c,
            xi: e.real(xi),
            xi_c: e.complex(xi),
            xi_conjugates,
            beta_conjugates,
        }
    }

    /// `ε^{t/2}`.
    fn eps_half_pow(&self, t: i64) -> Interval {
        self.eps.sqrt().powi(t)
    }
}

#[derive(Clone, Debug)]
pub struct SiegelTrace {
    pub n: i64,
    pub ell: i64,
    /// Terms from the product formulas.
    pub terms: [ComplexInterval; 3],
    /// Terms from the sine formulas.
    pub sine_terms: [ComplexInterval; 3],
    /// `sin(δ + nθ)`, `sin(v + ℓθ)`, `sin(v − δ + (ℓ − n)θ)`.
    pub sines: [Interval; 3],
    /// Angles of `ε′`, `α′`, `ξ1′` in `[0, 2π)`.
    pub theta: Interval,
    pub delta: Interval,
    pub v: Interval,
    pub sum: ComplexInterval,
    pub forms_agree: bool,
    /// Largest width among the real parts of the product-form terms.
    pub real_width: f64,
    /// Sine enclosures that contain 0.
    pub degenerate_sine: [bool; 3],
    pub classification: Option<Classification>,
    pub embedded: Embedded,
}

impl SiegelTrace {
    pub fn sum_contains_zero(&self) -> bool {
        self.sum.contains_zero()
    }

    /// Every real part contains 0 with width at most `tol`.
    pub fn purely_imaginary(&self, tol: f64) -> bool {
        self.terms
            .iter()
            .all(|t| t.re.contains_zero() && t.re.width_f64() <= tol)
    }
}

fn compute_trace(n: i64, ell: i64, emb: Embedded) -> SiegelTrace {
    let prec = emb.bits;
    let two = Interval::from_i64(prec, 2);
    let eps_l = emb.eps.powi(ell);
    let b = &emb.alpha_c * &emb.eps_c.powi(n);
    let z = &emb.eps_c.powi(ell) * &emb.xi_c;
    let big = &emb.alpha * &emb.eps.powi(n);
    let t1 = (&b - &b.conj()).scale(&(&eps_l * &emb.xi));
    let t2 = (&z.conj() - &z).scale(&big);
    let t3 = &(&z * &b.conj()) - &(&z.conj() * &b);
    let terms = [t1, t2, t3];

    let angle = |c: &ComplexInterval| {
        c.arg_positive()
            .unwrap_or_else(|| Interval::new(Interval::zero(prec).lo().clone(), Interval::two_pi(prec).hi().clone()))
    };
    let theta = angle(&emb.eps_c);
    let delta = angle(&emb.alpha_c);
    let v = angle(&emb.xi_c);
    let s1 = (&delta + &theta.mul_i64(n)).sin();
    let s2 = (&v + &theta.mul_i64(ell)).sin();
    let s3 = (&(&v - &delta) + &theta.mul_i64(ell - n)).sin();
    let abs_alpha_c = emb.alpha_c.abs();
    let abs_xi_c = emb.xi_c.abs();
    let st1 = &(&(&two * &emb.xi) * &abs_alpha_c) * &(&emb.eps_half_pow(2 * ell - n) * &s1);
    let st2 = -(&(&(&two * &abs_xi_c) * &emb.alpha) * &(&emb.eps_half_pow(2 * n - ell) * &s2));
    let st3 = &(&(&two * &abs_xi_c) * &abs_alpha_c) * &(&emb.eps_half_pow(-(n + ell)) * &s3);
    let sine_terms = [
        ComplexInterval::imag(st1),
        ComplexInterval::imag(st2),
        ComplexInterval::imag(st3),
    ];
    let sum = &(&terms[0] + &terms[1]) + &terms[2];
    let forms_agree = terms.iter().zip(&sine_terms).all(|(a, b)| a.overlaps(b));
    let real_width = terms
        .iter()
        .map(|t| t.re.width_f64())
        .fold(0.0, f64::max);
    let sines = [s1, s2, s3];
    let degenerate_sine = [0, 1, 2].map(|i| sines[i].contains_zero());
    let mags = [0, 1, 2].map(|i| terms[i].abs());
    let classification = classify_magnitudes(&mags);
    SiegelTrace {
        n,
        ell,
        terms,
        sine_terms,
        sines,
        theta,
        delta,
        v,
        sum,
        forms_agree,
        real_width,
        degenerate_sine,
        classification,
        embedded: emb,
    }
}

/// Terms of the unit equation, escalating precision until the real parts
/// are below `cfg.precision` and the case split is certified.
pub fn siegel_terms(
    fam: &FormFamily,
    n: i64,
    dec: &Decomposition,
    cfg: &Config,
) -> Result<SiegelTrace, TracerError> {
    let mut bits = cfg.initial_bits();
    loop {
        let emb = Embedded::new(fam, n, &dec.xi, bits);
        let tr = compute_trace(n, dec.ell, emb);
        let finite = tr.terms.iter().all(|t| t.is_finite());
        let narrow = finite && tr.real_width <= cfg.precision;
        if narrow && tr.classification.is_some() {
            return Ok(tr);
        }
        if bits >= cfg.max_precision_bits {
            return if narrow { Ok(tr) } else { Err(TracerError::PrecisionExhausted) };
        }
        bits = (bits * 2).min(cfg.max_precision_bits);
    }
}

pub fn classify_case(trace: &SiegelTrace) -> Result<&Classification, TracerError> {
    trace
        .classification
        .as_ref()
        .ok_or(TracerError::AmbiguousOrdering)
}

/// One inequality evaluated on a solution. Unknown constants are replaced
/// by the value that makes the inequality tight.
#[derive(Clone, Debug)]
pub struct LedgerRow {
    pub id: &'static str,
    /// Whether the branch of the argument containing this row is taken.
    pub applies: bool,
    pub lhs: Interval,
    pub rhs: &'static str,
    /// Right-hand side when it involves no unknown constant.
    pub rhs_value: Option<Interval>,
    pub holds: Option<bool>,
    pub kappa: Option<(&'static str, Interval)>,
    pub note: Option<String>,
}

impl LedgerRow {
    fn new(id: &'static str, applies: bool, lhs: Interval, rhs: &'static str) -> Self {
        LedgerRow {
            id,
            applies,
            lhs,
            rhs,
            rhs_value: None,
            holds: None,
            kappa: None,
            note: None,
        }
    }

    /// `lhs ≤ value`.
    fn bounded_by(mut self, value: Interval) -> Self {
        self.holds = Some(self.lhs.certainly_le(&value));
        self.rhs_value = Some(value);
        self
    }

    fn kappa(mut self, name: &'static str, value: Interval) -> Self {
        self.kappa = Some((name, value));
        self
    }

    fn note(mut self, s: impl Into<String>) -> Self {
        self.note = Some(s.into());
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "applies": self.applies,
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs,
            "rhs_value": self.rhs_value.as_ref().map(Interval::to_json),
            "holds": self.holds,
            "kappa": self.kappa.as_ref().map(|(name, v)| json!({"name": name, "value": v.to_json()})),
            "note": self.note,
        })
    }
}

/// `log k`, with `k` raised to 2 when smaller.
fn log_k(k: &Integer, prec: u32) -> Interval {
    Interval::from_integer(prec, &k.clone().max(Integer::from(2))).ln()
}

/// `log max{house(ξ1), 1/|ξ1|, 1/|ξ1′|} / log k`.
fn kappa9(emb: &Embedded, logk: &Interval) -> (Interval, Interval) {
    let a = emb.xi.abs();
    let b = emb.xi_c.abs();
    let m = a.max(&b).max(&a.recip()).max(&b.recip());
    let k9 = m.ln().div(logk);
    (m, k9)
}

pub fn inequality_ledger(fam: &FormFamily, sol: &SolutionDecomposition, trace: &SiegelTrace) -> Vec<LedgerRow> {
    let emb = &trace.embedded;
    let prec = emb.bits;
    let n = sol.n;
    let ell = sol.dec.ell;
    let abs_l = ell.abs();
    let ni = Interval::from_i64(prec, n);
    let li = Interval::from_i64(prec, ell);
    let ali = Interval::from_i64(prec, abs_l);
    let third = |x: &Interval| x.div(&Interval::from_i64(prec, 3));
    let logk = log_k(&sol.k, prec);
    let (m3, k9) = kappa9(emb, &logk);
    let kk9 = (&k9 * &logk).exp();
    let ax = Interval::from_integer(prec, &Integer::from(sol.x.abs_ref()));
    let ay = Interval::from_integer(prec, &Integer::from(sol.y.abs_ref()));
    let abs_alpha = emb.alpha.abs();
    let abs_alpha_c = emb.alpha_c.abs();
    let abs_xi = emb.xi.abs();
    let abs_xi_c = emb.xi_c.abs();
    let four = Interval::from_i64(prec, 4);
    let mut rows = Vec::new();

    rows.push(LedgerRow::new("3", true, m3, "k^kappa9").kappa("kappa9", k9.clone()));

    let big_b = &emb.eps.powi(n) * &abs_alpha;
    let small_b = trace.embedded.beta_conjugates[1].abs();
    let main_branch = small_b.mul_i64(2).certainly_le(&big_b);
    let mut r8 = LedgerRow::new("8", true, big_b.clone(), "2|eps'^n alpha'|").note(
        "complex side taken in modulus: |eps'^n alpha'|",
    );
    r8.rhs_value = Some(small_b.mul_i64(2));
    r8.holds = Some(main_branch);
    rows.push(r8);
    if !main_branch {
        let lhs = emb.eps_half_pow(3 * n);
        let rhs = (&abs_alpha_c * &Interval::from_i64(prec, 2)).div(&abs_alpha);
        let mut r = LedgerRow::new("8-alt", true, lhs, "2|alpha'|/|alpha|")
            .note("(8) fails: eps^(3n/2) < 2|alpha'|/|alpha| and the argument continues from (18)");
        r.holds = Some(r.lhs.certainly_lt(&rhs));
        r.rhs_value = Some(rhs);
        rows.push(r);
    }

    let a_big = (&emb.eps.powi(ell) * &abs_xi).max(&(&emb.eps_c.powi(ell) * &emb.xi_c).abs());
    rows.push(
        LedgerRow::new("y", main_branch, ay.clone(), "4|A|/|B|").bounded_by((&four * &a_big).div(&big_b)),
    );

    // Main term eps^{-n/2}|alpha' y| of the bounds on |x|.
    let x_main = &(&emb.eps_half_pow(-n) * &abs_alpha_c) * &ay;
    let x_excess = &ax - &x_main;
    if ell <= 0 {
        let main = emb.eps_half_pow(abs_l - 2 * n);
        let rhs9 = &(&four * &abs_xi_c.div(&abs_alpha)) * &main;
        rows.push(
            LedgerRow::new("9", main_branch, ay.clone(), "4|xi1'/alpha| eps^(|l|/2 - n)")
                .bounded_by(rhs9)
                .kappa("kappa12", ay.div(&(&main * &kk9))),
        );
        rows.push(
            LedgerRow::new("10", true, ni.clone(), "|l|/2 + kappa14 log k")
                .kappa("kappa14", (&ni - &ali.div(&Interval::from_i64(prec, 2))).div(&logk)),
        );
        rows.push(
            LedgerRow::new("11", true, ax.clone(), "eps^(-n/2)|alpha' y| + kappa15 k^kappa9 eps^(|l|/2)")
                .kappa("kappa15", x_excess.div(&(&kk9 * &emb.eps_half_pow(abs_l)))),
        );
    } else {
        let main = emb.eps.powi(ell - n);
        let rhs12 = &(&four * &abs_xi.div(&abs_alpha)) * &main;
        rows.push(
            LedgerRow::new("12", main_branch, ay.clone(), "4|xi1/alpha| eps^(l - n)")
                .bounded_by(rhs12)
                .kappa("kappa17", ay.div(&(&main * &kk9))),
        );
        rows.push(
            LedgerRow::new("13", true, ni.clone(), "l + kappa19 log k")
                .kappa("kappa19", (&ni - &li).div(&logk)),
        );
        rows.push(
            LedgerRow::new("14", true, ax.clone(), "eps^(-n/2)|alpha' y| + kappa20 k^kappa9 eps^(-l/2)")
                .kappa("kappa20", x_excess.div(&(&kk9 * &emb.eps_half_pow(-ell)))),
        );
        let tail = (&emb.eps_c.powi(ell) * &emb.xi_c).abs();
        let small_tail = tail.certainly_lt(&Interval::point(prec, 0.5));
        let lhs16 = ni.mul_i64(3).div(&Interval::from_i64(prec, 2));
        let mut r16 = LedgerRow::new("16", small_tail, lhs16.clone(), "l + kappa24 log k")
            .kappa("kappa24", (&lhs16 - &li).div(&logk));
        if small_tail {
            let chain = &(&Interval::from_i64(prec, 8) * &(&abs_xi * &abs_alpha_c).div(&abs_alpha))
                * &emb.eps_half_pow(2 * ell - 3 * n);
            r16.holds = Some(Interval::one(prec).certainly_le(&chain));
            r16.rhs_value = Some(chain);
            r16 = r16.note("|eps'^l xi1'| < 1/2; rhs_value is 8|xi1 alpha'/alpha| eps^(l - 3n/2), which must be >= 1");
        } else {
            r16 = r16.note("|eps'^l xi1'| >= 1/2, so |l| <= kappa21 log k directly");
        }
        rows.push(r16);
    }

    rows.push(LedgerRow::new("15", true, ali.clone(), "kappa21 log k").kappa("kappa21", ali.div(&logk)));
    rows.push(
        LedgerRow::new("17a", true, ni.clone(), "(2/3)|l| + kappa25 log k")
            .kappa("kappa25", (&ni - &third(&ali.mul_i64(2))).div(&logk)),
    );
    let l_minus_n = Interval::from_i64(prec, (ell - n).abs());
    rows.push(
        LedgerRow::new("17b", true, l_minus_n.clone(), ">= |l|/3 - kappa24 log k")
            .kappa("kappa24", (&third(&ali) - &l_minus_n).div(&logk)),
    );
    let log_l = Interval::from_i64(prec, abs_l.max(1)).ln();
    rows.push(
        LedgerRow::new("18", true, ni.clone(), "kappa44 (log k + log |l|)")
            .kappa("kappa44", ni.div(&(&logk + &log_l))),
    );
    if n < 0 {
        let mut note = "n < 0: the argument assumes n >= 0 after swapping x and y".to_string();
        if swap_identity_check(fam, -n).holds {
            note.push_str(&format!(
                "; here F_{n}(x, y) = -F_{m}(y, x), so (n, x, y) corresponds to ({m}, {y}, {x})",
                m = -n - 2,
                x = sol.x,
                y = sol.y
            ));
        }
        rows.push(LedgerRow::new("swap", true, ni, "n >= 0").note(note));
    }
    rows
}

#[derive(Clone, Debug)]
pub struct BakerCheck {
    pub degree: u32,
    pub log_a: [f64; 3],
    pub b: f64,
    /// Logarithm of the lower bound for `|Λ|`.
    pub log_bound: f64,
    pub log_abs_lambda: Interval,
    /// Lower bound is below the observed `|Λ|`.
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct LambdaData {
    pub rho_n: ComplexInterval,
    pub mu_n: ComplexInterval,
    pub lambda1: ComplexInterval,
    pub lambda2: ComplexInterval,
    pub big_lambda: ComplexInterval,
    pub h: Integer,
    /// `ε̄′/ε′ = e^{2iπν}`, `ν ∈ [0, 1)`.
    pub nu: Interval,
    /// `μ̄_n/μ_n = e^{2iπθ_n}`, `θ_n ∈ [0, 1)`.
    pub theta_n: Interval,
    pub h_bound_holds: bool,
    /// `Λ − ℓλ1 − λ2 − 2iπh` contains 0.
    pub identity_holds: bool,
    /// `ρ_nε^ℓ + μ_nε′^ℓ − μ̄_nε̄′^ℓ` contains 0.
    pub relation_holds: bool,
    /// `|e^Λ − 1|`.
    pub z_minus_one: Interval,
    pub kappa49: Interval,
    /// Present when `|e^Λ − 1| < 1/2`.
    pub log_near_one_check: Option<LogExpCheck>,
    pub height_mu: Interval,
    /// `h(μ_n) / (|n| + log k)`.
    pub kappa46: Interval,
    pub baker: Option<BakerCheck>,
    /// `ℓ < 0`, the branch the argument needs.
    pub negative_ell: bool,
}

impl LambdaData {
    pub fn to_json(&self) -> Value {
        json!({
            "rho_n": self.rho_n.to_json(),
            "mu_n": self.mu_n.to_json(),
            "lambda1": self.lambda1.to_json(),
            "lambda2": self.lambda2.to_json(),
            "Lambda": self.big_lambda.to_json(),
            "h": self.h.to_string(),
            "nu": self.nu.to_json(),
            "theta_n": self.theta_n.to_json(),
            "h_bound_holds": self.h_bound_holds,
            "identity_holds": self.identity_holds,
            "relation_holds": self.relation_holds,
            "z_minus_one": self.z_minus_one.to_json(),
            "kappa49": self.kappa49.to_json(),
            "log_near_one": self.log_near_one_check.as_ref().map(|c| json!({
                "lhs": c.lhs.to_json(), "rhs": c.rhs.to_json(), "holds": c.holds
            })),
            "height_mu": self.height_mu.to_json(),
            "kappa46": self.kappa46.to_json(),
            "baker": self.baker.as_ref().map(|b| json!({
                "degree": b.degree,
                "log_a": b.log_a.map(|v| format!("{v:e}")),
                "B": format!("{:e}", b.b),
                "log_bound": format!("{:e}", b.log_bound),
                "log_abs_Lambda": b.log_abs_lambda.to_json(),
                "holds": b.holds,
            })),
            "negative_ell": self.negative_ell,
        })
    }
}

/// `h(μ_n)` from its six conjugates `σ_b(ξ1)(σ_c(β) − σ_a(β))` over the
/// permutations `(a, b, c)` of the three embeddings.
fn height_of_mu(emb: &Embedded) -> Interval {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let conj: Vec<ComplexInterval> = PERMS
        .iter()
        .map(|&[a, b, c]| {
            &emb.xi_conjugates[b] * &(&emb.beta_conjugates[c] - &emb.beta_conjugates[a])
        })
        .collect();
    height_from_conjugates(&conj)
}

/// `h(ε̄′/ε′)` from the six ratios of distinct conjugates of the unit.
fn height_of_unit_ratio(emb: &Embedded) -> Interval {
    let c = [
        ComplexInterval::real(emb.eps.clone()),
        emb.eps_c.clone(),
        emb.eps_c.conj(),
    ];
    let mut v = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                v.push(c[i].div(&c[j]));
            }
        }
    }
    height_from_conjugates(&v)
}

/// Logarithm data of the third case. Computed for any `ℓ`; only `ℓ < 0`
/// is the branch the argument relies on.
pub fn lambda_machinery(
    sol: &SolutionDecomposition,
    trace: &SiegelTrace,
    baker: &BakerConfig,
) -> Result<LambdaData, TracerError> {
    match &trace.classification {
        Some(c) if c.case == TermCase::T2T3 => {}
        Some(_) => return Err(TracerError::NotThirdCase),
        None => return Err(TracerError::AmbiguousOrdering),
    }
    lambda_from(sol, &trace.embedded, baker)
}

fn lambda_from(
    sol: &SolutionDecomposition,
    emb: &Embedded,
    baker: &BakerConfig,
) -> Result<LambdaData, TracerError> {
    let prec = emb.bits;
    let n = sol.n;
    let ell = sol.dec.ell;
    let b = &emb.beta_conjugates[1];
    let big = &emb.beta_conjugates[0];
    let rho = (b - &b.conj()).scale(&emb.xi);
    let mu = &emb.xi_c * &(&b.conj() - big);
    let eps_cl = emb.eps_c.powi(ell);
    let w = emb.eps_c.conj().div(&emb.eps_c);
    let zmu = mu.conj().div(&mu);
    let mul = &mu * &eps_cl;
    let z = mul.conj().div(&mul);
    let lambda1 = w.ln().ok_or(TracerError::PrecisionExhausted)?;
    let lambda2 = zmu.ln().ok_or(TracerError::PrecisionExhausted)?;
    let big_lambda = z.ln().ok_or(TracerError::PrecisionExhausted)?;
    let two_pi = Interval::two_pi(prec);
    let h_real = (&(&big_lambda.im - &lambda1.im.mul_i64(ell)) - &lambda2.im).div(&two_pi);
    let h = h_real.unique_integer().ok_or(TracerError::PrecisionExhausted)?;
    let two_pi_h = ComplexInterval::imag(&two_pi * &Interval::from_integer(prec, &h));
    let residual = &(&(&big_lambda - &lambda1.scale(&Interval::from_i64(prec, ell))) - &lambda2) - &two_pi_h;
    let identity_holds = residual.contains_zero();
    let h_bound_holds = Integer::from(h.abs_ref()) <= ell.unsigned_abs() + 2;
    let angle01 = |c: &ComplexInterval| -> Result<Interval, TracerError> {
        Ok(c.arg_positive().ok_or(TracerError::PrecisionExhausted)?.div(&two_pi))
    };
    let nu = angle01(&w)?;
    let theta_n = angle01(&zmu)?;

    let rel = &(&rho.scale(&emb.eps.powi(ell)) + &mul) - &mul.conj();
    let relation_holds = rel.contains_zero();
    let z_minus_one = (&z - &ComplexInterval::one(prec)).abs();
    let logk = log_k(&sol.k, prec);
    let (_, k9) = kappa9(emb, &logk);
    let kk9 = (&k9 * &logk).exp();
    let kappa49 = (&z_minus_one * &emb.eps_half_pow(n + 3 * ell.abs())).div(&kk9);
    let log_near_one_check = log_near_one_check(&z).ok();
    let height_mu = height_of_mu(emb);
    let kappa46 = height_mu.div(&(&Interval::from_i64(prec, n.abs()) + &logk));

    let abs_lambda = big_lambda.abs();
    let baker = (!abs_lambda.contains_zero()).then(|| {
        let d = 6u32;
        let df = d as f64;
        let floor = 1.0 / df;
        let la0 = (2.0 * std::f64::consts::PI / df).max(floor);
        let la1 = height_of_unit_ratio(emb)
            .hi()
            .to_f64()
            .max(lambda1.abs().hi().to_f64() / df)
            .max(floor);
        // h(μ̄/μ) ≤ 2h(μ).
        let la2 = (2.0 * height_mu.hi().to_f64())
            .max(lambda2.abs().hi().to_f64() / df)
            .max(floor);
        let hb = h.to_f64().abs();
        let lb = ell.unsigned_abs() as f64;
        let bb = std::f64::consts::E
            .max(df)
            .max(1.0 / (df * la0) + hb / (df * la2))
            .max(1.0 / (df * la1) + lb / (df * la2));
        prop1_log_bound(baker, d, [la0, la1, la2], bb).ok().map(|log_bound| {
            let log_abs_lambda = abs_lambda.ln();
            BakerCheck {
                degree: d,
                log_a: [la0, la1, la2],
                b: bb,
                log_bound,
                holds: Interval::point(prec, log_bound).certainly_le(&log_abs_lambda),
                log_abs_lambda,
            }
        })
    });

    Ok(LambdaData {
        rho_n: rho,
        mu_n: mu,
        lambda1,
        lambda2,
        big_lambda,
        h,
        nu,
        theta_n,
        h_bound_holds,
        identity_holds,
        relation_holds,
        z_minus_one,
        kappa49,
        log_near_one_check,
        height_mu,
        kappa46,
        baker: baker.flatten(),
        negative_ell: ell < 0,
    })
}

/// Everything computed for one solution.
#[derive(Clone, Debug)]
pub struct TraceCertificate {
    pub solution: SolutionDecomposition,
    pub trace: SiegelTrace,
    pub ledger: Vec<LedgerRow>,
    pub lambda: Option<LambdaData>,
}

impl TraceCertificate {
    pub fn case(&self) -> Option<TermCase> {
        self.trace.classification.as_ref().map(|c| c.case)
    }

    pub fn to_json(&self) -> Value {
        let s = &self.solution;
        let t = &self.trace;
        let cls = t.classification.as_ref();
        json!({
            "n": s.n,
            "x": s.x.to_string(),
            "y": s.y.to_string(),
            "k": s.k.to_string(),
            "value": s.value.to_string(),
            "ell": s.dec.ell,
            "xi1": s.dec.xi.to_strings(),
            "case": cls.map(|c| c.case.name()),
            "domination_holds": cls.map(|c| c.domination_holds),
            "ratio": cls.map(|c| c.ratio.to_json()),
            "precision_bits": t.embedded.bits,
            "terms": t.terms.iter().map(ComplexInterval::to_json).collect::<Vec<_>>(),
            "sine_terms": t.sine_terms.iter().map(ComplexInterval::to_json).collect::<Vec<_>>(),
            "sines": t.sines.iter().map(Interval::to_json).collect::<Vec<_>>(),
            "theta": t.theta.to_json(),
            "delta": t.delta.to_json(),
            "v": t.v.to_json(),
            "sum": t.sum.to_json(),
            "sum_contains_zero": t.sum_contains_zero(),
            "forms_agree": t.forms_agree,
            "degenerate_sine": t.degenerate_sine,
            "ledger": self.ledger.iter().map(LedgerRow::to_json).collect::<Vec<_>>(),
            "lambda": self.lambda.as_ref().map(LambdaData::to_json),
        })
    }
}

/// Full pipeline for a solution `(n, x, y)` of `0 < |F_n(x, y)| ≤ k`.
pub fn trace_solution(
    fam: &FormFamily,
    n: i64,
    x: &Integer,
    y: &Integer,
    k: Option<&Integer>,
    cfg: &Config,
) -> Result<TraceCertificate, TracerError> {
    let sol = decompose_solution(fam, n, x, y, k)?;
    let trace = siegel_terms(fam, n, &sol.dec, cfg)?;
    let case = classify_case(&trace)?.case;
    let ledger = inequality_ledger(fam, &sol, &trace);
    let lambda = match case {
        TermCase::T2T3 => Some(lambda_machinery(&sol, &trace, &cfg.baker)?),
        _ => None,
    };
    Ok(TraceCertificate {
        solution: sol,
        trace,
        ledger,
        lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::example_family;

    fn mags(v: [f64; 3]) -> [Interval; 3] {
        v.map(|x| Interval::point(128, x).abs())
    }

    #[test]
    fn constructed_triples() {
        let c = classify_magnitudes(&mags([2.0, -1.5, -0.5])).unwrap();
        assert_eq!(c.case, TermCase::T1T2);
        assert!(c.domination_holds);
        let c = classify_magnitudes(&mags([3.0, -1.0, -2.0])).unwrap();
        assert_eq!(c.case, TermCase::T1T3);
        assert_eq!(c.order, [0, 2, 1]);
        assert!(c.domination_holds);
        assert!(classify_magnitudes(&mags([2.0, 1.0, 1.0])).is_none());
    }

    #[test]
    fn trace_of_small_solution() {
        let fam = example_family(1).unwrap();
        let cfg = Config::default();
        let cert = trace_solution(&fam, 0, &Integer::from(1), &Integer::from(-1), Some(&Integer::from(2)), &cfg)
            .unwrap();
        let t = &cert.trace;
        assert!(t.sum_contains_zero());
        assert!(t.purely_imaginary(1e-20));
        assert!(t.forms_agree);
        for (a, b) in t.terms.iter().zip(&t.sine_terms) {
            assert!((&a.im - &b.im).abs().hi().to_f64() < 1e-20);
        }
        assert!(cert.trace.classification.as_ref().unwrap().domination_holds);
        assert!(cert.ledger.iter().any(|r| r.id == "8"));
        let j = cert.to_json();
        assert_eq!(j["x"], "1");
        assert!(j["case"].is_string());
    }

    #[test]
    fn negative_n_notes_swap() {
        let fam = example_family(1).unwrap();
        let cfg = Config::default();
        // F_{-2}(x, y) = -F_0(y, x), and F_0(1, -1) = 2.
        let cert = trace_solution(&fam, -2, &Integer::from(-1), &Integer::from(1), None, &cfg).unwrap();
        let row = cert.ledger.iter().find(|r| r.id == "swap").unwrap();
        assert!(row.note.as_ref().unwrap().contains("(0, 1, -1)"));
    }

    #[test]
    fn trivial_lambda() {
        // ℓ = 0 and μ_n real positive give Λ = λ2 = 0.
        let prec = 128;
        let mu = ComplexInterval::real(Interval::point(prec, 3.0));
        let z = mu.conj().div(&mu);
        let l = z.ln().unwrap();
        assert!(l.contains_zero());
        let hr = (&l.im - &l.im).div(&Interval::two_pi(prec));
        assert_eq!(hr.unique_integer(), Some(Integer::new()));
    }

    #[test]
    fn third_case_h_bound() {
        let cfg = Config::default();
        let mut seen = 0;
        for d in [1, 2] {
            let fam = example_family(d).unwrap();
            for n in 0..=4 {
                for (x, y) in [(1, -1), (1, 1), (2, -1), (1, 2), (-1, 2), (3, 1)] {
                    let Ok(c) = trace_solution(&fam, n, &Integer::from(x), &Integer::from(y), None, &cfg) else {
                        continue;
                    };
                    assert!(c.trace.sum_contains_zero());
                    if let Some(l) = &c.lambda {
                        seen += 1;
                        assert!(l.h_bound_holds && l.identity_holds && l.relation_holds);
                        if let Some(b) = &l.log_near_one_check {
                            assert!(b.holds);
                        }
                    }
                }
            }
        }
        assert!(seen > 0);
    }
}
