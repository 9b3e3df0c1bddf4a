//! Dense univariate polynomials with exact coefficients, stored leading
//! coefficient first, and certified complex root inclusion.

use rug::{Float, Integer, Rational};

use crate::interval::{ComplexInterval, Interval};

/// Evaluate an integer polynomial (leading coefficient first) at a rational.
pub fn eval_rational(coeffs: &[Integer], x: &Rational) -> Rational {
    let mut acc = Rational::new();
    for c in coeffs {
        acc *= x;
        acc += c;
    }
    acc
}

pub fn eval_integer(coeffs: &[Integer], x: &Integer) -> Integer {
    let mut acc = Integer::new();
    for c in coeffs {
        acc *= x;
        acc += c;
    }
    acc
}

pub fn eval_interval(coeffs: &[Integer], x: &Interval) -> Interval {
    let prec = x.prec();
    let mut acc = Interval::zero(prec);
    for c in coeffs {
        acc = &(&acc * x) + &Interval::from_integer(prec, c);
    }
    acc
}

pub fn eval_complex(coeffs: &[Integer], z: &ComplexInterval) -> ComplexInterval {
    let prec = z.prec();
    let mut acc = ComplexInterval::zero(prec);
    for c in coeffs {
        acc = &(&acc * z) + &ComplexInterval::real(Interval::from_integer(prec, c));
    }
    acc
}

fn trim_rational(mut p: Vec<Rational>) -> Vec<Rational> {
    let lead = p.iter().position(|c| *c != 0).unwrap_or(p.len());
    p.drain(..lead);
    p
}

pub fn to_rational(coeffs: &[Integer]) -> Vec<Rational> {
    trim_rational(coeffs.iter().map(Rational::from).collect())
}

pub fn derivative(p: &[Rational]) -> Vec<Rational> {
    let n = p.len();
    if n <= 1 {
        return Vec::new();
    }
    p[..n - 1]
        .iter()
        .enumerate()
        .map(|(i, c)| Rational::from(c * Integer::from(n - 1 - i)))
        .collect()
}

/// Quotient and remainder over Q; `d` must be nonzero.
pub fn div_rem(n: &[Rational], d: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let d = trim_rational(d.to_vec());
    assert!(!d.is_empty(), "division by the zero polynomial");
    let mut r = trim_rational(n.to_vec());
    if r.len() < d.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![Rational::new(); r.len() - d.len() + 1];
    for i in 0..q.len() {
        let c = Rational::from(&r[i] / &d[0]);
        if c != 0 {
            for (j, dj) in d.iter().enumerate() {
                r[i + j] -= Rational::from(&c * dj);
            }
        }
        q[i] = c;
    }
    let rem = trim_rational(r[q.len()..].to_vec());
    (q, rem)
}

fn monic(p: Vec<Rational>) -> Vec<Rational> {
    let p = trim_rational(p);
    match p.first() {
        None => p,
        Some(lead) => {
            let lead = lead.clone();
            p.into_iter().map(|c| c / &lead).collect()
        }
    }
}

pub fn gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut a = trim_rational(a.to_vec());
    let mut b = trim_rational(b.to_vec());
    while !b.is_empty() {
        let (_, r) = div_rem(&a, &b);
        a = b;
        b = r;
    }
    monic(a)
}

/// Yun's square-free decomposition: `p = lc · ∏ f_i^i` with monic,
/// square-free, pairwise coprime `f_i`. Returns `(lc, [(f_i, i)])`.
pub fn squarefree_decomposition(p: &[Rational]) -> (Rational, Vec<(Vec<Rational>, u32)>) {
    let p = trim_rational(p.to_vec());
    assert!(!p.is_empty(), "zero polynomial has no decomposition");
    let lc = p[0].clone();
    let f = monic(p);
    if f.len() == 1 {
        return (lc, Vec::new());
    }
    let mut out = Vec::new();
    let fp = derivative(&f);
    let a = gcd(&f, &fp);
    let mut b = div_rem(&f, &a).0;
    let mut c = div_rem(&fp, &a).0;
    let mut d = sub(&c, &derivative(&b));
    let mut i = 1;
    loop {
        let g = gcd(&b, &d);
        if g.len() > 1 {
            out.push((g.clone(), i));
        }
        b = div_rem(&b, &g).0;
        if b.len() <= 1 {
            break;
        }
        c = div_rem(&d, &g).0;
        d = sub(&c, &derivative(&b));
        i += 1;
    }
    (lc, out)
}

fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    let mut out = vec![Rational::new(); n];
    for (i, c) in a.iter().enumerate() {
        out[n - a.len() + i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[n - b.len() + i] -= c;
    }
    trim_rational(out)
}

/// Scale a rational polynomial to a primitive integer one with positive lead.
pub fn primitive_part(p: &[Rational]) -> Vec<Integer> {
    let p = trim_rational(p.to_vec());
    let mut den = Integer::from(1);
    for c in &p {
        den.lcm_mut(c.denom());
    }
    let mut ints: Vec<Integer> = p
        .iter()
        .map(|c| Rational::from(c * &den).into_numer_denom().0)
        .collect();
    let mut g = Integer::new();
    for c in &ints {
        g.gcd_mut(c);
    }
    if g != 0 {
        for c in ints.iter_mut() {
            *c /= &g;
        }
    }
    if ints.first().is_some_and(|c| *c < 0) {
        for c in ints.iter_mut() {
            *c = -c.clone();
        }
    }
    ints
}

#[derive(Clone, Debug)]
struct Cpx {
    re: Float,
    im: Float,
}

impl Cpx {
    fn new(prec: u32, re: f64, im: f64) -> Self {
        Cpx {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }
    fn add(&self, o: &Cpx) -> Cpx {
        let p = self.re.prec();
        Cpx {
            re: Float::with_val(p, &self.re + &o.re),
            im: Float::with_val(p, &self.im + &o.im),
        }
    }
    fn sub(&self, o: &Cpx) -> Cpx {
        let p = self.re.prec();
        Cpx {
            re: Float::with_val(p, &self.re - &o.re),
            im: Float::with_val(p, &self.im - &o.im),
        }
    }
    fn mul(&self, o: &Cpx) -> Cpx {
        let p = self.re.prec();
        let rr = Float::with_val(p, &self.re * &o.re);
        let ii = Float::with_val(p, &self.im * &o.im);
        let ri = Float::with_val(p, &self.re * &o.im);
        let ir = Float::with_val(p, &self.im * &o.re);
        Cpx {
            re: rr - ii,
            im: ri + ir,
        }
    }
    fn norm_sqr(&self) -> Float {
        let p = self.re.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }
    fn recip(&self) -> Cpx {
        let d = self.norm_sqr();
        let p = self.re.prec();
        Cpx {
            re: Float::with_val(p, &self.re / &d),
            im: -Float::with_val(p, &self.im / &d),
        }
    }
    fn to_box(&self) -> ComplexInterval {
        let p = self.re.prec();
        ComplexInterval::new(
            Interval::new(self.re.clone(), self.re.clone()).with_prec(p),
            Interval::new(self.im.clone(), self.im.clone()).with_prec(p),
        )
    }
}

fn horner_with_derivative(coeffs: &[Cpx], z: &Cpx) -> (Cpx, Cpx) {
    let prec = z.re.prec();
    let mut p = Cpx::new(prec, 0.0, 0.0);
    let mut dp = Cpx::new(prec, 0.0, 0.0);
    for c in coeffs {
        dp = dp.mul(z).add(&p);
        p = p.mul(z).add(c);
    }
    (p, dp)
}

/// Inclusion disk for a group of roots: the union of `disks` contains
/// exactly `count` roots counted with multiplicity.
#[derive(Clone, Debug)]
pub struct RootCluster {
    pub disks: Vec<(ComplexInterval, Interval)>,
    pub count: usize,
}

impl RootCluster {
    /// Enclosure of the modulus of every root in the cluster.
    pub fn modulus(&self) -> Interval {
        let mut out: Option<Interval> = None;
        for (c, r) in &self.disks {
            let m = c.abs();
            let lo = &m - r;
            let hi = &m + r;
            let zero = Interval::zero(m.prec());
            let piece = lo.max(&zero).hull(&hi.max(&zero));
            out = Some(match out {
                Some(o) => o.hull(&piece),
                None => piece,
            });
        }
        out.expect("nonempty cluster")
    }
}

/// Certified inclusion disks for the roots of a square-free integer
/// polynomial.
///
/// Aberth iteration gives approximations `z_i`; the disks
/// `D(z_i, n·|W_i|)` with `W_i = p(z_i) / (a_0 ∏_{j≠i} (z_i − z_j))`
/// contain all roots, and every connected component made of `m` disks
/// holds exactly `m` roots. Components are returned as clusters.
pub fn root_clusters(coeffs: &[Integer], prec: u32) -> Option<Vec<RootCluster>> {
    let coeffs: Vec<Integer> = {
        let lead = coeffs.iter().position(|c| *c != 0)?;
        coeffs[lead..].to_vec()
    };
    let n = coeffs.len() - 1;
    if n == 0 {
        return Some(Vec::new());
    }
    let work = prec + 32;
    let a0 = Float::with_val(work, &coeffs[0]);
    let monic: Vec<Cpx> = coeffs
        .iter()
        .map(|c| Cpx {
            re: Float::with_val(work, c) / &a0,
            im: Float::with_val(work, 0),
        })
        .collect();

    // Starting radius from the Fujiwara-style bound max |a_i/a_0|^{1/i}.
    let mut radius = 0.0f64;
    for (i, c) in monic.iter().enumerate().skip(1) {
        let a = c.re.to_f64().abs();
        if a > 0.0 {
            radius = radius.max(a.powf(1.0 / i as f64));
        }
    }
    let radius = radius.max(1e-3);
    let mut z: Vec<Cpx> = (0..n)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Cpx::new(work, radius * ang.cos(), radius * ang.sin())
        })
        .collect();

    let tol = Float::with_val(work, Float::i_exp(1, -(prec as i32)));
    let mut converged = false;
    for _ in 0..(200 + 4 * prec as usize) {
        let mut max_step = Float::with_val(work, 0);
        for i in 0..n {
            let (p, dp) = horner_with_derivative(&monic, &z[i]);
            if p.norm_sqr() == 0 {
                continue;
            }
            let ratio = p.mul(&dp.recip());
            let mut sum = Cpx::new(work, 0.0, 0.0);
            for j in 0..n {
                if j != i {
                    sum = sum.add(&z[i].sub(&z[j]).recip());
                }
            }
            let one = Cpx::new(work, 1.0, 0.0);
            let denom = one.sub(&ratio.mul(&sum));
            let step = ratio.mul(&denom.recip());
            let size = step.norm_sqr();
            if size > max_step {
                max_step = size;
            }
            z[i] = z[i].sub(&step);
        }
        let scale = z
            .iter()
            .map(|w| w.norm_sqr())
            .fold(Float::with_val(work, 1), |a, b| if b > a { b } else { a });
        if max_step <= Float::with_val(work, &tol * &tol) * &scale {
            converged = true;
            break;
        }
        if !max_step.is_finite() {
            return None;
        }
    }
    if !converged {
        return None;
    }

    // Certification in interval arithmetic.
    let boxes: Vec<ComplexInterval> = z.iter().map(|w| w.to_box()).collect();
    let lead = ComplexInterval::real(Interval::from_integer(work, &coeffs[0]));
    let mut radii = Vec::with_capacity(n);
    for i in 0..n {
        let mut den = lead.clone();
        for j in 0..n {
            if j != i {
                den = &den * &(&boxes[i] - &boxes[j]);
            }
        }
        let w = eval_complex(&coeffs, &boxes[i]).div(&den);
        let r = w.abs().mul_i64(n as i64);
        if !r.is_finite() {
            return None;
        }
        radii.push(Interval::new(r.hi().clone(), r.hi().clone()));
    }

    // Union-find over overlapping disks.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let dist = (&boxes[i] - &boxes[j]).abs();
            let reach = &radii[i] + &radii[j];
            if !reach.certainly_lt(&dist) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_of[r] {
            Some(g) => groups[g].push(i),
            None => {
                root_of[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }
    Some(
        groups
            .into_iter()
            .map(|g| RootCluster {
                count: g.len(),
                disks: g
                    .into_iter()
                    .map(|i| (boxes[i].clone(), radii[i].clone()))
                    .collect(),
            })
            .collect(),
    )
}

/// Cauchy bound `1 + max |a_i / a_0|` on the modulus of every root.
pub fn cauchy_bound(coeffs: &[Integer]) -> Rational {
    let lead = Integer::from(coeffs[0].abs_ref());
    let mut m = Integer::new();
    for c in &coeffs[1..] {
        let a = Integer::from(c.abs_ref());
        if a > m {
            m = a;
        }
    }
    Rational::from((m, lead)) + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Integer> {
        v.iter().map(|&c| Integer::from(c)).collect()
    }

    #[test]
    fn squarefree_splits_repeated_factor() {
        // (x − 1)^2 (x + 2) = x^3 − 3x + 2
        let p = to_rational(&ints(&[1, 0, -3, 2]));
        let (lc, parts) = squarefree_decomposition(&p);
        assert_eq!(lc, 1);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].1, 1);
        assert_eq!(primitive_part(&parts[0].0), ints(&[1, 2]));
        assert_eq!(parts[1].1, 2);
        assert_eq!(primitive_part(&parts[1].0), ints(&[1, -1]));
    }

    #[test]
    fn clusters_of_cube_root_of_two() {
        let clusters = root_clusters(&ints(&[1, 0, 0, -2]), 128).unwrap();
        assert_eq!(clusters.len(), 3);
        let cbrt2 = Interval::from_i64(128, 2).cbrt();
        for c in &clusters {
            assert_eq!(c.count, 1);
            let m = c.modulus();
            assert!(m.overlaps(&cbrt2));
            assert!(m.width_f64() < 1e-30);
        }
    }

    #[test]
    fn clusters_of_cyclotomic() {
        // x^4 + x^3 + x^2 + x + 1: four roots on the unit circle.
        let clusters = root_clusters(&ints(&[1, 1, 1, 1, 1]), 96).unwrap();
        let total: usize = clusters.iter().map(|c| c.count).sum();
        assert_eq!(total, 4);
        for c in &clusters {
            assert!(c.modulus().contains_f64(1.0));
        }
    }

    #[test]
    fn cauchy_bound_dominates_roots() {
        let b = cauchy_bound(&ints(&[1, -3, -3, -1]));
        assert_eq!(b, 4);
    }
}
