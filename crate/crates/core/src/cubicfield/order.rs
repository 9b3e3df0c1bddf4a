//! Discriminant of the ring of integers by repeated p-enlargement.
//!
//! Starting from the lattice spanned by `1, t, t²`, for every prime `p`
//! with `p²` dividing the current discriminant we look for an integral
//! `ω = v/p` with `v` in the radical of the trace form mod `p`. Adding
//! such an `ω` divides the discriminant by `p²`. When no candidate
//! exists for any prime the lattice is the full ring of integers.

use rug::ops::{Pow, RemRounding};
use rug::{Complete, Integer, Rational};

use super::{det3, CubicField, FieldElement};

/// Trial division bound when factoring the polynomial discriminant.
const TRIAL_BOUND: u32 = 1_000_000;
/// Largest number of kernel candidates examined for one prime.
const CANDIDATE_BUDGET: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct DiscriminantCertificate {
    /// Field discriminant when `exact`, otherwise a value with the same
    /// sign and no larger absolute value than the true one.
    pub value: Integer,
    pub exact: bool,
    /// Index of `Z[t]` in the final lattice.
    pub index: Integer,
    pub basis: [FieldElement; 3],
    /// Primes whose local analysis was not completed.
    pub unresolved: Vec<Integer>,
}

fn trace_matrix(k: &CubicField, b: &[FieldElement; 3]) -> [[Rational; 3]; 3] {
    let mut m: [[Rational; 3]; 3] = Default::default();
    for i in 0..3 {
        for j in i..3 {
            let t = k.trace(&k.mul(&b[i], &b[j]));
            m[i][j] = t.clone();
            m[j][i] = t;
        }
    }
    m
}

fn lattice_disc(k: &CubicField, b: &[FieldElement; 3]) -> Integer {
    let d = det3(&trace_matrix(k, b));
    debug_assert_eq!(*d.denom(), 1);
    d.numer().clone()
}

/// Basis of the kernel of an integer matrix reduced mod `p`.
fn kernel_mod_p(m: &[[Integer; 3]; 3], p: &Integer) -> Vec<[Integer; 3]> {
    let mut a: Vec<Vec<Integer>> = m
        .iter()
        .map(|row| row.iter().map(|x| x.clone().rem_euc(p)).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..3 {
        let Some(r) = (row..3).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(row, r);
        let inv = a[row][col].clone().invert(p).expect("p is prime");
        for x in a[row].iter_mut() {
            *x = (&*x * &inv).complete().rem_euc(p);
        }
        for r2 in 0..3 {
            if r2 != row && a[r2][col] != 0 {
                let f = a[r2][col].clone();
                for c in 0..3 {
                    let v = Integer::from(&a[r2][c] - (&f * &a[row][c]).complete());
                    a[r2][c] = v.rem_euc(p);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..3).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v: [Integer; 3] = Default::default();
            v[f] = Integer::from(1);
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = (-a[r][f].clone()).rem_euc(p);
            }
            v
        })
        .collect()
}

/// Row basis of the integer lattice spanned by `rows` (three columns).
fn hnf3(mut rows: Vec<[Integer; 3]>) -> [[Integer; 3]; 3] {
    let mut out: Vec<[Integer; 3]> = Vec::new();
    for col in 0..3 {
        loop {
            let nonzero: Vec<usize> = (0..rows.len()).filter(|&r| rows[r][col] != 0).collect();
            if nonzero.len() <= 1 {
                break;
            }
            let piv = *nonzero
                .iter()
                .min_by(|&&a, &&b| rows[a][col].cmp_abs(&rows[b][col]))
                .unwrap();
            let pr = rows[piv].clone();
            for &r in &nonzero {
                if r == piv {
                    continue;
                }
                let q = (&rows[r][col] / &pr[col]).complete();
                for c in 0..3 {
                    rows[r][c] -= (&q * &pr[c]).complete();
                }
            }
        }
        if let Some(r) = (0..rows.len()).find(|&r| rows[r][col] != 0) {
            out.push(rows.swap_remove(r));
        }
    }
    assert_eq!(out.len(), 3, "lattice must have full rank");
    [out[0].clone(), out[1].clone(), out[2].clone()]
}

fn combine(b: &[FieldElement; 3], c: &[Integer; 3], den: &Integer) -> FieldElement {
    let mut acc = FieldElement::zero();
    for (bi, ci) in b.iter().zip(c) {
        acc = &acc + &bi.scale(&Rational::from((ci.clone(), den.clone())));
    }
    acc
}

/// Try to enlarge the lattice at `p`; returns `None` when it is
/// `p`-maximal, `Err(())` when the candidate set is too large.
fn enlarge_at(
    k: &CubicField,
    b: &[FieldElement; 3],
    p: &Integer,
) -> Result<Option<[FieldElement; 3]>, ()> {
    let t = trace_matrix(k, b);
    let ti: [[Integer; 3]; 3] = t.map(|row| row.map(|x| x.numer().clone()));
    let ker = kernel_mod_p(&ti, p);
    let d = ker.len() as u32;
    if d == 0 {
        return Ok(None);
    }
    let count = p
        .to_u64()
        .and_then(|pp| pp.checked_pow(d))
        .filter(|&c| c <= CANDIDATE_BUDGET * 4);
    let Some(_) = count else {
        return Err(());
    };
    let pp = p.to_u64().unwrap();
    // Projective enumeration: first nonzero coefficient is 1.
    for lead in 0..d as usize {
        let rest = d as usize - lead - 1;
        let total = pp.pow(rest as u32);
        for idx in 0..total {
            let mut coef = vec![0u64; d as usize];
            coef[lead] = 1;
            let mut r = idx;
            for slot in coef.iter_mut().skip(lead + 1) {
                *slot = r % pp;
                r /= pp;
            }
            let mut v: [Integer; 3] = Default::default();
            for (kv, &c) in ker.iter().zip(&coef) {
                for i in 0..3 {
                    v[i] += (&kv[i] * c).complete();
                }
            }
            for x in v.iter_mut() {
                *x = x.clone().rem_euc(p);
            }
            let omega = combine(b, &v, p);
            if k.is_integral(&omega) {
                let mut rows: Vec<[Integer; 3]> = (0..3)
                    .map(|i| {
                        let mut r: [Integer; 3] = Default::default();
                        r[i] = p.clone();
                        r
                    })
                    .collect();
                rows.push(v);
                let h = hnf3(rows);
                return Ok(Some(h.map(|row| combine(b, &row, p))));
            }
        }
    }
    Ok(None)
}

/// Primes whose square divides `n`, plus an unfactored cofactor (1 if none).
fn square_prime_divisors(n: &Integer) -> (Vec<Integer>, Integer) {
    let mut m = n.clone().abs();
    let mut primes = Vec::new();
    let mut p = 2u32;
    while p <= TRIAL_BOUND && Integer::from(p) * p <= m {
        if m.is_divisible_u(p) {
            let mut e = 0;
            while m.is_divisible_u(p) {
                m /= p;
                e += 1;
            }
            if e >= 2 {
                primes.push(Integer::from(p));
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m == 1 || m.is_probably_prime(30) != rug::integer::IsPrime::No {
        return (primes, Integer::from(1));
    }
    if m.is_perfect_square() {
        let r = m.clone().sqrt();
        if r.is_probably_prime(30) != rug::integer::IsPrime::No {
            primes.push(r);
            return (primes, Integer::from(1));
        }
    }
    if Integer::from(TRIAL_BOUND).pow(2) > m {
        // Every prime factor exceeds the bound, so m is prime.
        return (primes, Integer::from(1));
    }
    (primes, m)
}

/// Discriminant of the ring of integers of `k`.
pub fn maximal_order_discriminant(k: &CubicField) -> DiscriminantCertificate {
    let mut basis = [
        k.one(),
        k.generator(),
        k.mul(&k.generator(), &k.generator()),
    ];
    let poly_disc = lattice_disc(k, &basis);
    let (primes, cofactor) = square_prime_divisors(&poly_disc);
    let mut unresolved = Vec::new();
    for p in &primes {
        loop {
            let d = lattice_disc(k, &basis);
            if !d.is_divisible(&Integer::from(p * p)) {
                break;
            }
            match enlarge_at(k, &basis, p) {
                Ok(Some(nb)) => basis = nb,
                Ok(None) => break,
                Err(()) => {
                    unresolved.push(p.clone());
                    break;
                }
            }
        }
    }
    let disc = lattice_disc(k, &basis);
    let index = (&poly_disc / &disc).complete().sqrt();
    let mut bound = disc.clone();
    for p in &unresolved {
        let mut e = 0u32;
        let mut m = bound.clone();
        while m.is_divisible(p) {
            m /= p;
            e += 1;
        }
        let pe = p.clone().pow(e - e % 2);
        bound /= pe;
    }
    if cofactor != 1 {
        bound /= &cofactor;
        if bound == 0 {
            bound = Integer::from(disc.signum_ref());
        }
    }
    if cofactor != 1 {
        unresolved.push(cofactor);
    }
    DiscriminantCertificate {
        exact: unresolved.is_empty(),
        value: bound,
        index,
        basis,
        unresolved,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_discriminants() {
        let expected = [(1, -108), (2, -243), (3, -588), (4, -114075)];
        for (d, disc) in expected {
            let k = CubicField::from_i64([1, 3 * d, 3 * d * d, -1]).unwrap();
            let c = maximal_order_discriminant(&k);
            assert!(c.exact);
            assert_eq!(c.value, disc, "D = {d}");
        }
    }

    #[test]
    fn pure_cubic_fields() {
        // Q(cbrt 2): -108; Q(cbrt 10): 10 ≡ 1 mod 9, disc -300.
        let k = CubicField::from_i64([1, 0, 0, -2]).unwrap();
        assert_eq!(maximal_order_discriminant(&k).value, -108);
        let k = CubicField::from_i64([1, 0, 0, -10]).unwrap();
        let c = maximal_order_discriminant(&k);
        assert_eq!(c.value, -300);
        assert_eq!(c.index, 3);
        // Q(cbrt 12) = Q(cbrt 18): disc -3^3 * 2^2 * 3^2 / ... = -972.
        let k = CubicField::from_i64([1, 0, 0, -12]).unwrap();
        assert_eq!(maximal_order_discriminant(&k).value, -972);
    }

    #[test]
    fn basis_elements_are_integral() {
        let k = CubicField::from_i64([1, 9, 27, -1]).unwrap();
        let c = maximal_order_discriminant(&k);
        for b in &c.basis {
            assert!(k.is_integral(b));
        }
    }
}
