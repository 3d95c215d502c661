//! Exact single-prime Hecke eigenvalue algebra.
//!
//! Everything here happens in the free module over the basis symbols
//! `A(p^k, p^l)` with exact integer coefficients. The basis symbols are
//! realized numerically as Schur functions of the local Satake roots, which
//! is what ties this module to [`crate::satake`]: the highest weight for
//! `A(p^k, p^l)` is `(k + l, k, 0)`, which reproduces all four Hecke
//! relations (checked in the tests, including `A(1,p) -> e1` and
//! `A(p,1) -> e2`).

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::forms::FormRecord;
use crate::satake::{solve_satake, SatakeError, SatakeTriple};

/// Guard against coefficient blowup: a_{k,l}(n) grows like 3^n.
pub const MAX_POWER: u32 = 40;

#[derive(Debug, Error)]
pub enum HeckeError {
    #[error("power {0} exceeds the supported maximum {MAX_POWER}")]
    PowerTooLarge(u32),
    #[error("no stored coefficients at primes {0:?}")]
    MissingPrimes(Vec<u64>),
    #[error(transparent)]
    Satake(#[from] SatakeError),
}

/// Exact-integer linear combination of basis symbols `A(p^k, p^l)`.
///
/// Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HeckeCombination {
    terms: BTreeMap<(u32, u32), BigInt>,
}

impl HeckeCombination {
    /// The identity `A(1,1)`.
    pub fn one() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((0, 0), BigInt::one());
        Self { terms }
    }

    pub fn single(k: u32, l: u32, coeff: impl Into<BigInt>) -> Self {
        let mut c = Self::default();
        c.add_term(k, l, coeff.into());
        c
    }

    fn add_term(&mut self, k: u32, l: u32, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry((k, l)).or_insert_with(BigInt::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&(k, l));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, k: u32, l: u32) -> BigInt {
        self.terms.get(&(k, l)).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn support(&self) -> BTreeSet<(u32, u32)> {
        self.terms.keys().copied().collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }
}

/// Support set `E_n` of basis elements reachable from `A(1,p)^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportSet {
    pub n: u32,
    pub pairs: BTreeSet<(u32, u32)>,
}

/// Multiplication by `A(1,p)`:
/// `A(p^k, p^l) -> A(p^k, p^{l+1}) + [k>=1] A(p^{k-1}, p^l) + [l>=1] A(p^{k+1}, p^{l-1})`.
pub fn pieri_multiply(c: &HeckeCombination) -> HeckeCombination {
    let mut out = HeckeCombination::default();
    for (&(k, l), coeff) in c.terms() {
        out.add_term(k, l + 1, coeff.clone());
        if k >= 1 {
            out.add_term(k - 1, l, coeff.clone());
        }
        if l >= 1 {
            out.add_term(k + 1, l - 1, coeff.clone());
        }
    }
    out
}

/// Expansion of `A(1,p)^n` in the basis symbols, by n-fold Pieri iteration.
pub fn expand_power(n: u32) -> Result<HeckeCombination, HeckeError> {
    if n > MAX_POWER {
        return Err(HeckeError::PowerTooLarge(n));
    }
    let mut c = HeckeCombination::one();
    for _ in 0..n {
        c = pieri_multiply(&c);
    }
    Ok(c)
}

/// `{(n2-n1, n3-n2) : 0 <= n1 <= n2 <= n3, n1+n2+n3 = n}`.
pub fn support_set(n: u32) -> SupportSet {
    let mut pairs = BTreeSet::new();
    for n1 in 0..=n / 3 {
        for n2 in n1..=(n - n1) / 2 {
            let n3 = n - n1 - n2;
            debug_assert!(n3 >= n2);
            pairs.insert((n2 - n1, n3 - n2));
        }
    }
    SupportSet { n, pairs }
}

/// Dimension of the GL(3) representation with highest weight `(k+l, k, 0)`.
fn weight_dimension(k: u32, l: u32) -> BigInt {
    let (k, l) = (BigInt::from(k), BigInt::from(l));
    ((&k + 1) * (&l + 1) * (&k + &l + 2)) / 2
}

/// Verifies `sum a_{k,l}(n) (k+1)(l+1)(k+l+2)/2 == 3^n` in exact integers.
pub fn dimension_check(n: u32) -> Result<bool, HeckeError> {
    let c = expand_power(n)?;
    let total: BigInt = c
        .terms()
        .map(|(&(k, l), coeff)| coeff * weight_dimension(k, l))
        .sum();
    Ok(total == BigInt::from(3).pow(n))
}

/// Schur bialternant `det[x_i^{lambda_j + 3 - j}] / det[x_i^{3 - j}]` for
/// highest weight `(k+l, k, 0)`, i.e. exponents `(k+l+2, k+1, 0)`.
fn schur_bialternant(x: &[Complex64; 3], k: u32, l: u32) -> Complex64 {
    let exps = [(k + l + 2) as i32, (k + 1) as i32, 0];
    let m: Vec<[Complex64; 3]> = x
        .iter()
        .map(|&xi| [xi.powi(exps[0]), xi.powi(exps[1]), xi.powi(exps[2])])
        .collect();
    let num = det3(&m);
    let den = (x[0] - x[1]) * (x[0] - x[2]) * (x[1] - x[2]);
    num / den
}

fn det3(m: &[[Complex64; 3]]) -> Complex64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn min_pair_separation(x: &[Complex64; 3]) -> f64 {
    (x[0] - x[1])
        .norm()
        .min((x[0] - x[2]).norm())
        .min((x[1] - x[2]).norm())
}

/// Complete homogeneous symmetric polynomials h_0..h_{m_max} of the three
/// roots via the Newton-style recurrence in the elementary symmetrics.
fn complete_homogeneous(x: &[Complex64; 3], m_max: u32) -> Vec<Complex64> {
    let e1 = x[0] + x[1] + x[2];
    let e2 = x[0] * x[1] + x[0] * x[2] + x[1] * x[2];
    let e3 = x[0] * x[1] * x[2];
    let n = m_max as usize + 1;
    let mut h = vec![Complex64::new(0.0, 0.0); n];
    h[0] = Complex64::new(1.0, 0.0);
    for m in 1..n {
        let mut v = e1 * h[m - 1];
        if m >= 2 {
            v -= e2 * h[m - 2];
        }
        if m >= 3 {
            v += e3 * h[m - 3];
        }
        h[m] = v;
    }
    h
}

/// Numeric value of a basis symbol at the given roots. The bialternant is
/// 0/0-unstable near coinciding roots, so those cases switch to the
/// Jacobi-Trudi determinant, which for weight (k+l, k, 0) in three variables
/// collapses to `h_{k+l} h_k - h_{k+l+1} h_{k-1}`.
fn basis_value(x: &[Complex64; 3], k: u32, l: u32) -> Result<Complex64, HeckeError> {
    if min_pair_separation(x) >= 1e-6 {
        return Ok(schur_bialternant(x, k, l));
    }
    let h = complete_homogeneous(x, k + l + 1);
    let a = (k + l) as usize;
    let lower = if k == 0 {
        Complex64::new(0.0, 0.0)
    } else {
        h[a + 1] * h[k as usize - 1]
    };
    Ok(h[a] * h[k as usize] - lower)
}

/// Numeric value of `sum c_{k,l} A(p^k, p^l)` at the given Satake roots.
pub fn evaluate_combination(
    c: &HeckeCombination,
    s: &SatakeTriple,
) -> Result<Complex64, HeckeError> {
    let mut total = Complex64::new(0.0, 0.0);
    for (&(k, l), coeff) in c.terms() {
        let coeff_f = bigint_to_f64(coeff);
        total += basis_value(&s.alpha, k, l)? * coeff_f;
    }
    Ok(total)
}

fn bigint_to_f64(v: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    v.to_f64().expect("coefficient fits in f64 range")
}

fn factorize(mut n: u64) -> BTreeMap<u64, u32> {
    let mut out = BTreeMap::new();
    let mut d = 2;
    while d * d <= n {
        while n % d == 0 {
            *out.entry(d).or_insert(0) += 1;
            n /= d;
        }
        d += 1;
    }
    if n > 1 {
        *out.entry(n).or_insert(0) += 1;
    }
    out
}

/// Reconstructs `A(m, n)` multiplicatively from the stored prime data.
pub fn composite_coefficient(f: &FormRecord, m: u64, n: u64) -> Result<Complex64, HeckeError> {
    assert!(m >= 1 && n >= 1);
    let m_fact = factorize(m);
    let n_fact = factorize(n);
    let primes: BTreeSet<u64> = m_fact.keys().chain(n_fact.keys()).copied().collect();
    let missing: Vec<u64> = primes
        .iter()
        .filter(|p| !f.coefficients.contains_key(p))
        .copied()
        .collect();
    if !missing.is_empty() {
        return Err(HeckeError::MissingPrimes(missing));
    }
    let mut total = Complex64::new(1.0, 0.0);
    for p in primes {
        let k = m_fact.get(&p).copied().unwrap_or(0);
        let l = n_fact.get(&p).copied().unwrap_or(0);
        let (a1p, ap1) = f.coefficients[&p];
        let triple = solve_satake(a1p, ap1, p)?;
        total *= evaluate_combination(&HeckeCombination::single(k, l, 1), &triple)?;
    }
    Ok(total)
}
