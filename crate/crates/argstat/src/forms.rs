//! Domain types for GL(3) Hecke-Maass form data.
//!
//! Parameters come in two coordinate systems: the Langlands triple
//! `(mu1, mu2, mu3)` with `mu1 + mu2 + mu3 = 0`, and the spectral triple
//! `nu` obtained from differences of the `mu_j`. Both are used throughout;
//! the conversions here are exact inverses of each other.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::smoothing::ZeroSet;

/// Kim-Sarnak bound on |Re(mu_j)|.
pub const RE_MU_BOUND: f64 = 5.0 / 14.0;

const ZERO_SUM_TOL: f64 = 1e-12;
const SELF_DUAL_TOL: f64 = 1e-12;
const RE_MU_SLACK: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum FormError {
    #[error("parameter triple does not sum to zero: |sum| = {0:.3e}")]
    NotZeroSum(f64),
    #[error("|Re(mu_{j})| = {value:.6} exceeds 5/14")]
    ReBoundViolated { j: usize, value: f64 },
    #[error("{{-mu_j}} does not match {{conj(mu_j)}}: best matching distance {0:.3e}")]
    NotSelfDual(f64),
    #[error("gamma_scale {stored:.12} disagrees with recomputed {expected:.12}")]
    GammaScaleMismatch { stored: f64, expected: f64 },
    #[error("normalization must be positive, got {0}")]
    NonPositiveNormalization(f64),
    #[error("coefficient pair at p = {p} violates temperedness conjugation: |conj(A(1,p)) - A(p,1)| = {gap:.3e}")]
    CoefficientConjugation { p: u64, gap: f64 },
    #[error("mu0 must be nonzero for the generic-position check")]
    ZeroCenter,
    #[error("bounds must satisfy 0 < c_lo < c_hi, got ({0}, {1})")]
    BadGenericBounds(f64, f64),
}

/// Langlands parameter triple, zero-sum and self-dual as a multiset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LanglandsParameter {
    mu: [Complex64; 3],
}

/// Spectral parameter triple, zero-sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralParameter {
    nu: [Complex64; 3],
}

fn zero_sum_gap(v: &[Complex64; 3]) -> f64 {
    (v[0] + v[1] + v[2]).norm()
}

/// Best matching distance between `{-mu_j}` and `{conj(mu_j)}` over the six
/// pairings. Floating inputs cannot satisfy multiset equality exactly, so the
/// check minimizes the worst componentwise distance over permutations.
fn self_dual_distance(mu: &[Complex64; 3]) -> f64 {
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let neg: Vec<Complex64> = mu.iter().map(|z| -z).collect();
    let conj: Vec<Complex64> = mu.iter().map(|z| z.conj()).collect();
    PERMS
        .iter()
        .map(|p| {
            (0..3)
                .map(|i| (neg[i] - conj[p[i]]).norm())
                .fold(0.0_f64, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

impl LanglandsParameter {
    /// Validates the zero-sum, real-part bound and self-duality invariants.
    pub fn new(mu1: Complex64, mu2: Complex64, mu3: Complex64) -> Result<Self, FormError> {
        let mu = [mu1, mu2, mu3];
        let gap = zero_sum_gap(&mu);
        if gap > ZERO_SUM_TOL {
            return Err(FormError::NotZeroSum(gap));
        }
        for (j, m) in mu.iter().enumerate() {
            if m.re.abs() > RE_MU_BOUND + RE_MU_SLACK {
                return Err(FormError::ReBoundViolated {
                    j: j + 1,
                    value: m.re.abs(),
                });
            }
        }
        let d = self_dual_distance(&mu);
        if d > SELF_DUAL_TOL {
            return Err(FormError::NotSelfDual(d));
        }
        Ok(Self { mu })
    }

    /// Purely imaginary (tempered) triple from ordinates `(u1, u2, u3)`.
    pub fn tempered(u1: f64, u2: f64, u3: f64) -> Result<Self, FormError> {
        Self::new(
            Complex64::new(0.0, u1),
            Complex64::new(0.0, u2),
            Complex64::new(0.0, u3),
        )
    }

    pub fn components(&self) -> [Complex64; 3] {
        self.mu
    }

    pub fn is_tempered(&self) -> bool {
        self.mu.iter().all(|m| m.re == 0.0)
    }

    /// Euclidean norm of the triple.
    pub fn norm(&self) -> f64 {
        self.mu.iter().map(|m| m.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `2 + max_j |mu_j|`, the archimedean conductor scale.
    pub fn gamma_scale(&self) -> f64 {
        2.0 + self.mu.iter().map(|m| m.norm()).fold(0.0, f64::max)
    }

    pub fn negated(&self) -> Self {
        Self {
            mu: [-self.mu[0], -self.mu[1], -self.mu[2]],
        }
    }
}

impl SpectralParameter {
    pub fn new(nu1: Complex64, nu2: Complex64, nu3: Complex64) -> Result<Self, FormError> {
        let nu = [nu1, nu2, nu3];
        let gap = zero_sum_gap(&nu);
        if gap > ZERO_SUM_TOL {
            return Err(FormError::NotZeroSum(gap));
        }
        Ok(Self { nu })
    }

    pub fn components(&self) -> [Complex64; 3] {
        self.nu
    }
}

/// `nu1 = (mu1 - mu2)/3`, `nu2 = (mu2 - mu3)/3`, `nu3 = -nu1 - nu2`.
pub fn mu_to_nu(mu: &LanglandsParameter) -> SpectralParameter {
    let [m1, m2, m3] = mu.components();
    let nu1 = (m1 - m2) / 3.0;
    let nu2 = (m2 - m3) / 3.0;
    SpectralParameter {
        nu: [nu1, nu2, -nu1 - nu2],
    }
}

/// `mu1 = 2 nu1 + nu2`, `mu2 = nu2 - nu1`, `mu3 = -nu1 - 2 nu2`.
pub fn nu_to_mu(nu: &SpectralParameter) -> Result<LanglandsParameter, FormError> {
    let [n1, n2, _] = nu.components();
    let mu1 = 2.0 * n1 + n2;
    let mu2 = n2 - n1;
    let mu3 = -n1 - 2.0 * n2;
    LanglandsParameter::new(mu1, mu2, mu3)
}

/// A GL(3) form with Hecke data at the stored primes.
///
/// Composite coefficients are never stored; they are reconstructed by
/// multiplicativity in the [`crate::hecke`] module.
#[derive(Debug, Clone, PartialEq)]
pub struct FormRecord {
    pub label: String,
    pub mu: LanglandsParameter,
    /// Map from prime `p` to the pair `(A(1,p), A(p,1))`.
    pub coefficients: BTreeMap<u64, (Complex64, Complex64)>,
    pub zeros: Option<ZeroSet>,
    /// Positive normalization weight (plays the role of the Rankin-Selberg
    /// mass); defaults to 1 when not supplied.
    pub normalization: f64,
    /// `2 + max_j |mu_j|`.
    pub gamma_scale: f64,
}

impl FormRecord {
    pub fn new(
        label: impl Into<String>,
        mu: LanglandsParameter,
        coefficients: BTreeMap<u64, (Complex64, Complex64)>,
    ) -> Result<Self, FormError> {
        let record = Self {
            label: label.into(),
            gamma_scale: mu.gamma_scale(),
            mu,
            coefficients,
            zeros: None,
            normalization: 1.0,
        };
        record.validate()?;
        Ok(record)
    }

    pub fn with_zeros(mut self, zeros: ZeroSet) -> Self {
        self.zeros = Some(zeros);
        self
    }

    pub fn with_normalization(mut self, normalization: f64) -> Result<Self, FormError> {
        if normalization <= 0.0 {
            return Err(FormError::NonPositiveNormalization(normalization));
        }
        self.normalization = normalization;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), FormError> {
        let expected = self.mu.gamma_scale();
        if (self.gamma_scale - expected).abs() > 1e-12 {
            return Err(FormError::GammaScaleMismatch {
                stored: self.gamma_scale,
                expected,
            });
        }
        if self.normalization <= 0.0 {
            return Err(FormError::NonPositiveNormalization(self.normalization));
        }
        if self.mu.is_tempered() {
            for (&p, &(a1p, ap1)) in &self.coefficients {
                let gap = (a1p.conj() - ap1).norm();
                if gap > 1e-10 {
                    return Err(FormError::CoefficientConjugation { p, gap });
                }
            }
        }
        Ok(())
    }
}

/// The dual form: negated Langlands parameter, swapped coefficient pairs,
/// zeros reflected in the real axis.
pub fn dual_form(f: &FormRecord) -> FormRecord {
    let label = match f.label.strip_suffix("~") {
        Some(base) => base.to_string(),
        None => format!("{}~", f.label),
    };
    FormRecord {
        label,
        mu: f.mu.negated(),
        coefficients: f
            .coefficients
            .iter()
            .map(|(&p, &(a1p, ap1))| (p, (ap1, a1p)))
            .collect(),
        zeros: f.zeros.as_ref().map(ZeroSet::reflected),
        normalization: f.normalization,
        gamma_scale: f.gamma_scale,
    }
}

/// Diagnostics from the generic-position check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenericPositionReport {
    pub in_position: bool,
    /// Smallest of the ratios |mu_j|/T, |nu_j|/T.
    pub worst_low_ratio: f64,
    /// Largest of the ratios |mu_j|/T, |nu_j|/T.
    pub worst_high_ratio: f64,
}

/// Checks `c_lo * T <= |mu_j|, |nu_j| <= c_hi * T` with `T = ||mu0||`.
pub fn is_generic_position(
    mu0: &LanglandsParameter,
    c_lo: f64,
    c_hi: f64,
) -> Result<GenericPositionReport, FormError> {
    if !(c_lo > 0.0 && c_hi > c_lo) {
        return Err(FormError::BadGenericBounds(c_lo, c_hi));
    }
    let t = mu0.norm();
    if t == 0.0 {
        return Err(FormError::ZeroCenter);
    }
    let nu0 = mu_to_nu(mu0);
    let ratios: Vec<f64> = mu0
        .components()
        .iter()
        .chain(nu0.components().iter())
        .map(|z| z.norm() / t)
        .collect();
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0_f64, f64::max);
    Ok(GenericPositionReport {
        in_position: lo >= c_lo && hi <= c_hi,
        worst_low_ratio: lo,
        worst_high_ratio: hi,
    })
}
