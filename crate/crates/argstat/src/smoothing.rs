//! Analytic weights and zero-dependent quantities.
//!
//! The smoothed von Mangoldt weight `lambda_x` truncates the Dirichlet series
//! of -L'/L at `x^3` with a log-squared taper. The abscissa `sigma_x` is
//! pushed to the right of 1/2 by nearby zeros; any operation that inspects
//! "all zeros in a region" demands an explicit completeness certificate on
//! the zero data and fails loudly without one.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forms::FormRecord;
use crate::primes::{self, SieveError, MAX_SIEVE_LIMIT};
use crate::satake::power_sums;

#[derive(Debug, Error)]
pub enum SmoothingError {
    #[error("smoothing length must satisfy x >= 4, got {0}")]
    XTooSmall(f64),
    #[error("zero at (beta, gamma) = ({0}, {1}) lies outside the open critical strip")]
    ZeroOutsideStrip(f64, f64),
    #[error("listed zero has |beta| = {0} above the completeness box bound {1}")]
    ZeroAboveBox(f64, f64),
    #[error("zero data carries no completeness certificate")]
    NoCompletenessBox,
    #[error(
        "completeness box height {have:.3} cannot certify the required window {need:.3}"
    )]
    BoxTooSmall { have: f64, need: f64 },
    #[error("coefficients missing below the cutoff; largest missing prime {0}")]
    MissingCoefficient(u64),
    #[error("cutoff {cutoff:.3e} exceeds the sieve ceiling and the tail bound {tail:.3e} is not negligible at sigma = {sigma}")]
    TailNotNegligible { cutoff: f64, sigma: f64, tail: f64 },
    #[error(transparent)]
    Sieve(#[from] SieveError),
}

/// One nontrivial zero `rho = 1/2 + beta + i gamma` in shifted coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Zero {
    pub beta: f64,
    pub gamma: f64,
}

/// Zeros of one L-function, sorted by ordinate.
///
/// `complete_in_box = (B, H)` certifies two things: every zero with
/// `|gamma| <= H` is listed, and every zero of the function at any height has
/// `|beta| <= B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    zeros: Vec<Zero>,
    pub complete_in_box: Option<(f64, f64)>,
}

impl ZeroSet {
    pub fn new(mut zeros: Vec<Zero>) -> Result<Self, SmoothingError> {
        for z in &zeros {
            if z.beta.abs() >= 0.5 {
                return Err(SmoothingError::ZeroOutsideStrip(z.beta, z.gamma));
            }
        }
        zeros.sort_by(|a, b| {
            a.gamma
                .partial_cmp(&b.gamma)
                .unwrap()
                .then(a.beta.partial_cmp(&b.beta).unwrap())
        });
        Ok(Self {
            zeros,
            complete_in_box: None,
        })
    }

    pub fn with_box(mut self, beta_bound: f64, height: f64) -> Result<Self, SmoothingError> {
        for z in &self.zeros {
            if z.beta.abs() > beta_bound + 1e-15 {
                return Err(SmoothingError::ZeroAboveBox(z.beta, beta_bound));
            }
        }
        self.complete_in_box = Some((beta_bound, height));
        Ok(self)
    }

    pub fn zeros(&self) -> &[Zero] {
        &self.zeros
    }

    /// Image under `gamma -> -gamma` (the dual form's zeros).
    pub fn reflected(&self) -> Self {
        let mut out = Self::new(
            self.zeros
                .iter()
                .map(|z| Zero {
                    beta: z.beta,
                    gamma: -z.gamma,
                })
                .collect(),
        )
        .expect("reflection preserves the strip");
        out.complete_in_box = self.complete_in_box;
        out
    }
}

/// Smoothing length configuration, `x >= 4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingConfig {
    x: f64,
}

impl SmoothingConfig {
    pub fn new(x: f64) -> Result<Self, SmoothingError> {
        if x < 4.0 {
            return Err(SmoothingError::XTooSmall(x));
        }
        Ok(Self { x })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn cutoff(&self) -> f64 {
        self.x.powi(3)
    }
}

/// `log p` if `n = p^k`, else 0.
pub fn von_mangoldt(n: u64) -> f64 {
    assert!(n >= 1);
    if n == 1 {
        return 0.0;
    }
    let mut m = n;
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            while m % d == 0 {
                m /= d;
            }
            return if m == 1 { (d as f64).ln() } else { 0.0 };
        }
        d += 1;
    }
    (m as f64).ln()
}

/// The log-squared taper applied to `Lambda(n)`, as a function of `log n`.
/// Both adjacent branch expressions agree at the boundaries `x` and `x^2`;
/// the boundary points are evaluated with the middle branch for
/// reproducibility.
fn taper(log_n: f64, log_x: f64) -> f64 {
    if log_n < log_x {
        1.0
    } else if log_n <= 2.0 * log_x {
        let a = 3.0 * log_x - log_n;
        let b = 2.0 * log_x - log_n;
        (a * a - 2.0 * b * b) / (2.0 * log_x * log_x)
    } else if log_n < 3.0 * log_x {
        let a = 3.0 * log_x - log_n;
        a * a / (2.0 * log_x * log_x)
    } else {
        0.0
    }
}

/// The smoothed von Mangoldt weight `Lambda_x(n)`.
pub fn lambda_x(n: u64, cfg: &SmoothingConfig) -> f64 {
    let lam = von_mangoldt(n);
    if lam == 0.0 {
        return 0.0;
    }
    lam * taper((n as f64).ln(), cfg.x.ln())
}

/// `sum_{p <= X} 1/p` by direct summation over the sieve.
pub fn prime_reciprocal_sum(x_bound: f64) -> Result<f64, SmoothingError> {
    assert!(x_bound >= 2.0);
    // cache may hold primes beyond the requested bound
    let primes = primes::shared_primes(x_bound as u64)?;
    Ok(primes
        .iter()
        .take_while(|&&p| p as f64 <= x_bound)
        .map(|&p| 1.0 / p as f64)
        .sum())
}

/// Weight applied to each prime-power term of the truncated Dirichlet sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightMode {
    /// `w(n) = 1`.
    Plain,
    /// `w(n) = 1/log n`.
    DividedByLog,
    /// `w(p^k) = log(x p)`.
    LogXp,
}

/// Source of local coefficient data for Dirichlet sums. Implementations may
/// override `c_value` when the power sums have a cheaper closed form.
pub trait CoefficientSource {
    /// `(A(1,p), A(p,1))`, or `None` when the prime is not covered.
    fn coefficient_pair(&self, p: u64) -> Option<(Complex64, Complex64)>;

    /// `C(p^k)`, the k-th power sum of the local roots.
    fn c_value(&self, p: u64, k: u32) -> Option<Complex64> {
        let (a1p, ap1) = self.coefficient_pair(p)?;
        Some(power_sums(a1p, ap1, k as usize)[k as usize - 1])
    }
}

impl CoefficientSource for FormRecord {
    fn coefficient_pair(&self, p: u64) -> Option<(Complex64, Complex64)> {
        self.coefficients.get(&p).copied()
    }
}

/// Truncated Dirichlet sum `sum_{p^k <= x^3} C(p^k) Lambda_x(p^k) w(p^k)
/// (p^k)^{-sigma - i t}`.
///
/// Enumeration is capped at the sieve ceiling; beyond it the analytic tail
/// bound (Chebyshev, `|C| <= 3`) must itself be negligible or the sum is
/// refused.
pub fn dirichlet_sum<S: CoefficientSource + ?Sized>(
    source: &S,
    sigma: f64,
    t: f64,
    cfg: &SmoothingConfig,
    mode: WeightMode,
) -> Result<Complex64, SmoothingError> {
    assert!(sigma > 0.0);
    let cutoff = cfg.cutoff();
    let log_x = cfg.x.ln();
    let enum_limit = if cutoff <= MAX_SIEVE_LIMIT as f64 {
        cutoff.floor() as u64
    } else {
        let tail = truncation_tail_bound(MAX_SIEVE_LIMIT as f64, sigma);
        if tail > 1e-5 {
            return Err(SmoothingError::TailNotNegligible {
                cutoff,
                sigma,
                tail,
            });
        }
        MAX_SIEVE_LIMIT
    };
    let mut total = Complex64::new(0.0, 0.0);
    let mut missing: Option<u64> = None;
    primes::for_each_prime_power(enum_limit, |p, k, q| {
        if missing.is_some() {
            return;
        }
        let log_p = (p as f64).ln();
        let log_q = k as f64 * log_p;
        let lam = log_p * taper(log_q, log_x);
        if lam == 0.0 {
            return;
        }
        let c = match source.c_value(p, k) {
            Some(c) => c,
            None => {
                missing = Some(p);
                return;
            }
        };
        let w = match mode {
            WeightMode::Plain => 1.0,
            WeightMode::DividedByLog => 1.0 / log_q,
            WeightMode::LogXp => log_x + log_p,
        };
        let _ = q;
        let magnitude = (-sigma * log_q).exp();
        let phase = Complex64::from_polar(magnitude, -t * log_q);
        total += c * (lam * w) * phase;
    })?;
    if let Some(p) = missing {
        return Err(SmoothingError::MissingCoefficient(p));
    }
    Ok(total)
}

/// Bound on `3 sum_{n > n0} Lambda(n) n^{-sigma}` via `psi(u) <= 1.11 u`.
fn truncation_tail_bound(n0: f64, sigma: f64) -> f64 {
    if sigma <= 1.0 {
        return f64::INFINITY;
    }
    3.0 * 1.11 * sigma / (sigma - 1.0) * n0.powf(1.0 - sigma)
}

fn certify_window(
    zeros: &ZeroSet,
    t: f64,
    log_x: f64,
) -> Result<(f64, f64), SmoothingError> {
    let (beta_bound, height) = zeros
        .complete_in_box
        .ok_or(SmoothingError::NoCompletenessBox)?;
    let need = t.abs() + (3.0 * beta_bound * log_x).exp() / log_x;
    if height < need {
        return Err(SmoothingError::BoxTooSmall { have: height, need });
    }
    Ok((beta_bound, height))
}

/// The zero-repelled abscissa
/// `sigma_x = 1/2 + 2 max { |beta|, 5/log x }`, the max running over zeros
/// with `|t - gamma| <= x^{3|beta|} / log x`. With no qualifying zero the
/// floor term gives `1/2 + 10/log x`.
pub fn sigma_x(zeros: &ZeroSet, t: f64, cfg: &SmoothingConfig) -> Result<f64, SmoothingError> {
    let log_x = cfg.x.ln();
    certify_window(zeros, t, log_x)?;
    Ok(sigma_x_unchecked(zeros.zeros(), t, log_x))
}

/// The formula itself, shared with the synthetic-ensemble harness which
/// builds its own certified data.
pub(crate) fn sigma_x_unchecked(zeros: &[Zero], t: f64, log_x: f64) -> f64 {
    let floor = 5.0 / log_x;
    let mut max_term = floor;
    for z in zeros {
        let window = (3.0 * z.beta.abs() * log_x).exp() / log_x;
        if (t - z.gamma).abs() <= window {
            max_term = max_term.max(z.beta.abs());
        }
    }
    0.5 + 2.0 * max_term
}

/// `N(sigma, H; F)`: zeros with `beta > sigma` and `|gamma| < h`.
pub fn count_zeros(zeros: &ZeroSet, sigma: f64, h: f64) -> Result<usize, SmoothingError> {
    let (_, height) = zeros
        .complete_in_box
        .ok_or(SmoothingError::NoCompletenessBox)?;
    if h > height {
        return Err(SmoothingError::BoxTooSmall {
            have: height,
            need: h,
        });
    }
    Ok(zeros
        .zeros()
        .iter()
        .filter(|z| z.beta > sigma && z.gamma.abs() < h)
        .count())
}
