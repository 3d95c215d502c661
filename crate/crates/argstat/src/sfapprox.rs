//! Argument of degree-3 L-functions on the critical line.
//!
//! The fully computable model is the isobaric product
//! `E(s) = zeta(s + i t1) zeta(s + i t2) zeta(s + i t3)` with `t1+t2+t3 = 0`.
//! Its local roots are `p^{-i t_j}` (unit modulus, product 1) and its zeros
//! are shifted critical-line zeta zeros, so both the continuous-argument
//! definition of S(t) and its Dirichlet-polynomial approximation can be
//! evaluated end to end. E is not a cusp form; it is a validation vehicle
//! for the machinery, not a source of cuspidal truth.

use num_complex::Complex64;
use thiserror::Error;

use crate::forms::FormRecord;
use crate::smoothing::{
    dirichlet_sum, sigma_x, CoefficientSource, SmoothingConfig, SmoothingError, WeightMode, Zero,
    ZeroSet,
};
use crate::zeta::{self, zeta_ordinates, ZetaError, MAX_ORDINATE};

#[derive(Debug, Error)]
pub enum SfError {
    #[error("shifts must sum to zero, got sum {0}")]
    ShiftSum(f64),
    #[error("height {height} is within {distance:.2e} of a zero ordinate")]
    ZeroProximity { height: f64, distance: f64 },
    #[error("phase unwrapping failed near sigma = {0}: increment stayed >= pi/2 at minimal step")]
    UnwrappingFailure(f64),
    #[error("t must lie in [5, 50] for the counting check, got {0}")]
    HeightOutOfRange(f64),
    #[error("t must be nonzero")]
    ZeroHeight,
    #[error("form carries no zero data")]
    NoZeros,
    #[error("zero window {0} exceeds the derived ordinate table (max {MAX_ORDINATE})")]
    WindowTooLarge(f64),
    #[error(transparent)]
    Smoothing(#[from] SmoothingError),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
}

/// Three real shifts with zero sum, defining E(s) above.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EisensteinSpec {
    shifts: [f64; 3],
}

impl EisensteinSpec {
    pub fn new(t1: f64, t2: f64, t3: f64) -> Result<Self, SfError> {
        let sum = t1 + t2 + t3;
        if sum.abs() > 1e-12 {
            return Err(SfError::ShiftSum(sum));
        }
        Ok(Self {
            shifts: [t1, t2, t3],
        })
    }

    pub fn shifts(&self) -> [f64; 3] {
        self.shifts
    }

    pub fn gamma_scale(&self) -> f64 {
        2.0 + self.shifts.iter().fold(0.0f64, |m, t| m.max(t.abs()))
    }

    /// Zeros of E below the table height, as shifted zeta ordinates on the
    /// critical line, certified complete in the surviving box.
    pub fn zero_set(&self) -> Result<ZeroSet, SfError> {
        let max_shift = self.shifts.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        let height = MAX_ORDINATE - max_shift - 1e-9;
        let mut zeros = Vec::new();
        for o in zeta_ordinates() {
            for &t in &self.shifts {
                for g in [o.gamma - t, -o.gamma - t] {
                    if g.abs() <= height {
                        zeros.push(Zero {
                            beta: 0.0,
                            gamma: g,
                        });
                    }
                }
            }
        }
        Ok(ZeroSet::new(zeros)?.with_box(0.0, height)?)
    }
}

impl CoefficientSource for EisensteinSpec {
    fn coefficient_pair(&self, p: u64) -> Option<(Complex64, Complex64)> {
        let lp = (p as f64).ln();
        let a1p: Complex64 = self
            .shifts
            .iter()
            .map(|&t| Complex64::from_polar(1.0, -t * lp))
            .sum();
        Some((a1p, a1p.conj()))
    }

    fn c_value(&self, p: u64, k: u32) -> Option<Complex64> {
        let lp = k as f64 * (p as f64).ln();
        Some(
            self.shifts
                .iter()
                .map(|&t| Complex64::from_polar(1.0, -t * lp))
                .sum(),
        )
    }
}

/// Data an S-approximation needs from an L-function: local coefficients,
/// zero locations, and the archimedean height scale.
pub trait LFunctionData: CoefficientSource {
    fn zero_data(&self) -> Option<&ZeroSet>;
    fn height_scale(&self) -> f64;
}

impl LFunctionData for FormRecord {
    fn zero_data(&self) -> Option<&ZeroSet> {
        self.zeros.as_ref()
    }

    fn height_scale(&self) -> f64 {
        self.gamma_scale
    }
}

/// EisensteinSpec with its zero set materialized, for use as an end-to-end
/// oracle input to `approx_s`.
#[derive(Debug, Clone)]
pub struct EisensteinForm {
    pub spec: EisensteinSpec,
    zeros: ZeroSet,
}

impl EisensteinForm {
    pub fn new(spec: EisensteinSpec) -> Result<Self, SfError> {
        let zeros = spec.zero_set()?;
        Ok(Self { spec, zeros })
    }
}

impl CoefficientSource for EisensteinForm {
    fn coefficient_pair(&self, p: u64) -> Option<(Complex64, Complex64)> {
        self.spec.coefficient_pair(p)
    }

    fn c_value(&self, p: u64, k: u32) -> Option<Complex64> {
        self.spec.c_value(p, k)
    }
}

impl LFunctionData for EisensteinForm {
    fn zero_data(&self) -> Option<&ZeroSet> {
        Some(&self.zeros)
    }

    fn height_scale(&self) -> f64 {
        self.spec.gamma_scale()
    }
}

/// A horizontal unwrapping path at fixed height: abscissae descending from
/// `sigma_start` to 1/2 with the function values sampled along the way.
#[derive(Debug, Clone)]
pub struct ArgumentPath {
    pub t: f64,
    pub sigma_samples: Vec<f64>,
    pub phase_values: Vec<Complex64>,
    pub unwrapped_arg: f64,
}

impl ArgumentPath {
    /// Successive phase increments along the path, each within (-pi, pi) by
    /// the unwrapping construction.
    pub fn max_increment(&self) -> f64 {
        self.phase_values
            .windows(2)
            .map(|w| (w[1] / w[0]).arg().abs())
            .fold(0.0, f64::max)
    }
}

/// Abscissa at which the principal argument is provably the continued one:
/// each zeta factor satisfies |zeta - 1| <= zeta(sigma) - 1 < 0.018 for all
/// sigma >= 6, so the argument never leaves a small disc on the tail to
/// infinity and |log E| < 0.1 there.
const SIGMA_START: f64 = 6.0;

fn product_value(shifts: &[f64], sigma: f64, t: f64) -> Complex64 {
    shifts
        .iter()
        .map(|&a| zeta::zeta(Complex64::new(sigma, t + a)).value)
        .product()
}

fn check_proximity(shifts: &[f64], t: f64, min_distance: f64) -> Result<(), SfError> {
    for &a in shifts {
        let d = zeta::distance_to_ordinate(t + a);
        if d < min_distance {
            return Err(SfError::ZeroProximity {
                height: t + a,
                distance: d,
            });
        }
    }
    Ok(())
}

/// Unwrapped argument of the product of shifted zeta factors along the
/// horizontal segment from sigma = infinity down to 1/2 at height t,
/// normalized by pi. Returns the sampled path for audit.
fn s_product(shifts: &[f64], t: f64, path_resolution: f64) -> Result<ArgumentPath, SfError> {
    check_proximity(shifts, t, 1e-3)?;
    // principal argument at the start equals the continued one; certify the
    // smallness of log E factor by factor
    let mut start_arg = 0.0;
    let mut log_mag = 0.0;
    for &a in shifts {
        let v = zeta::zeta(Complex64::new(SIGMA_START, t + a)).value;
        start_arg += v.arg();
        log_mag += v.ln().norm();
    }
    assert!(
        log_mag < 0.1,
        "|log| at the path start must be < 0.1, got {log_mag}"
    );
    let mut sigma = SIGMA_START;
    let mut prev = product_value(shifts, sigma, t);
    let mut arg = start_arg;
    let mut sigma_samples = vec![sigma];
    let mut phase_values = vec![prev];
    while sigma > 0.5 {
        let mut step = path_resolution.min(sigma - 0.5);
        loop {
            let next = product_value(shifts, sigma - step, t);
            let d = (next / prev).arg();
            if d.abs() < std::f64::consts::FRAC_PI_2 {
                arg += d;
                prev = next;
                sigma -= step;
                sigma_samples.push(sigma);
                phase_values.push(next);
                break;
            }
            step *= 0.5;
            if step < 1e-9 {
                return Err(SfError::UnwrappingFailure(sigma));
            }
        }
    }
    Ok(ArgumentPath {
        t,
        sigma_samples,
        phase_values,
        unwrapped_arg: arg,
    })
}

/// S for the isobaric product: (1/pi) times the unwrapped argument of E at
/// 1/2 + it, started at 0 far to the right.
pub fn s_oracle(spec: &EisensteinSpec, t: f64, path_resolution: f64) -> Result<f64, SfError> {
    Ok(s_product(&spec.shifts, t, path_resolution)?.unwrapped_arg / std::f64::consts::PI)
}

/// Same machinery for a single zeta factor: S_zeta(t).
pub fn s_zeta(t: f64) -> Result<f64, SfError> {
    Ok(s_product(&[0.0], t, 0.02)?.unwrapped_arg / std::f64::consts::PI)
}

/// The sampled oracle path, for step-stability and invariant audits.
pub fn oracle_path(
    spec: &EisensteinSpec,
    t: f64,
    path_resolution: f64,
) -> Result<ArgumentPath, SfError> {
    s_product(&spec.shifts, t, path_resolution)
}

/// Zero-counting consistency at height t: the smooth main term plus S_zeta
/// against the directly counted ordinates in (0, t].
pub fn rv_mangoldt_check(t: f64) -> Result<(f64, usize), SfError> {
    if !(5.0..=50.0).contains(&t) {
        return Err(SfError::HeightOutOfRange(t));
    }
    check_proximity(&[0.0], t, 0.1)?;
    let two_pi = 2.0 * std::f64::consts::PI;
    let n_formula =
        t / two_pi * (t / (two_pi * std::f64::consts::E)).ln() + 7.0 / 8.0 + s_zeta(t)?;
    let n_counted = zeta_ordinates().iter().filter(|o| o.gamma <= t).count();
    Ok((n_formula, n_counted))
}

/// Both sides of the smoothed explicit-formula identity for E, with the zero
/// sum truncated at the window and the trivial-zero sum at m <= 50.
#[derive(Debug, Clone, Copy)]
pub struct ExplicitFormulaReport {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub gap: f64,
    /// Majorant for the discarded zero-sum tail (cubic decay in ordinate).
    pub zero_tail_bound: f64,
}

fn log_zeta_derivative(s: Complex64) -> Complex64 {
    // central differences of log zeta with one Richardson step; the ratio
    // form keeps the branch cut out of the difference
    let d = |h: f64| {
        let up = zeta::zeta(s + Complex64::new(h, 0.0)).value;
        let dn = zeta::zeta(s - Complex64::new(h, 0.0)).value;
        (up / dn).ln() / (2.0 * h)
    };
    let h = 1e-4;
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

pub fn explicit_formula_check(
    spec: &EisensteinSpec,
    s: Complex64,
    cfg: &SmoothingConfig,
    zero_window: f64,
) -> Result<ExplicitFormulaReport, SfError> {
    let max_shift = spec.shifts.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    if zero_window + max_shift > MAX_ORDINATE {
        return Err(SfError::WindowTooLarge(zero_window));
    }
    check_proximity(&spec.shifts, s.im, 1e-3)?;
    let lhs: Complex64 = spec
        .shifts
        .iter()
        .map(|&a| log_zeta_derivative(s + Complex64::new(0.0, a)))
        .sum();

    let log_x = cfg.x().ln();
    let prime_part = dirichlet_sum(spec, s.re, s.im, cfg, WeightMode::Plain)?;

    let mut zero_sum = Complex64::new(0.0, 0.0);
    for o in zeta_ordinates() {
        for &a in &spec.shifts() {
            for g in [o.gamma - a, -o.gamma - a] {
                if g.abs() <= zero_window {
                    let z = Complex64::new(0.5, g) - s;
                    let xz = (z * log_x).exp();
                    zero_sum += xz * (1.0 - xz) * (1.0 - xz) / (z * z * z);
                }
            }
        }
    }

    let mut trivial_sum = Complex64::new(0.0, 0.0);
    for &a in &spec.shifts() {
        for m in 1..=50u32 {
            let w = Complex64::new(-2.0 * m as f64, -a) - s;
            let xw = (w * log_x).exp();
            trivial_sum += xw * (1.0 - xw) * (1.0 - xw) / (w * w * w);
        }
    }

    // each factor's pole at 1 - ia enters with sign opposite to the zeros
    let mut pole_sum = Complex64::new(0.0, 0.0);
    for &a in &spec.shifts() {
        let z = Complex64::new(1.0, -a) - s;
        let xz = (z * log_x).exp();
        pole_sum += xz * (1.0 - xz) * (1.0 - xz) / (z * z * z);
    }

    let rhs = -prime_part + (pole_sum - zero_sum - trivial_sum) / (log_x * log_x);
    let gap = (lhs - rhs).norm();

    // tail: zero density ~ log(u/2pi)/(2pi) per sign and shift, term bound
    // x^{1/2-sigma}(1+x^{1/2-sigma})^2 / |gamma - Im s|^3
    let amp = {
        let e = (0.5 - s.re) * log_x;
        let x_half = e.exp();
        x_half * (1.0 + x_half) * (1.0 + x_half)
    };
    let mut tail = 0.0;
    let du = zero_window / 100.0;
    let mut u = zero_window;
    while u < 200.0 * zero_window {
        let density = 6.0 * (u / (2.0 * std::f64::consts::PI)).ln() / (2.0 * std::f64::consts::PI);
        let dist = (u - s.im.abs()).max(0.5 * zero_window);
        tail += density * amp / (dist * dist * dist) * du;
        u += du;
    }
    let zero_tail_bound = tail / (log_x * log_x);

    Ok(ExplicitFormulaReport {
        lhs,
        rhs,
        gap,
        zero_tail_bound,
    })
}

/// Dirichlet-polynomial approximation of S at height t with its explicit
/// error envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SApproxResult {
    pub main_term: f64,
    pub error_budget: f64,
    pub sigma_x_used: f64,
}

/// Main term `(1/pi) Im sum C(n) Lambda_x(n) / (n^{sigma_x + it} log n)` and
/// the two-part error envelope scaled by `error_constant`.
pub fn approx_s<F: LFunctionData + ?Sized>(
    f: &F,
    t: f64,
    cfg: &SmoothingConfig,
    error_constant: f64,
) -> Result<SApproxResult, SfError> {
    if t == 0.0 {
        return Err(SfError::ZeroHeight);
    }
    let zeros = f.zero_data().ok_or(SfError::NoZeros)?;
    let sx = sigma_x(zeros, t, cfg)?;
    let main = dirichlet_sum(f, sx, t, cfg, WeightMode::DividedByLog)?;
    let plain = dirichlet_sum(f, sx, t, cfg, WeightMode::Plain)?;
    let excess = sx - 0.5;
    let error_budget =
        error_constant * (excess * plain.norm() + excess * (t.abs() + f.height_scale()).ln());
    Ok(SApproxResult {
        main_term: main.im / std::f64::consts::PI,
        error_budget,
        sigma_x_used: sx,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_requires_zero_sum() {
        assert!(EisensteinSpec::new(1.0, -1.0, 0.0).is_ok());
        assert!(matches!(
            EisensteinSpec::new(1.0, -0.5, 0.0),
            Err(SfError::ShiftSum(_))
        ));
    }

    #[test]
    fn oracle_additivity() {
        let a = 0.7;
        let spec = EisensteinSpec::new(a, -a, 0.0).unwrap();
        let t = 6.0;
        let whole = s_oracle(&spec, t, 0.01).unwrap();
        let parts = s_zeta(t + a).unwrap() + s_zeta(t - a).unwrap() + s_zeta(t).unwrap();
        assert!((whole - parts).abs() < 1e-6, "{whole} vs {parts}");
    }

    #[test]
    fn oracle_sign_relabel_symmetry() {
        let t = 8.3;
        let s1 = s_oracle(&EisensteinSpec::new(0.4, -0.4, 0.0).unwrap(), t, 0.01).unwrap();
        let s2 = s_oracle(&EisensteinSpec::new(-0.4, 0.4, 0.0).unwrap(), t, 0.01).unwrap();
        assert!((s1 - s2).abs() < 1e-10);
    }

    #[test]
    fn oracle_step_stability() {
        let spec = EisensteinSpec::new(0.0, 0.0, 0.0).unwrap();
        let t = 6.0;
        let coarse = s_oracle(&spec, t, 0.02).unwrap();
        let fine = s_oracle(&spec, t, 0.01).unwrap();
        assert!((coarse - fine).abs() < 1e-8);
    }

    #[test]
    fn oracle_path_invariants() {
        let spec = EisensteinSpec::new(1.0, -1.0, 0.0).unwrap();
        let path = oracle_path(&spec, 11.2, 0.02).unwrap();
        assert!(path.max_increment() < std::f64::consts::PI);
        assert!(path.sigma_samples.first().copied().unwrap() >= 3.0);
        assert!((path.sigma_samples.last().copied().unwrap() - 0.5).abs() < 1e-12);
        assert!(path
            .sigma_samples
            .windows(2)
            .all(|w| w[1] < w[0]));
    }

    #[test]
    fn oracle_refuses_near_ordinate() {
        let g = zeta_ordinates()[0].gamma;
        let spec = EisensteinSpec::new(0.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            s_oracle(&spec, g + 1e-5, 0.01),
            Err(SfError::ZeroProximity { .. })
        ));
    }

    #[test]
    fn counting_consistency_small_heights() {
        for (t, expect) in [(10.0, 0usize), (15.0, 1), (30.0, 3)] {
            let (formula, counted) = rv_mangoldt_check(t).unwrap();
            assert_eq!(counted, expect, "t = {t}");
            assert!(
                (formula - counted as f64).abs() <= 0.05,
                "t = {t}: formula {formula} vs count {counted}"
            );
        }
        assert!(rv_mangoldt_check(3.0).is_err());
    }

    #[test]
    fn explicit_formula_gap_small() {
        let cfg = SmoothingConfig::new(20.0).unwrap();
        let spec = EisensteinSpec::new(0.0, 0.0, 0.0).unwrap();
        let report = explicit_formula_check(&spec, Complex64::new(2.0, 0.0), &cfg, 100.0).unwrap();
        assert!(report.gap <= 1e-3, "gap = {}", report.gap);
        assert!(report.zero_tail_bound < 1e-3);
        // identity is x-independent: a larger x keeps the gap within tolerance
        let cfg_big = SmoothingConfig::new(40.0).unwrap();
        let report_big =
            explicit_formula_check(&spec, Complex64::new(2.0, 0.0), &cfg_big, 100.0).unwrap();
        assert!(report_big.gap <= 2e-3, "gap = {}", report_big.gap);
    }

    #[test]
    fn explicit_formula_shifted_spec() {
        let cfg = SmoothingConfig::new(20.0).unwrap();
        let spec = EisensteinSpec::new(1.0, -1.0, 0.0).unwrap();
        let report = explicit_formula_check(&spec, Complex64::new(1.5, 3.0), &cfg, 100.0).unwrap();
        assert!(report.gap <= 2e-3, "gap = {}", report.gap);
    }

    #[test]
    fn approx_floor_case() {
        use crate::forms::LanglandsParameter;
        use std::collections::BTreeMap;

        let cfg = SmoothingConfig::new(50.0).unwrap();
        let mu = LanglandsParameter::tempered(0.0, 0.0, 0.0).unwrap();
        let mut coeffs = BTreeMap::new();
        crate::primes::for_each_prime_power(125_000, |p, k, _| {
            if k == 1 {
                coeffs.insert(p, (Complex64::new(3.0, 0.0), Complex64::new(3.0, 0.0)));
            }
        })
        .unwrap();
        let zeros = ZeroSet::new(vec![]).unwrap().with_box(0.3, 1.0e3).unwrap();
        let form = FormRecord::new("floor", mu, coeffs).unwrap().with_zeros(zeros);
        let out = approx_s(&form, 2.0, &cfg, 10.0).unwrap();
        let floor = 0.5 + 10.0 / 50.0_f64.ln();
        assert!((out.sigma_x_used - floor).abs() < 1e-12);
        assert!(out.main_term.is_finite());
        assert!(out.error_budget >= 0.0);
    }

    #[test]
    fn approx_rejects_zero_height() {
        let form = EisensteinForm::new(EisensteinSpec::new(0.0, 0.0, 0.0).unwrap()).unwrap();
        let cfg = SmoothingConfig::new(10.0).unwrap();
        assert!(matches!(
            approx_s(&form, 0.0, &cfg, 10.0),
            Err(SfError::ZeroHeight)
        ));
    }

    #[test]
    fn oracle_vs_approx_single_point() {
        // one desk-scale point of the end-to-end containment; the full grid
        // lives in the acceptance suite
        let form = EisensteinForm::new(EisensteinSpec::new(0.5, -0.5, 0.0).unwrap()).unwrap();
        let cfg = SmoothingConfig::new(4.0_f64.exp()).unwrap();
        let t = 6.0;
        let oracle = s_oracle(&form.spec, t, 0.01).unwrap();
        let approx = approx_s(&form, t, &cfg, 10.0).unwrap();
        assert!(
            (oracle - approx.main_term).abs() <= approx.error_budget,
            "oracle {} main {} budget {}",
            oracle,
            approx.main_term,
            approx.error_budget
        );
    }
}
