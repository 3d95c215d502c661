//! Spectral test function, spectral density, and family-mass quadrature.
//!
//! The test function localizes at the six Weyl translates of a tempered
//! center mu0 with bandwidth M = T^(1-eta). All real work happens on the
//! tempered hyperplane, parametrized by (u1, u2) with u3 = -u1-u2.

use std::collections::BTreeSet;

use num_complex::Complex64;
use thiserror::Error;

use crate::forms::{mu_to_nu, LanglandsParameter};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("center norm {norm} disagrees with T = {t}")]
    CenterNormMismatch { norm: f64, t: f64 },
    #[error("eta must lie in (0, 1/2), got {0}")]
    EtaOutOfRange(f64),
    #[error("center has a vanishing spectral coordinate nu_{0}")]
    DegenerateCenter(usize),
    #[error("center must be tempered")]
    CenterNotTempered,
    #[error("spectral density pole within 1e-6 of nu = {0}")]
    PoleProximity(Complex64),
    #[error("quadrature unresolved: coarse/fine estimates differ by {rel:.3e} relative")]
    UnresolvedQuadrature { rel: f64 },
    #[error("cutoff radius {cutoff} is below the required 6 M = {min}")]
    CutoffTooSmall { cutoff: f64, min: f64 },
}

/// Localization config: tempered center mu0 with T = |mu0|, bandwidth
/// exponent eta, and the depth A of the stabilizing polynomial P.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunctionConfig {
    mu0: LanglandsParameter,
    t_scale: f64,
    eta: f64,
    depth: u32,
    /// Imaginary parts of mu0 (the hyperplane coordinates of the center).
    u0: [f64; 3],
    /// Imaginary parts of nu0, all nonzero.
    v0: [f64; 3],
}

impl TestFunctionConfig {
    pub fn new(mu0: LanglandsParameter, t: f64, eta: f64, depth: u32) -> Result<Self, SpecError> {
        if !mu0.is_tempered() {
            return Err(SpecError::CenterNotTempered);
        }
        let norm = mu0.norm();
        if (norm - t).abs() > 1e-9 * t {
            return Err(SpecError::CenterNormMismatch { norm, t });
        }
        if !(0.0 < eta && eta < 0.5) {
            return Err(SpecError::EtaOutOfRange(eta));
        }
        let u0 = [
            mu0.components()[0].im,
            mu0.components()[1].im,
            mu0.components()[2].im,
        ];
        let nu0 = mu_to_nu(&mu0);
        let mut v0 = [0.0; 3];
        for (j, n) in nu0.components().iter().enumerate() {
            if n.im == 0.0 {
                return Err(SpecError::DegenerateCenter(j + 1));
            }
            v0[j] = n.im;
        }
        Ok(Self {
            mu0,
            t_scale: t,
            eta,
            depth,
            u0,
            v0,
        })
    }

    pub fn mu0(&self) -> &LanglandsParameter {
        &self.mu0
    }

    pub fn t_scale(&self) -> f64 {
        self.t_scale
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Bandwidth M = T^(1-eta).
    pub fn bandwidth(&self) -> f64 {
        self.t_scale.powf(1.0 - self.eta)
    }
}

/// The fixed enumeration of the symmetric group on three letters used for
/// the orbit sum: identity first, then transpositions, then 3-cycles.
const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [1, 0, 2],
    [2, 1, 0],
    [0, 2, 1],
    [1, 2, 0],
    [2, 0, 1],
];

/// The six coordinate permutations of mu, in the fixed enumeration order.
pub fn weyl_orbit(mu: &LanglandsParameter) -> [LanglandsParameter; 6] {
    let c = mu.components();
    PERMUTATIONS.map(|p| {
        LanglandsParameter::new(c[p[0]], c[p[1]], c[p[2]])
            .expect("permutation preserves all triple invariants")
    })
}

fn hyperplane_nu(u: [f64; 3]) -> [f64; 3] {
    let v1 = (u[0] - u[1]) / 3.0;
    let v2 = (u[1] - u[2]) / 3.0;
    [v1, v2, -v1 - v2]
}

/// P(mu) on the tempered plane: each factor (nu_j^2 - c_n^2)/|nu0_j|^2 is
/// real there, equal to -(v_j^2 + c_n^2)/v0_j^2.
fn p_polynomial(u: [f64; 3], cfg: &TestFunctionConfig) -> f64 {
    let v = hyperplane_nu(u);
    let mut p = 1.0;
    for n in 0..=cfg.depth {
        let c = (1.0 + 2.0 * n as f64) / 3.0;
        for j in 0..3 {
            p *= -(v[j] * v[j] + c * c) / (cfg.v0[j] * cfg.v0[j]);
        }
    }
    p
}

/// Orbit-summed Gaussian window times P^2, real arithmetic throughout.
fn h_tempered(u: [f64; 3], cfg: &TestFunctionConfig) -> f64 {
    let m = cfg.bandwidth();
    let mut psi_sum = 0.0;
    for perm in PERMUTATIONS {
        let d0 = u[perm[0]] - cfg.u0[0];
        let d1 = u[perm[1]] - cfg.u0[1];
        let d2 = u[perm[2]] - cfg.u0[2];
        psi_sum += (-(d0 * d0 + d1 * d1 + d2 * d2) / (m * m)).exp();
    }
    let p = p_polynomial(u, cfg);
    p * p * psi_sum * psi_sum
}

/// The localized test function h(mu). Tempered input takes the exact real
/// path; general input is evaluated with complex intermediates and the real
/// part returned (see `h_test_diagnostic` for the imaginary residual).
pub fn h_test(mu: &LanglandsParameter, cfg: &TestFunctionConfig) -> f64 {
    h_test_diagnostic(mu, cfg).0
}

/// (real value, imaginary residual) of h at a possibly non-tempered point.
pub fn h_test_diagnostic(mu: &LanglandsParameter, cfg: &TestFunctionConfig) -> (f64, f64) {
    if mu.is_tempered() {
        let c = mu.components();
        return (h_tempered([c[0].im, c[1].im, c[2].im], cfg), 0.0);
    }
    let m = cfg.bandwidth();
    let mu0c = cfg.mu0.components();
    let mut psi_sum = Complex64::new(0.0, 0.0);
    for perm in PERMUTATIONS {
        let c = mu.components();
        let d = [
            (c[perm[0]] - mu0c[0]) / m,
            (c[perm[1]] - mu0c[1]) / m,
            (c[perm[2]] - mu0c[2]) / m,
        ];
        psi_sum += (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).exp();
    }
    let nu = mu_to_nu(mu).components();
    let mut p = Complex64::new(1.0, 0.0);
    for n in 0..=cfg.depth {
        let c = (1.0 + 2.0 * n as f64) / 3.0;
        for j in 0..3 {
            p *= (nu[j] - c) * (nu[j] + c) / (cfg.v0[j] * cfg.v0[j]);
        }
    }
    let h = p * p * psi_sum * psi_sum;
    (h.re, h.im)
}

/// |product of 3 nu_j tan(3 pi nu_j / 2)|: on the tempered plane each factor
/// has magnitude 3 |v_j| tanh(3 pi |v_j| / 2) and the signed product is
/// nonpositive; the absolute value is returned (signed variant below).
pub fn spec_density(mu: &LanglandsParameter) -> Result<f64, SpecError> {
    Ok(spec_density_signed(mu)?.abs())
}

/// The raw signed value of the spectral-density product, kept for audit.
pub fn spec_density_signed(mu: &LanglandsParameter) -> Result<f64, SpecError> {
    if mu.is_tempered() {
        let c = mu.components();
        let v = hyperplane_nu([c[0].im, c[1].im, c[2].im]);
        let mut prod = 1.0;
        for &vj in &v {
            prod *= -3.0 * vj * (1.5 * std::f64::consts::PI * vj).tanh();
        }
        return Ok(prod);
    }
    let nu = mu_to_nu(mu).components();
    let mut prod = Complex64::new(1.0, 0.0);
    for &n in &nu {
        let arg = 1.5 * std::f64::consts::PI * n;
        // poles of tan at odd multiples of pi/2 on the real nu axis
        let half_periods = (arg.re / std::f64::consts::PI - 0.5).round();
        let pole_re = (half_periods + 0.5) * std::f64::consts::PI;
        if (arg.re - pole_re).abs() < 1e-6 && arg.im.abs() < 1e-6 {
            return Err(SpecError::PoleProximity(n));
        }
        prod *= 3.0 * n * arg.tan();
    }
    Ok(prod.re)
}

fn integrand(u: [f64; 3], cfg: &TestFunctionConfig) -> f64 {
    let v = hyperplane_nu(u);
    let mut dens = 1.0;
    for &vj in &v {
        dens *= 3.0 * vj.abs() * (1.5 * std::f64::consts::PI * vj.abs()).tanh();
    }
    h_tempered(u, cfg) * dens
}

/// Quadrature controls for `compute_h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub spacing: f64,
    pub cutoff: f64,
}

impl QuadratureSpec {
    pub fn default_for(cfg: &TestFunctionConfig) -> Self {
        let m = cfg.bandwidth();
        Self {
            spacing: m / 20.0,
            cutoff: 6.0 * m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HValue {
    pub value: f64,
    /// Richardson estimate from the two-resolution comparison.
    pub error_estimate: f64,
}

fn grid_sum(cfg: &TestFunctionConfig, spacing: f64, cutoff: f64) -> f64 {
    // union of index boxes around the six orbit centers on one global
    // lattice, deduplicated; ordered iteration keeps the sum deterministic
    let mut cells: BTreeSet<(i64, i64)> = BTreeSet::new();
    for perm in PERMUTATIONS {
        let cx = cfg.u0[perm[0]];
        let cy = cfg.u0[perm[1]];
        let i_lo = ((cx - cutoff) / spacing).floor() as i64;
        let i_hi = ((cx + cutoff) / spacing).ceil() as i64;
        let j_lo = ((cy - cutoff) / spacing).floor() as i64;
        let j_hi = ((cy + cutoff) / spacing).ceil() as i64;
        for i in i_lo..=i_hi {
            for j in j_lo..=j_hi {
                cells.insert((i, j));
            }
        }
    }
    let mut sum = 0.0;
    for (i, j) in cells {
        let u1 = i as f64 * spacing;
        let u2 = j as f64 * spacing;
        sum += integrand([u1, u2, -u1 - u2], cfg);
    }
    sum * spacing * spacing
}

const H_NORMALIZATION: f64 = 192.0;

/// Total test-function mass: the spectral integral of h over the tempered
/// hyperplane divided by 192 pi^5, with a two-resolution error estimate.
pub fn compute_h(cfg: &TestFunctionConfig, quad: &QuadratureSpec) -> Result<HValue, SpecError> {
    let min_cutoff = 6.0 * cfg.bandwidth();
    if quad.cutoff < min_cutoff - 1e-9 {
        return Err(SpecError::CutoffTooSmall {
            cutoff: quad.cutoff,
            min: min_cutoff,
        });
    }
    let norm = H_NORMALIZATION * std::f64::consts::PI.powi(5);
    let fine = grid_sum(cfg, quad.spacing, quad.cutoff) / norm;
    let coarse = grid_sum(cfg, 2.0 * quad.spacing, quad.cutoff) / norm;
    let diff = (fine - coarse).abs();
    let rel = diff / fine.abs().max(f64::MIN_POSITIVE);
    if rel > 0.01 {
        return Err(SpecError::UnresolvedQuadrature { rel });
    }
    Ok(HValue {
        value: fine,
        // trapezoid is O(spacing^2); halving gains a factor 4
        error_estimate: diff / 3.0,
    })
}

/// Kronecker-diagonal prediction with the analytic error envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalPrediction {
    pub main: f64,
    pub envelope: f64,
    pub negligible: bool,
}

fn envelope_at(p: f64, t: f64, m: f64, epsilon: f64) -> f64 {
    (t * p).powf(epsilon) * (t * p.sqrt() + t.powi(3) + t * m * m * p.powf(7.0 / 64.0))
}

pub fn diagonal_predictor(
    m1: u64,
    m2: u64,
    n1: u64,
    n2: u64,
    cfg: &TestFunctionConfig,
    epsilon: f64,
) -> Result<DiagonalPrediction, SpecError> {
    let p = (m1 * n1 * m2 * n2) as f64;
    assert!(p >= 1.0);
    let h = compute_h(cfg, &QuadratureSpec::default_for(cfg))?;
    let envelope = envelope_at(p, cfg.t_scale(), cfg.bandwidth(), epsilon);
    let main = if (m1, m2) == (n1, n2) { h.value } else { 0.0 };
    Ok(DiagonalPrediction {
        main,
        envelope,
        negligible: envelope < 0.01 * h.value,
    })
}

/// Smallest P at which the envelope stops being negligible against the mass,
/// located by doubling then bisection on the continuous envelope.
pub fn envelope_crossover(cfg: &TestFunctionConfig, epsilon: f64) -> Result<f64, SpecError> {
    let h = compute_h(cfg, &QuadratureSpec::default_for(cfg))?.value;
    let t = cfg.t_scale();
    let m = cfg.bandwidth();
    let threshold = 0.01 * h;
    if envelope_at(1.0, t, m, epsilon) >= threshold {
        return Ok(1.0);
    }
    let mut hi = 2.0;
    while envelope_at(hi, t, m, epsilon) < threshold {
        hi *= 2.0;
        if hi > 1e300 {
            return Ok(f64::INFINITY);
        }
    }
    let mut lo = hi / 2.0;
    for _ in 0..80 {
        let mid = (lo * hi).sqrt();
        if envelope_at(mid, t, m, epsilon) < threshold {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn generic_config(t: f64, eta: f64, depth: u32) -> TestFunctionConfig {
        // direction (1, 2, -3)/sqrt(14): zero-sum, all nu components nonzero
        let a = t / 14.0_f64.sqrt();
        let mu0 = LanglandsParameter::tempered(a, 2.0 * a, -3.0 * a).unwrap();
        TestFunctionConfig::new(mu0, t, eta, depth).unwrap()
    }

    #[test]
    fn config_validation() {
        let mu0 = LanglandsParameter::tempered(3.0, 4.0, -7.0).unwrap();
        let t = mu0.norm();
        assert!(TestFunctionConfig::new(mu0.clone(), t, 0.2, 1).is_ok());
        assert!(matches!(
            TestFunctionConfig::new(mu0.clone(), t * 1.5, 0.2, 1),
            Err(SpecError::CenterNormMismatch { .. })
        ));
        assert!(matches!(
            TestFunctionConfig::new(mu0, t, 0.7, 1),
            Err(SpecError::EtaOutOfRange(_))
        ));
        // u0 = (1, 1, -2) makes nu0_1 = 0
        let degenerate = LanglandsParameter::tempered(1.0, 1.0, -2.0).unwrap();
        let td = degenerate.norm();
        assert!(matches!(
            TestFunctionConfig::new(degenerate, td, 0.2, 1),
            Err(SpecError::DegenerateCenter(1))
        ));
    }

    #[test]
    fn orbit_basics() {
        let zero = LanglandsParameter::tempered(0.0, 0.0, 0.0).unwrap();
        for w in weyl_orbit(&zero) {
            assert_eq!(w.components(), zero.components());
        }
        let mu = LanglandsParameter::tempered(1.0, 2.0, -3.0).unwrap();
        let orbit = weyl_orbit(&mu);
        assert_eq!(orbit.len(), 6);
        for w in &orbit {
            let s: num_complex::Complex64 = w.components().iter().sum();
            assert!(s.norm() < 1e-12);
        }
        // orbit of an orbit member is the same set
        let again = weyl_orbit(&orbit[3]);
        for w in &again {
            assert!(orbit.iter().any(|o| o.components() == w.components()));
        }
    }

    #[test]
    fn h_nonnegative_and_weyl_invariant() {
        let cfg = generic_config(40.0, 0.2, 2);
        let points = [
            [5.0, -2.0, -3.0],
            [10.7, 10.7, -21.4],
            [40.0 / 14.0_f64.sqrt(), 80.0 / 14.0_f64.sqrt(), -120.0 / 14.0_f64.sqrt()],
        ];
        for u in points {
            let mu = LanglandsParameter::tempered(u[0], u[1], u[2]).unwrap();
            let h = h_test(&mu, &cfg);
            assert!(h >= 0.0);
            for w in weyl_orbit(&mu) {
                let hw = h_test(&w, &cfg);
                let rel = (hw - h).abs() / h.abs().max(1e-300);
                assert!(rel <= 1e-12, "rel = {rel}");
            }
        }
    }

    #[test]
    fn h_at_center_dominates_p_squared() {
        let cfg = generic_config(40.0, 0.2, 2);
        let h0 = h_test(cfg.mu0(), &cfg);
        let c = cfg.mu0().components();
        let p0 = p_polynomial([c[0].im, c[1].im, c[2].im], &cfg);
        assert!(h0 >= p0 * p0);
    }

    #[test]
    fn density_examples() {
        let zero = LanglandsParameter::tempered(0.0, 0.0, 0.0).unwrap();
        assert_eq!(spec_density(&zero).unwrap(), 0.0);

        let mu = LanglandsParameter::tempered(1.0, 1.0, -2.0).unwrap();
        let d = spec_density(&mu).unwrap();
        let v = hyperplane_nu([1.0, 1.0, -2.0]);
        let mut expect = 1.0;
        for &vj in &v {
            expect *= 3.0 * vj.abs() * (1.5 * std::f64::consts::PI * vj.abs()).tanh();
        }
        assert!((d - expect).abs() < 1e-12);
        // the printed product is nonpositive on the tempered plane
        let mu_generic = LanglandsParameter::tempered(2.0, 5.0, -7.0).unwrap();
        assert!(spec_density_signed(&mu_generic).unwrap() <= 0.0);
    }

    #[test]
    fn density_saturates_linearly() {
        let mu = LanglandsParameter::tempered(30.0, 70.0, -100.0).unwrap();
        let d = spec_density(&mu).unwrap();
        let v = hyperplane_nu([30.0, 70.0, -100.0]);
        let linear: f64 = v.iter().map(|vj| 3.0 * vj.abs()).product();
        assert!((d / linear - 1.0).abs() < 1e-9);
    }

    #[test]
    fn density_weyl_invariant() {
        let mu = LanglandsParameter::tempered(2.0, 5.0, -7.0).unwrap();
        let d = spec_density(&mu).unwrap();
        for w in weyl_orbit(&mu) {
            let dw = spec_density(&w).unwrap();
            assert!((dw - d).abs() / d <= 1e-12);
        }
    }

    #[test]
    fn mass_quadrature_stability() {
        let cfg = generic_config(50.0, 0.2, 1);
        let quad = QuadratureSpec::default_for(&cfg);
        let base = compute_h(&cfg, &quad).unwrap();
        assert!(base.value > 0.0);

        let wide = QuadratureSpec {
            spacing: quad.spacing,
            cutoff: 2.0 * quad.cutoff,
        };
        let widened = compute_h(&cfg, &wide).unwrap();
        assert!((widened.value - base.value).abs() / base.value < 1e-3);

        let fine = QuadratureSpec {
            spacing: quad.spacing / 2.0,
            cutoff: quad.cutoff,
        };
        let refined = compute_h(&cfg, &fine).unwrap();
        assert!((refined.value - base.value).abs() / base.value < 0.01);

        assert!(matches!(
            compute_h(
                &cfg,
                &QuadratureSpec {
                    spacing: quad.spacing,
                    cutoff: cfg.bandwidth(),
                }
            ),
            Err(SpecError::CutoffTooSmall { .. })
        ));
    }

    #[test]
    fn quadrature_deterministic() {
        let cfg = generic_config(50.0, 0.2, 1);
        let quad = QuadratureSpec::default_for(&cfg);
        let a = compute_h(&cfg, &quad).unwrap();
        let b = compute_h(&cfg, &quad).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn predictor_diagonal_structure() {
        let cfg = generic_config(50.0, 0.2, 1);
        let diag = diagonal_predictor(1, 1, 1, 1, &cfg, 0.01).unwrap();
        assert!(diag.main > 0.0);
        let off = diagonal_predictor(2, 1, 1, 1, &cfg, 0.01).unwrap();
        assert_eq!(off.main, 0.0);
        assert!(off.envelope > 0.0);
    }

    #[test]
    fn predictor_crossover() {
        let cfg = generic_config(100.0, 0.2, 1);
        let cross = envelope_crossover(&cfg, 0.01).unwrap();
        if cross.is_finite() && cross > 1.0 && cross < 1e18 {
            let below = diagonal_predictor(1, 1, 1, 1, &cfg, 0.01).unwrap();
            assert!(below.negligible);
            // a product just past the crossover is no longer negligible
            let p = cross.ceil() as u64 + 1;
            let above = diagonal_predictor(p, 1, 1, 1, &cfg, 0.01).unwrap();
            assert!(!above.negligible);
        }
    }
}
