//! Haar sampling of SU(3) conjugacy classes and exact character moments.
//!
//! A conjugacy class is a pair of eigenvalue angles (theta1, theta2) with
//! theta3 = -theta1 - theta2; Haar measure projects to the density
//! |Delta|^2 / (6 (2 pi)^2) on the angle square, where
//! |Delta|^2 = 64 sin^2((t1-t2)/2) sin^2((2 t1+t2)/2) sin^2((t1+2 t2)/2).
//! The moment oracle integrates trigonometric polynomials with the periodic
//! trapezoid rule, which is exact once the grid resolves the degree.

use num_complex::Complex64;
use rand::Rng;

use crate::satake::{SatakeError, SatakeTriple};

/// |Delta(theta)|^2, bounded by 64.
pub fn weyl_density(theta1: f64, theta2: f64) -> f64 {
    let s1 = (0.5 * (theta1 - theta2)).sin();
    let s2 = (0.5 * (2.0 * theta1 + theta2)).sin();
    let s3 = (0.5 * (theta1 + 2.0 * theta2)).sin();
    64.0 * s1 * s1 * s2 * s2 * s3 * s3
}

/// Haar-distributed eigenvalue angles via rejection from the flat proposal
/// on the angle square; the envelope constant 64 majorizes the density.
pub fn sample_angles<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    loop {
        let t1 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let t2 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let u: f64 = rng.gen_range(0.0..64.0);
        if u < weyl_density(t1, t2) {
            return (t1, t2);
        }
    }
}

/// The trace of the sampled class (the standard character).
pub fn trace_from_angles(theta1: f64, theta2: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta1)
        + Complex64::from_polar(1.0, theta2)
        + Complex64::from_polar(1.0, -theta1 - theta2)
}

/// A Haar-random Satake triple at the given prime: three unit-modulus roots
/// with product exactly 1.
pub fn sample_su3<R: Rng + ?Sized>(rng: &mut R, prime: u64) -> Result<SatakeTriple, SatakeError> {
    let (t1, t2) = sample_angles(rng);
    SatakeTriple::new(
        [
            Complex64::from_polar(1.0, t1),
            Complex64::from_polar(1.0, t2),
            Complex64::from_polar(1.0, -t1 - t2),
        ],
        prime,
    )
}

/// Haar expectation of f(trace) by Weyl integration on a periodic grid.
pub fn weyl_expectation<F: Fn(Complex64) -> Complex64>(f: F, grid: usize) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let step = 2.0 * std::f64::consts::PI / grid as f64;
    for i in 0..grid {
        let t1 = -std::f64::consts::PI + i as f64 * step;
        for j in 0..grid {
            let t2 = -std::f64::consts::PI + j as f64 * step;
            sum += f(trace_from_angles(t1, t2)) * weyl_density(t1, t2);
        }
    }
    sum * step * step / (6.0 * 4.0 * std::f64::consts::PI * std::f64::consts::PI)
}

/// E[a^m conj(a)^n] for the standard character a; exact (up to rounding) for
/// m + n up to a few dozen since the integrand is a trig polynomial.
pub fn weyl_moment(m: u32, n: u32) -> Complex64 {
    let grid = 64 + 4 * (m + n) as usize;
    weyl_expectation(
        |a| a.powu(m) * a.conj().powu(n),
        grid,
    )
}
