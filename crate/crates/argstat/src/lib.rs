//! Argument statistics for GL(3) L-functions.
//!
//! The crate is organized around the pipeline that takes Hecke data at the
//! primes to the distribution of the argument function S(t) over a spectral
//! family:
//!
//! - [`forms`]: Langlands/spectral parameter coordinates, admissibility and
//!   the dual-form involution.
//! - [`satake`]: local roots at a prime and the power sums C(p^k).
//! - [`hecke`]: exact single-prime Hecke eigenvalue algebra (Pieri
//!   multiplication, power expansions, support sets).
//! - [`smoothing`]: von Mangoldt weights, the smoothed cutoff, truncated
//!   Dirichlet sums of -L'/L and zero-dependent abscissae.
//! - [`zeta`]: an Euler-Maclaurin zeta engine plus derived critical-line
//!   ordinates, used as the computable oracle backend.
//! - [`sfapprox`]: the argument function S(t) by continuous phase variation,
//!   its Dirichlet-polynomial approximation, and consistency checkers.
//! - [`specweight`]: the Weyl-symmetrized test function, spectral measure
//!   quadrature and the diagonal main-term predictor.
//! - [`su3`] / [`familysim`]: Haar-SU(3) coefficient sampling and Monte Carlo
//!   verification of the Gaussian moment asymptotics.
//! - [`io`]: file formats, canonical serialization, manifests and reports.

pub mod familysim;
pub mod forms;
pub mod hecke;
pub mod io;
pub mod primes;
pub mod satake;
pub mod sfapprox;
pub mod smoothing;
pub mod specweight;
pub mod su3;
pub mod zeta;

pub use forms::{FormRecord, LanglandsParameter, SpectralParameter};
pub use satake::SatakeTriple;
pub use smoothing::{SmoothingConfig, ZeroSet};
