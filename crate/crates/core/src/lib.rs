//! Analysis on the ring of m-adic numbers `Q_m` and simulation of m-adic
//! random walks.
//!
//! The crate is organised bottom-up:
//!
//! - [`number`]: truncated m-adic arithmetic, the pseudonorm and the additive
//!   character `chi_m(kx) = exp(2 pi i {kx})`.
//! - [`haar`]: Haar measure of balls and spheres and closed-form integrals of
//!   radial and character integrands.
//! - [`fourier`]: exact Fourier analysis of locally constant functions.
//! - [`levy`]: Levy-Khinchine symbols, the Vladimirov kernel and the master
//!   equation.
//! - [`ctrw`]: continuous-time random walks, Monte Carlo and Laplace-Fourier
//!   domain identities.
//! - [`special`] and [`fractional`]: Mittag-Leffler evaluation and the
//!   fractional-time random walk with its survival asymptotics.
//! - [`cli`]: the batch command-line front end used by the `madic` binary.

pub mod cli;
pub mod ctrw;
pub mod error;
pub mod fourier;
pub mod fractional;
pub mod haar;
pub mod levy;
pub mod number;
pub mod quadrature;
pub mod special;

pub use error::{Error, Result};
pub use number::{character, FractionalPart, MadicNumber, UnitComplex, DEFAULT_PRECISION};
