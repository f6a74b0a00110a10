//! Exact-arithmetic period recovery from phase-estimation samples.
//!
//! An unknown positive integer `r` produces samples `floor(N*k/r)` or
//! `ceil(N*k/r)` with `k` uniform in `[0, r)`. This crate recovers `r` from
//! two such samples by planting it as the shortest vector of a rank-2
//! lattice and running Gauss basis reduction, entirely in integer and
//! rational arithmetic. It also ships the standard continued-fractions
//! recovery as an independent baseline, a brute-force shortest-vector
//! oracle, a configurable sample simulator, and an end-to-end classical
//! factoring demo driven by order finding.
//!
//! Modules:
//! - [`numtheory`]: closest integer, sign, gcd, modular exponentiation,
//!   brute-force multiplicative order, exact parameter helpers.
//! - [`lattice`]: Gauss and relaxed Gauss reduction with traces, the
//!   iteration bound, and the enumeration oracle.
//! - [`sampler`]: deterministic, seedable simulation of measurement
//!   outcomes with an exact-rational noise model.
//! - [`recovery`]: lattice construction, `(k, l)` extraction, period
//!   estimation, and the verified retry loop.
//! - [`cf`]: continued-fraction convergents and the baseline recovery.
//! - [`factor`]: order-to-factor reduction and Monte Carlo harnesses.
//! - [`io`]: basis and document formats shared with the CLI.

pub mod cf;
pub mod error;
pub mod factor;
pub mod io;
pub mod lattice;
pub mod numtheory;
pub mod recovery;
pub mod sampler;

pub use error::{Error, Result};
