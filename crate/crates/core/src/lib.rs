//! Gaussian prime races.
//!
//! The crate streams rational primes with a segmented sieve, decomposes every
//! split prime `p = a² + 4b²` into its generator normalized modulo `(2+2i)`,
//! and runs the angle races `D₁`, `D₂`, `E_φ`, `F_φ` along the stream. On the
//! theoretical side it provides the cosine coefficients of the step test
//! functions, functional-equation signs of the two Hecke character families,
//! the mean values of the limiting distributions, and a simulator for the
//! truncated limiting logarithmic distribution built from zero data.
//!
//! Module map:
//!
//! * [`gint`]: exact Gaussian integers and generator normalization.
//! * [`decomp`]: `p = a² + 4b²` decomposition and [`AnglePrime`].
//! * [`sieve`]: segmented odd-only sieve.
//! * [`pipeline`]: parallel sieve + decomposition with an ordered consumer.
//! * [`race`]: race accumulators, logarithmic densities, `Li`, histograms.
//! * [`fourier`]: cosine coefficients, the block exponential sum, principal values.
//! * [`hecke`]: conductors, root numbers, orders at `s = ½` and `s = 1`, mean values.
//! * [`zdist`]: zero data, aggregated orders and the limiting distribution.

pub mod decomp;
pub mod error;
pub mod fmt;
pub mod fourier;
pub mod gint;
pub mod hecke;
pub mod numerics;
pub mod pipeline;
pub mod quad;
pub mod race;
pub mod sieve;
pub mod zdist;

pub use decomp::{angle_prime, sqrt_minus_one, two_squares, AnglePrime};
pub use error::Error;
pub use fourier::{FourierKind, FourierSpec, Kernel};
pub use gint::GaussInt;
pub use hecke::{CharacterInfo, Family, MeanValue, RankModel};
pub use pipeline::PrimeEvent;
pub use race::{Checkpoint, HistogramSpec, RaceConfig, RaceRunner, RaceSeries};
pub use sieve::SieveConfig;
pub use zdist::{AggregatedOrders, DistSummary, ZeroDatum};
