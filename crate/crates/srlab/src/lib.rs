//! Emulated stochastic rounding for parametric binary floating-point
//! formats, plus the forward-error bound machinery and desk-scale
//! experiments built on top of it.
//!
//! The crate is organized around a small pipeline:
//!
//! - [`fp`]: formats, exact intermediates, and rounding neighborhoods;
//! - [`sr`]: the two stochastic rounding modes (and deterministic nearest)
//!   with reproducible seeded streams, applied to +, -, *, /;
//! - [`integrate`] and [`horner`]: the two driver algorithms, constant
//!   rectangle integration and Horner polynomial evaluation, runnable
//!   under any mode;
//! - [`bounds`]: condition numbers, the worst-case bound, and the
//!   concentration-based probabilistic bound;
//! - [`chebyshev`]: exact-integer Chebyshev coefficients in z = x^2 and
//!   exact rational reference evaluation;
//! - [`stats`] and [`experiments`]: sample aggregation, CSV sweeps, and the
//!   self-check suites behind the `srlab` binary.
//!
//! Every stochastic path is keyed by `(master_seed, stream_id)`; identical
//! keys reproduce identical bits on any platform and any worker count.

pub mod bounds;
pub mod chebyshev;
pub mod error;
pub mod experiments;
pub mod fp;
pub mod horner;
pub mod integrate;
pub mod sr;
pub mod stats;
pub mod svg;

pub use error::{Error, Result};
pub use fp::{decompose, neighborhood, round_nearest, ExactValue, FloatFormat, Neighborhood};
pub use sr::{
    bias_up_or_down, expected_round, sr_add, sr_div, sr_mul, sr_round, sr_sub, up_probability,
    RngStream, SrMode,
};
