//! Frequency-domain design toolkit for integer- and fractional-order
//! admittance controllers in physical human-robot interaction.
//!
//! The crate computes, for a controller family `Y(s) = 1/(m_F s^alpha + b_F)`
//! coupled to a robot model `G(s)`, a force filter `H(s)` and a bounded
//! human/environment impedance:
//!
//! * a transparency cost from the parasitic impedance `1/|G Y H|`,
//! * the worst-case vector margin `min |1 + L(jw)|` over impedance corners,
//! * maps of both objectives over the `(m_F, b_F)` parameter grid,
//! * Pareto fronts (exhaustive and weighted-sum), and
//! * constraint-driven design selection and front-dominance comparison.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. The `parallel` feature spreads map sweeps over a rayon pool; the
//! results are bit-identical to the serial path.
#![cfg_attr(not(feature = "std"), no_std)]
// Negated comparisons such as `!(x > 0.0)` deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod freqresp;
pub mod maps;
pub mod metrics;
pub mod pareto;
pub mod select;

pub use error::{Error, Result};
pub use num_complex::Complex64;
