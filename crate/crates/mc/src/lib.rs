//! Brute-force oracles for the closed-form liquidity premium bounds.
//!
//! Everything runs on the changed clock of the forward measure, where each
//! forward zero-coupon is a driftless log-normal in one shared Brownian
//! driver. Path maxima are sampled exactly per step from the Brownian bridge.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod forward;
mod lower;
mod shepp;
mod sim;
mod survival;

pub use forward::{simulate_max_forward, ForwardMax};
pub use lower::{mc_pi_lower, sample_drifted_extremum};
pub use shepp::{shepp_density, shepp_integral};
pub use sim::{bridge_max, LevyGrid, McError, OracleEstimate, SimConfig};
pub use survival::{oracle_survival, oracle_zeta_extraction};
