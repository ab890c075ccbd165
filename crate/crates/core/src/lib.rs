//! Expected contextual utility (ECU) under risk.
//!
//! An ECU decision maker evaluates a simple lottery `r` with the utility
//! function indexed by the lottery's disappointment mass `π = r([w, d])`:
//! `V(r) = Σ r(x) · u_π(x)`. This crate provides
//!
//! * [`lottery`]: exact finite-support lottery algebra,
//! * [`model`]: binary, parametric and tabulated ECU families,
//! * [`audit`]: black-box axiom checks, threshold recovery and
//!   reconstruction of a tabulated representation from a preference oracle,
//! * [`geometry`]: Marschak–Machina triangle maps and two-prize indifference
//!   curves,
//! * [`experiment`]: the adaptive three-stage choice-list experiment,
//! * [`stats`]: switch analytics, exact binomial and Fisher tests, and a
//!   cluster-robust logit,
//! * [`reference`]: the worked reference models and their verification.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
// `!(x > 0.0)` style checks are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod audit;
pub mod experiment;
pub mod geometry;
pub mod lottery;
pub mod math;
pub mod model;
pub mod reference;
pub mod stats;

pub use lottery::{Lottery, LotteryError, OutcomeSpace};
pub use model::{EcuModel, Family, Preference, UtilityCurve};
