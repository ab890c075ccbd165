//! Generators shared by the property suites.

#![allow(dead_code)]

use ecu_core::model::UtilityCurve;
use ecu_core::{EcuModel, Lottery, OutcomeSpace};
use proptest::prelude::*;
use rand::Rng;

pub fn space(w: f64, b: f64) -> OutcomeSpace {
    OutcomeSpace::new(w, b).unwrap()
}

/// Lotteries on integer prizes of `[0, top]` with up to `max_support`
/// outcomes and positive integer weights.
pub fn lottery(top: u32, max_support: usize) -> impl Strategy<Value = Lottery> {
    prop::collection::vec((0..=top, 1u32..=20), 1..=max_support).prop_map(move |items| {
        let total: u32 = items.iter().map(|&(_, w)| w).sum();
        let pairs: Vec<(f64, f64)> = items.iter().map(|&(x, w)| (x as f64, w as f64 / total as f64)).collect();
        Lottery::new(pairs, space(0.0, top as f64)).unwrap()
    })
}

/// A binary ECU on `space` with concave `u = U t^a`, convex `v = U t^c`
/// (so `v <= u` and both are increasing), a non-integer `d` in the middle
/// of the space and `τ` in `(0.05, 0.95)`.
pub fn random_binary<R: Rng + ?Sized>(rng: &mut R, space: OutcomeSpace) -> EcuModel {
    let (w, b) = (space.worst(), space.best());
    let d = w + (b - w) * rng.random_range(0.15..0.85);
    let d = if d.fract() == 0.0 { d + 0.5 } else { d };
    let tau = rng.random_range(0.05..0.95);
    let scale = rng.random_range(0.5..50.0);
    let a = rng.random_range(0.3..0.9);
    let c = rng.random_range(1.2..2.5);
    EcuModel::binary(
        space,
        d,
        tau,
        UtilityCurve::Power { low: 0.0, high: scale, exponent: a },
        UtilityCurve::Power { low: 0.0, high: scale, exponent: c },
    )
    .unwrap()
}
