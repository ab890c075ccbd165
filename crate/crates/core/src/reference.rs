//! Worked reference models and a verifier that recomputes every value
//! and preference stated about them.
//!
//! The published tables only fix utilities at a few prizes. Where a value
//! is needed at the worst or best prize it was not given, the tables below
//! extend them so that `u` and `v` share both endpoints and stay strictly
//! increasing with `v < u` inside.
//!
//! Printed values are carried alongside computed ones. The verifier never
//! substitutes a printed number for a computed one; a mismatch is reported
//! as a discrepancy, and a contradicted preference as a failure.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::audit::{detect_allais, detect_betweenness_violation, AllaisClass};
use crate::lottery::{Lottery, OutcomeSpace};
use crate::model::{EcuModel, Preference, UtilityCurve, INDIFFERENCE_TOLERANCE};

fn binary(w: f64, b: f64, d: f64, tau: f64, u: &[(f64, f64)], v: &[(f64, f64)]) -> EcuModel {
    let space = OutcomeSpace::new(w, b).expect("reference space");
    EcuModel::binary(space, d, tau, UtilityCurve::table(u.to_vec()), UtilityCurve::table(v.to_vec()))
        .expect("reference model is a valid binary ECU")
}

/// Risk attitude that flips with the size of the worst prize:
/// `X = [0, 300]`, `d = 20`, `τ = 0.75`.
pub fn disappointment_reversal() -> EcuModel {
    binary(
        0.0,
        300.0,
        20.0,
        0.75,
        &[(0.0, 0.0), (90.0, 15.0), (100.0, 20.0), (150.0, 50.0), (200.0, 60.0), (300.0, 100.0)],
        &[(0.0, 0.0), (90.0, 8.0), (100.0, 10.0), (150.0, 25.0), (200.0, 50.0), (300.0, 100.0)],
    )
}

/// Common-consequence reversal: `X = [0, 3000]`, `d = 10`, `τ = 0.5`.
pub fn common_consequence() -> EcuModel {
    binary(
        0.0,
        3000.0,
        10.0,
        0.5,
        &[(0.0, -1000.0), (10.0, 0.0), (2400.0, 2600.0), (2500.0, 2615.0), (3000.0, 3000.0)],
        &[(0.0, -1000.0), (10.0, -1.0), (2400.0, 2400.0), (2500.0, 2500.0), (3000.0, 3000.0)],
    )
}

/// Common-ratio reversal: `X = [0, 7000]`, `d = 1000`, `τ = 0.9`.
pub fn common_ratio() -> EcuModel {
    binary(
        0.0,
        7000.0,
        1000.0,
        0.9,
        &[(0.0, 0.0), (1000.0, 2.0), (3000.0, 25.0), (6000.0, 40.0), (7000.0, 50.0)],
        &[(0.0, 0.0), (1000.0, 1.0), (3000.0, 10.0), (6000.0, 30.0), (7000.0, 50.0)],
    )
}

/// The two readings of the optimistic utility at 100 in the betweenness
/// model: the stated `u(100) = 200`, or `u(100) = 20` which is what the
/// published mixture value was computed with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reading {
    /// `u(100) = 20`.
    AsComputed,
    /// `u(100) = 200`; the best prize is lifted to 250 so the family stays
    /// bounded by `u(b)`.
    AsStated,
}

/// Betweenness violation: `X = [0, 200]`, `d = 30`, `τ = 0.3`.
pub fn betweenness_violation(reading: Reading) -> EcuModel {
    match reading {
        Reading::AsComputed => binary(
            0.0,
            200.0,
            30.0,
            0.3,
            &[(0.0, 0.0), (20.0, 8.0), (50.0, 10.0), (100.0, 20.0), (200.0, 40.0)],
            &[(0.0, 0.0), (20.0, 4.0), (100.0, 12.0), (200.0, 40.0)],
        ),
        Reading::AsStated => binary(
            0.0,
            200.0,
            30.0,
            0.3,
            &[(0.0, 0.0), (20.0, 8.0), (50.0, 10.0), (100.0, 200.0), (200.0, 250.0)],
            &[(0.0, 0.0), (20.0, 4.0), (100.0, 12.0), (200.0, 250.0)],
        ),
    }
}

/// All reference models with their names, in a fixed order.
pub fn all_models() -> Vec<(&'static str, EcuModel)> {
    vec![
        ("disappointment_reversal", disappointment_reversal()),
        ("common_consequence", common_consequence()),
        ("common_ratio", common_ratio()),
        ("betweenness_violation", betweenness_violation(Reading::AsComputed)),
    ]
}

/// How a recomputed claim compares with its published form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Status {
    /// Preference and every printed value reproduced.
    Pass,
    /// Preference reproduced, but a printed value differs from the
    /// computed one.
    PassWithDiscrepancy,
    /// The computed preference contradicts the published one.
    FailAsPrinted,
}

/// A lottery with its computed value and, if published, its printed value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Valued {
    pub name: String,
    pub lottery: String,
    pub computed: f64,
    pub printed: Option<f64>,
}

impl Valued {
    fn discrepant(&self) -> bool {
        self.printed.is_some_and(|p| (p - self.computed).abs() > 1e-9 * (1.0 + p.abs()))
    }
}

/// One published pairwise claim, recomputed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub first: Valued,
    pub second: Valued,
    pub claimed: Preference,
    pub computed: Preference,
    pub status: Status,
}

/// Verification outcome for one reference model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleReport {
    pub name: String,
    pub comparisons: Vec<Comparison>,
    pub notes: Vec<String>,
}

impl ExampleReport {
    /// Worst status over all comparisons.
    pub fn status(&self) -> Status {
        let statuses = self.comparisons.iter().map(|c| c.status);
        if statuses.clone().any(|s| s == Status::FailAsPrinted) {
            Status::FailAsPrinted
        } else if statuses.clone().any(|s| s == Status::PassWithDiscrepancy) {
            Status::PassWithDiscrepancy
        } else {
            Status::Pass
        }
    }
}

struct Claim<'a> {
    first: (&'a str, &'a [(f64, f64)], Option<f64>),
    second: (&'a str, &'a [(f64, f64)], Option<f64>),
    claimed: Preference,
}

fn check(model: &EcuModel, claim: Claim<'_>) -> Comparison {
    let value = |(name, pairs, printed): (&str, &[(f64, f64)], Option<f64>)| {
        let lottery = Lottery::new(pairs.iter().copied(), model.space).expect("reference lottery");
        Valued {
            name: name.to_string(),
            lottery: lottery.to_string(),
            computed: model.evaluate(&lottery).expect("reference lottery evaluates"),
            printed,
        }
    };
    let first = value(claim.first);
    let second = value(claim.second);
    let computed = Preference::from_values(first.computed, second.computed, INDIFFERENCE_TOLERANCE);
    let status = if computed != claim.claimed {
        Status::FailAsPrinted
    } else if first.discrepant() || second.discrepant() {
        Status::PassWithDiscrepancy
    } else {
        Status::Pass
    };
    Comparison { first, second, claimed: claim.claimed, computed, status }
}

fn lottery(model: &EcuModel, pairs: &[(f64, f64)]) -> Lottery {
    Lottery::new(pairs.iter().copied(), model.space).expect("reference lottery")
}

/// Recomputes every claim about the disappointment-reversal model.
pub fn verify_disappointment_reversal() -> ExampleReport {
    let m = disappointment_reversal();
    let comparisons = vec![
        check(&m, Claim {
            first: ("p", &[(0.0, 0.9), (100.0, 0.05), (200.0, 0.05)], Some(3.0)),
            second: ("q", &[(0.0, 0.9), (150.0, 0.1)], Some(0.25)),
            claimed: Preference::First,
        }),
        check(&m, Claim {
            first: ("p'", &[(90.0, 0.9), (100.0, 0.05), (200.0, 0.05)], Some(17.5)),
            second: ("q'", &[(90.0, 0.9), (150.0, 0.1)], Some(22.5)),
            claimed: Preference::Second,
        }),
    ];
    ExampleReport {
        name: "disappointment_reversal".into(),
        comparisons,
        notes: vec![
            "worst prize 0: the riskier three-outcome lottery is preferred".into(),
            "worst prize 90: the two-outcome lottery is preferred".into(),
        ],
    }
}

/// Recomputes every claim about the common-consequence model.
pub fn verify_common_consequence() -> ExampleReport {
    let m = common_consequence();
    let p = [(2500.0, 0.33), (0.0, 0.67)];
    let q = [(2400.0, 0.34), (0.0, 0.66)];
    let p2 = [(2500.0, 0.33), (2400.0, 0.66), (0.0, 0.01)];
    let q2 = [(2400.0, 1.0)];
    let comparisons = vec![
        check(&m, Claim { first: ("p", &p, None), second: ("q", &q, None), claimed: Preference::First }),
        check(&m, Claim { first: ("q'", &q2, None), second: ("p'", &p2, None), claimed: Preference::First }),
    ];
    let mut notes = Vec::new();
    let allais = detect_allais(&m, (&lottery(&m, &p), &lottery(&m, &q)), (&lottery(&m, &p2), &lottery(&m, &q2)), INDIFFERENCE_TOLERANCE);
    notes.push(alloc::format!("choice pattern across the two pairs: {:?}", allais.class));
    ExampleReport { name: "common_consequence".into(), comparisons, notes }
}

/// Recomputes every claim about the common-ratio model.
pub fn verify_common_ratio() -> ExampleReport {
    let m = common_ratio();
    let a = [(6000.0, 0.001), (0.0, 0.999)];
    let b = [(3000.0, 0.002), (0.0, 0.998)];
    let c = [(3000.0, 0.9), (0.0, 0.1)];
    let e = [(6000.0, 0.45), (0.0, 0.55)];
    let comparisons = vec![
        check(&m, Claim { first: ("r1", &a, None), second: ("s1", &b, None), claimed: Preference::First }),
        check(&m, Claim { first: ("s2", &c, None), second: ("r2", &e, None), claimed: Preference::First }),
    ];
    let allais = detect_allais(&m, (&lottery(&m, &a), &lottery(&m, &b)), (&lottery(&m, &e), &lottery(&m, &c)), INDIFFERENCE_TOLERANCE);
    let mut notes = vec![alloc::format!("choice pattern across the two pairs: {:?}", allais.class)];
    if allais.class == AllaisClass::NoReversal {
        notes.push("expected a reversal between the two pairs".into());
    }
    ExampleReport { name: "common_ratio".into(), comparisons, notes }
}

/// Recomputes the betweenness violation under one reading of `u(100)`.
pub fn verify_betweenness(reading: Reading) -> ExampleReport {
    let m = betweenness_violation(reading);
    let p = [(50.0, 1.0)];
    let q = [(100.0, 0.5), (20.0, 0.5)];
    let mix = [(100.0, 0.2), (50.0, 0.6), (20.0, 0.2)];
    let comparisons = vec![
        check(&m, Claim { first: ("p", &p, Some(10.0)), second: ("q", &q, Some(8.0)), claimed: Preference::First }),
        check(&m, Claim { first: ("0.6p+0.4q", &mix, Some(11.6)), second: ("p", &p, Some(10.0)), claimed: Preference::First }),
    ];
    let alphas: Vec<f64> = (1..100).map(|i| i as f64 / 100.0).collect();
    let witnesses = detect_betweenness_violation(&m, &lottery(&m, &p), &lottery(&m, &q), &alphas, INDIFFERENCE_TOLERANCE);
    let notes = vec![alloc::format!(
        "betweenness fails at {} of {} mixing weights, including 0.6: {}",
        witnesses.len(),
        alphas.len(),
        witnesses.contains(&0.6)
    )];
    let name = match reading {
        Reading::AsComputed => "betweenness_violation (u(100) = 20)",
        Reading::AsStated => "betweenness_violation (u(100) = 200)",
    };
    ExampleReport { name: name.into(), comparisons, notes }
}

/// Runs every verifier in a fixed order.
pub fn verify_all() -> Vec<ExampleReport> {
    vec![
        verify_disappointment_reversal(),
        verify_common_consequence(),
        verify_common_ratio(),
        verify_betweenness(Reading::AsComputed),
        verify_betweenness(Reading::AsStated),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Family;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn reference_models_are_contextual() {
        let pis: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        for (name, m) in all_models().into_iter().chain([("as_stated", betweenness_violation(Reading::AsStated))]) {
            let xs: Vec<f64> = (0..=100).map(|i| m.space.worst() + (m.space.best() - m.space.worst()) * i as f64 / 100.0).collect();
            assert!(m.validate_contextual(&pis, &xs).is_empty(), "{name}");
            assert!(m.check_fosd_conditions(&pis, &xs).holds(), "{name}");
            assert!(matches!(m.family, Family::Binary { .. }));
        }
    }

    #[test]
    fn disappointment_reversal_values() {
        let r = verify_disappointment_reversal();
        let [c1, c2] = &r.comparisons[..] else { panic!() };
        assert!(close(c1.first.computed, 3.0) && close(c1.second.computed, 2.5));
        assert!(close(c2.first.computed, 17.5) && close(c2.second.computed, 18.5));
        assert_eq!(c1.status, Status::PassWithDiscrepancy);
        assert_eq!(c2.status, Status::PassWithDiscrepancy);
        assert!(!c1.first.discrepant() && c1.second.discrepant());
    }

    #[test]
    fn common_consequence_first_claim_fails() {
        let r = verify_common_consequence();
        let [c1, c2] = &r.comparisons[..] else { panic!() };
        assert!(close(c1.first.computed, 155.0) && close(c1.second.computed, 156.0));
        assert_eq!(c1.status, Status::FailAsPrinted);
        assert!(close(c2.first.computed, 2600.0) && close(c2.second.computed, 2568.95));
        assert_eq!(c2.status, Status::Pass);
        assert_eq!(r.status(), Status::FailAsPrinted);
    }

    #[test]
    fn common_ratio_reversal() {
        let r = verify_common_ratio();
        let [c1, c2] = &r.comparisons[..] else { panic!() };
        assert!(close(c1.first.computed, 0.03) && close(c1.second.computed, 0.02));
        assert!(close(c2.first.computed, 22.5) && close(c2.second.computed, 18.0));
        assert_eq!(r.status(), Status::Pass);
        assert_eq!(r.notes.len(), 1);
    }

    #[test]
    fn betweenness_under_both_readings() {
        let a = verify_betweenness(Reading::AsComputed);
        assert_eq!(a.comparisons[1].first.computed, 11.6);
        assert_eq!(a.status(), Status::Pass);
        let b = verify_betweenness(Reading::AsStated);
        assert!(close(b.comparisons[1].first.computed, 47.6));
        assert_eq!(b.status(), Status::PassWithDiscrepancy);
        for r in [a, b] {
            assert!(r.notes[0].ends_with("true"), "{}", r.notes[0]);
        }
    }
}
