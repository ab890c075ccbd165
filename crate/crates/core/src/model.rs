//! ECU representations and their evaluation.
//!
//! A model is a disappointment threshold `d` plus a contextual family
//! `{u_π}`. A lottery with disappointment mass `π = r([w, d])` is valued
//! with `u_π`. Three family kinds are supported:
//!
//! * **binary**: `u` for `π <= τ` and `v` for `π > τ`,
//! * **parametric**: `u_π(x) = ((x - w)/(b - w))^(0.5 + π)`,
//! * **tabulated**: values on a `(π, x)` grid; piecewise-linear in `x`
//!   between knots, nearest declared `π` between contexts.
//!
//! `u_0` is undefined on `[w, d]` and `u_1` is undefined on `(d, b]`; the
//! evaluation never needs those cells because a lottery with `π = 0` has no
//! disappointing prize and one with `π = 1` has nothing else.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::lottery::{Lottery, LotteryError, OutcomeSpace};
use crate::math::powf;

/// Absolute tolerance on value differences below which `prefer` reports
/// indifference.
pub const INDIFFERENCE_TOLERANCE: f64 = 1e-9;

/// Slack on the `π <= τ` comparison of the binary family, so that a mass
/// of exactly `τ` assembled from rounded summands still selects `u`.
pub const CONTEXT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error(transparent)]
    Lottery(#[from] LotteryError),
    #[error("threshold d = {d} outside [{w}, {b}]")]
    ThresholdOutOfRange { d: f64, w: f64, b: f64 },
    #[error("tolerance threshold tau = {0} outside [0, 1]")]
    TauOutOfRange(f64),
    #[error("invalid utility curve: {0}")]
    BadCurve(String),
    #[error("utility curves disagree at the {which} prize: {a} vs {b}")]
    EndpointMismatch { which: &'static str, a: f64, b: f64 },
    #[error("pessimistic utility is not strictly below the optimistic one at x = {x}")]
    NotBelow { x: f64 },
    #[error("u_{pi}({x}) is undefined for this family")]
    Undefined { pi: f64, x: f64 },
    #[error("lottery space does not match the model space")]
    SpaceMismatch,
}

/// A utility function over prizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UtilityCurve {
    /// Piecewise-linear interpolation through `(prize, utility)` knots.
    Table { knots: Vec<(f64, f64)> },
    /// `low + (high - low) * ((x - w)/(b - w))^exponent`.
    Power { low: f64, high: f64, exponent: f64 },
}

impl UtilityCurve {
    pub fn table(knots: impl Into<Vec<(f64, f64)>>) -> Self {
        UtilityCurve::Table { knots: knots.into() }
    }

    pub fn value(&self, x: f64, space: OutcomeSpace) -> Option<f64> {
        match self {
            UtilityCurve::Table { knots } => interpolate(knots, x),
            UtilityCurve::Power { low, high, exponent } => {
                let t = space.normalize(x);
                if !(0.0..=1.0).contains(&t) {
                    return None;
                }
                Some(low + (high - low) * powf(t, *exponent))
            }
        }
    }

    /// Checks the curve covers `[w, b]` and is strictly increasing.
    pub fn validate(&self, space: OutcomeSpace) -> Result<(), ModelError> {
        match self {
            UtilityCurve::Table { knots } => {
                if knots.len() < 2 {
                    return Err(ModelError::BadCurve("a table needs at least two knots".into()));
                }
                if knots[0].0 != space.worst() || knots[knots.len() - 1].0 != space.best() {
                    return Err(ModelError::BadCurve("table must start at w and end at b".into()));
                }
                for pair in knots.windows(2) {
                    if !(pair[1].0 > pair[0].0) {
                        return Err(ModelError::BadCurve("knot prizes must be strictly ascending".into()));
                    }
                    if !(pair[1].1 > pair[0].1) {
                        return Err(ModelError::BadCurve("utility must be strictly increasing".into()));
                    }
                }
                Ok(())
            }
            UtilityCurve::Power { low, high, exponent } => {
                if !(high > low) || !(*exponent > 0.0) || !exponent.is_finite() {
                    return Err(ModelError::BadCurve("power curve needs high > low and exponent > 0".into()));
                }
                Ok(())
            }
        }
    }

    /// Prizes where the curve bends; used to build check grids.
    fn knots(&self) -> impl Iterator<Item = f64> + '_ {
        let table = match self {
            UtilityCurve::Table { knots } => Some(knots.iter().map(|&(x, _)| x)),
            UtilityCurve::Power { .. } => None,
        };
        table.into_iter().flatten()
    }
}

fn interpolate(knots: &[(f64, f64)], x: f64) -> Option<f64> {
    let first = knots.first()?;
    let last = knots.last()?;
    if x < first.0 || x > last.0 {
        return None;
    }
    let i = knots.partition_point(|&(k, _)| k < x);
    if knots[i].0 == x {
        return Some(knots[i].1);
    }
    let (x0, y0) = knots[i - 1];
    let (x1, y1) = knots[i];
    Some(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
}

/// Utility values on a `(π, x)` grid.
///
/// Cells may be `None` where the family is undefined. Lookup picks the
/// nearest declared context and interpolates linearly between prize knots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedFamily {
    contexts: Vec<f64>,
    prizes: Vec<f64>,
    values: Vec<Option<f64>>,
}

impl TabulatedFamily {
    pub fn new(contexts: Vec<f64>, prizes: Vec<f64>, values: Vec<Option<f64>>) -> Result<Self, ModelError> {
        if contexts.is_empty() || prizes.is_empty() {
            return Err(ModelError::BadCurve("empty table grid".into()));
        }
        if values.len() != contexts.len() * prizes.len() {
            return Err(ModelError::BadCurve("table size does not match its grids".into()));
        }
        let ascending = |g: &[f64]| g.windows(2).all(|w| w[0] < w[1]);
        if !ascending(&contexts) || !ascending(&prizes) {
            return Err(ModelError::BadCurve("table grids must be strictly ascending".into()));
        }
        Ok(Self { contexts, prizes, values })
    }

    pub fn contexts(&self) -> &[f64] {
        &self.contexts
    }

    pub fn prizes(&self) -> &[f64] {
        &self.prizes
    }

    /// Cell value at grid indices.
    pub fn cell(&self, context: usize, prize: usize) -> Option<f64> {
        self.values[context * self.prizes.len() + prize]
    }

    fn nearest_context(&self, pi: f64) -> usize {
        let i = self.contexts.partition_point(|&c| c < pi);
        if i == 0 {
            0
        } else if i == self.contexts.len() || pi - self.contexts[i - 1] <= self.contexts[i] - pi {
            i - 1
        } else {
            i
        }
    }

    pub fn value(&self, pi: f64, x: f64) -> Option<f64> {
        let row = self.nearest_context(pi);
        let n = self.prizes.len();
        if x < self.prizes[0] || x > self.prizes[n - 1] {
            return None;
        }
        let i = self.prizes.partition_point(|&k| k < x);
        if self.prizes[i] == x {
            return self.cell(row, i);
        }
        let (x0, x1) = (self.prizes[i - 1], self.prizes[i]);
        let y0 = self.cell(row, i - 1)?;
        let y1 = self.cell(row, i)?;
        Some(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
    }
}

/// A contextual family of utility functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    Binary { tau: f64, u: UtilityCurve, v: UtilityCurve },
    Parametric,
    Tabulated(TabulatedFamily),
}

impl Family {
    /// `u_π(x)`, ignoring the domain rules tied to `d`.
    pub fn utility(&self, pi: f64, x: f64, space: OutcomeSpace) -> Option<f64> {
        match self {
            Family::Binary { tau, u, v } => {
                if pi <= tau + CONTEXT_SLACK {
                    u.value(x, space)
                } else {
                    v.value(x, space)
                }
            }
            Family::Parametric => {
                if !space.contains(x) || !(0.0..=1.0).contains(&pi) {
                    return None;
                }
                Some(parametric_u(pi, x, space))
            }
            Family::Tabulated(table) => table.value(pi, x),
        }
    }
}

/// `((x - w)/(b - w))^(0.5 + π)`.
pub fn parametric_u(pi: f64, x: f64, space: OutcomeSpace) -> f64 {
    powf(space.normalize(x), 0.5 + pi)
}

/// Whether `u_π(x)` exists under the domain rules for threshold `d`.
#[inline]
pub fn in_domain(pi: f64, x: f64, d: f64) -> bool {
    !(pi == 0.0 && x <= d) && !(pi == 1.0 && x > d)
}

/// Outcome of a pairwise comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preference {
    First,
    Second,
    Indifferent,
}

impl Preference {
    pub fn from_values(a: f64, b: f64, tol: f64) -> Self {
        if a - b > tol {
            Preference::First
        } else if b - a > tol {
            Preference::Second
        } else {
            Preference::Indifferent
        }
    }
}

/// An ECU representation: threshold `d` and a contextual family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcuModel {
    pub space: OutcomeSpace,
    pub d: f64,
    pub family: Family,
}

impl EcuModel {
    /// Builds a model after structural checks only (threshold range, `τ`
    /// range, curve shape). Contextual conditions are checked separately by
    /// [`validate_contextual`].
    pub fn new(space: OutcomeSpace, d: f64, family: Family) -> Result<Self, ModelError> {
        let model = Self { space, d, family };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        self.space.validate()?;
        if !(self.space.contains(self.d)) {
            return Err(ModelError::ThresholdOutOfRange { d: self.d, w: self.space.worst(), b: self.space.best() });
        }
        if let Family::Binary { tau, u, v } = &self.family {
            if !(0.0..=1.0).contains(tau) {
                return Err(ModelError::TauOutOfRange(*tau));
            }
            u.validate(self.space)?;
            v.validate(self.space)?;
        }
        Ok(())
    }

    /// A binary ECU with optimistic `u` and pessimistic `v`.
    ///
    /// Requires `u(w) = v(w)`, `u(b) = v(b)` and `v(x) < u(x)` on the open
    /// interval, checked on both curves' knots, their midpoints and a
    /// uniform grid.
    pub fn binary(space: OutcomeSpace, d: f64, tau: f64, u: UtilityCurve, v: UtilityCurve) -> Result<Self, ModelError> {
        let model = Self::new(space, d, Family::Binary { tau, u, v })?;
        let Family::Binary { u, v, .. } = &model.family else { unreachable!() };
        let (w, b) = (space.worst(), space.best());
        let at = |c: &UtilityCurve, x: f64| c.value(x, space).ok_or(ModelError::Undefined { pi: 0.0, x });
        let (uw, vw, ub, vb) = (at(u, w)?, at(v, w)?, at(u, b)?, at(v, b)?);
        if uw != vw {
            return Err(ModelError::EndpointMismatch { which: "worst", a: uw, b: vw });
        }
        if ub != vb {
            return Err(ModelError::EndpointMismatch { which: "best", a: ub, b: vb });
        }
        let mut xs: Vec<f64> = u.knots().chain(v.knots()).collect();
        xs.extend((1..256).map(|i| w + (b - w) * i as f64 / 256.0));
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let mids: Vec<f64> = xs.windows(2).map(|p| 0.5 * (p[0] + p[1])).collect();
        for x in xs.into_iter().chain(mids) {
            if x <= w || x >= b {
                continue;
            }
            if !(at(v, x)? < at(u, x)?) {
                return Err(ModelError::NotBelow { x });
            }
        }
        Ok(model)
    }

    /// An expected-utility preference expressed as a degenerate binary
    /// family (`u = v`, `d = b`, `τ = 1`).
    pub fn expected_utility(space: OutcomeSpace, u: UtilityCurve) -> Result<Self, ModelError> {
        Self::new(space, space.best(), Family::Binary { tau: 1.0, u: u.clone(), v: u })
    }

    /// The parametric family `((x - w)/(b - w))^(0.5 + π)` with threshold `d`.
    pub fn parametric(space: OutcomeSpace, d: f64) -> Result<Self, ModelError> {
        Self::new(space, d, Family::Parametric)
    }

    /// `τ` of a binary family.
    pub fn tau(&self) -> Option<f64> {
        match &self.family {
            Family::Binary { tau, .. } => Some(*tau),
            _ => None,
        }
    }

    /// `u_π(x)` honouring the domain rules.
    pub fn utility(&self, pi: f64, x: f64) -> Option<f64> {
        if !in_domain(pi, x, self.d) {
            return None;
        }
        self.family.utility(pi, x, self.space)
    }

    /// Common utility of the worst prize, `u(w)`.
    pub fn u_worst(&self) -> f64 {
        self.family.utility(1.0, self.space.worst(), self.space).unwrap_or(f64::NAN)
    }

    /// Common utility of the best prize, `u(b)`.
    pub fn u_best(&self) -> f64 {
        let pi = if self.d < self.space.best() { 0.0 } else { 1.0 };
        self.family.utility(pi, self.space.best(), self.space).unwrap_or(f64::NAN)
    }

    /// `V(p) = Σ p(x) u_π(x)` with `π = p([w, d])`.
    pub fn evaluate(&self, p: &Lottery) -> Result<f64, ModelError> {
        if p.space() != self.space {
            return Err(ModelError::SpaceMismatch);
        }
        let pi = p.disappointment_mass(self.d);
        p.support().iter().try_fold(0.0, |acc, &(x, px)| {
            let ux = self.family.utility(pi, x, self.space).ok_or(ModelError::Undefined { pi, x })?;
            Ok(acc + px * ux)
        })
    }

    pub fn prefer(&self, p: &Lottery, q: &Lottery) -> Result<Preference, ModelError> {
        Ok(Preference::from_values(self.evaluate(p)?, self.evaluate(q)?, INDIFFERENCE_TOLERANCE))
    }

    /// Weight `γ` with `p ~ γ δ_b + (1 - γ) δ_w`, from the closed form
    /// `(V(p) - u(w)) / (u(b) - u(w))`.
    pub fn bw_weight(&self, p: &Lottery) -> Result<f64, ModelError> {
        let (lo, hi) = (self.u_worst(), self.u_best());
        Ok((self.evaluate(p)? - lo) / (hi - lo))
    }

    pub fn validate_contextual(&self, pi_grid: &[f64], x_grid: &[f64]) -> Vec<ContextViolation> {
        validate_contextual(&self.family, self.space, self.d, pi_grid, x_grid)
    }

    pub fn check_fosd_conditions(&self, pi_grid: &[f64], x_grid: &[f64]) -> FosdReport {
        check_fosd_conditions(self, pi_grid, x_grid)
    }

    /// Tabulates the family on a grid, leaving out-of-domain cells empty.
    pub fn tabulate(&self, contexts: &[f64], prizes: &[f64]) -> Result<TabulatedFamily, ModelError> {
        let values = contexts
            .iter()
            .flat_map(|&pi| prizes.iter().map(move |&x| (pi, x)))
            .map(|(pi, x)| self.utility(pi, x))
            .collect();
        TabulatedFamily::new(contexts.to_vec(), prizes.to_vec(), values)
    }
}

/// A violated contextual condition with its witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum ContextViolation {
    /// `u_π(w) < u_π(b)` fails.
    EndpointOrder { pi: f64, u_w: f64, u_b: f64 },
    /// `u_π(w)` differs from the common worst-prize value.
    WorstNotCommon { pi: f64, mu: f64, a: f64, b: f64 },
    /// `u_π(b)` differs from the common best-prize value.
    BestNotCommon { pi: f64, mu: f64, a: f64, b: f64 },
    /// `u_π(x)` escapes `[u(w), u(b)]`.
    OutOfRange { pi: f64, x: f64, value: f64 },
    /// Every interior context agrees at `x` (required only when `d != b`).
    NoVariation { x: f64 },
    /// A cell inside the domain has no value.
    Undefined { pi: f64, x: f64 },
}

const ENDPOINT_TOLERANCE: f64 = 1e-12;

/// Checks the four contextual conditions on the given grids.
///
/// The interior-variation condition is existential over a continuum; it is
/// certified here only on `pi_grid ∩ (0, 1)`.
pub fn validate_contextual(
    family: &Family,
    space: OutcomeSpace,
    d: f64,
    pi_grid: &[f64],
    x_grid: &[f64],
) -> Vec<ContextViolation> {
    let (w, b) = (space.worst(), space.best());
    let value = |pi: f64, x: f64| -> Option<Option<f64>> {
        in_domain(pi, x, d).then(|| family.utility(pi, x, space))
    };
    let mut out = Vec::new();
    let mut worst_ref: Option<(f64, f64)> = None;
    let mut best_ref: Option<(f64, f64)> = None;

    for &pi in pi_grid {
        let uw = value(pi, w);
        let ub = value(pi, b);
        for (x, v) in [(w, uw), (b, ub)] {
            if v == Some(None) {
                out.push(ContextViolation::Undefined { pi, x });
            }
        }
        if let (Some(Some(uw)), Some(Some(ub))) = (uw, ub) {
            if !(uw < ub) {
                out.push(ContextViolation::EndpointOrder { pi, u_w: uw, u_b: ub });
            }
        }
        if let Some(Some(uw)) = uw {
            match worst_ref {
                None => worst_ref = Some((pi, uw)),
                Some((mu, r)) if (uw - r).abs() > ENDPOINT_TOLERANCE * (1.0 + r.abs()) => {
                    out.push(ContextViolation::WorstNotCommon { pi, mu, a: uw, b: r })
                }
                _ => {}
            }
        }
        if let Some(Some(ub)) = ub {
            match best_ref {
                None => best_ref = Some((pi, ub)),
                Some((mu, r)) if (ub - r).abs() > ENDPOINT_TOLERANCE * (1.0 + r.abs()) => {
                    out.push(ContextViolation::BestNotCommon { pi, mu, a: ub, b: r })
                }
                _ => {}
            }
        }
    }

    let lo = worst_ref.map(|(_, v)| v);
    let hi = best_ref.map(|(_, v)| v);
    for &pi in pi_grid {
        for &x in x_grid {
            match value(pi, x) {
                None => {}
                Some(None) => out.push(ContextViolation::Undefined { pi, x }),
                Some(Some(v)) => {
                    let below = lo.is_some_and(|lo| v < lo - ENDPOINT_TOLERANCE * (1.0 + lo.abs()));
                    let above = hi.is_some_and(|hi| v > hi + ENDPOINT_TOLERANCE * (1.0 + hi.abs()));
                    if below || above {
                        out.push(ContextViolation::OutOfRange { pi, x, value: v });
                    }
                }
            }
        }
    }

    if d != b {
        let interior: Vec<f64> = pi_grid.iter().copied().filter(|&p| p > 0.0 && p < 1.0).collect();
        for &x in x_grid.iter().filter(|&&x| x > w && x < b) {
            let mut values = interior.iter().filter_map(|&pi| family.utility(pi, x, space));
            let varies = match values.next() {
                Some(first) => values.any(|v| v != first),
                None => false,
            };
            if !varies {
                out.push(ContextViolation::NoVariation { x });
            }
        }
    }
    out
}

/// Monotonicity (C1) and pessimism (C2) checks with witnesses.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FosdReport {
    /// `(π, x1, x2)` with `x1 < x2` but `u_π(x1) > u_π(x2)`.
    pub non_monotone: Vec<(f64, f64, f64)>,
    /// `(π, μ, x)` with `π < μ` but `u_π(x) < u_μ(x)`.
    pub not_pessimistic: Vec<(f64, f64, f64)>,
}

impl FosdReport {
    pub fn monotone(&self) -> bool {
        self.non_monotone.is_empty()
    }

    pub fn pessimistic(&self) -> bool {
        self.not_pessimistic.is_empty()
    }

    pub fn holds(&self) -> bool {
        self.monotone() && self.pessimistic()
    }
}

/// Checks the two conditions under which the representation respects
/// first-order stochastic dominance. Grids must be sorted ascending.
pub fn check_fosd_conditions(model: &EcuModel, pi_grid: &[f64], x_grid: &[f64]) -> FosdReport {
    let mut report = FosdReport::default();
    for &pi in pi_grid {
        let row: Vec<(f64, f64)> = x_grid.iter().filter_map(|&x| model.utility(pi, x).map(|u| (x, u))).collect();
        for pair in row.windows(2) {
            if pair[1].1 < pair[0].1 {
                report.non_monotone.push((pi, pair[0].0, pair[1].0));
            }
        }
    }
    for &x in x_grid {
        let column: Vec<(f64, f64)> = pi_grid.iter().filter_map(|&pi| model.utility(pi, x).map(|u| (pi, u))).collect();
        for pair in column.windows(2) {
            if pair[0].1 < pair[1].1 {
                report.not_pessimistic.push((pair[0].0, pair[1].0, x));
            }
        }
    }
    report
}

/// Orders two values with the indifference tolerance; handy for sorting.
pub fn compare_values(a: f64, b: f64) -> Ordering {
    match Preference::from_values(a, b, INDIFFERENCE_TOLERANCE) {
        Preference::First => Ordering::Greater,
        Preference::Second => Ordering::Less,
        Preference::Indifferent => Ordering::Equal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;
    use alloc::vec;

    fn unit() -> OutcomeSpace {
        OutcomeSpace::new(0.0, 1.0).unwrap()
    }

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
    }

    #[test]
    fn first_reference_model_values() {
        let m = reference::disappointment_reversal();
        let s = m.space;
        let p = Lottery::new([(0.0, 0.9), (100.0, 0.05), (200.0, 0.05)], s).unwrap();
        let p2 = Lottery::new([(90.0, 0.9), (100.0, 0.05), (200.0, 0.05)], s).unwrap();
        let q2 = Lottery::new([(90.0, 0.9), (150.0, 0.1)], s).unwrap();
        assert!((m.evaluate(&p).unwrap() - 3.0).abs() < 1e-12);
        assert!((m.evaluate(&p2).unwrap() - 17.5).abs() < 1e-12);
        // 0.9 * 15 + 0.1 * 50 by hand
        assert!((m.evaluate(&q2).unwrap() - 18.5).abs() < 1e-12);
        let top = Lottery::dirac(300.0, s).unwrap();
        assert_eq!(m.evaluate(&top).unwrap(), m.u_best());
    }

    #[test]
    fn prefer_cases() {
        let m = reference::betweenness_violation(reference::Reading::AsComputed);
        let s = m.space;
        let p = Lottery::dirac(50.0, s).unwrap();
        let q = Lottery::new([(100.0, 0.5), (20.0, 0.5)], s).unwrap();
        assert_eq!(m.evaluate(&q).unwrap(), 8.0);
        assert_eq!(m.prefer(&p, &q).unwrap(), Preference::First);
        assert_eq!(m.prefer(&p, &p).unwrap(), Preference::Indifferent);

        let cr = reference::common_ratio();
        let a = Lottery::new([(6000.0, 0.001), (0.0, 0.999)], cr.space).unwrap();
        let b = Lottery::new([(3000.0, 0.002), (0.0, 0.998)], cr.space).unwrap();
        // 0.001 * 30 = 0.03 versus 0.002 * 10 = 0.02
        assert!((cr.evaluate(&a).unwrap() - 0.03).abs() < 1e-12);
        assert!((cr.evaluate(&b).unwrap() - 0.02).abs() < 1e-12);
        assert_eq!(cr.prefer(&a, &b).unwrap(), Preference::First);
    }

    #[test]
    fn bw_weight_cases() {
        let m = reference::disappointment_reversal();
        let s = m.space;
        assert_eq!(m.bw_weight(&Lottery::dirac(300.0, s).unwrap()).unwrap(), 1.0);
        assert_eq!(m.bw_weight(&Lottery::dirac(0.0, s).unwrap()).unwrap(), 0.0);

        // d = 0 on [0, 1]: an interior sure prize has mass 0, so u_0 applies.
        let par = EcuModel::parametric(unit(), 0.0).unwrap();
        let g = par.bw_weight(&Lottery::dirac(0.5, unit()).unwrap()).unwrap();
        assert!((g - libm::sqrt(0.5)).abs() < 1e-15);
        let mix = Lottery::two_point(1.0, 0.0, g, unit()).unwrap();
        assert!((par.evaluate(&mix).unwrap() - par.evaluate(&Lottery::dirac(0.5, unit()).unwrap()).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn parametric_closed_form() {
        let s = unit();
        for x in [0.0, 0.1, 0.37, 0.9, 1.0] {
            assert!((parametric_u(0.5, x, s) - x).abs() < 1e-15);
        }
        assert_eq!(parametric_u(0.3, 0.0, s), 0.0);
        assert_eq!(parametric_u(0.3, 1.0, s), 1.0);
        assert!((parametric_u(1.0, 0.25, s) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn contextual_validation() {
        let pis = grid(0.0, 1.0, 20);
        let ex1 = reference::disappointment_reversal();
        assert!(ex1.validate_contextual(&pis, &grid(0.0, 300.0, 60)).is_empty());

        let par = EcuModel::parametric(unit(), 0.4).unwrap();
        assert!(par.validate_contextual(&pis, &grid(0.0, 1.0, 50)).is_empty());

        let u = UtilityCurve::table(vec![(0.0, 0.0), (1.0, 1.0)]);
        let flat = EcuModel::new(unit(), 0.5, Family::Binary { tau: 0.5, u: u.clone(), v: u }).unwrap();
        let xs = grid(0.0, 1.0, 10);
        let report = flat.validate_contextual(&pis, &xs);
        assert_eq!(report.len(), 9);
        assert!(report.iter().all(|v| matches!(v, ContextViolation::NoVariation { .. })));
    }

    #[test]
    fn endpoint_violations_are_reported() {
        let u = UtilityCurve::table(vec![(0.0, 0.0), (1.0, 1.0)]);
        let v = UtilityCurve::table(vec![(0.0, 0.0), (1.0, 2.0)]);
        let m = EcuModel::new(unit(), 0.5, Family::Binary { tau: 0.5, u, v }).unwrap();
        let report = m.validate_contextual(&grid(0.0, 1.0, 4), &grid(0.0, 1.0, 4));
        assert!(report.iter().any(|v| matches!(v, ContextViolation::BestNotCommon { .. })));
        assert!(report.iter().any(|v| matches!(v, ContextViolation::OutOfRange { .. })));
    }

    #[test]
    fn fosd_conditions() {
        let pis = grid(0.0, 1.0, 20);
        let par = EcuModel::parametric(unit(), 0.3).unwrap();
        assert!(par.check_fosd_conditions(&pis, &grid(0.0, 1.0, 40)).holds());

        let ex1 = reference::disappointment_reversal();
        assert!(ex1.check_fosd_conditions(&pis, &grid(0.0, 300.0, 60)).holds());

        let Family::Binary { tau, u, v } = ex1.family.clone() else { unreachable!() };
        let swapped = EcuModel::new(ex1.space, ex1.d, Family::Binary { tau, u: v, v: u }).unwrap();
        let r = swapped.check_fosd_conditions(&pis, &grid(0.0, 300.0, 60));
        assert!(r.monotone());
        assert!(!r.pessimistic());
        let (pi, mu, x) = r.not_pessimistic[0];
        assert!(pi < mu && swapped.utility(pi, x).unwrap() < swapped.utility(mu, x).unwrap());
    }

    #[test]
    fn binary_constructor_rejects_bad_curves() {
        let s = OutcomeSpace::new(0.0, 10.0).unwrap();
        let u = UtilityCurve::table(vec![(0.0, 0.0), (10.0, 10.0)]);
        let above = UtilityCurve::table(vec![(0.0, 0.0), (5.0, 6.0), (10.0, 10.0)]);
        assert!(matches!(EcuModel::binary(s, 5.0, 0.5, u.clone(), above), Err(ModelError::NotBelow { .. })));
        let end = UtilityCurve::table(vec![(0.0, 0.0), (10.0, 9.0)]);
        assert!(matches!(EcuModel::binary(s, 5.0, 0.5, u.clone(), end), Err(ModelError::EndpointMismatch { .. })));
        assert!(matches!(EcuModel::binary(s, 11.0, 0.5, u.clone(), u.clone()), Err(ModelError::ThresholdOutOfRange { .. })));
        assert!(matches!(EcuModel::binary(s, 5.0, 1.5, u.clone(), u), Err(ModelError::TauOutOfRange(_))));
    }

    #[test]
    fn binary_boundary_uses_optimistic_curve() {
        // u and v differ at every interior prize; mass exactly tau selects u.
        let s = OutcomeSpace::new(0.0, 10.0).unwrap();
        let u = UtilityCurve::Power { low: 0.0, high: 1.0, exponent: 0.5 };
        let v = UtilityCurve::Power { low: 0.0, high: 1.0, exponent: 2.0 };
        let m = EcuModel::binary(s, 2.0, 0.25, u.clone(), v.clone()).unwrap();
        let at_tau = Lottery::new([(1.0, 0.25), (6.0, 0.75)], s).unwrap();
        let expect_u = 0.25 * u.value(1.0, s).unwrap() + 0.75 * u.value(6.0, s).unwrap();
        assert_eq!(m.evaluate(&at_tau).unwrap(), expect_u);
        let above = Lottery::new([(1.0, 0.26), (6.0, 0.74)], s).unwrap();
        let expect_v = 0.26 * v.value(1.0, s).unwrap() + 0.74 * v.value(6.0, s).unwrap();
        assert_eq!(m.evaluate(&above).unwrap(), expect_v);
    }

    #[test]
    fn tabulated_lookup() {
        let t = TabulatedFamily::new(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 2.0], vec![
            None, Some(1.0), Some(2.0),
            Some(0.0), Some(0.5), Some(2.0),
            Some(0.0), Some(0.25), None,
        ])
        .unwrap();
        assert_eq!(t.value(0.1, 1.5), Some(1.5));
        assert_eq!(t.value(0.3, 0.5), Some(0.25));
        assert_eq!(t.value(0.9, 1.5), None);
        assert_eq!(t.value(0.0, 0.0), None);
        assert!(TabulatedFamily::new(vec![0.0], vec![1.0, 0.0], vec![None, None]).is_err());
    }
}
