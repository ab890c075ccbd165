//! Finite-support lotteries on a prize interval `[w, b]`.
//!
//! A [`Lottery`] is kept in canonical form: prizes strictly ascending, no
//! duplicate prizes, every probability positive, total mass one. Prize
//! equality is exact floating-point equality; callers that generate prizes
//! are expected to avoid near-duplicates.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

/// Tolerance on total mass accepted by [`Lottery::new`].
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Slack used when comparing cumulative probabilities that were summed in
/// different orders.
pub const CDF_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LotteryError {
    #[error("invalid outcome space: need finite w < b, got [{w}, {b}]")]
    InvalidSpace { w: f64, b: f64 },
    #[error("lottery has no outcomes")]
    Empty,
    #[error("probability {probability} for prize {prize} is negative or not finite")]
    BadProbability { prize: f64, probability: f64 },
    #[error("probabilities sum to {total}, not 1")]
    NotNormalized { total: f64 },
    #[error("prize {prize} outside [{w}, {b}]")]
    PrizeOutOfRange { prize: f64, w: f64, b: f64 },
    #[error("mixing weight {0} outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error("lotteries are defined over different outcome spaces")]
    SpaceMismatch,
    #[error("cannot parse lottery: {0}")]
    Parse(String),
}

/// The prize interval `X = [w, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeSpace {
    w: f64,
    b: f64,
}

impl OutcomeSpace {
    pub fn new(w: f64, b: f64) -> Result<Self, LotteryError> {
        if !(w.is_finite() && b.is_finite() && w < b) {
            return Err(LotteryError::InvalidSpace { w, b });
        }
        Ok(Self { w, b })
    }

    /// Worst prize `w`.
    #[inline]
    pub fn worst(&self) -> f64 {
        self.w
    }

    /// Best prize `b`.
    #[inline]
    pub fn best(&self) -> f64 {
        self.b
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.w <= x && x <= self.b
    }

    /// Position of `x` in the interval, `(x - w) / (b - w)`.
    #[inline]
    pub fn normalize(&self, x: f64) -> f64 {
        (x - self.w) / (self.b - self.w)
    }

    pub fn validate(&self) -> Result<(), LotteryError> {
        Self::new(self.w, self.b).map(|_| ())
    }
}

/// A simple lottery in canonical form.
///
/// Serializes as `{space, support}`; deserialization goes through
/// [`Lottery::new`], so a decoded lottery is always canonical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LotteryRepr", into = "LotteryRepr")]
pub struct Lottery {
    space: OutcomeSpace,
    support: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct LotteryRepr {
    space: OutcomeSpace,
    support: Vec<(f64, f64)>,
}

impl TryFrom<LotteryRepr> for Lottery {
    type Error = LotteryError;

    fn try_from(r: LotteryRepr) -> Result<Self, Self::Error> {
        r.space.validate()?;
        Lottery::new(r.support, r.space)
    }
}

impl From<Lottery> for LotteryRepr {
    fn from(l: Lottery) -> Self {
        LotteryRepr { space: l.space, support: l.support }
    }
}

impl Lottery {
    /// Builds a lottery from `(prize, probability)` pairs.
    ///
    /// Duplicate prizes are merged by summing their probabilities,
    /// zero-probability entries are dropped and the result is sorted by
    /// prize. The total must be within [`MASS_TOLERANCE`] of one; it is then
    /// renormalized.
    pub fn new<I>(pairs: I, space: OutcomeSpace) -> Result<Self, LotteryError>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut raw: Vec<(f64, f64)> = Vec::new();
        for (prize, probability) in pairs {
            if !(probability.is_finite() && probability >= 0.0) || !prize.is_finite() {
                return Err(LotteryError::BadProbability { prize, probability });
            }
            if !space.contains(prize) {
                return Err(LotteryError::PrizeOutOfRange { prize, w: space.w, b: space.b });
            }
            raw.push((prize, probability));
        }
        if raw.is_empty() {
            return Err(LotteryError::Empty);
        }
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut support: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (prize, probability) in raw {
            match support.last_mut() {
                Some(last) if last.0 == prize => last.1 += probability,
                _ => support.push((prize, probability)),
            }
        }
        support.retain(|&(_, p)| p > 0.0);

        let total: f64 = support.iter().map(|&(_, p)| p).sum();
        if support.is_empty() || (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(LotteryError::NotNormalized { total });
        }
        // Only renormalize when the total is off by more than accumulated
        // rounding; this keeps canonicalization idempotent.
        if (total - 1.0).abs() > 4.0 * f64::EPSILON * support.len() as f64 {
            for entry in &mut support {
                entry.1 /= total;
            }
        }
        Ok(Self { space, support })
    }

    /// Degenerate lottery `δ_x`.
    pub fn dirac(x: f64, space: OutcomeSpace) -> Result<Self, LotteryError> {
        Self::new([(x, 1.0)], space)
    }

    /// `t·δ_high + (1 - t)·δ_low`.
    pub fn two_point(high: f64, low: f64, t: f64, space: OutcomeSpace) -> Result<Self, LotteryError> {
        if !(0.0..=1.0).contains(&t) {
            return Err(LotteryError::AlphaOutOfRange(t));
        }
        Self::new([(high, t), (low, 1.0 - t)], space)
    }

    /// Pointwise convex combination `alpha·p + (1 - alpha)·q`.
    pub fn mix(p: &Lottery, q: &Lottery, alpha: f64) -> Result<Self, LotteryError> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(LotteryError::AlphaOutOfRange(alpha));
        }
        if p.space != q.space {
            return Err(LotteryError::SpaceMismatch);
        }
        let pairs = p
            .support
            .iter()
            .map(|&(x, px)| (x, alpha * px))
            .chain(q.support.iter().map(|&(x, qx)| (x, (1.0 - alpha) * qx)));
        Self::new(pairs, p.space)
    }

    pub fn space(&self) -> OutcomeSpace {
        self.space
    }

    /// Canonical `(prize, probability)` pairs, prizes ascending.
    pub fn support(&self) -> &[(f64, f64)] {
        &self.support
    }

    pub fn prizes(&self) -> impl Iterator<Item = f64> + '_ {
        self.support.iter().map(|&(x, _)| x)
    }

    pub fn probability_of(&self, x: f64) -> f64 {
        self.support
            .iter()
            .find(|&&(y, _)| y == x)
            .map_or(0.0, |&(_, p)| p)
    }

    /// Mass on `[w, x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.support
            .iter()
            .take_while(|&&(y, _)| y <= x)
            .map(|&(_, p)| p)
            .sum()
    }

    /// Mass on the disappointing prizes `[w, d]` (closed at `d`).
    pub fn disappointment_mass(&self, d: f64) -> f64 {
        self.cdf(d)
    }

    pub fn expectation(&self) -> f64 {
        self.support.iter().map(|&(x, p)| x * p).sum()
    }

    pub fn min_prize(&self) -> f64 {
        self.support[0].0
    }

    pub fn max_prize(&self) -> f64 {
        self.support[self.support.len() - 1].0
    }

    /// First-order stochastic dominance of `self` over `other`: the CDF of
    /// `self` lies weakly below that of `other` at every prize of either
    /// support (sufficient for all `x` since both CDFs are step functions).
    pub fn dominates(&self, other: &Lottery) -> bool {
        self.prizes()
            .chain(other.prizes())
            .all(|x| self.cdf(x) <= other.cdf(x) + CDF_SLACK)
    }

    /// Parses the `prize:probability,...` text form.
    pub fn parse(text: &str, space: OutcomeSpace) -> Result<Self, LotteryError> {
        let mut pairs = Vec::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (x, p) = item
                .split_once(':')
                .ok_or_else(|| LotteryError::Parse(item.to_string()))?;
            let x: f64 = x.trim().parse().map_err(|_| LotteryError::Parse(item.to_string()))?;
            let p: f64 = p.trim().parse().map_err(|_| LotteryError::Parse(item.to_string()))?;
            pairs.push((x, p));
        }
        Self::new(pairs, space)
    }

    /// Draws a prize by inverse CDF over ascending prizes: the first prize
    /// whose cumulative mass exceeds `u`, for `u` in `[0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let mut acc = 0.0;
        for &(x, p) in &self.support {
            acc += p;
            if u < acc {
                return x;
            }
        }
        self.max_prize()
    }
}

impl fmt::Display for Lottery {
    /// `prize:probability` pairs in ascending prize order, comma separated.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (x, p)) in self.support.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}:{p}")?;
        }
        Ok(())
    }
}
