//! Exact binomial and Fisher tests, accumulated in log space.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::math::{bisect_increasing, exp, ln, ln_choose};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinomialTestResult {
    pub successes: u64,
    pub trials: u64,
    pub p0: f64,
    /// `P(X >= successes)` under `p0`.
    pub p_value: f64,
    /// One-sided 95% Clopper–Pearson lower bound; the upper bound is 1.
    pub ci_lower: f64,
    pub point_estimate: f64,
}

/// `ln P(X = j)` for `X ~ Bin(n, p)`.
fn ln_binom_pmf(n: u64, j: u64, p: f64) -> f64 {
    let mut v = ln_choose(n, j);
    if j > 0 {
        v += j as f64 * ln(p);
    }
    if n > j {
        v += (n - j) as f64 * ln(1.0 - p);
    }
    v
}

/// Sums `exp(terms)` without overflow.
fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let terms: Vec<f64> = terms.collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + ln(terms.iter().map(|t| exp(t - max)).sum())
}

/// `P(X >= s)` for `X ~ Bin(n, p)`.
pub fn binom_upper_tail(s: u64, n: u64, p: f64) -> f64 {
    if s == 0 {
        return 1.0;
    }
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    exp(log_sum_exp((s..=n).map(|j| ln_binom_pmf(n, j, p)))).min(1.0)
}

/// `P(X <= s)` for `X ~ Bin(n, p)`.
pub fn binom_lower_tail(s: u64, n: u64, p: f64) -> f64 {
    if s >= n {
        return 1.0;
    }
    exp(log_sum_exp((0..=s).map(|j| ln_binom_pmf(n, j, p)))).min(1.0)
}

/// One-sided exact binomial test against `p > p0`.
pub fn binom_exact(successes: u64, trials: u64, p0: f64) -> Result<BinomialTestResult, StatsError> {
    if successes > trials {
        return Err(StatsError::TooManySuccesses { successes, trials });
    }
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(StatsError::BadNull(p0));
    }
    let p_value = binom_upper_tail(successes, trials, p0);
    // The upper tail grows with p; the bound is where it reaches 0.05.
    let ci_lower = if successes == 0 {
        0.0
    } else {
        bisect_increasing(|p| binom_upper_tail(successes, trials, p), 0.05, 0.0, 1.0, 1e-14, 200)
            .map(|r| r.x)
            .unwrap_or(0.0)
    };
    let point_estimate = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
    Ok(BinomialTestResult { successes, trials, p0, p_value, ci_lower, point_estimate })
}

/// `[[a, b], [c, d]]`: rows are outcome (no switch, switch), columns are
/// groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contingency2x2 {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl Contingency2x2 {
    pub fn new(a: u64, b: u64, c: u64, d: u64) -> Self {
        Self { a, b, c, d }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherResult {
    /// `P(A >= a)` with margins fixed.
    pub p_one_sided: f64,
    /// Sum over tables no more probable than the observed one.
    pub p_two_sided: f64,
}

/// Fisher's exact test. The two-sided value uses the point-probability
/// rule with relative slack `1e-7`.
pub fn fisher_exact(t: Contingency2x2) -> Result<FisherResult, StatsError> {
    let r1 = t.a + t.b;
    let r2 = t.c + t.d;
    let c1 = t.a + t.c;
    let c2 = t.b + t.d;
    if r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0 {
        return Err(StatsError::ZeroMargin);
    }
    let n = r1 + r2;
    let lo = c1.saturating_sub(r2);
    let hi = r1.min(c1);
    let ln_total = ln_choose(n, c1);
    let ln_p = |x: u64| ln_choose(r1, x) + ln_choose(r2, c1 - x) - ln_total;
    let observed = ln_p(t.a);
    let p_one_sided = exp(log_sum_exp((t.a..=hi).map(ln_p))).min(1.0);
    let threshold = observed + ln(1.0 + 1e-7);
    let p_two_sided = exp(log_sum_exp((lo..=hi).map(ln_p).filter(|&l| l <= threshold))).min(1.0);
    Ok(FisherResult { p_one_sided, p_two_sided })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn binomial_table_values() {
        let r = binom_exact(78, 150, 0.5).unwrap();
        assert!(rel(r.p_value, 0.3416) < 1e-3 && (r.ci_lower - 0.4497293).abs() < 1e-6);
        assert!(rel(binom_exact(64, 78, 0.5).unwrap().p_value, 4.291e-9) < 1e-3);
        assert_eq!(binom_exact(0, 12, 0.5).unwrap().p_value, 1.0);
        assert!(binom_exact(5, 4, 0.5).is_err());
        assert!(binom_exact(1, 4, 1.0).is_err());
    }

    #[test]
    fn tails_complement() {
        for (s, n) in [(1u64, 10u64), (5, 10), (78, 150), (150, 150)] {
            let total = binom_upper_tail(s, n, 0.5) + binom_lower_tail(s - 1, n, 0.5);
            assert!((total - 1.0).abs() < 1e-12, "{s} {n}: {total}");
        }
    }

    #[test]
    fn fisher_table_values() {
        let r = fisher_exact(Contingency2x2::new(34, 38, 24, 53)).unwrap();
        assert!((r.p_two_sided - 0.064).abs() < 5e-4 && (r.p_one_sided - 0.033).abs() < 5e-4);
        assert!(fisher_exact(Contingency2x2::new(0, 0, 1, 2)).is_err());
    }

    #[test]
    fn fisher_extreme_table() {
        let t = Contingency2x2::new(4, 0, 0, 3);
        let r = fisher_exact(t).unwrap();
        // Only one table is at least as extreme: 1 / C(7, 4).
        assert!((r.p_one_sided - 1.0 / 35.0).abs() < 1e-12);
    }
}
