//! Analyses of choice-list data.
//!
//! * [`switches`]: switch counting over choice matrices,
//! * [`exact`]: one-sided exact binomial test with Clopper–Pearson bound and
//!   Fisher's exact test on 2×2 tables,
//! * [`logit`]: logistic regression by IRLS with participant-clustered
//!   sandwich errors,
//! * [`pilot`]: the two pilot sessions' raw choice matrices,
//! * [`report`]: the result summaries computed from a dataset.

pub mod exact;
pub mod logit;
pub mod pilot;
pub mod report;
pub mod switches;

pub use exact::{binom_exact, fisher_exact, BinomialTestResult, Contingency2x2, FisherResult};
pub use logit::{logit_fit, LogitResult};
pub use switches::{count_switches, switcher_summary, ChoiceMatrix, Coding, SwitcherSummary};

use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("successes {successes} exceed trials {trials}")]
    TooManySuccesses { successes: u64, trials: u64 },
    #[error("null probability {0} outside (0, 1)")]
    BadNull(f64),
    #[error("2x2 table has a zero margin")]
    ZeroMargin,
    #[error("matrix rows have different lengths")]
    Ragged,
    #[error("entries must be 0 or 1")]
    NotBinary,
    #[error("this statistic depends on which option 1 codes, and the matrix coding is unknown")]
    CodingUnknown,
    #[error("design matrix is rank deficient")]
    RankDeficient,
    #[error("need at least two clusters")]
    TooFewClusters,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}
