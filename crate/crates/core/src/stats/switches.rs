//! Switch counting over participants × tasks choice matrices.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::StatsError;

/// What a `1` entry means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coding {
    /// Digits copied from a source that does not say which option `1` is.
    Unknown,
    /// `1` is Option B.
    OneIsB,
}

/// Binary choices, one row per participant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoiceMatrix {
    pub row_ids: Vec<String>,
    rows: Vec<Vec<u8>>,
    pub coding: Coding,
}

impl ChoiceMatrix {
    pub fn new(row_ids: Vec<String>, rows: Vec<Vec<u8>>, coding: Coding) -> Result<Self, StatsError> {
        if row_ids.len() != rows.len() {
            return Err(StatsError::Dimension("row ids and rows differ in count".into()));
        }
        if let Some(first) = rows.first() {
            if rows.iter().any(|r| r.len() != first.len()) {
                return Err(StatsError::Ragged);
            }
        }
        if rows.iter().flatten().any(|&v| v > 1) {
            return Err(StatsError::NotBinary);
        }
        Ok(Self { row_ids, rows, coding })
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Share of entries choosing Option B. Refuses matrices of unknown
    /// coding.
    pub fn share_choosing_b(&self) -> Result<Option<f64>, StatsError> {
        if self.coding == Coding::Unknown {
            return Err(StatsError::CodingUnknown);
        }
        let total: usize = self.rows.iter().map(Vec::len).sum();
        let ones: usize = self.rows.iter().flatten().filter(|&&v| v == 1).count();
        Ok((total > 0).then(|| ones as f64 / total as f64))
    }
}

/// Number of adjacent unequal entries.
pub fn count_switches<T: PartialEq>(row: &[T]) -> usize {
    row.windows(2).filter(|w| w[0] != w[1]).count()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitcherSummary {
    pub participants: usize,
    pub n_switchers: usize,
    pub share: Option<f64>,
    /// Mean switch count among participants who switched at least once.
    pub mean_switches_conditional: Option<f64>,
    pub n_single_switchers: usize,
}

pub fn switcher_summary(matrix: &ChoiceMatrix) -> SwitcherSummary {
    let counts: Vec<usize> = matrix.rows().iter().map(|r| count_switches(r)).collect();
    let switched: Vec<usize> = counts.iter().copied().filter(|&c| c > 0).collect();
    let n = counts.len();
    SwitcherSummary {
        participants: n,
        n_switchers: switched.len(),
        share: (n > 0).then(|| switched.len() as f64 / n as f64),
        mean_switches_conditional: (!switched.is_empty()).then(|| switched.iter().sum::<usize>() as f64 / switched.len() as f64),
        n_single_switchers: switched.iter().filter(|&&c| c == 1).count(),
    }
}
