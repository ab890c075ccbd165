//! Result summaries for the main design (per-participant records) and for
//! raw pilot matrices.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::exact::{binom_exact, fisher_exact, BinomialTestResult, Contingency2x2, FisherResult};
use super::logit::{logit_fit, LogitResult};
use super::pilot::PilotSession;
use super::switches::{count_switches, switcher_summary, SwitcherSummary};
use crate::experiment::{Choice, Stage3Kind, STAGE3_TASKS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gender {
    Female,
    Male,
    Other,
}

/// Everything the analysis needs about one participant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipantRecord {
    pub id: String,
    pub stage1: Vec<Choice>,
    pub stage2: Vec<Choice>,
    /// Empty when stage 3 was not reached; otherwise eight choices in
    /// presentation order.
    pub stage3: Vec<Choice>,
    pub gender: Option<Gender>,
    pub d: Option<f64>,
    pub tau: Option<f64>,
}

impl ParticipantRecord {
    pub fn switched_stage1(&self) -> bool {
        count_switches(&self.stage1) > 0
    }

    pub fn switched_stage2(&self) -> bool {
        count_switches(&self.stage2) > 0
    }

    /// Whether the choices differ within each of the four stage-3 pairs.
    pub fn stage3_reversals(&self) -> Option<[bool; 4]> {
        (self.stage3.len() == STAGE3_TASKS).then(|| core::array::from_fn(|p| self.stage3[2 * p] != self.stage3[2 * p + 1]))
    }
}

/// Stage-3 pairs in presentation order.
pub const STAGE3_PAIRS: [Stage3Kind; 4] = [
    Stage3Kind::PredictedCommonConsequence,
    Stage3Kind::PredictedCommonRatio,
    Stage3Kind::NoReversalCommonConsequence,
    Stage3Kind::NoReversalCommonRatio,
];

/// `count` of `of`, with a one-sided binomial test against one half when
/// `of > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub count: usize,
    pub of: usize,
    pub share: Option<f64>,
    pub test: Option<BinomialTestResult>,
}

impl Proportion {
    pub fn new(count: usize, of: usize) -> Self {
        Self {
            count,
            of,
            share: (of > 0).then(|| count as f64 / of as f64),
            test: (of > 0).then(|| binom_exact(count as u64, of as u64, 0.5).expect("count never exceeds total")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReversals {
    pub kind: Stage3Kind,
    pub overall: Proportion,
    /// Restricted to participants who switched in both stages.
    pub among_dual_switchers: Proportion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenderTable {
    /// Rows no switch / switch, columns female / male.
    pub table: Contingency2x2,
    pub fisher: Option<FisherResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenderReport {
    pub stage1: GenderTable,
    pub stage2: GenderTable,
    pub stage2_among_stage1_switchers: GenderTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LogitOutcome {
    Fitted(LogitResult),
    Failed { reason: String },
}

/// Column names of the reversal regression, in order.
pub const LOGIT_COLUMNS: [&str; 5] = ["intercept", "allais_predicted", "d", "tau", "male"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MainReport {
    pub participants: usize,
    pub stage1_switchers: Proportion,
    pub stage2_switchers: Proportion,
    pub stage2_given_stage1_switch: Proportion,
    pub stage2_given_no_stage1_switch: Proportion,
    pub dual_non_switchers: Proportion,
    pub dual_switchers: usize,
    pub stage3: Vec<PairReversals>,
    pub gender: Option<GenderReport>,
    pub logit: Option<LogitOutcome>,
}

fn gender_table(records: &[&ParticipantRecord], switched: impl Fn(&ParticipantRecord) -> bool) -> GenderTable {
    let mut t = Contingency2x2::new(0, 0, 0, 0);
    for r in records {
        match (r.gender, switched(r)) {
            (Some(Gender::Female), false) => t.a += 1,
            (Some(Gender::Male), false) => t.b += 1,
            (Some(Gender::Female), true) => t.c += 1,
            (Some(Gender::Male), true) => t.d += 1,
            _ => {}
        }
    }
    GenderTable { table: t, fisher: fisher_exact(t).ok() }
}

/// Reversal regression: one row per participant and stage-3 pair. Only
/// participants with all covariates and a binary gender enter.
pub fn reversal_logit(records: &[ParticipantRecord]) -> Option<LogitOutcome> {
    let mut design = Vec::new();
    let mut y = Vec::new();
    let mut clusters = Vec::new();
    for (i, r) in records.iter().enumerate() {
        let (Some(rev), Some(d), Some(tau)) = (r.stage3_reversals(), r.d, r.tau) else { continue };
        let male = match r.gender {
            Some(Gender::Male) => 1.0,
            Some(Gender::Female) => 0.0,
            _ => continue,
        };
        for (p, kind) in STAGE3_PAIRS.iter().enumerate() {
            design.push(alloc::vec![1.0, f64::from(u8::from(kind.reversal_predicted())), d, tau, male]);
            y.push(u8::from(rev[p]));
            clusters.push(i as u64);
        }
    }
    if design.is_empty() {
        return None;
    }
    Some(match logit_fit(&design, &y, &clusters) {
        Ok(fit) => LogitOutcome::Fitted(fit),
        Err(e) => LogitOutcome::Failed { reason: e.to_string() },
    })
}

/// Computes every summary the data supports. Gender tables need at least
/// one participant with a binary gender; the regression needs stage-3
/// choices, thresholds and gender.
pub fn main_report(records: &[ParticipantRecord]) -> MainReport {
    let n = records.len();
    let s1: Vec<&ParticipantRecord> = records.iter().filter(|r| r.switched_stage1()).collect();
    let s1_no: Vec<&ParticipantRecord> = records.iter().filter(|r| !r.switched_stage1()).collect();
    let s2_count = records.iter().filter(|r| r.switched_stage2()).count();
    let dual: Vec<&ParticipantRecord> = s1.iter().copied().filter(|r| r.switched_stage2()).collect();
    let dual_none = s1_no.iter().filter(|r| !r.switched_stage2()).count();

    let with_stage3: Vec<[bool; 4]> = records.iter().filter_map(ParticipantRecord::stage3_reversals).collect();
    let dual_stage3: Vec<[bool; 4]> = dual.iter().filter_map(|r| r.stage3_reversals()).collect();
    let stage3 = STAGE3_PAIRS
        .iter()
        .enumerate()
        .map(|(p, &kind)| PairReversals {
            kind,
            overall: Proportion::new(with_stage3.iter().filter(|r| r[p]).count(), with_stage3.len()),
            among_dual_switchers: Proportion::new(dual_stage3.iter().filter(|r| r[p]).count(), dual_stage3.len()),
        })
        .collect();

    let all: Vec<&ParticipantRecord> = records.iter().collect();
    let has_gender = records.iter().any(|r| matches!(r.gender, Some(Gender::Female | Gender::Male)));
    let gender = has_gender.then(|| GenderReport {
        stage1: gender_table(&all, ParticipantRecord::switched_stage1),
        stage2: gender_table(&all, ParticipantRecord::switched_stage2),
        stage2_among_stage1_switchers: gender_table(&s1, ParticipantRecord::switched_stage2),
    });

    MainReport {
        participants: n,
        stage1_switchers: Proportion::new(s1.len(), n),
        stage2_switchers: Proportion::new(s2_count, n),
        stage2_given_stage1_switch: Proportion::new(dual.len(), s1.len()),
        stage2_given_no_stage1_switch: Proportion::new(s1_no.len() - dual_none, s1_no.len()),
        dual_non_switchers: Proportion::new(dual_none, n),
        dual_switchers: dual.len(),
        stage3,
        gender,
        logit: reversal_logit(records),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PilotSessionReport {
    pub name: String,
    pub stage1: SwitcherSummary,
    pub stage2: SwitcherSummary,
    /// Subjects who switched in both stages.
    pub switched_both: usize,
    /// Subjects who switched in neither stage.
    pub switched_neither: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PilotReport {
    pub sessions: Vec<PilotSessionReport>,
}

/// Switching summaries of raw pilot matrices. Only coding-invariant
/// statistics are computed.
pub fn pilot_report(sessions: &[PilotSession]) -> PilotReport {
    let sessions = sessions
        .iter()
        .map(|s| {
            let pairs = s.stage1.rows().iter().zip(s.stage2.rows());
            let flags: Vec<(bool, bool)> = pairs.map(|(a, b)| (count_switches(a) > 0, count_switches(b) > 0)).collect();
            PilotSessionReport {
                name: s.name.clone(),
                stage1: switcher_summary(&s.stage1),
                stage2: switcher_summary(&s.stage2),
                switched_both: flags.iter().filter(|(a, b)| *a && *b).count(),
                switched_neither: flags.iter().filter(|(a, b)| !*a && !*b).count(),
            }
        })
        .collect();
    PilotReport { sessions }
}
