//! The adaptive three-stage choice-list experiment.
//!
//! * Stage 1: ten rows that differ only in the common worst prize
//!   `z_r = 44 (r - 1)`. A switch locates the disappointment threshold.
//! * Stage 2: ten mean-preserving splits whose probability of the prize 0
//!   runs down the `y` grid. A switch locates the tolerance threshold.
//! * Stage 3: eight single tasks built from the recorded `d` and `τ`, four
//!   where a reversal is predicted and four where it is not.
//!
//! One of the 28 tasks is paid at random.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::lottery::{Lottery, LotteryError, OutcomeSpace};
use crate::model::EcuModel;

pub const STAGE3_TASKS: usize = 8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Lottery(#[from] LotteryError),
    #[error("recorded d = {0} leaves no room below the best prize")]
    BadThreshold(f64),
    #[error("stage-3 probabilities infeasible: 1 - tau - epsilon = {0} is not positive")]
    Infeasible(f64),
    #[error("switch response does not describe a single crossing of a {rows}-row table")]
    BadResponse { rows: usize },
    #[error("response has {got} choices, table has {rows} rows")]
    WrongLength { got: usize, rows: usize },
    #[error("all {expected} tasks must be answered before payment, got {got}")]
    Incomplete { expected: usize, got: usize },
    #[error("model could not value a task: {0}")]
    Evaluation(String),
}

/// Prize levels of the stage-1 options other than the worst prize.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stage1Prizes {
    /// Option A: this prize with probability 0.1.
    pub a_high: f64,
    /// Option B: this prize with probability 0.05 ...
    pub b_high: f64,
    /// ... and this one with probability 0.05.
    pub b_mid: f64,
}

impl Default for Stage1Prizes {
    /// The motivating lotteries' 150 / 200 / 100 scaled by 4, which keeps
    /// every one of them above the largest worst prize.
    fn default() -> Self {
        Self { a_high: 600.0, b_high: 800.0, b_mid: 400.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub space: OutcomeSpace,
    pub stage1_increment: f64,
    pub stage1_rows: usize,
    pub stage1_prizes: Stage1Prizes,
    pub stage2_y_grid: Vec<f64>,
    pub epsilon: f64,
    pub usd_per_point: f64,
    pub show_up_fee_usd: f64,
    pub single_switch: bool,
    /// Stage-2 threshold when stage 1 had no switch.
    pub fallback_d: f64,
    /// Stage-3 tolerance threshold when stage 2 had no switch.
    pub fallback_tau: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            space: OutcomeSpace::new(0.0, 800.0).expect("static space"),
            stage1_increment: 44.0,
            stage1_rows: 10,
            stage1_prizes: Stage1Prizes::default(),
            stage2_y_grid: (0..10).map(|i| (2 * i + 1) as f64 / 20.0).collect(),
            epsilon: 0.01,
            usd_per_point: 0.01,
            show_up_fee_usd: 6.0,
            single_switch: true,
            fallback_d: 220.0,
            fallback_tau: 0.5,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: &str| Err(ExperimentError::Config(m.into()));
        self.space.validate()?;
        if !(self.stage1_increment > 0.0) || self.stage1_rows < 2 {
            return bad("stage 1 needs a positive increment and at least two rows");
        }
        let worst_max = self.space.worst() + self.stage1_increment * (self.stage1_rows - 1) as f64;
        let p = self.stage1_prizes;
        if !(p.b_high > p.a_high && p.a_high > p.b_mid && p.b_mid > worst_max) {
            return bad("stage-1 prizes must be ordered b_high > a_high > b_mid > largest worst prize");
        }
        if !self.space.contains(p.b_high) {
            return bad("stage-1 prizes must lie in the outcome space");
        }
        let y = &self.stage2_y_grid;
        if y.len() < 2 || !y.windows(2).all(|w| w[0] < w[1]) || !y.iter().all(|&v| v > 0.0 && v < 1.0) {
            return bad("y grid must be strictly increasing inside (0, 1)");
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad("epsilon must lie in (0, 1)");
        }
        if !self.space.contains(self.fallback_d) || self.fallback_d >= self.space.best() {
            return bad("fallback d must lie in [w, b)");
        }
        if !(self.fallback_tau > 0.0 && self.fallback_tau < 1.0) {
            return bad("fallback tau must lie in (0, 1)");
        }
        Ok(())
    }

    /// Rows in stage 1 plus stage 2 plus stage 3.
    pub fn total_tasks(&self) -> usize {
        self.stage1_rows + self.stage2_y_grid.len() + STAGE3_TASKS
    }

    /// Worst prize of stage-1 row `r` (1-based).
    pub fn stage1_worst(&self, row: usize) -> f64 {
        self.space.worst() + self.stage1_increment * (row - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Choice {
    A,
    B,
}

/// Which of the eight stage-3 tasks this is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage3Kind {
    PredictedCommonConsequence,
    PredictedCommonRatio,
    NoReversalCommonConsequence,
    NoReversalCommonRatio,
}

impl Stage3Kind {
    pub fn reversal_predicted(&self) -> bool {
        matches!(self, Stage3Kind::PredictedCommonConsequence | Stage3Kind::PredictedCommonRatio)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage3Meta {
    pub kind: Stage3Kind,
    /// 1 or 2 within the pair.
    pub member: u8,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoiceTask {
    pub id: String,
    pub stage: u8,
    /// 1-based row (stage 1, 2) or position (stage 3).
    pub row: usize,
    pub option_a: Lottery,
    pub option_b: Lottery,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage3: Option<Stage3Meta>,
}

impl ChoiceTask {
    fn new(stage: u8, row: usize, a: Lottery, b: Lottery) -> Self {
        Self { id: format!("s{stage}r{row}"), stage, row, option_a: a, option_b: b, stage3: None }
    }

    pub fn option(&self, c: Choice) -> &Lottery {
        match c {
            Choice::A => &self.option_a,
            Choice::B => &self.option_b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTable {
    pub stage: u8,
    pub tasks: Vec<ChoiceTask>,
}

pub fn build_stage1(config: &ExperimentConfig) -> Result<StageTable, ExperimentError> {
    config.validate()?;
    let p = config.stage1_prizes;
    let tasks = (1..=config.stage1_rows)
        .map(|r| {
            let z = config.stage1_worst(r);
            let a = Lottery::new([(p.a_high, 0.1), (z, 0.9)], config.space)?;
            let b = Lottery::new([(p.b_high, 0.05), (p.b_mid, 0.05), (z, 0.9)], config.space)?;
            Ok(ChoiceTask::new(1, r, a, b))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    Ok(StageTable { stage: 1, tasks })
}

pub fn build_stage2(d: f64, config: &ExperimentConfig) -> Result<StageTable, ExperimentError> {
    config.validate()?;
    let (w, b) = (config.space.worst(), config.space.best());
    if !(d >= w && d < b) {
        return Err(ExperimentError::BadThreshold(d));
    }
    let tasks = config
        .stage2_y_grid
        .iter()
        .enumerate()
        .map(|(i, &y)| {
            let a = Lottery::new([(d + (b - d) / 2.0, 1.0 - y), (0.0, y)], config.space)?;
            let opt_b = Lottery::new(
                [(d + 3.0 * (b - d) / 4.0, (1.0 - y) / 2.0), (d + (b - d) / 4.0, (1.0 - y) / 2.0), (0.0, y)],
                config.space,
            )?;
            Ok(ChoiceTask::new(2, i + 1, a, opt_b))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    Ok(StageTable { stage: 2, tasks })
}

pub fn build_stage3(d: f64, tau: f64, config: &ExperimentConfig) -> Result<StageTable, ExperimentError> {
    config.validate()?;
    let (w, b) = (config.space.worst(), config.space.best());
    if !(d >= w && d < b) {
        return Err(ExperimentError::BadThreshold(d));
    }
    let eps = config.epsilon;
    let keep = 1.0 - tau - eps;
    if !(keep > 0.0) || !(tau >= 0.0) {
        return Err(ExperimentError::Infeasible(keep));
    }
    let s = config.space;
    let l = |pairs: &[(f64, f64)]| Lottery::new(pairs.iter().copied(), s);
    let mid = d + (b - d) / 2.0;
    let top = d + 3.0 * (b - d) / 4.0;
    let c = (b + d) / 2.0;
    let zero_note = Some(String::from(
        "built as displayed: the prize 0 appears although the pair is meant to contain only prizes above d",
    ));

    let specs: [(Stage3Kind, u8, Lottery, Lottery, Option<String>); 8] = [
        (
            Stage3Kind::PredictedCommonConsequence,
            1,
            l(&[(mid, 1.0)])?,
            l(&[(top, keep / 2.0), (mid, tau + eps), (0.0, keep / 2.0)])?,
            None,
        ),
        (
            Stage3Kind::PredictedCommonConsequence,
            2,
            l(&[(mid, keep), (0.0, tau + eps)])?,
            l(&[(top, keep / 2.0), (0.0, 1.0 - keep / 2.0)])?,
            None,
        ),
        (Stage3Kind::PredictedCommonRatio, 1, l(&[(b, 0.8), (0.0, 0.2)])?, l(&[(mid, 1.0)])?, None),
        (
            Stage3Kind::PredictedCommonRatio,
            2,
            l(&[(b, 0.8 * keep), (0.0, 1.0 - 0.8 * keep)])?,
            l(&[(mid, keep), (0.0, tau + eps)])?,
            None,
        ),
        (
            Stage3Kind::NoReversalCommonConsequence,
            1,
            l(&[(d / 10.0 + c, 1.0)])?,
            l(&[(d / 5.0 + c, 0.5), (d / 10.0 + c, 0.1), (0.0, 0.4)])?,
            zero_note.clone(),
        ),
        (
            Stage3Kind::NoReversalCommonConsequence,
            2,
            l(&[(d / 10.0 + c, 0.9), (0.0, 0.1)])?,
            l(&[(d / 5.0 + c, 0.5), (0.0, 0.5)])?,
            zero_note.clone(),
        ),
        (
            Stage3Kind::NoReversalCommonRatio,
            1,
            l(&[((d + eps) / 4.0 + c, 1.0)])?,
            l(&[((d + eps) / 3.0 + c, 0.5), (0.0, 0.5)])?,
            zero_note.clone(),
        ),
        (
            Stage3Kind::NoReversalCommonRatio,
            2,
            l(&[((d + eps) / 4.0 + c, 0.9), (0.0, 0.1)])?,
            l(&[((d + eps) / 3.0 + c, 0.45), (0.0, 0.55)])?,
            zero_note,
        ),
    ];
    let tasks = specs
        .into_iter()
        .enumerate()
        .map(|(i, (kind, member, a, opt_b, note))| {
            let mut t = ChoiceTask::new(3, i + 1, a, opt_b);
            t.stage3 = Some(Stage3Meta { kind, member, note });
            t
        })
        .collect();
    Ok(StageTable { stage: 3, tasks })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    AThenB,
    BThenA,
    AllA,
    AllB,
}

/// A single crossing in a choice list. `switch_after_row = k` means rows
/// `1..=k` take the first option and the rest the other; `AllB` has
/// `k = 0` and `AllA` has `k = rows`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwitchResponse {
    pub direction: Direction,
    pub switch_after_row: usize,
}

impl SwitchResponse {
    pub fn validate(&self, rows: usize) -> Result<(), ExperimentError> {
        let k = self.switch_after_row;
        let ok = match self.direction {
            Direction::AllA => k == rows,
            Direction::AllB => k == 0,
            Direction::AThenB | Direction::BThenA => k >= 1 && k < rows,
        };
        if ok {
            Ok(())
        } else {
            Err(ExperimentError::BadResponse { rows })
        }
    }

    pub fn is_switch(&self) -> bool {
        matches!(self.direction, Direction::AThenB | Direction::BThenA)
    }

    pub fn choices(&self, rows: usize) -> Vec<Choice> {
        let k = self.switch_after_row;
        (1..=rows)
            .map(|r| match self.direction {
                Direction::AllA => Choice::A,
                Direction::AllB => Choice::B,
                Direction::AThenB => if r <= k { Choice::A } else { Choice::B },
                Direction::BThenA => if r <= k { Choice::B } else { Choice::A },
            })
            .collect()
    }

    /// Reads the first crossing of a row of choices. The flag is set when
    /// the row crosses more than once.
    pub fn from_choices(choices: &[Choice]) -> Result<(Self, bool), ExperimentError> {
        let rows = choices.len();
        if rows == 0 {
            return Err(ExperimentError::BadResponse { rows });
        }
        let crossings: Vec<usize> = choices.windows(2).enumerate().filter(|(_, w)| w[0] != w[1]).map(|(i, _)| i + 1).collect();
        let response = match (crossings.first(), choices[0]) {
            (None, Choice::A) => Self { direction: Direction::AllA, switch_after_row: rows },
            (None, Choice::B) => Self { direction: Direction::AllB, switch_after_row: 0 },
            (Some(&k), Choice::A) => Self { direction: Direction::AThenB, switch_after_row: k },
            (Some(&k), Choice::B) => Self { direction: Direction::BThenA, switch_after_row: k },
        };
        Ok((response, crossings.len() > 1))
    }
}

/// A recorded threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    /// `None` when the response had no switch.
    pub interval: Option<(f64, f64)>,
    pub point: Option<f64>,
    /// Point estimate, or the configured fallback when there is none.
    pub used: f64,
    /// Set when no switch was observed and the fallback is in use.
    pub untested: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimates {
    pub d: Estimate,
    pub tau: Option<Estimate>,
}

/// Stage 1: a switch after row `k` records `d = 44 (k + 1)` with interval
/// `(44 k, 44 (k + 1))`.
pub fn record_d(response: &SwitchResponse, config: &ExperimentConfig) -> Result<Estimate, ExperimentError> {
    response.validate(config.stage1_rows)?;
    if !response.is_switch() {
        return Ok(Estimate { interval: None, point: None, used: config.fallback_d, untested: true });
    }
    let k = response.switch_after_row as f64;
    let w = config.space.worst();
    let lo = w + config.stage1_increment * k;
    let hi = w + config.stage1_increment * (k + 1.0);
    Ok(Estimate { interval: Some((lo, hi)), point: Some(hi), used: hi, untested: false })
}

/// Stage 2: a switch after row `k` records `τ ∈ (y_k, y_{k+1})` with the
/// midpoint as the point estimate.
pub fn record_tau(response: &SwitchResponse, config: &ExperimentConfig) -> Result<Estimate, ExperimentError> {
    let y = &config.stage2_y_grid;
    response.validate(y.len())?;
    if !response.is_switch() {
        return Ok(Estimate { interval: None, point: None, used: config.fallback_tau, untested: true });
    }
    let k = response.switch_after_row;
    let (lo, hi) = (y[k - 1], y[k]);
    let mid = 0.5 * (lo + hi);
    Ok(Estimate { interval: Some((lo, hi)), point: Some(mid), used: mid, untested: false })
}

/// A simulated choice; `tie` is set when the values were equal within the
/// indifference tolerance and A was taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulatedChoice {
    pub choice: Choice,
    pub tie: bool,
}

pub fn simulate_choice(model: &EcuModel, task: &ChoiceTask) -> Result<SimulatedChoice, ExperimentError> {
    let eval = |l: &Lottery| model.evaluate(l).map_err(|e| ExperimentError::Evaluation(format!("{e}")));
    let (va, vb) = (eval(&task.option_a)?, eval(&task.option_b)?);
    Ok(match crate::model::Preference::from_values(va, vb, crate::model::INDIFFERENCE_TOLERANCE) {
        crate::model::Preference::Second => SimulatedChoice { choice: Choice::B, tie: false },
        crate::model::Preference::First => SimulatedChoice { choice: Choice::A, tie: false },
        crate::model::Preference::Indifferent => SimulatedChoice { choice: Choice::A, tie: true },
    })
}

/// The paid task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Payment {
    /// Index into the 28 tasks in presentation order.
    pub task_index: usize,
    pub task_id: String,
    pub choice: Choice,
    /// Uniform draw used for the inverse-CDF prize draw.
    pub draw: f64,
    pub points: f64,
    pub usd: f64,
}

pub fn usd_for_points(points: f64, config: &ExperimentConfig) -> f64 {
    points * config.usd_per_point + config.show_up_fee_usd
}

/// Picks one answered task uniformly and draws its chosen option.
pub fn realize_payment<R: Rng + ?Sized>(
    tasks: &[ChoiceTask],
    choices: &[Choice],
    config: &ExperimentConfig,
    rng: &mut R,
) -> Result<Payment, ExperimentError> {
    let expected = config.total_tasks();
    if tasks.len() != expected || choices.len() != expected {
        return Err(ExperimentError::Incomplete { expected, got: choices.len().min(tasks.len()) });
    }
    let task_index = rng.random_range(0..expected);
    let draw: f64 = rng.random();
    let task = &tasks[task_index];
    let choice = choices[task_index];
    let points = task.option(choice).quantile(draw);
    Ok(Payment { task_index, task_id: task.id.clone(), choice, draw, points, usd: usd_for_points(points, config) })
}

/// Flags raised while running a session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SessionFlag {
    /// Stage 1 had no switch; stage 2 used the fallback threshold.
    DUntested,
    /// Stage 2 had no switch; stage 3 used the fallback tolerance.
    TauUntested,
    /// More than one crossing in stage 1; the first one was recorded.
    MultiSwitchStage1,
    MultiSwitchStage2,
    /// At least one simulated choice was a tie broken toward A.
    TieBrokenTowardA,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulatedSession {
    pub seed: u64,
    /// All 28 tasks in presentation order.
    pub tasks: Vec<ChoiceTask>,
    pub choices: Vec<Choice>,
    pub stage1: SwitchResponse,
    pub stage2: SwitchResponse,
    pub estimates: ThresholdEstimates,
    pub flags: Vec<SessionFlag>,
    pub payment: Payment,
}

impl SimulatedSession {
    pub fn stage_choices(&self, stage: u8) -> impl Iterator<Item = Choice> + '_ {
        self.tasks.iter().zip(&self.choices).filter(move |(t, _)| t.stage == stage).map(|(_, &c)| c)
    }
}

/// Runs all three stages exactly as a live session would. Deterministic
/// given the seed, which drives only the payment draw.
pub fn simulate_session(model: &EcuModel, config: &ExperimentConfig, seed: u64) -> Result<SimulatedSession, ExperimentError> {
    let mut flags = Vec::new();
    let mut tasks = Vec::with_capacity(config.total_tasks());
    let mut choices = Vec::with_capacity(config.total_tasks());
    let mut tie = false;
    let mut answer = |table: StageTable, tasks: &mut Vec<ChoiceTask>, choices: &mut Vec<Choice>| -> Result<Vec<Choice>, ExperimentError> {
        let mut row = Vec::with_capacity(table.tasks.len());
        for t in table.tasks {
            let c = simulate_choice(model, &t)?;
            tie |= c.tie;
            row.push(c.choice);
            choices.push(c.choice);
            tasks.push(t);
        }
        Ok(row)
    };

    let row1 = answer(build_stage1(config)?, &mut tasks, &mut choices)?;
    let (stage1, multi1) = SwitchResponse::from_choices(&row1)?;
    if multi1 {
        flags.push(SessionFlag::MultiSwitchStage1);
    }
    let d = record_d(&stage1, config)?;
    if d.untested {
        flags.push(SessionFlag::DUntested);
    }

    let row2 = answer(build_stage2(d.used, config)?, &mut tasks, &mut choices)?;
    let (stage2, multi2) = SwitchResponse::from_choices(&row2)?;
    if multi2 {
        flags.push(SessionFlag::MultiSwitchStage2);
    }
    let tau = record_tau(&stage2, config)?;
    if tau.untested {
        flags.push(SessionFlag::TauUntested);
    }

    answer(build_stage3(d.used, tau.used, config)?, &mut tasks, &mut choices)?;
    if tie {
        flags.push(SessionFlag::TieBrokenTowardA);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let payment = realize_payment(&tasks, &choices, config, &mut rng)?;
    Ok(SimulatedSession {
        seed,
        tasks,
        choices,
        stage1,
        stage2,
        estimates: ThresholdEstimates { d, tau: Some(tau) },
        flags,
        payment,
    })
}

/// Random agents for simulation studies.
pub mod agents {
    use super::*;
    use crate::model::UtilityCurve;

    /// A binary ECU with concave `u = t^a` and convex `v = t^c` over the
    /// experiment's prize space, `d` strictly inside stage-1 gap
    /// `(z_k, z_{k+1})` and `τ` strictly inside a `y` grid gap below 0.9.
    ///
    /// Such an agent picks B on rows with a disappointing worst prize and A
    /// on the others, and in stage 2 picks A while `y <= τ` and B after.
    pub fn switching_binary<R: Rng + ?Sized>(rng: &mut R, config: &ExperimentConfig) -> EcuModel {
        let k = rng.random_range(1..config.stage1_rows);
        let (lo, hi) = (config.stage1_worst(k), config.stage1_worst(k + 1));
        let d = lo + (hi - lo) * rng.random_range(0.05..0.95);
        let y = &config.stage2_y_grid;
        let gaps: Vec<usize> = (0..y.len() - 1).filter(|&i| y[i + 1] < 0.9).collect();
        let g = gaps[rng.random_range(0..gaps.len())];
        let tau = y[g] + (y[g + 1] - y[g]) * rng.random_range(0.05..0.95);
        let a = rng.random_range(0.3..0.8);
        let c = rng.random_range(1.3..2.5);
        let scale = rng.random_range(1.0..100.0);
        EcuModel::binary(
            config.space,
            d,
            tau,
            UtilityCurve::Power { low: 0.0, high: scale, exponent: a },
            UtilityCurve::Power { low: 0.0, high: scale, exponent: c },
        )
        .expect("generated agent is a valid binary ECU")
    }

    /// An expected-utility agent with a power utility, concave or convex.
    pub fn expected_utility<R: Rng + ?Sized>(rng: &mut R, config: &ExperimentConfig) -> EcuModel {
        let exponent = if rng.random_bool(0.5) { rng.random_range(0.3..0.9) } else { rng.random_range(1.1..2.5) };
        EcuModel::expected_utility(config.space, UtilityCurve::Power { low: 0.0, high: 1.0, exponent }).expect("valid curve")
    }
}
