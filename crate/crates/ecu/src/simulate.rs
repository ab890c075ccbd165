//! Synthetic participants, run offline or through a live [`Engine`].

use ecu_core::experiment::{
    agents, simulate_choice, simulate_session, Choice, ChoiceTask, ExperimentConfig, ExperimentError, SimulatedSession,
    SwitchResponse,
};
use ecu_core::stats::report::{Gender, ParticipantRecord};
use ecu_core::{EcuModel, Lottery};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::service::{ApiError, CreateRequest, Engine, QuizRequest, Stage3Request, SwitchRequest, TaskView};
use crate::session::Stage;
use crate::transcript::{self, TranscriptSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Population {
    /// Binary ECU agents with a single stage-1 and stage-2 crossing.
    Switching,
    /// Expected-utility agents.
    Eu,
    /// Alternating switching and expected-utility agents.
    Mixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub id: String,
    pub model: EcuModel,
    pub gender: Option<Gender>,
    /// Seeds the payment draw.
    pub seed: u64,
}

/// `n` agents drawn deterministically from `seed`.
pub fn population(kind: Population, n: usize, seed: u64, config: &ExperimentConfig) -> Vec<Agent> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let switching = match kind {
                Population::Switching => true,
                Population::Eu => false,
                Population::Mixed => i % 2 == 0,
            };
            let model = if switching { agents::switching_binary(&mut rng, config) } else { agents::expected_utility(&mut rng, config) };
            let gender = Some(if rng.random_bool(0.5) { Gender::Female } else { Gender::Male });
            Agent { id: format!("agent-{i:04}"), model, gender, seed: rng.random() }
        })
        .collect()
}

/// Copies of one model, with per-agent payment seeds.
pub fn clones(model: &EcuModel, n: usize, seed: u64) -> Vec<Agent> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|i| Agent { id: format!("agent-{i:04}"), model: model.clone(), gender: None, seed: rng.random() }).collect()
}

pub fn run_offline(agent: &Agent, config: &ExperimentConfig) -> Result<SimulatedSession, ExperimentError> {
    simulate_session(&agent.model, config, agent.seed)
}

/// Analysis record of an offline run.
pub fn record(agent: &Agent, sim: &SimulatedSession) -> ParticipantRecord {
    ParticipantRecord {
        id: agent.id.clone(),
        stage1: sim.stage_choices(1).collect(),
        stage2: sim.stage_choices(2).collect(),
        stage3: sim.stage_choices(3).collect(),
        gender: agent.gender,
        d: sim.estimates.d.point,
        tau: sim.estimates.tau.and_then(|t| t.point),
    }
}

/// Transcript CSV of offline runs.
pub fn offline_transcript(agents: &[Agent], runs: &[SimulatedSession]) -> String {
    let sources: Vec<TranscriptSource<'_>> =
        agents.iter().zip(runs).map(|(a, s)| TranscriptSource::from_simulation(&a.id, s, a.gender)).collect();
    transcript::to_string(&sources)
}

#[derive(Debug, thiserror::Error)]
pub enum DriveError {
    #[error("service refused: {0:?}")]
    Api(ApiError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error(transparent)]
    Lottery(#[from] ecu_core::LotteryError),
}

impl From<ApiError> for DriveError {
    fn from(e: ApiError) -> Self {
        DriveError::Api(e)
    }
}

/// What the agent picks when shown a task.
fn choose(agent: &Agent, t: &TaskView) -> Result<Choice, DriveError> {
    let task = ChoiceTask {
        id: t.id.clone(),
        stage: t.stage,
        row: t.row,
        option_a: Lottery::parse(&t.option_a, agent.model.space)?,
        option_b: Lottery::parse(&t.option_b, agent.model.space)?,
        stage3: None,
    };
    Ok(simulate_choice(&agent.model, &task)?.choice)
}

/// Opens a live session for `agent`. Returns the session id and token.
pub fn start(engine: &Engine, agent: &Agent) -> Result<(String, String), DriveError> {
    let created = engine.create(CreateRequest { content_id: None, seed: Some(agent.seed), gender: agent.gender })?;
    Ok((created.id, created.token))
}

/// Makes the agent's next move in a live session, whatever stage it is in.
/// Returns `false` once the session is done.
pub fn step(engine: &Engine, agent: &Agent, id: &str, token: &str) -> Result<bool, DriveError> {
    let tok = Some(token);
    match engine.view(id, tok)?.stage {
        Stage::Instructions | Stage::Quiz => {
            let answers = engine.content().quiz.iter().map(|q| q.correct).collect();
            engine.quiz(id, tok, QuizRequest { answers })?;
        }
        stage @ (Stage::S1 | Stage::S2) => {
            let view = engine.tasks(id, tok)?;
            let choices = view.tasks.iter().map(|t| choose(agent, t)).collect::<Result<Vec<_>, _>>()?;
            let (first, multi) = SwitchResponse::from_choices(&choices)?;
            let stage = if stage == Stage::S1 { 1 } else { 2 };
            let req = if multi {
                SwitchRequest { stage, direction: Some(first.direction), switch_after_row: Some(first.switch_after_row), choices: None }
            } else {
                SwitchRequest { stage, choices: Some(choices), ..Default::default() }
            };
            engine.switch(id, tok, req)?;
        }
        Stage::S3 => {
            let view = engine.tasks(id, tok)?;
            let t = &view.tasks[0];
            let choice = choose(agent, t)?;
            engine.stage3(id, tok, Stage3Request { task_id: t.id.clone(), choice })?;
        }
        Stage::Review => {
            engine.complete(id, tok)?;
        }
        Stage::Done | Stage::LockedOut => return Ok(false),
    }
    Ok(true)
}

/// Takes one agent through a live session: quiz, both choice lists, the
/// eight single tasks and completion. Returns the session id and token.
pub fn drive(engine: &Engine, agent: &Agent) -> Result<(String, String), DriveError> {
    let (id, token) = start(engine, agent)?;
    while step(engine, agent, &id, &token)? {}
    Ok((id, token))
}
