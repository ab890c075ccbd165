//! Event-sourced participant sessions.
//!
//! A session is a fold over its events. Commands validate against the
//! current state and return the events to append; [`Session::apply`] is the
//! only place state changes, so replaying the log rebuilds it exactly.

use ecu_core::experiment::{
    build_stage2, build_stage3, realize_payment, record_d, record_tau, Choice, ChoiceTask, Estimate, ExperimentError,
    Payment, SessionFlag, SwitchResponse, STAGE3_TASKS,
};
use ecu_core::stats::report::Gender;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::content::{Content, MAX_QUIZ_ATTEMPTS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Instructions,
    Quiz,
    S1,
    S2,
    S3,
    Review,
    Done,
    LockedOut,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SessionError {
    #[error("unknown content version {0:?}")]
    UnknownContent(String),
    #[error("action not allowed in stage {0:?}")]
    WrongStage(Stage),
    #[error("quiz attempts exhausted")]
    LockedOut,
    #[error("stage {0} was already answered")]
    AlreadyAnswered(u8),
    #[error("response crosses between the options more than once")]
    MultiSwitch,
    #[error("invalid response: {0}")]
    InvalidResponse(String),
    #[error("task {got:?} is not the pending task {expected:?}")]
    OutOfOrder { expected: String, got: String },
    #[error("task {0:?} was already answered")]
    DuplicateAnswer(String),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error("event {seq} does not follow sequence {last}")]
    Sequence { last: u64, seq: u64 },
    #[error("event log does not start with a creation event")]
    NotCreated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Event {
    Created {
        content_id: String,
        seed: u64,
        token: String,
        #[serde(default)]
        gender: Option<Gender>,
    },
    QuizSubmitted { answers: Vec<usize>, passed: bool },
    SwitchSubmitted { stage: u8, response: SwitchResponse },
    Stage3Chosen { task_id: String, choice: Choice },
    PaymentRealized { payment: Payment },
    Completed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub session_id: String,
    /// Starts at 1 and has no gaps within a session.
    pub seq: u64,
    pub timestamp_ms: u64,
    pub event: Event,
}

/// A stage-1 or stage-2 submission: an explicit crossing, or raw row
/// choices that must contain at most one crossing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SwitchPayload {
    Response(SwitchResponse),
    Choices { choices: Vec<Choice> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Answer {
    pub task: ChoiceTask,
    pub choice: Choice,
    pub timestamp_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub token: String,
    pub content_id: String,
    pub created_at_ms: u64,
    pub seed: u64,
    pub gender: Option<Gender>,
    pub stage: Stage,
    pub quiz_attempts_used: u32,
    pub quiz_passed: bool,
    pub stage1: Option<SwitchResponse>,
    pub stage2: Option<SwitchResponse>,
    pub d: Option<Estimate>,
    pub tau: Option<Estimate>,
    /// Every answered task in presentation order.
    pub answers: Vec<Answer>,
    pub flags: Vec<SessionFlag>,
    pub payment: Option<Payment>,
    /// Sequence number of the last applied event.
    pub seq: u64,
}

/// Outcome of a quiz attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum QuizOutcome {
    Passed,
    Retry { remaining: u32 },
    LockedOut,
}

impl Session {
    /// State right after creation.
    pub fn create(id: &str, record: &EventRecord) -> Result<Self, SessionError> {
        let Event::Created { content_id, seed, token, gender } = &record.event else {
            return Err(SessionError::NotCreated);
        };
        if record.seq != 1 {
            return Err(SessionError::Sequence { last: 0, seq: record.seq });
        }
        Ok(Self {
            id: id.into(),
            token: token.clone(),
            content_id: content_id.clone(),
            created_at_ms: record.timestamp_ms,
            seed: *seed,
            gender: *gender,
            stage: Stage::Instructions,
            quiz_attempts_used: 0,
            quiz_passed: false,
            stage1: None,
            stage2: None,
            d: None,
            tau: None,
            answers: Vec::new(),
            flags: Vec::new(),
            payment: None,
            seq: 1,
        })
    }

    /// Rebuilds a session from its full event history.
    pub fn replay(content: &Content, records: &[EventRecord]) -> Result<Self, SessionError> {
        let (first, rest) = records.split_first().ok_or(SessionError::NotCreated)?;
        let mut s = Self::create(&first.session_id, first)?;
        for r in rest {
            s.apply(content, r)?;
        }
        Ok(s)
    }

    /// Folds one event into the state. Events are trusted: they were
    /// validated by a command before being logged.
    pub fn apply(&mut self, content: &Content, record: &EventRecord) -> Result<(), SessionError> {
        if record.seq != self.seq + 1 {
            return Err(SessionError::Sequence { last: self.seq, seq: record.seq });
        }
        let config = &content.config;
        let at = record.timestamp_ms;
        match &record.event {
            Event::Created { .. } => return Err(SessionError::WrongStage(self.stage)),
            Event::QuizSubmitted { passed, .. } => {
                self.quiz_attempts_used += 1;
                if *passed {
                    self.quiz_passed = true;
                    self.stage = Stage::S1;
                } else if self.quiz_attempts_used >= MAX_QUIZ_ATTEMPTS {
                    self.stage = Stage::LockedOut;
                } else {
                    self.stage = Stage::Quiz;
                }
            }
            Event::SwitchSubmitted { stage: 1, response } => {
                let tasks = content.stage1.clone();
                self.record_rows(tasks, response, at);
                let d = record_d(response, config)?;
                if d.untested {
                    self.flags.push(SessionFlag::DUntested);
                }
                self.stage1 = Some(*response);
                self.d = Some(d);
                self.stage = Stage::S2;
            }
            Event::SwitchSubmitted { stage: 2, response } => {
                let d = self.d.ok_or(SessionError::WrongStage(self.stage))?;
                let tasks = build_stage2(d.used, config)?.tasks;
                self.record_rows(tasks, response, at);
                let tau = record_tau(response, config)?;
                if tau.untested {
                    self.flags.push(SessionFlag::TauUntested);
                }
                self.stage2 = Some(*response);
                self.tau = Some(tau);
                self.stage = Stage::S3;
            }
            Event::SwitchSubmitted { stage, .. } => return Err(SessionError::AlreadyAnswered(*stage)),
            Event::Stage3Chosen { task_id, choice } => {
                let pending = self.pending_task(content)?.ok_or(SessionError::WrongStage(self.stage))?;
                if &pending.id != task_id {
                    return Err(SessionError::OutOfOrder { expected: pending.id, got: task_id.clone() });
                }
                let task = pending;
                self.answers.push(Answer { task, choice: *choice, timestamp_ms: at });
            }
            Event::PaymentRealized { payment } => {
                self.payment = Some(payment.clone());
                self.stage = Stage::Review;
            }
            Event::Completed => self.stage = Stage::Done,
        }
        self.seq = record.seq;
        Ok(())
    }

    fn record_rows(&mut self, tasks: Vec<ChoiceTask>, response: &SwitchResponse, at: u64) {
        let choices = response.choices(tasks.len());
        self.answers.extend(tasks.into_iter().zip(choices).map(|(task, choice)| Answer { task, choice, timestamp_ms: at }));
    }

    fn stage3_tasks(&self, content: &Content) -> Result<Vec<ChoiceTask>, SessionError> {
        match (self.d, self.tau) {
            (Some(d), Some(tau)) => Ok(build_stage3(d.used, tau.used, &content.config)?.tasks),
            _ => Err(SessionError::WrongStage(self.stage)),
        }
    }

    pub fn stage3_answered(&self) -> usize {
        self.answers.iter().filter(|a| a.task.stage == 3).count()
    }

    /// The next unanswered stage-3 task, if any remain.
    pub fn pending_task(&self, content: &Content) -> Result<Option<ChoiceTask>, SessionError> {
        let n = self.stage3_answered();
        Ok(self.stage3_tasks(content)?.into_iter().nth(n))
    }

    /// Tasks to show in the current stage: the full table in stages 1 and
    /// 2, only the pending task in stage 3.
    pub fn tasks(&self, content: &Content) -> Result<Vec<ChoiceTask>, SessionError> {
        match self.stage {
            Stage::S1 => Ok(content.stage1.clone()),
            Stage::S2 => {
                let d = self.d.ok_or(SessionError::WrongStage(self.stage))?;
                Ok(build_stage2(d.used, &content.config)?.tasks)
            }
            Stage::S3 => Ok(self.pending_task(content)?.into_iter().collect()),
            other => Err(SessionError::WrongStage(other)),
        }
    }

    // ---- commands: validate, then return the events to append ----

    pub fn submit_quiz(&self, content: &Content, answers: Vec<usize>) -> Result<(Vec<Event>, QuizOutcome), SessionError> {
        match self.stage {
            Stage::Instructions | Stage::Quiz => {}
            Stage::LockedOut => return Err(SessionError::LockedOut),
            other => return Err(SessionError::WrongStage(other)),
        }
        let passed = content.grade(&answers);
        let used = self.quiz_attempts_used + 1;
        let outcome = if passed {
            QuizOutcome::Passed
        } else if used >= MAX_QUIZ_ATTEMPTS {
            QuizOutcome::LockedOut
        } else {
            QuizOutcome::Retry { remaining: MAX_QUIZ_ATTEMPTS - used }
        };
        Ok((vec![Event::QuizSubmitted { answers, passed }], outcome))
    }

    pub fn submit_switch(&self, content: &Content, stage: u8, payload: SwitchPayload) -> Result<Vec<Event>, SessionError> {
        if !(1..=2).contains(&stage) {
            return Err(SessionError::InvalidResponse(format!("stage {stage} is not a choice list")));
        }
        let current = match self.stage {
            Stage::S1 => 1,
            Stage::S2 => 2,
            Stage::S3 | Stage::Review | Stage::Done => 3,
            other => return Err(SessionError::WrongStage(other)),
        };
        if stage < current {
            return Err(SessionError::AlreadyAnswered(stage));
        }
        if stage > current {
            return Err(SessionError::WrongStage(self.stage));
        }
        let rows = if stage == 1 { content.config.stage1_rows } else { content.config.stage2_y_grid.len() };
        let response = match payload {
            SwitchPayload::Response(r) => r,
            SwitchPayload::Choices { choices } => {
                if choices.len() != rows {
                    return Err(SessionError::InvalidResponse(format!("expected {rows} choices, got {}", choices.len())));
                }
                let (r, multi) = SwitchResponse::from_choices(&choices)?;
                if multi {
                    return Err(SessionError::MultiSwitch);
                }
                r
            }
        };
        response.validate(rows).map_err(|e| SessionError::InvalidResponse(e.to_string()))?;
        // Building the next stage must succeed before anything is logged.
        let mut probe = self.clone();
        probe.apply(content, &EventRecord {
            session_id: self.id.clone(),
            seq: self.seq + 1,
            timestamp_ms: 0,
            event: Event::SwitchSubmitted { stage, response },
        })?;
        if stage == 2 {
            probe.stage3_tasks(content)?;
        }
        Ok(vec![Event::SwitchSubmitted { stage, response }])
    }

    pub fn submit_stage3(&self, content: &Content, task_id: &str, choice: Choice) -> Result<Vec<Event>, SessionError> {
        if self.stage != Stage::S3 {
            return Err(SessionError::WrongStage(self.stage));
        }
        let all = self.stage3_tasks(content)?;
        let answered = self.stage3_answered();
        let pending = &all[answered];
        if pending.id != task_id {
            if all[..answered].iter().any(|t| t.id == task_id) {
                return Err(SessionError::DuplicateAnswer(task_id.into()));
            }
            return Err(SessionError::OutOfOrder { expected: pending.id.clone(), got: task_id.into() });
        }
        let mut events = vec![Event::Stage3Chosen { task_id: task_id.into(), choice }];
        if answered + 1 == STAGE3_TASKS {
            let mut tasks: Vec<ChoiceTask> = self.answers.iter().map(|a| a.task.clone()).collect();
            let mut choices: Vec<Choice> = self.answers.iter().map(|a| a.choice).collect();
            tasks.push(pending.clone());
            choices.push(choice);
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            let payment = realize_payment(&tasks, &choices, &content.config, &mut rng)?;
            events.push(Event::PaymentRealized { payment });
        }
        Ok(events)
    }

    pub fn complete(&self) -> Result<Vec<Event>, SessionError> {
        match self.stage {
            Stage::Review => Ok(vec![Event::Completed]),
            other => Err(SessionError::WrongStage(other)),
        }
    }

    /// Choices of one stage in row order.
    pub fn stage_choices(&self, stage: u8) -> Vec<Choice> {
        self.answers.iter().filter(|a| a.task.stage == stage).map(|a| a.choice).collect()
    }

    /// Reached review with a payment, or carries a flag.
    pub fn exportable(&self) -> bool {
        matches!(self.stage, Stage::Review | Stage::Done) || !self.flags.is_empty()
    }
}
