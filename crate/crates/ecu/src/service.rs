//! HTTP/JSON session service.
//!
//! [`Engine`] owns the sessions and the store; the axum router is a thin
//! layer over it. Every mutation of one session runs under that session's
//! lock: validate, append to the log, then apply. Sessions never share a
//! lock, so they proceed independently.
//!
//! | route | body | stage |
//! |---|---|---|
//! | `POST /sessions` | `{content_id?, seed?, gender?}` | creates at `instructions` |
//! | `POST /sessions/{id}/quiz` | `{answers}` | `instructions`, `quiz` |
//! | `GET /sessions/{id}/tasks` | | `s1`, `s2`, `s3` |
//! | `POST /sessions/{id}/switch` | `{stage, direction, switch_after_row}` or `{stage, choices}` | `s1`, `s2` |
//! | `POST /sessions/{id}/stage3` | `{task_id, choice}` | `s3` |
//! | `GET /sessions/{id}/review` | | `review`, `done` |
//! | `POST /sessions/{id}/complete` | | `review` |
//! | `GET /sessions/{id}` | | any |
//! | `GET /export.csv` | | operator token |
//!
//! Session routes need `Authorization: Bearer <token>` with the token
//! returned at creation. Errors are `{"code", "message"}`.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use ecu_core::experiment::{Choice, ChoiceTask, Direction, Estimate, Payment, SessionFlag, SwitchResponse};
use ecu_core::stats::report::Gender;
use serde::{Deserialize, Serialize};

use crate::content::{Content, PublicQuestion, MAX_QUIZ_ATTEMPTS};
use crate::session::{Event, EventRecord, QuizOutcome, Session, SessionError, Stage, SwitchPayload};
use crate::store::{Store, StoreError};
use crate::transcript::{self, TranscriptSource};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: u16,
    pub code: String,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Self { status: status.as_u16(), code: code.into(), message: message.into() }
    }

    fn not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", format!("no session {id}"))
    }

    fn unauthorized() -> Self {
        Self::new(StatusCode::UNAUTHORIZED, "unauthorized", "missing or wrong bearer token")
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        use StatusCode as S;
        let (status, code) = match &e {
            SessionError::UnknownContent(_) => (S::BAD_REQUEST, "unknown_content"),
            SessionError::WrongStage(_) => (S::CONFLICT, "wrong_stage"),
            SessionError::LockedOut => (S::FORBIDDEN, "locked_out"),
            SessionError::AlreadyAnswered(_) => (S::CONFLICT, "already_answered"),
            SessionError::MultiSwitch => (S::UNPROCESSABLE_ENTITY, "multi_switch"),
            SessionError::InvalidResponse(_) => (S::UNPROCESSABLE_ENTITY, "invalid_response"),
            SessionError::OutOfOrder { .. } => (S::CONFLICT, "out_of_order"),
            SessionError::DuplicateAnswer(_) => (S::CONFLICT, "duplicate_answer"),
            SessionError::Experiment(_) => (S::UNPROCESSABLE_ENTITY, "experiment"),
            SessionError::Sequence { .. } | SessionError::NotCreated => (S::INTERNAL_SERVER_ERROR, "internal"),
        };
        Self::new(status, code, e.to_string())
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "storage", e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CreateRequest {
    #[serde(default)]
    pub content_id: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub gender: Option<Gender>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Created {
    pub id: String,
    pub token: String,
    pub stage: Stage,
    pub quiz: Vec<PublicQuestion>,
    pub quiz_attempts: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuizRequest {
    pub answers: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuizResponse {
    #[serde(flatten)]
    pub outcome: QuizOutcome,
    pub stage: Stage,
}

/// Either an explicit crossing or raw row choices.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SwitchRequest {
    pub stage: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Direction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub switch_after_row: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choices: Option<Vec<Choice>>,
}

impl SwitchRequest {
    fn payload(self) -> Result<SwitchPayload, ApiError> {
        match (self.direction, self.switch_after_row, self.choices) {
            (Some(direction), Some(k), None) => Ok(SwitchPayload::Response(SwitchResponse { direction, switch_after_row: k })),
            (None, None, Some(choices)) => Ok(SwitchPayload::Choices { choices }),
            _ => Err(ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "invalid_response",
                "send either direction with switch_after_row, or choices",
            )),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Stage3Request {
    pub task_id: String,
    pub choice: Choice,
}

/// A task as shown to participants; options in `prize:probability` form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskView {
    pub id: String,
    pub stage: u8,
    pub row: usize,
    pub option_a: String,
    pub option_b: String,
}

impl From<&ChoiceTask> for TaskView {
    fn from(t: &ChoiceTask) -> Self {
        Self { id: t.id.clone(), stage: t.stage, row: t.row, option_a: t.option_a.to_string(), option_b: t.option_b.to_string() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TasksView {
    pub stage: Stage,
    pub tasks: Vec<TaskView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: String,
    pub stage: Stage,
    pub quiz_attempts_used: u32,
    pub quiz_attempts_remaining: u32,
    pub quiz_passed: bool,
    pub d: Option<Estimate>,
    pub tau: Option<Estimate>,
    pub flags: Vec<SessionFlag>,
    pub stage3_answered: usize,
    pub payment: Option<Payment>,
}

impl From<&Session> for SessionView {
    fn from(s: &Session) -> Self {
        Self {
            id: s.id.clone(),
            stage: s.stage,
            quiz_attempts_used: s.quiz_attempts_used,
            quiz_attempts_remaining: MAX_QUIZ_ATTEMPTS.saturating_sub(s.quiz_attempts_used),
            quiz_passed: s.quiz_passed,
            d: s.d,
            tau: s.tau,
            flags: s.flags.clone(),
            stage3_answered: s.stage3_answered(),
            payment: s.payment.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Review {
    pub task: TaskView,
    pub choice: Choice,
    pub chosen_option: String,
    pub drawn_points: f64,
    pub points_usd: f64,
    pub show_up_fee_usd: f64,
    pub total_usd: f64,
}

pub type Clock = Box<dyn Fn() -> u64 + Send + Sync>;

pub struct Engine {
    content: Content,
    store: Option<Store>,
    sessions: RwLock<BTreeMap<String, Arc<Mutex<Session>>>>,
    operator_token: Option<String>,
    clock: Clock,
}

impl Engine {
    /// An engine that keeps sessions in memory only.
    pub fn in_memory(content: Content) -> Self {
        Self { content, store: None, sessions: RwLock::default(), operator_token: None, clock: Box::new(crate::now_ms) }
    }

    /// An engine backed by a store, resuming every session found in it.
    pub fn with_store(content: Content, store: Store, sessions: BTreeMap<String, Session>) -> Self {
        let sessions = sessions.into_iter().map(|(k, s)| (k, Arc::new(Mutex::new(s)))).collect();
        Self { content, store: Some(store), sessions: RwLock::new(sessions), operator_token: None, clock: Box::new(crate::now_ms) }
    }

    pub fn operator_token(mut self, token: Option<String>) -> Self {
        self.operator_token = token;
        self
    }

    pub fn clock(mut self, clock: Clock) -> Self {
        self.clock = clock;
        self
    }

    pub fn content(&self) -> &Content {
        &self.content
    }

    pub fn store(&self) -> Option<&Store> {
        self.store.as_ref()
    }

    fn handle(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.sessions.read().expect("session map poisoned").get(id).cloned().ok_or_else(|| ApiError::not_found(id))
    }

    fn commit(&self, session: &mut Session, events: Vec<Event>) -> Result<(), ApiError> {
        let now = (self.clock)();
        let records: Vec<EventRecord> = events
            .into_iter()
            .enumerate()
            .map(|(i, event)| EventRecord { session_id: session.id.clone(), seq: session.seq + 1 + i as u64, timestamp_ms: now, event })
            .collect();
        if let Some(store) = &self.store {
            store.append(&records)?;
        }
        for r in &records {
            session.apply(&self.content, r)?;
        }
        Ok(())
    }

    fn maybe_snapshot(&self) -> Result<(), ApiError> {
        if let Some(store) = &self.store {
            if store.snapshot_due() {
                store.write_snapshot(self.sessions())?;
            }
        }
        Ok(())
    }

    /// Runs a command on one session under its lock and commits the events
    /// it returns.
    fn command<R>(
        &self,
        id: &str,
        token: Option<&str>,
        f: impl FnOnce(&Session, &Content) -> Result<(Vec<Event>, R), SessionError>,
    ) -> Result<(R, SessionView), ApiError> {
        let handle = self.handle(id)?;
        let mut s = handle.lock().expect("session poisoned");
        if token != Some(s.token.as_str()) {
            return Err(ApiError::unauthorized());
        }
        let (events, out) = f(&s, &self.content)?;
        self.commit(&mut s, events)?;
        let view = SessionView::from(&*s);
        drop(s);
        self.maybe_snapshot()?;
        Ok((out, view))
    }

    fn read<R>(&self, id: &str, token: Option<&str>, f: impl FnOnce(&Session) -> Result<R, ApiError>) -> Result<R, ApiError> {
        let handle = self.handle(id)?;
        let s = handle.lock().expect("session poisoned");
        if token != Some(s.token.as_str()) {
            return Err(ApiError::unauthorized());
        }
        f(&s)
    }

    pub fn create(&self, req: CreateRequest) -> Result<Created, ApiError> {
        if let Some(c) = &req.content_id {
            if *c != self.content.content_id {
                return Err(SessionError::UnknownContent(c.clone()).into());
            }
        }
        let id = uuid::Uuid::new_v4().simple().to_string();
        let token = uuid::Uuid::new_v4().simple().to_string();
        let seed = req.seed.unwrap_or_else(rand::random);
        let record = EventRecord {
            session_id: id.clone(),
            seq: 1,
            timestamp_ms: (self.clock)(),
            event: Event::Created { content_id: self.content.content_id.clone(), seed, token: token.clone(), gender: req.gender },
        };
        let session = Session::create(&id, &record)?;
        if let Some(store) = &self.store {
            store.append(std::slice::from_ref(&record))?;
        }
        self.sessions.write().expect("session map poisoned").insert(id.clone(), Arc::new(Mutex::new(session)));
        self.maybe_snapshot()?;
        Ok(Created { id, token, stage: Stage::Instructions, quiz: self.content.public_quiz(), quiz_attempts: MAX_QUIZ_ATTEMPTS })
    }

    pub fn quiz(&self, id: &str, token: Option<&str>, req: QuizRequest) -> Result<QuizResponse, ApiError> {
        let (outcome, view) = self.command(id, token, |s, c| s.submit_quiz(c, req.answers))?;
        Ok(QuizResponse { outcome, stage: view.stage })
    }

    pub fn tasks(&self, id: &str, token: Option<&str>) -> Result<TasksView, ApiError> {
        self.read(id, token, |s| {
            let tasks = s.tasks(&self.content)?;
            Ok(TasksView { stage: s.stage, tasks: tasks.iter().map(TaskView::from).collect() })
        })
    }

    pub fn switch(&self, id: &str, token: Option<&str>, req: SwitchRequest) -> Result<SessionView, ApiError> {
        let stage = req.stage;
        let payload = req.payload()?;
        Ok(self.command(id, token, |s, c| Ok((s.submit_switch(c, stage, payload)?, ())))?.1)
    }

    pub fn stage3(&self, id: &str, token: Option<&str>, req: Stage3Request) -> Result<SessionView, ApiError> {
        Ok(self.command(id, token, |s, c| Ok((s.submit_stage3(c, &req.task_id, req.choice)?, ())))?.1)
    }

    pub fn complete(&self, id: &str, token: Option<&str>) -> Result<SessionView, ApiError> {
        Ok(self.command(id, token, |s, _| Ok((s.complete()?, ())))?.1)
    }

    pub fn view(&self, id: &str, token: Option<&str>) -> Result<SessionView, ApiError> {
        self.read(id, token, |s| Ok(SessionView::from(s)))
    }

    pub fn review(&self, id: &str, token: Option<&str>) -> Result<Review, ApiError> {
        self.read(id, token, |s| {
            let payment = match (&s.payment, s.stage) {
                (Some(p), Stage::Review | Stage::Done) => p,
                _ => return Err(SessionError::WrongStage(s.stage).into()),
            };
            let answer = &s.answers[payment.task_index];
            let config = &self.content.config;
            Ok(Review {
                task: TaskView::from(&answer.task),
                choice: payment.choice,
                chosen_option: answer.task.option(payment.choice).to_string(),
                drawn_points: payment.points,
                points_usd: payment.points * config.usd_per_point,
                show_up_fee_usd: config.show_up_fee_usd,
                total_usd: payment.usd,
            })
        })
    }

    /// Copies of every session, ordered by id.
    pub fn sessions(&self) -> Vec<Session> {
        let handles: Vec<Arc<Mutex<Session>>> = self.sessions.read().expect("session map poisoned").values().cloned().collect();
        handles.iter().map(|h| h.lock().expect("session poisoned").clone()).collect()
    }

    /// Transcript of completed and flagged sessions, ordered by id.
    pub fn export_csv(&self) -> String {
        let sessions: Vec<Session> = self.sessions().into_iter().filter(Session::exportable).collect();
        let sources: Vec<TranscriptSource<'_>> = sessions.iter().map(TranscriptSource::from_session).collect();
        transcript::to_string(&sources)
    }

    pub fn export_authorized(&self, token: Option<&str>) -> Result<String, ApiError> {
        match &self.operator_token {
            None => Err(ApiError::new(StatusCode::FORBIDDEN, "export_disabled", "no operator token is configured")),
            Some(t) if Some(t.as_str()) == token => Ok(self.export_csv()),
            Some(_) => Err(ApiError::unauthorized()),
        }
    }
}

fn bearer(headers: &HeaderMap) -> Option<&str> {
    headers.get(header::AUTHORIZATION)?.to_str().ok()?.strip_prefix("Bearer ")
}

type Shared = State<Arc<Engine>>;

async fn create(State(e): Shared, body: Option<Json<CreateRequest>>) -> Result<Json<Created>, ApiError> {
    Ok(Json(e.create(body.map(|b| b.0).unwrap_or_default())?))
}

async fn quiz(State(e): Shared, Path(id): Path<String>, h: HeaderMap, body: Result<Json<QuizRequest>, JsonRejection>) -> Result<Json<QuizResponse>, ApiError> {
    Ok(Json(e.quiz(&id, bearer(&h), body?.0)?))
}

async fn tasks(State(e): Shared, Path(id): Path<String>, h: HeaderMap) -> Result<Json<TasksView>, ApiError> {
    Ok(Json(e.tasks(&id, bearer(&h))?))
}

async fn switch(State(e): Shared, Path(id): Path<String>, h: HeaderMap, body: Result<Json<SwitchRequest>, JsonRejection>) -> Result<Json<SessionView>, ApiError> {
    Ok(Json(e.switch(&id, bearer(&h), body?.0)?))
}

async fn stage3(State(e): Shared, Path(id): Path<String>, h: HeaderMap, body: Result<Json<Stage3Request>, JsonRejection>) -> Result<Json<SessionView>, ApiError> {
    Ok(Json(e.stage3(&id, bearer(&h), body?.0)?))
}

async fn review(State(e): Shared, Path(id): Path<String>, h: HeaderMap) -> Result<Json<Review>, ApiError> {
    Ok(Json(e.review(&id, bearer(&h))?))
}

async fn complete(State(e): Shared, Path(id): Path<String>, h: HeaderMap) -> Result<Json<SessionView>, ApiError> {
    Ok(Json(e.complete(&id, bearer(&h))?))
}

async fn view(State(e): Shared, Path(id): Path<String>, h: HeaderMap) -> Result<Json<SessionView>, ApiError> {
    Ok(Json(e.view(&id, bearer(&h))?))
}

async fn export(State(e): Shared, h: HeaderMap) -> Result<Response, ApiError> {
    let csv = e.export_authorized(bearer(&h))?;
    Ok(([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], csv).into_response())
}

pub fn router(engine: Arc<Engine>) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(view))
        .route("/sessions/{id}/quiz", post(quiz))
        .route("/sessions/{id}/tasks", get(tasks))
        .route("/sessions/{id}/switch", post(switch))
        .route("/sessions/{id}/stage3", post(stage3))
        .route("/sessions/{id}/review", get(review))
        .route("/sessions/{id}/complete", post(complete))
        .route("/export.csv", get(export))
        .with_state(engine)
}

/// Serves until Ctrl-C.
pub async fn serve(engine: Arc<Engine>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(engine))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
