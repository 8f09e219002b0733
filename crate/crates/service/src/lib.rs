//! HTTP/JSON API over the clearing engine.
//!
//! Each session holds a system, the actions committed to it and, for the
//! dollar-auction scenario, the auction state. Requests against one session
//! are serialized; different sessions proceed in parallel. Solving runs on
//! the blocking pool.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use finclear::games::{
    game_report, AuctionPlayer, AuctionState, GameReport, ScenarioParams, SCENARIOS,
};
use finclear::{
    apply_action, assess, auction_step, build_scenario, find_solutions, Action, BankId,
    EffectReport, Error, FinancialSystem, SolveReport, SolverConfig, Strategy, SystemDocument,
    ValidationReport,
};
use serde::{Deserialize, Serialize};
use tokio::sync::Mutex;
use tower_http::cors::CorsLayer;

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub message: String,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
    message: &'a str,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }

    fn not_found(what: impl std::fmt::Display) -> Self {
        Self::new(StatusCode::NOT_FOUND, format!("{what} not found"))
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Document { .. }
            | Error::Json(_)
            | Error::InvalidParams(_)
            | Error::InvalidConfig(_)
            | Error::MissingRate(_)
            | Error::RateOutOfRange { .. } => StatusCode::BAD_REQUEST,
            Error::UnknownScenario(_) => StatusCode::NOT_FOUND,
            Error::InvalidSystem(_) => StatusCode::UNPROCESSABLE_ENTITY,
            Error::TooLarge { .. } => StatusCode::SERVICE_UNAVAILABLE,
            Error::UnknownBank(_)
            | Error::ContractNotFound(_)
            | Error::WrongCreditor { .. }
            | Error::WrongDebtor { .. }
            | Error::NotADebt(_)
            | Error::PriorityOutOfRange { .. }
            | Error::InvalidAction(_) => StatusCode::CONFLICT,
        };
        Self::new(status, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let error = self.status.canonical_reason().unwrap_or("error");
        let body = ErrorBody {
            error,
            message: &self.message,
        };
        (self.status, Json(serde_json::to_value(body).unwrap())).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

struct Session {
    scenario: Option<String>,
    initial: FinancialSystem,
    current: FinancialSystem,
    history: Vec<Action>,
    auction: Option<AuctionState>,
}

impl Session {
    fn new(system: FinancialSystem) -> Self {
        Self {
            scenario: None,
            initial: system.clone(),
            current: system,
            history: Vec::new(),
            auction: None,
        }
    }

    fn view(&self, id: u64) -> SessionView {
        SessionView {
            id,
            scenario: self.scenario.clone(),
            system: SystemDocument::from_system(&self.current),
            history: self.history.clone(),
            validation: self.current.validate(),
        }
    }
}

#[derive(Serialize)]
pub struct SessionView {
    pub id: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    pub system: SystemDocument,
    pub history: Vec<Action>,
    pub validation: ValidationReport,
}

#[derive(Serialize)]
pub struct CommitResponse {
    pub session: SessionView,
    pub solutions: SolveReport,
}

#[derive(Serialize)]
pub struct ScenarioSummary {
    pub name: String,
    pub players: Vec<BankId>,
    pub strategies: Vec<Vec<Strategy>>,
    pub params: ScenarioParams,
}

#[derive(Serialize)]
pub struct ScenarioSession {
    pub session: SessionView,
    pub scenario: ScenarioSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub auction: Option<AuctionState>,
}

struct Inner {
    sessions: RwLock<HashMap<u64, Arc<Mutex<Session>>>>,
    next_id: AtomicU64,
    cfg: SolverConfig,
}

/// Shared state: the session store and the solver configuration.
#[derive(Clone)]
pub struct AppState(Arc<Inner>);

impl AppState {
    pub fn new(cfg: SolverConfig) -> Self {
        Self(Arc::new(Inner {
            sessions: RwLock::new(HashMap::new()),
            next_id: AtomicU64::new(1),
            cfg,
        }))
    }

    fn insert(&self, session: Session) -> (u64, Arc<Mutex<Session>>) {
        let id = self.0.next_id.fetch_add(1, Ordering::Relaxed);
        let s = Arc::new(Mutex::new(session));
        self.0.sessions.write().unwrap().insert(id, s.clone());
        (id, s)
    }

    fn session(&self, id: u64) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.0
            .sessions
            .read()
            .unwrap()
            .get(&id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(format!("session {id}")))
    }

    fn cfg(&self) -> SolverConfig {
        self.0.cfg.clone()
    }
}

async fn blocking<T, F>(f: F) -> Result<T, ApiError>
where
    F: FnOnce() -> finclear::Result<T> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
        .map_err(ApiError::from)
}

fn parse_json<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))
}

async fn create_system(State(app): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let text = std::str::from_utf8(&body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?;
    let system = finclear::parse_system(text)?;
    system.validate().into_result()?;
    let session = Session::new(system);
    let view = session.view(0);
    let (id, _) = app.insert(session);
    Ok((StatusCode::CREATED, Json(SessionView { id, ..view })).into_response())
}

async fn get_system(State(app): State<AppState>, Path(id): Path<u64>) -> ApiResult<SessionView> {
    let s = app.session(id)?;
    let s = s.lock().await;
    Ok(Json(s.view(id)))
}

#[derive(Deserialize)]
struct SolveQuery {
    #[serde(default)]
    all: bool,
}

async fn solutions(
    State(app): State<AppState>,
    Path(id): Path<u64>,
    Query(q): Query<SolveQuery>,
) -> ApiResult<SolveReport> {
    let system = app.session(id)?.lock().await.current.clone();
    let cfg = app.cfg();
    let report = blocking(move || {
        let set = find_solutions(&system, &cfg)?;
        Ok(SolveReport::new(&system, set, q.all))
    })
    .await?;
    Ok(Json(report))
}

async fn preview(
    State(app): State<AppState>,
    Path(id): Path<u64>,
    body: Bytes,
) -> ApiResult<EffectReport> {
    let action: Action = parse_json(&body)?;
    let system = app.session(id)?.lock().await.current.clone();
    let acting = action.actor(&system)?;
    let cfg = app.cfg();
    let report = blocking(move || assess(&system, &action, acting.as_str(), &cfg)).await?;
    Ok(Json(report))
}

async fn solve_into(app: &AppState, system: FinancialSystem) -> Result<SolveReport, ApiError> {
    let cfg = app.cfg();
    blocking(move || {
        let set = find_solutions(&system, &cfg)?;
        Ok(SolveReport::new(&system, set, true))
    })
    .await
}

async fn commit(
    State(app): State<AppState>,
    Path(id): Path<u64>,
    body: Bytes,
) -> ApiResult<CommitResponse> {
    let action: Action = parse_json(&body)?;
    let handle = app.session(id)?;
    // Held across the solve so commits to one session apply in order.
    let mut s = handle.lock().await;
    let next = apply_action(&s.current, &action)?;
    let solutions = solve_into(&app, next.clone()).await?;
    s.current = next;
    s.history.push(action);
    Ok(Json(CommitResponse {
        session: s.view(id),
        solutions,
    }))
}

async fn undo(State(app): State<AppState>, Path(id): Path<u64>) -> ApiResult<CommitResponse> {
    let handle = app.session(id)?;
    let mut s = handle.lock().await;
    if s.history.is_empty() {
        return Err(ApiError::new(StatusCode::CONFLICT, "nothing to undo"));
    }
    let mut history = s.history.clone();
    history.pop();
    let mut system = s.initial.clone();
    for a in &history {
        system = apply_action(&system, a)?;
    }
    let solutions = solve_into(&app, system.clone()).await?;
    s.current = system;
    s.history = history;
    Ok(Json(CommitResponse {
        session: s.view(id),
        solutions,
    }))
}

async fn list_scenarios() -> ApiResult<Vec<ScenarioSummary>> {
    let mut out = Vec::new();
    for name in SCENARIOS {
        let sc = build_scenario(name, &ScenarioParams::default())?;
        out.push(ScenarioSummary {
            name: sc.name,
            players: sc.players,
            strategies: sc.strategies,
            params: sc.params,
        });
    }
    Ok(Json(out))
}

async fn create_scenario(
    State(app): State<AppState>,
    Path(name): Path<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let params: ScenarioParams = if body.iter().all(u8::is_ascii_whitespace) {
        ScenarioParams::default()
    } else {
        parse_json(&body)?
    };
    let sc = build_scenario(&name, &params)?;
    let mut session = Session::new(sc.system);
    session.scenario = Some(sc.name.clone());
    if sc.name == "dollar_auction" {
        let eps = sc.params.epsilon.unwrap_or(finclear::games::DEFAULT_EPSILON);
        session.auction = Some(AuctionState::new(eps)?);
    }
    let auction = session.auction.clone();
    let view = session.view(0);
    let (id, _) = app.insert(session);
    let body = ScenarioSession {
        session: SessionView { id, ..view },
        scenario: ScenarioSummary {
            name: sc.name,
            players: sc.players,
            strategies: sc.strategies,
            params: sc.params,
        },
        auction,
    };
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

async fn game_matrix(
    State(app): State<AppState>,
    Path(name): Path<String>,
    Query(params): Query<ScenarioParams>,
) -> ApiResult<GameReport> {
    let sc = build_scenario(&name, &params)?;
    let cfg = app.cfg();
    Ok(Json(blocking(move || game_report(&sc, &cfg)).await?))
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct StepRequest {
    player: Option<AuctionPlayer>,
}

async fn auction(
    State(app): State<AppState>,
    Path(id): Path<u64>,
    body: Bytes,
) -> ApiResult<AuctionState> {
    let req: StepRequest = if body.iter().all(u8::is_ascii_whitespace) {
        StepRequest::default()
    } else {
        parse_json(&body)?
    };
    let handle = app.session(id)?;
    let mut s = handle.lock().await;
    let state = s
        .auction
        .clone()
        .ok_or_else(|| ApiError::new(StatusCode::CONFLICT, "session is not an auction"))?;
    let player = req.player.unwrap_or_else(|| state.next_player());
    let cfg = app.cfg();
    let next = blocking(move || auction_step(&state, player, &cfg)).await?;
    s.auction = Some(next.clone());
    Ok(Json(next))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/systems", post(create_system))
        .route("/systems/{id}", get(get_system))
        .route("/systems/{id}/solutions", get(solutions))
        .route("/systems/{id}/actions/preview", post(preview))
        .route("/systems/{id}/actions/commit", post(commit))
        .route("/systems/{id}/undo", post(undo))
        .route("/scenarios", get(list_scenarios))
        .route("/scenarios/{name}", post(create_scenario))
        .route("/games/{name}/matrix", get(game_matrix))
        .route("/auction/{id}/step", post(auction))
        .layer(CorsLayer::permissive())
        .with_state(state)
}

/// Serves the API until the process is stopped.
pub async fn serve(addr: SocketAddr, cfg: SolverConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(AppState::new(cfg))).await
}
