//! JSON-over-HTTP session service.
//!
//! | method | path                               | body / query          |
//! |--------|------------------------------------|-----------------------|
//! | POST   | `/sessions`                        | `{"graph": {...}}` or `{"builtin": "example"}` |
//! | GET    | `/sessions/{id}`                   |                       |
//! | POST   | `/sessions/{id}/mutate`            | `{"direction": i}`    |
//! | POST   | `/sessions/{id}/undo`              |                       |
//! | GET    | `/sessions/{id}/neighborhood`      | `?radius=r`, `r ≤ 2`  |
//! | GET    | `/sessions/{id}/algebra`           |                       |
//!
//! Errors are `{"error": {"kind": ..., "message": ...}}` with status 404
//! (`not_found`), 400 (`invalid`), 413 (`limit`) or 500 (`internal`).

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{FromRequestParts, Path, Query, State};
use axum::http::request::Parts;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use lpgraph_core::graphlp::{build_algebra, BuildOptions, GraphLPAlgebra};
use lpgraph_core::{Digraph, GraphJson};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::session::{Session, SeedView};
use crate::Failure;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    kind: &'static str,
    message: String,
}

impl ApiError {
    fn not_found(id: u64) -> Self {
        ApiError { status: StatusCode::NOT_FOUND, kind: "not_found", message: format!("no session {id}") }
    }

    fn invalid(message: impl Into<String>) -> Self {
        ApiError { status: StatusCode::BAD_REQUEST, kind: "invalid", message: message.into() }
    }
}

impl From<Failure> for ApiError {
    fn from(f: Failure) -> Self {
        match f {
            Failure::Input(m) => ApiError::invalid(m),
            Failure::Limit(m) => ApiError { status: StatusCode::PAYLOAD_TOO_LARGE, kind: "limit", message: m },
            other => ApiError { status: StatusCode::INTERNAL_SERVER_ERROR, kind: "internal", message: other.to_string() },
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::invalid(r.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(r: QueryRejection) -> Self {
        ApiError::invalid(r.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": { "kind": self.kind, "message": self.message } }))).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

/// Session id from the path; anything but a number names no session.
pub struct SessionId(u64);

impl<S: Send + Sync> FromRequestParts<S> for SessionId {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &S) -> Result<Self, Self::Rejection> {
        match Path::<String>::from_request_parts(parts, state).await {
            Ok(Path(raw)) => raw.parse().map(SessionId).map_err(|_| ApiError { status: StatusCode::NOT_FOUND, kind: "not_found", message: format!("no session {raw:?}") }),
            Err(e) => Err(ApiError::invalid(e.body_text())),
        }
    }
}

/// An algebra built at most once per graph; build errors are kept as text.
type AlgebraCell = Arc<OnceLock<Result<Arc<GraphLPAlgebra>, String>>>;

/// Sessions by id. Each session sits behind its own lock, so requests on one
/// session run one at a time while different sessions proceed in parallel.
/// Algebras are shared between sessions on the same graph and never change
/// once built.
pub struct AppState {
    sessions: RwLock<HashMap<u64, Arc<Mutex<Session>>>>,
    next_id: AtomicU64,
    options: BuildOptions,
    algebras: Mutex<HashMap<String, AlgebraCell>>,
}

impl AppState {
    pub fn new(options: BuildOptions) -> Self {
        AppState { sessions: RwLock::default(), next_id: AtomicU64::new(1), options, algebras: Mutex::default() }
    }

    fn session(&self, id: u64) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.sessions.read().expect("session table").get(&id).cloned().ok_or(ApiError::not_found(id))
    }

    fn algebra(&self, g: &Digraph) -> Result<Arc<GraphLPAlgebra>, Failure> {
        let key = serde_json::to_string(&g.to_json()).expect("graph JSON");
        let cell = self.algebras.lock().expect("algebra cache").entry(key).or_default().clone();
        cell.get_or_init(|| build_algebra(g, self.options).map(Arc::new).map_err(|e| e.to_string())).clone().map_err(Failure::Input)
    }
}

/// Runs `f` on the session off the async workers, holding its lock.
async fn with_session<T: Send + 'static>(state: &Arc<AppState>, id: u64, f: impl FnOnce(&mut Session) -> Result<T, Failure> + Send + 'static) -> Result<T, ApiError> {
    let session = state.session(id)?;
    tokio::task::spawn_blocking(move || {
        let mut s = session.lock().unwrap_or_else(|p| p.into_inner());
        f(&mut s)
    })
    .await
    .map_err(|e| ApiError::from(Failure::Internal(e.to_string())))?
    .map_err(ApiError::from)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateRequest {
    #[serde(default)]
    graph: Option<GraphJson>,
    #[serde(default)]
    builtin: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct Created {
    pub session: u64,
    #[serde(flatten)]
    pub view: SeedView,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MutateRequest {
    direction: usize,
}

#[derive(Debug, Deserialize)]
pub struct RadiusQuery {
    #[serde(default = "default_radius")]
    radius: usize,
}

fn default_radius() -> usize {
    1
}

#[derive(Debug, Serialize)]
pub struct AlgebraSummary {
    pub seeds: usize,
    pub variables: usize,
    pub complete: bool,
}

async fn create(State(state): State<Arc<AppState>>, body: Result<Json<CreateRequest>, JsonRejection>) -> Result<(StatusCode, Json<Created>), ApiError> {
    let Json(req) = body?;
    let g = match (req.graph, req.builtin) {
        (Some(j), None) => Digraph::from_json(&j).map_err(Failure::from)?,
        (None, Some(name)) => Digraph::builtin(&name).map_err(Failure::from)?,
        _ => return Err(ApiError::invalid("give exactly one of \"graph\" and \"builtin\"")),
    };
    if g.n() > state.options.cap {
        return Err(Failure::Limit(format!("{} vertices exceeds the cap {}", g.n(), state.options.cap)).into());
    }
    let session = Session::new(g);
    let view = session.view();
    let id = state.next_id.fetch_add(1, Ordering::Relaxed);
    state.sessions.write().expect("session table").insert(id, Arc::new(Mutex::new(session)));
    log::info!("session {id} created");
    Ok((StatusCode::CREATED, Json(Created { session: id, view })))
}

async fn current(State(state): State<Arc<AppState>>, SessionId(id): SessionId) -> ApiResult<SeedView> {
    Ok(Json(with_session(&state, id, |s| Ok(s.view())).await?))
}

async fn mutate(State(state): State<Arc<AppState>>, SessionId(id): SessionId, body: Result<Json<MutateRequest>, JsonRejection>) -> ApiResult<crate::session::MutationView> {
    let Json(req) = body?;
    Ok(Json(with_session(&state, id, move |s| s.mutate(req.direction)).await?))
}

async fn undo(State(state): State<Arc<AppState>>, SessionId(id): SessionId) -> ApiResult<SeedView> {
    Ok(Json(with_session(&state, id, |s| s.undo()).await?))
}

async fn neighborhood(State(state): State<Arc<AppState>>, SessionId(id): SessionId, query: Result<Query<RadiusQuery>, QueryRejection>) -> ApiResult<crate::session::Neighborhood> {
    let Query(q) = query?;
    Ok(Json(with_session(&state, id, move |s| s.neighborhood(q.radius)).await?))
}

async fn algebra(State(state): State<Arc<AppState>>, SessionId(id): SessionId) -> ApiResult<AlgebraSummary> {
    let shared = state.clone();
    let alg = with_session(&state, id, move |s| shared.algebra(s.graph())).await?;
    Ok(Json(AlgebraSummary { seeds: alg.seed_count(), variables: alg.variable_count(), complete: alg.complete }))
}

async fn fallback() -> ApiError {
    ApiError { status: StatusCode::NOT_FOUND, kind: "not_found", message: "no such endpoint".into() }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(current))
        .route("/sessions/{id}/mutate", post(mutate))
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/neighborhood", get(neighborhood))
        .route("/sessions/{id}/algebra", get(algebra))
        .fallback(fallback)
        .with_state(state)
}

pub async fn serve(addr: std::net::SocketAddr, options: BuildOptions) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(Arc::new(AppState::new(options))))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
