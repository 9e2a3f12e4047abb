//! HTTP/JSON API over the catalog and game sessions.
//!
//! Each session sits behind its own mutex, so pushes to one session are
//! serialized while different sessions proceed independently. With a persist
//! path, every mutation rewrites the session file before responding.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::algebra::Modulus;
use crate::catalog::{Catalog, DiagramSummary};
use crate::cli::{part_summaries, signable_sides, PartSummary};
use crate::diagram::{DiagramFile, DiagramShadow, Shade, Shading};
use crate::engine::{new_session, GameSession, Hint, SessionError, SessionSource, SessionState};
use crate::game::{build_game_matrix, Coloring, GameConfig, GameError, IncrementOverride, PushPattern};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("cannot read sessions from {path}: {message}")]
    Persist { path: PathBuf, message: String },
}

#[derive(Debug, Error)]
pub enum ApiError {
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    BadRequest(String),
    #[error("{0}")]
    Unprocessable(String),
    #[error("{0}")]
    Internal(String),
}

impl ApiError {
    fn status(&self) -> StatusCode {
        match self {
            ApiError::NotFound(_) => StatusCode::NOT_FOUND,
            ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::Unprocessable(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status(), Json(json!({ "error": self.to_string() }))).into_response()
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        match e {
            SessionError::NotAKnot(_) | SessionError::NoVertices | SessionError::Game(GameError::NotAKnot(_)) => {
                ApiError::Unprocessable(e.to_string())
            }
            SessionError::Corrupt(_) => ApiError::Internal(e.to_string()),
            _ => ApiError::BadRequest(e.to_string()),
        }
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

pub struct AppState {
    catalog: Catalog,
    sessions: RwLock<HashMap<String, Arc<Mutex<GameSession>>>>,
    persist: Option<PathBuf>,
    persist_lock: Mutex<()>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SessionFile {
    sessions: Vec<SessionState>,
}

impl AppState {
    /// Restores sessions from `persist` when the file exists.
    pub fn new(catalog: Catalog, persist: Option<PathBuf>) -> Result<Arc<AppState>, ServiceError> {
        let mut sessions = HashMap::new();
        if let Some(path) = persist.as_deref().filter(|p| p.exists()) {
            let fail = |message: String| ServiceError::Persist {
                path: path.to_path_buf(),
                message,
            };
            let text = std::fs::read_to_string(path).map_err(|e| fail(e.to_string()))?;
            let file: SessionFile = serde_json::from_str(&text).map_err(|e| fail(e.to_string()))?;
            for state in file.sessions {
                let shadow = catalog
                    .get(&state.diagram)
                    .ok_or_else(|| fail(format!("session {} uses unknown diagram {}", state.id, state.diagram)))?;
                let session = GameSession::restore(&state, shadow.clone()).map_err(|e| fail(e.to_string()))?;
                sessions.insert(state.id.clone(), Arc::new(Mutex::new(session)));
            }
        }
        Ok(Arc::new(AppState {
            catalog,
            sessions: RwLock::new(sessions),
            persist,
            persist_lock: Mutex::new(()),
        }))
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn session_count(&self) -> usize {
        self.sessions.read().expect("session map lock").len()
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<GameSession>>, ApiError> {
        self.sessions
            .read()
            .expect("session map lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::NotFound(format!("no game with id {id}")))
    }

    /// Writes every session, snapshotting under the write lock so the file
    /// never regresses to an older state.
    fn save(&self) -> Result<(), ApiError> {
        let Some(path) = &self.persist else {
            return Ok(());
        };
        let _guard = self.persist_lock.lock().expect("persist lock");
        let handles: Vec<_> = self.sessions.read().expect("session map lock").values().cloned().collect();
        let mut sessions: Vec<SessionState> = handles.iter().map(|s| s.lock().expect("session lock").state()).collect();
        sessions.sort_by(|a, b| a.id.cmp(&b.id));
        write_atomically(path, &SessionFile { sessions }).map_err(|e| ApiError::Internal(format!("cannot persist sessions: {e}")))
    }
}

fn write_atomically(path: &Path, file: &SessionFile) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, serde_json::to_vec_pretty(file).expect("sessions serialize"))?;
    std::fs::rename(tmp, path)
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/diagrams", get(list_diagrams))
        .route("/api/diagrams/{name}", get(get_diagram))
        .route("/api/games", post(create_game))
        .route("/api/games/{id}", get(get_game))
        .route("/api/games/{id}/push", post(push))
        .route("/api/games/{id}/undo", post(undo))
        .route("/api/games/{id}/reset", post(reset))
        .route("/api/games/{id}/hint", get(hint))
        .route("/api/games/{id}/solution", get(solution))
        .route("/api/analyze", post(analyze))
        .with_state(state)
}

/// Serves until ctrl-c.
pub async fn serve(listener: tokio::net::TcpListener, state: Arc<AppState>) -> std::io::Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

/// JSON bodies are parsed here so malformed input is a 400, not a 422.
fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::BadRequest(format!("invalid request body: {e}")))
}

async fn list_diagrams(State(state): State<Arc<AppState>>) -> Json<Vec<DiagramSummary>> {
    Json(state.catalog.summaries())
}

async fn get_diagram(State(state): State<Arc<AppState>>, UrlPath(name): UrlPath<String>) -> ApiResult<DiagramFile> {
    state
        .catalog
        .get(&name)
        .map(|s| Json(s.to_file()))
        .ok_or_else(|| ApiError::NotFound(format!("no diagram named {name}")))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewGame {
    pub diagram: String,
    pub k: Modulus,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub coloring: Option<Coloring>,
    #[serde(default)]
    pub increments: Vec<IncrementOverride>,
}

async fn create_game(State(state): State<Arc<AppState>>, body: Bytes) -> Result<(StatusCode, Json<SessionState>), ApiError> {
    let request: NewGame = parse_body(&body)?;
    let shadow = state
        .catalog
        .get(&request.diagram)
        .ok_or_else(|| ApiError::NotFound(format!("no diagram named {}", request.diagram)))?
        .clone();
    let source = match (request.seed, request.coloring) {
        (Some(_), Some(_)) => return Err(ApiError::BadRequest("give either seed or coloring, not both".into())),
        (_, Some(c)) => SessionSource::Coloring(c),
        (Some(seed), None) => SessionSource::Seed(seed),
        (None, None) => SessionSource::Seed(rand::random()),
    };
    let config = GameConfig::new(request.k).with_overrides(&request.increments);
    let id = uuid::Uuid::new_v4().simple().to_string();
    let session = new_session(id.clone(), shadow, config, source)?;
    let snapshot = session.state();
    state
        .sessions
        .write()
        .expect("session map lock")
        .insert(id, Arc::new(Mutex::new(session)));
    state.save()?;
    Ok((StatusCode::CREATED, Json(snapshot)))
}

async fn get_game(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult<SessionState> {
    let session = state.session(&id)?;
    let snapshot = session.lock().expect("session lock").state();
    Ok(Json(snapshot))
}

/// Applies `change` under the session's lock, then persists.
fn mutate(
    state: &AppState,
    id: &str,
    change: impl FnOnce(&mut GameSession) -> Result<(), SessionError>,
) -> ApiResult<SessionState> {
    let session = state.session(id)?;
    let snapshot = {
        let mut s = session.lock().expect("session lock");
        change(&mut s)?;
        s.state()
    };
    state.save()?;
    Ok(Json(snapshot))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PushRequest {
    pub region: usize,
    #[serde(default = "plus_one")]
    pub sign: i64,
}

fn plus_one() -> i64 {
    1
}

async fn push(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>, body: Bytes) -> ApiResult<SessionState> {
    let request: PushRequest = parse_body(&body)?;
    mutate(&state, &id, |s| s.push(request.region, request.sign))
}

async fn undo(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult<SessionState> {
    mutate(&state, &id, GameSession::undo)
}

async fn reset(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult<SessionState> {
    mutate(&state, &id, |s| {
        s.reset();
        Ok(())
    })
}

async fn hint(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult<Hint> {
    let session = state.session(&id)?;
    let hint = session.lock().expect("session lock").hint()?;
    Ok(Json(hint))
}

async fn solution(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult<PushPattern> {
    let session = state.session(&id)?;
    let pattern = session.lock().expect("session lock").solution()?;
    Ok(Json(pattern))
}

/// A catalog name or an inline diagram file.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum DiagramRef {
    Name(String),
    Inline(DiagramFile),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeRequest {
    pub diagram: DiagramRef,
    pub k: Modulus,
}

#[derive(Debug, Serialize)]
pub struct Analysis {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub components: usize,
    pub reducible_vertices: Vec<usize>,
    pub parts: Vec<PartSummary>,
    pub shading: Shading,
    /// Sides of the shading that admit an alternating signing.
    pub alternating: Vec<Shade>,
    /// Number of null patterns; `None` when infinite or not a knot diagram.
    pub kernel_size: Option<usize>,
}

pub fn analyze_shadow(shadow: Arc<DiagramShadow>, k: Modulus) -> Result<Analysis, ApiError> {
    let shading = shadow
        .checkerboard_shading()
        .map_err(|e| ApiError::Unprocessable(e.to_string()))?;
    let knot = shadow.is_knot();
    let parts = if knot {
        part_summaries(&shadow).map_err(ApiError::Unprocessable)?
    } else {
        Vec::new()
    };
    let kernel_size = if knot && k.is_finite() {
        let gm = build_game_matrix(shadow.clone(), GameConfig::new(k)).map_err(|e| ApiError::BadRequest(e.to_string()))?;
        Some(gm.enumerate_null_patterns().map_err(|e| ApiError::Internal(e.to_string()))?.len())
    } else {
        None
    };
    Ok(Analysis {
        name: shadow.name().to_string(),
        n: shadow.vertex_count(),
        m: shadow.region_count(),
        components: shadow.component_count(),
        reducible_vertices: shadow.reducible_vertices().iter().map(|r| r.vertex).collect(),
        parts,
        shading,
        alternating: signable_sides(&shadow).into_iter().collect(),
        kernel_size,
    })
}

async fn analyze(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<Analysis> {
    let request: AnalyzeRequest = parse_body(&body)?;
    let shadow = match request.diagram {
        DiagramRef::Name(name) => state
            .catalog
            .get(&name)
            .cloned()
            .ok_or_else(|| ApiError::NotFound(format!("no diagram named {name}")))?,
        DiagramRef::Inline(file) => Arc::new(DiagramShadow::from_file(file).map_err(|e| ApiError::BadRequest(e.to_string()))?),
    };
    analyze_shadow(shadow, request.k).map(Json)
}
