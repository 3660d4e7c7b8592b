//! HTTP API over the dialogue engine.
//!
//! Sessions live only in memory. Every answered message is appended to the
//! transcript store before the response is returned.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, RwLock};

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use framechat_core::engine::{DialogueState, Engine, Origin};
use framechat_core::qa::{answer_or_delegate, AnswerProvider, NoProvider};
use framechat_core::store::{context_graph, InteractionRecord, TranscriptStore};
use serde::{Deserialize, Serialize};
use tokio::sync::Mutex;
use tracing::{info, warn};

/// A pack ready to serve: its engine and static graph.
#[derive(Debug)]
pub struct ServedPack {
    pub name: String,
    pub engine: Engine,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SessionHandle {
    pub session_id: String,
    pub created_at: DateTime<Utc>,
    pub pack_name: String,
}

struct Session {
    handle: SessionHandle,
    pack: Arc<ServedPack>,
    state: DialogueState,
    turns: u32,
}

#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

struct Inner {
    packs: BTreeMap<String, Arc<ServedPack>>,
    default_pack: String,
    provider: Arc<dyn AnswerProvider>,
    store: Arc<TranscriptStore>,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
}

impl AppState {
    /// `packs` must be non-empty; the first one is used when a create
    /// request names no pack.
    pub fn new(packs: Vec<ServedPack>, provider: Option<Arc<dyn AnswerProvider>>, store: Arc<TranscriptStore>) -> Self {
        let default_pack = packs.first().map(|p| p.name.clone()).expect("at least one pack");
        Self {
            inner: Arc::new(Inner {
                packs: packs.into_iter().map(|p| (p.name.clone(), Arc::new(p))).collect(),
                default_pack,
                provider: provider.unwrap_or_else(|| Arc::new(NoProvider)),
                store,
                sessions: RwLock::new(HashMap::new()),
            }),
        }
    }

    pub fn store(&self) -> &TranscriptStore {
        &self.inner.store
    }

    fn session(&self, id: &str) -> Option<Arc<Mutex<Session>>> {
        self.inner.sessions.read().unwrap_or_else(|p| p.into_inner()).get(id).cloned()
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/:id", get(get_session))
        .route("/api/sessions/:id/messages", post(post_message))
        .route("/api/packs", get(list_packs))
        .route("/api/packs/:name/graph", get(pack_graph))
        .with_state(state)
}

#[derive(Debug)]
pub enum ApiError {
    UnknownPack(String),
    UnknownSession(String),
    BadRequest(String),
    Internal(String),
}

#[derive(Serialize)]
struct ErrorBody {
    error: String,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, error) = match self {
            ApiError::UnknownPack(p) => (StatusCode::NOT_FOUND, format!("unknown pack `{p}`")),
            ApiError::UnknownSession(s) => (StatusCode::NOT_FOUND, format!("unknown session `{s}`")),
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, m),
            ApiError::Internal(m) => (StatusCode::INTERNAL_SERVER_ERROR, m),
        };
        (status, Json(ErrorBody { error })).into_response()
    }
}

#[derive(Debug, Default, Deserialize)]
pub struct CreateSession {
    pub pack: Option<String>,
}

async fn create_session(
    State(app): State<AppState>,
    body: Option<Json<CreateSession>>,
) -> Result<(StatusCode, Json<SessionHandle>), ApiError> {
    let name = body.and_then(|Json(b)| b.pack).unwrap_or_else(|| app.inner.default_pack.clone());
    let pack = app.inner.packs.get(&name).cloned().ok_or(ApiError::UnknownPack(name))?;
    let handle = SessionHandle {
        session_id: uuid::Uuid::new_v4().to_string(),
        created_at: Utc::now(),
        pack_name: pack.name.clone(),
    };
    let session = Session { handle: handle.clone(), state: pack.engine.new_session(), pack, turns: 0 };
    app.inner
        .sessions
        .write()
        .unwrap_or_else(|p| p.into_inner())
        .insert(handle.session_id.clone(), Arc::new(Mutex::new(session)));
    info!(session = %handle.session_id, pack = %handle.pack_name, "session created");
    Ok((StatusCode::CREATED, Json(handle)))
}

#[derive(Debug, Deserialize)]
pub struct PostMessage {
    pub utterance: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct MessageReply {
    pub response: String,
    pub origin: Origin,
    pub matched_context: Option<String>,
    pub transitions: Vec<String>,
    pub cycle_suggested: bool,
    pub turn: u32,
}

async fn post_message(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Json(body): Json<PostMessage>,
) -> Result<Json<MessageReply>, ApiError> {
    let session = app.session(&id).ok_or_else(|| ApiError::UnknownSession(id.clone()))?;
    if body.utterance.trim().is_empty() {
        return Err(ApiError::BadRequest("utterance must not be empty".into()));
    }
    let mut session = session.lock().await;
    let session = &mut *session;
    let turn = answer_or_delegate(&session.pack.engine, &mut session.state, app.inner.provider.as_ref(), &body.utterance);
    if let Some(failure) = &turn.provider_failure {
        warn!(session = %id, turn = session.turns + 1, %failure, "answer provider failed; engine answered");
    }
    let number = session.turns + 1;
    let record = InteractionRecord::from_turn(&id, number, &body.utterance, &turn.result);
    app.inner.store.append(record).map_err(|e| ApiError::Internal(e.to_string()))?;
    session.turns = number;
    let r = turn.result;
    Ok(Json(MessageReply {
        response: r.response_text,
        origin: r.origin,
        matched_context: r.matched_context,
        transitions: r.transitions,
        cycle_suggested: r.cycle_suggested,
        turn: number,
    }))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionView {
    #[serde(flatten)]
    pub handle: SessionHandle,
    pub current_context: String,
    pub transcript: Vec<InteractionRecord>,
}

async fn get_session(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<SessionView>, ApiError> {
    let session = app.session(&id).ok_or_else(|| ApiError::UnknownSession(id.clone()))?;
    let session = session.lock().await;
    Ok(Json(SessionView {
        handle: session.handle.clone(),
        current_context: session.state.current_context.clone(),
        transcript: app.inner.store.session(&id),
    }))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PackSummary {
    pub name: String,
    pub default_context: String,
    pub contexts: usize,
}

async fn list_packs(State(app): State<AppState>) -> Json<Vec<PackSummary>> {
    Json(
        app.inner
            .packs
            .values()
            .map(|p| PackSummary {
                name: p.name.clone(),
                default_context: p.engine.script_set().default_context.clone(),
                contexts: p.engine.script_set().contexts.len(),
            })
            .collect(),
    )
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphView {
    pub pack: String,
    pub adjacency: BTreeMap<String, BTreeSet<String>>,
}

async fn pack_graph(State(app): State<AppState>, Path(name): Path<String>) -> Result<Json<GraphView>, ApiError> {
    let pack = app.inner.packs.get(&name).ok_or(ApiError::UnknownPack(name))?;
    Ok(Json(GraphView { pack: pack.name.clone(), adjacency: context_graph(pack.engine.script_set()) }))
}
