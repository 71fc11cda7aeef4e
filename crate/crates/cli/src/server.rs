//! HTTP session service. One game definition per process; sessions live in
//! memory and each one's actions are applied one at a time.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use mystery_core::engine::{apply, legal_actions, new_game, Action, EngineError, EventRecord, GameState};
use mystery_core::game::GameDefinition;
use serde::Serialize;
use uuid::Uuid;

use crate::view::{activity_entry, view_state, ActivityEntry, ViewState};

type Session = Arc<Mutex<GameState>>;

pub struct AppState {
    def: GameDefinition,
    initial: GameState,
    sessions: Mutex<HashMap<String, Session>>,
}

impl AppState {
    /// Fails when the definition is invalid.
    pub fn new(def: GameDefinition) -> Result<Self, EngineError> {
        let initial = new_game(&def)?;
        Ok(AppState {
            def,
            initial,
            sessions: Mutex::new(HashMap::new()),
        })
    }

    fn session(&self, id: &str) -> Result<Session, ApiError> {
        self.sessions
            .lock()
            .expect("session table lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(id))
    }
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    legal_actions: Option<Vec<Action>>,
}

struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn not_found(id: &str) -> Self {
        ApiError {
            status: StatusCode::NOT_FOUND,
            body: ErrorBody {
                error: format!("no session {id}"),
                legal_actions: None,
            },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

#[derive(Debug, Serialize)]
pub struct Created {
    pub session_id: String,
    pub state: ViewState,
}

#[derive(Debug, Serialize)]
pub struct ActionResult {
    pub events: Vec<ActivityEntry>,
    pub state: ViewState,
}

async fn create_session(State(app): State<Arc<AppState>>) -> (StatusCode, Json<Created>) {
    let id = Uuid::new_v4().to_string();
    let state = app.initial.clone();
    let view = view_state(&app.def, &state);
    app.sessions
        .lock()
        .expect("session table lock")
        .insert(id.clone(), Arc::new(Mutex::new(state)));
    log::info!("session {id} created");
    (
        StatusCode::CREATED,
        Json(Created {
            session_id: id,
            state: view,
        }),
    )
}

async fn get_state(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<ViewState>, ApiError> {
    let session = app.session(&id)?;
    let state = session.lock().expect("session lock");
    Ok(Json(view_state(&app.def, &state)))
}

async fn post_action(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<ActionResult>, ApiError> {
    let session = app.session(&id)?;
    let mut state = session.lock().expect("session lock");
    let action: Action = serde_json::from_slice(&body).map_err(|e| ApiError {
        status: StatusCode::BAD_REQUEST,
        body: ErrorBody {
            error: format!("malformed action: {e}"),
            legal_actions: Some(legal_actions(&state, &app.def)),
        },
    })?;
    match apply(&state, &action, &app.def) {
        Ok((next, _)) => {
            let new_records: Vec<ActivityEntry> = next.activity_log[state.activity_log.len()..]
                .iter()
                .map(|r| activity_entry(&app.def, r))
                .collect();
            *state = next;
            Ok(Json(ActionResult {
                events: new_records,
                state: view_state(&app.def, &state),
            }))
        }
        Err(e) => Err(ApiError {
            status: StatusCode::CONFLICT,
            body: ErrorBody {
                error: e.to_string(),
                legal_actions: Some(legal_actions(&state, &app.def)),
            },
        }),
    }
}

async fn get_events(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<Vec<EventRecord>>, ApiError> {
    let session = app.session(&id)?;
    let state = session.lock().expect("session lock");
    Ok(Json(state.activity_log.clone()))
}

pub fn router(def: GameDefinition) -> Result<Router, EngineError> {
    let app = Arc::new(AppState::new(def)?);
    Ok(Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/state", get(get_state))
        .route("/sessions/{id}/actions", post(post_action))
        .route("/sessions/{id}/events", get(get_events))
        .with_state(app))
}
