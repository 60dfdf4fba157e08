//! JSON over HTTP access to proof sessions.
//!
//! Every response describing a session carries its revision. Requests that
//! change a session must quote the revision they were computed against and
//! are refused with `409 stale_revision` otherwise.
//!
//! Coordinates in requests are those of the diagram JSON (1000 units wide).

use std::collections::HashMap;
use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use moncat::diagram::{render_svg, BoxError, DiagramJson, Point, Polygon, StyleSheet};
use moncat::normalize::Verdict;
use moncat::rewrite::{to_neutral, Direction, ProofSession, SessionError, Side, StepError};
use moncat::syntax::{parse_goal, parse_term};
use parking_lot::RwLock;
use schemars::{schema_for, JsonSchema};
use serde::{Deserialize, Serialize};
use uuid::Uuid;

type Shared = Arc<RwLock<ProofSession>>;

#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<RwLock<HashMap<String, Shared>>>,
}

impl AppState {
    fn get(&self, id: &str) -> Result<Shared, ApiError> {
        self.sessions
            .read()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "no_session", format!("no session {id}")))
    }
}

#[derive(Debug, Serialize, Deserialize, JsonSchema)]
pub struct ErrorJson {
    /// Stable machine-readable code, e.g. `stale_revision` or `bad_alternation`.
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub revision: Option<u64>,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorJson,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError { status, body: ErrorJson { code: code.into(), message: message.into(), revision: None } }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_request", e.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_request", e.body_text())
    }
}

fn step_code(e: &StepError) -> &'static str {
    match e {
        StepError::UnknownDefinition(_) => "unknown_definition",
        StepError::UnknownHypothesis(_) => "unknown_hypothesis",
        StepError::Type(_) => "type_error",
        StepError::NotEqual(_) => "not_equal",
        StepError::NoMatch(_) => "no_match",
        StepError::Open(_) => "open",
        StepError::AfterClose => "after_close",
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let code = match &e {
            SessionError::Type(_) => "type_error",
            SessionError::Step(s) => step_code(s),
            SessionError::Box(BoxError::NotSimple) => "not_simple",
            SessionError::Box(BoxError::EdgeCrossesTwicePlus { .. }) => "edge_crosses_twice_plus",
            SessionError::Box(BoxError::BadAlternation) => "bad_alternation",
            SessionError::Box(BoxError::InvalidSubdiagram(_)) => "invalid_subdiagram",
            SessionError::Extract(_) => "extract_failed",
            SessionError::Diagram(_) => "invalid_diagram",
            SessionError::NoNode(_) => "no_node",
            SessionError::NotABox(_) => "not_a_box",
            SessionError::NoMatch(..) => "no_match",
            SessionError::NoRegion => "no_region",
            SessionError::NothingToUndo => "nothing_to_undo",
        };
        let status = if code == "no_node" { StatusCode::NOT_FOUND } else { StatusCode::UNPROCESSABLE_ENTITY };
        ApiError::new(status, code, e.to_string())
    }
}

#[derive(Debug, Serialize, Deserialize, JsonSchema)]
pub struct SideJson {
    /// The side as a term, boxes shown with brackets.
    pub term: String,
    pub diagram: DiagramJson,
    pub svg: String,
}

#[derive(Debug, Serialize, Deserialize, JsonSchema)]
pub struct SessionJson {
    pub id: String,
    pub revision: u64,
    pub verdict: Verdict,
    pub done: bool,
    pub lhs: SideJson,
    pub rhs: SideJson,
    /// The recorded steps in the plain script format, one per line.
    pub steps: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize, JsonSchema)]
pub struct CreateRequest {
    pub goal: String,
}

#[derive(Debug, Serialize, Deserialize, JsonSchema)]
pub struct BoxRequest {
    pub revision: u64,
    pub side: Side,
    /// The outline, in diagram JSON coordinates.
    #[serde(default)]
    pub polygon: Option<Vec<Point>>,
    /// Alternatively, the nodes to enclose.
    #[serde(default)]
    pub nodes: Option<Vec<usize>>,
}

#[derive(Debug, Serialize, Deserialize, JsonSchema)]
pub struct BoxResponse {
    pub box_id: usize,
    pub session: SessionJson,
}

#[derive(Debug, Serialize, Deserialize, JsonSchema)]
pub struct NodeRequest {
    pub revision: u64,
    pub side: Side,
    pub node: usize,
}

#[derive(Debug, Serialize, Deserialize, JsonSchema)]
pub struct DragRequest {
    pub revision: u64,
    pub side: Side,
    pub node: usize,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Serialize, Deserialize, JsonSchema)]
pub struct RewriteRequest {
    pub revision: u64,
    pub side: Side,
    pub node: usize,
    pub hyp: String,
    #[serde(default = "forward")]
    pub dir: Direction,
}

fn forward() -> Direction {
    Direction::Forward
}

#[derive(Debug, Serialize, Deserialize, JsonSchema)]
pub struct UnfoldRequest {
    pub revision: u64,
    pub name: String,
}

#[derive(Debug, Serialize, Deserialize, JsonSchema)]
pub struct TransRequest {
    pub revision: u64,
    pub side: Side,
    pub term: String,
}

#[derive(Debug, Serialize, Deserialize, JsonSchema)]
pub struct UndoRequest {
    pub revision: u64,
}

#[derive(Debug, Serialize, Deserialize, JsonSchema)]
pub struct MatchJson {
    pub hyp: String,
    pub dir: Direction,
}

#[derive(Debug, Deserialize)]
pub struct MatchQuery {
    pub side: Side,
    pub node: usize,
}

#[derive(Debug, Serialize, Deserialize, JsonSchema)]
pub struct ExtractJson {
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Deserialize)]
pub struct ExportQuery {
    #[serde(default)]
    pub format: Option<String>,
}

fn side_json(s: &ProofSession, side: Side, style: &StyleSheet) -> SideJson {
    let v = s.side(side);
    SideJson { term: v.term.to_string(), diagram: DiagramJson::from_layout(v.layout), svg: render_svg(v.layout, style) }
}

fn session_json(id: &str, s: &ProofSession) -> SessionJson {
    let style = StyleSheet::from_signature(&s.goal().signature);
    SessionJson {
        id: id.to_string(),
        revision: s.revision(),
        verdict: s.verdict(),
        done: s.done(),
        lhs: side_json(s, Side::Lhs, &style),
        rhs: side_json(s, Side::Rhs, &style),
        steps: to_neutral(&s.steps()).lines().map(str::to_string).collect(),
    }
}

/// JSON coordinates to layout coordinates.
fn scale(s: &ProofSession, side: Side) -> f64 {
    let w = s.side(side).layout.width;
    if w > 0.0 {
        w / 1000.0
    } else {
        1.0
    }
}

/// Runs `f` on the session under its write lock if `revision` is current.
fn mutate<T>(
    state: &AppState,
    id: &str,
    revision: u64,
    f: impl FnOnce(&mut ProofSession) -> Result<T, ApiError>,
) -> Result<(T, SessionJson), ApiError> {
    let shared = state.get(id)?;
    let mut s = shared.write();
    if s.revision() != revision {
        let mut e = ApiError::new(
            StatusCode::CONFLICT,
            "stale_revision",
            format!("revision {revision} is stale, the session is at {}", s.revision()),
        );
        e.body.revision = Some(s.revision());
        return Err(e);
    }
    let out = f(&mut s)?;
    Ok((out, session_json(id, &s)))
}

async fn create(
    State(state): State<AppState>,
    body: Result<Json<CreateRequest>, JsonRejection>,
) -> Result<(StatusCode, Json<SessionJson>), ApiError> {
    let Json(req) = body?;
    let goal =
        parse_goal(&req.goal).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "parse_error", e.to_string()))?;
    let session = ProofSession::new(goal)?;
    let id = Uuid::new_v4().to_string();
    let json = session_json(&id, &session);
    state.sessions.write().insert(id, Arc::new(RwLock::new(session)));
    Ok((StatusCode::CREATED, Json(json)))
}

async fn fetch(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<SessionJson>, ApiError> {
    let shared = state.get(&id)?;
    let s = shared.read();
    Ok(Json(session_json(&id, &s)))
}

async fn remove(State(state): State<AppState>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    match state.sessions.write().remove(&id) {
        Some(_) => Ok(StatusCode::NO_CONTENT),
        None => Err(ApiError::new(StatusCode::NOT_FOUND, "no_session", format!("no session {id}"))),
    }
}

async fn box_region(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<BoxRequest>, JsonRejection>,
) -> Result<Json<BoxResponse>, ApiError> {
    let Json(req) = body?;
    let (box_id, session) = mutate(&state, &id, req.revision, |s| match (&req.polygon, &req.nodes) {
        (Some(points), None) => {
            let k = scale(s, req.side);
            let poly = Polygon::new(points.iter().map(|p| Point::new(p.x * k, p.y * k)).collect());
            Ok(s.box_region(req.side, &poly)?)
        }
        (None, Some(nodes)) => Ok(s.box_nodes(req.side, nodes)?),
        _ => Err(ApiError::new(StatusCode::BAD_REQUEST, "bad_request", "give exactly one of `polygon` and `nodes`")),
    })?;
    Ok(Json(BoxResponse { box_id, session }))
}

async fn unbox(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<NodeRequest>, JsonRejection>,
) -> Result<Json<SessionJson>, ApiError> {
    let Json(req) = body?;
    let ((), json) = mutate(&state, &id, req.revision, |s| Ok(s.unbox(req.side, req.node)?))?;
    Ok(Json(json))
}

async fn drag(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<DragRequest>, JsonRejection>,
) -> Result<Json<SessionJson>, ApiError> {
    let Json(req) = body?;
    let ((), json) = mutate(&state, &id, req.revision, |s| {
        let k = scale(s, req.side);
        Ok(s.drag(req.side, req.node, Point::new(req.x * k, req.y * k))?)
    })?;
    Ok(Json(json))
}

async fn matches(
    State(state): State<AppState>,
    Path(id): Path<String>,
    query: Result<Query<MatchQuery>, QueryRejection>,
) -> Result<Json<Vec<MatchJson>>, ApiError> {
    let Query(q) = query?;
    let shared = state.get(&id)?;
    let s = shared.read();
    let found = s.matches(q.side, q.node)?;
    Ok(Json(found.into_iter().map(|(hyp, dir)| MatchJson { hyp, dir }).collect()))
}

async fn rewrite(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<RewriteRequest>, JsonRejection>,
) -> Result<Json<SessionJson>, ApiError> {
    let Json(req) = body?;
    let (_, json) = mutate(&state, &id, req.revision, |s| Ok(s.rewrite(req.side, req.node, &req.hyp, req.dir)?))?;
    Ok(Json(json))
}

async fn unfold(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<UnfoldRequest>, JsonRejection>,
) -> Result<Json<SessionJson>, ApiError> {
    let Json(req) = body?;
    let (_, json) = mutate(&state, &id, req.revision, |s| Ok(s.unfold(&req.name)?))?;
    Ok(Json(json))
}

async fn transitivity(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<TransRequest>, JsonRejection>,
) -> Result<Json<SessionJson>, ApiError> {
    let Json(req) = body?;
    let (_, json) = mutate(&state, &id, req.revision, |s| {
        let t = parse_term(&req.term, &s.goal().resolver())
            .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "parse_error", e.to_string()))?;
        Ok(s.transitivity(req.side, t)?)
    })?;
    Ok(Json(json))
}

async fn undo(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<UndoRequest>, JsonRejection>,
) -> Result<Json<SessionJson>, ApiError> {
    let Json(req) = body?;
    let ((), json) = mutate(&state, &id, req.revision, |s| Ok(s.undo()?))?;
    Ok(Json(json))
}

async fn extract(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<ExtractJson>, ApiError> {
    let shared = state.get(&id)?;
    let s = shared.read();
    Ok(Json(ExtractJson { lhs: s.reading(Side::Lhs)?.to_string(), rhs: s.reading(Side::Rhs)?.to_string() }))
}

async fn export(
    State(state): State<AppState>,
    Path(id): Path<String>,
    query: Result<Query<ExportQuery>, QueryRejection>,
) -> Result<Response, ApiError> {
    let Query(q) = query?;
    let shared = state.get(&id)?;
    let s = shared.read();
    let text = match q.format.as_deref().unwrap_or("neutral") {
        "neutral" => s.export_neutral(),
        "rocq" => s.export_rocq(),
        other => {
            return Err(ApiError::new(StatusCode::BAD_REQUEST, "bad_request", format!("unknown format {other:?}")))
        }
    };
    let mut r = text.into_response();
    r.headers_mut().insert("x-revision", s.revision().into());
    Ok(r)
}

/// Names of the published schemas.
pub const SCHEMAS: [&str; 13] = [
    "diagram",
    "session",
    "error",
    "create",
    "box",
    "box_response",
    "node",
    "drag",
    "rewrite",
    "unfold",
    "transitivity",
    "undo",
    "matches",
];

pub fn schema(name: &str) -> Option<serde_json::Value> {
    let s = match name {
        "diagram" => schema_for!(DiagramJson),
        "session" => schema_for!(SessionJson),
        "error" => schema_for!(ErrorJson),
        "create" => schema_for!(CreateRequest),
        "box" => schema_for!(BoxRequest),
        "box_response" => schema_for!(BoxResponse),
        "node" => schema_for!(NodeRequest),
        "drag" => schema_for!(DragRequest),
        "rewrite" => schema_for!(RewriteRequest),
        "unfold" => schema_for!(UnfoldRequest),
        "transitivity" => schema_for!(TransRequest),
        "undo" => schema_for!(UndoRequest),
        "matches" => schema_for!(Vec<MatchJson>),
        _ => return None,
    };
    Some(serde_json::to_value(s).expect("schemas serialize"))
}

async fn schema_index() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "diagram_version": moncat::diagram::SCHEMA_VERSION, "schemas": SCHEMAS }))
}

async fn schema_one(Path(name): Path<String>) -> Result<Response, ApiError> {
    let v =
        schema(&name).ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "no_schema", format!("no schema {name}")))?;
    Ok(([(header::CONTENT_TYPE, "application/schema+json")], v.to_string()).into_response())
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/schema", get(schema_index))
        .route("/schema/{name}", get(schema_one))
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(fetch).delete(remove))
        .route("/sessions/{id}/box", post(box_region))
        .route("/sessions/{id}/unbox", post(unbox))
        .route("/sessions/{id}/drag", post(drag))
        .route("/sessions/{id}/matches", get(matches))
        .route("/sessions/{id}/rewrite", post(rewrite))
        .route("/sessions/{id}/unfold", post(unfold))
        .route("/sessions/{id}/transitivity", post(transitivity))
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/extract", get(extract))
        .route("/sessions/{id}/export", get(export))
        .with_state(state)
}

pub async fn serve(port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(AppState::default())).await
}
