//! One in-memory session behind a small JSON API.
//!
//! Writers are serialized by a lock and build the next state completely
//! before swapping it in, so a failing request leaves the session untouched.
//! Each applied step keeps the state it replaced, which is what `undo`
//! restores.

use std::net::SocketAddr;
use std::sync::{Arc, RwLock};

use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::{json, Value};

use icehive::surface::{alternating_triangulation, flip, flip_relabel, flip_sequence, glue, twist, twist_sequence, point_label, DiskTriangulation};
use icehive::{build_hive, IceQuiver, Label, Seed};

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub quiver: IceQuiver,
    /// Present when the quiver was glued from a triangulation.
    pub triangulation: Option<DiskTriangulation>,
    pub l: Option<u32>,
}

impl Snapshot {
    fn empty() -> Snapshot {
        Snapshot { quiver: IceQuiver::with_size(0, &[]), triangulation: None, l: None }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "quiver": self.quiver.to_json(),
            "triangulation": self.triangulation.as_ref().map(DiskTriangulation::to_json),
            "l": self.l,
            "b_rank": self.quiver.b_rank(),
            "full_rank": self.quiver.has_full_rank(),
        })
    }

    fn glued(&self) -> Result<(&DiskTriangulation, u32), ApiError> {
        match (&self.triangulation, self.l) {
            (Some(t), Some(l)) => Ok((t, l)),
            _ => Err(ApiError::conflict("the session has no triangulation; load one first")),
        }
    }
}

#[derive(Debug)]
pub struct Session {
    current: Snapshot,
    undo: Vec<(Value, Snapshot)>,
}

impl Default for Session {
    fn default() -> Self {
        Session { current: Snapshot::empty(), undo: Vec::new() }
    }
}

impl Session {
    pub fn state(&self) -> Value {
        let mut v = self.current.to_json();
        v["steps"] = json!(self.undo.len());
        v
    }

    pub fn history(&self) -> Value {
        Value::Array(self.undo.iter().map(|(step, _)| step.clone()).collect())
    }

    fn apply(&mut self, step: Value, next: Snapshot) {
        let prev = std::mem::replace(&mut self.current, next);
        self.undo.push((step, prev));
    }
}

pub type Shared = Arc<RwLock<Session>>;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn bad(message: impl Into<String>) -> ApiError {
        ApiError { status: StatusCode::BAD_REQUEST, message: message.into() }
    }

    fn conflict(message: impl Into<String>) -> ApiError {
        ApiError { status: StatusCode::CONFLICT, message: message.into() }
    }
}

impl From<icehive::Error> for ApiError {
    fn from(e: icehive::Error) -> Self {
        ApiError::bad(e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({"error": self.message}))).into_response()
    }
}

type ApiResult = Result<Json<Value>, ApiError>;

pub fn app(session: Shared) -> Router {
    Router::new()
        .route("/state", get(get_state))
        .route("/history", get(get_history))
        .route("/load", post(load))
        .route("/mutate", post(mutate))
        .route("/flip", post(flip_step))
        .route("/twist", post(twist_step))
        .route("/undo", post(undo))
        .with_state(session)
}

pub async fn serve(addr: SocketAddr) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app(Shared::default())).await?;
    Ok(())
}

fn read(s: &Shared) -> std::sync::RwLockReadGuard<'_, Session> {
    s.read().unwrap_or_else(|e| e.into_inner())
}

fn write(s: &Shared) -> std::sync::RwLockWriteGuard<'_, Session> {
    s.write().unwrap_or_else(|e| e.into_inner())
}

async fn get_state(State(s): State<Shared>) -> Json<Value> {
    Json(read(&s).state())
}

async fn get_history(State(s): State<Shared>) -> Json<Value> {
    Json(read(&s).history())
}

fn field<'a>(body: &'a Value, key: &str) -> Result<&'a Value, ApiError> {
    body.get(key).ok_or_else(|| ApiError::bad(format!("missing field {key:?}")))
}

fn small_int(v: &Value, what: &str) -> Result<u32, ApiError> {
    v.as_u64().and_then(|x| u32::try_from(x).ok()).ok_or_else(|| ApiError::bad(format!("{what} must be a nonnegative integer")))
}

fn pair(v: &Value, what: &str) -> Result<(u32, u32), ApiError> {
    match v.as_array().map(Vec::as_slice) {
        Some([a, b]) => Ok((small_int(a, what)?, small_int(b, what)?)),
        _ => Err(ApiError::bad(format!("{what} must be a pair of points"))),
    }
}

/// Accepts `{"quiver"}`, `{"seed"}`, `{"hive": l}`, `{"triangulation", "l"}`
/// or `{"zigzag": m, "l"}`.
fn snapshot_from(body: &Value) -> Result<Snapshot, ApiError> {
    if let Some(q) = body.get("quiver") {
        return Ok(Snapshot { quiver: IceQuiver::from_json(q)?, triangulation: None, l: None });
    }
    if let Some(s) = body.get("seed") {
        return Ok(Snapshot { quiver: Seed::from_json(s)?.quiver().clone(), triangulation: None, l: None });
    }
    if let Some(l) = body.get("hive") {
        return Ok(Snapshot { quiver: build_hive(small_int(l, "hive")?)?.quiver, triangulation: None, l: None });
    }
    let t = if let Some(t) = body.get("triangulation") {
        DiskTriangulation::from_json(t)?
    } else if let Some(m) = body.get("zigzag") {
        alternating_triangulation(small_int(m, "zigzag")?)?
    } else {
        return Err(ApiError::bad("expected one of quiver, seed, hive, triangulation, zigzag"));
    };
    let l = small_int(field(body, "l")?, "l")?;
    Ok(Snapshot { quiver: glue(&t, l)?.quiver, triangulation: Some(t), l: Some(l) })
}

async fn load(State(s): State<Shared>, Json(body): Json<Value>) -> ApiResult {
    let next = snapshot_from(&body)?;
    let mut session = write(&s);
    session.apply(json!({"op": "load"}), next);
    Ok(Json(session.state()))
}

fn vertex_of(q: &IceQuiver, v: &Value) -> Result<usize, ApiError> {
    match v {
        Value::Number(n) => n
            .as_u64()
            .map(|x| x as usize)
            .filter(|&x| x < q.len())
            .ok_or_else(|| ApiError::bad(format!("unknown vertex {n}"))),
        Value::String(s) => Ok(q.require(&s.parse::<Label>()?)?),
        _ => Err(ApiError::bad("vertex must be an id or a label string")),
    }
}

async fn mutate(State(s): State<Shared>, Json(body): Json<Value>) -> ApiResult {
    let mut session = write(&s);
    let cur = &session.current;
    let u = vertex_of(&cur.quiver, field(&body, "vertex")?)?;
    let next = Snapshot { quiver: cur.quiver.mutate(u)?, ..cur.clone() };
    let step = json!({"op": "mutate", "vertex": u, "label": cur.quiver.label(u).to_string()});
    session.apply(step, next);
    Ok(Json(session.state()))
}

fn names(ls: &[Label]) -> Vec<String> {
    ls.iter().map(Label::to_string).collect()
}

async fn flip_step(State(s): State<Shared>, Json(body): Json<Value>) -> ApiResult {
    let d = pair(field(&body, "diagonal")?, "diagonal")?;
    let mut session = write(&s);
    let cur = &session.current;
    let (t, l) = cur.glued()?;
    let sequence = flip_sequence(&glue(t, l)?, d)?;
    let pi = flip_relabel(t, d)?;
    let quiver = cur.quiver.mutate_labels(&sequence)?.relabel(&pi)?;
    let next = Snapshot { quiver, triangulation: Some(flip(t, d)?), l: Some(l) };
    let step = json!({"op": "flip", "diagonal": [d.0, d.1], "sequence": names(&sequence)});
    session.apply(step.clone(), next);
    Ok(Json(json!({"step": step, "state": session.state()})))
}

async fn twist_step(State(s): State<Shared>, Json(body): Json<Value>) -> ApiResult {
    let ti = small_int(field(&body, "triangle")?, "triangle")? as usize;
    let e = pair(field(&body, "edge")?, "edge")?;
    let mut session = write(&s);
    let cur = &session.current;
    let (t, l) = cur.glued()?;
    let tw = twist(t, ti, e)?;
    let sequence: Vec<Label> = twist_sequence(l).into_iter().map(|p| point_label(tw.corners, p)).collect();
    let quiver = cur.quiver.mutate_labels(&sequence)?.relabel(|lab| tw.relabel(t, lab))?;
    let next = Snapshot { quiver, triangulation: Some(tw.triangulation.clone()), l: Some(l) };
    let step = json!({"op": "twist", "triangle": ti, "edge": [e.0, e.1], "sequence": names(&sequence)});
    session.apply(step.clone(), next);
    Ok(Json(json!({"step": step, "state": session.state()})))
}

async fn undo(State(s): State<Shared>) -> ApiResult {
    let mut session = write(&s);
    let (step, prev) = session.undo.pop().ok_or_else(|| ApiError::conflict("nothing to undo"))?;
    session.current = prev;
    Ok(Json(json!({"undone": step, "state": session.state()})))
}
