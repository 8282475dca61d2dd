//! HTTP session service.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use dtac_core::guard::GuardReport;
use dtac_core::oracle::{ErrorReport, Fixture};
use dtac_core::parser::parse_program;
use dtac_core::printer::{print_expr, print_program};
use dtac_core::session::Session;
use dtac_core::tactic::parse_invocation;
use dtac_core::stdlib::{load_stdlib, Manifest};
use serde::Deserialize;
use serde_json::{json, Value};

/// Sessions sit behind their own locks so that work on one session does not
/// wait for another.
pub struct AppState {
    manifest: Manifest,
    sessions: Mutex<HashMap<u64, Arc<Mutex<Session>>>>,
    next: Mutex<u64>,
}

type Shared = Arc<AppState>;

pub fn router() -> anyhow::Result<Router> {
    let state = Arc::new(AppState {
        manifest: load_stdlib()?,
        sessions: Mutex::new(HashMap::new()),
        next: Mutex::new(1),
    });
    Ok(Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}/program", get(program))
        .route("/sessions/{id}/apply", post(apply))
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/history", get(history))
        .route("/stdlib", get(stdlib))
        .with_state(state))
}

fn error(status: StatusCode, msg: impl ToString) -> Response {
    (status, Json(json!({ "error": msg.to_string() }))).into_response()
}

fn not_found(id: u64) -> Response {
    error(StatusCode::NOT_FOUND, format!("no session {id}"))
}

fn errors_json(errs: &[ErrorReport]) -> Value {
    errs.iter()
        .map(|e| json!({ "kind": e.kind, "property": print_expr(&e.property), "line": e.line, "col": e.col }))
        .collect()
}

fn guard_json(g: &GuardReport) -> Value {
    let vs: Vec<Value> = g
        .violations
        .iter()
        .map(|v| json!({ "kind": format!("{:?}", v.kind), "method": v.method, "detail": v.detail }))
        .collect();
    json!({ "ok": g.ok(), "violations": vs })
}

#[derive(Deserialize)]
struct CreateReq {
    program: String,
    #[serde(default)]
    fixture: String,
}

async fn create(State(st): State<Shared>, Json(req): Json<CreateReq>) -> Response {
    let program = match parse_program(&req.program) {
        Ok(p) => p,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("program: {e}")),
    };
    let fixture = match Fixture::load(&req.fixture, &program) {
        Ok(f) => f,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("fixture: {e}")),
    };
    let id = {
        let mut n = st.next.lock().unwrap();
        *n += 1;
        *n - 1
    };
    let s = Session::new(program, fixture, st.manifest.library.clone());
    st.sessions.lock().unwrap().insert(id, Arc::new(Mutex::new(s)));
    (StatusCode::CREATED, Json(json!({ "id": id }))).into_response()
}

fn session(st: &AppState, id: u64) -> Option<Arc<Mutex<Session>>> {
    st.sessions.lock().unwrap().get(&id).cloned()
}

fn program_json(s: &Session) -> Value {
    let p = s.program();
    let anchors: Vec<Value> =
        p.anchors().into_iter().map(|(name, method)| json!({ "name": name, "method": method })).collect();
    json!({ "text": print_program(p), "anchors": anchors, "errors": errors_json(&s.errors()) })
}

async fn program(State(st): State<Shared>, Path(id): Path<u64>) -> Response {
    match session(&st, id) {
        Some(s) => Json(program_json(&s.lock().unwrap())).into_response(),
        None => not_found(id),
    }
}

#[derive(Deserialize)]
struct ApplyReq {
    invocation: String,
}

async fn apply(State(st): State<Shared>, Path(id): Path<u64>, Json(req): Json<ApplyReq>) -> Response {
    let Some(s) = session(&st, id) else { return not_found(id) };
    let t = match parse_invocation(&req.invocation) {
        Ok(t) => t,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("invocation: {e}")),
    };
    // the search is CPU-bound; keep it off the async workers
    let text = req.invocation.trim().to_string();
    let r = tokio::task::spawn_blocking(move || {
        let mut s = s.lock().unwrap();
        match s.apply_trans(&t, &text) {
            Ok(a) => (
                StatusCode::OK,
                json!({
                    "ok": true,
                    "program": print_program(&a.program),
                    "errors": errors_json(&s.errors()),
                    "guard": guard_json(&a.guard),
                    "diff": a.diff,
                    "trace": a.trace.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                }),
            ),
            Err(e) => (
                StatusCode::UNPROCESSABLE_ENTITY,
                json!({ "ok": false, "guard": guard_json(&GuardReport::default()), "failure": e.to_string() }),
            ),
        }
    })
    .await;
    match r {
        Ok((status, body)) => (status, Json(body)).into_response(),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e),
    }
}

async fn undo(State(st): State<Shared>, Path(id): Path<u64>) -> Response {
    let Some(s) = session(&st, id) else { return not_found(id) };
    let mut s = s.lock().unwrap();
    if !s.undo() {
        return error(StatusCode::CONFLICT, "nothing to undo");
    }
    Json(json!({ "ok": true, "text": print_program(s.program()) })).into_response()
}

/// The initial state followed by one entry per applied invocation.
async fn history(State(st): State<Shared>, Path(id): Path<u64>) -> Response {
    let Some(s) = session(&st, id) else { return not_found(id) };
    let s = s.lock().unwrap();
    let mut h = vec![json!({ "invocation": null, "text": print_program(&s.initial), "trace": [] })];
    h.extend(s.history.iter().map(|h| {
        json!({
            "invocation": h.invocation,
            "text": print_program(&h.program),
            "trace": h.trace.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        })
    }));
    Json(Value::Array(h)).into_response()
}

async fn stdlib(State(st): State<Shared>) -> Response {
    let items: Vec<Value> = st
        .manifest
        .info
        .iter()
        .map(|i| json!({ "name": i.name, "arity": i.arity, "doc": i.doc, "paper_ref": i.paper_ref }))
        .collect();
    Json(Value::Array(items)).into_response()
}

pub async fn serve(addr: &str) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router()?).await?;
    Ok(())
}
