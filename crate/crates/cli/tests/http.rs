use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn corpus(case: &str, file: &str) -> String {
    let dir = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/corpus");
    std::fs::read_to_string(dir.join(case).join(file)).unwrap()
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = req.body(body.map_or_else(Body::empty, |b| Body::from(b.to_string()))).unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

async fn session(app: &Router, case: &str) -> u64 {
    let body = json!({ "program": corpus(case, "program.mdfy"), "fixture": corpus(case, "fixture.errs") });
    let (status, v) = call(app, Method::POST, "/sessions", Some(body)).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    v["id"].as_u64().unwrap()
}

#[tokio::test]
async fn program_reports_fixture_errors() {
    let app = dtac_cli::server::router().unwrap();
    let id = session(&app, "safer-null").await;
    let (status, v) = call(&app, Method::GET, &format!("/sessions/{id}/program"), None).await;
    assert_eq!(status, StatusCode::OK);
    let errs = v["errors"].as_array().unwrap();
    let nulls = errs.iter().filter(|e| e["kind"] == "target object may be null").count();
    assert_eq!(nulls, 15, "{v}");
    assert!(errs.iter().all(|e| e["line"].as_u64().unwrap() > 0));
    assert!(v["text"].as_str().unwrap().contains("method selected_thrusters"));
}

#[tokio::test]
async fn apply_then_undo_restores_the_text() {
    let app = dtac_cli::server::router().unwrap();
    let id = session(&app, "lemma").await;
    let (_, before) = call(&app, Method::GET, &format!("/sessions/{id}/program"), None).await;

    let inv = json!({ "invocation": "case-I(n == 0)[?meth := LemmaLength]" });
    let (status, v) = call(&app, Method::POST, &format!("/sessions/{id}/apply"), Some(inv)).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    assert_eq!(v["ok"], true);
    assert_eq!(v["guard"]["ok"], true);
    assert!(v["program"].as_str().unwrap().contains("if n == 0 {"));

    let (_, h) = call(&app, Method::GET, &format!("/sessions/{id}/history"), None).await;
    assert_eq!(h.as_array().unwrap().len(), 2);
    assert_eq!(h[1]["invocation"], "case-I(n == 0)[?meth := LemmaLength]");

    let (status, _) = call(&app, Method::POST, &format!("/sessions/{id}/undo"), None).await;
    assert_eq!(status, StatusCode::OK);
    let (_, after) = call(&app, Method::GET, &format!("/sessions/{id}/program"), None).await;
    assert_eq!(before["text"], after["text"]);

    let (status, v) = call(&app, Method::POST, &format!("/sessions/{id}/undo"), None).await;
    assert_eq!(status, StatusCode::CONFLICT, "{v}");
}

#[tokio::test]
async fn failures_have_distinct_statuses() {
    let app = dtac_cli::server::router().unwrap();
    let id = session(&app, "lemma").await;

    let (status, v) = call(&app, Method::GET, "/sessions/999/program", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert!(v["error"].is_string());

    let bad = json!({ "invocation": "assert-I(" });
    let (status, _) = call(&app, Method::POST, &format!("/sessions/{id}/apply"), Some(bad)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let stuck = json!({ "invocation": "assert-comb1()" });
    let (status, v) = call(&app, Method::POST, &format!("/sessions/{id}/apply"), Some(stuck)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["ok"], false);
    assert!(v["failure"].is_string());

    let (_, h) = call(&app, Method::GET, &format!("/sessions/{id}/history"), None).await;
    assert_eq!(h.as_array().unwrap().len(), 1);

    let (status, _) =
        call(&app, Method::POST, "/sessions", Some(json!({ "program": "method f( {" }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn stdlib_lists_every_tactic() {
    let app = dtac_cli::server::router().unwrap();
    let (status, v) = call(&app, Method::GET, "/stdlib", None).await;
    assert_eq!(status, StatusCode::OK);
    let defs = v.as_array().unwrap();
    assert_eq!(defs.len(), 27);
    for d in defs {
        for k in ["name", "arity", "doc", "paper_ref"] {
            assert!(!d[k].is_null(), "{d} lacks {k}");
        }
    }
    assert!(defs.iter().any(|d| d["name"] == "assert-I" && d["arity"] == 1));
}
