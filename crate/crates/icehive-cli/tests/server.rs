use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use icehive_cli::server::{app, Shared};

async fn call(app: &Router, method: &str, path: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(path);
    let req = match body {
        Some(b) => req.header("content-type", "application/json").body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap())
}

fn fresh() -> Router {
    app(Shared::default())
}

async fn load_square(app: &Router, l: u32) -> Value {
    let (s, v) = call(app, "POST", "/load", Some(json!({"triangulation": {"m": 4, "triangles": [[1, 2, 4], [2, 3, 4]]}, "l": l}))).await;
    assert_eq!(s, StatusCode::OK);
    v
}

#[tokio::test]
async fn empty_session() {
    let app = fresh();
    let (s, v) = call(&app, "GET", "/state", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["steps"], 0);
    assert_eq!(v["quiver"]["vertices"], json!([]));
    let (s, v) = call(&app, "POST", "/undo", None).await;
    assert_eq!(s, StatusCode::CONFLICT);
    assert!(v["error"].as_str().unwrap().contains("nothing"));
}

#[tokio::test]
async fn mutating_twice_restores_the_state_bytes() {
    let app = fresh();
    let loaded = load_square(&app, 3).await;
    call(&app, "POST", "/mutate", Some(json!({"vertex": "{1:1,2:1,4:1}"}))).await;
    let (s, v) = call(&app, "POST", "/mutate", Some(json!({"vertex": "{1:1,2:1,4:1}"}))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["quiver"].to_string(), loaded["quiver"].to_string());
    assert_eq!(v["steps"], 3);
}

#[tokio::test]
async fn failing_requests_leave_the_state_alone() {
    let app = fresh();
    load_square(&app, 3).await;
    let (_, before) = call(&app, "GET", "/state", None).await;
    let (s, v) = call(&app, "POST", "/mutate", Some(json!({"vertex": "{1:3}"}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert!(v["error"].is_string());
    let (s, _) = call(&app, "POST", "/flip", Some(json!({"diagonal": [1, 3]}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (s, _) = call(&app, "POST", "/twist", Some(json!({"triangle": 5, "edge": [2, 4]}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (_, after) = call(&app, "GET", "/state", None).await;
    assert_eq!(before.to_string(), after.to_string());
    let (_, h) = call(&app, "GET", "/history", None).await;
    assert_eq!(h.as_array().unwrap().len(), 1);
}

#[tokio::test]
async fn flip_reports_its_sequence_and_undo_inverts_it() {
    let app = fresh();
    let loaded = load_square(&app, 3).await;
    let (s, v) = call(&app, "POST", "/flip", Some(json!({"diagonal": [2, 4]}))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["step"]["sequence"].as_array().unwrap().len(), 4);
    assert_eq!(v["state"]["triangulation"]["triangles"], json!([[1, 2, 3], [1, 3, 4]]));
    assert_eq!(v["state"]["full_rank"], true);

    let (s, u) = call(&app, "POST", "/undo", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(u["undone"]["op"], "flip");
    assert_eq!(u["state"].to_string(), loaded.to_string());
}

#[tokio::test]
async fn flipped_state_matches_a_fresh_load_of_the_flipped_triangulation() {
    let app = fresh();
    load_square(&app, 2).await;
    let (_, v) = call(&app, "POST", "/flip", Some(json!({"diagonal": [2, 4]}))).await;
    let other = fresh();
    let (_, w) = call(&other, "POST", "/load", Some(json!({"triangulation": v["state"]["triangulation"], "l": 2}))).await;
    let count = |x: &Value| x["quiver"]["vertices"].as_array().unwrap().len();
    assert_eq!(count(&v["state"]), count(&w));
    assert_eq!(v["state"]["b_rank"], w["b_rank"]);
}

#[tokio::test]
async fn twist_then_undo() {
    let app = fresh();
    let (_, loaded) = call(&app, "POST", "/load", Some(json!({"zigzag": 5, "l": 3}))).await;
    let (s, v) = call(&app, "POST", "/twist", Some(json!({"triangle": 1, "edge": [2, 4]}))).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(v["step"]["sequence"].as_array().unwrap().len(), 1);
    let (_, h) = call(&app, "GET", "/history", None).await;
    assert_eq!(h.as_array().unwrap().iter().map(|x| x["op"].clone()).collect::<Vec<_>>(), vec![json!("load"), json!("twist")]);
    let (_, u) = call(&app, "POST", "/undo", None).await;
    assert_eq!(u["state"].to_string(), loaded.to_string());
}

#[tokio::test]
async fn load_variants() {
    let app = fresh();
    let (s, v) = call(&app, "POST", "/load", Some(json!({"hive": 4}))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["b_rank"], 3);
    assert_eq!(v["triangulation"], Value::Null);
    let (s, _) = call(&app, "POST", "/flip", Some(json!({"diagonal": [2, 4]}))).await;
    assert_eq!(s, StatusCode::CONFLICT);
    let (s, _) = call(&app, "POST", "/load", Some(json!({"nothing": 1}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let q = json!({"vertices": [{"id": 0, "label": "a", "frozen": false}, {"id": 1, "label": "b", "frozen": true}], "arrows": [[0, 1, 1]]});
    let (s, v) = call(&app, "POST", "/load", Some(json!({"quiver": q}))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["full_rank"], true);
    let (s, v) = call(&app, "POST", "/mutate", Some(json!({"vertex": 0}))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["quiver"]["arrows"], json!([[1, 0, 1]]));
}
