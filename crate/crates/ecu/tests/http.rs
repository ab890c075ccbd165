//! The JSON API exercised through the router, request by request.

use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use ecu::content::Content;
use ecu::service::{router, Engine};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

const OPERATOR: &str = "operator-secret";

fn app() -> Router {
    router(Arc::new(Engine::in_memory(Content::default()).operator_token(Some(OPERATOR.into()))))
}

async fn call(app: &Router, method: &str, uri: &str, token: Option<&str>, body: Option<Value>) -> (StatusCode, Value, String) {
    let mut req = Request::builder().method(method).uri(uri);
    if let Some(t) = token {
        req = req.header(header::AUTHORIZATION, format!("Bearer {t}"));
    }
    let req = match body {
        Some(b) => req.header(header::CONTENT_TYPE, "application/json").body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let content_type = resp.headers().get(header::CONTENT_TYPE).map(|v| v.to_str().unwrap().to_owned()).unwrap_or_default();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let text = String::from_utf8(bytes.to_vec()).unwrap();
    let value = if content_type.starts_with("application/json") { serde_json::from_str(&text).unwrap() } else { Value::Null };
    (status, value, text)
}

async fn started(app: &Router) -> (String, String) {
    let (status, body, _) = call(app, "POST", "/sessions", None, Some(json!({ "seed": 11 }))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["stage"], "instructions");
    assert_eq!(body["quiz"].as_array().unwrap().len(), 4);
    assert!(body["quiz"][0].get("correct").is_none(), "answers must not leak");
    (body["id"].as_str().unwrap().to_owned(), body["token"].as_str().unwrap().to_owned())
}

async fn pass_quiz(app: &Router, id: &str, token: &str) {
    let (status, body, _) = call(app, "POST", &format!("/sessions/{id}/quiz"), Some(token), Some(json!({ "answers": [2, 0, 1, 0] }))).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["status"], "passed");
    assert_eq!(body["stage"], "s1");
}

#[tokio::test]
async fn create_without_body_uses_defaults() {
    let app = app();
    let (status, body, _) = call(&app, "POST", "/sessions", None, None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["quiz_attempts"], 5);
}

#[tokio::test]
async fn unknown_content_is_rejected() {
    let (status, body, _) = call(&app(), "POST", "/sessions", None, Some(json!({ "content_id": "other" }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "unknown_content");
}

#[tokio::test]
async fn session_routes_need_the_session_token() {
    let app = app();
    let (id, _) = started(&app).await;
    let (status, body, _) = call(&app, "GET", &format!("/sessions/{id}"), None, None).await;
    assert_eq!((status, body["code"].as_str()), (StatusCode::UNAUTHORIZED, Some("unauthorized")));
    let (status, _, _) = call(&app, "GET", &format!("/sessions/{id}"), Some("wrong"), None).await;
    assert_eq!(status, StatusCode::UNAUTHORIZED);
    let (status, body, _) = call(&app, "GET", "/sessions/nope", Some("x"), None).await;
    assert_eq!((status, body["code"].as_str()), (StatusCode::NOT_FOUND, Some("not_found")));
}

#[tokio::test]
async fn tasks_before_the_quiz_are_the_wrong_stage() {
    let app = app();
    let (id, token) = started(&app).await;
    let (status, body, _) = call(&app, "GET", &format!("/sessions/{id}/tasks"), Some(&token), None).await;
    assert_eq!((status, body["code"].as_str()), (StatusCode::CONFLICT, Some("wrong_stage")));
}

#[tokio::test]
async fn five_wrong_quizzes_lock_the_session() {
    let app = app();
    let (id, token) = started(&app).await;
    let uri = format!("/sessions/{id}/quiz");
    for remaining in (1..5).rev() {
        let (_, body, _) = call(&app, "POST", &uri, Some(&token), Some(json!({ "answers": [0, 0, 0, 0] }))).await;
        assert_eq!(body["status"], "retry");
        assert_eq!(body["remaining"], remaining);
    }
    let (_, body, _) = call(&app, "POST", &uri, Some(&token), Some(json!({ "answers": [0, 0, 0, 0] }))).await;
    assert_eq!(body["status"], "locked_out");
    let (status, body, _) = call(&app, "POST", &uri, Some(&token), Some(json!({ "answers": [2, 0, 1, 0] }))).await;
    assert_eq!((status, body["code"].as_str()), (StatusCode::FORBIDDEN, Some("locked_out")));
}

#[tokio::test]
async fn malformed_bodies_are_bad_requests() {
    let app = app();
    let (id, token) = started(&app).await;
    let (status, body, _) = call(&app, "POST", &format!("/sessions/{id}/quiz"), Some(&token), Some(json!({ "answer": 1 }))).await;
    assert_eq!(status.as_u16() / 100, 4);
    assert_eq!(body["code"], "bad_request");
}

#[tokio::test]
async fn multiple_switches_are_refused_in_a_table() {
    let app = app();
    let (id, token) = started(&app).await;
    pass_quiz(&app, &id, &token).await;
    let (_, body, _) = call(&app, "GET", &format!("/sessions/{id}/tasks"), Some(&token), None).await;
    assert_eq!(body["tasks"].as_array().unwrap().len(), 10);
    let choices = json!(["A", "B", "A", "B", "B", "B", "B", "B", "B", "B"]);
    let (status, body, _) =
        call(&app, "POST", &format!("/sessions/{id}/switch"), Some(&token), Some(json!({ "stage": 1, "choices": choices }))).await;
    assert_eq!((status, body["code"].as_str()), (StatusCode::UNPROCESSABLE_ENTITY, Some("multi_switch")));
    let (status, body, _) = call(
        &app,
        "POST",
        &format!("/sessions/{id}/switch"),
        Some(&token),
        Some(json!({ "stage": 1, "direction": "a_then_b", "switch_after_row": 3 })),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["stage"], "s2");
    assert_eq!(body["d"]["point"], 176.0);
    let (status, body, _) = call(
        &app,
        "POST",
        &format!("/sessions/{id}/switch"),
        Some(&token),
        Some(json!({ "stage": 1, "direction": "a_then_b", "switch_after_row": 3 })),
    )
    .await;
    assert_eq!((status, body["code"].as_str()), (StatusCode::CONFLICT, Some("already_answered")));
}

#[tokio::test]
async fn full_session_over_http() {
    let app = app();
    let (id, token) = started(&app).await;
    pass_quiz(&app, &id, &token).await;
    let switch = |stage: u8, k: usize| json!({ "stage": stage, "direction": "a_then_b", "switch_after_row": k });
    let (status, _, _) = call(&app, "POST", &format!("/sessions/{id}/switch"), Some(&token), Some(switch(1, 2))).await;
    assert_eq!(status, StatusCode::OK);
    let (status, body, _) = call(&app, "POST", &format!("/sessions/{id}/switch"), Some(&token), Some(switch(2, 4))).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["stage"], "s3");

    let (status, body, _) = call(&app, "GET", &format!("/sessions/{id}/review"), Some(&token), None).await;
    assert_eq!((status, body["code"].as_str()), (StatusCode::CONFLICT, Some("wrong_stage")));

    let mut first = None;
    for i in 0..8 {
        let (_, body, _) = call(&app, "GET", &format!("/sessions/{id}/tasks"), Some(&token), None).await;
        let tasks = body["tasks"].as_array().unwrap();
        assert_eq!(tasks.len(), 1, "one stage-3 task at a time");
        let task_id = tasks[0]["id"].as_str().unwrap().to_owned();
        let (status, body, _) =
            call(&app, "POST", &format!("/sessions/{id}/stage3"), Some(&token), Some(json!({ "task_id": task_id, "choice": "B" }))).await;
        assert_eq!(status, StatusCode::OK, "{body}");
        assert_eq!(body["stage3_answered"], i + 1);
        if i == 0 {
            first = Some(task_id);
        } else if i == 1 {
            let (status, body, _) = call(
                &app,
                "POST",
                &format!("/sessions/{id}/stage3"),
                Some(&token),
                Some(json!({ "task_id": first.clone().unwrap(), "choice": "A" })),
            )
            .await;
            assert_eq!((status, body["code"].as_str()), (StatusCode::CONFLICT, Some("duplicate_answer")));
            let (status, body, _) = call(
                &app,
                "POST",
                &format!("/sessions/{id}/stage3"),
                Some(&token),
                Some(json!({ "task_id": "s3r8", "choice": "A" })),
            )
            .await;
            assert_eq!((status, body["code"].as_str()), (StatusCode::CONFLICT, Some("out_of_order")));
        }
    }

    let (status, review, _) = call(&app, "GET", &format!("/sessions/{id}/review"), Some(&token), None).await;
    assert_eq!(status, StatusCode::OK, "{review}");
    assert_eq!(review["show_up_fee_usd"], 6.0);
    let total = review["total_usd"].as_f64().unwrap();
    let expected = review["show_up_fee_usd"].as_f64().unwrap() + review["points_usd"].as_f64().unwrap();
    assert!((total - expected).abs() < 1e-9);

    let (_, body, _) = call(&app, "GET", &format!("/sessions/{id}"), Some(&token), None).await;
    assert_eq!(body["stage"], "review");
    let (_, body, _) = call(&app, "POST", &format!("/sessions/{id}/complete"), Some(&token), None).await;
    assert_eq!(body["stage"], "done");

    let (status, _, csv) = call(&app, "GET", "/export.csv", Some(OPERATOR), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(csv.lines().count(), 1 + 28 + 1);
    assert!(csv.lines().skip(1).all(|l| l.starts_with(&id)));
}

#[tokio::test]
async fn export_needs_the_operator_token() {
    let app = app();
    let (status, body, _) = call(&app, "GET", "/export.csv", None, None).await;
    assert_eq!((status, body["code"].as_str()), (StatusCode::UNAUTHORIZED, Some("unauthorized")));
    let (status, _, csv) = call(&app, "GET", "/export.csv", Some(OPERATOR), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(csv.lines().count(), 1, "header only while nothing is finished");
    assert!(csv.starts_with("session_id,kind,stage,row"));

    let closed = router(Arc::new(Engine::in_memory(Content::default())));
    let (status, body, _) = call(&closed, "GET", "/export.csv", Some(OPERATOR), None).await;
    assert_eq!((status, body["code"].as_str()), (StatusCode::FORBIDDEN, Some("export_disabled")));
}
