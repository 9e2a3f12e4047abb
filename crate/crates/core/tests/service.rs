use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use region_select::catalog::Catalog;
use region_select::service::{router, AppState};
use serde_json::{json, Value};
use tower::ServiceExt;

const HOPF: &str = r#"{"name":"hopf","crossings":[[1,3,2,4],[3,1,4,2]]}"#;

fn app() -> Router {
    router(AppState::new(Catalog::builtin(), None).unwrap())
}

fn app_with_hopf() -> Router {
    let mut texts: Vec<(String, String)> = Catalog::builtin()
        .names()
        .map(|n| {
            let shadow = Catalog::builtin().get(n).unwrap().clone();
            (format!("{n}.json"), shadow.to_json())
        })
        .collect();
    texts.push(("hopf.json".into(), HOPF.into()));
    router(AppState::new(Catalog::from_texts(texts).unwrap(), None).unwrap())
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    call_raw(app, method, uri, body.map(|b| b.to_string())).await
}

async fn call_raw(app: &Router, method: Method, uri: &str, body: Option<String>) -> (StatusCode, Value) {
    let request = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map(Body::from).unwrap_or_else(Body::empty))
        .unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, value)
}

async fn new_game(app: &Router, body: Value) -> Value {
    let (status, game) = call(app, Method::POST, "/api/games", Some(body)).await;
    assert_eq!(status, StatusCode::CREATED, "{game}");
    game
}

fn id(game: &Value) -> String {
    game["id"].as_str().unwrap().to_string()
}

#[tokio::test]
async fn lists_and_fetches_diagrams() {
    let app = app();
    let (status, list) = call(&app, Method::GET, "/api/diagrams", None).await;
    assert_eq!(status, StatusCode::OK);
    let trefoil = list.as_array().unwrap().iter().find(|d| d["name"] == "trefoil").unwrap();
    assert_eq!(trefoil["n"], 3);
    assert_eq!(trefoil["m"], 5);

    let (status, file) = call(&app, Method::GET, "/api/diagrams/trefoil", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(file["crossings"].as_array().unwrap().len(), 3);

    let (status, body) = call(&app, Method::GET, "/api/diagrams/unknot_9", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert!(body["error"].is_string());
}

#[tokio::test]
async fn seeded_games_start_alike() {
    let app = app();
    let a = new_game(&app, json!({"diagram": "trefoil", "k": 3, "seed": 7})).await;
    let b = new_game(&app, json!({"diagram": "trefoil", "k": 3, "seed": 7})).await;
    assert_ne!(a["id"], b["id"]);
    assert_eq!(a["initial"], b["initial"]);
    assert_eq!(a["initial"], a["current"]);
    assert_eq!(a["history"], json!([]));
}

#[tokio::test]
async fn push_undo_and_reset() {
    let app = app();
    let game = new_game(&app, json!({"diagram": "trefoil", "k": 3, "coloring": [0, 0, 0]})).await;
    let uri = |action: &str| format!("/api/games/{}/{action}", id(&game));

    let (status, pushed) = call(&app, Method::POST, &uri("push"), Some(json!({"region": 0}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(pushed["history"].as_array().unwrap().len(), 1);
    assert_ne!(pushed["current"], json!([0, 0, 0]));
    assert_eq!(pushed["status"], "in_progress");

    let (_, pushed) = call(&app, Method::POST, &uri("push"), Some(json!({"region": 2}))).await;
    assert_eq!(pushed["history"].as_array().unwrap().len(), 2);
    let (_, undone) = call(&app, Method::POST, &uri("undo"), None).await;
    assert_eq!(undone["history"].as_array().unwrap().len(), 1);
    let (_, reset) = call(&app, Method::POST, &uri("reset"), None).await;
    assert_eq!(reset["current"], json!([0, 0, 0]));
    assert_eq!(reset["history"], json!([]));
    assert_eq!(reset["status"], "solved");

    let (status, _) = call(&app, Method::POST, &uri("undo"), None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, fetched) = call(&app, Method::GET, &format!("/api/games/{}", id(&game)), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(fetched, reset);
}

#[tokio::test]
async fn pushing_the_solution_solves_the_game() {
    let app = app();
    for k in [json!(2), json!(5), json!("inf")] {
        let game = new_game(&app, json!({"diagram": "figure_eight", "k": k, "seed": 11})).await;
        let (status, solution) = call(&app, Method::GET, &format!("/api/games/{}/solution", id(&game)), None).await;
        assert_eq!(status, StatusCode::OK);
        let mut last = game.clone();
        for (region, count) in solution.as_array().unwrap().iter().enumerate() {
            let count = count.as_i64().unwrap();
            for _ in 0..count.abs() {
                let body = json!({"region": region, "sign": count.signum()});
                let (status, state) = call(&app, Method::POST, &format!("/api/games/{}/push", id(&game)), Some(body)).await;
                assert_eq!(status, StatusCode::OK);
                last = state;
            }
        }
        assert_eq!(last["status"], "solved", "k={k}");
        assert!(last["current"].as_array().unwrap().iter().all(|c| c == 0));
    }
}

#[tokio::test]
async fn hints_count_down() {
    let app = app();
    let game = new_game(&app, json!({"diagram": "5_2", "k": 4, "seed": 3})).await;
    let (_, solution) = call(&app, Method::GET, &format!("/api/games/{}/solution", id(&game)), None).await;
    let mut remaining: i64 = solution.as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).sum();
    loop {
        let (status, hint) = call(&app, Method::GET, &format!("/api/games/{}/hint", id(&game)), None).await;
        assert_eq!(status, StatusCode::OK);
        if hint["solved"] == true {
            break;
        }
        let region = hint["region"].as_u64().unwrap();
        call(&app, Method::POST, &format!("/api/games/{}/push", id(&game)), Some(json!({"region": region}))).await;
        let (_, solution) = call(&app, Method::GET, &format!("/api/games/{}/solution", id(&game)), None).await;
        let now: i64 = solution.as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).sum();
        assert_eq!(now, remaining - 1);
        remaining = now;
    }
    assert_eq!(remaining, 0);
}

#[tokio::test]
async fn analyze_by_name_and_inline() {
    let app = app();
    let (status, a) = call(&app, Method::POST, "/api/analyze", Some(json!({"diagram": "trefoil", "k": 3}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(a["kernel_size"], 9);
    assert_eq!(a["m"], 5);
    let inline = json!({"diagram": {"name": "curl", "crossings": [[1, 1, 2, 2]]}, "k": 2});
    let (status, a) = call(&app, Method::POST, "/api/analyze", Some(inline)).await;
    assert_eq!(status, StatusCode::OK, "{a}");
    assert_eq!(a["reducible_vertices"], json!([0]));
    assert_eq!(a["kernel_size"], 4);
    let (status, a) = call(&app, Method::POST, "/api/analyze", Some(json!({"diagram": "trefoil", "k": "inf"}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(a["kernel_size"], Value::Null);
    let (status, _) = call(&app, Method::POST, "/api/analyze", Some(json!({"diagram": "nope", "k": 3}))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn bad_requests_are_rejected() {
    let app = app();
    let game = new_game(&app, json!({"diagram": "trefoil", "k": 3, "seed": 1})).await;
    let push = format!("/api/games/{}/push", id(&game));
    let cases = [
        (push.clone(), json!({"region": 0, "sign": -1})),
        (push.clone(), json!({"region": 99})),
        (push.clone(), json!({"region": 0, "extra": true})),
        ("/api/games".to_string(), json!({"diagram": "trefoil", "k": 1})),
        ("/api/games".to_string(), json!({"diagram": "trefoil", "k": 3, "seed": 1, "coloring": [0, 0, 0]})),
        ("/api/games".to_string(), json!({"diagram": "trefoil", "k": 3, "coloring": [0, 0]})),
        (
            "/api/games".to_string(),
            json!({"diagram": "trefoil", "k": 3, "increments": [{"vertex": 0, "region": 0, "value": 3}]}),
        ),
        (
            "/api/games".to_string(),
            json!({"diagram": "trefoil", "k": 3, "increments": [{"vertex": 9, "region": 0, "value": 1}]}),
        ),
    ];
    for (uri, body) in cases {
        let (status, error) = call(&app, Method::POST, &uri, Some(body.clone())).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{uri} {body} {error}");
        assert!(error["error"].is_string());
    }
    let (status, _) = call_raw(&app, Method::POST, &push, Some("{not json".into())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, after) = call(&app, Method::GET, &format!("/api/games/{}", id(&game)), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(after, game);
}

#[tokio::test]
async fn integer_games_accept_negative_pushes() {
    let app = app();
    let game = new_game(&app, json!({"diagram": "trefoil", "k": "inf", "coloring": [0, 0, 0]})).await;
    let (status, state) = call(&app, Method::POST, &format!("/api/games/{}/push", id(&game)), Some(json!({"region": 1, "sign": -1}))).await;
    assert_eq!(status, StatusCode::OK);
    assert!(state["current"].as_array().unwrap().iter().any(|c| c == -1));
}

#[tokio::test]
async fn unknown_games_are_not_found() {
    let app = app();
    for (method, action) in [(Method::GET, ""), (Method::POST, "/undo"), (Method::GET, "/hint"), (Method::GET, "/solution")] {
        let (status, _) = call(&app, method, &format!("/api/games/0000{action}"), None).await;
        assert_eq!(status, StatusCode::NOT_FOUND);
    }
    let (status, _) = call(&app, Method::POST, "/api/games", Some(json!({"diagram": "nope", "k": 3}))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn diagrams_without_a_game_are_unprocessable() {
    let app = app_with_hopf();
    for diagram in ["loop", "hopf"] {
        let (status, body) = call(&app, Method::POST, "/api/games", Some(json!({"diagram": diagram, "k": 3}))).await;
        assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{diagram}: {body}");
    }
    let (status, a) = call(&app, Method::POST, "/api/analyze", Some(json!({"diagram": "hopf", "k": 3}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(a["components"], 2);
    assert_eq!(a["kernel_size"], Value::Null);
}

#[tokio::test]
async fn sessions_survive_a_restart() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sessions.json");
    let first = router(AppState::new(Catalog::builtin(), Some(path.clone())).unwrap());
    let game = new_game(&first, json!({"diagram": "6_2", "k": 5, "seed": 42})).await;
    let push = format!("/api/games/{}/push", id(&game));
    call(&first, Method::POST, &push, Some(json!({"region": 3}))).await;
    let (_, before) = call(&first, Method::POST, &push, Some(json!({"region": 1}))).await;
    let integer = new_game(&first, json!({"diagram": "trefoil", "k": "inf", "seed": 5})).await;

    let state = AppState::new(Catalog::builtin(), Some(path.clone())).unwrap();
    assert_eq!(state.session_count(), 2);
    let second = router(state);
    let (status, after) = call(&second, Method::GET, &format!("/api/games/{}", id(&game)), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(after, before);
    let (_, restored) = call(&second, Method::GET, &format!("/api/games/{}", id(&integer)), None).await;
    assert_eq!(restored, integer);

    let (_, hint_before) = call(&first, Method::GET, &format!("/api/games/{}/hint", id(&game)), None).await;
    let (_, hint_after) = call(&second, Method::GET, &format!("/api/games/{}/hint", id(&game)), None).await;
    assert_eq!(hint_before, hint_after);
}

#[tokio::test]
async fn corrupt_session_files_are_refused() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sessions.json");
    std::fs::write(&path, "{\"sessions\": [{\"id\": 1}]}").unwrap();
    assert!(AppState::new(Catalog::builtin(), Some(path)).is_err());
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_pushes_all_land() {
    let app = app();
    let game = new_game(&app, json!({"diagram": "5_1", "k": "inf", "coloring": [0, 0, 0, 0, 0]})).await;
    let push = Arc::new(format!("/api/games/{}/push", id(&game)));
    let mut tasks = Vec::new();
    for i in 0..64usize {
        let (app, push) = (app.clone(), push.clone());
        tasks.push(tokio::spawn(async move {
            let (status, _) = call(&app, Method::POST, &push, Some(json!({"region": i % 7}))).await;
            status
        }));
    }
    for t in tasks {
        assert_eq!(t.await.unwrap(), StatusCode::OK);
    }
    let (_, state) = call(&app, Method::GET, &format!("/api/games/{}", id(&game)), None).await;
    assert_eq!(state["history"].as_array().unwrap().len(), 64);
    let lookup = Catalog::builtin();
    let shadow = lookup.get("5_1").unwrap();
    let mut expected = vec![0i64; 5];
    for push in state["history"].as_array().unwrap() {
        let region = push["region"].as_u64().unwrap() as usize;
        for (v, slot) in expected.iter_mut().enumerate() {
            *slot += shadow.corner_regions(v).iter().filter(|&&r| r == region).count() as i64;
        }
    }
    assert_eq!(state["current"], json!(expected));
}
