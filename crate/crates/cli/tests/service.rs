//! The session service driven in-process through the router.

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use lpgraph::service::{router, AppState};
use lpgraph_core::graphlp::BuildOptions;
use lpgraph_core::LaurentPoly;
use serde_json::{json, Value};
use tower::ServiceExt;

struct Client {
    app: axum::Router,
}

impl Client {
    fn new() -> Self {
        Client { app: router(Arc::new(AppState::new(BuildOptions::default()))) }
    }

    async fn raw(&self, method: &str, uri: &str, body: Option<String>) -> (StatusCode, Vec<u8>) {
        let mut req = Request::builder().method(method).uri(uri);
        if body.is_some() {
            req = req.header("content-type", "application/json");
        }
        let req = req.body(body.map_or_else(Body::empty, Body::from)).unwrap();
        let resp = self.app.clone().oneshot(req).await.unwrap();
        let status = resp.status();
        (status, resp.into_body().collect().await.unwrap().to_bytes().to_vec())
    }

    async fn call(&self, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
        let (status, bytes) = self.raw(method, uri, body.map(|b| b.to_string())).await;
        (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
    }

    async fn create(&self, builtin: &str) -> u64 {
        let (status, v) = self.call("POST", "/sessions", Some(json!({ "builtin": builtin }))).await;
        assert_eq!(status, StatusCode::CREATED, "{v}");
        v["session"].as_u64().unwrap()
    }

    async fn mutate(&self, id: u64, i: usize) -> (StatusCode, Value) {
        self.call("POST", &format!("/sessions/{id}/mutate"), Some(json!({ "direction": i }))).await
    }
}

fn poly(v: &Value) -> LaurentPoly {
    v.as_str().unwrap().parse().unwrap()
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect()
}

#[tokio::test]
async fn worked_seed_after_three_mutations() {
    let c = Client::new();
    let id = c.create("example").await;
    let mut last = Value::Null;
    for i in [1, 2, 3] {
        let (status, v) = c.mutate(id, i).await;
        assert_eq!(status, StatusCode::OK, "{v}");
        last = v;
    }
    let seed = &last["seed"]["seed"];
    assert_eq!(strings(&seed["vars"]), ["Y1", "Y12", "Y123", "X4"]);
    let printed = [
        "1 + Y12",
        "1 + Y1^2 + Y1*(2 + Y123)",
        "X4*(1 + Y1)*(1 + Y12) + A1*(1 + Y1 + Y12) + A2*Y1*(1 + Y1) + A3*Y1*Y12",
        "A1*(1 + Y12 + Y1^2 + Y1*(2 + Y123) + Y1*Y12) + A2*(Y1^3 + Y1^2*(2 + Y123) + Y1) + A3*(Y1^2*Y12 + Y1*Y12) + A4*Y1*Y12*Y123",
    ];
    for (k, want) in printed.iter().enumerate() {
        let got = poly(&seed["exchange"][k]);
        let want: LaurentPoly = want.parse().unwrap();
        assert!(got == want || got == -&want, "F{} = {got}", k + 1);
    }
    assert_eq!(strings(&seed["hat_denominators"]), ["1", "1", "Y1", "Y1*Y12"]);
    assert_eq!(last["seed"]["history"], json!([1, 2, 3]));
    assert_eq!(last["changed"], json!({ "position": 3, "old": "X3", "new": "Y123" }));
    assert_eq!(last["move"], "activation");
    let sets = &last["seed"]["collection"]["sets"];
    assert_eq!(sets.as_array().unwrap().len(), 3);
}

#[tokio::test]
async fn undo_restores_identical_json() {
    let c = Client::new();
    let id = c.create("example").await;
    let uri = format!("/sessions/{id}");
    let (_, before) = c.raw("GET", &uri, None).await;
    for i in [2, 4, 1] {
        c.mutate(id, i).await;
    }
    for _ in 0..3 {
        let (status, _) = c.call("POST", &format!("/sessions/{id}/undo"), None).await;
        assert_eq!(status, StatusCode::OK);
    }
    let (_, after) = c.raw("GET", &uri, None).await;
    assert_eq!(before, after);

    c.mutate(id, 3).await;
    let (_, mid) = c.raw("GET", &uri, None).await;
    c.mutate(id, 1).await;
    let (status, undone) = c.raw("POST", &format!("/sessions/{id}/undo"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(undone, mid);
}

#[tokio::test]
async fn mutating_twice_returns_the_seed() {
    let c = Client::new();
    let id = c.create("example").await;
    for i in [1, 2] {
        c.mutate(id, i).await;
    }
    let (_, before) = c.call("GET", &format!("/sessions/{id}"), None).await;
    for i in 1..=4 {
        c.mutate(id, i).await;
        let (_, v) = c.mutate(id, i).await;
        let (a, b) = (&before["seed"], &v["seed"]["seed"]);
        assert_eq!(a["vars"], b["vars"], "direction {i}");
        assert_eq!(a["groundings"], b["groundings"]);
        for k in 0..4 {
            let (p, q) = (poly(&a["exchange"][k]), poly(&b["exchange"][k]));
            assert!(p == q || p == -&q, "direction {i}, F{}", k + 1);
        }
        assert_eq!(before["collection"], v["seed"]["collection"]);
    }
}

#[tokio::test]
async fn move_classification_and_relation() {
    let c = Client::new();
    let id = c.create("example").await;
    let (_, v) = c.call("GET", &format!("/sessions/{id}"), None).await;
    assert!(v["directions"].as_array().unwrap().iter().all(|d| d["move"] == "activation"));
    let (_, v) = c.mutate(id, 4).await;
    assert_eq!(v["relation"], "X4 * Y4 = A4 + X2");
    assert_eq!(v["move"], "activation");
    c.call("POST", &format!("/sessions/{id}/undo"), None).await;
    c.mutate(id, 2).await;
    c.mutate(id, 1).await;
    let (_, v) = c.call("GET", &format!("/sessions/{id}"), None).await;
    let kinds: Vec<&str> = v["directions"].as_array().unwrap().iter().map(|d| d["move"].as_str().unwrap()).collect();
    // collection {{2}, {1,2}}: 1 is maximal, 2 internal, 3 and 4 outside
    assert_eq!(kinds, ["deactivation", "internal_mutation", "activation", "activation"]);
    assert_eq!(v["directions"][0]["variable"], "Y12");
}

#[tokio::test]
async fn neighborhood_is_bounded() {
    let c = Client::new();
    let id = c.create("example").await;
    let (status, v) = c.call("GET", &format!("/sessions/{id}/neighborhood?radius=1"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["nodes"].as_array().unwrap().len(), 5);
    assert_eq!(v["edges"].as_array().unwrap().len(), 4);
    let (_, v) = c.call("GET", &format!("/sessions/{id}/neighborhood?radius=2"), None).await;
    let nodes = v["nodes"].as_array().unwrap();
    assert!(nodes.iter().all(|n| n["distance"].as_u64().unwrap() <= 2));
    assert!(nodes.len() > 5 && nodes.len() <= 1 + 4 + 16);
    let (status, v) = c.call("GET", &format!("/sessions/{id}/neighborhood?radius=3"), None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["kind"], "invalid");
}

#[tokio::test]
async fn algebra_summary_is_cached() {
    let c = Client::new();
    let a = c.create("example").await;
    let b = c.create("example").await;
    for id in [a, b] {
        let (status, v) = c.call("GET", &format!("/sessions/{id}/algebra"), None).await;
        assert_eq!(status, StatusCode::OK);
        assert_eq!(v, json!({ "seeds": 46, "variables": 15, "complete": true }));
    }
}

#[tokio::test]
async fn errors_are_json_objects() {
    let c = Client::new();
    let (status, v) = c.call("GET", "/sessions/999", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(v["error"]["kind"], "not_found");
    let (status, v) = c.call("POST", "/sessions/abc/undo", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(v["error"]["kind"], "not_found");
    let (status, v) = c.call("GET", "/nowhere", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(v["error"]["kind"], "not_found");

    let id = c.create("path:3").await;
    for bad in [0, 4] {
        let (status, v) = c.mutate(id, bad).await;
        assert_eq!(status, StatusCode::BAD_REQUEST);
        assert_eq!(v["error"]["kind"], "invalid");
    }
    let (status, v) = c.call("POST", &format!("/sessions/{id}/undo"), None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(v["error"]["message"].as_str().unwrap().contains("undo"));

    let (status, bytes) = c.raw("POST", &format!("/sessions/{id}/mutate"), Some("{\"direction\": \"x\"}".into())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let v: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(v["error"]["kind"], "invalid");

    let (status, v) = c.call("POST", "/sessions", Some(json!({ "graph": { "n": 2, "edges": [[1, 1]] } }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["kind"], "invalid");
    let (status, v) = c.call("POST", "/sessions", Some(json!({ "builtin": "complete:9" }))).await;
    assert_eq!(status, StatusCode::PAYLOAD_TOO_LARGE);
    assert_eq!(v["error"]["kind"], "limit");
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_mutations_on_one_session_are_serialized() {
    let c = Arc::new(Client::new());
    let id = c.create("example").await;
    let tasks: Vec<_> = (0..8)
        .map(|k| {
            let c = c.clone();
            tokio::spawn(async move { c.mutate(id, k % 4 + 1).await.0 })
        })
        .collect();
    for t in tasks {
        assert_eq!(t.await.unwrap(), StatusCode::OK);
    }
    let (_, v) = c.call("GET", &format!("/sessions/{id}"), None).await;
    let history: Vec<usize> = v["history"].as_array().unwrap().iter().map(|d| d.as_u64().unwrap() as usize).collect();
    assert_eq!(history.len(), 8);
    // the stored seed is the replay of the recorded history
    let g = lpgraph_core::Digraph::example();
    let (t, names) = lpgraph::session::replay(&g, &history).unwrap();
    let replayed = lpgraph::session::view_of(&g, &history, &t, &names);
    assert_eq!(serde_json::to_value(&replayed).unwrap(), v);
}
