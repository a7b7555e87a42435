use std::future::IntoFuture;
use std::sync::Arc;

use axum::body::{to_bytes, Body};
use axum::http::{header, Request, StatusCode};
use axum::Router;
use serde_json::{json, Value};
use tower::ServiceExt;

use treeflip::instances::{parking12, parking12_optimal};
use treeflip_cli::service::{router, Corpus};

fn app() -> Router {
    router(Arc::new(Corpus::load(None).unwrap()))
}

async fn send(req: Request<Body>) -> (StatusCode, Vec<u8>, Option<String>) {
    let resp = app().oneshot(req).await.unwrap();
    let status = resp.status();
    let ctype = resp
        .headers()
        .get(header::CONTENT_TYPE)
        .map(|v| v.to_str().unwrap().to_owned());
    (status, to_bytes(resp.into_body(), usize::MAX).await.unwrap().to_vec(), ctype)
}

async fn get(uri: &str) -> (StatusCode, Value) {
    let (s, body, _) = send(Request::get(uri).body(Body::empty()).unwrap()).await;
    (s, serde_json::from_slice(&body).unwrap_or(Value::Null))
}

async fn post(uri: &str, body: String) -> (StatusCode, Value) {
    let req = Request::post(uri)
        .header(header::CONTENT_TYPE, "application/json")
        .body(Body::from(body))
        .unwrap();
    let (s, body, _) = send(req).await;
    (s, serde_json::from_slice(&body).unwrap_or(Value::Null))
}

fn initial_key() -> String {
    parking12().t_initial.key().to_string()
}

#[tokio::test]
async fn lists_instances() {
    let (s, v) = get("/api/instances").await;
    assert_eq!(s, StatusCode::OK);
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|i| i["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"parking12") && names.contains(&"glue3"), "{names:?}");
}

#[tokio::test]
async fn instance_has_both_trees_and_happy_edges() {
    let (s, v) = get("/api/instances/parking12").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["n"], 12);
    assert_eq!(v["initial"]["chords"].as_array().unwrap().len(), 11);
    assert_eq!(v["final"]["key"], parking12().t_final.key().to_string());
    assert_eq!(v["happy"], json!([[1, 2], [4, 5], [7, 8], [10, 11]]));
    assert_eq!(get("/api/instances/nope").await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn tree_lists_classified_flips() {
    let (s, v) = get(&format!("/api/instances/parking12/trees/{}", initial_key())).await;
    assert_eq!(s, StatusCode::OK);
    let flips = v["flips"].as_array().unwrap();
    // The start tree admits no perfect flip: every sequence opens by parking.
    assert!(flips.iter().all(|f| f["perfect"] == false));
    assert!(flips.iter().any(|f| f["removed"] == json!([5, 11]) && f["inserted"] == json!([0, 6]) && f["perfect"] == false));
    assert!(flips.iter().all(|f| f["kind"].is_string()));
    assert_eq!(v["overlays"]["missing"].as_array().unwrap().len(), 7);
    assert_eq!(v["is_target"], false);

    assert_eq!(get("/api/instances/parking12/trees/garbage").await.0, StatusCode::BAD_REQUEST);
    assert_eq!(get("/api/instances/parking12/trees/4:0-1.0-2.0-3").await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn flip_is_stateless_and_validated() {
    let body = |r: [u8; 2], i: [u8; 2]| json!({"tree": initial_key(), "removed": r, "inserted": i}).to_string();
    let (s, v) = post("/api/instances/parking12/flip", body([5, 11], [0, 6])).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["applied"]["perfect"], false);
    assert_eq!(v["applied"]["kind"], "crossing");
    let expected = parking12().t_initial.apply_flip(treeflip::Chord::new(5, 11), treeflip::Chord::new(0, 6)).unwrap();
    assert_eq!(v["tree"]["key"], expected.key().to_string());
    let next = v["tree"]["flips"].as_array().unwrap();
    assert!(next.iter().any(|f| f["removed"] == json!([0, 5]) && f["inserted"] == json!([4, 6]) && f["perfect"] == true));

    let (s, v) = post("/api/instances/parking12/flip", body([4, 5], [4, 6])).await;
    assert_eq!(s, StatusCode::CONFLICT);
    assert!(v["error"].as_str().unwrap().starts_with("crossing pair ("), "{v}");

    let (s, _) = post("/api/instances/parking12/flip", "{\"tree\": 3".into()).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (s, _) = post("/api/instances/parking12/flip", json!({"tree": initial_key()}).to_string()).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn replaying_the_optimal_sequence_reaches_the_target() {
    let moves = serde_json::to_value(parking12_optimal().moves).unwrap();
    let (s, v) = post("/api/instances/parking12/sequence", json!({ "moves": moves }).to_string()).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["end"]["is_target"], true);
    assert_eq!(v["nonperfect"], 1);
    let long: Vec<&Value> = v["chains"].as_array().unwrap().iter().filter(|c| c["trace_length"] == 2).collect();
    assert_eq!(long.len(), 1);
    assert_eq!(long[0]["links"], json!([[5, 11], [0, 6], [1, 7]]));

    let bad = json!({"moves": [{"removed": [0, 1], "inserted": [0, 2]}]}).to_string();
    assert_eq!(post("/api/instances/parking12/sequence", bad).await.0, StatusCode::CONFLICT);
}

#[tokio::test]
async fn slice_endpoint_matches_the_published_counts() {
    let (s, v) = get("/api/instances/parking12/slice?budget=1").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!((v["node_count"].as_u64(), v["arc_count"].as_u64()), (Some(118), Some(214)));
    assert_eq!(v["slice"]["nodes"].as_array().unwrap().len(), 118);
    let (_, v) = get("/api/instances/parking12/slice?budget=1&first_flip=hull").await;
    assert_eq!((v["node_count"].as_u64(), v["arc_count"].as_u64()), (Some(67), Some(120)));

    let (s, body, ctype) = send(Request::get("/api/instances/parking12/slice?format=dot").body(Body::empty()).unwrap()).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(ctype.as_deref(), Some("text/vnd.graphviz"));
    assert!(String::from_utf8(body).unwrap().starts_with("digraph"));

    assert_eq!(get("/api/instances/parking12/slice?budget=x").await.0, StatusCode::BAD_REQUEST);
    assert_eq!(get("/api/instances/parking12/slice?node_cap=5").await.0, StatusCode::SERVICE_UNAVAILABLE);
    assert_eq!(get("/api/instances/parking12/slice?node_cap=99999999999").await.0, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn shortest_summary() {
    let (s, v) = get("/api/instances/parking12/shortest?max_sequences=50").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!((v["optimum"].as_u64(), v["count"].as_u64()), (Some(8), Some(20)));
    assert_eq!(v["sequences"].as_array().unwrap().len(), 20);
    assert_eq!(v["truncated"], false);
    let (_, v) = get("/api/instances/parking12/shortest?max_sequences=3").await;
    assert_eq!(v["truncated"], true);
    assert_eq!(get("/api/instances/parking12/shortest?node_cap=10").await.0, StatusCode::SERVICE_UNAVAILABLE);
    assert_eq!(get("/api/instances/parking12/shortest?bogus=1").await.0, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn identical_requests_get_identical_bytes() {
    for uri in [
        "/api/instances",
        "/api/instances/glue2",
        "/api/instances/parking12/slice?budget=1",
        "/api/instances/parking12/shortest",
    ] {
        let a = send(Request::get(uri).body(Body::empty()).unwrap()).await;
        let b = send(Request::get(uri).body(Body::empty()).unwrap()).await;
        assert_eq!(a.1, b.1, "{uri}");
    }
}

#[tokio::test]
async fn corpus_dir_adds_instances() {
    let dir = tempfile::tempdir().unwrap();
    let mut p = parking12();
    p.name = "copy".into();
    p.save(dir.path().join("copy.json")).unwrap();
    let corpus = Corpus::load(Some(dir.path())).unwrap();
    assert!(corpus.names().any(|n| n == "copy"));
    let resp = router(Arc::new(corpus))
        .oneshot(Request::get("/api/instances/copy").body(Body::empty()).unwrap())
        .await
        .unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
}

/// Plain HTTP/1.1 over a socket, as the explorer would talk to `serve`.
fn http(addr: std::net::SocketAddr, method: &str, path: &str, body: &str) -> (u16, Value) {
    use std::io::{Read, Write};
    let mut s = std::net::TcpStream::connect(addr).unwrap();
    write!(
        s,
        "{method} {path} HTTP/1.1\r\nHost: localhost\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    )
    .unwrap();
    let mut raw = String::new();
    s.read_to_string(&mut raw).unwrap();
    let status = raw[9..12].parse().unwrap();
    let (_, payload) = raw.split_once("\r\n\r\n").unwrap();
    (status, serde_json::from_str(payload).unwrap())
}

#[tokio::test(flavor = "multi_thread")]
async fn explorer_session_over_a_socket() {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(axum::serve(listener, app()).into_future());

    let session = tokio::task::spawn_blocking(move || {
        let (_, inst) = http(addr, "GET", "/api/instances/parking12", "");
        let mut key = inst["initial"]["key"].as_str().unwrap().to_owned();
        let mut budget_used = 0;
        let mut last = Value::Null;
        for m in parking12_optimal().moves {
            let body = json!({"tree": key, "removed": m.removed, "inserted": m.inserted}).to_string();
            let (status, v) = http(addr, "POST", "/api/instances/parking12/flip", &body);
            assert_eq!(status, 200, "{v}");
            if v["applied"]["perfect"] == false {
                budget_used += 1;
            }
            key = v["tree"]["key"].as_str().unwrap().to_owned();
            last = v;
        }
        let moves = serde_json::to_value(parking12_optimal().moves).unwrap();
        let (_, report) = http(addr, "POST", "/api/instances/parking12/sequence", &json!({ "moves": moves }).to_string());
        (last, budget_used, report)
    })
    .await
    .unwrap();
    let (last, budget_used, report) = session;
    assert_eq!(last["tree"]["is_target"], true);
    assert_eq!(budget_used, 1);
    assert_eq!(report["nonperfect"], 1);
    let lengths: Vec<u64> = report["chains"].as_array().unwrap().iter().map(|c| c["trace_length"].as_u64().unwrap()).collect();
    assert_eq!(lengths.iter().filter(|&&l| l == 2).count(), 1, "{lengths:?}");

    let slice = tokio::task::spawn_blocking(move || http(addr, "GET", "/api/instances/parking12/slice?budget=1", "").1)
        .await
        .unwrap();
    assert_eq!(slice["node_count"], 118);
}
