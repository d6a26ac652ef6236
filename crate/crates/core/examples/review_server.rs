//! Start the review API on an ephemeral port, submit a verdict and read the
//! queue back over HTTP.
//!
//! Pass `--serve` to keep it running for a browser-based front end.

use std::path::PathBuf;
use std::sync::Arc;

use finadapt::evalbench::{load_gazette, ModelAnswer};
use finadapt::judging::JudgmentStore;
use finadapt::review::{router, serve, ReviewState};
use serde_json::{json, Value};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let items = load_gazette(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/gazette.jsonl"))?;
    let answers: Vec<ModelAnswer> = items
        .iter()
        .map(|g| ModelAnswer {
            item_id: g.id.clone(),
            raw_text: format!("İlana göre: {}", g.question),
            extracted: None,
            latency_ms: 0,
            endpoint_id: "demo".into(),
        })
        .collect();
    let state = Arc::new(ReviewState::new(items, vec![("demo".into(), answers)], JudgmentStore::new([])));

    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
    let base = format!("http://{}", listener.local_addr()?);
    let server = tokio::spawn(serve(listener, router(state, None)));
    println!("review API at {base}");

    let http = reqwest::Client::new();
    let ack: Value = http
        .post(format!("{base}/api/judgment"))
        .json(&json!({"item_id": "gz-000", "annotator_id": "ayse", "verdict": "Correct"}))
        .send()
        .await?
        .json()
        .await?;
    println!("recorded: {}", ack["record"]);
    let queue: Value = http.get(format!("{base}/api/queue?annotator=ayse")).send().await?.json().await?;
    println!("ayse has {} of {} items left", queue["pending"].as_array().map_or(0, Vec::len), queue["total"]);

    if std::env::args().any(|a| a == "--serve") {
        server.await??;
    }
    Ok(())
}
