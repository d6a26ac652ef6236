//! Scriptable in-process chat-completion server for deterministic tests.
//!
//! ```no_run
//! use finadapt::mock::{MockReply, MockServer};
//!
//! let server = MockServer::start(|_req, _n| MockReply::content("B")).unwrap();
//! let endpoint = server.endpoint("mock");
//! # drop(endpoint);
//! ```

use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::Duration;

use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::{Json, Router};
use serde_json::json;
use tokio::sync::oneshot;

use crate::client::{ChatRequest, EndpointDescriptor};

/// What the mock answers to one request.
#[derive(Debug, Clone)]
pub enum MockReply {
    /// A well-formed completion whose message content is this string.
    Content(String),
    /// An error status with a small JSON body.
    Status(u16),
    /// A 200 response with this exact body (for malformed-envelope tests).
    RawBody(String),
    Delayed(Duration, Box<MockReply>),
}

impl MockReply {
    pub fn content(s: impl Into<String>) -> Self {
        MockReply::Content(s.into())
    }

    pub fn after(self, delay: Duration) -> Self {
        MockReply::Delayed(delay, Box::new(self))
    }
}

type Script = dyn Fn(&ChatRequest, usize) -> MockReply + Send + Sync;

#[derive(Clone)]
struct MockState {
    script: Arc<Script>,
    log: Arc<Mutex<Vec<ChatRequest>>>,
}

/// Serves `POST /v1/chat/completions` on an ephemeral localhost port from a
/// background thread. The script receives each request and its 0-based
/// arrival index. Shuts down on drop.
pub struct MockServer {
    url: String,
    log: Arc<Mutex<Vec<ChatRequest>>>,
    shutdown: Option<oneshot::Sender<()>>,
    thread: Option<JoinHandle<()>>,
}

impl MockServer {
    pub fn start<F>(script: F) -> std::io::Result<Self>
    where
        F: Fn(&ChatRequest, usize) -> MockReply + Send + Sync + 'static,
    {
        let listener = TcpListener::bind("127.0.0.1:0")?;
        listener.set_nonblocking(true)?;
        let url = format!("http://{}", listener.local_addr()?);
        let log = Arc::new(Mutex::new(Vec::new()));
        let state = MockState {
            script: Arc::new(script),
            log: log.clone(),
        };
        let (tx, rx) = oneshot::channel::<()>();
        let runtime = tokio::runtime::Builder::new_multi_thread()
            .worker_threads(2)
            .enable_all()
            .build()?;
        let thread = std::thread::spawn(move || {
            runtime.block_on(async move {
                let listener = tokio::net::TcpListener::from_std(listener).expect("listener");
                let app = Router::new()
                    .route("/v1/chat/completions", post(handle))
                    .with_state(state);
                let _ = axum::serve(listener, app)
                    .with_graceful_shutdown(async {
                        let _ = rx.await;
                    })
                    .await;
            });
        });
        Ok(Self {
            url,
            log,
            shutdown: Some(tx),
            thread: Some(thread),
        })
    }

    pub fn url(&self) -> &str {
        &self.url
    }

    pub fn endpoint(&self, id: &str) -> EndpointDescriptor {
        EndpointDescriptor::new(id, self.url.clone(), "mock-model")
    }

    pub fn request_count(&self) -> usize {
        self.log.lock().unwrap().len()
    }

    pub fn requests(&self) -> Vec<ChatRequest> {
        self.log.lock().unwrap().clone()
    }
}

impl Drop for MockServer {
    fn drop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

async fn handle(State(state): State<MockState>, Json(req): Json<ChatRequest>) -> Response {
    let index = {
        let mut log = state.log.lock().unwrap();
        log.push(req.clone());
        log.len() - 1
    };
    let mut reply = (state.script)(&req, index);
    loop {
        match reply {
            MockReply::Delayed(d, inner) => {
                tokio::time::sleep(d).await;
                reply = *inner;
            }
            MockReply::Content(content) => {
                return Json(json!({
                    "id": format!("mock-{index}"),
                    "object": "chat.completion",
                    "created": 0,
                    "model": req.model,
                    "choices": [{
                        "index": 0,
                        "message": {"role": "assistant", "content": content},
                        "finish_reason": "stop"
                    }]
                }))
                .into_response()
            }
            MockReply::Status(code) => {
                let status = StatusCode::from_u16(code).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
                return (status, Json(json!({"error": {"message": "scripted failure"}}))).into_response();
            }
            MockReply::RawBody(body) => return (StatusCode::OK, body).into_response(),
        }
    }
}
