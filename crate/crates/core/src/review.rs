//! JSON-over-HTTP API for the human review workflow: per-annotator
//! queues, verdict submission, agreement and per-run scores.
//!
//! With a single run, judgments are stored without a run tag and the `run`
//! query parameter is optional. With several runs it is required.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::evalbench::{EventType, GazetteItem, ModelAnswer};
use crate::judging::{
    accuracy_from_judgments, judgment_queue, pairwise_kappa_matrix, ItemKey, JudgingError, JudgmentRecord,
    JudgmentStore, Policy, RecordOutcome, Verdict,
};

pub struct ReviewState {
    items: BTreeMap<String, GazetteItem>,
    runs: BTreeMap<String, Vec<ModelAnswer>>,
    store: Mutex<JudgmentStore>,
}

impl ReviewState {
    /// `store` gets every served (run, item) pair registered as known.
    pub fn new(items: Vec<GazetteItem>, runs: Vec<(String, Vec<ModelAnswer>)>, mut store: JudgmentStore) -> Self {
        let single = runs.len() == 1;
        for (name, answers) in &runs {
            let run = (!single).then_some(name.as_str());
            store.add_known(answers.iter().map(|a| ItemKey::new(run, &a.item_id)));
        }
        Self {
            items: items.into_iter().map(|g| (g.id.clone(), g)).collect(),
            runs: runs.into_iter().collect(),
            store: Mutex::new(store),
        }
    }

    /// Known item keys for every served answer, for opening a store.
    pub fn item_keys(runs: &[(String, Vec<ModelAnswer>)]) -> Vec<ItemKey> {
        let single = runs.len() == 1;
        runs.iter()
            .flat_map(|(name, answers)| {
                let run = (!single).then_some(name.as_str());
                answers.iter().map(move |a| ItemKey::new(run, &a.item_id))
            })
            .collect()
    }

    fn resolve(&self, run: Option<&str>) -> Result<(&str, Option<String>), ApiError> {
        if self.runs.len() == 1 {
            let name = self.runs.keys().next().expect("one run").as_str();
            return match run {
                None => Ok((name, None)),
                Some(r) if r == name => Ok((name, None)),
                Some(r) => Err(ApiError::not_found("unknown_run", format!("no run named {r:?}"))),
            };
        }
        let r = run.ok_or_else(|| ApiError::bad_request("run_required", "several runs are served; pass ?run=NAME"))?;
        let name = self
            .runs
            .get_key_value(r)
            .ok_or_else(|| ApiError::not_found("unknown_run", format!("no run named {r:?}")))?
            .0;
        Ok((name.as_str(), Some(name.clone())))
    }

    pub fn records(&self) -> Vec<JudgmentRecord> {
        self.store.lock().expect("store lock").records()
    }
}

#[derive(Debug, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    status: StatusCode,
    error: &'static str,
    message: String,
}

impl ApiError {
    fn bad_request(error: &'static str, message: impl Into<String>) -> Self {
        Self { status: StatusCode::BAD_REQUEST, error, message: message.into() }
    }

    fn not_found(error: &'static str, message: impl Into<String>) -> Self {
        Self { status: StatusCode::NOT_FOUND, error, message: message.into() }
    }

    fn conflict(error: &'static str, message: impl Into<String>) -> Self {
        Self { status: StatusCode::CONFLICT, error, message: message.into() }
    }
}

impl From<JudgingError> for ApiError {
    fn from(e: JudgingError) -> Self {
        let message = e.to_string();
        match e {
            JudgingError::UnknownItem(_) => Self::not_found("unknown_item", message),
            JudgingError::UnjudgedItems { .. } => Self::conflict("unjudged_items", message),
            JudgingError::NoOverlap => Self::conflict("no_overlap", message),
            _ => Self { status: StatusCode::INTERNAL_SERVER_ERROR, error: "internal", message },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({"error": self.error, "message": self.message}))).into_response()
    }
}

#[derive(Debug, Deserialize)]
pub struct QueueQuery {
    pub annotator: String,
    pub run: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueueItem {
    pub item_id: String,
    pub event_type: EventType,
    pub announcement_text: String,
    pub question: String,
    pub model_answer: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueueView {
    pub annotator: String,
    pub run: String,
    pub total: usize,
    pub judged: usize,
    pub pending: Vec<QueueItem>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JudgmentSubmission {
    pub item_id: String,
    pub annotator_id: String,
    pub verdict: Verdict,
    #[serde(default)]
    pub run: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JudgmentAck {
    pub record: JudgmentRecord,
    pub superseded: bool,
}

#[derive(Debug, Deserialize)]
pub struct RunQuery {
    pub run: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub name: String,
    pub answers: usize,
}

async fn queue(State(s): State<Arc<ReviewState>>, Query(q): Query<QueueQuery>) -> Result<Json<QueueView>, ApiError> {
    if q.annotator.trim().is_empty() {
        return Err(ApiError::bad_request("annotator_required", "annotator must not be empty"));
    }
    let (name, key) = s.resolve(q.run.as_deref())?;
    let answers = &s.runs[name];
    let records = s.store.lock().expect("store lock").records_for_run(key.as_deref());
    let pending = judgment_queue(answers, &records, &q.annotator);
    let pending: Vec<QueueItem> = pending
        .into_iter()
        .filter_map(|a| {
            let g = s.items.get(&a.item_id)?;
            Some(QueueItem {
                item_id: a.item_id.clone(),
                event_type: g.event_type,
                announcement_text: g.announcement_text.clone(),
                question: g.question.clone(),
                model_answer: a.raw_text.clone(),
            })
        })
        .collect();
    Ok(Json(QueueView {
        annotator: q.annotator,
        run: name.to_string(),
        total: answers.len(),
        judged: answers.len() - pending.len(),
        pending,
    }))
}

async fn judgment(
    State(s): State<Arc<ReviewState>>,
    Json(sub): Json<JudgmentSubmission>,
) -> Result<Json<JudgmentAck>, ApiError> {
    if sub.annotator_id.trim().is_empty() {
        return Err(ApiError::bad_request("annotator_required", "annotator_id must not be empty"));
    }
    let (_, key) = s.resolve(sub.run.as_deref())?;
    let mut record = JudgmentRecord::new(sub.item_id, sub.annotator_id, sub.verdict);
    record.run = key;
    let outcome = s.store.lock().expect("store lock").record(record.clone())?;
    Ok(Json(JudgmentAck {
        record,
        superseded: matches!(outcome, RecordOutcome::Superseded(_)),
    }))
}

async fn agreement(
    State(s): State<Arc<ReviewState>>,
    Query(q): Query<RunQuery>,
) -> Result<Json<crate::judging::AgreementReport>, ApiError> {
    let store = s.store.lock().expect("store lock");
    let records = match q.run.as_deref() {
        Some(r) => store.records_for_run(s.resolve(Some(r))?.1.as_deref()),
        None => store.records(),
    };
    drop(store);
    Ok(Json(pairwise_kappa_matrix(&records)?))
}

async fn score(
    State(s): State<Arc<ReviewState>>,
    Query(q): Query<RunQuery>,
) -> Result<Json<crate::evalbench::ScoreReport>, ApiError> {
    let (name, key) = s.resolve(q.run.as_deref())?;
    let records = s.store.lock().expect("store lock").records_for_run(key.as_deref());
    let items: Vec<GazetteItem> = s.items.values().cloned().collect();
    Ok(Json(accuracy_from_judgments(&records, &s.runs[name], &items, Policy::Majority)?))
}

async fn runs(State(s): State<Arc<ReviewState>>) -> Json<Vec<RunSummary>> {
    Json(s.runs.iter().map(|(name, a)| RunSummary { name: name.clone(), answers: a.len() }).collect())
}

/// Builds the API router. Static UI assets, when given, are served from `/`.
pub fn router(state: Arc<ReviewState>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/queue", get(queue))
        .route("/api/judgment", post(judgment))
        .route("/api/agreement", get(agreement))
        .route("/api/score", get(score))
        .route("/api/runs", get(runs))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(tower_http::services::ServeDir::new(dir)),
        None => api,
    }
}

pub async fn serve(listener: tokio::net::TcpListener, app: Router) -> std::io::Result<()> {
    axum::serve(listener, app).await
}
