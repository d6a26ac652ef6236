mod common;

use std::time::Duration;

use common::{exam_fixture, exam_script};
use finadapt::client::{ChatClient, ClientError, DecodeParams, RetryPolicy};
use finadapt::evalbench::{
    query_model, run_exams, score, translate_items, Direction, EvalError, EvalOptions, Extraction, Language,
};
use finadapt::mock::{MockReply, MockServer};
use serde_json::Value;

fn fast_retry() -> RetryPolicy {
    RetryPolicy {
        max_retries: 2,
        base_delay: Duration::from_millis(1),
        max_delay: Duration::from_millis(5),
    }
}

fn client(server: &MockServer) -> ChatClient {
    ChatClient::new(server.endpoint("mock"), fast_retry()).unwrap()
}

#[tokio::test]
async fn echo_reply_is_returned_verbatim() {
    let server = MockServer::start(|_, _| MockReply::content("B")).unwrap();
    let c = query_model("Soru?", &client(&server), DecodeParams::default()).await.unwrap();
    assert_eq!(c.text, "B");
    let req = &server.requests()[0];
    assert_eq!(req.temperature, 0.0);
    assert_eq!(req.max_tokens, Some(512));
}

#[tokio::test]
async fn persistent_500_is_a_transport_error() {
    let server = MockServer::start(|_, _| MockReply::Status(500)).unwrap();
    let err = query_model("Soru?", &client(&server), DecodeParams::default()).await.unwrap_err();
    assert!(matches!(err, EvalError::Transport(ClientError::Transport { attempts: 3, .. })));
    assert_eq!(server.request_count(), 3);
}

#[tokio::test]
async fn hundred_concurrent_answers_match_their_items() {
    let questions = exam_fixture();
    assert_eq!(questions.len(), 100);
    let server = MockServer::start(exam_script(&questions, |_| true)).unwrap();
    let opts = EvalOptions { parallelism: 16, ..Default::default() };
    let answers = run_exams(&questions, &questions, &client(&server), &opts).await.unwrap();
    assert_eq!(answers.len(), 100);
    for (a, q) in answers.iter().zip(&questions) {
        assert_eq!(a.item_id, q.id);
        assert_eq!(a.extracted, Some(Extraction::Choice(q.key)));
    }
}

#[tokio::test]
async fn concurrent_and_sequential_reports_agree() {
    let questions = exam_fixture();
    let server = MockServer::start(exam_script(&questions, |i| i % 3 != 0)).unwrap();
    let c = client(&server);
    let seq = run_exams(&questions, &questions, &c, &EvalOptions { parallelism: 1, ..Default::default() }).await.unwrap();
    let par = run_exams(&questions, &questions, &c, &EvalOptions { parallelism: 16, ..Default::default() }).await.unwrap();
    assert_eq!(score(&seq, &questions).unwrap(), score(&par, &questions).unwrap());
}

fn translator(transform: fn(&str) -> String, drop_option_for: Option<&'static str>) -> MockServer {
    MockServer::start(move |req, _| {
        let v: Value = serde_json::from_str(req.last_user_content().unwrap()).unwrap();
        let stem = v["stem"].as_str().unwrap();
        let mut options: Vec<String> = v["options"].as_array().unwrap().iter().map(|o| transform(o.as_str().unwrap())).collect();
        if drop_option_for.is_some_and(|s| stem.contains(s)) {
            options.pop();
        }
        MockReply::content(serde_json::json!({"stem": transform(stem), "options": options}).to_string())
    })
    .unwrap()
}

#[tokio::test]
async fn uppercasing_translator_keeps_structure() {
    let questions = exam_fixture()[..3].to_vec();
    let server = translator(|s| s.to_uppercase(), None);
    let out = translate_items(&questions, &client(&server), Direction::TrToEn, 4).await.unwrap();
    assert_eq!(out.translated.len(), 3);
    assert!(out.excluded.is_empty());
    for (t, q) in out.translated.iter().zip(&questions) {
        assert_eq!((&t.id, t.domain, t.key), (&q.id, q.domain, q.key));
        assert_eq!(t.stem, q.stem.to_uppercase());
        assert_eq!(t.language, Language::En);
    }
}

#[tokio::test]
async fn dropped_option_excludes_the_item() {
    let questions = exam_fixture()[..5].to_vec();
    let server = translator(|s| s.to_string(), Some("(3)"));
    let out = translate_items(&questions, &client(&server), Direction::TrToEn, 4).await.unwrap();
    assert_eq!(out.translated.len(), 4);
    assert_eq!(out.excluded.len(), 1);
    assert_eq!(out.excluded[0].item_id, questions[2].id);
}

#[tokio::test]
async fn identity_translator_changes_only_the_language_tag() {
    let questions = exam_fixture()[..10].to_vec();
    let server = translator(|s| s.to_string(), None);
    let out = translate_items(&questions, &client(&server), Direction::TrToEn, 4).await.unwrap();
    let back: Vec<_> = out.translated.into_iter().map(|mut q| {
        q.language = Language::Tr;
        q
    }).collect();
    assert_eq!(back, questions);
}
