#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;
use std::time::Duration;

use finadapt::client::ChatRequest;
use finadapt::evalbench::{load_exams, Choice, ExamQuestion};
use finadapt::mock::MockReply;
use finadapt::syngen::{AnswerFormat, TaskType, TemplateSet};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn exam_fixture() -> Vec<ExamQuestion> {
    load_exams(&fixture("exams.jsonl")).unwrap()
}

/// The unanswered question at the end of a few-shot prompt.
pub fn target_stem(prompt: &str) -> &str {
    let start = prompt
        .rfind("Soru: ")
        .map(|i| i + "Soru: ".len())
        .or_else(|| prompt.rfind("Question: ").map(|i| i + "Question: ".len()))
        .expect("prompt has a question");
    let rest = &prompt[start..];
    &rest[..rest.find('\n').unwrap_or(rest.len())]
}

/// Scripted exam answerer: answers question `i` of `questions` correctly
/// when `correct(i)` holds and with another offered label otherwise.
/// Replies are delayed by a pseudo-random few milliseconds so completion
/// order differs from request order.
pub fn exam_script(
    questions: &[ExamQuestion],
    correct: impl Fn(usize) -> bool + Send + Sync + 'static,
) -> impl Fn(&ChatRequest, usize) -> MockReply + Send + Sync + 'static {
    let by_stem: HashMap<String, (usize, ExamQuestion)> =
        questions.iter().enumerate().map(|(i, q)| (q.stem.clone(), (i, q.clone()))).collect();
    move |req, n| {
        let prompt = req.last_user_content().unwrap_or_default();
        let Some((i, q)) = by_stem.get(target_stem(prompt)) else {
            return MockReply::content("bilmiyorum");
        };
        let label = if correct(*i) {
            q.key
        } else {
            q.options.iter().map(|(l, _)| *l).find(|l| *l != q.key).unwrap_or(Choice::A)
        };
        let delay = Duration::from_millis(((n * 7919 + i * 31) % 9) as u64);
        MockReply::content(format!("Cevap: {label}")).after(delay)
    }
}

/// Always-pass generator reply for a synth request: a long enough prompt
/// and, for categorical tasks, a valid label.
pub fn passing_generation(req: &ChatRequest) -> MockReply {
    let user = req.last_user_content().unwrap_or_default();
    let templates = TemplateSet::default();
    let task = TaskType::ALL.into_iter().find(|&t| {
        let instruction = templates.seed_prompt(t, "");
        user.contains(instruction.lines().next().unwrap_or_default())
    });
    let answer = match task.map(|t| t.answer_format()) {
        Some(AnswerFormat::Categorical(labels)) => labels[0].to_string(),
        _ => "Metne dayanan kısa bir yanıt.".to_string(),
    };
    let body = serde_json::json!({
        "rephrased_prompt": "Aşağıdaki metni okuyarak verilen görevi yerine getiriniz.",
        "answer": answer,
    });
    MockReply::content(body.to_string())
}
