use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{EvalError, ExamQuestion, Language};
use crate::client::{map_bounded, ChatClient, ChatMessage, ChatRequest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    TrToEn,
    EnToTr,
}

impl Direction {
    pub fn target(self) -> Language {
        match self {
            Direction::TrToEn => Language::En,
            Direction::EnToTr => Language::Tr,
        }
    }

    fn instruction(self) -> &'static str {
        match self {
            Direction::TrToEn => "Translate the Turkish multiple-choice question in the user message into English.",
            Direction::EnToTr => "Translate the English multiple-choice question in the user message into Turkish.",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationExclusion {
    pub item_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TranslationOutcome {
    pub translated: Vec<ExamQuestion>,
    pub excluded: Vec<TranslationExclusion>,
}

pub fn translation_request(q: &ExamQuestion, direction: Direction) -> ChatRequest {
    let system = format!(
        "{} Reply with a JSON object with the keys \"stem\" and \"options\", where \"options\" lists the translated option texts in the original order. Keep the number of options unchanged.",
        direction.instruction()
    );
    let payload = json!({
        "stem": q.stem,
        "options": q.options.iter().map(|(_, t)| t.as_str()).collect::<Vec<_>>(),
    });
    ChatRequest::new(vec![ChatMessage::system(system), ChatMessage::user(payload.to_string())])
        .with_response_format(json!({"type": "json_object"}))
}

/// Applies a translator reply to `q`. Ids, domain, labels and key are kept;
/// only the stem, option texts and language change.
pub fn apply_translation(q: &ExamQuestion, reply: &str, direction: Direction) -> Result<ExamQuestion, String> {
    let value: Value = serde_json::from_str(crate::text::strip_code_fence(reply)).map_err(|e| format!("reply is not JSON: {e}"))?;
    let stem = value
        .get("stem")
        .and_then(Value::as_str)
        .filter(|s| !s.trim().is_empty())
        .ok_or("missing or empty \"stem\"")?;
    let options: Vec<&str> = value
        .get("options")
        .and_then(Value::as_array)
        .ok_or("missing \"options\" list")?
        .iter()
        .map(|v| v.as_str().ok_or("option is not a string"))
        .collect::<Result<_, _>>()?;
    if options.len() != q.options.len() {
        return Err(format!("expected {} options, got {}", q.options.len(), options.len()));
    }
    let out = ExamQuestion {
        stem: stem.to_string(),
        options: q.options.iter().zip(options).map(|((l, _), t)| (*l, t.to_string())).collect(),
        language: direction.target(),
        ..q.clone()
    };
    out.validate()?;
    Ok(out)
}

/// Translates each question with one request. Items whose reply breaks
/// the question structure are excluded and listed in the outcome; transport
/// failures abort the whole run.
pub async fn translate_items(
    questions: &[ExamQuestion],
    client: &ChatClient,
    direction: Direction,
    parallelism: usize,
) -> Result<TranslationOutcome, EvalError> {
    let replies = map_bounded(questions.iter().collect(), parallelism, |q: &ExamQuestion| async move {
        client.complete_text(&translation_request(q, direction)).await.map(|r| (q, r))
    })
    .await;
    let mut out = TranslationOutcome::default();
    for r in replies {
        let (q, reply) = r?;
        match apply_translation(q, &reply, direction) {
            Ok(t) => out.translated.push(t),
            Err(reason) => {
                tracing::warn!(item = %q.id, %reason, "translation excluded");
                out.excluded.push(TranslationExclusion {
                    item_id: q.id.clone(),
                    reason,
                })
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evalbench::{Choice, ExamDomain};

    fn q() -> ExamQuestion {
        ExamQuestion {
            id: "q1".into(),
            domain: ExamDomain::FI,
            stem: "Enflasyon nedir?".into(),
            options: vec![(Choice::A, "Fiyat artışı".into()), (Choice::B, "Fiyat düşüşü".into())],
            key: Choice::A,
            language: Language::Tr,
        }
    }

    #[test]
    fn reply_replaces_texts_only() {
        let t = apply_translation(&q(), r#"{"stem":"What is inflation?","options":["Price rise","Price fall"]}"#, Direction::TrToEn).unwrap();
        assert_eq!(t.stem, "What is inflation?");
        assert_eq!(t.options[1], (Choice::B, "Price fall".to_string()));
        assert_eq!((t.id.as_str(), t.domain, t.key, t.language), ("q1", ExamDomain::FI, Choice::A, Language::En));
    }

    #[test]
    fn broken_structure_is_rejected() {
        assert!(apply_translation(&q(), r#"{"stem":"x","options":["a"]}"#, Direction::TrToEn).is_err());
        assert!(apply_translation(&q(), r#"{"options":["a","b"]}"#, Direction::TrToEn).is_err());
        assert!(apply_translation(&q(), "not json", Direction::TrToEn).is_err());
        assert!(apply_translation(&q(), r#"{"stem":"x","options":["a",""]}"#, Direction::TrToEn).is_err());
    }

    #[test]
    fn request_carries_the_question_as_json() {
        let req = translation_request(&q(), Direction::TrToEn);
        let v: Value = serde_json::from_str(req.last_user_content().unwrap()).unwrap();
        assert_eq!(v["options"][1], "Fiyat düşüşü");
    }
}
