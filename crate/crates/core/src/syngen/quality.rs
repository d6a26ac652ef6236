use serde::{Deserialize, Serialize};

use super::{StructuredGeneration, TaskType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QualityLimits {
    pub min_prompt_chars: usize,
    pub max_prompt_chars: usize,
    pub max_answer_chars: usize,
}

impl Default for QualityLimits {
    fn default() -> Self {
        Self {
            min_prompt_chars: 20,
            max_prompt_chars: 2000,
            max_answer_chars: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum QualityFailure {
    LengthViolation,
    EmptyResponse,
    AnswerFormatViolation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QualityVerdict {
    pub passed: bool,
    pub failures: Vec<QualityFailure>,
}

impl QualityVerdict {
    pub fn from_failures(failures: Vec<QualityFailure>) -> Self {
        Self {
            passed: failures.is_empty(),
            failures,
        }
    }

    pub fn pass() -> Self {
        Self::from_failures(Vec::new())
    }
}

/// Applies the length, emptiness and answer-format gates and reports every
/// failure that applies.
///
/// Lengths are counted in characters after trimming. An empty field is
/// reported as `EmptyResponse` only; the length and label checks apply to
/// non-empty fields.
pub fn quality_check(generation: &StructuredGeneration, task: TaskType, limits: &QualityLimits) -> QualityVerdict {
    let prompt = generation.rephrased_prompt.trim();
    let answer = generation.answer.trim();
    let prompt_len = prompt.chars().count();
    let answer_len = answer.chars().count();

    let mut failures = Vec::new();
    let prompt_out_of_range =
        prompt_len > 0 && (prompt_len < limits.min_prompt_chars || prompt_len > limits.max_prompt_chars);
    if prompt_out_of_range || answer_len > limits.max_answer_chars {
        failures.push(QualityFailure::LengthViolation);
    }
    if prompt.is_empty() || answer.is_empty() {
        failures.push(QualityFailure::EmptyResponse);
    }
    if !answer.is_empty() && !task.accepts_label(answer) {
        failures.push(QualityFailure::AnswerFormatViolation);
    }
    QualityVerdict::from_failures(failures)
}

#[cfg(test)]
mod tests {
    use super::*;
    use QualityFailure::*;

    const PROMPT: &str = "Soru: Aşağıdaki ifade metne göre doğru mu?";

    fn check(prompt: &str, answer: &str, task: TaskType) -> Vec<QualityFailure> {
        let v = quality_check(&StructuredGeneration::new(prompt, answer), task, &QualityLimits::default());
        assert_eq!(v.passed, v.failures.is_empty());
        v.failures
    }

    #[test]
    fn categorical_label_passes() {
        assert!(check(PROMPT, "Doğru", TaskType::TrueFalse).is_empty());
    }

    #[test]
    fn empty_answer() {
        assert_eq!(check(PROMPT, "", TaskType::Summarization), [EmptyResponse]);
        assert_eq!(check("   ", "özet", TaskType::Summarization), [EmptyResponse]);
    }

    #[test]
    fn chatty_categorical_answer() {
        assert_eq!(check(PROMPT, "Kesinlikle doğru bence", TaskType::TrueFalse), [AnswerFormatViolation]);
    }

    #[test]
    fn length_bounds() {
        assert_eq!(check("Kısa soru?", "özet", TaskType::Summarization), [LengthViolation]);
        assert_eq!(check(&"a".repeat(2001), "özet", TaskType::Summarization), [LengthViolation]);
        assert_eq!(check(PROMPT, &"ç".repeat(4001), TaskType::Summarization), [LengthViolation]);
        // exactly at the limits is fine; counted in chars, not bytes
        assert!(check(&"ş".repeat(20), &"ü".repeat(4000), TaskType::Summarization).is_empty());
        assert!(check(&"ş".repeat(2000), "x", TaskType::Summarization).is_empty());
    }

    #[test]
    fn reports_all_three_at_once() {
        let answer = "uzun ve kategorik olmayan ".repeat(200);
        assert_eq!(check("", &answer, TaskType::TrueFalse), [LengthViolation, EmptyResponse, AnswerFormatViolation]);
    }
}
