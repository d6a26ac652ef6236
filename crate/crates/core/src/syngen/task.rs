use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::SftSource;
use crate::text::turkish_fold;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskType {
    FillInTheBlank,
    MultiTurnQa,
    MultipleChoiceQa,
    Summarization,
    TrueFalse,
    KeyInformationExtraction,
    TableGeneration,
    SentimentAnalysis,
    ListGeneration,
    NamedEntityRecognition,
    Categorization,
}

/// Whether an answer is a fixed label or open text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnswerFormat {
    Categorical(&'static [&'static str]),
    FreeForm,
}

impl TaskType {
    pub const ALL: [TaskType; 11] = [
        TaskType::FillInTheBlank,
        TaskType::MultiTurnQa,
        TaskType::MultipleChoiceQa,
        TaskType::Summarization,
        TaskType::TrueFalse,
        TaskType::KeyInformationExtraction,
        TaskType::TableGeneration,
        TaskType::SentimentAnalysis,
        TaskType::ListGeneration,
        TaskType::NamedEntityRecognition,
        TaskType::Categorization,
    ];

    pub fn slug(self) -> &'static str {
        match self {
            TaskType::FillInTheBlank => "fill_in_the_blank",
            TaskType::MultiTurnQa => "multi_turn_qa",
            TaskType::MultipleChoiceQa => "multiple_choice_qa",
            TaskType::Summarization => "summarization",
            TaskType::TrueFalse => "true_false",
            TaskType::KeyInformationExtraction => "key_information_extraction",
            TaskType::TableGeneration => "table_generation",
            TaskType::SentimentAnalysis => "sentiment_analysis",
            TaskType::ListGeneration => "list_generation",
            TaskType::NamedEntityRecognition => "named_entity_recognition",
            TaskType::Categorization => "categorization",
        }
    }

    pub fn answer_format(self) -> AnswerFormat {
        match self {
            TaskType::TrueFalse => AnswerFormat::Categorical(&["Doğru", "Yanlış"]),
            TaskType::MultipleChoiceQa => AnswerFormat::Categorical(&["A", "B", "C", "D", "E"]),
            TaskType::SentimentAnalysis => AnswerFormat::Categorical(&["Pozitif", "Negatif", "Nötr"]),
            TaskType::Categorization => AnswerFormat::Categorical(&["CC", "CM", "CwC", "NtC"]),
            _ => AnswerFormat::FreeForm,
        }
    }

    pub fn is_categorical(self) -> bool {
        matches!(self.answer_format(), AnswerFormat::Categorical(_))
    }

    /// Trimmed, case-folded membership in the task's label set.
    /// Always true for free-form tasks.
    pub fn accepts_label(self, answer: &str) -> bool {
        match self.answer_format() {
            AnswerFormat::FreeForm => true,
            AnswerFormat::Categorical(labels) => {
                let folded = label_fold(answer.trim());
                labels.iter().any(|l| label_fold(l) == folded)
            }
        }
    }
}

/// Case fold that also ignores the dotted/dotless distinction, so "POZITIF"
/// (ASCII capitals) and "POZİTİF" both match "Pozitif".
fn label_fold(s: &str) -> String {
    turkish_fold(s).replace('ı', "i")
}

impl fmt::Display for TaskType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

/// Tasks generated from each instruction-data source.
pub fn registered_tasks(source: SftSource) -> &'static [TaskType] {
    use TaskType::*;
    match source {
        SftSource::Academic => &[FillInTheBlank, MultiTurnQa, MultipleChoiceQa, Summarization, TrueFalse],
        SftSource::CentralBank => &[
            KeyInformationExtraction,
            MultiTurnQa,
            SentimentAnalysis,
            Summarization,
            TableGeneration,
        ],
        SftSource::News => &[SentimentAnalysis, Summarization],
        SftSource::TradeRegistryGazette => &[
            Categorization,
            ListGeneration,
            TableGeneration,
            MultiTurnQa,
            NamedEntityRecognition,
            Summarization,
        ],
    }
}

pub fn is_registered(source: SftSource, task: TaskType) -> bool {
    registered_tasks(source).contains(&task)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn eleven_tasks_four_categorical() {
        assert_eq!(TaskType::ALL.len(), 11);
        let cat: Vec<TaskType> = TaskType::ALL.into_iter().filter(|t| t.is_categorical()).collect();
        assert_eq!(
            cat,
            [
                TaskType::MultipleChoiceQa,
                TaskType::TrueFalse,
                TaskType::SentimentAnalysis,
                TaskType::Categorization
            ]
        );
    }

    #[test]
    fn every_task_has_a_source() {
        for t in TaskType::ALL {
            assert!(SftSource::ALL.iter().any(|&s| is_registered(s, t)), "{t}");
        }
        assert!(!is_registered(SftSource::Academic, TaskType::SentimentAnalysis));
        assert!(is_registered(SftSource::CentralBank, TaskType::SentimentAnalysis));
    }

    #[test]
    fn labels_accept_case_variants() {
        assert!(TaskType::TrueFalse.accepts_label("  YANLIŞ\n"));
        assert!(TaskType::TrueFalse.accepts_label("doğru"));
        assert!(TaskType::Categorization.accepts_label("cwc"));
        assert!(TaskType::SentimentAnalysis.accepts_label("NÖTR"));
        assert!(TaskType::SentimentAnalysis.accepts_label("POZITIF"));
        assert!(TaskType::SentimentAnalysis.accepts_label("POZİTİF"));
        assert!(!TaskType::TrueFalse.accepts_label("Kesinlikle doğru bence"));
        assert!(TaskType::Summarization.accepts_label("anything"));
    }

    proptest! {
        #[test]
        fn label_acceptance_ignores_whitespace_and_case(
            label_idx in 0usize..5,
            lead in "[ \t\n]{0,3}",
            trail in "[ \t\n]{0,3}",
            upper in any::<bool>(),
        ) {
            let label = ["A", "B", "C", "D", "E"][label_idx];
            let l = if upper { label.to_string() } else { label.to_lowercase() };
            let answer = format!("{lead}{l}{trail}");
            prop_assert!(TaskType::MultipleChoiceQa.accepts_label(&answer));
            for t in [TaskType::TrueFalse, TaskType::SentimentAnalysis, TaskType::Categorization] {
                if let AnswerFormat::Categorical(ls) = t.answer_format() {
                    for l in ls {
                        let variant = if upper { l.to_uppercase() } else { l.to_lowercase() };
                        prop_assert!(t.accepts_label(&format!("{lead}{variant}{trail}")), "{} {}", t, variant);
                    }
                }
            }
        }
    }
}
