use std::collections::HashSet;
use std::path::Path;

use super::{is_registered, InstructionSample, SyngenError};
use crate::jsonl::{self, JsonlError};

/// Writes one sample per line. Refuses samples that did not pass the gates.
pub fn export_dataset(samples: &[InstructionSample], path: &Path) -> Result<(), SyngenError> {
    if let Some(s) = samples.iter().find(|s| !s.verdict.passed) {
        return Err(SyngenError::UnpassedSample(s.id.clone()));
    }
    jsonl::write_jsonl(path, samples)?;
    Ok(())
}

pub fn import_dataset(path: &Path) -> Result<Vec<InstructionSample>, SyngenError> {
    let records: Vec<(usize, InstructionSample)> = jsonl::read_jsonl_numbered(path)?;
    let mut ids = HashSet::new();
    for (line, s) in &records {
        let problem = if !is_registered(s.sft_source, s.task) {
            Some(format!("task {} is not registered for source {:?}", s.task, s.sft_source))
        } else if s.verdict.passed != s.verdict.failures.is_empty() {
            Some("verdict.passed disagrees with failures".to_string())
        } else if !s.verdict.passed {
            Some("dataset contains a sample that failed quality checks".to_string())
        } else if !ids.insert(s.id.as_str()) {
            Some(format!("duplicate id {:?}", s.id))
        } else {
            None
        };
        if let Some(message) = problem {
            return Err(JsonlError::Schema { line: *line, message }.into());
        }
    }
    Ok(records.into_iter().map(|(_, s)| s).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::SftSource;
    use crate::syngen::{QualityVerdict, TaskType};

    fn sample(i: usize) -> InstructionSample {
        InstructionSample {
            id: format!("news-summarization-{i:05}"),
            task: TaskType::Summarization,
            sft_source: SftSource::News,
            prompt: format!("{i}. haberi iki cümleyle özetleyin lütfen."),
            answer: "Şirket sermayesini artırdı.".into(),
            context: "Haber metni.".into(),
            chunk_id: format!("news#{i:04}"),
            verdict: QualityVerdict::pass(),
        }
    }

    #[test]
    fn round_trip_23_samples() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.jsonl");
        let samples: Vec<_> = (0..23).map(sample).collect();
        export_dataset(&samples, &path).unwrap();
        assert_eq!(import_dataset(&path).unwrap(), samples);
    }

    #[test]
    fn missing_task_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.jsonl");
        export_dataset(&[sample(0), sample(1), sample(2)], &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let mut v: serde_json::Value = serde_json::from_str(&lines[1]).unwrap();
        v.as_object_mut().unwrap().remove("task");
        lines[1] = v.to_string();
        std::fs::write(&path, lines.join("\n")).unwrap();
        match import_dataset(&path) {
            Err(SyngenError::Jsonl(e)) => assert_eq!(e.line(), Some(2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_file_is_empty_dataset() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.jsonl");
        std::fs::write(&path, "").unwrap();
        assert!(import_dataset(&path).unwrap().is_empty());
    }

    #[test]
    fn unpassed_samples_are_not_exported() {
        let dir = tempfile::tempdir().unwrap();
        let mut bad = sample(3);
        bad.verdict = QualityVerdict::from_failures(vec![crate::syngen::QualityFailure::EmptyResponse]);
        let err = export_dataset(&[sample(0), bad], &dir.path().join("d.jsonl")).unwrap_err();
        assert!(matches!(err, SyngenError::UnpassedSample(id) if id == "news-summarization-00003"));
    }
}
