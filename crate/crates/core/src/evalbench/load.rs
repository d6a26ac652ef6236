use std::collections::HashSet;
use std::path::Path;

use serde::de::DeserializeOwned;

use super::{EvalError, ExamQuestion, GazetteItem};
use crate::jsonl::{self, JsonlError};

fn load_validated<T: DeserializeOwned>(
    path: &Path,
    check: impl Fn(&T) -> Result<(), String>,
    id: impl Fn(&T) -> &str,
) -> Result<Vec<T>, EvalError> {
    let records: Vec<(usize, T)> = jsonl::read_jsonl_numbered(path)?;
    let mut seen = HashSet::new();
    for (line, item) in &records {
        let problem = check(item)
            .err()
            .or_else(|| (!seen.insert(id(item).to_string())).then(|| format!("duplicate id {:?}", id(item))));
        if let Some(message) = problem {
            return Err(JsonlError::Schema { line: *line, message }.into());
        }
    }
    Ok(records.into_iter().map(|(_, t)| t).collect())
}

pub fn load_exams(path: &Path) -> Result<Vec<ExamQuestion>, EvalError> {
    load_validated(path, ExamQuestion::validate, |q| &q.id)
}

pub fn load_gazette(path: &Path) -> Result<Vec<GazetteItem>, EvalError> {
    load_validated(path, GazetteItem::validate, |g| &g.id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evalbench::ExamDomain;

    fn write(lines: &[String]) -> tempfile::NamedTempFile {
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(f.path(), lines.join("\n")).unwrap();
        f
    }

    fn exam_line(id: &str, domain: &str, key: &str) -> String {
        format!(
            r#"{{"id":"{id}","domain":"{domain}","stem":"Hangisi doğrudur?","options":[["A","bir"],["B","iki"],["C","üç"]],"key":"{key}","language":"TR"}}"#
        )
    }

    #[test]
    fn one_question_per_domain() {
        let lines: Vec<_> = ExamDomain::ALL.iter().enumerate().map(|(i, d)| exam_line(&format!("q{i}"), d.code(), "A")).collect();
        let f = write(&lines);
        let qs = load_exams(f.path()).unwrap();
        assert_eq!(qs.len(), 7);
        assert_eq!(qs.iter().map(|q| q.domain).collect::<Vec<_>>(), ExamDomain::ALL.to_vec());
    }

    #[test]
    fn unknown_key_reports_line() {
        let f = write(&[exam_line("q0", "BI", "A"), exam_line("q1", "BI", "F")]);
        match load_exams(f.path()) {
            Err(EvalError::Jsonl(e)) => assert_eq!(e.line(), Some(2)),
            other => panic!("{other:?}"),
        }
        let f = write(&[exam_line("q0", "BI", "A"), exam_line("q1", "BI", "D")]);
        match load_exams(f.path()) {
            Err(EvalError::Jsonl(e)) => assert_eq!(e.line(), Some(2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn gazette_rows_load_and_validate() {
        let line = |i: usize, q: &str| {
            format!(r#"{{"id":"g{i}","event_type":"NtC","announcement_text":"İlan metni","question":"{q}","gold_answer":"Evet"}}"#)
        };
        let lines: Vec<_> = (0..880).map(|i| line(i, "Soru?")).collect();
        let f = write(&lines);
        assert_eq!(load_gazette(f.path()).unwrap().len(), 880);
        let f = write(&[line(0, "Soru?"), line(1, " ")]);
        match load_gazette(f.path()) {
            Err(EvalError::Jsonl(e)) => assert_eq!(e.line(), Some(2)),
            other => panic!("{other:?}"),
        }
    }
}
