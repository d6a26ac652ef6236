use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{CorpusError, SourceCategory};
use crate::jsonl;

/// A document as ingested, before any cleaning.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDocument {
    pub id: String,
    pub category: SourceCategory,
    pub text: String,
    pub origin: String,
}

/// Wraps already-extracted text as a document.
///
/// The id is derived from the content so repeated ingestion of the same
/// input yields the same id; [`Corpus`] disambiguates collisions.
pub fn ingest_document(
    text: impl Into<String>,
    category: SourceCategory,
    origin: impl Into<String>,
) -> Result<RawDocument, CorpusError> {
    let text = text.into();
    let origin = origin.into();
    if text.trim().is_empty() {
        return Err(CorpusError::EmptyDocument { origin });
    }
    let mut hasher = Sha256::new();
    hasher.update(category.to_string().as_bytes());
    hasher.update([0]);
    hasher.update(origin.as_bytes());
    hasher.update([0]);
    hasher.update(text.as_bytes());
    let digest = hasher.finalize();
    let id = format!(
        "doc-{}",
        digest[..8].iter().map(|b| format!("{b:02x}")).collect::<String>()
    );
    Ok(RawDocument {
        id,
        category,
        text,
        origin,
    })
}

/// An ordered set of documents with unique ids.
#[derive(Debug, Default, Clone)]
pub struct Corpus {
    docs: Vec<RawDocument>,
    ids: HashSet<String>,
}

impl Corpus {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a document with a generated id, suffixing it if already taken.
    pub fn ingest(
        &mut self,
        text: impl Into<String>,
        category: SourceCategory,
        origin: impl Into<String>,
    ) -> Result<&RawDocument, CorpusError> {
        let mut doc = ingest_document(text, category, origin)?;
        if self.ids.contains(&doc.id) {
            let base = doc.id.clone();
            let mut n = 2;
            while self.ids.contains(&format!("{base}-{n}")) {
                n += 1;
            }
            doc.id = format!("{base}-{n}");
        }
        self.insert(doc)
    }

    /// Adds a document that already carries its id. Duplicate ids are rejected.
    pub fn insert(&mut self, doc: RawDocument) -> Result<&RawDocument, CorpusError> {
        if doc.text.trim().is_empty() {
            return Err(CorpusError::EmptyDocument { origin: doc.origin });
        }
        if !self.ids.insert(doc.id.clone()) {
            return Err(CorpusError::DuplicateId(doc.id));
        }
        self.docs.push(doc);
        Ok(self.docs.last().expect("just pushed"))
    }

    pub fn documents(&self) -> &[RawDocument] {
        &self.docs
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    /// Loads `{"id","category","text","origin"}` lines.
    pub fn load_jsonl(&mut self, path: &Path) -> Result<(), CorpusError> {
        let docs: Vec<RawDocument> = jsonl::read_jsonl(path)?;
        for doc in docs {
            self.insert(doc)?;
        }
        Ok(())
    }

    /// Loads a plain-text file as a single document.
    pub fn load_text_file(&mut self, path: &Path, category: SourceCategory) -> Result<(), CorpusError> {
        let text = std::fs::read_to_string(path).map_err(|e| jsonl::JsonlError::io(path, e))?;
        self.ingest(text, category, path.display().to_string())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{CptCategory, SftSource};

    #[test]
    fn builds_document_with_category() {
        let doc = ingest_document(
            "Banka kredisi faiz oranlarına bağlıdır.",
            CptCategory::Academic.into(),
            "thesis-17.pdf",
        )
        .unwrap();
        assert_eq!(doc.category, SourceCategory::Cpt(CptCategory::Academic));
        assert!(doc.id.starts_with("doc-"));
        assert_eq!(doc.origin, "thesis-17.pdf");
    }

    #[test]
    fn whitespace_only_is_rejected() {
        let err = ingest_document("   \n\t ", SftSource::News.into(), "x").unwrap_err();
        assert!(matches!(err, CorpusError::EmptyDocument { .. }));
    }

    #[test]
    fn large_text_is_kept_verbatim() {
        let unit = "Ticaret sicili ilanı: sermaye artırımı yapılmıştır.\n";
        let text: String = unit.repeat((1 << 20) / unit.len() + 1);
        let doc = ingest_document(text.clone(), SftSource::TradeRegistryGazette.into(), "trg-2021-05-04")
            .unwrap();
        assert_eq!(doc.text.len(), text.len());
        assert_eq!(doc.text, text);
    }

    #[test]
    fn corpus_ids_stay_unique() {
        let mut corpus = Corpus::new();
        let a = corpus.ingest("aynı metin", SftSource::News.into(), "x").unwrap().id.clone();
        let b = corpus.ingest("aynı metin", SftSource::News.into(), "x").unwrap().id.clone();
        assert_ne!(a, b);
        let dup = RawDocument {
            id: a.clone(),
            category: SftSource::News.into(),
            text: "başka".into(),
            origin: "y".into(),
        };
        assert!(matches!(corpus.insert(dup), Err(CorpusError::DuplicateId(id)) if id == a));
    }
}
