use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ExamDomain {
    BI,
    FTIF,
    ECO,
    FI,
    PSF,
    PFT,
    AFP,
}

impl ExamDomain {
    pub const ALL: [ExamDomain; 7] = [
        ExamDomain::BI,
        ExamDomain::FTIF,
        ExamDomain::ECO,
        ExamDomain::FI,
        ExamDomain::PSF,
        ExamDomain::PFT,
        ExamDomain::AFP,
    ];

    pub fn code(self) -> &'static str {
        match self {
            ExamDomain::BI => "BI",
            ExamDomain::FTIF => "FTIF",
            ExamDomain::ECO => "ECO",
            ExamDomain::FI => "FI",
            ExamDomain::PSF => "PSF",
            ExamDomain::PFT => "PFT",
            ExamDomain::AFP => "AFP",
        }
    }
}

impl fmt::Display for ExamDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Gazette announcement type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EventType {
    /// Change of capital.
    CC,
    /// Change of management.
    CM,
    /// Composition with creditors.
    CwC,
    /// Notice to creditors.
    NtC,
}

impl EventType {
    pub const ALL: [EventType; 4] = [EventType::CC, EventType::CM, EventType::CwC, EventType::NtC];

    pub fn code(self) -> &'static str {
        match self {
            EventType::CC => "CC",
            EventType::CM => "CM",
            EventType::CwC => "CwC",
            EventType::NtC => "NtC",
        }
    }
}

impl fmt::Display for EventType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Choice {
    A,
    B,
    C,
    D,
    E,
}

impl Choice {
    pub const ALL: [Choice; 5] = [Choice::A, Choice::B, Choice::C, Choice::D, Choice::E];

    pub fn letter(self) -> char {
        (b'A' + self as u8) as char
    }

    pub fn from_letter(c: char) -> Option<Self> {
        Self::ALL.into_iter().find(|x| x.letter() == c)
    }
}

impl fmt::Display for Choice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Language {
    Tr,
    En,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExamQuestion {
    pub id: String,
    pub domain: ExamDomain,
    pub stem: String,
    pub options: Vec<(Choice, String)>,
    pub key: Choice,
    pub language: Language,
}

impl ExamQuestion {
    pub fn validate(&self) -> Result<(), String> {
        if self.id.trim().is_empty() {
            return Err("empty id".into());
        }
        if self.stem.trim().is_empty() {
            return Err(format!("{}: empty stem", self.id));
        }
        if !(2..=5).contains(&self.options.len()) {
            return Err(format!("{}: {} options, expected 2 to 5", self.id, self.options.len()));
        }
        if self.options.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(format!("{}: option labels must be unique and in alphabetical order", self.id));
        }
        if let Some((label, _)) = self.options.iter().find(|(_, t)| t.trim().is_empty()) {
            return Err(format!("{}: option {label} has empty text", self.id));
        }
        if !self.options.iter().any(|(l, _)| *l == self.key) {
            return Err(format!("{}: key {} is not among the options", self.id, self.key));
        }
        Ok(())
    }

    pub fn option_text(&self, label: Choice) -> Option<&str> {
        self.options.iter().find(|(l, _)| *l == label).map(|(_, t)| t.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GazetteItem {
    pub id: String,
    pub event_type: EventType,
    pub announcement_text: String,
    pub question: String,
    pub gold_answer: String,
}

impl GazetteItem {
    pub fn validate(&self) -> Result<(), String> {
        for (name, value) in [
            ("id", &self.id),
            ("announcement_text", &self.announcement_text),
            ("question", &self.question),
            ("gold_answer", &self.gold_answer),
        ] {
            if value.trim().is_empty() {
                return Err(format!("{name} is empty"));
            }
        }
        Ok(())
    }
}

/// The label read out of an exam reply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Extraction {
    Choice(Choice),
    Abstain,
}

impl Extraction {
    pub fn choice(self) -> Option<Choice> {
        match self {
            Extraction::Choice(c) => Some(c),
            Extraction::Abstain => None,
        }
    }
}

impl fmt::Display for Extraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extraction::Choice(c) => c.fmt(f),
            Extraction::Abstain => f.write_str("Abstain"),
        }
    }
}

impl FromStr for Extraction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            _ if s == "Abstain" => Ok(Extraction::Abstain),
            (Some(c), None) => Choice::from_letter(c).map(Extraction::Choice).ok_or_else(|| format!("unknown label {s:?}")),
            _ => Err(format!("unknown label {s:?}")),
        }
    }
}

impl Serialize for Extraction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Extraction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One model reply. `extracted` is set for exam runs and absent for
/// gazette runs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelAnswer {
    pub item_id: String,
    pub raw_text: String,
    pub extracted: Option<Extraction>,
    pub latency_ms: u64,
    pub endpoint_id: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extraction_serializes_as_label() {
        let a = ModelAnswer {
            item_id: "q1".into(),
            raw_text: "B".into(),
            extracted: Some(Extraction::Choice(Choice::B)),
            latency_ms: 3,
            endpoint_id: "m".into(),
        };
        let json = serde_json::to_string(&a).unwrap();
        assert!(json.contains("\"extracted\":\"B\""));
        assert_eq!(serde_json::from_str::<ModelAnswer>(&json).unwrap(), a);
        let abstain: Extraction = serde_json::from_str("\"Abstain\"").unwrap();
        assert_eq!(abstain, Extraction::Abstain);
        assert!(serde_json::from_str::<Extraction>("\"F\"").is_err());
    }

    #[test]
    fn options_must_be_ordered_and_contain_key() {
        let mut q = ExamQuestion {
            id: "q".into(),
            domain: ExamDomain::BI,
            stem: "Soru".into(),
            options: vec![(Choice::A, "x".into()), (Choice::B, "y".into())],
            key: Choice::B,
            language: Language::Tr,
        };
        assert!(q.validate().is_ok());
        q.key = Choice::C;
        assert!(q.validate().is_err());
        q.key = Choice::A;
        q.options.swap(0, 1);
        assert!(q.validate().is_err());
        q.options = vec![(Choice::A, "x".into())];
        assert!(q.validate().is_err());
    }
}
