use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use super::{SyngenError, TaskType};

const DEFAULT_TEMPLATES: &str = include_str!("../../assets/templates.toml");

#[derive(Debug, Clone, Deserialize)]
struct TemplateFile {
    generation: GenerationTemplate,
    seed: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct GenerationTemplate {
    pub system: String,
    pub user: String,
}

/// Seed-prompt templates per task plus the rephrase-and-answer request.
#[derive(Debug, Clone)]
pub struct TemplateSet {
    generation: GenerationTemplate,
    seed: BTreeMap<TaskType, String>,
}

impl Default for TemplateSet {
    fn default() -> Self {
        Self::from_toml_str(DEFAULT_TEMPLATES).expect("bundled templates are valid")
    }
}

impl TemplateSet {
    pub fn from_toml_str(s: &str) -> Result<Self, SyngenError> {
        let file: TemplateFile = toml::from_str(s).map_err(|e| SyngenError::Template(e.to_string()))?;
        let mut seed = BTreeMap::new();
        for task in TaskType::ALL {
            let text = file
                .seed
                .get(task.slug())
                .ok_or_else(|| SyngenError::Template(format!("missing seed template for {task}")))?;
            if !text.contains("{reference}") {
                return Err(SyngenError::Template(format!("seed template for {task} lacks {{reference}}")));
            }
            seed.insert(task, text.trim().to_string());
        }
        if !file.generation.user.contains("{seed_prompt}") {
            return Err(SyngenError::Template("generation template lacks {seed_prompt}".into()));
        }
        Ok(Self {
            generation: file.generation,
            seed,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, SyngenError> {
        let s = std::fs::read_to_string(path).map_err(|e| SyngenError::Template(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&s)
    }

    pub fn seed_prompt(&self, task: TaskType, reference: &str) -> String {
        self.seed[&task].replace("{reference}", reference)
    }

    pub fn generation(&self) -> &GenerationTemplate {
        &self.generation
    }

    pub fn generation_user(&self, seed_prompt: &str) -> String {
        self.generation.user.trim().replace("{seed_prompt}", seed_prompt)
    }
}
