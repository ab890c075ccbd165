//! Experiment content: configuration, quiz and the pinned stage-1 table.
//!
//! Stage 2 and 3 depend on each participant's answers, so only their
//! construction parameters are pinned (through the configuration).

use std::path::Path;

use ecu_core::experiment::{build_stage1, ChoiceTask, ExperimentConfig, ExperimentError};
use serde::{Deserialize, Serialize};

pub const FORMAT: &str = "ecu-content";
pub const VERSION: u32 = 1;
pub const MAX_QUIZ_ATTEMPTS: u32 = 5;

#[derive(Debug, thiserror::Error)]
pub enum ContentError {
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed content file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("expected format {FORMAT:?}, found {0:?}")]
    Format(String),
    #[error("unsupported content version {0} (this build reads {VERSION})")]
    Version(u32),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error("pinned stage-1 table differs from the one the configuration builds (first mismatch at row {0})")]
    Stage1Mismatch(usize),
    #[error("quiz question {0} is malformed")]
    Quiz(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuizQuestion {
    pub text: String,
    pub options: Vec<String>,
    /// Index into `options`.
    pub correct: usize,
}

/// A question as shown to participants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicQuestion {
    pub text: String,
    pub options: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Content {
    pub format: String,
    pub version: u32,
    /// Label sessions are created against.
    pub content_id: String,
    pub config: ExperimentConfig,
    pub quiz: Vec<QuizQuestion>,
    pub stage1: Vec<ChoiceTask>,
}

impl Content {
    /// Builds content from a configuration, pinning its stage-1 table.
    pub fn new(content_id: &str, config: ExperimentConfig, quiz: Vec<QuizQuestion>) -> Result<Self, ContentError> {
        let stage1 = build_stage1(&config)?.tasks;
        let c = Self { format: FORMAT.into(), version: VERSION, content_id: content_id.into(), config, quiz, stage1 };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ContentError> {
        if self.format != FORMAT {
            return Err(ContentError::Format(self.format.clone()));
        }
        if self.version != VERSION {
            return Err(ContentError::Version(self.version));
        }
        self.config.validate()?;
        let built = build_stage1(&self.config)?.tasks;
        if built.len() != self.stage1.len() {
            return Err(ContentError::Stage1Mismatch(built.len().min(self.stage1.len()) + 1));
        }
        if let Some(i) = built.iter().zip(&self.stage1).position(|(a, b)| a != b) {
            return Err(ContentError::Stage1Mismatch(i + 1));
        }
        for (i, q) in self.quiz.iter().enumerate() {
            if q.options.len() < 2 || q.correct >= q.options.len() {
                return Err(ContentError::Quiz(i + 1));
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, ContentError> {
        let c: Content = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, ContentError> {
        let text = std::fs::read_to_string(path).map_err(|source| ContentError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("content always serializes")
    }

    pub fn public_quiz(&self) -> Vec<PublicQuestion> {
        self.quiz.iter().map(|q| PublicQuestion { text: q.text.clone(), options: q.options.clone() }).collect()
    }

    /// All answers correct, in order.
    pub fn grade(&self, answers: &[usize]) -> bool {
        answers.len() == self.quiz.len() && self.quiz.iter().zip(answers).all(|(q, &a)| q.correct == a)
    }
}

fn question(text: &str, options: &[&str], correct: usize) -> QuizQuestion {
    QuizQuestion { text: text.into(), options: options.iter().map(|s| s.to_string()).collect(), correct }
}

/// Default quiz on the payment and task rules.
pub fn default_quiz() -> Vec<QuizQuestion> {
    vec![
        question("How many tasks will you complete today?", &["10", "20", "28"], 2),
        question("How many of your tasks will be paid?", &["One, chosen at random", "All of them", "The last one"], 0),
        question("How many points are worth $1.00?", &["10", "100", "1000"], 1),
        question(
            "In a table, how many times can you move from Option A to Option B?",
            &["At most once", "Any number of times"],
            0,
        ),
    ]
}

impl Default for Content {
    fn default() -> Self {
        Self::new("default-v1", ExperimentConfig::default(), default_quiz()).expect("default content is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_content_round_trips() {
        let c = Content::default();
        assert_eq!(Content::parse(&c.to_json()).unwrap(), c);
        assert_eq!(c.stage1.len(), 10);
    }

    #[test]
    fn tampered_stage1_is_rejected() {
        let mut v: serde_json::Value = serde_json::from_str(&Content::default().to_json()).unwrap();
        v["stage1"][3]["option_a"]["support"][0][0] = 133.0.into();
        assert!(matches!(Content::parse(&v.to_string()), Err(ContentError::Stage1Mismatch(4))));
    }

    #[test]
    fn grading_needs_every_answer() {
        let c = Content::default();
        assert!(c.grade(&[2, 0, 1, 0]));
        assert!(!c.grade(&[2, 0, 1]));
        assert!(!c.grade(&[2, 0, 1, 1]));
    }
}
