use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::Proposition;

/// Three-rank confidence scale. The discriminants are the scores used when
/// evidence is aggregated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrengthLevel {
    Weak = 1,
    Strong = 2,
    Warranted = 3,
}

impl StrengthLevel {
    pub const ALL: [StrengthLevel; 3] = [Self::Weak, Self::Strong, Self::Warranted];

    pub fn rank(self) -> u32 {
        self as u32
    }

    /// Level for an aggregate score, capped at warranted.
    pub fn from_score(score: u32) -> Option<Self> {
        match score {
            0 => None,
            1 => Some(Self::Weak),
            2 => Some(Self::Strong),
            _ => Some(Self::Warranted),
        }
    }
}

impl fmt::Display for StrengthLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Weak => "weak",
            Self::Strong => "strong",
            Self::Warranted => "warranted",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expertise {
    Expert,
    NonExpert,
}

/// How strongly a bare assertion is believed, given who made it.
pub fn assertion_strength(speaker: Expertise) -> StrengthLevel {
    match speaker {
        Expertise::Expert => StrengthLevel::Warranted,
        Expertise::NonExpert => StrengthLevel::Strong,
    }
}

/// Why a belief is held.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    KbRecord,
    Assertion { speaker: String, expertise: Expertise },
    Stereotype,
    /// Inferred from other beliefs; the set is never empty.
    Derived { from: BTreeSet<Proposition> },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Endorsement {
    pub level: StrengthLevel,
    pub source: Source,
}

impl Endorsement {
    pub fn new(level: StrengthLevel, source: Source) -> Self {
        Endorsement { level, source }
    }

    pub fn record(level: StrengthLevel) -> Self {
        Self::new(level, Source::KbRecord)
    }

    pub fn asserted(speaker: &str, expertise: Expertise) -> Self {
        Self::new(
            assertion_strength(expertise),
            Source::Assertion {
                speaker: speaker.to_string(),
                expertise,
            },
        )
    }

    /// Returns `None` for an empty support set.
    pub fn derived(level: StrengthLevel, from: BTreeSet<Proposition>) -> Option<Self> {
        if from.is_empty() {
            None
        } else {
            Some(Self::new(level, Source::Derived { from }))
        }
    }

    pub fn derivation(&self) -> Option<&BTreeSet<Proposition>> {
        match &self.source {
            Source::Derived { from } => Some(from),
            _ => None,
        }
    }

    pub fn is_derived(&self) -> bool {
        matches!(self.source, Source::Derived { .. })
    }
}
