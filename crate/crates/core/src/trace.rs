//! Decision trace: one record per revision, prediction, focus step,
//! heuristic, recipe step and discourse act, in the order they happened.

use serde::{Deserialize, Serialize};

use crate::beliefs::{Proposition, Verdict};
use crate::focus::FocusStep;
use crate::negotiation::{DiscourseAct, RecipeKind};

pub trait TraceSink {
    fn emit(&mut self, event: Event);
}

/// Drops everything.
#[derive(Debug, Default, Clone, Copy)]
pub struct NullTrace;

impl TraceSink for NullTrace {
    fn emit(&mut self, _event: Event) {}
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReviseRole {
    Belief,
    Relation,
    /// A relation the evaluator already held, accepted without scoring.
    HeldRelation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum Event {
    Revise {
        target: Proposition,
        role: ReviseRole,
        verdict: Verdict,
    },
    Predict {
        target: Proposition,
        hypothesized: Vec<Proposition>,
        removed: Vec<Proposition>,
        verdict: Verdict,
    },
    Foci(FociEvent),
    Minset {
        target: Proposition,
        candidates: Vec<Proposition>,
        chosen: Vec<Proposition>,
    },
    Heuristic(HeuristicEvent),
    Recipe(RecipeEvent),
    Act(DiscourseAct),
}

impl Event {
    pub fn kind(&self) -> &'static str {
        match self {
            Event::Revise { .. } => "revise",
            Event::Predict { .. } => "predict",
            Event::Foci(_) => "foci",
            Event::Minset { .. } => "minset",
            Event::Heuristic(_) => "heuristic",
            Event::Recipe(_) => "recipe",
            Event::Act(_) => "act",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum FociEvent {
    Tree {
        nodes: Vec<Proposition>,
    },
    Step {
        node: Proposition,
        /// The belief or relation whose focus was decided.
        subject: Proposition,
        step: FocusStep,
        focus: Option<Vec<Proposition>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum HeuristicEvent {
    NeedsJustification {
        claim: Proposition,
        needed: bool,
    },
    Chains {
        claim: Proposition,
        chains: Vec<Vec<Proposition>>,
    },
    Candidates {
        claim: Proposition,
        size: usize,
        survivors: Vec<Vec<Proposition>>,
    },
    Rule {
        claim: Proposition,
        rule: String,
        kept: Vec<Vec<Proposition>>,
    },
    Chosen {
        claim: Proposition,
        realized: Vec<Proposition>,
    },
    Insufficient {
        claim: Proposition,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum RecipeEvent {
    Evaluate {
        evaluator: String,
        proposer: String,
        root: Proposition,
        depth: usize,
    },
    Invoke {
        recipe: RecipeKind,
        s1: String,
        s2: String,
        node: Proposition,
        goals: Vec<Proposition>,
    },
    ModifyNode {
        s1: String,
        s2: String,
        node: Proposition,
        removed: Vec<Proposition>,
        altered_to: Option<Proposition>,
    },
    InsertCorrection {
        s1: String,
        s2: String,
        root: Option<Proposition>,
        ratified: bool,
    },
    Concede {
        agent: String,
        root: Proposition,
    },
    Withdraw {
        agent: String,
        root: Proposition,
    },
    InfoSharingRequired {
        agent: String,
        root: Proposition,
    },
    SkipRepeat {
        agent: String,
        claim: Proposition,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: usize,
    #[serde(flatten)]
    pub event: Event,
}

/// Collects records with contiguous step numbers from 0.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
}

impl Trace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self, kind: &str) -> usize {
        self.records.iter().filter(|r| r.event.kind() == kind).count()
    }

    /// One JSON object per line, LF-terminated.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("trace records serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, serde_json::Error> {
        let records = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<Result<Vec<TraceRecord>, _>>()?;
        Ok(Trace { records })
    }
}

impl TraceSink for Trace {
    fn emit(&mut self, event: Event) {
        let step = self.records.len();
        self.records.push(TraceRecord { step, event });
    }
}
