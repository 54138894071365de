//! Declarative two-agent scenarios.
//!
//! A scenario is a JSON document:
//!
//! ```json
//! {
//!   "v": 1,
//!   "name": "example",
//!   "agents": [
//!     { "id": "U", "expertise": "non-expert",
//!       "beliefs": [{ "prop": "p", "level": "strong", "source": "kb-record" }],
//!       "userModel": [] },
//!     { "id": "S", "expertise": "expert", "beliefs": [], "userModel": [] }
//!   ],
//!   "proposal": { "prop": "p", "assertedLevel": "strong", "children": [] },
//!   "config": { "tau": 1, "maxDepth": 16 }
//! }
//! ```
//!
//! The first agent makes the proposal. `source` defaults to `kb-record`;
//! a child's `relationLevel` defaults to its `assertedLevel`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::beliefs::{Belief, BeliefSet, Endorsement, Expertise, KnowledgeBase, Proposition, Source, StrengthLevel};
use crate::error::BeliefError;
use crate::evaluation::ProposalNode;
use crate::negotiation::{negotiate, Agent, Config, LevelLabels, Negotiation, NegotiationError};
use crate::trace::TraceSink;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Scenario {
    pub v: u32,
    pub name: String,
    #[serde(default)]
    pub labels: LevelLabels,
    pub agents: Vec<AgentSpec>,
    pub proposal: ProposalSpec,
    #[serde(default)]
    pub config: Config,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct AgentSpec {
    pub id: String,
    pub expertise: Expertise,
    #[serde(default)]
    pub beliefs: Vec<BeliefSpec>,
    #[serde(default)]
    pub user_model: Vec<BeliefSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeliefSpec {
    pub prop: Proposition,
    pub level: StrengthLevel,
    #[serde(default = "kb_record")]
    pub source: Source,
}

fn kb_record() -> Source {
    Source::KbRecord
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ProposalSpec {
    pub prop: Proposition,
    pub asserted_level: StrengthLevel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation_level: Option<StrengthLevel>,
    #[serde(default)]
    pub children: Vec<ProposalSpec>,
}

impl ProposalSpec {
    pub fn to_tree(&self) -> ProposalNode {
        self.children.iter().fold(ProposalNode::leaf(self.prop.clone(), self.asserted_level), |node, c| {
            node.with_child(c.to_tree(), c.relation_level.unwrap_or(c.asserted_level))
        })
    }

    pub fn from_tree(tree: &ProposalNode) -> Self {
        ProposalSpec {
            prop: tree.prop.clone(),
            asserted_level: tree.asserted,
            relation_level: None,
            children: tree
                .children
                .iter()
                .map(|l| ProposalSpec {
                    relation_level: Some(l.relation_level),
                    ..Self::from_tree(&l.node)
                })
                .collect(),
        }
    }
}

/// A problem with a scenario file. Line and column are 1-based; 0 means
/// the position is unknown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ScenarioError {
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lines: Vec<String> = self.diagnostics.iter().map(Diagnostic::to_string).collect();
        f.write_str(&lines.join("\n"))
    }
}

/// Position of the first `"prop": "<prop>"` entry for `prop`, searching from
/// `from`.
fn locate(text: &str, prop: &Proposition, from: usize) -> (usize, usize) {
    let needle = serde_json::to_string(&prop.to_string()).expect("strings serialize");
    let Some(offset) = text[from.min(text.len())..].find(&needle).map(|o| o + from) else {
        return (0, 0);
    };
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let scenario: Scenario = serde_json::from_str(text).map_err(|e| ScenarioError {
        diagnostics: vec![Diagnostic {
            line: e.line(),
            column: e.column(),
            message: match e.classify() {
                serde_json::error::Category::Eof if text.trim().is_empty() => "syntax error: empty document".into(),
                serde_json::error::Category::Syntax | serde_json::error::Category::Eof => format!("syntax error: {e}"),
                _ => format!("schema violation: {e}"),
            },
        }],
    })?;

    let mut diagnostics = Vec::new();
    let mut schema = |message: String| diagnostics.push(Diagnostic { line: 0, column: 0, message });
    if scenario.v != SCHEMA_VERSION {
        schema(format!("unsupported schema version {} (expected {SCHEMA_VERSION})", scenario.v));
    }
    if scenario.agents.len() != 2 {
        schema(format!("a scenario needs exactly two agents, found {}", scenario.agents.len()));
    } else if scenario.agents[0].id == scenario.agents[1].id {
        schema(format!("both agents are called `{}`", scenario.agents[0].id));
    }
    if scenario.config.tau == 0 {
        schema("config.tau must be at least 1".into());
    }
    if let Err(e) = scenario.proposal.to_tree().validate() {
        schema(format!("proposal: {e}"));
    }

    // Agent sections in file order, so contradictions point into the right one.
    let mut cursor = 0;
    for agent in &scenario.agents {
        if let Some(at) = text[cursor..].find(&format!("\"{}\"", agent.id)) {
            cursor += at;
        }
        for (list, name) in [(&agent.beliefs, "beliefs"), (&agent.user_model, "userModel")] {
            if let Err(e) = belief_set(list) {
                let (line, column) = match &e {
                    BeliefError::Contradiction(p) => locate(text, p, cursor),
                    _ => (0, 0),
                };
                diagnostics.push(Diagnostic {
                    line,
                    column,
                    message: format!("agent `{}` {name}: {e}", agent.id),
                });
            }
        }
    }

    if diagnostics.is_empty() {
        Ok(scenario)
    } else {
        Err(ScenarioError { diagnostics })
    }
}

fn belief_set(list: &[BeliefSpec]) -> Result<BeliefSet, BeliefError> {
    BeliefSet::from_beliefs(
        list.iter()
            .map(|b| Belief::new(b.prop.clone(), Endorsement::new(b.level, b.source.clone()))),
    )
}

impl Scenario {
    /// Canonical form: two-space indented JSON with fields in declaration
    /// order, LF-terminated.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenarios serialize");
        s.push('\n');
        s
    }

    pub fn agents(&self) -> Result<[Agent; 2], BeliefError> {
        let build = |a: &AgentSpec| -> Result<Agent, BeliefError> {
            Ok(Agent::new(
                a.id.clone(),
                KnowledgeBase {
                    own: belief_set(&a.beliefs)?,
                    user_model: belief_set(&a.user_model)?,
                    expertise: a.expertise,
                },
            ))
        };
        Ok([build(&self.agents[0])?, build(&self.agents[1])?])
    }

    pub fn proposal_tree(&self) -> ProposalNode {
        self.proposal.to_tree()
    }

    /// Total beliefs across both agents' stores and user models.
    pub fn belief_count(&self) -> usize {
        self.agents.iter().map(|a| a.beliefs.len() + a.user_model.len()).sum()
    }

    /// Runs the scenario under `config` (usually `self.config`, possibly
    /// with overrides applied).
    pub fn run(&self, config: &Config, trace: &mut dyn TraceSink) -> Result<Negotiation, NegotiationError> {
        let [proposer, evaluator] = self.agents()?;
        let mut result = negotiate(&proposer, &evaluator, &self.proposal_tree(), config, trace)?;
        result.transcript.labels = self.labels.clone();
        Ok(result)
    }
}
