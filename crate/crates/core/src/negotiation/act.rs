use serde::{Deserialize, Serialize};

use crate::beliefs::Proposition;
use crate::evaluation::ProposalNode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActKind {
    Propose,
    Inform,
    Accept,
    InfoShareRequest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DialogueLevel {
    Discourse,
    Belief,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActContent {
    Prop(Proposition),
    Proposal(ProposalNode),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscourseAct {
    pub kind: ActKind,
    pub speaker: String,
    pub content: ActContent,
    pub level: DialogueLevel,
    /// For informs: the propositions said in support of this one.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub evidence: Vec<Proposition>,
}

impl DiscourseAct {
    pub fn propose(speaker: &str, tree: &ProposalNode) -> Self {
        DiscourseAct {
            kind: ActKind::Propose,
            speaker: speaker.to_string(),
            content: ActContent::Proposal(tree.clone()),
            level: DialogueLevel::Belief,
            evidence: Vec::new(),
        }
    }

    pub fn inform(speaker: &str, prop: &Proposition, evidence: Vec<Proposition>) -> Self {
        DiscourseAct {
            kind: ActKind::Inform,
            speaker: speaker.to_string(),
            content: ActContent::Prop(prop.clone()),
            level: DialogueLevel::Belief,
            evidence,
        }
    }

    pub fn accept(speaker: &str, prop: &Proposition) -> Self {
        DiscourseAct {
            kind: ActKind::Accept,
            speaker: speaker.to_string(),
            content: ActContent::Prop(prop.clone()),
            level: DialogueLevel::Belief,
            evidence: Vec::new(),
        }
    }

    pub fn info_share_request(speaker: &str, prop: &Proposition) -> Self {
        DiscourseAct {
            kind: ActKind::InfoShareRequest,
            speaker: speaker.to_string(),
            content: ActContent::Prop(prop.clone()),
            level: DialogueLevel::Discourse,
            evidence: Vec::new(),
        }
    }

    /// The proposition the act is about (the root, for proposals).
    pub fn subject(&self) -> &Proposition {
        match &self.content {
            ActContent::Prop(p) => p,
            ActContent::Proposal(t) => &t.prop,
        }
    }
}

fn render_tree(node: &ProposalNode) -> String {
    if node.children.is_empty() {
        return node.prop.to_string();
    }
    let kids: Vec<String> = node.children.iter().map(|c| render_tree(&c.node)).collect();
    format!("{} <- [{}]", node.prop, kids.join(", "))
}

/// One line per act, e.g. `S: INFORM ¬on_sabbatical(smith, next_year)`.
pub fn realize(acts: &[DiscourseAct]) -> Vec<String> {
    acts.iter()
        .map(|a| {
            let verb = match a.kind {
                ActKind::Propose => "PROPOSE",
                ActKind::Inform => "INFORM",
                ActKind::Accept => "ACCEPT",
                ActKind::InfoShareRequest => "REQUEST-INFO",
            };
            let body = match &a.content {
                ActContent::Prop(p) => p.to_string(),
                ActContent::Proposal(t) => render_tree(t),
            };
            format!("{}: {} {}", a.speaker, verb, body)
        })
        .collect()
}
