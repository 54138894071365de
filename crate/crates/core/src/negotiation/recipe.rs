//! Modify-Proposal and its Correct-Node / Correct-Relation specializations,
//! and the Modify-Node body (Remove-Node, Alter-Node).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::NegotiationError;
use crate::beliefs::{BeliefSet, Proposition};
use crate::evaluation::{EvaluatedNode, ProposalNode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecipeKind {
    CorrectNode,
    CorrectRelation,
    ModifyNode,
    RemoveNode,
    AlterNode,
    InsertCorrection,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecipeInstance {
    pub kind: RecipeKind,
    /// The agent doing the correcting.
    pub s1: String,
    /// The agent whose proposal is being corrected.
    pub s2: String,
    pub proposed: ProposalNode,
    pub node: Proposition,
    /// Mutual beliefs posted to satisfy Modify-Node's precondition, one per
    /// focus member, deepest first.
    pub goals: Vec<Proposition>,
}

/// Focus members in the order they appear bottom-up in the proposal.
fn post_order(tree: &EvaluatedNode, focus: &BTreeSet<Proposition>, out: &mut Vec<Proposition>) {
    for c in &tree.children {
        post_order(c, focus, out);
        if let Some(r) = &c.relation {
            if focus.contains(r) && !out.contains(r) {
                out.push(r.clone());
            }
        }
    }
    if focus.contains(&tree.prop) && !out.contains(&tree.prop) {
        out.push(tree.prop.clone());
    }
}

/// Picks the Modify-Proposal specialization for a focus and posts the
/// negation of each focus member as a mutual belief to be achieved.
pub fn modify_proposal(
    evaluated: &EvaluatedNode,
    focus: &BTreeSet<Proposition>,
    s1: &str,
    s2: &str,
) -> Result<RecipeInstance, NegotiationError> {
    if evaluated.belief_accepted() {
        return Err(NegotiationError::Contract(format!(
            "`{}` was accepted; nothing to modify",
            evaluated.prop
        )));
    }
    let mut members = Vec::new();
    post_order(evaluated, focus, &mut members);
    if members.is_empty() || members.len() != focus.len() {
        return Err(NegotiationError::Contract(
            "focus must be a nonempty set of propositions from the proposal".into(),
        ));
    }
    // Applicability: the corrector must not have accepted what it corrects.
    for m in &members {
        if accepted_in(evaluated, m) {
            return Err(NegotiationError::Contract(format!("`{m}` was accepted by {s1}")));
        }
    }
    let kind = if members.iter().all(Proposition::is_relation) {
        RecipeKind::CorrectRelation
    } else {
        RecipeKind::CorrectNode
    };
    Ok(RecipeInstance {
        kind,
        s1: s1.to_string(),
        s2: s2.to_string(),
        proposed: evaluated.proposal(),
        node: members[0].clone(),
        goals: members.iter().map(Proposition::negate).collect(),
    })
}

fn accepted_in(tree: &EvaluatedNode, prop: &Proposition) -> bool {
    if tree.prop == *prop {
        return tree.belief_accepted();
    }
    tree.children.iter().any(|c| {
        (c.relation.as_ref() == Some(prop) && c.relation_accepted()) || accepted_in(c, prop)
    })
}

/// What Modify-Node did to a proposal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Modification {
    /// The corrected proposal; `None` when nothing is left of it.
    pub tree: Option<ProposalNode>,
    pub removed: Vec<Proposition>,
    /// Set when the root was removed and replaced by its negation.
    pub altered_to: Option<Proposition>,
}

/// Modify-Node: removes `node` (a belief, or the relation attaching some
/// evidence) from `proposal`, then drops every ancestor left with no support
/// that the proposer no longer holds. If the root goes and the corrector
/// holds its negation, the negation takes its place.
///
/// Only runs once the proposer believes `¬node`.
pub fn apply_modify_node(
    proposal: &ProposalNode,
    node: &Proposition,
    corrector: &BeliefSet,
    proposer: &BeliefSet,
) -> Result<Modification, NegotiationError> {
    if !proposer.holds(&node.negate()) {
        return Err(NegotiationError::PreconditionUnmet(node.clone()));
    }
    if !proposal.contains(node) {
        return Err(NegotiationError::Contract(format!("`{node}` is not part of the proposal")));
    }
    let mut removed = Vec::new();
    let tree = remove(proposal, node, proposer, &mut removed);
    let mut altered_to = None;
    let tree = match tree {
        Some(t) => Some(t),
        None => {
            let negation = proposal.prop.negate();
            corrector.get(&negation).map(|b| {
                altered_to = Some(negation.clone());
                ProposalNode::leaf(negation, b.endorsement.level)
            })
        }
    };
    Ok(Modification {
        tree,
        removed,
        altered_to,
    })
}

fn remove(
    node: &ProposalNode,
    target: &Proposition,
    proposer: &BeliefSet,
    removed: &mut Vec<Proposition>,
) -> Option<ProposalNode> {
    if node.prop == *target {
        removed.extend(node.propositions());
        return None;
    }
    let mut children = Vec::new();
    let mut changed = false;
    for link in &node.children {
        if link.relation == *target {
            removed.push(link.relation.clone());
            removed.extend(link.node.propositions());
            changed = true;
            continue;
        }
        match remove(&link.node, target, proposer, removed) {
            Some(n) => {
                changed |= n != link.node;
                let mut l = link.clone();
                l.node = n;
                children.push(l);
            }
            None => changed = true,
        }
    }
    if changed && children.is_empty() && !proposer.holds(&node.prop) {
        removed.push(node.prop.clone());
        return None;
    }
    Some(ProposalNode {
        prop: node.prop.clone(),
        asserted: node.asserted,
        children,
    })
}
