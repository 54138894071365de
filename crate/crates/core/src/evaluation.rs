//! Proposed belief trees and their leaf-to-root evaluation.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beliefs::{
    kb_pieces, revise, Belief, BeliefSet, Direction, Endorsement, Evidence, EvidencePiece, Expertise,
    KnowledgeBase, Outcome, Proposition, StrengthLevel, Verdict,
};
use crate::error::BeliefError;
use crate::trace::{Event, ReviseRole, TraceSink};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvaluationError {
    #[error("`{0}` appears as its own ancestor in the proposal")]
    Cycle(Proposition),
    #[error("relation `{found}` does not link `{child}` to `{parent}`")]
    BadLink {
        found: Box<Proposition>,
        child: Box<Proposition>,
        parent: Box<Proposition>,
    },
    #[error(transparent)]
    Belief(#[from] BeliefError),
}

/// Who put a proposal forward.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Speaker {
    pub id: String,
    pub expertise: Expertise,
}

impl Speaker {
    pub fn new(id: impl Into<String>, expertise: Expertise) -> Self {
        Speaker {
            id: id.into(),
            expertise,
        }
    }

    /// The endorsement a hearer gives to a bare claim from this speaker.
    pub fn endorse(&self) -> Endorsement {
        Endorsement::asserted(&self.id, self.expertise)
    }

    pub fn assert(&self, prop: &Proposition) -> Evidence {
        Evidence::Assertion(Belief::new(prop.clone(), self.endorse()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProposalNode {
    pub prop: Proposition,
    /// The proposer's own confidence, as conveyed by the utterance.
    pub asserted: StrengthLevel,
    pub children: Vec<ProposalLink>,
}

/// A child belief offered as evidence for its parent, with the relation
/// `supports(child, parent)` that makes it evidence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProposalLink {
    pub relation: Proposition,
    pub relation_level: StrengthLevel,
    pub node: ProposalNode,
}

impl ProposalNode {
    pub fn leaf(prop: Proposition, asserted: StrengthLevel) -> Self {
        ProposalNode {
            prop,
            asserted,
            children: Vec::new(),
        }
    }

    /// Attaches `child` as support, linking it with a relation believed at
    /// `relation_level`.
    pub fn with_child(mut self, child: ProposalNode, relation_level: StrengthLevel) -> Self {
        let relation = Proposition::supports(child.prop.clone(), self.prop.clone());
        self.children.push(ProposalLink {
            relation,
            relation_level,
            node: child,
        });
        self
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(|c| c.node.size()).sum::<usize>()
    }

    /// Every belief proposition in the tree, pre-order.
    pub fn propositions(&self) -> Vec<Proposition> {
        let mut out = vec![self.prop.clone()];
        for c in &self.children {
            out.extend(c.node.propositions());
        }
        out
    }

    pub fn contains(&self, prop: &Proposition) -> bool {
        self.prop == *prop || self.children.iter().any(|c| c.relation == *prop || c.node.contains(prop))
    }

    /// Checks links and that no proposition (in either polarity) is its own
    /// ancestor.
    pub fn validate(&self) -> Result<(), EvaluationError> {
        fn walk(node: &ProposalNode, path: &mut Vec<Proposition>) -> Result<(), EvaluationError> {
            let key = node.prop.atom_key();
            if path.contains(&key) {
                return Err(EvaluationError::Cycle(node.prop.clone()));
            }
            path.push(key);
            for link in &node.children {
                let expected = Proposition::supports(link.node.prop.clone(), node.prop.clone());
                if link.relation != expected {
                    return Err(EvaluationError::BadLink {
                        found: Box::new(link.relation.clone()),
                        child: Box::new(link.node.prop.clone()),
                        parent: Box::new(node.prop.clone()),
                    });
                }
                walk(&link.node, path)?;
            }
            path.pop();
            Ok(())
        }
        walk(self, &mut Vec::new())
    }
}

/// A proposal node annotated with the evaluator's verdicts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluatedNode {
    pub prop: Proposition,
    pub asserted: StrengthLevel,
    /// Relation to the parent; absent at the root.
    pub relation: Option<Proposition>,
    pub relation_level: Option<StrengthLevel>,
    pub belief_verdict: Verdict,
    pub relation_verdict: Option<Verdict>,
    /// The presented support `belief_verdict` was computed from: the bare
    /// assertion plus accepted child evidence.
    pub support: Vec<Evidence>,
    /// The evaluator's record of the proposer's evidence for this belief.
    pub u_evid: Vec<Evidence>,
    /// The evaluator's own evidence against this belief.
    pub s_attack: Vec<Evidence>,
    /// The evaluator's own evidence against the relation, if there is one.
    pub relation_s_attack: Vec<Evidence>,
    pub children: Vec<EvaluatedNode>,
}

impl EvaluatedNode {
    pub fn belief_accepted(&self) -> bool {
        self.belief_verdict.accepted()
    }

    /// Roots have no relation and count as accepted on that side.
    pub fn relation_accepted(&self) -> bool {
        self.relation_verdict.is_none_or(|v| v.accepted())
    }

    /// Rebuilds the plain proposal tree.
    pub fn proposal(&self) -> ProposalNode {
        ProposalNode {
            prop: self.prop.clone(),
            asserted: self.asserted,
            children: self
                .children
                .iter()
                .map(|c| ProposalLink {
                    relation: c.relation.clone().expect("child has a relation"),
                    relation_level: c.relation_level.unwrap_or(c.asserted),
                    node: c.proposal(),
                })
                .collect(),
        }
    }

    pub fn find(&self, prop: &Proposition) -> Option<&EvaluatedNode> {
        if self.prop == *prop {
            return Some(self);
        }
        self.children.iter().find_map(|c| c.find(prop))
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(EvaluatedNode::size).sum::<usize>()
    }
}

/// Adds what a proposal reveals about the proposer's beliefs to the hearer's
/// model of them: each node at its asserted strength (derived from its
/// children when it has any), and each relation at its level. Beliefs the
/// model already holds are kept; contradicted ones are replaced.
pub fn record_proposal(user_model: &BeliefSet, proposer: &Speaker, tree: &ProposalNode) -> BeliefSet {
    fn walk(model: &mut BeliefSet, proposer: &Speaker, node: &ProposalNode) {
        for link in &node.children {
            walk(model, proposer, &link.node);
            if !model.holds(&link.relation) {
                model.replace(Belief::new(
                    link.relation.clone(),
                    Endorsement::new(link.relation_level, proposer.endorse().source),
                ));
            }
        }
        if model.holds(&node.prop) {
            return;
        }
        let from: BTreeSet<Proposition> = node.children.iter().map(|c| c.node.prop.clone()).collect();
        let endorsement = Endorsement::derived(node.asserted, from)
            .unwrap_or_else(|| Endorsement::new(node.asserted, proposer.endorse().source));
        model.replace(Belief::new(node.prop.clone(), endorsement));
    }
    let mut model = user_model.clone();
    walk(&mut model, proposer, tree);
    model
}

/// The believer's own pieces against `prop`, plus its independent prior on
/// `¬prop` expressed as an assertion by `speaker`.
pub fn evidence_against(beliefs: &BeliefSet, speaker: &Speaker, prop: &Proposition) -> Vec<Evidence> {
    let mut out: Vec<Evidence> = kb_pieces(beliefs, prop)
        .into_iter()
        .filter(|p| p.direction == Direction::Attacks)
        .map(Evidence::Piece)
        .collect();
    let negation = prop.negate();
    if beliefs.get(&negation).is_some_and(|b| !b.endorsement.is_derived()) {
        out.push(speaker.assert(&negation));
    }
    out
}

/// The believer's own pieces for `prop`, plus its independent prior on it.
pub fn evidence_for(beliefs: &BeliefSet, prop: &Proposition) -> Vec<Evidence> {
    let mut out: Vec<Evidence> = kb_pieces(beliefs, prop)
        .into_iter()
        .filter(|p| p.direction == Direction::Supports)
        .map(Evidence::Piece)
        .collect();
    if let Some(b) = beliefs.get(prop).filter(|b| !b.endorsement.is_derived()) {
        out.push(Evidence::Assertion(b.clone()));
    }
    out
}

/// Evaluates `tree` as proposed by `proposer`, leaves first.
///
/// Each belief and each relation gets its own verdict. A child contributes
/// to its parent's support only when both it and its relation were
/// accepted. Relations the evaluator already holds are accepted outright.
pub fn evaluate_proposal(
    evaluator: &KnowledgeBase,
    evaluator_id: &str,
    proposer: &Speaker,
    tree: &ProposalNode,
    tau: u32,
    trace: &mut dyn TraceSink,
) -> Result<EvaluatedNode, EvaluationError> {
    tree.validate()?;
    let ctx = EvalCtx {
        own: &evaluator.own,
        model: record_proposal(&evaluator.user_model, proposer, tree),
        me: Speaker::new(evaluator_id, evaluator.expertise),
        proposer,
        tau,
    };
    ctx.node(tree, None, trace)
}

struct EvalCtx<'a> {
    own: &'a BeliefSet,
    model: BeliefSet,
    me: Speaker,
    proposer: &'a Speaker,
    tau: u32,
}

impl EvalCtx<'_> {
    fn node(
        &self,
        node: &ProposalNode,
        link: Option<&ProposalLink>,
        trace: &mut dyn TraceSink,
    ) -> Result<EvaluatedNode, EvaluationError> {
        let none = BTreeSet::new();
        let mut children = Vec::with_capacity(node.children.len());
        let mut accepted_pieces = Vec::new();
        for child_link in &node.children {
            let child = self.node(&child_link.node, Some(child_link), trace)?;
            if child.belief_accepted() && child.relation_accepted() {
                let belief = self
                    .own
                    .get(&child.prop)
                    .cloned()
                    .unwrap_or_else(|| Belief::new(child.prop.clone(), self.proposer.endorse()));
                let relation = self
                    .own
                    .get(&child_link.relation)
                    .cloned()
                    .unwrap_or_else(|| Belief::new(child_link.relation.clone(), self.proposer.endorse()));
                accepted_pieces.push(Evidence::Piece(EvidencePiece::new(belief, relation, &node.prop)?));
            }
            children.push(child);
        }

        let mut support = vec![self.proposer.assert(&node.prop)];
        support.extend(accepted_pieces);
        let belief_verdict = revise(self.own, &node.prop, &support, &[], &none, self.tau)?;
        trace.emit(Event::Revise {
            target: node.prop.clone(),
            role: ReviseRole::Belief,
            verdict: belief_verdict,
        });

        let relation_verdict = match link {
            None => None,
            Some(l) => {
                let v = match self.own.get(&l.relation) {
                    Some(held) => Verdict {
                        outcome: Outcome::Accept,
                        support_score: held.endorsement.level.rank(),
                        attack_score: 0,
                    },
                    None => revise(self.own, &l.relation, &[self.proposer.assert(&l.relation)], &[], &none, self.tau)?,
                };
                trace.emit(Event::Revise {
                    target: l.relation.clone(),
                    role: if self.own.holds(&l.relation) {
                        ReviseRole::HeldRelation
                    } else {
                        ReviseRole::Relation
                    },
                    verdict: v,
                });
                Some(v)
            }
        };

        Ok(EvaluatedNode {
            prop: node.prop.clone(),
            asserted: node.asserted,
            relation: link.map(|l| l.relation.clone()),
            relation_level: link.map(|l| l.relation_level),
            belief_verdict,
            relation_verdict,
            support,
            u_evid: evidence_for(&self.model, &node.prop),
            s_attack: evidence_against(self.own, &self.me, &node.prop),
            relation_s_attack: link
                .map(|l| evidence_against(self.own, &self.me, &l.relation))
                .unwrap_or_default(),
            children,
        })
    }
}
