//! Picking evidence to present with a claim.
//!
//! Justification chains are built from the persuader's own beliefs, then
//! filtered to the smallest combinations predicted to convince the hearer,
//! then ranked by confidence, novelty to the hearer, and size, in that order.

use std::collections::BTreeSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beliefs::{kb_pieces, Belief, BeliefSet, Direction, Endorsement, Evidence, EvidencePiece, Outcome, Proposition, StrengthLevel};
use crate::error::BeliefError;
use crate::evaluation::{ProposalNode, Speaker};
use crate::focus::predict;
use crate::trace::{Event, HeuristicEvent, TraceSink};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JustificationError {
    #[error("no chains to choose from for `{0}`")]
    NoChains(Proposition),
    #[error("no combination of evidence is predicted to convince the hearer of `{0}`")]
    NoSufficientJustification(Proposition),
    #[error(transparent)]
    Belief(#[from] BeliefError),
}

/// One piece of evidence for a claim, with whatever further support the
/// hearer needs before accepting that evidence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLink {
    pub belief: Belief,
    pub relation: Belief,
    pub support: Vec<ChainLink>,
}

impl ChainLink {
    /// Weakest level anywhere in this link and below.
    pub fn confidence(&self) -> StrengthLevel {
        self.support
            .iter()
            .map(ChainLink::confidence)
            .fold(self.belief.endorsement.level.min(self.relation.endorsement.level), StrengthLevel::min)
    }

    fn collect_beliefs(&self, out: &mut Vec<Proposition>) {
        out.push(self.belief.prop.clone());
        for s in &self.support {
            s.collect_beliefs(out);
        }
    }

    fn to_node(&self) -> ProposalNode {
        self.support.iter().fold(
            ProposalNode::leaf(self.belief.prop.clone(), self.belief.endorsement.level),
            |node, s| node.with_child(s.to_node(), s.relation.endorsement.level),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JustificationChain {
    pub claim: Proposition,
    pub link: ChainLink,
}

impl JustificationChain {
    pub fn confidence(&self) -> StrengthLevel {
        self.link.confidence()
    }

    /// Beliefs in the chain, excluding the claim, pre-order.
    pub fn beliefs(&self) -> Vec<Proposition> {
        let mut out = Vec::new();
        self.link.collect_beliefs(&mut out);
        out
    }

    /// The chain as a single piece of evidence for the claim. The belief is
    /// capped at the weakest level of its own support.
    pub fn as_evidence(&self) -> Result<Evidence, BeliefError> {
        let mut belief = self.link.belief.clone();
        belief.endorsement.level = self
            .link
            .support
            .iter()
            .map(ChainLink::confidence)
            .fold(belief.endorsement.level, StrengthLevel::min);
        Ok(Evidence::Piece(EvidencePiece::new(belief, self.link.relation.clone(), &self.claim)?))
    }

    fn top(&self) -> &Proposition {
        &self.link.belief.prop
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JustificationChoice {
    pub claim: Proposition,
    pub chains: Vec<JustificationChain>,
    /// What actually gets said, in order: the claim, then each chain's
    /// beliefs, skipping any the hearer already holds. Relations are not
    /// said separately; they travel as the evidence attached to an inform.
    pub realized: Vec<Proposition>,
}

impl JustificationChoice {
    /// A bare claim with nothing attached.
    pub fn bare(claim: Proposition) -> Self {
        JustificationChoice {
            realized: vec![claim.clone()],
            claim,
            chains: Vec::new(),
        }
    }

    /// The claim and its chosen evidence as a proposal tree.
    pub fn to_proposal(&self, claim_level: StrengthLevel) -> ProposalNode {
        self.chains.iter().fold(ProposalNode::leaf(self.claim.clone(), claim_level), |node, c| {
            node.with_child(c.link.to_node(), c.link.relation.endorsement.level)
        })
    }

    pub fn evidence(&self) -> Result<Vec<Evidence>, BeliefError> {
        self.chains.iter().map(JustificationChain::as_evidence).collect()
    }
}

/// Whether telling the hearer `claim` on `speaker`'s word alone would fail to
/// convince them.
pub fn needs_justification(
    user_model: &BeliefSet,
    claim: &Proposition,
    speaker: &Speaker,
    tau: u32,
    trace: &mut dyn TraceSink,
) -> Result<bool, BeliefError> {
    let verdict = predict(user_model, claim, &[speaker.assert(claim)], &BTreeSet::new(), tau, trace)?;
    let needed = verdict.outcome != Outcome::Accept;
    trace.emit(Event::Heuristic(HeuristicEvent::NeedsJustification {
        claim: claim.clone(),
        needed,
    }));
    Ok(needed)
}

/// Every way the persuader can support `claim` from its own beliefs, each
/// ending in evidence the hearer is predicted to take on the speaker's word.
pub fn build_justification_chains(
    own: &BeliefSet,
    user_model: &BeliefSet,
    claim: &Proposition,
    speaker: &Speaker,
    tau: u32,
    trace: &mut dyn TraceSink,
) -> Result<Vec<JustificationChain>, BeliefError> {
    let mut path = vec![claim.atom_key()];
    let chains = chains_for(own, user_model, claim, speaker, tau, &mut path, trace)?;
    trace.emit(Event::Heuristic(HeuristicEvent::Chains {
        claim: claim.clone(),
        chains: chains.iter().map(JustificationChain::beliefs).collect(),
    }));
    Ok(chains)
}

fn chains_for(
    own: &BeliefSet,
    user_model: &BeliefSet,
    claim: &Proposition,
    speaker: &Speaker,
    tau: u32,
    path: &mut Vec<Proposition>,
    trace: &mut dyn TraceSink,
) -> Result<Vec<JustificationChain>, BeliefError> {
    let mut out = Vec::new();
    for piece in kb_pieces(own, claim) {
        if piece.direction != Direction::Supports || path.contains(&piece.belief.prop.atom_key()) {
            continue;
        }
        let evidence = piece.belief.prop.clone();
        let support = if needs_justification(user_model, &evidence, speaker, tau, trace)? {
            path.push(evidence.atom_key());
            let sub = chains_for(own, user_model, &evidence, speaker, tau, path, trace)?;
            path.pop();
            if sub.is_empty() {
                continue;
            }
            match select_justification(&sub, user_model, &evidence, speaker, tau, trace) {
                Ok(choice) => choice.chains.into_iter().map(|c| c.link).collect(),
                Err(JustificationError::Belief(e)) => return Err(e),
                Err(_) => continue,
            }
        } else {
            Vec::new()
        };
        out.push(JustificationChain {
            claim: claim.clone(),
            link: ChainLink {
                belief: piece.belief,
                relation: piece.relation,
                support,
            },
        });
    }
    Ok(out)
}

struct Scored<'a> {
    chains: Vec<&'a JustificationChain>,
    confidence: StrengthLevel,
    novelty: usize,
    size: usize,
}

impl Scored<'_> {
    fn tops(&self) -> Vec<&Proposition> {
        self.chains.iter().map(|c| c.top()).collect()
    }
}

fn redundant(set: &[&JustificationChain]) -> bool {
    let beliefs: Vec<BTreeSet<Proposition>> = set.iter().map(|c| c.beliefs().into_iter().collect()).collect();
    beliefs
        .iter()
        .enumerate()
        .any(|(i, a)| beliefs.iter().enumerate().any(|(j, b)| i != j && b.is_subset(a) && b != a))
}

/// Chooses among `chains`: the smallest combinations predicted (with the
/// bare claim) to convince the hearer survive, then the most confident, then
/// the most novel to the hearer, then the fewest beliefs.
pub fn select_justification(
    chains: &[JustificationChain],
    user_model: &BeliefSet,
    claim: &Proposition,
    speaker: &Speaker,
    tau: u32,
    trace: &mut dyn TraceSink,
) -> Result<JustificationChoice, JustificationError> {
    if chains.is_empty() {
        return Err(JustificationError::NoChains(claim.clone()));
    }
    let ordered: Vec<&JustificationChain> = chains.iter().sorted_by(|a, b| a.top().cmp(b.top())).collect();
    for k in 1..=ordered.len() {
        let mut survivors = Vec::new();
        for set in ordered.iter().copied().combinations(k) {
            if redundant(&set) {
                continue;
            }
            let mut hyp = vec![speaker.assert(claim)];
            for c in &set {
                hyp.push(c.as_evidence()?);
            }
            let verdict = predict(user_model, claim, &hyp, &BTreeSet::new(), tau, trace)?;
            if verdict.outcome == Outcome::Accept {
                let mut beliefs = BTreeSet::new();
                for c in &set {
                    beliefs.extend(c.beliefs());
                }
                survivors.push(Scored {
                    confidence: set.iter().map(|c| c.confidence()).min().expect("k >= 1"),
                    novelty: beliefs.iter().filter(|b| !user_model.mentions(b)).count(),
                    size: beliefs.len(),
                    chains: set,
                });
            }
        }
        trace.emit(Event::Heuristic(HeuristicEvent::Candidates {
            claim: claim.clone(),
            size: k,
            survivors: survivors.iter().map(|s| s.tops().into_iter().cloned().collect()).collect(),
        }));
        if survivors.is_empty() {
            continue;
        }

        let best_conf = survivors.iter().map(|s| s.confidence).max().expect("nonempty");
        survivors.retain(|s| s.confidence == best_conf);
        emit_rule(trace, claim, "confidence", &survivors);
        let best_novelty = survivors.iter().map(|s| s.novelty).max().expect("nonempty");
        survivors.retain(|s| s.novelty == best_novelty);
        emit_rule(trace, claim, "novelty", &survivors);
        let best_size = survivors.iter().map(|s| s.size).min().expect("nonempty");
        survivors.retain(|s| s.size == best_size);
        emit_rule(trace, claim, "size", &survivors);
        let chosen = survivors
            .into_iter()
            .min_by(|a, b| a.tops().cmp(&b.tops()))
            .expect("nonempty");

        let chains: Vec<JustificationChain> = chosen.chains.into_iter().cloned().collect();
        let realized = realize_choice(claim, &chains, user_model);
        trace.emit(Event::Heuristic(HeuristicEvent::Chosen {
            claim: claim.clone(),
            realized: realized.clone(),
        }));
        return Ok(JustificationChoice {
            claim: claim.clone(),
            chains,
            realized,
        });
    }
    Err(JustificationError::NoSufficientJustification(claim.clone()))
}

fn emit_rule(trace: &mut dyn TraceSink, claim: &Proposition, rule: &str, kept: &[Scored<'_>]) {
    trace.emit(Event::Heuristic(HeuristicEvent::Rule {
        claim: claim.clone(),
        rule: rule.to_string(),
        kept: kept.iter().map(|s| s.tops().into_iter().cloned().collect()).collect(),
    }));
}

fn realize_choice(claim: &Proposition, chains: &[JustificationChain], hearer: &BeliefSet) -> Vec<Proposition> {
    fn walk(link: &ChainLink, hearer: &BeliefSet, out: &mut Vec<Proposition>) {
        if !hearer.holds(&link.belief.prop) {
            out.push(link.belief.prop.clone());
        }
        for s in &link.support {
            walk(s, hearer, out);
        }
    }
    let mut out = vec![claim.clone()];
    for c in chains {
        walk(&c.link, hearer, &mut out);
    }
    out.into_iter().unique().collect()
}

/// Everything the persuader would say for `claim`: the bare claim if that is
/// predicted to suffice, otherwise the selected chains. When no combination
/// is predicted to suffice, all available chains are offered.
pub fn justify(
    own: &BeliefSet,
    user_model: &BeliefSet,
    claim: &Proposition,
    speaker: &Speaker,
    tau: u32,
    trace: &mut dyn TraceSink,
) -> Result<JustificationChoice, BeliefError> {
    if !needs_justification(user_model, claim, speaker, tau, trace)? {
        return Ok(JustificationChoice::bare(claim.clone()));
    }
    let chains = build_justification_chains(own, user_model, claim, speaker, tau, trace)?;
    if chains.is_empty() {
        return Ok(JustificationChoice::bare(claim.clone()));
    }
    match select_justification(&chains, user_model, claim, speaker, tau, trace) {
        Ok(choice) => Ok(choice),
        Err(JustificationError::Belief(e)) => Err(e),
        Err(_) => {
            trace.emit(Event::Heuristic(HeuristicEvent::Insufficient { claim: claim.clone() }));
            let realized = realize_choice(claim, &chains, user_model);
            Ok(JustificationChoice {
                claim: claim.clone(),
                chains,
                realized,
            })
        }
    }
}

/// The level the speaker conveys a claim at: its own belief if it has one,
/// else its expertise.
pub fn claim_level(own: &BeliefSet, claim: &Proposition, speaker: &Speaker) -> StrengthLevel {
    own.get(claim)
        .map(|b| b.endorsement.level)
        .unwrap_or_else(|| Endorsement::asserted(&speaker.id, speaker.expertise).level)
}
