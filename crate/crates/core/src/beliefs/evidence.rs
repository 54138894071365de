use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Belief, BeliefSet, Proposition, StrengthLevel};
use crate::error::BeliefError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Supports,
    Attacks,
}

/// A believed proposition together with the believed relation linking it to
/// a target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidencePiece {
    pub belief: Belief,
    pub relation: Belief,
    pub direction: Direction,
}

impl EvidencePiece {
    /// Builds the piece `belief --relation--> target`, working out whether it
    /// supports or attacks `target`.
    pub fn new(belief: Belief, relation: Belief, target: &Proposition) -> Result<Self, BeliefError> {
        let (evidence, claim) = relation
            .prop
            .relation_parts()
            .ok_or_else(|| BeliefError::MalformedRelation(relation.prop.clone()))?;
        if evidence != &belief.prop {
            return Err(BeliefError::MalformedRelation(relation.prop.clone()));
        }
        let direction = if claim == target {
            Direction::Supports
        } else if *claim == target.negate() {
            Direction::Attacks
        } else {
            return Err(BeliefError::EvidenceMismatch {
                relation: relation.prop.clone(),
                target: target.clone(),
            });
        };
        Ok(EvidencePiece {
            belief,
            relation,
            direction,
        })
    }

    /// The proposition the relation points at.
    pub fn claim(&self) -> Option<&Proposition> {
        self.relation.prop.relation_parts().map(|(_, c)| c)
    }

    fn key(&self) -> (Proposition, Proposition) {
        (self.belief.prop.clone(), self.relation.prop.clone())
    }
}

/// Weakest link: a piece is as strong as the weaker of its belief and its
/// relation.
pub fn piece_strength(piece: &EvidencePiece) -> Result<StrengthLevel, BeliefError> {
    match piece.relation.prop.relation_parts() {
        Some((e, _)) if e == &piece.belief.prop => {
            Ok(piece.belief.endorsement.level.min(piece.relation.endorsement.level))
        }
        _ => Err(BeliefError::MalformedRelation(piece.relation.prop.clone())),
    }
}

/// Anything that can be weighed for or against a target: a relation-backed
/// piece, or a bare assertion of the target (or its negation).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Evidence {
    Piece(EvidencePiece),
    Assertion(Belief),
}

impl Evidence {
    pub fn strength(&self) -> Result<StrengthLevel, BeliefError> {
        match self {
            Evidence::Piece(p) => piece_strength(p),
            Evidence::Assertion(b) => Ok(b.endorsement.level),
        }
    }

    pub fn direction(&self, target: &Proposition) -> Option<Direction> {
        let about = match self {
            Evidence::Piece(p) => p.claim()?,
            Evidence::Assertion(b) => &b.prop,
        };
        if about == target {
            Some(Direction::Supports)
        } else if *about == target.negate() {
            Some(Direction::Attacks)
        } else {
            None
        }
    }

    /// The belief being offered (the piece's antecedent, or the asserted
    /// claim itself).
    pub fn belief(&self) -> &Belief {
        match self {
            Evidence::Piece(p) => &p.belief,
            Evidence::Assertion(b) => b,
        }
    }
}

/// Splits evidence into what supports and what attacks `target`, dropping
/// anything about other propositions.
pub fn partition_evidence(target: &Proposition, evidence: &[Evidence]) -> (Vec<Evidence>, Vec<Evidence>) {
    let mut support = Vec::new();
    let mut attack = Vec::new();
    for e in evidence {
        match e.direction(target) {
            Some(Direction::Supports) => support.push(e.clone()),
            Some(Direction::Attacks) => attack.push(e.clone()),
            None => {}
        }
    }
    (support, attack)
}

/// Pieces in `beliefs` whose relation points at `target` or its negation and
/// whose antecedent is itself held.
pub fn kb_pieces(beliefs: &BeliefSet, target: &Proposition) -> Vec<EvidencePiece> {
    let negated = target.negate();
    beliefs
        .relations()
        .filter_map(|rel| {
            let (evidence, claim) = rel.prop.relation_parts()?;
            if claim != target && *claim != negated {
                return None;
            }
            let belief = beliefs.get(evidence)?;
            EvidencePiece::new(belief.clone(), rel.clone(), target).ok()
        })
        .collect()
}

/// The agent's own pieces about `target`, unioned with proposed pieces it has
/// already accepted. Duplicates keep the stronger copy.
pub fn build_evidence_set(
    beliefs: &BeliefSet,
    target: &Proposition,
    proposed_accepted: &[EvidencePiece],
) -> Vec<EvidencePiece> {
    let mut by_key: BTreeMap<(Proposition, Proposition), EvidencePiece> = BTreeMap::new();
    let relevant = proposed_accepted
        .iter()
        .filter(|p| Evidence::Piece((*p).clone()).direction(target).is_some())
        .cloned();
    for piece in kb_pieces(beliefs, target).into_iter().chain(relevant) {
        let strength = piece_strength(&piece).ok();
        match by_key.get(&piece.key()) {
            Some(existing) if piece_strength(existing).ok() >= strength => {}
            _ => {
                by_key.insert(piece.key(), piece);
            }
        }
    }
    by_key.into_values().collect()
}
