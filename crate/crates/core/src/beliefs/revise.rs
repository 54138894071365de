//! The simplified endorsement comparator: sum the ranks on each side and
//! compare the gap against a threshold.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::evidence::{build_evidence_set, Direction, Evidence, EvidencePiece};
use super::{Belief, BeliefSet, Endorsement, Proposition, Source, StrengthLevel};
use crate::error::BeliefError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Accept,
    Reject,
    Abandon,
    Uncertain,
}

impl Outcome {
    /// The hearer gives up the target: rejects it outright or drops it for
    /// lack of support.
    pub fn is_flip(self) -> bool {
        matches!(self, Outcome::Reject | Outcome::Abandon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub support_score: u32,
    pub attack_score: u32,
}

impl Verdict {
    /// Pure decision rule over the two scores.
    pub fn decide(support_score: u32, attack_score: u32, tau: u32, derivation_refuted: bool) -> Self {
        let outcome = if support_score >= attack_score + tau {
            Outcome::Accept
        } else if attack_score >= support_score + tau {
            Outcome::Reject
        } else if derivation_refuted {
            Outcome::Abandon
        } else {
            Outcome::Uncertain
        };
        Verdict {
            outcome,
            support_score,
            attack_score,
        }
    }

    pub fn accepted(&self) -> bool {
        self.outcome == Outcome::Accept
    }
}

fn check_tau(tau: u32) -> Result<(), BeliefError> {
    if tau == 0 {
        Err(BeliefError::InvalidThreshold(tau))
    } else {
        Ok(())
    }
}

fn check_side(target: &Proposition, side: &[Evidence], want: Direction) -> Result<(), BeliefError> {
    for e in side {
        if e.direction(target) != Some(want) {
            let relation = match e {
                Evidence::Piece(p) => p.relation.prop.clone(),
                Evidence::Assertion(b) => b.prop.clone(),
            };
            return Err(BeliefError::EvidenceMismatch {
                relation,
                target: target.clone(),
            });
        }
    }
    Ok(())
}

/// Weighs everything for and against `target` from the point of view of
/// `beliefs`.
///
/// Scores are the rank sums of the agent's own pieces, the presented
/// evidence, and an independently held prior on either side (a derived
/// prior is already represented by the pieces it was derived from). If
/// neither side clears `tau` and the agent's belief in `target` was derived
/// purely from propositions in `refuted`, the verdict is `Abandon`.
pub fn revise(
    beliefs: &BeliefSet,
    target: &Proposition,
    support: &[Evidence],
    attack: &[Evidence],
    refuted: &BTreeSet<Proposition>,
    tau: u32,
) -> Result<Verdict, BeliefError> {
    check_tau(tau)?;
    check_side(target, support, Direction::Supports)?;
    check_side(target, attack, Direction::Attacks)?;

    let presented_pieces: Vec<EvidencePiece> = support
        .iter()
        .chain(attack)
        .filter_map(|e| match e {
            Evidence::Piece(p) => Some(p.clone()),
            Evidence::Assertion(_) => None,
        })
        .collect();

    let mut support_score = 0;
    let mut attack_score = 0;
    for piece in build_evidence_set(beliefs, target, &presented_pieces) {
        let rank = super::piece_strength(&piece)?.rank();
        match piece.direction {
            Direction::Supports => support_score += rank,
            Direction::Attacks => attack_score += rank,
        }
    }
    for e in support.iter().chain(attack) {
        if let Evidence::Assertion(b) = e {
            if b.prop == *target {
                support_score += b.endorsement.level.rank();
            } else {
                attack_score += b.endorsement.level.rank();
            }
        }
    }

    let independent = |b: &Belief| !b.endorsement.is_derived();
    if let Some(prior) = beliefs.get(target).filter(|b| independent(b)) {
        support_score += prior.endorsement.level.rank();
    }
    if let Some(prior) = beliefs.get(&target.negate()).filter(|b| independent(b)) {
        attack_score += prior.endorsement.level.rank();
    }

    let derivation_refuted = beliefs
        .get(target)
        .and_then(|b| b.endorsement.derivation())
        .is_some_and(|from| from.is_subset(refuted));

    Ok(Verdict::decide(support_score, attack_score, tau, derivation_refuted))
}

/// Folds a decided verdict back into a belief set, returning the new set.
///
/// Accepting adopts `target` (dropping its negation) at the strongest level
/// among the supporting evidence; rejecting keeps or adopts the negation;
/// abandoning removes `target` and adds nothing. Derived beliefs left without
/// support are pruned afterwards.
pub fn assimilate(
    beliefs: &BeliefSet,
    verdict: &Verdict,
    target: &Proposition,
    evidence: &[Evidence],
) -> Result<BeliefSet, BeliefError> {
    let mut next = beliefs.clone();
    match verdict.outcome {
        Outcome::Uncertain => return Err(BeliefError::UndecidedVerdict(target.clone())),
        Outcome::Accept => {
            let adopted = adopt(beliefs, target, evidence, Direction::Supports, verdict.support_score)?;
            merge(&mut next, adopted);
        }
        Outcome::Reject => {
            next.remove(target);
            if let Some(adopted) = adopt_if_evidence(beliefs, &target.negate(), target, evidence)? {
                merge(&mut next, adopted);
            }
        }
        Outcome::Abandon => {
            next.remove(target);
        }
    }
    next.prune_unsupported();
    Ok(next)
}

fn merge(set: &mut BeliefSet, adopted: Belief) {
    match set.get(&adopted.prop) {
        Some(existing) if existing.endorsement.level >= adopted.endorsement.level => {}
        _ => set.replace(adopted),
    }
}

fn adopt_if_evidence(
    held: &BeliefSet,
    negation: &Proposition,
    target: &Proposition,
    evidence: &[Evidence],
) -> Result<Option<Belief>, BeliefError> {
    if !evidence.iter().any(|e| e.direction(target) == Some(Direction::Attacks)) {
        return Ok(None);
    }
    adopt_with(held, negation, target, evidence, Direction::Attacks, 0).map(Some)
}

fn adopt(
    held: &BeliefSet,
    target: &Proposition,
    evidence: &[Evidence],
    side: Direction,
    fallback_score: u32,
) -> Result<Belief, BeliefError> {
    adopt_with(held, target, target, evidence, side, fallback_score)
}

/// The adopted belief is derived from whichever presented pieces `held`
/// contains, so it can later be pruned with them.
fn adopt_with(
    held: &BeliefSet,
    adopted: &Proposition,
    target: &Proposition,
    evidence: &[Evidence],
    side: Direction,
    fallback_score: u32,
) -> Result<Belief, BeliefError> {
    let mut level: Option<StrengthLevel> = None;
    let mut from = BTreeSet::new();
    let mut assertion_source: Option<Source> = None;
    for e in evidence.iter().filter(|e| e.direction(target) == Some(side)) {
        let s = e.strength()?;
        level = Some(level.map_or(s, |l| l.max(s)));
        match e {
            Evidence::Piece(p) if held.holds(&p.belief.prop) => {
                from.insert(p.belief.prop.clone());
            }
            Evidence::Piece(_) => {}
            Evidence::Assertion(b) => {
                assertion_source.get_or_insert_with(|| b.endorsement.source.clone());
            }
        }
    }
    let level = level
        .or_else(|| StrengthLevel::from_score(fallback_score))
        .unwrap_or(StrengthLevel::Weak);
    let endorsement = match Endorsement::derived(level, from) {
        Some(e) => e,
        None => Endorsement::new(level, assertion_source.unwrap_or(Source::KbRecord)),
    };
    Ok(Belief::new(adopted.clone(), endorsement))
}
