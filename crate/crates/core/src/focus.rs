//! Choosing what to attack in a rejected proposal.
//!
//! The candidate foci tree keeps only the parts of an evaluated proposal that
//! the evaluator did not accept. [`select_focus_modification`] then walks it
//! bottom-up and annotates each belief with the smallest set of beliefs whose
//! refutation is predicted to make the proposer give it up, preferring to
//! attack unaccepted evidence over the belief itself.

use std::collections::BTreeSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beliefs::{partition_evidence, revise, BeliefSet, Evidence, Proposition, Verdict};
use crate::error::BeliefError;
use crate::evaluation::EvaluatedNode;
use crate::trace::{Event, FociEvent, TraceSink};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FocusError {
    #[error("`{0}` was accepted; there is nothing to modify")]
    AcceptedRoot(Proposition),
    #[error("refuting every candidate does not change the verdict on `{0}`")]
    NoFlip(Proposition),
    #[error(transparent)]
    Belief(#[from] BeliefError),
}

/// Which branch of the selection decided a node's focus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FocusStep {
    /// Leaf: the evaluator's counter-evidence is enough (or not).
    Leaf,
    /// Refuting unaccepted evidence suffices.
    Evidence,
    /// Attacking the belief directly suffices.
    Belief,
    /// Only attacking both the belief and its evidence suffices.
    Both,
    /// Nothing the evaluator has is predicted to work.
    Nil,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FociNode {
    /// The evaluated node, without its children (those live in `children`).
    pub evaluated: EvaluatedNode,
    pub children: Vec<FociNode>,
    /// `None` means no modification of this belief is predicted to succeed.
    pub focus: Option<BTreeSet<Proposition>>,
    /// Same, for the relation linking this node to its parent.
    pub relation_focus: Option<BTreeSet<Proposition>>,
    pub cand_set: BTreeSet<Proposition>,
    pub step: Option<FocusStep>,
}

impl FociNode {
    pub fn prop(&self) -> &Proposition {
        &self.evaluated.prop
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(FociNode::size).sum::<usize>()
    }

    /// Pre-order propositions, for comparing tree shapes.
    pub fn propositions(&self) -> Vec<Proposition> {
        let mut out = vec![self.prop().clone()];
        for c in &self.children {
            out.extend(c.propositions());
        }
        out
    }

    pub fn find(&self, prop: &Proposition) -> Option<&FociNode> {
        if self.prop() == prop {
            return Some(self);
        }
        self.children.iter().find_map(|c| c.find(prop))
    }
}

/// Depth-first copy of the unaccepted part of an evaluated proposal.
///
/// A child is kept when its belief or its relation was not accepted; its own
/// children are explored only when the child belief itself was not accepted.
pub fn candidate_foci_tree(root: &EvaluatedNode) -> Result<FociNode, FocusError> {
    if root.belief_accepted() {
        return Err(FocusError::AcceptedRoot(root.prop.clone()));
    }
    Ok(copy_unaccepted(root))
}

fn copy_unaccepted(node: &EvaluatedNode) -> FociNode {
    let children = if node.belief_accepted() {
        Vec::new()
    } else {
        node.children
            .iter()
            .filter(|c| !(c.belief_accepted() && c.relation_accepted()))
            .map(copy_unaccepted)
            .collect()
    };
    let mut evaluated = node.clone();
    evaluated.children.clear();
    FociNode {
        evaluated,
        children,
        focus: None,
        relation_focus: None,
        cand_set: BTreeSet::new(),
        step: None,
    }
}

/// Predicts how the other agent (modelled by `user_model`) would judge
/// `target` if shown `hypothesized` and if it stopped believing everything in
/// `removed`. Beliefs derived only from removed ones go too, transitively;
/// the target is kept so that losing all of its support shows up as
/// `Abandon`.
pub fn predict(
    user_model: &BeliefSet,
    target: &Proposition,
    hypothesized: &[Evidence],
    removed: &BTreeSet<Proposition>,
    tau: u32,
    trace: &mut dyn TraceSink,
) -> Result<Verdict, BeliefError> {
    let mut model = user_model.clone();
    let mut refuted = removed.clone();
    for p in removed {
        model.remove(p);
    }
    loop {
        let orphans: Vec<Proposition> = model
            .iter()
            .filter(|b| &b.prop != target)
            .filter(|b| b.endorsement.derivation().is_some_and(|from| from.is_subset(&refuted)))
            .map(|b| b.prop.clone())
            .collect();
        if orphans.is_empty() {
            break;
        }
        for p in orphans {
            model.remove(&p);
            refuted.insert(p);
        }
    }
    let (support, attack) = partition_evidence(target, hypothesized);
    let verdict = revise(&model, target, &support, &attack, &refuted, tau)?;
    trace.emit(Event::Predict {
        target: target.clone(),
        hypothesized: hypothesized.iter().map(|e| e.belief().prop.clone()).collect(),
        removed: removed.iter().cloned().collect(),
        verdict,
    });
    Ok(verdict)
}

/// A belief that could be pursued, with the total rank of the evaluator's
/// evidence against it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub prop: Proposition,
    pub refuting_strength: u32,
}

/// Sum of ranks, for ranking candidates.
pub fn evidence_strength(evidence: &[Evidence]) -> u32 {
    evidence.iter().filter_map(|e| e.strength().ok()).map(|s| s.rank()).sum()
}

/// Smallest subset of `candidates` whose refutation still flips `target`.
///
/// Refuting a candidate equal to `target` means presenting `target_attack`
/// instead of removing it. Among subsets of equal size the larger summed
/// refuting strength wins, then the canonically smaller proposition list.
pub fn select_min_set(
    target: &Proposition,
    candidates: &[Candidate],
    user_model: &BeliefSet,
    target_attack: &[Evidence],
    tau: u32,
    trace: &mut dyn TraceSink,
) -> Result<BTreeSet<Proposition>, FocusError> {
    let flips = |subset: &[&Candidate], trace: &mut dyn TraceSink| -> Result<bool, FocusError> {
        let attack_target = subset.iter().any(|c| &c.prop == target);
        let removed: BTreeSet<Proposition> =
            subset.iter().filter(|c| &c.prop != target).map(|c| c.prop.clone()).collect();
        let hyp: &[Evidence] = if attack_target { target_attack } else { &[] };
        Ok(predict(user_model, target, hyp, &removed, tau, trace)?.outcome.is_flip())
    };

    let all: Vec<&Candidate> = candidates.iter().sorted_by(|a, b| a.prop.cmp(&b.prop)).collect();
    if !flips(&all, trace)? {
        return Err(FocusError::NoFlip(target.clone()));
    }
    for k in 0..=all.len() {
        let best = all
            .iter()
            .copied()
            .combinations(k)
            .filter_map(|subset| match flips(&subset, trace) {
                Ok(true) => Some(Ok(subset)),
                Ok(false) => None,
                Err(e) => Some(Err(e)),
            })
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .min_by(|a, b| {
                let strength = |s: &Vec<&Candidate>| s.iter().map(|c| c.refuting_strength).sum::<u32>();
                strength(b)
                    .cmp(&strength(a))
                    .then_with(|| a.iter().map(|c| &c.prop).cmp(b.iter().map(|c| &c.prop)))
            });
        if let Some(subset) = best {
            let chosen: BTreeSet<Proposition> = subset.iter().map(|c| c.prop.clone()).collect();
            trace.emit(Event::Minset {
                target: target.clone(),
                candidates: candidates.iter().map(|c| c.prop.clone()).collect(),
                chosen: chosen.iter().cloned().collect(),
            });
            return Ok(chosen);
        }
    }
    unreachable!("the full candidate set flips")
}

/// Annotates every node of a candidate foci tree with its focus of
/// modification, children before parents.
pub fn select_focus_modification(
    mut root: FociNode,
    user_model: &BeliefSet,
    tau: u32,
    trace: &mut dyn TraceSink,
) -> Result<FociNode, FocusError> {
    let mut ctx = Selector { user_model, tau, trace };
    ctx.visit(&mut root)?;
    Ok(root)
}

/// Builds the candidate foci tree for an evaluated proposal and selects its
/// focus. `user_model` must already include what the proposal revealed.
pub fn select_focus(
    evaluated: &EvaluatedNode,
    user_model: &BeliefSet,
    tau: u32,
    trace: &mut dyn TraceSink,
) -> Result<FociNode, FocusError> {
    let tree = candidate_foci_tree(evaluated)?;
    trace.emit(Event::Foci(FociEvent::Tree {
        nodes: tree.propositions(),
    }));
    select_focus_modification(tree, user_model, tau, trace)
}

struct Selector<'a> {
    user_model: &'a BeliefSet,
    tau: u32,
    trace: &'a mut dyn TraceSink,
}

impl Selector<'_> {
    fn flips(
        &mut self,
        target: &Proposition,
        hyp: &[Evidence],
        removed: &BTreeSet<Proposition>,
    ) -> Result<bool, FocusError> {
        Ok(predict(self.user_model, target, hyp, removed, self.tau, self.trace)?
            .outcome
            .is_flip())
    }

    fn record(&mut self, node: &FociNode, subject: &Proposition, step: FocusStep, focus: &Option<BTreeSet<Proposition>>) {
        self.trace.emit(Event::Foci(FociEvent::Step {
            node: node.prop().clone(),
            subject: subject.clone(),
            step,
            focus: focus.as_ref().map(|f| f.iter().cloned().collect()),
        }));
    }

    /// A relation has no proposed support, so it is always treated as a leaf.
    fn relation(&mut self, node: &mut FociNode) -> Result<(), FocusError> {
        let relation = node.evaluated.relation.clone().expect("non-root node");
        let attack = node.evaluated.relation_s_attack.clone();
        let focus = self
            .flips(&relation, &attack, &BTreeSet::new())?
            .then(|| BTreeSet::from([relation.clone()]));
        self.record(node, &relation, FocusStep::Leaf, &focus);
        node.relation_focus = focus;
        Ok(())
    }

    fn visit(&mut self, node: &mut FociNode) -> Result<(), FocusError> {
        let prop = node.prop().clone();
        let s_attack = node.evaluated.s_attack.clone();
        let none = BTreeSet::new();

        if node.children.is_empty() {
            let focus = self.flips(&prop, &s_attack, &none)?.then(|| BTreeSet::from([prop.clone()]));
            node.step = Some(FocusStep::Leaf);
            self.record(node, &prop, FocusStep::Leaf, &focus);
            node.focus = focus;
            return Ok(());
        }

        for child in &mut node.children {
            let (belief_ok, relation_ok) = (child.evaluated.belief_accepted(), child.evaluated.relation_accepted());
            if !belief_ok {
                self.visit(child)?;
            }
            if !relation_ok {
                self.relation(child)?;
            }
        }

        let mut candidates = Vec::new();
        for child in &node.children {
            if !child.evaluated.belief_accepted() && child.focus.is_some() {
                candidates.push(Candidate {
                    prop: child.prop().clone(),
                    refuting_strength: evidence_strength(&child.evaluated.s_attack),
                });
            }
            if !child.evaluated.relation_accepted() && child.relation_focus.is_some() {
                candidates.push(Candidate {
                    prop: child.evaluated.relation.clone().expect("non-root node"),
                    refuting_strength: evidence_strength(&child.evaluated.relation_s_attack),
                });
            }
        }
        node.cand_set = candidates.iter().map(|c| c.prop.clone()).collect();
        let cand = node.cand_set.clone();

        let (step, focus) = if !cand.is_empty() && self.flips(&prop, &[], &cand)? {
            let min = select_min_set(&prop, &candidates, self.user_model, &s_attack, self.tau, self.trace)?;
            (FocusStep::Evidence, Some(union_of_foci(node, &min)))
        } else if self.flips(&prop, &s_attack, &none)? {
            (FocusStep::Belief, Some(BTreeSet::from([prop.clone()])))
        } else if !cand.is_empty() && self.flips(&prop, &s_attack, &cand)? {
            let mut with_self = candidates.clone();
            with_self.push(Candidate {
                prop: prop.clone(),
                refuting_strength: evidence_strength(&s_attack),
            });
            let min = select_min_set(&prop, &with_self, self.user_model, &s_attack, self.tau, self.trace)?;
            let mut focus = union_of_foci(node, &min);
            focus.insert(prop.clone());
            (FocusStep::Both, Some(focus))
        } else {
            (FocusStep::Nil, None)
        };
        node.step = Some(step);
        self.record(node, &prop, step, &focus);
        node.focus = focus;
        Ok(())
    }
}

fn union_of_foci(node: &FociNode, members: &BTreeSet<Proposition>) -> BTreeSet<Proposition> {
    let mut out = BTreeSet::new();
    for child in &node.children {
        if members.contains(child.prop()) {
            out.extend(child.focus.iter().flatten().cloned());
        }
        if child.evaluated.relation.as_ref().is_some_and(|r| members.contains(r)) {
            out.extend(child.relation_focus.iter().flatten().cloned());
        }
    }
    out
}
