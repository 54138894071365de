//! The Propose-Evaluate-Modify cycle.
//!
//! One agent proposes a belief tree; the other evaluates it. If the root is
//! rejected, the evaluator selects a focus, posts the negation of each focus
//! member as a mutual belief to be achieved, and informs the proposer of it
//! with justification. That counter-proposal is itself a belief tree and is
//! evaluated by the original proposer with the same machinery, so conflicts
//! about the counter-proposal nest as embedded subdialogues.

mod act;
mod recipe;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use act::{realize, ActContent, ActKind, DialogueLevel, DiscourseAct};
pub use recipe::{apply_modify_node, modify_proposal, Modification, RecipeInstance, RecipeKind};

use crate::beliefs::{assimilate, Belief, Endorsement, KnowledgeBase, Outcome, Proposition, Verdict};
use crate::error::BeliefError;
use crate::evaluation::{evaluate_proposal, record_proposal, EvaluatedNode, EvaluationError, ProposalNode, Speaker};
use crate::focus::{select_focus, FocusError};
use crate::justification::{claim_level, justify};
use crate::trace::{Event, RecipeEvent, TraceSink};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NegotiationError {
    #[error("subdialogues nested deeper than the limit of {0}")]
    DepthExceeded(usize),
    #[error("Modify-Node precondition unmet: the proposer does not believe ¬{0}")]
    PreconditionUnmet(Proposition),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error(transparent)]
    Evaluation(#[from] EvaluationError),
    #[error(transparent)]
    Focus(#[from] FocusError),
    #[error(transparent)]
    Belief(#[from] BeliefError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Config {
    pub tau: u32,
    pub max_depth: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config { tau: 1, max_depth: 16 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Agent {
    pub id: String,
    pub kb: KnowledgeBase,
}

impl Agent {
    pub fn new(id: impl Into<String>, kb: KnowledgeBase) -> Self {
        Agent { id: id.into(), kb }
    }

    pub fn speaker(&self) -> Speaker {
        Speaker::new(self.id.clone(), self.kb.expertise)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum DialogueOutcome {
    Agreement,
    Concession { agent: String },
    UnresolvedNeedsSharing,
}

impl DialogueOutcome {
    /// Process exit status for a finished run: 0 when the agents settled,
    /// 2 when information sharing is needed.
    pub fn exit_code(&self) -> u8 {
        match self {
            DialogueOutcome::UnresolvedNeedsSharing => 2,
            _ => 0,
        }
    }
}

/// Labels for the dialogue levels this engine does not model. They are
/// carried through to the transcript and never consulted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct LevelLabels {
    pub domain: String,
    pub problem_solving: String,
}

impl Default for LevelLabels {
    fn default() -> Self {
        LevelLabels {
            domain: "unspecified".into(),
            problem_solving: "unspecified".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub labels: LevelLabels,
    pub acts: Vec<DiscourseAct>,
    pub outcome: DialogueOutcome,
    /// Deepest nesting of counter-proposals reached.
    pub depth: usize,
    /// Number of proposals evaluated.
    pub rounds: usize,
    /// The root both agents ended up holding, if any.
    pub ratified: Option<Proposition>,
}

impl Transcript {
    pub fn lines(&self) -> Vec<String> {
        realize(&self.acts)
    }

    /// The realized acts, LF-terminated.
    pub fn text(&self) -> String {
        self.lines().into_iter().map(|l| l + "\n").collect()
    }
}

/// A finished negotiation: the transcript and both agents as they ended up.
#[derive(Debug, Clone)]
pub struct Negotiation {
    pub transcript: Transcript,
    pub agents: [Agent; 2],
}

/// Runs the dialogue that starts with `proposer` putting `initial` to
/// `evaluator`.
pub fn negotiate(
    proposer: &Agent,
    evaluator: &Agent,
    initial: &ProposalNode,
    config: &Config,
    trace: &mut dyn TraceSink,
) -> Result<Negotiation, NegotiationError> {
    if config.tau == 0 {
        return Err(BeliefError::InvalidThreshold(0).into());
    }
    if proposer.id == evaluator.id {
        return Err(NegotiationError::Contract("agents need distinct ids".into()));
    }
    initial.validate()?;

    let mut engine = Engine {
        agents: [proposer.clone(), evaluator.clone()],
        config: *config,
        trace,
        acts: Vec::new(),
        depth: 0,
        rounds: 0,
        pursued: BTreeSet::new(),
        informed: BTreeSet::new(),
        concession: None,
    };
    engine.act(DiscourseAct::propose(&proposer.id, initial));
    let resolution = engine.pem(0, initial.clone(), 0)?;

    let (outcome, ratified) = match resolution {
        Resolution::Unresolved => (DialogueOutcome::UnresolvedNeedsSharing, None),
        r => {
            let ratified = match r {
                Resolution::Accepted => Some(initial.prop.clone()),
                Resolution::Withdrawn { ratified } => ratified,
                Resolution::Unresolved => unreachable!(),
            };
            let outcome = match engine.concession.take() {
                Some(agent) => DialogueOutcome::Concession { agent },
                None => DialogueOutcome::Agreement,
            };
            (outcome, ratified)
        }
    };
    Ok(Negotiation {
        transcript: Transcript {
            labels: LevelLabels::default(),
            acts: engine.acts,
            outcome,
            depth: engine.depth,
            rounds: engine.rounds,
            ratified,
        },
        agents: engine.agents,
    })
}

enum Resolution {
    /// The evaluator ended up holding the proposal's root.
    Accepted,
    /// The proposer gave the root up; `ratified` is the correction both now
    /// hold, if there was one.
    Withdrawn { ratified: Option<Proposition> },
    Unresolved,
}

struct Engine<'t> {
    agents: [Agent; 2],
    config: Config,
    trace: &'t mut dyn TraceSink,
    acts: Vec<DiscourseAct>,
    depth: usize,
    rounds: usize,
    /// (agent, claim) pairs already counter-proposed.
    pursued: BTreeSet<(usize, Proposition)>,
    /// (agent, proposition, evidence) informs already uttered.
    informed: BTreeSet<(usize, Proposition, Vec<Proposition>)>,
    concession: Option<String>,
}

impl Engine<'_> {
    fn act(&mut self, act: DiscourseAct) {
        self.trace.emit(Event::Act(act.clone()));
        self.acts.push(act);
    }

    fn recipe(&mut self, event: RecipeEvent) {
        self.trace.emit(Event::Recipe(event));
    }

    fn evaluate(&mut self, proposer: usize, tree: &ProposalNode, depth: usize) -> Result<EvaluatedNode, NegotiationError> {
        let hearer = 1 - proposer;
        let speaker = self.agents[proposer].speaker();
        let kb = &mut self.agents[hearer].kb;
        kb.user_model = record_proposal(&kb.user_model, &speaker, tree);
        self.recipe(RecipeEvent::Evaluate {
            evaluator: self.agents[hearer].id.clone(),
            proposer: speaker.id.clone(),
            root: tree.prop.clone(),
            depth,
        });
        Ok(evaluate_proposal(
            &self.agents[hearer].kb,
            &self.agents[hearer].id,
            &speaker,
            tree,
            self.config.tau,
            self.trace,
        )?)
    }

    fn pem(&mut self, proposer: usize, mut tree: ProposalNode, depth: usize) -> Result<Resolution, NegotiationError> {
        self.rounds += 1;
        self.depth = self.depth.max(depth);
        let hearer = 1 - proposer;
        let tau = self.config.tau;

        loop {
            let evaluated = self.evaluate(proposer, &tree, depth)?;
            match evaluated.belief_verdict.outcome {
                Outcome::Accept => {
                    self.act(DiscourseAct::accept(&self.agents[hearer].id, &tree.prop));
                    self.adopt(hearer, &evaluated, false)?;
                    return Ok(Resolution::Accepted);
                }
                Outcome::Reject => {}
                Outcome::Uncertain | Outcome::Abandon => {
                    let id = self.agents[hearer].id.clone();
                    self.act(DiscourseAct::info_share_request(&id, &tree.prop));
                    self.recipe(RecipeEvent::InfoSharingRequired {
                        agent: id,
                        root: tree.prop.clone(),
                    });
                    return Ok(Resolution::Unresolved);
                }
            }

            let foci = select_focus(&evaluated, &self.agents[hearer].kb.user_model, tau, self.trace)?;
            let Some(focus) = foci.focus.clone() else {
                return self.concede(hearer, &evaluated);
            };
            let recipe = modify_proposal(&evaluated, &focus, &self.agents[hearer].id, &self.agents[proposer].id)?;
            self.recipe(RecipeEvent::Invoke {
                recipe: recipe.kind,
                s1: recipe.s1.clone(),
                s2: recipe.s2.clone(),
                node: recipe.node.clone(),
                goals: recipe.goals.clone(),
            });

            let mut progressed = false;
            for goal in &recipe.goals {
                let member = goal.negate();
                if !tree.contains(&member) {
                    continue;
                }
                let me = self.agents[hearer].speaker();
                let kb = &self.agents[hearer].kb;
                let choice = justify(&kb.own, &kb.user_model, goal, &me, tau, self.trace)?;
                let counter = choice.to_proposal(claim_level(&kb.own, goal, &me));
                let claim_key = (hearer, goal.clone(), child_props(&counter, goal));
                if self.pursued.contains(&(hearer, goal.clone())) || self.informed.contains(&claim_key) {
                    self.recipe(RecipeEvent::SkipRepeat {
                        agent: me.id.clone(),
                        claim: goal.clone(),
                    });
                    continue;
                }
                if depth + 1 > self.config.max_depth {
                    return Err(NegotiationError::DepthExceeded(self.config.max_depth));
                }
                self.pursued.insert((hearer, goal.clone()));
                progressed = true;

                for prop in &choice.realized {
                    let evidence = child_props(&counter, prop);
                    if self.informed.insert((hearer, prop.clone(), evidence.clone())) {
                        self.act(DiscourseAct::inform(&me.id, prop, evidence));
                    }
                }

                match self.pem(hearer, counter, depth + 1)? {
                    Resolution::Accepted => {
                        let modification = apply_modify_node(
                            &tree,
                            &member,
                            &self.agents[hearer].kb.own,
                            &self.agents[proposer].kb.own,
                        )?;
                        self.recipe(RecipeEvent::ModifyNode {
                            s1: self.agents[hearer].id.clone(),
                            s2: self.agents[proposer].id.clone(),
                            node: member.clone(),
                            removed: modification.removed.clone(),
                            altered_to: modification.altered_to.clone(),
                        });
                        match modification.tree {
                            Some(ref t) if t.prop == tree.prop => tree = t.clone(),
                            _ => return self.insert_correction(hearer, &tree, modification, depth),
                        }
                    }
                    Resolution::Withdrawn { .. } => {}
                    Resolution::Unresolved => return Ok(Resolution::Unresolved),
                }
            }
            if !progressed {
                return self.concede(hearer, &evaluated);
            }
        }
    }

    /// The proposer has given up the root; the corrector re-proposes what is
    /// left for ratification.
    fn insert_correction(
        &mut self,
        corrector: usize,
        original: &ProposalNode,
        modification: Modification,
        depth: usize,
    ) -> Result<Resolution, NegotiationError> {
        let proposer = 1 - corrector;
        self.recipe(RecipeEvent::Withdraw {
            agent: self.agents[proposer].id.clone(),
            root: original.prop.clone(),
        });
        let Some(corrected) = modification.tree else {
            self.recipe(RecipeEvent::InsertCorrection {
                s1: self.agents[corrector].id.clone(),
                s2: self.agents[proposer].id.clone(),
                root: None,
                ratified: false,
            });
            return Ok(Resolution::Withdrawn { ratified: None });
        };
        let evaluated = self.evaluate(corrector, &corrected, depth)?;
        // A root the proposer already conceded stays conceded.
        let ratified = evaluated.belief_accepted() || self.agents[proposer].kb.own.holds(&corrected.prop);
        if ratified {
            self.adopt(proposer, &evaluated, false)?;
        }
        self.recipe(RecipeEvent::InsertCorrection {
            s1: self.agents[corrector].id.clone(),
            s2: self.agents[proposer].id.clone(),
            root: Some(corrected.prop.clone()),
            ratified,
        });
        Ok(Resolution::Withdrawn {
            ratified: ratified.then(|| corrected.prop.clone()),
        })
    }

    /// No focus is predicted to work: the evaluator adopts the proposal.
    fn concede(&mut self, hearer: usize, evaluated: &EvaluatedNode) -> Result<Resolution, NegotiationError> {
        let id = self.agents[hearer].id.clone();
        self.recipe(RecipeEvent::Concede {
            agent: id.clone(),
            root: evaluated.prop.clone(),
        });
        self.act(DiscourseAct::accept(&id, &evaluated.prop));
        self.concession.get_or_insert(id);
        self.adopt(hearer, evaluated, true)?;
        Ok(Resolution::Accepted)
    }

    /// `hearer` takes on every accepted belief and relation of the proposal
    /// (and the root regardless, when conceding); the proposer notes that
    /// and makes sure it holds the root itself.
    fn adopt(&mut self, hearer: usize, evaluated: &EvaluatedNode, force_root: bool) -> Result<(), NegotiationError> {
        let proposer = 1 - hearer;
        let proposer_speaker = self.agents[proposer].speaker();
        let hearer_speaker = self.agents[hearer].speaker();

        let mut accepted: Vec<(&EvaluatedNode, Verdict)> = Vec::new();
        collect_accepted(evaluated, &mut accepted);
        let conceded = force_root && !evaluated.belief_accepted();
        if conceded {
            let v = evaluated.belief_verdict;
            accepted.push((
                evaluated,
                Verdict {
                    outcome: Outcome::Accept,
                    ..v
                },
            ));
        }

        for (node, verdict) in &accepted {
            let h = &mut self.agents[hearer].kb;
            // A conceded root is taken on the proposer's word alone.
            let support = if conceded && std::ptr::eq(*node, evaluated) {
                vec![proposer_speaker.assert(&node.prop)]
            } else {
                node.support.clone()
            };
            h.own = assimilate(&h.own, verdict, &node.prop, &support)?;
            let p = &mut self.agents[proposer].kb;
            p.user_model = assimilate(&p.user_model, verdict, &node.prop, &[hearer_speaker.assert(&node.prop)])?;
            for c in &node.children {
                if c.belief_accepted() && c.relation_accepted() {
                    let rel = c.relation.clone().expect("child has a relation");
                    let h = &mut self.agents[hearer].kb;
                    if !h.own.holds(&rel) {
                        h.own.replace(Belief::new(rel.clone(), proposer_speaker.endorse()));
                    }
                    let p = &mut self.agents[proposer].kb;
                    if !p.user_model.holds(&rel) {
                        p.user_model.replace(Belief::new(rel, hearer_speaker.endorse()));
                    }
                }
            }
        }

        let own = &mut self.agents[proposer].kb.own;
        if !own.mentions(&evaluated.prop) {
            let from: BTreeSet<Proposition> = evaluated
                .children
                .iter()
                .map(|c| c.prop.clone())
                .filter(|p| own.holds(p))
                .collect();
            let endorsement = Endorsement::derived(evaluated.asserted, from)
                .unwrap_or_else(|| Endorsement::record(evaluated.asserted));
            own.replace(Belief::new(evaluated.prop.clone(), endorsement));
        }
        Ok(())
    }
}

/// Accepted nodes reachable from the root through accepted links, children
/// first.
fn collect_accepted<'a>(node: &'a EvaluatedNode, out: &mut Vec<(&'a EvaluatedNode, Verdict)>) {
    for c in &node.children {
        if c.belief_accepted() && c.relation_accepted() {
            collect_accepted(c, out);
        }
    }
    if node.belief_accepted() {
        out.push((node, node.belief_verdict));
    }
}

/// Beliefs directly beneath `prop` in a proposal tree.
fn child_props(tree: &ProposalNode, prop: &Proposition) -> Vec<Proposition> {
    if tree.prop == *prop {
        return tree.children.iter().map(|c| c.node.prop.clone()).collect();
    }
    tree.children
        .iter()
        .map(|c| child_props(&c.node, prop))
        .find(|v| !v.is_empty())
        .unwrap_or_default()
}
