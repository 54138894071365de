//! Propositions, endorsement-ranked beliefs, evidence, and the revision
//! comparator shared by evaluation and prediction.

mod evidence;
mod kb;
mod proposition;
mod revise;
mod strength;

pub use evidence::{
    build_evidence_set, kb_pieces, partition_evidence, piece_strength, Direction, Evidence, EvidencePiece,
};
pub use kb::{Belief, BeliefSet, KnowledgeBase};
pub use proposition::{Proposition, Term, SUPPORTS};
pub use revise::{assimilate, revise, Outcome, Verdict};
pub use strength::{assertion_strength, Endorsement, Expertise, Source, StrengthLevel};
