//! Collaborative negotiation between two agents with private,
//! endorsement-weighted beliefs.
//!
//! A proposal is a tree of beliefs, each child offered as evidence for its
//! parent. The hearer evaluates it bottom-up ([`evaluation`]); if the root is
//! rejected it picks what to attack ([`focus`]), picks evidence to present
//! ([`justification`]) and answers with a counter-proposal, which is evaluated
//! the same way ([`negotiation`]). [`scenario`] loads declarative two-agent
//! setups and [`trace`] records every decision taken along the way.

pub mod beliefs;
pub mod error;
pub mod evaluation;
pub mod focus;
pub mod justification;
pub mod negotiation;
pub mod scenario;
pub mod trace;

pub use beliefs::{Belief, BeliefSet, Endorsement, Expertise, KnowledgeBase, Proposition, StrengthLevel};
pub use negotiation::{negotiate, Config, Transcript};
pub use scenario::{parse_scenario, Scenario};
