use thiserror::Error;

use crate::beliefs::Proposition;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PropositionError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("invalid identifier `{0}`")]
    BadIdentifier(String),
    #[error("malformed relation `{0}`: supports takes exactly two propositions")]
    MalformedRelation(String),
    #[error("nested proposition `{0}` outside a supports relation")]
    NestedOutsideRelation(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BeliefError {
    #[error("contradictory beliefs about `{0}`")]
    Contradiction(Proposition),
    #[error("`{0}` is not a well-formed evidential relation")]
    MalformedRelation(Proposition),
    #[error("relation `{relation}` does not bear on `{target}`")]
    EvidenceMismatch { relation: Proposition, target: Proposition },
    #[error("threshold must be at least 1, got {0}")]
    InvalidThreshold(u32),
    #[error("cannot assimilate an uncertain verdict on `{0}`")]
    UndecidedVerdict(Proposition),
}
