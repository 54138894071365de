//! Signed predicate atoms and the `supports(p, q)` evidential relation.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::PropositionError;

/// Predicate name reserved for evidential relations.
pub const SUPPORTS: &str = "supports";

/// An argument to a predicate: either a plain identifier or, inside a
/// `supports` relation, a nested proposition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Atom(String),
    Prop(Box<Proposition>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Proposition {
    negated: bool,
    predicate: String,
    args: Vec<Term>,
}

impl Proposition {
    /// Builds a positive atom over identifier arguments.
    pub fn atom<S: Into<String>>(predicate: S, args: &[&str]) -> Result<Self, PropositionError> {
        let predicate = predicate.into();
        check_ident(&predicate)?;
        if predicate == SUPPORTS {
            return Err(PropositionError::MalformedRelation(format!(
                "{predicate} needs two proposition arguments"
            )));
        }
        let args = args
            .iter()
            .map(|a| check_ident(a).map(|_| Term::Atom((*a).to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Proposition {
            negated: false,
            predicate,
            args,
        })
    }

    /// `supports(evidence, claim)`.
    pub fn supports(evidence: Proposition, claim: Proposition) -> Self {
        Proposition {
            negated: false,
            predicate: SUPPORTS.to_string(),
            args: vec![Term::Prop(Box::new(evidence)), Term::Prop(Box::new(claim))],
        }
    }

    pub fn negate(&self) -> Self {
        let mut p = self.clone();
        p.negated = !p.negated;
        p
    }

    /// The positive form of this proposition.
    pub fn atom_key(&self) -> Self {
        if self.negated {
            self.negate()
        } else {
            self.clone()
        }
    }

    pub fn is_negated(&self) -> bool {
        self.negated
    }

    pub fn predicate(&self) -> &str {
        &self.predicate
    }

    pub fn args(&self) -> &[Term] {
        &self.args
    }

    /// True for positive or negated `supports(_, _)` propositions.
    pub fn is_relation(&self) -> bool {
        self.predicate == SUPPORTS
    }

    /// For a positive relation, returns `(evidence, claim)`.
    pub fn relation_parts(&self) -> Option<(&Proposition, &Proposition)> {
        if self.negated || !self.is_relation() {
            return None;
        }
        match self.args.as_slice() {
            [Term::Prop(a), Term::Prop(b)] => Some((a, b)),
            _ => None,
        }
    }

    pub fn render(&self) -> String {
        self.to_string()
    }

    fn validate(&self) -> Result<(), PropositionError> {
        check_ident(&self.predicate)?;
        if self.is_relation() {
            match self.args.as_slice() {
                [Term::Prop(a), Term::Prop(b)] => {
                    a.validate()?;
                    b.validate()
                }
                _ => Err(PropositionError::MalformedRelation(self.to_string())),
            }
        } else {
            for a in &self.args {
                match a {
                    Term::Atom(s) => check_ident(s)?,
                    Term::Prop(p) => {
                        return Err(PropositionError::NestedOutsideRelation(p.to_string()))
                    }
                }
            }
            Ok(())
        }
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-' || c == '.'
}

fn check_ident(s: &str) -> Result<(), PropositionError> {
    if s.is_empty() || !s.chars().all(is_ident_char) {
        Err(PropositionError::BadIdentifier(s.to_string()))
    } else {
        Ok(())
    }
}

impl fmt::Display for Proposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("¬")?;
        }
        f.write_str(&self.predicate)?;
        if self.args.is_empty() {
            return Ok(());
        }
        f.write_str("(")?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match a {
                Term::Atom(s) => f.write_str(s)?,
                Term::Prop(p) => write!(f, "{p}")?,
            }
        }
        f.write_str(")")
    }
}

impl Ord for Proposition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.to_string().cmp(&other.to_string())
    }
}

impl PartialOrd for Proposition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn err(&self, msg: &str) -> PropositionError {
        PropositionError::Syntax {
            offset: self.pos,
            message: msg.to_string(),
        }
    }

    fn ident(&mut self) -> Result<String, PropositionError> {
        self.skip_ws();
        let len: usize = self
            .rest()
            .chars()
            .take_while(|c| is_ident_char(*c))
            .map(char::len_utf8)
            .sum();
        if len == 0 {
            return Err(self.err("expected identifier"));
        }
        let s = self.rest()[..len].to_string();
        self.pos += len;
        Ok(s)
    }

    fn negation(&mut self) -> bool {
        self.eat('¬') || self.eat('!') || self.eat('~')
    }

    fn prop(&mut self) -> Result<Proposition, PropositionError> {
        let mut negated = false;
        while self.negation() {
            negated = !negated;
        }
        let predicate = self.ident()?;
        let mut args = Vec::new();
        if self.eat('(')
            && !self.eat(')') {
                loop {
                    args.push(self.term()?);
                    if self.eat(')') {
                        break;
                    }
                    if !self.eat(',') {
                        return Err(self.err("expected ',' or ')'"));
                    }
                }
            }
        Ok(Proposition {
            negated,
            predicate,
            args,
        })
    }

    fn term(&mut self) -> Result<Term, PropositionError> {
        self.skip_ws();
        let start = self.pos;
        let negated = self.negation();
        let name = self.ident()?;
        self.skip_ws();
        if negated || self.rest().starts_with('(') {
            self.pos = start;
            return Ok(Term::Prop(Box::new(self.prop()?)));
        }
        Ok(Term::Atom(name))
    }
}

impl FromStr for Proposition {
    type Err = PropositionError;

    /// Parses `¬pred(a, b)`; `!` and `~` are accepted as negation too.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { src: s, pos: 0 };
        let prop = p.prop()?;
        p.skip_ws();
        if !p.rest().is_empty() {
            return Err(p.err("trailing input"));
        }
        // Inside `supports(...)`, identifiers without parentheses are still
        // propositions (0-ary predicates).
        let prop = promote_relation_args(prop);
        prop.validate()?;
        Ok(prop)
    }
}

fn promote_relation_args(mut p: Proposition) -> Proposition {
    if p.predicate == SUPPORTS {
        p.args = p
            .args
            .into_iter()
            .map(|t| match t {
                Term::Atom(s) => Term::Prop(Box::new(Proposition {
                    negated: false,
                    predicate: s,
                    args: vec![],
                })),
                Term::Prop(inner) => Term::Prop(Box::new(promote_relation_args(*inner))),
            })
            .collect();
    }
    p
}

impl Serialize for Proposition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Proposition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
