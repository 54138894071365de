use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Endorsement, Expertise, Proposition};
use crate::error::BeliefError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Belief {
    pub prop: Proposition,
    pub endorsement: Endorsement,
}

impl Belief {
    pub fn new(prop: Proposition, endorsement: Endorsement) -> Self {
        Belief { prop, endorsement }
    }
}

/// A contradiction-free set of beliefs, keyed by the positive form of each
/// proposition so that `p` and `¬p` can never both be present.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BeliefSet {
    by_atom: BTreeMap<Proposition, Belief>,
}

impl BeliefSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_beliefs<I: IntoIterator<Item = Belief>>(beliefs: I) -> Result<Self, BeliefError> {
        let mut set = Self::new();
        for b in beliefs {
            set.insert(b)?;
        }
        Ok(set)
    }

    /// Adds a belief. Fails if the negation is already held; re-inserting the
    /// same proposition replaces its endorsement.
    pub fn insert(&mut self, belief: Belief) -> Result<(), BeliefError> {
        let key = belief.prop.atom_key();
        if let Some(existing) = self.by_atom.get(&key) {
            if existing.prop != belief.prop {
                return Err(BeliefError::Contradiction(belief.prop.atom_key()));
            }
        }
        self.by_atom.insert(key, belief);
        Ok(())
    }

    /// Adds a belief, dropping its negation if present.
    pub fn replace(&mut self, belief: Belief) {
        self.by_atom.insert(belief.prop.atom_key(), belief);
    }

    pub fn remove(&mut self, prop: &Proposition) -> Option<Belief> {
        let key = prop.atom_key();
        match self.by_atom.get(&key) {
            Some(b) if &b.prop == prop => self.by_atom.remove(&key),
            _ => None,
        }
    }

    pub fn get(&self, prop: &Proposition) -> Option<&Belief> {
        self.by_atom.get(&prop.atom_key()).filter(|b| &b.prop == prop)
    }

    pub fn holds(&self, prop: &Proposition) -> bool {
        self.get(prop).is_some()
    }

    /// Held in either polarity.
    pub fn mentions(&self, prop: &Proposition) -> bool {
        self.by_atom.contains_key(&prop.atom_key())
    }

    pub fn iter(&self) -> impl Iterator<Item = &Belief> {
        self.by_atom.values()
    }

    pub fn len(&self) -> usize {
        self.by_atom.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_atom.is_empty()
    }

    /// Held `supports(_, _)` relations.
    pub fn relations(&self) -> impl Iterator<Item = &Belief> {
        self.iter().filter(|b| b.prop.relation_parts().is_some())
    }

    /// Removes derived beliefs none of whose support is still held, repeating
    /// until nothing changes. Returns the removed propositions.
    pub fn prune_unsupported(&mut self) -> BTreeSet<Proposition> {
        let mut removed = BTreeSet::new();
        loop {
            let orphans: Vec<Proposition> = self
                .iter()
                .filter(|b| {
                    b.endorsement
                        .derivation()
                        .is_some_and(|from| from.iter().all(|p| !self.holds(p)))
                })
                .map(|b| b.prop.clone())
                .collect();
            if orphans.is_empty() {
                return removed;
            }
            for p in orphans {
                self.remove(&p);
                removed.insert(p);
            }
        }
    }
}

impl<'a> IntoIterator for &'a BeliefSet {
    type Item = &'a Belief;
    type IntoIter = std::collections::btree_map::Values<'a, Proposition, Belief>;

    fn into_iter(self) -> Self::IntoIter {
        self.by_atom.values()
    }
}

/// One agent's private beliefs plus its model of the other agent's beliefs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeBase {
    pub own: BeliefSet,
    pub user_model: BeliefSet,
    pub expertise: Expertise,
}

impl KnowledgeBase {
    pub fn new(expertise: Expertise) -> Self {
        KnowledgeBase {
            own: BeliefSet::new(),
            user_model: BeliefSet::new(),
            expertise,
        }
    }

    pub fn with_beliefs(
        expertise: Expertise,
        own: impl IntoIterator<Item = Belief>,
        user_model: impl IntoIterator<Item = Belief>,
    ) -> Result<Self, BeliefError> {
        Ok(KnowledgeBase {
            own: BeliefSet::from_beliefs(own)?,
            user_model: BeliefSet::from_beliefs(user_model)?,
            expertise,
        })
    }

    pub fn belief_count(&self) -> usize {
        self.own.len() + self.user_model.len()
    }
}
