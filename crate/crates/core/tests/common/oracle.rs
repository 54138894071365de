//! Independent reference computations used to check the engine.

use std::collections::BTreeSet;

use parley::beliefs::{Belief, BeliefSet, Endorsement, Evidence, EvidencePiece, StrengthLevel};
use parley::focus::{select_min_set, Candidate, FocusError};
use parley::trace::NullTrace;
use parley::Proposition;
use rand::Rng;

/// Ordering used by the properties: reject < uncertain/abandon < accept.
pub fn favour(outcome: &str) -> i8 {
    match outcome {
        "reject" => 0,
        "accept" => 2,
        _ => 1,
    }
}

/// The decision rule written out directly.
pub fn decide(support: u32, attack: u32, tau: u32, derivation_refuted: bool) -> &'static str {
    if support as i64 - attack as i64 >= tau as i64 {
        "accept"
    } else if attack as i64 - support as i64 >= tau as i64 {
        "reject"
    } else if derivation_refuted {
        "abandon"
    } else {
        "uncertain"
    }
}

pub fn level_of(rank: u32) -> StrengthLevel {
    match rank {
        1 => StrengthLevel::Weak,
        2 => StrengthLevel::Strong,
        3 => StrengthLevel::Warranted,
        _ => panic!("rank {rank}"),
    }
}

#[derive(Debug, Clone)]
pub enum Prior {
    None,
    Independent(u32),
    Derived(Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cand {
    Belief(usize),
    Relation(usize),
    Target,
}

/// A user model around target `t`: pieces `b_k` with relations
/// `supports(b_k, t)`, some `b_k` derived from an earlier `b_j`, a prior on
/// `t`, and the evaluator's counter-evidence against `t`.
#[derive(Debug, Clone)]
pub struct MinSetCase {
    pub tau: u32,
    /// (belief rank, relation rank, derived from)
    pub pieces: Vec<(u32, u32, Option<usize>)>,
    pub prior: Prior,
    pub candidates: Vec<(Cand, u32)>,
    /// (belief rank, relation rank) of each attack piece.
    pub attack: Vec<(u32, u32)>,
}

fn belief_name(k: usize) -> String {
    format!("b{k}")
}

fn relation_name(k: usize) -> String {
    format!("supports(b{k}, t)")
}

impl MinSetCase {
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let n = rng.gen_range(1..=6);
        let pieces = (0..n)
            .map(|k| {
                let from = (k > 0 && rng.gen_bool(0.25)).then(|| rng.gen_range(0..k));
                (rng.gen_range(1..=3), rng.gen_range(1..=3), from)
            })
            .collect();
        let prior = match rng.gen_range(0..5) {
            0 | 2 => Prior::None,
            1 => Prior::Independent(rng.gen_range(1..=3)),
            _ => {
                let mut from: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.6)).collect();
                if from.is_empty() {
                    from.push(0);
                }
                Prior::Derived(from)
            }
        };
        let mut candidates = Vec::new();
        for k in 0..n {
            match rng.gen_range(0..4) {
                0 | 1 => candidates.push((Cand::Belief(k), rng.gen_range(0..10))),
                2 => candidates.push((Cand::Relation(k), rng.gen_range(0..10))),
                _ => {}
            }
            if candidates.len() < 7 && rng.gen_bool(0.15) {
                candidates.push((Cand::Relation(k), rng.gen_range(0..10)));
            }
        }
        candidates.dedup_by_key(|c| c.0);
        if rng.gen_bool(0.6) {
            candidates.push((Cand::Target, rng.gen_range(0..10)));
        }
        candidates.truncate(8);
        if candidates.is_empty() {
            candidates.push((Cand::Belief(0), 1));
        }
        let attack = (0..rng.gen_range(0..=4)).map(|_| (rng.gen_range(1..=3), rng.gen_range(1..=3))).collect();
        MinSetCase {
            tau: rng.gen_range(1..=2),
            pieces,
            prior,
            candidates,
            attack,
        }
    }

    fn cand_name(&self, c: Cand) -> String {
        match c {
            Cand::Belief(k) => belief_name(k),
            Cand::Relation(k) => relation_name(k),
            Cand::Target => "t".into(),
        }
    }

    /// Whether refuting `subset` (indices into `candidates`) makes the user
    /// give up `t`, computed from the case description alone.
    pub fn oracle_flips(&self, subset: &[usize]) -> bool {
        let n = self.pieces.len();
        let chosen: Vec<Cand> = subset.iter().map(|&i| self.candidates[i].0).collect();
        let mut belief_gone = vec![false; n];
        let mut relation_gone = vec![false; n];
        for c in &chosen {
            match *c {
                Cand::Belief(k) => belief_gone[k] = true,
                Cand::Relation(k) => relation_gone[k] = true,
                Cand::Target => {}
            }
        }
        // Beliefs derived from something gone go too.
        loop {
            let mut changed = false;
            for k in 0..n {
                if let (false, Some(j)) = (belief_gone[k], self.pieces[k].2) {
                    if belief_gone[j] {
                        belief_gone[k] = true;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut support = 0;
        if let Prior::Independent(r) = self.prior {
            support += r;
        }
        for k in 0..n {
            if !belief_gone[k] && !relation_gone[k] {
                support += self.pieces[k].0.min(self.pieces[k].1);
            }
        }
        let attack = if chosen.contains(&Cand::Target) {
            self.attack.iter().map(|&(b, r)| b.min(r)).sum()
        } else {
            0
        };
        let derivation_refuted = match &self.prior {
            // Only removed beliefs count as refuted; relations are not
            // beliefs a derivation can rest on.
            Prior::Derived(from) => from.iter().all(|&k| belief_gone[k]),
            _ => false,
        };
        matches!(decide(support, attack, self.tau, derivation_refuted), "reject" | "abandon")
    }

    /// Exhaustive search: smallest flipping subset, then largest summed
    /// strength, then the lexicographically smallest sorted name list.
    pub fn oracle(&self) -> Option<BTreeSet<String>> {
        let m = self.candidates.len();
        let full: Vec<usize> = (0..m).collect();
        if !self.oracle_flips(&full) {
            return None;
        }
        let mut best: Option<(usize, u32, Vec<String>)> = None;
        for mask in 0u32..(1 << m) {
            let subset: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
            if !self.oracle_flips(&subset) {
                continue;
            }
            let strength: u32 = subset.iter().map(|&i| self.candidates[i].1).sum();
            let mut names: Vec<String> = subset.iter().map(|&i| self.cand_name(self.candidates[i].0)).collect();
            names.sort();
            let key = (subset.len(), strength, names);
            let better = match &best {
                None => true,
                Some((len, s, n)) => (key.0, std::cmp::Reverse(key.1), &key.2) < (*len, std::cmp::Reverse(*s), n),
            };
            if better {
                best = Some(key);
            }
        }
        best.map(|(_, _, names)| names.into_iter().collect())
    }

    fn user_model(&self) -> BeliefSet {
        let p = |s: &str| -> Proposition { s.parse().unwrap() };
        let mut beliefs = Vec::new();
        for (k, &(b, r, from)) in self.pieces.iter().enumerate() {
            let endorsement = match from {
                Some(j) => Endorsement::derived(level_of(b), BTreeSet::from([p(&belief_name(j))])).unwrap(),
                None => Endorsement::record(level_of(b)),
            };
            beliefs.push(Belief::new(p(&belief_name(k)), endorsement));
            beliefs.push(Belief::new(p(&relation_name(k)), Endorsement::record(level_of(r))));
        }
        match &self.prior {
            Prior::None => {}
            Prior::Independent(r) => beliefs.push(Belief::new(p("t"), Endorsement::record(level_of(*r)))),
            Prior::Derived(from) => beliefs.push(Belief::new(
                p("t"),
                Endorsement::derived(StrengthLevel::Strong, from.iter().map(|&k| p(&belief_name(k))).collect()).unwrap(),
            )),
        }
        BeliefSet::from_beliefs(beliefs).unwrap()
    }

    /// The engine's answer, as names.
    pub fn engine(&self) -> Option<BTreeSet<String>> {
        let p = |s: &str| -> Proposition { s.parse().unwrap() };
        let target = p("t");
        let candidates: Vec<Candidate> = self
            .candidates
            .iter()
            .map(|&(c, s)| Candidate {
                prop: p(&self.cand_name(c)),
                refuting_strength: s,
            })
            .collect();
        let attack: Vec<Evidence> = self
            .attack
            .iter()
            .enumerate()
            .map(|(j, &(b, r))| {
                let belief = Belief::new(p(&format!("a{j}")), Endorsement::record(level_of(b)));
                let relation = Belief::new(p(&format!("supports(a{j}, ¬t)")), Endorsement::record(level_of(r)));
                Evidence::Piece(EvidencePiece::new(belief, relation, &target).unwrap())
            })
            .collect();
        match select_min_set(&target, &candidates, &self.user_model(), &attack, self.tau, &mut NullTrace) {
            Ok(set) => Some(set.iter().map(ToString::to_string).collect()),
            Err(FocusError::NoFlip(_)) => None,
            Err(e) => panic!("unexpected error {e}"),
        }
    }
}
