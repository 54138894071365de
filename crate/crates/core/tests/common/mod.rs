//! Shared helpers: bundled scenario loading and a seeded random scenario
//! generator.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use parley::beliefs::{Expertise, Proposition, Source, StrengthLevel};
use parley::negotiation::{Config, LevelLabels};
use parley::scenario::{AgentSpec, BeliefSpec, ProposalSpec};
use parley::{parse_scenario, Scenario};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.scenario"))
}

pub fn bundled(name: &str) -> Scenario {
    let text = std::fs::read_to_string(scenario_path(name)).expect("bundled scenario exists");
    parse_scenario(&text).expect("bundled scenario parses")
}

pub fn p(s: &str) -> Proposition {
    s.parse().expect("valid proposition")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn level<R: Rng>(rng: &mut R) -> StrengthLevel {
    *StrengthLevel::ALL.choose(rng).expect("nonempty")
}

fn literal<R: Rng>(rng: &mut R, atoms: usize) -> Proposition {
    let atom = p(&format!("q{}", rng.gen_range(0..atoms)));
    if rng.gen_bool(0.5) {
        atom.negate()
    } else {
        atom
    }
}

/// Adds `prop` unless its atom is already mentioned.
fn add(list: &mut Vec<BeliefSpec>, prop: Proposition, level: StrengthLevel, source: Source) -> bool {
    if list.iter().any(|b| b.prop.atom_key() == prop.atom_key()) {
        return false;
    }
    list.push(BeliefSpec { prop, level, source });
    true
}

fn random_tree<R: Rng>(rng: &mut R, atoms: usize, used: &mut BTreeSet<Proposition>, depth: usize) -> ProposalSpec {
    let prop = loop {
        let l = literal(rng, atoms);
        if used.insert(l.atom_key()) {
            break l;
        }
    };
    let mut children = Vec::new();
    if depth < 2 {
        for _ in 0..rng.gen_range(0..=2usize) {
            if used.len() + 1 >= atoms {
                break;
            }
            children.push(random_tree(rng, atoms, used, depth + 1));
        }
    }
    ProposalSpec {
        prop,
        asserted_level: level(rng),
        relation_level: Some(level(rng)),
        children,
    }
}

fn adopt_tree<R: Rng>(rng: &mut R, tree: &ProposalSpec, into: &mut Vec<BeliefSpec>) {
    for c in &tree.children {
        adopt_tree(rng, c, into);
        let rel = Proposition::supports(c.prop.clone(), tree.prop.clone());
        add(into, rel, c.relation_level.unwrap_or(c.asserted_level), Source::KbRecord);
    }
    let source = if tree.children.is_empty() || rng.gen_bool(0.5) {
        Source::KbRecord
    } else {
        Source::Derived {
            from: tree.children.iter().map(|c| c.prop.clone()).collect(),
        }
    };
    add(into, tree.prop.clone(), tree.asserted_level, source);
}

fn random_beliefs<R: Rng>(rng: &mut R, atoms: usize, list: &mut Vec<BeliefSpec>, budget: usize) {
    let mut tries = 0;
    while list.len() < budget && tries < 4 * budget {
        tries += 1;
        let prop = if rng.gen_bool(0.35) {
            let a = literal(rng, atoms);
            let b = literal(rng, atoms);
            if a.atom_key() == b.atom_key() {
                continue;
            }
            Proposition::supports(a, b)
        } else {
            literal(rng, atoms)
        };
        let source = if rng.gen_bool(0.2) { Source::Stereotype } else { Source::KbRecord };
        add(list, prop, level(rng), source);
    }
}

/// A random, well-formed two-agent scenario with at most `max_beliefs`
/// beliefs in total. The proposer holds everything it proposes.
pub fn random_scenario(seed: u64, max_beliefs: usize) -> Scenario {
    let mut rng = rng(seed);
    let atoms = rng.gen_range(3..=7);
    let mut used = BTreeSet::new();
    let proposal = random_tree(&mut rng, atoms, &mut used, 0);

    let mut proposer = Vec::new();
    adopt_tree(&mut rng, &proposal, &mut proposer);
    proposer.truncate(max_beliefs);
    let remaining = max_beliefs.saturating_sub(proposer.len());
    let for_proposer = rng.gen_range(0..=remaining) / 3;
    let for_evaluator = (remaining - for_proposer) * 2 / 3;
    let for_models = remaining - for_proposer - for_evaluator;

    let target = proposer.len() + for_proposer;
    random_beliefs(&mut rng, atoms, &mut proposer, target);
    let mut evaluator = Vec::new();
    random_beliefs(&mut rng, atoms, &mut evaluator, for_evaluator);
    let mut model_a = Vec::new();
    let mut model_b = Vec::new();
    let half = for_models / 2;
    random_beliefs(&mut rng, atoms, &mut model_a, half);
    random_beliefs(&mut rng, atoms, &mut model_b, for_models - half);

    let expertise = |rng: &mut ChaCha8Rng| if rng.gen_bool(0.5) { Expertise::Expert } else { Expertise::NonExpert };
    Scenario {
        v: 1,
        name: format!("random-{seed}"),
        labels: LevelLabels::default(),
        agents: vec![
            AgentSpec {
                id: "A".into(),
                expertise: expertise(&mut rng),
                beliefs: proposer,
                user_model: model_a,
            },
            AgentSpec {
                id: "B".into(),
                expertise: expertise(&mut rng),
                beliefs: evaluator,
                user_model: model_b,
            },
        ],
        proposal,
        config: Config::default(),
    }
}

pub mod checks;
pub mod oracle;
