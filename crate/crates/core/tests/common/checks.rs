//! One check per acceptance criterion. Each returns a short summary on
//! success and the first discrepancy on failure.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use parley::beliefs::{
    assimilate, piece_strength, Belief, BeliefSet, Endorsement, EvidencePiece, Expertise, Outcome, Verdict,
};
use parley::focus::FocusStep;
use parley::negotiation::{ActKind, DialogueOutcome, RecipeKind};
use parley::trace::{Event, FociEvent, HeuristicEvent, RecipeEvent, ReviseRole, Trace};
use parley::Proposition;
use rand::Rng;

use super::oracle::{decide, favour, level_of, MinSetCase};
use super::{bundled, p, random_scenario, rng};

pub type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn outcome_name(o: Outcome) -> String {
    serde_json::to_value(o).unwrap().as_str().unwrap().to_string()
}

fn props(list: &[&str]) -> Vec<Proposition> {
    list.iter().map(|s| p(s)).collect()
}

type Milestone = (&'static str, Box<dyn Fn(&Event) -> bool>);

/// Every milestone must match some record, in order.
fn in_order(trace: &Trace, milestones: Vec<Milestone>) -> Result<(), String> {
    let mut records = trace.records.iter();
    for (label, matches) in milestones {
        if !records.by_ref().any(|r| matches(&r.event)) {
            return Err(format!("trace lacks, in order: {label}"));
        }
    }
    Ok(())
}

pub const SMITH_TRANSCRIPT: &str = "\
U: PROPOSE ¬teaches(smith, ai) <- [on_sabbatical(smith, next_year)]
S: INFORM ¬on_sabbatical(smith, next_year)
S: INFORM postponed_sabbatical(smith, 1997)
U: ACCEPT ¬on_sabbatical(smith, next_year)
";

pub fn smith_golden() -> Check {
    let started = Instant::now();
    let s = bundled("smith");
    let mut trace = Trace::new();
    let result = s.run(&s.config, &mut trace).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();

    let on_sab = p("on_sabbatical(smith, next_year)");
    let not_on_sab = on_sab.negate();
    let root = p("¬teaches(smith, ai)");
    let relation = Proposition::supports(on_sab.clone(), root.clone());
    let postponed = p("postponed_sabbatical(smith, 1997)");

    let revise = |target: Proposition, role: ReviseRole, outcome: Outcome, scores: Option<(u32, u32)>| {
        move |e: &Event| {
            matches!(e, Event::Revise { target: t, role: r, verdict }
                if *t == target && *r == role && verdict.outcome == outcome
                    && scores.is_none_or(|(s, a)| (verdict.support_score, verdict.attack_score) == (s, a)))
        }
    };
    let step = |node: Proposition, st: FocusStep, focus: Vec<Proposition>| {
        move |e: &Event| {
            matches!(e, Event::Foci(FociEvent::Step { node: n, step, focus: Some(f), .. })
                if *n == node && *step == st && *f == focus)
        }
    };
    let (r2, r3) = (on_sab.clone(), not_on_sab.clone());
    let (r4, r5, r6) = (not_on_sab.clone(), postponed.clone(), not_on_sab.clone());
    let (r7, r8, r9) = (postponed.clone(), not_on_sab.clone(), on_sab.clone());
    let tree = vec![root.clone(), on_sab.clone()];
    let milestones: Vec<Milestone> = vec![
        ("leaf on_sabbatical rejected 2 vs 5", Box::new(revise(on_sab.clone(), ReviseRole::Belief, Outcome::Reject, Some((2, 5))))),
        ("relation accepted", Box::new(revise(relation, ReviseRole::HeldRelation, Outcome::Accept, None))),
        ("root rejected 2 vs 3", Box::new(revise(root.clone(), ReviseRole::Belief, Outcome::Reject, Some((2, 3))))),
        ("foci tree equals the proposal tree", Box::new(move |e| matches!(e, Event::Foci(FociEvent::Tree { nodes }) if *nodes == tree))),
        ("leaf focus on_sabbatical", Box::new(step(on_sab.clone(), FocusStep::Leaf, vec![on_sab.clone()]))),
        ("root focus on_sabbatical via evidence", Box::new(step(root.clone(), FocusStep::Evidence, vec![on_sab.clone()]))),
        ("Correct-Node posting ¬on_sabbatical", Box::new(move |e| matches!(e, Event::Recipe(RecipeEvent::Invoke { recipe: RecipeKind::CorrectNode, node, goals, .. })
            if *node == r2 && *goals == vec![r3.clone()]))),
        ("bare claim insufficient", Box::new(move |e| matches!(e, Event::Heuristic(HeuristicEvent::NeedsJustification { claim, needed: true }) if *claim == r4))),
        ("confidence keeps the postponed chain", Box::new(move |e| matches!(e, Event::Heuristic(HeuristicEvent::Rule { rule, kept, .. })
            if rule == "confidence" && *kept == vec![vec![r5.clone()]]))),
        ("realized [¬on_sabbatical, postponed]", Box::new(move |e| matches!(e, Event::Heuristic(HeuristicEvent::Chosen { claim, realized })
            if *claim == r6 && *realized == vec![r6.clone(), r7.clone()]))),
        ("user accepts", Box::new(move |e| matches!(e, Event::Act(a) if a.kind == ActKind::Accept && a.speaker == "U" && *a.subject() == r8))),
        ("Modify-Node on on_sabbatical", Box::new(move |e| matches!(e, Event::Recipe(RecipeEvent::ModifyNode { node, s1, s2, .. })
            if *node == r9 && s1 == "S" && s2 == "U"))),
    ];
    in_order(&trace, milestones)?;

    let t = &result.transcript;
    ensure(t.text() == SMITH_TRANSCRIPT, || format!("transcript differs:\n{}", t.text()))?;
    let informs: Vec<_> = t.acts.iter().filter(|a| a.kind == ActKind::Inform).collect();
    ensure(informs[0].evidence == vec![postponed.clone()], || "utterance (4) should rest on the postponement".into())?;
    ensure(t.outcome == DialogueOutcome::Agreement && t.depth == 1, || format!("{:?} at depth {}", t.outcome, t.depth))?;
    ensure(t.ratified == Some(p("teaches(smith, ai)")), || format!("ratified {:?}", t.ratified))?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("{} trace records, 4 acts, {elapsed:.1?}", trace.records.len()))
}

/// The chosen focus for a bundled fixture's opening proposal.
fn opening_focus(name: &str) -> Result<(FocusStep, BTreeSet<Proposition>), String> {
    let s = bundled(name);
    let mut trace = Trace::new();
    s.run(&s.config, &mut trace).map_err(|e| e.to_string())?;
    let root = s.proposal.prop.clone();
    trace
        .records
        .iter()
        .find_map(|r| match &r.event {
            Event::Foci(FociEvent::Step { node, step, focus, .. }) if *node == root => {
                Some((*step, focus.clone().unwrap_or_default().into_iter().collect()))
            }
            _ => None,
        })
        .ok_or_else(|| format!("{name}: no focus was selected for the root"))
}

pub fn focus_branches() -> Check {
    // Hand-traced expectations; see the fixture tests for the arithmetic.
    let cases = [
        ("evidence", FocusStep::Evidence, vec!["has_time(u)", "likes_theory(u)"]),
        ("visit", FocusStep::Belief, vec!["can_enroll(cs580)"]),
        ("both", FocusStep::Both, vec!["graduate(u, spring)", "offered(cs601, fall)"]),
    ];
    for (name, want_step, want_focus) in cases {
        let (step, focus) = opening_focus(name)?;
        let want: BTreeSet<Proposition> = props(&want_focus).into_iter().collect();
        ensure(step == want_step && focus == want, || {
            format!("{name}: got {step:?} {focus:?}, expected {want_step:?} {want:?}")
        })?;
    }
    Ok("evidence-only, belief-only and both branches match".into())
}

pub fn minset_oracle(cases: usize) -> Check {
    let started = Instant::now();
    let mut rng = rng(0x0dd5);
    let mut solvable = 0;
    for i in 0..cases {
        let case = MinSetCase::random(&mut rng);
        let (want, got) = (case.oracle(), case.engine());
        ensure(want == got, || format!("case {i}: engine {got:?}, oracle {want:?}\n{case:?}"))?;
        solvable += want.is_some() as usize;
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("{cases}/{cases} agree ({solvable} with a flipping set), {elapsed:.1?}"))
}

pub fn revision_properties() -> Check {
    let target = p("t");
    for b in 1..=3u32 {
        for r in 1..=3u32 {
            let piece = EvidencePiece::new(
                Belief::new(p("e"), Endorsement::record(level_of(b))),
                Belief::new(p("supports(e, t)"), Endorsement::record(level_of(r))),
                &target,
            )
            .map_err(|e| e.to_string())?;
            let got = piece_strength(&piece).map_err(|e| e.to_string())?.rank();
            ensure(got == b.min(r), || format!("weakest link ({b}, {r}) gave {got}"))?;
        }
    }

    let mut rng = rng(0x4e71);
    for _ in 0..10_000 {
        let (s, a, tau) = (rng.gen_range(0..40u32), rng.gen_range(0..40u32), rng.gen_range(1..8u32));
        let d = |s, a| outcome_name(Verdict::decide(s, a, tau, false).outcome);
        ensure(d(s, a) == decide(s, a, tau, false), || format!("rule differs at ({s}, {a}, {tau})"))?;
        ensure(favour(&d(s + 1, a)) >= favour(&d(s, a)), || format!("support not monotone at ({s}, {a}, {tau})"))?;
        ensure(favour(&d(s, a + 1)) <= favour(&d(s, a)), || format!("attack not monotone at ({s}, {a}, {tau})"))?;
        let mirrored = match d(a, s).as_str() {
            "accept" => "reject".to_string(),
            "reject" => "accept".to_string(),
            o => o.to_string(),
        };
        ensure(d(s, a) == mirrored, || format!("not symmetric at ({s}, {a}, {tau})"))?;
    }

    let atoms = ["x", "y", "z", "w"];
    let speaker = Endorsement::asserted("B", Expertise::Expert);
    let mut steps = 0;
    for _ in 0..500 {
        let mut beliefs = BeliefSet::new();
        for _ in 0..20 {
            let mut t = p(atoms[rng.gen_range(0..atoms.len())]);
            if rng.gen_bool(0.5) {
                t = t.negate();
            }
            let verdict = Verdict::decide(rng.gen_range(0..6), rng.gen_range(0..6), 1, false);
            if verdict.outcome == Outcome::Uncertain {
                continue;
            }
            let evidence = [
                parley::beliefs::Evidence::Assertion(Belief::new(t.clone(), speaker.clone())),
                parley::beliefs::Evidence::Assertion(Belief::new(t.negate(), speaker.clone())),
            ];
            beliefs = assimilate(&beliefs, &verdict, &t, &evidence).map_err(|e| e.to_string())?;
            let keys: BTreeSet<_> = beliefs.iter().map(|b| b.prop.atom_key()).collect();
            ensure(keys.len() == beliefs.len(), || format!("contradiction after assimilating {t}"))?;
            steps += 1;
        }
    }
    Ok(format!("9 rank pairs, 10000 score triples, {steps} assimilations; no violations"))
}

pub fn termination_determinism(scenarios: u64) -> Check {
    let mut outcomes: BTreeMap<&str, usize> = BTreeMap::new();
    let mut max_rounds = 0;
    for seed in 0..scenarios {
        let s = random_scenario(seed, 20);
        let n = s.belief_count();
        ensure(n <= 20, || format!("seed {seed}: generator produced {n} beliefs"))?;
        let mut runs = Vec::new();
        for _ in 0..2 {
            let mut trace = Trace::new();
            let r = s.run(&s.config, &mut trace).map_err(|e| format!("seed {seed}: {e}"))?;
            runs.push((r.transcript.text(), trace.to_jsonl(), r.transcript));
        }
        let t = &runs[0].2;
        ensure(runs[0].0 == runs[1].0 && runs[0].1 == runs[1].1, || format!("seed {seed}: runs differ"))?;
        ensure(t.rounds <= n, || format!("seed {seed}: {} rounds with {n} beliefs", t.rounds))?;
        max_rounds = max_rounds.max(t.rounds);
        *outcomes
            .entry(match t.outcome {
                DialogueOutcome::Agreement => "agreement",
                DialogueOutcome::Concession { .. } => "concession",
                DialogueOutcome::UnresolvedNeedsSharing => "unresolved",
            })
            .or_default() += 1;
    }
    Ok(format!("{scenarios} scenarios halted within N rounds (max {max_rounds}), byte-identical reruns; {outcomes:?}"))
}

pub const NEST_DEPTH: usize = 2;

pub fn nest_depth() -> Check {
    let s = bundled("nest");
    let mut trace = Trace::new();
    let r = s.run(&s.config, &mut trace).map_err(|e| e.to_string())?;
    let t = &r.transcript;
    ensure(t.depth == NEST_DEPTH, || format!("depth {}, expected {NEST_DEPTH}", t.depth))?;
    let nested = trace
        .records
        .iter()
        .any(|r| matches!(&r.event, Event::Recipe(RecipeEvent::Evaluate { depth: 2, evaluator, .. }) if evaluator == "S"));
    ensure(nested, || "no evaluation at depth 2".into())?;
    ensure(
        matches!(t.outcome, DialogueOutcome::Agreement | DialogueOutcome::Concession { .. }),
        || format!("outcome {:?}", t.outcome),
    )?;
    Ok(format!("depth {}, {:?}, {} rounds", t.depth, t.outcome, t.rounds))
}

pub fn tie_boundary() -> Check {
    let s = bundled("tie");
    let mut trace = Trace::new();
    let r = s.run(&s.config, &mut trace).map_err(|e| e.to_string())?;
    let t = &r.transcript;
    let root_verdict = trace.records.iter().find_map(|r| match &r.event {
        Event::Revise { target, verdict, .. } if *target == s.proposal.prop => Some(*verdict),
        _ => None,
    });
    let v = root_verdict.ok_or("root never revised")?;
    ensure(v.support_score == v.attack_score, || format!("not a tie: {v:?}"))?;
    ensure(t.outcome == DialogueOutcome::UnresolvedNeedsSharing, || format!("outcome {:?}", t.outcome))?;
    ensure(t.outcome.exit_code() == 2, || format!("exit {}", t.outcome.exit_code()))?;
    Ok(format!("{} vs {} at the root, unresolved, exit 2", v.support_score, v.attack_score))
}
