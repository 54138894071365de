//! Browser bindings: run a scenario, show how the evaluator judges the
//! opening proposal, and show where it would aim its correction. Every
//! export takes the scenario text and a threshold and returns JSON.

use parley::evaluation::{evaluate_proposal, record_proposal, EvaluatedNode};
use parley::focus::{select_focus, FociNode};
use parley::negotiation::DialogueOutcome;
use parley::trace::{NullTrace, Trace};
use parley::{parse_scenario, Scenario};
use serde::Serialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

pub const BUNDLED: [(&str, &str); 6] = [
    ("smith", include_str!("../../core/scenarios/smith.scenario")),
    ("visit", include_str!("../../core/scenarios/visit.scenario")),
    ("evidence", include_str!("../../core/scenarios/evidence.scenario")),
    ("both", include_str!("../../core/scenarios/both.scenario")),
    ("nest", include_str!("../../core/scenarios/nest.scenario")),
    ("tie", include_str!("../../core/scenarios/tie.scenario")),
];

fn load(text: &str, tau: u32) -> Result<Scenario, String> {
    let mut scenario = parse_scenario(text).map_err(|e| e.to_string())?;
    if tau == 0 {
        return Err("the threshold must be at least 1".into());
    }
    scenario.config.tau = tau;
    Ok(scenario)
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable")
}

fn outcome_label(outcome: &DialogueOutcome) -> String {
    match outcome {
        DialogueOutcome::Agreement => "agreement".into(),
        DialogueOutcome::Concession { agent } => format!("concession by {agent}"),
        DialogueOutcome::UnresolvedNeedsSharing => "unresolved: information sharing needed".into(),
    }
}

pub fn run_json(text: &str, tau: u32) -> Result<String, String> {
    let scenario = load(text, tau)?;
    let mut trace = Trace::new();
    let result = scenario.run(&scenario.config, &mut trace).map_err(|e| e.to_string())?;
    let t = &result.transcript;
    Ok(to_json(&json!({
        "lines": t.lines(),
        "outcome": outcome_label(&t.outcome),
        "depth": t.depth,
        "rounds": t.rounds,
        "ratified": t.ratified.as_ref().map(ToString::to_string),
        "trace": trace.records,
    })))
}

fn evaluated_json(node: &EvaluatedNode) -> Value {
    json!({
        "prop": node.prop.to_string(),
        "verdict": node.belief_verdict,
        "relation": node.relation.as_ref().map(ToString::to_string),
        "relationVerdict": node.relation_verdict,
        "children": node.children.iter().map(evaluated_json).collect::<Vec<_>>(),
    })
}

fn opening_evaluation(scenario: &Scenario) -> Result<(parley::negotiation::Agent, EvaluatedNode), String> {
    let [proposer, mut evaluator] = scenario.agents().map_err(|e| e.to_string())?;
    let tree = scenario.proposal_tree();
    let speaker = proposer.speaker();
    evaluator.kb.user_model = record_proposal(&evaluator.kb.user_model, &speaker, &tree);
    let evaluated = evaluate_proposal(&evaluator.kb, &evaluator.id, &speaker, &tree, scenario.config.tau, &mut NullTrace)
        .map_err(|e| e.to_string())?;
    Ok((evaluator, evaluated))
}

/// The second agent's verdicts on the opening proposal.
pub fn evaluate_json(text: &str, tau: u32) -> Result<String, String> {
    let scenario = load(text, tau)?;
    let (_, evaluated) = opening_evaluation(&scenario)?;
    Ok(to_json(&evaluated_json(&evaluated)))
}

fn foci_json(node: &FociNode) -> Value {
    let list = |f: &Option<std::collections::BTreeSet<parley::Proposition>>| {
        f.as_ref().map(|s| s.iter().map(ToString::to_string).collect::<Vec<_>>())
    };
    json!({
        "prop": node.prop().to_string(),
        "step": node.step,
        "focus": list(&node.focus),
        "relationFocus": list(&node.relation_focus),
        "children": node.children.iter().map(foci_json).collect::<Vec<_>>(),
    })
}

/// The candidate foci tree and chosen focus for the opening proposal, or
/// `null` when the evaluator accepts it.
pub fn focus_json(text: &str, tau: u32) -> Result<String, String> {
    let scenario = load(text, tau)?;
    let (evaluator, evaluated) = opening_evaluation(&scenario)?;
    if !evaluated.belief_verdict.outcome.is_flip() {
        return Ok("null".into());
    }
    let foci = select_focus(&evaluated, &evaluator.kb.user_model, scenario.config.tau, &mut NullTrace)
        .map_err(|e| e.to_string())?;
    Ok(to_json(&foci_json(&foci)))
}

fn js(result: Result<String, String>) -> Result<String, JsValue> {
    result.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn bundled_scenarios() -> String {
    to_json(&BUNDLED.iter().map(|(name, text)| json!({ "name": name, "text": text })).collect::<Vec<_>>())
}

#[wasm_bindgen]
pub fn run(text: &str, tau: u32) -> Result<String, JsValue> {
    js(run_json(text, tau))
}

#[wasm_bindgen]
pub fn evaluate(text: &str, tau: u32) -> Result<String, JsValue> {
    js(evaluate_json(text, tau))
}

#[wasm_bindgen]
pub fn focus(text: &str, tau: u32) -> Result<String, JsValue> {
    js(focus_json(text, tau))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn smith() -> &'static str {
        BUNDLED[0].1
    }

    #[test]
    fn bundled_all_run() {
        for (name, text) in BUNDLED {
            let out: Value = serde_json::from_str(&run_json(text, 1).unwrap()).unwrap();
            assert!(!out["lines"].as_array().unwrap().is_empty(), "{name}");
        }
    }

    #[test]
    fn smith_focus_is_on_sabbatical() {
        let out: Value = serde_json::from_str(&focus_json(smith(), 1).unwrap()).unwrap();
        assert_eq!(out["step"], "evidence");
        assert_eq!(out["focus"], json!(["on_sabbatical(smith, next_year)"]));
    }

    #[test]
    fn smith_evaluation_rejects_root() {
        let out: Value = serde_json::from_str(&evaluate_json(smith(), 1).unwrap()).unwrap();
        assert_eq!(out["verdict"]["outcome"], "reject");
        assert_eq!(out["children"][0]["relationVerdict"]["outcome"], "accept");
    }

    #[test]
    fn high_threshold_leaves_nothing_to_focus() {
        assert_eq!(focus_json(smith(), 99).unwrap(), "null");
        let out: Value = serde_json::from_str(&run_json(smith(), 99).unwrap()).unwrap();
        assert_eq!(out["outcome"], "unresolved: information sharing needed");
    }

    #[test]
    fn bad_input_is_an_error() {
        assert!(run_json("{", 1).is_err());
        assert!(run_json(smith(), 0).is_err());
    }
}
