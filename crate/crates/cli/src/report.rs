//! Verification report:
//! `{"seed", "instances", "all_pass", "checks": [{"check_name", "instance_seed", "values", "pass"}]}`.
//! Non-finite values are written as `null`.

use gabor_tight::verify::{all_pass, CheckOutcome};
use serde_json::{json, Map, Value};

pub fn render(seed: u64, instances: usize, outcomes: &[CheckOutcome]) -> String {
    let checks: Vec<Value> = outcomes
        .iter()
        .map(|c| {
            let values: Map<String, Value> = c
                .values
                .iter()
                .map(|(k, v)| (k.to_string(), Value::from(*v)))
                .collect();
            json!({
                "check_name": c.name,
                "instance_seed": c.seed,
                "values": values,
                "pass": c.pass,
            })
        })
        .collect();
    let report = json!({
        "seed": seed,
        "instances": instances,
        "all_pass": all_pass(outcomes),
        "checks": checks,
    });
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    text
}
