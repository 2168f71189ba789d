// Replay a scripted dive through the whole pipeline, offline.

use caddy::{parse_scenario, run_scenario, Config, SimulationReport};

const SCENARIO: &str = include_str!("../scenarios/bridge_inspection.txt");

pub fn run_example() -> anyhow::Result<SimulationReport> {
    let mut cfg = Config::default();
    cfg.noise.dropout_p = 0.0;
    let out = run_scenario(&parse_scenario(SCENARIO)?, &cfg)?;
    for m in &out.messages {
        if m.kind != caddy::MessageKind::State || m.detail != "telemetry" {
            println!("#{:<4} {:<18} {:<16?} {}", m.seq, m.phase, m.kind, m.detail);
        }
    }
    println!("{}", serde_json::to_string_pretty(&out.report)?);
    Ok(out.report)
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example().map(drop)
}
