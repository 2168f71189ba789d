//! Scenario scripts for the offline runner.
//!
//! A scenario lists what the diver really signs, in order, interleaved with
//! tablet actions. Entries are whitespace separated and may be spread over
//! any number of lines; `#` starts a comment.
//!
//! * a token mnemonic (`go_down`), or the shorthands `A` (start_comm),
//!   `∀` (end_comm) and a single decimal digit (`0`..`9`);
//! * `approve`, `abort`, `reset`;
//! * `wait <ticks>`: nobody signs for that many ticks.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::alphabet::{strip_comment, GestureToken, NumberLiteral};
use crate::syntax::serialize;
use crate::wire::TabletAction;
use crate::ParsedCommand;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScenarioStep {
    Gesture(GestureToken),
    Action(TabletAction),
    Wait(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("scenario line {line}: {message}")]
pub struct ScenarioError {
    pub line: usize,
    pub message: String,
}

fn entry(word: &str) -> Option<ScenarioStep> {
    let token = match word {
        "A" => Some(GestureToken::StartComm),
        "∀" => Some(GestureToken::EndComm),
        w if w.len() == 1 && w.as_bytes()[0].is_ascii_digit() => {
            GestureToken::digit(w.as_bytes()[0] - b'0')
        }
        w => GestureToken::from_mnemonic(w).ok(),
    };
    if let Some(t) = token {
        return Some(ScenarioStep::Gesture(t));
    }
    match word {
        "approve" => Some(ScenarioStep::Action(TabletAction::Approve)),
        "abort" => Some(ScenarioStep::Action(TabletAction::Abort)),
        "reset" => Some(ScenarioStep::Action(TabletAction::Reset)),
        _ => None,
    }
}

pub fn parse_scenario(text: &str) -> Result<Vec<ScenarioStep>, ScenarioError> {
    let mut steps = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let err = |message: String| ScenarioError {
            line: i + 1,
            message,
        };
        let mut words = strip_comment(line).split_whitespace();
        while let Some(word) = words.next() {
            if word == "wait" {
                let ticks = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| err("`wait` needs a tick count".into()))?;
                steps.push(ScenarioStep::Wait(ticks));
                continue;
            }
            steps.push(entry(word).ok_or_else(|| err(format!("unknown entry `{word}`")))?);
        }
    }
    Ok(steps)
}

/// One entry per line, canonical mnemonics. Scenario files have no syntax
/// for a gesture injected from the tablet, so `Action(Gesture)` is written
/// as a signed gesture.
pub fn write_scenario(steps: &[ScenarioStep]) -> String {
    let mut out = String::new();
    for step in steps {
        let _ = match step {
            ScenarioStep::Gesture(t) => writeln!(out, "{t}"),
            ScenarioStep::Action(TabletAction::Approve) => writeln!(out, "approve"),
            ScenarioStep::Action(TabletAction::Abort) => writeln!(out, "abort"),
            ScenarioStep::Action(TabletAction::Reset) => writeln!(out, "reset"),
            ScenarioStep::Action(TabletAction::Gesture { token }) => writeln!(out, "{token}"),
            ScenarioStep::Wait(n) => writeln!(out, "wait {n}"),
        };
    }
    out
}

pub fn gesture_count(steps: &[ScenarioStep]) -> usize {
    steps
        .iter()
        .filter(|s| matches!(s, ScenarioStep::Gesture(_)))
        .count()
}

/// Ticks a mission made of the benchmark's short commands needs at most.
const BENCHMARK_WAIT_TICKS: u64 = 60;

/// A long run of short, valid missions (1–3 commands each, approved and
/// given time to execute) totalling exactly `n_gestures` signed gestures.
/// The last mission is cut off if the budget runs out.
pub fn noise_benchmark(n_gestures: usize, seed: u64) -> Vec<ScenarioStep> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let one = NumberLiteral::new(1).expect("in range");
    let mut steps = Vec::new();
    let mut sent = 0usize;
    while sent < n_gestures {
        let units = rng.random_range(1..=3);
        let mut cmds = Vec::new();
        for _ in 0..units {
            match rng.random_range(0..3) {
                0 => cmds.push(ParsedCommand::Photo { altitude_m: None }),
                1 => cmds.push(ParsedCommand::GoTo {
                    place: crate::Place::Here,
                }),
                // paired so the vehicle's depth does not drift
                _ => {
                    cmds.push(ParsedCommand::GoDown { d_m: one });
                    cmds.push(ParsedCommand::GoUp { d_m: one });
                }
            }
        }
        let n_cmds = cmds.len();
        let mut mission = Vec::new();
        for cmd in &cmds {
            mission.push(GestureToken::StartComm);
            mission.extend(serialize(cmd));
        }
        mission.push(GestureToken::EndComm);
        let take = mission.len().min(n_gestures - sent);
        steps.extend(mission[..take].iter().map(|&t| ScenarioStep::Gesture(t)));
        sent += take;
        if take == mission.len() {
            steps.push(ScenarioStep::Action(TabletAction::Approve));
            steps.push(ScenarioStep::Wait(BENCHMARK_WAIT_TICKS * n_cmds as u64));
            // reset rather than abort: a misread OUT_OF_AIR must not latch
            // the rest of the run in emergency
            steps.push(ScenarioStep::Action(TabletAction::Reset));
        }
    }
    steps
}
