//! The host around the pure pieces: wires the debouncer, the pipeline and the
//! simulator together, stamps outgoing messages, and runs scripted scenarios
//! offline.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::alphabet::GestureToken;
use crate::channel::{
    corrupt, event_error_rate, render_script, ChannelError, Debouncer, FrameObservation,
};
use crate::config::Config;
use crate::pipeline::{Effect, PipelineInput, PipelinePhase, PipelineState, Tick};
use crate::scenario::ScenarioStep;
use crate::sim::{AuvState, SimEvent, Simulator};
use crate::wire::{AuvPose, CommandEntry, FeedbackMessage, MessageKind, TabletAction, WireError};

/// Upper bound on ticks spent letting a mission finish after the script ends.
pub const DRAIN_TICK_CAP: u64 = 2_000_000;

impl From<AuvState> for AuvPose {
    fn from(s: AuvState) -> Self {
        AuvPose {
            x_m: s.x_m,
            y_m: s.y_m,
            z_m: s.z_m,
            heading_rad: s.heading_rad,
        }
    }
}

/// A simulator event together with when and where it happened.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceEntry {
    pub tick: Tick,
    pub event: SimEvent,
    pub auv: AuvState,
}

#[derive(Clone, Debug)]
pub struct Session {
    cfg: Config,
    pipeline: PipelineState,
    sim: Simulator,
    debouncer: Debouncer,
    now: Tick,
    seq: u64,
    telemetry_every: u64,
    outbox: Vec<FeedbackMessage>,
    recognized: Vec<GestureToken>,
    trace: Vec<TraceEntry>,
}

impl Session {
    pub fn new(cfg: Config) -> Self {
        Self {
            sim: Simulator::new(cfg.sim.clone()),
            cfg,
            pipeline: PipelineState::new(),
            debouncer: Debouncer::new(),
            now: 0,
            seq: 0,
            telemetry_every: 0,
            outbox: Vec::new(),
            recognized: Vec::new(),
            trace: Vec::new(),
        }
    }

    /// Emit a `state` message every `every` ticks while executing; 0 disables.
    pub fn with_telemetry(mut self, every: u64) -> Self {
        self.telemetry_every = every;
        self
    }

    pub fn config(&self) -> &Config {
        &self.cfg
    }

    pub fn pipeline(&self) -> &PipelineState {
        &self.pipeline
    }

    pub fn sim(&self) -> &Simulator {
        &self.sim
    }

    pub fn now(&self) -> Tick {
        self.now
    }

    /// Tokens the debouncer produced so far.
    pub fn recognized(&self) -> &[GestureToken] {
        &self.recognized
    }

    pub fn trace(&self) -> &[TraceEntry] {
        &self.trace
    }

    /// Mission still in flight, either in the pipeline or in the vehicle.
    pub fn is_busy(&self) -> bool {
        self.pipeline.phase() == PipelinePhase::Executing || !self.sim.is_idle()
    }

    pub fn submit(&mut self, action: TabletAction) {
        let input = match action {
            TabletAction::Gesture { token } => PipelineInput::GestureEvent { token },
            TabletAction::Approve => PipelineInput::Approve,
            TabletAction::Abort => PipelineInput::Abort,
            TabletAction::Reset => PipelineInput::Reset,
        };
        self.apply(input);
    }

    /// Reports a frame the tablet sent that could not be decoded.
    pub fn reject_input(&mut self, err: &WireError) {
        self.emit(MessageKind::Error, format!("{}: {err}", err.code()));
    }

    pub fn push_frame(&mut self, frame: FrameObservation) {
        if let Some(token) = self.debouncer.push(frame, &self.cfg.debounce) {
            self.recognized.push(token);
            self.apply(PipelineInput::GestureEvent { token });
        }
    }

    /// Advances the vehicle by one `dt_s` step.
    pub fn tick(&mut self) {
        self.now += 1;
        for event in self.sim.tick(self.cfg.sim.dt_s) {
            self.trace.push(TraceEntry {
                tick: self.now,
                event,
                auv: self.sim.state(),
            });
            match event {
                SimEvent::CommandDone { command_index } => {
                    self.apply(PipelineInput::SimDone { command_index })
                }
                SimEvent::MissionComplete => self.apply(PipelineInput::SimMissionComplete),
                SimEvent::WaypointReached { index, .. } => {
                    self.emit(MessageKind::Progress, format!("waypoint {index} reached"))
                }
                SimEvent::PhotoTaken { pose } => self.emit(
                    MessageKind::Progress,
                    format!("photo taken at ({:.2}, {:.2}, {:.2})", pose.x_m, pose.y_m, pose.z_m),
                ),
                SimEvent::Surfaced => {
                    let kind = if self.pipeline.phase() == PipelinePhase::Emergency {
                        MessageKind::Emergency
                    } else {
                        MessageKind::Progress
                    };
                    self.emit(kind, "vehicle at surface")
                }
            }
        }
        if self.telemetry_every > 0
            && self.now.is_multiple_of(self.telemetry_every)
            && self.pipeline.phase() == PipelinePhase::Executing
        {
            self.emit(MessageKind::State, "telemetry");
        }
    }

    pub fn drain_outbox(&mut self) -> Vec<FeedbackMessage> {
        std::mem::take(&mut self.outbox)
    }

    /// Current state, stamped with the last issued `seq` so a fresh client
    /// can discard anything it already reflects.
    pub fn snapshot(&self) -> FeedbackMessage {
        self.message(MessageKind::State, "snapshot".into(), self.seq)
    }

    fn apply(&mut self, input: PipelineInput) {
        let mut pending = VecDeque::from([input]);
        while let Some(input) = pending.pop_front() {
            for effect in self.pipeline.step(self.now, input) {
                match effect {
                    Effect::Feedback { kind, detail } => self.emit(kind, detail),
                    Effect::StartMission { commands } => {
                        if let Err(r) = self.sim.load_mission(&commands) {
                            pending.push_back(PipelineInput::SimRejected {
                                command_index: r.command_index,
                                reason: r.error.to_string(),
                            });
                        }
                    }
                    Effect::AbortMission => {
                        self.sim.abort();
                    }
                    Effect::EmergencySurface => {
                        self.sim.emergency_surface();
                    }
                }
            }
        }
    }

    fn emit(&mut self, kind: MessageKind, detail: impl Into<String>) {
        self.seq += 1;
        let msg = self.message(kind, detail.into(), self.seq);
        self.outbox.push(msg);
    }

    fn message(&self, kind: MessageKind, detail: String, seq: u64) -> FeedbackMessage {
        FeedbackMessage {
            kind,
            phase: self.pipeline.phase().as_str().to_owned(),
            pending_tokens: self
                .pipeline
                .pending_tokens()
                .iter()
                .map(|t| t.mnemonic().to_owned())
                .collect(),
            commands: self
                .pipeline
                .command_statuses()
                .map(|(index, cmd, status)| CommandEntry {
                    index,
                    text: cmd.to_string(),
                    status: status.as_str().to_owned(),
                })
                .collect(),
            auv: self.sim.state().into(),
            detail,
            seq,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub gestures_sent: usize,
    pub events_recognized: usize,
    pub event_error_rate: f64,
    pub commands_validated: u64,
    pub commands_rejected: u64,
    pub missions_completed: u64,
    pub ticks: u64,
    pub final_auv: AuvPose,
}

#[derive(Clone, Debug)]
pub struct ScenarioOutcome {
    pub report: SimulationReport,
    pub messages: Vec<FeedbackMessage>,
    pub trace: Vec<TraceEntry>,
    pub truth: Vec<GestureToken>,
    pub recognized: Vec<GestureToken>,
}

/// Renders the script into camera frames, runs them through the configured
/// noise model, and feeds them one per tick. Tablet actions fire just before
/// the frame that follows them in the script. Once the script is exhausted
/// the vehicle is given up to [`DRAIN_TICK_CAP`] extra ticks to finish.
pub fn run_scenario(steps: &[ScenarioStep], cfg: &Config) -> Result<ScenarioOutcome, ChannelError> {
    let hold = cfg.debounce.frames_per_gesture();
    let gap = cfg.debounce.gap_frames();
    let mut frames = Vec::new();
    let mut actions: Vec<(usize, TabletAction)> = Vec::new();
    let mut truth = Vec::new();
    for step in steps {
        match *step {
            ScenarioStep::Gesture(t) => {
                frames.extend(render_script(&[t], hold, gap));
                truth.push(t);
            }
            ScenarioStep::Action(a) => actions.push((frames.len(), a)),
            ScenarioStep::Wait(n) => {
                frames.extend(std::iter::repeat_n(FrameObservation::no_hand(), n as usize))
            }
        }
    }
    let frames = corrupt(&frames, &cfg.noise_model()?)?;

    let mut session = Session::new(cfg.clone());
    let mut messages = Vec::new();
    let mut actions = actions.into_iter().peekable();
    for (i, frame) in frames.into_iter().enumerate() {
        while let Some((_, a)) = actions.next_if(|(at, _)| *at == i) {
            session.submit(a);
        }
        session.push_frame(frame);
        session.tick();
        messages.append(&mut session.drain_outbox());
    }
    for (_, a) in actions {
        session.submit(a);
    }
    let mut extra = 0;
    while session.is_busy() && extra < DRAIN_TICK_CAP {
        session.tick();
        extra += 1;
    }
    messages.append(&mut session.drain_outbox());

    let stats = session.pipeline.stats();
    let recognized = session.recognized.clone();
    let report = SimulationReport {
        gestures_sent: truth.len(),
        events_recognized: recognized.len(),
        event_error_rate: event_error_rate(&truth, &recognized),
        commands_validated: stats.commands_validated,
        commands_rejected: stats.commands_rejected,
        missions_completed: stats.missions_completed,
        ticks: session.now,
        final_auv: session.sim.state().into(),
    };
    Ok(ScenarioOutcome {
        report,
        messages,
        trace: session.trace,
        truth,
        recognized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::parse_scenario;

    fn clean() -> Config {
        let mut cfg = Config::default();
        cfg.noise.dropout_p = 0.0;
        cfg
    }

    #[test]
    fn go_down_end_to_end() {
        let steps = parse_scenario("A go_down 1 ∀ approve").unwrap();
        let out = run_scenario(&steps, &clean()).unwrap();
        assert_eq!(out.recognized, out.truth);
        assert_eq!(out.report.missions_completed, 1);
        assert!((out.report.final_auv.z_m - 3.0).abs() <= 0.05);
        let last = out.messages.last().unwrap();
        assert_eq!(last.phase, "IDLE");
        // seq strictly increasing from 1
        for (i, m) in out.messages.iter().enumerate() {
            assert_eq!(m.seq, i as u64 + 1);
        }
    }

    #[test]
    fn approval_gate_holds_without_approve() {
        let steps = parse_scenario("A go_down 1 ∀ wait 200").unwrap();
        let out = run_scenario(&steps, &clean()).unwrap();
        assert_eq!(out.report.missions_completed, 0);
        assert_eq!(out.report.final_auv.z_m, 2.0);
        assert_eq!(out.messages.last().unwrap().phase, "AWAITING_APPROVAL");
    }

    #[test]
    fn rejected_mission_returns_to_idle() {
        // 2 m below the start is fine, 30 m is below the seafloor
        let steps = parse_scenario("A go_down 3 0 ∀ approve").unwrap();
        let out = run_scenario(&steps, &clean()).unwrap();
        assert_eq!(out.report.missions_completed, 0);
        let last = out.messages.last().unwrap();
        assert_eq!(last.kind, MessageKind::Error);
        assert_eq!(last.phase, "IDLE");
    }

    #[test]
    fn out_of_air_surfaces_and_latches() {
        let steps = parse_scenario("out_of_air photo approve").unwrap();
        let out = run_scenario(&steps, &clean()).unwrap();
        assert_eq!(out.report.final_auv.z_m, 0.0);
        assert!(out.messages.iter().skip(1).all(|m| m.phase == "EMERGENCY"));
        assert!(out.trace.iter().any(|t| t.event == SimEvent::Surfaced));
    }

    #[test]
    fn malformed_input_is_reported() {
        let mut s = Session::new(Config::default());
        s.reject_input(&WireError::UnknownType("swim".into()));
        let out = s.drain_outbox();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].kind, MessageKind::Error);
        assert!(out[0].detail.starts_with("UNKNOWN_TYPE"));
        assert_eq!(s.snapshot().seq, 1);
    }

    #[test]
    fn telemetry_only_while_executing() {
        let mut s = Session::new(clean()).with_telemetry(10);
        for _ in 0..30 {
            s.tick();
        }
        assert!(s.drain_outbox().is_empty());
        for t in [GestureToken::StartComm, GestureToken::GoDown, GestureToken::Digit5, GestureToken::EndComm] {
            s.submit(TabletAction::Gesture { token: t });
        }
        s.submit(TabletAction::Approve);
        s.drain_outbox();
        for _ in 0..30 {
            s.tick();
        }
        let telemetry = s.drain_outbox().iter().filter(|m| m.detail == "telemetry").count();
        assert_eq!(telemetry, 3);
    }
}
