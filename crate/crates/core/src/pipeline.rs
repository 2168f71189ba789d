//! Approval-gated command dispatcher.
//!
//! [`PipelineState::step`] is a pure transition: it consumes one
//! [`PipelineInput`] and returns the [`Effect`]s the host must carry out.
//! Gesture events go through the segmenter and the syntax checker; validated
//! commands queue up until the mission is closed and the diver approves it.
//! `OUT_OF_AIR` wins over everything and only `Reset` leaves the emergency.

use crate::alphabet::{GestureToken, ParsedCommand};
use crate::segmenter::{ParserEvent, SegmenterState, Terminator};
use crate::syntax::{check, SyntaxError};
use crate::wire::MessageKind;

/// Simulation time in ticks.
pub type Tick = u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PipelinePhase {
    Idle,
    Composing,
    AwaitingApproval,
    Executing,
    Emergency,
}

impl PipelinePhase {
    pub fn as_str(self) -> &'static str {
        match self {
            PipelinePhase::Idle => "IDLE",
            PipelinePhase::Composing => "COMPOSING",
            PipelinePhase::AwaitingApproval => "AWAITING_APPROVAL",
            PipelinePhase::Executing => "EXECUTING",
            PipelinePhase::Emergency => "EMERGENCY",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PipelineInput {
    GestureEvent { token: GestureToken },
    Approve,
    Abort,
    Reset,
    SimDone { command_index: usize },
    SimMissionComplete,
    /// The simulator refused the mission it was handed.
    SimRejected { command_index: usize, reason: String },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Effect {
    Feedback { kind: MessageKind, detail: String },
    StartMission { commands: Vec<ParsedCommand> },
    AbortMission,
    EmergencySurface,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandStatus {
    Queued,
    Running,
    Done,
}

impl CommandStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandStatus::Queued => "queued",
            CommandStatus::Running => "running",
            CommandStatus::Done => "done",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoggedError {
    pub tick: Tick,
    pub error: SyntaxError,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PipelineStats {
    pub commands_validated: u64,
    pub commands_rejected: u64,
    pub missions_completed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineState {
    phase: PipelinePhase,
    segmenter: SegmenterState,
    queue: Vec<ParsedCommand>,
    executing_index: Option<usize>,
    completed: usize,
    error_log: Vec<LoggedError>,
    stats: PipelineStats,
}

impl Default for PipelineState {
    fn default() -> Self {
        Self::new()
    }
}

fn feedback(effects: &mut Vec<Effect>, kind: MessageKind, detail: impl Into<String>) {
    effects.push(Effect::Feedback {
        kind,
        detail: detail.into(),
    });
}

impl PipelineState {
    pub fn new() -> Self {
        Self {
            phase: PipelinePhase::Idle,
            segmenter: SegmenterState::new(),
            queue: Vec::new(),
            executing_index: None,
            completed: 0,
            error_log: Vec::new(),
            stats: PipelineStats::default(),
        }
    }

    pub fn phase(&self) -> PipelinePhase {
        self.phase
    }

    pub fn queue(&self) -> &[ParsedCommand] {
        &self.queue
    }

    pub fn executing_index(&self) -> Option<usize> {
        self.executing_index
    }

    pub fn pending_tokens(&self) -> &[GestureToken] {
        self.segmenter.buffer()
    }

    pub fn error_log(&self) -> &[LoggedError] {
        &self.error_log
    }

    pub fn stats(&self) -> PipelineStats {
        self.stats
    }

    pub fn command_statuses(&self) -> impl Iterator<Item = (usize, &ParsedCommand, CommandStatus)> {
        self.queue.iter().enumerate().map(move |(i, cmd)| {
            let status = if i < self.completed {
                CommandStatus::Done
            } else if self.executing_index == Some(i) {
                CommandStatus::Running
            } else {
                CommandStatus::Queued
            };
            (i, cmd, status)
        })
    }

    fn clear_mission(&mut self) {
        self.segmenter.reset();
        self.queue.clear();
        self.executing_index = None;
        self.completed = 0;
        self.phase = PipelinePhase::Idle;
    }

    pub fn step(&mut self, now: Tick, input: PipelineInput) -> Vec<Effect> {
        let mut fx = Vec::new();

        if self.phase == PipelinePhase::Emergency {
            match input {
                PipelineInput::Reset => {
                    self.clear_mission();
                    feedback(&mut fx, MessageKind::State, "emergency cleared, session reset");
                }
                PipelineInput::SimDone { .. }
                | PipelineInput::SimMissionComplete
                | PipelineInput::SimRejected { .. } => {}
                _ => feedback(
                    &mut fx,
                    MessageKind::Emergency,
                    "emergency in progress, reset required",
                ),
            }
            return fx;
        }

        match input {
            PipelineInput::GestureEvent {
                token: GestureToken::OutOfAir,
            } => {
                self.clear_mission();
                self.phase = PipelinePhase::Emergency;
                fx.push(Effect::EmergencySurface);
                feedback(&mut fx, MessageKind::Emergency, "out of air: surfacing");
            }
            PipelineInput::GestureEvent { token } => self.on_gesture(now, token, &mut fx),
            PipelineInput::Approve => {
                if self.phase == PipelinePhase::AwaitingApproval {
                    self.phase = PipelinePhase::Executing;
                    self.executing_index = Some(0);
                    self.completed = 0;
                    fx.push(Effect::StartMission {
                        commands: self.queue.clone(),
                    });
                    feedback(
                        &mut fx,
                        MessageKind::Progress,
                        format!("mission approved, executing {} command(s)", self.queue.len()),
                    );
                } else {
                    feedback(
                        &mut fx,
                        MessageKind::Warning,
                        format!("nothing to approve in phase {}", self.phase.as_str()),
                    );
                }
            }
            PipelineInput::Abort => {
                let detail = match self.phase {
                    PipelinePhase::Idle => "nothing to abort",
                    PipelinePhase::Executing => {
                        fx.push(Effect::AbortMission);
                        "mission aborted"
                    }
                    _ => "mission discarded",
                };
                self.clear_mission();
                feedback(&mut fx, MessageKind::State, detail);
            }
            PipelineInput::Reset => {
                if self.phase == PipelinePhase::Executing {
                    fx.push(Effect::AbortMission);
                }
                self.clear_mission();
                feedback(&mut fx, MessageKind::State, "session reset");
            }
            PipelineInput::SimDone { command_index } => {
                if self.phase == PipelinePhase::Executing
                    && self.executing_index == Some(command_index)
                {
                    self.completed = command_index + 1;
                    if command_index + 1 < self.queue.len() {
                        self.executing_index = Some(command_index + 1);
                    }
                    feedback(
                        &mut fx,
                        MessageKind::Progress,
                        format!(
                            "command {} done: {}",
                            command_index, self.queue[command_index]
                        ),
                    );
                } else {
                    feedback(
                        &mut fx,
                        MessageKind::Warning,
                        format!("unexpected completion report for command {command_index}"),
                    );
                }
            }
            PipelineInput::SimMissionComplete => {
                if self.phase == PipelinePhase::Executing {
                    self.clear_mission();
                    self.stats.missions_completed += 1;
                    feedback(&mut fx, MessageKind::State, "mission complete");
                } else {
                    feedback(&mut fx, MessageKind::Warning, "unexpected mission completion");
                }
            }
            PipelineInput::SimRejected {
                command_index,
                reason,
            } => {
                if self.phase == PipelinePhase::Executing {
                    self.clear_mission();
                    feedback(
                        &mut fx,
                        MessageKind::Error,
                        format!("mission rejected by vehicle at command {command_index}: {reason}"),
                    );
                } else {
                    feedback(&mut fx, MessageKind::Warning, "unexpected mission rejection");
                }
            }
        }
        fx
    }

    fn on_gesture(&mut self, now: Tick, token: GestureToken, fx: &mut Vec<Effect>) {
        if matches!(
            self.phase,
            PipelinePhase::AwaitingApproval | PipelinePhase::Executing
        ) {
            feedback(
                fx,
                MessageKind::Warning,
                format!("gesture {token} ignored in phase {}", self.phase.as_str()),
            );
            return;
        }
        let events = self.segmenter.feed(token);
        if self.segmenter.is_open() {
            self.phase = PipelinePhase::Composing;
        }
        if events.is_empty() {
            feedback(fx, MessageKind::State, format!("gesture {token}"));
            return;
        }
        for event in events {
            match event {
                ParserEvent::PhraseComplete { tokens, terminator } => {
                    match check(&tokens) {
                        Ok(cmd) => {
                            self.stats.commands_validated += 1;
                            feedback(fx, MessageKind::State, format!("command accepted: {cmd}"));
                            self.queue.push(cmd);
                        }
                        Err(error) => {
                            self.stats.commands_rejected += 1;
                            feedback(fx, MessageKind::Warning, format!("command rejected: {error}"));
                            self.error_log.push(LoggedError { tick: now, error });
                        }
                    }
                    if terminator == Terminator::EndMission {
                        self.close_mission(fx);
                    }
                }
                ParserEvent::EmptyPhrase { terminator } => {
                    feedback(fx, MessageKind::Warning, "empty command");
                    if terminator == Terminator::EndMission {
                        self.close_mission(fx);
                    }
                }
                ParserEvent::StrayToken { token } => {
                    feedback(
                        fx,
                        MessageKind::Warning,
                        format!("gesture {token} outside a mission ignored"),
                    );
                }
                // OUT_OF_AIR is intercepted before reaching the segmenter.
                ParserEvent::Emergency => unreachable!("emergency handled in step"),
            }
        }
    }

    fn close_mission(&mut self, fx: &mut Vec<Effect>) {
        if self.queue.is_empty() {
            self.clear_mission();
            feedback(fx, MessageKind::Warning, "mission has no valid commands");
        } else {
            self.phase = PipelinePhase::AwaitingApproval;
            let listing: Vec<String> = self.queue.iter().map(|c| c.to_string()).collect();
            feedback(
                fx,
                MessageKind::ApprovalRequest,
                format!("approve mission: {}", listing.join("; ")),
            );
        }
    }
}

/// Functional form of [`PipelineState::step`].
pub fn step(mut state: PipelineState, now: Tick, input: PipelineInput) -> (PipelineState, Vec<Effect>) {
    let effects = state.step(now, input);
    (state, effects)
}
