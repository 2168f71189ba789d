//! Gesture-driven mission control for an autonomous underwater vehicle.
//!
//! A diver signs commands in a small gesture language; recognised tokens are
//! segmented into phrases, checked against the grammar, queued, shown to a
//! supervisor on a tablet and dispatched to the vehicle only after explicit
//! approval. `OUT_OF_AIR` overrides everything and surfaces the vehicle.
//!
//! The pieces are pure where they can be ([`segmenter`], [`syntax`],
//! [`pipeline`], [`sim`], [`channel`], [`ncmf`]); [`session`] wires them
//! together and [`server`] puts a WebSocket in front of a session.

pub mod alphabet;
pub mod channel;
pub mod config;
pub mod corpus;
pub mod ncmf;
pub mod pipeline;
pub mod scenario;
pub mod segmenter;
pub mod server;
pub mod session;
pub mod sim;
pub mod syntax;
pub mod wire;

pub use alphabet::{
    number_from_digits, parse_token_file, AlphabetError, CarryObject, GestureToken, NumberLiteral,
    ParsedCommand, Place, ALPHABET_SIZE,
};
pub use config::{Config, ConfigError};
pub use pipeline::{Effect, PipelineInput, PipelinePhase, PipelineState};
pub use scenario::{parse_scenario, ScenarioStep};
pub use segmenter::{ParserEvent, SegmenterState, Terminator};
pub use session::{run_scenario, ScenarioOutcome, Session, SimulationReport};
pub use sim::{AuvState, Simulator};
pub use syntax::{check, serialize, SyntaxError, SyntaxErrorCode};
pub use wire::{FeedbackMessage, MessageKind, TabletAction};
