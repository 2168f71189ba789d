//! Tablet wire protocol: one JSON object per text frame or line.
//!
//! Server → tablet frames are [`FeedbackMessage`]s (plus a one-off
//! [`Hello`] on connect). Tablet → server frames are [`TabletAction`]s.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::alphabet::GestureToken;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageKind {
    State,
    Warning,
    ApprovalRequest,
    Progress,
    Error,
    Emergency,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommandEntry {
    pub index: usize,
    pub text: String,
    pub status: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AuvPose {
    pub x_m: f64,
    pub y_m: f64,
    pub z_m: f64,
    pub heading_rad: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeedbackMessage {
    #[serde(rename = "type")]
    pub kind: MessageKind,
    pub phase: String,
    pub pending_tokens: Vec<String>,
    pub commands: Vec<CommandEntry>,
    pub auv: AuvPose,
    pub detail: String,
    pub seq: u64,
}

/// Single-line JSON encoding.
pub fn encode_message(msg: &FeedbackMessage) -> String {
    // serde_json never emits raw newlines in compact mode
    serde_json::to_string(msg).expect("feedback message is always serializable")
}

pub fn decode_message(line: &str) -> Result<FeedbackMessage, WireError> {
    serde_json::from_str(line).map_err(|e| WireError::MalformedJson(e.to_string()))
}

/// First frame sent on every connection; carries the gesture palette.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hello {
    #[serde(rename = "type")]
    pub kind: String,
    pub alphabet: Vec<String>,
}

impl Hello {
    pub fn new() -> Self {
        Self {
            kind: "hello".into(),
            alphabet: GestureToken::ALL
                .iter()
                .map(|t| t.mnemonic().to_owned())
                .collect(),
        }
    }
}

impl Default for Hello {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TabletAction {
    Gesture { token: GestureToken },
    Approve,
    Abort,
    Reset,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum WireError {
    #[error("malformed JSON: {0}")]
    MalformedJson(String),
    #[error("unknown action type `{0}`")]
    UnknownType(String),
    #[error("unknown gesture token `{0}`")]
    UnknownToken(String),
}

impl WireError {
    pub fn code(&self) -> &'static str {
        match self {
            WireError::MalformedJson(_) => "MALFORMED_JSON",
            WireError::UnknownType(_) => "UNKNOWN_TYPE",
            WireError::UnknownToken(_) => "UNKNOWN_TOKEN",
        }
    }
}

pub fn decode_action(line: &str) -> Result<TabletAction, WireError> {
    let value: Value =
        serde_json::from_str(line).map_err(|e| WireError::MalformedJson(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| WireError::MalformedJson("expected a JSON object".into()))?;
    let kind = match obj.get("type") {
        Some(Value::String(s)) => s.as_str(),
        Some(_) => return Err(WireError::MalformedJson("`type` must be a string".into())),
        None => return Err(WireError::MalformedJson("missing `type`".into())),
    };
    match kind {
        "gesture" => match obj.get("token") {
            Some(Value::String(name)) => GestureToken::from_mnemonic(name)
                .map(|token| TabletAction::Gesture { token })
                .map_err(|_| WireError::UnknownToken(name.clone())),
            Some(_) => Err(WireError::MalformedJson("`token` must be a string".into())),
            None => Err(WireError::MalformedJson("gesture requires `token`".into())),
        },
        "approve" => Ok(TabletAction::Approve),
        "abort" => Ok(TabletAction::Abort),
        "reset" => Ok(TabletAction::Reset),
        other => Err(WireError::UnknownType(other.to_owned())),
    }
}

pub fn encode_action(action: &TabletAction) -> String {
    let value = match action {
        TabletAction::Gesture { token } => {
            serde_json::json!({"type": "gesture", "token": token.mnemonic()})
        }
        TabletAction::Approve => serde_json::json!({"type": "approve"}),
        TabletAction::Abort => serde_json::json!({"type": "abort"}),
        TabletAction::Reset => serde_json::json!({"type": "reset"}),
    };
    value.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample(kind: MessageKind, seq: u64) -> FeedbackMessage {
        FeedbackMessage {
            kind,
            phase: "AWAITING_APPROVAL".into(),
            pending_tokens: vec!["go_down".into()],
            commands: vec![CommandEntry {
                index: 0,
                text: "go_down 1 m".into(),
                status: "queued".into(),
            }],
            auv: AuvPose {
                x_m: 0.1,
                y_m: -3.25,
                z_m: 2.0,
                heading_rad: 1.0 / 3.0,
            },
            detail: "approve mission: go_down 1 m\nline two".into(),
            seq,
        }
    }

    #[test]
    fn approval_request_round_trip() {
        let msg = sample(MessageKind::ApprovalRequest, 7);
        let line = encode_message(&msg);
        assert!(!line.contains('\n'));
        assert!(line.contains(r#""type":"approval_request""#));
        assert_eq!(decode_message(&line), Ok(msg));
    }

    #[test]
    fn empty_queue_encodes_empty_array() {
        let mut msg = sample(MessageKind::State, 1);
        msg.commands.clear();
        assert!(encode_message(&msg).contains(r#""commands":[]"#));
    }

    #[test]
    fn decode_action_examples() {
        assert_eq!(
            decode_action(r#"{"type":"gesture","token":"out_of_air"}"#),
            Ok(TabletAction::Gesture {
                token: GestureToken::OutOfAir
            })
        );
        assert_eq!(decode_action(r#"{"type":"approve"}"#), Ok(TabletAction::Approve));
        assert_eq!(
            decode_action(r#"{"type":"gesture","token":"xyz"}"#),
            Err(WireError::UnknownToken("xyz".into()))
        );
        assert_eq!(
            decode_action(r#"{"type":"dance"}"#),
            Err(WireError::UnknownType("dance".into()))
        );
        assert!(matches!(decode_action("{"), Err(WireError::MalformedJson(_))));
        assert!(matches!(decode_action("[]"), Err(WireError::MalformedJson(_))));
        assert!(matches!(
            decode_action(r#"{"type":"gesture"}"#),
            Err(WireError::MalformedJson(_))
        ));
    }

    #[test]
    fn hello_lists_every_token() {
        let hello = Hello::new();
        assert_eq!(hello.alphabet.len(), GestureToken::ALL.len());
        let json = serde_json::to_string(&hello).unwrap();
        assert!(json.starts_with(r#"{"type":"hello""#));
    }

    proptest! {
        #[test]
        fn message_round_trip(
            x in any::<f64>().prop_filter("finite", |v| v.is_finite()),
            z in 0.0f64..1e4,
            detail in ".*",
            seq in any::<u64>(),
        ) {
            let mut msg = sample(MessageKind::Progress, seq);
            msg.auv.x_m = x;
            msg.auv.z_m = z;
            msg.detail = detail;
            let line = encode_message(&msg);
            prop_assert!(!line.contains('\n'));
            prop_assert_eq!(decode_message(&line), Ok(msg));
        }

        #[test]
        fn action_round_trip(i in 0..GestureToken::ALL.len()) {
            let action = TabletAction::Gesture { token: GestureToken::ALL[i] };
            prop_assert_eq!(decode_action(&encode_action(&action)), Ok(action));
        }
    }
}
