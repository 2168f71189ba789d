//! Streaming phrase segmentation on the `(A, A)` and `(A, ∀)` delimiter
//! pairs.

use crate::alphabet::GestureToken;

/// How a phrase was closed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Terminator {
    /// Closed by `START_COMM`; the mission continues with another command.
    Continue,
    /// Closed by `END_COMM`.
    EndMission,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParserEvent {
    PhraseComplete {
        tokens: Vec<GestureToken>,
        terminator: Terminator,
    },
    EmptyPhrase {
        terminator: Terminator,
    },
    StrayToken {
        token: GestureToken,
    },
    Emergency,
}

/// Segmenter state. The buffer is empty whenever no phrase is open.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SegmenterState {
    open: bool,
    buffer: Vec<GestureToken>,
}

impl SegmenterState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_open(&self) -> bool {
        self.open
    }

    /// Tokens of the phrase currently being composed.
    pub fn buffer(&self) -> &[GestureToken] {
        &self.buffer
    }

    pub fn reset(&mut self) {
        self.open = false;
        self.buffer.clear();
    }

    /// Feeds one token. Never fails; every anomaly is reported as an event.
    pub fn feed(&mut self, token: GestureToken) -> Vec<ParserEvent> {
        use GestureToken::{EndComm, OutOfAir, StartComm};

        match (self.open, token) {
            (_, OutOfAir) => {
                self.reset();
                vec![ParserEvent::Emergency]
            }
            (false, StartComm) => {
                self.open = true;
                Vec::new()
            }
            (false, token) => vec![ParserEvent::StrayToken { token }],
            (true, StartComm) => vec![self.close(Terminator::Continue)],
            (true, EndComm) => {
                let event = self.close(Terminator::EndMission);
                self.open = false;
                vec![event]
            }
            (true, token) => {
                self.buffer.push(token);
                Vec::new()
            }
        }
    }

    fn close(&mut self, terminator: Terminator) -> ParserEvent {
        if self.buffer.is_empty() {
            ParserEvent::EmptyPhrase { terminator }
        } else {
            ParserEvent::PhraseComplete {
                tokens: std::mem::take(&mut self.buffer),
                terminator,
            }
        }
    }
}

/// Functional form of [`SegmenterState::feed`].
pub fn feed(mut state: SegmenterState, token: GestureToken) -> (SegmenterState, Vec<ParserEvent>) {
    let events = state.feed(token);
    (state, events)
}

pub fn reset(_state: SegmenterState) -> SegmenterState {
    SegmenterState::new()
}

/// Runs a whole token stream through a fresh segmenter.
pub fn segment(tokens: &[GestureToken]) -> Vec<ParserEvent> {
    let mut state = SegmenterState::new();
    tokens.iter().flat_map(|&t| state.feed(t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::GestureToken::{self, *};
    use proptest::prelude::*;

    #[test]
    fn two_command_mission() {
        let stream = [
            StartComm, Mosaic, Digit1, Digit0, Sep, Digit1, Digit2, StartComm, GoDown, Digit1,
            EndComm,
        ];
        assert_eq!(
            segment(&stream),
            vec![
                ParserEvent::PhraseComplete {
                    tokens: vec![Mosaic, Digit1, Digit0, Sep, Digit1, Digit2],
                    terminator: Terminator::Continue,
                },
                ParserEvent::PhraseComplete {
                    tokens: vec![GoDown, Digit1],
                    terminator: Terminator::EndMission,
                },
            ]
        );
    }

    #[test]
    fn empty_mission() {
        assert_eq!(
            segment(&[StartComm, EndComm]),
            vec![ParserEvent::EmptyPhrase {
                terminator: Terminator::EndMission
            }]
        );
    }

    #[test]
    fn repeated_start_keeps_phrase_open() {
        let mut s = SegmenterState::new();
        s.feed(StartComm);
        assert_eq!(
            s.feed(StartComm),
            vec![ParserEvent::EmptyPhrase {
                terminator: Terminator::Continue
            }]
        );
        assert!(s.is_open());
    }

    #[test]
    fn stray_tokens_when_closed() {
        let mut s = SegmenterState::new();
        assert_eq!(s.feed(GoDown), vec![ParserEvent::StrayToken { token: GoDown }]);
        assert_eq!(s.feed(EndComm), vec![ParserEvent::StrayToken { token: EndComm }]);
        assert!(!s.is_open());
    }

    #[test]
    fn emergency_clears() {
        let mut s = SegmenterState::new();
        s.feed(StartComm);
        s.feed(Photo);
        assert_eq!(s.feed(OutOfAir), vec![ParserEvent::Emergency]);
        assert_eq!(s, SegmenterState::new());
    }

    #[test]
    fn reset_examples() {
        let mut s = SegmenterState::new();
        s.feed(StartComm);
        s.feed(Photo);
        let r = reset(s);
        assert_eq!(r, SegmenterState::new());
        let (opened, events) = feed(r.clone(), StartComm);
        assert!(events.is_empty());
        assert!(opened.is_open() && opened.buffer().is_empty());
        assert_eq!(reset(reset(opened)), r);
    }

    fn any_token() -> impl Strategy<Value = GestureToken> {
        (0..GestureToken::ALL.len()).prop_map(|i| GestureToken::ALL[i])
    }

    // Delimiter-heavy streams exercise the interesting transitions more often.
    fn stream() -> impl Strategy<Value = Vec<GestureToken>> {
        prop::collection::vec(
            prop_oneof![
                3 => Just(StartComm),
                2 => Just(EndComm),
                8 => any_token(),
            ],
            0..64,
        )
    }

    proptest! {
        #[test]
        fn segmentation_is_lossless(tokens in stream()) {
            let mut state = SegmenterState::new();
            let mut rebuilt = Vec::new();
            let mut expected = Vec::new();
            let mut closers = 0usize;
            let mut closed = 0usize;
            for &t in &tokens {
                let was_open = state.is_open();
                if was_open && t.is_delimiter() {
                    closers += 1;
                }
                let events = state.feed(t);
                prop_assert!(events.len() <= 2);
                // Expected stream: everything except strays and emergencies;
                // a phrase being composed when an emergency hits is discarded.
                match (was_open, t) {
                    (_, OutOfAir) => {
                        let keep_to = rebuilt.len();
                        expected.truncate(keep_to);
                    }
                    (false, StartComm) => expected.push(t),
                    (false, _) => {}
                    (true, _) => expected.push(t),
                }
                for e in events {
                    match e {
                        ParserEvent::PhraseComplete { tokens, terminator } => {
                            prop_assert!(!tokens.iter().any(|t| t.is_delimiter() || *t == OutOfAir));
                            closed += 1;
                            rebuilt.extend(tokens);
                            rebuilt.push(match terminator {
                                Terminator::Continue => StartComm,
                                Terminator::EndMission => EndComm,
                            });
                        }
                        ParserEvent::EmptyPhrase { terminator } => {
                            closed += 1;
                            rebuilt.push(match terminator {
                                Terminator::Continue => StartComm,
                                Terminator::EndMission => EndComm,
                            });
                        }
                        ParserEvent::Emergency => {
                            prop_assert!(!state.is_open());
                            prop_assert!(state.buffer().is_empty());
                        }
                        ParserEvent::StrayToken { .. } => {}
                    }
                }
                if !state.is_open() {
                    prop_assert!(state.buffer().is_empty());
                }
                // Opening delimiters are emitted into the rebuilt stream lazily.
                if !was_open && t == StartComm {
                    rebuilt.push(StartComm);
                }
            }
            prop_assert_eq!(closers, closed);
            // Whatever is still buffered has not been emitted yet.
            let pending = state.buffer().len();
            expected.truncate(expected.len() - pending);
            prop_assert_eq!(rebuilt, expected);
        }
    }
}
