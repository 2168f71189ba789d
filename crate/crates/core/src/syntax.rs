//! Grammar check of a single phrase.
//!
//! ```text
//! command := MOSAIC num SEP num
//!          | PHOTO [num]
//!          | GO_DOWN num
//!          | GO_UP num
//!          | GO_TO place
//!          | CARRY EQUIPMENT place
//! num     := digit{1,3}          (value 1..=999)
//! place   := BOAT | HERE
//! ```
//!
//! One command per phrase. The scan is left to right and the first error
//! wins; its position is the index of the offending token, or the phrase
//! length when a required parameter is missing at the end.

use std::fmt;

use thiserror::Error;

use crate::alphabet::{
    number_from_digits, CarryObject, GestureToken, NumberLiteral, ParsedCommand, Place,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SyntaxErrorCode {
    EmptyCommand,
    UnknownAction,
    MissingParameter,
    TrailingTokens,
    BadNumber,
    BadPlace,
}

impl SyntaxErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            SyntaxErrorCode::EmptyCommand => "EMPTY_COMMAND",
            SyntaxErrorCode::UnknownAction => "UNKNOWN_ACTION",
            SyntaxErrorCode::MissingParameter => "MISSING_PARAMETER",
            SyntaxErrorCode::TrailingTokens => "TRAILING_TOKENS",
            SyntaxErrorCode::BadNumber => "BAD_NUMBER",
            SyntaxErrorCode::BadPlace => "BAD_PLACE",
        }
    }

    pub fn from_str_code(s: &str) -> Option<Self> {
        [
            SyntaxErrorCode::EmptyCommand,
            SyntaxErrorCode::UnknownAction,
            SyntaxErrorCode::MissingParameter,
            SyntaxErrorCode::TrailingTokens,
            SyntaxErrorCode::BadNumber,
            SyntaxErrorCode::BadPlace,
        ]
        .into_iter()
        .find(|c| c.as_str() == s)
    }
}

impl fmt::Display for SyntaxErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{code} at token {position}: {detail}")]
pub struct SyntaxError {
    pub code: SyntaxErrorCode,
    pub position: usize,
    pub detail: String,
}

impl SyntaxError {
    fn new(code: SyntaxErrorCode, position: usize, detail: impl Into<String>) -> Self {
        Self {
            code,
            position,
            detail: detail.into(),
        }
    }
}

struct Cursor<'a> {
    tokens: &'a [GestureToken],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<GestureToken> {
        self.tokens.get(self.pos).copied()
    }

    fn number(&mut self, what: &str) -> Result<NumberLiteral, SyntaxError> {
        let start = self.pos;
        let run = self.tokens[start..]
            .iter()
            .take_while(|t| t.is_digit())
            .count();
        if run == 0 {
            return Err(match self.peek() {
                None => SyntaxError::new(
                    SyntaxErrorCode::MissingParameter,
                    start,
                    format!("missing {what}"),
                ),
                Some(t) => SyntaxError::new(
                    SyntaxErrorCode::BadNumber,
                    start,
                    format!("expected digits for {what}, found {t}"),
                ),
            });
        }
        let literal = number_from_digits(&self.tokens[start..start + run]).map_err(|_| {
            SyntaxError::new(
                SyntaxErrorCode::BadNumber,
                start,
                format!("{what} must be 1..=999 m with at most 3 digits"),
            )
        })?;
        self.pos += run;
        Ok(literal)
    }

    fn place(&mut self) -> Result<Place, SyntaxError> {
        match self.peek() {
            None => Err(SyntaxError::new(
                SyntaxErrorCode::MissingParameter,
                self.pos,
                "missing place",
            )),
            Some(t) => match Place::from_token(t) {
                Some(place) => {
                    self.pos += 1;
                    Ok(place)
                }
                None => Err(SyntaxError::new(
                    SyntaxErrorCode::BadPlace,
                    self.pos,
                    format!("expected boat or here, found {t}"),
                )),
            },
        }
    }

    fn expect(&mut self, token: GestureToken, what: &str) -> Result<(), SyntaxError> {
        if self.peek() == Some(token) {
            self.pos += 1;
            Ok(())
        } else {
            let detail = match self.peek() {
                None => format!("missing {what}"),
                Some(t) => format!("expected {what}, found {t}"),
            };
            Err(SyntaxError::new(
                SyntaxErrorCode::MissingParameter,
                self.pos,
                detail,
            ))
        }
    }
}

/// Validates one phrase. Total: never panics on any token list.
pub fn check(phrase: &[GestureToken]) -> Result<ParsedCommand, SyntaxError> {
    use GestureToken as T;

    let Some(&action) = phrase.first() else {
        return Err(SyntaxError::new(
            SyntaxErrorCode::EmptyCommand,
            0,
            "empty command",
        ));
    };
    let mut cur = Cursor {
        tokens: phrase,
        pos: 1,
    };
    let cmd = match action {
        T::Mosaic => {
            let x_m = cur.number("x dimension")?;
            cur.expect(T::Sep, "separator before y dimension")?;
            let y_m = cur.number("y dimension")?;
            ParsedCommand::Mosaic { x_m, y_m }
        }
        T::Photo => {
            let altitude_m = match cur.peek() {
                Some(t) if t.is_digit() => Some(cur.number("altitude")?),
                _ => None,
            };
            ParsedCommand::Photo { altitude_m }
        }
        T::GoDown => ParsedCommand::GoDown {
            d_m: cur.number("distance")?,
        },
        T::GoUp => ParsedCommand::GoUp {
            d_m: cur.number("distance")?,
        },
        T::GoTo => ParsedCommand::GoTo { place: cur.place()? },
        T::Carry => {
            cur.expect(T::Equipment, "equipment")?;
            ParsedCommand::Carry {
                object: CarryObject::Equipment,
                place: cur.place()?,
            }
        }
        other => {
            return Err(SyntaxError::new(
                SyntaxErrorCode::UnknownAction,
                0,
                format!("{other} is not an action"),
            ))
        }
    };
    if let Some(t) = cur.peek() {
        return Err(SyntaxError::new(
            SyntaxErrorCode::TrailingTokens,
            cur.pos,
            format!("unexpected {t} after complete command"),
        ));
    }
    Ok(cmd)
}

/// Canonical token form of a command. `check(&serialize(c)) == Ok(c)`.
pub fn serialize(cmd: &ParsedCommand) -> Vec<GestureToken> {
    use GestureToken as T;

    let mut out = Vec::with_capacity(8);
    match cmd {
        ParsedCommand::Mosaic { x_m, y_m } => {
            out.push(T::Mosaic);
            out.extend(x_m.to_digits());
            out.push(T::Sep);
            out.extend(y_m.to_digits());
        }
        ParsedCommand::Photo { altitude_m } => {
            out.push(T::Photo);
            if let Some(alt) = altitude_m {
                out.extend(alt.to_digits());
            }
        }
        ParsedCommand::GoDown { d_m } => {
            out.push(T::GoDown);
            out.extend(d_m.to_digits());
        }
        ParsedCommand::GoUp { d_m } => {
            out.push(T::GoUp);
            out.extend(d_m.to_digits());
        }
        ParsedCommand::GoTo { place } => {
            out.push(T::GoTo);
            out.push(place.token());
        }
        ParsedCommand::Carry { object, place } => {
            out.push(T::Carry);
            match object {
                CarryObject::Equipment => out.push(T::Equipment),
            }
            out.push(place.token());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::GestureToken::{self, *};
    use proptest::prelude::*;

    fn n(v: u16) -> NumberLiteral {
        NumberLiteral::new(v).unwrap()
    }

    fn err(phrase: &[GestureToken]) -> (SyntaxErrorCode, usize) {
        let e = check(phrase).unwrap_err();
        (e.code, e.position)
    }

    #[test]
    fn check_examples() {
        assert_eq!(
            check(&[Mosaic, Digit1, Digit0, Sep, Digit1, Digit2]),
            Ok(ParsedCommand::Mosaic { x_m: n(10), y_m: n(12) })
        );
        assert_eq!(err(&[Mosaic]), (SyntaxErrorCode::MissingParameter, 1));
        assert_eq!(check(&[GoDown, Digit1]), Ok(ParsedCommand::GoDown { d_m: n(1) }));
        assert_eq!(
            check(&[Photo, Digit3]),
            Ok(ParsedCommand::Photo { altitude_m: Some(n(3)) })
        );
        assert_eq!(err(&[]), (SyntaxErrorCode::EmptyCommand, 0));
        assert_eq!(err(&[GoTo, Digit2]), (SyntaxErrorCode::BadPlace, 1));
    }

    #[test]
    fn error_paths() {
        assert_eq!(err(&[Boat]), (SyntaxErrorCode::UnknownAction, 0));
        assert_eq!(err(&[Digit1]), (SyntaxErrorCode::UnknownAction, 0));
        assert_eq!(err(&[GoDown]), (SyntaxErrorCode::MissingParameter, 1));
        assert_eq!(err(&[GoDown, Boat]), (SyntaxErrorCode::BadNumber, 1));
        assert_eq!(err(&[GoDown, Digit0]), (SyntaxErrorCode::BadNumber, 1));
        assert_eq!(
            err(&[GoUp, Digit1, Digit2, Digit3, Digit4]),
            (SyntaxErrorCode::BadNumber, 1)
        );
        assert_eq!(
            err(&[Mosaic, Digit1, Digit0]),
            (SyntaxErrorCode::MissingParameter, 3)
        );
        assert_eq!(
            err(&[Mosaic, Digit1, Sep]),
            (SyntaxErrorCode::MissingParameter, 3)
        );
        assert_eq!(err(&[Photo, Here]), (SyntaxErrorCode::TrailingTokens, 1));
        assert_eq!(
            err(&[GoDown, Digit1, GoUp, Digit1]),
            (SyntaxErrorCode::TrailingTokens, 2)
        );
        assert_eq!(err(&[Carry, Boat]), (SyntaxErrorCode::MissingParameter, 1));
        assert_eq!(err(&[Carry, Equipment]), (SyntaxErrorCode::MissingParameter, 2));
        assert_eq!(
            err(&[Carry, Equipment, Sep]),
            (SyntaxErrorCode::BadPlace, 2)
        );
        assert_eq!(err(&[GoTo]), (SyntaxErrorCode::MissingParameter, 1));
    }

    #[test]
    fn serialize_examples() {
        assert_eq!(
            serialize(&ParsedCommand::Mosaic { x_m: n(10), y_m: n(12) }),
            vec![Mosaic, Digit1, Digit0, Sep, Digit1, Digit2]
        );
        assert_eq!(serialize(&ParsedCommand::Photo { altitude_m: None }), vec![Photo]);
        assert_eq!(
            serialize(&ParsedCommand::Carry {
                object: CarryObject::Equipment,
                place: Place::Here
            }),
            vec![Carry, Equipment, Here]
        );
    }

    pub(crate) fn arb_number() -> impl Strategy<Value = NumberLiteral> {
        (1u16..=999).prop_map(|v| NumberLiteral::new(v).unwrap())
    }

    fn arb_place() -> impl Strategy<Value = Place> {
        prop_oneof![Just(Place::Boat), Just(Place::Here)]
    }

    fn arb_command() -> impl Strategy<Value = ParsedCommand> {
        prop_oneof![
            (arb_number(), arb_number()).prop_map(|(x_m, y_m)| ParsedCommand::Mosaic { x_m, y_m }),
            prop::option::of(arb_number()).prop_map(|altitude_m| ParsedCommand::Photo { altitude_m }),
            arb_number().prop_map(|d_m| ParsedCommand::GoDown { d_m }),
            arb_number().prop_map(|d_m| ParsedCommand::GoUp { d_m }),
            arb_place().prop_map(|place| ParsedCommand::GoTo { place }),
            arb_place().prop_map(|place| ParsedCommand::Carry {
                object: CarryObject::Equipment,
                place
            }),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn round_trip(cmd in arb_command()) {
            let tokens = serialize(&cmd);
            prop_assert!(tokens.iter().all(|t| GestureToken::ALL.contains(t)));
            prop_assert_eq!(check(&tokens), Ok(cmd));
        }

        #[test]
        fn check_is_total_and_deterministic(
            phrase in prop::collection::vec((0..GestureToken::ALL.len()).prop_map(|i| GestureToken::ALL[i]), 0..=32)
        ) {
            let a = check(&phrase);
            prop_assert_eq!(&a, &check(&phrase));
            if let Err(e) = a {
                prop_assert!(e.position <= phrase.len());
            }
        }
    }
}
