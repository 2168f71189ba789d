//! The gesture alphabet, numeric literals, and the command AST.
//!
//! Every other module speaks in terms of [`GestureToken`] and
//! [`ParsedCommand`]. Tokens have a canonical lowercase snake_case mnemonic
//! which is what token files, scenario files and the tablet wire protocol use.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// One symbol of the diver gesture alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GestureToken {
    /// Opens a mission or separates two commands (written `A`).
    StartComm,
    /// Closes a mission (written `∀`).
    EndComm,
    Mosaic,
    Photo,
    GoDown,
    GoUp,
    GoTo,
    Carry,
    Boat,
    Here,
    Equipment,
    /// Separates two adjacent numeric arguments.
    Sep,
    Digit0,
    Digit1,
    Digit2,
    Digit3,
    Digit4,
    Digit5,
    Digit6,
    Digit7,
    Digit8,
    Digit9,
    OutOfAir,
}

/// Number of distinct gesture tokens.
pub const ALPHABET_SIZE: usize = GestureToken::ALL.len();

impl GestureToken {
    /// Every token, in declaration order. The position of a token in this
    /// array is its [`index`](Self::index).
    pub const ALL: [GestureToken; 23] = [
        GestureToken::StartComm,
        GestureToken::EndComm,
        GestureToken::Mosaic,
        GestureToken::Photo,
        GestureToken::GoDown,
        GestureToken::GoUp,
        GestureToken::GoTo,
        GestureToken::Carry,
        GestureToken::Boat,
        GestureToken::Here,
        GestureToken::Equipment,
        GestureToken::Sep,
        GestureToken::Digit0,
        GestureToken::Digit1,
        GestureToken::Digit2,
        GestureToken::Digit3,
        GestureToken::Digit4,
        GestureToken::Digit5,
        GestureToken::Digit6,
        GestureToken::Digit7,
        GestureToken::Digit8,
        GestureToken::Digit9,
        GestureToken::OutOfAir,
    ];

    const DIGITS: [GestureToken; 10] = [
        GestureToken::Digit0,
        GestureToken::Digit1,
        GestureToken::Digit2,
        GestureToken::Digit3,
        GestureToken::Digit4,
        GestureToken::Digit5,
        GestureToken::Digit6,
        GestureToken::Digit7,
        GestureToken::Digit8,
        GestureToken::Digit9,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            GestureToken::StartComm => "start_comm",
            GestureToken::EndComm => "end_comm",
            GestureToken::Mosaic => "mosaic",
            GestureToken::Photo => "photo",
            GestureToken::GoDown => "go_down",
            GestureToken::GoUp => "go_up",
            GestureToken::GoTo => "go_to",
            GestureToken::Carry => "carry",
            GestureToken::Boat => "boat",
            GestureToken::Here => "here",
            GestureToken::Equipment => "equipment",
            GestureToken::Sep => "sep",
            GestureToken::Digit0 => "digit_0",
            GestureToken::Digit1 => "digit_1",
            GestureToken::Digit2 => "digit_2",
            GestureToken::Digit3 => "digit_3",
            GestureToken::Digit4 => "digit_4",
            GestureToken::Digit5 => "digit_5",
            GestureToken::Digit6 => "digit_6",
            GestureToken::Digit7 => "digit_7",
            GestureToken::Digit8 => "digit_8",
            GestureToken::Digit9 => "digit_9",
            GestureToken::OutOfAir => "out_of_air",
        }
    }

    pub fn from_mnemonic(name: &str) -> Result<Self, AlphabetError> {
        Self::ALL
            .iter()
            .copied()
            .find(|t| t.mnemonic() == name)
            .ok_or_else(|| AlphabetError::UnknownToken(name.to_owned()))
    }

    /// The decimal value of a digit token, `None` for every other token.
    pub fn digit_value(self) -> Option<u8> {
        Self::DIGITS.iter().position(|&d| d == self).map(|v| v as u8)
    }

    pub fn digit(value: u8) -> Option<Self> {
        Self::DIGITS.get(value as usize).copied()
    }

    pub fn is_digit(self) -> bool {
        self.digit_value().is_some()
    }

    /// `START_COMM` and `END_COMM`.
    pub fn is_delimiter(self) -> bool {
        matches!(self, GestureToken::StartComm | GestureToken::EndComm)
    }
}

impl fmt::Display for GestureToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

impl FromStr for GestureToken {
    type Err = AlphabetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_mnemonic(s)
    }
}

pub fn token_from_mnemonic(name: &str) -> Result<GestureToken, AlphabetError> {
    GestureToken::from_mnemonic(name)
}

pub fn mnemonic_from_token(token: GestureToken) -> &'static str {
    token.mnemonic()
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AlphabetError {
    #[error("unknown gesture token `{0}`")]
    UnknownToken(String),
    #[error("number literal has no digits")]
    EmptyNumber,
    #[error("number literal out of range 1..=999")]
    NumberOutOfRange,
    #[error("`{0}` is not a digit token")]
    NotADigit(GestureToken),
}

/// A distance in whole meters, 1..=999.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NumberLiteral(u16);

impl NumberLiteral {
    pub const MIN: u16 = 1;
    pub const MAX: u16 = 999;
    pub const MAX_DIGITS: usize = 3;

    pub fn new(value: u16) -> Result<Self, AlphabetError> {
        if (Self::MIN..=Self::MAX).contains(&value) {
            Ok(Self(value))
        } else {
            Err(AlphabetError::NumberOutOfRange)
        }
    }

    pub fn value(self) -> u16 {
        self.0
    }

    pub fn meters(self) -> f64 {
        f64::from(self.0)
    }

    /// Most significant digit first, no leading zeros.
    pub fn to_digits(self) -> Vec<GestureToken> {
        self.0
            .to_string()
            .bytes()
            .map(|b| GestureToken::digit(b - b'0').expect("decimal digit"))
            .collect()
    }
}

impl fmt::Display for NumberLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Reads digit tokens most significant first.
pub fn number_from_digits(digits: &[GestureToken]) -> Result<NumberLiteral, AlphabetError> {
    if digits.is_empty() {
        return Err(AlphabetError::EmptyNumber);
    }
    let mut value: u16 = 0;
    for &token in digits {
        let d = token.digit_value().ok_or(AlphabetError::NotADigit(token))?;
        // saturates well past the cap, so long inputs stay out of range
        value = value.saturating_mul(10).saturating_add(u16::from(d));
    }
    if digits.len() > NumberLiteral::MAX_DIGITS {
        return Err(AlphabetError::NumberOutOfRange);
    }
    NumberLiteral::new(value)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Place {
    Boat,
    Here,
}

impl Place {
    pub fn token(self) -> GestureToken {
        match self {
            Place::Boat => GestureToken::Boat,
            Place::Here => GestureToken::Here,
        }
    }

    pub fn from_token(token: GestureToken) -> Option<Self> {
        match token {
            GestureToken::Boat => Some(Place::Boat),
            GestureToken::Here => Some(Place::Here),
            _ => None,
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token().mnemonic())
    }
}

/// The only object a diver can ask the vehicle to carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CarryObject {
    Equipment,
}

/// One validated command. Every required parameter is present by
/// construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ParsedCommand {
    Mosaic { x_m: NumberLiteral, y_m: NumberLiteral },
    Photo { altitude_m: Option<NumberLiteral> },
    GoDown { d_m: NumberLiteral },
    GoUp { d_m: NumberLiteral },
    GoTo { place: Place },
    Carry { object: CarryObject, place: Place },
}

impl fmt::Display for ParsedCommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParsedCommand::Mosaic { x_m, y_m } => write!(f, "mosaic {x_m} m x {y_m} m"),
            ParsedCommand::Photo { altitude_m: None } => f.write_str("photo"),
            ParsedCommand::Photo {
                altitude_m: Some(alt),
            } => write!(f, "photo at {alt} m altitude"),
            ParsedCommand::GoDown { d_m } => write!(f, "go_down {d_m} m"),
            ParsedCommand::GoUp { d_m } => write!(f, "go_up {d_m} m"),
            ParsedCommand::GoTo { place } => write!(f, "go_to {place}"),
            ParsedCommand::Carry {
                object: CarryObject::Equipment,
                place,
            } => write!(f, "carry equipment to {place}"),
        }
    }
}

/// Parses a token file: one mnemonic per line, `#` starts a comment, blank
/// lines are ignored. Errors carry the 1-based line number.
pub fn parse_token_file(text: &str) -> Result<Vec<GestureToken>, (usize, AlphabetError)> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let body = strip_comment(line);
        if body.is_empty() {
            continue;
        }
        let token = GestureToken::from_mnemonic(body).map_err(|e| (lineno + 1, e))?;
        out.push(token);
    }
    Ok(out)
}

pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => line[..i].trim(),
        None => line.trim(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    use GestureToken::*;

    #[test]
    fn mnemonic_lookup() {
        assert_eq!(token_from_mnemonic("start_comm"), Ok(StartComm));
        assert_eq!(token_from_mnemonic("mosaic"), Ok(Mosaic));
        assert_eq!(
            token_from_mnemonic("swim"),
            Err(AlphabetError::UnknownToken("swim".into()))
        );
        assert_eq!(mnemonic_from_token(EndComm), "end_comm");
        assert_eq!(mnemonic_from_token(Digit7), "digit_7");
        assert_eq!(mnemonic_from_token(OutOfAir), "out_of_air");
    }

    #[test]
    fn mnemonics_are_a_bijection() {
        let mut names: Vec<_> = GestureToken::ALL.iter().map(|t| t.mnemonic()).collect();
        for t in GestureToken::ALL {
            assert_eq!(token_from_mnemonic(t.mnemonic()), Ok(t));
            assert_eq!(GestureToken::from_index(t.index()), Some(t));
        }
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), ALPHABET_SIZE);
    }

    #[test]
    fn mnemonics_are_lower_snake_case() {
        for t in GestureToken::ALL {
            assert!(t
                .mnemonic()
                .chars()
                .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_'));
        }
    }

    #[test]
    fn number_examples() {
        assert_eq!(number_from_digits(&[Digit1, Digit0]).map(|n| n.value()), Ok(10));
        assert_eq!(
            number_from_digits(&[Digit0]),
            Err(AlphabetError::NumberOutOfRange)
        );
        assert_eq!(
            number_from_digits(&[Digit9, Digit9, Digit9]).map(|n| n.value()),
            Ok(999)
        );
        assert_eq!(
            number_from_digits(&[Digit1, Digit0, Digit0, Digit0]),
            Err(AlphabetError::NumberOutOfRange)
        );
        assert_eq!(number_from_digits(&[]), Err(AlphabetError::EmptyNumber));
        assert_eq!(
            number_from_digits(&[Digit1, Boat]),
            Err(AlphabetError::NotADigit(Boat))
        );
    }

    #[test]
    fn every_number_round_trips_through_digits() {
        for v in 1..=999u16 {
            let digits: Vec<GestureToken> = v
                .to_string()
                .chars()
                .map(|c| GestureToken::digit(c.to_digit(10).unwrap() as u8).unwrap())
                .collect();
            assert_eq!(number_from_digits(&digits).unwrap().value(), v);
            assert_eq!(NumberLiteral::new(v).unwrap().to_digits(), digits);
        }
    }

    #[test]
    fn leading_zeros_are_read_as_decimal() {
        assert_eq!(number_from_digits(&[Digit0, Digit7]).unwrap().value(), 7);
    }

    #[test]
    fn token_file_comments_and_blanks() {
        let text = "# mission\nstart_comm\n\n  go_down  # descend\ndigit_1\nend_comm\n";
        assert_eq!(
            parse_token_file(text),
            Ok(vec![StartComm, GoDown, Digit1, EndComm])
        );
        assert_eq!(
            parse_token_file("start_comm\nswim\n"),
            Err((2, AlphabetError::UnknownToken("swim".into())))
        );
    }
}
