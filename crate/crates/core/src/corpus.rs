//! Golden phrase corpus: phrases with the verdict the checker must give.
//!
//! ```text
//! ok | mosaic digit_1 digit_0 sep digit_1 digit_2 | mosaic 10 m x 12 m
//! err MISSING_PARAMETER@1 | go_down
//! ```

use thiserror::Error;

use crate::alphabet::{strip_comment, GestureToken};
use crate::syntax::{check, SyntaxErrorCode};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid { text: String },
    Invalid { code: SyntaxErrorCode, position: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusEntry {
    pub line: usize,
    pub tokens: Vec<GestureToken>,
    pub expected: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("corpus line {line}: {message}")]
pub struct CorpusError {
    pub line: usize,
    pub message: String,
}

impl CorpusEntry {
    /// What the checker actually says about this phrase.
    pub fn actual(&self) -> Verdict {
        match check(&self.tokens) {
            Ok(cmd) => Verdict::Valid {
                text: cmd.to_string(),
            },
            Err(e) => Verdict::Invalid {
                code: e.code,
                position: e.position,
            },
        }
    }

    pub fn agrees(&self) -> bool {
        self.actual() == self.expected
    }
}

pub fn parse_corpus(text: &str) -> Result<Vec<CorpusEntry>, CorpusError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = strip_comment(raw);
        if body.is_empty() {
            continue;
        }
        let err = |message: String| CorpusError { line, message };
        let fields: Vec<&str> = body.split('|').map(str::trim).collect();
        let tokens = |field: &str| {
            field
                .split_whitespace()
                .map(GestureToken::from_mnemonic)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| err(e.to_string()))
        };
        let entry = match fields.as_slice() {
            ["ok", phrase, text] => CorpusEntry {
                line,
                tokens: tokens(phrase)?,
                expected: Verdict::Valid {
                    text: (*text).to_owned(),
                },
            },
            [head, phrase] if head.starts_with("err ") => {
                let (code, position) = head[4..]
                    .trim()
                    .split_once('@')
                    .ok_or_else(|| err("expected `err CODE@position`".into()))?;
                CorpusEntry {
                    line,
                    tokens: tokens(phrase)?,
                    expected: Verdict::Invalid {
                        code: SyntaxErrorCode::from_str_code(code)
                            .ok_or_else(|| err(format!("unknown error code `{code}`")))?,
                        position: position
                            .parse()
                            .map_err(|_| err(format!("bad position `{position}`")))?,
                    },
                }
            }
            _ => return Err(err("expected `ok | tokens | text` or `err CODE@pos | tokens`".into())),
        };
        out.push(entry);
    }
    Ok(out)
}
