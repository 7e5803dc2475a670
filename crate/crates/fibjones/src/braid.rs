//! Braid words: data model, text parser, writhe, composition and Markov moves.
//!
//! A braid on `n` strands is stored as a signed generator word: entry `+i`
//! is the elementary crossing σᵢ of strands `i` and `i+1`, entry `-i` its
//! inverse. Words are kept exactly as given — no free reduction is ever
//! applied, so crossing count and writhe always refer to the input diagram.

use crate::error::{Error, Result};
use std::fmt;

/// A braid group element presented as a word in the generators σ₁..σ_{n-1}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BraidWord {
    strands: usize,
    word: Vec<i32>,
}

impl BraidWord {
    /// Build a braid word, checking every generator index against `strands`.
    pub fn new(strands: usize, word: Vec<i32>) -> Result<Self> {
        if strands == 0 {
            return Err(Error::Domain("strand count must be >= 1".into()));
        }
        for &g in &word {
            if g == 0 || g.unsigned_abs() as usize >= strands {
                return Err(Error::GeneratorOutOfRange {
                    index: g as i64,
                    strands,
                });
            }
        }
        Ok(BraidWord { strands, word })
    }

    /// The identity braid in B_n.
    pub fn identity(strands: usize) -> Result<Self> {
        Self::new(strands, Vec::new())
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn word(&self) -> &[i32] {
        &self.word
    }

    /// Crossing count of the diagram (word length).
    pub fn crossings(&self) -> usize {
        self.word.len()
    }

    /// Sum of crossing signs.
    pub fn writhe(&self) -> i64 {
        self.word.iter().map(|&g| g.signum() as i64).sum()
    }

    /// Concatenate two words in the same braid group.
    pub fn compose(&self, other: &BraidWord) -> Result<BraidWord> {
        if self.strands != other.strands {
            return Err(Error::StrandMismatch {
                left: self.strands,
                right: other.strands,
            });
        }
        let mut word = self.word.clone();
        word.extend_from_slice(&other.word);
        Ok(BraidWord {
            strands: self.strands,
            word,
        })
    }

    /// Reverse the word and negate every entry.
    pub fn inverse(&self) -> BraidWord {
        BraidWord {
            strands: self.strands,
            word: self.word.iter().rev().map(|&g| -g).collect(),
        }
    }

    /// Apply a Markov move. Conjugation stays in B_n; stabilization embeds
    /// into B_{n+1} and appends σ_n^{±1}.
    pub fn markov_move(&self, kind: MarkovMove) -> Result<BraidWord> {
        match kind {
            MarkovMove::Conjugate(g) => {
                if g == 0 || g.unsigned_abs() as usize >= self.strands {
                    return Err(Error::GeneratorOutOfRange {
                        index: g as i64,
                        strands: self.strands,
                    });
                }
                let mut word = Vec::with_capacity(self.word.len() + 2);
                word.push(-g);
                word.extend_from_slice(&self.word);
                word.push(g);
                Ok(BraidWord {
                    strands: self.strands,
                    word,
                })
            }
            MarkovMove::Stabilize(sign) => {
                let g = self.strands as i32;
                let mut word = self.word.clone();
                word.push(if sign >= 0 { g } else { -g });
                Ok(BraidWord {
                    strands: self.strands + 1,
                    word,
                })
            }
        }
    }
}

/// The two Markov moves on braid words.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkovMove {
    /// b ↦ g⁻¹ · b · g for a signed generator g.
    Conjugate(i32),
    /// b ∈ B_n ↦ b · σ_n^{sign} ∈ B_{n+1}.
    Stabilize(i8),
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B{}:", self.strands)?;
        for g in &self.word {
            write!(f, " {g}")?;
        }
        Ok(())
    }
}

/// Canonical text form, `"B<n>: g g g"`. Round-trips through [`parse_braid`].
pub fn format_braid(b: &BraidWord) -> String {
    b.to_string()
}

/// Parse braid text.
///
/// Two forms are accepted, with `#` starting a comment to end of line:
/// the one-liner `B<n>: <signed ints>` and the two-line file form
/// `strands: <n>` / `word: <signed ints>`.
pub fn parse_braid(text: &str) -> Result<BraidWord> {
    let stripped = strip_comments(text);
    let trimmed = stripped.trim();
    if trimmed.contains("strands:") {
        return parse_file_form(&stripped);
    }
    parse_line_form(&stripped)
}

fn strip_comments(text: &str) -> String {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join("\n")
}

fn parse_line_form(text: &str) -> Result<BraidWord> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    while pos < bytes.len() && (bytes[pos] as char).is_whitespace() {
        pos += 1;
    }
    if pos >= bytes.len() || bytes[pos] != b'B' {
        return Err(Error::Syntax {
            pos,
            msg: "expected 'B' introducing a braid".into(),
        });
    }
    pos += 1;
    let digits_start = pos;
    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
        pos += 1;
    }
    if pos == digits_start {
        return Err(Error::Syntax {
            pos,
            msg: "expected strand count after 'B'".into(),
        });
    }
    let strands: usize = text[digits_start..pos].parse().map_err(|_| Error::Syntax {
        pos: digits_start,
        msg: "strand count does not fit".into(),
    })?;
    if pos >= bytes.len() || bytes[pos] != b':' {
        return Err(Error::Syntax {
            pos,
            msg: "expected ':' after strand count".into(),
        });
    }
    pos += 1;
    let word = parse_signed_ints(text, pos)?;
    BraidWord::new(strands, word)
}

fn parse_file_form(text: &str) -> Result<BraidWord> {
    let mut strands: Option<usize> = None;
    let mut word: Option<Vec<i32>> = None;
    let mut offset = 0;
    for line in text.lines() {
        let t = line.trim();
        if let Some(rest) = t.strip_prefix("strands:") {
            strands = Some(rest.trim().parse().map_err(|_| Error::Syntax {
                pos: offset,
                msg: "invalid strand count".into(),
            })?);
        } else if let Some(rest) = t.strip_prefix("word:") {
            word = Some(parse_signed_ints(rest, 0)?);
        } else if !t.is_empty() {
            return Err(Error::Syntax {
                pos: offset,
                msg: format!("unexpected line {t:?}"),
            });
        }
        offset += line.len() + 1;
    }
    let strands = strands.ok_or(Error::Syntax {
        pos: 0,
        msg: "missing 'strands:' line".into(),
    })?;
    BraidWord::new(strands, word.unwrap_or_default())
}

fn parse_signed_ints(text: &str, start: usize) -> Result<Vec<i32>> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut pos = start;
    while pos < bytes.len() {
        let ch = bytes[pos] as char;
        if ch.is_whitespace() {
            pos += 1;
            continue;
        }
        let tok_start = pos;
        if ch == '+' || ch == '-' {
            pos += 1;
        }
        let digit_start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if pos == digit_start {
            return Err(Error::Syntax {
                pos: tok_start,
                msg: format!("expected signed integer, found {:?}", ch),
            });
        }
        let val: i32 = text[tok_start..pos].parse().map_err(|_| Error::Syntax {
            pos: tok_start,
            msg: "integer out of range".into(),
        })?;
        out.push(val);
    }
    Ok(out)
}
