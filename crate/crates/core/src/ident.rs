//! Identifier rules shared by every name-carrying value and by the lexer.
//!
//! Identifiers may begin with a digit (`1`, `1plus2`) and may contain
//! apostrophes (`t'`); a lone underscore is punctuation, not a name.

use thiserror::Error;

/// Reserved words of the declaration language; never valid as identifiers.
pub const KEYWORDS: &[&str] = &[
    "typeSystem",
    "types",
    "order",
    "conSpec",
    "construction",
    "tSchema",
    "source",
    "target",
    "antecedent",
    "consequent",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentError {
    #[error("identifier must be non-empty")]
    Empty,
    #[error("`{0}` contains a character outside [A-Za-z0-9_']")]
    BadCharacter(String),
    #[error("`_` alone is punctuation, not an identifier")]
    LoneUnderscore,
    #[error("`{0}` is a reserved keyword")]
    Keyword(String),
}

pub fn is_keyword(text: &str) -> bool {
    KEYWORDS.contains(&text)
}

pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn validate_identifier(text: &str) -> Result<(), IdentError> {
    if text.is_empty() {
        return Err(IdentError::Empty);
    }
    if text == "_" {
        return Err(IdentError::LoneUnderscore);
    }
    if !text.chars().all(is_ident_char) {
        return Err(IdentError::BadCharacter(text.to_owned()));
    }
    if is_keyword(text) {
        return Err(IdentError::Keyword(text.to_owned()));
    }
    Ok(())
}
