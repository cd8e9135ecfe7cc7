//! Lexer for the declaration language. Maximal munch: `<-` is never `<`
//! followed by `-`, `::` is never two colons. Identifiers may start with a
//! digit; a lone `_` is punctuation.

use std::fmt;
use std::sync::Arc;

use crate::ident;

/// Half-open positions are 1-based; `start <= end` always holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceSpan {
    pub file: Arc<str>,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl SourceSpan {
    pub fn new(file: Arc<str>, start: (u32, u32), end: (u32, u32)) -> Self {
        debug_assert!(start <= end, "span start after end");
        SourceSpan {
            file,
            start_line: start.0,
            start_col: start.1,
            end_line: end.0,
            end_col: end.1,
        }
    }

    pub fn merge(&self, other: &SourceSpan) -> SourceSpan {
        let start = (self.start_line, self.start_col).min((other.start_line, other.start_col));
        let end = (self.end_line, self.end_col).max((other.end_line, other.end_col));
        SourceSpan::new(self.file.clone(), start, end)
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.start_line, self.start_col)
    }
}

/// A located problem, lexical, syntactic, or semantic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub span: SourceSpan,
    pub message: String,
}

impl Diagnostic {
    pub fn new(span: SourceSpan, message: impl Into<String>) -> Self {
        Diagnostic {
            span,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keyword {
    TypeSystem,
    Types,
    Order,
    ConSpec,
    Construction,
    TSchema,
    Source,
    Target,
    Antecedent,
    Consequent,
}

impl Keyword {
    fn from_text(text: &str) -> Option<Keyword> {
        Some(match text {
            "typeSystem" => Keyword::TypeSystem,
            "types" => Keyword::Types,
            "order" => Keyword::Order,
            "conSpec" => Keyword::ConSpec,
            "construction" => Keyword::Construction,
            "tSchema" => Keyword::TSchema,
            "source" => Keyword::Source,
            "target" => Keyword::Target,
            "antecedent" => Keyword::Antecedent,
            "consequent" => Keyword::Consequent,
            _ => return None,
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Keyword::TypeSystem => "typeSystem",
            Keyword::Types => "types",
            Keyword::Order => "order",
            Keyword::ConSpec => "conSpec",
            Keyword::Construction => "construction",
            Keyword::TSchema => "tSchema",
            Keyword::Source => "source",
            Keyword::Target => "target",
            Keyword::Antecedent => "antecedent",
            Keyword::Consequent => "consequent",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lex {
    Ident(String),
    Keyword(Keyword),
    Eq,
    Comma,
    Colon,
    ColonColon,
    Lt,
    LArrow,
    RArrow,
    LBrack,
    RBrack,
    LParen,
    RParen,
    Underscore,
}

impl Lex {
    pub fn describe(&self) -> String {
        match self {
            Lex::Ident(s) => format!("identifier `{s}`"),
            Lex::Keyword(k) => format!("`{}`", k.as_str()),
            Lex::Eq => "`=`".to_owned(),
            Lex::Comma => "`,`".to_owned(),
            Lex::Colon => "`:`".to_owned(),
            Lex::ColonColon => "`::`".to_owned(),
            Lex::Lt => "`<`".to_owned(),
            Lex::LArrow => "`<-`".to_owned(),
            Lex::RArrow => "`->`".to_owned(),
            Lex::LBrack => "`[`".to_owned(),
            Lex::RBrack => "`]`".to_owned(),
            Lex::LParen => "`(`".to_owned(),
            Lex::RParen => "`)`".to_owned(),
            Lex::Underscore => "`_`".to_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexeme {
    pub lex: Lex,
    pub span: SourceSpan,
}

/// Splits `text` into lexemes. Every input position is either consumed or
/// reported with its span.
pub fn tokenize(file: &str, text: &str) -> Result<Vec<Lexeme>, Diagnostic> {
    let file: Arc<str> = Arc::from(file);
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line = 1u32;
    let mut col = 1u32;

    macro_rules! span_here {
        ($w:expr) => {
            SourceSpan::new(file.clone(), (line, col), (line, col + $w))
        };
    }

    while let Some(&c) = chars.peek() {
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        if ident::is_ident_char(c) {
            let start = (line, col);
            let mut word = String::new();
            while let Some(&c) = chars.peek() {
                if ident::is_ident_char(c) {
                    word.push(c);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            let span = SourceSpan::new(file.clone(), start, (line, col));
            let lex = if word == "_" {
                Lex::Underscore
            } else if let Some(kw) = Keyword::from_text(&word) {
                Lex::Keyword(kw)
            } else {
                Lex::Ident(word)
            };
            out.push(Lexeme { lex, span });
            continue;
        }
        let lex = match c {
            '=' => {
                chars.next();
                Some((Lex::Eq, 1))
            }
            ',' => {
                chars.next();
                Some((Lex::Comma, 1))
            }
            ':' => {
                chars.next();
                if chars.peek() == Some(&':') {
                    chars.next();
                    Some((Lex::ColonColon, 2))
                } else {
                    Some((Lex::Colon, 1))
                }
            }
            '<' => {
                chars.next();
                if chars.peek() == Some(&'-') {
                    chars.next();
                    Some((Lex::LArrow, 2))
                } else {
                    Some((Lex::Lt, 1))
                }
            }
            '-' => {
                chars.next();
                if chars.peek() == Some(&'>') {
                    chars.next();
                    Some((Lex::RArrow, 2))
                } else {
                    return Err(Diagnostic::new(
                        span_here!(1),
                        "unexpected character `-` (did you mean `->` or `<-`?)",
                    ));
                }
            }
            '[' => {
                chars.next();
                Some((Lex::LBrack, 1))
            }
            ']' => {
                chars.next();
                Some((Lex::RBrack, 1))
            }
            '(' => {
                chars.next();
                Some((Lex::LParen, 1))
            }
            ')' => {
                chars.next();
                Some((Lex::RParen, 1))
            }
            other => {
                return Err(Diagnostic::new(
                    span_here!(1),
                    format!("unexpected character `{other}`"),
                ));
            }
        };
        if let Some((lex, width)) = lex {
            let span = SourceSpan::new(file.clone(), (line, col), (line, col + width));
            col += width;
            out.push(Lexeme { lex, span });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lexes(text: &str) -> Vec<Lex> {
        tokenize("<test>", text)
            .unwrap()
            .into_iter()
            .map(|l| l.lex)
            .collect()
    }

    #[test]
    fn order_entry() {
        assert_eq!(
            lexes("plus < binOp"),
            vec![
                Lex::Ident("plus".into()),
                Lex::Lt,
                Lex::Ident("binOp".into())
            ]
        );
    }

    #[test]
    fn annotation_with_arrow_and_bracket() {
        assert_eq!(
            lexes("t1:1plus2:numExp <- infixOp["),
            vec![
                Lex::Ident("t1".into()),
                Lex::Colon,
                Lex::Ident("1plus2".into()),
                Lex::Colon,
                Lex::Ident("numExp".into()),
                Lex::LArrow,
                Lex::Ident("infixOp".into()),
                Lex::LBrack,
            ]
        );
    }

    #[test]
    fn empty_input_gives_empty_stream() {
        assert_eq!(lexes(""), vec![]);
    }

    #[test]
    fn maximal_munch_and_underscore() {
        assert_eq!(
            lexes("_:var"),
            vec![Lex::Underscore, Lex::Colon, Lex::Ident("var".into())]
        );
        assert_eq!(lexes("::"), vec![Lex::ColonColon]);
        assert_eq!(
            lexes("a_1 t'"),
            vec![Lex::Ident("a_1".into()), Lex::Ident("t'".into())]
        );
        assert_eq!(lexes("->"), vec![Lex::RArrow]);
    }

    #[test]
    fn keywords_are_recognised() {
        assert_eq!(
            lexes("tSchema x"),
            vec![Lex::Keyword(Keyword::TSchema), Lex::Ident("x".into())]
        );
    }

    #[test]
    fn bad_characters_are_reported_with_spans() {
        let err = tokenize("<test>", "a ; b").unwrap_err();
        assert_eq!(err.span.start_col, 3);
        let err = tokenize("<test>", "a - b").unwrap_err();
        assert_eq!(err.span.start_col, 3);
    }
}
