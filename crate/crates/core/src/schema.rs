//! Transfer schemas: inference rules for deriving relations that cross
//! construction spaces. A schema pairs a source-space pattern with a
//! target-space pattern under antecedent constraints and one consequent.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::conspec::ConSpec;
use crate::construction::{validate, TokenId, ValidationReport};
use crate::ident::{self, IdentError};
use crate::matching::Pattern;
use crate::typesys::TypeSystem;

/// An uninterpreted relation name such as `rep` or `disj`. Meaning comes
/// from which schemas can discharge it, not from the engine.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelationLabel(String);

impl RelationLabel {
    pub fn new(text: impl Into<String>) -> Result<Self, IdentError> {
        let text = text.into();
        ident::validate_identifier(&text)?;
        Ok(RelationLabel(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RelationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for RelationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RelationLabel({})", self.0)
    }
}

/// `([source pattern tokens],[target pattern tokens]) :: relation`.
/// Either list may be empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelConstraint {
    pub source_tokens: Vec<TokenId>,
    pub target_tokens: Vec<TokenId>,
    pub relation: RelationLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemaSide {
    Source,
    Target,
}

impl fmt::Display for SchemaSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemaSide::Source => "source",
            SchemaSide::Target => "target",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("invalid name: {0}")]
    InvalidName(#[from] IdentError),
    #[error("{side} pattern is invalid: {}", render_report(.report))]
    PatternInvalid {
        side: SchemaSide,
        report: ValidationReport,
    },
    #[error("constraint token `{id}` does not occur in the {side} pattern")]
    DanglingConstraintToken { side: SchemaSide, id: TokenId },
    #[error("the consequent must name tokens on at least one side")]
    EmptyConsequent,
    #[error("unknown space `{0}`")]
    UnknownSpace(String),
}

fn render_report(report: &ValidationReport) -> String {
    report
        .violations()
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferSchema {
    pub name: String,
    pub source_space: String,
    pub target_space: String,
    pub source_pattern: Pattern,
    pub target_pattern: Pattern,
    pub antecedents: Vec<RelConstraint>,
    pub consequent: RelConstraint,
}

#[allow(clippy::too_many_arguments)]
pub fn build_schema(
    name: &str,
    source: (&ConSpec, &TypeSystem),
    target: (&ConSpec, &TypeSystem),
    source_pattern: Pattern,
    target_pattern: Pattern,
    antecedents: Vec<RelConstraint>,
    consequent: RelConstraint,
) -> Result<TransferSchema, SchemaError> {
    ident::validate_identifier(name)?;

    for (side, pattern, (cs, ts)) in [
        (SchemaSide::Source, &source_pattern, &source),
        (SchemaSide::Target, &target_pattern, &target),
    ] {
        let report = validate(pattern, cs, ts);
        if !report.is_ok() {
            return Err(SchemaError::PatternInvalid { side, report });
        }
    }

    let source_ids: BTreeSet<TokenId> = source_pattern
        .tokens_of()
        .into_iter()
        .map(|t| t.id)
        .collect();
    let target_ids: BTreeSet<TokenId> = target_pattern
        .tokens_of()
        .into_iter()
        .map(|t| t.id)
        .collect();
    for constraint in antecedents.iter().chain([&consequent]) {
        for id in &constraint.source_tokens {
            if !source_ids.contains(id) {
                return Err(SchemaError::DanglingConstraintToken {
                    side: SchemaSide::Source,
                    id: id.clone(),
                });
            }
        }
        for id in &constraint.target_tokens {
            if !target_ids.contains(id) {
                return Err(SchemaError::DanglingConstraintToken {
                    side: SchemaSide::Target,
                    id: id.clone(),
                });
            }
        }
    }
    if consequent.source_tokens.is_empty() && consequent.target_tokens.is_empty() {
        return Err(SchemaError::EmptyConsequent);
    }

    Ok(TransferSchema {
        name: name.to_owned(),
        source_space: source.0.name().to_owned(),
        target_space: target.0.name().to_owned(),
        source_pattern,
        target_pattern,
        antecedents,
        consequent,
    })
}

/// Small summary used by search diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaArityReport {
    pub source_tokens: usize,
    pub target_tokens: usize,
    pub antecedents: usize,
    /// True iff the schema has no antecedents and so discharges a goal outright.
    pub base: bool,
}

pub fn schema_arity_report(schema: &TransferSchema) -> SchemaArityReport {
    SchemaArityReport {
        source_tokens: schema.source_pattern.tokens_of().len(),
        target_tokens: schema.target_pattern.tokens_of().len(),
        antecedents: schema.antecedents.len(),
        base: schema.antecedents.is_empty(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conspec::{build_con_spec, ConstructorName, ConstructorSig};
    use crate::construction::{Construction, Token};
    use crate::typesys::{build_type_system, TypeName};

    fn ty(s: &str) -> TypeName {
        TypeName::new(s).unwrap()
    }

    fn id(s: &str) -> TokenId {
        TokenId::new(s).unwrap()
    }

    fn tok(i: &str, t: &str) -> Token {
        Token::new(id(i), ty(t))
    }

    fn con(s: &str) -> ConstructorName {
        ConstructorName::new(s).unwrap()
    }

    fn src(i: &str, t: &str) -> Construction {
        Construction::Source(tok(i, t))
    }

    fn rel(s: &str) -> RelationLabel {
        RelationLabel::new(s).unwrap()
    }

    fn spaces() -> ((ConSpec, TypeSystem), (ConSpec, TypeSystem)) {
        let arith_ts = build_type_system(
            "arithT",
            &[
                (ty("numeral"), true),
                (ty("numExp"), true),
                (ty("formula"), true),
                (ty("plus"), false),
                (ty("binOp"), false),
                (ty("equals"), false),
                (ty("binRel"), false),
            ],
            &[
                (ty("numeral"), ty("numExp")),
                (ty("plus"), ty("binOp")),
                (ty("equals"), ty("binRel")),
            ],
        )
        .unwrap()
        .register_dynamic_type(&ty("1"), &ty("numeral"))
        .unwrap();
        let arith = build_con_spec(
            "arith",
            &arith_ts,
            &[
                (
                    con("infixOp"),
                    ConstructorSig {
                        inputs: vec![ty("numExp"), ty("binOp"), ty("numExp")],
                        output: ty("numExp"),
                    },
                ),
                (
                    con("infixRel"),
                    ConstructorSig {
                        inputs: vec![ty("numExp"), ty("binRel"), ty("numExp")],
                        output: ty("formula"),
                    },
                ),
            ],
        )
        .unwrap();
        let dot_ts = build_type_system(
            "dotDiagT",
            &[(ty("arr"), true), (ty("dotDiag"), false)],
            &[(ty("arr"), ty("dotDiag"))],
        )
        .unwrap()
        .register_dynamic_type(&ty("1arr"), &ty("arr"))
        .unwrap();
        let dots = build_con_spec(
            "dotDiagrams",
            &dot_ts,
            &[
                (
                    con("join"),
                    ConstructorSig {
                        inputs: vec![ty("dotDiag"), ty("dotDiag")],
                        output: ty("dotDiag"),
                    },
                ),
                (
                    con("rotate"),
                    ConstructorSig {
                        inputs: vec![ty("dotDiag")],
                        output: ty("dotDiag"),
                    },
                ),
            ],
        )
        .unwrap();
        ((arith, arith_ts), (dots, dot_ts))
    }

    fn plus_source() -> Pattern {
        Construction::Apply {
            output: tok("t", "numExp"),
            constructor: con("infixOp"),
            inputs: vec![src("n", "numExp"), src("p", "plus"), src("m", "numExp")],
        }
    }

    fn join_target() -> Pattern {
        Construction::Apply {
            output: tok("t'", "arr"),
            constructor: con("join"),
            inputs: vec![src("a", "arr"), src("b", "arr")],
        }
    }

    fn plus_join(antecedent_ids: bool) -> Result<TransferSchema, SchemaError> {
        let ((arith, arith_ts), (dots, dot_ts)) = spaces();
        let q = if antecedent_ids { "n" } else { "q" };
        build_schema(
            "plusJoin",
            (&arith, &arith_ts),
            (&dots, &dot_ts),
            plus_source(),
            join_target(),
            vec![
                RelConstraint {
                    source_tokens: vec![id(q)],
                    target_tokens: vec![id("a")],
                    relation: rel("rep"),
                },
                RelConstraint {
                    source_tokens: vec![id("m")],
                    target_tokens: vec![id("b")],
                    relation: rel("rep"),
                },
                RelConstraint {
                    source_tokens: vec![],
                    target_tokens: vec![id("a"), id("b")],
                    relation: rel("disj"),
                },
            ],
            RelConstraint {
                source_tokens: vec![id("t")],
                target_tokens: vec![id("t'")],
                relation: rel("rep"),
            },
        )
    }

    #[test]
    fn plus_join_as_printed_is_valid() {
        let schema = plus_join(true).unwrap();
        let report = schema_arity_report(&schema);
        assert_eq!(
            report,
            SchemaArityReport {
                source_tokens: 4,
                target_tokens: 3,
                antecedents: 3,
                base: false
            }
        );
    }

    #[test]
    fn base_schema_with_no_antecedents() {
        let ((arith, arith_ts), (dots, dot_ts)) = spaces();
        let schema = build_schema(
            "oneRep",
            (&arith, &arith_ts),
            (&dots, &dot_ts),
            src("n", "1"),
            src("a", "1arr"),
            vec![],
            RelConstraint {
                source_tokens: vec![id("n")],
                target_tokens: vec![id("a")],
                relation: rel("rep"),
            },
        )
        .unwrap();
        assert!(schema_arity_report(&schema).base);
    }

    #[test]
    fn equation_style_single_token_target() {
        let ((arith, arith_ts), (dots, dot_ts)) = spaces();
        let source = Construction::Apply {
            output: tok("tf", "formula"),
            constructor: con("infixRel"),
            inputs: vec![src("n", "numExp"), src("e", "equals"), src("m", "numExp")],
        };
        let schema = build_schema(
            "eqDiag",
            (&arith, &arith_ts),
            (&dots, &dot_ts),
            source,
            src("td", "dotDiag"),
            vec![
                RelConstraint {
                    source_tokens: vec![id("n")],
                    target_tokens: vec![id("td")],
                    relation: rel("rep"),
                },
                RelConstraint {
                    source_tokens: vec![id("m")],
                    target_tokens: vec![id("td")],
                    relation: rel("rep"),
                },
            ],
            RelConstraint {
                source_tokens: vec![id("tf")],
                target_tokens: vec![id("td")],
                relation: rel("rep"),
            },
        )
        .unwrap();
        let report = schema_arity_report(&schema);
        assert_eq!(
            (
                report.source_tokens,
                report.target_tokens,
                report.antecedents
            ),
            (4, 1, 2)
        );
        assert!(!report.base);
    }

    #[test]
    fn dangling_constraint_tokens_are_rejected() {
        let err = plus_join(false).unwrap_err();
        assert!(
            matches!(err, SchemaError::DanglingConstraintToken { id, .. } if id.as_str() == "q")
        );
    }

    #[test]
    fn invalid_patterns_are_rejected() {
        let ((arith, arith_ts), (dots, dot_ts)) = spaces();
        let err = build_schema(
            "bad",
            (&arith, &arith_ts),
            (&dots, &dot_ts),
            src("n", "arr"), // wrong space: arr is unknown in arithT
            src("a", "arr"),
            vec![],
            RelConstraint {
                source_tokens: vec![id("n")],
                target_tokens: vec![id("a")],
                relation: rel("rep"),
            },
        )
        .unwrap_err();
        assert!(matches!(
            err,
            SchemaError::PatternInvalid {
                side: SchemaSide::Source,
                ..
            }
        ));
    }

    #[test]
    fn consequent_needs_a_token_somewhere() {
        let ((arith, arith_ts), (dots, dot_ts)) = spaces();
        let err = build_schema(
            "empty",
            (&arith, &arith_ts),
            (&dots, &dot_ts),
            src("n", "1"),
            src("a", "1arr"),
            vec![],
            RelConstraint {
                source_tokens: vec![],
                target_tokens: vec![],
                relation: rel("rep"),
            },
        )
        .unwrap_err();
        assert_eq!(err, SchemaError::EmptyConsequent);
    }
}
