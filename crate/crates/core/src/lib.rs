//! Core library of oruga: declare typed representational spaces, build and
//! validate constructions of tokens, match constructions against patterns,
//! and run backward-chaining structure transfer to construct a target-space
//! counterpart standing in a desired relation to a source construction.

pub mod conspec;
pub mod construction;
pub mod dsl;
pub mod ident;
pub mod matching;
pub mod schema;
pub mod transfer;
pub mod typesys;

pub use conspec::{build_con_spec, ConSpec, ConSpecError, ConstructorName, ConstructorSig};
pub use construction::{
    validate, Construction, ConstructionError, Token, TokenId, ValidationReport, Violation,
};
pub use matching::{
    find_match, find_match_anchored, find_match_with, instantiate, instantiate_with_assignment,
    FreshNamer, MatchMode, Matching, MatchingError, Pattern,
};
pub use schema::{
    build_schema, schema_arity_report, RelConstraint, RelationLabel, SchemaArityReport,
    SchemaError, TransferSchema,
};
pub use transfer::{
    composition_to_constructions, equal_compositions_up_to_renaming, results_equivalent,
    DerivationTree, Goal, SearchLimits, SearchOutcome, Spaces, StepRule, TargetComposition,
    TransferContext, TransferError, TransferResult, TransferState,
};
pub use typesys::{build_type_system, compute_closure, TypeName, TypeSysError, TypeSystem};
