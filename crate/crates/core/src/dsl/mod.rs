//! The declaration language: lexer, parser, and pretty-printer for
//! `.oruga` files holding type systems, constructor specifications,
//! constructions, and transfer schemas.

pub mod lexer;
pub mod parser;
pub mod printer;

pub use lexer::{tokenize, Diagnostic, Keyword, Lex, Lexeme, SourceSpan};
pub use parser::{
    parse_construction_term, parse_document, parse_document_str, ConstructionDecl, Declaration,
    Document,
};
pub use printer::{print_construction, print_construction_decl, print_document, print_schema};
