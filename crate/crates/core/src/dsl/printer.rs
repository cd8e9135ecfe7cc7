//! Canonical pretty-printer. Parsing the output of `print_document` yields
//! a structurally equal document; dynamic types round-trip because their
//! binding occurrences are printed as triple annotations.

use std::collections::BTreeSet;

use crate::conspec::ConSpec;
use crate::construction::{Construction, Token, TokenId};
use crate::schema::{RelConstraint, TransferSchema};
use crate::typesys::TypeSystem;

use super::parser::{ConstructionDecl, Declaration, Document};

fn token_ann(token: &Token, ts: &TypeSystem) -> String {
    match ts.dynamic_types().get(&token.ty) {
        Some(parent) => format!("{}:{}:{}", token.id, token.ty, parent),
        None => format!("{}:{}", token.id, token.ty),
    }
}

/// One construction body as a term, references printed bare.
pub fn print_construction(c: &Construction, ts: &TypeSystem) -> String {
    match c {
        Construction::Source(t) => token_ann(t, ts),
        Construction::Reference(id) => id.to_string(),
        Construction::Apply {
            output,
            constructor,
            inputs,
        } => {
            let items: Vec<String> = inputs.iter().map(|i| print_construction(i, ts)).collect();
            format!(
                "{} <- {}[{}]",
                token_ann(output, ts),
                constructor,
                items.join(", ")
            )
        }
    }
}

fn print_rel(
    rel: &RelConstraint,
    pattern_types: impl Fn(&TokenId, bool) -> Option<String>,
) -> String {
    let side = |ids: &[TokenId], source: bool| -> String {
        ids.iter()
            .map(|id| match pattern_types(id, source) {
                Some(ty) => format!("{id}:{ty}"),
                None => id.to_string(),
            })
            .collect::<Vec<_>>()
            .join(",")
    };
    format!(
        "([{}],[{}]) :: {}",
        side(&rel.source_tokens, true),
        side(&rel.target_tokens, false),
        rel.relation
    )
}

pub fn print_schema(
    schema: &TransferSchema,
    source_ts: &TypeSystem,
    target_ts: &TypeSystem,
) -> String {
    let lookup = |id: &TokenId, source: bool| -> Option<String> {
        let pattern = if source {
            &schema.source_pattern
        } else {
            &schema.target_pattern
        };
        pattern
            .binding_map()
            .get(id)
            .and_then(|n| n.root_token())
            .map(|t| t.ty.to_string())
    };
    let mut out = String::new();
    out.push_str(&format!(
        "tSchema {}:({},{}) =\n",
        schema.name, schema.source_space, schema.target_space
    ));
    out.push_str(&format!(
        "  source {}\n",
        print_construction(&schema.source_pattern, source_ts)
    ));
    out.push_str(&format!(
        "  target {}\n",
        print_construction(&schema.target_pattern, target_ts)
    ));
    if !schema.antecedents.is_empty() {
        let rels: Vec<String> = schema
            .antecedents
            .iter()
            .map(|r| print_rel(r, lookup))
            .collect();
        out.push_str(&format!("  antecedent {}\n", rels.join(",\n             ")));
    }
    out.push_str(&format!(
        "  consequent {}\n",
        print_rel(&schema.consequent, lookup)
    ));
    out
}

fn print_type_system(ts: &TypeSystem) -> String {
    let types: Vec<String> = ts
        .declared_types()
        .iter()
        .map(|t| {
            if ts.is_open_family(t) {
                format!("_:{t}")
            } else {
                t.to_string()
            }
        })
        .collect();
    let mut out = format!("typeSystem {} =\n  types {}\n", ts.name(), types.join(", "));
    let order: &BTreeSet<_> = ts.declared_order();
    if !order.is_empty() {
        let entries: Vec<String> = order.iter().map(|(a, b)| format!("{a} < {b}")).collect();
        out.push_str(&format!("  order {}\n", entries.join(", ")));
    }
    out
}

fn print_con_spec(cs: &ConSpec) -> String {
    let decls: Vec<String> = cs
        .constructors()
        .iter()
        .map(|(name, sig)| {
            let inputs: Vec<String> = sig.inputs.iter().map(|t| t.to_string()).collect();
            format!("  {} : [{}] -> {}", name, inputs.join(","), sig.output)
        })
        .collect();
    format!(
        "conSpec {}:{} =\n{}\n",
        cs.name(),
        cs.type_system_name(),
        decls.join(",\n")
    )
}

pub fn print_construction_decl(decl: &ConstructionDecl, ts: &TypeSystem) -> String {
    format!(
        "construction {}:{} =\n  {}\n",
        decl.name,
        decl.space,
        print_construction(&decl.construction, ts)
    )
}

pub fn print_document(doc: &Document) -> String {
    let mut blocks = Vec::new();
    for decl in &doc.declarations {
        let block = match decl {
            Declaration::TypeSystem(ts) => print_type_system(ts),
            Declaration::ConSpec(cs) => print_con_spec(cs),
            Declaration::Construction(c) => {
                let ts = doc
                    .type_system_of(&c.space)
                    .expect("document invariant: space resolves");
                print_construction_decl(c, ts)
            }
            Declaration::Schema(s) => {
                let source_ts = doc
                    .type_system_of(&s.source_space)
                    .expect("document invariant: source space resolves");
                let target_ts = doc
                    .type_system_of(&s.target_space)
                    .expect("document invariant: target space resolves");
                print_schema(s, source_ts, target_ts)
            }
        };
        blocks.push(block);
    }
    blocks.join("\n")
}
