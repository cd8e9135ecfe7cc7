//! Graphviz DOT export. Tokens are labelled boxes, constructor occurrences
//! are filled points with the constructor name alongside, input edges carry
//! 1-based argument indices, and the output edge is unlabelled. A token is
//! rendered once however often it occurs, so shared tokens draw their edges
//! back to the existing vertex and cycles come out as cycles.

use std::collections::BTreeSet;
use std::fmt::Write;

use oruga_core::construction::{Construction, Token, TokenId};

#[derive(Debug, Clone)]
pub struct DotOptions {
    pub graph_name: String,
}

impl Default for DotOptions {
    fn default() -> Self {
        DotOptions {
            graph_name: "construction".to_owned(),
        }
    }
}

fn token_node(id: &TokenId) -> String {
    format!("\"t:{id}\"")
}

fn constructor_node(index: usize) -> String {
    format!("\"c:{index}\"")
}

pub fn export_dot(constructions: &[Construction], options: &DotOptions) -> String {
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", options.graph_name).unwrap();
    writeln!(out, "  rankdir=BT;").unwrap();

    let mut declared: BTreeSet<TokenId> = BTreeSet::new();
    let mut constructor_count = 0usize;
    let mut node_lines: Vec<String> = Vec::new();
    let mut edge_lines: Vec<String> = Vec::new();

    let mut declare_token =
        |token: &Token, node_lines: &mut Vec<String>, declared: &mut BTreeSet<TokenId>| {
            if declared.insert(token.id.clone()) {
                node_lines.push(format!(
                    "  {} [shape=box, label=\"{} : {}\"];",
                    token_node(&token.id),
                    token.id,
                    token.ty
                ));
            }
        };

    fn walk(
        node: &Construction,
        constructor_count: &mut usize,
        node_lines: &mut Vec<String>,
        edge_lines: &mut Vec<String>,
        declared: &mut BTreeSet<TokenId>,
        declare_token: &mut impl FnMut(&Token, &mut Vec<String>, &mut BTreeSet<TokenId>),
    ) -> Option<TokenId> {
        match node {
            Construction::Source(token) => {
                declare_token(token, node_lines, declared);
                Some(token.id.clone())
            }
            Construction::Reference(id) => Some(id.clone()),
            Construction::Apply {
                output,
                constructor,
                inputs,
            } => {
                declare_token(output, node_lines, declared);
                let me = *constructor_count;
                *constructor_count += 1;
                node_lines.push(format!(
                    "  {} [shape=point, width=0.12, xlabel=\"{}\"];",
                    constructor_node(me),
                    constructor
                ));
                for (index, input) in inputs.iter().enumerate() {
                    let input_root = walk(
                        input,
                        constructor_count,
                        node_lines,
                        edge_lines,
                        declared,
                        declare_token,
                    );
                    if let Some(root) = input_root {
                        edge_lines.push(format!(
                            "  {} -> {} [label=\"{}\"];",
                            token_node(&root),
                            constructor_node(me),
                            index + 1
                        ));
                    }
                }
                edge_lines.push(format!(
                    "  {} -> {};",
                    constructor_node(me),
                    token_node(&output.id)
                ));
                Some(output.id.clone())
            }
        }
    }

    for construction in constructions {
        let bindings = construction.binding_map();
        // referenced-only tokens still need a vertex with their type
        for node in bindings.values() {
            if let Some(token) = node.root_token() {
                declare_token(token, &mut node_lines, &mut declared);
            }
        }
        walk(
            construction,
            &mut constructor_count,
            &mut node_lines,
            &mut edge_lines,
            &mut declared,
            &mut declare_token,
        );
    }

    for line in node_lines.iter().chain(edge_lines.iter()) {
        writeln!(out, "{line}").unwrap();
    }
    writeln!(out, "}}").unwrap();
    out
}
