//! Command implementations. Each returns the process exit code: 0 for
//! success, 1 for a domain failure (no match, no result, invalid input
//! document), 2 for usage or IO problems.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use oruga_core::construction::TokenId;
use oruga_core::dsl::{parse_document, print_construction_decl, ConstructionDecl, Document};
use oruga_core::matching::{find_match_anchored, MatchMode};
use oruga_core::schema::RelationLabel;
use oruga_core::transfer::{
    composition_to_constructions, DerivationTree, Goal, SearchLimits, Spaces, StepRule,
    TransferContext, TransferResult,
};
use oruga_core::typesys::TypeName;

use crate::dot::{export_dot, DotOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE_IO: i32 = 2;

enum LoadOutcome {
    Ok(Document),
    Io(i32),
    Invalid(i32),
}

fn load_document(paths: &[PathBuf], err: &mut dyn Write) -> LoadOutcome {
    let mut files: Vec<(String, String)> = Vec::new();
    for path in paths {
        match std::fs::read_to_string(path) {
            Ok(text) => files.push((path.display().to_string(), text)),
            Err(e) => {
                let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
                return LoadOutcome::Io(EXIT_USAGE_IO);
            }
        }
    }
    let borrowed: Vec<(&str, &str)> = files
        .iter()
        .map(|(n, t)| (n.as_str(), t.as_str()))
        .collect();
    match parse_document(&borrowed) {
        Ok(doc) => LoadOutcome::Ok(doc),
        Err(diags) => {
            for diag in diags {
                let _ = writeln!(err, "{diag}");
            }
            LoadOutcome::Invalid(EXIT_DOMAIN)
        }
    }
}

macro_rules! load_or_exit {
    ($paths:expr, $err:expr) => {
        match load_document($paths, $err) {
            LoadOutcome::Ok(doc) => doc,
            LoadOutcome::Io(code) | LoadOutcome::Invalid(code) => return code,
        }
    };
}

pub fn cmd_check(paths: &[PathBuf], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let doc = load_or_exit!(paths, err);
    let _ = writeln!(out, "ok: {} declarations", doc.declarations.len());
    EXIT_OK
}

pub fn cmd_closure(
    paths: &[PathBuf],
    type_system: &str,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let doc = load_or_exit!(paths, err);
    let Some(ts) = doc.type_system(type_system) else {
        let _ = writeln!(err, "error: unknown type system `{type_system}`");
        return EXIT_DOMAIN;
    };
    for (a, b) in ts.closure_pairs() {
        let _ = writeln!(out, "{a} <= {b}");
    }
    EXIT_OK
}

fn parse_anchor(text: &str) -> Result<(TokenId, TokenId), String> {
    let (p, t) = text
        .split_once('=')
        .ok_or_else(|| format!("anchor `{text}` is not of the form PATTERN=TOKEN"))?;
    let p = TokenId::new(p.trim()).map_err(|e| e.to_string())?;
    let t = TokenId::new(t.trim()).map_err(|e| e.to_string())?;
    Ok((p, t))
}

pub fn cmd_match(
    paths: &[PathBuf],
    construction: &str,
    pattern: &str,
    prefix: bool,
    anchors: &[String],
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let doc = load_or_exit!(paths, err);
    let Some(con_decl) = doc.construction(construction) else {
        let _ = writeln!(err, "error: unknown construction `{construction}`");
        return EXIT_DOMAIN;
    };
    let Some(pat_decl) = doc.construction(pattern) else {
        let _ = writeln!(err, "error: unknown pattern `{pattern}`");
        return EXIT_DOMAIN;
    };
    if con_decl.space != pat_decl.space {
        let _ = writeln!(
            err,
            "error: `{construction}` lives in `{}` but `{pattern}` in `{}`",
            con_decl.space, pat_decl.space
        );
        return EXIT_DOMAIN;
    }
    let ts = doc
        .type_system_of(&con_decl.space)
        .expect("document invariant");

    let mut anchor_pairs = Vec::new();
    for anchor in anchors {
        match parse_anchor(anchor) {
            Ok(pair) => anchor_pairs.push(pair),
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return EXIT_USAGE_IO;
            }
        }
    }
    let mode = if prefix {
        MatchMode::Prefix
    } else {
        MatchMode::Exact
    };
    match find_match_anchored(
        &con_decl.construction,
        &pat_decl.construction,
        ts,
        mode,
        &anchor_pairs,
    ) {
        Ok(Some(matching)) => {
            for (pattern_id, token) in &matching.map {
                let _ = writeln!(out, "{pattern_id} -> {} : {}", token.id, token.ty);
            }
            EXIT_OK
        }
        Ok(None) => {
            let _ = writeln!(out, "no match");
            EXIT_DOMAIN
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_DOMAIN
        }
    }
}

pub struct TransferOptions {
    pub construction: String,
    pub relation: String,
    pub sought_type: String,
    pub target_space: String,
    pub max_depth: usize,
    pub max_results: usize,
    pub max_expansions: usize,
    pub assume: Vec<String>,
    pub single_construction: bool,
}

fn goal_text(goal: &Goal) -> String {
    let ids = |tokens: &[oruga_core::construction::Token]| {
        tokens
            .iter()
            .map(|t| t.id.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    format!(
        "([{}],[{}]) :: {}",
        ids(&goal.source_tokens),
        ids(&goal.target_vars),
        goal.relation
    )
}

fn render_derivation(tree: &DerivationTree, out: &mut dyn Write, node: usize, indent: usize) {
    let entry = &tree.nodes()[node];
    let suffix = match &entry.step {
        Some(step) => match &step.rule {
            StepRule::Schema(name) => format!("  by {name}"),
            StepRule::Assumed => "  assumed".to_owned(),
        },
        None => "  open".to_owned(),
    };
    let _ = writeln!(
        out,
        "{}{}{}",
        "  ".repeat(indent),
        goal_text(&entry.goal),
        suffix
    );
    if let Some(step) = &entry.step {
        for child in &step.children {
            render_derivation(tree, out, *child, indent + 1);
        }
    }
}

fn print_result(
    result: &TransferResult,
    index: usize,
    target_space: &str,
    target_ts: &oruga_core::typesys::TypeSystem,
    out: &mut dyn Write,
) {
    let _ = writeln!(out, "result {index}:");
    for (j, construction) in composition_to_constructions(result).iter().enumerate() {
        let decl = ConstructionDecl {
            name: format!("result{index}_{}", j + 1),
            space: target_space.to_owned(),
            construction: construction.clone(),
        };
        let text = print_construction_decl(&decl, target_ts);
        for line in text.lines() {
            let _ = writeln!(out, "  {line}");
        }
    }
    let _ = writeln!(out, "  derivation:");
    render_derivation(&result.derivation, out, 0, 2);
    if !result.assumptions.is_empty() {
        let _ = writeln!(out, "  assumptions:");
        for goal in &result.assumptions {
            let _ = writeln!(out, "    {}", goal_text(goal));
        }
    }
}

pub fn cmd_transfer(
    paths: &[PathBuf],
    options: &TransferOptions,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let doc = load_or_exit!(paths, err);
    let Some(con_decl) = doc.construction(&options.construction) else {
        let _ = writeln!(
            err,
            "error: unknown construction `{}`",
            options.construction
        );
        return EXIT_DOMAIN;
    };
    let Some(target_spec) = doc.con_spec(&options.target_space) else {
        let _ = writeln!(
            err,
            "error: unknown target space `{}`",
            options.target_space
        );
        return EXIT_DOMAIN;
    };
    let source_spec = doc.con_spec(&con_decl.space).expect("document invariant");
    let source_types = doc
        .type_system_of(&con_decl.space)
        .expect("document invariant");
    let target_types = doc
        .type_system_of(&options.target_space)
        .expect("document invariant");

    let relation = match RelationLabel::new(options.relation.clone()) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: bad relation: {e}");
            return EXIT_USAGE_IO;
        }
    };
    let sought = match TypeName::new(options.sought_type.clone()) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: bad sought type: {e}");
            return EXIT_USAGE_IO;
        }
    };
    let mut assumable: BTreeSet<RelationLabel> = BTreeSet::new();
    for name in &options.assume {
        match RelationLabel::new(name.clone()) {
            Ok(r) => {
                assumable.insert(r);
            }
            Err(e) => {
                let _ = writeln!(err, "error: bad assumable relation: {e}");
                return EXIT_USAGE_IO;
            }
        }
    }
    let limits = match SearchLimits::new(
        options.max_depth,
        options.max_results,
        options.max_expansions,
        assumable,
    ) {
        Ok(l) => l,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE_IO;
        }
    };

    let schemas = doc.schemas_bridging(&con_decl.space, &options.target_space);
    if schemas.is_empty() {
        let _ = writeln!(
            err,
            "warning: no applicable schema bridges ({},{})",
            con_decl.space, options.target_space
        );
        return EXIT_DOMAIN;
    }

    let root = con_decl
        .construction
        .root_token()
        .expect("validated constructions have a root token")
        .id
        .clone();
    let spaces = Spaces {
        source_spec,
        source_types,
        target_spec,
        target_types,
    };
    let mut ctx = TransferContext::new(&con_decl.construction, spaces);
    ctx.single_construction = options.single_construction;
    let outcome = match ctx.search(relation, &[root], &sought, &schemas, &limits) {
        Ok(outcome) => outcome,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_DOMAIN;
        }
    };
    for (i, result) in outcome.results.iter().enumerate() {
        print_result(result, i + 1, &options.target_space, target_types, out);
    }
    let _ = writeln!(
        out,
        "{} results, {} expansions, limit-hit: {}",
        outcome.results.len(),
        outcome.expansions,
        if outcome.limit_hit { "yes" } else { "no" }
    );
    if outcome.results.is_empty() {
        let _ = writeln!(
            err,
            "{}",
            if outcome.limit_hit {
                "no results (limits hit)"
            } else {
                "no results"
            }
        );
        return EXIT_DOMAIN;
    }
    EXIT_OK
}

pub fn cmd_export_dot(
    paths: &[PathBuf],
    construction: &str,
    output: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let doc = load_or_exit!(paths, err);
    let Some(con_decl) = doc.construction(construction) else {
        let _ = writeln!(err, "error: unknown construction `{construction}`");
        return EXIT_DOMAIN;
    };
    let dot = export_dot(
        std::slice::from_ref(&con_decl.construction),
        &DotOptions {
            graph_name: construction.to_owned(),
        },
    );
    match output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, dot) {
                let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
                return EXIT_USAGE_IO;
            }
        }
        None => {
            let _ = write!(out, "{dot}");
        }
    }
    EXIT_OK
}
