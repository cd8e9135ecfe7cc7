//! Naive reference computations: fixed-point reachability for subtype
//! closures, exhaustive map enumeration for matching, and a structural
//! arity scan.

use std::collections::{BTreeMap, BTreeSet};

use oruga_core::construction::{Construction, Token, TokenId};
use oruga_core::matching::{MatchMode, Matching, Pattern};
use oruga_core::typesys::TypeSystem;

/// Fixed-point iteration: start from reflexive pairs plus the given edges
/// and keep adding compositions until nothing changes.
pub fn reachability_closure(
    edges: &[(String, String)],
    universe: &[String],
) -> BTreeSet<(String, String)> {
    let mut closure: BTreeSet<(String, String)> = BTreeSet::new();
    for n in universe {
        closure.insert((n.clone(), n.clone()));
    }
    for (a, b) in edges {
        closure.insert((a.clone(), a.clone()));
        closure.insert((b.clone(), b.clone()));
        closure.insert((a.clone(), b.clone()));
    }
    loop {
        let mut additions = Vec::new();
        for (a, b) in &closure {
            for (c, d) in &closure {
                if b == c && !closure.contains(&(a.clone(), d.clone())) {
                    additions.push((a.clone(), d.clone()));
                }
            }
        }
        if additions.is_empty() {
            return closure;
        }
        closure.extend(additions);
    }
}

fn binding_tokens(c: &Construction) -> Vec<Token> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    fn walk(node: &Construction, out: &mut Vec<Token>, seen: &mut BTreeSet<TokenId>) {
        match node {
            Construction::Source(t) => {
                if seen.insert(t.id.clone()) {
                    out.push(t.clone());
                }
            }
            Construction::Reference(_) => {}
            Construction::Apply { output, inputs, .. } => {
                if seen.insert(output.id.clone()) {
                    out.push(output.clone());
                }
                for input in inputs {
                    walk(input, out, seen);
                }
            }
        }
    }
    walk(c, &mut out, &mut seen);
    out
}

/// Exhaustively enumerates injective pattern-token-to-construction-token
/// maps and asks whether any is a root-aligned embedding that extends the
/// anchors. Factorial in the pattern size; use at desk scale only.
pub fn brute_force_match_exists(
    c: &Construction,
    p: &Pattern,
    ts: &TypeSystem,
    mode: MatchMode,
    anchors: &[(TokenId, TokenId)],
) -> bool {
    let p_tokens: Vec<Token> = binding_tokens(p);
    let c_tokens: Vec<Token> = binding_tokens(c);
    let Some(p_root) = p.root_token() else {
        return false;
    };
    let c_root = c.root_token();

    let mut assignment: BTreeMap<TokenId, TokenId> = BTreeMap::new();
    for (pid, cid) in anchors {
        assignment.insert(pid.clone(), cid.clone());
    }

    fn enumerate(
        remaining: &[Token],
        c_tokens: &[Token],
        assignment: &mut BTreeMap<TokenId, TokenId>,
        check: &dyn Fn(&BTreeMap<TokenId, TokenId>) -> bool,
    ) -> bool {
        let Some(next) = remaining.first() else {
            return check(assignment);
        };
        if assignment.contains_key(&next.id) {
            return enumerate(&remaining[1..], c_tokens, assignment, check);
        }
        for candidate in c_tokens {
            if assignment.values().any(|used| used == &candidate.id) {
                continue;
            }
            assignment.insert(next.id.clone(), candidate.id.clone());
            if enumerate(&remaining[1..], c_tokens, assignment, check) {
                return true;
            }
            assignment.remove(&next.id);
        }
        false
    }

    let root_constraint = |map: &BTreeMap<TokenId, TokenId>| -> bool {
        if anchors.is_empty() {
            // root-aligned, as find_match is
            match c_root {
                Some(root) => map.get(&p_root.id) == Some(&root.id),
                None => false,
            }
        } else {
            true
        }
    };
    let check = |map: &BTreeMap<TokenId, TokenId>| -> bool {
        root_constraint(map) && {
            // the embedding must start at the image of the pattern root
            let c_bindings = c.binding_map();
            let Some(image) = map.get(&p_root.id) else {
                return false;
            };
            let Some(start) = c_bindings.get(image) else {
                return false;
            };
            check_embedding_rooted(start, p, map, ts, mode, &c_bindings)
        }
    };
    enumerate(&p_tokens, &c_tokens, &mut assignment, &check)
}

/// Structural check that a *given, complete* map embeds `p` at `start`.
/// Verifies conditions node by node instead of searching, so it stays
/// independent of the matcher's algorithm.
fn check_embedding_rooted(
    start: &Construction,
    p: &Pattern,
    map: &BTreeMap<TokenId, TokenId>,
    ts: &TypeSystem,
    mode: MatchMode,
    c_bindings: &BTreeMap<TokenId, &Construction>,
) -> bool {
    let token_of = |node: &Construction| -> Option<Token> {
        match node {
            Construction::Reference(id) => c_bindings.get(id).and_then(|n| n.root_token()).cloned(),
            _ => node.root_token().cloned(),
        }
    };
    let p_bindings = p.binding_map();
    #[allow(clippy::too_many_arguments)]
    fn node_check(
        p_node: &Pattern,
        c_node: &Construction,
        map: &BTreeMap<TokenId, TokenId>,
        ts: &TypeSystem,
        mode: MatchMode,
        c_bindings: &BTreeMap<TokenId, &Construction>,
        token_of: &dyn Fn(&Construction) -> Option<Token>,
        p_bindings: &BTreeMap<TokenId, &Construction>,
    ) -> bool {
        match p_node {
            Construction::Source(pt) => {
                let Some(image) = token_of(c_node) else {
                    return false;
                };
                map.get(&pt.id) == Some(&image.id)
                    && (mode == MatchMode::Prefix || matches!(c_node, Construction::Source(_)))
                    && ts.leq(&image.ty, &pt.ty).unwrap_or(false)
            }
            Construction::Reference(px) => {
                let Some(image) = token_of(c_node) else {
                    return false;
                };
                if map.get(px) != Some(&image.id) {
                    return false;
                }
                if mode == MatchMode::Exact && !matches!(c_node, Construction::Reference(_)) {
                    return false;
                }
                let Some(p_token) = p_bindings.get(px).and_then(|n| n.root_token()) else {
                    return false;
                };
                ts.leq(&image.ty, &p_token.ty).unwrap_or(false)
            }
            Construction::Apply {
                output: po,
                constructor: pc,
                inputs: pi,
            } => {
                let resolved = match (mode, c_node) {
                    (MatchMode::Prefix, Construction::Reference(cx)) => match c_bindings.get(cx) {
                        Some(node) => *node,
                        None => return false,
                    },
                    _ => c_node,
                };
                let Construction::Apply {
                    output: co,
                    constructor: cc,
                    inputs: ci,
                } = resolved
                else {
                    return false;
                };
                cc == pc
                    && pi.len() == ci.len()
                    && map.get(&po.id) == Some(&co.id)
                    && ts.leq(&co.ty, &po.ty).unwrap_or(false)
                    && pi.iter().zip(ci).all(|(p, c)| {
                        node_check(p, c, map, ts, mode, c_bindings, token_of, p_bindings)
                    })
            }
        }
    }
    node_check(p, start, map, ts, mode, c_bindings, &token_of, &p_bindings)
}

/// Asserts the three matching invariants on a returned matching:
/// consistency (one image per pattern token), injectivity, type respect.
pub fn check_matching_invariants(
    matching: &Matching,
    c: &Construction,
    p: &Pattern,
    ts: &TypeSystem,
) -> Result<(), String> {
    let p_tokens = binding_tokens(p);
    let c_token_ids: BTreeSet<TokenId> = binding_tokens(c).into_iter().map(|t| t.id).collect();
    if matching.map.len() != p_tokens.len() {
        return Err(format!(
            "matching covers {} of {} pattern tokens",
            matching.map.len(),
            p_tokens.len()
        ));
    }
    let mut used = BTreeSet::new();
    for p_token in &p_tokens {
        let Some(image) = matching.map.get(&p_token.id) else {
            return Err(format!("pattern token `{}` has no image", p_token.id));
        };
        if !c_token_ids.contains(&image.id) {
            return Err(format!("image `{}` is not a construction token", image.id));
        }
        if !used.insert(image.id.clone()) {
            return Err(format!("image `{}` used twice (injectivity)", image.id));
        }
        if !ts.leq(&image.ty, &p_token.ty).unwrap_or(false) {
            return Err(format!(
                "type respect fails: {} is not below {}",
                image, p_token.ty
            ));
        }
    }
    Ok(())
}

/// Re-asserts, by a plain scan, that every apply node has as many inputs as
/// its constructor's declared arity.
pub fn scan_arities(c: &Construction, cs: &oruga_core::conspec::ConSpec) -> Result<(), String> {
    match c {
        Construction::Apply {
            constructor,
            inputs,
            ..
        } => {
            let sig = cs.signature_of(constructor).map_err(|e| e.to_string())?;
            if sig.arity() != inputs.len() {
                return Err(format!(
                    "`{constructor}` declared arity {} but applied to {} inputs",
                    sig.arity(),
                    inputs.len()
                ));
            }
            for input in inputs {
                scan_arities(input, cs)?;
            }
            Ok(())
        }
        _ => Ok(()),
    }
}
