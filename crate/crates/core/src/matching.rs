//! Matching constructions against patterns.
//!
//! A pattern is an ordinary construction whose tokens play the role of typed
//! variables. Exact mode demands a shape-identical correspondence; prefix
//! mode lets pattern leaves cut off whole sub-trees of the construction.
//! Either way the correspondence must be consistent, injective (by default),
//! and map each construction token below its pattern token in the subtype
//! order.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::construction::{Construction, Token, TokenId};
use crate::typesys::TypeSystem;

/// Same representation as a construction, different role.
pub type Pattern = Construction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchMode {
    Exact,
    Prefix,
}

/// A map from pattern token ids to construction tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub map: BTreeMap<TokenId, Token>,
    pub mode: MatchMode,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error("token `{0}` is not bound on the side it anchors")]
    UnboundToken(TokenId),
    #[error("cannot bind pattern token `{pattern}` to `{bound}`: types are incomparable")]
    TypeClash { pattern: Token, bound: Token },
}

struct Matcher<'a> {
    ts: &'a TypeSystem,
    mode: MatchMode,
    injective: bool,
    c_bindings: BTreeMap<TokenId, &'a Construction>,
    p_bindings: BTreeMap<TokenId, &'a Construction>,
}

#[derive(Clone, Default)]
struct MatchState {
    map: BTreeMap<TokenId, Token>,
    used: BTreeSet<TokenId>,
}

impl<'a> Matcher<'a> {
    fn bind(&self, state: &mut MatchState, pattern: &Token, image: &Token) -> bool {
        if let Some(existing) = state.map.get(&pattern.id) {
            // pre-seeded anchors reach here without a prior leq check
            return existing.id == image.id && self.ts.leq(&image.ty, &pattern.ty).unwrap_or(false);
        }
        if self.injective && state.used.contains(&image.id) {
            return false;
        }
        if !self.ts.leq(&image.ty, &pattern.ty).unwrap_or(false) {
            return false;
        }
        state.used.insert(image.id.clone());
        state.map.insert(pattern.id.clone(), image.clone());
        true
    }

    /// The token at the root of a construction node, following a reference
    /// to its binding occurrence.
    fn c_root_token(&self, node: &'a Construction) -> Option<&'a Token> {
        match node {
            Construction::Reference(id) => self.c_bindings.get(id).and_then(|n| n.root_token()),
            _ => node.root_token(),
        }
    }

    fn walk(
        &self,
        state: &mut MatchState,
        p_node: &'a Construction,
        c_node: &'a Construction,
    ) -> bool {
        match p_node {
            Construction::Source(pt) => match self.mode {
                MatchMode::Exact => match c_node {
                    Construction::Source(ct) => self.bind(state, pt, ct),
                    _ => false,
                },
                MatchMode::Prefix => match self.c_root_token(c_node) {
                    Some(ct) => self.bind(state, pt, &ct.clone()),
                    None => false,
                },
            },
            Construction::Reference(px) => match self.mode {
                MatchMode::Exact => match c_node {
                    Construction::Reference(cx) => {
                        let Some(image) = self.c_bindings.get(cx).and_then(|n| n.root_token())
                        else {
                            return false;
                        };
                        self.bind_reference(state, px, image)
                    }
                    _ => false,
                },
                MatchMode::Prefix => match self.c_root_token(c_node) {
                    Some(image) => self.bind_reference(state, px, &image.clone()),
                    None => false,
                },
            },
            Construction::Apply {
                output: po,
                constructor: pc,
                inputs: p_inputs,
            } => {
                let c_node = match (self.mode, c_node) {
                    (MatchMode::Prefix, Construction::Reference(cx)) => {
                        match self.c_bindings.get(cx) {
                            Some(bound) => *bound,
                            None => return false,
                        }
                    }
                    _ => c_node,
                };
                match c_node {
                    Construction::Apply {
                        output: co,
                        constructor: cc,
                        inputs: c_inputs,
                    } => {
                        cc == pc
                            && p_inputs.len() == c_inputs.len()
                            && self.bind(state, po, co)
                            && p_inputs
                                .iter()
                                .zip(c_inputs)
                                .all(|(p, c)| self.walk(state, p, c))
                    }
                    _ => false,
                }
            }
        }
    }

    /// A pattern reference must land on the token its binding occurrence
    /// maps to. Type respect was checked (or will be) at that occurrence.
    fn bind_reference(&self, state: &mut MatchState, px: &TokenId, image: &Token) -> bool {
        if let Some(existing) = state.map.get(px) {
            return existing.id == image.id;
        }
        // the pattern binding occurrence carries the declared type
        let Some(p_token) = self.p_bindings.get(px).and_then(|n| n.root_token()) else {
            return false;
        };
        let p_token = p_token.clone();
        self.bind(state, &p_token, image)
    }
}

/// Root-aligned match of `c` against pattern `p`.
pub fn find_match(
    c: &Construction,
    p: &Pattern,
    ts: &TypeSystem,
    mode: MatchMode,
) -> Option<Matching> {
    find_match_with(c, p, ts, mode, &[], true).ok().flatten()
}

/// A match extending the given `(pattern token, construction token)`
/// anchors. With no anchors this is exactly [`find_match`]; when the
/// pattern root is left un-anchored, candidate construction tokens are
/// tried in leftmost-first order.
pub fn find_match_anchored(
    c: &Construction,
    p: &Pattern,
    ts: &TypeSystem,
    mode: MatchMode,
    anchors: &[(TokenId, TokenId)],
) -> Result<Option<Matching>, MatchingError> {
    find_match_with(c, p, ts, mode, anchors, true)
}

/// Full-control variant: `injective = false` allows several pattern tokens
/// to share one image.
pub fn find_match_with(
    c: &Construction,
    p: &Pattern,
    ts: &TypeSystem,
    mode: MatchMode,
    anchors: &[(TokenId, TokenId)],
    injective: bool,
) -> Result<Option<Matching>, MatchingError> {
    let matcher = Matcher {
        ts,
        mode,
        injective,
        c_bindings: c.binding_map(),
        p_bindings: p.binding_map(),
    };

    let mut seed = MatchState::default();
    for (p_id, c_id) in anchors {
        if !matcher.p_bindings.contains_key(p_id) {
            return Err(MatchingError::UnboundToken(p_id.clone()));
        }
        let image = matcher
            .c_bindings
            .get(c_id)
            .and_then(|n| n.root_token())
            .ok_or_else(|| MatchingError::UnboundToken(c_id.clone()))?;
        seed.used.insert(image.id.clone());
        if let Some(prev) = seed.map.insert(p_id.clone(), image.clone()) {
            if prev.id != image.id {
                return Ok(None);
            }
        }
    }

    let Some(p_root) = p.root_token() else {
        return Ok(None); // a bare reference is not a usable pattern root
    };

    let candidates: Vec<&Construction> = match seed.map.get(&p_root.id) {
        Some(anchored) => match matcher.c_bindings.get(&anchored.id) {
            Some(node) => vec![*node],
            None => return Ok(None),
        },
        None if anchors.is_empty() => vec![c],
        None => {
            // leftmost-first over binding occurrences, pre-order
            let mut nodes = Vec::new();
            collect_binding_nodes(c, &mut nodes, &mut BTreeSet::new());
            nodes
        }
    };

    for candidate in candidates {
        let mut state = seed.clone();
        // an anchored root must still pass the type/consistency checks the
        // walk applies at every other node, so re-walk from the top
        if matcher.walk(&mut state, p, candidate) {
            return Ok(Some(Matching {
                map: state.map,
                mode,
            }));
        }
    }
    Ok(None)
}

fn collect_binding_nodes<'a>(
    node: &'a Construction,
    out: &mut Vec<&'a Construction>,
    seen: &mut BTreeSet<TokenId>,
) {
    if let Some(token) = node.root_token() {
        if seen.insert(token.id.clone()) {
            out.push(node);
        }
    }
    if let Construction::Apply { inputs, .. } = node {
        for input in inputs {
            collect_binding_nodes(input, out, seen);
        }
    }
}

/// Deterministic fresh-name supply: pattern id + `_` + per-run counter.
#[derive(Debug, Default)]
pub struct FreshNamer {
    counter: u64,
}

impl FreshNamer {
    pub fn new() -> Self {
        FreshNamer::default()
    }

    pub fn fresh(&mut self, base: &TokenId) -> TokenId {
        self.counter += 1;
        TokenId::new(format!("{}_{}", base, self.counter)).expect("derived id is valid")
    }
}

/// The output of [`instantiate_with_assignment`].
#[derive(Debug, Clone)]
pub struct Instantiation {
    pub construction: Construction,
    /// Every pattern token id mapped to the token that replaced it.
    pub assignment: BTreeMap<TokenId, Token>,
    /// The subset of the assignment that was freshly invented, in creation order.
    pub fresh_tokens: Vec<Token>,
}

/// Builds a construction shaped like `p`: bound pattern tokens take their
/// bound identities with types refined downward through the meet, unbound
/// ones get fresh ids at the pattern's type.
pub fn instantiate(
    p: &Pattern,
    binding: &BTreeMap<TokenId, Token>,
    ts: &TypeSystem,
    namer: &mut FreshNamer,
) -> Result<Construction, MatchingError> {
    instantiate_with_assignment(p, binding, ts, namer).map(|i| i.construction)
}

pub fn instantiate_with_assignment(
    p: &Pattern,
    binding: &BTreeMap<TokenId, Token>,
    ts: &TypeSystem,
    namer: &mut FreshNamer,
) -> Result<Instantiation, MatchingError> {
    let mut assignment: BTreeMap<TokenId, Token> = BTreeMap::new();
    let mut fresh_tokens = Vec::new();

    // assign tokens in pre-order so fresh names are deterministic
    let mut order: Vec<Token> = Vec::new();
    collect_binding_tokens(p, &mut order, &mut BTreeSet::new());
    for p_token in &order {
        let assigned = match binding.get(&p_token.id) {
            Some(bound) => {
                let ty = ts
                    .meet_if_comparable(&p_token.ty, &bound.ty)
                    .unwrap_or(None)
                    .ok_or_else(|| MatchingError::TypeClash {
                        pattern: p_token.clone(),
                        bound: bound.clone(),
                    })?;
                Token::new(bound.id.clone(), ty)
            }
            None => {
                let token = Token::new(namer.fresh(&p_token.id), p_token.ty.clone());
                fresh_tokens.push(token.clone());
                token
            }
        };
        assignment.insert(p_token.id.clone(), assigned);
    }

    let construction = rebuild(p, &assignment)?;
    Ok(Instantiation {
        construction,
        assignment,
        fresh_tokens,
    })
}

fn collect_binding_tokens(node: &Pattern, out: &mut Vec<Token>, seen: &mut BTreeSet<TokenId>) {
    if let Some(token) = node.root_token() {
        if seen.insert(token.id.clone()) {
            out.push(token.clone());
        }
    }
    if let Construction::Apply { inputs, .. } = node {
        for input in inputs {
            collect_binding_tokens(input, out, seen);
        }
    }
}

fn rebuild(
    node: &Pattern,
    assignment: &BTreeMap<TokenId, Token>,
) -> Result<Construction, MatchingError> {
    let lookup = |id: &TokenId| -> Result<Token, MatchingError> {
        assignment
            .get(id)
            .cloned()
            .ok_or_else(|| MatchingError::UnboundToken(id.clone()))
    };
    Ok(match node {
        Construction::Source(t) => Construction::Source(lookup(&t.id)?),
        Construction::Reference(id) => Construction::Reference(lookup(id)?.id),
        Construction::Apply {
            output,
            constructor,
            inputs,
        } => Construction::Apply {
            output: lookup(&output.id)?,
            constructor: constructor.clone(),
            inputs: inputs
                .iter()
                .map(|i| rebuild(i, assignment))
                .collect::<Result<_, _>>()?,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conspec::{build_con_spec, ConSpec, ConstructorName, ConstructorSig};
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

    fn arith_space() -> (ConSpec, TypeSystem) {
        let ts = build_type_system(
            "arithT",
            &[
                (ty("numeral"), true),
                (ty("var"), true),
                (ty("numExp"), true),
                (ty("formula"), true),
                (ty("plus"), false),
                (ty("minus"), false),
                (ty("binOp"), false),
                (ty("leq"), false),
                (ty("equals"), false),
                (ty("binRel"), false),
            ],
            &[
                (ty("var"), ty("numExp")),
                (ty("numeral"), ty("numExp")),
                (ty("plus"), ty("binOp")),
                (ty("minus"), ty("binOp")),
                (ty("leq"), ty("binRel")),
                (ty("equals"), ty("binRel")),
            ],
        )
        .unwrap();
        let ts = ["1", "2", "3"].iter().fold(ts, |ts, n| {
            ts.register_dynamic_type(&ty(n), &ty("numeral")).unwrap()
        });
        let ts = ts.register_dynamic_type(&ty("x"), &ty("var")).unwrap();
        let ts = ts
            .register_dynamic_type(&ty("1plus2"), &ty("numExp"))
            .unwrap();
        let ts = ts
            .register_dynamic_type(&ty("1plus2plus3"), &ty("numExp"))
            .unwrap();
        let ts = ts
            .register_dynamic_type(&ty("1plus2equalsx"), &ty("formula"))
            .unwrap();
        let cs = build_con_spec(
            "arith",
            &ts,
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
        (cs, ts)
    }

    fn one_plus_two_equals_x() -> Construction {
        Construction::Apply {
            output: tok("t", "1plus2equalsx"),
            constructor: con("infixRel"),
            inputs: vec![
                Construction::Apply {
                    output: tok("t1", "1plus2"),
                    constructor: con("infixOp"),
                    inputs: vec![src("t11", "1"), src("t12", "plus"), src("t13", "2")],
                },
                src("t2", "equals"),
                src("t3", "x"),
            ],
        }
    }

    /// The printed pattern, with the stray `one` leaf encoded as numeral.
    fn rel_pattern() -> Pattern {
        Construction::Apply {
            output: tok("pt", "formula"),
            constructor: con("infixRel"),
            inputs: vec![
                Construction::Apply {
                    output: tok("pt1", "numExp"),
                    constructor: con("infixOp"),
                    inputs: vec![
                        src("pt11", "numeral"),
                        src("pt12", "binOp"),
                        src("pt13", "numExp"),
                    ],
                },
                src("pt2", "binRel"),
                src("pt3", "numExp"),
            ],
        }
    }

    fn one_plus_two_plus_three() -> Construction {
        Construction::Apply {
            output: tok("s", "1plus2plus3"),
            constructor: con("infixOp"),
            inputs: vec![
                Construction::Apply {
                    output: tok("s1", "1plus2"),
                    constructor: con("infixOp"),
                    inputs: vec![src("s11", "1"), src("s12", "plus"), src("s13", "2")],
                },
                src("s2", "plus"),
                src("s3", "3"),
            ],
        }
    }

    fn plus_pattern() -> Pattern {
        Construction::Apply {
            output: tok("t", "numExp"),
            constructor: con("infixOp"),
            inputs: vec![src("n", "numExp"), src("p", "plus"), src("m", "numExp")],
        }
    }

    #[test]
    fn worked_example_matches_the_printed_pattern_exactly() {
        let (_, ts) = arith_space();
        let m = find_match(
            &one_plus_two_equals_x(),
            &rel_pattern(),
            &ts,
            MatchMode::Exact,
        )
        .unwrap();
        assert_eq!(m.map[&id("pt11")], tok("t11", "1"));
        assert_eq!(m.map[&id("pt3")], tok("t3", "x"));
        assert_eq!(m.map.len(), 7);
    }

    #[test]
    fn prefix_leaves_cut_off_sub_trees() {
        let (_, ts) = arith_space();
        let m = find_match(
            &one_plus_two_plus_three(),
            &plus_pattern(),
            &ts,
            MatchMode::Prefix,
        )
        .unwrap();
        assert_eq!(m.map[&id("n")], tok("s1", "1plus2"));
        assert_eq!(m.map[&id("m")], tok("s3", "3"));
        // exact mode refuses: a pattern leaf cannot stand for an apply node
        assert!(find_match(
            &one_plus_two_plus_three(),
            &plus_pattern(),
            &ts,
            MatchMode::Exact
        )
        .is_none());
    }

    #[test]
    fn type_respect_is_mandatory() {
        let (_, ts) = arith_space();
        assert!(find_match(
            &src("a", "plus"),
            &src("v", "binRel"),
            &ts,
            MatchMode::Exact
        )
        .is_none());
        assert!(find_match(&src("a", "plus"), &src("v", "binOp"), &ts, MatchMode::Exact).is_some());
    }

    #[test]
    fn anchored_at_the_root_token() {
        let (_, ts) = arith_space();
        let c = one_plus_two_plus_three();
        let m = find_match_anchored(
            &c,
            &plus_pattern(),
            &ts,
            MatchMode::Prefix,
            &[(id("t"), id("s"))],
        )
        .unwrap()
        .unwrap();
        assert_eq!(m.map[&id("n")], tok("s1", "1plus2"));
    }

    #[test]
    fn anchoring_at_a_leaf_fails_for_an_apply_pattern() {
        let (_, ts) = arith_space();
        let c = one_plus_two_plus_three();
        let m = find_match_anchored(
            &c,
            &plus_pattern(),
            &ts,
            MatchMode::Prefix,
            &[(id("t"), id("s3"))],
        )
        .unwrap();
        assert!(m.is_none());
    }

    #[test]
    fn empty_anchor_list_behaves_as_find_match() {
        let (_, ts) = arith_space();
        let c = one_plus_two_plus_three();
        let a = find_match_anchored(&c, &plus_pattern(), &ts, MatchMode::Prefix, &[]).unwrap();
        let b = find_match(&c, &plus_pattern(), &ts, MatchMode::Prefix);
        assert_eq!(a, b);
    }

    #[test]
    fn non_root_anchor_searches_candidates_leftmost_first() {
        let (_, ts) = arith_space();
        let c = one_plus_two_plus_three();
        // anchoring an inner pattern leaf forces the match down to the
        // nested apply node
        let m = find_match_anchored(
            &c,
            &plus_pattern(),
            &ts,
            MatchMode::Prefix,
            &[(id("n"), id("s11"))],
        )
        .unwrap()
        .unwrap();
        assert_eq!(m.map[&id("t")], tok("s1", "1plus2"));
        assert_eq!(m.map[&id("m")], tok("s13", "2"));
    }

    #[test]
    fn unknown_anchor_ids_error() {
        let (_, ts) = arith_space();
        let c = one_plus_two_plus_three();
        assert!(matches!(
            find_match_anchored(
                &c,
                &plus_pattern(),
                &ts,
                MatchMode::Prefix,
                &[(id("zz"), id("s"))]
            ),
            Err(MatchingError::UnboundToken(_))
        ));
    }

    #[test]
    fn injectivity_is_on_by_default() {
        let (_, ts) = arith_space();
        // the construction feeds the same token into positions 1 and 3
        let c = Construction::Apply {
            output: tok("r", "1plus2"),
            constructor: con("infixOp"),
            inputs: vec![
                src("u", "1"),
                src("o", "plus"),
                Construction::Reference(id("u")),
            ],
        };
        let p = plus_pattern();
        assert!(find_match(&c, &p, &ts, MatchMode::Prefix).is_none());
        let relaxed = find_match_with(&c, &p, &ts, MatchMode::Prefix, &[], false)
            .unwrap()
            .unwrap();
        assert_eq!(relaxed.map[&id("n")].id, id("u"));
        assert_eq!(relaxed.map[&id("m")].id, id("u"));
    }

    #[test]
    fn instantiate_binds_refines_and_freshens() {
        let (_, ts) = arith_space();
        let dot_ts = build_type_system(
            "dotDiagT",
            &[(ty("arr"), true), (ty("dotDiag"), false)],
            &[(ty("arr"), ty("dotDiag"))],
        )
        .unwrap();
        let dot_ts = dot_ts
            .register_dynamic_type(&ty("1arr"), &ty("arr"))
            .unwrap();
        let join_target: Pattern = Construction::Apply {
            output: tok("t'", "arr"),
            constructor: con("join"),
            inputs: vec![src("a", "arr"), src("b", "arr")],
        };
        let mut namer = FreshNamer::new();
        let binding: BTreeMap<TokenId, Token> = [(id("t'"), tok("v1", "arr"))].into();
        let built = instantiate(&join_target, &binding, &dot_ts, &mut namer).unwrap();
        assert_eq!(
            built,
            Construction::Apply {
                output: tok("v1", "arr"),
                constructor: con("join"),
                inputs: vec![src("a_1", "arr"), src("b_2", "arr")],
            }
        );

        // downward refinement through the meet
        let binding: BTreeMap<TokenId, Token> = [(id("v"), tok("w", "1arr"))].into();
        let refined = instantiate(&src("v", "arr"), &binding, &dot_ts, &mut namer).unwrap();
        assert_eq!(refined, src("w", "1arr"));

        // incomparable types clash
        let binding: BTreeMap<TokenId, Token> = [(id("v"), tok("k", "numExp"))].into();
        assert!(matches!(
            instantiate(&src("v", "arr"), &binding, &ts, &mut namer),
            Err(MatchingError::TypeClash { .. })
        ));
    }

    #[test]
    fn instantiated_references_follow_their_binding() {
        let dot_ts = build_type_system(
            "dotDiagT",
            &[(ty("arr"), true), (ty("dotDiag"), false)],
            &[(ty("arr"), ty("dotDiag"))],
        )
        .unwrap();
        let cyclic: Pattern = Construction::Apply {
            output: tok("t'", "arr"),
            constructor: con("rotate"),
            inputs: vec![Construction::Apply {
                output: tok("w", "arr"),
                constructor: con("remove"),
                inputs: vec![src("rct", "arr"), Construction::Reference(id("t'"))],
            }],
        };
        let mut namer = FreshNamer::new();
        let binding: BTreeMap<TokenId, Token> = [(id("t'"), tok("v0", "arr"))].into();
        let built = instantiate(&cyclic, &binding, &dot_ts, &mut namer).unwrap();
        let bindings = built.binding_map();
        assert!(bindings.contains_key(&id("v0")));
        let mut refs = Vec::new();
        fn refs_of(c: &Construction, out: &mut Vec<TokenId>) {
            match c {
                Construction::Reference(x) => out.push(x.clone()),
                Construction::Apply { inputs, .. } => inputs.iter().for_each(|i| refs_of(i, out)),
                Construction::Source(_) => {}
            }
        }
        refs_of(&built, &mut refs);
        assert_eq!(refs, vec![id("v0")]);
    }
}
