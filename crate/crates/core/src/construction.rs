//! Constructions: one way in which one token is constructed. A finite tree
//! of typed tokens joined by constructor applications, where a token that is
//! used more than once re-enters as a `Reference`. The induced token graph
//! may be cyclic even though the tree is finite.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::conspec::{ConSpec, ConstructorName};
use crate::ident::{self, IdentError};
use crate::typesys::{TypeName, TypeSystem};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TokenId(String);

impl TokenId {
    pub fn new(text: impl Into<String>) -> Result<Self, IdentError> {
        let text = text.into();
        ident::validate_identifier(&text)?;
        Ok(TokenId(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TokenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for TokenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TokenId({})", self.0)
    }
}

/// A typed token occurrence.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Token {
    pub id: TokenId,
    pub ty: TypeName,
}

impl Token {
    pub fn new(id: TokenId, ty: TypeName) -> Self {
        Token { id, ty }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.id, self.ty)
    }
}

impl fmt::Debug for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Token({}:{})", self.id, self.ty)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Construction {
    /// A leaf token introduced here.
    Source(Token),
    /// A re-use of a token bound elsewhere in the same construction.
    Reference(TokenId),
    /// A constructor application producing `output` from `inputs`.
    Apply {
        output: Token,
        constructor: ConstructorName,
        inputs: Vec<Construction>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("token `{0}` is not bound in this construction")]
    UnboundToken(TokenId),
    #[error("rename map is not injective: `{0}` and `{1}` share an image")]
    NonInjectiveRename(TokenId, TokenId),
    #[error("rename map has no entry for token `{0}`")]
    IncompleteRename(TokenId),
}

/// One problem found by [`validate`]. Reported, never thrown.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("unknown constructor `{0}`")]
    UnknownConstructor(ConstructorName),
    #[error("`{constructor}` expects {expected} inputs, found {found}")]
    ArityMismatch {
        constructor: ConstructorName,
        expected: usize,
        found: usize,
    },
    #[error("token `{id}` has unknown type `{ty}`")]
    UnknownType { id: TokenId, ty: TypeName },
    #[error("output token `{token}` is not a subtype of `{expected}` (output of `{constructor}`)")]
    OutputTypeViolation {
        token: Token,
        constructor: ConstructorName,
        expected: TypeName,
    },
    #[error("input {index} of `{constructor}`: token `{token}` is not a subtype of `{expected}`")]
    InputTypeViolation {
        constructor: ConstructorName,
        index: usize,
        token: Token,
        expected: TypeName,
    },
    #[error("reference to `{0}` does not resolve to any bound token")]
    UnresolvedReference(TokenId),
    #[error("token `{id}` is bound with two different types: `{first}` and `{second}`")]
    InconsistentTokenType {
        id: TokenId,
        first: TypeName,
        second: TypeName,
    },
    #[error("token `{0}` is bound more than once")]
    DuplicateBinding(TokenId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn into_violations(self) -> Vec<Violation> {
        self.violations
    }
}

impl Construction {
    /// The token introduced at this node, if any. References introduce none.
    pub fn root_token(&self) -> Option<&Token> {
        match self {
            Construction::Source(t) => Some(t),
            Construction::Apply { output, .. } => Some(output),
            Construction::Reference(_) => None,
        }
    }

    /// Binding occurrences by id: the `Source` leaf or `Apply` node that
    /// introduces each token. First occurrence wins for (invalid) duplicates.
    pub fn binding_map(&self) -> BTreeMap<TokenId, &Construction> {
        let mut map = BTreeMap::new();
        self.walk(&mut |node| {
            if let Some(token) = node.root_token() {
                map.entry(token.id.clone()).or_insert(node);
            }
        });
        map
    }

    fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Construction)) {
        f(self);
        if let Construction::Apply { inputs, .. } = self {
            for input in inputs {
                input.walk(f);
            }
        }
    }

    /// All distinct tokens. References contribute nothing new.
    pub fn tokens_of(&self) -> BTreeSet<Token> {
        let mut tokens = BTreeSet::new();
        self.walk(&mut |node| {
            if let Some(token) = node.root_token() {
                tokens.insert(token.clone());
            }
        });
        tokens
    }

    /// The maximal sub-tree rooted at the binding occurrence of `id`.
    pub fn sub_construction_at(&self, id: &TokenId) -> Result<Construction, ConstructionError> {
        self.binding_map()
            .get(id)
            .map(|node| (*node).clone())
            .ok_or_else(|| ConstructionError::UnboundToken(id.clone()))
    }

    /// Same shape with every token id pushed through an injective map.
    pub fn rename_tokens(
        &self,
        map: &BTreeMap<TokenId, TokenId>,
    ) -> Result<Construction, ConstructionError> {
        let mut seen: BTreeMap<&TokenId, &TokenId> = BTreeMap::new();
        for (from, to) in map {
            if let Some(prev) = seen.insert(to, from) {
                return Err(ConstructionError::NonInjectiveRename(
                    prev.clone(),
                    from.clone(),
                ));
            }
        }
        self.rename_with(map)
    }

    fn rename_with(
        &self,
        map: &BTreeMap<TokenId, TokenId>,
    ) -> Result<Construction, ConstructionError> {
        let lookup = |id: &TokenId| -> Result<TokenId, ConstructionError> {
            map.get(id)
                .cloned()
                .ok_or_else(|| ConstructionError::IncompleteRename(id.clone()))
        };
        Ok(match self {
            Construction::Source(t) => {
                Construction::Source(Token::new(lookup(&t.id)?, t.ty.clone()))
            }
            Construction::Reference(id) => Construction::Reference(lookup(id)?),
            Construction::Apply {
                output,
                constructor,
                inputs,
            } => Construction::Apply {
                output: Token::new(lookup(&output.id)?, output.ty.clone()),
                constructor: constructor.clone(),
                inputs: inputs
                    .iter()
                    .map(|i| i.rename_with(map))
                    .collect::<Result<_, _>>()?,
            },
        })
    }

    /// A witnessing token bijection when the two constructions have the same
    /// shape, constructors, argument order, and identical token types; `None`
    /// otherwise.
    pub fn equal_up_to_renaming(&self, other: &Construction) -> Option<BTreeMap<TokenId, TokenId>> {
        let mut fwd = BTreeMap::new();
        let mut rev = BTreeMap::new();
        if lockstep(self, other, &mut fwd, &mut rev) {
            Some(fwd)
        } else {
            None
        }
    }
}

pub(crate) fn bind_pair(
    a: &TokenId,
    b: &TokenId,
    fwd: &mut BTreeMap<TokenId, TokenId>,
    rev: &mut BTreeMap<TokenId, TokenId>,
) -> bool {
    match (fwd.get(a), rev.get(b)) {
        (Some(b0), _) => b0 == b,
        (None, Some(_)) => false,
        (None, None) => {
            fwd.insert(a.clone(), b.clone());
            rev.insert(b.clone(), a.clone());
            true
        }
    }
}

pub(crate) fn lockstep(
    a: &Construction,
    b: &Construction,
    fwd: &mut BTreeMap<TokenId, TokenId>,
    rev: &mut BTreeMap<TokenId, TokenId>,
) -> bool {
    match (a, b) {
        (Construction::Source(ta), Construction::Source(tb)) => {
            ta.ty == tb.ty && bind_pair(&ta.id, &tb.id, fwd, rev)
        }
        (Construction::Reference(xa), Construction::Reference(xb)) => bind_pair(xa, xb, fwd, rev),
        (
            Construction::Apply {
                output: oa,
                constructor: ca,
                inputs: ia,
            },
            Construction::Apply {
                output: ob,
                constructor: cb,
                inputs: ib,
            },
        ) => {
            ca == cb
                && oa.ty == ob.ty
                && ia.len() == ib.len()
                && bind_pair(&oa.id, &ob.id, fwd, rev)
                && ia.iter().zip(ib).all(|(x, y)| lockstep(x, y, fwd, rev))
        }
        _ => false,
    }
}

/// Checks a construction against a constructor specification and type
/// system, returning the complete list of violations.
pub fn validate(c: &Construction, cs: &ConSpec, ts: &TypeSystem) -> ValidationReport {
    let mut violations = Vec::new();

    // pass 1: bindings and their consistency
    let mut bindings: BTreeMap<TokenId, TypeName> = BTreeMap::new();
    let mut duplicate_reported: BTreeSet<TokenId> = BTreeSet::new();
    c.walk(&mut |node| {
        if let Some(token) = node.root_token() {
            match bindings.get(&token.id) {
                None => {
                    bindings.insert(token.id.clone(), token.ty.clone());
                }
                Some(first) => {
                    if duplicate_reported.insert(token.id.clone()) {
                        violations.push(Violation::DuplicateBinding(token.id.clone()));
                        if *first != token.ty {
                            violations.push(Violation::InconsistentTokenType {
                                id: token.id.clone(),
                                first: first.clone(),
                                second: token.ty.clone(),
                            });
                        }
                    }
                }
            }
        }
    });

    // pass 2: references resolve somewhere in the whole construction
    let mut unresolved_reported: BTreeSet<TokenId> = BTreeSet::new();
    c.walk(&mut |node| {
        if let Construction::Reference(id) = node {
            if !bindings.contains_key(id) && unresolved_reported.insert(id.clone()) {
                violations.push(Violation::UnresolvedReference(id.clone()));
            }
        }
    });

    // pass 3: token types exist
    let mut unknown_reported: BTreeSet<TokenId> = BTreeSet::new();
    c.walk(&mut |node| {
        if let Some(token) = node.root_token() {
            if !ts.is_known(&token.ty) && unknown_reported.insert(token.id.clone()) {
                violations.push(Violation::UnknownType {
                    id: token.id.clone(),
                    ty: token.ty.clone(),
                });
            }
        }
    });

    // pass 4: constructor arity and typing
    let token_type_of = |node: &Construction| -> Option<Token> {
        match node {
            Construction::Reference(id) => bindings
                .get(id)
                .map(|ty| Token::new(id.clone(), ty.clone())),
            _ => node.root_token().cloned(),
        }
    };
    c.walk(&mut |node| {
        if let Construction::Apply {
            output,
            constructor,
            inputs,
        } = node
        {
            let sig = match cs.signature_of(constructor) {
                Ok(sig) => sig,
                Err(_) => {
                    violations.push(Violation::UnknownConstructor(constructor.clone()));
                    return;
                }
            };
            if sig.arity() != inputs.len() {
                violations.push(Violation::ArityMismatch {
                    constructor: constructor.clone(),
                    expected: sig.arity(),
                    found: inputs.len(),
                });
                return;
            }
            if ts.is_known(&output.ty) && !ts.leq(&output.ty, &sig.output).unwrap_or(false) {
                violations.push(Violation::OutputTypeViolation {
                    token: output.clone(),
                    constructor: constructor.clone(),
                    expected: sig.output.clone(),
                });
            }
            for (index, (input, expected)) in inputs.iter().zip(&sig.inputs).enumerate() {
                let Some(root) = token_type_of(input) else {
                    continue; // unresolved reference, reported above
                };
                if !ts.is_known(&root.ty) {
                    continue; // unknown type, reported above
                }
                if !ts.leq(&root.ty, expected).unwrap_or(false) {
                    violations.push(Violation::InputTypeViolation {
                        constructor: constructor.clone(),
                        index: index + 1,
                        token: root,
                        expected: expected.clone(),
                    });
                }
            }
        }
    });

    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conspec::{build_con_spec, ConstructorSig};
    use crate::typesys::build_type_system;

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

    /// The arith space extended with the dynamic types the worked example
    /// registers through annotations.
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
        let ts = ts.register_dynamic_type(&ty("1"), &ty("numeral")).unwrap();
        let ts = ts.register_dynamic_type(&ty("2"), &ty("numeral")).unwrap();
        let ts = ts.register_dynamic_type(&ty("x"), &ty("var")).unwrap();
        let ts = ts
            .register_dynamic_type(&ty("1plus2"), &ty("numExp"))
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
                (
                    con("implicitMult"),
                    ConstructorSig {
                        inputs: vec![ty("numExp"), ty("numExp")],
                        output: ty("numExp"),
                    },
                ),
            ],
        )
        .unwrap();
        (cs, ts)
    }

    /// The seven-token construction of 1+2=x.
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

    /// The dot-space with join/rotate/remove, for the cyclic figure.
    fn dot_space() -> (ConSpec, TypeSystem) {
        let ts = build_type_system(
            "dotDiagT",
            &[(ty("arr"), true), (ty("dotDiag"), false)],
            &[(ty("arr"), ty("dotDiag"))],
        )
        .unwrap();
        let cs = build_con_spec(
            "dotDiagrams",
            &ts,
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
                (
                    con("remove"),
                    ConstructorSig {
                        inputs: vec![ty("dotDiag"), ty("dotDiag")],
                        output: ty("dotDiag"),
                    },
                ),
            ],
        )
        .unwrap();
        (cs, ts)
    }

    /// v <- rotate[w <- remove[r, v]]: the root token feeds its own sub-tree.
    fn cyclic_dots() -> Construction {
        Construction::Apply {
            output: tok("v", "arr"),
            constructor: con("rotate"),
            inputs: vec![Construction::Apply {
                output: tok("w", "arr"),
                constructor: con("remove"),
                inputs: vec![src("r", "arr"), Construction::Reference(id("v"))],
            }],
        }
    }

    #[test]
    fn worked_example_validates() {
        let (cs, ts) = arith_space();
        let report = validate(&one_plus_two_equals_x(), &cs, &ts);
        assert!(report.is_ok(), "{:?}", report.violations());
    }

    #[test]
    fn a_single_token_is_a_construction() {
        let (cs, ts) = arith_space();
        assert!(validate(&src("t", "plus"), &cs, &ts).is_ok());
    }

    #[test]
    fn output_type_must_be_below_the_signature_output() {
        let (cs, ts) = arith_space();
        // infixOp outputs numExp and formula is not below numExp
        let bad = Construction::Apply {
            output: tok("t", "formula"),
            constructor: con("infixOp"),
            inputs: vec![src("a", "1"), src("b", "plus"), src("c", "2")],
        };
        assert!(!ts.leq(&ty("formula"), &ty("numExp")).unwrap());
        let report = validate(&bad, &cs, &ts);
        assert!(report
            .violations()
            .iter()
            .any(|v| matches!(v, Violation::OutputTypeViolation { .. })));
    }

    #[test]
    fn cyclic_references_validate_and_terminate() {
        let (cs, ts) = dot_space();
        assert!(validate(&cyclic_dots(), &cs, &ts).is_ok());
    }

    #[test]
    fn violations_are_collected_not_thrown() {
        let (cs, ts) = arith_space();
        let bad = Construction::Apply {
            output: tok("t", "ghost"),
            constructor: con("nope"),
            inputs: vec![Construction::Reference(id("dangling"))],
        };
        let report = validate(&bad, &cs, &ts);
        assert!(report.violations().len() >= 3);
    }

    #[test]
    fn duplicate_bindings_are_violations() {
        let (cs, ts) = arith_space();
        // t11 is introduced twice as a source leaf
        let twice = Construction::Apply {
            output: tok("t1", "1plus2"),
            constructor: con("infixOp"),
            inputs: vec![src("t11", "1"), src("t12", "plus"), src("t11", "1")],
        };
        let report = validate(&twice, &cs, &ts);
        assert!(report
            .violations()
            .iter()
            .any(|v| matches!(v, Violation::DuplicateBinding(id) if id.as_str() == "t11")));

        // one id as both an apply output and a source leaf, with clashing types
        let clash = Construction::Apply {
            output: tok("t1", "1plus2"),
            constructor: con("infixOp"),
            inputs: vec![src("t1", "1"), src("t12", "plus"), src("t13", "2")],
        };
        let report = validate(&clash, &cs, &ts);
        assert!(report
            .violations()
            .iter()
            .any(|v| matches!(v, Violation::DuplicateBinding(_))));
        assert!(report
            .violations()
            .iter()
            .any(|v| matches!(v, Violation::InconsistentTokenType { .. })));
    }

    #[test]
    fn tokens_of_the_worked_example() {
        let c = one_plus_two_equals_x();
        let ids: Vec<String> = c.tokens_of().iter().map(|t| t.id.to_string()).collect();
        assert_eq!(ids, ["t", "t1", "t11", "t12", "t13", "t2", "t3"]);
    }

    #[test]
    fn tokens_of_counts_references_once() {
        assert_eq!(src("a", "arr").tokens_of().len(), 1);
        // four node occurrences but only three tokens: v re-enters by reference
        assert_eq!(cyclic_dots().tokens_of().len(), 3);
    }

    #[test]
    fn sub_construction_at_binding_occurrences() {
        let c = one_plus_two_equals_x();
        let t1 = c.sub_construction_at(&id("t1")).unwrap();
        assert!(
            matches!(&t1, Construction::Apply { constructor, .. } if constructor.as_str() == "infixOp")
        );
        assert_eq!(t1.tokens_of().len(), 4);
        assert_eq!(c.sub_construction_at(&id("t")).unwrap(), c);
        assert_eq!(
            c.sub_construction_at(&id("t12")).unwrap(),
            src("t12", "plus")
        );
        assert!(matches!(
            c.sub_construction_at(&id("zz")),
            Err(ConstructionError::UnboundToken(_))
        ));
    }

    fn identity_map(c: &Construction) -> BTreeMap<TokenId, TokenId> {
        c.tokens_of()
            .iter()
            .map(|t| (t.id.clone(), t.id.clone()))
            .collect()
    }

    #[test]
    fn identity_rename_is_identity() {
        let c = one_plus_two_equals_x();
        assert_eq!(c.rename_tokens(&identity_map(&c)).unwrap(), c);
    }

    #[test]
    fn swapping_ids_keeps_validity_but_not_equality() {
        let (cs, ts) = arith_space();
        let c = one_plus_two_equals_x();
        let mut map = identity_map(&c);
        map.insert(id("t11"), id("t13"));
        map.insert(id("t13"), id("t11"));
        let swapped = c.rename_tokens(&map).unwrap();
        assert!(validate(&swapped, &cs, &ts).is_ok());
        assert_ne!(swapped, c);
    }

    #[test]
    fn collapsing_rename_is_rejected() {
        let c = one_plus_two_equals_x();
        let mut map = identity_map(&c);
        map.insert(id("t11"), id("shared"));
        map.insert(id("t13"), id("shared"));
        assert!(matches!(
            c.rename_tokens(&map),
            Err(ConstructionError::NonInjectiveRename(..))
        ));
    }

    #[test]
    fn renaming_yields_a_bijection_witness() {
        let c = one_plus_two_equals_x();
        let map: BTreeMap<TokenId, TokenId> = c
            .tokens_of()
            .iter()
            .map(|t| (t.id.clone(), TokenId::new(format!("f{}", t.id)).unwrap()))
            .collect();
        let fresh = c.rename_tokens(&map).unwrap();
        let bijection = c.equal_up_to_renaming(&fresh).unwrap();
        assert_eq!(bijection, map);
    }

    #[test]
    fn argument_order_is_significant() {
        let c = one_plus_two_equals_x();
        // mirror: swap inputs 1 and 3 of the inner infixOp
        let mirrored = Construction::Apply {
            output: tok("t", "1plus2equalsx"),
            constructor: con("infixRel"),
            inputs: vec![
                Construction::Apply {
                    output: tok("t1", "1plus2"),
                    constructor: con("infixOp"),
                    inputs: vec![src("t13", "2"), src("t12", "plus"), src("t11", "1")],
                },
                src("t2", "equals"),
                src("t3", "x"),
            ],
        };
        assert!(c.equal_up_to_renaming(&mirrored).is_none());
    }

    #[test]
    fn differing_types_never_correspond() {
        assert!(src("a", "plus")
            .equal_up_to_renaming(&src("b", "minus"))
            .is_none());
    }

    #[test]
    fn reference_sharing_is_part_of_the_shape() {
        let cyclic = cyclic_dots();
        let other = Construction::Apply {
            output: tok("v2", "arr"),
            constructor: con("rotate"),
            inputs: vec![Construction::Apply {
                output: tok("w2", "arr"),
                constructor: con("remove"),
                inputs: vec![src("r2", "arr"), Construction::Reference(id("v2"))],
            }],
        };
        assert!(cyclic.equal_up_to_renaming(&other).is_some());
        // pointing the reference at a different token breaks the correspondence
        let rewired = Construction::Apply {
            output: tok("v2", "arr"),
            constructor: con("rotate"),
            inputs: vec![Construction::Apply {
                output: tok("w2", "arr"),
                constructor: con("remove"),
                inputs: vec![src("r2", "arr"), Construction::Reference(id("w2"))],
            }],
        };
        assert!(cyclic.equal_up_to_renaming(&rewired).is_none());
    }
}
