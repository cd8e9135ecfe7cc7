//! Tape-driven generator of well-typed constructions. Proptest supplies a
//! byte tape; the generator spends it on choices, so shrinking the tape
//! shrinks the construction.

use oruga_core::conspec::{ConSpec, ConstructorName};
use oruga_core::construction::{Construction, Token, TokenId};
use oruga_core::typesys::{TypeName, TypeSystem};

/// A finite supply of decisions; returns 0 forever once exhausted, which
/// drives generation toward leaves.
#[derive(Debug, Clone)]
pub struct Tape {
    bytes: Vec<u8>,
    pos: usize,
}

impl Tape {
    pub fn new(bytes: Vec<u8>) -> Self {
        Tape { bytes, pos: 0 }
    }

    pub fn next(&mut self, bound: usize) -> usize {
        if bound == 0 {
            return 0;
        }
        let byte = self.bytes.get(self.pos).copied().unwrap_or(0);
        self.pos += 1;
        byte as usize % bound
    }
}

fn subtypes_of(ts: &TypeSystem, upper: &TypeName) -> Vec<TypeName> {
    let mut out: Vec<TypeName> = ts
        .closure_pairs()
        .filter(|(_, sup)| sup == upper)
        .map(|(sub, _)| sub.clone())
        .collect();
    out.sort();
    out.dedup();
    out
}

/// A construction whose root token is below `want`, valid by construction.
/// Depth and shape come from the tape.
pub fn generate_construction(
    tape: &mut Tape,
    cs: &ConSpec,
    ts: &TypeSystem,
    want: &TypeName,
    max_depth: usize,
    next_token: &mut usize,
) -> Construction {
    let candidates: Vec<(&ConstructorName, &oruga_core::conspec::ConstructorSig)> = cs
        .constructors()
        .iter()
        .filter(|(_, sig)| ts.leq(&sig.output, want).unwrap_or(false))
        .collect();

    let fresh = |next_token: &mut usize, ty: &TypeName| -> Token {
        let id = TokenId::new(format!("g{}", *next_token)).expect("generated id");
        *next_token += 1;
        Token::new(id, ty.clone())
    };

    let make_leaf = |tape: &mut Tape, next_token: &mut usize| -> Construction {
        let subs = subtypes_of(ts, want);
        let ty = if subs.is_empty() {
            want.clone()
        } else {
            subs[tape.next(subs.len())].clone()
        };
        Construction::Source(fresh(next_token, &ty))
    };

    if max_depth == 0 || candidates.is_empty() || tape.next(3) == 0 {
        return make_leaf(tape, next_token);
    }
    let (name, sig) = candidates[tape.next(candidates.len())];
    let out_subs = subtypes_of(ts, &sig.output);
    let out_ty = if out_subs.is_empty() {
        sig.output.clone()
    } else {
        out_subs[tape.next(out_subs.len())].clone()
    };
    let output = fresh(next_token, &out_ty);
    let inputs = sig
        .inputs
        .iter()
        .map(|input_ty| generate_construction(tape, cs, ts, input_ty, max_depth - 1, next_token))
        .collect();
    Construction::Apply {
        output,
        constructor: name.clone(),
        inputs,
    }
}

/// A pattern that `c` is guaranteed *not* to trivially equal: generated
/// independently over the same space at the same root bound.
pub fn generate_pattern_for(
    tape: &mut Tape,
    cs: &ConSpec,
    ts: &TypeSystem,
    want: &TypeName,
    max_depth: usize,
) -> Construction {
    let mut next_token = 1000;
    generate_construction(tape, cs, ts, want, max_depth, &mut next_token)
}
