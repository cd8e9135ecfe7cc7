//! Structural-equality oracle checks and the independent arity scan.

use std::collections::BTreeMap;

use oruga_core::construction::{Construction, TokenId};
use oruga_core::dsl::parse_document_str;
use oruga_testkit::scan_arities;

const ARITH: &str = include_str!("../../../corpus/arith.oruga");

/// Brute-force: try every bijection between the token sets and test whether
/// renaming under it makes the trees structurally equal.
fn any_bijection_works(a: &Construction, b: &Construction) -> bool {
    let a_ids: Vec<TokenId> = a.tokens_of().iter().map(|t| t.id.clone()).collect();
    let b_ids: Vec<TokenId> = b.tokens_of().iter().map(|t| t.id.clone()).collect();
    if a_ids.len() != b_ids.len() {
        return false;
    }
    fn permute(
        remaining: &[TokenId],
        pool: &[TokenId],
        used: &mut Vec<bool>,
        map: &mut BTreeMap<TokenId, TokenId>,
        a: &Construction,
        b: &Construction,
    ) -> bool {
        let Some(next) = remaining.first() else {
            return a.rename_tokens(map).ok().as_ref() == Some(b);
        };
        for (i, candidate) in pool.iter().enumerate() {
            if used[i] {
                continue;
            }
            used[i] = true;
            map.insert(next.clone(), candidate.clone());
            if permute(&remaining[1..], pool, used, map, a, b) {
                return true;
            }
            map.remove(next);
            used[i] = false;
        }
        false
    }
    let mut used = vec![false; b_ids.len()];
    permute(&a_ids, &b_ids, &mut used, &mut BTreeMap::new(), a, b)
}

#[test]
fn mirror_is_not_equal_even_under_all_bijections() {
    let extra = "\nconstruction mirror:arith =\n  \
                 u:1plus2equalsx:formula <- infixRel[u1:1plus2:numExp <- infixOp[u11:2:numeral, u12:plus, u13:1:numeral], u2:equals, u3:x:var]\n";
    let doc = parse_document_str(&format!("{ARITH}{extra}")).unwrap();
    let con = &doc.construction("con").unwrap().construction;
    let mirror = &doc.construction("mirror").unwrap().construction;

    assert!(con.equal_up_to_renaming(mirror).is_none());
    assert!(
        !any_bijection_works(con, mirror),
        "oracle: all 7! bijections fail"
    );
}

#[test]
fn fresh_renaming_agrees_with_the_oracle() {
    let doc = parse_document_str(ARITH).unwrap();
    let con = &doc.construction("con").unwrap().construction;
    let map: BTreeMap<TokenId, TokenId> = con
        .tokens_of()
        .iter()
        .map(|t| (t.id.clone(), TokenId::new(format!("z{}", t.id)).unwrap()))
        .collect();
    let fresh = con.rename_tokens(&map).unwrap();
    assert!(con.equal_up_to_renaming(&fresh).is_some());
    assert!(any_bijection_works(con, &fresh));
}

#[test]
fn equality_up_to_renaming_is_an_equivalence_on_the_corpus() {
    let doc = parse_document_str(ARITH).unwrap();
    let con = &doc.construction("con").unwrap().construction;
    let map: BTreeMap<TokenId, TokenId> = con
        .tokens_of()
        .iter()
        .map(|t| (t.id.clone(), TokenId::new(format!("z{}", t.id)).unwrap()))
        .collect();
    let b = con.rename_tokens(&map).unwrap();
    let map2: BTreeMap<TokenId, TokenId> = b
        .tokens_of()
        .iter()
        .map(|t| (t.id.clone(), TokenId::new(format!("w{}", t.id)).unwrap()))
        .collect();
    let c = b.rename_tokens(&map2).unwrap();

    // reflexive
    assert!(con.equal_up_to_renaming(con).is_some());
    // symmetric
    assert_eq!(
        con.equal_up_to_renaming(&b).is_some(),
        b.equal_up_to_renaming(con).is_some()
    );
    // transitive
    if con.equal_up_to_renaming(&b).is_some() && b.equal_up_to_renaming(&c).is_some() {
        assert!(con.equal_up_to_renaming(&c).is_some());
    }
}

#[test]
fn tokens_of_commutes_with_renaming() {
    let doc = parse_document_str(ARITH).unwrap();
    let con = &doc.construction("con").unwrap().construction;
    let map: BTreeMap<TokenId, TokenId> = con
        .tokens_of()
        .iter()
        .map(|t| (t.id.clone(), TokenId::new(format!("z{}", t.id)).unwrap()))
        .collect();
    let renamed = con.rename_tokens(&map).unwrap();
    let mapped: Vec<String> = con
        .tokens_of()
        .iter()
        .map(|t| map[&t.id].to_string())
        .collect();
    let mut got: Vec<String> = renamed
        .tokens_of()
        .iter()
        .map(|t| t.id.to_string())
        .collect();
    let mut expected = mapped;
    expected.sort();
    got.sort();
    assert_eq!(got, expected);
}

#[test]
fn every_validated_corpus_construction_passes_the_arity_scan() {
    let doc = parse_document_str(ARITH).unwrap();
    let cs = doc.con_spec("arith").unwrap();
    let con = &doc.construction("con").unwrap().construction;
    scan_arities(con, cs).unwrap();
}
