//! Brute-force enumerator over schema-application sequences. Unlike the
//! engine's leftmost-first DFS it expands *every* open goal at every step,
//! so agreement with the engine (modulo token renaming) shows the
//! scheduling policy loses no results.

use std::collections::BTreeSet;

use oruga_core::construction::{Construction, TokenId};
use oruga_core::matching::FreshNamer;
use oruga_core::schema::{RelationLabel, TransferSchema};
use oruga_core::transfer::{
    equal_compositions_up_to_renaming, Goal, SearchLimits, TransferContext, TransferState,
};
use oruga_core::typesys::TypeName;

#[derive(Debug, Clone)]
pub struct EnumeratedResult {
    pub constructions: Vec<Construction>,
    pub assumptions: Vec<Goal>,
}

/// All completed states reachable within `max_depth` derivation depth,
/// deduplicated modulo token renaming.
pub fn enumerate_transfers(
    ctx: &TransferContext,
    relation: RelationLabel,
    goal_source_ids: &[TokenId],
    sought_type: &TypeName,
    schemas: &[&TransferSchema],
    max_depth: usize,
    assumable: &BTreeSet<RelationLabel>,
) -> Vec<EnumeratedResult> {
    let state = ctx
        .init_state(relation, goal_source_ids, sought_type)
        .expect("enumerator init");
    let limits = SearchLimits::new(max_depth, usize::MAX - 1, usize::MAX - 1, assumable.clone())
        .expect("limits");
    let mut namer = FreshNamer::new();
    let mut results: Vec<EnumeratedResult> = Vec::new();
    explore(
        ctx,
        &state,
        schemas,
        max_depth,
        &limits,
        &mut namer,
        &mut results,
    );
    results
}

fn explore(
    ctx: &TransferContext,
    state: &TransferState,
    schemas: &[&TransferSchema],
    max_depth: usize,
    limits: &SearchLimits,
    namer: &mut FreshNamer,
    results: &mut Vec<EnumeratedResult>,
) {
    if state.open_goals.is_empty() {
        let constructions = state.composition.to_constructions();
        let duplicate = results.iter().any(|kept| {
            equal_compositions_up_to_renaming(&kept.constructions, &constructions).is_some()
        });
        if !duplicate {
            results.push(EnumeratedResult {
                constructions,
                assumptions: state.assumptions.clone(),
            });
        }
        return;
    }
    for goal_index in 0..state.open_goals.len() {
        let open = &state.open_goals[goal_index];
        if state.derivation.nodes()[open.node].depth > max_depth {
            continue;
        }
        for schema in schemas {
            if let Some(next) = ctx.apply_schema_backward(state, goal_index, schema, namer) {
                explore(ctx, &next, schemas, max_depth, limits, namer, results);
            }
        }
        if limits.assumable_relations.contains(&open.goal.relation) {
            if let Ok(next) = ctx.discharge_by_assumption(state, goal_index, limits) {
                explore(ctx, &next, schemas, max_depth, limits, namer, results);
            }
        }
    }
}
