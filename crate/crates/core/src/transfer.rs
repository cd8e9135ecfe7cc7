//! Backward-chaining structure transfer.
//!
//! Starting from a goal constraint over a given source construction and a
//! sought target variable, transfer schemas are applied backwards: a schema
//! whose consequent matches the goal replaces it with the schema's
//! antecedents, while the schema's target pattern is instantiated and merged
//! into a growing target composition. A run ends when no goals remain; the
//! derivation tree is the proof that the desired constraint holds provided
//! the recorded assumptions do.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::conspec::ConSpec;
use crate::construction::{lockstep, validate, Construction, Token, TokenId};
use crate::matching::{find_match_anchored, instantiate_with_assignment, FreshNamer, MatchMode};
use crate::schema::{RelationLabel, TransferSchema};
use crate::typesys::{TypeName, TypeSystem};

/// A pending constraint: concrete source tokens related to target variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Goal {
    pub source_tokens: Vec<Token>,
    pub target_vars: Vec<Token>,
    pub relation: RelationLabel,
}

/// A set of constructions over the target space glued at shared token ids.
/// One token may be constructed by more than one list entry; that is how a
/// single arrangement gets two constructions.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TargetComposition {
    token_store: BTreeMap<TokenId, Token>,
    constructions: Vec<Construction>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenGoal {
    pub goal: Goal,
    pub node: usize,
}

/// The partial proof: open goals, the composition built so far, goals
/// discharged by assumption, and the derivation log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferState {
    pub open_goals: Vec<OpenGoal>,
    pub composition: TargetComposition,
    pub assumptions: Vec<Goal>,
    pub derivation: DerivationTree,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepRule {
    Schema(String),
    Assumed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationStep {
    pub rule: StepRule,
    /// Source-pattern token id to matched source token.
    pub source_binding: BTreeMap<TokenId, Token>,
    /// Target-pattern token id to instantiated target token.
    pub target_binding: BTreeMap<TokenId, Token>,
    pub fresh_tokens: Vec<Token>,
    pub children: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationNode {
    pub goal: Goal,
    pub depth: usize,
    pub parent: Option<usize>,
    pub step: Option<DerivationStep>,
}

/// Audit trail of the backward proof; node 0 is the initial goal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationTree {
    nodes: Vec<DerivationNode>,
}

impl DerivationTree {
    pub fn nodes(&self) -> &[DerivationNode] {
        &self.nodes
    }

    pub fn root(&self) -> &DerivationNode {
        &self.nodes[0]
    }

    /// Maximum depth over all nodes; the root sits at depth 1.
    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_depth: usize,
    pub max_results: usize,
    pub max_expansions: usize,
    pub assumable_relations: BTreeSet<RelationLabel>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransferError {
    #[error("token `{0}` is not bound in the source construction")]
    UnboundToken(TokenId),
    #[error("type `{0}` is unknown in the target type system")]
    UnknownType(TypeName),
    #[error("relation `{0}` is not assumable under the current limits")]
    NotAssumable(RelationLabel),
    #[error("goal index {0} is out of range")]
    NoSuchGoal(usize),
    #[error("schema `{schema}` bridges ({source_space},{target_space}), expected ({expected_source},{expected_target})")]
    MixedSchemaSpaces {
        schema: String,
        source_space: String,
        target_space: String,
        expected_source: String,
        expected_target: String,
    },
    #[error("search limit `{0}` must be at least 1")]
    InvalidLimit(&'static str),
}

impl SearchLimits {
    pub fn new(
        max_depth: usize,
        max_results: usize,
        max_expansions: usize,
        assumable_relations: BTreeSet<RelationLabel>,
    ) -> Result<Self, TransferError> {
        if max_depth == 0 {
            return Err(TransferError::InvalidLimit("max_depth"));
        }
        if max_results == 0 {
            return Err(TransferError::InvalidLimit("max_results"));
        }
        if max_expansions == 0 {
            return Err(TransferError::InvalidLimit("max_expansions"));
        }
        Ok(SearchLimits {
            max_depth,
            max_results,
            max_expansions,
            assumable_relations,
        })
    }
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_depth: 10,
            max_results: 5,
            max_expansions: 10_000,
            assumable_relations: BTreeSet::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferResult {
    pub composition: TargetComposition,
    pub derivation: DerivationTree,
    pub assumptions: Vec<Goal>,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub results: Vec<TransferResult>,
    pub expansions: usize,
    /// True when any limit cut the exploration short; an empty result list
    /// with this flag clear really means there is nothing to find.
    pub limit_hit: bool,
}

/// The two spaces a transfer bridges.
#[derive(Debug, Clone, Copy)]
pub struct Spaces<'a> {
    pub source_spec: &'a ConSpec,
    pub source_types: &'a TypeSystem,
    pub target_spec: &'a ConSpec,
    pub target_types: &'a TypeSystem,
}

impl TargetComposition {
    pub fn tokens(&self) -> &BTreeMap<TokenId, Token> {
        &self.token_store
    }

    pub fn entries(&self) -> &[Construction] {
        &self.constructions
    }

    pub fn token(&self, id: &TokenId) -> Option<&Token> {
        self.token_store.get(id)
    }

    fn insert_token(&mut self, token: Token) {
        self.token_store.entry(token.id.clone()).or_insert(token);
    }

    fn refine_type(&mut self, id: &TokenId, ty: &TypeName) {
        if let Some(token) = self.token_store.get_mut(id) {
            token.ty = ty.clone();
        }
        for entry in &mut self.constructions {
            *entry = retype(entry, id, ty);
        }
    }

    fn apply_binds(entry: &Construction, id: &TokenId) -> bool {
        match entry {
            Construction::Apply { output, inputs, .. } => {
                output.id == *id || inputs.iter().any(|i| Self::apply_binds(i, id))
            }
            _ => false,
        }
    }

    fn has_source_leaf(entry: &Construction, id: &TokenId) -> bool {
        match entry {
            Construction::Source(t) => t.id == *id,
            Construction::Reference(_) => false,
            Construction::Apply { inputs, .. } => {
                inputs.iter().any(|i| Self::has_source_leaf(i, id))
            }
        }
    }

    /// Merges an instantiated target pattern. A bare source adds no
    /// structure; a tree whose root is currently a source leaf is grafted
    /// there; a tree re-constructing an already-applied token becomes a new
    /// entry, unless `single_construction` forbids it.
    fn merge(&mut self, built: Construction, single_construction: bool) -> Option<()> {
        let root = match built.root_token() {
            Some(token) => token.clone(),
            None => return Some(()),
        };
        if !matches!(built, Construction::Apply { .. }) {
            return Some(());
        }
        if self
            .constructions
            .iter()
            .any(|e| Self::apply_binds(e, &root.id))
        {
            if single_construction {
                return None;
            }
            self.constructions.push(built);
            return Some(());
        }
        let grafted: Vec<usize> = self
            .constructions
            .iter()
            .enumerate()
            .filter(|(_, e)| Self::has_source_leaf(e, &root.id))
            .map(|(i, _)| i)
            .collect();
        if grafted.is_empty() {
            self.constructions.push(built);
        } else {
            for i in grafted {
                self.constructions[i] = graft(&self.constructions[i], &root.id, &built);
            }
        }
        Some(())
    }

    /// The printable form: every entry, plus a bare source for any stored
    /// token that no entry mentions.
    pub fn to_constructions(&self) -> Vec<Construction> {
        let mut out = self.constructions.clone();
        let mut mentioned: BTreeSet<TokenId> = BTreeSet::new();
        for entry in &self.constructions {
            collect_ids(entry, &mut mentioned);
        }
        for (id, token) in &self.token_store {
            if !mentioned.contains(id) {
                out.push(Construction::Source(token.clone()));
            }
        }
        out
    }
}

fn collect_ids(node: &Construction, out: &mut BTreeSet<TokenId>) {
    match node {
        Construction::Source(t) => {
            out.insert(t.id.clone());
        }
        Construction::Reference(id) => {
            out.insert(id.clone());
        }
        Construction::Apply { output, inputs, .. } => {
            out.insert(output.id.clone());
            for input in inputs {
                collect_ids(input, out);
            }
        }
    }
}

fn retype(node: &Construction, id: &TokenId, ty: &TypeName) -> Construction {
    match node {
        Construction::Source(t) if t.id == *id => {
            Construction::Source(Token::new(t.id.clone(), ty.clone()))
        }
        Construction::Source(_) | Construction::Reference(_) => node.clone(),
        Construction::Apply {
            output,
            constructor,
            inputs,
        } => Construction::Apply {
            output: if output.id == *id {
                Token::new(output.id.clone(), ty.clone())
            } else {
                output.clone()
            },
            constructor: constructor.clone(),
            inputs: inputs.iter().map(|i| retype(i, id, ty)).collect(),
        },
    }
}

fn graft(entry: &Construction, id: &TokenId, replacement: &Construction) -> Construction {
    match entry {
        Construction::Source(t) if t.id == *id => replacement.clone(),
        Construction::Source(_) | Construction::Reference(_) => entry.clone(),
        Construction::Apply {
            output,
            constructor,
            inputs,
        } => Construction::Apply {
            output: output.clone(),
            constructor: constructor.clone(),
            inputs: inputs.iter().map(|i| graft(i, id, replacement)).collect(),
        },
    }
}

/// Engine context: one source construction and the bridged spaces.
pub struct TransferContext<'a> {
    pub source: &'a Construction,
    pub spaces: Spaces<'a>,
    pub single_construction: bool,
}

impl<'a> TransferContext<'a> {
    pub fn new(source: &'a Construction, spaces: Spaces<'a>) -> Self {
        TransferContext {
            source,
            spaces,
            single_construction: false,
        }
    }

    /// One open goal `([given tokens],[v0:sought]) :: relation` over an
    /// otherwise empty composition.
    pub fn init_state(
        &self,
        relation: RelationLabel,
        goal_source_ids: &[TokenId],
        sought_type: &TypeName,
    ) -> Result<TransferState, TransferError> {
        if !self.spaces.target_types.is_known(sought_type) {
            return Err(TransferError::UnknownType(sought_type.clone()));
        }
        let bindings = self.source.binding_map();
        let mut source_tokens = Vec::new();
        for id in goal_source_ids {
            let token = bindings
                .get(id)
                .and_then(|n| n.root_token())
                .ok_or_else(|| TransferError::UnboundToken(id.clone()))?;
            source_tokens.push(token.clone());
        }
        let sought = Token::new(
            TokenId::new("v0").expect("v0 is valid"),
            sought_type.clone(),
        );
        let mut composition = TargetComposition::default();
        composition.insert_token(sought.clone());
        let goal = Goal {
            source_tokens,
            target_vars: vec![sought],
            relation,
        };
        let derivation = DerivationTree {
            nodes: vec![DerivationNode {
                goal: goal.clone(),
                depth: 1,
                parent: None,
                step: None,
            }],
        };
        Ok(TransferState {
            open_goals: vec![OpenGoal { goal, node: 0 }],
            composition,
            assumptions: Vec::new(),
            derivation,
        })
    }

    /// Applies `schema` backwards to the goal at `goal_index`. `None` when
    /// the consequent does not fit the goal, the source pattern does not
    /// prefix-match, target unification fails, or the strict
    /// single-construction rule rejects the merge.
    pub fn apply_schema_backward(
        &self,
        state: &TransferState,
        goal_index: usize,
        schema: &TransferSchema,
        namer: &mut FreshNamer,
    ) -> Option<TransferState> {
        let open = state.open_goals.get(goal_index)?;
        let goal = &open.goal;
        let consequent = &schema.consequent;
        if consequent.relation != goal.relation {
            return None;
        }
        if consequent.source_tokens.len() != goal.source_tokens.len()
            || consequent.target_tokens.len() != goal.target_vars.len()
        {
            return None;
        }

        // source side: prefix-match anchored so the consequent tokens align
        // positionally with the goal's source tokens
        let anchors: Vec<(TokenId, TokenId)> = consequent
            .source_tokens
            .iter()
            .cloned()
            .zip(goal.source_tokens.iter().map(|t| t.id.clone()))
            .collect();
        let matching = find_match_anchored(
            self.source,
            &schema.source_pattern,
            self.spaces.source_types,
            MatchMode::Prefix,
            &anchors,
        )
        .ok()
        .flatten()?;

        // target side: unify consequent tokens with the goal's variables,
        // reading current types from the composition
        let mut binding: BTreeMap<TokenId, Token> = BTreeMap::new();
        for (pattern_id, var) in consequent.target_tokens.iter().zip(&goal.target_vars) {
            let current = state
                .composition
                .token(&var.id)
                .cloned()
                .unwrap_or_else(|| var.clone());
            if let Some(previous) = binding.insert(pattern_id.clone(), current.clone()) {
                if previous.id != current.id {
                    return None;
                }
            }
        }
        let instantiation = instantiate_with_assignment(
            &schema.target_pattern,
            &binding,
            self.spaces.target_types,
            namer,
        )
        .ok()?;

        let mut next = state.clone();

        // refine unified variables downward before merging structure
        for (pattern_id, bound) in &binding {
            let assigned = &instantiation.assignment[pattern_id];
            if assigned.ty != bound.ty {
                next.refine_variable(&assigned.id, &assigned.ty);
            }
        }
        for fresh in &instantiation.fresh_tokens {
            next.composition.insert_token(fresh.clone());
        }
        next.composition
            .merge(instantiation.construction, self.single_construction)?;

        // the goal is replaced in place by the instantiated antecedents
        let parent_node = open.node;
        let parent_depth = next.derivation.nodes[parent_node].depth;
        let mut child_goals = Vec::new();
        for antecedent in &schema.antecedents {
            let source_tokens = antecedent
                .source_tokens
                .iter()
                .map(|pid| matching.map.get(pid).cloned())
                .collect::<Option<Vec<_>>>()?;
            let target_vars = antecedent
                .target_tokens
                .iter()
                .map(|pid| instantiation.assignment.get(pid).cloned())
                .collect::<Option<Vec<_>>>()?;
            child_goals.push(Goal {
                source_tokens,
                target_vars,
                relation: antecedent.relation.clone(),
            });
        }
        let mut child_nodes = Vec::new();
        for goal in &child_goals {
            let node = next.derivation.nodes.len();
            next.derivation.nodes.push(DerivationNode {
                goal: goal.clone(),
                depth: parent_depth + 1,
                parent: Some(parent_node),
                step: None,
            });
            child_nodes.push(node);
        }
        next.derivation.nodes[parent_node].step = Some(DerivationStep {
            rule: StepRule::Schema(schema.name.clone()),
            source_binding: matching.map.clone(),
            target_binding: instantiation.assignment.clone(),
            fresh_tokens: instantiation.fresh_tokens.clone(),
            children: child_nodes.clone(),
        });
        let replacement: Vec<OpenGoal> = child_goals
            .into_iter()
            .zip(child_nodes)
            .map(|(goal, node)| OpenGoal { goal, node })
            .collect();
        next.open_goals.splice(goal_index..=goal_index, replacement);
        Some(next)
    }

    /// Moves the goal at `goal_index` to the assumption list.
    pub fn discharge_by_assumption(
        &self,
        state: &TransferState,
        goal_index: usize,
        limits: &SearchLimits,
    ) -> Result<TransferState, TransferError> {
        let open = state
            .open_goals
            .get(goal_index)
            .ok_or(TransferError::NoSuchGoal(goal_index))?;
        if !limits.assumable_relations.contains(&open.goal.relation) {
            return Err(TransferError::NotAssumable(open.goal.relation.clone()));
        }
        let mut next = state.clone();
        let open = next.open_goals.remove(goal_index);
        next.derivation.nodes[open.node].step = Some(DerivationStep {
            rule: StepRule::Assumed,
            source_binding: BTreeMap::new(),
            target_binding: BTreeMap::new(),
            fresh_tokens: Vec::new(),
            children: Vec::new(),
        });
        next.assumptions.push(open.goal);
        Ok(next)
    }

    /// Depth-first search: leftmost goal first, schemas in declaration
    /// order, assumption as the last resort. Deterministic; results are
    /// duplicate-free up to token renaming.
    pub fn search(
        &self,
        relation: RelationLabel,
        goal_source_ids: &[TokenId],
        sought_type: &TypeName,
        schemas: &[&TransferSchema],
        limits: &SearchLimits,
    ) -> Result<SearchOutcome, TransferError> {
        self.search_observed(
            relation,
            goal_source_ids,
            sought_type,
            schemas,
            limits,
            |_| {},
        )
    }

    /// Like [`TransferContext::search`] but reports every intermediate state
    /// to `observer`, which the invariant test suites hook into.
    pub fn search_observed(
        &self,
        relation: RelationLabel,
        goal_source_ids: &[TokenId],
        sought_type: &TypeName,
        schemas: &[&TransferSchema],
        limits: &SearchLimits,
        mut observer: impl FnMut(&TransferState),
    ) -> Result<SearchOutcome, TransferError> {
        for schema in schemas {
            if schema.source_space != self.spaces.source_spec.name()
                || schema.target_space != self.spaces.target_spec.name()
            {
                return Err(TransferError::MixedSchemaSpaces {
                    schema: schema.name.clone(),
                    source_space: schema.source_space.clone(),
                    target_space: schema.target_space.clone(),
                    expected_source: self.spaces.source_spec.name().to_owned(),
                    expected_target: self.spaces.target_spec.name().to_owned(),
                });
            }
        }
        let state = self.init_state(relation, goal_source_ids, sought_type)?;
        observer(&state);
        let mut namer = FreshNamer::new();
        let mut outcome = SearchOutcome {
            results: Vec::new(),
            expansions: 0,
            limit_hit: false,
        };
        self.dfs(
            &state,
            schemas,
            limits,
            &mut namer,
            &mut outcome,
            &mut observer,
        );
        Ok(outcome)
    }

    /// Returns false to abort the whole search.
    fn dfs(
        &self,
        state: &TransferState,
        schemas: &[&TransferSchema],
        limits: &SearchLimits,
        namer: &mut FreshNamer,
        outcome: &mut SearchOutcome,
        observer: &mut impl FnMut(&TransferState),
    ) -> bool {
        if state.open_goals.is_empty() {
            let result = TransferResult {
                composition: state.composition.clone(),
                derivation: state.derivation.clone(),
                assumptions: state.assumptions.clone(),
            };
            let duplicate = outcome
                .results
                .iter()
                .any(|kept| results_equivalent(kept, &result));
            if !duplicate {
                outcome.results.push(result);
                if outcome.results.len() >= limits.max_results {
                    // stopping here may leave branches unexplored
                    outcome.limit_hit = true;
                    return false;
                }
            }
            return true;
        }

        let open = &state.open_goals[0];
        let depth = state.derivation.nodes[open.node].depth;
        if depth > limits.max_depth {
            outcome.limit_hit = true;
            return true; // prune this branch only
        }

        for schema in schemas {
            if schema.consequent.relation != open.goal.relation {
                continue;
            }
            if schema.consequent.source_tokens.len() != open.goal.source_tokens.len()
                || schema.consequent.target_tokens.len() != open.goal.target_vars.len()
            {
                continue;
            }
            if outcome.expansions >= limits.max_expansions {
                outcome.limit_hit = true;
                return false;
            }
            outcome.expansions += 1;
            if let Some(next) = self.apply_schema_backward(state, 0, schema, namer) {
                observer(&next);
                if !self.dfs(&next, schemas, limits, namer, outcome, observer) {
                    return false;
                }
            }
        }

        if limits.assumable_relations.contains(&open.goal.relation) {
            if outcome.expansions >= limits.max_expansions {
                outcome.limit_hit = true;
                return false;
            }
            outcome.expansions += 1;
            let next = self
                .discharge_by_assumption(state, 0, limits)
                .expect("relation was checked assumable");
            observer(&next);
            if !self.dfs(&next, schemas, limits, namer, outcome, observer) {
                return false;
            }
        }
        true
    }
}

impl TransferState {
    fn refine_variable(&mut self, id: &TokenId, ty: &TypeName) {
        self.composition.refine_type(id, ty);
        for open in &mut self.open_goals {
            for var in &mut open.goal.target_vars {
                if var.id == *id {
                    var.ty = ty.clone();
                }
            }
        }
    }

    /// Structural well-formedness used by the soundness suites: the
    /// composition validates, open goals resolve, and no obligation is lost.
    pub fn check_invariants(&self, spaces: &Spaces) -> Result<(), String> {
        for entry in self.composition.entries() {
            let report = validate(entry, spaces.target_spec, spaces.target_types);
            if !report.is_ok() {
                return Err(format!(
                    "composition entry fails validation: {:?}",
                    report.violations()
                ));
            }
        }
        for open in &self.open_goals {
            for var in &open.goal.target_vars {
                if self.composition.token(&var.id).is_none() {
                    return Err(format!(
                        "open goal variable `{}` is not in the token store",
                        var.id
                    ));
                }
            }
            let node = self
                .derivation
                .nodes
                .get(open.node)
                .ok_or_else(|| format!("open goal points at missing node {}", open.node))?;
            if node.step.is_some() {
                return Err(format!("open goal node {} already has a step", open.node));
            }
        }
        // conservation: every node is open, assumed, or discharged, and the
        // node set is exactly initial + all antecedents introduced
        let open_nodes: BTreeSet<usize> = self.open_goals.iter().map(|g| g.node).collect();
        let mut assumed = 0usize;
        let mut introduced: BTreeSet<usize> = [0].into();
        for (index, node) in self.derivation.nodes.iter().enumerate() {
            match &node.step {
                None => {
                    if !open_nodes.contains(&index) {
                        return Err(format!("node {index} has no step but is not open"));
                    }
                }
                Some(step) => {
                    if matches!(step.rule, StepRule::Assumed) {
                        assumed += 1;
                    }
                    for child in &step.children {
                        if !introduced.insert(*child) {
                            return Err(format!("node {child} introduced twice"));
                        }
                    }
                }
            }
        }
        if introduced.len() != self.derivation.nodes.len() {
            return Err("some derivation nodes were never introduced".to_owned());
        }
        if assumed != self.assumptions.len() {
            return Err(format!(
                "{} assumed steps but {} recorded assumptions",
                assumed,
                self.assumptions.len()
            ));
        }
        Ok(())
    }
}

/// The printable constructions of a completed result.
pub fn composition_to_constructions(result: &TransferResult) -> Vec<Construction> {
    result.composition.to_constructions()
}

/// A single token bijection making two composition listings equal entry by
/// entry, in some pairing order. Entry counts must agree.
pub fn equal_compositions_up_to_renaming(
    a: &[Construction],
    b: &[Construction],
) -> Option<BTreeMap<TokenId, TokenId>> {
    if a.len() != b.len() {
        return None;
    }
    fn assign(
        a: &[Construction],
        b: &[Construction],
        taken: &mut Vec<bool>,
        fwd: &mut BTreeMap<TokenId, TokenId>,
        rev: &mut BTreeMap<TokenId, TokenId>,
    ) -> bool {
        let Some(next) = a.first() else {
            return true;
        };
        for (i, candidate) in b.iter().enumerate() {
            if taken[i] {
                continue;
            }
            let saved_fwd = fwd.clone();
            let saved_rev = rev.clone();
            if lockstep(next, candidate, fwd, rev) {
                taken[i] = true;
                if assign(&a[1..], b, taken, fwd, rev) {
                    return true;
                }
                taken[i] = false;
            }
            *fwd = saved_fwd;
            *rev = saved_rev;
        }
        false
    }
    let mut fwd = BTreeMap::new();
    let mut rev = BTreeMap::new();
    let mut taken = vec![false; b.len()];
    if assign(a, b, &mut taken, &mut fwd, &mut rev) {
        Some(fwd)
    } else {
        None
    }
}

/// Renaming-equivalence of completed results: compositions correspond under
/// one bijection and the assumption multisets agree through it.
pub fn results_equivalent(a: &TransferResult, b: &TransferResult) -> bool {
    let Some(bijection) = equal_compositions_up_to_renaming(
        &a.composition.to_constructions(),
        &b.composition.to_constructions(),
    ) else {
        return false;
    };
    if a.assumptions.len() != b.assumptions.len() {
        return false;
    }
    let translate = |goal: &Goal| -> Option<(RelationLabel, Vec<Token>, Vec<TokenId>)> {
        let vars = goal
            .target_vars
            .iter()
            .map(|v| bijection.get(&v.id).cloned())
            .collect::<Option<Vec<_>>>()?;
        Some((goal.relation.clone(), goal.source_tokens.clone(), vars))
    };
    let mut left: Vec<_> = match a
        .assumptions
        .iter()
        .map(translate)
        .collect::<Option<Vec<_>>>()
    {
        Some(v) => v,
        None => return false,
    };
    let mut right: Vec<_> = b
        .assumptions
        .iter()
        .map(|g| {
            (
                g.relation.clone(),
                g.source_tokens.clone(),
                g.target_vars
                    .iter()
                    .map(|v| v.id.clone())
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    left.sort();
    right.sort();
    left == right
}
