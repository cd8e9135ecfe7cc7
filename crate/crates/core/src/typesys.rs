//! Type systems: a finite set of type names with a subtype partial order,
//! open families that may grow subtypes at use sites, and the
//! reflexive-transitive closure kept up to date behind the scenes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::ident::{self, IdentError};

/// A type name. Two values are equal iff their texts are equal.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeName(String);

impl TypeName {
    pub fn new(text: impl Into<String>) -> Result<Self, IdentError> {
        let text = text.into();
        ident::validate_identifier(&text)?;
        Ok(TypeName(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TypeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for TypeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TypeName({})", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeSysError {
    #[error("invalid name: {0}")]
    InvalidName(#[from] IdentError),
    #[error("type `{0}` declared more than once")]
    DuplicateType(TypeName),
    #[error("order entry mentions undeclared type `{0}`")]
    UnknownTypeInOrder(TypeName),
    #[error("subtype cycle: {}", render_cycle(.0))]
    SubtypeCycle(Vec<TypeName>),
    #[error("unknown type `{0}`")]
    UnknownType(TypeName),
    #[error("`{0}` is not an open family (it was not declared with `_:`)")]
    NotOpenFamily(TypeName),
    #[error("type `{child}` is already registered under `{existing}`; cannot re-register under `{requested}`")]
    ConflictingParent {
        child: TypeName,
        existing: TypeName,
        requested: TypeName,
    },
    #[error(
        "`{child}` is a declared type and the declared order does not place it under `{requested}`"
    )]
    DeclaredTypeConflict {
        child: TypeName,
        requested: TypeName,
    },
    #[error("a type system needs at least one type")]
    EmptyTypeSystem,
}

fn render_cycle(cycle: &[TypeName]) -> String {
    let mut parts: Vec<&str> = cycle.iter().map(TypeName::as_str).collect();
    if let Some(first) = parts.first().copied() {
        parts.push(first);
    }
    parts.join(" < ")
}

/// A type system `(Ty, <=)`: declared types, open families, the declared
/// order, its computed closure, and the dynamic types added by token
/// annotations. Immutable; registration returns a new value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeSystem {
    name: String,
    declared_types: BTreeSet<TypeName>,
    open_families: BTreeSet<TypeName>,
    declared_order: BTreeSet<(TypeName, TypeName)>,
    closure: BTreeSet<(TypeName, TypeName)>,
    dynamic_types: BTreeMap<TypeName, TypeName>,
}

pub fn build_type_system(
    name: &str,
    type_entries: &[(TypeName, bool)],
    order_entries: &[(TypeName, TypeName)],
) -> Result<TypeSystem, TypeSysError> {
    ident::validate_identifier(name)?;
    if type_entries.is_empty() {
        return Err(TypeSysError::EmptyTypeSystem);
    }
    let mut declared_types = BTreeSet::new();
    let mut open_families = BTreeSet::new();
    for (ty, open) in type_entries {
        if !declared_types.insert(ty.clone()) {
            return Err(TypeSysError::DuplicateType(ty.clone()));
        }
        if *open {
            open_families.insert(ty.clone());
        }
    }
    let mut declared_order = BTreeSet::new();
    for (sub, sup) in order_entries {
        for ty in [sub, sup] {
            if !declared_types.contains(ty) {
                return Err(TypeSysError::UnknownTypeInOrder(ty.clone()));
            }
        }
        declared_order.insert((sub.clone(), sup.clone()));
    }
    let closure = compute_closure(&declared_order, &declared_types)?;
    Ok(TypeSystem {
        name: name.to_owned(),
        declared_types,
        open_families,
        declared_order,
        closure,
        dynamic_types: BTreeMap::new(),
    })
}

/// Smallest reflexive-transitive superset of `declared_order` over
/// `universe`, or the antisymmetry violation that prevents one.
pub fn compute_closure(
    declared_order: &BTreeSet<(TypeName, TypeName)>,
    universe: &BTreeSet<TypeName>,
) -> Result<BTreeSet<(TypeName, TypeName)>, TypeSysError> {
    let mut nodes: BTreeSet<TypeName> = universe.clone();
    for (a, b) in declared_order {
        nodes.insert(a.clone());
        nodes.insert(b.clone());
    }

    let mut successors: BTreeMap<&TypeName, Vec<&TypeName>> = BTreeMap::new();
    for (a, b) in declared_order {
        successors.entry(a).or_default().push(b);
    }

    if let Some(cycle) = find_cycle(&nodes, &successors) {
        return Err(TypeSysError::SubtypeCycle(cycle));
    }

    let mut closure = BTreeSet::new();
    for node in &nodes {
        // depth-first reachability from each node; self is always reachable
        let mut stack = vec![node];
        let mut seen: BTreeSet<&TypeName> = BTreeSet::new();
        while let Some(current) = stack.pop() {
            if !seen.insert(current) {
                continue;
            }
            closure.insert((node.clone(), current.clone()));
            if let Some(next) = successors.get(current) {
                stack.extend(next.iter().copied());
            }
        }
    }
    Ok(closure)
}

/// Looks for a directed cycle through at least two distinct nodes.
/// Self-loops are harmless (they collapse into reflexivity).
fn find_cycle(
    nodes: &BTreeSet<TypeName>,
    successors: &BTreeMap<&TypeName, Vec<&TypeName>>,
) -> Option<Vec<TypeName>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        InProgress,
        Done,
    }
    let mut marks: BTreeMap<&TypeName, Mark> = BTreeMap::new();
    let mut path: Vec<&TypeName> = Vec::new();

    fn visit<'a>(
        node: &'a TypeName,
        successors: &BTreeMap<&TypeName, Vec<&'a TypeName>>,
        marks: &mut BTreeMap<&'a TypeName, Mark>,
        path: &mut Vec<&'a TypeName>,
    ) -> Option<Vec<TypeName>> {
        match marks.get(node) {
            Some(Mark::Done) => return None,
            Some(Mark::InProgress) => {
                let start = path.iter().position(|n| *n == node).unwrap_or(0);
                let cycle: Vec<TypeName> = path[start..].iter().map(|n| (*n).clone()).collect();
                if cycle.len() >= 2 {
                    return Some(cycle);
                }
                return None;
            }
            None => {}
        }
        marks.insert(node, Mark::InProgress);
        path.push(node);
        if let Some(next) = successors.get(node) {
            for succ in next {
                if *succ == node {
                    continue; // self-loop
                }
                if let Some(cycle) = visit(succ, successors, marks, path) {
                    return Some(cycle);
                }
            }
        }
        path.pop();
        marks.insert(node, Mark::Done);
        None
    }

    for node in nodes {
        if let Some(cycle) = visit(node, successors, &mut marks, &mut path) {
            return Some(cycle);
        }
    }
    None
}

impl TypeSystem {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn declared_types(&self) -> &BTreeSet<TypeName> {
        &self.declared_types
    }

    pub fn open_families(&self) -> &BTreeSet<TypeName> {
        &self.open_families
    }

    pub fn declared_order(&self) -> &BTreeSet<(TypeName, TypeName)> {
        &self.declared_order
    }

    pub fn dynamic_types(&self) -> &BTreeMap<TypeName, TypeName> {
        &self.dynamic_types
    }

    /// All closure pairs, dynamic registrations included.
    pub fn closure_pairs(&self) -> impl Iterator<Item = &(TypeName, TypeName)> {
        self.closure.iter()
    }

    /// A type is known if it was declared or registered dynamically.
    pub fn is_known(&self, ty: &TypeName) -> bool {
        self.declared_types.contains(ty) || self.dynamic_types.contains_key(ty)
    }

    pub fn is_open_family(&self, ty: &TypeName) -> bool {
        self.open_families.contains(ty)
    }

    fn require_known(&self, ty: &TypeName) -> Result<(), TypeSysError> {
        if self.is_known(ty) {
            Ok(())
        } else {
            Err(TypeSysError::UnknownType(ty.clone()))
        }
    }

    /// `sub <= sup` in the closed order.
    pub fn leq(&self, sub: &TypeName, sup: &TypeName) -> Result<bool, TypeSysError> {
        self.require_known(sub)?;
        self.require_known(sup)?;
        Ok(self.closure.contains(&(sub.clone(), sup.clone())))
    }

    /// The lower of two comparable types; `None` when incomparable.
    pub fn meet_if_comparable(
        &self,
        a: &TypeName,
        b: &TypeName,
    ) -> Result<Option<TypeName>, TypeSysError> {
        if self.leq(a, b)? {
            Ok(Some(a.clone()))
        } else if self.leq(b, a)? {
            Ok(Some(b.clone()))
        } else {
            Ok(None)
        }
    }

    /// Adds `new_type` below `parent`, which must be an open family.
    /// Idempotent for a repeated identical registration; re-annotating a
    /// declared type is a no-op when the closure already agrees.
    pub fn register_dynamic_type(
        &self,
        new_type: &TypeName,
        parent: &TypeName,
    ) -> Result<TypeSystem, TypeSysError> {
        self.require_known(parent)?;
        if !self.open_families.contains(parent) {
            return Err(TypeSysError::NotOpenFamily(parent.clone()));
        }
        if self.declared_types.contains(new_type) {
            return if self.closure.contains(&(new_type.clone(), parent.clone())) {
                Ok(self.clone())
            } else {
                Err(TypeSysError::DeclaredTypeConflict {
                    child: new_type.clone(),
                    requested: parent.clone(),
                })
            };
        }
        if let Some(existing) = self.dynamic_types.get(new_type) {
            return if existing == parent {
                Ok(self.clone())
            } else {
                Err(TypeSysError::ConflictingParent {
                    child: new_type.clone(),
                    existing: existing.clone(),
                    requested: parent.clone(),
                })
            };
        }
        let mut next = self.clone();
        next.dynamic_types.insert(new_type.clone(), parent.clone());
        // only edges out of the fresh type can appear; nothing points at it
        next.closure.insert((new_type.clone(), new_type.clone()));
        let ups: Vec<TypeName> = self
            .closure
            .iter()
            .filter(|(a, _)| a == parent)
            .map(|(_, b)| b.clone())
            .collect();
        for up in ups {
            next.closure.insert((new_type.clone(), up));
        }
        Ok(next)
    }
}
