//! Constructor specifications: named constructors with an input type
//! sequence and an output type, bound by name to a type system.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::ident::{self, IdentError};
use crate::typesys::{TypeName, TypeSystem};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConstructorName(String);

impl ConstructorName {
    pub fn new(text: impl Into<String>) -> Result<Self, IdentError> {
        let text = text.into();
        ident::validate_identifier(&text)?;
        Ok(ConstructorName(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ConstructorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for ConstructorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ConstructorName({})", self.0)
    }
}

/// `([input types], output type)`; at least one input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructorSig {
    pub inputs: Vec<TypeName>,
    pub output: TypeName,
}

impl ConstructorSig {
    pub fn arity(&self) -> usize {
        self.inputs.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConSpecError {
    #[error("invalid name: {0}")]
    InvalidName(#[from] IdentError),
    #[error("constructor `{0}` declared more than once")]
    DuplicateConstructor(ConstructorName),
    #[error("signature of `{constructor}` mentions unknown type `{ty}`")]
    UnknownType {
        constructor: ConstructorName,
        ty: TypeName,
    },
    #[error("constructor `{0}` has no inputs; zero-argument constructors are not allowed")]
    EmptyInputs(ConstructorName),
    #[error("unknown constructor `{0}`")]
    UnknownConstructor(ConstructorName),
    #[error("a constructor specification needs at least one constructor")]
    EmptyConSpec,
}

/// Constructors and their signatures for one space, validated against the
/// type system it names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConSpec {
    name: String,
    type_system_name: String,
    constructors: BTreeMap<ConstructorName, ConstructorSig>,
}

pub fn build_con_spec(
    name: &str,
    type_system: &TypeSystem,
    decls: &[(ConstructorName, ConstructorSig)],
) -> Result<ConSpec, ConSpecError> {
    ident::validate_identifier(name)?;
    if decls.is_empty() {
        return Err(ConSpecError::EmptyConSpec);
    }
    let mut constructors = BTreeMap::new();
    for (cname, sig) in decls {
        if sig.inputs.is_empty() {
            return Err(ConSpecError::EmptyInputs(cname.clone()));
        }
        for ty in sig.inputs.iter().chain([&sig.output]) {
            if !type_system.is_known(ty) {
                return Err(ConSpecError::UnknownType {
                    constructor: cname.clone(),
                    ty: ty.clone(),
                });
            }
        }
        if constructors.insert(cname.clone(), sig.clone()).is_some() {
            return Err(ConSpecError::DuplicateConstructor(cname.clone()));
        }
    }
    Ok(ConSpec {
        name: name.to_owned(),
        type_system_name: type_system.name().to_owned(),
        constructors,
    })
}

impl ConSpec {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn type_system_name(&self) -> &str {
        &self.type_system_name
    }

    pub fn constructors(&self) -> &BTreeMap<ConstructorName, ConstructorSig> {
        &self.constructors
    }

    pub fn signature_of(
        &self,
        constructor: &ConstructorName,
    ) -> Result<&ConstructorSig, ConSpecError> {
        self.constructors
            .get(constructor)
            .ok_or_else(|| ConSpecError::UnknownConstructor(constructor.clone()))
    }
}
