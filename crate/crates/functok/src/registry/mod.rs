//! Function pool: specs, functional-token assignment, and the signature corpus.
//!
//! A [`Registry`] holds an ordered pool of [`FunctionSpec`]s. Each spec is bound
//! to one functional token `<nexa_i>`, assigned contiguously in registration
//! order. The reserved `irrelevant_function` (zero parameters) is the target of
//! negative training examples.

mod sigparse;

pub use sigparse::{parse_fixture_file, parse_signature_source, render_signature_source};

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use thiserror::Error;

/// Name of the reserved no-op function that negative queries map to.
pub const IRRELEVANT_FUNCTION: &str = "irrelevant_function";

/// Errors from registry construction and lookup.
#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("duplicate function name: {0}")]
    DuplicateName(String),
    #[error("invalid spec for `{function}`, field `{field}`: {reason}")]
    InvalidSpec {
        function: String,
        field: String,
        reason: String,
    },
    #[error("malformed signature at line {line}: {msg}")]
    MalformedSignature { line: usize, msg: String },
    #[error("unknown type word `{word}` at line {line}")]
    UnknownTypeWord { line: usize, word: String },
    #[error("unknown functional token: {0}")]
    UnknownToken(String),
    #[error("unknown function name: {0}")]
    UnknownName(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// The six value kinds a parameter can take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParamKind {
    String,
    Integer,
    Float,
    Boolean,
    StringList,
    Enum,
}

impl fmt::Display for ParamKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ParamKind::String => "string",
            ParamKind::Integer => "integer",
            ParamKind::Float => "float",
            ParamKind::Boolean => "boolean",
            ParamKind::StringList => "string-list",
            ParamKind::Enum => "enum",
        };
        f.write_str(s)
    }
}

/// A literal default value as written in a `def` header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Literal {
    Str(String),
    Int(i64),
    Float(f64),
    Bool(bool),
}

/// One parameter of a callable function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    pub kind: ParamKind,
    /// Non-empty only when `kind == Enum`.
    pub enum_values: Vec<String>,
    pub required: bool,
    /// Absent for required params. A `None` header default means "no default".
    pub default: Option<Literal>,
}

impl ParamSpec {
    fn check(&self, function: &str) -> Result<(), RegistryError> {
        if self.required && self.default.is_some() {
            return Err(RegistryError::InvalidSpec {
                function: function.into(),
                field: self.name.clone(),
                reason: "required param must not have a default".into(),
            });
        }
        if self.kind == ParamKind::Enum {
            if self.enum_values.is_empty() {
                return Err(RegistryError::InvalidSpec {
                    function: function.into(),
                    field: self.name.clone(),
                    reason: "enum param needs at least one value".into(),
                });
            }
            if let Some(Literal::Str(d)) = &self.default {
                if !self.enum_values.iter().any(|v| v == d) {
                    return Err(RegistryError::InvalidSpec {
                        function: function.into(),
                        field: self.name.clone(),
                        reason: format!("default '{d}' is not an enum member"),
                    });
                }
            }
        } else if !self.enum_values.is_empty() {
            return Err(RegistryError::InvalidSpec {
                function: function.into(),
                field: self.name.clone(),
                reason: "enum_values on non-enum param".into(),
            });
        }
        Ok(())
    }
}

/// Category of a callable API, mirroring the fixture corpus layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Category {
    AndroidSystem,
    AndroidApp,
    SmartDevice,
    Vehicle,
    Other,
}

/// A callable API: name, description, ordered typed parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpec {
    pub name: String,
    pub description: String,
    pub params: Vec<ParamSpec>,
    pub returns_doc: String,
    pub category: Category,
}

impl FunctionSpec {
    /// Checks the per-spec invariants (param invariants, required-before-optional).
    pub fn check(&self) -> Result<(), RegistryError> {
        let mut seen_optional = false;
        for p in &self.params {
            p.check(&self.name)?;
            if !p.required {
                seen_optional = true;
            } else if seen_optional {
                return Err(RegistryError::InvalidSpec {
                    function: self.name.clone(),
                    field: p.name.clone(),
                    reason: "required param after optional param".into(),
                });
            }
        }
        Ok(())
    }
}

/// A functional token: either bound to one function or the `<nexa_end>` sentinel.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FunctionalToken {
    Bound { index: usize, function: String },
    End,
}

impl FunctionalToken {
    /// Surface form: `<nexa_i>` or `<nexa_end>`.
    pub fn surface(&self) -> String {
        match self {
            FunctionalToken::Bound { index, .. } => format!("<nexa_{index}>"),
            FunctionalToken::End => "<nexa_end>".into(),
        }
    }

    pub fn index(&self) -> Option<usize> {
        match self {
            FunctionalToken::Bound { index, .. } => Some(*index),
            FunctionalToken::End => None,
        }
    }
}

/// Immutable-after-build pool of functions with token bindings.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Registry {
    specs: Vec<FunctionSpec>,
    /// Raw fixture source per spec, when loaded from a corpus file.
    sources: Vec<Option<String>>,
    by_name: HashMap<String, usize>,
    irrelevant_index: Option<usize>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a spec, assigning the next functional-token index.
    pub fn register(&mut self, spec: FunctionSpec) -> Result<FunctionalToken, RegistryError> {
        self.register_with_source(spec, None)
    }

    /// Registers a spec and remembers its fixture source text.
    pub fn register_with_source(
        &mut self,
        spec: FunctionSpec,
        source: Option<String>,
    ) -> Result<FunctionalToken, RegistryError> {
        if self.by_name.contains_key(&spec.name) {
            return Err(RegistryError::DuplicateName(spec.name));
        }
        spec.check()?;
        let index = self.specs.len();
        if spec.name == IRRELEVANT_FUNCTION {
            if !spec.params.is_empty() {
                return Err(RegistryError::InvalidSpec {
                    function: spec.name,
                    field: "params".into(),
                    reason: "irrelevant_function must take no parameters".into(),
                });
            }
            if self.irrelevant_index.is_some() {
                return Err(RegistryError::DuplicateName(spec.name));
            }
            self.irrelevant_index = Some(index);
        }
        let token = FunctionalToken::Bound {
            index,
            function: spec.name.clone(),
        };
        self.by_name.insert(spec.name.clone(), index);
        self.specs.push(spec);
        self.sources.push(source);
        Ok(token)
    }

    /// Loads every definition in one fixture file, in order.
    pub fn load_fixture_file(
        &mut self,
        path: impl AsRef<Path>,
        category: Category,
    ) -> Result<Vec<FunctionalToken>, RegistryError> {
        let text = std::fs::read_to_string(path)?;
        self.load_fixture_text(&text, category)
    }

    /// Same as [`Registry::load_fixture_file`] but from in-memory text.
    pub fn load_fixture_text(
        &mut self,
        text: &str,
        category: Category,
    ) -> Result<Vec<FunctionalToken>, RegistryError> {
        let mut out = Vec::new();
        for (spec, source) in parse_fixture_file(text, category)? {
            out.push(self.register_with_source(spec, Some(source))?);
        }
        Ok(out)
    }

    /// The 20-function shipped corpus plus `irrelevant_function`.
    pub fn builtin() -> Self {
        let mut reg = Registry::new();
        let files = [
            (
                include_str!("../../fixtures/android_system.txt"),
                Category::AndroidSystem,
            ),
            (
                include_str!("../../fixtures/android_app.txt"),
                Category::AndroidApp,
            ),
            (
                include_str!("../../fixtures/smart_device.txt"),
                Category::SmartDevice,
            ),
            (include_str!("../../fixtures/vehicle.txt"), Category::Vehicle),
            (include_str!("../../fixtures/irrelevant.txt"), Category::Other),
        ];
        for (text, cat) in files {
            reg.load_fixture_text(text, cat)
                .expect("builtin fixture corpus must parse");
        }
        reg
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    /// Token index of the reserved `irrelevant_function`, if registered.
    pub fn irrelevant_index(&self) -> Option<usize> {
        self.irrelevant_index
    }

    pub fn specs(&self) -> &[FunctionSpec] {
        &self.specs
    }

    pub fn spec_at(&self, index: usize) -> Option<&FunctionSpec> {
        self.specs.get(index)
    }

    /// Raw fixture source for the spec at `index`, rendering one when the
    /// registry was built programmatically.
    pub fn source_at(&self, index: usize) -> Option<String> {
        let spec = self.specs.get(index)?;
        Some(match &self.sources[index] {
            Some(s) => s.clone(),
            None => render_signature_source(spec),
        })
    }

    pub fn token_for(&self, name: &str) -> Result<FunctionalToken, RegistryError> {
        let &index = self
            .by_name
            .get(name)
            .ok_or_else(|| RegistryError::UnknownName(name.into()))?;
        Ok(FunctionalToken::Bound {
            index,
            function: name.into(),
        })
    }

    /// Looks up the spec bound to a token. The END sentinel is not valid here.
    pub fn lookup_token(&self, token: &FunctionalToken) -> Result<&FunctionSpec, RegistryError> {
        match token {
            FunctionalToken::End => Err(RegistryError::UnknownToken("<nexa_end>".into())),
            FunctionalToken::Bound { index, .. } => self
                .specs
                .get(*index)
                .ok_or_else(|| RegistryError::UnknownToken(token.surface())),
        }
    }

    pub fn lookup_index(&self, index: usize) -> Result<&FunctionSpec, RegistryError> {
        self.specs
            .get(index)
            .ok_or_else(|| RegistryError::UnknownToken(format!("<nexa_{index}>")))
    }

    pub fn lookup_name(&self, name: &str) -> Result<&FunctionSpec, RegistryError> {
        let &index = self
            .by_name
            .get(name)
            .ok_or_else(|| RegistryError::UnknownName(name.into()))?;
        Ok(&self.specs[index])
    }

    /// Deterministic manifest (registration order) for datagen and bench.
    pub fn manifest(&self) -> RegistryManifest {
        RegistryManifest {
            functions: self
                .specs
                .iter()
                .enumerate()
                .map(|(index, s)| ManifestEntry {
                    name: s.name.clone(),
                    index,
                    token: format!("<nexa_{index}>"),
                    description: s.description.clone(),
                    params: s.params.clone(),
                })
                .collect(),
            irrelevant_index: self.irrelevant_index,
        }
    }
}

/// Serializable registry export, field order fixed by registration order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegistryManifest {
    pub functions: Vec<ManifestEntry>,
    pub irrelevant_index: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub index: usize,
    pub token: String,
    pub description: String,
    pub params: Vec<ParamSpec>,
}
