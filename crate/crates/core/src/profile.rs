//! Profile identifiers and relationship labels.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IdError {
    #[error("identifier must not be empty")]
    Empty,
    #[error("identifier must not contain whitespace: {0:?}")]
    Whitespace(String),
}

/// Opaque unique profile identifier.
///
/// Non-empty, free of whitespace, and totally ordered by byte value so that
/// every tie-break in the engine is deterministic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ProfileId(String);

impl ProfileId {
    pub fn new(id: impl Into<String>) -> Result<Self, IdError> {
        let id = id.into();
        validate_token(&id)?;
        Ok(ProfileId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ProfileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for ProfileId {
    type Err = IdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProfileId::new(s)
    }
}

impl TryFrom<String> for ProfileId {
    type Error = IdError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        ProfileId::new(value)
    }
}

impl From<ProfileId> for String {
    fn from(value: ProfileId) -> Self {
        value.0
    }
}

/// Label attached to a relationship edge.
///
/// The engine carries the kind but does not weight trust by it; the default
/// single kind is `connection`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct RelationshipKind(String);

pub const DEFAULT_RELATIONSHIP: &str = "connection";

impl RelationshipKind {
    pub fn new(kind: impl Into<String>) -> Result<Self, IdError> {
        let kind = kind.into();
        validate_token(&kind)?;
        Ok(RelationshipKind(kind))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Default for RelationshipKind {
    fn default() -> Self {
        RelationshipKind(DEFAULT_RELATIONSHIP.to_string())
    }
}

impl fmt::Display for RelationshipKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for RelationshipKind {
    type Error = IdError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        RelationshipKind::new(value)
    }
}

impl From<RelationshipKind> for String {
    fn from(value: RelationshipKind) -> Self {
        value.0
    }
}

fn validate_token(s: &str) -> Result<(), IdError> {
    if s.is_empty() {
        return Err(IdError::Empty);
    }
    if s.chars().any(char::is_whitespace) {
        return Err(IdError::Whitespace(s.to_string()));
    }
    Ok(())
}
