//! Interaction events and the line-delimited event log format.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::profile::ProfileId;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EventError {
    #[error("event source and destination must differ: {0:?}")]
    SelfInteraction(String),
    #[error("interaction kind must not be empty")]
    EmptyKind,
    #[error("interaction kind must not contain whitespace: {0:?}")]
    KindWhitespace(String),
    #[error("{0:?} is a reserved interaction kind")]
    ReservedKind(String),
}

/// What sort of interaction an event is. The named kinds are the ones the
/// engine gives semantics to (`friend_request` can create an edge); anything
/// else rides along as an `Other` label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InteractionKind {
    Message,
    FriendRequest,
    Comment,
    Other(String),
}

impl InteractionKind {
    pub fn other(label: impl Into<String>) -> Result<Self, EventError> {
        let label = label.into();
        if label.is_empty() {
            return Err(EventError::EmptyKind);
        }
        if label.chars().any(char::is_whitespace) {
            return Err(EventError::KindWhitespace(label));
        }
        if matches!(label.as_str(), "message" | "friend_request" | "comment") {
            return Err(EventError::ReservedKind(label));
        }
        Ok(InteractionKind::Other(label))
    }

    pub fn as_str(&self) -> &str {
        match self {
            InteractionKind::Message => "message",
            InteractionKind::FriendRequest => "friend_request",
            InteractionKind::Comment => "comment",
            InteractionKind::Other(label) => label,
        }
    }
}

impl fmt::Display for InteractionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for InteractionKind {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for InteractionKind {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        match s.as_str() {
            "message" => Ok(InteractionKind::Message),
            "friend_request" => Ok(InteractionKind::FriendRequest),
            "comment" => Ok(InteractionKind::Comment),
            _ => InteractionKind::other(s).map_err(serde::de::Error::custom),
        }
    }
}

/// One timestamped directed interaction.
///
/// `seq` is the ordering authority within a log; `ts` is carried for
/// reporting only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionEvent {
    pub seq: u64,
    pub ts: u64,
    pub kind: InteractionKind,
    pub src: ProfileId,
    pub dst: ProfileId,
}

impl InteractionEvent {
    pub fn new(
        seq: u64,
        ts: u64,
        kind: InteractionKind,
        src: ProfileId,
        dst: ProfileId,
    ) -> Result<Self, EventError> {
        let event = InteractionEvent {
            seq,
            ts,
            kind,
            src,
            dst,
        };
        event.validate()?;
        Ok(event)
    }

    pub fn validate(&self) -> Result<(), EventError> {
        if self.src == self.dst {
            return Err(EventError::SelfInteraction(self.src.to_string()));
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct JsonlError {
    pub line: usize,
    pub message: String,
}

/// Parses a line-delimited log. Lines are 1-indexed in errors; a single
/// trailing newline is allowed, interior blank lines are not.
pub fn parse_jsonl<T, F>(text: &str, parse_line: F) -> Result<Vec<T>, JsonlError>
where
    F: Fn(&str) -> Result<T, String>,
{
    if text.is_empty() || text == "\n" {
        return Ok(Vec::new());
    }
    let body = text.strip_suffix('\n').unwrap_or(text);
    let mut items = Vec::new();
    for (idx, line) in body.split('\n').enumerate() {
        if line.is_empty() {
            return Err(JsonlError {
                line: idx + 1,
                message: "empty line".to_string(),
            });
        }
        let item = parse_line(line).map_err(|message| JsonlError {
            line: idx + 1,
            message,
        })?;
        items.push(item);
    }
    Ok(items)
}

pub fn parse_events_jsonl(text: &str) -> Result<Vec<InteractionEvent>, JsonlError> {
    parse_jsonl(text, |line| {
        let event: InteractionEvent = serde_json::from_str(line).map_err(|e| e.to_string())?;
        event.validate().map_err(|e| e.to_string())?;
        Ok(event)
    })
}

pub fn render_events_jsonl(events: &[InteractionEvent]) -> String {
    let mut out = String::new();
    for event in events {
        out.push_str(&serde_json::to_string(event).expect("event serialization cannot fail"));
        out.push('\n');
    }
    out
}
