//! Per-event verdicts and the line-delimited decision log format.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::event::{parse_jsonl, JsonlError};
use crate::profile::ProfileId;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

/// Which rule of the resolution order produced the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// Connected pair, trust from the destination's own counters.
    Direct,
    /// Unconnected pair, trust borrowed from an intermediary (see `via`).
    Inferred,
    /// Connected pair with no incoming history: zero-denominator default.
    Default,
    /// No direct edge and no qualifying intermediary; the configured
    /// fallback policy decided, and no trust value was compared.
    Fallback,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecisionError {
    #[error("basis {basis:?} and via field disagree")]
    ViaMismatch { basis: Basis },
    #[error("basis {basis:?} and trust field disagree")]
    TrustMismatch { basis: Basis },
}

/// The engine's verdict for one event.
///
/// `via` is present exactly for inferred decisions, and `trust` is present
/// exactly for non-fallback decisions (it is the value that was compared to
/// the threshold).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Decision {
    pub seq: u64,
    pub verdict: Verdict,
    pub basis: Basis,
    pub via: Option<ProfileId>,
    pub trust: Option<Rational>,
}

impl Decision {
    pub fn direct(seq: u64, verdict: Verdict, trust: Rational) -> Self {
        Decision {
            seq,
            verdict,
            basis: Basis::Direct,
            via: None,
            trust: Some(trust),
        }
    }

    pub fn default_basis(seq: u64, verdict: Verdict, trust: Rational) -> Self {
        Decision {
            seq,
            verdict,
            basis: Basis::Default,
            via: None,
            trust: Some(trust),
        }
    }

    pub fn inferred(seq: u64, verdict: Verdict, via: ProfileId, trust: Rational) -> Self {
        Decision {
            seq,
            verdict,
            basis: Basis::Inferred,
            via: Some(via),
            trust: Some(trust),
        }
    }

    pub fn fallback(seq: u64, verdict: Verdict) -> Self {
        Decision {
            seq,
            verdict,
            basis: Basis::Fallback,
            via: None,
            trust: None,
        }
    }

    pub fn validate(&self) -> Result<(), DecisionError> {
        if (self.basis == Basis::Inferred) != self.via.is_some() {
            return Err(DecisionError::ViaMismatch { basis: self.basis });
        }
        if (self.basis == Basis::Fallback) != self.trust.is_none() {
            return Err(DecisionError::TrustMismatch { basis: self.basis });
        }
        Ok(())
    }

    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accept
    }
}

pub fn parse_decisions_jsonl(text: &str) -> Result<Vec<Decision>, JsonlError> {
    parse_jsonl(text, |line| {
        let decision: Decision = serde_json::from_str(line).map_err(|e| e.to_string())?;
        decision.validate().map_err(|e| e.to_string())?;
        Ok(decision)
    })
}

pub fn render_decisions_jsonl(decisions: &[Decision]) -> String {
    let mut out = String::new();
    for decision in decisions {
        out.push_str(&serde_json::to_string(decision).expect("decision serialization cannot fail"));
        out.push('\n');
    }
    out
}
