//! Trust computation over localized data-sets.
//!
//! A profile X's trust in a neighbor Y is the ratio of X's accepted outgoing
//! activity toward Y to X's accepted incoming activity from Y. A pair with no
//! incoming history gets a configurable default that passes the threshold, so
//! strangers are admitted until their one-sided behavior drags the ratio
//! down. When X and Y are not connected, trust can be inferred through a
//! single intermediary that X already trusts.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::SocialGraph;
use crate::profile::ProfileId;
use crate::rational::Rational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TrustError {
    #[error("a profile cannot rate itself: {0:?}")]
    SelfTrust(String),
    #[error("profiles {0:?} and {1:?} are not connected")]
    NotConnected(String, String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("threshold must be in (0, 1], got {0}")]
    ThresholdOutOfRange(Rational),
    #[error("zero-denominator trust {zero_denominator_trust} must be >= threshold {threshold}")]
    DefaultBelowThreshold {
        zero_denominator_trust: Rational,
        threshold: Rational,
    },
}

/// How a directed trust value is computed from the (outgoing, incoming) pair.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrustMetric {
    /// `outgoing / incoming`; unbounded above. One-sided incoming traffic
    /// drives the value toward zero, which is what blocks spammers.
    #[default]
    Ratio,
    /// `min(outgoing/incoming, incoming/outgoing)`; bounded to [0, 1] and
    /// equal to 1 exactly when the history is perfectly reciprocal.
    Symmetric,
}

/// Trust parameters. Invalid combinations are unrepresentable: construct via
/// [`TrustConfig::new`] or deserialize, both of which validate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTrustConfig")]
pub struct TrustConfig {
    threshold: Rational,
    zero_denominator_trust: Rational,
    metric: TrustMetric,
}

impl Default for TrustConfig {
    fn default() -> Self {
        TrustConfig {
            threshold: Rational::new(1, 2).expect("static"),
            zero_denominator_trust: Rational::one(),
            metric: TrustMetric::Ratio,
        }
    }
}

impl TrustConfig {
    pub fn new(
        threshold: Rational,
        zero_denominator_trust: Rational,
        metric: TrustMetric,
    ) -> Result<Self, ConfigError> {
        if threshold.is_zero() || threshold > Rational::one() {
            return Err(ConfigError::ThresholdOutOfRange(threshold));
        }
        if zero_denominator_trust < threshold {
            return Err(ConfigError::DefaultBelowThreshold {
                zero_denominator_trust,
                threshold,
            });
        }
        Ok(TrustConfig {
            threshold,
            zero_denominator_trust,
            metric,
        })
    }

    /// Default config with a custom threshold (zero-denominator trust stays
    /// at 1, which satisfies the >= threshold constraint for any valid θ).
    pub fn with_threshold(threshold: Rational) -> Result<Self, ConfigError> {
        TrustConfig::new(threshold, Rational::one(), TrustMetric::Ratio)
    }

    pub fn threshold(&self) -> Rational {
        self.threshold
    }

    pub fn zero_denominator_trust(&self) -> Rational {
        self.zero_denominator_trust
    }

    pub fn metric(&self) -> TrustMetric {
        self.metric
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrustConfig {
    threshold: Option<Rational>,
    zero_denominator_trust: Option<Rational>,
    metric: Option<TrustMetric>,
}

impl TryFrom<RawTrustConfig> for TrustConfig {
    type Error = ConfigError;

    fn try_from(raw: RawTrustConfig) -> Result<Self, Self::Error> {
        let d = TrustConfig::default();
        TrustConfig::new(
            raw.threshold.unwrap_or(d.threshold),
            raw.zero_denominator_trust
                .unwrap_or(d.zero_denominator_trust),
            raw.metric.unwrap_or(d.metric),
        )
    }
}

/// Where a trust value came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrustBasis {
    /// Computed from the rater's own counters for the subject.
    Direct,
    /// Borrowed from the named intermediary's direct trust in the subject.
    Inferred(ProfileId),
    /// No incoming history; the configured zero-denominator default.
    Default,
}

/// A trust value together with its basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrustScore {
    pub value: Rational,
    pub basis: TrustBasis,
}

/// T(x, y): x's trust in y, from x's localized data-set row for y.
///
/// An absent row reads as (0, 0). Zero incoming activity yields the
/// configured default with `TrustBasis::Default`.
pub fn direct_trust(
    graph: &SocialGraph,
    x: &ProfileId,
    y: &ProfileId,
    cfg: &TrustConfig,
) -> Result<TrustScore, TrustError> {
    if x == y {
        return Err(TrustError::SelfTrust(x.to_string()));
    }
    let rec = graph.activity(x, y);
    let (outgoing, incoming) = (rec.outgoing, rec.incoming);
    if incoming == 0 {
        return Ok(TrustScore {
            value: cfg.zero_denominator_trust,
            basis: TrustBasis::Default,
        });
    }
    let value = match cfg.metric {
        TrustMetric::Ratio => Rational::new(outgoing, incoming).expect("incoming > 0"),
        TrustMetric::Symmetric => {
            if outgoing == 0 {
                Rational::zero()
            } else {
                let forward = Rational::new(outgoing, incoming).expect("incoming > 0");
                let backward = Rational::new(incoming, outgoing).expect("outgoing > 0");
                forward.min(backward)
            }
        }
    };
    Ok(TrustScore {
        value,
        basis: TrustBasis::Direct,
    })
}

/// Infers b's trust in a through a single trusted intermediary.
///
/// A candidate C must be a neighbor of b with direct-basis trust at or above
/// the threshold (a stranger b has never heard from cannot vouch) and must be
/// connected to a. Among candidates the one with the highest T(b, C) wins;
/// ties prefer the larger T(C, a), then the smallest profile id. The returned
/// value is T(C, a) itself; no composition with T(b, C) is applied.
pub fn infer_trust(
    graph: &SocialGraph,
    b: &ProfileId,
    a: &ProfileId,
    cfg: &TrustConfig,
) -> Result<Option<TrustScore>, TrustError> {
    if b == a {
        return Err(TrustError::SelfTrust(b.to_string()));
    }
    let mut best: Option<(Rational, Rational, &ProfileId)> = None;
    for c in graph.neighbors(b) {
        if c == a {
            continue;
        }
        let to_candidate = direct_trust(graph, b, c, cfg)?;
        if to_candidate.basis != TrustBasis::Direct || to_candidate.value < cfg.threshold {
            continue;
        }
        if !graph.is_connected(c, a) {
            continue;
        }
        let vouched = direct_trust(graph, c, a, cfg)?.value;
        // Neighbors iterate in ascending id order, so strict comparisons
        // leave the smallest id in place on full ties.
        let better = match &best {
            None => true,
            Some((best_bc, best_ca, _)) => {
                to_candidate.value > *best_bc
                    || (to_candidate.value == *best_bc && vouched > *best_ca)
            }
        };
        if better {
            best = Some((to_candidate.value, vouched, c));
        }
    }
    Ok(best.map(|(_, vouched, c)| TrustScore {
        value: vouched,
        basis: TrustBasis::Inferred(c.clone()),
    }))
}

/// Resolves x's trust in y the way the engine would for an incoming
/// interaction: direct (or default) trust when connected, inferred trust
/// through an intermediary when not, `None` when neither exists.
pub fn resolve_trust(
    graph: &SocialGraph,
    x: &ProfileId,
    y: &ProfileId,
    cfg: &TrustConfig,
) -> Result<Option<TrustScore>, TrustError> {
    if graph.is_connected(x, y) {
        return direct_trust(graph, x, y, cfg).map(Some);
    }
    infer_trust(graph, x, y, cfg)
}

/// The two directed weights of one undirected edge: (T(x,y), T(y,x)).
pub fn edge_weight(
    graph: &SocialGraph,
    x: &ProfileId,
    y: &ProfileId,
    cfg: &TrustConfig,
) -> Result<(TrustScore, TrustScore), TrustError> {
    if !graph.is_connected(x, y) {
        return Err(TrustError::NotConnected(x.to_string(), y.to_string()));
    }
    Ok((
        direct_trust(graph, x, y, cfg)?,
        direct_trust(graph, y, x, cfg)?,
    ))
}

/// Materializes the weighted-edge view as CSV: one `src,dst,trust` row per
/// edge direction, sorted by (src, dst), values as 6-digit decimals.
pub fn weights_csv(graph: &SocialGraph, cfg: &TrustConfig) -> String {
    let mut rows: Vec<(&ProfileId, &ProfileId)> = Vec::new();
    for (a, b, _) in graph.edges() {
        rows.push((a, b));
        rows.push((b, a));
    }
    rows.sort();
    let mut out = String::from("src,dst,trust\n");
    for (src, dst) in rows {
        let score = direct_trust(graph, src, dst, cfg).expect("edges never self-reference");
        out.push_str(&format!("{},{},{}\n", src, dst, score.value.to_decimal_6()));
    }
    out
}
