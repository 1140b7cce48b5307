//! The interaction-filtering engine.
//!
//! For each event the engine resolves trust in a strict order — direct trust
//! when the pair is connected, inferred trust through an intermediary when
//! not, and a configured fallback when neither exists — then accepts the
//! event iff the resolved trust is at or above the threshold. Accepted
//! events update both localized data-sets; rejected events only move the
//! destination's audit counter, so a blocked sender's trust does not keep
//! falling from attempts the destination never saw.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::decision::{Decision, Verdict};
use crate::event::{InteractionEvent, InteractionKind};
use crate::graph::{GraphError, SnapshotError, SocialGraph};
use crate::profile::{ProfileId, RelationshipKind};
use crate::trust::{direct_trust, infer_trust, TrustBasis, TrustConfig};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("event {seq}: source and destination must differ ({src:?})")]
    SelfInteraction { seq: u64, src: String },
    #[error("event {seq}: out of order (previous seq {prev})")]
    OutOfOrderSeq { seq: u64, prev: u64 },
    #[error("event {seq}: timestamp {ts} precedes previous timestamp {prev_ts}")]
    NonMonotonicTimestamp { seq: u64, ts: u64, prev_ts: u64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("event and decision logs differ in length ({events} events, {decisions} decisions)")]
    LengthMismatch { events: usize, decisions: usize },
    #[error(
        "misaligned logs at index {index}: event seq {event_seq}, decision seq {decision_seq}"
    )]
    SeqMismatch {
        index: usize,
        event_seq: u64,
        decision_seq: u64,
    },
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
}

/// What to do when an event's source is unconnected and no qualifying
/// intermediary exists. The default admits strangers, which is what lets a
/// brand-new profile's first friend request through.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FallbackPolicy {
    #[default]
    Accept,
    Reject,
}

/// Engine configuration. All fields are optional in the serialized form and
/// fall back to the documented defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EngineConfig {
    pub trust: TrustConfig,
    pub fallback_policy: FallbackPolicy,
    pub friend_request_connects: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            trust: TrustConfig::default(),
            fallback_policy: FallbackPolicy::Accept,
            friend_request_connects: true,
        }
    }
}

impl EngineConfig {
    pub fn threshold(&self) -> crate::rational::Rational {
        self.trust.threshold()
    }
}

/// Decides one event against the current graph without mutating it.
///
/// Resolution order:
/// 1. connected destination/source pair: direct trust;
/// 2. otherwise, inferred trust via an intermediary if one qualifies;
/// 3. otherwise, the fallback policy.
///
/// Non-fallback verdicts accept iff the resolved value is >= the threshold.
pub fn decide(
    graph: &SocialGraph,
    event: &InteractionEvent,
    cfg: &EngineConfig,
) -> Result<Decision, EngineError> {
    if event.src == event.dst {
        return Err(EngineError::SelfInteraction {
            seq: event.seq,
            src: event.src.to_string(),
        });
    }
    let threshold = cfg.trust.threshold();
    if graph.is_connected(&event.dst, &event.src) {
        let score = direct_trust(graph, &event.dst, &event.src, &cfg.trust)
            .expect("src != dst already checked");
        let verdict = verdict_for(score.value, threshold);
        return Ok(match score.basis {
            TrustBasis::Direct => Decision::direct(event.seq, verdict, score.value),
            TrustBasis::Default => Decision::default_basis(event.seq, verdict, score.value),
            TrustBasis::Inferred(_) => unreachable!("direct_trust never infers"),
        });
    }
    if let Some(score) =
        infer_trust(graph, &event.dst, &event.src, &cfg.trust).expect("src != dst already checked")
    {
        let verdict = verdict_for(score.value, threshold);
        let via = match score.basis {
            TrustBasis::Inferred(via) => via,
            _ => unreachable!("infer_trust always reports its intermediary"),
        };
        return Ok(Decision::inferred(event.seq, verdict, via, score.value));
    }
    let verdict = match cfg.fallback_policy {
        FallbackPolicy::Accept => Verdict::Accept,
        FallbackPolicy::Reject => Verdict::Reject,
    };
    Ok(Decision::fallback(event.seq, verdict))
}

fn verdict_for(value: crate::rational::Rational, threshold: crate::rational::Rational) -> Verdict {
    if value >= threshold {
        Verdict::Accept
    } else {
        Verdict::Reject
    }
}

/// Decides one event and applies its effects to the graph.
///
/// Unknown profiles are registered first. On acceptance of a friend request
/// (with `friend_request_connects`) the edge is created before the counters
/// move; on rejection only the destination's audit counter moves.
pub fn process(
    graph: &mut SocialGraph,
    event: &InteractionEvent,
    cfg: &EngineConfig,
) -> Result<Decision, EngineError> {
    if event.src == event.dst {
        return Err(EngineError::SelfInteraction {
            seq: event.seq,
            src: event.src.to_string(),
        });
    }
    graph.add_profile(event.src.clone());
    graph.add_profile(event.dst.clone());
    let decision = decide(graph, event, cfg)?;
    match decision.verdict {
        Verdict::Accept => {
            if event.kind == InteractionKind::FriendRequest
                && cfg.friend_request_connects
                && !graph.is_connected(&event.src, &event.dst)
            {
                graph.connect(&event.src, &event.dst, RelationshipKind::default())?;
            }
            graph.apply_accepted_interaction(&event.src, &event.dst)?;
        }
        Verdict::Reject => {
            graph.record_rejected(&event.src, &event.dst)?;
        }
    }
    Ok(decision)
}

/// The result of replaying an event log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayOutcome {
    pub decisions: Vec<Decision>,
    pub graph: SocialGraph,
}

/// Replays an ordered event log from an empty graph.
pub fn replay<'a, I>(events: I, cfg: &EngineConfig) -> Result<ReplayOutcome, EngineError>
where
    I: IntoIterator<Item = &'a InteractionEvent>,
{
    replay_from(SocialGraph::new(), events, cfg)
}

/// Replays an ordered event log on top of an existing graph. Sequence
/// numbers must be strictly increasing and timestamps non-decreasing.
pub fn replay_from<'a, I>(
    mut graph: SocialGraph,
    events: I,
    cfg: &EngineConfig,
) -> Result<ReplayOutcome, EngineError>
where
    I: IntoIterator<Item = &'a InteractionEvent>,
{
    let mut decisions = Vec::new();
    let mut prev: Option<(u64, u64)> = None;
    for event in events {
        if let Some((prev_seq, prev_ts)) = prev {
            if event.seq <= prev_seq {
                return Err(EngineError::OutOfOrderSeq {
                    seq: event.seq,
                    prev: prev_seq,
                });
            }
            if event.ts < prev_ts {
                return Err(EngineError::NonMonotonicTimestamp {
                    seq: event.seq,
                    ts: event.ts,
                    prev_ts,
                });
            }
        }
        prev = Some((event.seq, event.ts));
        decisions.push(process(&mut graph, event, cfg)?);
    }
    Ok(ReplayOutcome { decisions, graph })
}

/// Rebuilds the final graph from the raw logs alone, from an empty base.
///
/// This is the independent oracle for the incremental engine: it never calls
/// `decide` or `process`; it tallies the logs into plain maps, renders a
/// snapshot document, and loads it through the validated snapshot path. The
/// result must structurally equal the engine's final graph.
pub fn oracle_state(
    events: &[InteractionEvent],
    decisions: &[Decision],
    cfg: &EngineConfig,
) -> Result<SocialGraph, OracleError> {
    oracle_state_from(&SocialGraph::new(), events, decisions, cfg)
}

/// Oracle over a non-empty starting graph (used for simulation runs, where
/// topology edges exist before the first event).
pub fn oracle_state_from(
    base: &SocialGraph,
    events: &[InteractionEvent],
    decisions: &[Decision],
    cfg: &EngineConfig,
) -> Result<SocialGraph, OracleError> {
    if events.len() != decisions.len() {
        return Err(OracleError::LengthMismatch {
            events: events.len(),
            decisions: decisions.len(),
        });
    }

    #[derive(Default, Clone, Copy)]
    struct Tally {
        incoming: u64,
        outgoing: u64,
        rejected: u64,
    }

    type Rows = BTreeMap<ProfileId, BTreeMap<ProfileId, Tally>>;

    fn touch(rows: &mut Rows, x: &ProfileId, y: &ProfileId) {
        rows.entry(x.clone())
            .or_default()
            .entry(y.clone())
            .or_default();
        rows.entry(y.clone())
            .or_default()
            .entry(x.clone())
            .or_default();
    }

    let mut profiles: std::collections::BTreeSet<ProfileId> = base.profiles().cloned().collect();
    let mut edges: BTreeMap<(ProfileId, ProfileId), RelationshipKind> = base
        .edges()
        .map(|(a, b, kind)| ((a.clone(), b.clone()), kind.clone()))
        .collect();
    let mut rows: Rows = BTreeMap::new();
    for owner in base.profiles() {
        for (neighbor, rec) in base.dataset(owner).into_iter().flat_map(|ds| ds.rows()) {
            rows.entry(owner.clone()).or_default().insert(
                neighbor.clone(),
                Tally {
                    incoming: rec.incoming,
                    outgoing: rec.outgoing,
                    rejected: rec.rejected,
                },
            );
        }
    }

    for (index, (event, decision)) in events.iter().zip(decisions).enumerate() {
        if event.seq != decision.seq {
            return Err(OracleError::SeqMismatch {
                index,
                event_seq: event.seq,
                decision_seq: decision.seq,
            });
        }
        profiles.insert(event.src.clone());
        profiles.insert(event.dst.clone());
        touch(&mut rows, &event.src, &event.dst);
        match decision.verdict {
            Verdict::Accept => {
                if event.kind == InteractionKind::FriendRequest && cfg.friend_request_connects {
                    let key = if event.src < event.dst {
                        (event.src.clone(), event.dst.clone())
                    } else {
                        (event.dst.clone(), event.src.clone())
                    };
                    edges.entry(key).or_default();
                }
                rows.get_mut(&event.src)
                    .unwrap()
                    .get_mut(&event.dst)
                    .unwrap()
                    .outgoing += 1;
                rows.get_mut(&event.dst)
                    .unwrap()
                    .get_mut(&event.src)
                    .unwrap()
                    .incoming += 1;
            }
            Verdict::Reject => {
                rows.get_mut(&event.dst)
                    .unwrap()
                    .get_mut(&event.src)
                    .unwrap()
                    .rejected += 1;
            }
        }
    }

    // Materialize through the canonical document and the validated loader,
    // staying off the incremental mutation path entirely.
    let mut datasets = Map::new();
    for owner in &profiles {
        let mut owner_rows = Map::new();
        for (neighbor, tally) in rows.get(owner).into_iter().flatten() {
            let mut row = Map::new();
            row.insert("in".into(), tally.incoming.into());
            row.insert("out".into(), tally.outgoing.into());
            row.insert("rej".into(), tally.rejected.into());
            owner_rows.insert(neighbor.to_string(), Value::Object(row));
        }
        datasets.insert(owner.to_string(), Value::Object(owner_rows));
    }
    let mut root = Map::new();
    root.insert("datasets".into(), Value::Object(datasets));
    root.insert(
        "edges".into(),
        Value::Array(
            edges
                .iter()
                .map(|((a, b), kind)| {
                    let mut edge = Map::new();
                    edge.insert("a".into(), a.to_string().into());
                    edge.insert("b".into(), b.to_string().into());
                    edge.insert("kind".into(), kind.to_string().into());
                    Value::Object(edge)
                })
                .collect(),
        ),
    );
    root.insert("format_version".into(), 1u64.into());
    root.insert(
        "profiles".into(),
        Value::Array(profiles.iter().map(|p| p.to_string().into()).collect()),
    );
    Ok(SocialGraph::from_snapshot_value(&Value::Object(root))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decision::Basis;
    use crate::rational::Rational;

    fn pid(s: &str) -> ProfileId {
        ProfileId::new(s).unwrap()
    }

    fn event(seq: u64, ts: u64, kind: InteractionKind, src: &str, dst: &str) -> InteractionEvent {
        InteractionEvent::new(seq, ts, kind, pid(src), pid(dst)).unwrap()
    }

    fn msg(seq: u64, ts: u64, src: &str, dst: &str) -> InteractionEvent {
        event(seq, ts, InteractionKind::Message, src, dst)
    }

    #[test]
    fn stranger_friend_request_falls_back_to_accept() {
        let mut graph = SocialGraph::new();
        graph.add_profile(pid("A"));
        graph.add_profile(pid("B"));
        let cfg = EngineConfig::default();
        let d = decide(
            &graph,
            &event(0, 0, InteractionKind::FriendRequest, "A", "B"),
            &cfg,
        )
        .unwrap();
        assert_eq!(d, Decision::fallback(0, Verdict::Accept));
    }

    #[test]
    fn connected_low_ratio_is_rejected_directly() {
        // B saw 3 messages from A and replied once: T(B,A) = 1/3 < 1/2.
        let mut graph = SocialGraph::new();
        graph.add_profile(pid("A"));
        graph.add_profile(pid("B"));
        graph
            .connect(&pid("A"), &pid("B"), RelationshipKind::default())
            .unwrap();
        for _ in 0..3 {
            graph
                .apply_accepted_interaction(&pid("A"), &pid("B"))
                .unwrap();
        }
        graph
            .apply_accepted_interaction(&pid("B"), &pid("A"))
            .unwrap();
        let cfg = EngineConfig::default();
        let d = decide(&graph, &msg(7, 0, "A", "B"), &cfg).unwrap();
        assert_eq!(
            d,
            Decision::direct(7, Verdict::Reject, Rational::new(1, 3).unwrap())
        );
    }

    #[test]
    fn connected_without_history_uses_the_default_trust() {
        let mut graph = SocialGraph::new();
        graph.add_profile(pid("A"));
        graph.add_profile(pid("B"));
        graph
            .connect(&pid("A"), &pid("B"), RelationshipKind::default())
            .unwrap();
        let cfg = EngineConfig::default();
        let d = decide(&graph, &msg(0, 0, "A", "B"), &cfg).unwrap();
        assert_eq!(
            d,
            Decision::default_basis(0, Verdict::Accept, Rational::one())
        );
    }

    #[test]
    fn unconnected_with_low_trust_intermediary_rejects_via_inference() {
        // B trusts C (9/10 >= θ); C's trust in A is 1/5 < θ.
        let mut graph = SocialGraph::new();
        for p in ["A", "B", "C"] {
            graph.add_profile(pid(p));
        }
        graph
            .connect(&pid("B"), &pid("C"), RelationshipKind::default())
            .unwrap();
        graph
            .connect(&pid("C"), &pid("A"), RelationshipKind::default())
            .unwrap();
        for _ in 0..10 {
            graph
                .apply_accepted_interaction(&pid("C"), &pid("B"))
                .unwrap();
        }
        for _ in 0..9 {
            graph
                .apply_accepted_interaction(&pid("B"), &pid("C"))
                .unwrap();
        }
        for _ in 0..5 {
            graph
                .apply_accepted_interaction(&pid("A"), &pid("C"))
                .unwrap();
        }
        graph
            .apply_accepted_interaction(&pid("C"), &pid("A"))
            .unwrap();
        let cfg = EngineConfig::default();
        let d = decide(&graph, &msg(0, 0, "A", "B"), &cfg).unwrap();
        assert_eq!(
            d,
            Decision::inferred(0, Verdict::Reject, pid("C"), Rational::new(1, 5).unwrap())
        );
    }

    #[test]
    fn decide_is_pure() {
        let mut graph = SocialGraph::new();
        graph.add_profile(pid("A"));
        graph.add_profile(pid("B"));
        graph
            .connect(&pid("A"), &pid("B"), RelationshipKind::default())
            .unwrap();
        let before = graph.clone();
        let cfg = EngineConfig::default();
        decide(&graph, &msg(0, 0, "A", "B"), &cfg).unwrap();
        assert_eq!(graph, before);
    }

    #[test]
    fn accepted_friend_request_connects_and_counts() {
        let mut graph = SocialGraph::new();
        let cfg = EngineConfig::default();
        let d = process(
            &mut graph,
            &event(0, 0, InteractionKind::FriendRequest, "A", "B"),
            &cfg,
        )
        .unwrap();
        assert_eq!(d.verdict, Verdict::Accept);
        assert!(graph.is_connected(&pid("A"), &pid("B")));
        assert_eq!(graph.activity(&pid("B"), &pid("A")).incoming, 1);
        assert_eq!(graph.activity(&pid("A"), &pid("B")).outgoing, 1);

        // the reply makes the pair reciprocal: O(A) and I(A) both 1 for B
        let d = process(&mut graph, &msg(1, 1, "B", "A"), &cfg).unwrap();
        assert_eq!(d.verdict, Verdict::Accept);
        let rec = graph.activity(&pid("B"), &pid("A"));
        assert_eq!((rec.incoming, rec.outgoing), (1, 1));
    }

    #[test]
    fn plain_messages_do_not_create_edges() {
        let mut graph = SocialGraph::new();
        let cfg = EngineConfig::default();
        let d = process(&mut graph, &msg(0, 0, "A", "B"), &cfg).unwrap();
        assert_eq!(d.basis, Basis::Fallback);
        assert!(!graph.is_connected(&pid("A"), &pid("B")));
        assert_eq!(graph.activity(&pid("B"), &pid("A")).incoming, 1);
    }

    #[test]
    fn friend_request_edge_creation_can_be_disabled() {
        let mut graph = SocialGraph::new();
        let cfg = EngineConfig {
            friend_request_connects: false,
            ..EngineConfig::default()
        };
        process(
            &mut graph,
            &event(0, 0, InteractionKind::FriendRequest, "A", "B"),
            &cfg,
        )
        .unwrap();
        assert!(!graph.is_connected(&pid("A"), &pid("B")));
    }

    #[test]
    fn rejection_only_moves_the_audit_counter() {
        let mut graph = SocialGraph::new();
        let cfg = EngineConfig {
            fallback_policy: FallbackPolicy::Reject,
            ..EngineConfig::default()
        };
        let d = process(&mut graph, &msg(0, 0, "A", "B"), &cfg).unwrap();
        assert_eq!(d, Decision::fallback(0, Verdict::Reject));
        let rec = graph.activity(&pid("B"), &pid("A"));
        assert_eq!((rec.incoming, rec.outgoing, rec.rejected), (0, 0, 1));
    }

    #[test]
    fn replay_empty_log() {
        let outcome = replay([], &EngineConfig::default()).unwrap();
        assert!(outcome.decisions.is_empty());
        assert_eq!(outcome.graph, SocialGraph::new());
    }

    #[test]
    fn replay_enforces_seq_and_ts_order() {
        let cfg = EngineConfig::default();
        let events = [msg(1, 0, "A", "B"), msg(1, 0, "B", "A")];
        assert_eq!(
            replay(&events, &cfg).unwrap_err(),
            EngineError::OutOfOrderSeq { seq: 1, prev: 1 }
        );
        let events = [msg(0, 5, "A", "B"), msg(1, 4, "B", "A")];
        assert_eq!(
            replay(&events, &cfg).unwrap_err(),
            EngineError::NonMonotonicTimestamp {
                seq: 1,
                ts: 4,
                prev_ts: 5
            }
        );
        // gaps are fine
        let events = [msg(0, 0, "A", "B"), msg(7, 0, "B", "A")];
        assert!(replay(&events, &cfg).is_ok());
    }

    #[test]
    fn replay_is_deterministic() {
        let cfg = EngineConfig::default();
        let events = [
            event(0, 0, InteractionKind::FriendRequest, "A", "B"),
            msg(1, 1, "B", "A"),
            msg(2, 2, "A", "B"),
        ];
        let a = replay(&events, &cfg).unwrap();
        let b = replay(&events, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.graph.to_snapshot(), b.graph.to_snapshot());
    }

    #[test]
    fn oracle_matches_replay_on_a_small_log() {
        let cfg = EngineConfig::default();
        let events = [
            event(0, 0, InteractionKind::FriendRequest, "A", "B"),
            msg(1, 1, "B", "A"),
            msg(2, 2, "A", "B"),
            msg(3, 3, "A", "B"),
            msg(4, 4, "A", "B"),
            msg(5, 5, "A", "B"),
        ];
        let outcome = replay(&events, &cfg).unwrap();
        let oracle = oracle_state(&events, &outcome.decisions, &cfg).unwrap();
        assert_eq!(oracle, outcome.graph);
    }

    #[test]
    fn oracle_rejects_misaligned_logs() {
        let cfg = EngineConfig::default();
        let events = [msg(0, 0, "A", "B")];
        assert!(matches!(
            oracle_state(&events, &[], &cfg),
            Err(OracleError::LengthMismatch { .. })
        ));
        let decisions = [Decision::fallback(9, Verdict::Accept)];
        assert!(matches!(
            oracle_state(&events, &decisions, &cfg),
            Err(OracleError::SeqMismatch { .. })
        ));
    }

    #[test]
    fn oracle_on_empty_logs_is_the_empty_graph() {
        let oracle = oracle_state(&[], &[], &EngineConfig::default()).unwrap();
        assert_eq!(oracle, SocialGraph::new());
    }

    #[test]
    fn config_defaults_deserialize() {
        let cfg: EngineConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg, EngineConfig::default());
        assert!(cfg.friend_request_connects);
        let cfg: EngineConfig =
            serde_json::from_str(r#"{"fallback_policy":"reject","trust":{"threshold":"3/4"}}"#)
                .unwrap();
        assert_eq!(cfg.fallback_policy, FallbackPolicy::Reject);
        assert_eq!(cfg.threshold(), Rational::new(3, 4).unwrap());
        assert!(serde_json::from_str::<EngineConfig>(r#"{"unknown":1}"#).is_err());
    }
}
