//! Reputation-based interaction filtering for social-network event streams.
//!
//! A social network is modeled as a weighted graph whose nodes keep a
//! localized data-set: per-neighbor counters of accepted incoming, accepted
//! outgoing, and rejected interactions. A node's trust in a neighbor is the
//! exact ratio of its outgoing to incoming counters; interactions are
//! accepted only when the destination's trust in the source — direct, or
//! inferred through a trusted intermediary when the pair is unconnected —
//! meets a threshold. One-sided senders therefore get a short grace window
//! and are then blocked, while reciprocal pairs keep passing.
//!
//! The crate provides the graph and trust model, a deterministic
//! decide/process/replay engine with an independent from-scratch oracle, an
//! agent-based simulation harness with seeded determinism, and the wire
//! formats (JSONL logs, snapshot documents, scenario and config files).

pub mod api;
pub mod decision;
pub mod engine;
pub mod event;
pub mod graph;
pub mod profile;
pub mod rational;
pub mod sim;
pub mod trust;

pub use decision::{parse_decisions_jsonl, render_decisions_jsonl, Basis, Decision, Verdict};
pub use engine::{
    decide, oracle_state, oracle_state_from, process, replay, replay_from, EngineConfig,
    EngineError, FallbackPolicy, ReplayOutcome,
};
pub use event::{
    parse_events_jsonl, render_events_jsonl, InteractionEvent, InteractionKind, JsonlError,
};
pub use graph::{ActivityRecord, GraphError, GraphStats, SnapshotError, SocialGraph};
pub use profile::{ProfileId, RelationshipKind};
pub use rational::Rational;
pub use sim::{
    compute_metrics, generate_network, run_simulation, AgentSpec, Behavior, SimConfig, SimError,
    SimMetrics, SimRun, TargetStrategy, Topology,
};
pub use trust::{
    direct_trust, edge_weight, infer_trust, resolve_trust, weights_csv, TrustBasis, TrustConfig,
    TrustError, TrustMetric, TrustScore,
};
