//! Agent-based simulation harness.
//!
//! Generates a network topology, runs behavioral agents for a fixed number
//! of ticks, feeds every emitted interaction through the filter engine, and
//! tallies blocking metrics against ground-truth agent labels. Everything is
//! driven by one root seed: per-agent randomness comes from hashed
//! substreams, so adding an agent never perturbs another agent's draws.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::decision::Decision;
use crate::engine::{process, EngineConfig, EngineError};
use crate::event::{InteractionEvent, InteractionKind};
use crate::graph::{GraphError, SocialGraph};
use crate::profile::{ProfileId, RelationshipKind};
use crate::rational::Rational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("topology must have at least two nodes, got {0}")]
    TooFewNodes(usize),
    #[error("edge probability must be at most 1, got {0}")]
    ProbabilityOutOfRange(Rational),
    #[error("attachments per node must be in [1, n-1], got {m} with n = {n}")]
    AttachmentsOutOfRange { n: usize, m: usize },
    #[error("duplicate profile {0:?} in topology")]
    DuplicateProfile(String),
    #[error("explicit edge references unknown profile {0:?}")]
    UnknownEdgeProfile(String),
    #[error("explicit edges must not be self-edges: {0:?}")]
    SelfEdge(String),
    #[error("duplicate explicit edge {0:?}-{1:?}")]
    DuplicateEdge(String, String),
    #[error("duplicate agent id {0:?}")]
    DuplicateAgent(String),
    #[error("ticks must be positive")]
    ZeroTicks,
    #[error("reply probability must be at most 1, got {probability} for agent {agent:?}")]
    ReplyProbabilityOutOfRange {
        agent: String,
        probability: Rational,
    },
    #[error("burst_per_tick must be positive for spammer {0:?}")]
    ZeroBurst(String),
    #[error("spammer {0:?} has an empty fixed target list")]
    EmptyTargets(String),
    #[error("spammer {0:?} lists itself as a target")]
    SelfTarget(String),
    #[error("spammer {0:?} has nobody to target")]
    NoRandomTargets(String),
    #[error("event and decision logs are misaligned at index {0}")]
    MisalignedLogs(usize),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// How a spammer picks victims.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum TargetStrategy {
    /// Cycle through the listed targets in order.
    Fixed { targets: Vec<ProfileId> },
    /// Draw uniformly from every other profile in the network.
    Random,
}

/// What an agent does each tick.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Behavior {
    /// Greets each topology neighbor once at tick 0, then answers each
    /// interaction accepted for it in the previous tick with the given
    /// probability.
    Reciprocal { reply_probability: Rational },
    /// Emits `burst_per_tick` interactions per tick: a friend request while
    /// unconnected to the target, plain messages once connected.
    Spammer {
        burst_per_tick: u64,
        targets: TargetStrategy,
    },
    /// Never initiates and never replies.
    Silent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentSpec {
    pub id: ProfileId,
    pub behavior: Behavior,
}

/// Network shape the simulation starts from. Generated profiles are named
/// `n00`, `n01`, ... — agents whose ids match take over those nodes, agents
/// with other ids join the network as initially unconnected profiles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Topology {
    ErdosRenyi {
        n: usize,
        edge_probability: Rational,
    },
    BarabasiAlbert {
        n: usize,
        attachments_per_node: usize,
    },
    Explicit {
        profiles: Vec<ProfileId>,
        #[serde(default)]
        edges: Vec<(ProfileId, ProfileId)>,
    },
}

/// A full simulation scenario.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub topology: Topology,
    pub agents: Vec<AgentSpec>,
    pub ticks: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub engine: EngineConfig,
}

/// Blocking metrics tallied from the decision log under ground-truth labels
/// (an event is spam iff its source is a spammer agent).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimMetrics {
    pub spam_events_total: u64,
    pub spam_events_rejected: u64,
    pub legit_events_total: u64,
    pub legit_events_rejected: u64,
    pub spam_block_rate: Rational,
    pub false_positive_rate: Rational,
    pub mean_messages_before_block: Rational,
}

impl SimMetrics {
    /// Single-record CSV with the fixed header; rates use six fractional
    /// digits.
    pub fn to_csv(&self) -> String {
        format!(
            "spam_block_rate,false_positive_rate,mean_messages_before_block,\
             spam_total,spam_rejected,legit_total,legit_rejected\n{},{},{},{},{},{},{}\n",
            self.spam_block_rate.to_decimal_6(),
            self.false_positive_rate.to_decimal_6(),
            self.mean_messages_before_block.to_decimal_6(),
            self.spam_events_total,
            self.spam_events_rejected,
            self.legit_events_total,
            self.legit_events_rejected,
        )
    }
}

/// Everything a simulation run produces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimRun {
    pub events: Vec<InteractionEvent>,
    pub decisions: Vec<Decision>,
    pub metrics: SimMetrics,
    pub graph: SocialGraph,
}

// Substream derivation: hash a domain label, the root seed, and an optional
// agent id into a ChaCha seed. Stable across platforms.
fn substream(seed: u64, label: &str, id: Option<&ProfileId>) -> ChaCha12Rng {
    let mut hasher = Sha256::new();
    hasher.update(label.as_bytes());
    hasher.update([0x1f]);
    hasher.update(seed.to_le_bytes());
    if let Some(id) = id {
        hasher.update([0x1f]);
        hasher.update(id.as_str().as_bytes());
    }
    ChaCha12Rng::from_seed(hasher.finalize().into())
}

// Exact Bernoulli draw: p = n/d accepts iff u * d < n * 2^64 for a uniform
// 64-bit u. No floating point involved.
fn bernoulli(p: Rational, rng: &mut impl RngCore) -> bool {
    let u = rng.next_u64() as u128;
    u * (p.denom() as u128) < (p.numer() as u128) << 64
}

/// Undirected edges as (a, b) pairs with a < b.
pub type EdgeList = Vec<(ProfileId, ProfileId)>;

/// Generated profile ids are zero-padded so lexicographic order matches
/// index order.
fn node_ids(n: usize) -> Vec<ProfileId> {
    let width = ((n.max(2) - 1).to_string().len()).max(2);
    (0..n)
        .map(|i| ProfileId::new(format!("n{i:0width$}")).expect("generated ids are well-formed"))
        .collect()
}

/// Materializes a topology into (profiles, edges), deterministically for a
/// fixed seed. Edges come back with a < b, sorted.
pub fn generate_network(
    topology: &Topology,
    seed: u64,
) -> Result<(Vec<ProfileId>, EdgeList), SimError> {
    match topology {
        Topology::ErdosRenyi {
            n,
            edge_probability,
        } => {
            if *n < 2 {
                return Err(SimError::TooFewNodes(*n));
            }
            if *edge_probability > Rational::one() {
                return Err(SimError::ProbabilityOutOfRange(*edge_probability));
            }
            let ids = node_ids(*n);
            let mut rng = substream(seed, "topology", None);
            let mut edges = Vec::new();
            // each unordered pair drawn exactly once, in id order
            for i in 0..*n {
                for j in (i + 1)..*n {
                    if bernoulli(*edge_probability, &mut rng) {
                        edges.push((ids[i].clone(), ids[j].clone()));
                    }
                }
            }
            Ok((ids, edges))
        }
        Topology::BarabasiAlbert {
            n,
            attachments_per_node,
        } => {
            let m = *attachments_per_node;
            if *n < 2 {
                return Err(SimError::TooFewNodes(*n));
            }
            if m < 1 || m > n - 1 {
                return Err(SimError::AttachmentsOutOfRange { n: *n, m });
            }
            let ids = node_ids(*n);
            let mut rng = substream(seed, "topology", None);
            let mut edges = Vec::new();
            // preferential attachment via the repeated-endpoints list; the
            // first arriving node links to the m founding nodes directly
            let mut targets: Vec<usize> = (0..m).collect();
            let mut repeated: Vec<usize> = Vec::new();
            for k in m..*n {
                for &t in &targets {
                    edges.push((ids[t.min(k)].clone(), ids[t.max(k)].clone()));
                }
                repeated.extend(targets.iter().copied());
                repeated.extend(std::iter::repeat_n(k, m));
                let mut next: BTreeSet<usize> = BTreeSet::new();
                while next.len() < m {
                    next.insert(repeated[rng.gen_range(0..repeated.len())]);
                }
                targets = next.into_iter().collect();
            }
            edges.sort();
            edges.dedup();
            Ok((ids, edges))
        }
        Topology::Explicit { profiles, edges } => {
            let mut seen = BTreeSet::new();
            for p in profiles {
                if !seen.insert(p.clone()) {
                    return Err(SimError::DuplicateProfile(p.to_string()));
                }
            }
            let mut normalized = Vec::new();
            let mut dedup = BTreeSet::new();
            for (a, b) in edges {
                if a == b {
                    return Err(SimError::SelfEdge(a.to_string()));
                }
                for end in [a, b] {
                    if !seen.contains(end) {
                        return Err(SimError::UnknownEdgeProfile(end.to_string()));
                    }
                }
                let pair = if a < b {
                    (a.clone(), b.clone())
                } else {
                    (b.clone(), a.clone())
                };
                if !dedup.insert(pair.clone()) {
                    return Err(SimError::DuplicateEdge(
                        pair.0.to_string(),
                        pair.1.to_string(),
                    ));
                }
                normalized.push(pair);
            }
            normalized.sort();
            let mut profiles = profiles.clone();
            profiles.sort();
            Ok((profiles, normalized))
        }
    }
}

struct AgentState {
    behavior: Behavior,
    rng: ChaCha12Rng,
    cursor: usize,
}

/// Runs a scenario end to end: topology, per-tick agent actions in profile
/// id order, engine processing in emission order, and final metrics.
pub fn run_simulation(cfg: &SimConfig) -> Result<SimRun, SimError> {
    if cfg.ticks == 0 {
        return Err(SimError::ZeroTicks);
    }
    let mut agent_ids = BTreeSet::new();
    for agent in &cfg.agents {
        if !agent_ids.insert(agent.id.clone()) {
            return Err(SimError::DuplicateAgent(agent.id.to_string()));
        }
        match &agent.behavior {
            Behavior::Reciprocal { reply_probability } => {
                if *reply_probability > Rational::one() {
                    return Err(SimError::ReplyProbabilityOutOfRange {
                        agent: agent.id.to_string(),
                        probability: *reply_probability,
                    });
                }
            }
            Behavior::Spammer {
                burst_per_tick,
                targets,
            } => {
                if *burst_per_tick == 0 {
                    return Err(SimError::ZeroBurst(agent.id.to_string()));
                }
                if let TargetStrategy::Fixed { targets } = targets {
                    if targets.is_empty() {
                        return Err(SimError::EmptyTargets(agent.id.to_string()));
                    }
                    if targets.contains(&agent.id) {
                        return Err(SimError::SelfTarget(agent.id.to_string()));
                    }
                }
            }
            Behavior::Silent => {}
        }
    }

    let (profiles, edges) = generate_network(&cfg.topology, cfg.seed)?;
    let mut graph = SocialGraph::new();
    for p in &profiles {
        graph.add_profile(p.clone());
    }
    for agent in &cfg.agents {
        graph.add_profile(agent.id.clone());
    }
    for (a, b) in &edges {
        graph.connect(a, b, RelationshipKind::default())?;
    }

    // Tick-0 initiations use the initial topology, not the live graph, so
    // edges created mid-tick by friend requests cannot leak into them.
    let mut initial_neighbors: BTreeMap<ProfileId, Vec<ProfileId>> = BTreeMap::new();
    for (a, b) in &edges {
        initial_neighbors
            .entry(a.clone())
            .or_default()
            .push(b.clone());
        initial_neighbors
            .entry(b.clone())
            .or_default()
            .push(a.clone());
    }
    for nbrs in initial_neighbors.values_mut() {
        nbrs.sort();
    }

    let all_ids: Vec<ProfileId> = graph.profiles().cloned().collect();
    for agent in &cfg.agents {
        if matches!(
            agent.behavior,
            Behavior::Spammer {
                targets: TargetStrategy::Random,
                ..
            }
        ) && all_ids.len() < 2
        {
            return Err(SimError::NoRandomTargets(agent.id.to_string()));
        }
    }

    let spammers: BTreeSet<ProfileId> = cfg
        .agents
        .iter()
        .filter(|a| matches!(a.behavior, Behavior::Spammer { .. }))
        .map(|a| a.id.clone())
        .collect();

    let mut agents: BTreeMap<ProfileId, AgentState> = cfg
        .agents
        .iter()
        .map(|a| {
            (
                a.id.clone(),
                AgentState {
                    behavior: a.behavior.clone(),
                    rng: substream(cfg.seed, "agent", Some(&a.id)),
                    cursor: 0,
                },
            )
        })
        .collect();

    let mut events: Vec<InteractionEvent> = Vec::new();
    let mut decisions: Vec<Decision> = Vec::new();
    let mut accepted_prev: BTreeMap<ProfileId, Vec<ProfileId>> = BTreeMap::new();
    let mut next_seq = 0u64;

    for tick in 0..cfg.ticks {
        let mut accepted_this: BTreeMap<ProfileId, Vec<ProfileId>> = BTreeMap::new();
        for (id, state) in agents.iter_mut() {
            match &state.behavior {
                Behavior::Silent => {}
                Behavior::Reciprocal { reply_probability } => {
                    let mut outgoing: Vec<ProfileId> = Vec::new();
                    if tick == 0 {
                        outgoing.extend(initial_neighbors.get(id).into_iter().flatten().cloned());
                    }
                    for src in accepted_prev.get(id).into_iter().flatten() {
                        if bernoulli(*reply_probability, &mut state.rng) {
                            outgoing.push(src.clone());
                        }
                    }
                    for dst in outgoing {
                        submit(
                            &mut graph,
                            &cfg.engine,
                            &mut next_seq,
                            tick,
                            InteractionKind::Message,
                            id.clone(),
                            dst,
                            &mut events,
                            &mut decisions,
                            &mut accepted_this,
                        )?;
                    }
                }
                Behavior::Spammer {
                    burst_per_tick,
                    targets,
                } => {
                    let burst = *burst_per_tick;
                    let targets = targets.clone();
                    for _ in 0..burst {
                        let dst = match &targets {
                            TargetStrategy::Fixed { targets } => {
                                let dst = targets[state.cursor % targets.len()].clone();
                                state.cursor += 1;
                                dst
                            }
                            TargetStrategy::Random => {
                                // uniform over everyone else: draw from the
                                // first len-1 slots, mapping a self-hit to
                                // the last slot
                                let idx = state.rng.gen_range(0..all_ids.len() - 1);
                                if all_ids[idx] == *id {
                                    all_ids[all_ids.len() - 1].clone()
                                } else {
                                    all_ids[idx].clone()
                                }
                            }
                        };
                        let kind = if graph.is_connected(id, &dst) {
                            InteractionKind::Message
                        } else {
                            InteractionKind::FriendRequest
                        };
                        submit(
                            &mut graph,
                            &cfg.engine,
                            &mut next_seq,
                            tick,
                            kind,
                            id.clone(),
                            dst,
                            &mut events,
                            &mut decisions,
                            &mut accepted_this,
                        )?;
                    }
                }
            }
        }
        accepted_prev = accepted_this;
    }

    let metrics = compute_metrics(&events, &decisions, &spammers)?;
    Ok(SimRun {
        events,
        decisions,
        metrics,
        graph,
    })
}

#[allow(clippy::too_many_arguments)]
fn submit(
    graph: &mut SocialGraph,
    engine: &EngineConfig,
    next_seq: &mut u64,
    tick: u64,
    kind: InteractionKind,
    src: ProfileId,
    dst: ProfileId,
    events: &mut Vec<InteractionEvent>,
    decisions: &mut Vec<Decision>,
    accepted_this: &mut BTreeMap<ProfileId, Vec<ProfileId>>,
) -> Result<(), SimError> {
    let event = InteractionEvent {
        seq: *next_seq,
        ts: tick,
        kind,
        src,
        dst,
    };
    *next_seq += 1;
    let decision = process(graph, &event, engine)?;
    if decision.accepted() {
        accepted_this
            .entry(event.dst.clone())
            .or_default()
            .push(event.src.clone());
    }
    events.push(event);
    decisions.push(decision);
    Ok(())
}

/// Pure tally of the logs against ground-truth spammer labels.
pub fn compute_metrics(
    events: &[InteractionEvent],
    decisions: &[Decision],
    spammers: &BTreeSet<ProfileId>,
) -> Result<SimMetrics, SimError> {
    if events.len() != decisions.len() {
        return Err(SimError::MisalignedLogs(events.len().min(decisions.len())));
    }
    let mut spam_total = 0u64;
    let mut spam_rejected = 0u64;
    let mut legit_total = 0u64;
    let mut legit_rejected = 0u64;
    // per (spammer, victim) pair: accepted spam so far, and the count frozen
    // at the first rejection
    let mut pairs: BTreeMap<(ProfileId, ProfileId), (u64, Option<u64>)> = BTreeMap::new();
    for (index, (event, decision)) in events.iter().zip(decisions).enumerate() {
        if event.seq != decision.seq {
            return Err(SimError::MisalignedLogs(index));
        }
        let spam = spammers.contains(&event.src);
        if spam {
            spam_total += 1;
            let entry = pairs
                .entry((event.src.clone(), event.dst.clone()))
                .or_insert((0, None));
            if decision.accepted() {
                entry.0 += 1;
            } else {
                spam_rejected += 1;
                if entry.1.is_none() {
                    entry.1 = Some(entry.0);
                }
            }
        } else {
            legit_total += 1;
            if !decision.accepted() {
                legit_rejected += 1;
            }
        }
    }
    let rate = |num: u64, den: u64| {
        if den == 0 {
            Rational::zero()
        } else {
            Rational::new(num, den).expect("den > 0")
        }
    };
    let blocked: Vec<u64> = pairs.values().filter_map(|(_, b)| *b).collect();
    let mean_messages_before_block = rate(blocked.iter().sum(), blocked.len() as u64);
    Ok(SimMetrics {
        spam_events_total: spam_total,
        spam_events_rejected: spam_rejected,
        legit_events_total: legit_total,
        legit_events_rejected: legit_rejected,
        spam_block_rate: rate(spam_rejected, spam_total),
        false_positive_rate: rate(legit_rejected, legit_total),
        mean_messages_before_block,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decision::Verdict;

    fn pid(s: &str) -> ProfileId {
        ProfileId::new(s).unwrap()
    }

    #[test]
    fn complete_and_empty_er_graphs() {
        let (profiles, edges) = generate_network(
            &Topology::ErdosRenyi {
                n: 3,
                edge_probability: Rational::one(),
            },
            7,
        )
        .unwrap();
        assert_eq!(profiles.len(), 3);
        assert_eq!(edges.len(), 3);
        let (_, edges) = generate_network(
            &Topology::ErdosRenyi {
                n: 5,
                edge_probability: Rational::zero(),
            },
            7,
        )
        .unwrap();
        assert!(edges.is_empty());
    }

    #[test]
    fn er_rejects_bad_parameters() {
        assert!(matches!(
            generate_network(
                &Topology::ErdosRenyi {
                    n: 1,
                    edge_probability: Rational::one()
                },
                0
            ),
            Err(SimError::TooFewNodes(1))
        ));
        assert!(matches!(
            generate_network(
                &Topology::ErdosRenyi {
                    n: 3,
                    edge_probability: Rational::new(3, 2).unwrap()
                },
                0
            ),
            Err(SimError::ProbabilityOutOfRange(_))
        ));
    }

    #[test]
    fn ba_is_deterministic_and_well_formed() {
        let topo = Topology::BarabasiAlbert {
            n: 10,
            attachments_per_node: 2,
        };
        let (profiles, edges1) = generate_network(&topo, 42).unwrap();
        let (_, edges2) = generate_network(&topo, 42).unwrap();
        assert_eq!(edges1, edges2);
        assert_eq!(profiles.len(), 10);
        // every non-founding node brings m new edges
        assert_eq!(edges1.len(), 8 * 2);
        for (a, b) in &edges1 {
            assert!(a < b);
        }
        let (_, edges3) = generate_network(&topo, 43).unwrap();
        assert_ne!(edges1, edges3);
        assert!(matches!(
            generate_network(
                &Topology::BarabasiAlbert {
                    n: 3,
                    attachments_per_node: 3
                },
                0
            ),
            Err(SimError::AttachmentsOutOfRange { .. })
        ));
    }

    #[test]
    fn explicit_topology_is_validated() {
        let topo = Topology::Explicit {
            profiles: vec![pid("A"), pid("B")],
            edges: vec![(pid("B"), pid("A"))],
        };
        let (profiles, edges) = generate_network(&topo, 0).unwrap();
        assert_eq!(profiles, vec![pid("A"), pid("B")]);
        assert_eq!(edges, vec![(pid("A"), pid("B"))]);

        let bad = Topology::Explicit {
            profiles: vec![pid("A")],
            edges: vec![(pid("A"), pid("Z"))],
        };
        assert!(matches!(
            generate_network(&bad, 0),
            Err(SimError::UnknownEdgeProfile(_))
        ));
    }

    #[test]
    fn generated_ids_sort_numerically() {
        let ids = node_ids(12);
        assert_eq!(ids[0].as_str(), "n00");
        assert_eq!(ids[11].as_str(), "n11");
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
    }

    fn spammer_vs_silent_config(ticks: u64) -> SimConfig {
        SimConfig {
            topology: Topology::Explicit {
                profiles: vec![pid("victim")],
                edges: vec![],
            },
            agents: vec![
                AgentSpec {
                    id: pid("spammer"),
                    behavior: Behavior::Spammer {
                        burst_per_tick: 1,
                        targets: TargetStrategy::Fixed {
                            targets: vec![pid("victim")],
                        },
                    },
                },
                AgentSpec {
                    id: pid("victim"),
                    behavior: Behavior::Silent,
                },
            ],
            ticks,
            seed: 1,
            engine: EngineConfig::default(),
        }
    }

    #[test]
    fn silent_victim_blocks_after_the_free_first_request() {
        let run = run_simulation(&spammer_vs_silent_config(6)).unwrap();
        assert_eq!(run.events.len(), 6);
        // first contact is a friend request admitted by fallback, everything
        // after is rejected on direct trust 0/1
        assert_eq!(run.decisions[0].verdict, Verdict::Accept);
        assert!(run.decisions[1..]
            .iter()
            .all(|d| d.verdict == Verdict::Reject));
        assert_eq!(run.events[0].kind, InteractionKind::FriendRequest);
        // the spammer keeps sending friend requests: the edge exists, so they
        // stay messages after the accepted one
        assert_eq!(run.events[1].kind, InteractionKind::Message);
        assert_eq!(run.metrics.spam_events_total, 6);
        assert_eq!(run.metrics.spam_events_rejected, 5);
        assert_eq!(run.metrics.spam_block_rate, Rational::new(5, 6).unwrap());
        assert_eq!(run.metrics.mean_messages_before_block, Rational::one());
        assert_eq!(run.metrics.legit_events_total, 0);
        assert_eq!(run.metrics.false_positive_rate, Rational::zero());
    }

    #[test]
    fn full_reciprocators_never_reject_each_other() {
        let cfg = SimConfig {
            topology: Topology::Explicit {
                profiles: vec![pid("a"), pid("b")],
                edges: vec![(pid("a"), pid("b"))],
            },
            agents: vec![
                AgentSpec {
                    id: pid("a"),
                    behavior: Behavior::Reciprocal {
                        reply_probability: Rational::one(),
                    },
                },
                AgentSpec {
                    id: pid("b"),
                    behavior: Behavior::Reciprocal {
                        reply_probability: Rational::one(),
                    },
                },
            ],
            ticks: 30,
            seed: 3,
            engine: EngineConfig::default(),
        };
        let run = run_simulation(&cfg).unwrap();
        // steady state: one message per direction per tick
        assert_eq!(run.events.len(), 2 * 30);
        assert!(run.decisions.iter().all(Decision::accepted));
        assert_eq!(run.metrics.false_positive_rate, Rational::zero());
        assert_eq!(run.metrics.legit_events_total, 60);
    }

    #[test]
    fn simulation_is_seed_deterministic() {
        let mut cfg = spammer_vs_silent_config(5);
        cfg.agents.push(AgentSpec {
            id: pid("bystander"),
            behavior: Behavior::Reciprocal {
                reply_probability: Rational::new(1, 2).unwrap(),
            },
        });
        cfg.topology = Topology::ErdosRenyi {
            n: 4,
            edge_probability: Rational::new(1, 2).unwrap(),
        };
        let a = run_simulation(&cfg).unwrap();
        let b = run_simulation(&cfg).unwrap();
        assert_eq!(a, b);
        cfg.seed += 1;
        let c = run_simulation(&cfg).unwrap();
        // a different seed rewires the topology and the draws
        assert!(a.events != c.events || a.graph != c.graph);
    }

    #[test]
    fn no_spam_means_zero_block_rate_without_division_errors() {
        let cfg = SimConfig {
            topology: Topology::Explicit {
                profiles: vec![pid("a"), pid("b")],
                edges: vec![],
            },
            agents: vec![
                AgentSpec {
                    id: pid("a"),
                    behavior: Behavior::Silent,
                },
                AgentSpec {
                    id: pid("b"),
                    behavior: Behavior::Silent,
                },
            ],
            ticks: 3,
            seed: 0,
            engine: EngineConfig::default(),
        };
        let run = run_simulation(&cfg).unwrap();
        assert!(run.events.is_empty());
        assert_eq!(run.metrics.spam_block_rate, Rational::zero());
        assert_eq!(run.metrics.false_positive_rate, Rational::zero());
    }

    #[test]
    fn config_validation_errors() {
        let mut cfg = spammer_vs_silent_config(0);
        assert_eq!(run_simulation(&cfg), Err(SimError::ZeroTicks));
        cfg.ticks = 1;
        cfg.agents.push(cfg.agents[0].clone());
        assert!(matches!(
            run_simulation(&cfg),
            Err(SimError::DuplicateAgent(_))
        ));

        let cfg = SimConfig {
            topology: Topology::Explicit {
                profiles: vec![pid("v")],
                edges: vec![],
            },
            agents: vec![AgentSpec {
                id: pid("r"),
                behavior: Behavior::Reciprocal {
                    reply_probability: Rational::new(3, 2).unwrap(),
                },
            }],
            ticks: 1,
            seed: 0,
            engine: EngineConfig::default(),
        };
        assert!(matches!(
            run_simulation(&cfg),
            Err(SimError::ReplyProbabilityOutOfRange { .. })
        ));
    }

    #[test]
    fn metrics_examples() {
        // 10 spam events, 6 rejected -> block rate 3/5
        let spammer = pid("s");
        let victim = pid("v");
        let spammers: BTreeSet<ProfileId> = [spammer.clone()].into();
        let mut events = Vec::new();
        let mut decisions = Vec::new();
        for i in 0..10u64 {
            events.push(InteractionEvent {
                seq: i,
                ts: i,
                kind: InteractionKind::Message,
                src: spammer.clone(),
                dst: victim.clone(),
            });
            if i < 4 {
                decisions.push(Decision::fallback(i, Verdict::Accept));
            } else {
                decisions.push(Decision::fallback(i, Verdict::Reject));
            }
        }
        let metrics = compute_metrics(&events, &decisions, &spammers).unwrap();
        assert_eq!(metrics.spam_block_rate, Rational::new(3, 5).unwrap());
        assert_eq!(metrics.false_positive_rate, Rational::zero());
        // one pair blocked after 4 accepted spams
        assert_eq!(
            metrics.mean_messages_before_block,
            Rational::new(4, 1).unwrap()
        );

        assert!(matches!(
            compute_metrics(&events, &decisions[..9], &spammers),
            Err(SimError::MisalignedLogs(_))
        ));
    }

    #[test]
    fn mean_counts_accepted_before_first_rejection_per_pair() {
        // two pairs, blocked after 4 and 2 accepted spams -> mean 3
        let s = pid("s");
        let spammers: BTreeSet<ProfileId> = [s.clone()].into();
        let mut events = Vec::new();
        let mut decisions = Vec::new();
        let mut seq = 0u64;
        let mut push = |dst: &ProfileId,
                        verdict: Verdict,
                        events: &mut Vec<InteractionEvent>,
                        decisions: &mut Vec<Decision>| {
            events.push(InteractionEvent {
                seq,
                ts: seq,
                kind: InteractionKind::Message,
                src: s.clone(),
                dst: dst.clone(),
            });
            decisions.push(Decision::fallback(seq, verdict));
            seq += 1;
        };
        let v1 = pid("v1");
        let v2 = pid("v2");
        for _ in 0..4 {
            push(&v1, Verdict::Accept, &mut events, &mut decisions);
        }
        push(&v1, Verdict::Reject, &mut events, &mut decisions);
        for _ in 0..2 {
            push(&v2, Verdict::Accept, &mut events, &mut decisions);
        }
        push(&v2, Verdict::Reject, &mut events, &mut decisions);
        // later accepts after the first rejection must not change the mean
        push(&v1, Verdict::Accept, &mut events, &mut decisions);
        let metrics = compute_metrics(&events, &decisions, &spammers).unwrap();
        assert_eq!(
            metrics.mean_messages_before_block,
            Rational::new(3, 1).unwrap()
        );
    }

    #[test]
    fn scenario_files_round_trip() {
        let text = r#"{
            "topology": {"type": "erdos_renyi", "n": 10, "edge_probability": 0.4},
            "agents": [
                {"id": "n00", "behavior": {"type": "reciprocal", "reply_probability": "1/1"}},
                {"id": "spam0", "behavior": {"type": "spammer", "burst_per_tick": 2,
                    "targets": {"strategy": "random"}}},
                {"id": "mute", "behavior": {"type": "silent"}}
            ],
            "ticks": 50,
            "seed": 7
        }"#;
        let cfg: SimConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.engine, EngineConfig::default());
        assert_eq!(cfg.agents.len(), 3);
        let back = serde_json::to_string(&cfg).unwrap();
        let cfg2: SimConfig = serde_json::from_str(&back).unwrap();
        assert_eq!(cfg, cfg2);
    }
}
