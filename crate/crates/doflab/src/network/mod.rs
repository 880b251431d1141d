//! Network topologies, message sets, and the time-varying channel process.
//!
//! A [`NetworkInstance`] describes one concrete network: its logical nodes
//! (possibly multi-antenna, after a cooperation collapse), the scalar
//! "ports" behind them, the message set, and the deterministic gain process.
//! Gains are generated lazily per (link, time) from a counter-based stream,
//! so an extension block at any block index is reproducible without storing
//! history.
//!
//! Structural zeros (absent links, full-duplex self-links) and reciprocity
//! are resolved here, in one place, so that derived instances — the
//! half-duplex equivalent of a full-duplex network, or a cooperation
//! collapse — read the exact same gain values as their parent.

mod extension;
mod sim;

pub use extension::{extend_channel, ExtendedChannel};
pub(crate) use sim::payload_of;
pub use sim::{
    bitwise_eq, forward_simulate, Encoder, FixedSequenceEncoder, NodeView, Payload, PulseEncoder,
    RandomLinearEncoder, SimConfig, Transcript, ZeroEncoder, PAYLOAD_LEN,
};

use crate::error::{Error, Result};
use crate::rng;
use num_complex::Complex64;
use std::collections::BTreeSet;

/// Tag namespaces for seed derivation (see [`crate::rng::derive`]).
pub(crate) mod tags {
    pub const GAIN: u64 = 1;
    pub const NOISE: u64 = 2;
    pub const PAYLOAD: u64 = 3;
    pub const WVEC: u64 = 4;
    pub const ENCODER: u64 = 5;
    pub const TRIAL: u64 = 6;
}

/// Network families supported by the sampler and the transforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetworkKind {
    Interference,
    XNetwork,
    Srd,
    FullDuplex,
    FdEquivalent,
    ParallelRelay,
    FourNodeX,
}

impl std::fmt::Display for NetworkKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            NetworkKind::Interference => "interference",
            NetworkKind::XNetwork => "x_network",
            NetworkKind::Srd => "srd",
            NetworkKind::FullDuplex => "full_duplex",
            NetworkKind::FdEquivalent => "fd_equivalent",
            NetworkKind::ParallelRelay => "parallel_relay",
            NetworkKind::FourNodeX => "four_node_x",
        };
        f.write_str(name)
    }
}

/// Role of a logical node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRole {
    Source,
    Relay,
    Destination,
    FullDuplex,
}

/// Size parameters for [`sample_instance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    /// K transmitter/receiver pairs, one message per pair.
    Interference { users: usize },
    /// S transmitters, D receivers, one message per (transmitter, receiver) pair.
    XNetwork { sources: usize, destinations: usize },
    /// S sources, R relays, D destinations; full duplex everywhere, global
    /// feedback to sources and relays.
    Srd {
        sources: usize,
        relays: usize,
        destinations: usize,
    },
    /// K full-duplex nodes with a message between every ordered pair;
    /// reciprocal gains and zero self-gains.
    FullDuplex { nodes: usize },
    /// Two-hop network: K source/destination pairs separated by R relays;
    /// the direct source-to-destination links are absent.
    ParallelRelay { pairs: usize, relays: usize },
    /// The 4-node X network with antenna counts [1, m2, m3, 1] and messages
    /// {W(3,1), W(4,1), W(4,2)} (1-based), W(3,2) null.
    FourNodeX { m2: usize, m3: usize },
}

/// Sampling options shared by all topologies.
#[derive(Debug, Clone, Copy)]
pub struct SampleOptions {
    /// Force reciprocity on or off. `None` selects the kind's default
    /// (full duplex: reciprocal; everything else: independent gains).
    pub reciprocal: Option<bool>,
    pub magnitude_min: f64,
    pub magnitude_max: f64,
}

impl Default for SampleOptions {
    fn default() -> Self {
        Self {
            reciprocal: None,
            magnitude_min: 0.5,
            magnitude_max: 2.0,
        }
    }
}

/// Deterministic per-link, per-time gain generator.
///
/// Magnitudes are uniform in `[magnitude_min, magnitude_max]` with
/// `magnitude_min > 0` (support bounded away from zero, so present links are
/// never zero), phases uniform in `[0, 2π)`. Draws are i.i.d. across raw
/// link pairs and time indices; regeneration with the same seed is
/// bit-identical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGainProcess {
    pub seed: u64,
    pub magnitude_min: f64,
    pub magnitude_max: f64,
}

impl LinkGainProcess {
    fn new(seed: u64, magnitude_min: f64, magnitude_max: f64) -> Result<Self> {
        if !magnitude_min.is_finite() || magnitude_min <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "magnitude_min",
                reason: format!("must be > 0, got {magnitude_min}"),
            });
        }
        if magnitude_max < magnitude_min {
            return Err(Error::InvalidParameter {
                name: "magnitude_max",
                reason: format!("must be >= magnitude_min, got {magnitude_max}"),
            });
        }
        Ok(Self {
            seed,
            magnitude_min,
            magnitude_max,
        })
    }

    /// Raw gain for the ordered raw pair `(a, b)` at 1-based `time`.
    /// Callers canonicalize the pair for reciprocity before the lookup.
    fn value(&self, a: usize, b: usize, time: u64) -> Complex64 {
        let mut r = rng::stream(self.seed, &[tags::GAIN, a as u64, b as u64, time]);
        rng::complex_ring(&mut r, self.magnitude_min, self.magnitude_max)
    }
}

/// One message: destination node `dest`, source node `src` (paper order
/// `W_{i,j}` = message to `i` from `j`), plus a payload seed used by the
/// simulator when the message carries test payloads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Message {
    pub dest: usize,
    pub src: usize,
    pub payload_seed: u64,
}

/// An ordered, duplicate-free message set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageSet {
    entries: Vec<Message>,
}

impl MessageSet {
    pub fn new(entries: Vec<Message>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for m in &entries {
            if m.src == m.dest {
                return Err(Error::InvalidParameter {
                    name: "message_set",
                    reason: format!("self message at node {}", m.src),
                });
            }
            if !seen.insert((m.dest, m.src)) {
                return Err(Error::InvalidParameter {
                    name: "message_set",
                    reason: format!("duplicate message ({}, {})", m.dest, m.src),
                });
            }
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Message] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &Message> {
        self.entries.iter()
    }

    /// Index of the message to `dest` from `src`, if present.
    pub fn index_of(&self, dest: usize, src: usize) -> Option<usize> {
        self.entries
            .iter()
            .position(|m| m.dest == dest && m.src == src)
    }

    /// Messages originating at `node`, with their indices, in set order.
    pub fn sourced_at(&self, node: usize) -> Vec<(usize, Message)> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, m)| m.src == node)
            .map(|(i, m)| (i, *m))
            .collect()
    }
}

/// Structural link pattern, expressed over raw port indices. Resolves which
/// links are absent and which raw pair addresses the gain process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LinkTable {
    /// Every ordered pair present, including self-links.
    Full,
    /// Self-links zero, everything else present.
    ZeroSelf,
    /// Transmit ports `0..tx`, receive ports `tx..tx+rx`; only
    /// transmitter-to-receiver links exist.
    TxToRx { tx: usize },
    /// Image of a K-node full-duplex network: receive port `k + i` hears
    /// transmit port `j` with the underlying gain `H(i, j)`, zero for
    /// `i == j`; all other pairs absent.
    FdImage { k: usize },
    /// Sources `0..k`, relays `k..k+r`, destinations `k+r..2k+r`; the
    /// direct source-to-destination links are absent.
    AbsentDirect { k: usize, r: usize },
}

impl LinkTable {
    /// Raw gain-process pair for the ordered port pair `(rx, tx)`, or `None`
    /// when the link is structurally zero.
    fn raw_pair(&self, rx: usize, tx: usize) -> Option<(usize, usize)> {
        match *self {
            LinkTable::Full => Some((rx, tx)),
            LinkTable::ZeroSelf => (rx != tx).then_some((rx, tx)),
            LinkTable::TxToRx { tx: t } => (rx >= t && tx < t).then_some((rx, tx)),
            LinkTable::FdImage { k } => {
                if rx >= k && tx < k && rx - k != tx {
                    Some((rx - k, tx))
                } else {
                    None
                }
            }
            LinkTable::AbsentDirect { k, r } => {
                let direct = rx >= k + r && tx < k;
                (!direct).then_some((rx, tx))
            }
        }
    }
}

/// One concrete network: topology, roles, ports, messages, channel process.
///
/// Instances are immutable after construction and cheap to clone; all
/// queries are pure, so instances are safe to share across threads.
#[derive(Debug, Clone)]
pub struct NetworkInstance {
    kind: NetworkKind,
    gains: LinkGainProcess,
    reciprocal: bool,
    links: LinkTable,
    /// Logical port -> raw port of the link table.
    port_map: Vec<usize>,
    /// Per logical port: identity used to key the noise stream. Preserved by
    /// transforms so equivalent networks draw identical noise.
    noise_tags: Vec<u64>,
    /// Logical node -> its logical ports (antennas).
    node_groups: Vec<Vec<usize>>,
    roles: Vec<NodeRole>,
    tx_capable: Vec<bool>,
    rx_capable: Vec<bool>,
    /// Per node: the logical ports whose receive history its encoder may
    /// read (own ports, plus feedback grants).
    entitled: Vec<Vec<usize>>,
    message_set: MessageSet,
    /// (node, message index): decoding side information granted for free.
    genie: BTreeSet<(usize, usize)>,
    /// (from node, to node): noise-free causal feedback of received signals.
    feedback_edges: BTreeSet<(usize, usize)>,
}

impl NetworkInstance {
    pub fn kind(&self) -> NetworkKind {
        self.kind
    }

    pub fn node_count(&self) -> usize {
        self.node_groups.len()
    }

    pub fn port_count(&self) -> usize {
        self.port_map.len()
    }

    pub fn antenna_counts(&self) -> Vec<usize> {
        self.node_groups.iter().map(|g| g.len()).collect()
    }

    pub fn reciprocal(&self) -> bool {
        self.reciprocal
    }

    pub fn gain_process(&self) -> &LinkGainProcess {
        &self.gains
    }

    pub fn message_set(&self) -> &MessageSet {
        &self.message_set
    }

    pub fn roles(&self) -> &[NodeRole] {
        &self.roles
    }

    pub fn ports_of(&self, node: usize) -> &[usize] {
        &self.node_groups[node]
    }

    /// Logical node owning a logical port.
    pub fn node_of(&self, port: usize) -> usize {
        self.node_groups
            .iter()
            .position(|g| g.contains(&port))
            .expect("port out of range")
    }

    pub fn is_tx(&self, node: usize) -> bool {
        self.tx_capable[node]
    }

    pub fn is_rx(&self, node: usize) -> bool {
        self.rx_capable[node]
    }

    /// Ports whose history node `node`'s encoder may read.
    pub fn entitled_ports(&self, node: usize) -> &[usize] {
        &self.entitled[node]
    }

    pub fn genie_annotations(&self) -> &BTreeSet<(usize, usize)> {
        &self.genie
    }

    pub fn feedback_edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.feedback_edges
    }

    pub(crate) fn noise_tag(&self, port: usize) -> u64 {
        self.noise_tags[port]
    }

    /// Channel gain from logical port `tx` to logical port `rx` at 1-based
    /// `time`. Structurally absent links are exactly zero; when the instance
    /// is reciprocal the pair is canonicalized so `gain(i, j) == gain(j, i)`.
    pub fn gain(&self, rx: usize, tx: usize, time: u64) -> Complex64 {
        let (a, b) = (self.port_map[rx], self.port_map[tx]);
        match self.links.raw_pair(a, b) {
            None => Complex64::ZERO,
            Some((a, b)) => {
                let (a, b) = if self.reciprocal && a > b {
                    (b, a)
                } else {
                    (a, b)
                };
                self.gains.value(a, b, time)
            }
        }
    }

    /// Internal constructor used by the sampler and the transforms.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn assemble(
        kind: NetworkKind,
        gains: LinkGainProcess,
        reciprocal: bool,
        links: LinkTable,
        port_map: Vec<usize>,
        noise_tags: Vec<u64>,
        node_groups: Vec<Vec<usize>>,
        roles: Vec<NodeRole>,
        tx_capable: Vec<bool>,
        rx_capable: Vec<bool>,
        entitled: Vec<Vec<usize>>,
        message_set: MessageSet,
        genie: BTreeSet<(usize, usize)>,
        feedback_edges: BTreeSet<(usize, usize)>,
    ) -> Self {
        debug_assert_eq!(port_map.len(), noise_tags.len());
        debug_assert_eq!(node_groups.len(), roles.len());
        Self {
            kind,
            gains,
            reciprocal,
            links,
            port_map,
            noise_tags,
            node_groups,
            roles,
            tx_capable,
            rx_capable,
            entitled,
            message_set,
            genie,
            feedback_edges,
        }
    }

    pub(crate) fn links(&self) -> LinkTable {
        self.links
    }

    /// Add causal feedback edges (from, to): node `to` becomes entitled to
    /// node `from`'s receive history.
    pub(crate) fn with_feedback_edges(&self, edges: BTreeSet<(usize, usize)>) -> Self {
        let mut out = self.clone();
        for &(from, to) in &edges {
            for &port in self.ports_of(from) {
                if !out.entitled[to].contains(&port) {
                    out.entitled[to].push(port);
                }
            }
            out.entitled[to].sort_unstable();
            out.feedback_edges.insert((from, to));
        }
        out
    }

    /// Replace the message set, keeping everything else (used by nulling).
    pub(crate) fn with_messages(&self, message_set: MessageSet) -> Self {
        let mut out = self.clone();
        // Genie annotations that referenced removed messages are dropped.
        out.genie = self
            .genie
            .iter()
            .filter_map(|&(node, idx)| {
                let m = self.message_set.entries()[idx];
                message_set
                    .index_of(m.dest, m.src)
                    .map(|new_idx| (node, new_idx))
            })
            .collect();
        out.message_set = message_set;
        out
    }
}

/// Link pattern of the half-duplex image of a K-node full-duplex network.
pub(crate) fn fd_image_links(k: usize) -> LinkTable {
    LinkTable::FdImage { k }
}

fn size_err(kind: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidSize {
        kind,
        reason: reason.into(),
    }
}

fn message(seed: u64, dest: usize, src: usize) -> Message {
    Message {
        dest,
        src,
        payload_seed: rng::derive(seed, &[tags::PAYLOAD, dest as u64, src as u64]),
    }
}

/// Build a deterministic instance of the given topology.
///
/// The result satisfies the structural invariants of its kind: full-duplex
/// instances are reciprocal with zero self-gains and all K(K-1) messages,
/// parallel-relay instances have absent direct links, and so on. Identical
/// arguments produce bit-identical gain tables.
pub fn sample_instance(
    topology: Topology,
    seed: u64,
    options: SampleOptions,
) -> Result<NetworkInstance> {
    let gains = LinkGainProcess::new(seed, options.magnitude_min, options.magnitude_max)?;
    let singleton_nodes = |n: usize| -> Vec<Vec<usize>> { (0..n).map(|i| vec![i]).collect() };
    let identity = |n: usize| -> Vec<usize> { (0..n).collect() };
    let tags_of = |n: usize| -> Vec<u64> { (0..n as u64).collect() };

    match topology {
        Topology::FullDuplex { nodes: k } => {
            if k < 2 {
                return Err(size_err("full_duplex", format!("needs K >= 2, got {k}")));
            }
            let reciprocal = options.reciprocal.unwrap_or(true);
            let mut msgs = Vec::new();
            for dest in 0..k {
                for src in 0..k {
                    if dest != src {
                        msgs.push(message(seed, dest, src));
                    }
                }
            }
            Ok(NetworkInstance::assemble(
                NetworkKind::FullDuplex,
                gains,
                reciprocal,
                LinkTable::ZeroSelf,
                identity(k),
                tags_of(k),
                singleton_nodes(k),
                vec![NodeRole::FullDuplex; k],
                vec![true; k],
                vec![true; k],
                (0..k).map(|i| vec![i]).collect(),
                MessageSet::new(msgs)?,
                BTreeSet::new(),
                BTreeSet::new(),
            ))
        }
        Topology::Srd {
            sources: s,
            relays: r,
            destinations: d,
        } => {
            if s < 1 || r < 1 || d < 1 {
                return Err(size_err(
                    "srd",
                    format!("needs S, R, D >= 1, got ({s}, {r}, {d})"),
                ));
            }
            let n = s + r + d;
            let reciprocal = options.reciprocal.unwrap_or(false);
            let mut msgs = Vec::new();
            for dest in s + r..n {
                for src in 0..s {
                    msgs.push(message(seed, dest, src));
                }
            }
            let mut roles = vec![NodeRole::Source; s];
            roles.extend(vec![NodeRole::Relay; r]);
            roles.extend(vec![NodeRole::Destination; d]);
            // Sources and relays receive causal feedback of every node's
            // received signal; destinations see only their own.
            let entitled: Vec<Vec<usize>> = (0..n)
                .map(|i| if i < s + r { (0..n).collect() } else { vec![i] })
                .collect();
            Ok(NetworkInstance::assemble(
                NetworkKind::Srd,
                gains,
                reciprocal,
                LinkTable::Full,
                identity(n),
                tags_of(n),
                singleton_nodes(n),
                roles,
                vec![true; n],
                vec![true; n],
                entitled,
                MessageSet::new(msgs)?,
                BTreeSet::new(),
                BTreeSet::new(),
            ))
        }
        Topology::Interference { users: k } => {
            if k < 1 {
                return Err(size_err("interference", format!("needs K >= 1, got {k}")));
            }
            let n = 2 * k;
            let msgs = (0..k).map(|i| message(seed, k + i, i)).collect();
            let mut roles = vec![NodeRole::Source; k];
            roles.extend(vec![NodeRole::Destination; k]);
            let mut tx = vec![true; k];
            tx.extend(vec![false; k]);
            let mut rx = vec![false; k];
            rx.extend(vec![true; k]);
            Ok(NetworkInstance::assemble(
                NetworkKind::Interference,
                gains,
                options.reciprocal.unwrap_or(false),
                LinkTable::TxToRx { tx: k },
                identity(n),
                tags_of(n),
                singleton_nodes(n),
                roles,
                tx,
                rx,
                (0..n).map(|i| vec![i]).collect(),
                MessageSet::new(msgs)?,
                BTreeSet::new(),
                BTreeSet::new(),
            ))
        }
        Topology::XNetwork {
            sources: s,
            destinations: d,
        } => {
            if s < 1 || d < 1 {
                return Err(size_err(
                    "x_network",
                    format!("needs S, D >= 1, got ({s}, {d})"),
                ));
            }
            let n = s + d;
            let mut msgs = Vec::new();
            for dest in s..n {
                for src in 0..s {
                    msgs.push(message(seed, dest, src));
                }
            }
            let mut roles = vec![NodeRole::Source; s];
            roles.extend(vec![NodeRole::Destination; d]);
            let mut tx = vec![true; s];
            tx.extend(vec![false; d]);
            let mut rx = vec![false; s];
            rx.extend(vec![true; d]);
            Ok(NetworkInstance::assemble(
                NetworkKind::XNetwork,
                gains,
                options.reciprocal.unwrap_or(false),
                LinkTable::TxToRx { tx: s },
                identity(n),
                tags_of(n),
                singleton_nodes(n),
                roles,
                tx,
                rx,
                (0..n).map(|i| vec![i]).collect(),
                MessageSet::new(msgs)?,
                BTreeSet::new(),
                BTreeSet::new(),
            ))
        }
        Topology::ParallelRelay {
            pairs: k,
            relays: r,
        } => {
            if k < 1 || r < 1 {
                return Err(size_err(
                    "parallel_relay",
                    format!("needs K, R >= 1, got ({k}, {r})"),
                ));
            }
            let n = 2 * k + r;
            let msgs = (0..k).map(|i| message(seed, k + r + i, i)).collect();
            let mut roles = vec![NodeRole::Source; k];
            roles.extend(vec![NodeRole::Relay; r]);
            roles.extend(vec![NodeRole::Destination; k]);
            let entitled: Vec<Vec<usize>> = (0..n)
                .map(|i| if i < k + r { (0..n).collect() } else { vec![i] })
                .collect();
            Ok(NetworkInstance::assemble(
                NetworkKind::ParallelRelay,
                gains,
                options.reciprocal.unwrap_or(false),
                LinkTable::AbsentDirect { k, r },
                identity(n),
                tags_of(n),
                singleton_nodes(n),
                roles,
                vec![true; n],
                vec![true; n],
                entitled,
                MessageSet::new(msgs)?,
                BTreeSet::new(),
                BTreeSet::new(),
            ))
        }
        Topology::FourNodeX { m2, m3 } => {
            if m2 < 1 || m3 < 1 {
                return Err(size_err(
                    "four_node_x",
                    format!("needs M2, M3 >= 1, got ({m2}, {m3})"),
                ));
            }
            let ports = 1 + m2 + m3 + 1;
            let node_groups = vec![
                vec![0],
                (1..1 + m2).collect(),
                (1 + m2..1 + m2 + m3).collect(),
                vec![1 + m2 + m3],
            ];
            // W(3,1), W(4,1), W(4,2) in 1-based paper numbering.
            let msgs = vec![
                message(seed, 2, 0),
                message(seed, 3, 0),
                message(seed, 3, 1),
            ];
            // Nodes 1 and 2 receive feedback of all received signals; the
            // destination nodes 3 and 4 see only their own.
            let all_ports: Vec<usize> = (0..ports).collect();
            let entitled = vec![
                all_ports.clone(),
                all_ports,
                node_groups[2].clone(),
                node_groups[3].clone(),
            ];
            let mut feedback = BTreeSet::new();
            for to in 0..2 {
                for from in 0..4 {
                    if from != to {
                        feedback.insert((from, to));
                    }
                }
            }
            Ok(NetworkInstance::assemble(
                NetworkKind::FourNodeX,
                gains,
                options.reciprocal.unwrap_or(false),
                LinkTable::Full,
                identity(ports),
                tags_of(ports),
                node_groups,
                vec![
                    NodeRole::Source,
                    NodeRole::Source,
                    NodeRole::Destination,
                    NodeRole::Destination,
                ],
                vec![true; 4],
                vec![true; 4],
                entitled,
                MessageSet::new(msgs)?,
                BTreeSet::new(),
                feedback,
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> SampleOptions {
        SampleOptions::default()
    }

    #[test]
    fn full_duplex_k3_matches_invariants() {
        let inst = sample_instance(Topology::FullDuplex { nodes: 3 }, 7, opts()).unwrap();
        assert_eq!(inst.node_count(), 3);
        assert_eq!(inst.message_set().len(), 6);
        assert!(inst.reciprocal());
        for t in 1..=5 {
            for i in 0..3 {
                assert_eq!(inst.gain(i, i, t), Complex64::ZERO);
                for j in 0..3 {
                    if i != j {
                        assert_eq!(inst.gain(i, j, t), inst.gain(j, i, t));
                        let m = inst.gain(i, j, t).norm();
                        assert!((0.5..=2.0).contains(&m));
                    }
                }
            }
        }
    }

    #[test]
    fn srd_2_1_2_has_five_nodes_four_messages() {
        let inst = sample_instance(
            Topology::Srd {
                sources: 2,
                relays: 1,
                destinations: 2,
            },
            1,
            opts(),
        )
        .unwrap();
        assert_eq!(inst.node_count(), 5);
        assert_eq!(inst.message_set().len(), 4);
        assert_eq!(inst.roles()[2], NodeRole::Relay);
        // Fully connected, including self-links.
        for i in 0..5 {
            for j in 0..5 {
                assert!(inst.gain(i, j, 1).norm() >= 0.5);
            }
        }
    }

    #[test]
    fn parallel_relay_direct_links_absent() {
        let inst = sample_instance(
            Topology::ParallelRelay {
                pairs: 2,
                relays: 3,
            },
            5,
            opts(),
        )
        .unwrap();
        // Ports: sources 0..2, relays 2..5, destinations 5..7.
        for dest in 5..7 {
            for src in 0..2 {
                assert_eq!(inst.gain(dest, src, 3), Complex64::ZERO);
            }
        }
        // Every other link is nonzero.
        for rx in 0..7 {
            for tx in 0..7 {
                if rx >= 5 && tx < 2 {
                    continue;
                }
                assert!(inst.gain(rx, tx, 3).norm() >= 0.5, "({rx}, {tx})");
            }
        }
    }

    #[test]
    fn gains_regenerate_bit_identically() {
        let a = sample_instance(Topology::FullDuplex { nodes: 4 }, 42, opts()).unwrap();
        let b = sample_instance(Topology::FullDuplex { nodes: 4 }, 42, opts()).unwrap();
        for t in [1u64, 2, 17, 1000] {
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(a.gain(i, j, t), b.gain(i, j, t));
                }
            }
        }
    }

    #[test]
    fn invalid_sizes_and_parameters_are_rejected() {
        assert!(sample_instance(Topology::FullDuplex { nodes: 1 }, 0, opts()).is_err());
        assert!(sample_instance(
            Topology::Srd {
                sources: 0,
                relays: 1,
                destinations: 1
            },
            0,
            opts()
        )
        .is_err());
        let bad = SampleOptions {
            magnitude_min: 0.0,
            ..opts()
        };
        assert!(sample_instance(Topology::FullDuplex { nodes: 3 }, 0, bad).is_err());
    }

    #[test]
    fn four_node_x_shape() {
        let inst = sample_instance(Topology::FourNodeX { m2: 2, m3: 1 }, 9, opts()).unwrap();
        assert_eq!(inst.antenna_counts(), vec![1, 2, 1, 1]);
        assert_eq!(inst.message_set().len(), 3);
        assert_eq!(inst.message_set().index_of(2, 0), Some(0));
        assert_eq!(inst.message_set().index_of(3, 0), Some(1));
        assert_eq!(inst.message_set().index_of(3, 1), Some(2));
        assert_eq!(inst.entitled_ports(0).len(), inst.port_count());
        assert_eq!(inst.entitled_ports(3), &[4]);
    }

    #[test]
    fn interference_and_x_network_structure() {
        let ic = sample_instance(Topology::Interference { users: 3 }, 2, opts()).unwrap();
        assert_eq!(ic.node_count(), 6);
        assert_eq!(ic.message_set().len(), 3);
        assert!(ic.is_tx(0) && !ic.is_rx(0));
        assert!(!ic.is_tx(3) && ic.is_rx(3));
        // Only transmitter-to-receiver links exist.
        assert!(ic.gain(3, 0, 1).norm() >= 0.5);
        assert_eq!(ic.gain(0, 3, 1), Complex64::ZERO);
        assert_eq!(ic.gain(1, 0, 1), Complex64::ZERO);

        let x = sample_instance(
            Topology::XNetwork {
                sources: 2,
                destinations: 3,
            },
            2,
            opts(),
        )
        .unwrap();
        assert_eq!(x.message_set().len(), 6);
        assert_eq!(x.node_count(), 5);
    }

    #[test]
    fn message_set_rejects_duplicates_and_self_messages() {
        let m = |dest, src| Message {
            dest,
            src,
            payload_seed: 0,
        };
        assert!(MessageSet::new(vec![m(1, 0), m(1, 0)]).is_err());
        assert!(MessageSet::new(vec![m(2, 2)]).is_err());
        assert!(MessageSet::new(vec![m(1, 0), m(0, 1)]).is_ok());
    }
}
