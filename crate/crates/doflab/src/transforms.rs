//! Instance-to-instance reductions used in converse arguments.
//!
//! - [`fd_equivalence`]: the K-node full-duplex network as an equivalent
//!   network of K half-duplex sources and K half-duplex destinations, with
//!   genie side information and per-pair feedback.
//! - [`cooperation_collapse`]: grouping cooperating nodes into multi-antenna
//!   nodes to form the 4-node X network around a focus (source, destination)
//!   pair.
//! - [`null_messages`]: removing messages without touching the channel.
//!
//! All three preserve the underlying gain table entrywise: a transformed
//! instance reads the exact bits its parent would read.

use crate::error::{Error, Result};
use crate::network::{Message, MessageSet, NetworkInstance, NetworkKind, NodeRole};
use crate::rng;
use std::collections::BTreeSet;

/// Seed for a message formed by combining several original messages.
fn combined_seed(seeds: &[u64]) -> u64 {
    seeds
        .iter()
        .fold(0x636f_6d62_696e_6564, |acc, &s| rng::derive(acc, &[s]))
}

/// Transform a K-node full-duplex network into the equivalent 2K-node
/// network with K half-duplex sources and K half-duplex destinations.
///
/// The equivalent network keeps the gain table (`H̃(i, j) = H(i, j)`, hence
/// symmetric with zero diagonal), maps message `W(j, i)` to source port `i`
/// and destination port `K + j`, grants receiver `j` genie knowledge of all
/// messages sourced at node `j`, and feeds destination `i`'s received signal
/// back to source `i`. Any encoding scheme run on either network produces
/// bit-identical transcripts on the other.
pub fn fd_equivalence(instance: &NetworkInstance) -> Result<NetworkInstance> {
    if instance.kind() != NetworkKind::FullDuplex {
        return Err(Error::KindMismatch {
            expected: "full_duplex",
            got: instance.kind().to_string(),
        });
    }
    let k = instance.node_count();

    let messages: Vec<Message> = instance
        .message_set()
        .iter()
        .map(|m| Message {
            dest: k + m.dest,
            src: m.src,
            payload_seed: m.payload_seed,
        })
        .collect();
    let message_set = MessageSet::new(messages)?;

    // Receiver j knows every message sourced at its co-located node j.
    let mut genie = BTreeSet::new();
    for j in 0..k {
        for (idx, _) in message_set.sourced_at(j) {
            genie.insert((k + j, idx));
        }
    }
    // Destination i feeds its received signal back to source i.
    let feedback: BTreeSet<(usize, usize)> = (0..k).map(|i| (k + i, i)).collect();

    let mut roles = vec![NodeRole::Source; k];
    roles.extend(vec![NodeRole::Destination; k]);
    let mut tx = vec![true; k];
    tx.extend(vec![false; k]);
    let mut rx = vec![false; k];
    rx.extend(vec![true; k]);
    // Source i reads only its feedback partner's history.
    let entitled: Vec<Vec<usize>> = (0..2 * k)
        .map(|v| if v < k { vec![k + v] } else { vec![v] })
        .collect();
    // Destination port k + i inherits node i's noise identity so dual
    // simulations draw identical noise.
    let mut noise_tags: Vec<u64> = (k as u64..2 * k as u64).collect();
    noise_tags.extend(0..k as u64);

    Ok(NetworkInstance::assemble(
        NetworkKind::FdEquivalent,
        *instance.gain_process(),
        instance.reciprocal(),
        crate::network::fd_image_links(k),
        (0..2 * k).collect(),
        noise_tags,
        (0..2 * k).map(|p| vec![p]).collect(),
        roles,
        tx,
        rx,
        entitled,
        message_set,
        genie,
        feedback,
    ))
}

/// Group cooperating nodes of `instance` around the focus pair
/// `(p, q)` — source node `p`, destination node `q` — into the 4-node X
/// network used by the converse arguments.
///
/// For an `srd` instance the grouping is: node 1 = source `p`; node 2 = the
/// remaining sources followed by the relays (S + R − 1 antennas); node 3 =
/// the other destinations (D − 1 antennas); node 4 = destination `q`. For an
/// `fd_equivalent` instance: node 2 = the other sources and node 3 = the
/// other destinations, each with K − 1 antennas, and only messages sourced
/// at `p` or destined to `q` survive. Channel entries of the collapsed
/// instance are exactly the corresponding entries of the original, and the
/// scalar gain from node 1 to node 4 is nonzero.
pub fn cooperation_collapse(
    instance: &NetworkInstance,
    p: usize,
    q: usize,
) -> Result<NetworkInstance> {
    match instance.kind() {
        NetworkKind::Srd => collapse_srd(instance, p, q),
        NetworkKind::FdEquivalent => collapse_fd_equivalent(instance, p, q),
        other => Err(Error::KindMismatch {
            expected: "srd or fd_equivalent",
            got: other.to_string(),
        }),
    }
}

fn collapse_srd(instance: &NetworkInstance, p: usize, q: usize) -> Result<NetworkInstance> {
    let roles = instance.roles();
    let s = roles.iter().filter(|r| **r == NodeRole::Source).count();
    let r = roles.iter().filter(|r| **r == NodeRole::Relay).count();
    let d = roles
        .iter()
        .filter(|r| **r == NodeRole::Destination)
        .count();
    if p >= s {
        return Err(Error::InvalidFocus {
            p,
            q,
            reason: format!("focus source must be one of the {s} sources"),
        });
    }
    if q < s + r || q >= s + r + d {
        return Err(Error::InvalidFocus {
            p,
            q,
            reason: format!("focus destination must be in {}..{}", s + r, s + r + d),
        });
    }
    if s + r < 2 || d < 2 {
        return Err(Error::InvalidSize {
            kind: "cooperation_collapse",
            reason: format!("grouping needs S + R >= 2 and D >= 2, got ({s}, {r}, {d})"),
        });
    }

    // Fixed node ordering: node 2 stacks the other sources then the relays,
    // node 3 stacks the other destinations, both ascending.
    let mut port_map = vec![p];
    port_map.extend((0..s + r).filter(|&j| j != p));
    port_map.extend((s + r..s + r + d).filter(|&i| i != q));
    port_map.push(q);

    let m2 = s + r - 1;
    let m3 = d - 1;
    let node_groups = vec![
        vec![0],
        (1..1 + m2).collect(),
        (1 + m2..1 + m2 + m3).collect(),
        vec![1 + m2 + m3],
    ];

    let msgs = grouped_messages(instance, p, q)?;

    let ports = port_map.len();
    let all_ports: Vec<usize> = (0..ports).collect();
    let entitled = vec![
        all_ports.clone(),
        all_ports,
        node_groups[2].clone(),
        node_groups[3].clone(),
    ];
    let noise_tags = port_map
        .iter()
        .map(|&orig| instance.noise_tag(orig))
        .collect();
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
        *instance.gain_process(),
        instance.reciprocal(),
        instance.links(),
        port_map,
        noise_tags,
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
        msgs,
        BTreeSet::new(),
        feedback,
    ))
}

fn collapse_fd_equivalent(
    instance: &NetworkInstance,
    p: usize,
    q: usize,
) -> Result<NetworkInstance> {
    let k = instance.node_count() / 2;
    if p >= k || q >= k {
        return Err(Error::InvalidFocus {
            p,
            q,
            reason: format!("focus nodes must be in 0..{k}"),
        });
    }
    if p == q {
        // The construction needs a nonzero direct gain from node 1 to
        // node 4, and H(q, p) = 0 exactly when p == q.
        return Err(Error::InvalidFocus {
            p,
            q,
            reason: "focus source and destination must differ".into(),
        });
    }

    // Original ports: sources 0..K, destinations K..2K.
    let mut port_map = vec![p];
    port_map.extend((0..k).filter(|&j| j != p));
    port_map.extend((k..2 * k).filter(|&i| i != k + q));
    port_map.push(k + q);

    let m2 = k - 1;
    let node_groups = vec![
        vec![0],
        (1..1 + m2).collect(),
        (1 + m2..1 + 2 * m2).collect(),
        vec![2 * m2 + 1],
    ];

    let msgs = grouped_messages(instance, p, k + q)?;

    // Lemma 3's genie at the grouped destinations covers exactly the
    // surviving messages sourced at their co-located nodes, i.e. W(4,2);
    // side information about the focus source's messages is deleted.
    let mut genie = BTreeSet::new();
    if let Some(idx) = msgs.index_of(3, 1) {
        genie.insert((2usize, idx));
    }

    let dest_ports: Vec<usize> = (1 + m2..2 * m2 + 2).collect();
    let entitled = vec![
        dest_ports.clone(),
        dest_ports,
        node_groups[2].clone(),
        node_groups[3].clone(),
    ];
    let noise_tags = port_map
        .iter()
        .map(|&orig| instance.noise_tag(orig))
        .collect();
    let feedback: BTreeSet<(usize, usize)> = [(2, 0), (3, 0), (2, 1), (3, 1)].into_iter().collect();

    Ok(NetworkInstance::assemble(
        NetworkKind::FourNodeX,
        *instance.gain_process(),
        instance.reciprocal(),
        instance.links(),
        port_map,
        noise_tags,
        node_groups,
        vec![
            NodeRole::Source,
            NodeRole::Source,
            NodeRole::Destination,
            NodeRole::Destination,
        ],
        vec![true, true, false, false],
        vec![false, false, true, true],
        entitled,
        msgs,
        genie,
        feedback,
    ))
}

/// Message grouping of the collapse: W(3,1) stacks the focus source's
/// messages to the other destinations, W(4,1) is the focus pair's own
/// message, W(4,2) stacks the other sources' messages to the focus
/// destination; everything else is nulled. Empty groups are dropped.
fn grouped_messages(instance: &NetworkInstance, p: usize, q: usize) -> Result<MessageSet> {
    let mut w31_seeds = Vec::new();
    let mut w41_seed = None;
    let mut w42_seeds = Vec::new();
    for m in instance.message_set().iter() {
        if m.src == p && m.dest == q {
            w41_seed = Some(m.payload_seed);
        } else if m.src == p {
            w31_seeds.push(m.payload_seed);
        } else if m.dest == q {
            w42_seeds.push(m.payload_seed);
        }
    }
    let mut out = Vec::new();
    if !w31_seeds.is_empty() {
        out.push(Message {
            dest: 2,
            src: 0,
            payload_seed: combined_seed(&w31_seeds),
        });
    }
    if let Some(seed) = w41_seed {
        out.push(Message {
            dest: 3,
            src: 0,
            payload_seed: seed,
        });
    }
    if !w42_seeds.is_empty() {
        out.push(Message {
            dest: 3,
            src: 1,
            payload_seed: combined_seed(&w42_seeds),
        });
    }
    if out.is_empty() {
        return Err(Error::EmptyMessages);
    }
    MessageSet::new(out)
}

/// Remove every message for which `keep` returns false. The channel process
/// and every structural property are untouched; genie annotations are
/// re-indexed against the surviving messages.
pub fn null_messages(
    instance: &NetworkInstance,
    keep: impl Fn(&Message) -> bool,
) -> Result<NetworkInstance> {
    let kept: Vec<Message> = instance
        .message_set()
        .iter()
        .filter(|m| keep(m))
        .copied()
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyMessages);
    }
    Ok(instance.with_messages(MessageSet::new(kept)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{
        bitwise_eq, forward_simulate, sample_instance, RandomLinearEncoder, SampleOptions,
        SimConfig, Topology,
    };

    fn fd(k: usize, seed: u64) -> NetworkInstance {
        sample_instance(
            Topology::FullDuplex { nodes: k },
            seed,
            SampleOptions::default(),
        )
        .unwrap()
    }

    fn srd(s: usize, r: usize, d: usize, seed: u64) -> NetworkInstance {
        sample_instance(
            Topology::Srd {
                sources: s,
                relays: r,
                destinations: d,
            },
            seed,
            SampleOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn fd_equivalence_k2_structure() {
        let eq = fd_equivalence(&fd(2, 1)).unwrap();
        assert_eq!(eq.kind(), NetworkKind::FdEquivalent);
        assert_eq!(eq.node_count(), 4);
        assert_eq!(eq.message_set().len(), 2);
        // Each receiver holds genie knowledge of its co-located source's
        // message.
        assert_eq!(eq.genie_annotations().len(), 2);
        for &(node, idx) in eq.genie_annotations() {
            let m = eq.message_set().entries()[idx];
            assert_eq!(m.src + 2, node);
        }
        assert_eq!(
            eq.feedback_edges().iter().copied().collect::<Vec<_>>(),
            vec![(2, 0), (3, 1)]
        );
    }

    #[test]
    fn fd_equivalence_gain_table_is_entrywise_identical() {
        let orig = fd(4, 3);
        let eq = fd_equivalence(&orig).unwrap();
        for t in [1u64, 2, 50] {
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(eq.gain(4 + i, j, t), orig.gain(i, j, t));
                    // Symmetric with zero diagonal.
                    assert_eq!(eq.gain(4 + i, j, t), eq.gain(4 + j, i, t));
                }
                assert_eq!(eq.gain(4 + i, i, t), num_complex::Complex64::ZERO);
            }
        }
    }

    #[test]
    fn fd_equivalence_rejects_other_kinds() {
        let err = fd_equivalence(&srd(2, 1, 2, 0)).unwrap_err();
        assert!(matches!(err, Error::KindMismatch { .. }));
    }

    #[test]
    fn dual_simulation_is_bit_identical() {
        for k in [2usize, 3, 4] {
            let orig = fd(k, 7 + k as u64);
            let eq = fd_equivalence(&orig).unwrap();
            let enc = RandomLinearEncoder::new(91, 20);
            let cfg = SimConfig::new(20, 55);
            let a = forward_simulate(&orig, &enc, &cfg).unwrap();
            let b = forward_simulate(&eq, &enc, &cfg).unwrap();
            for i in 0..k {
                assert!(bitwise_eq(&a.x[i], &b.x[i]), "X mismatch at node {i}");
                assert!(bitwise_eq(&a.y[i], &b.y[k + i]), "Y mismatch at node {i}");
            }
        }
    }

    #[test]
    fn srd_collapse_shape_and_messages() {
        let inst = srd(2, 1, 2, 1);
        let four = cooperation_collapse(&inst, 0, 4).unwrap();
        assert_eq!(four.kind(), NetworkKind::FourNodeX);
        assert_eq!(four.antenna_counts(), vec![1, 2, 1, 1]);
        let set = four.message_set();
        assert_eq!(set.len(), 3);
        assert!(set.index_of(2, 0).is_some());
        assert!(set.index_of(3, 0).is_some());
        assert!(set.index_of(3, 1).is_some());
    }

    #[test]
    fn srd_collapse_gains_match_the_index_map() {
        // Independent oracle: rebuild the fixed-ordering index map by hand
        // for (p, q) = (1, 6) in a 3x2x2 network and compare every entry.
        let inst = srd(3, 2, 2, 9);
        let four = cooperation_collapse(&inst, 1, 6).unwrap();
        let expected_map = [1usize, 0, 2, 3, 4, 5, 6];
        for t in 1..=4u64 {
            for a in 0..7 {
                for b in 0..7 {
                    assert_eq!(
                        four.gain(a, b, t),
                        inst.gain(expected_map[a], expected_map[b], t),
                        "mismatch at ({a}, {b})"
                    );
                }
            }
        }
    }

    #[test]
    fn fd_collapse_shape_and_zero_pattern() {
        let eq = fd_equivalence(&fd(4, 3)).unwrap();
        let four = cooperation_collapse(&eq, 0, 3).unwrap();
        assert_eq!(four.antenna_counts(), vec![1, 3, 3, 1]);
        // New ports: [src 0 | src 1,2,3 | dest 4,5,6 | dest 7] mapping to
        // original nodes [0 | 1,2,3 | 0,1,2 | 3]. A destination port hears
        // a source port unless they are co-located.
        let src_orig = [0usize, 1, 2, 3];
        let dest_orig = [0usize, 1, 2, 3];
        for t in 1..=3u64 {
            for (di, &dorig) in dest_orig.iter().enumerate() {
                for (si, &sorig) in src_orig.iter().enumerate() {
                    let g = four.gain(4 + di, si, t);
                    if dorig == sorig {
                        assert_eq!(g, num_complex::Complex64::ZERO);
                    } else {
                        assert!(g.norm() >= 0.5);
                    }
                }
            }
        }
        // Direct node-1 to node-4 gain is nonzero.
        assert!(four.gain(7, 0, 1).norm() >= 0.5);
        // Node 3 holds the W(4,2) genie.
        let w42 = four.message_set().index_of(3, 1).unwrap();
        assert!(four.genie_annotations().contains(&(2, w42)));
    }

    #[test]
    fn fd_collapse_rejects_equal_focus() {
        let eq = fd_equivalence(&fd(3, 0)).unwrap();
        let err = cooperation_collapse(&eq, 1, 1).unwrap_err();
        assert!(matches!(err, Error::InvalidFocus { .. }));
    }

    #[test]
    fn nulling_is_structural_only() {
        let inst = fd(4, 5);
        let kept = null_messages(&inst, |m| (m.src + 4 - m.dest) % 4 == 1).unwrap();
        // W(1,2), W(2,3), W(3,4), W(4,1) in 1-based numbering: the cyclic
        // interference-channel pattern.
        assert_eq!(kept.message_set().len(), 4);
        for m in kept.message_set().iter() {
            assert_eq!((m.src + 4 - m.dest) % 4, 1);
        }
        for t in 1..=5u64 {
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(kept.gain(i, j, t), inst.gain(i, j, t));
                }
            }
        }

        let all = null_messages(&inst, |_| true).unwrap();
        assert_eq!(all.message_set(), inst.message_set());

        let err = null_messages(&inst, |_| false).unwrap_err();
        assert!(matches!(err, Error::EmptyMessages));
    }

    #[test]
    fn srd_focused_nulling_keeps_the_theorem_family() {
        // Keep only messages touching source 1 or the last destination.
        let inst = srd(2, 1, 2, 3);
        let kept = null_messages(&inst, |m| m.src == 0 || m.dest == 4).unwrap();
        // Messages: (3,0), (4,0), (4,1) — the focused inequality's family.
        assert_eq!(kept.message_set().len(), 3);
        assert!(kept.message_set().index_of(3, 0).is_some());
        assert!(kept.message_set().index_of(4, 0).is_some());
        assert!(kept.message_set().index_of(4, 1).is_some());
    }
}
