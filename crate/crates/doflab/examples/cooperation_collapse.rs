//! Cooperation collapse: group the cooperating nodes of an S x R x D
//! network (or a full-duplex equivalent) around a focus pair into the
//! 4-node X network used by the converse arguments, and check that the
//! collapsed gain table is exactly the original one under the index map.
//!
//! ```bash
//! cargo run --example cooperation_collapse
//! ```

use doflab::network::{sample_instance, SampleOptions, Topology};
use doflab::transforms::{cooperation_collapse, fd_equivalence, null_messages};

fn main() {
    // S x R x D case: focus on source 1 and the last destination.
    let srd = sample_instance(
        Topology::Srd {
            sources: 2,
            relays: 1,
            destinations: 2,
        },
        1,
        SampleOptions::default(),
    )
    .unwrap();
    let four = cooperation_collapse(&srd, 0, 4).unwrap();
    println!(
        "srd (2 x 1 x 2) collapsed around (source 1, destination 5): antennas {:?}",
        four.antenna_counts()
    );
    for m in four.message_set().iter() {
        println!("  message to node {} from node {}", m.dest + 1, m.src + 1);
    }

    // The collapse is a pure port reindexing of the parent: node 1 is the
    // focus source, node 2 stacks the other sources then the relays, node 3
    // the other destinations, node 4 the focus destination.
    let index_map = [0usize, 1, 2, 3, 4];
    let mut worst = 0.0f64;
    for t in 1..=10u64 {
        for a in 0..four.port_count() {
            for b in 0..four.port_count() {
                let d = (four.gain(a, b, t) - srd.gain(index_map[a], index_map[b], t)).norm();
                worst = worst.max(d);
            }
        }
    }
    println!("entrywise gain drift against the parent's table: {worst:.1e}\n");

    // Full-duplex case: K = 4 via the half-duplex equivalent.
    let fd = sample_instance(
        Topology::FullDuplex { nodes: 4 },
        3,
        SampleOptions::default(),
    )
    .unwrap();
    let eq = fd_equivalence(&fd).unwrap();
    let four = cooperation_collapse(&eq, 0, 3).unwrap();
    println!(
        "full-duplex K=4 collapsed around (node 1, node 4): antennas {:?}",
        four.antenna_counts()
    );
    println!("zero pattern (destination port x source port), 0 marks a co-located pair:");
    for di in 0..4 {
        let row: Vec<&str> = (0..4)
            .map(|si| {
                if four.gain(4 + di, si, 1).norm() == 0.0 {
                    "0"
                } else {
                    "h"
                }
            })
            .collect();
        println!("  {}", row.join(" "));
    }
    println!(
        "direct node-1 -> node-4 gain: |H| = {:.3} (nonzero, as the converse needs)",
        four.gain(7, 0, 1).norm()
    );

    // Message nulling is the third reduction: keep a cyclic interference
    // pattern inside a K=4 full-duplex network.
    let cyclic = null_messages(&fd, |m| (m.src + 4 - m.dest) % 4 == 1).unwrap();
    println!(
        "\nnulling the K=4 network down to the cyclic pattern keeps {} of {} messages",
        cyclic.message_set().len(),
        fd.message_set().len()
    );
}
