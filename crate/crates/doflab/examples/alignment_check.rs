//! Construct the interference-alignment beamformers for a K-node
//! full-duplex network and verify them: containment of every cross product
//! in the interference space, and the three rank conditions.
//!
//! ```bash
//! cargo run --example alignment_check
//! ```

use doflab::alignment::{
    achieved_dof, build_design, extension_length, verify_alignment, verify_decodability,
};
use doflab::network::{extend_channel, sample_instance, SampleOptions, Topology};
use num_traits::ToPrimitive;

fn main() {
    let (k, n, seed) = (3usize, 2u32, 7u64);
    let mu = extension_length(k, n).unwrap();
    println!("K = {k}, alignment order n = {n}: extension length mu = {mu}");

    let inst = sample_instance(
        Topology::FullDuplex { nodes: k },
        seed,
        SampleOptions::default(),
    )
    .unwrap();
    let channel = extend_channel(&inst, mu, 0).unwrap();
    let design = build_design(&channel, k, n, seed).unwrap();

    println!(
        "desired streams: {} x {} messages = {} over {} uses -> {} DoF ({:.4})",
        design.streams_per_message(),
        k * (k - 1),
        design.total_streams(),
        mu,
        achieved_dof(k, n).unwrap(),
        achieved_dof(k, n).unwrap().to_f64().unwrap(),
    );

    let alignment = verify_alignment(&design, &channel);
    println!(
        "alignment: {} triples checked, max residual {:.3e} -> {}",
        alignment.triples_checked,
        alignment.max_residual,
        if alignment.pass { "pass" } else { "FAIL" }
    );

    let dec = verify_decodability(&design, &channel);
    println!(
        "rank(I_k) = {:?} (expected {})",
        dec.i_ranks, dec.expected_i_rank
    );
    println!(
        "interference dimension per receiver = {:?} (expected {})",
        dec.interference_dims, dec.expected_interference_dim
    );
    println!(
        "joint [desired | interference] rank = {:?} (expected {})",
        dec.joint_ranks, dec.expected_joint_rank
    );
    println!("decodability: {}", if dec.pass { "pass" } else { "FAIL" });
}
