//! Property tests for the structural invariants of the channel model.

use doflab::network::{
    extend_channel, forward_simulate, sample_instance, FixedSequenceEncoder, SampleOptions,
    SimConfig, Topology,
};
use doflab::transforms::null_messages;
use num_complex::Complex64;
use proptest::prelude::*;

fn fd(k: usize, seed: u64) -> doflab::network::NetworkInstance {
    sample_instance(
        Topology::FullDuplex { nodes: k },
        seed,
        SampleOptions::default(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Identical seeds regenerate identical gains; magnitudes stay inside
    /// the configured band; reciprocity holds pairwise.
    #[test]
    fn gain_process_invariants(
        seed in any::<u64>(),
        k in 2usize..6,
        t in 1u64..10_000,
    ) {
        let a = fd(k, seed);
        let b = fd(k, seed);
        for i in 0..k {
            for j in 0..k {
                let g = a.gain(i, j, t);
                prop_assert_eq!(g, b.gain(i, j, t));
                prop_assert_eq!(g, a.gain(j, i, t));
                if i == j {
                    prop_assert_eq!(g, Complex64::ZERO);
                } else {
                    let m = g.norm();
                    prop_assert!((0.5..=2.0 + 1e-12).contains(&m));
                }
            }
        }
    }

    /// Any two per-link maps of one extension commute exactly (they are
    /// diagonal, so this is entrywise multiplication both ways).
    #[test]
    fn extension_maps_commute(
        seed in any::<u64>(),
        mu in 1usize..12,
        kappa in 0u64..50,
    ) {
        let inst = fd(3, seed);
        let ext = extend_channel(&inst, mu, kappa).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let ab = ext.compose((0, a), (b, 2));
                let ba = ext.compose((b, 2), (0, a));
                prop_assert_eq!(ab, ba);
            }
        }
    }

    /// The channel is linear: the noise-free transcript of summed inputs is
    /// the entrywise sum of the individual noise-free transcripts.
    #[test]
    fn superposition(seed in any::<u64>(), n in 1usize..10) {
        let inst = fd(3, seed);
        let mut r = doflab::rng::stream(seed, &[7]);
        let mut seq = |len: usize| -> Vec<Vec<Complex64>> {
            (0..3)
                .map(|_| (0..len).map(|_| doflab::rng::complex_gaussian(&mut r)).collect())
                .collect()
        };
        let s1 = seq(n);
        let s2 = seq(n);
        let sum: Vec<Vec<Complex64>> = s1
            .iter()
            .zip(&s2)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        let cfg = SimConfig::noiseless(n);
        let t1 = forward_simulate(&inst, &FixedSequenceEncoder { sequences: s1 }, &cfg).unwrap();
        let t2 = forward_simulate(&inst, &FixedSequenceEncoder { sequences: s2 }, &cfg).unwrap();
        let ts = forward_simulate(&inst, &FixedSequenceEncoder { sequences: sum }, &cfg).unwrap();
        for p in 0..3 {
            for t in 0..n {
                prop_assert!((ts.y[p][t] - (t1.y[p][t] + t2.y[p][t])).norm() < 1e-12);
            }
        }
    }

    /// Nulling messages never changes a gain value, whichever subset
    /// survives.
    #[test]
    fn nulling_never_touches_gains(seed in any::<u64>(), mask in 1u8..63) {
        let inst = fd(3, seed);
        let kept = null_messages(&inst, |m| {
            let idx = inst.message_set().index_of(m.dest, m.src).unwrap();
            mask & (1 << idx) != 0
        })
        .unwrap();
        for t in 1..5u64 {
            for i in 0..3 {
                for j in 0..3 {
                    prop_assert_eq!(kept.gain(i, j, t), inst.gain(i, j, t));
                }
            }
        }
    }
}
