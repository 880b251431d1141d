//! Causal forward simulation of a network instance.
//!
//! `Y_i(n) = Σ_j H_{i,j}(n) X_j(n) + Z_i(n)` computed exactly, with encoder
//! access to past received signals gated by each node's entitlement (own
//! history plus whatever feedback the instance grants). Reading a history a
//! node is not entitled to is a causality violation and aborts the run.
//!
//! Everything is deterministic given the instance and the seeds, and the
//! accumulation order is fixed (transmit ports ascending, structural zeros
//! skipped), so equivalent networks produce bit-identical transcripts.

use super::{tags, NetworkInstance};
use crate::error::{Error, Result};
use crate::rng;
use num_complex::Complex64;

/// Number of complex payload words carried by each message in simulations.
pub const PAYLOAD_LEN: usize = 8;

/// Fixed random payload attached to a message.
pub type Payload = Vec<Complex64>;

pub(crate) fn payload_of(seed: u64) -> Payload {
    let mut r = rng::stream(seed, &[]);
    (0..PAYLOAD_LEN)
        .map(|_| rng::complex_gaussian(&mut r))
        .collect()
}

/// Messages known to `node` at encoding time (the ones it sources), as
/// (message index, payload) in message-set order.
pub(crate) fn node_payloads(instance: &NetworkInstance, node: usize) -> Vec<(usize, Payload)> {
    instance
        .message_set()
        .sourced_at(node)
        .into_iter()
        .map(|(idx, m)| (idx, payload_of(m.payload_seed)))
        .collect()
}

/// Simulation parameters.
#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    /// Block length N (number of channel uses).
    pub block_len: usize,
    pub noise_seed: u64,
    /// Total transmit power budget per channel use, across all ports.
    pub power: f64,
    /// Disable to run noise-free algebraic replays.
    pub noise: bool,
}

impl SimConfig {
    pub fn new(block_len: usize, noise_seed: u64) -> Self {
        Self {
            block_len,
            noise_seed,
            power: 1e9,
            noise: true,
        }
    }

    pub fn noiseless(block_len: usize) -> Self {
        Self {
            block_len,
            noise_seed: 0,
            power: 1e9,
            noise: false,
        }
    }
}

/// Full record of one simulated block, indexed `[port][time - 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub block_len: usize,
    pub x: Vec<Vec<Complex64>>,
    pub y: Vec<Vec<Complex64>>,
    pub z: Vec<Vec<Complex64>>,
}

/// Exact bit equality of two complex rows (distinguishes ±0.0).
pub fn bitwise_eq(a: &[Complex64], b: &[Complex64]) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits())
}

/// What a node's encoder sees at one channel use.
pub struct NodeView<'a> {
    pub(crate) node: usize,
    /// Current 1-based time slot being encoded.
    pub(crate) time: u64,
    pub(crate) entitled: &'a [usize],
    pub(crate) y: &'a [Vec<Complex64>],
    pub(crate) messages: &'a [(usize, Payload)],
    pub(crate) power: f64,
}

impl NodeView<'_> {
    /// The 1-based time slot being encoded.
    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn node(&self) -> usize {
        self.node
    }

    /// Total power budget per channel use.
    pub fn power(&self) -> f64 {
        self.power
    }

    /// Ports whose past received signals this node may read, in a fixed
    /// order. Encoders should address histories by their slot in this list
    /// so that equivalent networks present identical views.
    pub fn entitled_ports(&self) -> &[usize] {
        self.entitled
    }

    /// Messages sourced at this node, as (message index, payload).
    pub fn messages(&self) -> &[(usize, Payload)] {
        self.messages
    }

    /// Received signal of `port` at 1-based time `t`. Errors if the port is
    /// outside this node's entitlement or `t` is not strictly in the past.
    pub fn received(&self, port: usize, t: u64) -> Result<Complex64> {
        if !self.entitled.contains(&port) || t == 0 || t >= self.time {
            return Err(Error::CausalityViolation {
                node: self.node,
                port,
                time: t,
                now: self.time,
            });
        }
        Ok(self.y[port][(t - 1) as usize])
    }
}

/// A causal encoder: produces the symbol for one transmit port per slot.
pub trait Encoder: Sync {
    fn encode(&self, port: usize, view: &NodeView<'_>) -> Result<Complex64>;
}

/// Emits zero everywhere.
pub struct ZeroEncoder;

impl Encoder for ZeroEncoder {
    fn encode(&self, _port: usize, _view: &NodeView<'_>) -> Result<Complex64> {
        Ok(Complex64::ZERO)
    }
}

/// A single unit symbol on one port at one time slot, zero elsewhere.
pub struct PulseEncoder {
    pub port: usize,
    pub time: u64,
    pub amplitude: Complex64,
}

impl Encoder for PulseEncoder {
    fn encode(&self, port: usize, view: &NodeView<'_>) -> Result<Complex64> {
        if port == self.port && view.time() == self.time {
            Ok(self.amplitude)
        } else {
            Ok(Complex64::ZERO)
        }
    }
}

/// Transmits fixed per-port sequences, ignoring history (memoryless).
pub struct FixedSequenceEncoder {
    /// `sequences[port][time - 1]`; missing entries transmit zero.
    pub sequences: Vec<Vec<Complex64>>,
}

impl Encoder for FixedSequenceEncoder {
    fn encode(&self, port: usize, view: &NodeView<'_>) -> Result<Complex64> {
        let t = (view.time() - 1) as usize;
        Ok(self
            .sequences
            .get(port)
            .and_then(|s| s.get(t))
            .copied()
            .unwrap_or(Complex64::ZERO))
    }
}

/// Random causal linear encoder: each transmitted symbol is a seeded linear
/// combination of the node's message payloads and its entitled history.
///
/// Coefficients are pure functions of (seed, port, time, tap), so the same
/// encoder replayed against reconstructed histories reproduces the same
/// map. History taps address entitled ports by slot, keeping the map
/// identical across equivalent networks. `feedback_scale` should be small
/// (1/(4N) in the converse tests) so signals stay bounded over a block.
pub struct RandomLinearEncoder {
    pub seed: u64,
    pub message_scale: f64,
    pub feedback_scale: f64,
}

impl RandomLinearEncoder {
    pub fn new(seed: u64, block_len: usize) -> Self {
        Self {
            seed,
            message_scale: 1.0 / PAYLOAD_LEN as f64,
            feedback_scale: 1.0 / (4 * block_len.max(1)) as f64,
        }
    }

    fn coef(&self, port: usize, time: u64, kind: u64, a: u64, b: u64) -> Complex64 {
        let mut r = rng::stream(self.seed, &[tags::ENCODER, port as u64, time, kind, a, b]);
        rng::complex_gaussian(&mut r)
    }
}

impl Encoder for RandomLinearEncoder {
    fn encode(&self, port: usize, view: &NodeView<'_>) -> Result<Complex64> {
        let t = view.time();
        let mut acc = Complex64::ZERO;
        for (mslot, (_, payload)) in view.messages().iter().enumerate() {
            for (w, val) in payload.iter().enumerate() {
                acc += self.message_scale * self.coef(port, t, 0, mslot as u64, w as u64) * val;
            }
        }
        for (slot, &p) in view.entitled_ports().iter().enumerate() {
            for tau in 1..t {
                acc += self.feedback_scale
                    * self.coef(port, t, 1, slot as u64, tau)
                    * view.received(p, tau)?;
            }
        }
        Ok(acc)
    }
}

/// Run the channel for `config.block_len` uses under `encoder`.
///
/// Transmit symbols are produced port-by-port in ascending order; received
/// signals accumulate transmit ports in ascending order, skipping
/// structurally absent links, with noise added last. Ports of
/// receive-incapable nodes record zero.
pub fn forward_simulate(
    instance: &NetworkInstance,
    encoder: &dyn Encoder,
    config: &SimConfig,
) -> Result<Transcript> {
    let ports = instance.port_count();
    let nodes = instance.node_count();
    let payloads: Vec<Vec<(usize, Payload)>> =
        (0..nodes).map(|v| node_payloads(instance, v)).collect();
    let port_node: Vec<usize> = (0..ports).map(|p| instance.node_of(p)).collect();

    let mut x: Vec<Vec<Complex64>> = vec![Vec::with_capacity(config.block_len); ports];
    let mut y: Vec<Vec<Complex64>> = vec![Vec::with_capacity(config.block_len); ports];
    let mut z: Vec<Vec<Complex64>> = vec![Vec::with_capacity(config.block_len); ports];

    for t in 1..=config.block_len as u64 {
        // Encode.
        let mut xt = vec![Complex64::ZERO; ports];
        for (p, xp) in xt.iter_mut().enumerate() {
            let v = port_node[p];
            if !instance.is_tx(v) {
                continue;
            }
            let view = NodeView {
                node: v,
                time: t,
                entitled: instance.entitled_ports(v),
                y: &y,
                messages: &payloads[v],
                power: config.power,
            };
            *xp = encoder.encode(p, &view)?;
        }
        let used: f64 = xt.iter().map(|s| s.norm_sqr()).sum();
        if used > config.power * (1.0 + 1e-9) {
            return Err(Error::PowerExceeded {
                time: t,
                used,
                budget: config.power,
            });
        }

        // Propagate.
        for p in 0..ports {
            if !instance.is_rx(port_node[p]) {
                y[p].push(Complex64::ZERO);
                z[p].push(Complex64::ZERO);
                continue;
            }
            let mut acc = Complex64::ZERO;
            for (q, xq) in xt.iter().enumerate() {
                let h = instance.gain(p, q, t);
                if h != Complex64::ZERO {
                    acc += h * xq;
                }
            }
            let noise = if config.noise {
                let mut r =
                    rng::stream(config.noise_seed, &[tags::NOISE, instance.noise_tag(p), t]);
                rng::complex_gaussian(&mut r)
            } else {
                Complex64::ZERO
            };
            z[p].push(noise);
            y[p].push(acc + noise);
        }
        for (p, s) in xt.into_iter().enumerate() {
            x[p].push(s);
        }
    }

    Ok(Transcript {
        block_len: config.block_len,
        x,
        y,
        z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{sample_instance, SampleOptions, Topology};

    fn fd3() -> NetworkInstance {
        sample_instance(
            Topology::FullDuplex { nodes: 3 },
            21,
            SampleOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn zero_encoders_leave_only_noise() {
        let inst = fd3();
        let tr = forward_simulate(&inst, &ZeroEncoder, &SimConfig::new(6, 99)).unwrap();
        for p in 0..3 {
            for t in 0..6 {
                assert_eq!(tr.y[p][t], tr.z[p][t]);
            }
        }
    }

    #[test]
    fn single_unit_pulse_reproduces_the_gain() {
        let inst = fd3();
        let enc = PulseEncoder {
            port: 1,
            time: 3,
            amplitude: Complex64::ONE,
        };
        let tr = forward_simulate(&inst, &enc, &SimConfig::new(4, 5)).unwrap();
        for p in 0..3 {
            let expect = inst.gain(p, 1, 3) + tr.z[p][2];
            assert_eq!(tr.y[p][2], expect);
        }
    }

    #[test]
    fn transcripts_are_reproducible_bit_exactly() {
        let inst = fd3();
        let enc = RandomLinearEncoder::new(17, 20);
        let cfg = SimConfig::new(20, 33);
        let a = forward_simulate(&inst, &enc, &cfg).unwrap();
        let b = forward_simulate(&inst, &enc, &cfg).unwrap();
        for p in 0..3 {
            assert!(bitwise_eq(&a.x[p], &b.x[p]));
            assert!(bitwise_eq(&a.y[p], &b.y[p]));
        }
    }

    #[test]
    fn channel_is_linear_in_the_inputs() {
        let inst = fd3();
        let mut r = crate::rng::stream(7, &[123]);
        let seq = |r: &mut rand_chacha::ChaCha8Rng| -> Vec<Vec<Complex64>> {
            (0..3)
                .map(|_| (0..8).map(|_| crate::rng::complex_gaussian(r)).collect())
                .collect()
        };
        let s1 = seq(&mut r);
        let s2 = seq(&mut r);
        let sum: Vec<Vec<Complex64>> = s1
            .iter()
            .zip(&s2)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        let cfg = SimConfig::noiseless(8);
        let t1 = forward_simulate(&inst, &FixedSequenceEncoder { sequences: s1 }, &cfg).unwrap();
        let t2 = forward_simulate(&inst, &FixedSequenceEncoder { sequences: s2 }, &cfg).unwrap();
        let ts = forward_simulate(&inst, &FixedSequenceEncoder { sequences: sum }, &cfg).unwrap();
        for p in 0..3 {
            for t in 0..8 {
                let lhs = ts.y[p][t];
                let rhs = t1.y[p][t] + t2.y[p][t];
                assert!((lhs - rhs).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn forbidden_history_read_is_a_causality_violation() {
        struct Nosy;
        impl Encoder for Nosy {
            fn encode(&self, _port: usize, view: &NodeView<'_>) -> Result<Complex64> {
                if view.node() == 0 && view.time() > 1 {
                    // Node 0 is entitled to its own history only.
                    view.received(1, view.time() - 1)?;
                }
                Ok(Complex64::ZERO)
            }
        }
        let inst = fd3();
        let err = forward_simulate(&inst, &Nosy, &SimConfig::new(3, 0)).unwrap_err();
        assert!(matches!(
            err,
            Error::CausalityViolation {
                node: 0,
                port: 1,
                ..
            }
        ));
    }

    #[test]
    fn future_reads_are_rejected() {
        struct Clairvoyant;
        impl Encoder for Clairvoyant {
            fn encode(&self, port: usize, view: &NodeView<'_>) -> Result<Complex64> {
                view.received(port, view.time())?;
                Ok(Complex64::ZERO)
            }
        }
        let inst = fd3();
        let err = forward_simulate(&inst, &Clairvoyant, &SimConfig::new(2, 0)).unwrap_err();
        assert!(matches!(err, Error::CausalityViolation { .. }));
    }

    #[test]
    fn power_budget_is_enforced() {
        let inst = fd3();
        let enc = FixedSequenceEncoder {
            sequences: vec![vec![Complex64::new(10.0, 0.0); 2]; 3],
        };
        let mut cfg = SimConfig::noiseless(2);
        cfg.power = 1.0;
        let err = forward_simulate(&inst, &enc, &cfg).unwrap_err();
        assert!(matches!(err, Error::PowerExceeded { time: 1, .. }));
    }
}
