//! Zero-forcing rate simulation over an SNR sweep and pre-log slope
//! regression.
//!
//! Rates come from Shannon per-stream formulas with exact ZF filters: at
//! each receiver the μ×μ [desired | interference] system is inverted, the
//! desired rows give the noise enhancement of each stream, and the rate is
//! Σ log2(1 + p / ‖g‖²) / μ. This removes Monte Carlo noise from
//! everything except the channel draws, so the fitted slope is a clean
//! estimate of the design's DoF. Also hosts the three-node feedback
//! zero-forcing demo and its no-feedback baseline.

use crate::alignment::{self, BeamformingDesign};
use crate::error::{Error, Result};
use crate::network::{
    extend_channel, sample_instance, tags, ExtendedChannel, NetworkInstance, SampleOptions,
    Topology,
};
use crate::rng;
use crate::transforms::null_messages;
use rayon::prelude::*;
use std::collections::BTreeSet;

/// How transmit power is split across streams. Per-transmitter constraints
/// are out of scope; the global budget ρ is divided equally.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum PowerPolicy {
    #[default]
    EqualPerStream,
}

/// An SNR sweep request.
#[derive(Debug, Clone)]
pub struct RateQuery {
    /// Strictly increasing grid, at least two points; ρ = 10^(dB/10).
    pub snr_db: Vec<f64>,
    /// Channel realizations per grid point.
    pub trials: usize,
    pub seed: u64,
    pub power_policy: PowerPolicy,
    /// Slope regression uses grid points at or above this (default 50 dB);
    /// if fewer than two qualify, the top half of the grid is used.
    pub fit_min_db: f64,
}

impl RateQuery {
    pub fn new(snr_db: Vec<f64>, trials: usize, seed: u64) -> Result<Self> {
        if snr_db.len() < 2 || snr_db.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter {
                name: "snr_db",
                reason: "grid must be strictly increasing with >= 2 points".into(),
            });
        }
        if trials < 1 {
            return Err(Error::InvalidParameter {
                name: "trials",
                reason: "at least one trial required".into(),
            });
        }
        Ok(Self {
            snr_db,
            trials,
            seed,
            power_policy: PowerPolicy::EqualPerStream,
            fit_min_db: 50.0,
        })
    }

    /// Grid from `min..=max` in `step` dB increments.
    pub fn from_range(
        min_db: f64,
        max_db: f64,
        step_db: f64,
        trials: usize,
        seed: u64,
    ) -> Result<Self> {
        if step_db <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "step",
                reason: "step must be positive".into(),
            });
        }
        let mut grid = Vec::new();
        let mut db = min_db;
        while db <= max_db + 1e-9 {
            grid.push(db);
            db += step_db;
        }
        Self::new(grid, trials, seed)
    }

    /// Indices of the grid points used for the slope fit.
    fn fit_window(&self) -> Vec<usize> {
        let above: Vec<usize> = (0..self.snr_db.len())
            .filter(|&i| self.snr_db[i] >= self.fit_min_db - 1e-9)
            .collect();
        if above.len() >= 2 {
            above
        } else {
            (self.snr_db.len() / 2..self.snr_db.len()).collect()
        }
    }
}

/// Min / mean / max of per-stream SINR at the top grid point, in dB.
#[derive(Debug, Clone, Copy)]
pub struct SinrSummary {
    pub min_db: f64,
    pub mean_db: f64,
    pub max_db: f64,
}

/// Result of one sweep: rates per point, and the fitted pre-log slope.
#[derive(Debug, Clone)]
pub struct SimulationReport {
    pub snr_db: Vec<f64>,
    /// Averaged over trials; `[point][receiver]` (for the feedback demo,
    /// `[point][message]`).
    pub per_receiver_rate: Vec<Vec<f64>>,
    /// Averaged sum rate per point, bits per channel use.
    pub sum_rate: Vec<f64>,
    /// Least-squares slope of sum rate against log2(ρ) over the fit window.
    pub slope: f64,
    /// RMS residual of the fit.
    pub fit_residual: f64,
    /// Per-message slopes (feedback demo only; empty otherwise).
    pub per_message_slope: Vec<f64>,
    pub stream_sinr: SinrSummary,
    /// Decodability failures encountered while resampling.
    pub decode_failures: usize,
    pub trials: usize,
    /// Unaveraged rates, `[trial][point][receiver]`.
    pub per_trial_rate: Vec<Vec<Vec<f64>>>,
}

/// Rates of one design on one channel at one SNR.
#[derive(Debug, Clone)]
pub struct ZfRates {
    pub per_receiver: Vec<f64>,
    pub sum: f64,
    /// Per-stream SINRs (linear), all receivers concatenated.
    pub stream_sinrs: Vec<f64>,
}

fn log2(x: f64) -> f64 {
    x.ln() / std::f64::consts::LN_2
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Zero-forcing sum rate of `design` on `channel` at total power `rho`.
///
/// Per-stream power is p = ρ·μ / (K(K−1)n^Γ) (equal power per stream,
/// total ρ per channel use across all transmitters), noise is unit
/// variance. Errors with a rank error if a joint system is singular, which
/// [`alignment::verify_decodability`] would have caught.
pub fn zf_sum_rate(
    design: &BeamformingDesign,
    channel: &ExtendedChannel,
    rho: f64,
) -> Result<ZfRates> {
    let k = design.k();
    let mu = design.mu() as f64;
    let desired = (k - 1) * design.streams_per_message();
    let p = design.stream_power(rho);

    let mut per_receiver = Vec::with_capacity(k);
    let mut stream_sinrs = Vec::with_capacity(k * desired);
    for rx in 0..k {
        let joint = alignment::joint_system(design, channel, rx);
        let inv = joint
            .lu()
            .try_inverse()
            .ok_or(Error::RankDeficient { receiver: rx })?;
        let mut rate = 0.0;
        for m in 0..desired {
            let g_norm_sq: f64 = inv.row(m).iter().map(|c| c.norm_sqr()).sum();
            let sinr = p / g_norm_sq;
            stream_sinrs.push(sinr);
            rate += log2(1.0 + sinr);
        }
        per_receiver.push(rate / mu);
    }
    let sum = per_receiver.iter().sum();
    Ok(ZfRates {
        per_receiver,
        sum,
        stream_sinrs,
    })
}

/// Parameters of an alignment-based slope run.
#[derive(Debug, Clone, Copy)]
pub struct AlignmentRun {
    pub k: usize,
    pub n: u32,
    /// Reciprocal gains (the full-duplex default) or independent gains.
    pub reciprocal: bool,
    pub magnitude_min: f64,
    pub magnitude_max: f64,
}

impl AlignmentRun {
    pub fn new(k: usize, n: u32) -> Self {
        Self {
            k,
            n,
            reciprocal: true,
            magnitude_min: 0.5,
            magnitude_max: 2.0,
        }
    }

    pub fn independent(mut self) -> Self {
        self.reciprocal = false;
        self
    }

    fn options(&self) -> SampleOptions {
        SampleOptions {
            reciprocal: Some(self.reciprocal),
            magnitude_min: self.magnitude_min,
            magnitude_max: self.magnitude_max,
        }
    }
}

struct TrialRates {
    /// `[point][receiver]`.
    rates: Vec<Vec<f64>>,
    top_sinrs: Vec<f64>,
    failures: usize,
}

/// Least squares of `y` against `x`; returns (slope, rms residual).
fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let e = b - (slope * a + intercept);
            e * e
        })
        .sum();
    (slope, (rss / n).sqrt())
}

fn summarize_sinrs(sinrs: &[f64]) -> SinrSummary {
    if sinrs.is_empty() {
        return SinrSummary {
            min_db: f64::NAN,
            mean_db: f64::NAN,
            max_db: f64::NAN,
        };
    }
    let to_db = |x: f64| 10.0 * x.log10();
    let min = sinrs.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = sinrs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mean = sinrs.iter().sum::<f64>() / sinrs.len() as f64;
    SinrSummary {
        min_db: to_db(min),
        mean_db: to_db(mean),
        max_db: to_db(max),
    }
}

/// Measure the DoF of the order-n alignment design by rate simulation.
///
/// Each trial draws a fresh channel and seed vectors (derived seeds), keeps
/// resampling while decodability fails (counting failures), computes ZF
/// rates across the grid, and the report fits the slope of the averaged sum
/// rate against log2(ρ). More than 10% decodability failures across trials
/// is an instability error.
pub fn dof_slope(run: &AlignmentRun, query: &RateQuery) -> Result<SimulationReport> {
    RateQuery::new(query.snr_db.clone(), query.trials, query.seed)?;
    let rhos: Vec<f64> = query.snr_db.iter().map(|&db| db_to_linear(db)).collect();

    let mu = alignment::extension_length(run.k, run.n)?;
    let options = run.options();

    let outcomes: Vec<Result<TrialRates>> = (0..query.trials)
        .into_par_iter()
        .map(|trial| -> Result<TrialRates> {
            let mut failures = 0usize;
            // Resample on decodability failure; with generic gains this
            // essentially never trips, so a small cap is plenty.
            for attempt in 0..8u64 {
                let gain_seed = rng::derive(query.seed, &[tags::TRIAL, trial as u64, attempt, 0]);
                let w_seed = rng::derive(query.seed, &[tags::TRIAL, trial as u64, attempt, 1]);
                let inst =
                    sample_instance(Topology::FullDuplex { nodes: run.k }, gain_seed, options)?;
                let channel = extend_channel(&inst, mu, 0)?;
                let design = alignment::build_design(&channel, run.k, run.n, w_seed)?;
                if !alignment::verify_decodability(&design, &channel).pass {
                    failures += 1;
                    continue;
                }
                let mut rates = Vec::with_capacity(rhos.len());
                let mut top_sinrs = Vec::new();
                for (pi, &rho) in rhos.iter().enumerate() {
                    let zf = zf_sum_rate(&design, &channel, rho)?;
                    if pi + 1 == rhos.len() {
                        top_sinrs = zf.stream_sinrs.clone();
                    }
                    rates.push(zf.per_receiver);
                }
                return Ok(TrialRates {
                    rates,
                    top_sinrs,
                    failures,
                });
            }
            Err(Error::Unstable {
                failures,
                attempts: failures,
            })
        })
        .collect();

    let mut all = Vec::with_capacity(query.trials);
    for o in outcomes {
        all.push(o?);
    }
    let total_failures: usize = all.iter().map(|t| t.failures).sum();
    let attempts = query.trials + total_failures;
    if total_failures * 10 > attempts {
        return Err(Error::Unstable {
            failures: total_failures,
            attempts,
        });
    }

    let points = rhos.len();
    let mut per_receiver_rate = vec![vec![0.0; run.k]; points];
    for t in &all {
        for (pi, rates) in t.rates.iter().enumerate() {
            for (rx, r) in rates.iter().enumerate() {
                per_receiver_rate[pi][rx] += r / query.trials as f64;
            }
        }
    }
    let sum_rate: Vec<f64> = per_receiver_rate.iter().map(|r| r.iter().sum()).collect();

    let window = query.fit_window();
    let x: Vec<f64> = window.iter().map(|&i| log2(rhos[i])).collect();
    let y: Vec<f64> = window.iter().map(|&i| sum_rate[i]).collect();
    let (slope, fit_residual) = fit_line(&x, &y);

    let top_sinrs: Vec<f64> = all.iter().flat_map(|t| t.top_sinrs.clone()).collect();
    let per_trial_rate = all.into_iter().map(|t| t.rates).collect();
    Ok(SimulationReport {
        snr_db: query.snr_db.clone(),
        per_receiver_rate,
        sum_rate,
        slope,
        fit_residual,
        per_message_slope: Vec::new(),
        stream_sinr: summarize_sinrs(&top_sinrs),
        decode_failures: total_failures,
        trials: query.trials,
        per_trial_rate,
    })
}

/// The demo's messages: W(1,3), W(2,1), W(3,2) in 1-based numbering.
const DEMO_MESSAGES: [(usize, usize); 3] = [(0, 2), (1, 0), (2, 1)];

/// The three-node full-duplex instance of the feedback demo, with feedback
/// edges 2→1, 3→2, 1→3 (1-based).
pub fn feedback_demo_instance(seed: u64) -> Result<NetworkInstance> {
    let inst = sample_instance(
        Topology::FullDuplex { nodes: 3 },
        seed,
        SampleOptions::default(),
    )?;
    let inst = null_messages(&inst, |m| DEMO_MESSAGES.contains(&(m.dest, m.src)))?;
    let edges: BTreeSet<(usize, usize)> = [(1, 0), (2, 1), (0, 2)].into_iter().collect();
    Ok(inst.with_feedback_edges(edges))
}

/// Simulate the feedback zero-forcing demo (or its no-feedback baseline).
///
/// With feedback, each receiver cancels its own transmit contribution from
/// the fed-back observation and decodes its message over a clean
/// point-to-point link at rate log2(1 + |H|² p): node 1 computes
/// Y2 − H(2,1)·X1 = H(2,3)·X3 + Z2 and reads its message from node 3, and
/// cyclically for the rest. Every message then carries one degree of
/// freedom and the total slope approaches 3. Without feedback, receivers
/// decode from their own observation treating the interferer as noise, and
/// the slope collapses.
pub fn feedback_demo(query: &RateQuery, use_feedback: bool) -> Result<SimulationReport> {
    RateQuery::new(query.snr_db.clone(), query.trials, query.seed)?;
    let inst = feedback_demo_instance(query.seed)?;
    let rhos: Vec<f64> = query.snr_db.iter().map(|&db| db_to_linear(db)).collect();
    let points = rhos.len();

    // Trial t uses the gains of time slot t + 1: the time-varying process
    // is the per-trial channel draw.
    let mut per_message_rate = vec![vec![0.0; 3]; points];
    let mut per_trial_rate = vec![vec![vec![0.0; 3]; points]; query.trials];
    let mut top_sinrs = Vec::new();
    for (trial, trial_rates) in per_trial_rate.iter_mut().enumerate() {
        let t = trial as u64 + 1;
        for (pi, &rho) in rhos.iter().enumerate() {
            let p = rho / 3.0;
            for (mi, &(dest, src)) in DEMO_MESSAGES.iter().enumerate() {
                let sinr = if use_feedback {
                    // The fed-back observer of node `dest`, after canceling
                    // the node's own transmission, sees H(partner, src).
                    let partner = (dest + 1) % 3;
                    inst.gain(partner, src, t).norm_sqr() * p
                } else {
                    let h_des = inst.gain(dest, src, t).norm_sqr();
                    let interferer = 3 - dest - src;
                    let h_int = inst.gain(dest, interferer, t).norm_sqr();
                    h_des * p / (1.0 + h_int * p)
                };
                if pi + 1 == points {
                    top_sinrs.push(sinr);
                }
                let rate = log2(1.0 + sinr);
                trial_rates[pi][mi] = rate;
                per_message_rate[pi][mi] += rate / query.trials as f64;
            }
        }
    }

    let sum_rate: Vec<f64> = per_message_rate.iter().map(|r| r.iter().sum()).collect();
    let window = query.fit_window();
    let x: Vec<f64> = window.iter().map(|&i| log2(rhos[i])).collect();
    let y: Vec<f64> = window.iter().map(|&i| sum_rate[i]).collect();
    let (slope, fit_residual) = fit_line(&x, &y);
    let per_message_slope: Vec<f64> = (0..3)
        .map(|mi| {
            let ym: Vec<f64> = window.iter().map(|&i| per_message_rate[i][mi]).collect();
            fit_line(&x, &ym).0
        })
        .collect();

    Ok(SimulationReport {
        snr_db: query.snr_db.clone(),
        per_receiver_rate: per_message_rate,
        sum_rate,
        slope,
        fit_residual,
        per_message_slope,
        stream_sinr: summarize_sinrs(&top_sinrs),
        decode_failures: 0,
        trials: query.trials,
        per_trial_rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alignment::{achieved_dof, build_design, extension_length};
    use crate::bounds::{formula, Formula};
    use crate::network::{forward_simulate, FixedSequenceEncoder, SimConfig};
    use num_complex::Complex64;
    use num_traits::ToPrimitive;

    fn design_and_channel(k: usize, n: u32, seed: u64) -> (BeamformingDesign, ExtendedChannel) {
        let inst = sample_instance(
            Topology::FullDuplex { nodes: k },
            seed,
            SampleOptions::default(),
        )
        .unwrap();
        let ch = extend_channel(&inst, extension_length(k, n).unwrap(), 0).unwrap();
        let d = build_design(&ch, k, n, seed).unwrap();
        (d, ch)
    }

    #[test]
    fn vanishing_power_gives_vanishing_rate() {
        let (d, ch) = design_and_channel(3, 1, 2);
        let zf = zf_sum_rate(&d, &ch, 1e-12).unwrap();
        assert!(zf.sum < 1e-9);
    }

    #[test]
    fn doubling_power_adds_one_dof_worth_of_bits() {
        let (d, ch) = design_and_channel(3, 1, 4);
        let dof = achieved_dof(3, 1).unwrap().to_f64().unwrap();
        let r1 = zf_sum_rate(&d, &ch, db_to_linear(60.0)).unwrap().sum;
        let r2 = zf_sum_rate(&d, &ch, db_to_linear(60.0) * 2.0).unwrap().sum;
        let gain = r2 - r1;
        assert!(
            (gain - dof).abs() <= 0.05 * dof,
            "octave gain {gain} vs dof {dof}"
        );
    }

    #[test]
    fn high_snr_rate_follows_the_slope_line() {
        // Fit an offset from two points, then predict a third.
        let (d, ch) = design_and_channel(3, 1, 6);
        let r60 = zf_sum_rate(&d, &ch, db_to_linear(60.0)).unwrap().sum;
        let r65 = zf_sum_rate(&d, &ch, db_to_linear(65.0)).unwrap().sum;
        let r70 = zf_sum_rate(&d, &ch, db_to_linear(70.0)).unwrap().sum;
        let c = r60 - 0.6 * log2(db_to_linear(60.0));
        let c2 = r65 - 0.6 * log2(db_to_linear(65.0));
        assert!((c - c2).abs() < 0.05 * r65);
        let predict = 0.6 * log2(db_to_linear(70.0)) + c;
        assert!((r70 - predict).abs() <= 0.05 * r70);
    }

    #[test]
    fn slope_matches_achieved_dof_and_respects_the_outer_bound() {
        for (k, n) in [(3usize, 1u32), (3, 2), (4, 1)] {
            for reciprocal in [true, false] {
                let mut run = AlignmentRun::new(k, n);
                run.reciprocal = reciprocal;
                let query = RateQuery::from_range(50.0, 70.0, 10.0, 3, 11).unwrap();
                let report = dof_slope(&run, &query).unwrap();
                let dof = achieved_dof(k, n).unwrap().to_f64().unwrap();
                assert!(
                    (report.slope - dof).abs() <= 0.05 * dof,
                    "K={k} n={n} reciprocal={reciprocal}: slope {} vs {}",
                    report.slope,
                    dof
                );
                let upper = formula(Formula::FdUpper { nodes: k })
                    .unwrap()
                    .to_f64()
                    .unwrap();
                assert!(report.slope <= upper + 0.05);
                assert_eq!(report.decode_failures, 0);
            }
        }
    }

    #[test]
    fn sum_rate_is_monotone_along_the_grid() {
        let run = AlignmentRun::new(3, 1);
        let query = RateQuery::from_range(0.0, 60.0, 10.0, 2, 3).unwrap();
        let report = dof_slope(&run, &query).unwrap();
        for w in report.sum_rate.windows(2) {
            assert!(w[0] <= w[1] + 1e-12);
        }
    }

    #[test]
    fn feedback_demo_slopes() {
        let query = RateQuery::from_range(40.0, 70.0, 10.0, 20, 5).unwrap();
        let with = feedback_demo(&query, true).unwrap();
        assert!(
            (with.slope - 3.0).abs() <= 0.05 * 3.0,
            "total slope {}",
            with.slope
        );
        for (mi, s) in with.per_message_slope.iter().enumerate() {
            assert!((s - 1.0).abs() <= 0.05, "message {mi} slope {s}");
        }

        let without = feedback_demo(&query, false).unwrap();
        assert!(
            without.slope < 2.1,
            "baseline slope {} should stay below the no-feedback bound",
            without.slope
        );
    }

    #[test]
    fn feedback_cancellation_is_exact() {
        // Noise-free replay: the residual after subtracting the receiver's
        // own contribution from the fed-back observation equals the desired
        // term and carries no trace of the canceled symbol.
        let inst = feedback_demo_instance(77).unwrap();
        let n = 16usize;
        let mut r = rng::stream(123, &[]);
        let mut seq =
            || -> Vec<Complex64> { (0..n).map(|_| rng::complex_gaussian(&mut r)).collect() };
        let x0a = seq();
        let x0b = seq();
        let x1 = seq();
        let x2 = seq();
        let cfg = SimConfig::noiseless(n);
        let run = |x0: &Vec<Complex64>| {
            let enc = FixedSequenceEncoder {
                sequences: vec![x0.clone(), x1.clone(), x2.clone()],
            };
            forward_simulate(&inst, &enc, &cfg).unwrap()
        };
        let ta = run(&x0a);
        let tb = run(&x0b);
        for (t, s2) in x2.iter().enumerate() {
            let time = t as u64 + 1;
            // Node 0 cancels itself from node 1's fed-back observation.
            let resid_a = ta.y[1][t] - inst.gain(1, 0, time) * ta.x[0][t];
            let resid_b = tb.y[1][t] - inst.gain(1, 0, time) * tb.x[0][t];
            let expect = inst.gain(1, 2, time) * s2;
            assert!((resid_a - expect).norm() <= 1e-12);
            // Invariant to the canceled symbol's value.
            assert!((resid_a - resid_b).norm() <= 1e-12);
        }
    }

    #[test]
    fn invalid_queries_are_rejected() {
        assert!(RateQuery::new(vec![50.0], 3, 0).is_err());
        assert!(RateQuery::new(vec![50.0, 40.0], 3, 0).is_err());
        assert!(RateQuery::new(vec![40.0, 50.0], 0, 0).is_err());
        assert!(RateQuery::from_range(40.0, 70.0, 0.0, 1, 0).is_err());
    }

    #[test]
    fn fit_window_prefers_high_snr_points() {
        let q = RateQuery::from_range(40.0, 70.0, 10.0, 1, 0).unwrap();
        assert_eq!(q.fit_window(), vec![1, 2, 3]);
        let low = RateQuery::from_range(10.0, 30.0, 10.0, 1, 0).unwrap();
        // Nothing reaches 50 dB: fall back to the top half.
        assert_eq!(low.fit_window(), vec![1, 2]);
    }
}
