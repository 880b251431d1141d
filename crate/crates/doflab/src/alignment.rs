//! Interference-alignment beamformers for the K-node full-duplex network
//! over symbol extensions.
//!
//! For alignment order n, the design works over a μ = (K−1)((n+1)^Γ + n^Γ)
//! symbol extension with Γ = (K−1)(K−2). Each destination k owns a seed
//! vector w_k and two column families generated by exponent products of Γ
//! commuting diagonal maps: V_k (exponents in {1..n}^Γ, the transmit
//! beamformers shared by every transmitter sending to k) and I_k (exponents
//! in {1..n+1}^Γ, the space that absorbs all interference aligned at the
//! other receivers). Multiplying a V_k column by a cross map bumps one
//! exponent coordinate, landing exactly on an I_k column; that containment
//! is what [`verify_alignment`] checks, and [`verify_decodability`] confirms
//! the rank side of the story numerically.
//!
//! Coordinate m of destination k is the ordered cross pair (i, j), i ≠ k,
//! j ≠ k, i ≠ j, in lexicographic order. On reciprocal channels the pairs
//! (i, j) and (j, i) carry the same diagonal, and repeating a map would
//! collapse the exponent lattice (T^a T^b = T^(a+b)), so duplicated
//! coordinates are backed by auxiliary generic diagonals drawn from the
//! design seed while both ordered pairs keep m(i,j,k) pointing at the one
//! real channel coordinate. The construction still never uses H(k, i) or
//! H(i, k), which is what decodability rests on.

use crate::error::{Error, Result};
use crate::network::ExtendedChannel;
use crate::rng;
use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;

/// Singular values below `RANK_TOL` times the largest count as zero.
pub const RANK_TOL: f64 = 1e-9;

/// Alignment residuals above this fail [`verify_alignment`].
pub const ALIGNMENT_TOL: f64 = 1e-10;

const AUX_TAG: u64 = 0x617578;

/// Γ = (K−1)(K−2).
pub fn gamma(k: usize) -> u32 {
    ((k - 1) * (k - 2)) as u32
}

/// μ_n = (K−1)((n+1)^Γ + n^Γ), exactly.
pub fn extension_length_exact(k: usize, n: u32) -> BigInt {
    let g = gamma(k);
    let np1 = BigInt::from(n + 1).pow(g);
    let nn = BigInt::from(n).pow(g);
    BigInt::from(k as u64 - 1) * (np1 + nn)
}

/// μ_n as a usize, for sizes that fit a concrete design.
pub fn extension_length(k: usize, n: u32) -> Result<usize> {
    extension_length_exact(k, n)
        .to_usize()
        .ok_or(Error::InvalidParameter {
            name: "mu",
            reason: format!("extension length overflows for K={k}, n={n}"),
        })
}

/// DoF achieved by the order-n design: K(K−1)n^Γ / μ_n.
pub fn achieved_dof(k: usize, n: u32) -> Result<BigRational> {
    if k < 2 {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: format!("K >= 2 required, got {k}"),
        });
    }
    if n < 1 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "alignment order must be >= 1".into(),
        });
    }
    let streams = BigInt::from((k * (k - 1)) as u64) * BigInt::from(n).pow(gamma(k));
    Ok(BigRational::new(streams, extension_length_exact(k, n)))
}

/// Mixed-radix exponent lattice over {1..base}^len.
#[derive(Debug, Clone, Copy)]
struct ExponentLattice {
    base: u32,
    len: u32,
}

impl ExponentLattice {
    fn count(&self) -> usize {
        (self.base as usize).pow(self.len)
    }

    /// Exponent vector of a column index (most significant coordinate
    /// first).
    fn exponents(&self, mut index: usize) -> Vec<u32> {
        let mut alpha = vec![1u32; self.len as usize];
        for m in (0..self.len as usize).rev() {
            alpha[m] = 1 + (index % self.base as usize) as u32;
            index /= self.base as usize;
        }
        alpha
    }

    /// Column index of an exponent vector; `None` if out of range.
    fn index(&self, alpha: &[u32]) -> Option<usize> {
        let mut idx = 0usize;
        for &a in alpha {
            if a < 1 || a > self.base {
                return None;
            }
            idx = idx * self.base as usize + (a - 1) as usize;
        }
        Some(idx)
    }
}

/// The exponent-product beamforming construction for one extended channel.
#[derive(Debug, Clone)]
pub struct BeamformingDesign {
    k: usize,
    n: u32,
    gamma: u32,
    mu: usize,
    /// Seed vectors w_k, one per destination.
    w: Vec<DVector<Complex64>>,
    /// Per destination k: the Γ ordered cross pairs in lexicographic order.
    cross_pairs: Vec<Vec<(usize, usize)>>,
    /// Per destination k, per coordinate: the diagonal map powering that
    /// exponent coordinate.
    maps: Vec<Vec<DVector<Complex64>>>,
    /// Per destination k, per pair position: the coordinate whose map is
    /// the actual channel for that ordered pair (identity unless the
    /// channel duplicates maps, i.e. reciprocity).
    coord_of_pair: Vec<Vec<usize>>,
    v_raw: Vec<DMatrix<Complex64>>,
    i_raw: Vec<DMatrix<Complex64>>,
    v_unit: Vec<DMatrix<Complex64>>,
    i_unit: Vec<DMatrix<Complex64>>,
}

fn normalize_columns(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut out = m.clone();
    for mut col in out.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col /= Complex64::new(norm, 0.0);
        }
    }
    out
}

impl BeamformingDesign {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn gamma(&self) -> u32 {
        self.gamma
    }

    pub fn mu(&self) -> usize {
        self.mu
    }

    /// Desired streams per message: n^Γ.
    pub fn streams_per_message(&self) -> usize {
        ExponentLattice {
            base: self.n,
            len: self.gamma,
        }
        .count()
    }

    /// Total desired streams: K(K−1) n^Γ.
    pub fn total_streams(&self) -> usize {
        self.k * (self.k - 1) * self.streams_per_message()
    }

    /// Interference columns per destination: (n+1)^Γ.
    pub fn interference_columns(&self) -> usize {
        ExponentLattice {
            base: self.n + 1,
            len: self.gamma,
        }
        .count()
    }

    /// Equal per-stream power under a total budget of `rho` per channel
    /// use: ρ·μ / (K(K−1)n^Γ). Beamformer columns are unit norm, so stream
    /// power equals symbol power.
    pub fn stream_power(&self, rho: f64) -> f64 {
        rho * self.mu as f64 / self.total_streams() as f64
    }

    pub fn seed_vector(&self, k: usize) -> &DVector<Complex64> {
        &self.w[k]
    }

    /// Transmit beamformers for messages destined to `k` (unit columns).
    pub fn v(&self, k: usize) -> &DMatrix<Complex64> {
        &self.v_unit[k]
    }

    /// Interference space of destination `k` (unit columns).
    pub fn interference_space(&self, k: usize) -> &DMatrix<Complex64> {
        &self.i_unit[k]
    }

    /// Coordinate index m(i, j, k) of the ordered cross pair (i, j).
    pub fn coordinate(&self, i: usize, j: usize, k: usize) -> Option<usize> {
        let pos = self.cross_pairs[k].iter().position(|&p| p == (i, j))?;
        Some(self.coord_of_pair[k][pos])
    }

    /// Overwrite destination `dst`'s seed vector with `src`'s and rebuild
    /// its families — deliberately degenerate, for negative tests. With
    /// `copy_maps` the coordinate maps are copied too, making the two
    /// interference families identical.
    pub fn duplicate_destination_for_test(&mut self, src: usize, dst: usize, copy_maps: bool) {
        self.w[dst] = self.w[src].clone();
        if copy_maps {
            self.maps[dst] = self.maps[src].clone();
        }
        let (v, i) = build_families(self.mu, self.n, self.gamma, &self.w[dst], &self.maps[dst]);
        self.v_unit[dst] = normalize_columns(&v);
        self.i_unit[dst] = normalize_columns(&i);
        self.v_raw[dst] = v;
        self.i_raw[dst] = i;
    }
}

fn build_families(
    mu: usize,
    n: u32,
    gamma: u32,
    w: &DVector<Complex64>,
    maps: &[DVector<Complex64>],
) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let family = |lattice: ExponentLattice| -> DMatrix<Complex64> {
        let cols = lattice.count();
        let mut out = DMatrix::zeros(mu, cols);
        for c in 0..cols {
            let alpha = lattice.exponents(c);
            let mut col = w.clone();
            for (m, &a) in alpha.iter().enumerate() {
                let t = &maps[m];
                for e in 0..mu {
                    col[e] *= t[e].powu(a);
                }
            }
            out.set_column(c, &col);
        }
        out
    };
    (
        family(ExponentLattice {
            base: n,
            len: gamma,
        }),
        family(ExponentLattice {
            base: n + 1,
            len: gamma,
        }),
    )
}

/// Build the order-n design for an extended full-duplex channel.
///
/// `channel` must be the μ_n-symbol extension of a K-port channel with
/// diagonal maps and zero self-links; seed vectors are drawn i.i.d. with
/// magnitudes uniform in [0.5, 1.5] and uniform phases. K = 2 degenerates
/// to Γ = 0 with single-column families, which is supported.
pub fn build_design(
    channel: &ExtendedChannel,
    k: usize,
    n: u32,
    seed: u64,
) -> Result<BeamformingDesign> {
    if k < 2 {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: format!("K >= 2 required, got {k}"),
        });
    }
    if n < 1 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "alignment order must be >= 1".into(),
        });
    }
    if channel.ports() != k {
        return Err(Error::DimensionMismatch {
            context: "channel port count",
            expected: k,
            got: channel.ports(),
        });
    }
    let mu = extension_length(k, n)?;
    if channel.mu() != mu {
        return Err(Error::DimensionMismatch {
            context: "extension length",
            expected: mu,
            got: channel.mu(),
        });
    }
    for i in 0..k {
        if !channel.is_zero_link(i, i) {
            return Err(Error::InvalidParameter {
                name: "channel",
                reason: format!("self link {i} is not zero; not a full-duplex extension"),
            });
        }
    }

    let w: Vec<DVector<Complex64>> = (0..k)
        .map(|dest| {
            let mut r = rng::stream(seed, &[crate::network::tags::WVEC, dest as u64]);
            DVector::from_fn(mu, |_, _| rng::complex_ring(&mut r, 0.5, 1.5))
        })
        .collect();

    let g = gamma(k) as usize;
    let mut cross_pairs = Vec::with_capacity(k);
    let mut maps: Vec<Vec<DVector<Complex64>>> = Vec::with_capacity(k);
    let mut coord_of_pair = Vec::with_capacity(k);
    for dest in 0..k {
        let pairs: Vec<(usize, usize)> = (0..k)
            .flat_map(|i| (0..k).map(move |j| (i, j)))
            .filter(|&(i, j)| i != dest && j != dest && i != j)
            .collect();
        debug_assert_eq!(pairs.len(), g);

        let diags: Vec<Vec<Complex64>> = pairs
            .iter()
            .map(|&(i, j)| channel.diag(i, j).to_vec())
            .collect();
        // A coordinate whose channel map duplicates an earlier one (the
        // reciprocal case) gets an auxiliary generic diagonal; the pair
        // keeps addressing the first coordinate that carries the real map.
        let mut coords = Vec::with_capacity(g);
        let mut coord_maps: Vec<DVector<Complex64>> = Vec::with_capacity(g);
        for (m, diag) in diags.iter().enumerate() {
            match diags[..m].iter().position(|d| d == diag) {
                Some(orig) => {
                    coords.push(orig);
                    let mut r = rng::stream(seed, &[AUX_TAG, dest as u64, m as u64]);
                    coord_maps.push(DVector::from_fn(mu, |_, _| {
                        rng::complex_ring(&mut r, 0.5, 2.0)
                    }));
                }
                None => {
                    coords.push(m);
                    coord_maps.push(DVector::from_column_slice(diag));
                }
            }
        }
        cross_pairs.push(pairs);
        maps.push(coord_maps);
        coord_of_pair.push(coords);
    }

    let gm = gamma(k);
    let mut v_raw = Vec::with_capacity(k);
    let mut i_raw = Vec::with_capacity(k);
    for dest in 0..k {
        let (v, i) = build_families(mu, n, gm, &w[dest], &maps[dest]);
        v_raw.push(v);
        i_raw.push(i);
    }
    let v_unit = v_raw.iter().map(normalize_columns).collect();
    let i_unit = i_raw.iter().map(normalize_columns).collect();

    Ok(BeamformingDesign {
        k,
        n,
        gamma: gm,
        mu,
        w,
        cross_pairs,
        maps,
        coord_of_pair,
        v_raw,
        i_raw,
        v_unit,
        i_unit,
    })
}

/// Outcome of the alignment containment check.
#[derive(Debug, Clone)]
pub struct AlignmentReport {
    /// Largest relative column deviation over all checked triples.
    pub max_residual: f64,
    /// Number of (receiver, transmitter, destination) triples checked.
    pub triples_checked: usize,
    pub pass: bool,
}

/// Check every alignment relation of the design against `channel`.
///
/// For each triple (i, j, k) with i ≠ k, k ≠ j, j ≠ i and every raw V_k
/// column with exponent α, the product H(i,j) · column must equal the raw
/// I_k column with exponent α + e_m(i,j,k); the report carries the largest
/// relative deviation. Containment is exact by exponent bookkeeping (the
/// diagonal maps commute), so residuals sit at floating round-off.
pub fn verify_alignment(design: &BeamformingDesign, channel: &ExtendedChannel) -> AlignmentReport {
    let k = design.k;
    let v_lattice = ExponentLattice {
        base: design.n,
        len: design.gamma,
    };
    let i_lattice = ExponentLattice {
        base: design.n + 1,
        len: design.gamma,
    };
    let mut max_residual: f64 = 0.0;
    let mut triples = 0usize;
    for dest in 0..k {
        for i in 0..k {
            for j in 0..k {
                if i == dest || j == dest || i == j {
                    continue;
                }
                triples += 1;
                let m = design
                    .coordinate(i, j, dest)
                    .expect("cross pair must have a coordinate");
                let h = channel.diag(i, j);
                for c in 0..design.v_raw[dest].ncols() {
                    let mut alpha = v_lattice.exponents(c);
                    alpha[m] += 1;
                    let target = i_lattice
                        .index(&alpha)
                        .expect("bumped exponent stays within the I lattice");
                    let icol = design.i_raw[dest].column(target);
                    let vcol = design.v_raw[dest].column(c);
                    let mut num: f64 = 0.0;
                    let mut den: f64 = 0.0;
                    for e in 0..design.mu {
                        num = num.max((h[e] * vcol[e] - icol[e]).norm());
                        den = den.max(icol[e].norm());
                    }
                    let rel = if den > 0.0 { num / den } else { num };
                    max_residual = max_residual.max(rel);
                }
            }
        }
    }
    AlignmentReport {
        max_residual,
        triples_checked: triples,
        pass: max_residual <= ALIGNMENT_TOL,
    }
}

/// Outcome of the rank-side checks.
#[derive(Debug, Clone)]
pub struct DecodabilityReport {
    /// rank(I_k) per destination; must equal (n+1)^Γ.
    pub i_ranks: Vec<usize>,
    pub expected_i_rank: usize,
    /// Rank of the stacked interference at each receiver; must equal
    /// (K−1)(n+1)^Γ.
    pub interference_dims: Vec<usize>,
    pub expected_interference_dim: usize,
    /// Rank of the μ×μ [desired | interference] system at each receiver.
    pub joint_ranks: Vec<usize>,
    pub expected_joint_rank: usize,
    pub pass: bool,
}

fn rank_of(m: &DMatrix<Complex64>) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0f64, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * max).count()
}

/// Desired-signal matrix at receiver `rx`: [H(rx, i) V_rx] over transmitters
/// i ≠ rx, ascending, with unit V columns.
fn desired_matrix(
    design: &BeamformingDesign,
    channel: &ExtendedChannel,
    rx: usize,
) -> DMatrix<Complex64> {
    let per = design.streams_per_message();
    let mut d = DMatrix::zeros(design.mu, (design.k - 1) * per);
    let mut out_col = 0;
    for tx in 0..design.k {
        if tx == rx {
            continue;
        }
        let h = channel.diag(rx, tx);
        for c in 0..per {
            let v = design.v_unit[rx].column(c);
            let col = DVector::from_fn(design.mu, |e, _| h[e] * v[e]);
            d.set_column(out_col, &col);
            out_col += 1;
        }
    }
    d
}

/// Stacked interference columns seen by receiver `rx`: [I_m for m ≠ rx].
fn interference_stack(design: &BeamformingDesign, rx: usize) -> DMatrix<Complex64> {
    let per = design.interference_columns();
    let mut m = DMatrix::zeros(design.mu, (design.k - 1) * per);
    let mut out_col = 0;
    for dest in 0..design.k {
        if dest == rx {
            continue;
        }
        for c in 0..per {
            m.set_column(out_col, &design.i_unit[dest].column(c));
            out_col += 1;
        }
    }
    m
}

/// The μ×μ zero-forcing system at receiver `rx`:
/// [desired | stacked interference].
pub(crate) fn joint_system(
    design: &BeamformingDesign,
    channel: &ExtendedChannel,
    rx: usize,
) -> DMatrix<Complex64> {
    let d = desired_matrix(design, channel, rx);
    let i = interference_stack(design, rx);
    let mut j = DMatrix::zeros(design.mu, d.ncols() + i.ncols());
    j.view_mut((0, 0), (design.mu, d.ncols())).copy_from(&d);
    j.view_mut((0, d.ncols()), (design.mu, i.ncols()))
        .copy_from(&i);
    j
}

/// Numerically confirm the three rank conditions of the construction.
pub fn verify_decodability(
    design: &BeamformingDesign,
    channel: &ExtendedChannel,
) -> DecodabilityReport {
    let k = design.k;
    let expected_i_rank = design.interference_columns();
    let expected_interference_dim = (k - 1) * expected_i_rank;
    let expected_joint_rank = design.mu;

    let i_ranks: Vec<usize> = (0..k).map(|dest| rank_of(&design.i_unit[dest])).collect();
    let interference_dims: Vec<usize> = (0..k)
        .map(|rx| rank_of(&interference_stack(design, rx)))
        .collect();
    let joint_ranks: Vec<usize> = (0..k)
        .map(|rx| rank_of(&joint_system(design, channel, rx)))
        .collect();

    let pass = i_ranks.iter().all(|&r| r == expected_i_rank)
        && interference_dims
            .iter()
            .all(|&r| r == expected_interference_dim)
        && joint_ranks.iter().all(|&r| r == expected_joint_rank);

    DecodabilityReport {
        i_ranks,
        expected_i_rank,
        interference_dims,
        expected_interference_dim,
        joint_ranks,
        expected_joint_rank,
        pass,
    }
}

/// One seed's verification outcome in a Monte Carlo batch.
#[derive(Debug, Clone)]
pub struct TrialCheck {
    pub trial: usize,
    /// Derived gain seed of this trial.
    pub seed: u64,
    pub alignment: AlignmentReport,
    pub decodability: DecodabilityReport,
}

impl TrialCheck {
    pub fn pass(&self) -> bool {
        self.alignment.pass && self.decodability.pass
    }
}

/// Run both verifications over `trials` derived seeds, in parallel.
pub fn verify_trials(
    k: usize,
    n: u32,
    master_seed: u64,
    trials: usize,
    options: crate::network::SampleOptions,
) -> Result<Vec<TrialCheck>> {
    use crate::network::{extend_channel, sample_instance, tags, Topology};
    use rayon::prelude::*;

    let mu = extension_length(k, n)?;
    (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<TrialCheck> {
            let gain_seed = rng::derive(master_seed, &[tags::TRIAL, trial as u64, 0]);
            let w_seed = rng::derive(master_seed, &[tags::TRIAL, trial as u64, 1]);
            let inst = sample_instance(Topology::FullDuplex { nodes: k }, gain_seed, options)?;
            let channel = extend_channel(&inst, mu, 0)?;
            let design = build_design(&channel, k, n, w_seed)?;
            Ok(TrialCheck {
                trial,
                seed: gain_seed,
                alignment: verify_alignment(&design, &channel),
                decodability: verify_decodability(&design, &channel),
            })
        })
        .collect()
}
