//! Symbol extension: μ consecutive channel uses as one vector channel with
//! diagonal per-link maps.

use super::NetworkInstance;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// The μ-symbol extension of an instance's channel at block index κ.
///
/// Each ordered port pair carries a diagonal map whose entries are that
/// link's gains at times `μκ + 1 ..= μ(κ + 1)`. All maps are diagonal, so
/// any two of them commute exactly; present links have all-nonzero
/// diagonals.
#[derive(Debug, Clone)]
pub struct ExtendedChannel {
    mu: usize,
    kappa: u64,
    ports: usize,
    /// Row-major `[rx * ports + tx]` diagonals.
    diags: Vec<Vec<Complex64>>,
}

impl ExtendedChannel {
    pub fn mu(&self) -> usize {
        self.mu
    }

    pub fn kappa(&self) -> u64 {
        self.kappa
    }

    pub fn ports(&self) -> usize {
        self.ports
    }

    /// Diagonal of the map from port `tx` to port `rx`.
    pub fn diag(&self, rx: usize, tx: usize) -> &[Complex64] {
        &self.diags[rx * self.ports + tx]
    }

    /// True when the link is structurally absent (all-zero diagonal).
    pub fn is_zero_link(&self, rx: usize, tx: usize) -> bool {
        self.diag(rx, tx).iter().all(|h| *h == Complex64::ZERO)
    }

    /// Entrywise product of two diagonals, `self.diag(a) ∘ self.diag(b)`.
    pub fn compose(&self, a: (usize, usize), b: (usize, usize)) -> Vec<Complex64> {
        self.diag(a.0, a.1)
            .iter()
            .zip(self.diag(b.0, b.1))
            .map(|(x, y)| x * y)
            .collect()
    }

    /// Add `delta` to one diagonal entry — for tests that inject channel
    /// perturbations.
    pub fn perturb_for_test(&mut self, rx: usize, tx: usize, entry: usize, delta: Complex64) {
        self.diags[rx * self.ports + tx][entry] += delta;
    }
}

/// Extend `instance`'s channel over `mu` consecutive uses at block `kappa`.
pub fn extend_channel(
    instance: &NetworkInstance,
    mu: usize,
    kappa: u64,
) -> Result<ExtendedChannel> {
    if mu < 1 {
        return Err(Error::InvalidParameter {
            name: "mu",
            reason: "extension length must be >= 1".into(),
        });
    }
    let ports = instance.port_count();
    let base = mu as u64 * kappa;
    let mut diags = Vec::with_capacity(ports * ports);
    for rx in 0..ports {
        for tx in 0..ports {
            let diag: Vec<Complex64> = (1..=mu as u64)
                .map(|offset| instance.gain(rx, tx, base + offset))
                .collect();
            diags.push(diag);
        }
    }
    Ok(ExtendedChannel {
        mu,
        kappa,
        ports,
        diags,
    })
}
