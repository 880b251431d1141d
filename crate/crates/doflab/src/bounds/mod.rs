//! Closed-form DoF formulas and outer-bound regions with exact LP
//! maximization of the total DoF.
//!
//! Regions are small polytopes over one nonnegative variable per message,
//! with one inequality per (source, destination) focus pair. All arithmetic
//! is exact rational, so the maximum of the sum objective can be compared
//! against the closed forms with `==`.

mod simplex;

pub use simplex::{maximize, ratio, LpSolution};

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Which family of outer-bound region a [`DofRegion`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionKind {
    /// S x D X network (sources disjoint from destinations): one variable
    /// per (destination, source) pair.
    XNetwork { sources: usize, destinations: usize },
    /// K-node full-duplex network: one variable per ordered (destination,
    /// source) pair of distinct nodes.
    FullDuplex { nodes: usize },
}

/// A DoF outer-bound region: nonnegative per-message variables and a system
/// of inequalities with right-hand side 1 and coefficients in {-1, 0, 1}.
#[derive(Debug, Clone)]
pub struct DofRegion {
    kind: RegionKind,
    /// (destination, source) label per variable.
    variables: Vec<(usize, usize)>,
    /// Net coefficient rows; every inequality reads `row · d <= 1`.
    inequalities: Vec<Vec<i8>>,
}

impl DofRegion {
    pub fn kind(&self) -> RegionKind {
        self.kind
    }

    pub fn variables(&self) -> &[(usize, usize)] {
        &self.variables
    }

    pub fn variable_count(&self) -> usize {
        self.variables.len()
    }

    pub fn inequality_count(&self) -> usize {
        self.inequalities.len()
    }

    pub fn coefficient(&self, inequality: usize, variable: usize) -> i8 {
        self.inequalities[inequality][variable]
    }

    /// Left-hand side of one inequality at a point.
    pub fn lhs(&self, inequality: usize, point: &[BigRational]) -> BigRational {
        self.inequalities[inequality]
            .iter()
            .zip(point)
            .map(|(&c, x)| BigRational::from_integer(BigInt::from(c)) * x)
            .fold(BigRational::zero(), |acc, v| acc + v)
    }

    /// True when `point` is nonnegative and satisfies every inequality.
    pub fn contains(&self, point: &[BigRational]) -> bool {
        point.len() == self.variable_count()
            && point.iter().all(|x| *x >= BigRational::zero())
            && (0..self.inequality_count()).all(|i| self.lhs(i, point) <= BigRational::one())
    }
}

/// Outer-bound region of the S x D X network: for every focus pair (u, v),
/// the messages sourced at u plus the messages destined to v, counting the
/// (v, u) message once, share at most one degree of freedom.
pub fn build_outer_region(sources: usize, destinations: usize) -> Result<DofRegion> {
    if sources < 1 || destinations < 1 {
        return Err(Error::InvalidParameter {
            name: "region size",
            reason: format!("needs S, D >= 1, got ({sources}, {destinations})"),
        });
    }
    let mut variables = Vec::with_capacity(sources * destinations);
    for dest in 0..destinations {
        for src in 0..sources {
            variables.push((dest, src));
        }
    }
    let mut inequalities = Vec::with_capacity(sources * destinations);
    for u in 0..sources {
        for v in 0..destinations {
            let row = variables
                .iter()
                .map(|&(dest, src)| i8::from(src == u || dest == v))
                .collect();
            inequalities.push(row);
        }
    }
    Ok(DofRegion {
        kind: RegionKind::XNetwork {
            sources,
            destinations,
        },
        variables,
        inequalities,
    })
}

/// Outer-bound region of the K-node full-duplex network: for every ordered
/// focus pair (p, q) of distinct nodes, the messages sourced at p plus the
/// messages destined to q, counting the (q, p) message once, share at most
/// one degree of freedom.
pub fn build_fd_region(nodes: usize) -> Result<DofRegion> {
    if nodes < 2 {
        return Err(Error::InvalidParameter {
            name: "region size",
            reason: format!("needs K >= 2, got {nodes}"),
        });
    }
    let mut variables = Vec::new();
    for dest in 0..nodes {
        for src in 0..nodes {
            if dest != src {
                variables.push((dest, src));
            }
        }
    }
    let mut inequalities = Vec::new();
    for p in 0..nodes {
        for q in 0..nodes {
            if p == q {
                continue;
            }
            let row = variables
                .iter()
                .map(|&(dest, src)| i8::from(src == p || dest == q))
                .collect();
            inequalities.push(row);
        }
    }
    Ok(DofRegion {
        kind: RegionKind::FullDuplex { nodes },
        variables,
        inequalities,
    })
}

/// Exact maximum of the total DoF over the region.
pub fn max_sum_dof(region: &DofRegion) -> BigRational {
    let n = region.variable_count();
    let a: Vec<Vec<BigRational>> = region
        .inequalities
        .iter()
        .map(|row| {
            row.iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect()
        })
        .collect();
    let b = vec![BigRational::one(); region.inequality_count()];
    let c = vec![BigRational::one(); n];
    // The region is bounded (0 is feasible, every variable has a +1
    // coefficient in some row), so the LP always has an optimum.
    maximize(&a, &b, &c)
        .expect("DoF region LP is bounded and feasible")
        .objective
}

/// Closed-form DoF expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formula {
    /// K-user interference channel: K/2.
    IcDof { users: usize },
    /// S x D X network: SD/(S+D-1).
    XDof { sources: usize, destinations: usize },
    /// K-node full-duplex network, achievable side: K(K-1)/(2K-2).
    FdLower { nodes: usize },
    /// K-node full-duplex network, outer bound: K(K-1)/(2K-3).
    FdUpper { nodes: usize },
    /// K nodes under half-duplex as a K/2 x K/2 X network: K^2/(4K-4).
    HalfDuplex { nodes: usize },
    /// K pairs through R full-duplex relays, direct links absent:
    /// KR/(K+R-1).
    ParallelRelay { pairs: usize, relays: usize },
}

/// Evaluate a closed-form DoF expression exactly.
pub fn formula(f: Formula) -> Result<BigRational> {
    let frac = |num: i128, den: i128| BigRational::new(BigInt::from(num), BigInt::from(den));
    let need = |ok: bool, name: &'static str, reason: String| {
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter { name, reason })
        }
    };
    match f {
        Formula::IcDof { users } => {
            need(users >= 2, "users", format!("K >= 2 required, got {users}"))?;
            Ok(frac(users as i128, 2))
        }
        Formula::XDof {
            sources,
            destinations,
        } => {
            need(
                sources >= 1 && destinations >= 1,
                "sources/destinations",
                format!("S, D >= 1 required, got ({sources}, {destinations})"),
            )?;
            let (s, d) = (sources as i128, destinations as i128);
            Ok(frac(s * d, s + d - 1))
        }
        Formula::FdLower { nodes } => {
            need(nodes >= 2, "nodes", format!("K >= 2 required, got {nodes}"))?;
            let k = nodes as i128;
            Ok(frac(k * (k - 1), 2 * k - 2))
        }
        Formula::FdUpper { nodes } => {
            need(nodes >= 2, "nodes", format!("K >= 2 required, got {nodes}"))?;
            let k = nodes as i128;
            Ok(frac(k * (k - 1), 2 * k - 3))
        }
        Formula::HalfDuplex { nodes } => {
            need(nodes >= 2, "nodes", format!("K >= 2 required, got {nodes}"))?;
            let k = nodes as i128;
            Ok(frac(k * k, 4 * k - 4))
        }
        Formula::ParallelRelay { pairs, relays } => {
            need(
                pairs >= 1 && relays >= 1,
                "pairs/relays",
                format!("K, R >= 1 required, got ({pairs}, {relays})"),
            )?;
            let (k, r) = (pairs as i128, relays as i128);
            Ok(frac(k * r, k + r - 1))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn degenerate_region_is_the_unit_interval() {
        let region = build_outer_region(1, 1).unwrap();
        assert_eq!(region.variable_count(), 1);
        assert_eq!(region.inequality_count(), 1);
        assert_eq!(max_sum_dof(&region), int(1));
    }

    #[test]
    fn two_by_two_region_maximum_is_four_thirds() {
        let region = build_outer_region(2, 2).unwrap();
        assert_eq!(region.inequality_count(), 4);
        assert_eq!(max_sum_dof(&region), ratio(4, 3));
        // The symmetric point meets every inequality with equality.
        let point = vec![ratio(1, 3); 4];
        for i in 0..4 {
            assert_eq!(region.lhs(i, &point), int(1));
        }
    }

    #[test]
    fn region_counts_are_forced_by_construction() {
        let region = build_outer_region(2, 3).unwrap();
        assert_eq!(region.variable_count(), 6);
        assert_eq!(region.inequality_count(), 6);
    }

    #[test]
    fn three_by_four_matches_the_closed_form_two() {
        let region = build_outer_region(3, 4).unwrap();
        assert_eq!(max_sum_dof(&region), int(2));
    }

    #[test]
    fn closed_form_agreement_on_the_grid() {
        for s in 1..=6usize {
            for d in 1..=6usize {
                let lp = max_sum_dof(&build_outer_region(s, d).unwrap());
                let cf = formula(Formula::XDof {
                    sources: s,
                    destinations: d,
                })
                .unwrap();
                assert_eq!(lp, cf, "mismatch at ({s}, {d})");
            }
        }
    }

    #[test]
    fn symmetric_point_is_feasible_and_tight() {
        for s in 1..=5usize {
            for d in 1..=5usize {
                let region = build_outer_region(s, d).unwrap();
                let x = ratio(1, (s + d - 1) as i64);
                let point = vec![x; s * d];
                assert!(region.contains(&point));
                for i in 0..region.inequality_count() {
                    assert_eq!(region.lhs(i, &point), int(1));
                }
            }
        }
    }

    #[test]
    fn fd_region_reproduces_the_upper_bound() {
        for k in 2..=6usize {
            let region = build_fd_region(k).unwrap();
            assert_eq!(region.variable_count(), k * (k - 1));
            assert_eq!(region.inequality_count(), k * (k - 1));
            let expect = formula(Formula::FdUpper { nodes: k }).unwrap();
            assert_eq!(max_sum_dof(&region), expect, "mismatch at K = {k}");
        }
    }

    #[test]
    fn formula_values_match_reported_numbers() {
        assert_eq!(formula(Formula::FdLower { nodes: 4 }).unwrap(), int(2));
        assert_eq!(
            formula(Formula::FdUpper { nodes: 4 }).unwrap(),
            ratio(12, 5)
        );
        assert_eq!(
            formula(Formula::HalfDuplex { nodes: 4 }).unwrap(),
            ratio(4, 3)
        );
        assert_eq!(
            formula(Formula::ParallelRelay {
                pairs: 3,
                relays: 1
            })
            .unwrap(),
            int(1)
        );
        assert_eq!(formula(Formula::IcDof { users: 5 }).unwrap(), ratio(5, 2));
    }

    #[test]
    fn sandwich_and_dominance_orderings() {
        for k in 2..=20usize {
            let lower = formula(Formula::FdLower { nodes: k }).unwrap();
            let upper = formula(Formula::FdUpper { nodes: k }).unwrap();
            let ic = formula(Formula::IcDof { users: k }).unwrap();
            assert!(lower <= upper);
            assert_eq!(lower, ic);
            if k >= 3 {
                assert!(lower < upper);
                let hd = formula(Formula::HalfDuplex { nodes: k }).unwrap();
                assert!(lower > hd, "full duplex must beat half duplex at K = {k}");
            }
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(build_outer_region(0, 3).is_err());
        assert!(build_fd_region(1).is_err());
        assert!(formula(Formula::IcDof { users: 1 }).is_err());
        assert!(formula(Formula::XDof {
            sources: 0,
            destinations: 1
        })
        .is_err());
    }
}
