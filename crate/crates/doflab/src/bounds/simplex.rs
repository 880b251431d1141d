//! Dense simplex over exact rationals.
//!
//! Solves `maximize c·x subject to A x <= b, x >= 0` with `b >= 0`, so the
//! all-slack basis is feasible and no phase-one is needed. Bland's rule
//! guarantees termination; arithmetic is exact, so the reported optimum is
//! the true rational optimum. Problem sizes here are tiny (tens of
//! variables), which is exactly the regime where a dense rational tableau
//! is the right tool.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact optimum of a small LP.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub objective: BigRational,
    pub point: Vec<BigRational>,
}

/// Maximize `c·x` subject to `a x <= b`, `x >= 0`.
///
/// Requires every entry of `b` to be nonnegative and the feasible region to
/// be bounded in the direction of `c`; both hold for the DoF regions built
/// in this crate. Panics on dimension mismatch; returns `None` if the
/// objective is unbounded (which would indicate a malformed region).
pub fn maximize(
    a: &[Vec<BigRational>],
    b: &[BigRational],
    c: &[BigRational],
) -> Option<LpSolution> {
    let m = a.len();
    let n = c.len();
    assert_eq!(b.len(), m, "rhs length must match constraint count");
    for row in a {
        assert_eq!(row.len(), n, "constraint width must match variable count");
    }
    assert!(
        b.iter().all(|v| !v.is_negative()),
        "rhs must be nonnegative"
    );

    // Tableau: columns 0..n structural, n..n+m slack, last column rhs.
    let width = n + m + 1;
    let mut tab: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![BigRational::zero(); width];
        row[..n].clone_from_slice(&a[i]);
        row[n + i] = BigRational::one();
        row[width - 1] = b[i].clone();
        tab.push(row);
    }
    // Reduced-cost row r_j = c_j - z_j; slack basis gives r_j = c_j.
    let mut reduced = vec![BigRational::zero(); width];
    reduced[..n].clone_from_slice(c);
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Bland: entering = smallest column with positive reduced cost.
    while let Some(enter) = (0..n + m).find(|&j| reduced[j].is_positive()) {
        // Ratio test; ties broken by smallest basic variable index.
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..m {
            if tab[i][enter].is_positive() {
                let ratio = &tab[i][width - 1] / &tab[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (pivot_row, _) = leave?;

        // Pivot.
        let pivot = tab[pivot_row][enter].clone();
        for v in tab[pivot_row].iter_mut() {
            *v /= &pivot;
        }
        let prow = tab[pivot_row].clone();
        for (i, row) in tab.iter_mut().enumerate() {
            if i != pivot_row && !row[enter].is_zero() {
                let factor = row[enter].clone();
                for (dst, src) in row.iter_mut().zip(&prow) {
                    *dst -= &factor * src;
                }
            }
        }
        if !reduced[enter].is_zero() {
            let factor = reduced[enter].clone();
            for (dst, src) in reduced.iter_mut().zip(&prow) {
                *dst -= &factor * src;
            }
        }
        basis[pivot_row] = enter;
    }

    let mut point = vec![BigRational::zero(); n];
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            point[var] = tab[i][width - 1].clone();
        }
    }
    let objective = point
        .iter()
        .zip(c)
        .map(|(x, cj)| x * cj)
        .fold(BigRational::zero(), |acc, v| acc + v);
    Some(LpSolution { objective, point })
}

/// Convenience: `n / d` as an exact rational.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn box_corner() {
        // max x + y st x <= 1, y <= 1.
        let sol = maximize(
            &[vec![r(1), r(0)], vec![r(0), r(1)]],
            &[r(1), r(1)],
            &[r(1), r(1)],
        )
        .unwrap();
        assert_eq!(sol.objective, r(2));
        assert_eq!(sol.point, vec![r(1), r(1)]);
    }

    #[test]
    fn fractional_optimum() {
        // max x + y st 2x + y <= 2, x + 2y <= 2 -> optimum 4/3 at (2/3, 2/3).
        let sol = maximize(
            &[vec![r(2), r(1)], vec![r(1), r(2)]],
            &[r(2), r(2)],
            &[r(1), r(1)],
        )
        .unwrap();
        assert_eq!(sol.objective, ratio(4, 3));
        assert_eq!(sol.point, vec![ratio(2, 3), ratio(2, 3)]);
    }

    #[test]
    fn degenerate_constraints_terminate() {
        // Redundant rows and a zero row must not cycle.
        let sol = maximize(
            &[
                vec![r(1), r(1)],
                vec![r(1), r(1)],
                vec![r(0), r(0)],
                vec![r(1), r(0)],
            ],
            &[r(1), r(1), r(0), r(1)],
            &[r(1), r(1)],
        )
        .unwrap();
        assert_eq!(sol.objective, r(1));
    }

    #[test]
    fn unbounded_reports_none() {
        // max x with no binding constraint on x.
        let sol = maximize(&[vec![r(0), r(1)]], &[r(1)], &[r(1), r(0)]);
        assert!(sol.is_none());
    }

    #[test]
    fn zero_objective_is_fine() {
        let sol = maximize(&[vec![r(1)]], &[r(5)], &[r(0)]).unwrap();
        assert_eq!(sol.objective, r(0));
    }
}
