//! Sweep SNR, compute zero-forcing sum rates, and fit the capacity
//! pre-log. The fitted slope estimates the DoF achieved by the alignment
//! design and converges to K(K-1)n^Γ / μ_n.
//!
//! ```bash
//! cargo run --example snr_sweep
//! ```

use doflab::alignment::achieved_dof;
use doflab::ratesim::{dof_slope, AlignmentRun, RateQuery};
use num_traits::ToPrimitive;

fn main() {
    for (k, n) in [(3usize, 1u32), (3, 3)] {
        let run = AlignmentRun::new(k, n);
        let query = RateQuery::from_range(40.0, 70.0, 10.0, 10, 1).unwrap();
        let report = dof_slope(&run, &query).unwrap();
        let target = achieved_dof(k, n).unwrap();

        println!(
            "K = {k}, n = {n} (mu = {}, 10 trials):",
            doflab::alignment::extension_length(k, n).unwrap()
        );
        println!("{:>8} {:>14}", "SNR dB", "sum rate");
        for (db, rate) in report.snr_db.iter().zip(&report.sum_rate) {
            println!("{db:>8} {rate:>14.4}");
        }
        println!(
            "fitted slope {:.4} vs achieved DoF {} ({:.4}); fit residual {:.2e}",
            report.slope,
            target,
            target.to_f64().unwrap(),
            report.fit_residual
        );
        println!(
            "per-stream SINR at {} dB: min {:.1} dB, mean {:.1} dB, max {:.1} dB\n",
            report.snr_db.last().unwrap(),
            report.stream_sinr.min_db,
            report.stream_sinr.mean_db,
            report.stream_sinr.max_db
        );
    }
}
