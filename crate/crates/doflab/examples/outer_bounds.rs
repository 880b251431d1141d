//! Build DoF outer-bound regions, maximize them exactly, and compare
//! against the closed forms.
//!
//! ```bash
//! cargo run --example outer_bounds
//! ```

use doflab::bounds::{build_fd_region, build_outer_region, formula, max_sum_dof, Formula};
use num_traits::ToPrimitive;

fn main() {
    println!("S x D X-network outer bound: max sum DoF vs SD/(S+D-1)\n");
    println!(
        "{:>3} {:>3} {:>12} {:>12} {:>8}",
        "S", "D", "exact LP", "closed", "match"
    );
    for s in 1..=4usize {
        for d in 1..=4usize {
            let region = build_outer_region(s, d).unwrap();
            let lp = max_sum_dof(&region);
            let cf = formula(Formula::XDof {
                sources: s,
                destinations: d,
            })
            .unwrap();
            println!(
                "{s:>3} {d:>3} {:>12} {:>12} {:>8}",
                lp.to_string(),
                cf.to_string(),
                lp == cf
            );
        }
    }

    println!("\nK-node full-duplex network: achievable vs outer bound vs half duplex\n");
    println!(
        "{:>3} {:>10} {:>10} {:>12} {:>12}",
        "K", "fd_lower", "fd_upper", "region max", "half_duplex"
    );
    for k in 2..=6usize {
        let lower = formula(Formula::FdLower { nodes: k }).unwrap();
        let upper = formula(Formula::FdUpper { nodes: k }).unwrap();
        let region = max_sum_dof(&build_fd_region(k).unwrap());
        let hd = formula(Formula::HalfDuplex { nodes: k }).unwrap();
        println!(
            "{k:>3} {:>10} {:>10} {:>12} {:>12}",
            lower.to_string(),
            upper.to_string(),
            region.to_string(),
            hd.to_string()
        );
        assert_eq!(region, upper);
    }

    let pr = formula(Formula::ParallelRelay {
        pairs: 4,
        relays: 16,
    })
    .unwrap();
    println!(
        "\nParallel relay with 4 pairs and 16 relays (direct links absent): {} ≈ {:.3} DoF",
        pr,
        pr.to_f64().unwrap()
    );
}
