//! Per-step bias of accumulating fl(1/N) twenty times in binary32.
//!
//! Prints the pre-rounding partial sums, their fractional grid position
//! theta, the per-step up-or-down bias epsilon*(1/2 - theta), and the grid
//! gap epsilon. Within each binade theta is constant after the first entry.

use srlab::fp::FloatFormat;
use srlab::integrate::{bias_table, predicted_total_bias, theta_of_interval};

fn main() {
    let fmt = FloatFormat::binary32();
    let n = 20;
    println!("accumulating fl(1/{n}) in binary32\n");
    println!(
        "{:>3} {:>12} {:>8} {:>14} {:>13}",
        "k", "s_k", "theta", "bias", "epsilon"
    );
    for row in bias_table(n, &fmt).unwrap() {
        println!(
            "{:>3} {:>12.9} {:>8} {:>14.6e} {:>13.6e}",
            row.k, row.partial_sum, row.theta, row.predicted_bias, row.epsilon
        );
    }
    let h = 13421773.0 * 2f64.powi(-28);
    println!("\ninterval theta for h = fl(1/20):");
    for e in [-3, -2, -1] {
        println!(
            "  binade [2^{e}, 2^{}): theta = {}",
            e + 1,
            theta_of_interval(h, e, &fmt)
        );
    }
    println!(
        "\nfinal-binade per-step bias for N = {n}: {:e}",
        predicted_total_bias(n, &fmt).unwrap()
    );
}
