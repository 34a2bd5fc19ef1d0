//! Accumulated error of constant rectangle integration under the three
//! rounding modes: nearest is deterministic and biased, up-or-down is
//! biased toward midpoints, nearness is centered on the exact value.

use srlab::experiments::{summarize_integration, RunContext};
use srlab::fp::FloatFormat;
use srlab::integrate::{integrate_constant, predicted_total_bias};
use srlab::sr::{RngStream, SrMode};

fn main() {
    let ctx = RunContext {
        format: FloatFormat::binary32(),
        seed: 42,
        threads: 0,
    };
    let samples = 10_000;
    for n in [20u32, 100, 1000] {
        println!("N = {n} ({samples} samples per stochastic mode)");
        let mut rng = RngStream::new(ctx.seed, 0);
        let rn = integrate_constant(n, &ctx.format, SrMode::Nearest, &mut rng).unwrap();
        println!("  nearest      result - 1 = {:+e}", rn.result - 1.0);
        for (mode, base) in [(SrMode::Nearness, 1u64 << 40), (SrMode::UpOrDown, 2 << 40)] {
            let (_, stats) = summarize_integration(n, samples, mode, base, &ctx).unwrap();
            println!(
                "  {:12} mean - 1 = {:+e} (se {:e})",
                mode.label(),
                stats.empirical_bias,
                stats.standard_error
            );
        }
        println!(
            "  final-binade per-step bias: {:+e}\n",
            predicted_total_bias(n, &ctx.format).unwrap()
        );
    }
}
