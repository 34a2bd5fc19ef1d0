//! Condition-normalized bounds and errors as the polynomial degree grows:
//! the worst-case bound scales like n while the probabilistic one scales
//! like sqrt(n).

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use srlab::bounds::BoundReport;
use srlab::chebyshev::chebyshev_z_coeffs;
use srlab::fp::{round_nearest, ExactValue, FloatFormat};
use srlab::horner::horner_eval;
use srlab::sr::{RngStream, SrMode};

fn main() {
    let fmt = FloatFormat::binary32();
    let x = round_nearest(&ExactValue::from_ratio(24, 26).unwrap(), &fmt).unwrap();
    println!(
        "{:>4} {:>12} {:>12} {:>12} {:>8}",
        "deg", "det/cond", "prob/cond", "worst err/cond", "ratio"
    );
    // 36 is the widest even degree whose integer coefficients are all
    // exactly representable in binary32; 38 and up are refused, not rounded
    for degree in (2..=36).step_by(2) {
        let poly = chebyshev_z_coeffs(degree).unwrap();
        let report = BoundReport::new(&poly, x, fmt.unit_roundoff(), 0.5, false).unwrap();
        let exact = poly.eval_exact(&BigRational::from_float(x).unwrap());
        let worst = (0..30u64)
            .map(|s| {
                let mut rng = RngStream::new(1234, (degree as u64) << 32 | s);
                let v = horner_eval(&poly, x, &fmt, SrMode::Nearness, &mut rng).unwrap();
                ((BigRational::from_float(v).unwrap() - &exact) / &exact)
                    .abs()
                    .to_f64()
                    .unwrap()
            })
            .fold(0.0, f64::max);
        let det = report.deterministic / report.cond1;
        let prob = report.probabilistic / report.cond1;
        println!(
            "{degree:>4} {det:>12.3e} {prob:>12.3e} {:>12.3e} {:>8.2}",
            worst / report.cond1,
            det / prob
        );
    }
    println!("\nratio = deterministic/probabilistic; it grows like sqrt(n).");
    let too_wide = chebyshev_z_coeffs(40).unwrap();
    println!(
        "degree 40 in binary32: {}",
        too_wide.coeffs_as_format(&fmt).unwrap_err()
    );
}
