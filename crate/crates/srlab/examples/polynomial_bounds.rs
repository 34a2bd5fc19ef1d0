//! Forward error of Horner evaluation of a degree-20 Chebyshev polynomial
//! against the worst-case and probabilistic bounds.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use srlab::bounds::BoundReport;
use srlab::chebyshev::chebyshev_z_coeffs;
use srlab::fp::{round_nearest, ExactValue, FloatFormat};
use srlab::horner::horner_eval;
use srlab::sr::{RngStream, SrMode};
use srlab::stats::coverage_fraction;

fn main() {
    let fmt = FloatFormat::binary32();
    let poly = chebyshev_z_coeffs(20).unwrap();
    let x = round_nearest(&ExactValue::from_ratio(24, 26).unwrap(), &fmt).unwrap();
    let exact = poly.eval_exact(&BigRational::from_float(x).unwrap());
    let report = BoundReport::new(&poly, x, fmt.unit_roundoff(), 0.5, false).unwrap();

    println!("T_20 at x = fl(24/26) = {x}");
    println!("  exact value      {:.12e}", exact.to_f64().unwrap());
    println!("  cond1            {:.6e}", report.cond1);
    println!(
        "  deterministic    {:.6e} (gamma_2n = {:.6e})",
        report.deterministic, report.gamma_2n
    );
    println!(
        "  probabilistic    {:.6e} (lambda = {})",
        report.probabilistic, report.lambda
    );

    let samples = 1000;
    let errors: Vec<f64> = (0..samples)
        .map(|s| {
            let mut rng = RngStream::new(7, s);
            let v = horner_eval(&poly, x, &fmt, SrMode::Nearness, &mut rng).unwrap();
            ((BigRational::from_float(v).unwrap() - &exact) / &exact)
                .abs()
                .to_f64()
                .unwrap()
        })
        .collect();
    let worst = errors.iter().cloned().fold(0.0, f64::max);
    println!("\n{samples} stochastic-nearness evaluations:");
    println!("  worst relative error      {worst:.6e}");
    println!(
        "  under probabilistic bound {:.1}%",
        100.0 * coverage_fraction(&errors, report.probabilistic)
    );
    println!(
        "  under deterministic bound {:.1}%",
        100.0 * coverage_fraction(&errors, report.deterministic)
    );
}
