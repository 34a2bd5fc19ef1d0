//! Experiment runners behind the CLI: CSV-producing sweeps plus the
//! self-check suites. Sample generation fans out across a thread pool with
//! one random stream per sample, so output bytes are identical for any
//! worker count.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;

use crate::bounds::BoundReport;
use crate::chebyshev::{chebyshev_z_coeffs, Polynomial};
use crate::error::{Error, Result};
use crate::fp::{binade_of, neighborhood, round_nearest, ExactValue, FloatFormat};
use crate::horner::horner_eval;
use crate::integrate::{
    bias_table_with, integrate_constant, predicted_total_bias, theta_of_interval, TableRounding,
};
use crate::sr::{up_probability, RngStream, SrMode};
use crate::stats::{summarize, unbiasedness_test, SampleSet};

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Shared run settings: the target format, the master seed, and the worker
/// count (0 picks the library default).
#[derive(Debug, Clone, Copy)]
pub struct RunContext {
    pub format: FloatFormat,
    pub seed: u64,
    pub threads: usize,
}

impl RunContext {
    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))
    }

    fn format_label(&self) -> String {
        let f = &self.format;
        if *f == FloatFormat::binary32() {
            "binary32".to_string()
        } else {
            format!("p{}e[{},{}]", f.precision(), f.emin(), f.emax())
        }
    }
}

/// C99-style hex-float rendering for bit-exact CSV columns.
pub fn hex_f64(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0x0p+0".into()
        } else {
            "0x0p+0".into()
        };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp_raw = ((bits >> 52) & 0x7ff) as i64;
    let mant = bits & ((1u64 << 52) - 1);
    let (lead, exp) = if exp_raw == 0 {
        (0u64, -1022i64)
    } else {
        (1u64, exp_raw - 1023)
    };
    if mant == 0 {
        return format!("{sign}0x{lead}p{exp:+}");
    }
    let mut hex = format!("{mant:013x}");
    while hex.len() > 1 && hex.ends_with('0') {
        hex.pop();
    }
    format!("{sign}0x{lead}.{hex}p{exp:+}")
}

fn provenance(command: &str, config: &str, ctx: &RunContext) -> String {
    format!(
        "# srlab {VERSION} | {command} | {config} format={} | seed={}\n",
        ctx.format_label(),
        ctx.seed
    )
}

/// Relative forward error |computed - exact| / |exact| with the exact value
/// carried as a rational.
fn relative_error(computed: f64, exact: &BigRational) -> f64 {
    let c = BigRational::from_float(computed).expect("format value is dyadic");
    ((c - exact) / exact)
        .abs()
        .to_f64()
        .expect("relative error fits in f64")
}

/// `bias-table` command: per-step table rows for `k = 2..N-1`.
pub fn run_bias_table(n: u32, trajectory: TableRounding, ctx: &RunContext) -> Result<String> {
    let rows = bias_table_with(n, &ctx.format, trajectory)?;
    let mut out = provenance("bias-table", &format!("n={n}"), ctx);
    out.push_str(
        "k,s_k,s_k_hex,theta,theta_hex,predicted_bias,predicted_bias_hex,epsilon,epsilon_hex\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.k,
            r.partial_sum,
            hex_f64(r.partial_sum),
            r.theta,
            hex_f64(r.theta),
            r.predicted_bias,
            hex_f64(r.predicted_bias),
            r.epsilon,
            hex_f64(r.epsilon)
        ));
    }
    Ok(out)
}

/// `integrate` command: one row per sample with its final error and the
/// closed-form bias prediction; deterministic rounding contributes a single
/// row per N.
pub fn run_integrate(
    n_list: &[u32],
    samples: u64,
    modes: &[SrMode],
    ctx: &RunContext,
) -> Result<String> {
    if samples < 1 {
        return Err(Error::Config("need at least one sample".into()));
    }
    let pool = ctx.pool()?;
    let mut out = provenance(
        "integrate",
        &format!(
            "n-list={n_list:?} samples={samples} modes={}",
            mode_list(modes)
        ),
        ctx,
    );
    out.push_str(
        "n,mode,sample_id,result,result_hex,error,error_hex,predicted_bias,predicted_bias_hex\n",
    );
    for (ni, &n) in n_list.iter().enumerate() {
        // a single step is fl(1/1) = 1 exactly
        let predicted = if n >= 2 {
            predicted_total_bias(n, &ctx.format)?
        } else {
            0.0
        };
        for (mi, &mode) in modes.iter().enumerate() {
            let count = if mode == SrMode::Nearest { 1 } else { samples };
            let base = ((ni * modes.len() + mi) as u64) << 32;
            let fmt = ctx.format;
            let seed = ctx.seed;
            let results: Result<Vec<f64>> = pool.install(|| {
                (0..count)
                    .into_par_iter()
                    .map(|s| {
                        let mut rng = RngStream::new(seed, base | s);
                        Ok(integrate_constant(n, &fmt, mode, &mut rng)?.result)
                    })
                    .collect()
            });
            for (s, result) in results?.into_iter().enumerate() {
                let error = result - 1.0;
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    n,
                    mode,
                    s,
                    result,
                    hex_f64(result),
                    error,
                    hex_f64(error),
                    predicted,
                    hex_f64(predicted)
                ));
            }
        }
    }
    Ok(out)
}

fn mode_list(modes: &[SrMode]) -> String {
    modes
        .iter()
        .map(|m| m.label())
        .collect::<Vec<_>>()
        .join("+")
}

/// Evaluation grid: `count` uniform rational points on `[start, end]`,
/// each rounded to the nearest format value.
pub fn uniform_grid(
    start: (i64, i64),
    end: (i64, i64),
    count: u32,
    fmt: &FloatFormat,
) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(Error::Config("grid needs at least two points".into()));
    }
    let a = BigRational::new(start.0.into(), start.1.into());
    let b = BigRational::new(end.0.into(), end.1.into());
    let step = (&b - &a) / BigRational::from_integer(((count - 1) as i64).into());
    (0..count)
        .map(|i| {
            let xr = &a + &step * BigRational::from_integer((i as i64).into());
            let (num, den) = (
                xr.numer()
                    .to_i64()
                    .ok_or_else(|| Error::Config("grid point numerator overflows i64".into()))?,
                xr.denom()
                    .to_i64()
                    .ok_or_else(|| Error::Config("grid point denominator overflows i64".into()))?,
            );
            round_nearest(&ExactValue::from_ratio(num, den)?, fmt)
        })
        .collect()
}

struct SweepPoint {
    x: f64,
    report: BoundReport,
    exact: BigRational,
}

fn sweep_point(poly: &Polynomial, x: f64, u: f64, lambda: f64) -> Result<SweepPoint> {
    let xr = BigRational::from_float(x).ok_or(Error::NotRepresentable(x))?;
    let exact = poly.eval_exact(&xr);
    let report = BoundReport::new(poly, x, u, lambda, false)?;
    Ok(SweepPoint { x, report, exact })
}

/// `horner-x-sweep` command: bounds and sampled errors across a grid of
/// evaluation points for one Chebyshev polynomial.
#[allow(clippy::too_many_arguments)]
pub fn run_horner_x_sweep(
    degree: u32,
    grid: &[f64],
    lambda: f64,
    samples: u64,
    modes: &[SrMode],
    ctx: &RunContext,
) -> Result<String> {
    let poly = chebyshev_z_coeffs(degree)?;
    let u = ctx.format.unit_roundoff();
    let pool = ctx.pool()?;
    let mut out = provenance(
        "horner-x-sweep",
        &format!(
            "poly=chebyshev:{degree} grid_len={} lambda={lambda} samples={samples} modes={}",
            grid.len(),
            mode_list(modes)
        ),
        ctx,
    );
    out.push_str(
        "x,x_hex,cond1,det_bound,prob_bound,mode,kind,sample_id,rel_error,rel_error_hex\n",
    );
    for (gi, &x) in grid.iter().enumerate() {
        let point = sweep_point(&poly, x, u, lambda)?;
        let head = format!(
            "{},{},{},{},{}",
            point.x,
            hex_f64(point.x),
            point.report.cond1,
            point.report.deterministic,
            point.report.probabilistic
        );
        for (mi, &mode) in modes.iter().enumerate() {
            if mode == SrMode::Nearest {
                let mut rng = RngStream::new(ctx.seed, u64::MAX); // never draws
                let v = horner_eval(&poly, x, &ctx.format, mode, &mut rng)?;
                let err = relative_error(v, &point.exact);
                out.push_str(&format!("{head},rn,single,0,{},{}\n", err, hex_f64(err)));
                continue;
            }
            let base = (((gi * modes.len() + mi) as u64) << 32) | (1u64 << 31);
            let fmt = ctx.format;
            let seed = ctx.seed;
            let values: Result<Vec<f64>> = pool.install(|| {
                (0..samples)
                    .into_par_iter()
                    .map(|s| {
                        let mut rng = RngStream::new(seed, base | s);
                        horner_eval(&poly, x, &fmt, mode, &mut rng)
                    })
                    .collect()
            });
            let values = values?;
            let mut err_sum = 0.0;
            let mut val_sum = 0.0;
            for (s, v) in values.iter().enumerate() {
                let err = relative_error(*v, &point.exact);
                err_sum += err;
                val_sum += v;
                out.push_str(&format!(
                    "{head},{mode},sample,{s},{},{}\n",
                    err,
                    hex_f64(err)
                ));
            }
            // the reference leaves open whether "average" means the mean of
            // the per-sample errors or the error of the mean value, so emit
            // both aggregates
            let n = values.len() as f64;
            let mean_err = err_sum / n;
            let err_of_mean = {
                let mean = val_sum / n;
                let m = BigRational::from_float(mean).expect("finite");
                ((m - &point.exact) / &point.exact)
                    .abs()
                    .to_f64()
                    .expect("fits f64")
            };
            out.push_str(&format!(
                "{head},{mode},mean_of_errors,,{},{}\n",
                mean_err,
                hex_f64(mean_err)
            ));
            out.push_str(&format!(
                "{head},{mode},error_of_mean,,{},{}\n",
                err_of_mean,
                hex_f64(err_of_mean)
            ));
        }
    }
    Ok(out)
}

/// `horner-n-sweep` command: condition-normalized bounds and errors at one
/// evaluation point across polynomial degrees.
pub fn run_horner_n_sweep(
    x_ratio: (i64, i64),
    degrees: &[u32],
    lambda: f64,
    samples: u64,
    modes: &[SrMode],
    ctx: &RunContext,
) -> Result<String> {
    let x = round_nearest(&ExactValue::from_ratio(x_ratio.0, x_ratio.1)?, &ctx.format)?;
    let u = ctx.format.unit_roundoff();
    let pool = ctx.pool()?;
    let mut out = provenance(
        "horner-n-sweep",
        &format!(
            "x={}/{} degrees={degrees:?} lambda={lambda} samples={samples} modes={}",
            x_ratio.0,
            x_ratio.1,
            mode_list(modes)
        ),
        ctx,
    );
    out.push_str(
        "degree,horner_n,cond1,det_over_cond,prob_over_cond,mode,kind,sample_id,err_over_cond,err_over_cond_hex\n",
    );
    for (di, &deg) in degrees.iter().enumerate() {
        let poly = chebyshev_z_coeffs(deg)?;
        let point = sweep_point(&poly, x, u, lambda)?;
        let cond = point.report.cond1;
        let head = format!(
            "{deg},{},{cond},{},{}",
            poly.degree(),
            point.report.deterministic / cond,
            point.report.probabilistic / cond
        );
        for (mi, &mode) in modes.iter().enumerate() {
            if mode == SrMode::Nearest {
                let mut rng = RngStream::new(ctx.seed, u64::MAX);
                let v = horner_eval(&poly, x, &ctx.format, mode, &mut rng)?;
                let e = relative_error(v, &point.exact) / cond;
                out.push_str(&format!("{head},rn,single,0,{},{}\n", e, hex_f64(e)));
                continue;
            }
            let base = (((di * modes.len() + mi) as u64) << 32) | (1u64 << 30);
            let fmt = ctx.format;
            let seed = ctx.seed;
            let values: Result<Vec<f64>> = pool.install(|| {
                (0..samples)
                    .into_par_iter()
                    .map(|s| {
                        let mut rng = RngStream::new(seed, base | s);
                        horner_eval(&poly, x, &fmt, mode, &mut rng)
                    })
                    .collect()
            });
            for (s, v) in values?.into_iter().enumerate() {
                let e = relative_error(v, &point.exact) / cond;
                out.push_str(&format!("{head},{mode},sample,{s},{},{}\n", e, hex_f64(e)));
            }
        }
    }
    Ok(out)
}

/// Outcome of one self-check suite.
#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

pub const ALL_SUITES: [&str; 5] = [
    "lemma1",
    "expectation",
    "theta-constancy",
    "remark",
    "unbiasedness",
];

/// `verify` command: run the named self-check suites and render a report.
/// `flip_threshold` inverts the stochastic rounding law inside the sampling
/// suites; it exists to prove the harness can detect a broken engine.
pub fn run_verify(
    suites: &[String],
    trials: u64,
    flip_threshold: bool,
    ctx: &RunContext,
) -> Result<Vec<SuiteOutcome>> {
    let mut outcomes = Vec::new();
    for suite in suites {
        let outcome = match suite.as_str() {
            "lemma1" => suite_lemma1(trials, ctx),
            "expectation" => suite_expectation(flip_threshold),
            "theta-constancy" => suite_theta_constancy(ctx),
            "remark" => suite_remark(),
            "unbiasedness" => suite_unbiasedness(flip_threshold, ctx),
            other => return Err(Error::Config(format!("unknown suite '{other}'"))),
        }?;
        outcomes.push(outcome);
    }
    Ok(outcomes)
}

pub fn render_verify(outcomes: &[SuiteOutcome]) -> String {
    let mut out = String::new();
    for o in outcomes {
        out.push_str(&format!(
            "suite {}: {} ({})\n",
            o.name,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        ));
    }
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    out.push_str(&format!("{} suites, {} failed\n", outcomes.len(), failed));
    out
}

/// Scaling a non-representable value into its binade turns the lower
/// neighbor into the integer part, exactly.
fn suite_lemma1(trials: u64, ctx: &RunContext) -> Result<SuiteOutcome> {
    let fmt = ctx.format;
    let p = fmt.precision();
    let mut rng = RngStream::new(ctx.seed, 0xace);
    let mut failures = 0u64;
    for _ in 0..trials {
        let m = (1u64 << (p - 1)) + (rng.draw_unit() * (1u64 << (p - 1)) as f64) as u64;
        let e = fmt.emin() + 2 + (rng.draw_unit() * ((fmt.emax() - fmt.emin() - 2) as f64)) as i32;
        // off-grid fraction with 20 dyadic bits
        let j = 1 + (rng.draw_unit() * ((1u64 << 20) - 2) as f64) as u64;
        let frac = j as f64 / (1u64 << 20) as f64;
        let ulp = fmt.ulp_at(e);
        let x = ExactValue::product((m as f64) + frac, ulp);
        let nb = neighborhood(&x, &fmt)?;
        let scale = 1.0 / ulp;
        let lhs = nb.down * scale;
        let rhs = ((m as f64) + frac).floor();
        if lhs != rhs {
            failures += 1;
        }
    }
    Ok(SuiteOutcome {
        name: "lemma1",
        pass: failures == 0,
        detail: format!("{trials} trials, {failures} failures, seed {}", ctx.seed),
    })
}

/// Exhaustive analytic two-point expectations at toy precision 4.
fn suite_expectation(flip: bool) -> Result<SuiteOutcome> {
    let fmt = FloatFormat::toy(4)?;
    let mut checked = 0u32;
    let mut failures = 0u32;
    for j in 0..128u32 {
        let x = 1.0 + j as f64 / 128.0;
        let ev = ExactValue::from_f64(x);
        let nb = neighborhood(&ev, &fmt)?;
        if nb.theta == 0.0 {
            continue;
        }
        checked += 1;
        let mut p_up = up_probability(&ev, &fmt, SrMode::Nearness)?;
        if flip {
            p_up = 1.0 - p_up;
        }
        let nearness_mean = nb.down * (1.0 - p_up) + nb.up * p_up;
        let updown_mean = nb.midpoint();
        if nearness_mean != x || updown_mean != nb.midpoint() {
            failures += 1;
        }
    }
    Ok(SuiteOutcome {
        name: "expectation",
        pass: failures == 0,
        detail: format!("{checked} off-grid points in [1,2), {failures} failures"),
    })
}

/// Within every binade the fractional position of the pre-rounding partial
/// sums is constant after the first entry.
fn suite_theta_constancy(ctx: &RunContext) -> Result<SuiteOutcome> {
    let fmt = ctx.format;
    let mut rng = RngStream::new(ctx.seed, 0xbeef);
    let mut ns = vec![20u32];
    while ns.len() < 51 {
        let n = 2 + (rng.draw_unit() * 9998.0) as u32;
        ns.push(n);
    }
    let mut checked = 0u64;
    for &n in &ns {
        let h = round_nearest(&ExactValue::from_ratio(1, n as i64)?, &fmt)?;
        let rows = bias_table_with(n, &fmt, TableRounding::Upward)?;
        let mut prev_binade = i32::MIN;
        for row in rows {
            let e = binade_of(row.partial_sum);
            if e == prev_binade {
                checked += 1;
                if row.theta != theta_of_interval(h, e, &fmt) {
                    return Ok(SuiteOutcome {
                        name: "theta-constancy",
                        pass: false,
                        detail: format!("n={n} k={} binade {e}", row.k),
                    });
                }
            }
            prev_binade = e;
        }
    }
    Ok(SuiteOutcome {
        name: "theta-constancy",
        pass: true,
        detail: format!("{} in-binade rows across {} values of N", checked, ns.len()),
    })
}

/// First-order window of the probabilistic factor against `2 sqrt(n) u`.
fn suite_remark() -> Result<SuiteOutcome> {
    let u = 2f64.powi(-23);
    let mut detail = String::new();
    let mut pass = true;
    for n in [10u32, 100, 1000] {
        let lhs = ((u * crate::bounds::gamma(4 * n, u)).sqrt() / (2.0 * (n as f64).sqrt() * u)
            - 1.0)
            .abs();
        let tol = 10.0 * n as f64 * u;
        if lhs > tol {
            pass = false;
        }
        detail.push_str(&format!("n={n}: {lhs:.3e}<={tol:.3e} "));
    }
    Ok(SuiteOutcome {
        name: "remark",
        pass,
        detail: detail.trim_end().to_string(),
    })
}

/// Sampled accumulation stays centered on 1 under the unbiased mode.
fn suite_unbiasedness(flip: bool, ctx: &RunContext) -> Result<SuiteOutcome> {
    let fmt = ctx.format;
    let samples = 3000u64;
    let n = 20u32;
    let values: Result<Vec<f64>> = (0..samples)
        .map(|s| {
            let mut rng = RngStream::new(ctx.seed, (u64_marker() << 32) | s);
            if flip {
                integrate_flipped(n, &fmt, &mut rng)
            } else {
                Ok(integrate_constant(n, &fmt, SrMode::Nearness, &mut rng)?.result)
            }
        })
        .collect();
    let set = SampleSet {
        values: values?,
        exact_reference: 1.0,
        master_seed: ctx.seed,
        mode: SrMode::Nearness,
    };
    let report = unbiasedness_test(&set, 4.0)?;
    Ok(SuiteOutcome {
        name: "unbiasedness",
        pass: report.pass,
        detail: report.to_string(),
    })
}

fn u64_marker() -> u64 {
    0xf1e1d
}

/// Accumulation with the rounding law inverted: rounds up when the draw is
/// at or above theta. Used only to demonstrate the harness detects a broken
/// engine.
fn integrate_flipped(n: u32, fmt: &FloatFormat, rng: &mut RngStream) -> Result<f64> {
    let h_exact = ExactValue::from_ratio(1, n as i64)?;
    let h = flipped_round(&h_exact, fmt, rng)?;
    let mut s = h;
    for _ in 1..n {
        s = flipped_round(&ExactValue::sum(s, h), fmt, rng)?;
    }
    Ok(s)
}

fn flipped_round(x: &ExactValue, fmt: &FloatFormat, rng: &mut RngStream) -> Result<f64> {
    let nb = neighborhood(x, fmt)?;
    if nb.theta == 0.0 {
        return Ok(nb.down);
    }
    Ok(if rng.draw_unit() >= nb.theta {
        nb.up
    } else {
        nb.down
    })
}

/// Collect per-sample integration results in deterministic order.
pub fn integration_samples(
    n: u32,
    samples: u64,
    mode: SrMode,
    stream_base: u64,
    ctx: &RunContext,
) -> Result<SampleSet> {
    let pool = ctx.pool()?;
    let fmt = ctx.format;
    let seed = ctx.seed;
    let values: Result<Vec<f64>> = pool.install(|| {
        (0..samples)
            .into_par_iter()
            .map(|s| {
                let mut rng = RngStream::new(seed, stream_base | s);
                Ok(integrate_constant(n, &fmt, mode, &mut rng)?.result)
            })
            .collect()
    });
    Ok(SampleSet {
        values: values?,
        exact_reference: 1.0,
        master_seed: seed,
        mode,
    })
}

/// Summary line helper used by examples and the acceptance suite.
pub fn summarize_integration(
    n: u32,
    samples: u64,
    mode: SrMode,
    stream_base: u64,
    ctx: &RunContext,
) -> Result<(SampleSet, crate::stats::SummaryStats)> {
    let set = integration_samples(n, samples, mode, stream_base, ctx)?;
    let stats = summarize(&set)?;
    Ok((set, stats))
}
