//! Fixed-step rectangle integration of the constant function 1 on [0, 1]
//! under a selectable rounding mode, and the per-step bias table of the
//! accumulated partial sums.

use crate::error::{Error, Result};
use crate::fp::{binade_of, neighborhood, pick_nearest, ExactValue, FloatFormat};
use crate::sr::{sr_round, RngStream, SrMode};

/// One integration run: the rounded step `h = fl(1/N)`, every partial sum,
/// and the final result.
#[derive(Debug, Clone)]
pub struct IntegrationRun {
    pub n_steps: u32,
    pub h: f64,
    pub partial_sums: Vec<f64>,
    pub result: f64,
}

/// One row of the bias table: the exact pre-rounding sum at step `k`, its
/// fractional grid position, the per-step up-or-down bias
/// `epsilon * (1/2 - theta)`, and the grid gap.
#[derive(Debug, Clone, Copy)]
pub struct BiasRow {
    pub k: u32,
    pub partial_sum: f64,
    pub theta: f64,
    pub predicted_bias: f64,
    pub epsilon: f64,
}

/// Direction used to advance the deterministic bias-table trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableRounding {
    /// Take the upper neighbor at every step (the default; within a binade
    /// the fractional position of the next pre-rounding sum is the same for
    /// either direction, so only the first step after a binade crossing is
    /// sensitive to this choice).
    Upward,
    Nearest,
    Downward,
}

impl TableRounding {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "up" | "upward" => Ok(TableRounding::Upward),
            "nearest" | "rn" => Ok(TableRounding::Nearest),
            "down" | "downward" => Ok(TableRounding::Downward),
            other => Err(Error::Config(format!("unknown trajectory '{other}'"))),
        }
    }
}

/// Sum `h = fl(1/N)` a total of `N` times under `mode`, rounding the step
/// itself under the same mode first.
pub fn integrate_constant(
    n: u32,
    fmt: &FloatFormat,
    mode: SrMode,
    rng: &mut RngStream,
) -> Result<IntegrationRun> {
    if n < 1 {
        return Err(Error::Config("need at least one step".into()));
    }
    let h = sr_round(&ExactValue::from_ratio(1, n as i64)?, fmt, mode, rng)?;
    let mut sums = Vec::with_capacity(n as usize);
    let mut s = h;
    sums.push(s);
    for _ in 1..n {
        s = sr_round(&ExactValue::sum(s, h), fmt, mode, rng)?;
        sums.push(s);
    }
    Ok(IntegrationRun {
        n_steps: n,
        h,
        partial_sums: sums,
        result: s,
    })
}

/// Per-step bias table for `k = 2..N-1` along the deterministic upward
/// trajectory with `h = fl(1/N)` rounded to nearest.
pub fn bias_table(n: u32, fmt: &FloatFormat) -> Result<Vec<BiasRow>> {
    bias_table_with(n, fmt, TableRounding::Upward)
}

/// Bias table along a selectable deterministic trajectory.
pub fn bias_table_with(n: u32, fmt: &FloatFormat, rounding: TableRounding) -> Result<Vec<BiasRow>> {
    if n < 2 {
        return Err(Error::Config("need at least two steps".into()));
    }
    let h = crate::fp::round_nearest(&ExactValue::from_ratio(1, n as i64)?, fmt)?;
    let mut rows = Vec::with_capacity(n as usize - 2);
    let mut s = h;
    for k in 1..n {
        let t = ExactValue::sum(s, h);
        let nb = neighborhood(&t, fmt)?;
        if k >= 2 {
            rows.push(BiasRow {
                k,
                partial_sum: t.value(),
                theta: nb.theta,
                predicted_bias: nb.epsilon * (0.5 - nb.theta),
                epsilon: nb.epsilon,
            });
        }
        s = match rounding {
            TableRounding::Upward => nb.up,
            TableRounding::Nearest => pick_nearest(&nb),
            TableRounding::Downward => nb.down,
        };
    }
    Ok(rows)
}

/// Fractional grid position shared by every partial sum inside the binade
/// `[2^e, 2^(e+1))` except possibly the first: `frac(h / ulp)`.
pub fn theta_of_interval(h: f64, binade: i32, fmt: &FloatFormat) -> f64 {
    (h / fmt.ulp_at(binade)).fract()
}

/// Closed-form per-step bias of the binade in which the accumulation ends:
/// `ulp * (1/2 - theta_of_interval)` evaluated where `(N-1) * fl(1/N)`
/// lands. Zero when the step is exactly representable on that binade's grid.
pub fn predicted_total_bias(n: u32, fmt: &FloatFormat) -> Result<f64> {
    if n < 2 {
        return Err(Error::Config("need at least two steps".into()));
    }
    let h = crate::fp::round_nearest(&ExactValue::from_ratio(1, n as i64)?, fmt)?;
    let last = (n - 1) as f64 * h; // exact: (n-1) has few bits, h has <= 24
    let e = binade_of(last);
    let theta = theta_of_interval(h, e, fmt);
    if theta == 0.0 {
        return Ok(0.0);
    }
    Ok(fmt.ulp_at(e) * (0.5 - theta))
}
