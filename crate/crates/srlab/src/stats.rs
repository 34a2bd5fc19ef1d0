//! Sample aggregation and the statistical gates used by the experiments.

use crate::error::{Error, Result};
use crate::sr::SrMode;

/// A batch of experiment outputs with its exact reference and the seed and
/// mode that produced it.
#[derive(Debug, Clone)]
pub struct SampleSet {
    pub values: Vec<f64>,
    pub exact_reference: f64,
    pub master_seed: u64,
    pub mode: SrMode,
}

#[derive(Debug, Clone, Copy)]
pub struct SummaryStats {
    pub mean: f64,
    pub std: f64,
    pub standard_error: f64,
    pub min: f64,
    pub max: f64,
    /// `mean - exact_reference`
    pub empirical_bias: f64,
}

/// Two-pass mean and standard deviation; order of the input sequence does
/// not affect the result beyond f64 addition order, which is fixed by the
/// stored index order.
pub fn summarize(samples: &SampleSet) -> Result<SummaryStats> {
    if samples.values.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let n = samples.values.len() as f64;
    let mean = samples.values.iter().sum::<f64>() / n;
    let var = samples
        .values
        .iter()
        .map(|v| (v - mean) * (v - mean))
        .sum::<f64>()
        / n;
    let std = var.sqrt();
    let min = samples.values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = samples
        .values
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(SummaryStats {
        mean,
        std,
        standard_error: std / n.sqrt(),
        min,
        max,
        empirical_bias: mean - samples.exact_reference,
    })
}

/// Fraction of |errors| at or below `bound`.
pub fn coverage_fraction(errors: &[f64], bound: f64) -> f64 {
    debug_assert!(bound > 0.0);
    if errors.is_empty() {
        return 0.0;
    }
    errors.iter().filter(|e| e.abs() <= bound).count() as f64 / errors.len() as f64
}

/// Outcome of the unbiasedness gate, with everything needed to audit it.
#[derive(Debug, Clone)]
pub struct UnbiasednessReport {
    pub pass: bool,
    pub empirical_bias: f64,
    pub standard_error: f64,
    pub sigma_multiplier: f64,
    pub count: usize,
    pub exact_reference: f64,
    pub master_seed: u64,
    pub mode: SrMode,
}

/// Pass iff `|mean - reference| <= sigma_multiplier * standard_error`.
pub fn unbiasedness_test(samples: &SampleSet, sigma_multiplier: f64) -> Result<UnbiasednessReport> {
    let s = summarize(samples)?;
    Ok(UnbiasednessReport {
        pass: s.empirical_bias.abs() <= sigma_multiplier * s.standard_error,
        empirical_bias: s.empirical_bias,
        standard_error: s.standard_error,
        sigma_multiplier,
        count: samples.values.len(),
        exact_reference: samples.exact_reference,
        master_seed: samples.master_seed,
        mode: samples.mode,
    })
}

impl std::fmt::Display for UnbiasednessReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: bias {:e} vs {} x se {:e} over {} samples (mode {}, seed {})",
            if self.pass { "pass" } else { "FAIL" },
            self.empirical_bias,
            self.sigma_multiplier,
            self.standard_error,
            self.count,
            self.mode,
            self.master_seed
        )
    }
}
