//! Stochastic rounding of exact intermediates and stochastically rounded
//! elementary arithmetic, driven by reproducible seeded random streams.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fp::{neighborhood, pick_nearest, ExactValue, FloatFormat, Neighborhood};

/// Rounding discipline applied to every non-representable intermediate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SrMode {
    /// Round up with probability proportional to proximity; unbiased.
    Nearness,
    /// Round up or down with probability 1/2 each; biased toward midpoints.
    UpOrDown,
    /// Deterministic round to nearest, ties to even.
    Nearest,
}

impl SrMode {
    pub const ALL: [SrMode; 3] = [SrMode::Nearness, SrMode::UpOrDown, SrMode::Nearest];

    pub fn label(&self) -> &'static str {
        match self {
            SrMode::Nearness => "sr-nearness",
            SrMode::UpOrDown => "sr-up-down",
            SrMode::Nearest => "rn",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "sr-nearness" | "nearness" => Ok(SrMode::Nearness),
            "sr-up-down" | "up-down" | "sr-up-or-down" => Ok(SrMode::UpOrDown),
            "rn" | "nearest" => Ok(SrMode::Nearest),
            other => Err(Error::Config(format!("unknown rounding mode '{other}'"))),
        }
    }
}

impl std::fmt::Display for SrMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Deterministic random stream keyed by `(master_seed, stream_id)`.
///
/// Identical keys yield identical draw sequences on every platform, so
/// samples can be fanned out across threads without changing any result.
/// Draws are uniform in `[0, 1)` with 53 bits of resolution.
pub struct RngStream {
    rng: ChaCha8Rng,
    stream_id: u64,
    draws: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_id);
        Self {
            rng,
            stream_id,
            draws: 0,
        }
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Number of uniform draws consumed so far. Representable rounding
    /// results consume none, which keeps replay traces aligned.
    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn draw_unit(&mut self) -> f64 {
        self.draws += 1;
        (self.rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }
}

/// Probability that rounding `x` under `mode` lands on the upper neighbor.
pub fn up_probability(x: &ExactValue, fmt: &FloatFormat, mode: SrMode) -> Result<f64> {
    let nb = neighborhood(x, fmt)?;
    Ok(up_probability_of(&nb, mode))
}

fn up_probability_of(nb: &Neighborhood, mode: SrMode) -> f64 {
    if nb.theta == 0.0 {
        return 0.0;
    }
    match mode {
        SrMode::Nearness => nb.theta,
        SrMode::UpOrDown => 0.5,
        SrMode::Nearest => {
            if pick_nearest(nb) == nb.up {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// Round an exact intermediate under the given mode. Representable values
/// are returned unchanged without consuming a draw; otherwise the result is
/// one of the two enclosing format values, so the relative error of the
/// operation is at most the unit roundoff.
pub fn sr_round(
    x: &ExactValue,
    fmt: &FloatFormat,
    mode: SrMode,
    rng: &mut RngStream,
) -> Result<f64> {
    let nb = neighborhood(x, fmt)?;
    if nb.theta == 0.0 {
        return Ok(nb.down);
    }
    match mode {
        SrMode::Nearest => Ok(pick_nearest(&nb)),
        SrMode::Nearness => {
            if rng.draw_unit() < nb.theta {
                Ok(nb.up)
            } else {
                Ok(nb.down)
            }
        }
        SrMode::UpOrDown => {
            if rng.draw_unit() < 0.5 {
                Ok(nb.up)
            } else {
                Ok(nb.down)
            }
        }
    }
}

/// Expected value of the rounded result: the input itself for SR-nearness,
/// the midpoint of the gap for SR-up-or-down, and the deterministic result
/// for round-to-nearest.
pub fn expected_round(x: &ExactValue, fmt: &FloatFormat, mode: SrMode) -> Result<f64> {
    let nb = neighborhood(x, fmt)?;
    if nb.theta == 0.0 {
        return Ok(nb.down);
    }
    Ok(match mode {
        SrMode::Nearness => x.value(),
        SrMode::UpOrDown => nb.midpoint(),
        SrMode::Nearest => pick_nearest(&nb),
    })
}

/// Signed bias `epsilon(x) * (1/2 - theta(x))` of one up-or-down rounding;
/// zero for representable inputs.
pub fn bias_up_or_down(x: &ExactValue, fmt: &FloatFormat) -> Result<f64> {
    let nb = neighborhood(x, fmt)?;
    Ok(nb.epsilon * (0.5 - nb.theta))
}

macro_rules! sr_binop {
    ($(#[$doc:meta])* $name:ident, $exact:expr) => {
        $(#[$doc])*
        pub fn $name(
            a: f64,
            b: f64,
            fmt: &FloatFormat,
            mode: SrMode,
            rng: &mut RngStream,
        ) -> Result<f64> {
            let exact: Result<ExactValue> = $exact(a, b);
            sr_round(&exact?, fmt, mode, rng)
        }
    };
}

sr_binop!(
    /// `fl(a + b)` under the given rounding mode.
    sr_add,
    |a, b| Ok(ExactValue::sum(a, b))
);
sr_binop!(
    /// `fl(a - b)` under the given rounding mode.
    sr_sub,
    |a, b: f64| Ok(ExactValue::sum(a, -b))
);
sr_binop!(
    /// `fl(a * b)` under the given rounding mode.
    sr_mul,
    |a, b| Ok(ExactValue::product(a, b))
);
sr_binop!(
    /// `fl(a / b)` under the given rounding mode.
    sr_div,
    ExactValue::quotient
);
