//! Horner polynomial evaluation under a selectable rounding mode, with an
//! optional exact-rational step trace.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::chebyshev::{Polynomial, Variable};
use crate::error::{Error, Result};
use crate::fp::{ExactValue, FloatFormat};
use crate::sr::{sr_mul, sr_round, RngStream, SrMode};

/// Per-step record of one evaluation: computed values `r^_0..r^_2n`, exact
/// references `r_0..r_2n` for the same recurrence, their differences `Z_i`,
/// and the normalized sequence `Y_i = Z_i / w^floor((i+1)/2)` when the
/// evaluation variable `w` is nonzero.
///
/// The exact references use the *computed* evaluation variable (for the
/// squared convention the rounded `w = fl(x*x)`), so the recurrence
/// identities hold exactly; the gap between `w` and `x^2` is accounted for
/// separately by the forward-error experiments.
#[derive(Debug, Clone)]
pub struct HornerTrace {
    pub eval_variable: f64,
    pub computed: Vec<f64>,
    pub exact: Vec<BigRational>,
    pub errors: Vec<BigRational>,
    pub normalized: Option<Vec<BigRational>>,
}

/// Evaluate `P` at the format value `x` under `mode`.
pub fn horner_eval(
    poly: &Polynomial,
    x: f64,
    fmt: &FloatFormat,
    mode: SrMode,
    rng: &mut RngStream,
) -> Result<f64> {
    eval_inner(poly, x, fmt, mode, rng, false).map(|(v, _)| v)
}

/// Evaluate and record the full step trace.
pub fn horner_eval_traced(
    poly: &Polynomial,
    x: f64,
    fmt: &FloatFormat,
    mode: SrMode,
    rng: &mut RngStream,
) -> Result<(f64, HornerTrace)> {
    let (v, trace) = eval_inner(poly, x, fmt, mode, rng, true)?;
    Ok((v, trace.expect("trace requested")))
}

fn eval_inner(
    poly: &Polynomial,
    x: f64,
    fmt: &FloatFormat,
    mode: SrMode,
    rng: &mut RngStream,
    with_trace: bool,
) -> Result<(f64, Option<HornerTrace>)> {
    if !fmt.contains(x) {
        return Err(Error::NotRepresentable(x));
    }
    let coeffs = poly.coeffs_as_format(fmt)?;
    let n = coeffs.len() - 1;
    let w = match poly.variable() {
        Variable::X => x,
        Variable::ZOfXSquared => sr_mul(x, x, fmt, mode, rng)?,
    };

    let mut computed = Vec::new();
    let mut r = coeffs[n];
    if with_trace {
        computed.push(r);
    }
    for k in 1..=n {
        r = sr_round(&ExactValue::product(r, w), fmt, mode, rng)?;
        if with_trace {
            computed.push(r);
        }
        r = sr_round(&ExactValue::sum(r, coeffs[n - k]), fmt, mode, rng)?;
        if with_trace {
            computed.push(r);
        }
    }

    if !with_trace {
        return Ok((r, None));
    }

    let w_exact = BigRational::from_float(w).expect("format value is dyadic");
    let mut exact = Vec::with_capacity(2 * n + 1);
    let mut cur = BigRational::from_float(coeffs[n]).expect("dyadic");
    exact.push(cur.clone());
    for k in 1..=n {
        cur *= &w_exact;
        exact.push(cur.clone());
        cur += BigRational::from_float(coeffs[n - k]).expect("dyadic");
        exact.push(cur.clone());
    }
    let errors: Vec<BigRational> = computed
        .iter()
        .zip(&exact)
        .map(|(c, e)| BigRational::from_float(*c).expect("dyadic") - e)
        .collect();
    let normalized = if w_exact.is_zero() {
        None
    } else {
        Some(
            errors
                .iter()
                .enumerate()
                .map(|(i, z)| {
                    let pow = i.div_ceil(2);
                    z / power(&w_exact, pow)
                })
                .collect(),
        )
    };
    Ok((
        r,
        Some(HornerTrace {
            eval_variable: w,
            computed,
            exact,
            errors,
            normalized,
        }),
    ))
}

fn power(base: &BigRational, exp: usize) -> BigRational {
    let mut acc = BigRational::from_integer(1.into());
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

impl HornerTrace {
    /// Final forward error |Z_2n| as a rational.
    pub fn final_error(&self) -> BigRational {
        self.errors.last().expect("trace is never empty").abs()
    }

    /// Recover the per-step relative perturbation `delta_i` implied by two
    /// consecutive trace entries; `None` where the exact pre-rounding value
    /// is zero.
    pub fn delta(&self, i: usize) -> Option<BigRational> {
        assert!(i >= 1 && i < self.computed.len());
        let w = BigRational::from_float(self.eval_variable)?;
        let prev = BigRational::from_float(self.computed[i - 1])?;
        let pre_round = if i % 2 == 1 {
            prev * w
        } else {
            // the coefficient added at step i = 2k is r_{2k} - r_{2k-1}
            let coeff = &self.exact[i] - &self.exact[i - 1];
            prev + coeff
        };
        if pre_round.is_zero() {
            return None;
        }
        Some(
            BigRational::from_float(self.computed[i])? / pre_round
                - BigRational::from_integer(1.into()),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebyshev::chebyshev_z_coeffs;
    use num_traits::One;

    fn b32() -> FloatFormat {
        FloatFormat::binary32()
    }

    #[test]
    fn degree_zero_returns_constant() {
        let p = Polynomial::from_integers(&[7], Variable::X).unwrap();
        for mode in SrMode::ALL {
            let mut rng = RngStream::new(1, 0);
            assert_eq!(horner_eval(&p, 0.5, &b32(), mode, &mut rng).unwrap(), 7.0);
            assert_eq!(rng.draws(), 0);
        }
    }

    #[test]
    fn exact_steps_stay_exact() {
        // x + 1 at 0.5: both the product and the sum are representable
        let p = Polynomial::from_integers(&[1, 1], Variable::X).unwrap();
        for mode in SrMode::ALL {
            let mut rng = RngStream::new(2, 0);
            assert_eq!(horner_eval(&p, 0.5, &b32(), mode, &mut rng).unwrap(), 1.5);
            assert_eq!(rng.draws(), 0);
        }
    }

    #[test]
    fn rejects_off_grid_point() {
        let p = Polynomial::from_integers(&[1, 1], Variable::X).unwrap();
        let mut rng = RngStream::new(2, 0);
        assert!(matches!(
            horner_eval(&p, 0.1, &b32(), SrMode::Nearest, &mut rng),
            Err(Error::NotRepresentable(_))
        ));
    }

    #[test]
    fn trace_recurrences_hold_exactly() {
        let fmt = b32();
        let p = chebyshev_z_coeffs(8).unwrap();
        let x = 0.8125; // representable
        let mut rng = RngStream::new(11, 3);
        let (value, trace) = horner_eval_traced(&p, x, &fmt, SrMode::Nearness, &mut rng).unwrap();
        let n = p.degree();
        assert_eq!(trace.computed.len(), 2 * n + 1);
        assert_eq!(*trace.computed.last().unwrap(), value);

        let w = BigRational::from_float(trace.eval_variable).unwrap();
        let u = BigRational::from_float(fmt.unit_roundoff()).unwrap();
        for i in 1..=2 * n {
            // |delta_i| <= u, recovered from consecutive entries
            if let Some(delta) = trace.delta(i) {
                assert!(delta.abs() <= u, "step {i}: delta too large");
                // Z_{2k-1} = w Z_{2k-2} + r^_{2k-2} w delta_{2k-1}
                if i % 2 == 1 {
                    let lhs = &trace.errors[i];
                    let prev = BigRational::from_float(trace.computed[i - 1]).unwrap();
                    let rhs = &w * &trace.errors[i - 1] + prev * &w * delta;
                    assert_eq!(*lhs, rhs, "error recurrence at step {i}");
                }
            }
        }

        // |Z_2n| == |w|^n |Y_2n|
        let y = trace.normalized.as_ref().unwrap();
        let scale = (0..n).fold(BigRational::one(), |acc, _| acc * &w);
        assert_eq!(trace.final_error(), (y.last().unwrap() * scale).abs());
    }

    #[test]
    fn intermediate_overflow_is_a_range_error() {
        let fmt = b32();
        let p = Polynomial::from_integers(&[1, 1, 1], Variable::X).unwrap();
        let x = 2f64.powi(100); // x^2 = 2^200 overflows the format
        let mut rng = RngStream::new(1, 0);
        assert!(matches!(
            horner_eval(&p, x, &fmt, SrMode::Nearest, &mut rng),
            Err(Error::Range { .. })
        ));
    }

    #[test]
    fn traced_and_plain_agree() {
        let p = chebyshev_z_coeffs(12).unwrap();
        let fmt = b32();
        let x = 0.59375;
        let mut rng1 = RngStream::new(9, 1);
        let mut rng2 = RngStream::new(9, 1);
        let plain = horner_eval(&p, x, &fmt, SrMode::Nearness, &mut rng1).unwrap();
        let (traced, _) = horner_eval_traced(&p, x, &fmt, SrMode::Nearness, &mut rng2).unwrap();
        assert_eq!(plain.to_bits(), traced.to_bits());
        assert_eq!(rng1.draws(), rng2.draws());
    }
}
