//! Polynomials with exact rational coefficients, Chebyshev generators in the
//! squared variable, and exact reference evaluation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fp::FloatFormat;

/// Which variable the coefficient vector is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    /// `P(x) = sum a_i x^i`
    X,
    /// `P(x) = sum a_i (x^2)^i`: the evaluation squares its argument once
    /// and runs the recurrence in `z = x^2`.
    ZOfXSquared,
}

/// Coefficients `a_0..a_n` (ascending) with exact rational reference
/// semantics.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<BigRational>,
    variable: Variable,
}

impl Polynomial {
    pub fn new(coeffs: Vec<BigRational>, variable: Variable) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyPolynomial);
        }
        if coeffs.len() > 1 && coeffs.last().unwrap().is_zero() {
            return Err(Error::Config("leading coefficient must be nonzero".into()));
        }
        Ok(Self { coeffs, variable })
    }

    pub fn from_integers(coeffs: &[i64], variable: Variable) -> Result<Self> {
        Self::new(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
            variable,
        )
    }

    /// Degree in the evaluation variable (`z` for the squared convention).
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn variable(&self) -> Variable {
        self.variable
    }

    /// Coefficients as format values; refuses formats that cannot hold every
    /// coefficient exactly rather than silently rounding them.
    pub fn coeffs_as_format(&self, fmt: &FloatFormat) -> Result<Vec<f64>> {
        self.coeffs
            .iter()
            .map(|c| {
                let v = rational_to_f64_exact(c)
                    .ok_or_else(|| Error::CoefficientOverflow(c.to_string()))?;
                if fmt.contains(v) {
                    Ok(v)
                } else {
                    Err(Error::CoefficientOverflow(c.to_string()))
                }
            })
            .collect()
    }

    /// Exact rational value at a dyadic point, honoring the variable
    /// convention.
    pub fn eval_exact(&self, x: &BigRational) -> BigRational {
        let z = match self.variable {
            Variable::X => x.clone(),
            Variable::ZOfXSquared => x * x,
        };
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * &z + c;
        }
        acc
    }

    /// `sum |a_i z^i|` at a dyadic point, the numerator of the condition
    /// number.
    pub fn eval_abs_exact(&self, x: &BigRational) -> BigRational {
        let z = match self.variable {
            Variable::X => x.abs(),
            Variable::ZOfXSquared => x * x,
        };
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * &z + c.abs();
        }
        acc
    }
}

/// Exact f64 of a rational if its value is a dyadic with at most 53
/// significand bits in range; `None` otherwise.
pub(crate) fn rational_to_f64_exact(r: &BigRational) -> Option<f64> {
    let v = r.to_f64()?;
    if !v.is_finite() {
        return None;
    }
    let back = BigRational::from_float(v)?;
    if &back == r {
        Some(v)
    } else {
        None
    }
}

/// Integer coefficients of the degree-`n` Chebyshev polynomial of the first
/// kind expressed in `z = x^2`, ascending. Only even degrees have such a
/// form; odd input is rejected.
pub fn chebyshev_z_coeffs(n: u32) -> Result<Polynomial> {
    if !n.is_multiple_of(2) {
        return Err(Error::OddDegree(n));
    }
    let x_coeffs = chebyshev_x_coeffs(n);
    let z_coeffs: Vec<BigRational> = (0..=n as usize / 2)
        .map(|i| BigRational::from_integer(x_coeffs[2 * i].clone()))
        .collect();
    debug_assert!(x_coeffs.iter().skip(1).step_by(2).all(|c| c.is_zero()));
    Polynomial::new(z_coeffs, Variable::ZOfXSquared)
}

/// Integer coefficients of `T_n` in `x`, ascending, via the three-term
/// recurrence in exact integer arithmetic.
pub fn chebyshev_x_coeffs(n: u32) -> Vec<BigInt> {
    let mut prev: Vec<BigInt> = vec![BigInt::one()];
    if n == 0 {
        return prev;
    }
    let mut cur: Vec<BigInt> = vec![BigInt::zero(), BigInt::one()];
    for _ in 1..n {
        let mut next = vec![BigInt::zero(); cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += 2 * c;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= c;
        }
        prev = cur;
        cur = next;
    }
    cur
}
