//! Parametric binary floating-point formats and exact rounding neighborhoods.
//!
//! A format value is an `f64` that lies exactly on the grid of the target
//! format (precision at most 24 bits, so every format value and every exact
//! sum/product of two of them is representable in an `f64` pair without loss).
//! [`ExactValue`] carries such exact intermediates; [`neighborhood`] produces
//! the enclosing pair of format values together with the gap and the
//! fractional position inside it.

use crate::error::{Error, Result};

/// Binary floating-point format: significand precision in bits and the
/// binade exponent range `[emin, emax]` of normal values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FloatFormat {
    precision: u32,
    emin: i32,
    emax: i32,
}

/// 2^e as an exact f64, valid for normal-range exponents.
#[inline]
pub(crate) fn exp2i(e: i32) -> f64 {
    debug_assert!((-1022..=1023).contains(&e));
    f64::from_bits(((1023 + e) as u64) << 52)
}

impl FloatFormat {
    /// Create a format; precision must be in `[2, 24]` and `emin < emax`.
    pub fn new(precision: u32, emin: i32, emax: i32) -> Result<Self> {
        if !(2..=24).contains(&precision) {
            return Err(Error::Config(format!(
                "precision must be in [2, 24], got {precision}"
            )));
        }
        if emin >= emax {
            return Err(Error::Config(format!(
                "emin must be below emax, got [{emin}, {emax}]"
            )));
        }
        Ok(Self {
            precision,
            emin,
            emax,
        })
    }

    /// IEEE-754 single precision (24-bit significand, binades -126..=127).
    pub fn binary32() -> Self {
        Self {
            precision: 24,
            emin: -126,
            emax: 127,
        }
    }

    /// Small format with the given precision, suitable for exhaustive
    /// enumeration of all normal values.
    pub fn toy(precision: u32) -> Result<Self> {
        Self::new(precision, -16, 15)
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn emin(&self) -> i32 {
        self.emin
    }

    pub fn emax(&self) -> i32 {
        self.emax
    }

    /// Unit roundoff `u = 2^(1-p)`, the worst-case relative error of one
    /// faithfully rounded operation.
    pub fn unit_roundoff(&self) -> f64 {
        exp2i(1 - self.precision as i32)
    }

    /// Grid spacing `2^(e+1-p)` for values in binade `[2^e, 2^(e+1))`.
    pub fn ulp_at(&self, binade: i32) -> f64 {
        exp2i(binade + 1 - self.precision as i32)
    }

    /// Largest normal value `(2 - 2^(1-p)) * 2^emax`.
    pub fn max_value(&self) -> f64 {
        (2.0 - self.unit_roundoff()) * exp2i(self.emax)
    }

    /// Smallest positive normal value `2^emin`.
    pub fn min_normal(&self) -> f64 {
        exp2i(self.emin)
    }

    /// True iff `x` is zero or a normal value on this format's grid.
    pub fn contains(&self, x: f64) -> bool {
        if x == 0.0 {
            return true;
        }
        if !x.is_finite() {
            return false;
        }
        let a = x.abs();
        if a < self.min_normal() || a > self.max_value() {
            return false;
        }
        let q = a / self.ulp_at(binade_of(a));
        q == q.floor()
    }

    /// Iterate all positive normal values, smallest first. Intended for
    /// exhaustive checks at toy precision.
    pub fn enumerate_positive(&self) -> impl Iterator<Item = f64> + '_ {
        let p = self.precision;
        (self.emin..=self.emax).flat_map(move |e| {
            let ulp = self.ulp_at(e);
            (1u64 << (p - 1)..1u64 << p).map(move |m| m as f64 * ulp)
        })
    }
}

/// Binade exponent of a positive finite f64: the `E` with `2^E <= x < 2^(E+1)`.
#[inline]
pub(crate) fn binade_of(x: f64) -> i32 {
    debug_assert!(x.is_finite() && x > 0.0);
    let bits = x.to_bits();
    let raw = ((bits >> 52) & 0x7ff) as i32;
    debug_assert!(raw > 0, "subnormal f64 carrier: {x:e}");
    raw - 1023
}

/// Sign/significand/exponent triple of a format value: `x = sign * m * 2^(e+1-p)`
/// with `2^(p-1) <= m < 2^p` for normal values (`m = 0` for zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decomposition {
    pub sign: i8,
    pub significand: u64,
    pub exponent: i32,
}

impl Decomposition {
    /// Rebuild the format value. Exact.
    pub fn recompose(&self, fmt: &FloatFormat) -> f64 {
        if self.significand == 0 {
            return 0.0;
        }
        let v = self.significand as f64 * fmt.ulp_at(self.exponent);
        if self.sign < 0 {
            -v
        } else {
            v
        }
    }
}

/// Split a format value into its sign/significand/binade triple.
///
/// Zero returns `m = 0`; NaN, infinities, and values below the normal range
/// are rejected, as are finite values that are not on the format grid.
pub fn decompose(x: f64, fmt: &FloatFormat) -> Result<Decomposition> {
    if x == 0.0 {
        return Ok(Decomposition {
            sign: 1,
            significand: 0,
            exponent: 0,
        });
    }
    if !x.is_finite() {
        return Err(Error::SubnormalOrSpecial(x));
    }
    let a = x.abs();
    if a < fmt.min_normal() {
        return Err(Error::SubnormalOrSpecial(x));
    }
    if a > fmt.max_value() {
        return Err(Error::Range {
            value: x,
            min: fmt.min_normal(),
            max: fmt.max_value(),
        });
    }
    let e = binade_of(a);
    let q = a / fmt.ulp_at(e);
    if q != q.floor() {
        return Err(Error::NotRepresentable(x));
    }
    Ok(Decomposition {
        sign: if x < 0.0 { -1 } else { 1 },
        significand: q as u64,
        exponent: e,
    })
}

/// An exact real intermediate, carried as an unevaluated `hi + lo` sum of two
/// doubles. Sums and products of two format values are held exactly;
/// quotients carry a residual correction that leaves the absolute error of
/// any derived fractional position below `2^-80`, far inside the documented
/// `2^-28` budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactValue {
    hi: f64,
    lo: f64,
}

impl ExactValue {
    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    /// Exact sum of two doubles (two-sum).
    pub fn sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Self { hi: s, lo: err }
    }

    /// Exact product of two doubles (two-product via fused multiply-add).
    pub fn product(a: f64, b: f64) -> Self {
        let p = a * b;
        let e = a.mul_add(b, -p);
        Self { hi: p, lo: e }
    }

    /// Quotient with one residual correction; see the type-level note on the
    /// resolution this guarantees.
    pub fn quotient(a: f64, b: f64) -> Result<Self> {
        if b == 0.0 {
            return Err(Error::DivisionByZero);
        }
        let q = a / b;
        if !q.is_finite() {
            return Ok(Self { hi: q, lo: 0.0 });
        }
        // a - q*b, exact up to one rounding of the fma
        let r = q.mul_add(-b, a);
        Self::renormalized(q, r / b)
    }

    /// Ratio of two integers as an exact-enough carrier.
    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        Self::quotient(num as f64, den as f64)
    }

    fn renormalized(hi: f64, lo: f64) -> Result<Self> {
        let s = Self::sum(hi, lo);
        Ok(s)
    }

    /// The carried value collapsed to one double (rounded once).
    pub fn value(&self) -> f64 {
        self.hi + self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn is_negative(&self) -> bool {
        self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }

    fn abs(&self) -> Self {
        if self.is_negative() {
            Self {
                hi: -self.hi,
                lo: -self.lo,
            }
        } else {
            *self
        }
    }
}

/// The two enclosing format values of an exact intermediate, the gap
/// `epsilon = up - down` between them, and `theta = (x - down) / epsilon`,
/// the fraction of the gap below `x`. Representable inputs have
/// `down == up == x`, `epsilon == 0`, `theta == 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighborhood {
    pub down: f64,
    pub up: f64,
    pub epsilon: f64,
    pub theta: f64,
}

impl Neighborhood {
    pub fn is_representable(&self) -> bool {
        self.theta == 0.0
    }

    /// Midpoint `(down + up) / 2`, exact for p <= 24.
    pub fn midpoint(&self) -> f64 {
        // down + up has at most p+1 significand bits
        (self.down + self.up) * 0.5
    }
}

/// Enclose `x` between adjacent format values.
///
/// Errors with `Range` when `x` overflows or underflows the normal range of
/// the format (zero itself is representable and returns a zero neighborhood).
pub fn neighborhood(x: &ExactValue, fmt: &FloatFormat) -> Result<Neighborhood> {
    if x.is_zero() {
        return Ok(Neighborhood {
            down: 0.0,
            up: 0.0,
            epsilon: 0.0,
            theta: 0.0,
        });
    }
    let a = x.abs();
    let nb = neighborhood_positive(&a, fmt)?;
    if x.is_negative() {
        if nb.theta == 0.0 {
            Ok(Neighborhood {
                down: -nb.down,
                up: -nb.down,
                epsilon: 0.0,
                theta: 0.0,
            })
        } else {
            Ok(Neighborhood {
                down: -nb.up,
                up: -nb.down,
                epsilon: nb.epsilon,
                theta: 1.0 - nb.theta,
            })
        }
    } else {
        Ok(nb)
    }
}

fn neighborhood_positive(x: &ExactValue, fmt: &FloatFormat) -> Result<Neighborhood> {
    let hi = x.hi();
    let lo = x.lo();
    debug_assert!(hi > 0.0 || (hi == 0.0 && lo > 0.0));
    if !hi.is_finite() {
        return Err(Error::Range {
            value: hi,
            min: fmt.min_normal(),
            max: fmt.max_value(),
        });
    }

    let range_err = |v: f64| Error::Range {
        value: v,
        min: fmt.min_normal(),
        max: fmt.max_value(),
    };

    if hi < fmt.min_normal() || (hi == fmt.min_normal() && lo < 0.0) {
        return Err(range_err(x.value()));
    }

    let e = binade_of(hi);
    if e > fmt.emax {
        return Err(range_err(x.value()));
    }
    let ulp = fmt.ulp_at(e);
    let q = hi / ulp;
    let q_floor = q.floor();
    // both exact: q is hi rescaled by a power of two, and q - q_floor is a
    // Sterbenz-safe subtraction
    let frac = q - q_floor;
    let down0 = q_floor * ulp;

    let (down, up, epsilon, theta) = if frac == 0.0 {
        // hi sits on the grid; only the residual decides the side
        if lo == 0.0 {
            (hi, hi, 0.0, 0.0)
        } else if lo > 0.0 {
            (hi, hi + ulp, ulp, lo / ulp)
        } else if hi == exp2i(e) && e > fmt.emin {
            // crossing down into the previous binade halves the gap
            let ulp_lo = fmt.ulp_at(e - 1);
            (hi - ulp_lo, hi, ulp_lo, 1.0 + lo / ulp_lo)
        } else if hi == exp2i(e) {
            // would leave the normal range from below
            return Err(range_err(x.value()));
        } else {
            (hi - ulp, hi, ulp, 1.0 + lo / ulp)
        }
    } else {
        // |lo| is too small to cross a grid line around an off-grid hi
        (down0, down0 + ulp, ulp, frac + lo / ulp)
    };

    debug_assert!((0.0..1.0).contains(&theta), "theta out of range: {theta}");
    if up > fmt.max_value() {
        return Err(range_err(x.value()));
    }
    Ok(Neighborhood {
        down,
        up,
        epsilon,
        theta,
    })
}

/// Round to nearest, ties to the even significand. Relative error at most
/// half the unit roundoff.
pub fn round_nearest(x: &ExactValue, fmt: &FloatFormat) -> Result<f64> {
    let nb = neighborhood(x, fmt)?;
    Ok(pick_nearest(&nb))
}

pub(crate) fn pick_nearest(nb: &Neighborhood) -> f64 {
    if nb.theta == 0.0 {
        nb.down
    } else if nb.theta > 0.5 {
        nb.up
    } else if nb.theta < 0.5 {
        nb.down
    } else {
        // tie: take the neighbor with even significand
        let m_down = (nb.down.abs() / nb.epsilon).floor() as u64;
        if m_down.is_multiple_of(2) {
            nb.down
        } else {
            nb.up
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b32() -> FloatFormat {
        FloatFormat::binary32()
    }

    #[test]
    fn decompose_one() {
        let d = decompose(1.0, &b32()).unwrap();
        assert_eq!(d.sign, 1);
        assert_eq!(d.significand, 1 << 23);
        assert_eq!(d.exponent, 0);
        assert_eq!(d.recompose(&b32()), 1.0);
    }

    #[test]
    fn decompose_half() {
        let d = decompose(0.5, &b32()).unwrap();
        assert_eq!((d.sign, d.significand, d.exponent), (1, 1 << 23, -1));
    }

    #[test]
    fn decompose_nearest_015() {
        // 0.15 rounded to binary32 sits in [2^-3, 2^-2)
        let x = round_nearest(&ExactValue::from_ratio(3, 20).unwrap(), &b32()).unwrap();
        let d = decompose(x, &b32()).unwrap();
        assert_eq!(d.exponent, -3);
        assert!((1u64 << 23) <= d.significand && d.significand < (1u64 << 24));
        assert_eq!(d.recompose(&b32()), x);
    }

    #[test]
    fn decompose_rejects_specials() {
        assert!(matches!(
            decompose(f64::NAN, &b32()),
            Err(Error::SubnormalOrSpecial(_))
        ));
        assert!(matches!(
            decompose(f64::INFINITY, &b32()),
            Err(Error::SubnormalOrSpecial(_))
        ));
        assert!(matches!(
            decompose(1e-40, &b32()),
            Err(Error::SubnormalOrSpecial(_))
        ));
        let d = decompose(0.0, &b32()).unwrap();
        assert_eq!(d.significand, 0);
    }

    #[test]
    fn decompose_recompose_exhaustive_toy() {
        for p in 2..=8 {
            let fmt = FloatFormat::toy(p).unwrap();
            for v in fmt.enumerate_positive() {
                let d = decompose(v, &fmt).unwrap();
                assert_eq!(d.recompose(&fmt), v);
                let n = decompose(-v, &fmt).unwrap();
                assert_eq!(n.recompose(&fmt), -v);
            }
        }
    }

    #[test]
    fn neighborhood_of_exact_015() {
        // 0.15 * 2^26 = 10066329.6, so theta = 0.6 with a 2^-26 gap
        let x = ExactValue::from_ratio(3, 20).unwrap();
        let nb = neighborhood(&x, &b32()).unwrap();
        assert_eq!(nb.theta, 0.6);
        assert_eq!(nb.epsilon, 2f64.powi(-26));
        assert!(nb.down < 0.15 && 0.15 < nb.up);
    }

    #[test]
    fn neighborhood_of_representable() {
        let nb = neighborhood(&ExactValue::from_f64(0.25), &b32()).unwrap();
        assert_eq!(nb.theta, 0.0);
        assert_eq!(nb.down, 0.25);
        assert_eq!(nb.up, 0.25);
        assert_eq!(nb.epsilon, 0.0);
        // zero is representable by convention
        let z = neighborhood(&ExactValue::from_f64(0.0), &b32()).unwrap();
        assert_eq!((z.down, z.up, z.theta, z.epsilon), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn neighborhood_negative_mirrors() {
        let x = ExactValue::from_ratio(-3, 20).unwrap();
        let nb = neighborhood(&x, &b32()).unwrap();
        assert_eq!(nb.theta, 1.0 - 0.6);
        assert!(nb.down < -0.15 && -0.15 < nb.up);
    }

    #[test]
    fn neighborhood_range_errors() {
        let fmt = b32();
        let big = ExactValue::from_f64(fmt.max_value() * 2.0);
        assert!(matches!(neighborhood(&big, &fmt), Err(Error::Range { .. })));
        let tiny = ExactValue::from_f64(fmt.min_normal() / 4.0);
        assert!(matches!(
            neighborhood(&tiny, &fmt),
            Err(Error::Range { .. })
        ));
    }

    #[test]
    fn round_nearest_matches_examples() {
        let fmt = b32();
        // theta = 0 keeps the value
        assert_eq!(
            round_nearest(&ExactValue::from_f64(0.25), &fmt).unwrap(),
            0.25
        );
        // 0.15 has theta = 0.6 > 1/2, so it rounds up
        let x = ExactValue::from_ratio(3, 20).unwrap();
        let nb = neighborhood(&x, &fmt).unwrap();
        assert_eq!(round_nearest(&x, &fmt).unwrap(), nb.up);
        // exact midpoint with even lower significand goes down
        let down = 1.0;
        let mid = ExactValue::from_f64(1.0 + 0.5 * fmt.ulp_at(0));
        assert_eq!(round_nearest(&mid, &fmt).unwrap(), down);
        // odd lower significand goes up
        let odd_down = 1.0 + fmt.ulp_at(0);
        let mid2 = ExactValue::sum(odd_down, 0.5 * fmt.ulp_at(0));
        assert_eq!(
            round_nearest(&mid2, &fmt).unwrap(),
            odd_down + fmt.ulp_at(0)
        );
    }

    #[test]
    fn round_nearest_rn32_half_ulp_bound() {
        // |x - rn(x)| <= u/2 * |x| over a spread of carriers
        let fmt = b32();
        let u = fmt.unit_roundoff();
        for i in 1..2000u32 {
            let x = ExactValue::from_ratio(i as i64 * 7 + 3, 9973).unwrap();
            let r = round_nearest(&x, &fmt).unwrap();
            assert!((r - x.value()).abs() <= 0.5 * u * x.value().abs() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn exact_sum_carries_residual() {
        // 1 + 2^-40 is exact in f64; force a residual with a wide-span sum
        let s = ExactValue::sum(1.0, 2f64.powi(-60));
        assert_eq!(s.hi(), 1.0);
        assert_eq!(s.lo(), 2f64.powi(-60));
        let nb = neighborhood(&s, &FloatFormat::binary32()).unwrap();
        assert_eq!(nb.down, 1.0);
        assert_eq!(nb.theta, 2f64.powi(-60) / 2f64.powi(-23));
    }

    #[test]
    fn residual_below_grid_point_crosses_down() {
        // x = 1 - 2^-60: the enclosing pair straddles the binade boundary
        let s = ExactValue::sum(1.0, -(2f64.powi(-60)));
        let fmt = FloatFormat::binary32();
        let nb = neighborhood(&s, &fmt).unwrap();
        assert_eq!(nb.up, 1.0);
        assert_eq!(nb.epsilon, fmt.ulp_at(-1));
        assert_eq!(nb.down, 1.0 - fmt.ulp_at(-1));
        assert!(nb.theta < 1.0 && nb.theta > 0.99);
    }

    #[test]
    fn quotient_residual_resolution() {
        // carrier error of a/b stays far below the 2^-28 budget: reconstruct
        // a - hi*b - lo*b with error-free steps and compare against zero
        for (a, b) in [(1.0f64, 3.0f64), (2.0, 7.0), (10.0, 9973.0), (1.0, 20.0)] {
            let q = ExactValue::quotient(a, b).unwrap();
            let prod = ExactValue::product(q.hi(), b);
            let rem = (a - prod.hi()) - prod.lo(); // exact to ~2^-53 of itself
            let defect = rem - q.lo() * b;
            assert!(
                defect.abs() / a <= 1e-25,
                "residual defect {defect:e} for {a}/{b}"
            );
        }
    }

    #[test]
    fn theta_of_one_twentieth() {
        // 1/20 scaled into its binade has fractional part 0.8
        let x = ExactValue::from_ratio(1, 20).unwrap();
        let nb = neighborhood(&x, &b32()).unwrap();
        assert_eq!(nb.theta, 0.8);
    }

    #[test]
    fn contains_grid_membership() {
        let fmt = b32();
        assert!(fmt.contains(0.0));
        assert!(fmt.contains(1.5));
        assert!(fmt.contains(-0.25));
        assert!(!fmt.contains(0.1)); // f64 0.1 is off the 24-bit grid
        assert!(!fmt.contains(f64::NAN));
    }
}
