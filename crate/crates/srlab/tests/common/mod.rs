//! Exact-rational reference implementations, independent of the library's
//! f64-based paths. Everything here recomputes from first principles so the
//! tests can freeze expected values against a second route.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn pow2(e: i32) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << e as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

/// Binade exponent of a positive rational: `2^E <= x < 2^(E+1)`.
pub fn binade(x: &BigRational) -> i32 {
    assert!(x.is_positive());
    let mut e = x.to_f64().map(|v| v.log2().floor() as i32).unwrap_or(0);
    while *x < pow2(e) {
        e -= 1;
    }
    while *x >= pow2(e + 1) {
        e += 1;
    }
    e
}

/// Exact rounding neighborhood at precision `p`:
/// `(down, up, theta, epsilon)` with `theta = epsilon = 0` when on-grid.
pub fn neighborhood(
    x: &BigRational,
    p: u32,
) -> (BigRational, BigRational, BigRational, BigRational) {
    assert!(x.is_positive(), "oracle covers positive values");
    let e = binade(x);
    let ulp = pow2(e + 1 - p as i32);
    let q = x / &ulp;
    let fl = q.floor();
    let theta = &q - &fl;
    let down = fl * &ulp;
    if theta.is_zero() {
        (down.clone(), down, BigRational::zero(), BigRational::zero())
    } else {
        let up = &down + &ulp;
        (down, up, theta, ulp)
    }
}

/// Round to nearest, ties to even significand, at precision `p`.
pub fn round_nearest(x: &BigRational, p: u32) -> BigRational {
    let (down, up, theta, eps) = neighborhood(x, p);
    if eps.is_zero() {
        return down;
    }
    let half = rat(1, 2);
    if theta > half {
        up
    } else if theta < half {
        down
    } else {
        let m = (&down / &eps).to_integer();
        if (&m % BigInt::from(2)).is_zero() {
            down
        } else {
            up
        }
    }
}

/// One bias-table row recomputed exactly.
pub struct OracleRow {
    pub k: u32,
    pub pre_round: BigRational,
    pub theta: BigRational,
    pub bias: BigRational,
    pub epsilon: BigRational,
}

/// Replay of the upward-trajectory bias table in exact rationals.
pub fn upward_bias_table(n: u32, p: u32) -> Vec<OracleRow> {
    let h = round_nearest(&BigRational::new(BigInt::one(), BigInt::from(n)), p);
    let mut rows = Vec::new();
    let mut s = h.clone();
    for k in 1..n {
        let t = &s + &h;
        let (down, up, theta, eps) = neighborhood(&t, p);
        if k >= 2 {
            let bias = &eps * (rat(1, 2) - &theta);
            rows.push(OracleRow {
                k,
                pre_round: t.clone(),
                theta: theta.clone(),
                bias,
                epsilon: eps.clone(),
            });
        }
        s = if eps.is_zero() { down } else { up };
    }
    rows
}

/// Deterministic nearest-rounding accumulation of `fl(1/N)`, returning the
/// final rounded sum.
pub fn nearest_integration(n: u32, p: u32) -> BigRational {
    let h = round_nearest(&BigRational::new(BigInt::one(), BigInt::from(n)), p);
    let mut s = h.clone();
    for _ in 1..n {
        s = round_nearest(&(&s + &h), p);
    }
    s
}

/// Exact expectation of the final error of up-or-down accumulation,
/// including the two-point law of the rounded step itself, via state-space
/// probability propagation.
pub fn updown_exact_expectation(n: u32, p: u32) -> BigRational {
    let inv = BigRational::new(BigInt::one(), BigInt::from(n));
    let (hd, hu, theta, eps) = neighborhood(&inv, p);
    let half = rat(1, 2);
    let h_choices: Vec<(BigRational, BigRational)> = if eps.is_zero() {
        vec![(hd, BigRational::one())]
    } else {
        let _ = theta;
        vec![(hd, half.clone()), (hu, half.clone())]
    };
    let mut total = BigRational::zero();
    for (h, ph) in h_choices {
        let mut states: Vec<(BigRational, BigRational)> = vec![(h.clone(), BigRational::one())];
        for _ in 1..n {
            let mut next: Vec<(BigRational, BigRational)> = Vec::new();
            for (s, pr) in &states {
                let t = s + &h;
                let (down, up, _, eps) = neighborhood(&t, p);
                if eps.is_zero() {
                    merge(&mut next, t, pr.clone());
                } else {
                    merge(&mut next, down, pr * &half);
                    merge(&mut next, up, pr * &half);
                }
            }
            states = next;
        }
        let run: BigRational = states
            .iter()
            .map(|(s, pr)| (s - BigRational::one()) * pr)
            .sum();
        total += ph * run;
    }
    total
}

fn merge(states: &mut Vec<(BigRational, BigRational)>, key: BigRational, pr: BigRational) {
    for (k, v) in states.iter_mut() {
        if *k == key {
            *v += pr;
            return;
        }
    }
    states.push((key, pr));
}

/// Chebyshev coefficients in `z = x^2` from the closed-form binomial
/// expression, independent of any recurrence:
/// the x^(n-2k) coefficient of T_n is (-1)^k 2^(n-2k-1) n/(n-k) C(n-k, k).
pub fn chebyshev_z_binomial(n: u32) -> Vec<BigInt> {
    assert!(n >= 2 && n % 2 == 0);
    let mut out = vec![BigInt::zero(); n as usize / 2 + 1];
    for k in 0..=n / 2 {
        let deg = (n - 2 * k) as usize; // power of x
        let c = BigRational::new(BigInt::from(n), BigInt::from(n - k))
            * BigRational::from_integer(binomial(n - k, k))
            * pow2(deg as i32 - 1);
        let signed = if k % 2 == 0 { c } else { -c };
        assert!(signed.is_integer(), "closed form must be integral");
        out[deg / 2] = signed.to_integer();
    }
    out
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().expect("fits in f64")
}
