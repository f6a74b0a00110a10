//! Exact integer and rational primitives shared by the rest of the crate.
//!
//! Everything here is integer or exact-rational arithmetic. Square-root
//! comparisons are decided by squaring; no floating point is used.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::error::{Error, Result};

/// Default iteration cap for the brute-force order search.
pub const DEFAULT_ORDER_BUDGET: u64 = 10_000_000;

/// The unique integer `m` with `f - m` in `(-1/2, 1/2]`.
///
/// Exact halves round down: `[1/2] = 0` and `[-1/2] = -1`.
pub fn closest_integer(f: &BigRational) -> BigInt {
    // m = ceil(f - 1/2)
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    (f - half).ceil().to_integer()
}

/// +1 if `f` is nonnegative, -1 otherwise.
pub fn sign(f: &BigRational) -> i32 {
    if f.is_negative() {
        -1
    } else {
        1
    }
}

/// Greatest common divisor, always nonnegative.
pub fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}

/// `a^e mod n` for `e >= 0`, `n >= 1`; the result is normalized to `[0, n)`.
pub fn modpow(a: &BigInt, e: &BigInt, n: &BigInt) -> Result<BigInt> {
    if n < &BigInt::one() {
        return Err(Error::InvalidParameter(format!(
            "modulus must be positive, got {n}"
        )));
    }
    if e.is_negative() {
        return Err(Error::InvalidParameter(format!(
            "exponent must be nonnegative, got {e}"
        )));
    }
    Ok(a.mod_floor(n).modpow(e, n))
}

/// Smallest `r >= 1` with `a^r = 1 (mod n)`, by iterated multiplication.
///
/// This is a ground-truth oracle for desk-scale inputs, capped at
/// [`DEFAULT_ORDER_BUDGET`] iterations.
pub fn multiplicative_order(a: &BigInt, n: &BigInt) -> Result<BigInt> {
    multiplicative_order_capped(a, n, DEFAULT_ORDER_BUDGET)
}

/// [`multiplicative_order`] with an explicit iteration budget.
pub fn multiplicative_order_capped(a: &BigInt, n: &BigInt, budget: u64) -> Result<BigInt> {
    if n < &BigInt::from(2) {
        return Err(Error::InvalidParameter(format!(
            "modulus must be at least 2, got {n}"
        )));
    }
    let a = a.mod_floor(n);
    if !a.gcd(n).is_one() {
        return Err(Error::NotAUnit {
            a: a.clone(),
            n: n.clone(),
        });
    }
    let mut cur = a.clone();
    let mut order = BigInt::one();
    let mut steps: u64 = 1;
    while !cur.is_one() {
        if steps >= budget {
            return Err(Error::OrderBudgetExceeded { budget });
        }
        cur = (&cur * &a).mod_floor(n);
        order += 1;
        steps += 1;
    }
    Ok(order)
}

/// Smallest integer `>= sqrt(2) * s`, decided by integer square roots.
pub fn ceil_sqrt2_times(s: &BigInt) -> Result<BigInt> {
    if s.is_negative() {
        return Err(Error::InvalidParameter(format!(
            "argument must be nonnegative, got {s}"
        )));
    }
    let target = BigInt::from(2) * s * s;
    let root = target.sqrt();
    if &root * &root == target {
        Ok(root)
    } else {
        Ok(root + 1)
    }
}

/// Smallest power of two `>= m` (1 for `m <= 1`).
pub fn next_pow2(m: &BigInt) -> BigInt {
    let mut p = BigInt::one();
    while &p < m {
        p <<= 1;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn int(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn closest_integer_examples() {
        assert_eq!(closest_integer(&rat(0, 1)), int(0));
        assert_eq!(closest_integer(&rat(1, 2)), int(0));
        assert_eq!(closest_integer(&rat(7, 3)), int(2));
        assert_eq!(closest_integer(&rat(-1, 2)), int(-1));
        assert_eq!(closest_integer(&rat(3, 2)), int(1));
        assert_eq!(closest_integer(&rat(-7, 2)), int(-4));
    }

    #[test]
    fn closest_integer_interval_and_shift() {
        // Exhaustive over numerators and denominators up to 200: the residual
        // lies in (-1/2, 1/2] and the map commutes with integer shifts.
        let half = rat(1, 2);
        let minus_half = rat(-1, 2);
        for d in 1..=200i64 {
            for n in -200..=200i64 {
                let f = rat(n, d);
                let m = closest_integer(&f);
                let resid = &f - BigRational::from_integer(m.clone());
                assert!(resid > minus_half && resid <= half, "residual for {n}/{d}");
                for c in [-3i64, 1, 17] {
                    let shifted = &f + BigRational::from_integer(int(c));
                    assert_eq!(closest_integer(&shifted), &m + int(c));
                }
            }
        }
    }

    #[test]
    fn sign_examples() {
        assert_eq!(sign(&rat(0, 1)), 1);
        assert_eq!(sign(&rat(-3, 7)), -1);
        assert_eq!(sign(&rat(5, 1)), 1);
    }

    #[test]
    fn order_examples() {
        assert_eq!(multiplicative_order(&int(2), &int(15)).unwrap(), int(4));
        assert_eq!(multiplicative_order(&int(7), &int(15)).unwrap(), int(4));
        assert_eq!(multiplicative_order(&int(1), &int(97)).unwrap(), int(1));
        assert!(matches!(
            multiplicative_order(&int(6), &int(15)),
            Err(Error::NotAUnit { .. })
        ));
        assert!(matches!(
            multiplicative_order_capped(&int(3), &int(1_000_003), 5),
            Err(Error::OrderBudgetExceeded { budget: 5 })
        ));
    }

    #[test]
    fn modpow_examples() {
        assert_eq!(modpow(&int(2), &int(4), &int(15)).unwrap(), int(1));
        assert_eq!(modpow(&int(-1), &int(3), &int(7)).unwrap(), int(6));
        assert_eq!(modpow(&int(5), &int(0), &int(7)).unwrap(), int(1));
        assert!(modpow(&int(2), &int(-1), &int(7)).is_err());
        assert!(modpow(&int(2), &int(3), &int(0)).is_err());
    }

    #[test]
    fn order_agrees_with_direct_powers() {
        // Independent u64 check for every unit of every modulus up to 500:
        // a^e != 1 for e < r and a^r = 1.
        for n in 2u64..=500 {
            for a in 1..n {
                if num_integer::gcd(a, n) != 1 {
                    continue;
                }
                let r = multiplicative_order(&int(a as i64), &int(n as i64)).unwrap();
                let mut cur = a % n;
                let mut e = 1u64;
                while cur != 1 {
                    cur = cur * a % n;
                    e += 1;
                }
                assert_eq!(r, BigInt::from(e), "order of {a} mod {n}");
                assert!(modpow(&int(a as i64), &r, &int(n as i64)).unwrap().is_one());
            }
        }
    }

    #[test]
    fn ceil_sqrt2_examples_and_bounds() {
        assert_eq!(ceil_sqrt2_times(&int(1024)).unwrap(), int(1449));
        assert_eq!(ceil_sqrt2_times(&int(0)).unwrap(), int(0));
        for s in 1..=10_000i64 {
            let c = ceil_sqrt2_times(&int(s)).unwrap();
            let two_s_sq = int(2) * s * s;
            assert!(&c * &c >= two_s_sq, "s = {s}");
            let below = &c - 1;
            assert!(&below * &below < int(2) * s * s, "s = {s}");
        }
    }

    #[test]
    fn next_pow2_examples() {
        assert_eq!(next_pow2(&int(1449)), int(2048));
        assert_eq!(next_pow2(&int(1)), int(1));
        assert_eq!(next_pow2(&int(2)), int(2));
        assert_eq!(next_pow2(&int(0)), int(1));
        assert_eq!(next_pow2(&int(1025)), int(2048));
    }

    #[test]
    fn gcd_is_nonnegative() {
        assert_eq!(gcd(&int(-12), &int(18)), int(6));
        assert_eq!(gcd(&int(0), &int(0)), int(0));
    }
}
