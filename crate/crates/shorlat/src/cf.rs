//! Continued-fractions period recovery, the standard post-processing
//! baseline: when `N >= 2r^2` and `gcd(k, r) = 1`, the fraction `k/r`
//! appears in lowest terms among the convergents of `x/N`, so the period
//! shows up as a convergent denominator.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::recovery::RecoveryParams;

/// One truncation `p/q` of a continued fraction expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Convergent {
    pub p: BigInt,
    pub q: BigInt,
    pub index: usize,
}

/// All convergents of `x/N` via the Euclidean algorithm; the last one equals
/// `x/N` in lowest terms.
pub fn convergents(x: &BigInt, n: &BigInt) -> Result<Vec<Convergent>> {
    if n < &BigInt::one() {
        return Err(Error::OutOfRange {
            what: "denominator N",
            value: n.clone(),
        });
    }
    if x.is_negative() || x >= n {
        return Err(Error::OutOfRange {
            what: "sample x",
            value: x.clone(),
        });
    }
    let mut out = Vec::new();
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
    let (mut p_prev2, mut q_prev2) = (BigInt::zero(), BigInt::one());
    let (mut num, mut den) = (x.clone(), n.clone());
    while !den.is_zero() {
        let (a, rem) = num.div_mod_floor(&den);
        let p = &a * &p_prev + &p_prev2;
        let q = &a * &q_prev + &q_prev2;
        out.push(Convergent {
            p: p.clone(),
            q: q.clone(),
            index: out.len(),
        });
        p_prev2 = std::mem::replace(&mut p_prev, p);
        q_prev2 = std::mem::replace(&mut q_prev, q);
        num = den;
        den = rem;
    }
    Ok(out)
}

/// Result of a continued-fractions recovery attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfRecovery {
    /// First candidate accepted by the verifier, if any.
    pub accepted: Option<BigInt>,
    /// Convergent denominators up to the bound, in increasing order.
    pub candidates: Vec<BigInt>,
}

/// Candidate periods are the convergent denominators of `x/N` that do not
/// exceed the bound, tested in increasing order against `verify`.
///
/// Needs a single positive sample (`x = 0` carries no information and is
/// rejected so the caller resamples).
pub fn cf_recover(
    x: &BigInt,
    params: &RecoveryParams,
    mut verify: impl FnMut(&BigInt) -> bool,
) -> Result<CfRecovery> {
    if x < &BigInt::one() {
        return Err(Error::OutOfRange {
            what: "sample x",
            value: x.clone(),
        });
    }
    let mut candidates: Vec<BigInt> = convergents(x, &params.n)?
        .into_iter()
        .map(|c| c.q)
        .filter(|q| q <= &params.bound)
        .collect();
    // Denominators are nondecreasing; only the leading 1 can repeat.
    candidates.dedup();
    let accepted = candidates.iter().find(|c| verify(c)).cloned();
    Ok(CfRecovery {
        accepted,
        candidates,
    })
}
