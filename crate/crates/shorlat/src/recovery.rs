//! Period recovery from two samples via a planted shortest vector.
//!
//! Two outcomes `x`, `y` for a hidden period `r <= B` are embedded into the
//! integer basis `(N, 0, s*x)`, `(0, N, s*y)` with `s = 4B^2` and
//! `N >= sqrt(2)*s`. When both outcomes are ideal and their hidden indices
//! `k`, `l` are coprime, the unique (up to sign) shortest nonzero vector of
//! that lattice is `N * (-l, k, *)`, so reducing the basis reads off `(k, l)`
//! and `r` follows from the closest integer to `N*k/x`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{gauss_reduce, Basis, IntVector, ReductionTrace};
use crate::numtheory::{ceil_sqrt2_times, closest_integer, next_pow2};
use crate::sampler::Sample;

/// Parameter bundle tying the period bound `B` to the lattice scale `s` and
/// the sampling resolution `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveryParams {
    /// Upper bound `B` on the unknown period.
    pub bound: BigInt,
    /// Lattice scale `s = 4B^2`.
    pub s: BigInt,
    /// Sampling resolution, at least `sqrt(2)*s`.
    pub n: BigInt,
}

/// `s = 4B^2`; `N` defaults to the smallest power of two `>= sqrt(2)*s`,
/// and any override must meet the same lower bound.
pub fn make_params(bound: &BigInt, n_override: Option<&BigInt>) -> Result<RecoveryParams> {
    if bound < &BigInt::one() {
        return Err(Error::OutOfRange {
            what: "period bound B",
            value: bound.clone(),
        });
    }
    let s = BigInt::from(4) * bound * bound;
    let n_min = ceil_sqrt2_times(&s)?;
    let n = match n_override {
        Some(n) => {
            if n < &n_min {
                return Err(Error::InvalidN {
                    given: n.clone(),
                    min: n_min,
                });
            }
            n.clone()
        }
        None => next_pow2(&n_min),
    };
    Ok(RecoveryParams {
        bound: bound.clone(),
        s,
        n,
    })
}

/// Integer basis `(N, 0, s*x)`, `(0, N, s*y)` in `Z^3`.
///
/// This is the rational sample lattice scaled by `N`; scaling preserves
/// which coefficient pair yields the shortest vector.
pub fn build_lattice(x: &BigInt, y: &BigInt, params: &RecoveryParams) -> Result<Basis> {
    for (what, value) in [("sample x", x), ("sample y", y)] {
        if value.is_negative() || value >= &params.n {
            return Err(Error::OutOfRange {
                what,
                value: value.clone(),
            });
        }
    }
    let n = &params.n;
    let u = IntVector::new(vec![n.clone(), BigInt::zero(), &params.s * x]);
    let v = IntVector::new(vec![BigInt::zero(), n.clone(), &params.s * y]);
    Basis::new(u, v)
}

/// Result of reading `(k, l)` off the reduced basis.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub k: BigInt,
    pub l: BigInt,
    /// The reduced shortest vector, sign-normalized together with `(k, l)`.
    pub shortest_vector: IntVector,
    pub trace: ReductionTrace,
}

/// Reduce the sample lattice and read `(k, l)` from the shortest vector.
///
/// The shortest vector is `(-l*N, k*N, *)` up to a global sign; the sign is
/// normalized so `k >= 0`, and so `l >= 0` when `k = 0`.
pub fn recover_k_l(x: &BigInt, y: &BigInt, params: &RecoveryParams) -> Result<Extraction> {
    let basis = build_lattice(x, y, params)?;
    let (reduced, trace) = gauss_reduce(&basis)?;
    let (k, l, shortest_vector) = extract_pair(reduced.u(), &params.n)?;
    Ok(Extraction {
        k,
        l,
        shortest_vector,
        trace,
    })
}

/// Split a lattice vector into `(k, l)` coefficients, checking the leading
/// coordinates are multiples of `N` and fixing the overall sign.
fn extract_pair(w: &IntVector, n: &BigInt) -> Result<(BigInt, BigInt, IntVector)> {
    let entries = w.entries();
    let (q1, r1) = entries[0].div_mod_floor(n);
    let (q2, r2) = entries[1].div_mod_floor(n);
    if !r1.is_zero() || !r2.is_zero() {
        return Err(Error::NotNMultiple);
    }
    let mut k = q2;
    let mut l = -q1;
    let mut vector = w.clone();
    if k.is_negative() || (k.is_zero() && l.is_negative()) {
        k = -k;
        l = -l;
        vector = vector.negated();
    }
    Ok((k, l, vector))
}

/// Closest integer to `N*k/x`; equals the period whenever the sample is
/// ideal and the parameter bounds hold.
pub fn estimate_r(x: &BigInt, k: &BigInt, params: &RecoveryParams) -> Result<BigInt> {
    if x.is_zero() {
        return Err(Error::DivisionByZero);
    }
    if x.is_negative() {
        return Err(Error::OutOfRange {
            what: "sample x",
            value: x.clone(),
        });
    }
    if k < &BigInt::one() {
        return Err(Error::OutOfRange {
            what: "coefficient k",
            value: k.clone(),
        });
    }
    let ratio = BigRational::new(&params.n * k, x.clone());
    Ok(closest_integer(&ratio))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoveryStatus {
    Recovered,
    NeedsRetry,
    DegenerateZeroSamples,
}

/// Outcome of a single two-sample recovery attempt.
#[derive(Debug, Clone)]
pub struct RecoveryOutcome {
    pub status: RecoveryStatus,
    pub k: Option<BigInt>,
    pub l: Option<BigInt>,
    pub r_hat: Option<BigInt>,
    pub shortest_vector: Option<IntVector>,
    pub iterations: u64,
    /// Human-readable explanation when a retry is needed.
    pub detail: Option<String>,
}

impl RecoveryOutcome {
    fn retry(detail: String, extraction: Option<&Extraction>) -> Self {
        RecoveryOutcome {
            status: RecoveryStatus::NeedsRetry,
            k: extraction.map(|e| e.k.clone()),
            l: extraction.map(|e| e.l.clone()),
            r_hat: None,
            shortest_vector: extraction.map(|e| e.shortest_vector.clone()),
            iterations: extraction.map_or(0, |e| e.trace.iterations),
            detail: Some(detail),
        }
    }
}

/// Full single-attempt pipeline: build, reduce, extract, estimate.
///
/// Never fails on recoverable conditions; anything that merely calls for a
/// fresh sample pair is reported as `NeedsRetry`. `x = y = 0` is the one
/// degenerate case: only `r = 1` produces all-zero ideal samples, so the
/// candidate `r_hat = 1` is reported under a dedicated status.
pub fn recover_period(x: &BigInt, y: &BigInt, params: &RecoveryParams) -> Result<RecoveryOutcome> {
    let extraction = match recover_k_l(x, y, params) {
        Ok(e) => e,
        Err(Error::NotNMultiple) => {
            return Ok(RecoveryOutcome::retry(Error::NotNMultiple.to_string(), None))
        }
        Err(Error::DegenerateLattice) => {
            return Ok(RecoveryOutcome::retry(
                Error::DegenerateLattice.to_string(),
                None,
            ))
        }
        Err(e) => return Err(e),
    };

    if x.is_zero() && y.is_zero() {
        return Ok(RecoveryOutcome {
            status: RecoveryStatus::DegenerateZeroSamples,
            k: Some(extraction.k),
            l: Some(extraction.l),
            r_hat: Some(BigInt::one()),
            shortest_vector: Some(extraction.shortest_vector),
            iterations: extraction.trace.iterations,
            detail: None,
        });
    }

    if extraction.l.is_negative() {
        return Ok(RecoveryOutcome::retry(
            "extracted coefficients have mixed signs".into(),
            Some(&extraction),
        ));
    }

    let r_hat = if extraction.k >= BigInt::one() {
        if x.is_zero() {
            return Ok(RecoveryOutcome::retry(
                "positive k with zero sample x".into(),
                Some(&extraction),
            ));
        }
        estimate_r(x, &extraction.k, params)?
    } else {
        // k = 0 forces l >= 1; estimate from the second sample.
        if y.is_zero() {
            return Ok(RecoveryOutcome::retry(
                "zero coefficients for nonzero samples".into(),
                Some(&extraction),
            ));
        }
        estimate_r(y, &extraction.l, params)?
    };

    if r_hat < BigInt::one() || r_hat > params.bound {
        return Ok(RecoveryOutcome::retry(
            format!("estimate {r_hat} falls outside [1, {}]", params.bound),
            Some(&extraction),
        ));
    }

    Ok(RecoveryOutcome {
        status: RecoveryStatus::Recovered,
        k: Some(extraction.k),
        l: Some(extraction.l),
        r_hat: Some(r_hat),
        shortest_vector: Some(extraction.shortest_vector),
        iterations: extraction.trace.iterations,
        detail: None,
    })
}

/// Outcome of the verified retry loop.
#[derive(Debug, Clone)]
pub struct RetryReport {
    /// First verified period, if any round (or the accumulated lcm) passed.
    pub recovered: Option<BigInt>,
    pub rounds_used: u64,
    /// Least common multiple of all per-round candidates, capped at `B`.
    pub lcm_candidate: Option<BigInt>,
    /// Candidate produced by each round (`None` when the round failed).
    pub round_candidates: Vec<Option<BigInt>>,
}

/// Draw sample pairs until a candidate period passes `verify`.
///
/// Each round consumes two samples. Besides testing the round's own
/// candidate, the running lcm of all candidates is tested too: non-coprime
/// index pairs yield proper divisors of the period, and divisors from
/// different rounds can combine to the full period even when no single round
/// produced it. If the lcm outgrows `B` it restarts from the newest
/// candidate, since no valid period exceeds the bound.
pub fn recover_with_retries(
    samples: &mut dyn Iterator<Item = Sample>,
    params: &RecoveryParams,
    mut verify: impl FnMut(&BigInt) -> bool,
    max_rounds: u64,
) -> Result<RetryReport> {
    let mut lcm_acc: Option<BigInt> = None;
    let mut round_candidates = Vec::new();
    let mut rounds_used = 0u64;

    for _ in 0..max_rounds {
        let (x, y) = match (samples.next(), samples.next()) {
            (Some(x), Some(y)) => (x, y),
            _ => break,
        };
        rounds_used += 1;
        let outcome = recover_period(&x.x, &y.x, params)?;
        let candidate = outcome.r_hat;
        round_candidates.push(candidate.clone());

        if let Some(c) = candidate {
            let merged = match &lcm_acc {
                None => c.clone(),
                Some(acc) => acc.lcm(&c),
            };
            // Candidates that divide the true period keep the lcm below the
            // bound; an overflow means a junk candidate got in, so restart
            // the accumulation from the freshest evidence.
            let acc = if merged <= params.bound { merged } else { c.clone() };
            lcm_acc = Some(acc.clone());
            if verify(&c) {
                return Ok(RetryReport {
                    recovered: Some(c),
                    rounds_used,
                    lcm_candidate: lcm_acc,
                    round_candidates,
                });
            }
            if acc != c && verify(&acc) {
                return Ok(RetryReport {
                    recovered: Some(acc),
                    rounds_used,
                    lcm_candidate: lcm_acc,
                    round_candidates,
                });
            }
        }
    }

    Ok(RetryReport {
        recovered: None,
        rounds_used,
        lcm_candidate: lcm_acc,
        round_candidates,
    })
}
