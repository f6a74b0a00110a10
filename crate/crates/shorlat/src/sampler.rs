//! Classical stand-in for the phase-estimation measurement.
//!
//! An ideal outcome for a hidden period `r` at resolution `N` is
//! `floor(N*k/r)` or `ceil(N*k/r)` with `k` drawn uniformly from `[0, r)`.
//! The stream mixes in junk outcomes (uniform on `[0, N)`) with probability
//! `1 - q` so retry logic can be exercised; the Bernoulli draw uses exact
//! rational arithmetic. Streams are deterministic per (seed, stream index).

use num_bigint::{BigInt, RandBigInt};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};

/// Hidden period plus the estimation resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodInstance {
    r: BigInt,
    n: BigInt,
}

impl PeriodInstance {
    /// Requires `1 <= r <= n` and `n >= 2`; `r <= n` keeps every outcome
    /// strictly below `n`.
    pub fn new(r: BigInt, n: BigInt) -> Result<Self> {
        if r < BigInt::one() {
            return Err(Error::OutOfRange {
                what: "period r",
                value: r,
            });
        }
        if n < BigInt::from(2) || n < r {
            return Err(Error::OutOfRange {
                what: "resolution N",
                value: n,
            });
        }
        Ok(PeriodInstance { r, n })
    }

    pub fn r(&self) -> &BigInt {
        &self.r
    }

    pub fn n(&self) -> &BigInt {
        &self.n
    }
}

/// Which side of the exact value an ideal outcome takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    Floor,
    Ceil,
}

/// Rounding behaviour of a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RoundingMode {
    Floor,
    Ceil,
    /// Floor or ceiling with probability 1/2 each, per sample.
    #[default]
    RandomPerSample,
}

/// Hidden diagnostics attached to an ideal sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleTruth {
    pub k: BigInt,
    pub rounding: Rounding,
    /// `x/N - k/r`, exactly; always smaller than `1/N` in magnitude.
    pub deviation: BigRational,
}

/// One measurement outcome; `truth` is absent for junk outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub x: BigInt,
    pub truth: Option<SampleTruth>,
}

/// Stream configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplerConfig {
    pub rounding: RoundingMode,
    /// Probability that a draw is an ideal sample, in `(0, 1]`.
    pub success_probability: BigRational,
    pub seed: u64,
}

impl SamplerConfig {
    pub fn new(rounding: RoundingMode, success_probability: BigRational, seed: u64) -> Result<Self> {
        if !success_probability.is_positive() || success_probability > BigRational::one() {
            return Err(Error::InvalidParameter(format!(
                "success probability must lie in (0, 1], got {success_probability}"
            )));
        }
        Ok(SamplerConfig {
            rounding,
            success_probability,
            seed,
        })
    }

    /// Noise-free stream with per-sample random rounding.
    pub fn noise_free(seed: u64) -> Self {
        SamplerConfig {
            rounding: RoundingMode::RandomPerSample,
            success_probability: BigRational::one(),
            seed,
        }
    }
}

/// The ideal outcome for a given `k`, with diagnostics populated.
pub fn ideal_sample(inst: &PeriodInstance, k: &BigInt, rounding: Rounding) -> Result<Sample> {
    if k.is_negative() || k >= inst.r() {
        return Err(Error::OutOfRange {
            what: "phase index k",
            value: k.clone(),
        });
    }
    let product = inst.n() * k;
    let x = match rounding {
        Rounding::Floor => product.div_floor(inst.r()),
        Rounding::Ceil => product.div_ceil(inst.r()),
    };
    let deviation = BigRational::new(x.clone(), inst.n().clone())
        - BigRational::new(k.clone(), inst.r().clone());
    Ok(Sample {
        x,
        truth: Some(SampleTruth {
            k: k.clone(),
            rounding,
            deviation,
        }),
    })
}

/// One draw: an ideal sample with probability `q`, junk otherwise.
///
/// Draw order is fixed (Bernoulli, then `k` or junk `x`, then the rounding
/// coin when applicable) so a stream is fully determined by its RNG state.
pub fn draw_sample(inst: &PeriodInstance, config: &SamplerConfig, rng: &mut ChaCha12Rng) -> Sample {
    let q = &config.success_probability;
    let denom = q.denom().to_biguint().expect("canonical positive denominator");
    let ticket = BigInt::from(rng.gen_biguint_below(&denom));
    if &ticket < q.numer() {
        let k = rng.gen_bigint_range(&BigInt::zero(), inst.r());
        let rounding = match config.rounding {
            RoundingMode::Floor => Rounding::Floor,
            RoundingMode::Ceil => Rounding::Ceil,
            RoundingMode::RandomPerSample => {
                if rng.gen_bool(0.5) {
                    Rounding::Floor
                } else {
                    Rounding::Ceil
                }
            }
        };
        ideal_sample(inst, &k, rounding).expect("k drawn in range")
    } else {
        Sample {
            x: rng.gen_bigint_range(&BigInt::zero(), inst.n()),
            truth: None,
        }
    }
}

/// Deterministic, splittable sample source.
#[derive(Debug, Clone)]
pub struct SampleStream {
    inst: PeriodInstance,
    config: SamplerConfig,
    rng: ChaCha12Rng,
}

impl SampleStream {
    pub fn new(inst: PeriodInstance, config: SamplerConfig) -> Self {
        let rng = ChaCha12Rng::seed_from_u64(config.seed);
        SampleStream { inst, config, rng }
    }

    /// Independent stream for a given trial index under the same seed.
    pub fn for_trial(inst: PeriodInstance, config: SamplerConfig, stream_index: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
        rng.set_stream(stream_index);
        SampleStream { inst, config, rng }
    }

    pub fn draw(&mut self) -> Sample {
        draw_sample(&self.inst, &self.config, &mut self.rng)
    }
}

impl Iterator for SampleStream {
    type Item = Sample;

    fn next(&mut self) -> Option<Sample> {
        Some(self.draw())
    }
}

/// Stable per-trial seed derivation from a master seed.
pub fn derive_trial_seed(master: u64, trial: u64) -> u64 {
    let mut rng = ChaCha12Rng::seed_from_u64(master);
    rng.set_stream(trial);
    rng.gen()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(r: i64, n: i64) -> PeriodInstance {
        PeriodInstance::new(BigInt::from(r), BigInt::from(n)).unwrap()
    }

    #[test]
    fn ideal_sample_examples() {
        let s = ideal_sample(&inst(10, 2048), &BigInt::from(3), Rounding::Floor).unwrap();
        assert_eq!(s.x, BigInt::from(614));
        let s = ideal_sample(&inst(10, 2048), &BigInt::from(3), Rounding::Ceil).unwrap();
        assert_eq!(s.x, BigInt::from(615));

        let s = ideal_sample(&inst(7, 64), &BigInt::zero(), Rounding::Ceil).unwrap();
        assert_eq!(s.x, BigInt::zero());

        // Exact division: floor and ceiling agree.
        for rounding in [Rounding::Floor, Rounding::Ceil] {
            let s = ideal_sample(&inst(2, 32), &BigInt::one(), rounding).unwrap();
            assert_eq!(s.x, BigInt::from(16));
        }
    }

    #[test]
    fn ideal_sample_rejects_out_of_range_k() {
        assert!(matches!(
            ideal_sample(&inst(10, 2048), &BigInt::from(10), Rounding::Floor),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            ideal_sample(&inst(10, 2048), &BigInt::from(-1), Rounding::Floor),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn deviation_is_below_one_over_n() {
        for r in 1..=40i64 {
            for k in 0..r {
                for rounding in [Rounding::Floor, Rounding::Ceil] {
                    let instance = inst(r, 256);
                    let s = ideal_sample(&instance, &BigInt::from(k), rounding).unwrap();
                    let truth = s.truth.unwrap();
                    let bound = BigRational::new(BigInt::one(), BigInt::from(256));
                    assert!(truth.deviation.abs() < bound, "r={r} k={k}");
                    assert!(s.x >= BigInt::zero() && s.x < BigInt::from(256));
                }
            }
        }
    }

    #[test]
    fn streams_are_reproducible() {
        let config = SamplerConfig::noise_free(42);
        let a: Vec<Sample> = SampleStream::new(inst(10, 2048), config.clone())
            .take(100)
            .collect();
        let b: Vec<Sample> = SampleStream::new(inst(10, 2048), config)
            .take(100)
            .collect();
        assert_eq!(a, b);

        // Distinct stream indices decorrelate under the same seed.
        let config = SamplerConfig::noise_free(42);
        let c: Vec<Sample> = SampleStream::for_trial(inst(10, 2048), config.clone(), 1)
            .take(100)
            .collect();
        let d: Vec<Sample> = SampleStream::for_trial(inst(10, 2048), config, 2)
            .take(100)
            .collect();
        assert_ne!(c, d);
    }

    #[test]
    fn trivial_period_always_samples_zero() {
        let mut stream = SampleStream::new(inst(1, 16), SamplerConfig::noise_free(7));
        for _ in 0..20 {
            let s = stream.draw();
            assert_eq!(s.x, BigInt::zero());
            assert_eq!(s.truth.unwrap().k, BigInt::zero());
        }
    }

    #[test]
    fn junk_fraction_matches_q() {
        // q = 81/100 over 100_000 draws; the observed ideal fraction must sit
        // in 0.81 +- 0.01 (about an eight-sigma band for the binomial).
        let q = BigRational::new(BigInt::from(81), BigInt::from(100));
        let config = SamplerConfig::new(RoundingMode::RandomPerSample, q, 123).unwrap();
        let stream = SampleStream::new(inst(100, 131072), config);
        let total = 100_000;
        let ideal = stream.take(total).filter(|s| s.truth.is_some()).count();
        let fraction = ideal as f64 / total as f64;
        assert!((fraction - 0.81).abs() < 0.01, "fraction = {fraction}");
    }

    #[test]
    fn k_distribution_is_uniform() {
        // Chi-square goodness of fit over r = 10 bins, 100_000 draws;
        // critical value for 9 degrees of freedom at significance 0.001.
        let config = SamplerConfig::noise_free(2024);
        let stream = SampleStream::new(inst(10, 2048), config);
        let mut counts = [0u64; 10];
        for s in stream.take(100_000) {
            let k: usize = s.truth.unwrap().k.try_into().unwrap();
            counts[k] += 1;
        }
        let expected = 10_000.0;
        let chi_sq: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        assert!(chi_sq < 27.877, "chi_sq = {chi_sq}, counts = {counts:?}");
    }

    #[test]
    fn config_validation() {
        let zero = BigRational::zero();
        assert!(SamplerConfig::new(RoundingMode::Floor, zero, 0).is_err());
        let over = BigRational::new(BigInt::from(3), BigInt::from(2));
        assert!(SamplerConfig::new(RoundingMode::Floor, over, 0).is_err());
        assert!(PeriodInstance::new(BigInt::from(5), BigInt::from(4)).is_err());
        assert!(PeriodInstance::new(BigInt::zero(), BigInt::from(4)).is_err());
    }
}
