//! Frequency-index PMFs and seeded phase-matrix generation.
//!
//! Seed scheme: each feature column `j` of a matrix with seed `s` reads its
//! indices from the ChaCha20 stream `j` keyed by `s`
//! (`ChaCha20Rng::seed_from_u64(s)` then `set_stream(j)`). Columns are
//! therefore independent of each other and of the order they are filled in.
//! Derived seeds for Monte-Carlo replicates come from [`derive_seed`].

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::domain::{PeriodicDomain, PhaseMatrix, SamplerSpec};
use crate::error::{Error, Result};

/// Probability mass over the integer indices `-B..=B`, in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePmf {
    band: u32,
    probabilities: Vec<f64>,
}

impl DiscretePmf {
    fn from_weights(band: u32, weights: Vec<f64>) -> Self {
        let total: f64 = weights.iter().sum();
        let probabilities = weights.into_iter().map(|w| w / total).collect();
        Self {
            band,
            probabilities,
        }
    }

    pub fn band(&self) -> u32 {
        self.band
    }

    /// Support points `-B..=B`.
    pub fn indices(&self) -> impl Iterator<Item = i64> + '_ {
        let b = i64::from(self.band);
        -b..=b
    }

    /// Probabilities aligned with [`DiscretePmf::indices`].
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// `p[m]`, zero outside the support.
    pub fn probability(&self, m: i64) -> f64 {
        let b = i64::from(self.band);
        if m.abs() > b {
            0.0
        } else {
            self.probabilities[(m + b) as usize]
        }
    }

    /// The kernel induced by this PMF: `Σ_m p[m]·cos(2πm·x / t₀)`.
    pub fn cosine_transform(&self, x: f64, period: f64) -> f64 {
        self.indices()
            .zip(&self.probabilities)
            .map(|(m, p)| p * (TAU * m as f64 * x / period).cos())
            .sum()
    }

    /// Draws one index by inverse CDF.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (m, p) in self.indices().zip(&self.probabilities) {
            acc += p;
            if u < acc {
                return m;
            }
        }
        // u landed in the rounding gap above the final cumulative sum.
        i64::from(self.band)
    }
}

pub fn uniform_pmf(band: u32) -> Result<DiscretePmf> {
    if band < 1 {
        return Err(Error::param("band", "must be at least 1"));
    }
    let len = 2 * band as usize + 1;
    Ok(DiscretePmf {
        band,
        probabilities: vec![1.0 / len as f64; len],
    })
}

/// Truncated discrete normal: `p[m] ∝ exp(-ω_m² / (2σ²))` with `ω_m = 2πm/t₀`,
/// normalized over `-B..=B`.
pub fn discrete_normal_pmf(band: u32, sigma: f64, period: f64) -> Result<DiscretePmf> {
    if band < 1 {
        return Err(Error::param("band", "must be at least 1"));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::param(
            "sigma",
            format!("must be finite and > 0, got {sigma}"),
        ));
    }
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::param(
            "period",
            format!("must be finite and > 0, got {period}"),
        ));
    }
    let b = i64::from(band);
    let weights = (-b..=b)
        .map(|m| gaussian_weight(m.unsigned_abs(), sigma, period))
        .collect();
    Ok(DiscretePmf::from_weights(band, weights))
}

/// Unnormalized Gaussian weight of harmonic `m`; the `1/(σ√(2π))` factor cancels
/// in every ratio it is used in.
pub(crate) fn gaussian_weight(m: u64, sigma: f64, period: f64) -> f64 {
    let omega = TAU * m as f64 / period;
    (-(omega * omega) / (2.0 * sigma * sigma)).exp()
}

/// PMF for a sampler over the given domain's period.
pub fn pmf_for(sampler: SamplerSpec, period: f64) -> Result<DiscretePmf> {
    match sampler {
        SamplerSpec::UniformBand { band } => uniform_pmf(band),
        SamplerSpec::DiscreteNormal { band, sigma } => discrete_normal_pmf(band, sigma, period),
    }
}

/// Number of independently drawn slots per column: `⌊(d-1)/2⌋`.
pub fn free_slots(embed_dim: usize) -> usize {
    embed_dim.saturating_sub(1) / 2
}

/// Random-number stream for column `column` of a matrix with seed `seed`.
pub fn column_rng(seed: u64, column: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(column as u64);
    rng
}

pub fn sample_phase_matrix(
    embed_dim: usize,
    domain: PeriodicDomain,
    sampler: SamplerSpec,
    seed: u64,
) -> Result<PhaseMatrix> {
    if embed_dim < 3 {
        return Err(Error::param(
            "embed_dim",
            format!("must be at least 3 (one DC slot plus a conjugate pair), got {embed_dim}"),
        ));
    }
    sampler.check()?;
    let pmf = pmf_for(sampler, domain.period())?;
    let n = domain.n();
    let mut indices = vec![0i64; embed_dim * n];
    for j in 0..n {
        let mut rng = column_rng(seed, j);
        for k in 1..=free_slots(embed_dim) {
            let m = pmf.sample(&mut rng);
            indices[k * n + j] = m;
            indices[(embed_dim - k) * n + j] = -m;
        }
    }
    Ok(PhaseMatrix::from_flat(
        embed_dim, domain, sampler, seed, indices,
    ))
}

/// SplitMix64 finalizer over `master + (index + 1)·φ64`.
///
/// Used to derive per-replicate matrix seeds; the mapping is fixed so serial
/// and parallel runs see the same seeds.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
