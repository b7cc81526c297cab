//! Monte-Carlo kernel profiles.
//!
//! For replicate `r`, a phase matrix is sampled with seed
//! `derive_seed(master_seed, r)` and the dot products
//! `encode(pm, g·e₀)·encode(pm, 0)` are recorded on the displacement grid.
//! Replicates run in parallel; their results are aggregated in replicate
//! order with compensated summation, so the profile is bit-identical however
//! the work is scheduled.

mod checks;

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use crate::domain::{KernelProfile, PeriodicDomain, SamplerSpec};
use crate::encoder::{similarity, Encoder};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::sampling::{derive_seed, sample_phase_matrix};

pub use checks::{run_checks, CheckOptions, CheckOutcome};

/// Replicates in the reference experiment.
pub const FIGURE1_REPLICATES: usize = 500;
pub const FIGURE1_EMBED_DIM: usize = 100;
pub const FIGURE1_BAND: u32 = 5;
pub const FIGURE1_SIGMA: f64 = 1.0;
pub const FIGURE1_PERIOD: f64 = TAU;
/// Points in the default grid over `[-t₀/2, t₀/2]`.
pub const DEFAULT_GRID_POINTS: usize = 257;

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileConfig {
    pub embed_dim: usize,
    pub replicates: usize,
    pub sampler: SamplerSpec,
    pub domain: PeriodicDomain,
    /// Displacements along the first feature axis, ascending.
    pub grid: Vec<f64>,
    pub master_seed: u64,
}

impl ProfileConfig {
    /// Reference experiment: d = 100, N = 500, t₀ = 2π, 257 points on [-π, π].
    pub fn figure1(sampler: SamplerSpec, master_seed: u64) -> Self {
        Self {
            embed_dim: FIGURE1_EMBED_DIM,
            replicates: FIGURE1_REPLICATES,
            sampler,
            domain: PeriodicDomain::new(1, FIGURE1_PERIOD).expect("2π is a valid period"),
            grid: uniform_grid(-PI, PI, DEFAULT_GRID_POINTS).expect("valid default grid"),
            master_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::param("replicates", "must be at least 1"));
        }
        if self.grid.is_empty() {
            return Err(Error::param("grid", "must not be empty"));
        }
        if self.grid.iter().any(|g| !g.is_finite()) {
            return Err(Error::param("grid", "values must be finite"));
        }
        if self.grid.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::param("grid", "must be sorted ascending"));
        }
        if self.embed_dim < 3 {
            return Err(Error::param(
                "embed_dim",
                format!("must be at least 3, got {}", self.embed_dim),
            ));
        }
        self.sampler.check()
    }
}

/// `points` evenly spaced values from `start` to `end` inclusive.
pub fn uniform_grid(start: f64, end: f64, points: usize) -> Result<Vec<f64>> {
    if !(start.is_finite() && end.is_finite()) || start > end {
        return Err(Error::param(
            "grid",
            format!("need finite start <= end, got [{start}, {end}]"),
        ));
    }
    match points {
        0 => Err(Error::param("points", "must be at least 1")),
        1 => Ok(vec![start]),
        _ => {
            let span = end - start;
            let last = points - 1;
            Ok((0..points)
                .map(|i| {
                    if i == last {
                        end
                    } else {
                        start + span * (i as f64 / last as f64)
                    }
                })
                .collect())
        }
    }
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn replicate_similarities(cfg: &ProfileConfig, replicate: usize) -> Result<Vec<f64>> {
    let seed = derive_seed(cfg.master_seed, replicate as u64);
    let pm = sample_phase_matrix(cfg.embed_dim, cfg.domain, cfg.sampler, seed)?;
    let encoder = Encoder::new(&pm);
    let mut x = vec![0.0; cfg.domain.n()];
    let origin = encoder.encode(&x)?;
    cfg.grid
        .iter()
        .map(|&g| {
            x[0] = g;
            similarity(&encoder.encode(&x)?, &origin)
        })
        .collect()
}

pub fn empirical_profile(cfg: &ProfileConfig) -> Result<KernelProfile> {
    cfg.validate()?;
    let kernel = KernelSpec::for_sampler(cfg.sampler, cfg.domain.period())?;
    let analytic = cfg
        .grid
        .iter()
        .map(|&g| kernel.eval(g))
        .collect::<Result<Vec<_>>>()?;

    let samples = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| replicate_similarities(cfg, r))
        .collect::<Result<Vec<_>>>()?;

    let count = cfg.replicates as f64;
    let mut mean = Vec::with_capacity(cfg.grid.len());
    let mut std = Vec::with_capacity(cfg.grid.len());
    for i in 0..cfg.grid.len() {
        let m = compensated_sum(samples.iter().map(|s| s[i])) / count;
        let s = if cfg.replicates > 1 {
            let ss = compensated_sum(samples.iter().map(|s| (s[i] - m).powi(2)));
            (ss / (count - 1.0)).sqrt()
        } else {
            0.0
        };
        mean.push(m);
        std.push(s);
    }
    KernelProfile::new(cfg.grid.clone(), analytic, mean, std, cfg.replicates)
}

/// Deviation of the empirical mean from the analytic kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileReport {
    pub max_abs_deviation: f64,
    pub mean_abs_deviation: f64,
    /// Grid point where the maximum deviation occurs (first one on ties).
    pub worst_displacement: f64,
}

pub fn profile_report(profile: &KernelProfile) -> ProfileReport {
    let deviations: Vec<f64> = profile
        .empirical_mean()
        .iter()
        .zip(profile.analytic())
        .map(|(e, a)| (e - a).abs())
        .collect();
    let (worst, max) = deviations
        .iter()
        .copied()
        .enumerate()
        .fold(
            (0, 0.0),
            |best, (i, d)| if d > best.1 { (i, d) } else { best },
        );
    let mean = if deviations.is_empty() {
        0.0
    } else {
        compensated_sum(deviations.iter().copied()) / deviations.len() as f64
    };
    ProfileReport {
        max_abs_deviation: max,
        mean_abs_deviation: mean,
        worst_displacement: profile
            .displacements()
            .get(worst)
            .copied()
            .unwrap_or(f64::NAN),
    }
}
