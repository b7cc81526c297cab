//! Cross-module invariant checks run end to end by `cyclic-ssp verify`.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{validate_phase_matrix, Embedding, PeriodicDomain, PhaseMatrix, SamplerSpec};
use crate::encoder::{bind, encode, similarity, Encoder};
use crate::error::Result;
use crate::kernels::{
    dirichlet_kernel, dirichlet_kernel_closed, periodic_gaussian_kernel, periodic_gaussian_theta,
    KernelSpec,
};
use crate::sampling::{derive_seed, pmf_for, sample_phase_matrix};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CheckOptions {
    pub seed: u64,
    /// Adds one matrix with a broken conjugate pair to the symmetry check.
    pub inject_corrupt_matrix: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn from_bound(name: &'static str, worst: f64, limit: f64) -> Self {
        Self {
            name,
            passed: worst < limit,
            detail: format!("worst {worst:.3e} (limit {limit:.0e})"),
        }
    }

    fn from_result(name: &'static str, result: Result<Self>) -> Self {
        result.unwrap_or_else(|e| Self {
            name,
            passed: false,
            detail: format!("error: {e}"),
        })
    }
}

fn max_abs_diff(a: &Embedding, b: &Embedding) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn random_matrix(rng: &mut ChaCha8Rng, dims: &[usize], max_n: usize) -> Result<PhaseMatrix> {
    let d = dims[rng.random_range(0..dims.len())];
    let n = rng.random_range(1..=max_n);
    let period = if rng.random_bool(0.5) {
        TAU
    } else {
        rng.random_range(0.5..10.0)
    };
    let sampler = if rng.random_bool(0.5) {
        SamplerSpec::uniform(rng.random_range(1..=8))?
    } else {
        SamplerSpec::discrete_normal(rng.random_range(1..=8), rng.random_range(0.3..3.0))?
    };
    sample_phase_matrix(d, PeriodicDomain::new(n, period)?, sampler, rng.random())
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, half_width: f64) -> Vec<f64> {
    (0..n)
        .map(|_| rng.random_range(-half_width..half_width))
        .collect()
}

fn conjugate_symmetry(opts: CheckOptions) -> Result<CheckOutcome> {
    let mut matrices = Vec::new();
    for r in 0..100u64 {
        let seed = derive_seed(opts.seed, r);
        let domain = PeriodicDomain::new(1 + (r as usize % 3), TAU)?;
        let sampler = if r % 2 == 0 {
            SamplerSpec::uniform(5)?
        } else {
            SamplerSpec::discrete_normal(5, 1.0)?
        };
        matrices.push(sample_phase_matrix(
            3 + (r as usize * 7) % 130,
            domain,
            sampler,
            seed,
        )?);
    }
    if opts.inject_corrupt_matrix {
        let mut pm = matrices[0].clone();
        let d = pm.embed_dim();
        let v = pm.index(1, 0);
        let v = if v == 0 { 1 } else { v };
        pm.set_index(1, 0, v);
        pm.set_index(d - 1, 0, v);
        matrices.push(pm);
    }
    let first_bad = matrices.iter().enumerate().find_map(|(i, pm)| {
        let v = validate_phase_matrix(pm);
        (!v.is_valid()).then_some((i, v))
    });
    Ok(match first_bad {
        None => CheckOutcome {
            name: "conjugate-symmetry",
            passed: true,
            detail: format!("{} sampled matrices valid", matrices.len()),
        },
        Some((i, v)) => CheckOutcome {
            name: "conjugate-symmetry",
            passed: false,
            detail: format!("matrix {i}: {}", v.violations[0]),
        },
    })
}

fn periodicity(rng: &mut ChaCha8Rng) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let pm = random_matrix(rng, &[64, 100, 257], 3)?;
        let domain = pm.domain();
        let encoder = Encoder::new(&pm);
        let x = random_point(rng, domain.n(), 2.0 * domain.period());
        let base = encoder.encode(&x)?;
        for j in 0..domain.n() {
            for k in [-2.0, 1.0, 3.0] {
                let mut shifted = x.clone();
                shifted[j] += k * domain.period();
                worst = worst.max(max_abs_diff(&base, &encoder.encode(&shifted)?));
            }
        }
    }
    Ok(CheckOutcome::from_bound("periodicity", worst, 1e-9))
}

fn unit_norm(rng: &mut ChaCha8Rng) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let pm = random_matrix(rng, &[3, 4, 64, 100, 257], 3)?;
        let x = random_point(rng, pm.domain().n(), 10.0);
        worst = worst.max((encode(&pm, &x)?.norm() - 1.0).abs());
    }
    Ok(CheckOutcome::from_bound("unit-norm", worst, 1e-9))
}

fn shift_invariance(rng: &mut ChaCha8Rng) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let pm = random_matrix(rng, &[64, 100], 2)?;
        let encoder = Encoder::new(&pm);
        let n = pm.domain().n();
        let (x, y, s) = (
            random_point(rng, n, 5.0),
            random_point(rng, n, 5.0),
            random_point(rng, n, 5.0),
        );
        let shift = |v: &[f64]| v.iter().zip(&s).map(|(a, b)| a + b).collect::<Vec<_>>();
        let a = similarity(&encoder.encode(&x)?, &encoder.encode(&y)?)?;
        let b = similarity(&encoder.encode(&shift(&x))?, &encoder.encode(&shift(&y))?)?;
        worst = worst.max((a - b).abs());
    }
    Ok(CheckOutcome::from_bound("shift-invariance", worst, 1e-9))
}

fn binding_homomorphism(rng: &mut ChaCha8Rng) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let pm = random_matrix(rng, &[64, 100], 3)?;
        let encoder = Encoder::new(&pm);
        let n = pm.domain().n();
        let (x, y) = (random_point(rng, n, 5.0), random_point(rng, n, 5.0));
        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let bound = bind(&encoder.encode(&x)?, &encoder.encode(&y)?)?;
        worst = worst.max(max_abs_diff(&bound, &encoder.encode(&sum)?));
    }
    Ok(CheckOutcome::from_bound(
        "binding-homomorphism",
        worst,
        1e-6,
    ))
}

fn dirichlet_sum_ratio(rng: &mut ChaCha8Rng) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for i in 0..10_000 {
        let band = rng.random_range(1..=20);
        let period = if i % 2 == 0 {
            TAU
        } else {
            rng.random_range(0.5..10.0)
        };
        let x = match i % 4 {
            // next to the removable singularities at 0 and ±t₀
            0 => rng.random_range(-1e-6..1e-6),
            1 => period + rng.random_range(-1e-6..1e-6),
            2 => -period + rng.random_range(-1e-6..1e-6),
            _ => rng.random_range(-2.0 * period..2.0 * period),
        };
        let s = dirichlet_kernel(x, band, period)?;
        let c = dirichlet_kernel_closed(x, band, period)?;
        worst = worst.max((s - c).abs());
    }
    Ok(CheckOutcome::from_bound("dirichlet-sum-ratio", worst, 1e-9))
}

fn theta_agreement() -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for sigma in [0.5, 1.0, 2.0] {
        for period in [1.0, TAU] {
            for i in 0..=256 {
                let x = period * (i as f64 / 256.0 - 0.5);
                let t = periodic_gaussian_theta(x, sigma, period)?;
                let s = periodic_gaussian_kernel(x, 50, sigma, period)?;
                worst = worst.max((t - s).abs());
            }
        }
    }
    Ok(CheckOutcome::from_bound("theta-agreement", worst, 1e-6))
}

fn pmf_duality() -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    let samplers = [
        SamplerSpec::uniform(1)?,
        SamplerSpec::uniform(5)?,
        SamplerSpec::uniform(17)?,
        SamplerSpec::discrete_normal(5, 1.0)?,
        SamplerSpec::discrete_normal(8, 0.5)?,
        SamplerSpec::discrete_normal(12, 3.0)?,
    ];
    for sampler in samplers {
        for period in [1.0, TAU] {
            let pmf = pmf_for(sampler, period)?;
            let kernel = KernelSpec::for_sampler(sampler, period)?;
            for i in 0..=1000 {
                let x = period * (i as f64 / 1000.0 - 0.5);
                worst = worst.max((pmf.cosine_transform(x, period) - kernel.eval(x)?).abs());
            }
        }
    }
    Ok(CheckOutcome::from_bound("pmf-duality", worst, 1e-12))
}

/// Runs every invariant check; one outcome per check, in a fixed order.
pub fn run_checks(opts: CheckOptions) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    vec![
        CheckOutcome::from_result("conjugate-symmetry", conjugate_symmetry(opts)),
        CheckOutcome::from_result("periodicity", periodicity(&mut rng)),
        CheckOutcome::from_result("unit-norm", unit_norm(&mut rng)),
        CheckOutcome::from_result("shift-invariance", shift_invariance(&mut rng)),
        CheckOutcome::from_result("binding-homomorphism", binding_homomorphism(&mut rng)),
        CheckOutcome::from_result("dirichlet-sum-ratio", dirichlet_sum_ratio(&mut rng)),
        CheckOutcome::from_result("theta-agreement", theta_agreement()),
        CheckOutcome::from_result("pmf-duality", pmf_duality()),
    ]
}
