use std::f64::consts::{PI, TAU};

use cyclic_ssp::encoder::{encode, similarity};
use cyclic_ssp::kernels::{dirichlet_kernel, KernelSpec};
use cyclic_ssp::sampling::{derive_seed, free_slots, sample_phase_matrix};
use cyclic_ssp::verification::{empirical_profile, profile_report, uniform_grid, ProfileConfig};
use cyclic_ssp::{PeriodicDomain, SamplerSpec};

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn config(embed_dim: usize, replicates: usize, sampler: SamplerSpec, seed: u64) -> ProfileConfig {
    ProfileConfig {
        embed_dim,
        replicates,
        sampler,
        domain: PeriodicDomain::new(1, TAU).unwrap(),
        grid: uniform_grid(-PI, PI, 65).unwrap(),
        master_seed: seed,
    }
}

#[test]
fn mean_similarity_tracks_dirichlet_at_fixed_points() {
    let domain = PeriodicDomain::new(1, TAU).unwrap();
    let sampler = SamplerSpec::uniform(5).unwrap();
    for x in [0.3, 1.0, 2.5] {
        let mean = (0..500)
            .map(|r| {
                let pm = sample_phase_matrix(100, domain, sampler, derive_seed(1, r)).unwrap();
                similarity(&encode(&pm, &[x]).unwrap(), &encode(&pm, &[0.0]).unwrap()).unwrap()
            })
            .sum::<f64>()
            / 500.0;
        let k = dirichlet_kernel(x, 5, TAU).unwrap();
        assert!((mean - k).abs() < 0.05, "x={x}: {mean} vs {k}");
    }
}

/// Pinned slots contribute cos(0) = 1, free pairs contribute k(x) in
/// expectation, so E[s(x)] = (pinned + (d - pinned)·k(x)) / d and the bias
/// is pinned·(1 - k(x))/d: at most pinned/d where k ≥ 0, 2·pinned/d overall.
#[test]
fn slot_level_bias_is_bounded_and_observed() {
    for (d, sampler) in [
        (100, SamplerSpec::uniform(5).unwrap()),
        (33, SamplerSpec::discrete_normal(4, 1.5).unwrap()),
    ] {
        let cfg = ProfileConfig {
            replicates: 4000,
            ..config(d, 1, sampler, 5)
        };
        let profile = empirical_profile(&cfg).unwrap();
        let kernel = KernelSpec::for_sampler(sampler, TAU).unwrap();
        let pinned = (d - 2 * free_slots(d)) as f64;
        for i in 0..profile.len() {
            let k = kernel.eval(profile.displacements()[i]).unwrap();
            let expected = (pinned + (d as f64 - pinned) * k) / d as f64;
            let bias = expected - k;
            assert!((bias - pinned * (1.0 - k) / d as f64).abs() < 1e-15);
            assert!(bias.abs() <= 2.0 * pinned / d as f64 + 1e-15);
            if k >= 0.0 {
                assert!(bias.abs() <= 2.0 / d as f64 + 1e-15);
            }
            let se = profile.empirical_std()[i] / (cfg.replicates as f64).sqrt();
            assert!(
                (profile.empirical_mean()[i] - expected).abs() <= 5.0 * se + 1e-12,
                "d={d} i={i}: mean {} expected {expected} se {se}",
                profile.empirical_mean()[i]
            );
        }
    }
}

#[test]
fn deviation_shrinks_with_embed_dim() {
    let sampler = SamplerSpec::uniform(5).unwrap();
    let dev = |d: usize| {
        median(
            (0..5)
                .map(|s| {
                    profile_report(
                        &empirical_profile(&config(d, 100, sampler, derive_seed(2, s))).unwrap(),
                    )
                    .max_abs_deviation
                })
                .collect(),
        )
    };
    let (small, large) = (dev(64), dev(512));
    assert!(large < small, "d=64: {small}, d=512: {large}");
}

#[test]
fn deviation_does_not_grow_with_replicates() {
    let sampler = SamplerSpec::discrete_normal(5, 1.0).unwrap();
    // (median max deviation, median of the largest per-point standard error)
    let run = |n: usize| {
        let profiles: Vec<_> = (0..5)
            .map(|s| empirical_profile(&config(100, n, sampler, derive_seed(3, s))).unwrap())
            .collect();
        let dev = median(
            profiles
                .iter()
                .map(|p| profile_report(p).max_abs_deviation)
                .collect(),
        );
        let se = median(
            profiles
                .iter()
                .map(|p| p.empirical_std().iter().copied().fold(0.0, f64::max) / (n as f64).sqrt())
                .collect(),
        );
        (dev, se)
    };
    let runs = [run(10), run(100), run(1000)];
    // Past N≈100 the pinned-slot bias dominates, so later steps may only tie
    // up to the Monte-Carlo noise of the smaller run.
    for w in runs.windows(2) {
        assert!(w[1].0 <= w[0].0 + 3.0 * w[0].1, "{runs:?}");
    }
    assert!(runs[2].0 < runs[0].0, "{runs:?}");
}

#[test]
fn figure1_profiles_are_within_tolerance() {
    for sampler in [
        SamplerSpec::uniform(5).unwrap(),
        SamplerSpec::discrete_normal(5, 1.0).unwrap(),
    ] {
        let profile = empirical_profile(&ProfileConfig::figure1(sampler, 99)).unwrap();
        assert_eq!(profile.len(), 257);
        assert_eq!(profile.replicates(), 500);
        let report = profile_report(&profile);
        assert!(report.max_abs_deviation < 0.05, "{sampler:?}: {report:?}");
        assert_eq!(profile.empirical_mean()[128], 1.0);
        assert_eq!(profile.empirical_std()[128], 0.0);
    }
}
