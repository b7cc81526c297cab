//! Cyclic spatial semantic pointers.
//!
//! A periodic scalar or vector `x` is embedded as the real inverse DFT of the
//! unit-modulus phasors `exp(j A x)`, where every entry of the phase matrix `A`
//! is an integer multiple of `2π / t₀`. The embedding is therefore exactly
//! periodic with period `t₀` on every axis, and dot products between
//! embeddings approximate a shift-invariant kernel whose spectrum is the
//! distribution the integer indices were drawn from:
//!
//! | sampler                    | induced kernel                       |
//! |----------------------------|--------------------------------------|
//! | uniform on `{-B, …, B}`     | normalized Dirichlet kernel          |
//! | discrete normal, shape `σ` | periodic Gaussian (theta-function ratio) |
//!
//! Modules:
//!
//! - [`domain`]: shared types ([`PeriodicDomain`], [`SamplerSpec`], [`PhaseMatrix`],
//!   [`Embedding`], [`KernelProfile`]) and phase-matrix validation.
//! - [`sampling`]: frequency PMFs and seeded phase-matrix generation.
//! - [`encoder`]: `encode`, `similarity`, `bind`, `unbind`.
//! - [`kernels`]: analytic kernels in finite-sum and closed form.
//! - [`verification`]: Monte-Carlo kernel profiles and the invariant checks.
//!
//! ```
//! use cyclic_ssp::{encoder, sampling, PeriodicDomain, SamplerSpec};
//! use std::f64::consts::TAU;
//!
//! let domain = PeriodicDomain::new(1, TAU).unwrap();
//! let sampler = SamplerSpec::uniform(5).unwrap();
//! let pm = sampling::sample_phase_matrix(100, domain, sampler, 42).unwrap();
//!
//! let a = encoder::encode(&pm, &[0.1]).unwrap();
//! let b = encoder::encode(&pm, &[0.1 + TAU]).unwrap();
//! assert!((encoder::similarity(&a, &b).unwrap() - 1.0).abs() < 1e-9);
//! ```

pub mod domain;
pub mod encoder;
mod error;
pub mod kernels;
pub mod sampling;
pub mod verification;

pub use domain::{
    validate_phase_matrix, Embedding, KernelProfile, PeriodicDomain, PhaseMatrix, SamplerSpec,
    Validation, Violation,
};
pub use error::{Error, Result};
pub use kernels::KernelSpec;
pub use sampling::DiscretePmf;
