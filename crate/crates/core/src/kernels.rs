//! Analytic kernels induced by the two samplers.
//!
//! Every 1-D kernel here is even and `t₀`-periodic. Inputs are first reduced
//! to an angle `θ = 2π·x/t₀ ∈ [-π, π]`, so values at `x` and `x + k·t₀` agree
//! to rounding.
//!
//! The periodic Gaussian exists in two forms. [`periodic_gaussian_kernel`] is
//! the finite-band cosine sum, which is exactly what a `DiscreteNormal`
//! sampler induces. [`periodic_gaussian_theta`] is the infinite-band limit, a
//! ratio of theta functions with nome `τ = exp(-(2π/t₀)² / (2σ²))`. Writing
//! the nome as `exp(-(2π/t₀)² / (2σ))` (a common transcription) only matches
//! the finite sum at `σ = 1`; the acceptance suite checks both.

use std::f64::consts::TAU;

use crate::domain::SamplerSpec;
use crate::error::{Error, Result};
use crate::sampling::gaussian_weight;

/// Below this `|sin(θ/2)|` the Dirichlet ratio switches to the cosine sum.
const RATIO_SINGULARITY: f64 = 1e-8;
/// Theta terms stop once `τ^{i²} < THETA_TAIL·(1 - τ)`.
const THETA_TAIL: f64 = 1e-16;
/// Nomes above this use the finite cosine sum instead of the theta series.
const THETA_SERIES_MAX_NOME: f64 = 0.999;
const MAX_HARMONICS: usize = 1_000_000;

/// Which analytic kernel, with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    Dirichlet { band: u32, period: f64 },
    PeriodicGaussian { band: u32, sigma: f64, period: f64 },
}

impl KernelSpec {
    pub fn dirichlet(band: u32, period: f64) -> Result<Self> {
        check_band(band)?;
        check_period(period)?;
        Ok(KernelSpec::Dirichlet { band, period })
    }

    pub fn periodic_gaussian(band: u32, sigma: f64, period: f64) -> Result<Self> {
        check_band(band)?;
        check_sigma(sigma)?;
        check_period(period)?;
        Ok(KernelSpec::PeriodicGaussian {
            band,
            sigma,
            period,
        })
    }

    /// The kernel a sampler induces on a domain with the given period.
    pub fn for_sampler(sampler: SamplerSpec, period: f64) -> Result<Self> {
        match sampler {
            SamplerSpec::UniformBand { band } => Self::dirichlet(band, period),
            SamplerSpec::DiscreteNormal { band, sigma } => {
                Self::periodic_gaussian(band, sigma, period)
            }
        }
    }

    pub fn period(&self) -> f64 {
        match *self {
            KernelSpec::Dirichlet { period, .. } | KernelSpec::PeriodicGaussian { period, .. } => {
                period
            }
        }
    }

    /// 1-D kernel value at displacement `x`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        match *self {
            KernelSpec::Dirichlet { band, period } => dirichlet_kernel(x, band, period),
            KernelSpec::PeriodicGaussian {
                band,
                sigma,
                period,
            } => periodic_gaussian_kernel(x, band, sigma, period),
        }
    }
}

fn check_band(band: u32) -> Result<()> {
    if band < 1 {
        return Err(Error::param("band", "must be at least 1"));
    }
    Ok(())
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::param(
            "sigma",
            format!("must be finite and > 0, got {sigma}"),
        ));
    }
    Ok(())
}

fn check_period(period: f64) -> Result<()> {
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::param(
            "period",
            format!("must be finite and > 0, got {period}"),
        ));
    }
    Ok(())
}

/// `2π·x/t₀` reduced to `[-π, π]`.
fn reduced_angle(x: f64, period: f64) -> f64 {
    let turns = x / period;
    TAU * (turns - turns.round())
}

fn dirichlet_sum(theta: f64, band: u32) -> f64 {
    let harmonics: f64 = (1..=band).map(|m| (m as f64 * theta).cos()).sum();
    (1.0 + 2.0 * harmonics) / (2 * band + 1) as f64
}

/// Normalized Dirichlet kernel, `(1/(2B+1))·Σ_{m=-B}^{B} cos(2πm·x/t₀)`.
pub fn dirichlet_kernel(x: f64, band: u32, period: f64) -> Result<f64> {
    check_band(band)?;
    check_period(period)?;
    Ok(dirichlet_sum(reduced_angle(x, period), band))
}

/// Closed form `sin((2B+1)θ/2) / ((2B+1)·sin(θ/2))` of the normalized
/// Dirichlet kernel, falling back to the cosine sum next to `θ ∈ 2πℤ`.
pub fn dirichlet_kernel_closed(x: f64, band: u32, period: f64) -> Result<f64> {
    check_band(band)?;
    check_period(period)?;
    let theta = reduced_angle(x, period);
    let half = (0.5 * theta).sin();
    if half.abs() < RATIO_SINGULARITY {
        return Ok(dirichlet_sum(theta, band));
    }
    let width = (2 * band + 1) as f64;
    Ok((0.5 * width * theta).sin() / (width * half))
}

/// Periodic Gaussian kernel over a finite band: cosine sum with weights
/// `exp(-ω_m²/(2σ²))` at `ω_m = 2πm/t₀`, divided by the sum of the weights.
pub fn periodic_gaussian_kernel(x: f64, band: u32, sigma: f64, period: f64) -> Result<f64> {
    check_band(band)?;
    check_sigma(sigma)?;
    check_period(period)?;
    let theta = reduced_angle(x, period);
    let (mut num, mut den) = (0.0, 0.0);
    for m in 1..=band {
        let w = gaussian_weight(u64::from(m), sigma, period);
        num += w * (f64::from(m) * theta).cos();
        den += w;
    }
    Ok((1.0 + 2.0 * num) / (1.0 + 2.0 * den))
}

/// Theta series `1 + 2·Σ_{i=1}^{truncation} τ^{i²}·cos(2iz)`.
pub fn theta(z: f64, tau: f64, truncation: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&tau) {
        return Err(Error::param(
            "tau",
            format!("nome must lie in [0, 1), got {tau}"),
        ));
    }
    let tail: f64 = (1..=truncation)
        .map(|i| {
            let i = i as f64;
            tau.powf(i * i) * (2.0 * i * z).cos()
        })
        .sum();
    Ok(1.0 + 2.0 * tail)
}

/// Number of theta terms needed for `τ^{i²} < 1e-16·(1 - τ)` past the last one.
pub fn theta_truncation(tau: f64) -> usize {
    if tau <= 0.0 {
        return 0;
    }
    let log_tol = (THETA_TAIL * (1.0 - tau)).ln();
    (log_tol / tau.ln()).sqrt().ceil() as usize
}

/// Nome of the infinite-band periodic Gaussian: `exp(-(2π/t₀)² / (2σ²))`.
pub fn gaussian_nome(sigma: f64, period: f64) -> f64 {
    gaussian_weight(1, sigma, period)
}

/// Periodic Gaussian kernel as the theta ratio `θ(πx/t₀, τ) / θ(0, τ)`.
///
/// Equals [`periodic_gaussian_kernel`] in the limit of infinite band. For
/// nomes above 0.999 the series converges slowly and the finite sum over the
/// same number of harmonics is used instead.
pub fn periodic_gaussian_theta(x: f64, sigma: f64, period: f64) -> Result<f64> {
    check_sigma(sigma)?;
    check_period(period)?;
    let tau = gaussian_nome(sigma, period);
    if tau >= 1.0 {
        return Err(Error::param(
            "sigma",
            format!("nome rounds to 1 for sigma={sigma}, period={period}; kernel is degenerate"),
        ));
    }
    let terms = theta_truncation(tau);
    if tau > THETA_SERIES_MAX_NOME {
        if terms > MAX_HARMONICS {
            return Err(Error::param(
                "sigma",
                format!("needs {terms} harmonics (limit {MAX_HARMONICS}); sigma*period too large"),
            ));
        }
        return periodic_gaussian_kernel(x, terms as u32, sigma, period);
    }
    let z = 0.5 * reduced_angle(x, period);
    Ok(theta(z, tau, terms)? / theta(0.0, tau, terms)?)
}

/// `K(x) = Π_i k(x_i)` for the finite-band kernel in `spec`.
pub fn product_kernel(xs: &[f64], spec: &KernelSpec) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::param("xs", "needs at least one coordinate"));
    }
    xs.iter().try_fold(1.0, |acc, &x| Ok(acc * spec.eval(x)?))
}

/// `K(x) = Π_i θ(πx_i/t₀, τ) / θ(0, τ)^n`, the infinite-band Gaussian product.
pub fn product_kernel_theta(xs: &[f64], sigma: f64, period: f64) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::param("xs", "needs at least one coordinate"));
    }
    xs.iter().try_fold(1.0, |acc, &x| {
        Ok(acc * periodic_gaussian_theta(x, sigma, period)?)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn dirichlet_values() {
        assert_eq!(dirichlet_kernel(0.0, 5, TAU).unwrap(), 1.0);
        let v = dirichlet_kernel(PI, 1, TAU).unwrap();
        assert!((v + 1.0 / 3.0).abs() < 1e-15);
        for k in [-3.0, -1.0, 1.0, 2.0, 7.0] {
            assert!((dirichlet_kernel(k * 2.5, 4, 2.5).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dirichlet_closed_matches_at_and_near_lattice() {
        for x in [0.0, 1e-9, -1e-7, TAU, TAU - 1e-7, -TAU + 3e-7, 1.0, 2.0, PI] {
            let s = dirichlet_kernel(x, 5, TAU).unwrap();
            let c = dirichlet_kernel_closed(x, 5, TAU).unwrap();
            assert!((s - c).abs() < 1e-9, "x={x}: {s} vs {c}");
        }
        assert_eq!(dirichlet_kernel_closed(0.0, 3, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn gaussian_values() {
        assert_eq!(periodic_gaussian_kernel(0.0, 5, 1.0, TAU).unwrap(), 1.0);
        // (1 - 2e^{-1/2}) / (1 + 2e^{-1/2}); mpmath, 30 digits.
        let v = periodic_gaussian_kernel(PI, 1, 1.0, TAU).unwrap();
        assert!((v - (-0.096_274_476_244_787_912)).abs() < 1e-15);
        for x in [0.3, 1.7, 2.9] {
            let a = periodic_gaussian_kernel(x, 5, 0.7, 3.0).unwrap();
            let b = periodic_gaussian_kernel(-x, 5, 0.7, 3.0).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn theta_values() {
        for z in [0.0, 0.4, 2.0] {
            assert_eq!(theta(z, 0.0, 10).unwrap(), 1.0);
        }
        // Direct partial sums and mpmath jtheta(3, 0, 0.5) agree: 2.12893682721187716
        assert!((theta(0.0, 0.5, 20).unwrap() - 2.128_936_827_211_877_2).abs() < 1e-14);
        // cos(iπ) = (-1)^i: 1 - 2τ + 2τ⁴ - 2τ⁹ + …; mpmath at τ = 0.3
        let alt = theta(PI / 2.0, 0.3, 20).unwrap();
        assert!((alt - 0.416_160_642_609_174_76).abs() < 1e-14);
        assert!(theta(0.0, 1.0, 5).is_err());
        assert!(theta(0.0, -0.1, 5).is_err());
    }

    #[test]
    fn theta_truncation_bounds_tail() {
        for tau in [0.1, 0.5, 0.9, 0.99, 0.999] {
            let n = theta_truncation(tau);
            let next = (n + 1) as f64;
            assert!(
                tau.powf(next * next) < 1e-16 * (1.0 - tau),
                "tau={tau} n={n}"
            );
        }
        assert_eq!(theta_truncation(0.0), 0);
    }

    #[test]
    fn theta_form_values() {
        assert_eq!(periodic_gaussian_theta(0.0, 1.0, TAU).unwrap(), 1.0);
        let t = periodic_gaussian_theta(PI, 1.0, TAU).unwrap();
        let s = periodic_gaussian_kernel(PI, 50, 1.0, TAU).unwrap();
        assert!((t - s).abs() < 1e-6);
        assert!((periodic_gaussian_theta(TAU, 1.0, TAU).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn theta_form_wide_nome_falls_back_to_sum() {
        // sigma·t₀ large enough that τ > 0.999
        let (sigma, period) = (40.0, TAU);
        assert!(gaussian_nome(sigma, period) > 0.999);
        let t = periodic_gaussian_theta(0.05, sigma, period).unwrap();
        let s = periodic_gaussian_kernel(0.05, 400, sigma, period).unwrap();
        assert!((t - s).abs() < 1e-12);
        assert!(periodic_gaussian_theta(0.1, 1e12, 1.0).is_err());
    }

    #[test]
    fn product_kernel_cases() {
        let spec = KernelSpec::dirichlet(5, TAU).unwrap();
        assert_eq!(product_kernel(&[0.0, 0.0, 0.0], &spec).unwrap(), 1.0);
        let k = spec.eval(0.8).unwrap();
        assert_eq!(product_kernel(&[0.8, 0.0], &spec).unwrap(), k);
        assert!(product_kernel(&[], &spec).is_err());
        let th = product_kernel_theta(&[0.4, 1.1], 1.0, TAU).unwrap();
        let direct = periodic_gaussian_theta(0.4, 1.0, TAU).unwrap()
            * periodic_gaussian_theta(1.1, 1.0, TAU).unwrap();
        assert_eq!(th, direct);
    }

    #[test]
    fn invalid_parameters() {
        assert!(dirichlet_kernel(0.0, 0, 1.0).is_err());
        assert!(dirichlet_kernel(0.0, 1, 0.0).is_err());
        assert!(periodic_gaussian_kernel(0.0, 1, -1.0, 1.0).is_err());
        assert!(periodic_gaussian_theta(0.0, 1.0, f64::NAN).is_err());
        assert!(KernelSpec::periodic_gaussian(2, 0.0, 1.0).is_err());
    }
}
