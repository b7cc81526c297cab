//! Embedding, similarity and binding.
//!
//! `encode` builds the spectrum `F_k = exp(j·A_k·x)` and returns its inverse
//! DFT under the `1/d` convention. With that convention the embedding has unit
//! norm and `encode(x)·encode(y) = (1/d)·Σ_k cos(A_k·(x - y))`. Binding is
//! circular convolution, which multiplies spectra, so binding two encodings
//! from the same matrix encodes the sum of their inputs.

use std::f64::consts::TAU;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::domain::{Embedding, PhaseMatrix};
use crate::error::{Error, Result};

/// Largest tolerated imaginary part of an inverse-transformed spectrum.
pub const IMAGINARY_RESIDUAL_LIMIT: f64 = 1e-10;

/// Encoder bound to one phase matrix, with its inverse FFT planned once.
pub struct Encoder<'a> {
    pm: &'a PhaseMatrix,
    inverse: Arc<dyn Fft<f64>>,
}

impl<'a> Encoder<'a> {
    pub fn new(pm: &'a PhaseMatrix) -> Self {
        let inverse = FftPlanner::new().plan_fft_inverse(pm.embed_dim());
        Self { pm, inverse }
    }

    pub fn phase_matrix(&self) -> &PhaseMatrix {
        self.pm
    }

    /// Unit-modulus spectrum `exp(j·A_k·x)`, `k = 0..d`.
    pub fn spectrum(&self, x: &[f64]) -> Result<Vec<Complex64>> {
        let domain = self.pm.domain();
        if x.len() != domain.n() {
            return Err(Error::DimensionMismatch {
                expected: domain.n(),
                actual: x.len(),
            });
        }
        if let Some(bad) = x.iter().find(|v| !v.is_finite()) {
            return Err(Error::param(
                "x",
                format!("coordinates must be finite, got {bad}"),
            ));
        }
        let period = domain.period();
        Ok(self
            .pm
            .rows()
            .map(|row| {
                // Phase in turns, reduced before scaling by 2π so shifts of x by
                // whole periods land on the same angle.
                let turns: f64 = row
                    .iter()
                    .zip(x)
                    .map(|(&m, &xj)| m as f64 * (xj / period))
                    .sum();
                Complex64::from_polar(1.0, TAU * turns.rem_euclid(1.0))
            })
            .collect())
    }

    pub fn encode(&self, x: &[f64]) -> Result<Embedding> {
        let mut buf = self.spectrum(x)?;
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.pm.embed_dim() as f64;
        let residual = buf.iter().map(|c| c.im.abs()).fold(0.0, f64::max) * scale;
        if residual > IMAGINARY_RESIDUAL_LIMIT {
            return Err(Error::ImaginaryResidual {
                residual,
                limit: IMAGINARY_RESIDUAL_LIMIT,
            });
        }
        Ok(Embedding::from_values(
            buf.iter().map(|c| c.re * scale).collect(),
        ))
    }
}

/// `φ(x)`: real inverse DFT (`1/d` scaling) of `exp(j·A·x)`.
///
/// Fails on a length mismatch between `x` and the matrix's feature count, and
/// with [`Error::ImaginaryResidual`] when the matrix is not conjugate symmetric.
pub fn encode(pm: &PhaseMatrix, x: &[f64]) -> Result<Embedding> {
    Encoder::new(pm).encode(x)
}

fn check_same_dim(a: &Embedding, b: &Embedding) -> Result<()> {
    if a.embed_dim() != b.embed_dim() {
        return Err(Error::DimensionMismatch {
            expected: a.embed_dim(),
            actual: b.embed_dim(),
        });
    }
    Ok(())
}

/// Dot product.
pub fn similarity(a: &Embedding, b: &Embedding) -> Result<f64> {
    check_same_dim(a, b)?;
    Ok(a.values().iter().zip(b.values()).map(|(x, y)| x * y).sum())
}

/// Circular convolution `c[m] = Σ_i a[i]·b[(m - i) mod d]`.
pub fn bind(a: &Embedding, b: &Embedding) -> Result<Embedding> {
    check_same_dim(a, b)?;
    let d = a.embed_dim();
    if d == 0 {
        return Ok(Embedding::from_values(Vec::new()));
    }
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(d);
    let inverse = planner.plan_fft_inverse(d);

    let mut fa: Vec<Complex64> = a.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut fb: Vec<Complex64> = b.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward.process(&mut fa);
    forward.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inverse.process(&mut fa);
    let scale = 1.0 / d as f64;
    Ok(Embedding::from_values(
        fa.iter().map(|c| c.re * scale).collect(),
    ))
}

/// Index reversal `v[0], v[d-1], …, v[1]`; conjugates the spectrum.
pub fn involution(a: &Embedding) -> Embedding {
    let v = a.values();
    let mut out = Vec::with_capacity(v.len());
    if let Some((&first, rest)) = v.split_first() {
        out.push(first);
        out.extend(rest.iter().rev());
    }
    Embedding::from_values(out)
}

/// `bind(a, involution(b))`; exact inverse of binding with `b` when `b` has a
/// unit-modulus spectrum.
pub fn unbind(a: &Embedding, b: &Embedding) -> Result<Embedding> {
    check_same_dim(a, b)?;
    bind(a, &involution(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{PeriodicDomain, SamplerSpec};
    use crate::sampling::sample_phase_matrix;

    fn matrix(d: usize, n: usize, seed: u64) -> PhaseMatrix {
        let domain = PeriodicDomain::new(n, TAU).unwrap();
        sample_phase_matrix(d, domain, SamplerSpec::uniform(5).unwrap(), seed).unwrap()
    }

    fn max_abs_diff(a: &Embedding, b: &Embedding) -> f64 {
        a.values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    /// Direct `(1/d)·Σ_k cos(θ_k + 2πkm/d)`, independent of the FFT path.
    fn direct_encode(pm: &PhaseMatrix, x: &[f64]) -> Vec<f64> {
        let d = pm.embed_dim();
        let phases: Vec<f64> = (0..d)
            .map(|k| (0..x.len()).map(|j| pm.frequency(k, j) * x[j]).sum())
            .collect();
        (0..d)
            .map(|m| {
                phases
                    .iter()
                    .enumerate()
                    .map(|(k, p)| (p + TAU * (k * m) as f64 / d as f64).cos())
                    .sum::<f64>()
                    / d as f64
            })
            .collect()
    }

    #[test]
    fn encode_origin_is_first_basis_vector() {
        for d in [3, 64, 100, 257] {
            let e = encode(&matrix(d, 2, 1), &[0.0, 0.0]).unwrap();
            assert_eq!(e.values()[0], 1.0);
            assert!(e.values()[1..].iter().all(|v| v.abs() < 1e-15));
        }
    }

    #[test]
    fn fft_path_matches_direct_sum() {
        for (d, seed) in [(7, 2), (64, 3), (101, 4)] {
            let pm = matrix(d, 2, seed);
            let x = [0.37, -2.1];
            let fast = encode(&pm, &x).unwrap();
            let slow = direct_encode(&pm, &x);
            let err = fast
                .values()
                .iter()
                .zip(&slow)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-12, "d={d}: {err}");
        }
    }

    #[test]
    fn period_shift_is_exact() {
        let pm = matrix(100, 1, 5);
        let a = encode(&pm, &[1.234]).unwrap();
        let b = encode(&pm, &[1.234 + TAU]).unwrap();
        assert!(max_abs_diff(&a, &b) < 1e-9);
    }

    #[test]
    fn adjacency_across_the_wrap() {
        let pm = matrix(256, 1, 6);
        let eps = 1e-4;
        let a = encode(&pm, &[eps]).unwrap();
        let b = encode(&pm, &[TAU - eps]).unwrap();
        assert!(similarity(&a, &b).unwrap() > 0.999);
    }

    #[test]
    fn bind_identity_and_commutativity() {
        let pm = matrix(64, 1, 7);
        let e0 = encode(&pm, &[0.0]).unwrap();
        let a = encode(&pm, &[0.9]).unwrap();
        let b = encode(&pm, &[-2.3]).unwrap();
        assert!(max_abs_diff(&bind(&e0, &a).unwrap(), &a) < 1e-12);
        assert!(max_abs_diff(&bind(&a, &b).unwrap(), &bind(&b, &a).unwrap()) < 1e-12);
        assert!(max_abs_diff(&unbind(&a, &e0).unwrap(), &a) < 1e-12);
        assert!(max_abs_diff(&unbind(&a, &a).unwrap(), &e0) < 1e-12);
        let ab = bind(&a, &b).unwrap();
        assert!(max_abs_diff(&unbind(&ab, &b).unwrap(), &a) < 1e-6);
    }

    #[test]
    fn bind_matches_direct_circular_convolution() {
        let a = Embedding::from_values(vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        let b = Embedding::from_values(vec![0.5, -1.0, 0.0, 2.0, 1.5]);
        let c = bind(&a, &b).unwrap();
        for m in 0..5 {
            let expect: f64 = (0..5)
                .map(|i| a.values()[i] * b.values()[(m + 5 - i) % 5])
                .sum();
            assert!((c.values()[m] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn involution_reverses_tail() {
        let a = Embedding::from_values(vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(involution(&a).values(), &[1.0, 4.0, 3.0, 2.0]);
    }

    #[test]
    fn dimension_errors() {
        let pm = matrix(10, 2, 8);
        assert!(matches!(
            encode(&pm, &[0.1]),
            Err(Error::DimensionMismatch {
                expected: 2,
                actual: 1
            })
        ));
        assert!(encode(&pm, &[0.1, f64::NAN]).is_err());
        let a = Embedding::from_values(vec![1.0, 0.0, 0.0]);
        let b = Embedding::from_values(vec![1.0, 0.0]);
        assert!(similarity(&a, &b).is_err());
        assert!(bind(&a, &b).is_err());
        assert!(unbind(&a, &b).is_err());
    }

    #[test]
    fn broken_symmetry_is_an_error() {
        let mut pm = matrix(16, 1, 9);
        pm.set_index(3, 0, 4);
        pm.set_index(13, 0, 4);
        assert!(matches!(
            encode(&pm, &[0.7]),
            Err(Error::ImaginaryResidual { .. })
        ));
    }
}
