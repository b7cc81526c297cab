//! Shared domain types and phase-matrix validation.
//!
//! Phase frequencies are never stored as radians. A [`PhaseMatrix`] holds the
//! integer index `m` of each entry, and the frequency is `2π·m / t₀`. Shifting
//! any input coordinate by `t₀` then moves every phase by an exact integer
//! number of turns.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Feature space: `n` periodic axes sharing period `t₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicDomain {
    n: usize,
    period: f64,
}

impl PeriodicDomain {
    pub fn new(n: usize, period: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param(
                "n",
                "feature dimensionality must be at least 1",
            ));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::param(
                "period",
                format!("must be finite and > 0, got {period}"),
            ));
        }
        Ok(Self { n, period })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }
}

/// Distribution of the integer frequency indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SamplerDoc", into = "SamplerDoc")]
pub enum SamplerSpec {
    /// Uniform over `{-band, …, band}`; induces the normalized Dirichlet kernel.
    UniformBand { band: u32 },
    /// Gaussian weights `exp(-ω²/(2σ²))` at `ω = 2πm/t₀`, truncated to
    /// `{-band, …, band}`; induces the periodic Gaussian kernel.
    DiscreteNormal { band: u32, sigma: f64 },
}

impl SamplerSpec {
    pub fn uniform(band: u32) -> Result<Self> {
        let spec = SamplerSpec::UniformBand { band };
        spec.check()?;
        Ok(spec)
    }

    pub fn discrete_normal(band: u32, sigma: f64) -> Result<Self> {
        let spec = SamplerSpec::DiscreteNormal { band, sigma };
        spec.check()?;
        Ok(spec)
    }

    pub fn band(&self) -> u32 {
        match *self {
            SamplerSpec::UniformBand { band } | SamplerSpec::DiscreteNormal { band, .. } => band,
        }
    }

    pub fn sigma(&self) -> Option<f64> {
        match *self {
            SamplerSpec::UniformBand { .. } => None,
            SamplerSpec::DiscreteNormal { sigma, .. } => Some(sigma),
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            SamplerSpec::UniformBand { .. } => "UniformBand",
            SamplerSpec::DiscreteNormal { .. } => "DiscreteNormal",
        }
    }

    pub(crate) fn check(&self) -> Result<()> {
        if self.band() < 1 {
            return Err(Error::param("band", "must be at least 1"));
        }
        if let Some(sigma) = self.sigma() {
            if !(sigma.is_finite() && sigma > 0.0) {
                return Err(Error::param(
                    "sigma",
                    format!("must be finite and > 0, got {sigma}"),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
enum SamplerVariant {
    UniformBand,
    DiscreteNormal,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SamplerDoc {
    variant: SamplerVariant,
    band: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma: Option<f64>,
}

impl TryFrom<SamplerDoc> for SamplerSpec {
    type Error = Error;

    fn try_from(doc: SamplerDoc) -> Result<Self> {
        match (doc.variant, doc.sigma) {
            (SamplerVariant::UniformBand, _) => SamplerSpec::uniform(doc.band),
            (SamplerVariant::DiscreteNormal, Some(sigma)) => {
                SamplerSpec::discrete_normal(doc.band, sigma)
            }
            (SamplerVariant::DiscreteNormal, None) => {
                Err(Error::param("sigma", "required for DiscreteNormal"))
            }
        }
    }
}

impl From<SamplerSpec> for SamplerDoc {
    fn from(spec: SamplerSpec) -> Self {
        match spec {
            SamplerSpec::UniformBand { band } => SamplerDoc {
                variant: SamplerVariant::UniformBand,
                band,
                sigma: None,
            },
            SamplerSpec::DiscreteNormal { band, sigma } => SamplerDoc {
                variant: SamplerVariant::DiscreteNormal,
                band,
                sigma: Some(sigma),
            },
        }
    }
}

/// The `d × n` matrix of integer frequency indices behind an embedding.
///
/// Row `k` is the Fourier slot, column `j` the feature axis. A well-formed
/// matrix is conjugate symmetric: row 0 (and row `d/2` for even `d`) is zero
/// and row `d - k` is the negation of row `k`. Construction through
/// [`PhaseMatrix::from_parts`] only checks the shape, so malformed matrices
/// can be loaded and inspected with [`validate_phase_matrix`];
/// [`crate::sampling::sample_phase_matrix`] always produces valid ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PhaseMatrixDoc", into = "PhaseMatrixDoc")]
pub struct PhaseMatrix {
    embed_dim: usize,
    domain: PeriodicDomain,
    sampler: SamplerSpec,
    seed: u64,
    /// Row-major, `embed_dim * domain.n` entries.
    indices: Vec<i64>,
}

impl PhaseMatrix {
    pub fn from_parts(
        embed_dim: usize,
        domain: PeriodicDomain,
        sampler: SamplerSpec,
        seed: u64,
        rows: Vec<Vec<i64>>,
    ) -> Result<Self> {
        if rows.len() != embed_dim {
            return Err(Error::MalformedMatrix(format!(
                "expected {embed_dim} rows, found {}",
                rows.len()
            )));
        }
        let n = domain.n();
        let mut indices = Vec::with_capacity(embed_dim * n);
        for (k, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::MalformedMatrix(format!(
                    "row {k} has {} entries, expected {n}",
                    row.len()
                )));
            }
            indices.extend(row);
        }
        Ok(Self {
            embed_dim,
            domain,
            sampler,
            seed,
            indices,
        })
    }

    pub(crate) fn from_flat(
        embed_dim: usize,
        domain: PeriodicDomain,
        sampler: SamplerSpec,
        seed: u64,
        indices: Vec<i64>,
    ) -> Self {
        debug_assert_eq!(indices.len(), embed_dim * domain.n());
        Self {
            embed_dim,
            domain,
            sampler,
            seed,
            indices,
        }
    }

    pub fn embed_dim(&self) -> usize {
        self.embed_dim
    }

    pub fn domain(&self) -> PeriodicDomain {
        self.domain
    }

    pub fn sampler(&self) -> SamplerSpec {
        self.sampler
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Integer index `m` of slot `k`, axis `j`.
    pub fn index(&self, k: usize, j: usize) -> i64 {
        self.indices[k * self.domain.n() + j]
    }

    /// All indices of Fourier slot `k`, one per feature axis.
    pub fn row(&self, k: usize) -> &[i64] {
        let n = self.domain.n();
        &self.indices[k * n..(k + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i64]> {
        self.indices.chunks_exact(self.domain.n())
    }

    /// Frequency in radians per unit of `x`: `2π·m / t₀`.
    pub fn frequency(&self, k: usize, j: usize) -> f64 {
        std::f64::consts::TAU * self.index(k, j) as f64 / self.domain.period()
    }

    /// Overwrites a single index. Intended for building negative controls;
    /// the result may violate conjugate symmetry.
    pub fn set_index(&mut self, k: usize, j: usize, value: i64) {
        let n = self.domain.n();
        self.indices[k * n + j] = value;
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Serialize, Deserialize)]
struct PhaseMatrixDoc {
    embed_dim: usize,
    n: usize,
    period: f64,
    sampler: SamplerSpec,
    seed: u64,
    index_matrix: Vec<Vec<i64>>,
}

impl TryFrom<PhaseMatrixDoc> for PhaseMatrix {
    type Error = Error;

    fn try_from(doc: PhaseMatrixDoc) -> Result<Self> {
        let domain = PeriodicDomain::new(doc.n, doc.period)?;
        PhaseMatrix::from_parts(
            doc.embed_dim,
            domain,
            doc.sampler,
            doc.seed,
            doc.index_matrix,
        )
    }
}

impl From<PhaseMatrix> for PhaseMatrixDoc {
    fn from(pm: PhaseMatrix) -> Self {
        let index_matrix = pm.rows().map(<[i64]>::to_vec).collect();
        PhaseMatrixDoc {
            embed_dim: pm.embed_dim,
            n: pm.domain.n(),
            period: pm.domain.period(),
            sampler: pm.sampler,
            seed: pm.seed,
            index_matrix,
        }
    }
}

/// One broken phase-matrix invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    EmbedDimTooSmall {
        embed_dim: usize,
    },
    IndexOutOfBand {
        row: usize,
        col: usize,
        value: i64,
        band: u32,
    },
    DcSlotNonzero {
        col: usize,
        value: i64,
    },
    NyquistSlotNonzero {
        col: usize,
        value: i64,
    },
    PairNotNegated {
        row: usize,
        mirror: usize,
        col: usize,
        value: i64,
        mirror_value: i64,
    },
}

impl Violation {
    /// True for the violations that break real-valuedness of the embedding.
    pub fn is_conjugate_symmetry(&self) -> bool {
        matches!(
            self,
            Violation::DcSlotNonzero { .. }
                | Violation::NyquistSlotNonzero { .. }
                | Violation::PairNotNegated { .. }
        )
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::EmbedDimTooSmall { embed_dim } => {
                write!(f, "embed_dim {embed_dim} < 3")
            }
            Violation::IndexOutOfBand { row, col, value, band } => {
                write!(f, "index m[{row},{col}] = {value} exceeds band {band}")
            }
            Violation::DcSlotNonzero { col, value } => {
                write!(f, "conjugate symmetry: DC slot m[0,{col}] = {value}, expected 0")
            }
            Violation::NyquistSlotNonzero { col, value } => {
                write!(f, "conjugate symmetry: Nyquist slot column {col} = {value}, expected 0")
            }
            Violation::PairNotNegated { row, mirror, col, value, mirror_value } => write!(
                f,
                "conjugate symmetry: m[{mirror},{col}] = {mirror_value} is not -m[{row},{col}] = {}",
                -value
            ),
        }
    }
}

/// Outcome of [`validate_phase_matrix`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Validation {
    pub violations: Vec<Violation>,
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_phase_matrix(pm: &PhaseMatrix) -> Validation {
    let d = pm.embed_dim();
    let n = pm.domain().n();
    let band = pm.sampler().band();
    let mut violations = Vec::new();

    if d < 3 {
        violations.push(Violation::EmbedDimTooSmall { embed_dim: d });
    }
    for (row, values) in pm.rows().enumerate() {
        for (col, &value) in values.iter().enumerate() {
            if value.unsigned_abs() > u64::from(band) {
                violations.push(Violation::IndexOutOfBand {
                    row,
                    col,
                    value,
                    band,
                });
            }
        }
    }
    if d == 0 {
        return Validation { violations };
    }
    for col in 0..n {
        let value = pm.index(0, col);
        if value != 0 {
            violations.push(Violation::DcSlotNonzero { col, value });
        }
    }
    if d.is_multiple_of(2) {
        for col in 0..n {
            let value = pm.index(d / 2, col);
            if value != 0 {
                violations.push(Violation::NyquistSlotNonzero { col, value });
            }
        }
    }
    // Each unordered pair once; the Nyquist row is its own mirror.
    for row in 1..d.div_ceil(2) {
        let mirror = d - row;
        for col in 0..n {
            let value = pm.index(row, col);
            let mirror_value = pm.index(mirror, col);
            if mirror_value != -value {
                violations.push(Violation::PairNotNegated {
                    row,
                    mirror,
                    col,
                    value,
                    mirror_value,
                });
            }
        }
    }
    Validation { violations }
}

/// A real embedding vector.
///
/// Vectors returned by [`crate::encoder::encode`] have unit Euclidean norm
/// (within 1e-9). [`Embedding::from_values`] accepts any vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    values: Vec<f64>,
}

impl Embedding {
    pub fn from_values(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn embed_dim(&self) -> usize {
        self.values.len()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Analytic kernel alongside empirical dot-product statistics on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelProfile {
    displacements: Vec<f64>,
    analytic: Vec<f64>,
    empirical_mean: Vec<f64>,
    empirical_std: Vec<f64>,
    replicates: usize,
}

impl KernelProfile {
    pub fn new(
        displacements: Vec<f64>,
        analytic: Vec<f64>,
        empirical_mean: Vec<f64>,
        empirical_std: Vec<f64>,
        replicates: usize,
    ) -> Result<Self> {
        let len = displacements.len();
        for (name, v) in [
            ("analytic", &analytic),
            ("empirical_mean", &empirical_mean),
            ("empirical_std", &empirical_std),
        ] {
            if v.len() != len {
                return Err(Error::param(
                    name,
                    format!("length {} != grid length {len}", v.len()),
                ));
            }
        }
        if empirical_std.iter().any(|s| s.is_nan() || *s < 0.0) {
            return Err(Error::param("empirical_std", "entries must be >= 0"));
        }
        if replicates == 0 {
            return Err(Error::param("replicates", "must be at least 1"));
        }
        Ok(Self {
            displacements,
            analytic,
            empirical_mean,
            empirical_std,
            replicates,
        })
    }

    pub fn displacements(&self) -> &[f64] {
        &self.displacements
    }

    pub fn analytic(&self) -> &[f64] {
        &self.analytic
    }

    pub fn empirical_mean(&self) -> &[f64] {
        &self.empirical_mean
    }

    pub fn empirical_std(&self) -> &[f64] {
        &self.empirical_std
    }

    pub fn replicates(&self) -> usize {
        self.replicates
    }

    pub fn len(&self) -> usize {
        self.displacements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.displacements.is_empty()
    }
}
