//! Full-length spectrum estimates from sampled submatrices.
//!
//! Every estimator eigendecomposes a small sampled matrix and maps its
//! eigenvalues onto `n` ranks: nonnegative sampled eigenvalues fill the top
//! ranks in order, negative ones fill the bottom ranks in order, and every
//! remaining rank is estimated as zero.

use std::time::{Duration, Instant};

use crate::eigen::{self, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::matrix::{Spectrum, SymMatrix};
use crate::rng::rng_from_seed;
use crate::samplers::{self, MatrixSource, NnzZeroing, NormZeroing, SampledSubmatrix};
use crate::store::SparseSymStore;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplerKind {
    Uniform,
    NnzTheorem,
    NnzPractical,
    NnzSimple,
    NormTheorem,
    NormSimple,
    Entrywise,
    Singular,
    Psd,
}

impl SamplerKind {
    pub const ALL: [SamplerKind; 9] = [
        SamplerKind::Uniform,
        SamplerKind::NnzPractical,
        SamplerKind::NnzTheorem,
        SamplerKind::NnzSimple,
        SamplerKind::NormTheorem,
        SamplerKind::NormSimple,
        SamplerKind::Entrywise,
        SamplerKind::Singular,
        SamplerKind::Psd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SamplerKind::Uniform => "uniform",
            SamplerKind::NnzTheorem => "nnz_theorem",
            SamplerKind::NnzPractical => "nnz_practical",
            SamplerKind::NnzSimple => "nnz_simple",
            SamplerKind::NormTheorem => "norm",
            SamplerKind::NormSimple => "norm_simple",
            SamplerKind::Entrywise => "entrywise",
            SamplerKind::Singular => "singular",
            SamplerKind::Psd => "psd",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

#[derive(Debug, Clone)]
pub struct EstimateReport {
    pub estimates: Spectrum,
    pub sampler: SamplerKind,
    pub s: f64,
    pub sample_size: usize,
    pub zeroed_count: usize,
    pub seed: u64,
    /// Number of sampled eigenvalues that landed in the top ranks.
    pub positive_count: usize,
    /// Distinct matrix entries read, counting each unordered pair once.
    pub entries_read: usize,
    pub elapsed: Duration,
}

impl EstimateReport {
    /// Equality of everything except timing.
    pub fn same_outcome(&self, other: &EstimateReport) -> bool {
        self.estimates == other.estimates
            && self.sampler == other.sampler
            && self.s == other.s
            && self.sample_size == other.sample_size
            && self.zeroed_count == other.zeroed_count
            && self.seed == other.seed
            && self.positive_count == other.positive_count
            && self.entries_read == other.entries_read
    }
}

/// Maps `m` sampled eigenvalues (non-increasing) onto `n` ranks, scaling by
/// `scale`. A sampled eigenvalue equal to zero counts as nonnegative.
pub fn align_estimates(sub_eigs: &Spectrum, n: usize, scale: f64) -> Result<Spectrum> {
    let m = sub_eigs.len();
    if m > n {
        return Err(Error::Dimension { expected: n, got: m });
    }
    check_scale(scale)?;
    let mut out = vec![0.0; n];
    for (i, &lambda) in sub_eigs.values().iter().enumerate() {
        if lambda >= 0.0 {
            out[i] = scale * lambda;
        } else {
            out[n - m + i] = scale * lambda;
        }
    }
    Spectrum::new(out)
}

/// Like [`align_estimates`] but drops negative sampled eigenvalues, for
/// positive semidefinite inputs.
pub fn align_nonnegative(sub_eigs: &Spectrum, n: usize, scale: f64) -> Result<Spectrum> {
    let m = sub_eigs.len();
    if m > n {
        return Err(Error::Dimension { expected: n, got: m });
    }
    check_scale(scale)?;
    let mut out = vec![0.0; n];
    for (slot, &lambda) in out.iter_mut().zip(sub_eigs.values()) {
        if lambda >= 0.0 {
            *slot = scale * lambda;
        }
    }
    Spectrum::new(out)
}

fn check_scale(scale: f64) -> Result<()> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::InvalidArgument(format!("scale must be positive, got {scale}")));
    }
    Ok(())
}

fn nonneg_count(s: &Spectrum) -> usize {
    s.values().iter().filter(|v| **v >= 0.0).count()
}

fn unordered_entries(m: usize) -> usize {
    m * (m + 1) / 2
}

fn finish(
    sub: SampledSubmatrix,
    n: usize,
    scale: f64,
    sampler: SamplerKind,
    s: f64,
    seed: u64,
    started: Instant,
) -> Result<EstimateReport> {
    let eigs = eigen::sym_eigvals(&sub.matrix, DEFAULT_TOL)?;
    let estimates = align_estimates(&eigs, n, scale)?;
    let m = sub.sample.len();
    Ok(EstimateReport {
        positive_count: nonneg_count(&eigs),
        estimates,
        sampler,
        s,
        sample_size: m,
        zeroed_count: sub.zeroed_count,
        seed,
        entries_read: unordered_entries(m),
        elapsed: started.elapsed(),
    })
}

/// Uniform principal-submatrix estimator: eigenvalues of `A_S` scaled by `n/s`.
pub fn estimate_uniform<M: MatrixSource + ?Sized>(a: &M, s: f64, seed: u64) -> Result<EstimateReport> {
    let started = Instant::now();
    let n = a.dim();
    let sub = samplers::uniform_submatrix(a, s, &mut rng_from_seed(seed))?;
    finish(sub, n, n as f64 / s, SamplerKind::Uniform, s, seed, started)
}

/// Sparsity-proportional estimator; rescaling happens inside the sample.
pub fn estimate_nnz(
    store: &SparseSymStore,
    s: f64,
    zeroing: NnzZeroing,
    seed: u64,
) -> Result<EstimateReport> {
    let started = Instant::now();
    let kind = match zeroing {
        NnzZeroing::Theorem { .. } => SamplerKind::NnzTheorem,
        NnzZeroing::Practical { .. } => SamplerKind::NnzPractical,
        NnzZeroing::Off => SamplerKind::NnzSimple,
    };
    let sub = samplers::nnz_submatrix(store, s, zeroing, &mut rng_from_seed(seed))?;
    finish(sub, store.n(), 1.0, kind, s, seed, started)
}

/// Squared-norm-proportional estimator; no bounded-entry assumption.
pub fn estimate_norm(
    store: &SparseSymStore,
    s: f64,
    zeroing: NormZeroing,
    seed: u64,
) -> Result<EstimateReport> {
    let started = Instant::now();
    let kind = match zeroing {
        NormZeroing::Theorem { .. } => SamplerKind::NormTheorem,
        NormZeroing::Off => SamplerKind::NormSimple,
    };
    let sub = samplers::norm_submatrix(store, s, zeroing, &mut rng_from_seed(seed))?;
    finish(sub, store.n(), 1.0, kind, s, seed, started)
}

/// Estimator for positive semidefinite inputs: only nonnegative sampled
/// eigenvalues are kept (scaled by `n/s`), every other rank is zero.
pub fn estimate_psd<M: MatrixSource + ?Sized>(a: &M, s: f64, seed: u64) -> Result<EstimateReport> {
    let started = Instant::now();
    let n = a.dim();
    let sub = samplers::uniform_submatrix(a, s, &mut rng_from_seed(seed))?;
    let eigs = eigen::sym_eigvals(&sub.matrix, DEFAULT_TOL)?;
    let estimates = align_nonnegative(&eigs, n, n as f64 / s)?;
    let m = sub.sample.len();
    Ok(EstimateReport {
        positive_count: nonneg_count(&eigs),
        estimates,
        sampler: SamplerKind::Psd,
        s,
        sample_size: m,
        zeroed_count: 0,
        seed,
        entries_read: unordered_entries(m),
        elapsed: started.elapsed(),
    })
}

/// Singular values of `Z = S̄ A T̄` with independent row and column samples,
/// zero-padded to length `n`. `sample_size` reports `|rows| + |cols|`.
pub fn estimate_singular<M: MatrixSource + ?Sized>(a: &M, s: f64, seed: u64) -> Result<EstimateReport> {
    let started = Instant::now();
    let n = a.dim();
    let z = samplers::rowcol_submatrix(a, s, &mut rng_from_seed(seed))?;
    let (r, c) = (z.rows.len(), z.cols.len());
    let sv = eigen::singular_values(r, c, &z.data, DEFAULT_TOL)?;
    let k = sv.len();
    let mut values = sv;
    values.resize(n, 0.0);
    Ok(EstimateReport {
        estimates: Spectrum::from_unsorted(values),
        sampler: SamplerKind::Singular,
        s,
        sample_size: r + c,
        zeroed_count: 0,
        seed,
        positive_count: k,
        entries_read: r * c,
        elapsed: started.elapsed(),
    })
}

/// Uniform principal submatrix followed by entrywise sparsification with
/// keep probability `p`, eigenvalues scaled by `n/s`.
pub fn estimate_entrywise_pipeline<M: MatrixSource + ?Sized>(
    a: &M,
    s: f64,
    p: f64,
    seed: u64,
) -> Result<EstimateReport> {
    let started = Instant::now();
    let n = a.dim();
    let mut rng = rng_from_seed(seed);
    let sub = samplers::uniform_submatrix(a, s, &mut rng)?;
    let (sparse, kept) = samplers::entrywise_sparsify_counted(&sub.matrix, p, &mut rng)?;
    let eigs = eigen::sym_eigvals(&sparse, DEFAULT_TOL)?;
    let estimates = align_estimates(&eigs, n, n as f64 / s)?;
    let m = sub.sample.len();
    Ok(EstimateReport {
        positive_count: nonneg_count(&eigs),
        estimates,
        sampler: SamplerKind::Entrywise,
        s,
        sample_size: m,
        zeroed_count: 0,
        seed,
        entries_read: m + kept,
        elapsed: started.elapsed(),
    })
}

/// Coordinate-wise median of `trials` independent estimates. `run` receives
/// the trial index and must derive its randomness from it alone.
pub fn median_boost<F>(trials: usize, exec: Execution, run: F) -> Result<Spectrum>
where
    F: Fn(usize) -> Result<Spectrum> + Sync + Send,
{
    if trials == 0 || trials.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "median boosting needs an odd trial count, got {trials}"
        )));
    }
    let runs = exec.map(trials, run).into_iter().collect::<Result<Vec<_>>>()?;
    let n = runs[0].len();
    if let Some(bad) = runs.iter().find(|r| r.len() != n) {
        return Err(Error::Dimension {
            expected: n,
            got: bad.len(),
        });
    }
    let mut column = vec![0.0; trials];
    let medians = (0..n)
        .map(|k| {
            for (slot, r) in column.iter_mut().zip(&runs) {
                *slot = r.values()[k];
            }
            column.sort_by(f64::total_cmp);
            column[trials / 2]
        })
        .collect();
    Ok(Spectrum::from_unsorted(medians))
}

/// Scale-free form of the uniform sample-size law, `log(1/(εδ))·log³n/(ε³δ)`;
/// the unspecified leading constant is left to the caller.
pub fn uniform_sample_law(n: usize, eps: f64, delta: f64) -> f64 {
    let ln = (n as f64).ln();
    (1.0 / (eps * delta)).ln() * ln.powi(3) / (eps.powi(3) * delta)
}

/// Scale-free positive semidefinite law `2/(ε²δ)` (this one has no hidden
/// constant).
pub fn psd_sample_size(eps: f64, delta: f64) -> f64 {
    2.0 / (eps * eps * delta)
}

/// Exact spectrum helper used as the reference for every estimator.
pub fn exact_spectrum(a: &SymMatrix) -> Result<Spectrum> {
    eigen::sym_eigvals(a, DEFAULT_TOL)
}
