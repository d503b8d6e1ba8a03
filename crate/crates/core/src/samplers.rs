//! Random submatrix construction: index selection, rescaling and zeroing.

use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::store::{RowWeight, SparseSymStore};

/// A symmetric matrix from which principal and cross submatrices can be cut.
pub trait MatrixSource: Sync {
    fn dim(&self) -> usize;
    fn principal_submatrix(&self, indices: &[usize]) -> SymMatrix;
    /// Row-major `rows.len() × cols.len()` block.
    fn cross_submatrix(&self, rows: &[usize], cols: &[usize]) -> Vec<f64>;
}

impl MatrixSource for SymMatrix {
    fn dim(&self) -> usize {
        self.n()
    }

    fn principal_submatrix(&self, indices: &[usize]) -> SymMatrix {
        SymMatrix::principal_submatrix(self, indices)
    }

    fn cross_submatrix(&self, rows: &[usize], cols: &[usize]) -> Vec<f64> {
        let mut out = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            let row = self.row(r);
            out.extend(cols.iter().map(|&c| row[c]));
        }
        out
    }
}

impl MatrixSource for SparseSymStore {
    fn dim(&self) -> usize {
        self.n()
    }

    fn principal_submatrix(&self, indices: &[usize]) -> SymMatrix {
        let pos = positions(self.n(), indices);
        let m = indices.len();
        let mut data = vec![0.0; m * m];
        for (a, &i) in indices.iter().enumerate() {
            for &(j, v) in self.row(i) {
                if let Some(b) = pos[j] {
                    data[a * m + b] = v;
                }
            }
        }
        SymMatrix::from_raw_unchecked(m, data)
    }

    fn cross_submatrix(&self, rows: &[usize], cols: &[usize]) -> Vec<f64> {
        let pos = positions(self.n(), cols);
        let c = cols.len();
        let mut out = vec![0.0; rows.len() * c];
        for (a, &i) in rows.iter().enumerate() {
            for &(j, v) in self.row(i) {
                if let Some(b) = pos[j] {
                    out[a * c + b] = v;
                }
            }
        }
        out
    }
}

fn positions(n: usize, indices: &[usize]) -> Vec<Option<usize>> {
    let mut pos = vec![None; n];
    for (a, &i) in indices.iter().enumerate() {
        pos[i] = Some(a);
    }
    pos
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingMode {
    Uniform,
    Nnz,
    SqNorm,
}

/// Sampled indices with the probability each was included under.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub indices: Vec<usize>,
    pub probs: Vec<f64>,
    pub mode: SamplingMode,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    fn empty(mode: SamplingMode) -> Self {
        SampleSet {
            indices: Vec::new(),
            probs: Vec::new(),
            mode,
        }
    }
}

/// Independent Bernoulli inclusion of every index. One uniform draw is
/// consumed per index regardless of its probability, so two samplers with
/// equal probability vectors select identical sets from identical streams.
pub fn bernoulli_select<R: Rng + ?Sized>(probs: &[f64], mode: SamplingMode, rng: &mut R) -> SampleSet {
    let mut set = SampleSet::empty(mode);
    for (i, &p) in probs.iter().enumerate() {
        if rng.random::<f64>() < p {
            set.indices.push(i);
            set.probs.push(p);
        }
    }
    set
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scaling {
    None,
    InverseSqrtProb,
}

#[derive(Debug, Clone)]
pub struct SampledSubmatrix {
    pub sample: SampleSet,
    pub matrix: SymMatrix,
    /// Structurally nonzero entries removed by the zeroing rule; each
    /// unordered off-diagonal pair counts once.
    pub zeroed_count: usize,
    pub scaling: Scaling,
}

impl SampledSubmatrix {
    fn empty(mode: SamplingMode, scaling: Scaling) -> Self {
        SampledSubmatrix {
            sample: SampleSet::empty(mode),
            matrix: SymMatrix::zeros(0),
            zeroed_count: 0,
            scaling,
        }
    }
}

/// Zeroing applied after sparsity-proportional sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NnzZeroing {
    /// Zero the diagonal and pairs with `nnz_i·nnz_j < ε²·nnz/(c₂·ln²n)`.
    Theorem { eps: f64, c2: f64 },
    /// Zero the diagonal and pairs with `nnz_i·nnz_j < nnz/(c₂·s)`.
    Practical { c2: f64 },
    /// Rescale only (the "simple sparsity sampler").
    Off,
}

/// Zeroing applied after squared-norm sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormZeroing {
    /// Diagonal: zero when `‖A_i‖² < (ε²/4)‖A‖_F²`. Off-diagonal: zero when
    /// `‖A_i‖²‖A_j‖² < ε²‖A‖_F²|A_ij|²/(c₂·ln⁴n)`.
    Theorem { eps: f64, c2: f64 },
    Off,
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0, 1), got {eps}")));
    }
    Ok(())
}

fn check_c2(c2: f64) -> Result<()> {
    if !(c2 > 0.0) || !c2.is_finite() {
        return Err(Error::InvalidArgument(format!("c2 must be positive, got {c2}")));
    }
    Ok(())
}

fn check_s(s: f64) -> Result<()> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidArgument(format!("sample size must be positive, got {s}")));
    }
    Ok(())
}

/// Predicate deciding whether entry `(i, j)` of the original matrix is
/// zeroed. Depends only on row aggregates and the entry itself.
#[derive(Debug, Clone, Copy)]
enum ZeroRule {
    Off,
    NnzBelow { threshold: f64 },
    Norm { diag_threshold: f64, offdiag_scale: f64 },
}

impl ZeroRule {
    fn for_nnz(store: &SparseSymStore, s: f64, zeroing: NnzZeroing) -> Result<Self> {
        let nnz = store.total_nnz() as f64;
        Ok(match zeroing {
            NnzZeroing::Off => ZeroRule::Off,
            NnzZeroing::Theorem { eps, c2 } => {
                check_eps(eps)?;
                check_c2(c2)?;
                let ln = (store.n() as f64).ln();
                ZeroRule::NnzBelow {
                    threshold: eps * eps * nnz / (c2 * ln * ln),
                }
            }
            NnzZeroing::Practical { c2 } => {
                check_c2(c2)?;
                ZeroRule::NnzBelow {
                    threshold: nnz / (c2 * s),
                }
            }
        })
    }

    fn for_norm(store: &SparseSymStore, zeroing: NormZeroing) -> Result<Self> {
        Ok(match zeroing {
            NormZeroing::Off => ZeroRule::Off,
            NormZeroing::Theorem { eps, c2 } => {
                check_eps(eps)?;
                check_c2(c2)?;
                let ln = (store.n() as f64).ln();
                let fro = store.frob_sq();
                ZeroRule::Norm {
                    diag_threshold: 0.25 * eps * eps * fro,
                    offdiag_scale: eps * eps * fro / (c2 * ln.powi(4)),
                }
            }
        })
    }

    #[inline]
    fn zeroes(&self, store: &SparseSymStore, i: usize, j: usize, value: f64) -> bool {
        match *self {
            ZeroRule::Off => false,
            ZeroRule::NnzBelow { threshold } => {
                i == j || (store.row_nnz(i) as f64) * (store.row_nnz(j) as f64) < threshold
            }
            ZeroRule::Norm {
                diag_threshold,
                offdiag_scale,
            } => {
                if i == j {
                    store.row_sqnorm(i) < diag_threshold
                } else {
                    store.row_sqnorm(i) * store.row_sqnorm(j) < offdiag_scale * value * value
                }
            }
        }
    }
}

/// Principal submatrix on indices drawn with probability `s/n`, unscaled.
pub fn uniform_submatrix<M: MatrixSource + ?Sized, R: Rng + ?Sized>(
    a: &M,
    s: f64,
    rng: &mut R,
) -> Result<SampledSubmatrix> {
    let n = a.dim();
    check_s(s)?;
    if s > n as f64 {
        return Err(Error::InvalidArgument(format!(
            "sample size {s} exceeds dimension {n}"
        )));
    }
    let p = s / n as f64;
    let sample = bernoulli_select(&vec![p; n], SamplingMode::Uniform, rng);
    let matrix = a.principal_submatrix(&sample.indices);
    Ok(SampledSubmatrix {
        sample,
        matrix,
        zeroed_count: 0,
        scaling: Scaling::None,
    })
}

/// Draws with the given probabilities, rescales by `1/√(p_i p_j)` and
/// applies `rule`.
fn weighted_submatrix<R: Rng + ?Sized>(
    store: &SparseSymStore,
    probs: &[f64],
    mode: SamplingMode,
    rule: ZeroRule,
    rng: &mut R,
) -> SampledSubmatrix {
    let sample = bernoulli_select(probs, mode, rng);
    let m = sample.len();
    let pos = positions(store.n(), &sample.indices);
    let mut data = vec![0.0; m * m];
    let mut zeroed = 0;
    for (a, &i) in sample.indices.iter().enumerate() {
        let pi = sample.probs[a];
        for &(j, v) in store.row(i) {
            let Some(b) = pos[j] else { continue };
            if rule.zeroes(store, i, j, v) {
                if j >= i {
                    zeroed += 1;
                }
                continue;
            }
            let pj = sample.probs[b];
            data[a * m + b] = v / (pi * pj).sqrt();
        }
    }
    SampledSubmatrix {
        sample,
        matrix: SymMatrix::from_raw_unchecked(m, data),
        zeroed_count: zeroed,
        scaling: Scaling::InverseSqrtProb,
    }
}

/// Sparsity-proportional principal submatrix: `p_i = min(1, s·nnz_i/nnz)`.
pub fn nnz_submatrix<R: Rng + ?Sized>(
    store: &SparseSymStore,
    s: f64,
    zeroing: NnzZeroing,
    rng: &mut R,
) -> Result<SampledSubmatrix> {
    check_s(s)?;
    let rule = ZeroRule::for_nnz(store, s, zeroing)?;
    if store.total_nnz() == 0 {
        return Ok(SampledSubmatrix::empty(SamplingMode::Nnz, Scaling::InverseSqrtProb));
    }
    let probs = store.inclusion_probs(s, RowWeight::Nnz)?;
    Ok(weighted_submatrix(store, &probs, SamplingMode::Nnz, rule, rng))
}

/// Squared-norm principal submatrix: `p_i = min(1, s‖A_i‖²/‖A‖_F² + 1/n²)`.
pub fn norm_submatrix<R: Rng + ?Sized>(
    store: &SparseSymStore,
    s: f64,
    zeroing: NormZeroing,
    rng: &mut R,
) -> Result<SampledSubmatrix> {
    check_s(s)?;
    let rule = ZeroRule::for_norm(store, zeroing)?;
    if !(store.frob_sq() > 0.0) {
        return Ok(SampledSubmatrix::empty(SamplingMode::SqNorm, Scaling::InverseSqrtProb));
    }
    let probs = store.inclusion_probs(s, RowWeight::SqNorm)?;
    Ok(weighted_submatrix(store, &probs, SamplingMode::SqNorm, rule, rng))
}

/// The full matrix with the sparsity zeroing rule applied (no sampling).
pub fn nnz_zeroed_matrix(store: &SparseSymStore, eps: f64, c2: f64) -> Result<SymMatrix> {
    let rule = ZeroRule::for_nnz(store, 1.0, NnzZeroing::Theorem { eps, c2 })?;
    Ok(apply_rule(store, rule))
}

/// The full matrix with the norm zeroing rule applied (no sampling).
pub fn norm_zeroed_matrix(store: &SparseSymStore, eps: f64, c2: f64) -> Result<SymMatrix> {
    let rule = ZeroRule::for_norm(store, NormZeroing::Theorem { eps, c2 })?;
    Ok(apply_rule(store, rule))
}

fn apply_rule(store: &SparseSymStore, rule: ZeroRule) -> SymMatrix {
    let n = store.n();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for &(j, v) in store.row(i) {
            if !rule.zeroes(store, i, j, v) {
                data[i * n + j] = v;
            }
        }
    }
    SymMatrix::from_raw_unchecked(n, data)
}

/// Keeps the diagonal, and each unordered off-diagonal pair with probability
/// `p` (rescaled by `1/p`). Returns the sparsified matrix and the number of
/// kept off-diagonal pairs.
pub fn entrywise_sparsify_counted<R: Rng + ?Sized>(
    a: &SymMatrix,
    p: f64,
    rng: &mut R,
) -> Result<(SymMatrix, usize)> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidArgument(format!("keep probability must lie in (0, 1], got {p}")));
    }
    let n = a.n();
    let mut data = vec![0.0; n * n];
    let mut kept = 0;
    for i in 0..n {
        data[i * n + i] = a.get(i, i);
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                let v = a.get(i, j) / p;
                data[i * n + j] = v;
                data[j * n + i] = v;
                kept += 1;
            }
        }
    }
    Ok((SymMatrix::from_raw_unchecked(n, data), kept))
}

pub fn entrywise_sparsify<R: Rng + ?Sized>(a: &SymMatrix, p: f64, rng: &mut R) -> Result<SymMatrix> {
    entrywise_sparsify_counted(a, p, rng).map(|(c, _)| c)
}

/// Rectangular sample `Z = S̄ A T̄` with independent row and column coins.
#[derive(Debug, Clone)]
pub struct RowColSample {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    /// Row-major `rows.len() × cols.len()`, scaled by `n/s`.
    pub data: Vec<f64>,
}

/// Rows and columns each kept independently with probability `s/n`, every
/// kept row and column scaled by `√(n/s)`.
pub fn rowcol_submatrix<M: MatrixSource + ?Sized, R: Rng + ?Sized>(
    a: &M,
    s: f64,
    rng: &mut R,
) -> Result<RowColSample> {
    let n = a.dim();
    check_s(s)?;
    if s > n as f64 {
        return Err(Error::InvalidArgument(format!(
            "sample size {s} exceeds dimension {n}"
        )));
    }
    let p = s / n as f64;
    let rows = bernoulli_select(&vec![p; n], SamplingMode::Uniform, rng).indices;
    let cols = bernoulli_select(&vec![p; n], SamplingMode::Uniform, rng).indices;
    let scale = n as f64 / s;
    let mut data = a.cross_submatrix(&rows, &cols);
    if scale != 1.0 {
        data.iter_mut().for_each(|v| *v *= scale);
    }
    Ok(RowColSample { rows, cols, data })
}
