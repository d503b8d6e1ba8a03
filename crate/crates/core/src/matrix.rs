//! Dense symmetric matrices and sorted spectra.

use std::fmt;

use crate::error::{Error, Result};

/// Dense real symmetric matrix stored row-major.
///
/// Construction always mirrors the upper triangle onto the lower one, so
/// `get(i, j) == get(j, i)` holds bitwise for every instance.
#[derive(Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        Self::from_fn(n, |i, j| if i == j { diag[i] } else { 0.0 })
    }

    /// Builds a matrix by evaluating `f(i, j)` on the upper triangle (`i <= j`).
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Ok(SymMatrix { n, data })
    }

    /// Takes an `n*n` row-major buffer; the lower triangle is overwritten by
    /// the upper one.
    pub fn from_row_major(n: usize, mut data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                got: data.len(),
            });
        }
        for i in 0..n {
            for j in i..n {
                let v = data[i * n + j];
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                data[j * n + i] = v;
            }
        }
        Ok(SymMatrix { n, data })
    }

    pub(crate) fn from_raw_unchecked(n: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        SymMatrix { n, data }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Number of structurally nonzero entries, counting both mirror copies.
    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|v| **v != 0.0).count()
    }

    pub fn principal_submatrix(&self, indices: &[usize]) -> SymMatrix {
        let m = indices.len();
        let mut data = Vec::with_capacity(m * m);
        for &i in indices {
            let row = self.row(i);
            data.extend(indices.iter().map(|&j| row[j]));
        }
        SymMatrix { n: m, data }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn scaled(&self, c: f64) -> SymMatrix {
        SymMatrix {
            n: self.n,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &SymMatrix) -> Result<SymMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SymMatrix) -> Result<SymMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &SymMatrix, f: impl Fn(f64, f64) -> f64) -> Result<SymMatrix> {
        if self.n != other.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: other.n,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| f(*a, *b))
            .collect();
        Ok(SymMatrix { n: self.n, data })
    }

    pub fn shifted(&self, c: f64) -> SymMatrix {
        let mut out = self.clone();
        for i in 0..self.n {
            out.data[i * self.n + i] += c;
        }
        out
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymMatrix")
            .field("n", &self.n)
            .field("frobenius", &self.frobenius_norm())
            .finish()
    }
}

/// Real spectrum sorted in non-increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    /// Validates ordering without sorting.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(k) = values.windows(2).position(|w| !(w[0] >= w[1])) {
            return Err(Error::InvalidArgument(format!(
                "spectrum not non-increasing at position {k}"
            )));
        }
        Ok(Spectrum(values))
    }

    /// Stable descending sort: equal values keep their input order.
    pub fn from_unsorted(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Spectrum(values)
    }

    pub fn zeros(n: usize) -> Self {
        Spectrum(vec![0.0; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `rank` is 1-based: 1 is the largest value, `len()` the smallest.
    pub fn by_rank(&self, rank: usize) -> Option<f64> {
        rank.checked_sub(1).and_then(|k| self.0.get(k).copied())
    }

    pub fn is_non_increasing(&self) -> bool {
        self.0.windows(2).all(|w| w[0] >= w[1])
    }
}

fn check_len(a: &Spectrum, b: &Spectrum) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            expected: b.len(),
            got: a.len(),
        });
    }
    Ok(())
}

/// Largest per-rank absolute difference.
pub fn linf_spectrum_error(est: &Spectrum, truth: &Spectrum) -> Result<f64> {
    check_len(est, truth)?;
    Ok(est
        .values()
        .iter()
        .zip(truth.values())
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs())))
}

/// Wasserstein-1 distance between the two spectral densities (mass `1/n`
/// per eigenvalue). For sorted spectra of equal length this is the mean
/// per-rank absolute difference.
pub fn wasserstein1(a: &Spectrum, b: &Spectrum) -> Result<f64> {
    check_len(a, b)?;
    if a.is_empty() {
        return Err(Error::InvalidArgument("empty spectra".into()));
    }
    let total: f64 = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).abs())
        .sum();
    Ok(total / a.len() as f64)
}

/// `max_i |λ_i(A) - λ_i(B)|`. Weyl's inequality bounds this by `‖A - B‖₂`.
pub fn weyl_gap(a: &SymMatrix, b: &SymMatrix, tol: f64) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::Dimension {
            expected: a.n(),
            got: b.n(),
        });
    }
    let ea = crate::eigen::sym_eigvals(a, tol)?;
    let eb = crate::eigen::sym_eigvals(b, tol)?;
    linf_spectrum_error(&ea, &eb)
}

/// Spectral norm of a symmetric matrix, `max |λ_i|`.
pub fn spectral_norm(a: &SymMatrix, tol: f64) -> Result<f64> {
    if a.n() == 0 {
        return Ok(0.0);
    }
    let eig = crate::eigen::sym_eigvals(a, tol)?;
    let v = eig.values();
    Ok(v[0].abs().max(v[v.len() - 1].abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn construction_mirrors_upper_triangle() {
        let m = SymMatrix::from_row_major(2, vec![1.0, 2.0, 99.0, 3.0]).unwrap();
        assert_eq!(m.get(1, 0), 2.0);
        assert!(m.is_symmetric());
    }

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(
            SymMatrix::from_row_major(2, vec![1.0, f64::NAN, 0.0, 1.0]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
    }

    #[test]
    fn linf_and_wasserstein_basics() {
        let t = Spectrum::from_unsorted(vec![3.0, 1.0, -2.0]);
        assert_eq!(linf_spectrum_error(&t, &t).unwrap(), 0.0);
        let shifted = Spectrum::from_unsorted(t.values().iter().map(|v| v + 0.3).collect());
        assert!((linf_spectrum_error(&shifted, &t).unwrap() - 0.3).abs() < 1e-15);

        let a = Spectrum::new(vec![1.0, 0.0]).unwrap();
        let b = Spectrum::zeros(2);
        assert_eq!(wasserstein1(&a, &b).unwrap(), 0.5);
        assert_eq!(wasserstein1(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn length_mismatch_is_dimension_error() {
        let a = Spectrum::zeros(2);
        let b = Spectrum::zeros(3);
        assert!(matches!(
            linf_spectrum_error(&a, &b),
            Err(Error::Dimension { .. })
        ));
        assert!(matches!(wasserstein1(&a, &b), Err(Error::Dimension { .. })));
    }

    #[test]
    fn wasserstein_matches_direct_summation() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let a = Spectrum::from_unsorted((0..20).map(|_| rng.random_range(-5.0..5.0)).collect());
        let b = Spectrum::from_unsorted((0..20).map(|_| rng.random_range(-5.0..5.0)).collect());
        let mut direct = 0.0;
        for k in 0..20 {
            direct += (a.values()[k] - b.values()[k]).abs();
        }
        direct /= 20.0;
        assert!((wasserstein1(&a, &b).unwrap() - direct).abs() < 1e-14);
    }

    #[test]
    fn spectral_norm_trivial_cases() {
        assert_eq!(spectral_norm(&SymMatrix::zeros(5), 1e-10).unwrap(), 0.0);
        let one = spectral_norm(&SymMatrix::identity(10), 1e-10).unwrap();
        assert!((one - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weyl_gap_shift_and_identity() {
        let a = SymMatrix::from_fn(6, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0).unwrap();
        assert!(weyl_gap(&a, &a, 1e-10).unwrap() < 1e-12);
        let g = weyl_gap(&a, &a.shifted(-0.75), 1e-10).unwrap();
        assert!((g - 0.75).abs() < 1e-10);
    }

    #[test]
    fn by_rank_is_one_based() {
        let s = Spectrum::new(vec![5.0, 2.0, -1.0]).unwrap();
        assert_eq!(s.by_rank(1), Some(5.0));
        assert_eq!(s.by_rank(3), Some(-1.0));
        assert_eq!(s.by_rank(0), None);
    }

    proptest! {
        #[test]
        fn wasserstein_never_exceeds_linf(
            a in proptest::collection::vec(-100.0f64..100.0, 1..40),
            seed in any::<u64>(),
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let b: Vec<f64> = a.iter().map(|_| rng.random_range(-100.0..100.0)).collect();
            let a = Spectrum::from_unsorted(a);
            let b = Spectrum::from_unsorted(b);
            let w = wasserstein1(&a, &b).unwrap();
            let l = linf_spectrum_error(&a, &b).unwrap();
            prop_assert!(w <= l + 1e-12);
        }

        #[test]
        fn transpose_equality_is_exact(
            n in 1usize..12,
            vals in proptest::collection::vec(-1e3f64..1e3, 144),
        ) {
            let m = SymMatrix::from_row_major(n, vals[..n * n].to_vec()).unwrap();
            prop_assert!(m.is_symmetric());
        }
    }
}
