//! Sparse symmetric storage with the row aggregates needed for
//! sparsity- and norm-proportional row sampling.
//!
//! Per-row nonzero counts and squared norms are mirrored into binary indexed
//! trees, so a weighted row draw and a single-entry update both cost
//! `O(log n)` on top of the per-row list edit.

use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::fenwick::Fenwick;
use crate::matrix::SymMatrix;

/// Row weighting used for importance sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowWeight {
    /// Proportional to the number of nonzeros in the row.
    Nnz,
    /// Proportional to the squared ℓ2 norm of the row.
    SqNorm,
}

#[derive(Debug, Clone)]
pub struct SparseSymStore {
    n: usize,
    rows: Vec<Vec<(usize, f64)>>,
    row_sqnorm: Vec<f64>,
    total_nnz: usize,
    frob_sq: f64,
    nnz_tree: Fenwick<u64>,
    sqnorm_tree: Fenwick<f64>,
}

impl SparseSymStore {
    /// Builds a store from `(row, col, value)` triples. Either triangle, or
    /// both, may be supplied; missing mirror entries are filled in. Zero
    /// values are not stored.
    pub fn build(n: usize, entries: &[(usize, usize, f64)]) -> Result<Self> {
        let mut seen: HashMap<(usize, usize), f64> = HashMap::with_capacity(entries.len());
        for &(i, j, v) in entries {
            if i >= n || j >= n {
                return Err(Error::IndexOutOfRange { row: i, col: j, n });
            }
            if !v.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
            if seen.insert((i, j), v).is_some() {
                return Err(Error::DuplicateEntry { row: i, col: j });
            }
        }

        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(i, j, v) in entries {
            if i != j {
                if let Some(&mirror) = seen.get(&(j, i)) {
                    if mirror != v {
                        return Err(Error::ConflictingMirror {
                            row: i,
                            col: j,
                            value: v,
                            mirror,
                        });
                    }
                }
            }
            if v == 0.0 {
                continue;
            }
            rows[i].push((j, v));
            if i != j && !seen.contains_key(&(j, i)) {
                rows[j].push((i, v));
            }
        }
        for row in &mut rows {
            row.sort_unstable_by_key(|&(c, _)| c);
        }
        Ok(Self::from_rows(n, rows))
    }

    fn from_rows(n: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        let row_sqnorm: Vec<f64> = rows.iter().map(|r| sqnorm(r)).collect();
        let nnz: Vec<u64> = rows.iter().map(|r| r.len() as u64).collect();
        SparseSymStore {
            n,
            total_nnz: nnz.iter().sum::<u64>() as usize,
            frob_sq: row_sqnorm.iter().sum(),
            nnz_tree: Fenwick::from_weights(&nnz),
            sqnorm_tree: Fenwick::from_weights(&row_sqnorm),
            row_sqnorm,
            rows,
        }
    }

    pub fn from_dense(a: &SymMatrix) -> Self {
        let n = a.n();
        let rows = (0..n)
            .map(|i| {
                a.row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(j, v)| (j, *v))
                    .collect()
            })
            .collect();
        Self::from_rows(n, rows)
    }

    pub fn to_dense(&self) -> SymMatrix {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                data[i * n + j] = v;
            }
        }
        SymMatrix::from_raw_unchecked(n, data)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn row_nnz(&self, i: usize) -> usize {
        self.rows[i].len()
    }

    pub fn row_sqnorm(&self, i: usize) -> f64 {
        self.row_sqnorm[i]
    }

    pub fn total_nnz(&self) -> usize {
        self.total_nnz
    }

    /// Squared Frobenius norm.
    pub fn frob_sq(&self) -> f64 {
        self.frob_sq
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self.rows[i].binary_search_by_key(&j, |&(c, _)| c) {
            Ok(k) => self.rows[i][k].1,
            Err(_) => 0.0,
        }
    }

    /// Upper-triangle entries `(i, j, v)` with `i <= j`, row-major order.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .filter(move |&&(j, _)| j >= i)
                .map(move |&(j, v)| (i, j, v))
        })
    }

    /// Prefix aggregate over rows `[0, end)` for the given weighting.
    pub fn prefix_mass(&self, end: usize, mode: RowWeight) -> f64 {
        match mode {
            RowWeight::Nnz => self.nnz_tree.prefix(end) as f64,
            RowWeight::SqNorm => self.sqnorm_tree.prefix(end),
        }
    }

    /// Draws one row index with probability proportional to its nonzero
    /// count or squared norm.
    pub fn sample_row<R: Rng + ?Sized>(&self, mode: RowWeight, rng: &mut R) -> Result<usize> {
        match mode {
            RowWeight::Nnz => {
                let total = self.nnz_tree.total();
                if total == 0 {
                    return Err(Error::NoMass);
                }
                Ok(self.nnz_tree.search(rng.random_range(0..total)))
            }
            RowWeight::SqNorm => {
                let total = self.sqnorm_tree.total();
                if !(total > 0.0) {
                    return Err(Error::NoMass);
                }
                let i = self.sqnorm_tree.search(rng.random::<f64>() * total);
                if i < self.n && self.row_sqnorm[i] > 0.0 {
                    Ok(i)
                } else {
                    // rounding pushed the draw past the last positive row
                    self.row_sqnorm
                        .iter()
                        .rposition(|w| *w > 0.0)
                        .ok_or(Error::NoMass)
                }
            }
        }
    }

    /// Per-row inclusion probabilities for a target sample size `s`.
    ///
    /// `Nnz`: `min(1, s·nnz_i / nnz)`. `SqNorm`: `min(1, s·‖A_i‖² / ‖A‖_F² + 1/n²)`.
    /// A store with no mass yields all zeros.
    pub fn inclusion_probs(&self, s: f64, mode: RowWeight) -> Result<Vec<f64>> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "sample size must be positive, got {s}"
            )));
        }
        let n = self.n;
        Ok(match mode {
            RowWeight::Nnz => {
                if self.total_nnz == 0 {
                    return Ok(vec![0.0; n]);
                }
                let total = self.total_nnz as f64;
                self.rows
                    .iter()
                    .map(|r| (s * r.len() as f64 / total).min(1.0))
                    .collect()
            }
            RowWeight::SqNorm => {
                if !(self.frob_sq > 0.0) {
                    return Ok(vec![0.0; n]);
                }
                let floor = 1.0 / (n as f64 * n as f64);
                self.row_sqnorm
                    .iter()
                    .map(|w| (s * w / self.frob_sq + floor).min(1.0))
                    .collect()
            }
        })
    }

    /// Sets `(i, j)` and `(j, i)` to `value`; zero removes the entry.
    pub fn update_entry(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        let n = self.n;
        if i >= n || j >= n {
            return Err(Error::IndexOutOfRange { row: i, col: j, n });
        }
        if !value.is_finite() {
            return Err(Error::NonFinite { row: i, col: j });
        }
        self.set_in_row(i, j, value);
        if i != j {
            self.set_in_row(j, i, value);
        }
        Ok(())
    }

    fn set_in_row(&mut self, r: usize, c: usize, value: f64) {
        let row = &mut self.rows[r];
        let before_len = row.len();
        match row.binary_search_by_key(&c, |&(col, _)| col) {
            Ok(k) if value == 0.0 => {
                row.remove(k);
            }
            Ok(k) => row[k].1 = value,
            Err(_) if value == 0.0 => return,
            Err(k) => row.insert(k, (c, value)),
        }
        let after_len = row.len();
        let new_sq = sqnorm(row);
        let old_sq = self.row_sqnorm[r];
        self.row_sqnorm[r] = new_sq;
        self.frob_sq += new_sq - old_sq;
        if new_sq >= old_sq {
            self.sqnorm_tree.add(r, new_sq - old_sq);
        } else {
            self.sqnorm_tree.sub(r, old_sq - new_sq);
        }
        if after_len > before_len {
            self.nnz_tree.add(r, 1);
            self.total_nnz += 1;
        } else if after_len < before_len {
            self.nnz_tree.sub(r, 1);
            self.total_nnz -= 1;
        }
    }
}

fn sqnorm(row: &[(usize, f64)]) -> f64 {
    row.iter().map(|(_, v)| v * v).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    fn row_nnz(store: &SparseSymStore) -> Vec<usize> {
        (0..store.n()).map(|i| store.row_nnz(i)).collect()
    }

    #[test]
    fn empty_store() {
        let s = SparseSymStore::build(5, &[]).unwrap();
        assert_eq!(s.total_nnz(), 0);
        assert_eq!(s.frob_sq(), 0.0);
        assert!(matches!(
            s.sample_row(RowWeight::Nnz, &mut rng_from_seed(1)),
            Err(Error::NoMass)
        ));
        assert_eq!(s.inclusion_probs(3.0, RowWeight::Nnz).unwrap(), vec![0.0; 5]);
    }

    #[test]
    fn single_entry_is_mirrored() {
        let s = SparseSymStore::build(3, &[(0, 1, 1.0)]).unwrap();
        assert_eq!(s.total_nnz(), 2);
        assert_eq!(row_nnz(&s), vec![1, 1, 0]);
        assert_eq!(s.frob_sq(), 2.0);
        assert_eq!(s.get(1, 0), 1.0);
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            SparseSymStore::build(2, &[(0, 2, 1.0)]),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            SparseSymStore::build(2, &[(0, 1, 1.0), (0, 1, 1.0)]),
            Err(Error::DuplicateEntry { .. })
        ));
        assert!(matches!(
            SparseSymStore::build(2, &[(0, 1, 1.0), (1, 0, 2.0)]),
            Err(Error::ConflictingMirror { .. })
        ));
        // both halves with equal values are fine
        let s = SparseSymStore::build(2, &[(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        assert_eq!(s.total_nnz(), 2);
    }

    #[test]
    fn single_nonzero_row_is_always_drawn() {
        let s = SparseSymStore::build(4, &[(2, 2, 5.0)]).unwrap();
        let mut rng = rng_from_seed(9);
        for _ in 0..100 {
            assert_eq!(s.sample_row(RowWeight::Nnz, &mut rng).unwrap(), 2);
            assert_eq!(s.sample_row(RowWeight::SqNorm, &mut rng).unwrap(), 2);
        }
    }

    #[test]
    fn nnz_draw_frequencies() {
        // row 0 has one nonzero, row 1 has three; rows 2 and 3 hold mirrors
        let s = SparseSymStore::build(4, &[(0, 0, 1.0), (1, 1, 1.0), (1, 2, 1.0), (1, 3, 1.0)])
            .unwrap();
        assert_eq!(row_nnz(&s), vec![1, 3, 1, 1]);
        let mut rng = rng_from_seed(21);
        let draws = 100_000;
        let mut counts = [0usize; 4];
        for _ in 0..draws {
            counts[s.sample_row(RowWeight::Nnz, &mut rng).unwrap()] += 1;
        }
        // P(row 1) = 3/6; within 0.5 ± 0.03 (far beyond 3σ ≈ 0.005)
        let f1 = counts[1] as f64 / draws as f64;
        assert!((f1 - 0.5).abs() < 0.03, "{f1}");
        let f0 = counts[0] as f64 / draws as f64;
        assert!((f0 - 1.0 / 6.0).abs() < 0.03, "{f0}");
    }

    #[test]
    fn two_row_frequency() {
        // diagonal-only store: row 0 weight 1, row 1 weight 3 via sqnorm
        let s = SparseSymStore::build(2, &[(0, 0, 1.0), (1, 1, 3f64.sqrt())]).unwrap();
        let mut rng = rng_from_seed(4);
        let hits = (0..100_000)
            .filter(|_| s.sample_row(RowWeight::SqNorm, &mut rng).unwrap() == 1)
            .count();
        let f = hits as f64 / 1e5;
        assert!((f - 0.75).abs() < 0.03, "{f}");
    }

    #[test]
    fn uniform_sparsity_draws_are_uniform() {
        let n = 20;
        let id = SparseSymStore::from_dense(&SymMatrix::identity(n));
        let mut rng = rng_from_seed(17);
        let draws = 200_000;
        let mut counts = vec![0usize; n];
        for _ in 0..draws {
            counts[id.sample_row(RowWeight::Nnz, &mut rng).unwrap()] += 1;
        }
        let expect = draws as f64 / n as f64;
        let sigma = (draws as f64 * (1.0 / n as f64) * (1.0 - 1.0 / n as f64)).sqrt();
        for c in counts {
            assert!((c as f64 - expect).abs() < 4.0 * sigma);
        }
    }

    #[test]
    fn identity_probs_are_uniform_and_capped() {
        let id = SparseSymStore::from_dense(&SymMatrix::identity(10));
        let p = id.inclusion_probs(4.0, RowWeight::Nnz).unwrap();
        assert!(p.iter().all(|x| (*x - 0.4).abs() < 1e-15));
        let p = id.inclusion_probs(10.0, RowWeight::Nnz).unwrap();
        assert!(p.iter().all(|x| *x == 1.0));
        let p = id.inclusion_probs(4.0, RowWeight::SqNorm).unwrap();
        assert!(p.iter().all(|x| (*x - (0.4 + 0.01)).abs() < 1e-15));
    }

    #[test]
    fn update_changes_frobenius_by_both_mirrors() {
        let mut s = SparseSymStore::build(3, &[(0, 1, 1.0)]).unwrap();
        let before = s.frob_sq();
        s.update_entry(0, 1, 2.0).unwrap();
        assert_eq!(s.frob_sq() - before, 6.0);
        assert_eq!(s.total_nnz(), 2);
    }

    #[test]
    fn insert_then_remove_restores_store() {
        let base = SparseSymStore::build(4, &[(0, 1, 1.0), (2, 2, -3.0)]).unwrap();
        let mut s = base.clone();
        s.update_entry(1, 3, 0.5).unwrap();
        assert_eq!(s.total_nnz(), base.total_nnz() + 2);
        s.update_entry(3, 1, 0.0).unwrap();
        assert_eq!(row_nnz(&s), row_nnz(&base));
        assert_eq!(s.total_nnz(), base.total_nnz());
        assert_eq!(s.frob_sq(), base.frob_sq());
        for i in 0..4 {
            assert_eq!(s.row(i), base.row(i));
        }
        assert!(matches!(
            s.update_entry(4, 0, 1.0),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn random_updates_match_rebuild() {
        let n = 60;
        let mut rng = rng_from_seed(33);
        let mut s = SparseSymStore::build(n, &[]).unwrap();
        let mut dense = vec![0.0; n * n];
        for _ in 0..1000 {
            let i = rng.random_range(0..n);
            let j = rng.random_range(0..n);
            let v = if rng.random_bool(0.25) {
                0.0
            } else {
                rng.random_range(-2.0..2.0)
            };
            s.update_entry(i, j, v).unwrap();
            dense[i * n + j] = v;
            dense[j * n + i] = v;
        }
        let rebuilt = SparseSymStore::from_dense(&SymMatrix::from_row_major(n, dense).unwrap());
        assert_eq!(s.total_nnz(), rebuilt.total_nnz());
        assert!((s.frob_sq() - rebuilt.frob_sq()).abs() <= 1e-9 * rebuilt.frob_sq());
        for i in 0..n {
            assert_eq!(s.row(i), rebuilt.row(i));
            assert!((s.row_sqnorm(i) - rebuilt.row_sqnorm(i)).abs() < 1e-12);
        }
        for end in 0..=n {
            assert_eq!(
                s.prefix_mass(end, RowWeight::Nnz),
                rebuilt.prefix_mass(end, RowWeight::Nnz)
            );
            let (a, b) = (
                s.prefix_mass(end, RowWeight::SqNorm),
                rebuilt.prefix_mass(end, RowWeight::SqNorm),
            );
            assert!((a - b).abs() <= 1e-9 * (1.0 + b));
        }
    }

    #[test]
    fn nnz_probability_sum_law() {
        // no empty rows and no capping: sum equals s exactly (up to rounding)
        let s = SparseSymStore::build(
            4,
            &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 3, 1.0), (0, 0, 1.0)],
        )
        .unwrap();
        let p = s.inclusion_probs(1.5, RowWeight::Nnz).unwrap();
        assert!(p.iter().all(|x| *x < 1.0));
        assert!((p.iter().sum::<f64>() - 1.5).abs() < 1e-12);
    }
}
