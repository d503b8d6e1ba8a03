//! Symmetric eigensolver: Householder reduction to tridiagonal form followed
//! by implicit-shift QL iteration.
//!
//! The reduction works on the full row-major matrix so that both the
//! matrix-vector product and the rank-2 update walk contiguous rows. With the
//! `parallel` feature, rows of large trailing blocks are processed on the
//! rayon pool.

use crate::error::{Error, Result};
use crate::matrix::{Spectrum, SymMatrix};

/// Relative tolerance used when callers have no better choice.
pub const DEFAULT_TOL: f64 = 1e-10;

const MAX_QL_SWEEPS: usize = 60;

#[cfg(feature = "parallel")]
const PAR_MIN_ROWS: usize = 256;

/// Eigenvalues with the matching unit eigenvectors (`vectors[k]` belongs to
/// `values.values()[k]`).
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Spectrum,
    pub vectors: Vec<Vec<f64>>,
}

/// All eigenvalues of `a`, non-increasing.
pub fn sym_eigvals(a: &SymMatrix, tol: f64) -> Result<Spectrum> {
    check_tol(tol)?;
    let n = a.n();
    if n == 0 {
        return Ok(Spectrum::zeros(0));
    }
    let mut t = Tridiagonal::reduce(a, false);
    ql_implicit(&mut t.diag, &mut t.off, None, n, tol, a.frobenius_norm())?;
    Ok(Spectrum::from_unsorted(t.diag))
}

/// Eigenvalues and eigenvectors of `a`.
pub fn sym_eig(a: &SymMatrix, tol: f64) -> Result<SymEigen> {
    check_tol(tol)?;
    let n = a.n();
    if n == 0 {
        return Ok(SymEigen {
            values: Spectrum::zeros(0),
            vectors: Vec::new(),
        });
    }
    let mut t = Tridiagonal::reduce(a, true);
    let mut q = t.q.take().expect("requested accumulation");
    ql_implicit(&mut t.diag, &mut t.off, Some(&mut q), n, tol, a.frobenius_norm())?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| t.diag[y].total_cmp(&t.diag[x]));
    let values = order.iter().map(|&k| t.diag[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| (0..n).map(|r| q[r * n + k]).collect())
        .collect();
    Ok(SymEigen {
        values: Spectrum::new(values)?,
        vectors,
    })
}

/// Singular values of a dense `rows × cols` row-major matrix, non-increasing,
/// `min(rows, cols)` of them.
///
/// Computed from the symmetric embedding `[[0, Z], [Zᵀ, 0]]`, whose
/// eigenvalues are `±σ_i` plus `|rows - cols|` zeros. This keeps absolute
/// accuracy near machine precision even for tiny singular values, which the
/// normal-equations route `ZᵀZ` loses.
pub fn singular_values(rows: usize, cols: usize, data: &[f64], tol: f64) -> Result<Vec<f64>> {
    if data.len() != rows * cols {
        return Err(Error::Dimension {
            expected: rows * cols,
            got: data.len(),
        });
    }
    let k = rows.min(cols);
    if k == 0 {
        return Ok(Vec::new());
    }
    let m = rows + cols;
    let mut emb = vec![0.0; m * m];
    for r in 0..rows {
        for c in 0..cols {
            let v = data[r * cols + c];
            emb[r * m + rows + c] = v;
            emb[(rows + c) * m + r] = v;
        }
    }
    let emb = SymMatrix::from_raw_unchecked(m, emb);
    let eig = sym_eigvals(&emb, tol)?;
    Ok(eig.values()[..k].iter().map(|v| v.max(0.0)).collect())
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    Ok(())
}

struct Tridiagonal {
    diag: Vec<f64>,
    /// `off[k]` couples `k` and `k + 1`; the last slot is always zero.
    off: Vec<f64>,
    /// Row-major orthogonal `Q` with `A = Q T Qᵀ`.
    q: Option<Vec<f64>>,
}

struct Reflector {
    start: usize,
    tau: f64,
    v: Vec<f64>,
}

impl Tridiagonal {
    fn reduce(a: &SymMatrix, accumulate: bool) -> Self {
        let n = a.n();
        let mut w = a.as_slice().to_vec();
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n];
        let mut reflectors = Vec::new();

        for k in 0..n.saturating_sub(1) {
            diag[k] = w[k * n + k];
            let x = &w[k * n + k + 1..(k + 1) * n];
            let alpha = x[0];
            let sigma: f64 = x[1..].iter().map(|v| v * v).sum();
            if sigma == 0.0 {
                off[k] = alpha;
                continue;
            }
            let norm = (alpha * alpha + sigma).sqrt();
            let beta = if alpha <= 0.0 { norm } else { -norm };
            let tau = (beta - alpha) / beta;
            let inv = 1.0 / (alpha - beta);
            let mut v: Vec<f64> = x.iter().map(|xi| xi * inv).collect();
            v[0] = 1.0;
            off[k] = beta;

            let start = k + 1;
            apply_two_sided(&mut w, n, start, tau, &v);
            if accumulate {
                reflectors.push(Reflector { start, tau, v });
            }
        }
        diag[n - 1] = w[n * n - 1];

        let q = accumulate.then(|| {
            let mut q = vec![0.0; n * n];
            for i in 0..n {
                q[i * n + i] = 1.0;
            }
            for r in reflectors.iter().rev() {
                let m = n - r.start;
                let mut s = vec![0.0; m];
                for (ri, vi) in r.v.iter().enumerate() {
                    let row = &q[(r.start + ri) * n + r.start..(r.start + ri + 1) * n];
                    for (sj, qv) in s.iter_mut().zip(row) {
                        *sj += vi * qv;
                    }
                }
                for (ri, vi) in r.v.iter().enumerate() {
                    let row = &mut q[(r.start + ri) * n + r.start..(r.start + ri + 1) * n];
                    let c = r.tau * vi;
                    for (qv, sj) in row.iter_mut().zip(&s) {
                        *qv -= c * sj;
                    }
                }
            }
            q
        });

        Tridiagonal { diag, off, q }
    }
}

/// `B ← H B H` on the trailing block `B = w[start.., start..]`, with
/// `H = I - tau v vᵀ`.
fn apply_two_sided(w: &mut [f64], n: usize, start: usize, tau: f64, v: &[f64]) {
    let m = n - start;
    let block = &mut w[start * n..];

    // p = tau B v
    let row_dot = |row: &[f64]| -> f64 {
        tau * row[start..]
            .iter()
            .zip(v)
            .map(|(b, vj)| b * vj)
            .sum::<f64>()
    };
    let p: Vec<f64> = {
        #[cfg(feature = "parallel")]
        {
            if m >= PAR_MIN_ROWS {
                use rayon::prelude::*;
                block.par_chunks(n).map(row_dot).collect()
            } else {
                block.chunks(n).map(row_dot).collect()
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            block.chunks(n).map(row_dot).collect()
        }
    };
    debug_assert_eq!(p.len(), m);

    // w = p - (tau/2)(pᵀv) v
    let k = 0.5 * tau * p.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
    let wv: Vec<f64> = p.iter().zip(v).map(|(pi, vi)| pi - k * vi).collect();

    // B ← B - v wᵀ - w vᵀ
    let update = |(i, row): (usize, &mut [f64])| {
        let (vi, wi) = (v[i], wv[i]);
        for ((b, vj), wj) in row[start..].iter_mut().zip(v).zip(&wv) {
            *b -= vi * wj + wi * vj;
        }
    };
    #[cfg(feature = "parallel")]
    {
        if m >= PAR_MIN_ROWS {
            use rayon::prelude::*;
            block.par_chunks_mut(n).enumerate().for_each(update);
            return;
        }
    }
    block.chunks_mut(n).enumerate().for_each(update);
}

/// Implicit QL with Wilkinson-style shifts on a symmetric tridiagonal matrix.
/// When `z` is given (row-major `n × n`), the plane rotations are applied to
/// its columns.
fn ql_implicit(
    d: &mut [f64],
    e: &mut [f64],
    mut z: Option<&mut Vec<f64>>,
    n: usize,
    tol: f64,
    scale: f64,
) -> Result<()> {
    let rel = tol.max(f64::EPSILON);
    let floor = f64::EPSILON * scale;
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= rel * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if sweeps == MAX_QL_SWEEPS {
                return Err(Error::NoConvergence {
                    index: l,
                    iterations: sweeps,
                });
            }
            sweeps += 1;

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let row = &mut z[k * n..(k + 1) * n];
                        let f = row[i + 1];
                        row[i + 1] = s * row[i] + c * f;
                        row[i] = c * row[i] - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn identity_spectrum() {
        let s = sym_eigvals(&SymMatrix::identity(4), DEFAULT_TOL).unwrap();
        assert!(close(s.values(), &[1.0; 4], 1e-14));
    }

    #[test]
    fn swap_matrix_is_plus_minus_one() {
        let a = SymMatrix::from_row_major(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let s = sym_eigvals(&a, DEFAULT_TOL).unwrap();
        assert!(close(s.values(), &[1.0, -1.0], 1e-14));
    }

    #[test]
    fn ones_block_has_single_nonzero() {
        let (n, k) = (200, 100);
        let a = SymMatrix::from_fn(n, |i, j| if i < k && j < k { 1.0 } else { 0.0 }).unwrap();
        let s = sym_eigvals(&a, DEFAULT_TOL).unwrap();
        assert!((s.values()[0] - 100.0).abs() < 1e-9);
        assert!(s.values()[1..].iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn empty_and_scalar() {
        assert!(sym_eigvals(&SymMatrix::zeros(0), DEFAULT_TOL)
            .unwrap()
            .is_empty());
        let a = SymMatrix::from_row_major(1, vec![-3.5]).unwrap();
        assert_eq!(sym_eigvals(&a, DEFAULT_TOL).unwrap().values(), &[-3.5]);
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(sym_eigvals(&SymMatrix::identity(2), 0.0).is_err());
        assert!(sym_eigvals(&SymMatrix::identity(2), f64::NAN).is_err());
    }

    #[test]
    fn eigenvectors_satisfy_residual_contract() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for n in [1, 2, 3, 7, 20, 45] {
            let a = SymMatrix::from_fn(n, |_, _| rng.random_range(-1.0..1.0)).unwrap();
            let eig = sym_eig(&a, DEFAULT_TOL).unwrap();
            let fro = a.frobenius_norm();
            for (lambda, v) in eig.values.values().iter().zip(&eig.vectors) {
                let av = a.mul_vec(v);
                let res: f64 = av
                    .iter()
                    .zip(v)
                    .map(|(x, y)| (x - lambda * y).powi(2))
                    .sum::<f64>()
                    .sqrt();
                assert!(res <= DEFAULT_TOL * fro, "n={n} residual {res}");
                let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!((norm - 1.0).abs() < 1e-12);
            }
            let plain = sym_eigvals(&a, DEFAULT_TOL).unwrap();
            assert!(close(plain.values(), eig.values.values(), 1e-12));
        }
    }

    #[test]
    fn singular_values_of_rectangular() {
        // [[3, 0], [0, -2], [0, 0]] has singular values 3, 2.
        let sv = singular_values(3, 2, &[3.0, 0.0, 0.0, -2.0, 0.0, 0.0], DEFAULT_TOL).unwrap();
        assert!(close(&sv, &[3.0, 2.0], 1e-13));
        assert!(singular_values(0, 4, &[], DEFAULT_TOL).unwrap().is_empty());
    }
}
