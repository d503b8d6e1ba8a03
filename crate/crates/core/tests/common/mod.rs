//! Reference implementations used as test oracles. They share no code with
//! the library beyond the matrix container.
#![allow(dead_code)]

use rand::Rng;
use submat_eig::SymMatrix;

/// Eigenvalues by cyclic Jacobi rotations, sorted descending.
pub fn jacobi_eigvals(a: &SymMatrix) -> Vec<f64> {
    let n = a.n();
    let mut m: Vec<f64> = a.as_slice().to_vec();
    let fro: f64 = m.iter().map(|v| v * v).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j].powi(2))
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * fro.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (kp, kq) = (m[k * n + p], m[k * n + q]);
                    m[k * n + p] = c * kp - s * kq;
                    m[k * n + q] = s * kp + c * kq;
                }
                for k in 0..n {
                    let (pk, qk) = (m[p * n + k], m[q * n + k]);
                    m[p * n + k] = c * pk - s * qk;
                    m[q * n + k] = s * pk + c * qk;
                }
            }
        }
    }
    let mut d: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    d.sort_by(|a, b| b.total_cmp(a));
    d
}

/// Largest absolute eigenvalue via the Jacobi oracle.
pub fn jacobi_spectral_norm(a: &SymMatrix) -> f64 {
    jacobi_eigvals(a).iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Symmetric matrix with entries uniform in [-1, 1]; each upper-triangle
/// entry is nonzero with probability `density`.
pub fn random_symmetric<R: Rng>(n: usize, density: f64, rng: &mut R) -> SymMatrix {
    SymMatrix::from_fn(n, |_, _| {
        if rng.random::<f64>() < density {
            rng.random_range(-1.0..=1.0)
        } else {
            0.0
        }
    })
    .unwrap()
}

/// `B Bᵀ / r` with `B` uniform in [-1, 1]: positive semidefinite with
/// entries bounded by 1.
pub fn random_psd<R: Rng>(n: usize, r: usize, rng: &mut R) -> SymMatrix {
    let b: Vec<f64> = (0..n * r).map(|_| rng.random_range(-1.0..=1.0)).collect();
    SymMatrix::from_fn(n, |i, j| {
        (0..r).map(|k| b[i * r + k] * b[j * r + k]).sum::<f64>() / r as f64
    })
    .unwrap()
}

/// `A·A / n`, positive semidefinite.
pub fn gram_scaled(a: &SymMatrix) -> SymMatrix {
    let n = a.n();
    SymMatrix::from_fn(n, |i, j| {
        a.row(i).iter().zip(a.row(j)).map(|(x, y)| x * y).sum::<f64>() / n as f64
    })
    .unwrap()
}

pub fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}
