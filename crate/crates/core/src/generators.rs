//! Test matrix families.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::store::SparseSymStore;

/// Largest dimension accepted by [`tensor_hard_instance`].
pub const TENSOR_MAX_DIM: usize = 8192;

/// Points in the unit square.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<[f64; 2]>,
}

impl PointCloud {
    pub fn new(points: Vec<[f64; 2]>) -> Result<Self> {
        if let Some(k) = points
            .iter()
            .position(|p| !p.iter().all(|c| (0.0..=1.0).contains(c)))
        {
            return Err(Error::InvalidArgument(format!(
                "point {k} lies outside the unit square"
            )));
        }
        Ok(PointCloud { points })
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `k × k` block of ones in the top-left corner of an `n × n` zero matrix.
pub fn block_matrix(n: usize, k: usize) -> Result<SymMatrix> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "block size {k} must lie in 1..={n}"
        )));
    }
    SymMatrix::from_fn(n, |i, j| if i < k && j < k { 1.0 } else { 0.0 })
}

/// G(n, p) adjacency matrix: zero diagonal, each unordered pair an edge with
/// probability `p`.
pub fn erdos_renyi<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<SparseSymStore> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "edge probability must lie in [0, 1], got {p}"
        )));
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j, 1.0));
            }
        }
    }
    SparseSymStore::build(n, &edges)
}

fn nonempty(pc: &PointCloud) -> Result<()> {
    if pc.is_empty() {
        return Err(Error::InvalidArgument("point cloud is empty".into()));
    }
    Ok(())
}

/// Hyperbolic-tangent kernel `tanh(⟨x, y⟩ / 2)`.
pub fn tanh_similarity(pc: &PointCloud) -> Result<SymMatrix> {
    nonempty(pc)?;
    let p = pc.points();
    SymMatrix::from_fn(p.len(), |i, j| {
        (0.5 * (p[i][0] * p[j][0] + p[i][1] * p[j][1])).tanh()
    })
}

/// Thin-plate spline kernel `r² log r²` with `r = ‖x - y‖`, zero at `r = 0`.
pub fn thin_plate_spline(pc: &PointCloud) -> Result<SymMatrix> {
    nonempty(pc)?;
    let p = pc.points();
    SymMatrix::from_fn(p.len(), |i, j| {
        let dx = p[i][0] - p[j][0];
        let dy = p[i][1] - p[j][1];
        let r2 = dx * dx + dy * dy;
        if r2 == 0.0 {
            0.0
        } else {
            r2 * r2.ln()
        }
    })
}

/// Points scattered along a noisy closed curve, rescaled to fill the unit
/// square along each axis.
pub fn synthetic_point_cloud<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PointCloud> {
    if n == 0 {
        return Err(Error::InvalidArgument("point count must be positive".into()));
    }
    let mut pts: Vec<[f64; 2]> = (0..n)
        .map(|_| {
            let t = 2.0 * PI * rng.random::<f64>();
            let r = 0.35
                + 0.10 * (3.0 * t).sin()
                + 0.05 * (7.0 * t).cos()
                + rng.random_range(-0.02..0.02);
            [0.5 + r * t.cos(), 0.5 + r * t.sin()]
        })
        .collect();
    for axis in 0..2 {
        let lo = pts.iter().map(|p| p[axis]).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(|p| p[axis]).fold(f64::NEG_INFINITY, f64::max);
        let span = hi - lo;
        for p in &mut pts {
            p[axis] = if span > 0.0 {
                ((p[axis] - lo) / span).clamp(0.0, 1.0)
            } else {
                p[axis].clamp(0.0, 1.0)
            };
        }
    }
    PointCloud::new(pts)
}

/// Path-graph adjacency: ones directly above and below a zero diagonal.
/// Its spectrum is `2 cos(kπ/(n+1))`, `k = 1..n`.
pub fn tridiagonal_ones(n: usize) -> Result<SparseSymStore> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "tridiagonal matrix needs n >= 2, got {n}"
        )));
    }
    let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
    SparseSymStore::build(n, &edges)
}

/// Kronecker product of a symmetric random ±1 matrix of side `inv_eps_sq`
/// with an all-ones block of side `block`.
pub fn tensor_hard_instance<R: Rng + ?Sized>(
    inv_eps_sq: usize,
    block: usize,
    rng: &mut R,
) -> Result<SymMatrix> {
    let n = inv_eps_sq
        .checked_mul(block)
        .filter(|&n| n > 0 && n <= TENSOR_MAX_DIM)
        .ok_or_else(|| {
            Error::InvalidArgument(format!(
                "tensor instance {inv_eps_sq}x{block} must have dimension in 1..={TENSOR_MAX_DIM}"
            ))
        })?;
    let signs = SymMatrix::from_fn(inv_eps_sq, |_, _| {
        if rng.random_bool(0.5) {
            1.0
        } else {
            -1.0
        }
    })?;
    SymMatrix::from_fn(n, |i, j| signs.get(i / block, j / block))
}

/// Configuration-model graph with power-law degrees: `d_i = ⌊d_min·U^{-1/(γ-1)}⌋`
/// capped at `n - 1`, stubs paired uniformly at random, self-loops and
/// repeated edges dropped.
pub fn power_law_graph<R: Rng + ?Sized>(
    n: usize,
    exponent: f64,
    min_degree: usize,
    rng: &mut R,
) -> Result<SparseSymStore> {
    if !(exponent > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "power-law exponent must exceed 1, got {exponent}"
        )));
    }
    if n < 2 || min_degree == 0 {
        return Err(Error::InvalidArgument(
            "power-law graph needs n >= 2 and min_degree >= 1".into(),
        ));
    }
    let cap = (n - 1) as f64;
    let mut stubs = Vec::new();
    for v in 0..n {
        let u: f64 = rng.random();
        let d = (min_degree as f64 * (1.0 - u).powf(-1.0 / (exponent - 1.0)))
            .floor()
            .min(cap) as usize;
        stubs.extend(std::iter::repeat_n(v, d));
    }
    if stubs.len() % 2 == 1 {
        stubs.pop();
    }
    stubs.shuffle(rng);
    let edges: BTreeSet<(usize, usize)> = stubs
        .chunks_exact(2)
        .filter(|c| c[0] != c[1])
        .map(|c| (c[0].min(c[1]), c[0].max(c[1])))
        .collect();
    let entries: Vec<_> = edges.into_iter().map(|(i, j)| (i, j, 1.0)).collect();
    SparseSymStore::build(n, &entries)
}
