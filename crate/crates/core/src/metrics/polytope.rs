//! Vertex enumeration for centrally symmetric polytopes `{x : a.x <= 1}`.
//!
//! The polar of `conv(V)` is `{y : v.y <= 1 for v in V}`, so facet normals of
//! a vertex-described ball are the vertices of that polar body and vice
//! versa. Both directions run through [`vertices_of`].

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

use super::MetricsError;

const FEAS_TOL: f64 = 1e-9;
const SAME_TOL: f64 = 1e-9;

/// Vertices of the bounded polytope `{x in R^dim : a.x <= 1 for a in facets}`,
/// by brute force over `dim`-subsets of facets. Fails if the polytope is
/// unbounded (fewer than `dim + 1` vertices or no vertex at all).
pub fn vertices_of(facets: &[Vec<f64>], dim: usize) -> Result<Vec<Vec<f64>>, MetricsError> {
    if let Some(bad) = facets.iter().find(|a| a.len() != dim) {
        return Err(MetricsError::DimensionMismatch { expected: dim, got: bad.len() });
    }
    let facets = dedup(facets.to_vec());
    let mut out: Vec<Vec<f64>> = Vec::new();
    for subset in (0..facets.len()).combinations(dim) {
        let a = DMatrix::from_fn(dim, dim, |i, j| facets[subset[i]][j]);
        let svd = a.clone().svd(false, false);
        let (smax, smin) = (svd.singular_values.max(), svd.singular_values.min());
        if smax == 0.0 || smin / smax < 1e-12 {
            continue;
        }
        let Some(x) = a.lu().solve(&DVector::from_element(dim, 1.0)) else {
            continue;
        };
        let x: Vec<f64> = x.iter().copied().collect();
        if facets.iter().all(|f| super::dot(f, &x) <= 1.0 + FEAS_TOL) && !out.iter().any(|v| close(v, &x)) {
            out.push(x);
        }
    }
    if out.len() <= dim {
        return Err(MetricsError::InvalidNorm("polytope is unbounded or degenerate".into()));
    }
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    Ok(out)
}

/// Facet normals of `conv(vertices)` (the vertices of its polar).
pub fn polar_vertices(vertices: &[Vec<f64>], dim: usize) -> Result<Vec<Vec<f64>>, MetricsError> {
    vertices_of(vertices, dim)
}

/// Adds `-v` for every `v` and removes near-duplicates.
pub(crate) fn symmetrize(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut all = points.to_vec();
    all.extend(points.iter().map(|v| v.iter().map(|x| -x).collect::<Vec<f64>>()));
    dedup(all)
}

pub(crate) fn dedup(points: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(points.len());
    for p in points {
        if !out.iter().any(|q| close(q, &p)) {
            out.push(p);
        }
    }
    out
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= SAME_TOL * (1.0 + x.abs().max(y.abs())))
}

/// All `2^dim` sign vectors, in binary counting order.
pub(crate) fn sign_vectors(dim: usize) -> Vec<Vec<f64>> {
    (0..1u64 << dim).map(|s| (0..dim).map(|i| if s >> i & 1 == 1 { -1.0 } else { 1.0 }).collect()).collect()
}

/// `+-e_i`.
pub(crate) fn cross_vectors(dim: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(2 * dim);
    for i in 0..dim {
        for s in [1.0, -1.0] {
            let mut v = vec![0.0; dim];
            v[i] = s;
            out.push(v);
        }
    }
    out
}
