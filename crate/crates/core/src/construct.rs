//! Building simplexes: vertices from facets, facets from vertices, random
//! bounded simplexes and the equal-multiplier construction.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::gamma::{check_bounded, compute_gamma};
use crate::linalg;
use crate::simplex::{normalize_rows, Point, Simplex, COND_MAX};

const MAX_ATTEMPTS: usize = 1000;

/// Vertex `i` is the solution of all rows except row `i` at equality.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexSet {
    pub vertices: Vec<Point>,
}

impl VertexSet {
    pub fn average(&self) -> Point {
        let n = self.vertices[0].dim();
        let sum = self
            .vertices
            .iter()
            .fold(DVector::zeros(n), |acc, v| acc + &v.coords);
        Point::from_vector(sum / self.vertices.len() as f64)
    }

    /// Convex combination with the given (nonnegative, summing to 1) weights.
    pub fn combine(&self, weights: &[f64]) -> Point {
        let n = self.vertices[0].dim();
        let sum = self
            .vertices
            .iter()
            .zip(weights)
            .fold(DVector::zeros(n), |acc, (v, w)| acc + &v.coords * *w);
        Point::from_vector(sum)
    }

    /// Point with uniformly distributed barycentric coordinates; strictly
    /// interior with probability 1.
    pub fn sample_interior<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let raw: Vec<f64> = (0..self.vertices.len())
            .map(|_| Exp1.sample(rng))
            .collect::<Vec<f64>>();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|x| x / total).collect();
        self.combine(&weights)
    }
}

pub fn enumerate_vertices(s: &Simplex) -> Result<VertexSet> {
    let n = s.dim();
    let a = s.a_matrix();
    let b = s.b_vector();
    let mut vertices = Vec::with_capacity(n + 1);
    for skip in 0..=n {
        let keep: Vec<usize> = (0..=n).filter(|&i| i != skip).collect();
        let sub = a.select_rows(&keep);
        let rhs = b.select_rows(&keep);
        if !(linalg::condition_number(&sub) <= COND_MAX) {
            return Err(Error::DegenerateFacetSystem(skip));
        }
        let x = linalg::solve(&sub, &rhs).ok_or(Error::DegenerateFacetSystem(skip))?;
        // adding +0.0 clears the negative zeros the elimination leaves behind
        vertices.push(Point::from_vector(x.map(|v| v + 0.0)));
    }
    Ok(VertexSet { vertices })
}

/// Half-space form of the simplex spanned by `n+1` affinely independent
/// points. Row `i` is the facet opposite vertex `i`, oriented so that vertex
/// `i` lies strictly inside.
pub fn simplex_from_vertices(vertices: &[Point]) -> Result<Simplex> {
    let m = vertices.len();
    if m < 2 || vertices.iter().any(|v| v.dim() != m - 1) {
        return Err(Error::ShapeMismatch(format!(
            "need n+1 points of dimension n, got {m} points"
        )));
    }
    let n = m - 1;
    let origin = &vertices[0].coords;
    let mut edges = DMatrix::zeros(n, n);
    for j in 0..n {
        edges.set_column(j, &(&vertices[j + 1].coords - origin));
    }
    // rows of the inverse map x to barycentric coordinates lambda_1..lambda_n
    let inv = edges
        .try_inverse()
        .filter(|m| m.iter().all(|v| v.is_finite()))
        .ok_or(Error::DegenerateFacetSystem(0))?;

    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    // lambda_0 = 1 - sum_j r_j . (x - v0) >= 0
    let total: DVector<f64> = inv.row_sum().transpose();
    rows.push(total.iter().copied().collect::<Vec<_>>());
    rhs.push(1.0 + total.dot(origin));
    // lambda_j = r_j . (x - v0) >= 0
    for j in 0..n {
        let r: DVector<f64> = inv.row(j).transpose();
        rows.push(r.iter().map(|v| -v).collect());
        rhs.push(-r.dot(origin));
    }
    normalize_rows(&rows, &rhs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub dim: usize,
    pub seed: u64,
    pub vertex_scale: f64,
    /// Reject draws whose head block has condition number above
    /// `1 / min_condition`.
    pub min_condition: f64,
}

impl GeneratorConfig {
    pub fn new(dim: usize, seed: u64) -> Self {
        GeneratorConfig {
            dim,
            seed,
            vertex_scale: 1.0,
            min_condition: 1e-6,
        }
    }
}

/// Deterministic random bounded simplex: Gaussian vertices, facets through
/// each `n`-subset, rows normalized. Draws whose edge matrix or head block
/// has condition number above `1 / min_condition` are rejected.
pub fn random_bounded_simplex(cfg: &GeneratorConfig) -> Result<Simplex> {
    if cfg.dim == 0 {
        return Err(Error::InvalidConfig("dim must be at least 1".into()));
    }
    if !(cfg.vertex_scale > 0.0) || !(cfg.min_condition > 0.0) {
        return Err(Error::InvalidConfig(
            "vertex_scale and min_condition must be positive".into(),
        ));
    }
    let n = cfg.dim;
    let max_cond = 1.0 / cfg.min_condition;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..MAX_ATTEMPTS {
        let vertices: Vec<Point> = (0..=n)
            .map(|_| {
                Point::from_vector(DVector::from_fn(n, |_, _| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    z * cfg.vertex_scale
                }))
            })
            .collect();
        // affine degeneracy of the draw itself: edges from the first vertex
        let edges = DMatrix::from_fn(n, n, |i, j| vertices[j + 1].coords[i] - vertices[0].coords[i]);
        if !(linalg::condition_number(&edges) <= max_cond) {
            continue;
        }
        let Ok(s) = simplex_from_vertices(&vertices) else {
            continue;
        };
        if !(linalg::condition_number(&s.head()) <= max_cond) {
            continue;
        }
        if !matches!(check_bounded(&s), Ok(b) if b.is_bounded()) {
            continue;
        }
        if enumerate_vertices(&s).is_err() {
            continue;
        }
        return Ok(s);
    }
    Err(Error::GenerationFailed(MAX_ATTEMPTS))
}

/// Simplex whose last row is the normalized negative sum of the head rows,
/// so every multiplier equals `1 / ||sum_i row_i||`.
///
/// `last_b` is the right-hand side of the normalized last row. Head rows are
/// normalized first (together with `head_b`). Returns the simplex and the
/// common multiplier.
pub fn make_equal_gamma_simplex<R: AsRef<[f64]>>(
    head_rows: &[R],
    head_b: &[f64],
    last_b: f64,
) -> Result<(Simplex, f64)> {
    let n = head_rows.len();
    if n == 0 || head_b.len() != n || head_rows.iter().any(|r| r.as_ref().len() != n) {
        return Err(Error::ShapeMismatch(format!(
            "head must be n x n with n right-hand sides (got {n} rows, {} values)",
            head_b.len()
        )));
    }
    if !last_b.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut rhs = Vec::with_capacity(n + 1);
    for (row, &bi) in head_rows.iter().zip(head_b) {
        let row = row.as_ref();
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > crate::simplex::ZERO_ROW_TOL) {
            return Err(Error::ZeroRow(rows.len()));
        }
        rows.push(row.iter().map(|v| v / norm).collect());
        rhs.push(bi / norm);
    }
    let sum: Vec<f64> = (0..n).map(|j| rows.iter().map(|r| r[j]).sum()).collect();
    let norm = sum.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 1e-12) {
        return Err(Error::DegenerateSum(norm));
    }
    rows.push(sum.iter().map(|v| -v / norm).collect());
    rhs.push(last_b);

    let s = normalize_rows(&rows, &rhs)?;
    let g = compute_gamma(&s)?;
    if !(g.invariant_constant > 0.0) {
        return Err(Error::EmptyInterior(g.invariant_constant));
    }
    Ok((s, 1.0 / norm))
}
