//! Row multipliers of the last constraint and what follows from them.
//!
//! Because the head block is nonsingular, the last row can be written as
//! `row_{n+1} = -sum_i gamma_i * row_i`. Substituting into the residual of the
//! last row gives, for every point,
//!
//! ```text
//! S_{n+1} + sum_i gamma_i S_i = b_{n+1} + b0,   b0 = sum_i gamma_i b_i
//! ```
//!
//! and a bounded simplex needs every `gamma_i > 0`: if `gamma_k <= 0`, the
//! direction parallel to every head facet except `k` (moving away from `k`)
//! never meets the last facet.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg;
use crate::simplex::{interior_residuals, Point, Simplex};

/// Multipliers at or below this are not considered strictly positive.
pub const GAMMA_POS_TOL: f64 = 1e-10;
/// Componentwise slack allowed in `A v <= 0` for a recession direction.
pub const RECESSION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct GammaDecomposition {
    pub gamma: DVector<f64>,
    pub b0: f64,
    /// `b_{n+1} + b0`, the value of the invariant expression.
    pub invariant_constant: f64,
    pub bounded_by_gamma: bool,
}

impl GammaDecomposition {
    pub fn min_gamma(&self) -> f64 {
        self.gamma.min()
    }

    /// `|| sum_i gamma_i row_i + row_{n+1} ||_inf`, zero in exact arithmetic.
    pub fn reconstruction_error(&self, s: &Simplex) -> f64 {
        let combo = s.head().transpose() * &self.gamma + s.last_row();
        linalg::inf_norm(&combo)
    }
}

/// Solves `(A^N)^T gamma = -row_{n+1}` and derives `b0` and the invariant
/// constant.
pub fn compute_gamma(s: &Simplex) -> Result<GammaDecomposition> {
    let head_t = s.head().transpose();
    let gamma = linalg::solve(&head_t, &(-s.last_row())).ok_or(Error::SingularHead {
        condition: f64::INFINITY,
    })?;
    let b0 = gamma.dot(&s.head_b());
    let bounded_by_gamma = gamma.min() > GAMMA_POS_TOL;
    Ok(GammaDecomposition {
        invariant_constant: s.last_b() + b0,
        gamma,
        b0,
        bounded_by_gamma,
    })
}

/// Warning attached to a boundedness verdict.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// `gamma_k` lies within `GAMMA_POS_TOL` of zero, so its sign is not
    /// numerically meaningful.
    DegenerateGamma { index: usize, value: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Boundedness {
    Bounded {
        gamma: DVector<f64>,
    },
    Unbounded {
        /// Smallest index `k` with `gamma_k <= GAMMA_POS_TOL`.
        offending_index: Option<usize>,
        witness_direction: Option<DVector<f64>>,
        warnings: Vec<Warning>,
    },
}

impl Boundedness {
    pub fn is_bounded(&self) -> bool {
        matches!(self, Boundedness::Bounded { .. })
    }

    /// Converts an unbounded verdict into [`Error::Unbounded`].
    pub fn into_result(self) -> Result<DVector<f64>> {
        match self {
            Boundedness::Bounded { gamma } => Ok(gamma),
            Boundedness::Unbounded {
                offending_index,
                witness_direction,
                ..
            } => Err(Error::Unbounded {
                offending_index,
                witness_direction: witness_direction.map(|v| v.iter().copied().collect()),
            }),
        }
    }
}

/// Certifies boundedness only when every multiplier is positive *and* the
/// recession search comes back empty.
pub fn check_bounded(s: &Simplex) -> Result<Boundedness> {
    let g = compute_gamma(s)?;
    let witness = find_recession_direction(s)?;
    if g.bounded_by_gamma && witness.is_none() {
        return Ok(Boundedness::Bounded { gamma: g.gamma });
    }
    let offending_index = g.gamma.iter().position(|&x| x <= GAMMA_POS_TOL);
    let warnings = g
        .gamma
        .iter()
        .enumerate()
        .filter(|(_, x)| x.abs() <= GAMMA_POS_TOL)
        .map(|(index, &value)| Warning::DegenerateGamma { index, value })
        .collect();
    Ok(Boundedness::Unbounded {
        offending_index,
        witness_direction: witness,
        warnings,
    })
}

/// `S_{n+1} + sum_i gamma_i S_i` at a strictly interior point.
pub fn evaluate_invariant(s: &Simplex, g: &GammaDecomposition, p: &Point) -> Result<f64> {
    let r = interior_residuals(s, p)?;
    let n = s.dim();
    Ok(r.values[n] + g.gamma.dot(&r.values.rows(0, n)))
}

/// Searches for a unit `v` with `A v <= RECESSION_TOL` componentwise.
///
/// For each head facet `k`, the candidate is the solution of
/// `A^N w = -e_k`: it runs parallel to every other head facet and away from
/// facet `k`. A candidate is accepted when the full product `A w` is
/// componentwise nonpositive (within tolerance); the multipliers are not
/// consulted. The returned witness is the normalized sum of all accepted
/// candidates, which is again a recession direction.
pub fn find_recession_direction(s: &Simplex) -> Result<Option<DVector<f64>>> {
    let n = s.dim();
    let lu = s.head().lu();
    let is_recession = |w: &DVector<f64>| (s.a_matrix() * w).iter().all(|&x| x <= RECESSION_TOL);

    let mut accepted = Vec::new();
    for k in 0..n {
        let mut beta = DVector::zeros(n);
        beta[k] = -1.0;
        let w = lu.solve(&beta).ok_or(Error::SingularHead {
            condition: f64::INFINITY,
        })?;
        if is_recession(&w) {
            let norm = w.norm();
            accepted.push(w / norm);
        }
    }
    let Some(first) = accepted.first().cloned() else {
        return Ok(None);
    };
    let sum: DVector<f64> = accepted.iter().fold(DVector::zeros(n), |acc, w| acc + w);
    let norm = sum.norm();
    let combined = sum / norm;
    if norm > 0.0 && is_recession(&combined) {
        Ok(Some(combined))
    } else {
        Ok(Some(first))
    }
}
