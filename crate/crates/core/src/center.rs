//! The harmonic center, computed two independent ways.
//!
//! The closed form comes from the invariant expression: at the center every
//! product `gamma_i S_i` equals `S_{n+1}`, so all `n+1` terms of the invariant
//! sum are equal and
//!
//! ```text
//! S_{n+1} = (b_{n+1} + b0) / (n+1),   S_i = S_{n+1} / gamma_i
//! ```
//!
//! The iterative route minimizes the log-barrier `-sum ln S_i` with damped
//! Newton steps and stops once the relation `gamma_i S_i = S_{n+1}` holds to
//! the requested relative tolerance.

use nalgebra::{DMatrix, DVector};

use crate::construct::enumerate_vertices;
use crate::error::{Error, Result};
use crate::gamma::{check_bounded, compute_gamma, GammaDecomposition};
use crate::linalg;
use crate::simplex::{evaluate_residuals, Point, Residuals, Simplex};

/// Largest allowed disagreement between the closed-form and Newton centers.
pub const CROSS_TOL: f64 = 1e-8;
/// Safety factor on the rounding estimate in [`barrier_noise`].
pub const POTENTIAL_NOISE: f64 = 64.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Newton,
    CrossChecked,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "ClosedForm",
            Method::Newton => "Newton",
            Method::CrossChecked => "CrossChecked",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CenterResult {
    pub center: Point,
    pub residuals_at_h: Residuals,
    pub method: Method,
    /// `max_i |gamma_i S_i - S_{n+1}| / S_{n+1}` at `center`.
    pub eq24_residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub eq24_tol: f64,
    pub grad_tol: f64,
    pub max_iterations: usize,
    pub min_step: f64,
    pub backtrack_factor: f64,
    pub fraction_to_boundary: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            eq24_tol: 1e-10,
            grad_tol: 1e-12,
            max_iterations: 100,
            min_step: 1e-16,
            backtrack_factor: 0.5,
            fraction_to_boundary: 0.99,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let unit_open = |x: f64| x > 0.0 && x < 1.0;
        if !(self.eq24_tol > 0.0) || !(self.grad_tol > 0.0) || !(self.min_step > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if !unit_open(self.backtrack_factor) || !unit_open(self.fraction_to_boundary) {
            return Err(Error::InvalidConfig(
                "backtrack_factor and fraction_to_boundary must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }
}

/// `max_i |gamma_i S_i - S_{n+1}| / S_{n+1}` for the given residuals.
pub fn relation_residual(gamma: &DVector<f64>, r: &Residuals) -> f64 {
    let n = gamma.len();
    let last = r.values[n];
    (0..n)
        .map(|i| (gamma[i] * r.values[i] - last).abs())
        .fold(0.0, f64::max)
        / last
}

/// `-sum ln S_i(x)`, `+inf` outside the open simplex.
pub fn barrier_potential(s: &Simplex, x: &DVector<f64>) -> f64 {
    let r = s.b_vector() - s.a_matrix() * x;
    if r.iter().any(|&v| v <= 0.0) {
        return f64::INFINITY;
    }
    -r.iter().map(|v| v.ln()).sum::<f64>()
}

/// Size of the rounding error in [`barrier_potential`] at `x`.
///
/// Each residual loses about `eps (|b_i| + |a_i| |x|)` to cancellation, which
/// the logarithm turns into a relative error of that over `S_i`.
pub fn barrier_noise(s: &Simplex, x: &DVector<f64>) -> f64 {
    let r = s.b_vector() - s.a_matrix() * x;
    let lost: f64 = (0..s.num_rows())
        .map(|i| {
            let row = s.a_matrix().row(i);
            let mag = s.b_vector()[i].abs() + row.iter().zip(x.iter()).map(|(a, v)| (a * v).abs()).sum::<f64>();
            mag / r[i] + r[i].ln().abs()
        })
        .sum();
    POTENTIAL_NOISE * lost
}

/// Gradient `sum_i a_i / S_i` of the barrier.
pub fn barrier_gradient(s: &Simplex, x: &DVector<f64>) -> DVector<f64> {
    let r = s.b_vector() - s.a_matrix() * x;
    let inv = r.map(|v| 1.0 / v);
    s.a_matrix().transpose() * inv
}

/// Hessian `sum_i a_i a_i^T / S_i^2` of the barrier.
pub fn barrier_hessian(s: &Simplex, x: &DVector<f64>) -> DMatrix<f64> {
    let r = s.b_vector() - s.a_matrix() * x;
    let mut scaled = s.a_matrix().clone();
    for (i, mut row) in scaled.row_iter_mut().enumerate() {
        row /= r[i];
    }
    scaled.transpose() * scaled
}

/// Closed-form center from the multipliers.
///
/// The reported residuals are the closed-form values; `eq24_residual` is
/// measured at the recovered coordinates, so it reflects any error introduced
/// by the head-block solve.
pub fn center_closed_form(s: &Simplex, g: &GammaDecomposition) -> Result<CenterResult> {
    if !g.bounded_by_gamma {
        return Err(Error::Unbounded {
            offending_index: g.gamma.iter().position(|&x| x <= crate::gamma::GAMMA_POS_TOL),
            witness_direction: None,
        });
    }
    if !(g.invariant_constant > 0.0) {
        return Err(Error::NonpositiveConstant(g.invariant_constant));
    }
    let n = s.dim();
    let last = g.invariant_constant / (n + 1) as f64;
    let mut values = DVector::zeros(n + 1);
    for i in 0..n {
        values[i] = last / g.gamma[i];
    }
    values[n] = last;

    let rhs = s.head_b() - values.rows(0, n);
    let x = linalg::solve(&s.head(), &rhs).ok_or(Error::SingularHead {
        condition: f64::INFINITY,
    })?;
    let center = Point::from_vector(x);
    let actual = evaluate_residuals(s, &center)?;
    Ok(CenterResult {
        eq24_residual: relation_residual(&g.gamma, &actual),
        center,
        residuals_at_h: Residuals { values },
        method: Method::ClosedForm,
        iterations: 0,
    })
}

/// Damped Newton on the log-barrier.
///
/// Starts from `start` or, by default, the average of the vertices. Each step
/// is capped at `fraction_to_boundary` of the distance to the nearest facet
/// along the Newton direction and then halved (by `backtrack_factor`) until
/// the barrier does not increase.
pub fn center_newton(s: &Simplex, cfg: &SolverConfig, start: Option<&Point>) -> Result<CenterResult> {
    cfg.validate()?;
    let g = compute_gamma(s)?;
    if !g.bounded_by_gamma {
        return Err(Error::Unbounded {
            offending_index: g.gamma.iter().position(|&x| x <= crate::gamma::GAMMA_POS_TOL),
            witness_direction: None,
        });
    }

    let mut x = match start {
        Some(p) => {
            crate::simplex::check_point_dim(s, p)?;
            p.coords.clone()
        }
        None => enumerate_vertices(s)?.average().coords,
    };
    let r0 = s.b_vector() - s.a_matrix() * &x;
    let min0 = r0.min();
    if !(min0 > 0.0) {
        return Err(Error::StartNotInterior { min_residual: min0 });
    }

    let result_at = |x: &DVector<f64>, iterations: usize| {
        let center = Point::from_vector(x.clone());
        let residuals = Residuals {
            values: s.b_vector() - s.a_matrix() * x,
        };
        CenterResult {
            eq24_residual: relation_residual(&g.gamma, &residuals),
            center,
            residuals_at_h: residuals,
            method: Method::Newton,
            iterations,
        }
    };

    let mut phi = barrier_potential(s, &x);
    for iter in 0..=cfg.max_iterations {
        let current = result_at(&x, iter);
        let grad = barrier_gradient(s, &x);
        if current.eq24_residual <= cfg.eq24_tol || linalg::inf_norm(&grad) <= cfg.grad_tol {
            return Ok(current);
        }
        if iter == cfg.max_iterations {
            return Err(Error::MaxIterations(Box::new(current)));
        }

        let hess = barrier_hessian(s, &x);
        let dx = match hess.cholesky() {
            Some(ch) => -ch.solve(&grad),
            None => linalg::solve(&barrier_hessian(s, &x), &(-&grad))
                .ok_or(Error::LineSearchFailed(Box::new(current.clone())))?,
        };

        // largest step keeping every residual positive
        let slope = s.a_matrix() * &dx;
        let residuals = &current.residuals_at_h.values;
        let max_step = slope
            .iter()
            .zip(residuals.iter())
            .filter(|(d, _)| **d > 0.0)
            .map(|(d, r)| r / d)
            .fold(f64::INFINITY, f64::min);
        let mut step = (cfg.fraction_to_boundary * max_step).min(1.0);

        // Once the predicted decrease is below the rounding level of the
        // barrier, comparisons of its value are noise; the full step is then
        // safe since the decrement is far inside the quadratic region.
        let decrement_sq = -grad.dot(&dx);
        let noise = barrier_noise(s, &x);
        let flat = decrement_sq < 1.0 / 16.0 && decrement_sq <= noise;

        loop {
            let trial = &x + &dx * step;
            let trial_phi = barrier_potential(s, &trial);
            let within_noise = flat && trial_phi <= phi + noise;
            if trial_phi <= phi || within_noise {
                x = trial;
                phi = trial_phi;
                break;
            }
            step *= cfg.backtrack_factor;
            if step < cfg.min_step {
                return Err(Error::LineSearchFailed(Box::new(current)));
            }
        }
    }
    unreachable!("loop returns on the final iteration")
}

/// Interior start with barycentric weights proportional to `1, 2, ..., n+1`.
///
/// The vertex average is already the center of a simplex, so a Newton run
/// from there performs no steps; this point keeps the iteration honest.
pub fn skewed_start(s: &Simplex) -> Result<Point> {
    let vertices = enumerate_vertices(s)?;
    let m = vertices.vertices.len();
    let total = (m * (m + 1) / 2) as f64;
    let weights: Vec<f64> = (1..=m).map(|k| k as f64 / total).collect();
    Ok(vertices.combine(&weights))
}

/// Runs both routes and returns the closed-form result tagged
/// [`Method::CrossChecked`] when centers and residuals agree within
/// [`CROSS_TOL`]. The Newton run starts from [`skewed_start`];
/// `iterations` reports its count.
pub fn cross_check_center(s: &Simplex, cfg: &SolverConfig) -> Result<CenterResult> {
    check_bounded(s)?.into_result()?;
    let g = compute_gamma(s)?;
    let closed = center_closed_form(s, &g)?;
    let newton = center_newton(s, cfg, Some(&skewed_start(s)?))?;

    let center_gap = linalg::inf_norm(&(&closed.center.coords - &newton.center.coords));
    let residual_gap =
        linalg::inf_norm(&(&closed.residuals_at_h.values - &newton.residuals_at_h.values));
    let discrepancy = center_gap.max(residual_gap);
    if !(discrepancy <= CROSS_TOL) {
        return Err(Error::CrossCheckFailed {
            closed_form: Box::new(closed),
            newton: Box::new(newton),
            discrepancy,
        });
    }
    Ok(CenterResult {
        method: Method::CrossChecked,
        iterations: newton.iterations,
        ..closed
    })
}
