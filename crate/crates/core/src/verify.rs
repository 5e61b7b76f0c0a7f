//! One-shot verification of every identity the library relies on, for a
//! single simplex. Backs the `verify` subcommand.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::center::{center_newton, cross_check_center, SolverConfig, CROSS_TOL};
use crate::construct::enumerate_vertices;
use crate::error::Result;
use crate::gamma::{
    check_bounded, compute_gamma, evaluate_invariant, find_recession_direction, GAMMA_POS_TOL,
};
use crate::probe::{axis_distances, harmonic_point_on_line};
use crate::simplex::{evaluate_residuals, Simplex};

pub const RECONSTRUCTION_TOL: f64 = 1e-10;
/// Relative tolerance on `gamma_i S_i = S_{n+1}` at the closed-form center.
pub const CENTER_RELATION_TOL: f64 = 1e-9;
pub const INVARIANT_SPREAD_TOL: f64 = 1e-9;
/// Bound on `|sum 1/d_i|` relative to `sum |1/d_i|` along each axis through
/// the center; relative because a thin simplex puts large terms in the sum.
pub const AXIS_HARMONIC_TOL: f64 = 1e-11;
pub const LINE_HARMONIC_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
}

impl Check {
    fn at_most(name: &'static str, measured: f64, tolerance: f64) -> Self {
        Check {
            name,
            passed: measured <= tolerance,
            measured,
            tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub dim: usize,
    pub samples: usize,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs the full suite. Unbounded or degenerate input is reported as an
/// error rather than as failed checks.
pub fn verify_simplex(
    s: &Simplex,
    samples: usize,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<VerifyReport> {
    let n = s.dim();
    let g = compute_gamma(s)?;
    let mut checks = Vec::new();

    checks.push(Check::at_most(
        "gamma_reconstruction",
        g.reconstruction_error(s),
        RECONSTRUCTION_TOL,
    ));
    let recession = find_recession_direction(s)?;
    checks.push(Check {
        name: "gamma_positive",
        passed: g.bounded_by_gamma && recession.is_none(),
        measured: g.min_gamma(),
        tolerance: GAMMA_POS_TOL,
    });
    check_bounded(s)?.into_result()?;

    let center = cross_check_center(s, cfg)?;
    checks.push(Check::at_most(
        "center_relation",
        center.eq24_residual,
        CENTER_RELATION_TOL,
    ));

    // invariant over random interior points
    let vertices = enumerate_vertices(s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for _ in 0..samples.max(1) {
        let p = vertices.sample_interior(&mut rng);
        let v = evaluate_invariant(s, &g, &p)?;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    checks.push(Check::at_most(
        "invariant_spread",
        hi - lo,
        INVARIANT_SPREAD_TOL * (1.0 + g.invariant_constant.abs()),
    ));

    // closed-form residuals against the independent Newton solution
    let newton = center_newton(s, cfg, None)?;
    let expected_last = g.invariant_constant / (n + 1) as f64;
    checks.push(Check::at_most(
        "last_residual_closed_form",
        (newton.residuals_at_h.values[n] - expected_last).abs(),
        CROSS_TOL,
    ));
    let ratio_gap = (0..n)
        .map(|i| (newton.residuals_at_h.values[i] - expected_last / g.gamma[i]).abs())
        .fold(0.0, f64::max);
    checks.push(Check::at_most("residual_ratios", ratio_gap, CROSS_TOL));

    let axis_gap = (0..n)
        .map(|k| {
            axis_distances(s, &center.center, k).map(|d| {
                let sum: f64 = d.iter().flatten().map(|x| 1.0 / x).sum();
                let size: f64 = d.iter().flatten().map(|x| 1.0 / x.abs()).sum();
                sum.abs() / size
            })
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    checks.push(Check::at_most("axis_harmonic", axis_gap, AXIS_HARMONIC_TOL));

    let mut line_gap: f64 = 0.0;
    for _ in 0..samples.max(1) {
        let v = random_unit(n, &mut rng);
        let (_, t) = harmonic_point_on_line(s, &center.center, &v)?;
        line_gap = line_gap.max(t.abs());
    }
    checks.push(Check::at_most("line_harmonic", line_gap, LINE_HARMONIC_TOL));

    // the center must be interior with positive residuals
    let actual = evaluate_residuals(s, &center.center)?;
    checks.push(Check {
        name: "center_interior",
        passed: actual.min() > 0.0,
        measured: actual.min(),
        tolerance: 0.0,
    });

    Ok(VerifyReport {
        dim: n,
        samples,
        seed,
        checks,
    })
}

pub(crate) fn random_unit<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let v: DVector<f64> = DVector::from_fn(n, |_, _| StandardNormal.sample(rng));
        let norm = v.norm();
        if norm > 1e-8 {
            return v / norm;
        }
    }
}
