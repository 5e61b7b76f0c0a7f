//! Line geometry: signed distances from a point to each facet along a
//! direction, and the harmonic point of a line.
//!
//! Distances are signed, positive when the facet is reached moving forward
//! along the direction. A facet parallel to the line has no distance; its
//! reciprocal is taken as 0.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::gamma::GammaDecomposition;
use crate::linalg;
use crate::simplex::{check_point_dim, interior_residuals, Point, Simplex};

/// `|a_i . v|` at or below this counts as parallel.
pub const PARALLEL_TOL: f64 = 1e-12;
/// Allowed deviation of `||v||` from 1.
pub const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LineProbe {
    pub base: Point,
    pub direction: DVector<f64>,
    /// Signed distance to each of the `n+1` facets, `None` when parallel.
    pub distances: Vec<Option<f64>>,
    /// `a_i . v` for the head rows.
    pub betas: DVector<f64>,
}

impl LineProbe {
    /// `sum_i 1/d_i`, parallel facets contributing 0.
    pub fn reciprocal_sum(&self) -> f64 {
        self.distances.iter().flatten().map(|d| 1.0 / d).sum()
    }
}

fn check_unit(s: &Simplex, v: &DVector<f64>) -> Result<()> {
    if v.len() != s.dim() {
        return Err(Error::ShapeMismatch(format!(
            "direction has {} components, simplex dimension is {}",
            v.len(),
            s.dim()
        )));
    }
    let norm = v.norm();
    if !((norm - 1.0).abs() <= UNIT_TOL) {
        return Err(Error::NotUnit { norm });
    }
    Ok(())
}

/// Distances `d_i = S_i / (a_i . v)` from `p` along `v`.
pub fn probe_line(s: &Simplex, p: &Point, v: &DVector<f64>) -> Result<LineProbe> {
    check_point_dim(s, p)?;
    check_unit(s, v)?;
    let r = interior_residuals(s, p)?;
    let slopes = s.a_matrix() * v;
    let distances = slopes
        .iter()
        .zip(r.values.iter())
        .map(|(&c, &si)| (c.abs() > PARALLEL_TOL).then(|| si / c))
        .collect();
    Ok(LineProbe {
        base: p.clone(),
        direction: v.clone(),
        distances,
        betas: slopes.rows(0, s.dim()).into_owned(),
    })
}

/// Distances along coordinate axis `axis` (0-based), i.e. `S_i / A_{i,axis}`.
pub fn axis_distances(s: &Simplex, p: &Point, axis: usize) -> Result<Vec<Option<f64>>> {
    let n = s.dim();
    if axis >= n {
        return Err(Error::AxisOutOfRange { axis, dim: n });
    }
    let mut e = DVector::zeros(n);
    e[axis] = 1.0;
    Ok(probe_line(s, p, &e)?.distances)
}

/// Solves `A^N w = beta` and returns `(w / ||w||, ||w||)`.
///
/// The unit direction has `a_i . v = beta_i / ||w||` for every head row.
pub fn direction_from_beta(s: &Simplex, beta: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    if beta.len() != s.dim() {
        return Err(Error::ShapeMismatch(format!(
            "beta has {} components, simplex dimension is {}",
            beta.len(),
            s.dim()
        )));
    }
    if beta.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroBeta);
    }
    let w = linalg::solve(&s.head(), beta).ok_or(Error::SingularHead {
        condition: f64::INFINITY,
    })?;
    let scale = w.norm();
    Ok((w / scale, scale))
}

/// Distance to the last facet through the multipliers:
/// `d_{n+1} = -S_{n+1} / sum_i gamma_i beta_i`.
///
/// Agrees with `probe.distances[n]` whenever both exist, since
/// `a_{n+1} . v = -sum_i gamma_i beta_i`.
pub fn last_facet_distance(
    s: &Simplex,
    g: &GammaDecomposition,
    p: &Point,
    probe: &LineProbe,
) -> Result<f64> {
    let r = interior_residuals(s, p)?;
    let denom = g.gamma.dot(&probe.betas);
    if denom.abs() <= PARALLEL_TOL {
        return Err(Error::ParallelToLastFacet);
    }
    Ok(-r.values[s.dim()] / denom)
}

/// Unique point `p + t v` on the open chord where the signed reciprocal
/// distances to all facets sum to zero. Returns the point and `t`.
///
/// With `c_i = a_i . v`, the sum is `g(t) = sum_i c_i / (S_i - t c_i)`, which is
/// strictly increasing between the poles bounding the chord. The root is
/// found by Newton steps safeguarded with bisection on a shrinking bracket.
pub fn harmonic_point_on_line(s: &Simplex, p: &Point, v: &DVector<f64>) -> Result<(Point, f64)> {
    check_point_dim(s, p)?;
    check_unit(s, v)?;
    let r = interior_residuals(s, p)?.values;
    let c = s.a_matrix() * v;

    let terms: Vec<(f64, f64)> = c
        .iter()
        .zip(r.iter())
        .filter(|(ci, _)| ci.abs() > PARALLEL_TOL)
        .map(|(&ci, &si)| (ci, si))
        .collect();
    let hi = terms
        .iter()
        .filter(|(ci, _)| *ci > 0.0)
        .map(|(ci, si)| si / ci)
        .fold(f64::INFINITY, f64::min);
    let lo = terms
        .iter()
        .filter(|(ci, _)| *ci < 0.0)
        .map(|(ci, si)| si / ci)
        .fold(f64::NEG_INFINITY, f64::max);
    if !hi.is_finite() || !lo.is_finite() {
        return Err(Error::NoIntersection);
    }

    let eval = |t: f64| {
        terms.iter().fold((0.0, 0.0), |(g, dg), (ci, si)| {
            let rem = si - t * ci;
            (g + ci / rem, dg + (ci / rem) * (ci / rem))
        })
    };

    let (mut a, mut b) = (lo, hi);
    let mut t = 0.0;
    // near a facet neighbouring floats of t can differ in g by far more than
    // rounding, so keep the best iterate rather than the last one
    let mut best = (f64::INFINITY, 0.0);
    for _ in 0..200 {
        let (g, dg) = eval(t);
        if g.abs() < best.0 {
            best = (g.abs(), t);
        }
        if g == 0.0 {
            break;
        }
        if g > 0.0 {
            b = t;
        } else {
            a = t;
        }
        let newton = t - g / dg;
        let next = if newton > a && newton < b && newton.is_finite() {
            newton
        } else {
            0.5 * (a + b)
        };
        if next == t || (b - a) <= f64::EPSILON * (a.abs().max(b.abs()).max(f64::MIN_POSITIVE)) {
            break;
        }
        t = next;
    }
    let t = best.1;

    Ok((Point::from_vector(&p.coords + v * t), t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::compute_gamma;
    use crate::simplex::fixtures::*;

    const R2: f64 = std::f64::consts::FRAC_1_SQRT_2;
    const THIRD: f64 = 1.0 / 3.0;

    fn e(n: usize, k: usize) -> DVector<f64> {
        let mut v = DVector::zeros(n);
        v[k] = 1.0;
        v
    }

    fn close(got: Option<f64>, want: Option<f64>, tol: f64) -> bool {
        match (got, want) {
            (Some(x), Some(y)) => (x - y).abs() <= tol,
            (None, None) => true,
            _ => false,
        }
    }

    #[test]
    fn probe_right_triangle() {
        let s = right_triangle();
        let probe = probe_line(&s, &Point::new([0.25, 0.25]), &e(2, 0)).unwrap();
        let want = [Some(-0.25), None, Some(0.5)];
        for (got, want) in probe.distances.iter().zip(want) {
            assert!(close(*got, want, 1e-15), "{got:?} vs {want:?}");
        }
        assert_eq!(probe.betas.as_slice(), &[-1.0, 0.0]);

        let probe = probe_line(&s, &Point::new([THIRD, THIRD]), &e(2, 0)).unwrap();
        let want = [Some(-THIRD), None, Some(THIRD)];
        for (got, want) in probe.distances.iter().zip(want) {
            assert!(close(*got, want, 1e-15));
        }
    }

    #[test]
    fn probe_errors() {
        let s = right_triangle();
        let v = DVector::from_vec(vec![1.0, 1.0]);
        assert!(matches!(
            probe_line(&s, &Point::new([0.25, 0.25]), &v),
            Err(Error::NotUnit { .. })
        ));
        assert!(matches!(
            probe_line(&s, &Point::new([0.0, 0.25]), &e(2, 0)),
            Err(Error::NotInterior { .. })
        ));
        assert!(matches!(
            axis_distances(&s, &Point::new([0.25, 0.25]), 2),
            Err(Error::AxisOutOfRange { .. })
        ));
    }

    #[test]
    fn axis_distances_fixtures() {
        let s = right_triangle();
        let h = Point::new([THIRD, THIRD]);
        let d = axis_distances(&s, &h, 1).unwrap();
        let want = [None, Some(-THIRD), Some(THIRD)];
        for (got, want) in d.iter().zip(want) {
            assert!(close(*got, want, 1e-15));
        }

        let s = equilateral();
        let r3 = 3f64.sqrt();
        let d = axis_distances(&s, &Point::new([0.5, r3 / 6.0]), 1).unwrap();
        let want = [Some(-r3 / 6.0), Some(r3 / 3.0), Some(r3 / 3.0)];
        for (got, want) in d.iter().zip(want) {
            assert!(close(*got, want, 1e-15), "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn directions_from_beta() {
        let s = right_triangle();
        let (v, scale) = direction_from_beta(&s, &DVector::from_vec(vec![-1.0, 0.0])).unwrap();
        assert_eq!(v.as_slice(), &[1.0, 0.0]);
        assert_eq!(scale, 1.0);
        let (v, _) = direction_from_beta(&s, &DVector::from_vec(vec![0.0, -1.0])).unwrap();
        assert_eq!(v.as_slice(), &[0.0, 1.0]);
        assert!(matches!(
            direction_from_beta(&s, &DVector::zeros(2)),
            Err(Error::ZeroBeta)
        ));

        let s = equilateral();
        let u = DVector::from_vec(vec![0.6, -0.8]);
        let beta = s.head() * &u;
        let (v, scale) = direction_from_beta(&s, &beta).unwrap();
        assert!((&v - &u).norm() < 1e-15);
        assert!((scale - 1.0).abs() < 1e-15);
    }

    #[test]
    fn last_facet_distance_matches_direct() {
        let s = right_triangle();
        let g = compute_gamma(&s).unwrap();
        let p = Point::new([0.25, 0.25]);
        for k in 0..2 {
            let probe = probe_line(&s, &p, &e(2, k)).unwrap();
            let d = last_facet_distance(&s, &g, &p, &probe).unwrap();
            assert!((d - 0.5).abs() < 1e-15);
            assert!((d - probe.distances[2].unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn last_facet_distance_escapes_for_flipped_wedge() {
        // interior point of the flipped wedge {x >= 0, y >= 0, x + y >= 1}
        let s = right_triangle().with_last_row_flipped();
        let g = compute_gamma(&s).unwrap();
        let p = Point::new([1.0, 1.0]);
        let (v, _) = direction_from_beta(&s, &DVector::from_vec(vec![-1.0, 0.0])).unwrap();
        let probe = probe_line(&s, &p, &v).unwrap();
        assert!(last_facet_distance(&s, &g, &p, &probe).unwrap() < 0.0);
    }

    #[test]
    fn parallel_to_last_facet() {
        let s = right_triangle();
        let g = compute_gamma(&s).unwrap();
        let p = Point::new([0.25, 0.25]);
        let v = DVector::from_vec(vec![R2, -R2]);
        let probe = probe_line(&s, &p, &v).unwrap();
        assert!(probe.distances[2].is_none());
        assert!(matches!(
            last_facet_distance(&s, &g, &p, &probe),
            Err(Error::ParallelToLastFacet)
        ));
    }

    /// Plain bisection on the reciprocal sum, written independently of the
    /// solver.
    fn bisect_root(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn harmonic_point_matches_bisection() {
        let s = right_triangle();
        let p = Point::new([0.25, 0.25]);
        // along y = 0.25 the chord is x in (0, 0.75): g(x) = -1/x + 1/(0.75 - x)
        let x_star = bisect_root(1e-12, 0.75 - 1e-12, |x| -1.0 / x + 1.0 / (0.75 - x));
        assert!((x_star - 0.375).abs() < 1e-15);

        let (q, t) = harmonic_point_on_line(&s, &p, &e(2, 0)).unwrap();
        assert!((t - (x_star - 0.25)).abs() < 1e-14);
        assert!((q.coords[0] - 0.375).abs() < 1e-14);
        assert_eq!(q.coords[1], 0.25);
        let probe = probe_line(&s, &q, &e(2, 0)).unwrap();
        assert!(probe.reciprocal_sum().abs() <= 1e-11);
    }

    #[test]
    fn harmonic_point_at_center_is_fixed() {
        let s = right_triangle();
        let h = Point::new([THIRD, THIRD]);
        for angle in [0.0, 0.3, 1.1, 2.0, 3.9, 5.5] {
            let v = DVector::from_vec(vec![f64::cos(angle), f64::sin(angle)]);
            let (_, t) = harmonic_point_on_line(&s, &h, &v).unwrap();
            assert!(t.abs() <= 1e-12, "angle {angle}: t = {t}");
        }
    }

    #[test]
    fn harmonic_point_interval() {
        let s = unit_interval();
        let (q, t) = harmonic_point_on_line(&s, &Point::new([0.3]), &e(1, 0)).unwrap();
        assert!((t - 0.2).abs() < 1e-15);
        assert!((q.coords[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn harmonic_point_needs_both_sides() {
        let s = right_triangle().with_last_row_flipped();
        let v = DVector::from_vec(vec![R2, R2]);
        assert!(matches!(
            harmonic_point_on_line(&s, &Point::new([1.0, 1.0]), &v),
            Err(Error::NoIntersection)
        ));
    }
}
