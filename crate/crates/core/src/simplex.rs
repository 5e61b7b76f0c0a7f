//! Half-space data model: the simplex `A x <= b`, points, and residuals.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;

/// Rows with a Euclidean norm at or below this are rejected as zero rows.
pub const ZERO_ROW_TOL: f64 = 1e-14;
/// Allowed deviation of a stored row norm from 1.
pub const ROW_NORM_TOL: f64 = 1e-12;
/// Largest accepted condition number of the head block.
pub const COND_MAX: f64 = 1e12;
/// Default margin separating interior, boundary and exterior points.
pub const INTERIOR_TOL: f64 = 1e-12;

/// A simplex in half-space form with unit-normalized rows.
///
/// `a` has `n+1` rows and `n` columns. The first `n` rows (the head block) are
/// guaranteed nonsingular; the last row is the one expressed through the head
/// rows by the gamma multipliers.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    a: DMatrix<f64>,
    b: DVector<f64>,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.a.ncols()
    }

    /// Number of constraints, always `dim() + 1`.
    pub fn num_rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn a_matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b_vector(&self) -> &DVector<f64> {
        &self.b
    }

    /// The square block made of the first `n` rows.
    pub fn head(&self) -> DMatrix<f64> {
        self.a.rows(0, self.dim()).into_owned()
    }

    pub fn head_b(&self) -> DVector<f64> {
        self.b.rows(0, self.dim()).into_owned()
    }

    pub fn last_row(&self) -> DVector<f64> {
        self.a.row(self.dim()).transpose()
    }

    pub fn last_b(&self) -> f64 {
        self.b[self.dim()]
    }

    pub fn row(&self, i: usize) -> DVector<f64> {
        self.a.row(i).transpose()
    }

    /// Rows as plain vectors, in storage order.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.a.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    /// Copy with the last row and its right-hand side negated.
    ///
    /// Useful for producing the unbounded counterpart of a bounded simplex.
    pub fn with_last_row_flipped(&self) -> Simplex {
        let mut out = self.clone();
        let n = self.dim();
        for j in 0..n {
            out.a[(n, j)] = -out.a[(n, j)];
        }
        out.b[n] = -out.b[n];
        out
    }
}

/// A point in the ambient space of a simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub coords: DVector<f64>,
}

impl Point {
    pub fn new(coords: impl Into<Vec<f64>>) -> Self {
        Point {
            coords: DVector::from_vec(coords.into()),
        }
    }

    pub fn from_vector(coords: DVector<f64>) -> Self {
        Point { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.coords.iter().copied().collect()
    }
}

/// Signed distances `b_i - a_i . p` to each of the `n+1` hyperplanes.
#[derive(Debug, Clone, PartialEq)]
pub struct Residuals {
    pub values: DVector<f64>,
}

impl Residuals {
    pub fn min(&self) -> f64 {
        self.values.min()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.values.iter().copied().collect()
    }
}

/// Where a point sits relative to the simplex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    StrictInterior,
    Boundary,
    Exterior,
}

/// Builds a [`Simplex`] from raw rows, dividing each row and its right-hand
/// side by the row's Euclidean norm.
///
/// The feasible set is unchanged. Fails on ragged or mis-sized input, on
/// non-finite entries, on zero rows, and when the first `n` normalized rows are
/// numerically singular.
pub fn normalize_rows<R: AsRef<[f64]>>(raw_a: &[R], raw_b: &[f64]) -> Result<Simplex> {
    let m = raw_a.len();
    if m < 2 {
        return Err(Error::ShapeMismatch(format!(
            "need n+1 >= 2 constraint rows, got {m}"
        )));
    }
    let n = m - 1;
    for (i, row) in raw_a.iter().enumerate() {
        let len = row.as_ref().len();
        if len != n {
            return Err(Error::ShapeMismatch(format!(
                "row {} has {len} entries, expected {n} for {m} rows",
                i + 1
            )));
        }
    }
    if raw_b.len() != m {
        return Err(Error::ShapeMismatch(format!(
            "b has {} entries, expected {m}",
            raw_b.len()
        )));
    }
    let finite = raw_a.iter().all(|r| r.as_ref().iter().all(|v| v.is_finite()))
        && raw_b.iter().all(|v| v.is_finite());
    if !finite {
        return Err(Error::NonFinite);
    }

    let mut a = DMatrix::zeros(m, n);
    let mut b = DVector::zeros(m);
    for (i, row) in raw_a.iter().enumerate() {
        let row = row.as_ref();
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= ZERO_ROW_TOL {
            return Err(Error::ZeroRow(i));
        }
        // rows already unit up to rounding are kept bit-for-bit, which makes
        // normalization exactly idempotent
        let unit_slack = (row.len() + 2) as f64 * f64::EPSILON;
        let norm = if (norm - 1.0).abs() <= unit_slack { 1.0 } else { norm };
        for (j, v) in row.iter().enumerate() {
            a[(i, j)] = v / norm;
        }
        b[i] = raw_b[i] / norm;
    }

    let cond = linalg::condition_number(&a.rows(0, n).into_owned());
    if !(cond <= COND_MAX) {
        return Err(Error::SingularHead { condition: cond });
    }
    Ok(Simplex { a, b })
}

/// Residuals `S_i = b_i - a_i . p` for every constraint. No sign requirement.
pub fn evaluate_residuals(s: &Simplex, p: &Point) -> Result<Residuals> {
    check_point_dim(s, p)?;
    Ok(Residuals {
        values: &s.b - &s.a * &p.coords,
    })
}

/// Classifies `p` by its smallest residual against `interior_tol`.
pub fn classify_point(s: &Simplex, p: &Point, interior_tol: f64) -> Result<Location> {
    let min = evaluate_residuals(s, p)?.min();
    Ok(if min > interior_tol {
        Location::StrictInterior
    } else if min.abs() <= interior_tol {
        Location::Boundary
    } else {
        Location::Exterior
    })
}

pub(crate) fn check_point_dim(s: &Simplex, p: &Point) -> Result<()> {
    if p.dim() != s.dim() {
        return Err(Error::ShapeMismatch(format!(
            "point has {} coordinates, simplex dimension is {}",
            p.dim(),
            s.dim()
        )));
    }
    Ok(())
}

/// Residuals at `p`, failing unless `p` is strictly interior.
pub(crate) fn interior_residuals(s: &Simplex, p: &Point) -> Result<Residuals> {
    let r = evaluate_residuals(s, p)?;
    let min = r.min();
    if min > INTERIOR_TOL {
        Ok(r)
    } else {
        Err(Error::NotInterior { min_residual: min })
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use proptest::prelude::*;

    const R2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn normalizes_by_row_norm() {
        let s = right_triangle();
        let expect = [[-1.0, 0.0], [0.0, -1.0], [R2, R2]];
        for (i, row) in expect.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert!((s.a_matrix()[(i, j)] - v).abs() < 1e-15);
            }
            assert!((s.row(i).norm() - 1.0).abs() <= ROW_NORM_TOL);
        }
        assert_eq!(s.b_vector()[0], 0.0);
        assert_eq!(s.b_vector()[1], 0.0);
        assert!((s.b_vector()[2] - R2).abs() < 1e-15);
    }

    #[test]
    fn unit_rows_pass_through_unchanged() {
        let rows = [[-1.0, 0.0], [0.0, -1.0], [0.6, 0.8]];
        let s = normalize_rows(&rows, &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(s.rows(), rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
        assert_eq!(s.b_vector().as_slice(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn zero_row_is_rejected() {
        let err = normalize_rows(&[[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]], &[0.0, 0.0, 1.0]);
        assert!(matches!(err, Err(Error::ZeroRow(0))));
    }

    #[test]
    fn shape_errors() {
        let ragged: Vec<Vec<f64>> = vec![vec![1.0, 0.0], vec![0.0], vec![1.0, 1.0]];
        assert!(matches!(
            normalize_rows(&ragged, &[0.0, 0.0, 1.0]),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(
            normalize_rows(&[[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]], &[0.0, 0.0]),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(
            normalize_rows(&[[1.0]], &[0.0]),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(
            normalize_rows(&[[f64::NAN, 0.0], [0.0, 1.0], [1.0, 1.0]], &[0.0, 0.0, 1.0]),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn parallel_head_rows_are_singular() {
        let err = normalize_rows(&[[1.0, 0.0], [2.0, 0.0], [0.0, 1.0]], &[1.0, 1.0, 1.0]);
        assert!(matches!(err, Err(Error::SingularHead { .. })));
    }

    #[test]
    fn residuals_of_right_triangle() {
        let s = right_triangle();
        let r = evaluate_residuals(&s, &Point::new([0.25, 0.25])).unwrap();
        // b_3 - a_3 . p = 1/sqrt2 - 0.5/sqrt2
        let expect = [0.25, 0.25, 0.5 * R2];
        for (got, want) in r.values.iter().zip(expect) {
            assert!((got - want).abs() < 1e-15, "{got} vs {want}");
        }

        let on_facet = evaluate_residuals(&s, &Point::new([0.0, 0.5])).unwrap();
        assert_eq!(on_facet.values[0], 0.0);

        let outside = evaluate_residuals(&s, &Point::new([2.0, 2.0])).unwrap();
        assert!(outside.values[2] < 0.0);

        assert!(matches!(
            evaluate_residuals(&s, &Point::new([1.0])),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn classification() {
        let s = right_triangle();
        let c = |x: f64, y: f64| classify_point(&s, &Point::new([x, y]), INTERIOR_TOL).unwrap();
        assert_eq!(c(0.25, 0.25), Location::StrictInterior);
        assert_eq!(c(0.0, 0.5), Location::Boundary);
        assert_eq!(c(2.0, 2.0), Location::Exterior);
    }

    #[test]
    fn flipping_last_row() {
        let s = right_triangle().with_last_row_flipped();
        assert!((s.a_matrix()[(2, 0)] + R2).abs() < 1e-15);
        assert!((s.last_b() + R2).abs() < 1e-15);
    }

    fn raw_simplex() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>)> {
        (1usize..6).prop_flat_map(|n| {
            (
                proptest::collection::vec(
                    proptest::collection::vec(-10.0..10.0f64, n),
                    n + 1,
                ),
                proptest::collection::vec(-5.0..5.0f64, n + 1),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn normalization_is_idempotent((rows, b) in raw_simplex()) {
            let Ok(s) = normalize_rows(&rows, &b) else { return Ok(()); };
            let again = normalize_rows(&s.rows(), s.b_vector().as_slice()).unwrap();
            prop_assert_eq!(s.a_matrix(), again.a_matrix());
            prop_assert_eq!(s.b_vector(), again.b_vector());
        }

        #[test]
        fn normalization_preserves_feasibility(
            (rows, b) in raw_simplex(),
            pts in proptest::collection::vec(proptest::collection::vec(-3.0..3.0f64, 5), 40),
        ) {
            let Ok(s) = normalize_rows(&rows, &b) else { return Ok(()); };
            let n = s.dim();
            for p in pts {
                let p = &p[..n];
                let raw_min = rows.iter().zip(&b)
                    .map(|(r, bi)| bi - r.iter().zip(p).map(|(x, y)| x * y).sum::<f64>())
                    .fold(f64::INFINITY, f64::min);
                let min = evaluate_residuals(&s, &Point::new(p.to_vec())).unwrap().min();
                // skip points numerically on a facet
                if raw_min.abs() > 1e-9 && min.abs() > 1e-9 {
                    prop_assert_eq!(raw_min > 0.0, min > 0.0);
                }
            }
        }

        #[test]
        fn residuals_are_affine(
            (rows, b) in raw_simplex(),
            p in proptest::collection::vec(-3.0..3.0f64, 5),
            q in proptest::collection::vec(-3.0..3.0f64, 5),
            alpha in -2.0..2.0f64,
        ) {
            let Ok(s) = normalize_rows(&rows, &b) else { return Ok(()); };
            let n = s.dim();
            let p = Point::new(p[..n].to_vec());
            let q = Point::new(q[..n].to_vec());
            let mix = Point::from_vector(&p.coords * alpha + &q.coords * (1.0 - alpha));
            let sp = evaluate_residuals(&s, &p).unwrap().values;
            let sq = evaluate_residuals(&s, &q).unwrap().values;
            let sm = evaluate_residuals(&s, &mix).unwrap().values;
            let lin = sp * alpha + sq * (1.0 - alpha);
            for (x, y) in sm.iter().zip(lin.iter()) {
                prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
            }
        }
    }
}
