//! Populations from line heights by equality-constrained least squares.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{basis_index, rest_masks};
use crate::error::{Error, Result};

/// Per-spin gains: the measured height of a full-polarization line divided by ½.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub gains: Vec<f64>,
}

impl Calibration {
    pub fn unit(n: usize) -> Self {
        Calibration { gains: vec![1.0; n] }
    }
}

/// Rows map populations to population differences `p(spin=0) − p(spin=1)`,
/// one row per line, spin-major and in the line order of [`super::lines`].
pub fn height_matrix(n: usize) -> DMatrix<f64> {
    let dim = 1usize << n;
    let rows = n * (dim / 2);
    let mut a = DMatrix::zeros(rows, dim);
    let mut r = 0;
    for spin in 0..n {
        for rest in rest_masks(n, spin) {
            a[(r, basis_index(n, spin, 0, rest))] = 1.0;
            a[(r, basis_index(n, spin, 1, rest))] = -1.0;
            r += 1;
        }
    }
    a
}

/// Minimizes `‖Ax − b‖²` subject to `Cx = d` via the KKT system.
pub fn constrained_least_squares(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    c: &DMatrix<f64>,
    d: &DVector<f64>,
) -> Result<DVector<f64>> {
    let (m, k) = (a.ncols(), c.nrows());
    if a.nrows() != b.len() || c.ncols() != m || c.nrows() != d.len() {
        return Err(Error::InvalidArgument("inconsistent least-squares dimensions".into()));
    }
    let mut kkt = DMatrix::zeros(m + k, m + k);
    kkt.view_mut((0, 0), (m, m)).copy_from(&(a.transpose() * a * 2.0));
    kkt.view_mut((0, m), (m, k)).copy_from(&c.transpose());
    kkt.view_mut((m, 0), (k, m)).copy_from(c);
    let mut rhs = DVector::zeros(m + k);
    rhs.rows_mut(0, m).copy_from(&(a.transpose() * b * 2.0));
    rhs.rows_mut(m, k).copy_from(d);
    let svd = kkt.svd(true, true);
    let smax = svd.singular_values.max();
    let rank = svd.rank(smax * 1e-10);
    if rank < m + k {
        return Err(Error::RankDeficient { rank, needed: m + k });
    }
    let x = svd.solve(&rhs, smax * 1e-14).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(x.rows(0, m).into_owned())
}

/// Populations from line heights (spin-major, as in [`height_matrix`]).
/// Each height is `½·gain·Δp`; the populations are constrained to sum to one.
pub fn peak_heights_to_probabilities(n: usize, heights: &[f64], cal: &Calibration) -> Result<Vec<f64>> {
    if n == 0 || n > 12 {
        return Err(Error::SpinCount(n));
    }
    let a = height_matrix(n);
    if heights.len() != a.nrows() {
        return Err(Error::DimensionMismatch(a.nrows(), heights.len()));
    }
    if cal.gains.len() != n {
        return Err(Error::DimensionMismatch(n, cal.gains.len()));
    }
    if cal.gains.iter().any(|g| !g.is_finite() || g.abs() < 1e-12) {
        return Err(Error::SingularCalibration);
    }
    let per = a.nrows() / n;
    let b =
        DVector::from_iterator(heights.len(), heights.iter().enumerate().map(|(r, h)| 2.0 * h / cal.gains[r / per]));
    let dim = 1usize << n;
    let c = DMatrix::from_element(1, dim, 1.0);
    let d = DVector::from_element(1, 1.0);
    Ok(constrained_least_squares(&a, &b, &c, &d)?.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heights_of(p: &[f64], n: usize) -> Vec<f64> {
        (height_matrix(n) * DVector::from_column_slice(p) * 0.5).iter().copied().collect()
    }

    #[test]
    fn recovers_exact_populations() {
        let p = [0.25, 0.375, 0.375, 0.0];
        let got = peak_heights_to_probabilities(2, &heights_of(&p, 2), &Calibration::unit(2)).unwrap();
        for (g, w) in got.iter().zip(p) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn pseudo_pure_populations() {
        let p: Vec<f64> = [3.0, -1.0, -1.0, -1.0].iter().map(|x| 0.25 + x / 12.0).collect();
        let got = peak_heights_to_probabilities(2, &heights_of(&p, 2), &Calibration::unit(2)).unwrap();
        for (g, w) in got.iter().zip(&p) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn gains_are_divided_out() {
        let p = [0.1, 0.2, 0.3, 0.4];
        let h: Vec<f64> =
            heights_of(&p, 2).iter().enumerate().map(|(i, h)| h * if i < 2 { 3.0 } else { 0.5 }).collect();
        let got = peak_heights_to_probabilities(2, &h, &Calibration { gains: vec![3.0, 0.5] }).unwrap();
        for (g, w) in got.iter().zip(p) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_deficiency_reported() {
        let a = DMatrix::from_row_slice(1, 3, &[1.0, -1.0, 0.0]);
        let c = DMatrix::from_element(1, 3, 1.0);
        let r = constrained_least_squares(&a, &DVector::from_element(1, 0.0), &c, &DVector::from_element(1, 1.0));
        assert!(matches!(r, Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn zero_gain_rejected() {
        let r = peak_heights_to_probabilities(2, &[0.0; 4], &Calibration { gains: vec![0.0, 1.0] });
        assert_eq!(r, Err(Error::SingularCalibration));
    }
}
