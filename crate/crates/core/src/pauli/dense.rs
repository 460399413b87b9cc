//! Dense-matrix interop. The computational basis index has spin 1 as its most
//! significant bit and |0⟩ is the Iz = +½ state.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::label::{Basis, PauliLabel};
use super::operator::SpinOperator;
use crate::error::{Error, Result};

pub type Matrix = DMatrix<Complex64>;

pub const DEFAULT_DENSE_LIMIT: usize = 12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// ⟨row_bit| factor |col_bit⟩ for a single-spin code.
fn factor(basis: Basis, code: u8, row_bit: usize, col_bit: usize) -> Complex64 {
    match (basis, code) {
        (_, 0) => {
            if row_bit == col_bit {
                Complex64::new(1.0, 0.0)
            } else {
                ZERO
            }
        }
        (_, 3) => match (row_bit, col_bit) {
            (0, 0) => Complex64::new(0.5, 0.0),
            (1, 1) => Complex64::new(-0.5, 0.0),
            _ => ZERO,
        },
        (Basis::Cartesian, 1) => {
            if row_bit != col_bit {
                Complex64::new(0.5, 0.0)
            } else {
                ZERO
            }
        }
        (Basis::Cartesian, _) => match (row_bit, col_bit) {
            (0, 1) => Complex64::new(0.0, -0.5),
            (1, 0) => Complex64::new(0.0, 0.5),
            _ => ZERO,
        },
        (Basis::Spherical, 1) => {
            if (row_bit, col_bit) == (0, 1) {
                Complex64::new(1.0, 0.0)
            } else {
                ZERO
            }
        }
        (Basis::Spherical, _) => {
            if (row_bit, col_bit) == (1, 0) {
                Complex64::new(1.0, 0.0)
            } else {
                ZERO
            }
        }
    }
}

pub(crate) fn label_element(label: PauliLabel, n: usize, basis: Basis, row: usize, col: usize) -> Complex64 {
    let mut v = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let b = n - 1 - k;
        v *= factor(basis, label.code(k), (row >> b) & 1, (col >> b) & 1);
        if v == ZERO {
            break;
        }
    }
    v
}

/// Mask of dense-index bits for a spin-bit mask.
fn dense_mask(spin_mask: u64, n: usize) -> usize {
    let mut m = 0usize;
    for k in 0..n {
        if spin_mask & (1 << k) != 0 {
            m |= 1 << (n - 1 - k);
        }
    }
    m
}

pub fn to_dense(op: &SpinOperator, limit: usize) -> Result<Matrix> {
    let n = op.n();
    if n > limit {
        return Err(Error::DenseLimit { n, limit });
    }
    let dim = 1usize << n;
    let mut m = Matrix::zeros(dim, dim);
    for (l, v) in op.terms() {
        let flip = dense_mask(l.transverse(), n);
        for col in 0..dim {
            let row = col ^ flip;
            let e = label_element(l, n, op.basis(), row, col);
            if e != ZERO {
                m[(row, col)] += v * e;
            }
        }
    }
    Ok(m)
}

/// Projects a 2^N × 2^N matrix onto the Cartesian product-operator basis.
///
/// For each flip pattern the relevant matrix entries are combined with a
/// per-spin two-point butterfly, so the cost is O(N · 4^N).
pub fn from_dense(m: &Matrix, n: usize, limit: usize) -> Result<SpinOperator> {
    if n > limit {
        return Err(Error::DenseLimit { n, limit });
    }
    let dim = 1usize << n;
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::DimensionMismatch(n, m.nrows().trailing_zeros() as usize));
    }
    let mut terms = Vec::new();
    let mut buf = vec![ZERO; dim];
    for f in 0..dim {
        let mut any = false;
        for (c, slot) in buf.iter_mut().enumerate() {
            *slot = m[(c ^ f, c)];
            any |= *slot != ZERO;
        }
        if !any {
            continue;
        }
        butterfly(&mut buf, n, f);
        for (j, &val) in buf.iter().enumerate() {
            if val == ZERO {
                continue;
            }
            let mut label = PauliLabel::IDENTITY;
            for k in 0..n {
                let b = n - 1 - k;
                let transverse = (f >> b) & 1 == 1;
                let second = (j >> b) & 1 == 1;
                let code = match (transverse, second) {
                    (false, false) => 0,
                    (false, true) => 3,
                    (true, false) => 1,
                    (true, true) => 2,
                };
                label = label.with_code(k, code);
            }
            // tr(P²) = 2^N · 4^{-w}
            let norm = 2f64.powi(n as i32) * 0.25f64.powi(label.weight() as i32);
            terms.push((label, val / norm));
        }
    }
    Ok(SpinOperator::from_label_map(n, Basis::Cartesian, terms))
}

/// In place: entry j becomes tr(P_j M) restricted to flip pattern `f`.
fn butterfly(buf: &mut [Complex64], n: usize, f: usize) {
    let half_i = Complex64::new(0.0, 0.5);
    for k in 0..n {
        let bit = 1usize << (n - 1 - k);
        let transverse = f & bit != 0;
        for i0 in 0..buf.len() {
            if i0 & bit != 0 {
                continue;
            }
            let (u0, u1) = (buf[i0], buf[i0 | bit]);
            if transverse {
                // row bit 0 pairs with column bit 1: x gives ½, y gives -i/2 then +i/2
                buf[i0] = (u0 + u1) * 0.5;
                buf[i0 | bit] = -half_i * u0 + half_i * u1;
            } else {
                buf[i0] = u0 + u1;
                buf[i0 | bit] = (u0 - u1) * 0.5;
            }
        }
    }
}

/// Operator with the given computational-basis diagonal (fast Walsh transform).
pub fn from_diagonal(diag: &[Complex64]) -> Result<SpinOperator> {
    let dim = diag.len();
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::InvalidArgument(format!("diagonal length {dim} is not a power of two")));
    }
    let n = dim.trailing_zeros() as usize;
    let mut buf = diag.to_vec();
    butterfly(&mut buf, n, 0);
    let terms = buf.into_iter().enumerate().map(|(j, val)| {
        let mut label = PauliLabel::IDENTITY;
        for k in 0..n {
            if (j >> (n - 1 - k)) & 1 == 1 {
                label = label.with_code(k, 3);
            }
        }
        let norm = 2f64.powi(n as i32) * 0.25f64.powi(label.weight() as i32);
        (label, val / norm)
    });
    Ok(SpinOperator::from_label_map(n, Basis::Cartesian, terms))
}

/// `exp(i·s·H)` for Hermitian `H` via eigendecomposition.
pub fn expm_hermitian(h: &Matrix, s: f64) -> Matrix {
    let eig = nalgebra::SymmetricEigen::new(h.clone());
    let phases = Matrix::from_diagonal(&eig.eigenvalues.map(|e| Complex64::from_polar(1.0, s * e)));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(h: &Matrix) -> Vec<f64> {
    let mut v: Vec<f64> = nalgebra::SymmetricEigen::new(h.clone()).eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Dense partial trace keeping the listed spins (0-based, ascending output order).
pub fn partial_trace_dense(m: &Matrix, n: usize, keep: &[usize]) -> Matrix {
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    let traced: Vec<usize> = (0..n).filter(|k| !keep.contains(k)).collect();
    let nk = keep.len();
    let dk = 1usize << nk;
    let dt = 1usize << traced.len();
    let compose = |a: usize, t: usize| {
        let mut idx = 0usize;
        for (j, &s) in keep.iter().enumerate() {
            if (a >> (nk - 1 - j)) & 1 == 1 {
                idx |= 1 << (n - 1 - s);
            }
        }
        for (j, &s) in traced.iter().enumerate() {
            if (t >> (traced.len() - 1 - j)) & 1 == 1 {
                idx |= 1 << (n - 1 - s);
            }
        }
        idx
    };
    let mut out = Matrix::zeros(dk, dk);
    for r in 0..dk {
        for c in 0..dk {
            let mut s = ZERO;
            for t in 0..dt {
                s += m[(compose(r, t), compose(c, t))];
            }
            out[(r, c)] = s;
        }
    }
    out
}

/// Largest elementwise deviation between `a` and `phase · b`, where the phase
/// is fixed by the first element of `b` with magnitude above `tol`.
/// Returns the deviation and the phase.
pub fn deviation_up_to_phase(a: &Matrix, b: &Matrix, tol: f64) -> (f64, Complex64) {
    let pivot = b.iter().zip(a.iter()).find(|(bv, _)| bv.norm() > tol);
    let phase = match pivot {
        Some((bv, av)) => {
            let r = av / bv;
            r / r.norm()
        }
        None => Complex64::new(1.0, 0.0),
    };
    let dev = a.iter().zip(b.iter()).map(|(x, y)| (x - phase * y).norm()).fold(0.0, f64::max);
    (dev, phase)
}

pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}
