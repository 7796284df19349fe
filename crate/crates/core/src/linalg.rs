//! Dense complex helpers shared by every module.
//!
//! Inner products are linear in the first argument: `<x, y> = sum x_i conj(y_i)`,
//! and on matrices `<A, B> = trace(B* A)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `e^{i theta}`.
pub fn cis(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

pub fn inner(x: &CVector, y: &CVector) -> Complex64 {
    y.dotc(x)
}

pub fn frobenius_inner(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

pub fn basis_vector(dim: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[i] = ONE;
    v
}

pub fn matrix_unit(dim: usize, row: usize, col: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    m[(row, col)] = ONE;
    m
}

pub fn mat_power(a: &CMatrix, p: u32) -> CMatrix {
    assert!(a.is_square(), "mat_power needs a square matrix");
    let mut result = CMatrix::identity(a.nrows(), a.ncols());
    let mut base = a.clone();
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    result
}

/// Largest singular value.
pub fn op_norm(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone()
        .singular_values()
        .iter()
        .fold(0.0f64, |acc, s| acc.max(*s))
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_vec(v: &CVector) -> f64 {
    v.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

pub fn vectorize(a: &CMatrix) -> CVector {
    CVector::from_column_slice(a.as_slice())
}

pub fn unvectorize(v: &CVector, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_column_slice(rows, cols, v.as_slice())
}

/// Incremental orthonormal basis built by Gram-Schmidt, reorthogonalizing
/// after heavy cancellation. Candidates whose residual falls below
/// `tol * scale` are rejected, where `scale` is the largest candidate norm
/// seen so far.
#[derive(Debug, Clone)]
pub struct OrthoBasis {
    len: usize,
    vectors: Vec<CVector>,
    scale: f64,
    tol: f64,
}

impl OrthoBasis {
    pub fn new(len: usize, tol: f64) -> Self {
        Self {
            len,
            vectors: Vec::new(),
            scale: 0.0,
            tol,
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn ambient(&self) -> usize {
        self.len
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<CVector> {
        self.vectors
    }

    fn project_once(&self, v: &mut CVector) {
        for q in &self.vectors {
            let coef = q.dotc(v);
            v.axpy(-coef, q, ONE);
        }
    }

    fn project_out(&self, v: &mut CVector) {
        self.project_once(v);
        self.project_once(v);
    }

    /// Distance from `v` to the current span.
    pub fn residual(&self, v: &CVector) -> f64 {
        let mut w = v.clone();
        self.project_out(&mut w);
        w.norm()
    }

    /// Orthogonal projection of `v` onto the current span.
    pub fn project(&self, v: &CVector) -> CVector {
        let mut w = v.clone();
        self.project_out(&mut w);
        v - w
    }

    /// Adds `v` if it is numerically independent; returns whether it was added.
    pub fn push(&mut self, v: &CVector) -> bool {
        assert_eq!(v.len(), self.len, "vector length mismatch");
        let n = v.norm();
        self.scale = self.scale.max(n);
        if n == 0.0 {
            return false;
        }
        let mut w = v.clone();
        self.project_once(&mut w);
        let mut r = w.norm();
        // a second pass is needed only after heavy cancellation
        if r > self.tol * self.scale && r < 0.7 * n {
            self.project_once(&mut w);
            r = w.norm();
        }
        if r <= self.tol * self.scale {
            return false;
        }
        self.vectors.push(w / Complex64::from(r));
        true
    }
}

/// Orthonormal basis of the null space of `m` (columns as vectors).
/// Singular values `<= tol * max(largest, floor)` count as zero.
pub fn nullspace(m: &CMatrix, tol: f64) -> Vec<CVector> {
    let cols = m.ncols();
    if cols == 0 {
        return Vec::new();
    }
    let padded;
    let work = if m.nrows() < cols {
        padded = {
            let mut p = CMatrix::zeros(cols, cols);
            p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
            p
        };
        &padded
    } else {
        m
    };
    let svd = work.clone().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let largest = svd.singular_values.iter().fold(0.0f64, |a, s| a.max(*s));
    let cut = tol * largest;
    let mut out = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s <= cut {
            out.push(v_t.row(i).adjoint().into_owned());
        }
    }
    out
}

/// Distance from `target` to the column span of `cols`, via an SVD-based
/// least-squares solve (independent of [`OrthoBasis`]).
pub fn lstsq_residual_svd(cols: &[CVector], target: &CVector, rank_tol: f64) -> f64 {
    if cols.is_empty() {
        return target.norm();
    }
    let rows = target.len();
    let a = CMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i]);
    let svd = a.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let largest = svd.singular_values.iter().fold(0.0f64, |a, s| a.max(*s));
    let mut proj = CVector::zeros(rows);
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s > rank_tol * largest && *s > 0.0 {
            let ui = u.column(i);
            let coef = ui.dotc(target);
            proj.axpy(coef, &ui.into_owned(), ONE);
        }
    }
    (target - proj).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_matches_repeated_product() {
        let a = CMatrix::from_fn(4, 4, |i, j| {
            c((i + 2 * j) as f64 * 0.1, (i as f64) - (j as f64))
        });
        let direct = &a * &a * &a;
        assert!((mat_power(&a, 3) - direct).norm() < 1e-12);
        assert_eq!(mat_power(&a, 0), CMatrix::identity(4, 4));
    }

    #[test]
    fn identity_has_unit_norm() {
        assert!((op_norm(&CMatrix::identity(7, 7)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ortho_basis_rejects_dependent_vectors() {
        let mut b = OrthoBasis::new(3, 1e-10);
        let x = CVector::from_vec(vec![ONE, ZERO, ONE]);
        assert!(b.push(&x));
        assert!(!b.push(&(x.clone() * c(0.0, 2.0))));
        assert!(b.push(&basis_vector(3, 1)));
        assert_eq!(b.len(), 2);
        assert!(b.residual(&basis_vector(3, 0)) > 0.5);
    }

    #[test]
    fn nullspace_of_rank_one() {
        let m = CMatrix::from_row_slice(1, 3, &[ONE, ONE, ZERO]);
        let ns = nullspace(&m, 1e-10);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!((&m * v).norm() < 1e-12);
        }
    }

    #[test]
    fn svd_residual_agrees_with_gram_schmidt() {
        let cols = vec![
            CVector::from_vec(vec![ONE, ONE, ZERO]),
            CVector::from_vec(vec![ZERO, c(0.0, 1.0), ONE]),
        ];
        let t = CVector::from_vec(vec![c(0.3, 0.1), ZERO, c(-1.0, 2.0)]);
        let mut ob = OrthoBasis::new(3, 1e-12);
        for v in &cols {
            ob.push(v);
        }
        assert!((ob.residual(&t) - lstsq_residual_svd(&cols, &t, 1e-12)).abs() < 1e-12);
    }
}
