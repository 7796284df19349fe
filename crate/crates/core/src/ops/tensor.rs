//! Kronecker products and slice maps.
//!
//! Product basis index convention: `(i1, i2) -> i1 * dim2 + i2`.

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, ONE};

pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Truncated unilateral shift `e_j -> e_{j+1}` on `C^dim`.
pub fn shift(dim: usize) -> CMatrix {
    let mut s = CMatrix::zeros(dim, dim);
    for j in 1..dim {
        s[(j, j - 1)] = ONE;
    }
    s
}

fn check_dims(t: &CMatrix, dim1: usize, dim2: usize) -> Result<()> {
    let d = dim1 * dim2;
    if t.nrows() != d || t.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator does not factor as {dim1}*{dim2}",
            t.nrows(),
            t.ncols()
        )));
    }
    Ok(())
}

/// `R_{xi,eta}(T)` on the second factor: entry `(j, i)` is `<T(xi ⊗ e_i), eta ⊗ e_j>`.
pub fn right_slice(
    t: &CMatrix,
    dim1: usize,
    dim2: usize,
    xi: &CVector,
    eta: &CVector,
) -> Result<CMatrix> {
    check_dims(t, dim1, dim2)?;
    if xi.len() != dim1 || eta.len() != dim1 {
        return Err(Error::DimensionMismatch(
            "slice vectors must live in the first factor".into(),
        ));
    }
    let mut out = CMatrix::zeros(dim2, dim2);
    for a in 0..dim1 {
        let ea = eta[a].conj();
        if ea.norm_sqr() == 0.0 {
            continue;
        }
        for b in 0..dim1 {
            let w = ea * xi[b];
            if w.norm_sqr() == 0.0 {
                continue;
            }
            let block = t.view((a * dim2, b * dim2), (dim2, dim2));
            out += block * w;
        }
    }
    Ok(out)
}

/// `L_{x,y}(T)` on the first factor: entry `(j, i)` is `<T(e_i ⊗ x), e_j ⊗ y>`.
pub fn left_slice(
    t: &CMatrix,
    dim1: usize,
    dim2: usize,
    x: &CVector,
    y: &CVector,
) -> Result<CMatrix> {
    check_dims(t, dim1, dim2)?;
    if x.len() != dim2 || y.len() != dim2 {
        return Err(Error::DimensionMismatch(
            "slice vectors must live in the second factor".into(),
        ));
    }
    let mut out = CMatrix::zeros(dim1, dim1);
    for j in 0..dim1 {
        for i in 0..dim1 {
            let block = t.view((j * dim2, i * dim2), (dim2, dim2));
            out[(j, i)] = y.dotc(&(block * x));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_vector, inner, max_abs, op_norm};
    use crate::rng::{gaussian_matrix, gaussian_vector, stream};
    use num_complex::Complex64;

    fn kron_vec(a: &CVector, b: &CVector) -> CVector {
        a.kronecker(b)
    }

    #[test]
    fn tensor_acts_factorwise() {
        let mut rng = stream(1, "tensor");
        let a = gaussian_matrix(&mut rng, 3, 3);
        let b = gaussian_matrix(&mut rng, 2, 2);
        let xi = gaussian_vector(&mut rng, 3);
        let x = gaussian_vector(&mut rng, 2);
        let lhs = tensor(&a, &CMatrix::identity(2, 2)) * kron_vec(&xi, &x);
        assert!((lhs - kron_vec(&(&a * &xi), &x)).norm() < 1e-12);
        let e0 = basis_vector(3, 0);
        let lhs = tensor(&CMatrix::identity(3, 3), &b) * kron_vec(&e0, &x);
        assert!((lhs - kron_vec(&e0, &(&b * &x))).norm() < 1e-12);
    }

    #[test]
    fn tensor_norm_is_multiplicative() {
        let mut rng = stream(2, "tensor-norm");
        for _ in 0..5 {
            let a = gaussian_matrix(&mut rng, 4, 4);
            let b = gaussian_matrix(&mut rng, 3, 3);
            let lhs = op_norm(&tensor(&a, &b));
            let rhs = op_norm(&a) * op_norm(&b);
            assert!((lhs - rhs).abs() <= 1e-10 * rhs);
        }
    }

    #[test]
    fn right_slice_of_elementary_tensor() {
        let mut rng = stream(3, "slice");
        let a = gaussian_matrix(&mut rng, 3, 3);
        let b = gaussian_matrix(&mut rng, 4, 4);
        let xi = gaussian_vector(&mut rng, 3);
        let eta = gaussian_vector(&mut rng, 3);
        let s = right_slice(&tensor(&a, &b), 3, 4, &xi, &eta).unwrap();
        let w = inner(&(&a * &xi), &eta);
        assert!(max_abs(&(s - &b * w)) < 1e-12);
        let x = gaussian_vector(&mut rng, 4);
        let y = gaussian_vector(&mut rng, 4);
        let l = left_slice(&tensor(&a, &b), 3, 4, &x, &y).unwrap();
        assert!(max_abs(&(l - &a * inner(&(&b * &x), &y))) < 1e-12);
    }

    #[test]
    fn slice_of_shift_at_vacuum_vanishes() {
        let b = CMatrix::from_fn(2, 2, |i, j| Complex64::new(i as f64, j as f64 + 1.0));
        let z0 = basis_vector(5, 0);
        let s = right_slice(&tensor(&shift(5), &b), 5, 2, &z0, &z0).unwrap();
        assert_eq!(max_abs(&s), 0.0);
    }

    #[test]
    fn slices_agree_with_direct_contraction() {
        let mut rng = stream(4, "slice-oracle");
        let (d1, d2) = (3, 2);
        let mut t = CMatrix::zeros(d1 * d2, d1 * d2);
        for _ in 0..3 {
            t += tensor(
                &gaussian_matrix(&mut rng, d1, d1),
                &gaussian_matrix(&mut rng, d2, d2),
            );
        }
        let xi = gaussian_vector(&mut rng, d1);
        let eta = gaussian_vector(&mut rng, d1);
        let s = right_slice(&t, d1, d2, &xi, &eta).unwrap();
        for j in 0..d2 {
            for i in 0..d2 {
                let mut direct = Complex64::new(0.0, 0.0);
                for a in 0..d1 {
                    for b in 0..d1 {
                        direct += eta[a].conj() * t[(a * d2 + j, b * d2 + i)] * xi[b];
                    }
                }
                let via_vectors = inner(
                    &(&t * kron_vec(&xi, &basis_vector(d2, i))),
                    &kron_vec(&eta, &basis_vector(d2, j)),
                );
                assert!((s[(j, i)] - direct).norm() < 1e-12);
                assert!((s[(j, i)] - via_vectors).norm() < 1e-12);
            }
        }
        let x = gaussian_vector(&mut rng, d2);
        let y = gaussian_vector(&mut rng, d2);
        let l = left_slice(&t, d1, d2, &x, &y).unwrap();
        for j in 0..d1 {
            for i in 0..d1 {
                let via_vectors = inner(
                    &(&t * kron_vec(&basis_vector(d1, i), &x)),
                    &kron_vec(&basis_vector(d1, j), &y),
                );
                assert!((l[(j, i)] - via_vectors).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn dimension_errors() {
        let t = CMatrix::identity(6, 6);
        assert!(right_slice(&t, 4, 2, &CVector::zeros(4), &CVector::zeros(4)).is_err());
        assert!(left_slice(&t, 3, 2, &CVector::zeros(3), &CVector::zeros(3)).is_err());
    }
}
