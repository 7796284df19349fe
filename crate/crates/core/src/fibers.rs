//! Operators on a single fiber `H^2 ⊗ H^2` over a point `ξ` of the circle.
//!
//! After the Fourier transform in all three variables, `w^n u^k v^m` becomes
//! `ξ^n z_1^k z_2^m`; the left generators act fiberwise as `ξ I`, `S ⊗ I` and
//! `V_ξ = A_ξ ⊗ S`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hgroup::{left_action, Letter, NormalForm};
use crate::hulls::{generated_algebra, span_close, OperatorSubspace};
use crate::linalg::{basis_vector, cis, mat_power, max_abs, CMatrix, CVector};
use crate::ops::{left_slice, shift, tensor};
use crate::rng::complex_gaussian;

/// Default truncation degree per factor.
pub const DEFAULT_DEGREE: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiberPoint {
    pub xi: Complex64,
}

impl FiberPoint {
    pub fn new(xi: Complex64) -> Result<Self> {
        if (xi.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "|ξ| = {} is not 1",
                xi.norm()
            )));
        }
        Ok(Self { xi })
    }

    pub fn from_angle(theta: f64) -> Self {
        Self { xi: cis(theta) }
    }

    /// `ξ^p` for any integer `p`.
    pub fn pow(&self, p: i64) -> Complex64 {
        if p >= 0 {
            self.xi.powu(p as u32)
        } else {
            self.xi.conj().powu((-p) as u32)
        }
    }
}

/// The eighth roots of unity rotated by a random phase, then `extra` uniform points.
pub fn sample_points<R: Rng + ?Sized>(rng: &mut R, extra: usize) -> Vec<FiberPoint> {
    let phase = rng.random_range(0.0..TAU / 8.0);
    let mut out: Vec<FiberPoint> = (0..8)
        .map(|j| FiberPoint::from_angle(phase + TAU * j as f64 / 8.0))
        .collect();
    out.extend((0..extra).map(|_| FiberPoint::from_angle(rng.random_range(0.0..TAU))));
    out
}

/// `(A_ξ f)(z) = f(z / ξ)`: diagonal `ξ^{-n}` on `ζ_n`, `n < deg`.
pub fn a_xi(xi: FiberPoint, deg: usize) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_fn(deg, |n, _| xi.pow(-(n as i64))))
}

/// `V_ξ = A_ξ ⊗ S`.
pub fn v_xi(xi: FiberPoint, deg: usize) -> CMatrix {
    tensor(&a_xi(xi, deg), &shift(deg))
}

/// `||A_ξ S - ξ̄ S A_ξ||`, entrywise; the commutation relation with `λ = ξ̄`.
pub fn commutation_defect(xi: FiberPoint, deg: usize) -> f64 {
    let a = a_xi(xi, deg);
    let s = shift(deg);
    max_abs(&(&a * &s - &s * &a * xi.xi.conj()))
}

/// The fiber operator of a left generator.
pub fn fiber_generator(letter: Letter, xi: FiberPoint, deg: usize) -> CMatrix {
    let id = CMatrix::identity(deg, deg);
    match letter {
        Letter::U => tensor(&shift(deg), &id),
        Letter::V => v_xi(xi, deg),
        Letter::W => CMatrix::identity(deg * deg, deg * deg) * xi.xi,
        Letter::WInv => CMatrix::identity(deg * deg, deg * deg) * xi.xi.conj(),
    }
}

fn monomial(x: &NormalForm, xi: FiberPoint, deg: usize) -> Result<CVector> {
    let limit = deg as i64;
    if x.k < 0 || x.m < 0 || x.k >= limit || x.m >= limit {
        return Err(Error::IndexRange {
            index: x.k.max(x.m).max(0) as usize,
            limit: deg,
        });
    }
    Ok(basis_vector(deg, x.k as usize).kronecker(&basis_vector(deg, x.m as usize)) * xi.pow(x.n))
}

/// Norm of `fiber(letter) (ξ^n z_1^k z_2^m) - ξ^{n'} z_1^{k'} z_2^{m'}` where
/// `(n', k', m') = letter · (n, k, m)`.
pub fn fiber_action_check(
    letter: Letter,
    xi: FiberPoint,
    x: &NormalForm,
    deg: usize,
) -> Result<f64> {
    let image = left_action(&letter.element(), x)?;
    let got = fiber_generator(letter, xi, deg) * monomial(x, xi, deg)?;
    let expected = monomial(&image, xi, deg)?;
    Ok((got - expected).norm())
}

/// Largest [`fiber_action_check`] over `xs`, building the generator once.
pub fn fiber_action_defect(
    letter: Letter,
    xi: FiberPoint,
    xs: &[NormalForm],
    deg: usize,
) -> Result<f64> {
    let g = fiber_generator(letter, xi, deg);
    let mut worst: f64 = 0.0;
    for x in xs {
        let image = left_action(&letter.element(), x)?;
        let got = &g * monomial(x, xi, deg)?;
        worst = worst.max((got - monomial(&image, xi, deg)?).norm());
    }
    Ok(worst)
}

/// `T^_n = L_{ζ_0, ζ_n}(T)`, the coefficient of `S^n` in the second factor.
pub fn second_factor_coeff(t: &CMatrix, deg: usize, n: usize) -> Result<CMatrix> {
    if n >= deg {
        return Err(Error::IndexRange {
            index: n,
            limit: deg,
        });
    }
    left_slice(t, deg, deg, &basis_vector(deg, 0), &basis_vector(deg, n))
}

/// `span{A_ξ^n S^j : n + j <= cap, j < deg}`.
pub fn coefficient_space(
    xi: FiberPoint,
    n: usize,
    cap: usize,
    deg: usize,
    tol: f64,
) -> Result<OperatorSubspace> {
    let an = mat_power(&a_xi(xi, deg), n as u32);
    let s = shift(deg);
    let mats: Vec<CMatrix> = (0..deg)
        .take_while(|j| n + j <= cap)
        .map(|j| &an * mat_power(&s, j as u32))
        .collect();
    span_close(deg, &mats, tol)
}

/// The fiber algebra generated by `S ⊗ I` and `V_ξ`, words up to `cap`.
pub fn fiber_algebra(xi: FiberPoint, cap: usize, deg: usize, tol: f64) -> Result<OperatorSubspace> {
    let gens = [fiber_generator(Letter::U, xi, deg), v_xi(xi, deg)];
    generated_algebra(deg * deg, &gens, cap, true, tol)
}

#[derive(Debug, Clone, Serialize)]
pub struct CoefficientReport {
    pub xi: Complex64,
    pub algebra_dim: usize,
    pub samples: usize,
    /// Worst relative distance of `T^_n` from `span{A_ξ^n S^j}`.
    pub coefficient_residual: f64,
    /// Worst relative distance of rebuilt elements from the fiber algebra.
    pub rebuild_residual: f64,
    pub pass: bool,
}

/// Coefficients of sampled fiber algebra elements lie in the graded pieces,
/// and sums `sum_n X_n ⊗ S^n` with `X_n` in those pieces lie in the algebra.
pub fn fiber_coefficient_structure<R: Rng + ?Sized>(
    xi: FiberPoint,
    cap: usize,
    deg: usize,
    samples: usize,
    tol: f64,
    rng: &mut R,
) -> Result<CoefficientReport> {
    let alg = fiber_algebra(xi, cap, deg, tol)?;
    let pieces: Vec<OperatorSubspace> = (0..deg.min(cap + 1))
        .map(|n| coefficient_space(xi, n, cap, deg, tol))
        .collect::<Result<_>>()?;
    let mut coefficient_residual: f64 = 0.0;
    for _ in 0..samples {
        let mut t = CMatrix::zeros(deg * deg, deg * deg);
        for b in &alg.basis {
            t += b * complex_gaussian(rng);
        }
        for n in 0..deg {
            let c = second_factor_coeff(&t, deg, n)?;
            let scale = t.norm().max(f64::MIN_POSITIVE);
            let r = match pieces.get(n) {
                Some(p) => p.residual(&c),
                None => c.norm(),
            };
            coefficient_residual = coefficient_residual.max(r / scale);
        }
    }
    let s = shift(deg);
    let mut rebuild_residual: f64 = 0.0;
    for _ in 0..samples {
        let mut t = CMatrix::zeros(deg * deg, deg * deg);
        for (n, p) in pieces.iter().enumerate() {
            let mut x = CMatrix::zeros(deg, deg);
            for b in &p.basis {
                x += b * complex_gaussian(rng);
            }
            t += tensor(&x, &mat_power(&s, n as u32));
        }
        rebuild_residual = rebuild_residual.max(alg.residual(&t) / t.norm().max(f64::MIN_POSITIVE));
    }
    Ok(CoefficientReport {
        xi: xi.xi,
        algebra_dim: alg.dim(),
        samples,
        coefficient_residual,
        rebuild_residual,
        pass: coefficient_residual <= tol && rebuild_residual <= tol,
    })
}

/// Smallest `n <= n_max` with `A_{ξ_1}^n` outside `span{A_{ξ_2}^n S^j}`, with
/// its relative residual.
pub fn fiber_separation(
    p: FiberPoint,
    q: FiberPoint,
    n_max: usize,
    deg: usize,
    tol: f64,
) -> Result<Option<(usize, f64)>> {
    for n in 1..=n_max {
        let space = coefficient_space(q, n, deg + n, deg, tol)?;
        let an = mat_power(&a_xi(p, deg), n as u32);
        let r = space.residual(&an) / an.norm();
        if r > tol {
            return Ok(Some((n, r)));
        }
    }
    Ok(None)
}
