//! Finitely supported Laurent polynomials on the circle.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::cis;

/// Grid size used for the sup-norm lower bound.
pub const SUP_GRID: usize = 4096;

/// `sum_d c_d z^d` with finitely many nonzero `c_d`. Exact zeros are never stored.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrigPoly {
    coeffs: BTreeMap<i64, Complex64>,
}

impl TrigPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, Complex64::new(1.0, 0.0))
    }

    /// `c * zeta_d`.
    pub fn monomial(degree: i64, c: Complex64) -> Self {
        let mut p = Self::zero();
        p.add_term(degree, c);
        p
    }

    /// `zeta_d`.
    pub fn zeta(degree: i64) -> Self {
        Self::monomial(degree, Complex64::new(1.0, 0.0))
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, Complex64)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (d, c) in terms {
            p.add_term(d, c);
        }
        p
    }

    pub fn add_term(&mut self, degree: i64, c: Complex64) {
        let slot = self
            .coeffs
            .entry(degree)
            .or_insert(Complex64::new(0.0, 0.0));
        *slot += c;
        if *slot == Complex64::new(0.0, 0.0) {
            self.coeffs.remove(&degree);
        }
    }

    pub fn coeff(&self, degree: i64) -> Complex64 {
        self.coeffs.get(&degree).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(d, c)| (*d, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `(min degree, max degree)`, or `None` for the zero polynomial.
    pub fn support(&self) -> Option<(i64, i64)> {
        let lo = *self.coeffs.keys().next()?;
        let hi = *self.coeffs.keys().next_back()?;
        Some((lo, hi))
    }

    pub fn max_abs_degree(&self) -> i64 {
        self.coeffs.keys().map(|d| d.abs()).max().unwrap_or(0)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_terms(self.terms().map(|(d, a)| (d, a * c)))
    }

    pub fn pow(&self, p: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..p {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.terms().map(|(d, c)| c * z.powi(d as i32)).sum()
    }

    /// `<f, h> = sum_d f_d conj(h_d)`, the L^2 inner product on the circle.
    pub fn inner(&self, other: &TrigPoly) -> Complex64 {
        self.terms().map(|(d, c)| c * other.coeff(d).conj()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.terms().map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum of `|f|` over `points` equally spaced points; a lower bound for
    /// the sup norm.
    pub fn sup_norm_grid(&self, points: usize) -> f64 {
        (0..points)
            .map(|j| self.eval(cis(TAU * j as f64 / points as f64)).norm())
            .fold(0.0, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm_grid(SUP_GRID)
    }

    /// Largest coefficient difference to `other`.
    pub fn max_coeff_diff(&self, other: &TrigPoly) -> f64 {
        let mut m: f64 = 0.0;
        for (d, c) in self.terms() {
            m = m.max((c - other.coeff(d)).norm());
        }
        for (d, c) in other.terms() {
            m = m.max((c - self.coeff(d)).norm());
        }
        m
    }

    /// Drops coefficients with modulus at most `tol`.
    pub fn chop(&self, tol: f64) -> Self {
        Self::from_terms(self.terms().filter(|(_, c)| c.norm() > tol))
    }
}

impl Add for &TrigPoly {
    type Output = TrigPoly;
    fn add(self, rhs: &TrigPoly) -> TrigPoly {
        let mut out = self.clone();
        for (d, c) in rhs.terms() {
            out.add_term(d, c);
        }
        out
    }
}

impl Sub for &TrigPoly {
    type Output = TrigPoly;
    fn sub(self, rhs: &TrigPoly) -> TrigPoly {
        let mut out = self.clone();
        for (d, c) in rhs.terms() {
            out.add_term(d, -c);
        }
        out
    }
}

impl Neg for &TrigPoly {
    type Output = TrigPoly;
    fn neg(self) -> TrigPoly {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &TrigPoly {
    type Output = TrigPoly;
    fn mul(self, rhs: &TrigPoly) -> TrigPoly {
        let mut out = TrigPoly::zero();
        for (d1, c1) in self.terms() {
            for (d2, c2) in rhs.terms() {
                out.add_term(d1 + d2, c1 * c2);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[test]
    fn zero_terms_are_dropped() {
        let p = TrigPoly::from_terms([(1, c(1.0, 0.0)), (1, c(-1.0, 0.0)), (2, c(0.5, 0.0))]);
        assert_eq!(p.support(), Some((2, 2)));
        assert!(TrigPoly::zero().support().is_none());
    }

    #[test]
    fn sup_norm_of_simple_polys() {
        let p = &TrigPoly::one() + &TrigPoly::zeta(1);
        assert!((p.sup_norm() - 2.0).abs() < 1e-12);
        assert!((TrigPoly::monomial(-3, c(0.0, 2.0)).sup_norm() - 2.0).abs() < 1e-12);
    }

    fn arb_poly() -> impl Strategy<Value = TrigPoly> {
        proptest::collection::vec((-5i64..5, -3i32..4, -3i32..4), 1..5).prop_map(|v| {
            TrigPoly::from_terms(v.into_iter().map(|(d, a, b)| (d, c(a as f64, b as f64))))
        })
    }

    proptest! {
        #[test]
        fn product_support_is_sumset(p in arb_poly(), q in arb_poly()) {
            // integer coefficients keep the product exact, but cancellation can
            // still remove terms, so the support is contained in the sumset
            let prod = &p * &q;
            let sums: BTreeSet<i64> = p.terms().flat_map(|(a, _)| q.terms().map(move |(b, _)| a + b)).collect();
            for (d, _) in prod.terms() {
                prop_assert!(sums.contains(&d));
            }
            if let (Some((plo, phi)), Some((qlo, qhi))) = (p.support(), q.support()) {
                prop_assert_eq!(prod.support(), Some((plo + qlo, phi + qhi)));
            }
        }

        #[test]
        fn evaluation_is_multiplicative(p in arb_poly(), q in arb_poly(), t in 0.0f64..std::f64::consts::TAU) {
            let z = cis(t);
            let lhs = (&p * &q).eval(z);
            let rhs = p.eval(z) * q.eval(z);
            prop_assert!((lhs - rhs).norm() < 1e-9 * (1.0 + rhs.norm()));
        }
    }
}
