//! Leading terms of operators in the left group algebra and the norm-growth
//! lower bound they give.

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::Serialize;

use crate::averaging::{poisson_smooth, CoeffTable};
use crate::error::{Error, Result};
use crate::hgroup::NormalForm;
use crate::linalg::{op_norm, CMatrix, CVector};
use crate::ops::{TrigPoly, Window};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeadingTerm {
    pub k0: i64,
    pub m0: i64,
    pub rho: i64,
    pub symbol: TrigPoly,
}

/// Minimizer of `(k + m, k)` over the support.
pub fn leading_term(table: &CoeffTable) -> Result<LeadingTerm> {
    let ((k0, m0), f) = table
        .iter()
        .min_by_key(|((k, m), _)| (k + m, *k))
        .ok_or(Error::EmptyTable)?;
    Ok(LeadingTerm {
        k0,
        m0,
        rho: k0 + m0,
        symbol: f.clone(),
    })
}

/// `φ` with `(L_u^{k0} L_v^{m0})^n = L_φ L_u^{n k0} L_v^{n m0}`.
pub fn word_correction(k0: i64, m0: i64, n: u64) -> Result<TrigPoly> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let p = NormalForm::new(0, k0, m0).power(n)?;
    // (0, n k0, n m0) has w-exponent 0
    Ok(TrigPoly::zeta(p.n))
}

/// One step of every path: `x ↦ (n - m K + d, K + k, M + m)`.
fn step(table: &CoeffTable, states: &BTreeSet<NormalForm>) -> BTreeSet<NormalForm> {
    let mut out = BTreeSet::new();
    for x in states {
        for ((k, m), f) in table.iter() {
            for (d, _) in f.terms() {
                out.insert(NormalForm::new(x.n - m * x.k + d, x.k + k, x.m + m));
            }
        }
    }
    out
}

/// Whether every path of length `<= n` from `ζ_j ⊗ e_00` that can still reach
/// block `(tk, tm)` stays in the window; then the truncated `A^n` gives the
/// exact matrix elements into that block.
fn start_is_admissible(
    table: &CoeffTable,
    n: u32,
    j: i64,
    target: (i64, i64),
    win: &Window,
) -> bool {
    let mut states = BTreeSet::from([NormalForm::new(j, 0, 0)]);
    if !win.contains(&NormalForm::new(j, 0, 0)) {
        return false;
    }
    for _ in 0..n {
        states = step(table, &states);
        states.retain(|x| x.k <= target.0 && x.m <= target.1);
        if states.iter().any(|x| !win.contains(x)) {
            return false;
        }
    }
    true
}

/// Starting degrees `j` for which [`start_is_admissible`] holds.
pub fn admissible_starts(table: &CoeffTable, n: u32, win: &Window) -> Result<Vec<i64>> {
    let lt = leading_term(table)?;
    let target = (n as i64 * lt.k0, n as i64 * lt.m0);
    if !win.contains_block(target.0, target.1) {
        return Ok(Vec::new());
    }
    Ok((win.w_min..=win.w_max)
        .filter(|&j| start_is_admissible(table, n, j, target, win))
        .collect())
}

fn poly_vector(g: &TrigPoly, win: &Window) -> Result<CVector> {
    let mut v = CVector::zeros(win.len());
    for (d, c) in g.terms() {
        let i = win.index_of(&NormalForm::new(d, 0, 0)).ok_or_else(|| {
            Error::WindowTooSmall(format!("degree {d} of g is outside the window"))
        })?;
        v[i] = c;
    }
    Ok(v)
}

fn read_block(v: &CVector, h: &TrigPoly, block: (i64, i64), win: &Window) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (d, c) in h.terms() {
        let i = win
            .index_of(&NormalForm::new(d, block.0, block.1))
            .ok_or_else(|| {
                Error::WindowTooSmall(format!("degree {d} of h is outside the window"))
            })?;
        acc += v[i] * c.conj();
    }
    Ok(acc)
}

fn apply_power(a: &CMatrix, n: u32, mut v: CVector) -> CVector {
    for _ in 0..n {
        v = a * v;
    }
    v
}

#[derive(Debug, Clone, Serialize)]
pub struct MatrixElementReport {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub deviation: f64,
}

fn check_window(table: &CoeffTable, n: u32, g: &TrigPoly, win: &Window) -> Result<LeadingTerm> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let lt = leading_term(table)?;
    let target = (n as i64 * lt.k0, n as i64 * lt.m0);
    if !win.contains_block(target.0, target.1) {
        return Err(Error::WindowTooSmall(format!(
            "need u_max >= {} and v_max >= {}",
            target.0, target.1
        )));
    }
    for (j, _) in g.terms() {
        if !start_is_admissible(table, n, j, target, win) {
            return Err(Error::WindowTooSmall(format!(
                "paths of length {n} from degree {j} leave the w-range [{}, {}]",
                win.w_min, win.w_max
            )));
        }
    }
    Ok(lt)
}

fn element_check(
    a: &CMatrix,
    lt: &LeadingTerm,
    n: u32,
    g: &TrigPoly,
    h: &TrigPoly,
    win: &Window,
    weight: f64,
) -> Result<MatrixElementReport> {
    let target = (n as i64 * lt.k0, n as i64 * lt.m0);
    let image = apply_power(a, n, poly_vector(g, win)?);
    let lhs = read_block(&image, h, target, win)?;
    let rhs_poly = &(&lt.symbol.pow(n) * &word_correction(lt.k0, lt.m0, n as u64)?) * g;
    let rhs = rhs_poly.inner(h) * weight;
    Ok(MatrixElementReport {
        lhs,
        rhs,
        deviation: (lhs - rhs).norm(),
    })
}

/// `⟨A^n (g ⊗ e_00), h ⊗ e_{n k0, n m0}⟩` against `⟨f^n φ g, h⟩`.
pub fn matrix_element_check(
    table: &CoeffTable,
    n: u32,
    g: &TrigPoly,
    h: &TrigPoly,
    win: &Window,
) -> Result<MatrixElementReport> {
    let lt = check_window(table, n, g, win)?;
    element_check(&table.reconstruct(win).matrix, &lt, n, g, h, win, 1.0)
}

/// The same identity for `A_r`, whose right side carries `r^{n ρ}`.
pub fn smoothed_matrix_element_check(
    table: &CoeffTable,
    n: u32,
    g: &TrigPoly,
    h: &TrigPoly,
    win: &Window,
    r: f64,
) -> Result<MatrixElementReport> {
    let lt = check_window(table, n, g, win)?;
    let ar = poisson_smooth(&table.reconstruct(win), r)?;
    let weight = r.powi((n as i64 * lt.rho) as i32);
    element_check(&ar.matrix, &lt, n, g, h, win, weight)
}

/// Largest `|⟨A^n (g ⊗ e_00), e_{d,k,m}⟩|` over blocks below the leading one:
/// `k + m < n ρ`, or `k + m = n ρ` and `k < n k0`. Exactly zero.
pub fn lower_order_mass(table: &CoeffTable, n: u32, g: &TrigPoly, win: &Window) -> Result<f64> {
    let lt = leading_term(table)?;
    let image = apply_power(&table.reconstruct(win).matrix, n, poly_vector(g, win)?);
    let (nr, nk) = (n as i64 * lt.rho, n as i64 * lt.k0);
    Ok(win
        .enumerate()
        .zip(image.iter())
        .filter(|(x, _)| x.k + x.m < nr || (x.k + x.m == nr && x.k < nk))
        .fold(0.0, |acc, (_, z)| acc.max(z.norm())))
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthStep {
    pub n: u32,
    /// `||A^n||^{1/n}` on the truncation.
    pub norm_root: f64,
    /// `||P M_{f^n φ} P||^{1/n}` over admissible starts: a lower bound for
    /// `norm_root` coming from exact matrix elements.
    pub witness_root: f64,
    pub admissible_starts: usize,
    pub certificate_holds: bool,
    pub bound_holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    pub k0: i64,
    pub m0: i64,
    pub rho: i64,
    /// Grid value of `||f_{k0,m0}||_∞`.
    pub bound: f64,
    pub steps: Vec<GrowthStep>,
    /// `min_n (norm_root - bound)` over admissible `n`.
    pub margin: f64,
}

impl SpectralReport {
    pub fn certificate_holds(&self) -> bool {
        self.steps.iter().all(|s| s.certificate_holds)
    }

    pub fn bound_holds(&self) -> bool {
        self.steps.iter().all(|s| s.bound_holds)
    }
}

/// Norm growth of the truncated `A^n` for `n <= n_max` with admissible starts.
pub fn spectral_lower_bound(
    table: &CoeffTable,
    n_max: u32,
    win: &Window,
    tol: f64,
) -> Result<SpectralReport> {
    let lt = leading_term(table)?;
    let bound = lt.symbol.sup_norm();
    let a = table.reconstruct(win).matrix;
    let mut steps = Vec::new();
    let mut power = CMatrix::identity(a.nrows(), a.ncols());
    for n in 1..=n_max {
        power = &a * &power;
        let starts = admissible_starts(table, n, win)?;
        if starts.is_empty() {
            continue;
        }
        let symbol = &lt.symbol.pow(n) * &word_correction(lt.k0, lt.m0, n as u64)?;
        let rows: Vec<i64> = (win.w_min..=win.w_max).collect();
        let section = CMatrix::from_fn(rows.len(), starts.len(), |i, j| {
            symbol.coeff(rows[i] - starts[j])
        });
        let inv = 1.0 / n as f64;
        let norm_root = op_norm(&power).powf(inv);
        let witness_root = op_norm(&section).powf(inv);
        steps.push(GrowthStep {
            n,
            norm_root,
            witness_root,
            admissible_starts: starts.len(),
            certificate_holds: norm_root >= witness_root - tol,
            bound_holds: norm_root >= bound - tol,
        });
    }
    if steps.is_empty() {
        return Err(Error::WindowTooSmall(format!(
            "no n <= {n_max} admits an exact matrix element for leading term ({}, {})",
            lt.k0, lt.m0
        )));
    }
    let margin = steps
        .iter()
        .map(|s| s.norm_root - bound)
        .fold(f64::INFINITY, f64::min);
    Ok(SpectralReport {
        k0: lt.k0,
        m0: lt.m0,
        rho: lt.rho,
        bound,
        steps,
        margin,
    })
}
