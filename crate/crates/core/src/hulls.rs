//! Subspaces of matrices and hull membership tests.
//!
//! Subspaces are stored through a trace-orthonormal basis. The Ref and Ref_e
//! tests are sampling based and one-sided: a failure comes with a witness
//! that can be re-checked, a pass is evidence only.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    basis_vector, inner, lstsq_residual_svd, max_abs, nullspace, op_norm, unvectorize, vectorize,
    CMatrix, CVector, OrthoBasis,
};
use crate::ops::{left_slice, right_slice, tensor};
use crate::rng::unit_vector;

/// Relative rank tolerance for building subspaces.
pub const RANK_TOL: f64 = 1e-9;
/// Relative tolerance for membership verdicts.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct OperatorSubspace {
    pub ambient_dim: usize,
    pub basis: Vec<CMatrix>,
    pub tol: f64,
}

impl OperatorSubspace {
    pub fn zero(ambient_dim: usize, tol: f64) -> Self {
        Self {
            ambient_dim,
            basis: Vec::new(),
            tol,
        }
    }

    pub fn full(ambient_dim: usize, tol: f64) -> Self {
        let mut basis = Vec::with_capacity(ambient_dim * ambient_dim);
        for c in 0..ambient_dim {
            for r in 0..ambient_dim {
                basis.push(crate::linalg::matrix_unit(ambient_dim, r, c));
            }
        }
        Self {
            ambient_dim,
            basis,
            tol,
        }
    }

    fn from_vectors(ambient_dim: usize, vectors: Vec<CVector>, tol: f64) -> Self {
        Self {
            ambient_dim,
            basis: vectors
                .iter()
                .map(|v| unvectorize(v, ambient_dim, ambient_dim))
                .collect(),
            tol,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Frobenius distance from `a` to the subspace.
    pub fn residual(&self, a: &CMatrix) -> f64 {
        let mut w = a.clone();
        for _ in 0..2 {
            for b in &self.basis {
                let coef = crate::linalg::frobenius_inner(&w, b);
                w -= b * coef;
            }
        }
        w.norm()
    }

    pub fn project(&self, a: &CMatrix) -> CMatrix {
        a - {
            let mut w = a.clone();
            for _ in 0..2 {
                for b in &self.basis {
                    let coef = crate::linalg::frobenius_inner(&w, b);
                    w -= b * coef;
                }
            }
            w
        }
    }

    /// `residual(a) <= tol * ||a||_F`; the zero subspace only contains 0.
    pub fn contains(&self, a: &CMatrix) -> bool {
        self.residual(a) <= self.tol * a.norm()
    }

    pub fn is_contained_in(&self, other: &OperatorSubspace) -> bool {
        self.basis.iter().all(|b| other.contains(b))
    }

    /// Largest deviation of the basis Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let g = crate::linalg::frobenius_inner(a, b);
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - Complex64::from(target)).norm());
            }
        }
        worst
    }
}

/// Span of `mats` in `M_dim`; singular values below `tol * largest` are dropped.
pub fn span_close(dim: usize, mats: &[CMatrix], tol: f64) -> Result<OperatorSubspace> {
    for m in mats {
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {dim}x{dim}, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
    }
    if mats.is_empty() {
        return Ok(OperatorSubspace::zero(dim, tol));
    }
    let stacked = CMatrix::from_fn(dim * dim, mats.len(), |i, j| mats[j][(i % dim, i / dim)]);
    let svd = stacked.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let largest = svd.singular_values.iter().fold(0.0f64, |a, s| a.max(*s));
    let vectors = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > tol * largest && **s > 0.0)
        .map(|(i, _)| u.column(i).into_owned())
        .collect();
    Ok(OperatorSubspace::from_vectors(dim, vectors, tol))
}

/// Span of the words of length `<= degree_cap` in `gens` (and `I` if asked).
///
/// Built degree by degree: if `N_d` spans the part added at degree `d`, the
/// words of degree `d + 1` add nothing beyond `g N_d`. An empty new layer
/// means the span is final.
pub fn generated_algebra(
    dim: usize,
    gens: &[CMatrix],
    degree_cap: usize,
    with_identity: bool,
    tol: f64,
) -> Result<OperatorSubspace> {
    if degree_cap == 0 {
        return Err(Error::InvalidParameter(
            "degree_cap must be at least 1".into(),
        ));
    }
    let mut basis = OrthoBasis::new(dim * dim, tol);
    let mut layer: Vec<CMatrix> = Vec::new();
    let push = |basis: &mut OrthoBasis, m: &CMatrix, layer: &mut Vec<CMatrix>| {
        if basis.push(&vectorize(m)) {
            layer.push(unvectorize(basis.vectors().last().unwrap(), dim, dim));
        }
    };
    if with_identity {
        push(&mut basis, &CMatrix::identity(dim, dim), &mut layer);
        let mut next = Vec::new();
        for g in gens {
            push(&mut basis, g, &mut next);
        }
        layer = next;
    } else {
        for g in gens {
            push(&mut basis, g, &mut layer);
        }
    }
    let sparse: Vec<Vec<(usize, usize, Complex64)>> = gens.iter().map(nonzeros).collect();
    for _ in 1..degree_cap {
        if layer.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for (g, nz) in gens.iter().zip(&sparse) {
            for b in &layer {
                let product = if nz.len() * 4 < dim * dim {
                    sparse_mul(nz, b)
                } else {
                    g * b
                };
                push(&mut basis, &product, &mut next);
            }
        }
        layer = next;
    }
    Ok(OperatorSubspace::from_vectors(
        dim,
        basis.into_vectors(),
        tol,
    ))
}

fn nonzeros(m: &CMatrix) -> Vec<(usize, usize, Complex64)> {
    let mut out = Vec::new();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if m[(i, j)] != Complex64::new(0.0, 0.0) {
                out.push((i, j, m[(i, j)]));
            }
        }
    }
    out
}

/// `G B` from the nonzero entries of `G`.
fn sparse_mul(g: &[(usize, usize, Complex64)], b: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(b.nrows(), b.ncols());
    for c in 0..b.ncols() {
        for &(i, k, z) in g {
            out[(i, c)] += z * b[(k, c)];
        }
    }
    out
}

fn stacked_nullspace(dim: usize, blocks: &[CMatrix], tol: f64) -> OperatorSubspace {
    if blocks.is_empty() {
        return OperatorSubspace::full(dim, tol);
    }
    let n2 = dim * dim;
    let mut m = CMatrix::zeros(n2 * blocks.len(), n2);
    for (i, b) in blocks.iter().enumerate() {
        m.view_mut((i * n2, 0), (n2, n2)).copy_from(b);
    }
    OperatorSubspace::from_vectors(dim, nullspace(&m, tol), tol)
}

/// All `X` with `XG = GX` for every generator.
pub fn commutant(dim: usize, gens: &[CMatrix], tol: f64) -> Result<OperatorSubspace> {
    let id = CMatrix::identity(dim, dim);
    let mut blocks = Vec::with_capacity(gens.len());
    for g in gens {
        let n = g.norm();
        if n == 0.0 {
            continue;
        }
        let g = g / Complex64::from(n);
        // vec(XG - GX) = (G^T ⊗ I - I ⊗ G) vec X
        blocks.push(tensor(&g.transpose(), &id) - tensor(&id, &g));
    }
    Ok(stacked_nullspace(dim, &blocks, tol))
}

/// Deviation of `p` from being an orthogonal projection.
pub fn projection_defect(p: &CMatrix) -> f64 {
    max_abs(&(p * p - p)).max(max_abs(&(p - p.adjoint())))
}

fn check_projection(p: &CMatrix) -> Result<()> {
    let d = projection_defect(p);
    if d > 1e-10 {
        return Err(Error::NotProjection(d));
    }
    Ok(())
}

/// `{A : P^⊥ A P = 0 for every P}`.
pub fn alg_of_lattice(dim: usize, projections: &[CMatrix], tol: f64) -> Result<OperatorSubspace> {
    let id = CMatrix::identity(dim, dim);
    let mut blocks = Vec::with_capacity(projections.len());
    for p in projections {
        check_projection(p)?;
        // vec(P^⊥ A P) = (P^T ⊗ P^⊥) vec A
        blocks.push(tensor(&p.transpose(), &(&id - p)));
    }
    Ok(stacked_nullspace(dim, &blocks, tol))
}

/// `||P^⊥ A P|| <= tol * ||A||` for every `A`.
pub fn lat_check(mats: &[CMatrix], p: &CMatrix, tol: f64) -> Result<bool> {
    check_projection(p)?;
    let perp = CMatrix::identity(p.nrows(), p.ncols()) - p;
    Ok(mats
        .iter()
        .all(|a| op_norm(&(&perp * a * p)) <= tol * op_norm(a).max(f64::MIN_POSITIVE)))
}

/// The sample vectors used by the pointwise tests: basis vectors, pairwise
/// sums and differences, then `extra` unit Gaussian vectors.
pub fn sample_vectors<R: Rng + ?Sized>(rng: &mut R, dim: usize, extra: usize) -> Vec<CVector> {
    let mut out: Vec<CVector> = (0..dim).map(|i| basis_vector(dim, i)).collect();
    for i in 0..dim {
        for j in i + 1..dim {
            out.push(basis_vector(dim, i) + basis_vector(dim, j));
            out.push(basis_vector(dim, i) - basis_vector(dim, j));
        }
    }
    out.extend((0..extra).map(|_| unit_vector(rng, dim)));
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct RefWitness {
    pub x: Vec<Complex64>,
    /// `dist(Ax, [S x]) / (||A|| ||x||)`.
    pub residual: f64,
    /// Whether an independent SVD solve at a tighter rank tolerance confirms it.
    pub certified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RefVerdict {
    pub pass: bool,
    pub samples: usize,
    pub max_residual: f64,
    pub witness: Option<RefWitness>,
}

/// Pointwise test `Ax ∈ [S x]` over [`sample_vectors`].
pub fn ref_membership<R: Rng + ?Sized>(
    s: &OperatorSubspace,
    a: &CMatrix,
    n_samples: usize,
    tol: f64,
    rng: &mut R,
) -> Result<RefVerdict> {
    let samples = sample_vectors(rng, s.ambient_dim, n_samples);
    ref_membership_on(s, a, &samples, tol)
}

/// [`ref_membership`] on an explicit sample set.
pub fn ref_membership_on(
    s: &OperatorSubspace,
    a: &CMatrix,
    samples: &[CVector],
    tol: f64,
) -> Result<RefVerdict> {
    if a.nrows() != s.ambient_dim || a.ncols() != s.ambient_dim {
        return Err(Error::DimensionMismatch(
            "operator and subspace sizes differ".into(),
        ));
    }
    let na = op_norm(a);
    let mut max_residual: f64 = 0.0;
    let mut worst: Option<(f64, &CVector, Vec<CVector>)> = None;
    for x in samples {
        if na == 0.0 {
            break;
        }
        let images: Vec<CVector> = s.basis.iter().map(|b| b * x).collect();
        let mut span = OrthoBasis::new(s.ambient_dim, s.tol);
        for v in &images {
            span.push(v);
        }
        let ax = a * x;
        let rel = span.residual(&ax) / (na * x.norm());
        max_residual = max_residual.max(rel);
        if rel > tol && worst.as_ref().is_none_or(|(r, _, _)| rel > *r) {
            worst = Some((rel, x, images));
        }
    }
    let witness = worst.map(|(rel, x, images)| {
        let independent = lstsq_residual_svd(&images, &(a * x), s.tol / 10.0) / (na * x.norm());
        RefWitness {
            x: x.iter().copied().collect(),
            residual: rel,
            certified: independent > tol,
        }
    });
    Ok(RefVerdict {
        pass: witness.is_none(),
        samples: samples.len(),
        max_residual,
        witness,
    })
}

/// `T ↦ ⟨T(ξ⊗x), η⊗y⟩` on `H_1 ⊗ H_2`.
#[derive(Debug, Clone, Serialize)]
pub struct ElementaryFunctional {
    pub xi: CVector,
    pub x: CVector,
    pub eta: CVector,
    pub y: CVector,
}

impl ElementaryFunctional {
    pub fn eval(&self, t: &CMatrix) -> Complex64 {
        let src = self.xi.kronecker(&self.x);
        let dst = self.eta.kronecker(&self.y);
        inner(&(t * src), &dst)
    }

    /// `sum_i |ω(B_i)|^2` over the basis of `s`.
    pub fn objective(&self, s: &OperatorSubspace) -> f64 {
        s.basis.iter().map(|b| self.eval(b).norm_sqr()).sum()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SearchBudget {
    pub restarts: usize,
    pub sweeps: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            restarts: 64,
            sweeps: 200,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RefEVerdict {
    pub pass: bool,
    /// No annihilator was found, so the pass says nothing.
    pub vacuous: bool,
    pub seeded: usize,
    pub searched: usize,
    pub max_value: f64,
    pub violation: Option<ElementaryFunctional>,
}

/// Unit vector minimizing `||R v||`, with the minimal squared value.
fn min_direction(r: &CMatrix) -> (CVector, f64) {
    let cols = r.ncols();
    if r.nrows() < cols {
        let null = nullspace(r, 0.0);
        if let Some(v) = null.into_iter().next() {
            let val = (r * &v).norm_squared();
            return (v, val);
        }
    }
    let svd = r.clone().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let (i, s) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold(
            (0, f64::INFINITY),
            |acc, (i, s)| if *s < acc.1 { (i, *s) } else { acc },
        );
    (v_t.row(i).adjoint().into_owned(), s * s)
}

fn kron_id_left(dim: usize, v: &CVector) -> CMatrix {
    // I_dim ⊗ v as a (dim * len) x dim matrix
    CMatrix::identity(dim, dim).kronecker(v)
}

fn kron_id_right(v: &CVector, dim: usize) -> CMatrix {
    v.kronecker(&CMatrix::identity(dim, dim))
}

/// One alternating least-squares run for an elementary annihilator of `s`.
fn als_search<R: Rng + ?Sized>(
    s: &OperatorSubspace,
    d1: usize,
    d2: usize,
    sweeps: usize,
    target: f64,
    coordinate_start: bool,
    rng: &mut R,
) -> (ElementaryFunctional, f64) {
    let mut pick = |d: usize| {
        if coordinate_start {
            basis_vector(d, rng.random_range(0..d))
        } else {
            unit_vector(rng, d)
        }
    };
    let mut f = ElementaryFunctional {
        xi: pick(d1),
        x: pick(d2),
        eta: pick(d1),
        y: pick(d2),
    };
    let mut obj = f.objective(s);
    for _ in 0..sweeps {
        if obj <= target {
            break;
        }
        // ξ: rows (η⊗y)* B (I⊗x)
        let dst = f.eta.kronecker(&f.y).adjoint();
        let left_x = kron_id_left(d1, &f.x);
        let r = CMatrix::from_rows(
            &s.basis
                .iter()
                .map(|b| &dst * b * &left_x)
                .map(|m| m.row(0).into_owned())
                .collect::<Vec<_>>(),
        );
        f.xi = min_direction(&r).0;
        // x: rows (η⊗y)* B (ξ⊗I)
        let right_xi = kron_id_right(&f.xi, d2);
        let r = CMatrix::from_rows(
            &s.basis
                .iter()
                .map(|b| (&dst * b * &right_xi).row(0).into_owned())
                .collect::<Vec<_>>(),
        );
        f.x = min_direction(&r).0;
        // η: rows v* (I⊗y) with v = B(ξ⊗x)
        let src = f.xi.kronecker(&f.x);
        let images: Vec<CVector> = s.basis.iter().map(|b| b * &src).collect();
        let left_y = kron_id_left(d1, &f.y);
        let r = CMatrix::from_rows(
            &images
                .iter()
                .map(|v| (v.adjoint() * &left_y).row(0).into_owned())
                .collect::<Vec<_>>(),
        );
        // ⟨v, η⊗y⟩ = (η⊗y)* v, whose modulus is |v* (I⊗y) η|
        f.eta = min_direction(&r).0;
        let right_eta = kron_id_right(&f.eta, d2);
        let r = CMatrix::from_rows(
            &images
                .iter()
                .map(|v| (v.adjoint() * &right_eta).row(0).into_owned())
                .collect::<Vec<_>>(),
        );
        f.y = min_direction(&r).0;
        obj = f.objective(s);
    }
    (f, obj)
}

/// Elementary annihilators of `s` found by alternating least squares, plus
/// `seeds` that do annihilate it; `T` passes when every one of them kills it.
#[allow(clippy::too_many_arguments)]
pub fn ref_e_membership<R: Rng + ?Sized>(
    s: &OperatorSubspace,
    d1: usize,
    d2: usize,
    t: &CMatrix,
    seeds: &[ElementaryFunctional],
    budget: SearchBudget,
    tol: f64,
    rng: &mut R,
) -> Result<RefEVerdict> {
    if d1 * d2 != s.ambient_dim {
        return Err(Error::DimensionMismatch(format!(
            "{} is not {d1} x {d2}",
            s.ambient_dim
        )));
    }
    if t.nrows() != s.ambient_dim || t.ncols() != s.ambient_dim {
        return Err(Error::DimensionMismatch(
            "operator and subspace sizes differ".into(),
        ));
    }
    let accept = tol * tol;
    let mut found: Vec<ElementaryFunctional> = Vec::new();
    let mut seeded = 0;
    for f in seeds {
        if f.objective(s) <= accept {
            found.push(f.clone());
            seeded += 1;
        }
    }
    if s.dim() > 0 {
        // odd restarts start from coordinate vectors, which reach annihilators
        // on thin components that random starts tend to miss
        for r in 0..budget.restarts {
            let (f, obj) = als_search(s, d1, d2, budget.sweeps, accept * 1e-4, r % 2 == 1, rng);
            if obj <= accept {
                found.push(f);
            }
        }
    }
    let searched = found.len() - seeded;
    let nt = t.norm();
    let mut max_value: f64 = 0.0;
    let mut violation = None;
    for f in &found {
        let v = f.eval(t).norm();
        if v > max_value {
            max_value = v;
            if v > tol * nt.max(f64::MIN_POSITIVE) {
                violation = Some(f.clone());
            }
        }
    }
    Ok(RefEVerdict {
        pass: violation.is_none(),
        vacuous: found.is_empty(),
        seeded,
        searched,
        max_value,
        violation,
    })
}

/// Elementary functionals with `P(ξ⊗x) = 0` or `Q(η⊗y) = 0`; these
/// annihilate every `Q X P`.
pub fn structured_annihilators<R: Rng + ?Sized>(
    p: &CMatrix,
    q: &CMatrix,
    d1: usize,
    d2: usize,
    tol: f64,
    rng: &mut R,
) -> Vec<ElementaryFunctional> {
    let mut out = Vec::new();
    for xi in sample_vectors(rng, d1, 2) {
        for x in nullspace(&(p * kron_id_right(&xi, d2)), tol) {
            out.push(ElementaryFunctional {
                xi: xi.clone(),
                x,
                eta: unit_vector(rng, d1),
                y: unit_vector(rng, d2),
            });
        }
    }
    for eta in sample_vectors(rng, d1, 2) {
        for y in nullspace(&(q * kron_id_right(&eta, d2)), tol) {
            out.push(ElementaryFunctional {
                xi: unit_vector(rng, d1),
                x: unit_vector(rng, d2),
                eta: eta.clone(),
                y,
            });
        }
    }
    out
}

/// Projection onto the orthocomplement of the elementary tensors killed by `p`,
/// from a sweep over sampled first-factor and second-factor vectors. The sweep
/// may miss killed tensors, so the result can only be too large.
pub fn tilde_projection<R: Rng + ?Sized>(
    p: &CMatrix,
    d1: usize,
    d2: usize,
    xi_samples: usize,
    tol: f64,
    rng: &mut R,
) -> Result<CMatrix> {
    check_projection(p)?;
    let n = d1 * d2;
    if p.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} is not {d1} x {d2}",
            p.nrows()
        )));
    }
    let mut killed = OrthoBasis::new(n, tol);
    for xi in sample_vectors(rng, d1, xi_samples) {
        for x in nullspace(&(p * kron_id_right(&xi, d2)), tol) {
            killed.push(&xi.kronecker(&x));
        }
    }
    for x in sample_vectors(rng, d2, xi_samples) {
        for xi in nullspace(&(p * kron_id_left(d1, &x)), tol) {
            killed.push(&xi.kronecker(&x));
        }
    }
    let mut out = CMatrix::identity(n, n);
    for v in killed.vectors() {
        out -= v * v.adjoint();
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct FubiniVerdict {
    pub pass: bool,
    pub right_slices: usize,
    pub left_slices: usize,
    pub max_residual: f64,
    pub failed_side: Option<&'static str>,
}

/// Every sampled right slice lies in `Ref V` and every left slice in `Ref U`.
#[allow(clippy::too_many_arguments)]
pub fn fubini_membership<R: Rng + ?Sized>(
    t: &CMatrix,
    u: &OperatorSubspace,
    v: &OperatorSubspace,
    slice_samples: usize,
    vector_samples: usize,
    tol: f64,
    rng: &mut R,
) -> Result<FubiniVerdict> {
    let (d1, d2) = (u.ambient_dim, v.ambient_dim);
    let mut max_residual: f64 = 0.0;
    let mut failed_side = None;
    let pairs = |rng: &mut R, d: usize| -> Vec<(CVector, CVector)> {
        let mut out = Vec::new();
        for i in 0..d {
            for j in 0..d {
                out.push((basis_vector(d, i), basis_vector(d, j)));
            }
        }
        out.extend((0..slice_samples).map(|_| (unit_vector(rng, d), unit_vector(rng, d))));
        out
    };
    let right = pairs(rng, d1);
    let v_samples = sample_vectors(rng, d2, vector_samples);
    for (xi, eta) in &right {
        let slice = right_slice(t, d1, d2, xi, eta)?;
        let verdict = ref_membership_on(v, &slice, &v_samples, tol)?;
        max_residual = max_residual.max(verdict.max_residual);
        if !verdict.pass && failed_side.is_none() {
            failed_side = Some("right");
        }
    }
    let left = pairs(rng, d2);
    let u_samples = sample_vectors(rng, d1, vector_samples);
    for (x, y) in &left {
        let slice = left_slice(t, d1, d2, x, y)?;
        let verdict = ref_membership_on(u, &slice, &u_samples, tol)?;
        max_residual = max_residual.max(verdict.max_residual);
        if !verdict.pass && failed_side.is_none() {
            failed_side = Some("left");
        }
    }
    Ok(FubiniVerdict {
        pass: failed_side.is_none(),
        right_slices: right.len(),
        left_slices: left.len(),
        max_residual,
        failed_side,
    })
}

/// Numerical rank of `T` rearranged as a `d1^2 x d2^2` matrix; it is 1
/// exactly for nonzero `A ⊗ B`.
pub fn realignment_rank(t: &CMatrix, d1: usize, d2: usize, tol: f64) -> usize {
    let r = CMatrix::from_fn(d1 * d1, d2 * d2, |row, col| {
        let (i, j) = (row / d1, row % d1);
        let (k, l) = (col / d2, col % d2);
        t[(i * d2 + k, j * d2 + l)]
    });
    let sv = r.singular_values();
    let largest = sv.iter().fold(0.0f64, |a, s| a.max(*s));
    sv.iter()
        .filter(|s| **s > tol * largest && **s > 0.0)
        .count()
}

/// The nonreflexive pair used for the tensor-product gap: `span{I, E_12}` on
/// `C^2`, whose reflexive hull is the upper triangular matrices, `B = E_11`
/// in the hull but outside the span, and a cyclic permutation `V` on `C^3`.
pub struct TensorGapExample {
    pub factor: OperatorSubspace,
    pub b: CMatrix,
    pub v: CMatrix,
    pub product: OperatorSubspace,
    pub t: CMatrix,
    /// `e_1 ⊗ e_1 + e_2 ⊗ e_2`.
    pub witness: CVector,
}

pub fn tensor_gap_example() -> TensorGapExample {
    use crate::linalg::matrix_unit;
    let i2 = CMatrix::identity(2, 2);
    let e12 = matrix_unit(2, 0, 1);
    let factor = span_close(2, &[i2.clone(), e12.clone()], RANK_TOL).unwrap();
    let b = matrix_unit(2, 0, 0);
    let v = CMatrix::from_fn(3, 3, |i, j| {
        if i == (j + 1) % 3 {
            Complex64::from(1.0)
        } else {
            Complex64::from(0.0)
        }
    });
    let product = span_close(6, &[tensor(&v, &i2), tensor(&v, &e12)], RANK_TOL).unwrap();
    let t = tensor(&v, &b);
    let witness = basis_vector(3, 0).kronecker(&basis_vector(2, 0))
        + basis_vector(3, 1).kronecker(&basis_vector(2, 1));
    TensorGapExample {
        factor,
        b,
        v,
        product,
        t,
        witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, matrix_unit};
    use crate::ops::shift;
    use crate::rng::{gaussian_matrix, stream};

    fn lower_triangular_units(n: usize) -> Vec<CMatrix> {
        let mut out = Vec::new();
        for j in 0..n {
            for i in j..n {
                out.push(matrix_unit(n, i, j));
            }
        }
        out
    }

    fn gram_rank(mats: &[CMatrix], tol: f64) -> usize {
        let g = CMatrix::from_fn(mats.len(), mats.len(), |i, j| {
            crate::linalg::frobenius_inner(&mats[j], &mats[i])
        });
        let ev = g.singular_values();
        let largest = ev.iter().fold(0.0f64, |a, s| a.max(*s));
        ev.iter().filter(|s| **s > tol * largest).count()
    }

    #[test]
    fn spans() {
        let i = CMatrix::identity(2, 2);
        assert_eq!(
            span_close(2, &[i.clone(), &i * c(2.0, 0.0)], RANK_TOL)
                .unwrap()
                .dim(),
            1
        );
        let (e11, e22) = (matrix_unit(2, 0, 0), matrix_unit(2, 1, 1));
        let s = span_close(2, &[e11.clone(), e22.clone(), &e11 + &e22], RANK_TOL).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(s.orthonormality_defect() < 1e-10);
        assert!(s.contains(&e11) && s.contains(&(&e11 + &e22)));
        assert!(!s.contains(&matrix_unit(2, 0, 1)));
        assert_eq!(span_close(3, &[], RANK_TOL).unwrap().dim(), 0);
    }

    #[test]
    fn shift_diagonal_words_match_gram_rank() {
        let n = 7;
        let s = shift(n);
        let lam = 0.3f64;
        let v = CMatrix::from_diagonal(&CVector::from_fn(n, |j, _| {
            crate::linalg::cis(lam * j as f64)
        }));
        let sv = &s * &v;
        for d in 0..4 {
            let mut words = Vec::new();
            for a in 0..=d {
                for b in 0..=(d - a) {
                    words.push(
                        crate::linalg::mat_power(&s, a as u32)
                            * crate::linalg::mat_power(&sv, b as u32),
                    );
                }
            }
            let span = span_close(n, &words, 1e-10).unwrap();
            assert_eq!(span.dim(), gram_rank(&words, 1e-12));
        }
    }

    #[test]
    fn nilpotent_generator() {
        let e12 = matrix_unit(3, 0, 1);
        for cap in [1, 2, 5] {
            let a = generated_algebra(3, std::slice::from_ref(&e12), cap, false, RANK_TOL).unwrap();
            assert_eq!(a.dim(), 1);
            let a = generated_algebra(3, std::slice::from_ref(&e12), cap, true, RANK_TOL).unwrap();
            assert_eq!(a.dim(), 2);
        }
    }

    #[test]
    fn shift_and_irrational_diagonal_generate_lower_triangular() {
        let n = 6;
        let lam = std::f64::consts::TAU * (5f64.sqrt() - 1.0) / 2.0;
        let d = CMatrix::from_diagonal(&CVector::from_fn(n + 1, |j, _| {
            crate::linalg::cis(lam * j as f64)
        }));
        let gens = [shift(n + 1), d];
        let a = generated_algebra(n + 1, &gens, 2 * n, false, RANK_TOL).unwrap();
        assert_eq!(a.dim(), (n + 1) * (n + 2) / 2);
        for m in lower_triangular_units(n + 1) {
            assert!(a.contains(&m));
        }
        let mut prev = 0;
        for cap in 1..=2 * n {
            let dim = generated_algebra(n + 1, &gens, cap, false, RANK_TOL)
                .unwrap()
                .dim();
            assert!(dim >= prev);
            prev = dim;
        }
    }

    #[test]
    fn commutants() {
        let n = 3;
        assert_eq!(
            commutant(n, &[CMatrix::identity(n, n)], RANK_TOL)
                .unwrap()
                .dim(),
            n * n
        );
        for n in 2..=5 {
            let units: Vec<CMatrix> = (0..n * n).map(|i| matrix_unit(n, i % n, i / n)).collect();
            let cm = commutant(n, &units, RANK_TOL).unwrap();
            assert_eq!(cm.dim(), 1);
            assert!(cm.contains(&CMatrix::identity(n, n)));
        }
        let n = 6;
        let mut rng = stream(1, "diag");
        let d = CMatrix::from_diagonal(&CVector::from_fn(n, |j, _| c(j as f64 + 1.0, 0.0)));
        let cm = commutant(n, &[shift(n), d], RANK_TOL).unwrap();
        assert_eq!(cm.dim(), 1);
        let g = gaussian_matrix(&mut rng, n, n);
        let cm = commutant(n, std::slice::from_ref(&g), RANK_TOL).unwrap();
        for x in &cm.basis {
            assert!((x * &g - &g * x).norm() <= 1e-8 * x.norm() * g.norm());
        }
    }

    fn chain_projection(n: usize, k: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |i, j| {
            if i == j && i < k {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
    }

    #[test]
    fn lattice_algebras() {
        // span{e_k, ..., e_n} invariant for all k: lower triangular
        let n = 3;
        let tails: Vec<CMatrix> = (0..n)
            .map(|k| CMatrix::identity(n, n) - chain_projection(n, k))
            .collect();
        let alg = alg_of_lattice(n, &tails, RANK_TOL).unwrap();
        assert_eq!(alg.dim(), 6);
        for m in lower_triangular_units(n) {
            assert!(alg.contains(&m));
        }
        let full = alg_of_lattice(
            n,
            &[CMatrix::zeros(n, n), CMatrix::identity(n, n)],
            RANK_TOL,
        )
        .unwrap();
        assert_eq!(full.dim(), 9);
        assert!(matches!(
            alg_of_lattice(2, &[CMatrix::from_element(2, 2, c(1.0, 0.0))], RANK_TOL),
            Err(Error::NotProjection(_))
        ));
        let s = shift(5);
        let dg = CMatrix::from_diagonal(&CVector::from_fn(5, |j, _| crate::linalg::cis(j as f64)));
        for k in 0..5 {
            let tail = CMatrix::identity(5, 5) - chain_projection(5, k);
            assert!(lat_check(&[s.clone(), &s * &dg], &tail, 1e-12).unwrap());
        }
        assert!(!lat_check(
            &[s.adjoint()],
            &(CMatrix::identity(5, 5) - chain_projection(5, 2)),
            1e-12
        )
        .unwrap());
    }

    #[test]
    fn ref_examples() {
        let mut rng = stream(2, "ref");
        let s = span_close(2, &[CMatrix::identity(2, 2)], RANK_TOL).unwrap();
        let a = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0, 0.0), c(2.0, 0.0)]));
        let v = ref_membership(&s, &a, 4, MEMBERSHIP_TOL, &mut rng).unwrap();
        assert!(!v.pass);
        let w = v.witness.unwrap();
        assert!(w.certified);
        assert!(w.x[0].norm() > 0.0 && w.x[1].norm() > 0.0);
        assert!(
            ref_membership(&s, &CMatrix::identity(2, 2), 4, 1e-10, &mut rng)
                .unwrap()
                .pass
        );

        let n = 4;
        let lower = span_close(n, &lower_triangular_units(n), RANK_TOL).unwrap();
        let mut l = gaussian_matrix(&mut rng, n, n);
        for j in 0..n {
            for i in 0..j {
                l[(i, j)] = c(0.0, 0.0);
            }
        }
        assert!(
            ref_membership(&lower, &l, 8, MEMBERSHIP_TOL, &mut rng)
                .unwrap()
                .pass
        );
        let v = ref_membership(&lower, &matrix_unit(n, 0, 1), 8, MEMBERSHIP_TOL, &mut rng).unwrap();
        assert!(!v.pass && v.witness.unwrap().certified);
    }

    #[test]
    fn degenerate_inputs() {
        let mut rng = stream(3, "ref");
        let zero = OperatorSubspace::zero(3, RANK_TOL);
        assert!(
            ref_membership(&zero, &CMatrix::zeros(3, 3), 2, MEMBERSHIP_TOL, &mut rng)
                .unwrap()
                .pass
        );
        assert!(
            !ref_membership(&zero, &CMatrix::identity(3, 3), 2, MEMBERSHIP_TOL, &mut rng)
                .unwrap()
                .pass
        );
        assert!(!zero.contains(&CMatrix::identity(3, 3)));
        assert!(zero.contains(&CMatrix::zeros(3, 3)));
    }

    #[test]
    fn one_dimensional_spans_are_reflexive() {
        let mut rng = stream(4, "ref1");
        for _ in 0..5 {
            let a = gaussian_matrix(&mut rng, 4, 4);
            let b = gaussian_matrix(&mut rng, 4, 4);
            let s = span_close(4, std::slice::from_ref(&a), RANK_TOL).unwrap();
            assert!(
                ref_membership(&s, &(&a * c(0.5, -2.0)), 4, MEMBERSHIP_TOL, &mut rng)
                    .unwrap()
                    .pass
            );
            assert!(
                !ref_membership(&s, &b, 4, MEMBERSHIP_TOL, &mut rng)
                    .unwrap()
                    .pass
            );
        }
    }

    #[test]
    fn tensor_gap() {
        let ex = tensor_gap_example();
        let mut rng = stream(5, "gap");
        // B is in the reflexive hull of the factor but not in the factor
        assert!(!ex.factor.contains(&ex.b));
        assert!(
            ref_membership(&ex.factor, &ex.b, 16, MEMBERSHIP_TOL, &mut rng)
                .unwrap()
                .pass
        );
        // the product fails the pointwise test at the stated witness
        let v = ref_membership_on(
            &ex.product,
            &ex.t,
            std::slice::from_ref(&ex.witness),
            MEMBERSHIP_TOL,
        )
        .unwrap();
        assert!(!v.pass && v.witness.unwrap().certified);
        let e = ref_e_membership(
            &ex.product,
            3,
            2,
            &ex.t,
            &[],
            SearchBudget::default(),
            MEMBERSHIP_TOL,
            &mut rng,
        )
        .unwrap();
        assert!(e.pass && !e.vacuous, "{e:?}");
        // elements of the product pass as well
        let inside = &ex.product.basis[0] * c(2.0, 1.0) + &ex.product.basis[1];
        let e = ref_e_membership(
            &ex.product,
            3,
            2,
            &inside,
            &[],
            SearchBudget::default(),
            MEMBERSHIP_TOL,
            &mut rng,
        )
        .unwrap();
        assert!(e.pass);
    }

    #[test]
    fn ref_e_detects_non_members() {
        let mut rng = stream(6, "refe");
        let ex = tensor_gap_example();
        // E_21 is outside the upper triangular hull of the factor
        let t = tensor(&ex.v, &matrix_unit(2, 1, 0));
        let verdict = ref_e_membership(
            &ex.product,
            3,
            2,
            &t,
            &[],
            SearchBudget::default(),
            MEMBERSHIP_TOL,
            &mut rng,
        )
        .unwrap();
        assert!(!verdict.pass);
        let f = verdict.violation.unwrap();
        assert!(f.objective(&ex.product) <= MEMBERSHIP_TOL * MEMBERSHIP_TOL);
    }

    #[test]
    fn structured_annihilators_kill_compressions() {
        let (d1, d2) = (2, 3);
        let mut rng = stream(7, "qxp");
        let p = tensor(&chain_projection(d1, 1), &CMatrix::identity(d2, d2));
        let q = tensor(&CMatrix::identity(d1, d1), &chain_projection(d2, 2));
        let n = d1 * d2;
        let mats: Vec<CMatrix> = (0..n * n)
            .map(|i| &q * matrix_unit(n, i % n, i / n) * &p)
            .collect();
        let s = span_close(n, &mats, RANK_TOL).unwrap();
        let seeds = structured_annihilators(&p, &q, d1, d2, 1e-10, &mut rng);
        assert!(!seeds.is_empty());
        for f in &seeds {
            assert!(f.objective(&s) < 1e-20);
        }
        let budget = SearchBudget {
            restarts: 0,
            sweeps: 0,
        };
        let inside = &q * gaussian_matrix(&mut rng, n, n) * &p;
        let v = ref_e_membership(
            &s,
            d1,
            d2,
            &inside,
            &seeds,
            budget,
            MEMBERSHIP_TOL,
            &mut rng,
        )
        .unwrap();
        assert!(v.pass && v.seeded == seeds.len());
        let outside = gaussian_matrix(&mut rng, n, n);
        assert!(
            !ref_e_membership(
                &s,
                d1,
                d2,
                &outside,
                &seeds,
                budget,
                MEMBERSHIP_TOL,
                &mut rng
            )
            .unwrap()
            .pass
        );
    }

    #[test]
    fn tilde_projections() {
        let mut rng = stream(8, "tilde");
        let (d1, d2) = (2, 2);
        let ent = (basis_vector(2, 0).kronecker(&basis_vector(2, 0))
            + basis_vector(2, 1).kronecker(&basis_vector(2, 1)))
            / c(2f64.sqrt(), 0.0);
        let p = CMatrix::identity(4, 4) - &ent * ent.adjoint();
        let pt = tilde_projection(&p, d1, d2, 4, 1e-10, &mut rng).unwrap();
        assert!(max_abs(&(pt - CMatrix::identity(4, 4))) < 1e-10);

        let (d1, d2) = (3, 2);
        let p1 = chain_projection(d1, 2);
        let p2 = chain_projection(d2, 1);
        let p = tensor(&p1, &p2);
        let pt = tilde_projection(&p, d1, d2, 4, 1e-10, &mut rng).unwrap();
        assert!(max_abs(&(pt - &p)) < 1e-10);

        let id = CMatrix::identity(6, 6);
        let pt = tilde_projection(&id, d1, d2, 4, 1e-10, &mut rng).unwrap();
        assert!(max_abs(&(pt - &id)) < 1e-10);
    }

    #[test]
    fn fubini() {
        let mut rng = stream(9, "fubini");
        let (d1, d2) = (2, 3);
        let a = gaussian_matrix(&mut rng, d1, d1);
        let u = span_close(d1, &[a.clone(), CMatrix::identity(d1, d1)], RANK_TOL).unwrap();
        let lower: Vec<CMatrix> = lower_triangular_units(d2);
        let v = span_close(d2, &lower, RANK_TOL).unwrap();
        let mut b = gaussian_matrix(&mut rng, d2, d2);
        for j in 0..d2 {
            for i in 0..j {
                b[(i, j)] = c(0.0, 0.0);
            }
        }
        let t = tensor(&a, &b);
        assert!(
            fubini_membership(&t, &u, &v, 2, 2, MEMBERSHIP_TOL, &mut rng)
                .unwrap()
                .pass
        );
        let t = tensor(&a, &matrix_unit(d2, 0, 2));
        let verdict = fubini_membership(&t, &u, &v, 2, 2, MEMBERSHIP_TOL, &mut rng).unwrap();
        assert_eq!(verdict.failed_side, Some("right"));

        let ua = span_close(d1, std::slice::from_ref(&a), RANK_TOL).unwrap();
        let t = tensor(&a, &b);
        assert!(
            fubini_membership(&t, &ua, &v, 2, 2, MEMBERSHIP_TOL, &mut rng)
                .unwrap()
                .pass
        );
        assert_eq!(realignment_rank(&t, d1, d2, 1e-10), 1);
        let t2 = &t + tensor(&CMatrix::identity(d1, d1), &lower[0]);
        assert!(
            !fubini_membership(&t2, &ua, &v, 2, 2, MEMBERSHIP_TOL, &mut rng)
                .unwrap()
                .pass
        );
        assert_eq!(realignment_rank(&t2, d1, d2, 1e-10), 2);
    }
}
