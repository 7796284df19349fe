//! Truncated models of three representations of the semigroup on `L^2` or
//! `H^2` of the circle, with an irrational rotation `λ = e^{2πiθ}`.
//!
//! In each model `π(u) π(v) = λ̄ π(v) π(u)`, so the central generator acts as
//! `π(w) = λ̄ I` under the group law used here.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::averaging::diag_expect;
use crate::error::{Error, Result};
use crate::hulls::{
    generated_algebra, lat_check, ref_membership, span_close, OperatorSubspace, RefVerdict,
};
use crate::linalg::{basis_vector, cis, lstsq_residual_svd, max_abs, CMatrix, CVector, OrthoBasis};
use crate::ops::shift;
use crate::rng::gaussian_vector;

pub const DEFAULT_THETA: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepKind {
    /// `M_ζ` and `f ↦ f ∘ α` on `L^2`, basis `ζ_{-N..N}`.
    Lebesgue,
    /// Bilateral shift in `v` along an atomic orbit, basis `f_{-N..N}`.
    Atomic,
    /// `S` and `SV` on `H^2`, basis `ζ_0..ζ_N`.
    Nonreflexive,
}

impl std::str::FromStr for RepKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lebesgue" => Ok(RepKind::Lebesgue),
            "atomic" => Ok(RepKind::Atomic),
            "nonreflexive" => Ok(RepKind::Nonreflexive),
            other => Err(Error::InvalidParameter(format!(
                "unknown representation kind {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepSpec {
    pub kind: RepKind,
    pub theta: f64,
    pub z0: num_complex::Complex64,
    pub dim: usize,
}

impl RepSpec {
    pub fn new(kind: RepKind, dim: usize) -> Self {
        Self {
            kind,
            theta: DEFAULT_THETA,
            z0: num_complex::Complex64::new(1.0, 0.0),
            dim,
        }
    }

    pub fn lambda(&self) -> num_complex::Complex64 {
        cis(std::f64::consts::TAU * self.theta)
    }

    /// Basis labels: `-N..=N` for the bilateral kinds, `0..dim` otherwise.
    pub fn indices(&self) -> Vec<i64> {
        match self.kind {
            RepKind::Nonreflexive => (0..self.dim as i64).collect(),
            _ => {
                let n = (self.dim / 2) as i64;
                (-n..=n).collect()
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "theta = {} must lie in (0, 1)",
                self.theta
            )));
        }
        if self.dim == 0 {
            return Err(Error::InvalidParameter("dim must be positive".into()));
        }
        if self.kind != RepKind::Nonreflexive && self.dim.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "bilateral truncations need an odd dim, got {}",
                self.dim
            )));
        }
        if (self.z0.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter("z0 must have modulus 1".into()));
        }
        let lam = self.lambda();
        let pts: Vec<_> = (0..self.dim).map(|j| lam.powu(j as u32)).collect();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                if (pts[i] - pts[j]).norm() <= 1e-6 {
                    return Err(Error::InvalidParameter(format!(
                        "λ^{i} and λ^{j} coincide to 1e-6 for theta = {}",
                        self.theta
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Rep {
    pub spec: RepSpec,
    pub pi_u: CMatrix,
    pub pi_v: CMatrix,
    pub pi_w: num_complex::Complex64,
}

fn pow_i(z: num_complex::Complex64, p: i64) -> num_complex::Complex64 {
    if p >= 0 {
        z.powu(p as u32)
    } else {
        z.conj().powu((-p) as u32)
    }
}

pub fn build_rep(spec: RepSpec) -> Result<Rep> {
    spec.validate()?;
    let lam = spec.lambda();
    let idx = spec.indices();
    let diag = |f: &dyn Fn(i64) -> num_complex::Complex64| {
        CMatrix::from_diagonal(&CVector::from_iterator(
            idx.len(),
            idx.iter().map(|j| f(*j)),
        ))
    };
    let s = shift(spec.dim);
    let (pi_u, pi_v) = match spec.kind {
        RepKind::Lebesgue => (s, diag(&|j| pow_i(lam, j))),
        RepKind::Atomic => (diag(&|j| pow_i(lam.conj(), j) * spec.z0), s),
        RepKind::Nonreflexive => {
            let v = diag(&|j| pow_i(lam, j));
            (s.clone(), s * v)
        }
    };
    Ok(Rep {
        spec,
        pi_u,
        pi_v,
        pi_w: lam.conj(),
    })
}

impl Rep {
    /// `max |π(u)π(v) - c π(v)π(u)|`.
    pub fn commutation_defect(&self, c: num_complex::Complex64) -> f64 {
        max_abs(&(&self.pi_u * &self.pi_v - &self.pi_v * &self.pi_u * c))
    }

    pub fn generators(&self) -> [CMatrix; 2] {
        [self.pi_u.clone(), self.pi_v.clone()]
    }

    /// Projections onto `span{e_i : i >= k}` in the basis order.
    pub fn tail_projection(&self, k: usize) -> CMatrix {
        let d = self.spec.dim;
        CMatrix::from_fn(d, d, |i, j| {
            if i == j && i >= k {
                num_complex::Complex64::new(1.0, 0.0)
            } else {
                num_complex::Complex64::new(0.0, 0.0)
            }
        })
    }
}

/// The unital algebra generated by `π(u), π(v)` with words up to `cap`.
pub fn rep_algebra(rep: &Rep, cap: usize, tol: f64) -> Result<OperatorSubspace> {
    generated_algebra(rep.spec.dim, &rep.generators(), cap, true, tol)
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityReport {
    pub kind: RepKind,
    pub cap: usize,
    pub block: usize,
    pub span_dim: usize,
    pub target_dim: usize,
    pub pass: bool,
}

/// Dimension of the generated algebra compressed to the central `block`
/// indices, against the lower triangular count `block (block + 1) / 2`.
pub fn density_check(spec: RepSpec, cap: usize, block: usize, tol: f64) -> Result<DensityReport> {
    if spec.kind == RepKind::Nonreflexive {
        return Err(Error::InvalidParameter(
            "density applies to the bilateral kinds".into(),
        ));
    }
    if block == 0 || block > spec.dim {
        return Err(Error::InvalidParameter(format!(
            "block {block} does not fit in dim {}",
            spec.dim
        )));
    }
    let rep = build_rep(spec)?;
    let alg = rep_algebra(&rep, cap, tol)?;
    let start = (spec.dim - block) / 2;
    let compressed: Vec<CMatrix> = alg
        .basis
        .iter()
        .map(|b| b.view((start, start), (block, block)).into_owned())
        .collect();
    let span = span_close(block, &compressed, tol)?;
    let target_dim = block * (block + 1) / 2;
    Ok(DensityReport {
        kind: spec.kind,
        cap,
        block,
        span_dim: span.dim(),
        target_dim,
        pass: span.dim() == target_dim,
    })
}

/// All words of length `1..=max_len` in `gens`, with their lengths.
pub fn words(gens: &[CMatrix], max_len: usize) -> Vec<(usize, CMatrix)> {
    let mut out = Vec::new();
    let mut layer: Vec<CMatrix> = gens.to_vec();
    for len in 1..=max_len {
        out.extend(layer.iter().cloned().map(|m| (len, m)));
        if len < max_len {
            layer = layer
                .iter()
                .flat_map(|w| gens.iter().map(move |g| g * w))
                .collect();
        }
    }
    out
}

/// `(λ^{i j})_{j < len}` for `i = 0..=m`.
fn rotation_powers(lam: num_complex::Complex64, m: usize, len: usize) -> Vec<CVector> {
    (0..=m)
        .map(|i| CVector::from_fn(len, |j, _| lam.powu((i * j) as u32)))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ThinReport {
    pub words: usize,
    pub combinations: usize,
    pub interior: usize,
    /// Worst relative distance of `E_m(A)` from `span{(λ^{ij})_j : i <= m}`.
    pub max_residual: f64,
    /// Largest `E_m(A)` entry for a word shorter than `m`.
    pub max_excess: f64,
    pub pass: bool,
}

/// `E_m(A) ∈ [I, V, ..., V^m]` on the interior, for words in `S, SV` and
/// random combinations of them.
pub fn thin_check<R: Rng + ?Sized>(
    spec: RepSpec,
    word_cap: usize,
    m_max: usize,
    combinations: usize,
    tol: f64,
    rng: &mut R,
) -> Result<ThinReport> {
    if spec.kind != RepKind::Nonreflexive {
        return Err(Error::InvalidParameter(
            "thin_check uses the nonreflexive kind".into(),
        ));
    }
    if m_max >= spec.dim || word_cap >= spec.dim {
        return Err(Error::InvalidParameter(format!(
            "m_max and word_cap must be below dim {}",
            spec.dim
        )));
    }
    let rep = build_rep(spec)?;
    let interior = spec.dim - word_cap;
    let lam = spec.lambda();
    let all = words(&rep.generators(), word_cap);
    let mut samples: Vec<(usize, CMatrix)> = all.clone();
    for _ in 0..combinations {
        let mut a = CMatrix::identity(spec.dim, spec.dim) * crate::rng::complex_gaussian(rng);
        for (_, w) in &all {
            a += w * crate::rng::complex_gaussian(rng);
        }
        samples.push((0, a));
    }
    let mut max_residual: f64 = 0.0;
    let mut max_excess: f64 = 0.0;
    for (len, a) in &samples {
        for m in 0..=m_max {
            let e = diag_expect(a, m)?;
            let e = e.rows(0, interior).into_owned();
            let basis = rotation_powers(lam, m, interior);
            let r = lstsq_residual_svd(&basis, &e, 1e-12) / e.norm().max(1.0);
            max_residual = max_residual.max(r);
            if *len > 0 && m != *len {
                max_excess = max_excess.max(crate::linalg::max_abs_vec(&e));
            }
        }
    }
    Ok(ThinReport {
        words: all.len(),
        combinations,
        interior,
        max_residual,
        max_excess,
        pass: max_residual <= tol && max_excess <= tol,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub dim: usize,
    pub cap: usize,
    /// `B` leaves every `span{ζ_k, ..., ζ_N}` invariant.
    pub lattice_ok: bool,
    /// Distance of `E_1(B)` from `span{1, (λ^j)}`.
    pub e1_residual: f64,
    /// Frobenius distance of `B` from the generated span.
    pub algebra_distance: f64,
    /// Pointwise Ref evidence; finite compressions need not preserve Ref.
    pub ref_evidence: RefVerdict,
}

/// `B = E_{1,0}`, the matrix unit sending `ζ_0` to `ζ_1`.
pub fn witness_matrix(dim: usize) -> CMatrix {
    crate::linalg::matrix_unit(dim, 1, 0)
}

pub fn nonreflexivity_witness<R: Rng + ?Sized>(
    spec: RepSpec,
    cap: usize,
    ref_samples: usize,
    tol: f64,
    rng: &mut R,
) -> Result<WitnessReport> {
    if spec.kind != RepKind::Nonreflexive {
        return Err(Error::InvalidParameter(
            "the witness uses the nonreflexive kind".into(),
        ));
    }
    if spec.dim < 4 {
        return Err(Error::InvalidParameter("the witness needs dim >= 4".into()));
    }
    let rep = build_rep(spec)?;
    let b = witness_matrix(spec.dim);
    let mut lattice_ok = true;
    for k in 0..=spec.dim {
        lattice_ok &= lat_check(std::slice::from_ref(&b), &rep.tail_projection(k), 0.0)?;
    }
    let e1 = diag_expect(&b, 1)?;
    let e1_residual = lstsq_residual_svd(&rotation_powers(spec.lambda(), 1, e1.len()), &e1, 1e-12);
    let alg = rep_algebra(&rep, cap, tol)?;
    let algebra_distance = alg.residual(&b);
    let ref_evidence = ref_membership(&alg, &b, ref_samples, crate::hulls::MEMBERSHIP_TOL, rng)?;
    Ok(WitnessReport {
        dim: spec.dim,
        cap,
        lattice_ok,
        e1_residual,
        algebra_distance,
        ref_evidence,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LatProbeReport {
    /// Every `span{ζ_k..ζ_N}` is invariant under both generators.
    pub chain_invariant: bool,
    pub probes: usize,
    /// For each probe: the smallest index in the seed and the dimension of
    /// the invariant subspace it generates.
    pub cyclic: Vec<(usize, usize)>,
    /// Every generated subspace equals `span{ζ_k..ζ_N}` for its seed's `k`.
    pub all_in_chain: bool,
}

/// Smallest invariant subspace of `gens` containing `seed`.
pub fn cyclic_subspace(gens: &[CMatrix], seed: &CVector, tol: f64) -> OrthoBasis {
    let mut basis = OrthoBasis::new(seed.len(), tol);
    let mut frontier = Vec::new();
    if basis.push(seed) {
        frontier.push(basis.vectors().last().unwrap().clone());
    }
    while let Some(v) = frontier.pop() {
        for g in gens {
            if basis.push(&(g * &v)) {
                frontier.push(basis.vectors().last().unwrap().clone());
            }
        }
    }
    basis
}

pub fn lat_probe<R: Rng + ?Sized>(
    spec: RepSpec,
    random_probes: usize,
    tol: f64,
    rng: &mut R,
) -> Result<LatProbeReport> {
    if spec.kind != RepKind::Nonreflexive {
        return Err(Error::InvalidParameter(
            "lat_probe uses the nonreflexive kind".into(),
        ));
    }
    let rep = build_rep(spec)?;
    let d = spec.dim;
    let gens = rep.generators();
    let mut chain_invariant = true;
    for k in 0..=d {
        chain_invariant &= lat_check(&gens, &rep.tail_projection(k), tol)?;
    }
    let mut seeds: Vec<CVector> = vec![
        basis_vector(d, 2.min(d - 1)),
        basis_vector(d, 0) + basis_vector(d, 1.min(d - 1)),
    ];
    for _ in 0..random_probes {
        let k = rng.random_range(0..d);
        let mut v = gaussian_vector(rng, d);
        for i in 0..k {
            v[i] = num_complex::Complex64::new(0.0, 0.0);
        }
        seeds.push(v);
    }
    let mut cyclic = Vec::new();
    let mut all_in_chain = true;
    for seed in &seeds {
        let k = seed.iter().position(|z| z.norm() > 0.0).unwrap_or(d);
        let sub = cyclic_subspace(&gens, seed, 1e-10);
        let mut p = CMatrix::zeros(d, d);
        for v in sub.vectors() {
            p += v * v.adjoint();
        }
        let invariant = lat_check(&gens, &p, tol)?;
        all_in_chain &= invariant && max_abs(&(p - rep.tail_projection(k))) <= tol;
        cyclic.push((k, sub.len()));
    }
    Ok(LatProbeReport {
        chain_invariant,
        probes: seeds.len(),
        cyclic,
        all_in_chain,
    })
}
