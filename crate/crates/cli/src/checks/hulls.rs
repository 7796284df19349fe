use hoplab_core::hulls::{
    alg_of_lattice, commutant, fubini_membership, generated_algebra, ref_e_membership,
    ref_membership, ref_membership_on, span_close, structured_annihilators, tensor_gap_example,
    tilde_projection, SearchBudget,
};
use hoplab_core::linalg::{basis_vector, c, cis, matrix_unit, max_abs, CMatrix, CVector};
use hoplab_core::ops::{shift, tensor};
use hoplab_core::rng::{complex_gaussian, gaussian_matrix};

use super::{CheckDef, Ctx, Outcome};
use crate::config::Suite;

pub fn checks() -> Vec<CheckDef> {
    vec![
        CheckDef::new(
            "hulls.spans",
            Suite::Hulls,
            "span closure and generated algebras of a shift with an irrational diagonal",
            spans,
        ),
        CheckDef::new(
            "hulls.commutant",
            Suite::Hulls,
            "the commutant of all matrix units is the scalars",
            commutant_check,
        ),
        CheckDef::new(
            "hulls.lattice",
            Suite::Hulls,
            "Alg of the coordinate chain is the lower triangular algebra",
            lattice,
        ),
        CheckDef::new(
            "hulls.ref_one_dim",
            Suite::Hulls,
            "one-dimensional spans are reflexive: Ref(CA) = CA",
            ref_one_dim,
        ),
        CheckDef::new(
            "hulls.ref_nest",
            Suite::Hulls,
            "the nest algebra is reflexive and excludes E_12",
            ref_nest,
        ),
        CheckDef::new(
            "hulls.tilde",
            Suite::Hulls,
            "the tilde projection of an entangled complement is I; product projections are fixed",
            tilde,
        ),
        CheckDef::new(
            "hulls.fubini",
            Suite::Hulls,
            "slice criterion for membership in the Fubini product",
            fubini,
        ),
        CheckDef::new(
            "hulls.tensor_gap",
            Suite::Hulls,
            "V ⊗ B lies outside Ref of the tensor product although B lies in the factor's hull",
            tensor_gap,
        ),
        CheckDef::new(
            "hulls.tensor_gap_ref_e",
            Suite::Hulls,
            "V ⊗ B passes the elementary-functional test on the tensor product",
            tensor_gap_ref_e,
        )
        .heuristic(),
        CheckDef::new(
            "hulls.structured_seeds",
            Suite::Hulls,
            "structured elementary annihilators of Q X P",
            structured_seeds,
        ),
        CheckDef::new(
            "hulls.annihilator_search",
            Suite::Hulls,
            "alternating search finds annihilators of Q X P without seeds",
            annihilator_search,
        )
        .heuristic(),
    ]
}

fn lower_triangular_units(n: usize) -> Vec<CMatrix> {
    let mut out = Vec::new();
    for j in 0..n {
        for i in j..n {
            out.push(matrix_unit(n, i, j));
        }
    }
    out
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

fn spans(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let tol = ctx.config.tolerances.rank;
    let n = 7;
    let lam = std::f64::consts::TAU * ctx.config.theta;
    let d = CMatrix::from_diagonal(&CVector::from_fn(n, |j, _| cis(lam * j as f64)));
    let gens = [shift(n), d];
    let alg = generated_algebra(n, &gens, 2 * n, false, tol)?;
    let lower = lower_triangular_units(n);
    let all_in = lower.iter().all(|m| alg.contains(m));
    let id = CMatrix::identity(2, 2);
    let dup = span_close(2, &[id.clone(), &id * c(2.0, 0.0)], tol)?.dim();
    Ok(
        Outcome::flag(alg.dim() == n * (n + 1) / 2 && all_in && dup == 1)
            .param("dim", n)
            .param("theta", ctx.config.theta)
            .witness(serde_json::json!({ "algebra_dim": alg.dim(), "duplicate_span_dim": dup }))
            .detail(format!(
                "algebra dimension {} of {}",
                alg.dim(),
                n * (n + 1) / 2
            )),
    )
}

fn commutant_check(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let tol = ctx.config.tolerances.rank;
    let mut dims = Vec::new();
    let mut ok = true;
    for n in 3..=6 {
        let units: Vec<CMatrix> = (0..n * n).map(|i| matrix_unit(n, i % n, i / n)).collect();
        let cm = commutant(n, &units, tol)?;
        ok &= cm.dim() == 1 && cm.contains(&CMatrix::identity(n, n));
        dims.push(cm.dim());
    }
    Ok(Outcome::flag(ok)
        .param("dims", [3, 4, 5, 6])
        .witness(serde_json::json!({ "commutant_dims": dims })))
}

fn lattice(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let tol = ctx.config.tolerances.rank;
    let mut ok = true;
    let mut dims = Vec::new();
    for n in 2..=6 {
        let tails: Vec<CMatrix> = (0..=n)
            .map(|k| CMatrix::identity(n, n) - chain_projection(n, k))
            .collect();
        let alg = alg_of_lattice(n, &tails, tol)?;
        ok &= alg.dim() == n * (n + 1) / 2
            && lower_triangular_units(n).iter().all(|m| alg.contains(m));
        dims.push(alg.dim());
    }
    Ok(Outcome::flag(ok)
        .param("dims", [2, 3, 4, 5, 6])
        .witness(serde_json::json!({ "alg_dims": dims })))
}

fn ref_one_dim(ctx: &Ctx) -> anyhow::Result<Outcome> {
    const SAMPLES: usize = 200;
    const NON_MEMBERS: usize = 10;
    let (rank, mem) = (ctx.config.tolerances.rank, ctx.config.tolerances.membership);
    let n = 4;
    let mut rng = ctx.rng("operators");
    let a = gaussian_matrix(&mut rng, n, n);
    let s = span_close(n, std::slice::from_ref(&a), rank)?;
    let member = &a * complex_gaussian(&mut rng);
    let inside = ref_membership(&s, &member, SAMPLES, mem, &mut rng)?;
    let mut certified = 0;
    let mut first_witness = None;
    for _ in 0..NON_MEMBERS {
        let b = gaussian_matrix(&mut rng, n, n);
        let v = ref_membership(&s, &b, SAMPLES, mem, &mut rng)?;
        if let Some(w) = v.witness.filter(|w| w.certified && !v.pass) {
            certified += 1;
            first_witness.get_or_insert(w);
        }
    }
    Ok(Outcome::flag(inside.pass && certified == NON_MEMBERS)
        .param("samples", SAMPLES)
        .param("non_members", NON_MEMBERS)
        .param("dim", n)
        .witness(serde_json::json!({ "certified": certified, "first": first_witness, "member_residual": inside.max_residual })))
}

fn ref_nest(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let (rank, mem) = (ctx.config.tolerances.rank, ctx.config.tolerances.membership);
    let n = 4;
    let mut rng = ctx.rng("operators");
    let lower = span_close(n, &lower_triangular_units(n), rank)?;
    let mut l = gaussian_matrix(&mut rng, n, n);
    for j in 0..n {
        for i in 0..j {
            l[(i, j)] = c(0.0, 0.0);
        }
    }
    let inside = ref_membership(&lower, &l, 16, mem, &mut rng)?;
    let outside = ref_membership(&lower, &matrix_unit(n, 0, 1), 16, mem, &mut rng)?;
    let certified = outside.witness.as_ref().is_some_and(|w| w.certified);
    Ok(Outcome::flag(inside.pass && !outside.pass && certified)
        .param("dim", n)
        .witness(serde_json::json!({ "e12": outside.witness })))
}

fn tilde(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let tol = 1e-10;
    let mut rng = ctx.rng("sweep");
    let ent = (basis_vector(2, 0).kronecker(&basis_vector(2, 0))
        + basis_vector(2, 1).kronecker(&basis_vector(2, 1)))
        / c(2f64.sqrt(), 0.0);
    let f = CMatrix::identity(4, 4) - &ent * ent.adjoint();
    let entangled =
        max_abs(&(tilde_projection(&f, 2, 2, 4, tol, &mut rng)? - CMatrix::identity(4, 4)));
    let mut product: f64 = 0.0;
    for (d1, d2, k1, k2) in [(3, 2, 2, 1), (2, 3, 1, 2), (3, 3, 1, 1)] {
        let p = tensor(&chain_projection(d1, k1), &chain_projection(d2, k2));
        product = product.max(max_abs(
            &(tilde_projection(&p, d1, d2, 4, tol, &mut rng)? - &p),
        ));
    }
    Ok(Outcome::bound(entangled.max(product), 1e-10)
        .param("xi_samples", 4)
        .witness(serde_json::json!({ "entangled": entangled, "product": product })))
}

fn fubini(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let (rank, mem) = (ctx.config.tolerances.rank, ctx.config.tolerances.membership);
    let mut rng = ctx.rng("families");
    let (d1, d2) = (2, 3);
    let a = gaussian_matrix(&mut rng, d1, d1);
    let mut b = gaussian_matrix(&mut rng, d2, d2);
    for j in 0..d2 {
        for i in 0..j {
            b[(i, j)] = c(0.0, 0.0);
        }
    }
    let lower = lower_triangular_units(d2);
    let v = span_close(d2, &lower, rank)?;
    let u = span_close(d1, &[a.clone(), CMatrix::identity(d1, d1)], rank)?;
    let ua = span_close(d1, std::slice::from_ref(&a), rank)?;
    // (T, U, expected pass)
    let cases = [
        ("product of members", tensor(&a, &b), &u, true),
        (
            "upper corner",
            tensor(&a, &matrix_unit(d2, 0, 2)),
            &u,
            false,
        ),
        (
            "rank-two sum",
            tensor(&a, &b) + tensor(&CMatrix::identity(d1, d1), &lower[0]),
            &ua,
            false,
        ),
    ];
    let mut wrong = Vec::new();
    for (name, t, left, expected) in &cases {
        let verdict = fubini_membership(t, left, &v, 2, 2, mem, &mut rng)?;
        if verdict.pass != *expected {
            wrong.push(*name);
        }
    }
    Ok(Outcome::flag(wrong.is_empty())
        .param("families", cases.len())
        .detail(if wrong.is_empty() {
            String::new()
        } else {
            format!("wrong verdict: {}", wrong.join(", "))
        }))
}

fn tensor_gap(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let mem = ctx.config.tolerances.membership;
    let mut rng = ctx.rng("ref");
    let ex = tensor_gap_example();
    let factor_hull = ref_membership(&ex.factor, &ex.b, 16, mem, &mut rng)?.pass;
    let outside_factor = !ex.factor.contains(&ex.b);
    let v = ref_membership_on(&ex.product, &ex.t, std::slice::from_ref(&ex.witness), mem)?;
    let certified = !v.pass && v.witness.as_ref().is_some_and(|w| w.certified);
    Ok(Outcome::flag(factor_hull && outside_factor && certified)
        .witness(serde_json::json!({ "residual": v.max_residual, "x": v.witness }))
        .detail(format!(
            "B in Ref(factor): {factor_hull}; V⊗B fails Ref: {certified}"
        )))
}

fn tensor_gap_ref_e(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let mem = ctx.config.tolerances.membership;
    let mut rng = ctx.rng("search");
    let ex = tensor_gap_example();
    let budget = SearchBudget::default();
    let e = ref_e_membership(&ex.product, 3, 2, &ex.t, &[], budget, mem, &mut rng)?;
    Ok(Outcome::flag(e.pass && !e.vacuous)
        .param("restarts", budget.restarts)
        .param("sweeps", budget.sweeps)
        .witness(serde_json::json!({ "searched": e.searched, "max_value": e.max_value, "vacuous": e.vacuous })))
}

fn qxp_family(
    d1: usize,
    d2: usize,
    rank: f64,
) -> anyhow::Result<(CMatrix, CMatrix, hoplab_core::hulls::OperatorSubspace)> {
    let p = tensor(&chain_projection(d1, 1), &CMatrix::identity(d2, d2));
    let q = tensor(&CMatrix::identity(d1, d1), &chain_projection(d2, 2));
    let n = d1 * d2;
    let mats: Vec<CMatrix> = (0..n * n)
        .map(|i| &q * matrix_unit(n, i % n, i / n) * &p)
        .collect();
    let s = span_close(n, &mats, rank)?;
    Ok((p, q, s))
}

fn structured_seeds(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let (rank, mem) = (ctx.config.tolerances.rank, ctx.config.tolerances.membership);
    let (d1, d2) = (2, 3);
    let mut rng = ctx.rng("seeds");
    let (p, q, s) = qxp_family(d1, d2, rank)?;
    let seeds = structured_annihilators(&p, &q, d1, d2, 1e-10, &mut rng);
    let worst = seeds.iter().map(|f| f.objective(&s)).fold(0.0, f64::max);
    let budget = SearchBudget {
        restarts: 0,
        sweeps: 0,
    };
    let n = d1 * d2;
    let inside = &q * gaussian_matrix(&mut rng, n, n) * &p;
    let member = ref_e_membership(&s, d1, d2, &inside, &seeds, budget, mem, &mut rng)?;
    let outside = gaussian_matrix(&mut rng, n, n);
    let non_member = ref_e_membership(&s, d1, d2, &outside, &seeds, budget, mem, &mut rng)?;
    Ok(Outcome::bound(worst, 1e-20)
        .and(!seeds.is_empty(), "at least one annihilator")
        .and(member.pass, "Q X P passes")
        .and(!non_member.pass, "a generic operator fails")
        .param("dims", (d1, d2))
        .witness(serde_json::json!({ "annihilators": seeds.len() })))
}

fn annihilator_search(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let (rank, mem) = (ctx.config.tolerances.rank, ctx.config.tolerances.membership);
    let (d1, d2) = (2, 3);
    let mut rng = ctx.rng("search");
    let (p, q, s) = qxp_family(d1, d2, rank)?;
    let n = d1 * d2;
    let inside = &q * gaussian_matrix(&mut rng, n, n) * &p;
    let budget = SearchBudget::default();
    let v = ref_e_membership(&s, d1, d2, &inside, &[], budget, mem, &mut rng)?;
    Ok(Outcome::flag(v.pass && !v.vacuous && v.searched >= 1)
        .param("restarts", budget.restarts)
        .param("sweeps", budget.sweeps)
        .witness(serde_json::json!({ "found": v.searched, "max_value": v.max_value })))
}
