use hoplab_core::hulls::{lat_check, MEMBERSHIP_TOL};
use hoplab_core::linalg::{c, CMatrix};
use hoplab_core::reps::{
    build_rep, density_check, lat_probe, nonreflexivity_witness, rep_algebra, thin_check, RepKind,
    RepSpec,
};

use super::{worst, CheckDef, Ctx, Outcome};
use crate::config::Suite;

pub fn checks() -> Vec<CheckDef> {
    vec![
        CheckDef::new(
            "reps.relations",
            Suite::Reps,
            "π(u)π(v) = π(w)π(v)π(u) with π(w) = λ̄ in all three models",
            relations,
        ),
        CheckDef::new(
            "reps.density_lebesgue",
            Suite::Reps,
            "the Lebesgue model generates all lower triangular matrices on a central block",
            |ctx| density(ctx, RepKind::Lebesgue),
        ),
        CheckDef::new(
            "reps.density_atomic",
            Suite::Reps,
            "the atomic model generates all lower triangular matrices on a central block",
            |ctx| density(ctx, RepKind::Atomic),
        ),
        CheckDef::new(
            "reps.duality",
            Suite::Reps,
            "the Lebesgue and atomic models have equal algebra dimensions and matching invariant chains",
            duality,
        ),
        CheckDef::new(
            "reps.thin",
            Suite::Reps,
            "E_m of the generated algebra lies in span{1, λ^j, ..., λ^(mj)}",
            thin,
        ),
        CheckDef::new(
            "reps.witness",
            Suite::Reps,
            "E_(1,0) leaves the invariant chain fixed, has thick E_1, and lies outside the generated span",
            witness,
        ),
        CheckDef::new(
            "reps.witness_ref",
            Suite::Reps,
            "pointwise Ref evidence for E_(1,0) against the generated span",
            witness_ref,
        )
        .heuristic(),
        CheckDef::new(
            "reps.lattice_probe",
            Suite::Reps,
            "cyclic subspaces of the nonreflexive model are tails of the chain",
            lattice_probe,
        ),
        CheckDef::new(
            "reps.singular_continuous",
            Suite::Reps,
            "the singular continuous case has no finite model",
            |_| Ok(Outcome::skipped("no finite model")),
        ),
    ]
}

fn spec(ctx: &Ctx, kind: RepKind) -> RepSpec {
    let mut dim = ctx.config.dim;
    if kind != RepKind::Nonreflexive && dim.is_multiple_of(2) {
        dim += 1;
    }
    RepSpec {
        theta: ctx.config.theta,
        ..RepSpec::new(kind, dim)
    }
}

fn kind_filtered(ctx: &Ctx, kind: RepKind) -> Option<Outcome> {
    match ctx.config.kind {
        Some(k) if k != kind => Some(Outcome::skipped(format!("kind filter excludes {kind:?}"))),
        _ => None,
    }
}

fn relations(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let mut devs = Vec::new();
    let mut wrong_sign = Vec::new();
    for kind in [RepKind::Lebesgue, RepKind::Atomic, RepKind::Nonreflexive] {
        if ctx.config.kind.is_some_and(|k| k != kind) {
            continue;
        }
        let rep = build_rep(spec(ctx, kind))?;
        devs.push(rep.commutation_defect(rep.pi_w));
        devs.push((rep.pi_w - rep.spec.lambda().conj()).norm());
        wrong_sign.push(rep.commutation_defect(rep.spec.lambda()));
    }
    let distinguished = wrong_sign.iter().all(|d| *d > 1e-3);
    Ok(Outcome::bound(worst(devs), 1e-12)
        .and(distinguished, "λ in place of λ̄ must fail")
        .param("theta", ctx.config.theta)
        .param("dim", ctx.config.dim)
        .witness(serde_json::json!({ "defect_with_lambda": wrong_sign })))
}

fn density(ctx: &Ctx, kind: RepKind) -> anyhow::Result<Outcome> {
    if let Some(o) = kind_filtered(ctx, kind) {
        return Ok(o);
    }
    let s = spec(ctx, kind);
    let block = 9.min(s.dim);
    let cap = ctx.config.cap().max(2 * s.dim);
    let r = density_check(s, cap, block, 1e-8)?;
    Ok(Outcome::flag(r.pass)
        .param("dim", s.dim)
        .param("block", block)
        .param("cap", cap)
        .param("rank_tol", 1e-8)
        .witness(&r)
        .detail(format!("span dimension {} of {}", r.span_dim, r.target_dim)))
}

fn duality(ctx: &Ctx) -> anyhow::Result<Outcome> {
    if ctx.config.kind.is_some_and(|k| k == RepKind::Nonreflexive) {
        return Ok(Outcome::skipped(
            "kind filter excludes the bilateral models",
        ));
    }
    let tol = ctx.config.tolerances.rank;
    let d = spec(ctx, RepKind::Lebesgue).dim.min(11);
    let a = build_rep(RepSpec {
        theta: ctx.config.theta,
        ..RepSpec::new(RepKind::Lebesgue, d)
    })?;
    let b = build_rep(RepSpec {
        theta: ctx.config.theta,
        ..RepSpec::new(RepKind::Atomic, d)
    })?;
    let da = rep_algebra(&a, 2 * d, tol)?.dim();
    let db = rep_algebra(&b, 2 * d, tol)?.dim();
    let reversal = CMatrix::from_fn(d, d, |i, j| {
        if i + j == d - 1 {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let mut chains_match = true;
    for k in 0..=d {
        let p = a.tail_projection(k);
        let pr = &reversal * &p * &reversal;
        for q in [&p, &pr] {
            chains_match &=
                lat_check(&a.generators(), q, 1e-12)? == lat_check(&b.generators(), q, 1e-12)?;
        }
    }
    Ok(Outcome::flag(da == db && chains_match)
        .param("dim", d)
        .witness(serde_json::json!({ "lebesgue_dim": da, "atomic_dim": db })))
}

fn thin(ctx: &Ctx) -> anyhow::Result<Outcome> {
    if let Some(o) = kind_filtered(ctx, RepKind::Nonreflexive) {
        return Ok(o);
    }
    let s = spec(ctx, RepKind::Nonreflexive);
    let word_cap = 6.min(s.dim.saturating_sub(1));
    let mut rng = ctx.rng("combinations");
    let r = thin_check(s, word_cap, word_cap, 4, 1e-10, &mut rng)?;
    Ok(Outcome::bound(r.max_residual.max(r.max_excess), 1e-10)
        .param("dim", s.dim)
        .param("word_len", word_cap)
        .witness(&r))
}

fn witness(ctx: &Ctx) -> anyhow::Result<Outcome> {
    if let Some(o) = kind_filtered(ctx, RepKind::Nonreflexive) {
        return Ok(o);
    }
    let s = spec(ctx, RepKind::Nonreflexive);
    let cap = ctx.config.cap();
    let mut rng = ctx.rng("ref");
    let r = nonreflexivity_witness(s, cap, 0, ctx.config.tolerances.rank, &mut rng)?;
    Ok(
        Outcome::flag(r.lattice_ok && r.e1_residual >= 0.5 && r.algebra_distance >= 0.5)
            .param("dim", s.dim)
            .param("cap", cap)
            .witness(serde_json::json!({
                "lattice_ok": r.lattice_ok,
                "e1_residual": r.e1_residual,
                "algebra_distance": r.algebra_distance,
            })),
    )
}

fn witness_ref(ctx: &Ctx) -> anyhow::Result<Outcome> {
    if let Some(o) = kind_filtered(ctx, RepKind::Nonreflexive) {
        return Ok(o);
    }
    let s = spec(ctx, RepKind::Nonreflexive);
    let cap = ctx.config.cap();
    let samples = 32;
    let mut rng = ctx.rng("ref");
    let r = nonreflexivity_witness(s, cap, samples, ctx.config.tolerances.rank, &mut rng)?;
    Ok(Outcome::flag(r.ref_evidence.pass)
        .param("dim", s.dim)
        .param("samples", samples)
        .param("membership_tol", MEMBERSHIP_TOL)
        .witness(&r.ref_evidence))
}

fn lattice_probe(ctx: &Ctx) -> anyhow::Result<Outcome> {
    if let Some(o) = kind_filtered(ctx, RepKind::Nonreflexive) {
        return Ok(o);
    }
    let s = spec(ctx, RepKind::Nonreflexive);
    let mut rng = ctx.rng("probes");
    let r = lat_probe(s, 8, 1e-8, &mut rng)?;
    Ok(Outcome::flag(r.chain_invariant && r.all_in_chain)
        .param("dim", s.dim)
        .param("probes", r.probes)
        .witness(&r))
}
