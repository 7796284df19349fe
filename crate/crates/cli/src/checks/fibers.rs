use hoplab_core::fibers::{
    a_xi, commutation_defect, fiber_action_defect, fiber_coefficient_structure, fiber_generator,
    fiber_separation, sample_points, FiberPoint,
};
use hoplab_core::hgroup::{Letter, NormalForm};
use hoplab_core::linalg::{max_abs, CMatrix};

use super::{worst, CheckDef, Ctx, Outcome};
use crate::config::Suite;

/// Eight rotated roots of unity plus four random points.
fn points(ctx: &Ctx) -> Vec<FiberPoint> {
    sample_points(&mut ctx.rng("points"), 4)
}

pub fn checks() -> Vec<CheckDef> {
    vec![
        CheckDef::new(
            "fibers.actions",
            Suite::Fibers,
            "fiber generators act on monomials by the left group action; A_ξ is a unitary character",
            actions,
        ),
        CheckDef::new(
            "fibers.commutation",
            Suite::Fibers,
            "A_ξ S = ξ̄ S A_ξ, and the fiber generators satisfy uv = w vu",
            commutation,
        ),
        CheckDef::new(
            "fibers.coefficients",
            Suite::Fibers,
            "coefficients of the fiber algebra lie in span{A_ξ^n S^j} and rebuild the algebra",
            coefficients,
        ),
        CheckDef::new(
            "fibers.separation",
            Suite::Fibers,
            "distinct fibers have distinct coefficient spaces",
            separation,
        ),
    ]
}

fn actions(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let d = ctx.config.fiber_degree;
    let pts = points(ctx);
    let mut monomials = Vec::new();
    for n in -3..=3 {
        for k in 0..d as i64 - 1 {
            for m in 0..d as i64 - 1 {
                monomials.push(NormalForm::new(n, k, m));
            }
        }
    }
    let mut devs = Vec::new();
    for p in &pts {
        for letter in Letter::ALL {
            devs.push(fiber_action_defect(letter, *p, &monomials, d)?);
        }
        let a = a_xi(*p, d);
        devs.push(max_abs(&(&a * a.adjoint() - CMatrix::identity(d, d))));
        for q in &pts {
            let pq = FiberPoint::from_angle(p.xi.arg() + q.xi.arg());
            devs.push(max_abs(&(&a * a_xi(*q, d) - a_xi(pq, d))));
        }
    }
    Ok(Outcome::bound(worst(devs), 1e-12)
        .param("points", pts.len())
        .param("degree", d))
}

fn commutation(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let d = ctx.config.fiber_degree;
    let pts = points(ctx);
    let mut devs = Vec::new();
    for p in &pts {
        devs.push(commutation_defect(*p, d));
        let u = fiber_generator(Letter::U, *p, d);
        let v = fiber_generator(Letter::V, *p, d);
        let w = fiber_generator(Letter::W, *p, d);
        devs.push(max_abs(&(&u * &v - w * &v * &u)));
    }
    Ok(Outcome::bound(worst(devs), 1e-12)
        .param("points", pts.len())
        .param("degree", d))
}

fn coefficients(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let d = ctx.config.fiber_degree;
    let tol = 1e-9;
    let pts = points(ctx);
    let mut rng = ctx.rng("elements");
    let mut devs = Vec::new();
    let mut dims = Vec::new();
    // one rotated root of unity and one random point
    for p in pts.iter().step_by(8) {
        let rep = fiber_coefficient_structure(*p, 2 * d, d, 2, tol, &mut rng)?;
        devs.push(rep.coefficient_residual.max(rep.rebuild_residual));
        dims.push(rep.algebra_dim);
    }
    let full = dims.iter().all(|&n| n == d * d);
    Ok(Outcome::bound(worst(devs), tol)
        .and(full, "fiber algebra dimension d^2")
        .param("points", dims.len())
        .param("degree", d)
        .witness(serde_json::json!({ "algebra_dims": dims })))
}

fn separation(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let d = ctx.config.fiber_degree.min(8);
    let tol = ctx.config.tolerances.rank;
    let pts = points(ctx);
    let mut wrong = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            let sep = fiber_separation(*p, *q, 3, d, tol)?;
            let differs = (1..=3).any(|n| (p.pow(n) - q.pow(n)).norm() > 1e-6);
            if sep.is_some() != differs {
                wrong.push((p.xi.arg(), q.xi.arg()));
            }
        }
    }
    let mut o = Outcome::bound(wrong.len() as f64, 0.0)
        .param("points", pts.len())
        .param("degree", d);
    if !wrong.is_empty() {
        o = o.witness(wrong);
    }
    Ok(o)
}
