use hoplab_core::averaging::{
    adjoint_phi_identity_check, coefficient_criterion_space, diag_expect, extract_symbols, phi,
    phi_quadrature, phi_quadrature_unchecked, poisson_smooth, quadrature_threshold, random_table,
    toeplitz_tensor_span, vacuum_table, CoeffTable, TableShape,
};
use hoplab_core::hulls::span_close;
use hoplab_core::linalg::{
    mat_power, matrix_unit, max_abs, max_abs_vec, op_norm, CMatrix, CVector,
};
use hoplab_core::ops::{shift, tensor, LabeledOperator, Window};
use hoplab_core::rng::gaussian_matrix;
use hoplab_core::Error;

use super::{worst, CheckDef, Ctx, Outcome};
use crate::config::Suite;

const TABLES: usize = 10;

pub fn checks() -> Vec<CheckDef> {
    vec![
        CheckDef::new(
            "averaging.quadrature",
            Suite::Averaging,
            "torus quadrature reproduces the block averages; too few nodes alias",
            quadrature,
        )
        .needs(1, 1),
        CheckDef::new(
            "averaging.partition_smoothing",
            Suite::Averaging,
            "the block averages sum to A; Poisson smoothing contracts and converges",
            partition_smoothing,
        ),
        CheckDef::new(
            "averaging.symbols",
            Suite::Averaging,
            "symbols read from the averages rebuild A; no mass in negative degrees; adjoint identity",
            symbols,
        )
        .needs(1, 1),
        CheckDef::new(
            "averaging.vacuum",
            Suite::Averaging,
            "A is determined by its vacuum column",
            vacuum,
        )
        .needs(1, 1),
        CheckDef::new(
            "averaging.fourier_calculus",
            Suite::Averaging,
            "Fourier coefficients of S^k ⊗ A; coefficient criterion equals the Toeplitz tensor span",
            fourier_calculus,
        ),
        CheckDef::new(
            "averaging.expectations",
            Suite::Averaging,
            "diagonal expectations read subdiagonals",
            expectations,
        ),
    ]
}

fn shape(win: &Window, max_degree: i64) -> TableShape {
    TableShape {
        max_k: win.u_max.min(2),
        max_m: win.v_max.min(2),
        max_degree,
        entries: 4,
    }
}

/// Largest interior-column difference.
fn interior_diff(a: &CMatrix, b: &CMatrix, win: &Window, margin: usize) -> f64 {
    win.interior(margin)
        .iter()
        .map(|x| {
            let j = win.index_of(x).expect("interior points lie in the window");
            max_abs_vec(&(a.column(j) - b.column(j)).into_owned())
        })
        .fold(0.0, f64::max)
}

fn quadrature(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let win = ctx.clipped(5, 3, 3);
    let mut rng = ctx.rng("tables");
    let (ns, nt) = quadrature_threshold(&win);
    let mut dev: f64 = 0.0;
    for _ in 0..TABLES {
        let a = random_table(&mut rng, shape(&win, 3)).reconstruct(&win);
        for p in -win.u_max..=win.u_max {
            for q in -win.v_max..=win.v_max {
                let exact = phi(&a, p, q)?.matrix;
                let quad = phi_quadrature(&a, p, q, ns, nt)?.matrix;
                dev = dev.max(max_abs(&(exact - quad)));
            }
        }
    }
    // one node short: refused, and the unguarded average picks up an alias
    let probe = hoplab_core::ops::gen(
        hoplab_core::ops::Side::Left,
        hoplab_core::hgroup::Letter::U,
        &win,
    )
    .adjoint()
    .power(win.u_max as u32);
    let refused = matches!(
        phi_quadrature(&probe, win.u_max, 0, ns - 1, nt),
        Err(Error::TooFewNodes { .. })
    );
    let aliased = phi_quadrature_unchecked(&probe, win.u_max, 0, ns - 1, nt)?.matrix;
    let alias = max_abs(&(aliased - phi(&probe, win.u_max, 0)?.matrix));
    Ok(Outcome::bound(dev, 1e-10)
        .and(refused, "node count below threshold was accepted")
        .and(alias > 0.5, "no aliasing below threshold")
        .param("window", win.to_string())
        .param("tables", TABLES)
        .param("nodes", (ns, nt))
        .witness(serde_json::json!({ "alias_deviation": alias })))
}

fn partition_smoothing(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let win = ctx.clipped(6, 3, 3);
    let mut rng = ctx.rng("operator");
    let a = LabeledOperator::on_window(&win, gaussian_matrix(&mut rng, win.len(), win.len()), "G")?;
    let mut total = CMatrix::zeros(win.len(), win.len());
    for p in -win.u_max..=win.u_max {
        for q in -win.v_max..=win.v_max {
            total += phi(&a, p, q)?.matrix;
        }
    }
    let partition = max_abs(&(total - &a.matrix));
    let na = op_norm(&a.matrix);
    let mut contracts = true;
    for r in [0.3, 0.9, 0.99] {
        contracts &= op_norm(&poisson_smooth(&a, r)?.matrix) <= na * (1.0 + 1e-12);
    }
    let gaps: Vec<f64> = [0.9, 0.99, 0.999]
        .iter()
        .map(|r| Ok(op_norm(&(&a.matrix - poisson_smooth(&a, *r)?.matrix))))
        .collect::<anyhow::Result<_>>()?;
    let decreasing = gaps.windows(2).all(|g| g[1] < g[0]);
    Ok(Outcome::bound(partition, 1e-13)
        .and(contracts, "||A_r|| <= ||A||")
        .and(decreasing, "||A - A_r|| decreasing")
        .param("window", win.to_string())
        .param("radii", [0.3, 0.9, 0.99])
        .witness(serde_json::json!({ "gaps": gaps })))
}

fn symbols(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let win = ctx.clipped(8, 3, 3);
    let mut rng = ctx.rng("tables");
    let (mut rebuild, mut table_diff, mut negative, mut adjoint) = (0f64, 0f64, 0f64, 0f64);
    for _ in 0..TABLES {
        let t = random_table(&mut rng, shape(&win, 2));
        let a = t.reconstruct(&win);
        let ex = extract_symbols(&a, 2, 1e-10)?;
        rebuild = rebuild.max(interior_diff(
            &ex.table.reconstruct(&win).matrix,
            &a.matrix,
            &win,
            2,
        ));
        table_diff = table_diff.max(ex.table.max_diff(&t));
        negative = negative.max(ex.negative_mass);
        adjoint = adjoint.max(adjoint_phi_identity_check(&a)?);
    }
    Ok(Outcome::bound(rebuild, 1e-10)
        .and(negative <= 1e-12, "negative-degree mass")
        .and(adjoint <= 1e-12, "adjoint identity")
        .and(table_diff <= 1e-10, "extracted table")
        .param("window", win.to_string())
        .param("tables", TABLES)
        .witness(serde_json::json!({
            "negative_mass": negative,
            "adjoint_deviation": adjoint,
            "table_deviation": table_diff,
        })))
}

fn vacuum(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let win = ctx.clipped(8, 3, 3);
    let mut rng = ctx.rng("tables");
    let mut dev: f64 = 0.0;
    for _ in 0..TABLES {
        let a = random_table(&mut rng, shape(&win, 2)).reconstruct(&win);
        let read: CoeffTable = vacuum_table(&a, 0.0)?;
        dev = dev.max(interior_diff(
            &read.reconstruct(&win).matrix,
            &a.matrix,
            &win,
            2,
        ));
    }
    Ok(Outcome::bound(dev, 1e-10)
        .param("window", win.to_string())
        .param("tables", TABLES))
}

fn fourier_calculus(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let (d1, d2) = (5, 3);
    let mut rng = ctx.rng("coefficients");
    let a = gaussian_matrix(&mut rng, d2, d2);
    let s = shift(d1);
    let mut exact = true;
    for k in 0..d1 {
        let t = tensor(&mat_power(&s, k as u32), &a);
        for n in 0..d1 {
            let c = hoplab_core::averaging::op_fourier_coeff(&t, d1, d2, n)?;
            exact &= if n == k {
                c == a
            } else {
                c == CMatrix::zeros(d2, d2)
            };
        }
    }
    let d1 = 4;
    let diag: Vec<CMatrix> = (0..d2).map(|i| matrix_unit(d2, i, i)).collect();
    let piece = span_close(d2, &diag, ctx.config.tolerances.rank)?;
    let criterion =
        coefficient_criterion_space(d1, std::slice::from_ref(&piece), ctx.config.tolerances.rank)?;
    let span = toeplitz_tensor_span(d1, &piece)?;
    let containment = worst(
        criterion
            .basis
            .iter()
            .map(|m| span.residual(m))
            .chain(span.basis.iter().map(|m| criterion.residual(m))),
    );
    Ok(Outcome::bound(containment, 1e-9)
        .and(exact, "(S^k ⊗ A)^_n = δ_kn A")
        .and(criterion.dim() == span.dim(), "equal dimensions")
        .param("k_dim", d2)
        .param("h2_dim", d1)
        .witness(serde_json::json!({ "criterion_dim": criterion.dim(), "span_dim": span.dim() })))
}

fn expectations(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let n = 8;
    let mut rng = ctx.rng("matrix");
    let a = gaussian_matrix(&mut rng, n, n);
    let mut dev: f64 = 0.0;
    for m in 0..n {
        let e = diag_expect(&a, m)?;
        let shifted = mat_power(&shift(n).adjoint(), m as u32) * &a;
        let direct = CVector::from_fn(n - m, |j, _| shifted[(j, j)]);
        dev = dev.max(max_abs_vec(&(e - direct)));
    }
    Ok(Outcome::bound(dev, 1e-12).param("dim", n))
}
