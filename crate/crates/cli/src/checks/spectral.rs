use hoplab_core::averaging::{random_table, CoeffTable, TableShape};
use hoplab_core::hgroup::NormalForm;
use hoplab_core::ops::{TrigPoly, Window};
use hoplab_core::rng::{complex_gaussian, LabRng};
use hoplab_core::spectral::{
    leading_term, lower_order_mass, matrix_element_check, spectral_lower_bound, word_correction,
};
use hoplab_core::Error;
use num_complex::Complex64;
use rand::Rng;

use super::{CheckDef, Ctx, Outcome};
use crate::config::Suite;

const INSTANCES: usize = 20;
const ATTEMPTS: usize = 2000;

pub fn checks() -> Vec<CheckDef> {
    vec![
        CheckDef::new(
            "spectral.leading_terms",
            Suite::Spectral,
            "leading term order and the phase of (u^k v^m)^n",
            leading_terms,
        ),
        CheckDef::new(
            "spectral.matrix_elements",
            Suite::Spectral,
            "leading matrix element of A^n equals <f^n φ g, h>; lower blocks vanish",
            matrix_elements,
        )
        .needs(1, 1),
        CheckDef::new(
            "spectral.norm_growth",
            Suite::Spectral,
            "||A^n||^(1/n) >= ||f_(k0,m0)||_∞ for monomial leading symbols",
            norm_growth,
        )
        .needs(1, 1),
        CheckDef::new(
            "spectral.certificate",
            Suite::Spectral,
            "||A^n||^(1/n) dominates the exact section of f^n φ",
            certificate,
        )
        .needs(1, 1),
        CheckDef::new(
            "spectral.literal_bound_general",
            Suite::Spectral,
            "||A^n||^(1/n) >= ||f_(k0,m0)||_∞ on truncations with general leading symbols",
            literal_bound_general,
        )
        .heuristic()
        .needs(1, 1),
    ]
}

fn leading_terms(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let mut wrong = 0usize;
    for k0 in 0..=8i64 {
        for m0 in 0..=8i64 {
            let mut acc = NormalForm::IDENTITY;
            for n in 1..=8u64 {
                acc = acc.multiply(&NormalForm::new(0, k0, m0))?;
                if word_correction(k0, m0, n)? != TrigPoly::zeta(acc.n) {
                    wrong += 1;
                }
            }
        }
    }
    let mut rng = ctx.rng("tables");
    for _ in 0..100 {
        let t = random_table(
            &mut rng,
            TableShape {
                max_k: 3,
                max_m: 3,
                max_degree: 0,
                entries: 4,
            },
        );
        let lt = leading_term(&t)?;
        if t.support()
            .iter()
            .any(|(k, m)| k + m < lt.rho || (k + m == lt.rho && *k < lt.k0))
        {
            wrong += 1;
        }
    }
    Ok(Outcome::bound(wrong as f64, 0.0).param("tables", 100))
}

fn random_poly(rng: &mut LabRng, lo: i64, hi: i64) -> TrigPoly {
    TrigPoly::from_terms((lo..=hi).map(|d| (d, complex_gaussian(rng))))
}

fn matrix_elements(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let win = ctx.clipped(12, 4, 4);
    let mut rng = ctx.rng("instances");
    let (mut dev, mut lower) = (0f64, 0f64);
    let mut found = 0usize;
    let mut tried = 0usize;
    let mut worst_instance = None;
    while found < INSTANCES && tried < ATTEMPTS {
        tried += 1;
        let t = random_table(
            &mut rng,
            TableShape {
                max_k: 1,
                max_m: 1,
                max_degree: 1,
                entries: 3,
            },
        );
        let n = rng.random_range(1..=4u32);
        let g = random_poly(&mut rng, -1, 1);
        let h = random_poly(&mut rng, win.w_min, win.w_max);
        let r = match matrix_element_check(&t, n, &g, &h, &win) {
            Ok(r) => r,
            Err(Error::WindowTooSmall(_)) => continue,
            Err(e) => return Err(e.into()),
        };
        found += 1;
        if r.deviation > dev {
            dev = r.deviation;
            worst_instance = Some(serde_json::json!({ "table": t, "n": n, "g": g, "h": h }));
        }
        lower = lower.max(lower_order_mass(&t, n, &g, &win)?);
    }
    let mut o = Outcome::bound(dev, 1e-10)
        .and(lower <= 1e-12, "lower-order matrix elements vanish")
        .and(found == INSTANCES, "enough admissible instances")
        .param("window", win.to_string())
        .param("instances", found)
        .param("attempts", tried)
        .detail(format!("lower-order mass {lower:.3e}"));
    if let Some(w) = worst_instance {
        o = o.witness(w);
    }
    Ok(o)
}

/// Random lower-order terms under a monomial leading symbol `c ζ^d`.
fn monomial_table(rng: &mut LabRng, win: &Window) -> CoeffTable {
    let k0 = rng.random_range(0..=1i64);
    let m0 = if k0 == 0 {
        1
    } else {
        rng.random_range(0..=1i64)
    };
    let mut t = CoeffTable::single(
        k0,
        m0,
        TrigPoly::monomial(rng.random_range(-1..=1), complex_gaussian(rng)),
    );
    for _ in 0..2 {
        let k = rng.random_range(k0..=win.u_max.min(2));
        let m = rng.random_range(m0..=win.v_max.min(2));
        if k + m > k0 + m0 {
            t.insert(k, m, random_poly(rng, -1, 1));
        }
    }
    t
}

fn growth_tables(ctx: &Ctx, win: &Window) -> Vec<CoeffTable> {
    let mut rng = ctx.rng("monomial");
    let mut tables = vec![CoeffTable::single(
        1,
        0,
        TrigPoly::monomial(0, Complex64::new(2.0, 0.0)),
    )];
    tables.extend((0..8).map(|_| monomial_table(&mut rng, win)));
    tables
}

fn growth(
    ctx: &Ctx,
    tables: &[CoeffTable],
    win: &Window,
    literal: bool,
) -> anyhow::Result<Outcome> {
    let tol = 1e-8;
    let mut margin = f64::INFINITY;
    let mut reports = 0usize;
    let mut failure = None;
    for t in tables {
        let rep = match spectral_lower_bound(t, ctx.config.nmax, win, tol) {
            Ok(r) => r,
            Err(Error::WindowTooSmall(_)) => continue,
            Err(e) => return Err(e.into()),
        };
        reports += 1;
        for s in &rep.steps {
            let m = if literal {
                s.norm_root - rep.bound
            } else {
                s.norm_root - s.witness_root
            };
            if m < margin {
                margin = m;
            }
        }
        let holds = if literal {
            rep.bound_holds()
        } else {
            rep.certificate_holds()
        };
        if !holds && failure.is_none() {
            failure = Some(serde_json::json!({ "table": t, "report": rep }));
        }
    }
    let mut o = Outcome::flag(failure.is_none() && reports > 0)
        .param("window", win.to_string())
        .param("nmax", ctx.config.nmax)
        .param("tables", tables.len())
        .param("reported", reports)
        .detail(format!("worst margin {margin:.3e}"));
    o.deviation = Some(if margin.is_finite() {
        (-margin).max(0.0)
    } else {
        0.0
    });
    o.tolerance = Some(tol);
    if let Some(w) = failure {
        o = o.witness(w);
    }
    Ok(o)
}

fn norm_growth(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let win = ctx.clipped(8, 4, 4);
    growth(ctx, &growth_tables(ctx, &win), &win, true)
}

fn general_tables(ctx: &Ctx) -> Vec<CoeffTable> {
    let mut rng = ctx.rng("general");
    (0..8)
        .map(|_| {
            random_table(
                &mut rng,
                TableShape {
                    max_k: 1,
                    max_m: 1,
                    max_degree: 1,
                    entries: 2,
                },
            )
        })
        .collect()
}

fn certificate(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let win = ctx.clipped(8, 4, 4);
    let mut tables = growth_tables(ctx, &win);
    tables.extend(general_tables(ctx));
    growth(ctx, &tables, &win, false)
}

fn literal_bound_general(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let win = ctx.clipped(8, 4, 4);
    growth(ctx, &general_tables(ctx), &win, true)
}
