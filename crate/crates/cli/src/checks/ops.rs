use hoplab_core::hgroup::Letter;
use hoplab_core::linalg::{max_abs, CMatrix, CVector};
use hoplab_core::ops::{
    gen, q_proj, rho_conj, tensor, torus_unitary, word_op, LabeledOperator, Move, Side,
};
use hoplab_core::rng::gaussian_matrix;
use num_complex::Complex64;

use super::{worst, CheckDef, Ctx, Outcome};
use crate::config::Suite;

pub fn checks() -> Vec<CheckDef> {
    vec![
        CheckDef::new(
            "ops.lr_commutation",
            Suite::Ops,
            "left and right generators commute on interior vectors",
            lr_commutation,
        )
        .needs(1, 1),
        CheckDef::new(
            "ops.generator_actions",
            Suite::Ops,
            "compressed generators move basis vectors by the group action",
            generator_actions,
        ),
        CheckDef::new(
            "ops.gauge",
            Suite::Ops,
            "gauge unitaries, their conjugation action and the block projections",
            gauge,
        ),
        CheckDef::new(
            "ops.words",
            Suite::Ops,
            "compressed letter words agree with products of compressed letters on interior columns",
            words,
        )
        .needs(2, 2),
    ]
}

/// `M v` for a vector with few nonzero entries.
fn sparse_apply(m: &CMatrix, v: &CVector) -> CVector {
    let mut out = CVector::zeros(m.nrows());
    for (j, c) in v.iter().enumerate() {
        if *c != Complex64::new(0.0, 0.0) {
            out.axpy(*c, &m.column(j).into_owned(), Complex64::new(1.0, 0.0));
        }
    }
    out
}

fn lr_commutation(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let win = ctx.window();
    let letters = [Letter::U, Letter::V, Letter::W];
    let left: Vec<CMatrix> = letters
        .iter()
        .map(|l| gen(Side::Left, *l, &win).matrix)
        .collect();
    let right: Vec<CMatrix> = letters
        .iter()
        .map(|l| gen(Side::Right, *l, &win).matrix)
        .collect();
    let interior = win.interior(2);
    let mut dev: f64 = 0.0;
    for l in &left {
        for r in &right {
            for x in &interior {
                let e = win
                    .basis_vector(x)
                    .expect("interior vectors lie in the window");
                let a = sparse_apply(l, &sparse_apply(r, &e));
                let b = sparse_apply(r, &sparse_apply(l, &e));
                dev = dev.max(hoplab_core::linalg::max_abs_vec(&(a - b)));
            }
        }
    }
    Ok(Outcome::bound(dev, 1e-12)
        .param("window", win.to_string())
        .param("pairs", 9)
        .param("interior_vectors", interior.len()))
}

fn generator_actions(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let win = ctx.window();
    let mut wrong = 0usize;
    for mv in Move::ALL {
        let (side, letter) = match mv {
            Move::Left(l) => (Side::Left, l),
            Move::Right(l) => (Side::Right, l),
        };
        let m = gen(side, letter, &win).matrix;
        for (j, x) in win.enumerate().enumerate() {
            let image = mv.apply(&x)?;
            for i in 0..win.len() {
                let expected = match win.index_of(&image) {
                    Some(t) if t == i => 1.0,
                    _ => 0.0,
                };
                if m[(i, j)] != Complex64::new(expected, 0.0) {
                    wrong += 1;
                }
            }
        }
    }
    Ok(Outcome::bound(wrong as f64, 0.0).param("window", win.to_string()))
}

fn gauge(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let win = ctx.clipped(6, 3, 3);
    let mut rng = ctx.rng("operator");
    let a = LabeledOperator::on_window(&win, gaussian_matrix(&mut rng, win.len(), win.len()), "G")?;
    let id = CMatrix::identity(win.len(), win.len());
    let mut devs = Vec::new();
    for (s, t) in [(0.3, -1.1), (2.0, 0.7), (-0.4, 3.0)] {
        let w = torus_unitary(s, t, &win).matrix;
        devs.push(max_abs(&(&w * w.adjoint() - &id)));
        let direct = &w * &a.matrix * w.adjoint();
        devs.push(max_abs(&(rho_conj(&a, s, t)?.matrix - direct)));
    }
    let mut total = CMatrix::zeros(win.len(), win.len());
    for k in 0..=win.u_max {
        for m in 0..=win.v_max {
            let q = q_proj(k, m, &win)?.matrix;
            devs.push(max_abs(&(&q * &q - &q)));
            total += q;
        }
    }
    devs.push(max_abs(&(total - id)));
    Ok(Outcome::bound(worst(devs), 1e-12).param("window", win.to_string()))
}

fn words(ctx: &Ctx) -> anyhow::Result<Outcome> {
    let win = ctx.clipped(6, 4, 4);
    let letters = [
        [Letter::U, Letter::V],
        [Letter::V, Letter::U],
        [Letter::W, Letter::U],
    ];
    let mut dev: f64 = 0.0;
    for side in [Side::Left, Side::Right] {
        for word in &letters {
            let whole = word_op(side, word, &win)?.matrix;
            let a = gen(side, word[0], &win).matrix;
            let b = gen(side, word[1], &win).matrix;
            // left words act as g h, right words as x g h, i.e. R_h after R_g
            let prod = match side {
                Side::Left => &a * &b,
                Side::Right => &b * &a,
            };
            for x in win.interior(2) {
                let j = win
                    .index_of(&x)
                    .expect("interior vectors lie in the window");
                dev = dev.max(hoplab_core::linalg::max_abs_vec(
                    &(whole.column(j) - prod.column(j)).into_owned(),
                ));
            }
        }
    }
    let t = tensor(&CMatrix::identity(2, 2), &CMatrix::identity(3, 3));
    dev = dev.max(max_abs(&(t - CMatrix::identity(6, 6))));
    Ok(Outcome::bound(dev, 1e-12).param("window", win.to_string()))
}
