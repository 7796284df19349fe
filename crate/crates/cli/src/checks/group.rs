use hoplab_core::hgroup::{parse_word, Letter, NormalForm, UnitriangularMatrix};
use hoplab_core::Error;
use rand::Rng;

use super::{CheckDef, Ctx, Outcome};
use crate::config::Suite;

pub fn checks() -> Vec<CheckDef> {
    vec![
        CheckDef::new(
            "group.matrix_oracle",
            Suite::Group,
            "normal-form product agrees with 3x3 unitriangular matrices and is associative",
            matrix_oracle,
        ),
        CheckDef::new(
            "group.normal_forms",
            Suite::Group,
            "word parsing, uv = w vu, centrality of w, inverses and powers",
            normal_forms,
        ),
    ]
}

fn random_element<R: Rng>(rng: &mut R) -> NormalForm {
    NormalForm::new(
        rng.random_range(-1_000_000..=1_000_000),
        rng.random_range(-1000..=1000),
        rng.random_range(-1000..=1000),
    )
}

fn matrix_oracle(ctx: &Ctx) -> anyhow::Result<Outcome> {
    const PAIRS: usize = 100_000;
    let mut rng = ctx.rng("elements");
    let mut mismatches = 0usize;
    let mut witness = None;
    for _ in 0..PAIRS {
        let (a, b) = (random_element(&mut rng), random_element(&mut rng));
        let fast = a.multiply(&b)?;
        let slow = UnitriangularMatrix::from_normal_form(&a)?
            .mul(&UnitriangularMatrix::from_normal_form(&b)?)?
            .to_normal_form()?;
        if fast != slow {
            mismatches += 1;
            witness.get_or_insert((a, b));
        }
    }
    let mut non_assoc = 0usize;
    for _ in 0..PAIRS {
        let (a, b, c) = (
            random_element(&mut rng),
            random_element(&mut rng),
            random_element(&mut rng),
        );
        if a.multiply(&b)?.multiply(&c)? != a.multiply(&b.multiply(&c)?)? {
            non_assoc += 1;
        }
    }
    let mut o = Outcome::bound((mismatches + non_assoc) as f64, 0.0)
        .param("pairs", PAIRS)
        .param("triples", PAIRS)
        .detail(format!(
            "{mismatches} oracle mismatches, {non_assoc} associativity failures"
        ));
    if let Some(w) = witness {
        o = o.witness(w);
    }
    Ok(o)
}

fn normal_forms(_ctx: &Ctx) -> anyhow::Result<Outcome> {
    let mut failures = Vec::new();
    let mut expect = |ok: bool, what: &str| {
        if !ok {
            failures.push(what.to_string());
        }
    };
    let uv = parse_word("uv")?;
    let vu = parse_word("vu")?;
    expect(uv == NormalForm::new(0, 1, 1), "uv = u^1 v^1");
    expect(vu == NormalForm::new(-1, 1, 1), "vu = w^-1 u v");
    expect(parse_word("wvu")? == uv, "uv = w vu");
    expect(
        parse_word("u u v W")? == NormalForm::new(-1, 2, 1),
        "u u v W",
    );
    expect(parse_word("")? == NormalForm::IDENTITY, "empty word");
    expect(
        parse_word("uvx")
            == Err(Error::Parse {
                position: 2,
                token: 'x',
            }),
        "parse error position",
    );
    let w = Letter::W.element();
    for word in ["u", "v", "vvu", "uWv"] {
        let g = parse_word(word)?;
        expect(g.multiply(&w)? == w.multiply(&g)?, "w is central");
        expect(
            g.multiply(&g.inverse()?)? == NormalForm::IDENTITY,
            "inverse",
        );
        let mut acc = NormalForm::IDENTITY;
        for _ in 0..7 {
            acc = acc.multiply(&g)?;
        }
        expect(g.power(7)? == acc, "power");
    }
    Ok(Outcome::bound(failures.len() as f64, 0.0).detail(failures.join(", ")))
}
