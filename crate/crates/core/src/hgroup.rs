//! Exact arithmetic in the discrete Heisenberg group and its positive
//! semigroup.
//!
//! Elements are stored in the normal form `w^n u^k v^m` with `w` central and
//! `uv = wvu`. The group law on normal forms is
//! `(n1,k1,m1)(n2,k2,m2) = (n1 + n2 - m1 k2, k1 + k2, m1 + m2)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `w^n u^k v^m`. In the semigroup `k, m >= 0`; see [`NormalForm::is_positive`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NormalForm {
    pub n: i64,
    pub k: i64,
    pub m: i64,
}

/// Generator letters. `WInv` is `w^{-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Letter {
    U,
    V,
    W,
    WInv,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::U, Letter::V, Letter::W, Letter::WInv];

    pub fn element(self) -> NormalForm {
        match self {
            Letter::U => NormalForm::new(0, 1, 0),
            Letter::V => NormalForm::new(0, 0, 1),
            Letter::W => NormalForm::new(1, 0, 0),
            Letter::WInv => NormalForm::new(-1, 0, 0),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Letter::U => 'u',
            Letter::V => 'v',
            Letter::W => 'w',
            Letter::WInv => 'W',
        }
    }
}

impl NormalForm {
    pub const IDENTITY: NormalForm = NormalForm { n: 0, k: 0, m: 0 };

    pub const fn new(n: i64, k: i64, m: i64) -> Self {
        Self { n, k, m }
    }

    /// Membership in the positive semigroup.
    pub fn is_positive(&self) -> bool {
        self.k >= 0 && self.m >= 0
    }

    pub fn multiply(&self, rhs: &NormalForm) -> Result<NormalForm> {
        let cross = self
            .m
            .checked_mul(rhs.k)
            .ok_or(Error::Overflow("multiply"))?;
        let n = self
            .n
            .checked_add(rhs.n)
            .and_then(|s| s.checked_sub(cross))
            .ok_or(Error::Overflow("multiply"))?;
        let k = self
            .k
            .checked_add(rhs.k)
            .ok_or(Error::Overflow("multiply"))?;
        let m = self
            .m
            .checked_add(rhs.m)
            .ok_or(Error::Overflow("multiply"))?;
        Ok(NormalForm { n, k, m })
    }

    /// `p`-fold product by binary powering.
    pub fn power(&self, p: u64) -> Result<NormalForm> {
        let mut acc = NormalForm::IDENTITY;
        let mut base = *self;
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.multiply(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.multiply(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn inverse(&self) -> Result<NormalForm> {
        // (n,k,m)^{-1} = (-n - k m, -k, -m)
        let km = self
            .k
            .checked_mul(self.m)
            .ok_or(Error::Overflow("inverse"))?;
        let n = self
            .n
            .checked_neg()
            .and_then(|x| x.checked_sub(km))
            .ok_or(Error::Overflow("inverse"))?;
        Ok(NormalForm {
            n,
            k: self.k.checked_neg().ok_or(Error::Overflow("inverse"))?,
            m: self.m.checked_neg().ok_or(Error::Overflow("inverse"))?,
        })
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w^{} u^{} v^{}", self.n, self.k, self.m)
    }
}

pub fn multiply(a: &NormalForm, b: &NormalForm) -> Result<NormalForm> {
    a.multiply(b)
}

pub fn power(a: &NormalForm, p: u64) -> Result<NormalForm> {
    a.power(p)
}

/// Left-to-right product of the letters in `text`; whitespace is ignored.
/// Tokens: `u`, `v`, `w`, and `W` for `w^{-1}`.
pub fn parse_word(text: &str) -> Result<NormalForm> {
    let mut acc = NormalForm::IDENTITY;
    for letter in parse_letters(text)? {
        acc = acc.multiply(&letter.element())?;
    }
    Ok(acc)
}

pub fn parse_letters(text: &str) -> Result<Vec<Letter>> {
    let mut out = Vec::new();
    for (position, ch) in text.chars().enumerate() {
        let letter = match ch {
            'u' => Letter::U,
            'v' => Letter::V,
            'w' => Letter::W,
            'W' => Letter::WInv,
            c if c.is_whitespace() => continue,
            token => return Err(Error::Parse { position, token }),
        };
        out.push(letter);
    }
    Ok(out)
}

/// Left translation `x -> g x`.
pub fn left_action(g: &NormalForm, x: &NormalForm) -> Result<NormalForm> {
    g.multiply(x)
}

/// Right translation `x -> x g`.
pub fn right_action(x: &NormalForm, g: &NormalForm) -> Result<NormalForm> {
    x.multiply(g)
}

/// The 3x3 upper unitriangular integer matrix `[[1,k,n+km],[0,1,m],[0,0,1]]`.
///
/// Multiplication here is plain matrix multiplication, so it serves as an
/// independent model of the group law on normal forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnitriangularMatrix(pub [[i64; 3]; 3]);

impl UnitriangularMatrix {
    pub fn from_normal_form(x: &NormalForm) -> Result<Self> {
        let top =
            x.k.checked_mul(x.m)
                .and_then(|km| km.checked_add(x.n))
                .ok_or(Error::Overflow("matrix embedding"))?;
        Ok(Self([[1, x.k, top], [0, 1, x.m], [0, 0, 1]]))
    }

    pub fn to_normal_form(&self) -> Result<NormalForm> {
        let [[_, k, top], [_, _, m], _] = self.0;
        let km = k.checked_mul(m).ok_or(Error::Overflow("matrix readback"))?;
        Ok(NormalForm::new(
            top.checked_sub(km)
                .ok_or(Error::Overflow("matrix readback"))?,
            k,
            m,
        ))
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        let mut out = [[0i64; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut acc: i64 = 0;
                for l in 0..3 {
                    let t = self.0[i][l]
                        .checked_mul(rhs.0[l][j])
                        .ok_or(Error::Overflow("matrix product"))?;
                    acc = acc
                        .checked_add(t)
                        .ok_or(Error::Overflow("matrix product"))?;
                }
                *cell = acc;
            }
        }
        Ok(Self(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn via_matrices(a: &NormalForm, b: &NormalForm) -> NormalForm {
        let ma = UnitriangularMatrix::from_normal_form(a).unwrap();
        let mb = UnitriangularMatrix::from_normal_form(b).unwrap();
        ma.mul(&mb).unwrap().to_normal_form().unwrap()
    }

    #[test]
    fn left_translation_by_v() {
        for (n, k, m) in [(0, 0, 0), (3, 2, 1), (-4, 5, 0)] {
            let x = NormalForm::new(n, k, m);
            assert_eq!(
                Letter::V.element().multiply(&x).unwrap(),
                NormalForm::new(n - k, k, m + 1)
            );
        }
    }

    #[test]
    fn identity_is_two_sided() {
        let x = NormalForm::new(5, 2, 3);
        assert_eq!(NormalForm::IDENTITY.multiply(&x).unwrap(), x);
        assert_eq!(x.multiply(&NormalForm::IDENTITY).unwrap(), x);
    }

    #[test]
    fn v_times_u() {
        let vu = NormalForm::new(0, 0, 1)
            .multiply(&NormalForm::new(0, 1, 0))
            .unwrap();
        assert_eq!(vu, NormalForm::new(-1, 1, 1));
        assert_eq!(
            vu,
            via_matrices(&NormalForm::new(0, 0, 1), &NormalForm::new(0, 1, 0))
        );
    }

    #[test]
    fn powers_of_uv() {
        let uv = NormalForm::new(0, 1, 1);
        assert_eq!(uv.power(2).unwrap(), NormalForm::new(-1, 2, 2));
        assert_eq!(uv.power(0).unwrap(), NormalForm::IDENTITY);
        let mut oracle = UnitriangularMatrix::from_normal_form(&NormalForm::IDENTITY).unwrap();
        let step = UnitriangularMatrix::from_normal_form(&uv).unwrap();
        for n in 1..=20i64 {
            oracle = oracle.mul(&step).unwrap();
            let expected = NormalForm::new(-n * (n - 1) / 2, n, n);
            assert_eq!(oracle.to_normal_form().unwrap(), expected);
            assert_eq!(uv.power(n as u64).unwrap(), expected);
        }
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_word("uv").unwrap(), NormalForm::new(0, 1, 1));
        assert_eq!(parse_word("vu").unwrap(), NormalForm::new(-1, 1, 1));
        assert_eq!(parse_word("").unwrap(), NormalForm::IDENTITY);
        assert_eq!(parse_word(" w W ").unwrap(), NormalForm::IDENTITY);
        assert_eq!(
            parse_word("uvx"),
            Err(Error::Parse {
                position: 2,
                token: 'x'
            })
        );
    }

    #[test]
    fn actions_from_the_displayed_formulas() {
        let v = Letter::V.element();
        let u = Letter::U.element();
        assert_eq!(
            left_action(&v, &NormalForm::new(0, 2, 0)).unwrap(),
            NormalForm::new(-2, 2, 1)
        );
        assert_eq!(
            right_action(&NormalForm::new(0, 2, 1), &u).unwrap(),
            NormalForm::new(-1, 3, 1)
        );
    }

    #[test]
    fn overflow_is_reported() {
        let big = NormalForm::new(i64::MIN, 0, 1);
        assert!(matches!(
            big.multiply(&NormalForm::new(0, 1, 0)),
            Err(Error::Overflow(_))
        ));
        assert!(NormalForm::new(0, 1, 1).power(u64::MAX).is_err());
    }

    #[test]
    fn inverse_roundtrip() {
        let x = NormalForm::new(7, -3, 4);
        assert_eq!(
            x.multiply(&x.inverse().unwrap()).unwrap(),
            NormalForm::IDENTITY
        );
    }

    fn arb_element() -> impl Strategy<Value = NormalForm> {
        (-1000i64..1000, -200i64..200, -200i64..200).prop_map(|(n, k, m)| NormalForm::new(n, k, m))
    }

    fn arb_positive() -> impl Strategy<Value = NormalForm> {
        (-1000i64..1000, 0i64..200, 0i64..200).prop_map(|(n, k, m)| NormalForm::new(n, k, m))
    }

    proptest! {
        #[test]
        fn agrees_with_matrix_model(a in arb_element(), b in arb_element()) {
            prop_assert_eq!(a.multiply(&b).unwrap(), via_matrices(&a, &b));
        }

        #[test]
        fn associative(a in arb_element(), b in arb_element(), c in arb_element()) {
            let lhs = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let rhs = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn w_is_central(x in arb_element()) {
            let w = Letter::W.element();
            prop_assert_eq!(w.multiply(&x).unwrap(), x.multiply(&w).unwrap());
            prop_assert_eq!(left_action(&w, &x).unwrap(), right_action(&x, &w).unwrap());
        }

        #[test]
        fn left_and_right_actions_commute(g in arb_positive(), h in arb_positive(), x in arb_positive()) {
            let a = left_action(&g, &right_action(&x, &h).unwrap()).unwrap();
            let b = right_action(&left_action(&g, &x).unwrap(), &h).unwrap();
            prop_assert_eq!(a, b);
            prop_assert!(a.is_positive());
        }
    }
}
