use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::scalar::{format_rational, Rational};

pub const MAX_GENERATORS: u32 = 24;

/// Sign of `e_S e_T` relative to `e_{S ∪ T}` for disjoint bitmasks, or
/// `None` when they overlap.
pub fn mask_product_sign(s: u32, t: u32) -> Option<i32> {
    if s & t != 0 {
        return None;
    }
    // each generator of t passes every larger generator of s
    let mut swaps = 0u32;
    let mut rest = t;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (s >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    Some(if swaps.is_multiple_of(2) { 1 } else { -1 })
}

/// An element of the Grassmann algebra on `e_1..e_m`; monomials are
/// bitmasks (bit `i - 1` for `e_i`), stored in increasing index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrassmannElem {
    m: u32,
    terms: BTreeMap<u32, Rational>,
}

impl GrassmannElem {
    pub fn zero(m: u32) -> Self {
        assert!(m <= MAX_GENERATORS, "at most {MAX_GENERATORS} Grassmann generators");
        GrassmannElem {
            m,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(m: u32) -> Self {
        GrassmannElem::from_word(m, &[], Rational::from_integer(1.into()))
    }

    /// `coeff * e_{w_1} .. e_{w_r}`; repeated generators give zero.
    pub fn from_word(m: u32, word: &[u32], coeff: Rational) -> Self {
        let mut out = GrassmannElem::zero(m);
        let mut mask = 0u32;
        let mut c = coeff;
        for &g in word {
            assert!(g >= 1 && g <= m, "generator e{g} outside 1..={m}");
            let bit = 1u32 << (g - 1);
            match mask_product_sign(mask, bit) {
                Some(s) => {
                    if s < 0 {
                        c = -c;
                    }
                    mask |= bit;
                }
                None => return out,
            }
        }
        out.add_term(mask, c);
        out
    }

    pub fn generators(&self) -> u32 {
        self.m
    }

    pub fn add_term(&mut self, mask: u32, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(mask).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&mask);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn coeff(&self, mask: u32) -> Rational {
        self.terms.get(&mask).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Parity when homogeneous.
    pub fn parity(&self) -> Option<u8> {
        let mut it = self.terms.keys().map(|m| (m.count_ones() % 2) as u8);
        let first = it.next().unwrap_or(0);
        it.all(|p| p == first).then_some(first)
    }

    pub fn add(&self, other: &GrassmannElem) -> GrassmannElem {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m, c.clone());
        }
        out
    }
}

pub fn grassmann_mul(u: &GrassmannElem, v: &GrassmannElem) -> GrassmannElem {
    assert_eq!(u.m, v.m, "Grassmann elements over different generator counts");
    let mut out = GrassmannElem::zero(u.m);
    for (s, a) in u.terms() {
        for (t, b) in v.terms() {
            if let Some(sign) = mask_product_sign(s, t) {
                let c = a * b;
                out.add_term(s | t, if sign < 0 { -c } else { c });
            }
        }
    }
    out
}

pub fn format_mask(mask: u32) -> String {
    if mask == 0 {
        return "1".into();
    }
    (0..32)
        .filter(|b| mask >> b & 1 == 1)
        .map(|b| format!("e{}", b + 1))
        .collect()
}

impl fmt::Display for GrassmannElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{} {}", format_rational(c), format_mask(*m))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(m: u32, w: &[u32]) -> GrassmannElem {
        GrassmannElem::from_word(m, w, Rational::from_integer(1.into()))
    }

    #[test]
    fn anticommutation() {
        assert_eq!(grassmann_mul(&e(4, &[1]), &e(4, &[2])), e(4, &[1, 2]));
        assert_eq!(
            grassmann_mul(&e(4, &[2]), &e(4, &[1])).coeff(0b11),
            Rational::from_integer((-1).into())
        );
        assert!(grassmann_mul(&e(4, &[1]), &e(4, &[1])).is_zero());
        assert_eq!(grassmann_mul(&e(4, &[1, 2]), &e(4, &[3])), e(4, &[1, 2, 3]));
        assert_eq!(e(4, &[3, 1]).to_string(), "-1 e1e3");
    }

    proptest! {
        #[test]
        fn associative(a in 0u32..64, b in 0u32..64, c in 0u32..64) {
            let mk = |m: u32| {
                let w: Vec<u32> = (0..6).filter(|i| m >> i & 1 == 1).map(|i| i + 1).collect();
                e(6, &w)
            };
            let (x, y, z) = (mk(a), mk(b), mk(c));
            prop_assert_eq!(grassmann_mul(&grassmann_mul(&x, &y), &z), grassmann_mul(&x, &grassmann_mul(&y, &z)));
        }
    }
}
