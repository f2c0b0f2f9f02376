use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::Zero;
use rand::Rng;

use super::grassmann::{format_mask, mask_product_sign, GrassmannElem};
use super::{basis_mul, SuperAlgSpec, SuperBasisSym};
use crate::freealg::{MultiPoly, Term};
use crate::scalar::{format_rational, Rational};
use crate::{AlgebraError, Result};

/// An element of `G_0 ⊗ A_0 + G_1 ⊗ A_1`, stored as coefficients of
/// `e_S ⊗ s` with matching parities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvelopeElem {
    m: u32,
    terms: BTreeMap<(u32, SuperBasisSym), Rational>,
}

impl EnvelopeElem {
    pub fn zero(m: u32) -> Self {
        EnvelopeElem {
            m,
            terms: BTreeMap::new(),
        }
    }

    /// `g ⊗ sym`; every monomial of `g` must have the parity of `sym`.
    pub fn pair(g: GrassmannElem, sym: SuperBasisSym) -> Result<Self> {
        let mut out = EnvelopeElem::zero(g.generators());
        for (mask, c) in g.terms() {
            if (mask.count_ones() % 2) as u8 != sym.parity() {
                return Err(AlgebraError::ParityMismatch);
            }
            out.add_term(mask, sym, c.clone());
        }
        Ok(out)
    }

    fn add_term(&mut self, mask: u32, sym: SuperBasisSym, c: Rational) {
        if c.is_zero() {
            return;
        }
        let key = (mask, sym);
        let e = self.terms.entry(key).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn generators(&self) -> u32 {
        self.m
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, SuperBasisSym, &Rational)> {
        self.terms.iter().map(|((m, s), c)| (*m, *s, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &EnvelopeElem) -> EnvelopeElem {
        let mut out = self.clone();
        for (m, s, c) in other.terms() {
            out.add_term(m, s, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &EnvelopeElem) -> EnvelopeElem {
        let mut out = self.clone();
        for (m, s, c) in other.terms() {
            out.add_term(m, s, -c.clone());
        }
        out
    }

    pub fn project(&self, spec: &SuperAlgSpec) -> EnvelopeElem {
        let mut out = EnvelopeElem::zero(self.m);
        for (m, s, c) in self.terms() {
            if spec.survives(s) {
                out.add_term(m, s, c.clone());
            }
        }
        out
    }
}

impl fmt::Display for EnvelopeElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, ((m, s), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{} {} ⊗ {s}", format_rational(c), format_mask(*m))?;
        }
        Ok(())
    }
}

/// `(g ⊗ a)(h ⊗ b) = gh ⊗ ab`, extended bilinearly.
pub fn envelope_mul(u: &EnvelopeElem, v: &EnvelopeElem, spec: &SuperAlgSpec) -> EnvelopeElem {
    assert_eq!(u.m, v.m, "envelope elements over different Grassmann algebras");
    let mut out = EnvelopeElem::zero(u.m);
    for (g, a, c) in u.terms() {
        if !spec.survives(a) {
            continue;
        }
        for (h, b, d) in v.terms() {
            if !spec.survives(b) {
                continue;
            }
            let Some(sign) = mask_product_sign(g, h) else { continue };
            let prod = basis_mul(a, b, spec.epsilon);
            if prod.is_zero() {
                continue;
            }
            let cd = if sign < 0 { -(c * d) } else { c * d };
            for (s, e) in prod.terms() {
                if spec.survives(s) {
                    out.add_term(g | h, s, e * &cd);
                }
            }
        }
    }
    out
}

/// Evaluates `f` (an ordinary polynomial) on envelope elements.
pub fn evaluate(
    f: &MultiPoly,
    subst: &BTreeMap<u32, EnvelopeElem>,
    m: u32,
    spec: &SuperAlgSpec,
) -> Result<EnvelopeElem> {
    let mut memo: HashMap<Term, EnvelopeElem> = HashMap::new();
    let mut out = EnvelopeElem::zero(m);
    for (t, c) in f.terms() {
        let v = eval_term(t, subst, spec, &mut memo)?;
        for (g, s, d) in v.terms() {
            out.add_term(g, s, c * d);
        }
    }
    Ok(out)
}

fn eval_term(
    t: &Term,
    subst: &BTreeMap<u32, EnvelopeElem>,
    spec: &SuperAlgSpec,
    memo: &mut HashMap<Term, EnvelopeElem>,
) -> Result<EnvelopeElem> {
    if let Some(v) = memo.get(t) {
        return Ok(v.clone());
    }
    let v = match t.split() {
        None => subst
            .get(&t.leaves()[0])
            .cloned()
            .ok_or_else(|| AlgebraError::Config(format!("no value given for x{}", t.leaves()[0])))?,
        Some((a, b)) => {
            let va = eval_term(&a, subst, spec, memo)?;
            if va.is_zero() {
                va
            } else {
                let vb = eval_term(&b, subst, spec, memo)?;
                envelope_mul(&va, &vb, spec)
            }
        }
    };
    memo.insert(t.clone(), v.clone());
    Ok(v)
}

/// A pseudorandom envelope element with one to three pairs and coefficients
/// in `[-3, 3]`. Symbols are chosen among those surviving in `spec` with
/// `j <= 3`.
pub fn random_element(rng: &mut impl Rng, m: u32, spec: &SuperAlgSpec) -> EnvelopeElem {
    let imax = match spec.bound {
        Some(k) => 2 * k - 1,
        None => 4,
    };
    let mut out = EnvelopeElem::zero(m);
    let pairs = rng.gen_range(1..=3);
    for _ in 0..pairs {
        let coeff = loop {
            let c: i64 = rng.gen_range(-3..=3);
            if c != 0 {
                break Rational::from_integer(c.into());
            }
        };
        let odd = rng.gen_bool(0.5);
        let sym = if odd {
            if rng.gen_bool(0.5) {
                SuperBasisSym::X
            } else {
                let i = rng.gen_range(0..=imax);
                let j = rng.gen_range(0..=1) * 2 + (i + 1) % 2;
                SuperBasisSym::A(i, j)
            }
        } else {
            let i = rng.gen_range(0..=imax);
            let j = rng.gen_range(0..=1) * 2 + i % 2;
            SuperBasisSym::A(i, j)
        };
        let len = match (odd, rng.gen_range(0..5)) {
            (true, 0) if m >= 3 => 3,
            (true, _) => 1,
            (false, 0) if m >= 2 => 2,
            (false, _) => 0,
        };
        let mut word = Vec::new();
        while word.len() < len {
            let g = rng.gen_range(1..=m);
            if !word.contains(&g) {
                word.push(g);
            }
        }
        let g = GrassmannElem::from_word(m, &word, coeff);
        out = out.add(&EnvelopeElem::pair(g, sym).expect("parities chosen to match"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_envelope;

    #[test]
    fn envelope_examples() {
        let a1 = SuperAlgSpec::full(1);
        let u = parse_envelope("e1 ⊗ X", 4).unwrap();
        let v = parse_envelope("e2 ⊗ X", 4).unwrap();
        assert_eq!(
            envelope_mul(&u, &v, &a1),
            parse_envelope("1/2 e1e2 ⊗ A(0,0)", 4).unwrap()
        );
        let a = parse_envelope("1 ⊗ A(0,0)", 4).unwrap();
        assert_eq!(envelope_mul(&a, &u, &a1), parse_envelope("e1 ⊗ A(0,1)", 4).unwrap());
        let g = GrassmannElem::from_word(4, &[1], Rational::from_integer(1.into()));
        assert!(matches!(
            EnvelopeElem::pair(g, SuperBasisSym::A(0, 0)),
            Err(AlgebraError::ParityMismatch)
        ));
    }

    #[test]
    fn products_stay_in_the_envelope() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let spec = SuperAlgSpec::full(1);
        for _ in 0..200 {
            let u = random_element(&mut rng, 6, &spec);
            let v = random_element(&mut rng, 6, &spec);
            for (g, s, _) in envelope_mul(&u, &v, &spec).terms() {
                assert_eq!((g.count_ones() % 2) as u8, s.parity());
            }
        }
    }
}
