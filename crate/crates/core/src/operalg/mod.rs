//! Words in the multiplication operators `R`, `L`, `H = R - L` acting on
//! the right of seeds in the square of the free algebra.

pub mod presets;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::freealg::{x, MultiPoly};
use crate::scalar::{format_rational, FieldSpec, Rational};
use crate::tideal::{Engine, GeneratorFamily, VarietySpec};
use crate::util::{next_permutation, permutations};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OpSym {
    R,
    L,
    H,
}

impl OpSym {
    pub const ALL: [OpSym; 3] = [OpSym::R, OpSym::L, OpSym::H];

    fn letter(self) -> char {
        match self {
            OpSym::R => 'R',
            OpSym::L => 'L',
            OpSym::H => 'H',
        }
    }
}

/// A word of operators applied left to right; the empty word is the
/// identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpWord {
    letters: Vec<(OpSym, u32)>,
}

impl OpWord {
    pub fn new(letters: Vec<(OpSym, u32)>) -> Self {
        OpWord { letters }
    }

    pub fn empty() -> Self {
        OpWord::default()
    }

    /// `T(i_1, .., i_n)` with a single symbol throughout.
    pub fn uniform(sym: OpSym, operands: &[u32]) -> Self {
        OpWord::new(operands.iter().map(|&i| (sym, i)).collect())
    }

    pub fn letters(&self) -> &[(OpSym, u32)] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &OpWord) -> OpWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        OpWord { letters }
    }

    pub fn operands(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.letters.iter().map(|l| l.1).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

impl fmt::Display for OpWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("id");
        }
        for (s, i) in &self.letters {
            write!(f, "[{} x{i}]", s.letter())?;
        }
        Ok(())
    }
}

/// A linear combination of operator words.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OpPoly {
    terms: BTreeMap<OpWord, Rational>,
}

impl OpPoly {
    pub fn zero() -> Self {
        OpPoly::default()
    }

    pub fn identity() -> Self {
        OpPoly::word(OpWord::empty())
    }

    pub fn word(w: OpWord) -> Self {
        OpPoly::from_terms([(Rational::one(), w)])
    }

    pub fn letter(sym: OpSym, operand: u32) -> Self {
        OpPoly::word(OpWord::new(vec![(sym, operand)]))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Rational, OpWord)>) -> Self {
        let mut out = OpPoly::zero();
        for (c, w) in terms {
            out.add_word(w, c);
        }
        out
    }

    fn add_word(&mut self, w: OpWord, c: Rational) {
        let e = self.terms.entry(w).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&OpWord, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn operands(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.terms.keys().flat_map(|w| w.operands()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn scale(&self, c: &Rational) -> OpPoly {
        OpPoly::from_terms(self.terms.iter().map(|(w, v)| (v * c, w.clone())))
    }

    pub fn add(&self, other: &OpPoly) -> OpPoly {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_word(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &OpPoly) -> OpPoly {
        self.add(&other.scale(&-Rational::one()))
    }

    /// Composition: `f (self * other) = (f self) other`.
    pub fn mul(&self, other: &OpPoly) -> OpPoly {
        let mut out = OpPoly::zero();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                out.add_word(u.concat(v), a * b);
            }
        }
        out
    }

    pub fn commutator(&self, other: &OpPoly) -> OpPoly {
        self.mul(other).sub(&other.mul(self))
    }
}

impl fmt::Display for OpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{} {w}", format_rational(c))?;
        }
        Ok(())
    }
}

/// Shorthands for single letters.
pub fn r(i: u32) -> OpPoly {
    OpPoly::letter(OpSym::R, i)
}

pub fn l(i: u32) -> OpPoly {
    OpPoly::letter(OpSym::L, i)
}

pub fn h(i: u32) -> OpPoly {
    OpPoly::letter(OpSym::H, i)
}

/// `seed * w`, letters applied left to right.
pub fn apply(seed: &MultiPoly, w: &OpWord) -> MultiPoly {
    w.letters.iter().fold(seed.clone(), |f, &(s, i)| match s {
        OpSym::R => f.mul(&x(i)),
        OpSym::L => x(i).mul(&f),
        OpSym::H => &f.mul(&x(i)) - &x(i).mul(&f),
    })
}

pub fn apply_poly(seed: &MultiPoly, p: &OpPoly) -> MultiPoly {
    let mut out = MultiPoly::zero();
    for (w, c) in p.terms() {
        out = &out + &apply(seed, w).scale(c);
    }
    out
}

/// `x_a x_b` on the two smallest indices not in `used`.
pub fn fresh_seed(used: &[u32]) -> (u32, u32) {
    let mut free = (1u32..).filter(|i| !used.contains(i));
    (free.next().unwrap(), free.next().unwrap())
}

pub fn seed_poly(seed: (u32, u32)) -> MultiPoly {
    x(seed.0).mul(&x(seed.1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    Exact,
    Approx(usize),
}

/// Checks `lhs = rhs` acting on a fresh seed `x_a x_b`, exactly or up to
/// `≈`.
pub fn op_relation_check(
    engine: &Engine,
    lhs: &OpPoly,
    rhs: &OpPoly,
    variety: &VarietySpec,
    mode: CheckMode,
    field: FieldSpec,
) -> Result<bool> {
    let diff = lhs.sub(rhs);
    let seed = seed_poly(fresh_seed(&diff.operands()));
    let f = apply_poly(&seed, &diff);
    match mode {
        CheckMode::Exact => engine.member(&f, variety, field),
        CheckMode::Approx(k) => engine.approx_zero(&f, variety, k, field),
    }
}

/// `(x_a x_b)(H(1..n) - R(1..n)) ∈ T + ℒ`, or without the family when
/// `with_family` is false.
pub fn hword_rword_congruence(
    engine: &Engine,
    n: usize,
    variety: &VarietySpec,
    field: FieldSpec,
    with_family: bool,
) -> Result<bool> {
    let ops: Vec<u32> = (1..=n as u32).collect();
    let seed = fresh_seed(&ops);
    let diff = OpPoly::word(OpWord::uniform(OpSym::H, &ops)).sub(&OpPoly::word(OpWord::uniform(OpSym::R, &ops)));
    let f = apply_poly(&seed_poly(seed), &diff);
    let family = if with_family {
        GeneratorFamily::LeftIdeal { seed }
    } else {
        GeneratorFamily::TIdeal
    };
    engine.member_with_extra_generators(&f, variety, &family, field)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanReport {
    pub degree: usize,
    pub words_checked: usize,
    pub spanning_words: usize,
    pub failing_word: Option<OpWord>,
}

impl SpanReport {
    pub fn spanned(&self) -> bool {
        self.failing_word.is_none()
    }
}

/// Every seed-applied word of length `d` over `{R, L, H}` lies, modulo the
/// T-ideal, in the span of the words `H(..) R(..)` whose `H`-block is
/// shorter than `h_bound` (unbounded when `None`).
pub fn operator_span_check(
    engine: &Engine,
    d: usize,
    h_bound: Option<usize>,
    variety: &VarietySpec,
    field: FieldSpec,
) -> Result<SpanReport> {
    let ops: Vec<u32> = (3..3 + d as u32).collect();
    let seed = seed_poly((1, 2));
    let mut spanning = Vec::new();
    for perm in permutations(d) {
        let operands: Vec<u32> = perm.iter().map(|&i| ops[i]).collect();
        for n in 0..=d {
            if h_bound.is_some_and(|b| n >= b) {
                continue;
            }
            let mut letters: Vec<(OpSym, u32)> = operands[..n].iter().map(|&i| (OpSym::H, i)).collect();
            letters.extend(operands[n..].iter().map(|&i| (OpSym::R, i)));
            spanning.push(apply(&seed, &OpWord::new(letters)));
        }
    }
    let mut words_checked = 0;
    for w in all_words(&ops) {
        words_checked += 1;
        let f = apply(&seed, &w);
        if !engine.member_with_polys(&f, variety, &spanning, field)? {
            return Ok(SpanReport {
                degree: d,
                words_checked,
                spanning_words: spanning.len(),
                failing_word: Some(w),
            });
        }
    }
    Ok(SpanReport {
        degree: d,
        words_checked,
        spanning_words: spanning.len(),
        failing_word: None,
    })
}

/// All words over `{R, L, H}` using each operand once, operands ascending.
pub fn symbol_words(operands: &[u32]) -> Vec<OpWord> {
    let d = operands.len();
    (0..3usize.pow(d as u32))
        .map(|mut code| {
            let letters = operands
                .iter()
                .map(|&i| {
                    let s = OpSym::ALL[code % 3];
                    code /= 3;
                    (s, i)
                })
                .collect();
            OpWord::new(letters)
        })
        .collect()
}

/// Words over `{R, L, H}` on every ordering of `operands`.
fn all_words(operands: &[u32]) -> Vec<OpWord> {
    let mut order = operands.to_vec();
    order.sort_unstable();
    let mut out = Vec::new();
    loop {
        out.extend(symbol_words(&order));
        if !next_permutation(&mut order) {
            return out;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_poly, parse_seeded};

    #[test]
    fn apply_examples() {
        let seed = seed_poly((1, 2));
        let (_, w) = parse_seeded("(x1 x2)[H x3]").unwrap();
        assert_eq!(apply(&seed, &w), parse_poly("1 ((x1 x2) x3)\n-1 (x3 (x1 x2))").unwrap());
        assert_eq!(apply(&seed, &OpWord::empty()), seed);
        let (_, w) = parse_seeded("(x1 x2)[R x3][R x4]").unwrap();
        assert_eq!(apply(&seed, &w), parse_poly("(((x1 x2) x3) x4)").unwrap());
    }

    #[test]
    fn h_expansion_is_r_minus_l() {
        let seed = parse_poly("((x1 x2) x5)").unwrap();
        let hw = apply_poly(&seed, &r(3).mul(&h(4)));
        let rl = apply_poly(&seed, &r(3).mul(&r(4)).sub(&r(3).mul(&l(4))));
        assert_eq!(hw, rl);
        assert_eq!(hw.degree(), seed.degree() + 2);
    }

    #[test]
    fn opword_display_and_words() {
        let w = OpWord::new(vec![(OpSym::R, 3), (OpSym::H, 4)]);
        assert_eq!(w.to_string(), "[R x3][H x4]");
        assert_eq!(symbol_words(&[3, 4]).len(), 9);
        assert_eq!(all_words(&[3, 4]).len(), 18);
        assert_eq!(fresh_seed(&[1, 3]), (2, 4));
    }

    #[test]
    fn composition() {
        let p = r(3).commutator(&l(4));
        assert_eq!(p.terms().count(), 2);
        assert!(r(3).sub(&r(3)).is_zero());
        assert_eq!(h(3).scale(&Rational::from_integer(2.into())).to_string(), "2 [H x3]");
    }
}
