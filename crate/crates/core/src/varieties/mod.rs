//! Allotted relations, regular words and the non-allotment witnesses in the
//! quotients `A^<n>`.

use std::collections::BTreeMap;
use std::fmt;

use crate::freealg::{x, MultiPoly};
use crate::operalg::{apply, OpSym, OpWord};
use crate::scalar::FieldSpec;
use crate::superalg::checks::{envelope_identity_check, supercommutator_closed_form, EnvelopeCheck};
use crate::superalg::envelope::evaluate;
use crate::superalg::{
    super_mul, supercommutator, EnvelopeElem, GrassmannElem, SuperAlgSpec, SuperBasisSym, SuperElem,
};
use crate::tideal::variety::{lie_nilpotency_identity, metabelian_identity, right_alternative_identity};
use crate::tideal::{Engine, LinBasis, VarietySpec};
use crate::{AlgebraError, Rational, Result};

/// `φ(x_1..x_{n+1})`: the left-normed commutator starting from `[x1,x2]`
/// for even `n` and from `[x1 x2, x3]` for odd `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllottedRelation {
    pub n: usize,
    pub phi: MultiPoly,
}

impl AllottedRelation {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let last = n as u32 + 1;
        let (mut f, next) = if n.is_multiple_of(2) {
            (x(1).commutator(&x(2)), 3)
        } else {
            (x(1).mul(&x(2)).commutator(&x(3)), 4)
        };
        for i in next..=last {
            f = f.commutator(&x(i));
        }
        AllottedRelation { n, phi: f }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RegularWordType {
    /// `(x1 ∘ xi) H^{2j} R^{d-2j-2}`
    JordanFirst { i: u32, j: usize },
    /// `[x1, xi] H^{2j} R^{d-2j-2}`
    CommutatorFirst { i: u32, j: usize },
    /// `[x2, x3] H^{2j} R^{d-2j-2}`
    CommutatorSecondThird { j: usize },
    /// `[x1, x2] H^{2k-1} R^{d-2k-1}`
    OddHBlock { k: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularWord {
    pub kind: RegularWordType,
    pub degree: usize,
    pub n: usize,
}

impl RegularWord {
    pub fn type_number(&self) -> u8 {
        match self.kind {
            RegularWordType::JordanFirst { .. } => 1,
            RegularWordType::CommutatorFirst { .. } => 2,
            RegularWordType::CommutatorSecondThird { .. } => 3,
            RegularWordType::OddHBlock { .. } => 4,
        }
    }

    /// The seed pair, its kind and the `H`-block length.
    fn parts(&self) -> (u32, u32, bool, usize) {
        match self.kind {
            RegularWordType::JordanFirst { i, j } => (1, i, true, 2 * j),
            RegularWordType::CommutatorFirst { i, j } => (1, i, false, 2 * j),
            RegularWordType::CommutatorSecondThird { j } => (2, 3, false, 2 * j),
            RegularWordType::OddHBlock { k } => (1, 2, false, 2 * k - 1),
        }
    }

    /// Expansion in `P_{d,n}`: remaining variables ascend through the
    /// `H`-block and then the `R`-block.
    pub fn expand(&self) -> MultiPoly {
        let (a, b, jordan, hlen) = self.parts();
        let seed = if jordan {
            x(a).jordan(&x(b))
        } else {
            x(a).commutator(&x(b))
        };
        let rest: Vec<u32> = (1..=self.degree as u32).filter(|&v| v != a && v != b).collect();
        let letters = rest
            .iter()
            .enumerate()
            .map(|(p, &v)| (if p < hlen { OpSym::H } else { OpSym::R }, v))
            .collect();
        apply(&seed, &OpWord::new(letters))
    }
}

impl fmt::Display for RegularWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b, jordan, hlen) = self.parts();
        let seed = if jordan {
            format!("(x{a} o x{b})")
        } else {
            format!("[x{a},x{b}]")
        };
        write!(f, "{seed} H^{hlen} R^{}", self.degree - 2 - hlen)
    }
}

/// The four families of regular words of degree `d`, `t = floor(n / 2)`.
pub fn regular_words(d: usize, n: usize) -> Vec<RegularWord> {
    assert!(d >= 3 && n >= 2);
    let t = n / 2;
    let mut kinds = Vec::new();
    for i in 2..=d as u32 {
        for j in 0..t {
            if 2 * j + 2 <= d {
                kinds.push(RegularWordType::JordanFirst { i, j });
            }
        }
    }
    for i in 2..=d as u32 {
        for j in 0..t {
            if 2 * j + 2 <= d {
                kinds.push(RegularWordType::CommutatorFirst { i, j });
            }
        }
    }
    for j in 0..t {
        if 2 * j + 2 <= d {
            kinds.push(RegularWordType::CommutatorSecondThird { j });
        }
    }
    for k in 1..n - t {
        if 2 * k < d {
            kinds.push(RegularWordType::OddHBlock { k });
        }
    }
    kinds
        .into_iter()
        .map(|kind| RegularWord { kind, degree: d, n })
        .collect()
}

pub fn enumerate_regular_words(d: usize, n: usize) -> Vec<MultiPoly> {
    regular_words(d, n).iter().map(RegularWord::expand).collect()
}

/// `2(d-1)t + t + (n-t-1)` with `t = floor(n/2)`, valid while every block
/// fits in the degree.
pub fn regular_word_count(d: usize, n: usize) -> usize {
    let t = n / 2;
    2 * (d - 1) * t + t + (n - t - 1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanReport {
    pub degree: usize,
    pub n: usize,
    pub field: FieldSpec,
    pub words: usize,
    pub dim: usize,
    pub words_rank: usize,
}

impl SpanReport {
    pub fn spanned(&self) -> bool {
        self.words_rank == self.dim
    }
}

/// Rank of the normal forms of the given multilinear polynomials (all of
/// the basis degree).
pub fn rank_modulo(basis: &LinBasis, polys: &[MultiPoly]) -> Result<usize> {
    use crate::scalar::Field;
    use crate::tideal::echelon::Echelon;
    let mut coords = Vec::with_capacity(polys.len());
    for p in polys {
        let nf = basis.normal_form(p)?;
        coords.push(basis.coordinates(&nf)?.1);
    }
    fn run<F: Field>(field: F, ncols: usize, coords: &[Vec<(u32, Rational)>]) -> Result<usize> {
        let mut e = Echelon::new(field.clone(), ncols);
        for row in coords {
            let input = row
                .iter()
                .map(|(c, q)| Ok((*c, field.from_rational(q)?)))
                .collect::<Result<Vec<_>>>()?;
            e.insert(input);
        }
        Ok(e.rank())
    }
    match basis.field() {
        FieldSpec::Rationals => run(crate::scalar::RationalField, basis.space().columns(), &coords),
        FieldSpec::Prime(p) => run(crate::scalar::PrimeField::new(p), basis.space().columns(), &coords),
    }
}

/// Compares `dim P_{d,n}` in `RA-L(n)` with the rank of the regular words.
pub fn regular_span_check(
    engine: &Engine,
    d: usize,
    n: usize,
    variety: &VarietySpec,
    field: FieldSpec,
) -> Result<SpanReport> {
    let basis = engine.component_basis(variety, d, field)?;
    let words = enumerate_regular_words(d, n);
    let words_rank = rank_modulo(&basis, &words)?;
    Ok(SpanReport {
        degree: d,
        n,
        field,
        words: words.len(),
        dim: basis.quotient_dim(),
        words_rank,
    })
}

/// `φ ≈ 0` in `variety` with `2k` appended right multiplications.
pub fn allotted_check(engine: &Engine, n: usize, variety: &VarietySpec, k: usize, field: FieldSpec) -> Result<bool> {
    engine.approx_zero(&AllottedRelation::new(n).phi, variety, k, field)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessLink {
    pub step: usize,
    pub value: SuperElem,
    pub expected: SuperElem,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub n: u32,
    pub chain: Vec<WitnessLink>,
    /// `(j, value, closed form)` after `R_X^j`.
    pub values: Vec<(u32, SuperElem, SuperBasisSym)>,
}

/// The supercommutator chains showing that `A^<n>` is not
/// `(n-1)`-allotted, followed by `R_X^j` for `j = 0..=jmax`. Every value is
/// compared with its closed form and must be nonzero.
pub fn witness_not_allotted(n: u32, jmax: u32) -> Result<Witness> {
    if n < 2 {
        return Err(AlgebraError::Config("witnesses need n >= 2".into()));
    }
    let spec = SuperAlgSpec::quotient(n);
    let k = n / 2;
    let x = SuperElem::x();
    let mut chain = Vec::new();
    let (mut value, links, base) = if n % 2 == 1 {
        let first = supercommutator(&x, &x, &spec)?;
        chain.push(WitnessLink {
            step: 1,
            value: first.clone(),
            expected: SuperElem::a(0, 0),
        });
        (first, 2 * k - 1, (0u32, 0u32))
    } else {
        (SuperElem::a(0, 1), 2 * k - 2, (0, 1))
    };
    let (mut i, j0) = base;
    for step in 0..links {
        value = supercommutator(&value, &x, &spec)?;
        // closed form of this link, tracked symbol by symbol
        let expected = if j0 % 2 == 0 {
            i += 1;
            SuperElem::a(i, j0)
        } else if step % 2 == 0 {
            supercommutator_closed_form(i, j0)
        } else {
            i += 2;
            SuperElem::a(i, j0)
        }
        .project(&spec);
        chain.push(WitnessLink {
            step: chain.len() + 1,
            value: value.clone(),
            expected,
        });
    }
    let (row, col0) = if n % 2 == 1 { (2 * k - 1, 0) } else { (2 * k - 2, 1) };
    let mut values = Vec::new();
    let mut v = value;
    for j in 0..=jmax {
        if j > 0 {
            v = super_mul(&v, &x, &spec);
        }
        values.push((j, v.clone(), SuperBasisSym::A(row, col0 + j)));
    }
    for link in &chain {
        if link.value != link.expected {
            return Err(AlgebraError::WitnessVanished(format!(
                "chain link {} is {} instead of {}",
                link.step, link.value, link.expected
            )));
        }
    }
    for (j, v, sym) in &values {
        if v.is_zero() || *v != SuperElem::sym(*sym) {
            return Err(AlgebraError::WitnessVanished(format!(
                "R_X^{j} gives {v}, expected {sym}"
            )));
        }
    }
    Ok(Witness { n, chain, values })
}

/// An explicit substitution on which the Lie-nilpotency identity of step
/// `n - 1` does not vanish in `G(A^<n>)`: `x_i = e_i ⊗ X`, with `x_1 = 1 ⊗
/// A(0,0)` for even `n`.
pub fn lie_nilpotency_falsifier(n: u32, m: u32) -> Result<(BTreeMap<u32, EnvelopeElem>, EnvelopeElem)> {
    if n < 2 || m < n {
        return Err(AlgebraError::Config(format!(
            "need n >= 2 and m >= n (n = {n}, m = {m})"
        )));
    }
    let spec = SuperAlgSpec::quotient(n);
    let f = lie_nilpotency_identity(n as usize - 1);
    let one = Rational::from_integer(1.into());
    let mut subst = BTreeMap::new();
    for v in 1..=n {
        let e = if n.is_multiple_of(2) && v == 1 {
            EnvelopeElem::pair(GrassmannElem::one(m), SuperBasisSym::A(0, 0))?
        } else {
            EnvelopeElem::pair(GrassmannElem::from_word(m, &[v], one.clone()), SuperBasisSym::X)?
        };
        subst.insert(v, e);
    }
    let value = evaluate(&f, &subst, m, &spec)?;
    if value.is_zero() {
        return Err(AlgebraError::WitnessVanished(format!(
            "Lie-nilpotency of step {} vanished on the substitution",
            n - 1
        )));
    }
    Ok((subst, value))
}

/// Envelope checks of the linearized defining identities of `RA-L(n)` on
/// `G(A^<n>)`.
pub fn lie_nilpotency_envelope_check(n: u32, m: u32, trials: usize, seed: u64) -> Result<Vec<(String, EnvelopeCheck)>> {
    if m < n + 1 {
        return Err(AlgebraError::Config(format!(
            "need m >= n + 1 Grassmann generators (m = {m}, n = {n})"
        )));
    }
    let spec = SuperAlgSpec::quotient(n);
    let ids = [
        ("right_alternative", right_alternative_identity()),
        ("metabelian", metabelian_identity()),
        ("lie_nilpotency", lie_nilpotency_identity(n as usize)),
    ];
    ids.into_iter()
        .map(|(name, f)| Ok((name.to_string(), envelope_identity_check(&f, &spec, m, trials, seed)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    #[test]
    fn allotted_words() {
        let p2 = AllottedRelation::new(2).phi;
        assert_eq!(p2, x(1).commutator(&x(2)).commutator(&x(3)));
        let p3 = AllottedRelation::new(3).phi;
        assert_eq!(p3.degree(), 4);
        assert_eq!(p3, x(1).mul(&x(2)).commutator(&x(3)).commutator(&x(4)));
    }

    #[test]
    fn regular_word_counts() {
        assert_eq!(regular_words(5, 2).len(), 9);
        assert_eq!(regular_words(5, 3).len(), 10);
        for d in 3..=8 {
            for n in 2..=6 {
                let words = regular_words(d, n);
                if 2 * (n / 2) <= d && 2 * (n - n / 2 - 1) < d {
                    assert_eq!(words.len(), regular_word_count(d, n), "d={d} n={n}");
                }
            }
        }
    }

    #[test]
    fn type_two_instance() {
        let w = RegularWord {
            kind: RegularWordType::CommutatorFirst { i: 2, j: 0 },
            degree: 4,
            n: 2,
        };
        let expected = parse_poly("(((x1 x2) x3) x4)\n-1 (((x2 x1) x3) x4)").unwrap();
        assert_eq!(w.expand(), expected);
        assert_eq!(w.to_string(), "[x1,x2] H^0 R^2");
        let w4 = RegularWord {
            kind: RegularWordType::OddHBlock { k: 1 },
            degree: 5,
            n: 3,
        };
        assert_eq!(w4.to_string(), "[x1,x2] H^1 R^2");
    }

    #[test]
    fn witness_examples() {
        let w3 = witness_not_allotted(3, 2).unwrap();
        assert_eq!(w3.values[2].2, SuperBasisSym::A(1, 2));
        let w4 = witness_not_allotted(4, 0).unwrap();
        assert_eq!(w4.values[0].1, SuperElem::a(2, 1));
        let w2 = witness_not_allotted(2, 3).unwrap();
        assert!(w2.chain.is_empty());
        assert_eq!(w2.values[3].1, SuperElem::a(0, 4));
    }

    #[test]
    fn falsifier_is_nonzero() {
        for n in 2..=6 {
            let (_, v) = lie_nilpotency_falsifier(n, 8).unwrap();
            assert!(!v.is_zero());
        }
    }
}
