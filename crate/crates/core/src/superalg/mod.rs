//! The superalgebras `A^(eps)` with basis `X`, `A(i,j)`, their quotients
//! `A^<n>`, the Grassmann algebra and Grassmann envelopes, and
//! superization of multilinear identities.

pub mod checks;
pub mod envelope;
pub mod grassmann;
pub mod superize;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

pub use envelope::{envelope_mul, EnvelopeElem};
pub use grassmann::{grassmann_mul, GrassmannElem};
pub use superize::{superize, superize_sign_rule, SuperPoly};

use crate::scalar::{format_rational, Rational};
use crate::{AlgebraError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SuperBasisSym {
    X,
    A(u32, u32),
}

impl SuperBasisSym {
    pub fn parity(self) -> u8 {
        match self {
            SuperBasisSym::X => 1,
            SuperBasisSym::A(i, j) => ((i + j) % 2) as u8,
        }
    }
}

impl fmt::Display for SuperBasisSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SuperBasisSym::X => f.write_str("X"),
            SuperBasisSym::A(i, j) => write!(f, "A({i},{j})"),
        }
    }
}

/// `A^(eps)`, optionally modulo the ideal spanned by `A(i,j)` with
/// `i >= 2 * bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SuperAlgSpec {
    pub epsilon: u8,
    pub bound: Option<u32>,
}

impl SuperAlgSpec {
    pub fn full(epsilon: u8) -> Self {
        assert!(epsilon <= 1);
        SuperAlgSpec { epsilon, bound: None }
    }

    /// `A^<n>`: `A^(0)` mod `I^(k)` for `n = 2k`, `A^(1)` mod `I^(k)` for
    /// `n = 2k + 1`.
    pub fn quotient(n: u32) -> Self {
        assert!(n >= 2, "A^<n> is defined for n >= 2");
        SuperAlgSpec {
            epsilon: (n % 2) as u8,
            bound: Some(n / 2),
        }
    }

    pub fn survives(&self, sym: SuperBasisSym) -> bool {
        match (sym, self.bound) {
            (SuperBasisSym::A(i, _), Some(k)) => i < 2 * k,
            _ => true,
        }
    }
}

impl fmt::Display for SuperAlgSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bound {
            None => write!(f, "A^({})", self.epsilon),
            Some(k) => write!(f, "A<{}>", 2 * k + self.epsilon as u32),
        }
    }
}

/// A finite combination of basis symbols.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SuperElem {
    terms: BTreeMap<SuperBasisSym, Rational>,
}

impl SuperElem {
    pub fn zero() -> Self {
        SuperElem::default()
    }

    pub fn sym(s: SuperBasisSym) -> Self {
        SuperElem::from_terms([(s, Rational::one())])
    }

    pub fn x() -> Self {
        SuperElem::sym(SuperBasisSym::X)
    }

    pub fn a(i: u32, j: u32) -> Self {
        SuperElem::sym(SuperBasisSym::A(i, j))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (SuperBasisSym, Rational)>) -> Self {
        let mut out = SuperElem::zero();
        for (s, c) in terms {
            out.add_term(s, c);
        }
        out
    }

    pub fn add_term(&mut self, s: SuperBasisSym, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(s).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&s);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (SuperBasisSym, &Rational)> {
        self.terms.iter().map(|(s, c)| (*s, c))
    }

    pub fn coeff(&self, s: SuperBasisSym) -> Rational {
        self.terms.get(&s).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Common parity of all symbols; `None` when mixed. Zero counts as even.
    pub fn parity(&self) -> Option<u8> {
        let mut it = self.terms.keys().map(|s| s.parity());
        let first = it.next().unwrap_or(0);
        it.all(|p| p == first).then_some(first)
    }

    pub fn add(&self, other: &SuperElem) -> SuperElem {
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_term(*s, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &SuperElem) -> SuperElem {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> SuperElem {
        SuperElem::from_terms(self.terms.iter().map(|(s, v)| (*s, v * c)))
    }

    /// Image in the quotient named by `spec`.
    pub fn project(&self, spec: &SuperAlgSpec) -> SuperElem {
        SuperElem {
            terms: self
                .terms
                .iter()
                .filter(|(s, _)| spec.survives(**s))
                .map(|(s, c)| (*s, c.clone()))
                .collect(),
        }
    }
}

impl fmt::Display for SuperElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (s, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{} {s}", format_rational(c))?;
        }
        Ok(())
    }
}

fn half() -> Rational {
    Rational::new(1.into(), 2.into())
}

fn sign(i: u32) -> Rational {
    if i.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Product of two basis symbols in `A^(eps)` (no quotient).
pub fn basis_mul(a: SuperBasisSym, b: SuperBasisSym, epsilon: u8) -> SuperElem {
    use SuperBasisSym::{A, X};
    match (a, b) {
        (X, X) => {
            if epsilon == 0 {
                SuperElem::zero()
            } else {
                SuperElem::from_terms([(A(0, 0), half())])
            }
        }
        (A(i, j), X) => SuperElem::a(i, j + 1),
        (X, A(i, j)) if j % 2 == 0 => {
            let s = sign(i);
            SuperElem::from_terms([(A(i, j + 1), s.clone()), (A(i + 1, j), -s)])
        }
        (X, A(i, j)) => {
            let s = sign(i) * half();
            SuperElem::from_terms([
                (A(i, j + 1), s.clone()),
                (A(i + 1, j), s.clone() * Rational::from_integer((-2).into())),
                (A(i + 2, j - 1), s),
            ])
        }
        (A(..), A(..)) => SuperElem::zero(),
    }
}

pub fn super_mul(a: &SuperElem, b: &SuperElem, spec: &SuperAlgSpec) -> SuperElem {
    let mut out = SuperElem::zero();
    for (s, c) in a.terms() {
        if !spec.survives(s) {
            continue;
        }
        for (t, d) in b.terms() {
            if !spec.survives(t) {
                continue;
            }
            let cd = c * d;
            for (u, e) in basis_mul(s, t, spec.epsilon).terms() {
                if spec.survives(u) {
                    out.add_term(u, e * &cd);
                }
            }
        }
    }
    out
}

/// `[a,b]_s = ab - (-1)^{|a||b|} ba` for parity-homogeneous `a`, `b`.
pub fn supercommutator(a: &SuperElem, b: &SuperElem, spec: &SuperAlgSpec) -> Result<SuperElem> {
    let pa = a.parity().ok_or(AlgebraError::NotHomogeneous)?;
    let pb = b.parity().ok_or(AlgebraError::NotHomogeneous)?;
    let ab = super_mul(a, b, spec);
    let ba = super_mul(b, a, spec);
    Ok(if pa * pb == 1 { ab.add(&ba) } else { ab.sub(&ba) })
}

/// All symbols `A(i,j)` with `i <= imax`, `j <= jmax`, plus `X`.
pub fn window_symbols(imax: u32, jmax: u32) -> Vec<SuperBasisSym> {
    let mut out = vec![SuperBasisSym::X];
    for i in 0..=imax {
        for j in 0..=jmax {
            out.push(SuperBasisSym::A(i, j));
        }
    }
    out
}
