use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::term::{Multidegree, Term};
use crate::scalar::{format_rational, Rational};
use crate::util::permutations;
use crate::AlgebraError;

/// A homogeneous element of the free nonassociative algebra with rational
/// coefficients. The zero polynomial has no multidegree.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Term, Rational>,
    multidegree: Option<Multidegree>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketKind {
    /// `[f,g] = fg - gf`
    Commutator,
    /// `f∘g = fg + gf`
    Jordan,
    /// `(f,g,h) = (fg)h - f(gh)`
    Associator,
    /// `fg - (-1)^{|f||g|} gf` with the parity product supplied by the caller.
    SuperCommutator { both_odd: bool },
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly::default()
    }

    pub fn var(index: u32) -> Self {
        MultiPoly::from_term(Term::var(index), Rational::one())
    }

    pub fn from_term(term: Term, coeff: Rational) -> Self {
        if coeff.is_zero() {
            return MultiPoly::zero();
        }
        let md = term.multidegree();
        MultiPoly {
            terms: BTreeMap::from([(term, coeff)]),
            multidegree: Some(md),
        }
    }

    /// Sums `(coeff, term)` pairs, rejecting inhomogeneous input.
    pub fn from_terms(pairs: impl IntoIterator<Item = (Rational, Term)>) -> Result<Self, AlgebraError> {
        let mut out = MultiPoly::zero();
        for (c, t) in pairs {
            out.add_term(t, c)?;
        }
        Ok(out)
    }

    pub fn add_term(&mut self, term: Term, coeff: Rational) -> Result<(), AlgebraError> {
        if coeff.is_zero() {
            return Ok(());
        }
        let md = term.multidegree();
        match &self.multidegree {
            Some(existing) if *existing != md => {
                return Err(AlgebraError::Inhomogeneous {
                    expected: format_multidegree(existing),
                    found: format_multidegree(&md),
                })
            }
            _ => {}
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(term) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
        self.multidegree = if self.terms.is_empty() { None } else { Some(md) };
        Ok(())
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

    pub fn terms(&self) -> impl Iterator<Item = (&Term, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, term: &Term) -> Rational {
        self.terms.get(term).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn multidegree(&self) -> Option<&Multidegree> {
        self.multidegree.as_ref()
    }

    pub fn degree(&self) -> usize {
        self.multidegree
            .as_ref()
            .map(|md| md.values().map(|&m| m as usize).sum())
            .unwrap_or(0)
    }

    /// Generators occurring in the polynomial, ascending.
    pub fn variables(&self) -> Vec<u32> {
        self.multidegree
            .as_ref()
            .map(|md| md.keys().copied().collect())
            .unwrap_or_default()
    }

    pub fn is_multilinear(&self) -> bool {
        self.multidegree
            .as_ref()
            .map(|md| md.values().all(|&m| m == 1))
            .unwrap_or(true)
    }

    pub fn checked_add(&self, other: &MultiPoly) -> Result<MultiPoly, AlgebraError> {
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_term(t.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &MultiPoly) -> Result<MultiPoly, AlgebraError> {
        self.checked_add(&-other)
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly {
            terms: self.terms.iter().map(|(t, v)| (t.clone(), v * c)).collect(),
            multidegree: self.multidegree.clone(),
        }
    }

    /// Tree-grafting product extended bilinearly.
    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        let (Some(a), Some(b)) = (&self.multidegree, &other.multidegree) else {
            return MultiPoly::zero();
        };
        let mut md = a.clone();
        for (&i, &m) in b {
            *md.entry(i).or_insert(0) += m;
        }
        let mut terms = BTreeMap::new();
        for (s, c) in &self.terms {
            for (t, d) in &other.terms {
                let e = terms.entry(Term::mul(s, t)).or_insert_with(Rational::zero);
                *e += c * d;
            }
        }
        // distinct term pairs give distinct products, so nothing cancels
        MultiPoly {
            terms,
            multidegree: Some(md),
        }
    }

    pub fn bracket(&self, g: &MultiPoly, h: Option<&MultiPoly>, kind: BracketKind) -> MultiPoly {
        match kind {
            BracketKind::Commutator => &self.mul(g) - &g.mul(self),
            BracketKind::Jordan => &self.mul(g) + &g.mul(self),
            BracketKind::SuperCommutator { both_odd } => {
                if both_odd {
                    &self.mul(g) + &g.mul(self)
                } else {
                    &self.mul(g) - &g.mul(self)
                }
            }
            BracketKind::Associator => {
                let h = h.expect("associator needs a third argument");
                &self.mul(g).mul(h) - &self.mul(&g.mul(h))
            }
        }
    }

    pub fn commutator(&self, g: &MultiPoly) -> MultiPoly {
        self.bracket(g, None, BracketKind::Commutator)
    }

    pub fn jordan(&self, g: &MultiPoly) -> MultiPoly {
        self.bracket(g, None, BracketKind::Jordan)
    }

    pub fn associator(&self, g: &MultiPoly, h: &MultiPoly) -> MultiPoly {
        self.bracket(g, Some(h), BracketKind::Associator)
    }

    /// Simultaneous substitution of generators. Generators missing from the
    /// map are left in place.
    pub fn substitute(&self, sigma: &BTreeMap<u32, MultiPoly>) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (t, c) in &self.terms {
            let value = t.fold(
                &mut |i| sigma.get(&i).cloned().unwrap_or_else(|| MultiPoly::var(i)),
                &mut |l, r| l.mul(&r),
            );
            out = out
                .checked_add(&value.scale(c))
                .expect("substitution of a homogeneous polynomial stays homogeneous");
        }
        out
    }

    /// Renames generators injectively.
    pub fn rename(&self, map: impl Fn(u32) -> u32) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (t, c) in &self.terms {
            out.add_term(t.relabel(&map), c.clone())
                .expect("injective renaming preserves homogeneity");
        }
        out
    }

    /// Full polarization. A generator `g` of multiplicity `m` keeps its own
    /// index for one copy and receives `m - 1` fresh indices (the smallest
    /// unused ones, handed out in increasing order of `g`); every assignment
    /// of the copies to the occurrences is summed.
    pub fn multilinearize(&self) -> MultiPoly {
        let Some(md) = &self.multidegree else {
            return MultiPoly::zero();
        };
        if md.values().all(|&m| m == 1) {
            return self.clone();
        }
        let mut used: BTreeSet<u32> = md.keys().copied().collect();
        let mut next_fresh = 1u32;
        let mut copies: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for (&g, &m) in md {
            let mut list = vec![g];
            for _ in 1..m {
                while used.contains(&next_fresh) {
                    next_fresh += 1;
                }
                used.insert(next_fresh);
                list.push(next_fresh);
            }
            copies.insert(g, list);
        }
        let repeated: Vec<(u32, Vec<u32>)> = copies.into_iter().filter(|(_, list)| list.len() > 1).collect();
        let perm_tables: Vec<Vec<Vec<usize>>> = repeated.iter().map(|(_, l)| permutations(l.len())).collect();

        let mut out = MultiPoly::zero();
        for (t, c) in &self.terms {
            let positions: Vec<Vec<usize>> = repeated
                .iter()
                .map(|(g, _)| {
                    t.leaves()
                        .iter()
                        .enumerate()
                        .filter(|(_, &l)| l == *g)
                        .map(|(p, _)| p)
                        .collect()
                })
                .collect();
            let mut choice = vec![0usize; repeated.len()];
            loop {
                let mut leaves = t.leaves().to_vec();
                for (r, (_, list)) in repeated.iter().enumerate() {
                    let perm = &perm_tables[r][choice[r]];
                    for (k, &pos) in positions[r].iter().enumerate() {
                        leaves[pos] = list[perm[k]];
                    }
                }
                out.add_term(t.with_leaves(leaves), c.clone())
                    .expect("polarization is homogeneous");
                if !advance_odometer(&mut choice, &perm_tables) {
                    break;
                }
            }
        }
        out
    }
}

/// Steps a mixed-radix counter; `false` once it wraps around.
fn advance_odometer(choice: &mut [usize], tables: &[Vec<Vec<usize>>]) -> bool {
    for (r, c) in choice.iter_mut().enumerate() {
        *c += 1;
        if *c < tables[r].len() {
            return true;
        }
        *c = 0;
    }
    false
}

fn format_multidegree(md: &Multidegree) -> String {
    md.iter()
        .map(|(i, m)| if *m == 1 { format!("x{i}") } else { format!("x{i}^{m}") })
        .collect::<Vec<_>>()
        .join(" ")
}

impl From<Term> for MultiPoly {
    fn from(t: Term) -> Self {
        MultiPoly::from_term(t, Rational::one())
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Rational::one())
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    /// Panics on inhomogeneous operands; use [`MultiPoly::checked_add`] for
    /// untrusted input.
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_add(rhs)
            .expect("adding polynomials of different multidegrees")
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_sub(rhs)
            .expect("subtracting polynomials of different multidegrees")
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        MultiPoly::mul(self, rhs)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (t, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{} {}", format_rational(c), t)?;
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
