//! The multilinear monomials of one degree that survive the monomial
//! identities of a variety, indexed in canonical order.
//!
//! A monomial identity `m = 0` with distinct variables generates, in each
//! multilinear degree, exactly the span of the monomials containing a
//! substitution instance of `m` as a subterm. Such monomials are removed from
//! the column space up front; the remaining identities are projected onto the
//! survivors.

use std::collections::HashMap;

use crate::freealg::{shapes_of_degree, subtree_end, Shape, Term};
use crate::util::{factorial, lex_rank};

/// Does the pattern shape match the subtree of `shape` starting at `at`?
/// Pattern leaves match arbitrary subtrees.
fn matches_at(pattern: &[bool], shape: &[bool], at: usize) -> bool {
    fn rec(p: &[bool], pi: &mut usize, s: &[bool], si: &mut usize) -> bool {
        let p_node = p[*pi];
        *pi += 1;
        if !p_node {
            *si = subtree_end(s, *si);
            return true;
        }
        if !s[*si] {
            return false;
        }
        *si += 1;
        rec(p, pi, s, si) && rec(p, pi, s, si)
    }
    let mut pi = 0;
    let mut si = at;
    rec(pattern, &mut pi, shape, &mut si)
}

/// Tree shapes killed by monomial identities.
#[derive(Debug, Clone, Default)]
pub struct KillPatterns {
    patterns: Vec<Shape>,
}

impl KillPatterns {
    pub fn new(patterns: Vec<Shape>) -> Self {
        KillPatterns { patterns }
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn kills(&self, shape: &[bool]) -> bool {
        (0..shape.len()).any(|at| shape[at] && self.patterns.iter().any(|p| matches_at(p, shape, at)))
    }
}

/// Column indexing for one multilinear degree on generators `1..=degree`.
///
/// Column of a surviving monomial = `shape_rank * degree! + lex_rank(leaves)`,
/// which is its position in the canonical term order restricted to survivors.
#[derive(Debug, Clone)]
pub struct ComponentSpace {
    degree: usize,
    perms: usize,
    shapes: Vec<Shape>,
    shape_index: HashMap<Shape, u32>,
    total_shapes: usize,
}

impl ComponentSpace {
    pub fn new(degree: usize, kill: &KillPatterns) -> Self {
        let all = shapes_of_degree(degree);
        let total_shapes = all.len();
        let shapes: Vec<Shape> = all.into_iter().filter(|s| !kill.kills(s)).collect();
        let shape_index = shapes.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect();
        ComponentSpace {
            degree,
            perms: factorial(degree),
            shapes,
            shape_index,
            total_shapes,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of surviving monomials.
    pub fn columns(&self) -> usize {
        self.shapes.len() * self.perms
    }

    /// Number of multilinear monomials before any identity is imposed.
    pub fn total_monomials(&self) -> usize {
        self.total_shapes * self.perms
    }

    pub fn killed_monomials(&self) -> usize {
        self.total_monomials() - self.columns()
    }

    pub fn surviving_shapes(&self) -> &[Shape] {
        &self.shapes
    }

    pub fn shape_rank(&self, shape: &[bool]) -> Option<u32> {
        self.shape_index.get(shape).copied()
    }

    pub fn column_of(&self, shape_rank: u32, leaves: &[u32]) -> u32 {
        (shape_rank as usize * self.perms + lex_rank(leaves)) as u32
    }

    /// Column of a multilinear monomial on `1..=degree`, `None` if killed.
    pub fn column(&self, term: &Term) -> Option<u32> {
        debug_assert_eq!(term.degree(), self.degree);
        let rank = self.shape_rank(term.shape())?;
        Some(self.column_of(rank, term.leaves()))
    }

    pub fn term(&self, column: u32) -> Term {
        let col = column as usize;
        let shape = self.shapes[col / self.perms].clone();
        let mut rank = col % self.perms;
        let mut pool: Vec<u32> = (1..=self.degree as u32).collect();
        let mut leaves = Vec::with_capacity(self.degree);
        for i in (0..self.degree).rev() {
            let f = factorial(i);
            leaves.push(pool.remove(rank / f));
            rank %= f;
        }
        Term::from_parts(shape, leaves)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_term;

    fn metabelian() -> KillPatterns {
        KillPatterns::new(vec![parse_term("((x1 x2) (x3 x4))").unwrap().shape().to_vec()])
    }

    #[test]
    fn metabelian_survivors_are_operator_chains() {
        for d in 2..=7 {
            let space = ComponentSpace::new(d, &metabelian());
            assert_eq!(space.surviving_shapes().len(), 1 << (d - 2), "degree {d}");
        }
        let k = metabelian();
        assert!(k.kills(parse_term("(x5 ((x1 x2) (x3 x4)))").unwrap().shape()));
        assert!(!k.kills(parse_term("(x5 ((x1 x2) x3))").unwrap().shape()));
    }

    #[test]
    fn columns_follow_canonical_order() {
        let space = ComponentSpace::new(4, &metabelian());
        let terms: Vec<Term> = (0..space.columns() as u32).map(|c| space.term(c)).collect();
        for (c, t) in terms.iter().enumerate() {
            assert_eq!(space.column(t), Some(c as u32));
        }
        assert!(terms.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(space.column(&parse_term("((x1 x2) (x3 x4))").unwrap()), None);
        assert_eq!(space.total_monomials(), 120);
        assert_eq!(space.killed_monomials(), 24);
    }
}
