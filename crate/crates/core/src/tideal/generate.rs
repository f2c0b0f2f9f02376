//! Enumeration of T-ideal consequences `C[f(m_1, .., m_k)]`.
//!
//! Everything is first resolved at the level of tree shapes: a choice of
//! block sizes, a surviving monomial shape for each block and a one-hole
//! context shape fixes the shape of every term of the consequence together
//! with the slot each leaf label comes from. A *template* records that data;
//! every assignment of generator labels to slots then yields one
//! consequence.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::space::{ComponentSpace, KillPatterns};
use crate::freealg::{shapes_of_degree, MultiPoly, Shape, Term};
use crate::scalar::{denominator_lcm, Rational};
use crate::util::{compositions, next_permutation};

/// A multilinear identity with variables renamed to `0..arity` and
/// coefficients scaled to integers.
#[derive(Debug, Clone)]
pub struct IdentityTemplate {
    arity: usize,
    terms: Vec<(Shape, Vec<usize>, i64)>,
}

impl IdentityTemplate {
    pub fn new(f: &MultiPoly) -> Self {
        assert!(f.is_multilinear(), "identity templates must be multilinear");
        let vars = f.variables();
        let scale = Rational::from_integer(denominator_lcm(f.terms().map(|(_, c)| c)));
        let terms = f
            .terms()
            .map(|(t, c)| {
                let slots = t
                    .leaves()
                    .iter()
                    .map(|l| vars.binary_search(l).expect("variable present"))
                    .collect();
                let c = (c * &scale).to_integer();
                let c = c.to_i64().expect("identity coefficient fits in i64");
                (t.shape().to_vec(), slots, c)
            })
            .collect();
        IdentityTemplate {
            arity: vars.len(),
            terms,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn monomial_shape(&self) -> Option<&Shape> {
        self.is_monomial().then(|| &self.terms[0].0)
    }
}

/// One shape-level consequence: terms as `(shape, slot sequence, coeff)`.
/// Slots are numbered `0..degree`; a label assignment maps slots to
/// generators.
#[derive(Debug, Clone)]
pub struct Template {
    pub terms: Vec<(Shape, Vec<u8>, i64)>,
}

/// `(shape with one marked leaf, hole leaf position)`
type ContextShape = (Shape, usize);

fn context_shapes(others: usize, kill: &KillPatterns) -> Vec<ContextShape> {
    if others == 0 {
        return vec![(vec![false], 0)];
    }
    let mut out = Vec::new();
    for shape in shapes_of_degree(others + 1) {
        for hole in 0..=others {
            let filled = splice(&shape, hole, &[true, false, false]);
            // a killed context kills every filling of degree >= 2
            if !kill.kills(&filled) {
                out.push((shape.clone(), hole));
            }
        }
    }
    out
}

/// Replaces leaf number `hole` of `shape` by the tree `insert`.
fn splice(shape: &[bool], hole: usize, insert: &[bool]) -> Shape {
    let mut out = Vec::with_capacity(shape.len() + insert.len());
    let mut leaf = 0;
    for &n in shape {
        if !n {
            if leaf == hole {
                out.extend_from_slice(insert);
            } else {
                out.push(false);
            }
            leaf += 1;
        } else {
            out.push(true);
        }
    }
    out
}

/// All shape-level templates of consequences in degree `degree`, skipping
/// those whose every term is killed. Terms that are killed are dropped.
pub fn templates(identities: &[IdentityTemplate], degree: usize, kill: &KillPatterns) -> Vec<Template> {
    let block_shapes: Vec<Vec<Shape>> = (0..=degree)
        .map(|b| {
            if b == 0 {
                Vec::new()
            } else {
                shapes_of_degree(b).into_iter().filter(|s| !kill.kills(s)).collect()
            }
        })
        .collect();
    let contexts: Vec<Vec<ContextShape>> = (0..=degree).map(|r| context_shapes(r, kill)).collect();

    let mut out = Vec::new();
    for ident in identities {
        let k = ident.arity;
        for inner in k..=degree {
            let others = degree - inner;
            for sizes in compositions(inner, k) {
                let offsets: Vec<usize> = sizes
                    .iter()
                    .scan(0, |acc, &b| {
                        let o = *acc;
                        *acc += b;
                        Some(o)
                    })
                    .collect();
                let mut choice = vec![0usize; k];
                'tuples: loop {
                    let blocks: Vec<&Shape> = (0..k).map(|i| &block_shapes[sizes[i]][choice[i]]).collect();
                    let inner_terms: Vec<(Shape, Vec<u8>, i64)> = ident
                        .terms
                        .iter()
                        .filter_map(|(shape, vars, c)| {
                            let (s, slots) = substitute_blocks(shape, vars, &blocks, &offsets, &sizes);
                            (!kill.kills(&s)).then_some((s, slots, *c))
                        })
                        .collect();
                    if !inner_terms.is_empty() {
                        for (ctx, hole) in &contexts[others] {
                            let mut terms = Vec::new();
                            for (s, slots, c) in &inner_terms {
                                let full = splice(ctx, *hole, s);
                                if kill.kills(&full) {
                                    continue;
                                }
                                let mut seq = Vec::with_capacity(degree);
                                let mut next_ctx = inner as u8;
                                for leaf in 0..=others {
                                    if leaf == *hole {
                                        seq.extend_from_slice(slots);
                                    } else {
                                        seq.push(next_ctx);
                                        next_ctx += 1;
                                    }
                                }
                                terms.push((full, seq, *c));
                            }
                            if !terms.is_empty() {
                                out.push(Template { terms });
                            }
                        }
                    }
                    // next tuple of block shapes
                    let mut i = 0;
                    loop {
                        if i == k {
                            break 'tuples;
                        }
                        choice[i] += 1;
                        if choice[i] < block_shapes[sizes[i]].len() {
                            break;
                        }
                        choice[i] = 0;
                        i += 1;
                    }
                }
            }
        }
    }
    out
}

fn substitute_blocks(
    shape: &[bool],
    vars: &[usize],
    blocks: &[&Shape],
    offsets: &[usize],
    sizes: &[usize],
) -> (Shape, Vec<u8>) {
    let mut s = Vec::new();
    let mut slots = Vec::new();
    let mut leaf = 0;
    for &n in shape {
        if n {
            s.push(true);
        } else {
            let v = vars[leaf];
            leaf += 1;
            s.extend_from_slice(blocks[v]);
            slots.extend((offsets[v]..offsets[v] + sizes[v]).map(|x| x as u8));
        }
    }
    (s, slots)
}

/// Sparse integer rows of the projected consequences for a component space:
/// one row per template and slot labelling. Columns are repeated-free and
/// ascending.
pub struct RowSource<'a> {
    space: &'a ComponentSpace,
    templates: Vec<Vec<(u32, Vec<u8>, i64)>>,
}

impl<'a> RowSource<'a> {
    pub fn new(space: &'a ComponentSpace, templates: Vec<Template>) -> Self {
        let templates = templates
            .into_iter()
            .map(|t| {
                t.terms
                    .into_iter()
                    .map(|(shape, seq, c)| {
                        let rank = space.shape_rank(&shape).expect("surviving template shape");
                        (rank, seq, c)
                    })
                    .collect()
            })
            .collect();
        RowSource { space, templates }
    }

    pub fn template_count(&self) -> usize {
        self.templates.len()
    }

    pub fn row_count(&self) -> usize {
        self.templates.len() * crate::util::factorial(self.space.degree())
    }

    /// Rows of template `idx`, one per labelling, in lexicographic order of
    /// the labelling.
    pub fn rows_of(&self, idx: usize, out: &mut Vec<Vec<(u32, i64)>>) {
        let d = self.space.degree();
        let template = &self.templates[idx];
        let mut labels: Vec<u32> = (1..=d as u32).collect();
        let mut leaves = vec![0u32; d];
        loop {
            let mut row: Vec<(u32, i64)> = Vec::with_capacity(template.len());
            for (rank, seq, c) in template {
                for (pos, &slot) in seq.iter().enumerate() {
                    leaves[pos] = labels[slot as usize];
                }
                row.push((self.space.column_of(*rank, &leaves), *c));
            }
            row.sort_unstable_by_key(|e| e.0);
            let mut merged: Vec<(u32, i64)> = Vec::with_capacity(row.len());
            for (col, c) in row {
                match merged.last_mut() {
                    Some(last) if last.0 == col => last.1 += c,
                    _ => merged.push((col, c)),
                }
            }
            merged.retain(|e| e.1 != 0);
            if !merged.is_empty() {
                out.push(merged);
            }
            if !next_permutation(&mut labels) {
                break;
            }
        }
    }
}

/// All arrangements of a multiset, lexicographic.
fn multiset_arrangements(multiset: &[u32]) -> Vec<Vec<u32>> {
    let mut v = multiset.to_vec();
    v.sort_unstable();
    let mut out = Vec::new();
    loop {
        out.push(v.clone());
        if !next_permutation(&mut v) {
            return out;
        }
    }
}

/// Unpruned consequences of the given identities in one multidegree, as
/// polynomials. Exponential in the degree; meant for small degrees and as
/// an independent reference for the pruned path.
pub fn full_consequences(identities: &[IdentityTemplate], multidegree: &BTreeMap<u32, u32>) -> Vec<MultiPoly> {
    let multiset: Vec<u32> = multidegree
        .iter()
        .flat_map(|(&g, &m)| std::iter::repeat_n(g, m as usize))
        .collect();
    let degree = multiset.len();
    let templates = templates(identities, degree, &KillPatterns::default());
    let arrangements = multiset_arrangements(&multiset);
    let mut out = Vec::new();
    for t in &templates {
        for labels in &arrangements {
            let mut poly_terms: BTreeMap<Term, BigInt> = BTreeMap::new();
            for (shape, seq, c) in &t.terms {
                let leaves = seq.iter().map(|&s| labels[s as usize]).collect();
                *poly_terms
                    .entry(Term::from_parts(shape.clone(), leaves))
                    .or_insert_with(BigInt::zero) += *c;
            }
            let poly = MultiPoly::from_terms(poly_terms.into_iter().map(|(t, c)| (Rational::from_integer(c), t)))
                .expect("consequences are homogeneous");
            out.push(poly);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use crate::tideal::variety::{metabelian_identity, right_alternative_identity};

    #[test]
    fn splice_replaces_marked_leaf() {
        // (h x) with hole 0 filled by (x x)
        assert_eq!(
            splice(&[true, false, false], 0, &[true, false, false]),
            vec![true, true, false, false, false]
        );
    }

    #[test]
    fn degree_three_right_alternative_instances() {
        let ids = [IdentityTemplate::new(&right_alternative_identity())];
        let md = BTreeMap::from([(1, 1), (2, 1), (3, 1)]);
        let cons = full_consequences(&ids, &md);
        assert_eq!(cons.len(), 6);
        let expected = parse_poly("1 ((x1 x2) x3)\n1 ((x1 x3) x2)\n-1 (x1 (x2 x3))\n-1 (x1 (x3 x2))").unwrap();
        assert!(cons.contains(&expected));
    }

    #[test]
    fn metabelian_instance_in_degree_four() {
        let ids = [
            IdentityTemplate::new(&right_alternative_identity()),
            IdentityTemplate::new(&metabelian_identity()),
        ];
        let md = BTreeMap::from([(1, 1), (2, 1), (3, 1), (4, 1)]);
        let cons = full_consequences(&ids, &md);
        assert!(cons.contains(&parse_poly("1 ((x1 x2) (x3 x4))").unwrap()));
    }

    #[test]
    fn non_multilinear_multidegree() {
        let ids = [IdentityTemplate::new(&right_alternative_identity())];
        let md = BTreeMap::from([(1, 3)]);
        let cons = full_consequences(&ids, &md);
        // one template, a single arrangement of x1 x1 x1
        assert_eq!(cons.len(), 1);
        assert_eq!(cons[0].to_string(), "-2 (x1 (x1 x1)) + 2 ((x1 x1) x1)");
    }
}
