use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Multiplicities of generators, keyed by generator index.
pub type Multidegree = BTreeMap<u32, u32>;

/// Shape of a binary tree in preorder: `true` for an internal node, `false`
/// for a leaf. Leaves sort before nodes, so right-leaning shapes come first.
pub type Shape = Vec<bool>;

/// A nonassociative monomial: a full binary tree whose leaves carry
/// generator indices `>= 1`.
///
/// Ordering is by degree, then shape, then the leaf index sequence.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Term {
    shape: Shape,
    leaves: Vec<u32>,
}

impl Term {
    pub fn var(index: u32) -> Term {
        assert!(index >= 1, "generator indices start at 1");
        Term {
            shape: vec![false],
            leaves: vec![index],
        }
    }

    pub fn mul(a: &Term, b: &Term) -> Term {
        let mut shape = Vec::with_capacity(1 + a.shape.len() + b.shape.len());
        shape.push(true);
        shape.extend_from_slice(&a.shape);
        shape.extend_from_slice(&b.shape);
        let mut leaves = Vec::with_capacity(a.leaves.len() + b.leaves.len());
        leaves.extend_from_slice(&a.leaves);
        leaves.extend_from_slice(&b.leaves);
        Term { shape, leaves }
    }

    /// Builds a term from a shape and a leaf labelling. Panics if the shape is
    /// not a valid full binary tree with `leaves.len()` leaves.
    pub fn from_parts(shape: Shape, leaves: Vec<u32>) -> Term {
        assert!(shape_is_valid(&shape), "invalid tree shape");
        assert_eq!(
            shape.iter().filter(|n| !**n).count(),
            leaves.len(),
            "leaf count does not match shape"
        );
        assert!(leaves.iter().all(|&i| i >= 1));
        Term { shape, leaves }
    }

    pub fn degree(&self) -> usize {
        self.leaves.len()
    }

    pub fn shape(&self) -> &[bool] {
        &self.shape
    }

    pub fn leaves(&self) -> &[u32] {
        &self.leaves
    }

    pub fn is_var(&self) -> bool {
        self.leaves.len() == 1
    }

    /// Left and right factors, or `None` for a generator.
    pub fn split(&self) -> Option<(Term, Term)> {
        if self.is_var() {
            return None;
        }
        let left_end = subtree_end(&self.shape, 1);
        let left_leaves = self.shape[1..left_end].iter().filter(|n| !**n).count();
        Some((
            Term {
                shape: self.shape[1..left_end].to_vec(),
                leaves: self.leaves[..left_leaves].to_vec(),
            },
            Term {
                shape: self.shape[left_end..].to_vec(),
                leaves: self.leaves[left_leaves..].to_vec(),
            },
        ))
    }

    pub fn multidegree(&self) -> Multidegree {
        let mut md = Multidegree::new();
        for &i in &self.leaves {
            *md.entry(i).or_insert(0) += 1;
        }
        md
    }

    pub fn is_multilinear(&self) -> bool {
        let mut seen = self.leaves.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }

    /// Same shape, leaves replaced by `f(leaf)`.
    pub fn relabel(&self, mut f: impl FnMut(u32) -> u32) -> Term {
        Term {
            shape: self.shape.clone(),
            leaves: self.leaves.iter().map(|&i| f(i)).collect(),
        }
    }

    pub fn with_leaves(&self, leaves: Vec<u32>) -> Term {
        assert_eq!(leaves.len(), self.leaves.len());
        Term {
            shape: self.shape.clone(),
            leaves,
        }
    }

    /// Evaluates the tree bottom-up, mapping leaves with `leaf` and internal
    /// nodes with `node`.
    pub fn fold<T>(&self, leaf: &mut impl FnMut(u32) -> T, node: &mut impl FnMut(T, T) -> T) -> T {
        let mut pos = 0;
        let mut leaf_pos = 0;
        fold_rec(&self.shape, &self.leaves, &mut pos, &mut leaf_pos, leaf, node)
    }
}

fn fold_rec<T>(
    shape: &[bool],
    leaves: &[u32],
    pos: &mut usize,
    leaf_pos: &mut usize,
    leaf: &mut impl FnMut(u32) -> T,
    node: &mut impl FnMut(T, T) -> T,
) -> T {
    let is_node = shape[*pos];
    *pos += 1;
    if is_node {
        let l = fold_rec(shape, leaves, pos, leaf_pos, leaf, node);
        let r = fold_rec(shape, leaves, pos, leaf_pos, leaf, node);
        node(l, r)
    } else {
        let v = leaves[*leaf_pos];
        *leaf_pos += 1;
        leaf(v)
    }
}

/// Index one past the end of the subtree starting at `start`.
pub fn subtree_end(shape: &[bool], start: usize) -> usize {
    let mut need = 1usize;
    let mut i = start;
    while need > 0 {
        need = if shape[i] { need + 1 } else { need - 1 };
        i += 1;
    }
    i
}

pub fn shape_is_valid(shape: &[bool]) -> bool {
    let mut need = 1usize;
    for (i, &n) in shape.iter().enumerate() {
        if need == 0 {
            return false;
        }
        need = if n { need + 1 } else { need - 1 };
        if need == 0 && i + 1 != shape.len() {
            return false;
        }
    }
    need == 0
}

pub fn shape_degree(shape: &[bool]) -> usize {
    shape.iter().filter(|n| !**n).count()
}

/// All tree shapes with `degree` leaves, in canonical order.
pub fn shapes_of_degree(degree: usize) -> Vec<Shape> {
    assert!(degree >= 1);
    let mut memo: Vec<Vec<Shape>> = vec![Vec::new(), vec![vec![false]]];
    for d in 2..=degree {
        let mut all = Vec::new();
        for left in 1..d {
            for l in &memo[left] {
                for r in &memo[d - left] {
                    let mut s = Vec::with_capacity(2 * d - 1);
                    s.push(true);
                    s.extend_from_slice(l);
                    s.extend_from_slice(r);
                    all.push(s);
                }
            }
        }
        all.sort();
        memo.push(all);
    }
    memo.swap_remove(degree)
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        self.leaves
            .len()
            .cmp(&other.leaves.len())
            .then_with(|| self.shape.cmp(&other.shape))
            .then_with(|| self.leaves.cmp(&other.leaves))
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.fold(&mut |i| format!("x{i}"), &mut |l, r| format!("({l} {r})"));
        f.write_str(&s)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x(i: u32) -> Term {
        Term::var(i)
    }

    #[test]
    fn display_and_split() {
        let t = Term::mul(&Term::mul(&x(1), &x(2)), &x(3));
        assert_eq!(t.to_string(), "((x1 x2) x3)");
        let (l, r) = t.split().unwrap();
        assert_eq!(l.to_string(), "(x1 x2)");
        assert_eq!(r, x(3));
        assert!(x(4).split().is_none());
    }

    #[test]
    fn canonical_order() {
        let left = Term::mul(&Term::mul(&x(1), &x(2)), &x(3));
        let right = Term::mul(&x(3), &Term::mul(&x(1), &x(2)));
        assert!(right < left, "right-leaning shape sorts first");
        assert!(x(9) < Term::mul(&x(1), &x(2)), "degree first");
        assert!(Term::mul(&x(1), &x(2)) < Term::mul(&x(2), &x(1)));
    }

    #[test]
    fn catalan_shape_counts() {
        let counts: Vec<usize> = (1..=7).map(|d| shapes_of_degree(d).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 14, 42, 132]);
        for s in shapes_of_degree(5) {
            assert!(shape_is_valid(&s));
        }
        assert!(!shape_is_valid(&[true, false]));
        assert!(!shape_is_valid(&[false, false]));
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        let leaf = (1u32..5).prop_map(Term::var);
        leaf.prop_recursive(4, 16, 2, |inner| {
            (inner.clone(), inner).prop_map(|(a, b)| Term::mul(&a, &b))
        })
    }

    proptest! {
        #[test]
        fn order_is_total(a in arb_term(), b in arb_term(), c in arb_term()) {
            let ab = a.cmp(&b);
            prop_assert_eq!(ab, b.cmp(&a).reverse());
            prop_assert_eq!(ab == Ordering::Equal, a == b);
            if a <= b && b <= c {
                prop_assert!(a <= c);
            }
        }

        #[test]
        fn split_inverts_mul(a in arb_term(), b in arb_term()) {
            let t = Term::mul(&a, &b);
            prop_assert_eq!(t.split(), Some((a.clone(), b.clone())));
            prop_assert_eq!(t.degree(), a.degree() + b.degree());
        }
    }
}
