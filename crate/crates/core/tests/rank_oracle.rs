//! Independent dense reference for the dimensions of multilinear components.
//!
//! Monomials, polynomials and the T-ideal are rebuilt here from scratch:
//! the ideal on a variable set `S` is spanned by the identity evaluated on
//! monomials over an ordered partition of `S`, together with left and right
//! multiples of the ideal on smaller sets. Arithmetic is dense modulo 101.

use std::collections::{BTreeMap, HashMap};

use metabel::tideal::{LinBasis, VarietySpec};
use metabel::FieldSpec;

const P: u64 = 101;

type Poly = BTreeMap<String, u64>;

fn var(i: u32) -> Poly {
    BTreeMap::from([(format!("x{i}"), 1)])
}

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (s, c) in a {
        for (t, d) in b {
            let e = out.entry(format!("({s} {t})")).or_insert(0);
            *e = (*e + c * d) % P;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn lin(terms: &[(i64, &Poly)]) -> Poly {
    let mut out = Poly::new();
    for (k, p) in terms {
        let k = k.rem_euclid(P as i64) as u64;
        for (s, c) in p.iter() {
            let e = out.entry(s.clone()).or_insert(0);
            *e = (*e + k * c) % P;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn assoc(a: &Poly, b: &Poly, c: &Poly) -> Poly {
    lin(&[(1, &mul(&mul(a, b), c)), (-1, &mul(a, &mul(b, c)))])
}

fn comm(a: &Poly, b: &Poly) -> Poly {
    lin(&[(1, &mul(a, b)), (-1, &mul(b, a))])
}

/// An identity as its arity and its evaluation on arguments.
type Eval = Box<dyn Fn(&[Poly]) -> Poly>;

struct Identity {
    arity: usize,
    eval: Eval,
}

fn right_alternative() -> Identity {
    Identity {
        arity: 3,
        eval: Box::new(|a| lin(&[(1, &assoc(&a[0], &a[1], &a[2])), (1, &assoc(&a[0], &a[2], &a[1]))])),
    }
}

fn metabelian() -> Identity {
    Identity {
        arity: 4,
        eval: Box::new(|a| mul(&mul(&a[0], &a[1]), &mul(&a[2], &a[3]))),
    }
}

fn lie_step(s: usize) -> Identity {
    Identity {
        arity: s + 1,
        eval: Box::new(|a| a[1..].iter().fold(a[0].clone(), |acc, b| comm(&acc, b))),
    }
}

fn bits(mask: u32) -> Vec<u32> {
    (0..32).filter(|b| mask >> b & 1 == 1).collect()
}

/// Every multilinear monomial on the variables of `mask` (bit `b` is `x_{b+1}`).
fn monomials(mask: u32, memo: &mut HashMap<u32, Vec<Poly>>) -> Vec<Poly> {
    if let Some(v) = memo.get(&mask) {
        return v.clone();
    }
    let b = bits(mask);
    let out = if b.len() == 1 {
        vec![var(b[0] + 1)]
    } else {
        let mut out = Vec::new();
        let mut left = (mask - 1) & mask;
        while left != 0 {
            let right = mask & !left;
            if right != 0 {
                for u in monomials(left, memo) {
                    for v in monomials(right, memo) {
                        out.push(mul(&u, &v));
                    }
                }
            }
            left = (left - 1) & mask;
        }
        out
    };
    memo.insert(mask, out.clone());
    out
}

/// Ordered partitions of `mask` into `k` nonempty blocks.
fn ordered_partitions(mask: u32, k: usize) -> Vec<Vec<u32>> {
    if k == 0 {
        return if mask == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    let mut first = mask;
    while first != 0 {
        for mut rest in ordered_partitions(mask & !first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
        first = (first - 1) & mask;
    }
    out
}

struct Dense {
    index: HashMap<String, usize>,
    pivots: Vec<(usize, Vec<u64>)>,
}

fn inv(a: u64) -> u64 {
    let mut r = 1;
    let (mut b, mut e) = (a % P, P - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % P;
        }
        b = b * b % P;
        e >>= 1;
    }
    r
}

impl Dense {
    fn new(cols: &[Poly]) -> Self {
        let index = cols
            .iter()
            .enumerate()
            .map(|(i, p)| (p.keys().next().unwrap().clone(), i))
            .collect();
        Dense {
            index,
            pivots: Vec::new(),
        }
    }

    fn insert(&mut self, p: &Poly) {
        let mut row = vec![0u64; self.index.len()];
        for (s, c) in p {
            row[self.index[s]] = *c;
        }
        for (col, prow) in &self.pivots {
            let c = row[*col];
            if c != 0 {
                for (x, y) in row.iter_mut().zip(prow) {
                    *x = (*x + (P - c) * y) % P;
                }
            }
        }
        if let Some(col) = row.iter().position(|&c| c != 0) {
            let k = inv(row[col]);
            for x in row.iter_mut() {
                *x = *x * k % P;
            }
            self.pivots.push((col, row));
        }
    }

    fn rows(&self) -> Vec<Poly> {
        let names: BTreeMap<usize, &String> = self.index.iter().map(|(s, i)| (*i, s)).collect();
        self.pivots
            .iter()
            .map(|(_, r)| {
                r.iter()
                    .enumerate()
                    .filter(|(_, c)| **c != 0)
                    .map(|(i, c)| (names[&i].clone(), *c))
                    .collect()
            })
            .collect()
    }
}

/// A spanning set of the ideal on each subset, reduced to a basis.
fn ideal(
    mask: u32,
    ids: &[Identity],
    mon: &mut HashMap<u32, Vec<Poly>>,
    memo: &mut HashMap<u32, Vec<Poly>>,
) -> Vec<Poly> {
    if let Some(v) = memo.get(&mask) {
        return v.clone();
    }
    let cols = monomials(mask, mon);
    let mut dense = Dense::new(&cols);
    for id in ids {
        for blocks in ordered_partitions(mask, id.arity) {
            let choices: Vec<Vec<Poly>> = blocks.iter().map(|&b| monomials(b, mon)).collect();
            let mut idx = vec![0usize; blocks.len()];
            loop {
                let args: Vec<Poly> = idx.iter().zip(&choices).map(|(&i, c)| c[i].clone()).collect();
                dense.insert(&(id.eval)(&args));
                let mut k = 0;
                while k < idx.len() {
                    idx[k] += 1;
                    if idx[k] < choices[k].len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == idx.len() {
                    break;
                }
            }
        }
    }
    let mut sub = (mask - 1) & mask;
    while sub != 0 {
        let rest = mask & !sub;
        if rest != 0 {
            let inner = ideal(sub, ids, mon, memo);
            for m in monomials(rest, mon) {
                for u in &inner {
                    dense.insert(&mul(u, &m));
                    dense.insert(&mul(&m, u));
                }
            }
        }
        sub = (sub - 1) & mask;
    }
    let out = dense.rows();
    memo.insert(mask, out.clone());
    out
}

fn oracle_dim(ids: &[Identity], d: usize) -> usize {
    let full = (1u32 << d) - 1;
    let mut mon = HashMap::new();
    let total = monomials(full, &mut mon).len();
    total - ideal(full, ids, &mut mon, &mut HashMap::new()).len()
}

fn fast_dim(v: &VarietySpec, d: usize, field: FieldSpec) -> usize {
    LinBasis::build(v, d, field).unwrap().0.quotient_dim()
}

#[test]
fn oracle_counts_monomials() {
    let mut mon = HashMap::new();
    assert_eq!(monomials(0b1111, &mut mon).len(), 120);
    assert_eq!(ordered_partitions(0b111, 2).len(), 6);
}

#[test]
fn ra2_matches_oracle() {
    let ids = [right_alternative(), metabelian()];
    for d in 2..=4 {
        let dim = oracle_dim(&ids, d);
        assert_eq!(fast_dim(&VarietySpec::ra2(), d, FieldSpec::Prime(101)), dim, "d={d}");
        assert_eq!(fast_dim(&VarietySpec::ra2(), d, FieldSpec::Rationals), dim, "d={d}");
    }
}

#[test]
fn ral_matches_oracle() {
    for s in 2..=3 {
        let ids = [right_alternative(), metabelian(), lie_step(s)];
        for d in 2..=4 {
            let dim = oracle_dim(&ids, d);
            assert_eq!(
                fast_dim(&VarietySpec::ral(s), d, FieldSpec::Prime(101)),
                dim,
                "s={s} d={d}"
            );
            assert_eq!(
                fast_dim(&VarietySpec::ral(s), d, FieldSpec::Rationals),
                dim,
                "s={s} d={d}"
            );
        }
    }
}

#[test]
fn degree_five_matches_oracle() {
    let ra2 = [right_alternative(), metabelian()];
    assert_eq!(
        fast_dim(&VarietySpec::ra2(), 5, FieldSpec::Rationals),
        oracle_dim(&ra2, 5)
    );
    for s in 2..=3 {
        let ids = [right_alternative(), metabelian(), lie_step(s)];
        assert_eq!(
            fast_dim(&VarietySpec::ral(s), 5, FieldSpec::Rationals),
            oracle_dim(&ids, 5),
            "s={s}"
        );
    }
}

/// Values produced by the oracle above and by the fast path over two
/// fields, frozen.
#[test]
fn frozen_dimensions() {
    let table = [
        (VarietySpec::ra2(), [2, 9, 36, 130, 450]),
        (VarietySpec::ral(2), [2, 6, 7, 9, 11]),
        (VarietySpec::ral(3), [2, 9, 24, 10, 12]),
    ];
    for (v, dims) in table {
        for (d, &dim) in (2..=6).zip(&dims) {
            let field = if d <= 5 {
                FieldSpec::Rationals
            } else {
                FieldSpec::Prime(101)
            };
            assert_eq!(fast_dim(&v, d, field), dim, "{v} d={d}");
        }
    }
    assert_eq!(fast_dim(&VarietySpec::ral(2), 6, FieldSpec::Prime(103)), 11);
}
