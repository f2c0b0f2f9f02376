//! Exhaustive window sweeps over the basis of `A^(eps)` and randomized
//! checks in the Grassmann envelope.

use std::collections::{BTreeMap, HashMap};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::envelope::{evaluate, random_element, EnvelopeElem};
use super::{super_mul, supercommutator, superize, SuperAlgSpec, SuperBasisSym, SuperElem, SuperPoly};
use crate::freealg::{MultiPoly, Term};
use crate::scalar::Rational;
use crate::Result;

pub const DEFAULT_WINDOW: (u32, u32) = (6, 8);
pub const DEFAULT_SEED: u64 = 0x5eed_0fa1;
pub const DEFAULT_GENERATORS: u32 = 8;

/// Evaluates a superized polynomial on homogeneous elements; no further
/// signs are applied.
pub fn evaluate_super(f: &MultiPoly, values: &BTreeMap<u32, SuperElem>, spec: &SuperAlgSpec) -> SuperElem {
    fn rec(
        t: &Term,
        values: &BTreeMap<u32, SuperElem>,
        spec: &SuperAlgSpec,
        memo: &mut HashMap<Term, SuperElem>,
    ) -> SuperElem {
        if let Some(v) = memo.get(t) {
            return v.clone();
        }
        let v = match t.split() {
            None => values[&t.leaves()[0]].project(spec),
            Some((a, b)) => {
                let va = rec(&a, values, spec, memo);
                if va.is_zero() {
                    va
                } else {
                    super_mul(&va, &rec(&b, values, spec, memo), spec)
                }
            }
        };
        memo.insert(t.clone(), v.clone());
        v
    }
    let mut memo = HashMap::new();
    let mut out = SuperElem::zero();
    for (t, c) in f.terms() {
        out = out.add(&rec(t, values, spec, &mut memo).scale(c));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperCheck {
    pub holds: bool,
    pub substitutions: usize,
    /// `(variable, symbol)` assignment and the nonzero value.
    pub witness: Option<(Vec<(u32, SuperBasisSym)>, SuperElem)>,
}

fn window_a_symbols(window: (u32, u32)) -> Vec<SuperBasisSym> {
    let mut out = Vec::new();
    for i in 0..=window.0 {
        for j in 0..=window.1 {
            out.push(SuperBasisSym::A(i, j));
        }
    }
    out
}

/// Checks that every superization of the multilinear `f` vanishes on all
/// basis substitutions from the window.
///
/// A monomial with two `A`-symbols vanishes (at their lowest common
/// ancestor both factors lie in the span of the `A(i,j)`, whose products are
/// zero), so only substitutions with at most one `A`-symbol are evaluated
/// unless `exhaustive` is set.
pub fn superidentity_check(
    f: &MultiPoly,
    spec: &SuperAlgSpec,
    window: (u32, u32),
    exhaustive: bool,
) -> Result<SuperCheck> {
    let vars = f.variables();
    let d = vars.len();
    let a_syms = window_a_symbols(window);
    let mut cache: HashMap<Vec<u8>, SuperPoly> = HashMap::new();
    let mut substitutions = 0;
    let mut assignments: Vec<Vec<SuperBasisSym>> = Vec::new();
    if exhaustive {
        let choices: Vec<SuperBasisSym> = std::iter::once(SuperBasisSym::X)
            .chain(a_syms.iter().copied())
            .collect();
        let mut idx = vec![0usize; d];
        loop {
            assignments.push(idx.iter().map(|&i| choices[i]).collect());
            let mut k = 0;
            loop {
                if k == d {
                    break;
                }
                idx[k] += 1;
                if idx[k] < choices.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == d {
                break;
            }
        }
    } else {
        assignments.push(vec![SuperBasisSym::X; d]);
        for slot in 0..d {
            for &a in &a_syms {
                let mut v = vec![SuperBasisSym::X; d];
                v[slot] = a;
                assignments.push(v);
            }
        }
    }
    for assignment in assignments {
        if assignment.iter().any(|s| !spec.survives(*s)) {
            continue;
        }
        let parities: Vec<u8> = assignment.iter().map(|s| s.parity()).collect();
        let sp = match cache.get(&parities) {
            Some(sp) => sp,
            None => {
                let sp = superize(f, &parities)?;
                cache.entry(parities.clone()).or_insert(sp)
            }
        };
        let values: BTreeMap<u32, SuperElem> = vars
            .iter()
            .zip(&assignment)
            .map(|(&v, &s)| (v, SuperElem::sym(s)))
            .collect();
        substitutions += 1;
        let value = evaluate_super(&sp.poly, &values, spec);
        if !value.is_zero() {
            return Ok(SuperCheck {
                holds: false,
                substitutions,
                witness: Some((vars.iter().copied().zip(assignment).collect(), value)),
            });
        }
    }
    Ok(SuperCheck {
        holds: true,
        substitutions,
        witness: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvelopeCheck {
    pub holds: bool,
    pub trials: usize,
    /// Nonzero evaluations among the trials.
    pub nonzero_evaluations: usize,
    pub witness: Option<(BTreeMap<u32, EnvelopeElem>, EnvelopeElem)>,
}

/// Evaluates `f` on `trials` pseudorandom envelope substitutions.
pub fn envelope_identity_check(
    f: &MultiPoly,
    spec: &SuperAlgSpec,
    m: u32,
    trials: usize,
    seed: u64,
) -> Result<EnvelopeCheck> {
    let vars = f.variables();
    if (m as usize) < vars.len() {
        return Err(crate::AlgebraError::Config(format!(
            "{m} Grassmann generators are too few for degree {}",
            vars.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nonzero = 0;
    let mut witness = None;
    for _ in 0..trials {
        let subst: BTreeMap<u32, EnvelopeElem> = vars.iter().map(|&v| (v, random_element(&mut rng, m, spec))).collect();
        let value = evaluate(f, &subst, m, spec)?;
        if !value.is_zero() {
            nonzero += 1;
            if witness.is_none() {
                witness = Some((subst, value));
            }
        }
    }
    Ok(EnvelopeCheck {
        holds: nonzero == 0,
        trials,
        nonzero_evaluations: nonzero,
        witness,
    })
}

/// `A(i,j) ([L_X, R_X] - (-1)^{i+j} L_X^2)` with operators acting on the
/// right: `(X a) X - X (a X) - (-1)^{i+j} X (X a)`.
pub fn consistency_relation(i: u32, j: u32, spec: &SuperAlgSpec) -> SuperElem {
    let a = SuperElem::a(i, j);
    let x = SuperElem::x();
    let xa = super_mul(&x, &a, spec);
    let lr = super_mul(&xa, &x, spec).sub(&super_mul(&x, &super_mul(&a, &x, spec), spec));
    let ll = super_mul(&x, &xa, spec);
    if (i + j).is_multiple_of(2) {
        lr.sub(&ll)
    } else {
        lr.add(&ll)
    }
}

/// Closed form of `[A(i,j), X]_s`.
pub fn supercommutator_closed_form(i: u32, j: u32) -> SuperElem {
    if j.is_multiple_of(2) {
        SuperElem::a(i + 1, j)
    } else {
        let q = |n: i64, d: i64| Rational::new(n.into(), d.into());
        SuperElem::from_terms([
            (SuperBasisSym::A(i, j + 1), q(3, 2)),
            (SuperBasisSym::A(i + 1, j), q(-1, 1)),
            (SuperBasisSym::A(i + 2, j - 1), q(1, 2)),
        ])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableReport {
    pub cases: usize,
    pub failures: Vec<String>,
}

impl TableReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Sweeps the window for the consistency relation and the two
/// supercommutator formulas, in `A^(0)` and `A^(1)`.
pub fn table_sweep(window: (u32, u32)) -> TableReport {
    let mut cases = 0;
    let mut failures = Vec::new();
    let x = SuperElem::x();
    for eps in 0..=1u8 {
        let spec = SuperAlgSpec::full(eps);
        for i in 0..=window.0 {
            for j in 0..=window.1 {
                cases += 3;
                let r = consistency_relation(i, j, &spec);
                if !r.is_zero() {
                    failures.push(format!("eps={eps}: consistency relation at A({i},{j}) gives {r}"));
                }
                let a = SuperElem::a(i, j);
                let once = supercommutator(&a, &x, &spec).expect("basis symbols are homogeneous");
                if once != supercommutator_closed_form(i, j) {
                    failures.push(format!("eps={eps}: [A({i},{j}),X]_s = {once}"));
                }
                let twice = supercommutator(&once, &x, &spec).expect("homogeneous");
                if twice != SuperElem::a(i + 2, j) {
                    failures.push(format!("eps={eps}: [[A({i},{j}),X]_s,X]_s = {twice}"));
                }
            }
        }
    }
    TableReport { cases, failures }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freealg::x;
    use crate::tideal::variety::{metabelian_identity, right_alternative_identity};

    #[test]
    fn table_relations_hold() {
        let r = table_sweep((3, 4));
        assert!(r.passed(), "{:?}", r.failures);
    }

    #[test]
    fn right_alternative_superidentity() {
        for eps in 0..=1 {
            let c =
                superidentity_check(&right_alternative_identity(), &SuperAlgSpec::full(eps), (3, 4), false).unwrap();
            assert!(c.holds, "{c:?}");
        }
        let m = superidentity_check(&metabelian_identity(), &SuperAlgSpec::full(1), (2, 2), false).unwrap();
        assert!(m.holds);
    }

    #[test]
    fn pruned_and_exhaustive_sweeps_agree() {
        let spec = SuperAlgSpec::full(1);
        let f = right_alternative_identity();
        assert!(superidentity_check(&f, &spec, (2, 2), true).unwrap().holds);
        let g = x(1).commutator(&x(2));
        let pruned = superidentity_check(&g, &spec, (2, 2), false).unwrap();
        let full = superidentity_check(&g, &spec, (2, 2), true).unwrap();
        assert!(!pruned.holds);
        assert!(!full.holds);
    }

    #[test]
    fn commutator_fails_in_the_envelope() {
        let g = x(1).commutator(&x(2));
        let c = envelope_identity_check(&g, &SuperAlgSpec::quotient(2), 6, 50, DEFAULT_SEED).unwrap();
        assert!(!c.holds);
        let (subst, value) = c.witness.unwrap();
        assert_eq!(evaluate(&g, &subst, 6, &SuperAlgSpec::quotient(2)).unwrap(), value);
    }
}
