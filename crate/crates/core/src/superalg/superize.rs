use std::collections::BTreeMap;

use num_traits::One;

use super::grassmann::{grassmann_mul, GrassmannElem};
use crate::freealg::MultiPoly;
use crate::scalar::Rational;
use crate::util::sort_sign;
use crate::{AlgebraError, Result};

/// A multilinear polynomial with a parity attached to each variable and
/// the Koszul signs already folded into its coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperPoly {
    pub poly: MultiPoly,
    pub parities: BTreeMap<u32, u8>,
}

fn parity_map(f: &MultiPoly, parities: &[u8]) -> Result<BTreeMap<u32, u8>> {
    if !f.is_zero() && !f.is_multilinear() {
        return Err(AlgebraError::NotMultilinear);
    }
    let vars = f.variables();
    if vars.len() != parities.len() || parities.iter().any(|&p| p > 1) {
        return Err(AlgebraError::Config(format!(
            "expected {} parities in {{0,1}}, got {:?}",
            vars.len(),
            parities
        )));
    }
    Ok(vars.into_iter().zip(parities.iter().copied()).collect())
}

/// Superization by evaluation in the Grassmann envelope: the `r`-th odd
/// variable (in index order) becomes `e_r ⊗ z`, even ones `1 ⊗ z`, and the
/// coefficient of `e_1 .. e_k` is read off each monomial.
pub fn superize(f: &MultiPoly, parities: &[u8]) -> Result<SuperPoly> {
    let pmap = parity_map(f, parities)?;
    let odd: Vec<u32> = pmap.iter().filter(|(_, p)| **p == 1).map(|(v, _)| *v).collect();
    let m = odd.len() as u32;
    let full_mask = if m == 0 { 0 } else { (1u32 << m) - 1 };
    let mut out = MultiPoly::zero();
    for (t, c) in f.terms() {
        let g = t.fold(
            &mut |v| match odd.iter().position(|&o| o == v) {
                Some(r) => GrassmannElem::from_word(m, &[r as u32 + 1], Rational::one()),
                None => GrassmannElem::one(m),
            },
            &mut |a, b| grassmann_mul(&a, &b),
        );
        let k = g.coeff(full_mask);
        out.add_term(t.clone(), c * k)?;
    }
    Ok(SuperPoly {
        poly: out,
        parities: pmap,
    })
}

/// Superization by the sign of the permutation each monomial induces on
/// its odd variables.
pub fn superize_sign_rule(f: &MultiPoly, parities: &[u8]) -> Result<SuperPoly> {
    let pmap = parity_map(f, parities)?;
    let mut out = MultiPoly::zero();
    for (t, c) in f.terms() {
        let odd_leaves: Vec<u32> = t.leaves().iter().copied().filter(|v| pmap[v] == 1).collect();
        let c = if sort_sign(&odd_leaves) < 0 {
            -c.clone()
        } else {
            c.clone()
        };
        out.add_term(t.clone(), c)?;
    }
    Ok(SuperPoly {
        poly: out,
        parities: pmap,
    })
}
