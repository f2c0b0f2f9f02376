use crate::freealg::MultiPoly;
use crate::operalg::{apply, seed_poly, OpSym, OpWord};
use crate::util::next_permutation;
use crate::{AlgebraError, Result};

/// Extra generators adjoined to a T-ideal component. Operator families act
/// on a fixed seed `x_a x_b`, with generator operands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorFamily {
    TIdeal,
    /// Words `L_v w`: the ideal ℒ of the operator algebra.
    LeftIdeal {
        seed: (u32, u32),
    },
    /// Words `w1 H(i_1..i_n) w2`: the ideal generated by `H`-blocks of
    /// length `n`.
    HIdeal {
        n: usize,
        seed: (u32, u32),
    },
}

impl GeneratorFamily {
    /// Family elements that are multilinear on exactly `vars`.
    pub fn generators(&self, vars: &[u32]) -> Result<Vec<MultiPoly>> {
        let seed = match self {
            GeneratorFamily::TIdeal => return Ok(Vec::new()),
            GeneratorFamily::LeftIdeal { seed } | GeneratorFamily::HIdeal { seed, .. } => *seed,
        };
        if seed.0 == seed.1 || !vars.contains(&seed.0) || !vars.contains(&seed.1) {
            return Err(AlgebraError::Config(format!(
                "family seed x{} x{} must use two distinct variables of the tested polynomial",
                seed.0, seed.1
            )));
        }
        let mut ops: Vec<u32> = vars.iter().copied().filter(|&v| v != seed.0 && v != seed.1).collect();
        ops.sort_unstable();
        let m = ops.len();
        // (position, length) of the fixed block, the rest free over {R, L}
        let blocks: Vec<(usize, usize, OpSym)> = match self {
            GeneratorFamily::LeftIdeal { .. } if m >= 1 => vec![(0, 1, OpSym::L)],
            GeneratorFamily::HIdeal { n, .. } if *n >= 1 && *n <= m => (0..=m - n).map(|p| (p, *n, OpSym::H)).collect(),
            _ => Vec::new(),
        };
        let s = seed_poly(seed);
        let mut out = Vec::new();
        loop {
            for &(pos, len, sym) in &blocks {
                let free = m - len;
                for mask in 0..(1u32 << free) {
                    let mut letters = Vec::with_capacity(m);
                    let mut bit = 0;
                    for (i, &v) in ops.iter().enumerate() {
                        if i >= pos && i < pos + len {
                            letters.push((sym, v));
                        } else {
                            let free_sym = if mask >> bit & 1 == 1 { OpSym::L } else { OpSym::R };
                            bit += 1;
                            letters.push((free_sym, v));
                        }
                    }
                    let g = apply(&s, &OpWord::new(letters));
                    if !g.is_zero() {
                        out.push(g);
                    }
                }
            }
            if !next_permutation(&mut ops) {
                break;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_counts() {
        let vars = [1, 2, 3, 4, 5];
        let l = GeneratorFamily::LeftIdeal { seed: (1, 2) }.generators(&vars).unwrap();
        // 3! orderings times 2^2 tails
        assert_eq!(l.len(), 24);
        let hfam = GeneratorFamily::HIdeal { n: 2, seed: (1, 2) }
            .generators(&vars)
            .unwrap();
        // 3! orderings, 2 block positions, 2 free symbols
        assert_eq!(hfam.len(), 24);
        assert!(GeneratorFamily::TIdeal.generators(&vars).unwrap().is_empty());
        assert!(GeneratorFamily::LeftIdeal { seed: (1, 9) }.generators(&vars).is_err());
    }
}
