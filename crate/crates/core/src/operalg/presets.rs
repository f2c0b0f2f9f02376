//! Named relation presets, each expanded to a concrete polynomial together
//! with the variety and the sense in which it should vanish.

use super::{apply, apply_poly, h, r, seed_poly, symbol_words, OpPoly, OpSym, OpWord};
use crate::freealg::{x, MultiPoly};
use crate::scalar::{FieldSpec, Rational};
use crate::tideal::{Engine, GeneratorFamily, VarietySpec};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Approx(usize),
    /// Membership in the T-ideal plus the span of a generator family.
    WithFamily(GeneratorFamily),
}

#[derive(Debug, Clone)]
pub struct Relation {
    pub id: String,
    pub statement: String,
    pub variety: VarietySpec,
    pub poly: MultiPoly,
    pub mode: Mode,
    /// `false` for negative controls that must not vanish.
    pub expect: bool,
}

impl Relation {
    fn new(
        id: impl Into<String>,
        statement: impl Into<String>,
        variety: VarietySpec,
        poly: MultiPoly,
        mode: Mode,
    ) -> Self {
        Relation {
            id: id.into(),
            statement: statement.into(),
            variety,
            poly,
            mode,
            expect: true,
        }
    }

    fn negative(mut self) -> Self {
        self.expect = false;
        self
    }

    /// Degree of the membership test actually performed.
    pub fn test_degree(&self) -> usize {
        let d = self.poly.degree();
        match self.mode {
            Mode::Approx(k) => d + 2 * k,
            _ => d,
        }
    }

    /// Whether the polynomial vanishes in the stated sense.
    pub fn holds(&self, engine: &Engine, field: FieldSpec) -> Result<bool> {
        match &self.mode {
            Mode::Exact => engine.member(&self.poly, &self.variety, field),
            Mode::Approx(k) => engine.approx_zero(&self.poly, &self.variety, *k, field),
            Mode::WithFamily(fam) => engine.member_with_extra_generators(&self.poly, &self.variety, fam, field),
        }
    }

    /// Did the check come out as expected?
    pub fn check(&self, engine: &Engine, field: FieldSpec) -> Result<bool> {
        Ok(self.holds(engine, field)? == self.expect)
    }
}

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn on_seed(p: &OpPoly) -> MultiPoly {
    apply_poly(&seed_poly((1, 2)), p)
}

fn sym_name(s: OpSym) -> &'static str {
    match s {
        OpSym::R => "R",
        OpSym::L => "L",
        OpSym::H => "H",
    }
}

fn t(sym: OpSym, i: u32) -> OpPoly {
    OpPoly::letter(sym, i)
}

/// `x^3 = (x x) x`, fully linearized on `x1, x2, x3`.
pub fn cube_linearized() -> MultiPoly {
    x(1).mul(&x(1)).mul(&x(1)).multilinearize()
}

/// Exact relations of the operator algebra over `RA2`.
pub fn operator_relations() -> Vec<Relation> {
    let ra2 = VarietySpec::ra2();
    let mut out = vec![
        Relation::new(
            "eq4",
            "R_x R_y + R_y R_x = 0",
            ra2.clone(),
            on_seed(&r(3).mul(&r(4)).add(&r(4).mul(&r(3)))),
            Mode::Exact,
        ),
        Relation::new(
            "eq4_single",
            "R_x R_y = 0",
            ra2.clone(),
            on_seed(&r(3).mul(&r(4))),
            Mode::Exact,
        )
        .negative(),
        Relation::new(
            "eq5",
            "[R_x R_y, L_z] = 0",
            ra2.clone(),
            on_seed(&r(3).mul(&r(4)).commutator(&super::l(5))),
            Mode::Exact,
        ),
        Relation::new(
            "eq6",
            "[R_x, L_y] + L_x L_y = 0",
            ra2.clone(),
            on_seed(&r(3).commutator(&super::l(4)).add(&super::l(3).mul(&super::l(4)))),
            Mode::Exact,
        ),
        Relation::new(
            "eq7",
            "3 R_x R_y + H_x H_y = 2 [R_x, H_y] + H_x R_y + H_y R_x",
            ra2.clone(),
            on_seed(
                &r(3).mul(&r(4)).scale(&q(3)).add(&h(3).mul(&h(4))).sub(
                    &r(3)
                        .commutator(&h(4))
                        .scale(&q(2))
                        .add(&h(3).mul(&r(4)))
                        .add(&h(4).mul(&r(3))),
                ),
            ),
            Mode::Exact,
        ),
        Relation::new(
            "center_r",
            "[R_x R_y, R_z] = 0",
            ra2.clone(),
            on_seed(&r(3).mul(&r(4)).commutator(&r(5))),
            Mode::Exact,
        ),
        Relation::new(
            "center_h",
            "[R_x R_y, H_z] = 0",
            ra2.clone(),
            on_seed(&r(3).mul(&r(4)).commutator(&h(5))),
            Mode::Exact,
        ),
        Relation::new(
            "jordan_h",
            "(x o y) H_z = (x o y) z - (z x) y - (z y) x",
            ra2.clone(),
            {
                let j = x(1).jordan(&x(2));
                let lhs = apply(&j, &OpWord::new(vec![(OpSym::H, 3)]));
                let rhs = &(&j.mul(&x(3)) - &x(3).mul(&x(1)).mul(&x(2))) - &x(3).mul(&x(2)).mul(&x(1));
                &lhs - &rhs
            },
            Mode::Exact,
        ),
    ];
    let hr2 = on_seed(
        &OpPoly::word(OpWord::uniform(OpSym::H, &[3, 4])).sub(&OpPoly::word(OpWord::uniform(OpSym::R, &[3, 4]))),
    );
    out.push(Relation::new(
        "h_equiv_r_mod_l",
        "H(1,2) = R(1,2) mod the left ideal",
        ra2.clone(),
        hr2.clone(),
        Mode::WithFamily(GeneratorFamily::LeftIdeal { seed: (1, 2) }),
    ));
    out.push(Relation::new("h_equiv_r_plain", "H(1,2) = R(1,2)", ra2, hr2, Mode::Exact).negative());
    out
}

/// Relations holding up to `≈` in `RA-L(2)`, plus the extended-tier
/// relations of degree 7 and 8.
pub fn approx_relations() -> Vec<Relation> {
    let ral2 = VarietySpec::ral(2);
    let cube = cube_linearized();
    let mut out = vec![
        Relation::new("eq8", "x^3 ~ 0", ral2.clone(), cube.clone(), Mode::Approx(1)),
        Relation::new(
            "eq8_ra2",
            "x^3 ~ 0 without Lie-nilpotency",
            VarietySpec::ra2(),
            cube,
            Mode::Approx(1),
        )
        .negative(),
    ];
    for s1 in [OpSym::R, OpSym::H] {
        for s2 in [OpSym::R, OpSym::H] {
            let w = OpWord::new(vec![(s1, 1), (s2, 2)]);
            let f = apply(&seed_poly((1, 2)), &w).multilinearize();
            out.push(Relation::new(
                format!("eq9_{}{}", sym_name(s1), sym_name(s2)),
                format!("(x y) {}_x {}_y ~ 0, linearized", sym_name(s1), sym_name(s2)),
                ral2.clone(),
                f,
                Mode::Approx(1),
            ));
        }
    }
    out.push(Relation::new(
        "eq10",
        "3 R_x R_y - 2 [R_x, H_y] + H_x H_y ~ 0",
        ral2.clone(),
        on_seed(
            &r(3)
                .mul(&r(4))
                .scale(&q(3))
                .sub(&r(3).commutator(&h(4)).scale(&q(2)))
                .add(&h(3).mul(&h(4))),
        ),
        Mode::Approx(1),
    ));
    for s in [OpSym::R, OpSym::H] {
        let n = sym_name(s);
        let jz = |a: u32, b: u32, c: u32| apply_poly(&x(a).jordan(&x(b)), &t(s, c));
        out.push(Relation::new(
            format!("aux_jordan_{n}"),
            format!("(x o y) {n}_z + (y o z) {n}_x + (z o x) {n}_y ~ 0"),
            ral2.clone(),
            &(&jz(1, 2, 3) + &jz(2, 3, 1)) + &jz(3, 1, 2),
            Mode::Approx(1),
        ));
        let cw = |a: u32, b: u32, c: u32, d: u32| apply_poly(&x(a).commutator(&x(b)), &t(s, c).mul(&t(s, d)));
        // x, y, z, t = x1, x2, x3, x4
        out.push(Relation::new(
            format!("aux_commutator_{n}"),
            format!("[x,y] {n}_z {n}_t + [x,t] {n}_z {n}_y + [z,y] {n}_x {n}_t + [z,t] {n}_x {n}_y ~ 0"),
            ral2.clone(),
            &(&(&cw(1, 2, 3, 4) + &cw(1, 4, 3, 2)) + &cw(3, 2, 1, 4)) + &cw(3, 4, 1, 2),
            Mode::Approx(1),
        ));
    }
    out.push(Relation::new(
        "eq11",
        "[R_x, H_y H_z] ~ 0",
        ral2,
        on_seed(&r(3).commutator(&h(4).mul(&h(5)))),
        Mode::Approx(1),
    ));
    out.push(eq12_t1());
    out
}

/// `H(1,2) ≅ 0 (mod ℋ_3)` in `RA-L(3)`, through the instance
/// `(3 η R_x R_y - 2 R_x η H_y) R R` with `η = H(1,2)`.
pub fn eq12_t1() -> Relation {
    let eta = h(3).mul(&h(4));
    let p = eta
        .mul(&r(5))
        .mul(&r(6))
        .scale(&q(3))
        .sub(&r(5).mul(&eta).mul(&h(6)).scale(&q(2)));
    let f = on_seed(&p.mul(&r(7)).mul(&r(8)));
    Relation::new(
        "eq12_t1",
        "3 H(1,2) R_x R_y - 2 R_x H(1,2) H_y ~ 0 mod the H(3) ideal",
        VarietySpec::ral(3),
        f,
        Mode::WithFamily(GeneratorFamily::HIdeal { n: 3, seed: (1, 2) }),
    )
}

/// Skew-symmetry: `(x1 x2)(T3 T4 + T4 T3) R5 R6 = 0` in `RA-L(2)`.
pub fn skew_relations() -> Vec<Relation> {
    [OpSym::R, OpSym::H]
        .into_iter()
        .map(|s| {
            let p = t(s, 3).mul(&t(s, 4)).add(&t(s, 4).mul(&t(s, 3))).mul(&r(5)).mul(&r(6));
            Relation::new(
                format!("skew_{}", sym_name(s)),
                format!("(x1 x2)({0}3 {0}4 + {0}4 {0}3) R5 R6 = 0", sym_name(s)),
                VarietySpec::ral(2),
                on_seed(&p),
                Mode::Exact,
            )
        })
        .collect()
}

/// `x^3 w = 0` in `RA-L(2)` for every word `w` of length 2 and 3 over
/// `{R, L, H}` on fresh variables.
pub fn annihilation_relations() -> Vec<Relation> {
    let cube = cube_linearized();
    let mut out = Vec::new();
    for ops in [vec![4, 5], vec![4, 5, 6]] {
        for w in symbol_words(&ops) {
            out.push(Relation::new(
                format!(
                    "annihilate_{}",
                    w.letters().iter().map(|l| sym_name(l.0)).collect::<String>()
                ),
                format!("x^3 {w} = 0"),
                VarietySpec::ral(2),
                apply(&cube, &w),
                Mode::Exact,
            ));
        }
    }
    out
}
