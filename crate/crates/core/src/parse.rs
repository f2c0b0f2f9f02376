//! Text grammars.
//!
//! ```text
//! term     := "x" digits | "(" term " " term ")"
//! poly     := line*            line := scalar " " term     (summed)
//! scalar   := ["-"] digits ["/" digits]
//! opword   := ("[" ("R"|"L"|"H") " " "x" digits "]")*
//! seeded   := term opword
//! envelope := pair ("+" pair)*  pair := [scalar] grass ("⊗"|"@") sym
//! grass    := "1" | ("e" digits)+
//! sym      := "X" | "A(" digits "," digits ")"
//! ```
//!
//! Blank lines and lines starting with `#` are ignored in multi-line input.
//! Errors carry 1-based line and column.

use std::collections::BTreeMap;

use num_traits::One;

use crate::freealg::{MultiPoly, Term};
use crate::operalg::{OpSym, OpWord};
use crate::scalar::{parse_rational, Rational};
use crate::superalg::{EnvelopeElem, GrassmannElem, SuperBasisSym};
use crate::{AlgebraError, Result};

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col_offset: usize,
    _src: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str, line: usize) -> Self {
        Cursor {
            chars: src.chars().collect(),
            pos: 0,
            line,
            col_offset: 0,
            _src: src,
        }
    }

    fn error(&self, message: impl Into<String>) -> AlgebraError {
        AlgebraError::Syntax {
            line: self.line,
            column: self.col_offset + self.pos + 1,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, want: char) -> Result<()> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => Err(self.error(format!("expected `{want}`, found `{c}`"))),
            None => Err(self.error(format!("expected `{want}`, found end of input"))),
        }
    }

    fn digits(&mut self) -> Result<u32> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse::<u32>().map_err(|_| self.error("number out of range"))
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.chars.len()
    }

    fn generator(&mut self) -> Result<u32> {
        self.expect('x')?;
        let i = self.digits()?;
        if i == 0 {
            return Err(self.error("generator indices start at 1"));
        }
        Ok(i)
    }

    fn term(&mut self) -> Result<Term> {
        self.skip_ws();
        match self.peek() {
            Some('x') => Ok(Term::var(self.generator()?)),
            Some('(') => {
                self.bump();
                let left = self.term()?;
                let before = self.pos;
                self.skip_ws();
                if self.pos == before {
                    return Err(self.error("expected a space between factors"));
                }
                let right = self.term()?;
                self.skip_ws();
                match self.peek() {
                    Some(')') => {
                        self.bump();
                        Ok(Term::mul(&left, &right))
                    }
                    Some(_) => Err(self.error("a product node takes exactly two factors")),
                    None => Err(self.error("unclosed `(`")),
                }
            }
            Some(c) => Err(self.error(format!("unexpected `{c}` at start of term"))),
            None => Err(self.error("expected a term, found end of input")),
        }
    }

    fn scalar(&mut self) -> Result<Rational> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.peek(), Some('-') | Some('+')) {
            self.pos += 1;
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '/') {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        let s = s.strip_prefix('+').unwrap_or(&s);
        parse_rational(s).map_err(|e| {
            let mut err = self.error(e.to_string());
            if let AlgebraError::Syntax { column, .. } = &mut err {
                *column = self.col_offset + start + 1;
            }
            err
        })
    }

    fn opword(&mut self) -> Result<OpWord> {
        let mut letters = Vec::new();
        loop {
            self.skip_ws();
            if self.peek() != Some('[') {
                break;
            }
            self.bump();
            self.skip_ws();
            let sym = match self.bump() {
                Some('R') => OpSym::R,
                Some('L') => OpSym::L,
                Some('H') => OpSym::H,
                _ => {
                    self.pos = self.pos.saturating_sub(1);
                    return Err(self.error("operator symbol must be R, L or H"));
                }
            };
            self.skip_ws();
            let operand = self.generator()?;
            self.skip_ws();
            self.expect(']')?;
            letters.push((sym, operand));
        }
        Ok(OpWord::new(letters))
    }
}

/// Content lines paired with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('#')
    })
}

pub fn parse_term(text: &str) -> Result<Term> {
    let mut c = Cursor::new(text, 1);
    let t = c.term()?;
    if !c.at_end() {
        return Err(c.error("trailing input after term"));
    }
    Ok(t)
}

/// One `<scalar> <term>` per line, summed. A bare term means coefficient 1.
pub fn parse_poly(text: &str) -> Result<MultiPoly> {
    let mut out = MultiPoly::zero();
    for (line, src) in content_lines(text) {
        let mut c = Cursor::new(src, line);
        c.skip_ws();
        let coeff = if matches!(c.peek(), Some('x') | Some('(')) {
            Rational::one()
        } else {
            c.scalar()?
        };
        let term = c.term()?;
        if !c.at_end() {
            return Err(c.error("trailing input after term"));
        }
        out.add_term(term, coeff).map_err(|e| AlgebraError::Syntax {
            line,
            column: 1,
            message: e.to_string(),
        })?;
    }
    Ok(out)
}

pub fn parse_opword(text: &str) -> Result<OpWord> {
    let mut c = Cursor::new(text, 1);
    let w = c.opword()?;
    if !c.at_end() {
        return Err(c.error("trailing input after operator word"));
    }
    Ok(w)
}

/// A seed term followed by an operator word, e.g. `(x1 x2)[R x3][H x4]`.
pub fn parse_seeded(text: &str) -> Result<(Term, OpWord)> {
    let mut c = Cursor::new(text, 1);
    let seed = c.term()?;
    let w = c.opword()?;
    if !c.at_end() {
        return Err(c.error("trailing input after operator word"));
    }
    Ok((seed, w))
}

/// Lines `<scalar> <seed><opword>`; each line is expanded by applying the
/// word to the seed and the results are summed.
pub fn parse_seeded_poly(text: &str) -> Result<Vec<(Rational, Term, OpWord)>> {
    let mut out = Vec::new();
    for (line, src) in content_lines(text) {
        let mut c = Cursor::new(src, line);
        c.skip_ws();
        let coeff = if matches!(c.peek(), Some('x') | Some('(')) {
            Rational::one()
        } else {
            c.scalar()?
        };
        let seed = c.term()?;
        let w = c.opword()?;
        if !c.at_end() {
            return Err(c.error("trailing input after operator word"));
        }
        out.push((coeff, seed, w));
    }
    Ok(out)
}

fn super_sym(c: &mut Cursor) -> Result<SuperBasisSym> {
    c.skip_ws();
    match c.bump() {
        Some('X') | Some('x') => Ok(SuperBasisSym::X),
        Some('A') | Some('a') => {
            c.skip_ws();
            c.expect('(')?;
            c.skip_ws();
            let i = c.digits()?;
            c.skip_ws();
            c.expect(',')?;
            c.skip_ws();
            let j = c.digits()?;
            c.skip_ws();
            c.expect(')')?;
            Ok(SuperBasisSym::A(i, j))
        }
        _ => {
            c.pos = c.pos.saturating_sub(1);
            Err(c.error("expected `X` or `A(i,j)`"))
        }
    }
}

fn grassmann_word(c: &mut Cursor, generators: u32) -> Result<Vec<u32>> {
    c.skip_ws();
    if c.peek() == Some('1') {
        c.bump();
        return Ok(Vec::new());
    }
    let mut gens = Vec::new();
    while c.peek() == Some('e') {
        c.bump();
        let g = c.digits()?;
        if g == 0 || g > generators {
            return Err(c.error(format!("Grassmann generator e{g} outside 1..={generators}")));
        }
        gens.push(g);
    }
    if gens.is_empty() {
        return Err(c.error("expected `1` or a Grassmann word `e1e2...`"));
    }
    Ok(gens)
}

/// Parses an envelope element such as `2 e1e2 ⊗ A(1,0) + e3 ⊗ X`; `@` may
/// stand in for `⊗`.
pub fn parse_envelope(text: &str, generators: u32) -> Result<EnvelopeElem> {
    let mut c = Cursor::new(text, 1);
    let mut out = EnvelopeElem::zero(generators);
    loop {
        c.skip_ws();
        let mut coeff = Rational::one();
        if matches!(c.peek(), Some('-')) {
            c.bump();
            coeff = -coeff;
            c.skip_ws();
        }
        let word = if matches!(c.peek(), Some(ch) if ch.is_ascii_digit()) {
            coeff *= c.scalar()?;
            c.skip_ws();
            if matches!(c.peek(), Some('⊗') | Some('@')) {
                Vec::new()
            } else {
                grassmann_word(&mut c, generators)?
            }
        } else {
            grassmann_word(&mut c, generators)?
        };
        c.skip_ws();
        match c.peek() {
            Some('⊗') | Some('@') => {
                c.bump();
            }
            _ => return Err(c.error("expected `⊗` between Grassmann word and basis symbol")),
        }
        let sym = super_sym(&mut c)?;
        let g = GrassmannElem::from_word(generators, &word, coeff);
        let pair = EnvelopeElem::pair(g, sym).map_err(|_| c.error("Grassmann and algebra parities differ"))?;
        out = out.add(&pair);
        c.skip_ws();
        match c.peek() {
            None => break,
            Some('+') => {
                c.bump();
            }
            Some('-') => {}
            Some(ch) => return Err(c.error(format!("unexpected `{ch}`"))),
        }
    }
    Ok(out)
}

/// Substitution files: lines `x<i> = <envelope element>`.
pub fn parse_envelope_substitution(text: &str, generators: u32) -> Result<BTreeMap<u32, EnvelopeElem>> {
    let mut out = BTreeMap::new();
    for (line, src) in content_lines(text) {
        let mut c = Cursor::new(src, line);
        c.skip_ws();
        let var = c.generator()?;
        c.skip_ws();
        c.expect('=')?;
        let rest: String = c.chars[c.pos..].iter().collect();
        let offset = c.pos;
        let elem = parse_envelope(&rest, generators).map_err(|e| match e {
            AlgebraError::Syntax { column, message, .. } => AlgebraError::Syntax {
                line,
                column: column + offset,
                message,
            },
            other => other,
        })?;
        out.insert(var, elem);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_leaning_term() {
        let t = parse_term("(x1 (x2 x3))").unwrap();
        assert_eq!(t.degree(), 3);
        assert_eq!(t.shape(), &[true, false, true, false, false]);
        assert_eq!(t.to_string(), "(x1 (x2 x3))");
    }

    #[test]
    fn polynomial_lines_sum() {
        let p = parse_poly("1/2 (x1 x2)\n-1/2 (x2 x1)\n").unwrap();
        let half = Rational::new(1.into(), 2.into());
        assert_eq!(p, crate::freealg::x(1).commutator(&crate::freealg::x(2)).scale(&half));
        let q = parse_poly("# comment\n\n3 x1\n-3 x1").unwrap();
        assert!(q.is_zero());
    }

    #[test]
    fn rejects_malformed_trees() {
        let err = parse_term("(x1 x2 x3)").unwrap_err();
        match err {
            AlgebraError::Syntax { line, column, .. } => {
                assert_eq!(line, 1);
                assert_eq!(column, 8);
            }
            other => panic!("unexpected error {other}"),
        }
        assert!(parse_term("(x1)").is_err());
        assert!(parse_term("(x1 x2").is_err());
        assert!(parse_term("x0").is_err());
        assert!(parse_term("y1").is_err());
        assert!(parse_term("(x1x2)").is_err());
        let err = parse_poly("1 x1\n2 (x1 x2 x3)").unwrap_err();
        assert!(matches!(err, AlgebraError::Syntax { line: 2, .. }));
        assert!(parse_poly("1 x1\n1 x2").is_err(), "inhomogeneous sum");
    }

    #[test]
    fn operator_words() {
        let (seed, w) = parse_seeded("(x1 x2)[R x3][H x4]").unwrap();
        assert_eq!(seed.to_string(), "(x1 x2)");
        assert_eq!(w.letters(), &[(OpSym::R, 3), (OpSym::H, 4)]);
        assert!(parse_opword("[Q x3]").is_err());
        assert!(parse_opword("[R x3").is_err());
        assert!(parse_opword("").unwrap().is_empty());
    }

    #[test]
    fn envelope_syntax() {
        let e = parse_envelope("e1e2 ⊗ A(1,1) + 2 e3 @ X", 4).unwrap();
        assert_eq!(e.len(), 2);
        assert!(
            parse_envelope("e1 ⊗ A(0,0)", 4).is_err(),
            "odd Grassmann with even symbol"
        );
        assert!(parse_envelope("e9 ⊗ X", 4).is_err());
        let s = parse_envelope_substitution("x1 = e1 ⊗ X\nx2 = 1 ⊗ A(0,0)", 4).unwrap();
        assert_eq!(s.len(), 2);
    }
}
