//! Echelonized multilinear T-ideal components and their on-disk cache.
//!
//! Cache layout (all integers little-endian):
//!
//! ```text
//! magic      4 bytes  "MBAS"
//! version    u32      1
//! hash       32 bytes SHA-256 of the identity system
//! degree     u32
//! field      u8 kind (0 = rationals, 1 = prime) then u32 modulus (0 for rationals)
//! columns    u64      surviving monomials
//! total      u64      all multilinear monomials of the degree
//! rank       u64
//! rows       rank times: u32 entry count, then entries (u32 column, scalar)
//! ```
//!
//! Columns are ordinals among the surviving monomials in canonical order.
//! A prime-field scalar is a `u32` residue; a rational is a `u32` byte length
//! and the signed little-endian bytes of the numerator followed by the same
//! for the (positive) denominator.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;
use std::time::Instant;

use num_bigint::{BigInt, Sign};
use rayon::prelude::*;

use super::echelon::{Echelon, SparseRow};
use super::generate::{templates, IdentityTemplate, RowSource};
use super::space::{ComponentSpace, KillPatterns};
use super::variety::VarietySpec;
use crate::freealg::{MultiPoly, Term};
use crate::scalar::{Field, FieldSpec, PrimeField, Rational, RationalField};
use crate::{AlgebraError, Result};

const MAGIC: &[u8; 4] = b"MBAS";
const VERSION: u32 = 1;
const TEMPLATE_BATCH: usize = 32;

pub(crate) enum Reduced {
    Rational(Echelon<RationalField>),
    Prime(Echelon<PrimeField>),
}

/// Dispatches a generic body over the two echelon variants.
macro_rules! with_echelon {
    ($red:expr, $e:ident => $body:expr) => {
        match $red {
            Reduced::Rational($e) => $body,
            Reduced::Prime($e) => $body,
        }
    };
}

/// Symmetric representative of a field element as a rational.
pub(crate) fn elem_to_rational<F: Field>(field: &F, a: &F::Elem) -> Rational {
    match field.to_scalar(a) {
        crate::Scalar::Rational(q) => q,
        crate::Scalar::Modular { value, p } => {
            let v = if value > p / 2 {
                value as i64 - p as i64
            } else {
                value as i64
            };
            Rational::from_integer(v.into())
        }
    }
}

/// Column indices with rational coefficients.
pub(crate) type SparseCoords = Vec<(u32, Rational)>;

pub struct LinBasis {
    variety: String,
    hash: [u8; 32],
    field: FieldSpec,
    space: ComponentSpace,
    pub(crate) reduced: Reduced,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildStats {
    pub templates: usize,
    pub rows: usize,
    pub seconds: f64,
}

/// Splits an identity system into monomial kill patterns and the rest,
/// keeping only identities of degree at most `degree`.
pub(crate) fn split_identities(variety: &VarietySpec, degree: usize) -> (KillPatterns, Vec<IdentityTemplate>) {
    let mut kill = Vec::new();
    let mut rest = Vec::new();
    for f in variety.identities() {
        if f.degree() > degree {
            continue;
        }
        let t = IdentityTemplate::new(f);
        match t.monomial_shape() {
            Some(shape) => kill.push(shape.clone()),
            None => rest.push(t),
        }
    }
    (KillPatterns::new(kill), rest)
}

fn build_echelon<F: Field>(field: F, source: &RowSource<'_>, ncols: usize) -> Echelon<F> {
    let mut ech = Echelon::new(field.clone(), ncols);
    let idx: Vec<usize> = (0..source.template_count()).collect();
    for batch in idx.chunks(TEMPLATE_BATCH) {
        let residues: Vec<SparseRow<F::Elem>> = {
            let snapshot = &ech;
            batch
                .par_iter()
                .map_init(
                    || (snapshot.workspace(), Vec::new()),
                    |(work, buf), &t| {
                        buf.clear();
                        source.rows_of(t, buf);
                        let mut out = Vec::new();
                        for row in buf.iter() {
                            let input = row.iter().map(|&(c, v)| (c, field.from_i64(v)));
                            let r = snapshot.reduce_with(work, input);
                            if !r.is_empty() {
                                out.push(r);
                            }
                        }
                        out
                    },
                )
                .flatten()
                .collect()
        };
        for r in residues {
            ech.insert(r.cols.into_iter().zip(r.vals));
        }
    }
    ech.finalize();
    ech
}

impl LinBasis {
    /// Builds the echelonized component of the T-ideal of `variety` in
    /// multilinear degree `degree`.
    pub fn build(variety: &VarietySpec, degree: usize, field: FieldSpec) -> Result<(Self, BuildStats)> {
        let start = Instant::now();
        let (kill, rest) = split_identities(variety, degree);
        let space = ComponentSpace::new(degree, &kill);
        let source = RowSource::new(&space, templates(&rest, degree, &kill));
        let stats_templates = source.template_count();
        let stats_rows = source.row_count();
        let ncols = space.columns();
        let reduced = match field {
            FieldSpec::Rationals => Reduced::Rational(build_echelon(RationalField, &source, ncols)),
            FieldSpec::Prime(p) => Reduced::Prime(build_echelon(PrimeField::new(p), &source, ncols)),
        };
        let basis = LinBasis {
            variety: variety.name().to_string(),
            hash: variety.content_hash(),
            field,
            space,
            reduced,
        };
        let stats = BuildStats {
            templates: stats_templates,
            rows: stats_rows,
            seconds: start.elapsed().as_secs_f64(),
        };
        Ok((basis, stats))
    }

    pub fn variety_name(&self) -> &str {
        &self.variety
    }

    pub fn degree(&self) -> usize {
        self.space.degree()
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn space(&self) -> &ComponentSpace {
        &self.space
    }

    pub fn total_monomials(&self) -> usize {
        self.space.total_monomials()
    }

    /// Rank of the T-ideal component, killed monomials included.
    pub fn ideal_dim(&self) -> usize {
        self.space.killed_monomials() + self.projected_rank()
    }

    /// Rank of the consequences projected onto the surviving monomials.
    pub fn projected_rank(&self) -> usize {
        with_echelon!(&self.reduced, e => e.rank())
    }

    /// Dimension of the multilinear component of the relatively free algebra.
    pub fn quotient_dim(&self) -> usize {
        self.total_monomials() - self.ideal_dim()
    }

    /// The pivot rows as polynomials on `x1..xd` (killed monomials are not
    /// listed).
    pub fn rows(&self) -> Vec<MultiPoly> {
        with_echelon!(&self.reduced, e => e
            .rows()
            .iter()
            .map(|r| self.row_poly(e.field(), r, &identity_vars(self.degree())))
            .collect())
    }

    /// Coordinates of a multilinear polynomial of this degree, with variables
    /// renamed in increasing order onto `1..=d`. Killed monomials are dropped.
    pub(crate) fn coordinates(&self, f: &MultiPoly) -> Result<(Vec<u32>, SparseCoords)> {
        if !f.is_zero() && !f.is_multilinear() {
            return Err(AlgebraError::NotMultilinear);
        }
        if !f.is_zero() && f.degree() != self.degree() {
            return Err(AlgebraError::Config(format!(
                "polynomial of degree {} checked against a degree-{} basis",
                f.degree(),
                self.degree()
            )));
        }
        let vars = f.variables();
        let mut coords = Vec::with_capacity(f.len());
        for (t, c) in f.terms() {
            let local = t.relabel(|v| vars.binary_search(&v).expect("variable present") as u32 + 1);
            if let Some(col) = self.space.column(&local) {
                coords.push((col, c.clone()));
            }
        }
        Ok((vars, coords))
    }

    fn row_poly<F: Field>(&self, field: &F, row: &SparseRow<F::Elem>, vars: &[u32]) -> MultiPoly {
        let terms = row.iter().map(|(col, v)| {
            let t: Term = self.space.term(col).relabel(|l| vars[l as usize - 1]);
            (elem_to_rational(field, v), t)
        });
        MultiPoly::from_terms(terms).expect("basis rows are homogeneous")
    }

    /// Residue modulo the component, in the original variables. Over a prime
    /// field the coefficients are symmetric representatives.
    pub fn normal_form(&self, f: &MultiPoly) -> Result<MultiPoly> {
        let (vars, coords) = self.coordinates(f)?;
        with_echelon!(&self.reduced, e => {
            let field = e.field();
            let input = coords
                .iter()
                .map(|(c, q)| Ok((*c, field.from_rational(q)?)))
                .collect::<Result<Vec<_>>>()?;
            let mut work = e.workspace();
            let r = e.reduce_with(&mut work, input);
            Ok(self.row_poly(field, &r, &vars))
        })
    }

    pub fn contains(&self, f: &MultiPoly) -> Result<bool> {
        Ok(self.normal_form(f)?.is_zero())
    }

    /// Is `f` in the span of the component together with `extra`? All inputs
    /// must be multilinear of this degree on the same variables as `f`.
    pub fn contains_with(&self, f: &MultiPoly, extra: &[MultiPoly]) -> Result<bool> {
        let vars = f.variables();
        let mut residues = Vec::with_capacity(extra.len());
        for g in extra {
            if g.is_zero() {
                continue;
            }
            if g.variables() != vars {
                return Err(AlgebraError::Config(
                    "extra generators must use the variables of the tested polynomial".into(),
                ));
            }
            residues.push(self.coordinates(g)?.1);
        }
        let target = self.coordinates(f)?.1;
        with_echelon!(&self.reduced, e => {
            let field = *e.field();
            let to_elems = |row: &[(u32, Rational)]| -> Result<Vec<(u32, _)>> {
                row.iter().map(|(c, q)| Ok((*c, field.from_rational(q)?))).collect()
            };
            let mut work = e.workspace();
            let mut extra_ech = Echelon::new(field, self.space.columns());
            for row in &residues {
                let r = e.reduce_with(&mut work, to_elems(row)?);
                extra_ech.insert(r.cols.into_iter().zip(r.vals));
            }
            let r = e.reduce_with(&mut work, to_elems(&target)?);
            Ok(extra_ech.reduce(r.cols.into_iter().zip(r.vals)).is_empty())
        })
    }

    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&VERSION.to_le_bytes());
        buf.extend_from_slice(&self.hash);
        buf.extend_from_slice(&(self.degree() as u32).to_le_bytes());
        match self.field {
            FieldSpec::Rationals => {
                buf.push(0);
                buf.extend_from_slice(&0u32.to_le_bytes());
            }
            FieldSpec::Prime(p) => {
                buf.push(1);
                buf.extend_from_slice(&p.to_le_bytes());
            }
        }
        buf.extend_from_slice(&(self.space.columns() as u64).to_le_bytes());
        buf.extend_from_slice(&(self.total_monomials() as u64).to_le_bytes());
        buf.extend_from_slice(&(self.projected_rank() as u64).to_le_bytes());
        match &self.reduced {
            Reduced::Rational(e) => {
                for row in e.rows() {
                    buf.extend_from_slice(&(row.len() as u32).to_le_bytes());
                    for (c, q) in row.iter() {
                        buf.extend_from_slice(&c.to_le_bytes());
                        write_bigint(&mut buf, q.numer());
                        write_bigint(&mut buf, q.denom());
                    }
                }
            }
            Reduced::Prime(e) => {
                for row in e.rows() {
                    buf.extend_from_slice(&(row.len() as u32).to_le_bytes());
                    for (c, v) in row.iter() {
                        buf.extend_from_slice(&c.to_le_bytes());
                        buf.extend_from_slice(&v.to_le_bytes());
                    }
                }
            }
        }
        let cache_err = |e: std::io::Error| AlgebraError::Cache {
            path: path.display().to_string(),
            message: e.to_string(),
        };
        let dir = path.parent().unwrap_or(Path::new("."));
        fs::create_dir_all(dir).map_err(cache_err)?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(cache_err)?;
        tmp.write_all(&buf).map_err(cache_err)?;
        tmp.as_file().sync_all().map_err(cache_err)?;
        tmp.persist(path).map_err(|e| cache_err(e.error))?;
        Ok(())
    }

    /// Loads a cached component; `Ok(None)` when the file is absent or was
    /// written for a different identity system, degree or field.
    pub fn read_cache(path: &Path, variety: &VarietySpec, degree: usize, field: FieldSpec) -> Result<Option<Self>> {
        let mut bytes = Vec::new();
        match fs::File::open(path) {
            Ok(mut f) => f.read_to_end(&mut bytes)?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let corrupt = |message: &str| AlgebraError::Cache {
            path: path.display().to_string(),
            message: message.to_string(),
        };
        let mut r = ByteReader { bytes: &bytes, pos: 0 };
        if r.take(4).ok_or_else(|| corrupt("truncated header"))? != MAGIC {
            return Err(corrupt("bad magic"));
        }
        if r.u32()? != VERSION {
            return Ok(None);
        }
        let hash = r.take(32).ok_or_else(|| corrupt("truncated header"))?;
        if hash != variety.content_hash() {
            return Ok(None);
        }
        let stored_degree = r.u32()? as usize;
        let kind = r.take(1).ok_or_else(|| corrupt("truncated header"))?[0];
        let p = r.u32()?;
        let stored_field = match kind {
            0 => FieldSpec::Rationals,
            1 => FieldSpec::Prime(p),
            _ => return Err(corrupt("unknown field kind")),
        };
        if stored_degree != degree || stored_field != field {
            return Ok(None);
        }
        let (kill, _) = split_identities(variety, degree);
        let space = ComponentSpace::new(degree, &kill);
        let columns = r.u64()? as usize;
        let total = r.u64()? as usize;
        if columns != space.columns() || total != space.total_monomials() {
            return Err(corrupt("column space does not match"));
        }
        let rank = r.u64()? as usize;
        let reduced = match field {
            FieldSpec::Rationals => {
                let mut rows = Vec::with_capacity(rank);
                for _ in 0..rank {
                    let n = r.u32()? as usize;
                    let mut row = SparseRow::empty();
                    for _ in 0..n {
                        row.cols.push(r.u32()?);
                        let num = r.bigint()?;
                        let den = r.bigint()?;
                        if den.sign() != Sign::Plus {
                            return Err(corrupt("non-positive denominator"));
                        }
                        row.vals.push(Rational::new(num, den));
                    }
                    rows.push(row);
                }
                Reduced::Rational(Echelon::from_reduced_rows(
                    RationalField,
                    columns,
                    validate(rows, columns).map_err(&corrupt)?,
                ))
            }
            FieldSpec::Prime(p) => {
                let mut rows = Vec::with_capacity(rank);
                for _ in 0..rank {
                    let n = r.u32()? as usize;
                    let mut row = SparseRow::empty();
                    for _ in 0..n {
                        row.cols.push(r.u32()?);
                        let v = r.u32()?;
                        if v >= p {
                            return Err(corrupt("residue out of range"));
                        }
                        row.vals.push(v);
                    }
                    rows.push(row);
                }
                Reduced::Prime(Echelon::from_reduced_rows(
                    PrimeField::new(p),
                    columns,
                    validate(rows, columns).map_err(&corrupt)?,
                ))
            }
        };
        if r.pos != bytes.len() {
            return Err(corrupt("trailing bytes"));
        }
        Ok(Some(LinBasis {
            variety: variety.name().to_string(),
            hash: variety.content_hash(),
            field,
            space,
            reduced,
        }))
    }
}

fn identity_vars(d: usize) -> Vec<u32> {
    (1..=d as u32).collect()
}

fn validate<E>(rows: Vec<SparseRow<E>>, columns: usize) -> std::result::Result<Vec<SparseRow<E>>, &'static str> {
    let mut last_pivot = None;
    for row in &rows {
        if row.is_empty() {
            return Err("empty row");
        }
        if !row.cols.windows(2).all(|w| w[0] < w[1]) || *row.cols.last().unwrap() as usize >= columns {
            return Err("row columns out of order or range");
        }
        if last_pivot.is_some_and(|p| p >= row.cols[0]) {
            return Err("pivots out of order");
        }
        last_pivot = Some(row.cols[0]);
    }
    Ok(rows)
}

fn write_bigint(buf: &mut Vec<u8>, n: &BigInt) {
    let bytes = n.to_signed_bytes_le();
    buf.extend_from_slice(&(bytes.len() as u32).to_le_bytes());
    buf.extend_from_slice(&bytes);
}

struct ByteReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        let s = self.bytes.get(self.pos..self.pos + n)?;
        self.pos += n;
        Some(s)
    }

    fn truncated() -> AlgebraError {
        AlgebraError::Cache {
            path: String::new(),
            message: "truncated file".into(),
        }
    }

    fn u32(&mut self) -> Result<u32> {
        let b = self.take(4).ok_or_else(Self::truncated)?;
        Ok(u32::from_le_bytes(b.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        let b = self.take(8).ok_or_else(Self::truncated)?;
        Ok(u64::from_le_bytes(b.try_into().unwrap()))
    }

    fn bigint(&mut self) -> Result<BigInt> {
        let n = self.u32()? as usize;
        let b = self.take(n).ok_or_else(Self::truncated)?;
        Ok(BigInt::from_signed_bytes_le(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    #[test]
    fn low_degree_dimensions() {
        let ra2 = VarietySpec::ra2();
        let (b2, _) = LinBasis::build(&ra2, 2, FieldSpec::Rationals).unwrap();
        assert_eq!(b2.quotient_dim(), 2);
        let (b3, _) = LinBasis::build(&ra2, 3, FieldSpec::Rationals).unwrap();
        assert_eq!(b3.total_monomials(), 12);
        assert_eq!(b3.quotient_dim(), 9);
    }

    #[test]
    fn normal_form_renames_variables() {
        let (b, _) = LinBasis::build(&VarietySpec::ra2(), 3, FieldSpec::Rationals).unwrap();
        let f = parse_poly("1 ((x2 x5) x7)\n1 ((x2 x7) x5)\n-1 (x2 (x5 x7))\n-1 (x2 (x7 x5))").unwrap();
        assert!(b.contains(&f).unwrap());
        let g = parse_poly("1 ((x2 x5) x7)").unwrap();
        let nf = b.normal_form(&g).unwrap();
        assert_eq!(nf.variables(), vec![2, 5, 7]);
        assert_eq!(b.normal_form(&nf).unwrap(), nf);
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for field in [FieldSpec::Rationals, FieldSpec::Prime(101)] {
            let ra2 = VarietySpec::ra2();
            let (b, _) = LinBasis::build(&ra2, 4, field).unwrap();
            let path = dir.path().join(format!("ra2-d4-{field}.basis"));
            b.write_cache(&path).unwrap();
            let loaded = LinBasis::read_cache(&path, &ra2, 4, field).unwrap().unwrap();
            assert_eq!(loaded.quotient_dim(), b.quotient_dim());
            assert_eq!(loaded.rows(), b.rows());
            assert!(LinBasis::read_cache(&path, &VarietySpec::ral(2), 4, field)
                .unwrap()
                .is_none());
            assert!(LinBasis::read_cache(&path, &ra2, 5, field).unwrap().is_none());
            let mut bytes = fs::read(&path).unwrap();
            bytes.truncate(bytes.len() - 1);
            fs::write(&path, &bytes).unwrap();
            assert!(LinBasis::read_cache(&path, &ra2, 4, field).is_err());
        }
    }
}
