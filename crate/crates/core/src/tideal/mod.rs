//! Multilinear components of T-ideals, membership and the `≈` relation.
//!
//! Consequences of the identities are generated at the level of tree shapes
//! and echelonized per degree; monomial identities are applied by deleting
//! the monomials they generate. Membership is tested for multilinear
//! polynomials (others are linearized first), which is exact over the
//! rationals and over `F_p` with `p` above the degree.

pub mod basis;
pub mod echelon;
pub mod family;
pub mod generate;
pub mod space;
pub mod variety;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

pub use basis::{BuildStats, LinBasis};
pub use family::GeneratorFamily;
pub use variety::VarietySpec;

use crate::freealg::{x, MultiPoly};
use crate::scalar::FieldSpec;
use crate::{AlgebraError, Result};

pub const DEFAULT_DEGREE_CAP: usize = 7;

#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub degree_cap: usize,
    pub cache_dir: Option<PathBuf>,
    /// Permit `F_p` with `p <= degree`.
    pub allow_small_prime: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            degree_cap: DEFAULT_DEGREE_CAP,
            cache_dir: None,
            allow_small_prime: false,
        }
    }
}

type Key = ([u8; 32], usize, FieldSpec);

#[derive(Default)]
struct Slot {
    basis: OnceLock<Arc<LinBasis>>,
    build: Mutex<()>,
}

/// Where a basis came from.
#[derive(Debug, Clone, PartialEq)]
pub enum BasisOrigin {
    Built(BuildStats),
    Cache,
}

/// Shared store of component bases, keyed by identity system, degree and
/// field. Each basis is built once; concurrent requests for the same key
/// wait for the builder.
pub struct Engine {
    config: EngineConfig,
    slots: Mutex<HashMap<Key, Arc<Slot>>>,
    log: Mutex<Vec<(String, usize, FieldSpec, BasisOrigin)>>,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new(EngineConfig::default())
    }
}

impl Engine {
    pub fn new(config: EngineConfig) -> Self {
        Engine {
            config,
            slots: Mutex::new(HashMap::new()),
            log: Mutex::new(Vec::new()),
        }
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn degree_cap(&self) -> usize {
        self.config.degree_cap
    }

    /// `(variety, degree, field, origin)` for every basis obtained so far.
    pub fn basis_log(&self) -> Vec<(String, usize, FieldSpec, BasisOrigin)> {
        self.log.lock().unwrap().clone()
    }

    fn check_degree(&self, degree: usize, field: FieldSpec) -> Result<()> {
        if degree > self.config.degree_cap {
            return Err(AlgebraError::DegreeCapExceeded {
                degree,
                cap: self.config.degree_cap,
            });
        }
        field.check_degree(degree, self.config.allow_small_prime)?;
        Ok(())
    }

    pub fn cache_path(dir: &Path, variety: &VarietySpec, degree: usize, field: FieldSpec) -> PathBuf {
        dir.join(format!("{}-d{degree}-{field}.basis", variety.name()))
    }

    /// The echelonized component of degree `degree`.
    pub fn component_basis(&self, variety: &VarietySpec, degree: usize, field: FieldSpec) -> Result<Arc<LinBasis>> {
        self.check_degree(degree, field)?;
        let key = (variety.content_hash(), degree, field);
        let slot = Arc::clone(self.slots.lock().unwrap().entry(key).or_default());
        if let Some(b) = slot.basis.get() {
            return Ok(Arc::clone(b));
        }
        let _guard = slot.build.lock().unwrap();
        if let Some(b) = slot.basis.get() {
            return Ok(Arc::clone(b));
        }
        let path = self
            .config
            .cache_dir
            .as_deref()
            .map(|d| Self::cache_path(d, variety, degree, field));
        let cached = match &path {
            // unreadable or corrupt files are rebuilt
            Some(p) => LinBasis::read_cache(p, variety, degree, field).ok().flatten(),
            None => None,
        };
        let (basis, origin) = match cached {
            Some(b) => (b, BasisOrigin::Cache),
            None => {
                let (b, stats) = LinBasis::build(variety, degree, field)?;
                if let Some(p) = &path {
                    b.write_cache(p)?;
                }
                (b, BasisOrigin::Built(stats))
            }
        };
        self.log
            .lock()
            .unwrap()
            .push((variety.to_string(), degree, field, origin));
        let basis = Arc::new(basis);
        let _ = slot.basis.set(Arc::clone(&basis));
        Ok(basis)
    }

    /// Dimension of the multilinear component of the relatively free algebra.
    pub fn dim(&self, variety: &VarietySpec, degree: usize, field: FieldSpec) -> Result<usize> {
        Ok(self.component_basis(variety, degree, field)?.quotient_dim())
    }

    /// Distinct consequences `C[f(m_1, .., m_k)]` of the identities in one
    /// multidegree, without any pruning.
    pub fn consequences(&self, variety: &VarietySpec, multidegree: &BTreeMap<u32, u32>) -> Result<Vec<MultiPoly>> {
        let degree: usize = multidegree.values().map(|&m| m as usize).sum();
        if degree > self.config.degree_cap {
            return Err(AlgebraError::DegreeCapExceeded {
                degree,
                cap: self.config.degree_cap,
            });
        }
        let ids: Vec<_> = variety
            .identities()
            .iter()
            .map(generate::IdentityTemplate::new)
            .collect();
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for f in generate::full_consequences(&ids, multidegree) {
            if !f.is_zero() && seen.insert(f.to_string()) {
                out.push(f);
            }
        }
        Ok(out)
    }

    /// Residue of a multilinear `f` modulo the T-ideal component.
    pub fn normal_form(&self, f: &MultiPoly, variety: &VarietySpec, field: FieldSpec) -> Result<MultiPoly> {
        if f.is_zero() {
            return Ok(MultiPoly::zero());
        }
        if !f.is_multilinear() {
            return Err(AlgebraError::NotMultilinear);
        }
        self.component_basis(variety, f.degree(), field)?.normal_form(f)
    }

    /// T-ideal membership; non-multilinear input is linearized first.
    pub fn member(&self, f: &MultiPoly, variety: &VarietySpec, field: FieldSpec) -> Result<bool> {
        self.member_with_polys(f, variety, &[], field)
    }

    /// Membership in the T-ideal component plus the span of `extra`, which
    /// must be multilinear on the variables of `f`.
    pub fn member_with_polys(
        &self,
        f: &MultiPoly,
        variety: &VarietySpec,
        extra: &[MultiPoly],
        field: FieldSpec,
    ) -> Result<bool> {
        if f.is_zero() {
            return Ok(true);
        }
        let f = if f.is_multilinear() {
            f.clone()
        } else {
            f.multilinearize()
        };
        let basis = self.component_basis(variety, f.degree(), field)?;
        if extra.is_empty() {
            basis.contains(&f)
        } else {
            basis.contains_with(&f, extra)
        }
    }

    /// `f ≈ 0`: `f R_{y_1} .. R_{y_2k}` lies in the T-ideal, the `y_i` being
    /// the `2k` smallest indices not occurring in `f`.
    pub fn approx_zero(&self, f: &MultiPoly, variety: &VarietySpec, k: usize, field: FieldSpec) -> Result<bool> {
        if k == 0 {
            return Err(AlgebraError::Config("the ≈ test needs k >= 1".into()));
        }
        if f.is_zero() {
            return Ok(true);
        }
        let f = if f.is_multilinear() {
            f.clone()
        } else {
            f.multilinearize()
        };
        self.member(&approx_extension(&f, k), variety, field)
    }

    pub fn member_with_extra_generators(
        &self,
        f: &MultiPoly,
        variety: &VarietySpec,
        family: &GeneratorFamily,
        field: FieldSpec,
    ) -> Result<bool> {
        if f.is_zero() {
            return Ok(true);
        }
        let f = if f.is_multilinear() {
            f.clone()
        } else {
            f.multilinearize()
        };
        self.check_degree(f.degree(), field)?;
        let gens = family.generators(&f.variables())?;
        self.member_with_polys(&f, variety, &gens, field)
    }
}

/// `f R_{y_1} .. R_{y_2k}` on the `2k` smallest indices not in `f`.
pub fn approx_extension(f: &MultiPoly, k: usize) -> MultiPoly {
    let used = f.variables();
    (1u32..)
        .filter(|i| !used.contains(i))
        .take(2 * k)
        .fold(f.clone(), |g, y| g.mul(&x(y)))
}
