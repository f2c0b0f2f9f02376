use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::freealg::{x, MultiPoly};
use crate::{AlgebraError, Result};

/// `(x1,x2,x3) + (x1,x3,x2)`
pub fn right_alternative_identity() -> MultiPoly {
    &x(1).associator(&x(2), &x(3)) + &x(1).associator(&x(3), &x(2))
}

/// `(x1 x2)(x3 x4)`
pub fn metabelian_identity() -> MultiPoly {
    x(1).mul(&x(2)).mul(&x(3).mul(&x(4)))
}

/// Left-normed commutator `[[..[x1,x2],..,x_s],x_{s+1}]`.
pub fn lie_nilpotency_identity(step: usize) -> MultiPoly {
    assert!(step >= 1);
    let mut f = x(1);
    for i in 2..=(step as u32 + 1) {
        f = f.commutator(&x(i));
    }
    f
}

/// A named system of multilinear identities.
#[derive(Clone, PartialEq, Eq)]
pub struct VarietySpec {
    name: String,
    identities: Vec<MultiPoly>,
    lie_step: Option<usize>,
}

impl VarietySpec {
    /// Right alternative metabelian algebras.
    pub fn ra2() -> Self {
        VarietySpec {
            name: "ra2".into(),
            identities: vec![right_alternative_identity(), metabelian_identity()],
            lie_step: None,
        }
    }

    /// `RA2` plus Lie-nilpotency of step `s`.
    pub fn ral(step: usize) -> Self {
        assert!(step >= 1, "Lie-nilpotency step must be at least 1");
        VarietySpec {
            name: format!("ral{step}"),
            identities: vec![
                right_alternative_identity(),
                metabelian_identity(),
                lie_nilpotency_identity(step),
            ],
            lie_step: Some(step),
        }
    }

    /// A user-supplied system; identities are polarized on entry.
    pub fn custom(name: &str, identities: Vec<MultiPoly>) -> Result<Self> {
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(AlgebraError::Config(format!("bad variety name `{name}`")));
        }
        let identities: Vec<MultiPoly> = identities
            .into_iter()
            .filter(|f| !f.is_zero())
            .map(|f| f.multilinearize())
            .collect();
        if identities.iter().any(|f| f.degree() < 2) {
            return Err(AlgebraError::Config("identities must have degree >= 2".into()));
        }
        Ok(VarietySpec {
            name: name.to_string(),
            identities,
            lie_step: None,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn identities(&self) -> &[MultiPoly] {
        &self.identities
    }

    pub fn lie_step(&self) -> Option<usize> {
        self.lie_step
    }

    /// SHA-256 over the canonical text of the identity system.
    pub fn content_hash(&self) -> [u8; 32] {
        let mut hasher = Sha256::new();
        for f in &self.identities {
            hasher.update(f.to_string().as_bytes());
            hasher.update(b"\n");
        }
        let digest = hasher.finalize();
        let mut out = [0u8; 32];
        out.copy_from_slice(&digest);
        out
    }
}

impl fmt::Display for VarietySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.lie_step {
            Some(s) if self.name == format!("ral{s}") => write!(f, "ral:{s}"),
            _ => f.write_str(&self.name),
        }
    }
}

impl fmt::Debug for VarietySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for VarietySpec {
    type Err = AlgebraError;

    /// `ra2` or `ral:<s>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "ra2" {
            return Ok(VarietySpec::ra2());
        }
        match s.strip_prefix("ral:").map(str::parse::<usize>) {
            Some(Ok(step)) if step >= 1 => Ok(VarietySpec::ral(step)),
            _ => Err(AlgebraError::Config(format!(
                "unknown variety `{s}` (expected `ra2` or `ral:<s>`)"
            ))),
        }
    }
}
