//! Instance configuration files.
//!
//! ```json
//! {
//!   "field": {"p": 2, "m": 2},
//!   "curve": {"curve": "hermitian", "q0": 2},
//!   "u": 4, "n": 6, "L": 2,
//!   "seed": 7,
//!   "mode": "both",
//!   "caps": {"operator": 4096}
//! }
//! ```
//!
//! Places are optional lists of affine coordinates given as element reprs
//! (`[[x]]` for the rational curve, `[[x, y]]` for Hermitian curves).

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::funcfield::{CurveKind, CurveModel, Place};
use crate::gf::{Field, FieldSpec};
use crate::qsim::{Caps, Mode};
use crate::scheme::{CodePair, SchemeError, SchemeParams};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("schema error at line {line}, column {column}: {message}")]
    Schema {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid `{field}`: {message}")]
    Invariant { field: &'static str, message: String },
}

fn invariant(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invariant {
        field,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub p: u32,
    pub m: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
}

fn default_mode() -> Mode {
    Mode::Both
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub field: FieldConfig,
    pub curve: CurveKind,
    pub u: u32,
    pub n: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub share_places: Option<Vec<Vec<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub secret_places: Option<Vec<Vec<u32>>>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub caps: Caps,
    #[serde(default = "default_mode")]
    pub mode: Mode,
}

impl InstanceConfig {
    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Schema {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json_str(&text)
    }

    /// Validate every invariant and build the code pair.
    pub fn resolve(&self) -> Result<Instance, ConfigError> {
        let spec = match &self.field.modulus {
            Some(modulus) => FieldSpec {
                p: self.field.p,
                m: self.field.m,
                modulus: modulus.clone(),
            },
            None => FieldSpec::with_default_modulus(self.field.p, self.field.m)
                .map_err(|e| invariant("field", e.to_string()))?,
        };
        let field = Field::new(spec).map_err(|e| invariant("field", e.to_string()))?;
        let curve = CurveModel::new(self.curve, &field).map_err(|e| invariant("curve", e.to_string()))?;

        if self.n == 0 {
            return Err(invariant("n", "need at least one share"));
        }
        if self.l == 0 {
            return Err(invariant("L", "need at least one secret digit"));
        }
        let affine = curve.affine_places();
        if self.n + self.l > affine.len() {
            return Err(invariant(
                "n + L",
                format!(
                    "n + L = {} exceeds the {} affine rational places of the curve",
                    self.n + self.l,
                    affine.len()
                ),
            ));
        }

        let coords = if matches!(self.curve, CurveKind::Rational) {
            1
        } else {
            2
        };
        let parse = |field_name: &'static str,
                     list: &[Vec<u32>],
                     expected: usize|
         -> Result<Vec<Place>, ConfigError> {
            if list.len() != expected {
                return Err(invariant(
                    field_name,
                    format!("has {} entries but {} are required", list.len(), expected),
                ));
            }
            list.iter()
                .map(|pt| {
                    if pt.len() != coords {
                        return Err(invariant(
                            field_name,
                            format!("point {pt:?} needs {coords} coordinate(s)"),
                        ));
                    }
                    let reprs = pt
                        .iter()
                        .map(|&c| {
                            u8::try_from(c)
                                .ok()
                                .filter(|&r| u32::from(r) < field.order())
                                .ok_or_else(|| {
                                    invariant(
                                        field_name,
                                        format!("coordinate {c} is not an element of F_{}", field.order()),
                                    )
                                })
                        })
                        .collect::<Result<Vec<u8>, _>>()?;
                    let place = Place::Affine(reprs);
                    if !curve.contains(&place) {
                        return Err(invariant(field_name, format!("point {pt:?} is not on the curve")));
                    }
                    Ok(place)
                })
                .collect()
        };
        let first_unused = |taken: &[Place], count: usize| -> Vec<Place> {
            affine
                .iter()
                .filter(|p| !taken.contains(p))
                .take(count)
                .cloned()
                .collect()
        };

        let explicit_secrets = self
            .secret_places
            .as_ref()
            .map(|s| parse("secret_places", s, self.l))
            .transpose()?;
        let shares = match &self.share_places {
            Some(s) => parse("share_places", s, self.n)?,
            None => first_unused(explicit_secrets.as_deref().unwrap_or(&[]), self.n),
        };
        let secrets = match explicit_secrets {
            Some(s) => s,
            None => first_unused(&shares, self.l),
        };

        let params = SchemeParams::new(curve, self.u, shares, secrets).map_err(scheme_invariant)?;
        let code_pair = CodePair::build(params).map_err(scheme_invariant)?;
        let canonical = canonical_instance(&field, self, &code_pair);
        let hash = hex::encode(Sha256::digest(canonical.to_string().as_bytes()));
        Ok(Instance {
            config: self.clone(),
            code_pair,
            canonical,
            hash,
        })
    }
}

fn scheme_invariant(e: SchemeError) -> ConfigError {
    let field = match &e {
        SchemeError::DuplicatePlace(_) | SchemeError::PlaceAtInfinity | SchemeError::NotOnCurve(_) => {
            "places"
        }
        SchemeError::NotSurjective { .. } => "secret_places",
        SchemeError::NotInjective { .. } => "u",
        SchemeError::TooFewPlaces { .. } => "n + L",
        SchemeError::Empty { .. } => "n",
        _ => "instance",
    };
    invariant(field, e.to_string())
}

fn place_json(p: &Place) -> Value {
    match p {
        Place::Affine(c) => json!(c),
        Place::Infinity => json!("infinity"),
    }
}

/// Instance-defining data only: run settings (seed, caps, mode) are left
/// out so they do not change the hash. Keys serialize sorted.
fn canonical_instance(field: &Field, cfg: &InstanceConfig, cp: &CodePair) -> Value {
    let spec = field.spec();
    json!({
        "field": {"p": spec.p, "m": spec.m, "modulus": spec.modulus},
        "curve": cfg.curve,
        "u": cfg.u,
        "n": cfg.n,
        "L": cfg.l,
        "share_places": cp.params().share_places.iter().map(place_json).collect::<Vec<_>>(),
        "secret_places": cp.params().secret_places.iter().map(place_json).collect::<Vec<_>>(),
    })
}

/// A validated instance together with its code pair and identity hash.
#[derive(Debug, Clone)]
pub struct Instance {
    pub config: InstanceConfig,
    pub code_pair: CodePair,
    /// Resolved instance description (field modulus and places filled in).
    pub canonical: Value,
    /// Lowercase hex SHA-256 of the compact canonical JSON.
    pub hash: String,
}

impl Instance {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        InstanceConfig::load(path)?.resolve()
    }
}
