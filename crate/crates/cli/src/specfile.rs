//! Strict JSON model-specification format.
//!
//! Everything is schema-checked on load: unknown fields are rejected,
//! covariates are referenced by name, and interaction entries must name
//! declared variables. A silently ignored typo in a coefficient name would
//! zero an effect without a trace, so strictness is the default and the only
//! mode.
//!
//! ```json
//! {
//!   "schema_version": "1",
//!   "treatment": { "kind": "binary" },
//!   "covariates": { "names": ["age"], "values": [2.0] },
//!   "mediators": [
//!     { "index": 1, "gamma0": -0.5, "gamma_x": 1.0,
//!       "gamma_w": [[2, 0.3]], "gamma_xw": [[2, 0.4]] },
//!     { "index": 2, "gamma0": 0.2, "gamma_x": 0.7 }
//!   ],
//!   "outcome": { "beta0": 0.2, "beta_x": 0.7,
//!                "beta_w": [1.0, 0.5], "beta_xw": [0.3, 0.0],
//!                "beta_ww": [[1, 2, 0.3]],
//!                "beta_c": [0.3], "beta_xc": [0.4],
//!                "beta_wc": [[1, "age", 0.2]] },
//!   "confounder_view": { "delta0": 0.1, "delta_w": 1.0 },
//!   "options": { "x_grid": [-1.0, 0.0, 1.0], "tolerance": 1e-6 }
//! }
//! ```
//!
//! Per-mediator coefficient vectors (`beta_w`, `beta_xw`) and per-covariate
//! vectors may be omitted entirely, which means all zeros; when present
//! their length must match the declared mediators/covariates.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use logitpath::model::{
    ConfounderModel, CovariateBlock, MediatorModel, OutcomeModel, SystemSpec, TreatmentKind,
};

pub const SCHEMA_VERSION: &str = "1";

/// Errors surfaced while loading a specification file; all map to the
/// parse-error exit code.
#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("invalid JSON in {path}: {reason}")]
    Json { path: String, reason: String },
    #[error("{0}")]
    Schema(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub schema_version: String,
    pub treatment: TreatmentDto,
    #[serde(default)]
    pub covariates: Option<CovariatesDto>,
    #[serde(default)]
    pub mediators: Vec<MediatorDto>,
    pub outcome: OutcomeDto,
    #[serde(default)]
    pub confounder_view: Option<ConfounderDto>,
    #[serde(default)]
    pub options: Options,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreatmentDto {
    pub kind: KindDto,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindDto {
    Continuous,
    Binary,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovariatesDto {
    pub names: Vec<String>,
    pub values: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediatorDto {
    pub index: usize,
    #[serde(default)]
    pub gamma0: f64,
    #[serde(default)]
    pub gamma_x: f64,
    #[serde(default)]
    pub gamma_w: Vec<(usize, f64)>,
    #[serde(default)]
    pub gamma_xw: Vec<(usize, f64)>,
    #[serde(default)]
    pub gamma_c: Vec<f64>,
    #[serde(default)]
    pub gamma_xc: Vec<f64>,
    #[serde(default)]
    pub gamma_cc: Vec<(String, String, f64)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeDto {
    #[serde(default)]
    pub beta0: f64,
    #[serde(default)]
    pub beta_x: f64,
    #[serde(default)]
    pub beta_w: Vec<f64>,
    #[serde(default)]
    pub beta_xw: Vec<f64>,
    #[serde(default)]
    pub beta_ww: Vec<(usize, usize, f64)>,
    #[serde(default)]
    pub beta_c: Vec<f64>,
    #[serde(default)]
    pub beta_xc: Vec<f64>,
    #[serde(default)]
    pub beta_cc: Vec<(String, String, f64)>,
    #[serde(default)]
    pub beta_wc: Vec<(usize, String, f64)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfounderDto {
    pub delta0: f64,
    pub delta_w: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub taylor_x0: Option<f64>,
    #[serde(default)]
    pub x_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub sweep: Option<SweepDto>,
    #[serde(default)]
    pub bounds: Option<BoundsDto>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepDto {
    #[serde(default)]
    pub beta_w: Option<Vec<f64>>,
    #[serde(default)]
    pub beta_xw: Option<Vec<f64>>,
    #[serde(default)]
    pub gamma_x: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsDto {
    #[serde(default)]
    pub beta_x: Option<CoefDto>,
    #[serde(default)]
    pub beta_xw: Option<CoefDto>,
    #[serde(default)]
    pub gamma_x: Option<CoefDto>,
}

/// A bound coefficient is either a point or a two-element interval.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum CoefDto {
    Point(f64),
    Interval([f64; 2]),
}

/// Parses the file and converts it into a core system plus the options
/// block. Structural validation of the system itself happens separately so
/// the caller can map it to the dimension-error exit code.
pub fn load(path: &Path) -> Result<(SystemSpec, Options), LoadError> {
    let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    let file: SpecFile = serde_json::from_str(&text).map_err(|e| LoadError::Json {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    let spec = convert(&file)?;
    Ok((spec, file.options))
}

fn convert(file: &SpecFile) -> Result<SystemSpec, LoadError> {
    if file.schema_version != SCHEMA_VERSION {
        return Err(LoadError::Schema(format!(
            "unsupported schema_version {:?}, expected {:?}",
            file.schema_version, SCHEMA_VERSION
        )));
    }
    let k = file.mediators.len();
    let names: Vec<String> = file
        .covariates
        .as_ref()
        .map(|c| c.names.clone())
        .unwrap_or_default();
    let p = names.len();
    let resolve = |name: &str| -> Result<usize, LoadError> {
        names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| LoadError::Schema(format!("unknown covariate name {name:?}")))
    };
    let pair_by_name = |entries: &[(String, String, f64)],
                        what: &str|
     -> Result<BTreeMap<(usize, usize), f64>, LoadError> {
        let mut map = BTreeMap::new();
        for (a, b, v) in entries {
            let (i, j) = (resolve(a)?, resolve(b)?);
            if i == j {
                return Err(LoadError::Schema(format!(
                    "{what} pairs a covariate with itself: {a:?}"
                )));
            }
            let key = (i.min(j), i.max(j));
            if map.insert(key, *v).is_some() {
                return Err(LoadError::Schema(format!(
                    "{what} declares the pair ({a:?}, {b:?}) twice"
                )));
            }
        }
        Ok(map)
    };
    let indexed =
        |entries: &[(usize, f64)], what: &str| -> Result<BTreeMap<usize, f64>, LoadError> {
            let mut map = BTreeMap::new();
            for (j, v) in entries {
                if map.insert(*j, *v).is_some() {
                    return Err(LoadError::Schema(format!(
                        "{what} declares mediator {j} twice"
                    )));
                }
            }
            Ok(map)
        };
    // omitted per-mediator / per-covariate vectors mean all zeros
    let fill = |v: &[f64], n: usize| {
        if v.is_empty() {
            vec![0.0; n]
        } else {
            v.to_vec()
        }
    };

    let o = &file.outcome;
    let mut beta_ww = BTreeMap::new();
    for (i, j, v) in &o.beta_ww {
        if i >= j {
            return Err(LoadError::Schema(format!(
                "beta_ww entry ({i}, {j}) must list the smaller mediator index first"
            )));
        }
        if beta_ww.insert((*i, *j), *v).is_some() {
            return Err(LoadError::Schema(format!(
                "beta_ww declares the pair ({i}, {j}) twice"
            )));
        }
    }
    let mut beta_wc = BTreeMap::new();
    for (m, name, v) in &o.beta_wc {
        let cov = resolve(name)?;
        if beta_wc.insert((*m, cov), *v).is_some() {
            return Err(LoadError::Schema(format!(
                "beta_wc declares ({m}, {name:?}) twice"
            )));
        }
    }
    let outcome = OutcomeModel {
        beta0: o.beta0,
        beta_x: o.beta_x,
        beta_w: fill(&o.beta_w, k),
        beta_xw: fill(&o.beta_xw, k),
        beta_ww,
        beta_c: fill(&o.beta_c, p),
        beta_xc: fill(&o.beta_xc, p),
        beta_cc: pair_by_name(&o.beta_cc, "beta_cc")?,
        beta_wc,
        beta_high: BTreeMap::new(),
    };

    let mut mediators: Vec<MediatorModel> = Vec::with_capacity(k);
    let mut dtos: Vec<&MediatorDto> = file.mediators.iter().collect();
    dtos.sort_by_key(|m| m.index);
    for dto in dtos {
        mediators.push(MediatorModel {
            index: dto.index,
            gamma0: dto.gamma0,
            gamma_x: dto.gamma_x,
            gamma_w: indexed(&dto.gamma_w, "gamma_w")?,
            gamma_xw: indexed(&dto.gamma_xw, "gamma_xw")?,
            gamma_c: fill(&dto.gamma_c, p),
            gamma_xc: fill(&dto.gamma_xc, p),
            gamma_cc: pair_by_name(&dto.gamma_cc, "gamma_cc")?,
        });
    }

    Ok(SystemSpec {
        treatment: match file.treatment.kind {
            KindDto::Continuous => TreatmentKind::Continuous,
            KindDto::Binary => TreatmentKind::Binary,
        },
        mediators,
        outcome,
        covariates: file.covariates.as_ref().map(|c| CovariateBlock {
            names: c.names.clone(),
            values: c.values.clone(),
        }),
        confounder_view: file.confounder_view.as_ref().map(|c| ConfounderModel {
            delta0: c.delta0,
            delta_w: c.delta_w,
        }),
    })
}
