//! Exact relationships between marginal and conditional parameters of
//! logistic regression models over chains of binary mediators.
//!
//! Given the coefficients of an outcome regression and of one regression per
//! mediator, this crate computes, in closed form:
//!
//! - the decomposition of the marginal treatment slope into direct,
//!   interaction, indirect and covariate components ([`decomp`]);
//! - for a binary treatment, the decomposition of the marginal log
//!   cross-product ratio into the conditional coefficients plus two
//!   log-relative-risk corrections ([`binary`]);
//! - exact marginalization of inner mediators in longer chains, mixed
//!   conditioning/marginalization over ancestral sets, and a first-order
//!   linearization for continuous treatments ([`chain`]);
//! - conservative interval bounds on the marginal slope under partial
//!   knowledge of the coefficients ([`decomp::slope_bounds`]).
//!
//! Every closed form is checked against [`oracle`], a brute-force engine
//! that enumerates the conditional joint distribution cell by cell and
//! differentiates marginal logits numerically. The oracle shares no code
//! with the formulas it verifies.
//!
//! # Example
//!
//! ```
//! use logitpath::model::{MediatorModel, OutcomeModel, SystemSpec, TreatmentKind};
//! use logitpath::{decomp, oracle};
//!
//! let spec = SystemSpec {
//!     treatment: TreatmentKind::Continuous,
//!     mediators: vec![MediatorModel {
//!         gamma0: -0.5,
//!         gamma_x: 1.0,
//!         ..MediatorModel::zeroed(1, 0)
//!     }],
//!     outcome: OutcomeModel {
//!         beta0: 0.2,
//!         beta_x: 0.7,
//!         beta_w: vec![1.0],
//!         beta_xw: vec![0.3],
//!         ..OutcomeModel::zeroed(1, 0)
//!     },
//!     covariates: None,
//!     confounder_view: None,
//! };
//! spec.validate()?;
//!
//! let d = decomp::marginal_slope(&spec, 0.5, &[])?;
//! assert_eq!(d.total, d.direct + d.interaction + d.indirect + d.covariate_treatment);
//!
//! // the closed form agrees with the brute-force derivative
//! let numeric = oracle::marginal_slope_numeric(&spec, 0.5, &[], oracle::DEFAULT_STEP)?;
//! assert!((d.total - numeric).abs() < 1e-6);
//! # Ok::<(), logitpath::Error>(())
//! ```

pub mod binary;
pub mod chain;
pub mod decomp;
mod error;
pub mod model;
pub mod numeric;
pub mod oracle;

pub use error::{Error, Result};
