//! Binary-treatment calculus for a single binary mediator.
//!
//! With both the treatment and the mediator binary, the marginal association
//! of treatment and outcome is the log cross-product ratio of their
//! two-by-two table, and it decomposes exactly as
//!
//! ```text
//! log cpr(Y,X | C=c) = beta_x + sum_j beta_xc_j c_j + beta_xw
//!                      + log RR(x=0) - log RR(x=1)
//! ```
//!
//! where `RR(x)` is the relative risk of the mediator across outcome levels,
//! `P(W=1|Y=1,X=x,C=c) / P(W=1|Y=0,X=x,C=c)`. The whole indirect effect is
//! carried by the two logarithmic terms, so mediator-model covariate
//! interactions never change the shape of the expression. Only conditional
//! distributions of the outcome given the treatment enter; no marginal law
//! for the treatment is required anywhere.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{self, SystemSpec, TreatmentKind};
use crate::numeric::log_logistic;

/// Residual tolerance for the four-relative-risk interaction identity.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

/// Additive components of the marginal log cross-product ratio.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CprDecomposition {
    pub beta_x: f64,
    pub beta_xw: f64,
    /// `sum_j beta_xc_j c_j`; zero without covariates.
    pub covariate_treatment: f64,
    pub log_rr_at_x0: f64,
    pub log_rr_at_x1: f64,
    pub total: f64,
}

fn require_binary(spec: &SystemSpec) -> Result<()> {
    if spec.treatment != TreatmentKind::Binary {
        return Err(Error::TreatmentKind {
            expected: TreatmentKind::Binary,
            actual: spec.treatment,
        });
    }
    Ok(())
}

/// `log RR` of the mediator across outcome levels at treatment level `x`,
/// computed as a difference of log-logistic terms so large posterior logits
/// never produce a 0/0 ratio.
pub fn log_relative_risk(spec: &SystemSpec, x: f64, c: &[f64]) -> Result<f64> {
    require_binary(spec)?;
    let eval = model::k1_eval(spec, x, c)?;
    let g1 = model::posterior_logit_from_eval(&eval, true);
    let g0 = model::posterior_logit_from_eval(&eval, false);
    Ok(log_logistic(g1) - log_logistic(g0))
}

// Relative risk of the complemented mediator, from the same posterior
// logits with their signs flipped.
fn log_relative_risk_complement(spec: &SystemSpec, x: f64, c: &[f64]) -> Result<f64> {
    require_binary(spec)?;
    let eval = model::k1_eval(spec, x, c)?;
    let g1 = model::posterior_logit_from_eval(&eval, true);
    let g0 = model::posterior_logit_from_eval(&eval, false);
    Ok(log_logistic(-g1) - log_logistic(-g0))
}

/// Decomposes the marginal log cross-product ratio of outcome and treatment
/// at covariate point `c`.
pub fn marginal_log_cpr(spec: &SystemSpec, c: &[f64]) -> Result<CprDecomposition> {
    require_binary(spec)?;
    let log_rr_at_x0 = log_relative_risk(spec, 0.0, c)?;
    let log_rr_at_x1 = log_relative_risk(spec, 1.0, c)?;
    let beta_x = spec.outcome.beta_x;
    let beta_xw = spec.outcome.beta_xw[0];
    let covariate_treatment = model::dot(&spec.outcome.beta_xc, c);
    let total = beta_x + covariate_treatment + beta_xw + log_rr_at_x0 - log_rr_at_x1;
    Ok(CprDecomposition {
        beta_x,
        beta_xw,
        covariate_treatment,
        log_rr_at_x0,
        log_rr_at_x1,
        total,
    })
}

/// Difference between the treatment-mediator interaction coefficient and the
/// four-term relative-risk combination that must reproduce it:
/// `logRR(1) - logRR(0) - logRRbar(1) + logRRbar(0) - beta_xw`, evaluated at
/// the declared covariate point.
pub fn interaction_identity_residual(spec: &SystemSpec) -> Result<f64> {
    let c = spec.covariate_values().to_vec();
    let combo = log_relative_risk(spec, 1.0, &c)?
        - log_relative_risk(spec, 0.0, &c)?
        - log_relative_risk_complement(spec, 1.0, &c)?
        + log_relative_risk_complement(spec, 0.0, &c)?;
    Ok(combo - spec.outcome.beta_xw[0])
}

/// True when the four-relative-risk combination reproduces `beta_xw` within
/// [`IDENTITY_TOLERANCE`].
pub fn interaction_identity_check(spec: &SystemSpec) -> Result<bool> {
    Ok(interaction_identity_residual(spec)?.abs() <= IDENTITY_TOLERANCE)
}
