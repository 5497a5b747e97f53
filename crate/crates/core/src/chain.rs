//! Multi-mediator chains: exact marginalization of inner mediators, total
//! effect accounting, mixed conditioning/marginalization over ancestral
//! sets, and first-order linearization for continuous treatments.
//!
//! Marginalization always proceeds innermost first. At every step only a
//! transition node is summed out, so the models of the outer mediators are
//! left untouched and the remaining system is again a chain of the same
//! form. For a binary treatment each step is exact: the reduced outcome
//! logit is a function on finitely many binary design points and the starred
//! model is saturated in those arguments, picking up interaction terms above
//! second order as chains get longer.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::binary::log_relative_risk;
use crate::decomp;
use crate::error::{Error, Result};
use crate::model::{self, MediatorModel, OutcomeModel, SystemSpec, TreatmentKind};
use crate::numeric::log1p_exp;

/// One exact marginalization step: which mediator was removed and the
/// reduced ("starred") outcome model over the remaining ones.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginalizationStep {
    /// Ordinal of the removed mediator, counted in the indices of the system
    /// the step was applied to (always 1: reduction is innermost-first).
    /// Iterating drivers relabel this to the original ordinal.
    pub removed_index: usize,
    pub starred: OutcomeModel,
    /// Whether the starred model reproduces the reduced logit exactly;
    /// true for binary treatments, false for Taylor linearizations.
    pub exact: bool,
}

/// Coefficients of the linearized reduced outcome logit around `x0` for a
/// two-mediator chain with the inner mediator summed out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TaylorModel {
    pub x0: f64,
    pub beta0: f64,
    pub beta_x: f64,
    pub beta_w2: f64,
    pub beta_xw2: f64,
}

/// Contribution of one mediator channel to the total effect: the
/// treatment-mediator interaction coefficient plus the relative-risk gap of
/// that mediator, evaluated with all outer mediators held at 1 in the system
/// where the inner ones are already marginalized.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathContribution {
    pub mediator: usize,
    pub interaction: f64,
    pub rr_gap: f64,
}

impl PathContribution {
    pub fn channel(&self) -> f64 {
        self.interaction + self.rr_gap
    }
}

/// Per-path additive report of a (possibly conditional) total effect for a
/// binary treatment: `total = direct + sum(interaction + rr_gap)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    /// Conditional treatment coefficient, covariate and kept-mediator
    /// interactions folded in.
    pub direct: f64,
    pub paths: Vec<PathContribution>,
    pub total: f64,
    pub steps: Vec<MarginalizationStep>,
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

// Reduced outcome logit l(x, rest) with mediator 1 summed out, in closed
// form through the posterior logits of the conditioned single-mediator view.
fn reduced_logit(folded: &SystemSpec, x: f64, rest: &[bool]) -> Result<f64> {
    let view = folded.condition_upper(2, rest)?;
    let eval = model::k1_eval(&view, x, &[])?;
    let g1 = model::posterior_logit_from_eval(&eval, true);
    let g0 = model::posterior_logit_from_eval(&eval, false);
    Ok(eval.eta0 + log1p_exp(g1) - log1p_exp(g0))
}

fn mediator_one_decoupled(out: &OutcomeModel) -> bool {
    out.beta_w[0] == 0.0
        && out.beta_xw[0] == 0.0
        && out.beta_ww.iter().all(|(&(i, _), &v)| i != 1 || v == 0.0)
        && out
            .beta_high
            .iter()
            .all(|(t, &v)| !t.mediators.contains(&1) || v == 0.0)
}

fn shift_mediator_down(m: &MediatorModel) -> MediatorModel {
    MediatorModel {
        index: m.index - 1,
        gamma0: m.gamma0,
        gamma_x: m.gamma_x,
        gamma_w: m.gamma_w.iter().map(|(&j, &v)| (j - 1, v)).collect(),
        gamma_xw: m.gamma_xw.iter().map(|(&j, &v)| (j - 1, v)).collect(),
        gamma_c: m.gamma_c.clone(),
        gamma_xc: m.gamma_xc.clone(),
        gamma_cc: m.gamma_cc.clone(),
    }
}

// Mediator 1 never enters the outcome model: marginalizing it is the same
// as deleting it, so the starred coefficients are copied bit for bit.
fn drop_decoupled_inner(folded: &SystemSpec) -> SystemSpec {
    let o = &folded.outcome;
    let k = folded.k();
    let mut starred = OutcomeModel::zeroed(k - 1, 0);
    starred.beta0 = o.beta0;
    starred.beta_x = o.beta_x;
    starred.beta_w = o.beta_w[1..].to_vec();
    starred.beta_xw = o.beta_xw[1..].to_vec();
    starred.beta_ww = o
        .beta_ww
        .iter()
        .filter(|(&(i, _), _)| i != 1)
        .map(|(&(i, j), &v)| ((i - 1, j - 1), v))
        .collect();
    starred.beta_high = o
        .beta_high
        .iter()
        .filter(|(t, _)| !t.mediators.contains(&1))
        .map(|(t, &v)| {
            (
                model::InteractionTerm {
                    with_x: t.with_x,
                    mediators: t.mediators.iter().map(|&m| m - 1).collect(),
                },
                v,
            )
        })
        .collect();
    SystemSpec {
        treatment: folded.treatment,
        mediators: folded.mediators[1..]
            .iter()
            .map(shift_mediator_down)
            .collect(),
        outcome: starred,
        covariates: None,
        confounder_view: None,
    }
}

/// Marginalizes the innermost mediator out of a binary-treatment chain with
/// `k >= 2` mediators, exactly.
///
/// Covariates, if declared, are folded at their declared values first; the
/// reduction is then conditional on that point. The starred outcome model is
/// computed by evaluating the reduced logit at every binary design point of
/// `(x, w_2..w_k)` and interpolating, which reproduces the relative-risk
/// closed forms for the named coefficients and supplies the higher-order
/// terms that keep longer chains exact. Outer mediator models are carried
/// over unchanged, reindexed down by one.
pub fn reduce_inner_mediator(spec: &SystemSpec) -> Result<(SystemSpec, MarginalizationStep)> {
    require_binary(spec)?;
    if spec.k() < 2 {
        return Err(Error::NeedTwoMediators { k: spec.k() });
    }
    let folded = spec.fold_covariates(spec.covariate_values())?;
    let k = folded.k();

    let reduced = if mediator_one_decoupled(&folded.outcome) {
        drop_decoupled_inner(&folded)
    } else {
        let r = k - 1;
        let n = r + 1; // treatment bit plus remaining mediators
        let mut coefs = vec![0.0; 1 << n];
        let mut rest = vec![false; r];
        for (pt, slot) in coefs.iter_mut().enumerate() {
            let x = (pt & 1) as f64;
            for (i, value) in rest.iter_mut().enumerate() {
                *value = pt & (1 << (i + 1)) != 0;
            }
            *slot = reduced_logit(&folded, x, &rest)?;
        }
        // subset Moebius transform: point values -> interaction coefficients
        for b in 0..n {
            for pt in 0..1usize << n {
                if pt & (1 << b) != 0 {
                    coefs[pt] -= coefs[pt ^ (1 << b)];
                }
            }
        }
        let mut terms = BTreeMap::new();
        for (pt, &coef) in coefs.iter().enumerate() {
            terms.insert((pt & 1 != 0, (pt >> 1) as u32), coef);
        }
        SystemSpec {
            treatment: folded.treatment,
            mediators: folded.mediators[1..]
                .iter()
                .map(shift_mediator_down)
                .collect(),
            outcome: model::terms_to_outcome(&terms, r),
            covariates: None,
            confounder_view: None,
        }
    };

    let step = MarginalizationStep {
        removed_index: 1,
        starred: reduced.outcome.clone(),
        exact: true,
    };
    Ok((reduced, step))
}

/// Total effect of a binary treatment on the outcome with every mediator
/// marginalized, reported per path.
///
/// Reduces innermost-first down to a single mediator and applies the
/// two-by-two decomposition at the end. Each mediator's channel is its
/// treatment interaction coefficient plus the relative-risk gap
/// `logRR(x=0) - logRR(x=1)` taken in the system where all inner mediators
/// are already summed out and all outer ones are held at 1; the channels
/// telescope so that `direct + sum(channels)` equals the marginal log
/// cross-product ratio exactly.
pub fn total_log_cpr(spec: &SystemSpec) -> Result<DecompositionReport> {
    require_binary(spec)?;
    let folded = spec.fold_covariates(spec.covariate_values())?;
    let k = folded.k();
    let direct = folded.outcome.beta_x;
    let interactions = folded.outcome.beta_xw.clone();

    let mut current = folded;
    let mut paths = Vec::with_capacity(k);
    let mut steps = Vec::new();
    for ordinal in 1..=k {
        let remaining = current.k();
        let view = current.condition_upper(2, &vec![true; remaining - 1])?;
        let rr0 = log_relative_risk(&view, 0.0, &[])?;
        let rr1 = log_relative_risk(&view, 1.0, &[])?;
        paths.push(PathContribution {
            mediator: ordinal,
            interaction: interactions[ordinal - 1],
            rr_gap: rr0 - rr1,
        });
        if remaining >= 2 {
            let (next, mut step) = reduce_inner_mediator(&current)?;
            step.removed_index = ordinal;
            steps.push(step);
            current = next;
        }
    }

    let mut total = direct;
    for path in &paths {
        total += path.channel();
    }
    Ok(DecompositionReport {
        direct,
        paths,
        total,
        steps,
    })
}

/// Effect of a binary treatment conditional on fixed values of the kept
/// mediators, with all others marginalized out (innermost first).
///
/// `keep` maps mediator indices to their conditioning values and must be an
/// upper range of the chain (an ancestral set): if `j` is kept, every index
/// above `j` is kept too. Conditioning on an inner mediator while
/// marginalizing an outer one would break the chain factorization and is
/// rejected.
pub fn partial_log_cpr(
    spec: &SystemSpec,
    keep: &BTreeMap<usize, bool>,
    c: &[f64],
) -> Result<DecompositionReport> {
    require_binary(spec)?;
    let k = spec.k();
    for &j in keep.keys() {
        if j < 1 || j > k {
            return Err(Error::MediatorIndex { index: j, k });
        }
    }
    let folded = spec.fold_covariates(c)?;
    if keep.is_empty() {
        return total_log_cpr(&folded);
    }
    let first_kept = *keep.keys().next().expect("non-empty keep set");
    if keep.len() != k - first_kept + 1 {
        return Err(Error::NonAncestralKeep {
            keep: keep.keys().copied().collect(),
        });
    }
    let values: Vec<bool> = keep.values().copied().collect();
    let conditioned = folded.condition_upper(first_kept, &values)?;
    total_log_cpr(&conditioned)
}

/// Linearizes the reduced outcome logit of a two-mediator chain around `x0`
/// for a continuous treatment.
///
/// The inner mediator is summed out exactly conditional on each level of the
/// outer one, giving the reduced logit `l(x, w2)` and its exact slope
/// `b(x, w2)`; the linearized coefficients anchor both at `x0`:
///
/// ```text
/// beta_x   = b(x0, 0)                 beta_xw2 = b(x0, 1) - b(x0, 0)
/// beta0    = l(x0, 0) - b(x0, 0) x0
/// beta_w2  = l(x0, 1) - l(x0, 0) - x0 (b(x0, 1) - b(x0, 0))
/// ```
///
/// so the linearization reproduces `l(x0, w2)` and its slope exactly at
/// `x0` for both levels of the outer mediator. Applying the single-mediator
/// slope decomposition to the returned system approximates the marginal
/// slope near `x0` with a quadratically shrinking remainder.
pub fn taylor_reduce(spec: &SystemSpec, x0: f64) -> Result<(SystemSpec, TaylorModel)> {
    if spec.treatment != TreatmentKind::Continuous {
        return Err(Error::TreatmentKind {
            expected: TreatmentKind::Continuous,
            actual: spec.treatment,
        });
    }
    if spec.k() != 2 {
        return Err(Error::TaylorNeedsTwoMediators { k: spec.k() });
    }
    if !x0.is_finite() {
        return Err(Error::NonFinite {
            what: "expansion point",
        });
    }
    let folded = spec.fold_covariates(spec.covariate_values())?;

    let slope_at = |w2: bool| -> Result<f64> {
        let view = folded.condition_upper(2, &[w2])?;
        Ok(decomp::marginal_slope(&view, x0, &[])?.total)
    };
    let slope0 = slope_at(false)?;
    let slope1 = slope_at(true)?;
    let l0 = reduced_logit(&folded, x0, &[false])?;
    let l1 = reduced_logit(&folded, x0, &[true])?;

    let taylor = TaylorModel {
        x0,
        beta0: l0 - slope0 * x0,
        beta_x: slope0,
        beta_w2: l1 - l0 - x0 * (slope1 - slope0),
        beta_xw2: slope1 - slope0,
    };

    let outer = MediatorModel {
        index: 1,
        ..folded.mediators[1].clone()
    };
    let reduced = SystemSpec {
        treatment: TreatmentKind::Continuous,
        mediators: vec![outer],
        outcome: OutcomeModel {
            beta0: taylor.beta0,
            beta_x: taylor.beta_x,
            beta_w: vec![taylor.beta_w2],
            beta_xw: vec![taylor.beta_xw2],
            ..OutcomeModel::zeroed(1, 0)
        },
        covariates: None,
        confounder_view: None,
    };
    Ok((reduced, taylor))
}
