//! Marginal-slope calculus for a continuous treatment and one binary
//! mediator.
//!
//! The slope of the marginal outcome logit in `x` decomposes into four
//! additive components, each the product of a conditional-model coefficient
//! and a bracket built from conditional probabilities:
//!
//! ```text
//! direct               beta_x  * {1 - outcome_gap * mediator_gap}
//! covariate_treatment  (sum_j beta_xc_j c_j) * {same bracket}
//! interaction          beta_xw * {P(W=1|Y=1,x,c) - mediator_gap * P(Y=1|W=1,x,c)}
//! indirect             (gamma_x + sum_j gamma_xc_j c_j) * mediator_gap
//! ```
//!
//! Both brackets lie in [0, 1] and `mediator_gap` lies in [-1, 1], which is
//! what makes the conservative interval bounds of [`slope_bounds`] sound.
//! Each component vanishes with its coefficient, so conditional independence
//! special cases fall out directly: no mediator-outcome coupling gives
//! `total = beta_x` (collapsibility), and a treatment-independent mediator
//! without interaction gives `|total| <= |beta_x|` (attenuation).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{self, SystemSpec, TreatmentKind};
use crate::numeric::logistic;

/// Additive components of the marginal slope at one evaluation point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeDecomposition {
    pub direct: f64,
    pub interaction: f64,
    pub indirect: f64,
    /// Bracketed treatment-covariate sum; zero when there are no covariates.
    pub covariate_treatment: f64,
    pub total: f64,
    pub at_x: f64,
    pub at_c: Vec<f64>,
}

/// A coefficient that is either known exactly or only within an interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefInput {
    Known(f64),
    Interval { lower: f64, upper: f64 },
}

impl CoefInput {
    fn range(self) -> Result<(f64, f64)> {
        match self {
            CoefInput::Known(v) => {
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        what: "bound coefficient",
                    });
                }
                Ok((v, v))
            }
            CoefInput::Interval { lower, upper } => {
                if !lower.is_finite() || !upper.is_finite() {
                    return Err(Error::NonFinite {
                        what: "bound coefficient",
                    });
                }
                if lower > upper {
                    return Err(Error::EmptyInterval { lower, upper });
                }
                Ok((lower, upper))
            }
        }
    }
}

/// Which coefficients entered [`slope_bounds`] as points vs. intervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundsAssumptions {
    pub beta_x: CoefInput,
    pub beta_xw: CoefInput,
    pub gamma_x: CoefInput,
}

/// Closed interval guaranteed to contain the marginal slope for every `x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectBounds {
    pub lower: f64,
    pub upper: f64,
    pub assumptions: BoundsAssumptions,
}

// With the single mediator absent from the outcome model, both gaps are
// exactly zero; short-circuiting keeps them exact at extreme intercepts.
fn mediator_decoupled(spec: &SystemSpec) -> bool {
    spec.outcome.beta_w[0] == 0.0
        && spec.outcome.beta_xw[0] == 0.0
        && spec
            .outcome
            .beta_wc
            .iter()
            .all(|(&(m, _), &v)| m != 1 || v == 0.0)
}

/// `P(Y=1 | W=1, X=x, C=c) - P(Y=1 | W=0, X=x, C=c)`, in [-1, 1].
pub fn outcome_gap(spec: &SystemSpec, x: f64, c: &[f64]) -> Result<f64> {
    let eval = model::k1_eval(spec, x, c)?;
    if mediator_decoupled(spec) {
        return Ok(0.0);
    }
    Ok(logistic(eval.eta0 + eval.gap) - logistic(eval.eta0))
}

/// `P(W=1 | Y=1, X=x, C=c) - P(W=1 | Y=0, X=x, C=c)`, in [-1, 1].
pub fn mediator_gap(spec: &SystemSpec, x: f64, c: &[f64]) -> Result<f64> {
    let eval = model::k1_eval(spec, x, c)?;
    if mediator_decoupled(spec) {
        return Ok(0.0);
    }
    let g1 = model::posterior_logit_from_eval(&eval, true);
    let g0 = model::posterior_logit_from_eval(&eval, false);
    Ok(logistic(g1) - logistic(g0))
}

/// Slope in `x` of the mediator posterior logit at `y=0`: the closed form
/// `gamma_x + sum_j gamma_xc_j c_j - (beta_x + sum_j beta_xc_j c_j) *
/// outcome_gap - beta_xw * P(Y=1|W=1,x,c)`.
pub fn posterior_slope(spec: &SystemSpec, x: f64, c: &[f64]) -> Result<f64> {
    let eval = model::k1_eval(spec, x, c)?;
    let med = &spec.mediators[0];
    let o = &spec.outcome;
    let med_slope = med.gamma_x + model::dot(&med.gamma_xc, c);
    let eta_slope = o.beta_x + model::dot(&o.beta_xc, c);
    let gap = if mediator_decoupled(spec) {
        0.0
    } else {
        logistic(eval.eta0 + eval.gap) - logistic(eval.eta0)
    };
    Ok(med_slope - eta_slope * gap - o.beta_xw[0] * logistic(eval.eta0 + eval.gap))
}

/// Decomposes the marginal treatment slope at `(x, c)`.
///
/// The total equals the derivative of the marginal outcome logit exactly;
/// multi-mediator systems must be reduced first (see [`crate::chain`]).
pub fn marginal_slope(spec: &SystemSpec, x: f64, c: &[f64]) -> Result<SlopeDecomposition> {
    if spec.treatment != TreatmentKind::Continuous {
        return Err(Error::TreatmentKind {
            expected: TreatmentKind::Continuous,
            actual: spec.treatment,
        });
    }
    let eval = model::k1_eval(spec, x, c)?;
    let o = &spec.outcome;
    let med = &spec.mediators[0];

    let (gap_y, gap_w, p_w1_y1) = if mediator_decoupled(spec) {
        let g = model::posterior_logit_from_eval(&eval, true);
        (0.0, 0.0, logistic(g))
    } else {
        let g1 = model::posterior_logit_from_eval(&eval, true);
        let g0 = model::posterior_logit_from_eval(&eval, false);
        (
            logistic(eval.eta0 + eval.gap) - logistic(eval.eta0),
            logistic(g1) - logistic(g0),
            logistic(g1),
        )
    };

    let bracket_gap = 1.0 - gap_y * gap_w;
    let bracket_mean = p_w1_y1 - gap_w * logistic(eval.eta0 + eval.gap);

    let direct = o.beta_x * bracket_gap;
    let interaction = o.beta_xw[0] * bracket_mean;
    let indirect = (med.gamma_x + model::dot(&med.gamma_xc, c)) * gap_w;
    let covariate_treatment = bracket_gap * model::dot(&o.beta_xc, c);
    let total = direct + interaction + indirect + covariate_treatment;

    Ok(SlopeDecomposition {
        direct,
        interaction,
        indirect,
        covariate_treatment,
        total,
        at_x: x,
        at_c: c.to_vec(),
    })
}

/// Conservative interval for the marginal slope: the three coefficient
/// factors are multiplied by their worst-case bracket ranges ([0,1], [0,1]
/// and [-1,1]) treated as independent. The brackets in fact share the two
/// gap quantities, so the envelope is wider than the tightest possible, but
/// it is guaranteed to contain the true slope for every `x`.
pub fn slope_bounds(
    beta_x: CoefInput,
    beta_xw: CoefInput,
    gamma_x: CoefInput,
) -> Result<EffectBounds> {
    let (bx_lo, bx_hi) = beta_x.range()?;
    let (bxw_lo, bxw_hi) = beta_xw.range()?;
    let (gx_lo, gx_hi) = gamma_x.range()?;

    // b * [0,1]
    let unit = |lo: f64, hi: f64| (lo.min(0.0), hi.max(0.0));
    // g * [-1,1]
    let sym = gx_lo.abs().max(gx_hi.abs());

    let (d_lo, d_hi) = unit(bx_lo, bx_hi);
    let (i_lo, i_hi) = unit(bxw_lo, bxw_hi);
    Ok(EffectBounds {
        lower: d_lo + i_lo - sym,
        upper: d_hi + i_hi + sym,
        assumptions: BoundsAssumptions {
            beta_x,
            beta_xw,
            gamma_x,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TreatmentKind;
    use crate::testutil::k1_spec;

    #[test]
    fn gaps_vanish_without_coupling() {
        let spec = k1_spec(TreatmentKind::Continuous, 0.7, -1.2, 0.0, 0.0, 0.4, 0.9);
        for x in [-3.0, 0.0, 2.5] {
            assert_eq!(outcome_gap(&spec, x, &[]).unwrap(), 0.0);
            assert_eq!(mediator_gap(&spec, x, &[]).unwrap(), 0.0);
        }
        // short-circuit keeps zeros exact at extreme intercepts
        let extreme = k1_spec(TreatmentKind::Continuous, 35.0, -1.2, 0.0, 0.0, -40.0, 0.9);
        assert_eq!(outcome_gap(&extreme, 1.0, &[]).unwrap(), 0.0);
        assert_eq!(mediator_gap(&extreme, 1.0, &[]).unwrap(), 0.0);
    }

    #[test]
    fn outcome_gap_logistic_arithmetic() {
        let spec = k1_spec(
            TreatmentKind::Continuous,
            0.0,
            0.0,
            9.0f64.ln(),
            0.0,
            0.0,
            0.0,
        );
        let gap = outcome_gap(&spec, 0.0, &[]).unwrap();
        assert!((gap - 0.4).abs() < 1e-15);
    }

    #[test]
    fn posterior_slope_trivial_cases() {
        // no outcome-mediator coupling: log-ratio term is constant in x
        let spec = k1_spec(TreatmentKind::Continuous, 0.4, 1.2, 0.0, 0.0, -0.1, 0.8);
        assert_eq!(posterior_slope(&spec, 0.7, &[]).unwrap(), 0.8);
        // no treatment terms in the outcome model
        let spec = k1_spec(TreatmentKind::Continuous, 0.4, 0.0, 1.5, 0.0, -0.1, 0.8);
        assert_eq!(posterior_slope(&spec, 0.7, &[]).unwrap(), 0.8);
    }

    #[test]
    fn posterior_slope_matches_finite_differences() {
        let spec = k1_spec(TreatmentKind::Continuous, 0.2, 0.7, 1.0, 0.3, -0.5, 1.0);
        let h = 1e-5;
        for x in [-1.0, 0.0, 0.9] {
            let up = crate::model::mediator_posterior_logit(&spec, false, x + h, &[]).unwrap();
            let down = crate::model::mediator_posterior_logit(&spec, false, x - h, &[]).unwrap();
            let fd = (up - down) / (2.0 * h);
            let closed = posterior_slope(&spec, x, &[]).unwrap();
            assert!((closed - fd).abs() < 1e-6, "x={x}: {closed} vs {fd}");
        }
    }

    #[test]
    fn collapsible_slope_is_exactly_beta_x() {
        let spec = k1_spec(TreatmentKind::Continuous, 0.3, 1.7, 0.0, 0.0, -0.6, 0.9);
        let d = marginal_slope(&spec, 0.8, &[]).unwrap();
        assert_eq!(d.total, 1.7);
        assert_eq!(d.direct, 1.7);
        assert_eq!(d.interaction, 0.0);
        assert_eq!(d.indirect, 0.0);
    }

    #[test]
    fn attenuated_slope_frozen_value() {
        // treatment-independent mediator, no interaction; frozen from the
        // enumeration oracle's central difference
        let spec = k1_spec(TreatmentKind::Continuous, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0);
        let d = marginal_slope(&spec, 0.0, &[]).unwrap();
        assert!((d.total - 0.9436008940055283).abs() < 1e-12);
        assert!(d.total < 1.0 && d.total > 0.0);
    }

    #[test]
    fn components_add_up() {
        let spec = k1_spec(TreatmentKind::Continuous, 0.2, 0.7, 1.0, 0.3, -0.5, 1.0);
        let d = marginal_slope(&spec, 1.3, &[]).unwrap();
        let sum = d.direct + d.interaction + d.indirect + d.covariate_treatment;
        assert_eq!(d.total, sum);
    }

    #[test]
    fn slope_requires_continuous_treatment() {
        let spec = k1_spec(TreatmentKind::Binary, 0.0, 1.0, 0.5, 0.0, 0.0, 0.5);
        assert!(matches!(
            marginal_slope(&spec, 0.0, &[]),
            Err(Error::TreatmentKind { .. })
        ));
    }

    #[test]
    fn bounds_examples() {
        let b = slope_bounds(
            CoefInput::Known(1.0),
            CoefInput::Known(0.0),
            CoefInput::Known(0.5),
        )
        .unwrap();
        assert_eq!((b.lower, b.upper), (-0.5, 1.5));

        let b = slope_bounds(
            CoefInput::Known(0.0),
            CoefInput::Known(0.0),
            CoefInput::Known(0.0),
        )
        .unwrap();
        assert_eq!((b.lower, b.upper), (0.0, 0.0));

        let b = slope_bounds(
            CoefInput::Interval {
                lower: -1.0,
                upper: 2.0,
            },
            CoefInput::Known(0.3),
            CoefInput::Interval {
                lower: -0.4,
                upper: 0.1,
            },
        )
        .unwrap();
        assert_eq!((b.lower, b.upper), (-1.0 - 0.4, 2.0 + 0.3 + 0.4));
    }

    #[test]
    fn bounds_reject_empty_intervals() {
        assert!(matches!(
            slope_bounds(
                CoefInput::Interval {
                    lower: 1.0,
                    upper: 0.0
                },
                CoefInput::Known(0.0),
                CoefInput::Known(0.0),
            ),
            Err(Error::EmptyInterval { .. })
        ));
    }
}
