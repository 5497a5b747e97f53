//! Brute-force verification engine.
//!
//! Everything here works by exact enumeration of the conditional joint
//! distribution of the outcome and all mediators given the treatment and
//! covariates, followed by plain summation or numerical differentiation.
//! It is the ground truth the closed-form modules are tested against, so it
//! deliberately re-implements the linear predictors instead of calling
//! [`crate::model`]; the two code paths share nothing but the coefficient
//! structs themselves.
//!
//! Cell probabilities are accumulated in log space and exponentiated once,
//! normalized, so extreme coefficients cannot underflow intermediate
//! products.

use crate::error::{Error, Result};
use crate::model::{SystemSpec, TreatmentKind};
use crate::numeric::log_logistic;

/// Enumeration works with `2^(k+1)` cells; beyond this the table is refused.
pub const MAX_MEDIATORS: usize = 20;

/// Default step for central-difference slopes.
pub const DEFAULT_STEP: f64 = 1e-5;

/// Exact conditional table `P(Y=y, W=w | X=x, C=c)` over all `2^(k+1)`
/// configurations of the outcome and the mediators.
#[derive(Debug, Clone)]
pub struct ConditionalTable {
    pub x: f64,
    pub c: Vec<f64>,
    k: usize,
    probs: Vec<f64>,
}

impl ConditionalTable {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Probability of one cell; `w` lists mediator values innermost first.
    pub fn prob(&self, y: bool, w: &[bool]) -> f64 {
        assert_eq!(w.len(), self.k, "mediator tuple length");
        let mask = w
            .iter()
            .enumerate()
            .fold(0usize, |m, (j, &b)| m | (usize::from(b) << j));
        self.probs[(usize::from(y) << self.k) | mask]
    }

    /// Total mass of all cells selected by `pred`. Conditionals follow by
    /// taking ratios, e.g. `P(W1=1 | Y=1) = mass(y & w1) / mass(y)`.
    pub fn mass<F: Fn(bool, &[bool]) -> bool>(&self, pred: F) -> f64 {
        let mut total = 0.0;
        let mut w = vec![false; self.k];
        for (idx, &p) in self.probs.iter().enumerate() {
            let y = idx >> self.k == 1;
            for (j, slot) in w.iter_mut().enumerate() {
                *slot = idx & (1 << j) != 0;
            }
            if pred(y, &w) {
                total += p;
            }
        }
        total
    }

    /// Sum of all cells; 1 up to rounding by construction.
    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

// Independent re-implementation of the outcome linear predictor, reading
// mediator values off a bitmask.
fn outcome_predictor(spec: &SystemSpec, x: f64, mask: usize, c: &[f64]) -> f64 {
    let o = &spec.outcome;
    let on = |j: usize| mask & (1 << (j - 1)) != 0;
    let mut v = o.beta0 + o.beta_x * x;
    for j in 1..=spec.k() {
        if on(j) {
            v += o.beta_w[j - 1] + o.beta_xw[j - 1] * x;
        }
    }
    for (&(i, j), &coef) in &o.beta_ww {
        if on(i) && on(j) {
            v += coef;
        }
    }
    for (i, &ci) in c.iter().enumerate() {
        v += (o.beta_c[i] + o.beta_xc[i] * x) * ci;
    }
    for (&(i, j), &coef) in &o.beta_cc {
        v += coef * c[i] * c[j];
    }
    for (&(m, cov), &coef) in &o.beta_wc {
        if on(m) {
            v += coef * c[cov];
        }
    }
    for (term, &coef) in &o.beta_high {
        if term.mediators.iter().all(|&m| on(m)) {
            v += if term.with_x { coef * x } else { coef };
        }
    }
    v
}

fn mediator_predictor(spec: &SystemSpec, j: usize, x: f64, mask: usize, c: &[f64]) -> f64 {
    let m = &spec.mediators[j - 1];
    let on = |i: usize| mask & (1 << (i - 1)) != 0;
    let mut v = m.gamma0 + m.gamma_x * x;
    for (&dep, &coef) in &m.gamma_w {
        if on(dep) {
            v += coef;
        }
    }
    for (&dep, &coef) in &m.gamma_xw {
        if on(dep) {
            v += coef * x;
        }
    }
    for (i, &ci) in c.iter().enumerate() {
        v += (m.gamma_c[i] + m.gamma_xc[i] * x) * ci;
    }
    for (&(i, j2), &coef) in &m.gamma_cc {
        v += coef * c[i] * c[j2];
    }
    v
}

fn check_inputs(spec: &SystemSpec, x: f64, c: &[f64]) -> Result<()> {
    if spec.k() > MAX_MEDIATORS {
        return Err(Error::TooManyMediators {
            k: spec.k(),
            max: MAX_MEDIATORS,
        });
    }
    if spec.treatment == TreatmentKind::Binary && x != 0.0 && x != 1.0 {
        return Err(Error::BinaryTreatmentValue { value: x });
    }
    if !x.is_finite() {
        return Err(Error::NonFinite {
            what: "treatment value",
        });
    }
    if c.len() != spec.p() {
        return Err(Error::DimensionMismatch {
            what: "covariate point",
            expected: spec.p(),
            actual: c.len(),
        });
    }
    Ok(())
}

// Log-probability of every cell, indexed by (y << k) | mask. Factorizes
// along the chain: P(Y|x,w,c) * prod_j P(W_j | x, w_{>j}, c).
fn log_cells(spec: &SystemSpec, x: f64, c: &[f64]) -> Vec<f64> {
    let k = spec.k();
    let mut lp = vec![0.0; 1 << (k + 1)];
    for mask in 0..1usize << k {
        let mut med_part = 0.0;
        for j in 1..=k {
            let pred = mediator_predictor(spec, j, x, mask, c);
            let sign = if mask & (1 << (j - 1)) != 0 {
                1.0
            } else {
                -1.0
            };
            med_part += log_logistic(sign * pred);
        }
        let eta = outcome_predictor(spec, x, mask, c);
        lp[mask] = med_part + log_logistic(-eta);
        lp[(1 << k) | mask] = med_part + log_logistic(eta);
    }
    lp
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = values.clone().fold(f64::NEG_INFINITY, f64::max);
    m + values.map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// Enumerates the full conditional table at `(x, c)`.
pub fn enumerate(spec: &SystemSpec, x: f64, c: &[f64]) -> Result<ConditionalTable> {
    check_inputs(spec, x, c)?;
    let lp = log_cells(spec, x, c);
    let m = lp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let unnorm: Vec<f64> = lp.iter().map(|&v| (v - m).exp()).collect();
    let total: f64 = unnorm.iter().sum();
    Ok(ConditionalTable {
        x,
        c: c.to_vec(),
        k: spec.k(),
        probs: unnorm.into_iter().map(|v| v / total).collect(),
    })
}

/// Logit of `P(Y=1 | X=x, C=c)` with every mediator summed out.
pub fn marginal_logit_numeric(spec: &SystemSpec, x: f64, c: &[f64]) -> Result<f64> {
    check_inputs(spec, x, c)?;
    let k = spec.k();
    let lp = log_cells(spec, x, c);
    let l1 = log_sum_exp(lp[1 << k..].iter().copied());
    let l0 = log_sum_exp(lp[..1 << k].iter().copied());
    Ok(l1 - l0)
}

/// Logit of `P(Y=1 | X=x, C=c, W_fixed)` where `fixed` pins a subset of
/// mediators (1-based index, value) and the rest are summed out.
pub fn conditional_logit_numeric(
    spec: &SystemSpec,
    x: f64,
    c: &[f64],
    fixed: &[(usize, bool)],
) -> Result<f64> {
    check_inputs(spec, x, c)?;
    let k = spec.k();
    let mut sel_mask = 0usize;
    let mut sel_val = 0usize;
    for &(j, v) in fixed {
        if j < 1 || j > k {
            return Err(Error::MediatorIndex { index: j, k });
        }
        sel_mask |= 1 << (j - 1);
        if v {
            sel_val |= 1 << (j - 1);
        }
    }
    let lp = log_cells(spec, x, c);
    let select = |y: usize| {
        lp.iter()
            .enumerate()
            .filter(move |(idx, _)| idx >> k == y && idx & sel_mask == sel_val)
            .map(|(_, &v)| v)
            .collect::<Vec<_>>()
    };
    let l1 = log_sum_exp(select(1).into_iter());
    let l0 = log_sum_exp(select(0).into_iter());
    Ok(l1 - l0)
}

/// Central difference of [`marginal_logit_numeric`] in `x`.
pub fn marginal_slope_numeric(spec: &SystemSpec, x: f64, c: &[f64], h: f64) -> Result<f64> {
    if spec.treatment != TreatmentKind::Continuous {
        return Err(Error::TreatmentKind {
            expected: TreatmentKind::Continuous,
            actual: spec.treatment,
        });
    }
    let up = marginal_logit_numeric(spec, x + h, c)?;
    let down = marginal_logit_numeric(spec, x - h, c)?;
    Ok((up - down) / (2.0 * h))
}

/// Log cross-product ratio of the outcome and a binary treatment at `C=c`,
/// from the two marginal conditionals `P(Y=1 | X=x, C=c)`. The marginal law
/// of the treatment cancels and is never needed.
pub fn log_cpr_numeric(spec: &SystemSpec, c: &[f64]) -> Result<f64> {
    if spec.treatment != TreatmentKind::Binary {
        return Err(Error::TreatmentKind {
            expected: TreatmentKind::Binary,
            actual: spec.treatment,
        });
    }
    Ok(marginal_logit_numeric(spec, 1.0, c)? - marginal_logit_numeric(spec, 0.0, c)?)
}
