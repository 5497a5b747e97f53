//! Model parameterizations and conditional evaluations.
//!
//! A [`SystemSpec`] bundles one logistic outcome regression, an ordered chain
//! of logistic mediator regressions (index 1 is the innermost mediator, the
//! one closest to the outcome), an optional covariate block and an optional
//! reversed confounder view. Every quantity in the crate is a function of
//! these coefficients; no data ever enters.
//!
//! Mediator `j` may depend only on the treatment, the covariates and the
//! mediators with strictly larger index, which makes the chain acyclic by
//! construction.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric::log1p_exp;

/// Tolerance for the reversed-view consistency audit.
pub const CONFOUNDER_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TreatmentKind {
    Continuous,
    Binary,
}

/// Interaction of the treatment and/or three or more mediators.
///
/// User-declared models stop at second order; these terms only appear in
/// outcome models produced by marginalizing mediators out of longer chains,
/// where the reduced logit is saturated in its binary arguments.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct InteractionTerm {
    pub with_x: bool,
    /// Sorted, strictly increasing, 1-based mediator indices.
    pub mediators: Vec<usize>,
}

fn ser_pair_map<S: Serializer>(
    map: &BTreeMap<(usize, usize), f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(map.iter().map(|(&(i, j), &v)| (i, j, v)))
}

fn ser_high_map<S: Serializer>(
    map: &BTreeMap<InteractionTerm, f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(map.iter().map(|(t, &v)| (t.with_x, t.mediators.clone(), v)))
}

/// Coefficients of the outcome logit
/// `P(Y=1 | X=x, W=w, C=c)` on the log-odds scale.
///
/// Mediator indices in map keys are 1-based; covariate positions are 0-based
/// offsets into the covariate block.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeModel {
    pub beta0: f64,
    pub beta_x: f64,
    /// One entry per mediator.
    pub beta_w: Vec<f64>,
    /// Treatment-by-mediator interactions, one entry per mediator.
    pub beta_xw: Vec<f64>,
    /// Mediator-pair interactions, keyed by (i, j) with i < j.
    #[serde(serialize_with = "ser_pair_map")]
    pub beta_ww: BTreeMap<(usize, usize), f64>,
    /// One entry per covariate.
    pub beta_c: Vec<f64>,
    /// Treatment-by-covariate interactions, one entry per covariate.
    pub beta_xc: Vec<f64>,
    /// Covariate-pair interactions, keyed by 0-based (i, j) with i < j.
    #[serde(serialize_with = "ser_pair_map")]
    pub beta_cc: BTreeMap<(usize, usize), f64>,
    /// Mediator-by-covariate interactions, keyed by (mediator, covariate).
    #[serde(serialize_with = "ser_pair_map")]
    pub beta_wc: BTreeMap<(usize, usize), f64>,
    /// Interactions above second order; see [`InteractionTerm`].
    #[serde(serialize_with = "ser_high_map")]
    pub beta_high: BTreeMap<InteractionTerm, f64>,
}

impl OutcomeModel {
    /// All-zero model over `k` mediators and `p` covariates.
    pub fn zeroed(k: usize, p: usize) -> Self {
        Self {
            beta0: 0.0,
            beta_x: 0.0,
            beta_w: vec![0.0; k],
            beta_xw: vec![0.0; k],
            beta_ww: BTreeMap::new(),
            beta_c: vec![0.0; p],
            beta_xc: vec![0.0; p],
            beta_cc: BTreeMap::new(),
            beta_wc: BTreeMap::new(),
            beta_high: BTreeMap::new(),
        }
    }

    fn coefficients(&self) -> impl Iterator<Item = f64> + '_ {
        [self.beta0, self.beta_x]
            .into_iter()
            .chain(self.beta_w.iter().copied())
            .chain(self.beta_xw.iter().copied())
            .chain(self.beta_ww.values().copied())
            .chain(self.beta_c.iter().copied())
            .chain(self.beta_xc.iter().copied())
            .chain(self.beta_cc.values().copied())
            .chain(self.beta_wc.values().copied())
            .chain(self.beta_high.values().copied())
    }
}

/// Coefficients of the logit of mediator `index` given the treatment, the
/// outer mediators (those with strictly larger index) and the covariates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MediatorModel {
    /// 1-based position in the chain; 1 is innermost.
    pub index: usize,
    pub gamma0: f64,
    pub gamma_x: f64,
    /// Outer-mediator main effects, keyed by the outer index.
    pub gamma_w: BTreeMap<usize, f64>,
    /// Treatment-by-outer-mediator interactions.
    pub gamma_xw: BTreeMap<usize, f64>,
    /// One entry per covariate.
    pub gamma_c: Vec<f64>,
    /// Treatment-by-covariate interactions.
    pub gamma_xc: Vec<f64>,
    /// Covariate-pair interactions, 0-based (i, j) with i < j.
    #[serde(serialize_with = "ser_pair_map")]
    pub gamma_cc: BTreeMap<(usize, usize), f64>,
}

impl MediatorModel {
    /// All-zero model for position `index` over `p` covariates.
    pub fn zeroed(index: usize, p: usize) -> Self {
        Self {
            index,
            gamma0: 0.0,
            gamma_x: 0.0,
            gamma_w: BTreeMap::new(),
            gamma_xw: BTreeMap::new(),
            gamma_c: vec![0.0; p],
            gamma_xc: vec![0.0; p],
            gamma_cc: BTreeMap::new(),
        }
    }

    fn coefficients(&self) -> impl Iterator<Item = f64> + '_ {
        [self.gamma0, self.gamma_x]
            .into_iter()
            .chain(self.gamma_w.values().copied())
            .chain(self.gamma_xw.values().copied())
            .chain(self.gamma_c.iter().copied())
            .chain(self.gamma_xc.iter().copied())
            .chain(self.gamma_cc.values().copied())
    }
}

/// Reversed view of a single binary mediator/confounder: the logit of the
/// treatment given the mediator. For any joint law expressible both ways,
/// `delta_w` must equal the mediator model's `gamma_x`; this is checked by
/// [`check_confounder_consistency`], never assumed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConfounderModel {
    pub delta0: f64,
    pub delta_w: f64,
}

/// Covariate names together with the point the system is evaluated at.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovariateBlock {
    pub names: Vec<String>,
    pub values: Vec<f64>,
}

/// A complete system: treatment kind, mediator chain, outcome model and
/// optional covariate block / reversed confounder view.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemSpec {
    pub treatment: TreatmentKind,
    pub mediators: Vec<MediatorModel>,
    pub outcome: OutcomeModel,
    pub covariates: Option<CovariateBlock>,
    pub confounder_view: Option<ConfounderModel>,
}

impl SystemSpec {
    /// Number of mediators in the chain.
    pub fn k(&self) -> usize {
        self.mediators.len()
    }

    /// Number of covariates.
    pub fn p(&self) -> usize {
        self.covariates.as_ref().map_or(0, |b| b.names.len())
    }

    /// Declared covariate evaluation point (empty when there is no block).
    pub fn covariate_values(&self) -> &[f64] {
        self.covariates.as_ref().map_or(&[], |b| &b.values)
    }

    /// Checks every structural invariant: index ordering, acyclicity of the
    /// mediator dependencies, map keys referencing declared variables,
    /// matching vector lengths and finiteness of all coefficients.
    pub fn validate(&self) -> Result<()> {
        let k = self.k();
        let p = self.p();

        if let Some(block) = &self.covariates {
            if block.names.len() != block.values.len() {
                return Err(Error::DimensionMismatch {
                    what: "covariate values",
                    expected: block.names.len(),
                    actual: block.values.len(),
                });
            }
            if block.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    what: "covariate value",
                });
            }
        }

        for (pos, med) in self.mediators.iter().enumerate() {
            if med.index != pos + 1 {
                return Err(Error::InvalidSpec(format!(
                    "mediator at position {} declares index {}, expected {}",
                    pos,
                    med.index,
                    pos + 1
                )));
            }
            for &dep in med.gamma_w.keys().chain(med.gamma_xw.keys()) {
                if dep <= med.index || dep > k {
                    return Err(Error::InvalidSpec(format!(
                        "mediator {} depends on mediator {}; only strictly \
                         larger indices up to {} are allowed",
                        med.index, dep, k
                    )));
                }
            }
            check_len("gamma_c", &med.gamma_c, p)?;
            check_len("gamma_xc", &med.gamma_xc, p)?;
            check_pair_keys("gamma_cc", &med.gamma_cc, p, false)?;
            if med.coefficients().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    what: "mediator coefficient",
                });
            }
        }

        let o = &self.outcome;
        check_len("beta_w", &o.beta_w, k)?;
        check_len("beta_xw", &o.beta_xw, k)?;
        check_len("beta_c", &o.beta_c, p)?;
        check_len("beta_xc", &o.beta_xc, p)?;
        check_pair_keys("beta_ww", &o.beta_ww, k, true)?;
        check_pair_keys("beta_cc", &o.beta_cc, p, false)?;
        for &(m, cov) in o.beta_wc.keys() {
            if m < 1 || m > k || cov >= p {
                return Err(Error::InvalidSpec(format!(
                    "beta_wc key ({m}, {cov}) references an undeclared mediator or covariate"
                )));
            }
        }
        for term in o.beta_high.keys() {
            let sorted = term.mediators.windows(2).all(|w| w[0] < w[1]);
            let in_range = term.mediators.iter().all(|&m| (1..=k).contains(&m));
            let min_len = if term.with_x { 2 } else { 3 };
            if !sorted || !in_range || term.mediators.len() < min_len {
                return Err(Error::InvalidSpec(format!(
                    "invalid higher-order term {:?}",
                    term
                )));
            }
        }
        if o.coefficients().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "outcome coefficient",
            });
        }

        if let Some(cv) = &self.confounder_view {
            if !cv.delta0.is_finite() || !cv.delta_w.is_finite() {
                return Err(Error::NonFinite {
                    what: "confounder coefficient",
                });
            }
        }
        Ok(())
    }

    /// Conditions the whole system on `C = c`, folding every covariate term
    /// into the intercept-like coefficients. The result has no covariate
    /// block and describes exactly the conditional law at that point.
    pub fn fold_covariates(&self, c: &[f64]) -> Result<SystemSpec> {
        let p = self.p();
        check_len("covariate point", c, p)?;
        if p == 0 {
            return Ok(self.clone());
        }
        let mut out = self.outcome.clone();
        out.beta0 += dot(&out.beta_c, c) + pair_dot(&out.beta_cc, c);
        out.beta_x += dot(&out.beta_xc, c);
        for (&(m, cov), &coef) in &self.outcome.beta_wc {
            out.beta_w[m - 1] += coef * c[cov];
        }
        out.beta_c.clear();
        out.beta_xc.clear();
        out.beta_cc.clear();
        out.beta_wc.clear();

        let mediators = self
            .mediators
            .iter()
            .map(|m| {
                let mut folded = m.clone();
                folded.gamma0 += dot(&m.gamma_c, c) + pair_dot(&m.gamma_cc, c);
                folded.gamma_x += dot(&m.gamma_xc, c);
                folded.gamma_c.clear();
                folded.gamma_xc.clear();
                folded.gamma_cc.clear();
                folded
            })
            .collect();

        Ok(SystemSpec {
            treatment: self.treatment,
            mediators,
            outcome: out,
            covariates: None,
            confounder_view: self.confounder_view,
        })
    }

    /// Conditions mediators `q..=k` at fixed values, returning the system
    /// over mediators `1..q`. Requires a covariate-free system (fold first).
    ///
    /// Valid whenever the conditioned set is an upper range of the chain:
    /// those mediators are ancestors of everything kept, so the conditional
    /// law factorizes along the same chain.
    pub(crate) fn condition_upper(&self, q: usize, values: &[bool]) -> Result<SystemSpec> {
        let k = self.k();
        if self.p() != 0 {
            return Err(Error::InvalidSpec(
                "conditioning on mediators requires covariates to be folded first".into(),
            ));
        }
        if q < 1 || q > k + 1 {
            return Err(Error::MediatorIndex { index: q, k });
        }
        if values.len() != k + 1 - q {
            return Err(Error::DimensionMismatch {
                what: "conditioned mediator values",
                expected: k + 1 - q,
                actual: values.len(),
            });
        }

        let mut terms = outcome_to_terms(&self.outcome, k);
        for (offset, &v) in values.iter().enumerate() {
            terms = condition_terms(terms, q + offset, v);
        }
        let outcome = terms_to_outcome(&terms, q - 1);

        let mediators = self.mediators[..q - 1]
            .iter()
            .map(|m| {
                let mut folded = m.clone();
                for (&dep, &coef) in &m.gamma_w {
                    if dep >= q && values[dep - q] {
                        folded.gamma0 += coef;
                    }
                }
                for (&dep, &coef) in &m.gamma_xw {
                    if dep >= q && values[dep - q] {
                        folded.gamma_x += coef;
                    }
                }
                folded.gamma_w.retain(|&dep, _| dep < q);
                folded.gamma_xw.retain(|&dep, _| dep < q);
                folded
            })
            .collect();

        Ok(SystemSpec {
            treatment: self.treatment,
            mediators,
            outcome,
            covariates: None,
            confounder_view: None,
        })
    }
}

fn check_len(what: &'static str, v: &[f64], expected: usize) -> Result<()> {
    if v.len() != expected {
        return Err(Error::DimensionMismatch {
            what,
            expected,
            actual: v.len(),
        });
    }
    Ok(())
}

fn check_pair_keys(
    what: &str,
    map: &BTreeMap<(usize, usize), f64>,
    n: usize,
    one_based: bool,
) -> Result<()> {
    let lo = usize::from(one_based);
    let hi = if one_based { n } else { n.saturating_sub(1) };
    for &(i, j) in map.keys() {
        if i >= j || i < lo || j > hi {
            return Err(Error::InvalidSpec(format!(
                "{what} key ({i}, {j}) is not an in-range ordered pair"
            )));
        }
    }
    Ok(())
}

// folds from +0.0: the stdlib float Sum starts at -0.0, which would leak a
// negative zero into reports for empty sums
pub(crate) fn dot(coefs: &[f64], values: &[f64]) -> f64 {
    coefs
        .iter()
        .zip(values)
        .fold(0.0, |acc, (a, b)| acc + a * b)
}

fn pair_dot(map: &BTreeMap<(usize, usize), f64>, values: &[f64]) -> f64 {
    map.iter().fold(0.0, |acc, (&(i, j), &coef)| {
        acc + coef * values[i] * values[j]
    })
}

// Dense-subset view of the mediator-involving part of an outcome model,
// keyed by (treatment present, mediator bitmask). Bit j-1 stands for
// mediator j. Used for conditioning; masks stay small because k <= 20.
fn outcome_to_terms(o: &OutcomeModel, k: usize) -> BTreeMap<(bool, u32), f64> {
    let mut terms = BTreeMap::new();
    terms.insert((false, 0u32), o.beta0);
    terms.insert((true, 0u32), o.beta_x);
    for j in 1..=k {
        terms.insert((false, 1 << (j - 1)), o.beta_w[j - 1]);
        terms.insert((true, 1 << (j - 1)), o.beta_xw[j - 1]);
    }
    for (&(i, j), &coef) in &o.beta_ww {
        terms.insert((false, (1 << (i - 1)) | (1 << (j - 1))), coef);
    }
    for (term, &coef) in &o.beta_high {
        let mask = term.mediators.iter().fold(0u32, |m, &j| m | (1 << (j - 1)));
        terms.insert((term.with_x, mask), coef);
    }
    terms
}

fn condition_terms(
    terms: BTreeMap<(bool, u32), f64>,
    mediator: usize,
    value: bool,
) -> BTreeMap<(bool, u32), f64> {
    let bit = 1u32 << (mediator - 1);
    let mut folded: BTreeMap<(bool, u32), f64> = BTreeMap::new();
    for ((with_x, mask), coef) in terms {
        if mask & bit == 0 {
            *folded.entry((with_x, mask)).or_insert(0.0) += coef;
        } else if value {
            *folded.entry((with_x, mask & !bit)).or_insert(0.0) += coef;
        }
        // terms containing a mediator fixed at 0 vanish
    }
    folded
}

pub(crate) fn terms_to_outcome(terms: &BTreeMap<(bool, u32), f64>, k: usize) -> OutcomeModel {
    let mut out = OutcomeModel::zeroed(k, 0);
    for (&(with_x, mask), &coef) in terms {
        let meds: Vec<usize> = (1..=k).filter(|j| mask & (1 << (j - 1)) != 0).collect();
        match (with_x, meds.len()) {
            (false, 0) => out.beta0 = coef,
            (true, 0) => out.beta_x = coef,
            (false, 1) => out.beta_w[meds[0] - 1] = coef,
            (true, 1) => out.beta_xw[meds[0] - 1] = coef,
            (false, 2) => {
                out.beta_ww.insert((meds[0], meds[1]), coef);
            }
            _ => {
                out.beta_high.insert(
                    InteractionTerm {
                        with_x,
                        mediators: meds,
                    },
                    coef,
                );
            }
        }
    }
    out
}

pub(crate) fn check_treatment_value(spec: &SystemSpec, x: f64) -> Result<()> {
    match spec.treatment {
        TreatmentKind::Binary if x != 0.0 && x != 1.0 => {
            Err(Error::BinaryTreatmentValue { value: x })
        }
        _ if !x.is_finite() => Err(Error::NonFinite {
            what: "treatment value",
        }),
        _ => Ok(()),
    }
}

/// Linear predictor of the outcome logit at treatment `x`, mediator values
/// `w` (length k) and covariate point `c` (length p).
pub fn outcome_logit(spec: &SystemSpec, x: f64, w: &[bool], c: &[f64]) -> Result<f64> {
    let o = &spec.outcome;
    check_treatment_value(spec, x)?;
    if w.len() != spec.k() {
        return Err(Error::DimensionMismatch {
            what: "mediator values",
            expected: spec.k(),
            actual: w.len(),
        });
    }
    check_len("covariate point", c, spec.p())?;

    let mut v = o.beta0 + o.beta_x * x;
    for (j, &wj) in w.iter().enumerate() {
        if wj {
            v += o.beta_w[j] + o.beta_xw[j] * x;
        }
    }
    for (&(i, j), &coef) in &o.beta_ww {
        if w[i - 1] && w[j - 1] {
            v += coef;
        }
    }
    for (i, &ci) in c.iter().enumerate() {
        v += (o.beta_c[i] + o.beta_xc[i] * x) * ci;
    }
    v += pair_dot(&o.beta_cc, c);
    for (&(m, cov), &coef) in &o.beta_wc {
        if w[m - 1] {
            v += coef * c[cov];
        }
    }
    for (term, &coef) in &o.beta_high {
        if term.mediators.iter().all(|&m| w[m - 1]) {
            v += if term.with_x { coef * x } else { coef };
        }
    }
    Ok(v)
}

/// Linear predictor of mediator `j`'s logit. `w_outer` supplies the values of
/// mediators `j+1..=k`, innermost first.
pub fn mediator_logit(
    spec: &SystemSpec,
    j: usize,
    x: f64,
    w_outer: &[bool],
    c: &[f64],
) -> Result<f64> {
    let k = spec.k();
    if j < 1 || j > k {
        return Err(Error::MediatorIndex { index: j, k });
    }
    check_treatment_value(spec, x)?;
    if w_outer.len() != k - j {
        return Err(Error::DimensionMismatch {
            what: "outer mediator values",
            expected: k - j,
            actual: w_outer.len(),
        });
    }
    check_len("covariate point", c, spec.p())?;

    let m = &spec.mediators[j - 1];
    let mut v = m.gamma0 + m.gamma_x * x;
    for (&dep, &coef) in &m.gamma_w {
        if w_outer[dep - j - 1] {
            v += coef;
        }
    }
    for (&dep, &coef) in &m.gamma_xw {
        if w_outer[dep - j - 1] {
            v += coef * x;
        }
    }
    for (i, &ci) in c.iter().enumerate() {
        v += (m.gamma_c[i] + m.gamma_xc[i] * x) * ci;
    }
    v += pair_dot(&m.gamma_cc, c);
    Ok(v)
}

/// Evaluations shared by the single-mediator closed forms: the outcome
/// predictor at `w=0`, the gap added by `w=1`, and the mediator predictor.
pub(crate) struct SingleMediatorEval {
    pub eta0: f64,
    pub gap: f64,
    pub med: f64,
}

pub(crate) fn k1_eval(spec: &SystemSpec, x: f64, c: &[f64]) -> Result<SingleMediatorEval> {
    if spec.k() != 1 {
        return Err(Error::SingleMediatorRequired { k: spec.k() });
    }
    let eta0 = outcome_logit(spec, x, &[false], c)?;
    let eta1 = outcome_logit(spec, x, &[true], c)?;
    let med = mediator_logit(spec, 1, x, &[], c)?;
    Ok(SingleMediatorEval {
        eta0,
        gap: eta1 - eta0,
        med,
    })
}

pub(crate) fn posterior_logit_from_eval(eval: &SingleMediatorEval, y: bool) -> f64 {
    let y_term = if y { eval.gap } else { 0.0 };
    y_term + log1p_exp(eval.eta0) - log1p_exp(eval.eta0 + eval.gap) + eval.med
}

/// Logit of `P(W=1 | Y=y, X=x, C=c)` for a single-mediator system, obtained
/// in closed form by flipping the outcome regression through Bayes' rule.
///
/// The two outcome levels differ exactly by the outcome model's mediator
/// terms: `g(1) - g(0)` equals `beta_w + beta_xw * x` whenever no
/// mediator-by-covariate interactions are present.
pub fn mediator_posterior_logit(spec: &SystemSpec, y: bool, x: f64, c: &[f64]) -> Result<f64> {
    let eval = k1_eval(spec, x, c)?;
    Ok(posterior_logit_from_eval(&eval, y))
}

/// Outcome of the reversed-view audit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConfounderConsistency {
    pub delta_w: f64,
    pub gamma_x: f64,
    pub consistent: bool,
}

/// Checks that the declared treatment-given-mediator view agrees with the
/// mediator-given-treatment model: both parameterize the same two-by-two
/// association, so `delta_w` must equal `gamma_x` up to
/// [`CONFOUNDER_TOLERANCE`]. Returns `None` when no reversed view is present.
pub fn check_confounder_consistency(spec: &SystemSpec) -> Result<Option<ConfounderConsistency>> {
    let Some(view) = &spec.confounder_view else {
        return Ok(None);
    };
    if spec.treatment != TreatmentKind::Binary {
        return Err(Error::TreatmentKind {
            expected: TreatmentKind::Binary,
            actual: spec.treatment,
        });
    }
    if spec.k() != 1 {
        return Err(Error::SingleMediatorRequired { k: spec.k() });
    }
    let gamma_x = spec.mediators[0].gamma_x;
    Ok(Some(ConfounderConsistency {
        delta_w: view.delta_w,
        gamma_x,
        consistent: (view.delta_w - gamma_x).abs() <= CONFOUNDER_TOLERANCE,
    }))
}
