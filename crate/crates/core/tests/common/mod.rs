//! Shared builders for randomized cross-checks against the enumeration
//! oracle. Coefficients are drawn uniformly from [-3, 3]: wide enough to
//! exercise the nonlinear regime, narrow enough to keep probabilities away
//! from the underflow edges.

use logitpath::model::{CovariateBlock, MediatorModel, OutcomeModel, SystemSpec, TreatmentKind};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const COEF_LO: f64 = -3.0;
pub const COEF_HI: f64 = 3.0;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn coef<R: Rng>(r: &mut R) -> f64 {
    r.random_range(COEF_LO..COEF_HI)
}

pub fn cov_value<R: Rng>(r: &mut R) -> f64 {
    r.random_range(-2.0..2.0)
}

/// Which coefficient families of a single-mediator system are drawn
/// (anything disabled stays zero).
#[derive(Clone, Copy)]
pub struct K1Shape {
    pub treatment: TreatmentKind,
    pub p: usize,
    pub beta_xw: bool,
    pub beta_xc: bool,
    pub beta_cc: bool,
    pub beta_wc: bool,
    pub gamma_x: bool,
    pub gamma_xc: bool,
    pub gamma_cc: bool,
}

impl K1Shape {
    pub fn plain(treatment: TreatmentKind) -> Self {
        Self {
            treatment,
            p: 0,
            beta_xw: true,
            beta_xc: false,
            beta_cc: false,
            beta_wc: false,
            gamma_x: true,
            gamma_xc: false,
            gamma_cc: false,
        }
    }

    pub fn with_covariates(treatment: TreatmentKind, p: usize) -> Self {
        Self {
            treatment,
            p,
            beta_xw: true,
            beta_xc: true,
            beta_cc: true,
            beta_wc: true,
            gamma_x: true,
            gamma_xc: true,
            gamma_cc: true,
        }
    }
}

/// Random single-mediator system; the covariate block carries a random
/// evaluation point, also returned separately for convenience.
pub fn k1_random<R: Rng>(r: &mut R, shape: K1Shape) -> (SystemSpec, Vec<f64>) {
    let p = shape.p;
    let mut outcome = OutcomeModel {
        beta0: coef(r),
        beta_x: coef(r),
        beta_w: vec![coef(r)],
        beta_xw: vec![if shape.beta_xw { coef(r) } else { 0.0 }],
        ..OutcomeModel::zeroed(1, p)
    };
    let mut mediator = MediatorModel {
        gamma0: coef(r),
        gamma_x: if shape.gamma_x { coef(r) } else { 0.0 },
        ..MediatorModel::zeroed(1, p)
    };
    for i in 0..p {
        outcome.beta_c[i] = coef(r);
        mediator.gamma_c[i] = coef(r);
        if shape.beta_xc {
            outcome.beta_xc[i] = coef(r);
        }
        if shape.gamma_xc {
            mediator.gamma_xc[i] = coef(r);
        }
        if shape.beta_wc {
            outcome.beta_wc.insert((1, i), coef(r));
        }
        for j in (i + 1)..p {
            if shape.beta_cc {
                outcome.beta_cc.insert((i, j), coef(r));
            }
            if shape.gamma_cc {
                mediator.gamma_cc.insert((i, j), coef(r));
            }
        }
    }
    let values: Vec<f64> = (0..p).map(|_| cov_value(r)).collect();
    let covariates = (p > 0).then(|| CovariateBlock {
        names: (0..p).map(|i| format!("c{}", i + 1)).collect(),
        values: values.clone(),
    });
    let spec = SystemSpec {
        treatment: shape.treatment,
        mediators: vec![mediator],
        outcome,
        covariates,
        confounder_view: None,
    };
    spec.validate()
        .expect("random system is structurally valid");
    (spec, values)
}

/// Random covariate-free chain of `k` mediators with a full second-order
/// hierarchical outcome model and full inter-mediator couplings.
pub fn chain_random<R: Rng>(r: &mut R, k: usize, treatment: TreatmentKind) -> SystemSpec {
    let mut outcome = OutcomeModel {
        beta0: coef(r),
        beta_x: coef(r),
        beta_w: (0..k).map(|_| coef(r)).collect(),
        beta_xw: (0..k).map(|_| coef(r)).collect(),
        ..OutcomeModel::zeroed(k, 0)
    };
    for i in 1..=k {
        for j in (i + 1)..=k {
            outcome.beta_ww.insert((i, j), coef(r));
        }
    }
    let mediators = (1..=k)
        .map(|j| {
            let mut m = MediatorModel {
                gamma0: coef(r),
                gamma_x: coef(r),
                ..MediatorModel::zeroed(j, 0)
            };
            for outer in (j + 1)..=k {
                m.gamma_w.insert(outer, coef(r));
                m.gamma_xw.insert(outer, coef(r));
            }
            m
        })
        .collect();
    let spec = SystemSpec {
        treatment,
        mediators,
        outcome,
        covariates: None,
        confounder_view: None,
    };
    spec.validate().expect("random chain is structurally valid");
    spec
}
