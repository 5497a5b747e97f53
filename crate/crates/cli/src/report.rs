//! Deterministic rendering helpers.
//!
//! The table writer emits `# `-prefixed header lines followed by
//! tab-separated rows; every float is printed with 17 significant digits so
//! the text round-trips to the exact binary value. JSON output is pretty-
//! printed with alphabetically ordered keys. Neither carries timestamps:
//! identical inputs produce identical bytes.

use logitpath::model::{InteractionTerm, OutcomeModel, SystemSpec, TreatmentKind};

pub const TOOL: &str = "logitpath";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn fmt_num(v: f64) -> String {
    // render negative zero as plain zero
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

/// Accumulates output lines; rendered with a trailing newline.
pub struct Table {
    lines: Vec<String>,
}

impl Table {
    pub fn new(command: &str, spec: &SystemSpec) -> Self {
        let mut t = Table { lines: Vec::new() };
        t.comment(&format!("{TOOL} {VERSION}"));
        t.comment(&format!("command: {command}"));
        t.comment(&format!(
            "treatment: {}",
            match spec.treatment {
                TreatmentKind::Continuous => "continuous",
                TreatmentKind::Binary => "binary",
            }
        ));
        t.comment(&format!("mediators: {}", spec.k()));
        if let Some(block) = &spec.covariates {
            let rendered: Vec<String> = block
                .names
                .iter()
                .zip(&block.values)
                .map(|(n, v)| format!("{n}={}", fmt_num(*v)))
                .collect();
            t.comment(&format!("covariates: {}", rendered.join(" ")));
        }
        t
    }

    pub fn comment(&mut self, text: &str) {
        self.lines.push(format!("# {text}"));
    }

    pub fn row<S: AsRef<str>>(&mut self, cells: &[S]) {
        self.lines.push(
            cells
                .iter()
                .map(|c| c.as_ref().to_string())
                .collect::<Vec<_>>()
                .join("\t"),
        );
    }

    pub fn render(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }
}

fn high_term_name(term: &InteractionTerm) -> String {
    let meds: Vec<String> = term.mediators.iter().map(ToString::to_string).collect();
    if term.with_x {
        format!("beta_high[x,{}]", meds.join(","))
    } else {
        format!("beta_high[{}]", meds.join(","))
    }
}

/// `name=value` cells for every coefficient of a (reduced) outcome model,
/// in a fixed order.
pub fn outcome_fields(model: &OutcomeModel) -> Vec<String> {
    let mut cells = vec![
        format!("beta0={}", fmt_num(model.beta0)),
        format!("beta_x={}", fmt_num(model.beta_x)),
    ];
    for (j, v) in model.beta_w.iter().enumerate() {
        cells.push(format!("beta_w[{}]={}", j + 1, fmt_num(*v)));
    }
    for (j, v) in model.beta_xw.iter().enumerate() {
        cells.push(format!("beta_xw[{}]={}", j + 1, fmt_num(*v)));
    }
    for (&(i, j), v) in &model.beta_ww {
        cells.push(format!("beta_ww[{i},{j}]={}", fmt_num(*v)));
    }
    for (term, v) in &model.beta_high {
        cells.push(format!("{}={}", high_term_name(term), fmt_num(*v)));
    }
    cells
}
