//! Subcommand drivers: load and validate the specification, run the
//! requested calculus, render the report, and map failures onto the
//! documented exit codes.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Map, Value};

use logitpath::model::{self, SystemSpec, TreatmentKind};
use logitpath::{binary, chain, decomp, oracle};

use crate::report::{fmt_num, outcome_fields, Table, TOOL, VERSION};
use crate::specfile::{self, CoefDto, Options};
use crate::{CheckArgs, CliError, CommonArgs, ReduceArgs};

pub const DEFAULT_TOLERANCE: f64 = 1e-6;

fn request(err: logitpath::Error) -> CliError {
    CliError::from(err)
}

// Test seam: displaces every reported closed-form value so the integration
// tests can drive the --verify failure path.
fn perturbation() -> f64 {
    std::env::var("LOGITPATH_PERTURB")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(0.0)
}

fn load_spec(path: &Path) -> Result<(SystemSpec, Options), CliError> {
    let (spec, options) = specfile::load(path)?;
    spec.validate().map_err(request)?;
    Ok((spec, options))
}

fn treatment_name(spec: &SystemSpec) -> &'static str {
    match spec.treatment {
        TreatmentKind::Continuous => "continuous",
        TreatmentKind::Binary => "binary",
    }
}

fn envelope(spec: &SystemSpec, command: &str) -> Map<String, Value> {
    let mut doc = Map::new();
    doc.insert("tool".into(), json!(TOOL));
    doc.insert("version".into(), json!(VERSION));
    doc.insert("command".into(), json!(command));
    doc.insert("treatment".into(), json!(treatment_name(spec)));
    doc.insert("mediators".into(), json!(spec.k()));
    doc.insert(
        "covariates".into(),
        serde_json::to_value(&spec.covariates).expect("covariate block serializes"),
    );
    doc
}

struct VerifyState {
    tolerance: f64,
    worst: f64,
}

impl VerifyState {
    fn new(tolerance: f64) -> Self {
        Self {
            tolerance,
            worst: 0.0,
        }
    }

    fn record(&mut self, residual: f64) -> f64 {
        self.worst = self.worst.max(residual);
        residual
    }

    fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

fn emit(
    mut table: Table,
    mut doc: Map<String, Value>,
    body: Map<String, Value>,
    json_output: bool,
    verify: Option<&VerifyState>,
) -> Result<(), CliError> {
    for (k, v) in body {
        doc.insert(k, v);
    }
    if let Some(state) = verify {
        let status = if state.passed() { "PASS" } else { "FAIL" };
        table.comment(&format!(
            "verify: {status} (tolerance {}, worst residual {})",
            fmt_num(state.tolerance),
            fmt_num(state.worst)
        ));
        doc.insert(
            "verify".into(),
            json!({
                "tolerance": state.tolerance,
                "worst_residual": state.worst,
                "passed": state.passed(),
            }),
        );
    }
    if json_output {
        let rendered =
            serde_json::to_string_pretty(&Value::Object(doc)).expect("report serializes");
        println!("{rendered}");
    } else {
        print!("{}", table.render());
    }
    if let Some(state) = verify {
        if !state.passed() {
            return Err(CliError::VerifyFailed(format!(
                "worst residual {:e} exceeds tolerance {:e}",
                state.worst, state.tolerance
            )));
        }
    }
    Ok(())
}

fn x_grid(args_x: &Option<Vec<f64>>, options: &Options, fallback: f64) -> Vec<f64> {
    args_x
        .clone()
        .or_else(|| options.x_grid.clone())
        .unwrap_or_else(|| vec![fallback])
}

// ---------------------------------------------------------------------------
// decompose
// ---------------------------------------------------------------------------

pub fn decompose(args: &CommonArgs) -> Result<(), CliError> {
    let (spec, options) = load_spec(&args.spec)?;
    if spec.k() != 1 {
        return Err(CliError::Request(format!(
            "decompose requires exactly one mediator, the file declares {}; use `reduce` for chains",
            spec.k()
        )));
    }
    let tolerance = args
        .tolerance
        .or(options.tolerance)
        .unwrap_or(DEFAULT_TOLERANCE);
    let seam = perturbation();
    let c = spec.covariate_values().to_vec();
    let mut table = Table::new("decompose", &spec);
    let doc = envelope(&spec, "decompose");
    let mut rows = Vec::new();
    let mut verify = args.verify.then(|| VerifyState::new(tolerance));

    match spec.treatment {
        TreatmentKind::Continuous => {
            let grid = x_grid(&args.x, &options, 0.0);
            let mut header = vec![
                "x",
                "direct",
                "interaction",
                "indirect",
                "covariate_treatment",
                "total",
            ];
            if verify.is_some() {
                header.extend(["oracle", "residual"]);
            }
            table.row(&header);
            for &x in &grid {
                let d = decomp::marginal_slope(&spec, x, &c).map_err(request)?;
                let total = d.total + seam;
                let mut cells = vec![
                    fmt_num(x),
                    fmt_num(d.direct),
                    fmt_num(d.interaction),
                    fmt_num(d.indirect),
                    fmt_num(d.covariate_treatment),
                    fmt_num(total),
                ];
                let mut row = json!({
                    "x": x,
                    "direct": d.direct,
                    "interaction": d.interaction,
                    "indirect": d.indirect,
                    "covariate_treatment": d.covariate_treatment,
                    "total": total,
                });
                if let Some(state) = verify.as_mut() {
                    let reference =
                        oracle::marginal_slope_numeric(&spec, x, &c, oracle::DEFAULT_STEP)
                            .map_err(request)?;
                    let residual = state.record((total - reference).abs());
                    cells.push(fmt_num(reference));
                    cells.push(fmt_num(residual));
                    row["oracle"] = json!(reference);
                    row["residual"] = json!(residual);
                }
                table.row(&cells);
                rows.push(row);
            }
        }
        TreatmentKind::Binary => {
            if args.x.is_some() {
                return Err(CliError::Request(
                    "--x applies to continuous treatment only".into(),
                ));
            }
            let d = binary::marginal_log_cpr(&spec, &c).map_err(request)?;
            let total = d.total + seam;
            let mut header = vec![
                "beta_x",
                "covariate_treatment",
                "beta_xw",
                "log_rr_x0",
                "log_rr_x1",
                "total",
            ];
            if verify.is_some() {
                header.extend(["oracle", "residual"]);
            }
            table.row(&header);
            let mut cells = vec![
                fmt_num(d.beta_x),
                fmt_num(d.covariate_treatment),
                fmt_num(d.beta_xw),
                fmt_num(d.log_rr_at_x0),
                fmt_num(d.log_rr_at_x1),
                fmt_num(total),
            ];
            let mut row = json!({
                "beta_x": d.beta_x,
                "covariate_treatment": d.covariate_treatment,
                "beta_xw": d.beta_xw,
                "log_rr_x0": d.log_rr_at_x0,
                "log_rr_x1": d.log_rr_at_x1,
                "total": total,
            });
            if let Some(state) = verify.as_mut() {
                let reference = oracle::log_cpr_numeric(&spec, &c).map_err(request)?;
                let residual = state.record((total - reference).abs());
                cells.push(fmt_num(reference));
                cells.push(fmt_num(residual));
                row["oracle"] = json!(reference);
                row["residual"] = json!(residual);
            }
            table.row(&cells);
            rows.push(row);
        }
    }

    let mut body = Map::new();
    body.insert("rows".into(), Value::Array(rows));
    emit(table, doc, body, args.json, verify.as_ref())
}

// ---------------------------------------------------------------------------
// reduce
// ---------------------------------------------------------------------------

fn parse_keep(raw: Option<&str>) -> Result<BTreeMap<usize, bool>, CliError> {
    let mut keep = BTreeMap::new();
    let Some(raw) = raw else {
        return Ok(keep);
    };
    for part in raw.split(',') {
        let part = part.trim();
        let (idx, val) = part.split_once('=').ok_or_else(|| {
            CliError::Parse(format!(
                "--keep entries must look like INDEX=VALUE, got {part:?}"
            ))
        })?;
        let idx: usize = idx
            .trim()
            .parse()
            .map_err(|_| CliError::Parse(format!("--keep: bad mediator index {idx:?}")))?;
        let val = match val.trim() {
            "0" => false,
            "1" => true,
            other => {
                return Err(CliError::Parse(format!(
                    "--keep: mediator values are 0 or 1, got {other:?}"
                )))
            }
        };
        if keep.insert(idx, val).is_some() {
            return Err(CliError::Parse(format!(
                "--keep lists mediator {idx} twice"
            )));
        }
    }
    Ok(keep)
}

pub fn reduce(args: &ReduceArgs) -> Result<(), CliError> {
    let (spec, options) = load_spec(&args.common.spec)?;
    if args.keep.is_some() && args.taylor_x0.is_some() {
        return Err(CliError::Parse(
            "--keep and --taylor-x0 are mutually exclusive".into(),
        ));
    }
    // an explicit linearization request pins the chain length before
    // anything else, whatever the treatment kind
    if args.taylor_x0.is_some() && spec.k() != 2 {
        return Err(CliError::TaylorShape(spec.k()));
    }
    if spec.k() < 2 {
        return Err(CliError::Request(format!(
            "reduce requires at least two mediators, the file declares {}",
            spec.k()
        )));
    }
    match spec.treatment {
        TreatmentKind::Continuous => {
            let Some(x0) = args.taylor_x0.or(options.taylor_x0) else {
                return Err(CliError::Request(
                    "continuous-treatment reduction is approximate; pass --taylor-x0".into(),
                ));
            };
            if spec.k() != 2 {
                return Err(CliError::TaylorShape(spec.k()));
            }
            reduce_taylor(&spec, &options, x0, &args.common)
        }
        TreatmentKind::Binary => {
            if args.taylor_x0.is_some() {
                return Err(CliError::Request(
                    "--taylor-x0 applies to continuous treatment only".into(),
                ));
            }
            reduce_binary(&spec, &options, args)
        }
    }
}

fn reduce_binary(spec: &SystemSpec, options: &Options, args: &ReduceArgs) -> Result<(), CliError> {
    let keep = parse_keep(args.keep.as_deref())?;
    let c = spec.covariate_values().to_vec();
    let report = if keep.is_empty() {
        chain::total_log_cpr(spec)
    } else {
        chain::partial_log_cpr(spec, &keep, &c)
    }
    .map_err(request)?;
    let seam = perturbation();
    let total = report.total + seam;

    let tolerance = args
        .common
        .tolerance
        .or(options.tolerance)
        .unwrap_or(DEFAULT_TOLERANCE);
    let mut verify = args.common.verify.then(|| VerifyState::new(tolerance));

    let mut table = Table::new("reduce", spec);
    if !keep.is_empty() {
        let rendered: Vec<String> = keep
            .iter()
            .map(|(j, v)| format!("{j}={}", u8::from(*v)))
            .collect();
        table.comment(&format!("keep: {}", rendered.join(",")));
    }
    for step in &report.steps {
        let mut cells = vec![
            "step".to_string(),
            step.removed_index.to_string(),
            format!("exact={}", step.exact),
        ];
        cells.extend(outcome_fields(&step.starred));
        table.row(&cells);
    }
    table.row(&["direct".to_string(), fmt_num(report.direct)]);
    for path in &report.paths {
        table.row(&[
            "path".to_string(),
            path.mediator.to_string(),
            format!("interaction={}", fmt_num(path.interaction)),
            format!("rr_gap={}", fmt_num(path.rr_gap)),
            format!("channel={}", fmt_num(path.channel())),
        ]);
    }
    table.row(&["total".to_string(), fmt_num(total)]);

    let mut oracle_value = None;
    if let Some(state) = verify.as_mut() {
        let fixed: Vec<(usize, bool)> = keep.iter().map(|(&j, &v)| (j, v)).collect();
        let reference = if keep.is_empty() {
            oracle::log_cpr_numeric(spec, &c).map_err(request)?
        } else {
            oracle::conditional_logit_numeric(spec, 1.0, &c, &fixed).map_err(request)?
                - oracle::conditional_logit_numeric(spec, 0.0, &c, &fixed).map_err(request)?
        };
        state.record((total - reference).abs());
        oracle_value = Some(reference);
    }

    let doc = envelope(spec, "reduce");
    let mut body = Map::new();
    body.insert(
        "keep".into(),
        json!(keep
            .iter()
            .map(|(j, v)| json!({"mediator": j, "value": u8::from(*v)}))
            .collect::<Vec<_>>()),
    );
    body.insert(
        "steps".into(),
        serde_json::to_value(&report.steps).expect("steps serialize"),
    );
    body.insert("direct".into(), json!(report.direct));
    body.insert(
        "paths".into(),
        json!(report
            .paths
            .iter()
            .map(|p| json!({
                "mediator": p.mediator,
                "interaction": p.interaction,
                "rr_gap": p.rr_gap,
                "channel": p.channel(),
            }))
            .collect::<Vec<_>>()),
    );
    body.insert("total".into(), json!(total));
    if let Some(reference) = oracle_value {
        body.insert("oracle".into(), json!(reference));
    }
    emit(table, doc, body, args.common.json, verify.as_ref())
}

fn reduce_taylor(
    spec: &SystemSpec,
    options: &Options,
    x0: f64,
    args: &CommonArgs,
) -> Result<(), CliError> {
    let (tilde, coeffs) = chain::taylor_reduce(spec, x0).map_err(request)?;
    let seam = perturbation();
    let c = spec.covariate_values().to_vec();
    let grid = x_grid(&args.x, options, x0);
    let tolerance = args
        .tolerance
        .or(options.tolerance)
        .unwrap_or(DEFAULT_TOLERANCE);
    let mut verify = args.verify.then(|| VerifyState::new(tolerance));

    let mut table = Table::new("reduce", spec);
    table.comment(&format!("taylor_x0: {}", fmt_num(x0)));
    table.row(&[
        "taylor".to_string(),
        "exact=false".to_string(),
        format!("beta0={}", fmt_num(coeffs.beta0)),
        format!("beta_x={}", fmt_num(coeffs.beta_x)),
        format!("beta_w2={}", fmt_num(coeffs.beta_w2)),
        format!("beta_xw2={}", fmt_num(coeffs.beta_xw2)),
    ]);

    // the linearization must reproduce the reduced logit at the expansion
    // point; only these anchor residuals gate --verify, the slope residuals
    // of the approximate rows are informational
    let mut anchors = Vec::new();
    for w2 in [false, true] {
        let lin = model::outcome_logit(&tilde, x0, &[w2], &[]).map_err(request)? + seam;
        let reference =
            oracle::conditional_logit_numeric(spec, x0, &c, &[(2, w2)]).map_err(request)?;
        let residual = (lin - reference).abs();
        if let Some(state) = verify.as_mut() {
            state.record(residual);
        }
        anchors.push(json!({
            "w2": u8::from(w2),
            "linearized": lin,
            "oracle": reference,
            "residual": residual,
        }));
        table.row(&[
            "anchor".to_string(),
            format!("w2={}", u8::from(w2)),
            format!("residual={}", fmt_num(residual)),
        ]);
    }

    let mut header = vec![
        "x",
        "direct",
        "interaction",
        "indirect",
        "covariate_treatment",
        "total",
        "exact",
    ];
    if verify.is_some() {
        header.extend(["oracle", "residual"]);
    }
    table.row(&header);
    let mut rows = Vec::new();
    for &x in &grid {
        let d = decomp::marginal_slope(&tilde, x, &[]).map_err(request)?;
        let total = d.total + seam;
        let mut cells = vec![
            fmt_num(x),
            fmt_num(d.direct),
            fmt_num(d.interaction),
            fmt_num(d.indirect),
            fmt_num(d.covariate_treatment),
            fmt_num(total),
            "false".to_string(),
        ];
        let mut row = json!({
            "x": x,
            "direct": d.direct,
            "interaction": d.interaction,
            "indirect": d.indirect,
            "covariate_treatment": d.covariate_treatment,
            "total": total,
            "exact": false,
        });
        if verify.is_some() {
            let reference = oracle::marginal_slope_numeric(spec, x, &c, oracle::DEFAULT_STEP)
                .map_err(request)?;
            let residual = (total - reference).abs();
            cells.push(fmt_num(reference));
            cells.push(fmt_num(residual));
            row["oracle"] = json!(reference);
            row["residual"] = json!(residual);
        }
        table.row(&cells);
        rows.push(row);
    }

    let doc = envelope(spec, "reduce");
    let mut body = Map::new();
    body.insert(
        "taylor".into(),
        serde_json::to_value(coeffs).expect("taylor coefficients serialize"),
    );
    body.insert("anchors".into(), Value::Array(anchors));
    body.insert("rows".into(), Value::Array(rows));
    emit(table, doc, body, args.json, verify.as_ref())
}

// ---------------------------------------------------------------------------
// sensitivity
// ---------------------------------------------------------------------------

fn coef_input(dto: CoefDto) -> decomp::CoefInput {
    match dto {
        CoefDto::Point(v) => decomp::CoefInput::Known(v),
        CoefDto::Interval([lower, upper]) => decomp::CoefInput::Interval { lower, upper },
    }
}

fn sweep_interval(grid: &[f64]) -> decomp::CoefInput {
    let lower = grid.iter().copied().fold(f64::INFINITY, f64::min);
    let upper = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    decomp::CoefInput::Interval { lower, upper }
}

pub fn sensitivity(args: &CommonArgs) -> Result<(), CliError> {
    let (spec, options) = load_spec(&args.spec)?;
    if spec.k() != 1 {
        return Err(CliError::Request(format!(
            "sensitivity sweeps single-mediator systems, the file declares {} mediators",
            spec.k()
        )));
    }
    let sweep = options
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::EmptySweep("the file declares no options.sweep block".into()))?;
    let axes: Vec<(&str, Vec<f64>)> = [
        ("beta_w", sweep.beta_w.clone()),
        ("beta_xw", sweep.beta_xw.clone()),
        ("gamma_x", sweep.gamma_x.clone()),
    ]
    .into_iter()
    .filter_map(|(name, grid)| grid.map(|g| (name, g)))
    .collect();
    if axes.is_empty() {
        return Err(CliError::EmptySweep(
            "options.sweep lists no coefficients".into(),
        ));
    }
    for (name, grid) in &axes {
        if grid.is_empty() {
            return Err(CliError::EmptySweep(format!(
                "sweep grid for {name} is empty"
            )));
        }
    }
    let tolerance = args
        .tolerance
        .or(options.tolerance)
        .unwrap_or(DEFAULT_TOLERANCE);
    let seam = perturbation();
    let c = spec.covariate_values().to_vec();
    let continuous = spec.treatment == TreatmentKind::Continuous;
    if !continuous && args.x.is_some() {
        return Err(CliError::Request(
            "--x applies to continuous treatment only".into(),
        ));
    }
    let grid_x = x_grid(&args.x, &options, 0.0);
    let mut verify = args.verify.then(|| VerifyState::new(tolerance));

    let mut table = Table::new("sensitivity", &spec);
    let sweep_echo: Vec<String> = axes
        .iter()
        .map(|(name, grid)| {
            let vals: Vec<String> = grid.iter().map(|v| fmt_num(*v)).collect();
            format!("{name}=[{}]", vals.join(","))
        })
        .collect();
    table.comment(&format!("sweep: {}", sweep_echo.join(" ")));

    let mut header: Vec<&str> = axes.iter().map(|(name, _)| *name).collect();
    if continuous {
        header.extend([
            "x",
            "direct",
            "interaction",
            "indirect",
            "covariate_treatment",
            "total",
        ]);
    } else {
        header.extend([
            "beta_x",
            "covariate_treatment",
            "beta_xw",
            "log_rr_x0",
            "log_rr_x1",
            "total",
        ]);
    }
    if verify.is_some() {
        header.extend(["oracle", "residual"]);
    }
    table.row(&header);

    let mut rows = Vec::new();
    let mut indices = vec![0usize; axes.len()];
    loop {
        let mut modified = spec.clone();
        let mut swept_cells = Vec::new();
        let mut swept_json = Map::new();
        for (slot, (name, grid)) in indices.iter().zip(&axes) {
            let value = grid[*slot];
            match *name {
                "beta_w" => modified.outcome.beta_w[0] = value,
                "beta_xw" => modified.outcome.beta_xw[0] = value,
                "gamma_x" => modified.mediators[0].gamma_x = value,
                _ => unreachable!("axis names are fixed"),
            }
            swept_cells.push(fmt_num(value));
            swept_json.insert((*name).into(), json!(value));
        }

        if continuous {
            for &x in &grid_x {
                let d = decomp::marginal_slope(&modified, x, &c).map_err(request)?;
                let total = d.total + seam;
                let mut cells = swept_cells.clone();
                cells.extend([
                    fmt_num(x),
                    fmt_num(d.direct),
                    fmt_num(d.interaction),
                    fmt_num(d.indirect),
                    fmt_num(d.covariate_treatment),
                    fmt_num(total),
                ]);
                let mut row = swept_json.clone();
                row.insert("x".into(), json!(x));
                row.insert("direct".into(), json!(d.direct));
                row.insert("interaction".into(), json!(d.interaction));
                row.insert("indirect".into(), json!(d.indirect));
                row.insert("covariate_treatment".into(), json!(d.covariate_treatment));
                row.insert("total".into(), json!(total));
                if let Some(state) = verify.as_mut() {
                    let reference =
                        oracle::marginal_slope_numeric(&modified, x, &c, oracle::DEFAULT_STEP)
                            .map_err(request)?;
                    let residual = state.record((total - reference).abs());
                    cells.push(fmt_num(reference));
                    cells.push(fmt_num(residual));
                    row.insert("oracle".into(), json!(reference));
                    row.insert("residual".into(), json!(residual));
                }
                table.row(&cells);
                rows.push(Value::Object(row));
            }
        } else {
            let d = binary::marginal_log_cpr(&modified, &c).map_err(request)?;
            let total = d.total + seam;
            let mut cells = swept_cells.clone();
            cells.extend([
                fmt_num(d.beta_x),
                fmt_num(d.covariate_treatment),
                fmt_num(d.beta_xw),
                fmt_num(d.log_rr_at_x0),
                fmt_num(d.log_rr_at_x1),
                fmt_num(total),
            ]);
            let mut row = swept_json.clone();
            row.insert("beta_x".into(), json!(d.beta_x));
            row.insert("covariate_treatment".into(), json!(d.covariate_treatment));
            row.insert("beta_xw".into(), json!(d.beta_xw));
            row.insert("log_rr_x0".into(), json!(d.log_rr_at_x0));
            row.insert("log_rr_x1".into(), json!(d.log_rr_at_x1));
            row.insert("total".into(), json!(total));
            if let Some(state) = verify.as_mut() {
                let reference = oracle::log_cpr_numeric(&modified, &c).map_err(request)?;
                let residual = state.record((total - reference).abs());
                cells.push(fmt_num(reference));
                cells.push(fmt_num(residual));
                row.insert("oracle".into(), json!(reference));
                row.insert("residual".into(), json!(residual));
            }
            table.row(&cells);
            rows.push(Value::Object(row));
        }

        // advance the multi-index, first axis slowest
        let mut pos = axes.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            indices[pos] += 1;
            if indices[pos] < axes[pos].1.len() {
                break;
            }
            indices[pos] = 0;
            if pos == 0 {
                pos = usize::MAX;
                break;
            }
        }
        if pos == usize::MAX {
            break;
        }
    }

    // interval envelope across the sweep (explicit bounds declarations win)
    let declared = options.bounds.as_ref();
    let grid_of = |name: &str| {
        axes.iter()
            .find(|(axis, _)| *axis == name)
            .map(|(_, grid)| grid.as_slice())
    };
    let beta_x_in = declared
        .and_then(|b| b.beta_x)
        .map(coef_input)
        .unwrap_or(decomp::CoefInput::Known(spec.outcome.beta_x));
    let beta_xw_in = declared
        .and_then(|b| b.beta_xw)
        .map(coef_input)
        .or_else(|| grid_of("beta_xw").map(sweep_interval))
        .unwrap_or(decomp::CoefInput::Known(spec.outcome.beta_xw[0]));
    let gamma_x_in = declared
        .and_then(|b| b.gamma_x)
        .map(coef_input)
        .or_else(|| grid_of("gamma_x").map(sweep_interval))
        .unwrap_or(decomp::CoefInput::Known(spec.mediators[0].gamma_x));
    let bounds = decomp::slope_bounds(beta_x_in, beta_xw_in, gamma_x_in).map_err(request)?;
    table.row(&[
        "bounds".to_string(),
        format!("lower={}", fmt_num(bounds.lower)),
        format!("upper={}", fmt_num(bounds.upper)),
    ]);

    let doc = envelope(&spec, "sensitivity");
    let mut body = Map::new();
    let sweep_json: Map<String, Value> = axes
        .iter()
        .map(|(name, grid)| ((*name).to_string(), json!(grid)))
        .collect();
    body.insert("sweep".into(), Value::Object(sweep_json));
    body.insert("rows".into(), Value::Array(rows));
    body.insert(
        "bounds".into(),
        serde_json::to_value(&bounds).expect("bounds serialize"),
    );
    emit(table, doc, body, args.json, verify.as_ref())
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

pub fn check(args: &CheckArgs) -> Result<(), CliError> {
    let (spec, _) = load_spec(&args.spec)?;
    let binary_single = spec.treatment == TreatmentKind::Binary && spec.k() == 1;
    let mut table = Table::new("check", &spec);
    let mut checks = Vec::new();
    let mut failed = false;

    // reversed-view consistency
    if spec.confounder_view.is_none() {
        table.row(&[
            "check",
            "confounder_consistency",
            "status=not_applicable",
            "reason=no reversed view declared",
        ]);
        checks.push(json!({
            "name": "confounder_consistency",
            "status": "not_applicable",
            "reason": "no reversed view declared",
        }));
    } else if !binary_single {
        let reason = "reversed view applies to a binary treatment with one mediator";
        table.row(&[
            "check",
            "confounder_consistency",
            "status=not_applicable",
            &format!("reason={reason}"),
        ]);
        checks.push(json!({
            "name": "confounder_consistency",
            "status": "not_applicable",
            "reason": reason,
        }));
    } else {
        let result = model::check_confounder_consistency(&spec)
            .map_err(request)?
            .expect("reversed view present");
        let status = if result.consistent { "pass" } else { "fail" };
        failed |= !result.consistent;
        table.row(&[
            "check".to_string(),
            "confounder_consistency".to_string(),
            format!("status={status}"),
            format!("delta_w={}", fmt_num(result.delta_w)),
            format!("gamma_x={}", fmt_num(result.gamma_x)),
        ]);
        checks.push(json!({
            "name": "confounder_consistency",
            "status": status,
            "delta_w": result.delta_w,
            "gamma_x": result.gamma_x,
        }));
    }

    // four-relative-risk interaction identity
    if binary_single {
        let residual = binary::interaction_identity_residual(&spec).map_err(request)?;
        let ok = residual.abs() <= binary::IDENTITY_TOLERANCE;
        failed |= !ok;
        let status = if ok { "pass" } else { "fail" };
        table.row(&[
            "check".to_string(),
            "interaction_identity".to_string(),
            format!("status={status}"),
            format!("residual={}", fmt_num(residual)),
        ]);
        checks.push(json!({
            "name": "interaction_identity",
            "status": status,
            "residual": residual,
        }));
    } else {
        let reason = "identity applies to a binary treatment with one mediator";
        table.row(&[
            "check",
            "interaction_identity",
            "status=not_applicable",
            &format!("reason={reason}"),
        ]);
        checks.push(json!({
            "name": "interaction_identity",
            "status": "not_applicable",
            "reason": reason,
        }));
    }

    let doc = envelope(&spec, "check");
    let mut body = Map::new();
    body.insert("checks".into(), Value::Array(checks));
    emit(table, doc, body, args.json, None)?;
    if failed {
        return Err(CliError::VerifyFailed("an audit reported FAIL".into()));
    }
    Ok(())
}
