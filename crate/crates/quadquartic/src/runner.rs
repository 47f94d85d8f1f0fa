//! Command implementations shared by the CLI and the integration tests.
//! Each command consumes a `RunConfig` and produces a JSON report plus
//! optional CSV tables; `write_outputs` persists them under an output
//! directory.

use std::fs;
use std::path::PathBuf;

use serde_json::{json, Value};

use crate::bounds::{
    admissible_direction, corollary_bound, corollary_quart_power_y_as_printed, theorem_bound,
    theorem_bound_truncated, BoundFlavor, Perturbation, PerturbationKind,
};
use crate::config::RunConfig;
use crate::equation::{identity_probe, residual_probe, Identity};
use crate::error::{Error, Result};
use crate::hyers::{approximant, Component, Direction, IterationConfig};
use crate::pnorm::ineq_holds;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone)]
pub struct OutputOptions {
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    pub quiet: bool,
}

/// Result of one command run: the math verdict, the report document, and
/// named CSV tables.
#[derive(Debug, Clone)]
pub struct CommandOutcome {
    pub ok: bool,
    pub report: Value,
    pub tables: Vec<(String, String)>,
}

impl CommandOutcome {
    /// Every report carries the overall verdict under the same key.
    fn new(ok: bool, mut report: Value, tables: Vec<(String, String)>) -> Self {
        report["ok"] = Value::Bool(ok);
        CommandOutcome { ok, report, tables }
    }
}

fn fmt_float(v: f64) -> String {
    format!("{v:.17e}")
}

fn coord_headers(prefix: &str, dim: usize) -> Vec<String> {
    (0..dim).map(|i| format!("{prefix}_{i}")).collect()
}

fn push_coords(row: &mut Vec<String>, coords: &[f64]) {
    row.extend(coords.iter().map(|c| fmt_float(*c)));
}

fn csv_table(header: Vec<String>, rows: Vec<Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn direction_name(d: Direction) -> &'static str {
    match d {
        Direction::Shrink => "shrink",
        Direction::Grow => "grow",
    }
}

/// Verify that the configured function satisfies the equation on all grid
/// pairs, within the configured tolerance.
pub fn check_solution(cfg: &RunConfig) -> Result<CommandOutcome> {
    cfg.validate()?;
    let f = cfg.build_function()?;
    let eq = cfg.eq()?;
    let space = f.target();
    let pairs = cfg.grid.axis_pairs(f.domain_dim())?;
    let dim = f.domain_dim();

    let mut rows = Vec::with_capacity(pairs.len());
    let mut worst: Option<(f64, &(Vec<f64>, Vec<f64>))> = None;
    let mut max_residual: f64 = 0.0;
    let mut all_ok = true;
    for pair in &pairs {
        let (x, y) = pair;
        let probe = residual_probe(&f, &eq, x, y)?;
        let rnorm = probe.residual_norm(&space);
        let scaled = rnorm / (1.0 + probe.magnitude);
        let ok = probe.within(&space, cfg.tolerance);
        all_ok &= ok;
        max_residual = max_residual.max(rnorm);
        if worst.map(|(w, _)| scaled > w).unwrap_or(true) {
            worst = Some((scaled, pair));
        }
        let mut row = Vec::new();
        push_coords(&mut row, x);
        push_coords(&mut row, y);
        row.push(fmt_float(rnorm));
        row.push(fmt_float(probe.magnitude));
        row.push(ok.to_string());
        rows.push(row);
    }
    let mut header = coord_headers("x", dim);
    header.extend(coord_headers("y", dim));
    header.extend(["residual_norm".into(), "magnitude".into(), "ok".into()]);

    let (worst_scaled, worst_pair) = worst.map(|(w, p)| (w, p.clone())).unwrap();
    let report = json!({
        "command": "check_solution",
        "function": f.label(),
        "n": eq.n,
        "p": space.p,
        "domain_dim": dim,
        "grid_points": cfg.grid.count,
        "pair_count": pairs.len(),
        "tolerance": cfg.tolerance,
        "max_residual_norm": max_residual,
        "worst_scaled_residual": worst_scaled,
        "worst_pair": {"x": worst_pair.0, "y": worst_pair.1},
        "is_solution": all_ok,
    });
    Ok(CommandOutcome::new(
        all_ok,
        report,
        vec![("points.csv".into(), csv_table(header, rows))],
    ))
}

/// Split the function into its quadratic and quartic parts on the grid and
/// check that the parts recombine to the function.
pub fn decompose(cfg: &RunConfig) -> Result<CommandOutcome> {
    cfg.validate()?;
    let f = cfg.build_function()?;
    let space = f.target();
    let quad = crate::equation::quad_transform(&f);
    let quart = crate::equation::quart_transform(&f);
    let points = cfg.grid.axis_points(f.domain_dim())?;
    let dim = f.domain_dim();

    let mut rows = Vec::with_capacity(points.len());
    let mut max_deviation: f64 = 0.0;
    for x in &points {
        let fx = f.value(x);
        let q = quad.value(x).scale(-1.0 / 12.0);
        let t = quart.value(x).scale(1.0 / 12.0);
        let recombined = q.add(&t);
        let deviation = space.norm(&fx.sub(&recombined));
        max_deviation = max_deviation.max(deviation);
        let mut row = Vec::new();
        push_coords(&mut row, x);
        push_coords(&mut row, fx.coords());
        push_coords(&mut row, q.coords());
        push_coords(&mut row, t.coords());
        row.push(fmt_float(deviation));
        rows.push(row);
    }
    let mut header = coord_headers("x", dim);
    header.extend(coord_headers("f", space.dim));
    header.extend(coord_headers("quadratic_part", space.dim));
    header.extend(coord_headers("quartic_part", space.dim));
    header.push("recombine_deviation".into());

    let ok = max_deviation <= cfg.tolerance;
    let mut report = json!({
        "command": "decompose",
        "function": f.label(),
        "p": space.p,
        "domain_dim": dim,
        "grid_points": points.len(),
        "max_recombine_deviation": max_deviation,
        "parts_recombine": ok,
    });
    if dim == 1 && space.dim == 1 {
        // At x = 1 the parts read off the solution coefficients directly.
        let q1 = quad.value(&[1.0]).coords()[0] / -12.0;
        let t1 = quart.value(&[1.0]).coords()[0] / 12.0;
        report["estimated_quadratic_coefficient"] = json!(q1);
        report["estimated_quartic_coefficient"] = json!(t1);
    }
    Ok(CommandOutcome::new(
        ok,
        report,
        vec![("points.csv".into(), csv_table(header, rows))],
    ))
}

fn resolve_direction(
    cfg: &RunConfig,
    component: Component,
    phi: &Perturbation,
) -> Result<Direction> {
    match cfg.direction() {
        Some(d) => Ok(d),
        None => {
            if phi.theta == 0.0 {
                Ok(Direction::Grow)
            } else {
                admissible_direction(component, phi)
            }
        }
    }
}

/// Run the dyadic approximation scheme for the configured component(s) at
/// every grid point, recording the per-step trace.
pub fn hyers(cfg: &RunConfig) -> Result<CommandOutcome> {
    cfg.validate()?;
    let f = cfg.build_function()?;
    let space = f.target();
    let phi = cfg.resolve_control(&f)?;
    let points = cfg.grid.axis_points(f.domain_dim())?;
    let dim = f.domain_dim();

    let components: Vec<Component> = match cfg.flavor_component() {
        Some(c) => vec![c],
        None => vec![Component::Quadratic, Component::Quartic],
    };

    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    let mut all_converged = true;
    let mut max_tail: f64 = 0.0;
    let mut directions = Vec::new();
    for &component in &components {
        let direction = resolve_direction(cfg, component, &phi)?;
        directions.push(json!({
            "component": component.name(),
            "direction": direction_name(direction),
        }));
        let iter = IterationConfig {
            m_max: cfg.iteration.m_max,
            tol: cfg.iteration.tol,
            direction,
            target: component,
        };
        let part = component.transform(&f);
        for (idx, x) in points.iter().enumerate() {
            let run = approximant(&f, &iter, x)?;
            all_converged &= run.converged;
            max_tail = max_tail.max(run.tail);
            let mut prev = part.value(x);
            for (step, s) in run.trace.iter().enumerate() {
                let tail = space.norm(&s.sub(&prev));
                let mut row = vec![
                    idx.to_string(),
                    component.name().to_string(),
                    (step + 1).to_string(),
                ];
                push_coords(&mut row, x);
                push_coords(&mut row, s.coords());
                row.push(fmt_float(tail));
                rows.push(row);
                prev = s.clone();
            }
            summaries.push(json!({
                "point": x,
                "component": component.name(),
                "m_used": run.m_used,
                "tail": run.tail,
                "tail_estimate": run.tail_estimate,
                "converged": run.converged,
                "limit": run.value.coords(),
            }));
        }
    }
    let mut header = vec!["point_index".to_string(), "component".to_string(), "m".to_string()];
    header.extend(coord_headers("x", dim));
    header.extend(coord_headers("approx", space.dim));
    header.push("step_tail".into());

    let report = json!({
        "command": "hyers",
        "function": f.label(),
        "n": cfg.equation.n,
        "p": space.p,
        "m_max": cfg.iteration.m_max,
        "tol": cfg.iteration.tol,
        "directions": directions,
        "control": phi,
        "grid_points": points.len(),
        "all_converged": all_converged,
        "max_tail": max_tail,
        "runs": summaries,
    });
    Ok(CommandOutcome::new(
        all_converged,
        report,
        vec![("trace.csv".into(), csv_table(header, rows))],
    ))
}

/// Full certification pipeline: premise on grid pairs, approximants and
/// theorem bound per grid point.
pub fn certify_cmd(cfg: &RunConfig) -> Result<CommandOutcome> {
    cfg.validate()?;
    let f = cfg.build_function()?;
    let phi = cfg.resolve_control(&f)?;
    let bp = cfg.bound_params()?;
    let grid = cfg.grid.axis_points(f.domain_dim())?;
    let iter = cfg.iter_budget();
    let report = crate::bounds::certify(
        &f,
        &phi,
        &bp,
        &iter,
        &grid,
        cfg.certify.flavor,
        cfg.direction(),
    )?;

    let dim = f.domain_dim();
    let mut header = coord_headers("x", dim);
    header.extend([
        "lhs".to_string(),
        "bound".to_string(),
        "bound_alt".to_string(),
        "ratio".to_string(),
        "ok".to_string(),
        "m_used_quadratic".to_string(),
        "m_used_quartic".to_string(),
    ]);
    let rows: Vec<Vec<String>> = report
        .details
        .iter()
        .map(|d| {
            let mut row = Vec::new();
            push_coords(&mut row, &d.x);
            row.push(fmt_float(d.lhs));
            row.push(fmt_float(d.bound));
            row.push(fmt_float(d.bound_alt));
            row.push(fmt_float(d.ratio));
            row.push(d.ok.to_string());
            row.push(d.m_used_quadratic.map(|m| m.to_string()).unwrap_or_default());
            row.push(d.m_used_quartic.map(|m| m.to_string()).unwrap_or_default());
            row
        })
        .collect();

    let ok = report.premise_ok && report.bound_ok;
    let mut doc = serde_json::to_value(&report)
        .map_err(|e| Error::Config(format!("cannot serialize report: {e}")))?;
    doc["command"] = json!("certify");
    doc["function"] = json!(f.label());
    Ok(CommandOutcome::new(
        ok,
        doc,
        vec![("points.csv".into(), csv_table(header, rows))],
    ))
}

/// Check the six derived identities on all grid pairs.
pub fn identities(cfg: &RunConfig) -> Result<CommandOutcome> {
    cfg.validate()?;
    let f = cfg.build_function()?;
    let eq = cfg.eq()?;
    let space = f.target();
    let pairs = cfg.grid.axis_pairs(f.domain_dim())?;
    let dim = f.domain_dim();

    let mut rows = Vec::new();
    let mut per_identity = Vec::new();
    let mut all_ok = true;
    for identity in Identity::ALL {
        let mut max_norm: f64 = 0.0;
        let mut id_ok = true;
        for (x, y) in &pairs {
            let probe = identity_probe(&f, identity, &eq, x, y)?;
            let rnorm = probe.residual_norm(&space);
            let ok = probe.within(&space, cfg.tolerance);
            id_ok &= ok;
            max_norm = max_norm.max(rnorm);
            let mut row = vec![identity.name().to_string()];
            push_coords(&mut row, x);
            push_coords(&mut row, y);
            row.push(fmt_float(rnorm));
            row.push(ok.to_string());
            rows.push(row);
        }
        all_ok &= id_ok;
        per_identity.push(json!({
            "identity": identity.name(),
            "max_residual_norm": max_norm,
            "holds": id_ok,
        }));
    }
    let mut header = vec!["identity".to_string()];
    header.extend(coord_headers("x", dim));
    header.extend(coord_headers("y", dim));
    header.extend(["residual_norm".into(), "ok".into()]);

    let report = json!({
        "command": "identities",
        "function": f.label(),
        "n": eq.n,
        "p": space.p,
        "pair_count": pairs.len(),
        "tolerance": cfg.tolerance,
        "identities": per_identity,
        "all_hold": all_ok,
    });
    Ok(CommandOutcome::new(
        all_ok,
        report,
        vec![("points.csv".into(), csv_table(header, rows))],
    ))
}

/// Evaluate the theorem bound (closed and truncated) and the printed
/// closed-form constant on the grid, and check that the closed form
/// dominates the truncated series.
pub fn bounds_cmd(cfg: &RunConfig) -> Result<CommandOutcome> {
    cfg.validate()?;
    let f = cfg.build_function()?;
    let phi = cfg.resolve_control(&f)?;
    let bp = cfg.bound_params()?;
    let flavor = cfg.certify.flavor;
    let points = cfg.grid.axis_points(f.domain_dim())?;
    let dim = f.domain_dim();

    let direction = match cfg.flavor_component() {
        Some(c) => Some(resolve_direction(cfg, c, &phi)?),
        None => None,
    };
    // The mixed flavor resolves directions internally; feed it any.
    let dir_arg = direction.unwrap_or(Direction::Grow);

    let mut rows = Vec::with_capacity(points.len());
    let mut dominates = true;
    let mut worst_gap: f64 = 0.0;
    for x in &points {
        let closed = theorem_bound(flavor, dir_arg, &phi, &bp, x)?;
        let truncated = theorem_bound_truncated(flavor, dir_arg, &phi, &bp, x)?;
        let coro = corollary_bound(flavor, &phi, &bp, x)?;
        dominates &= ineq_holds(truncated, coro);
        if coro > 0.0 {
            worst_gap = worst_gap.max((coro - truncated) / coro);
        }
        let mut row = Vec::new();
        push_coords(&mut row, x);
        row.push(fmt_float(truncated));
        row.push(fmt_float(closed));
        row.push(fmt_float(coro));
        rows.push(row);
    }
    let mut header = coord_headers("x", dim);
    header.extend([
        "theorem_bound_truncated".to_string(),
        "theorem_bound_closed".to_string(),
        "closed_form_constant".to_string(),
    ]);

    let printed_variant = if flavor == BoundFlavor::Quartic
        && phi.kind == PerturbationKind::PowerY
    {
        Some(corollary_quart_power_y_as_printed(&phi, &bp, &[1.0])?)
    } else {
        None
    };

    let report = json!({
        "command": "bounds",
        "flavor": flavor.name(),
        "control": phi,
        "n": bp.n,
        "p": bp.p,
        "modulus": bp.modulus,
        "truncation": bp.truncation,
        "direction": direction.map(direction_name),
        "grid_points": points.len(),
        "closed_form_dominates_truncated": dominates,
        "max_relative_gap": worst_gap,
        "quart_power_y_as_printed_at_unit": printed_variant,
    });
    Ok(CommandOutcome::new(
        dominates,
        report,
        vec![("points.csv".into(), csv_table(header, rows))],
    ))
}

/// Write report.json and the CSV tables under the output directory, and
/// print to stdout according to the format unless quiet.
pub fn write_outputs(outcome: &CommandOutcome, opts: &OutputOptions) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(&opts.out_dir)?;
    let mut written = Vec::new();
    let report_path = opts.out_dir.join("report.json");
    let mut text = serde_json::to_string_pretty(&outcome.report)?;
    text.push('\n');
    fs::write(&report_path, &text)?;
    written.push(report_path);
    for (name, body) in &outcome.tables {
        let path = opts.out_dir.join(name);
        fs::write(&path, body)?;
        written.push(path);
    }
    if !opts.quiet {
        match opts.format {
            OutputFormat::Json => emit(&text)?,
            OutputFormat::Csv => {
                for (_, body) in &outcome.tables {
                    emit(body)?;
                }
            }
        }
    }
    Ok(written)
}

/// Print to stdout without panicking when the reader closes the pipe early
/// (e.g. piping csv output through `head`); the files are on disk either
/// way and the exit status still reflects the checks.
fn emit(text: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

/// Convenience used by tests: run a named command.
pub fn run_named(command: &str, cfg: &RunConfig) -> Result<CommandOutcome> {
    match command {
        "check-solution" => check_solution(cfg),
        "decompose" => decompose(cfg),
        "hyers" => hyers(cfg),
        "certify" => certify_cmd(cfg),
        "identities" => identities(cfg),
        "bounds" => bounds_cmd(cfg),
        other => Err(Error::Config(format!("unknown command {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::FunctionSection;

    #[test]
    fn check_solution_default_config_passes() {
        let cfg = RunConfig::default();
        let out = check_solution(&cfg).unwrap();
        assert!(out.ok);
        assert_eq!(out.report["command"], "check_solution");
        assert_eq!(out.report["pair_count"], 441);
        assert!(out.tables[0].1.lines().count() == 442);
    }

    #[test]
    fn check_solution_flags_cubic() {
        let mut cfg = RunConfig::default();
        cfg.function = FunctionSection::Builtin { name: "cubic".into() };
        let out = check_solution(&cfg).unwrap();
        assert!(!out.ok);
        assert_eq!(out.report["is_solution"], false);
    }

    #[test]
    fn decompose_reads_off_coefficients() {
        let mut cfg = RunConfig::default();
        cfg.function = FunctionSection::Exact { a: 3.0, b: -2.0 };
        let out = decompose(&cfg).unwrap();
        assert!(out.ok);
        assert_eq!(out.report["estimated_quartic_coefficient"], 3.0);
        assert_eq!(out.report["estimated_quadratic_coefficient"], -2.0);
    }

    #[test]
    fn hyers_runs_both_components_by_default() {
        let cfg = RunConfig::default();
        let out = hyers(&cfg).unwrap();
        assert!(out.ok);
        assert_eq!(out.report["all_converged"], true);
        let table = &out.tables[0].1;
        assert!(table.lines().any(|l| l.contains(",quadratic,")));
        assert!(table.lines().any(|l| l.contains(",quartic,")));
    }

    #[test]
    fn certify_default_config_certifies() {
        let cfg = RunConfig::default();
        let out = certify_cmd(&cfg).unwrap();
        assert!(out.ok, "{}", out.report);
        assert_eq!(out.report["premise_ok"], true);
        assert_eq!(out.report["bound_ok"], true);
    }

    #[test]
    fn identities_hold_for_solutions_and_fail_for_cubic() {
        let mut cfg = RunConfig::default();
        cfg.grid.count = 9;
        let out = identities(&cfg).unwrap();
        assert!(out.ok);
        cfg.function = FunctionSection::Builtin { name: "cubic".into() };
        let out = identities(&cfg).unwrap();
        assert!(!out.ok);
    }

    #[test]
    fn bounds_closed_form_dominates() {
        let mut cfg = RunConfig::default();
        cfg.control.fit = false;
        cfg.control.theta = Some(0.5);
        let out = bounds_cmd(&cfg).unwrap();
        assert!(out.ok, "{}", out.report);
    }

    #[test]
    fn outputs_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig::default();
        let out = check_solution(&cfg).unwrap();
        let opts = OutputOptions {
            out_dir: dir.path().to_path_buf(),
            format: OutputFormat::Json,
            quiet: true,
        };
        let written = write_outputs(&out, &opts).unwrap();
        assert_eq!(written.len(), 2);
        assert!(dir.path().join("report.json").is_file());
        assert!(dir.path().join("points.csv").is_file());
        let text = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
        let parsed: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["is_solution"], true);
    }
}
