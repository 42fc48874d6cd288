//! `lesys` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 numerical failure
//! (non-convergence, or a failed identity/inequality check in `verify`).

mod args;
mod files;

use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use serde_json::Value;

use lesys::diagnostics::{evaluate_profile, CheckKind, CHECK_NAMES};
use lesys::radial::{solve_shooting_on, solve_with_continuation};
use lesys::sweeps::{
    dyadic, export, run_sweep_detailed, write_json, ExportFormat, RowSource, SCHEMA_VERSION,
};
use lesys::{
    evaluate, first_dirichlet_eigenpair, solve_planar, DiagnosticsOptions, DiagnosticsReport,
    Error, ExponentPair, Grid, Init, PlanarSolveConfig, RadialSolveConfig, SolutionPair, SweepMode,
    SweepPlan,
};

use args::{Cli, Command, EigenArgs, Method, Mode, SolveArgs, SolverArgs, SweepArgs, VerifyArgs};
use files::{provenance, with_suffix, ReportFile, SolutionFile};

enum Failure {
    Usage(String),
    Numerical(String),
}

fn is_numerical(e: &Error) -> bool {
    matches!(
        e,
        Error::NonConvergence { .. }
            | Error::PositivityLoss { .. }
            | Error::ShootingDivergence(_)
            | Error::ContinuationStalled { .. }
            | Error::EigenStagnation { .. }
    )
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if is_numerical(&e) {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(format!("{e:#}"))
    }
}

type Outcome = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Solver outcome: a converged pair, or the best iterate of a failed solve.
fn solve(
    args: &SolverArgs,
) -> Result<Result<SolutionPair, (Error, Option<SolutionPair>)>, Failure> {
    let e = ExponentPair::new(args.p, args.q)?;
    let grid = args.domain.grid()?;
    let result = match (grid, args.method) {
        (Grid::Radial(g), Method::Newton) => {
            let cfg = RadialSolveConfig {
                tol: args.tol,
                max_iter: args.max_iter,
                ..Default::default()
            };
            solve_with_continuation(e, g, &cfg)
        }
        (Grid::Radial(g), Method::Shooting) => solve_shooting_on(e, g, args.tol),
        (Grid::Planar(g), Method::Newton) => {
            let cfg = PlanarSolveConfig {
                tol: args.tol,
                max_iter: args.max_iter,
                init: Init::EigenfunctionScaled,
                ..Default::default()
            };
            solve_planar(e, g, &cfg)
        }
        (Grid::Planar(_), Method::Shooting) => {
            return Err(usage("--method shooting needs --domain disk"));
        }
    };
    match result {
        Ok(s) => Ok(Ok(s)),
        Err(err) if is_numerical(&err) => {
            let best = err.best_iterate().cloned();
            Ok(Err((err, best)))
        }
        Err(err) => Err(err.into()),
    }
}

fn report_for(
    s: &SolutionPair,
    method: Method,
    tol: f64,
    opts: &DiagnosticsOptions,
) -> lesys::Result<DiagnosticsReport> {
    let grid = *s.grid();
    let ep = first_dirichlet_eigenpair(grid.domain(), &grid)?;
    match method {
        Method::Newton => evaluate(s, &ep, opts),
        Method::Shooting => evaluate_profile(s, &ep, opts, tol.min(1e-6)),
    }
}

fn summary(s: &SolutionPair) -> String {
    format!(
        "p={} q={} M={:.12e} N={:.12e} residual={:.3e} tolerance={:.3e} iterations={} converged={}",
        s.exponents.p(),
        s.exponents.q(),
        s.max_u(),
        s.max_v(),
        s.residual_norm,
        s.tolerance,
        s.newton_iterations,
        s.converged
    )
}

fn cmd_solve(args: &SolveArgs, prov: &Value) -> Outcome {
    validate_diagnostics(&args.diagnostics.options())?;
    let solver = &args.solver;
    let (pair, failure) = match solve(solver)? {
        Ok(s) => (Some(s), None),
        Err((err, best)) => (best, Some(err.to_string())),
    };
    if let Some(s) = &pair {
        SolutionFile::new(s, prov.clone()).write(&with_suffix(&args.out, ".solution.json"))?;
        println!("{}", summary(s));
        match report_for(s, solver.method, solver.tol, &args.diagnostics.options()) {
            Ok(report) => write_json(
                &ReportFile {
                    schema: SCHEMA_VERSION,
                    provenance: prov,
                    report: &report,
                },
                &with_suffix(&args.out, ".report.json"),
            )?,
            Err(e) => eprintln!("warning: no diagnostics report: {e}"),
        }
    }
    match failure {
        Some(msg) => Err(Failure::Numerical(msg)),
        None => Ok(()),
    }
}

fn parse_dyadic(spec: &str) -> Result<Vec<f64>, Failure> {
    let bad = || usage(format!("--q-dyadic expects kmin:kmax, got '{spec}'"));
    let (a, b) = spec.split_once(':').ok_or_else(bad)?;
    let kmin: i32 = a.trim().parse().map_err(|_| bad())?;
    let kmax: i32 = b.trim().parse().map_err(|_| bad())?;
    if kmin > kmax {
        return Err(bad());
    }
    Ok(dyadic(kmin, kmax))
}

fn cmd_sweep(args: &SweepArgs, prov: &Value) -> Outcome {
    let mode = match args.mode {
        Mode::FixedP => SweepMode::FixedP {
            p: args.p.ok_or_else(|| usage("--mode fixed-p needs --p"))?,
        },
        Mode::Diagonal => SweepMode::Diagonal,
        Mode::Ray => SweepMode::Ray {
            k: args.k.ok_or_else(|| usage("--mode ray needs --K"))?,
        },
    };
    let q_list = match (&args.q_list, &args.q_dyadic) {
        (Some(list), None) => list.clone(),
        (None, Some(spec)) => parse_dyadic(spec)?,
        _ => return Err(usage("give exactly one of --q-list or --q-dyadic")),
    };
    let diagnostics = (!args.no_diagnostics).then(|| args.diagnostics.options());
    if let Some(opts) = &diagnostics {
        validate_diagnostics(opts)?;
    }
    let plan = SweepPlan {
        tol: args.tol,
        max_iter: args.max_iter,
        diagnostics,
        warm_start: !args.cold,
        jobs: args.jobs,
        ..SweepPlan::new(mode, q_list, args.domain.domain()?, args.domain.grid)
    };
    let run = run_sweep_detailed(&plan)?;
    for (row, report) in run.table.rows.iter().zip(&run.reports) {
        let mut line = format!(
            "q={} M={:.12e} N={:.12e} converged={}",
            row.q, row.m, row.n, row.converged
        );
        if row.source == RowSource::Shooting {
            line.push_str(" source=shooting");
        }
        if let Some(r) = report {
            line.push_str(if r.passes() {
                " checks=pass"
            } else {
                " checks=FAIL"
            });
        }
        if let Some(f) = &row.failure {
            line.push_str(&format!(" failure=\"{f}\""));
        }
        println!("{line}");
    }
    export(
        &run.table,
        ExportFormat::Csv,
        &with_suffix(&args.out, ".csv"),
        None,
    )?;
    let json = with_suffix(&args.out, ".json");
    export(&run.table, ExportFormat::Json, &json, Some(prov))?;
    if let Some(ep) = &run.eigenpair {
        let reports: Vec<_> = run.reports.iter().collect();
        write_json(
            &serde_json::json!({
                "schema_version": SCHEMA_VERSION,
                "provenance": prov,
                "lambda": ep.lambda,
                "reports": reports,
            }),
            &with_suffix(&args.out, ".reports.json"),
        )?;
    }
    let failed = run.table.rows.iter().filter(|r| !r.converged).count();
    if failed > 0 {
        return Err(Failure::Numerical(format!(
            "{failed} of {} rows did not converge",
            run.table.rows.len()
        )));
    }
    Ok(())
}

fn validate_diagnostics(opts: &DiagnosticsOptions) -> Result<(), Failure> {
    if !(opts.delta > 0.0 && opts.delta < 4.0 * std::f64::consts::PI) {
        return Err(usage(format!(
            "--delta must lie in (0, 4π), got {}",
            opts.delta
        )));
    }
    if let Some(c) = opts.c_floor {
        if !(c > 0.0 && c.is_finite()) {
            return Err(usage(format!("--c-floor must be positive, got {c}")));
        }
    }
    Ok(())
}

fn check_names(spec: &str) -> Result<Vec<&str>, Failure> {
    if spec.trim() == "all" {
        return Ok(CHECK_NAMES.to_vec());
    }
    let names: Vec<&str> = spec
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    for name in &names {
        if !CHECK_NAMES.contains(name) {
            return Err(usage(format!(
                "unknown check '{name}'; valid checks: all, {}",
                CHECK_NAMES.join(", ")
            )));
        }
    }
    if names.is_empty() {
        return Err(usage("--checks is empty"));
    }
    Ok(names)
}

fn cmd_verify(args: &VerifyArgs) -> Outcome {
    let names = check_names(&args.checks)?;
    let opts = args.diagnostics.options();
    validate_diagnostics(&opts)?;
    let (pair, method) = match &args.input {
        Some(path) => {
            let file = SolutionFile::read(Path::new(path))?;
            (file.into_pair()?, Method::Newton)
        }
        None => {
            let (Some(p), Some(q)) = (args.p, args.q) else {
                return Err(usage(
                    "verify needs --in <solution.json> or both --p and --q",
                ));
            };
            let solver = SolverArgs {
                p,
                q,
                domain: args.domain.clone(),
                tol: args.tol,
                max_iter: args.max_iter,
                method: args.method,
            };
            match solve(&solver)? {
                Ok(s) => (s, args.method),
                Err((err, _)) => return Err(Failure::Numerical(err.to_string())),
            }
        }
    };
    if !pair.converged {
        eprintln!("warning: the stored solution did not converge");
    }
    let report = report_for(&pair, method, args.tol, &opts)?;
    let lines = report.checks_named(&names)?;
    let mut ok = true;
    for c in &lines {
        let verdict = match (c.kind, c.pass) {
            (CheckKind::Measured, _) => "info",
            (_, true) => "PASS",
            (_, false) => "FAIL",
        };
        ok &= c.kind == CheckKind::Measured || c.pass;
        let kind = format!("{:?}", c.kind).to_lowercase();
        println!(
            "{:<20} {:<10} value={:<14.6e} threshold={:<14.6e} {verdict}",
            c.name, kind, c.value, c.threshold
        );
    }
    let skipped: Vec<&&str> = names
        .iter()
        .filter(|n| !lines.iter().any(|c| c.name == **n))
        .collect();
    for name in skipped {
        println!("{name:<20} skipped    (not defined for this domain)");
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Numerical("some checks failed".into()))
    }
}

fn cmd_eigen(args: &EigenArgs, prov: &Value) -> Outcome {
    let grid = args.domain.grid()?;
    let ep = first_dirichlet_eigenpair(grid.domain(), &grid)?;
    println!(
        "lambda={:.12e} grid_lambda={:.12e} iterations={} converged={}",
        ep.lambda, ep.grid_lambda, ep.iterations, ep.converged
    );
    if let Some(out) = &args.out {
        write_json(
            &serde_json::json!({
                "schema": SCHEMA_VERSION,
                "provenance": prov,
                "domain": grid.domain(),
                "grid": grid,
                "lambda": ep.lambda,
                "grid_lambda": ep.grid_lambda,
                "iterations": ep.iterations,
                "converged": ep.converged,
                "phi": ep.phi.values(),
            }),
            Path::new(out),
        )?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Outcome {
    let prov = provenance(cli);
    match &cli.command {
        Command::Solve(a) => cmd_solve(a, &prov),
        Command::Sweep(a) => cmd_sweep(a, &prov),
        Command::Verify(a) => cmd_verify(a),
        Command::Eigen(a) => cmd_eigen(a, &prov),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_ranges_parse_inclusively() {
        assert_eq!(parse_dyadic("3:5").ok(), Some(vec![8.0, 16.0, 32.0]));
        for bad in ["3", "5:3", "a:b", ""] {
            assert!(matches!(parse_dyadic(bad), Err(Failure::Usage(_))), "{bad}");
        }
    }

    #[test]
    fn check_names_accept_all_and_reject_unknown() {
        assert_eq!(
            check_names("all").ok().map(|v| v.len()),
            Some(CHECK_NAMES.len())
        );
        assert_eq!(
            check_names(" energy, jensen ,").ok(),
            Some(vec!["energy", "jensen"])
        );
        assert!(matches!(
            check_names("energy,nosuch"),
            Err(Failure::Usage(_))
        ));
    }
}
