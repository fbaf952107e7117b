//! The four subcommands.

use std::path::Path;

use ymlattice_core::gauge::{asd_residual, bianchi_residual, sd_residual, ym_residual_norm};
use ymlattice_core::solver::{self, SolverReport, StopReason};
use ymlattice_core::{curvature, Cochain, Connection, Error};

use crate::config::RunConfig;
use crate::report::{Check, Report};
use crate::{suite, CliError, EXIT_CHECK_FAILURE, EXIT_PASS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Verify,
    Action,
    Relax,
    Selfdual,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Action => "action",
            Command::Relax => "relax",
            Command::Selfdual => "selfdual",
        }
    }
}

/// A finished run: its report and, for relaxations, the final connection.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub connection: Option<Connection>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.report.all_pass() {
            EXIT_PASS
        } else {
            EXIT_CHECK_FAILURE
        }
    }

    /// Writes the report and, if present, the final connection.
    pub fn write(&self, config: &RunConfig) -> Result<(), CliError> {
        write_file(&config.report_path(), self.report.to_json().as_bytes())?;
        if let Some(conn) = &self.connection {
            write_file(&config.connection_output_path(), &conn.serialize())?;
        }
        Ok(())
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn field_scalars(report: &mut Report, a: &Cochain) -> Result<(), CliError> {
    let f = curvature(a)?;
    report.scalar("action", f.interior_norm_sq());
    report.scalar("ym_residual_norm", ym_residual_norm(a)?);
    report.scalar("sd_residual", sd_residual(&f)?);
    report.scalar("asd_residual", asd_residual(&f)?);
    report.scalar("bianchi_defect", bianchi_residual(a)?);
    Ok(())
}

/// Runs a command without touching the report or connection outputs.
pub fn run_command(command: Command, config: &RunConfig) -> Result<Outcome, CliError> {
    let domain = config.validate()?;
    let a = config.build_connection(domain)?;
    let mut report = Report::new(command.name(), config);
    let mut connection = None;
    match command {
        Command::Verify => {
            let h = config.build_gauge(domain)?;
            let (checks, scalars) = suite::run(domain, &a, &h, config.seed)?;
            report.checks = checks;
            for (name, value) in scalars {
                report.scalar(&name, value);
            }
            field_scalars(&mut report, &a)?;
        }
        Command::Action => field_scalars(&mut report, &a)?,
        Command::Relax | Command::Selfdual => {
            let cfg = config.solver_config();
            let run = match command {
                Command::Relax => solver::minimize(&a, &cfg),
                _ => solver::solve_self_dual(&a, &cfg),
            };
            let result = run.map_err(|e| match e {
                Error::NonFinite { .. } => CliError::SolverAbort(e.to_string()),
                other => CliError::Core(other),
            })?;
            solver_checks(&mut report, &result, cfg.grad_tol);
            field_scalars(&mut report, &result.connection)?;
            report.trace = result.trace;
            connection = Some(result.connection);
        }
    }
    Ok(Outcome { report, connection })
}

fn solver_checks(report: &mut Report, result: &SolverReport, grad_tol: f64) {
    let rises = result
        .trace
        .windows(2)
        .map(|w| (w[1].objective - w[0].objective).max(0.0))
        .fold(0.0, f64::max);
    report.checks.push(Check::hold("objective_non_increasing", rises, 0.0));
    report.checks.push(Check::hold(
        "su2_valued",
        result.diagnostics.max_su2_deviation,
        ymlattice_core::algebra::PREDICATE_TOL,
    ));
    if let Some([first, last]) = result.gradient_check {
        report
            .checks
            .push(Check::hold("gradient_check_initial", first, suite::TOL_GRADIENT));
        report
            .checks
            .push(Check::hold("gradient_check_final", last, suite::TOL_GRADIENT));
    }
    let grad_max = result.trace.last().map_or(0.0, |t| t.grad_max);
    report.checks.push(Check::hold("converged", grad_max, grad_tol));
    report.scalar("iterations", result.iterations() as f64);
    report.scalar("objective", result.trace.last().map_or(0.0, |t| t.objective));
    report.scalar("stalled", if result.stop == StopReason::Stalled { 1.0 } else { 0.0 });
    if let Some(defects) = result.component_defects {
        for (i, d) in defects.iter().enumerate() {
            report.scalar(&format!("component_defect_{}", i + 1), *d);
        }
    }
}
