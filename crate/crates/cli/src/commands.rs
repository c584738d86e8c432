use std::fmt::Write as _;
use std::fs;

use morley_core::eigensolve::EigenResult;
use morley_core::study::{
    run_study, solve_case, ReferenceMode, StudyConfig, StudyError, StudyReport, TableId,
};
use morley_core::verify::{parse_suites, run_verification, VerifyConfig};
use morley_core::{BoundaryCondition, SolverOptions};
use serde::Serialize;

use crate::args::{Cli, Command, Format, Output, RatesArgs, SolveArgs, SolverArgs, TableArgs, VerifyArgs};
use crate::{EXIT_SOLVER, EXIT_USAGE, EXIT_VERIFY, THREADS_ENV};

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<StudyError> for CliError {
    fn from(e: StudyError) -> Self {
        let code = match e {
            StudyError::BeyondDeskScale(_)
            | StudyError::UnknownTable(_)
            | StudyError::NoExactValue { .. }
            | StudyError::RichardsonNeedsTwoMeshes
            | StudyError::IndexOutOfRange { .. }
            | StudyError::EmptyMeshList => EXIT_USAGE,
            _ => EXIT_SOLVER,
        };
        let mut message = e.to_string();
        if matches!(e, StudyError::NoExactValue { .. }) {
            message.push_str(" (--richardson)");
        }
        Self { code, message }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let threads = threads_from_env()?;
    match cli.command {
        Command::Solve(a) => solve(a),
        Command::Table(a) => table(a, threads),
        Command::Rates(a) => rates(a, threads),
        Command::Verify(a) => verify(a),
    }
}

fn threads_from_env() -> Result<usize, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(1),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t >= 1 => Ok(t),
            _ => Err(CliError::usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
    }
}

fn emit(output: &Output, body: &str) -> Result<(), CliError> {
    match &output.out {
        Some(path) => fs::write(path, body).map_err(|e| CliError {
            code: EXIT_SOLVER,
            message: format!("cannot write {}: {e}", path.display()),
        }),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn solver_options(bc: BoundaryCondition, s: &SolverArgs) -> SolverOptions {
    SolverOptions::for_bc(bc).with_kind(s.solver)
}

fn mesh_sizes(n: &[u64]) -> Vec<usize> {
    n.iter().map(|&x| x as usize).collect()
}

#[derive(Serialize)]
struct SolveRecord {
    dim: usize,
    n: usize,
    bc: BoundaryCondition,
    free_dofs: usize,
    #[serde(flatten)]
    result: EigenResult,
}

fn solve(a: SolveArgs) -> Result<(), CliError> {
    let dim = a.dim as usize;
    let opts = solver_options(a.bc, &a.solver);
    let mut records = Vec::with_capacity(a.n.len());
    for n in mesh_sizes(&a.n) {
        let case = solve_case(dim, n, a.bc, a.k as usize, &opts)?;
        records.push(SolveRecord {
            dim,
            n,
            bc: a.bc,
            free_dofs: case.dofmap.free_count(),
            result: case.result,
        });
    }
    let body = match a.output.format {
        Format::Json => serde_json::to_string_pretty(&records).expect("records serialize") + "\n",
        Format::Csv => {
            let mut s = String::from("dim,n,bc,index,eigenvalue,residual\n");
            for r in &records {
                for (i, (v, res)) in r.result.eigenvalues.iter().zip(&r.result.residuals).enumerate() {
                    let _ = writeln!(s, "{},{},{},{},{v},{res}", r.dim, r.n, r.bc, i + 1);
                }
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for r in &records {
                let m = &r.result.metadata;
                let _ = writeln!(
                    s,
                    "{}D, N={}, {}: {} free DOFs, {} solver",
                    r.dim, r.n, r.bc, r.free_dofs, m.method
                );
                for (i, (v, res)) in r.result.eigenvalues.iter().zip(&r.result.residuals).enumerate() {
                    let _ = writeln!(s, "  lambda_{:<3} {v:>16.4}   residual {res:.2e}", i + 1);
                }
            }
            s
        }
    };
    emit(&a.output, &body)
}

fn render(report: &StudyReport, format: Format) -> String {
    match format {
        Format::Text => report.to_text(),
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    }
}

fn table(a: TableArgs, threads: usize) -> Result<(), CliError> {
    let t = TableId::new(a.which)?;
    let mut config = StudyConfig::for_table(t);
    if !a.n.is_empty() {
        config.ns = mesh_sizes(&a.n);
    }
    config.k = a.k as usize;
    config.solver = solver_options(t.bc(), &a.solver);
    config.threads = threads;
    if a.richardson {
        config.reference = ReferenceMode::Richardson;
    }
    let report = run_study(&config)?;
    emit(&a.output, &render(&report, a.output.format))
}

fn rates(a: RatesArgs, threads: usize) -> Result<(), CliError> {
    let dim = a.dim as usize;
    let index = a.index as usize;
    let ns = if a.n.is_empty() {
        TableId::for_case(dim, a.bc).map(|t| t.default_ns()).unwrap_or_default()
    } else {
        mesh_sizes(&a.n)
    };
    if ns.len() < 2 {
        return Err(CliError::usage("rates need at least two mesh sizes"));
    }
    let mut config = StudyConfig::new(dim, a.bc, ns);
    config.k = index;
    config.solver = solver_options(a.bc, &a.solver);
    config.threads = threads;
    config.reference = if a.richardson { ReferenceMode::Richardson } else { ReferenceMode::Exact };
    let report = run_study(&config)?.restrict_to_index(index)?;
    emit(&a.output, &render(&report, a.output.format))
}

fn verify(a: VerifyArgs) -> Result<(), CliError> {
    let suites = parse_suites(&a.suite).map_err(CliError::usage)?;
    let cfg = VerifyConfig {
        seed: a.seed,
        quad_order: a.quad_order as usize,
        volume_order: a.quad_order as usize,
        ..VerifyConfig::default()
    };
    let report = run_verification(&suites, &cfg);
    let body = match a.output.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
        Format::Csv => {
            let mut s = String::from("suite,name,lhs,rhs,diff,tolerance,status\n");
            for c in &report.checks {
                let _ = writeln!(
                    s,
                    "{},\"{}\",{},{},{},{},{}",
                    c.suite.name(),
                    c.name,
                    c.lhs,
                    c.rhs,
                    c.diff,
                    c.tolerance,
                    format!("{:?}", c.status).to_lowercase()
                );
            }
            s
        }
    };
    emit(&a.output, &body)?;
    if report.ok() {
        Ok(())
    } else {
        Err(CliError {
            code: EXIT_VERIFY,
            message: format!("{} verification checks failed", report.failed),
        })
    }
}
