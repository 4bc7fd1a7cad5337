//! Command-line front end. [`run`] is pure apart from reading a table from
//! standard input, and returns everything it would print together with
//! the exit code: 0 on success, 1 on a failed verification or derivation,
//! 2 on a usage error.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Read;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::deriver::{
    analyze, classify, derive, max_argument_for, published_discrepancies, reproduce_table, Analysis, ClosedFormTable,
    DeriveError, DeriveOptions, Discrepancy, TableRecord,
};
use crate::numeric::{verify_state, verify_table, VerificationReport};
use crate::polybox::BoxPolynomial;
use crate::spectral::WeightForm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "boxsums", version, about = "Exact ζ, η, λ values at even arguments from particle-in-a-box energy moments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct SolverArgs {
    /// Also use η(p) = (1 - 2^(1-p)) ζ(p) and ζ(p) + η(p) = 2λ(p) as equations
    #[arg(long)]
    pub use_relations: bool,
    /// Moment orders to equate, from {0, 1, 2}
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    pub moment_orders: Vec<u32>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for closed forms up to an even argument
    Derive {
        #[arg(long, default_value_t = 16)]
        max_p: u32,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Report norm, energies, weights, moment equations and parity of one state
    Analyze {
        #[arg(long)]
        poly: String,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Per-degree table of attainable sums
    Table {
        #[arg(long, default_value_t = 8)]
        max_degree: usize,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Check closed forms (or one state's moments) against partial sums
    Verify {
        #[arg(long, default_value_t = 16)]
        max_p: u32,
        /// Read a JSON table from a file, or `-` for standard input
        #[arg(long)]
        table: Option<String>,
        /// Verify the moment sums of this state instead of the table entries
        #[arg(long)]
        poly: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        terms: u64,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Arguments reachable from polynomials of a given degree
    Classify {
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long, default_value_t = 8)]
        max_degree: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Normalized wave function values on an equally spaced grid
    Samples {
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = 101)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

/// Everything a run produced.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl RunOutput {
    fn usage(message: impl std::fmt::Display) -> Self {
        Self { code: 2, stdout: String::new(), stderr: format!("error: {message}\n") }
    }

    fn failure(message: impl std::fmt::Display) -> Self {
        Self { code: 1, stdout: String::new(), stderr: format!("error: {message}\n") }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_args<I, T>(args: I, stdin: &mut dyn Read) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli.command, stdin),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                RunOutput { code, stdout: text, stderr: String::new() }
            } else {
                RunOutput { code, stdout: String::new(), stderr: text }
            }
        }
    }
}

fn solver_options(solver: &SolverArgs) -> Result<DeriveOptions, String> {
    let orders: BTreeSet<u32> = solver.moment_orders.iter().copied().collect();
    if orders.is_empty() {
        return Err("--moment-orders must not be empty".into());
    }
    if let Some(k) = orders.iter().find(|&&k| k > 2) {
        return Err(format!("--moment-orders accepts only 0, 1, 2 (got {k})"));
    }
    Ok(DeriveOptions { use_relations: solver.use_relations, moment_orders: orders, allow_high_orders: false })
}

fn check_max_p(max_p: u32, options: &DeriveOptions) -> Result<(), String> {
    if max_p < 2 || !max_p.is_multiple_of(2) {
        return Err(format!("--max-p must be even and at least 2 (got {max_p})"));
    }
    if max_p == 2 && !options.moment_orders.contains(&2) {
        return Err("--max-p 2 needs moment order 2".into());
    }
    Ok(())
}

fn derive_failure(e: DeriveError) -> RunOutput {
    match e {
        DeriveError::InvalidArgument(m) => RunOutput::usage(m),
        other => RunOutput::failure(other),
    }
}

pub fn run(command: Command, stdin: &mut dyn Read) -> RunOutput {
    match command {
        Command::Derive { max_p, solver, format } => {
            let options = match solver_options(&solver).and_then(|o| check_max_p(max_p, &o).map(|_| o)) {
                Ok(o) => o,
                Err(m) => return RunOutput::usage(m),
            };
            match derive(max_p, &options) {
                Ok(table) => {
                    let mut out = RunOutput { stdout: render_table(&table, format), ..Default::default() };
                    for d in published_discrepancies(&table) {
                        let _ = writeln!(out.stderr, "note: {d}");
                    }
                    out
                }
                Err(e) => derive_failure(e),
            }
        }
        Command::Analyze { poly, format } => {
            let state = match BoxPolynomial::parse(&poly) {
                Ok(s) => s,
                Err(e) => return RunOutput::usage(e),
            };
            let table = covering_table(&state, &DeriveOptions::default());
            let analysis = analyze(&state, table.as_ref());
            RunOutput { stdout: render_analysis(&analysis, format), ..Default::default() }
        }
        Command::Table { max_degree, solver, format } => {
            let options = match solver_options(&solver) {
                Ok(o) => o,
                Err(m) => return RunOutput::usage(m),
            };
            if max_degree < 2 {
                return RunOutput::usage(format!("--max-degree must be at least 2 (got {max_degree})"));
            }
            match reproduce_table(max_degree, &options) {
                Ok(rows) => {
                    let discrepancies = rows.last().map(|r| published_discrepancies(&r.table)).unwrap_or_default();
                    RunOutput { stdout: render_rows(&rows, &discrepancies, format), ..Default::default() }
                }
                Err(e) => derive_failure(e),
            }
        }
        Command::Verify { max_p, table, poly, terms, solver, format } => {
            let options = match solver_options(&solver).and_then(|o| check_max_p(max_p, &o).map(|_| o)) {
                Ok(o) => o,
                Err(m) => return RunOutput::usage(m),
            };
            if terms < 2 {
                return RunOutput::usage(format!("--terms must be at least 2 (got {terms})"));
            }
            let state = match poly.as_deref().map(BoxPolynomial::parse).transpose() {
                Ok(s) => s,
                Err(e) => return RunOutput::usage(e),
            };
            let table = match table {
                Some(source) => match load_table(&source, stdin) {
                    Ok(t) => t,
                    Err(m) => return RunOutput::failure(m),
                },
                None => {
                    let derived = match &state {
                        Some(s) => covering_table(s, &options).ok_or_else(|| DeriveError::InvalidArgument("state degree too large".into())),
                        None => derive(max_p, &options),
                    };
                    match derived {
                        Ok(t) => t,
                        Err(e) => return derive_failure(e),
                    }
                }
            };
            let reports = match &state {
                Some(s) => verify_state(s, &table, terms),
                None => verify_table(&table, terms),
            };
            match reports {
                Ok(reports) => {
                    let code = if reports.iter().all(|r| r.pass) { 0 } else { 1 };
                    RunOutput { code, stdout: render_reports(&reports, format), stderr: String::new() }
                }
                Err(e) => RunOutput::failure(e),
            }
        }
        Command::Classify { degree, max_degree, format } => {
            let degrees: Vec<usize> = match degree {
                Some(d) => vec![d],
                None => (2..=max_degree).collect(),
            };
            let rows = match degrees.into_iter().map(classify).collect::<Result<Vec<_>, _>>() {
                Ok(r) if !r.is_empty() => r,
                Ok(_) => return RunOutput::usage(format!("--max-degree must be at least 2 (got {max_degree})")),
                Err(e) => return derive_failure(e),
            };
            let stdout = match format {
                Format::Json => json(&rows),
                Format::Csv => {
                    let mut s = String::from("degree,p\n");
                    for r in &rows {
                        let _ = writeln!(s, "{},{}", r.degree, join(&r.attainable_p, ";"));
                    }
                    s
                }
                Format::Text => rows.iter().map(|r| format!("degree {}: p = {}\n", r.degree, join(&r.attainable_p, ", "))).collect(),
            };
            RunOutput { stdout, ..Default::default() }
        }
        Command::Samples { poly, points, format } => {
            let state = match BoxPolynomial::parse(&poly) {
                Ok(s) => s,
                Err(e) => return RunOutput::usage(e),
            };
            let samples = match state.sample(points) {
                Ok(s) => s,
                Err(e) => return RunOutput::usage(e),
            };
            let rows: Vec<(f64, f64)> = samples.iter().map(|(x, v)| (x.to_f64().expect("finite"), *v)).collect();
            let stdout = match format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct Point {
                        x: f64,
                        psi: f64,
                    }
                    json(&rows.iter().map(|&(x, psi)| Point { x, psi }).collect::<Vec<_>>())
                }
                Format::Csv => {
                    let mut s = String::from("x,psi\n");
                    for (x, v) in &rows {
                        let _ = writeln!(s, "{x},{v}");
                    }
                    s
                }
                Format::Text => rows.iter().map(|(x, v)| format!("{x:<8} {v}\n")).collect(),
            };
            RunOutput { stdout, ..Default::default() }
        }
    }
}

/// Derived table large enough to cover every moment form of `state`.
fn covering_table(state: &BoxPolynomial, options: &DeriveOptions) -> Option<ClosedFormTable> {
    // k = 0 reaches the largest weight power q_max = max_argument + 2
    let max_p = max_argument_for(state) + 2;
    if max_p > 40 {
        return None;
    }
    derive(max_p, options).ok()
}

fn load_table(source: &str, stdin: &mut dyn Read) -> Result<ClosedFormTable, String> {
    let mut text = String::new();
    if source == "-" {
        stdin.read_to_string(&mut text).map_err(|e| format!("reading standard input: {e}"))?;
    } else {
        text = std::fs::read_to_string(source).map_err(|e| format!("reading {source}: {e}"))?;
    }
    ClosedFormTable::from_json(&text).map_err(|e| e.to_string())
}

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(sep)
}

fn source_name(r: &TableRecord) -> &'static str {
    use crate::deriver::EntrySource::*;
    match r.source {
        Some(Solved) => "solved",
        Some(Combined) => "combined",
        Some(Relation) => "relation",
        Some(Imported) | None => "imported",
    }
}

fn render_records(records: &[TableRecord], format: Format) -> String {
    match format {
        Format::Json => json(records),
        Format::Csv => {
            let mut s = String::from("kind,p,coefficient,pi_power,decimal,source\n");
            for r in records {
                let _ = writeln!(s, "{},{},{},{},{},{}", r.kind.name(), r.p, r.coefficient, r.pi_power, r.decimal, source_name(r));
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for r in records {
                let exact = format!("{}·π^{}", r.coefficient, r.pi_power);
                let name = format!("{}({})", r.kind.name(), r.p);
                let _ = writeln!(s, "{name:<11}= {exact:<30} ≈ {}  [{}]", r.decimal, source_name(r));
            }
            s
        }
    }
}

fn render_table(table: &ClosedFormTable, format: Format) -> String {
    render_records(&table.records(), format)
}

fn render_rows(rows: &[crate::deriver::TableRow], discrepancies: &[Discrepancy], format: Format) -> String {
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Row {
                degree: usize,
                attainable_p: Vec<u32>,
                entries: Vec<TableRecord>,
                missing: Vec<String>,
            }
            #[derive(Serialize)]
            struct Doc<'a> {
                rows: Vec<Row>,
                discrepancies: &'a [Discrepancy],
            }
            let rows = rows
                .iter()
                .map(|r| Row {
                    degree: r.degree,
                    attainable_p: r.attainable_p.clone(),
                    entries: r.table.records(),
                    missing: r.missing.iter().map(ToString::to_string).collect(),
                })
                .collect();
            json(&Doc { rows, discrepancies })
        }
        Format::Csv => {
            let mut s = String::from("degree,kind,p,coefficient,pi_power,decimal,source\n");
            for row in rows {
                for r in row.table.records() {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{},{}",
                        row.degree,
                        r.kind.name(),
                        r.p,
                        r.coefficient,
                        r.pi_power,
                        r.decimal,
                        source_name(&r)
                    );
                }
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for row in rows {
                let _ = writeln!(s, "degree {}  p = {}", row.degree, join(&row.attainable_p, ", "));
                for line in render_records(&row.table.records(), Format::Text).lines() {
                    let _ = writeln!(s, "  {line}");
                }
                if !row.missing.is_empty() {
                    let _ = writeln!(s, "  not fixed by these equations alone: {}", join(&row.missing, ", "));
                }
            }
            if !discrepancies.is_empty() {
                let _ = writeln!(s, "discrepancies with published values:");
                for d in discrepancies {
                    let _ = writeln!(s, "  {d}");
                }
            }
            s
        }
    }
}

/// `W(E_n) = 480[1-(-1)^n]/(n^6π^6)` style rendering.
pub fn weight_formula(w: &WeightForm) -> String {
    let parts: Vec<String> = w
        .terms()
        .iter()
        .map(|(q, (u, v))| {
            let denom = format!("(n^{q}π^{q})");
            if *v == -u {
                format!("{u}[1-(-1)^n]/{denom}")
            } else if v == u {
                format!("{u}[1+(-1)^n]/{denom}")
            } else {
                format!("[{u} + {v}(-1)^n]/{denom}")
            }
        })
        .collect();
    format!("W(E_n) = {}", parts.join(" + "))
}

fn render_analysis(a: &Analysis, format: Format) -> String {
    match format {
        Format::Json => json(a),
        Format::Csv => {
            let mut s = String::from("field,value\n");
            let mut row = |k: &str, v: String| {
                let _ = writeln!(s, "{k},{v}");
            };
            row("polynomial", a.polynomial.clone());
            row("degree", a.degree.to_string());
            row("norm_squared", a.norm_squared.clone());
            row("mean_energy_hbar2_over_m", a.mean_energy_hbar2_over_m.clone());
            row("mean_energy_hbar2_over_2m", a.mean_energy.clone());
            row("mean_h2_hbar4_over_m2", a.mean_h2_hbar4_over_m2.clone());
            row("shift_parity", a.shift_parity.to_string());
            row("lambda_only", a.lambda_only.to_string());
            row("node_count", a.node_count.to_string());
            for m in &a.moments {
                row(&format!("moment_{}_residual", m.k), m.residual.clone().unwrap_or_else(|| "n/a".into()));
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "state            ψ(x) ∝ {}  (degree {})", a.polynomial, a.degree);
            let _ = writeln!(s, "norm²            {}", a.norm_squared);
            let _ = writeln!(s, "mean energy      {} ħ²/ma²  (= {} ħ²/2ma²)", a.mean_energy_hbar2_over_m, a.mean_energy);
            let _ = writeln!(s, "(Hψ, Hψ)         {} ħ⁴/m²a⁴", a.mean_h2_hbar4_over_m2);
            let _ = writeln!(s, "weights          {}", weight_formula(&a.weight_form));
            let _ = writeln!(s, "shifted parity   {}", a.shift_parity);
            let _ = writeln!(s, "lambda only      {}", a.lambda_only);
            let _ = writeln!(s, "nodes in (0,1)   {}", a.node_count);
            for m in &a.moments {
                let form = m.form.clone().unwrap_or_else(|| "divergent".into());
                let residual = m.residual.clone().unwrap_or_else(|| "n/a".into());
                let _ = writeln!(s, "moment k={}       {} = {}   residual {}", m.k, form, m.rhs, residual);
            }
            s
        }
    }
}

fn render_reports(reports: &[VerificationReport], format: Format) -> String {
    match format {
        Format::Json => reports.iter().map(|r| r.to_json_line() + "\n").collect(),
        Format::Csv => {
            let mut s = String::from("target,closed_value,partial_sum,tail_bound,residual,pass\n");
            for r in reports {
                let _ = writeln!(s, "\"{}\",{},{:e},{:e},{:e},{}", r.target, r.closed_value, r.partial_sum, r.tail_bound, r.residual, r.pass);
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for r in reports {
                let _ = writeln!(
                    s,
                    "{} {:<12} closed {}  partial {:.17e}  tail {:.3e}  residual {:.3e}{}",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.target,
                    r.closed_value,
                    r.partial_sum,
                    r.tail_bound,
                    r.residual,
                    r.exact_residual.as_deref().map(|e| format!("  exact residual {e}")).unwrap_or_default()
                );
            }
            let passed = reports.iter().filter(|r| r.pass).count();
            let _ = writeln!(s, "{passed}/{} passed", reports.len());
            s
        }
    }
}
