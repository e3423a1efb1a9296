// SPDX-License-Identifier: Apache-2.0

//! Command-line front end.
//!
//! Exit codes: 0 on success or when every check passes, 1 when a check
//! finds violations, 2 on usage or input errors.

pub mod json;
pub mod spice;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analyzer::{AnalysisError, AnalysisReport, Analyzer, DepthReport, EnergyReport, Limits, Violation};
use crate::boolexpr::{parse_expression, BoolExpr};
use crate::enhancer::insert_pass_gates;
use crate::fcsynth::{fc_from_expr, fc_transform};
use crate::switchnet::{build_genuine, SwitchNetwork};

pub use json::{emit_json, parse_json, NetlistDocument};
pub use spice::emit_spice;

#[derive(Debug, Parser)]
#[command(
    name = "dpdn",
    version,
    about = "Differential pull-down network synthesis and verification"
)]
struct Cli {
    /// Print reports as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Style {
    Genuine,
    Fc,
    Enhanced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportKind {
    Energy,
    Depth,
    Earlyprop,
    All,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a network from an expression and write its JSON netlist.
    Synth {
        #[arg(long)]
        expr: String,
        #[arg(long, value_enum, default_value = "fc")]
        style: Style,
        #[arg(long, default_value = "dpdn")]
        name: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rewire a textbook network into a fully connected one.
    Transform {
        /// Netlist path, or '-' for stdin.
        input: PathBuf,
        #[arg(long)]
        function: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a netlist; exits 1 if any violation is found.
    Verify {
        input: PathBuf,
        /// Expected function of the X branch. Without it only exclusivity
        /// is checked.
        #[arg(long)]
        function: Option<String>,
        /// Also require uniform evaluation depth and no early propagation.
        #[arg(long)]
        strict: bool,
    },
    /// Print energy, depth or early-propagation reports.
    Analyze {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        report: ReportKind,
        #[arg(long)]
        function: Option<String>,
    },
    /// Write a SPICE subcircuit for a netlist.
    EmitSpice {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                2
            } else {
                let _ = out.write_all(text.as_bytes());
                0
            };
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            2
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let analyzer = Analyzer::new(Limits::from_env()?);
    match &cli.command {
        Command::Synth {
            expr,
            style,
            name,
            output,
        } => {
            let f = expression(expr)?;
            let n = match style {
                Style::Genuine => build_genuine(&f),
                Style::Fc => fc_from_expr(&f),
                Style::Enhanced => insert_pass_gates(&fc_from_expr(&f))?,
            };
            let n = n.renamed(name.as_str())?;
            write_output(output.as_deref(), &emit_json(&n)?, out)?;
            Ok(0)
        }
        Command::Transform {
            input,
            function,
            output,
        } => {
            let n = load(input)?;
            let f = expression(function)?;
            let fc = fc_transform(&n, &f)?;
            write_output(output.as_deref(), &emit_json(&fc)?, out)?;
            Ok(0)
        }
        Command::Verify {
            input,
            function,
            strict,
        } => {
            let n = load(input)?;
            let f = function.as_deref().map(expression).transpose()?;
            verify(&analyzer, &n, f.as_ref(), *strict, cli.json, out)
        }
        Command::Analyze {
            input,
            report,
            function,
        } => {
            let n = load(input)?;
            let f = function.as_deref().map(expression).transpose()?;
            analyze(&analyzer, &n, f.as_ref(), *report, cli.json, out)
        }
        Command::EmitSpice { input, output } => {
            let n = load(input)?;
            write_output(output.as_deref(), &emit_spice(&n), out)?;
            Ok(0)
        }
    }
}

fn expression(text: &str) -> Result<BoolExpr> {
    parse_expression(text).with_context(|| format!("cannot parse expression '{text}'"))
}

fn load(path: &Path) -> Result<SwitchNetwork> {
    let mut text = String::new();
    if path == Path::new("-") {
        std::io::stdin()
            .read_to_string(&mut text)
            .context("cannot read stdin")?;
    } else {
        text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    }
    parse_json(&text).with_context(|| format!("invalid netlist {}", path.display()))
}

fn write_output(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => out.write_all(text.as_bytes()).context("cannot write stdout"),
    }
}

fn emit<T: Serialize>(value: &T, out: &mut dyn Write) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    out.write_all(text.as_bytes())?;
    Ok(())
}

#[derive(Serialize)]
struct VerifyOutcome<'a> {
    pass: bool,
    checks: Vec<&'a str>,
    violations: &'a [Violation],
}

fn verify(
    analyzer: &Analyzer,
    n: &SwitchNetwork,
    f: Option<&BoolExpr>,
    strict: bool,
    as_json: bool,
    out: &mut dyn Write,
) -> Result<i32> {
    let mut checks = Vec::new();
    let mut violations = Vec::new();
    match f {
        Some(f) => {
            checks.push("function");
            violations.extend(analyzer.check_function(n, f)?);
        }
        None => {
            checks.push("exclusive");
            violations.extend(analyzer.check_exclusive(n)?);
        }
    }
    checks.push("fully_connected");
    violations.extend(analyzer.check_fully_connected(n)?);
    if strict {
        checks.push("depth");
        match analyzer.depth_report(n) {
            Ok(d) => violations.extend(d.violations),
            // an assignment with no conducting output is already reported
            Err(AnalysisError::NoConductingOutput(_)) => {}
            Err(e) => return Err(e.into()),
        }
        checks.push("early_propagation");
        violations.extend(analyzer.check_early_propagation(n)?);
    }
    let pass = violations.is_empty();
    if as_json {
        emit(
            &VerifyOutcome {
                pass,
                checks: checks.clone(),
                violations: &violations,
            },
            out,
        )?;
    } else {
        for v in &violations {
            writeln!(out, "{v}")?;
        }
        writeln!(
            out,
            "{}: {} ({})",
            if pass { "PASS" } else { "FAIL" },
            n.name(),
            checks.join(", ")
        )?;
    }
    Ok(if pass { 0 } else { 1 })
}

fn analyze(
    analyzer: &Analyzer,
    n: &SwitchNetwork,
    f: Option<&BoolExpr>,
    kind: ReportKind,
    as_json: bool,
    out: &mut dyn Write,
) -> Result<i32> {
    match kind {
        ReportKind::Energy => {
            let r = analyzer.energy_report(n)?;
            if as_json {
                emit(&r, out)?;
            } else {
                out.write_all(energy_text(&r).as_bytes())?;
            }
        }
        ReportKind::Depth => {
            let r = analyzer.depth_report(n)?;
            if as_json {
                emit(&r, out)?;
            } else {
                out.write_all(depth_text(&r).as_bytes())?;
            }
        }
        ReportKind::Earlyprop => {
            let v = analyzer.check_early_propagation(n)?;
            if as_json {
                emit(&v, out)?;
            } else {
                out.write_all(earlyprop_text(&v).as_bytes())?;
            }
        }
        ReportKind::All => {
            let r = match f {
                Some(f) => analyzer.full_report(n, f)?,
                None => analyzer.structural_report(n)?,
            };
            if as_json {
                emit(&r, out)?;
            } else {
                out.write_all(full_text(&r).as_bytes())?;
            }
        }
    }
    Ok(0)
}

fn energy_text(r: &EnergyReport) -> String {
    let mut s = String::from("energy\n");
    for e in &r.per_assignment {
        writeln!(s, "  {}  {}", e.assignment, e.energy).unwrap();
    }
    writeln!(
        s,
        "  mean {}  variance {}  min {}  max {}",
        r.mean, r.variance, r.min, r.max
    )
    .unwrap();
    s
}

fn depth_text(r: &DepthReport) -> String {
    let mut s = String::from("depth\n");
    for e in &r.per_assignment {
        writeln!(s, "  {}  {}", e.assignment, e.depth).unwrap();
    }
    writeln!(
        s,
        "  min {}  max {}  {}",
        r.min,
        r.max,
        if r.is_uniform() { "uniform" } else { "varies" }
    )
    .unwrap();
    s
}

fn earlyprop_text(v: &[Violation]) -> String {
    let mut s = String::from("early propagation\n");
    for x in v {
        writeln!(s, "  {x}").unwrap();
    }
    writeln!(s, "  {} violating partial assignments", v.len()).unwrap();
    s
}

fn full_text(r: &AnalysisReport) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "{}: {} inputs, {} devices ({} pass-gate), {} internal nodes",
        r.name,
        r.inputs.len(),
        r.device_count,
        r.pass_gate_count,
        r.internal_count
    )
    .unwrap();
    let verdict = |ok: bool| if ok { "pass" } else { "FAIL" };
    writeln!(s, "function              {}", verdict(r.verdicts.function)).unwrap();
    writeln!(s, "fully_connected       {}", verdict(r.verdicts.fully_connected)).unwrap();
    writeln!(s, "constant_energy       {}", verdict(r.verdicts.constant_energy)).unwrap();
    writeln!(s, "no_early_propagation  {}", verdict(r.verdicts.no_early_propagation)).unwrap();
    for v in r.function.iter().chain(&r.fully_connected) {
        writeln!(s, "  {v}").unwrap();
    }
    s.push_str(&energy_text(&r.energy));
    match &r.depth {
        Some(d) => s.push_str(&depth_text(d)),
        None => s.push_str("depth\n  undefined: some assignment discharges neither output\n"),
    }
    s.push_str(&earlyprop_text(&r.early_propagation));
    s
}
