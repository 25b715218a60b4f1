//! The `concord` command-line front end.
//!
//! Exit codes: 0 on success, 1 for bad input or usage, 2 when a measure is
//! undefined or a count cell is degenerate.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::agreement::{
    agree, critical_p4, disagreement_window, KindSet, OpenInterval, StratifiedRisks,
};
use crate::cases::{case_study, CheckedValue};
use crate::error::{Error, Result};
use crate::inference::{from_counts, modification_test, CountTable, ZeroCellPolicy};
use crate::io::{load_strata, InputFormat, ReportEnvelope, StrataInput};
use crate::measures::{
    derived_measures, measure_vector, DerivedKind, DerivedMeasures, MeasureKind, MeasureVector,
    RiskPair, Tolerance,
};
use crate::montecarlo::{self, venn_table, write_venn_csv, RiskDistribution, SimulationConfig};
use crate::quadrature::{self, QuadratureSpec, Region};

#[derive(Debug, Parser)]
#[command(
    name = "concord",
    version,
    about = "Effect-measure modification across strata"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Decimal places in table output.
    #[arg(long, global = true, default_value_t = 4)]
    digits: usize,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Emit::Json)]
    emit: Emit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Json,
    Table,
    /// Venn table as CSV (simulate only).
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum DistArg {
    Uniform,
    Rare,
    Tent,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ZeroCellArg {
    Reject,
    HaldaneAnscombe,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
enum RegionArg {
    A,
    B,
    C,
    D,
}

#[derive(Debug, Args, Serialize)]
struct StrataArgs {
    /// Control risk in stratum P.
    #[arg(long)]
    p1: Option<f64>,
    /// Exposed risk in stratum P.
    #[arg(long)]
    p2: Option<f64>,
    /// Control risk in stratum Q.
    #[arg(long)]
    p3: Option<f64>,
    /// Exposed risk in stratum Q.
    #[arg(long)]
    p4: Option<f64>,
    /// Read strata (risks or counts) from a CSV or JSON file.
    #[arg(long = "in", conflicts_with_all = ["p1", "p2", "p3", "p4"])]
    input: Option<PathBuf>,
    /// Input file format; guessed from the extension when absent.
    #[arg(long, requires = "input")]
    format: Option<FormatArg>,
}

#[derive(Debug, Args, Serialize)]
struct TripleArgs {
    #[arg(long)]
    p1: f64,
    #[arg(long)]
    p2: f64,
    #[arg(long)]
    p3: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// The six effect measures (and derived measures) of one or two strata.
    Measures(StrataArgs),
    /// Direction of modification per measure and agreement of a subset.
    Agree {
        #[command(flatten)]
        strata: StrataArgs,
        /// Subset to judge, e.g. `RR,RR*`, or `all`.
        #[arg(long, default_value = "all")]
        kinds: String,
    },
    /// Value of p4 at which each measure shows no modification.
    Critical {
        #[command(flatten)]
        risks: TripleArgs,
        /// A single kind; all six when absent.
        #[arg(long)]
        kind: Option<String>,
    },
    /// Range of p4 over which two measures disagree.
    Window {
        #[command(flatten)]
        risks: TripleArgs,
        /// Exactly two kinds, e.g. `RR,RR*`.
        #[arg(long, default_value = "RR,RR*")]
        kinds: String,
    },
    /// Monte Carlo agreement frequencies for all 64 subsets.
    Simulate {
        #[arg(long, value_enum, default_value_t = DistArg::Uniform)]
        dist: DistArg,
        #[arg(long, default_value_t = SimulationConfig::DEFAULT_TRIALS)]
        trials: u64,
        #[arg(long, env = "CONCORD_SEED", default_value_t = 1)]
        seed: u64,
        /// Tent bounds `L,U`.
        #[arg(long, default_value = "0,1")]
        bounds: String,
        /// Worker threads; defaults to the available parallelism.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Quadrature of the RR/RR* disagreement probability.
    Exact {
        /// Grid cells per axis.
        #[arg(long, default_value_t = QuadratureSpec::DEFAULT_CELLS)]
        resolution: usize,
        /// Refine until successive grids differ by at most this much, up to
        /// `--resolution` cells per axis.
        #[arg(long)]
        tolerance: Option<f64>,
        /// A single region; all four and the total when absent.
        #[arg(long, value_enum)]
        region: Option<RegionArg>,
    },
    /// Delta-method test for RR and RR* modified in a common direction.
    TestModification {
        /// Count table as CSV or JSON.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        format: Option<FormatArg>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Handling of cells with no events or all events.
        #[arg(long, value_enum, default_value_t = ZeroCellArg::Reject)]
        zero_cells: ZeroCellArg,
    },
    /// Recompute a published case study.
    Case {
        /// One of table1, hcv-a, hcv-b, melanoma, covid.
        name: String,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Measures(_) => "measures",
            Command::Agree { .. } => "agree",
            Command::Critical { .. } => "critical",
            Command::Window { .. } => "window",
            Command::Simulate { .. } => "simulate",
            Command::Exact { .. } => "exact",
            Command::TestModification { .. } => "test-modification",
            Command::Case { .. } => "case",
        }
    }
}

/// Runs the CLI against the process's stdout and stderr.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_cli_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().ansi().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    match execute(&cli) {
        Ok(report) => match emit(&cli, &report, out) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                e.exit_code()
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// A computed report in its two renderings.
struct Report {
    envelope: ReportEnvelope,
    table: String,
    csv: Option<String>,
}

fn emit(cli: &Cli, report: &Report, stdout: &mut dyn Write) -> Result<()> {
    let text = match cli.emit {
        Emit::Json => report.envelope.to_json() + "\n",
        Emit::Table => report.table.clone(),
        Emit::Csv => report.csv.clone().ok_or_else(|| {
            Error::Validation(format!(
                "--emit csv is only available for simulate, not {}",
                report.envelope.command
            ))
        })?,
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<Report> {
    let digits = cli.digits;
    let name = cli.command.name();
    match &cli.command {
        Command::Measures(args) => measures_report(name, args, digits),
        Command::Agree { strata, kinds } => agree_report(name, strata, kinds, digits),
        Command::Critical { risks, kind } => critical_report(name, risks, kind.as_deref(), digits),
        Command::Window { risks, kinds } => window_report(name, risks, kinds, digits),
        Command::Simulate {
            dist,
            trials,
            seed,
            bounds,
            workers,
        } => simulate_report(name, *dist, *trials, *seed, bounds, *workers, digits),
        Command::Exact {
            resolution,
            tolerance,
            region,
        } => exact_report(name, *resolution, *tolerance, *region, digits),
        Command::TestModification {
            input,
            format,
            alpha,
            zero_cells,
        } => test_report(name, input, *format, *alpha, *zero_cells, digits),
        Command::Case { name: case } => case_report(name, case, digits),
    }
}

fn num(value: f64, digits: usize) -> String {
    if value.is_nan() {
        "nan".into()
    } else if value.is_infinite() {
        if value > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{value:.digits$}")
    }
}

fn render_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut text = String::new();
    let mut line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        let _ = writeln!(text, "{}", padded.join("  ").trim_end());
    };
    line(headers.to_vec());
    for row in rows {
        line(row.iter().map(String::as_str).collect());
    }
    text
}

/// Strata as given, either from flags or a file.
enum Given {
    Single(RiskPair),
    Both(StratifiedRisks),
}

fn resolve_format(path: &std::path::Path, format: Option<FormatArg>) -> InputFormat {
    match format {
        Some(FormatArg::Csv) => InputFormat::Csv,
        Some(FormatArg::Json) => InputFormat::Json,
        None => InputFormat::from_path(path),
    }
}

fn given_strata(args: &StrataArgs) -> Result<Given> {
    if let Some(path) = &args.input {
        return Ok(Given::Both(
            match load_strata(path, resolve_format(path, args.format))? {
                StrataInput::Risks(s) => s,
                StrataInput::Counts(t) => from_counts(&t, ZeroCellPolicy::Reject)?,
            },
        ));
    }
    let missing = |flag: &str| Error::Validation(format!("missing --{flag} (or pass --in FILE)"));
    let p1 = args.p1.ok_or_else(|| missing("p1"))?;
    let p2 = args.p2.ok_or_else(|| missing("p2"))?;
    match (args.p3, args.p4) {
        (None, None) => Ok(Given::Single(RiskPair::new(p1, p2)?)),
        (Some(p3), Some(p4)) => Ok(Given::Both(StratifiedRisks::from_risks(p1, p2, p3, p4)?)),
        (None, Some(_)) => Err(missing("p3")),
        (Some(_), None) => Err(missing("p4")),
    }
}

fn both_strata(args: &StrataArgs) -> Result<StratifiedRisks> {
    match given_strata(args)? {
        Given::Both(s) => Ok(s),
        Given::Single(_) => Err(Error::Validation("this command needs --p3 and --p4".into())),
    }
}

#[derive(Serialize)]
struct PairReport {
    control: f64,
    exposed: f64,
    measures: MeasureVector,
    /// Present for risks strictly inside (0, 1).
    derived: Option<DerivedMeasures>,
}

fn pair_report(pair: &RiskPair) -> Result<PairReport> {
    Ok(PairReport {
        control: pair.control,
        exposed: pair.exposed,
        measures: measure_vector(pair)?,
        derived: if pair.is_strict() {
            Some(derived_measures(pair)?)
        } else {
            None
        },
    })
}

fn measures_report(name: &str, args: &StrataArgs, digits: usize) -> Result<Report> {
    let pairs: Vec<(&str, RiskPair)> = match given_strata(args)? {
        Given::Single(p) => vec![("P", p)],
        Given::Both(s) => {
            s.check_boundaries(MeasureKind::RelativeRisk)?;
            vec![("P", s.stratum_p), ("Q", s.stratum_q)]
        }
    };
    let mut results = BTreeMap::new();
    for (label, pair) in &pairs {
        results.insert(*label, pair_report(pair)?);
    }

    let mut headers = vec!["stratum", "control", "exposed"];
    headers.extend(MeasureKind::ALL.iter().map(|k| k.symbol()));
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|(label, r)| {
            let mut row = vec![
                label.to_string(),
                num(r.control, digits),
                num(r.exposed, digits),
            ];
            row.extend(
                MeasureKind::ALL
                    .iter()
                    .map(|&k| num(r.measures.get(k), digits)),
            );
            row
        })
        .collect();
    let mut table = render_table(&headers, &rows);
    if results.values().all(|r| r.derived.is_some()) {
        let mut headers = vec!["stratum"];
        headers.extend(DerivedKind::ALL.iter().map(|k| k.symbol()));
        let rows: Vec<Vec<String>> = results
            .iter()
            .map(|(label, r)| {
                let derived = r.derived.as_ref().expect("checked above");
                let mut row = vec![label.to_string()];
                row.extend(
                    DerivedKind::ALL
                        .iter()
                        .map(|&k| num(derived.get(k), digits)),
                );
                row
            })
            .collect();
        table.push('\n');
        table.push_str(&render_table(&headers, &rows));
    }
    Ok(Report {
        envelope: ReportEnvelope::new(name, args, &results)?,
        table,
        csv: None,
    })
}

fn agree_report(name: &str, args: &StrataArgs, kinds: &str, digits: usize) -> Result<Report> {
    let s = both_strata(args)?;
    let kinds: KindSet = kinds.parse()?;
    let report = agree(&s, kinds, Tolerance::DIRECTION)?;
    let (mp, mq) = s.measure_vectors()?;
    let rows: Vec<Vec<String>> = MeasureKind::ALL
        .iter()
        .map(|&k| {
            vec![
                k.symbol().to_string(),
                num(mp.get(k), digits),
                num(mq.get(k), digits),
                format!("{:?}", report.direction(k)),
            ]
        })
        .collect();
    let mut table = render_table(&["kind", "P", "Q", "direction"], &rows);
    let yes_no = |b: bool| if b { "yes" } else { "no" };
    let _ = writeln!(table, "\n{kinds} agree: {}", yes_no(report.agrees));
    let _ = writeln!(table, "RR and RR* agree: {}", yes_no(report.rr_gate_fired));
    for c in &report.sufficient_conditions {
        let _ = writeln!(table, "forced by {:?}: {}", c.lemma, c.forces);
    }
    let inputs = serde_json::json!({ "strata": s, "kinds": kinds });
    Ok(Report {
        envelope: ReportEnvelope::new(name, &inputs, &report)?,
        table,
        csv: None,
    })
}

#[derive(Serialize)]
struct CriticalValue {
    kind: MeasureKind,
    p4: f64,
    in_range: bool,
}

fn critical_report(
    name: &str,
    risks: &TripleArgs,
    kind: Option<&str>,
    digits: usize,
) -> Result<Report> {
    let kinds: Vec<MeasureKind> = match kind {
        Some(k) => vec![k.parse()?],
        None => MeasureKind::ALL.to_vec(),
    };
    let values = kinds
        .iter()
        .map(|&k| {
            let p4 = critical_p4(risks.p1, risks.p2, risks.p3, k)?;
            Ok(CriticalValue {
                kind: k,
                p4,
                in_range: 0.0 < p4 && p4 < 1.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<String>> = values
        .iter()
        .map(|v| {
            vec![
                v.kind.symbol().to_string(),
                num(v.p4, digits),
                v.in_range.to_string(),
            ]
        })
        .collect();
    Ok(Report {
        envelope: ReportEnvelope::new(name, risks, &values)?,
        table: render_table(&["kind", "p4*", "in (0,1)"], &rows),
        csv: None,
    })
}

fn window_report(name: &str, risks: &TripleArgs, kinds: &str, digits: usize) -> Result<Report> {
    let set: KindSet = kinds.parse()?;
    let pair: Vec<MeasureKind> = set.iter().collect();
    let [a, b] = pair[..] else {
        return Err(Error::Validation(format!(
            "--kinds needs exactly two distinct kinds, got `{kinds}`"
        )));
    };
    let window: Option<OpenInterval> = disagreement_window(risks.p1, risks.p2, risks.p3, a, b)?;
    let table = match window {
        Some(w) => format!(
            "{a} and {b} disagree for p4 in ({}, {})\n",
            num(w.lower, digits),
            num(w.upper, digits)
        ),
        None => format!("{a} and {b} agree for every p4\n"),
    };
    let inputs =
        serde_json::json!({ "p1": risks.p1, "p2": risks.p2, "p3": risks.p3, "kinds": set });
    Ok(Report {
        envelope: ReportEnvelope::new(name, &inputs, &serde_json::json!({ "window": window }))?,
        table,
        csv: None,
    })
}

fn parse_bounds(text: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || Error::Validation(format!("--bounds expects `L,U`, got `{text}`"));
    match parts[..] {
        [l, u] => Ok((l.parse().map_err(|_| bad())?, u.parse().map_err(|_| bad())?)),
        _ => Err(bad()),
    }
}

fn simulate_report(
    name: &str,
    dist: DistArg,
    trials: u64,
    seed: u64,
    bounds: &str,
    workers: Option<usize>,
    digits: usize,
) -> Result<Report> {
    let distribution = match dist {
        DistArg::Uniform => RiskDistribution::UniformUnit,
        DistArg::Rare => RiskDistribution::UniformRare,
        DistArg::Tent => {
            let (lower, upper) = parse_bounds(bounds)?;
            RiskDistribution::Tent { lower, upper }
        }
    };
    let mut config = SimulationConfig::new(distribution, seed).with_trials(trials);
    if let Some(w) = workers {
        config = config.with_workers(w);
    }
    let result = montecarlo::run(&config)?;
    let venn = venn_table(&result);

    let mut csv = Vec::new();
    write_venn_csv(&venn, &mut csv)?;
    let csv = String::from_utf8(csv).expect("CSV output is UTF-8");
    let rows: Vec<Vec<String>> = venn
        .iter()
        .map(|r| {
            vec![
                r.bitmask.to_string(),
                r.members.to_string(),
                r.count.to_string(),
                num(r.frequency, digits),
            ]
        })
        .collect();
    let mut table = render_table(&["bitmask", "members", "count", "frequency"], &rows);
    let _ = writeln!(
        table,
        "\ntrials: {}  redraws: {}  RR/RR*-agree-but-six-disagree: {}",
        result.trials, result.redraws, result.theorem_violations
    );
    let results = serde_json::json!({ "simulation": result, "venn": venn });
    Ok(Report {
        envelope: ReportEnvelope::new(name, &config, &results)?.with_seed(seed),
        table,
        csv: Some(csv),
    })
}

#[derive(Serialize)]
struct ExactResults {
    regions: BTreeMap<String, quadrature::Estimate>,
    total: Option<quadrature::Estimate>,
    region_a_parts: Option<quadrature::RegionAParts>,
}

fn exact_report(
    name: &str,
    resolution: usize,
    tolerance: Option<f64>,
    region: Option<RegionArg>,
    digits: usize,
) -> Result<Report> {
    let spec = match tolerance {
        Some(tolerance) => QuadratureSpec::Adaptive {
            tolerance,
            max_cells: resolution,
        },
        None => QuadratureSpec::grid(resolution),
    };
    let regions: Vec<Region> = match region {
        Some(RegionArg::A) => vec![Region::A],
        Some(RegionArg::B) => vec![Region::B],
        Some(RegionArg::C) => vec![Region::C],
        Some(RegionArg::D) => vec![Region::D],
        None => Region::ALL.to_vec(),
    };
    let mut estimates = BTreeMap::new();
    for r in &regions {
        estimates.insert(format!("{r:?}"), quadrature::region_probability(*r, spec)?);
    }
    let total = (regions.len() == 4).then(|| quadrature::Estimate {
        estimate: estimates.values().map(|e| e.estimate).sum(),
        error: estimates.values().map(|e| e.error).sum(),
        resolution: estimates.values().map(|e| e.resolution).min().unwrap_or(0),
    });
    let parts = if regions.contains(&Region::A) {
        Some(quadrature::region_a_parts(spec)?)
    } else {
        None
    };

    let row = |label: &str, e: &quadrature::Estimate| {
        vec![
            label.to_string(),
            num(e.estimate, digits),
            format!("{:.1e}", e.error),
            e.resolution.to_string(),
        ]
    };
    let mut rows: Vec<Vec<String>> = estimates.iter().map(|(k, e)| row(k, e)).collect();
    if let Some(t) = &total {
        rows.push(row("total", t));
    }
    if let Some(p) = &parts {
        rows.push(row("A part 1", &p.part1));
        rows.push(row("A part 2", &p.part2));
        rows.push(row("A part 3", &p.part3));
    }
    let results = ExactResults {
        regions: estimates,
        total,
        region_a_parts: parts,
    };
    Ok(Report {
        envelope: ReportEnvelope::new(name, &spec, &results)?,
        table: render_table(&["region", "estimate", "error", "resolution"], &rows),
        csv: None,
    })
}

fn test_report(
    name: &str,
    input: &std::path::Path,
    format: Option<FormatArg>,
    alpha: f64,
    zero_cells: ZeroCellArg,
    digits: usize,
) -> Result<Report> {
    let table: CountTable = match load_strata(input, resolve_format(input, format))? {
        StrataInput::Counts(t) => t,
        StrataInput::Risks(_) => {
            return Err(Error::Validation(
                "test-modification needs counts (stratum,group,events,total)".into(),
            ))
        }
    };
    let policy = match zero_cells {
        ZeroCellArg::Reject => ZeroCellPolicy::Reject,
        ZeroCellArg::HaldaneAnscombe => ZeroCellPolicy::HaldaneAnscombe,
    };
    let verdict = modification_test(&table, alpha, policy)?;
    let e = &verdict.estimate;
    let (se1, se2) = e.standard_errors();
    let rows = vec![
        vec![
            "ln RRR (RR)".to_string(),
            num(e.log_rrr1, digits),
            num(se1, digits),
            num(verdict.region[0].lower, digits),
            num(verdict.region[0].upper, digits),
        ],
        vec![
            "ln RRR (RR*)".to_string(),
            num(e.log_rrr2, digits),
            num(se2, digits),
            num(verdict.region[1].lower, digits),
            num(verdict.region[1].upper, digits),
        ],
    ];
    let mut text = render_table(&["statistic", "estimate", "se", "lower", "upper"], &rows);
    let _ = writeln!(
        text,
        "\nalpha {alpha}  z {}  reject: {}  direction: {:?}",
        num(verdict.z, digits),
        verdict.reject,
        verdict.direction
    );
    let inputs = serde_json::json!({ "counts": table, "alpha": alpha, "zero_cells": zero_cells });
    Ok(Report {
        envelope: ReportEnvelope::new(name, &inputs, &verdict)?,
        table: text,
        csv: None,
    })
}

#[derive(Serialize)]
struct CaseResults {
    study: crate::cases::CaseStudy,
    values: Vec<CheckedValue>,
    all_match: bool,
}

fn case_report(name: &str, case: &str, digits: usize) -> Result<Report> {
    let study = case_study(case)?;
    let values = study.check()?;
    let rows: Vec<Vec<String>> = values
        .iter()
        .map(|v| {
            vec![
                format!("{:?}", v.expected.outcome),
                format!("{:?}", v.expected.stratum),
                v.expected.quantity.to_string(),
                v.expected.printed.clone(),
                num(v.computed, digits.max(v.expected.decimals())),
                if v.matches { "ok" } else { "MISMATCH" }.to_string(),
            ]
        })
        .collect();
    let mut table = format!("{}: {}\n\n", study.name, study.description);
    table.push_str(&render_table(
        &[
            "outcome", "stratum", "quantity", "printed", "computed", "check",
        ],
        &rows,
    ));
    let results = CaseResults {
        all_match: values.iter().all(|v| v.matches),
        study,
        values,
    };
    Ok(Report {
        envelope: ReportEnvelope::new(name, &serde_json::json!({ "name": case }), &results)?,
        table,
        csv: None,
    })
}
