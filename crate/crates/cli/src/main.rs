use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use biproj_core::formats::{BettiFile, ConfigurationFile, MatrixFile, MatrixKind, PlanFile, Source};
use biproj_core::oracle::{betti_oracle, hilbert_oracle, ExactField};
use biproj_core::{
    acm_resolution, betti_from_delta, hilbert_acm, remove_points, sample, BettiDifference, BettiTable, Bidegree,
    Error, HilbertMatrix, Line, PointGrid, PointKind, RemovalPlan, Separator,
};
use clap::{Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::Serialize;
use serde_json::json;

const FIELD_ENV: &str = "BIPROJ_FIELD";

#[derive(Parser)]
#[command(name = "biproj", version, about = "Hilbert functions and resolutions of point schemes on a grid in P1 x P1")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Field for oracle computations: `rationals` or a prime. Overrides the
    /// BIPROJ_FIELD environment variable.
    #[arg(long, global = true)]
    field: Option<String>,

    /// Seed for randomized runs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Combinatorial,
    Delta,
    Oracle,
}

#[derive(Subcommand)]
enum Command {
    /// Check a configuration file.
    Validate { config: PathBuf },
    /// Hilbert function matrix.
    Hilbert {
        config: PathBuf,
        /// Last row and column index to print.
        #[arg(long, num_args = 2, value_names = ["I", "J"])]
        window: Option<Vec<usize>>,
        /// Compute by evaluation-matrix ranks instead of the staircase.
        #[arg(long)]
        oracle: bool,
    },
    /// First difference of the Hilbert function.
    Delta {
        config: PathBuf,
        #[arg(long, num_args = 2, value_names = ["I", "J"])]
        window: Option<Vec<usize>>,
        #[arg(long)]
        oracle: bool,
    },
    /// ACM verdict, point classes, corners and vertices.
    Classify { config: PathBuf },
    /// Betti table of the configuration, optionally after removing points.
    Resolution {
        config: PathBuf,
        /// Points to remove, each written `i,j`.
        #[arg(long, num_args = 1.., value_name = "I,J")]
        remove: Vec<String>,
        /// Plan file with a "remove" list, used instead of --remove.
        #[arg(long, conflicts_with = "remove")]
        plan: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Method::Combinatorial)]
        method: Method,
        /// Compare against the oracle; exit 4 on mismatch.
        #[arg(long)]
        verify: bool,
        /// Also print the split separator of every removal step.
        #[arg(long)]
        separators: bool,
    },
    /// Random staircases and removal plans checked against the oracle.
    Fuzz {
        #[arg(long, default_value_t = 20)]
        count: usize,
        /// Largest a and b (grid is at most (a+1) x (b+1)).
        #[arg(long, default_value_t = 6)]
        max: usize,
        /// Largest number of points removed.
        #[arg(long, default_value_t = 4)]
        points: usize,
    },
}

enum Failure {
    Core(Error),
    Input(String),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(Error::NotAcm) => 2,
            Failure::Core(Error::CollinearRemoval { .. } | Error::NotInterior(..) | Error::MappingCone { .. }) => 3,
            Failure::Mismatch(_) => 4,
            _ => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Input(_) => "BadInput",
            Failure::Mismatch(_) => "VerificationMismatch",
            Failure::Core(e) => match e {
                Error::InvalidGrid(_) => "InvalidGrid",
                Error::OutOfRange(..) => "OutOfRange",
                Error::DuplicatePoint(..) => "DuplicatePoint",
                Error::ParamCount { .. } => "ParamCount",
                Error::NotAcm => "NotACM",
                Error::PointNotInScheme(..) => "PointNotInScheme",
                Error::CollinearRemoval { .. } => "CollinearRemoval",
                Error::NotInterior(..) => "NotInterior",
                Error::NonPositiveEntry { .. } => "NonPositiveEntry",
                Error::OutsideWindow { .. } => "OutsideWindow",
                Error::MappingCone { .. } => "MappingCone",
                Error::SeparatorInvariant { .. } => "SeparatorInvariant",
                Error::BadField(_) => "BadField",
                Error::Overflow => "Overflow",
                Error::WindowTooSmall { .. } => "WindowTooSmall",
                Error::Parse(_) => "Parse",
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Input(m) | Failure::Mismatch(m) => m.clone(),
        }
    }
}

type Run = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = std::io::stdout().lock();
    match run(&cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let _ = out.flush();
            let err = json!({ "error": f.kind(), "message": f.message(), "exit_code": f.exit_code() });
            eprintln!("{err}");
            ExitCode::from(f.exit_code())
        }
    }
}

fn run(cli: &Cli, out: &mut impl Write) -> Run {
    match &cli.command {
        Command::Validate { config } => validate(cli, config, out),
        Command::Hilbert { config, window, oracle } => {
            let grid = load(config)?;
            let m = hilbert_matrix(cli, &grid, *oracle)?;
            let m = match window {
                Some(w) => m.extended(w[0] + 1, w[1] + 1),
                None => m,
            };
            emit_matrix(cli, out, MatrixFile::hilbert(&m))
        }
        Command::Delta { config, window, oracle } => {
            let grid = load(config)?;
            let m = hilbert_matrix(cli, &grid, *oracle)?;
            let file = match window {
                Some(w) => MatrixFile::delta(&m.extended(w[0] + 1, w[1] + 1).delta()),
                None => {
                    let entries = m.delta().support_block();
                    MatrixFile {
                        kind: MatrixKind::Delta,
                        rows: entries.len(),
                        cols: entries.first().map_or(0, Vec::len),
                        entries,
                    }
                }
            };
            emit_matrix(cli, out, file)
        }
        Command::Classify { config } => classify(cli, config, out),
        Command::Resolution { config, remove, plan, method, verify, separators } => {
            let plan = match plan {
                Some(path) => PlanFile::parse(&read(path)?)?.plan(),
                None => parse_removals(remove)?,
            };
            resolution(cli, config, &plan, *method, *verify, *separators, out)
        }
        Command::Fuzz { count, max, points } => fuzz(cli, *count, *max, *points, out),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<PointGrid, Failure> {
    Ok(ConfigurationFile::parse(&read(path)?)?.to_grid()?)
}

fn field_for(cli: &Cli, points: usize) -> Result<ExactField, Failure> {
    let given = cli.field.clone().or_else(|| std::env::var(FIELD_ENV).ok().filter(|s| !s.trim().is_empty()));
    match given {
        Some(s) => Ok(s.parse()?),
        None => Ok(ExactField::default_for(points)),
    }
}

fn hilbert_matrix(cli: &Cli, grid: &PointGrid, oracle: bool) -> Result<HilbertMatrix, Failure> {
    if oracle {
        let field = field_for(cli, grid.len())?;
        Ok(hilbert_oracle(grid, field, Bidegree::new(grid.rows(), grid.cols()))?)
    } else {
        Ok(hilbert_acm(grid)?)
    }
}

fn print_json(out: &mut impl Write, value: &impl Serialize) -> Run {
    let text = serde_json::to_string_pretty(value).expect("output serializes");
    writeln!(out, "{text}").map_err(|e| Failure::Input(e.to_string()))
}

fn print_text(out: &mut impl Write, text: &str) -> Run {
    write!(out, "{text}").map_err(|e| Failure::Input(e.to_string()))
}

fn emit_matrix(cli: &Cli, out: &mut impl Write, file: MatrixFile) -> Run {
    match cli.format {
        Format::Json => print_json(out, &file),
        Format::Table => print_text(out, &file.to_text()),
    }
}

fn validate(cli: &Cli, path: &Path, out: &mut impl Write) -> Run {
    let grid = ConfigurationFile::parse(&read(path)?)?.build_grid()?;
    let report = grid.validate();
    let violations: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
    match cli.format {
        Format::Json => print_json(
            out,
            &json!({
                "valid": report.is_valid(),
                "rows": grid.rows(),
                "cols": grid.cols(),
                "points": grid.len(),
                "violations": violations,
            }),
        )?,
        Format::Table => {
            let mut text = format!(
                "valid: {}\npoints: {} on a {}x{} grid\n",
                if report.is_valid() { "yes" } else { "no" },
                grid.len(),
                grid.rows(),
                grid.cols()
            );
            for v in &violations {
                text.push_str(&format!("violation: {v}\n"));
            }
            print_text(out, &text)?;
        }
    }
    if report.is_valid() {
        Ok(())
    } else {
        Err(Error::InvalidGrid(report).into())
    }
}

fn point_name((i, j): (usize, usize)) -> String {
    if i < 10 && j < 10 {
        format!("P_{i}{j}")
    } else {
        format!("P_{{{i},{j}}}")
    }
}

fn degrees(ds: &[Bidegree]) -> String {
    ds.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn classify(cli: &Cli, path: &Path, out: &mut impl Write) -> Run {
    let grid = load(path)?;
    if !grid.is_acm() {
        match cli.format {
            Format::Json => print_json(out, &json!({ "acm": false }))?,
            Format::Table => print_text(out, "ACM: no\n")?,
        }
        return Err(Error::NotAcm.into());
    }
    let classes = grid.classify_points()?;
    let (corners, vertices) = grid.corners_and_vertices()?;
    match cli.format {
        Format::Json => {
            let points: Vec<_> = classes
                .iter()
                .map(|c| {
                    json!({
                        "position": [c.position.0, c.position.1],
                        "kind": c.kind,
                        "row_count": c.row_count,
                        "col_count": c.col_count,
                        "separating_degree": c.separating_degree(),
                    })
                })
                .collect();
            print_json(out, &json!({ "acm": true, "points": points, "corners": corners, "vertices": vertices }))
        }
        Format::Table => {
            let names = |kind: PointKind| -> String {
                classes
                    .iter()
                    .filter(|c| c.kind == kind)
                    .map(|c| point_name(c.position))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let mut text = String::from("ACM: yes\n");
            text.push_str(&format!("interior: {}\n", names(PointKind::Interior)));
            text.push_str(&format!("boundary: {}\n", names(PointKind::Boundary)));
            text.push_str(&format!("corners: {}\n", degrees(&corners)));
            text.push_str(&format!("vertices: {}\n", degrees(&vertices)));
            text.push_str("\npoint  kind      counts (col,row)  separating degree\n");
            for c in &classes {
                let kind = match c.kind {
                    PointKind::Interior => "interior",
                    PointKind::Boundary => "boundary",
                };
                text.push_str(&format!(
                    "{:<6} {:<9} {:<17} {}\n",
                    point_name(c.position),
                    kind,
                    format!("({},{})", c.col_count, c.row_count),
                    c.separating_degree()
                ));
            }
            print_text(out, &text)
        }
    }
}

fn parse_removals(items: &[String]) -> Result<RemovalPlan, Failure> {
    let points = items
        .iter()
        .flat_map(|s| s.split_whitespace())
        .map(|s| {
            let bad = || Failure::Input(format!("bad point {s:?}, expected i,j"));
            let (i, j) = s.split_once(',').ok_or_else(bad)?;
            Ok((i.trim().parse().map_err(|_| bad())?, j.trim().parse().map_err(|_| bad())?))
        })
        .collect::<Result<Vec<(usize, usize)>, Failure>>()?;
    Ok(RemovalPlan::new(points))
}

#[derive(Serialize)]
struct Verification {
    status: &'static str,
    field: ExactField,
    differences: Vec<BettiDifference>,
}

#[derive(Serialize)]
struct ResolutionOutput<'a> {
    #[serde(flatten)]
    file: &'a BettiFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    separators: Option<&'a [Separator]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verification: Option<&'a Verification>,
}

/// Oracle Betti numbers of `scheme`. A prime-field disagreement with
/// `expected` is rechecked over the rationals.
fn oracle_check(cli: &Cli, scheme: &PointGrid, expected: &BettiTable) -> Result<Verification, Failure> {
    let field = field_for(cli, scheme.len())?;
    let mut truth = betti_oracle(scheme, field)?;
    let mut used = field;
    if truth != *expected && field != ExactField::Rationals {
        if let Ok(t) = betti_oracle(scheme, ExactField::Rationals) {
            truth = t;
            used = ExactField::Rationals;
        }
    }
    let differences = expected.diff(&truth);
    Ok(Verification { status: if differences.is_empty() { "MATCH" } else { "MISMATCH" }, field: used, differences })
}

fn line_name(line: &Line) -> String {
    match line {
        Line::Row(i) => format!("R_{i}"),
        Line::Col(j) => format!("C_{j}"),
    }
}

fn resolution(
    cli: &Cli,
    path: &Path,
    plan: &RemovalPlan,
    method: Method,
    verify: bool,
    show_separators: bool,
    out: &mut impl Write,
) -> Run {
    let grid = load(path)?;
    let (table, scheme, file, separators) = match method {
        Method::Oracle => {
            let scheme = grid.without_all(plan.points())?;
            let table = betti_oracle(&scheme, field_for(cli, scheme.len())?)?;
            let file = BettiFile::new(&table, Source::Oracle);
            (table, scheme, file, Vec::new())
        }
        Method::Combinatorial | Method::Delta if plan.is_empty() => {
            let (table, source) = if method == Method::Delta {
                // Outside the ACM case the prediction is read off the true
                // Hilbert function; --verify then shows where it fails.
                let m = if grid.is_acm() { hilbert_acm(&grid)? } else { hilbert_matrix(cli, &grid, true)? };
                (betti_from_delta(&m.delta()), Source::Delta)
            } else {
                (acm_resolution(&grid)?, Source::Acm)
            };
            let file = BettiFile::new(&table, source);
            (table, grid, file, Vec::new())
        }
        Method::Combinatorial | Method::Delta => {
            let removal = remove_points(&grid, plan)?;
            let (table, source) = if method == Method::Delta {
                (betti_from_delta(&removal.hilbert.delta()), Source::Delta)
            } else {
                (removal.table.clone(), Source::Removal)
            };
            let file = BettiFile::new(&table, source).with_conditions(&removal.steps);
            (table, removal.scheme.clone(), file, removal.separators())
        }
    };
    let verification = if verify { Some(oracle_check(cli, &scheme, &table)?) } else { None };

    match cli.format {
        Format::Json => print_json(
            out,
            &ResolutionOutput {
                file: &file,
                separators: show_separators.then_some(separators.as_slice()),
                verification: verification.as_ref(),
            },
        )?,
        Format::Table => {
            let mut text = file.to_text()?;
            if show_separators {
                text.push_str("separators:\n");
                for s in &separators {
                    let lines: Vec<String> = s.lines.iter().map(line_name).collect();
                    text.push_str(&format!(
                        "  {} degree {} lines {{{}}}\n",
                        point_name(s.point),
                        s.degree,
                        lines.join(",")
                    ));
                }
            }
            if let Some(v) = &verification {
                text.push_str(&format!("verification: {} ({})\n", v.status, v.field));
                for d in &v.differences {
                    text.push_str(&format!("  {d}\n"));
                }
            }
            print_text(out, &text)?;
        }
    }
    match verification {
        Some(v) if !v.differences.is_empty() => {
            let shown: Vec<String> = v.differences.iter().map(ToString::to_string).collect();
            Err(Failure::Mismatch(format!("oracle disagrees: {}", shown.join("; "))))
        }
        _ => Ok(()),
    }
}

fn fuzz(cli: &Cli, count: usize, max: usize, points: usize, out: &mut impl Write) -> Run {
    let mut rng = StdRng::seed_from_u64(cli.seed);
    let mut cases = Vec::with_capacity(count);
    let mut lines = Vec::with_capacity(count);
    let mut failures = 0;
    for case in 0..count {
        let grid = sample::staircase(&mut rng, max, max);
        let plan = sample::removal_plan(&mut rng, &grid, points);
        let removal = remove_points(&grid, &plan)?;
        let from_delta = betti_from_delta(&removal.hilbert.delta());
        let verification = oracle_check(cli, &removal.scheme, &removal.table)?;
        let delta_differences = removal.table.diff(&from_delta);
        let ok = verification.differences.is_empty() && delta_differences.is_empty();
        if !ok {
            failures += 1;
        }
        let removed: Vec<String> = plan.points().iter().map(|&p| point_name(p)).collect();
        lines.push(format!(
            "{:>2} points, remove {:<24} {}",
            grid.len(),
            if removed.is_empty() { "-".to_string() } else { removed.join(" ") },
            if ok { "ok" } else { "MISMATCH" }
        ));
        cases.push(json!({
            "case": case,
            "config": ConfigurationFile::from_grid(&grid, None),
            "remove": plan.points(),
            "ok": ok,
            "oracle_differences": verification.differences,
            "delta_differences": delta_differences,
        }));
    }
    match cli.format {
        Format::Json => print_json(out, &json!({ "seed": cli.seed, "cases": cases, "failures": failures }))?,
        Format::Table => {
            let mut text = String::new();
            for (case, line) in lines.iter().enumerate() {
                text.push_str(&format!("case {case:>3}: {line}\n"));
            }
            text.push_str(&format!("seed {}: {} cases, {failures} failures\n", cli.seed, cases.len()));
            print_text(out, &text)?;
        }
    }
    if failures > 0 {
        Err(Failure::Mismatch(format!("{failures} of {count} cases disagree with the oracle (seed {})", cli.seed)))
    } else {
        Ok(())
    }
}
