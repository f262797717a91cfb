//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::diagram::{load, DiagramCode};
use crate::evaluator::{bracket, Coloring, EvalError};
use crate::invariants::hk_invariant_with;
use crate::skein::{Color, QuantumParams};
use crate::verify::{run_suite, Suite};
use crate::wrt::{linking_data, z_wrt, FramedLink};

const MAX_R: u32 = 64;

#[derive(Debug, Parser)]
#[command(name = "hkinv", version, about = "Quantum invariants of handlebody-links and WRT invariants of framed links")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Permit r above 64.
    #[arg(long, global = true)]
    allow_large_r: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct Levels {
    /// A single level r.
    #[arg(long, conflicts_with = "r_range")]
    r: Option<u32>,
    /// An inclusive range of levels, `a..b`.
    #[arg(long = "r-range", value_parser = parse_range)]
    r_range: Option<RangeInclusive<u32>>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Kauffman bracket of one colored diagram.
    Eval {
        file: PathBuf,
        #[command(flatten)]
        levels: Levels,
        /// `strand=color`; strands not named get color 0.
        #[arg(long = "color", value_parser = parse_color)]
        colors: Vec<(String, Color)>,
    },
    /// The handlebody-link invariant of each diagram.
    Invariant {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        levels: Levels,
        /// Keep per-coloring terms in json output.
        #[arg(long)]
        audit: bool,
        #[arg(long)]
        timing: bool,
    },
    /// Invariants of every diagram in a directory, one column per diagram.
    Table {
        dir: PathBuf,
        #[command(flatten)]
        levels: Levels,
        /// Reference CSV (`r,<name>,...`) to diff against.
        #[arg(long)]
        compare: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        #[arg(long)]
        timing: bool,
    },
    /// WRT invariant of framed-link diagrams.
    Wrt {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        levels: Levels,
    },
    /// Run built-in verification suites.
    Verify {
        /// Suite to run (repeatable); default is all of them.
        #[arg(long, value_parser = parse_suite)]
        suite: Vec<Suite>,
        #[command(flatten)]
        levels: Levels,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
}

fn parse_range(s: &str) -> Result<RangeInclusive<u32>, String> {
    let (a, b) = s.split_once("..").ok_or("expected a..b")?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: u32 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: u32 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok(a..=b)
}

fn parse_color(s: &str) -> Result<(String, Color), String> {
    let (name, c) = s.split_once('=').ok_or("expected strand=color")?;
    Ok((name.to_string(), c.parse().map_err(|e| format!("{e}"))?))
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    Suite::from_name(s).ok_or_else(|| {
        let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
        format!("unknown suite `{s}` (expected one of {})", names.join(", "))
    })
}

/// Exit statuses: 1 for bad input, 2 for evaluation errors, 3 for failed
/// checks.
#[derive(Debug)]
enum Failure {
    Input(String),
    Eval(String),
    Check,
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => 1,
            Failure::Eval(_) => 2,
            Failure::Check => 3,
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        Failure::Eval(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Res<T> = Result<T, Failure>;

/// Formats with six decimals; ties go to even.
pub fn fmt6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

impl Levels {
    fn resolve(&self, allow_large: bool) -> Res<Option<Vec<u32>>> {
        let rs: Vec<u32> = match (&self.r, &self.r_range) {
            (Some(r), _) => vec![*r],
            (None, Some(range)) => range.clone().collect(),
            (None, None) => return Ok(None),
        };
        for &r in &rs {
            if r < 3 {
                return Err(Failure::Input(format!("r = {r} is below 3")));
            }
            if r > MAX_R && !allow_large {
                return Err(Failure::Input(format!(
                    "r = {r} exceeds {MAX_R}; pass --allow-large-r to proceed"
                )));
            }
        }
        Ok(Some(rs))
    }

    fn required(&self, allow_large: bool) -> Res<Vec<u32>> {
        self.resolve(allow_large)?
            .ok_or_else(|| Failure::Input("one of --r or --r-range is required".into()))
    }
}

fn params(r: u32) -> Res<QuantumParams> {
    QuantumParams::new(r).map_err(|e| Failure::Input(e.to_string()))
}

fn read(path: &Path) -> Res<DiagramCode> {
    load(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

fn csv_text(header: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// Left-aligned first column, right-aligned rest.
fn aligned(header: &[String], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut width = vec![0; cols];
    for row in std::iter::once(header).chain(rows.iter().map(|r| r.as_slice())) {
        for (i, cell) in row.iter().enumerate() {
            width[i] = width[i].max(cell.len());
        }
    }
    let mut out = String::new();
    for row in std::iter::once(header).chain(rows.iter().map(|r| r.as_slice())) {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if i == 0 {
                    format!("{c:<w$}", w = width[i])
                } else {
                    format!("{c:>w$}", w = width[i])
                }
            })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn emit(format: Format, header: Vec<String>, rows: Vec<Vec<String>>, json: String) -> String {
    match format {
        Format::Table => aligned(&header, &rows),
        Format::Csv => csv_text(&header, &rows),
        Format::Json => json + "\n",
    }
}

struct Ctx<'a> {
    format: Format,
    allow_large: bool,
    out: &'a mut (dyn Write + Send),
    err: &'a mut (dyn Write + Send),
}

fn cmd_eval(ctx: &mut Ctx, file: &Path, levels: &Levels, colors: &[(String, Color)]) -> Res<()> {
    let d = read(file)?;
    let mut c = vec![0; d.strands().len()];
    for (name, color) in colors {
        let idx = d.strand_by_name(name).ok_or_else(|| {
            let names: Vec<&str> = d.strands().iter().map(|s| s.name.as_str()).collect();
            Failure::Input(format!("no strand `{name}` (strands: {})", names.join(" ")))
        })?;
        c[idx] = *color;
    }
    let coloring = Coloring(c);
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for r in levels.required(ctx.allow_large)? {
        let p = params(r)?;
        let admissible = coloring.is_admissible(&d, &p);
        let v = bracket(&d, &coloring, &p)?;
        rows.push(vec![
            d.display_name().to_string(),
            r.to_string(),
            fmt6(v.re),
            fmt6(v.im),
            fmt6(v.norm()),
            admissible.to_string(),
        ]);
        records.push(json!({
            "name": d.display_name(), "r": r, "coloring": coloring.0,
            "re": v.re, "im": v.im, "admissible": admissible,
        }));
    }
    let header = ["name", "r", "re", "im", "abs", "admissible"].map(String::from).to_vec();
    write!(ctx.out, "{}", emit(ctx.format, header, rows, to_json(&records)))?;
    Ok(())
}

fn cmd_invariant(ctx: &mut Ctx, files: &[PathBuf], levels: &Levels, audit: bool, timing: bool) -> Res<()> {
    let diagrams: Vec<DiagramCode> = files.iter().map(|f| read(f)).collect::<Res<_>>()?;
    let rs = levels.required(ctx.allow_large)?;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for d in &diagrams {
        for &r in &rs {
            let rep = hk_invariant_with(d, &params(r)?, audit)?;
            let mut row = vec![
                rep.name.clone(),
                r.to_string(),
                match ctx.format {
                    Format::Table => fmt6(rep.value),
                    _ => rep.value.to_string(),
                },
                rep.coloring_count.to_string(),
            ];
            let mut rec = serde_json::to_value(&rep).expect("report serializes");
            if timing {
                let ms = rep.elapsed.as_secs_f64() * 1e3;
                row.push(format!("{ms:.1}"));
                rec["elapsed_ms"] = json!(ms);
            }
            rows.push(row);
            records.push(rec);
        }
    }
    let mut header = ["name", "r", "value", "colorings"].map(String::from).to_vec();
    if timing {
        header.push("ms".into());
    }
    write!(ctx.out, "{}", emit(ctx.format, header, rows, to_json(&records)))?;
    Ok(())
}

fn diagram_files(dir: &Path) -> Res<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .filter(|p| matches!(p.extension().and_then(|x| x.to_str()), Some("hkd" | "json")))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Failure::Input(format!("no diagram files (*.hkd, *.json) in {}", dir.display())));
    }
    Ok(files)
}

/// Reference table: column names and `(r, values)` rows. Cells that do not
/// parse as numbers are kept as `None`.
type Reference = (Vec<String>, Vec<(u32, Vec<Option<f64>>)>);

fn read_reference(path: &Path) -> Res<Reference> {
    let mut rd = csv::Reader::from_path(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let bad = |e: csv::Error| Failure::Input(format!("{}: {e}", path.display()));
    let header = rd.headers().map_err(bad)?.clone();
    let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(bad)?;
        let r: u32 = rec[0]
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("{}: bad r `{}`", path.display(), &rec[0])))?;
        rows.push((r, rec.iter().skip(1).map(|c| c.trim().parse().ok()).collect()));
    }
    Ok((names, rows))
}

#[derive(Debug, Serialize)]
struct ColumnDiff {
    column: String,
    diagram: Option<String>,
    compared: usize,
    max_deviation: Option<f64>,
    worst_r: Option<u32>,
    pass: Option<bool>,
}

fn compare(
    reference: &Reference,
    names: &[String],
    rs: &[u32],
    values: &[Vec<f64>],
    tolerance: f64,
) -> Vec<ColumnDiff> {
    let (cols, rows) = reference;
    let mut out = Vec::new();
    for (ci, col) in cols.iter().enumerate() {
        let prefix = format!("{col}_");
        let matching: Vec<usize> = (0..names.len())
            .filter(|&i| names[i] == *col || names[i].starts_with(&prefix))
            .collect();
        if matching.is_empty() {
            out.push(ColumnDiff {
                column: col.clone(),
                diagram: None,
                compared: 0,
                max_deviation: None,
                worst_r: None,
                pass: None,
            });
            continue;
        }
        for i in matching {
            let mut worst: Option<(f64, u32)> = None;
            let mut compared = 0;
            for (ri, &r) in rs.iter().enumerate() {
                let Some(want) = rows.iter().find(|(rr, _)| *rr == r).and_then(|(_, v)| v[ci]) else {
                    continue;
                };
                compared += 1;
                let d = (values[i][ri] - want).abs();
                if worst.is_none_or(|(w, _)| d > w) {
                    worst = Some((d, r));
                }
            }
            out.push(ColumnDiff {
                column: col.clone(),
                diagram: Some(names[i].clone()),
                compared,
                max_deviation: worst.map(|w| w.0),
                worst_r: worst.map(|w| w.1),
                pass: worst.map(|w| w.0 <= tolerance).or(Some(true)),
            });
        }
    }
    out
}

fn diff_lines(diffs: &[ColumnDiff]) -> String {
    let header = ["column", "diagram", "compared", "max_dev", "worst_r", "status"].map(String::from);
    let rows: Vec<Vec<String>> = diffs
        .iter()
        .map(|d| match &d.diagram {
            None => vec![d.column.clone(), "-".into(), "0".into(), "-".into(), "-".into(), "nodiag".into()],
            Some(name) => vec![
                d.column.clone(),
                name.clone(),
                d.compared.to_string(),
                d.max_deviation.map_or("-".into(), |x| format!("{x:.3e}")),
                d.worst_r.map_or("-".into(), |r| r.to_string()),
                if d.pass == Some(true) { "ok" } else { "FAIL" }.into(),
            ],
        })
        .collect();
    aligned(&header, &rows)
}

fn cmd_table(
    ctx: &mut Ctx,
    dir: &Path,
    levels: &Levels,
    reference: Option<&Path>,
    tolerance: f64,
    timing: bool,
) -> Res<()> {
    let files = diagram_files(dir)?;
    let diagrams: Vec<DiagramCode> = files.iter().map(|f| read(f)).collect::<Res<_>>()?;
    let rs = levels.resolve(ctx.allow_large)?.unwrap_or_else(|| (3..=10).collect());
    let names: Vec<String> = diagrams.iter().map(|d| d.display_name().to_string()).collect();
    let mut values = vec![Vec::with_capacity(rs.len()); diagrams.len()];
    let mut elapsed = vec![0.0; diagrams.len()];
    for (i, d) in diagrams.iter().enumerate() {
        for &r in &rs {
            let rep = hk_invariant_with(d, &params(r)?, false)?;
            values[i].push(rep.value);
            elapsed[i] += rep.elapsed.as_secs_f64() * 1e3;
        }
    }
    let diffs = match reference {
        Some(path) => Some(compare(&read_reference(path)?, &names, &rs, &values, tolerance)),
        None => None,
    };

    let mut header = vec!["r".to_string()];
    header.extend(names.iter().cloned());
    let cell = |x: f64| match ctx.format {
        Format::Table => fmt6(x),
        _ => x.to_string(),
    };
    let mut rows: Vec<Vec<String>> = rs
        .iter()
        .enumerate()
        .map(|(ri, r)| {
            std::iter::once(r.to_string())
                .chain(values.iter().map(|v| cell(v[ri])))
                .collect()
        })
        .collect();
    if timing {
        rows.push(std::iter::once("ms".to_string()).chain(elapsed.iter().map(|t| format!("{t:.1}"))).collect());
    }
    let mut doc = json!({
        "r": rs,
        "columns": names.iter().zip(&values).map(|(n, v)| json!({"name": n, "values": v})).collect::<Vec<_>>(),
    });
    if timing {
        doc["elapsed_ms"] = json!(elapsed);
    }
    if let Some(d) = &diffs {
        doc["compare"] = serde_json::to_value(d).expect("diffs serialize");
    }
    write!(ctx.out, "{}", emit(ctx.format, header, rows, to_json(&doc)))?;
    if let Some(d) = &diffs {
        match ctx.format {
            Format::Table => write!(ctx.out, "\n{}", diff_lines(d))?,
            Format::Csv => write!(ctx.err, "{}", diff_lines(d))?,
            Format::Json => {}
        }
        if d.iter().any(|c| c.pass == Some(false)) {
            writeln!(ctx.err, "comparison exceeded tolerance {tolerance:e}")?;
            return Err(Failure::Check);
        }
    }
    Ok(())
}

fn cmd_wrt(ctx: &mut Ctx, files: &[PathBuf], levels: &Levels) -> Res<()> {
    let mut links = Vec::new();
    for f in files {
        let d = read(f)?;
        links.push(FramedLink::new(d).map_err(|e| Failure::Input(format!("{}: {e}", f.display())))?);
    }
    let rs = levels.required(ctx.allow_large)?;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for l in &links {
        let ld = linking_data(l);
        for &r in &rs {
            let z = z_wrt(l, &params(r)?)?;
            let name = l.diagram().display_name().to_string();
            rows.push(vec![
                name.clone(),
                r.to_string(),
                ld.components.to_string(),
                ld.signature.to_string(),
                fmt6(z.re),
                fmt6(z.im),
            ]);
            records.push(json!({
                "name": name, "r": r, "components": ld.components, "signature": ld.signature,
                "linking_matrix": ld.matrix, "re": z.re, "im": z.im,
            }));
        }
    }
    let header = ["name", "r", "t", "sigma", "re", "im"].map(String::from).to_vec();
    write!(ctx.out, "{}", emit(ctx.format, header, rows, to_json(&records)))?;
    Ok(())
}

fn cmd_verify(ctx: &mut Ctx, suites: &[Suite], levels: &Levels, tolerance: f64) -> Res<()> {
    let rs = levels.resolve(ctx.allow_large)?;
    let suites = if suites.is_empty() { Suite::ALL.to_vec() } else { suites.to_vec() };
    let mut reports = Vec::new();
    for s in suites {
        reports.push(run_suite(s, rs.as_deref(), tolerance)?);
    }
    let header = ["suite", "checks", "max_dev", "status"].map(String::from).to_vec();
    let rows = reports
        .iter()
        .map(|r| {
            vec![
                r.suite.to_string(),
                r.checks.to_string(),
                format!("{:.3e}", r.max_deviation),
                if r.pass { "PASS" } else { "FAIL" }.to_string(),
            ]
        })
        .collect();
    write!(ctx.out, "{}", emit(ctx.format, header, rows, to_json(&reports)))?;
    for r in reports.iter().filter(|r| !r.pass) {
        for f in &r.failures {
            writeln!(ctx.err, "{}: {f}", r.suite)?;
        }
    }
    if reports.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn dispatch(cli: &Cli, ctx: &mut Ctx) -> Res<()> {
    match &cli.command {
        Command::Eval { file, levels, colors } => cmd_eval(ctx, file, levels, colors),
        Command::Invariant {
            files,
            levels,
            audit,
            timing,
        } => cmd_invariant(ctx, files, levels, *audit, *timing),
        Command::Table {
            dir,
            levels,
            compare,
            tolerance,
            timing,
        } => cmd_table(ctx, dir, levels, compare.as_deref(), *tolerance, *timing),
        Command::Wrt { files, levels } => cmd_wrt(ctx, files, levels),
        Command::Verify {
            suite,
            levels,
            tolerance,
        } => cmd_verify(ctx, suite, levels, *tolerance),
    }
}

/// Parses `args` and runs the command, writing data to `out` and
/// diagnostics to `err`. Returns the process exit status.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let pool = match cli.workers {
        Some(0) => {
            let _ = writeln!(err, "error: --workers must be at least 1");
            return 1;
        }
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    };
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    let mut ctx = Ctx {
        format: cli.format,
        allow_large: cli.allow_large_r,
        out,
        err,
    };
    match pool.install(|| dispatch(&cli, &mut ctx)) {
        Ok(()) => 0,
        Err(f) => {
            match &f {
                Failure::Input(m) | Failure::Eval(m) => {
                    let _ = writeln!(ctx.err, "error: {m}");
                }
                Failure::Check => {}
            }
            f.code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_decimals_ties_to_even() {
        assert_eq!(fmt6(0.0078125), "0.007812");
        assert_eq!(fmt6(0.0234375), "0.023438");
        assert_eq!(fmt6(52.36067977499790), "52.360680");
        assert_eq!(fmt6(-1e-9), "0.000000");
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("3..10").unwrap(), 3..=10);
        assert_eq!(parse_range("3..=5").unwrap(), 3..=5);
        assert!(parse_range("5..3").is_err());
        assert!(parse_range("5").is_err());
    }

    #[test]
    fn level_bounds() {
        let l = Levels {
            r: Some(65),
            r_range: None,
        };
        assert!(matches!(l.resolve(false), Err(Failure::Input(_))));
        assert_eq!(l.resolve(true).unwrap(), Some(vec![65]));
        let l = Levels {
            r: Some(2),
            r_range: None,
        };
        assert!(l.resolve(true).is_err());
    }

    #[test]
    fn usage_errors_exit_1() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run(["hkinv", "frobnicate"], &mut o, &mut e), 1);
        assert_eq!(run(["hkinv", "--help"], &mut o, &mut e), 0);
    }
}
