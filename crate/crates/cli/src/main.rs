//! `segre-split`: cohomology tables, Tate bookkeeping and splitting verdicts
//! for sheaves on products of projective spaces.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use segre_split::cech::{CechEngine, CechError, CechOptions};
use segre_split::coxring::LineBundleComplex;
use segre_split::io::{parse_complex, IoError};
use segre_split::lattice::{
    intermediate_region, nonvanishing_region, render_region, render_region_labeled, safe_region, MultiDegree, Polarization,
    ProductSpace, Window,
};
use segre_split::linalg::FieldSpec;
use segre_split::splitter::{split_check_table, Assertions};
use segre_split::table::{CohomologyTable, TableJson};
use segre_split::tate::{corner_checksum, strand_checksum, tate_checksum, tate_term_dims, StrandSpec, TateError};

#[derive(Parser)]
#[command(
    name = "segre-split",
    version,
    about = "Multigraded sheaf cohomology and splitting tests on products of projective spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render where line bundles have (intermediate) cohomology, or the safe region of a polarization.
    Regions(RegionsArgs),
    /// Cohomology h^i(F(a)) of the sheaf presented by a line-bundle complex.
    Cohomology(CohomologyArgs),
    /// Decide whether F is a sum of O(kH) over a window.
    SplitCheck(SplitArgs),
    /// Tate term dimensions and exactness checksums.
    TateProfile(TateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum RegionMode {
    Full,
    Intermediate,
    Safe,
    Unsafe,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Ascii,
    Csv,
    Json,
}

#[derive(Args)]
struct RegionsArgs {
    #[arg(long)]
    space: ProductSpace,
    /// Polarization, required for --mode safe|unsafe.
    #[arg(long)]
    d: Option<Polarization>,
    #[arg(long, allow_hyphen_values = true)]
    window: Window,
    #[arg(long, value_enum, default_value = "full")]
    mode: RegionMode,
    #[arg(long, value_enum, default_value = "ascii")]
    format: Format,
    /// Fixed values of a3.. when t > 2.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    slice: Vec<i64>,
    #[arg(long)]
    labels: bool,
}

#[derive(Args)]
struct SheafArgs {
    /// JSON file with a line-bundle complex.
    #[arg(long, conflicts_with = "sum")]
    input: Option<PathBuf>,
    /// Direct sum of line bundles, e.g. "1,1;-1,-1" (needs --space).
    #[arg(long, allow_hyphen_values = true)]
    sum: Option<String>,
    #[arg(long)]
    space: Option<ProductSpace>,
    /// `q` or `p:<prime>`; overrides the field in the input file.
    #[arg(long)]
    field: Option<FieldSpec>,
    /// Second prime to recompute every rank with.
    #[arg(long)]
    cross_check: Option<u64>,
}

#[derive(Args)]
struct CohomologyArgs {
    #[command(flatten)]
    sheaf: SheafArgs,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "window")]
    twist: Option<MultiDegree>,
    #[arg(long, allow_hyphen_values = true)]
    window: Option<Window>,
    #[arg(long, value_enum, default_value = "ascii")]
    format: Format,
}

#[derive(Args)]
struct SplitArgs {
    #[command(flatten)]
    sheaf: SheafArgs,
    #[arg(long)]
    d: Polarization,
    #[arg(long, allow_hyphen_values = true)]
    window: Window,
    /// Record that F is torsion free (not checked).
    #[arg(long)]
    assert_torsion_free: bool,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Checks {
    Tate,
    Strand,
    Corner,
    All,
}

#[derive(Args)]
struct TateArgs {
    #[command(flatten)]
    sheaf: SheafArgs,
    /// Cohomology table JSON as written by `cohomology --format json`.
    #[arg(long, conflicts_with_all = ["input", "sum"])]
    table: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    window: Option<Window>,
    /// Internal degree; without it every degree whose support lies in the window is checked.
    #[arg(long, allow_hyphen_values = true)]
    b: Option<MultiDegree>,
    #[arg(long, value_enum, default_value = "tate")]
    checks: Checks,
    /// Corner or strand base point.
    #[arg(long, allow_hyphen_values = true)]
    c: Option<MultiDegree>,
    /// Factors (1-based) with a_i < c_i.
    #[arg(long = "I", value_delimiter = ',')]
    less: Vec<usize>,
    /// Factors (1-based) with a_i = c_i.
    #[arg(long = "J", value_delimiter = ',')]
    equal: Vec<usize>,
    /// Factors (1-based) with a_i >= c_i.
    #[arg(long = "K", value_delimiter = ',')]
    at_least: Vec<usize>,
    #[arg(long, value_enum, default_value = "ascii")]
    format: Format,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Schema(String),
    Unstable(String),
    Window(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Schema(_) => 2,
            Failure::Unstable(_) => 3,
            Failure::Window(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(s) => write!(f, "usage: {s}"),
            Failure::Schema(s) => write!(f, "input: {s}"),
            Failure::Unstable(s) => write!(f, "{s}"),
            Failure::Window(s) => write!(f, "window: {s}"),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Schema(e.to_string())
    }
}

impl From<CechError> for Failure {
    fn from(e: CechError) -> Self {
        match e {
            CechError::Unstable { .. } | CechError::PrimeMismatch { .. } => Failure::Unstable(e.to_string()),
            CechError::InvalidComplex(_) | CechError::Ring(_) => Failure::Schema(e.to_string()),
            CechError::Linalg(_) => Failure::Usage(e.to_string()),
        }
    }
}

impl From<TateError> for Failure {
    fn from(e: TateError) -> Self {
        match e {
            TateError::WindowInsufficient { .. } => Failure::Window(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn parse_sum(text: &str) -> Result<Vec<MultiDegree>, Failure> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<MultiDegree>().map_err(|e| Failure::Usage(format!("--sum: {e}"))))
        .collect()
}

fn load_complex(args: &SheafArgs) -> Result<LineBundleComplex, Failure> {
    match (&args.input, &args.sum) {
        (Some(path), None) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let c = parse_complex(&text, args.field)?;
            if let Some(space) = &args.space {
                if space != c.space() {
                    return Err(Failure::Usage(format!("--space {space} disagrees with the input space {}", c.space())));
                }
            }
            Ok(c)
        }
        (None, Some(sum)) => {
            let space = args.space.clone().ok_or_else(|| Failure::Usage("--sum needs --space".into()))?;
            LineBundleComplex::free(space, args.field.unwrap_or_default(), parse_sum(sum)?)
                .map_err(|e| Failure::Usage(e.to_string()))
        }
        _ => Err(Failure::Usage("give exactly one of --input or --sum".into())),
    }
}

fn engine(args: &SheafArgs, c: &LineBundleComplex) -> Result<CechEngine, Failure> {
    let options = CechOptions { cross_check_prime: args.cross_check, ..CechOptions::default() };
    if let Some(p) = args.cross_check {
        FieldSpec::prime(p).map_err(|e| Failure::Usage(format!("--cross-check: {e}")))?;
    }
    Ok(CechEngine::with_options(c.field(), options))
}

fn check_window(space: &ProductSpace, w: &Window) -> Result<(), Failure> {
    if w.t() != space.t() {
        return Err(Failure::Usage(format!("window {w} has {} coordinates, the space has {}", w.t(), space.t())));
    }
    Ok(())
}

fn cmd_regions(a: RegionsArgs) -> Result<String, Failure> {
    check_window(&a.space, &a.window)?;
    let need_d = || -> Result<Polarization, Failure> {
        let d = a.d.clone().ok_or_else(|| Failure::Usage("--mode safe|unsafe needs --d".into()))?;
        if d.degree().len() != a.space.t() {
            return Err(Failure::Usage(format!("--d has {} entries, the space has {} factors", d.degree().len(), a.space.t())));
        }
        Ok(d)
    };
    let (cells, name): (BTreeSet<MultiDegree>, &str) = match a.mode {
        RegionMode::Full => (nonvanishing_region(&a.space, &a.window), "full"),
        RegionMode::Intermediate => (intermediate_region(&a.space, &a.window), "intermediate"),
        RegionMode::Safe => (safe_region(&a.space, &need_d()?, &a.window), "safe"),
        RegionMode::Unsafe => {
            let safe = safe_region(&a.space, &need_d()?, &a.window);
            (a.window.points().into_iter().filter(|p| !safe.contains(p)).collect(), "unsafe")
        }
    };
    match a.format {
        Format::Ascii => {
            let render = if a.labels { render_region_labeled } else { render_region };
            render(&cells, &a.window, &a.slice).map_err(|e| Failure::Usage(e.to_string()))
        }
        Format::Csv => {
            let t = a.space.t();
            let mut s: Vec<String> = (1..=t).map(|j| format!("a{j}")).collect();
            s.push("member".into());
            let mut out = s.join(",") + "\n";
            for p in a.window.points() {
                let coords: Vec<String> = p.0.iter().map(|x| x.to_string()).collect();
                out.push_str(&format!("{},{}\n", coords.join(","), u8::from(cells.contains(&p))));
            }
            Ok(out)
        }
        Format::Json => {
            let v = json!({
                "space": a.space,
                "window": a.window,
                "mode": name,
                "d": a.d.as_ref().map(|d| d.degree().clone()),
                "cells": cells,
            });
            Ok(serde_json::to_string_pretty(&v).expect("serializable") + "\n")
        }
    }
}

fn render_table_ascii(t: &CohomologyTable) -> String {
    let m = t.m();
    let mut out = format!("# {} on {}\n", t.window(), t.space());
    let header: Vec<String> = (0..=m).map(|i| format!("h{i}")).collect();
    out.push_str(&format!("{:<16} {}\n", "a", header.join(" ")));
    for (a, row) in t.rows() {
        let cells: Vec<String> = row
            .iter()
            .map(|c| match c.known() {
                Some(x) => x.to_string(),
                None => "?".into(),
            })
            .collect();
        out.push_str(&format!("{:<16} {}\n", a.to_string(), cells.join(" ")));
    }
    out
}

fn cmd_cohomology(a: CohomologyArgs) -> Result<String, Failure> {
    let c = load_complex(&a.sheaf)?;
    let window = match (&a.twist, &a.window) {
        (Some(t), None) => Window::point(t.clone()),
        (None, Some(w)) => w.clone(),
        _ => return Err(Failure::Usage("give --twist or --window".into())),
    };
    check_window(c.space(), &window)?;
    let table = engine(&a.sheaf, &c)?.cohomology_table(&c, &window)?;
    Ok(match a.format {
        Format::Ascii => render_table_ascii(&table),
        Format::Csv => table.to_csv(),
        Format::Json => serde_json::to_string_pretty(&table.to_json()).expect("serializable") + "\n",
    })
}

fn cmd_split(a: SplitArgs) -> Result<(String, u8), Failure> {
    let c = load_complex(&a.sheaf)?;
    check_window(c.space(), &a.window)?;
    if a.d.degree().len() != c.space().t() {
        return Err(Failure::Usage("--d length does not match the space".into()));
    }
    let table = engine(&a.sheaf, &c)?.cohomology_table(&c, &a.window)?;
    let report = split_check_table(&table, &a.d, Assertions { torsion_free: a.assert_torsion_free });
    let mut summary = report.verdict.to_string();
    if report.mode != "theorem" {
        summary.push_str(" [classical-Horrocks mode, criterion differs]");
    } else if matches!(report.verdict, segre_split::SplitVerdict::Split { .. }) && !report.theorem_backed {
        summary.push_str(" [torsion freeness not asserted]");
    }
    eprintln!("{summary}");
    let out = serde_json::to_string_pretty(&report).expect("serializable") + "\n";
    Ok((out, report.exit_code() as u8))
}

fn cmd_tate(a: TateArgs) -> Result<String, Failure> {
    let table = if let Some(path) = &a.table {
        let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        let j: TableJson = serde_json::from_str(&text).map_err(|e| Failure::Schema(e.to_string()))?;
        CohomologyTable::from_json(j).map_err(|e| Failure::Schema(e.to_string()))?
    } else {
        let c = load_complex(&a.sheaf)?;
        let window = a.window.clone().ok_or_else(|| Failure::Usage("--window is required with a complex".into()))?;
        check_window(c.space(), &window)?;
        engine(&a.sheaf, &c)?.cohomology_table(&c, &window)?
    };
    let space = table.space().clone();
    let t = space.t();
    let degrees: Vec<MultiDegree> = match &a.b {
        Some(b) => vec![b.clone()],
        None => {
            let lo = table.window().lo() + &space.n_plus_one();
            let hi = table.window().hi().clone();
            match Window::new(lo, hi) {
                Ok(w) => w.points(),
                Err(_) => return Err(Failure::Window("no internal degree has its support inside the window".into())),
            }
        }
    };
    let zero_based = |v: &[usize], flag: &str| -> Result<Vec<usize>, Failure> {
        v.iter()
            .map(|&j| {
                if j >= 1 && j <= t {
                    Ok(j - 1)
                } else {
                    Err(Failure::Usage(format!("--{flag} {j} is not a factor in 1..{t}")))
                }
            })
            .collect()
    };
    let spec = StrandSpec::new(&zero_based(&a.less, "I")?, &zero_based(&a.equal, "J")?, &zero_based(&a.at_least, "K")?);
    let want = |c: Checks| a.checks == c || a.checks == Checks::All;
    let base = || -> Result<MultiDegree, Failure> {
        let c = a.c.clone().ok_or_else(|| Failure::Usage("--checks strand|corner needs --c".into()))?;
        space.check(&c).map_err(|e| Failure::Usage(e.to_string()))?;
        Ok(c)
    };
    let mut records = Vec::new();
    let mut lines = Vec::new();
    for b in &degrees {
        space.check(b).map_err(|e| Failure::Usage(e.to_string()))?;
        let profile = tate_term_dims(&table, b)?;
        let mut rec = json!({ "b": b, "dims": profile.dims });
        let mut line = profile.to_string();
        if want(Checks::Tate) {
            let v = tate_checksum(&table, b)?;
            rec["tate"] = json!(v.to_string());
            line.push_str(&format!(" tate={v}"));
        }
        if want(Checks::Strand) {
            let r = strand_checksum(&table, &base()?, &spec, b)?;
            rec["strand"] = json!({ "value": r.value.to_string(), "exactness_predicted": r.exactness_predicted });
            line.push_str(&format!(
                " strand={}{}",
                r.value,
                if r.exactness_predicted { "" } else { " (no exactness guarantee)" }
            ));
        }
        if want(Checks::Corner) {
            let v = corner_checksum(&table, &base()?, b)?;
            rec["corner"] = json!(v.to_string());
            line.push_str(&format!(" corner={v}"));
        }
        records.push(rec);
        lines.push(line);
    }
    Ok(match a.format {
        Format::Json => {
            serde_json::to_string_pretty(&json!({ "space": space, "profiles": records })).expect("serializable") + "\n"
        }
        _ => lines.join("\n") + "\n",
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Regions(a) => cmd_regions(a).map(|s| (s, 0)),
        Command::Cohomology(a) => cmd_cohomology(a).map(|s| (s, 0)),
        Command::SplitCheck(a) => cmd_split(a),
        Command::TateProfile(a) => cmd_tate(a).map(|s| (s, 0)),
    };
    match result {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
