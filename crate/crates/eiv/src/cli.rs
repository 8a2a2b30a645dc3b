//! Command-line surface: evaluate and rank experiments, compile designs,
//! run axiom checks, and draw three-outcome simplex/circle plots.
//!
//! Exit codes: 0 on success, 2 for input problems, 3 for numerical
//! failures, 4 when `axioms --strict` finds a violation.

use crate::axiomlab::{self, ValuationFunctional};
use crate::compiler::{self, AdaptiveTree, DynamicGame, TargetPartition};
use crate::config::{EvalConfig, PathPolicy};
use crate::geometry::{ConeUnion, GeometryError, Menu};
use crate::identification::{Experiment, IdentError, RandomizedExperiment};
use crate::prior::{PriorError, PriorModel};
use crate::valuation::{eiv, EivValue, IdentificationIndex, TableIndex, ValuationError};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;

#[derive(Debug)]
enum CliError {
    Input(String),
    Numerical(String),
    Violation,
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Violation => EXIT_VIOLATION,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Violation => write!(f, "axiom violation found"),
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::Lp(inner) => CliError::Numerical(inner.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<PriorError> for CliError {
    fn from(e: PriorError) -> Self {
        match e {
            PriorError::BadParams(_) | PriorError::ExactUnavailable => {
                CliError::Input(e.to_string())
            }
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<IdentError> for CliError {
    fn from(e: IdentError) -> Self {
        match e {
            IdentError::BadPartition(_)
            | IdentError::BadMerge(_)
            | IdentError::BadWeights(_)
            | IdentError::NoAtoms => CliError::Input(e.to_string()),
            IdentError::Geometry(g) => g.into(),
            IdentError::Prior(p) => p.into(),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<ValuationError> for CliError {
    fn from(e: ValuationError) -> Self {
        match e {
            ValuationError::UnknownCell(_)
            | ValuationError::BadTable(_)
            | ValuationError::BadProbVector(_) => CliError::Input(e.to_string()),
            ValuationError::Prior(p) => p.into(),
            ValuationError::Ident(i) => i.into(),
            ValuationError::Geometry(g) => g.into(),
            ValuationError::NullIdentification => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<compiler::CompileError> for CliError {
    fn from(e: compiler::CompileError) -> Self {
        match e {
            compiler::CompileError::Geometry(g) => g.into(),
            compiler::CompileError::Ident(i) => i.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<axiomlab::AxiomError> for CliError {
    fn from(e: axiomlab::AxiomError) -> Self {
        match e {
            axiomlab::AxiomError::UnknownCheck(_) => CliError::Input(e.to_string()),
            axiomlab::AxiomError::Functional(m) => CliError::Numerical(m),
            axiomlab::AxiomError::Ident(i) => i.into(),
            axiomlab::AxiomError::Compile(c) => c.into(),
            axiomlab::AxiomError::Geometry(g) => g.into(),
            axiomlab::AxiomError::Valuation(v) => v.into(),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "eiv",
    about = "Value choice experiments by what they can identify about a linear-utility subject",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every run that touches a prior.
#[derive(Args, Clone)]
struct RunFlags {
    /// Override the prior file's sampler seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte-Carlo sample count.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Require the exact measure oracle (three-outcome uniform prior only).
    #[arg(long)]
    exact: bool,
    /// Comparison tolerance override.
    #[arg(long)]
    tol: Option<f64>,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunFlags {
    fn config(&self) -> EvalConfig {
        let mut cfg = EvalConfig::default().with_samples(self.samples);
        if self.exact {
            cfg.path = PathPolicy::RequireExact;
        }
        if let Some(t) = self.tol {
            cfg.exact_tol = t;
        }
        cfg
    }

    fn tolerance(&self) -> f64 {
        self.tol.unwrap_or(1e-6)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Expected identification value of an experiment file.
    Evaluate {
        /// Experiment or randomized-experiment JSON.
        experiment: PathBuf,
        /// Prior JSON.
        prior: PathBuf,
        /// Index JSON (defaults to the entropy index).
        #[arg(long)]
        index: Option<PathBuf>,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Value every experiment JSON in a directory and emit a CSV ranking.
    Rank {
        dir: PathBuf,
        prior: PathBuf,
        #[arg(long)]
        index: Option<PathBuf>,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Compile a battery of menus into one static experiment.
    CompileBatch {
        /// JSON array of menus.
        menus: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compile an adaptive tree into one static experiment.
    CompileAdaptive {
        tree: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compile a dynamic game into a randomized experiment.
    CompileGame {
        game: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Realize a target partition of utility space as an experiment.
    RealizePartition {
        target: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run axiom checks against a valuation functional.
    Axioms {
        prior: PathBuf,
        /// Comma-separated check names, or "all".
        #[arg(long, default_value = "all")]
        checks: String,
        /// Index JSON defining the functional (defaults to entropy).
        #[arg(long)]
        index: Option<PathBuf>,
        /// Demonstration switch: bump the first cell's index value by this
        /// amount, deliberately breaking structural invariance.
        #[arg(long)]
        perturb: Option<f64>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Exit with status 4 if any check fails.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Draw the menu in the simplex and the identified arcs on the utility
    /// circle (three outcomes only).
    Plot {
        experiment: PathBuf,
        prior: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
}

/// Entry point used by the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Evaluate { experiment, prior, index, run } => {
            let pi = load_randomized(&experiment)?;
            let prior = load_prior(&prior, run.seed)?;
            let index = load_index(index.as_deref())?;
            let cfg = run.config();
            let value = eiv(&pi, &index, &prior, &cfg)?;
            print_value_table(&value);
            emit(&run.out, &ValueReport::from(&value))?;
            Ok(())
        }
        Command::Rank { dir, prior, index, run } => {
            let prior = load_prior(&prior, run.seed)?;
            let index = load_index(index.as_deref())?;
            let cfg = run.config();
            let mut rows = Vec::new();
            let mut names: Vec<PathBuf> = std::fs::read_dir(&dir)
                .map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?
                .filter_map(|r| r.ok().map(|d| d.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            names.sort();
            for path in names {
                let pi = load_randomized(&path)?;
                let v = eiv(&pi, &index, &prior, &cfg)?;
                let file = path
                    .file_name()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                rows.push((file, v.value, v.std_error));
            }
            rows.sort_by(|a, b| {
                b.1.partial_cmp(&a.1)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then_with(|| a.0.cmp(&b.0))
            });
            let mut csv = String::from("file,value,std_error\n");
            for (file, value, se) in rows {
                csv.push_str(&format!("{file},{},{}\n", fmt17(value), fmt17(se)));
            }
            match &run.out {
                Some(path) => write_file(path, csv.as_bytes())?,
                None => print!("{csv}"),
            }
            Ok(())
        }
        Command::CompileBatch { menus, out } => {
            let menus: Vec<Menu> = load_json(&menus)?;
            let compiled = compiler::compile_batch(&menus)?;
            emit(&out, &compiled.experiment)?;
            Ok(())
        }
        Command::CompileAdaptive { tree, out } => {
            let tree: AdaptiveTree = load_json(&tree)?;
            let compiled = compiler::compile_adaptive(&tree)?;
            emit(&out, &compiled)?;
            Ok(())
        }
        Command::CompileGame { game, out } => {
            let game: DynamicGame = load_json(&game)?;
            let compiled = compiler::compile_game(&game)?;
            let report = GameReport {
                schema: crate::identification::SCHEMA_TAG,
                randomized: compiled.randomized,
                strategy_cells: compiled.strategy_cells,
            };
            emit(&out, &report)?;
            Ok(())
        }
        Command::RealizePartition { target, out } => {
            let dto: TargetDto = load_json(&target)?;
            let target = TargetPartition::from_face_groups(dto.generators, dto.groups)?;
            let realized = compiler::realize_partition(&target)?;
            let report = RealizeReport {
                schema: crate::identification::SCHEMA_TAG,
                experiment: realized.experiment,
                assignment: realized.assignment,
            };
            emit(&out, &report)?;
            Ok(())
        }
        Command::Axioms { prior, checks, index, perturb, trials, strict, run } => {
            let prior = load_prior(&prior, run.seed)?;
            let cfg = run.config();
            let tol = run.tolerance();
            let functional = build_functional(index.as_deref(), perturb, &prior, &cfg, tol)?;
            let seed = run.seed.unwrap_or(prior.seed());
            let names: Vec<&str> = if checks == "all" {
                axiomlab::CHECK_NAMES.to_vec()
            } else {
                checks.split(',').map(str::trim).collect()
            };
            let mut reports = Vec::new();
            let mut any_violation = false;
            for name in names {
                let report = axiomlab::run_check(name, &functional, trials, seed)?;
                eprintln!(
                    "{}: {} ({} checked / {} trials)",
                    report.axiom, report.verdict, report.checked, report.trials
                );
                any_violation |= !report.passed();
                reports.push(report);
            }
            emit(&run.out, &reports)?;
            if strict && any_violation {
                return Err(CliError::Violation);
            }
            Ok(())
        }
        Command::Plot { experiment, prior, out, seed, samples } => {
            let e: Experiment = load_json(&experiment)?;
            if e.menu().dim() != 3 {
                return Err(CliError::Input(format!(
                    "plotting needs three outcomes, menu has {}",
                    e.menu().dim()
                )));
            }
            let prior = load_prior(&prior, seed)?;
            let cfg = EvalConfig::default().with_samples(samples);
            let svg = plot::render(&e, &prior, &cfg)?;
            let path = out.unwrap_or_else(|| PathBuf::from("plot.svg"));
            write_file(&path, svg.as_bytes())?;
            Ok(())
        }
    }
}

// --- loading --------------------------------------------------------------

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// An experiment file may hold a plain experiment or a randomized one.
fn load_randomized(path: &Path) -> Result<RandomizedExperiment, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if let Ok(pi) = serde_json::from_str::<RandomizedExperiment>(&text) {
        return Ok(pi);
    }
    let e: Experiment = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(RandomizedExperiment::degenerate(e))
}

fn load_prior(path: &Path, seed_override: Option<u64>) -> Result<PriorModel, CliError> {
    let prior: PriorModel = load_json(path)?;
    Ok(match seed_override {
        Some(seed) => prior.with_seed(seed),
        None => prior,
    })
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum IndexDto {
    Entropy,
    Hypothesis {
        w_star: ConeUnion,
    },
    Table {
        cells: Vec<ConeUnion>,
        values: Vec<f64>,
        #[serde(default)]
        unions: Vec<UnionValue>,
    },
    BeliefFree {
        cells: Vec<ConeUnion>,
        values: Vec<f64>,
        #[serde(default)]
        unions: Vec<UnionValue>,
    },
}

#[derive(Deserialize)]
struct UnionValue {
    cells: Vec<usize>,
    value: f64,
}

fn table_from_parts(
    cells: Vec<ConeUnion>,
    values: Vec<f64>,
    unions: Vec<UnionValue>,
) -> Result<TableIndex, CliError> {
    if values.len() != cells.len() {
        return Err(CliError::Input(format!(
            "{} cells but {} values",
            cells.len(),
            values.len()
        )));
    }
    let mut map = BTreeMap::new();
    for (i, v) in values.iter().enumerate() {
        map.insert(vec![i], *v);
    }
    for u in unions {
        let mut key = u.cells;
        key.sort_unstable();
        map.insert(key, u.value);
    }
    // learning nothing is worth nothing
    map.insert((0..cells.len()).collect(), 0.0);
    Ok(TableIndex::new(cells, map)?)
}

fn load_index(path: Option<&Path>) -> Result<IdentificationIndex, CliError> {
    let Some(path) = path else {
        return Ok(IdentificationIndex::Entropy);
    };
    let dto: IndexDto = load_json(path)?;
    Ok(match dto {
        IndexDto::Entropy => IdentificationIndex::Entropy,
        IndexDto::Hypothesis { w_star } => IdentificationIndex::HypothesisTest { w_star },
        IndexDto::Table { cells, values, unions } => {
            IdentificationIndex::Table(table_from_parts(cells, values, unions)?)
        }
        IndexDto::BeliefFree { cells, values, unions } => {
            IdentificationIndex::belief_free_nu(table_from_parts(cells, values, unions)?)?
        }
    })
}

fn build_functional(
    index_path: Option<&Path>,
    perturb: Option<f64>,
    prior: &PriorModel,
    cfg: &EvalConfig,
    tol: f64,
) -> Result<ValuationFunctional, CliError> {
    if let Some(bump) = perturb {
        return Ok(axiomlab::perturbed_entropy_functional(
            prior.clone(),
            cfg.clone(),
            tol,
            bump,
        ));
    }
    let index = load_index(index_path)?;
    let name = format!("{index:?}");
    Ok(axiomlab::index_functional(name, index, prior.clone(), cfg.clone(), tol))
}

// --- output ---------------------------------------------------------------

#[derive(Serialize)]
struct ValueReport<'a> {
    schema: &'static str,
    value: f64,
    std_error: f64,
    atoms: &'a Vec<crate::valuation::AtomValue>,
}

impl<'a> From<&'a EivValue> for ValueReport<'a> {
    fn from(v: &'a EivValue) -> Self {
        ValueReport {
            schema: crate::identification::SCHEMA_TAG,
            value: v.value,
            std_error: v.std_error,
            atoms: &v.atoms,
        }
    }
}

#[derive(Serialize)]
struct GameReport {
    schema: &'static str,
    randomized: RandomizedExperiment,
    strategy_cells: Vec<Vec<Vec<String>>>,
}

#[derive(Serialize)]
struct RealizeReport {
    schema: &'static str,
    experiment: Experiment,
    assignment: Vec<usize>,
}

#[derive(Deserialize)]
struct TargetDto {
    generators: Vec<Menu>,
    groups: Vec<Vec<usize>>,
}

/// Human-readable breakdown, kept on stderr so stdout stays pure JSON.
fn print_value_table(v: &EivValue) {
    eprintln!("value      {}", fmt17(v.value));
    eprintln!("std_error  {}", fmt17(v.std_error));
    for (i, atom) in v.atoms.iter().enumerate() {
        eprintln!(
            "atom {i}  weight {:.6}  value {}",
            atom.weight,
            fmt17(atom.value)
        );
        for c in &atom.cells {
            eprintln!(
                "  cell {:>2}  mass {:.9}  index {:.9}  contribution {:.9}",
                c.cell, c.mass, c.tau, c.contribution
            );
        }
    }
}

/// Render the simplex-and-circle picture of an experiment (three outcomes
/// only) as an SVG document.
pub fn render_plot(
    e: &Experiment,
    prior: &PriorModel,
    cfg: &EvalConfig,
) -> Result<String, String> {
    if e.menu().dim() != 3 {
        return Err(format!(
            "plotting needs three outcomes, menu has {}",
            e.menu().dim()
        ));
    }
    plot::render(e, prior, cfg).map_err(|err| err.to_string())
}

/// Serialize to JSON with every float carrying 17 significant digits, so
/// outputs are byte-identical across platforms.
pub fn to_json_17<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Digits17);
    value.serialize(&mut ser).expect("JSON serialization");
    String::from_utf8(out).expect("JSON is UTF-8")
}

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Clone, Copy)]
struct Digits17;

impl serde_json::ser::Formatter for Digits17 {
    fn write_f64<W: std::io::Write + ?Sized>(&mut self, w: &mut W, value: f64) -> std::io::Result<()> {
        write!(w, "{value:.16e}")
    }
}

fn emit<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<(), CliError> {
    let json = to_json_17(value);
    match out {
        Some(path) => write_file(path, json.as_bytes()),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut f = std::fs::File::create(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    f.write_all(bytes)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(())
}

// --- plotting -------------------------------------------------------------

mod plot {
    use super::*;
    use crate::identification::identified_family;
    use crate::prior::arc;
    use std::f64::consts::TAU;

    const W: f64 = 600.0;
    const H: f64 = 520.0;
    const PALETTE: [&str; 8] = [
        "#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860", "#da8bc3", "#8c8c8c",
    ];

    /// Ternary position of a three-outcome lottery.
    fn ternary(p: &[f64]) -> (f64, f64) {
        // corners: first outcome top, second bottom-left, third bottom-right
        let top = (160.0, 70.0);
        let left = (40.0, 290.0);
        let right = (280.0, 290.0);
        (
            p[0] * top.0 + p[1] * left.0 + p[2] * right.0,
            p[0] * top.1 + p[1] * left.1 + p[2] * right.1,
        )
    }

    fn circle_point(cx: f64, cy: f64, r: f64, theta: f64) -> (f64, f64) {
        (cx + r * theta.cos(), cy - r * theta.sin())
    }

    pub fn render(
        e: &Experiment,
        prior: &PriorModel,
        cfg: &EvalConfig,
    ) -> Result<String, CliError> {
        let fam = identified_family(e, prior, cfg)?;
        let mut svg = String::new();
        svg.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
        ));
        svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

        // simplex frame
        let corners = [ternary(&[1.0, 0.0, 0.0]), ternary(&[0.0, 1.0, 0.0]), ternary(&[0.0, 0.0, 1.0])];
        svg.push_str(&format!(
            "<polygon points=\"{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}\" fill=\"none\" stroke=\"#999\" stroke-width=\"1\"/>\n",
            corners[0].0, corners[0].1, corners[1].0, corners[1].1, corners[2].0, corners[2].1
        ));

        // hull of the menu
        let ext = crate::geometry::extreme_indices(e.menu())?;
        if ext.len() >= 3 {
            let mut pts: Vec<(f64, f64)> =
                ext.iter().map(|&i| ternary(e.menu().point(i).coords())).collect();
            let cx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
            let cy = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
            pts.sort_by(|a, b| {
                let aa = (a.1 - cy).atan2(a.0 - cx);
                let bb = (b.1 - cy).atan2(b.0 - cx);
                aa.partial_cmp(&bb).unwrap_or(std::cmp::Ordering::Equal)
            });
            let path: Vec<String> = pts.iter().map(|p| format!("{:.2},{:.2}", p.0, p.1)).collect();
            svg.push_str(&format!(
                "<polygon points=\"{}\" fill=\"#4c72b0\" fill-opacity=\"0.15\" stroke=\"none\"/>\n",
                path.join(" ")
            ));
        }

        // menu points colored by cell
        for (k, cell) in e.partition().iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            for &i in cell {
                let (x, y) = ternary(e.menu().point(i).coords());
                svg.push_str(&format!(
                    "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"4\" fill=\"{color}\"/>\n"
                ));
            }
        }
        svg.push_str("<text x=\"160\" y=\"320\" text-anchor=\"middle\" font-size=\"12\" fill=\"#333\">menu in the simplex</text>\n");

        // utility circle with one wedge per positive cell
        let (cx, cy, r) = (440.0, 180.0, 110.0);
        svg.push_str(&format!(
            "<circle cx=\"{cx}\" cy=\"{cy}\" r=\"{r}\" fill=\"none\" stroke=\"#999\"/>\n"
        ));
        for (k, (w, m)) in fam.cells.iter().enumerate() {
            if m.value <= 1e-12 {
                continue;
            }
            let color = PALETTE[k % PALETTE.len()];
            let arcs = arc::union_arcs(w);
            for &(lo, hi) in arcs.segments() {
                if hi - lo >= TAU - 1e-9 {
                    svg.push_str(&format!(
                        "<circle cx=\"{cx}\" cy=\"{cy}\" r=\"{r}\" fill=\"{color}\" fill-opacity=\"0.5\"/>\n"
                    ));
                    continue;
                }
                let (x0, y0) = circle_point(cx, cy, r, lo);
                let (x1, y1) = circle_point(cx, cy, r, hi);
                let large = if hi - lo > TAU / 2.0 { 1 } else { 0 };
                svg.push_str(&format!(
                    "<path d=\"M {cx:.2} {cy:.2} L {x0:.2} {y0:.2} A {r} {r} 0 {large} 0 {x1:.2} {y1:.2} Z\" fill=\"{color}\" fill-opacity=\"0.5\" stroke=\"{color}\"/>\n"
                ));
            }
            // label at the first segment's midpoint
            if let Some(&(lo, hi)) = arcs.segments().first() {
                let mid = (lo + hi) / 2.0;
                let (lx, ly) = circle_point(cx, cy, r * 0.62, mid);
                svg.push_str(&format!(
                    "<text x=\"{lx:.2}\" y=\"{ly:.2}\" text-anchor=\"middle\" font-size=\"11\" fill=\"#222\">{:.3}</text>\n",
                    m.value
                ));
            }
        }
        svg.push_str(&format!(
            "<text x=\"{cx}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"12\" fill=\"#333\">identified cells on the utility circle</text>\n",
            cy + r + 30.0
        ));
        svg.push_str("</svg>\n");
        Ok(svg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_floats_carry_seventeen_digits() {
        #[derive(Serialize)]
        struct S {
            x: f64,
        }
        let js = to_json_17(&S { x: 1.0 / 3.0 });
        assert_eq!(js, "{\"x\":3.3333333333333331e-1}");
    }

    #[test]
    fn table_index_requires_matching_lengths() {
        let menu = Menu::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        let cells: Vec<ConeUnion> = (0..3)
            .map(|i| ConeUnion::from_menu_cell(&menu, &[i]))
            .collect();
        assert!(table_from_parts(cells, vec![0.1, 0.2], vec![]).is_err());
    }
}
