//! `lapctl`: exact spectra, modal matrices and control inputs for threshold
//! graphs and cographs, with independent controllability checks.
//!
//! Exit codes: 0 success (or controllable), 1 verified not controllable,
//! 2 input error, 3 size guard exceeded.

mod report;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lapctl::cograph::{
    cotree_to_graph, eigen_decomposition, minimal_input_matrix, parse_cotree, Cotree,
};
use lapctl::graph::{laplacian, Graph};
use lapctl::oracle::{as_i64, min_controls_bruteforce, OracleError, MAX_BRUTE_FORCE_NODES};
use lapctl::threshold::{
    build_graph, degree_cells, degrees_from_sequence, modal_matrix, parse_sequence,
    select_controls, spectrum_distinct,
};
use lapctl::IntMatrix;
use serde::Serialize;
use thiserror::Error;

use report::*;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Guard(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Input(_) => 2,
            AppError::Guard(_) => 3,
            AppError::Internal(_) => 101,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "lapctl",
    version,
    about = "Laplacian controllability of threshold graphs and cographs"
)]
struct Cli {
    /// Emit a machine-readable JSON report.
    #[arg(long, global = true)]
    json: bool,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Emit the constructed graph in Graphviz DOT format instead of a report.
    #[arg(long, global = true)]
    dot: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analyze the threshold graph with the given construction sequence (e.g. 0101001).
    Threshold {
        sequence: String,
        #[arg(value_enum, default_value_t = ThresholdView::Verify)]
        view: ThresholdView,
        /// Exclude NODE from degree cell CELL (1-indexed, cells by increasing degree).
        #[arg(long = "exclude", value_name = "CELL=NODE", value_parser = parse_exclude)]
        exclude: Vec<(usize, usize)>,
    },
    /// Analyze the cograph given by a cotree expression, or @FILE containing one.
    Cograph {
        expr: String,
        #[arg(value_enum, default_value_t = CographView::Verify)]
        view: CographView,
    },
    /// Run the PBH and Kalman tests on a Laplacian and input matrix from files.
    Check {
        #[arg(long, value_name = "FILE")]
        laplacian: PathBuf,
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        /// Every eigenvalue of the Laplacian, comma separated (repeats allowed).
        #[arg(long, value_name = "LAMBDAS", allow_hyphen_values = true)]
        spectrum: String,
    },
    /// Exhaustive search for a minimum control-node set (n <= 12).
    MinControls {
        /// Construction sequence or cotree expression (or @FILE).
        target: String,
        /// Largest set size to try; defaults to n.
        #[arg(long)]
        limit: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ThresholdView {
    Degrees,
    Cells,
    Spectrum,
    Modal,
    Controls,
    Verify,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CographView {
    Graph,
    Spectrum,
    Modal,
    InputMatrix,
    Verify,
}

fn parse_exclude(s: &str) -> Result<(usize, usize), String> {
    let (cell, node) = s
        .split_once('=')
        .ok_or_else(|| format!("expected CELL=NODE, got {s:?}"))?;
    let cell = cell
        .trim()
        .parse()
        .map_err(|e| format!("bad cell in {s:?}: {e}"))?;
    let node = node
        .trim()
        .parse()
        .map_err(|e| format!("bad node in {s:?}: {e}"))?;
    Ok((cell, node))
}

/// Rendered result of one command.
struct Output {
    text: String,
    json: serde_json::Value,
    dot: Option<String>,
    exit: u8,
}

impl Output {
    fn new(report: &impl Serialize, text: String, dot: Option<String>, exit: u8) -> Output {
        let json = serde_json::to_value(report).expect("reports serialize");
        Output {
            text,
            json,
            dot,
            exit,
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> AppError {
    AppError::Input(e.to_string())
}

fn read_file(path: &Path) -> Result<String, AppError> {
    std::fs::read_to_string(path).map_err(|e| AppError::Input(format!("{}: {e}", path.display())))
}

/// Resolves `@file` arguments to the file's contents.
fn resolve_arg(arg: &str) -> Result<String, AppError> {
    match arg.strip_prefix('@') {
        Some(path) => Ok(read_file(Path::new(path))?.trim().to_string()),
        None => Ok(arg.to_string()),
    }
}

fn run_threshold(
    raw: &str,
    view: ThresholdView,
    exclude: &[(usize, usize)],
) -> Result<Output, AppError> {
    let seq = parse_sequence(raw).map_err(input_err)?;
    let n = seq.len();
    let g = build_graph(&seq);
    let view_name = format!("{view:?}").to_lowercase();
    let mut r = ThresholdReport {
        command: format!("threshold {raw} {view_name}"),
        input: raw.to_string(),
        view: view_name,
        n,
        ..Default::default()
    };
    let mut text = format!("threshold graph {seq} (n = {n})\n");
    let mut exit = 0;
    let show = |v: ThresholdView| {
        matches!(view, ThresholdView::Verify)
            || std::mem::discriminant(&view) == std::mem::discriminant(&v)
    };

    if show(ThresholdView::Degrees) {
        let d = degrees_from_sequence(&seq);
        let _ = writeln!(text, "degrees: {}", list(&d));
        r.degrees = Some(d);
    }
    if show(ThresholdView::Cells) || show(ThresholdView::Controls) {
        let cells = degree_cells(&seq);
        for (k, (c, d)) in cells.cells.iter().zip(&cells.degrees).enumerate() {
            let _ = writeln!(text, "cell {}: degree {d}: nodes {}", k + 1, list(c));
        }
        r.cells = Some(cells.cells);
    }
    if show(ThresholdView::Spectrum) || show(ThresholdView::Modal) {
        let e = modal_matrix(&seq);
        let _ = writeln!(text, "spectrum: {}", list(&e.eigenvalues));
        if show(ThresholdView::Spectrum) {
            if let Ok(distinct) = spectrum_distinct(&seq) {
                let parts: Vec<String> = distinct.iter().map(|(v, q)| format!("{v}^{q}")).collect();
                let _ = writeln!(text, "distinct nonzero: {}", parts.join(" "));
                r.spectrum_distinct = Some(distinct);
            }
        }
        if show(ThresholdView::Modal) {
            let _ = write!(text, "modal matrix:\n{}", e.modal);
            r.modal = Some(e.modal.clone());
        }
        r.spectrum = Some(e.eigenvalues);
    }
    if show(ThresholdView::Controls) {
        let choice: BTreeMap<usize, usize> = exclude.iter().copied().collect();
        if choice.len() != exclude.len() {
            return Err(AppError::Input(
                "a cell was given more than one --exclude".into(),
            ));
        }
        let sel =
            select_controls(&seq, (!choice.is_empty()).then_some(&choice)).map_err(input_err)?;
        let e = modal_matrix(&seq);
        let l = laplacian(&g);
        let groups = matches!(view, ThresholdView::Verify).then(|| e.groups());
        let verdicts = run_oracles(&l, &sel.input, &as_i64(&e.eigenvalues), groups.as_deref())?;
        let _ = writeln!(text, "excluded: {}", list(&sel.excluded));
        let _ = writeln!(text, "controls: {}", list(&sel.controls));
        let cols: Vec<String> = sel.controls.iter().map(|c| format!("e{c}")).collect();
        let _ = writeln!(text, "B = [{}]", cols.join(", "));
        let _ = writeln!(text, "{}", verdicts.describe());
        if !verdicts.controllable() {
            exit = 1;
        }
        if matches!(view, ThresholdView::Verify) {
            let lv = l.mul(&e.modal).expect("square");
            let mut diag = IntMatrix::zeros(n, n);
            for (j, &v) in e.eigenvalues.iter().enumerate() {
                diag.set(j, j, v);
            }
            let holds = lv == e.modal.mul(&diag).expect("square");
            let _ = writeln!(text, "L·V = V·diag(spectrum): {holds}");
            r.eigen_relation_holds = Some(holds);
            r.laplacian = Some(l);
            if !holds {
                return Err(AppError::Internal(
                    "modal matrix failed the eigen-relation".into(),
                ));
            }
        }
        r.controls = Some(sel.controls);
        r.excluded = Some(sel.excluded);
        r.input_matrix = Some(sel.input);
        r.verdicts = Some(verdicts);
    }
    let dot = g.to_dot(&format!("threshold {seq}"));
    Ok(Output::new(&r, text, Some(dot), exit))
}

fn parse_cotree_arg(raw: &str) -> Result<Cotree, AppError> {
    parse_cotree(&resolve_arg(raw)?).map_err(input_err)
}

fn run_cograph(raw: &str, view: CographView) -> Result<Output, AppError> {
    let tree = parse_cotree_arg(raw)?;
    let g = cotree_to_graph(&tree);
    let n = g.node_count();
    let verify = matches!(view, CographView::Verify);
    let view_name = match view {
        CographView::InputMatrix => "input-matrix".to_string(),
        v => format!("{v:?}").to_lowercase(),
    };
    let mut r = CographReport {
        command: format!("cograph {raw} {view_name}"),
        input: raw.to_string(),
        view: view_name,
        n,
        expr: tree.to_string(),
        ..Default::default()
    };
    let mut text = format!("cograph {tree} (n = {n})\n");
    let mut exit = 0;
    let l = laplacian(&g);

    if verify || matches!(view, CographView::Graph) {
        let edges: Vec<(usize, usize)> = g.edges().collect();
        let parts: Vec<String> = edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        let _ = writeln!(text, "edges ({}): {}", edges.len(), parts.join(" "));
        let _ = write!(text, "Laplacian:\n{l}");
        r.edges = Some(edges);
        r.laplacian = Some(l.clone());
    }
    let e = eigen_decomposition(&tree);
    if !matches!(view, CographView::Graph) {
        let _ = writeln!(text, "spectrum: {}", list(&e.spectrum()));
        let _ = writeln!(text, "max multiplicity: {}", e.max_multiplicity());
        r.spectrum = Some(e.spectrum());
        r.max_multiplicity = Some(e.max_multiplicity());
    }
    if verify || matches!(view, CographView::Modal) {
        for grp in &e.groups {
            let _ = write!(
                text,
                "lambda = {} (multiplicity {}):\n{}",
                grp.value,
                grp.multiplicity(),
                grp.basis
            );
        }
        r.groups = Some(
            e.groups
                .iter()
                .map(|grp| GroupReport {
                    lambda: grp.value,
                    multiplicity: grp.multiplicity(),
                    basis: columns_json(&grp.basis),
                })
                .collect(),
        );
        r.modal = Some(e.modal());
    }
    if verify || matches!(view, CographView::InputMatrix) {
        let input = minimal_input_matrix(&tree).map_err(input_err)?;
        let groups = verify.then_some(input.eigen.groups.as_slice());
        let verdicts = run_oracles(&l, &input.matrix, &as_i64(&e.spectrum()), groups)?;
        let _ = write!(text, "B^T:\n{}", input.matrix.transpose());
        let _ = writeln!(text, "{}", verdicts.describe());
        if !verdicts.controllable() {
            exit = 1;
        }
        r.input_matrix = Some(input.matrix);
        r.verdicts = Some(verdicts);
    }
    let dot = g.to_dot(&format!("cograph {tree}"));
    Ok(Output::new(&r, text, Some(dot), exit))
}

fn parse_spectrum(s: &str) -> Result<Vec<i64>, AppError> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<i64>()
                .map_err(|e| AppError::Input(format!("bad eigenvalue {t:?}: {e}")))
        })
        .collect()
}

fn run_check(lap_path: &Path, input_path: &Path, spectrum: &str) -> Result<Output, AppError> {
    let l = IntMatrix::parse_text(&read_file(lap_path)?)
        .map_err(|e| input_err(format!("{}: {e}", lap_path.display())))?;
    let b = IntMatrix::parse_text(&read_file(input_path)?)
        .map_err(|e| input_err(format!("{}: {e}", input_path.display())))?;
    let spectrum = parse_spectrum(spectrum)?;
    if !l.is_square() || b.rows() != l.rows() {
        return Err(AppError::Input(format!(
            "L is {}x{} and B is {}x{}; need L square and matching row counts",
            l.rows(),
            l.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let verdicts = run_oracles(&l, &b, &spectrum, None)?;
    let exit = if verdicts.controllable() { 0 } else { 1 };
    let text = format!(
        "n = {}, m = {}\n{}\n",
        l.rows(),
        b.cols(),
        verdicts.describe()
    );
    let r = CheckReport {
        command: "check".into(),
        laplacian_file: lap_path.display().to_string(),
        input_file: input_path.display().to_string(),
        spectrum,
        n: l.rows(),
        m: b.cols(),
        verdicts,
    };
    Ok(Output::new(&r, text, None, exit))
}

fn run_min_controls(raw: &str, limit: Option<usize>) -> Result<Output, AppError> {
    let target = resolve_arg(raw)?;
    let trimmed = target.trim();
    let is_cotree = trimmed.starts_with('(') || trimmed == "x";
    let (g, distinct_degrees, max_multiplicity): (Graph, _, _) = if is_cotree {
        let tree = parse_cotree(trimmed).map_err(input_err)?;
        let m = eigen_decomposition(&tree).max_multiplicity();
        (cotree_to_graph(&tree), None, Some(m))
    } else {
        let seq = parse_sequence(trimmed).map_err(input_err)?;
        (build_graph(&seq), Some(degree_cells(&seq).count()), None)
    };
    let n = g.node_count();
    let limit = limit.unwrap_or(n);
    let found = match min_controls_bruteforce(&g, limit) {
        Ok(found) => found,
        Err(OracleError::TooLarge { n }) => {
            return Err(AppError::Guard(format!(
                "graph has {n} nodes; exhaustive search is limited to {MAX_BRUTE_FORCE_NODES}"
            )))
        }
        Err(e) => return Err(AppError::Internal(e.to_string())),
    };
    let mut text =
        format!("n = {n}, searching sets of at most {limit} control nodes (Kalman rank oracle)\n");
    let exit = match &found {
        Some(set) => {
            let _ = writeln!(
                text,
                "minimum: {} node(s), first witness: {{{}}}",
                set.size,
                list(&set.nodes)
            );
            0
        }
        None => {
            let _ = writeln!(text, "no controllable set of at most {limit} nodes");
            1
        }
    };
    let procedure_size = distinct_degrees.map(|s| n - s);
    if let Some(p) = procedure_size {
        let _ = writeln!(text, "n - (number of distinct degrees) = {p}");
    }
    if let Some(m) = max_multiplicity {
        let _ = writeln!(text, "max eigenvalue multiplicity = {m}");
    }
    let r = MinControlsReport {
        command: format!("min-controls {raw}"),
        input: raw.to_string(),
        n,
        limit,
        size: found.as_ref().map(|s| s.size),
        witness: found.map(|s| s.nodes),
        oracle: "kalman",
        distinct_degrees,
        procedure_size,
        max_multiplicity,
    };
    Ok(Output::new(&r, text, Some(g.to_dot("min-controls")), exit))
}

fn dispatch(cli: &Cli) -> Result<Output, AppError> {
    match &cli.command {
        Command::Threshold {
            sequence,
            view,
            exclude,
        } => run_threshold(sequence, *view, exclude),
        Command::Cograph { expr, view } => run_cograph(expr, *view),
        Command::Check {
            laplacian,
            input,
            spectrum,
        } => run_check(laplacian, input, spectrum),
        Command::MinControls { target, limit } => run_min_controls(target, *limit),
    }
}

fn emit(cli: &Cli, body: &str) -> Result<(), AppError> {
    match &cli.out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| AppError::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = dispatch(&cli).and_then(|out| {
        let body = if cli.dot {
            out.dot.clone().ok_or_else(|| {
                AppError::Input("--dot needs a command that builds a graph".into())
            })?
        } else if cli.json {
            serde_json::to_string_pretty(&out.json).expect("json") + "\n"
        } else {
            out.text.clone()
        };
        emit(&cli, &body)?;
        Ok(out.exit)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
