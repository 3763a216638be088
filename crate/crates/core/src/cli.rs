//! Command-line front end.
//!
//! Exit codes: 0 success or affirmative verdict, 3 negative verdict
//! (recovery fails, schemes differ), 2 usage or input error, 1 internal
//! invariant violation.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::analysis::{self, EquilibriumSet, RecoveryEntry, RecoveryReport, Verdict, FLOAT_TOL};
use crate::error::Error;
use crate::game::{BimatrixGame, PayoffPair};
use crate::rational::Rational;
use crate::schemes::{
    expected_payoff, expected_payoff_exact, final_state, induce_bimatrix, mixed_value, payoff_operator, InducedGame,
    MixedStrategy, OperatorFamily, SchemeKind,
};
use crate::state::{parse_ket, DensityOperator};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NEGATIVE: i32 = 3;

/// Environment variable overriding the float comparison tolerance.
pub const TOL_ENV: &str = "MWGAMES_FLOAT_TOL";

#[derive(Parser, Debug)]
#[command(name = "mwgames", version, about = "Quantum bimatrix games in the Marinatto-Weber protocol")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the bimatrix induced by an initial state and operator families.
    Induce(CommonArgs),
    /// Check that every basis initial state reproduces the game up to cyclic relabeling.
    CheckRecovery(CommonArgs),
    /// Compare the induced games of two schemes cell by cell.
    Compare(CompareArgs),
    /// Pure and mixed Nash equilibria of a game (or of an induced game).
    Equilibria(CommonArgs),
    /// Expected payoff pair of a mixed operator profile.
    Payoff(PayoffArgs),
    /// The 3x3 transposition scheme at |01>, with its recovery verdict.
    DemoFlaw(OutputArgs),
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Game file: {"rows": n, "cols": m, "payoffs": [[[a, b], ...], ...]}
    #[arg(long, value_name = "PATH")]
    pub game: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write output here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct StateArgs {
    /// Initial state as a ket expression, e.g. "(|00> + |11>)/sqrt(2)".
    #[arg(long, value_name = "EXPR", conflicts_with = "state_file")]
    pub state: Option<String>,
    /// Initial state file: {"diag": [...]} or {"matrix": [[{"re": x, "im": y}, ...], ...]}.
    #[arg(long, value_name = "PATH")]
    pub state_file: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SchemeArgs {
    /// Scheme for both players: gmw (cyclic shifts), it3 or mw2.
    #[arg(long, value_name = "ID")]
    pub scheme: Option<String>,
    #[arg(long, value_name = "ID")]
    pub scheme_row: Option<String>,
    #[arg(long, value_name = "ID")]
    pub scheme_col: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub scheme: SchemeArgs,
}

#[derive(Args, Debug, Clone)]
pub struct CompareArgs {
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub state: StateArgs,
    /// First scheme (both players).
    #[arg(long, value_name = "ID", default_value = "gmw")]
    pub scheme_a: String,
    /// Second scheme (both players).
    #[arg(long, value_name = "ID", default_value = "it3")]
    pub scheme_b: String,
}

#[derive(Args, Debug, Clone)]
pub struct PayoffArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Row player's operator probabilities, e.g. "1/2,1/2,0" or '["1/2","1/2","0"]'.
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    pub p: String,
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    pub q: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Structured,
}

/// Why a subcommand could not produce its output.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or input files (exit 2).
    Input(String),
    /// An internal consistency check failed (exit 1).
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

pub type CmdResult = std::result::Result<(String, i32), Failure>;

/// Parses `args` (including the program name) and runs one subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = stdout.write_all(rendered.as_bytes());
            } else {
                let _ = stderr.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    let out_path = match &config.command {
        Command::Induce(c) | Command::CheckRecovery(c) | Command::Equilibria(c) => c.output.out.clone(),
        Command::Compare(c) => c.output.out.clone(),
        Command::Payoff(c) => c.common.output.out.clone(),
        Command::DemoFlaw(c) => c.out.clone(),
    };
    let result = match &config.command {
        Command::Induce(c) => cmd_induce(c),
        Command::CheckRecovery(c) => cmd_check_recovery(c),
        Command::Compare(c) => cmd_compare(c),
        Command::Equilibria(c) => cmd_equilibria(c),
        Command::Payoff(c) => cmd_payoff(c),
        Command::DemoFlaw(c) => cmd_demo_flaw(c),
    };
    match result {
        Ok((text, code)) => {
            let written = match &out_path {
                Some(path) => std::fs::write(path, &text).map_err(|e| format!("--out {}: {e}", path.display())),
                None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => code,
                Err(msg) => {
                    let _ = writeln!(stderr, "error: {msg}");
                    EXIT_INPUT
                }
            }
        }
        Err(Failure::Input(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_INPUT
        }
        Err(Failure::Internal(msg)) => {
            let _ = writeln!(stderr, "internal error: {msg}");
            EXIT_INTERNAL
        }
    }
}

fn float_tol() -> std::result::Result<f64, Failure> {
    match std::env::var(TOL_ENV) {
        Ok(v) => match v.trim().parse::<f64>() {
            Ok(t) if t.is_finite() && t >= 0.0 => Ok(t),
            _ => Err(Failure::Input(format!("{TOL_ENV}={v:?} is not a non-negative number"))),
        },
        Err(_) => Ok(FLOAT_TOL),
    }
}

fn load_game(path: &Path) -> std::result::Result<BimatrixGame, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("--game {}: {e}", path.display())))?;
    BimatrixGame::parse(&text).map_err(|e| Failure::Input(format!("--game {}: {e}", path.display())))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    diag: Option<Vec<Rational>>,
    matrix: Option<Vec<Vec<ComplexEntry>>>,
}

#[derive(Deserialize)]
struct ComplexEntry {
    re: f64,
    #[serde(default)]
    im: f64,
}

/// Resolves the initial state; `|00>` when none is given.
fn load_state(args: &StateArgs, rows: usize, cols: usize) -> std::result::Result<(DensityOperator, String), Failure> {
    if let Some(expr) = &args.state {
        let s = parse_ket(expr, rows, cols).map_err(|e| Failure::Input(format!("--state {expr:?}: {e}")))?;
        return Ok((DensityOperator::from_pure(&s), expr.clone()));
    }
    if let Some(path) = &args.state_file {
        let ctx = |e: String| Failure::Input(format!("--state-file {}: {e}", path.display()));
        let text = std::fs::read_to_string(path).map_err(|e| ctx(e.to_string()))?;
        let file: StateFile = serde_json::from_str(&text).map_err(|e| ctx(e.to_string()))?;
        let rho = match (file.diag, file.matrix) {
            (Some(diag), None) => DensityOperator::from_exact_diagonal(rows, cols, diag).map_err(|e| ctx(e.to_string()))?,
            (None, Some(matrix)) => {
                let d = rows * cols;
                if matrix.len() != d || matrix.iter().any(|r| r.len() != d) {
                    return Err(ctx(format!("matrix must be {d}x{d}")));
                }
                let m = DMatrix::from_fn(d, d, |a, b| Complex64::new(matrix[a][b].re, matrix[a][b].im));
                DensityOperator::new(rows, cols, m).map_err(|e| ctx(e.to_string()))?
            }
            _ => return Err(ctx("expected exactly one of \"diag\" or \"matrix\"".into())),
        };
        let label = rho.describe();
        return Ok((rho, label));
    }
    let rho = DensityOperator::from_pure(&crate::state::basis_state(0, 0, rows, cols)?);
    Ok((rho, "|00>".to_string()))
}

fn scheme_kind(flag: &str, value: &str) -> std::result::Result<SchemeKind, Failure> {
    value.parse().map_err(|e: Error| Failure::Input(format!("--{flag}: {e}")))
}

fn families(args: &SchemeArgs, rows: usize, cols: usize) -> std::result::Result<(OperatorFamily, OperatorFamily), Failure> {
    let both = args.scheme.as_deref().map(|s| scheme_kind("scheme", s)).transpose()?.unwrap_or_default();
    let row = match &args.scheme_row {
        Some(s) => scheme_kind("scheme-row", s)?,
        None => both,
    };
    let col = match &args.scheme_col {
        Some(s) => scheme_kind("scheme-col", s)?,
        None => both,
    };
    let fr = row.family(rows).map_err(|e| Failure::Input(format!("row scheme: {e}")))?;
    let fc = col.family(cols).map_err(|e| Failure::Input(format!("column scheme: {e}")))?;
    Ok((fr, fc))
}

fn parse_strategy(flag: &str, text: &str) -> std::result::Result<MixedStrategy, Failure> {
    let ctx = |e: String| Failure::Input(format!("--{flag} {text:?}: {e}"));
    let probs: Vec<Rational> = if text.trim_start().starts_with('[') {
        serde_json::from_str(text).map_err(|e| ctx(e.to_string()))?
    } else {
        text.split(',').map(|s| s.parse::<Rational>()).collect::<Result<_, _>>().map_err(|e| ctx(e.to_string()))?
    };
    MixedStrategy::new(probs).map_err(|e| ctx(e.to_string()))
}

fn structured<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn render_cell(p: &PayoffPair, exact: bool) -> String {
    if exact {
        format!("({}, {})", p.row, p.col)
    } else {
        format!("({:.9}, {:.9})", p.row.to_f64(), p.col.to_f64())
    }
}

/// Aligned grid with operator labels on both axes.
pub fn render_grid(g: &BimatrixGame, row_labels: &[String], col_labels: &[String], exact: bool) -> String {
    let cells: Vec<Vec<String>> =
        (0..g.rows()).map(|i| g.row(i).iter().map(|p| render_cell(p, exact)).collect()).collect();
    let label_w = row_labels.iter().map(String::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..g.cols())
        .map(|j| cells.iter().map(|r| r[j].len()).chain([col_labels[j].len()]).max().unwrap_or(0))
        .collect();
    let mut out = format!("{:label_w$}", "");
    for (j, l) in col_labels.iter().enumerate() {
        let _ = write!(out, "  {:>w$}", l, w = widths[j]);
    }
    out.push('\n');
    for (i, row) in cells.iter().enumerate() {
        let _ = write!(out, "{:<label_w$}", row_labels[i]);
        for (j, c) in row.iter().enumerate() {
            let _ = write!(out, "  {:>w$}", c, w = widths[j]);
        }
        out.push('\n');
    }
    out
}

fn index_labels(n: usize) -> Vec<String> {
    (0..n).map(|k| k.to_string()).collect()
}

fn render_induced(ig: &InducedGame) -> String {
    let p = &ig.provenance;
    let mut out = format!(
        "induced game  schemes {}/{}  state {}  {}\n",
        p.row_family,
        p.col_family,
        p.state,
        if p.exact { "exact" } else { "float" }
    );
    out.push_str(&render_grid(&ig.game, &ig.row_labels, &ig.col_labels, p.exact));
    out
}

fn render_entry(e: &RecoveryEntry) -> String {
    match (e.verdict, e.shift) {
        (Verdict::Pass, Some((r, c))) => format!("|{}{}>  pass  shift ({r}, {c})", e.i, e.j),
        _ => {
            let missing: Vec<String> = e.missing.iter().map(ToString::to_string).collect();
            format!("|{}{}>  FAIL  missing outcomes {{{}}}", e.i, e.j, missing.join(", "))
        }
    }
}

fn render_recovery(rep: &RecoveryReport) -> String {
    let mut out = format!(
        "classical recovery  {}x{}  schemes {}/{}\n",
        rep.rows, rep.cols, rep.row_family, rep.col_family
    );
    for e in &rep.entries {
        out.push_str(&render_entry(e));
        out.push('\n');
    }
    let _ = writeln!(out, "verdict: {}", if rep.all_pass() { "recovered" } else { "NOT recovered" });
    out
}

fn render_equilibria(set: &EquilibriumSet) -> String {
    let mut out = String::from("pure equilibria:");
    if set.pure.is_empty() {
        out.push_str(" none");
    }
    for (i, j) in &set.pure {
        let _ = write!(out, " ({i}, {j})");
    }
    out.push('\n');
    out.push_str("mixed equilibria:");
    if set.mixed.is_empty() {
        out.push_str(" none");
    }
    out.push('\n');
    for e in &set.mixed {
        let _ = writeln!(out, "  p = {}  q = {}  value {}", e.p, e.q, e.value);
    }
    if set.degenerate {
        out.push_str("note: degenerate game; equilibrium components may be continua (one representative listed)\n");
    }
    out
}

pub fn cmd_induce(args: &CommonArgs) -> CmdResult {
    let g = load_game(&args.output.game)?;
    let (rho, label) = load_state(&args.state, g.rows(), g.cols())?;
    let (fr, fc) = families(&args.scheme, g.rows(), g.cols())?;
    let mut ig = induce_bimatrix(&g, &rho, &fr, &fc)?;
    ig.provenance.state = label;
    let text = match args.output.format {
        Format::Table => render_induced(&ig),
        Format::Structured => structured(&ig),
    };
    Ok((text, EXIT_OK))
}

pub fn cmd_check_recovery(args: &CommonArgs) -> CmdResult {
    let g = load_game(&args.output.game)?;
    let (fr, fc) = families(&args.scheme, g.rows(), g.cols())?;
    let rep = analysis::check_recovery(&g, &fr, &fc)?;
    let text = match args.output.format {
        Format::Table => render_recovery(&rep),
        Format::Structured => structured(&rep),
    };
    Ok((text, if rep.all_pass() { EXIT_OK } else { EXIT_NEGATIVE }))
}

pub fn cmd_compare(args: &CompareArgs) -> CmdResult {
    let g = load_game(&args.output.game)?;
    let (rho, label) = load_state(&args.state, g.rows(), g.cols())?;
    let a = scheme_kind("scheme-a", &args.scheme_a)?;
    let b = scheme_kind("scheme-b", &args.scheme_b)?;
    let fam = |k: SchemeKind| -> std::result::Result<(OperatorFamily, OperatorFamily), Failure> {
        Ok((k.family(g.rows())?, k.family(g.cols())?))
    };
    let (ar, ac) = fam(a)?;
    let (br, bc) = fam(b)?;
    let mut rep = analysis::compare_schemes(&g, &rho, (&ar, &ac), (&br, &bc), float_tol()?)?;
    rep.state = label;
    let text = match args.output.format {
        Format::Table => {
            let mut out = format!(
                "scheme A {}/{}  vs  scheme B {}/{}  state {}  {}\n",
                rep.scheme_a.0,
                rep.scheme_a.1,
                rep.scheme_b.0,
                rep.scheme_b.1,
                rep.state,
                if rep.exact { "exact" } else { "float" }
            );
            out.push_str("A:\n");
            out.push_str(&render_grid(&rep.game_a, &ar.labels(), &ac.labels(), rep.exact));
            out.push_str("B:\n");
            out.push_str(&render_grid(&rep.game_b, &br.labels(), &bc.labels(), rep.exact));
            for d in &rep.differences {
                let _ = writeln!(out, "differs at ({}, {}): {} vs {}", d.cell.0, d.cell.1, d.a, d.b);
            }
            let _ = writeln!(out, "verdict: {}", if rep.equal { "identical" } else { "different" });
            out
        }
        Format::Structured => structured(&rep),
    };
    Ok((text, if rep.equal { EXIT_OK } else { EXIT_NEGATIVE }))
}

pub fn cmd_equilibria(args: &CommonArgs) -> CmdResult {
    let g = load_game(&args.output.game)?;
    let induced = args.state.state.is_some()
        || args.state.state_file.is_some()
        || args.scheme.scheme.is_some()
        || args.scheme.scheme_row.is_some()
        || args.scheme.scheme_col.is_some();
    let (target, header) = if induced {
        let (rho, label) = load_state(&args.state, g.rows(), g.cols())?;
        let (fr, fc) = families(&args.scheme, g.rows(), g.cols())?;
        let ig = induce_bimatrix(&g, &rho, &fr, &fc)?;
        let header = format!("equilibria of the induced game  schemes {}/{}  state {label}\n", fr.id(), fc.id());
        (ig.game, header)
    } else {
        (g, "equilibria of the game\n".to_string())
    };
    let set = analysis::mixed_nash(&target)?;
    for e in &set.mixed {
        if !analysis::is_nash(&target, &e.p, &e.q)? {
            return Err(Failure::Internal(format!("reported equilibrium p = {}, q = {} fails verification", e.p, e.q)));
        }
    }
    let text = match args.output.format {
        Format::Table => {
            let mut out = header;
            out.push_str(&render_grid(&target, &index_labels(target.rows()), &index_labels(target.cols()), true));
            out.push_str(&render_equilibria(&set));
            out
        }
        Format::Structured => structured(&set),
    };
    Ok((text, EXIT_OK))
}

pub fn cmd_payoff(args: &PayoffArgs) -> CmdResult {
    let common = &args.common;
    let g = load_game(&common.output.game)?;
    let (rho, label) = load_state(&common.state, g.rows(), g.cols())?;
    let (fr, fc) = families(&common.scheme, g.rows(), g.cols())?;
    let p = parse_strategy("p", &args.p)?;
    let q = parse_strategy("q", &args.q)?;
    if p.len() != fr.len() || q.len() != fc.len() {
        return Err(Failure::Input(format!(
            "strategy lengths ({}, {}) do not match family sizes ({}, {})",
            p.len(),
            q.len(),
            fr.len(),
            fc.len()
        )));
    }
    let tol = float_tol()?;
    let rho_fin = final_state(&rho, &fr, &fc, &p, &q)?;
    rho_fin.validate().map_err(|e| Failure::Internal(format!("final state: {e}")))?;
    let float = expected_payoff(&payoff_operator(&g), &rho_fin).map_err(|e| Failure::Internal(e.to_string()))?;
    let weights = rho.diagonal_weights();
    let exact = if weights.is_exact() {
        let e = expected_payoff_exact(&g, &weights, &fr, &fc, &p, &q)?;
        if float.distance(&e) > tol {
            return Err(Failure::Internal(format!(
                "exact payoff {e} and float payoff ({}, {}) disagree",
                float.row, float.col
            )));
        }
        let ig = induce_bimatrix(&g, &rho, &fr, &fc)?;
        if mixed_value(&ig, &p, &q)? != e {
            return Err(Failure::Internal("payoff differs from the induced game's bilinear value".into()));
        }
        Some(e)
    } else {
        None
    };
    let text = match (common.output.format, &exact) {
        (Format::Table, Some(e)) => format!("state {label}  p = {p}  q = {q}\nexpected payoff {e}  (exact)\n"),
        (Format::Table, None) => format!(
            "state {label}  p = {p}  q = {q}\nexpected payoff ({:.12}, {:.12})  (float)\n",
            float.row, float.col
        ),
        (Format::Structured, Some(e)) => structured(&json!({"row": e.row, "col": e.col, "exact": true})),
        (Format::Structured, None) => structured(&json!({"row": float.row, "col": float.col, "exact": false})),
    };
    Ok((text, EXIT_OK))
}

pub fn cmd_demo_flaw(args: &OutputArgs) -> CmdResult {
    let g = load_game(&args.game)?;
    let (mut ig, entry) = analysis::demo_flaw(&g)?;
    ig.provenance.state = "|01>".into();
    let text = match args.format {
        Format::Table => format!("{}{}\n", render_induced(&ig), render_entry(&entry)),
        Format::Structured => structured(&json!({"induced": ig, "entry": entry})),
    };
    Ok((text, if entry.verdict == Verdict::Pass { EXIT_OK } else { EXIT_NEGATIVE }))
}
