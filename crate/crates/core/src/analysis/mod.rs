//! Scheme verification (classical recovery, the `|01>` flaw of the 3x3
//! transposition set, scheme comparison) and equilibrium analysis.

pub mod nash;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{BimatrixGame, PayoffPair};
use crate::schemes::{induce_bimatrix, it3_family, FamilyId, InducedGame, OperatorFamily};
use crate::state::{basis_state, DensityOperator};

pub use nash::{
    best_responses, is_nash, mixed_nash, pure_nash, EquilibriumSet, MixedEquilibrium, Player, MAX_SUPPORT_DIM,
};

/// Default tolerance for comparing floating-point induced games.
pub const FLOAT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Outcome for a single basis initial state `|ij>`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecoveryEntry {
    pub i: usize,
    pub j: usize,
    pub verdict: Verdict,
    /// Cyclic shift relating the original game to the induced one.
    pub shift: Option<(usize, usize)>,
    /// Outcomes of the original game absent from the induced one (empty on pass).
    pub missing: Vec<PayoffPair>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecoveryReport {
    pub rows: usize,
    pub cols: usize,
    pub row_family: FamilyId,
    pub col_family: FamilyId,
    pub entries: Vec<RecoveryEntry>,
}

impl RecoveryReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.verdict == Verdict::Pass)
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<&RecoveryEntry> {
        self.entries.iter().find(|e| e.i == i && e.j == j)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RecoveryEntry> {
        self.entries.iter().filter(|e| e.verdict == Verdict::Fail)
    }
}

fn recovery_entry(g: &BimatrixGame, i: usize, j: usize, induced: &InducedGame) -> RecoveryEntry {
    match g.find_cyclic_relabeling(&induced.game) {
        Some(shift) => RecoveryEntry { i, j, verdict: Verdict::Pass, shift: Some(shift), missing: Vec::new() },
        None => {
            let seen = induced.game.outcome_set();
            let missing = g.outcome_set().into_iter().filter(|p| !seen.contains(p)).collect();
            RecoveryEntry { i, j, verdict: Verdict::Fail, shift: None, missing }
        }
    }
}

/// For every basis state `|ij>`, induces the game and checks that it is a
/// cyclic relabeling of `g`.
pub fn check_recovery(g: &BimatrixGame, fam_row: &OperatorFamily, fam_col: &OperatorFamily) -> Result<RecoveryReport> {
    let (n, m) = (g.rows(), g.cols());
    if fam_row.dim() != n || fam_col.dim() != m {
        return Err(Error::DimensionMismatch(format!(
            "families act on {}x{} but the game is {n}x{m}",
            fam_row.dim(),
            fam_col.dim()
        )));
    }
    let mut entries = Vec::with_capacity(n * m);
    for i in 0..n {
        for j in 0..m {
            let rho = DensityOperator::from_pure(&basis_state(i, j, n, m)?);
            let induced = induce_bimatrix(g, &rho, fam_row, fam_col)?;
            entries.push(recovery_entry(g, i, j, &induced));
        }
    }
    Ok(RecoveryReport { rows: n, cols: m, row_family: fam_row.id(), col_family: fam_col.id(), entries })
}

/// The 3x3 transposition scheme on both sides with initial state `|01>`.
pub fn demo_flaw(g: &BimatrixGame) -> Result<(InducedGame, RecoveryEntry)> {
    if g.rows() != 3 || g.cols() != 3 {
        return Err(Error::DimensionMismatch(format!("demo-flaw needs a 3x3 game, got {}x{}", g.rows(), g.cols())));
    }
    let fam = it3_family();
    let rho = DensityOperator::from_pure(&basis_state(0, 1, 3, 3)?);
    let induced = induce_bimatrix(g, &rho, &fam, &fam)?;
    let entry = recovery_entry(g, 0, 1, &induced);
    Ok((induced, entry))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellDifference {
    pub cell: (usize, usize),
    pub a: PayoffPair,
    pub b: PayoffPair,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub scheme_a: (FamilyId, FamilyId),
    pub scheme_b: (FamilyId, FamilyId),
    pub state: String,
    pub exact: bool,
    pub equal: bool,
    pub differences: Vec<CellDifference>,
    pub game_a: BimatrixGame,
    pub game_b: BimatrixGame,
}

/// Induces `g` under both family pairs and compares cell by cell, under each
/// family's own operator order. Exact comparison when both induced games are
/// exact, otherwise within `tol`.
pub fn compare_schemes(
    g: &BimatrixGame,
    state: &DensityOperator,
    scheme_a: (&OperatorFamily, &OperatorFamily),
    scheme_b: (&OperatorFamily, &OperatorFamily),
    tol: f64,
) -> Result<ComparisonReport> {
    let a = induce_bimatrix(g, state, scheme_a.0, scheme_a.1)?;
    let b = induce_bimatrix(g, state, scheme_b.0, scheme_b.1)?;
    if a.game.rows() != b.game.rows() || a.game.cols() != b.game.cols() {
        return Err(Error::DimensionMismatch(format!(
            "induced games are {}x{} and {}x{}",
            a.game.rows(),
            a.game.cols(),
            b.game.rows(),
            b.game.cols()
        )));
    }
    let exact = a.provenance.exact && b.provenance.exact;
    let mut differences = Vec::new();
    for s in 0..a.game.rows() {
        for t in 0..a.game.cols() {
            let (x, y) = (a.game.get(s, t), b.game.get(s, t));
            let same = if exact {
                x == y
            } else {
                (x.row.to_f64() - y.row.to_f64()).abs() <= tol && (x.col.to_f64() - y.col.to_f64()).abs() <= tol
            };
            if !same {
                differences.push(CellDifference { cell: (s, t), a: x.clone(), b: y.clone() });
            }
        }
    }
    Ok(ComparisonReport {
        scheme_a: (scheme_a.0.id(), scheme_a.1.id()),
        scheme_b: (scheme_b.0.id(), scheme_b.1.id()),
        state: a.provenance.state.clone(),
        exact,
        equal: differences.is_empty(),
        differences,
        game_a: a.game,
        game_b: b.game,
    })
}
