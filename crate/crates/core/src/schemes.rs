//! Operator families and the payoff map of the Marinatto-Weber protocol.
//!
//! Players share an initial state `ρ_in` on `C^n ⊗ C^m`. The row player applies
//! operator `V_s` of its family with probability `p_s`, the column player `W_t`
//! with probability `q_t`, giving
//!
//! ```text
//! ρ_fin = Σ_{s,t} p_s q_t (V_s ⊗ W_t) ρ_in (V_s ⊗ W_t)†
//! ```
//!
//! and the payoff pair `tr(X ρ_fin)` with `X = Σ P_ij |ij><ij|`.
//!
//! Every family here consists of basis permutations, so two evaluation routes
//! exist: a floating-point route through the full density matrix, and an exact
//! route that only needs the diagonal of `ρ_in`. They must agree.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::game::{BimatrixGame, PayoffPair};
use crate::rational::Rational;
use crate::state::{DensityOperator, DiagonalWeights};

/// Largest tolerated imaginary part of a diagonal entry of `ρ_fin`.
pub const IMAG_TOL: f64 = 1e-12;

/// A unitary that permutes computational basis states: `|i> ↦ |mapping[i]>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationUnitary {
    mapping: Vec<usize>,
    label: String,
}

impl PermutationUnitary {
    pub fn new(mapping: Vec<usize>, label: impl Into<String>) -> Result<Self> {
        let mut seen = vec![false; mapping.len()];
        for &k in &mapping {
            if k >= mapping.len() || std::mem::replace(&mut seen[k], true) {
                return Err(Error::InvalidPermutation(format!("{mapping:?} is not a bijection")));
            }
        }
        if mapping.is_empty() {
            return Err(Error::InvalidPermutation("empty mapping".into()));
        }
        Ok(PermutationUnitary { mapping, label: label.into() })
    }

    pub fn dim(&self) -> usize {
        self.mapping.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn apply(&self, i: usize) -> usize {
        self.mapping[i]
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, &k)| i == k)
    }

    /// 0/1 matrix with `U[mapping[i], i] = 1`.
    pub fn integer_matrix(&self) -> Vec<Vec<i64>> {
        let l = self.dim();
        let mut u = vec![vec![0; l]; l];
        for (i, &k) in self.mapping.iter().enumerate() {
            u[k][i] = 1;
        }
        u
    }

    pub fn matrix(&self) -> DMatrix<Complex64> {
        let u = self.integer_matrix();
        DMatrix::from_fn(self.dim(), self.dim(), |a, b| Complex64::new(u[a][b] as f64, 0.0))
    }

    /// `U†U = Id`, checked in integer arithmetic.
    pub fn is_unitary(&self) -> bool {
        let u = self.integer_matrix();
        let l = self.dim();
        (0..l).all(|a| (0..l).all(|b| (0..l).map(|k| u[k][a] * u[k][b]).sum::<i64>() == i64::from(a == b)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyId {
    /// Cyclic shifts `V_k |i> = |i + k mod l>`.
    Gmw(usize),
    /// The 3-dimensional set `(I, D, C)` with `D` swapping 0↔1 and `C` swapping 0↔2.
    It3,
    /// The original 2-dimensional set `(I, C)` with `C` the bit flip.
    Mw2,
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyId::Gmw(l) => write!(f, "gmw({l})"),
            FamilyId::It3 => f.write_str("it3"),
            FamilyId::Mw2 => f.write_str("mw2"),
        }
    }
}

impl Serialize for FamilyId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// An ordered set of basis-permutation strategies; the first is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorFamily {
    id: FamilyId,
    dim: usize,
    operators: Vec<PermutationUnitary>,
}

impl OperatorFamily {
    pub fn id(&self) -> FamilyId {
        self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn operators(&self) -> &[PermutationUnitary] {
        &self.operators
    }

    pub fn operator(&self, k: usize) -> &PermutationUnitary {
        &self.operators[k]
    }

    pub fn labels(&self) -> Vec<String> {
        self.operators.iter().map(|o| o.label.clone()).collect()
    }
}

pub fn gmw_family(l: usize) -> Result<OperatorFamily> {
    if l == 0 {
        return Err(Error::Unsupported("cyclic family needs dimension >= 1".into()));
    }
    let operators = (0..l)
        .map(|k| PermutationUnitary::new((0..l).map(|i| (i + k) % l).collect(), format!("V{k}")))
        .collect::<Result<_>>()?;
    Ok(OperatorFamily { id: FamilyId::Gmw(l), dim: l, operators })
}

/// `(I, D, C)`: this order reproduces the induced bimatrix printed for `|01>`
/// (the second row operator must send 0 to 1).
pub fn it3_family() -> OperatorFamily {
    let op = |m: [usize; 3], label: &str| PermutationUnitary::new(m.to_vec(), label).expect("valid permutation");
    OperatorFamily {
        id: FamilyId::It3,
        dim: 3,
        operators: vec![op([0, 1, 2], "I"), op([1, 0, 2], "D"), op([2, 1, 0], "C")],
    }
}

pub fn mw2_family() -> OperatorFamily {
    let op = |m: [usize; 2], label: &str| PermutationUnitary::new(m.to_vec(), label).expect("valid permutation");
    OperatorFamily { id: FamilyId::Mw2, dim: 2, operators: vec![op([0, 1], "I"), op([1, 0], "C")] }
}

/// Scheme selector used by the command line: builds the family for a given
/// subsystem dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SchemeKind {
    #[default]
    Gmw,
    It3,
    Mw2,
}

impl SchemeKind {
    pub fn family(self, dim: usize) -> Result<OperatorFamily> {
        match self {
            SchemeKind::Gmw => gmw_family(dim),
            SchemeKind::It3 if dim == 3 => Ok(it3_family()),
            SchemeKind::Mw2 if dim == 2 => Ok(mw2_family()),
            SchemeKind::It3 => Err(Error::DimensionMismatch(format!("it3 needs dimension 3, got {dim}"))),
            SchemeKind::Mw2 => Err(Error::DimensionMismatch(format!("mw2 needs dimension 2, got {dim}"))),
        }
    }
}

impl FromStr for SchemeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gmw" => Ok(SchemeKind::Gmw),
            "it3" => Ok(SchemeKind::It3),
            "mw2" => Ok(SchemeKind::Mw2),
            _ => Err(Error::Unsupported(format!("unknown scheme {s:?} (expected gmw, it3 or mw2)"))),
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeKind::Gmw => "gmw",
            SchemeKind::It3 => "it3",
            SchemeKind::Mw2 => "mw2",
        })
    }
}

/// Probability vector over the operators of a family.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct MixedStrategy(Vec<Rational>);

impl MixedStrategy {
    pub fn new(probabilities: Vec<Rational>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::InvalidStrategy("empty probability vector".into()));
        }
        if let Some(p) = probabilities.iter().find(|p| p.is_negative()) {
            return Err(Error::InvalidStrategy(format!("negative probability {p}")));
        }
        let total: Rational = probabilities.iter().sum();
        if total != Rational::one() {
            return Err(Error::InvalidStrategy(format!("probabilities sum to {total}, not 1")));
        }
        Ok(MixedStrategy(probabilities))
    }

    pub fn pure(len: usize, k: usize) -> Self {
        assert!(k < len, "pure strategy {k} out of range {len}");
        MixedStrategy((0..len).map(|i| if i == k { Rational::one() } else { Rational::zero() }).collect())
    }

    pub fn uniform(len: usize) -> Self {
        assert!(len > 0);
        MixedStrategy(vec![Rational::new(1, len as i64); len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn probabilities(&self) -> &[Rational] {
        &self.0
    }

    pub fn get(&self, k: usize) -> &Rational {
        &self.0[k]
    }

    /// Indices with positive probability.
    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&k| !self.0[k].is_zero()).collect()
    }

    pub fn pure_index(&self) -> Option<usize> {
        self.0.iter().position(|p| *p == Rational::one())
    }

    /// `p'_u = p_{(u + r) mod len}`.
    pub fn rotated(&self, r: usize) -> MixedStrategy {
        let n = self.0.len();
        MixedStrategy((0..n).map(|u| self.0[(u + r) % n].clone()).collect())
    }
}

impl fmt::Display for MixedStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, p) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

/// Diagonal observable `X = Σ P_ij |ij><ij|`.
#[derive(Clone, Debug, PartialEq)]
pub struct PayoffOperator {
    pub rows: usize,
    pub cols: usize,
    pub diagonal: Vec<PayoffPair>,
}

pub fn payoff_operator(g: &BimatrixGame) -> PayoffOperator {
    PayoffOperator { rows: g.rows(), cols: g.cols(), diagonal: g.cells().to_vec() }
}

/// Expected payoff from the floating-point route.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RealPayoff {
    pub row: f64,
    pub col: f64,
}

impl RealPayoff {
    pub fn distance(&self, p: &PayoffPair) -> f64 {
        (self.row - p.row.to_f64()).abs().max((self.col - p.col.to_f64()).abs())
    }
}

fn check_families(
    rows: usize,
    cols: usize,
    fam_row: &OperatorFamily,
    fam_col: &OperatorFamily,
) -> Result<()> {
    if fam_row.dim() != rows || fam_col.dim() != cols {
        return Err(Error::DimensionMismatch(format!(
            "families act on {}x{} but the state space is {rows}x{cols}",
            fam_row.dim(),
            fam_col.dim()
        )));
    }
    Ok(())
}

fn check_strategies(
    fam_row: &OperatorFamily,
    fam_col: &OperatorFamily,
    p: &MixedStrategy,
    q: &MixedStrategy,
) -> Result<()> {
    if p.len() != fam_row.len() || q.len() != fam_col.len() {
        return Err(Error::DimensionMismatch(format!(
            "strategy lengths ({}, {}) do not match family sizes ({}, {})",
            p.len(),
            q.len(),
            fam_row.len(),
            fam_col.len()
        )));
    }
    Ok(())
}

/// `Σ p_s q_t (V_s ⊗ W_t) ρ_in (V_s ⊗ W_t)†`.
///
/// Each product operator is a permutation `π` of flat indices, so conjugation
/// reduces to `out[π(a), π(b)] += w ρ[a, b]`.
pub fn final_state(
    rho_in: &DensityOperator,
    fam_row: &OperatorFamily,
    fam_col: &OperatorFamily,
    p: &MixedStrategy,
    q: &MixedStrategy,
) -> Result<DensityOperator> {
    let (n, m) = (rho_in.rows(), rho_in.cols());
    check_families(n, m, fam_row, fam_col)?;
    check_strategies(fam_row, fam_col, p, q)?;
    let d = n * m;
    let rho = rho_in.matrix();
    let mut out = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
    let mut perm = vec![0usize; d];
    for (s, ps) in p.probabilities().iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        let sigma = fam_row.operator(s);
        for (t, qt) in q.probabilities().iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            let tau = fam_col.operator(t);
            let w = Complex64::new((ps * qt).to_f64(), 0.0);
            for k in 0..n {
                for l in 0..m {
                    perm[k * m + l] = sigma.apply(k) * m + tau.apply(l);
                }
            }
            for a in 0..d {
                for b in 0..d {
                    out[(perm[a], perm[b])] += w * rho[(a, b)];
                }
            }
        }
    }
    Ok(DensityOperator::new_unchecked(n, m, out))
}

/// `tr(X ρ_fin)`, componentwise for the two players.
pub fn expected_payoff(x: &PayoffOperator, rho_fin: &DensityOperator) -> Result<RealPayoff> {
    if x.rows != rho_fin.rows() || x.cols != rho_fin.cols() {
        return Err(Error::DimensionMismatch(format!(
            "payoff operator is {}x{}, state is {}x{}",
            x.rows,
            x.cols,
            rho_fin.rows(),
            rho_fin.cols()
        )));
    }
    let rho = rho_fin.matrix();
    let (mut row, mut col) = (0.0, 0.0);
    for (k, pair) in x.diagonal.iter().enumerate() {
        let z = rho[(k, k)];
        if z.im.abs() >= IMAG_TOL {
            return Err(Error::ComplexResidue(z.im));
        }
        row += pair.row.to_f64() * z.re;
        col += pair.col.to_f64() * z.re;
    }
    Ok(RealPayoff { row, col })
}

/// Exact route: `Σ_{s,t} p_s q_t Σ_{k,l} w(k,l) P_{σ_s(k), τ_t(l)}`.
pub fn expected_payoff_exact(
    g: &BimatrixGame,
    w: &DiagonalWeights,
    fam_row: &OperatorFamily,
    fam_col: &OperatorFamily,
    p: &MixedStrategy,
    q: &MixedStrategy,
) -> Result<PayoffPair> {
    let exact = w.exact.as_ref().ok_or(Error::InexactWeights)?;
    if w.rows != g.rows() || w.cols != g.cols() {
        return Err(Error::DimensionMismatch(format!(
            "weights are {}x{}, game is {}x{}",
            w.rows,
            w.cols,
            g.rows(),
            g.cols()
        )));
    }
    check_families(g.rows(), g.cols(), fam_row, fam_col)?;
    check_strategies(fam_row, fam_col, p, q)?;
    let m = g.cols();
    let support: Vec<(usize, usize, &Rational)> = exact
        .iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(flat, x)| (flat / m, flat % m, x))
        .collect();
    let mut total = PayoffPair::zero();
    for (s, ps) in p.probabilities().iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        let sigma = fam_row.operator(s);
        for (t, qt) in q.probabilities().iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            let tau = fam_col.operator(t);
            let mut cell = PayoffPair::zero();
            for &(k, l, wkl) in &support {
                cell.add_scaled(g.get(sigma.apply(k), tau.apply(l)), wkl);
            }
            total.add_scaled(&cell, &(ps * qt));
        }
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub row_family: FamilyId,
    pub col_family: FamilyId,
    pub state: String,
    /// Whether the cells were computed in exact arithmetic.
    pub exact: bool,
}

/// The bimatrix whose cell `(s, t)` is the expected payoff when the players
/// apply operators `s` and `t` with certainty.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InducedGame {
    pub game: BimatrixGame,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub provenance: Provenance,
}

/// Induced bimatrix of `g` for initial state `rho_in`.
///
/// Uses the exact route when the diagonal of `rho_in` is exact, the
/// floating-point route otherwise (cells then hold the exact binary value of
/// the computed float).
pub fn induce_bimatrix(
    g: &BimatrixGame,
    rho_in: &DensityOperator,
    fam_row: &OperatorFamily,
    fam_col: &OperatorFamily,
) -> Result<InducedGame> {
    if rho_in.rows() != g.rows() || rho_in.cols() != g.cols() {
        return Err(Error::DimensionMismatch(format!(
            "state is {}x{}, game is {}x{}",
            rho_in.rows(),
            rho_in.cols(),
            g.rows(),
            g.cols()
        )));
    }
    check_families(g.rows(), g.cols(), fam_row, fam_col)?;
    let w = rho_in.diagonal_weights();
    let (a, b) = (fam_row.len(), fam_col.len());
    let game = if w.is_exact() {
        BimatrixGame::from_fn(a, b, |s, t| {
            expected_payoff_exact(g, &w, fam_row, fam_col, &MixedStrategy::pure(a, s), &MixedStrategy::pure(b, t))
                .expect("validated dimensions")
        })?
    } else {
        let x = payoff_operator(g);
        let mut cells = Vec::with_capacity(a * b);
        for s in 0..a {
            for t in 0..b {
                let rho_fin =
                    final_state(rho_in, fam_row, fam_col, &MixedStrategy::pure(a, s), &MixedStrategy::pure(b, t))?;
                let e = expected_payoff(&x, &rho_fin)?;
                let to_exact = |v: f64| {
                    Rational::from_f64_exact(v).ok_or_else(|| Error::InvalidState("non-finite payoff".into()))
                };
                cells.push(PayoffPair::new(to_exact(e.row)?, to_exact(e.col)?));
            }
        }
        BimatrixGame::new(a, b, cells)?
    };
    Ok(InducedGame {
        game,
        row_labels: fam_row.labels(),
        col_labels: fam_col.labels(),
        provenance: Provenance {
            row_family: fam_row.id(),
            col_family: fam_col.id(),
            state: rho_in.describe(),
            exact: w.is_exact(),
        },
    })
}

/// Bilinear value `Σ p_s q_t cell(s, t)` of an induced game.
pub fn mixed_value(ig: &InducedGame, p: &MixedStrategy, q: &MixedStrategy) -> Result<PayoffPair> {
    bilinear_value(&ig.game, p, q)
}

pub fn bilinear_value(g: &BimatrixGame, p: &MixedStrategy, q: &MixedStrategy) -> Result<PayoffPair> {
    if p.len() != g.rows() || q.len() != g.cols() {
        return Err(Error::DimensionMismatch(format!(
            "strategy lengths ({}, {}) for a {}x{} game",
            p.len(),
            q.len(),
            g.rows(),
            g.cols()
        )));
    }
    let mut total = PayoffPair::zero();
    for (s, ps) in p.probabilities().iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (t, qt) in q.probabilities().iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            total.add_scaled(g.get(s, t), &(ps * qt));
        }
    }
    Ok(total)
}
