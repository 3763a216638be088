//! States of the composite space `C^rows ⊗ C^cols`.
//!
//! Basis state `|ij>` has flat index `i * cols + j`, matching the cell layout
//! of [`crate::game::BimatrixGame`].

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Norm tolerance of a [`PureState`].
pub const NORM_TOL: f64 = 1e-12;
/// Norm tolerance applied by [`parse_ket`].
pub const KET_NORM_TOL: f64 = 1e-9;
/// Entrywise Hermiticity and trace tolerance of a [`DensityOperator`].
pub const DENSITY_TOL: f64 = 1e-12;
/// Lowest eigenvalue a [`DensityOperator`] may have.
pub const EIGEN_FLOOR: f64 = -1e-9;
/// Largest denominator a diagonal weight is snapped to.
pub const SNAP_MAX_DENOM: u32 = 64;
pub const SNAP_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    rows: usize,
    cols: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(rows: usize, cols: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let s = PureState::checked_shape(rows, cols, amplitudes)?;
        let norm = s.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(s)
    }

    fn checked_shape(rows: usize, cols: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidState(format!("empty dimensions {rows}x{cols}")));
        }
        if amplitudes.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for dimensions {rows}x{cols}",
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        Ok(PureState { rows, cols, amplitudes })
    }

    /// The computational basis state `|ij>`.
    pub fn basis(i: usize, j: usize, rows: usize, cols: usize) -> Result<Self> {
        if i >= rows || j >= cols {
            return Err(Error::BasisOutOfRange { i, j, rows, cols });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); rows * cols];
        amplitudes[i * cols + j] = Complex64::new(1.0, 0.0);
        Ok(PureState { rows, cols, amplitudes })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, i: usize, j: usize) -> Complex64 {
        self.amplitudes[i * self.cols + j]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }
}

pub fn basis_state(i: usize, j: usize, rows: usize, cols: usize) -> Result<PureState> {
    PureState::basis(i, j, rows, cols)
}

/// A density matrix on `C^rows ⊗ C^cols`.
///
/// May additionally carry an exact rational diagonal when it was built from
/// exact weights; [`DensityOperator::diagonal_weights`] then returns those
/// weights verbatim instead of snapping floats.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    rows: usize,
    cols: usize,
    matrix: DMatrix<Complex64>,
    exact_diagonal: Option<Vec<Rational>>,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(rows: usize, cols: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        let d = rows * cols;
        if d == 0 {
            return Err(Error::InvalidDensity(format!("empty dimensions {rows}x{cols}")));
        }
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for a {d}-dimensional space",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let rho = DensityOperator { rows, cols, matrix, exact_diagonal: None };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn new_unchecked(rows: usize, cols: usize, matrix: DMatrix<Complex64>) -> Self {
        DensityOperator { rows, cols, matrix, exact_diagonal: None }
    }

    pub fn from_pure(s: &PureState) -> Self {
        let v = nalgebra::DVector::from_column_slice(&s.amplitudes);
        DensityOperator { rows: s.rows, cols: s.cols, matrix: &v * v.adjoint(), exact_diagonal: None }
    }

    /// Diagonal (classically mixed) state with exact weights on `|ij>`.
    pub fn from_exact_diagonal(rows: usize, cols: usize, weights: Vec<Rational>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidDensity(format!("empty dimensions {rows}x{cols}")));
        }
        if weights.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for dimensions {rows}x{cols}",
                weights.len()
            )));
        }
        if let Some(k) = weights.iter().position(Rational::is_negative) {
            return Err(Error::InvalidDensity(format!("negative weight {} at index {k}", weights[k])));
        }
        let total: Rational = weights.iter().sum();
        if total != Rational::one() {
            return Err(Error::InvalidDensity(format!("weights sum to {total}, not 1")));
        }
        let d = rows * cols;
        let matrix = DMatrix::from_fn(d, d, |a, b| {
            if a == b {
                Complex64::new(weights[a].to_f64(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Ok(DensityOperator { rows, cols, matrix, exact_diagonal: Some(weights) })
    }

    pub fn maximally_mixed(rows: usize, cols: usize) -> Result<Self> {
        let d = (rows * cols) as i64;
        DensityOperator::from_exact_diagonal(rows, cols, vec![Rational::new(1, d.max(1)); rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        self.rows * self.cols
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn exact_diagonal(&self) -> Option<&[Rational]> {
        self.exact_diagonal.as_deref()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Largest entrywise deviation `|ρ - ρ†|`.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for a in 0..d {
            for b in a..d {
                worst = worst.max((self.matrix[(a, b)] - self.matrix[(b, a)].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part `(ρ + ρ†) / 2`.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn validate(&self) -> Result<()> {
        if self.matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidDensity("non-finite entry".into()));
        }
        let herm = self.hermiticity_error();
        if herm > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} is not 1")));
        }
        let lo = self.min_eigenvalue();
        if lo < EIGEN_FLOOR {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {lo:e}")));
        }
        Ok(())
    }

    /// Copy with every off-diagonal entry set to zero.
    pub fn dephased(&self) -> DensityOperator {
        let d = self.dim();
        let matrix =
            DMatrix::from_fn(d, d, |a, b| if a == b { self.matrix[(a, a)] } else { Complex64::new(0.0, 0.0) });
        DensityOperator { rows: self.rows, cols: self.cols, matrix, exact_diagonal: self.exact_diagonal.clone() }
    }

    /// Probabilities of the computational basis states, snapped to exact
    /// rationals when every entry is close to a small-denominator fraction.
    pub fn diagonal_weights(&self) -> DiagonalWeights {
        let values: Vec<f64> = (0..self.dim()).map(|k| self.matrix[(k, k)].re).collect();
        let exact = match &self.exact_diagonal {
            Some(w) => Some(w.clone()),
            None => snap_weights(&values),
        };
        DiagonalWeights { rows: self.rows, cols: self.cols, values, exact }
    }

    /// Short human-readable description: the basis label for basis states,
    /// otherwise the nonzero diagonal weights.
    pub fn describe(&self) -> String {
        let w = self.diagonal_weights();
        let is_diagonal = self.hermiticity_error() <= DENSITY_TOL && {
            let d = self.dim();
            (0..d).all(|a| (0..d).all(|b| a == b || self.matrix[(a, b)].norm() <= DENSITY_TOL))
        };
        let mut out = String::new();
        match &w.exact {
            Some(ex) => {
                let nonzero: Vec<usize> = (0..ex.len()).filter(|&k| !ex[k].is_zero()).collect();
                if nonzero.len() == 1 {
                    let k = nonzero[0];
                    return format!("|{}>", basis_label(k / self.cols, k % self.cols, self.cols));
                }
                out.push_str(if is_diagonal { "diag{" } else { "coherent diag{" });
                for (n, &k) in nonzero.iter().enumerate() {
                    if n > 0 {
                        out.push_str(", ");
                    }
                    let _ = write!(out, "{}: {}", basis_label(k / self.cols, k % self.cols, self.cols), ex[k]);
                }
            }
            None => {
                out.push_str(if is_diagonal { "diag{" } else { "coherent diag{" });
                let mut first = true;
                for (k, v) in w.values.iter().enumerate().filter(|(_, v)| v.abs() > SNAP_TOL) {
                    if !first {
                        out.push_str(", ");
                    }
                    first = false;
                    let _ = write!(out, "{}: {v:.6}", basis_label(k / self.cols, k % self.cols, self.cols));
                }
            }
        }
        out.push('}');
        out
    }
}

fn basis_label(i: usize, j: usize, cols: usize) -> String {
    if cols <= 10 && i < 10 {
        format!("{i}{j}")
    } else {
        format!("{i},{j}")
    }
}

fn snap_weights(values: &[f64]) -> Option<Vec<Rational>> {
    let snapped: Vec<Rational> =
        values.iter().map(|&v| Rational::snap(v, SNAP_MAX_DENOM, SNAP_TOL)).collect::<Option<_>>()?;
    let total: Rational = snapped.iter().sum();
    if snapped.iter().any(Rational::is_negative) || total != Rational::one() {
        return None;
    }
    Some(snapped)
}

pub fn density_from_pure(s: &PureState) -> DensityOperator {
    DensityOperator::from_pure(s)
}

pub fn diagonal_weights(rho: &DensityOperator) -> DiagonalWeights {
    rho.diagonal_weights()
}

/// Basis-state probabilities of a state, as floats and (when available)
/// as exact rationals.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalWeights {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
    pub exact: Option<Vec<Rational>>,
}

impl DiagonalWeights {
    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }
}

/// Parses a ket expression such as `(|00> + |11>)/sqrt(2)` or
/// `1/2*|01> - 1/2*|10> + 1/sqrt(2)*|22>` over `C^rows ⊗ C^cols`.
///
/// The result must already be normalized (within [`KET_NORM_TOL`]); it is
/// never rescaled.
pub fn parse_ket(text: &str, rows: usize, cols: usize) -> Result<PureState> {
    let mut p = KetParser { chars: text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect(), pos: 0, end: text.len() };
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); rows * cols];
    let parenthesized = p.eat('(');
    let mut first = true;
    loop {
        let sign = if p.eat('+') {
            1.0
        } else if p.eat('-') {
            -1.0
        } else if first {
            1.0
        } else {
            break;
        };
        first = false;
        let (coeff, i, j) = p.term()?;
        if i >= rows || j >= cols {
            return Err(Error::BasisOutOfRange { i, j, rows, cols });
        }
        amplitudes[i * cols + j] += Complex64::new(sign * coeff, 0.0);
    }
    if parenthesized && !p.eat(')') {
        return Err(p.error("expected ')'"));
    }
    if p.eat('/') {
        let divisor = p.scalar()?;
        for a in &mut amplitudes {
            *a /= divisor;
        }
    }
    if let Some(&(pos, c)) = p.chars.get(p.pos) {
        return Err(Error::KetSyntax { pos, msg: format!("unexpected {c:?}") });
    }
    let s = PureState::checked_shape(rows, cols, amplitudes)?;
    let norm = s.norm();
    if (norm - 1.0).abs() > KET_NORM_TOL {
        return Err(Error::NotNormalized { norm });
    }
    Ok(s)
}

struct KetParser {
    chars: Vec<(usize, char)>,
    pos: usize,
    end: usize,
}

impl KetParser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.end, |&(o, _)| o)
    }

    fn error(&self, msg: &str) -> Error {
        Error::KetSyntax { pos: self.offset(), msg: msg.to_string() }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        let n = w.chars().count();
        let matches = self.chars.len() >= self.pos + n
            && self.chars[self.pos..self.pos + n].iter().map(|&(_, c)| c).eq(w.chars());
        if matches {
            self.pos += n;
        }
        matches
    }

    fn digits(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            s.push(c);
            self.pos += 1;
        }
        s
    }

    fn positive_integer(&mut self) -> Result<f64> {
        let d = self.digits();
        match d.parse::<u64>() {
            Ok(n) if n > 0 => Ok(n as f64),
            _ => Err(self.error("expected a positive integer")),
        }
    }

    /// `sqrt(n)` after the leading `/` has been consumed by the caller.
    fn sqrt_of(&mut self) -> Result<f64> {
        let n = self.positive_integer()?;
        if !self.eat(')') {
            return Err(self.error("expected ')'"));
        }
        Ok(n.sqrt())
    }

    fn scalar(&mut self) -> Result<f64> {
        if self.eat_word("sqrt(") {
            self.sqrt_of()
        } else {
            self.positive_integer()
        }
    }

    fn rational(&mut self) -> Result<f64> {
        let start = self.pos;
        let mut text = self.digits();
        if self.eat('.') {
            text.push('.');
            text.push_str(&self.digits());
        }
        if text.is_empty() || text == "." {
            self.pos = start;
            return Err(self.error("expected a number"));
        }
        let mut value: Rational = text.parse().map_err(|_| self.error("malformed number"))?;
        // `p/q` but not `p/sqrt(..)`, which belongs to the coefficient rule.
        if self.peek() == Some('/') && self.chars.get(self.pos + 1).is_some_and(|&(_, c)| c.is_ascii_digit()) {
            self.pos += 1;
            let q = self.positive_integer()?;
            value = value / Rational::from_integer(q as i64);
        }
        Ok(value.to_f64())
    }

    fn term(&mut self) -> Result<(f64, usize, usize)> {
        let mut coeff = 1.0;
        if self.peek() != Some('|') {
            coeff = self.rational()?;
            if self.eat_word("/sqrt(") {
                coeff /= self.sqrt_of()?;
            }
            if !self.eat('*') {
                return Err(self.error("expected '*' before ket"));
            }
        }
        if !self.eat('|') {
            return Err(self.error("expected '|'"));
        }
        let digit = |p: &mut Self| -> Result<usize> {
            match p.peek().and_then(|c| c.to_digit(10)) {
                Some(d) => {
                    p.pos += 1;
                    Ok(d as usize)
                }
                None => Err(p.error("expected a basis digit")),
            }
        };
        let i = digit(self)?;
        let j = digit(self)?;
        if !(self.eat('>') || self.eat('⟩')) {
            return Err(self.error("expected '>'"));
        }
        Ok((coeff, i, j))
    }
}
