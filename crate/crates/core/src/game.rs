//! Finite two-player bimatrix games with exact payoffs.
//!
//! Cells are stored row-major, so cell `(i, j)` lives at flat index
//! `i * cols + j`. The same flattening is used for basis states of the
//! composite space in [`crate::state`].

use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Payoffs of one cell: what the row player and the column player receive.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PayoffPair {
    pub row: Rational,
    pub col: Rational,
}

impl PayoffPair {
    pub fn new(row: Rational, col: Rational) -> Self {
        PayoffPair { row, col }
    }

    pub fn ints(row: i64, col: i64) -> Self {
        PayoffPair::new(row.into(), col.into())
    }

    pub fn zero() -> Self {
        PayoffPair::new(Rational::zero(), Rational::zero())
    }

    pub fn scale(&self, w: &Rational) -> PayoffPair {
        PayoffPair::new(&self.row * w, &self.col * w)
    }

    pub fn add_scaled(&mut self, other: &PayoffPair, w: &Rational) {
        self.row += &other.row * w;
        self.col += &other.col * w;
    }
}

impl fmt::Display for PayoffPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

impl Serialize for PayoffPair {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        (&self.row, &self.col).serialize(serializer)
    }
}

/// An `rows x cols` grid of payoff pairs, `rows, cols >= 1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BimatrixGame {
    rows: usize,
    cols: usize,
    cells: Vec<PayoffPair>,
}

impl BimatrixGame {
    pub fn new(rows: usize, cols: usize, cells: Vec<PayoffPair>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyGame { rows, cols });
        }
        if cells.len() != rows * cols {
            return Err(Error::GameFormat(format!(
                "expected {} cells for a {rows}x{cols} game, got {}",
                rows * cols,
                cells.len()
            )));
        }
        Ok(BimatrixGame { rows, cols, cells })
    }

    pub fn from_rows(grid: Vec<Vec<PayoffPair>>) -> Result<Self> {
        let rows = grid.len();
        let cols = grid.first().map_or(0, Vec::len);
        for (i, row) in grid.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::GameEntry {
                    row: i,
                    col: row.len().min(cols),
                    msg: format!("ragged row: expected {cols} columns, found {}", row.len()),
                });
            }
        }
        BimatrixGame::new(rows, cols, grid.into_iter().flatten().collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> PayoffPair) -> Result<Self> {
        let cells = (0..rows).flat_map(|i| (0..cols).map(move |j| (i, j))).map(|(i, j)| f(i, j)).collect();
        BimatrixGame::new(rows, cols, cells)
    }

    /// Builds a game from separate row-player and column-player integer matrices.
    pub fn from_int_matrices(row_payoffs: &[Vec<i64>], col_payoffs: &[Vec<i64>]) -> Result<Self> {
        if row_payoffs.len() != col_payoffs.len() {
            return Err(Error::GameFormat("payoff matrices differ in row count".into()));
        }
        let grid = row_payoffs
            .iter()
            .zip(col_payoffs)
            .map(|(a, b)| {
                if a.len() != b.len() {
                    return Err(Error::GameFormat("payoff matrices differ in column count".into()));
                }
                Ok(a.iter().zip(b).map(|(&x, &y)| PayoffPair::ints(x, y)).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        BimatrixGame::from_rows(grid)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &PayoffPair {
        assert!(i < self.rows && j < self.cols, "cell ({i}, {j}) out of range");
        &self.cells[i * self.cols + j]
    }

    /// Cells in row-major (flat index) order.
    pub fn cells(&self) -> &[PayoffPair] {
        &self.cells
    }

    pub fn row(&self, i: usize) -> &[PayoffPair] {
        &self.cells[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero_sum(&self) -> bool {
        self.cells.iter().all(|p| (&p.row + &p.col).is_zero())
    }

    /// Adds `delta` to both payoffs of every cell.
    pub fn translate(&self, delta: &Rational) -> BimatrixGame {
        let cells = self.cells.iter().map(|p| PayoffPair::new(&p.row + delta, &p.col + delta)).collect();
        BimatrixGame { rows: self.rows, cols: self.cols, cells }
    }

    /// Relabels rows and columns cyclically: output cell `(u, v)` is input cell
    /// `((u + r) mod rows, (v + c) mod cols)`.
    pub fn cyclic_shift(&self, r: usize, c: usize) -> Result<BimatrixGame> {
        if r >= self.rows || c >= self.cols {
            return Err(Error::ShiftOutOfRange { r, c, rows: self.rows, cols: self.cols });
        }
        BimatrixGame::from_fn(self.rows, self.cols, |u, v| {
            self.get((u + r) % self.rows, (v + c) % self.cols).clone()
        })
    }

    /// Smallest `(r, c)` in lexicographic order with `self.cyclic_shift(r, c) == other`.
    pub fn find_cyclic_relabeling(&self, other: &BimatrixGame) -> Option<(usize, usize)> {
        if self.rows != other.rows || self.cols != other.cols {
            return None;
        }
        (0..self.rows)
            .flat_map(|r| (0..self.cols).map(move |c| (r, c)))
            .find(|&(r, c)| {
                (0..self.rows).all(|u| {
                    (0..self.cols)
                        .all(|v| self.get((u + r) % self.rows, (v + c) % self.cols) == other.get(u, v))
                })
            })
    }

    /// Distinct payoff pairs occurring anywhere in the grid.
    pub fn outcome_set(&self) -> BTreeSet<PayoffPair> {
        self.cells.iter().cloned().collect()
    }

    /// Reads the JSON game format:
    /// `{"rows": n, "cols": m, "payoffs": [[[a, b], ...], ...]}`.
    pub fn parse(text: &str) -> Result<BimatrixGame> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::GameFormat(e.to_string()))?;
        let obj = value.as_object().ok_or_else(|| Error::GameFormat("expected a JSON object".into()))?;
        let dim = |key: &str| -> Result<usize> {
            let v = obj.get(key).ok_or_else(|| Error::GameFormat(format!("missing \"{key}\"")))?;
            v.as_u64()
                .map(|n| n as usize)
                .ok_or_else(|| Error::GameFormat(format!("\"{key}\" must be a non-negative integer")))
        };
        let rows = dim("rows")?;
        let cols = dim("cols")?;
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyGame { rows, cols });
        }
        let grid = obj
            .get("payoffs")
            .ok_or_else(|| Error::GameFormat("missing \"payoffs\"".into()))?
            .as_array()
            .ok_or_else(|| Error::GameFormat("\"payoffs\" must be an array of rows".into()))?;
        if grid.len() != rows {
            return Err(Error::GameFormat(format!("\"rows\" is {rows} but \"payoffs\" has {} rows", grid.len())));
        }
        let mut cells = Vec::with_capacity(rows * cols);
        for (i, row) in grid.iter().enumerate() {
            let entry_err = |col: usize, msg: String| Error::GameEntry { row: i, col, msg };
            let row = row.as_array().ok_or_else(|| entry_err(0, "row is not an array".into()))?;
            if row.len() != cols {
                return Err(entry_err(
                    row.len().min(cols),
                    format!("ragged row: expected {cols} columns, found {}", row.len()),
                ));
            }
            for (j, cell) in row.iter().enumerate() {
                let pair = cell
                    .as_array()
                    .filter(|a| a.len() == 2)
                    .ok_or_else(|| entry_err(j, "cell must be a two-element array [a, b]".into()))?;
                let a = parse_number(&pair[0]).map_err(|m| entry_err(j, m))?;
                let b = parse_number(&pair[1]).map_err(|m| entry_err(j, m))?;
                cells.push(PayoffPair::new(a, b));
            }
        }
        BimatrixGame::new(rows, cols, cells)
    }

    /// Canonical JSON text: lowest-terms `"p/q"` strings for non-integers,
    /// plain numbers for integers, one grid row per line.
    pub fn to_json(&self) -> String {
        let mut out = format!("{{\n  \"rows\": {},\n  \"cols\": {},\n  \"payoffs\": [\n", self.rows, self.cols);
        for i in 0..self.rows {
            let cells: Vec<String> = self
                .row(i)
                .iter()
                .map(|p| format!("[{}, {}]", json_number(&p.row), json_number(&p.col)))
                .collect();
            out.push_str("    [");
            out.push_str(&cells.join(", "));
            out.push(']');
            if i + 1 < self.rows {
                out.push(',');
            }
            out.push('\n');
        }
        out.push_str("  ]\n}\n");
        out
    }
}

fn parse_number(v: &Value) -> std::result::Result<Rational, String> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational::from_integer(i))
            } else {
                n.to_string().parse().map_err(|_| format!("non-numeric entry {n}"))
            }
        }
        Value::String(s) => s.parse().map_err(|_| format!("non-numeric entry {s:?}")),
        other => Err(format!("non-numeric entry {other}")),
    }
}

fn json_number(r: &Rational) -> String {
    serde_json::to_string(r).expect("rational serializes")
}

impl Serialize for BimatrixGame {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let grid: Vec<&[PayoffPair]> = (0..self.rows).map(|i| self.row(i)).collect();
        let mut s = serializer.serialize_struct("BimatrixGame", 3)?;
        s.serialize_field("rows", &self.rows)?;
        s.serialize_field("cols", &self.cols)?;
        s.serialize_field("payoffs", &grid)?;
        s.end()
    }
}

/// Parses game text; see [`BimatrixGame::parse`].
pub fn parse_game(text: &str) -> Result<BimatrixGame> {
    BimatrixGame::parse(text)
}

pub fn serialize_game(g: &BimatrixGame) -> String {
    g.to_json()
}

pub fn cyclic_shift_game(g: &BimatrixGame, r: usize, c: usize) -> Result<BimatrixGame> {
    g.cyclic_shift(r, c)
}

pub fn games_equal(g: &BimatrixGame, h: &BimatrixGame) -> bool {
    g == h
}

pub fn find_cyclic_relabeling(g: &BimatrixGame, h: &BimatrixGame) -> Option<(usize, usize)> {
    g.find_cyclic_relabeling(h)
}

pub fn outcome_set(g: &BimatrixGame) -> BTreeSet<PayoffPair> {
    g.outcome_set()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{rock_paper_scissors, sentinel};

    fn p(i: usize, j: usize) -> PayoffPair {
        sentinel(3, 3).get(i, j).clone()
    }

    fn grid(cells: [[(usize, usize); 3]; 3]) -> BimatrixGame {
        BimatrixGame::from_rows(cells.iter().map(|r| r.iter().map(|&(i, j)| p(i, j)).collect()).collect())
            .unwrap()
    }

    fn eq2_pattern() -> BimatrixGame {
        grid([[(0, 1), (0, 0), (0, 1)], [(1, 1), (1, 0), (1, 1)], [(2, 1), (2, 0), (2, 1)]])
    }

    fn eq9_pattern() -> BimatrixGame {
        grid([[(0, 1), (0, 2), (0, 0)], [(1, 1), (1, 2), (1, 0)], [(2, 1), (2, 2), (2, 0)]])
    }

    #[test]
    fn parse_smallest_game() {
        let g = parse_game(r#"{"rows": 1, "cols": 1, "payoffs": [[[0, 0]]]}"#).unwrap();
        assert_eq!((g.rows(), g.cols()), (1, 1));
        assert_eq!(g.get(0, 0), &PayoffPair::zero());
    }

    #[test]
    fn parse_fraction_strings_round_trip() {
        let text = r#"{"rows": 3, "cols": 3, "payoffs": [
            [["-1/2", 1], [0, "2/4"], ["0.25", -3]],
            [[1, 1], [2, 2], [3, 3]],
            [["7/3", "-7/3"], [0, 0], [1, "-1/9"]]]}"#;
        let g = parse_game(text).unwrap();
        assert_eq!(g.get(0, 0).row, Rational::new(-1, 2));
        assert_eq!(g.get(0, 1).col, Rational::new(1, 2));
        assert_eq!(g.get(0, 2).row, Rational::new(1, 4));
        let out = serialize_game(&g);
        assert!(out.contains("\"-1/2\""));
        assert!(out.contains("\"1/2\""));
        assert!(!out.contains("2/4"));
        assert_eq!(parse_game(&out).unwrap(), g);
    }

    #[test]
    fn parse_rps_is_zero_sum() {
        let text = r#"{"rows": 3, "cols": 3, "payoffs": [
            [[0, 0], [-1, 1], [1, -1]],
            [[1, -1], [0, 0], [-1, 1]],
            [[-1, 1], [1, -1], [0, 0]]]}"#;
        let g = parse_game(text).unwrap();
        assert!(g.is_zero_sum());
        assert_eq!(g, rock_paper_scissors());
        assert_eq!(parse_game(&serialize_game(&g)).unwrap(), g);
    }

    #[test]
    fn parse_errors_carry_position() {
        let ragged = r#"{"rows": 2, "cols": 2, "payoffs": [[[0,0],[1,1]], [[0,0]]]}"#;
        assert!(matches!(parse_game(ragged), Err(Error::GameEntry { row: 1, col: 1, .. })));
        let word = r#"{"rows": 1, "cols": 2, "payoffs": [[[0,0],["x",1]]]}"#;
        assert!(matches!(parse_game(word), Err(Error::GameEntry { row: 0, col: 1, .. })));
        let short_pair = r#"{"rows": 1, "cols": 1, "payoffs": [[[0]]]}"#;
        assert!(matches!(parse_game(short_pair), Err(Error::GameEntry { row: 0, col: 0, .. })));
        let empty = r#"{"rows": 0, "cols": 0, "payoffs": []}"#;
        assert!(matches!(parse_game(empty), Err(Error::EmptyGame { .. })));
        assert!(matches!(parse_game("{"), Err(Error::GameFormat(_))));
        let count = r#"{"rows": 2, "cols": 1, "payoffs": [[[0,0]]]}"#;
        assert!(matches!(parse_game(count), Err(Error::GameFormat(_))));
    }

    #[test]
    fn canonical_lowest_terms() {
        let g = BimatrixGame::new(1, 1, vec![PayoffPair::new(Rational::new(2, 4), Rational::from_integer(3))])
            .unwrap();
        let text = serialize_game(&g);
        assert!(text.contains(r#"["1/2", 3]"#), "{text}");
    }

    #[test]
    fn shift_identity_and_inverse() {
        let g = sentinel(3, 4);
        assert_eq!(g.cyclic_shift(0, 0).unwrap(), g);
        let h = g.cyclic_shift(1, 3).unwrap();
        assert_eq!(h.cyclic_shift(2, 1).unwrap(), g);
        assert!(matches!(g.cyclic_shift(3, 0), Err(Error::ShiftOutOfRange { .. })));
        assert!(g.cyclic_shift(0, 4).is_err());
    }

    #[test]
    fn shift_by_one_column_gives_relabeled_pattern() {
        assert_eq!(sentinel(3, 3).cyclic_shift(0, 1).unwrap(), eq9_pattern());
    }

    #[test]
    fn equality() {
        let g = rock_paper_scissors();
        assert!(games_equal(&g, &g));
        let mut cells = g.cells().to_vec();
        cells[4] = PayoffPair::ints(1, 1);
        assert!(!games_equal(&g, &BimatrixGame::new(3, 3, cells).unwrap()));
        assert!(!games_equal(&eq2_pattern(), &eq9_pattern()));
    }

    #[test]
    fn relabeling_search() {
        let g = sentinel(3, 3);
        assert_eq!(find_cyclic_relabeling(&g, &g), Some((0, 0)));
        assert_eq!(find_cyclic_relabeling(&g, &eq9_pattern()), Some((0, 1)));
        assert_eq!(find_cyclic_relabeling(&g, &eq2_pattern()), None);
        assert_eq!(find_cyclic_relabeling(&g, &sentinel(3, 2)), None);
        // RPS is invariant under the diagonal shift (1, 1); the smallest shift wins.
        let rps = rock_paper_scissors();
        assert_eq!(find_cyclic_relabeling(&rps, &rps.cyclic_shift(1, 1).unwrap()), Some((0, 0)));
    }

    #[test]
    fn outcomes() {
        let constant = BimatrixGame::from_fn(2, 3, |_, _| PayoffPair::ints(4, 4)).unwrap();
        assert_eq!(outcome_set(&constant).len(), 1);
        assert_eq!(outcome_set(&sentinel(3, 3)).len(), 9);
        let all = outcome_set(&sentinel(3, 3));
        let seen = outcome_set(&eq2_pattern());
        assert_eq!(seen.len(), 6);
        let missing: BTreeSet<_> = all.difference(&seen).cloned().collect();
        assert_eq!(missing, [p(0, 2), p(1, 2), p(2, 2)].into_iter().collect());
    }
}
