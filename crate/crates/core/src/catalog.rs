//! A few standard games used throughout the examples and tests.

use crate::game::{BimatrixGame, PayoffPair};

/// Rock-Paper-Scissors with strategies ordered (Rock, Paper, Scissors):
/// row payoffs `[[0,-1,1],[1,0,-1],[-1,1,0]]`, column payoffs negated.
pub fn rock_paper_scissors() -> BimatrixGame {
    let a = [[0, -1, 1], [1, 0, -1], [-1, 1, 0]];
    BimatrixGame::from_fn(3, 3, |i, j| PayoffPair::ints(a[i][j], -a[i][j])).expect("3x3")
}

pub fn matching_pennies() -> BimatrixGame {
    BimatrixGame::from_fn(2, 2, |i, j| if i == j { PayoffPair::ints(1, -1) } else { PayoffPair::ints(-1, 1) })
        .expect("2x2")
}

/// Pure coordination: `(1, 1)` on the diagonal, `(0, 0)` elsewhere.
pub fn coordination() -> BimatrixGame {
    BimatrixGame::from_fn(2, 2, |i, j| if i == j { PayoffPair::ints(1, 1) } else { PayoffPair::ints(0, 0) })
        .expect("2x2")
}

/// Game whose cell `(i, j)` pays `(10i + j, -(10i + j))`, so every cell of a
/// game with at most ten columns is distinguishable.
pub fn sentinel(rows: usize, cols: usize) -> BimatrixGame {
    BimatrixGame::from_fn(rows, cols, |i, j| {
        let v = (10 * i + j) as i64;
        PayoffPair::ints(v, -v)
    })
    .expect("non-empty dimensions")
}
