#![allow(dead_code)]

use mwgames::game::{BimatrixGame, PayoffPair};
use mwgames::rational::Rational;
use mwgames::schemes::{gmw_family, it3_family, mw2_family, MixedStrategy, OperatorFamily};
use mwgames::state::{DensityOperator, PureState};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_rational(rng: &mut impl Rng) -> Rational {
    Rational::new(rng.random_range(-30..=30), rng.random_range(1..=6))
}

pub fn random_game(rng: &mut impl Rng, rows: usize, cols: usize) -> BimatrixGame {
    BimatrixGame::from_fn(rows, cols, |_, _| PayoffPair::new(random_rational(rng), random_rational(rng))).unwrap()
}

pub fn random_strategy(rng: &mut impl Rng, len: usize) -> MixedStrategy {
    loop {
        let counts: Vec<i64> = (0..len).map(|_| rng.random_range(0..6)).collect();
        let total: i64 = counts.iter().sum();
        if total > 0 {
            return MixedStrategy::new(counts.iter().map(|&c| Rational::new(c, total)).collect()).unwrap();
        }
    }
}

/// Normalized state with complex Gaussian-like amplitudes (generic, inexact weights).
pub fn random_pure_state(rng: &mut impl Rng, rows: usize, cols: usize) -> PureState {
    loop {
        let amps: Vec<Complex64> = (0..rows * cols)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.1 {
            return PureState::new(rows, cols, amps.into_iter().map(|a| a / norm).collect()).unwrap();
        }
    }
}

/// Pure state whose basis probabilities are `c_k / T` with `T <= 64` and
/// arbitrary phases, so the diagonal snaps to exact rationals while the
/// density matrix keeps off-diagonal coherences.
pub fn random_rational_pure_state(rng: &mut impl Rng, rows: usize, cols: usize) -> PureState {
    let d = rows * cols;
    loop {
        let counts: Vec<u32> = (0..d).map(|_| rng.random_range(0..=(64 / d as u32).max(1))).collect();
        let total: u32 = counts.iter().sum();
        if total == 0 || total > 64 {
            continue;
        }
        let amps: Vec<Complex64> = counts
            .iter()
            .map(|&c| {
                let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                Complex64::from_polar((f64::from(c) / f64::from(total)).sqrt(), phase)
            })
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let amps = amps.into_iter().map(|a| a / norm).collect();
        return PureState::new(rows, cols, amps).unwrap();
    }
}

/// `A A† / tr(A A†)` for a random complex `A`: a generic full-rank mixed state.
pub fn random_mixed_state(rng: &mut impl Rng, rows: usize, cols: usize) -> DensityOperator {
    let d = rows * cols;
    let a = DMatrix::from_fn(d, d, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let m = &a * a.adjoint();
    let tr = m.trace();
    let m = m.map(|z| z / tr);
    // Symmetrize away rounding so the Hermiticity check sees an exact mirror.
    let h = (&m + m.adjoint()).map(|z| z * 0.5);
    DensityOperator::new(rows, cols, h).unwrap()
}

/// A family acting on dimension `dim`, sometimes one of the fixed legacy sets.
pub fn random_family(rng: &mut impl Rng, dim: usize) -> OperatorFamily {
    match (dim, rng.random_range(0..2)) {
        (3, 1) => it3_family(),
        (2, 1) => mw2_family(),
        _ => gmw_family(dim).unwrap(),
    }
}

pub fn sentinel_cell(i: usize, j: usize) -> PayoffPair {
    let v = (10 * i + j) as i64;
    PayoffPair::ints(v, -v)
}

pub fn pattern(cells: [[(usize, usize); 3]; 3]) -> BimatrixGame {
    BimatrixGame::from_rows(cells.iter().map(|r| r.iter().map(|&(i, j)| sentinel_cell(i, j)).collect()).collect())
        .unwrap()
}

/// Right-hand side of the `|01>` transformation under the transposition set.
pub fn flawed_01_pattern() -> BimatrixGame {
    pattern([[(0, 1), (0, 0), (0, 1)], [(1, 1), (1, 0), (1, 1)], [(2, 1), (2, 0), (2, 1)]])
}

/// Right-hand side of the `|01>` transformation under cyclic shifts.
pub fn cyclic_01_pattern() -> BimatrixGame {
    pattern([[(0, 1), (0, 2), (0, 0)], [(1, 1), (1, 2), (1, 0)], [(2, 1), (2, 2), (2, 0)]])
}

/// Independent oracle for a diagonal initial state: the induced cell
/// `(s, t)` is `Σ_k w_k P[row_op_s(k_i), col_op_t(k_j)]`, with operators
/// given as plain index maps.
pub fn brute_force_induced(
    g: &BimatrixGame,
    weights: &[((usize, usize), Rational)],
    row_ops: &[fn(usize) -> usize],
    col_ops: &[fn(usize) -> usize],
) -> Vec<Vec<PayoffPair>> {
    row_ops
        .iter()
        .map(|rs| {
            col_ops
                .iter()
                .map(|cs| {
                    let mut acc = PayoffPair::zero();
                    for ((i, j), w) in weights {
                        let cell = g.get(rs(*i), cs(*j));
                        acc.row += &cell.row * w;
                        acc.col += &cell.col * w;
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub const CYCLIC3: [fn(usize) -> usize; 3] = [|i| i, |i| (i + 1) % 3, |i| (i + 2) % 3];
pub const TRANSPOSITIONS3: [fn(usize) -> usize; 3] = [|i| i, |i| [1, 0, 2][i], |i| [2, 1, 0][i]];
