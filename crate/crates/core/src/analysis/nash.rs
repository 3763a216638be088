//! Best responses and Nash equilibria of bimatrix games in exact arithmetic.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{BimatrixGame, PayoffPair};
use crate::rational::Rational;
use crate::schemes::{bilinear_value, MixedStrategy};

/// Largest dimension accepted by [`mixed_nash`].
pub const MAX_SUPPORT_DIM: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Player {
    Row,
    Col,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MixedEquilibrium {
    pub p: MixedStrategy,
    pub q: MixedStrategy,
    pub value: PayoffPair,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquilibriumSet {
    pub pure: Vec<(usize, usize)>,
    pub mixed: Vec<MixedEquilibrium>,
    /// Some support system had a continuum of solutions, or some equilibrium
    /// has more pure best responses than its support size. The listing may
    /// then be incomplete.
    pub degenerate: bool,
}

/// Payoff to `responder` of each of its pure strategies against `opponent`.
fn pure_payoffs(g: &BimatrixGame, responder: Player, opponent: &MixedStrategy) -> Result<Vec<Rational>> {
    let (own, other) = match responder {
        Player::Row => (g.rows(), g.cols()),
        Player::Col => (g.cols(), g.rows()),
    };
    if opponent.len() != other {
        return Err(Error::DimensionMismatch(format!(
            "opponent strategy has length {}, expected {other}",
            opponent.len()
        )));
    }
    Ok((0..own)
        .map(|s| {
            opponent
                .probabilities()
                .iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .map(|(t, w)| match responder {
                    Player::Row => &g.get(s, t).row * w,
                    Player::Col => &g.get(t, s).col * w,
                })
                .sum()
        })
        .collect())
}

/// All pure strategies of `responder` maximizing its expected payoff against
/// `opponent`, ties included, in increasing order.
pub fn best_responses(g: &BimatrixGame, responder: Player, opponent: &MixedStrategy) -> Result<Vec<usize>> {
    let payoffs = pure_payoffs(g, responder, opponent)?;
    let best = payoffs.iter().max().expect("non-empty game");
    Ok((0..payoffs.len()).filter(|&k| payoffs[k] == *best).collect())
}

/// No pure deviation strictly improves either player. Exact, zero tolerance.
pub fn is_nash(g: &BimatrixGame, p: &MixedStrategy, q: &MixedStrategy) -> Result<bool> {
    let value = bilinear_value(g, p, q)?;
    let rows = pure_payoffs(g, Player::Row, q)?;
    let cols = pure_payoffs(g, Player::Col, p)?;
    Ok(rows.iter().all(|x| *x <= value.row) && cols.iter().all(|x| *x <= value.col))
}

pub fn pure_nash(g: &BimatrixGame) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..g.rows() {
        for j in 0..g.cols() {
            let row_ok = (0..g.rows()).all(|k| g.get(k, j).row <= g.get(i, j).row);
            let col_ok = (0..g.cols()).all(|l| g.get(i, l).col <= g.get(i, j).col);
            if row_ok && col_ok {
                out.push((i, j));
            }
        }
    }
    out
}

/// Support enumeration over equal-size support pairs.
///
/// For supports `I` (rows) and `J` (columns) of size `k`, solves the
/// indifference systems
///
/// ```text
/// Σ_{j∈J} a_ij q_j = v  (i ∈ I),   Σ q_j = 1
/// Σ_{i∈I} b_ij p_i = u  (j ∈ J),   Σ p_i = 1
/// ```
///
/// and keeps nonnegative solutions that pass [`is_nash`]. Pure equilibria are
/// reported in `pure`; `mixed` holds equilibria where some player randomizes.
pub fn mixed_nash(g: &BimatrixGame) -> Result<EquilibriumSet> {
    let (n, m) = (g.rows(), g.cols());
    if n > MAX_SUPPORT_DIM || m > MAX_SUPPORT_DIM {
        return Err(Error::Unsupported(format!(
            "support enumeration is limited to {MAX_SUPPORT_DIM}x{MAX_SUPPORT_DIM} games, got {n}x{m}"
        )));
    }
    let mut set = EquilibriumSet { pure: pure_nash(g), mixed: Vec::new(), degenerate: false };
    for k in 1..=n.min(m) {
        for rows in subsets(n, k) {
            for cols in subsets(m, k) {
                let q_sol = solve_indifference(k, |a, b| g.get(rows[a], cols[b]).row.clone());
                let p_sol = solve_indifference(k, |a, b| g.get(rows[b], cols[a]).col.clone());
                let (q_part, q_unique) = match q_sol {
                    Some(s) => s,
                    None => continue,
                };
                let (p_part, p_unique) = match p_sol {
                    Some(s) => s,
                    None => continue,
                };
                set.degenerate |= !q_unique || !p_unique;
                let p = match embed(n, &rows, &p_part) {
                    Some(p) => p,
                    None => continue,
                };
                let q = match embed(m, &cols, &q_part) {
                    Some(q) => q,
                    None => continue,
                };
                if !is_nash(g, &p, &q)? {
                    continue;
                }
                let row_brs = best_responses(g, Player::Row, &q)?.len();
                let col_brs = best_responses(g, Player::Col, &p)?.len();
                set.degenerate |= row_brs > p.support().len() || col_brs > q.support().len();
                if p.pure_index().is_some() && q.pure_index().is_some() {
                    continue;
                }
                if set.mixed.iter().any(|e| e.p == p && e.q == q) {
                    continue;
                }
                let value = bilinear_value(g, &p, &q)?;
                set.mixed.push(MixedEquilibrium { p, q, value });
            }
        }
    }
    Ok(set)
}

fn embed(len: usize, support: &[usize], probs: &[Rational]) -> Option<MixedStrategy> {
    if probs.iter().any(Rational::is_negative) {
        return None;
    }
    let mut full = vec![Rational::zero(); len];
    for (&k, x) in support.iter().zip(probs) {
        full[k] = x.clone();
    }
    MixedStrategy::new(full).ok()
}

/// Solves `Σ_b coef(a, b) x_b - v = 0` for every `a`, `Σ x_b = 1`.
///
/// Returns the `x` part of a solution and whether it is unique; `None` when
/// the system is inconsistent. Free variables of a singular system are set
/// to zero.
fn solve_indifference(k: usize, coef: impl Fn(usize, usize) -> Rational) -> Option<(Vec<Rational>, bool)> {
    // Unknowns x_0..x_{k-1}, v; augmented column at index k + 1.
    let mut a: Vec<Vec<Rational>> = (0..k)
        .map(|r| {
            let mut row: Vec<Rational> = (0..k).map(|c| coef(r, c)).collect();
            row.push(-Rational::one());
            row.push(Rational::zero());
            row
        })
        .collect();
    let mut last = vec![Rational::one(); k];
    last.push(Rational::zero());
    last.push(Rational::one());
    a.push(last);
    let sol = gauss_solve(a, k + 1)?;
    Some((sol.0[..k].to_vec(), sol.1))
}

/// Gauss-Jordan elimination of an augmented `rows x (unknowns + 1)` system.
fn gauss_solve(mut a: Vec<Vec<Rational>>, unknowns: usize) -> Option<(Vec<Rational>, bool)> {
    let rows = a.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..unknowns {
        let Some(pr) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, pr);
        let inv = Rational::one() / &a[r][c];
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..=unknowns {
                    let delta = &f * &a[r][j];
                    a[i][j] = &a[i][j] - &delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if a[r..].iter().any(|row| !row[unknowns].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); unknowns];
    for (row, &c) in pivots.iter().enumerate() {
        x[c] = a[row][unknowns].clone();
    }
    Some((x, pivots.len() == unknowns))
}

/// `k`-element subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] != i + n - k) else { break };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
    out
}
