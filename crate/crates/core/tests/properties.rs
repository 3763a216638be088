
use mwgames::analysis::{check_recovery, compare_schemes, demo_flaw, is_nash, mixed_nash, FLOAT_TOL};
use mwgames::game::{BimatrixGame, PayoffPair};
use mwgames::rational::Rational;
use mwgames::schemes::{
    expected_payoff, expected_payoff_exact, final_state, gmw_family, induce_bimatrix, it3_family, mixed_value,
    payoff_operator, MixedStrategy,
};
use mwgames::state::{basis_state, parse_ket, DensityOperator, PureState};
use num_complex::Complex64;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=8).prop_map(|(n, d)| Rational::new(n, d))
}

fn pair() -> impl Strategy<Value = PayoffPair> {
    (rational(), rational()).prop_map(|(a, b)| PayoffPair::new(a, b))
}

fn game_of(rows: usize, cols: usize) -> impl Strategy<Value = BimatrixGame> {
    prop::collection::vec(pair(), rows * cols).prop_map(move |cells| BimatrixGame::new(rows, cols, cells).unwrap())
}

fn game() -> impl Strategy<Value = BimatrixGame> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(n, m)| game_of(n, m))
}

fn strategy(len: usize) -> impl Strategy<Value = MixedStrategy> {
    prop::collection::vec(0i64..6, len).prop_filter("nonzero", |c| c.iter().any(|&x| x > 0)).prop_map(|c| {
        let total: i64 = c.iter().sum();
        MixedStrategy::new(c.into_iter().map(|x| Rational::new(x, total)).collect()).unwrap()
    })
}

fn pure_state(rows: usize, cols: usize) -> impl Strategy<Value = PureState> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), rows * cols)
        .prop_filter("non-negligible", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 0.01)
        .prop_map(move |v| {
            let norm = v.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
            let amps = v.into_iter().map(|(a, b)| Complex64::new(a / norm, b / norm)).collect();
            PureState::new(rows, cols, amps).unwrap()
        })
}

/// Game, state and strategies of matching dimensions.
fn scenario() -> impl Strategy<Value = (BimatrixGame, PureState, MixedStrategy, MixedStrategy)> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(n, m)| (game_of(n, m), pure_state(n, m), strategy(n), strategy(m)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn shift_is_a_group_action(g in game(), r1 in 0usize..4, c1 in 0usize..4, r2 in 0usize..4, c2 in 0usize..4) {
        let (n, m) = (g.rows(), g.cols());
        let (r1, c1, r2, c2) = (r1 % n, c1 % m, r2 % n, c2 % m);
        let twice = g.cyclic_shift(r1, c1).unwrap().cyclic_shift(r2, c2).unwrap();
        prop_assert_eq!(twice, g.cyclic_shift((r1 + r2) % n, (c1 + c2) % m).unwrap());
        prop_assert_eq!(g.cyclic_shift(0, 0).unwrap(), g.clone());
    }

    #[test]
    fn shifted_games_are_recognized(g in game(), r in 0usize..4, c in 0usize..4) {
        let (r, c) = (r % g.rows(), c % g.cols());
        let h = g.cyclic_shift(r, c).unwrap();
        let found = g.find_cyclic_relabeling(&h);
        prop_assert!(found.is_some());
        let (fr, fc) = found.unwrap();
        prop_assert!((fr, fc) <= (r, c));
        prop_assert_eq!(g.cyclic_shift(fr, fc).unwrap(), h.clone());
        prop_assert_eq!(g.outcome_set(), h.outcome_set());
    }

    #[test]
    fn serialization_round_trips(g in game()) {
        let text = g.to_json();
        prop_assert_eq!(BimatrixGame::parse(&text).unwrap(), g.clone());
        prop_assert_eq!(BimatrixGame::parse(&serde_json::to_string(&g).unwrap()).unwrap(), g);
    }

    #[test]
    fn pure_density_is_valid_and_diagonal_matches(s in (1usize..=4, 1usize..=4).prop_flat_map(|(n, m)| pure_state(n, m))) {
        let rho = DensityOperator::from_pure(&s);
        prop_assert!((rho.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        prop_assert!(rho.hermiticity_error() < 1e-12);
        prop_assert!(rho.min_eigenvalue() >= -1e-9);
        let w = rho.diagonal_weights();
        for (k, a) in s.amplitudes().iter().enumerate() {
            prop_assert!((w.values[k] - a.norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn final_state_is_a_density_operator((g, s, p, q) in scenario()) {
        let (n, m) = (g.rows(), g.cols());
        let fin = final_state(&DensityOperator::from_pure(&s), &gmw_family(n).unwrap(), &gmw_family(m).unwrap(), &p, &q).unwrap();
        prop_assert!(fin.hermiticity_error() <= 1e-12);
        prop_assert!((fin.trace() - Complex64::new(1.0, 0.0)).norm() <= 1e-12);
        prop_assert!(fin.min_eigenvalue() >= -1e-9);
    }

    #[test]
    fn off_diagonal_terms_never_matter((g, s, p, q) in scenario()) {
        let (n, m) = (g.rows(), g.cols());
        let (fr, fc) = (gmw_family(n).unwrap(), gmw_family(m).unwrap());
        let rho = DensityOperator::from_pure(&s);
        let x = payoff_operator(&g);
        let full = expected_payoff(&x, &final_state(&rho, &fr, &fc, &p, &q).unwrap()).unwrap();
        let diag = expected_payoff(&x, &final_state(&rho.dephased(), &fr, &fc, &p, &q).unwrap()).unwrap();
        prop_assert!((full.row - diag.row).abs() <= 1e-12 && (full.col - diag.col).abs() <= 1e-12);
    }

    #[test]
    fn cyclic_scheme_recovers_random_games(g in game()) {
        let (n, m) = (g.rows(), g.cols());
        let rep = check_recovery(&g, &gmw_family(n).unwrap(), &gmw_family(m).unwrap()).unwrap();
        prop_assert_eq!(rep.entries.len(), n * m);
        prop_assert!(rep.all_pass());
        for i in 0..n {
            for j in 0..m {
                let rho = DensityOperator::from_pure(&basis_state(i, j, n, m).unwrap());
                let ig = induce_bimatrix(&g, &rho, &gmw_family(n).unwrap(), &gmw_family(m).unwrap()).unwrap();
                prop_assert_eq!(ig.game, g.cyclic_shift(i, j).unwrap());
            }
        }
    }

    #[test]
    fn flaw_verdicts_ignore_payoff_translation(g in game_of(3, 3), delta in rational()) {
        let it3 = it3_family();
        let a = check_recovery(&g, &it3, &it3).unwrap();
        let b = check_recovery(&g.translate(&delta), &it3, &it3).unwrap();
        for (x, y) in a.entries.iter().zip(&b.entries) {
            prop_assert_eq!((x.verdict, x.shift), (y.verdict, y.shift));
        }
        prop_assert_eq!(demo_flaw(&g).unwrap().1.verdict, demo_flaw(&g.translate(&delta)).unwrap().1.verdict);
    }

    #[test]
    fn comparison_is_symmetric(g in game_of(3, 3), i in 0usize..3, j in 0usize..3) {
        let gmw = gmw_family(3).unwrap();
        let it3 = it3_family();
        let rho = DensityOperator::from_pure(&basis_state(i, j, 3, 3).unwrap());
        let ab = compare_schemes(&g, &rho, (&gmw, &gmw), (&it3, &it3), FLOAT_TOL).unwrap();
        let ba = compare_schemes(&g, &rho, (&it3, &it3), (&gmw, &gmw), FLOAT_TOL).unwrap();
        prop_assert_eq!(ab.equal, ba.equal);
        prop_assert_eq!(&ab.game_a, &ba.game_b);
        prop_assert_eq!(ab.differences.len(), ba.differences.len());
        for (x, y) in ab.differences.iter().zip(&ba.differences) {
            prop_assert_eq!(x.cell, y.cell);
            prop_assert_eq!(&x.a, &y.b);
            prop_assert_eq!(&x.b, &y.a);
        }
    }

    #[test]
    fn four_term_state_identifies_the_two_schemes(g in game_of(3, 3)) {
        let rho = DensityOperator::from_pure(&parse_ket("(|01> + |10> + |02> + |20>)/2", 3, 3).unwrap());
        let gmw = gmw_family(3).unwrap();
        let it3 = it3_family();
        prop_assert!(compare_schemes(&g, &rho, (&gmw, &gmw), (&it3, &it3), FLOAT_TOL).unwrap().equal);
    }

    #[test]
    fn mixed_nash_output_is_verified(g in (1usize..=3, 1usize..=3).prop_flat_map(|(n, m)| game_of(n, m))) {
        let set = mixed_nash(&g).unwrap();
        for &(i, j) in &set.pure {
            prop_assert!(is_nash(&g, &MixedStrategy::pure(g.rows(), i), &MixedStrategy::pure(g.cols(), j)).unwrap());
        }
        for e in &set.mixed {
            prop_assert!(is_nash(&g, &e.p, &e.q).unwrap());
        }
        // Every finite game has an equilibrium; support enumeration finds one
        // unless the game is degenerate.
        if !set.degenerate {
            prop_assert!(!set.pure.is_empty() || !set.mixed.is_empty());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn bilinear_in_each_strategy(
        (g, p1, p2, q1, q2) in (1usize..=4, 1usize..=4)
            .prop_flat_map(|(n, m)| (game_of(n, m), strategy(n), strategy(n), strategy(m), strategy(m))),
        lam in 0i64..=6,
    ) {
        let rho = DensityOperator::from_pure(&basis_state(0, 0, g.rows(), g.cols()).unwrap());
        let ig = induce_bimatrix(&g, &rho, &gmw_family(g.rows()).unwrap(), &gmw_family(g.cols()).unwrap()).unwrap();
        let l = Rational::new(lam, 6);
        let k = Rational::one() - &l;
        let blend = |a: &MixedStrategy, b: &MixedStrategy| {
            MixedStrategy::new(a.probabilities().iter().zip(b.probabilities()).map(|(x, y)| x * &l + y * &k).collect())
                .unwrap()
        };
        let combine = |x: PayoffPair, y: PayoffPair| PayoffPair::new(&x.row * &l + &y.row * &k, &x.col * &l + &y.col * &k);

        let in_p = mixed_value(&ig, &blend(&p1, &p2), &q1).unwrap();
        prop_assert_eq!(in_p, combine(mixed_value(&ig, &p1, &q1).unwrap(), mixed_value(&ig, &p2, &q1).unwrap()));
        let in_q = mixed_value(&ig, &p1, &blend(&q1, &q2)).unwrap();
        prop_assert_eq!(in_q, combine(mixed_value(&ig, &p1, &q1).unwrap(), mixed_value(&ig, &p1, &q2).unwrap()));
    }

    #[test]
    fn bilinear_value_matches_float_pipeline((g, s, p, q) in scenario()) {
        let (n, m) = (g.rows(), g.cols());
        let (fr, fc) = (gmw_family(n).unwrap(), gmw_family(m).unwrap());
        let rho = DensityOperator::from_pure(&s);
        let ig = induce_bimatrix(&g, &rho, &fr, &fc).unwrap();
        let exact = mixed_value(&ig, &p, &q).unwrap();
        let float = expected_payoff(&payoff_operator(&g), &final_state(&rho, &fr, &fc, &p, &q).unwrap()).unwrap();
        prop_assert!(float.distance(&exact) <= 1e-9, "{:?} vs {}", float, exact);
    }

    #[test]
    fn exact_route_agrees_with_point_mass_cells((g, p, q) in (1usize..=4, 1usize..=4).prop_flat_map(|(n, m)| (game_of(n, m), strategy(n), strategy(m))), i in 0usize..4, j in 0usize..4) {
        let (n, m) = (g.rows(), g.cols());
        let (fr, fc) = (gmw_family(n).unwrap(), gmw_family(m).unwrap());
        let rho = DensityOperator::from_pure(&basis_state(i % n, j % m, n, m).unwrap());
        let e = expected_payoff_exact(&g, &rho.diagonal_weights(), &fr, &fc, &p, &q).unwrap();
        let ig = induce_bimatrix(&g, &rho, &fr, &fc).unwrap();
        prop_assert_eq!(e, mixed_value(&ig, &p, &q).unwrap());
    }

    #[test]
    fn scaled_kets_are_rejected(k in 2u32..9) {
        let text = format!("(|00> + |11>)/{k}");
        prop_assert!(parse_ket(&text, 2, 2).is_err());
    }
}
