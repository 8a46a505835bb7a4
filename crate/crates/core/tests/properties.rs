//! Property tests for the algebraic invariants: product and XOR-sum
//! structure, eigendecomposition contracts, circulant spectra and Gram
//! round-trips.

use proptest::prelude::*;

use syncval_core::classical::{local_value, sync_local_value};
use syncval_core::game::{
    is_synchronous, product_game, xor_sum, Game, GameInstance, PriorDistribution, XorGame,
};
use syncval_core::linalg::{circulant_spectrum, eig_sym, gram_vectors, Mat, SymMatrix};
use syncval_core::strategies::{game_value, Density};
use syncval_core::xor::cost_matrices;

fn prior_strategy(n: usize) -> impl Strategy<Value = PriorDistribution<f64>> {
    proptest::collection::vec(0.0f64..1.0, n * n).prop_map(move |raw| {
        let total: f64 = raw.iter().sum::<f64>().max(1e-9);
        PriorDistribution::new(n, n, raw.iter().map(|v| v / total).collect())
            .expect("normalized prior")
    })
}

fn xor_game_strategy(n: usize) -> impl Strategy<Value = XorGame<f64>> {
    (proptest::collection::vec(0u8..2, n * n), prior_strategy(n))
        .prop_map(move |(f, prior)| XorGame::new(n, f, prior).expect("valid game"))
}

fn game_strategy(n: usize, k: usize) -> impl Strategy<Value = Game> {
    proptest::collection::vec(proptest::bool::ANY, n * n * k * k).prop_map(move |bits| {
        let mut i = 0;
        Game::from_fn(n, n, k, k, |_, _, _, _| {
            let b = bits[i];
            i += 1;
            b
        })
        .expect("within cap")
    })
}

fn sym_matrix_strategy(max_n: usize) -> impl Strategy<Value = SymMatrix<f64>> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(-1.0f64..1.0, n * n)
            .prop_map(move |v| SymMatrix::new(n, v).expect("valid matrix"))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_prior_stays_normalized(
        p1 in prior_strategy(3),
        p2 in prior_strategy(2),
        g1 in game_strategy(3, 2),
        g2 in game_strategy(2, 2),
    ) {
        let i1 = GameInstance::new(g1, p1).unwrap();
        let i2 = GameInstance::new(g2, p2).unwrap();
        // the constructor rejects unnormalized priors, so surviving means
        // the product of sums stayed within 1e-12 of 1
        let prod = product_game(&i1, &i2).unwrap();
        prop_assert_eq!(prod.game.n_a(), 6);
    }

    #[test]
    fn product_synchronicity_is_conjunction(
        g1 in game_strategy(2, 2),
        g2 in game_strategy(2, 2),
    ) {
        // A factor that wins no diagonal tuple at all makes the product
        // vacuously synchronous, so the conjunction identity needs each
        // factor to win somewhere on the diagonal.
        let wins_diag = |g: &Game| {
            (0..g.n_a()).any(|x| (0..g.k_a()).any(|a| (0..g.k_a()).any(|b| g.wins(x, x, a, b))))
        };
        prop_assume!(wins_diag(&g1) && wins_diag(&g2));
        let p = PriorDistribution::<f64>::uniform(2, 2);
        let i1 = GameInstance::new(g1, p.clone()).unwrap();
        let i2 = GameInstance::new(g2, p).unwrap();
        let prod = product_game(&i1, &i2).unwrap();
        prop_assert_eq!(
            is_synchronous(&prod.game).unwrap(),
            is_synchronous(&i1.game).unwrap() && is_synchronous(&i2.game).unwrap()
        );
    }

    #[test]
    fn xor_sum_cost_is_kronecker(
        g1 in xor_game_strategy(2),
        g2 in xor_game_strategy(3),
    ) {
        let s = xor_sum(&g1, &g2).unwrap();
        let want: Mat<f64> = cost_matrices(&g1).a.kron(&cost_matrices(&g2).a);
        let got = cost_matrices(&s).a;
        for i in 0..6 {
            for j in 0..6 {
                prop_assert!((want.get(i, j) - got.get(i, j)).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn eig_reconstructs(m in sym_matrix_strategy(8)) {
        let n = m.n();
        let spec = eig_sym(&m);
        let v = &spec.eigenvectors;
        for i in 0..n {
            for j in 0..n {
                let recon: f64 = (0..n)
                    .map(|k| v.get(i, k) * spec.eigenvalues[k] * v.get(j, k))
                    .sum();
                prop_assert!((recon - m.get(i, j)).abs() <= 1e-8 * (1.0 + m.frobenius_norm()));
            }
        }
        let vtv = v.transpose().matmul(v);
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((vtv.get(i, j) - want).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn circulant_matches_eig(row_half in proptest::collection::vec(-1.0f64..1.0, 1..5)) {
        // build a symmetric first row from free coefficients
        let n = 2 * row_half.len();
        let mut row = vec![0.0; n];
        row[0] = row_half[0];
        for (j, &v) in row_half.iter().enumerate().skip(1) {
            row[j] = v;
            row[n - j] = v;
        }
        let m = SymMatrix::from_fn(n, |i, j| row[(j + n - i) % n]).unwrap();
        let mut a = circulant_spectrum(&row).unwrap();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let b = eig_sym(&m).eigenvalues;
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
    }

    #[test]
    fn gram_round_trip(rows in proptest::collection::vec(
        proptest::collection::vec(-1.0f64..1.0, 3), 2..7
    )) {
        let unit: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| {
                let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-3);
                r.iter().map(|x| x / norm).collect()
            })
            .collect();
        let n = unit.len();
        let p = SymMatrix::from_fn(n, |i, j| {
            unit[i].iter().zip(&unit[j]).map(|(a, b)| a * b).sum()
        })
        .unwrap();
        let vs = gram_vectors(&p, 1e-9).unwrap();
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = vs[i].iter().zip(&vs[j]).map(|(a, b)| a * b).sum();
                prop_assert!((dot - p.get(i, j)).abs() <= 1e-7);
            }
        }
    }

    #[test]
    fn sync_local_never_exceeds_local(g in xor_game_strategy(3)) {
        let inst = g.to_instance();
        let (loc, w) = local_value(&inst).unwrap();
        let (sync, f) = sync_local_value(&inst).unwrap();
        prop_assert!(sync <= loc + 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&loc));
        // witnesses reproduce their values through a deterministic density
        let d = Density::from_deterministic(3, 3, 2, 2, &w.f_a, &w.f_b).unwrap();
        prop_assert!((game_value(&inst, &d).unwrap() - loc).abs() <= 1e-12);
        let ds = Density::from_deterministic(3, 3, 2, 2, &f, &f).unwrap();
        prop_assert!((game_value(&inst, &ds).unwrap() - sync).abs() <= 1e-12);
    }
}
