use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use rwot::datasets::{embed_and_translate, image_to_distribution, GridImage};
use rwot::diagnostics::{kernel_stability, stability_optimal_shift};
use rwot::{
    build_cost_matrix, exact_solve, rw2_exact, rw2_sinkhorn, sinkhorn_solve, wasserstein_distance, weighted_mean,
    Distribution, SinkhornConfig, Solver,
};

fn distribution(max_points: usize, dim: usize) -> impl Strategy<Value = Distribution> {
    (1..=max_points)
        .prop_flat_map(move |m| {
            (prop::collection::vec(prop::collection::vec(-5.0..5.0f64, dim), m), prop::collection::vec(0.05..1.0f64, m))
        })
        .prop_map(|(pts, w)| Distribution::new(pts, w).unwrap())
}

fn shift(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-20.0..20.0f64, dim)
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        rng_seed: RngSeed::Fixed(0x5eed),
        ..ProptestConfig::default()
    })]

    #[test]
    fn rw2_symmetric_and_triangle(a in distribution(5, 2), b in distribution(5, 2), c in distribution(5, 2)) {
        let d = |x: &Distribution, y: &Distribution| rw2_exact(x, y).unwrap().rw_distance;
        prop_assert!((d(&a, &b) - d(&b, &a)).abs() <= 1e-9);
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-9);
        prop_assert!(d(&a, &a) <= 1e-9);
    }

    #[test]
    fn w2_is_a_metric(a in distribution(5, 2), b in distribution(5, 2), c in distribution(5, 2)) {
        let d = |x: &Distribution, y: &Distribution| wasserstein_distance(x, y, 2.0, &Solver::Exact).unwrap();
        prop_assert!((d(&a, &b) - d(&b, &a)).abs() <= 1e-9);
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-9);
    }

    #[test]
    fn pythagorean_split(a in distribution(6, 3), b in distribution(6, 3)) {
        let rep = rw2_exact(&a, &b).unwrap();
        let w2 = wasserstein_distance(&a, &b, 2.0, &Solver::Exact).unwrap();
        let lhs = w2 * w2;
        let rhs = rep.mean_gap.powi(2) + rep.rw_distance.powi(2);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.max(1.0), "{lhs} vs {rhs}");
        prop_assert!(rep.rw_distance <= w2 + 1e-12);
    }

    #[test]
    fn rw2_ignores_translation(a in distribution(5, 2), b in distribution(5, 2), s in shift(2), t in shift(2)) {
        let base = rw2_exact(&a, &b).unwrap().rw_distance;
        let moved = rw2_exact(&a.translate(&s).unwrap(), &b.translate(&t).unwrap()).unwrap().rw_distance;
        prop_assert!((base - moved).abs() <= 1e-9);
    }

    #[test]
    fn entropic_rw2_ignores_translation(a in distribution(5, 2), b in distribution(5, 2), s in shift(2)) {
        // λ = 1 keeps exp(-C/λ) representable for supports spanning [-5, 5]²
        let cfg = SinkhornConfig::new(1.0, 1e-10);
        let base = rw2_sinkhorn(&a, &b, &cfg).unwrap().rw_distance;
        let moved = rw2_sinkhorn(&a.translate(&s).unwrap(), &b, &cfg).unwrap().rw_distance;
        prop_assert!((base - moved).abs() <= 1e-6);
    }

    #[test]
    fn cost_matrix_matches_direct_formula(a in distribution(6, 3), b in distribution(6, 3), s in shift(3), p in 1.0..4.0f64) {
        let c = build_cost_matrix(&a, &b, p, &s).unwrap();
        for (i, x) in a.points().enumerate() {
            for (j, y) in b.points().enumerate() {
                let direct: f64 = x.iter().zip(&s).zip(y).map(|((xi, si), yi)| (xi + si - yi).abs().powf(p)).sum();
                prop_assert!((c.get(i, j) - direct).abs() <= 1e-9 * direct.max(1.0));
            }
        }
        prop_assert!(c.recomputation_error(&a, &b).unwrap() <= 1e-9 * c.inf_norm().max(1.0));
    }

    #[test]
    fn exact_coupling_is_feasible_and_optimal_value(a in distribution(7, 2), b in distribution(7, 2)) {
        let c = build_cost_matrix(&a, &b, 2.0, &[]).unwrap();
        let rep = exact_solve(&c, a.masses(), b.masses()).unwrap();
        let plan = rep.coupling.plan();
        prop_assert!(plan.iter().all(|&x| x >= -1e-15));
        for (got, want) in rep.coupling.row_sums().iter().zip(a.masses()) {
            prop_assert!((got - want).abs() <= 1e-12);
        }
        for (got, want) in rep.coupling.col_sums().iter().zip(b.masses()) {
            prop_assert!((got - want).abs() <= 1e-12);
        }
        let value: f64 = plan.iter().zip(c.entries()).map(|(p, c)| p * c).sum();
        prop_assert!((value - rep.transport_cost).abs() <= 1e-12 * value.max(1.0));
        // a basic solution has at most m + n - 1 positive entries
        prop_assert!(plan.iter().filter(|&&x| x > 1e-15).count() < a.len() + b.len());
    }

    #[test]
    fn sinkhorn_is_feasible_and_above_exact(a in distribution(6, 2), b in distribution(6, 2)) {
        let c = build_cost_matrix(&a, &b, 2.0, &[]).unwrap();
        let cfg = SinkhornConfig::new(1.0, 1e-8);
        let rep = sinkhorn_solve(&c, a.masses(), b.masses(), &cfg).unwrap();
        prop_assert!(rep.converged);
        prop_assert!(rep.coupling.residual() <= cfg.epsilon);
        let exact = exact_solve(&c, a.masses(), b.masses()).unwrap().transport_cost;
        // a plan with perturbed marginals can undercut the optimum by at most
        // ‖C‖∞ times the total marginal deviation
        let dev: f64 = rep.coupling.row_sums().iter().zip(a.masses()).map(|(x, y)| (x - y).abs()).sum::<f64>()
            + rep.coupling.col_sums().iter().zip(b.masses()).map(|(x, y)| (x - y).abs()).sum::<f64>();
        prop_assert!(rep.transport_cost >= exact - c.inf_norm() * dev - 1e-12);
    }

    #[test]
    fn centring_leaves_couplings_unchanged(a in distribution(5, 2), b in distribution(5, 2)) {
        // the centred quadratic cost differs by row and column constants only
        let gap: Vec<f64> = weighted_mean(&b).iter().zip(weighted_mean(&a)).map(|(y, x)| y - x).collect();
        let cfg = SinkhornConfig::new(0.5, 1e-12);
        let plain = sinkhorn_solve(&build_cost_matrix(&a, &b, 2.0, &[]).unwrap(), a.masses(), b.masses(), &cfg).unwrap();
        let centred = sinkhorn_solve(&build_cost_matrix(&a, &b, 2.0, &gap).unwrap(), a.masses(), b.masses(), &cfg).unwrap();
        for (x, y) in plain.coupling.plan().iter().zip(centred.coupling.plan()) {
            prop_assert!((x - y).abs() <= 1e-5);
        }
    }

    #[test]
    fn stability_peaks_at_mean_gap(a in distribution(6, 2), b in distribution(6, 2), s in shift(2)) {
        let best = stability_optimal_shift(&a, &b).unwrap();
        let g = |sh: &[f64]| kernel_stability(&build_cost_matrix(&a, &b, 2.0, sh).unwrap(), 0.1);
        let top = g(&best);
        prop_assert!(top >= g(&s) - 1e-9 * top.abs().max(1.0));
    }

    #[test]
    fn pixel_shift_commutes_with_normalisation(
        cells in prop::collection::vec(0.0..1.0f64, 16),
        tx in -6i64..=6,
        ty in -6i64..=6,
    ) {
        prop_assume!(cells.iter().any(|&c| c > 0.0));
        let img = GridImage::new(4, 4, cells).unwrap();
        let still = image_to_distribution(&embed_and_translate(&img, 16, 16, [0, 0]).unwrap()).unwrap();
        let moved = image_to_distribution(&embed_and_translate(&img, 16, 16, [tx, ty]).unwrap()).unwrap();
        let expected = still.translate(&[tx as f64, ty as f64]).unwrap();
        prop_assert_eq!(moved.coords(), expected.coords());
        for (x, y) in moved.masses().iter().zip(expected.masses()) {
            prop_assert!((x - y).abs() <= 1e-15);
        }
        prop_assert!((moved.masses().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn smaller_lambda_tracks_exact_more_closely() {
    let a = Distribution::uniform((0..8).map(|i| vec![(i as f64 * 0.37).sin(), (i as f64 * 0.91).cos()]).collect())
        .unwrap();
    let b = Distribution::uniform((0..8).map(|i| vec![(i as f64 * 0.53).cos(), (i as f64 * 0.29).sin()]).collect())
        .unwrap();
    let c = build_cost_matrix(&a, &b, 2.0, &[]).unwrap();
    let exact = exact_solve(&c, a.masses(), b.masses()).unwrap().transport_cost;
    let errors: Vec<f64> = [1.0, 0.3, 0.1, 0.03]
        .iter()
        .map(|&l| {
            let rep = sinkhorn_solve(&c, a.masses(), b.masses(), &SinkhornConfig::new(l, 1e-12)).unwrap();
            (rep.transport_cost - exact).abs()
        })
        .collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
}
