use proptest::prelude::*;
use vspc_core::analysis::{exact_equilibria, poa_pos, structural_bounds, SearchSpace};
use vspc_core::epidemic::{epidemic_threshold, fixed_point_defect, steady_state_with, EpidemicParams, SolverSettings};
use vspc_core::game::{DynamicsConfig, Evaluator, GameParams, OwnershipProfile, ActionKind};
use vspc_core::graph::{enumerate_trees, prufer_decode, spectral_radius, DEFAULT_SPECTRAL_TOL};
use vspc_core::Graph;

/// Connected graph on `n` nodes: a Prüfer tree plus extra links.
fn connected(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        let seq = prop::collection::vec(0..n, n - 2);
        let extra = prop::collection::vec(any::<bool>(), n * (n - 1) / 2);
        (Just(n), seq, extra, 0.0f64..1.0)
    })
    .prop_map(|(n, seq, extra, density)| {
        let mut g = prufer_decode(n, &seq).unwrap();
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                if extra[k] && (k as f64 / extra.len() as f64) < density && !g.has_link(i, j) {
                    g.add_link(i, j).unwrap();
                }
                k += 1;
            }
        }
        g
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn owned(g: Graph) -> impl Strategy<Value = (Graph, OwnershipProfile)> {
    let l = g.link_count();
    prop::collection::vec(any::<bool>(), l).prop_map(move |flips| {
        let mut it = flips.into_iter();
        let own = OwnershipProfile::from_fn(&g, |i, j| if it.next().unwrap() { i } else { j }).unwrap();
        (g.clone(), own)
    })
}

fn solve(g: &Graph, tau: f64) -> Vec<f64> {
    let s = steady_state_with(g, &EpidemicParams::new(tau).unwrap(), &SolverSettings::default()).unwrap();
    assert!(s.converged);
    s.v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectral_radius_is_relabeling_invariant(
        (g, perm) in connected(10).prop_flat_map(|g| { let n = g.n(); (Just(g), permutation(n)) })
    ) {
        let h = g.permuted(&perm).unwrap();
        let (a, b) = (spectral_radius(&g, DEFAULT_SPECTRAL_TOL).unwrap(), spectral_radius(&h, DEFAULT_SPECTRAL_TOL).unwrap());
        prop_assert!((a - b).abs() < 10.0 * DEFAULT_SPECTRAL_TOL * a.max(1.0));
    }

    #[test]
    fn infection_is_relabeling_equivariant(
        (g, perm) in connected(8).prop_flat_map(|g| { let n = g.n(); (Just(g), permutation(n)) }),
        tau in 0.2f64..5.0,
    ) {
        let h = g.permuted(&perm).unwrap();
        let (v, w) = (solve(&g, tau), solve(&h, tau));
        for i in 0..g.n() {
            prop_assert!((v[i] - w[perm[i]]).abs() < 1e-10, "node {i}: {} vs {}", v[i], w[perm[i]]);
        }
    }

    #[test]
    fn adding_a_link_never_lowers_infection(g in connected(8), pick in any::<prop::sample::Index>(), frac in 0.0f64..1.0) {
        let absent: Vec<(usize, usize)> = (0..g.n())
            .flat_map(|i| (i + 1..g.n()).map(move |j| (i, j)))
            .filter(|&(i, j)| !g.has_link(i, j))
            .collect();
        prop_assume!(!absent.is_empty());
        let (u, w) = *pick.get(&absent);
        let h = g.with_link(u, w).unwrap();
        let tc = epidemic_threshold(&h).unwrap();
        let tau = tc + (5.0 - tc) * frac.max(1e-3);
        prop_assume!(tau > tc * (1.0 + 1e-9));
        let (before, after) = (solve(&g, tau), solve(&h, tau));
        let both_positive = before.iter().all(|&x| x > 0.0) && after.iter().all(|&x| x > 0.0);
        for i in 0..g.n() {
            prop_assert!(after[i] >= before[i] - 1e-9);
            if both_positive {
                prop_assert!(after[i] > before[i], "node {i}: {} -> {}", before[i], after[i]);
            }
        }
    }

    #[test]
    fn threshold_separates_zero_and_positive(g in connected(9)) {
        let tc = epidemic_threshold(&g).unwrap();
        prop_assert!(solve(&g, 0.99 * tc).iter().all(|&x| x == 0.0));
        prop_assert!(solve(&g, 1.01 * tc).iter().all(|&x| x > 0.0));
    }

    #[test]
    fn converged_solutions_are_fixed_points(g in connected(12), tau in 0.1f64..10.0) {
        let s = SolverSettings::default();
        let st = steady_state_with(&g, &EpidemicParams::new(tau).unwrap(), &s).unwrap();
        prop_assert!(st.converged);
        prop_assert!(st.v.iter().all(|&x| (0.0..=1.0).contains(&x)));
        prop_assert!(fixed_point_defect(&g, tau, &st.v) < s.tol);
        prop_assert!(st.v.iter().all(|&x| x == 0.0) || st.v.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn vertex_transitive_graphs_are_uniform(n in 3usize..16, tau in 0.05f64..6.0) {
        for g in [Graph::complete(n).unwrap(), Graph::cycle(n).unwrap()] {
            let v = solve(&g, tau);
            let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
            prop_assert!(hi - lo < 1e-11);
            let d = g.degree(0) as f64;
            let closed = if tau * d > 1.0 { 1.0 - 1.0 / (tau * d) } else { 0.0 };
            prop_assert!((v[0] - closed).abs() < 1e-8);
        }
    }

    #[test]
    fn player_costs_sum_to_social_cost(
        (g, own) in connected(8).prop_flat_map(owned),
        alpha in 0.0f64..5.0, gamma in 0.0f64..3.0, tau in 0.2f64..6.0, zero_gamma in any::<bool>(),
    ) {
        let p = if zero_gamma { GameParams::zero_gamma(alpha, tau) } else { GameParams::new(alpha, gamma, tau) }.unwrap();
        let mut ev = Evaluator::new(p);
        let total: f64 = (0..g.n()).map(|i| ev.player_cost(&g, &own, i).unwrap().total).sum();
        let j = ev.social_cost(&g).unwrap();
        prop_assert!((total - j).abs() < 1e-9 * j.max(1.0));
    }

    #[test]
    fn social_cost_ignores_ownership(
        g in connected(6), alpha in 0.0f64..5.0, gamma in 0.0f64..3.0, tau in 0.2f64..6.0,
    ) {
        let p = GameParams::new(alpha, gamma, tau).unwrap();
        let mut ev = Evaluator::new(p);
        let j = ev.social_cost(&g).unwrap();
        for own in OwnershipProfile::enumerate(&g).take(64) {
            let sum: f64 = (0..g.n()).map(|i| ev.player_cost(&g, &own, i).unwrap().total).sum();
            prop_assert!((sum - j).abs() < 1e-9 * j.max(1.0));
        }
    }

    #[test]
    fn exact_equilibria_are_ad_stable(
        (g, own) in connected(5).prop_flat_map(owned),
        alpha in 0.0f64..3.0, gamma in 0.0f64..2.0, tau in 0.5f64..6.0,
    ) {
        let p = GameParams::new(alpha, gamma, tau).unwrap();
        let mut ev = Evaluator::new(p);
        let r = ev.is_nash_exact(&g, &own).unwrap();
        prop_assert_eq!(r.exact_ne, ev.is_equilibrium(&g, &own).unwrap());
        if r.exact_ne {
            prop_assert!(r.ad_stable);
        } else {
            prop_assert!(r.best_deviation.unwrap().delta < -p.improvement_epsilon);
        }
    }

    #[test]
    fn dynamics_moves_never_hurt_the_mover(
        n in 3usize..8, seed in any::<u64>(), alpha in 0.0f64..4.0, gamma in 0.0f64..2.0, tau in 0.5f64..6.0,
    ) {
        let p = GameParams::new(alpha, gamma, tau).unwrap();
        let mut ev = Evaluator::new(p);
        let tr = ev.run_dynamics(&DynamicsConfig { n, seed, p_init: 0.5, t_max: 60 }).unwrap();
        for a in &tr.actions {
            prop_assert!(a.cost_after <= a.cost_before);
            prop_assert_eq!(a.kind == ActionKind::N, a.cost_after == a.cost_before);
        }
        if tr.converged() {
            let (g, own) = tr.terminal();
            prop_assert!(ev.is_ad_stable(g, own).unwrap());
        }
    }

    #[test]
    fn truncation_bounds_hold(g in connected(9), alpha in 0.0f64..3.0, gamma in 0.0f64..2.0, tau in 2.0f64..10.0) {
        let b = structural_bounds(&g, &GameParams::new(alpha, gamma, tau).unwrap()).unwrap();
        prop_assert!(b.social_lower_bound <= b.social_cost + 1e-9);
        prop_assert!(b.infection_lower_bound < b.infection_sum);
        prop_assert!(b.sum_inverse_degree <= b.inverse_degree_bound + 1e-9);
        prop_assert!(b.sum_inverse_degree <= b.inverse_degree_bound_loose + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn poa_at_least_pos_at_least_one(alpha in 0.0f64..3.0, gamma in 0.0f64..2.0, tau in 0.5f64..6.0) {
        let p = GameParams::new(alpha, gamma, tau).unwrap();
        let eqs = exact_equilibria(4, &p, SearchSpace::AllConnected).unwrap().equilibria;
        prop_assume!(!eqs.is_empty());
        let r = poa_pos(4, &p, &eqs, SearchSpace::AllConnected).unwrap();
        prop_assert!(r.poa >= r.pos);
        prop_assert!(r.pos >= 1.0 - 1e-9);
    }
}

#[test]
fn tree_spectral_radius_between_path_and_star() {
    for n in 2..=8 {
        let lo = 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        let hi = ((n - 1) as f64).sqrt();
        for t in enumerate_trees(n).unwrap() {
            let l = spectral_radius(&t, DEFAULT_SPECTRAL_TOL).unwrap();
            assert!(lo - 1e-9 <= l && l <= hi + 1e-9, "{t:?}: {l}");
            if t.is_path() {
                assert!((l - lo).abs() < 1e-8);
            }
            if t.is_star() {
                assert!((l - hi).abs() < 1e-8);
            }
        }
    }
}
