//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! (with wall time) and fails if any criterion fails.
//!
//! Run with `cargo test --release -p vspc --test acceptance -- --nocapture`
//! to see the lines as they are produced.

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use vspc::sweep::{run_sweep, sweep_csv, SweepSpec};
use vspc_core::analysis::{
    path_star_poa, high_tau_poa_bound, exact_equilibria, poa_curve, structural_bounds, tree_extremes, SearchSpace,
    SpaceSummary,
};
use vspc_core::epidemic::{epidemic_threshold, steady_state_with, transient_solve, EpidemicParams, SolverSettings};
use vspc_core::game::{random_connected_profile, DynamicsConfig, Evaluator, GameParams, OwnershipProfile};
use vspc_core::Graph;

type Outcome = Result<String, String>;

/// Name, check and wall-time limit.
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn solve(g: &Graph, tau: f64) -> Result<Vec<f64>, String> {
    let s = steady_state_with(g, &EpidemicParams::new(tau).map_err(e)?, &SolverSettings::default()).map_err(e)?;
    ensure(s.converged, || format!("solver did not converge on {g:?} at tau {tau}"))?;
    Ok(s.v)
}

fn random_graph(rng: &mut ChaCha8Rng, n_lo: usize, n_hi: usize) -> Graph {
    let n = rng.gen_range(n_lo..=n_hi);
    let p = rng.gen_range(0.2..0.8);
    random_connected_profile(n, p, rng.gen()).expect("sampling succeeds").0
}

fn regular_closed_form() -> Outcome {
    let mut checked = 0;
    for n in 3..=24 {
        for g in [Graph::complete(n).unwrap(), Graph::cycle(n).unwrap()] {
            let d = g.degree(0) as f64;
            for k in 1..=40 {
                let tau = 0.05 * k as f64;
                let v = solve(&g, tau)?;
                if tau * d > 1.0 {
                    let want = 1.0 - 1.0 / (tau * d);
                    let worst = v.iter().map(|x| (x - want).abs()).fold(0.0, f64::max);
                    ensure(worst < 1e-8, || format!("n={n} d={d} tau={tau}: error {worst:e}"))?;
                } else {
                    ensure(v.iter().all(|&x| x == 0.0), || format!("n={n} d={d} tau={tau}: nonzero below threshold"))?;
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (graph, tau) cases"))
}

fn link_monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut cases = Vec::new();
    while cases.len() < 200 {
        let g = random_graph(&mut rng, 3, 8);
        let absent: Vec<(usize, usize)> =
            (0..g.n()).flat_map(|i| (i + 1..g.n()).map(move |j| (i, j))).filter(|&(i, j)| !g.has_link(i, j)).collect();
        if absent.is_empty() {
            continue;
        }
        let (u, v) = absent[rng.gen_range(0..absent.len())];
        let h = g.with_link(u, v).unwrap();
        let tc = epidemic_threshold(&h).map_err(e)?;
        let lo = tc * (1.0 + 1e-6);
        let tau = if lo >= 5.0 { lo } else { rng.gen_range(lo..=5.0) };
        cases.push((g, h, tau));
    }
    let strict: usize = cases
        .par_iter()
        .map(|(g, h, tau)| {
            let (before, after) = (solve(g, *tau)?, solve(h, *tau)?);
            for i in 0..g.n() {
                ensure(after[i] >= before[i] - 1e-9, || format!("{g:?} + link, tau {tau}: node {i} decreased"))?;
                if after[i] > 0.0 {
                    ensure(after[i] > before[i], || format!("{g:?} + link, tau {tau}: node {i} not strictly higher"))?;
                }
            }
            Ok(g.n())
        })
        .collect::<Result<Vec<_>, String>>()?
        .into_iter()
        .sum();
    Ok(format!("200 pairs, {strict} node comparisons"))
}

fn transient_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for k in 0..20 {
        let g = random_graph(&mut rng, 3, 8);
        let tc = epidemic_threshold(&g).map_err(e)?;
        // Alternate sub- and super-threshold cases, away from the critical slowdown.
        let tau = if k % 2 == 0 { tc * rng.gen_range(0.2..0.6) } else { rng.gen_range(1.5 * tc..(1.5 * tc).max(5.0)) };
        let p = EpidemicParams::new(tau).map_err(e)?;
        let fixed = solve(&g, tau)?;
        let ode = transient_solve(&g, &p, &vec![1.0; g.n()], 300.0, 0.005).map_err(e)?;
        let diff = fixed.iter().zip(&ode).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ensure(diff < 1e-4, || format!("graph {k}, tau {tau}: |ode - fixed point| = {diff:e}"))?;
        worst = worst.max(diff);
    }
    Ok(format!("20 graphs, max deviation {worst:.2e}"))
}

fn tree_extremes_check() -> Outcome {
    let jobs: Vec<(usize, &str)> = [6usize, 7].iter().flat_map(|&n| ["high", "star-max", "path-min"].map(|w| (n, w))).collect();
    let notes = jobs
        .par_iter()
        .map(|&(n, which)| {
            let nf = n as f64;
            let tau = match which {
                "high" => 5.0,
                "star-max" => 1.0 / (nf - 1.0).sqrt() + 0.01,
                _ => 1.0 / (2.0 * (PI / (nf + 1.0)).cos()) - 0.01,
            };
            let ext = tree_extremes(n, &GameParams::zero_gamma(1.0, tau).map_err(e)?).map_err(e)?;
            let all = |gs: &[Graph], f: fn(&Graph) -> bool| !gs.is_empty() && gs.iter().all(f);
            let labeled_paths = (2..=n).product::<usize>() / 2;
            let ok = match which {
                "high" => all(&ext.argmin, Graph::is_star) && ext.argmin.len() == n && all(&ext.argmax, Graph::is_path),
                "star-max" => all(&ext.argmax, Graph::is_star) && ext.argmax.len() == n,
                _ => all(&ext.argmin, Graph::is_path) && ext.argmin.len() == labeled_paths,
            };
            ensure(ok, || {
                format!("n={n} tau={tau:.4}: argmin {} graphs (first {:?}), argmax {} graphs", ext.argmin.len(), ext.best(), ext.argmax.len())
            })?;
            Ok(ext.trees_examined)
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(format!("{} trees scanned over 6 cases", notes.iter().sum::<u64>()))
}

fn tree_equilibria() -> Outcome {
    let combos: Vec<(f64, f64)> = [2.0, 5.0].iter().flat_map(|&t| [0.5, 1.0].map(|a| (t, a))).collect();
    let results = combos
        .par_iter()
        .map(|&(tau, alpha)| {
            let p = GameParams::zero_gamma(alpha, tau).map_err(e)?;
            let census = exact_equilibria(5, &p, SearchSpace::AllConnected).map_err(e)?;
            ensure(!census.equilibria.is_empty(), || format!("tau={tau} alpha={alpha}: no equilibria"))?;
            if let Some((g, _)) = census.equilibria.iter().find(|(g, _)| !g.is_tree()) {
                return Err(format!("tau={tau} alpha={alpha}: non-tree equilibrium {g:?}"));
            }
            let mut ev = Evaluator::new(p);
            let star = (Graph::star(5).unwrap(), OwnershipProfile::center_owned_star(5).unwrap());
            let path = (Graph::path(5).unwrap(), OwnershipProfile::chain_path(5).unwrap());
            for (name, (g, own)) in [("star", star), ("path", path)] {
                ensure(ev.is_nash_exact(&g, &own).map_err(e)?.exact_ne, || format!("tau={tau} alpha={alpha}: {name} is not an NE"))?;
            }
            let trees_without = census.graphs_without_equilibrium.iter().filter(|g| g.is_tree()).count();
            Ok((tau, alpha, census.equilibria.len(), census.profiles_checked, trees_without))
        })
        .collect::<Result<Vec<_>, String>>()?;
    let detail: Vec<String> = results
        .iter()
        .map(|(t, a, eqs, _, none)| format!("tau={t} alpha={a}: {eqs} NE, {none} trees without NE"))
        .collect();
    if results.iter().all(|r| r.4 == 0) {
        // Every 5-node tree is a star, a path or the spider with one long leg;
        // the smallest tree without an equilibrium ownership is the 6-node
        // double star. Report what n = 6 shows for context.
        let six = combos
            .par_iter()
            .map(|&(tau, alpha)| {
                let p = GameParams::zero_gamma(alpha, tau).map_err(e)?;
                let without = exact_equilibria(6, &p, SearchSpace::Trees).map_err(e)?.graphs_without_equilibrium;
                let shapes: std::collections::BTreeSet<Vec<usize>> = without
                    .iter()
                    .map(|g| {
                        let mut d = g.degrees();
                        d.sort_unstable();
                        d
                    })
                    .collect();
                Ok(format!("tau={tau} alpha={alpha}: {} labeled trees, degree sequences {shapes:?}", without.len()))
            })
            .collect::<Result<Vec<_>, String>>()?;
        return Err(format!(
            "no 5-node tree lacks an equilibrium ownership ({}); trees without one at n = 6: {}",
            detail.join("; "),
            six.join("; ")
        ));
    }
    Ok(format!("{} profiles per case; {}", results[0].3, detail.join("; ")))
}

fn complete_and_star_conditions() -> Outcome {
    let n = 6;
    let tau = 5.0;
    let edge = 1.0 / (tau * (n as f64 - 1.0));
    let k6 = Graph::complete(n).unwrap();
    let k6_own = OwnershipProfile::lower_endpoint(&k6);
    let star = Graph::star(n).unwrap();
    let star_own = OwnershipProfile::center_owned_star(n).unwrap();
    let mut checks = 0;
    for gamma in [1.0, 5.0] {
        let below = gamma - edge - 0.01;
        let above = gamma - edge + 0.01;
        for (alpha, k6_ne, star_ne) in [(below, true, false), (above, false, true)] {
            let mut ev = Evaluator::new(GameParams::new(alpha, gamma, tau).map_err(e)?);
            let got_k6 = ev.is_nash_exact(&k6, &k6_own).map_err(e)?.exact_ne;
            let got_star = ev.is_nash_exact(&star, &star_own).map_err(e)?.exact_ne;
            ensure(got_k6 == k6_ne, || format!("gamma={gamma} alpha={alpha:.4}: K6 exact_ne = {got_k6}"))?;
            ensure(got_star == star_ne, || format!("gamma={gamma} alpha={alpha:.4}: star exact_ne = {got_star}"))?;
            checks += 2;
        }
    }
    Ok(format!("{checks} verdicts"))
}

fn optimum_flip() -> Outcome {
    let (tau, gamma) = (5.0, 1.0);
    let mut notes = Vec::new();
    for n in [5usize, 6] {
        let p = GameParams::new(0.0, gamma, tau).map_err(e)?;
        let summary = SpaceSummary::build(n, &p, SearchSpace::AllConnected).map_err(e)?;
        let edge = 2.0 * gamma - 2.0 / (tau * (n as f64 - 1.0));
        let low = summary.optimum(edge * 0.9, gamma);
        let high = summary.optimum(edge * 1.1, gamma);
        let kn = Graph::complete(n).unwrap();
        ensure(low.best_graph == kn, || format!("n={n}: optimum at 0.9x is {:?}", low.best_graph))?;
        ensure(high.best_graph.is_star(), || format!("n={n}: optimum at 1.1x is {:?}", high.best_graph))?;
        notes.push(format!("n={n}: {} graphs", summary.len()));
    }
    Ok(notes.join(", "))
}

fn high_tau_bound() -> Outcome {
    let mut worst_gap = f64::INFINITY;
    let mut count = 0;
    for alpha in [0.0, 0.5, 1.0] {
        for k in 0..=70 {
            let tau = 3.0 + 0.1 * k as f64;
            let p = GameParams::zero_gamma(alpha, tau).map_err(e)?;
            let poa = path_star_poa(10, &p).map_err(e)?.poa;
            let bound = high_tau_poa_bound(alpha, tau).map_err(e)?;
            ensure(poa < bound, || format!("alpha={alpha} tau={tau:.1}: PoA {poa} >= bound {bound}"))?;
            worst_gap = worst_gap.min(bound - poa);
            count += 1;
        }
    }
    Ok(format!("{count} points, smallest margin {worst_gap:.3e}"))
}

fn poa_curve_shape() -> Outcome {
    let taus: Vec<f64> = (1..=4000).map(|k| 0.005 * k as f64).collect();
    let mut lines = Vec::new();
    let mut any = false;
    for alpha in [0.1, 0.5, 1.0] {
        let pts = poa_curve(10, &GameParams::zero_gamma(alpha, 1.0).map_err(e)?, &taus).map_err(e)?;
        let poa: Vec<f64> = pts.iter().map(|p| p.poa).collect();
        let (imax, peak) = poa.iter().copied().enumerate().fold((0, f64::MIN), |a, (i, x)| if x > a.1 { (i, x) } else { a });
        let tail = *poa.last().unwrap();
        let secondary = (1..poa.len() - 1)
            .filter(|&i| taus[i] > 1.0 && poa[i] > poa[i - 1] && poa[i] >= poa[i + 1])
            .map(|i| (taus[i], poa[i]))
            .next();
        let peak_ok = (2.5..=4.0).contains(&peak);
        let tail_ok = tail < 1.02 && poa[poa.len() - 400..].windows(2).all(|w| w[1] <= w[0] + 1e-12);
        let secondary_ok = secondary.is_some_and(|(_, v)| (1.0..=1.2).contains(&v));
        any |= peak_ok && tail_ok && secondary_ok;
        lines.push(format!(
            "alpha={alpha}: peak {peak:.3} at tau {:.3}, PoA(20) {tail:.4}, secondary {}",
            taus[imax],
            secondary.map_or("none".into(), |(t, v)| format!("{v:.3} at tau {t:.2}"))
        ));
    }
    let detail = lines.join("; ");
    if any {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn dynamics_sanity() -> Outcome {
    let n = 10;
    let alphas = [0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0];
    let mut jobs = Vec::new();
    for tau in [5.2, 1.4, 1.0] {
        for gamma in [0.1, 1.0, 5.0] {
            for (ai, &alpha) in alphas.iter().enumerate() {
                for seed in 0..20u64 {
                    jobs.push((tau, gamma, ai, alpha, seed));
                }
            }
        }
    }
    let runs = jobs
        .par_iter()
        .map(|&(tau, gamma, ai, alpha, seed)| {
            let mut ev = Evaluator::new(GameParams::new(alpha, gamma, tau).map_err(e)?);
            let tr = ev.run_dynamics(&DynamicsConfig { n, seed, p_init: 0.5, t_max: 200 }).map_err(e)?;
            let (g, own) = tr.terminal();
            let ad = !tr.converged() || ev.is_ad_stable(g, own).map_err(e)?;
            Ok((tau, gamma, ai, tr.converged(), ad, g.link_count(), g == &Graph::complete(n).unwrap()))
        })
        .collect::<Result<Vec<_>, String>>()?;
    let converged = runs.iter().filter(|r| r.3).count();
    let frac = converged as f64 / runs.len() as f64;
    ensure(frac >= 0.9, || format!("only {converged}/{} runs converged", runs.len()))?;
    ensure(runs.iter().all(|r| r.4), || "a converged terminal state is not AD-stable".into())?;

    let mut violations = Vec::new();
    for tau in [5.2, 1.4, 1.0] {
        for gamma in [0.1, 1.0, 5.0] {
            let means: Vec<f64> = (0..alphas.len())
                .map(|ai| {
                    let ls: Vec<f64> = runs.iter().filter(|r| r.0 == tau && r.1 == gamma && r.2 == ai).map(|r| r.5 as f64).collect();
                    ls.iter().sum::<f64>() / ls.len() as f64
                })
                .collect();
            for k in 1..means.len() {
                if means[k] > means[k - 1] {
                    violations.push(format!("tau={tau} gamma={gamma}: mean L {} -> {} at alpha {}", means[k - 1], means[k], alphas[k]));
                }
            }
        }
    }
    ensure(violations.is_empty(), || violations.join("; "))?;
    let complete: Vec<_> = runs.iter().filter(|r| r.0 == 5.2 && r.1 == 5.0 && r.2 == 0).collect();
    let kn = complete.iter().filter(|r| r.6).count();
    ensure(kn == complete.len(), || format!("gamma=5 alpha=0.01 tau=5.2: only {kn}/{} runs end at K10", complete.len()))?;
    Ok(format!("{converged}/{} converged, mean L non-increasing in alpha in all 9 (gamma, tau) cells, {kn}/20 runs end at K10", runs.len()))
}

fn structural() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cases: Vec<(Graph, f64, f64, f64)> = (0..200)
        .map(|_| (random_graph(&mut rng, 3, 10), rng.gen_range(2.0..=10.0), rng.gen_range(0.0..3.0), rng.gen_range(0.0..2.0)))
        .collect();
    cases.par_iter().try_for_each(|(g, tau, alpha, gamma)| {
        let b = structural_bounds(g, &GameParams::new(*alpha, *gamma, *tau).map_err(e)?).map_err(e)?;
        ensure(b.social_lower_bound <= b.social_cost + 1e-9, || format!("{g:?}: social bound {} > J {}", b.social_lower_bound, b.social_cost))?;
        ensure(b.infection_lower_bound <= b.infection_sum, || format!("{g:?}: infection bound exceeds the sum"))?;
        ensure(b.sum_inverse_degree <= b.inverse_degree_bound + 1e-9, || format!("{g:?}: inverse-degree bound violated"))
    })?;
    let mut tight = 0;
    for n in 3..=12 {
        let p = GameParams::new(1.0, 1.0, 5.0).map_err(e)?;
        let mut family = vec![Graph::star(n).unwrap(), Graph::complete(n).unwrap(), Graph::cycle(n).unwrap()];
        if n % 2 == 0 && n >= 6 {
            // Circulant with offsets 1 and n/2: 3-regular.
            let mut g = Graph::cycle(n).unwrap();
            for i in 0..n / 2 {
                g.add_link(i, i + n / 2).unwrap();
            }
            family.push(g);
        }
        for g in family {
            let b = structural_bounds(&g, &p).map_err(e)?;
            let gap = (b.inverse_degree_bound - b.sum_inverse_degree).abs();
            ensure(gap < 1e-9, || format!("{g:?}: inverse-degree bound not tight ({gap:e})"))?;
            tight += 1;
        }
    }
    Ok(format!("200 random graphs; equality on {tight} stars and regular graphs"))
}

fn determinism() -> Outcome {
    let text = "n = 6\nalpha_grid = 0.1, 1, 3\ngamma_grid = 0.5, 1\ntau_grid = 1.4, 5.2\nseeds = 0..4\n";
    let spec = SweepSpec::parse(text).map_err(e)?;
    let first = sweep_csv(&run_sweep(&spec).map_err(e)?).map_err(e)?;
    let second = sweep_csv(&run_sweep(&spec).map_err(e)?).map_err(e)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(e)?;
    let serial = pool.install(|| -> Result<String, String> { sweep_csv(&run_sweep(&spec).map_err(e)?).map_err(e) })?;
    ensure(first == second, || "two runs differ".into())?;
    ensure(first == serial, || "single-threaded run differs".into())?;
    Ok(format!("{} bytes identical across 3 runs", first.len()))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 12] = [
        ("regular-graph closed form", regular_closed_form, Duration::from_secs(1)),
        ("link addition never lowers infection", link_monotonicity, Duration::from_secs(30)),
        ("transient agrees with fixed point", transient_agreement, Duration::from_secs(60)),
        ("tree extremes", tree_extremes_check, Duration::from_secs(120)),
        ("equilibria are trees at n = 5", tree_equilibria, Duration::from_secs(600)),
        ("complete/star equilibrium conditions", complete_and_star_conditions, Duration::from_secs(60)),
        ("complete/star optimum flip", optimum_flip, Duration::from_secs(120)),
        ("path/star PoA below the high-tau bound", high_tau_bound, Duration::from_secs(60)),
        ("PoA curve shape at n = 10", poa_curve_shape, Duration::from_secs(60)),
        ("dynamics at n = 10", dynamics_sanity, Duration::from_secs(600)),
        ("structural bounds", structural, Duration::from_secs(60)),
        ("sweep determinism", determinism, Duration::from_secs(120)),
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout();
    writeln!(out).unwrap();
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if took > *limit => Err(format!("{msg}; took {took:.1?}, limit {limit:?}")),
            other => other,
        };
        let (tag, msg) = match &outcome {
            Ok(m) => ("PASS", m),
            Err(m) => ("FAIL", m),
        };
        // Written to the raw handle so the lines show up even when output is captured.
        writeln!(out, "{tag} {:>2} {name} [{took:.2?}]: {msg}", i + 1).unwrap();
        out.flush().unwrap();
        if outcome.is_err() {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
