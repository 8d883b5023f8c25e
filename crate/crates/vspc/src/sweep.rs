//! `(alpha, gamma, tau, seed)` sweeps of the best-response dynamics and the
//! versioned CSV they produce.
//!
//! Cells run on the rayon pool; rows are always written in spec order, so
//! identical specs give byte-identical files.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use vspc_core::analysis::{poa_curve, SearchSpace, SpaceSummary};
use vspc_core::epidemic::steady_state_with;
use vspc_core::game::{DynamicsConfig, Evaluator, GameParams};
use vspc_core::graph::{hopcounts, MAX_CONNECTED_NODES};
use vspc_core::Graph;

use crate::io::ParseError;
use crate::{Error, Result};

pub const CSV_VERSION_LINE: &str = "vspc-csv v1";

pub const SWEEP_COLUMNS: [&str; 13] = [
    "alpha",
    "gamma",
    "tau",
    "seed",
    "L",
    "avg_hopcount",
    "sum_infection",
    "social_cost",
    "ad_stable",
    "poa",
    "poa_kind",
    "converged",
    "audit_delta",
];

pub const POA_CURVE_COLUMNS: [&str; 7] = ["tau", "j_path", "j_star", "path_over_star", "star_over_path", "poa", "high_tau_bound"];

/// A flat `key = value` sweep description.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub n: usize,
    pub alpha_grid: Vec<f64>,
    pub gamma_grid: Vec<f64>,
    pub tau_grid: Vec<f64>,
    pub seeds: Vec<u64>,
    pub zero_gamma: bool,
    pub no_virus: bool,
    pub t_max: usize,
    pub p_init: f64,
    pub out: Option<PathBuf>,
}

fn spec_err(line: usize, message: impl Into<String>) -> Error {
    Error::Spec(ParseError { line, message: message.into() })
}

fn parse_list<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| spec_err(line, format!("{key}: cannot parse `{s}`"))))
        .collect()
}

fn parse_seeds(line: usize, value: &str) -> Result<Vec<u64>> {
    if let Some((a, b)) = value.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| spec_err(line, "seeds: bad range start"))?;
        let b: u64 = b.trim().parse().map_err(|_| spec_err(line, "seeds: bad range end"))?;
        return Ok((a..b).collect());
    }
    parse_list(line, "seeds", value)
}

fn parse_bool(line: usize, key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(spec_err(line, format!("{key}: expected true or false"))),
    }
}

impl SweepSpec {
    /// Recognized keys: `n`, `alpha_grid`, `gamma_grid`, `tau_grid`, `seeds`
    /// (list or `a..b`), `zero_gamma`, `no_virus`, `t_max`, `p_init`, `out`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut spec = SweepSpec {
            n: 0,
            alpha_grid: Vec::new(),
            gamma_grid: Vec::new(),
            tau_grid: Vec::new(),
            seeds: vec![0],
            zero_gamma: false,
            no_virus: false,
            t_max: 200,
            p_init: 0.5,
            out: None,
        };
        let mut seen_n = false;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| spec_err(line, "expected key = value"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "n" => {
                    spec.n = value.parse().map_err(|_| spec_err(line, "n: not a count"))?;
                    seen_n = true;
                }
                "alpha_grid" => spec.alpha_grid = parse_list(line, key, value)?,
                "gamma_grid" => spec.gamma_grid = parse_list(line, key, value)?,
                "tau_grid" => spec.tau_grid = parse_list(line, key, value)?,
                "seeds" => spec.seeds = parse_seeds(line, value)?,
                "zero_gamma" => spec.zero_gamma = parse_bool(line, key, value)?,
                "no_virus" => spec.no_virus = parse_bool(line, key, value)?,
                "t_max" => spec.t_max = value.parse().map_err(|_| spec_err(line, "t_max: not a count"))?,
                "p_init" => spec.p_init = value.parse().map_err(|_| spec_err(line, "p_init: not a number"))?,
                "out" => spec.out = Some(PathBuf::from(value)),
                _ => return Err(spec_err(line, format!("unknown key `{key}`"))),
            }
        }
        if !seen_n {
            return Err(spec_err(0, "missing n"));
        }
        if spec.zero_gamma && spec.gamma_grid.is_empty() {
            spec.gamma_grid = vec![0.0];
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=vspc_core::graph::MAX_NODES).contains(&self.n) {
            return Err(spec_err(0, "n must lie in 2..=64"));
        }
        for (name, grid) in [("alpha_grid", &self.alpha_grid), ("gamma_grid", &self.gamma_grid), ("tau_grid", &self.tau_grid)] {
            if grid.is_empty() {
                return Err(spec_err(0, format!("{name} is empty")));
            }
            if grid.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(spec_err(0, format!("{name} needs finite non-negative values")));
            }
        }
        if self.tau_grid.contains(&0.0) {
            return Err(spec_err(0, "tau_grid values must be positive"));
        }
        if self.seeds.is_empty() {
            return Err(spec_err(0, "seeds is empty"));
        }
        if self.t_max == 0 {
            return Err(spec_err(0, "t_max must be at least 1"));
        }
        if !(self.p_init > 0.0 && self.p_init <= 1.0) {
            return Err(spec_err(0, "p_init must lie in (0, 1]"));
        }
        Ok(())
    }

    pub fn params(&self, alpha: f64, gamma: f64, tau: f64) -> Result<GameParams> {
        let p = if self.zero_gamma { GameParams::zero_gamma(alpha, tau)? } else { GameParams::new(alpha, gamma, tau)? };
        Ok(p.with_no_virus(self.no_virus))
    }

    /// `exact` when the optimum is exhaustive over connected graphs.
    pub fn poa_kind(&self) -> &'static str {
        if self.n <= MAX_CONNECTED_NODES {
            "exact"
        } else {
            "reference"
        }
    }

    fn cells(&self) -> Vec<(f64, f64, f64)> {
        let mut cells = Vec::new();
        for &a in &self.alpha_grid {
            for &g in &self.gamma_grid {
                for &t in &self.tau_grid {
                    cells.push((a, g, t));
                }
            }
        }
        cells
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub gamma: f64,
    pub tau: f64,
    pub seed: u64,
    pub links: usize,
    pub avg_hopcount: f64,
    pub sum_infection: f64,
    pub social_cost: f64,
    pub ad_stable: bool,
    pub poa: f64,
    pub converged: bool,
    /// Independent recomputation of the social cost minus `social_cost`.
    pub audit_delta: f64,
    pub terminal: Graph,
}

/// Means over the seeds of one `(alpha, gamma, tau)` cell.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRow {
    pub alpha: f64,
    pub gamma: f64,
    pub tau: f64,
    pub mean_links: f64,
    pub mean_avg_hopcount: f64,
    pub mean_sum_infection: f64,
    pub mean_social_cost: f64,
    pub ad_stable_fraction: f64,
    /// Worst AD-stable terminal cost over the optimum; `None` when no run
    /// ended AD-stable.
    pub poa: Option<f64>,
    pub converged_fraction: f64,
    pub max_abs_audit_delta: f64,
    pub optimum: f64,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
    pub aggregates: Vec<AggregateRow>,
}

struct Run {
    row: SweepRow,
}

fn run_one(spec: &SweepSpec, p: &GameParams, seed: u64) -> Result<Run> {
    let mut ev = Evaluator::new(*p);
    let cfg = DynamicsConfig { n: spec.n, seed, p_init: spec.p_init, t_max: spec.t_max };
    let tr = ev.run_dynamics(&cfg)?;
    let (g, own) = tr.terminal();
    let social = ev.social_breakdown(g)?;
    let ad_stable = ev.is_ad_stable(g, own)?;

    let table = hopcounts(g);
    let hop_total = table.total().expect("dynamics keep the graph connected");
    let infection: f64 = if p.no_virus {
        0.0
    } else {
        steady_state_with(g, &p.epidemic, &p.solver)?.v.iter().sum()
    };
    let audit = p.alpha * g.link_count() as f64 + p.hop_weight() * hop_total as f64 + infection;
    let n = spec.n as f64;
    Ok(Run {
        row: SweepRow {
            alpha: p.alpha,
            gamma: if p.zero_gamma { 0.0 } else { p.gamma },
            tau: p.tau(),
            seed,
            links: g.link_count(),
            avg_hopcount: hop_total as f64 / (n * (n - 1.0)),
            sum_infection: social.infection,
            social_cost: social.total,
            ad_stable,
            poa: f64::NAN,
            converged: tr.converged(),
            audit_delta: audit - social.total,
            terminal: g.clone(),
        },
    })
}

/// Exhaustive optimum per cell for small `n`; otherwise the best of the
/// star, path, complete graph and the cell's terminal graphs.
fn optima(spec: &SweepSpec, cells: &[(f64, f64, f64)], rows: &[SweepRow]) -> Result<Vec<f64>> {
    let per_cell = spec.seeds.len();
    if spec.n <= MAX_CONNECTED_NODES {
        let mut taus: Vec<f64> = spec.tau_grid.clone();
        taus.sort_by(f64::total_cmp);
        taus.dedup();
        let summaries: Vec<(u64, SpaceSummary)> = taus
            .par_iter()
            .map(|&t| {
                let p = spec.params(0.0, 0.0, t)?;
                Ok((t.to_bits(), SpaceSummary::build(spec.n, &p, SearchSpace::AllConnected)?))
            })
            .collect::<Result<_>>()?;
        let by_tau: BTreeMap<u64, SpaceSummary> = summaries.into_iter().collect();
        return Ok(cells
            .iter()
            .map(|&(a, g, t)| {
                let w = if spec.zero_gamma { 0.0 } else { g };
                by_tau[&t.to_bits()].optimum(a, w).best_cost
            })
            .collect());
    }
    cells
        .par_iter()
        .enumerate()
        .map(|(k, &(a, g, t))| {
            let p = spec.params(a, g, t)?;
            let mut ev = Evaluator::new(p);
            let mut best = f64::INFINITY;
            for h in [Graph::star(spec.n)?, Graph::path(spec.n)?, Graph::complete(spec.n)?] {
                best = best.min(ev.social_cost(&h)?);
            }
            for r in &rows[k * per_cell..(k + 1) * per_cell] {
                best = best.min(r.social_cost);
            }
            Ok(best)
        })
        .collect()
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let cells = spec.cells();
    let jobs: Vec<(usize, u64)> = (0..cells.len()).flat_map(|c| spec.seeds.iter().map(move |&s| (c, s))).collect();
    let mut rows: Vec<SweepRow> = jobs
        .par_iter()
        .map(|&(c, seed)| {
            let (a, g, t) = cells[c];
            Ok(run_one(spec, &spec.params(a, g, t)?, seed)?.row)
        })
        .collect::<Result<_>>()?;
    let optima = optima(spec, &cells, &rows)?;

    let per_cell = spec.seeds.len();
    let mut aggregates = Vec::with_capacity(cells.len());
    for (k, &(a, g, t)) in cells.iter().enumerate() {
        let opt = optima[k];
        let chunk = &mut rows[k * per_cell..(k + 1) * per_cell];
        for r in chunk.iter_mut() {
            r.poa = r.social_cost / opt;
        }
        let m = per_cell as f64;
        let mean = |f: &dyn Fn(&SweepRow) -> f64| chunk.iter().map(f).sum::<f64>() / m;
        let worst = chunk.iter().filter(|r| r.ad_stable).map(|r| r.social_cost).fold(f64::NEG_INFINITY, f64::max);
        aggregates.push(AggregateRow {
            alpha: a,
            gamma: if spec.zero_gamma { 0.0 } else { g },
            tau: t,
            mean_links: mean(&|r| r.links as f64),
            mean_avg_hopcount: mean(&|r| r.avg_hopcount),
            mean_sum_infection: mean(&|r| r.sum_infection),
            mean_social_cost: mean(&|r| r.social_cost),
            ad_stable_fraction: mean(&|r| r.ad_stable as u8 as f64),
            poa: worst.is_finite().then(|| worst / opt),
            converged_fraction: mean(&|r| r.converged as u8 as f64),
            max_abs_audit_delta: chunk.iter().map(|r| r.audit_delta.abs()).fold(0.0, f64::max),
            optimum: opt,
        });
    }
    Ok(SweepResult { spec: spec.clone(), rows, aggregates })
}

fn join(xs: &[impl ToString]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        x.to_string()
    }
}

pub fn write_sweep_csv(res: &SweepResult, mut w: impl Write) -> Result<()> {
    let s = &res.spec;
    let io = |e| Error::Io { path: PathBuf::from("<output>"), source: e };
    let mut head = String::new();
    head.push_str(CSV_VERSION_LINE);
    head.push('\n');
    for (k, v) in [
        ("kind", "sweep".to_string()),
        ("n", s.n.to_string()),
        ("alpha_grid", join(&s.alpha_grid)),
        ("gamma_grid", join(&s.gamma_grid)),
        ("tau_grid", join(&s.tau_grid)),
        ("seeds", join(&s.seeds)),
        ("zero_gamma", s.zero_gamma.to_string()),
        ("no_virus", format!("{} (true means the epidemic solver is bypassed and v = 0)", s.no_virus)),
        ("t_max", s.t_max.to_string()),
        ("p_init", s.p_init.to_string()),
        ("poa_kind", s.poa_kind().to_string()),
        ("poa", "seed rows: social_cost / min J; mean rows: worst AD-stable terminal social_cost / min J".to_string()),
        ("mean_rows", "seed = mean; ad_stable and converged hold fractions; audit_delta holds the max |delta|".to_string()),
    ] {
        head.push_str(&format!("# {k}={v}\n"));
    }
    w.write_all(head.as_bytes()).map_err(io)?;

    let mut csv = csv::Writer::from_writer(&mut w);
    csv.write_record(SWEEP_COLUMNS)?;
    let per_cell = s.seeds.len();
    for (k, agg) in res.aggregates.iter().enumerate() {
        for r in &res.rows[k * per_cell..(k + 1) * per_cell] {
            csv.write_record([
                r.alpha.to_string(),
                r.gamma.to_string(),
                r.tau.to_string(),
                r.seed.to_string(),
                r.links.to_string(),
                num(r.avg_hopcount),
                num(r.sum_infection),
                num(r.social_cost),
                r.ad_stable.to_string(),
                num(r.poa),
                s.poa_kind().to_string(),
                r.converged.to_string(),
                num(r.audit_delta),
            ])?;
        }
        csv.write_record([
            agg.alpha.to_string(),
            agg.gamma.to_string(),
            agg.tau.to_string(),
            "mean".to_string(),
            num(agg.mean_links),
            num(agg.mean_avg_hopcount),
            num(agg.mean_sum_infection),
            num(agg.mean_social_cost),
            num(agg.ad_stable_fraction),
            agg.poa.map(num).unwrap_or_default(),
            s.poa_kind().to_string(),
            num(agg.converged_fraction),
            num(agg.max_abs_audit_delta),
        ])?;
    }
    csv.flush().map_err(io)?;
    Ok(())
}

/// Sweep CSV as a string.
pub fn sweep_csv(res: &SweepResult) -> Result<String> {
    let mut buf = Vec::new();
    write_sweep_csv(res, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

/// Path-versus-star PoA over a `tau` grid as CSV.
pub fn poa_curve_csv(n: usize, p: &GameParams, taus: &[f64]) -> Result<String> {
    let points = poa_curve(n, p, taus)?;
    let mut out = String::new();
    out.push_str(CSV_VERSION_LINE);
    out.push('\n');
    out.push_str("# kind=poa-curve\n");
    out.push_str(&format!("# n={n}\n# alpha={}\n", p.alpha));
    out.push_str(&format!("# gamma={}\n# zero_gamma={}\n# no_virus={}\n", p.gamma, p.zero_gamma, p.no_virus));
    out.push_str("# high_tau_bound is empty where tau (alpha + 1) <= 1\n");
    let mut buf = Vec::new();
    {
        let mut csv = csv::Writer::from_writer(&mut buf);
        csv.write_record(POA_CURVE_COLUMNS)?;
        for pt in &points {
            csv.write_record([
                pt.tau.to_string(),
                num(pt.j_path),
                num(pt.j_star),
                num(pt.path_over_star),
                num(pt.star_over_path),
                num(pt.poa),
                pt.high_tau_bound.map(num).unwrap_or_default(),
            ])?;
        }
        csv.flush().map_err(|e| Error::Io { path: PathBuf::from("<output>"), source: e })?;
    }
    out.push_str(std::str::from_utf8(&buf).expect("csv output is UTF-8"));
    Ok(out)
}

/// `steps` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..steps).map(|k| lo + (hi - lo) * k as f64 / (steps - 1) as f64).collect(),
    }
}
