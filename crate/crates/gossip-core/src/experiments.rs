//! Batch drivers behind `verify`: each check replays a pinned family of
//! instances and reports pass/fail plus the measurements behind the verdict.
//! Families are seeded, so two runs produce identical reports.

use rand::Rng;
use rayon::prelude::*;

use crate::conductance::estimate::{estimate_critical, EstimateOptions};
use crate::conductance::multigraph::edge_induced_graph;
use crate::conductance::{
    check_relation, count_nonempty_classes, phi_ell_cut, phi_ell_exact, rational_f64,
    rational_str,
};
use crate::error::Result;
use crate::graph::generate::{self, TargetPredicate};
use crate::graph::{LatencyGraph, Latency};
use crate::guessing::{new_game, strategy_adaptive_exhaustive, strategy_random_per_endpoint};
use crate::protocols::{
    general_eid, l_dtg, path_discovery, push_pull, run_t_sequence, spanner_construct,
    unified_dissemination, PipelineParams, PushPullMode, Scenario, Winner,
};
use crate::sim::SimConfig;
use crate::util::{derive_seed, linear_fit, median, rational, seeded_rng};

/// `Smoke` trims instance counts and sizes for a quick wiring pass; `Full`
/// is the scale the frozen thresholds were calibrated at.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    Smoke,
    Full,
}

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    /// Optional tabular artifact, header row first.
    pub rows: Vec<Vec<String>>,
}

/// Minimum fit quality for the linear guessing-game scalings.
const FIT_MIN_R2: f64 = 0.9;
/// Allowed max/min spread of the probability-normalized round means.
const SCALING_SPREAD: f64 = 4.0;
/// Push-pull medians must stay within this multiple of (l*/phi*) log2 n.
/// Worst measured median/bound ratio at the calibration scale was 0.36.
const PUSHPULL_FACTOR: f64 = 1.0;
/// Spanner out-degree cap, as a multiple of n_hat^(1/k) log2 n. The largest
/// out-degree seen across the calibration seeds was 9 against a cap of 18.
const SPANNER_DEGREE_FACTOR: f64 = 1.5;
/// Phase-runner round caps, as multiples of l log^2 n and k log^2 n log k.
/// Worst measured ratios at the calibration scale were 0.57 and 0.55.
const LDTG_ROUND_FACTOR: f64 = 1.0;
const TSEQ_ROUND_FACTOR: f64 = 1.0;

pub fn run_criterion(id: u32, scale: Scale) -> Result<CriterionReport> {
    match id {
        1 => exact_matches_multigraph(scale),
        2 => sandwich_is_strict(scale),
        3 => ring_cut_analytics(),
        4 => guessing_scalings(scale),
        5 => pushpull_bound_shape(scale),
        6 => spanner_properties(scale),
        7 => phase_runner_postconditions(scale),
        8 => simultaneous_termination(scale),
        9 => strategy_tradeoff(scale),
        other => Err(crate::error::Error::InvalidParam(format!(
            "no criterion {other}; valid ids are 1..=9"
        ))),
    }
}

pub fn all_criteria(scale: Scale) -> Result<Vec<CriterionReport>> {
    (1..=9).map(|id| run_criterion(id, scale)).collect()
}

fn report(
    id: u32,
    name: &'static str,
    failures: Vec<String>,
    detail_ok: String,
    rows: Vec<Vec<String>>,
) -> CriterionReport {
    let passed = failures.is_empty();
    let detail = if passed {
        detail_ok
    } else {
        let mut d = format!("{} failure(s): ", failures.len());
        d.push_str(&failures.join("; "));
        d
    };
    CriterionReport { id, name, passed, detail, rows }
}

/// Connected graph with `n` in `[n_lo, n_hi]`, edge count up to `3n`, and
/// latencies up to `max_lat`.
fn sample_graph(salt: u64, i: u64, n_lo: usize, n_hi: usize, max_lat: Latency) -> Result<LatencyGraph> {
    let mut rng = seeded_rng(derive_seed(salt, i), 0x5a);
    let n = rng.gen_range(n_lo..=n_hi);
    let cap = n * (n - 1) / 2;
    let m = rng.gen_range(n - 1..=cap.min(3 * n));
    generate::random_connected(n, m, max_lat, derive_seed(salt, i ^ 0x8000_0000))
}

// --- 1: exact cut enumeration vs the loop-augmented edge graph ---

fn exact_matches_multigraph(scale: Scale) -> Result<CriterionReport> {
    let instances: u64 = match scale {
        Scale::Full => 500,
        Scale::Smoke => 60,
    };
    let salt = 0xAC01;
    let results: Vec<Option<String>> = (0..instances)
        .into_par_iter()
        .map(|i| {
            let g = match sample_graph(salt, i, 2, 10, 64) {
                Ok(g) => g,
                Err(e) => return Some(format!("instance {i}: {e}")),
            };
            for l in g.distinct_latencies() {
                let direct = match phi_ell_exact(&g, l) {
                    Ok((phi, _)) => phi,
                    Err(e) => return Some(format!("instance {i} l={l}: {e}")),
                };
                let dual = match edge_induced_graph(&g, l).conductance() {
                    Ok((phi, _)) => phi,
                    Err(e) => return Some(format!("instance {i} l={l} dual: {e}")),
                };
                if direct != dual {
                    return Some(format!(
                        "instance {i} l={l}: direct {} != dual {}",
                        rational_str(direct),
                        rational_str(dual)
                    ));
                }
            }
            None
        })
        .collect();
    let checks: usize = results.len();
    let failures: Vec<String> = results.into_iter().flatten().collect();
    Ok(report(
        1,
        "conductance equals its loop-augmented dual",
        failures,
        format!("{checks} instances agree exactly"),
        Vec::new(),
    ))
}

// --- 2: strict two-sided bound on the class-averaged conductance ---

/// Latencies redrawn in `[2, 64]`, skipping exact powers of two, until at
/// least two latency classes are realized. Both exclusions target known
/// boundary collapses of the upper comparison: a critical latency sitting
/// exactly on a class boundary (power of two) or a single realized class can
/// make it an equality, which the strict form is not meant to cover.
fn resample_latencies(g: &LatencyGraph, seed: u64) -> Result<LatencyGraph> {
    let palette: Vec<Latency> = (2..=64).filter(|v: &Latency| !v.is_power_of_two()).collect();
    let mut rng = seeded_rng(seed, 0x17);
    for _ in 0..1000 {
        let edges: Vec<_> = g
            .edges()
            .iter()
            .map(|&(u, v, _)| (u, v, palette[rng.gen_range(0..palette.len())]))
            .collect();
        let h = LatencyGraph::new(g.n(), &edges)?;
        if count_nonempty_classes(&h) >= 2 {
            return Ok(h);
        }
    }
    Err(crate::error::Error::InvalidParam(
        "could not realize two latency classes".into(),
    ))
}

fn sandwich_is_strict(scale: Scale) -> Result<CriterionReport> {
    let instances: u64 = match scale {
        Scale::Full => 500,
        Scale::Smoke => 60,
    };
    let salt = 0xAC02;
    let mut failures: Vec<String> = (0..instances)
        .into_par_iter()
        .map(|i| {
            let base = match sample_graph(salt, i, 3, 12, 64) {
                Ok(g) => g,
                Err(e) => return Some(format!("instance {i}: {e}")),
            };
            let g = match resample_latencies(&base, derive_seed(salt, i ^ 0xbeef)) {
                Ok(g) => g,
                Err(e) => return Some(format!("instance {i}: {e}")),
            };
            match check_relation(&g) {
                Ok(rep) if rep.holds => None,
                Ok(rep) => Some(format!(
                    "instance {i}: {} < {} < {} violated",
                    rational_str(rep.lower),
                    rational_str(rep.phi_avg),
                    rational_str(rep.upper)
                )),
                Err(e) => Some(format!("instance {i}: {e}")),
            }
        })
        .flatten()
        .collect();

    // Worked examples with every value pinned.
    let two_node = generate::path(&[5])?;
    let rep = check_relation(&two_node)?;
    if !(rep.lower == rational(1, 10)
        && rep.phi_avg == rational(1, 8)
        && rep.upper == rational(1, 5)
        && rep.holds)
    {
        failures.push(format!(
            "two-node example: got {} < {} < {}",
            rational_str(rep.lower),
            rational_str(rep.phi_avg),
            rational_str(rep.upper)
        ));
    }
    let triangle = LatencyGraph::new(3, &[(0, 1, 1), (0, 2, 1), (1, 2, 4)])?;
    let rep = check_relation(&triangle)?;
    if !(rep.lower == rational(1, 4)
        && rep.phi_avg == rational(3, 8)
        && rep.upper == rational(1, 1)
        && rep.holds)
    {
        failures.push(format!(
            "triangle example: got {} < {} < {}",
            rational_str(rep.lower),
            rational_str(rep.phi_avg),
            rational_str(rep.upper)
        ));
    }

    Ok(report(
        2,
        "critical/average conductance sandwich is strict",
        failures,
        format!("{instances} sampled instances plus both worked examples are strict"),
        Vec::new(),
    ))
}

// --- 3: layered-ring regularity and the halving-cut value ---

fn ring_cut_analytics() -> Result<CriterionReport> {
    let mut failures = Vec::new();
    let mut rows = vec![vec![
        "s".into(),
        "layers".into(),
        "degree".into(),
        "phi_half".into(),
        "expected".into(),
    ]];
    for (s, k) in [(3usize, 6usize), (4, 8), (5, 10)] {
        let ell = 16;
        let g = generate::ring_of_gadgets(s, k, ell, 9)?;
        let want_deg = 3 * s - 1;
        if (0..g.n()).any(|v| g.degree(v) != want_deg) {
            failures.push(format!("ring s={s} k={k}: not {want_deg}-regular"));
        }
        let half: Vec<usize> = (0..s * k / 2).collect();
        let cut = g.make_cut(&half)?;
        let phi = phi_ell_cut(&cut, ell);
        let expected = rational(
            2 * (s * s) as i128,
            ((s * k / 2) * (3 * s - 1)) as i128,
        );
        if phi != expected {
            failures.push(format!(
                "ring s={s} k={k}: halving cut {} != {}",
                rational_str(phi),
                rational_str(expected)
            ));
        }
        rows.push(vec![
            s.to_string(),
            k.to_string(),
            want_deg.to_string(),
            rational_str(phi),
            rational_str(expected),
        ]);
    }
    Ok(report(
        3,
        "layered rings are (3s-1)-regular with the predicted halving cut",
        failures,
        "three (s,layers) pairs match exactly".into(),
        rows,
    ))
}

// --- 4: guessing-game round scalings ---

fn mean(values: &[u64]) -> f64 {
    values.iter().sum::<u64>() as f64 / values.len() as f64
}

fn guessing_scalings(scale: Scale) -> Result<CriterionReport> {
    let (ms, trials): (&[usize], u64) = match scale {
        Scale::Full => (&[16, 32, 64, 128], 200),
        Scale::Smoke => (&[8, 16, 32], 40),
    };
    let salt = 0xAC04;
    let mut failures = Vec::new();
    let mut rows = vec![vec![
        "family".into(),
        "m".into(),
        "p".into(),
        "random_mean".into(),
        "adaptive_mean".into(),
    ]];

    // Hidden single pair: both strategies should scale linearly in m.
    let mut rand_means = Vec::new();
    let mut adapt_means = Vec::new();
    for &m in ms {
        let per_trial: Vec<(u64, u64)> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let seed = derive_seed(salt, (m as u64) << 32 | t);
                let mut g1 = new_game(m, &TargetPredicate::Singleton, seed).unwrap();
                let r1 =
                    strategy_random_per_endpoint(&mut g1, derive_seed(seed, 1), 500_000).unwrap();
                let mut g2 = new_game(m, &TargetPredicate::Singleton, seed).unwrap();
                let r2 = strategy_adaptive_exhaustive(&mut g2).unwrap();
                assert!(g1.is_halted() && g2.is_halted());
                (r1, r2)
            })
            .collect();
        let r: Vec<u64> = per_trial.iter().map(|&(a, _)| a).collect();
        let a: Vec<u64> = per_trial.iter().map(|&(_, b)| b).collect();
        rand_means.push(mean(&r));
        adapt_means.push(mean(&a));
        rows.push(vec![
            "singleton".into(),
            m.to_string(),
            String::new(),
            format!("{:.2}", mean(&r)),
            format!("{:.2}", mean(&a)),
        ]);
    }
    let xs: Vec<f64> = ms.iter().map(|&m| m as f64).collect();
    let (slope_r, _, r2_r) = linear_fit(&xs, &rand_means);
    let (slope_a, _, r2_a) = linear_fit(&xs, &adapt_means);
    if !(r2_r >= FIT_MIN_R2 && slope_r > 0.0) {
        failures.push(format!("random strategy not linear in m: slope {slope_r:.3} r2 {r2_r:.3}"));
    }
    if !(r2_a >= FIT_MIN_R2 && slope_a > 0.0) {
        failures.push(format!(
            "adaptive strategy not linear in m: slope {slope_a:.3} r2 {r2_a:.3}"
        ));
    }

    // Independent targets with probability p: random strategy ~ log(m)/p,
    // adaptive ~ 1/p. Check that p * mean is flat across p within a factor.
    let m = match scale {
        Scale::Full => 64usize,
        Scale::Smoke => 32,
    };
    let ps = [0.5f64, 0.25, 0.125, 0.0625];
    let mut rand_norm = Vec::new();
    let mut adapt_norm = Vec::new();
    for (pi, &p) in ps.iter().enumerate() {
        let per_trial: Vec<(u64, u64)> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let seed = derive_seed(salt ^ 0xff, (pi as u64) << 32 | t);
                let mut g1 = new_game(m, &TargetPredicate::RandomP(p), seed).unwrap();
                let r1 =
                    strategy_random_per_endpoint(&mut g1, derive_seed(seed, 2), 500_000).unwrap();
                let mut g2 = new_game(m, &TargetPredicate::RandomP(p), seed).unwrap();
                let r2 = strategy_adaptive_exhaustive(&mut g2).unwrap();
                assert!(g1.is_halted() && g2.is_halted());
                (r1, r2)
            })
            .collect();
        let r: Vec<u64> = per_trial.iter().map(|&(a, _)| a).collect();
        let a: Vec<u64> = per_trial.iter().map(|&(_, b)| b).collect();
        rand_norm.push(mean(&r) * p);
        adapt_norm.push(mean(&a) * p);
        rows.push(vec![
            "random_p".into(),
            m.to_string(),
            format!("{p}"),
            format!("{:.2}", mean(&r)),
            format!("{:.2}", mean(&a)),
        ]);
    }
    for (name, norm) in [("random", &rand_norm), ("adaptive", &adapt_norm)] {
        let hi = norm.iter().cloned().fold(f64::MIN, f64::max);
        let lo = norm.iter().cloned().fold(f64::MAX, f64::min);
        if hi / lo > SCALING_SPREAD {
            failures.push(format!(
                "{name} strategy p-normalized means spread {:.2}x exceeds {SCALING_SPREAD}x",
                hi / lo
            ));
        }
    }

    Ok(report(
        4,
        "guessing-strategy round counts scale as predicted",
        failures,
        format!(
            "singleton fits r2 {:.3}/{:.3}; normalized spreads within {SCALING_SPREAD}x",
            r2_r, r2_a
        ),
        rows,
    ))
}

// --- 5: push-pull completion versus the conductance bound ---

fn pushpull_bound_shape(scale: Scale) -> Result<CriterionReport> {
    let (m, hi, seeds, phis): (usize, Latency, u64, &[f64]) = match scale {
        Scale::Full => (64, 4096, 100, &[0.5, 0.25, 0.125]),
        Scale::Smoke => (24, 576, 20, &[0.5, 0.25]),
    };
    let salt = 0xAC05;
    let mut failures = Vec::new();
    let mut rows = vec![vec![
        "phi".into(),
        "phi_star".into(),
        "ell_star".into(),
        "bound".into(),
        "median_rounds".into(),
    ]];
    let mut worst = 0.0f64;
    for (pi, &phi) in phis.iter().enumerate() {
        // One reference instance per point supplies the measured critical
        // pair; the sampled estimator stands in for full enumeration at this
        // size.
        let reference = generate::gadget(
            m,
            1,
            hi,
            &TargetPredicate::RandomP(phi),
            true,
            derive_seed(salt, pi as u64),
        )?;
        let (phi_star, ell_star, _) = estimate_critical(
            &reference.graph,
            EstimateOptions { restarts: 24, seed: 71 },
        )?;
        let n = reference.graph.n();
        let bound =
            PUSHPULL_FACTOR * (ell_star as f64 / rational_f64(phi_star)) * (n as f64).log2();
        let mut rounds: Vec<u64> = (0..seeds)
            .into_par_iter()
            .map(|s| {
                let gadget = generate::gadget(
                    m,
                    1,
                    hi,
                    &TargetPredicate::RandomP(phi),
                    true,
                    derive_seed(salt, (pi as u64) << 32 | s),
                )
                .unwrap();
                let cfg = SimConfig::new(derive_seed(salt ^ 0x99, s), 8 * hi.max(64));
                let (metrics, _) = push_pull(
                    &gadget.graph,
                    PushPullMode::Broadcast { source: 0 },
                    &cfg,
                )
                .unwrap();
                assert!(metrics.completed, "broadcast did not finish");
                metrics.rounds_elapsed
            })
            .collect();
        let med = median(&mut rounds);
        worst = worst.max(med as f64 / bound);
        if (med as f64) > bound {
            failures.push(format!(
                "phi={phi}: median {med} exceeds bound {bound:.1}"
            ));
        }
        rows.push(vec![
            format!("{phi}"),
            rational_str(phi_star),
            ell_star.to_string(),
            format!("{bound:.1}"),
            med.to_string(),
        ]);
    }
    Ok(report(
        5,
        "push-pull medians stay under the critical-pair bound",
        failures,
        format!("worst median/bound ratio {worst:.2} at factor {PUSHPULL_FACTOR}"),
        rows,
    ))
}

// --- 6: spanner stretch and out-degree ---

fn spanner_properties(scale: Scale) -> Result<CriterionReport> {
    let seeds: u64 = match scale {
        Scale::Full => 50,
        Scale::Smoke => 10,
    };
    let salt = 0xAC06;
    let n = 64usize;
    let k = 12u32;
    let n_hat = 4096u64; // n^2, matching the dissemination default
    let degree_cap =
        SPANNER_DEGREE_FACTOR * (n_hat as f64).powf(1.0 / k as f64) * (n as f64).log2();
    let results: Vec<Option<String>> = (0..seeds)
        .into_par_iter()
        .map(|s| {
            for (label, max_lat) in [("unit", 1u64), ("weighted", 8)] {
                let g = match generate::random_connected(
                    n,
                    160,
                    max_lat,
                    derive_seed(salt, s << 8 | max_lat),
                ) {
                    Ok(g) => g,
                    Err(e) => return Some(format!("seed {s} {label}: {e}")),
                };
                let sp = match spanner_construct(&g, n_hat, k, derive_seed(salt ^ 0x61, s)) {
                    Ok(sp) => sp,
                    Err(e) => return Some(format!("seed {s} {label}: {e}")),
                };
                match sp.stretch_within(&g, (2 * k - 1) as u64) {
                    Ok(true) => {}
                    Ok(false) => return Some(format!("seed {s} {label}: stretch exceeded")),
                    Err(e) => return Some(format!("seed {s} {label}: {e}")),
                }
                if (sp.max_out_degree() as f64) > degree_cap {
                    return Some(format!(
                        "seed {s} {label}: out-degree {} over cap {degree_cap:.1}",
                        sp.max_out_degree()
                    ));
                }
            }
            None
        })
        .collect();
    let failures: Vec<String> = results.into_iter().flatten().collect();
    // The guarantees are probabilistic; a single bad seed is tolerated.
    let passed_with_allowance = failures.len() <= 1;
    let detail = if failures.is_empty() {
        format!("{seeds} seeds within stretch {} and degree cap {degree_cap:.1}", 2 * k - 1)
    } else {
        format!(
            "{} of {seeds} seeds failed (allowance 1): {}",
            failures.len(),
            failures.join("; ")
        )
    };
    Ok(CriterionReport {
        id: 6,
        name: "spanners keep stretch and out-degree in range",
        passed: passed_with_allowance,
        detail,
        rows: Vec::new(),
    })
}

// --- 7: phase-runner coverage postconditions and round budgets ---

fn phase_runner_postconditions(scale: Scale) -> Result<CriterionReport> {
    let (instances, n_hi): (u64, usize) = match scale {
        Scale::Full => (100, 48),
        Scale::Smoke => (20, 24),
    };
    let salt = 0xAC07;
    let results: Vec<Option<String>> = (0..instances)
        .into_par_iter()
        .map(|i| {
            let g = match sample_graph(salt, i, 8, n_hi, 8) {
                Ok(g) => g,
                Err(e) => return Some(format!("instance {i}: {e}")),
            };
            let n = g.n();
            let logn = (n as f64).log2();
            let lats = g.distinct_latencies();
            let ell = lats[lats.len() / 2];
            let cfg = SimConfig::new(derive_seed(salt, i), 2_000_000);

            let (metrics, state) = match l_dtg(&g, ell, &cfg) {
                Ok(r) => r,
                Err(e) => return Some(format!("instance {i} local: {e}")),
            };
            if !metrics.completed {
                return Some(format!("instance {i} local: did not finish"));
            }
            let bags = state.bags();
            for u in 0..n {
                for (v, lat) in g.adj(u) {
                    if *lat <= ell && !(bags[u].contains(*v) && bags[*v].contains(u)) {
                        return Some(format!(
                            "instance {i} local: pair ({u},{v}) unexchanged at ell={ell}"
                        ));
                    }
                }
            }
            let budget = LDTG_ROUND_FACTOR * ell as f64 * logn * logn;
            if metrics.rounds_elapsed as f64 > budget {
                return Some(format!(
                    "instance {i} local: {} rounds over budget {budget:.0}",
                    metrics.rounds_elapsed
                ));
            }

            let k = [4u64, 8, 16][(i % 3) as usize];
            let (metrics, runner) = match run_t_sequence(&g, k, &cfg) {
                Ok(r) => r,
                Err(e) => return Some(format!("instance {i} pattern: {e}")),
            };
            if !metrics.completed {
                return Some(format!("instance {i} pattern: did not finish"));
            }
            let bags = runner.bags();
            for u in 0..n {
                let dist = g.dijkstra(u);
                for v in 0..n {
                    if u != v
                        && dist[v].is_some_and(|d| d <= k)
                        && !(bags[u].contains(v) && bags[v].contains(u))
                    {
                        return Some(format!(
                            "instance {i} pattern: pair ({u},{v}) within {k} unexchanged"
                        ));
                    }
                }
            }
            let budget =
                TSEQ_ROUND_FACTOR * k as f64 * logn * logn * (k as f64).log2().max(1.0);
            if metrics.rounds_elapsed as f64 > budget {
                return Some(format!(
                    "instance {i} pattern: {} rounds over budget {budget:.0}",
                    metrics.rounds_elapsed
                ));
            }
            None
        })
        .collect();
    let failures: Vec<String> = results.into_iter().flatten().collect();
    Ok(report(
        7,
        "phase runners cover their radius within the round budget",
        failures,
        format!("{instances} graphs covered with zero violations"),
        Vec::new(),
    ))
}

// --- 8: dissemination terminates simultaneously holding everything ---

fn simultaneous_termination(scale: Scale) -> Result<CriterionReport> {
    let runs: u64 = match scale {
        Scale::Full => 200,
        Scale::Smoke => 32,
    };
    let salt = 0xAC08;
    let results: Vec<Option<String>> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeded_rng(derive_seed(salt, i), 0x88);
            let n = rng.gen_range(6..=12);
            let m = rng.gen_range(n - 1..=(n * (n - 1) / 2).min(2 * n));
            let g = match generate::random_connected(n, m, 4, derive_seed(salt, i ^ 0x1111)) {
                Ok(g) => g,
                Err(e) => return Some(format!("run {i}: {e}")),
            };
            let cfg = SimConfig::new(derive_seed(salt ^ 0x5e, i), 1_500_000);
            let params = PipelineParams { n_hat: Some(16), rr_scale: 1 };
            let (metrics, bags) = match i % 4 {
                0 => match general_eid(&g, Scenario::Known, params, &cfg) {
                    Ok((m, p)) => (m, p.bags().to_vec()),
                    Err(e) => return Some(format!("run {i} known: {e}")),
                },
                1 => match general_eid(&g, Scenario::Unknown, params, &cfg) {
                    Ok((m, p)) => (m, p.bags().to_vec()),
                    Err(e) => return Some(format!("run {i} unknown: {e}")),
                },
                _ => match path_discovery(&g, &cfg) {
                    Ok((m, p)) => (m, p.bags().to_vec()),
                    Err(e) => return Some(format!("run {i} pattern: {e}")),
                },
            };
            if !metrics.completed {
                return Some(format!("run {i}: did not terminate"));
            }
            if let Some(v) = bags.iter().position(|b| !b.is_full()) {
                return Some(format!("run {i}: node {v} terminated missing a rumor"));
            }
            let first = metrics.completion_round[0];
            if first.is_none() || metrics.completion_round.iter().any(|&r| r != first) {
                return Some(format!(
                    "run {i}: termination rounds differ: {:?}",
                    metrics.completion_round
                ));
            }
            None
        })
        .collect();
    let failures: Vec<String> = results.into_iter().flatten().collect();
    Ok(report(
        8,
        "doubling dissemination ends same-round with full bags",
        failures,
        format!("{runs} runs, zero violations"),
        Vec::new(),
    ))
}

// --- 9: push-pull versus the spanner pipeline as latency grows ---

fn strategy_tradeoff(scale: Scale) -> Result<CriterionReport> {
    let s_values: &[usize] = match scale {
        Scale::Full => &[2, 3, 4],
        Scale::Smoke => &[2],
    };
    let layers = 6usize;
    let ells: [Latency; 4] = [1, 4, 16, 64];
    let salt = 0xAC09;
    let mut rows = vec![vec![
        "s".into(),
        "layers".into(),
        "ell".into(),
        "pushpull_rounds".into(),
        "spanner_rounds".into(),
        "winner".into(),
    ]];
    let mut failures = Vec::new();
    let mut crossovers = Vec::new();
    for &s in s_values {
        let mut winners = Vec::new();
        for &ell in &ells {
            let g = generate::ring_of_gadgets(s, layers, ell, derive_seed(salt, s as u64))?;
            let cfg = SimConfig::new(derive_seed(salt ^ 0x7a, (s as u64) << 8 | ell), 2_000_000);
            let rep = unified_dissemination(&g, Scenario::Known, &cfg)?;
            rows.push(vec![
                s.to_string(),
                layers.to_string(),
                ell.to_string(),
                rep.push_pull.rounds_elapsed.to_string(),
                rep.spanner.rounds_elapsed.to_string(),
                match rep.winner {
                    Winner::PushPull => "push_pull".into(),
                    Winner::Spanner => "spanner".to_string(),
                },
            ]);
            winners.push(rep.winner);
        }
        if winners[0] != Winner::PushPull {
            failures.push(format!("s={s}: push-pull should win at unit latency"));
        }
        let cross = winners.iter().position(|&w| w == Winner::Spanner);
        match cross {
            None => failures.push(format!("s={s}: winner never flips to the spanner pipeline")),
            Some(c) => {
                if winners[c..].iter().any(|&w| w != Winner::Spanner) {
                    failures.push(format!("s={s}: winner flips back after the crossover"));
                }
                crossovers.push((s, c));
            }
        }
    }
    if crossovers.len() == s_values.len() && crossovers.len() > 1 {
        // Wider layers slow push-pull relays down, so the flip should come
        // no later as s grows.
        if crossovers.windows(2).any(|w| w[1].1 > w[0].1) {
            failures.push(format!("crossover indices not monotone: {crossovers:?}"));
        }
    }
    Ok(report(
        9,
        "winning strategy flips toward the spanner pipeline as latency grows",
        failures,
        format!("crossovers at {crossovers:?}"),
        rows,
    ))
}
