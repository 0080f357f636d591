//! Release gates. Each test covers one gate and prints a single
//! `acceptance NN <name>: PASS|FAIL` line (written straight to stdout so the
//! checklist survives libtest capture), with detail lines on failure.

use std::collections::HashSet;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use percnb::conditions::{girth_condition_lhs, window_condition_statistic};
use percnb::coupling::{joint_sample, profile_horizon_needed, shell_lower_bound};
use percnb::graph::{
    complete_graph, girth, hamming_graph, lps_ramanujan_graph, petersen_graph,
    random_regular_graph, Graph,
};
use percnb::harness::{
    derive_seed, run_supercritical_sweep, run_window_sweep, EpsRule, ExperimentConfig,
    ExperimentKind, FamilySpec, GeometryStats,
};
use percnb::nbrw::{average_return_profile, loop_identity_residual, return_probabilities};
use percnb::percolation::{grow_ball, multi_root_process, CoinLedger};
use percnb::tree::{
    level_second_moment, subcritical_survival_check, supercritical_survival_check,
    survival_bounds, survival_exact,
};

fn report(tag: &str, failures: Vec<String>) {
    let mut out = std::io::stdout().lock();
    let verdict = if failures.is_empty() { "PASS" } else { "FAIL" };
    writeln!(out, "acceptance {tag}: {verdict}").unwrap();
    for f in failures.iter().take(12) {
        writeln!(out, "    {f}").unwrap();
    }
    if failures.len() > 12 {
        writeln!(out, "    ... and {} more", failures.len() - 12).unwrap();
    }
    drop(out);
    assert!(failures.is_empty(), "acceptance {tag}: {} check(s) failed", failures.len());
}

fn zoo() -> Vec<(&'static str, Graph)> {
    vec![
        ("K_4", complete_graph(4).unwrap()),
        ("Petersen", petersen_graph()),
        ("H(2,3)", hamming_graph(2, 3).unwrap()),
        ("H(3,3)", hamming_graph(3, 3).unwrap()),
        ("LPS(5,13)", lps_ramanujan_graph(5, 13).unwrap()),
    ]
}

fn base_config(kind: ExperimentKind, family: FamilySpec, master_seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        kind,
        family: Some(family),
        lambda_grid: Vec::new(),
        eps_rule: None,
        trials: 0,
        master_seed,
        out: None,
        geometry: GeometryStats::default(),
        delta: 0.01,
        p: None,
        r: None,
        avoid_size: None,
        degree: None,
        eps_grid: Vec::new(),
        r_grid: Vec::new(),
        assertions: Vec::new(),
    }
}

#[test]
fn pairing_identity_residual_vanishes() {
    let mut failures = Vec::new();
    for (name, g) in zoo() {
        for t in 0..=6 {
            for t2 in 0..=6 {
                let res = loop_identity_residual(&g, 0, t, t2).unwrap();
                if res >= 1e-10 {
                    failures.push(format!("{name} t={t} t2={t2}: residual {res:.3e}"));
                }
            }
        }
    }
    report("01 pairing identity residual", failures);
}

#[test]
fn return_profile_frozen_values() {
    let mut failures = Vec::new();
    let k4 = complete_graph(4).unwrap();
    let pet = petersen_graph();
    let h23 = hamming_graph(2, 3).unwrap();
    for (name, g, s, want) in [
        ("K_4", &k4, 3usize, 0.5),
        ("K_4", &k4, 4, 0.25),
        ("Petersen", &pet, 5, 0.25),
        ("H(2,3)", &h23, 3, 1.0 / 9.0),
    ] {
        let prof = return_probabilities(g, 0, s).unwrap();
        let got = prof.at(s);
        if (got - want).abs() > 1e-12 {
            failures.push(format!("{name} R[{s}]: got {got:.12}, want {want:.12}"));
        }
    }
    for (name, g) in zoo() {
        let girth = girth(&g).unwrap();
        let prof = return_probabilities(&g, 0, girth).unwrap();
        for s in 1..girth {
            if prof.at(s).abs() > 1e-15 {
                failures.push(format!("{name} R[{s}] = {} below girth {girth}", prof.at(s)));
            }
        }
    }
    report("02 return profile frozen values", failures);
}

#[test]
fn tree_survival_and_moments() {
    let mut failures = Vec::new();
    for d in [3usize, 4, 5, 10] {
        for i in 1..=20 {
            let p = i as f64 / 21.0;
            for r in 1..=50 {
                let q = survival_exact(d, p, r).unwrap();
                let (lo, hi) = survival_bounds(d, p, r).unwrap();
                if !(lo <= q && q <= hi) {
                    failures.push(format!(
                        "survival d={d} p={p:.3} r={r}: {q:.3e} outside [{lo:.3e}, {hi:.3e}]"
                    ));
                }
            }
        }
    }
    for eps in [0.05, 0.1, 0.2, 0.4] {
        for r in 10..=200 {
            let sup = supercritical_survival_check(3, eps, r).unwrap();
            if !sup.holds() {
                failures.push(format!(
                    "supercritical eps={eps} r={r}: {:.3e} outside [{:.3e}, {:.3e}]",
                    sup.exact, sup.lower, sup.upper
                ));
            }
            let sub = subcritical_survival_check(3, eps, r).unwrap();
            if !sub.holds() {
                failures.push(format!(
                    "subcritical eps={eps} r={r}: {:.3e} outside [{:.3e}, {:.3e}]",
                    sub.exact, sub.lower, sub.upper
                ));
            }
        }
    }
    for p in [0.3, 0.7] {
        for r in 1..=3 {
            let got = level_second_moment(3, p, r).unwrap();
            let want = enumerated_second_moment(p, r);
            if (got - want).abs() > 1e-10 * want.max(1.0) {
                failures.push(format!(
                    "second moment d=3 p={p} r={r}: recursion {got:.12}, enumeration {want:.12}"
                ));
            }
        }
    }
    report("03 tree survival and moments", failures);
}

/// E[X_r^2] for X_r = open-path vertices at level r of the depth-r tree with
/// root degree 3 and branching 2, by summing over all edge configurations.
fn enumerated_second_moment(p: f64, r: usize) -> f64 {
    let mut parent: Vec<Option<usize>> = vec![None; 3];
    let mut prev_first = 0usize;
    for level in 2..=r {
        let prev_count = 3usize << (level - 2);
        let base = parent.len();
        for j in 0..2 * prev_count {
            parent.push(Some(prev_first + j / 2));
        }
        prev_first = base;
    }
    let e_total = parent.len();
    let leaf_start = e_total - 3 * (1usize << (r - 1));
    let masks: Vec<u32> = (leaf_start..e_total)
        .map(|e| {
            let mut m = 0u32;
            let mut cur = Some(e);
            while let Some(x) = cur {
                m |= 1 << x;
                cur = parent[x];
            }
            m
        })
        .collect();
    let mut total = 0.0;
    for open in 0u32..(1u32 << e_total) {
        let pc = open.count_ones() as i32;
        let w = p.powi(pc) * (1.0 - p).powi(e_total as i32 - pc);
        let x = masks.iter().filter(|&&m| open & m == m).count() as f64;
        total += w * x * x;
    }
    total
}

#[test]
fn coupling_sandwich_with_strict_witness() {
    const SEED: u64 = 0xACC4;
    let mut failures = Vec::new();
    let pet = petersen_graph();
    let h23 = hamming_graph(2, 3).unwrap();
    for (gi, (name, g)) in [("Petersen", &pet), ("H(2,3)", &h23)].into_iter().enumerate() {
        let n = g.n() as u32;
        let d = g.regular_degree().unwrap();
        let pc = 1.0 / (d as f64 - 1.0);
        for (pi, p) in [0.3, pc, 0.7].into_iter().enumerate() {
            let mut violations = 0usize;
            let mut strict = 0usize;
            for t in 0..10_000u64 {
                let r = 1 + (t % 4) as usize;
                let avoid: HashSet<u32> = if t % 8 < 4 {
                    HashSet::new()
                } else {
                    HashSet::from([n - 2, n - 1])
                };
                let key = &[gi as u64, pi as u64, t];
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(SEED, key));
                let v = loop {
                    let c = rng.random_range(0..n);
                    if !avoid.contains(&c) {
                        break c;
                    }
                };
                let mut ledger =
                    CoinLedger::new(p, derive_seed(SEED, &[gi as u64, pi as u64, t, 1])).unwrap();
                let fresh = derive_seed(SEED, &[gi as u64, pi as u64, t, 2]);
                let s = joint_sample(g, v, r, &avoid, &mut ledger, fresh).unwrap();
                if !s.sandwich_holds() {
                    violations += 1;
                } else if (0..s.h.len()).any(|k| s.x[k] < s.shell_sizes[k] as u64) {
                    strict += 1;
                }
            }
            if violations > 0 {
                failures.push(format!("{name} p={p:.3}: {violations} sandwich violations"));
            }
            if strict == 0 {
                failures.push(format!("{name} p={p:.3}: no strict witness in 10000 samples"));
            }
        }
    }
    report("04 coupling sandwich with strict witness", failures);
}

#[test]
fn shell_expectation_floor() {
    const SEED: u64 = 0xACC5;
    const TRIALS: usize = 100_000;
    let mut failures = Vec::new();
    let k27 = complete_graph(27).unwrap();
    let h23 = hamming_graph(2, 3).unwrap();
    for (gi, (name, g)) in [("K_27", &k27), ("H(2,3)", &h23)].into_iter().enumerate() {
        let n = g.n();
        let d = g.regular_degree().unwrap();
        let p = 1.0 / (d as f64 - 1.0);
        let profile = average_return_profile(g, profile_horizon_needed(4)).unwrap();
        for r in 1..=4usize {
            let mut a_sizes = vec![0usize];
            if n / (8 * r) > 0 {
                a_sizes.push(n / (8 * r));
            }
            for a_size in a_sizes {
                let floor = shell_lower_bound(&profile, d, p, r, a_size, n).unwrap();
                let avoid: HashSet<u32> = (0..a_size as u32).collect();
                let mut sum = 0.0;
                let mut sumsq = 0.0;
                for t in 0..TRIALS {
                    let key = &[gi as u64, r as u64, a_size as u64, t as u64];
                    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(SEED, key));
                    let v = rng.random_range(0..n as u32);
                    let sz = if avoid.contains(&v) {
                        0
                    } else {
                        let mut ledger = CoinLedger::new(p, rng.random()).unwrap();
                        grow_ball(g, &mut ledger, v, r, &avoid).unwrap().shell(r).len()
                    } as f64;
                    sum += sz;
                    sumsq += sz * sz;
                }
                let mean = sum / TRIALS as f64;
                let var = (sumsq / TRIALS as f64 - mean * mean).max(0.0);
                let se = (var / (TRIALS as f64 - 1.0)).sqrt();
                if mean < floor - 4.0 * se {
                    failures.push(format!(
                        "{name} r={r} |A|={a_size}: mean {mean:.4} (se {se:.4}) below floor {floor:.4}"
                    ));
                }
            }
        }
    }
    report("05 shell expectation floor", failures);
}

#[test]
fn multi_root_visited_volume() {
    const SEED: u64 = 0xACC6;
    const RUNS: usize = 1000;
    let mut failures = Vec::new();
    let g = random_regular_graph(10_000, 3, derive_seed(SEED, &[0])).unwrap();
    let (r, t_max, p) = (20usize, 50usize, 0.45);
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for t in 0..RUNS {
        let rep = multi_root_process(&g, p, r, g.n(), t_max, derive_seed(SEED, &[1, t as u64]))
            .unwrap();
        if rep.success_step.is_some() {
            failures.push(format!("run {t}: a ball exceeded the whole-graph threshold"));
        }
        let v = rep.visited as f64;
        sum += v;
        sumsq += v * v;
    }
    let mean = sum / RUNS as f64;
    let se = ((sumsq / RUNS as f64 - mean * mean).max(0.0) / (RUNS as f64 - 1.0)).sqrt();
    let cap = 2.0 * (t_max * r) as f64;
    if mean > cap + 4.0 * se {
        failures.push(format!("mean visited {mean:.1} exceeds {cap} + 4 se ({se:.1})"));
    }
    report("06 multi-root visited volume", failures);
}

#[test]
fn critical_window_component_scaling() {
    let mut failures = Vec::new();
    let mut cfg = base_config(
        ExperimentKind::Window,
        FamilySpec::Complete { sizes: vec![100_000] },
        0xACC7,
    );
    cfg.lambda_grid = vec![-2.0, 0.0, 2.0];
    cfg.trials = 200;
    let out = run_window_sweep(&cfg).unwrap();
    let medians: Vec<f64> = out.summaries.iter().map(|s| s.median_c1_scaled).collect();
    for (s, m) in out.summaries.iter().zip(&medians) {
        if !(0.05..=20.0).contains(m) {
            failures.push(format!(
                "lambda={:?}: median C1 n^(-2/3) = {m:.3} outside [0.05, 20]",
                s.lambda
            ));
        }
    }
    if !(medians[0] < medians[1] && medians[1] < medians[2]) {
        failures.push(format!("medians not increasing in lambda: {medians:?}"));
    }
    report("07 critical window component scaling", failures);
}

#[test]
fn supercritical_giant_detection() {
    let mut failures = Vec::new();
    let mut cfg = base_config(
        ExperimentKind::Supercritical,
        FamilySpec::Hamming { k: 2, sides: vec![20, 30, 40] },
        0xACC8,
    );
    cfg.eps_rule = Some(EpsRule::new(1.0, 0.25).unwrap());
    cfg.trials = 100;
    let out = run_supercritical_sweep(&cfg).unwrap();
    let row = out.summaries.iter().find(|s| s.n == 1600).unwrap();
    if row.fraction_hit != Some(1.0) {
        failures.push(format!("H(2,40) threshold hit fraction {:?}, want 1", row.fraction_hit));
    }
    let ratio = row.median_c1_over_epsn.unwrap() / 2.0;
    if !(0.3..=1.7).contains(&ratio) {
        failures.push(format!("H(2,40) median C1/(2 eps n) = {ratio:.3} outside [0.3, 1.7]"));
    }
    report("08 supercritical giant detection", failures);
}

#[test]
fn walk_statistic_tables() {
    let mut failures = Vec::new();
    let s1_ref = window_condition_statistic(&hamming_graph(2, 8).unwrap()).unwrap();
    for m in 5..=20 {
        let s1 = window_condition_statistic(&hamming_graph(2, m).unwrap()).unwrap();
        if s1 > 2.0 * s1_ref {
            failures.push(format!("H(2,{m}): S1 = {s1:.4} above twice the m=8 value {s1_ref:.4}"));
        }
    }
    for n in [27usize, 64, 125] {
        let s1 = window_condition_statistic(&complete_graph(n).unwrap()).unwrap();
        if s1 >= 1.0 {
            failures.push(format!("K_{n}: S1 = {s1:.4} not below 1"));
        }
    }
    let lhs: Vec<f64> = [13u64, 17]
        .iter()
        .map(|&q| {
            let g = lps_ramanujan_graph(5, q).unwrap();
            girth_condition_lhs(6, girth(&g).unwrap(), g.n()).unwrap()
        })
        .collect();
    if lhs[0] <= lhs[1] {
        failures.push(format!(
            "girth statistic rises from {:.4} to {:.4} across LPS(5,13) -> LPS(5,17); \
             both graphs have girth 8, so the n^(1/3) ln^2 n factor dominates",
            lhs[0], lhs[1]
        ));
    }
    report("09 walk statistic tables", failures);
}

#[test]
#[ignore = "slow suite"]
fn critical_component_geometry() {
    let mut failures = Vec::new();
    let mut cfg = base_config(
        ExperimentKind::Window,
        FamilySpec::Complete { sizes: vec![10_000] },
        0xACCA,
    );
    cfg.lambda_grid = vec![0.0];
    cfg.trials = 100;
    cfg.geometry = GeometryStats { diameter: true, mixing: true };
    let out = run_window_sweep(&cfg).unwrap();
    let row = &out.summaries[0];
    match row.median_diam_scaled {
        Some(v) if (0.1..=20.0).contains(&v) => {}
        other => failures.push(format!("median diam n^(-1/3) = {other:?} outside [0.1, 20]")),
    }
    match row.median_mix_scaled {
        Some(v) if (0.01..=100.0).contains(&v) => {}
        other => failures.push(format!("median mixing/n = {other:?} outside [0.01, 100]")),
    }
    report("10 critical component geometry", failures);
}
