//! Sweep drivers. Each takes a validated [`ExperimentConfig`], fans trials
//! out across threads with seeds derived from indices (never from schedule),
//! and returns long-form records plus per-cell summaries and assertion
//! outcomes. Reruns with the same config are identical except for runtime
//! columns, whatever the thread count.

use std::collections::HashSet;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conditions::{
    girth_condition_lhs, supercritical_condition_statistic_with_radius,
    window_condition_statistic, window_radius,
};
use crate::coupling::joint_sample;
use crate::graph::{girth, spectral_expansion, FamilyTag, Graph};
use crate::percolation::{
    component_diameter, component_stats, components_from_edge_list, largest_component_vertices,
    mixing_time_tv, sample_er_open_edges, sample_percolation, CoinLedger, ComponentStats,
    EdgeMask,
};
use crate::tree::{subcritical_survival_check, supercritical_survival_check};
use crate::{Error, Result};

use super::config::{Assertion, ExperimentConfig, ExperimentKind, FamilySpec};
use super::derive_seed;

// Disjoint seed streams, so no rng state is shared between purposes.
const STREAM_COINS: u64 = 0;
const STREAM_GRAPH: u64 = 1;
const STREAM_FRESH: u64 = 2;
const STREAM_ROOTS: u64 = 3;

/// One percolation trial in long form. Scaled columns use the exponents the
/// phenomenology is stated in: size n^{-2/3}, diameter n^{-1/3}, mixing n^{-1}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub family: String,
    pub n: usize,
    pub d: usize,
    pub p: f64,
    pub lambda: Option<f64>,
    pub eps: Option<f64>,
    pub trial: usize,
    pub seed: u64,
    pub c1: usize,
    pub c2: usize,
    pub c1_scaled: f64,
    pub c1_over_epsn: Option<f64>,
    pub threshold_hit: Option<bool>,
    pub diam: Option<usize>,
    pub diam_scaled: Option<f64>,
    pub mix: Option<usize>,
    pub mix_scaled: Option<f64>,
    pub runtime_ms: f64,
}

fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

impl TrialRecord {
    pub const CSV_HEADER: &'static str = "family,n,d,p,lambda,eps,trial,seed,c1,c2,\
        c1_scaled,c1_over_epsn,threshold_hit,diam,diam_scaled,mix,mix_scaled,runtime_ms";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.family,
            self.n,
            self.d,
            self.p,
            opt(&self.lambda),
            opt(&self.eps),
            self.trial,
            self.seed,
            self.c1,
            self.c2,
            self.c1_scaled,
            opt(&self.c1_over_epsn),
            opt(&self.threshold_hit.map(u8::from)),
            opt(&self.diam),
            opt(&self.diam_scaled),
            opt(&self.mix),
            opt(&self.mix_scaled),
            self.runtime_ms,
        )
    }
}

/// Per-cell quantile summary of the trial records.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub family: String,
    pub n: usize,
    pub d: usize,
    pub p: f64,
    pub lambda: Option<f64>,
    pub eps: Option<f64>,
    pub trials: usize,
    pub q25_c1: f64,
    pub median_c1: f64,
    pub q75_c1: f64,
    pub median_c1_scaled: f64,
    pub median_c1_over_epsn: Option<f64>,
    pub fraction_hit: Option<f64>,
    pub median_diam_scaled: Option<f64>,
    pub median_mix_scaled: Option<f64>,
}

impl SummaryRow {
    pub const CSV_HEADER: &'static str = "family,n,d,p,lambda,eps,trials,q25_c1,median_c1,\
        q75_c1,median_c1_scaled,median_c1_over_epsn,fraction_hit,median_diam_scaled,\
        median_mix_scaled";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.family,
            self.n,
            self.d,
            self.p,
            opt(&self.lambda),
            opt(&self.eps),
            self.trials,
            self.q25_c1,
            self.median_c1,
            self.q75_c1,
            self.median_c1_scaled,
            opt(&self.median_c1_over_epsn),
            opt(&self.fraction_hit),
            opt(&self.median_diam_scaled),
            opt(&self.median_mix_scaled),
        )
    }
}

/// Linear-interpolation quantile of an unsorted sample.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    assert!(!values.is_empty() && (0.0..=1.0).contains(&q));
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn median_of(values: &[f64]) -> f64 {
    quantile(values, 0.5)
}

fn optional_median<T: Copy + Into<f64>>(values: impl Iterator<Item = Option<T>>) -> Option<f64> {
    let present: Vec<f64> = values.flatten().map(Into::into).collect();
    (!present.is_empty()).then(|| median_of(&present))
}

/// Anything that can stand as a cell when assertions are evaluated.
pub trait MetricSource {
    fn cell_family(&self) -> &str;
    fn cell_n(&self) -> usize;
    fn cell_lambda(&self) -> Option<f64>;
    fn metric(&self, name: &str) -> Option<f64>;
}

impl MetricSource for SummaryRow {
    fn cell_family(&self) -> &str {
        &self.family
    }
    fn cell_n(&self) -> usize {
        self.n
    }
    fn cell_lambda(&self) -> Option<f64> {
        self.lambda
    }
    fn metric(&self, name: &str) -> Option<f64> {
        match name {
            "median_c1" => Some(self.median_c1),
            "q25_c1" => Some(self.q25_c1),
            "q75_c1" => Some(self.q75_c1),
            "median_c1_scaled" => Some(self.median_c1_scaled),
            "median_c1_over_epsn" => self.median_c1_over_epsn,
            "median_c1_over_2epsn" => self.median_c1_over_epsn.map(|v| v / 2.0),
            "fraction_hit" => self.fraction_hit,
            "median_diam_scaled" => self.median_diam_scaled,
            "median_mix_scaled" => self.median_mix_scaled,
            _ => None,
        }
    }
}

/// One assertion checked against one matching cell (or the fact that none
/// matched).
#[derive(Debug, Clone, Serialize)]
pub struct AssertionOutcome {
    pub metric: String,
    pub family: String,
    pub n: usize,
    pub lambda: Option<f64>,
    pub value: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub passed: bool,
}

pub fn evaluate_assertions<T: MetricSource>(
    assertions: &[Assertion],
    cells: &[T],
) -> (Vec<AssertionOutcome>, bool) {
    let mut outcomes = Vec::new();
    for a in assertions {
        let mut matched = false;
        for cell in cells {
            if !a.matches_cell(cell.cell_n(), cell.cell_lambda()) {
                continue;
            }
            matched = true;
            let value = cell.metric(&a.metric);
            outcomes.push(AssertionOutcome {
                metric: a.metric.clone(),
                family: cell.cell_family().to_string(),
                n: cell.cell_n(),
                lambda: cell.cell_lambda(),
                value,
                min: a.min,
                max: a.max,
                passed: value.is_some_and(|v| a.admits(v)),
            });
        }
        if !matched {
            outcomes.push(AssertionOutcome {
                metric: a.metric.clone(),
                family: "<no matching cell>".into(),
                n: a.n.unwrap_or(0),
                lambda: a.lambda,
                value: None,
                min: a.min,
                max: a.max,
                passed: false,
            });
        }
    }
    let passed = outcomes.iter().all(|o| o.passed);
    (outcomes, passed)
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub records: Vec<TrialRecord>,
    pub summaries: Vec<SummaryRow>,
    pub outcomes: Vec<AssertionOutcome>,
    pub passed: bool,
    pub wall_ms: u64,
}

struct CellPlan {
    label: String,
    member_idx: usize,
    axis_idx: usize,
    param: u64,
    n: usize,
    d: usize,
    p: f64,
    lambda: Option<f64>,
    eps: Option<f64>,
    /// Giant-detection cutoff delta*eps*n/ln^3(n eps^3).
    threshold: Option<f64>,
    /// Built once for deterministic families; `None` means the trial builds
    /// its own graph (random regular) or percolates implicitly (complete).
    graph: Option<Graph>,
}

fn member_degree(spec: &FamilySpec, graph: Option<&Graph>, param: u64) -> Result<usize> {
    match spec {
        FamilySpec::Complete { .. } => Ok(param as usize - 1),
        FamilySpec::RandomRegular { degree, .. } => Ok(*degree),
        _ => {
            let g = graph.expect("deterministic family was materialized");
            g.regular_degree().ok_or_else(|| {
                Error::OutOfModel("percolation sweeps need a regular graph".into())
            })
        }
    }
}

fn plan_cells(cfg: &ExperimentConfig) -> Result<Vec<CellPlan>> {
    let family = cfg.family.as_ref().expect("validated config has a family");
    let mut cells = Vec::new();
    for (member_idx, param) in family.params().into_iter().enumerate() {
        let graph = match family {
            FamilySpec::Complete { .. } | FamilySpec::RandomRegular { .. } => None,
            _ => Some(family.build(param, 0)?),
        };
        let n = match family {
            FamilySpec::Complete { .. } | FamilySpec::RandomRegular { .. } => param as usize,
            _ => graph.as_ref().unwrap().n(),
        };
        let d = member_degree(family, graph.as_ref(), param)?;
        if d < 2 {
            return Err(Error::OutOfModel(format!("degree {d} graphs do not percolate")));
        }
        let label = family.member_label(param);
        match cfg.kind {
            ExperimentKind::Window => {
                let scale = (n as f64).powf(-1.0 / 3.0);
                for (li, &lambda) in cfg.lambda_grid.iter().enumerate() {
                    let p = (1.0 + lambda * scale) / (d as f64 - 1.0);
                    if !(0.0..=1.0).contains(&p) {
                        return Err(Error::InvalidParameter(format!(
                            "lambda {lambda} puts p = {p} outside [0, 1] at n = {n}"
                        )));
                    }
                    cells.push(CellPlan {
                        label: label.clone(),
                        member_idx,
                        axis_idx: li,
                        param,
                        n,
                        d,
                        p,
                        lambda: Some(lambda),
                        eps: None,
                        threshold: None,
                        graph: graph.clone(),
                    });
                }
            }
            ExperimentKind::Supercritical => {
                let rule = cfg.eps_rule.expect("validated config has an eps rule");
                let eps = rule.eps(n);
                // Regime gate: the threshold ln^3(n eps^3) needs n eps^3 > e.
                // The window radius itself is not consumed here, so a rule
                // that floors it to zero is still sweepable.
                if !(eps > 0.0 && eps < 0.5) {
                    return Err(Error::OutOfRegime(format!(
                        "eps({n}) = {eps} falls outside (0, 1/2)"
                    )));
                }
                let x = n as f64 * eps.powi(3);
                if x <= std::f64::consts::E {
                    return Err(Error::OutOfRegime(format!(
                        "n eps^3 = {x} must exceed e at n = {n}"
                    )));
                }
                let p = (1.0 + eps) / (d as f64 - 1.0);
                if p > 1.0 {
                    return Err(Error::InvalidParameter(format!(
                        "eps {eps} puts p = {p} above 1 at n = {n}, d = {d}"
                    )));
                }
                let threshold = cfg.delta * eps * n as f64 / x.ln().powi(3);
                cells.push(CellPlan {
                    label,
                    member_idx,
                    axis_idx: 0,
                    param,
                    n,
                    d,
                    p,
                    lambda: None,
                    eps: Some(eps),
                    threshold: Some(threshold),
                    graph,
                });
            }
            _ => unreachable!("plan_cells only serves percolation sweeps"),
        }
    }
    Ok(cells)
}

fn all_open(g: &Graph) -> EdgeMask {
    sample_percolation(g, 1.0, 0).expect("p = 1 is always valid")
}

fn geometry_of_largest(
    g: &Graph,
    mask: &EdgeMask,
    want_diam: bool,
    want_mix: bool,
) -> Result<(Option<usize>, Option<usize>)> {
    if !want_diam && !want_mix {
        return Ok((None, None));
    }
    let comp = largest_component_vertices(g, mask);
    let diam = if want_diam { Some(component_diameter(g, mask, &comp)?) } else { None };
    let mix = if want_mix {
        match mixing_time_tv(g, mask, &comp) {
            Ok(t) => Some(t),
            // Component too big for exact dense evolution: leave the column
            // empty rather than approximating.
            Err(Error::CapacityExceeded(_)) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    Ok((diam, mix))
}

fn run_percolation_trial(
    cfg: &ExperimentConfig,
    cell: &CellPlan,
    trial: usize,
) -> Result<TrialRecord> {
    let start = Instant::now();
    let family = cfg.family.as_ref().unwrap();
    let seed = derive_seed(
        cfg.master_seed,
        &[STREAM_COINS, cell.member_idx as u64, cell.axis_idx as u64, trial as u64],
    );
    let want_diam = cfg.geometry.diameter;
    let want_mix = cfg.geometry.mixing;

    let (stats, diam, mix): (ComponentStats, Option<usize>, Option<usize>) =
        if family.is_complete() {
            let edges = sample_er_open_edges(cell.n, cell.p, seed)?;
            let stats = components_from_edge_list(cell.n, &edges);
            let (diam, mix) = if want_diam || want_mix {
                let og = Graph::from_edges(cell.n, edges.iter().copied(), FamilyTag::Custom)?;
                geometry_of_largest(&og, &all_open(&og), want_diam, want_mix)?
            } else {
                (None, None)
            };
            (stats, diam, mix)
        } else {
            let rebuilt;
            let g = match &cell.graph {
                Some(g) => g,
                None => {
                    let gseed = derive_seed(
                        cfg.master_seed,
                        &[STREAM_GRAPH, cell.member_idx as u64, cell.axis_idx as u64, trial as u64],
                    );
                    rebuilt = family.build(cell.param, gseed)?;
                    &rebuilt
                }
            };
            let mask = sample_percolation(g, cell.p, seed)?;
            let stats = component_stats(g, &mask);
            let (diam, mix) = geometry_of_largest(g, &mask, want_diam, want_mix)?;
            (stats, diam, mix)
        };

    let c1 = stats.largest();
    debug_assert!(c1 >= 1 && c1 <= cell.n);
    let nf = cell.n as f64;
    Ok(TrialRecord {
        family: cell.label.clone(),
        n: cell.n,
        d: cell.d,
        p: cell.p,
        lambda: cell.lambda,
        eps: cell.eps,
        trial,
        seed,
        c1,
        c2: stats.second_largest(),
        c1_scaled: c1 as f64 * nf.powf(-2.0 / 3.0),
        c1_over_epsn: cell.eps.map(|e| c1 as f64 / (e * nf)),
        threshold_hit: cell.threshold.map(|thr| c1 as f64 >= thr),
        diam,
        diam_scaled: diam.map(|d| d as f64 * nf.powf(-1.0 / 3.0)),
        mix,
        mix_scaled: mix.map(|m| m as f64 / nf),
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn summarize_cell(cell: &CellPlan, records: &[TrialRecord]) -> SummaryRow {
    let c1: Vec<f64> = records.iter().map(|r| r.c1 as f64).collect();
    let scaled: Vec<f64> = records.iter().map(|r| r.c1_scaled).collect();
    SummaryRow {
        family: cell.label.clone(),
        n: cell.n,
        d: cell.d,
        p: cell.p,
        lambda: cell.lambda,
        eps: cell.eps,
        trials: records.len(),
        q25_c1: quantile(&c1, 0.25),
        median_c1: median_of(&c1),
        q75_c1: quantile(&c1, 0.75),
        median_c1_scaled: median_of(&scaled),
        median_c1_over_epsn: optional_median(records.iter().map(|r| r.c1_over_epsn)),
        fraction_hit: cell.threshold.map(|_| {
            let hits = records.iter().filter(|r| r.threshold_hit == Some(true)).count();
            hits as f64 / records.len() as f64
        }),
        median_diam_scaled: optional_median(records.iter().map(|r| r.diam_scaled)),
        median_mix_scaled: optional_median(records.iter().map(|r| r.mix_scaled)),
    }
}

fn run_percolation_sweep(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<SweepResult> {
    let start = Instant::now();
    cfg.validate()?;
    if cfg.kind != kind {
        return Err(Error::Config(format!(
            "config kind {:?} does not match the {kind:?} driver",
            cfg.kind
        )));
    }
    let cells = plan_cells(cfg)?;
    let tasks: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|ci| (0..cfg.trials).map(move |t| (ci, t)))
        .collect();
    let records: Vec<TrialRecord> = tasks
        .par_iter()
        .map(|&(ci, t)| run_percolation_trial(cfg, &cells[ci], t))
        .collect::<Result<_>>()?;
    let summaries: Vec<SummaryRow> = cells
        .iter()
        .enumerate()
        .map(|(ci, cell)| summarize_cell(cell, &records[ci * cfg.trials..(ci + 1) * cfg.trials]))
        .collect();
    let (outcomes, passed) = evaluate_assertions(&cfg.assertions, &summaries);
    Ok(SweepResult {
        records,
        summaries,
        outcomes,
        passed,
        wall_ms: start.elapsed().as_millis() as u64,
    })
}

pub fn run_window_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    run_percolation_sweep(cfg, ExperimentKind::Window)
}

pub fn run_supercritical_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    run_percolation_sweep(cfg, ExperimentKind::Supercritical)
}

/// One family member's walk statistics and structural constants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionRow {
    pub family: String,
    pub n: usize,
    pub d: usize,
    pub girth: Option<usize>,
    pub s1: f64,
    pub eps: Option<f64>,
    pub r: Option<usize>,
    pub s2: Option<f64>,
    pub lambda_star: f64,
    pub girth_lhs: Option<f64>,
}

impl ConditionRow {
    pub const CSV_HEADER: &'static str =
        "family,n,d,girth,s1,eps,r,s2,lambda_star,girth_lhs";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.family,
            self.n,
            self.d,
            opt(&self.girth),
            self.s1,
            opt(&self.eps),
            opt(&self.r),
            opt(&self.s2),
            self.lambda_star,
            opt(&self.girth_lhs),
        )
    }
}

impl MetricSource for ConditionRow {
    fn cell_family(&self) -> &str {
        &self.family
    }
    fn cell_n(&self) -> usize {
        self.n
    }
    fn cell_lambda(&self) -> Option<f64> {
        None
    }
    fn metric(&self, name: &str) -> Option<f64> {
        match name {
            "s1" => Some(self.s1),
            "s2" => self.s2,
            "girth" => self.girth.map(|g| g as f64),
            "lambda_star" => Some(self.lambda_star),
            "girth_lhs" => self.girth_lhs,
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConditionsRun {
    pub rows: Vec<ConditionRow>,
    pub outcomes: Vec<AssertionOutcome>,
    pub passed: bool,
    pub wall_ms: u64,
}

pub fn run_condition_tables(cfg: &ExperimentConfig) -> Result<ConditionsRun> {
    let start = Instant::now();
    cfg.validate()?;
    if cfg.kind != ExperimentKind::Conditions {
        return Err(Error::Config(format!(
            "config kind {:?} does not match the conditions driver",
            cfg.kind
        )));
    }
    let family = cfg.family.as_ref().unwrap();
    let params = family.params();
    let rows: Vec<ConditionRow> = params
        .par_iter()
        .enumerate()
        .map(|(member_idx, &param)| -> Result<ConditionRow> {
            let gseed = derive_seed(cfg.master_seed, &[STREAM_GRAPH, member_idx as u64]);
            let g = family.build(param, gseed)?;
            let n = g.n();
            let d = g
                .regular_degree()
                .ok_or_else(|| Error::OutOfModel("condition tables need regular graphs".into()))?;
            let s1 = window_condition_statistic(&g)?;
            let girth_val = girth(&g);
            let (eps, r, s2) = match cfg.eps_rule {
                Some(rule) => {
                    let eps = rule.eps(n);
                    let r = window_radius(n, eps)?;
                    let s2 = supercritical_condition_statistic_with_radius(&g, eps, r)?;
                    (Some(eps), Some(r), Some(s2))
                }
                None => (None, None, None),
            };
            let lambda_star = spectral_expansion(&g, 1e-7)?;
            let girth_lhs = match girth_val {
                Some(gv) => Some(girth_condition_lhs(d, gv, n)?),
                None => None,
            };
            Ok(ConditionRow {
                family: family.member_label(param),
                n,
                d,
                girth: girth_val,
                s1,
                eps,
                r,
                s2,
                lambda_star,
                girth_lhs,
            })
        })
        .collect::<Result<_>>()?;
    let (outcomes, passed) = evaluate_assertions(&cfg.assertions, &rows);
    Ok(ConditionsRun { rows, outcomes, passed, wall_ms: start.elapsed().as_millis() as u64 })
}

/// Sandwich-check tally for one family member.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingRow {
    pub family: String,
    pub n: usize,
    pub d: usize,
    pub p: f64,
    pub r: usize,
    pub avoid_size: usize,
    pub trials: usize,
    pub passes: usize,
    /// Trials where some level had strictly fewer pure survivors than the
    /// graph shell.
    pub strict_lower: usize,
}

impl CouplingRow {
    pub const CSV_HEADER: &'static str =
        "family,n,d,p,r,avoid_size,trials,passes,strict_lower";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.family,
            self.n,
            self.d,
            self.p,
            self.r,
            self.avoid_size,
            self.trials,
            self.passes,
            self.strict_lower,
        )
    }
}

impl MetricSource for CouplingRow {
    fn cell_family(&self) -> &str {
        &self.family
    }
    fn cell_n(&self) -> usize {
        self.n
    }
    fn cell_lambda(&self) -> Option<f64> {
        None
    }
    fn metric(&self, name: &str) -> Option<f64> {
        match name {
            "pass_rate" => Some(self.passes as f64 / self.trials as f64),
            "strict_lower" => Some(self.strict_lower as f64),
            "failures" => Some((self.trials - self.passes) as f64),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CouplingRun {
    pub rows: Vec<CouplingRow>,
    pub outcomes: Vec<AssertionOutcome>,
    pub passed: bool,
    pub wall_ms: u64,
}

pub fn run_coupling_check(cfg: &ExperimentConfig) -> Result<CouplingRun> {
    let start = Instant::now();
    cfg.validate()?;
    if cfg.kind != ExperimentKind::Coupling {
        return Err(Error::Config(format!(
            "config kind {:?} does not match the coupling driver",
            cfg.kind
        )));
    }
    let family = cfg.family.as_ref().unwrap();
    let (p, r) = (cfg.p.unwrap(), cfg.r.unwrap());
    let avoid_size = cfg.avoid_size.unwrap_or(0);
    let mut rows = Vec::new();
    for (member_idx, param) in family.params().into_iter().enumerate() {
        let gseed = derive_seed(cfg.master_seed, &[STREAM_GRAPH, member_idx as u64]);
        let g = family.build(param, gseed)?;
        let n = g.n();
        if avoid_size + 1 > n {
            return Err(Error::InvalidParameter(format!(
                "cannot avoid {avoid_size} of {n} vertices and still have a root"
            )));
        }
        let d = g.regular_degree().unwrap_or_else(|| g.min_degree());
        let results: Vec<(bool, bool)> = (0..cfg.trials)
            .into_par_iter()
            .map(|trial| -> Result<(bool, bool)> {
                let labels = [member_idx as u64, trial as u64];
                let mut roots =
                    ChaCha8Rng::seed_from_u64(derive_seed(cfg.master_seed, &[STREAM_ROOTS, labels[0], labels[1]]));
                let root = roots.random_range(0..n as u32);
                let mut avoid = HashSet::new();
                while avoid.len() < avoid_size {
                    let v = roots.random_range(0..n as u32);
                    if v != root {
                        avoid.insert(v);
                    }
                }
                let mut ledger = CoinLedger::new(
                    p,
                    derive_seed(cfg.master_seed, &[STREAM_COINS, labels[0], labels[1]]),
                )?;
                let fresh = derive_seed(cfg.master_seed, &[STREAM_FRESH, labels[0], labels[1]]);
                let s = joint_sample(&g, root, r, &avoid, &mut ledger, fresh)?;
                let pass = s.sandwich_holds();
                let strict =
                    pass && (0..=r).any(|k| s.x[k] < s.shell_sizes[k] as u64);
                Ok((pass, strict))
            })
            .collect::<Result<_>>()?;
        rows.push(CouplingRow {
            family: family.member_label(param),
            n,
            d,
            p,
            r,
            avoid_size,
            trials: cfg.trials,
            passes: results.iter().filter(|&&(pass, _)| pass).count(),
            strict_lower: results.iter().filter(|&&(_, strict)| strict).count(),
        });
    }
    let (outcomes, passed) = evaluate_assertions(&cfg.assertions, &rows);
    Ok(CouplingRun { rows, outcomes, passed, wall_ms: start.elapsed().as_millis() as u64 })
}

/// Survival-probability sandwich at one (regime, eps, r) grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeCheckRow {
    pub regime: &'static str,
    pub d: usize,
    pub eps: f64,
    pub r: usize,
    pub p: f64,
    pub exact: f64,
    pub lower: f64,
    pub upper: f64,
    pub holds: bool,
}

impl TreeCheckRow {
    pub const CSV_HEADER: &'static str = "regime,d,eps,r,p,exact,lower,upper,holds";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.regime,
            self.d,
            self.eps,
            self.r,
            self.p,
            self.exact,
            self.lower,
            self.upper,
            u8::from(self.holds),
        )
    }
}

/// Aggregate cell the tree-check assertions run against.
#[derive(Debug, Clone, Serialize)]
pub struct TreeCheckAggregate {
    pub rows: usize,
    pub holds_rate: f64,
}

impl MetricSource for TreeCheckAggregate {
    fn cell_family(&self) -> &str {
        "tree"
    }
    fn cell_n(&self) -> usize {
        0
    }
    fn cell_lambda(&self) -> Option<f64> {
        None
    }
    fn metric(&self, name: &str) -> Option<f64> {
        match name {
            "holds_rate" => Some(self.holds_rate),
            "rows" => Some(self.rows as f64),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TreeRun {
    pub rows: Vec<TreeCheckRow>,
    pub aggregate: TreeCheckAggregate,
    pub outcomes: Vec<AssertionOutcome>,
    pub passed: bool,
    pub wall_ms: u64,
}

pub fn run_tree_check(cfg: &ExperimentConfig) -> Result<TreeRun> {
    let start = Instant::now();
    cfg.validate()?;
    if cfg.kind != ExperimentKind::Tree {
        return Err(Error::Config(format!(
            "config kind {:?} does not match the tree driver",
            cfg.kind
        )));
    }
    let d = cfg.degree.unwrap();
    let mut rows = Vec::new();
    for &eps in &cfg.eps_grid {
        for &r in &cfg.r_grid {
            for supercritical in [true, false] {
                let check = if supercritical {
                    supercritical_survival_check(d, eps, r)?
                } else {
                    subcritical_survival_check(d, eps, r)?
                };
                rows.push(TreeCheckRow {
                    regime: if supercritical { "super" } else { "sub" },
                    d,
                    eps,
                    r,
                    p: check.p,
                    exact: check.exact,
                    lower: check.lower,
                    upper: check.upper,
                    holds: check.holds(),
                });
            }
        }
    }
    let aggregate = TreeCheckAggregate {
        rows: rows.len(),
        holds_rate: rows.iter().filter(|r| r.holds).count() as f64 / rows.len() as f64,
    };
    let (outcomes, passed) =
        evaluate_assertions(&cfg.assertions, std::slice::from_ref(&aggregate));
    Ok(TreeRun { rows, aggregate, outcomes, passed, wall_ms: start.elapsed().as_millis() as u64 })
}

/// The result of any experiment kind, for uniform artifact writing and exit
/// codes.
#[derive(Debug, Clone)]
pub enum RunOutput {
    Sweep(SweepResult),
    Conditions(ConditionsRun),
    Coupling(CouplingRun),
    Tree(TreeRun),
}

impl RunOutput {
    pub fn passed(&self) -> bool {
        match self {
            RunOutput::Sweep(r) => r.passed,
            RunOutput::Conditions(r) => r.passed,
            RunOutput::Coupling(r) => r.passed,
            RunOutput::Tree(r) => r.passed,
        }
    }

    pub fn outcomes(&self) -> &[AssertionOutcome] {
        match self {
            RunOutput::Sweep(r) => &r.outcomes,
            RunOutput::Conditions(r) => &r.outcomes,
            RunOutput::Coupling(r) => &r.outcomes,
            RunOutput::Tree(r) => &r.outcomes,
        }
    }

    pub fn wall_ms(&self) -> u64 {
        match self {
            RunOutput::Sweep(r) => r.wall_ms,
            RunOutput::Conditions(r) => r.wall_ms,
            RunOutput::Coupling(r) => r.wall_ms,
            RunOutput::Tree(r) => r.wall_ms,
        }
    }

    pub fn records_csv(&self) -> String {
        match self {
            RunOutput::Sweep(r) => {
                let mut s = String::from(TrialRecord::CSV_HEADER);
                for rec in &r.records {
                    s.push('\n');
                    s.push_str(&rec.csv_row());
                }
                s.push('\n');
                s
            }
            RunOutput::Conditions(r) => {
                let mut s = String::from(ConditionRow::CSV_HEADER);
                for row in &r.rows {
                    s.push('\n');
                    s.push_str(&row.csv_row());
                }
                s.push('\n');
                s
            }
            RunOutput::Coupling(r) => {
                let mut s = String::from(CouplingRow::CSV_HEADER);
                for row in &r.rows {
                    s.push('\n');
                    s.push_str(&row.csv_row());
                }
                s.push('\n');
                s
            }
            RunOutput::Tree(r) => {
                let mut s = String::from(TreeCheckRow::CSV_HEADER);
                for row in &r.rows {
                    s.push('\n');
                    s.push_str(&row.csv_row());
                }
                s.push('\n');
                s
            }
        }
    }

    pub fn summary_csv(&self) -> Option<String> {
        match self {
            RunOutput::Sweep(r) => {
                let mut s = String::from(SummaryRow::CSV_HEADER);
                for row in &r.summaries {
                    s.push('\n');
                    s.push_str(&row.csv_row());
                }
                s.push('\n');
                Some(s)
            }
            _ => None,
        }
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    match cfg.kind {
        ExperimentKind::Window => run_window_sweep(cfg).map(RunOutput::Sweep),
        ExperimentKind::Supercritical => run_supercritical_sweep(cfg).map(RunOutput::Sweep),
        ExperimentKind::Conditions => run_condition_tables(cfg).map(RunOutput::Conditions),
        ExperimentKind::Coupling => run_coupling_check(cfg).map(RunOutput::Coupling),
        ExperimentKind::Tree => run_tree_check(cfg).map(RunOutput::Tree),
    }
}

fn kind_slug(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::Window => "window",
        ExperimentKind::Supercritical => "supercritical",
        ExperimentKind::Conditions => "conditions",
        ExperimentKind::Coupling => "coupling",
        ExperimentKind::Tree => "tree",
    }
}

fn code_version() -> String {
    std::process::Command::new("git")
        .args(["describe", "--always", "--dirty"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| format!("v{}", env!("CARGO_PKG_VERSION")))
}

#[derive(Serialize)]
struct Manifest<'a> {
    config: &'a ExperimentConfig,
    code_version: String,
    wall_ms: u64,
    passed: bool,
    assertions: &'a [AssertionOutcome],
    files: Vec<String>,
}

/// Paths of everything a run wrote to disk.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub records_path: PathBuf,
    pub summary_path: Option<PathBuf>,
    pub manifest_path: PathBuf,
    pub passed: bool,
}

pub fn write_artifacts(cfg: &ExperimentConfig, output: &RunOutput) -> Result<RunArtifacts> {
    let dir = cfg.resolve_out();
    std::fs::create_dir_all(&dir)?;
    let slug = kind_slug(cfg.kind);
    let records_path = dir.join(format!("{slug}_records.csv"));
    std::fs::write(&records_path, output.records_csv())?;
    let mut files = vec![records_path.display().to_string()];
    let summary_path = match output.summary_csv() {
        Some(csv) => {
            let path = dir.join(format!("{slug}_summary.csv"));
            std::fs::write(&path, csv)?;
            files.push(path.display().to_string());
            Some(path)
        }
        None => None,
    };
    let manifest = Manifest {
        config: cfg,
        code_version: code_version(),
        wall_ms: output.wall_ms(),
        passed: output.passed(),
        assertions: output.outcomes(),
        files,
    };
    let manifest_path = dir.join(format!("{slug}_manifest.json"));
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Config(format!("manifest serialization: {e}")))?;
    std::fs::write(&manifest_path, text)?;
    Ok(RunArtifacts { records_path, summary_path, manifest_path, passed: output.passed() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{EpsRule, GeometryStats};

    fn base_config(kind: ExperimentKind) -> ExperimentConfig {
        ExperimentConfig {
            kind,
            family: None,
            lambda_grid: vec![],
            eps_rule: None,
            trials: 4,
            master_seed: 99,
            out: None,
            geometry: GeometryStats::default(),
            delta: 0.01,
            p: None,
            r: None,
            avoid_size: None,
            degree: None,
            eps_grid: vec![],
            r_grid: vec![],
            assertions: vec![],
        }
    }

    fn window_config() -> ExperimentConfig {
        let mut cfg = base_config(ExperimentKind::Window);
        cfg.family = Some(FamilySpec::Complete { sizes: vec![400] });
        cfg.lambda_grid = vec![-1.0, 1.0];
        cfg.trials = 5;
        cfg
    }

    fn strip_runtime(csv: &str) -> String {
        csv.lines()
            .map(|line| line.rsplit_once(',').map(|(head, _)| head).unwrap_or(line))
            .collect::<Vec<_>>()
            .join("\n")
    }

    #[test]
    fn window_sweep_is_deterministic_across_threads() {
        let cfg = window_config();
        let a = run_window_sweep(&cfg).unwrap();
        let b = run_window_sweep(&cfg).unwrap();
        let render =
            |r: &SweepResult| strip_runtime(&RunOutput::Sweep(r.clone()).records_csv());
        assert_eq!(render(&a), render(&b));
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = pool.install(|| run_window_sweep(&cfg)).unwrap();
        assert_eq!(render(&a), render(&c));
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let d = pool.install(|| run_window_sweep(&cfg)).unwrap();
        assert_eq!(render(&a), render(&d));
    }

    #[test]
    fn window_sweep_records_and_summaries_are_consistent() {
        let cfg = window_config();
        let result = run_window_sweep(&cfg).unwrap();
        assert_eq!(result.records.len(), 2 * 5);
        assert_eq!(result.summaries.len(), 2);
        let n = 400usize;
        let scale = (n as f64).powf(-1.0 / 3.0);
        for rec in &result.records {
            assert_eq!(rec.n, n);
            assert_eq!(rec.d, n - 1);
            let lambda = rec.lambda.unwrap();
            let p = (1.0 + lambda * scale) / (n as f64 - 2.0);
            assert!((rec.p - p).abs() < 1e-15);
            assert!(rec.c1 >= 1 && rec.c1 <= n);
            assert!(rec.c2 <= rec.c1);
            assert!((rec.c1_scaled - rec.c1 as f64 * (n as f64).powf(-2.0 / 3.0)).abs() < 1e-12);
            assert!(rec.eps.is_none() && rec.c1_over_epsn.is_none());
            assert!(rec.threshold_hit.is_none());
        }
        // Quantiles recompute from the raw rows with an independent method.
        for (ci, summary) in result.summaries.iter().enumerate() {
            let slice = &result.records[ci * 5..(ci + 1) * 5];
            let mut c1: Vec<usize> = slice.iter().map(|r| r.c1).collect();
            c1.sort_unstable();
            assert_eq!(summary.median_c1, c1[2] as f64, "odd count: median is the middle");
            assert_eq!(summary.trials, 5);
            assert!(summary.q25_c1 <= summary.median_c1);
            assert!(summary.median_c1 <= summary.q75_c1);
        }
        // Monotone coupling is not imposed across cells, but lambda = +1
        // should not come out below lambda = -1 in the median for K_400.
        assert!(result.summaries[1].median_c1 >= result.summaries[0].median_c1);
    }

    #[test]
    fn window_sweep_explicit_family_reproduces_trial_seeds() {
        let mut cfg = base_config(ExperimentKind::Window);
        cfg.family = Some(FamilySpec::Hamming { k: 2, sides: vec![4] });
        cfg.lambda_grid = vec![0.5];
        cfg.trials = 3;
        let result = run_window_sweep(&cfg).unwrap();
        let g = hamming_fixture();
        for (t, rec) in result.records.iter().enumerate() {
            let seed = derive_seed(cfg.master_seed, &[STREAM_COINS, 0, 0, t as u64]);
            assert_eq!(rec.seed, seed);
            let mask = sample_percolation(&g, rec.p, seed).unwrap();
            let stats = component_stats(&g, &mask);
            assert_eq!(rec.c1, stats.largest());
            assert_eq!(rec.c2, stats.second_largest());
        }
    }

    fn hamming_fixture() -> Graph {
        crate::graph::hamming_graph(2, 4).unwrap()
    }

    #[test]
    fn window_sweep_rejects_p_outside_unit_interval() {
        let mut cfg = window_config();
        cfg.family = Some(FamilySpec::Complete { sizes: vec![27] });
        cfg.lambda_grid = vec![100.0];
        assert!(matches!(run_window_sweep(&cfg), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn window_sweep_geometry_columns() {
        let mut cfg = base_config(ExperimentKind::Window);
        cfg.family = Some(FamilySpec::Complete { sizes: vec![120] });
        cfg.lambda_grid = vec![0.0];
        cfg.trials = 3;
        cfg.geometry = GeometryStats { diameter: true, mixing: true };
        let result = run_window_sweep(&cfg).unwrap();
        for rec in &result.records {
            let diam = rec.diam.expect("diameter requested");
            assert!(diam < 120);
            assert!((rec.diam_scaled.unwrap()
                - diam as f64 * (120f64).powf(-1.0 / 3.0))
            .abs()
                < 1e-12);
            let mix = rec.mix.expect("mixing requested");
            assert!(rec.c1 == 1 || mix >= 1);
        }
        let s = &result.summaries[0];
        assert!(s.median_diam_scaled.is_some());
        assert!(s.median_mix_scaled.is_some());
    }

    #[test]
    fn supercritical_sweep_threshold_and_regime() {
        let mut cfg = base_config(ExperimentKind::Supercritical);
        cfg.family = Some(FamilySpec::Hamming { k: 2, sides: vec![8] });
        cfg.eps_rule = Some(EpsRule::new(1.0, 0.25).unwrap());
        cfg.trials = 6;
        let result = run_supercritical_sweep(&cfg).unwrap();
        assert_eq!(result.records.len(), 6);
        let n = 64f64;
        let eps = n.powf(-0.25);
        for rec in &result.records {
            assert_eq!(rec.n, 64);
            assert_eq!(rec.d, 14);
            assert!((rec.eps.unwrap() - eps).abs() < 1e-15);
            assert!((rec.p - (1.0 + eps) / 13.0).abs() < 1e-15);
            let ratio = rec.c1_over_epsn.unwrap();
            assert!((ratio - rec.c1 as f64 / (eps * n)).abs() < 1e-12);
            // delta eps n / ln^3(n eps^3) is below 1 here, so every trial
            // clears it.
            assert_eq!(rec.threshold_hit, Some(true));
        }
        assert_eq!(result.summaries[0].fraction_hit, Some(1.0));

        // n eps^3 below e: out of regime.
        let mut bad = cfg.clone();
        bad.family = Some(FamilySpec::Hamming { k: 2, sides: vec![5] });
        assert!(matches!(run_supercritical_sweep(&bad), Err(Error::OutOfRegime(_))));

        // eps(16) = 0.5 is outside (0, 1/2).
        let mut wide = cfg.clone();
        wide.family = Some(FamilySpec::Hamming { k: 2, sides: vec![4] });
        assert!(matches!(run_supercritical_sweep(&wide), Err(Error::OutOfRegime(_))));

        // A rule that floors the window radius to zero still sweeps: the
        // radius is a conditions-table concept, not a percolation input.
        let mut shallow = cfg.clone();
        shallow.family = Some(FamilySpec::Complete { sizes: vec![1000] });
        shallow.trials = 2;
        let shallow_run = run_supercritical_sweep(&shallow).unwrap();
        assert!(matches!(window_radius(1000, 1000f64.powf(-0.25)), Err(Error::OutOfRegime(_))));
        assert_eq!(shallow_run.records.len(), 2);
    }

    #[test]
    fn condition_tables_frozen_values() {
        let mut cfg = base_config(ExperimentKind::Conditions);
        cfg.family = Some(FamilySpec::Complete { sizes: vec![27, 64] });
        cfg.trials = 1;
        let run = run_condition_tables(&cfg).unwrap();
        assert_eq!(run.rows.len(), 2);
        let k27 = &run.rows[0];
        assert_eq!(k27.family, "K_27");
        assert_eq!((k27.n, k27.d, k27.girth), (27, 26, Some(3)));
        assert!((k27.s1 - 0.36).abs() < 1e-12);
        assert!(k27.s2.is_none() && k27.eps.is_none() && k27.r.is_none());
        // Complete-graph walk spectrum: second eigenvalue is -1/(n-1).
        assert!((k27.lambda_star - 1.0 / 26.0).abs() < 1e-6);
        let lhs = (1.0 / 25.0) * 27f64.cbrt() * 27f64.ln().powi(2);
        assert!((k27.girth_lhs.unwrap() - lhs).abs() < 1e-9);
        let k64 = &run.rows[1];
        assert!((k64.s1 - 430.0 / 961.0).abs() < 1e-12);
    }

    #[test]
    fn condition_tables_with_eps_rule() {
        let mut cfg = base_config(ExperimentKind::Conditions);
        cfg.family = Some(FamilySpec::Complete { sizes: vec![125] });
        cfg.eps_rule = Some(EpsRule::new(1.0, 0.25).unwrap());
        cfg.trials = 1;
        let run = run_condition_tables(&cfg).unwrap();
        let row = &run.rows[0];
        let eps = 125f64.powf(-0.25);
        assert!((row.eps.unwrap() - eps).abs() < 1e-15);
        assert_eq!(row.r, Some(window_radius(125, eps).unwrap()));
        assert!(row.s2.unwrap() > 0.0);
    }

    #[test]
    fn coupling_check_counts_passes() {
        let mut cfg = base_config(ExperimentKind::Coupling);
        cfg.family = Some(FamilySpec::Hamming { k: 2, sides: vec![3] });
        cfg.p = Some(0.5);
        cfg.r = Some(3);
        cfg.avoid_size = Some(2);
        cfg.trials = 40;
        let run = run_coupling_check(&cfg).unwrap();
        assert_eq!(run.rows.len(), 1);
        let row = &run.rows[0];
        assert_eq!((row.n, row.d), (9, 4));
        assert_eq!(row.passes, 40, "sandwich must hold on every sample");
        assert_eq!(row.metric("pass_rate"), Some(1.0));
        // Determinism.
        let again = run_coupling_check(&cfg).unwrap();
        assert_eq!(run.rows, again.rows);
    }

    #[test]
    fn tree_check_grid() {
        let mut cfg = base_config(ExperimentKind::Tree);
        cfg.degree = Some(3);
        cfg.eps_grid = vec![0.1, 0.2];
        cfg.r_grid = vec![10, 50];
        let run = run_tree_check(&cfg).unwrap();
        assert_eq!(run.rows.len(), 8);
        assert!(run.rows.iter().all(|r| r.holds), "survival sandwich holds on the grid");
        assert_eq!(run.aggregate.holds_rate, 1.0);
        for row in &run.rows {
            assert!(row.lower <= row.exact && row.exact <= row.upper);
            let expect_p = match row.regime {
                "super" => (1.0 + row.eps) / 2.0,
                _ => (1.0 - row.eps) / 2.0,
            };
            assert!((row.p - expect_p).abs() < 1e-15);
        }
    }

    #[test]
    fn assertions_gate_the_run() {
        let mut cfg = window_config();
        cfg.trials = 3;
        cfg.assertions = vec![Assertion {
            metric: "median_c1_scaled".into(),
            n: Some(400),
            lambda: Some(1.0),
            min: Some(0.001),
            max: Some(1e6),
        }];
        let result = run_window_sweep(&cfg).unwrap();
        assert!(result.passed);
        assert_eq!(result.outcomes.len(), 1);

        cfg.assertions[0].min = Some(1e9);
        let result = run_window_sweep(&cfg).unwrap();
        assert!(!result.passed);

        cfg.assertions[0].min = Some(0.001);
        cfg.assertions[0].n = Some(999);
        let result = run_window_sweep(&cfg).unwrap();
        assert!(!result.passed, "assertion about a missing cell fails");
        assert_eq!(result.outcomes[0].family, "<no matching cell>");

        cfg.assertions[0].n = Some(400);
        cfg.assertions[0].metric = "no_such_metric".into();
        let result = run_window_sweep(&cfg).unwrap();
        assert!(!result.passed, "unknown metric fails");
    }

    #[test]
    fn artifacts_land_in_the_requested_directory() {
        let dir = std::env::temp_dir().join(format!("percnb-sweep-test-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        let mut cfg = window_config();
        cfg.trials = 2;
        cfg.out = Some(dir.clone());
        let output = run_experiment(&cfg).unwrap();
        let artifacts = write_artifacts(&cfg, &output).unwrap();
        assert!(artifacts.records_path.exists());
        assert!(artifacts.summary_path.as_ref().unwrap().exists());
        let manifest = std::fs::read_to_string(&artifacts.manifest_path).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&manifest).unwrap();
        assert_eq!(parsed["passed"], serde_json::Value::Bool(true));
        assert!(parsed["code_version"].as_str().is_some());
        assert_eq!(parsed["config"]["kind"], "window");
        let csv = std::fs::read_to_string(&artifacts.records_path).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(TrialRecord::CSV_HEADER));
        let columns = TrialRecord::CSV_HEADER.split(',').count();
        for line in lines {
            assert_eq!(line.split(',').count(), columns, "row schema-validates");
        }
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn quantile_interpolation() {
        let values = vec![4.0, 1.0, 3.0, 2.0];
        assert_eq!(quantile(&values, 0.0), 1.0);
        assert_eq!(quantile(&values, 1.0), 4.0);
        assert_eq!(quantile(&values, 0.5), 2.5);
        assert_eq!(quantile(&values, 0.25), 1.75);
        assert_eq!(median_of(&[7.0]), 7.0);
    }
}
