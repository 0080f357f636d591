//! Command-line front end: graph generation, walk profiles, condition
//! tables, tree and coupling checks, percolation trials, and the two
//! largest-component sweeps. Exits 0 only when every configured assertion
//! (or built-in pass/fail check) holds, 1 on a failed check, 2 on errors.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use percnb::graph::{petersen_graph, read_edge_list, write_edge_list, Graph};
use percnb::harness::{
    derive_seed, resolve_against_out_dir, run_condition_tables, run_coupling_check,
    run_experiment, run_tree_check, write_artifacts, AssertionOutcome, ConditionRow, EpsRule,
    ExperimentConfig, ExperimentKind, FamilySpec, GeometryStats, RunOutput, SummaryRow,
    TreeCheckRow,
};
use percnb::nbrw::{return_probabilities, sample_nbrw};
use percnb::percolation::{
    component_diameter, component_stats, largest_component_vertices, mixing_time_tv,
    multi_root_process, sample_percolation, HaltReason,
};
use percnb::tree::sample_tree_levels;
use percnb::{Error, Result};

#[derive(Parser)]
#[command(name = "percnb", version, about = "Bond percolation near the mean-field window")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph and write it as an edge list.
    Gen(GenArgs),
    /// Non-backtracking return probabilities R[s] from one vertex.
    Nbrw(NbrwArgs),
    /// Walk statistics and structural constants across a family.
    Conditions(ConditionsArgs),
    /// Survival sandwich for percolation on the d-regular tree.
    TreeCheck(TreeCheckArgs),
    /// Tree/ball sandwich tally via the coupled sampler.
    CouplingCheck(CouplingCheckArgs),
    /// Repeated percolation trials on one graph.
    Percolate(PercolateArgs),
    /// Multi-root ball exploration until a ball exceeds a threshold.
    Explore(ExploreArgs),
    /// Largest-component sweep across the critical window.
    Window(SweepArgs),
    /// Largest-component sweep in the supercritical regime.
    Supercritical(SweepArgs),
}

/// Family selection shared by `gen`, `conditions`, and the sweeps.
#[derive(Args, Clone)]
struct FamilyArgs {
    /// complete | cycle | hamming | regular | lps | file (gen also: petersen)
    #[arg(long)]
    family: Option<String>,
    /// Comma-separated vertex counts for complete/cycle/regular members.
    #[arg(long, visible_alias = "n", value_delimiter = ',')]
    sizes: Vec<usize>,
    /// Hamming dimension.
    #[arg(long)]
    k: Option<usize>,
    /// Comma-separated Hamming side lengths.
    #[arg(long, value_delimiter = ',')]
    m: Vec<usize>,
    /// Degree of random regular members.
    #[arg(long)]
    d: Option<usize>,
    /// Prime p of the LPS pair.
    #[arg(long)]
    lps_p: Option<u64>,
    /// Comma-separated primes q of the LPS pair.
    #[arg(long, value_delimiter = ',')]
    lps_q: Vec<u64>,
    /// Edge-list file for family "file".
    #[arg(long)]
    graph: Option<PathBuf>,
}

impl FamilyArgs {
    fn to_spec(&self) -> Result<FamilySpec> {
        let name = self
            .family
            .as_deref()
            .ok_or_else(|| Error::Config("--family is required without --config".into()))?;
        let spec = match name {
            "complete" => FamilySpec::Complete { sizes: self.sizes.clone() },
            "cycle" => FamilySpec::Cycle { sizes: self.sizes.clone() },
            "hamming" => FamilySpec::Hamming {
                k: self.k.ok_or_else(|| Error::Config("hamming needs --k".into()))?,
                sides: self.m.clone(),
            },
            "regular" => FamilySpec::RandomRegular {
                degree: self.d.ok_or_else(|| Error::Config("regular needs --d".into()))?,
                sizes: self.sizes.clone(),
            },
            "lps" => FamilySpec::Lps {
                p: self.lps_p.ok_or_else(|| Error::Config("lps needs --lps-p".into()))?,
                qs: self.lps_q.clone(),
            },
            "file" => FamilySpec::File {
                path: self
                    .graph
                    .clone()
                    .ok_or_else(|| Error::Config("family \"file\" needs --graph".into()))?,
            },
            other => {
                return Err(Error::Config(format!("unknown family {other:?}")));
            }
        };
        spec.check()?;
        Ok(spec)
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Seed for randomized constructions.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output edge-list path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct NbrwArgs {
    /// Edge-list file.
    #[arg(long)]
    graph: PathBuf,
    /// Origin vertex.
    #[arg(long, default_value_t = 0)]
    vertex: u32,
    /// Horizon: number of traversals.
    #[arg(long)]
    steps: usize,
    /// Exact dense evolution (the default).
    #[arg(long, conflicts_with = "samples")]
    exact: bool,
    /// Estimate by sampling this many walks instead.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConditionsArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Window rule eps(n) = c*n^-a, e.g. "n^-0.25"; adds eps, r, S2 columns.
    #[arg(long)]
    eps_rule: Option<EpsRule>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TreeCheckArgs {
    /// Tree degree.
    #[arg(long)]
    d: usize,
    /// Comma-separated eps grid in (0, 1/2).
    #[arg(long, value_delimiter = ',')]
    eps: Vec<f64>,
    /// Comma-separated level grid.
    #[arg(long, value_delimiter = ',')]
    r: Vec<usize>,
    /// Also estimate survival by Monte Carlo with this many samples per row.
    #[arg(long)]
    mc_trials: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CouplingCheckArgs {
    /// Edge-list file.
    #[arg(long)]
    graph: PathBuf,
    /// Edge retention probability.
    #[arg(long)]
    p: f64,
    /// Ball radius.
    #[arg(long)]
    r: usize,
    #[arg(long)]
    trials: usize,
    /// Size of the uniformly drawn avoided set.
    #[arg(long, default_value_t = 0)]
    a_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct PercolateArgs {
    /// Edge-list file.
    #[arg(long)]
    graph: PathBuf,
    /// Edge retention probability.
    #[arg(long)]
    p: f64,
    #[arg(long)]
    trials: usize,
    /// Largest-component statistics to add, from {diam, mix}.
    #[arg(long, value_delimiter = ',')]
    stats: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExploreArgs {
    /// Edge-list file.
    #[arg(long)]
    graph: PathBuf,
    /// Edge retention probability.
    #[arg(long)]
    p: f64,
    /// Ball radius per root.
    #[arg(long)]
    r: usize,
    /// Ball-size threshold that counts as success.
    #[arg(long = "M")]
    threshold: usize,
    /// Step budget.
    #[arg(long = "Tmax")]
    t_max: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON experiment config; inline flags are ignored when present.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    family: FamilyArgs,
    /// Comma-separated lambda grid (window sweeps).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    lambda: Vec<f64>,
    /// Window rule eps(n) = c*n^-a (supercritical sweeps).
    #[arg(long)]
    eps_rule: Option<EpsRule>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Largest-component statistics to record, from {diam, mix}.
    #[arg(long, value_delimiter = ',')]
    stats: Vec<String>,
    /// Constant in the giant-detection threshold.
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Artifact directory (defaults to $PERCNB_OUT_DIR, then ".").
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Nbrw(args) => cmd_nbrw(args),
        Command::Conditions(args) => cmd_conditions(args),
        Command::TreeCheck(args) => cmd_tree_check(args),
        Command::CouplingCheck(args) => cmd_coupling_check(args),
        Command::Percolate(args) => cmd_percolate(args),
        Command::Explore(args) => cmd_explore(args),
        Command::Window(args) => cmd_sweep(args, ExperimentKind::Window),
        Command::Supercritical(args) => cmd_sweep(args, ExperimentKind::Supercritical),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            let path = resolve_against_out_dir(path);
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(&path, text)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_graph(path: &PathBuf) -> Result<Graph> {
    read_edge_list(path)
}

fn parse_stats(stats: &[String]) -> Result<GeometryStats> {
    let mut geometry = GeometryStats::default();
    for s in stats {
        match s.as_str() {
            "diam" => geometry.diameter = true,
            "mix" => geometry.mixing = true,
            other => {
                return Err(Error::Config(format!(
                    "unknown statistic {other:?}; expected diam or mix"
                )))
            }
        }
    }
    Ok(geometry)
}

fn cmd_gen(args: GenArgs) -> Result<i32> {
    let g = if args.family.family.as_deref() == Some("petersen") {
        petersen_graph()
    } else {
        let spec = args.family.to_spec()?;
        let params = spec.params();
        if params.len() != 1 {
            return Err(Error::Config(format!(
                "gen writes one graph; got {} family members",
                params.len()
            )));
        }
        spec.build(params[0], args.seed)?
    };
    let path = resolve_against_out_dir(&args.out);
    write_edge_list(&g, &path)?;
    println!("wrote {} (n = {}, m = {})", path.display(), g.n(), g.edge_count());
    Ok(0)
}

fn cmd_nbrw(args: NbrwArgs) -> Result<i32> {
    let g = load_graph(&args.graph)?;
    let mut csv = String::from("s,r\n");
    match args.samples {
        None => {
            let profile = return_probabilities(&g, args.vertex, args.steps)?;
            for s in 1..=profile.horizon() {
                csv.push_str(&format!("{s},{}\n", profile.at(s)));
            }
        }
        Some(samples) => {
            if samples == 0 {
                return Err(Error::InvalidParameter("--samples must be positive".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            let mut returns = vec![0u64; args.steps];
            for _ in 0..samples {
                let path = sample_nbrw(&g, args.vertex, args.steps, &mut rng)?;
                for s in 1..=args.steps {
                    if path[s] == args.vertex {
                        returns[s - 1] += 1;
                    }
                }
            }
            for (i, count) in returns.iter().enumerate() {
                csv.push_str(&format!("{},{}\n", i + 1, *count as f64 / samples as f64));
            }
        }
    }
    emit(&args.out, &csv)?;
    Ok(0)
}

fn base_config(kind: ExperimentKind, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        kind,
        family: None,
        lambda_grid: vec![],
        eps_rule: None,
        trials: 1,
        master_seed: seed,
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

fn cmd_conditions(args: ConditionsArgs) -> Result<i32> {
    let mut cfg = base_config(ExperimentKind::Conditions, args.seed);
    cfg.family = Some(args.family.to_spec()?);
    cfg.eps_rule = args.eps_rule;
    let run = run_condition_tables(&cfg)?;
    let mut csv = String::from(ConditionRow::CSV_HEADER);
    for row in &run.rows {
        csv.push('\n');
        csv.push_str(&row.csv_row());
    }
    csv.push('\n');
    emit(&args.out, &csv)?;
    Ok(0)
}

fn cmd_tree_check(args: TreeCheckArgs) -> Result<i32> {
    let mut cfg = base_config(ExperimentKind::Tree, args.seed);
    cfg.degree = Some(args.d);
    cfg.eps_grid = args.eps.clone();
    cfg.r_grid = args.r.clone();
    let run = run_tree_check(&cfg)?;
    let mc = args.mc_trials.map(|trials| -> Result<Vec<f64>> {
        run.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut rng =
                    ChaCha8Rng::seed_from_u64(derive_seed(args.seed, &[i as u64]));
                let mut survived = 0u64;
                for _ in 0..trials {
                    match sample_tree_levels(row.d, row.p, row.r, &mut rng) {
                        Ok(sample) => {
                            if sample.level(row.r) > 0 {
                                survived += 1;
                            }
                        }
                        // A sample that outgrows the node cap has long since
                        // survived to level r.
                        Err(Error::CapacityExceeded(_)) => survived += 1,
                        Err(e) => return Err(e),
                    }
                }
                Ok(survived as f64 / trials as f64)
            })
            .collect()
    });
    let mut csv = String::from(TreeCheckRow::CSV_HEADER);
    let mc = match mc {
        Some(result) => {
            csv.push_str(",mc_survival");
            Some(result?)
        }
        None => None,
    };
    for (i, row) in run.rows.iter().enumerate() {
        csv.push('\n');
        csv.push_str(&row.csv_row());
        if let Some(mc) = &mc {
            csv.push_str(&format!(",{}", mc[i]));
        }
    }
    csv.push('\n');
    emit(&args.out, &csv)?;
    let failed = run.rows.iter().filter(|r| !r.holds).count();
    if failed > 0 {
        eprintln!("FAIL: survival bounds violated on {failed} of {} rows", run.rows.len());
        return Ok(1);
    }
    eprintln!("PASS: survival bounds hold on all {} rows", run.rows.len());
    Ok(0)
}

fn cmd_coupling_check(args: CouplingCheckArgs) -> Result<i32> {
    let mut cfg = base_config(ExperimentKind::Coupling, args.seed);
    cfg.family = Some(FamilySpec::File { path: args.graph.clone() });
    cfg.p = Some(args.p);
    cfg.r = Some(args.r);
    cfg.avoid_size = Some(args.a_size);
    cfg.trials = args.trials;
    let run = run_coupling_check(&cfg)?;
    let mut code = 0;
    for row in &run.rows {
        println!(
            "{}: n = {}, d = {}, p = {}, r = {}, |A| = {}: {}/{} sandwich passes, \
             {} strict-lower witnesses",
            row.family, row.n, row.d, row.p, row.r, row.avoid_size, row.passes, row.trials,
            row.strict_lower
        );
        if row.passes != row.trials {
            code = 1;
        }
    }
    println!("{}", if code == 0 { "PASS" } else { "FAIL" });
    Ok(code)
}

fn cmd_percolate(args: PercolateArgs) -> Result<i32> {
    let g = load_graph(&args.graph)?;
    let geometry = parse_stats(&args.stats)?;
    let mut csv = String::from("trial,c1,diam,mix\n");
    for trial in 0..args.trials {
        let mask = sample_percolation(&g, args.p, derive_seed(args.seed, &[trial as u64]))?;
        let stats = component_stats(&g, &mask);
        let (mut diam, mut mix) = (String::new(), String::new());
        if geometry.diameter || geometry.mixing {
            let comp = largest_component_vertices(&g, &mask);
            if geometry.diameter {
                diam = component_diameter(&g, &mask, &comp)?.to_string();
            }
            if geometry.mixing {
                mix = match mixing_time_tv(&g, &mask, &comp) {
                    Ok(t) => t.to_string(),
                    Err(Error::CapacityExceeded(_)) => String::new(),
                    Err(e) => return Err(e),
                };
            }
        }
        csv.push_str(&format!("{trial},{},{diam},{mix}\n", stats.largest()));
    }
    emit(&args.out, &csv)?;
    Ok(0)
}

fn cmd_explore(args: ExploreArgs) -> Result<i32> {
    let g = load_graph(&args.graph)?;
    let report = multi_root_process(&g, args.p, args.r, args.threshold, args.t_max, args.seed)?;
    let mut csv = String::from("step,root,ball_size,hit,visited_after\n");
    for (i, step) in report.steps.iter().enumerate() {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            i + 1,
            step.root,
            step.ball_size,
            u8::from(step.hit),
            step.visited_after
        ));
    }
    emit(&args.out, &csv)?;
    let halted = match report.halted {
        HaltReason::Success => format!(
            "success at step {} (ball > {})",
            report.success_step.unwrap(),
            args.threshold
        ),
        HaltReason::Exhausted => "exhausted every vertex".to_string(),
        HaltReason::StepLimit => "step budget ran out".to_string(),
    };
    eprintln!("halted: {halted}; |V| = {} of {}", report.visited, g.n());
    Ok(0)
}

fn print_outcomes(outcomes: &[AssertionOutcome]) {
    for o in outcomes {
        let value = o.value.map(|v| v.to_string()).unwrap_or_else(|| "<missing>".into());
        let lo = o.min.map(|v| v.to_string()).unwrap_or_else(|| "-inf".into());
        let hi = o.max.map(|v| v.to_string()).unwrap_or_else(|| "+inf".into());
        let lambda = o.lambda.map(|l| format!(", lambda = {l}")).unwrap_or_default();
        eprintln!(
            "assert {} [{}, n = {}{}]: {} in [{}, {}] -> {}",
            o.metric,
            o.family,
            o.n,
            lambda,
            value,
            lo,
            hi,
            if o.passed { "pass" } else { "FAIL" }
        );
    }
}

fn cmd_sweep(args: SweepArgs, kind: ExperimentKind) -> Result<i32> {
    let cfg = match &args.config {
        Some(path) => {
            let cfg = ExperimentConfig::from_json_file(path)?;
            if cfg.kind != kind {
                return Err(Error::Config(format!(
                    "config kind {:?} does not match this subcommand",
                    cfg.kind
                )));
            }
            cfg
        }
        None => {
            let mut cfg = base_config(kind, args.seed);
            cfg.family = Some(args.family.to_spec()?);
            cfg.lambda_grid = args.lambda.clone();
            cfg.eps_rule = args.eps_rule;
            cfg.trials = args.trials;
            cfg.geometry = parse_stats(&args.stats)?;
            cfg.delta = args.delta;
            cfg.out = args.out.clone();
            cfg
        }
    };
    let output = run_experiment(&cfg)?;
    if let RunOutput::Sweep(sweep) = &output {
        println!("{}", SummaryRow::CSV_HEADER);
        for row in &sweep.summaries {
            println!("{}", row.csv_row());
        }
        eprintln!("{} trial records", sweep.records.len());
    }
    let artifacts = write_artifacts(&cfg, &output)?;
    eprintln!("records: {}", artifacts.records_path.display());
    if let Some(path) = &artifacts.summary_path {
        eprintln!("summary: {}", path.display());
    }
    eprintln!("manifest: {}", artifacts.manifest_path.display());
    print_outcomes(output.outcomes());
    if output.passed() {
        if !output.outcomes().is_empty() {
            eprintln!("all assertions passed");
        }
        Ok(0)
    } else {
        eprintln!("assertion failures");
        Ok(1)
    }
}
