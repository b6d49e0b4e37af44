//! Command-line front end: solve, generate, bench, and self-check
//! subcommands over the JSON formats in [`crate::io`].
//!
//! Exit codes: 0 success, 1 usage, 2 solve or I/O error, 3 self-check
//! failure. All solver output files are deterministic for fixed flags and
//! seed; wall-clock timings go to stderr only.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

use crate::esfl::{solve_esfl_mst, solve_esfl_ptas, EsflConfig};
use crate::esl::{solve_esl, InnerSolver};
use crate::est::{solve_est, EstConfig, Strategy};
use crate::geometry::{Instance, LineSpec, Point};
use crate::io;
use crate::oracles;
use crate::reductions;
use crate::report::SolveReport;

pub fn cli_main(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    init_threads(cli.jobs);
    match run(cli.cmd) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    }
}

fn init_threads(flag_jobs: usize) {
    let jobs = std::env::var("STEINER_JOBS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .unwrap_or(flag_jobs);
    if jobs > 0 {
        // Fails only if a global pool already exists, which is fine.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
}

#[derive(Parser)]
#[command(
    name = "steiner",
    version,
    about = "Steiner trees with a zero-cost line: solvers, baselines, and gadget generators"
)]
struct Cli {
    /// Worker threads (0 = all cores). Overridden by STEINER_JOBS.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve a plain Steiner tree instance (any line in the file is ignored).
    Est(EstArgs),
    /// Solve with the mandatory fixed line from the instance file.
    Esfl(EsflArgs),
    /// Solve with a free line; the best line is reported and drawn.
    Esl(EslArgs),
    /// Generate a hardness gadget instance file.
    Gadget(GadgetArgs),
    /// Time the pipeline on seeded instances; timings go to stderr.
    Bench(BenchArgs),
    /// Run the built-in invariant suites; exits 3 if any fail.
    Check(CheckArgs),
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse()
}

#[derive(Args)]
struct EstArgs {
    /// Instance JSON path.
    #[arg(long)]
    input: PathBuf,
    /// exact-if-small (alias: exact), mst, or insertion.
    #[arg(long, default_value = "exact-if-small", value_parser = parse_strategy)]
    strategy: Strategy,
    /// Solution JSON path (default: <input stem>.solution.json).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write <input stem>.svg.
    #[arg(long)]
    svg: bool,
}

#[derive(Args)]
struct EsflArgs {
    #[arg(long)]
    input: PathBuf,
    /// Approximation parameter; smaller is finer and slower.
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    /// Inner Steiner solver for the discretized pieces.
    #[arg(long, default_value = "exact-if-small", value_parser = parse_strategy)]
    strategy: Strategy,
    /// Keep surviving line attachments where they were sampled instead of
    /// re-snapping them to perpendicular feet.
    #[arg(long)]
    no_snap: bool,
    /// Skip segment restoration (ablation; weight can only go up).
    #[arg(long)]
    no_fill: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: bool,
}

#[derive(Args)]
struct EslArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long, default_value = "exact-if-small", value_parser = parse_strategy)]
    strategy: Strategy,
    #[arg(long)]
    no_snap: bool,
    #[arg(long)]
    no_fill: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GadgetKind {
    /// Two-row instance embedded against a planted fixed line.
    PalimestEsfl,
    /// Same instance with two anchors pinning the free line.
    PalimestEsl,
}

impl GadgetKind {
    fn tag(self) -> &'static str {
        match self {
            GadgetKind::PalimestEsfl => "palimest-esfl",
            GadgetKind::PalimestEsl => "palimest-esl",
        }
    }
}

#[derive(Args)]
struct GadgetArgs {
    #[arg(long, value_enum)]
    kind: GadgetKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Terminals on the baseline row.
    #[arg(long, default_value_t = 3)]
    n_bottom: usize,
    /// Terminals on the upper row.
    #[arg(long, default_value_t = 2)]
    n_top: usize,
    #[arg(long, default_value_t = 10.0)]
    width: f64,
    #[arg(long, default_value_t = 1.0)]
    height: f64,
    /// Output path (default: gadget-<kind>-<seed>.json).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Only "pipeline" is built in.
    #[arg(long, default_value = "pipeline")]
    suite: String,
    #[arg(long, default_value_t = 3)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report directory.
    #[arg(long, default_value = "bench")]
    out: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn run(cmd: Cmd) -> Result<i32> {
    match cmd {
        Cmd::Est(args) => cmd_est(args),
        Cmd::Esfl(args) => cmd_esfl(args),
        Cmd::Esl(args) => cmd_esl(args),
        Cmd::Gadget(args) => cmd_gadget(args),
        Cmd::Bench(args) => cmd_bench(args),
        Cmd::Check(args) => cmd_check(args),
    }
}

fn derived_path(input: &Path, suffix: &str) -> PathBuf {
    let stem = input
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("steiner-out");
    input.with_file_name(format!("{stem}.{suffix}"))
}

fn finish_solve(
    args_input: &Path,
    out: Option<PathBuf>,
    svg: bool,
    graph: &crate::geometry::SteinerGraph,
    attachments: &[crate::geometry::Attachment],
    line: Option<&LineSpec>,
    report: &SolveReport,
) -> Result<()> {
    let sol_path = out.unwrap_or_else(|| derived_path(args_input, "solution.json"));
    io::write_solution(&sol_path, graph, attachments)
        .with_context(|| format!("writing {}", sol_path.display()))?;
    let report_path = derived_path(args_input, "report.json");
    std::fs::write(&report_path, report.to_json())
        .with_context(|| format!("writing {}", report_path.display()))?;
    if svg {
        let svg_path = derived_path(args_input, "svg");
        io::write_svg(&svg_path, graph, line)
            .with_context(|| format!("writing {}", svg_path.display()))?;
    }
    print!("{}", report.to_json());
    eprint!("{}", report.timing_lines());
    Ok(())
}

fn cmd_est(args: EstArgs) -> Result<i32> {
    let inst = io::read_instance(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    if inst.line.is_some() {
        eprintln!("note: `est` ignores the instance's line");
    }
    let digest = io::instance_digest(&args.input)?;
    let started = Instant::now();
    let sol = solve_est(&inst.terminals, args.strategy, &EstConfig::default())?;
    let mut report = SolveReport::new(&format!("est:{}", args.strategy.as_str()), sol.cost);
    report.instance_digest = Some(digest);
    report.timings.push(("solve".into(), started.elapsed()));
    finish_solve(&args.input, args.out, args.svg, &sol.graph, &[], None, &report)?;
    Ok(0)
}

fn esfl_config(strategy: Strategy, no_snap: bool, no_fill: bool) -> EsflConfig {
    EsflConfig {
        strategy,
        snap: !no_snap,
        fill: !no_fill,
        ..EsflConfig::default()
    }
}

fn cmd_esfl(args: EsflArgs) -> Result<i32> {
    let inst = io::read_instance(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let digest = io::instance_digest(&args.input)?;
    let cfg = esfl_config(args.strategy, args.no_snap, args.no_fill);
    let sol = solve_esfl_ptas(&inst, args.epsilon, &cfg)?;
    let mut report = SolveReport::new("esfl:ptas", sol.cost);
    report.instance_digest = Some(digest);
    report.epsilon = Some(args.epsilon);
    report.epsilon_inner = Some(args.epsilon / cfg.inner_refinement);
    report.lower_bound = Some(sol.lower_bound);
    report.ratio_bound = Some(sol.ratio_bound);
    report.holes_before = Some(sol.stats.holes_before);
    report.holes_after = Some(sol.stats.holes_after);
    report.released_weight = Some(sol.stats.released_weight);
    report.timings = sol.stats.timings.clone();
    finish_solve(
        &args.input,
        args.out,
        args.svg,
        &sol.graph,
        &sol.attachments,
        inst.line.as_ref(),
        &report,
    )?;
    Ok(0)
}

fn cmd_esl(args: EslArgs) -> Result<i32> {
    let raw = io::read_instance(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    if raw.line.is_some() {
        eprintln!("note: `esl` chooses its own line; the instance's line is ignored");
    }
    let digest = io::instance_digest(&args.input)?;
    let inst = Instance::new(raw.terminals, None)?;
    let cfg = esfl_config(args.strategy, args.no_snap, args.no_fill);
    let sol = solve_esl(&inst, args.epsilon, &cfg, InnerSolver::Ptas)?;
    let mut report = SolveReport::new("esl:ptas", sol.esfl.cost);
    report.instance_digest = Some(digest);
    report.epsilon = Some(args.epsilon);
    report.epsilon_inner = Some(args.epsilon / cfg.inner_refinement);
    report.lower_bound = Some(sol.esfl.lower_bound);
    report.ratio_bound = Some(sol.esfl.ratio_bound);
    report.line = Some([sol.line.a(), sol.line.b(), sol.line.c()]);
    report.holes_before = Some(sol.esfl.stats.holes_before);
    report.holes_after = Some(sol.esfl.stats.holes_after);
    report.released_weight = Some(sol.esfl.stats.released_weight);
    report.timings = sol.esfl.stats.timings.clone();
    finish_solve(
        &args.input,
        args.out,
        args.svg,
        &sol.esfl.graph,
        &sol.esfl.attachments,
        Some(&sol.line),
        &report,
    )?;
    Ok(0)
}

fn cmd_gadget(args: GadgetArgs) -> Result<i32> {
    let gadget = reductions::gen_palimest(args.seed, args.n_bottom, args.n_top, args.width, args.height)?;
    let inst = match args.kind {
        GadgetKind::PalimestEsfl => reductions::reduce_to_esfl(&gadget)?,
        GadgetKind::PalimestEsl => reductions::reduce_to_esl(&gadget)?,
    };
    let out = args
        .out
        .unwrap_or_else(|| PathBuf::from(format!("gadget-{}-{}.json", args.kind.tag(), args.seed)));
    io::write_instance(&out, &inst).with_context(|| format!("writing {}", out.display()))?;
    let summary = serde_json::json!({
        "kind": args.kind.tag(),
        "seed": args.seed,
        "terminals": inst.terminals.len(),
        "mst_length": gadget.mst_length,
        "expected_offset": reductions::expected_offset(&gadget),
        "out": out.display().to_string(),
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(0)
}

fn random_instance(rng: &mut ChaCha8Rng, n: usize, line: LineSpec) -> Instance {
    let mut terminals: Vec<Point> = Vec::with_capacity(n);
    while terminals.len() < n {
        let p = Point::at(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        if !terminals.contains(&p) {
            terminals.push(p);
        }
    }
    Instance::new(terminals, Some(line)).expect("finite points")
}

fn cmd_bench(args: BenchArgs) -> Result<i32> {
    if args.suite != "pipeline" {
        eprintln!("unknown bench suite '{}' (available: pipeline)", args.suite);
        return Ok(1);
    }
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let line = LineSpec::new(0.0, 1.0, 0.0).unwrap();
    let mut entries = Vec::new();
    for &n in &[4usize, 6, 8, 12] {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed ^ (n as u64).wrapping_mul(0x9e37));
        let inst = random_instance(&mut rng, n, line);
        let mut costs = Vec::new();
        let mut millis = Vec::new();
        for _ in 0..args.trials.max(1) {
            let started = Instant::now();
            let sol = solve_esfl_ptas(&inst, 0.5, &EsflConfig::default())?;
            millis.push(started.elapsed().as_secs_f64() * 1e3);
            costs.push(sol.cost);
        }
        millis.sort_by(f64::total_cmp);
        let median = millis[millis.len() / 2];
        eprintln!("pipeline n={n}: median {median:.3} ms over {} trials", millis.len());
        if costs.windows(2).any(|w| w[0].to_bits() != w[1].to_bits()) {
            eprintln!("warning: cost varied between trials at n={n}");
        }
        entries.push(serde_json::json!({"n": n, "epsilon": 0.5, "cost": costs[0]}));
    }
    let report = serde_json::json!({
        "suite": "pipeline",
        "seed": args.seed,
        "entries": entries,
    });
    let path = args.out.join("pipeline.json");
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(0)
}

struct Suite {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn cmd_check(args: CheckArgs) -> Result<i32> {
    let suites = vec![
        check_anchor_margin_suite(),
        check_tree_ratio(args.seed),
        check_pipeline_contracts(args.seed),
        check_oracle_sandwich(args.seed),
    ];
    let mut ok = true;
    for s in &suites {
        let verdict = if s.pass { "ok" } else { "FAIL" };
        println!("check {}: {} ({})", s.name, verdict, s.detail);
        ok &= s.pass;
    }
    Ok(if ok { 0 } else { 3 })
}

fn check_anchor_margin_suite() -> Suite {
    let report = reductions::check_anchor_margin(200_001, 1000.0);
    let closed = [
        (16.0 - 2.5 * 34.0_f64.sqrt()) / 3.0,
        16.0 / 5.0 - 34.0_f64.sqrt() / 2.0,
    ];
    let kinks_match = report
        .kink_values
        .iter()
        .zip(closed)
        .all(|(got, want)| (got - want).abs() < 1e-12);
    Suite {
        name: "anchor-margin",
        pass: report.all_positive && kinks_match,
        detail: format!(
            "min {:.6} at slope {:.6} over {} samples",
            report.min_value, report.argmin, report.samples
        ),
    }
}

fn check_tree_ratio(seed: u64) -> Suite {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(101));
    let cfg = EstConfig::default();
    let mut worst = 1.0_f64;
    for round in 0..40 {
        let n = 3 + (round % 3);
        let inst = random_instance(&mut rng, n, LineSpec::new(0.0, 1.0, 0.0).unwrap());
        let exact = match solve_est(&inst.terminals, Strategy::ExactIfSmall, &cfg) {
            Ok(s) => s,
            Err(e) => {
                return Suite {
                    name: "tree-ratio",
                    pass: false,
                    detail: format!("solver error: {e}"),
                }
            }
        };
        let mst = solve_est(&inst.terminals, Strategy::Mst, &cfg).expect("mst");
        if exact.cost > 0.0 {
            worst = worst.max(mst.cost / exact.cost);
        }
    }
    Suite {
        name: "tree-ratio",
        pass: worst <= 1.2149,
        detail: format!("worst mst/exact {worst:.6} over 40 instances (bound 1.2149)"),
    }
}

fn check_pipeline_contracts(seed: u64) -> Suite {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(202));
    let line = LineSpec::new(0.0, 1.0, 0.0).unwrap();
    let cfg = EsflConfig::default();
    for round in 0..15 {
        let n = 2 + (round % 4);
        let inst = random_instance(&mut rng, n, line);
        let sol = match solve_esfl_ptas(&inst, 0.5, &cfg) {
            Ok(s) => s,
            Err(e) => {
                return Suite {
                    name: "pipeline-contracts",
                    pass: false,
                    detail: format!("solver error: {e}"),
                }
            }
        };
        if let Err(e) = sol.graph.validate(Some(&line)) {
            return Suite {
                name: "pipeline-contracts",
                pass: false,
                detail: format!("invalid output tree: {e}"),
            };
        }
        if sol.stats.holes_after > 10 * n {
            return Suite {
                name: "pipeline-contracts",
                pass: false,
                detail: format!("{} holes left for n={n}", sol.stats.holes_after),
            };
        }
        for fs in &sol.stats.fill {
            if fs.weight_after > fs.weight_before * (1.0 + 1e-9) + 1e-12 {
                return Suite {
                    name: "pipeline-contracts",
                    pass: false,
                    detail: "segment restoration increased weight".into(),
                };
            }
        }
        if sol.cost < sol.lower_bound * (1.0 - 1e-9) - 1e-12 {
            return Suite {
                name: "pipeline-contracts",
                pass: false,
                detail: format!("cost {} beat lower bound {}", sol.cost, sol.lower_bound),
            };
        }
    }
    Suite {
        name: "pipeline-contracts",
        pass: true,
        detail: "15 seeded runs: valid trees, hole and weight bounds hold".into(),
    }
}

fn check_oracle_sandwich(seed: u64) -> Suite {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(303));
    let line = LineSpec::new(0.0, 1.0, 0.0).unwrap();
    let est_cfg = EstConfig::default();
    let mut worst = 1.0_f64;
    for round in 0..12 {
        let n = 2 + (round % 3);
        let inst = random_instance(&mut rng, n, line);
        let exact = match oracles::solve_esfl_exact(&inst, &est_cfg) {
            Ok(c) => c,
            Err(e) => {
                return Suite {
                    name: "oracle-sandwich",
                    pass: false,
                    detail: format!("oracle error: {e}"),
                }
            }
        };
        let mst = solve_esfl_mst(&inst).expect("baseline");
        let ptas = solve_esfl_ptas(&inst, 0.5, &EsflConfig::default()).expect("pipeline");
        if exact > ptas.cost + 1e-9 || exact > mst.cost + 1e-9 {
            return Suite {
                name: "oracle-sandwich",
                pass: false,
                detail: format!(
                    "oracle {exact:.9} above ptas {:.9} or baseline {:.9}",
                    ptas.cost, mst.cost
                ),
            };
        }
        if exact > 1e-9 {
            worst = worst.max(mst.cost / exact);
        }
    }
    Suite {
        name: "oracle-sandwich",
        pass: worst <= 1.2149,
        detail: format!("worst baseline/oracle {worst:.6} over 12 instances (bound 1.2149)"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(parts: &[&str]) -> Vec<String> {
        std::iter::once("steiner".to_string())
            .chain(parts.iter().map(|s| s.to_string()))
            .collect()
    }

    #[test]
    fn unknown_subcommand_is_a_usage_error() {
        assert_eq!(cli_main(args(&["frobnicate"])), 1);
    }

    #[test]
    fn help_exits_cleanly() {
        assert_eq!(cli_main(args(&["--help"])), 0);
    }

    #[test]
    fn missing_input_file_is_a_solve_error() {
        assert_eq!(
            cli_main(args(&["est", "--input", "/nonexistent/xyz.json"])),
            2
        );
    }

    #[test]
    fn gadget_and_solve_roundtrip_through_files() {
        let dir = tempfile::tempdir().unwrap();
        let inst_path = dir.path().join("g.json");
        let code = cli_main(args(&[
            "gadget",
            "--kind",
            "palimest-esfl",
            "--seed",
            "7",
            "--n-bottom",
            "2",
            "--n-top",
            "1",
            "--out",
            inst_path.to_str().unwrap(),
        ]));
        assert_eq!(code, 0);
        let code = cli_main(args(&[
            "esfl",
            "--input",
            inst_path.to_str().unwrap(),
            "--epsilon",
            "1.0",
            "--svg",
        ]));
        assert_eq!(code, 0);
        assert!(dir.path().join("g.solution.json").exists());
        assert!(dir.path().join("g.report.json").exists());
        assert!(dir.path().join("g.svg").exists());
        let sol = io::read_solution(&dir.path().join("g.solution.json")).unwrap();
        assert!(sol.cost() > 0.0);
    }

    #[test]
    fn check_suites_pass_on_a_clean_build() {
        assert_eq!(cli_main(args(&["check"])), 0);
    }
}
