//! Release gate: one test per acceptance criterion, each printing a single
//! PASS or FAIL line (run with `--nocapture` to see them on success).

mod common;

use std::time::{Duration, Instant};

use common::*;
use steiner_line::esfl::{
    discretize, fill_holes, solve_esfl_mst, solve_esfl_ptas, width_bound_factor, EsflConfig,
};
use steiner_line::est::{solve_est, EstConfig, Strategy};
use steiner_line::geometry::NodeKind;
use steiner_line::oracles::{
    count_downward_edges, solve_esfl_exact, solve_esl_exact,
};
use steiner_line::reductions::{check_anchor_margin, ANCHOR_MARGIN_KINKS};
use steiner_line::{Instance, LineSpec, Point};

fn verdict(num: u32, name: &str, outcome: Result<String, String>) {
    match outcome {
        Ok(detail) => println!("criterion {num:02} [{name}]: PASS ({detail})"),
        Err(detail) => {
            println!("criterion {num:02} [{name}]: FAIL ({detail})");
            panic!("criterion {num} [{name}] failed: {detail}");
        }
    }
}

fn within_budget(started: Instant, budget: Duration, detail: String) -> Result<String, String> {
    let elapsed = started.elapsed();
    if elapsed <= budget {
        Ok(format!("{detail}; wall {elapsed:.2?} within {budget:?}"))
    } else {
        Err(format!("{detail}; wall {elapsed:.2?} exceeds budget {budget:?}"))
    }
}

#[test]
fn criterion_01_exact_solver_matches_closed_forms() {
    let cfg = EstConfig::default();
    let run = || -> Result<String, String> {
        let h = 3.0_f64.sqrt() / 2.0;
        let triangle = [
            Point::new(0.0, 0.0).unwrap(),
            Point::new(1.0, 0.0).unwrap(),
            Point::new(0.5, h).unwrap(),
        ];
        let started = Instant::now();
        let tri = steiner_line::est::solve_exact(&triangle, &cfg)
            .map_err(|e| format!("triangle solve failed: {e}"))?;
        let tri_time = started.elapsed();
        let want_tri = 3.0_f64.sqrt();
        if (tri.cost - want_tri).abs() > 1e-9 {
            return Err(format!("triangle cost {} want {want_tri}", tri.cost));
        }
        if tri_time > Duration::from_secs(1) {
            return Err(format!("triangle took {tri_time:.2?}"));
        }
        let square = [
            Point::new(0.0, 0.0).unwrap(),
            Point::new(1.0, 0.0).unwrap(),
            Point::new(1.0, 1.0).unwrap(),
            Point::new(0.0, 1.0).unwrap(),
        ];
        let started = Instant::now();
        let sq = steiner_line::est::solve_exact(&square, &cfg)
            .map_err(|e| format!("square solve failed: {e}"))?;
        let sq_time = started.elapsed();
        let want_sq = 1.0 + 3.0_f64.sqrt();
        if (sq.cost - want_sq).abs() > 1e-9 {
            return Err(format!("square cost {} want {want_sq}", sq.cost));
        }
        if sq_time > Duration::from_secs(1) {
            return Err(format!("square took {sq_time:.2?}"));
        }
        Ok(format!(
            "triangle {:.12} in {tri_time:.2?}, square {:.12} in {sq_time:.2?}",
            tri.cost, sq.cost
        ))
    };
    verdict(1, "exact solver closed forms", run());
}

#[test]
fn criterion_02_spanning_vs_exact_ratio() {
    let run = || -> Result<String, String> {
        let started = Instant::now();
        let cfg = EstConfig::default();
        // 1000 instances; larger sizes are sampled less often because the
        // exact solver's work grows factorially with n.
        let plan: [(usize, usize); 5] = [(3, 300), (4, 250), (5, 250), (6, 150), (7, 50)];
        let mut rng = seeded(0xC2);
        let mut worst = 1.0_f64;
        let mut total = 0usize;
        for (n, count) in plan {
            for _ in 0..count {
                let pts = uniform_points(&mut rng, n, -5.0, 5.0);
                let exact = steiner_line::est::solve_exact(&pts, &cfg)
                    .map_err(|e| format!("exact failed at n={n}: {e}"))?;
                let mst = steiner_line::est::solve_mst(&pts)
                    .map_err(|e| format!("mst failed at n={n}: {e}"))?;
                if exact.cost > mst.cost + 1e-9 {
                    return Err(format!(
                        "exact {} above mst {} at n={n}",
                        exact.cost, mst.cost
                    ));
                }
                let ratio = mst.cost / exact.cost;
                if !(1.0 - 1e-9..=1.2149).contains(&ratio) {
                    return Err(format!("ratio {ratio} out of [1, 1.2149] at n={n}"));
                }
                worst = worst.max(ratio);
                total += 1;
            }
        }
        within_budget(
            started,
            Duration::from_secs(120),
            format!("worst mst/exact {worst:.6} over {total} instances (sizes 3..7, counts 300/250/250/150/50)"),
        )
    };
    verdict(2, "spanning vs exact ratio", run());
}

#[test]
fn criterion_03_line_baseline_vs_oracle_ratio() {
    let run = || -> Result<String, String> {
        let started = Instant::now();
        let cfg = EstConfig::default();
        let mut worst = 1.0_f64;
        for (i, inst) in instance_family(0xC3, 500, &[2, 3, 4, 5]).iter().enumerate() {
            let oracle = solve_esfl_exact(inst, &cfg).map_err(|e| format!("oracle #{i}: {e}"))?;
            let baseline = solve_esfl_mst(inst).map_err(|e| format!("baseline #{i}: {e}"))?;
            if baseline.cost < oracle - 1e-9 {
                return Err(format!(
                    "baseline {} beat oracle {} on instance {i}",
                    baseline.cost, oracle
                ));
            }
            if oracle > 1e-12 {
                let ratio = baseline.cost / oracle;
                if ratio > 1.2149 {
                    return Err(format!("ratio {ratio} above 1.2149 on instance {i}"));
                }
                worst = worst.max(ratio);
            }
        }
        within_budget(
            started,
            Duration::from_secs(300),
            format!("worst baseline/oracle {worst:.6} over 500 instances, n in 2..5"),
        )
    };
    verdict(3, "line baseline vs oracle ratio", run());
}

#[test]
fn criterion_04_pipeline_approximation_guarantee() {
    let run = || -> Result<String, String> {
        let started = Instant::now();
        let est_cfg = EstConfig::default();
        let cfg = EsflConfig::default();
        let family = instance_family(0xC4, 200, &[2, 3, 4, 5]);
        let mut details = Vec::new();
        for &eps in &[0.1, 0.5, 1.0] {
            let mut worst = 1.0_f64;
            for (i, inst) in family.iter().enumerate() {
                let oracle =
                    solve_esfl_exact(inst, &est_cfg).map_err(|e| format!("oracle #{i}: {e}"))?;
                let sol = solve_esfl_ptas(inst, eps, &cfg)
                    .map_err(|e| format!("pipeline #{i} eps={eps}: {e}"))?;
                if oracle <= 1e-12 {
                    if sol.cost > 1e-9 {
                        return Err(format!("cost {} on zero-optimum instance {i}", sol.cost));
                    }
                    continue;
                }
                let ratio = sol.cost / oracle;
                if ratio > 1.0 + eps + 1e-6 {
                    return Err(format!(
                        "ratio {ratio:.9} above 1+{eps} on instance {i} (cost {}, oracle {})",
                        sol.cost, oracle
                    ));
                }
                if ratio < 1.0 - 1e-9 {
                    return Err(format!(
                        "pipeline {:.12} beat the exact oracle {:.12} on instance {i}",
                        sol.cost, oracle
                    ));
                }
                worst = worst.max(ratio);
            }
            details.push(format!("eps {eps}: worst {worst:.6}"));
        }
        within_budget(
            started,
            Duration::from_secs(900),
            format!("{} over 200 instances each", details.join(", ")),
        )
    };
    verdict(4, "pipeline approximation guarantee", run());
}

#[test]
fn criterion_05_hole_count_bound() {
    let run = || -> Result<String, String> {
        let cfg = EsflConfig::default();
        let mut worst_fill = 0usize;
        let mut runs = 0usize;
        let mut check = |inst: &Instance, eps: f64, label: &str| -> Result<(), String> {
            let n = inst.terminals.len();
            let sol =
                solve_esfl_ptas(inst, eps, &cfg).map_err(|e| format!("{label} eps={eps}: {e}"))?;
            if sol.stats.holes_after > 10 * n {
                return Err(format!(
                    "{label} eps={eps}: {} holes for n={n} (bound {})",
                    sol.stats.holes_after,
                    10 * n
                ));
            }
            worst_fill = worst_fill.max(sol.stats.holes_after);
            runs += 1;
            Ok(())
        };
        let family = instance_family(0xC4, 200, &[2, 3, 4, 5]);
        for &eps in &[0.1, 0.5, 1.0] {
            for (i, inst) in family.iter().enumerate() {
                check(inst, eps, &format!("family instance {i}"))?;
            }
        }
        for (i, inst) in adversarial_instances().iter().enumerate() {
            for &eps in &[0.1, 1.0] {
                check(inst, eps, &format!("adversarial instance {i}"))?;
            }
        }
        Ok(format!("max holes after restoration {worst_fill} over {runs} runs, all within 10n"))
    };
    verdict(5, "hole count bound", run());
}

#[test]
fn criterion_06_segment_restoration_contracts() {
    let run = || -> Result<String, String> {
        let est_cfg = EstConfig::default();
        let mut runs = 0usize;
        let mut check_piece = |piece: &[Point], eps: f64, label: &str| -> Result<(), String> {
            let disc = discretize(piece, eps);
            let est_terminals = disc.est_terminals();
            let sol = solve_est(&est_terminals, Strategy::ExactIfSmall, &est_cfg)
                .map_err(|e| format!("{label}: inner solve failed: {e}"))?;
            let tagged =
                retag_line_points(&sol.graph, disc.real_terminals.len(), disc.line_points.len());
            let before = tagged.cost();
            let outcome =
                fill_holes(&tagged, &disc, &est_cfg).map_err(|e| format!("{label}: {e}"))?;
            outcome
                .tree
                .validate(None)
                .map_err(|e| format!("{label}: output not a valid tree: {e}"))?;
            for (id, node) in outcome.tree.nodes().iter().enumerate() {
                if node.kind == NodeKind::Steiner && outcome.tree.degree(id) != 3 {
                    return Err(format!(
                        "{label}: steiner {id} has degree {}",
                        outcome.tree.degree(id)
                    ));
                }
            }
            if outcome.tree.cost() > before * (1.0 + 1e-9) + 1e-12 {
                return Err(format!(
                    "{label}: weight rose from {before} to {}",
                    outcome.tree.cost()
                ));
            }
            let cap = disc.total_slots() + 1;
            let s = &outcome.stats;
            for (step, count) in [
                (1, s.step1_executions),
                (2, s.step2_executions),
                (3, s.step3_executions),
                (4, s.step4_executions),
            ] {
                if count > cap {
                    return Err(format!(
                        "{label}: step {step} ran {count} times, cap {cap}"
                    ));
                }
            }
            runs += 1;
            Ok(())
        };
        let mut family = instance_family(0xC4, 60, &[2, 3, 4, 5]);
        family.extend(adversarial_instances());
        for (i, inst) in family.iter().enumerate() {
            for piece in decomposed_pieces(inst) {
                for &eps in &[0.1, 0.5, 1.0] {
                    check_piece(&piece, eps, &format!("instance {i}"))?;
                }
            }
        }
        Ok(format!(
            "{runs} restoration runs: trees valid, weight never rose, steiner degrees 3, steps within slots+1"
        ))
    };
    verdict(6, "segment restoration contracts", run());
}

#[test]
fn criterion_07_piece_width_bound() {
    let run = || -> Result<String, String> {
        let started = Instant::now();
        let est_cfg = EstConfig::default();
        let factor = width_bound_factor();
        let line = horizontal_axis();
        let mut family = instance_family(0xC3, 500, &[2, 3, 4, 5]);
        family.extend(instance_family(0xC4, 200, &[2, 3, 4, 5]));
        let mut pieces_checked = 0usize;
        let mut tightest = f64::INFINITY;
        for (i, inst) in family.iter().enumerate() {
            for piece in decomposed_pieces(inst) {
                let width = piece.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max)
                    - piece.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
                let sub = Instance::new(piece.clone(), Some(line))
                    .map_err(|e| format!("piece of instance {i}: {e}"))?;
                let opt =
                    solve_esfl_exact(&sub, &est_cfg).map_err(|e| format!("piece oracle: {e}"))?;
                if width > factor * opt * (1.0 + 1e-9) + 1e-12 {
                    return Err(format!(
                        "instance {i}: piece width {width} above {factor:.4} x optimum {opt}"
                    ));
                }
                if opt > 1e-12 {
                    tightest = tightest.min(factor * opt / width.max(1e-300));
                }
                pieces_checked += 1;
            }
        }
        within_budget(
            started,
            Duration::from_secs(300),
            format!("{pieces_checked} pieces within (1+2*sqrt(3)) x optimum; tightest margin factor {tightest:.3}"),
        )
    };
    verdict(7, "piece width bound", run());
}

#[test]
fn criterion_08_fixed_line_gadget_equality() {
    let run = || -> Result<String, String> {
        let started = Instant::now();
        let est_cfg = EstConfig::default();
        let cfg = EsflConfig::default();
        let paths = fixture_paths("esfl");
        if paths.len() != 20 {
            return Err(format!("expected 20 fixtures, found {}", paths.len()));
        }
        let mut worst_gap = 0.0_f64;
        for path in &paths {
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            let (inst, meta) = load_gadget_fixture(path);
            let tree = steiner_line::est::solve_exact(&inst.terminals, &est_cfg)
                .map_err(|e| format!("{name}: plain solve: {e}"))?;
            if (tree.cost - meta.tree_cost).abs() > 1e-9 {
                return Err(format!(
                    "{name}: plain tree cost drifted: {} vs frozen {}",
                    tree.cost, meta.tree_cost
                ));
            }
            let oracle =
                solve_esfl_exact(&inst, &est_cfg).map_err(|e| format!("{name}: oracle: {e}"))?;
            let gap = (oracle - meta.expected_cost).abs();
            if gap > 1e-6 {
                return Err(format!(
                    "{name}: oracle {} vs expected {} (gap {gap:.2e})",
                    oracle, meta.expected_cost
                ));
            }
            worst_gap = worst_gap.max(gap);
            let sol = solve_esfl_ptas(&inst, 0.5, &cfg)
                .map_err(|e| format!("{name}: pipeline: {e}"))?;
            if sol.attachments.len() != 1 {
                return Err(format!(
                    "{name}: {} line attachments, expected exactly 1",
                    sol.attachments.len()
                ));
            }
            let want_param = meta.expected_attachment_param.unwrap_or(0.0);
            if (sol.attachments[0].x - want_param).abs() > 1e-9 {
                return Err(format!(
                    "{name}: attachment at parameter {} instead of {want_param}",
                    sol.attachments[0].x
                ));
            }
        }
        within_budget(
            started,
            Duration::from_secs(600),
            format!(
                "20 fixtures: optimum equals tree + sqrt(2)M (worst gap {worst_gap:.2e}), single attachment under the origin"
            ),
        )
    };
    verdict(8, "fixed line gadget equality", run());
}

#[test]
fn criterion_09_free_line_gadget_recovery() {
    let run = || -> Result<String, String> {
        let est_cfg = EstConfig::default();
        let paths = fixture_paths("esl");
        if paths.len() != 10 {
            return Err(format!("expected 10 fixtures, found {}", paths.len()));
        }
        let mut worst_gap = 0.0_f64;
        for path in &paths {
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            let (inst, meta) = load_gadget_fixture(path);
            let (cost, line) =
                solve_esl_exact(&inst, &est_cfg).map_err(|e| format!("{name}: {e}"))?;
            let want = meta
                .expected_line
                .ok_or_else(|| format!("{name}: fixture lacks expected_line"))?;
            let want_line = LineSpec::new(want[0], want[1], want[2])
                .map_err(|e| format!("{name}: bad expected line: {e}"))?;
            if !line.approx_eq(&want_line, 1e-9) {
                return Err(format!(
                    "{name}: recovered line ({}, {}, {}) differs from planted ({}, {}, {})",
                    line.a(), line.b(), line.c(), want_line.a(), want_line.b(), want_line.c()
                ));
            }
            let gap = (cost - meta.expected_cost).abs();
            if gap > 1e-6 {
                return Err(format!(
                    "{name}: cost {} vs expected {} (gap {gap:.2e})",
                    cost, meta.expected_cost
                ));
            }
            worst_gap = worst_gap.max(gap);
        }
        Ok(format!(
            "10 fixtures: planted line recovered exactly, worst cost gap {worst_gap:.2e}"
        ))
    };
    verdict(9, "free line gadget recovery", run());
}

#[test]
fn criterion_10_downward_edge_bound() {
    let run = || -> Result<String, String> {
        let cfg = EstConfig::default();
        let line = horizontal_axis();
        let mut rng = seeded(0xC10);
        let mut worst = 0usize;
        for i in 0..100 {
            use rand::Rng;
            let mut pts = Vec::new();
            for _ in 0..2 {
                pts.push(
                    Point::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.3..3.0)).unwrap(),
                );
            }
            let on_line = 3 + i % 3;
            for _ in 0..on_line {
                pts.push(Point::new(rng.gen_range(-3.0..3.0), 0.0).unwrap());
            }
            let sol = steiner_line::est::solve_exact(&pts, &cfg)
                .map_err(|e| format!("instance {i}: {e}"))?;
            let down = count_downward_edges(&sol.graph, &line);
            if down > 4 {
                return Err(format!(
                    "instance {i} (2 above, {on_line} on the line): {down} crossing edges"
                ));
            }
            worst = worst.max(down);
        }
        Ok(format!(
            "100 exact solutions with 2 raised terminals: at most {worst} crossing edges (bound 4)"
        ))
    };
    verdict(10, "downward edge bound", run());
}

#[test]
fn criterion_11_anchor_margin_positive() {
    let run = || -> Result<String, String> {
        let started = Instant::now();
        let report = check_anchor_margin(1_000_000, 1000.0);
        if !report.all_positive {
            return Err(format!(
                "margin dipped to {} at slope {}",
                report.min_value, report.argmin
            ));
        }
        let closed = [
            (16.0 - 2.5 * 34.0_f64.sqrt()) / 3.0,
            16.0 / 5.0 - 34.0_f64.sqrt() / 2.0,
        ];
        for (got, want) in report.kink_values.iter().zip(closed) {
            if (got - want).abs() > 1e-12 {
                return Err(format!("kink value {got} differs from closed form {want}"));
            }
        }
        within_budget(
            started,
            Duration::from_secs(5),
            format!(
                "min {:.6} > 0 over 1e6 samples plus kinks at {:?}",
                report.min_value, ANCHOR_MARGIN_KINKS
            ),
        )
    };
    verdict(11, "anchor margin positive", run());
}

#[test]
fn criterion_12_restoration_scaling() {
    // Worst-case restoration input: every slot is a hole. Two raised hub
    // terminals hold all line points on long spokes, so each slot needs one
    // accepted segment swap.
    fn fan(slots: usize) -> (steiner_line::SteinerGraph, steiner_line::esfl::DiscretizedInstance) {
        use steiner_line::geometry::Node;
        let w = slots as f64;
        let piece = [
            Point::new(0.0, 3.0 + w).unwrap(),
            Point::new(w, 3.0 + w).unwrap(),
        ];
        let disc = discretize(&piece, 2.0 / slots as f64);
        assert_eq!(disc.total_slots(), slots);
        let mut nodes = vec![Node::terminal(piece[0]), Node::terminal(piece[1])];
        let mut pairs = vec![(0usize, 1usize)];
        for (i, lp) in disc.line_points.iter().enumerate() {
            nodes.push(Node::line_point(*lp));
            pairs.push((2 + i, i % 2));
        }
        let graph = steiner_line::SteinerGraph::new(nodes, &pairs, None).unwrap();
        (graph, disc)
    }
    let run = || -> Result<String, String> {
        let est_cfg = EstConfig::default();
        let sizes = [50usize, 100, 200, 400];
        let mut medians = Vec::new();
        for &slots in &sizes {
            let (graph, disc) = fan(slots);
            let mut times = Vec::new();
            for _ in 0..3 {
                let started = Instant::now();
                let outcome = fill_holes(&graph, &disc, &est_cfg)
                    .map_err(|e| format!("slots={slots}: {e}"))?;
                times.push(started.elapsed().as_secs_f64());
                if outcome.stats.holes_before != slots {
                    return Err(format!(
                        "slots={slots}: expected a fully holey input, got {} holes",
                        outcome.stats.holes_before
                    ));
                }
                if outcome.stats.holes_after != 0 {
                    return Err(format!(
                        "slots={slots}: {} holes survived",
                        outcome.stats.holes_after
                    ));
                }
            }
            times.sort_by(f64::total_cmp);
            medians.push(times[1]);
        }
        let xs: Vec<f64> = sizes.iter().map(|&s| s as f64).collect();
        let slope = log_log_slope(&xs, &medians);
        let shown: Vec<String> = sizes
            .iter()
            .zip(&medians)
            .map(|(s, t)| format!("{s}:{:.2}ms", t * 1e3))
            .collect();
        if slope > 3.3 {
            return Err(format!(
                "log-log slope {slope:.2} above 3.3 (medians {})",
                shown.join(" ")
            ));
        }
        Ok(format!(
            "restoration medians {} give log-log slope {slope:.2} <= 3.3",
            shown.join(" ")
        ))
    };
    verdict(12, "restoration scaling", run());
}

#[test]
fn criterion_13_cli_determinism() {
    use std::process::Command;
    fn run_in(dir: &std::path::Path, args: &[&str]) -> Result<Vec<u8>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_steiner"))
            .args(args)
            .current_dir(dir)
            .output()
            .map_err(|e| format!("spawning {args:?}: {e}"))?;
        if !out.status.success() {
            return Err(format!(
                "{args:?} exited with {:?}: {}",
                out.status.code(),
                String::from_utf8_lossy(&out.stderr)
            ));
        }
        Ok(out.stdout)
    }
    fn tree_files(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
        let mut out = Vec::new();
        let mut stack = vec![dir.to_path_buf()];
        while let Some(d) = stack.pop() {
            for entry in std::fs::read_dir(&d).unwrap() {
                let path = entry.unwrap().path();
                if path.is_dir() {
                    stack.push(path);
                } else {
                    let rel = path.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                    out.push((rel, std::fs::read(&path).unwrap()));
                }
            }
        }
        out.sort();
        out
    }
    let run = || -> Result<String, String> {
        let instance = br#"{"terminals": [[0.0, 0.0], [4.0, 1.0], [2.0, 3.0]], "line": {"a": 0.0, "b": 1.0, "c": 0.0}}"#;
        let commands: Vec<(&str, Vec<&str>)> = vec![
            ("est", vec!["est", "--input", "tri.json"]),
            ("esfl", vec!["esfl", "--input", "tri.json", "--epsilon", "0.5", "--svg"]),
            ("esl", vec!["esl", "--input", "tri.json", "--epsilon", "0.5", "--svg"]),
            (
                "gadget",
                vec!["gadget", "--kind", "palimest-esl", "--seed", "5", "--out", "g.json"],
            ),
            ("bench", vec!["bench", "--trials", "1", "--out", "runs"]),
            ("check", vec!["check"]),
        ];
        let root = tempfile::tempdir().map_err(|e| e.to_string())?;
        let mut compared_files = 0usize;
        for (name, args) in &commands {
            let mut outputs = Vec::new();
            for round in 0..2 {
                let dir = root.path().join(format!("{name}-{round}"));
                std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
                std::fs::write(dir.join("tri.json"), instance).map_err(|e| e.to_string())?;
                let stdout = run_in(&dir, args)?;
                outputs.push((stdout, tree_files(&dir)));
            }
            let (a_out, a_files) = &outputs[0];
            let (b_out, b_files) = &outputs[1];
            if a_out != b_out {
                return Err(format!("`{name}` stdout differed between runs"));
            }
            if a_files.len() != b_files.len() {
                return Err(format!(
                    "`{name}` produced {} files vs {}",
                    a_files.len(),
                    b_files.len()
                ));
            }
            for ((an, ab), (bn, bb)) in a_files.iter().zip(b_files) {
                if an != bn {
                    return Err(format!("`{name}` file sets differ: {an} vs {bn}"));
                }
                if ab != bb {
                    return Err(format!("`{name}`: {an} bytes differ between runs"));
                }
            }
            compared_files += a_files.len();
        }
        Ok(format!(
            "6 subcommands rerun twice: stdout and {compared_files} files byte-identical"
        ))
    };
    verdict(13, "cli determinism", run());
}
