//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;

use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use serde::Deserialize;

use steiner_line::geometry::{canonicalize, Node, SteinerGraph};
use steiner_line::io;
use steiner_line::{Instance, LineSpec, Point};

pub fn horizontal_axis() -> LineSpec {
    LineSpec::new(0.0, 1.0, 0.0).unwrap()
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_points(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<Point> {
    let mut pts: Vec<Point> = Vec::with_capacity(n);
    while pts.len() < n {
        let p = Point::new(rng.gen_range(lo..hi), rng.gen_range(lo..hi)).unwrap();
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    pts
}

/// Deterministic random instance family around the horizontal line:
/// instance `i` has `sizes[i % sizes.len()]` terminals in `[-5, 5]^2`.
pub fn instance_family(tag: u64, count: usize, sizes: &[usize]) -> Vec<Instance> {
    let mut rng = seeded(tag);
    let line = horizontal_axis();
    (0..count)
        .map(|i| {
            let n = sizes[i % sizes.len()];
            Instance::new(uniform_points(&mut rng, n, -5.0, 5.0), Some(line)).unwrap()
        })
        .collect()
}

/// Hand-picked shapes that stress segment restoration: combs, stacked
/// columns, near-line dust, alternating sides, and split clusters.
pub fn adversarial_instances() -> Vec<Instance> {
    let line = horizontal_axis();
    let shapes: Vec<Vec<(f64, f64)>> = vec![
        (0..6).map(|i| (i as f64, 1.0)).collect(),
        vec![(0.0, 0.5), (0.0, 1.0), (0.0, 2.0), (2.0, 0.7), (2.0, 1.4)],
        (0..6)
            .map(|i| (0.1 * i as f64, 0.01 * ((i % 3 + 1) as f64)))
            .collect(),
        (0..6)
            .map(|i| (i as f64, if i % 2 == 0 { 0.8 } else { -0.8 }))
            .collect(),
        vec![(0.0, 1.0), (0.05, 1.1), (10.0, 1.0), (10.05, 0.9)],
        vec![(0.0, 5.0), (1.0, 0.01), (2.0, 5.0), (3.0, 0.01)],
    ];
    shapes
        .into_iter()
        .map(|pts| {
            let terminals = pts.into_iter().map(|(x, y)| Point::new(x, y).unwrap()).collect();
            Instance::new(terminals, Some(line)).unwrap()
        })
        .collect()
}

/// Canonical-frame pieces of an instance, both sides concatenated.
pub fn decomposed_pieces(inst: &Instance) -> Vec<Vec<Point>> {
    let canon = canonicalize(inst).unwrap();
    let mut pieces = Vec::new();
    for side in [&canon.above, &canon.below] {
        pieces.extend(steiner_line::esfl::decompose(side));
    }
    pieces
}

/// Rebuild an EST solution over `est_terminals()` with the sampled line
/// points re-tagged, mirroring what the pipeline feeds segment restoration.
pub fn retag_line_points(graph: &SteinerGraph, n_real: usize, n_line: usize) -> SteinerGraph {
    let nodes: Vec<Node> = graph
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, n)| {
            let pos = n.pos.expect("solver nodes carry positions");
            if i < n_real {
                Node::terminal(pos)
            } else if i < n_real + n_line {
                Node::line_point(pos)
            } else {
                Node::steiner(pos)
            }
        })
        .collect();
    let pairs: Vec<(usize, usize)> = graph.edges().iter().map(|e| (e.u, e.v)).collect();
    SteinerGraph::new(nodes, &pairs, None).expect("retagging preserves the tree")
}

#[derive(Debug, Deserialize)]
pub struct GadgetMeta {
    pub mst_length: f64,
    pub tree_cost: f64,
    pub expected_cost: f64,
    #[serde(default)]
    pub expected_attachment_param: Option<f64>,
    #[serde(default)]
    pub expected_line: Option<[f64; 3]>,
}

#[derive(Debug, Deserialize)]
struct GadgetFixtureFile {
    meta: GadgetMeta,
}

pub fn fixture_paths(sub: &str) -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(sub);
    let mut paths: Vec<PathBuf> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("fixture dir {}: {e}", dir.display()))
        .map(|entry| entry.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    paths
}

pub fn load_gadget_fixture(path: &std::path::Path) -> (Instance, GadgetMeta) {
    let bytes = fs::read(path).unwrap();
    let inst = io::parse_instance(&bytes)
        .unwrap_or_else(|e| panic!("parsing {}: {e}", path.display()));
    let file: GadgetFixtureFile = serde_json::from_slice(&bytes)
        .unwrap_or_else(|e| panic!("meta of {}: {e}", path.display()));
    (inst, file.meta)
}

/// Least-squares slope of log(y) against log(x).
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}
