//! Steiner trees with a fixed zero-cost line.
//!
//! The input is a set of terminals and a line whose points may be used for
//! free: a solution is a forest of trees, each hanging off the line, whose
//! total edge weight (line portions excluded) is minimal. The pipeline
//! reduces this to classic Euclidean Steiner tree instances:
//!
//! 1. canonicalize: rotate the line onto `y = 0` and reflect the lower
//!    half-plane up (the sides are independent),
//! 2. decompose: split each side at gaps no optimal component can bridge,
//! 3. discretize: place evenly spaced points along each piece's line span,
//! 4. solve: run a Steiner tree solver over terminals plus line points,
//! 5. fill: restore missing line segments so the tree follows the line,
//! 6. contract: fold the line points into the single zero-cost line node,
//! 7. merge: join the per-piece trees at the line node and map everything
//!    back to the original frame.
//!
//! The discretization step controls the approximation: with spacing at
//! `epsilon / inner_refinement` times the local terminal count, the final
//! cost is within `1 + epsilon` of optimal.

pub mod contract;
pub mod decompose;
pub mod discretize;
pub mod fill;

pub use contract::{contract_line, ContractOutcome};
pub use decompose::{decompose, lower_bound, width_bound_factor};
pub use discretize::{discretize, DiscretizedInstance};
pub use fill::{count_holes, fill_holes, FillOutcome, FillStats, HoleReport};

use std::collections::HashMap;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::est::{solve_est, EstConfig, EstError, Strategy};
use crate::geometry::{
    canonicalize, point_line_distance, Attachment, CanonicalInstance, Edge, GeometryError,
    GraphError, Instance, Node, Point, Side, SteinerGraph,
};

#[derive(Debug, Error)]
pub enum EsflError {
    #[error("empty instance")]
    EmptyInstance,
    #[error("epsilon must be positive and finite, got {0}")]
    BadEpsilon(f64),
    #[error("unexpected line node in a pre-contraction tree")]
    UnexpectedLineNode,
    #[error("tree does not match the discretization: expected {expected} line points, found {found}")]
    LinePointMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Est(#[from] EstError),
}

#[derive(Debug, Clone)]
pub struct EsflConfig {
    pub est: EstConfig,
    /// Inner Steiner tree strategy for the discretized instances.
    pub strategy: Strategy,
    /// Re-attach surviving line connections at perpendicular feet (never
    /// increases cost). On by default.
    pub snap: bool,
    /// Run the segment restoration pass. On by default; off is useful to
    /// measure how much the pass recovers.
    pub fill: bool,
    /// The discretization spacing targets `epsilon / inner_refinement`, so
    /// the restoration slack stays well inside the overall guarantee.
    pub inner_refinement: f64,
}

impl Default for EsflConfig {
    fn default() -> Self {
        EsflConfig {
            est: EstConfig::default(),
            strategy: Strategy::ExactIfSmall,
            snap: true,
            fill: true,
            inner_refinement: 51.0,
        }
    }
}

/// Aggregated pipeline counters, summed over pieces.
#[derive(Debug, Clone, Default)]
pub struct PipelineStats {
    pub pieces: usize,
    pub holes_before: usize,
    pub holes_after: usize,
    /// Weight released when contracting line-borne edges.
    pub released_weight: f64,
    /// Per-piece fill statistics, in solve order.
    pub fill: Vec<FillStats>,
    /// Wall-clock phase timings (diagnostic; not part of any serialized
    /// output).
    pub timings: Vec<(String, Duration)>,
}

#[derive(Debug, Clone)]
pub struct EsflSolution {
    /// Tree in the original frame over terminals, Steiner points, and the
    /// line node (always the last node).
    pub graph: SteinerGraph,
    pub cost: f64,
    /// Instance lower bound from the decomposition: per piece, the larger of
    /// width / (1 + 2*sqrt(3)) and the tallest terminal height.
    pub lower_bound: f64,
    /// cost / lower_bound, the certified approximation factor of this run
    /// (1.0 when both are zero).
    pub ratio_bound: f64,
    /// Attachment parameters of the line-node edges; `LineSpec::point_at`
    /// recovers the planar points.
    pub attachments: Vec<Attachment>,
    pub stats: PipelineStats,
}

/// Lower bound on the optimal cost, from the side decomposition.
pub fn esfl_lower_bound(inst: &Instance) -> Result<f64, EsflError> {
    let canon = canonicalize(inst)?;
    Ok(decomposition_lower_bound(&canon))
}

fn decomposition_lower_bound(canon: &CanonicalInstance) -> f64 {
    let mut lb = 0.0;
    for pts in [&canon.above, &canon.below] {
        if pts.is_empty() {
            continue;
        }
        for piece in decompose(pts) {
            lb += decompose::lower_bound(&piece);
        }
    }
    lb
}

/// Approximation pipeline: discretize, solve, fill, contract, merge. The
/// result is within `1 + epsilon` of optimal.
pub fn solve_esfl_ptas(
    inst: &Instance,
    epsilon: f64,
    cfg: &EsflConfig,
) -> Result<EsflSolution, EsflError> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(EsflError::BadEpsilon(epsilon));
    }
    if inst.terminals.is_empty() {
        return Err(EsflError::EmptyInstance);
    }
    let line = *inst.require_line()?;
    let t0 = Instant::now();
    let canon = canonicalize(inst)?;
    let mut stats = PipelineStats::default();
    stats
        .timings
        .push(("canonicalize".to_string(), t0.elapsed()));
    let eps_inner = epsilon / cfg.inner_refinement;

    let mut parts: Vec<(Side, ContractOutcome)> = Vec::new();
    for (side, pts) in [(Side::Above, &canon.above), (Side::Below, &canon.below)] {
        if pts.is_empty() {
            continue;
        }
        for piece in decompose(pts) {
            let part = solve_piece(&piece, eps_inner, cfg, &mut stats)?;
            parts.push((side, part));
        }
    }
    let lower_bound = decomposition_lower_bound(&canon);

    // Merge: per-piece trees share exactly the line node, so their union is
    // a tree again. Nodes are restored to the original frame; edge lengths
    // are frame-independent and carried verbatim.
    let t_merge = Instant::now();
    let mut nodes: Vec<Node> = Vec::new();
    let mut pending: Vec<(Option<usize>, Option<usize>, f64, Option<f64>)> = Vec::new();
    for &p in &canon.on_line {
        let orig = canon.restore(p, Side::Above);
        let id = nodes.len();
        nodes.push(Node::terminal(orig));
        pending.push((Some(id), None, point_line_distance(orig, &line), Some(p.x)));
    }
    for (side, part) in &parts {
        let part_nodes = part.graph.nodes();
        let gamma_local = part.graph.line_node().expect("contracted piece has a line node");
        let mut remap: Vec<Option<usize>> = vec![None; part_nodes.len()];
        for (i, node) in part_nodes.iter().enumerate() {
            if i == gamma_local {
                continue;
            }
            let p = node.pos.expect("piece nodes are positioned");
            remap[i] = Some(nodes.len());
            nodes.push(Node {
                kind: node.kind,
                pos: Some(canon.restore(p, *side)),
            });
        }
        let attach_of: HashMap<usize, f64> =
            part.attachments.iter().map(|a| (a.edge, a.x)).collect();
        for (ei, e) in part.graph.edges().iter().enumerate() {
            pending.push((remap[e.u], remap[e.v], e.len, attach_of.get(&ei).copied()));
        }
    }
    let gamma = nodes.len();
    nodes.push(Node::line_node());
    let mut edges = Vec::with_capacity(pending.len());
    let mut attachments = Vec::new();
    for (u, v, len, att) in pending {
        let (u, v) = (u.unwrap_or(gamma), v.unwrap_or(gamma));
        edges.push(Edge {
            u: u.min(v),
            v: u.max(v),
            len,
        });
        if let Some(x) = att {
            attachments.push(Attachment {
                edge: edges.len() - 1,
                x,
            });
        }
    }
    let graph = SteinerGraph::from_parts(nodes, edges)?;
    stats.timings.push(("merge".to_string(), t_merge.elapsed()));
    let cost = graph.cost();
    debug_assert!(
        cost >= lower_bound * (1.0 - 1e-9) - 1e-12,
        "cost {cost} fell below the lower bound {lower_bound}"
    );
    let ratio_bound = if lower_bound > 0.0 {
        cost / lower_bound
    } else {
        1.0
    };
    Ok(EsflSolution {
        graph,
        cost,
        lower_bound,
        ratio_bound,
        attachments,
        stats,
    })
}

fn solve_piece(
    piece: &[Point],
    eps_inner: f64,
    cfg: &EsflConfig,
    stats: &mut PipelineStats,
) -> Result<ContractOutcome, EsflError> {
    stats.pieces += 1;
    let t0 = Instant::now();
    let disc = discretize(piece, eps_inner);
    let est_terms = disc.est_terminals();
    let inner = solve_est(&est_terms, cfg.strategy, &cfg.est)?;
    // The solver sees all points as terminals; re-tag the line points so the
    // later stages can tell them apart. Solver outputs list terminals first,
    // in input order.
    let n_real = disc.real_terminals.len();
    let n_line = disc.line_points.len();
    let nodes: Vec<Node> = inner
        .graph
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, node)| {
            if i >= n_real && i < n_real + n_line {
                Node::line_point(node.pos.expect("terminals are positioned"))
            } else {
                *node
            }
        })
        .collect();
    let pairs: Vec<(usize, usize)> = inner.graph.edges().iter().map(|e| (e.u, e.v)).collect();
    let tagged = SteinerGraph::new(nodes, &pairs, None)?;
    stats.timings.push(("solve".to_string(), t0.elapsed()));

    let t1 = Instant::now();
    let filled = if cfg.fill {
        let out = fill_holes(&tagged, &disc, &cfg.est)?;
        stats.holes_before += out.stats.holes_before;
        stats.holes_after += out.stats.holes_after;
        stats.fill.push(out.stats);
        out.tree
    } else {
        let report = count_holes(&tagged, &disc)?;
        stats.holes_before += report.holes;
        stats.holes_after += report.holes;
        tagged
    };
    stats.timings.push(("fill".to_string(), t1.elapsed()));

    let t2 = Instant::now();
    let part = contract_line(&filled, cfg.snap)?;
    stats.released_weight += part.w_prime;
    stats.timings.push(("contract".to_string(), t2.elapsed()));
    Ok(part)
}

/// Baseline: minimum spanning tree over the terminals plus the line node,
/// with line edges priced at perpendicular distance. No Steiner points.
pub fn solve_esfl_mst(inst: &Instance) -> Result<EsflSolution, EsflError> {
    let line = *inst.require_line()?;
    let n = inst.terminals.len();
    if n == 0 {
        return Err(EsflError::EmptyInstance);
    }
    let dist = |a: usize, b: usize| -> f64 {
        if a == n {
            point_line_distance(inst.terminals[b], &line)
        } else if b == n {
            point_line_distance(inst.terminals[a], &line)
        } else {
            inst.terminals[a].dist(inst.terminals[b])
        }
    };
    // Prim from the line node; every terminal can reach it directly, so the
    // graph is connected.
    let mut in_tree = vec![false; n + 1];
    let mut key = vec![f64::INFINITY; n + 1];
    let mut parent = vec![usize::MAX; n + 1];
    key[n] = 0.0;
    for _ in 0..=n {
        let mut best = usize::MAX;
        for v in 0..=n {
            if !in_tree[v] && (best == usize::MAX || key[v] < key[best]) {
                best = v;
            }
        }
        in_tree[best] = true;
        for v in 0..=n {
            if !in_tree[v] {
                let d = dist(best, v);
                if d < key[v] {
                    key[v] = d;
                    parent[v] = best;
                }
            }
        }
    }
    let mut nodes: Vec<Node> = inst.terminals.iter().map(|&p| Node::terminal(p)).collect();
    nodes.push(Node::line_node());
    let mut edges = Vec::with_capacity(n);
    let mut attachments = Vec::new();
    for v in 0..n {
        let p = parent[v];
        edges.push(Edge {
            u: v.min(p),
            v: v.max(p),
            len: dist(v, p),
        });
    }
    for (i, e) in edges.iter().enumerate() {
        if e.v == n {
            attachments.push(Attachment {
                edge: i,
                x: line.param_of(inst.terminals[e.u]),
            });
        }
    }
    let graph = SteinerGraph::from_parts(nodes, edges)?;
    let canon = canonicalize(inst)?;
    let lower_bound = decomposition_lower_bound(&canon);
    let cost = graph.cost();
    let ratio_bound = if lower_bound > 0.0 {
        cost / lower_bound
    } else {
        1.0
    };
    Ok(EsflSolution {
        graph,
        cost,
        lower_bound,
        ratio_bound,
        attachments,
        stats: PipelineStats::default(),
    })
}
