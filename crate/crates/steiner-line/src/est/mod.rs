//! Euclidean Steiner tree engine.
//!
//! Solvers for the classic problem: connect a set of terminals by a shortest
//! network, optionally introducing extra (Steiner) nodes. Three strategies
//! are offered. `Mst` skips Steiner nodes entirely, `Insertion` greedily
//! upgrades a spanning tree by splicing in Fermat points, and `ExactIfSmall`
//! runs a brute-force optimum for small inputs (enumerate full topologies
//! per terminal subset, optimize coordinates, combine subsets by dynamic
//! programming) and falls back to the insertion heuristic above the size
//! cutoff.

pub(crate) mod enumerate;
pub(crate) mod fermat;
pub(crate) mod optimize;

pub use enumerate::{enumerate_full_topologies, full_topology_count, FullTopologies};
pub use fermat::{fermat_point, geometric_median, star_cost};
pub use optimize::{optimize_topology, Realized};

use crate::geometry::{GraphError, Node, Point, SteinerGraph};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EstError {
    #[error("instance has no terminals")]
    EmptyInstance,
    #[error("exact solver is limited to {limit} terminals, got {n}")]
    TooLarge { n: usize, limit: usize },
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("topology built for {topology_terminals} terminals applied to {instance_terminals}")]
    TopologyMismatch {
        topology_terminals: usize,
        instance_terminals: usize,
    },
    #[error("coordinate optimization stalled after {iterations} sweeps (displacement {displacement:e})")]
    NonConvergence { iterations: usize, displacement: f64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A full Steiner topology: terminals `0..n` of degree 1, Steiner nodes
/// `n..n + k` of degree 3, edges forming a tree. Coordinates live elsewhere;
/// this is pure structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    n_terminals: usize,
    n_steiner: usize,
    edges: Vec<(usize, usize)>,
}

impl Topology {
    pub fn new(
        n_terminals: usize,
        n_steiner: usize,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self, EstError> {
        let m = n_terminals + n_steiner;
        if edges.len() + 1 != m {
            return Err(EstError::InvalidTopology(format!(
                "{} edges cannot form a tree on {m} nodes",
                edges.len()
            )));
        }
        let mut degree = vec![0usize; m];
        let mut dsu = crate::geometry::DisjointSet::new(m);
        for &(u, v) in &edges {
            if u >= m || v >= m || u == v {
                return Err(EstError::InvalidTopology(format!("bad edge ({u}, {v})")));
            }
            if !dsu.union(u, v) {
                return Err(EstError::InvalidTopology(format!(
                    "edge ({u}, {v}) closes a cycle"
                )));
            }
            degree[u] += 1;
            degree[v] += 1;
        }
        for (v, &d) in degree.iter().enumerate() {
            let want = if v < n_terminals { 1 } else { 3 };
            if d != want {
                return Err(EstError::InvalidTopology(format!(
                    "node {v} has degree {d}, expected {want}"
                )));
            }
        }
        Ok(Topology {
            n_terminals,
            n_steiner,
            edges,
        })
    }

    pub fn n_terminals(&self) -> usize {
        self.n_terminals
    }

    pub fn n_steiner(&self) -> usize {
        self.n_steiner
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }
}

/// Tuning knobs for the solvers. The defaults are suitable for everything in
/// this crate; the struct exists so tests can tighten or loosen them.
#[derive(Debug, Clone)]
pub struct EstConfig {
    /// Largest terminal count the exact solver accepts.
    pub n_max_exact: usize,
    /// Relocation convergence threshold, relative to the instance diameter.
    pub tol_pos: f64,
    /// Cap on relocation sweeps per topology.
    pub max_iters: usize,
    /// Relative displacement above which hitting `max_iters` is an error
    /// rather than an accepted fixed point.
    pub nonconvergence_tol: f64,
}

impl Default for EstConfig {
    fn default() -> Self {
        EstConfig {
            n_max_exact: 8,
            tol_pos: 1e-10,
            max_iters: 10_000,
            nonconvergence_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Optimality {
    /// Provably shortest for the given terminals.
    Exact,
    /// Best tree found by a heuristic; an upper bound on the optimum.
    Heuristic,
}

#[derive(Debug, Clone)]
pub struct EstSolution {
    pub graph: SteinerGraph,
    pub cost: f64,
    pub optimality: Optimality,
}

/// Which solver `solve_est` dispatches to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Exact optimum when the terminal count fits `n_max_exact`, otherwise
    /// the insertion heuristic.
    ExactIfSmall,
    /// Minimum spanning tree over the terminals, no Steiner nodes.
    Mst,
    /// Spanning tree improved by greedy Fermat-point insertion.
    Insertion,
}

impl Strategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::ExactIfSmall => "exact-if-small",
            Strategy::Mst => "mst",
            Strategy::Insertion => "insertion",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.replace('_', "-").as_str() {
            "exact-if-small" | "exact" => Ok(Strategy::ExactIfSmall),
            "mst" => Ok(Strategy::Mst),
            "insertion" => Ok(Strategy::Insertion),
            other => Err(format!(
                "unknown strategy '{other}' (expected exact-if-small, mst or insertion)"
            )),
        }
    }
}

pub fn solve_est(
    terminals: &[Point],
    strategy: Strategy,
    cfg: &EstConfig,
) -> Result<EstSolution, EstError> {
    match strategy {
        Strategy::Mst => solve_mst(terminals),
        Strategy::Insertion => solve_insertion(terminals, cfg),
        Strategy::ExactIfSmall => {
            if terminals.len() <= cfg.n_max_exact {
                solve_exact(terminals, cfg)
            } else {
                solve_insertion(terminals, cfg)
            }
        }
    }
}

/// Minimum spanning tree over the terminals (Prim, dense O(n^2)).
pub fn solve_mst(terminals: &[Point]) -> Result<EstSolution, EstError> {
    let (cost, edge_pairs) = prim_tree(terminals)?;
    let nodes: Vec<Node> = terminals.iter().map(|&p| Node::terminal(p)).collect();
    let graph = SteinerGraph::new(nodes, &edge_pairs, None)?;
    debug_assert!((graph.cost() - cost).abs() <= 1e-9 * (1.0 + cost));
    Ok(EstSolution {
        cost: graph.cost(),
        graph,
        optimality: if terminals.len() <= 2 {
            Optimality::Exact
        } else {
            Optimality::Heuristic
        },
    })
}

fn prim_tree(points: &[Point]) -> Result<(f64, Vec<(usize, usize)>), EstError> {
    let n = points.len();
    if n == 0 {
        return Err(EstError::EmptyInstance);
    }
    let mut in_tree = vec![false; n];
    let mut best_dist = vec![f64::INFINITY; n];
    let mut best_from = vec![0usize; n];
    in_tree[0] = true;
    for v in 1..n {
        best_dist[v] = points[0].dist(points[v]);
    }
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    let mut total = 0.0;
    for _ in 1..n {
        let mut pick = usize::MAX;
        let mut pick_dist = f64::INFINITY;
        for v in 0..n {
            if !in_tree[v] && best_dist[v] < pick_dist {
                pick_dist = best_dist[v];
                pick = v;
            }
        }
        in_tree[pick] = true;
        total += pick_dist;
        edges.push((best_from[pick], pick));
        for v in 0..n {
            if !in_tree[v] {
                let d = points[pick].dist(points[v]);
                if d < best_dist[v] {
                    best_dist[v] = d;
                    best_from[v] = pick;
                }
            }
        }
    }
    Ok((total, edges))
}

enum Choice {
    Leaf,
    Full,
    Split(usize, usize),
}

/// Brute-force optimum. Every Steiner tree decomposes into full components
/// that meet only at terminals, so the optimum over a terminal set S is
/// either realized by one full topology on S (possibly degenerate) or splits
/// at a shared terminal into two smaller instances. Enumerate the former,
/// recurse on the latter over bitmask subsets.
pub fn solve_exact(terminals: &[Point], cfg: &EstConfig) -> Result<EstSolution, EstError> {
    let n = terminals.len();
    if n == 0 {
        return Err(EstError::EmptyInstance);
    }
    if n > cfg.n_max_exact {
        return Err(EstError::TooLarge {
            n,
            limit: cfg.n_max_exact,
        });
    }
    if n == 1 {
        let graph = SteinerGraph::new(vec![Node::terminal(terminals[0])], &[], None)?;
        return Ok(EstSolution {
            cost: 0.0,
            graph,
            optimality: Optimality::Exact,
        });
    }
    let full_mask = (1usize << n) - 1;
    let mut full_opt: Vec<Option<Realized>> = Vec::with_capacity(full_mask + 1);
    full_opt.resize_with(full_mask + 1, || None);
    for mask in 0..=full_mask {
        let size = mask.count_ones() as usize;
        if size < 2 {
            continue;
        }
        let idxs: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let pts: Vec<Point> = idxs.iter().map(|&i| terminals[i]).collect();
        let mut best: Option<Realized> = None;
        for topo in enumerate_full_topologies(size) {
            let r = optimize_topology(&pts, &topo, cfg)?;
            if best.as_ref().map_or(true, |b| r.cost < b.cost) {
                best = Some(r);
            }
        }
        full_opt[mask] = best;
    }
    let mut dp = vec![f64::INFINITY; full_mask + 1];
    let mut choice: Vec<Choice> = Vec::with_capacity(full_mask + 1);
    choice.resize_with(full_mask + 1, || Choice::Leaf);
    for mask in 0..=full_mask {
        match mask.count_ones() {
            0 => {}
            1 => dp[mask] = 0.0,
            _ => {
                dp[mask] = full_opt[mask].as_ref().expect("computed above").cost;
                choice[mask] = Choice::Full;
                for v in 0..n {
                    if mask >> v & 1 == 0 {
                        continue;
                    }
                    let rest = mask & !(1 << v);
                    let mut sub = (rest - 1) & rest;
                    while sub > 0 {
                        let a = sub | 1 << v;
                        let b = (rest ^ sub) | 1 << v;
                        let split = dp[a] + dp[b];
                        if split < dp[mask] {
                            dp[mask] = split;
                            choice[mask] = Choice::Split(a, b);
                        }
                        sub = (sub - 1) & rest;
                    }
                }
            }
        }
    }
    // Reassemble the winning decomposition, gluing the full components at
    // their shared terminals.
    let mut nodes: Vec<Node> = terminals.iter().map(|&p| Node::terminal(p)).collect();
    let mut edge_pairs: Vec<(usize, usize)> = Vec::new();
    let mut stack = vec![full_mask];
    while let Some(mask) = stack.pop() {
        match choice[mask] {
            Choice::Leaf => {}
            Choice::Split(a, b) => {
                stack.push(b);
                stack.push(a);
            }
            Choice::Full => {
                let r = full_opt[mask].as_ref().expect("computed above");
                let idxs: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                let mut remap = Vec::with_capacity(r.graph.nodes().len());
                for (i, node) in r.graph.nodes().iter().enumerate() {
                    if i < idxs.len() {
                        remap.push(idxs[i]);
                    } else {
                        remap.push(nodes.len());
                        nodes.push(*node);
                    }
                }
                for e in r.graph.edges() {
                    edge_pairs.push((remap[e.u], remap[e.v]));
                }
            }
        }
    }
    let graph = SteinerGraph::new(nodes, &edge_pairs, None)?;
    debug_assert!((graph.cost() - dp[full_mask]).abs() <= 1e-9 * (1.0 + dp[full_mask]));
    Ok(EstSolution {
        cost: graph.cost(),
        graph,
        optimality: Optimality::Exact,
    })
}

/// Greedy improvement heuristic: start from the terminal spanning tree and
/// repeatedly replace the most profitable pair of edges sharing a vertex by a
/// star through the Fermat point of the three endpoints, re-optimizing all
/// Steiner coordinates after each splice. Stops when no splice shortens the
/// tree.
fn solve_insertion(terminals: &[Point], cfg: &EstConfig) -> Result<EstSolution, EstError> {
    let n = terminals.len();
    let (mut cost, mut edges) = prim_tree(terminals)?;
    let mut pos: Vec<Point> = terminals.to_vec();
    let mut scale: f64 = 0.0;
    for (i, p) in terminals.iter().enumerate() {
        for q in &terminals[i + 1..] {
            scale = scale.max(p.dist(*q));
        }
    }
    if scale == 0.0 {
        scale = 1.0;
    }
    for _round in 0..4 * n.max(1) {
        let m = pos.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); m];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut best_gain = 1e-9 * scale;
        let mut best: Option<(usize, usize, usize, Point)> = None;
        for v in 0..m {
            for i in 0..adj[v].len() {
                for j in (i + 1)..adj[v].len() {
                    let (u, w) = (adj[v][i], adj[v][j]);
                    let f = fermat_point(pos[v], pos[u], pos[w]);
                    let before = pos[v].dist(pos[u]) + pos[v].dist(pos[w]);
                    let after = star_cost(f, &[pos[v], pos[u], pos[w]]);
                    let gain = before - after;
                    if gain > best_gain {
                        best_gain = gain;
                        best = Some((v, u, w, f));
                    }
                }
            }
        }
        let (v, u, w, f) = match best {
            Some(b) => b,
            None => break,
        };
        let s = pos.len();
        let mut trial_pos = pos.clone();
        trial_pos.push(f);
        let mut trial_edges: Vec<(usize, usize)> = edges
            .iter()
            .copied()
            .filter(|&(a, b)| (a, b) != (v, u) && (a, b) != (u, v) && (a, b) != (v, w) && (a, b) != (w, v))
            .collect();
        trial_edges.push((v, s));
        trial_edges.push((u, s));
        trial_edges.push((w, s));
        let mut trial_adj: Vec<Vec<usize>> = vec![Vec::new(); s + 1];
        for &(a, b) in &trial_edges {
            trial_adj[a].push(b);
            trial_adj[b].push(a);
        }
        let realized = optimize::optimize_free(n, trial_pos, trial_adj, cfg)?;
        if realized.cost >= cost - 1e-12 * scale {
            break;
        }
        cost = realized.cost;
        pos = realized
            .graph
            .nodes()
            .iter()
            .map(|nd| nd.pos.expect("insertion trees carry coordinates"))
            .collect();
        edges = realized.graph.edges().iter().map(|e| (e.u, e.v)).collect();
    }
    let nodes: Vec<Node> = pos
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            if i < n {
                Node::terminal(p)
            } else {
                Node::steiner(p)
            }
        })
        .collect();
    let graph = SteinerGraph::new(nodes, &edges, None)?;
    Ok(EstSolution {
        cost: graph.cost(),
        graph,
        optimality: if n <= 2 {
            Optimality::Exact
        } else {
            Optimality::Heuristic
        },
    })
}
