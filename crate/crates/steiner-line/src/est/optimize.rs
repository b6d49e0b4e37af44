//! Coordinate optimization of a fixed topology.
//!
//! The length of a tree with fixed topology is convex in the Steiner node
//! coordinates, so relocating each Steiner node to the geometric median of
//! its neighbors converges to the topology optimum. Relocation is followed by
//! a guarded Newton polish (the objective is smooth wherever no two incident
//! nodes coincide), which brings angles to the 120-degree condition at
//! machine precision. Steiner nodes that collapse onto a neighbor are
//! contracted and the smaller configuration is re-optimized; the collapsed
//! tree is kept, with its collapsed cost, as a valid (degenerate) realization
//! of the topology.

use super::fermat::{geometric_median, star_cost};
use super::{EstConfig, EstError, Topology};
use crate::geometry::{Node, Point, SteinerGraph};

/// Optimized placement of a topology's Steiner nodes.
#[derive(Debug, Clone)]
pub struct Realized {
    pub graph: SteinerGraph,
    pub cost: f64,
    /// True when some Steiner node collapsed onto a neighbor.
    pub degenerate: bool,
    pub iterations: usize,
}

/// Hard contraction threshold (relative to instance diameter).
const COLLAPSE_TOL: f64 = 1e-10;
/// Below this relative edge length a contraction is tried speculatively and
/// kept only when it does not increase the cost.
const SPECULATIVE_TOL: f64 = 1e-6;
/// Relative edge length below which the Newton phase refuses to run.
const NEWTON_EDGE_GUARD: f64 = 1e-11;

#[derive(Clone)]
struct State {
    n_terminals: usize,
    pos: Vec<Point>,
    adj: Vec<Vec<usize>>,
    alive: Vec<bool>,
    scale: f64,
    iterations: usize,
    degenerate: bool,
}

impl State {
    fn steiner_ids(&self) -> impl Iterator<Item = usize> + '_ {
        (self.n_terminals..self.pos.len()).filter(|&s| self.alive[s])
    }

    fn cost(&self) -> f64 {
        let mut sum = 0.0;
        for u in 0..self.pos.len() {
            if !self.alive[u] {
                continue;
            }
            for &v in &self.adj[u] {
                if v > u {
                    sum += self.pos[u].dist(self.pos[v]);
                }
            }
        }
        sum
    }

    /// Shortest edge incident to a Steiner node, as (steiner, neighbor, len).
    fn shortest_steiner_edge(&self) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for s in self.n_terminals..self.pos.len() {
            if !self.alive[s] {
                continue;
            }
            for &v in &self.adj[s] {
                let len = self.pos[s].dist(self.pos[v]);
                let better = match best {
                    None => true,
                    Some((bs, bv, bl)) => {
                        len < bl || (len == bl && (s, v) < (bs, bv))
                    }
                };
                if better {
                    best = Some((s, v, len));
                }
            }
        }
        best
    }

    /// Merge Steiner node `s` into its neighbor `t`.
    fn contract(&mut self, s: usize, t: usize) {
        debug_assert!(s >= self.n_terminals && self.alive[s] && self.alive[t]);
        debug_assert!(self.adj[s].contains(&t));
        let moved: Vec<usize> = self.adj[s].iter().copied().filter(|&u| u != t).collect();
        for &u in &moved {
            for slot in self.adj[u].iter_mut() {
                if *slot == s {
                    *slot = t;
                }
            }
            // A tree has no second path between u and t, so no duplicate can
            // appear here.
            debug_assert_eq!(self.adj[u].iter().filter(|&&x| x == t).count(), 1);
        }
        self.adj[t].retain(|&u| u != s);
        self.adj[t].extend(moved);
        self.adj[s].clear();
        self.alive[s] = false;
        self.degenerate = true;
    }
}

/// Optimize Steiner node positions for `topo` over the given terminals.
pub fn optimize_topology(
    terminals: &[Point],
    topo: &Topology,
    cfg: &EstConfig,
) -> Result<Realized, EstError> {
    if terminals.len() != topo.n_terminals() {
        return Err(EstError::TopologyMismatch {
            topology_terminals: topo.n_terminals(),
            instance_terminals: terminals.len(),
        });
    }
    let m = topo.n_terminals() + topo.n_steiner();
    let mut scale: f64 = 0.0;
    for (i, p) in terminals.iter().enumerate() {
        for q in &terminals[i + 1..] {
            scale = scale.max(p.dist(*q));
        }
    }
    if scale == 0.0 {
        scale = 1.0;
    }
    let centroid = Point::at(
        terminals.iter().map(|p| p.x).sum::<f64>() / terminals.len() as f64,
        terminals.iter().map(|p| p.y).sum::<f64>() / terminals.len() as f64,
    );
    let mut pos = Vec::with_capacity(m);
    pos.extend_from_slice(terminals);
    pos.resize(m, centroid);
    let mut adj = vec![Vec::new(); m];
    for &(u, v) in topo.edges() {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut state = State {
        n_terminals: topo.n_terminals(),
        pos,
        adj,
        alive: vec![true; m],
        scale,
        iterations: 0,
        degenerate: false,
    };
    // Least-squares warm start: each Steiner node at the average of its
    // neighbors (Jacobi sweeps on the quadratic relaxation).
    for _ in 0..60 {
        let ids: Vec<usize> = state.steiner_ids().collect();
        for s in ids {
            let (mut sx, mut sy) = (0.0, 0.0);
            for &u in &state.adj[s] {
                sx += state.pos[u].x;
                sy += state.pos[u].y;
            }
            let deg = state.adj[s].len() as f64;
            state.pos[s] = Point::at(sx / deg, sy / deg);
        }
    }
    optimize_state(&mut state, cfg, 0)?;
    build_realized(&state)
}

/// Optimize an arbitrary tree whose first `n_fixed` nodes are pinned and
/// whose remaining nodes are free Steiner nodes with caller-chosen starting
/// positions. `adj` is the full adjacency list. Used by solvers that grow a
/// tree incrementally rather than enumerating topologies.
pub(crate) fn optimize_free(
    n_fixed: usize,
    pos: Vec<Point>,
    adj: Vec<Vec<usize>>,
    cfg: &EstConfig,
) -> Result<Realized, EstError> {
    let mut scale: f64 = 0.0;
    for i in 0..n_fixed {
        for j in (i + 1)..n_fixed {
            scale = scale.max(pos[i].dist(pos[j]));
        }
    }
    if scale == 0.0 {
        scale = 1.0;
    }
    let m = pos.len();
    let mut state = State {
        n_terminals: n_fixed,
        pos,
        adj,
        alive: vec![true; m],
        scale,
        iterations: 0,
        degenerate: false,
    };
    optimize_state(&mut state, cfg, 0)?;
    build_realized(&state)
}

fn optimize_state(state: &mut State, cfg: &EstConfig, depth: usize) -> Result<(), EstError> {
    relocate(state, cfg)?;
    newton_polish(state);
    loop {
        let (s, t, len) = match state.shortest_steiner_edge() {
            Some(e) => e,
            None => return Ok(()),
        };
        if len < COLLAPSE_TOL * state.scale {
            state.contract(s, t);
            relocate(state, cfg)?;
            newton_polish(state);
            continue;
        }
        if len < SPECULATIVE_TOL * state.scale && depth < 8 {
            // Near-collapse: try the contraction and keep it only when it
            // does not lose length. This sidesteps the slow tail of the
            // relocation fixed point near degeneracies.
            let mut trial = state.clone();
            trial.contract(s, t);
            if optimize_state(&mut trial, cfg, depth + 1).is_ok()
                && trial.cost() <= state.cost() + 1e-12 * state.scale
            {
                *state = trial;
                continue;
            }
        }
        return Ok(());
    }
}

fn relocate(state: &mut State, cfg: &EstConfig) -> Result<(), EstError> {
    let ids: Vec<usize> = state.steiner_ids().collect();
    if ids.is_empty() {
        return Ok(());
    }
    let tol = cfg.tol_pos * state.scale;
    let mut nbr_buf: Vec<Point> = Vec::with_capacity(4);
    #[cfg(debug_assertions)]
    let mut prev_cost = state.cost();
    let mut sweeps = 0;
    loop {
        let mut max_disp: f64 = 0.0;
        for &s in &ids {
            nbr_buf.clear();
            nbr_buf.extend(state.adj[s].iter().map(|&u| state.pos[u]));
            let next = geometric_median(&nbr_buf);
            // Accept the candidate only when it actually shortens this
            // node's star. Median computations can return a marginally worse
            // point in degenerate configurations (a neighbor sitting exactly
            // on the node pins Weiszfeld near a singularity); rejecting such
            // moves keeps every sweep monotone, and the zero-length edge
            // behind the degeneracy is contracted right after relocation.
            if star_cost(next, &nbr_buf) < star_cost(state.pos[s], &nbr_buf) {
                max_disp = max_disp.max(state.pos[s].dist(next));
                state.pos[s] = next;
            }
        }
        sweeps += 1;
        state.iterations += 1;
        #[cfg(debug_assertions)]
        {
            let now = state.cost();
            debug_assert!(
                now <= prev_cost + 1e-9 * state.scale,
                "relocation increased length: {prev_cost} -> {now}"
            );
            prev_cost = now;
        }
        if max_disp < tol {
            return Ok(());
        }
        // Hand over to the Newton polish once progress slows in a smooth
        // region; it converges quadratically from here.
        if sweeps >= 300 && max_disp < 1e-6 * state.scale {
            return Ok(());
        }
        if sweeps >= cfg.max_iters {
            if max_disp > cfg.nonconvergence_tol * state.scale {
                return Err(EstError::NonConvergence {
                    iterations: sweeps,
                    displacement: max_disp,
                });
            }
            return Ok(());
        }
    }
}

/// Damped Newton iterations on the Steiner coordinates. The objective is the
/// sum of edge lengths; its gradient and Hessian are assembled per edge. A
/// ridge term keeps the system solvable and a backtracking line search keeps
/// the iteration monotone. Bails out near collapses, which the caller
/// handles by contraction.
fn newton_polish(state: &mut State) {
    let ids: Vec<usize> = state.steiner_ids().collect();
    let k = ids.len();
    if k == 0 {
        return;
    }
    let mut index = vec![usize::MAX; state.pos.len()];
    for (i, &s) in ids.iter().enumerate() {
        index[s] = i;
    }
    let dim = 2 * k;
    let guard = NEWTON_EDGE_GUARD * state.scale;
    for _ in 0..60 {
        let mut grad = vec![0.0f64; dim];
        let mut hess = vec![0.0f64; dim * dim];
        for u in 0..state.pos.len() {
            if !state.alive[u] {
                continue;
            }
            for &v in &state.adj[u] {
                if v <= u {
                    continue;
                }
                let d = Point::at(state.pos[u].x - state.pos[v].x, state.pos[u].y - state.pos[v].y);
                let len = d.x.hypot(d.y);
                if len < guard {
                    return;
                }
                let (ux, uy) = (d.x / len, d.y / len);
                // Projection matrix (I - uu^T) / len.
                let h = [
                    (1.0 - ux * ux) / len,
                    -ux * uy / len,
                    (1.0 - uy * uy) / len,
                ];
                let iu = index[u];
                let iv = index[v];
                if iu != usize::MAX {
                    grad[2 * iu] += ux;
                    grad[2 * iu + 1] += uy;
                    add_block(&mut hess, dim, iu, iu, h, 1.0);
                }
                if iv != usize::MAX {
                    grad[2 * iv] -= ux;
                    grad[2 * iv + 1] -= uy;
                    add_block(&mut hess, dim, iv, iv, h, 1.0);
                }
                if iu != usize::MAX && iv != usize::MAX {
                    add_block(&mut hess, dim, iu, iv, h, -1.0);
                    add_block(&mut hess, dim, iv, iu, h, -1.0);
                }
            }
        }
        let gnorm = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if gnorm < 1e-13 {
            return;
        }
        let mut maxdiag: f64 = 0.0;
        for i in 0..dim {
            maxdiag = maxdiag.max(hess[i * dim + i]);
        }
        let ridge = 1e-12 * maxdiag.max(1.0 / state.scale);
        for i in 0..dim {
            hess[i * dim + i] += ridge;
        }
        let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
        let step = match solve_dense(hess, rhs, dim) {
            Some(s) => s,
            None => return,
        };
        let slope: f64 = grad.iter().zip(&step).map(|(g, s)| g * s).sum();
        if !slope.is_finite() || slope >= 0.0 {
            return;
        }
        let base_cost = state.cost();
        let saved: Vec<Point> = ids.iter().map(|&s| state.pos[s]).collect();
        let mut t = 1.0f64;
        let mut accepted = false;
        while t > 1e-10 {
            for (i, &s) in ids.iter().enumerate() {
                state.pos[s] = Point::at(
                    saved[i].x + t * step[2 * i],
                    saved[i].y + t * step[2 * i + 1],
                );
            }
            let trial = state.cost();
            if trial <= base_cost + 1e-4 * t * slope || trial < base_cost - 1e-15 * state.scale {
                accepted = trial < base_cost;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            for (i, &s) in ids.iter().enumerate() {
                state.pos[s] = saved[i];
            }
            return;
        }
        state.iterations += 1;
    }
}

fn add_block(hess: &mut [f64], dim: usize, bi: usize, bj: usize, h: [f64; 3], sign: f64) {
    let (r, c) = (2 * bi, 2 * bj);
    hess[r * dim + c] += sign * h[0];
    hess[r * dim + c + 1] += sign * h[1];
    hess[(r + 1) * dim + c] += sign * h[1];
    hess[(r + 1) * dim + c + 1] += sign * h[2];
}

/// Gaussian elimination with partial pivoting on a dense row-major system.
fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[col * n + col].abs();
        for row in (col + 1)..n {
            let v = a[row * n + col].abs();
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return None;
        }
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
            }
            b.swap(col, pivot);
        }
        let diag = a[col * n + col];
        for row in (col + 1)..n {
            let factor = a[row * n + col] / diag;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                a[row * n + j] -= factor * a[col * n + j];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut sum = b[row];
        for j in (row + 1)..n {
            sum -= a[row * n + j] * x[j];
        }
        x[row] = sum / a[row * n + row];
        if !x[row].is_finite() {
            return None;
        }
    }
    Some(x)
}

fn build_realized(state: &State) -> Result<Realized, EstError> {
    let mut ids = Vec::new();
    let mut remap = vec![usize::MAX; state.pos.len()];
    for t in 0..state.n_terminals {
        remap[t] = ids.len();
        ids.push((t, Node::terminal(state.pos[t])));
    }
    for s in state.steiner_ids() {
        remap[s] = ids.len();
        ids.push((s, Node::steiner(state.pos[s])));
    }
    let mut edge_pairs = Vec::new();
    for (old, _) in &ids {
        for &v in &state.adj[*old] {
            if v > *old {
                edge_pairs.push((remap[*old], remap[v]));
            }
        }
    }
    let nodes: Vec<Node> = ids.into_iter().map(|(_, n)| n).collect();
    let graph = SteinerGraph::new(nodes, &edge_pairs, None).map_err(EstError::Graph)?;
    Ok(Realized {
        cost: graph.cost(),
        graph,
        degenerate: state.degenerate,
        iterations: state.iterations,
    })
}
