//! Hole filling: rewriting a Steiner tree over a discretized instance so
//! that consecutive line points are, as far as possible, joined by their
//! direct zero-to-be segments.
//!
//! The tree returned by a generic Steiner solver treats line points as
//! ordinary terminals and may connect them through expensive detours. Once
//! the line is contracted, only edges lying on the line become free, so
//! every missing segment ("hole") leaks cost. This pass restores segments
//! with four local rules, restarting from the first rule after every change
//! that closes a hole:
//!
//! 1. splice out Steiner points of degree below 3,
//! 2. split Steiner points of degree above 3 into degree-3 chains,
//! 3. for a missing segment, insert it and delete the longest non-segment
//!    edge on the cycle it closes (a strict improvement whenever that edge
//!    is at least as long as the segment),
//! 4. rebuild the neighborhood of a path of 5 tethered Steiner points by
//!    solving the 7-terminal subinstance (the 5 tether points plus the two
//!    path endpoints) exactly and splicing the optimum back in.
//!
//! Every restart closes at least one hole, so each step executes at most
//! slots + 1 times; the counters are reported and asserted by tests. Weight
//! never increases: steps 1-3 are pointwise non-increasing and step 4 rolls
//! back any splice that would gain weight or fail to close a hole.

use std::collections::HashSet;

use super::discretize::DiscretizedInstance;
use super::EsflError;
use crate::est::{solve_exact, EstConfig};
use crate::geometry::{Node, NodeKind, Point, SteinerGraph};

/// Where the segments are missing, per `count_holes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HoleReport {
    /// Consecutive line-point pairs in the discretization.
    pub total_slots: usize,
    /// Slots whose direct segment is absent from the tree.
    pub holes: usize,
    /// Slots whose segment is present; holes + segments_present = total_slots.
    pub segments_present: usize,
    /// Maximal runs of line points joined by present segments, as inclusive
    /// (first, last) line-point ordinals.
    pub component_spans: Vec<(usize, usize)>,
}

/// Execution statistics of one `fill_holes` run.
#[derive(Debug, Clone, Default)]
pub struct FillStats {
    pub step1_executions: usize,
    pub step2_executions: usize,
    pub step3_executions: usize,
    pub step4_executions: usize,
    pub holes_before: usize,
    pub holes_after: usize,
    pub weight_before: f64,
    pub weight_after: f64,
}

#[derive(Debug, Clone)]
pub struct FillOutcome {
    pub tree: SteinerGraph,
    pub stats: FillStats,
}

/// Count missing segments between consecutive line points.
pub fn count_holes(t: &SteinerGraph, disc: &DiscretizedInstance) -> Result<HoleReport, EsflError> {
    let tree = FillTree::from_graph(t, disc)?;
    Ok(tree.hole_report())
}

/// Run the four-step segment restoration loop. The input must span the
/// discretization's line points (plus the piece terminals and any Steiner
/// points); tree-ness is guaranteed by the `SteinerGraph` type.
pub fn fill_holes(
    t: &SteinerGraph,
    disc: &DiscretizedInstance,
    est_cfg: &EstConfig,
) -> Result<FillOutcome, EsflError> {
    let mut tree = FillTree::from_graph(t, disc)?;
    let mut stats = FillStats {
        holes_before: tree.count_hole_slots(),
        weight_before: tree.weight(),
        ..FillStats::default()
    };
    let mut processed: HashSet<[usize; 5]> = HashSet::new();
    loop {
        tree.normalize_low_degrees(&mut stats);
        tree.split_high_degrees(&mut stats);
        stats.step3_executions += 1;
        if tree.fill_one_hole() {
            continue;
        }
        stats.step4_executions += 1;
        if tree.splice_one_path(est_cfg, &mut processed)? {
            continue;
        }
        break;
    }
    stats.holes_after = tree.count_hole_slots();
    stats.weight_after = tree.weight();
    debug_assert!(
        stats.weight_after <= stats.weight_before * (1.0 + 1e-9) + 1e-12,
        "hole filling increased weight: {} -> {}",
        stats.weight_before,
        stats.weight_after
    );
    Ok(FillOutcome {
        tree: tree.into_graph()?,
        stats,
    })
}

/// Mutable working form of the tree: stable node ids, adjacency lists,
/// alive flags. Node ids are never reused, which lets step 4 key its
/// processed-path markers by Steiner ids.
#[derive(Debug, Clone)]
struct FillTree {
    kind: Vec<NodeKind>,
    pos: Vec<Point>,
    adj: Vec<Vec<usize>>,
    alive: Vec<bool>,
    /// node id -> ordinal among line points (by x), if it is one.
    line_ordinal: Vec<Option<usize>>,
    /// ordinal -> node id.
    line_ids: Vec<usize>,
    scale: f64,
    n_edges: usize,
}

impl FillTree {
    fn from_graph(t: &SteinerGraph, disc: &DiscretizedInstance) -> Result<Self, EsflError> {
        let nodes = t.nodes();
        let mut kind = Vec::with_capacity(nodes.len());
        let mut pos = Vec::with_capacity(nodes.len());
        for node in nodes {
            if node.kind == NodeKind::LineNode {
                return Err(EsflError::UnexpectedLineNode);
            }
            kind.push(node.kind);
            pos.push(node.pos.expect("positioned kinds carry coordinates"));
        }
        let mut line_nodes: Vec<usize> = (0..nodes.len())
            .filter(|&i| kind[i] == NodeKind::LinePoint)
            .collect();
        line_nodes.sort_by(|&a, &b| pos[a].x.total_cmp(&pos[b].x));
        if line_nodes.len() != disc.line_points.len() {
            return Err(EsflError::LinePointMismatch {
                expected: disc.line_points.len(),
                found: line_nodes.len(),
            });
        }
        let scale = scale_of(&pos);
        for (ordinal, &id) in line_nodes.iter().enumerate() {
            if pos[id].dist(disc.line_points[ordinal]) > 1e-9 * scale {
                return Err(EsflError::LinePointMismatch {
                    expected: disc.line_points.len(),
                    found: line_nodes.len(),
                });
            }
        }
        let mut line_ordinal = vec![None; nodes.len()];
        for (ordinal, &id) in line_nodes.iter().enumerate() {
            line_ordinal[id] = Some(ordinal);
        }
        let mut adj = vec![Vec::new(); nodes.len()];
        for e in t.edges() {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        Ok(FillTree {
            kind,
            pos,
            adj,
            alive: vec![true; nodes.len()],
            line_ordinal,
            line_ids: line_nodes,
            scale,
            n_edges: t.edges().len(),
        })
    }

    fn into_graph(self) -> Result<SteinerGraph, EsflError> {
        let mut remap = vec![usize::MAX; self.kind.len()];
        let mut nodes = Vec::new();
        for id in 0..self.kind.len() {
            if self.alive[id] {
                remap[id] = nodes.len();
                nodes.push(Node {
                    kind: self.kind[id],
                    pos: Some(self.pos[id]),
                });
            }
        }
        let mut edges = Vec::new();
        for u in 0..self.kind.len() {
            if !self.alive[u] {
                continue;
            }
            for &v in &self.adj[u] {
                if v > u {
                    edges.push((remap[u], remap[v]));
                }
            }
        }
        SteinerGraph::new(nodes, &edges, None).map_err(EsflError::Graph)
    }

    fn alive_count(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    fn weight(&self) -> f64 {
        let mut sum = 0.0;
        for u in 0..self.kind.len() {
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

    fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v)
    }

    fn add_edge(&mut self, u: usize, v: usize) {
        debug_assert!(u != v && self.alive[u] && self.alive[v] && !self.has_edge(u, v));
        self.adj[u].push(v);
        self.adj[v].push(u);
        self.n_edges += 1;
    }

    fn remove_edge(&mut self, u: usize, v: usize) {
        debug_assert!(self.has_edge(u, v));
        self.adj[u].retain(|&x| x != v);
        self.adj[v].retain(|&x| x != u);
        self.n_edges -= 1;
    }

    fn remove_node(&mut self, v: usize) {
        let nbrs = std::mem::take(&mut self.adj[v]);
        for u in nbrs {
            self.adj[u].retain(|&x| x != v);
            self.n_edges -= 1;
        }
        self.alive[v] = false;
    }

    fn add_steiner(&mut self, p: Point) -> usize {
        let id = self.kind.len();
        self.kind.push(NodeKind::Steiner);
        self.pos.push(p);
        self.adj.push(Vec::new());
        self.alive.push(true);
        self.line_ordinal.push(None);
        id
    }

    /// An edge is a segment when it joins consecutive line points.
    fn is_segment(&self, u: usize, v: usize) -> bool {
        match (self.line_ordinal[u], self.line_ordinal[v]) {
            (Some(a), Some(b)) => a.abs_diff(b) == 1,
            _ => false,
        }
    }

    fn count_hole_slots(&self) -> usize {
        (0..self.line_ids.len().saturating_sub(1))
            .filter(|&i| !self.has_edge(self.line_ids[i], self.line_ids[i + 1]))
            .count()
    }

    fn hole_report(&self) -> HoleReport {
        let total_slots = self.line_ids.len().saturating_sub(1);
        let present: Vec<bool> = (0..total_slots)
            .map(|i| self.has_edge(self.line_ids[i], self.line_ids[i + 1]))
            .collect();
        let holes = present.iter().filter(|&&p| !p).count();
        let mut component_spans = Vec::new();
        let mut start = 0usize;
        for i in 0..self.line_ids.len() {
            let joined_to_next = i < total_slots && present[i];
            if !joined_to_next {
                component_spans.push((start, i));
                start = i + 1;
            }
        }
        HoleReport {
            total_slots,
            holes,
            segments_present: total_slots - holes,
            component_spans,
        }
    }

    /// Step 1: remove or splice out Steiner points of degree 2 or less,
    /// repeating until none remain. Weight never increases (the splice edge
    /// obeys the triangle inequality).
    fn normalize_low_degrees(&mut self, stats: &mut FillStats) {
        stats.step1_executions += 1;
        loop {
            let target = (0..self.kind.len()).find(|&v| {
                self.alive[v] && self.kind[v] == NodeKind::Steiner && self.degree(v) < 3
            });
            let v = match target {
                Some(v) => v,
                None => return,
            };
            if self.degree(v) == 2 {
                let (u, w) = (self.adj[v][0], self.adj[v][1]);
                self.remove_node(v);
                debug_assert!(!self.has_edge(u, w), "splicing would duplicate an edge");
                self.add_edge(u, w);
            } else {
                self.remove_node(v);
            }
        }
    }

    /// Step 2: split Steiner points of degree above 3 into chains of
    /// degree-3 copies at the same position (zero-length links), so that the
    /// degree invariant of Steiner trees holds everywhere.
    fn split_high_degrees(&mut self, stats: &mut FillStats) {
        stats.step2_executions += 1;
        loop {
            let target = (0..self.kind.len()).find(|&v| {
                self.alive[v] && self.kind[v] == NodeKind::Steiner && self.degree(v) > 3
            });
            let v = match target {
                Some(v) => v,
                None => return,
            };
            let mut nbrs = self.adj[v].clone();
            nbrs.sort_unstable();
            // Keep the two smallest neighbors on v; the rest move onto a
            // chain of zero-length copies, one neighbor per copy, with the
            // last copy taking the final two.
            for &nbr in &nbrs[2..] {
                self.remove_edge(v, nbr);
            }
            let mut prev = v;
            let mut idx = 2;
            while idx < nbrs.len() {
                debug_assert!(nbrs.len() - idx >= 2);
                let link = self.add_steiner(self.pos[v]);
                self.add_edge(prev, link);
                if idx + 2 == nbrs.len() {
                    self.add_edge(link, nbrs[idx]);
                    self.add_edge(link, nbrs[idx + 1]);
                    idx += 2;
                } else {
                    self.add_edge(link, nbrs[idx]);
                    idx += 1;
                }
                prev = link;
            }
        }
    }

    /// Path between two alive nodes as a list of edges (BFS; unique in a
    /// tree).
    fn path_edges(&self, from: usize, to: usize) -> Vec<(usize, usize)> {
        let mut parent = vec![usize::MAX; self.kind.len()];
        let mut queue = std::collections::VecDeque::new();
        parent[from] = from;
        queue.push_back(from);
        while let Some(u) = queue.pop_front() {
            if u == to {
                break;
            }
            for &v in &self.adj[u] {
                if parent[v] == usize::MAX {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        debug_assert!(parent[to] != usize::MAX, "path endpoints disconnected");
        let mut edges = Vec::new();
        let mut cur = to;
        while cur != from {
            edges.push((parent[cur], cur));
            cur = parent[cur];
        }
        edges
    }

    /// Step 3: find one fillable hole and swap its segment in. The segment
    /// closes a cycle with the existing tree path between its endpoints;
    /// removing the longest non-segment edge of that path keeps the graph a
    /// tree and never increases weight (the candidate is only accepted when
    /// that edge is at least segment-long). Segments themselves are never
    /// removed, so the hole count strictly drops.
    fn fill_one_hole(&mut self) -> bool {
        for slot in 0..self.line_ids.len().saturating_sub(1) {
            let (a, b) = (self.line_ids[slot], self.line_ids[slot + 1]);
            if self.has_edge(a, b) {
                continue;
            }
            let gap = self.pos[a].dist(self.pos[b]);
            let path = self.path_edges(a, b);
            let mut best: Option<((usize, usize), f64)> = None;
            for &(u, v) in &path {
                if self.is_segment(u, v) {
                    continue;
                }
                let len = self.pos[u].dist(self.pos[v]);
                let key = (u.min(v), u.max(v));
                let better = match best {
                    None => true,
                    Some(((bu, bv), bl)) => len > bl || (len == bl && key < (bu, bv)),
                };
                if better {
                    best = Some((key, len));
                }
            }
            if let Some(((u, v), len)) = best {
                if len >= gap * (1.0 - 1e-12) {
                    self.remove_edge(u, v);
                    self.add_edge(a, b);
                    return true;
                }
            }
        }
        false
    }

    /// Tether of a path Steiner: its smallest-ordinal line-point neighbor.
    fn tether_of(&self, s: usize) -> Option<usize> {
        self.adj[s]
            .iter()
            .copied()
            .filter(|&v| self.line_ordinal[v].is_some())
            .min_by_key(|&v| self.line_ordinal[v])
    }

    /// Step 4: find a path of five Steiner points, each tethered to its own
    /// line point, and rebuild that neighborhood from the exact optimum of
    /// the 7-terminal subinstance (the five tether points, plus the two path
    /// endpoints which still carry the rest of the tree). A splice is kept
    /// only when it closes a hole without gaining weight; otherwise it is
    /// rolled back and the path is marked so the scan can move on.
    fn splice_one_path(
        &mut self,
        est_cfg: &EstConfig,
        processed: &mut HashSet<[usize; 5]>,
    ) -> Result<bool, EsflError> {
        let candidates = self.tethered_paths();
        for path in candidates {
            if processed.contains(&path) {
                continue;
            }
            if self.try_splice(&path, est_cfg)? {
                return Ok(true);
            }
            processed.insert(path);
        }
        Ok(false)
    }

    /// All paths s1-s2-s3-s4-s5 of alive Steiner points where every s_i has
    /// a line-point neighbor and the five tethers are distinct. Each path is
    /// reported once (endpoint ids ascending).
    fn tethered_paths(&self) -> Vec<[usize; 5]> {
        let mut found = Vec::new();
        let is_steiner =
            |v: usize| self.alive[v] && self.kind[v] == NodeKind::Steiner;
        for s1 in 0..self.kind.len() {
            if !is_steiner(s1) {
                continue;
            }
            for &s2 in &self.adj[s1] {
                if !is_steiner(s2) {
                    continue;
                }
                for &s3 in &self.adj[s2] {
                    if s3 == s1 || !is_steiner(s3) {
                        continue;
                    }
                    for &s4 in &self.adj[s3] {
                        if s4 == s2 || !is_steiner(s4) {
                            continue;
                        }
                        for &s5 in &self.adj[s4] {
                            if s5 == s3 || !is_steiner(s5) || s1 >= s5 {
                                continue;
                            }
                            let path = [s1, s2, s3, s4, s5];
                            let tethers: Vec<Option<usize>> =
                                path.iter().map(|&s| self.tether_of(s)).collect();
                            if tethers.iter().any(|t| t.is_none()) {
                                continue;
                            }
                            let mut ords: Vec<usize> = tethers
                                .iter()
                                .map(|t| self.line_ordinal[t.unwrap()].unwrap())
                                .collect();
                            ords.sort_unstable();
                            ords.dedup();
                            if ords.len() == 5 {
                                found.push(path);
                            }
                        }
                    }
                }
            }
        }
        found
    }

    fn try_splice(&mut self, path: &[usize; 5], est_cfg: &EstConfig) -> Result<bool, EsflError> {
        let snapshot = self.clone();
        let pre_weight = self.weight();
        let pre_holes = self.count_hole_slots();
        let tethers: Vec<usize> = path
            .iter()
            .map(|&s| self.tether_of(s).expect("candidate paths are tethered"))
            .collect();
        // Subinstance: the five tether points plus the path endpoints.
        let mut j_nodes: Vec<usize> = tethers.clone();
        j_nodes.push(path[0]);
        j_nodes.push(path[4]);
        let j_points: Vec<Point> = j_nodes.iter().map(|&v| self.pos[v]).collect();
        let best = solve_exact(&j_points, est_cfg).map_err(EsflError::Est)?;
        // Remove the three interior Steiner points; their tethers and path
        // edges go with them. The tree splits into components, each holding
        // at least one subinstance node, so the optimum reconnects them.
        self.remove_node(path[1]);
        self.remove_node(path[2]);
        self.remove_node(path[3]);
        // Map the optimum's nodes back into this tree.
        let mut remap = Vec::with_capacity(best.graph.nodes().len());
        for (i, node) in best.graph.nodes().iter().enumerate() {
            if i < j_nodes.len() {
                remap.push(j_nodes[i]);
            } else {
                remap.push(self.add_steiner(node.pos.expect("steiner nodes are positioned")));
            }
        }
        for e in best.graph.edges() {
            let (u, v) = (remap[e.u], remap[e.v]);
            match (self.line_ordinal[u], self.line_ordinal[v]) {
                // An edge between two line points runs along the line;
                // materialize it as the chain of unit segments so it closes
                // holes instead of spanning them.
                (Some(a), Some(b)) => {
                    let (lo, hi) = (a.min(b), a.max(b));
                    for ord in lo..hi {
                        let (x, y) = (self.line_ids[ord], self.line_ids[ord + 1]);
                        if !self.has_edge(x, y) {
                            self.add_edge(x, y);
                        }
                    }
                }
                _ => {
                    if !self.has_edge(u, v) {
                        self.add_edge(u, v);
                    }
                }
            }
        }
        // The union can contain cycles (for example when the optimum rebuilt
        // a connection that also survived in the tree). Delete the heaviest
        // non-segment edge of each remaining cycle.
        while self.n_edges + 1 > self.alive_count() {
            let cycle = self.find_cycle().expect("edge surplus implies a cycle");
            let mut best_edge: Option<((usize, usize), f64)> = None;
            for &(u, v) in &cycle {
                if self.is_segment(u, v) {
                    continue;
                }
                let len = self.pos[u].dist(self.pos[v]);
                let key = (u.min(v), u.max(v));
                let better = match best_edge {
                    None => true,
                    Some((bk, bl)) => len > bl || (len == bl && key < bk),
                };
                if better {
                    best_edge = Some((key, len));
                }
            }
            match best_edge {
                Some(((u, v), _)) => self.remove_edge(u, v),
                // A cycle made purely of segments cannot occur (segments
                // form sub-paths of the line chain); guard anyway.
                None => {
                    let (u, v) = cycle[0];
                    self.remove_edge(u, v);
                }
            }
        }
        let post_weight = self.weight();
        let post_holes = self.count_hole_slots();
        if post_weight <= pre_weight + 1e-12 * self.scale && post_holes < pre_holes {
            Ok(true)
        } else {
            *self = snapshot;
            Ok(false)
        }
    }

    /// Any cycle in the current graph, as an edge list. Iterative DFS with
    /// parent tracking; a back edge closes the cycle.
    fn find_cycle(&self) -> Option<Vec<(usize, usize)>> {
        let n = self.kind.len();
        let mut parent = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        for root in 0..n {
            if !self.alive[root] || seen[root] {
                continue;
            }
            let mut stack = vec![(root, usize::MAX)];
            seen[root] = true;
            parent[root] = root;
            while let Some((u, from)) = stack.pop() {
                for &v in &self.adj[u] {
                    if v == from {
                        continue;
                    }
                    if !seen[v] {
                        seen[v] = true;
                        parent[v] = u;
                        stack.push((v, u));
                    } else {
                        // Found a cycle through (u, v): walk both endpoints
                        // up to their common ancestor.
                        return Some(self.extract_cycle(&parent, u, v));
                    }
                }
            }
        }
        None
    }

    fn extract_cycle(&self, parent: &[usize], u: usize, v: usize) -> Vec<(usize, usize)> {
        let depth = |mut x: usize| {
            let mut d = 0;
            while parent[x] != x {
                x = parent[x];
                d += 1;
            }
            d
        };
        let (mut a, mut b) = (u, v);
        let (mut da, mut db) = (depth(a), depth(b));
        let mut edges = vec![(u, v)];
        while da > db {
            edges.push((a, parent[a]));
            a = parent[a];
            da -= 1;
        }
        while db > da {
            edges.push((b, parent[b]));
            b = parent[b];
            db -= 1;
        }
        while a != b {
            edges.push((a, parent[a]));
            edges.push((b, parent[b]));
            a = parent[a];
            b = parent[b];
        }
        edges
    }
}

fn scale_of(pos: &[Point]) -> f64 {
    let mut min_x = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for p in pos {
        min_x = min_x.min(p.x);
        max_x = max_x.max(p.x);
        min_y = min_y.min(p.y);
        max_y = max_y.max(p.y);
    }
    let span = (max_x - min_x).max(max_y - min_y);
    if span > 0.0 {
        span
    } else {
        1.0
    }
}
