//! Planar primitives shared by every solver: points, normalized lines,
//! problem instances, rigid canonicalization, and the tree graphs that
//! solvers return.
//!
//! Conventions used throughout the crate:
//! * lines are stored normalized (`a^2 + b^2 = 1`, first nonzero of `(a, b)`
//!   positive), so `a*x + b*y - c` is a signed distance;
//! * the canonical frame puts the line on `y = 0` with terminals at `y >= 0`;
//! * graphs are trees; edge lengths are stored and must match the node
//!   positions they connect.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance for stored edge lengths vs. recomputed lengths.
pub const EDGE_REL_TOL: f64 = 1e-12;
/// Relative tolerance for stored total cost vs. the edge-length sum.
pub const COST_REL_TOL: f64 = 1e-9;
/// Default angular tolerance (radians) for the Steiner condition checks.
pub const DEFAULT_ANGLE_TOL: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("non-finite coordinate ({0}, {1})")]
    NonFinite(f64, f64),
    #[error("duplicate terminal at ({0}, {1})")]
    DuplicateTerminal(f64, f64),
    #[error("instance has no line")]
    MissingLine,
    #[error("empty point set")]
    EmptySet,
    #[error("degenerate line (coincident defining points)")]
    DegenerateLine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Result<Self, GeometryError> {
        if !x.is_finite() || !y.is_finite() {
            return Err(GeometryError::NonFinite(x, y));
        }
        Ok(Point { x, y })
    }

    /// Shorthand for positions produced internally, where finiteness holds by
    /// construction.
    pub(crate) fn at(x: f64, y: f64) -> Self {
        debug_assert!(x.is_finite() && y.is_finite());
        Point { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// A line `a*x + b*y = c` with `a^2 + b^2 = 1` and the first nonzero of
/// `(a, b)` positive, so equal lines have equal representations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineSpec {
    a: f64,
    b: f64,
    c: f64,
}

impl LineSpec {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self, GeometryError> {
        if !a.is_finite() || !b.is_finite() || !c.is_finite() {
            return Err(GeometryError::NonFinite(a, b));
        }
        let norm = a.hypot(b);
        if norm == 0.0 {
            return Err(GeometryError::DegenerateLine);
        }
        let (mut a, mut b, mut c) = (a / norm, b / norm, c / norm);
        // Canonical sign: first nonzero of (a, b) positive. Collapse -0.0 so
        // the sign test below is stable.
        if a == 0.0 {
            a = 0.0;
        }
        if b == 0.0 {
            b = 0.0;
        }
        let flip = if a != 0.0 { a < 0.0 } else { b < 0.0 };
        if flip {
            a = -a;
            b = -b;
            c = -c;
        }
        if a == 0.0 {
            a = 0.0;
        }
        if b == 0.0 {
            b = 0.0;
        }
        if c == 0.0 {
            c = 0.0;
        }
        Ok(LineSpec { a, b, c })
    }

    pub fn through_points(p: Point, q: Point) -> Result<Self, GeometryError> {
        let (dx, dy) = (q.x - p.x, q.y - p.y);
        if dx == 0.0 && dy == 0.0 {
            return Err(GeometryError::DegenerateLine);
        }
        // Normal is the direction rotated by 90 degrees.
        let (a, b) = (-dy, dx);
        let c = a * p.x + b * p.y;
        LineSpec::new(a, b, c)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Point on the line at parameter `t`; `param_of` is its inverse for
    /// points lying on the line. For the canonical line `y = 0` the parameter
    /// equals the x coordinate.
    pub fn point_at(&self, t: f64) -> Point {
        Point::at(self.c * self.a + t * self.b, self.c * self.b - t * self.a)
    }

    pub fn param_of(&self, p: Point) -> f64 {
        p.x * self.b - p.y * self.a
    }

    /// Orthogonal projection onto the line.
    pub fn foot_of(&self, p: Point) -> Point {
        self.point_at(self.param_of(p))
    }

    pub fn signed_offset(&self, p: Point) -> f64 {
        self.a * p.x + self.b * p.y - self.c
    }

    /// Geometric equality up to `tol`, robust against the sign flip that the
    /// canonical form exhibits for nearly-horizontal lines.
    pub fn approx_eq(&self, other: &LineSpec, tol: f64) -> bool {
        let sigma = if self.a * other.a + self.b * other.b >= 0.0 {
            1.0
        } else {
            -1.0
        };
        let scale = 1.0 + self.c.abs().max(other.c.abs());
        (self.a - sigma * other.a).abs() <= tol
            && (self.b - sigma * other.b).abs() <= tol
            && (self.c - sigma * other.c).abs() <= tol * scale
    }
}

pub fn point_line_distance(p: Point, line: &LineSpec) -> f64 {
    line.signed_offset(p).abs()
}

/// Width (x extent) of a point set.
pub fn width(points: &[Point]) -> Result<f64, GeometryError> {
    if points.is_empty() {
        return Err(GeometryError::EmptySet);
    }
    let min = points.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    let max = points.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
    Ok(max - min)
}

/// Height (y extent) of a point set.
pub fn height(points: &[Point]) -> Result<f64, GeometryError> {
    if points.is_empty() {
        return Err(GeometryError::EmptySet);
    }
    let min = points.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let max = points.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
    Ok(max - min)
}

/// A problem instance: terminals, plus the fixed line for the line-constrained
/// variants (`None` for plain Steiner tree instances).
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub terminals: Vec<Point>,
    pub line: Option<LineSpec>,
}

impl Instance {
    pub fn new(terminals: Vec<Point>, line: Option<LineSpec>) -> Result<Self, GeometryError> {
        for p in &terminals {
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(GeometryError::NonFinite(p.x, p.y));
            }
        }
        let mut sorted: Vec<Point> = terminals.clone();
        sorted.sort_by(|p, q| p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)));
        for w in sorted.windows(2) {
            if w[0].x == w[1].x && w[0].y == w[1].y {
                return Err(GeometryError::DuplicateTerminal(w[0].x, w[0].y));
            }
        }
        Ok(Instance { terminals, line })
    }

    pub fn require_line(&self) -> Result<&LineSpec, GeometryError> {
        self.line.as_ref().ok_or(GeometryError::MissingLine)
    }
}

/// Rotation plus vertical shift taking an instance to the canonical frame
/// (line on `y = 0`). `to_canonical` maps original to canonical coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    cos: f64,
    sin: f64,
    shift: f64,
}

impl RigidTransform {
    pub fn for_line(line: &LineSpec) -> Self {
        // Rotation sending the unit normal (a, b) to (0, 1).
        RigidTransform {
            cos: line.b(),
            sin: line.a(),
            shift: line.c(),
        }
    }

    pub fn identity() -> Self {
        RigidTransform {
            cos: 1.0,
            sin: 0.0,
            shift: 0.0,
        }
    }

    pub fn to_canonical(&self, p: Point) -> Point {
        Point::at(
            self.cos * p.x - self.sin * p.y,
            self.sin * p.x + self.cos * p.y - self.shift,
        )
    }

    pub fn to_original(&self, p: Point) -> Point {
        let y = p.y + self.shift;
        Point::at(self.cos * p.x + self.sin * y, -self.sin * p.x + self.cos * y)
    }
}

/// Which side of the line a canonical terminal came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Above,
    Below,
}

/// Canonicalized instance. Terminals strictly above the line stay put,
/// terminals strictly below are reflected to `y > 0` (the problem is
/// symmetric across the line and the two sides can be solved independently),
/// terminals on the line are already satisfied by the line itself.
#[derive(Debug, Clone)]
pub struct CanonicalInstance {
    pub transform: RigidTransform,
    /// Canonical coordinates, y > 0, sorted by (x, y).
    pub above: Vec<Point>,
    /// Canonical coordinates reflected to y > 0, sorted by (x, y).
    pub below: Vec<Point>,
    /// Canonical coordinates with y snapped to 0.
    pub on_line: Vec<Point>,
}

impl CanonicalInstance {
    /// Map a canonical-frame point from the given side back to the original
    /// frame.
    pub fn restore(&self, p: Point, side: Side) -> Point {
        let p = match side {
            Side::Above => p,
            Side::Below => Point::at(p.x, -p.y),
        };
        self.transform.to_original(p)
    }
}

/// Rigidly transform an instance so its line is `y = 0` and classify
/// terminals by side. Distances are preserved exactly up to roundoff.
pub fn canonicalize(inst: &Instance) -> Result<CanonicalInstance, GeometryError> {
    let line = inst.require_line()?;
    let transform = RigidTransform::for_line(line);
    let mut span: f64 = 1.0;
    for p in &inst.terminals {
        span = span.max(p.x.abs()).max(p.y.abs());
    }
    let tol = 1e-9 * span;
    let mut above = Vec::new();
    let mut below = Vec::new();
    let mut on_line = Vec::new();
    for &p in &inst.terminals {
        let q = transform.to_canonical(p);
        if q.y.abs() <= tol {
            on_line.push(Point::at(q.x, 0.0));
        } else if q.y > 0.0 {
            above.push(q);
        } else {
            below.push(Point::at(q.x, -q.y));
        }
    }
    let key = |p: &Point, q: &Point| p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y));
    above.sort_by(key);
    below.sort_by(key);
    on_line.sort_by(key);
    Ok(CanonicalInstance {
        transform,
        above,
        below,
        on_line,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    /// Input terminal.
    Terminal,
    /// Added branching point.
    Steiner,
    /// Discretization point on the line; has a position.
    LinePoint,
    /// The line itself, contracted to a single node; has no position.
    LineNode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub kind: NodeKind,
    pub pos: Option<Point>,
}

impl Node {
    pub fn terminal(p: Point) -> Self {
        Node {
            kind: NodeKind::Terminal,
            pos: Some(p),
        }
    }

    pub fn steiner(p: Point) -> Self {
        Node {
            kind: NodeKind::Steiner,
            pos: Some(p),
        }
    }

    pub fn line_point(p: Point) -> Self {
        Node {
            kind: NodeKind::LinePoint,
            pos: Some(p),
        }
    }

    pub fn line_node() -> Self {
        Node {
            kind: NodeKind::LineNode,
            pos: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub len: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("graph is not a tree ({nodes} nodes, {edges} edges, {components} components)")]
    NotATree {
        nodes: usize,
        edges: usize,
        components: usize,
    },
    #[error("edge {edge} has stored length {stored} but endpoints are {actual} apart")]
    LengthMismatch {
        edge: usize,
        stored: f64,
        actual: f64,
    },
    #[error("stored cost {stored} differs from edge sum {actual}")]
    CostMismatch { stored: f64, actual: f64 },
    #[error("edge {0} references a missing node")]
    BadEndpoint(usize),
    #[error("node {0} is a line node but the graph has no line")]
    NoLineForLineNode(usize),
    #[error("positionless node {0} of kind other than line_node")]
    MissingPosition(usize),
}

/// A tree over terminals, Steiner points, line points, and at most one
/// contracted line node. Edge lengths are Euclidean except at the line node,
/// where they are point-to-line distances.
#[derive(Debug, Clone, PartialEq)]
pub struct SteinerGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    cost: f64,
}

impl SteinerGraph {
    /// Build a tree graph, computing edge lengths from positions. Edges
    /// incident to the line node are priced at the point-to-line distance of
    /// the other endpoint (requires `line`).
    pub fn new(
        nodes: Vec<Node>,
        edge_pairs: &[(usize, usize)],
        line: Option<&LineSpec>,
    ) -> Result<Self, GraphError> {
        let mut edges = Vec::with_capacity(edge_pairs.len());
        for &(u, v) in edge_pairs {
            let len = edge_length(&nodes, u, v, line)?;
            edges.push(Edge { u, v, len });
        }
        let cost = edges.iter().map(|e| e.len).sum();
        let g = SteinerGraph { nodes, edges, cost };
        g.check_tree()?;
        Ok(g)
    }

    /// Build from edges whose lengths were already computed by the caller
    /// (still validated to be a tree; lengths are trusted).
    pub(crate) fn from_parts(nodes: Vec<Node>, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let cost = edges.iter().map(|e| e.len).sum();
        let g = SteinerGraph { nodes, edges, cost };
        g.check_tree()?;
        Ok(g)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn degree(&self, id: usize) -> usize {
        self.edges.iter().filter(|e| e.u == id || e.v == id).count()
    }

    pub fn neighbors(&self, id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for e in &self.edges {
            if e.u == id {
                out.push(e.v);
            } else if e.v == id {
                out.push(e.u);
            }
        }
        out
    }

    pub fn line_node(&self) -> Option<usize> {
        self.nodes.iter().position(|n| n.kind == NodeKind::LineNode)
    }

    fn check_tree(&self) -> Result<(), GraphError> {
        let n = self.nodes.len();
        for (i, node) in self.nodes.iter().enumerate() {
            if node.pos.is_none() && node.kind != NodeKind::LineNode {
                return Err(GraphError::MissingPosition(i));
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.u >= n || e.v >= n || e.u == e.v {
                return Err(GraphError::BadEndpoint(i));
            }
        }
        let mut dsu = DisjointSet::new(n);
        for e in &self.edges {
            dsu.union(e.u, e.v);
        }
        let components = (0..n).filter(|&i| dsu.find(i) == i).count();
        if self.edges.len() + 1 != n || components != 1 {
            return Err(GraphError::NotATree {
                nodes: n,
                edges: self.edges.len(),
                components,
            });
        }
        Ok(())
    }

    /// Recheck the structural invariants: tree shape, stored lengths against
    /// recomputed ones (relative `EDGE_REL_TOL`), and the cost sum
    /// (relative `COST_REL_TOL`).
    pub fn validate(&self, line: Option<&LineSpec>) -> Result<(), GraphError> {
        self.check_tree()?;
        let mut sum = 0.0;
        for (i, e) in self.edges.iter().enumerate() {
            let actual = edge_length(&self.nodes, e.u, e.v, line)?;
            let scale = 1.0_f64.max(actual.abs());
            if (e.len - actual).abs() > EDGE_REL_TOL * scale {
                return Err(GraphError::LengthMismatch {
                    edge: i,
                    stored: e.len,
                    actual,
                });
            }
            sum += e.len;
        }
        let scale = 1.0_f64.max(sum.abs());
        if (self.cost - sum).abs() > COST_REL_TOL * scale {
            return Err(GraphError::CostMismatch {
                stored: self.cost,
                actual: sum,
            });
        }
        Ok(())
    }
}

fn edge_length(
    nodes: &[Node],
    u: usize,
    v: usize,
    line: Option<&LineSpec>,
) -> Result<f64, GraphError> {
    let nu = nodes.get(u).ok_or(GraphError::BadEndpoint(u))?;
    let nv = nodes.get(v).ok_or(GraphError::BadEndpoint(v))?;
    match (nu.pos, nv.pos) {
        (Some(p), Some(q)) => Ok(p.dist(q)),
        (Some(p), None) => {
            let line = line.ok_or(GraphError::NoLineForLineNode(v))?;
            Ok(point_line_distance(p, line))
        }
        (None, Some(q)) => {
            let line = line.ok_or(GraphError::NoLineForLineNode(u))?;
            Ok(point_line_distance(q, line))
        }
        (None, None) => Err(GraphError::BadEndpoint(u)),
    }
}

/// Attachment of a line-node edge: `edge` indexes into the graph's edge
/// list, `x` is the line parameter of the attachment point
/// (`LineSpec::point_at(x)` recovers the planar point).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Attachment {
    pub edge: usize,
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConditionViolation {
    /// Terminal with degree above 3.
    TerminalDegree { node: usize, degree: usize },
    /// Steiner point with degree other than 3.
    SteinerDegree { node: usize, degree: usize },
    /// Two incident edges meet at less than 120 degrees (radians reported).
    Angle { node: usize, other: (usize, usize), angle: f64 },
    /// Line attachment that is not perpendicular to the line.
    Perpendicular { edge: usize, deviation: f64 },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConditionReport {
    pub violations: Vec<ConditionViolation>,
}

impl ConditionReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check the local optimality conditions of a Steiner tree: terminal degrees
/// at most 3, Steiner degrees exactly 3, no pair of incident edges meeting
/// below 120 degrees, and (when line context is given) perpendicular
/// attachments at the line node.
pub fn validate_steiner_conditions(
    graph: &SteinerGraph,
    line_ctx: Option<(&LineSpec, &[Attachment])>,
    tol_angle: f64,
) -> ConditionReport {
    let mut report = ConditionReport::default();
    let min_angle = 2.0 * std::f64::consts::PI / 3.0 - tol_angle;
    let mut scale: f64 = 0.0;
    for e in graph.edges() {
        scale = scale.max(e.len);
    }
    let len_floor = 1e-12 * scale.max(1e-300);
    // Attachment feet, for edges into the line node.
    let mut foot_of_edge = vec![None; graph.edges().len()];
    if let Some((line, atts)) = line_ctx {
        for att in atts {
            if att.edge < foot_of_edge.len() {
                foot_of_edge[att.edge] = Some(line.point_at(att.x));
            }
        }
        for (i, e) in graph.edges().iter().enumerate() {
            let (off, on) = match (graph.nodes()[e.u].pos, graph.nodes()[e.v].pos) {
                (Some(p), None) => (p, foot_of_edge[i]),
                (None, Some(q)) => (q, foot_of_edge[i]),
                _ => continue,
            };
            let foot = match on {
                Some(f) => f,
                None => line.foot_of(off),
            };
            let d = Point::at(off.x - foot.x, off.y - foot.y);
            let along = d.x * line.b() - d.y * line.a();
            let len = d.x.hypot(d.y);
            if len > len_floor && along.abs() > tol_angle * len {
                report.violations.push(ConditionViolation::Perpendicular {
                    edge: i,
                    deviation: (along / len).abs(),
                });
            }
        }
    }
    for (id, node) in graph.nodes().iter().enumerate() {
        let degree = graph.degree(id);
        match node.kind {
            NodeKind::Terminal => {
                if degree > 3 {
                    report
                        .violations
                        .push(ConditionViolation::TerminalDegree { node: id, degree });
                }
            }
            NodeKind::Steiner => {
                if degree != 3 {
                    report
                        .violations
                        .push(ConditionViolation::SteinerDegree { node: id, degree });
                }
            }
            NodeKind::LinePoint | NodeKind::LineNode => {}
        }
        let pos = match node.pos {
            Some(p) => p,
            None => continue,
        };
        // Directions toward each neighbor; line-node neighbors point at the
        // attachment foot when known, else at the orthogonal projection.
        let mut dirs: Vec<(usize, f64, f64)> = Vec::new();
        for (ei, e) in graph.edges().iter().enumerate() {
            let other = if e.u == id {
                e.v
            } else if e.v == id {
                e.u
            } else {
                continue;
            };
            let target = match graph.nodes()[other].pos {
                Some(q) => Some(q),
                None => match (line_ctx, foot_of_edge.get(ei).copied().flatten()) {
                    (_, Some(f)) => Some(f),
                    (Some((line, _)), None) => Some(line.foot_of(pos)),
                    (None, None) => None,
                },
            };
            if let Some(q) = target {
                let (dx, dy) = (q.x - pos.x, q.y - pos.y);
                let len = dx.hypot(dy);
                if len > len_floor {
                    dirs.push((other, dx / len, dy / len));
                }
            }
        }
        for i in 0..dirs.len() {
            for j in (i + 1)..dirs.len() {
                let dot = (dirs[i].1 * dirs[j].1 + dirs[i].2 * dirs[j].2).clamp(-1.0, 1.0);
                let angle = dot.acos();
                if angle < min_angle {
                    report.violations.push(ConditionViolation::Angle {
                        node: id,
                        other: (dirs[i].0, dirs[j].0),
                        angle,
                    });
                }
            }
        }
    }
    report
}

/// Union-find over `0..n`.
#[derive(Debug, Clone)]
pub struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true when the two sets were distinct.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (hi, lo) = if self.rank[ra] >= self.rank[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[lo] = hi;
        if self.rank[hi] == self.rank[lo] {
            self.rank[hi] += 1;
        }
        true
    }
}
