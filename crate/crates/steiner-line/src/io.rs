//! File formats: JSON instances and solutions, plus an SVG renderer.
//!
//! Instances are `{"terminals": [[x, y], ...], "line": {"a", "b", "c"}?}`
//! with an optional `"version"` (defaults to 1). Unknown fields are ignored
//! so files may carry their own metadata. Solutions list nodes, edges, and
//! line attachments explicitly. All writers are deterministic: rerunning a
//! solve on the same input produces byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::geometry::{
    Attachment, GeometryError, GraphError, Instance, LineSpec, Node, NodeKind, Point, SteinerGraph,
};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {0}, this build reads version {FORMAT_VERSION}")]
    Version(u32),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("solution node {0} has kind {1:?} but no coordinates")]
    MissingCoordinates(usize, NodeKind),
}

#[derive(Debug, Serialize, Deserialize)]
struct LineJson {
    a: f64,
    b: f64,
    c: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    version: Option<u32>,
    terminals: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    line: Option<LineJson>,
}

pub fn parse_instance(bytes: &[u8]) -> Result<Instance, IoError> {
    let file: InstanceFile = serde_json::from_slice(bytes)?;
    if let Some(v) = file.version {
        if v != FORMAT_VERSION {
            return Err(IoError::Version(v));
        }
    }
    let mut terminals = Vec::with_capacity(file.terminals.len());
    for [x, y] in file.terminals {
        terminals.push(Point::new(x, y)?);
    }
    let line = match file.line {
        Some(l) => Some(LineSpec::new(l.a, l.b, l.c)?),
        None => None,
    };
    Ok(Instance::new(terminals, line)?)
}

pub fn read_instance(path: &Path) -> Result<Instance, IoError> {
    parse_instance(&fs::read(path)?)
}

/// Hex SHA-256 of the raw instance file bytes, identifying the exact input.
pub fn instance_digest(path: &Path) -> Result<String, IoError> {
    let bytes = fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    let out = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for b in out {
        write!(hex, "{b:02x}").expect("writing to a String cannot fail");
    }
    Ok(hex)
}

pub fn write_instance(path: &Path, inst: &Instance) -> Result<(), IoError> {
    let file = InstanceFile {
        version: Some(FORMAT_VERSION),
        terminals: inst.terminals.iter().map(|p| [p.x, p.y]).collect(),
        line: inst.line.map(|l| LineJson {
            a: l.a(),
            b: l.b(),
            c: l.c(),
        }),
    };
    let mut text = serde_json::to_string_pretty(&file)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeJson {
    id: usize,
    kind: NodeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    y: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SolutionFile {
    version: u32,
    cost: f64,
    nodes: Vec<NodeJson>,
    /// `[u, v, length]` triples.
    edges: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    attachments: Vec<Attachment>,
}

impl SolutionFile {
    pub fn new(graph: &SteinerGraph, attachments: &[Attachment]) -> Self {
        let nodes = graph
            .nodes()
            .iter()
            .enumerate()
            .map(|(id, n)| NodeJson {
                id,
                kind: n.kind,
                x: n.pos.map(|p| p.x),
                y: n.pos.map(|p| p.y),
            })
            .collect();
        let edges = graph.edges().iter().map(|e| (e.u, e.v, e.len)).collect();
        SolutionFile {
            version: FORMAT_VERSION,
            cost: graph.cost(),
            nodes,
            edges,
            attachments: attachments.to_vec(),
        }
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    /// Rebuild the graph, trusting the recorded lengths. `validate` on the
    /// result cross-checks them against the coordinates.
    pub fn into_graph(self) -> Result<SteinerGraph, IoError> {
        if self.version != FORMAT_VERSION {
            return Err(IoError::Version(self.version));
        }
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let node = match n.kind {
                NodeKind::LineNode => Node::line_node(),
                kind => {
                    let (Some(x), Some(y)) = (n.x, n.y) else {
                        return Err(IoError::MissingCoordinates(n.id, kind));
                    };
                    let pos = Point::new(x, y)?;
                    match kind {
                        NodeKind::Terminal => Node::terminal(pos),
                        NodeKind::Steiner => Node::steiner(pos),
                        NodeKind::LinePoint => Node::line_point(pos),
                        NodeKind::LineNode => unreachable!(),
                    }
                }
            };
            nodes.push(node);
        }
        let edges = self
            .edges
            .iter()
            .map(|&(u, v, len)| crate::geometry::Edge { u, v, len })
            .collect();
        Ok(SteinerGraph::from_parts(nodes, edges)?)
    }
}

pub fn write_solution(
    path: &Path,
    graph: &SteinerGraph,
    attachments: &[Attachment],
) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(&SolutionFile::new(graph, attachments))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_solution(path: &Path) -> Result<SolutionFile, IoError> {
    Ok(serde_json::from_slice(&fs::read(path)?)?)
}

/// Render the tree as a standalone SVG. Terminals are filled dark discs,
/// Steiner points smaller green discs, sampled line points hollow, and the
/// line itself (when given) a gray chord across the view box. Edges to the
/// line node are drawn to the perpendicular foot of their off-line endpoint.
pub fn render_svg(graph: &SteinerGraph, line: Option<&LineSpec>) -> String {
    let pts: Vec<Point> = graph.nodes().iter().filter_map(|n| n.pos).collect();
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut grow = |p: Point| {
        min_x = min_x.min(p.x);
        max_x = max_x.max(p.x);
        min_y = min_y.min(p.y);
        max_y = max_y.max(p.y);
    };
    for &p in &pts {
        grow(p);
    }
    if let Some(l) = line {
        for &p in &pts {
            grow(l.foot_of(p));
        }
    }
    if pts.is_empty() {
        grow(Point::at(0.0, 0.0));
    }
    let span = (max_x - min_x).max(max_y - min_y).max(1e-9);
    let margin = 0.1 * span;
    let (x0, y0) = (min_x - margin, min_y - margin);
    let (w, h) = (max_x - min_x + 2.0 * margin, max_y - min_y + 2.0 * margin);
    let stroke = 0.005 * span.max(1e-9);
    let r_terminal = 0.015 * span;
    let r_steiner = 0.010 * span;

    // Flip y so the viewer sees the usual orientation.
    let fy = |y: f64| -y;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"640\" height=\"640\" preserveAspectRatio=\"xMidYMid meet\">",
        x0,
        fy(y0 + h),
        w,
        h
    );
    if let Some(l) = line {
        let corners = [
            Point::at(x0, y0),
            Point::at(x0 + w, y0),
            Point::at(x0, y0 + h),
            Point::at(x0 + w, y0 + h),
        ];
        let (mut t_min, mut t_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for c in corners {
            let t = l.param_of(c);
            t_min = t_min.min(t);
            t_max = t_max.max(t);
        }
        let p = l.point_at(t_min);
        let q = l.point_at(t_max);
        let _ = writeln!(
            svg,
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#999999\" stroke-width=\"{}\"/>",
            p.x,
            fy(p.y),
            q.x,
            fy(q.y),
            stroke
        );
    }
    for e in graph.edges() {
        let endpoint = |id: usize| -> Option<Point> {
            match graph.nodes()[id].pos {
                Some(p) => Some(p),
                None => {
                    let other = if e.u == id { e.v } else { e.u };
                    let p = graph.nodes()[other].pos?;
                    line.map(|l| l.foot_of(p))
                }
            }
        };
        let (Some(p), Some(q)) = (endpoint(e.u), endpoint(e.v)) else {
            continue;
        };
        let _ = writeln!(
            svg,
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#222222\" stroke-width=\"{}\"/>",
            p.x,
            fy(p.y),
            q.x,
            fy(q.y),
            stroke
        );
    }
    for n in graph.nodes() {
        let Some(p) = n.pos else { continue };
        let circle = match n.kind {
            NodeKind::Terminal => format!(
                "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#111111\"/>",
                p.x,
                fy(p.y),
                r_terminal
            ),
            NodeKind::Steiner => format!(
                "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#2e8b57\"/>",
                p.x,
                fy(p.y),
                r_steiner
            ),
            NodeKind::LinePoint => format!(
                "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"white\" stroke=\"#111111\" stroke-width=\"{}\"/>",
                p.x,
                fy(p.y),
                r_steiner,
                stroke
            ),
            NodeKind::LineNode => continue,
        };
        let _ = writeln!(svg, "{circle}");
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn write_svg(
    path: &Path,
    graph: &SteinerGraph,
    line: Option<&LineSpec>,
) -> Result<(), IoError> {
    fs::write(path, render_svg(graph, line))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_roundtrip_preserves_terminals_and_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inst.json");
        let inst = Instance::new(
            vec![Point::at(0.0, 1.5), Point::at(2.0, -0.25)],
            Some(LineSpec::new(0.0, 1.0, 0.0).unwrap()),
        )
        .unwrap();
        write_instance(&path, &inst).unwrap();
        let back = read_instance(&path).unwrap();
        assert_eq!(back.terminals, inst.terminals);
        assert!(back.line.unwrap().approx_eq(&inst.line.unwrap(), 0.0));
    }

    #[test]
    fn unknown_fields_and_missing_version_are_tolerated() {
        let raw = br#"{"terminals": [[0,0],[1,1]], "meta": {"note": "hand made"}}"#;
        let inst = parse_instance(raw).unwrap();
        assert_eq!(inst.terminals.len(), 2);
        assert!(inst.line.is_none());
    }

    #[test]
    fn future_versions_are_rejected() {
        let raw = br#"{"version": 99, "terminals": [[0,0]]}"#;
        assert!(matches!(parse_instance(raw), Err(IoError::Version(99))));
    }

    #[test]
    fn digest_tracks_bytes_not_content() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.json");
        let b = dir.path().join("b.json");
        fs::write(&a, b"{\"terminals\": [[0,0]]}").unwrap();
        fs::write(&b, b"{\"terminals\":  [[0,0]]}").unwrap();
        let da = instance_digest(&a).unwrap();
        let db = instance_digest(&b).unwrap();
        assert_eq!(da.len(), 64);
        assert_ne!(da, db);
    }

    #[test]
    fn solution_roundtrip_revalidates() {
        let line = LineSpec::new(0.0, 1.0, 0.0).unwrap();
        let nodes = vec![
            Node::terminal(Point::at(0.0, 2.0)),
            Node::terminal(Point::at(4.0, 1.0)),
            Node::line_node(),
        ];
        let graph = SteinerGraph::new(nodes, &[(0, 2), (1, 2)], Some(&line)).unwrap();
        let attachments = vec![Attachment { edge: 0, x: 0.0 }, Attachment { edge: 1, x: 4.0 }];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sol.json");
        write_solution(&path, &graph, &attachments).unwrap();
        let back = read_solution(&path).unwrap();
        assert!((back.cost() - 3.0).abs() < 1e-12);
        let rebuilt = back.into_graph().unwrap();
        rebuilt.validate(Some(&line)).unwrap();
        assert_eq!(rebuilt.nodes().len(), 3);
        assert_eq!(rebuilt.edges().len(), 2);
    }

    #[test]
    fn svg_is_deterministic_and_well_formed() {
        let line = LineSpec::new(0.0, 1.0, 0.0).unwrap();
        let nodes = vec![
            Node::terminal(Point::at(0.0, 2.0)),
            Node::terminal(Point::at(3.0, 1.0)),
            Node::line_node(),
        ];
        let graph = SteinerGraph::new(nodes, &[(0, 2), (1, 2)], Some(&line)).unwrap();
        let a = render_svg(&graph, Some(&line));
        let b = render_svg(&graph, Some(&line));
        assert_eq!(a, b);
        assert!(a.starts_with("<svg "));
        assert!(a.trim_end().ends_with("</svg>"));
        assert_eq!(a.matches("<circle").count(), 2);
        // Two tree edges plus the line chord.
        assert_eq!(a.matches("<line ").count(), 3);
    }
}
