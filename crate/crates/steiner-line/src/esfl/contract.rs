//! Line contraction: fold the line points of a filled tree into the single
//! zero-cost line node, discarding everything that runs along the line.
//!
//! Edges between two line points vanish (they cost nothing once the line is
//! free), and every edge from an off-line node to a line point becomes an
//! edge to the line node. Where the tree touched the line several times the
//! contraction creates parallel connections; a deterministic Kruskal pass
//! keeps the cheapest spanning subset. Finally, Steiner points that lost
//! their purpose (degree below 3) are cleaned up.
//!
//! With `snap` on (the default), surviving line attachments are re-priced at
//! the perpendicular distance of their off-line endpoint and re-attached at
//! its foot, which never increases the cost. With `snap` off the original
//! attachment points and lengths are kept verbatim, at the price of leaving
//! degree-2 Steiner points next to the line node in place.

use super::EsflError;
use crate::geometry::{
    Attachment, DisjointSet, Edge, LineSpec, Node, NodeKind, Point, SteinerGraph,
};

#[derive(Debug, Clone)]
pub struct ContractOutcome {
    /// Canonical-frame tree over terminals, Steiner points, and the line
    /// node (last node id).
    pub graph: SteinerGraph,
    /// One entry per line-node edge, giving its attachment parameter on the
    /// line (equal to the x coordinate in the canonical frame).
    pub attachments: Vec<Attachment>,
    /// Weight released by contraction: input cost minus output cost.
    pub w_prime: f64,
}

/// Working edge: endpoints in contracted id space (`gamma` is the largest
/// id), the carried length, and for line edges the attachment parameter.
#[derive(Debug, Clone, Copy)]
struct CEdge {
    u: usize,
    v: usize,
    len: f64,
    attach: Option<f64>,
}

pub fn contract_line(t: &SteinerGraph, snap: bool) -> Result<ContractOutcome, EsflError> {
    let nodes = t.nodes();
    let mut new_id = vec![usize::MAX; nodes.len()];
    let mut kept: Vec<Node> = Vec::new();
    for (i, n) in nodes.iter().enumerate() {
        match n.kind {
            NodeKind::Terminal | NodeKind::Steiner => {
                new_id[i] = kept.len();
                kept.push(*n);
            }
            NodeKind::LinePoint => {}
            NodeKind::LineNode => return Err(EsflError::UnexpectedLineNode),
        }
    }
    let gamma = kept.len();

    let mut cands: Vec<CEdge> = Vec::new();
    for e in t.edges() {
        let u_line = nodes[e.u].kind == NodeKind::LinePoint;
        let v_line = nodes[e.v].kind == NodeKind::LinePoint;
        match (u_line, v_line) {
            (true, true) => {}
            (false, true) | (true, false) => {
                let (off, on) = if v_line { (e.u, e.v) } else { (e.v, e.u) };
                cands.push(CEdge {
                    u: new_id[off],
                    v: gamma,
                    len: e.len,
                    attach: Some(nodes[on].pos.expect("line points are positioned").x),
                });
            }
            (false, false) => {
                let (a, b) = (new_id[e.u], new_id[e.v]);
                cands.push(CEdge {
                    u: a.min(b),
                    v: a.max(b),
                    len: e.len,
                    attach: None,
                });
            }
        }
    }
    // Deterministic Kruskal: cheapest first, ties by endpoint ids, then by
    // attachment parameter.
    cands.sort_by(|x, y| {
        x.len
            .total_cmp(&y.len)
            .then(x.u.cmp(&y.u))
            .then(x.v.cmp(&y.v))
            .then(match (x.attach, y.attach) {
                (Some(a), Some(b)) => a.total_cmp(&b),
                _ => std::cmp::Ordering::Equal,
            })
    });
    let mut dsu = DisjointSet::new(gamma + 1);
    let mut edges: Vec<CEdge> = Vec::new();
    for c in cands {
        if dsu.union(c.u, c.v) {
            edges.push(c);
        }
    }

    let mut alive = vec![true; gamma + 1];
    cleanup_steiners(&kept, gamma, &mut alive, &mut edges, snap);

    // Rebuild in compact id space: kept nodes in original order, line node
    // last. Edges sorted by endpoints for a stable output layout.
    let mut remap = vec![usize::MAX; gamma + 1];
    let mut out_nodes = Vec::new();
    for (i, node) in kept.iter().enumerate() {
        if alive[i] {
            remap[i] = out_nodes.len();
            out_nodes.push(*node);
        }
    }
    remap[gamma] = out_nodes.len();
    out_nodes.push(Node::line_node());
    edges.sort_by(|a, b| {
        (remap[a.u], remap[a.v]).cmp(&(remap[b.u], remap[b.v]))
    });

    let mut attachments = Vec::new();
    let graph = if snap {
        let axis = LineSpec::through_points(Point::at(0.0, 0.0), Point::at(1.0, 0.0))
            .expect("axis points are distinct");
        let pairs: Vec<(usize, usize)> = edges.iter().map(|e| (remap[e.u], remap[e.v])).collect();
        for (i, e) in edges.iter().enumerate() {
            if e.v == gamma {
                let foot = kept[e.u].pos.expect("off-line nodes are positioned").x;
                attachments.push(Attachment { edge: i, x: foot });
            }
        }
        SteinerGraph::new(out_nodes, &pairs, Some(&axis)).map_err(EsflError::Graph)?
    } else {
        let mut out_edges = Vec::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            out_edges.push(Edge {
                u: remap[e.u],
                v: remap[e.v],
                len: e.len,
            });
            if let Some(x) = e.attach {
                attachments.push(Attachment { edge: i, x });
            }
        }
        SteinerGraph::from_parts(out_nodes, out_edges).map_err(EsflError::Graph)?
    };
    let w_prime = t.cost() - graph.cost();
    debug_assert!(
        w_prime >= -1e-9 * (1.0 + t.cost()),
        "contraction increased cost: {} -> {}",
        t.cost(),
        graph.cost()
    );
    Ok(ContractOutcome {
        graph,
        attachments,
        w_prime,
    })
}

/// Remove Steiner points of degree 0 or 1 (their edges carry weight without
/// connecting anything new) and, in snap mode, splice out degree-2 Steiner
/// points: two neighbors are rejoined directly, with line-node neighbors
/// re-attached at the perpendicular foot. Repeats until stable.
fn cleanup_steiners(
    kept: &[Node],
    gamma: usize,
    alive: &mut [bool],
    edges: &mut Vec<CEdge>,
    snap: bool,
) {
    loop {
        let mut deg = vec![0usize; gamma + 1];
        for e in edges.iter() {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        let target = (0..gamma).find(|&i| {
            alive[i]
                && kept[i].kind == NodeKind::Steiner
                && (deg[i] < 2 || (snap && deg[i] == 2))
        });
        let s = match target {
            Some(s) => s,
            None => return,
        };
        let incident: Vec<CEdge> = edges.iter().copied().filter(|e| e.u == s || e.v == s).collect();
        edges.retain(|e| e.u != s && e.v != s);
        alive[s] = false;
        if incident.len() == 2 {
            let other = |e: &CEdge| if e.u == s { e.v } else { e.u };
            let (a, b) = (other(&incident[0]), other(&incident[1]));
            debug_assert_ne!(a, b, "parallel edges survived the spanning pass");
            let exists = edges.iter().any(|e| (e.u, e.v) == (a.min(b), a.max(b)));
            if !exists {
                if a == gamma || b == gamma {
                    let o = if a == gamma { b } else { a };
                    let p = kept[o].pos.expect("off-line nodes are positioned");
                    edges.push(CEdge {
                        u: o,
                        v: gamma,
                        len: p.y.abs(),
                        attach: Some(p.x),
                    });
                } else {
                    let (pa, pb) = (
                        kept[a].pos.expect("off-line nodes are positioned"),
                        kept[b].pos.expect("off-line nodes are positioned"),
                    );
                    edges.push(CEdge {
                        u: a.min(b),
                        v: a.max(b),
                        len: pa.dist(pb),
                        attach: None,
                    });
                }
            }
        }
    }
}
