//! Independent brute-force reference solvers for small instances.
//!
//! These deliberately share no machinery with the approximation pipeline
//! beyond the fixed-topology optimizer: optimal solutions are found by
//! exhausting combinatorial structure instead of discretizing, so the two
//! paths can cross-check each other.
//!
//! For the fixed-line problem the structure is: each tree of an optimal
//! solution serves terminals from one side only, touches the line exactly
//! once (touching twice would close a cycle through the free line), and the
//! on-line terminals cost nothing. So the optimum over one side is the best
//! set partition of its terminals where each group pays the optimal Steiner
//! tree over the group plus one attachment point on the line, minimized over
//! the attachment's position. That inner minimum is convex in the attachment
//! coordinate (partial minimization of a jointly convex function), so golden
//! section search per topology is exact; clipping x onto the group's x range
//! is a 1-Lipschitz map fixing the terminals, so the optimal attachment lies
//! within that range and the search interval is rigorous.

use thiserror::Error;

use crate::est::{enumerate_full_topologies, optimize_topology, EstConfig, EstError};
use crate::geometry::{
    canonicalize, GeometryError, Instance, LineSpec, NodeKind, Point, SteinerGraph,
};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("empty instance")]
    EmptyInstance,
    #[error("oracle limited to {limit} terminals, got {n}")]
    TooLarge { n: usize, limit: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Est(#[from] EstError),
}

/// Largest instance `solve_esfl_exact` accepts.
pub const ESFL_EXACT_LIMIT: usize = 6;
/// Largest instance `solve_esl_exact` accepts.
pub const ESL_EXACT_LIMIT: usize = 5;

/// Exact optimum cost for the fixed-line problem, by exhausting side
/// partitions and attachment positions.
pub fn solve_esfl_exact(inst: &Instance, est_cfg: &EstConfig) -> Result<f64, OracleError> {
    let n = inst.terminals.len();
    if n == 0 {
        return Err(OracleError::EmptyInstance);
    }
    if n > ESFL_EXACT_LIMIT {
        return Err(OracleError::TooLarge {
            n,
            limit: ESFL_EXACT_LIMIT,
        });
    }
    let canon = canonicalize(inst)?;
    let mut total = 0.0;
    for pts in [&canon.above, &canon.below] {
        total += side_cost(pts, est_cfg)?;
    }
    Ok(total)
}

/// Exact optimum for the free-line problem: the best line passes through two
/// terminals, so minimize the fixed-line optimum over all terminal pairs.
/// Returns the cost and a witnessing line. Ties prefer the lexicographically
/// smallest line coefficients.
pub fn solve_esl_exact(
    inst: &Instance,
    est_cfg: &EstConfig,
) -> Result<(f64, LineSpec), OracleError> {
    let n = inst.terminals.len();
    if n == 0 {
        return Err(OracleError::EmptyInstance);
    }
    if n > ESL_EXACT_LIMIT {
        return Err(OracleError::TooLarge {
            n,
            limit: ESL_EXACT_LIMIT,
        });
    }
    if n == 1 {
        let p = inst.terminals[0];
        let line = LineSpec::through_points(p, Point::at(p.x + 1.0, p.y))?;
        return Ok((0.0, line));
    }
    let mut best: Option<(f64, LineSpec)> = None;
    for i in 0..n {
        for j in (i + 1)..n {
            let line = LineSpec::through_points(inst.terminals[i], inst.terminals[j])?;
            let cand = Instance {
                terminals: inst.terminals.clone(),
                line: Some(line),
            };
            let cost = solve_esfl_exact(&cand, est_cfg)?;
            let better = match &best {
                None => true,
                Some((bc, bl)) => {
                    cost < *bc
                        || (cost == *bc
                            && (line.a(), line.b(), line.c()) < (bl.a(), bl.b(), bl.c()))
                }
            };
            if better {
                best = Some((cost, line));
            }
        }
    }
    Ok(best.expect("at least one terminal pair"))
}

/// Optimal cost of one side: minimum over set partitions, with each group
/// paying its optimal single-attachment Steiner tree. Group costs are shared
/// across partitions through a subset DP.
fn side_cost(points: &[Point], est_cfg: &EstConfig) -> Result<f64, OracleError> {
    let k = points.len();
    if k == 0 {
        return Ok(0.0);
    }
    let full = 1usize << k;
    let mut gcost = vec![f64::INFINITY; full];
    for mask in 1..full {
        let group: Vec<Point> = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| points[i]).collect();
        gcost[mask] = group_cost(&group, est_cfg)?.0;
    }
    let mut part = vec![f64::INFINITY; full];
    part[0] = 0.0;
    for mask in 1..full {
        // The group containing the lowest terminal is enough to enumerate
        // every partition once.
        let low = mask & mask.wrapping_neg();
        let mut sub = mask;
        while sub > 0 {
            if sub & low != 0 {
                let rest = part[mask ^ sub];
                if gcost[sub] + rest < part[mask] {
                    part[mask] = gcost[sub] + rest;
                }
            }
            sub = (sub - 1) & mask;
        }
    }
    Ok(part[full - 1])
}

/// Optimal cost and attachment abscissa for one group: the Steiner tree over
/// the group plus one line point `(x, 0)`, minimized over `x`.
fn group_cost(group: &[Point], est_cfg: &EstConfig) -> Result<(f64, f64), OracleError> {
    debug_assert!(!group.is_empty() && group.iter().all(|p| p.y > 0.0));
    if group.len() == 1 {
        // A lone terminal drops a perpendicular.
        return Ok((group[0].y, group[0].x));
    }
    let lo = group.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    let hi = group.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
    let mut terms: Vec<Point> = group.to_vec();
    terms.push(Point::at(lo, 0.0));
    let attach_idx = terms.len() - 1;

    let mut best_cost = f64::INFINITY;
    let mut best_x = lo;
    for topo in enumerate_full_topologies(terms.len()) {
        let mut eval = |x: f64| -> Result<f64, OracleError> {
            terms[attach_idx] = Point::at(x, 0.0);
            Ok(optimize_topology(&terms, &topo, est_cfg)?.cost)
        };
        if hi - lo <= 0.0 {
            let c = eval(lo)?;
            if c < best_cost {
                best_cost = c;
                best_x = lo;
            }
            continue;
        }
        // Five equispaced probes. The cost is 1-Lipschitz in x (moving the
        // attachment by delta changes one edge by at most delta), so the
        // true per-topology minimum is at least the probe minimum minus half
        // the probe gap; skip topologies that cannot beat the current best.
        let gap = (hi - lo) / 4.0;
        let mut probe_best = (f64::INFINITY, 0usize);
        let mut probes = [0.0; 5];
        for (i, slot) in probes.iter_mut().enumerate() {
            let x = lo + gap * i as f64;
            *slot = x;
            let c = eval(x)?;
            if c < probe_best.0 {
                probe_best = (c, i);
            }
        }
        if probe_best.0 - gap / 2.0 > best_cost + 1e-12 {
            continue;
        }
        // Convexity puts the minimum between the probes flanking the best
        // one; golden section pins it down.
        let bl = probes[probe_best.1.saturating_sub(1)];
        let bh = probes[(probe_best.1 + 1).min(4)];
        let (c, x) = golden_min(&mut eval, bl, bh, 48)?;
        let (c, x) = if probe_best.0 < c {
            (probe_best.0, probes[probe_best.1])
        } else {
            (c, x)
        };
        if c < best_cost {
            best_cost = c;
            best_x = x;
        }
    }
    Ok((best_cost, best_x))
}

/// Golden section minimization of a convex function on `[lo, hi]`.
fn golden_min(
    f: &mut impl FnMut(f64) -> Result<f64, OracleError>,
    mut lo: f64,
    mut hi: f64,
    iters: usize,
) -> Result<(f64, f64), OracleError> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    let xm = 0.5 * (lo + hi);
    let fm = f(xm)?;
    Ok(if f1 <= f2 && f1 < fm {
        (f1, x1)
    } else if f2 < fm {
        (f2, x2)
    } else {
        (fm, xm)
    })
}

/// Count edges that descend onto the line: edges with exactly one endpoint
/// off the line (the other endpoint being the line node or an on-line
/// point). Structural check for reduction instances.
pub fn count_downward_edges(graph: &SteinerGraph, line: &LineSpec) -> usize {
    let mut scale: f64 = 1.0;
    for node in graph.nodes() {
        if let Some(p) = node.pos {
            scale = scale.max(p.x.abs()).max(p.y.abs());
        }
    }
    let tol = 1e-9 * scale;
    let on_line = |id: usize| -> bool {
        let node = &graph.nodes()[id];
        match node.pos {
            None => node.kind == NodeKind::LineNode,
            Some(p) => line.signed_offset(p).abs() <= tol,
        }
    };
    graph
        .edges()
        .iter()
        .filter(|e| on_line(e.u) != on_line(e.v))
        .count()
}
