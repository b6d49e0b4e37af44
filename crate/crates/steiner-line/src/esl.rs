//! Free-line solver: when the line itself is an optimization variable, some
//! optimal line passes through two terminals (any optimal tree stays optimal
//! while the line translates or rotates until it hits two of them, since the
//! line is free and only the tethers pay). So the search space is the
//! O(n^2) candidate lines through terminal pairs, each solved as a
//! fixed-line instance.

use rayon::prelude::*;
use thiserror::Error;

use crate::esfl::{solve_esfl_mst, solve_esfl_ptas, EsflConfig, EsflError, EsflSolution};
use crate::geometry::{GeometryError, Instance, LineSpec};

#[derive(Debug, Error)]
pub enum EslError {
    #[error("empty instance")]
    EmptyInstance,
    #[error(transparent)]
    Esfl(#[from] EsflError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// How each candidate line is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerSolver {
    /// Discretize/solve/contract pipeline at the caller's epsilon.
    Ptas,
    /// Spanning-tree baseline (fast, coarser).
    Mst,
}

#[derive(Debug, Clone)]
pub struct EslSolution {
    /// The winning line.
    pub line: LineSpec,
    /// Indices of the terminal pair that defines the winning line, if the
    /// instance has at least two terminals.
    pub defining_pair: Option<(usize, usize)>,
    /// Fixed-line solution for the winning line.
    pub esfl: EsflSolution,
}

/// All distinct lines through pairs of terminals, each tagged with the
/// lexicographically smallest pair that spans it. Collinear terminal sets
/// collapse to a single candidate.
pub fn candidate_lines(inst: &Instance) -> Vec<(LineSpec, (usize, usize))> {
    let pts = &inst.terminals;
    let mut out: Vec<(LineSpec, (usize, usize))> = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let Ok(line) = LineSpec::through_points(pts[i], pts[j]) else {
                continue;
            };
            if !out.iter().any(|(kept, _)| kept.approx_eq(&line, 1e-9)) {
                out.push((line, (i, j)));
            }
        }
    }
    out
}

/// Solve the free-line problem: try every candidate line, keep the cheapest.
/// Candidates are scored in parallel; ties break to the line with the
/// lexicographically smallest normalized coefficients so reruns agree.
pub fn solve_esl(
    inst: &Instance,
    epsilon: f64,
    cfg: &EsflConfig,
    inner: InnerSolver,
) -> Result<EslSolution, EslError> {
    if inst.terminals.is_empty() {
        return Err(EslError::EmptyInstance);
    }
    if inst.terminals.len() == 1 {
        // Any line through the single terminal is optimal at cost zero.
        let p = inst.terminals[0];
        let line = LineSpec::new(0.0, 1.0, p.y)?;
        let pinned = Instance::new(inst.terminals.clone(), Some(line))?;
        let esfl = run_inner(&pinned, epsilon, cfg, inner)?;
        return Ok(EslSolution {
            line,
            defining_pair: None,
            esfl,
        });
    }
    let candidates = candidate_lines(inst);
    let scored: Result<Vec<(f64, usize)>, EslError> = candidates
        .par_iter()
        .enumerate()
        .map(|(idx, (line, _))| {
            let pinned = Instance::new(inst.terminals.clone(), Some(*line))?;
            let sol = run_inner(&pinned, epsilon, cfg, inner)?;
            Ok((sol.cost, idx))
        })
        .collect();
    let scored = scored?;
    let mut best: Option<(f64, usize)> = None;
    for &(cost, idx) in &scored {
        let better = match best {
            None => true,
            Some((bc, bi)) => {
                let key = |i: usize| {
                    let l = &candidates[i].0;
                    (l.a(), l.b(), l.c())
                };
                cost < bc - 1e-12 || (cost < bc + 1e-12 && key(idx) < key(bi))
            }
        };
        if better {
            best = Some((cost, idx));
        }
    }
    let (_, best_idx) = best.expect("at least one candidate line");
    let (line, pair) = candidates[best_idx];
    let pinned = Instance::new(inst.terminals.clone(), Some(line))?;
    let esfl = run_inner(&pinned, epsilon, cfg, inner)?;
    Ok(EslSolution {
        line,
        defining_pair: Some(pair),
        esfl,
    })
}

fn run_inner(
    pinned: &Instance,
    epsilon: f64,
    cfg: &EsflConfig,
    inner: InnerSolver,
) -> Result<EsflSolution, EsflError> {
    match inner {
        InnerSolver::Ptas => solve_esfl_ptas(pinned, epsilon, cfg),
        InnerSolver::Mst => solve_esfl_mst(pinned),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn inst(pts: &[(f64, f64)]) -> Instance {
        let terminals = pts.iter().map(|&(x, y)| Point::at(x, y)).collect();
        Instance::new(terminals, None).unwrap()
    }

    #[test]
    fn two_terminals_ride_the_line_for_free() {
        let sol = solve_esl(
            &inst(&[(0.0, 0.0), (3.0, 4.0)]),
            0.5,
            &EsflConfig::default(),
            InnerSolver::Ptas,
        )
        .unwrap();
        assert!(sol.esfl.cost.abs() < 1e-9);
        assert_eq!(sol.defining_pair, Some((0, 1)));
        let want = LineSpec::through_points(Point::at(0.0, 0.0), Point::at(3.0, 4.0)).unwrap();
        assert!(sol.line.approx_eq(&want, 1e-9));
    }

    #[test]
    fn equilateral_triangle_pays_one_height() {
        // Optimal line carries one side; the apex drops a perpendicular of
        // length sqrt(3)/2.
        let h = 3.0_f64.sqrt() / 2.0;
        let sol = solve_esl(
            &inst(&[(0.0, 0.0), (1.0, 0.0), (0.5, h)]),
            0.25,
            &EsflConfig::default(),
            InnerSolver::Ptas,
        )
        .unwrap();
        assert!((sol.esfl.cost - h).abs() < 1e-6, "cost {}", sol.esfl.cost);
    }

    #[test]
    fn collinear_terminals_collapse_to_one_candidate() {
        let i = inst(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0), (5.0, 5.0)]);
        let cands = candidate_lines(&i);
        assert_eq!(cands.len(), 1);
        assert_eq!(cands[0].1, (0, 1));
        let sol = solve_esl(&i, 0.5, &EsflConfig::default(), InnerSolver::Ptas).unwrap();
        assert!(sol.esfl.cost.abs() < 1e-9);
    }

    #[test]
    fn single_terminal_gets_a_horizontal_line() {
        let sol = solve_esl(
            &inst(&[(2.0, 7.0)]),
            0.5,
            &EsflConfig::default(),
            InnerSolver::Ptas,
        )
        .unwrap();
        assert!(sol.esfl.cost.abs() < 1e-12);
        assert_eq!(sol.defining_pair, None);
        assert!(sol
            .line
            .approx_eq(&LineSpec::new(0.0, 1.0, 7.0).unwrap(), 1e-12));
    }

    #[test]
    fn pipeline_beats_or_matches_the_spanning_baseline() {
        let i = inst(&[(0.0, 0.0), (4.0, 0.1), (2.0, 3.0), (1.0, -2.0)]);
        let ptas = solve_esl(&i, 0.5, &EsflConfig::default(), InnerSolver::Ptas).unwrap();
        let mst = solve_esl(&i, 0.5, &EsflConfig::default(), InnerSolver::Mst).unwrap();
        assert!(ptas.esfl.cost <= mst.esfl.cost + 1e-9);
    }

    #[test]
    fn reruns_agree_exactly() {
        let i = inst(&[(0.0, 0.0), (3.0, 1.0), (1.5, 2.5), (2.0, -1.0)]);
        let a = solve_esl(&i, 0.5, &EsflConfig::default(), InnerSolver::Ptas).unwrap();
        let b = solve_esl(&i, 0.5, &EsflConfig::default(), InnerSolver::Ptas).unwrap();
        assert_eq!(a.esfl.cost.to_bits(), b.esfl.cost.to_bits());
        assert_eq!(a.defining_pair, b.defining_pair);
        assert!(a.line.approx_eq(&b.line, 0.0));
    }
}
