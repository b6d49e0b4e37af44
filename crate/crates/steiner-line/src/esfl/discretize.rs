//! Replacing the free line by a finite set of candidate attachment points.
//!
//! A piece with n terminals and width w gets ceil(n / eps) + 1 equally
//! spaced points on the line between the leftmost and rightmost terminal
//! abscissas. Solving a plain Steiner tree over terminals plus line points
//! and then contracting the line recovers a line-rooted solution whose error
//! is controlled by the spacing d = w / ceil(n / eps).

use crate::geometry::Point;

/// A piece of the canonical instance together with its line discretization.
#[derive(Debug, Clone)]
pub struct DiscretizedInstance {
    /// The piece's terminals (canonical frame, y >= 0).
    pub real_terminals: Vec<Point>,
    /// Candidate attachment points on y = 0, ordered by x.
    pub line_points: Vec<Point>,
    /// Gap between consecutive line points (0 for zero-width pieces).
    pub spacing: f64,
    pub epsilon_used: f64,
}

impl DiscretizedInstance {
    /// Number of consecutive line-point pairs ("slots").
    pub fn total_slots(&self) -> usize {
        self.line_points.len().saturating_sub(1)
    }

    /// Terminals and line points concatenated, the node set of the inner
    /// Steiner tree instance (line points come after the terminals).
    pub fn est_terminals(&self) -> Vec<Point> {
        let mut all = self.real_terminals.clone();
        all.extend_from_slice(&self.line_points);
        all
    }
}

/// Discretize one canonical piece. A zero-width piece (all terminals in one
/// column) gets the single line point under that column; the spacing formula
/// would divide the zero width into ceil(n / eps) empty intervals.
pub fn discretize(piece: &[Point], eps: f64) -> DiscretizedInstance {
    assert!(eps > 0.0, "discretization needs eps > 0");
    assert!(!piece.is_empty(), "discretization needs at least one terminal");
    let min_x = piece.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    let max_x = piece.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
    let width = max_x - min_x;
    if width == 0.0 {
        return DiscretizedInstance {
            real_terminals: piece.to_vec(),
            line_points: vec![Point::at(min_x, 0.0)],
            spacing: 0.0,
            epsilon_used: eps,
        };
    }
    let intervals = (piece.len() as f64 / eps).ceil() as usize;
    let d = width / intervals as f64;
    let line_points = (0..=intervals)
        .map(|i| {
            // Interpolate from both ends so the last point lands exactly on
            // max_x regardless of rounding.
            let t = i as f64 / intervals as f64;
            Point::at(min_x + t * width, 0.0)
        })
        .collect();
    DiscretizedInstance {
        real_terminals: piece.to_vec(),
        line_points,
        spacing: d,
        epsilon_used: eps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_terminals_half_eps() {
        let piece: Vec<Point> = [0.0, 0.5, 1.5, 2.0]
            .iter()
            .map(|&x| Point::at(x, 1.0))
            .collect();
        let disc = discretize(&piece, 0.5);
        assert_eq!(disc.line_points.len(), 9);
        assert!((disc.spacing - 0.25).abs() < 1e-15);
        assert_eq!(disc.total_slots(), 8);
        assert_eq!(disc.line_points[0], Point::at(0.0, 0.0));
        assert_eq!(disc.line_points[8], Point::at(2.0, 0.0));
        for w in disc.line_points.windows(2) {
            assert!(((w[1].x - w[0].x) - disc.spacing).abs() < 1e-12 * disc.spacing.max(1.0));
        }
    }

    #[test]
    fn two_terminals_quarter_eps() {
        let piece = vec![Point::at(3.0, 2.0), Point::at(4.0, 0.5)];
        let disc = discretize(&piece, 0.25);
        assert_eq!(disc.line_points.len(), 9);
        assert!((disc.spacing - 0.125).abs() < 1e-15);
    }

    #[test]
    fn zero_width_column_gets_one_point() {
        let piece = vec![Point::at(7.0, 1.0), Point::at(7.0, 3.0)];
        let disc = discretize(&piece, 1.0);
        assert_eq!(disc.line_points, vec![Point::at(7.0, 0.0)]);
        assert_eq!(disc.spacing, 0.0);
        assert_eq!(disc.total_slots(), 0);
    }

    #[test]
    fn est_terminal_order_is_terminals_then_line() {
        let piece = vec![Point::at(0.0, 1.0), Point::at(1.0, 1.0)];
        let disc = discretize(&piece, 1.0);
        let all = disc.est_terminals();
        assert_eq!(&all[..2], &piece[..]);
        assert_eq!(all.len(), 2 + disc.line_points.len());
    }
}
