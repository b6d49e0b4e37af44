//! Splitting a one-sided instance into independently solvable pieces.
//!
//! In the canonical frame (line on y = 0, terminals at y >= 0, sorted by x)
//! an optimal line-rooted tree never routes a connection between two
//! terminal groups whose 30-degree shadows on the line do not overlap: any
//! subtree hanging from the line stays within the wedge of slope 30 degrees
//! over its terminals, so it spans line abscissas within [x - sqrt(3) y,
//! x + sqrt(3) y] of each terminal it serves. Whenever the prefix maximum of
//! x + sqrt(3) y stays strictly below the suffix minimum of x - sqrt(3) y,
//! the instance splits there and the pieces can be solved separately.

use crate::geometry::Point;

/// 1 + 2 sqrt(3), the width-to-optimum factor of one-sided line-rooted
/// instances that do not split: the tree's 30-degree shadow covers the whole
/// width, and a shadow of length w needs tree length at least w / (1 + 2
/// sqrt(3)).
pub fn width_bound_factor() -> f64 {
    1.0 + 2.0 * 3.0_f64.sqrt()
}

/// Split canonical one-sided terminals (sorted by x) into maximal
/// independent pieces. Concatenating the pieces restores the input;
/// splitting a piece again returns it unchanged.
pub fn decompose(terminals: &[Point]) -> Vec<Vec<Point>> {
    let n = terminals.len();
    if n == 0 {
        return Vec::new();
    }
    debug_assert!(
        terminals.windows(2).all(|w| w[0].x <= w[1].x),
        "decompose expects terminals sorted by x"
    );
    let root3 = 3.0_f64.sqrt();
    let mut suffix_min = vec![0.0f64; n];
    let mut running = f64::INFINITY;
    for i in (0..n).rev() {
        running = running.min(terminals[i].x - root3 * terminals[i].y);
        suffix_min[i] = running;
    }
    let mut pieces = Vec::new();
    let mut start = 0usize;
    let mut prefix_max = f64::NEG_INFINITY;
    for i in 0..n {
        prefix_max = prefix_max.max(terminals[i].x + root3 * terminals[i].y);
        if i + 1 < n && prefix_max < suffix_min[i + 1] {
            pieces.push(terminals[start..=i].to_vec());
            start = i + 1;
        }
    }
    pieces.push(terminals[start..].to_vec());
    pieces
}

/// Lower bound on the optimal cost of one canonical piece: every terminal
/// needs a path to the line (so the cost is at least the largest height) and
/// the piece's width is covered by the tree's 30-degree shadow (so the cost
/// is at least width / (1 + 2 sqrt(3))).
pub fn lower_bound(piece: &[Point]) -> f64 {
    if piece.is_empty() {
        return 0.0;
    }
    let mut min_x = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut max_y: f64 = 0.0;
    for p in piece {
        min_x = min_x.min(p.x);
        max_x = max_x.max(p.x);
        max_y = max_y.max(p.y.abs());
    }
    ((max_x - min_x) / width_bound_factor()).max(max_y)
}
