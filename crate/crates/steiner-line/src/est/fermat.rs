//! Fermat points and geometric medians of small point sets.

use crate::geometry::Point;

/// Sum of distances from `x` to each point.
pub fn star_cost(x: Point, pts: &[Point]) -> f64 {
    pts.iter().map(|p| x.dist(*p)).sum()
}

/// Point minimizing the sum of distances to three points. When some pair of
/// sides meets at 120 degrees or more the minimizer is that vertex; otherwise
/// it is the interior point seeing all three sides under 120 degrees,
/// constructed by intersecting two Simpson lines.
pub fn fermat_point(a: Point, b: Point, c: Point) -> Point {
    let ab = a.dist(b);
    let bc = b.dist(c);
    let ca = c.dist(a);
    // Coincident pairs: the duplicated point wins (2|x-p| + |x-q| is
    // minimized at p).
    if ab == 0.0 {
        return a;
    }
    if bc == 0.0 {
        return b;
    }
    if ca == 0.0 {
        return c;
    }
    // Angle at a vertex >= 120 degrees: that vertex is the minimizer.
    let cos_a = ((b.x - a.x) * (c.x - a.x) + (b.y - a.y) * (c.y - a.y)) / (ab * ca);
    if cos_a <= -0.5 {
        return a;
    }
    let cos_b = ((a.x - b.x) * (c.x - b.x) + (a.y - b.y) * (c.y - b.y)) / (ab * bc);
    if cos_b <= -0.5 {
        return b;
    }
    let cos_c = ((a.x - c.x) * (b.x - c.x) + (a.y - c.y) * (b.y - c.y)) / (ca * bc);
    if cos_c <= -0.5 {
        return c;
    }
    let apex_a = equilateral_apex(b, c, a);
    let apex_b = equilateral_apex(a, c, b);
    match line_intersection(a, apex_a, b, apex_b) {
        Some(p) => p,
        None => weiszfeld(&[a, b, c], centroid(&[a, b, c])),
    }
}

/// Apex of the equilateral triangle erected on `pq`, on the side away from
/// `far`.
fn equilateral_apex(p: Point, q: Point, far: Point) -> Point {
    let mx = 0.5 * (p.x + q.x);
    let my = 0.5 * (p.y + q.y);
    let h = 3.0_f64.sqrt() / 2.0;
    // Perpendicular to pq, scaled to the apex height.
    let px = -(q.y - p.y) * h;
    let py = (q.x - p.x) * h;
    let toward_far = (far.x - mx) * px + (far.y - my) * py;
    if toward_far > 0.0 {
        Point::at(mx - px, my - py)
    } else {
        Point::at(mx + px, my + py)
    }
}

fn line_intersection(a0: Point, a1: Point, b0: Point, b1: Point) -> Option<Point> {
    let (dax, day) = (a1.x - a0.x, a1.y - a0.y);
    let (dbx, dby) = (b1.x - b0.x, b1.y - b0.y);
    let det = dax * dby - day * dbx;
    let scale = (dax.abs() + day.abs()) * (dbx.abs() + dby.abs());
    if det.abs() <= 1e-14 * scale {
        return None;
    }
    let t = ((b0.x - a0.x) * dby - (b0.y - a0.y) * dbx) / det;
    Some(Point::at(a0.x + t * dax, a0.y + t * day))
}

fn centroid(pts: &[Point]) -> Point {
    let n = pts.len() as f64;
    Point::at(
        pts.iter().map(|p| p.x).sum::<f64>() / n,
        pts.iter().map(|p| p.y).sum::<f64>() / n,
    )
}

/// Geometric median of a small point set. Checks the vertex optimality
/// condition first, then runs Weiszfeld iterations. For three points the
/// closed-form Fermat construction is used instead.
pub fn geometric_median(pts: &[Point]) -> Point {
    match pts.len() {
        0 => panic!("geometric median of empty set"),
        1 => pts[0],
        2 => pts[0], // any point of the segment; an endpoint keeps costs equal
        3 => fermat_point(pts[0], pts[1], pts[2]),
        _ => {
            for (i, &p) in pts.iter().enumerate() {
                if vertex_is_median(p, i, pts) {
                    return p;
                }
            }
            weiszfeld(pts, centroid(pts))
        }
    }
}

/// A vertex is the median iff the resultant of unit vectors toward the other
/// points has norm at most 1.
fn vertex_is_median(p: Point, skip: usize, pts: &[Point]) -> bool {
    let (mut rx, mut ry) = (0.0, 0.0);
    for (j, q) in pts.iter().enumerate() {
        if j == skip {
            continue;
        }
        let d = p.dist(*q);
        if d == 0.0 {
            // Coincident pair doubles the pull floor; treat as non-vertex and
            // let Weiszfeld sort it out.
            return false;
        }
        rx += (q.x - p.x) / d;
        ry += (q.y - p.y) / d;
    }
    rx.hypot(ry) <= 1.0
}

fn weiszfeld(pts: &[Point], init: Point) -> Point {
    let mut scale: f64 = 0.0;
    for p in pts {
        for q in pts {
            scale = scale.max(p.dist(*q));
        }
    }
    if scale == 0.0 {
        return pts[0];
    }
    let mut x = init;
    for _ in 0..200 {
        let (mut sx, mut sy, mut sw) = (0.0, 0.0, 0.0);
        for p in pts {
            let d = x.dist(*p).max(1e-15 * scale);
            let w = 1.0 / d;
            sx += p.x * w;
            sy += p.y * w;
            sw += w;
        }
        let next = Point::at(sx / sw, sy / sw);
        let step = x.dist(next);
        x = next;
        if step < 1e-14 * scale {
            break;
        }
    }
    x
}
