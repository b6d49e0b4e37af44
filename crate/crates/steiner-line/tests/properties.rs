//! Randomized invariant checks. Case counts are kept modest because the
//! exact solver sits inside several properties.

mod common;

use common::horizontal_axis;
use proptest::prelude::*;
use steiner_line::esfl::{decompose, lower_bound, solve_esfl_mst, solve_esfl_ptas, EsflConfig};
use steiner_line::est::EstConfig;
use steiner_line::geometry::{canonicalize, Side};
use steiner_line::oracles::solve_esfl_exact;
use steiner_line::{Instance, LineSpec, Point};

fn coord() -> impl Strategy<Value = f64> {
    (-100i32..=100).prop_map(|v| v as f64 / 10.0)
}

fn point() -> impl Strategy<Value = Point> {
    (coord(), coord()).prop_map(|(x, y)| Point::new(x, y).unwrap())
}

fn points(min: usize, max: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec(point(), min..=max)
}

fn line() -> impl Strategy<Value = LineSpec> {
    (coord(), coord(), coord())
        .prop_filter("degenerate normal", |(a, b, _)| a.hypot(*b) > 1e-3)
        .prop_map(|(a, b, c)| LineSpec::new(a, b, c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn line_param_and_offset_roundtrip(l in line(), t in -50.0..50.0f64) {
        let p = l.point_at(t);
        prop_assert!((l.param_of(p) - t).abs() <= 1e-9 * (1.0 + t.abs()));
        prop_assert!(l.signed_offset(p).abs() <= 1e-9 * (1.0 + t.abs()));
        prop_assert!(p.dist(l.foot_of(p)) <= 1e-9 * (1.0 + t.abs()));
    }

    #[test]
    fn canonical_frame_roundtrips(pts in points(1, 6), l in line()) {
        let inst = Instance::new(pts.clone(), Some(l)).unwrap();
        let canon = canonicalize(&inst).unwrap();
        prop_assert_eq!(
            canon.above.len() + canon.below.len() + canon.on_line.len(),
            pts.len()
        );
        for p in &pts {
            let c = canon.transform.to_canonical(*p);
            let back = canon.transform.to_original(c);
            prop_assert!(back.dist(*p) <= 1e-9 * (1.0 + p.x.abs() + p.y.abs()));
            // The canonical frame puts the line on the x axis.
            prop_assert!((c.y.abs() - steiner_line::geometry::point_line_distance(*p, &l)).abs() <= 1e-7);
        }
        for q in &canon.above {
            prop_assert!(q.y > 0.0);
            let orig = canon.restore(*q, Side::Above);
            prop_assert!(pts.iter().any(|p| p.dist(orig) <= 1e-7));
        }
        for q in &canon.below {
            prop_assert!(q.y > 0.0);
            let orig = canon.restore(*q, Side::Below);
            prop_assert!(pts.iter().any(|p| p.dist(orig) <= 1e-7));
        }
    }

    #[test]
    fn decompose_partitions_and_is_idempotent(pts in points(1, 12)) {
        let mut canon: Vec<Point> = pts.iter().map(|p| Point::new(p.x, p.y.abs()).unwrap()).collect();
        canon.sort_by(|p, q| p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)));
        let pieces = decompose(&canon);
        prop_assert!(!pieces.iter().any(Vec::is_empty));
        let mut rebuilt: Vec<Point> = pieces.iter().flatten().copied().collect();
        rebuilt.sort_by(|p, q| p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)));
        prop_assert_eq!(rebuilt.len(), canon.len());
        for (a, b) in rebuilt.iter().zip(&canon) {
            prop_assert!(a.dist(*b) == 0.0);
        }
        for piece in &pieces {
            prop_assert_eq!(decompose(piece).len(), 1);
        }
    }

    #[test]
    fn spanning_tree_never_beats_exact(pts in points(2, 5)) {
        let cfg = EstConfig::default();
        let exact = steiner_line::est::solve_exact(&pts, &cfg).unwrap();
        let mst = steiner_line::est::solve_mst(&pts).unwrap();
        prop_assert!(exact.cost <= mst.cost + 1e-9);
        prop_assert!(mst.cost <= exact.cost * 2.0 / 3.0_f64.sqrt() + 1e-9);
    }

    #[test]
    fn exact_cost_is_rigid_motion_invariant(pts in points(2, 4), dx in coord(), dy in coord(), k in 0u8..4) {
        let cfg = EstConfig::default();
        let base = steiner_line::est::solve_exact(&pts, &cfg).unwrap().cost;
        let angle = f64::from(k) * std::f64::consts::FRAC_PI_2 / 3.0;
        let (s, c) = angle.sin_cos();
        let moved: Vec<Point> = pts
            .iter()
            .map(|p| Point::new(c * p.x - s * p.y + dx, s * p.x + c * p.y + dy).unwrap())
            .collect();
        let turned = steiner_line::est::solve_exact(&moved, &cfg).unwrap().cost;
        prop_assert!((base - turned).abs() <= 1e-6 * (1.0 + base));
    }

    #[test]
    fn pipeline_respects_lower_bound_and_oracle(pts in points(1, 4)) {
        let inst = Instance::new(pts, Some(horizontal_axis())).unwrap();
        let cfg = EsflConfig::default();
        let est_cfg = EstConfig::default();
        let sol = solve_esfl_ptas(&inst, 0.5, &cfg).unwrap();
        sol.graph.validate(Some(inst.require_line().unwrap())).unwrap();
        prop_assert!(sol.cost >= sol.lower_bound * (1.0 - 1e-9) - 1e-12);
        let exact = solve_esfl_exact(&inst, &est_cfg).unwrap();
        prop_assert!(sol.cost <= exact * 1.5 + 1e-6);
        prop_assert!(sol.cost >= exact - 1e-9);
        let baseline = solve_esfl_mst(&inst).unwrap();
        prop_assert!(baseline.cost >= exact - 1e-9);
        for fill in &sol.stats.fill {
            prop_assert!(fill.weight_after <= fill.weight_before * (1.0 + 1e-9) + 1e-12);
        }
    }

    #[test]
    fn lower_bound_stays_below_optimum(pts in points(1, 4)) {
        let canon: Vec<Point> = {
            let mut v: Vec<Point> = pts.iter().map(|p| Point::new(p.x, p.y.abs()).unwrap()).collect();
            v.sort_by(|p, q| p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)));
            v
        };
        let inst = Instance::new(canon.clone(), Some(horizontal_axis())).unwrap();
        let exact = solve_esfl_exact(&inst, &EstConfig::default()).unwrap();
        prop_assert!(lower_bound(&canon) <= exact * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn candidate_lines_are_distinct_and_hit_pairs(pts in points(2, 8)) {
        let inst = Instance::new(pts.clone(), None).unwrap();
        let cands = steiner_line::esl::candidate_lines(&inst);
        for (i, (li, (a, b))) in cands.iter().enumerate() {
            prop_assert!(li.signed_offset(pts[*a]).abs() <= 1e-7);
            prop_assert!(li.signed_offset(pts[*b]).abs() <= 1e-7);
            for (lj, _) in &cands[i + 1..] {
                prop_assert!(!li.approx_eq(lj, 1e-9));
            }
        }
    }

    #[test]
    fn free_line_cost_is_translation_invariant(pts in points(1, 3), dx in coord(), dy in coord()) {
        let cfg = EsflConfig::default();
        let base = steiner_line::esl::solve_esl(
            &Instance::new(pts.clone(), None).unwrap(),
            1.0,
            &cfg,
            steiner_line::esl::InnerSolver::Mst,
        )
        .unwrap();
        let moved: Vec<Point> = pts
            .iter()
            .map(|p| Point::new(p.x + dx, p.y + dy).unwrap())
            .collect();
        let shifted = steiner_line::esl::solve_esl(
            &Instance::new(moved, None).unwrap(),
            1.0,
            &cfg,
            steiner_line::esl::InnerSolver::Mst,
        )
        .unwrap();
        prop_assert!((base.esfl.cost - shifted.esfl.cost).abs() <= 1e-6 * (1.0 + base.esfl.cost));
    }
}
