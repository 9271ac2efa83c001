use proptest::prelude::*;

use pickwedge::geometry::{directional_reach, AxisBox, BoxUnionDomain, DirectionVec, Point, Reach, RealDomain, Wedge};

fn close(a: Reach, b: Reach, tol: f64) -> bool {
    match (a, b) {
        (Reach::Unbounded, Reach::Unbounded) => true,
        (Reach::Finite(x), Reach::Finite(y)) => (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())),
        _ => false,
    }
}

fn wedge_strategy() -> impl Strategy<Value = Wedge> {
    (-2.0..2.0f64, -2.0..2.0f64, 0.1..3.0f64, 0.05..1.0f64, 0.05..2.0f64).prop_map(|(x, y, delta, m1, gap)| {
        Wedge::new(Point::new(vec![x, y]).unwrap(), delta, m1, m1 + gap).unwrap()
    })
}

/// A point of the wedge: base plus `t` times a direction of slope in the
/// slope interval, with `t` in `[-delta, delta]`.
fn inside_wedge(w: &Wedge, t: f64, a: f64) -> Vec<f64> {
    let m = w.slope_lo() + a * (w.slope_hi() - w.slope_lo());
    let b = w.base().coords();
    vec![b[0] + t * w.half_width(), b[1] + t * w.half_width() * m]
}

fn box_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    prop::collection::vec((-3.0..3.0f64, 0.05..3.0f64), 2).prop_map(|v| {
        let lo: Vec<f64> = v.iter().map(|(a, _)| *a).collect();
        let hi: Vec<f64> = v.iter().map(|(a, w)| a + w).collect();
        (lo, hi)
    })
}

/// A box union with a point inside its first box.
fn union_strategy() -> impl Strategy<Value = (BoxUnionDomain, Point)> {
    (prop::collection::vec(box_strategy(), 1..5), 0.0..1.0f64, 0.0..1.0f64).prop_map(|(boxes, u, v)| {
        let (lo, hi) = &boxes[0];
        let p = vec![lo[0] + u * (hi[0] - lo[0]), lo[1] + v * (hi[1] - lo[1])];
        let boxes = boxes.into_iter().map(|(lo, hi)| AxisBox::new(lo, hi).unwrap()).collect();
        (BoxUnionDomain::new(2, boxes).unwrap(), Point::new(p).unwrap())
    })
}

fn direction() -> impl Strategy<Value = DirectionVec> {
    (-1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("nonzero", |(a, b)| a.abs().max(b.abs()) > 1e-3)
        .prop_map(|(a, b)| DirectionVec::new(vec![a, b]).unwrap())
}

/// Barycentric weights of `q` in the triangle `(a, b, c)`.
fn barycentric(q: [f64; 2], a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> [f64; 3] {
    let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    let l1 = ((q[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (q[1] - a[1])) / det;
    let l2 = ((b[0] - a[0]) * (q[1] - a[1]) - (q[0] - a[0]) * (b[1] - a[1])) / det;
    [1.0 - l1 - l2, l1, l2]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn reach_is_homogeneous_on_wedges(w in wedge_strategy(), t in -0.9..0.9f64, a in 0.0..1.0f64, x in direction(), c in 0.05..20.0f64) {
        let p = Point::new(inside_wedge(&w, t, a)).unwrap();
        let r = directional_reach(&w, &p, &x).unwrap();
        let rc = directional_reach(&w, &p, &x.scaled(c).unwrap()).unwrap();
        prop_assert!(close(rc, r.scaled(1.0 / c), 1e-12), "{rc} vs {r}/{c}");
    }

    #[test]
    fn reach_is_homogeneous_on_boxes((d, p) in union_strategy(), x in direction(), c in 0.05..20.0f64) {
        let r = directional_reach(&d, &p, &x).unwrap();
        let rc = directional_reach(&d, &p, &x.scaled(c).unwrap()).unwrap();
        prop_assert!(close(rc, r.scaled(1.0 / c), 1e-12), "{rc} vs {r}/{c}");
    }

    #[test]
    fn reach_is_symmetric((d, p) in union_strategy(), w in wedge_strategy(), t in -0.9..0.9f64, a in 0.0..1.0f64, x in direction()) {
        prop_assert_eq!(directional_reach(&d, &p, &x).unwrap(), directional_reach(&d, &p, &x.negated()).unwrap());
        let q = Point::new(inside_wedge(&w, t, a)).unwrap();
        prop_assert_eq!(directional_reach(&w, &q, &x).unwrap(), directional_reach(&w, &q, &x.negated()).unwrap());
    }

    #[test]
    fn enlarging_never_shrinks_reach((d, p) in union_strategy(), extra in box_strategy(), margin in 0.0..1.0f64, x in direction()) {
        let r = directional_reach(&d, &p, &x).unwrap();
        let grown = d.enlarged(margin).unwrap();
        prop_assert!(directional_reach(&grown, &p, &x).unwrap() >= r);
        let mut boxes = d.boxes().to_vec();
        boxes.push(AxisBox::new(extra.0, extra.1).unwrap());
        let more = BoxUnionDomain::new(2, boxes).unwrap();
        prop_assert!(directional_reach(&more, &p, &x).unwrap() >= r);
    }

    #[test]
    fn wedge_contains_matches_barycentric_search(w in wedge_strategy(), pts in prop::collection::vec((-1.5..1.5f64, -1.5..1.5f64), 40)) {
        let b = w.base().coords();
        let d = w.half_width();
        let apex = [b[0], b[1]];
        let up = [[b[0] + d, b[1] + d * w.slope_lo()], [b[0] + d, b[1] + d * w.slope_hi()]];
        let down = [[b[0] - d, b[1] - d * w.slope_lo()], [b[0] - d, b[1] - d * w.slope_hi()]];
        for (u, v) in pts {
            // scale the sample box with the wedge so both outcomes occur
            let q = [b[0] + u * d, b[1] + v * d * w.slope_hi()];
            let lam = [barycentric(q, apex, up[0], up[1]), barycentric(q, apex, down[0], down[1])];
            let worst = lam.iter().map(|l| l.iter().copied().fold(f64::INFINITY, f64::min)).fold(f64::NEG_INFINITY, f64::max);
            let inside = w.contains(&q);
            if worst >= 1e-6 {
                prop_assert!(inside, "{q:?} has weights {lam:?}");
            } else if worst < -1e-6 {
                prop_assert!(!inside, "{q:?} has weights {lam:?}");
            }
        }
    }

    #[test]
    fn convex_combinations_of_vertices_are_in_three_dimensional_wedges(
        delta in 0.1..3.0f64, m1 in 0.05..1.0f64, gap in 0.05..2.0f64,
        raw in prop::collection::vec(0.0..1.0f64, 5), lower in any::<bool>(),
    ) {
        let w = Wedge::new(Point::new(vec![0.3, -0.2, 1.0]).unwrap(), delta, m1, m1 + gap).unwrap();
        let total: f64 = raw.iter().sum::<f64>().max(1e-12);
        let apex = w.base().coords().to_vec();
        let sign = if lower { -1.0 } else { 1.0 };
        let corners: Vec<Vec<f64>> = [[m1, m1], [m1, m1 + gap], [m1 + gap, m1], [m1 + gap, m1 + gap]]
            .iter()
            .map(|m| vec![apex[0] + sign * delta, apex[1] + sign * delta * m[0], apex[2] + sign * delta * m[1]])
            .collect();
        let mut q = apex.iter().map(|c| c * raw[0] / total).collect::<Vec<_>>();
        for (corner, l) in corners.iter().zip(&raw[1..]) {
            for i in 0..3 {
                q[i] += corner[i] * l / total;
            }
        }
        prop_assert!(w.contains(&q), "{q:?}");
        // leaving the slope box by a fixed fraction of the depth exits the wedge
        let depth = (q[0] - apex[0]).abs();
        if depth > 1e-3 {
            let mut out = q.clone();
            out[1] = apex[1] + sign * depth * (m1 + gap) * 1.01 + sign * 1e-3;
            prop_assert!(!w.contains(&out), "{out:?}");
        }
    }
}
