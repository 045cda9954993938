//! Active tool affordances, passive wall affordances, optimal-affordance
//! selection, and the exit vector for confined areas.
//!
//! Each tool segment offers two affordance vectors: its unit normals anchored
//! at the segment midpoint, scaled to half the segment length. Walls offer a
//! single inward vector per segment. Summing the wall vectors yields the exit
//! direction and minimum travel distance for a confined object.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{angle_between, segment_normal_pair, Point2, Polyline, Segment2, Vector2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// One affordance vector: a scaled normal anchored at a segment midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffordanceVector {
    pub origin: Point2,
    /// Unit direction, perpendicular to the parent segment.
    pub direction: Vector2,
    /// Half the parent segment's length.
    pub magnitude: f64,
    pub segment_index: usize,
    pub side: Side,
}

impl AffordanceVector {
    /// Where the scaled vector ends; the natural anchor for a pushed object.
    pub fn endpoint(&self) -> Point2 {
        self.origin + self.direction.scaled(self.magnitude)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffordanceSet {
    pub vectors: Vec<AffordanceVector>,
    pub tool_id: String,
}

/// Exit specification for a confined area: where to move and how far.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExitSpec {
    pub direction: Vector2,
    pub travel: f64,
    pub exit_point: Point2,
}

/// Both affordance vectors of every tool segment, ordered by segment index
/// with the left side first.
pub fn compute_tool_affordances(tool: &Polyline) -> Result<AffordanceSet> {
    let mut vectors = Vec::with_capacity(2 * tool.segment_count());
    for (i, seg) in tool.segments().enumerate() {
        let len = seg.length();
        if len <= 1e-9 {
            return Err(Error::DegenerateContour(format!("tool segment {i} degenerate")));
        }
        let (left, right) = segment_normal_pair(seg);
        let origin = seg.midpoint();
        vectors.push(AffordanceVector {
            origin,
            direction: left,
            magnitude: len * 0.5,
            segment_index: i,
            side: Side::Left,
        });
        vectors.push(AffordanceVector {
            origin,
            direction: right,
            magnitude: len * 0.5,
            segment_index: i,
            side: Side::Right,
        });
    }
    Ok(AffordanceSet {
        vectors,
        tool_id: String::new(),
    })
}

/// Optimal affordance: the vector with the smallest angular distance to
/// `v_target`. Ties break on the lowest (segment index, left-before-right).
pub fn select_affordance(set: &AffordanceSet, v_target: Vector2) -> Result<AffordanceVector> {
    if v_target.norm() < crate::geometry::EPS {
        return Err(Error::DegenerateVector);
    }
    if set.vectors.is_empty() {
        return Err(Error::InvalidParameter("empty affordance set".into()));
    }
    let mut best: Option<(f64, &AffordanceVector)> = None;
    for v in &set.vectors {
        let score = angle_between(v.direction, v_target)?;
        // Strict less-than keeps the first (lowest-index, left-first) vector
        // on ties; the set is stored in that order.
        if best.map_or(true, |(s, _)| score < s) {
            best = Some((score, v));
        }
    }
    Ok(*best.expect("non-empty set").1)
}

/// One inward affordance vector per wall segment, facing the interior hint.
pub fn compute_wall_affordances(
    walls: &[Segment2],
    interior_hint: Point2,
) -> Result<Vec<AffordanceVector>> {
    if walls.is_empty() {
        return Err(Error::InvalidParameter("no wall segments".into()));
    }
    let mut out = Vec::with_capacity(walls.len());
    for (i, seg) in walls.iter().enumerate() {
        let side = seg.unit_direction().cross(seg.a.vector_to(interior_hint));
        if side.abs() < 1e-9 {
            return Err(Error::AmbiguousInterior(i));
        }
        let (left, right) = segment_normal_pair(*seg);
        let direction = if side > 0.0 { left } else { right };
        out.push(AffordanceVector {
            origin: seg.midpoint(),
            direction,
            magnitude: seg.length() * 0.5,
            segment_index: i,
            side: if side > 0.0 { Side::Left } else { Side::Right },
        });
    }
    Ok(out)
}

/// Sums the passive wall affordances into the exit direction and travel
/// distance, anchored at the current object position.
pub fn compute_exit(
    walls: &[Segment2],
    interior_hint: Point2,
    p_obj: Point2,
) -> Result<ExitSpec> {
    let vectors = compute_wall_affordances(walls, interior_hint)?;
    let mut sum = Vector2::new(0.0, 0.0);
    for v in &vectors {
        sum = sum + v.direction.scaled(v.magnitude);
    }
    let travel = sum.norm();
    if travel < 1e-9 {
        return Err(Error::NoExit);
    }
    Ok(ExitSpec {
        direction: sum.scaled(1.0 / travel),
        travel,
        exit_point: p_obj + sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn stick() -> Polyline {
        Polyline::new(vec![p(0.0, 0.0), p(0.2, 0.0)]).unwrap()
    }

    #[test]
    fn stick_has_two_vectors_at_midpoint() {
        let set = compute_tool_affordances(&stick()).unwrap();
        assert_eq!(set.vectors.len(), 2);
        let l = set.vectors[0];
        let r = set.vectors[1];
        assert_abs_diff_eq!(l.origin.x, 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(l.direction.dy, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.direction.dy, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(l.magnitude, 0.1, epsilon = 1e-12);
        assert_eq!(l.side, Side::Left);
    }

    #[test]
    fn vector_count_is_two_per_segment() {
        let hook = Polyline::new(vec![p(0.0, 0.0), p(0.2, 0.0), p(0.2, 0.1)]).unwrap();
        assert_eq!(compute_tool_affordances(&hook).unwrap().vectors.len(), 4);
        let y = Polyline::new(vec![
            p(-0.1, 0.14),
            p(-0.035, 0.045),
            p(0.035, 0.045),
            p(0.1, 0.14),
        ])
        .unwrap();
        assert_eq!(compute_tool_affordances(&y).unwrap().vectors.len(), 6);
    }

    #[test]
    fn selection_prefers_aligned_side() {
        let set = compute_tool_affordances(&stick()).unwrap();
        let a = select_affordance(&set, Vector2::new(0.0, -1.0)).unwrap();
        assert_abs_diff_eq!(a.direction.dy, -1.0, epsilon = 1e-12);
        assert_eq!(a.side, Side::Right);
    }

    #[test]
    fn selection_by_hand_scores() {
        // Hand evaluation: (0,1) scores pi/4 against (1,1), (0,-1) scores
        // 3*pi/4, so the left side wins.
        let set = compute_tool_affordances(&stick()).unwrap();
        let a = select_affordance(&set, Vector2::new(1.0, 1.0)).unwrap();
        assert_eq!(a.side, Side::Left);
        let s_left = angle_between(Vector2::new(0.0, 1.0), Vector2::new(1.0, 1.0)).unwrap();
        let s_right = angle_between(Vector2::new(0.0, -1.0), Vector2::new(1.0, 1.0)).unwrap();
        assert!(s_left < s_right);
    }

    #[test]
    fn selection_tie_breaks_left_first() {
        // A target parallel to the stick scores pi/2 on both sides.
        let set = compute_tool_affordances(&stick()).unwrap();
        let a = select_affordance(&set, Vector2::new(1.0, 0.0)).unwrap();
        assert_eq!(a.segment_index, 0);
        assert_eq!(a.side, Side::Left);
        let s = angle_between(a.direction, Vector2::new(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(s, FRAC_PI_2, epsilon = 1e-12);
    }

    #[test]
    fn zero_target_rejected() {
        let set = compute_tool_affordances(&stick()).unwrap();
        assert!(matches!(
            select_affordance(&set, Vector2::new(0.0, 0.0)),
            Err(Error::DegenerateVector)
        ));
    }

    fn seg(ax: f64, ay: f64, bx: f64, by: f64) -> Segment2 {
        Segment2::new(p(ax, ay), p(bx, by)).unwrap()
    }

    #[test]
    fn wall_vectors_point_inward() {
        let walls = vec![seg(0.0, 0.0, 0.3, 0.0)];
        let v = compute_wall_affordances(&walls, p(0.15, 0.1)).unwrap();
        assert_abs_diff_eq!(v[0].direction.dy, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v[0].magnitude, 0.15, epsilon = 1e-12);

        let walls = vec![seg(0.0, 0.0, 0.0, 0.2)];
        let v = compute_wall_affordances(&walls, p(0.1, 0.1)).unwrap();
        assert_abs_diff_eq!(v[0].direction.dx, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v[0].magnitude, 0.1, epsilon = 1e-12);
    }

    #[test]
    fn collinear_hint_rejected() {
        let walls = vec![seg(0.0, 0.0, 0.3, 0.0)];
        assert!(matches!(
            compute_wall_affordances(&walls, p(0.5, 0.0)),
            Err(Error::AmbiguousInterior(0))
        ));
    }

    #[test]
    fn u_wall_exit_points_up() {
        let walls = vec![
            seg(0.0, 0.0, 0.3, 0.0),
            seg(0.0, 0.0, 0.0, 0.2),
            seg(0.3, 0.0, 0.3, 0.2),
        ];
        let exit = compute_exit(&walls, p(0.15, 0.1), p(0.15, 0.05)).unwrap();
        assert_abs_diff_eq!(exit.direction.dx, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(exit.direction.dy, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(exit.travel, 0.15, epsilon = 1e-12);
        assert_abs_diff_eq!(exit.exit_point.x, 0.15, epsilon = 1e-12);
        assert_abs_diff_eq!(exit.exit_point.y, 0.20, epsilon = 1e-12);
    }

    #[test]
    fn corner_exit_along_bisector() {
        // Hand vector sum: two equal walls meeting at a right angle produce
        // an exit along the corner bisector.
        let walls = vec![seg(0.0, 0.0, 0.3, 0.0), seg(0.0, 0.0, 0.0, 0.3)];
        let exit = compute_exit(&walls, p(0.1, 0.1), p(0.06, 0.06)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(exit.direction.dx, h, epsilon = 1e-12);
        assert_abs_diff_eq!(exit.direction.dy, h, epsilon = 1e-12);
        assert_abs_diff_eq!(exit.travel, 0.15 * 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn closed_box_has_no_exit() {
        let walls = vec![
            seg(0.0, 0.0, 0.3, 0.0),
            seg(0.3, 0.0, 0.3, 0.3),
            seg(0.3, 0.3, 0.0, 0.3),
            seg(0.0, 0.3, 0.0, 0.0),
        ];
        assert!(matches!(
            compute_exit(&walls, p(0.15, 0.15), p(0.15, 0.15)),
            Err(Error::NoExit)
        ));
    }

    proptest! {
        #[test]
        fn prop_affordances_exact(
            xs in proptest::collection::vec((-0.5f64..0.5, -0.5f64..0.5), 2..6),
        ) {
            let pts: Vec<Point2> = xs.iter().map(|(x, y)| p(*x, *y)).collect();
            for w in pts.windows(2) {
                prop_assume!(w[0].distance(w[1]) > 1e-3);
            }
            let tool = Polyline::new(pts).unwrap();
            let set = compute_tool_affordances(&tool).unwrap();
            prop_assert_eq!(set.vectors.len(), 2 * tool.segment_count());
            for v in &set.vectors {
                let seg = tool.segment(v.segment_index);
                prop_assert!(v.direction.dot(seg.direction()).abs() < 1e-9 * seg.length().max(1.0));
                prop_assert_eq!(v.magnitude, seg.length() * 0.5);
                prop_assert!((v.direction.norm() - 1.0).abs() < 1e-9);
            }
        }

        #[test]
        fn prop_exit_identity(
            ox in -0.5f64..0.5, oy in -0.5f64..0.5,
        ) {
            let walls = vec![seg(0.0, 0.0, 0.3, 0.0), seg(0.0, 0.0, 0.0, 0.3)];
            let exit = compute_exit(&walls, p(0.1, 0.1), p(ox, oy)).unwrap();
            let back = p(ox, oy) + exit.direction.scaled(exit.travel);
            prop_assert!(back.distance(exit.exit_point) < 1e-12);
        }

        #[test]
        fn prop_exit_flips_with_mirrored_hint(hy in 0.01f64..0.5) {
            let walls = vec![seg(0.0, 0.0, 0.3, 0.0)];
            let up = compute_exit(&walls, p(0.15, hy), p(0.1, 0.0)).unwrap();
            let down = compute_exit(&walls, p(0.15, -hy), p(0.1, 0.0)).unwrap();
            prop_assert!((up.direction.dy + down.direction.dy).abs() < 1e-12);
            prop_assert!(up.direction.dy > 0.0);
        }
    }
}
