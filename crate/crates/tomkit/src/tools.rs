//! Stock tool shapes and the tool description shared by planner and
//! simulator.
//!
//! Tool shapes are polylines in a local frame. A tool's pose is the pose of
//! its grasp point (which coincides with the holding arm's end-effector), so
//! world coordinates of a local point `p` are
//! `pose.position + R(pose.theta) * (p - grasp)`.

use serde::{Deserialize, Serialize};

use crate::geometry::{Point2, Polyline, Pose2, Vector2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToolKind {
    Stick,
    Hook,
    YHook,
}

impl ToolKind {
    /// Only hook-class tools can drag an object out of a confined area.
    pub fn supports_stepping(self) -> bool {
        matches!(self, ToolKind::Hook)
    }
}

impl std::fmt::Display for ToolKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ToolKind::Stick => write!(f, "stick"),
            ToolKind::Hook => write!(f, "hook"),
            ToolKind::YHook => write!(f, "y_hook"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolSpec {
    pub id: String,
    pub kind: ToolKind,
    pub shape: Polyline,
    /// Grasp point in the tool's local frame.
    pub grasp: Point2,
    /// Resting pose (of the grasp point) in the world.
    pub home: Pose2,
}

impl ToolSpec {
    pub fn world_point(&self, pose: Pose2, local: Point2) -> Point2 {
        pose.position + self.grasp.vector_to(local).rotated(pose.theta)
    }

    pub fn world_vector(&self, pose: Pose2, local: Vector2) -> Vector2 {
        local.rotated(pose.theta)
    }

    pub fn posed_shape(&self, pose: Pose2) -> Polyline {
        let pts = self
            .shape
            .points()
            .iter()
            .map(|p| self.world_point(pose, *p))
            .collect();
        Polyline::new(pts).expect("rigid transform preserves validity")
    }

    /// Terminal segment of the polyline, by convention the tool tip.
    pub fn tip_segment_index(&self) -> usize {
        self.shape.segment_count() - 1
    }
}

/// Straight stick, 0.3 m, grasped at one end.
pub fn stick() -> ToolSpec {
    ToolSpec {
        id: "stick".into(),
        kind: ToolKind::Stick,
        shape: Polyline::new(vec![Point2::new(0.0, 0.0), Point2::new(0.0, -0.30)]).unwrap(),
        grasp: Point2::new(0.0, 0.0),
        home: Pose2::new(Point2::new(0.0, 0.0), 0.0),
    }
}

/// L-shaped hook: 0.22 m handle with a 0.08 m tip at a right angle. Grasped
/// at the handle end; the tip segment is the terminal one.
pub fn l_hook() -> ToolSpec {
    ToolSpec {
        id: "hook".into(),
        kind: ToolKind::Hook,
        shape: Polyline::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.0, -0.22),
            Point2::new(0.08, -0.22),
        ])
        .unwrap(),
        grasp: Point2::new(0.0, 0.0),
        home: Pose2::new(Point2::new(0.0, 0.0), 0.0),
    }
}

/// Y-shaped hook abstracted as a shallow cup: a flat base with two flaring
/// prongs. The grasp point models the stem root below the base; it is not
/// part of the contact geometry.
pub fn y_hook() -> ToolSpec {
    ToolSpec {
        id: "y_hook".into(),
        kind: ToolKind::YHook,
        shape: Polyline::new(vec![
            Point2::new(-0.10, 0.14),
            Point2::new(-0.035, 0.045),
            Point2::new(0.035, 0.045),
            Point2::new(0.10, 0.14),
        ])
        .unwrap(),
        grasp: Point2::new(0.0, -0.08),
        home: Pose2::new(Point2::new(0.0, 0.0), 0.0),
    }
}

pub fn stock_tool(kind: ToolKind) -> ToolSpec {
    match kind {
        ToolKind::Stick => stick(),
        ToolKind::Hook => l_hook(),
        ToolKind::YHook => y_hook(),
    }
}
