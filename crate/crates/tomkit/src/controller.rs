//! Pose construction and stepwise command generation for the interact motion
//! and the confined-area stepping motion.
//!
//! # Angle conventions
//!
//! The stepping update law tracks the tool angle `phi` in an image-style
//! frame: the end-effector sits at `p_obj + (-r cos(phi), +r sin(phi))` when
//! the lever from the grasp point to `p*` has length `r`. In this crate's
//! y-up world frame that maps to a world heading of `theta = -(phi + beta)`,
//! where `beta` is the angle of the grasp-to-`p*` lever in the tool frame.
//! [`SteppingState::ee_pose`] stores `phi`; use [`SteppingContext::world_pose`]
//! to obtain the world pose for contact resolution and rendering.

use serde::{Deserialize, Serialize};

use crate::config::{InteractParams, SteppingParams};
use crate::error::{Error, Result};
use crate::geometry::{
    angle_between, closest_point_on_circle, normalize_angle, Point2, Pose2, Segment2, Vector2,
};
use crate::manoeuvrability::ToolAnalysis;
use crate::tools::ToolSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point2,
    pub radius: f64,
}

/// Start/end poses for one interact motion, with the grasp-point circles they
/// lie on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractPlan {
    pub start_pose: Pose2,
    pub end_pose: Pose2,
    pub circle_start: Circle,
    pub circle_end: Circle,
    /// Lever radius: distance from the grasp point to `p*` in the tool frame.
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RotationDirection {
    Clockwise,
    Anticlockwise,
}

/// State of the stepping controller. `ee_pose.theta` stores the update law's
/// tool angle `phi`, not the world heading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteppingState {
    pub tau: u64,
    pub ee_pose: Pose2,
    pub obj: Point2,
    pub contact: bool,
    /// Angle at the grasp point between the object center and `p*`.
    pub angle_obj: f64,
    pub direction: RotationDirection,
}

/// Frame-independent constants of one stepping run, derived from the tool and
/// its analysis.
#[derive(Debug, Clone, Copy)]
pub struct SteppingContext {
    /// Grasp-to-`p*` lever length.
    pub r: f64,
    /// Angle of the grasp-to-`p*` lever in the tool frame.
    pub beta: f64,
    /// Tip affordance direction in the tool frame.
    pub a_tip: Vector2,
    pub p_star_local: Point2,
    pub grasp: Point2,
}

impl SteppingContext {
    pub fn new(tool: &ToolSpec, analysis: &ToolAnalysis) -> Self {
        let lever = tool.grasp.vector_to(analysis.p_star);
        SteppingContext {
            r: lever.norm(),
            beta: lever.angle(),
            a_tip: analysis.a_star.direction,
            p_star_local: analysis.p_star,
            grasp: tool.grasp,
        }
    }

    pub fn world_theta(&self, phi: f64) -> f64 {
        normalize_angle(-(phi + self.beta))
    }

    pub fn phi_from_world(&self, theta: f64) -> f64 {
        normalize_angle(-theta - self.beta)
    }

    /// Converts a phi-convention pose into the world pose of the grasp point.
    pub fn world_pose(&self, pose: Pose2) -> Pose2 {
        Pose2::new(pose.position, self.world_theta(pose.theta))
    }

    pub fn p_star_world(&self, pose: Pose2) -> Point2 {
        let theta = self.world_theta(pose.theta);
        pose.position + self.grasp.vector_to(self.p_star_local).rotated(theta)
    }

    pub fn a_tip_world(&self, phi: f64) -> Vector2 {
        self.a_tip.rotated(self.world_theta(phi))
    }

    /// Angle at the grasp point subtended by the object center and `p*`.
    pub fn angle_obj(&self, pose: Pose2, obj: Point2) -> f64 {
        let to_obj = pose.position.vector_to(obj);
        let to_star = pose.position.vector_to(self.p_star_world(pose));
        match angle_between(to_obj, to_star) {
            Ok(a) => a,
            Err(_) => 0.0,
        }
    }
}

/// Lever radius between the grasp point and `p*`, both in the tool frame.
pub fn lever_radius(p_star: Point2, grasp: Point2) -> f64 {
    grasp.distance(p_star)
}

/// Constructs the interact start and end poses.
///
/// The start position is the point of the circle around the object closest to
/// the robot base; the end position places `p*` exactly on the goal. Both
/// poses carry the pushing orientation, which turns the optimal affordance
/// toward the goal.
pub fn interact_poses(
    analysis: &ToolAnalysis,
    grasp: Point2,
    p_obj: Point2,
    p_goal: Point2,
    robot_base: Point2,
    robot_reach: f64,
) -> Result<InteractPlan> {
    if p_obj.distance(p_goal) < 1e-9 {
        return Err(Error::InvalidParameter(
            "object already at the goal; interact is degenerate".into(),
        ));
    }
    let r = lever_radius(analysis.p_star, grasp);
    if r < analysis.r_obj {
        return Err(Error::ToolTooShort {
            r,
            r_obj: analysis.r_obj,
        });
    }
    let push = p_obj.vector_to(p_goal).normalized()?;
    let theta_push = normalize_angle(push.angle() - analysis.a_star.direction.angle());
    let start_pos = closest_point_on_circle(p_obj, r, robot_base)?;
    if start_pos.distance(robot_base) > robot_reach {
        return Err(Error::Unreachable {
            x: start_pos.x,
            y: start_pos.y,
            reach: robot_reach,
        });
    }
    let lever = analysis.p_star.vector_to(grasp);
    let end_pos = p_goal + lever.rotated(theta_push);
    Ok(InteractPlan {
        start_pose: Pose2::new(start_pos, theta_push),
        end_pose: Pose2::new(end_pos, theta_push),
        circle_start: Circle {
            center: p_obj,
            radius: r,
        },
        circle_end: Circle {
            center: p_goal,
            radius: r,
        },
        r,
    })
}

/// Places `p*` exactly on the object and rotates about it so the grasp point
/// lands as close as possible to the anchor. This direct construction attains
/// the constrained minimum of the two-term alignment objective.
pub fn align_tool_pose(
    analysis: &ToolAnalysis,
    grasp: Point2,
    p_obj: Point2,
    start_anchor: Pose2,
) -> Pose2 {
    let lever = analysis.p_star.vector_to(grasp);
    let r = lever.norm();
    let dir = p_obj.vector_to(start_anchor.position);
    let dir = if dir.norm() < 1e-12 {
        Vector2::from_angle(start_anchor.theta)
    } else {
        dir.normalized().expect("checked above")
    };
    let grasp_world = p_obj + dir.scaled(r);
    let theta = normalize_angle(dir.angle() - lever.angle());
    Pose2::new(grasp_world, theta)
}

/// One interact command: a contraction step toward the end position, then
/// rotation once within position tolerance.
pub fn interact_step(current: Pose2, plan: &InteractPlan, params: &InteractParams) -> Pose2 {
    let gap = current.position.vector_to(plan.end_pose.position);
    let next_pos = current.position + gap.scaled(params.k_int);
    let next_theta = if gap.norm() <= params.pos_tol {
        rotate_toward(current.theta, plan.end_pose.theta, params.rot_rate)
    } else {
        current.theta
    };
    Pose2::new(next_pos, next_theta)
}

/// Rotates `current` toward `target` by at most `rate` radians.
pub fn rotate_toward(current: f64, target: f64, rate: f64) -> f64 {
    let diff = normalize_angle(target - current);
    normalize_angle(current + diff.clamp(-rate, rate))
}

/// Action trigger: 1 on even step counts (reposition), 0 on odd
/// (rotation-drag).
pub fn step_trigger(tau: u64) -> u8 {
    if tau % 2 == 0 {
        1
    } else {
        0
    }
}

/// Tool-angle increment applied during a rotation-drag action.
pub fn rotation_angle(
    phi_tau: f64,
    direction: RotationDirection,
    angle_obj: f64,
    angle_rot: f64,
) -> f64 {
    let raw = match direction {
        RotationDirection::Anticlockwise => -angle_obj - angle_rot,
        RotationDirection::Clockwise => -phi_tau + std::f64::consts::PI - angle_obj - angle_rot,
    };
    normalize_angle(raw)
}

/// One stepping command. Even `tau` repositions the tool so `p*` approaches
/// the object; odd `tau` performs a rotation-drag: the grasp chases the
/// radius-`r` point for the current `phi` while `phi` is incremented.
pub fn stepping_step(
    state: &SteppingState,
    exit_direction: Vector2,
    ctx: &SteppingContext,
    params: &SteppingParams,
) -> Result<(Pose2, SteppingState)> {
    let phi = state.ee_pose.theta;
    let a_tip = ctx.a_tip_world(phi);
    if angle_between(a_tip, exit_direction)? <= params.parallel_tol {
        return Err(Error::AlreadyAligned);
    }
    let mut next = *state;
    if step_trigger(state.tau) == 1 {
        let p_star = ctx.p_star_world(state.ee_pose);
        let delta = p_star.vector_to(state.obj).scaled(params.k);
        next.ee_pose = Pose2::new(state.ee_pose.position + delta, phi);
    } else {
        let angle_obj = ctx.angle_obj(state.ee_pose, state.obj);
        let (s, c) = phi.sin_cos();
        let target = Point2::new(state.obj.x - ctx.r * c, state.obj.y + ctx.r * s);
        let delta = state.ee_pose.position.vector_to(target).scaled(params.w);
        let dphi = if !params.strict_paper_signs
            && state.direction == RotationDirection::Clockwise
        {
            // Mirror-symmetric alternative to the published clockwise branch.
            angle_obj + params.angle_rot
        } else {
            rotation_angle(phi, state.direction, angle_obj, params.angle_rot)
        };
        next.angle_obj = angle_obj;
        next.ee_pose = Pose2::new(
            state.ee_pose.position + delta,
            normalize_angle(phi + dphi),
        );
    }
    next.tau += 1;
    Ok((next.ee_pose, next))
}

/// Initial stepping pose: the tip segment parallel to the first wall segment
/// with `p*` placed on the object, provided the tool does not cross a wall.
pub fn stepping_init(
    tool: &ToolSpec,
    analysis: &ToolAnalysis,
    walls: &[Segment2],
    exit_direction: Vector2,
    p_obj: Point2,
) -> Result<SteppingState> {
    let tip_idx = tool.tip_segment_index();
    if analysis.a_star.segment_index != tip_idx {
        return Err(Error::InvalidParameter(
            "stepping analysis must select a tip-segment affordance".into(),
        ));
    }
    let Some(first_wall) = walls.first() else {
        return Err(Error::InvalidParameter("no wall segments".into()));
    };
    let ctx = SteppingContext::new(tool, analysis);
    let tip_dir = tool.shape.segment(tip_idx).unit_direction();
    let theta_base = normalize_angle(first_wall.unit_direction().angle() - tip_dir.angle());

    let mut best: Option<(f64, f64, Point2)> = None; // (score, theta, ee)
    for theta in [theta_base, normalize_angle(theta_base + std::f64::consts::PI)] {
        let ee = p_obj + analysis.p_star.vector_to(tool.grasp).rotated(theta);
        let pose = Pose2::new(ee, theta);
        let shape = tool.posed_shape(pose);
        let collides = shape
            .segments()
            .any(|s| walls.iter().any(|w| s.intersects(*w)));
        if collides {
            continue;
        }
        let score = angle_between(ctx.a_tip.rotated(theta), exit_direction)?;
        if score > std::f64::consts::FRAC_PI_2 + 1e-9 {
            // The tip would face away from the exit; dragging cannot work.
            continue;
        }
        if best.map_or(true, |(s, _, _)| score < s) {
            best = Some((score, theta, ee));
        }
    }
    let Some((_, theta, ee)) = best else {
        return Err(Error::CannotEnter);
    };
    let a_tip_world = ctx.a_tip.rotated(theta);
    let direction = if a_tip_world.cross(exit_direction) > 0.0 {
        RotationDirection::Anticlockwise
    } else {
        RotationDirection::Clockwise
    };
    Ok(SteppingState {
        tau: 0,
        ee_pose: Pose2::new(ee, ctx.phi_from_world(theta)),
        obj: p_obj,
        contact: true,
        angle_obj: 0.0,
        direction,
    })
}
