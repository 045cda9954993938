//! Deterministic rule engine producing motion-function plans by case
//! analysis over reachability and confinement.

use super::{ArmId, MotionFunction, Observation, Plan, PlanningRequest, RobotSpec, BLOCK};
use crate::error::{Error, Result};
use crate::geometry::{convex_hull, point_in_polygon, Point2};
use crate::tools::ToolSpec;

/// Centroid of the intersection of the two reach disks, or None when the
/// disks do not overlap. This is the handover point for `pass`.
pub fn handover_zone(a: &RobotSpec, b: &RobotSpec) -> Option<Point2> {
    let d = a.base.distance(b.base);
    let (r1, r2) = (a.reach, b.reach);
    if d >= r1 + r2 {
        return None;
    }
    if d <= (r1 - r2).abs() {
        // One disk inside the other: the lens is the smaller disk.
        return Some(if r1 < r2 { a.base } else { b.base });
    }
    let axis = a.base.vector_to(b.base).scaled(1.0 / d);
    // Chord position along the axis, measured from `a`.
    let x1 = (d * d - r2 * r2 + r1 * r1) / (2.0 * d);
    let x2 = d - x1;
    // Circular segment area and centroid offset from the circle center.
    let seg = |r: f64, h: f64| -> (f64, f64) {
        let h = h.clamp(-r, r);
        let area = r * r * (h / r).acos() - h * (r * r - h * h).sqrt();
        if area <= f64::EPSILON {
            return (0.0, h);
        }
        let centroid = 2.0 / 3.0 * (r * r - h * h).powf(1.5) / area;
        (area, centroid)
    };
    let (area1, c1) = seg(r1, x1);
    let (area2, c2) = seg(r2, x2);
    if area1 + area2 <= f64::EPSILON {
        return None;
    }
    // Segment of `a` sits beyond the chord (toward b); segment of `b` before it.
    let x = (area1 * c1 + area2 * (d - c2)) / (area1 + area2);
    Some(a.base + axis.scaled(x))
}

/// True when the block lies inside the convex hull of the wall endpoints.
pub fn block_confined(obs: &Observation) -> bool {
    let Some(walls) = &obs.walls else {
        return false;
    };
    let mut pts = Vec::with_capacity(2 * walls.segments.len());
    for s in &walls.segments {
        pts.push(s.a);
        pts.push(s.b);
    }
    let hull = convex_hull(&pts);
    hull.len() >= 3 && point_in_polygon(&hull, obs.block.center)
}

fn nearest_arm<'a>(obs: &'a Observation, p: Point2) -> &'a RobotSpec {
    obs.robots
        .iter()
        .min_by(|a, b| {
            a.base
                .distance(p)
                .partial_cmp(&b.base.distance(p))
                .unwrap()
                .then(a.id.cmp(&b.id))
        })
        .expect("observation has robots")
}

fn nearest_tool<'a, I>(tools: I, p: Point2) -> Option<&'a ToolSpec>
where
    I: Iterator<Item = &'a ToolSpec>,
{
    tools.min_by(|a, b| {
        a.home
            .position
            .distance(p)
            .partial_cmp(&b.home.position.distance(p))
            .unwrap()
            .then(a.id.cmp(&b.id))
    })
}

/// Deterministic plan by case analysis:
///
/// (a) walls confine the block: the nearest arm extracts it with a hook-class
///     tool via `stepping`, then pushes it to the target when one is given;
/// (b) block and target inside one arm's reach: single-arm push;
/// (c) block and target split between the arms with two tools: push to the
///     handover zone, then the second arm finishes;
/// (d) as (c) with one tool: the tool itself is handed over through a
///     release-then-grasp pair.
pub fn plan_rule_based(req: &PlanningRequest) -> Result<Plan> {
    let obs = &req.observation;
    let block = obs.block.center;

    if block_confined(obs) {
        return plan_confined(obs);
    }

    let Some(target) = obs.target else {
        return Err(Error::Infeasible(
            "block is not confined and no target is given".into(),
        ));
    };

    // Case (b): one arm covers both the block and the target.
    let both: Vec<&RobotSpec> = obs
        .robots
        .iter()
        .filter(|r| r.reaches(block) && r.reaches(target))
        .collect();
    if let Some(arm) = both
        .iter()
        .min_by(|a, b| {
            a.base
                .distance(block)
                .partial_cmp(&b.base.distance(block))
                .unwrap()
                .then(a.id.cmp(&b.id))
        })
    {
        let tool = nearest_tool(obs.tools.iter(), block)
            .ok_or_else(|| Error::Infeasible("no tool available".into()))?;
        return Ok(Plan::new(vec![
            MotionFunction::Grasp {
                arm: arm.id,
                tool: tool.id.clone(),
            },
            MotionFunction::Approach {
                arm: arm.id,
                tool: tool.id.clone(),
                object: BLOCK.into(),
            },
            MotionFunction::Interact {
                arm: arm.id,
                tool: tool.id.clone(),
                object: BLOCK.into(),
                goal: target,
            },
            MotionFunction::Release {
                arm: arm.id,
                tool: tool.id.clone(),
            },
        ]));
    }

    // Cases (c)/(d): split reachability with a handover.
    let reach_block: Vec<&RobotSpec> = obs.robots.iter().filter(|r| r.reaches(block)).collect();
    let reach_target: Vec<&RobotSpec> =
        obs.robots.iter().filter(|r| r.reaches(target)).collect();
    if reach_block.is_empty() {
        return Err(Error::Infeasible("no arm can reach the block".into()));
    }
    if reach_target.is_empty() {
        return Err(Error::Infeasible("no arm can reach the target".into()));
    }
    let first = reach_block
        .iter()
        .min_by(|a, b| {
            a.base
                .distance(block)
                .partial_cmp(&b.base.distance(block))
                .unwrap()
                .then(a.id.cmp(&b.id))
        })
        .unwrap();
    let second = reach_target
        .iter()
        .filter(|r| r.id != first.id)
        .min_by(|a, b| {
            a.base
                .distance(target)
                .partial_cmp(&b.base.distance(target))
                .unwrap()
                .then(a.id.cmp(&b.id))
        })
        .ok_or_else(|| Error::Infeasible("block and target need two distinct arms".into()))?;
    if handover_zone(first, second).is_none() {
        return Err(Error::Infeasible(
            "the reach disks do not overlap; no handover zone".into(),
        ));
    }

    if obs.tools.len() >= 2 {
        // Case (c): a tool per arm.
        let tool_a = nearest_tool(obs.tools.iter(), block).unwrap();
        let tool_b = nearest_tool(obs.tools.iter().filter(|t| t.id != tool_a.id), target)
            .ok_or_else(|| Error::Infeasible("no second tool".into()))?;
        Ok(Plan::new(handover_steps(
            first.id,
            &tool_a.id,
            second.id,
            &tool_b.id,
            target,
        )))
    } else {
        // Case (d): the single tool is shared.
        let tool = obs
            .tools
            .first()
            .ok_or_else(|| Error::Infeasible("no tool available".into()))?;
        Ok(Plan::new(handover_steps(
            first.id,
            &tool.id,
            second.id,
            &tool.id,
            target,
        )))
    }
}

fn handover_steps(
    first: ArmId,
    tool_a: &str,
    second: ArmId,
    tool_b: &str,
    target: Point2,
) -> Vec<MotionFunction> {
    vec![
        MotionFunction::Grasp {
            arm: first,
            tool: tool_a.into(),
        },
        MotionFunction::Approach {
            arm: first,
            tool: tool_a.into(),
            object: BLOCK.into(),
        },
        MotionFunction::Pass {
            arm: first,
            tool: tool_a.into(),
            object: BLOCK.into(),
            to_arm: second,
        },
        MotionFunction::Release {
            arm: first,
            tool: tool_a.into(),
        },
        MotionFunction::Grasp {
            arm: second,
            tool: tool_b.into(),
        },
        MotionFunction::Approach {
            arm: second,
            tool: tool_b.into(),
            object: BLOCK.into(),
        },
        MotionFunction::Interact {
            arm: second,
            tool: tool_b.into(),
            object: BLOCK.into(),
            goal: target,
        },
        MotionFunction::Release {
            arm: second,
            tool: tool_b.into(),
        },
    ]
}

fn plan_confined(obs: &Observation) -> Result<Plan> {
    let block = obs.block.center;
    let hooks: Vec<&ToolSpec> = obs
        .tools
        .iter()
        .filter(|t| t.kind.supports_stepping())
        .collect();
    let tool = nearest_tool(hooks.into_iter(), block)
        .ok_or_else(|| Error::Infeasible("confined extraction needs a hook-class tool".into()))?;
    let arm = nearest_arm(obs, block);
    let mut steps = vec![
        MotionFunction::Grasp {
            arm: arm.id,
            tool: tool.id.clone(),
        },
        MotionFunction::Approach {
            arm: arm.id,
            tool: tool.id.clone(),
            object: BLOCK.into(),
        },
        MotionFunction::Stepping {
            arm: arm.id,
            tool: tool.id.clone(),
            object: BLOCK.into(),
        },
    ];
    if let Some(target) = obs.target {
        steps.push(MotionFunction::Interact {
            arm: arm.id,
            tool: tool.id.clone(),
            object: BLOCK.into(),
            goal: target,
        });
    }
    steps.push(MotionFunction::Release {
        arm: arm.id,
        tool: tool.id.clone(),
    });
    Ok(Plan::new(steps))
}
