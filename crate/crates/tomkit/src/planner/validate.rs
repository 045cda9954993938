//! Plan well-formedness checks and redundancy detection via abstract-state
//! replay.
//!
//! The abstract state tracks which arm holds which tool, whether the held
//! tool has been positioned at the block, the block's symbolic position, and
//! wall confinement. Reach disks constrain manipulation steps; grasping a
//! parked tool is not reach-checked.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::rules::{block_confined, handover_zone};
use super::{ArmId, MotionFunction, Observation, Plan, BLOCK};
use crate::geometry::Point2;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    /// Indices of steps whose removal leaves a valid plan with the same
    /// abstract outcome.
    pub redundant_steps: Vec<usize>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty() && self.redundant_steps.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for v in &self.violations {
            writeln!(f, "violation: {v}")?;
        }
        for i in &self.redundant_steps {
            writeln!(f, "redundant step: {i}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Outcome {
    block: Point2,
    confined: bool,
    all_released: bool,
}

fn replay(plan: &Plan, obs: &Observation) -> (Vec<String>, Outcome) {
    let mut violations = Vec::new();
    let mut held: BTreeMap<ArmId, String> = BTreeMap::new();
    let mut approached: BTreeMap<ArmId, bool> = BTreeMap::new();
    let mut block = obs.block.center;
    let mut confined = block_confined(obs);

    let check_held = |held: &BTreeMap<ArmId, String>,
                          violations: &mut Vec<String>,
                          i: usize,
                          arm: ArmId,
                          tool: &str|
     -> bool {
        if held.get(&arm).map(String::as_str) != Some(tool) {
            violations.push(format!("step {i}: tool-not-held ({arm} does not hold {tool})"));
            false
        } else {
            true
        }
    };

    for (i, step) in plan.steps.iter().enumerate() {
        if i > 0 && plan.steps[i - 1] == *step {
            violations.push(format!("step {i}: duplicate-step"));
        }
        if obs.robot(step.arm()).is_none() {
            violations.push(format!("step {i}: unknown-arm {}", step.arm()));
            continue;
        }
        if obs.tool(step.tool()).is_none() {
            violations.push(format!("step {i}: unknown-tool {}", step.tool()));
            continue;
        }
        match step {
            MotionFunction::Grasp { arm, tool } => {
                if held.contains_key(arm) {
                    violations.push(format!("step {i}: arm-busy ({arm} already holds a tool)"));
                } else if held.values().any(|t| t == tool) {
                    violations.push(format!("step {i}: tool-taken ({tool} held by the other arm)"));
                } else {
                    held.insert(*arm, tool.clone());
                    approached.insert(*arm, false);
                }
            }
            MotionFunction::Approach { arm, tool, object } => {
                if object != BLOCK {
                    violations.push(format!("step {i}: unknown-object {object}"));
                }
                if check_held(&held, &mut violations, i, *arm, tool) {
                    let robot = obs.robot(*arm).unwrap();
                    if !robot.reaches(block) {
                        violations.push(format!("step {i}: block-out-of-reach for {arm}"));
                    }
                    approached.insert(*arm, true);
                }
            }
            MotionFunction::Interact {
                arm,
                tool,
                object,
                goal,
            } => {
                if object != BLOCK {
                    violations.push(format!("step {i}: unknown-object {object}"));
                }
                if check_held(&held, &mut violations, i, *arm, tool) {
                    if !approached.get(arm).copied().unwrap_or(false) {
                        violations.push(format!("step {i}: not-approached"));
                    }
                    if confined {
                        violations.push(format!("step {i}: block-confined (stepping required)"));
                    }
                    let robot = obs.robot(*arm).unwrap();
                    if !robot.reaches(*goal) {
                        violations.push(format!("step {i}: goal-out-of-reach for {arm}"));
                    }
                    if !robot.reaches(block) {
                        violations.push(format!("step {i}: block-out-of-reach for {arm}"));
                    }
                    block = *goal;
                }
            }
            MotionFunction::Stepping { arm, tool, object } => {
                if object != BLOCK {
                    violations.push(format!("step {i}: unknown-object {object}"));
                }
                if check_held(&held, &mut violations, i, *arm, tool) {
                    if !approached.get(arm).copied().unwrap_or(false) {
                        violations.push(format!("step {i}: not-approached"));
                    }
                    let spec = obs.tool(tool).unwrap();
                    if !spec.kind.supports_stepping() {
                        violations.push(format!("step {i}: tool-not-hook ({tool})"));
                    }
                    match &obs.walls {
                        None => violations.push(format!("step {i}: no-walls")),
                        Some(walls) => {
                            if !confined {
                                violations.push(format!("step {i}: not-confined"));
                            } else if let Ok(exit) = crate::affordance::compute_exit(
                                &walls.segments,
                                walls.interior_hint,
                                block,
                            ) {
                                block = exit.exit_point;
                                confined = false;
                            } else {
                                violations.push(format!("step {i}: no-exit"));
                            }
                        }
                    }
                }
            }
            MotionFunction::Pass {
                arm,
                tool,
                object,
                to_arm,
            } => {
                if object != BLOCK {
                    violations.push(format!("step {i}: unknown-object {object}"));
                }
                if arm == to_arm {
                    violations.push(format!("step {i}: pass-to-self"));
                }
                if check_held(&held, &mut violations, i, *arm, tool) {
                    if !approached.get(arm).copied().unwrap_or(false) {
                        violations.push(format!("step {i}: not-approached"));
                    }
                    if confined {
                        violations.push(format!("step {i}: block-confined (stepping required)"));
                    }
                    let from = obs.robot(*arm).unwrap();
                    if !from.reaches(block) {
                        violations.push(format!("step {i}: block-out-of-reach for {arm}"));
                    }
                    match obs
                        .robot(*to_arm)
                        .and_then(|to| handover_zone(from, to))
                    {
                        Some(zone) => block = zone,
                        None => {
                            violations.push(format!("step {i}: empty-handover-zone"));
                        }
                    }
                }
            }
            MotionFunction::Release { arm, tool } => {
                if check_held(&held, &mut violations, i, *arm, tool) {
                    held.remove(arm);
                    approached.insert(*arm, false);
                }
            }
        }
    }
    for (arm, tool) in &held {
        violations.push(format!("end: tool-not-released ({tool} still held by {arm})"));
    }
    let outcome = Outcome {
        block,
        confined,
        all_released: held.is_empty(),
    };
    (violations, outcome)
}

/// Checks a plan against an observation. The report lists rule violations
/// and, for violation-free plans, steps whose removal leaves a valid plan
/// with the same abstract outcome.
pub fn validate_plan(plan: &Plan, obs: &Observation) -> ValidationReport {
    let (violations, outcome) = replay(plan, obs);
    let mut report = ValidationReport {
        violations,
        redundant_steps: Vec::new(),
    };
    if !report.violations.is_empty() {
        return report;
    }
    for i in 0..plan.steps.len() {
        let mut reduced = plan.clone();
        reduced.steps.remove(i);
        let (vs, out) = replay(&reduced, obs);
        if vs.is_empty() && out == outcome {
            report.redundant_steps.push(i);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::testkit;
    use crate::planner::{embed, plan_rule_based};

    #[test]
    fn interact_without_grasp_flagged() {
        let obs = testkit::single_arm_scene();
        let plan = Plan::new(vec![MotionFunction::Interact {
            arm: ArmId::Right,
            tool: "hook".into(),
            object: BLOCK.into(),
            goal: obs.target.unwrap(),
        }]);
        let report = validate_plan(&plan, &obs);
        assert!(report
            .violations
            .iter()
            .any(|v| v.contains("tool-not-held")));
    }

    #[test]
    fn canonical_plan_clean() {
        let obs = testkit::single_arm_scene();
        let req = embed("push the block to the target", &obs).unwrap();
        let plan = plan_rule_based(&req).unwrap();
        let report = validate_plan(&plan, &obs);
        assert!(report.is_ok(), "unexpected report: {report}");
    }

    #[test]
    fn duplicated_pass_is_redundant() {
        // Abstract-state replay oracle: the second pass moves the block to
        // the zone it is already in, so removing it changes nothing.
        let obs = testkit::dual_arm_scene();
        let req = embed("move the block to the target", &obs).unwrap();
        let mut plan = plan_rule_based(&req).unwrap();
        let pass = plan.steps[2].clone();
        // Insert a non-adjacent duplicate to dodge the duplicate-step rule.
        plan.steps.insert(3, MotionFunction::Approach {
            arm: ArmId::Right,
            tool: "stick".into(),
            object: BLOCK.into(),
        });
        plan.steps.insert(4, pass);
        let report = validate_plan(&plan, &obs);
        assert!(report.violations.is_empty(), "{report}");
        assert!(!report.redundant_steps.is_empty());
    }

    #[test]
    fn rule_plans_are_minimal() {
        for obs in [
            testkit::single_arm_scene(),
            testkit::dual_arm_scene(),
            testkit::sharing_scene(),
            testkit::stepping_scene(),
        ] {
            let req = embed("handle the block task", &obs).unwrap();
            let plan = plan_rule_based(&req).unwrap();
            let report = validate_plan(&plan, &obs);
            assert!(report.is_ok(), "{report}");
        }
    }

    #[test]
    fn unreleased_tool_flagged() {
        let obs = testkit::single_arm_scene();
        let plan = Plan::new(vec![MotionFunction::Grasp {
            arm: ArmId::Right,
            tool: "hook".into(),
        }]);
        let report = validate_plan(&plan, &obs);
        assert!(report
            .violations
            .iter()
            .any(|v| v.contains("tool-not-released")));
    }

    #[test]
    fn stepping_with_stick_flagged() {
        let mut obs = testkit::stepping_scene();
        obs.tools = vec![testkit::place(crate::tools::stick(), "stick", 0.45, 0.42)];
        let plan = Plan::new(vec![
            MotionFunction::Grasp {
                arm: ArmId::Right,
                tool: "stick".into(),
            },
            MotionFunction::Approach {
                arm: ArmId::Right,
                tool: "stick".into(),
                object: BLOCK.into(),
            },
            MotionFunction::Stepping {
                arm: ArmId::Right,
                tool: "stick".into(),
                object: BLOCK.into(),
            },
            MotionFunction::Release {
                arm: ArmId::Right,
                tool: "stick".into(),
            },
        ]);
        let report = validate_plan(&plan, &obs);
        assert!(report.violations.iter().any(|v| v.contains("tool-not-hook")));
    }
}
