//! Symbolic task planner: scene observations, motion functions, instruction
//! embedding, a deterministic rule engine, plan validation, scenario
//! generation, and an optional LLM backend.

mod llm;
mod rules;
mod scenario;
mod validate;

pub use llm::{parse_plan_text, plan_llm, BackendConfig};
pub use rules::{handover_zone, plan_rule_based};
pub use scenario::{generate_scenarios, mirror_plan, mirror_scenario, Bounds, Scenario};
pub use validate::{validate_plan, ValidationReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point2, Segment2};
use crate::tools::ToolSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArmId {
    Left,
    Right,
}

impl ArmId {
    pub fn other(self) -> ArmId {
        match self {
            ArmId::Left => ArmId::Right,
            ArmId::Right => ArmId::Left,
        }
    }
}

impl std::fmt::Display for ArmId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ArmId::Left => write!(f, "left"),
            ArmId::Right => write!(f, "right"),
        }
    }
}

impl std::str::FromStr for ArmId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "left" => Ok(ArmId::Left),
            "right" => Ok(ArmId::Right),
            other => Err(Error::InvalidParameter(format!("unknown arm `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotSpec {
    pub id: ArmId,
    pub base: Point2,
    pub reach: f64,
}

impl RobotSpec {
    pub fn reaches(&self, p: Point2) -> bool {
        self.base.distance(p) <= self.reach
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub center: Point2,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallSpec {
    pub segments: Vec<Segment2>,
    pub interior_hint: Point2,
}

/// Everything the planner can see.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub robots: Vec<RobotSpec>,
    pub tools: Vec<ToolSpec>,
    pub block: BlockSpec,
    pub walls: Option<WallSpec>,
    pub target: Option<Point2>,
}

impl Observation {
    pub fn validate(&self) -> Result<()> {
        if self.robots.is_empty() {
            return Err(Error::schema("scene.robots", "at least one robot required"));
        }
        for i in 0..self.robots.len() {
            for j in i + 1..self.robots.len() {
                if self.robots[i].id == self.robots[j].id {
                    return Err(Error::schema(
                        "scene.robots",
                        format!("duplicate robot id `{}`", self.robots[i].id),
                    ));
                }
            }
            if self.robots[i].reach <= 0.0 {
                return Err(Error::schema(
                    format!("scene.robots[{i}].reach"),
                    "reach must be > 0",
                ));
            }
        }
        if self.tools.is_empty() {
            return Err(Error::schema("scene.tools", "at least one tool required"));
        }
        for i in 0..self.tools.len() {
            for j in i + 1..self.tools.len() {
                if self.tools[i].id == self.tools[j].id {
                    return Err(Error::schema(
                        "scene.tools",
                        format!("duplicate tool id `{}`", self.tools[i].id),
                    ));
                }
            }
        }
        if self.block.radius <= 0.0 {
            return Err(Error::schema("scene.block.radius", "radius must be > 0"));
        }
        if !self.block.center.is_finite() {
            return Err(Error::schema("scene.block.center", "non-finite coordinate"));
        }
        if let Some(walls) = &self.walls {
            if walls.segments.is_empty() {
                return Err(Error::schema("scene.walls.segments", "empty wall list"));
            }
            crate::affordance::compute_wall_affordances(&walls.segments, walls.interior_hint)?;
        }
        Ok(())
    }

    pub fn robot(&self, id: ArmId) -> Option<&RobotSpec> {
        self.robots.iter().find(|r| r.id == id)
    }

    pub fn tool(&self, id: &str) -> Option<&ToolSpec> {
        self.tools.iter().find(|t| t.id == id)
    }
}

/// The manipulandum's symbolic name in motion-function arguments.
pub const BLOCK: &str = "block";

/// One step of a plan; mirrors the motion-function vocabulary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "fn", rename_all = "lowercase")]
pub enum MotionFunction {
    Grasp {
        arm: ArmId,
        tool: String,
    },
    Approach {
        arm: ArmId,
        tool: String,
        object: String,
    },
    Interact {
        arm: ArmId,
        tool: String,
        object: String,
        goal: Point2,
    },
    Stepping {
        arm: ArmId,
        tool: String,
        object: String,
    },
    Pass {
        arm: ArmId,
        tool: String,
        object: String,
        to_arm: ArmId,
    },
    Release {
        arm: ArmId,
        tool: String,
    },
}

impl MotionFunction {
    pub fn arm(&self) -> ArmId {
        match self {
            MotionFunction::Grasp { arm, .. }
            | MotionFunction::Approach { arm, .. }
            | MotionFunction::Interact { arm, .. }
            | MotionFunction::Stepping { arm, .. }
            | MotionFunction::Pass { arm, .. }
            | MotionFunction::Release { arm, .. } => *arm,
        }
    }

    pub fn tool(&self) -> &str {
        match self {
            MotionFunction::Grasp { tool, .. }
            | MotionFunction::Approach { tool, .. }
            | MotionFunction::Interact { tool, .. }
            | MotionFunction::Stepping { tool, .. }
            | MotionFunction::Pass { tool, .. }
            | MotionFunction::Release { tool, .. } => tool,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MotionFunction::Grasp { .. } => "grasp",
            MotionFunction::Approach { .. } => "approach",
            MotionFunction::Interact { .. } => "interact",
            MotionFunction::Stepping { .. } => "stepping",
            MotionFunction::Pass { .. } => "pass",
            MotionFunction::Release { .. } => "release",
        }
    }
}

impl std::fmt::Display for MotionFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MotionFunction::Grasp { arm, tool } => write!(f, "grasp({arm}, {tool})"),
            MotionFunction::Approach { arm, tool, object } => {
                write!(f, "approach({arm}, {tool}, {object})")
            }
            MotionFunction::Interact {
                arm,
                tool,
                object,
                goal,
            } => write!(
                f,
                "interact({arm}, {tool}, {object}, {:.4}, {:.4})",
                goal.x, goal.y
            ),
            MotionFunction::Stepping { arm, tool, object } => {
                write!(f, "stepping({arm}, {tool}, {object})")
            }
            MotionFunction::Pass {
                arm,
                tool,
                object,
                to_arm,
            } => write!(f, "pass({arm}, {tool}, {object}, {to_arm})"),
            MotionFunction::Release { arm, tool } => write!(f, "release({arm}, {tool})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Plan {
    pub steps: Vec<MotionFunction>,
}

impl Plan {
    pub fn new(steps: Vec<MotionFunction>) -> Self {
        Plan { steps }
    }
}

impl std::fmt::Display for Plan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for step in &self.steps {
            if !first {
                write!(f, "; ")?;
            }
            write!(f, "{step}")?;
            first = false;
        }
        Ok(())
    }
}

/// Instruction plus observation, embedded into a normalized key-value scene
/// summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanningRequest {
    pub instruction: String,
    pub instruction_norm: String,
    pub observation: Observation,
    pub embedded: Vec<(String, String)>,
}

impl PlanningRequest {
    /// Rendered prompt sent to an LLM backend; also the canonical embedding
    /// bytes used by determinism checks.
    pub fn prompt_text(&self) -> String {
        let mut out = String::new();
        out.push_str(
            "You decompose a tabletop tool-manipulation task into motion functions.\n\
             Available functions: grasp(arm, tool); approach(arm, tool, m); \
             interact(arm, tool, m, goal); stepping(arm, tool, m); \
             pass(arm1, tool, m, arm2); release(arm, tool).\n\
             `m` is always `block`; `goal` is `target`, `handover`, or two numbers.\n\
             Reply with one function per line.\n\nScene:\n",
        );
        for (k, v) in &self.embedded {
            out.push_str(k);
            out.push_str(": ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }
}

fn fmt_point(p: Point2) -> String {
    format!("{:.4} {:.4}", p.x, p.y)
}

/// Embeds the instruction and observation into a deterministic key-value
/// summary containing the block and target entries plus tool and wall
/// keypoints.
pub fn embed(instruction: &str, obs: &Observation) -> Result<PlanningRequest> {
    let trimmed = instruction.trim();
    if trimmed.is_empty() {
        return Err(Error::UnderspecifiedTask("empty instruction".into()));
    }
    obs.validate()?;
    if obs.target.is_none() && obs.walls.is_none() {
        return Err(Error::UnderspecifiedTask(
            "neither a target point nor walls are given".into(),
        ));
    }
    let mut embedded = Vec::new();
    embedded.push(("instruction".to_string(), trimmed.to_string()));

    let mut robots: Vec<&RobotSpec> = obs.robots.iter().collect();
    robots.sort_by_key(|r| r.id);
    for r in robots {
        embedded.push((format!("robot.{}.base", r.id), fmt_point(r.base)));
        embedded.push((format!("robot.{}.reach", r.id), format!("{:.4}", r.reach)));
    }
    let mut tools: Vec<&ToolSpec> = obs.tools.iter().collect();
    tools.sort_by(|a, b| a.id.cmp(&b.id));
    for t in tools {
        embedded.push((format!("tool.{}.kind", t.id), t.kind.to_string()));
        embedded.push((format!("tool.{}.grasp", t.id), fmt_point(t.home.position)));
        let pts = t
            .posed_shape(t.home)
            .points()
            .iter()
            .map(|p| fmt_point(*p))
            .collect::<Vec<_>>()
            .join("; ");
        embedded.push((format!("tool.{}.points", t.id), pts));
    }
    embedded.push((
        "block".to_string(),
        format!(
            "{} {:.4}",
            fmt_point(obs.block.center),
            obs.block.radius
        ),
    ));
    match obs.target {
        Some(t) => embedded.push(("target".to_string(), fmt_point(t))),
        None => embedded.push(("target".to_string(), "none".to_string())),
    }
    if let Some(walls) = &obs.walls {
        for (i, s) in walls.segments.iter().enumerate() {
            embedded.push((
                format!("wall.{i}"),
                format!("{} {}", fmt_point(s.a), fmt_point(s.b)),
            ));
        }
        embedded.push((
            "wall.interior".to_string(),
            fmt_point(walls.interior_hint),
        ));
    }
    Ok(PlanningRequest {
        instruction: trimmed.to_string(),
        instruction_norm: trimmed.to_lowercase(),
        observation: obs.clone(),
        embedded,
    })
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embed_contains_block_and_target() {
        let obs = testkit::single_arm_scene();
        let req = embed("Push the block to the target", &obs).unwrap();
        assert!(req.embedded.iter().any(|(k, _)| k == "block"));
        let target = req
            .embedded
            .iter()
            .find(|(k, _)| k == "target")
            .map(|(_, v)| v.clone())
            .unwrap();
        assert_eq!(target, "0.1500 0.2500");
        assert_eq!(req.instruction_norm, "push the block to the target");
    }

    #[test]
    fn embed_rejects_empty_instruction() {
        let obs = testkit::single_arm_scene();
        assert!(matches!(
            embed("   ", &obs),
            Err(Error::UnderspecifiedTask(_))
        ));
    }

    #[test]
    fn embed_rejects_no_task() {
        let mut obs = testkit::single_arm_scene();
        obs.target = None;
        assert!(matches!(
            embed("push it", &obs),
            Err(Error::UnderspecifiedTask(_))
        ));
    }

    #[test]
    fn embed_deterministic() {
        let obs = testkit::dual_arm_scene();
        let a = embed("move the block to the target", &obs).unwrap();
        let b = embed("move the block to the target", &obs).unwrap();
        assert_eq!(a.prompt_text(), b.prompt_text());
        assert_eq!(a.embedded, b.embedded);
    }

    #[test]
    fn plan_serde_round_trip() {
        let plan = Plan::new(vec![
            MotionFunction::Grasp {
                arm: ArmId::Right,
                tool: "hook".into(),
            },
            MotionFunction::Interact {
                arm: ArmId::Right,
                tool: "hook".into(),
                object: BLOCK.into(),
                goal: Point2::new(0.1, 0.2),
            },
        ]);
        let json = serde_json::to_string(&plan).unwrap();
        assert!(json.contains("\"fn\":\"grasp\""));
        let back: Plan = serde_json::from_str(&json).unwrap();
        assert_eq!(plan, back);
    }

    #[test]
    fn observation_validation_catches_duplicates() {
        let mut obs = testkit::single_arm_scene();
        obs.tools[1].id = "hook".into();
        assert!(matches!(obs.validate(), Err(Error::Schema { .. })));
    }
}
