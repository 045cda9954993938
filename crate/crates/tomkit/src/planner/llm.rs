//! Optional LLM planning backend: sends the embedded request to an HTTP
//! endpoint and parses the returned motion-function list.
//!
//! Request body: `{"model": ..., "prompt": ...}`. The response may carry the
//! completion as `text`, `completion`, `choices[0].text`, or
//! `choices[0].message.content`. Parsed plans are validated before being
//! returned.

use std::time::Duration;

use regex::Regex;

use super::{validate_plan, ArmId, MotionFunction, Observation, Plan, PlanningRequest, BLOCK};
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::planner::rules::handover_zone;

/// Environment variable naming the backend endpoint.
pub const ENDPOINT_VAR: &str = "TOM_LLM_ENDPOINT";
/// Environment variable holding the bearer token, if any.
pub const KEY_VAR: &str = "TOM_LLM_KEY";
/// Environment variable overriding the model name.
pub const MODEL_VAR: &str = "TOM_LLM_MODEL";

#[derive(Debug, Clone)]
pub struct BackendConfig {
    pub endpoint: String,
    pub model: String,
    pub api_key: Option<String>,
    pub timeout: Duration,
}

impl BackendConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        BackendConfig {
            endpoint: endpoint.into(),
            model: "tom-planner".into(),
            api_key: None,
            timeout: Duration::from_secs(30),
        }
    }

    pub fn from_env() -> Result<Self> {
        let endpoint = std::env::var(ENDPOINT_VAR).map_err(|_| {
            Error::BackendUnavailable(format!("{ENDPOINT_VAR} is not set"))
        })?;
        let mut config = BackendConfig::new(endpoint);
        if let Ok(model) = std::env::var(MODEL_VAR) {
            config.model = model;
        }
        config.api_key = std::env::var(KEY_VAR).ok();
        Ok(config)
    }
}

/// Sends the request to the backend and parses the completion into a
/// validated plan.
pub fn plan_llm(req: &PlanningRequest, backend: &BackendConfig) -> Result<Plan> {
    let body = serde_json::json!({
        "model": backend.model,
        "prompt": req.prompt_text(),
    });
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(backend.timeout))
        .build()
        .into();
    let mut http = agent.post(&backend.endpoint);
    if let Some(key) = &backend.api_key {
        http = http.header("authorization", &format!("Bearer {key}"));
    }
    let mut response = http
        .send_json(&body)
        .map_err(|e| Error::BackendUnavailable(e.to_string()))?;
    let value: serde_json::Value = response
        .body_mut()
        .read_json()
        .map_err(|e| Error::BackendUnavailable(format!("bad response body: {e}")))?;
    let text = completion_text(&value).ok_or_else(|| {
        Error::BackendUnavailable("response carries no completion text".into())
    })?;
    let plan = parse_plan_text(&text, &req.observation)?;
    let report = validate_plan(&plan, &req.observation);
    if !report.violations.is_empty() {
        return Err(Error::InvalidPlan(report.to_string()));
    }
    Ok(plan)
}

fn completion_text(value: &serde_json::Value) -> Option<String> {
    if let Some(t) = value.get("text").and_then(|v| v.as_str()) {
        return Some(t.to_string());
    }
    if let Some(t) = value.get("completion").and_then(|v| v.as_str()) {
        return Some(t.to_string());
    }
    let choice = value.get("choices")?.get(0)?;
    if let Some(t) = choice.get("text").and_then(|v| v.as_str()) {
        return Some(t.to_string());
    }
    choice
        .get("message")?
        .get("content")?
        .as_str()
        .map(str::to_string)
}

/// Parses motion-function calls out of free text. Unknown tool or arm names
/// yield `InvalidPlan`; text without a single function call yields
/// `MalformedPlanText`.
pub fn parse_plan_text(text: &str, obs: &Observation) -> Result<Plan> {
    let re = Regex::new(r"(?i)\b(grasp|approach|interact|stepping|pass|release)\s*\(([^)]*)\)")
        .expect("static regex");
    let mut steps = Vec::new();
    for cap in re.captures_iter(text) {
        let name = cap[1].to_ascii_lowercase();
        let args: Vec<String> = cap[2]
            .split(',')
            .map(|a| a.trim().trim_matches(|c| c == '"' || c == '\'').to_string())
            .filter(|a| !a.is_empty())
            .collect();
        steps.push(build_step(&name, &args, obs)?);
    }
    if steps.is_empty() {
        let mut raw = text.to_string();
        raw.truncate(500);
        return Err(Error::MalformedPlanText { raw });
    }
    Ok(Plan::new(steps))
}

fn build_step(name: &str, args: &[String], obs: &Observation) -> Result<MotionFunction> {
    let arm = |s: &str| s.parse::<ArmId>().map_err(|_| bad_arg(name, "arm", s));
    let tool = |s: &str| -> Result<String> {
        if obs.tool(s).is_some() {
            Ok(s.to_string())
        } else {
            Err(Error::InvalidPlan(format!(
                "{name}: unknown tool `{s}`"
            )))
        }
    };
    let need = |n: usize| -> Result<()> {
        if args.len() < n {
            Err(Error::InvalidPlan(format!(
                "{name}: expected at least {n} arguments, got {}",
                args.len()
            )))
        } else {
            Ok(())
        }
    };
    match name {
        "grasp" => {
            need(2)?;
            Ok(MotionFunction::Grasp {
                arm: arm(&args[0])?,
                tool: tool(&args[1])?,
            })
        }
        "approach" => {
            need(3)?;
            Ok(MotionFunction::Approach {
                arm: arm(&args[0])?,
                tool: tool(&args[1])?,
                object: BLOCK.into(),
            })
        }
        "interact" => {
            need(4)?;
            Ok(MotionFunction::Interact {
                arm: arm(&args[0])?,
                tool: tool(&args[1])?,
                object: BLOCK.into(),
                goal: parse_goal(&args[3..], obs)?,
            })
        }
        "stepping" => {
            need(3)?;
            Ok(MotionFunction::Stepping {
                arm: arm(&args[0])?,
                tool: tool(&args[1])?,
                object: BLOCK.into(),
            })
        }
        "pass" => {
            need(4)?;
            Ok(MotionFunction::Pass {
                arm: arm(&args[0])?,
                tool: tool(&args[1])?,
                object: BLOCK.into(),
                to_arm: arm(&args[3])?,
            })
        }
        "release" => {
            need(2)?;
            Ok(MotionFunction::Release {
                arm: arm(&args[0])?,
                tool: tool(&args[1])?,
            })
        }
        other => Err(Error::InvalidPlan(format!("unknown function `{other}`"))),
    }
}

fn bad_arg(function: &str, what: &str, value: &str) -> Error {
    Error::InvalidPlan(format!("{function}: bad {what} `{value}`"))
}

fn parse_goal(rest: &[String], obs: &Observation) -> Result<Point2> {
    match rest {
        [one] if one.eq_ignore_ascii_case("target") => obs
            .target
            .ok_or_else(|| Error::InvalidPlan("goal `target` but the scene has none".into())),
        [one] if one.eq_ignore_ascii_case("handover") || one.eq_ignore_ascii_case("zone") => {
            let (Some(a), Some(b)) = (obs.robot(ArmId::Left), obs.robot(ArmId::Right)) else {
                return Err(Error::InvalidPlan("handover goal needs two arms".into()));
            };
            handover_zone(a, b)
                .ok_or_else(|| Error::InvalidPlan("handover goal but reach disks do not overlap".into()))
        }
        [x, y] => {
            let strip = |s: &str| s.trim_matches(|c| c == '(' || c == ')').to_string();
            let px: f64 = strip(x)
                .parse()
                .map_err(|_| bad_arg("interact", "goal x", x))?;
            let py: f64 = strip(y)
                .parse()
                .map_err(|_| bad_arg("interact", "goal y", y))?;
            Ok(Point2::new(px, py))
        }
        other => Err(Error::InvalidPlan(format!(
            "interact: cannot parse goal from {other:?}"
        ))),
    }
}
