//! Planar non-prehensile tool-object manipulation.
//!
//! The crate models a tabletop with reach-limited arms, polyline tools, a
//! disk-shaped object, and optional walls. It provides:
//!
//! - [`affordance`]: active tool affordances, passive wall affordances, and
//!   the confined-area exit vector;
//! - [`manoeuvrability`]: rasterized manoeuvrability fields and selection of
//!   the highest-manoeuvrability contact point `p*`;
//! - [`planner`]: symbolic task decomposition into motion functions, plan
//!   validation, scenario generation, and an optional LLM backend;
//! - [`controller`]: pose construction for the interact motion and the
//!   alternating reposition / rotation-drag stepping controller;
//! - [`simworld`]: a quasi-static push simulator that executes plans and
//!   records run logs;
//! - [`scene`] / [`render`] / [`cli`]: JSON scene and plan files, SVG/PGM/CSV
//!   artifacts, and the `tom` command-line entry points.
//!
//! See the `examples/` directory for one runnable example per capability.

pub mod affordance;
pub mod cli;
pub mod config;
pub mod controller;
pub mod error;
pub mod geometry;
pub mod manoeuvrability;
pub mod planner;
pub mod render;
pub mod scene;
pub mod simworld;
pub mod tools;

pub use error::{Error, Result};
