//! Batch front end for annulus-core: strict JSON experiment configurations,
//! JSON result documents and CSV plot data.

pub mod commands;
pub mod config;
pub mod plot;

use commands::{ErrorReport, Output};
use config::ExperimentConfig;
use serde::Serialize;
use std::time::Instant;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultDocument {
    pub version: &'static str,
    pub inputs: ExperimentConfig,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<Output>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorReport>,
    pub wall_time_s: f64,
}

pub fn execute(config: ExperimentConfig) -> ResultDocument {
    let start = Instant::now();
    let result = commands::run(&config);
    let wall_time_s = start.elapsed().as_secs_f64();
    let (exit_code, output, error) = match result {
        Ok(o) => (0, Some(o), None),
        Err(f) => (f.code, None, Some(f.report)),
    };
    ResultDocument {
        version: annulus_core::VERSION,
        inputs: config,
        exit_code,
        output,
        error,
        wall_time_s,
    }
}
