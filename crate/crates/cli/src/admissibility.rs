use std::path::PathBuf;

use clap::Args;
use ledlab::admissibility::{check, scenario, AdmissibilityConfig, InitialData, Model, Scenario, SCENARIOS};
use ledlab::LedError;

use crate::error::CliError;
use crate::output::Sink;
use crate::Common;

/// Initial-data constraint check for the Nodvik and Abraham models.
///
/// Input is a built-in --scenario or a --data JSON file holding either a
/// scenario {name, model, data} or bare initial data {fe, c, fields, v0,
/// omega0} checked against --model. Writes admissibility.json with the
/// verdict (consistent | conditionally-consistent | inconsistent), the
/// field moments, the minimum-norm q̇₀ and ω₀, the free directions of the
/// admissible family and the case analysis.
#[derive(Args, Debug)]
#[command(verbatim_doc_comment)]
pub struct AdmissibilityArgs {
    /// Built-in scenario name (see --list).
    #[arg(long, conflicts_with = "data")]
    pub scenario: Option<String>,
    /// JSON data file.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Model for bare initial data; overrides the model of a scenario file.
    #[arg(long, value_parser = ["nodvik", "abraham_spin", "abraham_nospin"])]
    pub model: Option<String>,
    /// Relative zero tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub zero_tol: f64,
    /// List the built-in scenarios and exit.
    #[arg(long)]
    pub list: bool,
}

fn parse_model(s: &str) -> Model {
    match s {
        "nodvik" => Model::Nodvik,
        "abraham_spin" => Model::AbrahamSpin,
        _ => Model::AbrahamNospin,
    }
}

fn load(path: &PathBuf, model: Option<Model>) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| LedError::Input(format!("{}: {e}", path.display())))?;
    let malformed = |e: serde_json::Error| LedError::Input(format!("{}: {e}", path.display()));
    if value.get("data").is_some() {
        let mut s: Scenario = serde_json::from_value(value).map_err(malformed)?;
        if let Some(m) = model {
            s.model = m;
        }
        Ok(s)
    } else {
        let data: InitialData = serde_json::from_value(value).map_err(malformed)?;
        let model = model.ok_or_else(|| CliError::usage("bare initial data need --model"))?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Ok(Scenario { name, model, data })
    }
}

pub fn run(common: &Common, a: &AdmissibilityArgs) -> Result<(), CliError> {
    if a.list {
        for s in SCENARIOS {
            println!("{s}");
        }
        return Ok(());
    }
    let model = a.model.as_deref().map(parse_model);
    let sc = match (&a.scenario, &a.data) {
        (Some(name), None) => {
            let mut s = scenario(name).ok_or_else(|| CliError::usage(format!("unknown scenario '{name}'")))?;
            if let Some(m) = model {
                s.model = m;
            }
            s
        }
        (None, Some(p)) => load(p, model)?,
        _ => return Err(CliError::usage("give --scenario NAME or --data FILE")),
    };
    let cfg = AdmissibilityConfig { zero_tol: a.zero_tol, ..Default::default() };
    let report = check(sc.model, &sc.data, &cfg)?;
    let out = serde_json::json!({ "scenario": sc.name, "report": report });
    let mut sink = Sink::new(common)?;
    sink.json("admissibility.json", &out, true)?;
    let verdict = serde_json::to_value(report.verdict)?;
    sink.finish(&format!("{}: {}", sc.name, verdict.as_str().unwrap_or("?")));
    Ok(())
}
