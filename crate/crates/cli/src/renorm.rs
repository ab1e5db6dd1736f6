use clap::Args;
use ledlab::renormflow::{flow_sweep, limit_constants, log_grid, PhysicalConstants};
use ledlab::LedError;

use crate::error::CliError;
use crate::output::{Sink, Table};
use crate::Common;

/// Renormalization flow of the electron-matched shell.
///
/// Files: renorm_flow.csv with columns m_b, r, omega_e, omega_r_over_c, t,
/// ln_luminal_gap, w_b, w_f, s_b, s_f, s, g, mu (natural units ħ = m_e = c = 1,
/// radii in Compton lengths), and renorm_limits.json with the endpoint
/// constants. --report prints the limits JSON on stdout.
#[derive(Args, Debug)]
#[command(verbatim_doc_comment)]
pub struct RenormArgs {
    /// m_b/m_e grid: log:a:b:n, lin:a:b:n or list:x1,x2,...; values in (0, 1).
    #[arg(long, default_value = "log:1e-6:0.99:40")]
    pub mb_grid: String,
    /// Include the anomalous magnetic moment.
    #[arg(long, default_value = "on", value_parser = ["on", "off"])]
    pub anomaly: String,
    /// Print the limit constants as JSON on stdout.
    #[arg(long)]
    pub report: bool,
}

/// Parse a grid specification.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::usage(format!("bad grid '{text}': expected log:a:b:n, lin:a:b:n or list:x1,x2,..."));
    let (kind, rest) = text.split_once(':').ok_or_else(bad)?;
    let nums = |s: &str| -> Result<Vec<f64>, CliError> {
        s.split([':', ',']).map(|p| p.trim().parse::<f64>().map_err(|_| bad())).collect()
    };
    match kind {
        "log" | "lin" => {
            let v = nums(rest)?;
            if v.len() != 3 || v[2].fract() != 0.0 || v[2] < 2.0 {
                return Err(bad());
            }
            let n = v[2] as usize;
            if kind == "log" {
                Ok(log_grid(v[0], v[1], n)?)
            } else {
                if !(v[1] > v[0]) {
                    return Err(LedError::Domain("lin grid needs a < b".into()).into());
                }
                Ok((0..n).map(|i| v[0] + (v[1] - v[0]) * i as f64 / (n - 1) as f64).collect())
            }
        }
        "list" => {
            let v = nums(rest)?;
            if v.is_empty() {
                return Err(bad());
            }
            Ok(v)
        }
        _ => Err(bad()),
    }
}

pub fn run(common: &Common, a: &RenormArgs) -> Result<(), CliError> {
    let grid = parse_grid(&a.mb_grid)?;
    if let Some(bad) = grid.iter().find(|m| !(**m > 0.0 && **m < 1.0)) {
        return Err(LedError::Domain(format!("m_b/m_e must lie in (0, 1), got {bad}")).into());
    }
    let k = PhysicalConstants::new(a.anomaly == "on");
    let rows = flow_sweep(&grid, &k)?;
    let mut t = Table::new(vec![
        "m_b",
        "r",
        "omega_e",
        "omega_r_over_c",
        "t",
        "ln_luminal_gap",
        "w_b",
        "w_f",
        "s_b",
        "s_f",
        "s",
        "g",
        "mu",
    ]);
    for p in &rows {
        t.push_nums(&[
            p.m_b,
            p.r,
            p.omega_e,
            p.omega_r_over_c,
            p.t,
            p.ln_luminal_gap,
            p.w_b,
            p.w_f,
            p.s_b,
            p.s_f,
            p.s,
            p.g,
            p.mu,
        ]);
    }
    let limits = limit_constants(&k);
    let mut sink = Sink::new(common)?;
    sink.table("renorm_flow.csv", &t, true)?;
    sink.json("renorm_limits.json", &limits, true)?;
    if a.report && !common.json {
        print!("{}", serde_json::to_string_pretty(&limits)? + "\n");
    }
    if !a.report {
        sink.finish(&format!("renorm-flow: {} points, R_lim = {} R_C", rows.len(), limits.r_lim));
    }
    Ok(())
}
