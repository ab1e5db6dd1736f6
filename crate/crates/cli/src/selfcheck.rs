use std::time::Instant;

use clap::Args;
use ledlab::admissibility::{check, scenario, AdmissibilityConfig, Verdict};
use ledlab::bare_particle::DensityProfile;
use ledlab::fields::{field_spin, stationary_state, RadialGrid};
use ledlab::gyrodynamics::{GyroConfig, GyroSolver};
use ledlab::renormflow::{flow_sweep, limit_constants, log_grid, observables, PhysicalConstants};
use ledlab::{LedError, Vec3};
use serde::Serialize;

use crate::error::CliError;
use crate::output::Sink;
use crate::Common;

/// Quick invariant suite: one PASS/FAIL line per check. Writes
/// selfcheck.json; any failure exits with code 3.
#[derive(Args, Debug)]
pub struct SelfcheckArgs {
    /// Also run the slower gyrodynamics check.
    #[arg(long)]
    pub full: bool,
}

#[derive(Serialize)]
struct CheckResult {
    name: &'static str,
    pass: bool,
    value: f64,
    tolerance: f64,
    seconds: f64,
}

type Check = (&'static str, f64, fn() -> Result<f64, LedError>);

/// Energy balance W_b + W_f = m_e c² along the flow.
fn energy_balance() -> Result<f64, LedError> {
    let k = PhysicalConstants::new(true);
    let pts = flow_sweep(&log_grid(1e-6, 0.99, 40)?, &k)?;
    Ok(pts.iter().map(|p| (p.w_b + p.w_f - 1.0).abs()).fold(0.0, f64::max))
}

/// Anomaly-free g-factor against (2/3)/(1 − 7α/27).
fn g_factor() -> Result<f64, LedError> {
    let k = PhysicalConstants::new(false);
    let rep = limit_constants(&k);
    let exact = (2.0 / 3.0) / (1.0 - 7.0 * k.alpha / 27.0);
    Ok((rep.g - exact).abs() / exact)
}

/// m_b(R) strictly increasing and ωR/c < 1 on a log grid in R.
fn monotone_flow() -> Result<f64, LedError> {
    let k = PhysicalConstants::new(true);
    let r_lim = k.r_lim();
    let mut prev = 0.0;
    let mut bad = 0.0;
    for r in log_grid(r_lim * (1.0 + 1e-6), 1e3, 200)? {
        let p = observables(r, &k)?;
        if !(p.m_b > prev && p.omega_r_over_c < 1.0) {
            bad += 1.0;
        }
        prev = p.m_b;
    }
    Ok(bad)
}

/// Field spin in potential and Poynting form for a volume charge.
fn field_spin_forms() -> Result<f64, LedError> {
    let fe = DensityProfile::volume(-1.0, 1.0)?;
    let st = stationary_state(&fe, &Vec3::new(0.0, 0.0, 0.5), 1.0)?;
    Ok(field_spin(&st, &RadialGrid::default_for(&fe), 1.0)?.relative_gap)
}

/// Named admissibility verdicts; counts mismatches.
fn admissibility_verdicts() -> Result<f64, LedError> {
    let cases = [
        ("uniform-E-coulomb-abraham", Verdict::Inconsistent),
        ("uniform-E-coulomb-nodvik", Verdict::Consistent),
        ("uniform-B-nodvik", Verdict::ConditionallyConsistent),
    ];
    let mut bad = 0.0;
    for (name, want) in cases {
        let sc = scenario(name).ok_or_else(|| LedError::Input(format!("missing scenario {name}")))?;
        if check(sc.model, &sc.data, &AdmissibilityConfig::default())?.verdict != want {
            bad += 1.0;
        }
    }
    Ok(bad)
}

/// Relative ω drift of exact stationary data over one light crossing.
fn gyro_fixed_point() -> Result<f64, LedError> {
    let mut cfg = GyroConfig::new(DensityProfile::volume(1.0, 1.0)?, DensityProfile::shell(1.0, 1.0)?, 1.0);
    cfg.r_max = 10.0;
    let sol = GyroSolver::new(cfg)?;
    let om = Vec3::new(0.0, 0.0, 0.5);
    let tr = sol.run(&sol.stationary(&om)?, sol.crossing_time(), 10)?;
    Ok(tr.samples.iter().map(|s| (s.omega - om).norm()).fold(0.0, f64::max) / om.norm())
}

pub fn run(common: &Common, a: &SelfcheckArgs) -> Result<(), CliError> {
    let mut checks: Vec<Check> = vec![
        ("energy balance along the flow", 1e-12, energy_balance),
        ("g-factor closed form", 1e-12, g_factor),
        ("monotone subluminal flow", 0.0, monotone_flow),
        ("field-spin double representation", 1e-6, field_spin_forms),
        ("admissibility verdicts", 0.0, admissibility_verdicts),
    ];
    if a.full {
        checks.push(("gyrodynamics fixed point", 1e-6, gyro_fixed_point));
    }
    let mut results = Vec::new();
    for (name, tol, f) in checks {
        let t0 = Instant::now();
        let (pass, value) = match f() {
            Ok(v) => (v <= tol, v),
            Err(e) => {
                eprintln!("{name}: {e}");
                (false, f64::NAN)
            }
        };
        let seconds = t0.elapsed().as_secs_f64();
        if !common.json {
            println!("{} {name}: {value:e} (tolerance {tol:e})", if pass { "PASS" } else { "FAIL" });
        }
        results.push(CheckResult { name, pass, value, tolerance: tol, seconds });
    }
    let mut sink = Sink::new(common)?;
    sink.json("selfcheck.json", &results, true)?;
    let failed = results.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        return Err(LedError::Numerical(format!("{failed} self-check(s) failed")).into());
    }
    sink.finish(&format!("selfcheck: {} checks passed", results.len()));
    Ok(())
}
