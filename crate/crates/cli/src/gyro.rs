use clap::Args;
use ledlab::bare_particle::DensityProfile;
use ledlab::gyrodynamics::{energy_audit, CsvRow, GyroConfig, GyroEvolutionState, GyroSolver};
use ledlab::{LedError, Vec3};
use serde::Serialize;

use crate::error::CliError;
use crate::output::{num, parse_vec3, Sink, Table};
use crate::stationary::{profile, ProfileArg};
use crate::Common;

/// Toroidal (l = 1) gyrodynamics of a particle spinning about a fixed point.
///
/// Files: gyro_timeseries.csv with columns t, omega_x, omega_y, omega_z,
/// sb_x, sb_y, sb_z, W_b, W_field_inside, flux, omega_gap, where omega_gap
/// is |ω(t) − ω_∞|; gyro_fit.json with the exponential relaxation fit and
/// gyro_audit.json with the energy balance. With --picard N the run is
/// replaced by N waveform Picard iterates and gyro_picard.csv lists
/// iterate, gap_omega, gap_spin, gap_field.
#[derive(Args, Debug)]
#[command(verbatim_doc_comment)]
pub struct GyroArgs {
    /// Charge profile.
    #[arg(long, value_enum, default_value = "volume")]
    pub profile: ProfileArg,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub charge: f64,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Bare mass, carried by a shell of the same radius.
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Stationary angular velocity ω as x,y,z; the start is built from it.
    #[arg(long, default_value = "0,0,0.5", value_parser = parse_vec3, allow_hyphen_values = true)]
    pub omega: Vec3,
    /// stationary | scaled:F | zero | pulse:A:R0:SIGMA (pulse along ω added to
    /// the stationary field).
    #[arg(long, default_value = "stationary")]
    pub start: String,
    /// Simulated time.
    #[arg(long, default_value_t = 40.0)]
    pub horizon: f64,
    /// Outer grid radius in units of R.
    #[arg(long, default_value_t = 20.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 40)]
    pub cells_per_radius: usize,
    /// Time step as a fraction of the stability limit.
    #[arg(long, default_value_t = 0.9)]
    pub courant: f64,
    /// Write every N-th step to the time series.
    #[arg(long, default_value_t = 10)]
    pub record_every: usize,
    /// Run N Picard iterates instead of the direct integration.
    #[arg(long)]
    pub picard: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
enum Start {
    Stationary,
    Scaled(f64),
    Zero,
    Pulse(f64, f64, f64),
}

fn parse_start(s: &str) -> Result<Start, CliError> {
    let bad = || CliError::usage(format!("bad --start '{s}': expected stationary, scaled:F, zero or pulse:A:R0:SIGMA"));
    let mut parts = s.split(':');
    let kind = parts.next().unwrap_or("");
    let v: Vec<f64> = parts.map(|p| p.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_, _>>()?;
    match (kind, v.as_slice()) {
        ("stationary", []) => Ok(Start::Stationary),
        ("scaled", [f]) => Ok(Start::Scaled(*f)),
        ("zero", []) => Ok(Start::Zero),
        ("pulse", [a, r0, sig]) if *sig > 0.0 => Ok(Start::Pulse(*a, *r0, *sig)),
        _ => Err(bad()),
    }
}

fn initial(sol: &GyroSolver, omega: &Vec3, start: &Start) -> Result<GyroEvolutionState, CliError> {
    let st = sol.stationary(omega)?;
    let axis = if omega.norm() > 0.0 { omega.normalize() } else { Vec3::z() };
    Ok(match *start {
        Start::Stationary => st,
        Start::Scaled(f) => sol.scaled_stationary(omega, f, &st.sb)?,
        Start::Zero => sol.zero_field(&st.sb)?,
        Start::Pulse(a, r0, sig) => sol.with_pulse(&st, &(axis * a), r0, sig),
    })
}

#[derive(Serialize)]
struct PicardSummary {
    iterates: usize,
    diverged_at: Option<usize>,
    gap_omega: Vec<f64>,
}

pub fn run(common: &Common, a: &GyroArgs) -> Result<(), CliError> {
    let start = parse_start(&a.start)?;
    if !(a.horizon > 0.0) || a.record_every == 0 {
        return Err(CliError::usage("need --horizon > 0 and --record-every ≥ 1"));
    }
    let fe = profile(a.profile, a.charge, a.radius)?;
    let fm = DensityProfile::shell(a.mass, a.radius)?;
    let mut cfg = GyroConfig::new(fe, fm, a.c);
    cfg.r_max = a.r_max * a.radius;
    cfg.cells_per_radius = a.cells_per_radius;
    cfg.courant = a.courant;
    if !(a.omega.norm() * a.radius < a.c) {
        return Err(
            LedError::Domain(format!("superluminal rotation: ωR/c = {}", a.omega.norm() * a.radius / a.c)).into()
        );
    }
    let sol = GyroSolver::new(cfg)?;
    let init = initial(&sol, &a.omega, &start)?;
    let mut sink = Sink::new(common)?;

    if let Some(n) = a.picard {
        let rep = sol.picard_iterate(&init, n, a.horizon)?;
        let mut t = Table::new(vec!["iterate", "gap_omega", "gap_spin", "gap_field"]);
        for k in 0..rep.gap_omega.len() {
            t.rows.push(vec![(k + 1).to_string(), num(rep.gap_omega[k]), num(rep.gap_spin[k]), num(rep.gap_field[k])]);
        }
        sink.table("gyro_picard.csv", &t, true)?;
        let summary = PicardSummary {
            iterates: rep.gap_omega.len(),
            diverged_at: rep.diverged_at,
            gap_omega: rep.gap_omega.clone(),
        };
        sink.json("gyro_picard.json", &summary, true)?;
        sink.finish(&format!(
            "picard: {} iterates, last gap {}",
            summary.iterates,
            rep.gap_omega.last().copied().unwrap_or(0.0)
        ));
        return Ok(());
    }

    // Fit and audit use every step; only the table is thinned.
    let traj = sol.run(&init, a.horizon, 1)?;
    let fit = sol.relaxation_fit(&init, &traj)?;
    let audit = energy_audit(&traj, traj.audit_radius)?;
    let mut t = Table::new(vec![
        "t",
        "omega_x",
        "omega_y",
        "omega_z",
        "sb_x",
        "sb_y",
        "sb_z",
        "W_b",
        "W_field_inside",
        "flux",
        "omega_gap",
    ]);
    let last = traj.samples.len() - 1;
    for (i, s) in traj.samples.iter().enumerate() {
        if i % a.record_every != 0 && i != last {
            continue;
        }
        let r = CsvRow::from(s);
        t.push_nums(&[
            r.t,
            r.omega_x,
            r.omega_y,
            r.omega_z,
            r.sb_x,
            r.sb_y,
            r.sb_z,
            r.w_b,
            r.w_field_inside,
            r.flux,
            (s.omega - fit.omega_inf).norm(),
        ]);
    }
    sink.table("gyro_timeseries.csv", &t, true)?;
    sink.json("gyro_fit.json", &fit, true)?;
    sink.json("gyro_audit.json", &audit, false)?;
    sink.finish(&format!(
        "gyro-sim: {} samples, rate {}, fit residual {}, audit residual {}",
        t.rows.len(),
        fit.rate,
        fit.residual,
        audit.max_abs_residual
    ));
    Ok(())
}
