use clap::{Args, ValueEnum};
use ledlab::bare_particle::DensityProfile;
use ledlab::fields::{field_spin, stationary_state, RadialGrid};
use ledlab::{LedError, Vec3};
use serde::Serialize;

use crate::error::CliError;
use crate::output::{Sink, Table};
use crate::Common;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileArg {
    Shell,
    Volume,
}

pub fn profile(kind: ProfileArg, total: f64, radius: f64) -> Result<DensityProfile, CliError> {
    Ok(match kind {
        ProfileArg::Shell => DensityProfile::shell(total, radius)?,
        ProfileArg::Volume => DensityProfile::volume(total, radius)?,
    })
}

/// Stationary bound state of a charge profile rotating about e3.
///
/// Files: stationary.json (magnetic moment, field energy, field spin in
/// potential and Poynting form) and stationary_profile.csv with columns
/// r, enclosed_charge, phi, e_r, w_over_omega, w_over_omega_prime, where
/// A = w×x and w(r) = w_over_omega(r) ω.
#[derive(Args, Debug)]
pub struct StationaryArgs {
    #[arg(long, value_enum, default_value = "shell")]
    pub profile: ProfileArg,
    /// Total charge.
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub charge: f64,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Speed of light in the chosen units.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Equatorial speed ωR/c; must be below 1.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub omega_r_over_c: f64,
    /// Number of rows in the radial profile table, on [0, r-max].
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
    /// Outer radius of the profile table in units of R.
    #[arg(long, default_value_t = 5.0)]
    pub r_max: f64,
}

#[derive(Serialize)]
struct StationaryReport {
    profile: ProfileArg,
    charge: f64,
    radius: f64,
    c: f64,
    omega: Vec3,
    omega_r_over_c: f64,
    magnetic_moment: Vec3,
    field_energy: f64,
    field_spin_potential: Vec3,
    field_spin_poynting: Vec3,
    field_spin_relative_gap: f64,
}

pub fn run(common: &Common, a: &StationaryArgs) -> Result<(), CliError> {
    if !(a.c > 0.0) {
        return Err(LedError::Domain("c must be positive".into()).into());
    }
    if !(a.omega_r_over_c.abs() < 1.0) {
        return Err(LedError::Domain(format!("superluminal rotation: ωR/c = {}", a.omega_r_over_c)).into());
    }
    if a.samples < 2 || !(a.r_max > 0.0) {
        return Err(CliError::usage("need --samples ≥ 2 and --r-max > 0"));
    }
    let fe = profile(a.profile, a.charge, a.radius)?;
    let omega = Vec3::new(0.0, 0.0, a.omega_r_over_c * a.c / a.radius);
    let st = stationary_state(&fe, &omega, a.c)?;
    let fs = field_spin(&st, &RadialGrid::default_for(&fe), 1.0)?;
    let report = StationaryReport {
        profile: a.profile,
        charge: a.charge,
        radius: a.radius,
        c: a.c,
        omega,
        omega_r_over_c: a.omega_r_over_c,
        magnetic_moment: st.magnetic_moment(),
        field_energy: st.field_energy(),
        field_spin_potential: fs.potential_form,
        field_spin_poynting: fs.poynting_form,
        field_spin_relative_gap: fs.relative_gap,
    };
    let mut t = Table::new(vec!["r", "enclosed_charge", "phi", "e_r", "w_over_omega", "w_over_omega_prime"]);
    for i in 0..a.samples {
        let r = a.r_max * a.radius * i as f64 / (a.samples - 1) as f64;
        t.push_nums(&[r, st.enclosed(r), st.phi(r), st.e_radial(r), st.w_factor(r) / a.c, st.w_factor_prime(r) / a.c]);
    }
    let mut sink = Sink::new(common)?;
    sink.json("stationary.json", &report, true)?;
    sink.table("stationary_profile.csv", &t, true)?;
    sink.finish(&format!("stationary: W_f = {}, s_f = {}", report.field_energy, report.field_spin_potential.z));
    Ok(())
}
