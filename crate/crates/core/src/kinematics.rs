//! Worldline and gyrograph kinematics.
//!
//! Four-velocities are dimensionless, u = (γ, γv/c), so that u·u = −1. The
//! four-acceleration is a = du/dτ and the gyrograph tensor Ω_E carries units of
//! inverse time; the rest-frame three-acceleration is therefore c·√(a·a).

use serde::{Deserialize, Serialize};

use crate::error::{LedError, Result};
use crate::minkowski::{inner, wedge_up, FourVector, Rank2Tensor, DEFAULT_TOL};
use crate::Vec3;

/// One event on a worldline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorldlineSample {
    pub tau: f64,
    pub z: FourVector,
    pub u: FourVector,
    pub a: FourVector,
}

/// One point of the gyrograph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GyrographSample {
    pub tau: f64,
    pub omega_e: Rank2Tensor,
    pub w_e: FourVector,
}

/// u = (γ, γ v/c) for a subluminal three-velocity.
pub fn four_velocity(v3: &Vec3, c: f64) -> Result<FourVector> {
    let beta = v3 / c;
    let b2 = beta.norm_squared();
    if !(b2 < 1.0) {
        return Err(LedError::domain(format!("|v| = {} is not below c = {c}", v3.norm())));
    }
    let gamma = 1.0 / (1.0 - b2).sqrt();
    Ok(FourVector::from_parts(gamma, gamma * beta))
}

/// Fermi–Walker tensor Ω_FW = a ∧ u.
pub fn fermi_walker(u: &FourVector, a: &FourVector) -> Result<Rank2Tensor> {
    let n = u.norm2() + 1.0;
    if n.abs() > DEFAULT_TOL || u.c[0] <= 0.0 {
        return Err(LedError::constraint(format!("u not future unit timelike (‖u‖²+1 = {n:e})")));
    }
    let ua = inner(u, a);
    if ua.abs() > DEFAULT_TOL * (1.0 + a.max_abs()) {
        return Err(LedError::constraint(format!("a·u = {ua:e} ≠ 0")));
    }
    Ok(wedge_up(a, u))
}

/// Thomas precession ω_T = (γ−1)(a×v)/|v|².
///
/// The factor is evaluated as γ/(c²(1+√(1−v²/c²))), which is regular at v = 0
/// where the result is the zero vector by continuous extension.
pub fn thomas_precession(v3: &Vec3, a3: &Vec3, c: f64) -> Result<Vec3> {
    let b2 = v3.norm_squared() / (c * c);
    if !(b2 < 1.0) {
        return Err(LedError::domain("thomas_precession needs |v| < c"));
    }
    let s = (1.0 - b2).sqrt();
    let factor = 1.0 / (s * (1.0 + s) * c * c);
    Ok(factor * a3.cross(v3))
}

/// Residuals and bound checks for a worldline/gyrograph sample pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityFlags {
    /// ‖u‖² + 1
    pub unit_residual: f64,
    /// u·a
    pub accel_orthogonality_residual: f64,
    /// max |Ω_E·u|
    pub omega_u_residual: f64,
    /// ‖w_E‖ R / c
    pub equatorial_speed: f64,
    pub equatorial_ok: bool,
    /// Rest-frame acceleration times R over c².
    pub rest_accel_ratio: f64,
    pub rest_accel_ok: bool,
    /// Frame acceleration |q̈| over the bound c²/(Rγ³).
    pub frame_accel_ratio: f64,
    pub frame_accel_ok: bool,
    pub constraints_ok: bool,
}

impl AdmissibilityFlags {
    pub fn all_ok(&self) -> bool {
        self.constraints_ok && self.equatorial_ok && self.rest_accel_ok && self.frame_accel_ok
    }
}

/// Check the unit/orthogonality constraints and the subluminal and acceleration
/// bounds for a particle of radius `r`.
pub fn validate_state(w: &WorldlineSample, g: &GyrographSample, r: f64, c: f64, tol: f64) -> AdmissibilityFlags {
    let unit_residual = w.u.norm2() + 1.0;
    let accel_orthogonality_residual = inner(&w.u, &w.a);
    let omega_u_residual = g.omega_e.act(&w.u).max_abs();
    let wnorm = g.w_e.norm2().max(0.0).sqrt();
    let equatorial_speed = wnorm * r / c;
    let rest_accel = c * w.a.norm2().max(0.0).sqrt();
    let rest_accel_ratio = rest_accel * r / (c * c);
    let gamma = w.u.c[0];
    let u3 = w.u.space();
    let qdd = (c / gamma) * (w.a.space() / gamma - u3 * (w.a.c[0] / (gamma * gamma)));
    let frame_accel_ratio = qdd.norm() * r * gamma.powi(3) / (c * c);
    let constraints_ok =
        unit_residual.abs() <= tol && accel_orthogonality_residual.abs() <= tol && omega_u_residual <= tol;
    AdmissibilityFlags {
        unit_residual,
        accel_orthogonality_residual,
        omega_u_residual,
        equatorial_speed,
        equatorial_ok: equatorial_speed < 1.0,
        rest_accel_ratio,
        rest_accel_ok: rest_accel_ratio < 1.0,
        frame_accel_ratio,
        frame_accel_ok: frame_accel_ratio < 1.0,
        constraints_ok,
    }
}
