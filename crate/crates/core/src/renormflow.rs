//! Stationary renormalization flow: matching charge, mass and magnetic moment
//! of the shell model to electron data, the bare mass m_b(R), its inverse, and
//! the limit constants at m_b → 0.
//!
//! Internally natural units ħ = m_e = c = 1, e² = α, so R_C = 1. The flow is
//! parametrized by x = R_lim/R = ωR/c ∈ (0, 1) and by t = Artanh x, in which
//! the endpoint m_b → 0 sits at t → ∞.

use serde::{Deserialize, Serialize};

use crate::error::{LedError, Result};
use crate::quadrature::brent;

/// Fine-structure constant used by default.
pub const ALPHA: f64 = 1.0 / 137.036;
/// Electron magnetic anomaly.
pub const ANOMALY: f64 = 0.001159652;

/// Physical constants for the flow (natural units: ħ = m_e = c = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub alpha: f64,
    pub anomaly: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { alpha: ALPHA, anomaly: ANOMALY }
    }
}

impl PhysicalConstants {
    pub fn new(include_anomaly: bool) -> Self {
        Self { alpha: ALPHA, anomaly: if include_anomaly { ANOMALY } else { 0.0 } }
    }

    /// Elementary charge e = √α.
    pub fn e(&self) -> f64 {
        self.alpha.sqrt()
    }

    /// Bohr magneton ħe/(2 m_e c).
    pub fn mu_bohr(&self) -> f64 {
        0.5 * self.e()
    }

    /// μ_e = (1+a) μ_B.
    pub fn mu_e(&self) -> f64 {
        (1.0 + self.anomaly) * self.mu_bohr()
    }

    /// Compton length ħ/(m_e c).
    pub fn compton_length(&self) -> f64 {
        1.0
    }

    /// Classical electron radius e²/(m_e c²) = α R_C.
    pub fn classical_radius(&self) -> f64 {
        self.alpha
    }

    /// R_lim = 3μ_e/e, the radius where ωR = c.
    pub fn r_lim(&self) -> f64 {
        3.0 * self.mu_e() / self.e()
    }

    /// Photonic mass m_e(1 − 11α/27) for a = 0; with the anomaly the same
    /// endpoint formula W_b(R_lim).
    pub fn photonic_mass(&self) -> f64 {
        1.0 - field_energy_at(self, self.r_lim())
    }
}

/// One point of the flow curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenormPoint {
    pub r: f64,
    pub omega_e: f64,
    /// ωR/c
    pub omega_r_over_c: f64,
    /// Flow coordinate t = Artanh(ωR/c)
    pub t: f64,
    /// ln(1 − ωR/c), finite wherever the rotation is subluminal even when
    /// ωR/c rounds to 1
    pub ln_luminal_gap: f64,
    pub m_b: f64,
    pub w_b: f64,
    pub w_f: f64,
    pub s_b: f64,
    pub s_f: f64,
    pub s: f64,
    pub g: f64,
    pub mu: f64,
}

/// Field energy of the matched shell, (e²/2R)(1 + (2/9)(ωR/c)²).
fn field_energy_at(k: &PhysicalConstants, r: f64) -> f64 {
    let x = k.r_lim() / r;
    0.5 * k.alpha / r * (1.0 + 2.0 / 9.0 * x * x)
}

/// ω = 3μ_e c/(e R²).
pub fn omega_of_r(r: f64, k: &PhysicalConstants) -> Result<f64> {
    if !(r > 0.0) {
        return Err(LedError::domain(format!("R must be positive, got {r}")));
    }
    Ok(k.r_lim() / (r * r))
}

fn check_branch(r: f64, k: &PhysicalConstants) -> Result<()> {
    if !(r > k.r_lim()) || !r.is_finite() {
        return Err(LedError::domain(format!("R = {r} is outside the admissible branch R > 3μ_e/e = {}", k.r_lim())));
    }
    Ok(())
}

/// m_b(R) = m_e x [1 − (e²/2R)(1 + (2/9)x²)] / Artanh x with x = 3μ_e/(eR).
pub fn mb_of_r(r: f64, k: &PhysicalConstants) -> Result<f64> {
    check_branch(r, k)?;
    let x = k.r_lim() / r;
    Ok((1.0 - field_energy_at(k, r)) * x / x.atanh())
}

/// Flow coordinate t = Artanh(R_lim/R); the right side of the branch is t → 0.
pub fn t_of_r(r: f64, k: &PhysicalConstants) -> Result<f64> {
    check_branch(r, k)?;
    Ok((k.r_lim() / r).atanh())
}

/// R(t) = R_lim / tanh t.
pub fn r_of_t(t: f64, k: &PhysicalConstants) -> Result<f64> {
    if !(t > 0.0) {
        return Err(LedError::domain(format!("flow coordinate must be positive, got {t}")));
    }
    Ok(k.r_lim() / t.tanh())
}

/// m_b as a function of the flow coordinate; m_b(∞) = 0.
pub fn mb_of_t(t: f64, k: &PhysicalConstants) -> Result<f64> {
    if t.is_infinite() {
        return Ok(0.0);
    }
    let r = r_of_t(t, k)?;
    let x = t.tanh();
    Ok((1.0 - field_energy_at(k, r)) * x / t)
}

/// Relative excess R/R_lim − 1 = 2/(e^{2t} − 1), accurate when it is tiny.
pub fn excess_of_t(t: f64) -> f64 {
    2.0 / (2.0 * t).exp_m1()
}

/// ln(1 − tanh t) = ln 2 − 2t − ln(1 + e^{−2t}).
pub fn ln_luminal_gap(t: f64) -> f64 {
    std::f64::consts::LN_2 - 2.0 * t - (-2.0 * t).exp().ln_1p()
}

/// Inverse flow coordinate t(m_b) by Brent on t.
pub fn t_of_mb(mb: f64, k: &PhysicalConstants) -> Result<f64> {
    if !(mb > 0.0) || !(mb < 1.0) {
        return Err(LedError::domain(format!("m_b/m_e = {mb} must lie in (0, 1)")));
    }
    let f = |t: f64| mb_of_t(t, k).unwrap_or(f64::NAN) - mb;
    let mut lo = 1e-3;
    while f(lo) < 0.0 {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(LedError::domain("no finite R for this m_b"));
        }
    }
    let mut hi = 2.0 * lo.max(1.0);
    while f(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(LedError::numerical("could not bracket the flow coordinate"));
        }
    }
    brent(f, lo, hi, 1e-15)
}

/// R(m_b), the unique radius with mb_of_r(R) = m_b.
pub fn r_of_mb(mb: f64, k: &PhysicalConstants) -> Result<f64> {
    r_of_t(t_of_mb(mb, k)?, k)
}

fn point_at(t: f64, r: f64, k: &PhysicalConstants) -> RenormPoint {
    let x = if t.is_infinite() { 1.0 } else { t.tanh() };
    let w_f = field_energy_at(k, r);
    let w_b = 1.0 - w_f;
    let m_b = if t.is_infinite() { 0.0 } else { w_b * x / t };
    // W_b = m_b Artanh(x)/x and s_b = m_b R h(x) with h from the shell closed
    // form; expressed through W_b so that the endpoint is regular.
    let s_b = r * (w_b * (1.0 + x * x) / (2.0 * x) - m_b / (2.0 * x));
    let s_f = 2.0 / 9.0 * k.alpha * x;
    let s = s_b + s_f;
    RenormPoint {
        r,
        omega_e: x / r,
        omega_r_over_c: x,
        t,
        ln_luminal_gap: ln_luminal_gap(t),
        m_b,
        w_b,
        w_f,
        s_b,
        s_f,
        s,
        g: 2.0 * k.mu_e() / (k.e() * s),
        mu: k.mu_e(),
    }
}

/// All flow observables at radius R on the admissible branch.
pub fn observables(r: f64, k: &PhysicalConstants) -> Result<RenormPoint> {
    let t = t_of_r(r, k)?;
    Ok(point_at(t, r, k))
}

/// Observables at flow coordinate t (t = ∞ gives the m_b → 0 endpoint).
pub fn observables_at_t(t: f64, k: &PhysicalConstants) -> Result<RenormPoint> {
    let r = if t.is_infinite() { k.r_lim() } else { r_of_t(t, k)? };
    Ok(point_at(t, r, k))
}

/// The flow table on a grid of m_b/m_e values.
pub fn flow_sweep(mb_grid: &[f64], k: &PhysicalConstants) -> Result<Vec<RenormPoint>> {
    mb_grid
        .iter()
        .map(|mb| {
            let t = t_of_mb(*mb, k)?;
            observables_at_t(t, k).map(|mut p| {
                p.m_b = *mb;
                p
            })
        })
        .collect()
}

/// Logarithmic grid of n points on [a, b].
pub fn log_grid(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    if !(a > 0.0 && b > a) || n < 2 {
        return Err(LedError::domain(format!("log grid needs 0 < a < b and n ≥ 2 (got {a}, {b}, {n})")));
    }
    let (la, lb) = (a.ln(), b.ln());
    Ok((0..n).map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp()).collect())
}

/// Limit constants of the flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub alpha: f64,
    pub anomaly: f64,
    /// R_lim / R_C
    pub r_lim: f64,
    /// m_ph / m_e
    pub m_ph: f64,
    /// bare, field and total spin at the endpoint, in units of ħ
    pub s_b_lim: f64,
    pub s_f_lim: f64,
    pub s_ren: f64,
    /// (3/2)(1 − 7α/27)
    pub s_ren_closed_form: f64,
    /// g at the endpoint
    pub g: f64,
    /// g₀ = 2/3
    pub g0: f64,
    /// g₀(1 + (7/27)α + (7/27)²α²)
    pub g_series_order2: f64,
    /// κ = m_e c²/(ħ² (1 − 11α/27)), the factor in Ω_E = κ S_ph
    pub kappa: f64,
    /// Euler frequency m_e c²/ħ, the factor in Ω_E = (m_e c²/ħ) Σ
    pub euler_frequency: f64,
    /// κ |S_ph| in units of m_e c²/ħ
    pub kappa_times_s_ph: f64,
    /// Endpoint angular speed of the stationary flow, c/R_lim
    pub omega_endpoint: f64,
}

/// Endpoint constants of the flow.
pub fn limit_constants(k: &PhysicalConstants) -> LimitReport {
    let p = point_at(f64::INFINITY, k.r_lim(), k);
    let q = 7.0 * k.alpha / 27.0;
    let g0 = 2.0 / 3.0;
    LimitReport {
        alpha: k.alpha,
        anomaly: k.anomaly,
        r_lim: k.r_lim(),
        m_ph: p.w_b,
        s_b_lim: p.s_b,
        s_f_lim: p.s_f,
        s_ren: p.s,
        s_ren_closed_form: 1.5 * (1.0 - q),
        g: p.g,
        g0,
        g_series_order2: g0 * (1.0 + q + q * q),
        kappa: 1.0 / (1.0 - 11.0 * k.alpha / 27.0),
        euler_frequency: 1.0,
        kappa_times_s_ph: 1.5 * (1.0 - 11.0 * k.alpha / 27.0) / (1.0 - 11.0 * k.alpha / 27.0),
        omega_endpoint: p.omega_e,
    }
}
