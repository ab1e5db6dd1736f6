//! Fixed-centre spinning charge coupled to its own Maxwell field.
//!
//! For a spherical charge dq(r) rotating with ω(t) the vector potential stays
//! in the l = 1 toroidal sector, A = w(r, t)×x, and each Cartesian component
//! of w obeys (1/c²)∂²w/∂t² − r⁻⁴∂(r⁴∂w/∂r)/∂r = (4π/c)ρ(r)ω(t). The scalar
//! potential is the static Coulomb one (temporal gauge), so E_dyn = −(1/c)∂A/∂t.
//!
//! Discretization: finite volumes in r with cell weight r⁴ and interface
//! fluxes that are exact for the static solutions a + b/r³, velocity-Verlet in
//! time, and an exact non-reflecting condition for outgoing dipole waves at
//! r_max. The bare spin obeys ds_b/dt = Σᵢ kᵢ(ω×wᵢ − ∂wᵢ/∂t) with
//! kᵢ = (2/3c)∫_cell r² dq, discretized so that s_b + Σᵢ kᵢwᵢ is conserved
//! exactly whenever ω ∥ w.

use serde::{Deserialize, Serialize};

use crate::bare_particle::{bare_energy, bare_spin, omega_from_spin, DensityProfile, ProfileKind};
use crate::error::{LedError, Result};
use crate::fields::stationary_state;
use crate::quadrature::brent;
use crate::Vec3;

/// Solver parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GyroConfig {
    /// Charge profile.
    pub fe: DensityProfile,
    /// Bare mass profile.
    pub fm: DensityProfile,
    pub c: f64,
    /// Outer radius of the grid.
    pub r_max: f64,
    /// Grid cells per charge radius; the shell sits on a node.
    pub cells_per_radius: usize,
    /// Time step as a fraction of the stability limit.
    pub courant: f64,
    /// Radius of the energy audit sphere.
    pub audit_radius: f64,
}

impl GyroConfig {
    /// Defaults: r_max = 10R, 40 cells per R, 0.9 of the stable step, audit
    /// sphere at 3R.
    pub fn new(fe: DensityProfile, fm: DensityProfile, c: f64) -> Self {
        let r = fe.radius;
        Self { fe, fm, c, r_max: 10.0 * r, cells_per_radius: 40, courant: 0.9, audit_radius: 3.0 * r }
    }

    /// Same physics with the grid spacing divided by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        Self { cells_per_radius: self.cells_per_radius * factor, ..self.clone() }
    }
}

/// w(r_i, t), its time derivative and the boundary memory variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToroidalFieldState {
    pub r: Vec<f64>,
    pub w: Vec<Vec3>,
    pub w_dot: Vec<Vec3>,
    /// Minus the retarded dipole amplitude seen at r_max.
    pub boundary: Vec3,
    pub t: f64,
}

/// Field plus bare spin and the angular velocity it implies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GyroEvolutionState {
    pub field: ToroidalFieldState,
    pub sb: Vec3,
    pub omega: Vec3,
    pub t: f64,
}

/// One recorded time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GyroSample {
    pub t: f64,
    pub omega: Vec3,
    pub sb: Vec3,
    /// Interaction spin Σ kᵢwᵢ = (1/c)∫ x×A dq.
    pub se: Vec3,
    pub w_b: f64,
    /// Toroidal field energy inside the audit sphere.
    pub w_field_inside: f64,
    /// Power leaving the audit sphere.
    pub flux: f64,
    /// Time integral of `flux` since the start.
    pub radiated: f64,
}

/// Flat time-series row: t, omega_x/y/z, sb_x/y/z, W_b, W_field_inside, flux.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub t: f64,
    pub omega_x: f64,
    pub omega_y: f64,
    pub omega_z: f64,
    pub sb_x: f64,
    pub sb_y: f64,
    pub sb_z: f64,
    #[serde(rename = "W_b")]
    pub w_b: f64,
    #[serde(rename = "W_field_inside")]
    pub w_field_inside: f64,
    pub flux: f64,
}

impl From<&GyroSample> for CsvRow {
    fn from(s: &GyroSample) -> Self {
        Self {
            t: s.t,
            omega_x: s.omega[0],
            omega_y: s.omega[1],
            omega_z: s.omega[2],
            sb_x: s.sb[0],
            sb_y: s.sb[1],
            sb_z: s.sb[2],
            w_b: s.w_b,
            w_field_inside: s.w_field_inside,
            flux: s.flux,
        }
    }
}

/// Recorded run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub audit_radius: f64,
    pub dt: f64,
    pub samples: Vec<GyroSample>,
    pub final_state: GyroEvolutionState,
}

/// Log-linear fit of |ω(t) − ω_∞| over the tail of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaxationFit {
    pub omega_inf: Vec3,
    /// ω_∞ predicted from the conserved spin (fixed axis) rather than taken
    /// from the last sample.
    pub predicted: bool,
    pub rate: f64,
    pub amplitude: f64,
    /// RMS relative deviation of the data from the fitted exponential.
    pub residual: f64,
    pub n_points: usize,
    pub final_gap: f64,
    pub converged: bool,
}

/// Energy balance W_b + W_field_inside + radiated, relative to the energy
/// radiated through the audit sphere over the whole run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyAudit {
    pub times: Vec<f64>,
    pub residual: Vec<f64>,
    pub radiated: f64,
    /// Divisor used for `residual`: |radiated|, floored at 1e-9 of the
    /// initial energy so round-off radiation does not set the scale.
    pub normalization: f64,
    pub max_abs_residual: f64,
}

/// Gaps between consecutive Picard iterates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardReport {
    pub times: Vec<f64>,
    /// ω of every iterate on the time grid; entry 0 is the constant iterate.
    pub omega: Vec<Vec<Vec3>>,
    /// sup_t |ω⁽ⁿ⁺¹⁾ − ω⁽ⁿ⁾|.
    pub gap_omega: Vec<f64>,
    /// sup_t |s_b⁽ⁿ⁺¹⁾ − s_b⁽ⁿ⁾|.
    pub gap_spin: Vec<f64>,
    /// sup over t and r of |w⁽ⁿ⁺¹⁾ − w⁽ⁿ⁾|.
    pub gap_field: Vec<f64>,
    /// First iterate index whose gap grew tenfold or failed.
    pub diverged_at: Option<usize>,
}

/// Grid, charge deposition and stability limit.
#[derive(Debug, Clone)]
pub struct GyroSolver {
    pub cfg: GyroConfig,
    r: Vec<f64>,
    vol: Vec<f64>,
    /// Interface conductances G_{i+½}, flux = G (w_{i+1} − w_i).
    cond: Vec<f64>,
    /// (node, sᵢ = (1/c)∫_cell r² dq).
    charged: Vec<(usize, f64)>,
    /// Static profile hᵢ for unit ω.
    static_profile: Vec<f64>,
    static_boundary: f64,
    audit: usize,
    dt_max: f64,
}

struct Kicked {
    w: Vec<Vec3>,
    v_half: Vec<Vec3>,
    boundary: Vec3,
}

impl GyroSolver {
    pub fn new(cfg: GyroConfig) -> Result<Self> {
        let big_r = cfg.fe.radius;
        let n = cfg.cells_per_radius;
        if n < 2 {
            return Err(LedError::domain("need at least two cells per radius"));
        }
        if !(cfg.c > 0.0) || !(cfg.courant > 0.0 && cfg.courant <= 1.0) {
            return Err(LedError::domain("c must be positive and the Courant fraction in (0, 1]"));
        }
        let dr = big_r / n as f64;
        let nn = (cfg.r_max / dr).round() as usize;
        if nn <= n + 1 {
            return Err(LedError::domain(format!("r_max = {} must exceed the support radius {big_r}", cfg.r_max)));
        }
        let r: Vec<f64> = (0..=nn).map(|i| big_r * i as f64 / n as f64).collect();
        let half = |i: usize| (i as f64 + 0.5) * dr;
        let mut vol = vec![0.0; nn + 1];
        vol[0] = half(0).powi(5) / 5.0;
        for i in 1..nn {
            vol[i] = (half(i).powi(5) - half(i - 1).powi(5)) / 5.0;
        }
        vol[nn] = (r[nn].powi(5) - half(nn - 1).powi(5)) / 5.0;
        let mut cond = vec![0.0; nn];
        cond[0] = half(0).powi(4) / dr;
        for i in 1..nn {
            cond[i] = 3.0 / (r[i].powi(-3) - r[i + 1].powi(-3));
        }
        let charged = deposit(&cfg.fe, &r, dr, cfg.c)?;
        let audit = (cfg.audit_radius / dr).round() as usize;
        if audit <= n || audit >= nn {
            return Err(LedError::domain(format!(
                "audit radius {} must lie outside the support and inside r_max",
                cfg.audit_radius
            )));
        }
        let c2 = cfg.c * cfg.c;
        let mut lam: f64 = 0.0;
        for i in 0..=nn {
            let gl = if i > 0 { cond[i - 1] } else { 0.0 };
            let gr = if i < nn { cond[i] } else { 2.0 * r[nn].powi(3) };
            lam = lam.max(2.0 * c2 * (gl + gr) / vol[i]);
        }
        let dt_max = 2.0 / lam.sqrt();
        // static profile for unit ω
        let total: f64 = charged.iter().map(|(_, s)| s).sum();
        let k_static = total / 3.0;
        let mut h = vec![0.0; nn + 1];
        h[nn] = k_static / r[nn].powi(3);
        let mut enclosed = vec![0.0; nn + 1];
        for &(i, s) in &charged {
            enclosed[i] += s;
        }
        let mut acc = 0.0;
        let mut flux = vec![0.0; nn];
        for i in 0..nn {
            acc += enclosed[i];
            flux[i] = -acc;
        }
        for i in (0..nn).rev() {
            h[i] = h[i + 1] - flux[i] / cond[i];
        }
        Ok(Self { cfg, r, vol, cond, charged, static_profile: h, static_boundary: -k_static, audit, dt_max })
    }

    pub fn radii(&self) -> &[f64] {
        &self.r
    }

    /// Largest stable time step.
    pub fn dt_max(&self) -> f64 {
        self.dt_max
    }

    /// Default time step.
    pub fn dt(&self) -> f64 {
        self.cfg.courant * self.dt_max
    }

    /// Light-crossing time R/c of the charge radius.
    pub fn crossing_time(&self) -> f64 {
        self.cfg.fe.radius / self.cfg.c
    }

    fn nodes(&self) -> usize {
        self.r.len() - 1
    }

    fn state(&self, w: Vec<Vec3>, w_dot: Vec<Vec3>, boundary: Vec3, sb: Vec3) -> Result<GyroEvolutionState> {
        let omega = self.omega_of(&sb)?;
        let field = ToroidalFieldState { r: self.r.clone(), w, w_dot, boundary, t: 0.0 };
        Ok(GyroEvolutionState { field, sb, omega, t: 0.0 })
    }

    fn omega_of(&self, sb: &Vec3) -> Result<Vec3> {
        let om = omega_from_spin(&self.cfg.fm, sb, self.cfg.c)?;
        let x = om.norm() * self.cfg.fm.radius / self.cfg.c;
        if !(x < 1.0) {
            return Err(LedError::domain(format!("equatorial speed reached c (ωR/c = {x})")));
        }
        Ok(om)
    }

    /// Exact discrete bound state rotating with ω.
    pub fn stationary(&self, omega: &Vec3) -> Result<GyroEvolutionState> {
        let sb = bare_spin(&self.cfg.fm, omega, self.cfg.c)?;
        let w = self.static_profile.iter().map(|h| omega * *h).collect();
        let mut s = self.state(w, vec![Vec3::zeros(); self.r.len()], omega * self.static_boundary, sb)?;
        s.omega = *omega;
        Ok(s)
    }

    /// Continuum bound state sampled on the grid (not an exact fixed point of
    /// the discrete scheme for volume profiles).
    pub fn stationary_sampled(&self, omega: &Vec3) -> Result<GyroEvolutionState> {
        let st = stationary_state(&self.cfg.fe, omega, self.cfg.c)?;
        let w = self.r.iter().map(|r| st.w(*r)).collect();
        let sb = bare_spin(&self.cfg.fm, omega, self.cfg.c)?;
        let boundary = omega * self.static_boundary;
        let mut s = self.state(w, vec![Vec3::zeros(); self.r.len()], boundary, sb)?;
        s.omega = *omega;
        Ok(s)
    }

    /// Bound-state field of ω scaled by `factor`, with bare spin `sb`.
    pub fn scaled_stationary(&self, omega: &Vec3, factor: f64, sb: &Vec3) -> Result<GyroEvolutionState> {
        let w = self.static_profile.iter().map(|h| omega * (*h * factor)).collect();
        self.state(w, vec![Vec3::zeros(); self.r.len()], omega * (self.static_boundary * factor), *sb)
    }

    /// No dynamic field; bare spin `sb`.
    pub fn zero_field(&self, sb: &Vec3) -> Result<GyroEvolutionState> {
        let z = vec![Vec3::zeros(); self.r.len()];
        self.state(z.clone(), z, Vec3::zeros(), *sb)
    }

    /// Add a Gaussian bump a·exp(−((r − r0)/σ)²) to w.
    pub fn with_pulse(&self, s: &GyroEvolutionState, a: &Vec3, r0: f64, sigma: f64) -> GyroEvolutionState {
        let mut out = s.clone();
        for (w, r) in out.field.w.iter_mut().zip(&self.r) {
            *w += a * (-((r - r0) / sigma).powi(2)).exp();
        }
        out
    }

    /// Total of bare and interaction spin, s_b + Σ kᵢwᵢ.
    pub fn total_spin(&self, s: &GyroEvolutionState) -> Vec3 {
        s.sb + self.interaction_spin(&s.field.w)
    }

    fn interaction_spin(&self, w: &[Vec3]) -> Vec3 {
        self.charged.iter().map(|&(i, s)| w[i] * (2.0 / 3.0 * s)).sum()
    }

    /// Stationary ω carrying the total spin `s` (along `s`).
    pub fn stationary_omega_for_spin(&self, s: &Vec3) -> Result<Vec3> {
        let sn = s.norm();
        if sn == 0.0 {
            return Ok(Vec3::zeros());
        }
        let coupling: f64 = self.charged.iter().map(|&(i, si)| 2.0 / 3.0 * si * self.static_profile[i]).sum();
        let c = self.cfg.c;
        let rm = self.cfg.fm.radius;
        let unit = s / sn;
        let f = |x: f64| -> f64 {
            let om = x * c / rm;
            match bare_spin(&self.cfg.fm, &(unit * om), c) {
                Ok(v) => v.norm() + coupling * om - sn,
                Err(_) => f64::INFINITY,
            }
        };
        let mut hi = 0.5;
        let mut k = 1;
        while f(hi) < 0.0 {
            k += 1;
            if k > 52 {
                return Err(LedError::domain("spin too large for a subluminal bound state"));
            }
            hi = 1.0 - 0.5_f64.powi(k);
        }
        let x = brent(f, 0.0, hi, 1e-15)?;
        Ok(unit * (x * c / rm))
    }

    fn explicit_accel(&self, w: &[Vec3], boundary: &Vec3, omega: &Vec3) -> Vec<Vec3> {
        let nn = self.nodes();
        let c2 = self.cfg.c * self.cfg.c;
        let mut src = vec![Vec3::zeros(); nn + 1];
        for &(i, s) in &self.charged {
            src[i] += omega * s;
        }
        let mut acc = vec![Vec3::zeros(); nn + 1];
        let mut fin = Vec3::zeros();
        for i in 0..=nn {
            let fout =
                if i < nn { (w[i + 1] - w[i]) * self.cond[i] } else { boundary - w[nn] * (2.0 * self.r[nn].powi(3)) };
            acc[i] = (fout - fin + src[i]) * (c2 / self.vol[i]);
            fin = fout;
        }
        acc
    }

    fn damping(&self) -> f64 {
        let nn = self.nodes();
        self.cfg.c * self.r[nn].powi(4) / self.vol[nn]
    }

    fn kick_drift(&self, f: &ToroidalFieldState, dt: f64, omega: &Vec3) -> Kicked {
        let nn = self.nodes();
        let h = 0.5 * dt;
        let acc = self.explicit_accel(&f.w, &f.boundary, omega);
        let mut v_half: Vec<Vec3> = f.w_dot.iter().zip(&acc).map(|(v, a)| v + a * h).collect();
        v_half[nn] /= 1.0 + h * self.damping();
        let w: Vec<Vec3> = f.w.iter().zip(&v_half).map(|(w, v)| w + v * dt).collect();
        let rn = self.r[nn];
        let beta = self.cfg.c * dt / (2.0 * rn);
        let boundary =
            (f.boundary * (1.0 - beta) - (f.w[nn] + w[nn]) * (0.5 * self.cfg.c * dt * rn * rn)) / (1.0 + beta);
        Kicked { w, v_half, boundary }
    }

    fn kick(&self, k: Kicked, dt: f64, omega: &Vec3, t: f64) -> ToroidalFieldState {
        let nn = self.nodes();
        let h = 0.5 * dt;
        let acc = self.explicit_accel(&k.w, &k.boundary, omega);
        let mut w_dot: Vec<Vec3> = k.v_half.iter().zip(&acc).map(|(v, a)| v + a * h).collect();
        w_dot[nn] /= 1.0 + h * self.damping();
        ToroidalFieldState { r: self.r.clone(), w: k.w, w_dot, boundary: k.boundary, t }
    }

    /// s_b⁽ⁿ⁺¹⁾ = s_b − Σkᵢ(wᵢ⁽ⁿ⁺¹⁾ − wᵢ) + dt ω̄ × Σkᵢw̄ᵢ with midpoint averages.
    fn spin_update(&self, sb: &Vec3, w0: &[Vec3], w1: &[Vec3], om0: &Vec3, om1: &Vec3, dt: f64) -> Vec3 {
        let mut out = *sb;
        let mut wa = Vec3::zeros();
        for &(i, s) in &self.charged {
            let k = 2.0 / 3.0 * s;
            out -= (w1[i] - w0[i]) * k;
            wa += (w0[i] + w1[i]) * (0.5 * k);
        }
        out + ((om0 + om1) * 0.5).cross(&wa) * dt
    }

    fn check_dt(&self, dt: f64) -> Result<()> {
        if !(dt > 0.0) || dt > self.dt_max * (1.0 + 1e-12) {
            return Err(LedError::constraint(format!("time step {dt} violates the stability limit {}", self.dt_max)));
        }
        Ok(())
    }

    /// Advance field, bare spin and ω by dt.
    pub fn step(&self, s: &GyroEvolutionState, dt: f64) -> Result<GyroEvolutionState> {
        self.check_dt(dt)?;
        let k = self.kick_drift(&s.field, dt, &s.omega);
        // ω⁽ⁿ⁺¹⁾ = ω(s_b⁽ⁿ⁺¹⁾) while s_b⁽ⁿ⁺¹⁾ depends on ω⁽ⁿ⁺¹⁾ through the
        // precession term; fixed-point iteration, exact after one pass on a
        // fixed axis.
        let mut sb1 = self.spin_update(&s.sb, &s.field.w, &k.w, &s.omega, &s.omega, dt);
        let mut om1 = if sb1 == s.sb { s.omega } else { self.omega_of(&sb1)? };
        for _ in 0..60 {
            let sb_next = self.spin_update(&s.sb, &s.field.w, &k.w, &s.omega, &om1, dt);
            if (sb_next - sb1).norm() <= 1e-16 * (1.0 + sb1.norm()) {
                break;
            }
            sb1 = sb_next;
            om1 = self.omega_of(&sb1)?;
        }
        let t = s.t + dt;
        let field = self.kick(k, dt, &om1, t);
        Ok(GyroEvolutionState { field, sb: sb1, omega: om1, t })
    }

    /// Field energy inside the audit node a: cell kinetic and interface
    /// terms plus (2/3) r_a³ |w_a|².
    pub fn field_energy_inside(&self, f: &ToroidalFieldState) -> f64 {
        let a = self.audit;
        let c2 = self.cfg.c * self.cfg.c;
        let mut e = 0.0;
        for i in 0..=a {
            e += self.vol[i] * f.w_dot[i].norm_squared() / (3.0 * c2);
        }
        for i in 0..a {
            e += self.cond[i] * (f.w[i + 1] - f.w[i]).norm_squared() / 3.0;
        }
        e + 2.0 / 3.0 * self.r[a].powi(3) * f.w[a].norm_squared()
    }

    /// Power leaving the audit sphere.
    pub fn audit_flux(&self, f: &ToroidalFieldState) -> f64 {
        let a = self.audit;
        let flux = (f.w[a + 1] - f.w[a]) * self.cond[a];
        -2.0 / 3.0 * f.w_dot[a].dot(&flux) - 4.0 / 3.0 * self.r[a].powi(3) * f.w_dot[a].dot(&f.w[a])
    }

    fn sample(&self, s: &GyroEvolutionState, radiated: f64) -> Result<GyroSample> {
        Ok(GyroSample {
            t: s.t,
            omega: s.omega,
            sb: s.sb,
            se: self.interaction_spin(&s.field.w),
            w_b: bare_energy(&self.cfg.fm, s.omega.norm(), self.cfg.c)?,
            w_field_inside: self.field_energy_inside(&s.field),
            flux: self.audit_flux(&s.field),
            radiated,
        })
    }

    /// Integrate over `horizon` with the default step (shortened to divide the
    /// horizon evenly), recording every `record_every` steps.
    pub fn run(&self, initial: &GyroEvolutionState, horizon: f64, record_every: usize) -> Result<Trajectory> {
        let steps = ((horizon / self.dt()).ceil() as usize).max(1);
        let dt = horizon / steps as f64;
        let every = record_every.max(1);
        let mut s = initial.clone();
        let mut radiated = 0.0;
        let mut p_prev = self.audit_flux(&s.field);
        let mut samples = vec![self.sample(&s, 0.0)?];
        for n in 1..=steps {
            s = self.step(&s, dt)?;
            let p = self.audit_flux(&s.field);
            radiated += 0.5 * dt * (p + p_prev);
            p_prev = p;
            if n % every == 0 || n == steps {
                samples.push(self.sample(&s, radiated)?);
            }
        }
        Ok(Trajectory { audit_radius: self.r[self.audit], dt, samples, final_state: s })
    }

    /// Run and fit the exponential approach to the stationary state.
    pub fn run_to_stationary(&self, initial: &GyroEvolutionState, horizon: f64) -> Result<(Trajectory, RelaxationFit)> {
        let traj = self.run(initial, horizon, 1)?;
        let fit = self.relaxation_fit(initial, &traj)?;
        Ok((traj, fit))
    }

    fn fixed_axis(s: &GyroEvolutionState) -> bool {
        let axis = if s.sb.norm() > 0.0 { s.sb.normalize() } else { return false };
        let off = |v: &Vec3| (v - axis * axis.dot(v)).norm() <= 1e-14 * v.norm();
        off(&s.omega) && s.field.w.iter().all(off) && s.field.w_dot.iter().all(off) && off(&s.field.boundary)
    }

    /// Earliest return of a wave from r_max to the charge, 2(r_max − 2R)/c
    /// including a one-diameter margin. The boundary condition is exact only in
    /// the continuum limit, so its small echo ends the clean relaxation window.
    pub fn echo_time(&self) -> f64 {
        2.0 * (self.r[self.nodes()] - 2.0 * self.cfg.fe.radius) / self.cfg.c
    }

    /// Log-linear fit of the envelope of |ω − ω_∞| up to the end of the run
    /// or the first boundary echo, whichever comes first.
    ///
    /// The deviation along its dominant direction oscillates with lobes of
    /// alternating sign whose heights differ by a slowly varying factor, so the
    /// envelope is the geometric mean of neighbouring lobe peaks.
    /// The fit starts after the largest lobe and stops once the decay stalls
    /// at the discretization noise floor. A deviation that never changes sign
    /// is fitted sample by sample.
    pub fn relaxation_fit(&self, initial: &GyroEvolutionState, traj: &Trajectory) -> Result<RelaxationFit> {
        let last = traj.samples.last().ok_or_else(|| LedError::numerical("empty trajectory"))?;
        let predicted = Self::fixed_axis(initial);
        let start = traj.samples[0].t;
        let omega_inf = if predicted { self.stationary_omega_for_spin(&self.total_spin(initial))? } else { last.omega };
        let mut t_end = last.t.min(start + self.echo_time());
        if !predicted {
            t_end = t_end.min(start + 0.8 * (last.t - start));
        }
        let window: Vec<(f64, Vec3)> =
            traj.samples.iter().filter(|s| s.t <= t_end).map(|s| (s.t, s.omega - omega_inf)).collect();
        let axis = window.iter().map(|(_, d)| *d).fold(Vec3::zeros(), |m, d| if d.norm() > m.norm() { d } else { m });
        let axis = if axis.norm() > 0.0 { axis.normalize() } else { Vec3::z() };
        // (time, |peak|, sign) of each complete lobe.
        let mut lobes: Vec<(f64, f64, bool)> = Vec::new();
        let mut cur: Option<(f64, f64, bool)> = None;
        let mut first = true;
        for (t, d) in &window {
            let x = d.dot(&axis);
            let pos = x >= 0.0;
            match cur {
                Some(ref mut l) if l.2 == pos => {
                    if x.abs() > l.1 {
                        *l = (*t, x.abs(), pos);
                    }
                }
                _ => {
                    if let Some(l) = cur {
                        if !first {
                            lobes.push(l);
                        }
                        first = false;
                    }
                    cur = Some((*t, x.abs(), pos));
                }
            }
        }
        let floor = 1e-12 * omega_inf.norm().max(1e-300);
        let mut use_pts: Vec<(f64, f64, bool)> = Vec::new();
        if lobes.len() >= 4 {
            let peak = lobes.iter().enumerate().fold(0, |k, (i, p)| if p.1 > lobes[k].1 { i } else { k });
            let floor = floor.max(1e-7 * lobes[peak].1);
            let mut prev_t = lobes[peak].0;
            let mut spacing = Vec::new();
            for &l in lobes.iter().skip(peak + 1) {
                // Noise lobes are low and short.
                let short = !spacing.is_empty() && l.0 - prev_t < 0.6 * median(&spacing);
                if l.1 <= floor || short {
                    break;
                }
                spacing.push(l.0 - prev_t);
                prev_t = l.0;
                let stalled = use_pts.iter().rev().find(|p| p.2 == l.2).is_some_and(|p| l.1 > 0.5 * p.1);
                if stalled {
                    break;
                }
                use_pts.push(l);
            }
        } else {
            let t0 = start + 0.3 * (t_end - start);
            use_pts = window
                .iter()
                .filter(|(t, d)| *t >= t0 && d.norm() > floor)
                .map(|(t, d)| (*t, d.norm(), true))
                .collect();
        }
        let final_gap = (last.omega - omega_inf).norm() / omega_inf.norm().max(1e-300);
        if use_pts.len() < 3 {
            return Ok(RelaxationFit {
                omega_inf,
                predicted,
                rate: f64::NAN,
                amplitude: f64::NAN,
                residual: f64::NAN,
                n_points: use_pts.len(),
                final_gap,
                converged: final_gap < 1e-10,
            });
        }
        // Opposite-sign lobes differ by a slowly varying factor that cancels in
        // the geometric mean of neighbours.
        let env: Vec<(f64, f64)> = if use_pts.iter().all(|p| p.2 == use_pts[0].2) {
            use_pts.iter().map(|p| (p.0, p.1)).collect()
        } else {
            use_pts.windows(2).map(|w| (0.5 * (w[0].0 + w[1].0), (w[0].1 * w[1].1).sqrt())).collect()
        };
        let n = env.len() as f64;
        let (mt, my) = env.iter().fold((0.0, 0.0), |(a, b), (t, d)| (a + t / n, b + d.ln() / n));
        let (mut sxy, mut sxx) = (0.0, 0.0);
        for (t, d) in &env {
            sxy += (t - mt) * (d.ln() - my);
            sxx += (t - mt) * (t - mt);
        }
        let slope = sxy / sxx;
        let intercept = my - slope * mt;
        let residual =
            (env.iter().map(|(t, d)| ((d.ln() - intercept - slope * t).exp() - 1.0).powi(2)).sum::<f64>() / n).sqrt();
        Ok(RelaxationFit {
            omega_inf,
            predicted,
            rate: -slope,
            amplitude: intercept.exp(),
            residual,
            n_points: use_pts.len(),
            final_gap,
            converged: slope < 0.0 && final_gap < 1e-3,
        })
    }

    /// Waveform Picard iteration: iterate n+1 evolves field and bare spin with
    /// ω⁽ⁿ⁾(t) prescribed, using the same discrete formulas as [`step`]. The
    /// zeroth iterate is constant in time.
    ///
    /// [`step`]: GyroSolver::step
    pub fn picard_iterate(&self, initial: &GyroEvolutionState, n_max: usize, horizon: f64) -> Result<PicardReport> {
        let steps = ((horizon / self.dt()).ceil() as usize).max(1);
        let dt = horizon / steps as f64;
        let times: Vec<f64> = (0..=steps).map(|n| initial.t + n as f64 * dt).collect();
        let mut omega = vec![vec![initial.omega; steps + 1]];
        let mut prev_sb = vec![initial.sb; steps + 1];
        let mut prev_w: Vec<Vec<Vec3>> = vec![initial.field.w.clone(); steps + 1];
        let (mut gap_omega, mut gap_spin, mut gap_field) = (Vec::new(), Vec::new(), Vec::new());
        let mut diverged_at = None;
        for m in 0..n_max {
            let om_prev = omega.last().unwrap().clone();
            let mut field = initial.field.clone();
            let mut sb = initial.sb;
            let mut om_new = vec![initial.omega; steps + 1];
            let mut sb_new = vec![initial.sb; steps + 1];
            let mut w_new = vec![initial.field.w.clone(); steps + 1];
            let mut failed = false;
            for n in 0..steps {
                let k = self.kick_drift(&field, dt, &om_prev[n]);
                sb = self.spin_update(&sb, &field.w, &k.w, &om_prev[n], &om_prev[n + 1], dt);
                field = self.kick(k, dt, &om_prev[n + 1], times[n + 1]);
                match self.omega_of(&sb) {
                    Ok(o) => om_new[n + 1] = o,
                    Err(_) => {
                        failed = true;
                        break;
                    }
                }
                sb_new[n + 1] = sb;
                w_new[n + 1] = field.w.clone();
            }
            if failed {
                diverged_at = Some(m + 1);
                break;
            }
            let sup = |a: &[Vec3], b: &[Vec3]| a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            let go = sup(&om_new, &om_prev);
            gap_omega.push(go);
            gap_spin.push(sup(&sb_new, &prev_sb));
            gap_field.push(w_new.iter().zip(&prev_w).map(|(a, b)| sup(a, b)).fold(0.0, f64::max));
            omega.push(om_new);
            prev_sb = sb_new;
            prev_w = w_new;
            let l = gap_omega.len();
            if l >= 2 && gap_omega[l - 1] > 10.0 * gap_omega[l - 2] {
                diverged_at = Some(m + 1);
                break;
            }
            if go <= 1e-15 * initial.omega.norm().max(1e-300) {
                break;
            }
        }
        Ok(PicardReport { times, omega, gap_omega, gap_spin, gap_field, diverged_at })
    }
}

/// sᵢ = (1/c)∫_cell r² dq on the grid nodes.
fn deposit(fe: &DensityProfile, r: &[f64], dr: f64, c: f64) -> Result<Vec<(usize, f64)>> {
    let big_r = fe.radius;
    let ct = fe.continuous_total();
    let mut out = Vec::new();
    match &fe.kind {
        ProfileKind::Shell => {
            let k = (big_r / dr).round() as usize;
            out.push((k, ct * big_r * big_r / c));
        }
        ProfileKind::Volume => {
            for i in 0..r.len() {
                let a = if i == 0 { 0.0 } else { (r[i] - 0.5 * dr).min(big_r) };
                let b = (r[i] + 0.5 * dr).min(big_r);
                if b <= a {
                    break;
                }
                out.push((i, ct * 3.0 * (b.powi(5) - a.powi(5)) / (5.0 * big_r.powi(3)) / c));
            }
        }
        ProfileKind::Table(_) => {
            let mut acc = vec![0.0; r.len()];
            for (rr, dq) in fe.radial_nodes(0) {
                let x = rr / dr;
                let i = (x.floor() as usize).min(r.len() - 2);
                let f = x - i as f64;
                acc[i] += (1.0 - f) * rr * rr * dq / c;
                acc[i + 1] += f * rr * rr * dq / c;
            }
            out.extend(acc.into_iter().enumerate().filter(|(_, s)| *s != 0.0));
        }
    }
    Ok(out)
}

/// Energy balance of a recorded run; `r_audit` must be the radius the run was
/// recorded with.
pub fn energy_audit(traj: &Trajectory, r_audit: f64) -> Result<EnergyAudit> {
    if (r_audit - traj.audit_radius).abs() > 1e-9 * traj.audit_radius {
        return Err(LedError::Input(format!("trajectory was audited at r = {}, not {r_audit}", traj.audit_radius)));
    }
    let first = traj.samples.first().ok_or_else(|| LedError::numerical("empty trajectory"))?;
    let e0 = first.w_b + first.w_field_inside;
    let radiated = traj.samples.last().map(|s| s.radiated).unwrap_or(0.0);
    // Round-off radiation from a stationary run must not set the scale.
    let floor = 1e-9 * (first.w_b.abs() + first.w_field_inside.abs()).max(f64::MIN_POSITIVE);
    let normalization = radiated.abs().max(floor);
    let times = traj.samples.iter().map(|s| s.t).collect();
    let residual: Vec<f64> =
        traj.samples.iter().map(|s| (s.w_b + s.w_field_inside - e0 + s.radiated) / normalization).collect();
    let max_abs_residual = residual.iter().fold(0.0, |m: f64, r| m.max(r.abs()));
    Ok(EnergyAudit { times, residual, radiated, normalization, max_abs_residual })
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    s[s.len() / 2]
}
