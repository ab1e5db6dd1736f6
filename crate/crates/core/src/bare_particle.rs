//! Radial density profiles and the inertial functionals of the bare particle:
//! gyrational mass, moment of inertia, bare spin and its inversion.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{LedError, Result};
use crate::minkowski::{Rank2Tensor, Symmetry};
use crate::quadrature::{adaptive_gk, brent, GlRule};
use crate::Vec3;

/// Shape of the continuous part of a profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ProfileKind {
    /// Uniform surface measure on |x| = R.
    Shell,
    /// Uniform volume measure on |x| ≤ R.
    Volume,
    /// Tabulated density f(r), piecewise linear in dm/dr.
    Table(RadialTable),
}

/// Tabulated radial measure: nodes `r` and normalized dm/dr values `g`
/// (trapezoid integral of `g` equals one).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialTable {
    pub r: Vec<f64>,
    pub g: Vec<f64>,
}

/// Radial mass or charge measure with total `total`, support radius `radius`
/// and an optional point fraction at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub kind: ProfileKind,
    pub total: f64,
    pub radius: f64,
    pub point_fraction: f64,
}

const GK_REL: f64 = 1e-13;
const GK_ABS: f64 = 1e-15;

impl DensityProfile {
    fn checked(kind: ProfileKind, total: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(LedError::domain(format!("profile radius must be positive, got {radius}")));
        }
        if !total.is_finite() {
            return Err(LedError::domain("profile total must be finite"));
        }
        Ok(Self { kind, total, radius, point_fraction: 0.0 })
    }

    pub fn shell(total: f64, radius: f64) -> Result<Self> {
        Self::checked(ProfileKind::Shell, total, radius)
    }

    pub fn volume(total: f64, radius: f64) -> Result<Self> {
        Self::checked(ProfileKind::Volume, total, radius)
    }

    /// Profile from a two-column text table `r density`; `#` starts a comment
    /// and columns may be separated by whitespace or commas. The density is
    /// rescaled so the measure integrates to `total`.
    pub fn from_table_str(text: &str, total: f64) -> Result<Self> {
        let mut r = Vec::new();
        let mut f = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> =
                line.split(|ch: char| ch == ',' || ch.is_whitespace()).filter(|s| !s.is_empty()).collect();
            if cols.len() != 2 {
                return Err(LedError::Input(format!("line {}: expected two columns", ln + 1)));
            }
            let parse = |s: &str| s.parse::<f64>().map_err(|e| LedError::Input(format!("line {}: {e}", ln + 1)));
            let (ri, fi) = (parse(cols[0])?, parse(cols[1])?);
            if !(ri >= 0.0) || !(fi >= 0.0) || !ri.is_finite() || !fi.is_finite() {
                return Err(LedError::Input(format!("line {}: negative or non-finite entry", ln + 1)));
            }
            if let Some(&last) = r.last() {
                if ri <= last {
                    return Err(LedError::Input(format!("line {}: radii must increase", ln + 1)));
                }
            }
            r.push(ri);
            f.push(fi);
        }
        if r.len() < 2 {
            return Err(LedError::Input("table needs at least two rows".into()));
        }
        let g: Vec<f64> = r.iter().zip(&f).map(|(ri, fi)| 4.0 * std::f64::consts::PI * ri * ri * fi).collect();
        let z = trapezoid(&r, &g);
        if !(z > 0.0) {
            return Err(LedError::Input("table density integrates to zero".into()));
        }
        let radius = *r.last().expect("non-empty");
        let g = g.iter().map(|x| x / z).collect();
        Self::checked(ProfileKind::Table(RadialTable { r, g }), total, radius)
    }

    pub fn from_table_file(path: &Path, total: f64) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LedError::Input(format!("{}: {e}", path.display())))?;
        Self::from_table_str(&text, total)
    }

    /// Put the fraction `pf ∈ [0, 1)` of the total at the origin.
    pub fn with_point_fraction(mut self, pf: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&pf) {
            return Err(LedError::domain(format!("point fraction must lie in [0, 1), got {pf}")));
        }
        self.point_fraction = pf;
        Ok(self)
    }

    /// Same shape with a different total.
    pub fn with_total(&self, total: f64) -> Self {
        Self { total, ..self.clone() }
    }

    /// Weight of the continuous part.
    pub fn continuous_total(&self) -> f64 {
        self.total * (1.0 - self.point_fraction)
    }

    pub fn point_total(&self) -> f64 {
        self.total * self.point_fraction
    }

    pub fn is_shell(&self) -> bool {
        matches!(self.kind, ProfileKind::Shell)
    }

    /// ∫ h(r) dm(r) including the point part.
    pub fn integrate<H: FnMut(f64) -> f64>(&self, mut h: H) -> Result<f64> {
        let ct = self.continuous_total();
        let cont = match &self.kind {
            ProfileKind::Shell => ct * h(self.radius),
            ProfileKind::Volume => {
                let r3 = self.radius.powi(3);
                let q = adaptive_gk(|r| h(r) * 3.0 * r * r / r3, 0.0, self.radius, GK_ABS, GK_REL)?;
                ct * q.value
            }
            ProfileKind::Table(t) => {
                let vals: Vec<f64> = t.r.iter().zip(&t.g).map(|(r, g)| h(*r) * g).collect();
                ct * trapezoid(&t.r, &vals)
            }
        };
        let pt = if self.point_fraction > 0.0 { self.point_total() * h(0.0) } else { 0.0 };
        Ok(cont + pt)
    }

    /// Discrete radial atoms (r, dm) representing the measure for smooth
    /// integrands; `n` Gauss–Legendre points are used for a volume profile.
    pub fn radial_nodes(&self, n: usize) -> Vec<(f64, f64)> {
        let ct = self.continuous_total();
        let mut out = Vec::new();
        match &self.kind {
            ProfileKind::Shell => out.push((self.radius, ct)),
            ProfileKind::Volume => {
                let r3 = self.radius.powi(3);
                for (r, w) in GlRule::new(n).mapped(0.0, self.radius) {
                    out.push((r, ct * w * 3.0 * r * r / r3));
                }
            }
            ProfileKind::Table(t) => {
                for i in 0..t.r.len() {
                    let lo = if i > 0 { t.r[i] - t.r[i - 1] } else { 0.0 };
                    let hi = if i + 1 < t.r.len() { t.r[i + 1] - t.r[i] } else { 0.0 };
                    out.push((t.r[i], ct * t.g[i] * 0.5 * (lo + hi)));
                }
            }
        }
        if self.point_fraction > 0.0 {
            out.push((0.0, self.point_total()));
        }
        out
    }

    /// Density per unit volume at radius r of the continuous part; zero for a
    /// shell (whose measure is singular).
    pub fn density(&self, r: f64) -> f64 {
        let ct = self.continuous_total();
        match &self.kind {
            ProfileKind::Shell => 0.0,
            ProfileKind::Volume => {
                if r < self.radius {
                    ct * 3.0 / (4.0 * std::f64::consts::PI * self.radius.powi(3))
                } else {
                    0.0
                }
            }
            ProfileKind::Table(t) => {
                if r <= 0.0 || r > self.radius {
                    return 0.0;
                }
                ct * interp(&t.r, &t.g, r) / (4.0 * std::f64::consts::PI * r * r)
            }
        }
    }

    /// Whether r lies on the shell up to rounding (a few ulps).
    fn on_shell(&self, r: f64) -> bool {
        (r - self.radius).abs() <= 8.0 * f64::EPSILON * self.radius
    }

    /// ∫_{r' < r} r'^k dm(r'); a shell at r' = r counts with weight ½.
    pub fn inner_moment(&self, k: i32, r: f64) -> f64 {
        let ct = self.continuous_total();
        let pt = if k == 0 && r > 0.0 { self.point_total() } else { 0.0 };
        let cont = match &self.kind {
            ProfileKind::Shell => {
                let w = if self.on_shell(r) {
                    0.5
                } else if r > self.radius {
                    1.0
                } else {
                    0.0
                };
                ct * w * self.radius.powi(k)
            }
            ProfileKind::Volume => {
                let rr = r.min(self.radius);
                ct * 3.0 * rr.powi(k + 3) / ((k + 3) as f64 * self.radius.powi(3))
            }
            ProfileKind::Table(t) => ct * partial_trapezoid(t, |x| x.powi(k), r, true),
        };
        cont + pt
    }

    /// ∫_{r' > r} dm(r')/r' over the continuous part; a shell at r' = r counts
    /// with weight ½.
    pub fn outer_inverse_moment(&self, r: f64) -> f64 {
        let ct = self.continuous_total();
        match &self.kind {
            ProfileKind::Shell => {
                let w = if self.on_shell(r) {
                    0.5
                } else if r < self.radius {
                    1.0
                } else {
                    0.0
                };
                ct * w / self.radius
            }
            ProfileKind::Volume => {
                let rr = r.min(self.radius);
                ct * 1.5 * (self.radius * self.radius - rr * rr) / self.radius.powi(3)
            }
            ProfileKind::Table(t) => ct * partial_trapezoid(t, |x| if x > 0.0 { 1.0 / x } else { 0.0 }, r, false),
        }
    }

    /// ∫ |x|² dm.
    pub fn second_moment(&self) -> f64 {
        self.inner_moment(2, f64::INFINITY)
    }

    /// Moment of inertia I_b = (2/3)∫|x|² dm.
    pub fn moment_of_inertia(&self) -> f64 {
        2.0 / 3.0 * self.second_moment()
    }
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1])).sum()
}

fn interp(x: &[f64], y: &[f64], at: f64) -> f64 {
    if at <= x[0] {
        return y[0];
    }
    let i = x.partition_point(|v| *v < at).min(x.len() - 1);
    let t = (at - x[i - 1]) / (x[i] - x[i - 1]);
    y[i - 1] + t * (y[i] - y[i - 1])
}

/// Trapezoid integral of weight(r)·g(r) over r' < r (inner) or r' > r.
fn partial_trapezoid<W: Fn(f64) -> f64>(t: &RadialTable, weight: W, r: f64, inner: bool) -> f64 {
    let mut xs = Vec::with_capacity(t.r.len() + 1);
    let mut ys = Vec::with_capacity(t.r.len() + 1);
    for (ri, gi) in t.r.iter().zip(&t.g) {
        if (inner && *ri < r) || (!inner && *ri > r) {
            xs.push(*ri);
            ys.push(weight(*ri) * gi);
        }
    }
    if r > t.r[0] && r < *t.r.last().expect("non-empty") {
        let gi = interp(&t.r, &t.g, r);
        if inner {
            xs.push(r);
            ys.push(weight(r) * gi);
        } else {
            xs.insert(0, r);
            ys.insert(0, weight(r) * gi);
        }
    }
    if xs.len() < 2 {
        return 0.0;
    }
    trapezoid(&xs, &ys)
}

/// Artanh(x)/x, with its series near zero.
pub fn artanh_over_x(x: f64) -> f64 {
    if x.abs() < 0.05 {
        let x2 = x * x;
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 0..30 {
            sum += term / (2 * k + 1) as f64;
            term *= x2;
        }
        sum
    } else {
        x.atanh() / x
    }
}

/// Dimensionless shell spin function h(x) = (1+1/x²)/2·Artanh x − 1/(2x), so
/// that a thin shell of mass m and radius r has spin m·c·r·h(ωr/c).
pub fn shell_spin_function(x: f64) -> f64 {
    if x.abs() < 0.05 {
        let x2 = x * x;
        let mut pw = x;
        let mut sum = 0.0;
        for k in 0..30 {
            let kf = k as f64;
            sum += (2.0 * kf + 2.0) / ((2.0 * kf + 1.0) * (2.0 * kf + 3.0)) * pw;
            pw *= x2;
        }
        sum
    } else {
        0.5 * (1.0 + 1.0 / (x * x)) * x.atanh() - 0.5 / x
    }
}

fn check_subluminal(fm: &DensityProfile, omega: f64, c: f64) -> Result<f64> {
    let x = omega.abs() * fm.radius / c;
    if !(x < 1.0) {
        return Err(LedError::domain(format!("equatorial speed ωR/c = {x} is not below 1")));
    }
    Ok(x)
}

/// Relativistic gyrational mass 𝓜_b(ω) = ∫ Artanh(ωr/c)/(ωr/c) dm.
pub fn gyrational_mass(fm: &DensityProfile, omega: f64, c: f64) -> Result<f64> {
    check_subluminal(fm, omega, c)?;
    let w = omega.abs();
    fm.integrate(|r| artanh_over_x(w * r / c))
}

/// Magnitude of the bare spin at angular speed ω ≥ 0, without the domain check.
fn spin_magnitude(fm: &DensityProfile, omega: f64, c: f64) -> Result<f64> {
    fm.integrate(|r| c * r * shell_spin_function(omega * r / c))
}

/// Bare spin ∫ x×(ω×x)/√(1−|ω×x|²/c²) dm.
pub fn bare_spin(fm: &DensityProfile, omega3: &Vec3, c: f64) -> Result<Vec3> {
    let w = omega3.norm();
    check_subluminal(fm, w, c)?;
    if w == 0.0 {
        return Ok(Vec3::zeros());
    }
    Ok(omega3 / w * spin_magnitude(fm, w, c)?)
}

/// Bare kinetic-plus-rest energy W_b = 𝓜_b c².
pub fn bare_energy(fm: &DensityProfile, omega: f64, c: f64) -> Result<f64> {
    Ok(gyrational_mass(fm, omega, c)? * c * c)
}

/// Supremum of |s_b| over subluminal ω; infinite for profiles with mass on
/// the outer surface.
pub fn spin_supremum(fm: &DensityProfile, c: f64) -> Result<f64> {
    match fm.kind {
        ProfileKind::Volume => spin_magnitude(fm, c / fm.radius, c),
        _ => Ok(f64::INFINITY),
    }
}

/// Unique ω ∥ s with bare_spin(ω) = s.
pub fn omega_from_spin(fm: &DensityProfile, s3: &Vec3, c: f64) -> Result<Vec3> {
    let s = s3.norm();
    if s == 0.0 {
        return Ok(Vec3::zeros());
    }
    if fm.second_moment() <= 0.0 || fm.total <= 0.0 {
        return Err(LedError::domain("spin inversion needs a strictly positive moment of inertia"));
    }
    let sup = spin_supremum(fm, c)?;
    if s >= sup {
        return Err(LedError::domain(format!("|s| = {s} is not below the spin supremum {sup}")));
    }
    let omega_of_x = |x: f64| x * c / fm.radius;
    let mut f = |x: f64| spin_magnitude(fm, omega_of_x(x), c).unwrap_or(f64::NAN) - s;
    let mut hi = 0.5;
    let mut k = 1;
    while f(hi) < 0.0 {
        k += 1;
        if k > 52 {
            return Err(LedError::domain(format!("|s| = {s} needs ωR/c closer to 1 than f64 resolves")));
        }
        hi = 1.0 - 0.5_f64.powi(k);
    }
    let x = brent(&mut f, 0.0, hi, 1e-15)?;
    Ok(s3 / s * omega_of_x(x))
}

/// Small-ω fit 𝓜_b ≈ m0 + ½ I_b ω² + C ω⁴ from three samples. Returns (m0, I_b).
pub fn maclaurin_check(fm: &DensityProfile, c: f64) -> Result<(f64, f64)> {
    let base = 0.01 * c / fm.radius;
    let om = [base, 2.0 * base, 3.0 * base];
    let mut a = nalgebra::Matrix3::zeros();
    let mut b = nalgebra::Vector3::zeros();
    for (i, w) in om.iter().enumerate() {
        let w2 = w * w;
        a[(i, 0)] = 1.0;
        a[(i, 1)] = 0.5 * w2;
        a[(i, 2)] = w2 * w2;
        b[i] = gyrational_mass(fm, *w, c)?;
    }
    let sol = a.lu().solve(&b).ok_or_else(|| LedError::numerical("singular Maclaurin fit"))?;
    Ok((sol[0], sol[1]))
}

/// Rest-frame Minkowski inertia tensor ∫ (|x|²g − x⊗x)/√(1−|ω×x|²/c²) dm.
///
/// The angular averages are taken in closed form: ⟨1/√⟩ = Artanh(x)/x and
/// ⟨sin²θ/√⟩ = h(x)/x with θ measured from ω.
pub fn minkowski_inertia(fm: &DensityProfile, omega3: &Vec3, c: f64) -> Result<Rank2Tensor> {
    let w = omega3.norm();
    check_subluminal(fm, w, c)?;
    let n = if w > 0.0 { omega3 / w } else { Vec3::z() };
    let (mut tt, mut iso, mut axial) = (0.0, 0.0, 0.0);
    for (r, dm) in radial_atoms(fm)? {
        let x = w * r / c;
        let a = artanh_over_x(x);
        let s2 = if x == 0.0 { 2.0 / 3.0 } else { shell_spin_function(x) / x };
        let b = a - s2;
        tt += dm * r * r * a;
        // ⟨x̂x̂/√⟩ = b n n + (s2/2)(I − n n)
        iso += dm * r * r * (a - 0.5 * s2);
        axial += dm * r * r * (0.5 * s2 - b);
    }
    let mut m = [[0.0; 4]; 4];
    m[0][0] = -tt;
    for i in 0..3 {
        for j in 0..3 {
            let d = if i == j { iso } else { 0.0 };
            m[i + 1][j + 1] = d + axial * n[i] * n[j];
        }
    }
    Ok(Rank2Tensor { m, symmetry: Symmetry::General }.with_symmetry(Symmetry::Symmetric))
}

/// Radial atoms accurate for the inertia integrands; volume profiles use a
/// dense Gauss–Legendre rule since the integrand is smooth below ωR = c.
fn radial_atoms(fm: &DensityProfile) -> Result<Vec<(f64, f64)>> {
    Ok(fm.radial_nodes(200))
}

/// Sampled map ω ↦ (𝓜_b, |s_b|) on [0, x_max c/R].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GyroMassCurve {
    pub omega: Vec<f64>,
    pub mass: Vec<f64>,
    pub spin: Vec<f64>,
}

impl GyroMassCurve {
    pub fn build(fm: &DensityProfile, c: f64, n: usize, x_max: f64) -> Result<Self> {
        if !(x_max < 1.0) || n < 3 {
            return Err(LedError::domain("GyroMassCurve needs n ≥ 3 and x_max < 1"));
        }
        let mut omega = Vec::with_capacity(n);
        let mut mass = Vec::with_capacity(n);
        let mut spin = Vec::with_capacity(n);
        for i in 0..n {
            let w = x_max * c / fm.radius * i as f64 / (n - 1) as f64;
            omega.push(w);
            mass.push(gyrational_mass(fm, w, c)?);
            spin.push(spin_magnitude(fm, w, c)?);
        }
        Ok(Self { omega, mass, spin })
    }

    /// Positive, increasing and strictly convex on the sample grid.
    pub fn is_positive_increasing_convex(&self) -> bool {
        let m = &self.mass;
        m.iter().all(|v| *v > 0.0)
            && m.windows(2).all(|p| p[1] > p[0])
            && m.windows(3).all(|p| p[2] - 2.0 * p[1] + p[0] > 0.0)
    }

    /// Linear interpolation of 𝓜_b at ω.
    pub fn mass_at(&self, omega: f64) -> f64 {
        interp(&self.omega, &self.mass, omega)
    }

    /// Linear interpolation of the inverse map |s| ↦ ω.
    pub fn omega_for_spin(&self, s: f64) -> f64 {
        interp(&self.spin, &self.omega, s)
    }
}
