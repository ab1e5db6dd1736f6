//! Stationary bound-state fields of a spinning spherical charge, field
//! functionals, stress-energy, co-moving boosted potentials and the complex
//! field G = E + iB sampled on a spherical grid.
//!
//! Gaussian units with `c` explicit. For a radial charge measure dq(r) and
//! rigid rotation ω the stationary potentials are φ(r) = Q(r)/r + ∫_{r'>r} dq/r'
//! and A = w(r)×x with w(r) = (ω/3c)[∫_{r'<r} r'² dq / r³ + ∫_{r'>r} dq/r'].
//! Fields on a charged shell are the mean of the one-sided limits.

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::bare_particle::{self, DensityProfile};
use crate::error::{LedError, Result};
use crate::minkowski::{trace, Rank2Tensor, Symmetry};
use crate::quadrature::{sphere_rule, GlRule};
use crate::Vec3;

use std::f64::consts::PI;

/// Electric and magnetic field at a point.
pub trait FieldSnapshot {
    fn e_field(&self, x: &Vec3) -> Vec3;
    fn b_field(&self, x: &Vec3) -> Vec3;
    /// Exterior charge and magnetic dipole, when the field is exactly a point
    /// charge plus point dipole outside some radius; enables analytic tails.
    fn exterior_multipoles(&self) -> Option<(f64, Vec3)> {
        None
    }
}

/// Stationary bound state of a charge profile rotating rigidly with ω.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryState {
    pub fe: DensityProfile,
    pub omega: Vec3,
    pub c: f64,
}

/// Build the stationary state; requires |ω|R < c and no point charge.
pub fn stationary_state(fe: &DensityProfile, omega3: &Vec3, c: f64) -> Result<StationaryState> {
    let x = omega3.norm() * fe.radius / c;
    if !(x < 1.0) {
        return Err(LedError::domain(format!("stationary state needs |ω|R < c (got {x})")));
    }
    if fe.point_fraction > 0.0 {
        return Err(LedError::domain("charge profiles carry no point fraction"));
    }
    Ok(StationaryState { fe: fe.clone(), omega: *omega3, c })
}

/// μ = (1/2c)∫ x×(ω×x) dq = (ω/3c)∫ r² dq.
pub fn magnetic_moment(fe: &DensityProfile, omega3: &Vec3, c: f64) -> Vec3 {
    omega3 * fe.second_moment() / (3.0 * c)
}

impl StationaryState {
    pub fn charge(&self) -> f64 {
        self.fe.total
    }

    /// Enclosed charge Q(r).
    pub fn enclosed(&self, r: f64) -> f64 {
        self.fe.inner_moment(0, r)
    }

    /// Scalar potential φ(r).
    pub fn phi(&self, r: f64) -> f64 {
        let inner = if r > 0.0 { self.enclosed(r) / r } else { 0.0 };
        inner + self.fe.outer_inverse_moment(r)
    }

    /// Radial factor f with w(r) = f(r) ω / c.
    pub fn w_factor(&self, r: f64) -> f64 {
        let m2 = self.fe.inner_moment(2, r);
        let inner = if r > 0.0 { m2 / (r * r * r) } else { 0.0 };
        (inner + self.fe.outer_inverse_moment(r)) / 3.0
    }

    /// Radial derivative f'(r) = −∫_{r'<r} r'² dq / r⁴.
    pub fn w_factor_prime(&self, r: f64) -> f64 {
        if r > 0.0 {
            -self.fe.inner_moment(2, r) / r.powi(4)
        } else {
            0.0
        }
    }

    /// w(r) with A = w×x.
    pub fn w(&self, r: f64) -> Vec3 {
        self.omega * (self.w_factor(r) / self.c)
    }

    pub fn vector_potential(&self, x: &Vec3) -> Vec3 {
        self.w(x.norm()).cross(x)
    }

    pub fn magnetic_moment(&self) -> Vec3 {
        magnetic_moment(&self.fe, &self.omega, self.c)
    }

    /// Field energy (1/8π)∫(|E|²+|B|²): closed form for a shell, radial
    /// quadrature otherwise.
    pub fn field_energy(&self) -> f64 {
        if self.fe.is_shell() {
            let (q, r) = (self.fe.total, self.fe.radius);
            let x = self.omega.norm() * r / self.c;
            0.5 * q * q / r * (1.0 + 2.0 / 9.0 * x * x)
        } else {
            self.field_energy_grid(&RadialGrid::default_for(&self.fe))
        }
    }

    /// Field energy by radial quadrature plus analytic exterior tails.
    pub fn field_energy_grid(&self, g: &RadialGrid) -> f64 {
        let wn = self.omega.norm() / self.c;
        let we = g.integrate(|r| {
            let q = self.enclosed(r);
            0.5 * q * q / (r * r)
        });
        let wb = g.integrate(|r| {
            let a = wn * self.w_factor(r);
            let b = wn * self.w_factor_prime(r);
            0.5 * r * r * (4.0 * a * a + 8.0 / 3.0 * a * r * b + 2.0 / 3.0 * r * r * b * b)
        });
        let (q, mu) = (self.fe.total, self.magnetic_moment().norm());
        we + wb + 0.5 * q * q / g.r_max + mu * mu / (3.0 * g.r_max.powi(3))
    }

    /// Potential form of the field spin (1/c)∫ x×A dq.
    pub fn field_spin_potential(&self) -> Vec3 {
        let s = self.fe.integrate(|r| 2.0 / 3.0 * r * r * self.w_factor(r)).expect("profile integration");
        self.omega * (s / (self.c * self.c))
    }

    /// Poynting form (1/4πc)∫ x×(E×B) on the radial grid plus exterior tail.
    pub fn field_spin_poynting(&self, g: &RadialGrid) -> Vec3 {
        let core = g.integrate(|r| {
            let q = self.enclosed(r);
            -r * q * (4.0 / 3.0 * self.w_factor(r) + 2.0 / 3.0 * r * self.w_factor_prime(r))
        });
        let mu = self.fe.second_moment() / 3.0;
        let tail = 2.0 * self.fe.total * mu / (3.0 * g.r_max);
        self.omega * ((core + tail) / (self.c * self.c))
    }

    /// Radial electric field Q(r)/r².
    pub fn e_radial(&self, r: f64) -> f64 {
        if r > 0.0 {
            self.enclosed(r) / (r * r)
        } else {
            0.0
        }
    }
}

impl FieldSnapshot for StationaryState {
    fn e_field(&self, x: &Vec3) -> Vec3 {
        let r = x.norm();
        if r == 0.0 {
            return Vec3::zeros();
        }
        x * (self.enclosed(r) / (r * r * r))
    }

    fn b_field(&self, x: &Vec3) -> Vec3 {
        let r = x.norm();
        let w = self.w(r);
        if r == 0.0 {
            return 2.0 * w;
        }
        let wp = self.omega * (self.w_factor_prime(r) / self.c);
        let n = x / r;
        2.0 * w + r * (wp - n * n.dot(&wp))
    }

    fn exterior_multipoles(&self) -> Option<(f64, Vec3)> {
        Some((self.fe.total, self.magnetic_moment()))
    }
}

/// Radial quadrature grid: composite Gauss–Legendre, uniform in r on
/// [0, R] and uniform in ln r on [R, r_max].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub support: f64,
    pub r_max: f64,
    pub panels: usize,
    pub order: usize,
}

impl RadialGrid {
    pub fn default_for(fe: &DensityProfile) -> Self {
        Self { support: fe.radius, r_max: 50.0 * fe.radius, panels: 32, order: 4 }
    }

    pub fn refined(&self, factor: usize) -> Self {
        Self { panels: self.panels * factor, ..*self }
    }

    /// ∫_0^{r_max} h(r) dr.
    pub fn integrate<H: FnMut(f64) -> f64>(&self, mut h: H) -> f64 {
        let gl = GlRule::new(self.order);
        let inner = gl.composite(&[0.0, self.support], self.panels, &mut h);
        let (la, lb) = (self.support.ln(), self.r_max.ln());
        let outer = gl.composite(&[la, lb], self.panels, |s| {
            let r = s.exp();
            r * h(r)
        });
        inner + outer
    }
}

/// Both field-spin representations and their agreement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSpin {
    pub potential_form: Vec3,
    pub poynting_form: Vec3,
    pub relative_gap: f64,
}

/// Field spin in both forms; a gap above `tol` is a numerical failure.
pub fn field_spin(st: &StationaryState, grid: &RadialGrid, tol: f64) -> Result<FieldSpin> {
    let p = st.field_spin_potential();
    let y = st.field_spin_poynting(grid);
    let scale = p.norm().max(y.norm());
    let gap = if scale > 0.0 { (p - y).norm() / scale } else { 0.0 };
    if gap > tol {
        return Err(LedError::numerical(format!("field-spin forms disagree: relative gap {gap:e}")));
    }
    Ok(FieldSpin { potential_form: p, poynting_form: y, relative_gap: gap })
}

/// Field tensor F with F^{0i} = Eᵢ, F^{ij} = ε_{ijk}Bₖ, so that F·(1, v) =
/// (E·v, E + v×B).
pub fn field_tensor(e: &Vec3, b: &Vec3) -> Rank2Tensor {
    let mut m = [[0.0; 4]; 4];
    for i in 0..3 {
        m[0][i + 1] = e[i];
        m[i + 1][0] = -e[i];
    }
    m[1][2] = b[2];
    m[2][1] = -b[2];
    m[2][3] = b[0];
    m[3][2] = -b[0];
    m[3][1] = b[1];
    m[1][3] = -b[1];
    Rank2Tensor { m, symmetry: Symmetry::Antisymmetric }
}

/// (E, B) read back from a field tensor.
pub fn fields_of_tensor(f: &Rank2Tensor) -> (Vec3, Vec3) {
    (Vec3::new(f.m[0][1], f.m[0][2], f.m[0][3]), Vec3::new(f.m[2][3], f.m[3][1], f.m[1][2]))
}

/// Energy-momentum-stress tensor (1/4π)(F·F − ¼ tr(F·F) g).
///
/// With this sign convention T^{00} = −(|E|²+|B|²)/8π; the energy density is
/// the mixed component (T·e0)⁰.
pub fn stress_energy(e: &Vec3, b: &Vec3) -> Rank2Tensor {
    let f = field_tensor(e, b);
    let ff = f.dot(&f);
    let tr = trace(&ff);
    ff.sub(&Rank2Tensor::metric().scale(0.25 * tr)).scale(1.0 / (4.0 * PI)).with_symmetry(Symmetry::Symmetric)
}

/// Co-moving potentials of a unit charge with magnetic moment μ moving with
/// velocity v (units of c), evaluated at x with the particle at x_out:
/// φ = 1/D + (1−v²) v·(μ×y)/D³, A = v/D + (1−v²) μ×(γ y∥ v̂ + y⊥)/D³,
/// D = |y∥ v̂ + √(1−v²) y⊥|, y = x − x_out.
pub fn comoving_fields(v3: &Vec3, mu3: &Vec3, x_out: &Vec3, x: &Vec3) -> Result<(f64, Vec3)> {
    comoving_fields_charged(1.0, v3, mu3, x_out, x)
}

/// [`comoving_fields`] with the Coulomb part scaled by the charge `q`.
pub fn comoving_fields_charged(q: f64, v3: &Vec3, mu3: &Vec3, x_out: &Vec3, x: &Vec3) -> Result<(f64, Vec3)> {
    let v2 = v3.norm_squared();
    if !(v2 < 1.0) {
        return Err(LedError::domain("co-moving fields need |v| < c"));
    }
    let y = x - x_out;
    let (ypar, yperp, vhat) = if v2 > 0.0 {
        let vh = v3 / v2.sqrt();
        let yp = y.dot(&vh);
        (yp, y - yp * vh, vh)
    } else {
        (0.0, y, Vec3::zeros())
    };
    let gamma = 1.0 / (1.0 - v2).sqrt();
    let s = (1.0 - v2).sqrt();
    let d = (ypar * vhat + s * yperp).norm();
    let d3 = d * d * d;
    let phi = q / d + (1.0 - v2) * v3.dot(&mu3.cross(&y)) / d3;
    let a = v3 * (q / d) + (1.0 - v2) * mu3.cross(&(gamma * ypar * vhat + yperp)) / d3;
    Ok((phi, a))
}

/// Fields of [`comoving_fields_charged`] for a pattern translating rigidly
/// with velocity v (c = 1): E = −∇φ + (v·∇)A, B = ∇×A, by fourth-order central
/// differences with a step proportional to the distance from x_out.
pub fn comoving_field_strengths(q: f64, v3: &Vec3, mu3: &Vec3, x_out: &Vec3, x: &Vec3) -> Result<(Vec3, Vec3)> {
    let h = 1e-3 * (x - x_out).norm().max(1e-12);
    let pot = |p: &Vec3| comoving_fields_charged(q, v3, mu3, x_out, p);
    let mut grad_phi = Vec3::zeros();
    let mut jac = nalgebra::Matrix3::zeros(); // jac[(i, j)] = ∂_j A_i
    for j in 0..3 {
        let mut dx = Vec3::zeros();
        dx[j] = h;
        let (p1, a1) = pot(&(x + dx))?;
        let (m1, b1) = pot(&(x - dx))?;
        let (p2, a2) = pot(&(x + 2.0 * dx))?;
        let (m2, b2) = pot(&(x - 2.0 * dx))?;
        grad_phi[j] = (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * h);
        let da = (8.0 * (a1 - b1) - (a2 - b2)) / (12.0 * h);
        for i in 0..3 {
            jac[(i, j)] = da[i];
        }
    }
    let e = -grad_phi + jac * v3;
    let b = Vec3::new(jac[(2, 1)] - jac[(1, 2)], jac[(0, 2)] - jac[(2, 0)], jac[(1, 0)] - jac[(0, 1)]);
    Ok((e, b))
}

/// Volume quadrature over the ball |x| ≤ r_max with a breakpoint at the
/// support radius, plus the surface rule on |x| = r_max.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalGrid {
    pub support: f64,
    pub r_max: f64,
    /// (point, volume weight)
    pub nodes: Vec<(Vec3, f64)>,
    /// (outward unit normal, area weight) on |x| = r_max
    pub surface: Vec<(Vec3, f64)>,
}

impl SphericalGrid {
    /// Radial composite Gauss–Legendre (uniform in r inside the support,
    /// uniform in ln r outside) times a (n_theta × 2 n_theta) sphere rule.
    pub fn new(support: f64, r_max: f64, panels: usize, order: usize, n_theta: usize) -> Result<Self> {
        if !(r_max > support) || !(support > 0.0) {
            return Err(LedError::domain(format!("grid radius {r_max} does not enclose the support radius {support}")));
        }
        let gl = GlRule::new(order);
        let ang = sphere_rule(n_theta, 2 * n_theta);
        let mut radial = Vec::new();
        let h = support / panels as f64;
        for k in 0..panels {
            let a = h * k as f64;
            radial.extend(gl.mapped(a, a + h));
        }
        let (la, lb) = (support.ln(), r_max.ln());
        let hs = (lb - la) / panels as f64;
        for k in 0..panels {
            let a = la + hs * k as f64;
            radial.extend(gl.mapped(a, a + hs).map(|(s, w)| (s.exp(), w * s.exp())));
        }
        let mut nodes = Vec::with_capacity(radial.len() * ang.len());
        for (r, wr) in &radial {
            for (n, wa) in &ang {
                nodes.push((n * *r, 4.0 * PI * r * r * wr * wa));
            }
        }
        let surface = ang.iter().map(|(n, wa)| (*n, 4.0 * PI * r_max * r_max * wa)).collect();
        Ok(Self { support, r_max, nodes, surface })
    }

    pub fn default_for(fe: &DensityProfile) -> Result<Self> {
        Self::new(fe.radius, 20.0 * fe.radius, 24, 6, 12)
    }
}

/// Complex field G = E + iB sampled on a spherical grid and its bounding sphere.
#[derive(Debug, Clone)]
pub struct ComplexField3 {
    pub grid: SphericalGrid,
    pub g: Vec<[Complex<f64>; 3]>,
    pub g_surface: Vec<[Complex<f64>; 3]>,
    /// Exterior charge and dipole for analytic tails, if known.
    pub tail: Option<(f64, Vec3)>,
}

fn pack(e: Vec3, b: Vec3) -> [Complex<f64>; 3] {
    [Complex::new(e[0], b[0]), Complex::new(e[1], b[1]), Complex::new(e[2], b[2])]
}

impl ComplexField3 {
    pub fn sample<S: FieldSnapshot + ?Sized>(snap: &S, grid: &SphericalGrid) -> Self {
        let g = grid.nodes.iter().map(|(x, _)| pack(snap.e_field(x), snap.b_field(x))).collect();
        let g_surface = grid
            .surface
            .iter()
            .map(|(n, _)| {
                let x = n * grid.r_max;
                pack(snap.e_field(&x), snap.b_field(&x))
            })
            .collect();
        Self { grid: grid.clone(), g, g_surface, tail: snap.exterior_multipoles() }
    }

    pub fn e(&self, i: usize) -> Vec3 {
        Vec3::new(self.g[i][0].re, self.g[i][1].re, self.g[i][2].re)
    }

    pub fn b(&self, i: usize) -> Vec3 {
        Vec3::new(self.g[i][0].im, self.g[i][1].im, self.g[i][2].im)
    }

    /// Enclosed charge from Gauss's law on the bounding sphere.
    pub fn gauss_charge(&self) -> f64 {
        self.grid
            .surface
            .iter()
            .zip(&self.g_surface)
            .map(|((n, w), g)| w * (n[0] * g[0].re + n[1] * g[1].re + n[2] * g[2].re))
            .sum::<f64>()
            / (4.0 * PI)
    }

    /// (1/8π)∫|G|² plus the exterior tail when known.
    pub fn energy(&self) -> f64 {
        let core: f64 = self
            .grid
            .nodes
            .iter()
            .zip(&self.g)
            .map(|((_, w), g)| w * g.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            / (8.0 * PI);
        let tail = self
            .tail
            .map_or(0.0, |(q, mu)| 0.5 * q * q / self.grid.r_max + mu.norm_squared() / (3.0 * self.grid.r_max.powi(3)));
        core + tail
    }

    /// (1/4πc)∫ E×B.
    pub fn momentum(&self, c: f64) -> Vec3 {
        let mut p = Vec3::zeros();
        for (i, (_, w)) in self.grid.nodes.iter().enumerate() {
            p += *w * self.e(i).cross(&self.b(i));
        }
        p / (4.0 * PI * c)
    }

    /// (1/4πc)∫ x×(E×B) plus the exterior tail (2qμ/3c r_max) when known.
    pub fn angular_momentum(&self, c: f64) -> Vec3 {
        let mut l = Vec3::zeros();
        for (i, (x, w)) in self.grid.nodes.iter().enumerate() {
            l += *w * x.cross(&self.e(i).cross(&self.b(i)));
        }
        let tail = self.tail.map_or(Vec3::zeros(), |(q, mu)| 2.0 * q * mu / (3.0 * self.grid.r_max));
        l / (4.0 * PI * c) + tail / c
    }
}

/// Bare-particle state entering the conserved functionals.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleState {
    pub fm: DensityProfile,
    pub position: Vec3,
    pub momentum: Vec3,
    pub omega: Vec3,
}

/// Energy, momentum, angular momentum and charge of field plus particle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Functionals {
    pub energy: f64,
    pub momentum: Vec3,
    pub angular_momentum: Vec3,
    pub charge: f64,
    pub field_energy: f64,
    pub field_momentum: Vec3,
    pub field_angular_momentum: Vec3,
}

/// W = field + √(𝓜_b²c⁴ + p²c²), P = field + p, L = field + q×p + s_b, and
/// Q from Gauss's law on the bounding sphere.
pub fn conserved_functionals(g: &ComplexField3, particle: &ParticleState, c: f64) -> Result<Functionals> {
    if g.grid.r_max <= particle.fm.radius + particle.position.norm() {
        return Err(LedError::domain("grid does not enclose the particle support"));
    }
    let wn = particle.omega.norm();
    let mass = bare_particle::gyrational_mass(&particle.fm, wn, c)?;
    let sb = bare_particle::bare_spin(&particle.fm, &particle.omega, c)?;
    let bare_e = ((mass * c * c).powi(2) + (particle.momentum.norm() * c).powi(2)).sqrt();
    let fe = g.energy();
    let fp = g.momentum(c);
    let fl = g.angular_momentum(c);
    Ok(Functionals {
        energy: fe + bare_e,
        momentum: fp + particle.momentum,
        angular_momentum: fl + particle.position.cross(&particle.momentum) + sb,
        charge: g.gauss_charge(),
        field_energy: fe,
        field_momentum: fp,
        field_angular_momentum: fl,
    })
}
