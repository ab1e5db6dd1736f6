//! Minkowski force and torque, the Nodvik spin-orbit mass tensor, the
//! pseudo-inertia tensor M̃ with its effective force f̃, and an
//! invertibility report for M̃.
//!
//! Slice integrals over δ(u·x) are evaluated in the instantaneous rest frame
//! of u: the field is boosted there, integrated over the charge support on
//! t' = 0 and the result is boosted back.
//!
//! Units: u is dimensionless (u·u = −1), Ω_E is an angular-velocity tensor in
//! 1/time whose rest-frame dual is ω, so a charge element moves with
//! U = u − Ω_E·x/c. Forces carry charge × field, mass tensors are in mass
//! units (field integrals divided by c²) and the hodograph equation reads
//! c M̃·du/dτ = f̃. Field rates u·∇F are per unit length of x⁰ = ct.

use nalgebra::{Matrix4, SVD};
use serde::{Deserialize, Serialize};

use crate::bare_particle::DensityProfile;
use crate::error::{LedError, Result};
use crate::fields::{comoving_field_strengths, field_tensor, FieldSnapshot};
use crate::minkowski::{
    commutators, rest_frame_boost, transform, wedge_up, Bracket, FourVector, Rank2Tensor, Symmetry, DEFAULT_TOL,
};
use crate::quadrature::sphere_rule;
use crate::Vec3;

/// Electromagnetic field tensor on space-time, with its derivative along a
/// four-vector.
pub trait SliceField {
    /// F at the event.
    fn tensor(&self, event: &FourVector) -> Rank2Tensor;
    /// Directional derivative u·∇F per unit length.
    fn rate(&self, event: &FourVector, u: &FourVector) -> Rank2Tensor;
    /// Radius about the origin outside which no data are available.
    fn domain_radius(&self) -> Option<f64> {
        None
    }
}

/// Time-independent field built from a three-space snapshot. The rate along u
/// is the spatial derivative along the space part of u (central differences).
#[derive(Debug, Clone)]
pub struct StaticField<S>(pub S);

impl<S: FieldSnapshot> StaticField<S> {
    fn at(&self, x: &Vec3) -> Rank2Tensor {
        field_tensor(&self.0.e_field(x), &self.0.b_field(x))
    }
}

impl<S: FieldSnapshot> SliceField for StaticField<S> {
    fn tensor(&self, event: &FourVector) -> Rank2Tensor {
        self.at(&event.space())
    }

    fn rate(&self, event: &FourVector, u: &FourVector) -> Rank2Tensor {
        let v = u.space();
        let n = v.norm();
        if n == 0.0 {
            return Rank2Tensor::zero();
        }
        let x = event.space();
        let h = 1e-4 * (1.0 + x.norm());
        let d = v * (h / n);
        let p = self.at(&(x + d));
        let m = self.at(&(x - d));
        p.sub(&m).scale(n / (2.0 * h))
    }
}

/// Spatially uniform field changing linearly in x⁰: E + x⁰ Ė, B + x⁰ Ḃ, with
/// the rates taken per unit x⁰.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformField {
    pub e: Vec3,
    pub b: Vec3,
    pub e_rate: Vec3,
    pub b_rate: Vec3,
}

impl UniformField {
    pub fn constant(e: Vec3, b: Vec3) -> Self {
        Self { e, b, e_rate: Vec3::zeros(), b_rate: Vec3::zeros() }
    }
}

impl SliceField for UniformField {
    fn tensor(&self, event: &FourVector) -> Rank2Tensor {
        let t = event.time();
        field_tensor(&(self.e + self.e_rate * t), &(self.b + self.b_rate * t))
    }

    fn rate(&self, _event: &FourVector, u: &FourVector) -> Rank2Tensor {
        field_tensor(&self.e_rate, &self.b_rate).scale(u.time())
    }
}

/// Field multiplied by a constant.
pub struct Scaled<'a>(pub f64, pub &'a dyn SliceField);

impl SliceField for Scaled<'_> {
    fn tensor(&self, event: &FourVector) -> Rank2Tensor {
        self.1.tensor(event).scale(self.0)
    }
    fn rate(&self, event: &FourVector, u: &FourVector) -> Rank2Tensor {
        self.1.rate(event, u).scale(self.0)
    }
    fn domain_radius(&self) -> Option<f64> {
        self.1.domain_radius()
    }
}

/// Sum of two fields.
pub struct Sum<'a>(pub &'a dyn SliceField, pub &'a dyn SliceField);

impl SliceField for Sum<'_> {
    fn tensor(&self, event: &FourVector) -> Rank2Tensor {
        self.0.tensor(event).add(&self.1.tensor(event))
    }
    fn rate(&self, event: &FourVector, u: &FourVector) -> Rank2Tensor {
        self.0.rate(event, u).add(&self.1.rate(event, u))
    }
    fn domain_radius(&self) -> Option<f64> {
        match (self.0.domain_radius(), self.1.domain_radius()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

/// Total field minus the co-moving Coulomb plus dipole field of a particle
/// with charge q, magnetic moment μ and velocity v (units of c) centred at z.
/// The subtracted part is stationary in the co-moving frame, so its rate along
/// the particle's own u is dropped.
pub struct ReducedField<'a> {
    pub total: &'a dyn SliceField,
    pub q: f64,
    pub mu: Vec3,
    pub v: Vec3,
    pub center: Vec3,
}

impl SliceField for ReducedField<'_> {
    fn tensor(&self, event: &FourVector) -> Rank2Tensor {
        let f = self.total.tensor(event);
        let x = event.space();
        if (x - self.center).norm() == 0.0 {
            return f;
        }
        match comoving_field_strengths(self.q, &self.v, &self.mu, &self.center, &x) {
            Ok((e, b)) => f.sub(&field_tensor(&e, &b)),
            Err(_) => f,
        }
    }
    fn rate(&self, event: &FourVector, u: &FourVector) -> Rank2Tensor {
        self.total.rate(event, u)
    }
    fn domain_radius(&self) -> Option<f64> {
        self.total.domain_radius()
    }
}

/// Kinematic data of the particle at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticleFrame {
    /// Centre z.
    pub z: FourVector,
    /// Four-velocity u.
    pub u: FourVector,
    /// Angular-velocity tensor Ω_E (1/time), Ω_E·u = 0.
    pub omega: Rank2Tensor,
    pub c: f64,
}

impl ParticleFrame {
    /// Particle at rest at the origin, spinning with the three-vector ω.
    pub fn rest(omega3: &Vec3, c: f64) -> Self {
        Self {
            z: FourVector::new(0.0, 0.0, 0.0, 0.0),
            u: FourVector::e(0),
            omega: crate::minkowski::omega_tensor_rest(omega3),
            c,
        }
    }
}

/// Quadrature resolution of the rest-frame slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceQuadrature {
    pub n_radial: usize,
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for SliceQuadrature {
    fn default() -> Self {
        Self { n_radial: 24, n_theta: 16, n_phi: 32 }
    }
}

/// Rest-frame quadrature node.
struct Node {
    x: FourVector,
    dq: f64,
    f: Rank2Tensor,
    df: Rank2Tensor,
}

/// Rest-frame view of the slice: nodes, scaled Ω' = Ω/c and the boost back.
struct Slice {
    nodes: Vec<Node>,
    om: Rank2Tensor,
    from_rest: Matrix4<f64>,
}

impl Slice {
    fn build(
        field: &dyn SliceField,
        fe: &DensityProfile,
        frame: &ParticleFrame,
        quad: &SliceQuadrature,
        with_rate: bool,
    ) -> Result<Self> {
        let (to_rest, from_rest) = rest_frame_boost(&frame.u)?;
        let om_u = frame.omega.act(&frame.u).max_abs();
        if om_u > DEFAULT_TOL * (1.0 + frame.omega.max_abs()) {
            return Err(LedError::constraint(format!("Ω·u ≠ 0 (residual {om_u:e})")));
        }
        let om = frame.omega.transformed(&to_rest).scale(1.0 / frame.c);
        let w = Vec3::new(om.m[2][3], om.m[3][1], om.m[1][2]);
        let speed = w.norm() * fe.radius;
        if !(speed < 1.0) {
            return Err(LedError::constraint(format!("equatorial speed |ω|R/c = {speed} ≥ 1")));
        }
        if let Some(d) = field.domain_radius() {
            let reach = frame.z.space().norm() + frame.u.c[0] * fe.radius * (1.0 + 1e-12);
            if d < reach {
                return Err(LedError::domain(format!("field data cover radius {d} but the support reaches {reach}")));
            }
        }
        let sphere = sphere_rule(quad.n_theta, quad.n_phi);
        let u_lab = frame.u;
        let mut nodes = Vec::new();
        for (r, dq) in fe.radial_nodes(quad.n_radial) {
            if dq == 0.0 {
                continue;
            }
            let dirs: &[(Vec3, f64)] = if r == 0.0 { &[(Vec3::zeros(), 1.0)] } else { &sphere };
            for (n, wt) in dirs {
                let x = FourVector::from_parts(0.0, n * r);
                let ev = frame.z + transform(&from_rest, &x);
                let f = field.tensor(&ev).transformed(&to_rest);
                let df = if with_rate { field.rate(&ev, &u_lab).transformed(&to_rest) } else { Rank2Tensor::zero() };
                nodes.push(Node { x, dq: dq * wt, f, df });
            }
        }
        Ok(Self { nodes, om, from_rest })
    }

    fn u() -> FourVector {
        FourVector::e(0)
    }

    fn vector_back(&self, v: FourVector) -> FourVector {
        transform(&self.from_rest, &v)
    }

    fn tensor_back(&self, t: Rank2Tensor) -> Rank2Tensor {
        let s = t.symmetry;
        t.transformed(&self.from_rest).with_symmetry(s)
    }

    /// U = u − Ω'·x in the rest frame.
    fn element_velocity(&self, x: &FourVector) -> FourVector {
        Self::u() - self.om.act(x)
    }

    fn force(&self) -> FourVector {
        let mut f = FourVector::new(0.0, 0.0, 0.0, 0.0);
        for n in &self.nodes {
            f = f + n.f.act(&self.element_velocity(&n.x)).scale(n.dq);
        }
        f
    }

    fn torque(&self) -> Rank2Tensor {
        let mut t = Rank2Tensor::zero();
        for n in &self.nodes {
            let mut fu = n.f.act(&self.element_velocity(&n.x));
            fu.c[0] = 0.0;
            t = t.add(&wedge_up(&n.x, &fu).scale(n.dq));
        }
        t.with_symmetry(Symmetry::Antisymmetric)
    }

    /// −∫ x·Ω'·F·u dq.
    fn dot_u_integral(&self) -> f64 {
        let u = Self::u();
        -self.nodes.iter().map(|n| n.x.inner(&self.om.dot(&n.f).act(&u)) * n.dq).sum::<f64>()
    }

    /// −∫ [x⊗x, [F, Ω']₊]₊ dq (energy units).
    fn spin_orbit(&self) -> Rank2Tensor {
        let mut m = Rank2Tensor::zero();
        for n in &self.nodes {
            let inner = commutators(&n.f, &self.om, Bracket::Anti);
            let xx = Rank2Tensor::outer(&n.x, &n.x);
            m = m.sub(&commutators(&xx, &inner, Bracket::Anti).scale(n.dq));
        }
        m
    }

    /// −∫ x⊗x (x·Ω'·F·u) u·∇δ(u·x) d⁴x, integrated by parts onto the slice.
    fn slice_derivative_term(&self) -> Rank2Tensor {
        let u = Self::u();
        let mut m = Rank2Tensor::zero();
        for n in &self.nodes {
            let a = n.x.inner(&self.om.dot(&n.f).act(&u));
            let b = n.x.inner(&self.om.dot(&n.df).act(&u));
            let sym = Rank2Tensor::outer(&u, &n.x).add(&Rank2Tensor::outer(&n.x, &u));
            let xx = Rank2Tensor::outer(&n.x, &n.x);
            m = m.add(&sym.scale(a * n.dq)).add(&xx.scale(b * n.dq));
        }
        m
    }

    /// −∫ (F·u)⊗x dq.
    fn velocity_term(&self) -> Rank2Tensor {
        let u = Self::u();
        let mut m = Rank2Tensor::zero();
        for n in &self.nodes {
            m = m.sub(&Rank2Tensor::outer(&n.f.act(&u), &n.x).scale(n.dq));
        }
        m
    }

    /// ∫ x (x·Ω'·(u·∇F)·u) dq + (1/c)∫ x (x·[F, Ω̇']₊·u) dq, with Ω̇' = Ω̇/c.
    fn rate_force(&self, om_dot: &Rank2Tensor, c: f64) -> FourVector {
        let u = Self::u();
        let mut f = FourVector::new(0.0, 0.0, 0.0, 0.0);
        for n in &self.nodes {
            let a = n.x.inner(&self.om.dot(&n.df).act(&u));
            let b = n.x.inner(&commutators(&n.f, om_dot, Bracket::Anti).act(&u)) / c;
            f = f + n.x.scale((a + b) * n.dq);
        }
        f
    }
}

/// f = ∫ F·U f_e δ(u·x) d⁴x.
pub fn minkowski_force(
    field: &dyn SliceField,
    fe: &DensityProfile,
    frame: &ParticleFrame,
    quad: &SliceQuadrature,
) -> Result<FourVector> {
    let s = Slice::build(field, fe, frame, quad, false)?;
    Ok(s.vector_back(s.force()))
}

/// f·u and the equivalent integral −∫ x·Ω·F·u f_e δ(u·x) d⁴x (with Ω/c).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceDotU {
    pub f_dot_u: f64,
    pub integral: f64,
}

pub fn force_dot_u(
    field: &dyn SliceField,
    fe: &DensityProfile,
    frame: &ParticleFrame,
    quad: &SliceQuadrature,
) -> Result<ForceDotU> {
    let s = Slice::build(field, fe, frame, quad, false)?;
    let f = s.force();
    Ok(ForceDotU { f_dot_u: f.inner(&Slice::u()), integral: s.dot_u_integral() })
}

/// t = ∫ x ∧ (F·U)⊥ f_e δ(u·x) d⁴x.
pub fn minkowski_torque(
    field: &dyn SliceField,
    fe: &DensityProfile,
    frame: &ParticleFrame,
    quad: &SliceQuadrature,
) -> Result<Rank2Tensor> {
    let s = Slice::build(field, fe, frame, quad, false)?;
    Ok(s.tensor_back(s.torque()))
}

/// Spin-orbit mass −(1/c²)∫ [x⊗x, [F_red, Ω_E/c]₊]₊ f_e δ(u·x) d⁴x.
pub fn nodvik_mass(
    reduced: &dyn SliceField,
    fe: &DensityProfile,
    frame: &ParticleFrame,
    quad: &SliceQuadrature,
) -> Result<Rank2Tensor> {
    let s = Slice::build(reduced, fe, frame, quad, false)?;
    let c2 = frame.c * frame.c;
    Ok(s.tensor_back(s.spin_orbit().scale(1.0 / c2)))
}

/// Time derivatives entering f̃.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    /// d𝓜_b/dτ.
    pub mb_dot: f64,
    /// dΩ_E/dτ (1/time²).
    pub omega_dot: Rank2Tensor,
}

impl Default for Rates {
    fn default() -> Self {
        Self { mb_dot: 0.0, omega_dot: Rank2Tensor::zero() }
    }
}

/// M̃ split into its four terms (mass units), and f̃.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoInertia {
    pub bare: Rank2Tensor,
    pub spin_orbit: Rank2Tensor,
    pub slice_derivative: Rank2Tensor,
    pub velocity: Rank2Tensor,
    pub m_tilde: Rank2Tensor,
    pub f_tilde: FourVector,
}

/// Assemble M̃ = 𝓜_b g + spin-orbit + slice-derivative + velocity terms and
/// f̃ = −c 𝓜̇_b u + f + rate terms, from the field F (not reduced) and its
/// rate u·∇F.
pub fn pseudo_inertia(
    field: &dyn SliceField,
    fe: &DensityProfile,
    frame: &ParticleFrame,
    mb: f64,
    rates: &Rates,
    quad: &SliceQuadrature,
) -> Result<PseudoInertia> {
    let s = Slice::build(field, fe, frame, quad, true)?;
    let (to_rest, _) = rest_frame_boost(&frame.u)?;
    let c = frame.c;
    let k = 1.0 / (c * c);
    let bare = Rank2Tensor::metric().scale(mb);
    let spin_orbit = s.tensor_back(s.spin_orbit().scale(k));
    let slice_derivative = s.tensor_back(s.slice_derivative_term().scale(k));
    let velocity = s.tensor_back(s.velocity_term().scale(k));
    let m_tilde = bare.add(&spin_orbit).add(&slice_derivative).add(&velocity);
    let om_dot = rates.omega_dot.transformed(&to_rest).scale(1.0 / c);
    let f_rest = Slice::u().scale(-c * rates.mb_dot) + s.force() + s.rate_force(&om_dot, c);
    Ok(PseudoInertia { bare, spin_orbit, slice_derivative, velocity, m_tilde, f_tilde: s.vector_back(f_rest) })
}

/// All slice quantities at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceAssembly {
    pub f: FourVector,
    pub t: Rank2Tensor,
    pub m_nodvik: Rank2Tensor,
    pub m_tilde: Rank2Tensor,
    pub f_tilde: FourVector,
}

/// Force, torque, spin-orbit mass (from `reduced`) and M̃, f̃ (from `field`).
pub fn assemble(
    field: &dyn SliceField,
    reduced: &dyn SliceField,
    fe: &DensityProfile,
    frame: &ParticleFrame,
    mb: f64,
    rates: &Rates,
    quad: &SliceQuadrature,
) -> Result<ForceAssembly> {
    let pi = pseudo_inertia(field, fe, frame, mb, rates, quad)?;
    Ok(ForceAssembly {
        f: minkowski_force(field, fe, frame, quad)?,
        t: minkowski_torque(field, fe, frame, quad)?,
        m_nodvik: nodvik_mass(reduced, fe, frame, quad)?,
        m_tilde: pi.m_tilde,
        f_tilde: pi.f_tilde,
    })
}

/// Size of M̃ − 𝓜_b g relative to 𝓜_b, and the condition number of M̃.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvertibilityReport {
    pub perturbation_ratio: f64,
    pub condition: f64,
    pub flagged: bool,
}

pub fn invertibility_report(m_tilde: &Rank2Tensor, mb: f64) -> InvertibilityReport {
    let dev = m_tilde.sub(&Rank2Tensor::metric().scale(mb));
    let perturbation_ratio = dev.operator_norm() / mb.abs();
    let sv = SVD::new(m_tilde.action_matrix(), false, false).singular_values;
    let smax = sv.max();
    let smin = sv.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    InvertibilityReport { perturbation_ratio, condition, flagged: !(perturbation_ratio < 1.0) }
}
