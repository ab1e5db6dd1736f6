//! Initial-data consistency for the singular limits of the model: Nodvik's
//! point-mass limit and the Abraham limits with and without spin, plus the
//! conserved functionals of the semi-relativistic massive model.
//!
//! With the particle at rest at the origin, each limit turns the equations of
//! motion at t = 0 into linear equations for q̇₀ and ω₀ whose coefficients are
//! charge-weighted moments of the initial fields, ⟨g⟩ = q⁻¹∫ g dq with q the
//! total charge. The equations are solved by SVD: no solution within tolerance
//! means the data are inconsistent, and the null space spans the free
//! parameters of the admissible family.
//!
//! Equations, with X = ⟨x⊗B⟩ (X_ij = ⟨x_i B_j⟩) and σ = ⟨x x·B⟩:
//! - translation: c⟨E⟩ + q̇×⟨B⟩ + (X − tr X·I)·ω = 0
//! - rotation: c⟨x×E⟩ + (tr X·I − Xᵀ)·q̇ + ω×σ = 0
//! - Nodvik: t_E + ω×σ_B/c = 0 with t_E = q⟨x×E⟩, σ_B = qσ.

use nalgebra::{DMatrix, DVector, Matrix3};
use serde::{Deserialize, Serialize};

use crate::bare_particle::DensityProfile;
use crate::error::{LedError, Result};
use crate::fields::{ComplexField3, FieldSnapshot, SphericalGrid, StationaryState};
use crate::quadrature::sphere_rule;
use crate::Vec3;

/// One additive piece of the initial field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldComponent {
    /// Static Coulomb field of the charge profile.
    Coulomb,
    /// Magnetic field of the bound state rotating with `omega`.
    Dipole {
        omega: Vec3,
    },
    UniformE {
        e: Vec3,
    },
    UniformB {
        b: Vec3,
    },
    /// E = G·x with tr G = 0; rows of G.
    LinearE {
        g: [[f64; 3]; 3],
    },
    /// B = G·x with tr G = 0; rows of G.
    LinearB {
        g: [[f64; 3]; 3],
    },
}

fn mat(g: &[[f64; 3]; 3]) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| g[i][j])
}

fn rows(m: &Matrix3<f64>) -> [[f64; 3]; 3] {
    [0, 1, 2].map(|i| [0, 1, 2].map(|j| m[(i, j)]))
}

impl FieldComponent {
    fn rotated(&self, rot: &Matrix3<f64>) -> Self {
        match self {
            Self::Coulomb => Self::Coulomb,
            Self::Dipole { omega } => Self::Dipole { omega: rot * omega },
            Self::UniformE { e } => Self::UniformE { e: rot * e },
            Self::UniformB { b } => Self::UniformB { b: rot * b },
            Self::LinearE { g } => Self::LinearE { g: rows(&(rot * mat(g) * rot.transpose())) },
            Self::LinearB { g } => Self::LinearB { g: rows(&(rot * mat(g) * rot.transpose())) },
        }
    }
}

/// Cauchy data on the initial slice for a particle at rest at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    /// Charge profile.
    pub fe: DensityProfile,
    pub c: f64,
    pub fields: Vec<FieldComponent>,
    /// Proposed initial velocity, checked against the constraints if given.
    #[serde(default)]
    pub v0: Option<Vec3>,
    /// Proposed initial rotation, checked against the constraints if given.
    #[serde(default)]
    pub omega0: Option<Vec3>,
}

impl InitialData {
    pub fn new(fe: DensityProfile, c: f64, fields: Vec<FieldComponent>) -> Self {
        Self { fe, c, fields, v0: None, omega0: None }
    }

    /// Reject data violating ∇·B = 0 or Gauss's law (external parts must be
    /// divergence free).
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0) {
            return Err(LedError::domain("c must be positive"));
        }
        if self.fe.point_fraction > 0.0 {
            return Err(LedError::domain("charge profiles carry no point fraction"));
        }
        for f in &self.fields {
            if let FieldComponent::LinearE { g } | FieldComponent::LinearB { g } = f {
                let tr = mat(g).trace();
                let scale = mat(g).norm().max(f64::MIN_POSITIVE);
                if tr.abs() > 1e-12 * scale {
                    return Err(LedError::Constraint(format!(
                        "linear field component has divergence {tr}; initial fields must satisfy Gauss's law"
                    )));
                }
            }
            if let FieldComponent::Dipole { omega } = f {
                if !(omega.norm() * self.fe.radius < self.c) {
                    return Err(LedError::domain("dipole component needs |ω|R < c"));
                }
            }
        }
        Ok(())
    }

    /// Data rotated rigidly by `rot`.
    pub fn rotated(&self, rot: &Matrix3<f64>) -> Self {
        Self {
            fe: self.fe.clone(),
            c: self.c,
            fields: self.fields.iter().map(|f| f.rotated(rot)).collect(),
            v0: self.v0.map(|v| rot * v),
            omega0: self.omega0.map(|w| rot * w),
        }
    }

    fn state(&self, omega: Vec3) -> StationaryState {
        StationaryState { fe: self.fe.clone(), omega, c: self.c }
    }
}

impl FieldSnapshot for InitialData {
    fn e_field(&self, x: &Vec3) -> Vec3 {
        self.fields
            .iter()
            .map(|f| match f {
                FieldComponent::Coulomb => self.state(Vec3::zeros()).e_field(x),
                FieldComponent::UniformE { e } => *e,
                FieldComponent::LinearE { g } => mat(g) * x,
                _ => Vec3::zeros(),
            })
            .sum()
    }

    fn b_field(&self, x: &Vec3) -> Vec3 {
        self.fields
            .iter()
            .map(|f| match f {
                FieldComponent::Dipole { omega } => self.state(*omega).b_field(x),
                FieldComponent::UniformB { b } => *b,
                FieldComponent::LinearB { g } => mat(g) * x,
                _ => Vec3::zeros(),
            })
            .sum()
    }

    fn exterior_multipoles(&self) -> Option<(f64, Vec3)> {
        let mut q = 0.0;
        let mut mu = Vec3::zeros();
        for f in &self.fields {
            match f {
                FieldComponent::Coulomb => q += self.fe.total,
                FieldComponent::Dipole { omega } => mu += self.state(*omega).magnetic_moment(),
                _ => return None,
            }
        }
        Some((q, mu))
    }
}

/// Quadrature over the charge support used for the moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentQuadrature {
    pub n_radial: usize,
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for MomentQuadrature {
    fn default() -> Self {
        Self { n_radial: 16, n_theta: 12, n_phi: 24 }
    }
}

/// Classifier settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityConfig {
    /// A moment or singular value counts as zero below this fraction of the
    /// field scale.
    pub zero_tol: f64,
    pub quad: MomentQuadrature,
}

impl Default for AdmissibilityConfig {
    fn default() -> Self {
        Self { zero_tol: 1e-10, quad: MomentQuadrature::default() }
    }
}

/// Charge-weighted field moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub charge: f64,
    pub radius: f64,
    pub mean_e: Vec3,
    pub mean_b: Vec3,
    /// ⟨x×E⟩
    pub x_cross_e: Vec3,
    /// σ = ⟨x x·B⟩
    pub x_x_dot_b: Vec3,
    /// X_ij = ⟨x_i B_j⟩, by rows.
    pub x_tensor_b: [[f64; 3]; 3],
    /// Initial electric torque ∫ x×E dq.
    pub t_e0: Vec3,
    /// Initial magnetic spin ∫ x x·B dq.
    pub sigma_b0: Vec3,
    /// Field scale for the zero tests: the largest of |q|/R² and the moments
    /// in field units.
    pub scale: f64,
}

impl Moments {
    pub fn x_tensor(&self) -> Matrix3<f64> {
        mat(&self.x_tensor_b)
    }

    /// X − tr X·I, the coefficient of ω in the translation equation.
    pub fn spin_coupling(&self) -> Matrix3<f64> {
        let x = self.x_tensor();
        x - Matrix3::identity() * x.trace()
    }
}

/// Moments of the initial fields over the charge support.
pub fn moments(data: &InitialData, quad: &MomentQuadrature) -> Result<Moments> {
    data.validate()?;
    let q = data.fe.total;
    if q == 0.0 {
        return Err(LedError::domain("averages need a nonzero total charge"));
    }
    let ang = sphere_rule(quad.n_theta, quad.n_phi);
    let (mut e, mut b, mut xe, mut xb) = (Vec3::zeros(), Vec3::zeros(), Vec3::zeros(), Vec3::zeros());
    let mut xt = Matrix3::zeros();
    for (r, dq) in data.fe.radial_nodes(quad.n_radial) {
        for (n, wa) in &ang {
            let x = n * r;
            let w = dq * wa / q;
            let ef = data.e_field(&x);
            let bf = data.b_field(&x);
            e += w * ef;
            b += w * bf;
            xe += w * x.cross(&ef);
            xb += w * x * x.dot(&bf);
            xt += w * x * bf.transpose();
        }
    }
    let big_r = data.fe.radius;
    let scale =
        [q.abs() / (big_r * big_r), e.norm(), b.norm(), xe.norm() / big_r, xb.norm() / big_r, xt.norm() / big_r]
            .into_iter()
            .fold(0.0, f64::max);
    Ok(Moments {
        charge: q,
        radius: big_r,
        mean_e: e,
        mean_b: b,
        x_cross_e: xe,
        x_x_dot_b: xb,
        x_tensor_b: rows(&xt),
        t_e0: q * xe,
        sigma_b0: q * xb,
        scale,
    })
}

/// Singular limit whose initial constraints are checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Nodvik,
    AbrahamSpin,
    AbrahamNospin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Every velocity and rotation allowed by the model is admissible.
    Consistent,
    /// Admissible only on a restricted family of q̇₀, ω₀.
    ConditionallyConsistent,
    /// No q̇₀, ω₀ satisfies the constraints.
    Inconsistent,
}

/// One direction of the admissible family, in physical units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeParameter {
    pub name: String,
    pub q_dot: Vec3,
    pub omega: Vec3,
}

/// One alternative of the case analysis on the field moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub statement: String,
    /// Whether the premise of the alternative holds for these data.
    pub applies: bool,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub model: Model,
    pub verdict: Verdict,
    pub moments: Moments,
    /// Minimum-norm admissible q̇₀ (absent for Nodvik, where the particle is
    /// at rest).
    pub q_dot: Option<Vec3>,
    /// Minimum-norm admissible ω₀ (absent without spin).
    pub omega: Option<Vec3>,
    pub free_parameters: Vec<FreeParameter>,
    /// Least-squares residual of the constraints relative to the field scale.
    pub residual: f64,
    /// Residual of the proposed v0/omega0, when given.
    pub given_residual: Option<f64>,
    pub conditions: Vec<Condition>,
    pub description: String,
}

impl ConstraintReport {
    /// Family member with the given free-parameter coefficients.
    pub fn member(&self, coeffs: &[f64]) -> (Vec3, Vec3) {
        let mut q = self.q_dot.unwrap_or_else(Vec3::zeros);
        let mut w = self.omega.unwrap_or_else(Vec3::zeros);
        for (p, k) in self.free_parameters.iter().zip(coeffs) {
            q += *k * p.q_dot;
            w += *k * p.omega;
        }
        (q, w)
    }
}

fn skew(v: &Vec3) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Residuals (translation, rotation) of the constraint equations in their
/// physical form, for a candidate q̇₀ and ω₀.
pub fn constraint_residuals(m: &Moments, model: Model, c: f64, q_dot: &Vec3, omega: &Vec3) -> (Vec3, Vec3) {
    let x = m.x_tensor();
    let trans = c * m.mean_e + q_dot.cross(&m.mean_b) + m.spin_coupling() * omega;
    let rot = c * m.x_cross_e + (Matrix3::identity() * x.trace() - x.transpose()) * q_dot + omega.cross(&m.x_x_dot_b);
    match model {
        Model::Nodvik => (Vec3::zeros(), m.t_e0 + omega.cross(&m.sigma_b0) / c),
        Model::AbrahamSpin => (trans, rot),
        Model::AbrahamNospin => (c * m.mean_e + q_dot.cross(&m.mean_b), Vec3::zeros()),
    }
}

/// Relative size of the residuals, comparable with the zero tolerance.
fn scaled_residual(m: &Moments, model: Model, c: f64, res: (Vec3, Vec3)) -> f64 {
    let (t, r) = res;
    let r = match model {
        Model::Nodvik => r / (m.charge.abs() * m.radius),
        _ => r / m.radius,
    };
    (t.norm_squared() + r.norm_squared()).sqrt() / (c * m.scale)
}

/// Linear system in the scaled unknowns a = q̇/c, b = ωR/c.
fn system(m: &Moments, model: Model) -> (DMatrix<f64>, DVector<f64>) {
    let big_r = m.radius;
    let x = m.x_tensor();
    let tr_block = -skew(&m.mean_b);
    let tw_block = m.spin_coupling() / big_r;
    let rt_block = (Matrix3::identity() * x.trace() - x.transpose()) / big_r;
    let rw_block = -skew(&m.x_x_dot_b) / (big_r * big_r);
    let put = |a: &mut DMatrix<f64>, r0: usize, c0: usize, blk: &Matrix3<f64>| {
        for i in 0..3 {
            for j in 0..3 {
                a[(r0 + i, c0 + j)] = blk[(i, j)];
            }
        }
    };
    match model {
        Model::Nodvik => {
            let mut a = DMatrix::zeros(3, 3);
            put(&mut a, 0, 0, &rw_block);
            let rhs = -m.x_cross_e / big_r;
            (a, DVector::from_column_slice(rhs.as_slice()))
        }
        Model::AbrahamNospin => {
            let mut a = DMatrix::zeros(3, 3);
            put(&mut a, 0, 0, &tr_block);
            (a, DVector::from_column_slice((-m.mean_e).as_slice()))
        }
        Model::AbrahamSpin => {
            let mut a = DMatrix::zeros(6, 6);
            put(&mut a, 0, 0, &tr_block);
            put(&mut a, 0, 3, &tw_block);
            put(&mut a, 3, 0, &rt_block);
            put(&mut a, 3, 3, &rw_block);
            let mut rhs = DVector::zeros(6);
            rhs.rows_mut(0, 3).copy_from(&(-m.mean_e));
            rhs.rows_mut(3, 3).copy_from(&(-m.x_cross_e / big_r));
            (a, rhs)
        }
    }
}

/// Minimum-norm solution, rank and null-space basis with singular values
/// below `tol` treated as zero.
fn solve(a: &DMatrix<f64>, rhs: &DVector<f64>, tol: f64) -> (DVector<f64>, Vec<DVector<f64>>) {
    let n = a.ncols();
    let svd = a.clone().svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let vt = svd.v_t.as_ref().expect("v_t requested");
    let mut x = DVector::zeros(n);
    let mut null = Vec::new();
    for (k, s) in svd.singular_values.iter().enumerate() {
        let v = vt.row(k).transpose();
        if *s > tol {
            x += v * (u.column(k).dot(rhs) / s);
        } else {
            null.push(v);
        }
    }
    (x, null)
}

/// Rotate a null-space basis of the Abraham system so that directions with
/// no q̇ part (pure ω, the γ family) are separated from the rest.
fn split_null(null: Vec<DVector<f64>>) -> Vec<DVector<f64>> {
    if null.len() < 2 {
        return null;
    }
    let k = null.len();
    let n = DMatrix::from_columns(&null);
    let na = n.rows(0, 3).into_owned();
    let svd = na.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    // SVD of a 3×k block yields min(3, k) right vectors; complete to k.
    let mut basis: Vec<DVector<f64>> = (0..vt.nrows()).map(|i| vt.row(i).transpose()).collect();
    for e in 0..k {
        if basis.len() == k {
            break;
        }
        let mut v = DVector::zeros(k);
        v[e] = 1.0;
        for b in &basis {
            v -= b * b.dot(&v);
        }
        if v.norm() > 1e-8 {
            basis.push(v.normalize());
        }
    }
    basis.iter().map(|c| &n * c).collect()
}

fn unscale(model: Model, z: &DVector<f64>, c: f64, big_r: f64) -> (Vec3, Vec3) {
    match model {
        Model::Nodvik => (Vec3::zeros(), Vec3::new(z[0], z[1], z[2]) * (c / big_r)),
        Model::AbrahamNospin => (Vec3::new(z[0], z[1], z[2]) * c, Vec3::zeros()),
        Model::AbrahamSpin => (Vec3::new(z[0], z[1], z[2]) * c, Vec3::new(z[3], z[4], z[5]) * (c / big_r)),
    }
}

fn conditions(m: &Moments, model: Model, tol: f64) -> Vec<Condition> {
    let zero = |v: f64| v.abs() <= tol * m.scale;
    let cond = |s: &str, applies: bool, holds: bool| Condition { statement: s.into(), applies, holds };
    let big_r = m.radius;
    let sig = m.x_x_dot_b / big_r;
    let xe = m.x_cross_e;
    let (e, b) = (m.mean_e, m.mean_b);
    match model {
        Model::Nodvik => {
            let (t, s) = (m.t_e0 / (m.charge.abs() * big_r), m.sigma_b0 / (m.charge.abs() * big_r));
            vec![
                cond("sigma_B0 = 0 requires t_E0 = 0", zero(s.norm()), zero(t.norm())),
                cond("sigma_B0 != 0 requires t_E0 . sigma_B0 = 0", !zero(s.norm()), zero(t.dot(&s) / s.norm())),
            ]
        }
        Model::AbrahamNospin => vec![
            cond("<B> = 0 requires <E> = 0", zero(b.norm()), zero(e.norm())),
            cond("<B> != 0 requires <E> . <B> = 0", !zero(b.norm()), zero(e.dot(&b) / b.norm())),
        ],
        Model::AbrahamSpin => {
            let mc = m.spin_coupling() / big_r;
            let svd = mc.svd(true, false);
            let u = svd.u.expect("u requested");
            let left_kernel: Vec<Vec3> =
                (0..3).filter(|&k| zero(svd.singular_values[k])).map(|k| u.column(k).into_owned()).collect();
            let proj = |v: &Vec3| left_kernel.iter().map(|k| k.dot(v).powi(2)).sum::<f64>().sqrt();
            let m_zero = left_kernel.len() == 3;
            let b_in_kernel = !zero(b.norm()) && zero(b.norm() - proj(&b));
            vec![
                cond("<x x.B> = 0 requires <x x E> = 0", zero(sig.norm()), zero(xe.norm() / big_r)),
                cond(
                    "<x x.B> != 0 requires <x x E> . <x x.B> = 0",
                    !zero(sig.norm()),
                    zero(xe.dot(&sig) / (big_r * sig.norm())),
                ),
                cond("<B> = 0 and X - tr X I = 0 require <E> = 0", zero(b.norm()) && m_zero, zero(e.norm())),
                cond(
                    "<B> = 0 requires <E> orthogonal to the left kernel of X - tr X I",
                    zero(b.norm()) && !m_zero,
                    zero(proj(&e)),
                ),
                cond(
                    "<B> != 0 in the left kernel of X - tr X I requires <E> . <B> = 0",
                    b_in_kernel,
                    zero(e.dot(&b) / b.norm()),
                ),
            ]
        }
    }
}

/// Classify initial data for `model`.
pub fn check(model: Model, data: &InitialData, cfg: &AdmissibilityConfig) -> Result<ConstraintReport> {
    let m = moments(data, &cfg.quad)?;
    let c = data.c;
    let tol = cfg.zero_tol * m.scale;
    let (a, rhs) = system(&m, model);
    let (z, null) = solve(&a, &rhs, tol);
    let null = if model == Model::AbrahamSpin { split_null(null) } else { null };
    let (q_dot, omega) = unscale(model, &z, c, m.radius);
    let residual = scaled_residual(&m, model, c, constraint_residuals(&m, model, c, &q_dot, &omega));
    let n_unknowns = a.ncols();
    let verdict = if residual > cfg.zero_tol {
        Verdict::Inconsistent
    } else if null.len() == n_unknowns {
        Verdict::Consistent
    } else {
        Verdict::ConditionallyConsistent
    };
    let mut free_parameters = Vec::new();
    if verdict != Verdict::Inconsistent {
        for (k, v) in null.iter().enumerate() {
            let (qd, w) = unscale(model, v, c, m.radius);
            let name = match model {
                Model::Nodvik => "alpha".to_string(),
                Model::AbrahamNospin => "beta".to_string(),
                Model::AbrahamSpin if qd.norm() <= 1e-12 * c => "gamma".to_string(),
                Model::AbrahamSpin if w.norm() * m.radius <= 1e-12 * c => "beta".to_string(),
                Model::AbrahamSpin => format!("p{k}"),
            };
            free_parameters.push(FreeParameter { name, q_dot: qd, omega: w });
        }
    }
    let given_residual = if data.v0.is_some() || data.omega0.is_some() {
        let v = data.v0.unwrap_or_else(Vec3::zeros);
        let w = data.omega0.unwrap_or_else(Vec3::zeros);
        Some(scaled_residual(&m, model, c, constraint_residuals(&m, model, c, &v, &w)))
    } else {
        None
    };
    let unknowns = match model {
        Model::Nodvik => "omega0",
        Model::AbrahamSpin => "q_dot0 and omega0",
        Model::AbrahamNospin => "q_dot0",
    };
    let description = match verdict {
        Verdict::Consistent => format!("{unknowns} unconstrained"),
        Verdict::Inconsistent => format!("no {unknowns} satisfies the initial constraints"),
        Verdict::ConditionallyConsistent => {
            let names: Vec<&str> = free_parameters.iter().map(|p| p.name.as_str()).collect();
            format!(
                "{unknowns} restricted to a {}-parameter family ({})",
                free_parameters.len(),
                if names.is_empty() { "unique".to_string() } else { names.join(", ") }
            )
        }
    };
    Ok(ConstraintReport {
        model,
        verdict,
        conditions: conditions(&m, model, cfg.zero_tol),
        moments: m,
        q_dot: (model != Model::Nodvik).then_some(q_dot),
        omega: (model != Model::AbrahamNospin).then_some(omega),
        free_parameters,
        residual,
        given_residual,
        description,
    })
}

/// Nodvik point-mass limit: t_E0 + ω₀×σ_B0/c = 0.
pub fn nodvik_check(data: &InitialData, cfg: &AdmissibilityConfig) -> Result<ConstraintReport> {
    check(Model::Nodvik, data, cfg)
}

/// Abraham model with spin: translation and rotation constraints.
pub fn abraham_spin_check(data: &InitialData, cfg: &AdmissibilityConfig) -> Result<ConstraintReport> {
    check(Model::AbrahamSpin, data, cfg)
}

/// Abraham model without spin: c⟨E⟩ + q̇₀×⟨B⟩ = 0.
pub fn abraham_nospin_check(data: &InitialData, cfg: &AdmissibilityConfig) -> Result<ConstraintReport> {
    check(Model::AbrahamNospin, data, cfg)
}

/// Variant of the semi-relativistic conserved functionals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemirelOptions {
    /// Include the rotational energy |s_b|²/2I_b (dropped in the I_b → ∞
    /// limit, where s_b still enters the angular momentum).
    pub with_spin: bool,
    /// Einsteinian momentum and kinetic energy instead of Newtonian ones.
    pub einstein: bool,
}

impl Default for SemirelOptions {
    fn default() -> Self {
        Self { with_spin: true, einstein: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemirelFunctionals {
    pub energy: f64,
    pub momentum: Vec3,
    pub angular_momentum: Vec3,
    pub charge: f64,
    pub field_energy: f64,
    pub field_momentum: Vec3,
    pub field_angular_momentum: Vec3,
    pub kinetic_energy: f64,
    pub spin_energy: f64,
    pub p_b: Vec3,
    pub s_b: Vec3,
}

/// W, P, L and Q of the semi-relativistic model for data with the particle
/// at the origin moving with v0 and rotating with omega0 (zero if absent).
/// The field terms are integrals over `grid`; analytic exterior tails are
/// added only for pure Coulomb plus dipole fields.
pub fn semirel_functionals(
    data: &InitialData,
    mb: f64,
    ib: f64,
    opts: SemirelOptions,
    grid: &SphericalGrid,
) -> Result<SemirelFunctionals> {
    data.validate()?;
    if !(mb > 0.0) || !(ib > 0.0) {
        return Err(LedError::domain("bare mass and moment of inertia must be positive"));
    }
    if grid.support < data.fe.radius || grid.r_max <= data.fe.radius {
        return Err(LedError::domain("grid does not cover the charge support"));
    }
    let c = data.c;
    let v = data.v0.unwrap_or_else(Vec3::zeros);
    let w = data.omega0.unwrap_or_else(Vec3::zeros);
    let (p_b, kinetic_energy) = if opts.einstein {
        let b2 = v.norm_squared() / (c * c);
        if !(b2 < 1.0) {
            return Err(LedError::domain("Einsteinian momentum needs |v| < c"));
        }
        let p = mb * v / (1.0 - b2).sqrt();
        (p, mb * c * c * (1.0 + p.norm_squared() / (mb * mb * c * c)).sqrt())
    } else {
        (mb * v, 0.5 * mb * v.norm_squared())
    };
    let s_b = ib * w;
    let spin_energy = if opts.with_spin { 0.5 * s_b.norm_squared() / ib } else { 0.0 };
    let g = ComplexField3::sample(data, grid);
    let field_energy = g.energy();
    let field_momentum = g.momentum(c);
    let field_angular_momentum = g.angular_momentum(c);
    Ok(SemirelFunctionals {
        energy: field_energy + spin_energy + kinetic_energy,
        momentum: field_momentum + p_b,
        angular_momentum: field_angular_momentum + s_b,
        charge: g.gauss_charge(),
        field_energy,
        field_momentum,
        field_angular_momentum,
        kinetic_energy,
        spin_energy,
        p_b,
        s_b,
    })
}

/// A named initial-data set with the model it is checked against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub model: Model,
    pub data: InitialData,
}

/// Names accepted by [`scenario`].
pub const SCENARIOS: [&str; 7] = [
    "uniform-E-coulomb-abraham",
    "uniform-E-coulomb-nodvik",
    "uniform-B-nodvik",
    "torque-B-nodvik",
    "coulomb-abraham",
    "uniform-E-coulomb-abraham-nospin",
    "crossed-EB-abraham-nospin",
];

/// Built-in data sets: a shell of charge −1 and radius 1 with c = 1 in
/// uniform E = 0.1 e3 and/or B = 0.2 e3 fields.
pub fn scenario(name: &str) -> Option<Scenario> {
    let fe = DensityProfile::shell(-1.0, 1.0).ok()?;
    let e = FieldComponent::UniformE { e: Vec3::new(0.0, 0.0, 0.1) };
    let b = FieldComponent::UniformB { b: Vec3::new(0.0, 0.0, 0.2) };
    // E = a×x with a along e3: torque parallel to the magnetic spin.
    let curl_e = FieldComponent::LinearE { g: [[0.0, -0.05, 0.0], [0.05, 0.0, 0.0], [0.0, 0.0, 0.0]] };
    let ex = FieldComponent::UniformE { e: Vec3::new(0.1, 0.0, 0.0) };
    use FieldComponent::Coulomb;
    let (model, fields) = match name {
        "uniform-E-coulomb-abraham" => (Model::AbrahamSpin, vec![Coulomb, e]),
        "uniform-E-coulomb-nodvik" => (Model::Nodvik, vec![Coulomb, e]),
        "uniform-B-nodvik" => (Model::Nodvik, vec![Coulomb, b]),
        "torque-B-nodvik" => (Model::Nodvik, vec![Coulomb, b, curl_e]),
        "coulomb-abraham" => (Model::AbrahamSpin, vec![Coulomb]),
        "uniform-E-coulomb-abraham-nospin" => (Model::AbrahamNospin, vec![Coulomb, e]),
        "crossed-EB-abraham-nospin" => (Model::AbrahamNospin, vec![Coulomb, ex, b]),
        _ => return None,
    };
    Some(Scenario { name: name.to_string(), model, data: InitialData::new(fe, 1.0, fields) })
}
