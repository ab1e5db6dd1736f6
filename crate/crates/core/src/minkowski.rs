//! Four-vectors and rank-2 tensors on Minkowski space with metric
//! g = diag(−1, +1, +1, +1).
//!
//! Components are contravariant w.r.t. one global Lorentz frame. Contractions
//! run through the metric: `T·v = T G v`, `v·T = vᵀ G T`, `(A·B) = A G B`.

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{LedError, Result};
use crate::Vec3;

/// Default absolute tolerance for constraint checks.
pub const DEFAULT_TOL: f64 = 1e-10;

const G: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

fn metric_matrix() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::new(-1.0, 1.0, 1.0, 1.0))
}

/// Causal character of a four-vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Causal {
    Timelike,
    Spacelike,
    Lightlike,
}

/// Four-vector with index 0 timelike.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourVector {
    pub c: [f64; 4],
}

impl FourVector {
    pub const ZERO: FourVector = FourVector { c: [0.0; 4] };

    pub fn new(c0: f64, c1: f64, c2: f64, c3: f64) -> Self {
        Self { c: [c0, c1, c2, c3] }
    }

    /// Basis vector e_μ.
    pub fn e(mu: usize) -> Self {
        let mut c = [0.0; 4];
        c[mu] = 1.0;
        Self { c }
    }

    pub fn from_parts(t: f64, x: Vec3) -> Self {
        Self::new(t, x[0], x[1], x[2])
    }

    pub fn time(&self) -> f64 {
        self.c[0]
    }

    pub fn space(&self) -> Vec3 {
        Vec3::new(self.c[1], self.c[2], self.c[3])
    }

    pub fn inner(&self, other: &FourVector) -> f64 {
        inner(self, other)
    }

    /// Self inner product ‖a‖² (negative for timelike vectors).
    pub fn norm2(&self) -> f64 {
        inner(self, self)
    }

    /// Classification by the sign of ‖a‖², with `tol` deciding lightlike.
    pub fn causal(&self, tol: f64) -> Causal {
        let n = self.norm2();
        if n.abs() <= tol {
            Causal::Lightlike
        } else if n < 0.0 {
            Causal::Timelike
        } else {
            Causal::Spacelike
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { c: self.c.map(|x| s * x) }
    }

    fn v(&self) -> Vector4<f64> {
        Vector4::from_row_slice(&self.c)
    }

    fn from_v(v: Vector4<f64>) -> Self {
        Self { c: [v[0], v[1], v[2], v[3]] }
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}

impl std::ops::Add for FourVector {
    type Output = FourVector;
    fn add(self, o: FourVector) -> FourVector {
        FourVector { c: std::array::from_fn(|i| self.c[i] + o.c[i]) }
    }
}

impl std::ops::Sub for FourVector {
    type Output = FourVector;
    fn sub(self, o: FourVector) -> FourVector {
        FourVector { c: std::array::from_fn(|i| self.c[i] - o.c[i]) }
    }
}

impl std::ops::Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        self.scale(-1.0)
    }
}

/// Symmetry tag carried by constructed tensors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Symmetry {
    Symmetric,
    Antisymmetric,
    General,
}

/// Rank-2 tensor with contravariant components `m[μ][ν]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rank2Tensor {
    pub m: [[f64; 4]; 4],
    pub symmetry: Symmetry,
}

/// Sign selector for [`commutators`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bracket {
    /// A·B + B·A
    Anti,
    /// A·B − B·A
    Comm,
}

impl Rank2Tensor {
    pub fn zero() -> Self {
        Self { m: [[0.0; 4]; 4], symmetry: Symmetry::Symmetric }
    }

    pub fn general(m: [[f64; 4]; 4]) -> Self {
        Self { m, symmetry: Symmetry::General }
    }

    /// The metric tensor g^{μν}; acts as the identity.
    pub fn metric() -> Self {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = G[i];
        }
        Self { m, symmetry: Symmetry::Symmetric }
    }

    /// a ⊗ b.
    pub fn outer(a: &FourVector, b: &FourVector) -> Self {
        Self::general(std::array::from_fn(|i| std::array::from_fn(|j| a.c[i] * b.c[j])))
    }

    /// Tensor whose space block is `s` and all other components vanish.
    pub fn from_space_block(s: &nalgebra::Matrix3<f64>) -> Self {
        let mut m = [[0.0; 4]; 4];
        for i in 0..3 {
            for j in 0..3 {
                m[i + 1][j + 1] = s[(i, j)];
            }
        }
        Self::general(m)
    }

    pub fn space_block(&self) -> nalgebra::Matrix3<f64> {
        nalgebra::Matrix3::from_fn(|i, j| self.m[i + 1][j + 1])
    }

    fn mat(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|i, j| self.m[i][j])
    }

    fn from_mat(a: Matrix4<f64>, symmetry: Symmetry) -> Self {
        Self { m: std::array::from_fn(|i| std::array::from_fn(|j| a[(i, j)])), symmetry }
    }

    /// Matrix of the linear map v ↦ T·v on contravariant components.
    pub fn action_matrix(&self) -> Matrix4<f64> {
        self.mat() * metric_matrix()
    }

    /// T·v.
    pub fn act(&self, v: &FourVector) -> FourVector {
        FourVector::from_v(self.action_matrix() * v.v())
    }

    /// v·T.
    pub fn act_left(&self, v: &FourVector) -> FourVector {
        FourVector::from_v((v.v().transpose() * metric_matrix() * self.mat()).transpose())
    }

    /// A·B.
    pub fn dot(&self, other: &Rank2Tensor) -> Rank2Tensor {
        Self::from_mat(self.mat() * metric_matrix() * other.mat(), Symmetry::General)
    }

    pub fn transpose(&self) -> Rank2Tensor {
        Self::from_mat(self.mat().transpose(), self.symmetry)
    }

    pub fn scale(&self, s: f64) -> Rank2Tensor {
        let tag = if s == 0.0 { Symmetry::Symmetric } else { self.symmetry };
        Self { m: self.m.map(|r| r.map(|x| s * x)), symmetry: tag }
    }

    pub fn add(&self, o: &Rank2Tensor) -> Rank2Tensor {
        let tag = if self.symmetry == o.symmetry { self.symmetry } else { Symmetry::General };
        Self::from_mat(self.mat() + o.mat(), tag)
    }

    pub fn sub(&self, o: &Rank2Tensor) -> Rank2Tensor {
        self.add(&o.scale(-1.0))
    }

    /// Retag, projecting onto the tagged symmetry class so the tag holds exactly.
    pub fn with_symmetry(self, s: Symmetry) -> Self {
        let a = self.mat();
        match s {
            Symmetry::General => Self::from_mat(a, s),
            Symmetry::Symmetric => Self::from_mat(0.5 * (a + a.transpose()), s),
            Symmetry::Antisymmetric => Self::from_mat(0.5 * (a - a.transpose()), s),
        }
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Largest |T^{μν} − T^{νμ}|.
    pub fn asymmetry(&self) -> f64 {
        self.sub(&self.transpose()).max_abs()
    }

    /// Operator norm of v ↦ T·v (largest singular value of the action matrix).
    pub fn operator_norm(&self) -> f64 {
        self.action_matrix().singular_values().max()
    }

    /// Λ T Λᵀ for a Lorentz matrix Λ acting on contravariant components.
    pub fn transformed(&self, lambda: &Matrix4<f64>) -> Rank2Tensor {
        Self::from_mat(lambda * self.mat() * lambda.transpose(), self.symmetry)
    }
}

/// −a⁰b⁰ + Σ aⁱbⁱ.
pub fn inner(a: &FourVector, b: &FourVector) -> f64 {
    (0..4).map(|i| G[i] * a.c[i] * b.c[i]).sum()
}

/// a ∧ b = a⊗b − b⊗a.
pub fn wedge_up(a: &FourVector, b: &FourVector) -> Rank2Tensor {
    let m = std::array::from_fn(|i| std::array::from_fn(|j| a.c[i] * b.c[j] - b.c[i] * a.c[j]));
    Rank2Tensor { m, symmetry: Symmetry::Antisymmetric }
}

/// a ∨ b = a⊗b + b⊗a.
pub fn wedge_down(a: &FourVector, b: &FourVector) -> Rank2Tensor {
    let m = std::array::from_fn(|i| std::array::from_fn(|j| a.c[i] * b.c[j] + b.c[i] * a.c[j]));
    Rank2Tensor { m, symmetry: Symmetry::Symmetric }
}

/// Σ_μ g^{μμ} T^{μμ}.
pub fn trace(t: &Rank2Tensor) -> f64 {
    if t.symmetry == Symmetry::Antisymmetric {
        return 0.0;
    }
    (0..4).map(|i| G[i] * t.m[i][i]).sum()
}

/// A·B ± B·A.
pub fn commutators(a: &Rank2Tensor, b: &Rank2Tensor, sign: Bracket) -> Rank2Tensor {
    let ab = a.dot(b);
    let ba = b.dot(a);
    let out = match sign {
        Bracket::Anti => ab.add(&ba),
        Bracket::Comm => ab.sub(&ba),
    };
    let tag = match (a.symmetry, b.symmetry, sign) {
        (Symmetry::General, _, _) | (_, Symmetry::General, _) => Symmetry::General,
        (x, y, Bracket::Anti) if x == y => Symmetry::Symmetric,
        (x, y, Bracket::Comm) if x != y => Symmetry::Symmetric,
        _ => Symmetry::Antisymmetric,
    };
    out.with_symmetry(tag)
}

fn check_unit_timelike(u: &FourVector, tol: f64) -> Result<()> {
    let r = u.norm2() + 1.0;
    if !(r.abs() <= tol) || u.c[0] <= 0.0 {
        return Err(LedError::constraint(format!(
            "u must be a future unit timelike vector (‖u‖²+1 = {r:e}, u⁰ = {})",
            u.c[0]
        )));
    }
    Ok(())
}

/// Space-space part, time-space part and helicity of an antisymmetric S
/// relative to the unit timelike u.
pub fn split_space_time(s: &Rank2Tensor, u: &FourVector) -> Result<(Rank2Tensor, Rank2Tensor, FourVector)> {
    check_unit_timelike(u, DEFAULT_TOL)?;
    let uu = Rank2Tensor::outer(u, u);
    let sperp = s.add(&commutators(&uu, s, Bracket::Anti)).with_symmetry(Symmetry::Antisymmetric);
    let h = s.act(u);
    let spar = wedge_up(u, &h);
    Ok((sperp, spar, h))
}

/// Pure boost Λ(v) mapping rest-frame components to those of a frame in which
/// the rest frame moves with velocity `v` (units of c). Λ e0 = (γ, γv).
pub fn boost_matrix(v: &Vec3) -> Result<Matrix4<f64>> {
    let b2 = v.norm_squared();
    if b2 >= 1.0 {
        return Err(LedError::domain(format!("boost speed {} ≥ c", b2.sqrt())));
    }
    let gamma = 1.0 / (1.0 - b2).sqrt();
    let k = if b2 > 0.0 { (gamma - 1.0) / b2 } else { 0.0 };
    let mut l = Matrix4::identity();
    l[(0, 0)] = gamma;
    for i in 0..3 {
        l[(0, i + 1)] = gamma * v[i];
        l[(i + 1, 0)] = gamma * v[i];
        for j in 0..3 {
            l[(i + 1, j + 1)] += k * v[i] * v[j];
        }
    }
    Ok(l)
}

/// Apply a Lorentz matrix to a four-vector.
pub fn transform(lambda: &Matrix4<f64>, a: &FourVector) -> FourVector {
    FourVector::from_v(lambda * a.v())
}

/// Boost taking the unit timelike `u` to its rest frame (Λ u = e0), together
/// with its inverse.
pub fn rest_frame_boost(u: &FourVector) -> Result<(Matrix4<f64>, Matrix4<f64>)> {
    check_unit_timelike(u, DEFAULT_TOL)?;
    let v = u.space() / u.c[0];
    Ok((boost_matrix(&-v)?, boost_matrix(&v)?))
}

fn rest_dual(om: &Rank2Tensor) -> Vec3 {
    Vec3::new(om.m[2][3], om.m[3][1], om.m[1][2])
}

fn rest_tensor(w: &Vec3) -> Rank2Tensor {
    let mut m = [[0.0; 4]; 4];
    m[2][3] = w[0];
    m[3][2] = -w[0];
    m[3][1] = w[1];
    m[1][3] = -w[1];
    m[1][2] = w[2];
    m[2][1] = -w[2];
    Rank2Tensor { m, symmetry: Symmetry::Antisymmetric }
}

/// Spacelike dual w of a space-space antisymmetric Ω relative to u.
///
/// In the rest frame Ω^{ij} = ε_{ijk} ωₖ, so that Ω·x = −(0, ω×x).
pub fn dual_vector(om: &Rank2Tensor, u: &FourVector) -> Result<FourVector> {
    let r = om.act(u).max_abs();
    if r > DEFAULT_TOL * (1.0 + om.max_abs()) {
        return Err(LedError::constraint(format!("Ω·u ≠ 0 (residual {r:e})")));
    }
    let (to_rest, from_rest) = rest_frame_boost(u)?;
    let w = rest_dual(&om.transformed(&to_rest));
    Ok(transform(&from_rest, &FourVector::from_parts(0.0, w)))
}

/// Inverse of [`dual_vector`]: the space-space tensor dual to w ⟂ u.
pub fn dual_tensor(w: &FourVector, u: &FourVector) -> Result<Rank2Tensor> {
    let r = inner(w, u);
    if r.abs() > DEFAULT_TOL * (1.0 + w.max_abs()) {
        return Err(LedError::constraint(format!("w·u ≠ 0 (residual {r:e})")));
    }
    let (to_rest, from_rest) = rest_frame_boost(u)?;
    let wr = transform(&to_rest, w).space();
    Ok(rest_tensor(&wr).transformed(&from_rest))
}

/// Rest-frame angular-velocity tensor for the three-vector ω.
pub fn omega_tensor_rest(w: &Vec3) -> Rank2Tensor {
    rest_tensor(w)
}
