use ledlab::bare_particle::DensityProfile;
use ledlab::fields::*;
use ledlab::minkowski::{trace, FourVector};
use ledlab::quadrature::{adaptive_gk, sphere_rule, GlRule};
use ledlab::Vec3;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// ∫ x' dq(x')/|x − x'| for a spherically symmetric measure is x̂·I(r) with
/// I(r) = ∫ dq(r') ½∫ r'μ/√(r² + r'² − 2rr'μ) dμ; adaptive in s with
/// μ = 1 − s², which removes the coincident-point singularity.
fn shell_kernel(r: f64, rp: f64) -> f64 {
    0.5 * adaptive_gk(
        |s| {
            let mu = 1.0 - s * s;
            2.0 * s * rp * mu / ((r - rp).powi(2) + 2.0 * r * rp * s * s).sqrt()
        },
        0.0,
        2f64.sqrt(),
        1e-15,
        1e-13,
    )
    .unwrap()
    .value
}

fn vector_potential_oracle(fe: &DensityProfile, omega: &Vec3, c: f64, x: &Vec3) -> Vec3 {
    let r = x.norm();
    let i: f64 = if fe.is_shell() {
        fe.total * shell_kernel(r, fe.radius)
    } else {
        // uniform ball, split at the kink r' = r
        let big_r = fe.radius;
        let dens = |rp: f64| fe.total * 3.0 * rp * rp / big_r.powi(3) * shell_kernel(r, rp);
        let cut = r.min(big_r);
        adaptive_gk(dens, 0.0, cut, 1e-15, 1e-12).unwrap().value
            + adaptive_gk(dens, cut, big_r, 1e-15, 1e-12).unwrap().value
    };
    omega.cross(&(x / r)) * (i / c)
}

#[test]
fn shell_potentials() {
    let fe = DensityProfile::shell(-1.0, 1.0).unwrap();
    let st = stationary_state(&fe, &Vec3::new(0.0, 0.0, 0.5), 1.0).unwrap();
    for r in [1.5, 3.0, 10.0] {
        assert!(rel(st.phi(r), -1.0 / r) < 1e-15);
    }
    for r in [0.0, 0.3, 0.99] {
        assert!(rel(st.phi(r), -1.0) < 1e-15);
    }
    assert!(stationary_state(&fe, &Vec3::new(1.0, 0.0, 0.0), 1.0).is_err());
    assert!(stationary_state(&fe.clone().with_point_fraction(0.1).unwrap(), &Vec3::zeros(), 1.0).is_err());
}

#[test]
fn vector_potential_matches_defining_integral() {
    let omega = Vec3::new(0.3, 0.0, 0.2);
    for fe in [DensityProfile::shell(-1.0, 1.0).unwrap(), DensityProfile::volume(-1.0, 1.0).unwrap()] {
        let st = stationary_state(&fe, &omega, 1.0).unwrap();
        for x in [Vec3::new(0.0, 0.2, 0.4), Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.7, 1.1, -0.9)] {
            let a = st.vector_potential(&x);
            let o = vector_potential_oracle(&fe, &omega, 1.0, &x);
            assert!((a - o).norm() < 1e-10 * o.norm(), "{x:?}: {a:?} vs {o:?}");
        }
    }
    // continuity at R: inner and outer closed forms against the integral at R
    let fe = DensityProfile::shell(-1.0, 1.0).unwrap();
    let st = stationary_state(&fe, &omega, 1.0).unwrap();
    let inner = st.w(1.0 - 1e-12).norm();
    let outer = st.w(1.0 + 1e-12).norm();
    let o =
        vector_potential_oracle(&fe, &Vec3::new(0.0, 1.0, 0.0), 1.0, &Vec3::new(0.0, 0.0, 1.0)).norm() * omega.norm();
    assert!(rel(inner, o) < 1e-10 && rel(outer, o) < 1e-10);
}

#[test]
fn exterior_is_pure_toroidal_dipole() {
    let fe = DensityProfile::volume(-1.0, 1.0).unwrap();
    let omega = Vec3::new(0.1, -0.2, 0.3);
    let r = 2.0;
    let pts: Vec<Vec3> = sphere_rule(4, 8).into_iter().map(|(n, _)| n * r).collect();
    let samples: Vec<Vec3> = pts.iter().map(|x| vector_potential_oracle(&fe, &omega, 1.0, x)).collect();
    // l = 1 toroidal projection of A = K×x/r³: ⟨x×A⟩ = (2/3)K/r on the sphere
    let rule = sphere_rule(4, 8);
    let mut k = Vec3::zeros();
    for ((x, a), (_, w)) in pts.iter().zip(&samples).zip(&rule) {
        k += *w * x.cross(a) * 1.5 * r;
    }
    let mut resid = 0.0;
    let mut norm = 0.0;
    for (x, a) in pts.iter().zip(&samples) {
        let fit = k.cross(x) / r.powi(3);
        resid += (a - fit).norm_squared();
        norm += a.norm_squared();
    }
    assert!((resid / norm).sqrt() < 1e-8, "residual {}", (resid / norm).sqrt());
    let st = stationary_state(&fe, &omega, 1.0).unwrap();
    assert!((k - st.magnetic_moment()).norm() < 1e-9 * k.norm());
}

#[test]
fn magnetic_moment_examples() {
    let w = Vec3::new(0.0, 0.0, 1.0);
    let shell = DensityProfile::shell(-1.0, 1.0).unwrap();
    let vol = DensityProfile::volume(-1.0, 1.0).unwrap();
    assert_eq!(magnetic_moment(&shell, &Vec3::zeros(), 1.0), Vec3::zeros());
    let ms = magnetic_moment(&shell, &w, 1.0);
    let mv = magnetic_moment(&vol, &w, 1.0);
    assert!(rel(ms.norm(), 1.0 / 3.0) < 1e-15 && ms[2] < 0.0);
    assert!(rel(mv.norm(), 0.2) < 1e-15);
    // oracle: (1/2c)∫ x×(ω×x) dq by radial GL × sphere rule
    for (fe, m) in [(&shell, ms), (&vol, mv)] {
        let mut o = Vec3::zeros();
        for (r, dq) in fe.radial_nodes(16) {
            for (n, wa) in sphere_rule(8, 16) {
                let x = n * r;
                o += 0.5 * dq * wa * x.cross(&w.cross(&x));
            }
        }
        assert!((o - m).norm() < 1e-13);
    }
}

#[test]
fn field_energy_examples() {
    let fe = DensityProfile::shell(-1.0, 1.0).unwrap();
    let st = stationary_state(&fe, &Vec3::zeros(), 1.0).unwrap();
    assert!(rel(st.field_energy(), 0.5) < 1e-15);
    // luminal rotation: closed form 0.5(1 + 2/9); oracle = radial grid integral
    let lum = StationaryState { fe: fe.clone(), omega: Vec3::new(0.0, 0.0, 1.0), c: 1.0 };
    assert!(rel(lum.field_energy(), 0.6111111111111112) < 1e-15);
    let grid = RadialGrid::default_for(&fe);
    assert!(rel(lum.field_energy_grid(&grid), 0.6111111111111112) < 1e-6);
    for x in [0.1, 0.5, 0.9] {
        let st = stationary_state(&fe, &Vec3::new(x, 0.0, 0.0), 1.0).unwrap();
        assert!(rel(st.field_energy_grid(&grid), st.field_energy()) < 1e-6);
    }
    // volume: electrostatic part 3q²/5R
    let vol = DensityProfile::volume(-1.0, 1.0).unwrap();
    let st = stationary_state(&vol, &Vec3::zeros(), 1.0).unwrap();
    assert!(rel(st.field_energy(), 0.6) < 1e-10);
}

#[test]
fn field_spin_examples() {
    let fe = DensityProfile::shell(-1.0, 1.0).unwrap();
    let grid = RadialGrid::default_for(&fe);
    let st = stationary_state(&fe, &Vec3::zeros(), 1.0).unwrap();
    assert_eq!(field_spin(&st, &grid, 1e-6).unwrap().potential_form, Vec3::zeros());
    let st = stationary_state(&fe, &Vec3::new(0.0, 0.5, 0.0), 1.0).unwrap();
    let fs = field_spin(&st, &grid, 1e-6).unwrap();
    assert!(rel(fs.potential_form[1], 1.0 / 9.0) < 1e-15);
    assert!(rel(fs.poynting_form[1], 1.0 / 9.0) < 1e-6);
    let vol = DensityProfile::volume(-1.0, 1.0).unwrap();
    let st = stationary_state(&vol, &Vec3::new(0.0, 0.5, 0.0), 1.0).unwrap();
    let coarse = RadialGrid { panels: 4, ..RadialGrid::default_for(&vol) };
    let g1 = field_spin(&st, &coarse, 1e-3).unwrap().relative_gap;
    let g2 = field_spin(&st, &coarse.refined(4), 1e-6).unwrap().relative_gap;
    assert!(g2 < g1, "refinement should shrink the gap: {g1:e} → {g2:e}");
    assert!(field_spin(&st, &RadialGrid { panels: 1, order: 1, ..coarse }, 1e-12).is_err());
}

#[test]
fn conserved_functionals_of_stationary_state() {
    let fe = DensityProfile::shell(-1.0, 1.0).unwrap();
    let omega = Vec3::new(0.2, 0.1, 0.4);
    let st = stationary_state(&fe, &omega, 1.0).unwrap();
    let grid = SphericalGrid::default_for(&fe).unwrap();
    let g = ComplexField3::sample(&st, &grid);
    let particle = ParticleState {
        fm: DensityProfile::shell(1.0, 1.0).unwrap(),
        position: Vec3::zeros(),
        momentum: Vec3::zeros(),
        omega,
    };
    let f = conserved_functionals(&g, &particle, 1.0).unwrap();
    assert!(f.momentum.norm() < 1e-12);
    let sf = st.field_spin_poynting(&RadialGrid::default_for(&fe));
    assert!((f.field_angular_momentum - sf).norm() < 1e-8 * sf.norm());
    assert!(rel(f.charge, -1.0) < 1e-12);
    assert!(rel(f.field_energy, st.field_energy()) < 1e-10);
    let small = SphericalGrid::new(1.0, 1.0, 4, 4, 4);
    assert!(small.is_err());
}

#[test]
fn stress_energy_examples() {
    assert_eq!(stress_energy(&Vec3::zeros(), &Vec3::zeros()).max_abs(), 0.0);
}

proptest! {
    #[test]
    fn stress_energy_properties(e in prop::array::uniform3(-2.0f64..2.0), b in prop::array::uniform3(-2.0f64..2.0)) {
        let (e, b) = (Vec3::from(e), Vec3::from(b));
        let t = stress_energy(&e, &b);
        prop_assert!(trace(&t).abs() < 1e-12);
        prop_assert!(t.asymmetry() == 0.0);
        // oracle: componentwise energy density, Poynting vector and Maxwell
        // stress; the contravariant components are the negatives of the usual
        // ones, and T·e0 is the energy-momentum density (u, E×B/4π)
        let pi4 = 4.0 * std::f64::consts::PI;
        let u = (e.norm_squared() + b.norm_squared()) / (2.0 * pi4);
        let te0 = t.act(&FourVector::e(0));
        prop_assert!((te0.c[0] - u).abs() < 1e-12);
        prop_assert!((t.m[0][0] + u).abs() < 1e-12);
        let s = e.cross(&b) / pi4;
        for i in 0..3 {
            prop_assert!((te0.c[i + 1] - s[i]).abs() < 1e-12);
            for j in 0..3 {
                let d = if i == j { 0.5 * (e.norm_squared() + b.norm_squared()) } else { 0.0 };
                let sigma = (d - e[i] * e[j] - b[i] * b[j]) / pi4;
                prop_assert!((t.m[i + 1][j + 1] + sigma).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn stress_energy_divergence_free_outside_support() {
    let fe = DensityProfile::shell(-1.0, 1.0).unwrap();
    let st = stationary_state(&fe, &Vec3::new(0.2, -0.3, 0.5), 1.0).unwrap();
    let div = |x: Vec3, h: f64| {
        let mut d = [0.0; 4];
        for j in 0..3 {
            let mut dx = Vec3::zeros();
            dx[j] = h;
            let tp = stress_energy(&st.e_field(&(x + dx)), &st.b_field(&(x + dx)));
            let tm = stress_energy(&st.e_field(&(x - dx)), &st.b_field(&(x - dx)));
            for (mu, dm) in d.iter_mut().enumerate() {
                *dm += (tp.m[mu][j + 1] - tm.m[mu][j + 1]) / (2.0 * h);
            }
        }
        d.iter().map(|v| v.abs()).fold(0.0, f64::max)
    };
    let x = Vec3::new(1.3, 0.4, -0.8);
    let scale = stress_energy(&st.e_field(&x), &st.b_field(&x)).max_abs() / x.norm();
    let d1 = div(x, 1e-2);
    let d2 = div(x, 5e-3);
    assert!(d1 < 1e-3 * scale);
    assert!(d2 < d1 / 3.0, "second-order decay: {d1:e} → {d2:e}");
}

#[test]
fn comoving_examples() {
    let xo = Vec3::new(0.1, 0.2, 0.3);
    let x = Vec3::new(1.0, -0.5, 2.0);
    let y = x - xo;
    let (phi, a) = comoving_fields(&Vec3::zeros(), &Vec3::zeros(), &xo, &x).unwrap();
    assert!(rel(phi, 1.0 / y.norm()) < 1e-15 && a.norm() == 0.0);
    let mu = Vec3::new(0.3, -0.2, 0.7);
    let (_, a) = comoving_fields(&Vec3::zeros(), &mu, &xo, &x).unwrap();
    assert!((a - mu.cross(&y) / y.norm().powi(3)).norm() < 1e-15);
    // oracle: rest-frame Coulomb potential boosted by Λ(v) at lab time 0
    let v = Vec3::new(0.6, 0.0, 0.0);
    let (phi, a) = comoving_fields(&v, &Vec3::zeros(), &xo, &x).unwrap();
    let gamma = 1.25;
    let rest = Vec3::new(gamma * y[0], y[1], y[2]);
    let phi_rest = 1.0 / rest.norm();
    assert!(rel(phi, gamma * phi_rest) < 1e-14);
    assert!((a - v * gamma * phi_rest).norm() < 1e-14);
    assert!(comoving_fields(&Vec3::new(1.0, 0.0, 0.0), &mu, &xo, &x).is_err());
    // field strengths at v = 0 are Coulomb plus dipole
    let (e, b) = comoving_field_strengths(-1.0, &Vec3::zeros(), &mu, &xo, &x).unwrap();
    let r = y.norm();
    let n = y / r;
    assert!((e + n / (r * r)).norm() < 1e-10);
    let dip = (3.0 * n * n.dot(&mu) - mu) / r.powi(3);
    assert!((b - dip).norm() < 1e-10);
}

#[test]
fn gl_rule_sanity() {
    let gl = GlRule::new(5);
    assert!((gl.integrate(0.0, 2.0, |x| x.powi(9)) - 102.4).abs() < 1e-12);
}
