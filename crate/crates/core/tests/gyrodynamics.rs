use ledlab::bare_particle::DensityProfile;
use ledlab::gyrodynamics::*;
use ledlab::{LedError, Vec3};
use proptest::prelude::*;

fn config(fe: DensityProfile, r_max: f64) -> GyroConfig {
    let mut cfg = GyroConfig::new(fe, DensityProfile::shell(1.0, 1.0).unwrap(), 1.0);
    cfg.r_max = r_max;
    cfg
}

fn volume_solver(r_max: f64) -> GyroSolver {
    GyroSolver::new(config(DensityProfile::volume(1.0, 1.0).unwrap(), r_max)).unwrap()
}

fn omega0() -> Vec3 {
    Vec3::new(0.0, 0.0, 0.5)
}

fn max_rel_omega_drift(tr: &Trajectory, om: &Vec3) -> f64 {
    tr.samples.iter().map(|s| (s.omega - om).norm()).fold(0.0, f64::max) / om.norm()
}

#[test]
fn exact_stationary_data_is_a_fixed_point() {
    for fe in [DensityProfile::volume(1.0, 1.0).unwrap(), DensityProfile::shell(1.0, 1.0).unwrap()] {
        let sol = GyroSolver::new(config(fe, 10.0)).unwrap();
        let st = sol.stationary(&omega0()).unwrap();
        let horizon = 10.0 * sol.crossing_time();
        let tr = sol.run(&st, horizon, 10).unwrap();
        assert!(max_rel_omega_drift(&tr, &omega0()) < 1e-6 * 10.0);
        let scale = st.field.w.iter().map(|w| w.norm()).fold(0.0, f64::max);
        let dw = tr.final_state.field.w.iter().zip(&st.field.w).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(dw < 1e-6 * scale);
    }
}

#[test]
fn sampled_continuum_state_drift_is_second_order() {
    let cfg = config(DensityProfile::volume(1.0, 1.0).unwrap(), 10.0);
    let drift = |k: usize| {
        let sol = GyroSolver::new(cfg.refined(k)).unwrap();
        let st = sol.stationary_sampled(&omega0()).unwrap();
        let tr = sol.run(&st, sol.crossing_time(), 1).unwrap();
        max_rel_omega_drift(&tr, &omega0())
    };
    let (d1, d2) = (drift(1), drift(2));
    assert!(d1 > 0.0);
    assert!(d1 / d2 >= 3.0, "drift {d1} -> {d2}");
}

#[test]
fn zero_field_rings_up_and_radiates() {
    let sol = volume_solver(20.0);
    let sb = sol.stationary(&omega0()).unwrap().sb;
    let init = sol.zero_field(&sb).unwrap();
    let tr = sol.run(&init, 1.0, 1).unwrap();
    let early: Vec<f64> = tr.samples.iter().map(|s| s.omega.z).collect();
    assert!(early.windows(2).all(|p| p[1] <= p[0]));
    assert!(early.last().unwrap() < &0.5);
    assert!(tr.samples.iter().any(|s| s.se.z > 0.0));
    let long = sol.run(&init, 20.0, 5).unwrap();
    assert!(long.samples.last().unwrap().radiated > 0.0);
}

#[test]
fn coulomb_only_start_has_no_initial_torque() {
    let sol = volume_solver(10.0);
    let sb = Vec3::new(0.0, 0.0, 0.3);
    let init = sol.zero_field(&sb).unwrap();
    let s1 = sol.step(&init, sol.dt()).unwrap();
    // The first kick sees only the field the step itself builds: O(dt²).
    let dt = sol.dt();
    assert!((s1.sb - sb).norm() < 10.0 * dt * dt * sb.norm());
    let s_small = sol.step(&init, 0.1 * dt).unwrap();
    let ratio = (s1.sb - sb).norm() / (s_small.sb - sb).norm();
    assert!(ratio > 50.0, "torque does not vanish at t = 0: ratio {ratio}");
}

#[test]
fn perturbed_bound_states_relax_exponentially() {
    let sol = volume_solver(20.0);
    let st = sol.stationary(&omega0()).unwrap();
    let inits = [
        sol.scaled_stationary(&omega0(), 0.5, &st.sb).unwrap(),
        sol.zero_field(&st.sb).unwrap(),
        sol.with_pulse(&st, &Vec3::new(0.0, 0.0, 0.05), 3.0, 0.5),
    ];
    for init in &inits {
        let (_, fit) = sol.run_to_stationary(init, 40.0).unwrap();
        assert!(fit.predicted);
        assert!(fit.converged);
        assert!(fit.rate > 0.0);
        assert!(fit.n_points >= 5);
        assert!(fit.residual < 0.05, "{fit:?}");
    }
}

#[test]
fn total_spin_is_conserved() {
    let sol = volume_solver(20.0);
    let st = sol.stationary(&omega0()).unwrap();
    let init = sol.with_pulse(&sol.zero_field(&st.sb).unwrap(), &Vec3::new(0.0, 0.0, 0.02), 2.0, 0.4);
    let tr = sol.run(&init, 30.0, 50).unwrap();
    let s0 = sol.total_spin(&init);
    for s in &tr.samples {
        assert!(((s.sb + s.se).norm() - s0.norm()).abs() < 1e-4 * s0.norm());
    }
}

#[test]
fn final_rotation_depends_only_on_total_spin() {
    let sol = volume_solver(20.0);
    let st = sol.stationary(&omega0()).unwrap();
    let target = sol.total_spin(&st);
    // Three different fields, bare spin adjusted so the total matches.
    let fields = [
        sol.scaled_stationary(&omega0(), 0.5, &Vec3::zeros()).unwrap(),
        sol.zero_field(&Vec3::zeros()).unwrap(),
        sol.with_pulse(
            &sol.scaled_stationary(&omega0(), 1.5, &Vec3::zeros()).unwrap(),
            &Vec3::new(0.0, 0.0, 0.03),
            3.0,
            0.5,
        ),
    ];
    let mut finals = Vec::new();
    for f in fields {
        let sb = target - sol.total_spin(&f);
        let init = sol.scaled_stationary(&Vec3::zeros(), 0.0, &sb).unwrap();
        let init = GyroEvolutionState { field: f.field.clone(), ..init };
        assert!((sol.total_spin(&init) - target).norm() < 1e-12 * target.norm());
        let tr = sol.run(&init, 40.0, 100).unwrap();
        finals.push(tr.final_state.omega.norm());
    }
    for w in &finals {
        assert!((w - 0.5).abs() < 1e-3 * 0.5, "{finals:?}");
    }
}

#[test]
fn picard_iterates_converge_to_the_step_solution() {
    let sol = volume_solver(10.0);
    let st = sol.stationary(&omega0()).unwrap();
    let init = sol.scaled_stationary(&omega0(), 0.5, &st.sb).unwrap();
    let horizon = 2.0 * sol.crossing_time();
    let rep = sol.picard_iterate(&init, 40, horizon).unwrap();
    assert!(rep.diverged_at.is_none());
    assert!(rep.omega[0].iter().all(|w| *w == init.omega));
    // Geometric shrinking once past the first few iterates.
    let g = &rep.gap_omega;
    assert!(g.len() >= 6);
    for k in 2..6 {
        assert!(g[k] < 0.8 * g[k - 1], "{g:?}");
    }
    // Step with the same time grid.
    let dt = rep.times[1] - rep.times[0];
    let mut s = init.clone();
    let mut sup: f64 = 0.0;
    for (n, om) in rep.omega.last().unwrap().iter().enumerate() {
        if n > 0 {
            s = sol.step(&s, dt).unwrap();
        }
        sup = sup.max((s.omega - om).norm());
    }
    assert!(sup <= 1e-5, "sup {sup}");
}

#[test]
fn energy_audit_balances() {
    let sol = volume_solver(20.0);
    let st = sol.stationary(&omega0()).unwrap();
    let tr = sol.run(&st, 5.0, 10).unwrap();
    let a = energy_audit(&tr, tr.audit_radius).unwrap();
    assert!(a.radiated.abs() < 1e-12);
    assert!(a.residual.iter().all(|r| r.abs() < 1e-9));

    let init = sol.zero_field(&st.sb).unwrap();
    let tr = sol.run(&init, 20.0, 5).unwrap();
    let a = energy_audit(&tr, tr.audit_radius).unwrap();
    assert!(a.radiated > 0.0);
    assert!(a.max_abs_residual < 0.01, "{}", a.max_abs_residual);
    assert!(matches!(energy_audit(&tr, 2.0 * tr.audit_radius), Err(LedError::Input(_))));
}

#[test]
fn energy_audit_residual_shrinks_under_refinement() {
    let cfg = config(DensityProfile::volume(1.0, 1.0).unwrap(), 10.0);
    let res = |k: usize| {
        let sol = GyroSolver::new(cfg.refined(k)).unwrap();
        let sb = sol.stationary(&omega0()).unwrap().sb;
        let tr = sol.run(&sol.zero_field(&sb).unwrap(), 8.0, 2).unwrap();
        energy_audit(&tr, tr.audit_radius).unwrap().max_abs_residual
    };
    assert!(res(2) < res(1));
}

#[test]
fn uncharged_particle_is_decoupled() {
    let sol = GyroSolver::new(config(DensityProfile::volume(0.0, 1.0).unwrap(), 10.0)).unwrap();
    let init = sol.zero_field(&Vec3::new(0.1, 0.0, 0.3)).unwrap();
    let tr = sol.run(&init, 5.0, 5).unwrap();
    for s in &tr.samples {
        assert!((s.omega - init.omega).norm() <= 1e-14 * init.omega.norm());
        assert_eq!(s.flux, 0.0);
    }
}

#[test]
fn unstable_step_is_rejected() {
    let sol = volume_solver(10.0);
    let init = sol.zero_field(&Vec3::new(0.0, 0.0, 0.3)).unwrap();
    assert!(matches!(sol.step(&init, 1.01 * sol.dt_max()), Err(LedError::Constraint(_))));
    assert!(sol.dt() < sol.dt_max());
}

#[test]
fn csv_rows_carry_the_documented_columns() {
    let sol = volume_solver(10.0);
    let tr = sol.run(&sol.stationary(&omega0()).unwrap(), 0.5, 10).unwrap();
    let row = CsvRow::from(&tr.samples[1]);
    assert_eq!(row.omega_z, tr.samples[1].omega.z);
    assert_eq!(row.w_b, tr.samples[1].w_b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn bound_states_stay_put_for_any_axis(x in -1.0..1.0f64, y in -1.0..1.0f64, z in 0.2..1.0f64, m in 0.05..0.8f64) {
        let sol = volume_solver(6.0);
        let om = Vec3::new(x, y, z).normalize() * m;
        let st = sol.stationary(&om).unwrap();
        let tr = sol.run(&st, 2.0, 20).unwrap();
        prop_assert!(max_rel_omega_drift(&tr, &om) < 1e-9);
    }

    #[test]
    fn spin_is_conserved_for_any_pulse(a in -0.05..0.05f64, r0 in 1.5..4.0f64) {
        let sol = volume_solver(10.0);
        let st = sol.stationary(&omega0()).unwrap();
        let init = sol.with_pulse(&st, &Vec3::new(0.0, 0.0, a), r0, 0.5);
        let tr = sol.run(&init, 6.0, 20).unwrap();
        let s0 = sol.total_spin(&init);
        let s1 = sol.total_spin(&tr.final_state);
        prop_assert!((s1 - s0).norm() < 1e-12 * s0.norm());
    }
}
