use ledlab::renormflow::*;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

const A0: PhysicalConstants = PhysicalConstants { alpha: ALPHA, anomaly: 0.0 };

#[test]
fn constants() {
    let k = PhysicalConstants::default();
    assert!(rel(k.mu_e(), 1.001159652 * 0.5 * ALPHA.sqrt()) < 1e-15);
    assert_eq!(k.classical_radius(), ALPHA * k.compton_length());
    assert!(rel(k.r_lim(), 1.501739478) < 1e-15);
    assert_eq!(A0.r_lim(), 1.5);
}

#[test]
fn omega_of_r_examples() {
    let k = PhysicalConstants::default();
    let rl = k.r_lim();
    assert!(rel(omega_of_r(rl, &k).unwrap() * rl, 1.0) < 1e-15);
    assert!(rel(omega_of_r(2.0 * rl, &k).unwrap() * 2.0 * rl, 0.5) < 1e-15);
    assert!(omega_of_r(1e12, &k).unwrap() < 1e-11);
    assert!(omega_of_r(0.0, &k).is_err());
}

#[test]
fn mb_of_r_examples() {
    // oracle: 30-digit evaluation of the closed form
    assert!(rel(mb_of_r(2.0, &A0).unwrap(), 0.769265441229198862959) < 1e-14);
    let k = PhysicalConstants::default();
    assert!(rel(mb_of_r(2.0, &k).unwrap(), 0.768584368330541558894) < 1e-14);
    // m_b → 0 at the left end, logarithmically slowly in R − R_lim
    let near: Vec<f64> = [1e-3, 1e-6, 1e-12].iter().map(|e| mb_of_r(k.r_lim() * (1.0 + e), &k).unwrap()).collect();
    assert!(near[0] > near[1] && near[1] > near[2] && near[2] < 0.08);
    assert!(mb_of_t(1e7, &k).unwrap() < 1e-6);
    assert!(rel(mb_of_r(1e8, &k).unwrap(), 1.0) < 1e-8);
    assert!(mb_of_r(k.r_lim(), &k).is_err());
    assert!(mb_of_r(1.0, &k).is_err());
}

#[test]
fn r_of_mb_examples() {
    let k = PhysicalConstants::default();
    let r = r_of_mb(0.768584368330541558894, &k).unwrap();
    assert!(rel(r, 2.0) < 1e-12);
    let r = r_of_mb(1e-6, &k).unwrap();
    assert!(rel(r, 1.501739478) < 1e-15);
    assert!(r_of_mb(1.0, &k).is_err());
    assert!(r_of_mb(0.0, &k).is_err());
}

#[test]
fn round_trip_on_log_grid() {
    let k = PhysicalConstants::default();
    for mb in log_grid(1e-6, 0.99, 60).unwrap() {
        let t = t_of_mb(mb, &k).unwrap();
        assert!(rel(mb_of_t(t, &k).unwrap(), mb) < 1e-12, "t round trip at {mb}");
        // R-space round trip where R − R_lim is resolvable in double precision
        if excess_of_t(t) > 1e-4 {
            let r = r_of_mb(mb, &k).unwrap();
            assert!(rel(mb_of_r(r, &k).unwrap(), mb) < 1e-10, "R round trip at {mb}");
        }
    }
}

#[test]
fn endpoint_observables() {
    let p = observables_at_t(f64::INFINITY, &A0).unwrap();
    assert!(rel(p.s_b, 1.49554050679302437964) < 1e-14);
    assert!(rel(p.s_f, 0.00162163389344568013) < 1e-14);
    assert!(rel(p.s, 1.49716214068647005977) < 1e-14);
    assert!(rel(p.w_b, 0.99702700452868291976) < 1e-14);
    let near = observables(1.5 * (1.0 + 1e-6), &A0).unwrap();
    assert!(near.omega_r_over_c < 1.0);
    assert!((near.w_b + near.w_f - 1.0).abs() < 1e-15);
    assert!(observables(1.5, &A0).is_err());
}

#[test]
fn limit_report() {
    let rep = limit_constants(&A0);
    assert!(rel(rep.m_ph, 1.0 - 11.0 * ALPHA / 27.0) < 1e-14);
    assert!(rel(rep.m_ph, 0.9970270) < 1e-7);
    assert!(rel(rep.g, 0.667930328201784362297) < 1e-13);
    assert!(rel(rep.g, 2.0 / 3.0 / (1.0 - 7.0 * ALPHA / 27.0)) < 1e-12);
    // oracle: g = 2 m_e c μ_B/(e s_ren) computed directly
    let s_ren = 1.5 * (1.0 - 7.0 * ALPHA / 27.0);
    assert!(rel(rep.g, 2.0 * 0.5 * ALPHA.sqrt() / (ALPHA.sqrt() * s_ren)) < 1e-13);
    assert!(rel(rep.g_series_order2, rep.g) < 1e-6);
    // s_b + s_f = s_ren: 33/54 − 12/54 = 21/54
    assert!(rel(rep.s_b_lim + rep.s_f_lim, rep.s_ren) < 1e-15);
    assert_eq!(33 - 12, 21);
    assert!(rel(rep.s_ren, rep.s_ren_closed_form) < 1e-14);
    assert!(rel(rep.kappa * (1.0 - 11.0 * ALPHA / 27.0), 1.0) < 1e-15);
    assert_eq!(rep.r_lim, 1.5);
}

#[test]
fn sweep_properties() {
    let k = PhysicalConstants::default();
    let grid = log_grid(1e-6, 0.99, 40).unwrap();
    let table = flow_sweep(&grid, &k).unwrap();
    assert_eq!(table.len(), 40);
    for w in table.windows(2) {
        assert!(w[1].r >= w[0].r);
    }
    for p in &table {
        assert!(p.omega_r_over_c <= 1.0 && p.ln_luminal_gap < 0.0 && p.ln_luminal_gap.is_finite());
        assert!((p.w_b + p.w_f - 1.0).abs() < 1e-12);
    }
    assert!(rel(table[0].r, k.r_lim()) < 1e-15);
    assert!(flow_sweep(&[1.0], &k).is_err());
}

#[test]
fn monotone_on_log_grid() {
    let k = PhysicalConstants::default();
    let mut prev = 0.0;
    for r in log_grid(k.r_lim() * (1.0 + 1e-9), 1e3, 200).unwrap() {
        let mb = mb_of_r(r, &k).unwrap();
        assert!(mb > prev);
        prev = mb;
    }
}

#[test]
fn smooth_along_sweep() {
    let grid = log_grid(1e-3, 0.99, 400).unwrap();
    let table = flow_sweep(&grid, &A0).unwrap();
    let jumps: Vec<f64> = table.windows(2).map(|w| (w[1].s - w[0].s).abs()).collect();
    let max = jumps.iter().cloned().fold(0.0, f64::max);
    assert!(max < 0.05, "largest step in s along the sweep: {max}");
}

proptest! {
    #[test]
    fn mb_increasing(a in 1.0001f64..100.0, f in 1.0001f64..2.0) {
        let k = PhysicalConstants::default();
        let r = a * k.r_lim();
        prop_assert!(mb_of_r(r * f, &k).unwrap() > mb_of_r(r, &k).unwrap());
    }

    #[test]
    fn g_identity_along_flow(t in 0.05f64..40.0) {
        let p = observables_at_t(t, &A0).unwrap();
        prop_assert!((p.g * p.s - 2.0 * A0.mu_e() / A0.e()).abs() < 1e-14);
    }
}
