use hyperavg_cli::harness::{check_monotone, Harness};
use hyperavg_cli::{RunConfig, TEnd};
use hyperavg_core::direct::ModelKind;

fn cfg(text: &str) -> RunConfig {
    text.parse().unwrap()
}

#[test]
fn resonance_verdicts() {
    let h = Harness::new();
    assert!(h.resonance(&cfg("")).resonant);
    assert!(!h.resonance(&cfg("[initial]\nZ0 = cos:1\nh = sin:3")).resonant);
    assert!(!h.resonance(&cfg("[initial]\nZ0 = cos:1, sin:2\nh = 0.7")).resonant);
    // a resonance carried only by the velocity profile is still found
    assert!(h.resonance(&cfg("[initial]\nZ0 = cos:3\nU0 = sin:1\nh = sin:2")).resonant);
}

#[test]
fn dispersion_rows() {
    let h = Harness::new();
    let rows = h.dispersion(&cfg("epsilon = 0.1\n[dispersion]\nk_max = 10")).unwrap();
    assert_eq!(rows.len(), 10);
    assert!(rows[..5].iter().all(|p| p.stable) && rows[5..].iter().all(|p| !p.stable));
    let reg = h.dispersion(&cfg("epsilon = 0.1\n[dispersion]\nk_max = 100\nregularized = true")).unwrap();
    assert!(reg.iter().all(|p| p.stable));
    assert!(h.dispersion(&cfg("[dispersion]\nk_max = 0")).unwrap().is_empty());
}

#[test]
fn zero_length_comparison_has_zero_error() {
    let h = Harness::new();
    let c = h.compare(&cfg("M = 32\nM_averaged = 64\nt_end = 0\nepsilons = 0.1, 0.05")).unwrap();
    assert_eq!(c.reports.len(), 2);
    for r in &c.reports {
        assert_eq!((r.sup_error_z, r.sup_error_u, r.l2_error_z, r.l2_error_u), (0.0, 0.0, 0.0, 0.0));
    }
}

#[test]
fn sweep_reuses_one_averaged_run() {
    let h = Harness::new();
    let c = cfg("M = 32\nM_averaged = 64\nt_end = 2\nepsilons = 0.1, 0.05, 0.02\ndt_direct = 1e-2\ndt_averaged = 1e-3");
    assert_eq!(c.t_end, TEnd::Fixed(2.0));
    let out = h.compare(&c).unwrap();
    assert_eq!(h.averaged_invocations(), 1);
    assert_eq!(h.direct_invocations(), 3);
    assert_eq!(out.fields.len(), 3);
    assert!(out.reports.iter().all(|r| r.sup_error().is_finite() && r.t == 2.0));
}

#[test]
fn comparison_improves_as_eps_shrinks() {
    let h = Harness::new();
    let c = cfg("model = linear_regularized\nM = 64\nM_averaged = 128\nepsilons = 0.1, 0.02\ndt_direct = 5e-3\ndt_averaged = 2e-3");
    let out = h.compare(&c).unwrap();
    check_monotone(&out.reports).unwrap();
}

#[test]
fn convergence_table() {
    let h = Harness::new();
    let rows = h
        .convergence(&cfg("model = simplified_sw\n[initial]\nZ0 = 0.5*cos:1\n[convergence]\nlevels = 32, 64, 128, 256\ntau_end = 0.2\ndt = 0.05"))
        .unwrap();
    assert_eq!(rows.len(), 4);
    for r in &rows[..2] {
        let p = r.order.unwrap();
        assert!((1.8..2.2).contains(&p), "order {p}");
    }
    assert!(rows[2].order.is_none() && rows[3].diff_to_next.is_none());

    let flat = h.convergence(&cfg("[initial]\nZ0 = 0.3\nh = \n[convergence]\nlevels = 16, 32, 64")).unwrap();
    assert!(flat.iter().all(|r| r.order.is_none()));
    assert!(flat[0].diff_to_next.unwrap() < 1e-13);

    assert!(h.convergence(&cfg("[convergence]\nlevels = 64")).is_err());
    assert!(h.convergence(&cfg("[convergence]\nlevels = 32, 48, 64")).is_err());
}

#[test]
fn blow_up_is_reported_with_context() {
    let h = Harness::new();
    let c = cfg("model = linear_dispersion\nepsilon = 0.1\nM = 64\nt_end = 11\n[initial]\nZ0 = cos:6\nh =");
    assert_eq!(c.model, ModelKind::LinearDispersion);
    let err = h.solve_direct(&c).unwrap_err();
    let msg = format!("{err:#}");
    assert!(msg.contains("linear_dispersion") && msg.contains("mode k = 6"), "{msg}");
}
