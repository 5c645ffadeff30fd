use super::*;
use crate::field::sup_norm;
use crate::spectrum::fourier_coeffs;

fn grid(m: usize) -> PeriodicGrid<f64> {
    PeriodicGrid::two_pi(m).unwrap()
}

fn still(g: PeriodicGrid<f64>, z: impl Fn(f64) -> f64, eps: f64) -> DirectState<f64> {
    DirectState::new(Field::sample(g, z), Field::zeros(g), 0.0, eps).unwrap()
}

fn sup(f: &Field<f64>) -> f64 {
    f.max_abs()
}

#[test]
fn model_names_round_trip() {
    for k in ModelKind::ALL {
        assert_eq!(k.name().parse::<ModelKind>().unwrap(), k);
        assert_eq!(k.to_string(), k.name());
    }
    assert!("kdv".parse::<ModelKind>().is_err());
}

#[test]
fn unstable_mode_grows_at_predicted_rate_then_blows_up() {
    let g = grid(64);
    let s = still(g, |x| (6.0 * x).cos(), 0.1);
    let h = Field::zeros(g);
    let times: Vec<f64> = (0..=20).map(|i| 1.0 + 0.1 * i as f64).collect();
    let run = solve_direct(ModelKind::LinearDispersion, &s, &h, 3.0, &DirectParams::new(1e-3), &times).unwrap();
    let pts: Vec<(f64, f64)> = times.iter().map(|&t| (t, sup(&run.snapshot_near(t).z).ln())).collect();
    let n = pts.len() as f64;
    let (mt, ml) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let slope = pts.iter().map(|p| (p.0 - mt) * (p.1 - ml)).sum::<f64>() / pts.iter().map(|p| (p.0 - mt).powi(2)).sum::<f64>();
    let rate = dispersion_relation(6, 0.1, false).unwrap().growth_rate;
    assert!((slope / rate - 1.0).abs() < 0.05, "slope {slope} vs {rate}");

    let err = solve_direct(ModelKind::LinearDispersion, &s, &h, 11.0, &DirectParams::new(1e-3), &[]).unwrap_err();
    match err {
        Error::BlowUp { mode, sup_norm, .. } => {
            assert_eq!(mode, 6);
            assert!(sup_norm > BLOWUP_LIMIT);
        }
        e => panic!("expected blow-up, got {e}"),
    }
}

#[test]
fn stable_mode_of_ill_posed_model_stays_bounded() {
    let g = grid(64);
    let s = still(g, |x| (5.0 * x).cos(), 0.1);
    let times: Vec<f64> = (0..=100).map(|i| 0.1 * i as f64).collect();
    let run = solve_direct(ModelKind::LinearDispersion, &s, &Field::zeros(g), 10.0, &DirectParams::new(1e-3), &times).unwrap();
    for snap in &run.snapshots {
        assert!(sup(&snap.z) <= 2.0, "t={} |Z|={}", snap.t, sup(&snap.z));
    }
}

#[test]
fn single_mode_matches_oscillator_solution() {
    let g = grid(32);
    let eps = 0.1f64;
    for kind in [ModelKind::LinearDispersion, ModelKind::LinearRegularized] {
        let k = 3.0f64;
        let w = (k * k * kind.linear_factor(k, eps)).sqrt();
        let s = still(g, |x| (k * x).cos(), eps);
        let times: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let run = solve_direct(kind, &s, &Field::zeros(g), 10.0, &DirectParams::new(1e-2), &times).unwrap();
        for snap in &run.snapshots {
            let t = snap.t;
            let z = Field::sample(g, |x| (w * t).cos() * (k * x).cos());
            let u = Field::sample(g, |x| k / w * (w * t).sin() * (k * x).sin());
            assert!(sup_norm(&snap.z, &z).unwrap() < 1e-6, "{kind} t={t}");
            assert!(sup_norm(&snap.u, &u).unwrap() < 1e-6 * (k / w), "{kind} t={t}");
        }
    }
}

#[test]
fn regularised_model_bounded_for_high_modes() {
    let g = grid(256);
    let eps = 0.1;
    for k in [7.0, 20.0, 64.0] {
        let s = still(g, |x| (k * x).cos(), eps);
        let times: Vec<f64> = (0..=20).map(|i| 0.5 * i as f64).collect();
        let run = solve_direct(ModelKind::LinearRegularized, &s, &Field::zeros(g), 1.0 / eps, &DirectParams::new(1e-3), &times).unwrap();
        for snap in &run.snapshots {
            assert!(sup(&snap.z) <= 2.0, "k={k} t={}", snap.t);
        }
    }
}

#[test]
fn weak_nonlinearity_tends_to_dalembert() {
    let g = grid(64);
    let z0 = |x: f64| x.cos() + (2.0 * x).sin();
    let s = still(g, z0, 1e-6);
    let h = Field::sample(g, |x| 5.0 * (2.0 * x).sin());
    let run = solve_direct(ModelKind::NonlinearNondispersive, &s, &h, 10.0, &DirectParams::new(1e-2), &[]).unwrap();
    let end = run.final_state();
    let t = end.t;
    let z = Field::sample(g, |x| 0.5 * (z0(x - t) + z0(x + t)));
    let u = Field::sample(g, |x| 0.5 * (z0(x - t) - z0(x + t)));
    assert!(sup_norm(&end.z, &z).unwrap() < 1e-4);
    assert!(sup_norm(&end.u, &u).unwrap() < 1e-4);
}

#[test]
fn linear_energy_is_invariant() {
    // |Ẑ_k|² + A(k)|Û_k|² is conserved mode by mode when H = 1
    let g = grid(64);
    let eps = 0.05;
    let kind = ModelKind::LinearRegularized;
    let s = DirectState::new(
        Field::sample(g, |x| x.cos() + 0.5 * (4.0 * x).sin() + 0.2 * (9.0 * x).cos()),
        Field::sample(g, |x| 0.3 * (2.0 * x).cos()),
        0.0,
        eps,
    )
    .unwrap();
    let energy = |st: &DirectState<f64>| {
        let (zs, us) = (fourier_coeffs(&st.z), fourier_coeffs(&st.u));
        (-21..=21)
            .map(|n| {
                let nu = n as f64;
                zs.amplitude_at(nu).norm_sqr() + kind.linear_factor(nu, eps) * us.amplitude_at(nu).norm_sqr()
            })
            .sum::<f64>()
    };
    let run = solve_direct(kind, &s, &Field::zeros(g), 10.0, &DirectParams::new(1e-3), &[2.5, 5.0, 7.5]).unwrap();
    assert_eq!(run.snapshots.len(), 5);
    let e0 = energy(&run.snapshots[0]);
    for snap in &run.snapshots {
        assert!((energy(snap) / e0 - 1.0).abs() < 1e-10, "t={}", snap.t);
    }
}

#[test]
fn means_are_conserved() {
    let g = grid(64);
    let h = Field::sample(g, |x| 5.0 * (2.0 * x).sin());
    let s = DirectState::new(
        Field::sample(g, |x| 0.2 + x.cos() + (2.0 * x).sin()),
        Field::sample(g, |x| -0.1 + 0.5 * x.sin()),
        0.0,
        0.05,
    )
    .unwrap();
    let times: Vec<f64> = (1..=40).map(|i| 0.05 * i as f64).collect();
    for kind in ModelKind::ALL {
        // ill-posed kinds blow up once the bottom feeds k ≥ 8; stop before
        let t_end = if kind.is_well_posed() { 2.0 } else { 0.5 };
        let times: Vec<f64> = times.iter().copied().filter(|&t| t <= t_end).collect();
        let run = solve_direct(kind, &s, &h, t_end, &DirectParams::new(1e-3), &times).unwrap();
        let (mz, mu) = (s.z.mean(), s.u.mean());
        let dz = run.snapshots.iter().map(|st| (st.z.mean() - mz).abs()).fold(0.0, f64::max);
        let du = run.snapshots.iter().map(|st| (st.u.mean() - mu).abs()).fold(0.0, f64::max);
        assert!(du < 1e-10, "{kind}: mean U drift {du}");
        if kind != ModelKind::FullSwRegularized {
            assert!(dz < 1e-10, "{kind}: mean Z drift {dz}");
        }
    }
}

#[test]
fn full_model_mean_drift_is_second_order() {
    // ε·H·H_x·(HU)_xx is not an x-derivative, so mean Z moves at O(ε²)
    let g = grid(64);
    let h = Field::sample(g, |x| 5.0 * (2.0 * x).sin());
    let drift = |eps: f64| {
        let s = DirectState::new(Field::sample(g, |x| x.cos() + (2.0 * x).sin()), Field::sample(g, |x| 0.5 * x.sin()), 0.0, eps).unwrap();
        let run = solve_direct(ModelKind::FullSwRegularized, &s, &h, 0.5, &DirectParams::new(1e-3), &[]).unwrap();
        (run.final_state().z.mean() - s.z.mean()).abs()
    };
    let ratio = drift(0.02) / drift(0.01);
    assert!(drift(0.01) > 1e-8 && (3.5..4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn full_model_reduces_to_simplified_at_order_eps_squared() {
    let g = grid(64);
    let h = Field::sample(g, |x| 5.0 * (2.0 * x).sin());
    let z = Field::sample(g, |x| x.cos() + (2.0 * x).sin());
    let u = Field::sample(g, |x| 0.5 * x.sin() - 0.3 * (3.0 * x).cos());
    let gap = |eps: f64, h: &Field<f64>| {
        let full = DirectSolver::new(ModelKind::FullSwRegularized, h, eps, 1e-3).unwrap();
        let simple = DirectSolver::new(ModelKind::SimplifiedSw, h, eps, 1e-3).unwrap();
        let (fz, fu) = full.rhs(&z, &u).unwrap();
        let (sz, su) = simple.rhs(&z, &u).unwrap();
        assert!(sup_norm(&fu, &su).unwrap() < 1e-12);
        sup_norm(&fz, &sz).unwrap()
    };
    let ratio = gap(0.02, &h) / gap(0.01, &h);
    assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");

    // flat bottom: only the regularisation differs
    let flat = Field::zeros(g);
    let eps = 0.05;
    let u5 = Field::sample(g, |x| 0.5 * x.cos() + 0.3 * 243.0 * (3.0 * x).sin());
    assert!((gap(eps, &flat) - eps * eps / 20.0 * u5.max_abs()).abs() < 1e-12);
}

#[test]
fn simplified_rhs_matches_hand_derivatives() {
    let g = grid(32);
    let eps = 0.1;
    let h = Field::sample(g, f64::cos);
    let z = Field::sample(g, f64::sin);
    let u = Field::sample(g, |x| (2.0 * x).cos());
    let solver = DirectSolver::new(ModelKind::SimplifiedSw, &h, eps, 1e-3).unwrap();
    let (rz, ru) = solver.rhs(&z, &u).unwrap();
    // Z_t = -U_x - ε(U_xxx/3 + (hU)_x + (ZU)_x); U_t = -Z_x - εUU_x
    let ez = Field::sample(g, |x| {
        let ux = -2.0 * (2.0 * x).sin();
        let uxxx = 8.0 * (2.0 * x).sin();
        let hu_x = -x.sin() * (2.0 * x).cos() + x.cos() * ux;
        let zu_x = x.cos() * (2.0 * x).cos() + x.sin() * ux;
        -ux - eps * (uxxx / 3.0 + hu_x + zu_x)
    });
    let eu = Field::sample(g, |x| -x.cos() - eps * (2.0 * x).cos() * (-2.0 * (2.0 * x).sin()));
    assert!(sup_norm(&rz, &ez).unwrap() < 1e-12);
    assert!(sup_norm(&ru, &eu).unwrap() < 1e-12);
}

#[test]
fn step_is_fourth_order() {
    let g = grid(32);
    let h = Field::sample(g, |x| 5.0 * (2.0 * x).sin());
    let s = still(g, |x| x.cos() + (2.0 * x).sin(), 0.1);
    let end = |dt: f64| solve_direct(ModelKind::FullSwRegularized, &s, &h, 1.0, &DirectParams::new(dt), &[]).unwrap().final_state().z.clone();
    let (a, b, c) = (end(0.04), end(0.02), end(0.01));
    let order = (sup_norm(&a, &b).unwrap() / sup_norm(&b, &c).unwrap()).log2();
    assert!(order > 3.7 && order < 4.3, "order {order}");
}

#[test]
fn snapshots_and_preconditions() {
    let g = grid(16);
    let s = still(g, f64::cos, 0.1);
    let h = Field::zeros(g);
    let p = DirectParams::new(0.03);
    let run = solve_direct(ModelKind::LinearRegularized, &s, &h, 1.0, &p, &[0.5, 0.5]).unwrap();
    let ts: Vec<f64> = run.snapshots.iter().map(|x| x.t).collect();
    assert_eq!(ts.len(), 3);
    assert!((ts[1] - 0.5).abs() <= run.dt / 2.0);
    assert_eq!(ts[2], 1.0);
    assert!(run.dt <= 0.03 && !run.retried);

    assert!(matches!(solve_direct(ModelKind::LinearRegularized, &s, &h, 12.5, &p, &[]), Err(Error::Precondition(_))));
    assert!(matches!(solve_direct(ModelKind::LinearRegularized, &s, &h, 1.0, &p, &[2.0]), Err(Error::OutOfRange(_))));
    assert!(matches!(solve_direct(ModelKind::LinearRegularized, &s, &Field::zeros(grid(32)), 1.0, &p, &[]), Err(Error::GridMismatch)));
    let flat = still(g, f64::cos, 0.0);
    assert!(solve_direct(ModelKind::LinearRegularized, &flat, &h, 1.0, &p, &[]).is_err());
    let zero = solve_direct(ModelKind::LinearRegularized, &s, &h, 0.0, &p, &[]).unwrap();
    assert_eq!(zero.snapshots.len(), 1);
    assert_eq!(zero.final_state().z, s.z);
}

#[test]
fn runs_are_deterministic() {
    let g = grid(32);
    let h = Field::sample(g, |x| 5.0 * (2.0 * x).sin());
    let s = still(g, |x| x.cos() + (2.0 * x).sin(), 0.1);
    let p = DirectParams::new(1e-2);
    let a = solve_direct(ModelKind::FullSwRegularized, &s, &h, 2.0, &p, &[1.0]).unwrap();
    let b = solve_direct(ModelKind::FullSwRegularized, &s, &h, 2.0, &p, &[1.0]).unwrap();
    assert_eq!(a.snapshots, b.snapshots);
}

#[test]
fn works_in_single_precision() {
    let g = PeriodicGrid::<f32>::two_pi(32).unwrap();
    let s = DirectState::new(Field::sample(g, |x| x.cos()), Field::zeros(g), 0.0, 0.1f32).unwrap();
    let run = solve_direct(ModelKind::LinearRegularized, &s, &Field::zeros(g), 1.0, &DirectParams::new(1e-2), &[]).unwrap();
    let w = (1.0f32 - 0.1 / 3.0 + 0.01 / 20.0).sqrt();
    let z = Field::sample(g, |x| w.cos() * x.cos());
    assert!(sup_norm(&run.final_state().z, &z).unwrap() < 1e-4);
}
