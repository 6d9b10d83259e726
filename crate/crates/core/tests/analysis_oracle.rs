use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zpcqkd_core::analysis::linspace;
use zpcqkd_core::{
    grid_sweep, max_distance, max_tolerable_noise, optimize_t, secret_key_rate, Axis, Detector, ProtocolParams,
    SolverConfig, SweepParam, TMode,
};

/// Exhaustive scan: 10⁴ points over [0.01, 1], then another 10⁴ points over
/// the two cells around the best coarse point.
fn brute_force_argmax(p: &ProtocolParams) -> (f64, f64) {
    let k = |t: f64| secret_key_rate(&p.with_t(t)).unwrap().k;
    let scan = |lo: f64, hi: f64| {
        linspace(lo, hi, 10_000)
            .into_iter()
            .map(|t| (t, k(t)))
            .fold((f64::NAN, f64::NEG_INFINITY), |best, c| if c.1 >= best.1 { c } else { best })
    };
    let (t0, _) = scan(0.01, 1.0);
    let h = 0.99 / 9999.0;
    scan((t0 - h).max(0.01), (t0 + h).min(1.0))
}

#[test]
fn optimizer_matches_exhaustive_scan() {
    let cfg = SolverConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..20 {
        let p = ProtocolParams {
            l_ac: rng.gen_range(0.0..100.0),
            eps_a: rng.gen_range(0.0..0.01),
            eps_b: rng.gen_range(0.0..0.01),
            eta: rng.gen_range(0.95..=1.0),
            v_el: rng.gen_range(0.0..0.01),
            v_a: rng.gen_range(5.0..60.0),
            ..Default::default()
        };
        let opt = optimize_t(&p, &cfg).unwrap();
        let (t_bf, k_bf) = brute_force_argmax(&p);
        assert!((opt.t_opt - t_bf).abs() <= cfg.refine_tol, "{p:?}: {} vs {t_bf}", opt.t_opt);
        assert!(opt.breakdown.k >= k_bf - 1e-12);
    }
}

#[test]
fn optimum_at_80_km_is_interior() {
    let p = ProtocolParams::default().with_l_ab(80.0).unwrap();
    let opt = optimize_t(&p, &SolverConfig::default()).unwrap();
    let (t_bf, _) = brute_force_argmax(&p);
    assert!(opt.t_opt < 1.0);
    assert!((opt.t_opt - t_bf).abs() < 1e-5);
    assert!(opt.breakdown.k > secret_key_rate(&p).unwrap().k);
}

#[test]
fn root_residuals_are_small() {
    let cfg = SolverConfig::default();
    for detector in [Detector::Ideal, Detector::Imperfect] {
        let p = ProtocolParams::default().with_detector(detector);
        for mode in [TMode::Optimized, TMode::Fixed] {
            let sol = max_distance(&p, 1e-4, mode, &cfg).unwrap();
            assert!((sol.breakdown.k - 1e-4).abs() <= 1e-7, "{detector:?} {mode:?}");
            assert!(sol.meta.bracket[1] - sol.meta.bracket[0] <= cfg.bisect_tol_distance);
        }
        let q = p.with_l_ab(15.0).unwrap();
        let sol = max_tolerable_noise(&q, TMode::Optimized, &cfg).unwrap();
        assert!(sol.breakdown.k.abs() <= 1e-7);
        assert!(sol.breakdown.k >= 0.0);
        assert!(sol.meta.bracket[1] - sol.meta.bracket[0] <= cfg.bisect_tol_noise);
    }
}

#[test]
fn optimized_envelope_is_non_increasing_in_distance() {
    let cfg = SolverConfig::default();
    for detector in [Detector::Ideal, Detector::Imperfect] {
        let axes = [Axis::linspace(SweepParam::LAB, 0.0, 150.0, 151)];
        let base = ProtocolParams::default().with_detector(detector);
        let rows = grid_sweep(&axes, &base, TMode::Optimized, &cfg, None).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].breakdown.k <= w[0].breakdown.k + 1e-12, "{detector:?} at {}", w[1].inputs.l_ab());
        }
    }
}

#[test]
fn sweep_is_identical_across_worker_counts() {
    let axes = [
        Axis::linspace(SweepParam::Eta, 0.8, 1.0, 6),
        Axis::linspace(SweepParam::VEl, 0.0, 0.1, 5),
    ];
    let cfg = SolverConfig::default();
    let base = ProtocolParams::default();
    let one = grid_sweep(&axes, &base, TMode::Optimized, &cfg, Some(1)).unwrap();
    for w in [4, 8] {
        assert_eq!(grid_sweep(&axes, &base, TMode::Optimized, &cfg, Some(w)).unwrap(), one);
    }
}
