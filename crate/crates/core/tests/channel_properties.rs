use zpcqkd_core::channel::{
    derive_channel, excess_noise_at_gain, link_transmittance, minimized_excess_noise, optimal_gain_sq,
};
use zpcqkd_core::ProtocolParams;

fn grid() -> impl Iterator<Item = (f64, f64, f64, f64)> {
    let v_bs = [1.5, 5.0, 40.0, 200.0];
    let t_bs = [0.05, 0.3, 0.7, 1.0];
    let eps_bs = [0.0, 0.002, 0.05, 0.5];
    let t_as = [1e-4, 0.01, 0.2, 0.9, 1.0];
    v_bs.into_iter().flat_map(move |v| {
        t_bs.into_iter().flat_map(move |tb| {
            eps_bs
                .into_iter()
                .flat_map(move |e| t_as.into_iter().map(move |ta| (v, tb, e, ta)))
        })
    })
}

#[test]
fn optimal_gain_cancels_mismatch_and_reproduces_closed_form() {
    for (v_b, t_b, eps_b, t_a) in grid() {
        let eps_a = 0.003;
        let g_sq = optimal_gain_sq(v_b, t_b);
        let general = excess_noise_at_gain(t_a, t_b, v_b, eps_a, eps_b, g_sq);
        let closed = minimized_excess_noise(t_a, t_b, eps_a, eps_b);
        assert!((general - closed).abs() <= 1e-10 * closed.abs().max(1.0), "{v_b} {t_b} {eps_b} {t_a}");
    }
}

#[test]
fn optimal_gain_is_a_minimum() {
    for (v_b, t_b, eps_b, t_a) in grid() {
        let g_sq = optimal_gain_sq(v_b, t_b);
        let at_opt = excess_noise_at_gain(t_a, t_b, v_b, 0.002, eps_b, g_sq);
        for f in [0.99, 1.01] {
            assert!(excess_noise_at_gain(t_a, t_b, v_b, 0.002, eps_b, g_sq * f) >= at_opt);
        }
    }
}

#[test]
fn derived_channel_uses_optimal_gain() {
    let p = ProtocolParams {
        l_ac: 12.0,
        l_bc: 3.0,
        eps_a: 0.01,
        eps_b: 0.02,
        v_b: 12.0,
        ..Default::default()
    };
    let ch = derive_channel(&p).unwrap();
    let t_b = link_transmittance(3.0, 0.2).unwrap();
    assert_eq!(ch.g_sq, optimal_gain_sq(12.0, t_b));
    let general = excess_noise_at_gain(ch.t_a, ch.t_b, 12.0, 0.01, 0.02, ch.g_sq);
    assert!((general - ch.eps_th).abs() < 1e-10);
    assert!(ch.chi_tot >= ch.chi_line && ch.t_c > 0.0);
}
