use cqedlab_core::fit::{fit_avoided_crossing, t2_lower_bound_from_fwhm, BranchData};
use cqedlab_core::jc::{
    critical_photon_number, dispersive_shift, fq_from_shift, g_from_shift, hybridized_frequencies, jc_diagonalize,
    rabi_splitting,
};
use cqedlab_core::synth::{flux_map, t1_trace, DriveConfig};
use cqedlab_core::transmon::squid_frequency;
use cqedlab_core::{CavityModel, DeviceModel, FluxBias, Frequency, QubitModel};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn exact_single_excitation_matches_closed_form(
        fq in 3.0e9..15.0e9f64,
        fb in 4.0e9..8.0e9f64,
        g in 1.0e6..300.0e6f64,
    ) {
        let (fq, fb, g) = (Frequency::hz(fq), Frequency::hz(fb), Frequency::hz(g));
        let spec = jc_diagonalize(fq, fb, g, 3).unwrap();
        let pair = hybridized_frequencies(fq, fb, g);
        let m = spec.manifold(1);
        prop_assert!(rel(m[0], pair.f_minus.as_hz()) <= 1e-12);
        prop_assert!(rel(m[1], pair.f_plus.as_hz()) <= 1e-12);
    }

    #[test]
    fn exact_pull_matches_dispersive_shift(
        fb in 4.0e9..8.0e9f64,
        g in 10.0e6..150.0e6f64,
        ratio in 20.0..200.0f64,
        above in any::<bool>(),
    ) {
        let detuning = if above { ratio * g } else { -ratio * g };
        let (fq, fb, g) = (Frequency::hz(fb + detuning), Frequency::hz(fb), Frequency::hz(g));
        let chi = dispersive_shift(g, fq, fb).unwrap().as_hz();
        let pull = jc_diagonalize(fq, fb, g, 4).unwrap().dressed_cavity_pull().as_hz();
        prop_assert!(rel(-pull, chi) <= 0.01);
    }

    #[test]
    fn branches_conserve_trace_and_order(
        fq in 1.0e9..15.0e9f64,
        fb in 4.0e9..8.0e9f64,
        g in 0.0..300.0e6f64,
    ) {
        let (fq, fb, g) = (Frequency::hz(fq), Frequency::hz(fb), Frequency::hz(g));
        let p = hybridized_frequencies(fq, fb, g);
        prop_assert!(rel((p.f_minus + p.f_plus).as_hz(), (fq + fb).as_hz()) <= 1e-12);
        let (lo, hi) = if fq < fb { (fq, fb) } else { (fb, fq) };
        prop_assert!(p.f_minus <= lo && hi <= p.f_plus);
        prop_assert!(rabi_splitting(fq, fb, g).as_hz() >= 2.0 * g.as_hz());
    }

    #[test]
    fn shift_inversions(
        fb in 4.0e9..8.0e9f64,
        detuning in prop_oneof![-3.0e9..-50.0e6f64, 50.0e6..8.0e9f64],
        g in 10.0e6..200.0e6f64,
    ) {
        let (fq, fb, g) = (Frequency::hz(fb + detuning), Frequency::hz(fb), Frequency::hz(g));
        let chi = dispersive_shift(g, fq, fb).unwrap();
        prop_assert!(rel(fq_from_shift(chi, g, fb).unwrap().as_hz(), fq.as_hz()) <= 1e-12);
        prop_assert!(rel(g_from_shift(chi, fq, fb).unwrap().as_hz(), g.as_hz()) <= 1e-12);
        let mirrored = dispersive_shift(g, fb - (fq - fb), fb).unwrap();
        prop_assert!(rel(mirrored.as_hz(), -chi.as_hz()) <= 1e-12);
    }

    #[test]
    fn ncrit_grows_with_detuning(
        fb in 4.0e9..8.0e9f64,
        d in 1.0e6..3.0e9f64,
        extra in 1.0e6..1.0e9f64,
        g in 10.0e6..200.0e6f64,
    ) {
        let (fb, g) = (Frequency::hz(fb), Frequency::hz(g));
        let near = critical_photon_number(g, fb + Frequency::hz(d), fb).unwrap();
        let far = critical_photon_number(g, fb + Frequency::hz(d + extra), fb).unwrap();
        prop_assert!(far > near);
    }

    #[test]
    fn squid_curve_is_even_and_periodic(phi in -2.0..2.0f64, k in -3i32..3) {
        let fmax = Frequency::ghz(8.068);
        let f = squid_frequency(fmax, FluxBias::new(phi)).as_hz();
        let mirrored = squid_frequency(fmax, FluxBias::new(-phi)).as_hz();
        let shifted = squid_frequency(fmax, FluxBias::new(phi + k as f64)).as_hz();
        prop_assert!((f - mirrored).abs() <= 1e-3);
        prop_assert!((f - shifted).abs() <= 1e-3);
        prop_assert!(f <= fmax.as_hz());
    }

    #[test]
    fn t2_bound_decreases(w in 1.0e3..1.0e10f64, factor in 1.0001..10.0f64) {
        let a = t2_lower_bound_from_fwhm(Frequency::hz(w)).unwrap();
        let b = t2_lower_bound_from_fwhm(Frequency::hz(w * factor)).unwrap();
        prop_assert!(b < a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn crossing_fit_is_a_local_minimum(g_mhz in 50.0..150.0f64, seed in any::<u64>()) {
        use rand::SeedableRng;
        use rand_distr::{Distribution, Normal};
        let fb = Frequency::ghz(6.0558);
        let g = Frequency::mhz(g_mhz);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, 2e6).unwrap();
        let pts: Vec<_> = (0..15)
            .map(|i| {
                let fq = fb + Frequency::mhz(-300.0 + 600.0 * i as f64 / 14.0);
                (fq, rabi_splitting(fq, fb, g) + Frequency::hz(normal.sample(&mut rng)))
            })
            .collect();
        let data = BranchData::new(pts).unwrap();
        let best = fit_avoided_crossing(&data, fb).unwrap().get("g").unwrap();
        let ssr = |g: f64| -> f64 {
            data.points
                .iter()
                .map(|(fq, d)| (rabi_splitting(*fq, fb, Frequency::hz(g)) - *d).as_hz().powi(2))
                .sum()
        };
        prop_assert!(ssr(best) <= ssr(1.1 * best));
        prop_assert!(ssr(best) <= ssr(0.9 * best));
    }
}

#[test]
fn noise_has_the_requested_spread() {
    let delays: Vec<f64> = (0..20_000).map(|i| i as f64).collect();
    for (seed, sigma) in [(1u64, 0.02), (2, 0.1), (3, 1.0)] {
        // decay much longer than the window leaves the noise on a flat baseline
        let tr = t1_trace(1e30, 0.0, &delays, sigma, seed).unwrap();
        let n = tr.len() as f64;
        let mean = tr.amplitudes.iter().sum::<f64>() / n;
        let sd = (tr.amplitudes.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!(sd >= 0.9 * sigma && sd <= 1.1 * sigma, "{sd} vs {sigma}");
    }
}

#[test]
fn maps_are_deterministic_per_seed() {
    let dev = DeviceModel::new(
        CavityModel {
            f_bare: Frequency::ghz(6.0558),
            kappa: Frequency::mhz(2.6),
            s21_floor: 0.1,
        },
        vec![QubitModel::squid("q1", Frequency::ghz(6.438), Frequency::mhz(100.5))],
        -40.0,
    )
    .unwrap();
    let phi: Vec<f64> = (0..64).map(|i| -0.5 + i as f64 / 63.0).collect();
    let f: Vec<f64> = (0..200).map(|i| 5.9e9 + i as f64 * 1e6).collect();
    let drive = DriveConfig {
        noise_sigma_db: 0.2,
        seed: 42,
        ..Default::default()
    };
    let a = flux_map(&dev, &phi, &f, &drive).unwrap();
    let b = rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .unwrap()
        .install(|| flux_map(&dev, &phi, &f, &drive).unwrap());
    assert_eq!(a, b);
    let other = flux_map(&dev, &phi, &f, &DriveConfig { seed: 43, ..drive }).unwrap();
    assert_ne!(a, other);
}
