//! 100-seed noise envelopes for each fitter.

use cqedlab_core::fit::{
    fit_avoided_crossing, fit_exponential_decay, fit_flux_noise_amplitude, fit_lorentzian, fit_power_broadening,
    BranchData, LinewidthSeries, Polarity, DEFAULT_PHI_WINDOW,
};
use cqedlab_core::jc::rabi_splitting;
use cqedlab_core::synth::{lorentzian_s21, t1_trace, two_tone_fwhm, SpectroTrace, TwoToneConfig};
use cqedlab_core::{FluxBias, Frequency, QubitModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const SEEDS: u64 = 100;

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn gaussian(seed: u64, sigma: f64) -> impl FnMut() -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).unwrap();
    move || normal.sample(&mut rng)
}

#[test]
fn lorentzian_center_within_kappa_over_50() {
    let (fr, kappa) = (6.02937e9, 2.6e6);
    let f = linspace(fr - 10e6, fr + 10e6, 201);
    let mut worst: f64 = 0.0;
    for seed in 0..SEEDS {
        let mut noise = gaussian(seed, 0.1);
        let v = f.iter().map(|&x| lorentzian_s21(x, fr, kappa, 0.1) + noise()).collect();
        let r = fit_lorentzian(&SpectroTrace::new(f.clone(), v).unwrap(), Polarity::Dip).unwrap();
        assert!(r.converged);
        worst = worst.max((r.get("fr").unwrap() - fr).abs());
    }
    println!("worst |fr error| = {worst:.1} Hz, κ/50 = {:.1} Hz", kappa / 50.0);
    assert!(worst <= kappa / 50.0);
}

#[test]
fn coupling_within_2_mhz() {
    let fb = Frequency::ghz(6.0558);
    let g = Frequency::mhz(100.5);
    let mut worst: f64 = 0.0;
    for seed in 0..SEEDS {
        let mut noise = gaussian(seed, 2e6);
        let pts = linspace(-300e6, 300e6, 15)
            .into_iter()
            .map(|d| {
                let fq = fb + Frequency::hz(d);
                (fq, rabi_splitting(fq, fb, g) + Frequency::hz(noise()))
            })
            .collect();
        let r = fit_avoided_crossing(&BranchData::new(pts).unwrap(), fb).unwrap();
        assert!(r.converged);
        worst = worst.max((r.get("g").unwrap() - g.as_hz()).abs());
    }
    println!("worst |g error| = {:.3} MHz", worst / 1e6);
    assert!(worst <= 2e6);
}

#[test]
fn t1_within_1_ns() {
    let delays = linspace(0.0, 250e-9, 501);
    let mut worst: f64 = 0.0;
    for seed in 0..SEEDS {
        let tr = t1_trace(48e-9, 1.0, &delays, 0.02, seed).unwrap();
        let r = fit_exponential_decay(&tr).unwrap();
        assert!(r.converged);
        worst = worst.max((r.get("T1").unwrap() - 48e-9).abs());
    }
    println!("worst |T1 error| = {:.3} ns", worst * 1e9);
    assert!(worst <= 1e-9);
}

#[test]
fn t2_star_within_5_percent() {
    let q = QubitModel::squid("q1", Frequency::ghz(8.068), Frequency::mhz(111.3)).with_coherence(48e-9, 17.63e-9);
    let cfg = TwoToneConfig {
        beta: 2e17,
        ..Default::default()
    };
    let mut worst: f64 = 0.0;
    for seed in 0..SEEDS {
        let mut noise = gaussian(seed, 0.02);
        let pts = linspace(-30.0, 0.0, 7)
            .into_iter()
            .map(|p| {
                let w = two_tone_fwhm(&q, FluxBias::SWEET_SPOT, Some(p), &cfg).unwrap();
                (p, w * (1.0 + noise()))
            })
            .collect();
        let r = fit_power_broadening(&LinewidthSeries::new(pts).unwrap(), q.t1).unwrap();
        worst = worst.max((r.get("t2_star").unwrap() / 17.63e-9 - 1.0).abs());
    }
    println!("worst relative T2* error = {worst:.4}");
    assert!(worst <= 0.05);
}

#[test]
fn flux_noise_amplitude_within_10_percent() {
    let q = QubitModel::squid("q1", Frequency::ghz(8.068), Frequency::mhz(111.3)).with_coherence(48e-6, 48e-6);
    let cfg = TwoToneConfig {
        flux_noise_amplitude: 0.1,
        ..Default::default()
    };
    let mut worst: f64 = 0.0;
    for seed in 0..SEEDS {
        let mut noise = gaussian(seed, 0.05);
        let pts = linspace(-0.05, 0.05, 21)
            .into_iter()
            .map(|p| {
                let w = two_tone_fwhm(&q, FluxBias::new(p), None, &cfg).unwrap();
                (p, w * (1.0 + noise()))
            })
            .collect();
        let r = fit_flux_noise_amplitude(&LinewidthSeries::new(pts).unwrap(), &q, DEFAULT_PHI_WINDOW).unwrap();
        worst = worst.max((r.get("A").unwrap() / 0.1 - 1.0).abs());
    }
    println!("worst relative A error = {worst:.4}");
    assert!(worst <= 0.10);
}
