//! Jaynes–Cummings hybridization and dispersive-regime algebra.
//!
//! Closed forms live alongside [`jc_diagonalize`], a numerical
//! diagonalization of the truncated Hamiltonian used to check them.
//! All quantities are linear frequencies (Hz); `chi` is signed and positive
//! when the qubit sits above the cavity, so the low-power resonance is
//! `f_bare - chi`.

use nalgebra::{Matrix2, SymmetricEigen};

use crate::error::{Error, Result};
use crate::units::Frequency;

/// The two hybridized qubit-cavity branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridPair {
    pub f_minus: Frequency,
    pub f_plus: Frequency,
}

impl HybridPair {
    pub fn splitting(&self) -> Frequency {
        self.f_plus - self.f_minus
    }
}

pub fn hybridized_frequencies(fq: Frequency, f_bare: Frequency, g: Frequency) -> HybridPair {
    let sum = fq.as_hz() + f_bare.as_hz();
    let root = rabi_splitting(fq, f_bare, g).as_hz();
    HybridPair {
        f_minus: Frequency::hz(0.5 * (sum - root)),
        f_plus: Frequency::hz(0.5 * (sum + root)),
    }
}

/// `f_plus - f_minus = sqrt((fq - f_bare)² + 4g²)`.
pub fn rabi_splitting(fq: Frequency, f_bare: Frequency, g: Frequency) -> Frequency {
    let d = fq.as_hz() - f_bare.as_hz();
    Frequency::hz(d.hypot(2.0 * g.as_hz()))
}

/// Signed dispersive shift `g²/(fq - f_bare)`.
pub fn dispersive_shift(g: Frequency, fq: Frequency, f_bare: Frequency) -> Result<Frequency> {
    let detuning = fq.as_hz() - f_bare.as_hz();
    if detuning == 0.0 {
        return Err(Error::DegenerateDetuning {
            op: "dispersive_shift",
        });
    }
    Ok(Frequency::hz(g.as_hz() * g.as_hz() / detuning))
}

/// Inverts [`dispersive_shift`] for the qubit frequency: `f_bare + g²/chi`.
pub fn fq_from_shift(chi: Frequency, g: Frequency, f_bare: Frequency) -> Result<Frequency> {
    if chi.as_hz() == 0.0 || !chi.is_finite() {
        return Err(Error::ZeroShift);
    }
    if !(g.as_hz() > 0.0) {
        return Err(Error::domain("fq_from_shift", "coupling g must be positive"));
    }
    Ok(Frequency::hz(f_bare.as_hz() + g.as_hz() * g.as_hz() / chi.as_hz()))
}

/// Inverts [`dispersive_shift`] for the coupling: `sqrt(chi·(fq - f_bare))`.
pub fn g_from_shift(chi: Frequency, fq: Frequency, f_bare: Frequency) -> Result<Frequency> {
    let detuning = fq.as_hz() - f_bare.as_hz();
    let product = chi.as_hz() * detuning;
    if chi.as_hz() == 0.0 || detuning == 0.0 || product < 0.0 {
        return Err(Error::SignMismatch {
            chi: chi.as_hz(),
            detuning,
        });
    }
    Ok(Frequency::hz(product.sqrt()))
}

/// `n_crit = Δ²/4g²`, the photon number where the dispersive picture breaks down.
pub fn critical_photon_number(g: Frequency, fq: Frequency, f_bare: Frequency) -> Result<f64> {
    if !(g.as_hz() > 0.0) {
        return Err(Error::domain(
            "critical_photon_number",
            "coupling g must be positive",
        ));
    }
    let ratio = (fq.as_hz() - f_bare.as_hz()) / (2.0 * g.as_hz());
    Ok(ratio * ratio)
}

/// Energy-exchange rate Ω = g/π, returned as a linear frequency (2·g when g is g/2π).
pub fn strong_coupling_exchange_rate(g: Frequency) -> Result<Frequency> {
    if !(g.as_hz() > 0.0) {
        return Err(Error::domain(
            "strong_coupling_exchange_rate",
            "coupling g must be positive",
        ));
    }
    Ok(g * 2.0)
}

/// Eigenvalues (E/h, Hz) of the truncated Jaynes–Cummings Hamiltonian,
/// grouped by excitation number.
#[derive(Debug, Clone, PartialEq)]
pub struct JcSpectrum {
    pub truncation: usize,
    /// `manifolds[k]` holds the ascending eigenvalues with k excitations.
    /// Manifold 0 is the ground state, manifolds 1..=N are 2×2 blocks, and
    /// manifold N+1 keeps only |e, N⟩ because |g, N+1⟩ is truncated.
    pub manifolds: Vec<Vec<f64>>,
    f_bare: f64,
}

impl JcSpectrum {
    pub fn manifold(&self, excitations: usize) -> &[f64] {
        &self.manifolds[excitations]
    }

    /// Dressed |g,1⟩ energy minus f_bare: the cavity-like level of the
    /// single-excitation manifold (the one nearer f_bare) relative to the
    /// bare cavity. Approaches `-chi` deep in the dispersive regime.
    pub fn dressed_cavity_pull(&self) -> Frequency {
        let ground = self.manifolds[0][0];
        let m = &self.manifolds[1];
        let (a, b) = (m[0] - ground, m[1] - ground);
        let cavity_like = if (a - self.f_bare).abs() <= (b - self.f_bare).abs() {
            a
        } else {
            b
        };
        Frequency::hz(cavity_like - self.f_bare)
    }

    pub fn len(&self) -> usize {
        self.manifolds.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.manifolds.is_empty()
    }
}

/// Diagonalizes H/h = f_bare·a†a + fq·|e⟩⟨e| + g(a†σ⁻ + aσ⁺) with at most
/// `truncation` photons, block by block in the excitation number.
pub fn jc_diagonalize(
    fq: Frequency,
    f_bare: Frequency,
    g: Frequency,
    truncation: usize,
) -> Result<JcSpectrum> {
    if truncation < 2 {
        return Err(Error::Truncation(truncation));
    }
    let (wq, wc, g) = (fq.as_hz(), f_bare.as_hz(), g.as_hz());
    if !(g >= 0.0) || g >= wc / 10.0 {
        return Err(Error::domain(
            "jc_diagonalize",
            format!("coupling {g} Hz outside the rotating-wave regime (0 ≤ g < f_bare/10)"),
        ));
    }

    let mut manifolds = Vec::with_capacity(truncation + 2);
    manifolds.push(vec![0.0]);
    for k in 1..=truncation {
        // basis: |g, k⟩, |e, k-1⟩
        let kf = k as f64;
        let coupling = g * kf.sqrt();
        let block = Matrix2::new(kf * wc, coupling, coupling, (kf - 1.0) * wc + wq);
        let eig = SymmetricEigen::new(block);
        let mut vals = vec![eig.eigenvalues[0], eig.eigenvalues[1]];
        vals.sort_by(f64::total_cmp);
        manifolds.push(vals);
    }
    manifolds.push(vec![truncation as f64 * wc + wq]);

    Ok(JcSpectrum {
        truncation,
        manifolds,
        f_bare: wc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn degenerate_point_splits_by_2g() {
        let f = Frequency::ghz(6.0558);
        let p = hybridized_frequencies(f, f, Frequency::mhz(100.5));
        assert!((p.f_minus.as_ghz() - 5.9553).abs() < 1e-9);
        assert!((p.f_plus.as_ghz() - 6.1563).abs() < 1e-9);
        assert!((p.splitting().as_mhz() - 201.0).abs() < 1e-6);
    }

    #[test]
    fn dispersive_branch_of_cooldown_one() {
        let p = hybridized_frequencies(Frequency::ghz(8.068), Frequency::ghz(6.059), Frequency::mhz(111.3));
        // (14.127 GHz - sqrt(2.009² + 4·0.1113²) GHz) / 2
        assert!((p.f_minus.as_hz() - 6_052_852_712.367).abs() < 1.0, "{}", p.f_minus.as_hz());
        let pull = 6.059e9 - p.f_minus.as_hz();
        assert!((pull - 6.15e6).abs() <= 0.05e6);
    }

    #[test]
    fn decoupled_limit() {
        let f = Frequency::ghz(6.0);
        let p = hybridized_frequencies(f, f, Frequency::hz(1e-3));
        assert!(rel(p.f_minus.as_hz(), 6e9) < 1e-12);
        assert!(rel(p.f_plus.as_hz(), 6e9) < 1e-12);
    }

    #[test]
    fn splitting_values() {
        let g = Frequency::mhz(100.5);
        let f = Frequency::ghz(6.0);
        assert!((rabi_splitting(f, f, g).as_mhz() - 201.0).abs() < 1e-9);
        let s = rabi_splitting(Frequency::ghz(6.3), f, g);
        assert!((s.as_mhz() - 361.110_786_3).abs() < 1e-6, "{}", s.as_mhz());
        assert_eq!(s, rabi_splitting(f, Frequency::ghz(6.3), g));
    }

    #[test]
    fn dispersive_shift_values() {
        let chi = dispersive_shift(Frequency::mhz(100.5), Frequency::ghz(6.438), Frequency::ghz(6.0558)).unwrap();
        assert!((chi.as_mhz() - 26.4).abs() <= 0.3);
        let chi = dispersive_shift(Frequency::mhz(78.9), Frequency::ghz(5.059), Frequency::ghz(6.8)).unwrap();
        assert!((chi.as_mhz() + 3.58).abs() <= 0.05);
        let fb = Frequency::ghz(6.0);
        let up = dispersive_shift(Frequency::mhz(80.0), Frequency::ghz(6.5), fb).unwrap();
        let down = dispersive_shift(Frequency::mhz(80.0), Frequency::ghz(5.5), fb).unwrap();
        assert_eq!(up, -down);
        assert!(matches!(
            dispersive_shift(Frequency::mhz(80.0), fb, fb),
            Err(Error::DegenerateDetuning { .. })
        ));
    }

    #[test]
    fn fq_inversion_values() {
        let fq = fq_from_shift(Frequency::mhz(26.4), Frequency::mhz(100.5), Frequency::ghz(6.0558)).unwrap();
        assert!((fq.as_mhz() - 6438.0).abs() <= 2.0);
        let fq = fq_from_shift(Frequency::mhz(1.28), Frequency::mhz(100.0), Frequency::ghz(6.0545)).unwrap();
        assert!((fq.as_ghz() - 13.87).abs() <= 0.05);
        let fq = fq_from_shift(Frequency::mhz(2.25), Frequency::mhz(78.9), Frequency::ghz(6.0545)).unwrap();
        assert!((fq.as_ghz() - 8.82).abs() <= 0.02);
        assert!(matches!(
            fq_from_shift(Frequency::ZERO, Frequency::mhz(1.0), Frequency::ghz(6.0)),
            Err(Error::ZeroShift)
        ));
    }

    #[test]
    fn g_inversion_values() {
        let g = g_from_shift(Frequency::mhz(6.15), Frequency::ghz(8.068), Frequency::ghz(6.059)).unwrap();
        assert!((g.as_mhz() - 111.2).abs() <= 0.5);
        let g = g_from_shift(Frequency::mhz(2.25), Frequency::ghz(10.86), Frequency::ghz(6.0545)).unwrap();
        assert!((g.as_mhz() - 104.0).abs() <= 1.0);
        assert!(matches!(
            g_from_shift(Frequency::mhz(-2.0), Frequency::ghz(7.0), Frequency::ghz(6.0)),
            Err(Error::SignMismatch { .. })
        ));
    }

    #[test]
    fn critical_photon_numbers() {
        let f = Frequency::ghz(6.0558);
        assert_eq!(critical_photon_number(Frequency::mhz(100.0), f, f).unwrap(), 0.0);
        let fb = Frequency::ghz(6.0545);
        let squid = critical_photon_number(Frequency::mhz(100.0), Frequency::ghz(13.86), fb).unwrap();
        let fixed = critical_photon_number(Frequency::mhz(78.9), Frequency::ghz(8.82), fb).unwrap();
        assert!((squid / fixed - 4.96).abs() < 0.01, "{}", squid / fixed);
        let fb = Frequency::ghz(6.8);
        let squid = critical_photon_number(Frequency::mhz(100.0), Frequency::ghz(9.48), fb).unwrap();
        let fixed = critical_photon_number(Frequency::mhz(78.9), Frequency::ghz(5.059), fb).unwrap();
        assert!((squid / fixed - 1.47).abs() < 0.01, "{}", squid / fixed);
    }

    #[test]
    fn exchange_rate() {
        let r = strong_coupling_exchange_rate(Frequency::mhz(100.0)).unwrap();
        assert!((r.as_mhz() - 200.0).abs() < 1e-9);
        assert!((1.0 / r.as_hz() - 5e-9).abs() < 1e-18);
        assert!((strong_coupling_exchange_rate(Frequency::mhz(111.3)).unwrap().as_mhz() - 222.6).abs() < 1e-9);
    }

    #[test]
    fn diagonalization_guards() {
        let f = Frequency::ghz(6.0);
        assert!(matches!(jc_diagonalize(f, f, Frequency::mhz(50.0), 1), Err(Error::Truncation(1))));
        assert!(jc_diagonalize(f, f, Frequency::mhz(700.0), 4).is_err());
    }

    #[test]
    fn decoupled_spectrum_is_exact() {
        let (wq, wc) = (6.3e9, 6.0e9);
        let s = jc_diagonalize(Frequency::hz(wq), Frequency::hz(wc), Frequency::ZERO, 5).unwrap();
        assert_eq!(s.manifolds.len(), 7);
        assert_eq!(s.len(), 1 + 2 * 5 + 1);
        for k in 1..=5 {
            let kf = k as f64;
            let mut want = [kf * wc, (kf - 1.0) * wc + wq];
            want.sort_by(f64::total_cmp);
            assert_eq!(s.manifold(k), &want[..], "manifold {k}");
        }
    }

    #[test]
    fn dressed_pull_tracks_dispersive_shift() {
        let fb = Frequency::ghz(6.0);
        let g = Frequency::mhz(50.0);
        let fq = Frequency::ghz(7.0); // g/Δ = 0.05
        let s = jc_diagonalize(fq, fb, g, 4).unwrap();
        let chi = dispersive_shift(g, fq, fb).unwrap();
        let err = (s.dressed_cavity_pull().as_hz() + chi.as_hz()).abs() / chi.as_hz();
        assert!(err < 0.01, "{err}");
    }
}
