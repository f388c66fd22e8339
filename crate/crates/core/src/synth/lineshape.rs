use crate::units::magnitude_to_db;

/// Linear transmission `1 - depth·(w/2)²/((f - center)² + (w/2)²)` for a
/// Lorentzian of full width `fwhm`. Positive `depth` gives a dip, negative a peak.
pub fn lorentzian_magnitude(f: f64, center: f64, fwhm: f64, depth: f64) -> f64 {
    let hw2 = 0.25 * fwhm * fwhm;
    let d = f - center;
    1.0 - depth * hw2 / (d * d + hw2)
}

/// Cavity dip in dB; `floor` is the linear |S21| at resonance.
pub fn lorentzian_s21(f: f64, fr: f64, kappa: f64, floor: f64) -> f64 {
    magnitude_to_db(lorentzian_magnitude(f, fr, kappa, 1.0 - floor))
}

/// Qubit peak in dB on a 0 dB baseline; `height` is the linear magnitude at the centre (> 1).
pub fn lorentzian_peak_db(f: f64, center: f64, fwhm: f64, height: f64) -> f64 {
    magnitude_to_db(lorentzian_magnitude(f, center, fwhm, 1.0 - height))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::db_to_magnitude;

    #[test]
    fn dip_minimum_is_floor() {
        let v = lorentzian_s21(6.0e9, 6.0e9, 2.6e6, 0.1);
        assert!((v - 20.0 * 0.1f64.log10()).abs() < 1e-12);
    }

    #[test]
    fn half_depth_at_half_width() {
        let (fr, k, floor) = (6.0e9, 2.6e6, 0.2);
        for f in [fr - k / 2.0, fr + k / 2.0] {
            let m = db_to_magnitude(lorentzian_s21(f, fr, k, floor));
            assert!((m - (1.0 - 0.5 * (1.0 - floor))).abs() < 1e-12);
        }
    }

    #[test]
    fn peak_reaches_height() {
        let v = lorentzian_peak_db(8.0e9, 8.0e9, 18e6, 2.0);
        assert!((db_to_magnitude(v) - 2.0).abs() < 1e-12);
        assert!(lorentzian_peak_db(9.0e9, 8.0e9, 18e6, 2.0) < 0.01);
    }
}
