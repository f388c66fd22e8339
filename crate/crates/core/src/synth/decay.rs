use super::{add_noise, check_axis};
use crate::error::{Error, Result};

/// Samples of a relaxation measurement: amplitude versus delay (s).
#[derive(Debug, Clone, PartialEq)]
pub struct DecayTrace {
    pub delays: Vec<f64>,
    pub amplitudes: Vec<f64>,
}

impl DecayTrace {
    pub fn new(delays: Vec<f64>, amplitudes: Vec<f64>) -> Result<Self> {
        check_axis("delay_s", &delays)?;
        if delays.len() != amplitudes.len() {
            return Err(Error::Grid {
                axis: "amplitude".into(),
                msg: format!("{} amplitudes for {} delays", amplitudes.len(), delays.len()),
            });
        }
        Ok(DecayTrace { delays, amplitudes })
    }

    pub fn len(&self) -> usize {
        self.delays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delays.is_empty()
    }
}

/// `A·exp(-τ/T1)` on `delays` plus N(0, noise_sigma²) noise.
pub fn t1_trace(t1: f64, amplitude: f64, delays: &[f64], noise_sigma: f64, seed: u64) -> Result<DecayTrace> {
    if !(t1 > 0.0) || !t1.is_finite() {
        return Err(Error::domain("t1_trace", format!("T1 must be positive, got {t1} s")));
    }
    if !(noise_sigma >= 0.0) {
        return Err(Error::domain("t1_trace", format!("noise sigma must be ≥ 0, got {noise_sigma}")));
    }
    check_axis("delay_s", delays)?;
    let mut amplitudes: Vec<f64> = delays.iter().map(|&t| amplitude * (-t / t1).exp()).collect();
    add_noise(&mut amplitudes, noise_sigma, seed, 0);
    DecayTrace::new(delays.to_vec(), amplitudes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_reference_points() {
        let t1 = 48e-9;
        let tr = t1_trace(t1, 0.8, &[0.0, t1, 2.0 * t1], 0.0, 1).unwrap();
        assert_eq!(tr.amplitudes[0], 0.8);
        assert!((tr.amplitudes[1] - 0.8 / std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_t1() {
        assert!(t1_trace(0.0, 1.0, &[0.0, 1.0], 0.0, 1).is_err());
        assert!(t1_trace(-1.0, 1.0, &[0.0, 1.0], 0.0, 1).is_err());
        assert!(t1_trace(1.0, 1.0, &[1.0, 0.0], 0.0, 1).is_err());
    }
}
