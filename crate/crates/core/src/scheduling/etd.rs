use crate::error::SchedError;

pub const DEFAULT_SMOOTHING: f64 = 0.2;

/// Exponentially weighted one-hop delay estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtdEstimator {
    etd: Option<f64>,
    smoothing: f64,
}

impl EtdEstimator {
    /// Uninitialized; the first sample is taken verbatim.
    pub fn new(smoothing: f64) -> Self {
        EtdEstimator {
            etd: None,
            smoothing: smoothing.clamp(f64::MIN_POSITIVE, 1.0),
        }
    }

    /// Seeded with a prior estimate.
    pub fn with_initial(initial: f64, smoothing: f64) -> Self {
        EtdEstimator {
            etd: Some(initial),
            ..EtdEstimator::new(smoothing)
        }
    }

    pub fn etd(&self) -> Option<f64> {
        self.etd
    }

    pub fn smoothing(&self) -> f64 {
        self.smoothing
    }

    pub fn update(&mut self, sample: f64) -> Result<f64, SchedError> {
        if !(sample >= 0.0) {
            return Err(SchedError::NegativeSample(sample));
        }
        let next = match self.etd {
            None => sample,
            Some(prev) => (1.0 - self.smoothing) * prev + self.smoothing * sample,
        };
        self.etd = Some(next);
        Ok(next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ewma_step() {
        let mut e = EtdEstimator::with_initial(0.10, 0.2);
        let v = e.update(0.20).unwrap();
        assert!((v - 0.12).abs() < 1e-12);
    }

    #[test]
    fn first_sample_initializes() {
        let mut e = EtdEstimator::new(0.2);
        assert_eq!(e.etd(), None);
        assert_eq!(e.update(0.37).unwrap(), 0.37);
    }

    #[test]
    fn converges_to_constant_sample() {
        let mut e = EtdEstimator::with_initial(5.0, 0.2);
        for _ in 0..300 {
            e.update(0.004).unwrap();
        }
        assert!((e.etd().unwrap() - 0.004).abs() < 1e-12);
    }

    #[test]
    fn negative_sample_rejected() {
        let mut e = EtdEstimator::with_initial(0.1, 0.2);
        assert_eq!(e.update(-1e-9), Err(SchedError::NegativeSample(-1e-9)));
        assert_eq!(e.etd(), Some(0.1));
    }

    proptest::proptest! {
        #[test]
        fn stays_between_prev_and_sample(prev in 0.0f64..10.0, s in 0.0f64..10.0, w in 0.01f64..1.0) {
            let mut e = EtdEstimator::with_initial(prev, w);
            let v = e.update(s).unwrap();
            proptest::prop_assert!(v >= prev.min(s) - 1e-12 && v <= prev.max(s) + 1e-12);
        }
    }
}
