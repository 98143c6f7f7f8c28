use crate::scalar::Scalar;

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn shannon_entropy<T: Scalar>(probabilities: &[T]) -> T {
    let h: T = probabilities
        .iter()
        .filter(|&&p| p > T::zero())
        .map(|&p| -p * p.log2())
        .sum();
    // roundoff can push a point mass slightly negative
    h.max(T::zero())
}

/// Index of the first entropy local minimum: the first `k >= 1` whose
/// entropy is strictly below each of the next `window` values.
///
/// Index 0 is the post-superposition state and is never reported. Returns
/// `None` while the sequence is too short to decide or has no such `k`.
pub fn entropy_stop<T: Scalar>(entropies: &[T], window: usize) -> Option<usize> {
    let window = window.max(1);
    (1..entropies.len().saturating_sub(window))
        .find(|&k| (1..=window).all(|j| entropies[k] < entropies[k + j]))
}

/// Incremental form of [`entropy_stop`] for runs whose length is not known
/// in advance.
#[derive(Clone, Debug)]
pub struct EntropyStopper<T: Scalar> {
    window: usize,
    history: Vec<T>,
    fired: Option<usize>,
}

impl<T: Scalar> EntropyStopper<T> {
    pub fn new(window: usize) -> Self {
        Self {
            window: window.max(1),
            history: Vec::new(),
            fired: None,
        }
    }

    /// Records the entropy of the next iteration (the first push is
    /// iteration 0) and returns the stop iteration once decided.
    pub fn push(&mut self, entropy: T) -> Option<usize> {
        if self.fired.is_some() {
            return self.fired;
        }
        self.history.push(entropy);
        let len = self.history.len();
        if len > self.window + 1 {
            let k = len - 1 - self.window;
            if (1..=self.window).all(|j| self.history[k] < self.history[k + j]) {
                self.fired = Some(k);
            }
        }
        self.fired
    }

    pub fn stopped_at(&self) -> Option<usize> {
        self.fired
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_values() {
        assert_eq!(shannon_entropy(&[0.25f64; 4]), 2.0);
        assert_eq!(shannon_entropy(&[1.0f64, 0.0, 0.0, 0.0]), 0.0);
        assert_eq!(shannon_entropy(&[0.5f64, 0.5, 0.0, 0.0]), 1.0);
        let uniform = vec![1.0f64 / 1024.0; 1024];
        assert!((shannon_entropy(&uniform) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn stop_at_first_local_minimum() {
        assert_eq!(entropy_stop(&[3.0, 1.2, 0.5, 2.8, 0.1], 1), Some(2));
        assert_eq!(entropy_stop(&[2.0, 0.0, 2.0], 1), Some(1));
    }

    #[test]
    fn monotone_decrease_never_fires() {
        assert_eq!(entropy_stop(&[5.0, 4.0, 3.0, 2.0, 1.0], 1), None);
        assert_eq!(entropy_stop::<f64>(&[5.0], 1), None);
        assert_eq!(entropy_stop::<f64>(&[], 1), None);
    }

    #[test]
    fn window_requires_sustained_rise() {
        let e = [3.0, 1.0, 1.5, 0.5, 0.7, 0.9];
        assert_eq!(entropy_stop(&e, 1), Some(1));
        assert_eq!(entropy_stop(&e, 2), Some(3));
    }

    #[test]
    fn incremental_matches_batch() {
        let e = [3.0, 1.0, 1.5, 0.5, 0.7, 0.9, 0.2];
        for window in 1..=3 {
            let mut s = EntropyStopper::new(window);
            let mut got = None;
            for &x in &e {
                got = s.push(x);
            }
            assert_eq!(got, entropy_stop(&e, window), "window {window}");
        }
    }
}
