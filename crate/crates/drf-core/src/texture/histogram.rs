//! First-order statistics of the in-mask gray-level distribution.

use crate::error::{Error, Result};
use crate::volume::QuantizedRoi;

/// Mean, variance (population), skewness, kurtosis (non-excess), energy and
/// entropy (log base 2) of the in-mask level distribution.
///
/// Skewness and kurtosis are 0 by convention when the variance is zero.
pub fn histogram_features(q: &QuantizedRoi) -> Result<[f64; 6]> {
    let mut counts = vec![0u64; q.levels as usize];
    let mut total = 0u64;
    for &v in &q.data {
        if v > 0 {
            counts[(v - 1) as usize] += 1;
            total += 1;
        }
    }
    if total == 0 {
        return Err(Error::EmptyRoi);
    }
    let n = total as f64;
    let p = |c: u64| c as f64 / n;

    let mut mean = 0.0;
    for (i, &c) in counts.iter().enumerate() {
        mean += (i as f64 + 1.0) * p(c);
    }
    let mut var = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    let mut energy = 0.0;
    let mut entropy = 0.0;
    for (i, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let pi = p(c);
        let d = i as f64 + 1.0 - mean;
        var += d * d * pi;
        m3 += d * d * d * pi;
        m4 += d * d * d * d * pi;
        energy += pi * pi;
        entropy -= pi * pi.log2();
    }
    let (skewness, kurtosis) = if var > 0.0 {
        let sd = var.sqrt();
        (m3 / (sd * sd * sd), m4 / (var * var))
    } else {
        (0.0, 0.0)
    };
    Ok([mean, var, skewness, kurtosis, energy, entropy])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::QuantizedRoi;

    fn roi(levels: u32, data: Vec<u32>) -> QuantizedRoi {
        let n = data.len();
        QuantizedRoi {
            dims: [n, 1, 1],
            levels,
            data,
        }
    }

    #[test]
    fn constant_region() {
        let f = histogram_features(&roi(32, vec![5; 10])).unwrap();
        assert_eq!(f[0], 5.0); // mean
        assert_eq!(f[1], 0.0); // variance
        assert_eq!(f[2], 0.0); // skewness convention
        assert_eq!(f[3], 0.0); // kurtosis convention
        assert_eq!(f[4], 1.0); // energy
        assert_eq!(f[5], 0.0); // entropy
    }

    #[test]
    fn symmetric_two_point() {
        let f = histogram_features(&roi(2, vec![1, 2, 1, 2])).unwrap();
        assert_eq!(f[0], 1.5);
        assert_eq!(f[1], 0.25);
        assert_eq!(f[4], 0.5);
        assert_eq!(f[5], 1.0);
        assert_eq!(f[2], 0.0); // symmetric distribution
    }

    #[test]
    fn entropy_direct_formula() {
        let f = histogram_features(&roi(2, vec![1, 1, 1, 2])).unwrap();
        let expected = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        assert!((f[5] - expected).abs() < 1e-12);
        assert!((expected - 0.8113).abs() < 1e-4);
    }

    #[test]
    fn empty_mask_errors() {
        assert!(matches!(
            histogram_features(&roi(2, vec![0, 0])),
            Err(Error::EmptyRoi)
        ));
    }
}
