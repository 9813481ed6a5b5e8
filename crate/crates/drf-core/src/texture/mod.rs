//! The 41 texture quantifiers (6 histogram, 17 GLCM, 5 NGTDM, 13 GLSZM)
//! computed over a quantized masked 3D grid, plus 4 shape features computed
//! over a mask.
//!
//! Feature values live in a fixed canonical order so CSV columns stay
//! stable across runs and releases; see [`feature_manifest`].

mod glcm;
mod glszm;
mod histogram;
mod ngtdm;
mod shape;

pub use glcm::{compute_glcm, glcm_features, Glcm};
pub use glszm::{compute_glszm, glszm_features, Glszm};
pub use histogram::histogram_features;
pub use ngtdm::{compute_ngtdm, ngtdm_features, Ngtdm};
pub use shape::shape_features;

use serde::Serialize;

use crate::error::Error;
use crate::volume::QuantizedRoi;

pub const N_HISTOGRAM: usize = 6;
pub const N_GLCM: usize = 17;
pub const N_NGTDM: usize = 5;
pub const N_GLSZM: usize = 13;
/// Histogram + GLCM + NGTDM + GLSZM quantifiers applied per activation map.
pub const N_QUANTIFIERS: usize = N_HISTOGRAM + N_GLCM + N_NGTDM + N_GLSZM;
pub const N_SHAPE: usize = 4;
/// Quantifiers plus shape features: one modality's feature block.
pub const N_PER_MODALITY: usize = N_QUANTIFIERS + N_SHAPE;

/// Version tag written into every exported column manifest.
pub const FEATURE_MANIFEST_VERSION: &str = "drf-features/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureGroup {
    Histogram,
    Glcm,
    Ngtdm,
    Glszm,
    Shape,
}

const HISTOGRAM_NAMES: [&str; N_HISTOGRAM] =
    ["Mean", "Variance", "Skewness", "Kurtosis", "Energy", "Entropy"];

const GLCM_NAMES: [&str; N_GLCM] = [
    "Angular second moment-GLCM",
    "Contrast-GLCM",
    "Correlation-GLCM",
    "Sum of squares variance-GLCM",
    "Inverse difference moment-GLCM",
    "Sum average-GLCM",
    "Sum variance-GLCM",
    "Sum Entropy-GLCM",
    "Entropy-GLCM",
    "Difference Variance-GLCM",
    "Difference Entropy-GLCM",
    "Information Correlation 1-GLCM",
    "Information Correlation 2-GLCM",
    "Autocorrelation-GLCM",
    "Dissimilarity-GLCM",
    "Maximum Probability-GLCM",
    "Cluster Shade-GLCM",
];

const NGTDM_NAMES: [&str; N_NGTDM] = [
    "Coarseness-NGTDM",
    "Contrast-NGTDM",
    "Busyness-NGTDM",
    "Complexity-NGTDM",
    "Texture Strength-NGTDM",
];

const GLSZM_NAMES: [&str; N_GLSZM] = [
    "Small Zone Size Emphasis-GLSZM",
    "Large Zone Size Emphasis-GLSZM",
    "Gray-Level Non-Uniformity-GLSZM",
    "Zone Size Non-Uniformity-GLSZM",
    "Zone Size Percentage-GLSZM",
    "Low Gray-Level Zone Emphasis-GLSZM",
    "High Gray-Level Zone Emphasis-GLSZM",
    "Small Zone / Low Gray Emphasis-GLSZM",
    "Small Zone / High Gray Emphasis-GLSZM",
    "Large Zone / Low Gray Emphasis-GLSZM",
    "Large Zone / High Gray Emphasis-GLSZM",
    "Gray-Level Variance-GLSZM",
    "Zone Size Variance-GLSZM",
];

const SHAPE_NAMES: [&str; N_SHAPE] = ["Porosity", "Fraction Dimension", "Surface Area", "Volume"];

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FeatureInfo {
    pub name: &'static str,
    pub group: FeatureGroup,
    pub index: usize,
}

/// The canonical per-modality feature list: 41 quantifiers followed by the
/// 4 shape features.
pub fn feature_manifest() -> Vec<FeatureInfo> {
    let mut out = Vec::with_capacity(N_PER_MODALITY);
    let mut push = |names: &'static [&'static str], group: FeatureGroup, out: &mut Vec<FeatureInfo>| {
        for &name in names {
            let index = out.len();
            out.push(FeatureInfo { name, group, index });
        }
    };
    push(&HISTOGRAM_NAMES, FeatureGroup::Histogram, &mut out);
    push(&GLCM_NAMES, FeatureGroup::Glcm, &mut out);
    push(&NGTDM_NAMES, FeatureGroup::Ngtdm, &mut out);
    push(&GLSZM_NAMES, FeatureGroup::Glszm, &mut out);
    push(&SHAPE_NAMES, FeatureGroup::Shape, &mut out);
    out
}

/// Names of the 41 quantifiers, canonical order.
pub fn quantifier_names() -> Vec<&'static str> {
    feature_manifest()
        .iter()
        .take(N_QUANTIFIERS)
        .map(|f| f.name)
        .collect()
}

/// The 41 quantifier values for one quantized masked grid, canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantifierVector(pub [f64; N_QUANTIFIERS]);

impl QuantifierVector {
    pub fn values(&self) -> &[f64; N_QUANTIFIERS] {
        &self.0
    }
}

/// Offsets covering one of each of the 13 unique distance-1 3D directions
/// (half-space; the opposite directions are implied by symmetric
/// accumulation).
pub(crate) const DIRECTIONS_13: [[i64; 3]; 13] = [
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 1, 0],
    [1, -1, 0],
    [1, 0, 1],
    [1, 0, -1],
    [0, 1, 1],
    [0, 1, -1],
    [1, 1, 1],
    [1, 1, -1],
    [1, -1, 1],
    [1, -1, -1],
];

pub(crate) fn neighbors_26() -> Vec<[i64; 3]> {
    let mut out = Vec::with_capacity(26);
    for dz in -1i64..=1 {
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                if dx != 0 || dy != 0 || dz != 0 {
                    out.push([dx, dy, dz]);
                }
            }
        }
    }
    out
}

/// Cap applied to NGTDM coarseness when the deviation sum vanishes.
pub(crate) const COARSENESS_CAP: f64 = 1e12;
pub(crate) const EPS: f64 = 1e-12;

/// Compute all 41 quantifiers with the degeneracy conventions applied, so
/// the result is always finite and NaN-free.
///
/// A grid without co-occurring in-mask pairs (single isolated voxels) gets
/// the GLCM of a constant level-1 region; a grid where no voxel has an
/// in-mask neighbor gets the zero-deviation NGTDM.
pub fn quantifier_vector(q: &QuantizedRoi) -> crate::error::Result<QuantifierVector> {
    let hist = histogram_features(q)?;
    let glcm_vals = match compute_glcm(q) {
        Ok(g) => glcm_features(&g),
        Err(Error::DegenerateMatrix(_)) => glcm_features(&Glcm::constant_unit(q.levels)),
        Err(e) => return Err(e),
    };
    let ngtdm_vals = match compute_ngtdm(q) {
        Ok(n) => ngtdm_features(&n),
        Err(Error::DegenerateMatrix(_)) => ngtdm_features(&Ngtdm::zero_deviation(q)),
        Err(e) => return Err(e),
    };
    let z = compute_glszm(q)?;
    let glszm_vals = glszm_features(&z, q.in_mask_count());

    let mut out = [0f64; N_QUANTIFIERS];
    out[..N_HISTOGRAM].copy_from_slice(&hist);
    out[N_HISTOGRAM..N_HISTOGRAM + N_GLCM].copy_from_slice(&glcm_vals);
    let o = N_HISTOGRAM + N_GLCM;
    out[o..o + N_NGTDM].copy_from_slice(&ngtdm_vals);
    out[o + N_NGTDM..].copy_from_slice(&glszm_vals);
    Ok(QuantifierVector(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::{QuantizedRoi, RoiMask};

    pub(crate) fn quantized(dims: [usize; 3], levels: u32, data: Vec<u32>) -> QuantizedRoi {
        assert_eq!(data.len(), dims[0] * dims[1] * dims[2]);
        QuantizedRoi { dims, levels, data }
    }

    #[test]
    fn manifest_has_45_unique_names() {
        let manifest = feature_manifest();
        assert_eq!(manifest.len(), 45);
        let mut names: Vec<_> = manifest.iter().map(|f| f.name).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), 45);
        for (i, f) in manifest.iter().enumerate() {
            assert_eq!(f.index, i);
        }
    }

    #[test]
    fn quantifier_count_is_41() {
        assert_eq!(N_QUANTIFIERS, 41);
        assert_eq!(quantifier_names().len(), 41);
    }

    #[test]
    fn single_voxel_gets_convention_values() {
        let q = quantized([1, 1, 1], 32, vec![1]);
        let v = quantifier_vector(&q).unwrap();
        assert!(v.0.iter().all(|x| x.is_finite()));
        // Histogram of a one-voxel mask: mean 1, variance 0, energy 1.
        assert_eq!(v.0[0], 1.0);
        assert_eq!(v.0[1], 0.0);
        assert_eq!(v.0[4], 1.0);
        // Degenerate GLCM convention: max probability 1, contrast 0.
        assert_eq!(v.0[N_HISTOGRAM + 15], 1.0);
        assert_eq!(v.0[N_HISTOGRAM + 1], 0.0);
        // NGTDM convention: coarseness capped, contrast 0.
        assert_eq!(v.0[N_HISTOGRAM + N_GLCM], COARSENESS_CAP);
        assert_eq!(v.0[N_HISTOGRAM + N_GLCM + 1], 0.0);
    }

    #[test]
    fn all_values_finite_on_random_grids() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let dims = [6, 6, 6];
            let n = 216;
            let levels = rng.gen_range(2..=8);
            let mask: Vec<u8> = (0..n).map(|_| rng.gen_bool(0.6) as u8).collect();
            if !mask.iter().any(|&m| m == 1) {
                continue;
            }
            let data: Vec<u32> = mask
                .iter()
                .map(|&m| if m == 1 { rng.gen_range(1..=levels) } else { 0 })
                .collect();
            let q = quantized(dims, levels, data);
            let v = quantifier_vector(&q).unwrap();
            assert!(v.0.iter().all(|x| x.is_finite()), "non-finite value in {:?}", v.0);
            let _ = RoiMask::new(dims, mask).unwrap();
        }
    }
}
