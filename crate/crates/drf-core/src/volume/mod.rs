//! 3D medical volumes: loading, resampling, normalization, masking and
//! gray-level quantization.
//!
//! Voxel data is stored in x-fastest order (`idx = x + nx*(y + ny*z)`) and
//! voxel `i` along an axis with spacing `s` is centered at physical
//! coordinate `(i + 0.5) * s`. All resampling follows that convention.

mod nifti;
mod raw;

pub use nifti::write_nifti;

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// MRI sequence identity, in the fixed pipeline order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Modality {
    T1wi,
    T1ce,
    T2wi,
    Flair,
}

impl Modality {
    pub const ALL: [Modality; 4] = [Modality::T1wi, Modality::T1ce, Modality::T2wi, Modality::Flair];

    /// Column-name prefix used for this modality's feature block.
    pub fn prefix(&self) -> &'static str {
        match self {
            Modality::T1wi => "T1-WI",
            Modality::T1ce => "T1-CE",
            Modality::T2wi => "T2-WI",
            Modality::Flair => "FLAIR",
        }
    }

    /// Lower-case key used in manifests and CLI flags.
    pub fn key(&self) -> &'static str {
        match self {
            Modality::T1wi => "t1wi",
            Modality::T1ce => "t1ce",
            Modality::T2wi => "t2wi",
            Modality::Flair => "flair",
        }
    }

    pub fn parse(s: &str) -> Option<Modality> {
        match s.to_ascii_lowercase().as_str() {
            "t1wi" | "t1-wi" => Some(Modality::T1wi),
            "t1ce" | "t1-ce" => Some(Modality::T1ce),
            "t2wi" | "t2-wi" => Some(Modality::T2wi),
            "flair" => Some(Modality::Flair),
            _ => None,
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Voxel counts per axis.
pub type Dims = [usize; 3];

/// mm per voxel per axis.
pub type Spacing = [f64; 3];

#[inline]
pub fn voxel_count(dims: Dims) -> usize {
    dims[0] * dims[1] * dims[2]
}

#[inline]
pub fn voxel_index(dims: Dims, x: usize, y: usize, z: usize) -> usize {
    x + dims[0] * (y + dims[1] * z)
}

/// A scalar 3D grid with anisotropic spacing metadata.
#[derive(Debug, Clone)]
pub struct Volume {
    pub dims: Dims,
    pub spacing: Spacing,
    pub data: Vec<f32>,
    pub modality: Option<Modality>,
}

impl Volume {
    pub fn new(dims: Dims, spacing: Spacing, data: Vec<f32>) -> Result<Volume> {
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::Corrupt(format!("volume dims must be >= 1, got {dims:?}")));
        }
        if spacing.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::Corrupt(format!("volume spacing must be > 0, got {spacing:?}")));
        }
        if data.len() != voxel_count(dims) {
            return Err(Error::Corrupt(format!(
                "data length {} does not match dims {:?} ({} voxels)",
                data.len(),
                dims,
                voxel_count(dims)
            )));
        }
        Ok(Volume {
            dims,
            spacing,
            data,
            modality: None,
        })
    }

    pub fn with_modality(mut self, modality: Modality) -> Volume {
        self.modality = Some(modality);
        self
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize, z: usize) -> f32 {
        self.data[voxel_index(self.dims, x, y, z)]
    }
}

/// Binary ROI mask aligned to a companion [`Volume`].
#[derive(Debug, Clone)]
pub struct RoiMask {
    pub dims: Dims,
    pub data: Vec<u8>,
}

impl RoiMask {
    pub fn new(dims: Dims, data: Vec<u8>) -> Result<RoiMask> {
        if data.len() != voxel_count(dims) {
            return Err(Error::Corrupt(format!(
                "mask length {} does not match dims {:?}",
                data.len(),
                dims
            )));
        }
        if data.iter().any(|&v| v > 1) {
            return Err(Error::Corrupt("mask values must be 0 or 1".into()));
        }
        Ok(RoiMask { dims, data })
    }

    /// Threshold an arbitrary scalar grid at > 0.5 into a binary mask.
    pub fn from_scalars(dims: Dims, values: &[f32]) -> Result<RoiMask> {
        let data = values.iter().map(|&v| u8::from(v > 0.5)).collect();
        RoiMask::new(dims, data)
    }

    pub fn foreground_count(&self) -> usize {
        self.data.iter().filter(|&&v| v == 1).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.data.iter().any(|&v| v == 1)
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize, z: usize) -> bool {
        self.data[voxel_index(self.dims, x, y, z)] == 1
    }
}

/// A masked grid quantized to `levels` gray levels: 0 outside the mask,
/// 1..=levels inside.
#[derive(Debug, Clone)]
pub struct QuantizedRoi {
    pub dims: Dims,
    pub levels: u32,
    pub data: Vec<u32>,
}

impl QuantizedRoi {
    #[inline]
    pub fn at(&self, x: usize, y: usize, z: usize) -> u32 {
        self.data[voxel_index(self.dims, x, y, z)]
    }

    pub fn in_mask_count(&self) -> usize {
        self.data.iter().filter(|&&v| v > 0).count()
    }
}

/// Supported on-disk volume encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeFormat {
    /// Decide from the file extension: `.nii`/`.nii.gz` vs `.raw`.
    Auto,
    /// NIfTI-1 single-file, little-endian, optionally gzipped.
    Nifti,
    /// Raw voxel blob with a JSON sidecar describing dims/spacing/dtype.
    RawJson,
}

/// Load a volume from disk.
pub fn load_volume(path: &Path, format: VolumeFormat) -> Result<Volume> {
    let format = match format {
        VolumeFormat::Auto => {
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
            if name.ends_with(".nii") || name.ends_with(".nii.gz") {
                VolumeFormat::Nifti
            } else if name.ends_with(".raw") {
                VolumeFormat::RawJson
            } else {
                return Err(Error::Format(format!(
                    "cannot infer volume format from {}",
                    path.display()
                )));
            }
        }
        other => other,
    };
    match format {
        VolumeFormat::Nifti => nifti::load_nifti(path),
        VolumeFormat::RawJson => raw::load_raw(path),
        VolumeFormat::Auto => unreachable!(),
    }
}

/// Load a binary mask stored in any supported volume format.
pub fn load_mask(path: &Path, format: VolumeFormat) -> Result<RoiMask> {
    let v = load_volume(path, format)?;
    RoiMask::from_scalars(v.dims, &v.data)
}

fn output_dim(n: usize, spacing: f64, target: f64) -> usize {
    ((n as f64 * spacing / target).round() as usize).max(1)
}

/// Continuous source index for output voxel `j`, voxel-center convention.
#[inline]
fn source_coord(j: usize, scale: f64) -> f64 {
    (j as f64 + 0.5) * scale - 0.5
}

fn sample_trilinear(data: &[f32], dims: Dims, u: f64, v: f64, w: f64) -> f64 {
    let clampf = |c: f64, n: usize| c.max(0.0).min((n - 1) as f64);
    let (u, v, w) = (clampf(u, dims[0]), clampf(v, dims[1]), clampf(w, dims[2]));
    let (x0, y0, z0) = (u.floor() as usize, v.floor() as usize, w.floor() as usize);
    let (x1, y1, z1) = (
        (x0 + 1).min(dims[0] - 1),
        (y0 + 1).min(dims[1] - 1),
        (z0 + 1).min(dims[2] - 1),
    );
    let (fx, fy, fz) = (u - x0 as f64, v - y0 as f64, w - z0 as f64);
    let g = |x: usize, y: usize, z: usize| data[voxel_index(dims, x, y, z)] as f64;
    let lerp = |a: f64, b: f64, t: f64| a + (b - a) * t;
    let c00 = lerp(g(x0, y0, z0), g(x1, y0, z0), fx);
    let c10 = lerp(g(x0, y1, z0), g(x1, y1, z0), fx);
    let c01 = lerp(g(x0, y0, z1), g(x1, y0, z1), fx);
    let c11 = lerp(g(x0, y1, z1), g(x1, y1, z1), fx);
    lerp(lerp(c00, c10, fy), lerp(c01, c11, fy), fz)
}

#[inline]
fn nearest_index(c: f64, n: usize) -> usize {
    (c.round().max(0.0) as usize).min(n - 1)
}

/// Resample a volume and its mask to isotropic `target` mm spacing.
///
/// The volume is interpolated trilinearly and the mask by nearest neighbor,
/// so mask binarity is preserved. Output dims are
/// `round(dim * spacing / target)` floored at 1.
pub fn resample_isotropic(v: &Volume, m: &RoiMask, target: f64) -> Result<(Volume, RoiMask)> {
    if !(target > 0.0) {
        return Err(Error::Config(format!("resample target must be > 0, got {target}")));
    }
    if m.dims != v.dims {
        return Err(Error::Corrupt(format!(
            "mask dims {:?} do not match volume dims {:?}",
            m.dims, v.dims
        )));
    }
    let out_dims = [
        output_dim(v.dims[0], v.spacing[0], target),
        output_dim(v.dims[1], v.spacing[1], target),
        output_dim(v.dims[2], v.spacing[2], target),
    ];
    let scale = [
        target / v.spacing[0],
        target / v.spacing[1],
        target / v.spacing[2],
    ];
    let mut out = vec![0f32; voxel_count(out_dims)];
    let mut out_mask = vec![0u8; voxel_count(out_dims)];
    for z in 0..out_dims[2] {
        let w = source_coord(z, scale[2]);
        let zn = nearest_index(w, v.dims[2]);
        for y in 0..out_dims[1] {
            let vj = source_coord(y, scale[1]);
            let yn = nearest_index(vj, v.dims[1]);
            for x in 0..out_dims[0] {
                let u = source_coord(x, scale[0]);
                let o = voxel_index(out_dims, x, y, z);
                out[o] = sample_trilinear(&v.data, v.dims, u, vj, w) as f32;
                out_mask[o] = m.data[voxel_index(v.dims, nearest_index(u, v.dims[0]), yn, zn)];
            }
        }
    }
    let vol = Volume {
        dims: out_dims,
        spacing: [target; 3],
        data: out,
        modality: v.modality,
    };
    Ok((vol, RoiMask { dims: out_dims, data: out_mask }))
}

/// Resample a standalone scalar grid by pure index scaling (no spacing),
/// trilinear. Used to bring ROI cubes to the CNN input size.
pub(crate) fn rescale_grid_trilinear(data: &[f32], dims: Dims, out_dims: Dims) -> Vec<f32> {
    let scale = [
        dims[0] as f64 / out_dims[0] as f64,
        dims[1] as f64 / out_dims[1] as f64,
        dims[2] as f64 / out_dims[2] as f64,
    ];
    let mut out = vec![0f32; voxel_count(out_dims)];
    for z in 0..out_dims[2] {
        let w = source_coord(z, scale[2]);
        for y in 0..out_dims[1] {
            let v = source_coord(y, scale[1]);
            for x in 0..out_dims[0] {
                let u = source_coord(x, scale[0]);
                out[voxel_index(out_dims, x, y, z)] = sample_trilinear(data, dims, u, v, w) as f32;
            }
        }
    }
    out
}

/// Nearest-neighbor counterpart of [`rescale_grid_trilinear`] for masks.
pub(crate) fn rescale_grid_nearest(data: &[u8], dims: Dims, out_dims: Dims) -> Vec<u8> {
    let scale = [
        dims[0] as f64 / out_dims[0] as f64,
        dims[1] as f64 / out_dims[1] as f64,
        dims[2] as f64 / out_dims[2] as f64,
    ];
    let mut out = vec![0u8; voxel_count(out_dims)];
    for z in 0..out_dims[2] {
        let zn = nearest_index(source_coord(z, scale[2]), dims[2]);
        for y in 0..out_dims[1] {
            let yn = nearest_index(source_coord(y, scale[1]), dims[1]);
            for x in 0..out_dims[0] {
                let xn = nearest_index(source_coord(x, scale[0]), dims[0]);
                out[voxel_index(out_dims, x, y, z)] = data[voxel_index(dims, xn, yn, zn)];
            }
        }
    }
    out
}

/// Rescale intensities affinely onto [0, 1]: min -> 0, max -> 1.
pub fn normalize_unit(v: &Volume) -> Result<Volume> {
    let mut lo = f32::INFINITY;
    let mut hi = f32::NEG_INFINITY;
    for &x in &v.data {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    if !(hi > lo) {
        return Err(Error::DegenerateVolume);
    }
    let range = hi - lo;
    let data = v.data.iter().map(|&x| (x - lo) / range).collect();
    Ok(Volume {
        dims: v.dims,
        spacing: v.spacing,
        data,
        modality: v.modality,
    })
}

/// Uniformly quantize the in-mask intensity range of `data` to
/// `1..=levels`; voxels outside the mask map to 0.
///
/// Bin edges come from the in-mask min/max only. A constant in-mask region
/// maps every voxel to level 1.
pub fn quantize_slice(data: &[f32], mask: &RoiMask, levels: u32) -> Result<QuantizedRoi> {
    if levels < 2 {
        return Err(Error::Config(format!("quantization needs >= 2 levels, got {levels}")));
    }
    if mask.is_empty() {
        return Err(Error::EmptyRoi);
    }
    debug_assert_eq!(data.len(), mask.data.len());
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (x, &m) in data.iter().zip(&mask.data) {
        if m == 1 {
            let x = *x as f64;
            lo = lo.min(x);
            hi = hi.max(x);
        }
    }
    let range = hi - lo;
    let out = data
        .iter()
        .zip(&mask.data)
        .map(|(&x, &m)| {
            if m == 0 {
                0
            } else if range > 0.0 {
                let bin = 1 + (levels as f64 * ((x as f64 - lo) / range)).floor() as u32;
                bin.min(levels)
            } else {
                1
            }
        })
        .collect();
    Ok(QuantizedRoi {
        dims: mask.dims,
        levels,
        data: out,
    })
}

/// Quantize a volume's in-mask intensities to `levels` gray levels.
pub fn quantize(v: &Volume, m: &RoiMask, levels: u32) -> Result<QuantizedRoi> {
    if m.dims != v.dims {
        return Err(Error::Corrupt(format!(
            "mask dims {:?} do not match volume dims {:?}",
            m.dims, v.dims
        )));
    }
    quantize_slice(&v.data, m, levels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube_mask(dims: Dims) -> RoiMask {
        RoiMask::new(dims, vec![1; voxel_count(dims)]).unwrap()
    }

    #[test]
    fn normalize_affine_map() {
        let v = Volume::new([3, 1, 1], [1.0; 3], vec![0.0, 5.0, 10.0]).unwrap();
        let n = normalize_unit(&v).unwrap();
        assert_eq!(n.data, vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn normalize_two_values() {
        let v = Volume::new([2, 1, 1], [1.0; 3], vec![-2.0, 2.0]).unwrap();
        let n = normalize_unit(&v).unwrap();
        assert_eq!(n.data, vec![0.0, 1.0]);
    }

    #[test]
    fn normalize_constant_volume_fails() {
        let v = Volume::new([2, 2, 1], [1.0; 3], vec![3.0; 4]).unwrap();
        assert!(matches!(normalize_unit(&v), Err(Error::DegenerateVolume)));
    }

    #[test]
    fn normalize_is_idempotent() {
        let v = Volume::new([4, 1, 1], [1.0; 3], vec![1.0, 4.0, 2.0, 9.0]).unwrap();
        let once = normalize_unit(&v).unwrap();
        let twice = normalize_unit(&once).unwrap();
        assert_eq!(once.data, twice.data);
    }

    #[test]
    fn quantize_two_bins() {
        let v = Volume::new([2, 1, 1], [1.0; 3], vec![0.0, 1.0]).unwrap();
        let q = quantize(&v, &cube_mask([2, 1, 1]), 2).unwrap();
        assert_eq!(q.data, vec![1, 2]);
    }

    #[test]
    fn quantize_integer_levels_align_with_bins() {
        let data: Vec<f32> = (0..32).map(|i| i as f32).collect();
        let v = Volume::new([32, 1, 1], [1.0; 3], data).unwrap();
        let q = quantize(&v, &cube_mask([32, 1, 1]), 32).unwrap();
        for (i, &qv) in q.data.iter().enumerate() {
            assert_eq!(qv, i as u32 + 1);
        }
    }

    #[test]
    fn quantize_binning_formula() {
        let v = Volume::new([4, 1, 1], [1.0; 3], vec![0.0, 0.49, 0.51, 1.0]).unwrap();
        let q = quantize(&v, &cube_mask([4, 1, 1]), 2).unwrap();
        assert_eq!(q.data, vec![1, 1, 2, 2]);
    }

    #[test]
    fn quantize_constant_region_maps_to_one() {
        let v = Volume::new([2, 2, 1], [1.0; 3], vec![7.0; 4]).unwrap();
        let q = quantize(&v, &cube_mask([2, 2, 1]), 32).unwrap();
        assert!(q.data.iter().all(|&x| x == 1));
    }

    #[test]
    fn quantize_empty_mask_fails() {
        let v = Volume::new([2, 2, 1], [1.0; 3], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let m = RoiMask::new([2, 2, 1], vec![0; 4]).unwrap();
        assert!(matches!(quantize(&v, &m, 32), Err(Error::EmptyRoi)));
    }

    #[test]
    fn quantize_ignores_out_of_mask_range() {
        // Out-of-mask extremes must not stretch the bin range.
        let v = Volume::new([4, 1, 1], [1.0; 3], vec![-100.0, 0.0, 1.0, 100.0]).unwrap();
        let m = RoiMask::new([4, 1, 1], vec![0, 1, 1, 0]).unwrap();
        let q = quantize(&v, &m, 2).unwrap();
        assert_eq!(q.data, vec![0, 1, 2, 0]);
    }

    #[test]
    fn resample_identity_spacing() {
        let data: Vec<f32> = (0..27).map(|i| i as f32).collect();
        let v = Volume::new([3, 3, 3], [1.0; 3], data.clone()).unwrap();
        let m = cube_mask([3, 3, 3]);
        let (rv, rm) = resample_isotropic(&v, &m, 1.0).unwrap();
        assert_eq!(rv.dims, [3, 3, 3]);
        for (a, b) in rv.data.iter().zip(&data) {
            assert!((a - b).abs() < 1e-6);
        }
        assert_eq!(rm.data, m.data);
    }

    #[test]
    fn resample_constant_anisotropic() {
        let v = Volume::new([8, 8, 4], [0.5, 0.5, 2.0], vec![3.5; 256]).unwrap();
        let m = cube_mask([8, 8, 4]);
        let (rv, rm) = resample_isotropic(&v, &m, 1.0).unwrap();
        assert_eq!(rv.dims, [4, 4, 8]);
        assert!(rv.data.iter().all(|&x| (x - 3.5).abs() < 1e-6));
        assert!(rm.data.iter().all(|&x| x == 1));
    }

    #[test]
    fn resample_linear_ramp_matches_analytic() {
        // Value at each voxel = physical x of its center ((i + 0.5) * 2 mm).
        let dims = [10, 3, 3];
        let mut data = vec![0f32; voxel_count(dims)];
        for z in 0..3 {
            for y in 0..3 {
                for x in 0..10 {
                    data[voxel_index(dims, x, y, z)] = (x as f32 + 0.5) * 2.0;
                }
            }
        }
        let v = Volume::new(dims, [2.0, 1.0, 1.0], data).unwrap();
        let (rv, _) = resample_isotropic(&v, &cube_mask(dims), 1.0).unwrap();
        assert_eq!(rv.dims, [20, 3, 3]);
        // Interior samples only: the half-voxel margin at each end clamps.
        for x in 1..19 {
            let got = rv.at(x, 1, 1) as f64;
            let want = (x as f64 + 0.5) * 1.0;
            assert!((got - want).abs() < 1e-6, "x={x}: got {got}, want {want}");
        }
    }

    #[test]
    fn resample_mask_stays_binary() {
        let dims = [5, 4, 3];
        let data: Vec<f32> = (0..voxel_count(dims)).map(|i| (i % 7) as f32).collect();
        let v = Volume::new(dims, [0.7, 1.3, 2.1], data).unwrap();
        let mask_data: Vec<u8> = (0..voxel_count(dims)).map(|i| (i % 3 == 0) as u8).collect();
        let m = RoiMask::new(dims, mask_data).unwrap();
        let (_, rm) = resample_isotropic(&v, &m, 1.0).unwrap();
        assert!(rm.data.iter().all(|&x| x <= 1));
    }

    #[test]
    fn quantize_monotone_in_intensity() {
        let data = vec![0.1f32, 0.9, 0.3, 0.25, 0.8, 0.5, 0.77, 0.02];
        let v = Volume::new([8, 1, 1], [1.0; 3], data.clone()).unwrap();
        let q = quantize(&v, &cube_mask([8, 1, 1]), 5).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                if data[i] <= data[j] {
                    assert!(q.data[i] <= q.data[j]);
                }
            }
        }
        assert_eq!(*q.data.iter().min().unwrap(), 1);
        assert_eq!(*q.data.iter().max().unwrap(), 5);
    }
}
