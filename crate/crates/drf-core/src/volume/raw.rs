//! Raw voxel blobs with a JSON sidecar.
//!
//! `volume.raw` pairs with `volume.json`:
//! `{"dims":[nx,ny,nz], "spacing":[sx,sy,sz], "dtype":"f32|i16|u8", "order":"x-fastest"}`.

use std::path::Path;

use serde::Deserialize;

use super::Volume;
use crate::error::{Error, Result};

#[derive(Debug, Deserialize)]
struct Sidecar {
    dims: [usize; 3],
    spacing: [f64; 3],
    dtype: String,
    order: String,
}

pub fn load_raw(path: &Path) -> Result<Volume> {
    let sidecar_path = path.with_extension("json");
    let text = std::fs::read_to_string(&sidecar_path).map_err(|e| Error::io(&sidecar_path, e))?;
    let sc: Sidecar = serde_json::from_str(&text)
        .map_err(|e| Error::Corrupt(format!("{}: bad sidecar: {e}", sidecar_path.display())))?;
    if sc.order != "x-fastest" {
        return Err(Error::Format(format!(
            "{}: unsupported voxel order {:?}",
            sidecar_path.display(),
            sc.order
        )));
    }
    let bytes_per_voxel = match sc.dtype.as_str() {
        "u8" => 1usize,
        "i16" => 2,
        "f32" => 4,
        other => {
            return Err(Error::Format(format!(
                "{}: unsupported dtype {other:?}",
                sidecar_path.display()
            )))
        }
    };
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let n = sc.dims[0] * sc.dims[1] * sc.dims[2];
    if bytes.len() != n * bytes_per_voxel {
        return Err(Error::Corrupt(format!(
            "{}: {} bytes but dims {:?} with dtype {} need {}",
            path.display(),
            bytes.len(),
            sc.dims,
            sc.dtype,
            n * bytes_per_voxel
        )));
    }
    let data: Vec<f32> = match sc.dtype.as_str() {
        "u8" => bytes.iter().map(|&b| b as f32).collect(),
        "i16" => bytes
            .chunks_exact(2)
            .map(|c| i16::from_le_bytes([c[0], c[1]]) as f32)
            .collect(),
        "f32" => bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect(),
        _ => unreachable!(),
    };
    Volume::new(sc.dims, sc.spacing, data)
}
