//! Minimal NIfTI-1 reader/writer.
//!
//! Supported subset: single-file (`n+1`) little-endian volumes with
//! datatype uint8 (2), int16 (4) or float32 (16), optionally gzipped.
//! `scl_slope`/`scl_inter` are applied when the slope is nonzero and
//! `vox_offset` is respected. Everything else (two-file pairs, big-endian,
//! other dtypes) is routed through the raw+JSON sidecar format instead.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;

use super::{Dims, Volume};
use crate::error::{Error, Result};

const HEADER_SIZE: usize = 348;
const MAGIC_SINGLE: &[u8; 4] = b"n+1\0";

const DT_UINT8: i16 = 2;
const DT_INT16: i16 = 4;
const DT_FLOAT32: i16 = 16;

fn read_i16(buf: &[u8], off: usize) -> i16 {
    i16::from_le_bytes([buf[off], buf[off + 1]])
}

fn read_i32(buf: &[u8], off: usize) -> i32 {
    i32::from_le_bytes([buf[off], buf[off + 1], buf[off + 2], buf[off + 3]])
}

fn read_f32(buf: &[u8], off: usize) -> f32 {
    f32::from_le_bytes([buf[off], buf[off + 1], buf[off + 2], buf[off + 3]])
}

fn read_all(path: &Path) -> Result<Vec<u8>> {
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut head = [0u8; 2];
    let n = file.read(&mut head).map_err(|e| Error::io(path, e))?;
    let mut bytes = Vec::new();
    if n == 2 && head == [0x1f, 0x8b] {
        let raw = {
            let mut raw = head.to_vec();
            file.read_to_end(&mut raw).map_err(|e| Error::io(path, e))?;
            raw
        };
        GzDecoder::new(&raw[..])
            .read_to_end(&mut bytes)
            .map_err(|e| Error::Corrupt(format!("{}: bad gzip stream: {e}", path.display())))?;
    } else {
        bytes.extend_from_slice(&head[..n]);
        file.read_to_end(&mut bytes).map_err(|e| Error::io(path, e))?;
    }
    Ok(bytes)
}

pub fn load_nifti(path: &Path) -> Result<Volume> {
    let bytes = read_all(path)?;
    if bytes.len() < HEADER_SIZE {
        return Err(Error::Corrupt(format!(
            "{}: file shorter than the 348-byte NIfTI-1 header",
            path.display()
        )));
    }
    if read_i32(&bytes, 0) != HEADER_SIZE as i32 {
        return Err(Error::Corrupt(format!(
            "{}: sizeof_hdr != 348; not a little-endian NIfTI-1 file",
            path.display()
        )));
    }
    let magic = &bytes[344..348];
    if magic != MAGIC_SINGLE {
        return Err(Error::Format(format!(
            "{}: unsupported magic {:?} (only single-file \"n+1\" accepted)",
            path.display(),
            magic
        )));
    }

    let ndim = read_i16(&bytes, 40);
    if !(1..=7).contains(&ndim) {
        return Err(Error::Corrupt(format!("{}: dim[0] = {ndim} out of range", path.display())));
    }
    let mut dim = [1i16; 7];
    for (i, d) in dim.iter_mut().enumerate() {
        if (i as i16) < ndim {
            *d = read_i16(&bytes, 40 + 2 * (i + 1));
        }
    }
    if dim.iter().take(3).any(|&d| d < 1) || dim.iter().skip(3).any(|&d| d > 1) {
        return Err(Error::Format(format!(
            "{}: only 3D volumes are supported, dim = {dim:?}",
            path.display()
        )));
    }
    let dims: Dims = [dim[0] as usize, dim[1] as usize, dim[2] as usize];

    let datatype = read_i16(&bytes, 70);
    let bitpix = read_i16(&bytes, 72);
    let bytes_per_voxel = match datatype {
        DT_UINT8 => 1usize,
        DT_INT16 => 2,
        DT_FLOAT32 => 4,
        other => {
            return Err(Error::Format(format!(
                "{}: unsupported NIfTI datatype {other}",
                path.display()
            )))
        }
    };
    if bitpix as usize != bytes_per_voxel * 8 {
        return Err(Error::Corrupt(format!(
            "{}: bitpix {bitpix} inconsistent with datatype {datatype}",
            path.display()
        )));
    }

    let mut spacing = [0f64; 3];
    for (i, s) in spacing.iter_mut().enumerate() {
        *s = read_f32(&bytes, 76 + 4 * (i + 1)) as f64;
        if !(*s > 0.0) {
            return Err(Error::Corrupt(format!(
                "{}: pixdim[{}] = {s} must be > 0",
                path.display(),
                i + 1
            )));
        }
    }

    let vox_offset = read_f32(&bytes, 108);
    if vox_offset < HEADER_SIZE as f32 || vox_offset.fract() != 0.0 {
        return Err(Error::Corrupt(format!(
            "{}: invalid vox_offset {vox_offset}",
            path.display()
        )));
    }
    let offset = vox_offset as usize;
    let scl_slope = read_f32(&bytes, 112);
    let scl_inter = read_f32(&bytes, 116);

    let n = dims[0] * dims[1] * dims[2];
    let need = offset + n * bytes_per_voxel;
    if bytes.len() < need {
        return Err(Error::Corrupt(format!(
            "{}: declared {n} voxels of {bytes_per_voxel} byte(s) at offset {offset} but file has {} bytes",
            path.display(),
            bytes.len()
        )));
    }

    let payload = &bytes[offset..need];
    let mut data = Vec::with_capacity(n);
    match datatype {
        DT_UINT8 => data.extend(payload.iter().map(|&b| b as f32)),
        DT_INT16 => data.extend(
            payload
                .chunks_exact(2)
                .map(|c| i16::from_le_bytes([c[0], c[1]]) as f32),
        ),
        DT_FLOAT32 => data.extend(
            payload
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]])),
        ),
        _ => unreachable!(),
    }
    if scl_slope != 0.0 {
        for v in &mut data {
            *v = scl_slope * *v + scl_inter;
        }
    }
    Volume::new(dims, spacing, data)
}

/// Voxel payload accepted by [`write_nifti`].
pub enum NiftiData<'a> {
    F32(&'a [f32]),
    U8(&'a [u8]),
}

/// Write a single-file little-endian NIfTI-1 volume (no scaling, data at
/// offset 352).
pub fn write_nifti(path: &Path, dims: Dims, spacing: [f64; 3], data: NiftiData<'_>) -> Result<()> {
    let n = dims[0] * dims[1] * dims[2];
    let (datatype, bitpix, len) = match &data {
        NiftiData::F32(d) => (DT_FLOAT32, 32i16, d.len()),
        NiftiData::U8(d) => (DT_UINT8, 8i16, d.len()),
    };
    if len != n {
        return Err(Error::Corrupt(format!(
            "payload length {len} does not match dims {dims:?}"
        )));
    }
    let mut header = vec![0u8; HEADER_SIZE + 4];
    header[0..4].copy_from_slice(&(HEADER_SIZE as i32).to_le_bytes());
    header[40..42].copy_from_slice(&3i16.to_le_bytes());
    for i in 0..3 {
        header[42 + 2 * i..44 + 2 * i].copy_from_slice(&(dims[i] as i16).to_le_bytes());
        let off = 80 + 4 * i;
        header[off..off + 4].copy_from_slice(&(spacing[i] as f32).to_le_bytes());
    }
    for i in 3..7 {
        header[42 + 2 * i..44 + 2 * i].copy_from_slice(&1i16.to_le_bytes());
    }
    header[70..72].copy_from_slice(&datatype.to_le_bytes());
    header[72..74].copy_from_slice(&bitpix.to_le_bytes());
    header[76..80].copy_from_slice(&1f32.to_le_bytes());
    header[108..112].copy_from_slice(&352f32.to_le_bytes());
    header[344..348].copy_from_slice(MAGIC_SINGLE);
    let mut file = File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&header).map_err(|e| Error::io(path, e))?;
    match data {
        NiftiData::F32(d) => {
            let mut buf = Vec::with_capacity(d.len() * 4);
            for v in d {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            file.write_all(&buf).map_err(|e| Error::io(path, e))?;
        }
        NiftiData::U8(d) => file.write_all(d).map_err(|e| Error::io(path, e))?,
    }
    Ok(())
}
