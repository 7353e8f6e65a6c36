//! WAV reading and writing. Output is always 32-bit float, and hound writes
//! a fixed header, so equal signals give equal bytes.

use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};
use srir_core::geometry::FoaSignal;
use srir_core::{BinauralIr, MonoIr, MultichannelIr};

use crate::error::{Result, ToolError};

/// Deinterleaved channels and the sample rate.
pub fn read_channels(path: &Path) -> Result<(Vec<Vec<f64>>, u32)> {
    let mut reader = WavReader::open(path).map_err(|e| ToolError::file(path, e))?;
    let spec = reader.spec();
    let n = spec.channels as usize;
    if n == 0 {
        return Err(ToolError::file(path, "WAV has no channels"));
    }
    let samples: Vec<f64> = match spec.sample_format {
        SampleFormat::Float => reader
            .samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| ToolError::file(path, e))?,
        SampleFormat::Int => {
            let scale = 1.0 / (1u64 << (spec.bits_per_sample - 1)) as f64;
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| v as f64 * scale))
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| ToolError::file(path, e))?
        }
    };
    let mut channels = vec![Vec::with_capacity(samples.len() / n); n];
    for (i, v) in samples.into_iter().enumerate() {
        channels[i % n].push(v);
    }
    Ok((channels, spec.sample_rate))
}

pub fn write_channels(path: &Path, channels: &[&[f64]], sample_rate: u32) -> Result<()> {
    if channels.is_empty() || channels.len() > u16::MAX as usize {
        return Err(ToolError::file(path, "channel count out of range"));
    }
    let len = channels[0].len();
    if channels.iter().any(|c| c.len() != len) {
        return Err(ToolError::file(path, "channels differ in length"));
    }
    let spec = WavSpec { channels: channels.len() as u16, sample_rate, bits_per_sample: 32, sample_format: SampleFormat::Float };
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| ToolError::io(dir, e))?;
    }
    let mut w = WavWriter::create(path, spec).map_err(|e| ToolError::file(path, e))?;
    for n in 0..len {
        for c in channels {
            w.write_sample(c[n] as f32).map_err(|e| ToolError::file(path, e))?;
        }
    }
    w.finalize().map_err(|e| ToolError::file(path, e))
}

fn monos(path: &Path) -> Result<Vec<MonoIr>> {
    let (channels, fs) = read_channels(path)?;
    channels.into_iter().map(|c| MonoIr::new(c, fs).map_err(|e| ToolError::file(path, e))).collect()
}

pub fn read_mono(path: &Path) -> Result<MonoIr> {
    let mut c = monos(path)?;
    if c.len() != 1 {
        return Err(ToolError::file(path, format!("expected 1 channel, found {}", c.len())));
    }
    Ok(c.remove(0))
}

pub fn read_binaural(path: &Path) -> Result<BinauralIr> {
    let c = monos(path)?;
    if c.len() != 2 {
        return Err(ToolError::file(path, format!("expected 2 channels, found {}", c.len())));
    }
    let mut it = c.into_iter();
    BinauralIr::new(it.next().unwrap(), it.next().unwrap()).map_err(|e| ToolError::file(path, e))
}

pub fn read_multichannel(path: &Path, geometry_id: Option<String>) -> Result<MultichannelIr> {
    MultichannelIr::new(monos(path)?, geometry_id).map_err(|e| ToolError::file(path, e))
}

/// Channel order W, X, Y, Z.
pub fn read_foa(path: &Path) -> Result<FoaSignal> {
    FoaSignal::from_multichannel(&read_multichannel(path, None)?).map_err(|e| ToolError::file(path, e))
}

pub fn write_mono(path: &Path, ir: &MonoIr) -> Result<()> {
    write_channels(path, &[ir.samples()], ir.sample_rate())
}

pub fn write_binaural(path: &Path, ir: &BinauralIr) -> Result<()> {
    write_channels(path, &[ir.left().samples(), ir.right().samples()], ir.sample_rate())
}

pub fn write_multichannel(path: &Path, ir: &MultichannelIr) -> Result<()> {
    let ch: Vec<&[f64]> = ir.channels().iter().map(|c| c.samples()).collect();
    write_channels(path, &ch, ir.sample_rate())
}

pub fn write_foa(path: &Path, foa: &FoaSignal) -> Result<()> {
    let ch: Vec<&[f64]> = foa.components().iter().map(|c| c.samples()).collect();
    write_channels(path, &ch, foa.sample_rate())
}
