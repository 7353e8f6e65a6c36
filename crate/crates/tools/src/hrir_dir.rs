//! HRIR sets stored as a directory of stereo WAVs with an `index.csv`
//! listing `azimuth_deg,elevation_deg,file`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use srir_core::geometry::HrirSet;
use srir_core::math::Vec3;

use crate::error::{Result, ToolError};
use crate::wav::{read_binaural, write_binaural};

pub const INDEX_FILE: &str = "index.csv";

#[derive(Debug, Serialize, Deserialize)]
struct IndexRow {
    azimuth_deg: f64,
    elevation_deg: f64,
    file: String,
}

pub fn read_hrir_dir(dir: &Path) -> Result<HrirSet> {
    let index = dir.join(INDEX_FILE);
    if !index.is_file() {
        return Err(ToolError::config(format!("HRIR directory {} has no {INDEX_FILE}", dir.display())));
    }
    let mut reader = csv::Reader::from_path(&index).map_err(|e| ToolError::file(&index, e))?;
    let (mut dirs, mut pairs) = (Vec::new(), Vec::new());
    for row in reader.deserialize::<IndexRow>() {
        let row = row.map_err(|e| ToolError::file(&index, e))?;
        dirs.push(Vec3::from_az_el_deg(row.azimuth_deg, row.elevation_deg));
        pairs.push(read_binaural(&dir.join(&row.file))?);
    }
    HrirSet::new(dirs, pairs).map_err(|e| ToolError::file(&index, e))
}

pub fn write_hrir_dir(dir: &Path, set: &HrirSet) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| ToolError::io(dir, e))?;
    let index = dir.join(INDEX_FILE);
    let mut w = csv::Writer::from_path(&index).map_err(|e| ToolError::file(&index, e))?;
    for (i, (d, pair)) in set.directions().iter().zip(set.pairs()).enumerate() {
        let file = format!("hrir_{i:04}.wav");
        write_binaural(&dir.join(&file), pair)?;
        let (azimuth_deg, elevation_deg) = d.to_az_el_deg();
        w.serialize(IndexRow { azimuth_deg, elevation_deg, file }).map_err(|e| ToolError::file(&index, e))?;
    }
    w.flush().map_err(|e| ToolError::io(&index, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use srir_core::geometry::{fibonacci_grid, spherical_head_set};

    #[test]
    fn directory_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let grid = fibonacci_grid(8).unwrap();
        let set = spherical_head_set(grid.directions(), 48_000, 64).unwrap();
        write_hrir_dir(dir.path(), &set).unwrap();
        let back = read_hrir_dir(dir.path()).unwrap();
        assert_eq!(back.len(), 8);
        for (a, b) in back.directions().iter().zip(set.directions()) {
            assert!(a.angle_to(*b) < 1e-9);
        }
        let (l, r) = (back.pair(3).left().samples(), set.pair(3).left().samples());
        assert!(l.iter().zip(r).all(|(x, y)| (x - y).abs() < 1e-6));
    }
}
