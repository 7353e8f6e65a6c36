//! CSV exports.

use std::path::Path;

use serde::Serialize;
use srir_core::doa::DoaTrajectory;
use srir_core::ism::ImageSourceList;
use srir_core::math::Vec3;
use srir_core::metrics::{Metric, MetricReport};
use srir_core::pipeline::ComparisonReport;

use crate::error::{Result, ToolError};

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| ToolError::io(dir, e))?;
    }
    csv::Writer::from_path(path).map_err(|e| ToolError::file(path, e))
}

fn write_rows<R: Serialize>(path: &Path, rows: impl IntoIterator<Item = R>) -> Result<()> {
    let mut w = writer(path)?;
    for r in rows {
        w.serialize(r).map_err(|e| ToolError::file(path, e))?;
    }
    w.flush().map_err(|e| ToolError::io(path, e))
}

#[derive(Serialize)]
struct ImageRow {
    order: usize,
    x: f64,
    y: f64,
    z: f64,
    delay_s: f64,
    amplitude: f64,
}

pub fn write_images(path: &Path, images: &ImageSourceList) -> Result<()> {
    write_rows(
        path,
        images.images.iter().map(|i| ImageRow {
            order: i.order,
            x: i.position.x,
            y: i.position.y,
            z: i.position.z,
            delay_s: i.delay,
            amplitude: i.amplitude,
        }),
    )
}

#[derive(Serialize)]
struct TrajectoryRow {
    sample: usize,
    valid: bool,
    x: f64,
    y: f64,
    z: f64,
    azimuth_deg: f64,
    elevation_deg: f64,
}

/// One row per pressure sample; masked samples have `valid = false` and a
/// zero vector.
pub fn write_trajectory(path: &Path, trajectory: &DoaTrajectory) -> Result<()> {
    write_rows(
        path,
        trajectory.directions().iter().zip(trajectory.valid()).enumerate().map(|(sample, (d, &valid))| {
            let (az, el) = if valid { d.to_az_el_deg() } else { (0.0, 0.0) };
            TrajectoryRow { sample, valid, x: d.x, y: d.y, z: d.z, azimuth_deg: az, elevation_deg: el }
        }),
    )
}

#[derive(Serialize)]
struct GridRow {
    channel: usize,
    loudspeaker: usize,
    azimuth_deg: f64,
    elevation_deg: f64,
}

/// WAV channel to loudspeaker map for a loudspeaker dump.
pub fn write_grid(path: &Path, directions: &[Vec3], loudspeakers: &[usize]) -> Result<()> {
    write_rows(
        path,
        loudspeakers.iter().enumerate().map(|(channel, &l)| {
            let (azimuth_deg, elevation_deg) = directions[l].to_az_el_deg();
            GridRow { channel, loudspeaker: l, azimuth_deg, elevation_deg }
        }),
    )
}

fn metric_header() -> Vec<String> {
    Metric::ALL.iter().map(|m| m.name().to_string()).collect()
}

fn metric_values(r: &MetricReport) -> Vec<String> {
    Metric::ALL.iter().map(|m| r.get(*m).to_string()).collect()
}

pub fn write_metric_report(path: &Path, label: &str, report: &MetricReport) -> Result<()> {
    let mut w = writer(path)?;
    let mut head = vec!["brir".to_string()];
    head.extend(metric_header());
    w.write_record(&head).map_err(|e| ToolError::file(path, e))?;
    let mut row = vec![label.to_string()];
    row.extend(metric_values(report));
    w.write_record(&row).map_err(|e| ToolError::file(path, e))?;
    w.flush().map_err(|e| ToolError::io(path, e))
}

/// Per-scene rows (metric values, errors against the reference and JND
/// flags) followed by pooled MAE/MSD rows per condition, which also carry
/// the sign flag of the T30 MSD.
pub fn write_comparison(path: &Path, report: &ComparisonReport) -> Result<()> {
    let mut w = writer(path)?;
    let err = |e: csv::Error| ToolError::file(path, e);
    let mut head = vec!["kind".to_string(), "scene".into(), "condition".into()];
    for m in Metric::ALL {
        let n = m.name();
        head.extend([n.to_string(), format!("{n}_error"), format!("{n}_within_jnd")]);
    }
    head.push("t30_overestimates".into());
    w.write_record(&head).map_err(err)?;
    for row in report.references.iter().chain(&report.rows) {
        let reference = report.references.iter().find(|r| r.scene == row.scene).map(|r| r.report);
        let mut rec = vec!["row".to_string(), row.scene.clone(), row.condition.clone()];
        for m in Metric::ALL {
            let v = row.report.get(m);
            let (e, ok) = match reference {
                Some(r) => {
                    let d = v - r.get(m);
                    (d.to_string(), (d.abs() <= m.jnd(r.get(m))).to_string())
                }
                None => (String::new(), String::new()),
            };
            rec.extend([v.to_string(), e, ok]);
        }
        rec.push(String::new());
        w.write_record(&rec).map_err(err)?;
    }
    for s in &report.summaries {
        for (kind, pick) in [("mae", 0usize), ("msd", 1)] {
            let mut rec = vec![kind.to_string(), "pooled".into(), s.condition.clone()];
            for m in Metric::ALL {
                let e = s.summary.get(m);
                let v = if pick == 0 { e.mae } else { e.msd };
                rec.extend([v.to_string(), String::new(), if pick == 0 { e.within_jnd.to_string() } else { String::new() }]);
            }
            rec.push(s.t30_overestimates.to_string());
            w.write_record(&rec).map_err(err)?;
        }
    }
    w.flush().map_err(|e| ToolError::io(path, e))
}
