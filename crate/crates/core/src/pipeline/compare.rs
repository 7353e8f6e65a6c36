//! Metric comparison of conditions against a reference BRIR.

use alloc::string::String;
use alloc::vec::Vec;

use super::{run_condition_with, ConditionOutput, ConditionResources, PipelineInput, SystemCondition};
use crate::dsp::onset::normalize_direct_energy;
use crate::error::{Error, Result};
use crate::metrics::{error_summary_pairs, report_with, ErrorSummary, MetricConfig, MetricReport};
use crate::signal::BinauralIr;

/// Label of the desk-scale reference.
pub const REFERENCE_SOURCE: &str = "ism-nearest-hrir";

#[derive(Debug, Clone)]
pub struct SceneCase {
    pub label: String,
    pub input: PipelineInput,
    pub reference: BinauralIr,
}

#[derive(Debug, Clone)]
pub struct ComparisonRun {
    pub scenes: Vec<SceneCase>,
    pub conditions: Vec<SystemCondition>,
    pub seed: u64,
    pub metric_config: MetricConfig,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReportRow {
    pub scene: String,
    pub condition: String,
    pub label: Option<String>,
    pub report: MetricReport,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConditionSummary {
    pub condition: String,
    pub label: Option<String>,
    /// Pooled over scenes with equal weight.
    pub summary: ErrorSummary,
    /// T30 MSD ≥ 0: the system reverberates at least as long as the
    /// reference on average.
    pub t30_overestimates: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComparisonReport {
    pub reference_source: String,
    pub seed: u64,
    pub references: Vec<ReportRow>,
    /// Ordered by condition id, then scene order.
    pub rows: Vec<ReportRow>,
    pub summaries: Vec<ConditionSummary>,
}

impl ComparisonRun {
    pub fn validate(&self) -> Result<()> {
        if self.conditions.is_empty() {
            return Err(Error::Configuration("comparison needs at least one condition".into()));
        }
        if self.scenes.is_empty() {
            return Err(Error::Configuration("comparison needs at least one scene".into()));
        }
        let mut ids: Vec<&str> = self.conditions.iter().map(|c| c.id.as_str()).collect();
        ids.sort();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Configuration("condition ids must be unique".into()));
        }
        for c in &self.conditions {
            c.validate()?;
        }
        let fs = self.scenes[0].reference.sample_rate();
        if self.scenes.iter().any(|s| s.reference.sample_rate() != fs) {
            return Err(Error::Configuration("all references must share one sample rate".into()));
        }
        Ok(())
    }

    pub fn sample_rate(&self) -> u32 {
        self.scenes.first().map(|s| s.reference.sample_rate()).unwrap_or(0)
    }
}

pub fn reference_report(case: &SceneCase, config: &MetricConfig) -> Result<MetricReport> {
    report_with(&normalize_direct_energy(&case.reference)?, config)
}

/// Runs one condition on one scene and measures its BRIR.
pub fn evaluate_scene_condition(
    case: &SceneCase,
    condition: &SystemCondition,
    resources: &ConditionResources,
    run: &ComparisonRun,
) -> Result<(ConditionOutput, MetricReport)> {
    if resources.hrirs.sample_rate() != case.reference.sample_rate() {
        return Err(Error::Configuration("condition and reference sample rates differ".into()).in_condition(&condition.id));
    }
    let out = run_condition_with(&case.input, condition, resources, run.seed)?;
    let report = report_with(&out.brir, &run.metric_config).map_err(|e| e.in_condition(&condition.id))?;
    Ok((out, report))
}

/// Builds the report from per-scene reference reports and per-condition,
/// per-scene system reports (`systems[c][s]`, in `run.conditions` order).
pub fn assemble_report(
    run: &ComparisonRun,
    references: &[MetricReport],
    systems: &[Vec<MetricReport>],
) -> Result<ComparisonReport> {
    if systems.len() != run.conditions.len() {
        return Err(Error::invalid("report shape does not match the run"));
    }
    let scenes: Vec<String> = run.scenes.iter().map(|s| s.label.clone()).collect();
    let measured: Vec<MeasuredSystem> = run
        .conditions
        .iter()
        .zip(systems)
        .map(|(c, r)| MeasuredSystem { id: c.id.clone(), label: c.label.clone(), reports: r.clone() })
        .collect();
    build_report(run.seed, &scenes, references, &measured)
}

/// Metric reports of one system over every scene, in scene order.
#[derive(Debug, Clone)]
pub struct MeasuredSystem {
    pub id: String,
    pub label: Option<String>,
    pub reports: Vec<MetricReport>,
}

/// Builds a report from measurements alone, for BRIRs produced elsewhere.
/// Systems are ordered by id.
pub fn build_report(
    seed: u64,
    scenes: &[String],
    references: &[MetricReport],
    systems: &[MeasuredSystem],
) -> Result<ComparisonReport> {
    if references.len() != scenes.len() || systems.iter().any(|s| s.reports.len() != scenes.len()) {
        return Err(Error::invalid("report shape does not match the run"));
    }
    let reference_rows = scenes
        .iter()
        .zip(references)
        .map(|(s, r)| ReportRow { scene: s.clone(), condition: "reference".into(), label: None, report: *r })
        .collect();
    let mut order: Vec<&MeasuredSystem> = systems.iter().collect();
    order.sort_by(|a, b| a.id.cmp(&b.id));
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for sys in order {
        let mut pairs = Vec::with_capacity(scenes.len());
        for ((scene, r), s) in scenes.iter().zip(references).zip(&sys.reports) {
            rows.push(ReportRow { scene: scene.clone(), condition: sys.id.clone(), label: sys.label.clone(), report: *s });
            pairs.push((*s, *r));
        }
        let summary = error_summary_pairs(&pairs)?;
        summaries.push(ConditionSummary {
            condition: sys.id.clone(),
            label: sys.label.clone(),
            t30_overestimates: summary.t30_mid_s.msd >= 0.0,
            summary,
        });
    }
    Ok(ComparisonReport { reference_source: REFERENCE_SOURCE.into(), seed, references: reference_rows, rows, summaries })
}

/// Sequential comparison. Conditions that name the same grid and HRIRs
/// share one resolved copy.
pub fn run_comparison(run: &ComparisonRun) -> Result<ComparisonReport> {
    run.validate()?;
    let fs = run.sample_rate();
    let references =
        run.scenes.iter().map(|s| reference_report(s, &run.metric_config)).collect::<Result<Vec<_>>>()?;
    let mut cache: Vec<(SystemCondition, ConditionResources)> = Vec::new();
    let mut systems = Vec::with_capacity(run.conditions.len());
    for cond in &run.conditions {
        let hit = cache
            .iter()
            .position(|(c, _)| c.resolved_grid() == cond.resolved_grid() && c.resolved_hrir() == cond.resolved_hrir());
        let idx = match hit {
            Some(i) => i,
            None => {
                cache.push((cond.clone(), cond.resolve(fs).map_err(|e| e.in_condition(&cond.id))?));
                cache.len() - 1
            }
        };
        let resources = &cache[idx].1;
        let reports = run
            .scenes
            .iter()
            .map(|s| evaluate_scene_condition(s, cond, resources, run).map(|(_, r)| r))
            .collect::<Result<Vec<_>>>()?;
        systems.push(reports);
    }
    assemble_report(run, &references, &systems)
}
