//! End-to-end system conditions: analysis, synthesis, binaural rendering
//! and direct-energy normalization, plus comparisons against a reference.
//!
//! Simulated sphere-array conditions use the open-array TDOA model, with no
//! rigid-sphere scattering. At desk scale the reference is the image-source
//! nearest-HRIR BRIR.

mod compare;
mod condition;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

pub use compare::{
    assemble_report, build_report, evaluate_scene_condition, reference_report, run_comparison, ComparisonReport, ComparisonRun, ConditionSummary,
    MeasuredSystem, ReportRow, SceneCase, REFERENCE_SOURCE,
};
pub use condition::{
    build_grid, condition_seed, table_ii_conditions, Analysis, ConditionResources, GridRef, HrirRef, PressureSource, Synthesis,
    SystemCondition,
};

use crate::doa::{
    piv_broadband_doa, smooth_doa, tdoa_ls_doa, tf_piv_analysis_with, DoaTrajectory, TfDoaField, DEFAULT_TF_AVERAGING,
};
use crate::dsp::onset::normalize_direct_energy;
use crate::dsp::stft::stft;
use crate::error::{Error, Result};
use crate::geometry::{encode_foa_open_array, FoaSignal, MicArrayGeometry};
use crate::ism::SimulatedScene;
use crate::signal::{BinauralIr, MonoIr, MultichannelIr};
use crate::synthesis::{binaural_render, sdm_synthesize, sirr_synthesize, VirtualLoudspeakerSignals};

/// The recordings a condition may draw on.
#[derive(Debug, Clone, Default)]
pub struct PipelineInput {
    pub srir: Option<MultichannelIr>,
    pub geometry: Option<MicArrayGeometry>,
    /// A dedicated omnidirectional capsule at the array centre.
    pub center: Option<MonoIr>,
    pub foa: Option<FoaSignal>,
}

impl From<&SimulatedScene> for PipelineInput {
    fn from(s: &SimulatedScene) -> Self {
        PipelineInput {
            srir: s.srir.clone(),
            geometry: s.geometry.clone(),
            center: Some(s.center.clone()),
            foa: Some(s.foa.clone()),
        }
    }
}

impl PipelineInput {
    fn array(&self) -> Result<(&MultichannelIr, &MicArrayGeometry)> {
        match (&self.srir, &self.geometry) {
            (Some(s), Some(g)) => Ok((s, g)),
            _ => Err(Error::Configuration("needs an array SRIR with its geometry".into())),
        }
    }

    /// The supplied FOA channels, or an open-array encoding of the SRIR.
    fn foa(&self) -> Result<FoaSignal> {
        if let Some(f) = &self.foa {
            return Ok(f.clone());
        }
        match self.array() {
            Ok((s, g)) if g.axis_pairs().is_some() || g.is_three_dimensional() => encode_foa_open_array(s, g)
                .map_err(|e| Error::Configuration(format!("needs FOA channels; array encoding failed: {e}"))),
            _ => Err(Error::Configuration("needs FOA channels and none were supplied".into())),
        }
    }

    fn pressure(&self, source: PressureSource) -> Result<MonoIr> {
        match source {
            PressureSource::CenterMic => {
                if let (Some(s), Some(g)) = (&self.srir, &self.geometry) {
                    if let Some(c) = g.center_index {
                        return Ok(s.channel(c).clone());
                    }
                }
                self.center
                    .clone()
                    .ok_or_else(|| Error::Configuration("center-mic pressure needs a centre capsule".into()))
            }
            PressureSource::ZerothOrder => Ok(self.foa()?.w),
            PressureSource::ChannelAverage => {
                Ok(self.array().map_err(|_| Error::Configuration("channel-average needs an array SRIR".into()))?.0.channel_average())
            }
        }
    }
}

/// Every product of one condition run.
#[derive(Debug, Clone)]
pub struct ConditionOutput {
    /// Direct-energy normalized.
    pub brir: BinauralIr,
    pub pressure: MonoIr,
    /// Per-sample directions, for SDM conditions.
    pub trajectory: Option<DoaTrajectory>,
    /// Per-bin directions and diffuseness, for SIRR conditions.
    pub field: Option<TfDoaField>,
    pub loudspeakers: VirtualLoudspeakerSignals,
}

pub fn run_condition(input: &PipelineInput, condition: &SystemCondition, seed: u64) -> Result<BinauralIr> {
    let resources = condition.resolve(sample_rate_of(input)?).map_err(|e| e.in_condition(&condition.id))?;
    Ok(run_condition_with(input, condition, &resources, seed)?.brir)
}

fn sample_rate_of(input: &PipelineInput) -> Result<u32> {
    input
        .srir
        .as_ref()
        .map(|s| s.sample_rate())
        .or_else(|| input.foa.as_ref().map(|f| f.sample_rate()))
        .or_else(|| input.center.as_ref().map(|c| c.sample_rate()))
        .ok_or_else(|| Error::Configuration("pipeline input is empty".into()))
}

/// Runs one condition with pre-resolved grid and HRIRs. Errors carry the
/// condition id.
pub fn run_condition_with(
    input: &PipelineInput,
    condition: &SystemCondition,
    resources: &ConditionResources,
    seed: u64,
) -> Result<ConditionOutput> {
    run_inner(input, condition, resources, condition_seed(seed, &condition.id)).map_err(|e| e.in_condition(&condition.id))
}

fn run_inner(
    input: &PipelineInput,
    condition: &SystemCondition,
    resources: &ConditionResources,
    seed: u64,
) -> Result<ConditionOutput> {
    condition.validate()?;
    let pressure = input.pressure(condition.pressure_source)?;
    let fs = pressure.sample_rate();
    condition.doa_config.validate(fs)?;
    let (trajectory, field, loudspeakers) = match condition.synthesis {
        Synthesis::Sdm => {
            let mut traj = match condition.analysis {
                Analysis::Tdoa => {
                    let (srir, geometry) = input.array()?;
                    tdoa_ls_doa(srir, geometry, &condition.doa_config)?
                }
                Analysis::PivBroadband => piv_broadband_doa(&input.foa()?, &condition.doa_config)?,
                Analysis::TfPiv => unreachable!("rejected by validate"),
            };
            if condition.doa_smoothing > 1 {
                traj = smooth_doa(&traj, condition.doa_smoothing)?;
            }
            if traj.len() != pressure.len() {
                return Err(Error::Configuration(format!(
                    "pressure has {} samples but the analysis produced {}",
                    pressure.len(),
                    traj.len()
                )));
            }
            let vls = sdm_synthesize(&pressure, &traj, &resources.grid, condition.sdm_neighbors)?;
            (Some(traj), None, vls)
        }
        Synthesis::Sirr => {
            let foa = input.foa()?;
            if foa.len() != pressure.len() {
                return Err(Error::Configuration("FOA and pressure lengths differ".into()));
            }
            let window = condition.doa_config.window_size;
            let hop = window / 2;
            let frames: Vec<_> = foa.components().iter().map(|c| stft(c, window, hop)).collect::<Result<_>>()?;
            let frames: [_; 4] = frames.try_into().map_err(|_| Error::invalid("four FOA components expected"))?;
            let mut field = tf_piv_analysis_with(&frames, DEFAULT_TF_AVERAGING)?;
            if let Some(psi) = condition.diffuseness_override {
                field = field.with_constant_psi(psi);
            }
            let p_frames = stft(&pressure, window, hop)?;
            let vls = sirr_synthesize(&p_frames, &field, &resources.grid, seed)?;
            (None, Some(field), vls)
        }
    };
    let brir = normalize_direct_energy(&binaural_render(&loudspeakers, &resources.hrirs)?)?;
    Ok(ConditionOutput { brir, pressure, trajectory, field, loudspeakers })
}

/// Condition ids in report order.
pub fn condition_ids(conditions: &[SystemCondition]) -> Vec<String> {
    let mut ids: Vec<String> = conditions.iter().map(|c| c.id.clone()).collect();
    ids.sort();
    ids
}
