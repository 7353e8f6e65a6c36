//! System condition descriptions and the grids and HRIRs they resolve to.

use alloc::format;
use alloc::string::{String, ToString};

use crate::doa::DoaConfig;
use crate::error::{Error, Result};
use crate::geometry::{
    az_el_grid, fibonacci_grid, reference_hrir_set, spherical_head_set, HrirSet, LoudspeakerGrid,
    DEFAULT_HRIR_LENGTH, REFERENCE_GRID_STEP_DEG,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Analysis {
    Tdoa,
    PivBroadband,
    TfPiv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum PressureSource {
    CenterMic,
    ZerothOrder,
    ChannelAverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Synthesis {
    Sdm,
    Sirr,
}

/// Virtual loudspeaker layout. `Default` is the 5° azimuth/elevation grid
/// for SDM and a 64-point Fibonacci sphere for SIRR.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "kebab-case"))]
pub enum GridRef {
    #[default]
    Default,
    AzEl { step_deg: f64 },
    Fibonacci { count: usize },
}

/// HRIR source. `Default` is the 5° reference set for SDM and the
/// spherical-head model at the grid directions for SIRR.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "kebab-case"))]
pub enum HrirRef {
    #[default]
    Default,
    Reference,
    SphericalHead,
    /// Loaded by the caller and passed in through [`ConditionResources`].
    External { path: String },
}

pub const SIRR_DEFAULT_LOUDSPEAKERS: usize = 64;

#[cfg(feature = "serde")]
fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct SystemCondition {
    pub id: String,
    #[cfg_attr(feature = "serde", serde(default))]
    pub label: Option<String>,
    pub analysis: Analysis,
    pub pressure_source: PressureSource,
    pub synthesis: Synthesis,
    #[cfg_attr(feature = "serde", serde(default))]
    pub doa_config: DoaConfig,
    #[cfg_attr(feature = "serde", serde(default))]
    pub grid: GridRef,
    #[cfg_attr(feature = "serde", serde(default))]
    pub hrir: HrirRef,
    /// Loudspeakers per SDM sample.
    #[cfg_attr(feature = "serde", serde(default = "one"))]
    pub sdm_neighbors: usize,
    /// Trajectory smoothing window; 1 leaves the trajectory as analysed.
    #[cfg_attr(feature = "serde", serde(default = "one"))]
    pub doa_smoothing: usize,
    /// Replaces every diffuseness value of a SIRR analysis.
    #[cfg_attr(feature = "serde", serde(default))]
    pub diffuseness_override: Option<f64>,
}

impl SystemCondition {
    pub fn new(id: &str, analysis: Analysis, pressure_source: PressureSource, synthesis: Synthesis) -> Self {
        SystemCondition {
            id: id.to_string(),
            label: None,
            analysis,
            pressure_source,
            synthesis,
            doa_config: DoaConfig::default(),
            grid: GridRef::Default,
            hrir: HrirRef::Default,
            sdm_neighbors: 1,
            doa_smoothing: 1,
            diffuseness_override: None,
        }
    }

    pub fn labelled(mut self, label: &str) -> Self {
        self.label = Some(label.to_string());
        self
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |m: &str| Err(Error::Configuration(format!("{}: {m}", self.id)));
        if self.id.is_empty() {
            return Err(Error::Configuration("condition id is empty".into()));
        }
        match (self.synthesis, self.analysis) {
            (Synthesis::Sirr, Analysis::TfPiv) | (Synthesis::Sdm, Analysis::Tdoa | Analysis::PivBroadband) => {}
            (Synthesis::Sirr, _) => return cfg("sirr synthesis requires tf-piv analysis"),
            (Synthesis::Sdm, _) => return cfg("sdm synthesis requires a per-sample analysis (tdoa or piv-broadband)"),
        }
        if self.sdm_neighbors == 0 {
            return cfg("sdm_neighbors must be at least 1");
        }
        if self.doa_smoothing == 0 || (self.doa_smoothing > 1 && self.doa_smoothing % 2 == 0) {
            return cfg("doa_smoothing must be 1 or an odd window");
        }
        if let Some(p) = self.diffuseness_override {
            if !(0.0..=1.0).contains(&p) {
                return cfg("diffuseness_override must lie in [0, 1]");
            }
        }
        Ok(())
    }

    pub fn resolved_grid(&self) -> GridRef {
        match (self.grid, self.synthesis) {
            (GridRef::Default, Synthesis::Sdm) => GridRef::AzEl { step_deg: REFERENCE_GRID_STEP_DEG },
            (GridRef::Default, Synthesis::Sirr) => GridRef::Fibonacci { count: SIRR_DEFAULT_LOUDSPEAKERS },
            (g, _) => g,
        }
    }

    pub fn resolved_hrir(&self) -> HrirRef {
        match (&self.hrir, self.synthesis) {
            (HrirRef::Default, Synthesis::Sdm) => HrirRef::Reference,
            (HrirRef::Default, Synthesis::Sirr) => HrirRef::SphericalHead,
            (h, _) => h.clone(),
        }
    }

    /// Builds the grid and the built-in HRIR set this condition names.
    pub fn resolve(&self, sample_rate: u32) -> Result<ConditionResources> {
        let grid = build_grid(self.resolved_grid())?;
        let hrirs = match self.resolved_hrir() {
            HrirRef::Reference => reference_hrir_set(sample_rate)?,
            HrirRef::SphericalHead => spherical_head_set(grid.directions(), sample_rate, DEFAULT_HRIR_LENGTH)?,
            HrirRef::External { path } => {
                return Err(Error::Configuration(format!("external HRIR set '{path}' must be supplied by the caller")))
            }
            HrirRef::Default => unreachable!("resolved above"),
        };
        Ok(ConditionResources { grid, hrirs })
    }
}

pub fn build_grid(grid: GridRef) -> Result<LoudspeakerGrid> {
    match grid {
        GridRef::AzEl { step_deg } => az_el_grid(step_deg),
        GridRef::Fibonacci { count } => fibonacci_grid(count),
        GridRef::Default => Err(Error::Configuration("grid must be resolved against a synthesis".into())),
    }
}

#[derive(Debug, Clone)]
pub struct ConditionResources {
    pub grid: LoudspeakerGrid,
    pub hrirs: HrirSet,
}

/// Per-condition seed, so a condition's output does not depend on which
/// other conditions run alongside it.
pub fn condition_seed(seed: u64, id: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed;
    for b in id.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// The conditions of the comparison, named after the tested systems. The
/// SIRR condition is first order.
pub fn table_ii_conditions() -> [SystemCondition; 5] {
    use Analysis::*;
    use PressureSource::*;
    [
        SystemCondition::new("sdm-6om1-omni", Tdoa, CenterMic, Synthesis::Sdm).labelled("SDM 6OM1 Omni"),
        SystemCondition::new("sdm-6om1", Tdoa, ChannelAverage, Synthesis::Sdm).labelled("SDM 6OM1 (channel average)"),
        SystemCondition::new("sdm-piv", PivBroadband, ZerothOrder, Synthesis::Sdm).labelled("SDM PIV"),
        SystemCondition::new("sdm-piv-omni", PivBroadband, CenterMic, Synthesis::Sdm).labelled("SDM PIV Omni"),
        SystemCondition::new("sirr-diffuse", TfPiv, ZerothOrder, Synthesis::Sirr).labelled("HO-SIRR diffuse (first order)"),
    ]
}
