//! JSON command configurations. Every record rejects unknown keys, and
//! relative paths resolve against the config file's directory.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use srir_core::dsp::ess::EssParams;
use srir_core::geometry::{builtin_array, MicArrayGeometry};
use srir_core::ism::{
    apl_room_scene, apl_room_settings, table_i_positions, Receiver, RenderSettings, Scene, ShoeboxRoom,
};
use srir_core::math::Vec3;
use srir_core::metrics::MetricConfig;
use srir_core::pipeline::{table_ii_conditions, SystemCondition};

use crate::error::{Result, ToolError};

/// Reads and parses a config file.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| ToolError::config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| ToolError::config(format!("{}: {e}", path.display())))
}

/// `path` relative to `base` unless it is absolute.
pub fn resolve(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

fn require_file(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(ToolError::config(format!("{}: file not found", path.display())))
    }
}

fn require_dir(path: &Path) -> Result<()> {
    if path.is_dir() {
        Ok(())
    } else {
        Err(ToolError::config(format!("{}: directory not found", path.display())))
    }
}

/// A built-in array by name, or a full geometry.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ArrayRef {
    Builtin(String),
    Custom(MicArrayGeometry),
}

impl ArrayRef {
    pub fn geometry(&self) -> Result<MicArrayGeometry> {
        match self {
            ArrayRef::Builtin(name) => builtin_array(name).map_err(|_| ToolError::config(format!("unknown array '{name}'"))),
            ArrayRef::Custom(g) => {
                g.validate().map_err(|e| ToolError::config(format!("array '{}': {e}", g.id)))?;
                Ok(g.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ReceiverSpec {
    Array { array: ArrayRef },
    Binaural,
    IdealFoa,
}

impl Default for ReceiverSpec {
    fn default() -> Self {
        ReceiverSpec::Array { array: ArrayRef::Builtin("om6".into()) }
    }
}

impl ReceiverSpec {
    pub fn receiver(&self) -> Result<Receiver> {
        Ok(match self {
            ReceiverSpec::Array { array } => Receiver::Array { geometry: array.geometry()? },
            ReceiverSpec::Binaural => Receiver::Binaural,
            ReceiverSpec::IdealFoa => Receiver::IdealFoa,
        })
    }
}

/// A scene, or a batch of them.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SceneSpec {
    /// The listening-room preset with one of the six table positions, by
    /// slug (`front-center`) or label (`Front center`), or `all`.
    AplRoom {
        position: String,
        #[serde(default)]
        receiver: ReceiverSpec,
        /// Replaces the preset's maximum reflection order.
        #[serde(default)]
        max_order: Option<usize>,
    },
    Custom {
        label: String,
        room: ShoeboxRoom,
        source: Vec3,
        receiver_origin: Vec3,
        #[serde(default)]
        receiver: ReceiverSpec,
    },
}

/// A scene with the label its outputs are filed under.
#[derive(Debug, Clone)]
pub struct LabelledScene {
    pub label: String,
    pub scene: Scene,
}

impl SceneSpec {
    pub fn expand(&self) -> Result<Vec<LabelledScene>> {
        match self {
            SceneSpec::AplRoom { position, receiver, max_order } => {
                let receiver = receiver.receiver()?;
                let all = table_i_positions();
                let picked: Vec<_> = if position == "all" {
                    all.to_vec()
                } else {
                    let p = all
                        .iter()
                        .find(|p| p.slug() == *position || p.label.eq_ignore_ascii_case(position))
                        .ok_or_else(|| ToolError::config(format!("unknown apl-room position '{position}'")))?;
                    vec![*p]
                };
                Ok(picked
                    .iter()
                    .map(|p| {
                        let mut scene = apl_room_scene(p, receiver.clone());
                        if let Some(k) = max_order {
                            scene.room.max_order = *k;
                        }
                        LabelledScene { label: p.slug(), scene }
                    })
                    .collect())
            }
            SceneSpec::Custom { label, room, source, receiver_origin, receiver } => Ok(vec![LabelledScene {
                label: label.clone(),
                scene: Scene { room: room.clone(), source: *source, receiver_origin: *receiver_origin, receiver: receiver.receiver()? },
            }]),
        }
    }
}

pub fn expand_scenes(specs: &[SceneSpec]) -> Result<Vec<LabelledScene>> {
    let mut out = Vec::new();
    for s in specs {
        out.extend(s.expand()?);
    }
    let mut labels: Vec<&str> = out.iter().map(|s| s.label.as_str()).collect();
    labels.sort();
    if labels.windows(2).any(|w| w[0] == w[1]) {
        return Err(ToolError::config("scene labels must be unique"));
    }
    for s in &out {
        s.scene.validate().map_err(|e| ToolError::config(format!("scene '{}': {e}", s.label)))?;
    }
    Ok(out)
}

/// HRIRs for the reference rendering.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum HrirSource {
    /// The 5° spherical-head reference set.
    #[default]
    Reference,
    /// A directory with `index.csv`.
    Directory { path: PathBuf },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    pub scenes: Vec<SceneSpec>,
    /// Defaults to the apl-room settings.
    #[serde(default)]
    pub render: Option<RenderSettings>,
    #[serde(default)]
    pub hrir: HrirSource,
}

impl SimulateConfig {
    pub fn settings(&self) -> RenderSettings {
        self.render.unwrap_or_else(apl_room_settings)
    }
}

/// Conditions listed inline, or a named preset.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConditionSet {
    Preset(String),
    List(Vec<SystemCondition>),
}

impl Default for ConditionSet {
    fn default() -> Self {
        ConditionSet::List(Vec::new())
    }
}

impl ConditionSet {
    pub fn conditions(&self) -> Result<Vec<SystemCondition>> {
        let list = match self {
            ConditionSet::Preset(name) if name == "table-ii" => table_ii_conditions().to_vec(),
            ConditionSet::Preset(name) => return Err(ToolError::config(format!("unknown condition preset '{name}'"))),
            ConditionSet::List(l) => l.clone(),
        };
        let mut ids: Vec<&str> = list.iter().map(|c| c.id.as_str()).collect();
        ids.sort();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(ToolError::config("condition ids must be unique"));
        }
        for c in &list {
            c.validate().map_err(|e| ToolError::config(format!("condition '{}': {e}", c.id)))?;
        }
        Ok(list)
    }
}

/// Recordings for one render input: a simulation directory, explicit
/// files, or both (explicit files win).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    pub label: String,
    #[serde(default)]
    pub simulation: Option<PathBuf>,
    #[serde(default)]
    pub srir: Option<PathBuf>,
    #[serde(default)]
    pub array: Option<ArrayRef>,
    #[serde(default)]
    pub center: Option<PathBuf>,
    #[serde(default)]
    pub foa: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    pub inputs: Vec<InputSpec>,
    pub conditions: ConditionSet,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub id: String,
    #[serde(default)]
    pub label: Option<String>,
    pub path: PathBuf,
}

/// Measured or previously rendered BRIRs of one scene.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrirCase {
    pub scene: String,
    pub reference: PathBuf,
    pub systems: Vec<SystemFile>,
}

/// Either `cases` (BRIR files) or `scenes` with `conditions` (simulated and
/// rendered in one run).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub metrics: MetricConfig,
    #[serde(default)]
    pub cases: Vec<BrirCase>,
    #[serde(default)]
    pub scenes: Vec<SceneSpec>,
    #[serde(default)]
    pub render: Option<RenderSettings>,
    #[serde(default)]
    pub hrir: HrirSource,
    #[serde(default)]
    pub conditions: ConditionSet,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub brir: Option<PathBuf>,
    #[serde(default)]
    pub metrics: MetricConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EssGenerateConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub sweep: EssParams,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EssDeconvolveConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Mono or multichannel; each channel is deconvolved.
    pub recording: PathBuf,
    pub inverse: PathBuf,
    /// Kept before lag zero; the default is 5 ms.
    #[serde(default)]
    pub pre_roll_s: Option<f64>,
}

impl InputSpec {
    pub fn check_files(&self, base: &Path) -> Result<()> {
        if let Some(d) = &self.simulation {
            require_dir(&resolve(base, d))?;
        }
        for p in [&self.srir, &self.center, &self.foa].into_iter().flatten() {
            require_file(&resolve(base, p))?;
        }
        if self.srir.is_some() && self.array.is_none() && self.simulation.is_none() {
            return Err(ToolError::config(format!("input '{}': an srir file needs an array", self.label)));
        }
        Ok(())
    }
}

impl CompareConfig {
    pub fn check(&self, base: &Path) -> Result<()> {
        match (self.cases.is_empty(), self.scenes.is_empty()) {
            (false, false) => return Err(ToolError::config("give either cases or scenes, not both")),
            (true, true) => return Err(ToolError::config("compare needs cases or scenes")),
            (false, true) => {
                for c in &self.cases {
                    require_file(&resolve(base, &c.reference))?;
                    if c.systems.is_empty() {
                        return Err(ToolError::config(format!("case '{}' lists no systems", c.scene)));
                    }
                    for s in &c.systems {
                        require_file(&resolve(base, &s.path))?;
                    }
                }
                fn ids(c: &BrirCase) -> Vec<&str> {
                    let mut v: Vec<&str> = c.systems.iter().map(|s| s.id.as_str()).collect();
                    v.sort();
                    v
                }
                let first = ids(&self.cases[0]);
                if first.windows(2).any(|w| w[0] == w[1]) {
                    return Err(ToolError::config("system ids must be unique within a case"));
                }
                if self.cases.iter().any(|c| ids(c) != first) {
                    return Err(ToolError::config("every case must list the same system ids"));
                }
            }
            (true, false) => {
                if self.conditions.conditions()?.is_empty() {
                    return Err(ToolError::config("compare needs at least one condition"));
                }
            }
        }
        Ok(())
    }
}

impl HrirSource {
    pub fn check(&self, base: &Path) -> Result<()> {
        match self {
            HrirSource::Reference => Ok(()),
            HrirSource::Directory { path } => require_file(&resolve(base, path).join(crate::hrir_dir::INDEX_FILE)),
        }
    }
}
