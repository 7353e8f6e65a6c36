//! The subcommands. Each loads its config, runs on the shared thread pool,
//! writes its outputs and a manifest, and reports failures per item.

use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::Serialize;
use srir_core::dsp::ess::{deconvolve_ess_with, generate_ess_with, EssTrim};
use srir_core::dsp::onset::normalize_direct_energy;
use srir_core::geometry::{HrirSet, MicArrayGeometry};
use srir_core::ism::{render_scene, Receiver, RenderSettings, Scene, SimulatedScene};
use srir_core::metrics::{itd_with, report_with, ItdSegment, MetricConfig, MetricReport};
use srir_core::pipeline::{
    build_report, condition_ids, run_condition_with, ComparisonReport, ComparisonRun, ConditionOutput, MeasuredSystem,
    PipelineInput, SceneCase,
};
use srir_core::{BinauralIr, MonoIr, MultichannelIr};

use crate::config::{self, resolve, CompareConfig, ConditionSet, EssDeconvolveConfig, EssGenerateConfig, HrirSource};
use crate::config::{LabelledScene, MetricsConfig, RenderConfig, SimulateConfig};
use crate::error::{Result, ToolError};
use crate::hrir_dir::read_hrir_dir;
use crate::manifest::write_manifest;
use crate::runner::{log, parallel_comparison, resolve_conditions, Runner};
use crate::tables;
use crate::wav;

pub const SCENE_FILE: &str = "scene.json";
pub const REPORT_JSON: &str = "report.json";
pub const REPORT_CSV: &str = "report.csv";

/// Flags shared by every command. Command-line values override the config.
#[derive(Debug, Clone, Default)]
pub struct Globals {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub threads: usize,
    pub dump_intermediates: bool,
}

/// Files written so far, for the manifest.
#[derive(Default)]
struct Written(Mutex<Vec<PathBuf>>);

impl Written {
    fn add(&self, p: PathBuf) {
        self.0.lock().unwrap_or_else(|e| e.into_inner()).push(p);
    }

    fn take(self) -> Vec<PathBuf> {
        self.0.into_inner().unwrap_or_else(|e| e.into_inner())
    }
}

struct Context {
    base: PathBuf,
    out: PathBuf,
    seed: u64,
    runner: Runner,
    dump: bool,
}

impl Context {
    fn new(g: &Globals, cfg_seed: Option<u64>, cfg_out: Option<&Path>) -> Result<Self> {
        let base = config_dir(g);
        let out = match (&g.output, cfg_out) {
            (Some(o), _) => o.clone(),
            (None, Some(o)) => resolve(&base, o),
            (None, None) => return Err(ToolError::config("no output directory: pass --output or set output_dir")),
        };
        std::fs::create_dir_all(&out).map_err(|e| ToolError::io(&out, e))?;
        Ok(Context { base, out, seed: g.seed.or(cfg_seed).unwrap_or(0), runner: Runner::new(g.threads)?, dump: g.dump_intermediates })
    }

    fn finish(&self, command: &str, written: Written, failures: Vec<(String, ToolError)>, total: usize) -> Result<()> {
        write_manifest(&self.out, command, self.seed, &written.take())?;
        if failures.is_empty() {
            Ok(())
        } else {
            Err(ToolError::Partial { total, failures })
        }
    }
}

fn config_dir(g: &Globals) -> PathBuf {
    g.config.as_ref().and_then(|c| c.parent()).map(Path::to_path_buf).unwrap_or_default()
}

fn required_config(g: &Globals) -> Result<&Path> {
    g.config.as_deref().ok_or_else(|| ToolError::config("this command needs --config"))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| ToolError::io(dir, e))?;
    }
    let json = serde_json::to_string_pretty(value).map_err(|e| ToolError::file(path, e))?;
    std::fs::write(path, json + "\n").map_err(|e| ToolError::io(path, e))
}

fn load_hrirs(source: &HrirSource, base: &Path, sample_rate: u32) -> Result<HrirSet> {
    source.check(base)?;
    let set = match source {
        HrirSource::Reference => srir_core::geometry::reference_hrir_set(sample_rate)?,
        HrirSource::Directory { path } => read_hrir_dir(&resolve(base, path))?,
    };
    if set.sample_rate() != sample_rate {
        return Err(ToolError::config(format!("HRIR set is at {} Hz, the render at {sample_rate} Hz", set.sample_rate())));
    }
    Ok(set)
}

fn simulate_all(ctx: &Context, scenes: &[LabelledScene], settings: &RenderSettings, hrirs: &HrirSet) -> Vec<Result<SimulatedScene>> {
    ctx.runner.map(scenes, |s| {
        let r = render_scene(&s.scene, settings, hrirs).map_err(|e| ToolError::Runtime(format!("scene '{}': {e}", s.label)));
        log(format!("simulated {}", s.label));
        r
    })
}

/// What `simulate` records about each scene next to its audio.
#[derive(Debug, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneRecord {
    pub label: String,
    pub scene: Scene,
    pub render: RenderSettings,
    pub image_count: usize,
    pub truncated: usize,
}

fn write_simulation(dir: &Path, label: &str, scene: &Scene, settings: &RenderSettings, sim: &SimulatedScene, written: &Written) -> Result<()> {
    let put = |name: &str, f: &dyn Fn(&Path) -> Result<()>| -> Result<()> {
        let p = dir.join(name);
        f(&p)?;
        written.add(p);
        Ok(())
    };
    if let Some(srir) = &sim.srir {
        put("srir.wav", &|p| wav::write_multichannel(p, srir))?;
    }
    put("foa.wav", &|p| wav::write_foa(p, &sim.foa))?;
    put("center.wav", &|p| wav::write_mono(p, &sim.center))?;
    put("reference.wav", &|p| wav::write_binaural(p, &sim.reference))?;
    put("images.csv", &|p| tables::write_images(p, &sim.images))?;
    let record = SceneRecord {
        label: label.into(),
        scene: scene.clone(),
        render: *settings,
        image_count: sim.images.len(),
        truncated: sim.truncated,
    };
    put(SCENE_FILE, &|p| write_json(p, &record))
}

/// Renders every receiver of every scene into `<output>/<scene>/`.
pub fn cmd_simulate(g: &Globals) -> Result<()> {
    let path = required_config(g)?;
    let cfg: SimulateConfig = config::load(path)?;
    let ctx = Context::new(g, cfg.seed, cfg.output_dir.as_deref())?;
    let scenes = config::expand_scenes(&cfg.scenes)?;
    if scenes.is_empty() {
        return Err(ToolError::config("simulate needs at least one scene"));
    }
    let settings = cfg.settings();
    let hrirs = load_hrirs(&cfg.hrir, &ctx.base, settings.sample_rate)?;
    let sims = simulate_all(&ctx, &scenes, &settings, &hrirs);
    let written = Written::default();
    let results = ctx.runner.map(&scenes.iter().zip(sims).collect::<Vec<_>>(), |(s, sim)| match sim {
        Ok(sim) => write_simulation(&ctx.out.join(&s.label), &s.label, &s.scene, &settings, sim, &written),
        Err(e) => Err(ToolError::Runtime(e.to_string())),
    });
    let failures = scenes.iter().zip(results).filter_map(|(s, r)| r.err().map(|e| (s.label.clone(), e))).collect();
    ctx.finish("simulate", written, failures, scenes.len())
}

fn load_input(spec: &config::InputSpec, base: &Path) -> Result<PipelineInput> {
    let mut input = PipelineInput::default();
    if let Some(dir) = &spec.simulation {
        let dir = resolve(base, dir);
        let record: SceneRecord = config::load(&dir.join(SCENE_FILE))?;
        let geometry = match &record.scene.receiver {
            Receiver::Array { geometry } => Some(geometry.clone()),
            _ => None,
        };
        let file = |n: &str| Some(dir.join(n)).filter(|p| p.is_file());
        if let (Some(p), Some(g)) = (file("srir.wav"), &geometry) {
            input.srir = Some(wav::read_multichannel(&p, Some(g.id.clone()))?);
            input.geometry = geometry.clone();
        }
        if let Some(p) = file("center.wav") {
            input.center = Some(wav::read_mono(&p)?);
        }
        if let Some(p) = file("foa.wav") {
            input.foa = Some(wav::read_foa(&p)?);
        }
    }
    if let Some(a) = &spec.array {
        input.geometry = Some(a.geometry()?);
    }
    if let Some(p) = &spec.srir {
        let g: &MicArrayGeometry =
            input.geometry.as_ref().ok_or_else(|| ToolError::config(format!("input '{}': srir needs an array", spec.label)))?;
        let srir = wav::read_multichannel(&resolve(base, p), Some(g.id.clone()))?;
        if srir.channel_count() != g.capsule_count() {
            return Err(ToolError::config(format!(
                "input '{}': srir has {} channels, array '{}' has {} capsules",
                spec.label,
                srir.channel_count(),
                g.id,
                g.capsule_count()
            )));
        }
        input.srir = Some(srir);
    }
    if let Some(p) = &spec.center {
        input.center = Some(wav::read_mono(&resolve(base, p))?);
    }
    if let Some(p) = &spec.foa {
        input.foa = Some(wav::read_foa(&resolve(base, p))?);
    }
    Ok(input)
}

fn input_sample_rate(input: &PipelineInput) -> Option<u32> {
    input
        .srir
        .as_ref()
        .map(MultichannelIr::sample_rate)
        .or_else(|| input.foa.as_ref().map(|f| f.sample_rate()))
        .or_else(|| input.center.as_ref().map(MonoIr::sample_rate))
}

fn external_loader(base: PathBuf) -> impl Fn(&str) -> Result<HrirSet> + Sync {
    move |p: &str| read_hrir_dir(&resolve(&base, Path::new(p)))
}

/// BRIR, and with `dump` the trajectory, the active loudspeaker signals and
/// their channel map, under `<dir>/<condition>`.
fn write_condition(dir: &Path, id: &str, out: &ConditionOutput, dump: bool, written: &Written) -> Result<()> {
    let p = dir.join(format!("{id}.wav"));
    wav::write_binaural(&p, &out.brir)?;
    written.add(p);
    if !dump {
        return Ok(());
    }
    if let Some(t) = &out.trajectory {
        let p = dir.join(format!("{id}.trajectory.csv"));
        tables::write_trajectory(&p, t)?;
        written.add(p);
    }
    let vls = &out.loudspeakers;
    let active: Vec<usize> = (0..vls.channels().len()).filter(|&i| !vls.channels()[i].is_silent()).collect();
    if !active.is_empty() {
        let signals: Vec<Vec<f64>> = active.iter().map(|&i| vls.channels()[i].to_dense(vls.len())).collect();
        let refs: Vec<&[f64]> = signals.iter().map(Vec::as_slice).collect();
        let p = dir.join(format!("{id}.vls.wav"));
        wav::write_channels(&p, &refs, vls.sample_rate())?;
        written.add(p);
        let p = dir.join(format!("{id}.vls.csv"));
        tables::write_grid(&p, vls.grid().directions(), &active)?;
        written.add(p);
    }
    Ok(())
}

/// Runs every condition on every input into `<output>/<input>/`.
pub fn cmd_render(g: &Globals) -> Result<()> {
    let path = required_config(g)?;
    let cfg: RenderConfig = config::load(path)?;
    let ctx = Context::new(g, cfg.seed, cfg.output_dir.as_deref())?;
    let conditions = cfg.conditions.conditions()?;
    if cfg.inputs.is_empty() || conditions.is_empty() {
        return Err(ToolError::config("render needs at least one input and one condition"));
    }
    for i in &cfg.inputs {
        i.check_files(&ctx.base)?;
    }
    let inputs: Vec<Result<PipelineInput>> = ctx.runner.map(&cfg.inputs, |s| load_input(s, &ctx.base));
    let mut rates: Vec<u32> = inputs.iter().filter_map(|i| i.as_ref().ok().and_then(input_sample_rate)).collect();
    rates.sort_unstable();
    rates.dedup();
    let loader = external_loader(ctx.base.clone());
    let resources: Vec<(u32, Vec<_>)> =
        rates.iter().map(|&fs| (fs, resolve_conditions(&ctx.runner, &conditions, fs, &loader))).collect();
    let jobs: Vec<(usize, usize)> =
        (0..cfg.inputs.len()).flat_map(|i| (0..conditions.len()).map(move |c| (i, c))).collect();
    let written = Written::default();
    let results = ctx.runner.map(&jobs, |&(i, c)| {
        let spec = &cfg.inputs[i];
        let cond = &conditions[c];
        let input = inputs[i].as_ref().map_err(|e| ToolError::Runtime(format!("input '{}': {e}", spec.label)))?;
        let fs = input_sample_rate(input).ok_or_else(|| ToolError::config(format!("input '{}' has no channels", spec.label)))?;
        let res = resources.iter().find(|(r, _)| *r == fs).map(|(_, v)| &v[c]).expect("resolved for every rate");
        let res = match res {
            Ok(r) => r,
            Err(e) => return Err(if e.is_configuration() { ToolError::config(e.to_string()) } else { ToolError::Runtime(e.to_string()) }),
        };
        let out = run_condition_with(input, cond, res, ctx.seed)?;
        write_condition(&ctx.out.join(&spec.label), &cond.id, &out, ctx.dump, &written)?;
        log(format!("rendered {}/{}", spec.label, cond.id));
        Ok(())
    });
    let failures = jobs
        .iter()
        .zip(results)
        .filter_map(|(&(i, c), r)| r.err().map(|e| (format!("{}/{}", cfg.inputs[i].label, conditions[c].id), e)))
        .collect();
    ctx.finish("render", written, failures, jobs.len())
}

fn write_reports(ctx: &Context, report: &ComparisonReport, written: &Written) -> Result<()> {
    let p = ctx.out.join(REPORT_JSON);
    write_json(&p, report)?;
    written.add(p);
    let p = ctx.out.join(REPORT_CSV);
    tables::write_comparison(&p, report)?;
    written.add(p);
    Ok(())
}

fn measure(path: &Path, config: &MetricConfig) -> Result<MetricReport> {
    let brir = wav::read_binaural(path)?;
    report_with(&brir, config).map_err(|e| ToolError::file(path, e))
}

fn compare_files(ctx: &Context, cfg: &CompareConfig) -> Result<ComparisonReport> {
    let cases = &cfg.cases;
    let measured: Vec<Result<(MetricReport, Vec<MetricReport>)>> = ctx.runner.map(cases, |c| {
        let reference = measure(&resolve(&ctx.base, &c.reference), &cfg.metrics)?;
        let mut systems: Vec<_> = c.systems.iter().collect();
        systems.sort_by(|a, b| a.id.cmp(&b.id));
        let reports = systems.iter().map(|s| measure(&resolve(&ctx.base, &s.path), &cfg.metrics)).collect::<Result<_>>()?;
        Ok((reference, reports))
    });
    let mut failures = Vec::new();
    let mut references = Vec::new();
    let mut per_case = Vec::new();
    for (c, m) in cases.iter().zip(measured) {
        match m {
            Ok((r, s)) => {
                references.push(r);
                per_case.push(s);
            }
            Err(e) => failures.push((c.scene.clone(), e)),
        }
    }
    if !failures.is_empty() {
        return Err(ToolError::Partial { total: cases.len(), failures });
    }
    let mut ids: Vec<_> = cases[0].systems.iter().collect();
    ids.sort_by(|a, b| a.id.cmp(&b.id));
    let systems: Vec<MeasuredSystem> = ids
        .iter()
        .enumerate()
        .map(|(k, s)| MeasuredSystem { id: s.id.clone(), label: s.label.clone(), reports: per_case.iter().map(|r| r[k]).collect() })
        .collect();
    let scenes: Vec<String> = cases.iter().map(|c| c.scene.clone()).collect();
    Ok(build_report(ctx.seed, &scenes, &references, &systems)?)
}

fn compare_simulated(ctx: &Context, cfg: &CompareConfig, written: &Written) -> Result<ComparisonReport> {
    let scenes = config::expand_scenes(&cfg.scenes)?;
    let conditions = cfg.conditions.conditions()?;
    let settings = cfg.render.unwrap_or_else(srir_core::ism::apl_room_settings);
    let hrirs = load_hrirs(&cfg.hrir, &ctx.base, settings.sample_rate)?;
    let sims = simulate_all(ctx, &scenes, &settings, &hrirs);
    let mut cases = Vec::with_capacity(scenes.len());
    let mut failures = Vec::new();
    for (s, sim) in scenes.iter().zip(sims) {
        match sim {
            Ok(sim) => cases.push(SceneCase { label: s.label.clone(), input: PipelineInput::from(&sim), reference: sim.reference }),
            Err(e) => failures.push((s.label.clone(), e)),
        }
    }
    if !failures.is_empty() {
        return Err(ToolError::Partial { total: scenes.len(), failures });
    }
    let loader = external_loader(ctx.base.clone());
    let resources =
        resolve_conditions(&ctx.runner, &conditions, settings.sample_rate, &loader).into_iter().collect::<Result<Vec<_>>>()?;
    let run = ComparisonRun { scenes: cases, conditions, seed: ctx.seed, metric_config: cfg.metrics };
    if ctx.dump {
        for case in &run.scenes {
            let p = ctx.out.join(&case.label).join("reference.wav");
            wav::write_binaural(&p, &normalize_direct_energy(&case.reference)?)?;
            written.add(p);
        }
    }
    parallel_comparison(&ctx.runner, &run, &resources, |ev| {
        let id = &run.conditions[ev.condition].id;
        let label = &run.scenes[ev.scene].label;
        log(format!("evaluated {label}/{id}"));
        if ctx.dump {
            write_condition(&ctx.out.join(label), id, &ev.output, true, written)?;
        }
        Ok(())
    })
}

/// Metric reports, errors against the reference and pooled MAE/MSD, as
/// `report.json` and `report.csv`.
pub fn cmd_compare(g: &Globals) -> Result<()> {
    let path = required_config(g)?;
    let cfg: CompareConfig = config::load(path)?;
    let ctx = Context::new(g, cfg.seed, cfg.output_dir.as_deref())?;
    cfg.check(&ctx.base)?;
    let written = Written::default();
    let report = if cfg.cases.is_empty() { compare_simulated(&ctx, &cfg, &written) } else { compare_files(&ctx, &cfg) };
    match report {
        Ok(r) => {
            write_reports(&ctx, &r, &written)?;
            for s in &r.summaries {
                log(format!(
                    "{}: ITD MAE {:.1} us, ILD low MAE {:.2} dB, T30 MSD {:+.3} s",
                    s.condition, s.summary.itd_us.mae, s.summary.ild_low_db.mae, s.summary.t30_mid_s.msd
                ));
            }
            ctx.finish("compare", written, Vec::new(), 0)
        }
        Err(e) => {
            write_manifest(&ctx.out, "compare", ctx.seed, &written.take())?;
            Err(e)
        }
    }
}

/// The single-BRIR report, with ITD over both the direct segment and the
/// full response.
#[derive(Debug, Serialize)]
pub struct MetricsOutput {
    pub brir: String,
    pub report: MetricReport,
    pub itd_direct_us: f64,
    pub itd_full_us: f64,
}

pub fn metrics_of(brir: &BinauralIr, name: &str, config: &MetricConfig) -> Result<MetricsOutput> {
    Ok(MetricsOutput {
        brir: name.into(),
        report: report_with(brir, config)?,
        itd_direct_us: itd_with(brir, ItdSegment::Direct)?,
        itd_full_us: itd_with(brir, ItdSegment::Full)?,
    })
}

/// `brir` overrides the config's file. Without an output directory the
/// JSON goes to standard output.
pub fn cmd_metrics(g: &Globals, brir: Option<&Path>) -> Result<()> {
    let cfg: MetricsConfig = match &g.config {
        Some(p) => config::load(p)?,
        None => MetricsConfig { seed: None, output_dir: None, brir: None, metrics: MetricConfig::default() },
    };
    let base = config_dir(g);
    let path = match (brir, &cfg.brir) {
        (Some(b), _) => b.to_path_buf(),
        (None, Some(b)) => resolve(&base, b),
        (None, None) => return Err(ToolError::config("metrics needs a BRIR file")),
    };
    if !path.is_file() {
        return Err(ToolError::config(format!("{}: file not found", path.display())));
    }
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let ir = wav::read_binaural(&path)?;
    let out = metrics_of(&ir, &name, &cfg.metrics).map_err(|e| match e {
        ToolError::Core(c) => ToolError::file(&path, c),
        e => e,
    })?;
    if g.output.is_none() && cfg.output_dir.is_none() {
        println!("{}", serde_json::to_string_pretty(&out).map_err(|e| ToolError::Runtime(e.to_string()))?);
        return Ok(());
    }
    let ctx = Context::new(g, cfg.seed, cfg.output_dir.as_deref())?;
    let written = Written::default();
    let p = ctx.out.join("metrics.json");
    write_json(&p, &out)?;
    written.add(p);
    let p = ctx.out.join("metrics.csv");
    tables::write_metric_report(&p, &name, &out.report)?;
    written.add(p);
    ctx.finish("metrics", written, Vec::new(), 1)
}

/// `sweep.wav` and `inverse.wav`.
pub fn cmd_ess_generate(g: &Globals) -> Result<()> {
    let cfg: EssGenerateConfig = match &g.config {
        Some(p) => config::load(p)?,
        None => EssGenerateConfig { seed: None, output_dir: None, sweep: Default::default() },
    };
    let ctx = Context::new(g, cfg.seed, cfg.output_dir.as_deref())?;
    let (sweep, inverse) = generate_ess_with(&cfg.sweep).map_err(|e| ToolError::config(format!("sweep: {e}")))?;
    let written = Written::default();
    for (name, ir) in [("sweep.wav", &sweep), ("inverse.wav", &inverse)] {
        let p = ctx.out.join(name);
        wav::write_mono(&p, ir)?;
        written.add(p);
    }
    ctx.finish("ess-generate", written, Vec::new(), 2)
}

/// `ir.wav`, one channel per recorded channel.
pub fn cmd_ess_deconvolve(g: &Globals) -> Result<()> {
    let path = required_config(g)?;
    let cfg: EssDeconvolveConfig = config::load(path)?;
    let ctx = Context::new(g, cfg.seed, cfg.output_dir.as_deref())?;
    let recording = resolve(&ctx.base, &cfg.recording);
    let inverse_path = resolve(&ctx.base, &cfg.inverse);
    for p in [&recording, &inverse_path] {
        if !p.is_file() {
            return Err(ToolError::config(format!("{}: file not found", p.display())));
        }
    }
    let (channels, fs) = wav::read_channels(&recording)?;
    let inverse = wav::read_mono(&inverse_path)?;
    if inverse.sample_rate() != fs {
        return Err(ToolError::config("recording and inverse sweep sample rates differ"));
    }
    let pre_roll = match cfg.pre_roll_s {
        Some(s) if s >= 0.0 => (s * fs as f64).round() as usize,
        Some(_) => return Err(ToolError::config("pre_roll_s must be non-negative")),
        None => srir_core::dsp::ess::default_pre_roll(fs),
    };
    let irs = channels
        .into_iter()
        .map(|c| {
            let rec = MonoIr::new(c, fs)?;
            deconvolve_ess_with(&rec, &inverse, EssTrim::Linear { pre_roll })
        })
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| ToolError::file(&recording, e))?;
    let refs: Vec<&[f64]> = irs.iter().map(MonoIr::samples).collect();
    let written = Written::default();
    let p = ctx.out.join("ir.wav");
    wav::write_channels(&p, &refs, fs)?;
    written.add(p);
    ctx.finish("ess-deconvolve", written, Vec::new(), 1)
}

/// Condition ids a render config would produce, in report order.
pub fn planned_conditions(set: &ConditionSet) -> Result<Vec<String>> {
    Ok(condition_ids(&set.conditions()?))
}
