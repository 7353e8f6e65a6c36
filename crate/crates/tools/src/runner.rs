//! Parallel batch execution. Results come back in input order whatever the
//! thread count, and each job is itself single-threaded, so outputs do not
//! depend on scheduling.

use std::sync::Mutex;

use rayon::prelude::*;
use srir_core::geometry::HrirSet;
use srir_core::metrics::MetricReport;
use srir_core::pipeline::{
    assemble_report, build_grid, evaluate_scene_condition, reference_report, ComparisonReport, ComparisonRun,
    ConditionOutput, ConditionResources, HrirRef, SystemCondition,
};

use crate::error::{Result, ToolError};

static LOG: Mutex<()> = Mutex::new(());

/// Writes one line to standard error, never interleaved with another.
pub fn log(msg: impl AsRef<str>) {
    let _guard = LOG.lock().unwrap_or_else(|e| e.into_inner());
    eprintln!("{}", msg.as_ref());
}

pub struct Runner {
    pool: rayon::ThreadPool,
}

impl Runner {
    /// `threads = 0` uses one thread per core.
    pub fn new(threads: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| ToolError::Runtime(format!("thread pool: {e}")))?;
        Ok(Runner { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// Ordered parallel map.
    pub fn map<T: Sync, R: Send>(&self, items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
        self.pool.install(|| items.par_iter().map(f).collect())
    }
}

/// Resolves each condition's grid and HRIRs, sharing one copy between
/// conditions that name the same pair. `External` HRIRs come from
/// `load_external`.
pub fn resolve_conditions(
    runner: &Runner,
    conditions: &[SystemCondition],
    sample_rate: u32,
    load_external: &(dyn Fn(&str) -> Result<HrirSet> + Sync),
) -> Vec<Result<std::sync::Arc<ConditionResources>>> {
    let mut keys: Vec<usize> = Vec::new();
    let mut slot = Vec::with_capacity(conditions.len());
    for (i, c) in conditions.iter().enumerate() {
        let same = keys.iter().position(|&k| {
            conditions[k].resolved_grid() == c.resolved_grid() && conditions[k].resolved_hrir() == c.resolved_hrir()
        });
        slot.push(match same {
            Some(s) => s,
            None => {
                keys.push(i);
                keys.len() - 1
            }
        });
    }
    let resolved: Vec<Result<std::sync::Arc<ConditionResources>>> = runner.map(&keys, |&k| {
        let c = &conditions[k];
        let res = match c.resolved_hrir() {
            HrirRef::External { path } => {
                let grid = build_grid(c.resolved_grid())?;
                let hrirs = load_external(&path)?;
                if hrirs.sample_rate() != sample_rate {
                    return Err(ToolError::config(format!(
                        "HRIR set '{path}' is at {} Hz, the input at {sample_rate} Hz",
                        hrirs.sample_rate()
                    )));
                }
                ConditionResources { grid, hrirs }
            }
            _ => c.resolve(sample_rate)?,
        };
        Ok(std::sync::Arc::new(res))
    });
    slot.iter()
        .enumerate()
        .map(|(i, &s)| match &resolved[s] {
            Ok(r) => Ok(r.clone()),
            Err(e) => {
                let msg = format!("condition '{}': {e}", conditions[i].id);
                Err(if e.is_configuration() { ToolError::Config(msg) } else { ToolError::Runtime(msg) })
            }
        })
        .collect()
}

/// One scene-condition evaluation of a parallel comparison.
pub struct Evaluation {
    pub scene: usize,
    pub condition: usize,
    pub output: ConditionOutput,
    pub report: MetricReport,
}

/// Every scene-condition pair in parallel, then a single-threaded report
/// assembly. `keep` sees each evaluation inside its job, before the output
/// is dropped. Any failure aborts the comparison, with every failing pair
/// listed.
pub fn parallel_comparison(
    runner: &Runner,
    run: &ComparisonRun,
    resources: &[std::sync::Arc<ConditionResources>],
    keep: impl Fn(&Evaluation) -> Result<()> + Sync,
) -> Result<ComparisonReport> {
    run.validate()?;
    let references: Vec<Result<MetricReport>> =
        runner.map(&run.scenes, |s| reference_report(s, &run.metric_config).map_err(ToolError::from));
    let jobs: Vec<(usize, usize)> =
        (0..run.conditions.len()).flat_map(|c| (0..run.scenes.len()).map(move |s| (s, c))).collect();
    let results = runner.map(&jobs, |&(s, c)| {
        let (output, report) = evaluate_scene_condition(&run.scenes[s], &run.conditions[c], &resources[c], run)?;
        let ev = Evaluation { scene: s, condition: c, output, report };
        keep(&ev)?;
        Ok::<_, ToolError>(ev.report)
    });
    let mut failures = Vec::new();
    let mut refs = Vec::with_capacity(references.len());
    for (s, r) in references.into_iter().enumerate() {
        match r {
            Ok(r) => refs.push(r),
            Err(e) => failures.push((format!("{}/reference", run.scenes[s].label), e)),
        }
    }
    let mut systems = vec![Vec::with_capacity(run.scenes.len()); run.conditions.len()];
    for (&(s, c), r) in jobs.iter().zip(results) {
        match r {
            Ok(r) => systems[c].push(r),
            Err(e) => failures.push((format!("{}/{}", run.scenes[s].label, run.conditions[c].id), e)),
        }
    }
    if !failures.is_empty() {
        return Err(ToolError::Partial { total: jobs.len() + run.scenes.len(), failures });
    }
    Ok(assemble_report(run, &refs, &systems)?)
}
