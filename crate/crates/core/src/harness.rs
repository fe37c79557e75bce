//! Experiment campaigns: instance batches, seeded solver runs, reference
//! sets and score tables.
//!
//! Everything a campaign produces is a function of the instance bytes, the
//! base seed and the solver settings. Runs execute in parallel but each one
//! owns its random stream, derived from a hash of its identity, so the
//! schedule never leaks into the results.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::genetic::{ga_run, GaConfig};
use crate::instances::{generate, instance_to_string, read_instance, GenParams, InstanceSpec};
use crate::metrics::{build_reference, d1_weighted, d2_weighted, spread_weights};
use crate::model::{Instance, Objectives};
use crate::molsd::molsd_run;
use crate::record::{Algorithm, RunRecord};

/// Name of the file `cmd_generate` writes next to the instances.
pub const MANIFEST: &str = "manifest.txt";

/// First eight bytes (little endian) of SHA-256 over the base seed and the
/// NUL-separated parts.
pub fn hash_seed(base_seed: u64, parts: &[&str]) -> u64 {
    let mut h = Sha256::new();
    h.update(base_seed.to_le_bytes());
    for p in parts {
        h.update([0u8]);
        h.update(p.as_bytes());
    }
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// Seed of one campaign run.
pub fn run_seed(base_seed: u64, instance: &str, algorithm: Algorithm, index: usize) -> u64 {
    hash_seed(base_seed, &[instance, algorithm.name(), &index.to_string()])
}

/// Seed used to generate the instance of one class.
pub fn instance_seed(base_seed: u64, spec: &InstanceSpec) -> u64 {
    hash_seed(base_seed, &["generate", &spec.to_string()])
}

/// Optional replacements for the GA defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GaOverrides {
    pub pop_size: Option<usize>,
    pub p_mut: Option<f64>,
    pub stagnation: Option<u64>,
}

impl GaOverrides {
    pub fn apply(&self, mut config: GaConfig) -> GaConfig {
        if let Some(n) = self.pop_size {
            config.pop_size = n;
        }
        if let Some(p) = self.p_mut {
            config.p_mut = p;
        }
        if let Some(s) = self.stagnation {
            config.stagnation_limit = s;
        }
        config
    }
}

/// Runs one solver. Solver failures end up in the record instead of being
/// returned.
pub fn run_one(
    instance: &Instance,
    algorithm: Algorithm,
    seed: u64,
    overrides: &GaOverrides,
) -> RunRecord {
    let outcome = match GaConfig::for_algorithm(algorithm, seed) {
        None => molsd_run(instance, seed),
        Some(cfg) => {
            let cfg = overrides.apply(cfg);
            // An explicit p_mut on UOBX must not turn the record into another
            // algorithm.
            ga_run(instance, cfg).map(|mut r| {
                r.algorithm = algorithm;
                r
            })
        }
    };
    outcome.unwrap_or_else(|e| RunRecord::failed(instance.name(), algorithm, seed, &e))
}

/// Optional replacements for the per-distribution generator defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GenOverrides {
    pub plane: Option<f64>,
    pub demand_min: Option<u32>,
    pub demand_max: Option<u32>,
    pub unload: Option<f64>,
    pub capacity: Option<f64>,
    pub horizon_start: Option<f64>,
    pub horizon_end: Option<f64>,
    pub clusters: Option<usize>,
    pub cluster_spread: Option<f64>,
}

impl GenOverrides {
    pub fn apply(&self, mut p: GenParams) -> GenParams {
        p.plane = self.plane.unwrap_or(p.plane);
        p.demand_min = self.demand_min.unwrap_or(p.demand_min);
        p.demand_max = self.demand_max.unwrap_or(p.demand_max);
        p.unload = self.unload.unwrap_or(p.unload);
        p.capacity = self.capacity.unwrap_or(p.capacity);
        p.horizon_start = self.horizon_start.unwrap_or(p.horizon_start);
        p.horizon_end = self.horizon_end.unwrap_or(p.horizon_end);
        p.clusters = self.clusters.or(p.clusters);
        p.cluster_spread = self.cluster_spread.unwrap_or(p.cluster_spread);
        p
    }
}

/// Generates one instance per distinct class and writes `<stem>.txt` files
/// plus a manifest listing them. Nothing is written if any class fails.
pub fn cmd_generate(
    specs: &[InstanceSpec],
    base_seed: u64,
    overrides: &GenOverrides,
    out: &Path,
) -> Result<Vec<PathBuf>> {
    let mut seen = BTreeSet::new();
    let mut batch = Vec::new();
    for spec in specs {
        if !seen.insert(spec.to_string()) {
            continue;
        }
        let params = overrides.apply(GenParams::for_distribution(spec.alpha));
        let mut rng = ChaCha8Rng::seed_from_u64(instance_seed(base_seed, spec));
        let inst = generate(spec, &params, spec.file_stem(), &mut rng)?;
        batch.push((spec.file_stem(), instance_to_string(&inst)));
    }
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut paths = Vec::new();
    let mut manifest = String::new();
    for (stem, text) in batch {
        let path = out.join(format!("{stem}.txt"));
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        manifest.push_str(&format!("{stem}.txt\n"));
        paths.push(path);
    }
    let mpath = out.join(MANIFEST);
    fs::write(&mpath, manifest).map_err(|e| Error::io(&mpath, e))?;
    Ok(paths)
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_instance(BufReader::new(file))
}

/// A batch of runs: every algorithm on every instance, `runs` times.
#[derive(Debug, Clone)]
pub struct Campaign {
    pub instances: Vec<PathBuf>,
    pub algorithms: Vec<Algorithm>,
    pub runs: usize,
    pub base_seed: u64,
    pub out: PathBuf,
    pub overrides: GaOverrides,
}

impl Campaign {
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Config("at least one run per configuration".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Config("no algorithm selected".into()));
        }
        if self.instances.is_empty() {
            return Err(Error::Config("no instance given".into()));
        }
        Ok(())
    }
}

/// File name of a run record. `^` is replaced so names stay shell friendly.
pub fn record_file_name(instance: &str, algorithm: Algorithm, index: usize) -> String {
    format!("{instance}__{}__{index:03}.json", algorithm.name().replace('^', "-"))
}

/// Executes a campaign and writes one record per run; returns their paths
/// in job order.
pub fn cmd_run(campaign: &Campaign) -> Result<Vec<PathBuf>> {
    campaign.validate()?;
    let instances = campaign
        .instances
        .iter()
        .map(|p| load_instance(p))
        .collect::<Result<Vec<_>>>()?;
    let mut jobs = Vec::new();
    for inst in &instances {
        for &algo in &campaign.algorithms {
            for index in 0..campaign.runs {
                jobs.push((inst, algo, index));
            }
        }
    }
    fs::create_dir_all(&campaign.out).map_err(|e| Error::io(&campaign.out, e))?;
    jobs.par_iter()
        .map(|&(inst, algo, index)| {
            let seed = run_seed(campaign.base_seed, inst.name(), algo, index);
            let record = run_one(inst, algo, seed, &campaign.overrides);
            let path = campaign.out.join(record_file_name(inst.name(), algo, index));
            fs::write(&path, record.to_json()?).map_err(|e| Error::io(&path, e))?;
            Ok(path)
        })
        .collect()
}


/// Reads every `*.json` record under `dir`, in file-name order.
pub fn load_records(dir: &Path) -> Result<Vec<RunRecord>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            RunRecord::from_json(&text)
        })
        .collect()
}

/// One line of the score table. Empty cells mark a configuration with no
/// successful run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub instance: String,
    pub algorithm: Algorithm,
    pub mean_d1: Option<f64>,
    pub mean_d2: Option<f64>,
    pub mean_evaluations: Option<f64>,
    pub best_d1_flag: bool,
    pub best_d2_flag: bool,
}

/// d1 and d2 of every successful run against its instance's reference set.
#[derive(Debug, Clone, PartialEq)]
pub struct RunScore {
    pub instance: String,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub d1: f64,
    pub d2: f64,
    pub evaluations: u64,
}

fn usable(r: &RunRecord) -> bool {
    r.is_ok() && !r.archive.is_empty()
}

/// Scores each run against the nondominated union of all runs on the same
/// instance.
pub fn score_runs(records: &[RunRecord]) -> Result<Vec<RunScore>> {
    let mut by_instance: BTreeMap<&str, Vec<&RunRecord>> = BTreeMap::new();
    for r in records.iter().filter(|r| usable(r)) {
        by_instance.entry(&r.instance).or_default().push(r);
    }
    let mut out = Vec::new();
    for (name, runs) in by_instance {
        let fronts: Vec<Vec<Objectives>> = runs.iter().map(|r| r.front()).collect();
        let reference = build_reference(&fronts)?;
        let w = spread_weights(&reference)?;
        for (r, front) in runs.iter().zip(&fronts) {
            out.push(RunScore {
                instance: name.to_string(),
                algorithm: r.algorithm,
                seed: r.seed,
                d1: d1_weighted(front, &reference, &w)?,
                d2: d2_weighted(front, &reference, &w)?,
                evaluations: r.evaluations,
            });
        }
    }
    Ok(out)
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (n, s) = xs.fold((0usize, 0.0), |(n, s), x| (n + 1, s + x));
    (n > 0).then(|| s / n as f64)
}

/// Per instance and algorithm means. Every algorithm that appears anywhere
/// in `records` gets a row for every instance; the best mean per metric and
/// instance is flagged, ties included.
pub fn score_table(records: &[RunRecord]) -> Result<Vec<ScoreRow>> {
    let scores = score_runs(records)?;
    let instances: BTreeSet<&str> = records.iter().map(|r| r.instance.as_str()).collect();
    let algorithms: BTreeSet<Algorithm> = records.iter().map(|r| r.algorithm).collect();
    let mut rows = Vec::new();
    for inst in instances {
        let start = rows.len();
        for &algo in &algorithms {
            let mine: Vec<&RunScore> = scores
                .iter()
                .filter(|s| s.instance == inst && s.algorithm == algo)
                .collect();
            rows.push(ScoreRow {
                instance: inst.to_string(),
                algorithm: algo,
                mean_d1: mean(mine.iter().map(|s| s.d1)),
                mean_d2: mean(mine.iter().map(|s| s.d2)),
                mean_evaluations: mean(mine.iter().map(|s| s.evaluations as f64)),
                best_d1_flag: false,
                best_d2_flag: false,
            });
        }
        let block = &mut rows[start..];
        let best = |f: fn(&ScoreRow) -> Option<f64>, b: &[ScoreRow]| {
            b.iter().filter_map(f).fold(f64::INFINITY, f64::min)
        };
        let b1 = best(|r| r.mean_d1, block);
        let b2 = best(|r| r.mean_d2, block);
        for r in block.iter_mut() {
            r.best_d1_flag = r.mean_d1 == Some(b1);
            r.best_d2_flag = r.mean_d2 == Some(b2);
        }
    }
    Ok(rows)
}

pub fn write_score_csv<W: std::io::Write>(rows: &[ScoreRow], sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

/// Scores the records under `records_dir` and writes the CSV table.
pub fn cmd_score(records_dir: &Path, out: &Path) -> Result<Vec<ScoreRow>> {
    let rows = score_table(&load_records(records_dir)?)?;
    let file = fs::File::create(out).map_err(|e| Error::io(out, e))?;
    write_score_csv(&rows, file)?;
    Ok(rows)
}
