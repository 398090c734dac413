//! Experiment configs, result records and task dispatch.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use kmlab::analysis::lattice::path_trials;
use kmlab::analysis::{chernoff_check, exact_chain_rejection_prob, ChernoffCheck, RejectionEstimate, VStat};
use kmlab::boolfn::{FunctionSpec, QueryLedger};
use kmlab::exec::{map_chunks, stream_rng, RNG_ALGORITHM};
use kmlab::generators::{
    balanced_blocks, hard_family_sample, hard_function, intro_band_function, HardFunctionParams, DEFAULT_C_MID, DEFAULT_C_SPLIT,
};
use kmlab::kmono::{exact_distance_small, matching_lower_bound, monotonicity_index, symmetric_distance};
use kmlab::testers::chain_tester_with_rng;
use kmlab::{exec::rng_from_seed, Execution, VERSION};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{config, CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Gen,
    Check,
    Dist,
    Test,
    ExactProb,
    Bounds,
    Stats,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Option<Task>,
    /// Subtask: `bb`, `hard`, `band` for gen, `km` for check, `chain` for
    /// test, `hypergeom` for bounds, `v` for stats.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, rename = "fn", skip_serializing_if = "Option::is_none")]
    pub function: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_split: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_mid: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chains: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub compare_exact: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<PathBuf>,
    /// JSON output; stdout when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Per-trial CSV log.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

/// Hard-function parameters inline or in a file. A short form names only
/// `n`, `k`, `s` and optionally the two constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamsInput {
    Full(HardFunctionParams),
    Preset {
        n: usize,
        k: usize,
        s: usize,
        #[serde(default)]
        c_split: Option<f64>,
        #[serde(default)]
        c_mid: Option<f64>,
    },
    Path(PathBuf),
}

impl ParamsInput {
    pub fn resolve(&self) -> CliResult<HardFunctionParams> {
        match self {
            ParamsInput::Full(p) => {
                p.validate()?;
                Ok(p.clone())
            }
            ParamsInput::Preset { n, k, s, c_split, c_mid } => Ok(HardFunctionParams::with_constants(
                *n,
                *k,
                *s,
                c_split.unwrap_or(DEFAULT_C_SPLIT),
                c_mid.unwrap_or(DEFAULT_C_MID),
            )?),
            ParamsInput::Path(p) => {
                let v: ParamsInput = read_json(p)?;
                if matches!(v, ParamsInput::Path(_)) {
                    return Err(config(format!("{}: expected parameters, found a path", p.display())));
                }
                v.resolve()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub task: String,
    pub config: ExperimentConfig,
    pub outputs: Value,
    pub wall_time_ms: f64,
    pub version: String,
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rng: Option<String>,
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.display().to_string(), source })
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

pub fn to_pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

impl ExperimentConfig {
    fn task(&self) -> CliResult<Task> {
        self.task.ok_or_else(|| config("missing task"))
    }

    fn kind_or(&self, default: &str) -> String {
        self.kind.clone().unwrap_or_else(|| default.to_string())
    }

    fn need<T: Copy>(v: Option<T>, name: &str) -> CliResult<T> {
        v.ok_or_else(|| config(format!("missing {name}")))
    }

    fn seed(&self) -> CliResult<u64> {
        Self::need(self.seed, "seed (mandatory for randomized tasks)")
    }

    fn function(&self) -> CliResult<FunctionSpec> {
        match (&self.function, &self.params) {
            (Some(p), _) => read_json(p),
            (None, Some(params)) => Ok(hard_function(&params.resolve()?)?),
            (None, None) => Err(config("missing fn or params")),
        }
    }

    fn params(&self) -> CliResult<HardFunctionParams> {
        self.params.as_ref().ok_or_else(|| config("missing params"))?.resolve()
    }

    pub fn validate(&self) -> CliResult<()> {
        let task = self.task()?;
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e <= 1.0) {
                return Err(config(format!("epsilon must lie in (0, 1], got {e}")));
            }
        }
        let randomized = matches!(task, Task::Test | Task::Stats);
        if randomized && self.seed.is_none() {
            return Err(config("seed is mandatory for randomized tasks"));
        }
        let kinds: &[&str] = match task {
            Task::Gen => &["bb", "hard", "band"],
            Task::Check => &["km"],
            Task::Test => &["chain"],
            Task::Bounds => &["hypergeom"],
            Task::Stats => &["v"],
            Task::Dist | Task::ExactProb => &[],
        };
        if let Some(kind) = &self.kind {
            if !kinds.contains(&kind.as_str()) {
                return Err(config(format!("unknown kind {kind:?} for this task")));
            }
        }
        Ok(())
    }
}

/// Runs one experiment and writes its outputs.
pub fn run(cfg: &ExperimentConfig, exec: Execution) -> CliResult<ResultRecord> {
    cfg.validate()?;
    let start = Instant::now();
    let task = cfg.task()?;
    let (name, outputs) = match task {
        Task::Gen => {
            let kind = cfg.kind_or("hard");
            (format!("gen {kind}"), gen(cfg, &kind)?)
        }
        Task::Check => ("check km".into(), json!({ "km": monotonicity_index(&cfg.function()?)? })),
        Task::Dist => ("dist".into(), dist(cfg)?),
        Task::Test => ("test chain".into(), test_chain(cfg, exec)?),
        Task::ExactProb => ("exact-prob".into(), exact_prob(cfg)?),
        Task::Bounds => ("bounds hypergeom".into(), bounds(cfg)?),
        Task::Stats => ("stats v".into(), stats_v(cfg, exec)?),
    };
    let randomized = matches!(task, Task::Test | Task::Stats) || (task == Task::Gen && cfg.seed.is_some());
    let record = ResultRecord {
        task: name,
        config: cfg.clone(),
        outputs,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        version: VERSION.to_string(),
        seed: cfg.seed,
        rng: randomized.then(|| RNG_ALGORITHM.to_string()),
    };
    if task != Task::Gen {
        emit(cfg.out.as_deref(), &to_pretty(&record))?;
    }
    Ok(record)
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn gen(cfg: &ExperimentConfig, kind: &str) -> CliResult<Value> {
    let n = ExperimentConfig::need(cfg.n, "n")?;
    let (f, parameters) = match kind {
        "bb" => {
            let blocks = ExperimentConfig::need(cfg.blocks, "blocks")?;
            let (profile, partition) = balanced_blocks(n, blocks)?;
            (FunctionSpec::Symmetric(profile), json!({ "n": n, "blocks": blocks, "partition": partition }))
        }
        "band" => (FunctionSpec::Symmetric(intro_band_function(n)?), json!({ "n": n })),
        _ => {
            let k = ExperimentConfig::need(cfg.k, "k")?;
            let s = ExperimentConfig::need(cfg.s, "s")?;
            let params = HardFunctionParams::with_constants(
                n,
                k,
                s,
                cfg.c_split.unwrap_or(DEFAULT_C_SPLIT),
                cfg.c_mid.unwrap_or(DEFAULT_C_MID),
            )?;
            let f = match cfg.seed {
                Some(seed) => hard_family_sample(&params, &mut rng_from_seed(seed))?,
                None => hard_function(&params)?,
            };
            (f, serde_json::to_value(&params).expect("params serialize"))
        }
    };
    let mut doc = serde_json::to_value(&f).expect("specs serialize");
    let provenance = json!({
        "generator": kind,
        "parameters": parameters,
        "seed": cfg.seed,
        "rng": cfg.seed.map(|_| RNG_ALGORITHM),
        "version": VERSION,
    });
    doc["provenance"] = provenance.clone();
    emit(cfg.out.as_deref(), &to_pretty(&doc))?;
    Ok(json!({ "n": f.n(), "kind": f.kind(), "provenance": provenance, "path": cfg.out }))
}

fn dist(cfg: &ExperimentConfig) -> CliResult<Value> {
    let f = cfg.function()?;
    let k = ExperimentConfig::need(cfg.k, "k")?;
    let cert = matching_lower_bound(&f, k)?;
    cert.verify(&f)?;
    let upper = match &f {
        FunctionSpec::Symmetric(p) => Some(symmetric_distance(p, k).0),
        _ => None,
    };
    let exact = if f.n() <= 4 { Some(exact_distance_small(&f, k)?) } else { None };
    if let Some(path) = &cfg.certificate {
        write_text(path, &to_pretty(&cert))?;
    }
    Ok(json!({
        "lower_bound": cert.bound.to_f64(),
        "lower_bound_exact": cert.bound.to_string(),
        "upper_bound": upper.as_ref().map(|u| u.to_f64()),
        "upper_bound_exact": upper.as_ref().map(|u| u.to_string()),
        "exact": exact.as_ref().map(|e| e.to_f64()),
        "tuples": cert.tuples.len(),
        "forced_flips": cert.total_forced(),
        "certificate_path": cfg.certificate,
    }))
}

#[derive(Serialize)]
struct TrialRow {
    trial: u64,
    rejected: u8,
    queries: u64,
    violation_levels: String,
}

fn test_chain(cfg: &ExperimentConfig, exec: Execution) -> CliResult<Value> {
    let f = cfg.function()?;
    let k = ExperimentConfig::need(cfg.k, "k")?;
    let chains = ExperimentConfig::need(cfg.chains, "chains")?;
    let trials = ExperimentConfig::need(cfg.trials, "trials")?;
    let seed = cfg.seed()?;
    if trials == 0 {
        return Err(config("need at least one trial"));
    }
    let chunks = map_chunks(exec, trials, |c, first, count| -> kmlab::Result<Vec<TrialRow>> {
        let mut rng = stream_rng(seed, c);
        (first..first + count)
            .map(|trial| {
                let mut ledger = QueryLedger::new();
                let r = chain_tester_with_rng(&f, k, chains, &mut rng, &mut ledger)?;
                let levels = r.witness.as_ref().map(|w| w.levels()).unwrap_or_default();
                Ok(TrialRow {
                    trial,
                    rejected: r.rejected() as u8,
                    queries: r.queries,
                    violation_levels: levels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(";"),
                })
            })
            .collect()
    });
    let mut rows = Vec::with_capacity(trials as usize);
    for c in chunks {
        rows.extend(c?);
    }
    let rejections = rows.iter().filter(|r| r.rejected == 1).count() as u64;
    let queries: u64 = rows.iter().map(|r| r.queries).sum();
    if let Some(path) = &cfg.csv {
        let mut w = csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(source) => CliError::Io { path: path.display().to_string(), source },
            other => config(format!("{other:?}")),
        })?;
        for r in &rows {
            w.serialize(r)?;
        }
        w.flush().map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    }
    let estimate = RejectionEstimate::from_counts(rejections, trials, seed);
    let mut out = json!({
        "rejections": rejections,
        "trials": trials,
        "mean_queries": queries as f64 / trials as f64,
        "estimate": estimate,
        "csv": cfg.csv,
    });
    if cfg.compare_exact {
        let params = match &cfg.params {
            Some(p) => p.resolve()?,
            None => hard_params_of(&f).ok_or_else(|| config("compare_exact needs params or a hard function"))?,
        };
        let single = exact_chain_rejection_prob(&params, k)?.p;
        let p = 1.0 - (1.0 - single).powi(chains as i32);
        out["exact"] = json!({
            "single_chain": single,
            "p": p,
            "ci_contains_exact": estimate.contains(p),
            "status": if estimate.contains(p) { "pass" } else { "fail" },
        });
    }
    Ok(out)
}

fn hard_params_of(f: &FunctionSpec) -> Option<HardFunctionParams> {
    match f {
        FunctionSpec::TwoPart(t) => t.params().cloned(),
        FunctionSpec::Permuted { inner, .. } => hard_params_of(inner),
        _ => None,
    }
}

fn exact_prob(cfg: &ExperimentConfig) -> CliResult<Value> {
    let params = cfg.params()?;
    let k = cfg.k.unwrap_or(params.k);
    let r = exact_chain_rejection_prob(&params, k)?;
    Ok(json!({
        "p": r.p,
        "k": k,
        "sqrt_n": (params.n as f64).sqrt(),
        "dp_dimensions": r.dp_dimensions,
        "assumption_tail": r.assumption_tail,
        "params": params,
    }))
}

/// Grid of hypergeometric points: an explicit list of `[u, N, t]` triples
/// or the product of three axes.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum Grid {
    Points { points: Vec<(u64, u64, u64)> },
    Axes { u: Vec<u64>, population: Vec<u64>, t: Vec<u64> },
}

fn bounds(cfg: &ExperimentConfig) -> CliResult<Value> {
    let path = cfg.grid.as_ref().ok_or_else(|| config("missing grid"))?;
    let grid: Grid = read_json(path)?;
    let points = match grid {
        Grid::Points { points } => points,
        Grid::Axes { u, population, t } => {
            let mut v = Vec::new();
            for &n in &population {
                for &a in &u {
                    for &b in &t {
                        if a <= n && b <= n {
                            v.push((a, n, b));
                        }
                    }
                }
            }
            v
        }
    };
    if points.is_empty() {
        return Err(config("empty grid"));
    }
    let checks = points.iter().map(|&(u, n, t)| chernoff_check(u, n, t)).collect::<kmlab::Result<Vec<ChernoffCheck>>>()?;
    if let Some(path) = &cfg.csv {
        let mut w = csv::Writer::from_path(path)?;
        for c in &checks {
            w.serialize(c)?;
        }
        w.flush().map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    }
    let violations = checks.iter().filter(|c| !c.holds).count();
    Ok(json!({ "points": checks.len(), "violations": violations, "checks": checks }))
}

#[derive(Serialize)]
struct VRow {
    trial: usize,
    v_min: Option<usize>,
    v_max: Option<usize>,
    v_size: usize,
    alternation: usize,
}

fn stats_v(cfg: &ExperimentConfig, exec: Execution) -> CliResult<Value> {
    let params = cfg.params()?;
    let trials = ExperimentConfig::need(cfg.trials, "trials")?;
    let seed = cfg.seed()?;
    let k = cfg.k.unwrap_or(params.k);
    let runs = path_trials(&params, trials, seed, exec)?;
    if let Some(path) = &cfg.csv {
        let mut w = csv::Writer::from_path(path)?;
        for (i, t) in runs.iter().enumerate() {
            w.serialize(VRow { trial: i, v_min: t.v.min, v_max: t.v.max, v_size: t.v.size(), alternation: t.alternation })?;
        }
        w.flush().map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    }
    let stat = VStat::from_entries(runs.iter().map(|t| &t.v));
    let violating = runs.iter().filter(|t| t.alternation > k).count();
    let small_v_violations = runs.iter().filter(|t| t.alternation > k && t.v.size() < 2).count();
    Ok(json!({
        "trials": trials,
        "histogram": stat.histogram,
        "fraction_v_at_least_2": stat.fraction_at_least(2),
        "violating": violating,
        "violating_with_v_below_2": small_v_violations,
        "csv": cfg.csv,
    }))
}
