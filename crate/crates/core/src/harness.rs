//! Experiment plans, batched parallel execution and run persistence.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{init_simulation_with, SimOptions, SimulationState, DEFAULT_VIEW_RANGE};
use crate::error::{Error, Result};
use crate::grid::generate_maze;
use crate::metrics::MetricsReport;
use crate::ranking::{ranking_reports, AggregateTable, ConfigCell, Metric, RankingReport, Stats};
use crate::strategy::{StrategyConfig, StrategyKind};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "MAZEX_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "mazex-out";

pub const CSV_HEADER: [&str; 14] = [
    "run_id",
    "method",
    "maze_w",
    "maze_h",
    "obstacle_prob",
    "n_agents",
    "seed",
    "rounds",
    "cost",
    "efficiency",
    "time_s",
    "map_quality",
    "explored_cells",
    "status",
];

/// Weights tried by a sweep when none are given.
pub const DEFAULT_SWEEP_VALUES: [f64; 6] = [0.0, 0.1, 0.2, 0.5, 0.8, 1.0];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub maze_sizes: Vec<(usize, usize)>,
    pub obstacle_probs: Vec<f64>,
    pub agent_counts: Vec<usize>,
    pub strategies: Vec<StrategyConfig>,
    /// Runs per (size, density, agents, strategy) cell.
    pub repetitions: u64,
    /// Repetition `k` of every cell uses seed `base_seed + k`, so all
    /// strategies and agent counts face the same mazes.
    pub base_seed: u64,
    pub workers: usize,
    pub output_dir: PathBuf,
    pub view_range: usize,
    pub check_invariants: bool,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        ExperimentPlan {
            maze_sizes: vec![(15, 15)],
            obstacle_probs: vec![0.15, 0.85],
            agent_counts: vec![1, 2, 4, 6, 8, 10],
            strategies: StrategyKind::ALL
                .into_iter()
                .map(StrategyConfig::new)
                .collect(),
            repetitions: 100,
            base_seed: 0,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            output_dir: std::env::var_os(OUT_DIR_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR)),
            view_range: DEFAULT_VIEW_RANGE,
            check_invariants: false,
        }
    }
}

fn parse_list<T>(value: &str, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(item)
        .collect()
}

fn parse_num<T: std::str::FromStr>(key: &str, s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad value for {key}: {s:?}")))
}

/// Parses `WxH`.
pub fn parse_size(s: &str) -> Result<(usize, usize)> {
    let (w, h) = s
        .trim()
        .split_once(['x', 'X'])
        .ok_or_else(|| Error::Parse(format!("maze size must look like 15x15, got {s:?}")))?;
    Ok((parse_num("maze size", w)?, parse_num("maze size", h)?))
}

impl ExperimentPlan {
    /// Sets one field from its config-file key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "maze_sizes" => self.maze_sizes = parse_list(value, parse_size)?,
            "obstacle_probs" => self.obstacle_probs = parse_list(value, |s| parse_num(key, s))?,
            "agent_counts" => self.agent_counts = parse_list(value, |s| parse_num(key, s))?,
            "strategies" => self.strategies = parse_list(value, str::parse)?,
            "repetitions" => self.repetitions = parse_num(key, value)?,
            "base_seed" => self.base_seed = parse_num(key, value)?,
            "workers" => self.workers = parse_num(key, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value.trim()),
            "view_range" => self.view_range = parse_num(key, value)?,
            "check_invariants" => self.check_invariants = parse_num(key, value)?,
            other => return Err(Error::Parse(format!("unknown plan key {other:?}"))),
        }
        Ok(())
    }

    /// Reads `key = value` lines over the defaults. Blank lines and lines
    /// starting with `#` are skipped; list values are comma separated.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut plan = ExperimentPlan::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", i + 1)))?;
            plan.set(key.trim(), value)
                .map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
        }
        Ok(plan)
    }

    pub fn from_config_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_config_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::invalid("repetitions must be >= 1"));
        }
        if self.maze_sizes.is_empty()
            || self.obstacle_probs.is_empty()
            || self.agent_counts.is_empty()
            || self.strategies.is_empty()
        {
            return Err(Error::invalid(
                "plan needs at least one size, density, agent count and strategy",
            ));
        }
        if self.workers == 0 {
            return Err(Error::invalid("workers must be >= 1"));
        }
        for &(w, h) in &self.maze_sizes {
            if w == 0 || h == 0 {
                return Err(Error::invalid(format!("maze size {w}x{h} is empty")));
            }
        }
        for &p in &self.obstacle_probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(format!("obstacle_prob {p} outside [0, 1]")));
            }
        }
        if self.agent_counts.contains(&0) {
            return Err(Error::invalid("agent counts must be >= 1"));
        }
        for s in &self.strategies {
            s.validate()?;
        }
        Ok(())
    }

    /// Every run in id order: size, density, agent count, strategy, then
    /// repetition varies fastest.
    pub fn runs(&self) -> Vec<RunSpec> {
        let mut out = Vec::new();
        for &(maze_w, maze_h) in &self.maze_sizes {
            for &obstacle_prob in &self.obstacle_probs {
                for &n_agents in &self.agent_counts {
                    for strategy in &self.strategies {
                        for rep in 0..self.repetitions {
                            out.push(RunSpec {
                                run_id: out.len() as u64,
                                strategy: strategy.clone(),
                                maze_w,
                                maze_h,
                                obstacle_prob,
                                n_agents,
                                seed: self.base_seed.wrapping_add(rep),
                                view_range: self.view_range,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

/// Everything needed to reproduce one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub run_id: u64,
    pub strategy: StrategyConfig,
    pub maze_w: usize,
    pub maze_h: usize,
    pub obstacle_prob: f64,
    pub n_agents: usize,
    pub seed: u64,
    pub view_range: usize,
}

impl RunSpec {
    pub fn cell(&self) -> ConfigCell {
        ConfigCell {
            maze_w: self.maze_w,
            maze_h: self.maze_h,
            obstacle_prob: self.obstacle_prob,
            n_agents: self.n_agents,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Ok,
    Aborted,
}

/// One CSV row. Metric columns are empty for aborted runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub run_id: u64,
    pub method: String,
    pub maze_w: usize,
    pub maze_h: usize,
    pub obstacle_prob: f64,
    pub n_agents: usize,
    pub seed: u64,
    pub rounds: Option<u64>,
    pub cost: Option<u64>,
    pub efficiency: Option<f64>,
    pub time_s: Option<f64>,
    pub map_quality: Option<f64>,
    pub explored_cells: Option<usize>,
    pub status: RunStatus,
}

impl ExperimentRecord {
    pub fn new(spec: &RunSpec, outcome: Option<&MetricsReport>) -> Self {
        ExperimentRecord {
            run_id: spec.run_id,
            method: spec.strategy.token(),
            maze_w: spec.maze_w,
            maze_h: spec.maze_h,
            obstacle_prob: spec.obstacle_prob,
            n_agents: spec.n_agents,
            seed: spec.seed,
            rounds: outcome.map(|m| m.rounds),
            cost: outcome.map(|m| m.exploration_cost),
            efficiency: outcome.map(|m| m.exploration_efficiency),
            time_s: outcome.map(|m| m.exploration_time),
            map_quality: outcome.map(|m| m.map_quality),
            explored_cells: outcome.map(|m| m.explored_cells),
            status: if outcome.is_some() {
                RunStatus::Ok
            } else {
                RunStatus::Aborted
            },
        }
    }

    /// The `RunSpec` that reproduces this row.
    pub fn spec(&self, view_range: usize) -> Result<RunSpec> {
        Ok(RunSpec {
            run_id: self.run_id,
            strategy: self.method.parse()?,
            maze_w: self.maze_w,
            maze_h: self.maze_h,
            obstacle_prob: self.obstacle_prob,
            n_agents: self.n_agents,
            seed: self.seed,
            view_range,
        })
    }

    pub fn cell(&self) -> ConfigCell {
        ConfigCell {
            maze_w: self.maze_w,
            maze_h: self.maze_h,
            obstacle_prob: self.obstacle_prob,
            n_agents: self.n_agents,
        }
    }

    pub fn metrics(&self) -> Option<MetricsReport> {
        Some(MetricsReport {
            rounds: self.rounds?,
            exploration_cost: self.cost?,
            exploration_efficiency: self.efficiency?,
            exploration_time: self.time_s?,
            map_quality: self.map_quality?,
            explored_cells: self.explored_cells?,
        })
    }

    /// Completed with every cell known.
    pub fn is_complete(&self) -> bool {
        self.status == RunStatus::Ok && self.explored_cells == Some(self.maze_w * self.maze_h)
    }

    /// Names of the non-timing fields on which two records disagree.
    pub fn diff(&self, other: &ExperimentRecord) -> Vec<String> {
        let mut out = Vec::new();
        macro_rules! cmp {
            ($($f:ident),*) => {$(
                if self.$f != other.$f {
                    out.push(format!(
                        "{}: {:?} != {:?}",
                        stringify!($f),
                        self.$f,
                        other.$f
                    ));
                }
            )*};
        }
        cmp!(
            run_id,
            method,
            maze_w,
            maze_h,
            obstacle_prob,
            n_agents,
            seed,
            rounds,
            cost,
            efficiency,
            map_quality,
            explored_cells,
            status
        );
        out
    }
}

/// Builds the maze and agents of `spec` and runs it to completion.
pub fn simulate(spec: &RunSpec, options: SimOptions) -> Result<(SimulationState, MetricsReport)> {
    let maze = generate_maze(spec.maze_w, spec.maze_h, spec.obstacle_prob, spec.seed)?;
    let mut sim = init_simulation_with(
        maze,
        spec.n_agents,
        spec.strategy.clone(),
        spec.view_range,
        spec.seed,
        options,
    )?;
    let report = sim.run()?;
    Ok((sim, report))
}

/// A run's row plus the error that aborted it, if any.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub record: ExperimentRecord,
    pub error: Option<String>,
}

pub fn execute(spec: &RunSpec, options: SimOptions) -> RunResult {
    match simulate(spec, options) {
        Ok((_, report)) => RunResult {
            record: ExperimentRecord::new(spec, Some(&report)),
            error: None,
        },
        Err(e) => RunResult {
            record: ExperimentRecord::new(spec, None),
            error: Some(e.to_string()),
        },
    }
}

/// Runs `specs` on `workers` threads; results come back in run-id order.
pub fn execute_all(
    specs: &[RunSpec],
    workers: usize,
    options: SimOptions,
) -> Result<Vec<RunResult>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    let mut results: Vec<RunResult> =
        pool.install(|| specs.par_iter().map(|s| execute(s, options)).collect());
    results.sort_by_key(|r| r.record.run_id);
    Ok(results)
}

pub fn aggregate(records: &[ExperimentRecord]) -> AggregateTable {
    let reports: Vec<Option<MetricsReport>> = records.iter().map(|r| r.metrics()).collect();
    AggregateTable::from_samples(
        records
            .iter()
            .zip(&reports)
            .map(|(r, m)| (r.method.as_str(), r.cell(), m.as_ref())),
    )
}

pub fn write_csv(path: &Path, records: &[ExperimentRecord]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(file);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::Parse(format!(
            "{} does not have the run CSV header",
            path.display()
        )));
    }
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    write_text(path, &(text + "\n"))
}

/// Run-level metadata stored next to the aggregate table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlanMetadata {
    pub plan: Option<ExperimentPlan>,
    pub total_runs: usize,
    pub aborted_runs: usize,
    pub seeding: String,
    pub repetitions: String,
}

#[derive(Serialize)]
struct AggregateFile<'a> {
    metadata: &'a PlanMetadata,
    entries: &'a AggregateTable,
    failures: &'a [Failure],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Failure {
    pub run_id: u64,
    pub error: String,
}

#[derive(Clone, Debug)]
pub struct PlanOutcome {
    pub records: Vec<ExperimentRecord>,
    pub failures: Vec<Failure>,
    pub table: AggregateTable,
    /// Empty when some cell has no completed run to rank.
    pub reports: Vec<RankingReport>,
    pub ranking_error: Option<String>,
}

impl PlanOutcome {
    pub fn all_complete(&self) -> bool {
        self.records.iter().all(ExperimentRecord::is_complete)
    }
}

fn metadata(plan: Option<&ExperimentPlan>, records: &[ExperimentRecord]) -> PlanMetadata {
    PlanMetadata {
        plan: plan.cloned(),
        total_runs: records.len(),
        aborted_runs: records
            .iter()
            .filter(|r| r.status == RunStatus::Aborted)
            .count(),
        seeding: "repetition k of every configuration uses seed base_seed + k".into(),
        repetitions: "per configuration cell (size, obstacle_prob, n_agents, method)".into(),
    }
}

pub fn render_reports(reports: &[RankingReport]) -> String {
    reports
        .iter()
        .map(|r| r.to_string())
        .collect::<Vec<_>>()
        .join("\n")
}

/// Mean table behind the rankings, one line per (method, cell).
pub fn render_means(table: &AggregateTable) -> String {
    let mut s = format!(
        "{:<28} {:>5} {:>5} {:>6} {:>6} {:>10} {:>10} {:>10} {:>12}\n",
        "method", "w", "h", "p", "agents", "rounds", "cost", "eff", "time_s"
    );
    for e in &table.entries {
        let m = |k: Metric| e.mean(k).unwrap_or(f64::NAN);
        s.push_str(&format!(
            "{:<28} {:>5} {:>5} {:>6} {:>6} {:>10.2} {:>10.2} {:>10.4} {:>12.6}\n",
            e.method,
            e.cell.maze_w,
            e.cell.maze_h,
            e.cell.obstacle_prob,
            e.cell.n_agents,
            m(Metric::Rounds),
            m(Metric::Cost),
            m(Metric::Efficiency),
            m(Metric::Time),
        ));
    }
    s
}

/// Aggregates `records` and writes the CSV, aggregate JSON and ranking
/// reports into `dir`.
pub fn write_outputs(
    dir: &Path,
    plan: Option<&ExperimentPlan>,
    records: Vec<ExperimentRecord>,
    failures: Vec<Failure>,
) -> Result<PlanOutcome> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_csv(&dir.join("runs.csv"), &records)?;
    let table = aggregate(&records);
    let meta = metadata(plan, &records);
    write_json(
        &dir.join("aggregate.json"),
        &AggregateFile {
            metadata: &meta,
            entries: &table,
            failures: &failures,
        },
    )?;
    write_text(&dir.join("means.txt"), &render_means(&table))?;
    let (reports, ranking_error) = match ranking_reports(&table) {
        Ok(r) => (r, None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    if ranking_error.is_none() {
        write_json(&dir.join("rankings.json"), &reports)?;
        write_text(&dir.join("rankings.txt"), &render_reports(&reports))?;
    }
    Ok(PlanOutcome {
        records,
        failures,
        table,
        reports,
        ranking_error,
    })
}

fn split_results(results: Vec<RunResult>) -> (Vec<ExperimentRecord>, Vec<Failure>) {
    let mut failures = Vec::new();
    let records = results
        .into_iter()
        .map(|r| {
            if let Some(error) = r.error {
                failures.push(Failure {
                    run_id: r.record.run_id,
                    error,
                });
            }
            r.record
        })
        .collect();
    (records, failures)
}

pub fn run_plan(plan: &ExperimentPlan) -> Result<PlanOutcome> {
    plan.validate()?;
    let options = SimOptions {
        check_invariants: plan.check_invariants,
        record_trace: false,
    };
    let results = execute_all(&plan.runs(), plan.workers, options)?;
    let (records, failures) = split_results(results);
    write_outputs(&plan.output_dir, Some(plan), records, failures)
}

/// Which weight a sweep varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepTarget {
    NewCu,
    CuJgr,
}

impl std::str::FromStr for SweepTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "new-cu" | "lambda" => Ok(SweepTarget::NewCu),
            "cu-jgr" | "lambda_jgr" | "lambda-jgr" => Ok(SweepTarget::CuJgr),
            _ => Err(Error::Parse(format!("unknown sweep target {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanRoundsRow {
    pub variant: String,
    pub cell: ConfigCell,
    pub rounds: Stats,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub target: SweepTarget,
    pub values: Vec<f64>,
    pub variants: Vec<String>,
    /// Copeland elections across the variants.
    pub rankings: Vec<RankingReport>,
    pub mean_rounds: Vec<MeanRoundsRow>,
}

impl SweepReport {
    pub fn render(&self) -> String {
        let mut s = String::new();
        match self.target {
            SweepTarget::NewCu => s.push_str(&render_reports(&self.rankings)),
            SweepTarget::CuJgr => {
                s.push_str(&format!(
                    "{:<28} {:>5} {:>5} {:>6} {:>6} {:>10} {:>10}\n",
                    "variant", "w", "h", "p", "agents", "rounds", "std"
                ));
                for r in &self.mean_rounds {
                    s.push_str(&format!(
                        "{:<28} {:>5} {:>5} {:>6} {:>6} {:>10.2} {:>10.2}\n",
                        r.variant,
                        r.cell.maze_w,
                        r.cell.maze_h,
                        r.cell.obstacle_prob,
                        r.cell.n_agents,
                        r.rounds.mean,
                        r.rounds.std
                    ));
                }
            }
        }
        s
    }
}

/// Runs `plan` once per weight with each weighted variant standing in as
/// its own method, then ranks the variants.
pub fn sweep_lambda(
    plan: &ExperimentPlan,
    values: &[f64],
    target: SweepTarget,
) -> Result<SweepReport> {
    if values.is_empty() {
        return Err(Error::invalid("sweep needs at least one value"));
    }
    let strategies: Vec<StrategyConfig> = values
        .iter()
        .map(|&v| match target {
            SweepTarget::NewCu => StrategyConfig::new(StrategyKind::NewCu).with_lambda(v),
            SweepTarget::CuJgr => StrategyConfig::new(StrategyKind::CuJgr).with_lambda_jgr(v),
        })
        .collect();
    let variants: Vec<String> = strategies.iter().map(StrategyConfig::token).collect();
    let mut dedup = variants.clone();
    dedup.sort();
    dedup.dedup();
    if dedup.len() != variants.len() {
        return Err(Error::invalid("sweep values must be distinct"));
    }
    let sweep_plan = ExperimentPlan {
        strategies,
        ..plan.clone()
    };
    let outcome = run_plan(&sweep_plan)?;
    if let Some(e) = outcome.ranking_error {
        return Err(Error::invalid(format!(
            "sweep produced an incomplete table: {e}"
        )));
    }
    let mean_rounds = outcome
        .table
        .entries
        .iter()
        .filter_map(|e| {
            Some(MeanRoundsRow {
                variant: e.method.clone(),
                cell: e.cell,
                rounds: *e.metrics.get(&Metric::Rounds)?,
            })
        })
        .collect();
    let report = SweepReport {
        target,
        values: values.to_vec(),
        variants,
        rankings: outcome.reports,
        mean_rounds,
    };
    write_json(&plan.output_dir.join("sweep.json"), &report)?;
    write_text(&plan.output_dir.join("sweep.txt"), &report.render())?;
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct ReplayOutcome {
    pub original: ExperimentRecord,
    pub replayed: ExperimentRecord,
    pub mismatches: Vec<String>,
}

/// Re-executes a CSV row from its seed and configuration.
pub fn replay(record: &ExperimentRecord, view_range: usize) -> Result<ReplayOutcome> {
    let spec = record.spec(view_range)?;
    let replayed = execute(&spec, SimOptions::default()).record;
    Ok(ReplayOutcome {
        original: record.clone(),
        mismatches: record.diff(&replayed),
        replayed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_plan_size() {
        let plan = ExperimentPlan::default();
        assert_eq!(plan.runs().len(), 2 * 6 * 7 * 100);
    }

    #[test]
    fn seeds_follow_the_repetition() {
        let plan = ExperimentPlan {
            repetitions: 3,
            base_seed: 40,
            agent_counts: vec![1, 2],
            obstacle_probs: vec![0.5],
            strategies: vec![StrategyConfig::new(StrategyKind::NewCu)],
            ..ExperimentPlan::default()
        };
        let seeds: Vec<u64> = plan.runs().iter().map(|r| r.seed).collect();
        assert_eq!(seeds, vec![40, 41, 42, 40, 41, 42]);
        let ids: Vec<u64> = plan.runs().iter().map(|r| r.run_id).collect();
        assert_eq!(ids, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn config_grammar() {
        let plan = ExperimentPlan::from_config_str(
            "# small plan\nmaze_sizes = 10x8, 15x15\nobstacle_probs=0.15\n\
             agent_counts = 1, 4\nstrategies = new-cu:lambda=0.5, hedac\n\
             repetitions = 7\nbase_seed = 9\nworkers = 2\noutput_dir = /tmp/x\n",
        )
        .unwrap();
        assert_eq!(plan.maze_sizes, vec![(10, 8), (15, 15)]);
        assert_eq!(plan.obstacle_probs, vec![0.15]);
        assert_eq!(plan.agent_counts, vec![1, 4]);
        assert_eq!(plan.strategies[0].lambda, 0.5);
        assert_eq!(plan.strategies[1].kind, StrategyKind::Hedac);
        assert_eq!(plan.repetitions, 7);
        assert_eq!(plan.base_seed, 9);
        assert_eq!(plan.workers, 2);
        assert_eq!(plan.output_dir, PathBuf::from("/tmp/x"));
        assert!(ExperimentPlan::from_config_str("colour = red\n").is_err());
        assert!(ExperimentPlan::from_config_str("repetitions 4\n").is_err());
        assert!(parse_size("15").is_err());
    }

    #[test]
    fn zero_repetitions_rejected() {
        let plan = ExperimentPlan {
            repetitions: 0,
            ..ExperimentPlan::default()
        };
        assert!(plan.validate().is_err());
    }

    #[test]
    fn csv_round_trip_keeps_the_header_and_sentinel() {
        let dir = tempfile::tempdir().unwrap();
        let spec = RunSpec {
            run_id: 3,
            strategy: StrategyConfig::new(StrategyKind::NewCu),
            maze_w: 8,
            maze_h: 8,
            obstacle_prob: 0.85,
            n_agents: 2,
            seed: 5,
            view_range: 2,
        };
        let ok = execute(&spec, SimOptions::default()).record;
        let mut sentinel = ok.clone();
        sentinel.run_id = 4;
        sentinel.efficiency = Some(f64::INFINITY);
        let aborted = ExperimentRecord::new(&RunSpec { run_id: 5, ..spec }, None);
        let path = dir.path().join("runs.csv");
        write_csv(&path, &[ok.clone(), sentinel.clone(), aborted.clone()]).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
        let back = read_csv(&path).unwrap();
        assert_eq!(back, vec![ok, sentinel, aborted]);
    }
}
