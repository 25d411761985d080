use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use maze_explore::engine::{SimOptions, DEFAULT_VIEW_RANGE};
use maze_explore::grid::{generate_maze, Coord, GroundTruthMaze};
use maze_explore::harness::{
    self, parse_size, ExperimentPlan, RunSpec, SweepTarget, DEFAULT_SWEEP_VALUES, OUT_DIR_ENV,
};
use maze_explore::render::{self, Format, Scene};
use maze_explore::strategy::StrategyConfig;
use maze_explore::{Error, Result};

#[derive(Parser)]
#[command(
    name = "mazex",
    version,
    about = "Multi-agent maze exploration benchmark"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an experiment plan.
    Run(PlanArgs),
    /// Sweep the NewCU lambda or the CU-JGR lambda_jgr weight.
    Sweep {
        #[command(flatten)]
        plan: PlanArgs,
        /// new-cu or cu-jgr
        #[arg(long, default_value = "new-cu")]
        target: SweepTarget,
        /// Comma separated weights.
        #[arg(long)]
        values: Option<String>,
    },
    /// Copeland rankings from an existing run CSV.
    Rank {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, env = OUT_DIR_ENV)]
        out: Option<PathBuf>,
    },
    /// Draw a maze or a trace frame.
    Render(RenderArgs),
    /// Re-execute CSV rows and diff their non-timing fields.
    Replay {
        #[arg(long)]
        csv: PathBuf,
        /// Rows to replay; every row when absent.
        #[arg(long = "run-id", value_delimiter = ',')]
        run_ids: Vec<u64>,
        #[arg(long, default_value_t = DEFAULT_VIEW_RANGE)]
        view_range: usize,
    },
    /// Run a single experiment, optionally writing its per-round trace.
    Simulate {
        #[arg(long, default_value = "new-cu")]
        strategy: StrategyConfig,
        #[arg(long, default_value = "15x15", value_parser = parse_size_arg)]
        size: (usize, usize),
        #[arg(long, default_value_t = 0.85)]
        p: f64,
        #[arg(long, default_value_t = 4)]
        agents: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_VIEW_RANGE)]
        view_range: usize,
        #[arg(long)]
        check_invariants: bool,
        /// JSON-lines trace output.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

fn parse_size_arg(s: &str) -> std::result::Result<(usize, usize), String> {
    parse_size(s).map_err(|e| e.to_string())
}

/// Plan flags override values read from `--config`.
#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// e.g. 15x15,30x30
    #[arg(long)]
    sizes: Option<String>,
    #[arg(long)]
    probs: Option<String>,
    #[arg(long)]
    agents: Option<String>,
    /// Comma separated method tokens, e.g. new-cu:lambda=0.5,nf
    #[arg(long)]
    strategies: Option<String>,
    #[arg(long)]
    reps: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    #[arg(long)]
    view_range: Option<String>,
    #[arg(long)]
    check_invariants: bool,
    #[arg(long, env = OUT_DIR_ENV)]
    out: Option<PathBuf>,
}

impl PlanArgs {
    fn plan(&self) -> Result<ExperimentPlan> {
        let mut plan = match &self.config {
            Some(path) => ExperimentPlan::from_config_file(path)?,
            None => ExperimentPlan::default(),
        };
        let overrides = [
            ("maze_sizes", &self.sizes),
            ("obstacle_probs", &self.probs),
            ("agent_counts", &self.agents),
            ("strategies", &self.strategies),
            ("repetitions", &self.reps),
            ("base_seed", &self.seed),
            ("workers", &self.workers),
            ("view_range", &self.view_range),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                plan.set(key, v)?;
            }
        }
        if self.check_invariants {
            plan.check_invariants = true;
        }
        if let Some(out) = &self.out {
            plan.output_dir = out.clone();
        }
        plan.validate()?;
        Ok(plan)
    }
}

#[derive(Args)]
struct RenderArgs {
    /// Maze text file; otherwise a maze is generated from size, p and seed.
    #[arg(long)]
    maze: Option<PathBuf>,
    #[arg(long, default_value = "15x15", value_parser = parse_size_arg)]
    size: (usize, usize),
    #[arg(long, default_value_t = 0.85)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trace whose agents and goals are drawn over the maze.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Trace round to draw; the last one by default.
    #[arg(long)]
    round: Option<u64>,
    #[arg(long, default_value = "ascii")]
    format: Format,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io {
            path: p.to_path_buf(),
            source: e,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_run(args: &PlanArgs) -> Result<ExitCode> {
    let plan = args.plan()?;
    let outcome = harness::run_plan(&plan)?;
    let incomplete = outcome.records.iter().filter(|r| !r.is_complete()).count();
    println!(
        "{} runs, {} incomplete, output in {}",
        outcome.records.len(),
        incomplete,
        plan.output_dir.display()
    );
    for f in &outcome.failures {
        eprintln!("run {}: {}", f.run_id, f.error);
    }
    if let Some(e) = &outcome.ranking_error {
        eprintln!("rankings skipped: {e}");
    }
    Ok(if outcome.all_complete() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_sweep(plan: &PlanArgs, target: SweepTarget, values: Option<&str>) -> Result<ExitCode> {
    let plan = plan.plan()?;
    let values: Vec<f64> = match values {
        Some(v) => v
            .split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad sweep value {s:?}")))
            })
            .collect::<Result<_>>()?,
        None => DEFAULT_SWEEP_VALUES.to_vec(),
    };
    let report = harness::sweep_lambda(&plan, &values, target)?;
    print!("{}", report.render());
    Ok(ExitCode::SUCCESS)
}

fn cmd_rank(csv: &Path, out: Option<&Path>) -> Result<ExitCode> {
    let records = harness::read_csv(csv)?;
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| csv.parent().map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from("."));
    let all_complete = records.iter().all(|r| r.is_complete());
    let outcome = harness::write_outputs(&dir, None, records, Vec::new())?;
    match &outcome.ranking_error {
        Some(e) => return Err(Error::invalid(e.clone())),
        None => print!("{}", harness::render_reports(&outcome.reports)),
    }
    Ok(if all_complete {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_render(args: &RenderArgs) -> Result<ExitCode> {
    let maze = match &args.maze {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            GroundTruthMaze::from_text(&text)?
        }
        None => generate_maze(args.size.0, args.size.1, args.p, args.seed)?,
    };
    let (agents, goals): (Vec<Coord>, Vec<Coord>) = match &args.trace {
        Some(path) => {
            let trace = render::read_trace(path)?;
            let frame = match args.round {
                Some(r) => trace.iter().find(|t| t.round == r),
                None => trace.last(),
            }
            .ok_or_else(|| Error::invalid("trace has no such round"))?;
            (
                frame.positions.clone(),
                frame.goals.iter().flatten().copied().collect(),
            )
        }
        None => (Vec::new(), Vec::new()),
    };
    let scene = Scene {
        maze: &maze,
        knowledge: None,
        agents: &agents,
        goals: &goals,
    };
    write_or_print(args.out.as_deref(), &render::render(&scene, args.format))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_replay(csv: &Path, run_ids: &[u64], view_range: usize) -> Result<ExitCode> {
    let records = harness::read_csv(csv)?;
    let chosen: Vec<_> = if run_ids.is_empty() {
        records.iter().collect()
    } else {
        run_ids
            .iter()
            .map(|id| {
                records
                    .iter()
                    .find(|r| r.run_id == *id)
                    .ok_or_else(|| Error::invalid(format!("no row with run_id {id}")))
            })
            .collect::<Result<_>>()?
    };
    let mut mismatched = 0;
    for r in chosen {
        let outcome = harness::replay(r, view_range)?;
        if outcome.mismatches.is_empty() {
            println!("run {}: identical", r.run_id);
        } else {
            mismatched += 1;
            println!(
                "run {}: MISMATCH {}",
                r.run_id,
                outcome.mismatches.join("; ")
            );
        }
    }
    Ok(if mismatched == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    strategy: StrategyConfig,
    size: (usize, usize),
    p: f64,
    agents: usize,
    seed: u64,
    view_range: usize,
    check_invariants: bool,
    trace: Option<&Path>,
) -> Result<ExitCode> {
    let spec = RunSpec {
        run_id: 0,
        strategy,
        maze_w: size.0,
        maze_h: size.1,
        obstacle_prob: p,
        n_agents: agents,
        seed,
        view_range,
    };
    let options = SimOptions {
        check_invariants,
        record_trace: trace.is_some(),
    };
    let (sim, report) = harness::simulate(&spec, options)?;
    if let Some(path) = trace {
        render::write_trace(path, &sim.trace)?;
    }
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(ExitCode::SUCCESS)
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Sweep {
            plan,
            target,
            values,
        } => cmd_sweep(&plan, target, values.as_deref()),
        Command::Rank { csv, out } => cmd_rank(&csv, out.as_deref()),
        Command::Render(args) => cmd_render(&args),
        Command::Replay {
            csv,
            run_ids,
            view_range,
        } => cmd_replay(&csv, &run_ids, view_range),
        Command::Simulate {
            strategy,
            size,
            p,
            agents,
            seed,
            view_range,
            check_invariants,
            trace,
        } => cmd_simulate(
            strategy,
            size,
            p,
            agents,
            seed,
            view_range,
            check_invariants,
            trace.as_deref(),
        ),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
