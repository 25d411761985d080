//! Loaders and helpers for the frozen strategy fixtures.

use std::fs;
use std::path::PathBuf;

use maze_explore::engine::{init_simulation_at, AgentState, SimOptions};
use maze_explore::grid::{Coord, GroundTruthMaze, KnowledgeMap};
use maze_explore::pathfield::{
    extract_path, find_frontiers, nearest_among, nearest_frontiers, wavefront_with, Passability,
};
use maze_explore::strategy::{Candidate, StrategyConfig, StrategyKind};

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub struct TieFree {
    pub maze: GroundTruthMaze,
    pub start: Coord,
}

pub struct TieCase {
    pub map: KnowledgeMap,
    pub agents: Vec<Coord>,
}

fn parse_coords(s: &str) -> Vec<Coord> {
    s.split_whitespace()
        .map(|p| {
            let (r, c) = p.split_once(',').unwrap();
            Coord::new(r.parse().unwrap(), c.parse().unwrap())
        })
        .collect()
}

/// Blocks separated by blank lines; the first line of each is `@ r,c ...`.
fn blocks(text: &str) -> Vec<(Vec<Coord>, String)> {
    text.split("\n\n")
        .map(str::trim)
        .filter(|b| !b.is_empty() && !b.starts_with('#'))
        .map(|b| {
            let (head, body) = b.split_once('\n').unwrap();
            (
                parse_coords(head.trim_start_matches('@')),
                format!("{body}\n"),
            )
        })
        .collect()
}

pub fn load_tie_free() -> Vec<TieFree> {
    let text = fs::read_to_string(fixture_dir().join("tie_free.txt")).unwrap();
    blocks(&text)
        .into_iter()
        .map(|(starts, body)| TieFree {
            maze: GroundTruthMaze::from_text(&body).unwrap(),
            start: starts[0],
        })
        .collect()
}

pub fn load_ties() -> Vec<TieCase> {
    let text = fs::read_to_string(fixture_dir().join("ties.txt")).unwrap();
    blocks(&text)
        .into_iter()
        .map(|(agents, body)| TieCase {
            map: KnowledgeMap::from_text(&body).unwrap(),
            agents,
        })
        .collect()
}

pub fn fmt_coords(cs: &[Coord]) -> String {
    cs.iter()
        .map(|c| format!("{},{}", c.row, c.col))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Whether a single agent running nearest-frontier ever sees a tie, plus the
/// number of distinct goals it went through.
pub fn tie_free_run(maze: &GroundTruthMaze, start: Coord) -> Option<usize> {
    let cfg = StrategyConfig::new(StrategyKind::NearestFrontier);
    let mut sim =
        init_simulation_at(maze.clone(), &[start], cfg, 2, 0, SimOptions::default()).ok()?;
    let mut goals = vec![sim.agents[0].goal];
    while !sim.is_complete() {
        if let Some((_, tied)) = nearest_frontiers(&sim.total_map, sim.agents[0].pos).unwrap() {
            if tied.len() > 1 {
                return None;
            }
        }
        sim.step_round().ok()?;
        if goals.last() != Some(&sim.agents[0].goal) {
            goals.push(sim.agents[0].goal);
        }
    }
    Some(goals.len())
}

/// The goal agent 0 holds after every round, for one strategy.
pub fn goal_sequence(f: &TieFree, kind: StrategyKind) -> Vec<Option<Coord>> {
    let mut sim = init_simulation_at(
        f.maze.clone(),
        &[f.start],
        StrategyConfig::new(kind),
        2,
        0,
        SimOptions {
            check_invariants: true,
            record_trace: true,
        },
    )
    .unwrap();
    sim.run().unwrap();
    sim.trace.iter().map(|t| t.goals[0]).collect()
}

pub fn agent_states(case: &TieCase) -> Vec<AgentState> {
    case.agents
        .iter()
        .enumerate()
        .map(|(i, &p)| AgentState::new(i, p, 2, case.map.clone()))
        .collect()
}

/// Agent 0's tied nearest frontiers with their paths, as NewCU sees them.
pub fn tied_candidates(case: &TieCase) -> Vec<Candidate> {
    let blocked: Vec<Coord> = case.agents[1..].to_vec();
    let field = wavefront_with(
        &case.map,
        case.agents[0],
        Passability {
            frontier_sinks: true,
            blocked: &blocked,
            terminals: &[],
        },
    )
    .unwrap();
    let (_, tied) = nearest_among(&field, &find_frontiers(&case.map)).unwrap();
    tied.into_iter()
        .map(|f| Candidate {
            frontier: f,
            path: extract_path(&field, f).unwrap().unwrap(),
        })
        .collect()
}

pub fn tied_candidates_len(case: &TieCase) -> usize {
    let blocked: Vec<Coord> = case.agents[1..].to_vec();
    let Ok(field) = wavefront_with(
        &case.map,
        case.agents[0],
        Passability {
            frontier_sinks: true,
            blocked: &blocked,
            terminals: &[],
        },
    ) else {
        return 0;
    };
    nearest_among(&field, &find_frontiers(&case.map)).map_or(0, |(_, t)| t.len())
}
