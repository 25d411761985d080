//! Brute-force reference implementations shared by the integration tests.
//! Each one is written independently of the library code it checks.

#![allow(dead_code)]

pub mod fixtures;

use std::collections::BTreeMap;

use maze_explore::grid::{Cell, Coord, GroundTruthMaze, Knowledge, KnowledgeMap};
use maze_explore::pathfield::Path;
use maze_explore::ranking::{
    copeland, AggregateEntry, AggregateTable, ConfigCell, Direction, Metric, Stats,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const OFFSETS: [(i64, i64); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];

pub fn step(map_w: usize, map_h: usize, c: Coord, (dr, dc): (i64, i64)) -> Option<Coord> {
    let r = c.row as i64 + dr;
    let col = c.col as i64 + dc;
    (r >= 0 && col >= 0 && (r as usize) < map_h && (col as usize) < map_w)
        .then(|| Coord::new(r as usize, col as usize))
}

/// Random knowledge map with a known-free cell at the returned source.
pub fn random_knowledge_map(rng: &mut ChaCha8Rng, w: usize, h: usize) -> (KnowledgeMap, Coord) {
    let mut m = KnowledgeMap::unexplored(w, h);
    for r in 0..h {
        for c in 0..w {
            let x: f64 = rng.random();
            let k = if x < 0.5 {
                Knowledge::KnownFree
            } else if x < 0.75 {
                Knowledge::KnownObstacle
            } else {
                Knowledge::Unexplored
            };
            m.set(Coord::new(r, c), k);
        }
    }
    let src = Coord::new(rng.random_range(0..h), rng.random_range(0..w));
    m.set(src, Knowledge::KnownFree);
    (m, src)
}

/// Shortest hop counts by repeated relaxation until nothing changes. Known
/// free cells relay; unexplored cells only receive a distance when `sinks`.
pub fn distance_oracle(map: &KnowledgeMap, source: Coord, sinks: bool) -> Vec<Vec<Option<u32>>> {
    let (w, h) = (map.width(), map.height());
    let mut d = vec![vec![None::<u32>; w]; h];
    d[source.row][source.col] = Some(0);
    loop {
        let mut changed = false;
        for r in 0..h {
            for c in 0..w {
                let here = Coord::new(r, c);
                let Some(dc) = d[r][c] else { continue };
                let relay = here == source || map.get(here) == Knowledge::KnownFree;
                if !relay {
                    continue;
                }
                for off in OFFSETS {
                    let Some(n) = step(w, h, here, off) else {
                        continue;
                    };
                    let enterable = match map.get(n) {
                        Knowledge::KnownFree => true,
                        Knowledge::Unexplored => sinks,
                        Knowledge::KnownObstacle => false,
                    };
                    if enterable && d[n.row][n.col].is_none_or(|old| old > dc + 1) {
                        d[n.row][n.col] = Some(dc + 1);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return d;
        }
    }
}

/// Frontiers by definition: unexplored with a known-free orthogonal neighbour.
pub fn frontier_oracle(map: &KnowledgeMap) -> Vec<Coord> {
    let mut out = Vec::new();
    for r in 0..map.height() {
        for c in 0..map.width() {
            let here = Coord::new(r, c);
            if map.get(here) != Knowledge::Unexplored {
                continue;
            }
            if OFFSETS.iter().any(|&o| {
                step(map.width(), map.height(), here, o)
                    .is_some_and(|n| map.get(n) == Knowledge::KnownFree)
            }) {
                out.push(here);
            }
        }
    }
    out
}

/// Cells strictly inside the segment, sampled in floating point and rounded
/// half away from zero.
pub fn ray_cells(from: Coord, to: Coord) -> Vec<Coord> {
    let dr = to.row as f64 - from.row as f64;
    let dc = to.col as f64 - from.col as f64;
    let n = dr.abs().max(dc.abs()) as i64;
    (1..n)
        .map(|k| {
            let t = k as f64 / n as f64;
            Coord::new(
                (from.row as f64 + (t * dr).round()) as usize,
                (from.col as f64 + (t * dc).round()) as usize,
            )
        })
        .collect()
}

/// Cells one sensing step would reveal on a blank map.
pub fn visible_oracle(maze: &GroundTruthMaze, pos: Coord, range: usize) -> Vec<Coord> {
    let mut out = Vec::new();
    let r = range as i64;
    for dr in -r..=r {
        for dc in -r..=r {
            let (tr, tc) = (pos.row as i64 + dr, pos.col as i64 + dc);
            if tr < 0 || tc < 0 || tr >= maze.height() as i64 || tc >= maze.width() as i64 {
                continue;
            }
            let t = Coord::new(tr as usize, tc as usize);
            if ray_cells(pos, t).iter().all(|&m| maze.get(m) == Cell::Free) {
                out.push(t);
            }
        }
    }
    out.sort();
    out
}

/// Unexplored cells seen from `cell` against the knowledge map.
pub fn unex_oracle(map: &KnowledgeMap, cell: Coord, range: usize) -> usize {
    let r = range as i64;
    let mut n = 0;
    for dr in -r..=r {
        for dc in -r..=r {
            let (tr, tc) = (cell.row as i64 + dr, cell.col as i64 + dc);
            if tr < 0 || tc < 0 || tr >= map.height() as i64 || tc >= map.width() as i64 {
                continue;
            }
            let t = Coord::new(tr as usize, tc as usize);
            if map.get(t) == Knowledge::Unexplored
                && ray_cells(cell, t)
                    .iter()
                    .all(|&m| map.get(m) != Knowledge::KnownObstacle)
            {
                n += 1;
            }
        }
    }
    n
}

pub fn jgr_path_oracle(path: &Path, map: &KnowledgeMap, range: usize) -> usize {
    path.cells()
        .iter()
        .map(|&c| unex_oracle(map, c, range))
        .sum()
}

/// Ground truth with independent random cells; not necessarily connected.
pub fn random_cells(rng: &mut ChaCha8Rng, w: usize, h: usize, p: f64) -> GroundTruthMaze {
    let cells = (0..w * h)
        .map(|_| {
            if rng.random_bool(p) {
                Cell::Obstacle
            } else {
                Cell::Free
            }
        })
        .collect();
    GroundTruthMaze::new(w, h, cells).unwrap()
}

pub fn cell(n_agents: usize, p: f64) -> ConfigCell {
    ConfigCell {
        maze_w: 15,
        maze_h: 15,
        obstacle_prob: p,
        n_agents,
    }
}

/// Table with `methods` x `cells` random positive integer-valued means, so
/// exact ties occur.
pub fn random_table(rng: &mut ChaCha8Rng, methods: usize, cells: usize) -> AggregateTable {
    let mut entries = Vec::new();
    for m in 0..methods {
        for k in 0..cells {
            let mean = rng.random_range(1..6) as f64;
            entries.push(AggregateEntry {
                method: format!("m{m}"),
                cell: cell(k + 1, 0.5),
                runs: 1,
                failed_runs: 0,
                efficiency_sentinels: 0,
                metrics: BTreeMap::from([(Metric::Rounds, Stats { mean, std: 0.0 })]),
            });
        }
    }
    AggregateTable { entries }
}

/// Copeland votes by enumerating every ordered pair in every cell.
pub fn copeland_oracle(
    table: &AggregateTable,
    metric: Metric,
    dir: Direction,
) -> BTreeMap<String, f64> {
    let mut by_cell: BTreeMap<ConfigCell, Vec<(String, f64)>> = BTreeMap::new();
    for e in &table.entries {
        by_cell
            .entry(e.cell)
            .or_default()
            .push((e.method.clone(), e.mean(metric).unwrap()));
    }
    let mut votes: BTreeMap<String, f64> = BTreeMap::new();
    for rows in by_cell.values() {
        for (a, va) in rows {
            let v = votes.entry(a.clone()).or_insert(0.0);
            for (b, vb) in rows {
                if a == b {
                    continue;
                }
                let better = match dir {
                    Direction::LowerBetter => va < vb,
                    Direction::HigherBetter => va > vb,
                };
                if better {
                    *v += 1.0;
                } else if va == vb {
                    *v += 0.5;
                }
            }
        }
    }
    votes
}

fn oracle_ranks(votes: &BTreeMap<String, f64>) -> BTreeMap<String, usize> {
    votes
        .iter()
        .map(|(m, v)| (m.clone(), 1 + votes.values().filter(|o| *o > v).count()))
        .collect()
}

/// Checks votes and ranks of `n` random tables against the pairwise oracle,
/// in both directions and under three increasing transforms of the means.
/// Returns how many tables matched throughout.
pub fn copeland_check(n: usize, seed: u64) -> usize {
    let mut rng = rng(seed);
    let mut ok = 0;
    for i in 0..n {
        let table = random_table(&mut rng, 2 + i % 6, 1 + i % 5);
        let mut good = true;
        for dir in [Direction::LowerBetter, Direction::HigherBetter] {
            let got = copeland(&table, Metric::Rounds, dir).unwrap();
            let votes = copeland_oracle(&table, Metric::Rounds, dir);
            good &= got.votes == votes;
            good &= oracle_ranks(&votes)
                .iter()
                .all(|(m, r)| got.rank(m) == Some(*r));
            for transform in [|x: f64| x * x, |x: f64| x.ln(), |x: f64| 3.0 * x + 7.0] {
                let t = table.map_means(Metric::Rounds, transform);
                good &= copeland(&t, Metric::Rounds, dir).unwrap().votes == got.votes;
            }
        }
        ok += usize::from(good);
    }
    ok
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
