//! Wavefront distance fields, shortest-path extraction and frontier queries.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{neighbors, Coord, Knowledge, KnowledgeMap};

/// Cells a wavefront may enter beyond plain known-free space.
#[derive(Clone, Copy, Debug, Default)]
pub struct Passability<'a> {
    /// Unexplored cells next to known-free space get a distance but are never
    /// expanded, so frontiers can be goals without becoming corridors.
    pub frontier_sinks: bool,
    /// Cells that can be neither entered nor crossed (other agents).
    pub blocked: &'a [Coord],
    /// Known-free cells that can be entered but not crossed.
    pub terminals: &'a [Coord],
}

const UNREACHABLE: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceField {
    source: Coord,
    width: usize,
    height: usize,
    dist: Vec<u32>,
    transit: Vec<bool>,
}

impl DistanceField {
    pub fn source(&self) -> Coord {
        self.source
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Hop count from the source, `None` when unreachable.
    pub fn get(&self, c: Coord) -> Option<u32> {
        if c.row >= self.height || c.col >= self.width {
            return None;
        }
        let d = self.dist[c.row * self.width + c.col];
        (d != UNREACHABLE).then_some(d)
    }

    /// Whether paths may pass through `c` (false for sinks and terminals).
    pub fn is_transit(&self, c: Coord) -> bool {
        self.transit[c.row * self.width + c.col]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Path {
    cells: Vec<Coord>,
}

impl Path {
    pub fn new(cells: Vec<Coord>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::invalid("a path needs at least its start cell"));
        }
        if let Some(w) = cells.windows(2).find(|w| w[0].manhattan(w[1]) != 1) {
            return Err(Error::invalid(format!(
                "path cells {} and {} are not adjacent",
                w[0], w[1]
            )));
        }
        Ok(Path { cells })
    }

    pub fn cells(&self) -> &[Coord] {
        &self.cells
    }

    pub fn start(&self) -> Coord {
        self.cells[0]
    }

    pub fn target(&self) -> Coord {
        *self.cells.last().expect("paths are non-empty")
    }

    /// Number of moves along the path.
    pub fn hops(&self) -> usize {
        self.cells.len() - 1
    }

    /// The first cell after the start, if the path moves at all.
    pub fn next_step(&self) -> Option<Coord> {
        self.cells.get(1).copied()
    }
}

/// Breadth-first distances from `source` over known-free cells.
pub fn wavefront(
    map: &KnowledgeMap,
    source: Coord,
    targets_traversable: bool,
) -> Result<DistanceField> {
    wavefront_with(
        map,
        source,
        Passability {
            frontier_sinks: targets_traversable,
            ..Passability::default()
        },
    )
}

pub fn wavefront_with(
    map: &KnowledgeMap,
    source: Coord,
    pass: Passability<'_>,
) -> Result<DistanceField> {
    map.check_bounds(source)?;
    if map.get(source) == Knowledge::KnownObstacle {
        return Err(Error::invalid(format!(
            "wavefront source {source} is a known obstacle"
        )));
    }
    let (w, h) = (map.width(), map.height());

    // 0 = normal, 1 = blocked, 2 = terminal
    let mut mark = vec![0u8; w * h];
    for c in pass.blocked.iter().filter(|c| map.in_bounds(**c)) {
        mark[c.row * w + c.col] = 1;
    }
    for c in pass.terminals.iter().filter(|c| map.in_bounds(**c)) {
        mark[c.row * w + c.col] = 2;
    }

    let mut dist = vec![UNREACHABLE; w * h];
    let mut transit = vec![false; w * h];
    let si = source.row * w + source.col;
    dist[si] = 0;
    transit[si] = true;
    let mut queue = VecDeque::from([source]);
    while let Some(c) = queue.pop_front() {
        let d = dist[c.row * w + c.col] + 1;
        for n in neighbors(w, h, c) {
            let ni = n.row * w + n.col;
            if dist[ni] != UNREACHABLE || mark[ni] == 1 {
                continue;
            }
            match map.get(n) {
                Knowledge::KnownFree => {
                    dist[ni] = d;
                    if mark[ni] != 2 {
                        transit[ni] = true;
                        queue.push_back(n);
                    }
                }
                Knowledge::Unexplored if pass.frontier_sinks => dist[ni] = d,
                _ => {}
            }
        }
    }
    Ok(DistanceField {
        source,
        width: w,
        height: h,
        dist,
        transit,
    })
}

/// Shortest path from the field's source to `target` by greedy descent,
/// preferring predecessors up, down, left, right in that order.
pub fn extract_path(field: &DistanceField, target: Coord) -> Result<Option<Path>> {
    if target.row >= field.height || target.col >= field.width {
        return Err(Error::OutOfBounds(target, field.width, field.height));
    }
    let Some(mut d) = field.get(target) else {
        return Ok(None);
    };
    let mut cells = vec![target];
    let mut cur = target;
    while d > 0 {
        let prev = neighbors(field.width, field.height, cur)
            .find(|&n| field.get(n) == Some(d - 1) && field.is_transit(n))
            .expect("every reached cell has a transit predecessor");
        cells.push(prev);
        cur = prev;
        d -= 1;
    }
    cells.reverse();
    Ok(Some(Path { cells }))
}

pub fn is_frontier(map: &KnowledgeMap, c: Coord) -> bool {
    map.get(c) == Knowledge::Unexplored
        && map.neighbors(c).any(|n| map.get(n) == Knowledge::KnownFree)
}

/// All frontier cells in row-major order.
pub fn find_frontiers(map: &KnowledgeMap) -> Vec<Coord> {
    map.coords().filter(|&c| is_frontier(map, c)).collect()
}

/// Candidates reachable in `field` at the minimum distance, in input order.
pub fn nearest_among(field: &DistanceField, candidates: &[Coord]) -> Option<(u32, Vec<Coord>)> {
    let best = candidates.iter().filter_map(|&c| field.get(c)).min()?;
    let tied = candidates
        .iter()
        .copied()
        .filter(|&c| field.get(c) == Some(best))
        .collect();
    Some((best, tied))
}

pub fn nearest_frontiers(
    map: &KnowledgeMap,
    agent_pos: Coord,
) -> Result<Option<(u32, Vec<Coord>)>> {
    let field = wavefront(map, agent_pos, true)?;
    Ok(nearest_among(&field, &find_frontiers(map)))
}
