//! Ground-truth mazes, knowledge maps and the occlusion-aware sensor.
//!
//! Text format shared by fixtures and goldens: a `"width height"` header
//! line followed by `height` rows of `width` characters. Mazes use `.` for
//! free space and `#` for obstacles; knowledge maps add `?` for unexplored
//! cells and `2` for a cell occupied by an agent (always a known free cell).

use std::collections::VecDeque;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fraction of the grid carved by the random walk before thinning.
pub const CARVE_FRACTION: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coord {
    pub row: usize,
    pub col: usize,
}

impl Coord {
    pub const fn new(row: usize, col: usize) -> Self {
        Coord { row, col }
    }

    pub fn manhattan(self, other: Coord) -> usize {
        self.row.abs_diff(other.row) + self.col.abs_diff(other.col)
    }

    pub fn chebyshev(self, other: Coord) -> usize {
        self.row
            .abs_diff(other.row)
            .max(self.col.abs_diff(other.col))
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// Orthogonal neighbours of `c` inside a `width`x`height` grid, in the fixed
/// order up, down, left, right.
pub fn neighbors(width: usize, height: usize, c: Coord) -> impl Iterator<Item = Coord> {
    let up = (c.row > 0).then(|| Coord::new(c.row - 1, c.col));
    let down = (c.row + 1 < height).then(|| Coord::new(c.row + 1, c.col));
    let left = (c.col > 0).then(|| Coord::new(c.row, c.col - 1));
    let right = (c.col + 1 < width).then(|| Coord::new(c.row, c.col + 1));
    [up, down, left, right].into_iter().flatten()
}

/// Cells strictly between `from` and `to` on the rounded straight segment.
///
/// Step `k` of `n = chebyshev(from, to)` lands on `from + round(k * delta / n)`
/// with halves rounded away from zero, so the segment is symmetric under
/// reflection through `from`.
pub fn segment_interior(from: Coord, to: Coord) -> impl Iterator<Item = Coord> {
    let dr = to.row as i64 - from.row as i64;
    let dc = to.col as i64 - from.col as i64;
    let n = dr.abs().max(dc.abs());
    (1..n.max(1)).map(move |k| {
        let r = from.row as i64 + div_round(k * dr, n);
        let c = from.col as i64 + div_round(k * dc, n);
        Coord::new(r as usize, c as usize)
    })
}

fn div_round(num: i64, den: i64) -> i64 {
    if num >= 0 {
        (2 * num + den) / (2 * den)
    } else {
        -((2 * -num + den) / (2 * den))
    }
}

/// Cells of the Chebyshev square of radius `range` around `center`, clipped
/// to the grid, in row-major order.
pub fn square_around(
    width: usize,
    height: usize,
    center: Coord,
    range: usize,
) -> impl Iterator<Item = Coord> {
    let r0 = center.row.saturating_sub(range);
    let r1 = (center.row + range).min(height - 1);
    let c0 = center.col.saturating_sub(range);
    let c1 = (center.col + range).min(width - 1);
    (r0..=r1).flat_map(move |r| (c0..=c1).map(move |c| Coord::new(r, c)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cell {
    Free,
    Obstacle,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundTruthMaze {
    width: usize,
    height: usize,
    cells: Vec<Cell>,
}

impl GroundTruthMaze {
    pub fn new(width: usize, height: usize, cells: Vec<Cell>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("maze dimensions must be positive"));
        }
        if cells.len() != width * height {
            return Err(Error::invalid(format!(
                "expected {} cells for a {width}x{height} maze, got {}",
                width * height,
                cells.len()
            )));
        }
        Ok(GroundTruthMaze {
            width,
            height,
            cells,
        })
    }

    pub fn open(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![Cell::Free; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn area(&self) -> usize {
        self.width * self.height
    }

    pub fn in_bounds(&self, c: Coord) -> bool {
        c.row < self.height && c.col < self.width
    }

    pub fn get(&self, c: Coord) -> Cell {
        self.cells[c.row * self.width + c.col]
    }

    pub fn is_free(&self, c: Coord) -> bool {
        self.in_bounds(c) && self.get(c) == Cell::Free
    }

    pub fn set(&mut self, c: Coord, cell: Cell) {
        self.cells[c.row * self.width + c.col] = cell;
    }

    pub fn coords(&self) -> impl Iterator<Item = Coord> + '_ {
        (0..self.height).flat_map(move |r| (0..self.width).map(move |c| Coord::new(r, c)))
    }

    pub fn free_cells(&self) -> Vec<Coord> {
        self.coords()
            .filter(|&c| self.get(c) == Cell::Free)
            .collect()
    }

    pub fn neighbors(&self, c: Coord) -> impl Iterator<Item = Coord> {
        neighbors(self.width, self.height, c)
    }

    /// Free components in discovery order (row-major scan, BFS fill).
    pub fn free_components(&self) -> Vec<Vec<Coord>> {
        let mut seen = vec![false; self.area()];
        let mut out = Vec::new();
        for start in self.coords() {
            let idx = start.row * self.width + start.col;
            if seen[idx] || self.get(start) != Cell::Free {
                continue;
            }
            seen[idx] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(c) = queue.pop_front() {
                for n in self.neighbors(c) {
                    let ni = n.row * self.width + n.col;
                    if !seen[ni] && self.get(n) == Cell::Free {
                        seen[ni] = true;
                        comp.push(n);
                        queue.push_back(n);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    /// Obstacle cells with no orthogonally adjacent free cell. Such cells can
    /// never border a frontier, so exploration cannot be relied on to see them.
    pub fn buried_obstacles(&self) -> Vec<Coord> {
        self.coords()
            .filter(|&c| {
                self.get(c) == Cell::Obstacle
                    && self.neighbors(c).all(|n| self.get(n) != Cell::Free)
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.width, self.height);
        for r in 0..self.height {
            for c in 0..self.width {
                s.push(match self.get(Coord::new(r, c)) {
                    Cell::Free => '.',
                    Cell::Obstacle => '#',
                });
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let (width, height, rows) = parse_grid_text(text)?;
        let mut cells = Vec::with_capacity(width * height);
        for (r, row) in rows.iter().enumerate() {
            for (c, ch) in row.chars().enumerate() {
                cells.push(match ch {
                    '.' => Cell::Free,
                    '#' => Cell::Obstacle,
                    other => {
                        return Err(Error::Parse(format!(
                            "unexpected character {other:?} at row {r} col {c}"
                        )))
                    }
                });
            }
        }
        Self::new(width, height, cells)
    }
}

fn parse_grid_text(text: &str) -> Result<(usize, usize, Vec<&str>)> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty grid text".into()))?;
    let mut dims = header.split_whitespace().map(str::parse::<usize>);
    let (width, height) = match (dims.next(), dims.next(), dims.next()) {
        (Some(Ok(w)), Some(Ok(h)), None) => (w, h),
        _ => return Err(Error::Parse(format!("bad header line {header:?}"))),
    };
    let rows: Vec<&str> = lines.take(height).collect();
    if rows.len() != height {
        return Err(Error::Parse(format!(
            "expected {height} rows, got {}",
            rows.len()
        )));
    }
    if let Some((r, row)) = rows
        .iter()
        .enumerate()
        .find(|(_, row)| row.chars().count() != width)
    {
        return Err(Error::Parse(format!(
            "row {r} has {} characters, expected {width}",
            row.chars().count()
        )));
    }
    Ok((width, height, rows))
}

/// Builds a maze by carving a random orthogonal walk, thinning the remaining
/// obstacles and then repairing connectivity.
///
/// 1. Start from an all-obstacle grid.
/// 2. Walk from a random cell in random orthogonal steps, carving every cell
///    visited, until half of the grid is free.
/// 3. Each remaining obstacle survives with probability `obstacle_keep_prob`.
/// 4. Keep only the largest free component; the rest turns back into walls.
/// 5. Free the nearest boundary wall of every buried obstacle until each
///    obstacle touches free space orthogonally.
pub fn generate_maze(
    width: usize,
    height: usize,
    obstacle_keep_prob: f64,
    rng_seed: u64,
) -> Result<GroundTruthMaze> {
    if width < 3 || height < 3 {
        return Err(Error::invalid(format!(
            "maze must be at least 3x3, got {width}x{height}"
        )));
    }
    if !(0.0..=1.0).contains(&obstacle_keep_prob) {
        return Err(Error::invalid(format!(
            "obstacle_keep_prob must lie in [0, 1], got {obstacle_keep_prob}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut maze = GroundTruthMaze::new(width, height, vec![Cell::Obstacle; width * height])?;

    let target = ((maze.area() as f64) * CARVE_FRACTION).ceil() as usize;
    let mut pos = Coord::new(rng.random_range(0..height), rng.random_range(0..width));
    maze.set(pos, Cell::Free);
    let mut carved = 1;
    while carved < target {
        let next = match rng.random_range(0..4) {
            0 if pos.row > 0 => Coord::new(pos.row - 1, pos.col),
            1 if pos.row + 1 < height => Coord::new(pos.row + 1, pos.col),
            2 if pos.col > 0 => Coord::new(pos.row, pos.col - 1),
            3 if pos.col + 1 < width => Coord::new(pos.row, pos.col + 1),
            _ => continue,
        };
        pos = next;
        if maze.get(pos) == Cell::Obstacle {
            maze.set(pos, Cell::Free);
            carved += 1;
        }
    }

    for idx in 0..maze.cells.len() {
        if maze.cells[idx] == Cell::Obstacle && !rng.random_bool(obstacle_keep_prob) {
            maze.cells[idx] = Cell::Free;
        }
    }

    keep_largest_component(&mut maze);
    free_buried_obstacles(&mut maze, &mut rng);
    Ok(maze)
}

fn keep_largest_component(maze: &mut GroundTruthMaze) {
    let comps = maze.free_components();
    let Some(best) = comps
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| a.len().cmp(&b.len()).then(ib.cmp(ia)))
        .map(|(i, _)| i)
    else {
        return;
    };
    for (i, comp) in comps.iter().enumerate() {
        if i != best {
            for &c in comp {
                maze.set(c, Cell::Obstacle);
            }
        }
    }
}

/// Frees walls until every obstacle touches free space. Each pass frees one
/// wall that already borders free space, choosing among those that uncover
/// the most buried neighbours uniformly at random, so the maze stays
/// connected and loses as few walls as possible.
fn free_buried_obstacles(maze: &mut GroundTruthMaze, rng: &mut ChaCha8Rng) {
    let mut buried: Vec<bool> = maze
        .coords()
        .map(|c| {
            maze.get(c) == Cell::Obstacle && maze.neighbors(c).all(|n| maze.get(n) != Cell::Free)
        })
        .collect();
    let w = maze.width;
    while buried.iter().any(|&b| b) {
        let mut best = Vec::new();
        let mut best_gain = 0;
        for c in maze.coords() {
            if maze.get(c) != Cell::Obstacle || buried[c.row * w + c.col] {
                continue;
            }
            let gain = maze
                .neighbors(c)
                .filter(|n| buried[n.row * w + n.col])
                .count();
            if gain > best_gain {
                best_gain = gain;
                best.clear();
            }
            if gain == best_gain && gain > 0 {
                best.push(c);
            }
        }
        // A buried cell always has a wall path to a wall bordering free space,
        // and the last step of that path is a buried neighbour of it.
        let Some(&pick) = best.get(rng.random_range(0..best.len().max(1))) else {
            break;
        };
        maze.set(pick, Cell::Free);
        for n in neighbors(maze.width, maze.height, pick) {
            buried[n.row * w + n.col] = false;
        }
    }
}

impl fmt::Display for GroundTruthMaze {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Knowledge {
    Unexplored,
    KnownFree,
    KnownObstacle,
}

impl Knowledge {
    pub fn is_known(self) -> bool {
        self != Knowledge::Unexplored
    }

    /// Numeric encoding used by the exploration literature: -1, 0, 1.
    pub fn code(self) -> i8 {
        match self {
            Knowledge::Unexplored => -1,
            Knowledge::KnownFree => 0,
            Knowledge::KnownObstacle => 1,
        }
    }
}

impl From<Cell> for Knowledge {
    fn from(c: Cell) -> Self {
        match c {
            Cell::Free => Knowledge::KnownFree,
            Cell::Obstacle => Knowledge::KnownObstacle,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnowledgeMap {
    width: usize,
    height: usize,
    cells: Vec<Knowledge>,
}

impl KnowledgeMap {
    pub fn unexplored(width: usize, height: usize) -> Self {
        KnowledgeMap {
            width,
            height,
            cells: vec![Knowledge::Unexplored; width * height],
        }
    }

    pub fn for_maze(maze: &GroundTruthMaze) -> Self {
        Self::unexplored(maze.width, maze.height)
    }

    /// The fully revealed map of `maze`.
    pub fn revealed(maze: &GroundTruthMaze) -> Self {
        KnowledgeMap {
            width: maze.width,
            height: maze.height,
            cells: maze.cells.iter().map(|&c| c.into()).collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn in_bounds(&self, c: Coord) -> bool {
        c.row < self.height && c.col < self.width
    }

    pub fn get(&self, c: Coord) -> Knowledge {
        self.cells[c.row * self.width + c.col]
    }

    /// Overwrites a cell. Sensing and merging never need this; it exists for
    /// fixtures and fault injection.
    pub fn set(&mut self, c: Coord, k: Knowledge) {
        self.cells[c.row * self.width + c.col] = k;
    }

    pub fn coords(&self) -> impl Iterator<Item = Coord> + '_ {
        (0..self.height).flat_map(move |r| (0..self.width).map(move |c| Coord::new(r, c)))
    }

    pub fn neighbors(&self, c: Coord) -> impl Iterator<Item = Coord> {
        neighbors(self.width, self.height, c)
    }

    pub fn known_count(&self) -> usize {
        self.cells.iter().filter(|k| k.is_known()).count()
    }

    pub fn cells(&self) -> &[Knowledge] {
        &self.cells
    }

    pub fn check_bounds(&self, c: Coord) -> Result<()> {
        if self.in_bounds(c) {
            Ok(())
        } else {
            Err(Error::OutOfBounds(c, self.width, self.height))
        }
    }

    /// Renders the map, drawing `2` over every agent position.
    pub fn to_text_with_agents(&self, agents: &[Coord]) -> String {
        let mut s = format!("{} {}\n", self.width, self.height);
        for r in 0..self.height {
            for c in 0..self.width {
                let here = Coord::new(r, c);
                s.push(if agents.contains(&here) {
                    '2'
                } else {
                    match self.get(here) {
                        Knowledge::Unexplored => '?',
                        Knowledge::KnownFree => '.',
                        Knowledge::KnownObstacle => '#',
                    }
                });
            }
            s.push('\n');
        }
        s
    }

    pub fn to_text(&self) -> String {
        self.to_text_with_agents(&[])
    }

    /// Parses the knowledge-map text format; `2` reads back as known free.
    pub fn from_text(text: &str) -> Result<Self> {
        let (width, height, rows) = parse_grid_text(text)?;
        let mut cells = Vec::with_capacity(width * height);
        for (r, row) in rows.iter().enumerate() {
            for (c, ch) in row.chars().enumerate() {
                cells.push(match ch {
                    '?' => Knowledge::Unexplored,
                    '.' | '2' => Knowledge::KnownFree,
                    '#' => Knowledge::KnownObstacle,
                    other => {
                        return Err(Error::Parse(format!(
                            "unexpected character {other:?} at row {r} col {c}"
                        )))
                    }
                });
            }
        }
        Ok(KnowledgeMap {
            width,
            height,
            cells,
        })
    }
}

impl fmt::Display for KnowledgeMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// True when nothing opaque in `maze` sits strictly between `from` and `to`.
pub fn line_of_sight(maze: &GroundTruthMaze, from: Coord, to: Coord) -> bool {
    segment_interior(from, to).all(|c| maze.get(c) == Cell::Free)
}

/// Reveals every cell of the view square around `pos` that is in line of
/// sight, copying ground truth into `map`. Returns the cells that were
/// unexplored before the call, in row-major order.
pub fn sense(
    maze: &GroundTruthMaze,
    map: &mut KnowledgeMap,
    pos: Coord,
    view_range: usize,
) -> Result<Vec<Coord>> {
    if map.width != maze.width || map.height != maze.height {
        return Err(Error::invalid("knowledge map does not match the maze"));
    }
    if !maze.in_bounds(pos) {
        return Err(Error::OutOfBounds(pos, maze.width, maze.height));
    }
    if maze.get(pos) != Cell::Free {
        return Err(Error::invalid(format!(
            "sensor position {pos} is an obstacle"
        )));
    }
    if view_range == 0 {
        return Err(Error::invalid("view range must be at least 1"));
    }
    let mut revealed = Vec::new();
    for c in square_around(maze.width, maze.height, pos, view_range) {
        if map.get(c).is_known() || !line_of_sight(maze, pos, c) {
            continue;
        }
        map.set(c, maze.get(c).into());
        revealed.push(c);
    }
    Ok(revealed)
}

/// Copies every cell known in `src` but unexplored in `dst` into `dst`.
/// Returns the number of cells copied.
pub fn merge_maps(dst: &mut KnowledgeMap, src: &KnowledgeMap) -> Result<usize> {
    if dst.width != src.width || dst.height != src.height {
        return Err(Error::invalid(format!(
            "cannot merge a {}x{} map into a {}x{} map",
            src.width, src.height, dst.width, dst.height
        )));
    }
    let mut copied = 0;
    for (d, &s) in dst.cells.iter_mut().zip(&src.cells) {
        if !d.is_known() && s.is_known() {
            *d = s;
            copied += 1;
        }
    }
    Ok(copied)
}

pub fn coverage(map: &KnowledgeMap) -> f64 {
    let total = map.width * map.height;
    if total == 0 {
        return 0.0;
    }
    map.known_count() as f64 / total as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flood_connected(maze: &GroundTruthMaze) -> bool {
        // Independent DFS over an explicit stack.
        let free = maze.free_cells();
        let Some(&start) = free.first() else {
            return false;
        };
        let mut seen = std::collections::HashSet::from([start]);
        let mut stack = vec![start];
        while let Some(c) = stack.pop() {
            let cand = [
                (c.row as i64 - 1, c.col as i64),
                (c.row as i64 + 1, c.col as i64),
                (c.row as i64, c.col as i64 - 1),
                (c.row as i64, c.col as i64 + 1),
            ];
            for (r, cc) in cand {
                if r < 0 || cc < 0 {
                    continue;
                }
                let n = Coord::new(r as usize, cc as usize);
                if maze.is_free(n) && seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        seen.len() == free.len()
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_maze(15, 15, 0.85, 7).unwrap();
        let b = generate_maze(15, 15, 0.85, 7).unwrap();
        assert_eq!(a, b);
        let c = generate_maze(15, 15, 0.85, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_keep_probability_clears_everything() {
        for seed in 0..20 {
            let m = generate_maze(5, 5, 0.0, seed).unwrap();
            assert_eq!(m.free_cells().len(), 25);
        }
    }

    #[test]
    fn rejects_tiny_mazes() {
        assert!(matches!(
            generate_maze(2, 5, 0.5, 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(generate_maze(5, 2, 0.5, 0).is_err());
        assert!(generate_maze(5, 5, 1.5, 0).is_err());
    }

    #[test]
    fn generated_mazes_are_connected_and_observable() {
        for seed in 0..1000 {
            for p in [0.15, 0.85] {
                let m = generate_maze(15, 15, p, seed).unwrap();
                assert!(flood_connected(&m), "seed {seed} p {p}");
                assert!(m.buried_obstacles().is_empty(), "seed {seed} p {p}");
            }
        }
    }

    #[test]
    fn dense_mazes_are_denser_than_sparse_ones() {
        let count = |p| -> usize {
            (0..50)
                .map(|s| 225 - generate_maze(15, 15, p, s).unwrap().free_cells().len())
                .sum()
        };
        assert!(count(0.85) > 2 * count(0.15));
    }

    #[test]
    fn open_maze_center_sees_everything() {
        let maze = GroundTruthMaze::open(5, 5).unwrap();
        let mut map = KnowledgeMap::for_maze(&maze);
        let got = sense(&maze, &mut map, Coord::new(2, 2), 2).unwrap();
        assert_eq!(got.len(), 25);
        assert_eq!(coverage(&map), 1.0);
    }

    #[test]
    fn obstacle_blocks_view_beyond_it() {
        let mut maze = GroundTruthMaze::open(5, 5).unwrap();
        maze.set(Coord::new(2, 3), Cell::Obstacle);
        let mut map = KnowledgeMap::for_maze(&maze);
        sense(&maze, &mut map, Coord::new(2, 2), 2).unwrap();
        assert_eq!(map.get(Coord::new(2, 3)), Knowledge::KnownObstacle);
        assert_eq!(map.get(Coord::new(2, 4)), Knowledge::Unexplored);
        // (1,4) and (3,4) round their midpoint away from the blocked row.
        assert_eq!(map.get(Coord::new(1, 4)), Knowledge::KnownFree);
        assert_eq!(map.get(Coord::new(3, 4)), Knowledge::KnownFree);
    }

    #[test]
    fn sense_rejects_bad_positions() {
        let mut maze = GroundTruthMaze::open(4, 4).unwrap();
        maze.set(Coord::new(0, 0), Cell::Obstacle);
        let mut map = KnowledgeMap::for_maze(&maze);
        assert!(sense(&maze, &mut map, Coord::new(0, 0), 2).is_err());
        assert!(matches!(
            sense(&maze, &mut map, Coord::new(9, 0), 2),
            Err(Error::OutOfBounds(..))
        ));
        assert!(sense(&maze, &mut map, Coord::new(1, 1), 0).is_err());
    }

    #[test]
    fn segment_interior_on_radius_two() {
        let o = Coord::new(2, 2);
        let mid: Vec<_> = segment_interior(o, Coord::new(4, 3)).collect();
        assert_eq!(mid, vec![Coord::new(3, 3)]);
        let mid: Vec<_> = segment_interior(o, Coord::new(0, 1)).collect();
        assert_eq!(mid, vec![Coord::new(1, 1)]);
        assert_eq!(segment_interior(o, Coord::new(3, 3)).count(), 0);
        assert_eq!(segment_interior(o, o).count(), 0);
    }

    #[test]
    fn coverage_counts_known_cells() {
        let mut map = KnowledgeMap::unexplored(15, 15);
        assert_eq!(coverage(&map), 0.0);
        for c in map.coords().take(45).collect::<Vec<_>>() {
            map.set(c, Knowledge::KnownFree);
        }
        assert!((coverage(&map) - 0.2).abs() < 1e-12);
        let maze = GroundTruthMaze::open(15, 15).unwrap();
        assert_eq!(coverage(&KnowledgeMap::revealed(&maze)), 1.0);
    }

    #[test]
    fn merge_identity_and_idempotence() {
        let maze = generate_maze(10, 10, 0.5, 3).unwrap();
        let mut m = KnowledgeMap::for_maze(&maze);
        sense(&maze, &mut m, maze.free_cells()[0], 2).unwrap();
        let mut same = m.clone();
        merge_maps(&mut same, &m).unwrap();
        assert_eq!(same, m);
        let mut empty = KnowledgeMap::for_maze(&maze);
        merge_maps(&mut empty, &m).unwrap();
        assert_eq!(empty, m);
        let mut wrong = KnowledgeMap::unexplored(3, 3);
        assert!(merge_maps(&mut wrong, &m).is_err());
    }

    #[test]
    fn text_round_trip() {
        let maze = generate_maze(9, 7, 0.85, 11).unwrap();
        assert_eq!(GroundTruthMaze::from_text(&maze.to_text()).unwrap(), maze);
        let mut map = KnowledgeMap::for_maze(&maze);
        sense(&maze, &mut map, maze.free_cells()[0], 2).unwrap();
        assert_eq!(KnowledgeMap::from_text(&map.to_text()).unwrap(), map);
        assert!(GroundTruthMaze::from_text("3 2\n...\n..x\n").is_err());
        assert!(GroundTruthMaze::from_text("3 2\n...\n").is_err());
    }
}
