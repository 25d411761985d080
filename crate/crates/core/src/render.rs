//! Static ASCII and SVG snapshots of mazes and trace frames.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use crate::engine::TraceRecord;
use crate::error::{Error, Result};
use crate::grid::{Cell, Coord, GroundTruthMaze, Knowledge, KnowledgeMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Ascii,
    Svg,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ascii" | "txt" => Ok(Format::Ascii),
            "svg" => Ok(Format::Svg),
            _ => Err(Error::Parse(format!("unknown render format {s:?}"))),
        }
    }
}

/// What to draw: the ground truth, optionally seen through a knowledge map,
/// with agents and their goals on top.
#[derive(Clone, Copy, Debug)]
pub struct Scene<'a> {
    pub maze: &'a GroundTruthMaze,
    pub knowledge: Option<&'a KnowledgeMap>,
    pub agents: &'a [Coord],
    pub goals: &'a [Coord],
}

impl<'a> Scene<'a> {
    pub fn maze(maze: &'a GroundTruthMaze) -> Self {
        Scene {
            maze,
            knowledge: None,
            agents: &[],
            goals: &[],
        }
    }

    fn knowledge_at(&self, c: Coord) -> Knowledge {
        match self.knowledge {
            Some(k) => k.get(c),
            None => Knowledge::from(self.maze.get(c)),
        }
    }
}

/// One text line per row: `.` free, `#` obstacle, `?` unexplored, `2` agent.
pub fn ascii(scene: &Scene<'_>) -> String {
    let mut s = String::new();
    for r in 0..scene.maze.height() {
        for c in 0..scene.maze.width() {
            let here = Coord::new(r, c);
            s.push(if scene.agents.contains(&here) {
                '2'
            } else {
                match scene.knowledge_at(here) {
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

pub const SVG_CELL_PX: usize = 20;

pub fn svg(scene: &Scene<'_>) -> String {
    let px = SVG_CELL_PX;
    let (w, h) = (scene.maze.width() * px, scene.maze.height() * px);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    );
    for c in scene.maze.coords() {
        let fill = match (scene.knowledge_at(c), scene.maze.get(c)) {
            (Knowledge::Unexplored, Cell::Obstacle) => "#8a8a8a",
            (Knowledge::Unexplored, Cell::Free) => "#c8c8c8",
            (Knowledge::KnownObstacle, _) => "#333333",
            (Knowledge::KnownFree, _) => "#f2f2f2",
        };
        let _ = writeln!(
            s,
            "  <rect x=\"{}\" y=\"{}\" width=\"{px}\" height=\"{px}\" fill=\"{fill}\" stroke=\"#bbbbbb\" stroke-width=\"0.5\"/>",
            c.col * px,
            c.row * px
        );
    }
    for g in scene.goals {
        let _ = writeln!(
            s,
            "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\"/>",
            g.col * px + 2,
            g.row * px + 2,
            px - 4,
            px - 4
        );
    }
    for a in scene.agents {
        let _ = writeln!(
            s,
            "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#000000\"/>",
            a.col * px + px / 2,
            a.row * px + px / 2,
            px as f64 * 0.35
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn render(scene: &Scene<'_>, format: Format) -> String {
    match format {
        Format::Ascii => ascii(scene),
        Format::Svg => svg(scene),
    }
}

/// Writes one JSON object per line.
pub fn write_trace(path: &Path, trace: &[TraceRecord]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    for rec in trace {
        serde_json::to_writer(&mut out, rec)?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRecord>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}
