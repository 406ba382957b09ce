//! Line-oriented text formats for arenas and solutions.
//!
//! Arena files:
//!
//! ```text
//! eg <V> <E>
//! v <id> <owner>        (V lines, ids 0..V-1 in order, owner 0 or 1)
//! e <src> <dst> <weight> (E lines)
//! ```
//!
//! Solution files hold one line per vertex in id order: `<id> <value>`,
//! optionally followed by ` <target>` for player-0 vertices with a strategy
//! choice. The value is a decimal integer or `T` for `⊤`.
//!
//! In both formats fields are separated by single spaces, lines end with
//! `\n`, and lines starting with `#` are comments. Blank lines are ignored.

use std::fmt::Write as _;

use thiserror::Error;

use crate::arena::{ArenaError, Edge, GameArena, Owner, VertexId, Weight};
use crate::measure::{extract_strategy, EnergyValue, MeasureError, ProgressMeasure, Strategy};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("expected {expected} {what} records, found {found}")]
    CountMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Arena(#[from] ArenaError),
}

fn syntax(line: usize, reason: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        reason: reason.into(),
    }
}

/// Non-comment, non-blank lines with 1-based line numbers.
fn records(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn fields(line: usize, text: &str) -> Result<Vec<&str>, FormatError> {
    let parts: Vec<&str> = text.split(' ').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(syntax(line, "fields must be separated by single spaces"));
    }
    Ok(parts)
}

fn number<T: std::str::FromStr>(line: usize, field: &str, what: &str) -> Result<T, FormatError> {
    // `FromStr` for integers accepts a leading '+', which the format does not.
    if field.starts_with('+') {
        return Err(syntax(line, format!("invalid {what} '{field}'")));
    }
    field
        .parse()
        .map_err(|_| syntax(line, format!("invalid {what} '{field}'")))
}

pub fn parse_arena(text: &str) -> Result<GameArena, FormatError> {
    let mut lines = records(text);
    let (line, header) = lines
        .next()
        .ok_or_else(|| syntax(1, "missing 'eg' header"))?;
    let head = fields(line, header)?;
    if head.len() != 3 || head[0] != "eg" {
        return Err(syntax(line, "header must be 'eg <vertices> <edges>'"));
    }
    let num_vertices: usize = number(line, head[1], "vertex count")?;
    let num_edges: usize = number(line, head[2], "edge count")?;

    let mut owners = Vec::with_capacity(num_vertices.min(1 << 24));
    let mut edges: Vec<Edge> = Vec::with_capacity(num_edges.min(1 << 26));
    for (line, text) in lines {
        let parts = fields(line, text)?;
        match parts[0] {
            "v" => {
                if !edges.is_empty() {
                    return Err(syntax(line, "vertex record after edge records"));
                }
                if parts.len() != 3 {
                    return Err(syntax(line, "vertex record must be 'v <id> <owner>'"));
                }
                if owners.len() == num_vertices {
                    return Err(FormatError::CountMismatch {
                        what: "vertex",
                        expected: num_vertices,
                        found: owners.len() + 1,
                    });
                }
                let id: usize = number(line, parts[1], "vertex id")?;
                if id != owners.len() {
                    return Err(syntax(
                        line,
                        format!("expected vertex id {}, found {id}", owners.len()),
                    ));
                }
                let owner = number::<u8>(line, parts[2], "owner")
                    .ok()
                    .and_then(Owner::from_bit)
                    .ok_or_else(|| {
                        syntax(line, format!("owner must be 0 or 1, found '{}'", parts[2]))
                    })?;
                owners.push(owner);
            }
            "e" => {
                if owners.len() != num_vertices {
                    return Err(FormatError::CountMismatch {
                        what: "vertex",
                        expected: num_vertices,
                        found: owners.len(),
                    });
                }
                if parts.len() != 4 {
                    return Err(syntax(line, "edge record must be 'e <src> <dst> <weight>'"));
                }
                if edges.len() == num_edges {
                    return Err(FormatError::CountMismatch {
                        what: "edge",
                        expected: num_edges,
                        found: edges.len() + 1,
                    });
                }
                let src: u32 = number(line, parts[1], "source id")?;
                let dst: u32 = number(line, parts[2], "target id")?;
                let weight: Weight = number(line, parts[3], "weight")?;
                edges.push(Edge::new(src, dst, weight));
            }
            other => return Err(syntax(line, format!("unknown record type '{other}'"))),
        }
    }
    if owners.len() != num_vertices {
        return Err(FormatError::CountMismatch {
            what: "vertex",
            expected: num_vertices,
            found: owners.len(),
        });
    }
    if edges.len() != num_edges {
        return Err(FormatError::CountMismatch {
            what: "edge",
            expected: num_edges,
            found: edges.len(),
        });
    }
    Ok(GameArena::build(owners, &edges)?)
}

/// Serializes an arena; edges are written in CSR order.
pub fn write_arena(arena: &GameArena) -> String {
    let mut out = String::with_capacity(16 * (arena.num_vertices() + arena.num_edges()) + 32);
    writeln!(out, "eg {} {}", arena.num_vertices(), arena.num_edges()).unwrap();
    for v in arena.vertices() {
        writeln!(out, "v {} {}", v, arena.owner(v).bit()).unwrap();
    }
    for e in arena.edges() {
        writeln!(out, "e {} {} {}", e.src, e.dst, e.weight).unwrap();
    }
    out
}

/// A claimed solution: values plus optional strategy choices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionDocument {
    pub measure: ProgressMeasure,
    pub strategy: Strategy,
}

impl SolutionDocument {
    /// Pairs a least measure with its extracted strategy.
    pub fn from_measure(measure: ProgressMeasure, arena: &GameArena) -> Result<Self, MeasureError> {
        let strategy = extract_strategy(&measure, arena)?;
        Ok(SolutionDocument { measure, strategy })
    }

    pub fn has_choices(&self) -> bool {
        self.strategy.choices().iter().any(Option::is_some)
    }
}

pub fn write_solution(doc: &SolutionDocument) -> String {
    let mut out = String::with_capacity(12 * doc.measure.len());
    for (i, value) in doc.measure.values().iter().enumerate() {
        let v = VertexId(i as u32);
        write!(out, "{v} {value}").unwrap();
        if let Some(t) = doc.strategy.choice(v) {
            write!(out, " {t}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn parse_solution(text: &str) -> Result<SolutionDocument, FormatError> {
    let mut values = Vec::new();
    let mut choices = Vec::new();
    for (line, text) in records(text) {
        let parts = fields(line, text)?;
        if !(2..=3).contains(&parts.len()) {
            return Err(syntax(
                line,
                "solution line must be '<id> <value> [<target>]'",
            ));
        }
        let id: usize = number(line, parts[0], "vertex id")?;
        if id != values.len() {
            return Err(syntax(
                line,
                format!("expected vertex id {}, found {id}", values.len()),
            ));
        }
        let value = if parts[1] == "T" {
            EnergyValue::TOP
        } else {
            number::<u64>(line, parts[1], "value")
                .ok()
                .and_then(EnergyValue::try_finite)
                .ok_or_else(|| syntax(line, format!("invalid value '{}'", parts[1])))?
        };
        values.push(value);
        choices.push(match parts.get(2) {
            Some(t) => Some(VertexId(number(line, t, "strategy target")?)),
            None => None,
        });
    }
    Ok(SolutionDocument {
        measure: ProgressMeasure::from_values(values),
        strategy: Strategy::from_choices(choices),
    })
}
