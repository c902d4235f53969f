//! Text formats: segment lists, chain lists and the JSON envelope document.
//!
//! Segment files hold one segment per line as `x1 y1 x2 y2`. Chain files hold
//! blocks of `x y` vertex lines separated by blank lines, with an optional
//! `GAP` line between two vertices. In both, `#` starts a comment. Numbers
//! are integers, decimals or `p/q` fractions and are read exactly.

use serde::Serialize;
use thiserror::Error;

use crate::chain::{Diagnostic, Edge, EdgeKind, Envelope};
use crate::geom::{GeomError, Point, Rational, Segment};
use crate::merge::MergeCounters;
use crate::solver::{Round, RunReport, SegmentSet, SolverError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: vertical segment")]
    Vertical { line: usize },
    #[error("line {line}: zero-length segment")]
    ZeroLength { line: usize },
    #[error("line {line}: duplicate segment id")]
    Duplicate { line: usize },
    #[error("chain {block} (ending at line {line}) is invalid: {}", join(.diagnostics))]
    InvalidChain {
        block: usize,
        line: usize,
        diagnostics: Vec<Diagnostic>,
    },
}

fn join(ds: &[Diagnostic]) -> String {
    ds.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Yields `(line number, trimmed content)` with comments removed.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, raw)| {
        let body = raw.split_once('#').map_or(raw, |(b, _)| b);
        (i + 1, body.trim())
    })
}

fn numbers<const N: usize>(line: usize, body: &str) -> Result<[Rational; N], FormatError> {
    let fields: Vec<&str> = body.split_whitespace().collect();
    if fields.len() != N {
        return Err(FormatError::Malformed {
            line,
            message: format!("expected {N} numbers, found {}", fields.len()),
        });
    }
    let mut out = Vec::with_capacity(N);
    for f in fields {
        out.push(f.parse::<Rational>().map_err(|e| FormatError::Malformed {
            line,
            message: e.to_string(),
        })?);
    }
    Ok(out.try_into().expect("length checked above"))
}

/// Parses a segment list; ids follow file order from 0.
pub fn parse_segments(text: &str) -> Result<SegmentSet, FormatError> {
    let mut segments = Vec::new();
    let mut last_line = 0;
    for (line, body) in content_lines(text) {
        if body.is_empty() {
            continue;
        }
        last_line = line;
        let [x1, y1, x2, y2] = numbers::<4>(line, body)?;
        let seg =
            Segment::new(Point::new(x1, y1), Point::new(x2, y2), segments.len()).map_err(|e| {
                match e {
                    GeomError::ZeroLength => FormatError::ZeroLength { line },
                    _ => FormatError::Malformed {
                        line,
                        message: e.to_string(),
                    },
                }
            })?;
        if seg.is_vertical() {
            return Err(FormatError::Vertical { line });
        }
        segments.push(seg);
    }
    SegmentSet::new(segments).map_err(|e| match e {
        SolverError::DuplicateId(_) => FormatError::Duplicate { line: last_line },
        other => FormatError::Malformed {
            line: last_line,
            message: other.to_string(),
        },
    })
}

/// Inverse of [`parse_segments`], up to comments and spacing.
pub fn print_segments(set: &SegmentSet) -> String {
    let mut out = String::new();
    for s in set.segments() {
        out.push_str(&format!("{} {} {} {}\n", s.a.x, s.a.y, s.b.x, s.b.y));
    }
    out
}

/// Parses a chain list. Non-vertical solid edges get source ids in file
/// order across all chains; vertical edges become connectors.
pub fn parse_chains(text: &str) -> Result<Vec<Envelope>, FormatError> {
    let mut chains = Vec::new();
    let mut next_id = 0;
    let mut vertices: Vec<Point> = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut gap_pending = false;
    let mut last_line = 0;

    let mut finish = |vertices: &mut Vec<Point>,
                      edges: &mut Vec<Edge>,
                      gap_pending: &mut bool,
                      line: usize|
     -> Result<(), FormatError> {
        if vertices.is_empty() {
            return Ok(());
        }
        if *gap_pending {
            return Err(FormatError::Malformed {
                line,
                message: "GAP must sit between two vertices".into(),
            });
        }
        let block = chains.len();
        let env = Envelope::new(std::mem::take(vertices), std::mem::take(edges)).map_err(
            |diagnostics| FormatError::InvalidChain {
                block,
                line,
                diagnostics,
            },
        )?;
        chains.push(env);
        Ok(())
    };

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            finish(&mut vertices, &mut edges, &mut gap_pending, last_line)?;
            continue;
        }
        let body = raw.split_once('#').map_or(raw, |(b, _)| b).trim();
        if body.is_empty() {
            continue;
        }
        last_line = line;
        if body.eq_ignore_ascii_case("gap") {
            if vertices.is_empty() || gap_pending {
                return Err(FormatError::Malformed {
                    line,
                    message: "GAP must sit between two vertices".into(),
                });
            }
            gap_pending = true;
            continue;
        }
        let [x, y] = numbers::<2>(line, body)?;
        let p = Point::new(x, y);
        if let Some(prev) = vertices.last() {
            let edge = if gap_pending {
                Edge::gap()
            } else if prev.x == p.x {
                Edge::connector()
            } else {
                next_id += 1;
                Edge::solid(next_id - 1)
            };
            edges.push(edge);
        }
        gap_pending = false;
        vertices.push(p);
    }
    finish(&mut vertices, &mut edges, &mut gap_pending, last_line)?;
    Ok(chains)
}

/// Inverse of [`parse_chains`] for chains whose solid sources are numbered
/// the same way.
pub fn print_chains(chains: &[Envelope]) -> String {
    let mut blocks = Vec::with_capacity(chains.len());
    for c in chains {
        let mut block = String::new();
        for (j, v) in c.vertices().iter().enumerate() {
            if j > 0 && c.edges()[j - 1].is_gap() {
                block.push_str("GAP\n");
            }
            block.push_str(&format!("{} {}\n", v.x, v.y));
        }
        blocks.push(block);
    }
    blocks.join("\n")
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct VertexDoc {
    pub x: String,
    pub y: String,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct EdgeDoc {
    pub kind: &'static str,
    pub source: Option<usize>,
}

/// The deterministic parts of a [`RunReport`]; wall time is left out.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct RunReportDoc {
    pub iterations: Vec<Round>,
    pub final_k: usize,
    pub totals: MergeCounters,
}

/// JSON view of an envelope. Field order is fixed by declaration order.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct EnvelopeDoc {
    pub vertices: Vec<VertexDoc>,
    pub edges: Vec<EdgeDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counters: Option<MergeCounters>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run_report: Option<RunReportDoc>,
}

impl EnvelopeDoc {
    pub fn new(e: &Envelope) -> Self {
        EnvelopeDoc {
            vertices: e
                .vertices()
                .iter()
                .map(|p| VertexDoc {
                    x: p.x.to_fraction_string(),
                    y: p.y.to_fraction_string(),
                })
                .collect(),
            edges: e
                .edges()
                .iter()
                .map(|ed| EdgeDoc {
                    kind: match ed.kind {
                        EdgeKind::Solid => "solid",
                        EdgeKind::Gap => "gap",
                    },
                    source: ed.source,
                })
                .collect(),
            counters: None,
            run_report: None,
        }
    }

    pub fn with_counters(mut self, c: MergeCounters) -> Self {
        self.counters = Some(c);
        self
    }

    pub fn with_report(mut self, r: &RunReport) -> Self {
        self.run_report = Some(RunReportDoc {
            iterations: r.iterations.clone(),
            final_k: r.final_k,
            totals: r.totals,
        });
        self
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document is always serializable");
        s.push('\n');
        s
    }
}
