//! x-monotone polygonal chains with gap edges.
//!
//! An [`Envelope`] is the graph of a piecewise-linear partial function. Solid
//! edges lie on some input segment (their `source`) or are vertical
//! connectors bridging a jump at a single abscissa; gap edges mark intervals
//! where the function is undefined.

use std::fmt;

use crate::geom::{line_value, orientation, Point, Rational, Segment, SourceId};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum EdgeKind {
    Solid,
    Gap,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Edge {
    pub kind: EdgeKind,
    pub source: Option<SourceId>,
}

impl Edge {
    pub fn solid(source: SourceId) -> Self {
        Edge {
            kind: EdgeKind::Solid,
            source: Some(source),
        }
    }

    /// A vertical connector; connectors carry no source.
    pub fn connector() -> Self {
        Edge {
            kind: EdgeKind::Solid,
            source: None,
        }
    }

    pub fn gap() -> Self {
        Edge {
            kind: EdgeKind::Gap,
            source: None,
        }
    }

    pub fn is_gap(&self) -> bool {
        self.kind == EdgeKind::Gap
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Envelope {
    vertices: Vec<Point>,
    edges: Vec<Edge>,
}

/// Which structural rule a chain breaks.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Rule {
    /// Fewer than two vertices.
    TooShort,
    /// `edges.len() != vertices.len() - 1`.
    EdgeCountMismatch,
    Monotonicity,
    ZeroLengthEdge,
    /// A gap edge whose endpoints share an abscissa.
    VerticalGap,
    GapAdjacency,
    /// First or last edge is a gap or vertical.
    BoundaryEdge,
    GapWithSource,
    VerticalWithSource,
    /// Two vertical edges in a row.
    StackedVertical,
    /// A vertical edge touching a gap edge.
    VerticalAtGap,
    /// Collinear consecutive solid edges with the same source.
    NotCanonical,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::TooShort => "chain needs at least two vertices",
            Rule::EdgeCountMismatch => "edge list length must be one less than vertex count",
            Rule::Monotonicity => "monotonicity violation",
            Rule::ZeroLengthEdge => "zero-length edge",
            Rule::VerticalGap => "gap edge must have strictly increasing x",
            Rule::GapAdjacency => "gap adjacency violation",
            Rule::BoundaryEdge => "first and last edges must be solid and non-vertical",
            Rule::GapWithSource => "gap edge carries a source",
            Rule::VerticalWithSource => "vertical edge carries a source",
            Rule::StackedVertical => "two consecutive vertical edges",
            Rule::VerticalAtGap => "vertical edge adjacent to a gap",
            Rule::NotCanonical => "collinear edges with the same source are not merged",
        };
        f.write_str(s)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Diagnostic {
    /// Vertex or edge index the rule was checked at.
    pub index: usize,
    pub rule: Rule,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at index {}", self.rule, self.index)
    }
}

/// Checks every structural invariant of [`Envelope`]; empty means valid.
pub fn validate_chain(candidate: &Envelope) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut flag = |index, rule| out.push(Diagnostic { index, rule });
    let vs = &candidate.vertices;
    let es = &candidate.edges;
    if vs.len() < 2 {
        flag(0, Rule::TooShort);
        return out;
    }
    if es.len() + 1 != vs.len() {
        flag(0, Rule::EdgeCountMismatch);
        return out;
    }
    let vertical = |j: usize| vs[j].x == vs[j + 1].x;
    for (j, e) in es.iter().enumerate() {
        let (p, q) = (&vs[j], &vs[j + 1]);
        if p.x > q.x {
            flag(j, Rule::Monotonicity);
        }
        if p == q {
            flag(j, Rule::ZeroLengthEdge);
        }
        match e.kind {
            EdgeKind::Gap => {
                if p.x == q.x {
                    flag(j, Rule::VerticalGap);
                }
                if e.source.is_some() {
                    flag(j, Rule::GapWithSource);
                }
            }
            EdgeKind::Solid => {
                if vertical(j) && e.source.is_some() {
                    flag(j, Rule::VerticalWithSource);
                }
            }
        }
    }
    let last = es.len() - 1;
    for j in [0, last] {
        if es[j].is_gap() || vertical(j) {
            flag(j, Rule::BoundaryEdge);
        }
    }
    for j in 1..es.len() {
        let (prev, cur) = (&es[j - 1], &es[j]);
        if prev.is_gap() && cur.is_gap() {
            flag(j, Rule::GapAdjacency);
        }
        let (vprev, vcur) = (vertical(j - 1), vertical(j));
        if vprev && vcur && !prev.is_gap() && !cur.is_gap() {
            flag(j, Rule::StackedVertical);
        }
        if (vprev && !prev.is_gap() && cur.is_gap()) || (vcur && !cur.is_gap() && prev.is_gap()) {
            flag(j, Rule::VerticalAtGap);
        }
        if !prev.is_gap()
            && !cur.is_gap()
            && prev.source == cur.source
            && orientation(&vs[j - 1], &vs[j], &vs[j + 1]) == 0
            && vs[j - 1] != vs[j]
            && vs[j] != vs[j + 1]
        {
            flag(j, Rule::NotCanonical);
        }
    }
    out
}

impl Envelope {
    /// A chain holding the single vertex `start`; grow it with [`Envelope::push`].
    pub fn start(start: Point) -> Self {
        Envelope {
            vertices: vec![start],
            edges: Vec::new(),
        }
    }

    pub fn from_segment(s: &Segment) -> Self {
        Envelope {
            vertices: vec![s.a.clone(), s.b.clone()],
            edges: vec![Edge::solid(s.id)],
        }
    }

    /// Builds a chain and checks it.
    pub fn new(vertices: Vec<Point>, edges: Vec<Edge>) -> Result<Self, Vec<Diagnostic>> {
        let env = Envelope { vertices, edges };
        let diagnostics = validate_chain(&env);
        if diagnostics.is_empty() {
            Ok(env)
        } else {
            Err(diagnostics)
        }
    }

    /// Builds a chain without checking it; see [`validate_chain`].
    pub fn from_raw(vertices: Vec<Point>, edges: Vec<Edge>) -> Self {
        Envelope { vertices, edges }
    }

    /// Appends `p` joined by `edge`, merging with the previous edge when the
    /// two are collinear solid edges from the same source.
    pub fn push(&mut self, p: Point, edge: Edge) {
        let n = self.vertices.len();
        if let Some(last) = self.edges.last() {
            if edge.kind == EdgeKind::Solid
                && last.kind == EdgeKind::Solid
                && last.source == edge.source
                && orientation(&self.vertices[n - 2], &self.vertices[n - 1], &p) == 0
            {
                self.vertices[n - 1] = p;
                return;
            }
        }
        self.vertices.push(p);
        self.edges.push(edge);
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_kinds(&self) -> Vec<EdgeKind> {
        self.edges.iter().map(|e| e.kind).collect()
    }

    pub fn edge_sources(&self) -> Vec<Option<SourceId>> {
        self.edges.iter().map(|e| e.source).collect()
    }

    /// Number of vertices.
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        validate_chain(self)
    }

    /// Edge `j` as its two endpoints.
    pub fn edge_points(&self, j: usize) -> (&Point, &Point) {
        (&self.vertices[j], &self.vertices[j + 1])
    }

    pub fn is_vertical_edge(&self, j: usize) -> bool {
        self.vertices[j].x == self.vertices[j + 1].x
    }

    /// Lowest point of the chain's closure on the vertical line at `x`, or
    /// `None` if no solid edge reaches `x`.
    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        // First edge whose right end is at or beyond x.
        let start = self
            .vertices
            .partition_point(|v| &v.x < x)
            .saturating_sub(1);
        let mut best: Option<Rational> = None;
        for j in start..self.edges.len() {
            let (p, q) = self.edge_points(j);
            if &p.x > x {
                break;
            }
            if self.edges[j].is_gap() || &q.x < x {
                continue;
            }
            let y = if p.x == q.x {
                p.y.min_ref(&q.y).clone()
            } else {
                line_value(p, q, x)
            };
            if best.as_ref().is_none_or(|b| &y < b) {
                best = Some(y);
            }
        }
        best
    }

    /// Leftmost and rightmost abscissae.
    pub fn x_span(&self) -> Option<(&Rational, &Rational)> {
        Some((&self.vertices.first()?.x, &self.vertices.last()?.x))
    }

    pub fn translate(&self, dx: &Rational, dy: &Rational) -> Envelope {
        Envelope {
            vertices: self.vertices.iter().map(|v| v.translate(dx, dy)).collect(),
            edges: self.edges.clone(),
        }
    }
}
