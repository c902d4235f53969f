//! SVG rendering. Coordinates are converted to `f64` for display only.

use std::fmt::Write;

use crate::chain::{EdgeKind, Envelope};
use crate::geom::Point;
use crate::solver::SegmentSet;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 20.0;

struct View {
    xmin: f64,
    ymin: f64,
    scale: f64,
}

impl View {
    fn fit(points: &[(f64, f64)]) -> Self {
        let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(x, y) in points {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
        if points.is_empty() {
            (xmin, xmax, ymin, ymax) = (0.0, 1.0, 0.0, 1.0);
        }
        let w = (xmax - xmin).max(f64::MIN_POSITIVE);
        let h = (ymax - ymin).max(f64::MIN_POSITIVE);
        let scale = ((WIDTH - 2.0 * MARGIN) / w).min((HEIGHT - 2.0 * MARGIN) / h);
        View { xmin, ymin, scale }
    }

    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (
            MARGIN + (x - self.xmin) * self.scale,
            HEIGHT - MARGIN - (y - self.ymin) * self.scale,
        )
    }
}

fn to_f64(p: &Point) -> (f64, f64) {
    (p.x.to_f64(), p.y.to_f64())
}

fn path_data(view: &View, pts: &[(f64, f64)]) -> String {
    let mut d = String::new();
    for (i, &p) in pts.iter().enumerate() {
        let (x, y) = view.map(p);
        let cmd = if i == 0 { 'M' } else { 'L' };
        let _ = write!(d, "{}{cmd}{x:.3} {y:.3}", if i == 0 { "" } else { " " });
    }
    d
}

/// A standalone SVG of `e`, drawn over `input` if given. Input segments are
/// light gray (`class="segment"`), each maximal run of solid edges is one
/// bold path (`class="envelope"`) and each gap is a dashed path
/// (`class="gap"`).
pub fn render_svg(e: &Envelope, input: Option<&SegmentSet>) -> String {
    let verts: Vec<(f64, f64)> = e.vertices().iter().map(to_f64).collect();
    let mut all = verts.clone();
    if let Some(set) = input {
        for s in set.segments() {
            all.push(to_f64(&s.a));
            all.push(to_f64(&s.b));
        }
    }
    let view = View::fit(&all);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if let Some(set) = input {
        for s in set.segments() {
            let _ = writeln!(
                out,
                r##"<path class="segment" d="{}" stroke="#c8c8c8" stroke-width="1" fill="none"/>"##,
                path_data(&view, &[to_f64(&s.a), to_f64(&s.b)])
            );
        }
    }

    let mut run: Vec<(f64, f64)> = Vec::new();
    let flush = |run: &mut Vec<(f64, f64)>, out: &mut String| {
        if run.len() >= 2 {
            let _ = writeln!(
                out,
                r##"<path class="envelope" d="{}" stroke="#1f3a93" stroke-width="3" fill="none" stroke-linejoin="round"/>"##,
                path_data(&view, run)
            );
        }
        run.clear();
    };
    for (j, edge) in e.edges().iter().enumerate() {
        let (p, q) = (verts[j], verts[j + 1]);
        match edge.kind {
            EdgeKind::Solid => {
                if run.is_empty() {
                    run.push(p);
                }
                run.push(q);
            }
            EdgeKind::Gap => {
                flush(&mut run, &mut out);
                let _ = writeln!(
                    out,
                    r##"<path class="gap" d="{}" stroke="#888888" stroke-width="1.5" stroke-dasharray="6 4" fill="none"/>"##,
                    path_data(&view, &[p, q])
                );
            }
        }
    }
    flush(&mut run, &mut out);
    if verts.len() == 1 {
        let (x, y) = view.map(verts[0]);
        let _ = writeln!(
            out,
            r##"<circle class="envelope-point" cx="{x:.3}" cy="{y:.3}" r="3" fill="#1f3a93"/>"##
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Segment;
    use crate::solver::envelope_bruteforce;

    fn set(raw: &[(i64, i64, i64, i64)]) -> SegmentSet {
        let segs = raw
            .iter()
            .enumerate()
            .map(|(id, &(a, b, c, d))| {
                Segment::new(Point::from_ints(a, b), Point::from_ints(c, d), id).unwrap()
            })
            .collect();
        SegmentSet::new(segs).unwrap()
    }

    fn count(svg: &str, class: &str) -> usize {
        svg.matches(&format!(r#"class="{class}""#)).count()
    }

    #[test]
    fn single_segment_has_one_bold_path() {
        let s = set(&[(0, 0, 1, 1)]);
        let svg = render_svg(&envelope_bruteforce(&s).unwrap(), Some(&s));
        assert!(svg.starts_with("<svg"));
        assert_eq!(count(&svg, "envelope"), 1);
        assert_eq!(count(&svg, "segment"), 1);
        assert_eq!(count(&svg, "gap"), 0);
    }

    #[test]
    fn cross_has_two_gray_paths_and_one_two_edge_envelope() {
        let s = set(&[(0, 0, 1, 1), (0, 1, 1, 0)]);
        let svg = render_svg(&envelope_bruteforce(&s).unwrap(), Some(&s));
        assert_eq!(count(&svg, "segment"), 2);
        assert_eq!(count(&svg, "envelope"), 1);
        let line = svg
            .lines()
            .find(|l| l.contains(r#"class="envelope""#))
            .unwrap();
        assert_eq!(line.matches('L').count(), 2);
    }

    #[test]
    fn disjoint_spans_draw_a_dashed_gap() {
        let s = set(&[(0, 0, 1, 0), (2, 0, 3, 0)]);
        let svg = render_svg(&envelope_bruteforce(&s).unwrap(), None);
        assert_eq!(count(&svg, "gap"), 1);
        assert!(svg.contains("stroke-dasharray"));
        assert_eq!(count(&svg, "envelope"), 2);
        assert_eq!(count(&svg, "segment"), 0);
    }
}
