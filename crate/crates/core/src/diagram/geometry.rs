//! Plane geometry on canvas coordinates (y grows downwards).

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

const EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Point {
        Point { x, y }
    }

    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }

    fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn dist(self, o: Point) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }
}

/// A closed polygon; the last vertex connects back to the first.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polygon {
    pub points: Vec<Point>,
}

/// Where a segment meets another: parameters along both, in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hit {
    pub t: f64,
    pub u: f64,
}

/// Intersection of segments `a0a1` and `b0b1`, ignoring collinear overlap.
pub fn segment_hit(a0: Point, a1: Point, b0: Point, b1: Point) -> Option<Hit> {
    let r = a1.sub(a0);
    let s = b1.sub(b0);
    let denom = r.cross(s);
    if denom.abs() < EPS {
        return None;
    }
    let qp = b0.sub(a0);
    let t = qp.cross(s) / denom;
    let u = qp.cross(r) / denom;
    ((-EPS..=1.0 + EPS).contains(&t) && (-EPS..=1.0 + EPS).contains(&u)).then_some(Hit { t, u })
}

/// Whether two segments cross at a point interior to both.
pub fn segments_cross(a0: Point, a1: Point, b0: Point, b1: Point) -> bool {
    const M: f64 = 1e-6;
    matches!(segment_hit(a0, a1, b0, b1), Some(h) if h.t > M && h.t < 1.0 - M && h.u > M && h.u < 1.0 - M)
}

fn dist_to_segment(p: Point, a: Point, b: Point) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.x * ab.x + ab.y * ab.y;
    if len2 < EPS {
        return p.dist(a);
    }
    let t = (((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2).clamp(0.0, 1.0);
    p.dist(Point::new(a.x + t * ab.x, a.y + t * ab.y))
}

impl Polygon {
    pub fn new(points: Vec<Point>) -> Polygon {
        Polygon { points }
    }

    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Polygon {
        Polygon::new(vec![Point::new(x0, y0), Point::new(x1, y0), Point::new(x1, y1), Point::new(x0, y1)])
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.points.len();
        (0..n).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }

    /// Twice the signed area; positive means clockwise on a y-down canvas.
    pub fn signed_area2(&self) -> f64 {
        self.edges().map(|(a, b)| a.cross(b)).sum()
    }

    /// At least three vertices, nonzero area and no two non-adjacent sides meeting.
    pub fn is_simple(&self) -> bool {
        let n = self.points.len();
        if n < 3 || self.signed_area2().abs() < EPS {
            return false;
        }
        let sides: Vec<_> = self.edges().collect();
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    continue;
                }
                let (a0, a1) = sides[i];
                let (b0, b1) = sides[j];
                if segment_hit(a0, a1, b0, b1).is_some() {
                    return false;
                }
            }
        }
        true
    }

    pub fn on_boundary(&self, p: Point, tol: f64) -> bool {
        self.edges().any(|(a, b)| dist_to_segment(p, a, b) <= tol)
    }

    /// Even-odd rule; points on the boundary give an unspecified answer.
    pub fn contains(&self, p: Point) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn bbox(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.points {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        (lo, hi)
    }

    pub fn translate(&self, dx: f64, dy: f64) -> Polygon {
        Polygon::new(self.points.iter().map(|p| Point::new(p.x + dx, p.y + dy)).collect())
    }

    pub fn scale(&self, k: f64) -> Polygon {
        Polygon::new(self.points.iter().map(|p| Point::new(p.x * k, p.y * k)).collect())
    }
}

/// Crossings of a polyline with a polygon boundary, as
/// (distance along the polyline, position along the perimeter).
pub fn crossings(route: &[Point], poly: &Polygon) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (k, w) in route.windows(2).enumerate() {
        for (i, (a, b)) in poly.edges().enumerate() {
            if let Some(h) = segment_hit(w[0], w[1], a, b) {
                let along = k as f64 + h.t.clamp(0.0, 1.0);
                let perim = i as f64 + h.u.clamp(0.0, 1.0);
                // a hit on a shared vertex shows up twice
                if !out.iter().any(|&(s, _)| (s - along).abs() < 1e-7) {
                    out.push((along, perim));
                }
            }
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orientation_and_containment() {
        let sq = Polygon::rect(0.0, 0.0, 10.0, 10.0);
        assert!(sq.signed_area2() > 0.0);
        assert!(sq.is_simple());
        assert!(sq.contains(Point::new(5.0, 5.0)));
        assert!(!sq.contains(Point::new(15.0, 5.0)));
        assert!(sq.on_boundary(Point::new(10.0, 3.0), 1e-6));
    }

    #[test]
    fn bowtie_is_not_simple() {
        let bow = Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(10.0, 10.0),
            Point::new(10.0, 0.0),
            Point::new(0.0, 10.0),
        ]);
        assert!(!bow.is_simple());
    }

    #[test]
    fn vertical_wire_crosses_rectangle_twice() {
        let sq = Polygon::rect(0.0, 0.0, 10.0, 10.0);
        let route = [Point::new(5.0, -5.0), Point::new(5.0, 15.0)];
        let c = crossings(&route, &sq);
        assert_eq!(c.len(), 2);
        assert!(c[0].1 < 1.0 && (2.0..3.0).contains(&c[1].1));
    }
}
