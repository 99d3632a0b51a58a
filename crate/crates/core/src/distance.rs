//! Manifold distance between closed polygons: the area of the symmetric
//! difference of the enclosed regions, generalized to immersed polygons as
//! `integral |w_1 - w_2| dA` over the winding numbers `w_1`, `w_2`.
//!
//! The plane is cut into vertical slabs at every vertex abscissa and every
//! pairwise segment crossing. Inside a slab no two segments cross, so the
//! cells between consecutive segments are trapezoids of constant winding
//! number. Those cells are the faces of a refinement of the segment
//! arrangement.

use crate::error::{FlowError, Result};
use crate::geometry::{perimeter, GridCurve, Vec2};

/// Relative tolerance on edge lengths below which a polygon is rejected.
pub const MIN_EDGE_FRACTION: f64 = 1e-12;

/// Relative tolerance for the ordering of segments inside a slab.
const ORDER_TOL: f64 = 1e-9;

/// Resolution of the fallback quadrature reported with a degeneracy error.
const FALLBACK_GRID: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Face {
    pub area: f64,
    pub winding_first: i32,
    pub winding_second: i32,
}

/// Trapezoidal cells covering the region between the lowest and highest
/// segment of every slab, each tagged with both winding numbers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlanarArrangement {
    pub faces: Vec<Face>,
}

impl PlanarArrangement {
    pub fn total_area(&self) -> f64 {
        self.faces.iter().map(|f| f.area).sum()
    }

    /// `sum area |w_1 - w_2|`.
    pub fn symmetric_difference_area(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| f.area * f64::from((f.winding_first - f.winding_second).abs()))
            .sum()
    }

    /// `sum area w_1`, the shoelace area of the first polygon.
    pub fn signed_area_first(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| f.area * f64::from(f.winding_first))
            .sum()
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: Vec2,
    b: Vec2,
    /// 0 for the first polygon, 1 for the second.
    owner: usize,
    /// Winding increment when crossing this segment upward.
    up_crossing: i32,
    xmin: f64,
    xmax: f64,
}

impl Segment {
    fn new(a: Vec2, b: Vec2, owner: usize) -> Self {
        Segment {
            a,
            b,
            owner,
            // a counterclockwise loop runs rightward along its lower side
            up_crossing: if b.x > a.x { 1 } else { -1 },
            xmin: a.x.min(b.x),
            xmax: a.x.max(b.x),
        }
    }

    fn y_at(&self, x: f64) -> f64 {
        let t = (x - self.a.x) / (self.b.x - self.a.x);
        self.a.y + t * (self.b.y - self.a.y)
    }
}

fn segments(curve: &GridCurve, owner: usize) -> impl Iterator<Item = Segment> + '_ {
    let n = curve.n_segments();
    let v = curve.vertices();
    (0..n).map(move |j| Segment::new(v[j], v[(j + 1) % n], owner))
}

fn check_input(curve: &GridCurve, which: &str) -> Result<()> {
    let l = perimeter(curve);
    let n = curve.n_segments();
    for j in 0..n {
        if curve.edge(j).norm() <= MIN_EDGE_FRACTION * l {
            return Err(FlowError::DegenerateInput(format!(
                "{which} polygon has a near-zero edge at index {j}"
            )));
        }
    }
    Ok(())
}

/// Abscissa of a crossing strictly inside both segments, if any.
fn crossing_x(s: &Segment, t: &Segment) -> Option<f64> {
    let r = s.b - s.a;
    let q = t.b - t.a;
    let denom = r.cross(q);
    if denom == 0.0 {
        return None;
    }
    let d = t.a - s.a;
    let u = d.cross(q) / denom;
    let v = d.cross(r) / denom;
    if u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0 {
        Some(s.a.x + u * r.x)
    } else {
        None
    }
}

fn breakpoints(segs: &[Segment]) -> Vec<f64> {
    let mut xs: Vec<f64> = segs.iter().flat_map(|s| [s.a.x, s.b.x]).collect();
    let mut order: Vec<usize> = (0..segs.len()).collect();
    order.sort_by(|&i, &j| segs[i].xmin.total_cmp(&segs[j].xmin));
    for (pos, &i) in order.iter().enumerate() {
        let s = &segs[i];
        for &j in &order[pos + 1..] {
            let t = &segs[j];
            if t.xmin > s.xmax {
                break;
            }
            if s.a.y.max(s.b.y) < t.a.y.min(t.b.y) || t.a.y.max(t.b.y) < s.a.y.min(s.b.y) {
                continue;
            }
            if let Some(x) = crossing_x(s, t) {
                xs.push(x);
            }
        }
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

fn bounding_box(curves: &[&GridCurve]) -> (Vec2, Vec2) {
    let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for c in curves {
        for v in c.vertices() {
            lo = Vec2::new(lo.x.min(v.x), lo.y.min(v.y));
            hi = Vec2::new(hi.x.max(v.x), hi.y.max(v.y));
        }
    }
    (lo, hi)
}

/// Builds the trapezoidal refinement of the arrangement of both polygons.
pub fn build_arrangement(first: &GridCurve, second: &GridCurve) -> Result<PlanarArrangement> {
    check_input(first, "first")?;
    check_input(second, "second")?;
    let segs: Vec<Segment> = segments(first, 0).chain(segments(second, 1)).collect();
    let xs = breakpoints(&segs);
    let (lo, hi) = bounding_box(&[first, second]);
    let scale = (hi.x - lo.x).max(hi.y - lo.y).max(f64::MIN_POSITIVE);
    let tol = ORDER_TOL * scale;

    let mut faces = Vec::new();
    let mut active: Vec<(f64, f64, f64, usize)> = Vec::new();
    for w in xs.windows(2) {
        let (xl, xr) = (w[0], w[1]);
        let width = xr - xl;
        if width <= 0.0 {
            continue;
        }
        let xm = 0.5 * (xl + xr);
        active.clear();
        for (i, s) in segs.iter().enumerate() {
            if s.xmin <= xl && s.xmax >= xr {
                active.push((s.y_at(xm), s.y_at(xl), s.y_at(xr), i));
            }
        }
        if active.is_empty() {
            continue;
        }
        active.sort_by(|p, q| p.0.total_cmp(&q.0));
        let mut winding = [0i32; 2];
        for pair in active.windows(2) {
            let (lower, upper) = (&pair[0], &pair[1]);
            if upper.1 < lower.1 - tol || upper.2 < lower.2 - tol {
                return Err(degeneracy(first, second));
            }
            let s = &segs[lower.3];
            winding[s.owner] += s.up_crossing;
            let gap = upper.0 - lower.0;
            if gap > 0.0 {
                faces.push(Face {
                    area: gap * width,
                    winding_first: winding[0],
                    winding_second: winding[1],
                });
            }
        }
        let top = &segs[active[active.len() - 1].3];
        winding[top.owner] += top.up_crossing;
        if winding != [0, 0] {
            return Err(degeneracy(first, second));
        }
    }
    Ok(PlanarArrangement { faces })
}

fn degeneracy(first: &GridCurve, second: &GridCurve) -> FlowError {
    FlowError::NumericalDegeneracy {
        fallback: grid_quadrature_distance(first, second, FALLBACK_GRID),
    }
}

/// Area of the symmetric difference of the regions enclosed by two closed
/// polygons, counted with winding multiplicity.
///
/// The arguments are put in a canonical order first, so the result is
/// bitwise symmetric.
pub fn manifold_distance(first: &GridCurve, second: &GridCurve) -> Result<f64> {
    let (a, b) = if canonical_cmp(first, second).is_le() {
        (first, second)
    } else {
        (second, first)
    };
    Ok(build_arrangement(a, b)?.symmetric_difference_area())
}

fn canonical_cmp(a: &GridCurve, b: &GridCurve) -> std::cmp::Ordering {
    a.n_segments().cmp(&b.n_segments()).then_with(|| {
        a.vertices()
            .iter()
            .zip(b.vertices())
            .map(|(u, v)| u.x.total_cmp(&v.x).then(u.y.total_cmp(&v.y)))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    })
}

/// Winding number of a closed polygon about `p` by signed upward/downward
/// edge crossings of the horizontal ray to the right of `p`.
pub fn winding_number(curve: &GridCurve, p: Vec2) -> i32 {
    let n = curve.n_segments();
    let v = curve.vertices();
    let mut w = 0;
    for j in 0..n {
        let a = v[j];
        let b = v[(j + 1) % n];
        let side = (b - a).cross(p - a);
        if a.y <= p.y {
            if b.y > p.y && side > 0.0 {
                w += 1;
            }
        } else if b.y <= p.y && side < 0.0 {
            w -= 1;
        }
    }
    w
}

/// Midpoint-rule estimate of `integral |w_1 - w_2|` on a `cells x cells` grid
/// over the joint bounding box.
pub fn grid_quadrature_distance(first: &GridCurve, second: &GridCurve, cells: usize) -> f64 {
    let (lo, hi) = bounding_box(&[first, second]);
    let dx = (hi.x - lo.x) / cells as f64;
    let dy = (hi.y - lo.y) / cells as f64;
    let mut acc = 0i64;
    for iy in 0..cells {
        let y = lo.y + (iy as f64 + 0.5) * dy;
        for ix in 0..cells {
            let p = Vec2::new(lo.x + (ix as f64 + 0.5) * dx, y);
            acc += i64::from((winding_number(first, p) - winding_number(second, p)).abs());
        }
    }
    acc as f64 * dx * dy
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{sample_curve, CurveKind};
    use crate::geometry::signed_area;
    use approx::assert_relative_eq;

    fn square(x0: f64, y0: f64, side: f64) -> GridCurve {
        GridCurve::from_xy(&[
            (x0, y0),
            (x0 + side, y0),
            (x0 + side, y0 + side),
            (x0, y0 + side),
        ])
        .unwrap()
    }

    #[test]
    fn identical_polygons() {
        for kind in CurveKind::ALL {
            let c = sample_curve(kind, 40).unwrap();
            assert_eq!(manifold_distance(&c, &c).unwrap(), 0.0);
        }
    }

    #[test]
    fn offset_unit_squares() {
        let d = manifold_distance(&square(0.0, 0.0, 1.0), &square(0.5, 0.0, 1.0)).unwrap();
        assert_relative_eq!(d, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn disjoint_and_nested() {
        let d = manifold_distance(&square(0.0, 0.0, 1.0), &square(3.0, 0.5, 2.0)).unwrap();
        assert_relative_eq!(d, 5.0, max_relative = 1e-14);
        let d = manifold_distance(&square(0.0, 0.0, 3.0), &square(1.0, 1.0, 1.0)).unwrap();
        assert_relative_eq!(d, 8.0, max_relative = 1e-14);
    }

    #[test]
    fn orientation_counts() {
        // a clockwise copy has winding -1, so it differs by twice the area
        let ccw = square(0.0, 0.0, 1.0);
        let cw = GridCurve::from_xy(&[(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)]).unwrap();
        assert_relative_eq!(
            manifold_distance(&ccw, &cw).unwrap(),
            2.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn arrangement_reproduces_shoelace() {
        let rose = GridCurve::new(
            sample_curve(CurveKind::FourLeafRose, 64)
                .unwrap()
                .vertices()
                .iter()
                .map(|&v| v * 0.5)
                .collect(),
        )
        .unwrap();
        let flower = sample_curve(CurveKind::Flower, 50).unwrap();
        let arr = build_arrangement(&rose, &flower).unwrap();
        assert_relative_eq!(
            arr.signed_area_first(),
            signed_area(&rose),
            max_relative = 1e-12
        );
        // the flower contains the shrunken rose, both wind once counterclockwise
        let d = arr.symmetric_difference_area();
        assert_relative_eq!(
            d,
            signed_area(&flower) - signed_area(&rose),
            max_relative = 1e-12
        );
    }

    #[test]
    fn rejects_near_zero_edges() {
        let bad = GridCurve::from_xy(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1e-14), (0.0, 1.0)]).unwrap();
        assert!(matches!(
            manifold_distance(&bad, &square(0.0, 0.0, 1.0)),
            Err(FlowError::DegenerateInput(_))
        ));
    }

    #[test]
    fn winding_numbers() {
        let sq = square(0.0, 0.0, 1.0);
        assert_eq!(winding_number(&sq, Vec2::new(0.5, 0.5)), 1);
        assert_eq!(winding_number(&sq, Vec2::new(1.5, 0.5)), 0);
        let rose = sample_curve(CurveKind::FourLeafRose, 128).unwrap();
        assert_eq!(winding_number(&rose, Vec2::new(0.5, 0.0)), 1);
        assert_eq!(winding_number(&rose, Vec2::new(0.0, -0.5)), 1);
        assert_eq!(winding_number(&rose, Vec2::new(0.5, 0.5)), 0);
    }
}
