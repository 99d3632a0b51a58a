//! Initial curves sampled at the uniform parameter values `xi_j = 2 pi j / N`.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::geometry::{GridCurve, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    /// `(2 cos t, sin t)`.
    Ellipse,
    /// `cos 2t (cos t, sin t)`, an immersed curve with rotation index 3.
    FourLeafRose,
    /// `(2 + cos 6t) (cos t, sin t)`.
    Flower,
    /// Axis-aligned 4 x 1 rectangle with a corner at the origin, sampled at
    /// equal arclength counterclockwise starting from that corner.
    Rectangle4x1,
}

impl CurveKind {
    pub const ALL: [CurveKind; 4] = [
        CurveKind::Ellipse,
        CurveKind::FourLeafRose,
        CurveKind::Flower,
        CurveKind::Rectangle4x1,
    ];

    pub fn cli_name(self) -> &'static str {
        match self {
            CurveKind::Ellipse => "ellipse",
            CurveKind::FourLeafRose => "rose",
            CurveKind::Flower => "flower",
            CurveKind::Rectangle4x1 => "rect",
        }
    }

    fn min_vertices(self) -> usize {
        match self {
            CurveKind::Rectangle4x1 => 8,
            _ => 3,
        }
    }

    /// Point on the curve at parameter `theta in [0, 2 pi)`.
    pub fn point(self, theta: f64) -> Vec2 {
        match self {
            CurveKind::Ellipse => Vec2::new(2.0 * theta.cos(), theta.sin()),
            CurveKind::FourLeafRose => {
                let r = (2.0 * theta).cos();
                Vec2::new(r * theta.cos(), r * theta.sin())
            }
            CurveKind::Flower => {
                let r = 2.0 + (6.0 * theta).cos();
                Vec2::new(r * theta.cos(), r * theta.sin())
            }
            CurveKind::Rectangle4x1 => rectangle_point(10.0 * theta / TAU),
        }
    }
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for CurveKind {
    type Err = FlowError;

    fn from_str(s: &str) -> Result<Self> {
        CurveKind::ALL
            .into_iter()
            .find(|k| k.cli_name() == s)
            .ok_or_else(|| FlowError::InvalidConfig(format!("unknown curve kind '{s}'")))
    }
}

/// Point at arclength `s in [0, 10)` along the rectangle boundary.
fn rectangle_point(s: f64) -> Vec2 {
    const W: f64 = 4.0;
    const H: f64 = 1.0;
    if s <= W {
        Vec2::new(s, 0.0)
    } else if s <= W + H {
        Vec2::new(W, s - W)
    } else if s <= 2.0 * W + H {
        Vec2::new(W - (s - W - H), H)
    } else {
        Vec2::new(0.0, H - (s - 2.0 * W - H))
    }
}

pub fn sample_curve(kind: CurveKind, n: usize) -> Result<GridCurve> {
    if n < kind.min_vertices() {
        return Err(FlowError::InvalidN {
            n,
            reason: match kind {
                CurveKind::Rectangle4x1 => "the rectangle needs at least 8 vertices",
                _ => "a closed curve needs at least 3 vertices",
            },
        });
    }
    let vertices = match kind {
        // Arclength sampling computed from s_j = 10 j / N directly so corner
        // vertices land exactly on the corners.
        CurveKind::Rectangle4x1 => (0..n)
            .map(|j| rectangle_point(10.0 * j as f64 / n as f64))
            .collect(),
        _ => (0..n)
            .map(|j| kind.point(TAU * j as f64 / n as f64))
            .collect(),
    };
    GridCurve::new(vertices)
}

/// Samples an arbitrary closed parametrization `X: [0, 2 pi) -> R^2`.
pub fn sample_parametric<F>(n: usize, param: F) -> Result<GridCurve>
where
    F: Fn(f64) -> Vec2,
{
    GridCurve::new((0..n).map(|j| param(TAU * j as f64 / n as f64)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{mesh_ratio, perimeter, signed_area};
    use approx::assert_abs_diff_eq;

    #[test]
    fn ellipse_four_points() {
        let c = sample_curve(CurveKind::Ellipse, 4).unwrap();
        let expect = [(2.0, 0.0), (0.0, 1.0), (-2.0, 0.0), (0.0, -1.0)];
        for (v, e) in c.vertices().iter().zip(expect) {
            assert_abs_diff_eq!(v.x, e.0, epsilon = 1e-15);
            assert_abs_diff_eq!(v.y, e.1, epsilon = 1e-15);
        }
    }

    #[test]
    fn first_nodes() {
        let rose = sample_curve(CurveKind::FourLeafRose, 32).unwrap();
        assert_eq!(rose.vertices()[0], Vec2::new(1.0, 0.0));
        let flower = sample_curve(CurveKind::Flower, 32).unwrap();
        assert_eq!(flower.vertices()[0], Vec2::new(3.0, 0.0));
    }

    #[test]
    fn rectangle_is_exact_when_corners_are_nodes() {
        let c = sample_curve(CurveKind::Rectangle4x1, 20).unwrap();
        assert_eq!(perimeter(&c), 10.0);
        assert_eq!(signed_area(&c), 4.0);
        assert_eq!(mesh_ratio(&c), 1.0);
        assert!(c.vertices().contains(&Vec2::new(4.0, 1.0)));
    }

    #[test]
    fn invalid_sizes() {
        assert!(sample_curve(CurveKind::Ellipse, 2).is_err());
        assert!(sample_curve(CurveKind::Rectangle4x1, 7).is_err());
        assert!(sample_curve(CurveKind::Rectangle4x1, 8).is_ok());
    }

    #[test]
    fn rose_divisible_by_eight_is_valid() {
        for n in [8usize, 16, 64, 80, 256] {
            assert!(sample_curve(CurveKind::FourLeafRose, n).is_ok());
        }
    }

    #[test]
    fn parse_names() {
        for k in CurveKind::ALL {
            assert_eq!(k.cli_name().parse::<CurveKind>().unwrap(), k);
        }
        assert!("circle".parse::<CurveKind>().is_err());
    }

    #[test]
    fn perimeter_converges_at_second_order() {
        // Reference perimeters from a very fine chord sum; the chord defect
        // of that reference is ~1e-12 and does not affect the ratios.
        for kind in [
            CurveKind::Ellipse,
            CurveKind::FourLeafRose,
            CurveKind::Flower,
        ] {
            let reference = perimeter(&sample_curve(kind, 1 << 20).unwrap());
            let defects: Vec<f64> = [64usize, 128, 256, 512]
                .iter()
                .map(|&n| reference - perimeter(&sample_curve(kind, n).unwrap()))
                .collect();
            for w in defects.windows(2) {
                let ratio = w[0] / w[1];
                assert!((3.6..4.4).contains(&ratio), "{kind}: ratio {ratio}");
            }
        }
    }
}
