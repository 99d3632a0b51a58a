//! Independent oracles shared by the integration tests and the acceptance
//! runner. Everything here works on plain `[f64; 2]` arrays and naive loops
//! and only touches the library to read vertices or call the code under test.

#![allow(dead_code, clippy::needless_range_loop)]

use std::f64::consts::TAU;

use curveflow::linalg::{BlockCyclicTridiag, CyclicTridiag, Mat2};
use curveflow::{ForceSpec, GridCurve, Vec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type P = [f64; 2];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn pts(curve: &GridCurve) -> Vec<P> {
    curve.vertices().iter().map(|v| [v.x, v.y]).collect()
}

pub fn curve(points: &[P]) -> GridCurve {
    GridCurve::new(points.iter().map(|p| Vec2::new(p[0], p[1])).collect()).unwrap()
}

fn sub(a: P, b: P) -> P {
    [a[0] - b[0], a[1] - b[1]]
}
fn add(a: P, b: P) -> P {
    [a[0] + b[0], a[1] + b[1]]
}
fn scale(a: P, s: f64) -> P {
    [a[0] * s, a[1] * s]
}
fn dot(a: P, b: P) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}
fn norm(a: P) -> f64 {
    dot(a, a).sqrt()
}
fn rot90(a: P) -> P {
    [-a[1], a[0]]
}
fn unit(a: P) -> P {
    scale(a, 1.0 / norm(a))
}

/// Star-shaped counterclockwise polygon with jittered angles and radii.
pub fn random_polygon(rng: &mut ChaCha8Rng, n: usize) -> GridCurve {
    let cx = rng.gen_range(-1.0..1.0);
    let cy = rng.gen_range(-1.0..1.0);
    let s = rng.gen_range(0.5..2.0);
    let points: Vec<P> = (0..n)
        .map(|j| {
            let a = TAU * (j as f64 + rng.gen_range(-0.3..0.3)) / n as f64;
            let r = s * rng.gen_range(0.6..1.4);
            [cx + r * a.cos(), cy + r * a.sin()]
        })
        .collect();
    curve(&points)
}

pub fn random_force(rng: &mut ChaCha8Rng) -> ForceSpec {
    match rng.gen_range(0..3) {
        0 => ForceSpec::AreaPreservingSimple,
        1 => ForceSpec::AreaPreservingNonsimple {
            ind: rng.gen_range(1..4),
        },
        _ => ForceSpec::PrescribedRate {
            beta: rng.gen_range(-5.0..5.0),
        },
    }
}

/// Gaussian elimination with partial pivoting on a dense copy.
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let m = a[row][col] / a[col][col];
            if m != 0.0 {
                for k in col..n {
                    a[row][k] -= m * a[col][k];
                }
                b[row] -= m * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Dense 2N x 2N system with unknowns ordered `x_0, y_0, x_1, y_1, ...`.
pub struct Dense {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl Dense {
    pub fn new(n: usize) -> Self {
        Dense {
            a: vec![vec![0.0; 2 * n]; 2 * n],
            b: vec![0.0; 2 * n],
        }
    }

    /// Adds the 2x2 block `m` (row-major) at block position (i, k).
    pub fn add_block(&mut self, i: usize, k: usize, m: [[f64; 2]; 2]) {
        for r in 0..2 {
            for c in 0..2 {
                self.a[2 * i + r][2 * k + c] += m[r][c];
            }
        }
    }

    pub fn solve(self) -> Vec<P> {
        let x = dense_solve(self.a, self.b);
        x.chunks(2).map(|c| [c[0], c[1]]).collect()
    }
}

const I2: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, 1.0]];
const J2: [[f64; 2]; 2] = [[0.0, -1.0], [1.0, 0.0]];

fn ms(m: [[f64; 2]; 2], s: f64) -> [[f64; 2]; 2] {
    [[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]]
}

fn f_of(spec: &ForceSpec, x: &[P]) -> f64 {
    let n = x.len();
    let l: f64 = (0..n).map(|j| norm(sub(x[j], x[(j + n - 1) % n]))).sum();
    let c = match *spec {
        ForceSpec::AreaPreservingSimple => TAU,
        ForceSpec::AreaPreservingNonsimple { ind } => TAU * ind as f64,
        ForceSpec::PrescribedRate { beta } => TAU - beta,
    };
    c / l
}

struct Edges {
    q: Vec<f64>,
    t: Vec<P>,
}

/// Edge `j` runs from vertex `j - 1` to vertex `j`.
fn edges(x: &[P]) -> Edges {
    let n = x.len();
    let e: Vec<P> = (0..n).map(|j| sub(x[j], x[(j + n - 1) % n])).collect();
    Edges {
        q: e.iter().map(|v| norm(*v)).collect(),
        t: e.iter().map(|v| unit(*v)).collect(),
    }
}

/// Backward-Euler finite difference step assembled densely.
pub fn fdm_dense_step(c: &GridCurve, tau: f64, spec: &ForceSpec) -> Vec<P> {
    let x = pts(c);
    let n = x.len();
    let Edges { q, t } = edges(&x);
    let f = f_of(spec, &x);
    let mut d = Dense::new(n);
    for j in 0..n {
        let k = (j + 1) % n;
        let a = 2.0 / (q[j] + q[k]);
        d.add_block(j, j, ms(I2, 1.0 / tau + a / q[k] + a / q[j]));
        d.add_block(j, k, ms(I2, -a / q[k]));
        d.add_block(j, (j + n - 1) % n, ms(I2, -a / q[j]));
        let nb = rot90(unit(add(t[j], t[k])));
        let rhs = sub(scale(x[j], 1.0 / tau), scale(nb, f));
        d.b[2 * j] = rhs[0];
        d.b[2 * j + 1] = rhs[1];
    }
    d.solve()
}

/// Mass-lumped finite element step assembled densely.
pub fn fem_dense_step(c: &GridCurve, tau: f64, spec: &ForceSpec) -> Vec<P> {
    let x = pts(c);
    let n = x.len();
    let Edges { q, .. } = edges(&x);
    let f = f_of(spec, &x);
    let mut d = Dense::new(n);
    for j in 0..n {
        let k = (j + 1) % n;
        let i = (j + n - 1) % n;
        let mass = (q[j] + q[k]) / (2.0 * tau);
        d.add_block(j, j, ms(I2, mass + 1.0 / q[k] + 1.0 / q[j]));
        d.add_block(j, k, ms(I2, -1.0 / q[k]));
        d.add_block(j, i, ms(I2, -1.0 / q[j]));
        d.add_block(j, k, ms(J2, f / 2.0));
        d.add_block(j, i, ms(J2, -f / 2.0));
        d.b[2 * j] = mass * x[j][0];
        d.b[2 * j + 1] = mass * x[j][1];
    }
    d.solve()
}

/// Tangential-motion step assembled densely; `bisector` selects the vertex
/// normal `normalize(n_j + n_{j+1})` instead of `n_j`.
pub fn fem_tm_dense_step(
    c: &GridCurve,
    tau: f64,
    spec: &ForceSpec,
    alpha: f64,
    bisector: bool,
) -> Vec<P> {
    let x = pts(c);
    let n = x.len();
    let Edges { q, t } = edges(&x);
    let f = f_of(spec, &x);
    let mut d = Dense::new(n);
    for j in 0..n {
        let k = (j + 1) % n;
        let nv = if bisector {
            unit(add(rot90(t[j]), rot90(t[k])))
        } else {
            rot90(t[j])
        };
        let m = [
            [
                alpha + (1.0 - alpha) * nv[0] * nv[0],
                (1.0 - alpha) * nv[0] * nv[1],
            ],
            [
                (1.0 - alpha) * nv[1] * nv[0],
                alpha + (1.0 - alpha) * nv[1] * nv[1],
            ],
        ];
        let w = 2.0 / (q[j] * q[j] + q[k] * q[k]);
        d.add_block(j, j, ms(m, 1.0 / tau));
        d.add_block(j, j, ms(I2, 2.0 * w));
        d.add_block(j, k, ms(I2, -w));
        d.add_block(j, (j + n - 1) % n, ms(I2, -w));
        let mx = [
            (m[0][0] * x[j][0] + m[0][1] * x[j][1]) / tau,
            (m[1][0] * x[j][0] + m[1][1] * x[j][1]) / tau,
        ];
        let rhs = sub(mx, scale(nv, f));
        d.b[2 * j] = rhs[0];
        d.b[2 * j + 1] = rhs[1];
    }
    d.solve()
}

pub fn max_diff(a: &[P], b: &GridCurve) -> f64 {
    a.iter()
        .zip(b.vertices())
        .map(|(p, v)| (p[0] - v.x).abs().max((p[1] - v.y).abs()))
        .fold(0.0, f64::max)
}

/// Largest relative residual over vertices of the finite difference length
/// identity, with `v` the semi-discrete velocity.
pub fn fdm_length_identity_residual(c: &GridCurve, v: &[Vec2], spec: &ForceSpec) -> f64 {
    let x = pts(c);
    let n = x.len();
    let Edges { q, t } = edges(&x);
    let f = f_of(spec, &x);
    let v: Vec<P> = v.iter().map(|u| [u.x, u.y]).collect();
    // normal at vertex j bisects edges j and j + 1
    let nb: Vec<P> = (0..n)
        .map(|j| rot90(unit(add(t[j], t[(j + 1) % n]))))
        .collect();
    let mut worst = 0.0f64;
    for j in 0..n {
        let i = (j + n - 1) % n;
        let k = (j + 1) % n;
        let terms = [
            dot(sub(v[j], v[i]), t[j]),
            (q[i] + q[j]) / 4.0 * dot(v[i], v[i]),
            (q[j] + q[k]) / 4.0 * dot(v[j], v[j]),
            (q[i] + q[j]) / 4.0 * f * dot(v[i], nb[i]),
            (q[k] + q[j]) / 4.0 * f * dot(v[j], nb[j]),
        ];
        let big = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        let s: f64 = terms.iter().sum();
        worst = worst.max(s.abs() / big.max(f64::MIN_POSITIVE));
    }
    worst
}

/// Relative residuals of the two finite element length identities: the
/// squared-velocity form and the tangent-jump form.
pub fn fem_length_identity_residuals(c: &GridCurve, v: &[Vec2], spec: &ForceSpec) -> (f64, f64) {
    let x = pts(c);
    let n = x.len();
    let Edges { q, t } = edges(&x);
    let f = f_of(spec, &x);
    let v: Vec<P> = v.iter().map(|u| [u.x, u.y]).collect();
    let nrm: Vec<P> = t.iter().map(|t| rot90(*t)).collect();
    let r: Vec<P> = (0..n)
        .map(|j| {
            let k = (j + 1) % n;
            scale(
                add(scale(nrm[j], q[j]), scale(nrm[k], q[k])),
                -f / (q[j] + q[k]),
            )
        })
        .collect();
    let (mut w1, mut w2) = (0.0f64, 0.0f64);
    for j in 0..n {
        let i = (j + n - 1) % n;
        let k = (j + 1) % n;
        let lhs = dot(sub(v[j], v[i]), t[j]);
        let dj = sub(v[j], r[j]);
        let di = sub(v[i], r[i]);
        let tail = dot(t[j], sub(r[j], r[i]));
        let a = [
            -(q[j] + q[k]) / 4.0 * dot(dj, dj),
            -(q[j] + q[i]) / 4.0 * dot(di, di),
            tail,
        ];
        let jk = sub(t[k], t[j]);
        let ji = sub(t[i], t[j]);
        let b = [
            -dot(jk, jk) / (q[j] + q[k]),
            -dot(ji, ji) / (q[j] + q[i]),
            tail,
        ];
        let scale_a = a
            .iter()
            .fold(lhs.abs(), |m, t| m.max(t.abs()))
            .max(f64::MIN_POSITIVE);
        let scale_b = b
            .iter()
            .fold(lhs.abs(), |m, t| m.max(t.abs()))
            .max(f64::MIN_POSITIVE);
        w1 = w1.max((lhs - a.iter().sum::<f64>()).abs() / scale_a);
        w2 = w2.max((lhs - b.iter().sum::<f64>()).abs() / scale_b);
    }
    (w1, w2)
}

/// `max_j |perp(b_j) . tau_j + tau_{j-1} . perp(b_j)|` with `b_j` the bisector
/// of edges `j - 1` and `j`.
pub fn bisector_identity_residual(c: &GridCurve) -> f64 {
    let x = pts(c);
    let n = x.len();
    let Edges { t, .. } = edges(&x);
    (0..n)
        .map(|j| {
            let i = (j + n - 1) % n;
            let b = rot90(unit(add(t[i], t[j])));
            (dot(b, t[j]) + dot(t[i], b)).abs()
        })
        .fold(0.0, f64::max)
}

/// Winding number by summing the signed angles subtended by every edge.
pub fn winding_by_angles(x: &[P], p: P) -> i32 {
    let n = x.len();
    let mut total = 0.0;
    for j in 0..n {
        let a = sub(x[j], p);
        let b = sub(x[(j + 1) % n], p);
        total += (a[0] * b[1] - a[1] * b[0]).atan2(dot(a, b));
    }
    (total / TAU).round() as i32
}

/// Midpoint-rule integral of `|w_1 - w_2|` over a `cells x cells` grid
/// covering both polygons.
pub fn grid_winding_distance(a: &GridCurve, b: &GridCurve, cells: usize) -> f64 {
    let xa = pts(a);
    let xb = pts(b);
    let all: Vec<P> = xa.iter().chain(&xb).copied().collect();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &all {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let wx = (hi[0] - lo[0]) / cells as f64;
    let wy = (hi[1] - lo[1]) / cells as f64;
    let mut sum = 0.0;
    for i in 0..cells {
        for k in 0..cells {
            let p = [lo[0] + (i as f64 + 0.5) * wx, lo[1] + (k as f64 + 0.5) * wy];
            sum += (winding_by_angles(&xa, p) - winding_by_angles(&xb, p)).abs() as f64;
        }
    }
    sum * wx * wy
}

/// Bound on the midpoint-rule error of [`grid_winding_distance`] when
/// `|w_1 - w_2| <= max_jump` everywhere: only cells cut by an edge can be
/// misclassified, and an edge of length `l` cuts at most
/// `l / wx + l / wy + 2` cells.
pub fn grid_oracle_resolution(a: &GridCurve, b: &GridCurve, cells: usize, max_jump: f64) -> f64 {
    let all: Vec<P> = pts(a).into_iter().chain(pts(b)).collect();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &all {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let wx = (hi[0] - lo[0]) / cells as f64;
    let wy = (hi[1] - lo[1]) / cells as f64;
    let mut bound = 0.0;
    for c in [a, b] {
        let x = pts(c);
        let n = x.len();
        for j in 0..n {
            let l = norm(sub(x[j], x[(j + n - 1) % n]));
            bound += (l / wx + l / wy + 2.0) * wx * wy;
        }
    }
    bound * max_jump
}

/// Defect ratio `d(tau) / d(tau / 2)` with `d(s) = max |step(s) - x - s v|`.
pub fn richardson_ratio<F>(c: &GridCurve, v: &[Vec2], tau: f64, step: F) -> f64
where
    F: Fn(f64) -> GridCurve,
{
    let defect = |s: f64| {
        let next = step(s);
        next.vertices()
            .iter()
            .zip(c.vertices())
            .zip(v)
            .map(|((a, b), w)| (*a - *b - *w * s).norm())
            .fold(0.0, f64::max)
    };
    defect(tau) / defect(tau / 2.0)
}

// Random diagonally dominant cyclic systems and their dense forms.

pub fn dominant_scalar(rng: &mut impl Rng, n: usize) -> (CyclicTridiag, Vec<f64>) {
    let sub: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let sup: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let diag: Vec<f64> = (0..n)
        .map(|j| {
            let m = sub[j].abs() + sup[j].abs() + rng.gen_range(0.1..2.0);
            if rng.gen_bool(0.5) {
                m
            } else {
                -m
            }
        })
        .collect();
    let rhs = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
    (CyclicTridiag::new(sub, diag, sup).unwrap(), rhs)
}

pub fn dense_of_scalar(a: &CyclicTridiag) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m = vec![vec![0.0; n]; n];
    for j in 0..n {
        m[j][(j + n - 1) % n] += a.sub[j];
        m[j][j] += a.diag[j];
        m[j][(j + 1) % n] += a.sup[j];
    }
    m
}

pub fn random_mat(rng: &mut impl Rng, s: f64) -> Mat2 {
    Mat2::new(
        rng.gen_range(-s..s),
        rng.gen_range(-s..s),
        rng.gen_range(-s..s),
        rng.gen_range(-s..s),
    )
}

pub fn dominant_block(rng: &mut impl Rng, n: usize) -> (BlockCyclicTridiag, Vec<Vec2>) {
    let sub: Vec<Mat2> = (0..n).map(|_| random_mat(rng, 0.5)).collect();
    let sup: Vec<Mat2> = (0..n).map(|_| random_mat(rng, 0.5)).collect();
    let diag: Vec<Mat2> = (0..n)
        .map(|_| random_mat(rng, 0.3) + Mat2::scalar(rng.gen_range(2.6..4.0)))
        .collect();
    let rhs = (0..n)
        .map(|_| Vec2::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)))
        .collect();
    (BlockCyclicTridiag::new(sub, diag, sup).unwrap(), rhs)
}

pub fn dense_of_block(a: &BlockCyclicTridiag) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m = vec![vec![0.0; 2 * n]; 2 * n];
    let mut put = |i: usize, k: usize, b: Mat2| {
        m[2 * i][2 * k] += b.a;
        m[2 * i][2 * k + 1] += b.b;
        m[2 * i + 1][2 * k] += b.c;
        m[2 * i + 1][2 * k + 1] += b.d;
    };
    for j in 0..n {
        put(j, (j + n - 1) % n, a.sub[j]);
        put(j, j, a.diag[j]);
        put(j, (j + 1) % n, a.sup[j]);
    }
    m
}
