//! Classical (large-J) limit of the Trotterized step: a kicked top on the
//! unit sphere, with tangent-map Lyapunov exponents and area-weighted
//! regular/chaotic classification.
//!
//! One step maps a unit vector `(x, y, z)` by
//! 1. a twist about the x-axis by angle `-(s tau) x`, then
//! 2. a rotation about the z-axis by angle `-(1-s) tau`.

use crate::error::{invalid, Result};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ClassicalState {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if (n - 1.0).abs() > 1e-12 {
            return Err(invalid(format!(
                "classical spin has length {n}, expected 1"
            )));
        }
        Ok(Self { x, y, z })
    }

    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self {
            x: theta.sin() * phi.cos(),
            y: theta.sin() * phi.sin(),
            z: theta.cos(),
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance(&self, other: &ClassicalState) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2) + (self.z - other.z).powi(2))
            .sqrt()
    }

    fn renormalized(self) -> Self {
        let n = self.norm();
        Self {
            x: self.x / n,
            y: self.y / n,
            z: self.z / n,
        }
    }
}

/// Precomputed step constants.
#[derive(Debug, Clone, Copy)]
struct KickedTop {
    kick: f64,
    cos_p: f64,
    sin_p: f64,
}

impl KickedTop {
    fn new(s: f64, tau: f64) -> Self {
        let p = -(1.0 - s) * tau;
        Self {
            kick: s * tau,
            cos_p: p.cos(),
            sin_p: p.sin(),
        }
    }

    fn twist(&self, c: &ClassicalState) -> (ClassicalState, f64, f64) {
        let a = -self.kick * c.x;
        let (sa, ca) = a.sin_cos();
        let out = ClassicalState {
            x: c.x,
            y: c.y * ca - c.z * sa,
            z: c.y * sa + c.z * ca,
        };
        (out, sa, ca)
    }

    fn rotate(&self, v: [f64; 3]) -> [f64; 3] {
        [
            self.cos_p * v[0] - self.sin_p * v[1],
            self.sin_p * v[0] + self.cos_p * v[1],
            v[2],
        ]
    }

    fn step(&self, c: &ClassicalState) -> ClassicalState {
        let (t, _, _) = self.twist(c);
        let [x, y, z] = self.rotate(t.as_array());
        ClassicalState { x, y, z }.renormalized()
    }

    /// Step plus the image of tangent vector `v` under the Jacobian.
    fn step_tangent(&self, c: &ClassicalState, v: [f64; 3]) -> (ClassicalState, [f64; 3]) {
        let (t, sa, ca) = self.twist(c);
        let k = self.kick;
        // d(y', z')/dx picks up the derivative of the twist angle -k x.
        let dv = [
            v[0],
            k * t.z * v[0] + ca * v[1] - sa * v[2],
            -k * t.y * v[0] + sa * v[1] + ca * v[2],
        ];
        let [x, y, z] = self.rotate(t.as_array());
        (ClassicalState { x, y, z }.renormalized(), self.rotate(dv))
    }
}

pub fn classical_step(c: &ClassicalState, s: f64, tau: f64) -> ClassicalState {
    KickedTop::new(s, tau).step(c)
}

/// Iterates the map `n` times and returns every visited point, starting with `c0`.
pub fn classical_orbit(c0: &ClassicalState, s: f64, tau: f64, n: usize) -> Vec<ClassicalState> {
    let map = KickedTop::new(s, tau);
    let mut out = Vec::with_capacity(n + 1);
    out.push(*c0);
    let mut c = *c0;
    for _ in 0..n {
        c = map.step(&c);
        out.push(c);
    }
    out
}

fn project_tangent(c: &ClassicalState, v: [f64; 3]) -> [f64; 3] {
    let d = c.x * v[0] + c.y * v[1] + c.z * v[2];
    [v[0] - d * c.x, v[1] - d * c.y, v[2] - d * c.z]
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Largest Lyapunov exponent per step, from a tangent vector kept in the
/// local tangent plane and renormalized every step.
pub fn lyapunov_exponent(c0: &ClassicalState, s: f64, tau: f64, n_iter: usize) -> Result<f64> {
    if n_iter < 100 {
        return Err(invalid(format!("n_iter = {n_iter} < 100")));
    }
    Ok(lyapunov_unchecked(c0, s, tau, n_iter))
}

fn lyapunov_unchecked(c0: &ClassicalState, s: f64, tau: f64, n_iter: usize) -> f64 {
    let map = KickedTop::new(s, tau);
    // Any direction not parallel to c0 works; pick the least aligned axis.
    let a = c0.as_array();
    let mut seed = [0.0; 3];
    let k = (0..3)
        .min_by(|&i, &j| a[i].abs().total_cmp(&a[j].abs()))
        .unwrap_or(0);
    seed[k] = 1.0;
    let mut v = project_tangent(c0, seed);
    let n0 = norm3(v);
    v = [v[0] / n0, v[1] / n0, v[2] / n0];

    let mut c = *c0;
    let mut log_sum = 0.0;
    for _ in 0..n_iter {
        let (next, dv) = map.step_tangent(&c, v);
        let dv = project_tangent(&next, dv);
        let g = norm3(dv);
        log_sum += g.ln();
        v = [dv[0] / g, dv[1] / g, dv[2] / g];
        c = next;
    }
    log_sum / n_iter as f64
}

/// One grid point of a chaos map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChaosPoint {
    pub theta: f64,
    pub phi: f64,
    pub lyapunov: f64,
    pub chaotic: bool,
}

#[derive(Debug, Clone)]
pub struct ChaosMap {
    pub grid: Vec<ChaosPoint>,
    pub s: f64,
    pub tau: f64,
    pub threshold: f64,
    pub n_iter: usize,
}

impl ChaosMap {
    /// Fraction of (equal-area) grid points classified chaotic.
    pub fn chaos_fraction(&self) -> f64 {
        self.grid.iter().filter(|p| p.chaotic).count() as f64 / self.grid.len() as f64
    }
}

pub const DEFAULT_THRESHOLD: f64 = 0.01;
pub const DEFAULT_N_ITER: usize = 2000;
pub const DEFAULT_GRID: usize = 2000;

/// Fibonacci-sphere points: equal-area cells, returned as `(theta, phi)`.
pub fn fibonacci_sphere(n: usize) -> Vec<(f64, f64)> {
    let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let phi = (golden * i as f64).rem_euclid(2.0 * std::f64::consts::PI);
            (z.acos(), phi)
        })
        .collect()
}

pub fn chaos_map(
    s: f64,
    tau: f64,
    grid_resolution: usize,
    threshold: f64,
    n_iter: usize,
) -> Result<ChaosMap> {
    if grid_resolution < 16 {
        return Err(invalid(format!("grid resolution {grid_resolution} < 16")));
    }
    if n_iter < 100 {
        return Err(invalid(format!("n_iter = {n_iter} < 100")));
    }
    let pts = fibonacci_sphere(grid_resolution);
    let grid = par::map_slice(&pts, |&(theta, phi)| {
        let lyap = lyapunov_unchecked(&ClassicalState::from_angles(theta, phi), s, tau, n_iter);
        ChaosPoint {
            theta,
            phi,
            lyapunov: lyap,
            chaotic: lyap > threshold,
        }
    });
    Ok(ChaosMap {
        grid,
        s,
        tau,
        threshold,
        n_iter,
    })
}

pub fn chaos_fraction(
    s: f64,
    tau: f64,
    grid_resolution: usize,
    threshold: f64,
    n_iter: usize,
) -> Result<f64> {
    Ok(chaos_map(s, tau, grid_resolution, threshold, n_iter)?.chaos_fraction())
}
