//! Finite-dimensional su(2) algebra for a single spin `J`.
//!
//! Everything lives in the `J_z` eigenbasis ordered `m = J, J-1, ..., -J`, so
//! basis index `k` carries `m = J - k`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::linalg::{c, hermiticity_defect, unitarity_defect, Matrix, Vector, I};

/// Tolerance used when validating Hermitian generators.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Tolerance used when validating unitaries.
pub const UNITARY_TOL: f64 = 1e-10;

/// Spin quantum number stored as `2J` so half-integer spins are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinQuantumNumber {
    two_j: u32,
}

impl SpinQuantumNumber {
    pub fn new(two_j: u32) -> Result<Self> {
        if two_j == 0 {
            return Err(Error::DegenerateDimension(two_j));
        }
        Ok(Self { two_j })
    }

    /// Spin whose multiplet has dimension `dim`.
    pub fn from_dim(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DegenerateDimension(dim.saturating_sub(1) as u32));
        }
        Self::new((dim - 1) as u32)
    }

    pub fn two_j(self) -> u32 {
        self.two_j
    }

    pub fn j(self) -> f64 {
        f64::from(self.two_j) / 2.0
    }

    pub fn dim(self) -> usize {
        self.two_j as usize + 1
    }

    /// Magnetic quantum number of basis index `k`.
    pub fn m(self, k: usize) -> f64 {
        self.j() - k as f64
    }

    pub fn m_values(self) -> impl Iterator<Item = f64> {
        let j = self.j();
        (0..self.dim()).map(move |k| j - k as f64)
    }
}

/// `J_x`, `J_y`, `J_z` and `J^2` for one spin.
#[derive(Debug, Clone)]
pub struct AngularMomentumOps {
    pub spin: SpinQuantumNumber,
    pub jx: Matrix,
    pub jy: Matrix,
    pub jz: Matrix,
    pub jsq: Matrix,
}

impl AngularMomentumOps {
    pub fn dim(&self) -> usize {
        self.spin.dim()
    }

    /// `n.J` for a (unit) direction.
    pub fn along(&self, n: [f64; 3]) -> Matrix {
        &self.jx * c(n[0]) + &self.jy * c(n[1]) + &self.jz * c(n[2])
    }
}

/// Builds the spin matrices from the ladder operators
/// `J+|m> = sqrt(J(J+1) - m(m+1)) |m+1>`.
pub fn build_ops(spin: SpinQuantumNumber) -> AngularMomentumOps {
    let d = spin.dim();
    let j = spin.j();
    let mut jp = Matrix::zeros(d, d);
    // J+ maps index k+1 (m-1) to index k (m).
    for k in 0..d - 1 {
        let m_low = spin.m(k + 1);
        jp[(k, k + 1)] = c((j * (j + 1.0) - m_low * (m_low + 1.0)).sqrt());
    }
    let jm = jp.adjoint();
    let jx = (&jp + &jm) * c(0.5);
    let jy = (&jp - &jm) * Complex64::new(0.0, -0.5);
    let jz = Matrix::from_diagonal(&Vector::from_iterator(d, spin.m_values().map(c)));
    let jsq = &jx * &jx + &jy * &jy + &jz * &jz;
    AngularMomentumOps {
        spin,
        jx,
        jy,
        jz,
        jsq,
    }
}

/// Normalized pure state in the `J_z` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amplitudes: Vector,
}

impl QuantumState {
    pub const NORM_TOL: f64 = 1e-12;

    /// Wraps an amplitude vector that is already normalized.
    pub fn new(amplitudes: Vector) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Invariant(format!(
                "state norm {norm} differs from 1"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(amplitudes: Vector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(invalid("cannot normalize a zero or non-finite vector"));
        }
        Ok(Self {
            amplitudes: amplitudes / c(norm),
        })
    }

    pub(crate) fn from_raw(amplitudes: Vector) -> Self {
        Self { amplitudes }
    }

    /// `|m = J>`, the first basis vector.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Vector::zeros(dim);
        v[k] = c(1.0);
        Self { amplitudes: v }
    }

    pub fn amplitudes(&self) -> &Vector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vector {
        self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn overlap(&self, other: &QuantumState) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn expectation(&self, op: &Matrix) -> Complex64 {
        crate::linalg::expectation(op, &self.amplitudes)
    }

    /// Bloch vector `<J>/J`.
    pub fn bloch(&self, ops: &AngularMomentumOps) -> [f64; 3] {
        let j = ops.spin.j();
        [
            self.expectation(&ops.jx).re / j,
            self.expectation(&ops.jy).re / j,
            self.expectation(&ops.jz).re / j,
        ]
    }

    pub fn projector(&self) -> Matrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    pub fn apply(&self, u: &UnitaryMatrix) -> Result<QuantumState> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: u.dim(),
                actual: self.dim(),
            });
        }
        Ok(Self {
            amplitudes: u.matrix() * &self.amplitudes,
        })
    }
}

/// Square unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(Matrix);

impl UnitaryMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        let defect = unitarity_defect(&m);
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self(m))
    }

    pub(crate) fn from_raw(m: Matrix) -> Self {
        Self(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self(Matrix::identity(dim, dim))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn adjoint(&self) -> UnitaryMatrix {
        Self(self.0.adjoint())
    }

    pub fn compose(&self, rhs: &UnitaryMatrix) -> UnitaryMatrix {
        Self(&self.0 * &rhs.0)
    }

    pub fn trace(&self) -> Complex64 {
        crate::linalg::trace(&self.0)
    }

    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.0)
    }

    /// Integer power by repeated squaring.
    pub fn pow(&self, n: usize) -> UnitaryMatrix {
        let d = self.dim();
        let mut result = Matrix::identity(d, d);
        let mut base = self.0.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        Self(result)
    }
}

/// Unit axis given by polar/azimuthal angles.
pub fn unit_axis(theta: f64, phi: f64) -> [f64; 3] {
    [
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    ]
}

/// Rotation `exp(-i alpha n.J)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationSpec {
    axis: [f64; 3],
    alpha: f64,
}

impl RotationSpec {
    pub fn new(axis: [f64; 3], alpha: f64) -> Result<Self> {
        let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(invalid(format!(
                "rotation axis has norm {norm}, expected 1"
            )));
        }
        if !alpha.is_finite() {
            return Err(invalid("rotation angle must be finite"));
        }
        Ok(Self { axis, alpha })
    }

    pub fn from_angles(theta: f64, phi: f64, alpha: f64) -> Result<Self> {
        Self::new(unit_axis(theta, phi), alpha)
    }

    /// The `alpha = 2 pi / d` rotation about the given direction; this angle
    /// makes the rotation traceless.
    pub fn optimal(theta: f64, phi: f64, dim: usize) -> Result<Self> {
        Self::from_angles(theta, phi, 2.0 * PI / dim as f64)
    }

    pub fn axis(&self) -> [f64; 3] {
        self.axis
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// `exp(i * scale * h)` for Hermitian `h`, via its eigendecomposition.
pub fn expm_generator(h: &Matrix, scale: f64) -> Result<UnitaryMatrix> {
    let defect = hermiticity_defect(h);
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    // Symmetrize so the eigensolver sees an exactly Hermitian input.
    let herm = (h + h.adjoint()) * c(0.5);
    let eig = herm.symmetric_eigen();
    let phases = eig.eigenvalues.map(|lam| (I * (scale * lam)).exp());
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (k, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[k];
    }
    Ok(UnitaryMatrix(scaled * v.adjoint()))
}

/// `|theta, phi> = exp(-i phi J_z) exp(-i theta J_y) |J, J>`.
///
/// Uses the closed form of the Wigner small-d column
/// `d^J_{m,J}(theta) = sqrt(C(2J, J-m)) cos^{J+m}(theta/2) sin^{J-m}(theta/2)`.
pub fn spin_coherent(spin: SpinQuantumNumber, theta: f64, phi: f64) -> Result<QuantumState> {
    if !(0.0..=PI).contains(&theta) {
        return Err(invalid(format!("theta = {theta} outside [0, pi]")));
    }
    if !(0.0..2.0 * PI).contains(&phi) {
        return Err(invalid(format!("phi = {phi} outside [0, 2 pi)")));
    }
    let n = spin.two_j() as usize;
    let (cos_h, sin_h) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let ln_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=n).scan(0.0, |acc, k| {
            *acc += (k as f64).ln();
            Some(*acc)
        }))
        .collect();
    let amps = (0..=n).map(|k| {
        // k = J - m down-steps from the stretched state.
        let m = spin.m(k);
        let binom = (ln_fact[n] - ln_fact[k] - ln_fact[n - k]).exp().sqrt();
        let mag = binom * powi_nonneg(cos_h, n - k) * powi_nonneg(sin_h, k);
        Complex64::from_polar(mag, -m * phi)
    });
    Ok(QuantumState::from_raw(Vector::from_iterator(n + 1, amps)))
}

fn powi_nonneg(x: f64, k: usize) -> f64 {
    if k == 0 {
        1.0
    } else {
        x.powi(k as i32)
    }
}

/// `W = exp(-i alpha n.J)`.
pub fn rotation_about_axis(ops: &AngularMomentumOps, spec: &RotationSpec) -> UnitaryMatrix {
    let gen = ops.along(spec.axis());
    expm_generator(&gen, -spec.alpha()).expect("n.J is Hermitian by construction")
}

/// Polar and azimuthal angles of a point on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub theta: f64,
    pub phi: f64,
}

impl Direction {
    pub fn unit(&self) -> [f64; 3] {
        unit_axis(self.theta, self.phi)
    }
}

/// Vertices of a regular icosahedron: north pole, upper ring (azimuths
/// `2 pi k / 5`), lower ring (offset by `pi / 5`), south pole.
pub fn icosahedral_directions() -> Vec<Direction> {
    let ring = (1.0 / 5.0_f64.sqrt()).acos();
    let mut out = Vec::with_capacity(12);
    out.push(Direction {
        theta: 0.0,
        phi: 0.0,
    });
    for k in 0..5 {
        out.push(Direction {
            theta: ring,
            phi: 2.0 * PI * k as f64 / 5.0,
        });
    }
    for k in 0..5 {
        out.push(Direction {
            theta: PI - ring,
            phi: 2.0 * PI * k as f64 / 5.0 + PI / 5.0,
        });
    }
    out.push(Direction {
        theta: PI,
        phi: 0.0,
    });
    out
}

/// Spin-coherent states on the 12 icosahedron vertices, in the order of
/// [`icosahedral_directions`].
pub fn icosahedral_cover(spin: SpinQuantumNumber) -> Vec<QuantumState> {
    icosahedral_directions()
        .into_iter()
        .map(|d| spin_coherent(spin, d.theta, d.phi).expect("icosahedron angles are in range"))
        .collect()
}
