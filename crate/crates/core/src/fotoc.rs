//! Fidelity out-of-time-ordered correlator.
//!
//! With `V = |psi0><psi0|` and `W0` a rotation about the initial state's own
//! axis, the OTOC collapses to
//!
//! `F(T) = |<psi0| U^†n W0 U^n |psi0>|^2 = |<psi(T)| W0 |psi(T)>|^2
//!       = |sum_n P_n(T) exp(i lambda_n)|^2`
//!
//! where `P_n` are populations in the eigenbasis of `W0` and `lambda_n` its
//! eigenangles.

use num_complex::Complex64;

use crate::dynamics::{
    noisy_at_steps, propagator, pure_at_steps, DensityState, ErrorModel, LmgParams, StepKind,
};
use crate::error::{invalid, Error, Result};
use crate::linalg::{c, trace, Matrix, Vector, I};
use crate::spin_algebra::{AngularMomentumOps, QuantumState, RotationSpec, UnitaryMatrix};
use crate::stats::mean_sem;

/// Slack allowed above 1 for round-off in `F`.
pub const FOTOC_SLACK: f64 = 1e-10;

/// Eigenangles and eigenvectors (columns) of a rotation `W0`.
#[derive(Debug, Clone)]
pub struct WEigensystem {
    pub eigenangles: Vec<f64>,
    pub eigenvectors: Matrix,
}

impl WEigensystem {
    /// `sum_n exp(i lambda_n) |n><n|`.
    pub fn reconstruct(&self) -> Matrix {
        let phases = Vector::from_iterator(
            self.eigenangles.len(),
            self.eigenangles.iter().map(|&l| (I * l).exp()),
        );
        &self.eigenvectors * Matrix::from_diagonal(&phases) * self.eigenvectors.adjoint()
    }

    /// `P_n = |<n|psi>|^2`.
    pub fn populations(&self, psi: &QuantumState) -> Vec<f64> {
        (self.eigenvectors.adjoint() * psi.amplitudes())
            .iter()
            .map(|z| z.norm_sqr())
            .collect()
    }

    /// `P_n = <n|rho|n>`.
    pub fn populations_mixed(&self, rho: &DensityState) -> Vec<f64> {
        let v = &self.eigenvectors;
        (0..v.ncols())
            .map(|k| {
                let col = v.column(k);
                col.dotc(&(rho.matrix() * col)).re.max(0.0)
            })
            .collect()
    }
}

/// Eigensystem of `exp(-i alpha n.J)` from the Hermitian generator: the
/// eigenvalue `mu` of `n.J` maps to the eigenangle `-alpha mu`.
pub fn rotation_eigensystem(ops: &AngularMomentumOps, spec: &RotationSpec) -> WEigensystem {
    let eig = ops.along(spec.axis()).symmetric_eigen();
    WEigensystem {
        eigenangles: eig
            .eigenvalues
            .iter()
            .map(|mu| -spec.alpha() * mu)
            .collect(),
        eigenvectors: eig.eigenvectors,
    }
}

/// `|<psi|W0|psi>|^2`.
pub fn fotoc_pure(psi_t: &QuantumState, w0: &UnitaryMatrix) -> Result<f64> {
    if psi_t.dim() != w0.dim() {
        return Err(Error::DimensionMismatch {
            expected: w0.dim(),
            actual: psi_t.dim(),
        });
    }
    Ok(psi_t.expectation(w0.matrix()).norm_sqr())
}

/// `|sum_n P_n exp(i lambda_n)|^2`.
pub fn fotoc_from_populations(populations: &[f64], eigenangles: &[f64]) -> Result<f64> {
    if populations.len() != eigenangles.len() {
        return Err(Error::DimensionMismatch {
            expected: eigenangles.len(),
            actual: populations.len(),
        });
    }
    if let Some(p) = populations.iter().find(|&&p| p < 0.0 || !p.is_finite()) {
        return Err(Error::NotNormalized(format!(
            "negative or non-finite population {p}"
        )));
    }
    let total: f64 = populations.iter().sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized(format!("populations sum to {total}")));
    }
    let amp: Complex64 = populations
        .iter()
        .zip(eigenangles)
        .map(|(&p, &l)| c(p) * (I * l).exp())
        .sum();
    Ok(amp.norm_sqr())
}

/// `|Tr(rho W0)|^2`.
pub fn fotoc_mixed(rho_t: &DensityState, w0: &UnitaryMatrix) -> Result<f64> {
    if rho_t.dim() != w0.dim() {
        return Err(Error::DimensionMismatch {
            expected: w0.dim(),
            actual: rho_t.dim(),
        });
    }
    Ok(trace(&(rho_t.matrix() * w0.matrix())).norm_sqr())
}

/// Haar average over random pure states: `(|Tr W|^2 + d) / (d^2 + d)`.
pub fn haar_average_fotoc(w0: &UnitaryMatrix) -> f64 {
    let d = w0.dim() as f64;
    (w0.trace().norm_sqr() + d) / (d * d + d)
}

/// FOTOC samples along one trajectory.
#[derive(Debug, Clone)]
pub struct FotocSeries {
    pub label: String,
    pub sample_times: Vec<f64>,
    pub steps: Vec<usize>,
    pub values: Vec<f64>,
    pub params: LmgParams,
    pub error: ErrorModel,
    pub step_kind: StepKind,
}

impl FotocSeries {
    /// Times actually reached, `n_k * tau`.
    pub fn realized_times(&self) -> Vec<f64> {
        self.steps
            .iter()
            .map(|&n| n as f64 * self.params.tau())
            .collect()
    }
}

/// Checks that `psi0` is the stretched eigenstate of `n.J` for the rotation
/// axis, which makes `W0` commute with the projector onto `psi0`.
pub fn check_axis(
    psi0: &QuantumState,
    ops: &AngularMomentumOps,
    w_spec: &RotationSpec,
) -> Result<()> {
    let j = ops.spin.j();
    let found = psi0.expectation(&ops.along(w_spec.axis())).re;
    if (found - j).abs() > 1e-8 * j.max(1.0) {
        return Err(Error::AxisMismatch { expected: j, found });
    }
    Ok(())
}

/// FOTOC at each sample time `t`, evolving with `n = round(t / tau)` steps of
/// the chosen propagator. Noisy error models evolve a density matrix.
pub fn fotoc_trajectory(
    psi0: &QuantumState,
    ops: &AngularMomentumOps,
    w_spec: &RotationSpec,
    params: &LmgParams,
    error: &ErrorModel,
    step_kind: StepKind,
    sample_times: &[f64],
) -> Result<FotocSeries> {
    if psi0.dim() != ops.dim() {
        return Err(Error::DimensionMismatch {
            expected: ops.dim(),
            actual: psi0.dim(),
        });
    }
    if sample_times.iter().any(|&t| t.is_nan() || t < 0.0) {
        return Err(invalid("sample times must be nonnegative"));
    }
    if sample_times.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("sample times must be nondecreasing"));
    }
    check_axis(psi0, ops, w_spec)?;

    let steps: Vec<usize> = sample_times.iter().map(|&t| params.steps_for(t)).collect();
    let u = propagator(step_kind, params, ops);
    let eig = rotation_eigensystem(ops, w_spec);
    let values = if error.is_noiseless() {
        pure_at_steps(&u, psi0, &steps)
            .iter()
            .map(|psi| fotoc_from_populations(&eig.populations(psi), &eig.eigenangles))
            .collect::<Result<Vec<_>>>()?
    } else {
        let rho0 = DensityState::pure(psi0);
        noisy_at_steps(&u, error, &rho0, &steps)
            .iter()
            .map(|rho| fotoc_from_populations(&eig.populations_mixed(rho), &eig.eigenangles))
            .collect::<Result<Vec<_>>>()?
    };
    if let Some(v) = values
        .iter()
        .find(|&&v| !(0.0..=1.0 + FOTOC_SLACK).contains(&v))
    {
        return Err(Error::Invariant(format!("FOTOC value {v} outside [0, 1]")));
    }
    Ok(FotocSeries {
        label: String::new(),
        sample_times: sample_times.to_vec(),
        steps,
        values,
        params: *params,
        error: *error,
        step_kind,
    })
}

/// Pooled mean and standard error over all (state, time) samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateFotoc {
    pub mean: f64,
    pub sem: f64,
    pub n_states: usize,
    pub n_time_samples: usize,
}

pub fn aggregate(series_set: &[FotocSeries]) -> Result<AggregateFotoc> {
    let first = series_set.first().ok_or(Error::Empty("no FOTOC series"))?;
    if series_set
        .iter()
        .any(|s| s.sample_times != first.sample_times)
    {
        return Err(invalid("series do not share sample times"));
    }
    let pooled: Vec<f64> = series_set
        .iter()
        .flat_map(|s| s.values.iter().copied())
        .collect();
    if pooled.is_empty() {
        return Err(Error::Empty("FOTOC series have no samples"));
    }
    let (mean, sem) = mean_sem(&pooled);
    Ok(AggregateFotoc {
        mean,
        sem,
        n_states: series_set.len(),
        n_time_samples: first.sample_times.len(),
    })
}

/// Sample times `t_k = k T / n` for `k = 1..=n`, optionally preceded by 0.
pub fn equidistant_times(t_final: f64, n: usize, include_t0: bool) -> Vec<f64> {
    let start = if include_t0 { 0 } else { 1 };
    (start..=n).map(|k| k as f64 * t_final / n as f64).collect()
}
