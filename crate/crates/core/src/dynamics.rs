//! Exact-LMG and Trotterized (kicked-top) step propagators, pure and noisy
//! evolution, and the per-step depolarizing native-error channel.
//!
//! Units are dimensionless (`hbar = gamma = 1`). One step of length `tau` is
//!
//! * exact:       `U_LMG(tau)  = exp(i tau [(1-s) J_z + (s/2J) J_x^2])`
//! * Trotterized: `U_Trot(tau) = exp(i (1-s) tau J_z) exp(i (s tau/2J) J_x^2)`

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{c, hermiticity_defect, trace, Matrix};
use crate::spin_algebra::{
    expm_generator, AngularMomentumOps, QuantumState, SpinQuantumNumber, UnitaryMatrix,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmgParams {
    s: f64,
    tau: f64,
    spin: SpinQuantumNumber,
}

impl LmgParams {
    pub fn new(s: f64, tau: f64, spin: SpinQuantumNumber) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) {
            return Err(invalid(format!("s = {s} outside [0, 1]")));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(invalid(format!("tau = {tau} must be positive and finite")));
        }
        Ok(Self { s, tau, spin })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn spin(&self) -> SpinQuantumNumber {
        self.spin
    }

    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::new(self.s, tau, self.spin)
    }

    /// Number of steps that best approximates total time `t`.
    pub fn steps_for(&self, t: f64) -> usize {
        (t / self.tau).round() as usize
    }
}

/// Which single-step propagator drives the evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Lmg,
    Trotter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    #[default]
    None,
    Depolarizing,
}

/// Phenomenological native-error model applied once per step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorModel {
    kind: ErrorKind,
    step_fidelity: f64,
}

impl Default for ErrorModel {
    fn default() -> Self {
        Self::none()
    }
}

impl ErrorModel {
    pub const DEFAULT_STEP_FIDELITY: f64 = 0.99;

    pub fn new(kind: ErrorKind, step_fidelity: f64) -> Result<Self> {
        if !(step_fidelity > 0.0 && step_fidelity <= 1.0) {
            return Err(invalid(format!(
                "step fidelity {step_fidelity} outside (0, 1]"
            )));
        }
        Ok(Self {
            kind,
            step_fidelity,
        })
    }

    pub fn none() -> Self {
        Self {
            kind: ErrorKind::None,
            step_fidelity: 1.0,
        }
    }

    pub fn depolarizing(step_fidelity: f64) -> Result<Self> {
        Self::new(ErrorKind::Depolarizing, step_fidelity)
    }

    pub fn kind(&self) -> ErrorKind {
        self.kind
    }

    pub fn step_fidelity(&self) -> f64 {
        self.step_fidelity
    }

    pub fn is_noiseless(&self) -> bool {
        self.kind == ErrorKind::None
    }

    /// Depolarizing weight `eps` in `rho -> (1-eps) U rho U^† + eps I/d`,
    /// solved from the process fidelity `1 - eps (d^2-1)/d^2`. Capped at 1.
    pub fn depolarizing_weight(&self, dim: usize) -> f64 {
        match self.kind {
            ErrorKind::None => 0.0,
            ErrorKind::Depolarizing => {
                let d2 = (dim * dim) as f64;
                ((1.0 - self.step_fidelity) * d2 / (d2 - 1.0)).min(1.0)
            }
        }
    }
}

/// Density matrix in the `J_z` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    rho: Matrix,
}

impl DensityState {
    pub const TOL: f64 = 1e-10;

    pub fn new(rho: Matrix) -> Result<Self> {
        if !rho.is_square() {
            return Err(invalid("density matrix must be square"));
        }
        let herm = hermiticity_defect(&rho);
        if herm > Self::TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = trace(&rho);
        if (tr - c(1.0)).norm() > Self::TOL {
            return Err(Error::Invariant(format!(
                "density trace {tr} differs from 1"
            )));
        }
        let min_eig = rho.clone().symmetric_eigen().eigenvalues.min();
        if min_eig < -Self::TOL {
            return Err(Error::Invariant(format!(
                "density matrix has negative eigenvalue {min_eig}"
            )));
        }
        Ok(Self { rho })
    }

    pub fn pure(psi: &QuantumState) -> Self {
        Self {
            rho: psi.projector(),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            rho: Matrix::identity(dim, dim) * c(1.0 / dim as f64),
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn trace(&self) -> f64 {
        trace(&self.rho).re
    }

    pub fn purity(&self) -> f64 {
        // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.rho + self.rho.adjoint()) * c(0.5);
        herm.symmetric_eigen().eigenvalues.min()
    }

    /// `<psi|rho|psi>`.
    pub fn fidelity_with(&self, psi: &QuantumState) -> f64 {
        psi.expectation(&self.rho).re
    }

    /// One noisy step: `(1-eps) U rho U^† + eps I/d`.
    fn step(&self, u: &Matrix, u_adj: &Matrix, eps: f64) -> Self {
        let d = self.dim();
        let mut next = u * &self.rho * u_adj;
        if eps > 0.0 {
            next *= c(1.0 - eps);
            let add = c(eps / d as f64);
            for k in 0..d {
                next[(k, k)] += add;
            }
        }
        Self { rho: next }
    }
}

/// Sampled evolution: `states[k]` is the state after `steps[k]` steps.
#[derive(Debug, Clone)]
pub struct Trajectory<S> {
    pub steps: Vec<usize>,
    pub states: Vec<S>,
}

impl<S> Trajectory<S> {
    pub fn times(&self, tau: f64) -> Vec<f64> {
        self.steps.iter().map(|&n| n as f64 * tau).collect()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> Option<&S> {
        self.states.last()
    }
}

/// `(1-s) J_z + (s/2J) J_x^2`.
pub fn lmg_generator(p: &LmgParams, ops: &AngularMomentumOps) -> Matrix {
    let two_j = f64::from(p.spin.two_j());
    &ops.jz * c(1.0 - p.s) + (&ops.jx * &ops.jx) * c(p.s / two_j)
}

fn check_ops(p: &LmgParams, ops: &AngularMomentumOps) {
    assert_eq!(
        p.spin, ops.spin,
        "LmgParams and AngularMomentumOps built for different spins"
    );
}

pub fn u_lmg(p: &LmgParams, ops: &AngularMomentumOps) -> UnitaryMatrix {
    check_ops(p, ops);
    expm_generator(&lmg_generator(p, ops), p.tau).expect("LMG generator is Hermitian")
}

/// Linear-rotation factor `exp(i (1-s) tau J_z)` (diagonal).
pub fn linear_factor(p: &LmgParams, ops: &AngularMomentumOps) -> UnitaryMatrix {
    let angle = (1.0 - p.s) * p.tau;
    let diag = ops
        .jz
        .diagonal()
        .map(|m| (crate::linalg::I * (angle * m.re)).exp());
    UnitaryMatrix::from_raw(Matrix::from_diagonal(&diag))
}

/// Twist factor `exp(i (s tau / 2J) J_x^2)`.
pub fn twist_factor(p: &LmgParams, ops: &AngularMomentumOps) -> UnitaryMatrix {
    let two_j = f64::from(p.spin.two_j());
    let jx2 = &ops.jx * &ops.jx;
    expm_generator(&jx2, p.s * p.tau / two_j).expect("J_x^2 is Hermitian")
}

/// Kicked-top step: linear factor on the left, twist on the right.
pub fn u_trot(p: &LmgParams, ops: &AngularMomentumOps) -> UnitaryMatrix {
    check_ops(p, ops);
    linear_factor(p, ops).compose(&twist_factor(p, ops))
}

pub fn propagator(kind: StepKind, p: &LmgParams, ops: &AngularMomentumOps) -> UnitaryMatrix {
    match kind {
        StepKind::Lmg => u_lmg(p, ops),
        StepKind::Trotter => u_trot(p, ops),
    }
}

/// `R_z = exp(-i pi (J_z - J))`, i.e. `diag((-1)^(J-m))`.
pub fn parity_operator(ops: &AngularMomentumOps) -> UnitaryMatrix {
    let d = ops.dim();
    let diag = (0..d).map(|k| c(if k % 2 == 0 { 1.0 } else { -1.0 }));
    UnitaryMatrix::from_raw(Matrix::from_diagonal(&nalgebra::DVector::from_iterator(
        d, diag,
    )))
}

fn check_dims(u: &UnitaryMatrix, state_dim: usize) -> Result<()> {
    if u.dim() != state_dim {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            actual: state_dim,
        });
    }
    Ok(())
}

/// Samples `u^(k * sample_every) |psi0>` for `k * sample_every <= n_steps`.
pub fn evolve_pure(
    u: &UnitaryMatrix,
    psi0: &QuantumState,
    n_steps: usize,
    sample_every: usize,
) -> Result<Trajectory<QuantumState>> {
    check_dims(u, psi0.dim())?;
    if sample_every == 0 {
        return Err(invalid("sample_every must be at least 1"));
    }
    let mut steps = vec![0];
    let mut states = vec![psi0.clone()];
    let mut amps = psi0.amplitudes().clone();
    for n in 1..=n_steps {
        amps = u.matrix() * &amps;
        if n % sample_every == 0 {
            steps.push(n);
            states.push(QuantumState::from_raw(amps.clone()));
        }
    }
    Ok(Trajectory { steps, states })
}

/// Noisy density-matrix evolution; sampling as in [`evolve_pure`].
pub fn evolve_noisy(
    u: &UnitaryMatrix,
    error: &ErrorModel,
    rho0: &DensityState,
    n_steps: usize,
    sample_every: usize,
) -> Result<Trajectory<DensityState>> {
    check_dims(u, rho0.dim())?;
    if sample_every == 0 {
        return Err(invalid("sample_every must be at least 1"));
    }
    let eps = error.depolarizing_weight(rho0.dim());
    let u_adj = u.matrix().adjoint();
    let mut steps = vec![0];
    let mut states = vec![rho0.clone()];
    let mut rho = rho0.clone();
    for n in 1..=n_steps {
        rho = rho.step(u.matrix(), &u_adj, eps);
        if n % sample_every == 0 {
            steps.push(n);
            states.push(rho.clone());
        }
    }
    Ok(Trajectory { steps, states })
}

/// Advances a state through an increasing list of step counts, yielding the
/// state at each requested count.
pub(crate) fn pure_at_steps(
    u: &UnitaryMatrix,
    psi0: &QuantumState,
    step_counts: &[usize],
) -> Vec<QuantumState> {
    let mut out = Vec::with_capacity(step_counts.len());
    let mut amps = psi0.amplitudes().clone();
    let mut done = 0;
    for &n in step_counts {
        while done < n {
            amps = u.matrix() * &amps;
            done += 1;
        }
        out.push(QuantumState::from_raw(amps.clone()));
    }
    out
}

pub(crate) fn noisy_at_steps(
    u: &UnitaryMatrix,
    error: &ErrorModel,
    rho0: &DensityState,
    step_counts: &[usize],
) -> Vec<DensityState> {
    let eps = error.depolarizing_weight(rho0.dim());
    let u_adj = u.matrix().adjoint();
    let mut out = Vec::with_capacity(step_counts.len());
    let mut rho = rho0.clone();
    let mut done = 0;
    for &n in step_counts {
        while done < n {
            rho = rho.step(u.matrix(), &u_adj, eps);
            done += 1;
        }
        out.push(rho.clone());
    }
    out
}

/// `1 - <psi_exact(T)| rho_sim(T) |psi_exact(T)>` with `n = round(T/tau)`
/// steps of `U_LMG` for the reference and noisy `U_Trot` for the simulation.
pub fn simulation_infidelity(
    p: &LmgParams,
    ops: &AngularMomentumOps,
    error: &ErrorModel,
    t_final: f64,
    psi0: &QuantumState,
) -> Result<f64> {
    let n = checked_steps(p, t_final)?;
    let exact = propagate(&u_lmg(p, ops), psi0, n)?;
    let sim = simulate(&u_trot(p, ops), error, psi0, n)?;
    Ok(1.0 - sim.fidelity_with(&exact))
}

/// `n = round(T/tau)`, rejecting `tau > T` and `T <= 0`.
pub fn checked_steps(p: &LmgParams, t_final: f64) -> Result<usize> {
    if t_final.is_nan() || t_final <= 0.0 {
        return Err(invalid(format!("final time {t_final} must be positive")));
    }
    if p.tau > t_final {
        return Err(invalid(format!(
            "step size {} exceeds final time {t_final}",
            p.tau
        )));
    }
    Ok(p.steps_for(t_final))
}

/// `u^n |psi0>`.
pub fn propagate(u: &UnitaryMatrix, psi0: &QuantumState, n: usize) -> Result<QuantumState> {
    check_dims(u, psi0.dim())?;
    Ok(pure_at_steps(u, psi0, &[n]).remove(0))
}

/// `n` noisy steps from the pure state `psi0`.
pub fn simulate(
    u: &UnitaryMatrix,
    error: &ErrorModel,
    psi0: &QuantumState,
    n: usize,
) -> Result<DensityState> {
    check_dims(u, psi0.dim())?;
    Ok(noisy_at_steps(u, error, &DensityState::pure(psi0), &[n]).remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{commutator, max_abs};
    use crate::spin_algebra::{build_ops, spin_coherent};
    use std::f64::consts::PI;

    fn setup(two_j: u32) -> (SpinQuantumNumber, AngularMomentumOps) {
        let s = SpinQuantumNumber::new(two_j).unwrap();
        (s, build_ops(s))
    }

    /// Truncated Taylor series of `exp(i tau H)`, independent of the
    /// eigensolver route.
    fn taylor_exp(h: &Matrix, tau: f64, terms: usize) -> Matrix {
        let d = h.nrows();
        let a = h * (crate::linalg::I * tau);
        let mut term = Matrix::identity(d, d);
        let mut sum = term.clone();
        for k in 1..terms {
            term = &term * &a * c(1.0 / k as f64);
            sum += &term;
        }
        sum
    }

    #[test]
    fn params_are_validated() {
        let (s, _) = setup(3);
        assert!(LmgParams::new(-0.1, 1.0, s).is_err());
        assert!(LmgParams::new(1.1, 1.0, s).is_err());
        assert!(LmgParams::new(0.5, 0.0, s).is_err());
        assert!(ErrorModel::depolarizing(0.0).is_err());
        assert!(ErrorModel::depolarizing(1.01).is_err());
    }

    #[test]
    fn endpoints_of_s() {
        let (s, ops) = setup(15);
        let tau = 0.83;
        let p0 = LmgParams::new(0.0, tau, s).unwrap();
        let rot = expm_generator(&ops.jz, tau).unwrap();
        assert!(max_abs(&(u_lmg(&p0, &ops).matrix() - rot.matrix())) < 1e-10);
        assert!(max_abs(&(u_trot(&p0, &ops).matrix() - rot.matrix())) < 1e-10);

        let p1 = LmgParams::new(1.0, tau, s).unwrap();
        let twist = expm_generator(&(&ops.jx * &ops.jx), tau / 15.0).unwrap();
        assert!(max_abs(&(u_lmg(&p1, &ops).matrix() - twist.matrix())) < 1e-10);
        assert!(max_abs(&(u_trot(&p1, &ops).matrix() - twist.matrix())) < 1e-10);
    }

    #[test]
    fn lmg_step_matches_taylor_series() {
        let (s, ops) = setup(15);
        let p = LmgParams::new(0.5, 0.1, s).unwrap();
        let oracle = taylor_exp(&lmg_generator(&p, &ops), 0.1, 20);
        assert!(max_abs(&(u_lmg(&p, &ops).matrix() - oracle)) < 1e-10);
    }

    #[test]
    fn trotter_defect_is_second_order() {
        let (s, ops) = setup(15);
        for &sv in &[0.2, 0.5, 0.7] {
            let taus: Vec<f64> = (0..9).map(|k| 10f64.powf(-3.0 + 0.25 * k as f64)).collect();
            let pts: Vec<(f64, f64)> = taus
                .iter()
                .map(|&tau| {
                    let p = LmgParams::new(sv, tau, s).unwrap();
                    let defect = (u_trot(&p, &ops).matrix() - u_lmg(&p, &ops).matrix()).norm();
                    (tau.ln(), defect.ln())
                })
                .collect();
            let slope = crate::stats::linear_fit_slope(&pts);
            assert!((slope - 2.0).abs() < 0.1, "s = {sv}: slope {slope}");
        }
    }

    #[test]
    fn parity_structure() {
        let (_, ops) = setup(1);
        let r = parity_operator(&ops);
        assert_eq!(r.matrix()[(0, 0)], c(1.0));
        assert_eq!(r.matrix()[(1, 1)], c(-1.0));

        let (s, ops) = setup(15);
        let r = parity_operator(&ops);
        let diag: Vec<f64> = r.matrix().diagonal().iter().map(|z| z.re).collect();
        assert_eq!(diag.iter().filter(|&&x| x == 1.0).count(), 8);
        assert!(diag.windows(2).all(|w| w[0] == -w[1]));
        assert!(max_abs(&(r.pow(2).matrix() - Matrix::identity(16, 16))) < 1e-15);
        // Agrees with the exponential definition.
        let j = s.j();
        let gen = &ops.jz - Matrix::identity(16, 16) * c(j);
        let direct = expm_generator(&gen, -PI).unwrap();
        assert!(max_abs(&(direct.matrix() - r.matrix())) < 1e-12);
    }

    #[test]
    fn evolve_pure_edge_cases() {
        let (s, ops) = setup(15);
        let psi0 = spin_coherent(s, 1.0, 0.5).unwrap();
        let u = u_trot(&LmgParams::new(0.7, 1.0, s).unwrap(), &ops);

        let t0 = evolve_pure(&u, &psi0, 0, 1).unwrap();
        assert_eq!(t0.len(), 1);
        assert_eq!(t0.states[0], psi0);

        let id = evolve_pure(&UnitaryMatrix::identity(16), &psi0, 10, 3).unwrap();
        assert_eq!(id.steps, vec![0, 3, 6, 9]);
        assert!(id
            .states
            .iter()
            .all(|x| (x.amplitudes() - psi0.amplitudes()).norm() < 1e-15));

        let tr = evolve_pure(&u, &psi0, 20, 1).unwrap();
        assert!((tr.last().unwrap().norm() - 1.0).abs() < 1e-10);

        let wrong = QuantumState::basis(4, 0);
        assert!(matches!(
            evolve_pure(&u, &wrong, 3, 1),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(evolve_pure(&u, &psi0, 3, 0).is_err());
    }

    #[test]
    fn noiseless_channel_matches_pure_evolution() {
        let (s, ops) = setup(15);
        let psi0 = spin_coherent(s, 2.0, 3.0).unwrap();
        let u = u_trot(&LmgParams::new(0.7, 1.3, s).unwrap(), &ops);
        let pure = evolve_pure(&u, &psi0, 12, 4).unwrap();
        let mixed =
            evolve_noisy(&u, &ErrorModel::none(), &DensityState::pure(&psi0), 12, 4).unwrap();
        for (a, b) in pure.states.iter().zip(&mixed.states) {
            assert!(max_abs(&(a.projector() - b.matrix())) < 1e-12);
        }
    }

    #[test]
    fn full_depolarization_in_one_step() {
        let (s, ops) = setup(15);
        let psi0 = spin_coherent(s, 2.0, 3.0).unwrap();
        let u = u_trot(&LmgParams::new(0.7, 1.3, s).unwrap(), &ops);
        // step fidelity 1/d^2 gives eps = 1.
        let e = ErrorModel::depolarizing(1.0 / 256.0).unwrap();
        assert!((e.depolarizing_weight(16) - 1.0).abs() < 1e-12);
        let tr = evolve_noisy(&u, &e, &DensityState::pure(&psi0), 1, 1).unwrap();
        let mixed = DensityState::maximally_mixed(16);
        assert!(max_abs(&(tr.states[1].matrix() - mixed.matrix())) < 1e-12);
    }

    #[test]
    fn purity_decreases_monotonically() {
        let (s, ops) = setup(15);
        let psi0 = spin_coherent(s, 0.7, 0.1).unwrap();
        let u = u_trot(&LmgParams::new(0.7, 1.0, s).unwrap(), &ops);
        let e = ErrorModel::depolarizing(0.99).unwrap();
        let tr = evolve_noisy(&u, &e, &DensityState::pure(&psi0), 100, 1).unwrap();
        let purities: Vec<f64> = tr.states.iter().map(DensityState::purity).collect();
        assert!(purities.windows(2).all(|w| w[1] < w[0]));
        for rho in &tr.states {
            assert!((rho.trace() - 1.0).abs() < 1e-10);
            assert!(rho.min_eigenvalue() > -1e-9);
        }
    }

    #[test]
    fn infidelity_limits() {
        let (s, ops) = setup(15);
        let psi0 = spin_coherent(s, 0.833 * PI, 0.0).unwrap();
        let small = LmgParams::new(0.7, 1e-3, s).unwrap();
        let inf = simulation_infidelity(&small, &ops, &ErrorModel::none(), 0.5, &psi0).unwrap();
        assert!(inf < 1e-4, "{inf}");

        for &tau in &[0.3, 1.0, 2.5] {
            let p = LmgParams::new(0.0, tau, s).unwrap();
            let inf = simulation_infidelity(&p, &ops, &ErrorModel::none(), 20.0, &psi0).unwrap();
            assert!(inf.abs() < 1e-10);
        }

        let p = LmgParams::new(0.7, 30.0, s).unwrap();
        assert!(simulation_infidelity(&p, &ops, &ErrorModel::none(), 20.0, &psi0).is_err());
    }

    #[test]
    fn step_counts_round_to_nearest() {
        let (s, _) = setup(15);
        let p = LmgParams::new(0.7, 3.0, s).unwrap();
        assert_eq!(checked_steps(&p, 20.0).unwrap(), 7);
        let p = LmgParams::new(0.7, 8.0, s).unwrap();
        assert_eq!(checked_steps(&p, 20.0).unwrap(), 3);
    }

    #[test]
    fn propagators_commute_with_parity() {
        let (s, ops) = setup(15);
        let r = parity_operator(&ops);
        for &(sv, tau) in &[(0.2, 0.4), (0.7, 5.0), (0.5, 9.1)] {
            let p = LmgParams::new(sv, tau, s).unwrap();
            for u in [u_trot(&p, &ops), u_lmg(&p, &ops)] {
                assert!(max_abs(&commutator(u.matrix(), r.matrix())) < 1e-12);
            }
        }
    }
}
