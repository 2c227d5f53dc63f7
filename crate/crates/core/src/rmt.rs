//! Circular random-matrix baselines for the FOTOC.
//!
//! Randomness comes from ChaCha8 streams: every sample index `k` gets the
//! generator seeded with `seed` on stream `k`, so results do not depend on
//! how samples are scheduled across threads.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fotoc::check_axis;
use crate::linalg::{c, Matrix, Vector};
use crate::par;
use crate::spin_algebra::{
    build_ops, rotation_about_axis, QuantumState, RotationSpec, SpinQuantumNumber, UnitaryMatrix,
};
use crate::stats::mean_sem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    Cue,
    Coe,
    CoeParity,
}

impl EnsembleKind {
    pub fn name(self) -> &'static str {
        match self {
            EnsembleKind::Cue => "cue",
            EnsembleKind::Coe => "coe",
            EnsembleKind::CoeParity => "coe_parity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub dim: usize,
    pub n_samples: usize,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, dim: usize, n_samples: usize, seed: u64) -> Result<Self> {
        if dim < 2 {
            return Err(invalid(format!("ensemble dimension {dim} < 2")));
        }
        if kind == EnsembleKind::CoeParity && !dim.is_multiple_of(2) {
            return Err(invalid(format!(
                "parity-blocked COE needs an even dimension, got {dim}"
            )));
        }
        if n_samples == 0 {
            return Err(invalid("ensemble needs at least one sample"));
        }
        Ok(Self {
            kind,
            dim,
            n_samples,
            seed,
        })
    }

    /// Draws sample `index` of this ensemble.
    pub fn sample(&self, index: u64) -> UnitaryMatrix {
        let mut rng = stream_rng(self.seed, index);
        match self.kind {
            EnsembleKind::Cue => sample_cue(self.dim, &mut rng),
            EnsembleKind::Coe => sample_coe(self.dim, &mut rng),
            EnsembleKind::CoeParity => {
                sample_coe_parity(self.dim, &mut rng, &parity_permutation(self.dim))
                    .expect("even dimension checked at construction")
            }
        }
    }
}

/// Generator for one independent stream of a seeded run.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random pure state (normalized complex Gaussian vector).
pub fn haar_random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> QuantumState {
    let v = Vector::from_fn(dim, |_, _| complex_normal(rng));
    QuantumState::normalized(v).expect("Gaussian vector is nonzero almost surely")
}

/// Haar unitary: QR of a complex Ginibre matrix with the columns of `Q`
/// rephased so that `R` has a positive real diagonal.
pub fn sample_cue<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> UnitaryMatrix {
    let z = DMatrix::from_fn(dim, dim, |_, _| complex_normal(rng));
    let qr = z.qr();
    let r = qr.r();
    let mut q = qr.q();
    for (k, mut col) in q.column_iter_mut().enumerate() {
        let rkk = r[(k, k)];
        let norm = rkk.norm();
        if norm > 0.0 {
            col *= rkk / c(norm);
        }
    }
    UnitaryMatrix::from_raw(q)
}

/// Symmetric unitary `V^T V` with `V` drawn from the CUE.
pub fn sample_coe<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> UnitaryMatrix {
    let v = sample_cue(dim, rng).into_matrix();
    UnitaryMatrix::from_raw(v.transpose() * v)
}

/// Maps parity-basis position to `J_z` basis index: first all indices with
/// `J - m` even, then all with `J - m` odd.
pub fn parity_permutation(dim: usize) -> Vec<usize> {
    (0..dim).step_by(2).chain((1..dim).step_by(2)).collect()
}

/// `U_COE(d/2) (+) U_COE(d/2)` built in the parity basis and carried back
/// to the `J_z` basis through `permutation`.
pub fn sample_coe_parity<R: Rng + ?Sized>(
    dim: usize,
    rng: &mut R,
    permutation: &[usize],
) -> Result<UnitaryMatrix> {
    if !dim.is_multiple_of(2) {
        return Err(invalid(format!(
            "parity-blocked COE needs an even dimension, got {dim}"
        )));
    }
    if permutation.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: permutation.len(),
        });
    }
    let half = dim / 2;
    let even = sample_coe(half, rng).into_matrix();
    let odd = sample_coe(half, rng).into_matrix();
    let mut u = Matrix::zeros(dim, dim);
    for a in 0..half {
        for b in 0..half {
            u[(permutation[a], permutation[b])] = even[(a, b)];
            u[(permutation[half + a], permutation[half + b])] = odd[(a, b)];
        }
    }
    Ok(UnitaryMatrix::from_raw(u))
}

/// Eigenangles in `(-pi, pi]` of a unitary, from its complex Schur form.
pub fn unitary_eigenangles(u: &UnitaryMatrix) -> Vec<f64> {
    let (_, t) = u.matrix().clone().schur().unpack();
    t.diagonal().iter().map(|z| z.arg()).collect()
}

/// Ensemble-averaged FOTOC for powers `m = 1..=n_powers`.
#[derive(Debug, Clone)]
pub struct EnsembleFotocResult {
    /// Average for a single application (`m = 1`).
    pub mean: f64,
    /// Standard error of `mean` across samples (states averaged within a sample).
    pub sem: f64,
    pub per_power_means: Vec<f64>,
    /// Average over all powers `1..=n_powers`.
    pub multi_mean: f64,
    pub multi_sem: f64,
    pub spec: Option<EnsembleSpec>,
}

impl EnsembleFotocResult {
    /// `F(m=1) / mean_{m<=n} F(m)`.
    pub fn ratio(&self, n: usize) -> Result<f64> {
        if n == 0 || n > self.per_power_means.len() {
            return Err(invalid(format!(
                "ratio order {n} outside 1..={}",
                self.per_power_means.len()
            )));
        }
        let denom = self.per_power_means[..n].iter().sum::<f64>() / n as f64;
        Ok(self.per_power_means[0] / denom)
    }
}

/// Averages `|<psi_j| U^-m W_j U^m |psi_j>|^2` over `n_samples` draws from
/// `sampler` and over all states, separately for each power `m`.
pub fn ensemble_avg_fotoc_with<F>(
    dim: usize,
    n_samples: usize,
    sampler: F,
    states: &[(QuantumState, RotationSpec)],
    n_powers: usize,
) -> Result<EnsembleFotocResult>
where
    F: Fn(u64) -> UnitaryMatrix + Sync + Send,
{
    if n_powers == 0 {
        return Err(invalid("n_powers must be at least 1"));
    }
    if states.is_empty() {
        return Err(Error::Empty("no initial states"));
    }
    if n_samples == 0 {
        return Err(invalid("ensemble needs at least one sample"));
    }
    if let Some((psi, _)) = states.iter().find(|(psi, _)| psi.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: psi.dim(),
        });
    }
    let ops = build_ops(SpinQuantumNumber::from_dim(dim)?);
    for (psi, spec) in states {
        check_axis(psi, &ops, spec)?;
    }
    let ws: Vec<Matrix> = states
        .iter()
        .map(|(_, spec)| rotation_about_axis(&ops, spec).into_matrix())
        .collect();
    let k = states.len() as f64;

    // per_sample[i][m] = state-averaged FOTOC for sample i and power m+1.
    let per_sample: Vec<Vec<f64>> = par::map_range(n_samples, |i| {
        let u = sampler(i as u64);
        let mut acc = vec![0.0; n_powers];
        for ((psi, _), w) in states.iter().zip(&ws) {
            let mut v = psi.amplitudes().clone();
            for slot in acc.iter_mut() {
                v = u.matrix() * &v;
                *slot += v.dotc(&(w * &v)).norm_sqr();
            }
        }
        acc.iter().map(|x| x / k).collect()
    });

    let per_power_means: Vec<f64> = (0..n_powers)
        .map(|m| per_sample.iter().map(|row| row[m]).sum::<f64>() / n_samples as f64)
        .collect();
    let single: Vec<f64> = per_sample.iter().map(|row| row[0]).collect();
    let multi: Vec<f64> = per_sample
        .iter()
        .map(|row| row.iter().sum::<f64>() / n_powers as f64)
        .collect();
    let (mean, sem) = mean_sem(&single);
    let (multi_mean, multi_sem) = mean_sem(&multi);
    Ok(EnsembleFotocResult {
        mean,
        sem,
        per_power_means,
        multi_mean,
        multi_sem,
        spec: None,
    })
}

pub fn ensemble_avg_fotoc(
    spec: &EnsembleSpec,
    states: &[(QuantumState, RotationSpec)],
    n_powers: usize,
) -> Result<EnsembleFotocResult> {
    let spec = *spec;
    let mut res = ensemble_avg_fotoc_with(
        spec.dim,
        spec.n_samples,
        |i| spec.sample(i),
        states,
        n_powers,
    )?;
    res.spec = Some(spec);
    Ok(res)
}

/// Finite-size ratio `r_n`.
pub fn ratio_r_n(
    spec: &EnsembleSpec,
    states: &[(QuantumState, RotationSpec)],
    n: usize,
) -> Result<f64> {
    ensemble_avg_fotoc(spec, states, n)?.ratio(n)
}

/// Icosahedral spin-coherent states of the spin with multiplet dimension
/// `dim`, each paired with its own `alpha = 2 pi / d` rotation.
pub fn icosahedral_states(dim: usize) -> Result<Vec<(QuantumState, RotationSpec)>> {
    let spin = SpinQuantumNumber::from_dim(dim)?;
    crate::spin_algebra::icosahedral_directions()
        .into_iter()
        .map(|d| {
            Ok((
                crate::spin_algebra::spin_coherent(spin, d.theta, d.phi)?,
                RotationSpec::optimal(d.theta, d.phi, dim)?,
            ))
        })
        .collect()
}

/// Monte-Carlo estimate of the Haar-averaged FOTOC `|<psi|W|psi>|^2` over
/// random states; returns `(mean, sem)`.
pub fn haar_state_fotoc_estimate(w: &UnitaryMatrix, n_samples: usize, seed: u64) -> (f64, f64) {
    let values = par::map_range(n_samples, |i| {
        let mut rng = stream_rng(seed, i as u64);
        let psi = haar_random_state(w.dim(), &mut rng);
        psi.expectation(w.matrix()).norm_sqr()
    });
    mean_sem(&values)
}
