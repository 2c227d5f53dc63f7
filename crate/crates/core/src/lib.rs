//! Trotterized Lipkin-Meshkov-Glick dynamics and the quantum kicked top.
//!
//! The crate covers the full pipeline behind a study of Trotter errors,
//! native errors and the onset of chaos in a small spin simulator:
//!
//! * [`spin_algebra`]: spin matrices, exponentials of Hermitian generators,
//!   spin-coherent states, axis rotations and the 12-point icosahedral cover.
//! * [`dynamics`]: exact and Trotterized step propagators, pure and noisy
//!   (depolarizing) evolution, simulation infidelity.
//! * [`fotoc`]: the fidelity OTOC in operator and population form, its Haar
//!   average, and state/time aggregation.
//! * [`rmt`]: CUE, COE and parity-blocked COE baselines and the finite-size
//!   ratio `r_n`.
//! * [`classical`]: the classical kicked-top map, Lyapunov exponents and
//!   chaos fractions.
//! * [`experiments`]: configuration, figure-level runs and CSV/JSON output.

pub mod classical;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod fotoc;
pub mod linalg;
pub mod par;
pub mod rmt;
pub mod spin_algebra;
pub mod stats;

pub use error::{Error, Result};
