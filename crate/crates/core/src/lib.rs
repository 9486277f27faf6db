//! Correlated collision-model dynamics of a qubit.
//!
//! A system qubit, entangled with an untouched ancilla, undergoes two
//! collisions with an environment that applies 𝟙, X or Z flips with
//! correlated joint probabilities. The crate builds the one- and two-collision
//! channels, reconstructs the intermediate map `Λ21 = Λ20 Λ10⁻¹`, and decides
//! whether it is completely positive, positive only (weak non-Markovianity)
//! or not even positive (strong non-Markovianity). A simulated photon-counting
//! tomography layer reproduces the same analysis from noisy data.
//!
//! Module map:
//!
//! - [`qmat`]: 2×2 / 4×4 complex matrices and a Hermitian Jacobi eigensolver.
//! - [`states`]: two-qubit states, concurrence, trace distance, entropy.
//! - [`channels`]: collision tables, Pauli channels, Bloch affine maps.
//! - [`divisibility`]: dynamical matrix, CP / positivity tests, classification.
//! - [`tomography`]: simulated counts, reconstruction, Monte Carlo error bars.
//! - [`experiment`]: sweep configuration, runners and CSV/JSON output.

pub mod channels;
pub mod divisibility;
pub mod error;
pub mod experiment;
mod linalg3;
pub mod qmat;
pub mod states;
pub mod tomography;

pub use error::{Error, Result};
pub use linalg3::{Mat3, Vec3};
