//! Simulated two-qubit state tomography.
//!
//! Each of the nine local Pauli settings `(i, j) ∈ {x,y,z}²` is measured with
//! a multinomial sample of `N` coincidences over the four outcomes
//! `(++, +−, −+, −−)`; the first sign belongs to the ancilla. States are
//! recovered by linear inversion followed by an eigenvalue water-filling
//! projection onto the density matrices.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{BlochAffineMap, DEFAULT_INVERSION_TOL};
use crate::divisibility::{intermediate_map, DynamicalMatrix};
use crate::error::{Error, Result};
use crate::linalg3::{self, Mat3};
use crate::qmat::{CMatrix, Pauli};
use crate::states::{CorrelationData, TwoQubitState};

/// Local measurement axes in record order: xx, xy, xz, yx, …, zz.
pub const SETTINGS: [(Pauli, Pauli); 9] = [
    (Pauli::X, Pauli::X),
    (Pauli::X, Pauli::Y),
    (Pauli::X, Pauli::Z),
    (Pauli::Y, Pauli::X),
    (Pauli::Y, Pauli::Y),
    (Pauli::Y, Pauli::Z),
    (Pauli::Z, Pauli::X),
    (Pauli::Z, Pauli::Y),
    (Pauli::Z, Pauli::Z),
];

/// Multiplier for per-repetition seed derivation.
pub const REPETITION_SEED_MULTIPLIER: u64 = 0x9E37_79B9_7F4A_7C15;
const STATE_SEED_MULTIPLIER: u64 = 0xD1B5_4A32_D192_ED03;

/// Smallest singular value of the input correlation matrix that still
/// allows process extraction.
pub const MIN_INPUT_SINGULAR_VALUE: f64 = 1e-6;

fn axis_char(p: Pauli) -> char {
    match p {
        Pauli::X => 'x',
        Pauli::Y => 'y',
        Pauli::Z => 'z',
        Pauli::I => 'i',
    }
}

/// Seed of repetition `k`: `seed ⊕ k·C` with a fixed odd 64-bit `C`.
pub fn repetition_seed(seed: u64, k: u64) -> u64 {
    seed ^ k.wrapping_mul(REPETITION_SEED_MULTIPLIER)
}

fn state_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(STATE_SEED_MULTIPLIER)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountsRecord {
    pub total_per_setting: u64,
    pub seed: u64,
    /// Per setting, counts for `(++, +−, −+, −−)`.
    pub counts: [[u64; 4]; 9],
}

impl CountsRecord {
    pub fn settings(&self) -> &'static [(Pauli, Pauli); 9] {
        &SETTINGS
    }

    fn validate(&self) -> Result<()> {
        for (k, row) in self.counts.iter().enumerate() {
            let sum: u64 = row.iter().sum();
            if sum != self.total_per_setting {
                let (a, b) = SETTINGS[k];
                return Err(Error::Counts(format!(
                    "setting {}{} sums to {sum}, expected {}",
                    axis_char(a),
                    axis_char(b),
                    self.total_per_setting
                )));
            }
        }
        Ok(())
    }

    pub fn frequencies(&self) -> [[f64; 4]; 9] {
        let n = self.total_per_setting as f64;
        self.counts.map(|row| row.map(|c| c as f64 / n))
    }
}

impl fmt::Display for CountsRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "N={} seed={}", self.total_per_setting, self.seed)?;
        for ((a, b), row) in SETTINGS.iter().zip(&self.counts) {
            writeln!(
                f,
                "{}{} {} {} {} {}",
                axis_char(*a),
                axis_char(*b),
                row[0],
                row[1],
                row[2],
                row[3]
            )?;
        }
        Ok(())
    }
}

impl FromStr for CountsRecord {
    type Err = Error;

    fn from_str(s: &str) -> Result<CountsRecord> {
        let bad = |msg: String| Error::Counts(msg);
        let mut lines = s.lines();
        let header = lines.next().ok_or_else(|| bad("empty input".into()))?;
        let (n_part, seed_part) = header
            .split_once(' ')
            .ok_or_else(|| bad(format!("malformed header `{header}`")))?;
        let total_per_setting = n_part
            .strip_prefix("N=")
            .and_then(|v| v.parse::<u64>().ok())
            .ok_or_else(|| bad(format!("malformed header `{header}`")))?;
        let seed = seed_part
            .strip_prefix("seed=")
            .and_then(|v| v.parse::<u64>().ok())
            .ok_or_else(|| bad(format!("malformed header `{header}`")))?;

        let mut counts = [[0u64; 4]; 9];
        for (k, (a, b)) in SETTINGS.iter().enumerate() {
            let line = lines
                .next()
                .ok_or_else(|| bad(format!("missing line for setting {k}")))?;
            let mut fields = line.split(' ');
            let label = fields.next().unwrap_or_default();
            let expected: String = [axis_char(*a), axis_char(*b)].iter().collect();
            if label != expected {
                return Err(bad(format!("expected setting `{expected}`, found `{label}`")));
            }
            for slot in counts[k].iter_mut() {
                *slot = fields
                    .next()
                    .and_then(|v| v.parse::<u64>().ok())
                    .ok_or_else(|| bad(format!("malformed counts line `{line}`")))?;
            }
            if fields.next().is_some() {
                return Err(bad(format!("trailing fields in `{line}`")));
            }
        }
        if lines.any(|l| !l.is_empty()) {
            return Err(bad("trailing content after 9 settings".into()));
        }
        let rec = CountsRecord {
            total_per_setting,
            seed,
            counts,
        };
        rec.validate()?;
        Ok(rec)
    }
}

/// Outcome probabilities `Tr[ρ (P^i_± ⊗ P^j_±)]` per setting.
pub fn outcome_probabilities(state: &TwoQubitState) -> [[f64; 4]; 9] {
    let id = Pauli::I.matrix();
    let projector = |p: Pauli, sign: f64| (&id + &p.matrix().scale_re(sign)).scale_re(0.5);
    SETTINGS.map(|(a, b)| {
        let mut out = [0.0; 4];
        for (k, (sa, sb)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
            .into_iter()
            .enumerate()
        {
            let proj = projector(a, sa).tensor(&projector(b, sb)).expect("2x2");
            out[k] = state.rho().expectation(&proj).max(0.0);
        }
        let total: f64 = out.iter().sum();
        out.map(|p| p / total)
    })
}

fn multinomial(n: u64, probs: &[f64; 4], rng: &mut ChaCha8Rng) -> [u64; 4] {
    let mut out = [0u64; 4];
    let mut remaining = n;
    let mut mass = 1.0;
    for k in 0..3 {
        if remaining == 0 {
            break;
        }
        let p = if mass > 0.0 { (probs[k] / mass).clamp(0.0, 1.0) } else { 0.0 };
        let draw = Binomial::new(remaining, p)
            .expect("p in [0, 1]")
            .sample(rng);
        out[k] = draw;
        remaining -= draw;
        mass -= probs[k];
    }
    out[3] = remaining;
    out
}

pub fn simulate_counts(state: &TwoQubitState, n: u64, seed: u64) -> Result<CountsRecord> {
    if n < 1 {
        return Err(Error::OutOfRange {
            name: "N",
            value: n as f64,
            range: "≥ 1",
        });
    }
    let probs = outcome_probabilities(state);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts = probs.map(|p| multinomial(n, &p, &mut rng));
    Ok(CountsRecord {
        total_per_setting: n,
        seed,
        counts,
    })
}

#[derive(Debug, Clone)]
pub struct ReconstructedState {
    pub state: TwoQubitState,
    pub raw_linear: CMatrix,
    pub projection_distance: f64,
}

pub fn reconstruct(counts: &CountsRecord) -> Result<ReconstructedState> {
    counts.validate()?;
    reconstruct_from_frequencies(&counts.frequencies())
}

/// Linear inversion of outcome frequencies (one row of four per setting)
/// followed by projection onto the density matrices.
pub fn reconstruct_from_frequencies(freq: &[[f64; 4]; 9]) -> Result<ReconstructedState> {
    let mut a = [0.0; 3];
    let mut b = [0.0; 3];
    let mut t = [[0.0; 3]; 3];
    for (k, f) in freq.iter().enumerate() {
        let (i, j) = (k / 3, k % 3);
        t[i][j] = f[0] - f[1] - f[2] + f[3];
        a[i] += (f[0] + f[1] - f[2] - f[3]) / 3.0;
        b[j] += (f[0] - f[1] + f[2] - f[3]) / 3.0;
    }
    let raw_linear = CorrelationData { a, b, t }.to_matrix();
    let projected = project_to_density(&raw_linear)?;
    let projection_distance = (&projected - &raw_linear).frobenius_norm();
    Ok(ReconstructedState {
        state: TwoQubitState::new(projected)?,
        raw_linear,
        projection_distance,
    })
}

/// Nearest (Frobenius) density matrix to a unit-trace Hermitian matrix:
/// negative eigenvalues are zeroed and their weight is spread evenly over the
/// remaining ones, repeating until no eigenvalue is negative.
pub fn project_to_density(raw: &CMatrix) -> Result<CMatrix> {
    let es = raw.hermitian_eigensystem()?;
    let mut values = es.values.clone();
    let n = values.len();
    let trace: f64 = values.iter().sum();
    // values ascending; find the smallest k such that keeping indices k..n
    // with a uniform shift leaves all kept eigenvalues non-negative
    let mut k = 0;
    while k < n {
        let kept = &values[k..];
        let shift = (1.0 - kept.iter().sum::<f64>()) / (n - k) as f64;
        if kept[0] + shift >= 0.0 {
            break;
        }
        k += 1;
    }
    if k == 0 && values[0] >= 0.0 && (trace - 1.0).abs() <= 1e-15 {
        return Ok(raw.clone());
    }
    let shift = (1.0 - values[k..].iter().sum::<f64>()) / (n - k) as f64;
    for (idx, v) in values.iter_mut().enumerate() {
        *v = if idx < k { 0.0 } else { (*v + shift).max(0.0) };
    }
    Ok(es.reassemble(values))
}

/// Solve `T_out = T_in Mᵀ` (least squares) and `t = b_out − M b_in`.
pub fn extract_bloch_map(input: &CorrelationData, output: &CorrelationData) -> Result<BlochAffineMap> {
    let svd = linalg3::svd(&input.t);
    let smallest = svd.sigma[2];
    if smallest <= MIN_INPUT_SINGULAR_VALUE {
        return Err(Error::IllConditionedInput(smallest));
    }
    let (t_in_pinv, _) = linalg3::pseudo_inverse(&input.t, MIN_INPUT_SINGULAR_VALUE);
    let m_t: Mat3 = linalg3::matmul(&t_in_pinv, &output.t);
    let m = linalg3::transpose(&m_t);
    let mb = linalg3::matvec(&m, &input.b);
    let t = [0, 1, 2].map(|i| output.b[i] - mb[i]);
    Ok(BlochAffineMap::new(m, t))
}

/// Named statistics over a tomographed trajectory `[ρ(0), ρ(1), ρ(2)]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// Concurrence of the first state in the list.
    Concurrence,
    /// Minimum eigenvalue of the dynamical matrix of the reconstructed Λ21.
    LambdaMin,
    /// `C(ρ(2)) − C(ρ(1))`.
    CDiff,
}

impl Statistic {
    fn required_states(self) -> usize {
        match self {
            Statistic::Concurrence => 1,
            Statistic::LambdaMin | Statistic::CDiff => 3,
        }
    }

    pub fn evaluate(self, states: &[TwoQubitState]) -> Result<f64> {
        if states.len() < self.required_states() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} states", self.required_states()),
                found: format!("{} states", states.len()),
            });
        }
        match self {
            Statistic::Concurrence => Ok(states[0].concurrence()),
            Statistic::CDiff => Ok(states[2].concurrence() - states[1].concurrence()),
            Statistic::LambdaMin => Ok(process_from_states(states)?.dynamical.cp_defect()),
        }
    }
}

/// Maps reconstructed from the trajectory `[ρ(0), ρ(1), ρ(2)]`.
#[derive(Debug, Clone)]
pub struct ProcessEstimate {
    pub lambda10: BlochAffineMap,
    pub lambda20: BlochAffineMap,
    pub lambda21: BlochAffineMap,
    pub dynamical: DynamicalMatrix,
}

/// Extracts Λ10 and Λ20 from the ancilla–system correlations, forms Λ21 and
/// its dynamical matrix. The estimated maps carry small spurious shifts from
/// shot noise; these are dropped since the model is unital.
pub fn process_from_states(states: &[TwoQubitState]) -> Result<ProcessEstimate> {
    let cd: Vec<CorrelationData> = states.iter().map(|s| s.correlation_data()).collect();
    let unital = |mut m: BlochAffineMap| {
        m.t = [0.0; 3];
        m
    };
    let lambda10 = unital(extract_bloch_map(&cd[0], &cd[1])?);
    let lambda20 = unital(extract_bloch_map(&cd[0], &cd[2])?);
    let lambda21 = intermediate_map(&lambda20, &lambda10, DEFAULT_INVERSION_TOL);
    let dynamical = DynamicalMatrix::from_map(&lambda21)?;
    Ok(ProcessEstimate {
        lambda10,
        lambda20,
        lambda21,
        dynamical,
    })
}

/// One repetition: tomograph every state with seeds derived from `seed`.
pub fn tomograph_all(states: &[TwoQubitState], n: u64, seed: u64) -> Result<Vec<TwoQubitState>> {
    states
        .iter()
        .enumerate()
        .map(|(i, st)| {
            let rec = simulate_counts(st, n, state_seed(seed, i))?;
            Ok(reconstruct(&rec)?.state)
        })
        .collect()
}

/// Runs `repetitions` independent tomography rounds (repetition `k` uses
/// [`repetition_seed`]`(seed, k)`) and evaluates `f` on each set of
/// reconstructed states. Results are in repetition order.
pub fn monte_carlo<T, F>(
    states: &[TwoQubitState],
    n: u64,
    repetitions: usize,
    seed: u64,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&[TwoQubitState]) -> Result<T> + Sync,
{
    (0..repetitions as u64)
        .into_par_iter()
        .map(|k| {
            let rec = tomograph_all(states, n, repetition_seed(seed, k))?;
            f(&rec)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBars {
    pub mean: f64,
    pub std: f64,
    pub samples: Vec<f64>,
}

impl ErrorBars {
    pub fn from_samples(samples: Vec<f64>) -> ErrorBars {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        ErrorBars {
            mean,
            std: var.sqrt(),
            samples,
        }
    }

    pub fn relative_std(&self) -> f64 {
        self.std / self.mean.abs()
    }
}

pub fn error_bars(
    states: &[TwoQubitState],
    n: u64,
    repetitions: usize,
    seed: u64,
    statistic: Statistic,
) -> Result<ErrorBars> {
    if repetitions < 2 {
        return Err(Error::OutOfRange {
            name: "repetitions",
            value: repetitions as f64,
            range: "≥ 2",
        });
    }
    let samples = monte_carlo(states, n, repetitions, seed, |rec| statistic.evaluate(rec))?;
    Ok(ErrorBars::from_samples(samples))
}
