use rayon::prelude::*;
use serde::Serialize;

use super::config::{Mode, SweepConfig};
use crate::channels::{
    apply_to_system, channel_after_one, channel_after_two, collision_table, BlochAffineMap,
    JointCollisionTable, PauliProbabilities, DEFAULT_INVERSION_TOL,
};
use crate::divisibility::{
    intermediate_map, DynamicalMatrix, NMClassification, Verdict, DEFAULT_CLASSIFY_TOL,
};
use crate::states::{bell_state, TwoQubitState};
use crate::tomography::{self, ErrorBars};
use crate::Result;

const POINT_SEED_MULTIPLIER: u64 = 0xA24B_AED4_963E_E407;

/// Seed for grid point `index`; each point gets an independent stream.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(POINT_SEED_MULTIPLIER)
}

/// Exact evolution of the model at one collision strength.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub epsilon: f64,
    pub fidelity: f64,
    pub table: JointCollisionTable,
    pub channel_one: PauliProbabilities,
    pub channel_two: PauliProbabilities,
    /// `[ρ(0), ρ(1), ρ(2)]`.
    pub states: [TwoQubitState; 3],
    pub lambda10: BlochAffineMap,
    pub lambda20: BlochAffineMap,
    pub lambda21: BlochAffineMap,
    pub dynamical: DynamicalMatrix,
}

impl Trajectory {
    pub fn compute(epsilon: f64, fidelity: f64, visibility: f64) -> Result<Trajectory> {
        let table = collision_table(epsilon)?;
        let channel_one = channel_after_one(&table, fidelity)?;
        let channel_two = channel_after_two(&table, fidelity)?;
        let initial = bell_state(0.0, visibility)?;
        let s1 = apply_to_system(&initial, &channel_one);
        let s2 = apply_to_system(&initial, &channel_two);
        let lambda10 = channel_one.bloch_map();
        let lambda20 = channel_two.bloch_map();
        let lambda21 = intermediate_map(&lambda20, &lambda10, DEFAULT_INVERSION_TOL);
        let dynamical = DynamicalMatrix::from_map(&lambda21)?;
        Ok(Trajectory {
            epsilon,
            fidelity,
            table,
            channel_one,
            channel_two,
            states: [initial, s1, s2],
            lambda10,
            lambda20,
            lambda21,
            dynamical,
        })
    }

    pub fn concurrences(&self) -> [f64; 3] {
        [0, 1, 2].map(|i| self.states[i].concurrence())
    }
}

/// Monte Carlo tomography of one trajectory. Repetition 0 is the reported
/// estimate; the spread over all repetitions gives the error bars.
#[derive(Debug, Clone)]
pub struct TomographicEstimate {
    pub dynamical: DynamicalMatrix,
    pub classification: NMClassification,
    pub c1: f64,
    pub c2: f64,
    pub lambda_min: ErrorBars,
    pub c1_bars: ErrorBars,
    pub c2_bars: ErrorBars,
}

pub fn tomographic_estimate(
    states: &[TwoQubitState; 3],
    counts: u64,
    repetitions: usize,
    seed: u64,
) -> Result<TomographicEstimate> {
    let samples = tomography::monte_carlo(states, counts, repetitions, seed, |rec| {
        let p = tomography::process_from_states(rec)?;
        Ok((p.dynamical, rec[1].concurrence(), rec[2].concurrence()))
    })?;
    let lambda_min = ErrorBars::from_samples(samples.iter().map(|s| s.0.cp_defect()).collect());
    let c1_bars = ErrorBars::from_samples(samples.iter().map(|s| s.1).collect());
    let c2_bars = ErrorBars::from_samples(samples.iter().map(|s| s.2).collect());
    let (dynamical, c1, c2) = samples.into_iter().next().expect("at least one repetition");
    let tol = (3.0 * lambda_min.std).max(DEFAULT_CLASSIFY_TOL);
    let classification = dynamical.classify(tol);
    Ok(TomographicEstimate {
        dynamical,
        classification,
        c1,
        c2,
        lambda_min,
        c1_bars,
        c2_bars,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub lambda_min: f64,
    pub block_positive: bool,
    pub verdict: Verdict,
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    #[serde(rename = "C_diff")]
    pub c_diff: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_lambda_min: Option<f64>,
    #[serde(rename = "std_C1", skip_serializing_if = "Option::is_none")]
    pub std_c1: Option<f64>,
    #[serde(rename = "std_C2", skip_serializing_if = "Option::is_none")]
    pub std_c2: Option<f64>,
}

pub fn sweep_point(cfg: &SweepConfig, index: usize) -> Result<SweepRow> {
    let epsilon = cfg.epsilon_grid[index];
    let traj = Trajectory::compute(epsilon, cfg.fidelity, cfg.visibility)?;
    match cfg.mode {
        Mode::Analytic => {
            let cls = traj.dynamical.classify(DEFAULT_CLASSIFY_TOL);
            let [_, c1, c2] = traj.concurrences();
            Ok(SweepRow {
                epsilon,
                lambda_min: cls.lambda_min,
                block_positive: cls.block_positive,
                verdict: cls.verdict,
                c1,
                c2,
                c_diff: c2 - c1,
                std_lambda_min: None,
                std_c1: None,
                std_c2: None,
            })
        }
        Mode::Tomographic => {
            let est = tomographic_estimate(
                &traj.states,
                cfg.counts,
                cfg.repetitions,
                point_seed(cfg.seed, index),
            )?;
            let cls = est.classification;
            Ok(SweepRow {
                epsilon,
                lambda_min: cls.lambda_min,
                block_positive: cls.block_positive,
                verdict: cls.verdict,
                c1: est.c1,
                c2: est.c2,
                c_diff: est.c2 - est.c1,
                std_lambda_min: Some(est.lambda_min.std),
                std_c1: Some(est.c1_bars.std),
                std_c2: Some(est.c2_bars.std),
            })
        }
    }
}

/// Rows in grid order; points are evaluated in parallel.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    (0..cfg.epsilon_grid.len())
        .into_par_iter()
        .map(|i| sweep_point(cfg, i))
        .collect()
}
