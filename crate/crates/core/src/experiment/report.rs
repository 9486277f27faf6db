use serde::Serialize;

use super::config::{Mode, SweepConfig};
use super::oracle::{check_point, OracleCheck};
use super::sweep::{point_seed, tomographic_estimate, Trajectory};
use crate::channels::{BlochAffineMap, CollisionOp};
use crate::divisibility::{NMClassification, DEFAULT_CLASSIFY_TOL};
use crate::tomography::ErrorBars;
use crate::{Mat3, Result, Vec3};

#[derive(Debug, Clone, Serialize)]
pub struct TableReport {
    pub labels: [&'static str; 3],
    /// `p[i][j]` for first collision `labels[i]`, second `labels[j]`.
    pub p: [[f64; 3]; 3],
    pub first_marginal: [f64; 3],
    /// `None` when a marginal vanishes.
    pub correlation_factor: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MapReport {
    pub m: Mat3,
    pub t: Vec3,
    pub singular_axes: Vec<&'static str>,
}

impl From<&BlochAffineMap> for MapReport {
    fn from(map: &BlochAffineMap) -> Self {
        MapReport {
            m: map.m,
            t: map.t,
            singular_axes: map.singular_axes().into_iter().map(|i| ["x", "y", "z"][i]).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DynamicalReport {
    pub h_re: [[f64; 4]; 4],
    pub h_im: [[f64; 4]; 4],
    /// `H00, H11, H12, H03`.
    pub pattern: [f64; 4],
    pub eigenvalues: [f64; 4],
}

#[derive(Debug, Clone, Serialize)]
pub struct StatSummary {
    pub mean: f64,
    pub std: f64,
}

impl From<&ErrorBars> for StatSummary {
    fn from(e: &ErrorBars) -> Self {
        StatSummary {
            mean: e.mean,
            std: e.std,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TomographicReport {
    pub counts: u64,
    pub repetitions: usize,
    pub seed: u64,
    pub classification: NMClassification,
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    pub lambda_min: StatSummary,
    #[serde(rename = "C1_stats")]
    pub c1_stats: StatSummary,
    #[serde(rename = "C2_stats")]
    pub c2_stats: StatSummary,
}

/// Full account of one collision strength.
#[derive(Debug, Clone, Serialize)]
pub struct SingleReport {
    pub epsilon: f64,
    pub fidelity: f64,
    pub visibility: f64,
    pub mode: Mode,
    pub table: TableReport,
    pub channel_one: [f64; 4],
    pub channel_two: [f64; 4],
    pub lambda10: MapReport,
    pub lambda20: MapReport,
    pub lambda21: MapReport,
    pub dynamical: DynamicalReport,
    pub classification: NMClassification,
    pub concurrence: [f64; 3],
    pub entropy_bits: [f64; 3],
    /// Pipeline vs closed forms for an ideal input; `None` where the closed
    /// forms are singular.
    pub oracle: Option<OracleCheck>,
    pub tomographic: Option<TomographicReport>,
}

pub fn run_single(cfg: &SweepConfig) -> Result<SingleReport> {
    let epsilon = cfg.epsilon_grid[0];
    let traj = Trajectory::compute(epsilon, cfg.fidelity, cfg.visibility)?;
    let h = traj.dynamical.matrix();
    let mut h_re = [[0.0; 4]; 4];
    let mut h_im = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            h_re[i][j] = h[(i, j)].re;
            h_im[i][j] = h[(i, j)].im;
        }
    }
    let tomographic = match cfg.mode {
        Mode::Analytic => None,
        Mode::Tomographic => {
            let est = tomographic_estimate(&traj.states, cfg.counts, cfg.repetitions, point_seed(cfg.seed, 0))?;
            Some(TomographicReport {
                counts: cfg.counts,
                repetitions: cfg.repetitions,
                seed: cfg.seed,
                classification: est.classification,
                c1: est.c1,
                c2: est.c2,
                lambda_min: (&est.lambda_min).into(),
                c1_stats: (&est.c1_bars).into(),
                c2_stats: (&est.c2_bars).into(),
            })
        }
    };
    Ok(SingleReport {
        epsilon,
        fidelity: cfg.fidelity,
        visibility: cfg.visibility,
        mode: cfg.mode,
        table: TableReport {
            labels: CollisionOp::ALL.map(CollisionOp::label),
            p: traj.table.entries(),
            first_marginal: traj.table.first_marginal(),
            correlation_factor: traj.table.correlation_factor().ok(),
        },
        channel_one: traj.channel_one.weights(),
        channel_two: traj.channel_two.weights(),
        lambda10: (&traj.lambda10).into(),
        lambda20: (&traj.lambda20).into(),
        lambda21: (&traj.lambda21).into(),
        dynamical: DynamicalReport {
            h_re,
            h_im,
            pattern: traj.dynamical.pattern_entries(),
            eigenvalues: traj.dynamical.eigenvalues(),
        },
        classification: traj.dynamical.classify(DEFAULT_CLASSIFY_TOL),
        concurrence: traj.concurrences(),
        entropy_bits: [0, 1, 2].map(|i| traj.states[i].von_neumann_entropy()),
        oracle: check_point(epsilon, cfg.fidelity)?,
        tomographic,
    })
}
