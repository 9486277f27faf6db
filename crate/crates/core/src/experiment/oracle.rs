use serde::Serialize;

use super::sweep::Trajectory;
use crate::divisibility::{methods_closed_forms, ClosedForms};
use crate::Result;

pub const ORACLE_TOL: f64 = 1e-10;
pub const ORACLE_FIDELITIES: [f64; 4] = [0.9, 0.95, 0.97, 1.0];

/// Differences between the numerical pipeline (ideal input state) and the
/// closed forms at one `(ε, F)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleCheck {
    pub epsilon: f64,
    pub fidelity: f64,
    pub closed_forms: ClosedForms,
    pub residual_h: f64,
    pub residual_lambda: f64,
    pub residual_trace: f64,
    pub residual_c1: f64,
    pub residual_c2: f64,
}

impl OracleCheck {
    pub fn max_residual(&self) -> f64 {
        [
            self.residual_h,
            self.residual_lambda,
            self.residual_trace,
            self.residual_c1,
            self.residual_c2,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_residual() <= ORACLE_TOL
    }
}

/// The closed forms divide by `2 + 2(F − 3)ε`; they are undefined where it
/// vanishes.
pub fn closed_forms_defined(epsilon: f64, fidelity: f64) -> bool {
    (2.0 + 2.0 * (fidelity - 3.0) * epsilon).abs() > 1e-6
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn check_point(epsilon: f64, fidelity: f64) -> Result<Option<OracleCheck>> {
    if !closed_forms_defined(epsilon, fidelity) {
        return Ok(None);
    }
    let traj = Trajectory::compute(epsilon, fidelity, 1.0)?;
    let cf = methods_closed_forms(epsilon, fidelity);
    let d = &traj.dynamical;
    let [_, c1, c2] = traj.concurrences();
    Ok(Some(OracleCheck {
        epsilon,
        fidelity,
        closed_forms: cf,
        residual_h: max_diff(&d.pattern_entries(), &cf.h),
        residual_lambda: max_diff(&d.eigenvalues(), &cf.sorted_lambda()),
        residual_trace: (d.matrix().trace().re - 2.0).abs(),
        residual_c1: (c1 - cf.c1).abs(),
        residual_c2: (c2 - cf.c2).abs(),
    }))
}

pub fn oracle_grid() -> Vec<(f64, f64)> {
    ORACLE_FIDELITIES
        .iter()
        .flat_map(|&f| (0..=18).map(move |k| (0.025 * k as f64, f)))
        .collect()
}

pub fn run_selftest() -> Result<Vec<OracleCheck>> {
    let mut out = Vec::new();
    for (eps, f) in oracle_grid() {
        if let Some(c) = check_point(eps, f)? {
            out.push(c);
        }
    }
    Ok(out)
}
