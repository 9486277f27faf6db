//! Complete positivity and positivity of unital qubit maps via the dynamical
//! matrix `H = (𝟙 + Σ_μν M_μν σ_μ ⊗ σ*_ν)/2`, and the resulting
//! Markovian / weak / strong non-Markovian classification of the
//! intermediate map `Λ21 = Λ20 Λ10⁻¹`.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::channels::{compose, invert, BlochAffineMap};
use crate::error::{Error, Result};
use crate::qmat::{c, re, CMatrix, Pauli, C64};

/// Largest Bloch shift accepted as unital.
pub const UNITAL_TOL: f64 = 1e-9;
/// Default eigenvalue tolerance for the analytic pipeline.
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-7;
/// Threshold on the product-state minimum below which positivity is refuted.
pub const PRODUCT_MIN_TOL: f64 = 1e-6;
pub const DEFAULT_GRID_DENSITY: usize = 32;
const REFINE_STEPS: usize = 50;

#[derive(Debug, Clone)]
pub struct DynamicalMatrix {
    h: CMatrix,
    eigenvalues: [f64; 4],
}

impl DynamicalMatrix {
    pub fn from_map(map: &BlochAffineMap) -> Result<Self> {
        let shift = map.shift_norm();
        if shift > UNITAL_TOL {
            return Err(Error::NonUnital(shift));
        }
        let mut h = CMatrix::identity(4);
        for (mu, pm) in Pauli::XYZ.iter().enumerate() {
            for (nu, pn) in Pauli::XYZ.iter().enumerate() {
                let w = map.m[mu][nu];
                if w != 0.0 {
                    let term = pm.matrix().tensor(&pn.matrix().conj())?;
                    h = &h + &term.scale_re(w);
                }
            }
        }
        let h = h.scale_re(0.5);
        let values = h.hermitian_eigensystem()?.values;
        Ok(DynamicalMatrix {
            h,
            eigenvalues: [values[0], values[1], values[2], values[3]],
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.h
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        self.eigenvalues
    }

    /// Entries `(h1, h2, h3, h4) = (H00, H11, H12, H03)` of the X-shaped
    /// pattern produced by diagonal maps.
    pub fn pattern_entries(&self) -> [f64; 4] {
        [
            self.h[(0, 0)].re,
            self.h[(1, 1)].re,
            self.h[(1, 2)].re,
            self.h[(0, 3)].re,
        ]
    }

    /// Minimum eigenvalue; negative values certify the map is not CP.
    pub fn cp_defect(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Smallest `λ_i + λ_j` over `i ≠ j`.
    pub fn min_pair_sum(&self) -> f64 {
        self.eigenvalues[0] + self.eigenvalues[1]
    }

    /// Upper bound on `min ⟨a⊗b|H|a⊗b⟩` over normalized product vectors.
    ///
    /// The ancilla-side vector is searched on a `grid_density × grid_density`
    /// grid of Bloch angles followed by coordinate descent with step halving;
    /// for each candidate the system-side minimum is the smallest eigenvalue
    /// of the 2×2 block `(⟨a| ⊗ 𝟙) H (|a⟩ ⊗ 𝟙)`, which is exact.
    pub fn product_state_minimum(&self, grid_density: usize) -> f64 {
        let g = grid_density.max(8);
        let eval = |theta: f64, phi: f64| -> f64 { self.inner_minimum(theta, phi) };

        let mut best = (f64::INFINITY, 0.0, 0.0);
        for i in 0..g {
            let theta = PI * (i as f64 + 0.5) / g as f64;
            for j in 0..g {
                let phi = 2.0 * PI * j as f64 / g as f64;
                let v = eval(theta, phi);
                if v < best.0 {
                    best = (v, theta, phi);
                }
            }
        }
        // the poles are not on the grid
        for theta in [0.0, PI] {
            let v = eval(theta, 0.0);
            if v < best.0 {
                best = (v, theta, 0.0);
            }
        }

        let (mut val, mut theta, mut phi) = best;
        let mut step = PI / g as f64;
        for _ in 0..REFINE_STEPS {
            let mut improved = false;
            for (dt, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
                let v = eval(theta + dt, phi + dp);
                if v < val {
                    val = v;
                    theta += dt;
                    phi += dp;
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        val
    }

    fn inner_minimum(&self, theta: f64, phi: f64) -> f64 {
        let a = [re((theta / 2.0).cos()), C64::from_polar((theta / 2.0).sin(), phi)];
        let mut k = [[c(0.0, 0.0); 2]; 2];
        for (r, row) in k.iter_mut().enumerate() {
            for (s, entry) in row.iter_mut().enumerate() {
                for i in 0..2 {
                    for j in 0..2 {
                        *entry += a[i].conj() * a[j] * self.h[(2 * i + r, 2 * j + s)];
                    }
                }
            }
        }
        let mean = 0.5 * (k[0][0].re + k[1][1].re);
        let half_gap = (0.25 * (k[0][0].re - k[1][1].re).powi(2) + k[0][1].norm_sqr()).sqrt();
        mean - half_gap
    }

    pub fn block_positivity(&self, tolerance: f64) -> BlockPositivity {
        let pairwise = self.min_pair_sum() >= -2.0 * tolerance;
        let product_minimum = self.product_state_minimum(DEFAULT_GRID_DENSITY);
        let product_positive = product_minimum >= -tolerance.max(PRODUCT_MIN_TOL);
        BlockPositivity {
            positive: pairwise && product_positive,
            pairwise,
            product_minimum,
            discrepancy: pairwise != product_positive,
        }
    }

    pub fn classify(&self, tolerance: f64) -> NMClassification {
        let bp = self.block_positivity(tolerance);
        let lambda_min = self.cp_defect();
        let verdict = if !bp.positive {
            Verdict::StrongNonMarkovian
        } else if lambda_min < -tolerance {
            Verdict::WeakNonMarkovian
        } else {
            Verdict::MarkovianConsistent
        };
        NMClassification {
            verdict,
            lambda_min,
            block_positive: bp.positive,
            tolerance,
            positivity: bp,
        }
    }
}

/// Outcome of the positivity test. The pairwise eigenvalue criterion is exact
/// for Pauli maps; the product-state minimum is the general check and wins
/// when they disagree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockPositivity {
    pub positive: bool,
    pub pairwise: bool,
    pub product_minimum: f64,
    pub discrepancy: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    MarkovianConsistent,
    WeakNonMarkovian,
    StrongNonMarkovian,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::MarkovianConsistent => "MARKOVIAN_CONSISTENT",
            Verdict::WeakNonMarkovian => "WEAK_NON_MARKOVIAN",
            Verdict::StrongNonMarkovian => "STRONG_NON_MARKOVIAN",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NMClassification {
    pub verdict: Verdict,
    pub lambda_min: f64,
    pub block_positive: bool,
    pub tolerance: f64,
    pub positivity: BlockPositivity,
}

/// `Λ21 = Λ20 ∘ Λ10⁻¹` (Λ10's pseudo-inverse is applied first).
pub fn intermediate_map(lambda20: &BlochAffineMap, lambda10: &BlochAffineMap, tol: f64) -> BlochAffineMap {
    compose(lambda20, &invert(lambda10, tol))
}

/// Closed-form entries, eigenvalues and concurrences for the intermediate
/// map of the experimental collision table with flip fidelity `F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedForms {
    pub h: [f64; 4],
    /// `λ0 = λ1, λ2, λ3` in that order (not sorted).
    pub lambda: [f64; 4],
    pub c1: f64,
    pub c2: f64,
}

impl ClosedForms {
    pub fn sorted_lambda(&self) -> [f64; 4] {
        let mut l = self.lambda;
        l.sort_by(f64::total_cmp);
        l
    }
}

pub fn methods_closed_forms(epsilon: f64, fidelity: f64) -> ClosedForms {
    let (e, f) = (epsilon, fidelity);
    let d = 2.0 * (f - 3.0) * e + 2.0;
    let quad = f * (5.0 * f - 6.0) + 5.0;
    let h1 = (2.0 * quad * e * e + 3.0 * (f - 3.0) * e + 2.0) / d;
    let h2 = -(e * (2.0 * quad * e + f - 3.0)) / d;
    let h3 = (3.0 * f - 1.0) * e * (4.0 * (f - 1.0) * e + 1.0) / d;
    let h4 = (e * (8.0 * ((f - 1.0) * f + 2.0) * e + f - 11.0) + 2.0) / d;

    let dl = f * e - 3.0 * e + 1.0;
    let l01 = (f + 1.0) * e;
    let l2 = -(e * (11.0 * f * f * e - 14.0 * f * e + 2.0 * f + 7.0 * e - 2.0)) / dl;
    let l3 = (9.0 * f * f * e * e - 10.0 * f * e * e + 2.0 * f * e + 13.0 * e * e - 10.0 * e + 2.0) / dl;

    let c1 = (1.0 - 4.0 * e).max(0.0);
    let c2 = (1.0 + 4.0 * e * ((f * (3.0 * f - 2.0) + 3.0) * e - 2.0)).max(0.0);
    ClosedForms {
        h: [h1, h2, h3, h4],
        lambda: [l01, l01, l2, l3],
        c1,
        c2,
    }
}
