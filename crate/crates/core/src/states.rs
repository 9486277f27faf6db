//! One- and two-qubit states and the witnesses computed on them.
//!
//! Two-qubit matrices are ordered ancilla ⊗ system, with |H⟩ ↦ |0⟩ and
//! |V⟩ ↦ |1⟩. Entropies are in bits.

use crate::error::{Error, Result};
use crate::qmat::{c, re, CMatrix, Pauli, Subsystem, C64};

/// Tolerance on trace, hermiticity and negative eigenvalues of a density matrix.
pub const STATE_TOL: f64 = 1e-10;

/// Check the density-matrix invariants of a 2×2 or 4×4 matrix.
pub fn validate_density(rho: &CMatrix) -> Result<()> {
    if !rho.is_square() {
        return Err(Error::InvalidState(format!(
            "non-square {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    let dev = rho.hermitian_deviation();
    if dev > STATE_TOL {
        return Err(Error::InvalidState(format!(
            "not Hermitian (deviation {dev:.3e})"
        )));
    }
    let tr = rho.trace();
    if (tr - re(1.0)).norm() > STATE_TOL {
        return Err(Error::InvalidState(format!(
            "trace {:.12} + {:.3e}i",
            tr.re, tr.im
        )));
    }
    let es = rho.hermitian_eigensystem()?;
    if es.values[0] < -STATE_TOL {
        return Err(Error::InvalidState(format!(
            "negative eigenvalue {:.3e}",
            es.values[0]
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    rho: CMatrix,
}

impl TwoQubitState {
    pub fn new(rho: CMatrix) -> Result<Self> {
        if rho.rows() != 4 || rho.cols() != 4 {
            return Err(Error::DimensionMismatch {
                expected: "4x4".into(),
                found: format!("{}x{}", rho.rows(), rho.cols()),
            });
        }
        validate_density(&rho)?;
        Ok(TwoQubitState { rho })
    }

    /// Crate-internal constructor for matrices that are valid by construction
    /// (images of valid states under channels).
    pub(crate) fn new_unchecked(rho: CMatrix) -> Self {
        debug_assert!(validate_density(&rho).is_ok(), "{rho:?}");
        TwoQubitState { rho }
    }

    pub fn maximally_mixed() -> Self {
        TwoQubitState {
            rho: CMatrix::identity(4).scale_re(0.25),
        }
    }

    pub fn product(ancilla: &QubitState, system: &QubitState) -> Self {
        TwoQubitState {
            rho: ancilla.rho.tensor(&system.rho).expect("2x2 factors"),
        }
    }

    pub fn rho(&self) -> &CMatrix {
        &self.rho
    }

    pub fn reduced(&self, keep: Subsystem) -> QubitState {
        let r = self.rho.partial_trace(keep).expect("4x4 state");
        QubitState::from_rho_unchecked(r)
    }

    /// `(U ⊗ V) ρ (U ⊗ V)†`.
    pub fn apply_local_unitaries(&self, u: &CMatrix, v: &CMatrix) -> Result<Self> {
        let uv = u.tensor(v)?;
        Ok(TwoQubitState {
            rho: self.rho.conjugate_by(&uv)?,
        })
    }

    /// Wootters concurrence. The μ_i are obtained as the eigenvalues of the
    /// Hermitian matrix √ρ ρ̃ √ρ, which share the spectrum of ρ ρ̃.
    pub fn concurrence(&self) -> f64 {
        let yy = Pauli::Y.matrix().tensor(&Pauli::Y.matrix()).expect("2x2");
        let tilde = &(&yy * &self.rho.conj()) * &yy;
        let sqrt_rho = self
            .rho
            .hermitian_map(|x| x.max(0.0).sqrt())
            .expect("valid state is Hermitian");
        let m = &(&sqrt_rho * &tilde) * &sqrt_rho;
        let mut mu = hermitize(&m)
            .hermitian_eigensystem()
            .expect("hermitized")
            .values
            .into_iter()
            .map(|x| x.max(0.0).sqrt())
            .collect::<Vec<_>>();
        mu.sort_by(|a, b| b.total_cmp(a));
        (mu[0] - mu[1] - mu[2] - mu[3]).max(0.0)
    }

    pub fn correlation_data(&self) -> CorrelationData {
        let mut a = [0.0; 3];
        let mut b = [0.0; 3];
        let mut t = [[0.0; 3]; 3];
        let id = Pauli::I.matrix();
        for (i, pi) in Pauli::XYZ.iter().enumerate() {
            let s = pi.matrix();
            a[i] = self.rho.expectation(&s.tensor(&id).unwrap());
            b[i] = self.rho.expectation(&id.tensor(&s).unwrap());
            for (j, pj) in Pauli::XYZ.iter().enumerate() {
                t[i][j] = self.rho.expectation(&s.tensor(&pj.matrix()).unwrap());
            }
        }
        CorrelationData { a, b, t }
    }

    pub fn von_neumann_entropy(&self) -> f64 {
        entropy_of_valid(&self.rho)
    }
}

fn hermitize(m: &CMatrix) -> CMatrix {
    (m + &m.adjoint()).scale_re(0.5)
}

/// Ancilla–system state `v|ψ(α)⟩⟨ψ(α)| + (1−v)𝟙/4` with
/// `|ψ(α)⟩ = (|HV⟩ + e^{iα}|VH⟩)/√2`.
pub fn bell_state(alpha: f64, visibility: f64) -> Result<TwoQubitState> {
    if !(0.0..=1.0).contains(&visibility) || visibility.is_nan() {
        return Err(Error::OutOfRange {
            name: "visibility",
            value: visibility,
            range: "[0, 1]",
        });
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = [re(0.0), re(s), C64::from_polar(s, alpha), re(0.0)];
    let pure = CMatrix::outer(&psi)?;
    let mixed = CMatrix::identity(4).scale_re((1.0 - visibility) / 4.0);
    Ok(TwoQubitState {
        rho: &pure.scale_re(visibility) + &mixed,
    })
}

/// Werner visibility whose concurrence `(3v − 1)/2` equals `target`.
pub fn visibility_for_concurrence(target: f64) -> f64 {
    (2.0 * target + 1.0) / 3.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct QubitState {
    rho: CMatrix,
    bloch: [f64; 3],
}

impl QubitState {
    pub fn new(rho: CMatrix) -> Result<Self> {
        if rho.rows() != 2 || rho.cols() != 2 {
            return Err(Error::DimensionMismatch {
                expected: "2x2".into(),
                found: format!("{}x{}", rho.rows(), rho.cols()),
            });
        }
        validate_density(&rho)?;
        Ok(Self::from_rho_unchecked(rho))
    }

    fn from_rho_unchecked(rho: CMatrix) -> Self {
        let bloch = [
            rho.expectation(&Pauli::X.matrix()),
            rho.expectation(&Pauli::Y.matrix()),
            rho.expectation(&Pauli::Z.matrix()),
        ];
        QubitState { rho, bloch }
    }

    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1.0 + STATE_TOL {
            return Err(Error::InvalidState(format!("Bloch vector norm {norm}")));
        }
        let rho = CMatrix::new(
            2,
            2,
            vec![
                re((1.0 + r[2]) / 2.0),
                c(r[0] / 2.0, -r[1] / 2.0),
                c(r[0] / 2.0, r[1] / 2.0),
                re((1.0 - r[2]) / 2.0),
            ],
        )?;
        Ok(QubitState { rho, bloch: r })
    }

    pub fn rho(&self) -> &CMatrix {
        &self.rho
    }

    pub fn bloch(&self) -> [f64; 3] {
        self.bloch
    }

    pub fn von_neumann_entropy(&self) -> f64 {
        entropy_of_valid(&self.rho)
    }
}

/// Ancilla and system Bloch vectors plus the correlation matrix
/// `T_ij = Tr(ρ σ_i ⊗ σ_j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationData {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub t: [[f64; 3]; 3],
}

impl CorrelationData {
    /// `(𝟙⊗𝟙 + a·σ⊗𝟙 + 𝟙⊗b·σ + Σ T_ij σ_i⊗σ_j)/4`. The result is Hermitian
    /// with unit trace but need not be positive.
    pub fn to_matrix(&self) -> CMatrix {
        let id = Pauli::I.matrix();
        let mut rho = CMatrix::identity(4);
        for (i, pi) in Pauli::XYZ.iter().enumerate() {
            let s = pi.matrix();
            rho = &rho + &s.tensor(&id).unwrap().scale_re(self.a[i]);
            rho = &rho + &id.tensor(&s).unwrap().scale_re(self.b[i]);
            for (j, pj) in Pauli::XYZ.iter().enumerate() {
                rho = &rho + &s.tensor(&pj.matrix()).unwrap().scale_re(self.t[i][j]);
            }
        }
        rho.scale_re(0.25)
    }
}

pub fn trace_distance(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    if rho.rows() != sigma.rows() || rho.cols() != sigma.cols() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", rho.rows(), rho.cols()),
            found: format!("{}x{}", sigma.rows(), sigma.cols()),
        });
    }
    validate_density(rho)?;
    validate_density(sigma)?;
    Ok(0.5 * (rho - sigma).trace_norm()?)
}

pub fn von_neumann_entropy(rho: &CMatrix) -> Result<f64> {
    validate_density(rho)?;
    Ok(entropy_of_valid(rho))
}

fn entropy_of_valid(rho: &CMatrix) -> f64 {
    let es = rho.hermitian_eigensystem().expect("valid state is Hermitian");
    es.values
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.log2())
        .sum::<f64>()
        .max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn su2(theta: f64, phi: f64, lambda: f64) -> CMatrix {
        let (s, co) = (theta / 2.0).sin_cos();
        CMatrix::new(
            2,
            2,
            vec![
                re(co),
                -C64::from_polar(s, lambda),
                C64::from_polar(s, phi),
                C64::from_polar(co, phi + lambda),
            ],
        )
        .unwrap()
    }

    #[test]
    fn bell_concurrence_limits() {
        assert!((bell_state(0.0, 1.0).unwrap().concurrence() - 1.0).abs() < 1e-12);
        let mixed = bell_state(0.0, 0.0).unwrap();
        assert!(mixed.rho().max_abs_diff(&CMatrix::identity(4).scale_re(0.25)) < 1e-15);
        assert_eq!(mixed.concurrence(), 0.0);
    }

    #[test]
    fn werner_visibility_for_initial_concurrence() {
        let v = visibility_for_concurrence(0.975);
        assert!((v - 0.98333).abs() < 1e-5);
        let st = bell_state(0.0, v).unwrap();
        assert!((st.concurrence() - 0.975).abs() < 1e-12);
        // the rounded value quoted for the experiment
        let st = bell_state(0.0, 0.98333).unwrap();
        assert!((st.concurrence() - 0.975).abs() < 1e-4);
    }

    #[test]
    fn bell_state_rejects_bad_visibility() {
        assert!(bell_state(0.0, 1.5).is_err());
        assert!(bell_state(0.0, -0.1).is_err());
    }

    #[test]
    fn concurrence_is_phase_independent() {
        for alpha in [0.0, PI / 2.0, PI] {
            let st = bell_state(alpha, 0.9).unwrap();
            assert!((st.concurrence() - 0.85).abs() < 1e-12);
        }
    }

    #[test]
    fn correlation_data_of_bell_state() {
        let cd = bell_state(0.0, 1.0).unwrap().correlation_data();
        assert!(cd.a.iter().chain(&cd.b).all(|x| x.abs() < 1e-15));
        let expected = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((cd.t[i][j] - expected[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn correlation_data_of_mixed_and_product() {
        let cd = TwoQubitState::maximally_mixed().correlation_data();
        assert!(cd.t.iter().flatten().all(|x| x.abs() < 1e-15));
        let zero = QubitState::from_bloch([0.0, 0.0, 1.0]).unwrap();
        let plus = QubitState::from_bloch([1.0, 0.0, 0.0]).unwrap();
        let cd = TwoQubitState::product(&zero, &plus).correlation_data();
        assert_eq!(cd.a, [0.0, 0.0, 1.0]);
        assert_eq!(cd.b, [1.0, 0.0, 0.0]);
        for i in 0..3 {
            for j in 0..3 {
                assert!((cd.t[i][j] - cd.a[i] * cd.b[j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn trace_distance_examples() {
        let r = bell_state(0.3, 0.7).unwrap();
        assert!(trace_distance(r.rho(), r.rho()).unwrap() < 1e-15);
        let zero = QubitState::from_bloch([0.0, 0.0, 1.0]).unwrap();
        let one = QubitState::from_bloch([0.0, 0.0, -1.0]).unwrap();
        assert!((trace_distance(zero.rho(), one.rho()).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            trace_distance(zero.rho(), r.rho()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn entropy_examples() {
        let pure = QubitState::from_bloch([0.6, 0.0, 0.8]).unwrap();
        assert!(pure.von_neumann_entropy().abs() < 1e-12);
        let mixed = QubitState::from_bloch([0.0; 3]).unwrap();
        assert!((mixed.von_neumann_entropy() - 1.0).abs() < 1e-15);
        // Bell-diagonal weights {0.8, 0.1, 0, 0.1}: Shannon entropy evaluated by hand
        let expected = -(0.8f64 * 0.8f64.log2() + 2.0 * 0.1 * 0.1f64.log2());
        assert!((expected - 0.921928).abs() < 1e-6);
        let bells = bell_basis();
        let mut rho = CMatrix::zeros(4);
        for (w, b) in [0.8, 0.1, 0.0, 0.1].iter().zip(&bells) {
            rho = &rho + &CMatrix::outer(b).unwrap().scale_re(*w);
        }
        let h = von_neumann_entropy(&rho).unwrap();
        assert!((h - expected).abs() < 1e-12);
    }

    #[test]
    fn entropy_rejects_invalid() {
        let bad = CMatrix::diag(&[1.5, -0.5]).unwrap();
        assert!(von_neumann_entropy(&bad).is_err());
    }

    #[test]
    fn reconstruction_from_correlation_data() {
        let st = bell_state(0.7, 0.8).unwrap();
        let back = st.correlation_data().to_matrix();
        assert!(back.max_abs_diff(st.rho()) < 1e-12);
    }

    fn bell_basis() -> Vec<Vec<C64>> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = re(0.0);
        vec![
            vec![re(s), z, z, re(s)],
            vec![re(s), z, z, re(-s)],
            vec![z, re(s), re(s), z],
            vec![z, re(s), re(-s), z],
        ]
    }

    proptest! {
        #[test]
        fn concurrence_invariant_under_local_unitaries(
            v in 0.0f64..=1.0,
            alpha in 0.0f64..6.3,
            a in proptest::array::uniform3(0.0f64..6.3),
            b in proptest::array::uniform3(0.0f64..6.3),
        ) {
            let st = bell_state(alpha, v).unwrap();
            let rotated = st
                .apply_local_unitaries(&su2(a[0], a[1], a[2]), &su2(b[0], b[1], b[2]))
                .unwrap();
            prop_assert!((rotated.concurrence() - st.concurrence()).abs() <= 1e-10);
        }

        #[test]
        fn trace_distance_is_a_metric(
            r1 in proptest::array::uniform3(-0.57f64..0.57),
            r2 in proptest::array::uniform3(-0.57f64..0.57),
            r3 in proptest::array::uniform3(-0.57f64..0.57),
        ) {
            let [p, q, s] = [r1, r2, r3].map(|r| QubitState::from_bloch(r).unwrap());
            let d = |x: &QubitState, y: &QubitState| trace_distance(x.rho(), y.rho()).unwrap();
            prop_assert!((d(&p, &q) - d(&q, &p)).abs() <= 1e-12);
            prop_assert!(d(&p, &p) <= 1e-10);
            prop_assert!(d(&p, &s) <= d(&p, &q) + d(&q, &s) + 1e-12);
            // qubit trace distance is half the Euclidean Bloch distance
            let e = (0..3).map(|i| (r1[i] - r2[i]).powi(2)).sum::<f64>().sqrt() / 2.0;
            prop_assert!((d(&p, &q) - e).abs() <= 1e-12);
        }

        #[test]
        fn bloch_round_trip(r in proptest::array::uniform3(-0.57f64..0.57)) {
            let q = QubitState::from_bloch(r).unwrap();
            let again = QubitState::new(q.rho().clone()).unwrap();
            for i in 0..3 {
                prop_assert!((again.bloch()[i] - r[i]).abs() <= 1e-12);
            }
        }
    }
}
