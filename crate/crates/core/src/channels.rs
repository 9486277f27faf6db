//! The two-collision environment and the Pauli channels it induces on the
//! system qubit.
//!
//! Every map here is a random-unitary Pauli channel, so channels are stored as
//! weight vectors over {𝟙, X, Y, Z}. Composition is a convolution over the
//! Pauli group (mod phase), and the Bloch representation is diagonal.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg3::{self, Mat3, Vec3};
use crate::qmat::{CMatrix, Pauli};
use crate::states::{QubitState, TwoQubitState};

const PROB_TOL: f64 = 1e-12;

/// Default threshold below which a Bloch-map direction is treated as singular.
pub const DEFAULT_INVERSION_TOL: f64 = 1e-9;

/// Operators a single collision may apply: 𝟙, X or Z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CollisionOp {
    Identity,
    X,
    Z,
}

impl CollisionOp {
    pub const ALL: [CollisionOp; 3] = [CollisionOp::Identity, CollisionOp::X, CollisionOp::Z];

    fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            CollisionOp::Identity => "0",
            CollisionOp::X => "x",
            CollisionOp::Z => "z",
        }
    }
}

/// A flip that can be applied imperfectly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flip {
    X,
    Z,
}

impl std::str::FromStr for Flip {
    type Err = Error;
    fn from_str(s: &str) -> Result<Flip> {
        match s {
            "X" | "x" => Ok(Flip::X),
            "Z" | "z" => Ok(Flip::Z),
            other => Err(Error::InvalidFlip(other.to_string())),
        }
    }
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            range: "[0, 1]",
        })
    }
}

/// Weights of a Pauli channel `ρ ↦ Σ_k q_k σ_k ρ σ_k`, indexed 𝟙, X, Y, Z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PauliProbabilities {
    q: [f64; 4],
}

impl PauliProbabilities {
    pub fn new(q: [f64; 4]) -> Result<Self> {
        if let Some(bad) = q.iter().find(|&&x| !(-PROB_TOL..=1.0 + PROB_TOL).contains(&x)) {
            return Err(Error::InvalidProbabilities(format!(
                "weight {bad} outside [0, 1]"
            )));
        }
        let sum: f64 = q.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidProbabilities(format!("weights sum to {sum}")));
        }
        Ok(PauliProbabilities { q })
    }

    pub fn identity() -> Self {
        PauliProbabilities {
            q: [1.0, 0.0, 0.0, 0.0],
        }
    }

    pub fn pure(p: Pauli) -> Self {
        let mut q = [0.0; 4];
        q[p.index()] = 1.0;
        PauliProbabilities { q }
    }

    pub fn weights(&self) -> [f64; 4] {
        self.q
    }

    pub fn weight(&self, p: Pauli) -> f64 {
        self.q[p.index()]
    }

    /// The channel "apply `self`, then `next`". Pauli channels commute, so the
    /// order only matters for readability.
    pub fn then(&self, next: &PauliProbabilities) -> PauliProbabilities {
        let mut q = [0.0; 4];
        for a in Pauli::ALL {
            for b in Pauli::ALL {
                q[a.mul_mod_phase(b).index()] += self.q[a.index()] * next.q[b.index()];
            }
        }
        PauliProbabilities { q }
    }

    fn mix(parts: impl IntoIterator<Item = (f64, PauliProbabilities)>) -> PauliProbabilities {
        let mut q = [0.0; 4];
        for (w, ch) in parts {
            for (acc, x) in q.iter_mut().zip(ch.q) {
                *acc += w * x;
            }
        }
        PauliProbabilities { q }
    }

    /// `Σ_k q_k σ_k ρ σ_k` on a single-qubit matrix.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(rho.dim());
        for p in Pauli::ALL {
            let w = self.q[p.index()];
            if w != 0.0 {
                out = &out + &rho.conjugate_by(&p.matrix()).expect("2x2").scale_re(w);
            }
        }
        out
    }

    pub fn apply_to_qubit(&self, state: &QubitState) -> QubitState {
        QubitState::new(self.apply(state.rho())).expect("Pauli channels preserve validity")
    }

    pub fn bloch_map(&self) -> BlochAffineMap {
        let [q0, qx, qy, qz] = self.q;
        BlochAffineMap::diagonal([
            q0 + qx - qy - qz,
            q0 - qx + qy - qz,
            q0 - qx - qy + qz,
        ])
    }
}

/// `F·OρO + (1−F)/2` on each of the two other Paulis.
pub fn noisy_flip(op: Flip, fidelity: f64) -> Result<PauliProbabilities> {
    check_unit("fidelity", fidelity)?;
    let e = (1.0 - fidelity) / 2.0;
    Ok(PauliProbabilities {
        q: match op {
            Flip::X => [0.0, fidelity, e, e],
            Flip::Z => [0.0, e, e, fidelity],
        },
    })
}

fn noisy_op(op: CollisionOp, fidelity: f64) -> Result<PauliProbabilities> {
    match op {
        CollisionOp::Identity => Ok(PauliProbabilities::identity()),
        CollisionOp::X => noisy_flip(Flip::X, fidelity),
        CollisionOp::Z => noisy_flip(Flip::Z, fidelity),
    }
}

/// Joint probabilities `p[m][n]` of operator `m` in the first collision and
/// `n` in the second, indexed by [`CollisionOp`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointCollisionTable {
    p: [[f64; 3]; 3],
}

impl JointCollisionTable {
    pub fn new(p: [[f64; 3]; 3]) -> Result<Self> {
        if let Some(bad) = p.iter().flatten().find(|&&x| !(0.0..=1.0).contains(&x)) {
            return Err(Error::InvalidProbabilities(format!(
                "joint probability {bad} outside [0, 1]"
            )));
        }
        let sum: f64 = p.iter().flatten().sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidProbabilities(format!(
                "joint probabilities sum to {sum}"
            )));
        }
        Ok(JointCollisionTable { p })
    }

    /// Independent collisions: `p_mn = p_m p_n` with single-collision
    /// probabilities `(1 − p_x − p_z, p_x, p_z)`.
    pub fn uncorrelated(p_x: f64, p_z: f64) -> Result<Self> {
        let single = [1.0 - p_x - p_z, p_x, p_z];
        if single.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::InvalidProbabilities(format!(
                "single-collision probabilities {single:?}"
            )));
        }
        let mut p = [[0.0; 3]; 3];
        for m in 0..3 {
            for n in 0..3 {
                p[m][n] = single[m] * single[n];
            }
        }
        Self::new(p)
    }

    pub fn get(&self, first: CollisionOp, second: CollisionOp) -> f64 {
        self.p[first.index()][second.index()]
    }

    pub fn entries(&self) -> [[f64; 3]; 3] {
        self.p
    }

    /// Marginal probability of each operator in the first collision.
    pub fn first_marginal(&self) -> [f64; 3] {
        self.p.map(|row| row.iter().sum())
    }

    pub fn correlation_factor(&self) -> Result<f64> {
        use CollisionOp::{X, Z};
        let same = self.get(X, X) + self.get(Z, Z);
        let cross = self.get(X, Z) + self.get(Z, X);
        let denom = same + cross;
        if denom == 0.0 {
            return Err(Error::CorrelationUndefined);
        }
        Ok((same - cross) / denom)
    }
}

impl fmt::Display for JointCollisionTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in CollisionOp::ALL {
            for n in CollisionOp::ALL {
                write!(f, "p_{}{}={} ", m.label(), n.label(), self.get(m, n))?;
            }
        }
        Ok(())
    }
}

/// The experimental table: `p_00 = (1−2ε)²`, singles `(1−2ε)ε`,
/// `p_xx = p_zz = 2ε²`, `p_xz = p_zx = 0`.
pub fn collision_table(epsilon: f64) -> Result<JointCollisionTable> {
    if !(0.0..=0.5).contains(&epsilon) {
        return Err(Error::OutOfRange {
            name: "epsilon",
            value: epsilon,
            range: "[0, 0.5]",
        });
    }
    let none = 1.0 - 2.0 * epsilon;
    let single = none * epsilon;
    let double = 2.0 * epsilon * epsilon;
    JointCollisionTable::new([
        [none * none, single, single],
        [single, double, 0.0],
        [single, 0.0, double],
    ])
}

/// Effective channel after the first collision (second collision marginalized).
pub fn channel_after_one(table: &JointCollisionTable, fidelity: f64) -> Result<PauliProbabilities> {
    check_unit("fidelity", fidelity)?;
    let marginal = table.first_marginal();
    let parts = CollisionOp::ALL
        .iter()
        .map(|&op| Ok((marginal[op.index()], noisy_op(op, fidelity)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(PauliProbabilities::mix(parts))
}

/// Effective channel after both collisions: `Σ_mn p_mn noisy(O_n)∘noisy(O_m)`.
pub fn channel_after_two(table: &JointCollisionTable, fidelity: f64) -> Result<PauliProbabilities> {
    check_unit("fidelity", fidelity)?;
    let mut parts = Vec::with_capacity(9);
    for first in CollisionOp::ALL {
        for second in CollisionOp::ALL {
            let composed = noisy_op(first, fidelity)?.then(&noisy_op(second, fidelity)?);
            parts.push((table.get(first, second), composed));
        }
    }
    Ok(PauliProbabilities::mix(parts))
}

/// `Σ_k q_k (𝟙⊗σ_k) ρ (𝟙⊗σ_k)`: the channel acts on the system only.
pub fn apply_to_system(state: &TwoQubitState, channel: &PauliProbabilities) -> TwoQubitState {
    let id = Pauli::I.matrix();
    let mut out = CMatrix::zeros(4);
    for p in Pauli::ALL {
        let w = channel.weight(p);
        if w == 0.0 {
            continue;
        }
        let op = id.tensor(&p.matrix()).expect("2x2");
        out = &out + &state.rho().conjugate_by(&op).expect("4x4").scale_re(w);
    }
    TwoQubitState::new_unchecked(out)
}

/// n-fold self-composition of a channel; `n = 0` gives the identity.
pub fn repeat_uncorrelated(channel: &PauliProbabilities, n: usize) -> PauliProbabilities {
    (0..n).fold(PauliProbabilities::identity(), |acc, _| acc.then(channel))
}

/// `r ↦ M r + t` on Bloch vectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlochAffineMap {
    pub m: Mat3,
    pub t: Vec3,
    /// Directions dropped by a pseudo-inversion somewhere upstream.
    pub singular_directions: Vec<Vec3>,
}

impl BlochAffineMap {
    pub fn new(m: Mat3, t: Vec3) -> Self {
        BlochAffineMap {
            m,
            t,
            singular_directions: Vec::new(),
        }
    }

    pub fn identity() -> Self {
        Self::new(linalg3::IDENTITY, [0.0; 3])
    }

    pub fn diagonal(d: Vec3) -> Self {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            m[i][i] = d[i];
        }
        Self::new(m, [0.0; 3])
    }

    pub fn diag(&self) -> Vec3 {
        [self.m[0][0], self.m[1][1], self.m[2][2]]
    }

    pub fn shift_norm(&self) -> f64 {
        self.t.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_singular(&self) -> bool {
        !self.singular_directions.is_empty()
    }

    /// Coordinate axes (0 = x, 1 = y, 2 = z) that coincide with a flagged
    /// singular direction.
    pub fn singular_axes(&self) -> Vec<usize> {
        let mut axes: Vec<usize> = self
            .singular_directions
            .iter()
            .filter_map(|d| (0..3).find(|&i| (d[i].abs() - 1.0).abs() < 1e-9))
            .collect();
        axes.sort_unstable();
        axes.dedup();
        axes
    }

    pub fn apply(&self, r: &Vec3) -> Vec3 {
        let mr = linalg3::matvec(&self.m, r);
        [0, 1, 2].map(|i| mr[i] + self.t[i])
    }
}

/// `second ∘ first`: `first` is applied first.
pub fn compose(second: &BlochAffineMap, first: &BlochAffineMap) -> BlochAffineMap {
    let m = linalg3::matmul(&second.m, &first.m);
    let mt = linalg3::matvec(&second.m, &first.t);
    let mut flags = first.singular_directions.clone();
    flags.extend(second.singular_directions.iter().copied());
    BlochAffineMap {
        m,
        t: [0, 1, 2].map(|i| mt[i] + second.t[i]),
        singular_directions: flags,
    }
}

/// Pseudo-inverse of a Bloch map. Diagonal maps invert entry by entry; other
/// maps go through an SVD. Directions with gain `≤ tol` map to zero and are
/// recorded in `singular_directions`.
pub fn invert(map: &BlochAffineMap, tol: f64) -> BlochAffineMap {
    let (m, dropped) = if linalg3::is_diagonal(&map.m) {
        let mut inv = [[0.0; 3]; 3];
        let mut dropped = Vec::new();
        for i in 0..3 {
            let d = map.m[i][i];
            if d.abs() > tol {
                inv[i][i] = 1.0 / d;
            } else {
                let mut axis = [0.0; 3];
                axis[i] = 1.0;
                dropped.push(axis);
            }
        }
        (inv, dropped)
    } else {
        linalg3::pseudo_inverse(&map.m, tol)
    };
    let mt = linalg3::matvec(&m, &map.t);
    let mut flags = map.singular_directions.clone();
    flags.extend(dropped);
    BlochAffineMap {
        m,
        t: mt.map(|x| -x),
        singular_directions: flags,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn table_values() {
        let t = collision_table(0.2).unwrap();
        let e = t.entries();
        assert!((e[0][0] - 0.36).abs() < 1e-15);
        for s in [e[0][1], e[0][2], e[1][0], e[2][0]] {
            assert!((s - 0.12).abs() < 1e-15);
        }
        assert!((e[1][1] - 0.08).abs() < 1e-15 && (e[2][2] - 0.08).abs() < 1e-15);
        assert_eq!(e[1][2], 0.0);

        let t = collision_table(0.0).unwrap().entries();
        assert_eq!(t[0][0], 1.0);
        assert_eq!(t.iter().flatten().sum::<f64>(), 1.0);

        let t = collision_table(0.25).unwrap().entries();
        assert_eq!(t[0][0], 0.25);
        assert_eq!([t[0][1], t[0][2], t[1][0], t[2][0]], [0.125; 4]);
        assert_eq!([t[1][1], t[2][2]], [0.125; 2]);
    }

    #[test]
    fn table_rejects_out_of_range() {
        assert!(collision_table(0.51).is_err());
        assert!(collision_table(-0.01).is_err());
        assert!(JointCollisionTable::new([[0.5, 0.0, 0.0], [0.0; 3], [0.0; 3]]).is_err());
    }

    #[test]
    fn correlation_factor_cases() {
        assert_eq!(collision_table(0.2).unwrap().correlation_factor().unwrap(), 1.0);
        let sym = JointCollisionTable::new([[0.6, 0.0, 0.0], [0.0, 0.1, 0.1], [0.0, 0.1, 0.1]]).unwrap();
        assert_eq!(sym.correlation_factor().unwrap(), 0.0);
        let prod = JointCollisionTable::uncorrelated(0.15, 0.15).unwrap();
        assert!(prod.correlation_factor().unwrap().abs() < 1e-15);
        assert_eq!(
            collision_table(0.0).unwrap().correlation_factor(),
            Err(Error::CorrelationUndefined)
        );
    }

    #[test]
    fn noisy_flip_weights() {
        assert_eq!(noisy_flip(Flip::X, 1.0).unwrap().weights(), [0.0, 1.0, 0.0, 0.0]);
        let x = noisy_flip(Flip::X, 0.97).unwrap().weights();
        assert!(close(&x, &[0.0, 0.97, 0.015, 0.015], 1e-15));
        let z = noisy_flip(Flip::Z, 0.9).unwrap().weights();
        assert!(close(&z, &[0.0, 0.05, 0.05, 0.9], 1e-15));
        assert!("Y".parse::<Flip>().is_err());
        assert!(noisy_flip(Flip::X, 1.1).is_err());
    }

    #[test]
    fn single_collision_channel() {
        let t = collision_table(0.1).unwrap();
        let q = channel_after_one(&t, 1.0).unwrap().weights();
        assert!(close(&q, &[0.8, 0.1, 0.0, 0.1], 1e-15));
        let q = channel_after_one(&t, 0.97).unwrap().weights();
        assert!(close(&q, &[0.8, 0.0985, 0.003, 0.0985], 1e-15));
        let q = channel_after_one(&collision_table(0.0).unwrap(), 0.9).unwrap();
        assert_eq!(q, PauliProbabilities::identity());
    }

    #[test]
    fn two_collision_channel() {
        let t = collision_table(0.1).unwrap();
        let q = channel_after_two(&t, 1.0).unwrap().weights();
        assert!(close(&q, &[0.68, 0.16, 0.0, 0.16], 1e-15));
        let extreme = JointCollisionTable::new([[0.0; 3], [0.0, 0.5, 0.0], [0.0, 0.0, 0.5]]).unwrap();
        assert_eq!(channel_after_two(&extreme, 1.0).unwrap(), PauliProbabilities::identity());
        let q = channel_after_two(&collision_table(0.0).unwrap(), 0.93).unwrap();
        assert_eq!(q, PauliProbabilities::identity());
    }

    #[test]
    fn system_channel_leaves_ancilla_alone() {
        let st = crate::states::bell_state(0.0, 1.0).unwrap();
        let same = apply_to_system(&st, &PauliProbabilities::identity());
        assert!(same.rho().max_abs_diff(st.rho()) < 1e-15);

        let one = channel_after_one(&collision_table(0.1).unwrap(), 1.0).unwrap();
        let out = apply_to_system(&st, &one);
        assert!((out.concurrence() - 0.6).abs() < 1e-12);
        let anc_before = st.reduced(crate::qmat::Subsystem::Ancilla);
        let anc_after = out.reduced(crate::qmat::Subsystem::Ancilla);
        assert!(anc_before.rho().max_abs_diff(anc_after.rho()) < 1e-15);

        let two = channel_after_two(&collision_table(0.3).unwrap(), 1.0).unwrap();
        assert!((apply_to_system(&st, &two).concurrence() - 0.04).abs() < 1e-12);
    }

    #[test]
    fn bloch_maps() {
        assert_eq!(PauliProbabilities::identity().bloch_map(), BlochAffineMap::identity());
        let eps = 0.15;
        let one = channel_after_one(&collision_table(eps).unwrap(), 1.0).unwrap();
        let d = one.bloch_map().diag();
        assert!(close(&d, &[1.0 - 2.0 * eps, 1.0 - 4.0 * eps, 1.0 - 2.0 * eps], 1e-15));
        assert_eq!(PauliProbabilities::pure(Pauli::X).bloch_map().diag(), [1.0, -1.0, -1.0]);
    }

    #[test]
    fn composition() {
        let b = BlochAffineMap::new([[0.5, 0.1, 0.0], [0.0, 0.3, 0.2], [0.1, 0.0, 0.9]], [0.1, 0.0, -0.2]);
        assert_eq!(compose(&BlochAffineMap::identity(), &b), b);
        let c = compose(&BlochAffineMap::diagonal([2.0, 3.0, 4.0]), &BlochAffineMap::diagonal([0.5, 0.1, -1.0]));
        assert!(close(&c.diag(), &[1.0, 0.3, -4.0], 1e-15));

        let one = channel_after_one(&collision_table(0.1).unwrap(), 1.0).unwrap();
        let prod = JointCollisionTable::uncorrelated(0.1, 0.1).unwrap();
        let two = channel_after_two(&prod, 1.0).unwrap();
        let twice = compose(&one.bloch_map(), &one.bloch_map());
        assert!(linalg3::max_abs_diff(&twice.m, &two.bloch_map().m) < 1e-15);
    }

    #[test]
    fn composition_order_matters_for_non_commuting_maps() {
        let rot = BlochAffineMap::new([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]], [0.0; 3]);
        let squash = BlochAffineMap::diagonal([1.0, 0.5, 1.0]);
        let r = [1.0, 0.0, 0.0];
        // rotate x -> y, then squash y
        let y = compose(&squash, &rot).apply(&r);
        assert!(close(&y, &[0.0, 0.5, 0.0], 1e-15));
        let y = compose(&rot, &squash).apply(&r);
        assert!(close(&y, &[0.0, 1.0, 0.0], 1e-15));
    }

    #[test]
    fn inversion() {
        let inv = invert(&BlochAffineMap::diagonal([0.8, 0.6, 0.8]), DEFAULT_INVERSION_TOL);
        assert!(close(&inv.diag(), &[1.25, 1.0 / 0.6, 1.25], 1e-15));
        assert!(!inv.is_singular());

        let one = channel_after_one(&collision_table(0.25).unwrap(), 1.0).unwrap();
        let inv = invert(&one.bloch_map(), DEFAULT_INVERSION_TOL);
        assert_eq!(inv.singular_axes(), vec![1]);
        assert_eq!(inv.diag()[1], 0.0);

        let inv = invert(&BlochAffineMap::identity(), DEFAULT_INVERSION_TOL);
        assert_eq!(inv, BlochAffineMap::identity());
    }

    #[test]
    fn general_inversion_uses_svd() {
        let m = [[0.9, 0.1, 0.0], [-0.1, 0.5, 0.05], [0.0, 0.02, 0.7]];
        let map = BlochAffineMap::new(m, [0.05, 0.0, -0.02]);
        let inv = invert(&map, DEFAULT_INVERSION_TOL);
        let id = compose(&inv, &map);
        assert!(linalg3::max_abs_diff(&id.m, &linalg3::IDENTITY) < 1e-12);
        assert!(id.t.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn repetition() {
        let ch = PauliProbabilities::new([0.8, 0.1, 0.0, 0.1]).unwrap();
        assert_eq!(repeat_uncorrelated(&ch, 1), ch);
        assert_eq!(repeat_uncorrelated(&ch, 0), PauliProbabilities::identity());
        // independent squares: 𝟙 from II, XX, ZZ; Y from XZ and ZX
        let sq = [0.64 + 0.01 + 0.01, 2.0 * 0.08, 2.0 * 0.01, 2.0 * 0.08];
        assert!(close(&repeat_uncorrelated(&ch, 2).weights(), &sq, 1e-15));
        // the correlated table suppresses the XZ/ZX terms instead
        let correlated = channel_after_two(&collision_table(0.1).unwrap(), 1.0).unwrap();
        assert!(close(&correlated.weights(), &[0.68, 0.16, 0.0, 0.16], 1e-15));
        let x = PauliProbabilities::pure(Pauli::X);
        assert_eq!(repeat_uncorrelated(&x, 2), PauliProbabilities::identity());
    }

    #[test]
    fn intermediate_map_contracts_below_quarter_and_expands_above() {
        for k in 1..50 {
            let eps = k as f64 / 100.0;
            let t = collision_table(eps).unwrap();
            let one = channel_after_one(&t, 1.0).unwrap().bloch_map();
            let two = channel_after_two(&t, 1.0).unwrap().bloch_map();
            let mid = compose(&two, &invert(&one, DEFAULT_INVERSION_TOL));
            let d = mid.diag();
            if eps < 0.25 {
                assert!(d.iter().all(|x| x.abs() <= 1.0), "ε={eps} {d:?}");
            } else if eps > 0.25 {
                assert!(d[0] > 1.0 && d[2] > 1.0, "ε={eps} {d:?}");
            }
        }
        let t = collision_table(0.25).unwrap();
        let one = channel_after_one(&t, 1.0).unwrap().bloch_map();
        let two = channel_after_two(&t, 1.0).unwrap().bloch_map();
        let mid = compose(&two, &invert(&one, DEFAULT_INVERSION_TOL));
        assert!((mid.diag()[0] - 1.0).abs() < 1e-15);
        assert_eq!(mid.diag()[1], 0.0);
    }

    fn arb_channel() -> impl Strategy<Value = PauliProbabilities> {
        proptest::array::uniform4(0.0f64..1.0).prop_map(|w| {
            let s: f64 = w.iter().sum::<f64>().max(1e-9);
            let mut q = w.map(|x| x / s);
            q[0] = 1.0 - q[1] - q[2] - q[3];
            PauliProbabilities::new(q).unwrap_or_else(|_| PauliProbabilities::identity())
        })
    }

    proptest! {
        #[test]
        fn produced_channels_are_probabilities(eps in 0.0f64..=0.5, f in 0.0f64..=1.0) {
            let t = collision_table(eps).unwrap();
            for ch in [channel_after_one(&t, f).unwrap(), channel_after_two(&t, f).unwrap()] {
                let q = ch.weights();
                prop_assert!(q.iter().all(|&x| x >= 0.0));
                prop_assert!((q.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            }
        }

        #[test]
        fn bloch_map_is_a_homomorphism(a in arb_channel(), b in arb_channel()) {
            let lhs = a.then(&b).bloch_map();
            let rhs = compose(&b.bloch_map(), &a.bloch_map());
            prop_assert!(linalg3::max_abs_diff(&lhs.m, &rhs.m) <= 1e-12);
        }

        #[test]
        fn bloch_map_matches_action_on_states(ch in arb_channel(), r in proptest::array::uniform3(-0.57f64..0.57)) {
            let q = QubitState::from_bloch(r).unwrap();
            let out = ch.apply_to_qubit(&q).bloch();
            let predicted = ch.bloch_map().apply(&r);
            prop_assert!(close(&out, &predicted, 1e-12));
        }
    }
}
