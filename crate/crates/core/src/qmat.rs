//! Dense complex matrices of dimension 2 and 4.
//!
//! Everything in this crate lives on one or two qubits, so the matrices are
//! stored as a flat row-major `Vec` and operations are written out directly.
//! The Hermitian eigensolver is a cyclic complex Jacobi iteration, which is
//! deterministic and accurate to a few ulps at these sizes.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Hermiticity tolerance used when a matrix is handed to the eigensolver.
pub const HERMITIAN_TOL: f64 = 1e-10;

const JACOBI_OFF_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 200;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// The four single-qubit Pauli operators, in the order 𝟙, X, Y, Z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    pub const XYZ: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Pauli {
        Self::ALL[i]
    }

    pub fn matrix(self) -> CMatrix {
        let o = re(0.0);
        let l = re(1.0);
        let data = match self {
            Pauli::I => [l, o, o, l],
            Pauli::X => [o, l, l, o],
            Pauli::Y => [o, c(0.0, -1.0), c(0.0, 1.0), o],
            Pauli::Z => [l, o, o, -l],
        };
        CMatrix {
            rows: 2,
            cols: 2,
            data: data.to_vec(),
        }
    }

    /// Group product up to phase. Pauli channels only see the product modulo
    /// phase, since the phase cancels in `P ρ P†`.
    pub fn mul_mod_phase(self, other: Pauli) -> Pauli {
        let bits = |p: Pauli| match p {
            Pauli::I => (0u8, 0u8),
            Pauli::X => (1, 0),
            Pauli::Y => (1, 1),
            Pauli::Z => (0, 1),
        };
        let (ax, az) = bits(self);
        let (bx, bz) = bits(other);
        match (ax ^ bx, az ^ bz) {
            (0, 0) => Pauli::I,
            (1, 0) => Pauli::X,
            (1, 1) => Pauli::Y,
            _ => Pauli::Z,
        }
    }
}

/// Which factor of the ancilla ⊗ system product a reduction keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    Ancilla,
    System,
}

impl Subsystem {
    pub fn from_index(i: usize) -> Result<Subsystem> {
        match i {
            0 => Ok(Subsystem::Ancilla),
            1 => Ok(Subsystem::System),
            other => Err(Error::InvalidSubsystem(other)),
        }
    }
}

#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

fn check_dim(n: usize) -> bool {
    n == 2 || n == 4
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<CMatrix> {
        if !check_dim(rows) || !check_dim(cols) {
            return Err(Error::UnsupportedShape { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{} entries", rows * cols),
                found: format!("{} entries", data.len()),
            });
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<CMatrix> {
        CMatrix::new(rows, cols, data.iter().map(|&x| re(x)).collect())
    }

    pub fn zeros(n: usize) -> CMatrix {
        assert!(check_dim(n), "unsupported dimension {n}");
        CMatrix {
            rows: n,
            cols: n,
            data: vec![re(0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> CMatrix {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = re(1.0);
        }
        m
    }

    pub fn diag(values: &[f64]) -> Result<CMatrix> {
        let n = values.len();
        if !check_dim(n) {
            return Err(Error::UnsupportedShape { rows: n, cols: n });
        }
        let mut m = CMatrix::zeros(n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = re(v);
        }
        Ok(m)
    }

    /// `|v⟩⟨v|` for a column vector of length 2 or 4.
    pub fn outer(v: &[C64]) -> Result<CMatrix> {
        let n = v.len();
        let mut data = Vec::with_capacity(n * n);
        for a in v {
            for b in v {
                data.push(a * b.conj());
            }
        }
        CMatrix::new(n, n, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        self.rows
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> CMatrix {
        self.scale(re(s))
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)].conj());
            }
        }
        CMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Entry-wise complex conjugate in the computational basis.
    pub fn conj(&self) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest element-wise deviation `|A - B|`; `inf` on shape mismatch.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Element-wise `max |A - A†|`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `A ⊗ B` for two 2×2 matrices; `A` acts on the ancilla slot and `B` on
    /// the system slot.
    pub fn tensor(&self, other: &CMatrix) -> Result<CMatrix> {
        for m in [self, other] {
            if m.rows != 2 || m.cols != 2 {
                return Err(Error::DimensionMismatch {
                    expected: "2x2".into(),
                    found: format!("{}x{}", m.rows, m.cols),
                });
            }
        }
        let mut out = CMatrix::zeros(4);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out[(2 * i + k, 2 * j + l)] = self[(i, j)] * other[(k, l)];
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn partial_trace(&self, keep: Subsystem) -> Result<CMatrix> {
        if self.rows != 4 || self.cols != 4 {
            return Err(Error::DimensionMismatch {
                expected: "4x4".into(),
                found: format!("{}x{}", self.rows, self.cols),
            });
        }
        let mut out = CMatrix::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                out[(i, j)] = match keep {
                    Subsystem::Ancilla => self[(2 * i, 2 * j)] + self[(2 * i + 1, 2 * j + 1)],
                    Subsystem::System => self[(i, j)] + self[(2 + i, 2 + j)],
                };
            }
        }
        Ok(out)
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: format!("{} rows", self.cols),
                found: format!("{} rows", other.rows),
            });
        }
        let mut data = vec![re(0.0); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == re(0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        Ok(CMatrix {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    /// `U A U†`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<CMatrix> {
        u.matmul(self)?.matmul(&u.adjoint())
    }

    /// Real part of `Tr(A B)`, the expectation value of `B` in a density
    /// matrix `A` when `B` is Hermitian.
    pub fn expectation(&self, observable: &CMatrix) -> f64 {
        let n = self.rows;
        let mut acc = re(0.0);
        for i in 0..n {
            for k in 0..n {
                acc += self[(i, k)] * observable[(k, i)];
            }
        }
        acc.re
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn hermitian_eigensystem(&self) -> Result<Eigensystem> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: "square matrix".into(),
                found: format!("{}x{}", self.rows, self.cols),
            });
        }
        let dev = self.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        Ok(jacobi_eigensystem(self))
    }

    /// Sum of singular values.
    pub fn trace_norm(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: "square matrix".into(),
                found: format!("{}x{}", self.rows, self.cols),
            });
        }
        if self.hermitian_deviation() <= HERMITIAN_TOL {
            let es = jacobi_eigensystem(self);
            return Ok(es.values.iter().map(|v| v.abs()).sum());
        }
        let gram = self.adjoint().matmul(self)?;
        let es = jacobi_eigensystem(&gram);
        Ok(es.values.iter().map(|v| v.max(0.0).sqrt()).sum())
    }

    /// Apply `f` to the eigenvalues of a Hermitian matrix.
    pub fn hermitian_map(&self, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
        let es = self.hermitian_eigensystem()?;
        Ok(es.reassemble(es.values.iter().map(|&v| f(v))))
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

fn elementwise(a: &CMatrix, b: &CMatrix, op: impl Fn(C64, C64) -> C64) -> CMatrix {
    assert!(
        a.rows == b.rows && a.cols == b.cols,
        "shape mismatch {}x{} vs {}x{}",
        a.rows,
        a.cols,
        b.rows,
        b.cols
    );
    CMatrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(&x, &y)| op(x, y)).collect(),
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        elementwise(self, rhs, |x, y| x + y)
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        elementwise(self, rhs, |x, y| x - y)
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs).expect("inner dimensions must agree")
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigensystem {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// `V diag(values) V†` with replacement eigenvalues.
    pub fn reassemble(&self, values: impl IntoIterator<Item = f64>) -> CMatrix {
        let n = self.vectors.rows;
        let mut out = CMatrix::zeros(n);
        for (k, lam) in values.into_iter().enumerate() {
            if lam == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors[(i, k)] * lam;
                for j in 0..n {
                    out[(i, j)] += vi * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }
}

fn off_diagonal_max(a: &CMatrix) -> f64 {
    let n = a.rows;
    let mut m: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                m = m.max(a[(i, j)].norm());
            }
        }
    }
    m
}

fn jacobi_eigensystem(input: &CMatrix) -> Eigensystem {
    let n = input.rows;
    // Symmetrize so the iteration sees an exactly Hermitian matrix.
    let mut a = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = (input[(i, j)] + input[(j, i)].conj()) * 0.5;
        }
    }
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm().max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_max(&a) <= JACOBI_OFF_TOL * scale {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g <= f64::MIN_POSITIVE {
                    continue;
                }
                // Phase e^{-iφ} on column q makes the pivot real, after which
                // a real Jacobi rotation zeroes it.
                let phase = (apq / g).conj();
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                // J = D·R with D = diag(.., 1_p, .., phase_q, ..) and R the
                // real rotation in the (p, q) plane.
                let jpp = re(cs);
                let jpq = re(sn);
                let jqp = phase * (-sn);
                let jqq = phase * cs;

                // A <- A J
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                }
                // A <- J† A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[(p, q)] = re(0.0);
                a[(q, p)] = re(0.0);
                a[(p, p)] = re(a[(p, p)].re);
                a[(q, q)] = re(a[(q, q)].re);
                // V <- V J
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
            }
        }
    }

    let mut pairs: Vec<(f64, Vec<C64>)> = (0..n)
        .map(|k| (a[(k, k)].re, normalize_phase(v.column(k))))
        .collect();
    pairs.sort_by(|x, y| {
        if (x.0 - y.0).abs() > HERMITIAN_TOL {
            x.0.total_cmp(&y.0)
        } else {
            tie_key(&x.1).cmp(&tie_key(&y.1))
        }
    });

    let mut vectors = CMatrix::zeros(n);
    for (k, (_, vec)) in pairs.iter().enumerate() {
        for i in 0..n {
            vectors[(i, k)] = vec[i];
        }
    }
    Eigensystem {
        values: pairs.iter().map(|p| p.0).collect(),
        vectors,
    }
}

const NONZERO: f64 = 1e-8;

/// Rotate the global phase so the first non-negligible component is real and
/// positive.
fn normalize_phase(mut vec: Vec<C64>) -> Vec<C64> {
    if let Some(first) = vec.iter().find(|z| z.norm() > NONZERO).copied() {
        let ph = (first / first.norm()).conj();
        for z in vec.iter_mut() {
            *z *= ph;
        }
    }
    vec
}

/// Ordering key for degenerate eigenvalues: index of the first non-negligible
/// component, then larger leading magnitude first.
fn tie_key(vec: &[C64]) -> (usize, std::cmp::Reverse<u64>) {
    let idx = vec.iter().position(|z| z.norm() > NONZERO).unwrap_or(vec.len());
    let mag = vec.get(idx).map(|z| z.norm()).unwrap_or(0.0);
    // quantize so round-off does not flip the order
    (idx, std::cmp::Reverse((mag * 1e9).round() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn phi_plus() -> Vec<C64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        vec![re(s), re(0.0), re(0.0), re(s)]
    }

    fn random_hermitian(entries: &[f64]) -> CMatrix {
        // 16 reals -> 4x4 Hermitian
        let mut m = CMatrix::zeros(4);
        let mut it = entries.iter();
        for i in 0..4 {
            m[(i, i)] = re(*it.next().unwrap());
            for j in i + 1..4 {
                let z = c(*it.next().unwrap(), *it.next().unwrap());
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    fn residual(h: &CMatrix, es: &Eigensystem, k: usize) -> f64 {
        let v = es.vector(k);
        let mut r: f64 = 0.0;
        for i in 0..h.rows() {
            let hv: C64 = (0..h.cols()).map(|j| h[(i, j)] * v[j]).sum();
            r += (hv - v[i] * es.values[k]).norm_sqr();
        }
        r.sqrt()
    }

    #[test]
    fn tensor_identity_and_diagonal_paulis() {
        let id = Pauli::I.matrix().tensor(&Pauli::I.matrix()).unwrap();
        assert_eq!(id, CMatrix::identity(4));
        let zz = Pauli::Z.matrix().tensor(&Pauli::Z.matrix()).unwrap();
        assert_eq!(zz, CMatrix::diag(&[1.0, -1.0, -1.0, 1.0]).unwrap());
    }

    #[test]
    fn tensor_xx_is_antidiagonal() {
        let xx = Pauli::X.matrix().tensor(&Pauli::X.matrix()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i + j == 3 { 1.0 } else { 0.0 };
                assert_eq!(xx[(i, j)], re(expected));
            }
        }
    }

    #[test]
    fn tensor_rejects_wrong_shape() {
        let err = CMatrix::identity(4).tensor(&Pauli::X.matrix()).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn unsupported_shapes_rejected() {
        assert!(matches!(
            CMatrix::new(3, 3, vec![re(0.0); 9]),
            Err(Error::UnsupportedShape { .. })
        ));
        assert!(matches!(
            CMatrix::new(2, 2, vec![re(0.0); 3]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn partial_trace_of_product_and_bell() {
        let ra = CMatrix::from_real(2, 2, &[0.7, 0.1, 0.1, 0.3]).unwrap();
        let rb = CMatrix::new(2, 2, vec![re(0.4), c(0.1, 0.2), c(0.1, -0.2), re(0.6)]).unwrap();
        let prod = ra.tensor(&rb).unwrap();
        assert!(prod.partial_trace(Subsystem::Ancilla).unwrap().max_abs_diff(&ra) < 1e-15);
        assert!(prod.partial_trace(Subsystem::System).unwrap().max_abs_diff(&rb) < 1e-15);

        let bell = CMatrix::outer(&phi_plus()).unwrap();
        let half = CMatrix::identity(2).scale_re(0.5);
        assert!(bell.partial_trace(Subsystem::System).unwrap().max_abs_diff(&half) < 1e-15);
    }

    #[test]
    fn subsystem_index_validation() {
        assert_eq!(Subsystem::from_index(0).unwrap(), Subsystem::Ancilla);
        assert_eq!(Subsystem::from_index(1).unwrap(), Subsystem::System);
        assert_eq!(Subsystem::from_index(2), Err(Error::InvalidSubsystem(2)));
    }

    #[test]
    fn eigen_diagonal() {
        let d = CMatrix::diag(&[3.0, 1.0, 4.0, 2.0]).unwrap();
        let es = d.hermitian_eigensystem().unwrap();
        assert_eq!(es.values, vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn eigen_scaled_bell_projector() {
        let h = CMatrix::outer(&phi_plus()).unwrap().scale_re(2.0);
        let es = h.hermitian_eigensystem().unwrap();
        let expected = [0.0, 0.0, 0.0, 2.0];
        for (a, b) in es.values.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{:?}", es.values);
        }
        for k in 0..4 {
            assert!(residual(&h, &es, k) < 1e-12);
        }
    }

    #[test]
    fn eigen_methods_pattern() {
        // h-pattern of the intermediate map at ε = 0.1, F = 1
        let (h1, h2, h3, h4) = (0.925, 0.075, 0.125, 0.725);
        let h = CMatrix::from_real(
            4,
            4,
            &[
                h1, 0.0, 0.0, h4, 0.0, h2, h3, 0.0, 0.0, h3, h2, 0.0, h4, 0.0, 0.0, h1,
            ],
        )
        .unwrap();
        let es = h.hermitian_eigensystem().unwrap();
        for (a, b) in es.values.iter().zip([-0.05, 0.2, 0.2, 1.65]) {
            assert!((a - b).abs() < 1e-12, "{:?}", es.values);
        }
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let m = CMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            m.hermitian_eigensystem(),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn eigen_degenerate_order_is_deterministic() {
        let h = CMatrix::identity(4);
        let es = h.hermitian_eigensystem().unwrap();
        assert_eq!(es.vectors, CMatrix::identity(4));
    }

    #[test]
    fn trace_norm_examples() {
        assert_eq!(CMatrix::zeros(2).trace_norm().unwrap(), 0.0);
        assert!((Pauli::Z.matrix().trace_norm().unwrap() - 2.0).abs() < 1e-15);
        let zero = CMatrix::diag(&[1.0, 0.0]).unwrap();
        let one = CMatrix::diag(&[0.0, 1.0]).unwrap();
        assert!(((&zero - &one).trace_norm().unwrap() - 2.0).abs() < 1e-15);
        // non-Hermitian: |0⟩⟨1| has a single singular value 1
        let m = CMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!((m.trace_norm().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_products() {
        assert_eq!(Pauli::X.mul_mod_phase(Pauli::Z), Pauli::Y);
        assert_eq!(Pauli::X.mul_mod_phase(Pauli::X), Pauli::I);
        assert_eq!(Pauli::Y.mul_mod_phase(Pauli::Z), Pauli::X);
        for a in Pauli::ALL {
            for b in Pauli::ALL {
                let prod = &a.matrix() * &b.matrix();
                let target = a.mul_mod_phase(b).matrix();
                // equal up to a global phase in {±1, ±i}
                let tr = target.adjoint().matmul(&prod).unwrap().trace() / 2.0;
                assert!((tr.norm() - 1.0).abs() < 1e-15);
            }
        }
    }

    proptest! {
        #[test]
        fn eigen_residuals_and_trace(entries in proptest::collection::vec(-1.0f64..1.0, 16)) {
            let h = random_hermitian(&entries);
            let es = h.hermitian_eigensystem().unwrap();
            for k in 0..4 {
                prop_assert!(residual(&h, &es, k) <= 1e-10);
            }
            for w in es.values.windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
            let gram = es.vectors.adjoint().matmul(&es.vectors).unwrap();
            prop_assert!(gram.max_abs_diff(&CMatrix::identity(4)) <= 1e-10);
            let sum: f64 = es.values.iter().sum();
            prop_assert!((sum - h.trace().re).abs() <= 1e-10);
        }

        #[test]
        fn partial_trace_preserves_trace_and_is_linear(
            e1 in proptest::collection::vec(-1.0f64..1.0, 16),
            e2 in proptest::collection::vec(-1.0f64..1.0, 16),
            alpha in -2.0f64..2.0,
            beta in -2.0f64..2.0,
        ) {
            let a = random_hermitian(&e1);
            let b = random_hermitian(&e2);
            for keep in [Subsystem::Ancilla, Subsystem::System] {
                let pa = a.partial_trace(keep).unwrap();
                prop_assert!((pa.trace() - a.trace()).norm() <= 1e-12);
                let mix = &a.scale_re(alpha) + &b.scale_re(beta);
                let lhs = mix.partial_trace(keep).unwrap();
                let rhs = &pa.scale_re(alpha) + &b.partial_trace(keep).unwrap().scale_re(beta);
                prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
            }
        }

        #[test]
        fn tensor_trace_is_multiplicative(
            x in proptest::collection::vec(-1.0f64..1.0, 8),
            y in proptest::collection::vec(-1.0f64..1.0, 8),
            s in -2.0f64..2.0,
        ) {
            let to2 = |v: &[f64]| CMatrix::new(2, 2, v.chunks(2).map(|p| c(p[0], p[1])).collect()).unwrap();
            let a = to2(&x);
            let b = to2(&y);
            let t = a.tensor(&b).unwrap();
            prop_assert!((t.trace() - a.trace() * b.trace()).norm() <= 1e-12);
            // bilinearity in the first slot
            let lhs = a.scale_re(s).tensor(&b).unwrap();
            prop_assert!(lhs.max_abs_diff(&t.scale_re(s)) <= 1e-12);
        }
    }
}
