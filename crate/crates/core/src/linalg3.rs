//! Real 3×3 helpers for Bloch-space maps.

pub type Mat3 = [[f64; 3]; 3];
pub type Vec3 = [f64; 3];

pub const IDENTITY: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

pub fn matmul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn matvec(a: &Mat3, v: &Vec3) -> Vec3 {
    [0, 1, 2].map(|i| (0..3).map(|k| a[i][k] * v[k]).sum())
}

pub fn transpose(a: &Mat3) -> Mat3 {
    [0, 1, 2].map(|i| [0, 1, 2].map(|j| a[j][i]))
}

pub fn is_diagonal(a: &Mat3) -> bool {
    (0..3).all(|i| (0..3).all(|j| i == j || a[i][j] == 0.0))
}

#[cfg(test)]
pub fn max_abs_diff(a: &Mat3, b: &Mat3) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            m = m.max((a[i][j] - b[i][j]).abs());
        }
    }
    m
}

/// Thin SVD `A = U Σ Vᵀ` by one-sided Jacobi rotations on the columns of `A`.
/// Singular values are returned in descending order.
pub struct Svd {
    pub u: Mat3,
    pub sigma: Vec3,
    pub v: Mat3,
}

pub fn svd(a: &Mat3) -> Svd {
    // work on columns: w = A V
    let mut w = *a;
    let mut v = IDENTITY;
    for _ in 0..100 {
        let mut rotated = false;
        for p in 0..2 {
            for q in p + 1..3 {
                let alpha: f64 = (0..3).map(|i| w[i][p] * w[i][p]).sum();
                let beta: f64 = (0..3).map(|i| w[i][q] * w[i][q]).sum();
                let gamma: f64 = (0..3).map(|i| w[i][p] * w[i][q]).sum();
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for row in w.iter_mut().chain(v.iter_mut()) {
                    let (xp, xq) = (row[p], row[q]);
                    row[p] = cs * xp - sn * xq;
                    row[q] = sn * xp + cs * xq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order = [0usize, 1, 2];
    let norms: Vec3 = [0, 1, 2].map(|j| (0..3).map(|i| w[i][j] * w[i][j]).sum::<f64>().sqrt());
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));

    let mut u = [[0.0; 3]; 3];
    let mut vs = [[0.0; 3]; 3];
    let mut sigma = [0.0; 3];
    for (k, &j) in order.iter().enumerate() {
        sigma[k] = norms[j];
        for i in 0..3 {
            vs[i][k] = v[i][j];
            u[i][k] = if norms[j] > 0.0 { w[i][j] / norms[j] } else { 0.0 };
        }
    }
    Svd { u, sigma, v: vs }
}

/// Moore–Penrose pseudo-inverse, dropping singular values `≤ tol`. Returns the
/// inverse and the right-singular directions that were dropped.
pub fn pseudo_inverse(a: &Mat3, tol: f64) -> (Mat3, Vec<Vec3>) {
    let Svd { u, sigma, v } = svd(a);
    let mut out = [[0.0; 3]; 3];
    let mut dropped = Vec::new();
    for k in 0..3 {
        if sigma[k] <= tol {
            dropped.push([v[0][k], v[1][k], v[2][k]]);
            continue;
        }
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] += v[i][k] * u[j][k] / sigma[k];
            }
        }
    }
    (out, dropped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn svd_reconstructs(entries in proptest::array::uniform9(-2.0f64..2.0)) {
            let a: Mat3 = [
                [entries[0], entries[1], entries[2]],
                [entries[3], entries[4], entries[5]],
                [entries[6], entries[7], entries[8]],
            ];
            let Svd { u, sigma, v } = svd(&a);
            let mut back = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    back[i][j] = (0..3).map(|k| u[i][k] * sigma[k] * v[j][k]).sum();
                }
            }
            prop_assert!(max_abs_diff(&a, &back) < 1e-12);
            prop_assert!(sigma[0] >= sigma[1] && sigma[1] >= sigma[2]);
            let vtv = matmul(&transpose(&v), &v);
            prop_assert!(max_abs_diff(&vtv, &IDENTITY) < 1e-12);
        }
    }

    #[test]
    fn pseudo_inverse_of_rank_two() {
        let a = [[2.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 4.0]];
        let (p, dropped) = pseudo_inverse(&a, 1e-9);
        assert!(max_abs_diff(&p, &[[0.5, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.25]]) < 1e-15);
        assert_eq!(dropped.len(), 1);
        assert!((dropped[0][1].abs() - 1.0).abs() < 1e-15);
    }
}
