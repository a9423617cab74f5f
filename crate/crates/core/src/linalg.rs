//! Dense symmetric eigendecomposition (cyclic Jacobi) and a thin SVD
//! built on it through the smaller Gram matrix.

use ndarray::{Array2, ArrayView2};

/// Eigenpairs of a symmetric matrix, eigenvalues in weakly descending
/// order, eigenvectors as orthonormal columns.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Array2<f64>,
}

const MAX_JACOBI_SWEEPS: usize = 64;

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Sweeps annihilate off-diagonal entries pairwise until the
/// off-diagonal Frobenius mass falls below 1e-14 of the matrix norm.
pub fn sym_eigen(m: ArrayView2<f64>) -> SymEigen {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "sym_eigen: matrix must be square");
    if n == 0 {
        return SymEigen {
            values: Vec::new(),
            vectors: Array2::zeros((0, 0)),
        };
    }

    // Flat row-major buffers; ndarray indexing is too slow in the sweep.
    let mut a: Vec<f64> = m.iter().copied().collect();
    let mut v = vec![0.0f64; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let fro: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = 1e-14 * fro;

    if fro > 0.0 {
        for _ in 0..MAX_JACOBI_SWEEPS {
            let mut off = 0.0f64;
            for i in 0..n {
                for j in (i + 1)..n {
                    off += a[i * n + j] * a[i * n + j];
                }
            }
            if (2.0 * off).sqrt() <= target {
                break;
            }
            for p in 0..n - 1 {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq == 0.0 {
                        continue;
                    }
                    let app = a[p * n + p];
                    let aqq = a[q * n + q];
                    if apq.abs() <= 1e-17 * (app.abs() + aqq.abs()) {
                        a[p * n + q] = 0.0;
                        a[q * n + p] = 0.0;
                        continue;
                    }
                    let tau = (aqq - app) / (2.0 * apq);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        1.0 / (tau - (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;

                    // A <- J' A J with J the planar rotation in (p, q).
                    for i in 0..n {
                        let aip = a[i * n + p];
                        let aiq = a[i * n + q];
                        a[i * n + p] = c * aip - s * aiq;
                        a[i * n + q] = s * aip + c * aiq;
                    }
                    for j in 0..n {
                        let apj = a[p * n + j];
                        let aqj = a[q * n + j];
                        a[p * n + j] = c * apj - s * aqj;
                        a[q * n + j] = s * apj + c * aqj;
                    }
                    for i in 0..n {
                        let vip = v[i * n + p];
                        let viq = v[i * n + q];
                        v[i * n + p] = c * vip - s * viq;
                        v[i * n + q] = s * vip + c * viq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[j * n + j]
            .partial_cmp(&a[i * n + i])
            .expect("eigenvalues are finite")
    });

    let values: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let mut vectors = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[[i, dst]] = v[i * n + src];
        }
    }
    SymEigen { values, vectors }
}

/// Thin singular value decomposition `Z = U diag(s) V'`.
#[derive(Debug, Clone)]
pub struct ThinSvd {
    /// Nonzero singular values, weakly descending; length = rank.
    pub singular_values: Vec<f64>,
    /// Left singular vectors, n x rank.
    pub u: Array2<f64>,
    /// Right singular vectors, (columns of Z) x rank.
    pub v: Array2<f64>,
}

/// Relative cutoff on Gram eigenvalues below which a component counts
/// as rank-deficient. The Gram product carries rounding of order
/// dim * eps relative to its largest eigenvalue, so cutting on the
/// singular values themselves would be below the noise floor.
pub const GRAM_RANK_REL_TOL: f64 = 1e-11;

/// Thin SVD through the eigendecomposition of the smaller Gram matrix
/// (`Z'Z` when Z is tall, `ZZ'` when Z is wide); the other factor is
/// recovered by one multiplication with Z.
pub fn thin_svd(z: ArrayView2<f64>, gram_rel_tol: f64) -> ThinSvd {
    let (n, d) = z.dim();
    if n == 0 || d == 0 {
        return ThinSvd {
            singular_values: Vec::new(),
            u: Array2::zeros((n, 0)),
            v: Array2::zeros((d, 0)),
        };
    }

    if d <= n {
        let mut gram = z.t().dot(&z);
        symmetrize(&mut gram);
        let eig = sym_eigen(gram.view());
        let rank = effective_rank(&eig.values, gram_rel_tol);
        let singular_values: Vec<f64> =
            eig.values[..rank].iter().map(|&e| e.max(0.0).sqrt()).collect();
        let v = eig.vectors.slice(ndarray::s![.., ..rank]).to_owned();
        let mut u = z.dot(&v);
        scale_columns_inv(&mut u, &singular_values);
        ThinSvd {
            singular_values,
            u,
            v,
        }
    } else {
        let mut gram = z.dot(&z.t());
        symmetrize(&mut gram);
        let eig = sym_eigen(gram.view());
        let rank = effective_rank(&eig.values, gram_rel_tol);
        let singular_values: Vec<f64> =
            eig.values[..rank].iter().map(|&e| e.max(0.0).sqrt()).collect();
        let u = eig.vectors.slice(ndarray::s![.., ..rank]).to_owned();
        let mut v = z.t().dot(&u);
        scale_columns_inv(&mut v, &singular_values);
        ThinSvd {
            singular_values,
            u,
            v,
        }
    }
}

fn symmetrize(m: &mut Array2<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[[i, j]] + m[[j, i]]);
            m[[i, j]] = avg;
            m[[j, i]] = avg;
        }
    }
}

/// Number of eigenvalues above `rel_tol` times the largest one.
pub fn effective_rank(values_desc: &[f64], rel_tol: f64) -> usize {
    match values_desc.first() {
        Some(&max) if max > 0.0 => values_desc
            .iter()
            .take_while(|&&e| e > rel_tol * max)
            .count(),
        _ => 0,
    }
}

fn scale_columns_inv(m: &mut Array2<f64>, scales: &[f64]) {
    for (j, &s) in scales.iter().enumerate() {
        if s > 0.0 {
            m.column_mut(j).mapv_inplace(|x| x / s);
        }
    }
}
