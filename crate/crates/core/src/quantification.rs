//! The original quantification-matrix formulation.
//!
//! For each variable j an n x n matrix S_j is built: `z z' / n` for a
//! standardized quantitative column and `J G D^{-1} G' J` (counts in D,
//! J the centering operator) for a qualitative one. Component scores
//! come from the eigendecomposition of `S = sum_j S_j` and squared
//! loadings from the quadratic forms `x' S_j x / n`; the varimax angle
//! of a plane derives from the 2 x 2 matrices `E_j = p X'S_j X - n G`.
//!
//! It reproduces the SVD route exactly but costs Theta(p n^2) memory
//! and is kept as an independent check and as the slow baseline of the
//! timing harness.

use crate::data::{ColumnKind, MixedTable};
use crate::error::{Error, Result};
use crate::linalg::{effective_rank, sym_eigen, GRAM_RANK_REL_TOL};
use crate::rotation::{angle_from_ab, rotate_columns};
use ndarray::{s, Array2, ArrayView2};

/// The per-variable quantification matrices and their sum.
#[derive(Debug, Clone)]
pub struct QuantificationSet {
    s_list: Vec<Array2<f64>>,
    s: Array2<f64>,
    n_rows: usize,
}

impl QuantificationSet {
    pub fn s_list(&self) -> &[Array2<f64>] {
        &self.s_list
    }

    pub fn s(&self) -> &Array2<f64> {
        &self.s
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_variables(&self) -> usize {
        self.s_list.len()
    }
}

/// Build the quantification matrices of a table.
pub fn build_quantification(table: &MixedTable) -> Result<QuantificationSet> {
    let n = table.n_rows();
    let mut s_list = Vec::with_capacity(table.n_variables());
    let mut s = Array2::zeros((n, n));

    for col in table.columns() {
        let s_j = match &col.kind {
            ColumnKind::Quantitative(values) => {
                let z = crate::data::standardize(&col.name, values)?;
                let mut m = Array2::zeros((n, n));
                let inv_n = 1.0 / n as f64;
                for i in 0..n {
                    for j in 0..n {
                        m[[i, j]] = z[i] * z[j] * inv_n;
                    }
                }
                m
            }
            ColumnKind::Qualitative(labels) => {
                let g = crate::data::indicator_matrix(&col.name, labels)?;
                // Centered indicator columns, one outer product per
                // category weighted by the inverse count.
                let mut m = Array2::zeros((n, n));
                for cat in 0..g.ncols() {
                    let count: f64 = g.column(cat).sum();
                    let freq = count / n as f64;
                    let centered: Vec<f64> =
                        g.column(cat).iter().map(|&v| v - freq).collect();
                    let w = 1.0 / count;
                    for i in 0..n {
                        let ci = centered[i] * w;
                        for j in 0..n {
                            m[[i, j]] += ci * centered[j];
                        }
                    }
                }
                m
            }
        };
        s += &s_j;
        s_list.push(s_j);
    }

    Ok(QuantificationSet {
        s_list,
        s,
        n_rows: n,
    })
}

/// Scores, component variances and squared loadings from the
/// eigendecomposition of S.
#[derive(Debug, Clone)]
pub struct OriginalFit {
    /// Standardized component scores, n x k, X'X = n I.
    pub scores: Array2<f64>,
    /// Component variances: the k leading eigenvalues of S.
    pub variances: Vec<f64>,
    /// Squared loadings, p x k, `c_jl = x_l' S_j x_l / n`.
    pub squared_loadings: Array2<f64>,
}

pub fn fit_original(qs: &QuantificationSet, k: usize) -> Result<OriginalFit> {
    if k == 0 {
        return Err(Error::KTooSmall { k, min: 1 });
    }
    let eig = sym_eigen(qs.s.view());
    let rank = effective_rank(&eig.values, GRAM_RANK_REL_TOL);
    if rank == 0 {
        return Err(Error::DegenerateInput);
    }
    if k > rank {
        return Err(Error::KTooLarge { k, rank });
    }

    let n = qs.n_rows;
    let sqrt_n = (n as f64).sqrt();
    let mut scores = eig.vectors.slice(s![.., ..k]).to_owned();
    scores.mapv_inplace(|x| x * sqrt_n);
    for mut col in scores.columns_mut() {
        let mut best = 0;
        let mut best_abs = -1.0;
        for (i, &v) in col.iter().enumerate() {
            if v.abs() > best_abs {
                best_abs = v.abs();
                best = i;
            }
        }
        if col[best] < 0.0 {
            col.mapv_inplace(|x| -x);
        }
    }

    let variances = eig.values[..k].to_vec();
    let squared_loadings = squared_loadings_from_scores(&scores.view(), qs);

    Ok(OriginalFit {
        scores,
        variances,
        squared_loadings,
    })
}

/// `c_jl = x_l' S_j x_l / n` for every variable and score column.
pub fn squared_loadings_from_scores(
    scores: &ArrayView2<f64>,
    qs: &QuantificationSet,
) -> Array2<f64> {
    let k = scores.ncols();
    let n = qs.n_rows as f64;
    let mut c = Array2::zeros((qs.n_variables(), k));
    for (j, s_j) in qs.s_list.iter().enumerate() {
        for l in 0..k {
            let x = scores.column(l);
            let sx = s_j.dot(&x);
            c[[j, l]] = x.dot(&sx) / n;
        }
    }
    c
}

/// Varimax coefficients (a, b) of one plane from the matrix
/// reformulation: with `E_j = p X'S_j X - n G` on the two selected
/// score columns (G the corresponding 2 x 2 block of the rotated
/// eigenvalue matrix),
/// `a = 4 sum e12 (e11 - e22)` and
/// `b = sum (e11 - e22)^2 - 4 sum e12^2`.
///
/// The ratio a/b — hence the optimal angle — matches the coefficients
/// of [`crate::rotation::planar_coefficients`] up to a common positive
/// factor.
pub fn reformulation_coefficients(
    x_pair: ArrayView2<f64>,
    qs: &QuantificationSet,
    gamma_pair: &Array2<f64>,
    p: usize,
) -> (f64, f64) {
    assert_eq!(x_pair.ncols(), 2, "scores restricted to one pair");
    assert_eq!(gamma_pair.dim(), (2, 2));
    let n = qs.n_rows as f64;
    let pf = p as f64;
    let x1 = x_pair.column(0);
    let x2 = x_pair.column(1);

    let mut a = 0.0;
    let mut b = 0.0;
    let mut scale = 0.0;
    for s_j in &qs.s_list {
        let w1 = s_j.dot(&x1);
        let w2 = s_j.dot(&x2);
        let m11 = x1.dot(&w1);
        let m22 = x2.dot(&w2);
        let m12 = x1.dot(&w2);
        let e11 = pf * m11 - n * gamma_pair[[0, 0]];
        let e22 = pf * m22 - n * gamma_pair[[1, 1]];
        let e12 = pf * m12 - n * gamma_pair[[0, 1]];
        let d = e11 - e22;
        a += 4.0 * e12 * d;
        b += d * d - 4.0 * e12 * e12;
        let mag = pf * (m11.abs() + m22.abs() + 2.0 * m12.abs())
            + n * (gamma_pair[[0, 0]].abs()
                + gamma_pair[[1, 1]].abs()
                + 2.0 * gamma_pair[[0, 1]].abs());
        scale += mag * mag;
    }
    // A flat plane (every E_j ~ 0, e.g. a single-variable problem)
    // leaves a and b as pure cancellation noise; report it as flat
    // rather than deriving an angle from rounding errors.
    if a.hypot(b) <= 1e-10 * scale {
        return (0.0, 0.0);
    }
    (a, b)
}

/// Trace form of the varimax criterion:
/// `p^{-2} sum_j Trace(T'E_j T Diag(T'E_j T))` with E_j built from the
/// unrotated scores. A positive affine image of the squared-loading
/// criterion, so both rank candidate rotations identically.
pub fn reformulation_objective(
    scores: ArrayView2<f64>,
    qs: &QuantificationSet,
    gamma: &[f64],
    rotation: &Array2<f64>,
    p: usize,
) -> f64 {
    let k = scores.ncols();
    assert_eq!(gamma.len(), k);
    let n = qs.n_rows as f64;
    let pf = p as f64;

    let mut total = 0.0;
    for s_j in &qs.s_list {
        let sx = s_j.dot(&scores);
        let mut e = scores.t().dot(&sx);
        e.mapv_inplace(|x| x * pf);
        for l in 0..k {
            e[[l, l]] -= n * gamma[l];
        }
        let rotated = rotation.t().dot(&e).dot(rotation);
        for l in 0..k {
            total += rotated[[l, l]] * rotated[[l, l]];
        }
    }
    total / (pf * pf)
}

/// Rotated solution of the matrix-reformulation path.
#[derive(Debug, Clone)]
pub struct OriginalRotation {
    pub scores: Array2<f64>,
    pub squared_loadings: Array2<f64>,
    pub variances: Vec<f64>,
    pub converged: bool,
    pub sweeps: usize,
}

/// Iterative pairwise rotation driven by the reformulation
/// coefficients. Per pair step the E_j blocks are rebuilt from the
/// current scores through the stored S_j matrices, which is what makes
/// this path expensive; the rotated eigenvalue matrix is tracked so the
/// E_j stay those of the rotated problem.
pub fn rotate_original(
    fit: &OriginalFit,
    qs: &QuantificationSet,
    tol: f64,
    max_sweeps: usize,
) -> OriginalRotation {
    let k = fit.scores.ncols();
    assert!(k >= 2, "rotation needs at least two dimensions");
    let p = qs.n_variables();

    let mut scores = fit.scores.clone();
    let mut gamma = Array2::zeros((k, k));
    for (l, &v) in fit.variances.iter().enumerate() {
        gamma[[l, l]] = v;
    }

    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < max_sweeps {
        sweeps += 1;
        let mut max_abs_theta = 0.0f64;
        for l in 0..k - 1 {
            for t in (l + 1)..k {
                let x_pair = pair_columns(&scores, l, t);
                let gamma_pair = ndarray::arr2(&[
                    [gamma[[l, l]], gamma[[l, t]]],
                    [gamma[[t, l]], gamma[[t, t]]],
                ]);
                let (a, b) = reformulation_coefficients(x_pair.view(), qs, &gamma_pair, p);
                let (_, _, theta) = angle_from_ab(a, b);
                max_abs_theta = max_abs_theta.max(theta.abs());
                rotate_columns(&mut scores, l, t, theta);
                rotate_gamma(&mut gamma, l, t, theta);
            }
        }
        if max_abs_theta < tol {
            converged = true;
            break;
        }
    }

    let squared_loadings = squared_loadings_from_scores(&scores.view(), qs);
    let variances = (0..k).map(|l| gamma[[l, l]]).collect();
    OriginalRotation {
        scores,
        squared_loadings,
        variances,
        converged,
        sweeps,
    }
}

fn pair_columns(m: &Array2<f64>, a: usize, b: usize) -> Array2<f64> {
    let mut out = Array2::zeros((m.nrows(), 2));
    for i in 0..m.nrows() {
        out[[i, 0]] = m[[i, a]];
        out[[i, 1]] = m[[i, b]];
    }
    out
}

/// Two-sided update G <- R' G R on the (l, t) plane.
fn rotate_gamma(gamma: &mut Array2<f64>, l: usize, t: usize, theta: f64) {
    rotate_columns(gamma, l, t, theta);
    let (sin, cos) = theta.sin_cos();
    let k = gamma.ncols();
    for j in 0..k {
        let x = gamma[[l, j]];
        let y = gamma[[t, j]];
        gamma[[l, j]] = cos * x + sin * y;
        gamma[[t, j]] = -sin * x + cos * y;
    }
}

/// Per-variable memory the quantification route materializes, in
/// bytes: p + 1 dense n x n matrices of f64.
pub fn quantification_bytes(n: usize, p: usize) -> usize {
    (p + 1) * n * n * 8
}
