//! Varimax rotation with a direct closed-form optimal planar angle.
//!
//! The varimax criterion on squared loadings,
//! `f = sum_l sum_j c_jl^2 - (1/p) sum_l (sum_j c_jl)^2`,
//! is maximized by iterating planar rotations over all dimension
//! pairs. Restricted to one plane the criterion is
//! `f(theta) = f(0) + rho/(4p) * (cos(4 theta - psi) - cos psi)`,
//! with `rho = hypot(a, b)`, `cos psi = b/rho`, `sin psi = a/rho` and
//!
//! ```text
//! u_j = sum_{s in I_j} (a_s1^2 - a_s2^2)      v_j = 2 sum_{s in I_j} a_s1 a_s2
//! a = 2p sum u_j v_j - 2 sum u_j sum v_j
//! b = p sum (u_j^2 - v_j^2) - (sum u_j)^2 + (sum v_j)^2
//! ```
//!
//! so each plane is solved exactly by `theta = psi / 4` instead of a
//! line search. Sweeps repeat until every angle of a pass is below the
//! tolerance.

use crate::data::CategoryMap;
use crate::error::{Error, Result};
use crate::model::{squared_loadings, PcamixModel};
use ndarray::{Array2, ArrayView2};

/// Closed-form quantities of one planar rotation step.
#[derive(Debug, Clone)]
pub struct PlanarCoefficients {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub a: f64,
    pub b: f64,
    /// sqrt(a^2 + b^2), >= 0.
    pub rho: f64,
    /// Angle with cos psi = b/rho and sin psi = a/rho, in [-pi, pi];
    /// 0 when rho = 0.
    pub psi: f64,
    /// Optimal rotation angle psi / 4, in [-pi/4, pi/4].
    pub theta: f64,
}

/// Varimax objective of a loading matrix, normalized by the variable
/// count p. Returns 0 for p = 1 whatever the loadings.
pub fn varimax_objective(a: ArrayView2<f64>, index_sets: &[Vec<usize>], p: usize) -> f64 {
    let c = squared_loadings(a, index_sets).expect("index sets partition the loading rows");
    let mut quartic = 0.0;
    let mut balance = 0.0;
    for col in c.columns() {
        let mut col_sum = 0.0;
        for &v in col {
            quartic += v * v;
            col_sum += v;
        }
        balance += col_sum * col_sum;
    }
    quartic - balance / p as f64
}

/// Planar coefficients of a two-column loading matrix.
///
/// A plane where the criterion is flat (possible on exactly degenerate
/// spectra) leaves `a` and `b` as pure cancellation noise; such planes
/// are detected against the squared mass of the two columns and
/// reported with zero coefficients so the sweep's stopping rule holds.
pub fn planar_coefficients(a: ArrayView2<f64>, index_sets: &[Vec<usize>]) -> PlanarCoefficients {
    assert_eq!(a.ncols(), 2, "planar_coefficients: exactly two columns");
    let p = index_sets.len();
    let mut u = Vec::with_capacity(p);
    let mut v = Vec::with_capacity(p);
    let mut mass = 0.0;
    for set in index_sets {
        let mut uj = 0.0;
        let mut vj = 0.0;
        for &row in set {
            let a1 = a[[row, 0]];
            let a2 = a[[row, 1]];
            uj += a1 * a1 - a2 * a2;
            vj += 2.0 * a1 * a2;
            mass += a1 * a1 + a2 * a2;
        }
        u.push(uj);
        v.push(vj);
    }

    let sum_u: f64 = u.iter().sum();
    let sum_v: f64 = v.iter().sum();
    let sum_uv: f64 = u.iter().zip(&v).map(|(x, y)| x * y).sum();
    let sum_u2_minus_v2: f64 = u.iter().zip(&v).map(|(x, y)| x * x - y * y).sum();

    let pf = p as f64;
    let mut a_coef = 2.0 * pf * sum_uv - 2.0 * sum_u * sum_v;
    let mut b_coef = pf * sum_u2_minus_v2 - sum_u * sum_u + sum_v * sum_v;
    if a_coef.hypot(b_coef) <= 1e-12 * pf * mass * mass {
        a_coef = 0.0;
        b_coef = 0.0;
    }
    let (rho, psi, theta) = angle_from_ab(a_coef, b_coef);

    PlanarCoefficients {
        u,
        v,
        a: a_coef,
        b: b_coef,
        rho,
        psi,
        theta,
    }
}

/// Resolve the optimal angle from the criterion coefficients:
/// `psi = arccos(b/rho)` when `a >= 0`, its negation otherwise, and
/// `theta = psi/4`. A flat plane (`rho = 0`) rotates by zero.
///
/// `a` values within rounding noise of zero take the `a >= 0` branch,
/// so the a = 0, b < 0 boundary (where both quarter turns are optimal)
/// deterministically picks +pi/4.
pub fn angle_from_ab(a: f64, b: f64) -> (f64, f64, f64) {
    let rho = a.hypot(b);
    if rho == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let base = (b / rho).clamp(-1.0, 1.0).acos();
    let psi = if a >= -1e-13 * rho { base } else { -base };
    (rho, psi, psi / 4.0)
}

/// Closed-form planar objective: `f0 + rho/(4p) (cos(4 theta - psi) - cos psi)`.
pub fn objective_closed_form(f0: f64, coeffs: &PlanarCoefficients, theta: f64, p: usize) -> f64 {
    f0 + coeffs.rho / (4.0 * p as f64) * ((4.0 * theta - coeffs.psi).cos() - coeffs.psi.cos())
}

/// Derivative of the planar objective:
/// `(a cos(4 theta) - b sin(4 theta)) / p`, zero at the optimum.
pub fn varimax_derivative(coeffs: &PlanarCoefficients, theta: f64, p: usize) -> f64 {
    (coeffs.a * (4.0 * theta).cos() - coeffs.b * (4.0 * theta).sin()) / p as f64
}

/// One planar rotation applied to the sweep trace.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    /// Zero-based pair of rotated dimensions (l, t), l < t.
    pub pair: (usize, usize),
    pub theta: f64,
    /// Full varimax objective right after this rotation.
    pub objective: f64,
}

/// Result of the iterative rotation.
#[derive(Debug, Clone)]
pub struct RotationResult {
    /// Accumulated orthonormal rotation, k x k.
    pub rotation: Array2<f64>,
    /// Rotated scores X T.
    pub scores: Array2<f64>,
    /// Rotated loadings A T.
    pub loadings: Array2<f64>,
    /// Squared loadings of the rotated solution, p x k.
    pub squared_loadings: Array2<f64>,
    /// Rotated category coordinates, recomputed as per-category score
    /// means, m x k.
    pub category_coords: Array2<f64>,
    pub trace: Vec<SweepRecord>,
    pub converged: bool,
    pub sweeps: usize,
    pub n_quantitative: usize,
}

impl RotationResult {
    /// Variance carried by each rotated dimension (column sums of the
    /// rotated squared loadings). Dimensions are not re-sorted.
    pub fn variance_explained(&self) -> Vec<f64> {
        self.squared_loadings
            .columns()
            .into_iter()
            .map(|c| c.sum())
            .collect()
    }

    pub fn loadings_quantitative(&self) -> ArrayView2<'_, f64> {
        self.loadings.slice(ndarray::s![..self.n_quantitative, ..])
    }
}

/// Iterative varimax rotation of a fitted model. Sweeps run over the
/// pairs (1,2), (1,3), ..., (k-1,k) and stop once every angle of a
/// sweep is below `tol` in magnitude, or after `max_sweeps` passes
/// (reported through `converged`, not an error).
pub fn rotate(model: &PcamixModel, tol: f64, max_sweeps: usize) -> Result<RotationResult> {
    let k = model.k;
    if k < 2 {
        return Err(Error::KTooSmall { k, min: 2 });
    }
    assert!(tol > 0.0, "rotation tolerance must be positive");
    assert!(max_sweeps >= 1, "need at least one sweep");

    let p = model.index_sets.len();
    let mut scores = model.scores.clone();
    let mut loadings = model.loadings.clone();
    let mut rotation = Array2::eye(k);

    let mut trace = Vec::new();
    let mut converged = false;
    let mut sweeps = 0;

    while sweeps < max_sweeps {
        sweeps += 1;
        let mut max_abs_theta = 0.0f64;
        for l in 0..k - 1 {
            for t in (l + 1)..k {
                let pair = two_columns(&loadings, l, t);
                let coeffs = planar_coefficients(pair.view(), &model.index_sets);
                let theta = coeffs.theta;
                max_abs_theta = max_abs_theta.max(theta.abs());
                rotate_columns(&mut loadings, l, t, theta);
                rotate_columns(&mut scores, l, t, theta);
                rotate_columns(&mut rotation, l, t, theta);
                trace.push(SweepRecord {
                    pair: (l, t),
                    theta,
                    objective: varimax_objective(loadings.view(), &model.index_sets, p),
                });
            }
        }
        if max_abs_theta < tol {
            converged = true;
            break;
        }
    }

    let squared = squared_loadings(loadings.view(), &model.index_sets)?;
    let category_coords = barycentric_coordinates(&scores, &model.category_map);

    Ok(RotationResult {
        rotation,
        scores,
        loadings,
        squared_loadings: squared,
        category_coords,
        trace,
        converged,
        sweeps,
        n_quantitative: model.n_quantitative,
    })
}

/// Apply the planar rotation `[[cos, -sin], [sin, cos]]` to two columns.
pub(crate) fn rotate_columns(m: &mut Array2<f64>, col_a: usize, col_b: usize, theta: f64) {
    let (sin, cos) = theta.sin_cos();
    for i in 0..m.nrows() {
        let x = m[[i, col_a]];
        let y = m[[i, col_b]];
        m[[i, col_a]] = cos * x + sin * y;
        m[[i, col_b]] = -sin * x + cos * y;
    }
}

fn two_columns(m: &Array2<f64>, a: usize, b: usize) -> Array2<f64> {
    let mut out = Array2::zeros((m.nrows(), 2));
    for i in 0..m.nrows() {
        out[[i, 0]] = m[[i, a]];
        out[[i, 1]] = m[[i, b]];
    }
    out
}

/// Category coordinates as per-category means of the score rows.
pub fn barycentric_coordinates(scores: &Array2<f64>, map: &CategoryMap) -> Array2<f64> {
    let k = scores.ncols();
    let m = map.total_categories();
    let mut coords = Array2::zeros((m, k));
    let mut offset = 0;
    for vc in &map.per_variable {
        for (row, &cat) in vc.assignments.iter().enumerate() {
            for col in 0..k {
                coords[[offset + cat, col]] += scores[[row, col]];
            }
        }
        for (local, cat) in vc.categories.iter().enumerate() {
            let inv = 1.0 / cat.count as f64;
            for col in 0..k {
                coords[[offset + local, col]] *= inv;
            }
        }
        offset += vc.categories.len();
    }
    coords
}
