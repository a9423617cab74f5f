//! Factorization of the recoded matrix into component scores, loadings,
//! squared loadings and category principal coordinates.
//!
//! With `Z = U diag(lambda) V'`, the standardized component scores are
//! `X = sqrt(n) U_k` and the loading matrix is `A = V_k diag(lambda_k)`.
//! The first p1 rows of A are the correlations between the quantitative
//! variables and the components; summing squared entries of A over the
//! column group of each variable gives the squared loadings C (squared
//! correlations for quantitative variables, correlation ratios for
//! qualitative ones). Category principal coordinates are the rows of A
//! in the qualitative block scaled by `1/sqrt(freq)`, which equals the
//! mean score of the observations in the category.

use crate::data::{CategoryMap, RecodedMatrix};
use crate::error::{Error, Result};
use crate::linalg::{thin_svd, GRAM_RANK_REL_TOL};
use ndarray::{s, Array2, ArrayView2};

/// A fitted PCAMIX model with k retained dimensions.
#[derive(Debug, Clone)]
pub struct PcamixModel {
    pub k: usize,
    pub n_rows: usize,
    /// Effective rank of the recoded matrix.
    pub rank: usize,
    /// Standardized component scores X, n x k, with X'X = n I.
    pub scores: Array2<f64>,
    /// Singular values of Z for the retained dimensions.
    pub singular_values: Vec<f64>,
    /// Loading matrix A, (p1 + m) x k.
    pub loadings: Array2<f64>,
    /// Squared loadings C, p x k, rows in table variable order.
    pub squared_loadings: Array2<f64>,
    /// Principal coordinates of the m categories, m x k.
    pub category_coords: Array2<f64>,
    pub index_sets: Vec<Vec<usize>>,
    pub category_map: CategoryMap,
    pub variable_names: Vec<String>,
    pub variable_is_quant: Vec<bool>,
    pub n_quantitative: usize,
}

impl PcamixModel {
    /// Loadings of the quantitative variables (block A1): correlations
    /// between the variables and the components, in [-1, 1].
    pub fn loadings_quantitative(&self) -> ArrayView2<'_, f64> {
        self.loadings.slice(s![..self.n_quantitative, ..])
    }

    /// Loading rows of the categories (block A2).
    pub fn loadings_categories(&self) -> ArrayView2<'_, f64> {
        self.loadings.slice(s![self.n_quantitative.., ..])
    }

    /// Variance carried by each dimension: the squared singular values,
    /// each equal to the column sum of the squared loadings.
    pub fn variance_explained(&self) -> Vec<f64> {
        self.singular_values.iter().map(|s| s * s).collect()
    }
}

/// Fit a PCAMIX model with k dimensions, 1 <= k <= rank(Z).
pub fn fit(recoded: &RecodedMatrix, k: usize) -> Result<PcamixModel> {
    if k == 0 {
        return Err(Error::KTooSmall { k, min: 1 });
    }
    let svd = thin_svd(recoded.z().view(), GRAM_RANK_REL_TOL);
    let rank = svd.singular_values.len();
    if rank == 0 {
        return Err(Error::DegenerateInput);
    }
    if k > rank {
        return Err(Error::KTooLarge { k, rank });
    }

    let n = recoded.n_rows();
    let sqrt_n = (n as f64).sqrt();
    let mut scores = svd.u.slice(s![.., ..k]).to_owned();
    scores.mapv_inplace(|x| x * sqrt_n);

    let singular_values: Vec<f64> = svd.singular_values[..k].to_vec();
    let mut loadings = svd.v.slice(s![.., ..k]).to_owned();
    for (col, &sv) in singular_values.iter().enumerate() {
        loadings.column_mut(col).mapv_inplace(|x| x * sv);
    }

    fix_signs(&mut loadings, &mut scores);

    let squared = squared_loadings(loadings.view(), recoded.index_sets())?;
    let category_coords = category_coordinates(&loadings, recoded);

    Ok(PcamixModel {
        k,
        n_rows: n,
        rank,
        scores,
        singular_values,
        loadings,
        squared_loadings: squared,
        category_coords,
        index_sets: recoded.index_sets().to_vec(),
        category_map: recoded.category_map().clone(),
        variable_names: recoded.variable_names().to_vec(),
        variable_is_quant: recoded.variable_is_quant().to_vec(),
        n_quantitative: recoded.n_quantitative(),
    })
}

/// Squared loadings from a loading matrix: for each variable j, the sum
/// of squared entries of A over its rows `I_j`.
pub fn squared_loadings(a: ArrayView2<f64>, index_sets: &[Vec<usize>]) -> Result<Array2<f64>> {
    let rows = a.nrows();
    let mut seen = vec![false; rows];
    for set in index_sets {
        for &idx in set {
            if idx >= rows || seen[idx] {
                return Err(Error::IndexSetMismatch { expected: rows });
            }
            seen[idx] = true;
        }
    }
    if seen.iter().any(|&s| !s) {
        return Err(Error::IndexSetMismatch { expected: rows });
    }

    let k = a.ncols();
    let mut c = Array2::zeros((index_sets.len(), k));
    for (j, set) in index_sets.iter().enumerate() {
        for &row in set {
            for col in 0..k {
                c[[j, col]] += a[[row, col]] * a[[row, col]];
            }
        }
    }
    Ok(c)
}

/// Principal coordinates of the categories: row s of A2 scaled by
/// `1/sqrt(freq_s)`. Equal, by construction, to the mean of the score
/// rows of the observations in the category.
fn category_coordinates(loadings: &Array2<f64>, recoded: &RecodedMatrix) -> Array2<f64> {
    let m = recoded.category_map().total_categories();
    let k = loadings.ncols();
    let p1 = recoded.n_quantitative();
    let mut coords = Array2::zeros((m, k));
    for (row, (_, cat)) in recoded.category_map().flat_categories().enumerate() {
        let scale = 1.0 / cat.freq.sqrt();
        for col in 0..k {
            coords[[row, col]] = loadings[[p1 + row, col]] * scale;
        }
    }
    coords
}

/// Deterministic sign convention: in every dimension the loading entry
/// of largest magnitude is made positive (first index wins ties), and
/// the score column is flipped alongside.
fn fix_signs(loadings: &mut Array2<f64>, scores: &mut Array2<f64>) {
    for col in 0..loadings.ncols() {
        let mut best = 0usize;
        let mut best_abs = -1.0;
        for (row, &v) in loadings.column(col).iter().enumerate() {
            if v.abs() > best_abs {
                best_abs = v.abs();
                best = row;
            }
        }
        if loadings[[best, col]] < 0.0 {
            loadings.column_mut(col).mapv_inplace(|x| -x);
            scores.column_mut(col).mapv_inplace(|x| -x);
        }
    }
}
