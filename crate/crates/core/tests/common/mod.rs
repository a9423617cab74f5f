//! Helpers shared by the integration suites: deterministic random
//! inputs and brute-force reference computations kept independent of
//! the library's own code paths.

#![allow(dead_code)]

use ndarray::{Array2, ArrayView1};
use pcamix::{Column, ColumnKind, MixedTable};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Random mixed table with the requested column counts. Qualitative
/// columns draw from 2..=4 categories and always end up with at least
/// two distinct labels.
pub fn random_mixed_table(
    rng: &mut ChaCha8Rng,
    n: usize,
    n_quant: usize,
    n_qual: usize,
) -> MixedTable {
    let mut columns = Vec::with_capacity(n_quant + n_qual);
    for j in 0..n_quant {
        let values: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        columns.push(Column::quantitative(format!("q{j}"), values));
    }
    for j in 0..n_qual {
        let n_cats = rng.random_range(2..=4usize);
        let mut labels: Vec<String> = (0..n)
            .map(|_| format!("c{}", rng.random_range(0..n_cats)))
            .collect();
        labels[0] = "c0".to_string();
        labels[1] = "c1".to_string();
        columns.push(Column::qualitative(format!("g{j}"), labels));
    }
    MixedTable::new(columns).expect("generated table is valid")
}

/// Random loading matrix over a random mix of singleton and multi-row
/// index sets; returns (A, index sets, p).
pub fn random_loadings(
    rng: &mut ChaCha8Rng,
    p: usize,
    k: usize,
) -> (Array2<f64>, Vec<Vec<usize>>) {
    let mut index_sets = Vec::with_capacity(p);
    let mut row = 0;
    for _ in 0..p {
        let rows = if rng.random_bool(0.5) {
            1
        } else {
            rng.random_range(2..=4usize)
        };
        index_sets.push((row..row + rows).collect());
        row += rows;
    }
    let mut a = Array2::zeros((row, k));
    for v in a.iter_mut() {
        let g: f64 = StandardNormal.sample(rng);
        *v = 0.6 * g;
    }
    (a, index_sets)
}

/// Planar rotation of the two columns of a matrix, written from the
/// definition so it stays independent of the library path under test.
pub fn rotate_pair(a: &Array2<f64>, theta: f64) -> Array2<f64> {
    assert_eq!(a.ncols(), 2);
    let (sin, cos) = theta.sin_cos();
    let mut out = a.clone();
    for i in 0..a.nrows() {
        out[[i, 0]] = cos * a[[i, 0]] + sin * a[[i, 1]];
        out[[i, 1]] = -sin * a[[i, 0]] + cos * a[[i, 1]];
    }
    out
}

/// Varimax criterion computed from its definition: squared loadings by
/// summing squares over the index sets, then the quartic-minus-balance
/// form normalized by p.
pub fn direct_objective(a: &Array2<f64>, index_sets: &[Vec<usize>], p: usize) -> f64 {
    let k = a.ncols();
    let mut quartic = 0.0;
    let mut balance = 0.0;
    for l in 0..k {
        let mut col_sum = 0.0;
        for set in index_sets {
            let c: f64 = set.iter().map(|&s| a[[s, l]] * a[[s, l]]).sum();
            quartic += c * c;
            col_sum += c;
        }
        balance += col_sum * col_sum;
    }
    quartic - balance / p as f64
}

/// Correlation ratio (eta squared) of a score column against category
/// labels, brute force from group means.
pub fn eta_squared(labels: &[String], scores: ArrayView1<f64>) -> f64 {
    let n = scores.len();
    let grand_mean = scores.sum() / n as f64;
    let mut groups: std::collections::HashMap<&str, (usize, f64)> =
        std::collections::HashMap::new();
    for (label, &x) in labels.iter().zip(scores.iter()) {
        let entry = groups.entry(label.as_str()).or_insert((0, 0.0));
        entry.0 += 1;
        entry.1 += x;
    }
    let between: f64 = groups
        .values()
        .map(|&(count, sum)| {
            let mean = sum / count as f64;
            count as f64 * (mean - grand_mean) * (mean - grand_mean)
        })
        .sum();
    let total: f64 = scores.iter().map(|&x| (x - grand_mean) * (x - grand_mean)).sum();
    between / total
}

/// Pearson correlation of a raw column against a score column.
pub fn pearson(raw: &[f64], scores: ArrayView1<f64>) -> f64 {
    let n = raw.len() as f64;
    let mx = raw.iter().sum::<f64>() / n;
    let my = scores.sum() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in raw.iter().zip(scores.iter()) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

pub fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Raw values of a quantitative column.
pub fn quant_values(table: &MixedTable, name: &str) -> Vec<f64> {
    for col in table.columns() {
        if col.name == name {
            if let ColumnKind::Quantitative(v) = &col.kind {
                return v.clone();
            }
        }
    }
    panic!("no quantitative column named {name}");
}

/// Labels of a qualitative column.
pub fn qual_labels(table: &MixedTable, name: &str) -> Vec<String> {
    for col in table.columns() {
        if col.name == name {
            if let ColumnKind::Qualitative(l) = &col.kind {
                return l.clone();
            }
        }
    }
    panic!("no qualitative column named {name}");
}
