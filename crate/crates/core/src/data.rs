//! Mixed data model: validation, standardization of quantitative
//! columns and indicator recoding of qualitative columns.
//!
//! A [`MixedTable`] holds raw columns tagged quantitative or
//! qualitative. [`recode`] turns it into the n x (p1 + m) matrix Z whose
//! quantitative block is `(1/sqrt(n))` times the standardized scores and
//! whose qualitative block is the centered indicator matrix scaled by
//! the inverse square root of the category frequencies. Every column of
//! Z is centered and the total squared Frobenius norm equals
//! `p1 + m - p2` (the total inertia).

use crate::error::{Error, Result};
use ndarray::Array2;

/// Values of one column: real measurements or category labels.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnKind {
    Quantitative(Vec<f64>),
    Qualitative(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

impl Column {
    pub fn quantitative(name: impl Into<String>, values: Vec<f64>) -> Self {
        Column {
            name: name.into(),
            kind: ColumnKind::Quantitative(values),
        }
    }

    pub fn qualitative<S: Into<String>>(name: impl Into<String>, labels: Vec<S>) -> Self {
        Column {
            name: name.into(),
            kind: ColumnKind::Qualitative(labels.into_iter().map(Into::into).collect()),
        }
    }

    pub fn len(&self) -> usize {
        match &self.kind {
            ColumnKind::Quantitative(v) => v.len(),
            ColumnKind::Qualitative(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_quantitative(&self) -> bool {
        matches!(self.kind, ColumnKind::Quantitative(_))
    }
}

/// A validated table of mixed columns.
///
/// Construction rejects tables that would poison the analysis further
/// down: ragged columns, duplicate names, constant quantitative
/// columns, single-category qualitative columns and missing values.
#[derive(Debug, Clone)]
pub struct MixedTable {
    n_rows: usize,
    columns: Vec<Column>,
}

impl MixedTable {
    pub fn new(columns: Vec<Column>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::EmptyTable);
        }
        let n_rows = columns[0].len();
        if n_rows < 2 {
            return Err(Error::TooFewRows(n_rows));
        }
        let mut seen = std::collections::HashSet::new();
        for col in &columns {
            if !seen.insert(col.name.clone()) {
                return Err(Error::DuplicateColumn(col.name.clone()));
            }
            if col.len() != n_rows {
                return Err(Error::LengthMismatch {
                    name: col.name.clone(),
                    got: col.len(),
                    expected: n_rows,
                });
            }
            match &col.kind {
                ColumnKind::Quantitative(values) => {
                    if let Some(row) = values.iter().position(|v| !v.is_finite()) {
                        return Err(Error::MissingValue {
                            column: col.name.clone(),
                            row,
                        });
                    }
                    if population_variance(values) <= 0.0 {
                        return Err(Error::ZeroVariance(col.name.clone()));
                    }
                }
                ColumnKind::Qualitative(labels) => {
                    if let Some(row) = labels.iter().position(|l| l.is_empty()) {
                        return Err(Error::MissingValue {
                            column: col.name.clone(),
                            row,
                        });
                    }
                    let distinct: std::collections::HashSet<&str> =
                        labels.iter().map(String::as_str).collect();
                    if distinct.len() < 2 {
                        return Err(Error::SingleCategory(col.name.clone()));
                    }
                }
            }
        }
        Ok(MixedTable { n_rows, columns })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn n_variables(&self) -> usize {
        self.columns.len()
    }

    pub fn n_quantitative(&self) -> usize {
        self.columns.iter().filter(|c| c.is_quantitative()).count()
    }

    pub fn n_qualitative(&self) -> usize {
        self.columns.len() - self.n_quantitative()
    }

    /// Copy of the table with rows reordered as `perm` (row i of the
    /// result is row perm[i] of the original).
    pub fn select_rows(&self, perm: &[usize]) -> Result<Self> {
        let columns = self
            .columns
            .iter()
            .map(|col| {
                let kind = match &col.kind {
                    ColumnKind::Quantitative(v) => {
                        ColumnKind::Quantitative(perm.iter().map(|&i| v[i]).collect())
                    }
                    ColumnKind::Qualitative(l) => {
                        ColumnKind::Qualitative(perm.iter().map(|&i| l[i].clone()).collect())
                    }
                };
                Column {
                    name: col.name.clone(),
                    kind,
                }
            })
            .collect();
        MixedTable::new(columns)
    }
}

/// One category of one qualitative variable.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryInfo {
    pub label: String,
    pub count: usize,
    /// Relative frequency count / n, in (0, 1).
    pub freq: f64,
}

/// Categories of one qualitative variable, in first-appearance order.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableCategories {
    pub variable: String,
    pub categories: Vec<CategoryInfo>,
    /// Per row, the local category index within `categories`.
    pub assignments: Vec<usize>,
}

/// Category metadata of all qualitative variables of a table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CategoryMap {
    pub per_variable: Vec<VariableCategories>,
    pub n_rows: usize,
}

impl CategoryMap {
    pub fn build(table: &MixedTable) -> Self {
        let per_variable = table
            .columns()
            .iter()
            .filter_map(|col| match &col.kind {
                ColumnKind::Qualitative(labels) => {
                    Some(categorize(&col.name, labels, table.n_rows()))
                }
                ColumnKind::Quantitative(_) => None,
            })
            .collect();
        CategoryMap {
            per_variable,
            n_rows: table.n_rows(),
        }
    }

    /// Total number of categories m across all qualitative variables.
    pub fn total_categories(&self) -> usize {
        self.per_variable.iter().map(|v| v.categories.len()).sum()
    }

    /// Iterate (variable name, category info) over all m categories in
    /// the order of the qualitative block of Z.
    pub fn flat_categories(&self) -> impl Iterator<Item = (&str, &CategoryInfo)> {
        self.per_variable.iter().flat_map(|v| {
            v.categories
                .iter()
                .map(move |c| (v.variable.as_str(), c))
        })
    }
}

fn categorize(name: &str, labels: &[String], n: usize) -> VariableCategories {
    let mut order: Vec<String> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    let mut assignments = Vec::with_capacity(labels.len());
    for label in labels {
        match order.iter().position(|l| l == label) {
            Some(idx) => {
                counts[idx] += 1;
                assignments.push(idx);
            }
            None => {
                assignments.push(order.len());
                order.push(label.clone());
                counts.push(1);
            }
        }
    }
    let categories = order
        .into_iter()
        .zip(counts)
        .map(|(label, count)| CategoryInfo {
            label,
            count,
            freq: count as f64 / n as f64,
        })
        .collect();
    VariableCategories {
        variable: name.to_string(),
        categories,
        assignments,
    }
}

/// The recoded matrix Z together with the bookkeeping needed to map its
/// columns back to variables.
#[derive(Debug, Clone)]
pub struct RecodedMatrix {
    z: Array2<f64>,
    /// Per variable (table order), the Z column indices it owns:
    /// a singleton for a quantitative variable, the category columns
    /// for a qualitative one.
    index_sets: Vec<Vec<usize>>,
    category_map: CategoryMap,
    variable_names: Vec<String>,
    variable_is_quant: Vec<bool>,
    n_quantitative: usize,
}

impl RecodedMatrix {
    pub fn z(&self) -> &Array2<f64> {
        &self.z
    }

    pub fn n_rows(&self) -> usize {
        self.z.nrows()
    }

    /// Width of Z, i.e. p1 + m.
    pub fn width(&self) -> usize {
        self.z.ncols()
    }

    pub fn index_sets(&self) -> &[Vec<usize>] {
        &self.index_sets
    }

    pub fn category_map(&self) -> &CategoryMap {
        &self.category_map
    }

    pub fn variable_names(&self) -> &[String] {
        &self.variable_names
    }

    pub fn variable_is_quant(&self) -> &[bool] {
        &self.variable_is_quant
    }

    pub fn n_variables(&self) -> usize {
        self.index_sets.len()
    }

    pub fn n_quantitative(&self) -> usize {
        self.n_quantitative
    }

    pub fn n_qualitative(&self) -> usize {
        self.n_variables() - self.n_quantitative
    }

    /// Total inertia p1 + m - p2 carried by Z.
    pub fn total_inertia(&self) -> f64 {
        (self.n_quantitative + self.category_map.total_categories() - self.n_qualitative())
            as f64
    }
}

/// Standardize to zero mean and unit population variance (divisor n,
/// not n - 1), so that the inner product of two standardized columns
/// over n is exactly their correlation.
pub fn standardize(name: &str, values: &[f64]) -> Result<Vec<f64>> {
    let n = values.len();
    if n < 2 {
        return Err(Error::TooFewRows(n));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    if var <= 0.0 {
        return Err(Error::ZeroVariance(name.to_string()));
    }
    let sd = var.sqrt();
    Ok(values.iter().map(|v| (v - mean) / sd).collect())
}

/// 0/1 indicator matrix of a label vector, one column per category in
/// first-appearance order.
pub fn indicator_matrix(name: &str, labels: &[String]) -> Result<Array2<f64>> {
    let n = labels.len();
    let cats = categorize(name, labels, n.max(1));
    if cats.categories.len() < 2 {
        return Err(Error::SingleCategory(name.to_string()));
    }
    let mut g = Array2::zeros((n, cats.categories.len()));
    for (row, &cat) in cats.assignments.iter().enumerate() {
        g[[row, cat]] = 1.0;
    }
    Ok(g)
}

/// Build the recoded matrix Z from a validated table.
///
/// Quantitative block: standardized scores scaled by `1/sqrt(n)`.
/// Qualitative block: column for category s has entry
/// `(1 - freq_s) / sqrt(count_s)` for members and
/// `-freq_s / sqrt(count_s)` for non-members, which is the centered
/// indicator matrix scaled by the inverse square root of the counts.
pub fn recode(table: &MixedTable) -> Result<RecodedMatrix> {
    let n = table.n_rows();
    let category_map = CategoryMap::build(table);
    let p1 = table.n_quantitative();
    let m = category_map.total_categories();

    let mut z = Array2::zeros((n, p1 + m));
    let mut index_sets = vec![Vec::new(); table.n_variables()];
    let mut variable_names = Vec::with_capacity(table.n_variables());
    let mut variable_is_quant = Vec::with_capacity(table.n_variables());

    let inv_sqrt_n = 1.0 / (n as f64).sqrt();
    let mut quant_col = 0;
    let mut qual_col = p1;
    let mut qual_var = 0;

    for (var_idx, col) in table.columns().iter().enumerate() {
        variable_names.push(col.name.clone());
        variable_is_quant.push(col.is_quantitative());
        match &col.kind {
            ColumnKind::Quantitative(values) => {
                let std = standardize(&col.name, values)?;
                for (row, v) in std.iter().enumerate() {
                    z[[row, quant_col]] = v * inv_sqrt_n;
                }
                index_sets[var_idx].push(quant_col);
                quant_col += 1;
            }
            ColumnKind::Qualitative(_) => {
                let vc = &category_map.per_variable[qual_var];
                for (local, cat) in vc.categories.iter().enumerate() {
                    let col_idx = qual_col + local;
                    let inv_sqrt_count = 1.0 / (cat.count as f64).sqrt();
                    for (row, &assigned) in vc.assignments.iter().enumerate() {
                        let member = if assigned == local { 1.0 } else { 0.0 };
                        z[[row, col_idx]] = (member - cat.freq) * inv_sqrt_count;
                    }
                    index_sets[var_idx].push(col_idx);
                }
                qual_col += vc.categories.len();
                qual_var += 1;
            }
        }
    }

    Ok(RecodedMatrix {
        z,
        index_sets,
        category_map,
        variable_names,
        variable_is_quant,
        n_quantitative: p1,
    })
}

fn population_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}
