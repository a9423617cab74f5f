//! CSV ingestion with explicit column typing, and deterministic number
//! formatting for the artifact files.

use crate::{CliError, InputArgs};
use pcamix::{Column, ColumnKind, MixedTable};
use std::collections::HashMap;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeclaredKind {
    Quantitative,
    Qualitative,
}

/// Parse the types sidecar: a header row `column,kind` followed by one
/// row per declared column.
pub fn read_types_file(path: &Path) -> Result<HashMap<String, DeclaredKind>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        if record.len() != 2 {
            return Err(CliError::input(format!(
                "{}: expected rows `column,kind`",
                path.display()
            )));
        }
        let kind = match record[1].to_ascii_lowercase().as_str() {
            "quantitative" | "quant" => DeclaredKind::Quantitative,
            "qualitative" | "qual" => DeclaredKind::Qualitative,
            other => {
                return Err(CliError::input(format!(
                    "{}: unknown kind '{other}' for column '{}'",
                    path.display(),
                    &record[0]
                )))
            }
        };
        map.insert(record[0].to_string(), kind);
    }
    Ok(map)
}

/// Read the input CSV into a validated table. A column is qualitative
/// iff declared so (sidecar or --qual) or iff any value fails to parse
/// as a number; numeric-coded factors must be declared explicitly.
pub fn read_table(args: &InputArgs) -> Result<MixedTable, CliError> {
    let mut declared: HashMap<String, DeclaredKind> = match &args.types {
        Some(path) => read_types_file(path)?,
        None => HashMap::new(),
    };
    for name in &args.qual {
        declared.insert(name.clone(), DeclaredKind::Qualitative);
    }

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(&args.input)
        .map_err(|e| CliError::input(format!("{}: {e}", args.input.display())))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::input(format!("{}: {e}", args.input.display())))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();

    for name in declared.keys() {
        if !headers.iter().any(|h| h == name) {
            return Err(CliError::input(format!(
                "declared column '{name}' not present in {}",
                args.input.display()
            )));
        }
    }

    let mut cells: Vec<Vec<String>> = vec![Vec::new(); headers.len()];
    for (row_idx, record) in reader.records().enumerate() {
        let record =
            record.map_err(|e| CliError::input(format!("{}: {e}", args.input.display())))?;
        if record.len() != headers.len() {
            return Err(CliError::input(format!(
                "row {}: {} fields, expected {}",
                row_idx + 1,
                record.len(),
                headers.len()
            )));
        }
        for (col, field) in record.iter().enumerate() {
            let field = field.trim();
            if field.is_empty() {
                return Err(CliError::input(format!(
                    "missing value in column '{}' at row {}",
                    headers[col],
                    row_idx + 1
                )));
            }
            cells[col].push(field.to_string());
        }
    }

    let mut columns = Vec::with_capacity(headers.len());
    for (name, values) in headers.iter().zip(cells) {
        let declared_kind = declared.get(name).copied();
        let parsed: Option<Vec<f64>> = values
            .iter()
            .map(|v| v.parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect();
        let kind = match (declared_kind, parsed) {
            (Some(DeclaredKind::Qualitative), _) => ColumnKind::Qualitative(values),
            (Some(DeclaredKind::Quantitative), Some(numbers)) => {
                ColumnKind::Quantitative(numbers)
            }
            (Some(DeclaredKind::Quantitative), None) => {
                return Err(CliError::input(format!(
                    "column '{name}' is declared quantitative but holds non-numeric values"
                )));
            }
            (None, Some(numbers)) => ColumnKind::Quantitative(numbers),
            (None, None) => ColumnKind::Qualitative(values),
        };
        columns.push(Column {
            name: name.clone(),
            kind,
        });
    }

    MixedTable::new(columns).map_err(CliError::from_lib)
}

/// Format with 15 significant digits; plain decimal notation down to
/// 1e-4, exponent notation below that. Trailing zeros are trimmed so
/// output is byte-stable.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let ax = x.abs();
    if (1e-4..1e15).contains(&ax) {
        let digits_before = ax.log10().floor() as i32 + 1;
        let prec = (15 - digits_before).max(0) as usize;
        let s = format!("{x:.prec$}");
        trim_zeros(s)
    } else {
        let s = format!("{x:.14e}");
        // Normalize the mantissa ("1.20000000000000e-7" -> "1.2e-7").
        match s.split_once('e') {
            Some((mantissa, exp)) => format!("{}e{exp}", trim_zeros(mantissa.to_string())),
            None => s,
        }
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    trimmed.to_string()
}

/// One CSV line from string fields.
pub fn csv_line(fields: &[String]) -> String {
    let mut line = fields.join(",");
    line.push('\n');
    line
}
