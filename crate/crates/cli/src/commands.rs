//! Subcommand implementations and artifact writers.

use crate::csvio::{csv_line, fmt_num, read_table};
use crate::{CliError, InputArgs};
use ndarray::ArrayView2;
use pcamix::simbench::{bench, simulate, BenchOptions, SimConfig};
use pcamix::{fit, recode, rotate, ColumnKind, PcamixModel, RecodedMatrix, RotationResult};
use std::fs;
use std::path::Path;

pub fn cmd_fit(args: &InputArgs, k: usize) -> Result<(), CliError> {
    let table = read_table(args)?;
    let recoded = recode(&table).map_err(CliError::from_lib)?;
    let model = fit(&recoded, k).map_err(CliError::from_lib)?;

    fs::create_dir_all(&args.out)?;
    write_fit_artifacts(&args.out, &model, &recoded)?;
    println!("wrote fit artifacts for k={k} to {}", args.out.display());
    Ok(())
}

pub fn cmd_rotate(
    args: &InputArgs,
    k: usize,
    tol: f64,
    max_sweeps: usize,
) -> Result<(), CliError> {
    if tol <= 0.0 {
        return Err(CliError::parameter("--tol must be positive".to_string()));
    }
    if max_sweeps == 0 {
        return Err(CliError::parameter(
            "--max-sweeps must be at least 1".to_string(),
        ));
    }
    let table = read_table(args)?;
    let recoded = recode(&table).map_err(CliError::from_lib)?;
    let model = fit(&recoded, k).map_err(CliError::from_lib)?;
    let rotated = rotate(&model, tol, max_sweeps).map_err(CliError::from_lib)?;

    fs::create_dir_all(&args.out)?;
    write_fit_artifacts(&args.out, &model, &recoded)?;
    write_rotated_artifacts(&args.out, &model, &rotated, &recoded)?;
    println!(
        "wrote fit and rotation artifacts for k={k} to {} (converged={}, sweeps={})",
        args.out.display(),
        rotated.converged,
        rotated.sweeps
    );
    Ok(())
}

pub fn cmd_bench(grid: &str, reps: usize, seed: u64, out: &Path) -> Result<(), CliError> {
    if reps == 0 {
        return Err(CliError::parameter("--reps must be at least 1".to_string()));
    }
    let cells = parse_grid(grid)?;
    let opts = BenchOptions {
        reps,
        seed,
        ..BenchOptions::default()
    };
    let report = bench(&cells, &opts).map_err(|e| CliError::input(e.to_string()))?;

    fs::create_dir_all(out)?;
    fs::write(out.join("bench_median.csv"), report.median_csv())?;
    fs::write(out.join("bench_ratio.csv"), report.ratio_csv())?;
    print!("{}", report.text_table());
    println!("wrote bench_median.csv and bench_ratio.csv to {}", out.display());
    Ok(())
}

pub fn cmd_simulate(grid: &str, seed: u64, out: &Path) -> Result<(), CliError> {
    let cells = parse_grid(grid)?;
    if cells.len() != 1 {
        return Err(CliError::input(format!(
            "simulate expects a single n/p cell, got {} cells",
            cells.len()
        )));
    }
    let (n, p) = cells[0];
    let config = SimConfig::new(n, p, seed).map_err(|e| CliError::input(e.to_string()))?;
    let table = simulate(&config);

    fs::create_dir_all(out)?;
    let stem = format!("simulated_n{n}_p{p}");
    let mut data = String::new();
    let names: Vec<String> = table.columns().iter().map(|c| c.name.clone()).collect();
    data.push_str(&csv_line(&names));
    for row in 0..table.n_rows() {
        let fields: Vec<String> = table
            .columns()
            .iter()
            .map(|col| match &col.kind {
                ColumnKind::Quantitative(v) => fmt_num(v[row]),
                ColumnKind::Qualitative(l) => l[row].clone(),
            })
            .collect();
        data.push_str(&csv_line(&fields));
    }
    fs::write(out.join(format!("{stem}.csv")), data)?;

    let mut types = String::from("column,kind\n");
    for col in table.columns() {
        let kind = match col.kind {
            ColumnKind::Quantitative(_) => "quantitative",
            ColumnKind::Qualitative(_) => "qualitative",
        };
        types.push_str(&format!("{},{kind}\n", col.name));
    }
    fs::write(out.join(format!("{stem}_types.csv")), types)?;
    println!("wrote {stem}.csv and {stem}_types.csv to {}", out.display());
    Ok(())
}

fn parse_grid(grid: &str) -> Result<Vec<(usize, usize)>, CliError> {
    let bad = || CliError::input(format!("invalid grid '{grid}', expected n1,n2,../p1,p2,.."));
    let (ns_part, ps_part) = grid.split_once('/').ok_or_else(bad)?;
    let parse_list = |part: &str| -> Result<Vec<usize>, CliError> {
        part.split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|_| bad()))
            .collect()
    };
    let ns = parse_list(ns_part)?;
    let ps = parse_list(ps_part)?;
    if ns.is_empty() || ps.is_empty() {
        return Err(bad());
    }
    let mut cells = Vec::new();
    for &n in &ns {
        for &p in &ps {
            cells.push((n, p));
        }
    }
    Ok(cells)
}

fn dim_headers(k: usize) -> Vec<String> {
    (1..=k).map(|l| format!("dim_{l}")).collect()
}

fn write_matrix_rows(
    out: &mut String,
    labels: &[Vec<String>],
    matrix: ArrayView2<f64>,
) {
    for (row_labels, row) in labels.iter().zip(matrix.rows()) {
        let mut fields = row_labels.clone();
        fields.extend(row.iter().map(|&v| fmt_num(v)));
        out.push_str(&csv_line(&fields));
    }
}

fn write_fit_artifacts(
    dir: &Path,
    model: &PcamixModel,
    recoded: &RecodedMatrix,
) -> Result<(), CliError> {
    write_scores(dir, "scores.csv", model.scores.view(), model.k)?;
    write_quant_loadings(
        dir,
        "loadings_quant.csv",
        model.loadings_quantitative(),
        model,
    )?;
    write_categories(
        dir,
        "categories.csv",
        model.category_coords.view(),
        recoded,
        model.k,
    )?;
    write_squared(
        dir,
        "squared_loadings.csv",
        model.squared_loadings.view(),
        model,
    )?;

    // eigenvalues.csv: eigenvalue, share of the total inertia, cumulative.
    let total = recoded.total_inertia();
    let mut out = String::from("dim,eigenvalue,proportion,cumulative\n");
    let mut cumulative = 0.0;
    for (l, lam2) in model.variance_explained().iter().enumerate() {
        cumulative += lam2 / total;
        out.push_str(&csv_line(&[
            format!("{}", l + 1),
            fmt_num(*lam2),
            fmt_num(lam2 / total),
            fmt_num(cumulative),
        ]));
    }
    fs::write(dir.join("eigenvalues.csv"), out)?;
    Ok(())
}

fn write_rotated_artifacts(
    dir: &Path,
    model: &PcamixModel,
    rotated: &RotationResult,
    recoded: &RecodedMatrix,
) -> Result<(), CliError> {
    write_scores(dir, "scores_rot.csv", rotated.scores.view(), model.k)?;
    write_quant_loadings(
        dir,
        "loadings_quant_rot.csv",
        rotated.loadings_quantitative(),
        model,
    )?;
    write_categories(
        dir,
        "categories_rot.csv",
        rotated.category_coords.view(),
        recoded,
        model.k,
    )?;
    write_squared(
        dir,
        "squared_loadings_rot.csv",
        rotated.squared_loadings.view(),
        model,
    )?;

    let total = recoded.total_inertia();
    let mut out = String::from("dim,variance,proportion,cumulative\n");
    let mut cumulative = 0.0;
    for (l, var) in rotated.variance_explained().iter().enumerate() {
        cumulative += var / total;
        out.push_str(&csv_line(&[
            format!("{}", l + 1),
            fmt_num(*var),
            fmt_num(var / total),
            fmt_num(cumulative),
        ]));
    }
    fs::write(dir.join("eigenvalues_rot.csv"), out)?;

    let mut out = String::new();
    out.push_str(&csv_line(&dim_headers(model.k)));
    for row in rotated.rotation.rows() {
        let fields: Vec<String> = row.iter().map(|&v| fmt_num(v)).collect();
        out.push_str(&csv_line(&fields));
    }
    fs::write(dir.join("rotation_matrix.csv"), out)?;

    let pairs_per_sweep = model.k * (model.k - 1) / 2;
    let mut out = String::from("sweep,dim_a,dim_b,theta,objective\n");
    for (i, step) in rotated.trace.iter().enumerate() {
        out.push_str(&csv_line(&[
            format!("{}", i / pairs_per_sweep + 1),
            format!("{}", step.pair.0 + 1),
            format!("{}", step.pair.1 + 1),
            fmt_num(step.theta),
            fmt_num(step.objective),
        ]));
    }
    out.push_str(&format!(
        "# converged={} sweeps={}\n",
        rotated.converged, rotated.sweeps
    ));
    fs::write(dir.join("sweep_trace.csv"), out)?;
    Ok(())
}

fn write_scores(
    dir: &Path,
    file: &str,
    scores: ArrayView2<f64>,
    k: usize,
) -> Result<(), CliError> {
    let mut out = String::new();
    let mut header = vec!["obs".to_string()];
    header.extend(dim_headers(k));
    out.push_str(&csv_line(&header));
    let labels: Vec<Vec<String>> = (1..=scores.nrows()).map(|i| vec![i.to_string()]).collect();
    write_matrix_rows(&mut out, &labels, scores);
    fs::write(dir.join(file), out)?;
    Ok(())
}

fn write_quant_loadings(
    dir: &Path,
    file: &str,
    loadings: ArrayView2<f64>,
    model: &PcamixModel,
) -> Result<(), CliError> {
    let mut out = String::new();
    let mut header = vec!["variable".to_string()];
    header.extend(dim_headers(model.k));
    out.push_str(&csv_line(&header));
    let labels: Vec<Vec<String>> = model
        .variable_names
        .iter()
        .zip(&model.variable_is_quant)
        .filter(|(_, &is_quant)| is_quant)
        .map(|(name, _)| vec![name.clone()])
        .collect();
    write_matrix_rows(&mut out, &labels, loadings);
    fs::write(dir.join(file), out)?;
    Ok(())
}

fn write_categories(
    dir: &Path,
    file: &str,
    coords: ArrayView2<f64>,
    recoded: &RecodedMatrix,
    k: usize,
) -> Result<(), CliError> {
    let mut out = String::new();
    let mut header = vec!["variable".to_string(), "category".to_string()];
    header.extend(dim_headers(k));
    out.push_str(&csv_line(&header));
    let labels: Vec<Vec<String>> = recoded
        .category_map()
        .flat_categories()
        .map(|(var, cat)| vec![var.to_string(), cat.label.clone()])
        .collect();
    write_matrix_rows(&mut out, &labels, coords);
    fs::write(dir.join(file), out)?;
    Ok(())
}

fn write_squared(
    dir: &Path,
    file: &str,
    squared: ArrayView2<f64>,
    model: &PcamixModel,
) -> Result<(), CliError> {
    let mut out = String::new();
    let mut header = vec!["variable".to_string()];
    header.extend(dim_headers(model.k));
    out.push_str(&csv_line(&header));
    let labels: Vec<Vec<String>> = model
        .variable_names
        .iter()
        .map(|name| vec![name.clone()])
        .collect();
    write_matrix_rows(&mut out, &labels, squared);
    fs::write(dir.join(file), out)?;
    Ok(())
}
