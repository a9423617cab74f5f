//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (run with `--nocapture` to see them on success).

mod common;

use common::*;
use ndarray::{arr2, Array2};
use pcamix::data::CategoryMap;
use pcamix::model::squared_loadings;
use pcamix::quantification::{build_quantification, fit_original, reformulation_coefficients};
use pcamix::rotation::{
    angle_from_ab, barycentric_coordinates, objective_closed_form, planar_coefficients, rotate,
    varimax_derivative, varimax_objective,
};
use pcamix::simbench::{bench, BenchOptions};
use pcamix::{fit, recode, Column, MixedTable, PcamixModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn report(criterion: usize, name: &str, ok: bool, detail: &str) {
    println!(
        "[criterion {criterion}] {name}: {} ({detail})",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {criterion} {name}: {detail}");
}

/// Fifty deterministic mixed tables with n in [10, 30], p in [2, 6],
/// at least one column of each kind.
fn mixed_batch(seed: u64, count: usize) -> Vec<MixedTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(10..=30usize);
            let p = rng.random_range(2..=6usize);
            let n_quant = rng.random_range(1..p);
            let n_qual = p - n_quant;
            random_mixed_table(&mut rng, n, n_quant, n_qual)
        })
        .collect()
}

#[test]
fn criterion_1_oracle_equivalence() {
    let started = Instant::now();
    let tables = mixed_batch(0xC0FFEE, 50);
    let mut max_var_dev = 0.0f64;
    let mut max_c_dev = 0.0f64;
    for table in &tables {
        let rec = recode(table).unwrap();
        let model = fit(&rec, 2).unwrap();
        let qs = build_quantification(table).unwrap();
        let orig = fit_original(&qs, 2).unwrap();
        for (a, b) in model.variance_explained().iter().zip(&orig.variances) {
            max_var_dev = max_var_dev.max((a - b).abs());
        }
        max_c_dev = max_c_dev.max(max_abs_diff(&model.squared_loadings, &orig.squared_loadings));
    }
    let elapsed = started.elapsed().as_secs_f64();
    let ok = max_var_dev < 1e-8 && max_c_dev < 1e-8 && elapsed < 30.0;
    report(
        1,
        "oracle equivalence on 50 random tables",
        ok,
        &format!(
            "max |d variance| = {max_var_dev:.2e}, max |d C| = {max_c_dev:.2e}, {elapsed:.1} s"
        ),
    );
}

#[test]
fn criterion_2_correlation_ratio_semantics() {
    let tables = mixed_batch(0xBEEF, 20);
    let mut max_dev = 0.0f64;
    for table in &tables {
        let rec = recode(table).unwrap();
        let rank = fit(&rec, 1).unwrap().rank;
        let k = rank.min(3);
        let model = fit(&rec, k).unwrap();
        let mut stages: Vec<(Array2<f64>, Array2<f64>)> = vec![(
            model.scores.clone(),
            model.squared_loadings.clone(),
        )];
        if k >= 2 {
            let rot = rotate(&model, 1e-8, 100).unwrap();
            stages.push((rot.scores.clone(), rot.squared_loadings.clone()));
        }
        for (scores, c) in &stages {
            for (j, name) in model.variable_names.iter().enumerate() {
                for l in 0..k {
                    let reference = if model.variable_is_quant[j] {
                        let r = pearson(&quant_values(table, name), scores.column(l));
                        r * r
                    } else {
                        eta_squared(&qual_labels(table, name), scores.column(l))
                    };
                    max_dev = max_dev.max((c[[j, l]] - reference).abs());
                }
            }
        }
    }
    let ok = max_dev < 1e-8;
    report(
        2,
        "squared loadings are r^2 / correlation ratios before and after rotation",
        ok,
        &format!("max deviation = {max_dev:.2e}"),
    );
}

#[test]
fn criterion_3_barycentric_property() {
    let tables = mixed_batch(0xBA27, 20);
    let mut max_dev = 0.0f64;
    for table in &tables {
        let rec = recode(table).unwrap();
        let rank = fit(&rec, 1).unwrap().rank;
        let model = fit(&rec, rank.min(3)).unwrap();
        let bary = barycentric_coordinates(&model.scores, &model.category_map);
        max_dev = max_dev.max(max_abs_diff(&bary, &model.category_coords));
        if model.k >= 2 {
            let rot = rotate(&model, 1e-8, 100).unwrap();
            let bary_rot = barycentric_coordinates(&rot.scores, &model.category_map);
            max_dev = max_dev.max(max_abs_diff(&bary_rot, &rot.category_coords));
            // Same dual identity as the unrotated block: scaled A2 rows.
            let mut scaled = rot
                .loadings
                .slice(ndarray::s![model.n_quantitative.., ..])
                .to_owned();
            for (row, (_, cat)) in model.category_map.flat_categories().enumerate() {
                let s = 1.0 / cat.freq.sqrt();
                scaled.row_mut(row).mapv_inplace(|v| v * s);
            }
            max_dev = max_dev.max(max_abs_diff(&scaled, &rot.category_coords));
        }
    }
    let ok = max_dev < 1e-10;
    report(
        3,
        "category coordinates are score barycenters before and after rotation",
        ok,
        &format!("max deviation = {max_dev:.2e}"),
    );
}

#[test]
fn criterion_4_planar_angle_optimality() {
    // Closed-form angle against a dense grid.
    let mut rng = ChaCha8Rng::seed_from_u64(0x6121D);
    let grid_points = 100_001usize;
    let mut worst_gap = f64::NEG_INFINITY;
    for _ in 0..100 {
        let p = rng.random_range(2..=8usize);
        let (a, index_sets) = random_loadings(&mut rng, p, 2);
        let coeffs = planar_coefficients(a.view(), &index_sets);
        let best = direct_objective(&rotate_pair(&a, coeffs.theta), &index_sets, p);
        let mut grid_best = f64::NEG_INFINITY;
        for i in 0..grid_points {
            let theta = -std::f64::consts::FRAC_PI_4
                + std::f64::consts::FRAC_PI_2 * i as f64 / grid_points as f64;
            let f = direct_objective(&rotate_pair(&a, theta), &index_sets, p);
            grid_best = grid_best.max(f);
        }
        worst_gap = worst_gap.max(grid_best - best);
    }
    let grid_ok = worst_gap <= 1e-9;

    // Same angle as the matrix-reformulation coefficients.
    let mut max_angle_dev = 0.0f64;
    for table in mixed_batch(0xA11CE, 15) {
        let rec = recode(&table).unwrap();
        if fit(&rec, 1).unwrap().rank < 2 {
            continue;
        }
        let model = fit(&rec, 2).unwrap();
        let qs = build_quantification(&table).unwrap();
        let lam = model.variance_explained();
        let gamma = arr2(&[[lam[0], 0.0], [0.0, lam[1]]]);
        let (a_k, b_k) =
            reformulation_coefficients(model.scores.view(), &qs, &gamma, model.index_sets.len());
        let (_, _, theta_k) = angle_from_ab(a_k, b_k);
        let coeffs = planar_coefficients(model.loadings.view(), &model.index_sets);
        max_angle_dev = max_angle_dev.max((theta_k - coeffs.theta).abs());
    }
    let angle_ok = max_angle_dev < 1e-9;

    report(
        4,
        "closed-form angle beats the grid and matches the reformulation",
        grid_ok && angle_ok,
        &format!("worst grid gap = {worst_gap:.2e}, max angle dev = {max_angle_dev:.2e}"),
    );
}

#[test]
fn criterion_5_closed_form_objective() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0b7ec7);
    let mut max_obj_dev = 0.0f64;
    let mut max_der_dev = 0.0f64;
    for _ in 0..100 {
        let p = rng.random_range(2..=8usize);
        let (a, index_sets) = random_loadings(&mut rng, p, 2);
        let coeffs = planar_coefficients(a.view(), &index_sets);
        let f0 = direct_objective(&a, &index_sets, p);
        let theta =
            rng.random_range(-std::f64::consts::FRAC_PI_4..std::f64::consts::FRAC_PI_4);
        let closed = objective_closed_form(f0, &coeffs, theta, p);
        let direct = direct_objective(&rotate_pair(&a, theta), &index_sets, p);
        max_obj_dev = max_obj_dev.max((closed - direct).abs());

        let h = 1e-5;
        let fd = (direct_objective(&rotate_pair(&a, theta + h), &index_sets, p)
            - direct_objective(&rotate_pair(&a, theta - h), &index_sets, p))
            / (2.0 * h);
        let analytic = varimax_derivative(&coeffs, theta, p);
        max_der_dev = max_der_dev.max((fd - analytic).abs());
    }
    let ok = max_obj_dev < 1e-10 && max_der_dev < 1e-6;
    report(
        5,
        "analytic objective and derivative match direct evaluation",
        ok,
        &format!("max |d f| = {max_obj_dev:.2e}, max |d f'| = {max_der_dev:.2e}"),
    );
}

#[test]
fn criterion_6_sweep_behavior() {
    let tables = mixed_batch(0x5EED, 30);
    let mut all_converged = true;
    let mut max_dip = 0.0f64;
    let mut max_conservation = 0.0f64;
    let mut max_ortho = 0.0f64;
    for table in &tables {
        let rec = recode(table).unwrap();
        let rank = fit(&rec, 1).unwrap().rank;
        if rank < 2 {
            continue;
        }
        let model = fit(&rec, rank.min(3)).unwrap();
        let res = rotate(&model, 1e-8, 100).unwrap();
        all_converged &= res.converged;

        let mut prev = varimax_objective(
            model.loadings.view(),
            &model.index_sets,
            model.index_sets.len(),
        );
        for step in &res.trace {
            max_dip = max_dip.max(prev - step.objective);
            prev = step.objective;
        }

        let before: f64 = model.squared_loadings.iter().sum();
        let after: f64 = res.squared_loadings.iter().sum();
        max_conservation = max_conservation.max((before - after).abs());

        let n = model.n_rows as f64;
        let xtx = res.scores.t().dot(&res.scores);
        for i in 0..model.k {
            for j in 0..model.k {
                let expected = if i == j { n } else { 0.0 };
                max_ortho = max_ortho.max((xtx[[i, j]] - expected).abs());
            }
        }
    }
    let ok = all_converged && max_dip <= 1e-12 && max_conservation < 1e-10 && max_ortho < 1e-8;
    report(
        6,
        "sweeps converge monotonically and conserve inertia",
        ok,
        &format!(
            "converged = {all_converged}, max dip = {max_dip:.2e}, conservation = {max_conservation:.2e}, |X'X - nI| = {max_ortho:.2e}"
        ),
    );
}

#[test]
fn criterion_7_worked_micro_instances() {
    // T4: one quantitative column 1..4 with a balanced binary factor.
    let table = MixedTable::new(vec![
        Column::quantitative("x", vec![1.0, 2.0, 3.0, 4.0]),
        Column::qualitative("g", vec!["a", "a", "b", "b"]),
    ])
    .unwrap();
    let model = fit(&recode(&table).unwrap(), 2).unwrap();
    let ve = model.variance_explained();
    let eig_dev = (ve[0] - 1.89443).abs().max((ve[1] - 0.10557).abs());
    let c_dev = (model.squared_loadings[[0, 0]] - 0.94721)
        .abs()
        .max((model.squared_loadings[[1, 0]] - 0.94721).abs());

    // Two-variable instance with all loadings +-sqrt(2)/2 rotates by
    // exactly pi/4 to the identity pattern, objective 0 -> 1.
    let h = 0.5f64.sqrt();
    let loadings = arr2(&[[h, h], [h, -h]]);
    let index_sets = vec![vec![0], vec![1]];
    let synthetic = PcamixModel {
        k: 2,
        n_rows: 2,
        rank: 2,
        scores: arr2(&[[2.0f64.sqrt(), 0.0], [0.0, 2.0f64.sqrt()]]),
        singular_values: vec![1.0, 1.0],
        squared_loadings: squared_loadings(loadings.view(), &index_sets).unwrap(),
        loadings,
        category_coords: Array2::zeros((0, 2)),
        index_sets,
        category_map: CategoryMap::default(),
        variable_names: vec!["x".into(), "y".into()],
        variable_is_quant: vec![true, true],
        n_quantitative: 2,
    };
    let before = varimax_objective(
        synthetic.loadings.view(),
        &synthetic.index_sets,
        2,
    );
    let res = rotate(&synthetic, 1e-8, 100).unwrap();
    let after = res.trace.last().unwrap().objective;
    let theta_dev = (res.trace[0].theta - std::f64::consts::FRAC_PI_4).abs();
    let identity_dev = max_abs_diff(&res.squared_loadings, &arr2(&[[1.0, 0.0], [0.0, 1.0]]));

    let ok = eig_dev < 1e-5
        && c_dev < 1e-5
        && theta_dev < 1e-12
        && identity_dev < 1e-8
        && before.abs() < 1e-12
        && (after - 1.0).abs() < 1e-12;
    report(
        7,
        "worked micro-instances",
        ok,
        &format!(
            "eigenvalue dev = {eig_dev:.2e}, C dev = {c_dev:.2e}, theta dev = {theta_dev:.2e}, rotated C dev = {identity_dev:.2e}, objective {before:.1e} -> {after}"
        ),
    );
}

#[test]
fn criterion_8_special_case_reductions() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9CA);
    // All quantitative input reproduces PCA.
    let mut max_corr_dev = 0.0f64;
    let mut max_total_dev = 0.0f64;
    for _ in 0..10 {
        let n = rng.random_range(12..=30usize);
        let p1 = rng.random_range(2..=5usize);
        let table = random_mixed_table(&mut rng, n, p1, 0);
        let rec = recode(&table).unwrap();
        let rank = fit(&rec, 1).unwrap().rank;
        let model = fit(&rec, rank).unwrap();
        for (j, name) in model.variable_names.iter().enumerate() {
            let raw = quant_values(&table, name);
            for l in 0..model.k {
                let r = pearson(&raw, model.scores.column(l));
                max_corr_dev = max_corr_dev.max((model.loadings[[j, l]] - r).abs());
            }
        }
        let total: f64 = model.variance_explained().iter().sum();
        max_total_dev = max_total_dev.max((total - p1 as f64).abs());
    }
    let pca_ok = max_corr_dev < 1e-10 && max_total_dev < 1e-8;

    // All binary qualitative input matches PCA on standardized 0/1 columns.
    let mut max_binary_dev = 0.0f64;
    for _ in 0..10 {
        let n = rng.random_range(14..=30usize);
        let p2 = rng.random_range(2..=4usize);
        let mut qual_cols = Vec::new();
        let mut quant_cols = Vec::new();
        for j in 0..p2 {
            let mut labels: Vec<String> = (0..n)
                .map(|_| if rng.random_bool(0.5) { "yes" } else { "no" }.to_string())
                .collect();
            labels[0] = "yes".into();
            labels[1] = "no".into();
            let zero_one: Vec<f64> = labels
                .iter()
                .map(|s| if s == "yes" { 1.0 } else { 0.0 })
                .collect();
            qual_cols.push(Column::qualitative(format!("b{j}"), labels));
            quant_cols.push(Column::quantitative(format!("b{j}"), zero_one));
        }
        let mca = fit(
            &recode(&MixedTable::new(qual_cols).unwrap()).unwrap(),
            2,
        )
        .unwrap();
        let pca = fit(
            &recode(&MixedTable::new(quant_cols).unwrap()).unwrap(),
            2,
        )
        .unwrap();
        max_binary_dev =
            max_binary_dev.max(max_abs_diff(&mca.squared_loadings, &pca.squared_loadings));
    }
    let binary_ok = max_binary_dev < 1e-8;

    report(
        8,
        "PCA and binary-MCA reductions",
        pca_ok && binary_ok,
        &format!(
            "max |loading - corr| = {max_corr_dev:.2e}, total variance dev = {max_total_dev:.2e}, binary C dev = {max_binary_dev:.2e}"
        ),
    );
}

#[test]
fn criterion_9_benchmark_trend() {
    let started = Instant::now();
    let grid = [
        (50, 10),
        (50, 50),
        (100, 10),
        (100, 50),
        (200, 10),
        (200, 50),
    ];
    let opts = BenchOptions {
        reps: 5,
        seed: 42,
        ..BenchOptions::default()
    };
    let report_data = bench(&grid, &opts).unwrap();

    let mut svd_faster_everywhere = true;
    for cell in &report_data.cells {
        let reform = cell.median_reformulation.expect("desk grid fits in memory");
        svd_faster_everywhere &= cell.median_svd < reform;
    }
    let r50 = report_data.cell(50, 10).unwrap().ratio.unwrap();
    let r100 = report_data.cell(100, 10).unwrap().ratio.unwrap();
    let r200 = report_data.cell(200, 10).unwrap().ratio.unwrap();
    let monotone = r50 < r100 && r100 < r200;
    let elapsed = started.elapsed().as_secs_f64();

    println!("{}", report_data.text_table());
    let ok = svd_faster_everywhere && monotone && elapsed < 300.0;
    report(
        9,
        "SVD path faster in every desk-grid cell with the ratio growing in n",
        ok,
        &format!(
            "svd faster everywhere = {svd_faster_everywhere}, ratios p=10: {r50:.1} -> {r100:.1} -> {r200:.1}, {elapsed:.0} s"
        ),
    );
}
