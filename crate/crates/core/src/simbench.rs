//! Synthetic mixed-data generator and timing harness comparing the SVD
//! rotation path against the quantification-matrix baseline.
//!
//! Tables are drawn from a multivariate normal with covariance `Q'Q`,
//! Q filled uniformly on [0.2, 0.4]; the second half of the variables
//! is discretized into three equal-count categories. Both paths fit and
//! rotate with k = 2 and must agree on the rotated squared loadings
//! before any timing is reported.

use crate::data::{Column, MixedTable};
use crate::error::{Error, Result};
use crate::model::fit;
use crate::quantification::{
    build_quantification, fit_original, quantification_bytes, rotate_original,
};
use crate::rotation::rotate;
use crate::{data::recode, simbench};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::time::Instant;

/// Name of the generator backing [`simulate`], recorded in reports.
pub const RNG_NAME: &str = "chacha8";

/// Parameters of one simulated dataset.
#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    pub n: usize,
    /// Total variable count; half quantitative, half qualitative.
    pub p: usize,
    pub seed: u64,
    /// Replicates per cell when benchmarking.
    pub reps: usize,
}

impl SimConfig {
    pub fn new(n: usize, p: usize, seed: u64) -> Result<Self> {
        if p < 2 || !p.is_multiple_of(2) {
            return Err(Error::InvalidSimConfig(format!(
                "p must be even and >= 2, got {p}"
            )));
        }
        if n < 4 {
            return Err(Error::InvalidSimConfig(format!("n must be >= 4, got {n}")));
        }
        Ok(SimConfig {
            n,
            p,
            seed,
            reps: 20,
        })
    }
}

/// Draw a deterministic mixed table: p/2 quantitative columns and p/2
/// columns cut into terciles by rank (tie-broken by row order, so the
/// three counts differ by at most one).
pub fn simulate(config: &SimConfig) -> MixedTable {
    let SimConfig { n, p, seed, .. } = *config;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Covariance factor Q, p x p, uniform entries on [0.2, 0.4].
    let mut q = vec![0.0f64; p * p];
    for entry in q.iter_mut() {
        *entry = rng.random_range(0.2..0.4);
    }

    // Rows x = Q' g with g standard normal, so cov(x) = Q'Q.
    let mut data = vec![0.0f64; n * p];
    let mut g = vec![0.0f64; p];
    for row in 0..n {
        for gi in g.iter_mut() {
            *gi = StandardNormal.sample(&mut rng);
        }
        for j in 0..p {
            let mut acc = 0.0;
            for r in 0..p {
                acc += q[r * p + j] * g[r];
            }
            data[row * p + j] = acc;
        }
    }

    let half = p / 2;
    let mut columns = Vec::with_capacity(p);
    for j in 0..half {
        let values: Vec<f64> = (0..n).map(|row| data[row * p + j]).collect();
        columns.push(Column::quantitative(format!("q{}", j + 1), values));
    }
    for j in half..p {
        let values: Vec<f64> = (0..n).map(|row| data[row * p + j]).collect();
        let labels = terciles(&values);
        columns.push(Column::qualitative(
            format!("c{}", j - half + 1),
            labels,
        ));
    }

    MixedTable::new(columns).expect("simulated data is nondegenerate")
}

/// Balanced three-way cut by rank: the sorted positions are split into
/// consecutive groups whose sizes differ by at most one.
fn terciles(values: &[f64]) -> Vec<String> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        values[i]
            .partial_cmp(&values[j])
            .expect("finite draws")
            .then(i.cmp(&j))
    });
    let base = n / 3;
    let extra = n % 3;
    let count = |cat: usize| base + usize::from(cat < extra);
    let mut labels = vec![String::new(); n];
    let mut pos = 0;
    for cat in 0..3 {
        for _ in 0..count(cat) {
            labels[order[pos]] = format!("t{}", cat + 1);
            pos += 1;
        }
    }
    labels
}

/// Benchmark knobs.
#[derive(Debug, Clone, Copy)]
pub struct BenchOptions {
    pub reps: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_sweeps: usize,
    /// The quantification path is skipped (and marked as an error in
    /// the report) when its matrices would exceed this many bytes.
    pub memory_budget_bytes: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            reps: 20,
            seed: 42,
            tol: 1e-8,
            max_sweeps: 100,
            memory_budget_bytes: 1_000_000_000,
        }
    }
}

/// Timing outcome of one (n, p) cell.
#[derive(Debug, Clone)]
pub struct BenchCell {
    pub n: usize,
    pub p: usize,
    /// Median seconds of recode + fit + rotate.
    pub median_svd: f64,
    /// Median seconds of the quantification path, when it ran.
    pub median_reformulation: Option<f64>,
    /// reformulation / SVD, present only when both methods succeeded.
    pub ratio: Option<f64>,
    pub error: Option<String>,
}

/// Full benchmark report.
#[derive(Debug, Clone)]
pub struct BenchReport {
    pub cells: Vec<BenchCell>,
    pub ns: Vec<usize>,
    pub ps: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub rng: &'static str,
    pub k: usize,
}

impl BenchReport {
    pub fn cell(&self, n: usize, p: usize) -> Option<&BenchCell> {
        self.cells.iter().find(|c| c.n == n && c.p == p)
    }

    /// Median timings as CSV, one row per (n, method).
    pub fn median_csv(&self) -> String {
        let mut out = String::from("n,method");
        for p in &self.ps {
            out.push_str(&format!(",p{p}"));
        }
        out.push('\n');
        for &n in &self.ns {
            let mut row = format!("{n},reformulation");
            for &p in &self.ps {
                let cell = self.cell(n, p).expect("full grid");
                match (&cell.median_reformulation, &cell.error) {
                    (Some(t), _) => row.push_str(&format!(",{t:.6}")),
                    (None, _) => row.push_str(",error"),
                }
            }
            out.push_str(&row);
            out.push('\n');
            let mut row = format!("{n},svd");
            for &p in &self.ps {
                let cell = self.cell(n, p).expect("full grid");
                row.push_str(&format!(",{:.6}", cell.median_svd));
            }
            out.push_str(&row);
            out.push('\n');
        }
        out.push_str(&format!(
            "# k={} reps={} seed={} rng={}\n",
            self.k, self.reps, self.seed, self.rng
        ));
        out
    }

    /// Time ratios (reformulation / SVD) as CSV, one row per n.
    pub fn ratio_csv(&self) -> String {
        let mut out = String::from("n");
        for p in &self.ps {
            out.push_str(&format!(",p{p}"));
        }
        out.push('\n');
        for &n in &self.ns {
            let mut row = format!("{n}");
            for &p in &self.ps {
                let cell = self.cell(n, p).expect("full grid");
                match cell.ratio {
                    Some(r) => row.push_str(&format!(",{r:.1}")),
                    None => row.push_str(",error"),
                }
            }
            out.push_str(&row);
            out.push('\n');
        }
        out.push_str(&format!(
            "# k={} reps={} seed={} rng={}\n",
            self.k, self.reps, self.seed, self.rng
        ));
        out
    }

    /// Aligned text table of medians and ratios.
    pub fn text_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "median seconds over {} reps (k = {}, rng = {}, seed = {})\n",
            self.reps, self.k, self.rng, self.seed
        ));
        out.push_str(&format!("{:>6} {:>16}", "n", "method"));
        for p in &self.ps {
            out.push_str(&format!(" {:>12}", format!("p={p}")));
        }
        out.push('\n');
        for &n in &self.ns {
            for (label, pick) in [
                ("reformulation", true),
                ("svd", false),
            ] {
                out.push_str(&format!("{n:>6} {label:>16}"));
                for &p in &self.ps {
                    let cell = self.cell(n, p).expect("full grid");
                    let text = if pick {
                        match cell.median_reformulation {
                            Some(t) => format!("{t:.4}"),
                            None => "error".to_string(),
                        }
                    } else {
                        format!("{:.4}", cell.median_svd)
                    };
                    out.push_str(&format!(" {text:>12}"));
                }
                out.push('\n');
            }
        }
        out.push_str("ratio (reformulation / svd)\n");
        for &n in &self.ns {
            out.push_str(&format!("{n:>6} {:>16}", ""));
            for &p in &self.ps {
                let cell = self.cell(n, p).expect("full grid");
                let text = match cell.ratio {
                    Some(r) => format!("{r:.1}"),
                    None => "error".to_string(),
                };
                out.push_str(&format!(" {text:>12}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Time both rotation paths over a grid of (n, p) cells.
///
/// Per replicate a fresh table is simulated (generation excluded from
/// the timing); each path then runs fit + rotation end to end with
/// k = 2. The two rotated squared-loading matrices must agree within
/// 1e-8 or the run aborts with [`Error::PathMismatch`].
pub fn bench(grid: &[(usize, usize)], opts: &BenchOptions) -> Result<BenchReport> {
    let mut ns = Vec::new();
    let mut ps = Vec::new();
    for &(n, p) in grid {
        SimConfig::new(n, p, 0)?;
        if !ns.contains(&n) {
            ns.push(n);
        }
        if !ps.contains(&p) {
            ps.push(p);
        }
    }
    if grid.is_empty() {
        return Err(Error::InvalidSimConfig("empty grid".to_string()));
    }

    let mut cells = Vec::with_capacity(ns.len() * ps.len());
    for &n in &ns {
        for &p in &ps {
            cells.push(bench_cell(n, p, opts)?);
        }
    }

    Ok(BenchReport {
        cells,
        ns,
        ps,
        reps: opts.reps,
        seed: opts.seed,
        rng: RNG_NAME,
        k: 2,
    })
}

fn bench_cell(n: usize, p: usize, opts: &BenchOptions) -> Result<BenchCell> {
    let bytes = quantification_bytes(n, p);
    let fits_in_budget = bytes <= opts.memory_budget_bytes;

    let mut svd_times = Vec::with_capacity(opts.reps);
    let mut ref_times = Vec::with_capacity(opts.reps);

    for rep in 0..opts.reps {
        let seed = cell_seed(opts.seed, n, p, rep);
        let config = SimConfig::new(n, p, seed)?;
        let table = simbench::simulate(&config);

        let start = Instant::now();
        let recoded = recode(&table)?;
        let model = fit(&recoded, 2)?;
        let rotated = rotate(&model, opts.tol, opts.max_sweeps)?;
        svd_times.push(start.elapsed().as_secs_f64());

        if fits_in_budget {
            let start = Instant::now();
            let qs = build_quantification(&table)?;
            let original = fit_original(&qs, 2)?;
            let rotated_original = rotate_original(&original, &qs, opts.tol, opts.max_sweeps);
            ref_times.push(start.elapsed().as_secs_f64());

            let max_dev = rotated
                .squared_loadings
                .iter()
                .zip(rotated_original.squared_loadings.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if max_dev > 1e-8 {
                return Err(Error::PathMismatch { n, p, max_dev });
            }
        }
    }

    let median_svd = median(&mut svd_times);
    let (median_reformulation, ratio, error) = if fits_in_budget {
        let med = median(&mut ref_times);
        (Some(med), Some(med / median_svd), None)
    } else {
        (
            None,
            None,
            Some(format!(
                "memory budget exceeded: quantification path needs {} MiB",
                bytes >> 20
            )),
        )
    };

    Ok(BenchCell {
        n,
        p,
        median_svd,
        median_reformulation,
        ratio,
        error,
    })
}

fn cell_seed(base: u64, n: usize, p: usize, rep: usize) -> u64 {
    // splitmix64 over the packed coordinates.
    let mut z = base
        .wrapping_add((n as u64) << 42)
        .wrapping_add((p as u64) << 21)
        .wrapping_add(rep as u64)
        .wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite timings"));
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}
