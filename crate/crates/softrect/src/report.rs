//! Benchmark harness, cross-objective ratio tables, and SVG layout
//! rendering.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num::Zero;
use rayon::prelude::*;

use crate::clws::solve_peri_sum;
use crate::domain::{
    evaluate, realize, Instance, Layout, ObjectiveKind, ObjectiveValue, Partition,
};
use crate::error::Result;
use crate::exact::{
    solve_aspect_binary_search, solve_aspect_exact_bb, solve_peri_max_bb, SearchStatus,
};
use crate::scalar::{format_rational, rational_to_f64, sig6, Rational};

/// Solvers the benchmark harness can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverId {
    PeriSum,
    PeriMaxBb,
    AspectBb,
    AspectBinSearch,
}

impl SolverId {
    pub const ALL: [SolverId; 4] = [
        SolverId::PeriSum,
        SolverId::PeriMaxBb,
        SolverId::AspectBb,
        SolverId::AspectBinSearch,
    ];
}

impl std::fmt::Display for SolverId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverId::PeriSum => "peri-sum",
            SolverId::PeriMaxBb => "peri-max-bb",
            SolverId::AspectBb => "aspect-bb",
            SolverId::AspectBinSearch => "aspect-binsearch",
        })
    }
}

impl std::str::FromStr for SolverId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "peri-sum" => Ok(SolverId::PeriSum),
            "peri-max-bb" => Ok(SolverId::PeriMaxBb),
            "aspect-bb" => Ok(SolverId::AspectBb),
            "aspect-binsearch" => Ok(SolverId::AspectBinSearch),
            other => Err(format!("unknown solver {other:?}")),
        }
    }
}

/// One benchmark line: what a solver did on one instance.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub name: String,
    pub n: usize,
    pub solver: String,
    pub nodes: u64,
    pub time_s: f64,
    pub lb: f64,
    pub ub: f64,
    /// Bisection iteration count; empty for other solvers.
    pub iters: Option<usize>,
    pub status: String,
}

fn run_solver(instance: &Instance, solver: SolverId, time_limit: Option<Duration>) -> BenchRow {
    let name = instance.name().unwrap_or("unnamed").to_string();
    let n = instance.len();
    let started = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(|| -> Result<BenchRow> {
        Ok(match solver {
            SolverId::PeriSum => {
                let (_, value) = solve_peri_sum(instance)?;
                let value = rational_to_f64(&value);
                BenchRow {
                    name: name.clone(),
                    n,
                    solver: solver.to_string(),
                    nodes: 0,
                    time_s: started.elapsed().as_secs_f64(),
                    lb: value,
                    ub: value,
                    iters: None,
                    status: SearchStatus::Optimal.to_string(),
                }
            }
            SolverId::PeriMaxBb => {
                let (_, stats) = solve_peri_max_bb(instance, time_limit, None)?;
                BenchRow {
                    name: name.clone(),
                    n,
                    solver: solver.to_string(),
                    nodes: stats.nodes,
                    time_s: stats.elapsed,
                    lb: stats.bound_lb,
                    ub: stats.bound_ub,
                    iters: None,
                    status: stats.status.to_string(),
                }
            }
            SolverId::AspectBb => {
                let (_, stats) = solve_aspect_exact_bb(instance, time_limit)?;
                BenchRow {
                    name: name.clone(),
                    n,
                    solver: solver.to_string(),
                    nodes: stats.nodes,
                    time_s: stats.elapsed,
                    lb: stats.bound_lb,
                    ub: stats.bound_ub,
                    iters: None,
                    status: stats.status.to_string(),
                }
            }
            SolverId::AspectBinSearch => {
                let outcome = solve_aspect_binary_search(instance, time_limit)?;
                BenchRow {
                    name: name.clone(),
                    n,
                    solver: solver.to_string(),
                    nodes: outcome.stats.nodes,
                    time_s: outcome.stats.elapsed,
                    lb: outcome.stats.bound_lb,
                    ub: rational_to_f64(&outcome.value),
                    iters: Some(outcome.trace.iterations.len()),
                    status: outcome.stats.status.to_string(),
                }
            }
        })
    }));
    let mut row = match outcome {
        Ok(Ok(row)) => row,
        Ok(Err(err)) => BenchRow {
            name,
            n,
            solver: solver.to_string(),
            nodes: 0,
            time_s: started.elapsed().as_secs_f64(),
            lb: f64::NAN,
            ub: f64::NAN,
            iters: None,
            status: format!("error: {err}"),
        },
        Err(_) => BenchRow {
            name,
            n,
            solver: solver.to_string(),
            nodes: 0,
            time_s: started.elapsed().as_secs_f64(),
            lb: f64::NAN,
            ub: f64::NAN,
            iters: None,
            status: "error: panic".to_string(),
        },
    };
    // A timed-out run reports the limit itself as its time.
    if row.status == SearchStatus::TimeLimit.to_string() {
        if let Some(limit) = time_limit {
            row.time_s = limit.as_secs_f64();
        }
    }
    row
}

/// Runs every solver on every instance (instances outer, solvers
/// inner); `jobs > 1` runs rows concurrently while keeping the output
/// in input order. A solver failure produces an `error` row and the
/// run continues.
pub fn run_bench(
    instances: &[Instance],
    solvers: &[SolverId],
    time_limit: Option<Duration>,
    jobs: usize,
) -> (Vec<BenchRow>, String) {
    let tasks: Vec<(&Instance, SolverId)> = instances
        .iter()
        .flat_map(|inst| solvers.iter().map(move |&s| (inst, s)))
        .collect();
    let rows: Vec<BenchRow> = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool");
        pool.install(|| {
            tasks
                .par_iter()
                .map(|&(inst, solver)| run_solver(inst, solver, time_limit))
                .collect()
        })
    } else {
        tasks
            .iter()
            .map(|&(inst, solver)| run_solver(inst, solver, time_limit))
            .collect()
    };
    let csv = rows_to_csv(&rows);
    (rows, csv)
}

/// CSV with the fixed header `name,n,solver,nodes,time_s,lb,ub,iters,status`.
pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["name", "n", "solver", "nodes", "time_s", "lb", "ub", "iters", "status"])
        .expect("in-memory write");
    for row in rows {
        writer
            .write_record([
                row.name.as_str(),
                &row.n.to_string(),
                &row.solver,
                &row.nodes.to_string(),
                &format!("{:.3}", row.time_s),
                &sig6(row.lb),
                &sig6(row.ub),
                &row.iters.map(|i| i.to_string()).unwrap_or_default(),
                &row.status,
            ])
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf8")
}

/// Parses [`rows_to_csv`] output back.
pub fn rows_from_csv(text: &str) -> Result<Vec<BenchRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        let get = |i: usize| record.get(i).unwrap_or("").to_string();
        rows.push(BenchRow {
            name: get(0),
            n: get(1).parse().unwrap_or(0),
            solver: get(2),
            nodes: get(3).parse().unwrap_or(0),
            time_s: get(4).parse().unwrap_or(f64::NAN),
            lb: get(5).parse().unwrap_or(f64::NAN),
            ub: get(6).parse().unwrap_or(f64::NAN),
            iters: get(7).parse().ok(),
            status: get(8),
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------
// Cross-objective evaluation
// ---------------------------------------------------------------------

/// How much worse the optimum of objective `solved_as` gets when scored
/// under `evaluated_as`: `phi_y(s*_x) / phi_y(s*_y)`, at least 1 when
/// the inputs really are optimal.
#[derive(Clone, Debug)]
pub struct RatioCell {
    pub solved_as: ObjectiveKind,
    pub evaluated_as: ObjectiveKind,
    pub ratio: f64,
}

fn exact_value(instance: &Instance, partition: &Partition, kind: ObjectiveKind) -> Result<Rational> {
    let layout = realize(instance, partition)?;
    Ok(match evaluate(&layout, kind) {
        ObjectiveValue::Exact(v) => v,
        ObjectiveValue::Sqrt(_) => unreachable!("ratio objectives are rational"),
    })
}

/// The full 3x3 ratio table for certified optimal partitions of the
/// three objectives; diagonal entries are exactly 1.
pub fn cross_eval(
    instance: &Instance,
    opt_peri_sum: &Partition,
    opt_peri_max: &Partition,
    opt_aspect: &Partition,
) -> Result<[[RatioCell; 3]; 3]> {
    let kinds = [
        ObjectiveKind::PeriSum,
        ObjectiveKind::PeriMax,
        ObjectiveKind::AspectRatio,
    ];
    let partitions = [opt_peri_sum, opt_peri_max, opt_aspect];
    let mut rows: Vec<[RatioCell; 3]> = Vec::with_capacity(3);
    for (x, &solved) in partitions.iter().enumerate() {
        let mut row: Vec<RatioCell> = Vec::with_capacity(3);
        for (y, &kind) in kinds.iter().enumerate() {
            let ratio = if x == y {
                1.0
            } else {
                let numer = exact_value(instance, solved, kind)?;
                let denom = exact_value(instance, partitions[y], kind)?;
                rational_to_f64(&(numer / denom))
            };
            row.push(RatioCell {
                solved_as: kinds[x],
                evaluated_as: kind,
                ratio,
            });
        }
        rows.push(row.try_into().map_err(|_| ()).expect("three cells"));
    }
    Ok(rows.try_into().map_err(|_| ()).expect("three rows"))
}

/// Ratio table as CSV (`solved-as` rows, `evaluated-as` columns, six
/// significant digits).
pub fn cross_eval_csv(table: &[[RatioCell; 3]; 3]) -> String {
    let mut out = String::from("solved_as,peri-sum,peri-max,aspect\n");
    for row in table {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row[0].solved_as,
            sig6(row[0].ratio),
            sig6(row[1].ratio),
            sig6(row[2].ratio)
        ));
    }
    out
}

// ---------------------------------------------------------------------
// SVG rendering
// ---------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub struct RenderOptions {
    /// Pixel width the region's length is scaled to.
    pub width_px: f64,
    /// Draw the area value at each cell's center.
    pub labels: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            width_px: 640.0,
            labels: true,
        }
    }
}

fn px(v: f64) -> String {
    format!("{v:.2}")
}

/// Renders a layout as SVG: the outer region, one full-width line per
/// inner layer boundary, one vertical segment per boundary within a
/// layer, a rect per cell, and optional area labels. Output is
/// deterministic.
pub fn render_svg(layout: &Layout, options: &RenderOptions) -> String {
    let l1 = rational_to_f64(layout.l1());
    let scale = options.width_px / l1;
    let total_height: Rational = layout.layer_heights().iter().sum();
    let height_px = rational_to_f64(&total_height) * scale;

    let mut cells = String::new();
    let mut vcuts = String::new();
    let mut labels = String::new();
    let mut hcuts = String::new();

    // Rectangles grouped per layer in index order.
    let mut by_layer: Vec<Vec<usize>> = vec![Vec::new(); layout.layer_heights().len()];
    for (i, rect) in layout.rects().iter().enumerate() {
        by_layer[rect.layer].push(i);
    }

    let mut y = Rational::zero();
    for (k, members) in by_layer.iter().enumerate() {
        let band_top = rational_to_f64(&y) * scale;
        let band_height = rational_to_f64(&layout.layer_heights()[k]) * scale;
        if k > 0 {
            hcuts.push_str(&format!(
                "  <line class=\"hcut\" x1=\"0\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"black\"/>\n",
                px(band_top),
                px(options.width_px),
            ));
        }
        let mut x = Rational::zero();
        for (pos, &i) in members.iter().enumerate() {
            let rect = &layout.rects()[i];
            let cell_left = rational_to_f64(&x) * scale;
            let cell_width = rational_to_f64(&rect.width) * scale;
            if pos > 0 {
                vcuts.push_str(&format!(
                    "  <line class=\"vcut\" x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n",
                    px(cell_left),
                    px(band_top),
                    px(band_top + band_height),
                ));
            }
            cells.push_str(&format!(
                "  <rect class=\"cell\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"gray\" stroke-width=\"0.5\"/>\n",
                px(cell_left),
                px(band_top),
                px(cell_width),
                px(band_height),
            ));
            if options.labels {
                let area = &rect.width * &rect.height;
                labels.push_str(&format!(
                    "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" dominant-baseline=\"middle\" font-size=\"{}\">{}</text>\n",
                    px(cell_left + cell_width / 2.0),
                    px(band_top + band_height / 2.0),
                    px((band_height.min(cell_width) * 0.3).max(6.0)),
                    format_rational(&area),
                ));
            }
            x += &rect.width;
        }
        y += &layout.layer_heights()[k];
    }

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n",
        px(options.width_px),
        px(height_px),
    ));
    out.push_str(&cells);
    out.push_str(&hcuts);
    out.push_str(&vcuts);
    out.push_str(&labels);
    out.push_str(&format!(
        "  <rect class=\"outer\" x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n",
        px(options.width_px),
        px(height_px),
    ));
    out.push_str("</svg>\n");
    out
}
