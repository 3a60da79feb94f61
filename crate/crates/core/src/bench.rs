//! Timing grid over generated instances, written as CSV.
//!
//! A grid spec is a list of `key=value` settings separated by spaces or `;`:
//!
//! - `sizes=8,16,32`: term counts (required)
//! - `levels=1,2,3`: belief levels (required)
//! - `seeds=5`: seeds `0..5` per cell (default 3)
//! - `names=3`, `ratio=2` (clauses per term), `width=3`
//!
//! Cells run in grid order, sizes outermost.

use std::fmt::Write as _;
use std::time::Instant;

use thiserror::Error;

use crate::gen::{gen_random_instance, GenError, GenParams};
use crate::solver::{decide, Options, SolveError};

pub const CSV_HEADER: &str = "seed,terms,names,clauses,k,answer,wall_ns,closures";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    pub sizes: Vec<usize>,
    pub levels: Vec<u32>,
    pub seeds: u64,
    pub names: usize,
    pub ratio: usize,
    pub width: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchRow {
    pub seed: u64,
    pub terms: usize,
    pub names: usize,
    pub clauses: usize,
    pub k: u32,
    pub answer: bool,
    pub wall_ns: u128,
    pub closures: u64,
}

impl BenchRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.seed,
            self.terms,
            self.names,
            self.clauses,
            self.k,
            if self.answer { "YES" } else { "NO" },
            self.wall_ns,
            self.closures
        )
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("grid spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

pub fn parse_grid(spec: &str) -> Result<Grid, BenchError> {
    let bad = |m: String| BenchError::Spec(m);
    let mut grid = Grid {
        sizes: Vec::new(),
        levels: Vec::new(),
        seeds: 3,
        names: 3,
        ratio: 2,
        width: 3,
    };
    for item in spec.split(|c: char| c == ';' || c.is_whitespace()).filter(|s| !s.is_empty()) {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| bad(format!("`{item}` is not key=value")))?;
        let list = |v: &str| -> Result<Vec<usize>, BenchError> {
            v.split(',')
                .map(|x| x.parse::<usize>().map_err(|_| bad(format!("bad number `{x}` for {key}"))))
                .collect()
        };
        let one = |v: &str| -> Result<usize, BenchError> {
            v.parse::<usize>().map_err(|_| bad(format!("bad number `{v}` for {key}")))
        };
        match key {
            "sizes" => grid.sizes = list(value)?,
            "levels" => grid.levels = list(value)?.into_iter().map(|k| k as u32).collect(),
            "seeds" => grid.seeds = one(value)? as u64,
            "names" => grid.names = one(value)?,
            "ratio" => grid.ratio = one(value)?,
            "width" => grid.width = one(value)?,
            _ => return Err(bad(format!("unknown key `{key}`"))),
        }
    }
    if grid.sizes.is_empty() || grid.levels.is_empty() {
        return Err(bad("both `sizes` and `levels` are required".into()));
    }
    Ok(grid)
}

pub fn run_grid(grid: &Grid) -> Result<Vec<BenchRow>, BenchError> {
    let mut rows = Vec::new();
    for &size in &grid.sizes {
        for &k in &grid.levels {
            for seed in 0..grid.seeds {
                rows.push(run_cell(grid, size, k, seed)?);
            }
        }
    }
    Ok(rows)
}

pub fn run_cell(grid: &Grid, size: usize, k: u32, seed: u64) -> Result<BenchRow, BenchError> {
    let params = GenParams {
        terms: size,
        names: grid.names,
        clauses: grid.ratio * size,
        width: grid.width,
        level: k,
    };
    let inst = gen_random_instance(seed, params)?;
    let start = Instant::now();
    let v = decide(&inst, Options::default())?;
    let wall_ns = start.elapsed().as_nanos();
    Ok(BenchRow {
        seed,
        terms: params.terms,
        names: params.names,
        clauses: params.clauses,
        k,
        answer: v.answer,
        wall_ns,
        closures: v.stats.closures,
    })
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in rows {
        let _ = writeln!(out, "{}", r.to_csv());
    }
    out
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        (values[m - 1] + values[m]) / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spec() {
        let g = parse_grid("sizes=4,8 levels=1;seeds=2 names=2").unwrap();
        assert_eq!(g.sizes, [4, 8]);
        assert_eq!(g.levels, [1]);
        assert_eq!((g.seeds, g.names, g.ratio, g.width), (2, 2, 2, 3));
        assert!(parse_grid("sizes=4").is_err());
        assert!(parse_grid("sizes=4 levels=x").is_err());
        assert!(parse_grid("sizes=4 levels=1 speed=9").is_err());
    }

    #[test]
    fn rows_follow_grid_order() {
        let g = parse_grid("sizes=3,4 levels=0,1 seeds=2").unwrap();
        let rows = run_grid(&g).unwrap();
        let keys: Vec<(usize, u32, u64)> = rows.iter().map(|r| (r.terms, r.k, r.seed)).collect();
        assert_eq!(keys[..4], [(3, 0, 0), (3, 0, 1), (3, 1, 0), (3, 1, 1)]);
        let csv = to_csv(&rows);
        assert!(csv.starts_with("seed,terms,names,clauses,k,answer,wall_ns,closures\n"));
        assert!(csv.lines().skip(1).all(|l| l.split(',').count() == 8));
    }

    #[test]
    fn slope_and_median() {
        let pts = [(1.0, 1.0), (2.0, 8.0), (4.0, 64.0)];
        assert!((log_log_slope(&pts) - 3.0).abs() < 1e-9);
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
