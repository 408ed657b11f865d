//! Parameter grids fanned out over a bounded worker pool. Each run writes
//! into its own subdirectory, so workers never share files.

use std::num::NonZeroUsize;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::{create_dir, write_file};
use crate::run::run;

pub const MAX_WORKERS: usize = 8;

/// One `key=v1,v2,...` axis of the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub key: String,
    pub values: Vec<f64>,
}

const KEYS: [&str; 6] = ["alpha", "dt", "n", "t-end", "sample-every", "seed"];

impl std::str::FromStr for Axis {
    type Err = String;

    fn from_str(text: &str) -> std::result::Result<Self, String> {
        let (key, list) = text
            .split_once('=')
            .ok_or_else(|| format!("expected key=v1,v2,..., got {text:?}"))?;
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(format!("cannot sweep {key:?}; choose one of {}", KEYS.join(", ")));
        }
        let values = list
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if values.is_empty() {
            return Err(format!("no values for {key}"));
        }
        Ok(Axis { key, values })
    }
}

fn apply(cfg: &mut RunConfig, key: &str, value: f64) -> Result<()> {
    let whole = || {
        if value >= 0.0 && value.fract() == 0.0 {
            Ok(value as u64)
        } else {
            Err(CliError::Config(format!("{key} needs a nonnegative integer, got {value}")))
        }
    };
    match key {
        "alpha" => cfg.alpha = value,
        "dt" => cfg.dt = value,
        "t-end" => cfg.t_end = value,
        "sample-every" => cfg.sample_every = value,
        "n" => cfg.n = whole()? as usize,
        "seed" => cfg.seed = whole()?,
        _ => unreachable!("axis keys are checked when parsed"),
    }
    Ok(())
}

/// Axis values of one grid point, in axis order.
pub type Point = Vec<(String, f64)>;

/// Cartesian product of the axes, first axis varying slowest.
pub fn expand(base: &RunConfig, axes: &[Axis]) -> Result<Vec<(Point, RunConfig)>> {
    let mut points: Vec<Point> = vec![Vec::new()];
    for axis in axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.values.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push((axis.key.clone(), v));
                    q
                })
            })
            .collect();
    }
    points
        .into_iter()
        .enumerate()
        .map(|(i, point)| {
            let mut cfg = base.clone();
            for (k, v) in &point {
                apply(&mut cfg, k, *v)?;
            }
            cfg.out = base.out.join(format!("run-{i:03}"));
            Ok((point, cfg))
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct Entry {
    index: usize,
    parameters: Vec<(String, f64)>,
    out: String,
    exit_code: u8,
    content_hash: Option<String>,
    error: Option<String>,
}

/// Runs every grid point and writes `sweep.json`; returns the worst exit code.
pub fn sweep(base: &RunConfig, axes: &[Axis]) -> Result<u8> {
    let runs = expand(base, axes)?;
    for (_, cfg) in &runs {
        cfg.validate()?;
    }
    let workers = std::thread::available_parallelism()
        .map(NonZeroUsize::get)
        .unwrap_or(1)
        .min(MAX_WORKERS)
        .min(runs.len())
        .max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;

    let entries: Vec<Entry> = pool.install(|| {
        runs.par_iter()
            .enumerate()
            .map(|(index, (point, cfg))| {
                let (exit_code, content_hash, error) = match run(cfg) {
                    Ok(report) => (report.status.exit_code(), Some(report.content_hash), None),
                    Err(e) => (crate::CONFIG_ERROR, None, Some(e.to_string())),
                };
                Entry {
                    index,
                    parameters: point.clone(),
                    out: cfg.out.display().to_string(),
                    exit_code,
                    content_hash,
                    error,
                }
            })
            .collect()
    });

    create_dir(&base.out)?;
    let worst = entries.iter().map(|e| e.exit_code).max().unwrap_or(0);
    let text = serde_json::to_string_pretty(&entries)? + "\n";
    write_file(&base.out, "sweep.json", &text)?;
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axes_parse_and_expand() {
        let a: Axis = "alpha=0.5,1".parse().unwrap();
        let b: Axis = "t_end=1,2,3".parse().unwrap();
        assert_eq!(b.key, "t-end");
        assert!("beta=1".parse::<Axis>().is_err());
        assert!("alpha".parse::<Axis>().is_err());
        assert!("alpha=x".parse::<Axis>().is_err());

        let grid = expand(&RunConfig::default(), &[a, b]).unwrap();
        assert_eq!(grid.len(), 6);
        assert_eq!(grid[1].1.alpha, 0.5);
        assert_eq!(grid[1].1.t_end, 2.0);
        assert_eq!(grid[5].1.alpha, 1.0);
        assert!(grid[5].1.out.ends_with("run-005"));
    }

    #[test]
    fn integer_keys_reject_fractions() {
        let axis: Axis = "n=64.5".parse().unwrap();
        assert!(expand(&RunConfig::default(), &[axis]).is_err());
    }
}
