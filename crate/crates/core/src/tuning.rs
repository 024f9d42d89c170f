//! Picking the fastest k-NN algorithm for a tree.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::dataset::PointStore;
use crate::metrics::Metric;
use crate::search::Algorithm;
use crate::tree::Tree;
use crate::Result;

/// Panel depth used when none is given.
pub const DEFAULT_DEPTH: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct TuningResult {
    pub chosen: Algorithm,
    /// Total wall time of each algorithm over the panel.
    pub times: BTreeMap<Algorithm, Duration>,
    /// Original indices of the panel queries.
    pub panel: Vec<usize>,
    pub k: usize,
}

#[derive(Serialize)]
struct TuningJson<'a> {
    chosen: &'a str,
    times_us: BTreeMap<&'a str, u128>,
    panel_size: usize,
    k: usize,
}

impl TuningResult {
    pub fn to_json(&self) -> String {
        let json = TuningJson {
            chosen: self.chosen.name(),
            times_us: self.times.iter().map(|(a, t)| (a.name(), t.as_micros())).collect(),
            panel_size: self.panel.len(),
            k: self.k,
        };
        serde_json::to_string(&json).expect("plain struct serializes")
    }
}

/// Times the three tree algorithms on the centers of the clusters at
/// `min(depth, max depth)` and returns the fastest. Each algorithm gets one
/// untimed warmup pass over the panel.
pub fn auto_tune<S, M>(tree: &Tree<S, M>, k: usize, depth: usize) -> Result<TuningResult>
where
    S: PointStore,
    M: Metric<S::Point>,
{
    let depth = depth.min(tree.max_depth());
    let centers: Vec<usize> = tree.clusters().iter().filter(|c| c.depth == depth).map(|c| c.center).collect();

    let mut times = BTreeMap::new();
    for algo in Algorithm::TREE {
        for &p in &centers {
            algo.knn(tree, tree.point(p), k)?;
        }
        let start = Instant::now();
        for &p in &centers {
            std::hint::black_box(algo.knn(tree, tree.point(p), k)?);
        }
        times.insert(algo, start.elapsed());
    }
    let chosen = Algorithm::TREE.into_iter().min_by_key(|a| (times[a], *a)).expect("three algorithms");
    Ok(TuningResult { chosen, times, panel: centers.iter().map(|&p| tree.original_index(p)).collect(), k })
}
