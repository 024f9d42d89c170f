//! The divisive cluster tree.
//!
//! Each cluster is split around two poles: the point farthest from its
//! center, and the point farthest from that one. Points go to whichever pole
//! is nearer (ties to the left). Splitting continues until clusters hold a
//! single point, only duplicates of one point, or fail the user's
//! [`PartitionCriteria`].
//!
//! Clusters never own index lists once the dataset has been reordered
//! depth-first: every cluster's points then occupy the contiguous range
//! `offset..offset + cardinality` of the dataset.

use std::fmt;
use std::io::{BufRead, Read, Write};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{check_bijection, Dataset, PointStore};
use crate::metrics::Metric;
use crate::utils::{mix_seed, weighted_percentile};
use crate::{Error, Result};

/// Clusters at or below this cardinality use every point when looking for
/// their center instead of a `ceil(sqrt(n))` sample.
pub const EXACT_MEDIAN_CARDINALITY: usize = 100;

const PARALLEL_CARDINALITY: usize = 4096;

/// How each cluster is split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Points go to the nearer pole.
    Unbalanced,
    /// Points are ranked by `f(l, x) - f(r, x)` and the first half goes left.
    Balanced,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Unbalanced => "unbalanced",
            Strategy::Balanced => "balanced",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unbalanced" => Ok(Strategy::Unbalanced),
            "balanced" => Ok(Strategy::Balanced),
            _ => Err(Error::Input(format!("unknown strategy {s:?}"))),
        }
    }
}

/// Conditions a cluster must meet to be split further.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionCriteria {
    /// Split only clusters with more than this many points.
    pub min_cardinality: usize,
    /// Split only clusters with a radius above this.
    pub min_radius: f64,
    /// Split only clusters shallower than this.
    pub max_depth: Option<usize>,
}

impl Default for PartitionCriteria {
    fn default() -> Self {
        Self { min_cardinality: 1, min_radius: 0.0, max_depth: None }
    }
}

impl PartitionCriteria {
    /// Whether a cluster with these properties should be split. Clusters of
    /// one point, or of duplicates of one point, are never split.
    pub fn allows(&self, cardinality: usize, radius: f64, depth: usize) -> bool {
        cardinality > 1
            && radius > 0.0
            && cardinality > self.min_cardinality
            && radius > self.min_radius
            && self.max_depth.is_none_or(|m| depth < m)
    }
}

/// A node of the tree.
///
/// `center`, `arg_radial`, and `Children::right_pole` are stored positions
/// in the tree's dataset; use [`Tree::original_index`] for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub center: usize,
    pub radius: f64,
    pub offset: usize,
    pub cardinality: usize,
    pub lfd: f64,
    pub depth: usize,
    /// The point farthest from the center. This is the left pole when the
    /// cluster is split.
    pub arg_radial: usize,
    pub children: Option<Children>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Children {
    /// Cluster ids within the tree.
    pub left: usize,
    pub right: usize,
    pub right_pole: usize,
    /// Distance between the two poles.
    pub pole_distance: f64,
}

impl Cluster {
    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }

    pub fn is_singleton(&self) -> bool {
        self.cardinality == 1 || self.radius == 0.0
    }
}

/// Where a cluster's points live.
#[derive(Debug, Clone)]
enum Layout {
    /// Cluster points are `offset..offset + cardinality` in the dataset.
    Permuted,
    /// Each cluster keeps a list of the stored positions of its points, and
    /// `rank[position]` is the position's index in depth-first order.
    Indexed { members: Vec<Vec<usize>>, rank: Vec<usize> },
}

/// Stored positions of a cluster's points.
pub enum Members<'a> {
    Range(std::ops::Range<usize>),
    List(std::iter::Copied<std::slice::Iter<'a, usize>>),
}

impl Iterator for Members<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        match self {
            Members::Range(r) => r.next(),
            Members::List(l) => l.next(),
        }
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        match self {
            Members::Range(r) => r.size_hint(),
            Members::List(l) => l.size_hint(),
        }
    }
}

impl ExactSizeIterator for Members<'_> {}

/// A cluster tree over a dataset, owning the dataset and distance function.
#[derive(Debug, Clone)]
pub struct Tree<S, M> {
    data: Dataset<S>,
    metric: M,
    clusters: Vec<Cluster>,
    criteria: PartitionCriteria,
    strategy: Strategy,
    seed: u64,
    layout: Layout,
}

/// Index of the member minimizing the sum of distances to all other members.
/// Ties go to the smallest original index.
pub fn geometric_median<S, M>(data: &Dataset<S>, metric: &M, positions: &[usize]) -> usize
where
    S: PointStore,
    M: Metric<S::Point>,
{
    assert!(!positions.is_empty(), "geometric median of an empty set");
    let n = positions.len();
    let mut sums = vec![0.0_f64; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = metric.distance(data.get(positions[i]), data.get(positions[j]));
            sums[i] += d;
            sums[j] += d;
        }
    }
    let best = (0..n)
        .min_by(|&a, &b| {
            sums[a]
                .total_cmp(&sums[b])
                .then_with(|| data.original_index(positions[a]).cmp(&data.original_index(positions[b])))
        })
        .expect("non-empty");
    positions[best]
}

/// `log2(|C| / |{x in C : f(c, x) <= r / 2}|)` from the center-to-member
/// distances. Zero for a cluster of radius zero.
pub fn local_fractal_dimension(radius: f64, center_distances: &[f64]) -> f64 {
    if radius == 0.0 || center_distances.is_empty() {
        return 0.0;
    }
    let half = radius / 2.0;
    let inside = center_distances.iter().filter(|&&d| d <= half).count();
    if inside == 0 {
        // Only possible if the center is not a member; treat it as one.
        return (center_distances.len() as f64).log2();
    }
    (center_distances.len() as f64 / inside as f64).log2()
}

/// Index of the maximum value, ties to the smallest key.
fn arg_max_by_key(values: &[f64], key: impl Fn(usize) -> usize) -> usize {
    let mut best = 0;
    for i in 1..values.len() {
        if values[i] > values[best] || (values[i] == values[best] && key(i) < key(best)) {
            best = i;
        }
    }
    best
}

struct Node {
    cluster: Cluster,
    split: Option<Box<Split>>,
}

struct Split {
    left: Node,
    right: Node,
    right_pole: usize,
    pole_distance: f64,
}

struct Builder<'a, S, M> {
    data: &'a Dataset<S>,
    metric: &'a M,
    criteria: PartitionCriteria,
    strategy: Strategy,
    seed: u64,
}

impl<S, M> Builder<'_, S, M>
where
    S: PointStore,
    M: Metric<S::Point>,
{
    fn distance(&self, a: usize, b: usize) -> f64 {
        self.metric.distance(self.data.get(a), self.data.get(b))
    }

    fn orig(&self, position: usize) -> usize {
        self.data.original_index(position)
    }

    fn node(&self, idx: &mut [usize], offset: usize, depth: usize) -> Node {
        let cardinality = idx.len();
        let center = if cardinality <= EXACT_MEDIAN_CARDINALITY {
            geometric_median(self.data, self.metric, idx)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(self.seed, &[offset as u64, depth as u64]));
            let size = (cardinality as f64).sqrt().ceil() as usize;
            let sample: Vec<usize> =
                rand::seq::index::sample(&mut rng, cardinality, size).into_iter().map(|i| idx[i]).collect();
            geometric_median(self.data, self.metric, &sample)
        };

        let center_distances: Vec<f64> = idx.iter().map(|&p| self.distance(center, p)).collect();
        let radial = arg_max_by_key(&center_distances, |i| self.orig(idx[i]));
        let radius = center_distances[radial];
        let arg_radial = idx[radial];
        let lfd = local_fractal_dimension(radius, &center_distances);

        let cluster = Cluster { center, radius, offset, cardinality, lfd, depth, arg_radial, children: None };
        if !self.criteria.allows(cardinality, radius, depth) {
            return Node { cluster, split: None };
        }

        let left_pole = arg_radial;
        let left_distances: Vec<f64> = idx.iter().map(|&p| self.distance(left_pole, p)).collect();
        let far = arg_max_by_key(&left_distances, |i| self.orig(idx[i]));
        let right_pole = idx[far];
        let pole_distance = left_distances[far];
        let right_distances: Vec<f64> = idx.iter().map(|&p| self.distance(right_pole, p)).collect();

        let left_len = match self.strategy {
            Strategy::Unbalanced => {
                let (mut left, mut right) = (Vec::new(), Vec::new());
                for (i, &p) in idx.iter().enumerate() {
                    if left_distances[i] <= right_distances[i] {
                        left.push(p);
                    } else {
                        right.push(p);
                    }
                }
                let n = left.len();
                idx[..n].copy_from_slice(&left);
                idx[n..].copy_from_slice(&right);
                n
            }
            Strategy::Balanced => {
                let mut ranked: Vec<(f64, usize, usize)> = idx
                    .iter()
                    .enumerate()
                    .map(|(i, &p)| (left_distances[i] - right_distances[i], self.orig(p), p))
                    .collect();
                ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                for (slot, &(_, _, p)) in idx.iter_mut().zip(&ranked) {
                    *slot = p;
                }
                cardinality.div_ceil(2)
            }
        };
        debug_assert!(left_len > 0 && left_len < cardinality);

        let (left_idx, right_idx) = idx.split_at_mut(left_len);
        let right_offset = offset + left_len;
        let (left, right) = if cardinality >= PARALLEL_CARDINALITY {
            rayon::join(|| self.node(left_idx, offset, depth + 1), || self.node(right_idx, right_offset, depth + 1))
        } else {
            (self.node(left_idx, offset, depth + 1), self.node(right_idx, right_offset, depth + 1))
        };

        Node { cluster, split: Some(Box::new(Split { left, right, right_pole, pole_distance })) }
    }
}

fn flatten(node: Node, out: &mut Vec<Cluster>) -> usize {
    let id = out.len();
    out.push(node.cluster);
    if let Some(split) = node.split {
        let Split { left, right, right_pole, pole_distance } = *split;
        let left = flatten(left, out);
        let right = flatten(right, out);
        out[id].children = Some(Children { left, right, right_pole, pole_distance });
    }
    id
}

/// One row of the per-depth LFD summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LfdRow {
    pub depth: usize,
    pub clusters: usize,
    pub min: f64,
    pub p5: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    pub p95: f64,
    pub max: f64,
}

impl LfdRow {
    pub const CSV_HEADER: &'static str = "depth,clusters,min,p5,p25,p50,p75,p95,max";

    pub fn percentiles(&self) -> [f64; 7] {
        [self.min, self.p5, self.p25, self.p50, self.p75, self.p95, self.max]
    }

    pub fn to_csv(&self) -> String {
        let p = self.percentiles().map(|v| format!("{v:.6}")).join(",");
        format!("{},{},{p}", self.depth, self.clusters)
    }
}

impl<S, M> Tree<S, M>
where
    S: PointStore,
    M: Metric<S::Point>,
{
    /// Builds a tree without reordering the dataset. Clusters keep index
    /// lists until [`Tree::depth_first_reorder`] is called.
    pub fn build(data: Dataset<S>, metric: M, criteria: PartitionCriteria, strategy: Strategy, seed: u64) -> Self {
        let (clusters, order) = Self::partition_all(&data, &metric, criteria, strategy, seed);
        let members = clusters.iter().map(|c| order[c.offset..c.offset + c.cardinality].to_vec()).collect();
        let mut rank = vec![0; order.len()];
        for (r, &p) in order.iter().enumerate() {
            rank[p] = r;
        }
        Self { data, metric, clusters, criteria, strategy, seed, layout: Layout::Indexed { members, rank } }
    }

    /// Builds a tree and reorders the dataset depth-first in one step,
    /// without ever materializing per-cluster index lists.
    pub fn build_permuted(
        data: Dataset<S>,
        metric: M,
        criteria: PartitionCriteria,
        strategy: Strategy,
        seed: u64,
    ) -> Self {
        let (clusters, order) = Self::partition_all(&data, &metric, criteria, strategy, seed);
        let mut tree = Self { data, metric, clusters, criteria, strategy, seed, layout: Layout::Permuted };
        tree.permute(&order);
        tree
    }

    fn partition_all(
        data: &Dataset<S>,
        metric: &M,
        criteria: PartitionCriteria,
        strategy: Strategy,
        seed: u64,
    ) -> (Vec<Cluster>, Vec<usize>) {
        let mut order: Vec<usize> = (0..data.cardinality()).collect();
        let builder = Builder { data, metric, criteria, strategy, seed };
        let root = builder.node(&mut order, 0, 0);
        let mut clusters = Vec::new();
        flatten(root, &mut clusters);
        (clusters, order)
    }

    /// Physically reorders the dataset so each cluster's points are
    /// contiguous, then drops the per-cluster index lists.
    pub fn depth_first_reorder(&mut self) -> Result<()> {
        let order = match &self.layout {
            Layout::Permuted => return Err(Error::State("tree is already reordered".into())),
            Layout::Indexed { members, .. } => members[0].clone(),
        };
        self.permute(&order);
        Ok(())
    }

    fn permute(&mut self, order: &[usize]) {
        let mut new_position = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            new_position[old] = new;
        }
        self.data.apply_permutation(order).expect("depth-first order is a bijection");
        for c in &mut self.clusters {
            c.center = new_position[c.center];
            c.arg_radial = new_position[c.arg_radial];
            if let Some(ch) = c.children.as_mut() {
                ch.right_pole = new_position[ch.right_pole];
            }
        }
        self.layout = Layout::Permuted;
    }

    pub fn is_permuted(&self) -> bool {
        matches!(self.layout, Layout::Permuted)
    }

    pub fn data(&self) -> &Dataset<S> {
        &self.data
    }

    pub fn metric(&self) -> &M {
        &self.metric
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn criteria(&self) -> PartitionCriteria {
        self.criteria
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn cardinality(&self) -> usize {
        self.data.cardinality()
    }

    pub fn root(&self) -> &Cluster {
        &self.clusters[0]
    }

    pub fn cluster(&self, id: usize) -> &Cluster {
        &self.clusters[id]
    }

    /// All clusters in preorder; the root has id 0.
    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    #[inline]
    pub fn point(&self, position: usize) -> &S::Point {
        self.data.get(position)
    }

    #[inline]
    pub fn original_index(&self, position: usize) -> usize {
        self.data.original_index(position)
    }

    /// Stored positions of the points in a cluster.
    #[inline]
    pub fn members(&self, id: usize) -> Members<'_> {
        match &self.layout {
            Layout::Permuted => {
                let c = &self.clusters[id];
                Members::Range(c.offset..c.offset + c.cardinality)
            }
            Layout::Indexed { members, .. } => Members::List(members[id].iter().copied()),
        }
    }

    /// Whether the point at a stored position belongs to a cluster.
    #[inline]
    pub fn contains(&self, id: usize, position: usize) -> bool {
        let c = &self.clusters[id];
        let rank = match &self.layout {
            Layout::Permuted => position,
            Layout::Indexed { rank, .. } => rank[position],
        };
        rank >= c.offset && rank < c.offset + c.cardinality
    }

    /// Whether the pole-based child pruning of rho-NN search is valid for
    /// this tree. Balanced splits do not follow the nearest-pole rule.
    pub fn pole_pruning_valid(&self) -> bool {
        self.strategy == Strategy::Unbalanced
    }

    pub fn max_depth(&self) -> usize {
        self.clusters.iter().map(|c| c.depth).max().unwrap_or(0)
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Cluster> {
        self.clusters.iter().filter(|c| c.is_leaf())
    }

    /// Number of leaf clusters and their mean radius.
    pub fn metric_entropy(&self) -> (usize, f64) {
        let (count, total) = self.leaves().fold((0usize, 0.0_f64), |(n, s), c| (n + 1, s + c.radius));
        (count, total / count as f64)
    }

    /// Number of stored indices across all per-cluster lists. Zero once the
    /// tree has been reordered.
    pub fn index_list_entries(&self) -> usize {
        match &self.layout {
            Layout::Permuted => 0,
            Layout::Indexed { members, .. } => members.iter().map(Vec::len).sum(),
        }
    }

    /// Cardinality-weighted LFD percentiles of the clusters at each depth.
    pub fn lfd_report(&self) -> Vec<LfdRow> {
        let mut by_depth: Vec<Vec<(f64, usize)>> = vec![Vec::new(); self.max_depth() + 1];
        for c in &self.clusters {
            by_depth[c.depth].push((c.lfd, c.cardinality));
        }
        by_depth
            .into_iter()
            .enumerate()
            .filter(|(_, items)| !items.is_empty())
            .map(|(depth, mut items)| {
                items.sort_by(|a, b| a.0.total_cmp(&b.0));
                let p = |q| weighted_percentile(&items, q);
                LfdRow {
                    depth,
                    clusters: items.len(),
                    min: items[0].0,
                    p5: p(5.0),
                    p25: p(25.0),
                    p50: p(50.0),
                    p75: p(75.0),
                    p95: p(95.0),
                    max: items[items.len() - 1].0,
                }
            })
            .collect()
    }

    /// Consumes the tree and returns its dataset.
    pub fn into_data(self) -> Dataset<S> {
        self.data
    }
}

/// JSON header line at the start of a tree file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeHeader {
    pub distance: String,
    pub strategy: Strategy,
    pub seed: u64,
    pub cardinality: usize,
    pub dimensionality: Option<usize>,
    pub permuted: bool,
    pub clusters: usize,
    pub criteria: PartitionCriteria,
}

impl<S, M> Tree<S, M>
where
    S: PointStore,
    M: Metric<S::Point>,
{
    pub fn header(&self) -> TreeHeader {
        TreeHeader {
            distance: self.metric.name().to_string(),
            strategy: self.strategy,
            seed: self.seed,
            cardinality: self.cardinality(),
            dimensionality: self.data.dimensionality(),
            permuted: self.is_permuted(),
            clusters: self.clusters.len(),
            criteria: self.criteria,
        }
    }

    /// Serializes the tree.
    ///
    /// Layout: one JSON header line, the permutation as little-endian u64s,
    /// then one record per cluster in preorder: center (original index, u64),
    /// radius (f64), offset (u64), cardinality (u64), lfd (f64), leaf flag
    /// (u8), arg_radial (original index, u64), and for internal clusters the
    /// right pole (u64) and pole distance (f64). Trees that were not
    /// reordered append each cluster's index list as a u64 length followed
    /// by original indices.
    pub fn write(&self, w: &mut impl Write) -> Result<()> {
        serde_json::to_writer(&mut *w, &self.header())?;
        w.write_all(b"\n")?;
        for &p in self.data.permutation() {
            w.write_all(&(p as u64).to_le_bytes())?;
        }
        let orig = |p: usize| (self.original_index(p) as u64).to_le_bytes();
        for c in &self.clusters {
            w.write_all(&orig(c.center))?;
            w.write_all(&c.radius.to_le_bytes())?;
            w.write_all(&(c.offset as u64).to_le_bytes())?;
            w.write_all(&(c.cardinality as u64).to_le_bytes())?;
            w.write_all(&c.lfd.to_le_bytes())?;
            w.write_all(&[u8::from(c.is_leaf())])?;
            w.write_all(&orig(c.arg_radial))?;
            if let Some(ch) = &c.children {
                w.write_all(&orig(ch.right_pole))?;
                w.write_all(&ch.pole_distance.to_le_bytes())?;
            }
        }
        if let Layout::Indexed { members, .. } = &self.layout {
            for list in members {
                w.write_all(&(list.len() as u64).to_le_bytes())?;
                for &p in list {
                    w.write_all(&orig(p))?;
                }
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    /// Reads a tree written by [`Tree::write`], attaching it to `data` (in
    /// original order) and `metric`.
    pub fn read(reader: &mut impl BufRead, mut data: Dataset<S>, metric: M) -> Result<Self> {
        let header = read_header(reader)?;
        if header.distance != metric.name() {
            return Err(Error::Input(format!(
                "tree was built with {} but {} was requested",
                header.distance,
                metric.name()
            )));
        }
        if header.cardinality != data.cardinality() {
            return Err(Error::Input(format!(
                "tree covers {} points but the dataset has {}",
                header.cardinality,
                data.cardinality()
            )));
        }
        if !data.is_identity() {
            return Err(Error::State("dataset must be in its original order".into()));
        }
        let n = header.cardinality;
        let mut raw = RecordReader { inner: reader };

        let mut permutation = Vec::with_capacity(n);
        for _ in 0..n {
            permutation.push(raw.usize()?);
        }
        check_bijection(&permutation, n)?;
        let mut position = vec![0; n];
        for (pos, &orig) in permutation.iter().enumerate() {
            position[orig] = pos;
        }
        data.apply_permutation(&permutation)?;

        let mut clusters = Vec::with_capacity(header.clusters);
        let mut pending: Vec<Option<(usize, f64)>> = Vec::with_capacity(header.clusters);
        for _ in 0..header.clusters {
            let center = raw.index(&position)?;
            let radius = raw.f64()?;
            let offset = raw.usize()?;
            let cardinality = raw.usize()?;
            let lfd = raw.f64()?;
            let leaf = raw.u8()? != 0;
            let arg_radial = raw.index(&position)?;
            let split = if leaf { None } else { Some((raw.index(&position)?, raw.f64()?)) };
            clusters.push(Cluster { center, radius, offset, cardinality, lfd, depth: 0, arg_radial, children: None });
            pending.push(split);
        }
        link_preorder(&mut clusters, &pending)?;

        let layout = if header.permuted {
            Layout::Permuted
        } else {
            let mut members = Vec::with_capacity(clusters.len());
            for c in &clusters {
                let len = raw.usize()?;
                if len != c.cardinality {
                    return Err(Error::Input("index list length disagrees with cardinality".into()));
                }
                let list = (0..len).map(|_| raw.index(&position)).collect::<Result<Vec<_>>>()?;
                members.push(list);
            }
            let mut rank = vec![0; n];
            for (r, &p) in members[0].iter().enumerate() {
                rank[p] = r;
            }
            Layout::Indexed { members, rank }
        };

        Ok(Self {
            data,
            metric,
            clusters,
            criteria: header.criteria,
            strategy: header.strategy,
            seed: header.seed,
            layout,
        })
    }
}

/// Reads only the JSON header line of a tree file.
pub fn read_header(reader: &mut impl BufRead) -> Result<TreeHeader> {
    let mut line = Vec::new();
    reader.read_until(b'\n', &mut line)?;
    serde_json::from_slice(&line).map_err(|e| Error::Input(format!("malformed tree header: {e}")))
}

/// Assigns children and depths to preorder records, checking the offset
/// arithmetic as it goes.
fn link_preorder(clusters: &mut [Cluster], splits: &[Option<(usize, f64)>]) -> Result<()> {
    fn visit(
        clusters: &mut [Cluster],
        splits: &[Option<(usize, f64)>],
        next: &mut usize,
        depth: usize,
    ) -> Result<usize> {
        let id = *next;
        if id >= clusters.len() {
            return Err(Error::Input("truncated cluster list".into()));
        }
        *next += 1;
        clusters[id].depth = depth;
        if let Some((right_pole, pole_distance)) = splits[id] {
            let left = visit(clusters, splits, next, depth + 1)?;
            let right = visit(clusters, splits, next, depth + 1)?;
            let (p, l, r) = (&clusters[id], &clusters[left], &clusters[right]);
            if l.offset != p.offset
                || r.offset != l.offset + l.cardinality
                || l.cardinality + r.cardinality != p.cardinality
            {
                return Err(Error::Input(format!("inconsistent offsets at cluster {id}")));
            }
            clusters[id].children = Some(Children { left, right, right_pole, pole_distance });
        }
        Ok(id)
    }
    let mut next = 0;
    visit(clusters, splits, &mut next, 0)?;
    if next != clusters.len() {
        return Err(Error::Input("trailing cluster records".into()));
    }
    Ok(())
}

struct RecordReader<'a, R> {
    inner: &'a mut R,
}

impl<R: Read> RecordReader<'_, R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        self.inner.read_exact(&mut buf)?;
        Ok(buf)
    }

    fn usize(&mut self) -> Result<usize> {
        Ok(u64::from_le_bytes(self.bytes()?) as usize)
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes()?))
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.bytes::<1>()?[0])
    }

    /// An original index, mapped to its stored position.
    fn index(&mut self, position: &[usize]) -> Result<usize> {
        let i = self.usize()?;
        position.get(i).copied().ok_or_else(|| Error::Input(format!("index {i} out of range")))
    }
}
