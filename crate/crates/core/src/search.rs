//! Exact rho-NN and k-NN search over a [`Tree`], plus the linear-scan oracle.
//!
//! Every search returns a [`SearchReport`] whose neighbors are sorted by
//! distance, ties broken by smaller original index. Distances are always
//! evaluated as `metric.distance(query, point)` so that every algorithm and
//! the oracle see bit-identical values.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, PointStore};
use crate::metrics::Metric;
use crate::tree::{Cluster, Tree};
use crate::{Error, Result};

/// Relative slack applied to pruning comparisons so that rounding never
/// discards a cluster that might hold an answer.
const SLACK: f64 = 1e-9;

#[inline]
fn loosen(x: f64) -> f64 {
    x + x.abs() * SLACK
}

/// Distance bounds from a query to the members of a cluster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaTriple {
    /// Distance to the center.
    pub delta: f64,
    /// Upper bound on the distance to any member.
    pub delta_plus: f64,
    /// Lower bound on the distance to any member.
    pub delta_minus: f64,
}

impl DeltaTriple {
    pub fn new(delta: f64, radius: f64) -> Self {
        Self { delta, delta_plus: delta + radius, delta_minus: (delta - radius).max(0.0) }
    }
}

/// One search result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    /// Original index of the point.
    pub index: usize,
    pub distance: f64,
}

impl Neighbor {
    /// The fixed result order: distance, then original index.
    pub fn cmp_key(&self, other: &Self) -> Ordering {
        self.distance.total_cmp(&other.distance).then(self.index.cmp(&other.index))
    }
}

fn sort_neighbors(v: &mut [Neighbor]) {
    v.sort_unstable_by(Neighbor::cmp_key);
}

/// Keeps the `k` smallest neighbors, sorted.
fn top_k(mut v: Vec<Neighbor>, k: usize) -> Vec<Neighbor> {
    if v.len() > k {
        v.select_nth_unstable_by(k - 1, Neighbor::cmp_key);
        v.truncate(k);
    }
    sort_neighbors(&mut v);
    v
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub neighbors: Vec<Neighbor>,
    /// Distance evaluations performed for this query.
    pub distance_count: usize,
    pub elapsed: Duration,
}

/// The k-NN algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "repeated-rnn")]
    RepeatedRnn,
    #[serde(rename = "breadth-sieve")]
    BreadthSieve,
    #[serde(rename = "depth-sieve")]
    DepthSieve,
    #[serde(rename = "linear")]
    Linear,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] =
        [Algorithm::RepeatedRnn, Algorithm::BreadthSieve, Algorithm::DepthSieve, Algorithm::Linear];

    /// The tree-based algorithms.
    pub const TREE: [Algorithm; 3] = [Algorithm::RepeatedRnn, Algorithm::BreadthSieve, Algorithm::DepthSieve];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::RepeatedRnn => "repeated-rnn",
            Algorithm::BreadthSieve => "breadth-sieve",
            Algorithm::DepthSieve => "depth-sieve",
            Algorithm::Linear => "linear",
        }
    }

    pub fn knn<S, M>(self, tree: &Tree<S, M>, query: &S::Point, k: usize) -> Result<SearchReport>
    where
        S: PointStore,
        M: Metric<S::Point>,
    {
        match self {
            Algorithm::RepeatedRnn => knn_repeated_rnn(tree, query, k),
            Algorithm::BreadthSieve => knn_breadth_first_sieve(tree, query, k),
            Algorithm::DepthSieve => knn_depth_first_sieve(tree, query, k),
            Algorithm::Linear => linear_knn(tree.data(), tree.metric(), query, k),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown algorithm {s:?}")))
    }
}

fn check_k(k: usize, cardinality: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    if k > cardinality {
        return Err(Error::KTooLarge { k, cardinality });
    }
    Ok(())
}

fn check_rho(rho: f64) -> Result<()> {
    if rho.is_nan() || rho < 0.0 {
        return Err(Error::Input(format!("search radius must be non-negative, got {rho}")));
    }
    Ok(())
}

/// Per-query state: the query, a distance counter, and a memo of the
/// distances computed so far.
pub struct Probe<'a, S: PointStore, M> {
    tree: &'a Tree<S, M>,
    query: &'a S::Point,
    distance_count: usize,
    memo: HashMap<usize, f64>,
}

impl<'a, S, M> Probe<'a, S, M>
where
    S: PointStore,
    M: Metric<S::Point>,
{
    pub fn new(tree: &'a Tree<S, M>, query: &'a S::Point) -> Self {
        Self { tree, query, distance_count: 0, memo: HashMap::new() }
    }

    pub fn distance_count(&self) -> usize {
        self.distance_count
    }

    /// Distance from the query to a stored position, evaluated at most once
    /// per probe.
    #[inline]
    pub fn distance(&mut self, position: usize) -> f64 {
        if let Some(&d) = self.memo.get(&position) {
            return d;
        }
        let d = self.distance_uncached(position);
        self.memo.insert(position, d);
        d
    }

    #[inline]
    fn distance_uncached(&mut self, position: usize) -> f64 {
        self.distance_count += 1;
        self.tree.metric().distance(self.query, self.tree.point(position))
    }

    /// The metric's bound transform; see [`Metric::bound`].
    #[inline]
    pub fn bound(&self, d: f64) -> f64 {
        self.tree.metric().bound(d)
    }

    /// Bounds for a cluster, in the metric's bound space.
    pub fn deltas(&mut self, id: usize) -> DeltaTriple {
        let c = self.tree.cluster(id);
        let delta = self.distance(c.center);
        DeltaTriple::new(self.bound(delta), self.bound(c.radius))
    }

    fn neighbor(&mut self, position: usize) -> Neighbor {
        Neighbor { index: self.tree.original_index(position), distance: self.distance(position) }
    }
}

/// Distance bounds for one cluster, costing one distance evaluation.
pub fn deltas<S, M>(tree: &Tree<S, M>, id: usize, query: &S::Point) -> DeltaTriple
where
    S: PointStore,
    M: Metric<S::Point>,
{
    Probe::new(tree, query).deltas(id)
}

/// How a rho-NN tree search uses the two poles of a cluster to skip one of
/// its children.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleRule {
    /// Never skip a child.
    Off,
    /// Skip a child when the query's ball misses the perpendicular bisector
    /// of the poles. Valid only when bisectors are hyperplanes.
    Bisector,
    /// Skip a child when `d_far - d_near > 2 rho`, which holds in any metric
    /// space.
    Triangle,
}

impl PoleRule {
    /// The rule for a tree: the bisector rule when the metric allows it, the
    /// triangle rule otherwise, and nothing for balanced trees.
    pub fn for_tree<S, M>(tree: &Tree<S, M>) -> Self
    where
        S: PointStore,
        M: Metric<S::Point>,
    {
        if !tree.pole_pruning_valid() {
            PoleRule::Off
        } else if tree.metric().has_euclidean_bisectors() {
            PoleRule::Bisector
        } else {
            PoleRule::Triangle
        }
    }
}

/// Which children of a cluster a search should descend into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Descend {
    Both,
    Left,
    Right,
}

/// Chooses children from the query's distances to the left and right poles.
pub fn prune_to_children(pole_distance: f64, rho: f64, d_ql: f64, d_qr: f64, rule: PoleRule) -> Descend {
    let (far, near, nearer) = if d_qr <= d_ql { (d_ql, d_qr, Descend::Right) } else { (d_qr, d_ql, Descend::Left) };
    let keep_both = match rule {
        PoleRule::Off => true,
        PoleRule::Bisector => {
            let lhs = (far + near) * (far - near);
            lhs <= 2.0 * pole_distance * rho + SLACK * (far + near) * (far + near)
        }
        PoleRule::Triangle => far - near <= loosen(2.0 * rho),
    };
    if keep_both {
        Descend::Both
    } else {
        nearer
    }
}

/// Whether the pole rule could skip either child for any pole distances
/// consistent with the children's bounds. Each pole lies in its own child,
/// so `d_ql` is within `[dl.delta_minus, dl.delta_plus]` and likewise for
/// `d_qr`.
fn could_prune(rule: PoleRule, pole_distance: f64, rho: f64, dl: &DeltaTriple, dr: &DeltaTriple) -> bool {
    let skip_left = prune_to_children(pole_distance, rho, dl.delta_plus, dr.delta_minus, rule) != Descend::Both;
    let skip_right = prune_to_children(pole_distance, rho, dl.delta_minus, dr.delta_plus, rule) != Descend::Both;
    skip_left || skip_right
}

/// A cluster returned by the coarse phase of rho-NN search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub id: usize,
    pub deltas: DeltaTriple,
    /// The cluster lies entirely inside the query ball.
    pub contained: bool,
}

/// Finds the clusters that overlap the ball of radius `rho` around the
/// query. Clusters inside the ball are returned without descending.
///
/// The pole rule is consulted only when both children overlap the ball
/// without lying inside it, which is the only case where it can skip a
/// child that the center bounds could not.
pub fn rnn_tree_search<S, M>(probe: &mut Probe<'_, S, M>, rho: f64, rule: PoleRule) -> Vec<Candidate>
where
    S: PointStore,
    M: Metric<S::Point>,
{
    let tree = probe.tree;
    let rho = probe.bound(rho);
    let reachable = |d: &DeltaTriple| d.delta_minus <= loosen(rho);
    let mut out = Vec::new();
    let root = probe.deltas(0);
    let mut stack = Vec::new();
    if reachable(&root) {
        stack.push((0usize, root));
    }
    while let Some((id, d)) = stack.pop() {
        let c = tree.cluster(id);
        if d.delta_plus <= rho {
            out.push(Candidate { id, deltas: d, contained: true });
            continue;
        }
        let Some(ch) = c.children else {
            out.push(Candidate { id, deltas: d, contained: false });
            continue;
        };
        let (dl, dr) = (probe.deltas(ch.left), probe.deltas(ch.right));
        let (mut left, mut right) = (reachable(&dl), reachable(&dr));
        if left
            && right
            && dl.delta_plus > rho
            && dr.delta_plus > rho
            && could_prune(rule, probe.bound(ch.pole_distance), rho, &dl, &dr)
        {
            let d_ql = probe.distance(c.arg_radial);
            let d_qr = probe.distance(ch.right_pole);
            let (b_ql, b_qr, b_lr) = (probe.bound(d_ql), probe.bound(d_qr), probe.bound(ch.pole_distance));
            match prune_to_children(b_lr, rho, b_ql, b_qr, rule) {
                Descend::Left => right = false,
                Descend::Right => left = false,
                Descend::Both => {}
            }
        }
        // Right is pushed first so the left subtree is visited first.
        if right {
            stack.push((ch.right, dr));
        }
        if left {
            stack.push((ch.left, dl));
        }
    }
    out
}

/// Scans the candidate clusters and keeps the points within `rho`.
pub fn rnn_leaf_search<S, M>(probe: &mut Probe<'_, S, M>, candidates: &[Candidate], rho: f64) -> Vec<Neighbor>
where
    S: PointStore,
    M: Metric<S::Point>,
{
    let tree = probe.tree;
    let mut hits = Vec::new();
    for cand in candidates {
        for p in tree.members(cand.id) {
            let n = probe.neighbor(p);
            if n.distance <= rho {
                hits.push(n);
            }
        }
    }
    sort_neighbors(&mut hits);
    hits
}

/// All points within `rho` of the query.
pub fn rho_nn<S, M>(tree: &Tree<S, M>, query: &S::Point, rho: f64) -> Result<SearchReport>
where
    S: PointStore,
    M: Metric<S::Point>,
{
    rho_nn_with(tree, query, rho, PoleRule::for_tree(tree))
}

/// [`rho_nn`] with an explicit pole rule.
pub fn rho_nn_with<S, M>(tree: &Tree<S, M>, query: &S::Point, rho: f64, rule: PoleRule) -> Result<SearchReport>
where
    S: PointStore,
    M: Metric<S::Point>,
{
    check_rho(rho)?;
    let start = Instant::now();
    let mut probe = Probe::new(tree, query);
    let candidates = rnn_tree_search(&mut probe, rho, rule);
    let neighbors = rnn_leaf_search(&mut probe, &candidates, rho);
    Ok(SearchReport { neighbors, distance_count: probe.distance_count, elapsed: start.elapsed() })
}

/// Step factor for the search radius: `min(2, (k / found)^mu)`, with `mu`
/// the mean reciprocal LFD of the clusters found. Always greater than one
/// when `found < k`.
pub fn radius_factor(k: usize, found: usize, lfds: impl IntoIterator<Item = f64>) -> f64 {
    let (count, total) = lfds.into_iter().fold((0usize, 0.0_f64), |(n, s), lfd| (n + 1, s + 1.0 / lfd));
    if found == 0 || count == 0 {
        return 2.0;
    }
    let mu = total / count as f64;
    let factor = (k as f64 / found as f64).powf(mu);
    if factor.is_nan() {
        2.0
    } else {
        factor.min(2.0)
    }
}

/// k-NN by growing a rho-NN search until it covers at least `k` points.
pub fn knn_repeated_rnn<S, M>(tree: &Tree<S, M>, query: &S::Point, k: usize) -> Result<SearchReport>
where
    S: PointStore,
    M: Metric<S::Point>,
{
    check_k(k, tree.cardinality())?;
    let start = Instant::now();
    let mut probe = Probe::new(tree, query);
    let root = tree.root();
    if root.radius == 0.0 {
        let neighbors = degenerate(&mut probe, k);
        return Ok(SearchReport { neighbors, distance_count: probe.distance_count, elapsed: start.elapsed() });
    }
    let rule = PoleRule::for_tree(tree);
    let mut radius = root.radius / tree.cardinality() as f64;
    let candidates = loop {
        let candidates = rnn_tree_search(&mut probe, radius, rule);
        let found: usize = candidates.iter().map(|c| tree.cluster(c.id).cardinality).sum();
        if found >= k {
            break candidates;
        }
        let factor = radius_factor(k, found, candidates.iter().map(|c| tree.cluster(c.id).lfd));
        let next = radius * factor;
        radius = if next > radius { next } else { radius * 2.0 };
    };

    let mut pool = Vec::new();
    for cand in &candidates {
        for p in tree.members(cand.id) {
            pool.push(probe.neighbor(p));
        }
    }
    let mut best = top_k(pool, k);
    let kth = best[k - 1].distance;
    if kth > radius {
        // The candidates cover the ball of `radius` but the k-th nearest lies
        // beyond it, so a closer point may sit in a cluster that was skipped.
        let candidates = rnn_tree_search(&mut probe, kth, rule);
        let hits = rnn_leaf_search(&mut probe, &candidates, kth);
        best = top_k(hits, k);
    }
    Ok(SearchReport { neighbors: best, distance_count: probe.distance_count, elapsed: start.elapsed() })
}

/// Every point coincides with the root center: the first `k` by original
/// index, all at the root center's distance.
fn degenerate<S, M>(probe: &mut Probe<'_, S, M>, k: usize) -> Vec<Neighbor>
where
    S: PointStore,
    M: Metric<S::Point>,
{
    let tree = probe.tree;
    let distance = probe.distance(tree.root().center);
    let mut indices: Vec<usize> = tree.members(0).map(|p| tree.original_index(p)).collect();
    indices.sort_unstable();
    indices.truncate(k);
    indices.into_iter().map(|index| Neighbor { index, distance }).collect()
}

/// The smallest value `tau` such that the entries with value at most `tau`
/// have a total multiplicity of at least `k`. Reorders `entries`.
///
/// `key` gives each entry's value and multiplicity.
pub fn quickselect_tau<T>(entries: &mut [T], k: usize, key: impl Fn(&T) -> (f64, usize)) -> Result<f64> {
    let total: usize = entries.iter().map(|e| key(e).1).sum();
    if k == 0 {
        return Err(Error::ZeroK);
    }
    if total < k {
        return Err(Error::Input(format!("multiplicities sum to {total}, fewer than k = {k}")));
    }
    let value = |e: &T| key(e).0;
    let (mut lo, mut hi, mut need) = (0, entries.len(), k);
    loop {
        let slice = &mut entries[lo..hi];
        let n = slice.len();
        let pivot = {
            let (a, b, c) = (value(&slice[0]), value(&slice[n / 2]), value(&slice[n - 1]));
            let mut three = [a, b, c];
            three.sort_by(f64::total_cmp);
            three[1]
        };
        // Dutch national flag: [0, lt) < pivot, [lt, i) == pivot, (gt, n) > pivot.
        let (mut lt, mut i, mut gt) = (0, 0, n);
        while i < gt {
            match value(&slice[i]).total_cmp(&pivot) {
                Ordering::Less => {
                    slice.swap(lt, i);
                    lt += 1;
                    i += 1;
                }
                Ordering::Greater => {
                    gt -= 1;
                    slice.swap(i, gt);
                }
                Ordering::Equal => i += 1,
            }
        }
        let below: usize = slice[..lt].iter().map(|e| key(e).1).sum();
        let equal: usize = slice[lt..gt].iter().map(|e| key(e).1).sum();
        if need <= below {
            hi = lo + lt;
        } else if need <= below + equal {
            return Ok(pivot);
        } else {
            need -= below + equal;
            lo += gt;
        }
    }
}

enum Item {
    Point(Neighbor),
    /// A cluster minus the ancestor centers already emitted as points.
    Cluster {
        id: usize,
        emitted: Vec<(usize, f64)>,
    },
}

/// An item with bounds on its members' distances, in bound space.
struct Entry {
    item: Item,
    multiplicity: usize,
    lower: f64,
    upper: f64,
}

impl Entry {
    fn point<S, M>(probe: &Probe<'_, S, M>, n: Neighbor) -> Self
    where
        S: PointStore,
        M: Metric<S::Point>,
    {
        let b = probe.bound(n.distance);
        Self { item: Item::Point(n), multiplicity: 1, lower: b, upper: b }
    }
}

/// k-NN by refining a frontier of clusters one level at a time, discarding
/// anything that cannot beat the current threshold.
pub fn knn_breadth_first_sieve<S, M>(tree: &Tree<S, M>, query: &S::Point, k: usize) -> Result<SearchReport>
where
    S: PointStore,
    M: Metric<S::Point>,
{
    check_k(k, tree.cardinality())?;
    let start = Instant::now();
    let mut probe = Probe::new(tree, query);

    let mut entries = Vec::new();
    expand_child(&mut probe, 0, &[], &mut entries);

    loop {
        if !entries.iter().any(|e| matches!(e.item, Item::Cluster { .. })) {
            break;
        }
        let tau = quickselect_tau(&mut entries, k, |e| (e.upper, e.multiplicity))?;
        let bound = loosen(tau);
        entries.retain(|e| e.lower <= bound);
        let exhaust = entries.iter().map(|e| e.multiplicity).sum::<usize>() == k;

        let mut next = Vec::with_capacity(entries.len() * 2);
        for entry in entries {
            match entry.item {
                Item::Point(_) => next.push(entry),
                Item::Cluster { id, emitted, .. } => {
                    let c = tree.cluster(id);
                    match c.children {
                        Some(ch) if !exhaust => {
                            expand_child(&mut probe, ch.left, &emitted, &mut next);
                            expand_child(&mut probe, ch.right, &emitted, &mut next);
                        }
                        _ => {
                            for p in tree.members(id) {
                                if !emitted.iter().any(|&(e, _)| e == p) {
                                    let n = probe.neighbor_uncached(p);
                                    next.push(Entry::point(&probe, n));
                                }
                            }
                        }
                    }
                }
            }
        }
        entries = next;
    }

    let neighbors = entries
        .into_iter()
        .map(|e| match e.item {
            Item::Point(n) => n,
            Item::Cluster { .. } => unreachable!("loop ends with points only"),
        })
        .collect();
    Ok(SearchReport { neighbors: top_k(neighbors, k), distance_count: probe.distance_count, elapsed: start.elapsed() })
}

/// Pushes a cluster entry for `id` and, unless it was already emitted by an
/// ancestor, a point entry for its center.
fn expand_child<S, M>(probe: &mut Probe<'_, S, M>, id: usize, emitted: &[(usize, f64)], out: &mut Vec<Entry>)
where
    S: PointStore,
    M: Metric<S::Point>,
{
    let tree = probe.tree;
    let c: &Cluster = tree.cluster(id);
    let mut inherited: Vec<(usize, f64)> = emitted.iter().copied().filter(|&(p, _)| tree.contains(id, p)).collect();
    let delta = match inherited.iter().find(|&&(p, _)| p == c.center) {
        Some(&(_, d)) => d,
        None => {
            let n = probe.neighbor_uncached(c.center);
            out.push(Entry::point(probe, n));
            inherited.push((c.center, n.distance));
            n.distance
        }
    };
    let multiplicity = c.cardinality - inherited.len();
    if multiplicity > 0 {
        let d = DeltaTriple::new(probe.bound(delta), probe.bound(c.radius));
        out.push(Entry {
            item: Item::Cluster { id, emitted: inherited },
            multiplicity,
            lower: d.delta_minus,
            upper: d.delta_plus,
        });
    }
}

impl<S, M> Probe<'_, S, M>
where
    S: PointStore,
    M: Metric<S::Point>,
{
    fn neighbor_uncached(&mut self, position: usize) -> Neighbor {
        Neighbor { index: self.tree.original_index(position), distance: self.distance_uncached(position) }
    }
}

/// f64 ordered by `total_cmp`, for heaps.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Bounded collection of the `k` best neighbors seen so far.
struct Hits {
    k: usize,
    heap: BinaryHeap<(Key, usize)>,
}

impl Hits {
    fn new(k: usize) -> Self {
        Self { k, heap: BinaryHeap::with_capacity(k + 1) }
    }

    fn is_full(&self) -> bool {
        self.heap.len() == self.k
    }

    fn worst(&self) -> Option<f64> {
        self.heap.peek().map(|(d, _)| d.0)
    }

    fn push(&mut self, n: Neighbor) {
        let item = (Key(n.distance), n.index);
        if self.heap.len() < self.k {
            self.heap.push(item);
        } else if let Some(top) = self.heap.peek() {
            if item < *top {
                self.heap.pop();
                self.heap.push(item);
            }
        }
    }

    fn into_sorted(self) -> Vec<Neighbor> {
        self.heap.into_sorted_vec().into_iter().map(|(d, index)| Neighbor { index, distance: d.0 }).collect()
    }
}

/// k-NN by always exploring the cluster with the smallest lower bound next,
/// stopping once no unexplored cluster can improve on the k-th hit.
pub fn knn_depth_first_sieve<S, M>(tree: &Tree<S, M>, query: &S::Point, k: usize) -> Result<SearchReport>
where
    S: PointStore,
    M: Metric<S::Point>,
{
    check_k(k, tree.cardinality())?;
    let start = Instant::now();
    let mut probe = Probe::new(tree, query);
    let mut hits = Hits::new(k);
    // Ordered by lower bound, then cluster id for determinism. The last
    // field is the raw distance to the cluster's center.
    let mut queue: BinaryHeap<Reverse<(Key, usize, Key)>> = BinaryHeap::new();
    let enqueue = |probe: &mut Probe<'_, S, M>, queue: &mut BinaryHeap<_>, id: usize| {
        let c = tree.cluster(id);
        let delta = probe.distance_uncached(c.center);
        let d = DeltaTriple::new(probe.bound(delta), probe.bound(c.radius));
        queue.push(Reverse((Key(d.delta_minus), id, Key(delta))));
    };
    enqueue(&mut probe, &mut queue, 0);

    while let Some(&Reverse((Key(lower), id, Key(delta)))) = queue.peek() {
        if hits.is_full() && hits.worst().is_some_and(|w| probe.bound(w) < lower - lower * SLACK) {
            break;
        }
        queue.pop();
        let c = tree.cluster(id);
        match c.children {
            None => {
                for p in tree.members(id) {
                    let distance = if p == c.center { delta } else { probe.distance_uncached(p) };
                    hits.push(Neighbor { index: tree.original_index(p), distance });
                }
            }
            Some(ch) => {
                enqueue(&mut probe, &mut queue, ch.left);
                enqueue(&mut probe, &mut queue, ch.right);
            }
        }
    }
    Ok(SearchReport { neighbors: hits.into_sorted(), distance_count: probe.distance_count, elapsed: start.elapsed() })
}

/// Exhaustive k-NN. The reference every tree search is checked against.
pub fn linear_knn<S, M>(data: &Dataset<S>, metric: &M, query: &S::Point, k: usize) -> Result<SearchReport>
where
    S: PointStore,
    M: Metric<S::Point>,
{
    check_k(k, data.cardinality())?;
    let start = Instant::now();
    let all = scan(data, metric, query);
    Ok(SearchReport { neighbors: top_k(all, k), distance_count: data.cardinality(), elapsed: start.elapsed() })
}

/// Exhaustive rho-NN.
pub fn linear_rnn<S, M>(data: &Dataset<S>, metric: &M, query: &S::Point, rho: f64) -> Result<SearchReport>
where
    S: PointStore,
    M: Metric<S::Point>,
{
    check_rho(rho)?;
    let start = Instant::now();
    let mut hits: Vec<Neighbor> = scan(data, metric, query).into_iter().filter(|n| n.distance <= rho).collect();
    sort_neighbors(&mut hits);
    Ok(SearchReport { neighbors: hits, distance_count: data.cardinality(), elapsed: start.elapsed() })
}

fn scan<S, M>(data: &Dataset<S>, metric: &M, query: &S::Point) -> Vec<Neighbor>
where
    S: PointStore,
    M: Metric<S::Point>,
{
    (0..data.cardinality())
        .map(|p| Neighbor { index: data.original_index(p), distance: metric.distance(query, data.get(p)) })
        .collect()
}
