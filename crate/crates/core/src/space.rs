//! Finite metric spaces with exact distances.
//!
//! A [`DistanceTable`] is the raw, unchecked input (what a file holds). A
//! [`FiniteMetricSpace`] is a table that passed [`validate_metric`]; it
//! stores distances as ranks into the sorted list of distinct values, so
//! ball membership is a single integer comparison after one binary search
//! for the radius.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ball::Ball;
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::rational::Rational;

/// Largest space the dense representation accepts.
pub const MAX_POINTS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BallKind {
    Open,
    Closed,
}

impl fmt::Display for BallKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BallKind::Open => "open",
            BallKind::Closed => "closed",
        })
    }
}

/// How stored distances relate to true distances.
///
/// `Squared` tables hold `d(x, y)²`; radii handed to such a space are
/// squared as well, so every membership test stays rational. Additive
/// tolerances (the `ε` of approximate midpoints) use the same encoding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    #[default]
    Plain,
    Squared,
}

impl Encoding {
    fn is_plain(&self) -> bool {
        *self == Encoding::Plain
    }
}

/// Three points `x`, `via`, `y` whose distances break an inequality
/// `d(x, y) <= f(d(x, via), d(via, y))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triple {
    pub x: usize,
    pub via: usize,
    pub y: usize,
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d({x},{y}) vs path through {v}", x = self.x, y = self.y, v = self.via)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum MetricViolation {
    NonZeroDiagonal { point: usize },
    Asymmetric { x: usize, y: usize },
    NonPositive { x: usize, y: usize },
    Triangle(Triple),
}

impl fmt::Display for MetricViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricViolation::NonZeroDiagonal { point } => write!(f, "d({point},{point}) != 0"),
            MetricViolation::Asymmetric { x, y } => write!(f, "d({x},{y}) != d({y},{x})"),
            MetricViolation::NonPositive { x, y } => {
                write!(f, "d({x},{y}) <= 0 for distinct points")
            }
            MetricViolation::Triangle(t) => write!(
                f,
                "triangle inequality fails: d({},{}) > d({},{}) + d({},{})",
                t.x, t.y, t.x, t.via, t.via, t.y
            ),
        }
    }
}

/// Raw distance table as read from a file. Nothing about it is checked
/// beyond its shape.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTable", into = "RawTable")]
pub struct DistanceTable {
    labels: Vec<String>,
    encoding: Encoding,
    dist: Vec<Vec<Rational>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTable {
    labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Encoding::is_plain")]
    encoding: Encoding,
    dist: Vec<Vec<Rational>>,
}

impl TryFrom<RawTable> for DistanceTable {
    type Error = String;

    fn try_from(raw: RawTable) -> std::result::Result<Self, String> {
        DistanceTable::new(raw.labels, raw.encoding, raw.dist)
    }
}

impl From<DistanceTable> for RawTable {
    fn from(t: DistanceTable) -> Self {
        RawTable {
            labels: t.labels,
            encoding: t.encoding,
            dist: t.dist,
        }
    }
}

impl DistanceTable {
    /// Checks the shape only: non-empty, square, one label per row.
    pub fn new(
        labels: Vec<String>,
        encoding: Encoding,
        dist: Vec<Vec<Rational>>,
    ) -> std::result::Result<Self, String> {
        let n = dist.len();
        if n == 0 {
            return Err("distance table is empty".into());
        }
        if n > MAX_POINTS {
            return Err(format!("{n} points exceeds the limit of {MAX_POINTS}"));
        }
        if labels.len() != n {
            return Err(format!("{} labels for {n} rows", labels.len()));
        }
        if let Some((i, row)) = dist.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(format!("row {i} has {} entries, expected {n}", row.len()));
        }
        Ok(DistanceTable {
            labels,
            encoding,
            dist,
        })
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn encoding(&self) -> Encoding {
        self.encoding
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.dist[i][j]
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Canonical compact JSON; parsing it back gives the same bytes.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("distance table serializes")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub witness: Option<MetricViolation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UltrametricReport {
    pub ultra: bool,
    /// `d(x, y) > max(d(x, via), d(via, y))`.
    pub witness: Option<Triple>,
}

/// Distinct values plus a rank for every ordered pair.
struct Ranked {
    levels: Vec<Rational>,
    rank: Vec<u32>,
}

fn rank_values(n: usize, value: impl Fn(usize, usize) -> Rational) -> Ranked {
    let mut seen: HashMap<Rational, u32> = HashMap::new();
    seen.insert(Rational::ZERO, 0);
    let mut upper = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let v = value(i, j);
            seen.entry(v).or_insert(0);
            upper.push(v);
        }
    }
    let mut levels: Vec<Rational> = seen.keys().copied().collect();
    levels.sort();
    for (r, v) in levels.iter().enumerate() {
        seen.insert(*v, r as u32);
    }
    let mut rank = vec![0u32; n * n];
    let mut it = upper.into_iter();
    for i in 0..n {
        for j in i + 1..n {
            let r = seen[&it.next().expect("upper triangle")];
            rank[i * n + j] = r;
            rank[j * n + i] = r;
        }
    }
    Ranked { levels, rank }
}

/// Is `a <= b + c` for true distances given in `enc`?
fn le_sum(enc: Encoding, a: Rational, b: Rational, c: Rational) -> bool {
    match enc {
        Encoding::Plain => a <= b + c,
        Encoding::Squared => {
            // sqrt a <= sqrt b + sqrt c  <=>  a - b - c <= 2 sqrt(bc)
            let m = a - b - c;
            m <= Rational::ZERO || m * m <= Rational::from_integer(4) * b * c
        }
    }
}

/// First triangle violation over the upper triangle, if any.
fn triangle_witness(n: usize, enc: Encoding, ranked: &Ranked) -> Option<Triple> {
    let levels = &ranked.levels;
    let rank = &ranked.rank;
    let max = *levels.last().expect("levels include zero");
    let &min_pos = levels.get(1)?;
    // Any sum of two positive distances is at least 2 * min_pos.
    let two_min = match enc {
        Encoding::Plain => min_pos + min_pos,
        Encoding::Squared => min_pos * Rational::from_integer(4),
    };
    if max <= two_min {
        return None;
    }
    let safe_rank = levels.partition_point(|v| *v <= two_min) as u32;
    for i in 0..n {
        let row_i = &rank[i * n..(i + 1) * n];
        for j in i + 1..n {
            if row_i[j] < safe_rank {
                continue;
            }
            let a = levels[row_i[j] as usize];
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let b = levels[row_i[k] as usize];
                let c = levels[rank[k * n + j] as usize];
                if !le_sum(enc, a, b, c) {
                    return Some(Triple { x: i, via: k, y: j });
                }
            }
        }
    }
    None
}

/// Checks identity, positivity, symmetry and the triangle inequality.
pub fn validate_metric(table: &DistanceTable) -> ValidationReport {
    let n = table.len();
    let fail = |w| ValidationReport {
        valid: false,
        witness: Some(w),
    };
    for i in 0..n {
        if !table.get(i, i).is_zero() {
            return fail(MetricViolation::NonZeroDiagonal { point: i });
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if table.get(i, j) != table.get(j, i) {
                return fail(MetricViolation::Asymmetric { x: i, y: j });
            }
            if !table.get(i, j).is_positive() {
                return fail(MetricViolation::NonPositive { x: i, y: j });
            }
        }
    }
    let ranked = rank_values(n, |i, j| table.get(i, j));
    match triangle_witness(n, table.encoding(), &ranked) {
        Some(t) => fail(MetricViolation::Triangle(t)),
        None => ValidationReport {
            valid: true,
            witness: None,
        },
    }
}

/// A validated finite metric space. Immutable; point identity is the index.
#[derive(Clone)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    encoding: Encoding,
    levels: Vec<Rational>,
    rank: Vec<u32>,
    ultrametric: bool,
}

impl fmt::Debug for FiniteMetricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteMetricSpace")
            .field("n", &self.len())
            .field("encoding", &self.encoding)
            .field("diameter", &self.diameter())
            .field("ultrametric", &self.ultrametric)
            .finish()
    }
}

impl TryFrom<&DistanceTable> for FiniteMetricSpace {
    type Error = Error;

    fn try_from(table: &DistanceTable) -> Result<Self> {
        let report = validate_metric(table);
        if let Some(w) = report.witness {
            return Err(Error::NotMetric(w));
        }
        let n = table.len();
        let ranked = rank_values(n, |i, j| table.get(i, j));
        Ok(Self::from_ranked(table.labels().to_vec(), table.encoding(), ranked))
    }
}

impl FiniteMetricSpace {
    /// Builds a space from a symmetric distance function, validating it.
    pub fn from_fn(
        labels: Vec<String>,
        encoding: Encoding,
        dist: impl Fn(usize, usize) -> Rational,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 || n > MAX_POINTS {
            return Err(Error::PreconditionViolated(format!(
                "space must have between 1 and {MAX_POINTS} points, got {n}"
            )));
        }
        let ranked = rank_values(n, &dist);
        let zero_rank = ranked.levels.partition_point(|v| *v < Rational::ZERO) as u32;
        let bad = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| ranked.rank[i * n + j] <= zero_rank);
        if let Some((x, y)) = bad {
            return Err(Error::NotMetric(MetricViolation::NonPositive { x, y }));
        }
        if let Some(t) = triangle_witness(n, encoding, &ranked) {
            return Err(Error::NotMetric(MetricViolation::Triangle(t)));
        }
        Ok(Self::from_ranked(labels, encoding, ranked))
    }

    fn from_ranked(labels: Vec<String>, encoding: Encoding, ranked: Ranked) -> Self {
        let mut space = FiniteMetricSpace {
            labels,
            encoding,
            levels: ranked.levels,
            rank: ranked.rank,
            ultrametric: false,
        };
        space.ultrametric = space.ultrametric_witness().is_none();
        space
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, p: usize) -> &str {
        &self.labels[p]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn encoding(&self) -> Encoding {
        self.encoding
    }

    pub fn dist(&self, x: usize, y: usize) -> Rational {
        self.levels[self.rank[x * self.len() + y] as usize]
    }

    /// Rank of `d(x, y)` among the distinct distances (0 for `x == y`).
    pub fn dist_rank(&self, x: usize, y: usize) -> u32 {
        self.rank[x * self.len() + y]
    }

    /// Distinct distances in ascending order, starting with zero.
    pub fn distance_levels(&self) -> &[Rational] {
        &self.levels
    }

    pub fn diameter(&self) -> Rational {
        *self.levels.last().expect("levels include zero")
    }

    pub fn min_positive_distance(&self) -> Option<Rational> {
        self.levels.get(1).copied()
    }

    /// Cached strong-triangle flag.
    pub fn is_ultrametric(&self) -> bool {
        self.ultrametric
    }

    pub fn all_points(&self) -> PointSet {
        PointSet::full(self.len())
    }

    pub fn check_point(&self, p: usize) -> Result<()> {
        if p < self.len() {
            Ok(())
        } else {
            Err(Error::PointOutOfRange {
                index: p,
                n: self.len(),
            })
        }
    }

    /// Number of distance levels inside a ball of this radius and kind;
    /// `p` is a member of a ball centered at `c` iff `dist_rank(c, p)` is
    /// below it.
    pub fn rank_threshold(&self, radius: Rational, kind: BallKind) -> u32 {
        let t = match kind {
            BallKind::Open => self.levels.partition_point(|v| *v < radius),
            BallKind::Closed => self.levels.partition_point(|v| *v <= radius),
        };
        t as u32
    }

    pub fn members_of(&self, center: usize, radius: Rational, kind: BallKind) -> PointSet {
        let n = self.len();
        let t = self.rank_threshold(radius, kind);
        let row = &self.rank[center * n..(center + 1) * n];
        let mut set = PointSet::empty(n);
        for (p, &r) in row.iter().enumerate() {
            if r < t {
                set.insert(p);
            }
        }
        set
    }

    pub fn members(&self, ball: &Ball) -> PointSet {
        self.members_of(ball.center, ball.radius, ball.kind)
    }

    pub fn contains(&self, ball: &Ball, p: usize) -> bool {
        self.dist_rank(ball.center, p) < self.rank_threshold(ball.radius, ball.kind)
    }

    /// `t · r` in this space's encoding.
    pub fn scale_radius(&self, r: Rational, t: Rational) -> Rational {
        match self.encoding {
            Encoding::Plain => r * t,
            Encoding::Squared => r * t * t,
        }
    }

    pub fn half_radius(&self, r: Rational) -> Rational {
        self.scale_radius(r, Rational::new(1, 2))
    }

    /// `⌈log₂(big / small)⌉` of the true radii.
    pub fn ceil_log2_ratio(&self, big: Rational, small: Rational) -> i32 {
        let c = (big / small).ceil_log2();
        match self.encoding {
            Encoding::Plain => c,
            Encoding::Squared => (c + 1).div_euclid(2),
        }
    }

    /// `true_dist(a) < eps + true_dist(b) / 2`, all values in this encoding.
    pub fn lt_eps_plus_half(&self, a: Rational, b: Rational, eps: Rational) -> bool {
        match self.encoding {
            Encoding::Plain => a < eps + b / Rational::from_integer(2),
            Encoding::Squared => {
                // sqrt a < sqrt e + sqrt(b) / 2
                let l = a - eps - b / Rational::from_integer(4);
                l < Rational::ZERO || l * l < eps * b
            }
        }
    }

    /// Radii at which ball member sets can change: every positive realized
    /// distance, the midpoints between consecutive ones, and one radius
    /// beyond the diameter.
    pub fn critical_radii(&self) -> Vec<Rational> {
        sample_breakpoints(self.levels[1..].to_vec())
    }

    /// Radii at which the pair (ball, half-radius balls) can change: the
    /// critical radii of both `r` and `r / 2`. Every `r > 0` behaves like
    /// one of the returned radii for doubling purposes.
    pub fn doubling_radii(&self) -> Vec<Rational> {
        let two = Rational::from_integer(2);
        let mut bps: Vec<Rational> = self.levels[1..].to_vec();
        bps.extend(self.levels[1..].iter().map(|&d| self.scale_radius(d, two)));
        let mut out = sample_breakpoints(bps);
        if let Some(&first) = out.first() {
            out.insert(0, self.half_radius(first));
        }
        out
    }

    /// `d(x,y) <= max(d(x,w), d(w,y))` for all triples, via the subdominant
    /// (minimax path) ultrametric: `d` is ultrametric iff it equals it.
    fn ultrametric_witness(&self) -> Option<Triple> {
        let n = self.len();
        if n < 3 {
            return None;
        }
        let tree = self.min_spanning_tree();
        for root in 0..n {
            let (minimax, parent) = tree_minimax(&tree, root);
            for (y, &m) in minimax.iter().enumerate() {
                if y != root && self.dist_rank(root, y) > m {
                    return Some(self.path_witness(root, y, &parent));
                }
            }
        }
        None
    }

    /// Prim on ranks; adjacency lists of the tree.
    fn min_spanning_tree(&self) -> Vec<Vec<(usize, u32)>> {
        let n = self.len();
        let mut adj = vec![Vec::new(); n];
        let mut in_tree = vec![false; n];
        let mut best = vec![u32::MAX; n];
        let mut from = vec![0usize; n];
        best[0] = 0;
        for _ in 0..n {
            let v = (0..n)
                .filter(|&v| !in_tree[v])
                .min_by_key(|&v| best[v])
                .expect("a vertex remains");
            in_tree[v] = true;
            if v != 0 {
                adj[v].push((from[v], best[v]));
                adj[from[v]].push((v, best[v]));
            }
            for u in 0..n {
                let r = self.dist_rank(v, u);
                if !in_tree[u] && r < best[u] {
                    best[u] = r;
                    from[u] = v;
                }
            }
        }
        adj
    }

    /// Walk the tree path from `x` to `y`; all its edges are shorter than
    /// `d(x, y)`, so the first vertex `v_t` with `d(x, v_t) >= d(x, y)`
    /// breaks the strong triangle inequality through `v_{t-1}`.
    fn path_witness(&self, x: usize, y: usize, parent: &[usize]) -> Triple {
        let mut path = vec![y];
        let mut v = y;
        while v != x {
            v = parent[v];
            path.push(v);
        }
        path.reverse();
        let target = self.dist_rank(x, y);
        for t in 1..path.len() {
            if self.dist_rank(x, path[t]) >= target {
                let prev = path[t - 1];
                if prev != x {
                    return Triple {
                        x,
                        via: prev,
                        y: path[t],
                    };
                }
            }
        }
        unreachable!("minimax path below d(x,y) must contain a violating step")
    }

    /// Hex SHA-256 of the canonical JSON table.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_table().to_json().as_bytes()))
    }

    pub fn to_table(&self) -> DistanceTable {
        let n = self.len();
        let dist = (0..n)
            .map(|i| (0..n).map(|j| self.dist(i, j)).collect())
            .collect();
        DistanceTable::new(self.labels.clone(), self.encoding, dist).expect("valid shape")
    }
}

fn tree_minimax(tree: &[Vec<(usize, u32)>], root: usize) -> (Vec<u32>, Vec<usize>) {
    let n = tree.len();
    let mut minimax = vec![0u32; n];
    let mut parent = vec![usize::MAX; n];
    parent[root] = root;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &(u, w) in &tree[v] {
            if parent[u] == usize::MAX {
                parent[u] = v;
                minimax[u] = minimax[v].max(w);
                queue.push_back(u);
            }
        }
    }
    (minimax, parent)
}

/// Sorted distinct breakpoints, the midpoints between consecutive ones,
/// and one value beyond the largest.
fn sample_breakpoints(mut bps: Vec<Rational>) -> Vec<Rational> {
    bps.sort();
    bps.dedup();
    let mut out = Vec::with_capacity(bps.len() * 2 + 1);
    for (i, &b) in bps.iter().enumerate() {
        if i > 0 {
            out.push(bps[i - 1].midpoint(&b));
        }
        out.push(b);
    }
    if let Some(&last) = bps.last() {
        out.push(last + last);
    }
    out
}

/// Strong triangle inequality check with witness.
pub fn is_ultrametric(space: &FiniteMetricSpace) -> UltrametricReport {
    let witness = space.ultrametric_witness();
    UltrametricReport {
        ultra: witness.is_none(),
        witness,
    }
}

pub fn ball_members(space: &FiniteMetricSpace, ball: &Ball) -> PointSet {
    space.members(ball)
}

/// Lowest-index `z` with `d(x,z), d(z,y) < ε + d(x,y)/2`.
pub fn has_approx_midpoint(
    space: &FiniteMetricSpace,
    x: usize,
    y: usize,
    eps: Rational,
) -> Option<usize> {
    if x == y {
        return Some(x);
    }
    let dxy = space.dist(x, y);
    (0..space.len()).find(|&z| {
        space.lt_eps_plus_half(space.dist(x, z), dxy, eps)
            && space.lt_eps_plus_half(space.dist(z, y), dxy, eps)
    })
}
