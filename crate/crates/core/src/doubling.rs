//! Doubling numbers and constants, and the covering/packing bounds that
//! follow from a doubling bound `N`: iterated halving covers, packings of
//! disjoint balls, and covers from maximal disjoint families.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ball::{Ball, BallFamily};
use crate::clique::{max_clique, Graph};
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::rational::Rational;
use crate::setcover::{exact_cover, greedy_cover, DEFAULT_NODE_BUDGET, EXACT_LIMIT};
use crate::space::{BallKind, FiniteMetricSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    /// Largest uncovered gain first, lowest center on ties.
    Greedy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportMethod {
    Exact,
    GreedyUpperBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverOptions {
    pub method: Method,
    /// Largest ball (in points) handed to the exact solver; bigger balls
    /// fall back to greedy. At most 128.
    pub exact_cap: usize,
    pub node_budget: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            method: Method::Exact,
            exact_cap: 64,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

impl SolverOptions {
    pub fn exact() -> Self {
        SolverOptions::default()
    }

    pub fn greedy() -> Self {
        SolverOptions {
            method: Method::Greedy,
            ..SolverOptions::default()
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.exact_cap = cap.min(EXACT_LIMIT);
        self
    }
}

/// A cover of one ball by smaller balls of the same kind.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallCover {
    pub ball: Ball,
    pub radius: Rational,
    pub centers: Vec<usize>,
    /// The count is a proven minimum.
    pub exact: bool,
    /// The ball is a single point.
    pub degenerate: bool,
}

impl BallCover {
    pub fn count(&self) -> usize {
        self.centers.len()
    }
}

/// Fewest balls of `radius` (same kind, any centers) covering `ball`.
pub fn cover_number(
    space: &FiniteMetricSpace,
    ball: &Ball,
    radius: Rational,
    opts: SolverOptions,
) -> BallCover {
    let target = space.members(ball);
    let candidates: Vec<(usize, PointSet)> = (0..space.len())
        .filter_map(|c| {
            let m = space.members_of(c, radius, ball.kind).intersection(&target);
            (!m.is_empty()).then_some((c, m))
        })
        .collect();
    let degenerate = target.len() == 1;
    let use_exact = opts.method == Method::Exact && target.len() <= opts.exact_cap.min(EXACT_LIMIT);
    let (centers, exact) = if use_exact {
        let sol = exact_cover(&target, &candidates, opts.node_budget)
            .expect("balls at every point cover the target");
        (sol.chosen, sol.exact)
    } else {
        let g = greedy_cover(&target, &candidates).expect("balls at every point cover the target");
        let exact = g.len() == 1;
        (g, exact)
    };
    BallCover {
        ball: *ball,
        radius,
        centers,
        exact: exact || degenerate,
        degenerate,
    }
}

/// Fewest half-radius balls covering `ball`.
pub fn doubling_number(space: &FiniteMetricSpace, ball: &Ball, opts: SolverOptions) -> BallCover {
    cover_number(space, ball, space.half_radius(ball.radius), opts)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoublingReport {
    #[serde(rename = "D")]
    pub d: usize,
    pub kind: BallKind,
    pub per_ball: Vec<(Ball, usize)>,
    pub witness_ball: Ball,
    pub witness_centers: Vec<usize>,
    pub method: ReportMethod,
}

/// Max doubling number over all balls centered at points of the space
/// with the given radii (default: every radius at which the ball or its
/// halves can change, which makes the result exact over all `r > 0`).
pub fn doubling_constant(
    space: &FiniteMetricSpace,
    kind: BallKind,
    radii: Option<&[Rational]>,
    opts: SolverOptions,
) -> DoublingReport {
    assert!(!space.is_empty(), "doubling constant of an empty space");
    let owned;
    let radii = match radii {
        Some(r) => r,
        None => {
            owned = space.doubling_radii();
            &owned
        }
    };
    let balls: Vec<Ball> = radii
        .iter()
        .flat_map(|&r| (0..space.len()).map(move |c| Ball { center: c, radius: r, kind }))
        .collect();
    let covers: Vec<BallCover> = balls
        .par_iter()
        .map(|b| doubling_number(space, b, opts))
        .collect();
    let best = covers
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.count().cmp(&b.count()).then(j.cmp(i)))
        .map(|(_, c)| c)
        .expect("at least one ball");
    DoublingReport {
        d: best.count(),
        kind,
        per_ball: covers.iter().map(|c| (c.ball, c.count())).collect(),
        witness_ball: best.ball,
        witness_centers: best.centers.clone(),
        method: if covers.iter().all(|c| c.exact) {
            ReportMethod::Exact
        } else {
            ReportMethod::GreedyUpperBound
        },
    }
}

/// Radii `2k` times the smallest distance, up to the first one beyond
/// the diameter. On a lattice these are the radii whose balls are exact
/// lattice cubes with lattice-aligned halves.
pub fn lattice_resolved_radii(space: &FiniteMetricSpace) -> Vec<Rational> {
    let Some(h) = space.min_positive_distance() else {
        return vec![Rational::ONE];
    };
    let mut out = Vec::new();
    for k in 1.. {
        let r = space.scale_radius(h, Rational::from_integer(2 * k));
        out.push(r);
        if r > space.diameter() {
            break;
        }
    }
    out
}

/// `n^k`, saturating.
fn pow_bound(n: usize, k: i32) -> u128 {
    (n as u128).saturating_pow(k.max(0) as u32)
}

fn check_t(t: Rational) -> Result<()> {
    if t.is_positive() && t <= Rational::ONE {
        Ok(())
    } else {
        Err(Error::PreconditionViolated(format!("scale t = {t} must be in (0, 1]")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaledCover {
    pub balls: BallFamily,
    pub exponent: i32,
    pub bound: u128,
}

/// Cover of `ball` by balls of radius `t·r`, built by halving
/// `⌈-log₂ t⌉` times and then enlarging every radius to `t·r`. Fails with
/// `BoundViolated` when more than `n^⌈-log₂ t⌉` balls were needed, which
/// means `n` is not a doubling bound for the space.
pub fn scaled_cover(
    space: &FiniteMetricSpace,
    ball: &Ball,
    t: Rational,
    n: usize,
    opts: SolverOptions,
) -> Result<ScaledCover> {
    check_t(t)?;
    space.check_point(ball.center)?;
    let k = t.ceil_neg_log2().max(0);
    let mut level = vec![*ball];
    for _ in 0..k {
        let mut next: Vec<Ball> = Vec::new();
        for b in &level {
            let cover = doubling_number(space, b, opts);
            for c in cover.centers {
                let child = Ball {
                    center: c,
                    radius: cover.radius,
                    kind: b.kind,
                };
                if !next.contains(&child) {
                    next.push(child);
                }
            }
        }
        level = next;
    }
    let radius = space.scale_radius(ball.radius, t);
    let balls: Vec<Ball> = level
        .iter()
        .map(|b| Ball { radius, ..*b })
        .fold(Vec::new(), |mut acc, b| {
            if !acc.contains(&b) {
                acc.push(b);
            }
            acc
        });
    let target = space.members(ball);
    let mut covered = PointSet::empty(space.len());
    for b in &balls {
        covered.union_with(&space.members(b));
    }
    if let Some(p) = target.difference(&covered).first() {
        return Err(Error::CoverIncomplete {
            point: p,
            reason: Some("halving cover missed a point".into()),
        });
    }
    let bound = pow_bound(n, k);
    if balls.len() as u128 > bound {
        return Err(Error::BoundViolated {
            what: format!("scaled cover of {ball:?} at t = {t}"),
            achieved: balls.len() as u128,
            bound,
        });
    }
    Ok(ScaledCover {
        balls: BallFamily::from_balls(ball.kind, balls)?,
        exponent: k,
        bound,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackingReport {
    pub max_packing: usize,
    pub centers: Vec<usize>,
    pub bound: u128,
    pub ok: bool,
    /// False when the search budget ran out and `max_packing` is a lower bound.
    pub exact: bool,
}

/// Largest family of pairwise disjoint balls of radius `t·r/2` centered in
/// `ball`, against the bound `n^⌈-log₂(t/2)⌉`.
pub fn packing_bound_check(
    space: &FiniteMetricSpace,
    ball: &Ball,
    t: Rational,
    n: usize,
    budget: u64,
) -> Result<PackingReport> {
    check_t(t)?;
    space.check_point(ball.center)?;
    let half_t = t / Rational::from_integer(2);
    let radius = space.scale_radius(ball.radius, half_t);
    let centers = space.members(ball).to_vec();
    let sets: Vec<PointSet> = centers
        .iter()
        .map(|&c| space.members_of(c, radius, ball.kind))
        .collect();
    let mut g = Graph::new(centers.len());
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            if sets[i].is_disjoint(&sets[j]) {
                g.add_edge(i, j);
            }
        }
    }
    let best = max_clique(&g, budget);
    let bound = pow_bound(n, half_t.ceil_neg_log2());
    Ok(PackingReport {
        max_packing: best.clique.len(),
        centers: best.clique.iter().map(|&i| centers[i]).collect(),
        bound,
        ok: best.clique.len() as u128 <= bound,
        exact: best.exact,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetCover {
    /// Centers of a maximal family of disjoint `t·r/2` balls in `ball`.
    pub centers: Vec<usize>,
    /// Balls of radius `t·r` at those centers; they cover `ball`.
    pub balls: BallFamily,
}

/// Greedy maximal family (ascending index) of disjoint `t·r/2` balls
/// centered in `ball`, enlarged to radius `t·r`.
pub fn maximal_net_cover(space: &FiniteMetricSpace, ball: &Ball, t: Rational) -> Result<NetCover> {
    check_t(t)?;
    space.check_point(ball.center)?;
    let small = space.scale_radius(ball.radius, t / Rational::from_integer(2));
    let mut centers: Vec<usize> = Vec::new();
    let mut taken = PointSet::empty(space.len());
    for p in space.members(ball).iter() {
        let m = space.members_of(p, small, ball.kind);
        if m.is_disjoint(&taken) {
            taken.union_with(&m);
            centers.push(p);
        }
    }
    net_cover_from_centers(space, ball, t, &centers)
}

/// Checks that `centers` lie in `ball` and carry a maximal disjoint family
/// of `t·r/2` balls, then returns the `t·r` balls at them.
pub fn net_cover_from_centers(
    space: &FiniteMetricSpace,
    ball: &Ball,
    t: Rational,
    centers: &[usize],
) -> Result<NetCover> {
    check_t(t)?;
    let members = space.members(ball);
    let small = space.scale_radius(ball.radius, t / Rational::from_integer(2));
    let mut taken = PointSet::empty(space.len());
    for &c in centers {
        space.check_point(c)?;
        if !members.contains(c) {
            return Err(Error::PreconditionViolated(format!("center {c} is outside {ball:?}")));
        }
        let m = space.members_of(c, small, ball.kind);
        if !m.is_disjoint(&taken) {
            return Err(Error::PreconditionViolated(format!(
                "ball at {c} meets an earlier ball of the family"
            )));
        }
        taken.union_with(&m);
    }
    if let Some(p) = members
        .iter()
        .find(|&p| space.members_of(p, small, ball.kind).is_disjoint(&taken))
    {
        return Err(Error::PreconditionViolated(format!(
            "family is not maximal: a ball at {p} fits"
        )));
    }
    let radius = space.scale_radius(ball.radius, t);
    let balls = centers
        .iter()
        .map(|&c| Ball {
            center: c,
            radius,
            kind: ball.kind,
        })
        .collect();
    let balls = BallFamily::from_balls(ball.kind, balls)?;
    let mut covered = PointSet::empty(space.len());
    for b in &balls {
        covered.union_with(&space.members(b));
    }
    if let Some(p) = members.difference(&covered).first() {
        return Err(Error::CoverIncomplete { point: p, reason: None });
    }
    Ok(NetCover {
        centers: centers.to_vec(),
        balls,
    })
}
