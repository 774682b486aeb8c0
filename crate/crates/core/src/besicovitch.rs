//! Besicovitch families, overlap counts, and the Besicovitch constant.
//!
//! A family is Besicovitch when no ball contains another ball's nominal
//! center. Only families through a common point matter for the constant,
//! so `L` is the largest clique, over all points `p`, of the graph on
//! candidate balls through `p` with an edge when neither contains the
//! other's center.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ball::{Ball, BallFamily};
use crate::clique::{max_clique, Graph};
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::rational::Rational;
use crate::space::{BallKind, FiniteMetricSpace};

/// Default node budget for each per-point clique search.
pub const DEFAULT_CLIQUE_BUDGET: u64 = 10_000_000;

/// First pair of positions `(i, j)` where one ball contains the other's
/// center.
pub fn besicovitch_violation(space: &FiniteMetricSpace, f: &BallFamily) -> Option<(usize, usize)> {
    let balls = f.balls();
    for i in 0..balls.len() {
        for j in i + 1..balls.len() {
            if space.contains(&balls[i], balls[j].center) || space.contains(&balls[j], balls[i].center) {
                return Some((i, j));
            }
        }
    }
    None
}

pub fn is_besicovitch_family(space: &FiniteMetricSpace, f: &BallFamily) -> Result<(), (usize, usize)> {
    match besicovitch_violation(space, f) {
        None => Ok(()),
        Some(pair) => Err(pair),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub max_overlap: usize,
    /// Lowest point reaching the maximum; absent for an empty family.
    pub witness_point: Option<usize>,
    /// Number of balls containing each point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_point: Option<Vec<usize>>,
}

pub fn max_overlap(space: &FiniteMetricSpace, f: &BallFamily) -> OverlapReport {
    let mut counts = vec![0usize; space.len()];
    for b in f {
        for p in space.members(b).iter() {
            counts[p] += 1;
        }
    }
    let max = counts.iter().copied().max().unwrap_or(0);
    OverlapReport {
        max_overlap: max,
        witness_point: if max == 0 { None } else { counts.iter().position(|&c| c == max) },
        per_point: Some(counts),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BesicovitchReport {
    #[serde(rename = "L")]
    pub l: usize,
    pub witness_family: BallFamily,
    pub witness_point: usize,
    /// Every clique search finished within budget.
    pub exact: bool,
}

/// One candidate per distinct (center, member set), named by the
/// smallest pool radius producing it.
fn candidate_balls(space: &FiniteMetricSpace, pool: &[Rational], kind: BallKind) -> Vec<(Ball, PointSet)> {
    let mut radii = pool.to_vec();
    radii.sort();
    radii.dedup();
    let mut out = Vec::new();
    for c in 0..space.len() {
        let mut last: Option<u32> = None;
        for &r in &radii {
            let t = space.rank_threshold(r, kind);
            if last == Some(t) {
                continue;
            }
            last = Some(t);
            let ball = Ball { center: c, radius: r, kind };
            out.push((ball, space.members(&ball)));
        }
    }
    out
}

/// Besicovitch constant over all balls centered at points of the space
/// with radii from `pool` (default: the critical radii).
pub fn besicovitch_constant(
    space: &FiniteMetricSpace,
    pool: Option<&[Rational]>,
    kind: BallKind,
    budget: u64,
) -> Result<BesicovitchReport> {
    let owned;
    let pool = match pool {
        Some(p) => p,
        None => {
            owned = space.critical_radii();
            &owned
        }
    };
    if pool.is_empty() {
        return Err(Error::PreconditionViolated("radius pool is empty".into()));
    }
    if let Some(&r) = pool.iter().find(|r| !r.is_positive()) {
        return Err(Error::NonPositiveRadius(r));
    }
    let cands = candidate_balls(space, pool, kind);
    let per_point: Vec<(Vec<usize>, bool)> = (0..space.len())
        .into_par_iter()
        .map(|p| {
            let through: Vec<usize> = (0..cands.len()).filter(|&i| cands[i].1.contains(p)).collect();
            let mut g = Graph::new(through.len());
            for (a, &i) in through.iter().enumerate() {
                for (b, &j) in through.iter().enumerate().skip(a + 1) {
                    let (bi, si) = &cands[i];
                    let (bj, sj) = &cands[j];
                    if !si.contains(bj.center) && !sj.contains(bi.center) {
                        g.add_edge(a, b);
                    }
                }
            }
            let res = max_clique(&g, budget);
            (res.clique.iter().map(|&a| through[a]).collect(), res.exact)
        })
        .collect();
    let (witness_point, (best, _)) = per_point
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.0.len().cmp(&b.0.len()).then(j.cmp(i)))
        .expect("space has a point");
    let witness_family = BallFamily::from_balls(kind, best.iter().map(|&i| cands[i].0).collect())?;
    Ok(BesicovitchReport {
        l: best.len(),
        witness_family,
        witness_point,
        exact: per_point.iter().all(|(_, e)| *e),
    })
}

/// In an ultrametric space, true iff no two intersecting balls of `f`
/// form a Besicovitch pair. Intersecting balls nest there, so the
/// pairwise check covers every intersecting subfamily.
pub fn intersecting_family_check(space: &FiniteMetricSpace, f: &BallFamily) -> Result<bool> {
    if let Some(w) = crate::space::is_ultrametric(space).witness {
        return Err(Error::NotUltrametric(w));
    }
    let sets: Vec<PointSet> = f.iter().map(|b| space.members(b)).collect();
    let balls = f.balls();
    for i in 0..balls.len() {
        for j in i + 1..balls.len() {
            if sets[i].intersects(&sets[j]) && !sets[i].contains(balls[j].center) && !sets[j].contains(balls[i].center) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BilipschitzReport {
    /// Smallest `d_b / d_a` over distinct pairs.
    pub lower: Rational,
    pub lower_pair: (usize, usize),
    pub upper: Rational,
    pub upper_pair: (usize, usize),
}

/// Extreme ratios `d_b(x,y) / d_a(x,y)` over distinct pairs of the same
/// point set. Ratios are of stored (encoded) distances.
pub fn bilipschitz_compare(a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> Result<BilipschitzReport> {
    if a.len() != b.len() {
        return Err(Error::PreconditionViolated(format!(
            "point counts differ: {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::PreconditionViolated("need at least two points".into()));
    }
    let mut lower = (Rational::from_integer(i64::MAX as i128), (0, 0));
    let mut upper = (Rational::ZERO, (0, 0));
    for x in 0..a.len() {
        for y in x + 1..a.len() {
            let q = b.dist(x, y) / a.dist(x, y);
            if q < lower.0 {
                lower = (q, (x, y));
            }
            if q > upper.0 {
                upper = (q, (x, y));
            }
        }
    }
    Ok(BilipschitzReport {
        lower: lower.0,
        lower_pair: lower.1,
        upper: upper.0,
        upper_pair: upper.1,
    })
}
