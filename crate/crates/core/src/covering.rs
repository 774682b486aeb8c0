//! Constructive covers.
//!
//! The workhorse is repeated maximal-disjoint extraction: scan the balls
//! (largest radius first, then ascending center, then input position),
//! keep every ball centered at a still-uncovered point whose members miss
//! everything kept so far, call that one family, and repeat on the points
//! left uncovered. Every family is pairwise disjoint as member sets.
//!
//! Generation `n >= 1` of a family with top radius `R` holds the radii in
//! `(R/2^n, R/2^(n-1)]`, so the top radius is in generation 1.

use serde::{Deserialize, Serialize};

use crate::ball::{Ball, BallFamily};
use crate::besicovitch::{max_overlap, OverlapReport};
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::rational::Rational;
use crate::space::{has_approx_midpoint, BallKind, FiniteMetricSpace};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverResult {
    pub families: Vec<BallFamily>,
    pub m: usize,
    pub covered: PointSet,
    pub leftover: PointSet,
}

impl CoverResult {
    fn new(space: &FiniteMetricSpace, kind: BallKind, a: &PointSet, families: Vec<Vec<Ball>>) -> Self {
        let mut union = PointSet::empty(space.len());
        for b in families.iter().flatten() {
            union.union_with(&space.members(b));
        }
        let families: Vec<BallFamily> = families
            .into_iter()
            .map(|f| BallFamily::from_balls(kind, f).expect("one kind throughout"))
            .collect();
        CoverResult {
            m: families.len(),
            families,
            covered: a.intersection(&union),
            leftover: a.difference(&union),
        }
    }

    /// Every family pairwise disjoint, and `covered` really covered.
    pub fn verify(&self, space: &FiniteMetricSpace) -> Result<()> {
        let mut union = PointSet::empty(space.len());
        for (i, f) in self.families.iter().enumerate() {
            let mut taken = PointSet::empty(space.len());
            for b in f {
                let m = space.members(b);
                if m.intersects(&taken) {
                    return Err(Error::PreconditionViolated(format!(
                        "family {i} is not disjoint at {b:?}"
                    )));
                }
                taken.union_with(&m);
            }
            union.union_with(&taken);
        }
        match self.covered.difference(&union).first() {
            Some(p) => Err(Error::CoverIncomplete {
                point: p,
                reason: Some("reported covered but in no ball".into()),
            }),
            None if self.m != self.families.len() => {
                Err(Error::PreconditionViolated("m differs from the family count".into()))
            }
            None => Ok(()),
        }
    }

    pub fn all_balls(&self) -> impl Iterator<Item = &Ball> {
        self.families.iter().flat_map(|f| f.iter())
    }
}

/// Maximal-disjoint extraction until `a` is covered. Every point of `a`
/// must be the center of some ball in `balls`.
fn extract_families(space: &FiniteMetricSpace, a: &PointSet, balls: &[Ball]) -> Vec<Vec<Ball>> {
    let mut order: Vec<(usize, PointSet)> = balls
        .iter()
        .enumerate()
        .filter(|(_, b)| a.contains(b.center))
        .map(|(i, b)| (i, space.members(b)))
        .collect();
    order.sort_by(|(i, _), (j, _)| {
        let (a, b) = (&balls[*i], &balls[*j]);
        b.radius.cmp(&a.radius).then(a.center.cmp(&b.center)).then(i.cmp(j))
    });
    let mut uncovered = a.clone();
    let mut families = Vec::new();
    while !uncovered.is_empty() {
        let mut family = Vec::new();
        let mut taken = PointSet::empty(space.len());
        for (i, m) in &order {
            if uncovered.contains(balls[*i].center) && m.is_disjoint(&taken) {
                taken.union_with(m);
                family.push(balls[*i]);
            }
        }
        assert!(!family.is_empty(), "an uncovered point has no ball");
        uncovered.difference_with(&taken);
        families.push(family);
    }
    families
}

fn check_centered(space: &FiniteMetricSpace, a: &PointSet, c: &BallFamily) -> Result<()> {
    c.check_in(space)?;
    let mut centers = PointSet::empty(space.len());
    for b in c {
        if !a.contains(b.center) {
            return Err(Error::PreconditionViolated(format!(
                "{b:?} is not centered in the target set"
            )));
        }
        centers.insert(b.center);
    }
    match a.difference(&centers).first() {
        Some(p) => Err(Error::CoverIncomplete {
            point: p,
            reason: Some("no ball of the family is centered here".into()),
        }),
        None => Ok(()),
    }
}

fn check_set(space: &FiniteMetricSpace, a: &PointSet) -> Result<()> {
    match a.iter().find(|&p| p >= space.len()) {
        Some(p) => Err(Error::PointOutOfRange { index: p, n: space.len() }),
        None if a.universe() != space.len() => Err(Error::PreconditionViolated(format!(
            "point set over {} points used with a space of {}",
            a.universe(),
            space.len()
        ))),
        None => Ok(()),
    }
}

/// Balls of radius `r` at every point of `a`, split into disjoint families.
pub fn equal_radius_cover(
    space: &FiniteMetricSpace,
    a: &PointSet,
    r: Rational,
    kind: BallKind,
) -> Result<CoverResult> {
    check_set(space, a)?;
    let balls = a
        .iter()
        .map(|c| Ball::new(c, r, kind))
        .collect::<Result<Vec<_>>>()?;
    Ok(CoverResult::new(space, kind, a, extract_families(space, a, &balls)))
}

/// One disjoint subfamily of `c` covering `a` in an ultrametric space:
/// take the first uncovered point, keep the largest ball of `c` through
/// it (lowest center, then position, on ties), repeat.
pub fn ultrametric_greedy_disjoint_cover(
    space: &FiniteMetricSpace,
    a: &PointSet,
    c: &BallFamily,
) -> Result<BallFamily> {
    check_set(space, a)?;
    if let Some(w) = crate::space::is_ultrametric(space).witness {
        return Err(Error::NotUltrametric(w));
    }
    c.check_in(space)?;
    if let Some(b) = c.iter().find(|b| !a.contains(b.center)) {
        return Err(Error::PreconditionViolated(format!(
            "{b:?} is not centered in the target set"
        )));
    }
    let sets: Vec<PointSet> = c.iter().map(|b| space.members(b)).collect();
    let mut union = PointSet::empty(space.len());
    sets.iter().for_each(|s| union.union_with(s));
    if let Some(p) = a.difference(&union).first() {
        return Err(Error::CoverIncomplete { point: p, reason: None });
    }
    let mut out = BallFamily::new(c.kind());
    let mut uncovered = a.clone();
    while let Some(p) = uncovered.first() {
        let pick = (0..c.len())
            .filter(|&i| sets[i].contains(p))
            .min_by(|&i, &j| {
                let (bi, bj) = (&c.balls()[i], &c.balls()[j]);
                bj.radius.cmp(&bi.radius).then(bi.center.cmp(&bj.center)).then(i.cmp(&j))
            })
            .expect("family covers the target");
        out.push(c.balls()[pick])?;
        uncovered.difference_with(&sets[pick]);
    }
    Ok(out)
}

/// Bound for the localized cover: `max{D², ⌈log₂(R/r)⌉·D³}`.
pub fn localized_bound(space: &FiniteMetricSpace, d: usize, r: Rational, big_r: Rational) -> u128 {
    let d = d as u128;
    let l = space.ceil_log2_ratio(big_r, r).max(0) as u128;
    (d * d).max(l.saturating_mul(d.saturating_pow(3)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalizedCover {
    #[serde(flatten)]
    pub cover: CoverResult,
    pub r: Rational,
    #[serde(rename = "R")]
    pub big_r: Rational,
    /// Number of dyadic radius subranges processed.
    pub scales: usize,
    pub bound: Option<u128>,
}

/// Disjoint families covering `a` from a centered family with radii in
/// `[r, R]` (default: the family's own extremes). When `R/r > 2` the radii
/// are split into `[2^(j-1) r, 2^j r]` and each range is extracted on the
/// points still uncovered. With `known_d`, fails if the count exceeds
/// [`localized_bound`].
pub fn localized_cover(
    space: &FiniteMetricSpace,
    a: &PointSet,
    c: &BallFamily,
    range: Option<(Rational, Rational)>,
    known_d: Option<usize>,
) -> Result<LocalizedCover> {
    check_set(space, a)?;
    check_centered(space, a, c)?;
    if a.is_empty() {
        let cover = CoverResult::new(space, c.kind(), a, Vec::new());
        let one = Rational::ONE;
        return Ok(LocalizedCover { cover, r: one, big_r: one, scales: 0, bound: None });
    }
    let (r, big_r) = range.unwrap_or_else(|| {
        (c.min_radius().expect("nonempty"), c.max_radius().expect("nonempty"))
    });
    if let Some(b) = c.iter().find(|b| b.radius < r || b.radius > big_r) {
        return Err(Error::RadiusOutOfRange {
            center: b.center,
            radius: b.radius,
            min: r,
            max: big_r,
        });
    }
    let l = space.ceil_log2_ratio(big_r, r).max(1);
    let mut families = Vec::new();
    let mut covered = PointSet::empty(space.len());
    let mut scales = 0;
    if l <= 1 {
        families = extract_families(space, a, c.balls());
        scales = 1;
    } else {
        let mut lower = r;
        for j in 1..=l {
            let upper = space.scale_radius(r, Rational::pow2(j));
            let group: Vec<Ball> = c
                .iter()
                .filter(|b| (j == 1 || b.radius > lower) && b.radius <= upper)
                .copied()
                .collect();
            let mut centers = PointSet::empty(space.len());
            group.iter().for_each(|b| centers.insert(b.center));
            let stage = centers.difference(&covered);
            if !stage.is_empty() {
                let fams = extract_families(space, &stage, &group);
                for b in fams.iter().flatten() {
                    covered.union_with(&space.members(b));
                }
                families.extend(fams);
                scales += 1;
            }
            lower = upper;
        }
    }
    let cover = CoverResult::new(space, c.kind(), a, families);
    let bound = known_d.map(|d| localized_bound(space, d, r, big_r));
    if let Some(bound) = bound {
        if cover.m as u128 > bound {
            return Err(Error::BoundViolated {
                what: "localized cover families".into(),
                achieved: cover.m as u128,
                bound,
            });
        }
    }
    Ok(LocalizedCover { cover, r, big_r, scales, bound })
}

/// Generation of radius `s` under top radius `big_r`.
pub fn generation_of(space: &FiniteMetricSpace, s: Rational, big_r: Rational) -> u32 {
    assert!(s.is_positive() && s <= big_r, "radius {s} outside (0, {big_r}]");
    let mut n = 1;
    while s <= space.scale_radius(big_r, Rational::pow2(-(n as i32))) {
        n += 1;
    }
    n
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationBucket {
    pub n: u32,
    /// Centers of this generation not covered by earlier stages.
    pub stage_set: PointSet,
    pub families: Vec<BallFamily>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BesicovitchCover {
    pub selected: BallFamily,
    pub generations: Vec<GenerationBucket>,
    #[serde(rename = "R")]
    pub big_r: Rational,
    pub overlap: OverlapReport,
    /// Largest number of families any single stage needed.
    pub per_scale_m: usize,
    pub bound: Option<u128>,
}

/// Subfamily of a centered cover with bounded overlap: generation by
/// generation, the centers not yet covered are covered by disjoint
/// families of that generation's balls. With both `known_l` and
/// `known_c`, fails if the overlap exceeds `L·C`.
pub fn besicovitch_cover(
    space: &FiniteMetricSpace,
    a: &PointSet,
    c: &BallFamily,
    top: Option<Rational>,
    known_l: Option<usize>,
    known_c: Option<usize>,
) -> Result<BesicovitchCover> {
    check_set(space, a)?;
    check_centered(space, a, c)?;
    let big_r = match (top, c.max_radius()) {
        (Some(t), Some(m)) if m > t => {
            return Err(Error::RadiusOutOfRange {
                center: c.iter().find(|b| b.radius > t).expect("exists").center,
                radius: m,
                min: Rational::ZERO,
                max: t,
            })
        }
        (Some(t), _) => t,
        (None, Some(m)) => m,
        (None, None) => Rational::ONE,
    };
    let mut by_gen: Vec<(u32, Ball)> = c.iter().map(|b| (generation_of(space, b.radius, big_r), *b)).collect();
    by_gen.sort_by_key(|(g, _)| *g);
    let mut covered = PointSet::empty(space.len());
    let mut generations = Vec::new();
    let mut selected = BallFamily::new(c.kind());
    let mut per_scale_m = 0;
    let mut i = 0;
    while i < by_gen.len() {
        let g = by_gen[i].0;
        let group: Vec<Ball> = by_gen[i..].iter().take_while(|(h, _)| *h == g).map(|(_, b)| *b).collect();
        i += group.len();
        let mut centers = PointSet::empty(space.len());
        group.iter().for_each(|b| centers.insert(b.center));
        let stage = centers.difference(&covered);
        let fams = extract_families(space, &stage, &group);
        per_scale_m = per_scale_m.max(fams.len());
        for b in fams.iter().flatten() {
            covered.union_with(&space.members(b));
            selected.push(*b)?;
        }
        generations.push(GenerationBucket {
            n: g,
            stage_set: stage,
            families: fams
                .into_iter()
                .map(|f| BallFamily::from_balls(c.kind(), f))
                .collect::<Result<_>>()?,
        });
    }
    if let Some(p) = a.difference(&covered).first() {
        return Err(Error::CoverIncomplete { point: p, reason: None });
    }
    let overlap = max_overlap(space, &selected);
    let bound = known_l.zip(known_c).map(|(l, cc)| l as u128 * cc as u128);
    if let Some(bound) = bound {
        if overlap.max_overlap as u128 > bound {
            return Err(Error::BoundViolated {
                what: "Besicovitch cover overlap".into(),
                achieved: overlap.max_overlap as u128,
                bound,
            });
        }
    }
    Ok(BesicovitchCover {
        selected,
        generations,
        big_r,
        overlap,
        per_scale_m,
        bound,
    })
}

/// Two selected balls of different generations sharing a point, where
/// the later one's center lies in the earlier one. Never happens for
/// [`besicovitch_cover`] output.
pub fn cross_generation_violation(space: &FiniteMetricSpace, cover: &BesicovitchCover) -> Option<(Ball, Ball)> {
    for (gi, early) in cover.generations.iter().enumerate() {
        for late in &cover.generations[gi + 1..] {
            for e in early.families.iter().flatten() {
                let em = space.members(e);
                for l in late.families.iter().flatten() {
                    if em.intersects(&space.members(l)) && em.contains(l.center) {
                        return Some((*e, *l));
                    }
                }
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rearrangement {
    #[serde(flatten)]
    pub cover: CoverResult,
    /// Every pair of points has an ε-approximate midpoint.
    pub midpoint_ok: bool,
    /// `L·D⁶ + 1`.
    pub bound: Option<u128>,
    /// `L·D⁵ + 1`, the smaller constant quoted in some statements.
    pub alt_bound: Option<u128>,
    /// Whether `m <= bound`; `None` without constants.
    pub within_bound: Option<bool>,
}

/// Regroups `c_prime` into disjoint families: each family is one greedy
/// pass over the remaining balls in generation order, keeping a ball when
/// it misses every ball already kept in this pass. The bound is enforced
/// (as `BoundViolated`) only when the midpoint spot check at `eps`
/// passes; otherwise it is reported.
pub fn disjoint_rearrangement(
    space: &FiniteMetricSpace,
    c_prime: &BallFamily,
    top: Option<Rational>,
    known_l: Option<usize>,
    known_d: Option<usize>,
    eps: Option<Rational>,
) -> Result<Rearrangement> {
    c_prime.check_in(space)?;
    let big_r = top.or(c_prime.max_radius()).unwrap_or(Rational::ONE);
    let mut remaining: Vec<(u32, usize, Ball, PointSet)> = c_prime
        .iter()
        .enumerate()
        .map(|(i, b)| (generation_of(space, b.radius, big_r), i, *b, space.members(b)))
        .collect();
    remaining.sort_by_key(|(g, i, _, _)| (*g, *i));
    let mut families = Vec::new();
    while !remaining.is_empty() {
        let mut taken = PointSet::empty(space.len());
        let mut family = Vec::new();
        remaining.retain(|(_, _, b, m)| {
            if m.is_disjoint(&taken) {
                taken.union_with(m);
                family.push(*b);
                false
            } else {
                true
            }
        });
        families.push(family);
    }
    let mut all = PointSet::empty(space.len());
    for b in c_prime {
        all.union_with(&space.members(b));
    }
    let cover = CoverResult::new(space, c_prime.kind(), &all, families);
    let eps = eps.or(space.min_positive_distance()).unwrap_or(Rational::ONE);
    let midpoint_ok = (0..space.len())
        .all(|x| (x + 1..space.len()).all(|y| has_approx_midpoint(space, x, y, eps).is_some()));
    let consts = known_l.zip(known_d).map(|(l, d)| (l as u128, d as u128));
    let bound = consts.map(|(l, d)| l.saturating_mul(d.saturating_pow(6)).saturating_add(1));
    let alt_bound = consts.map(|(l, d)| l.saturating_mul(d.saturating_pow(5)).saturating_add(1));
    let within_bound = bound.map(|b| cover.m as u128 <= b);
    if midpoint_ok && within_bound == Some(false) {
        return Err(Error::BoundViolated {
            what: "disjoint rearrangement families".into(),
            achieved: cover.m as u128,
            bound: bound.expect("set with within_bound"),
        });
    }
    Ok(Rearrangement {
        cover,
        midpoint_ok,
        bound,
        alt_bound,
        within_bound,
    })
}

/// Lowest-index `z` (trying `x` first) with `y ∈ B°(z,t) ⊆ B°(x,r)`.
pub fn find_inner_ball(
    space: &FiniteMetricSpace,
    x: usize,
    r: Rational,
    y: usize,
    t: Rational,
) -> Result<Option<usize>> {
    space.check_point(x)?;
    space.check_point(y)?;
    if !(t.is_positive() && t < r) {
        return Err(Error::PreconditionViolated(format!("need 0 < t < r, got t = {t}, r = {r}")));
    }
    let outer = space.members_of(x, r, BallKind::Open);
    if !outer.contains(y) {
        return Err(Error::PreconditionViolated(format!("point {y} is not in B°({x}, {r})")));
    }
    if space.dist(x, y) < t {
        return Ok(Some(x));
    }
    Ok((0..space.len()).find(|&z| {
        space.dist(z, y) < t && space.members_of(z, t, BallKind::Open).is_subset(&outer)
    }))
}
