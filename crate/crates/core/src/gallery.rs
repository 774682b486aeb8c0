//! Named pass/fail checks reproducing the finite claims about the
//! example spaces: the nested ultrametric `X_N`, the grid square, the 0-1
//! metric, equal-radius covers of ultrametrics, and the chain of covering
//! constants on lattices.
//!
//! Properties of infinite spaces show up here as growth in `N`: the
//! reports state the truncated value, and tests sweep `N`.

use serde::{Deserialize, Serialize};

use crate::ball::{Ball, BallFamily};
use crate::besicovitch::{besicovitch_constant, is_besicovitch_family, max_overlap, DEFAULT_CLIQUE_BUDGET};
use crate::clique::{max_clique, Graph};
use crate::covering::{besicovitch_cover, disjoint_rearrangement, equal_radius_cover};
use crate::doubling::{doubling_constant, SolverOptions};
use crate::error::{Error, Result};
use crate::generators::{
    grid_index, make_grid_square, make_lattice, make_paper_ultrametric, make_random_ultrametric, make_zero_one,
    random_centered_family, random_subset, LatticeNorm,
};
use crate::pointset::PointSet;
use crate::rational::Rational;
use crate::space::{is_ultrametric, validate_metric, BallKind, FiniteMetricSpace};

pub const CASES: [&str; 5] = ["counter07", "notSBCP", "discrete", "eqrad_ultra", "constants_chain"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GalleryReport {
    pub case_id: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub checks: Vec<Check>,
    pub all_pass: bool,
}

struct Checks(Vec<Check>);

impl Checks {
    fn add(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.0.push(Check {
            name: name.to_string(),
            pass,
            detail: detail.into(),
        });
    }

    fn report(self, case_id: &str, n: usize) -> GalleryReport {
        GalleryReport {
            case_id: case_id.to_string(),
            n,
            all_pass: self.0.iter().all(|c| c.pass),
            checks: self.0,
        }
    }
}

pub fn run_case(case_id: &str, n: usize, seed: u64) -> Result<GalleryReport> {
    match case_id {
        "counter07" => counter07(n),
        "notSBCP" => not_sbcp(n, seed),
        "discrete" => discrete(n),
        "eqrad_ultra" => eqrad_ultra(n, seed),
        "constants_chain" => constants_chain(n, seed),
        other => Err(Error::UnknownCase(other.to_string())),
    }
}

pub fn run_all(n: usize, seed: u64) -> Result<Vec<GalleryReport>> {
    CASES.iter().map(|c| run_case(c, n, seed)).collect()
}

fn need(n: usize, min: usize, what: &str) -> Result<()> {
    if n < min {
        Err(Error::PreconditionViolated(format!("{what} needs N >= {min}, got {n}")))
    } else {
        Ok(())
    }
}

fn table_valid(space: &FiniteMetricSpace) -> (bool, String) {
    let rep = validate_metric(&space.to_table());
    let detail = match rep.witness {
        None => format!("{} points, all triangle inequalities hold", space.len()),
        Some(w) => format!("violation: {w}"),
    };
    (rep.valid, detail)
}

/// Points `1..=N` with `d(i,j) = 1 - 1/max(i,j)`; index `k` is point `k+1`.
fn counter07(n: usize) -> Result<GalleryReport> {
    need(n, 4, "counter07")?;
    let x = make_paper_ultrametric(n);
    let mut c = Checks(Vec::new());
    let u = is_ultrametric(&x);
    c.add("ultrametric", u.ultra, match u.witness {
        None => "strong triangle inequality holds for all triples".to_string(),
        Some(w) => format!("violated at {w}"),
    });

    let nested: Vec<Ball> = (2..=n)
        .map(|i| Ball::closed(i - 1, Rational::ONE - Rational::new(1, i as i128)).expect("positive"))
        .collect();
    let bad = nested
        .iter()
        .find(|b| x.members(b).to_vec() != (0..=b.center).collect::<Vec<_>>());
    c.add(
        "closed_ball_members",
        bad.is_none(),
        match bad {
            None => format!("B^cl(i, 1-1/i) = {{1..i}} for 2 <= i <= {n}"),
            Some(b) => format!("{b:?} has members {:?}", x.members(b)),
        },
    );

    let chain = nested.windows(2).all(|w| x.members(&w[0]).is_subset(&x.members(&w[1])));
    c.add("nesting_chain", chain, format!("{} balls, each inside the next", nested.len()));

    let pair = PointSet::from_indices(n, [0, 1]);
    let common = nested.iter().all(|b| pair.is_subset(&x.members(b)));
    c.add("common_pair", common, "points 1 and 2 lie in every ball");

    let fam = BallFamily::from_balls(BallKind::Closed, nested.clone())?;
    let ov = max_overlap(&x, &fam);
    let at2 = ov.per_point.as_ref().expect("histogram")[1];
    c.add(
        "overlap_at_point_2",
        at2 == n - 1 && ov.max_overlap == n - 1,
        format!(
            "overlap {at2} at point 2 (maximum {}); grows as N-1, so no finite subfamily bound survives N -> infinity",
            ov.max_overlap
        ),
    );

    // slightly enlarged open radii 1 - 1/(i + 2^-i)
    let bad_open = (2..=n).find(|&i| {
        let p = 1i128 << i;
        let radius = Rational::ONE - Rational::new(p, i as i128 * p + 1);
        let b = Ball::open(i - 1, radius).expect("positive");
        x.members(&b) != x.members(&nested[i - 2])
    });
    c.add(
        "open_variant_members",
        bad_open.is_none(),
        match bad_open {
            None => "open balls with radii 1-1/(i+2^-i) have the same members".to_string(),
            Some(i) => format!("differs at i = {i}"),
        },
    );
    Ok(c.report("counter07", n))
}

/// The subcover built for the grid square: a radius-2 ball alone if there
/// is one; otherwise unit balls taken in lexicographic center order while
/// their center is still uncovered, then one sub-unit ball for each point
/// left over.
pub fn grid_square_subcover(space: &FiniteMetricSpace, a: &PointSet, c: &BallFamily) -> Result<BallFamily> {
    let two = Rational::from_integer(2);
    if let Some(b) = c.iter().find(|b| b.radius >= two) {
        return BallFamily::from_balls(c.kind(), vec![*b]);
    }
    let mut unit: Vec<&Ball> = c.iter().filter(|b| b.radius == Rational::ONE).collect();
    if unit.is_empty() {
        return Ok(c.clone());
    }
    unit.sort_by_key(|b| b.center);
    let mut out = BallFamily::new(c.kind());
    let mut covered = PointSet::empty(space.len());
    for b in unit {
        if !covered.contains(b.center) {
            covered.union_with(&space.members(b));
            out.push(*b)?;
        }
    }
    for y in a.iter().filter(|&y| !covered.contains(y)) {
        let small = c
            .iter()
            .find(|b| b.center == y && b.radius < Rational::ONE)
            .ok_or(Error::CoverIncomplete {
                point: y,
                reason: Some("no sub-unit ball at an uncovered point".into()),
            })?;
        out.push(*small)?;
    }
    Ok(out)
}

fn not_sbcp(n: usize, seed: u64) -> Result<GalleryReport> {
    need(n, 4, "notSBCP")?;
    let g = make_grid_square(n);
    let np = g.len();
    let mut c = Checks(Vec::new());
    let (ok, detail) = table_valid(&g);
    c.add("metric", ok, detail);

    // For every point q: the largest set of centers in general position
    // whose unit balls all contain q.
    let general = |a: usize, b: usize| a / n != b / n && a % n != b % n;
    let mut worst = 0;
    for q in 0..np {
        let through: Vec<usize> = (0..np).filter(|&z| g.dist(z, q) <= Rational::ONE).collect();
        let mut gr = Graph::new(through.len());
        for i in 0..through.len() {
            for j in i + 1..through.len() {
                if general(through[i], through[j]) {
                    gr.add_edge(i, j);
                }
            }
        }
        worst = worst.max(max_clique(&gr, DEFAULT_CLIQUE_BUDGET).clique.len());
    }
    c.add(
        "triple_intersection_empty",
        worst <= 2,
        format!("at most {worst} unit balls with centers in general position share a point"),
    );

    let mut worst_family = 0;
    for s in 0..10 {
        use rand::{seq::SliceRandom, Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed.wrapping_add(s));
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let balls: Vec<Ball> = (0..n)
            .filter(|_| rng.gen_bool(0.7))
            .map(|i| Ball::closed(grid_index(n, i, perm[i]), Rational::ONE).expect("positive"))
            .collect();
        let fam = BallFamily::from_balls(BallKind::Closed, balls)?;
        worst_family = worst_family.max(max_overlap(&g, &fam).max_overlap);
    }
    c.add(
        "general_position_overlap",
        worst_family <= 2,
        format!("10 seeded general-position unit families, worst overlap {worst_family}"),
    );

    let mut bad_pair = None;
    'pairs: for i in 0..n {
        for j in i + 1..n {
            let a = Ball::closed(grid_index(n, i, i), Rational::ONE)?;
            let b = Ball::closed(grid_index(n, j, j), Rational::ONE)?;
            let meet = g.members(&a).intersection(&g.members(&b));
            let want = PointSet::from_indices(np, [grid_index(n, i, j), grid_index(n, j, i)]);
            if meet != want {
                bad_pair = Some((i, j));
                break 'pairs;
            }
        }
    }
    c.add(
        "diagonal_pair_intersections",
        bad_pair.is_none(),
        match bad_pair {
            None => "B^cl((i,i),1) and B^cl((j,j),1) meet exactly in (i,j) and (j,i)".to_string(),
            Some((i, j)) => format!("pair ({i},{j}) differs"),
        },
    );

    let radii = [Rational::new(1, 2), Rational::ONE];
    let mut failures = Vec::new();
    let mut worst_sum = 0;
    let mut shortcut = 0;
    for s in 0..50u64 {
        let inst = seed.wrapping_mul(1_000).wrapping_add(s);
        let a = random_subset(np, 0.3, inst);
        let mut cover = random_centered_family(&a, &radii, BallKind::Closed, 2, inst);
        if s % 5 == 0 {
            cover.push(Ball::closed(a.first().expect("nonempty"), Rational::from_integer(2))?)?;
            shortcut += 1;
        }
        let sub = grid_square_subcover(&g, &a, &cover)?;
        let ov = max_overlap(&g, &sub);
        let counts = ov.per_point.expect("histogram");
        let covers_a = a.iter().all(|p| counts[p] >= 1);
        let subset = sub.iter().all(|b| cover.balls().contains(b));
        worst_sum = worst_sum.max(ov.max_overlap);
        if !covers_a || !subset || ov.max_overlap > 2 {
            failures.push(s);
        }
    }
    c.add(
        "subcover_construction",
        failures.is_empty(),
        format!(
            "50 seeded sets A ({shortcut} with a radius-2 ball): 1_A <= sum <= 2 held, worst sum {worst_sum}; failing instances {failures:?}"
        ),
    );

    let diag = PointSet::from_indices(np, (0..n).map(|j| grid_index(n, j, j)));
    let eq = equal_radius_cover(&g, &diag, Rational::ONE, BallKind::Closed)?;
    c.add(
        "equal_radius_diagonal",
        eq.m == n,
        format!("unit balls on the diagonal need m = {} disjoint families; m grows linearly in N", eq.m),
    );
    Ok(c.report("notSBCP", n))
}

fn discrete(n: usize) -> Result<GalleryReport> {
    need(n, 2, "discrete")?;
    let x = make_zero_one(n);
    let mut c = Checks(Vec::new());
    c.add("ultrametric", is_ultrametric(&x).ultra, "0-1 metric");

    let big = [Rational::new(3, 2), Rational::from_integer(2), Rational::new(101, 100)];
    let whole = big
        .iter()
        .all(|&r| (0..n).all(|p| x.members_of(p, r, BallKind::Open).len() == n));
    c.add("large_open_ball_is_everything", whole, "open balls of radius > 1 contain every point");

    let small = [Rational::new(1, 2), Rational::new(99, 100), Rational::ONE];
    let disjoint = (0..n).all(|p| {
        (p + 1..n).all(|q| {
            small.iter().all(|&r| {
                small.iter().all(|&s| {
                    x.members_of(p, r, BallKind::Open)
                        .is_disjoint(&x.members_of(q, s, BallKind::Open))
                })
            })
        })
    });
    c.add("small_open_balls_disjoint", disjoint, "open balls of radius <= 1 at distinct centers are disjoint");

    let d = doubling_constant(&x, BallKind::Open, None, SolverOptions::exact());
    c.add("doubling_constant", d.d == n, format!("D = {} for n = {n}", d.d));
    Ok(c.report("discrete", n))
}

fn eqrad_ultra(n: usize, seed: u64) -> Result<GalleryReport> {
    need(n, 2, "eqrad_ultra")?;
    let mut c = Checks(Vec::new());
    let mut bad = Vec::new();
    let mut covers = 0;
    for s in 0..10 {
        let x = make_random_ultrametric(n, seed.wrapping_add(s));
        for &r in &x.critical_radii() {
            for kind in [BallKind::Open, BallKind::Closed] {
                let cov = equal_radius_cover(&x, &x.all_points(), r, kind)?;
                covers += 1;
                let fam = &cov.families[0];
                let ok = cov.m == 1
                    && cov.verify(&x).is_ok()
                    && is_besicovitch_family(&x, fam).is_ok();
                if !ok {
                    bad.push(format!("seed {} r {r} {kind}", seed.wrapping_add(s)));
                }
            }
        }
    }
    c.add(
        "single_disjoint_family",
        bad.is_empty(),
        format!(
            "{covers} equal-radius covers of 10 random dendrogram ultrametrics: m = 1, balls disjoint and free of each other's centers; failures {bad:?}"
        ),
    );
    Ok(c.report("eqrad_ultra", n))
}

/// Doubling constant `D` and Besicovitch constant `L` from the exact
/// oracles, then seeded covers checked against `L·D³` and `L·D⁶ + 1`.
pub fn constants_chain_on(space: &FiniteMetricSpace, kind: BallKind, instances: u64, seed: u64) -> Result<(Check, Check)> {
    let d = doubling_constant(space, kind, None, SolverOptions::exact().with_cap(128)).d;
    let l = besicovitch_constant(space, None, kind, DEFAULT_CLIQUE_BUDGET)?.l;
    let radii: Vec<Rational> = space
        .critical_radii()
        .into_iter()
        .filter(|&r| r <= space.diameter())
        .collect();
    let cap3 = (l * d.pow(3)) as u128;
    let cap6 = (l as u128) * (d as u128).pow(6) + 1;
    let (mut worst_ov, mut worst_m, mut worst_scale) = (0, 0, 0);
    let mut fails = Vec::new();
    for s in 0..instances {
        let inst = seed.wrapping_mul(7_919).wrapping_add(s);
        let a = random_subset(space.len(), 0.5, inst);
        let fam = random_centered_family(&a, &radii, kind, 2, inst);
        let cov = match besicovitch_cover(space, &a, &fam, None, Some(l), Some(d.pow(3))) {
            Ok(c) => c,
            Err(e) => {
                fails.push(format!("{s}: {e}"));
                continue;
            }
        };
        worst_ov = worst_ov.max(cov.overlap.max_overlap);
        worst_scale = worst_scale.max(cov.per_scale_m);
        if cov.overlap.max_overlap > l * cov.per_scale_m {
            fails.push(format!("{s}: overlap above L times per-scale m"));
        }
        match disjoint_rearrangement(space, &cov.selected, Some(cov.big_r), Some(l), Some(d), None) {
            Ok(re) if re.within_bound == Some(true) => worst_m = worst_m.max(re.cover.m),
            Ok(re) => fails.push(format!("{s}: m = {} above bound", re.cover.m)),
            Err(e) => fails.push(format!("{s}: {e}")),
        }
    }
    let ov_fails: Vec<&String> = fails.iter().filter(|f| !f.contains("m =") && !f.contains("families")).collect();
    let m_fails: Vec<&String> = fails.iter().filter(|f| f.contains("m =") || f.contains("families")).collect();
    let overlap = Check {
        name: format!("overlap_bound_{kind}"),
        pass: ov_fails.is_empty(),
        detail: format!(
            "D = {d}, L = {l}: worst overlap {worst_ov} <= L*D^3 = {cap3} (worst per-scale m {worst_scale}) over {instances} covers; failures {ov_fails:?}"
        ),
    };
    let rearr = Check {
        name: format!("rearrangement_bound_{kind}"),
        pass: m_fails.is_empty(),
        detail: format!("worst m {worst_m} <= L*D^6+1 = {cap6}; failures {m_fails:?}"),
    };
    Ok((overlap, rearr))
}

fn constants_chain(n: usize, seed: u64) -> Result<GalleryReport> {
    need(n, 2, "constants_chain")?;
    let mut c = Checks(Vec::new());
    let spaces = [
        ("line", make_lattice(1, n, LatticeNorm::Linf)?),
        ("plane", make_lattice(2, n.min(5), LatticeNorm::Linf)?),
    ];
    for (name, space) in &spaces {
        for kind in [BallKind::Closed, BallKind::Open] {
            let (a, b) = constants_chain_on(space, kind, 10, seed)?;
            c.0.push(Check {
                name: format!("{name}_{}", a.name),
                ..a
            });
            c.0.push(Check {
                name: format!("{name}_{}", b.name),
                ..b
            });
        }
    }
    Ok(c.report("constants_chain", n))
}
