//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Built with `harness = false` so the lines are always
//! printed, not captured.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use besicover_core::ball::Ball;
use besicover_core::besicovitch::{besicovitch_constant, bilipschitz_compare, is_besicovitch_family, DEFAULT_CLIQUE_BUDGET};
use besicover_core::covering::{equal_radius_cover, localized_cover};
use besicover_core::doubling::{
    cover_number, doubling_constant, doubling_number, lattice_resolved_radii, maximal_net_cover,
    net_cover_from_centers, packing_bound_check, scaled_cover, SolverOptions,
};
use besicover_core::gallery::{constants_chain_on, run_case, GalleryReport};
use besicover_core::generators::{
    make_grid_square, make_lattice, make_paper_ultrametric, make_random_ultrametric, make_zero_one,
    random_centered_family, random_subset, LatticeNorm,
};
use besicover_core::{BallKind, FiniteMetricSpace, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn r(s: &str) -> Rational {
    s.parse().unwrap()
}

fn opts() -> SolverOptions {
    SolverOptions::exact().with_cap(128)
}

fn failing(rep: &GalleryReport, names: &[&str]) -> Vec<String> {
    let mut out = Vec::new();
    for name in names {
        match rep.checks.iter().find(|c| c.name == *name) {
            Some(c) if c.pass => {}
            Some(c) => out.push(format!("N={} {}: {}", rep.n, c.name, c.detail)),
            None => out.push(format!("N={} {name}: missing", rep.n)),
        }
    }
    out
}

fn gallery_sweep(case: &str, ns: std::ops::RangeInclusive<usize>, names: &[&str], limit: Duration) -> Outcome {
    let mut bad = Vec::new();
    let mut slowest = (Duration::ZERO, 0);
    for n in ns.clone() {
        let start = Instant::now();
        match run_case(case, n, 0) {
            Ok(rep) => bad.extend(failing(&rep, names)),
            Err(e) => bad.push(format!("N={n}: {e}")),
        }
        let took = start.elapsed();
        if took > slowest.0 {
            slowest = (took, n);
        }
    }
    if slowest.0 >= limit {
        bad.push(format!("N={} took {:?}, limit {:?}", slowest.1, slowest.0, limit));
    }
    outcome(
        bad.is_empty(),
        format!(
            "N in {}..={}, slowest {:?} at N={}; failures {:?}",
            ns.start(),
            ns.end(),
            slowest.0,
            slowest.1,
            bad
        ),
    )
}

fn c1() -> Outcome {
    gallery_sweep(
        "counter07",
        4..=64,
        &["ultrametric", "closed_ball_members", "overlap_at_point_2"],
        Duration::from_secs(1),
    )
}

fn c2() -> Outcome {
    gallery_sweep(
        "notSBCP",
        4..=32,
        &[
            "triple_intersection_empty",
            "general_position_overlap",
            "diagonal_pair_intersections",
            "subcover_construction",
            "equal_radius_diagonal",
        ],
        Duration::from_secs(5),
    )
}

fn c3() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for n in 2..=32 {
        let d = doubling_constant(&make_zero_one(n), BallKind::Open, None, opts()).d;
        if d != n {
            bad.push(format!("0-1 space n={n}: D={d}"));
        }
    }
    let line = make_lattice(1, 21, LatticeNorm::Linf).unwrap();
    let radii = lattice_resolved_radii(&line);
    let lo = doubling_constant(&line, BallKind::Open, Some(&radii), opts()).d;
    let lc = doubling_constant(&line, BallKind::Closed, Some(&radii), opts()).d;
    let plane = make_lattice(2, 9, LatticeNorm::Linf).unwrap();
    let radii = lattice_resolved_radii(&plane);
    let po = doubling_constant(&plane, BallKind::Open, Some(&radii), opts());
    let pc = doubling_constant(&plane, BallKind::Closed, Some(&radii), opts());
    if (lo, lc) != (3, 2) {
        bad.push(format!("line: open {lo}, closed {lc}"));
    }
    if (po.d, pc.d) != (9, 4) {
        bad.push(format!("plane: open {}, closed {}", po.d, pc.d));
    }
    let took = start.elapsed();
    if took >= Duration::from_secs(30) {
        bad.push(format!("took {took:?}"));
    }
    outcome(
        bad.is_empty(),
        format!(
            "0-1 D=n for n in 2..=32; line open {lo} closed {lc}; plane open {} closed {} ({:?}); {took:?}; failures {bad:?}",
            po.d, pc.d, po.method
        ),
    )
}

/// Small spaces where the exact doubling constant over every radius is cheap.
fn generated_spaces() -> Vec<(&'static str, FiniteMetricSpace)> {
    vec![
        ("line21", make_lattice(1, 21, LatticeNorm::Linf).unwrap()),
        ("plane5", make_lattice(2, 5, LatticeNorm::Linf).unwrap()),
        ("plane5_l2", make_lattice(2, 5, LatticeNorm::L2Squared).unwrap()),
        ("zero_one8", make_zero_one(8)),
        ("ultra16", make_paper_ultrametric(16)),
        ("grid5", make_grid_square(5)),
        ("dendro24", make_random_ultrametric(24, 3)),
    ]
}

fn c4() -> Outcome {
    let ts = [r("1"), r("1/2"), r("1/3"), r("1/4")];
    let mut bad = Vec::new();
    let mut checked = 0;
    for (name, space) in generated_spaces() {
        let radii = space.doubling_radii();
        for kind in [BallKind::Open, BallKind::Closed] {
            let d = doubling_constant(&space, kind, None, opts()).d;
            let mut rng = ChaCha8Rng::seed_from_u64(4);
            for _ in 0..20 {
                let ball = Ball::new(
                    rng.gen_range(0..space.len()),
                    radii[rng.gen_range(0..radii.len())],
                    kind,
                )
                .unwrap();
                for &t in &ts {
                    checked += 1;
                    if let Err(e) = scaled_cover(&space, &ball, t, d, opts()) {
                        bad.push(format!("{name} {ball:?} t={t}: {e}"));
                    }
                    match packing_bound_check(&space, &ball, t, d, DEFAULT_CLIQUE_BUDGET) {
                        Ok(p) if p.ok && p.exact => {}
                        Ok(p) => bad.push(format!("{name} {ball:?} t={t}: packing {} bound {}", p.max_packing, p.bound)),
                        Err(e) => bad.push(format!("{name} {ball:?} t={t}: {e}")),
                    }
                }
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{checked} (ball, t) pairs over {} spaces, both kinds; violations {bad:?}", generated_spaces().len()),
    )
}

fn c5() -> Outcome {
    let start = Instant::now();
    let spaces = [
        ("line21", make_lattice(1, 21, LatticeNorm::Linf).unwrap()),
        ("plane7", make_lattice(2, 7, LatticeNorm::Linf).unwrap()),
        ("grid6", make_grid_square(6)),
    ];
    let mut bad = Vec::new();
    let mut worst = (0usize, 0u128);
    for (name, space) in &spaces {
        let radii: Vec<Rational> = space
            .critical_radii()
            .into_iter()
            .filter(|&x| x <= space.diameter())
            .collect();
        for kind in [BallKind::Open, BallKind::Closed] {
            let d = doubling_constant(space, kind, None, opts()).d;
            for s in 0..50u64 {
                let a = random_subset(space.len(), 0.4, s);
                let fam = random_centered_family(&a, &radii, kind, 3, s);
                match localized_cover(space, &a, &fam, None, Some(d)) {
                    Ok(c) => {
                        if c.cover.verify(space).is_err() {
                            bad.push(format!("{name} {kind} seed {s}: not a disjoint cover"));
                        }
                        let bound = c.bound.unwrap();
                        if (c.cover.m as u128) * worst.1 >= (worst.0 as u128) * bound {
                            worst = (c.cover.m, bound);
                        }
                    }
                    Err(e) => bad.push(format!("{name} {kind} seed {s}: {e}")),
                }
            }
        }
    }
    let took = start.elapsed();
    if took >= Duration::from_secs(60) {
        bad.push(format!("took {took:?}"));
    }
    outcome(
        bad.is_empty(),
        format!(
            "300 instances, tightest m/bound {}/{}; {took:?}; violations {bad:?}",
            worst.0, worst.1
        ),
    )
}

fn c6() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for side in [9, 15, 21] {
        let line = make_lattice(1, side, LatticeNorm::Linf).unwrap();
        for kind in [BallKind::Closed, BallKind::Open] {
            match constants_chain_on(&line, kind, 20, side as u64) {
                Ok((a, b)) => {
                    pass &= a.pass && b.pass;
                    details.push(format!("side {side} {kind}: {}; {}", a.detail, b.detail));
                }
                Err(e) => {
                    pass = false;
                    details.push(format!("side {side} {kind}: {e}"));
                }
            }
        }
    }
    outcome(pass, details.join(" | "))
}

fn ultra_suite(space: &FiniteMetricSpace) -> Option<String> {
    for kind in [BallKind::Open, BallKind::Closed] {
        match besicovitch_constant(space, None, kind, DEFAULT_CLIQUE_BUDGET) {
            Ok(rep) if rep.l == 1 && rep.exact => {}
            Ok(rep) => return Some(format!("{kind}: L = {}", rep.l)),
            Err(e) => return Some(e.to_string()),
        }
        for &rad in &space.critical_radii() {
            match equal_radius_cover(space, &space.all_points(), rad, kind) {
                Ok(c) if c.m == 1 && is_besicovitch_family(space, &c.families[0]).is_ok() => {}
                Ok(c) => return Some(format!("{kind} r={rad}: m = {}", c.m)),
                Err(e) => return Some(e.to_string()),
            }
        }
    }
    None
}

fn c7() -> Outcome {
    let mut bad = Vec::new();
    for n in [2, 3, 4, 8, 16, 32, 64] {
        if let Some(e) = ultra_suite(&make_paper_ultrametric(n)) {
            bad.push(format!("X_{n}: {e}"));
        }
    }
    for s in 0..50u64 {
        let n = 2 + (s as usize * 13) % 63;
        if let Some(e) = ultra_suite(&make_random_ultrametric(n, s)) {
            bad.push(format!("dendrogram seed {s} ({n} points): {e}"));
        }
    }
    outcome(
        bad.is_empty(),
        format!("X_N for N up to 64 and 50 random dendrograms of 2..=64 points; failures {bad:?}"),
    )
}

/// The ratio d_u/d against the 0-1 metric is 1 - 1/max(i,j). Its minimum
/// 1/2 is attained at (1,2); its maximum is 1 - 1/N, so the upper end of
/// the window is a supremum and is never attained on a finite set.
fn c8() -> Outcome {
    let mut in_window = true;
    let mut lower_hit = true;
    let mut upper_hit = Vec::new();
    let mut last = None;
    for n in 2..=256 {
        let rep = bilipschitz_compare(&make_zero_one(n), &make_paper_ultrametric(n)).unwrap();
        in_window &= rep.lower >= r("1/2") && rep.upper <= Rational::ONE;
        lower_hit &= rep.lower == r("1/2");
        if rep.upper == Rational::ONE {
            upper_hit.push(n);
        }
        last = Some(rep);
    }
    let last = last.unwrap();
    outcome(
        in_window && lower_hit && upper_hit.len() == 255,
        format!(
            "ratios within [1/2, 1]: {in_window}; lower 1/2 attained for every N: {lower_hit}; upper 1 attained for N in {upper_hit:?}; at N=256 max is {} at {:?}",
            last.upper, last.upper_pair
        ),
    )
}

fn c9() -> Outcome {
    let mut bad = Vec::new();
    let mut balls = 0;
    let mut strict = 0;
    for (name, space) in generated_spaces() {
        for kind in [BallKind::Open, BallKind::Closed] {
            for &rad in &space.doubling_radii() {
                for c in 0..space.len() {
                    let ball = Ball::new(c, rad, kind).unwrap();
                    let exact = doubling_number(&space, &ball, opts());
                    let greedy = doubling_number(&space, &ball, SolverOptions::greedy());
                    let net = maximal_net_cover(&space, &ball, r("1/2")).unwrap();
                    balls += 1;
                    if !exact.exact {
                        bad.push(format!("{name} {ball:?}: exact search incomplete"));
                    }
                    if greedy.count() < exact.count() || net.balls.len() < exact.count() {
                        bad.push(format!(
                            "{name} {ball:?}: exact {} greedy {} net {}",
                            exact.count(),
                            greedy.count(),
                            net.balls.len()
                        ));
                    }
                    if net.balls.len() > exact.count() {
                        strict += 1;
                    }
                }
            }
        }
    }
    let line = make_lattice(1, 21, LatticeNorm::Linf).unwrap();
    let at = |l: &str| line.labels().iter().position(|x| x == l).unwrap();
    let ball = Ball::open(at("0"), Rational::ONE).unwrap();
    let centers: Vec<usize> = ["-3/5", "-1/10", "2/5", "9/10"].iter().map(|l| at(l)).collect();
    let net = net_cover_from_centers(&line, &ball, r("1/2"), &centers).map(|n| n.balls.len());
    let min = cover_number(&line, &ball, r("1/2"), opts()).count();
    if net.as_ref().ok() != Some(&4) || min != 3 {
        bad.push(format!("fixed configuration: net {net:?}, minimum {min}"));
    }
    outcome(
        bad.is_empty(),
        format!(
            "{balls} balls: greedy >= exact and net >= exact everywhere, net strictly larger on {strict}; fixed configuration net {} > minimum {min}; failures {bad:?}",
            net.map(|n| n.to_string()).unwrap_or_else(|e| e.to_string())
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 nested ultrametric gallery", c1),
        ("2 grid square gallery", c2),
        ("3 doubling constants", c3),
        ("4 scaled covers and packings", c4),
        ("5 localized covering bound", c5),
        ("6 constants chain", c6),
        ("7 ultrametric suite", c7),
        ("8 bilipschitz window", c8),
        ("9 oracle cross-validation", c9),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {name} ({:.2?}): {}", start.elapsed(), o.detail);
        failed += usize::from(!o.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
