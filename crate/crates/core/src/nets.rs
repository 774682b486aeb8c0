//! r-nets: point sets with pairwise distance `> r` (strict) or `>= r`.
//!
//! Strict nets pair with closed balls and non-strict nets with open balls.
//! Radii are in the space's encoding, so the pairwise test is a plain
//! comparison of encoded distances.

use serde::{Deserialize, Serialize};

use crate::pointset::PointSet;
use crate::rational::Rational;
use crate::space::{BallKind, FiniteMetricSpace};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Net {
    pub points: PointSet,
    pub r: Rational,
    pub strict: bool,
    /// Scope the net was made maximal in, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maximal_in: Option<PointSet>,
}

fn separated(space: &FiniteMetricSpace, a: usize, b: usize, r: Rational, strict: bool) -> bool {
    let d = space.dist(a, b);
    if strict {
        d > r
    } else {
        d >= r
    }
}

/// Greedy net in ascending index order; maximal in `scope`.
pub fn greedy_maximal_net(
    space: &FiniteMetricSpace,
    scope: &PointSet,
    r: Rational,
    strict: bool,
) -> Net {
    let mut chosen: Vec<usize> = Vec::new();
    for p in scope.iter() {
        if chosen.iter().all(|&q| separated(space, p, q, r, strict)) {
            chosen.push(p);
        }
    }
    Net {
        points: PointSet::from_indices(space.len(), chosen),
        r,
        strict,
        maximal_in: Some(scope.clone()),
    }
}

/// First pair (in index order) that breaks the net condition.
pub fn net_violation(space: &FiniteMetricSpace, net: &Net) -> Option<(usize, usize)> {
    let pts = net.points.to_vec();
    for (i, &a) in pts.iter().enumerate() {
        for &b in &pts[i + 1..] {
            if !separated(space, a, b, net.r, net.strict) {
                return Some((a, b));
            }
        }
    }
    None
}

pub fn verify_net(space: &FiniteMetricSpace, net: &Net) -> Result<(), (usize, usize)> {
    match net_violation(space, net) {
        None => Ok(()),
        Some(pair) => Err(pair),
    }
}

/// First scope point that could still be added, if the net is not maximal.
pub fn maximality_gap(space: &FiniteMetricSpace, net: &Net, scope: &PointSet) -> Option<usize> {
    scope.iter().find(|&p| {
        !net.points.contains(p)
            && net
                .points
                .iter()
                .all(|q| separated(space, p, q, net.r, net.strict))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReverseWitness {
    pub x: usize,
    pub y: usize,
    /// A point of both open `r/2` balls that is also an ε-approximate
    /// midpoint of `x` and `y`; absent when none exists.
    pub z: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityReport {
    /// Holds vacuously when `S` is not a non-strict r-net.
    pub forward_ok: bool,
    pub reverse_witness: Option<ReverseWitness>,
}

/// Non-strict r-nets against open `r/2` balls with disjoint member sets.
pub fn net_ball_duality(
    space: &FiniteMetricSpace,
    s: &PointSet,
    r: Rational,
    eps: Rational,
) -> DualityReport {
    let net = Net {
        points: s.clone(),
        r,
        strict: false,
        maximal_in: None,
    };
    let half = space.half_radius(r);
    match net_violation(space, &net) {
        None => {
            let balls: Vec<PointSet> = s
                .iter()
                .map(|c| space.members_of(c, half, BallKind::Open))
                .collect();
            let disjoint = balls
                .iter()
                .enumerate()
                .all(|(i, a)| balls[i + 1..].iter().all(|b| a.is_disjoint(b)));
            DualityReport {
                forward_ok: disjoint,
                reverse_witness: None,
            }
        }
        Some((x, y)) => {
            let dxy = space.dist(x, y);
            let z = (0..space.len()).find(|&z| {
                let (dxz, dzy) = (space.dist(x, z), space.dist(z, y));
                dxz < half
                    && dzy < half
                    && space.lt_eps_plus_half(dxz, dxy, eps)
                    && space.lt_eps_plus_half(dzy, dxy, eps)
            });
            DualityReport {
                forward_ok: true,
                reverse_witness: Some(ReverseWitness { x, y, z }),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{make_lattice, make_line, make_paper_ultrametric, LatticeNorm};

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn unit_line() -> FiniteMetricSpace {
        make_lattice(1, 21, LatticeNorm::Linf).unwrap()
    }

    #[test]
    fn singleton_scope() {
        let x = make_paper_ultrametric(5);
        let net = greedy_maximal_net(&x, &PointSet::from_indices(5, [3]), r("1/2"), true);
        assert_eq!(net.points.to_vec(), vec![3]);
        assert!(verify_net(&x, &net).is_ok());
    }

    #[test]
    fn lattice_half_net() {
        let line = unit_line();
        let net = greedy_maximal_net(&line, &line.all_points(), r("1/2"), false);
        let labels: Vec<&str> = net.points.iter().map(|p| line.label(p)).collect();
        assert_eq!(labels, vec!["-1", "-1/2", "0", "1/2", "1"]);
        assert_eq!(maximality_gap(&line, &net, &line.all_points()), None);
    }

    #[test]
    fn ultrametric_strict_half_net() {
        let x = make_paper_ultrametric(9);
        let net = greedy_maximal_net(&x, &x.all_points(), r("1/2"), true);
        // points 1 and 2 are at distance exactly 1/2
        assert_eq!(net.points.to_vec(), vec![0, 2, 3, 4, 5, 6, 7, 8]);
        let bad = Net {
            points: PointSet::from_indices(9, [0, 1]),
            r: r("1/2"),
            strict: true,
            maximal_in: None,
        };
        assert_eq!(verify_net(&x, &bad), Err((0, 1)));
    }

    #[test]
    fn duality_examples() {
        let line = unit_line();
        let idx = |lbl: &str| line.labels().iter().position(|l| l == lbl).unwrap();
        let s = PointSet::from_indices(line.len(), [idx("0"), idx("3/10")]);
        let rep = net_ball_duality(&line, &s, r("1/2"), r("1/10"));
        let w = rep.reverse_witness.unwrap();
        assert_eq!(line.label(w.z.unwrap()), "1/10");

        let x = make_paper_ultrametric(6);
        let rep = net_ball_duality(&x, &PointSet::from_indices(6, [0, 1]), r("1"), r("1/100"));
        assert!(rep.forward_ok);
        assert_eq!(
            rep.reverse_witness,
            Some(ReverseWitness { x: 0, y: 1, z: None })
        );

        let net = greedy_maximal_net(&line, &line.all_points(), r("1/2"), false);
        let rep = net_ball_duality(&line, &net.points, r("1/2"), r("1/10"));
        assert!(rep.forward_ok && rep.reverse_witness.is_none());
    }

    #[test]
    fn json_shape() {
        let net = Net {
            points: PointSet::from_indices(4, [0, 2]),
            r: r("1/2"),
            strict: true,
            maximal_in: None,
        };
        let text = serde_json::to_string(&net).unwrap();
        assert_eq!(text, r#"{"points":[0,2],"r":"1/2","strict":true}"#);
        let back: Net = serde_json::from_str(&text).unwrap();
        assert_eq!(back.points.to_vec(), vec![0, 2]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn lattice_line(k: i128) -> FiniteMetricSpace {
            make_line(&(0..=k).map(|i| Rational::new(i, k)).collect::<Vec<_>>())
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn nets_are_valid_maximal_and_have_disjoint_half_balls(
                seed in 0u64..10_000, num in 1i128..40, den in 1i128..20, strict: bool,
            ) {
                let x = crate::generators::make_random_ultrametric(20, seed);
                for space in [x, lattice_line(12)] {
                    let rad = Rational::new(num, den) * space.diameter() / Rational::from_integer(4);
                    let net = greedy_maximal_net(&space, &space.all_points(), rad, strict);
                    prop_assert!(verify_net(&space, &net).is_ok());
                    prop_assert_eq!(maximality_gap(&space, &net, &space.all_points()), None);
                    let again = greedy_maximal_net(&space, &space.all_points(), rad, strict);
                    prop_assert_eq!(&again, &net);
                    if !strict {
                        let rep = net_ball_duality(&space, &net.points, rad, Rational::ONE);
                        prop_assert!(rep.forward_ok);
                    }
                }
            }

            /// On a line of spacing h with ε ≥ h, a pair with d(x,y) + h < r
            /// always has a witness inside both open r/2 balls.
            #[test]
            fn lattice_violations_have_ball_witnesses(
                k in 4i128..30, a in 0usize..30, b in 0usize..30, extra in 1i128..10,
            ) {
                let line = lattice_line(k);
                let (a, b) = (a % line.len(), b % line.len());
                prop_assume!(a != b);
                let h = Rational::new(1, k);
                let rad = line.dist(a, b) + h + Rational::new(extra, 10 * k);
                let s = PointSet::from_indices(line.len(), [a, b]);
                let rep = net_ball_duality(&line, &s, rad, h);
                let w = rep.reverse_witness.unwrap();
                prop_assert!(w.z.is_some());
            }
        }
    }
}
