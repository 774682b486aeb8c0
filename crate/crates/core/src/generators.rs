//! Generators for the spaces the covering results are exercised on, and
//! the generator-spec mini language (`paper_ultra:10`, `lattice:2:9:linf`).

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ball::{Ball, BallFamily};
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::rational::Rational;
use crate::space::{BallKind, Encoding, FiniteMetricSpace, MAX_POINTS};

/// Points `1..=n` with `d(i, j) = 1 - 1/max(i, j)`. Index `k` is point `k + 1`.
pub fn make_paper_ultrametric(n: usize) -> FiniteMetricSpace {
    assert!(n >= 1);
    let labels = (1..=n).map(|i| i.to_string()).collect();
    FiniteMetricSpace::from_fn(labels, Encoding::Plain, |i, j| {
        let m = i.max(j) as i128 + 1;
        Rational::ONE - Rational::new(1, m)
    })
    .expect("nested ultrametric is a metric")
}

/// `{0..n}²` where points on a common row or column are at distance 1 and
/// all other pairs at distance 2. Index of `(x, y)` is `x * n + y`, which
/// is also lexicographic order.
pub fn make_grid_square(n: usize) -> FiniteMetricSpace {
    assert!(n >= 1);
    let labels = (0..n * n).map(|k| format!("({},{})", k / n, k % n)).collect();
    FiniteMetricSpace::from_fn(labels, Encoding::Plain, |a, b| {
        let (ax, ay, bx, by) = (a / n, a % n, b / n, b % n);
        if ax == bx || ay == by {
            Rational::ONE
        } else {
            Rational::from_integer(2)
        }
    })
    .expect("grid square is a metric")
}

pub fn grid_index(n: usize, x: usize, y: usize) -> usize {
    x * n + y
}

/// `n` points at mutual distance 1.
pub fn make_zero_one(n: usize) -> FiniteMetricSpace {
    assert!(n >= 1);
    let labels = (0..n).map(|i| i.to_string()).collect();
    FiniteMetricSpace::from_fn(labels, Encoding::Plain, |_, _| Rational::ONE)
        .expect("0-1 metric is a metric")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeNorm {
    L1,
    Linf,
    /// Euclidean, stored squared.
    L2Squared,
}

impl FromStr for LatticeNorm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "l1" => Ok(LatticeNorm::L1),
            "linf" => Ok(LatticeNorm::Linf),
            "l2" | "l2sq" | "l2_squared" => Ok(LatticeNorm::L2Squared),
            _ => Err(format!("unknown norm {s:?} (expected l1, linf or l2)")),
        }
    }
}

impl fmt::Display for LatticeNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LatticeNorm::L1 => "l1",
            LatticeNorm::Linf => "linf",
            LatticeNorm::L2Squared => "l2",
        })
    }
}

/// Default lattice spacing.
pub fn lattice_spacing() -> Rational {
    Rational::new(1, 10)
}

/// `side^dim` grid points with spacing 1/10, centered at the origin along
/// each axis (coordinate `(i - (side-1)/2) / 10`, so side 21 spans
/// `[-1, 1]`). Index is row-major with the last axis fastest.
pub fn make_lattice(dim: usize, side: usize, norm: LatticeNorm) -> Result<FiniteMetricSpace> {
    if dim == 0 || side == 0 {
        return Err(Error::PreconditionViolated("lattice needs dim >= 1 and side >= 1".into()));
    }
    let total = side
        .checked_pow(dim as u32)
        .filter(|&t| t <= MAX_POINTS)
        .ok_or_else(|| Error::PreconditionViolated(format!("lattice {side}^{dim} is too large")))?;
    let spacing = lattice_spacing();
    let offset = Rational::new(side as i128 - 1, 2);
    let coord = |k: usize, axis: usize| -> usize { (k / side.pow((dim - 1 - axis) as u32)) % side };
    let labels = (0..total)
        .map(|k| {
            let cs: Vec<String> = (0..dim)
                .map(|a| ((Rational::from_integer(coord(k, a) as i128) - offset) * spacing).to_string())
                .collect();
            if dim == 1 {
                cs[0].clone()
            } else {
                format!("({})", cs.join(","))
            }
        })
        .collect();
    let encoding = match norm {
        LatticeNorm::L2Squared => Encoding::Squared,
        _ => Encoding::Plain,
    };
    FiniteMetricSpace::from_fn(labels, encoding, |a, b| {
        let steps = (0..dim).map(|ax| coord(a, ax).abs_diff(coord(b, ax)) as i128);
        match norm {
            LatticeNorm::L1 => Rational::from_integer(steps.sum()) * spacing,
            LatticeNorm::Linf => Rational::from_integer(steps.max().unwrap_or(0)) * spacing,
            LatticeNorm::L2Squared => {
                Rational::from_integer(steps.map(|s| s * s).sum()) * spacing * spacing
            }
        }
    })
}

/// Index of the lattice point with integer offsets `steps` from the first point.
pub fn lattice_index(side: usize, steps: &[usize]) -> usize {
    steps.iter().fold(0, |acc, &s| acc * side + s)
}

/// Distinct points of the real line with the inherited distance.
pub fn make_line(coords: &[Rational]) -> FiniteMetricSpace {
    let labels = coords.iter().map(|c| c.to_string()).collect();
    FiniteMetricSpace::from_fn(labels, Encoding::Plain, |i, j| {
        let d = coords[i] - coords[j];
        if d < Rational::ZERO {
            -d
        } else {
            d
        }
    })
    .expect("distinct points on a line")
}

/// Ultrametric read off a random dendrogram: clusters are merged two at a
/// time at non-decreasing heights, and `d(x, y)` is the height at which
/// `x` and `y` first share a cluster.
pub fn make_random_ultrametric(n: usize, seed: u64) -> FiniteMetricSpace {
    assert!(n >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut d = vec![Rational::ZERO; n * n];
    let mut height = Rational::ZERO;
    while clusters.len() > 1 {
        // occasional ties exercise equal merge heights
        if height.is_zero() || rng.gen_bool(0.8) {
            height = height + Rational::new(rng.gen_range(1..=4), 8);
        }
        let a = rng.gen_range(0..clusters.len());
        let ca = clusters.swap_remove(a);
        let b = rng.gen_range(0..clusters.len());
        let cb = &mut clusters[b];
        for &x in &ca {
            for &y in cb.iter() {
                d[x * n + y] = height;
                d[y * n + x] = height;
            }
        }
        cb.extend(ca);
    }
    let labels = (0..n).map(|i| format!("u{i}")).collect();
    FiniteMetricSpace::from_fn(labels, Encoding::Plain, |i, j| d[i * n + j])
        .expect("dendrogram heights form an ultrametric")
}

/// Seeded random nonempty subset; each point is kept with probability `p`.
pub fn random_subset(n: usize, p: f64, seed: u64) -> PointSet {
    assert!(n >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut set = PointSet::empty(n);
    for i in 0..n {
        if rng.gen_bool(p) {
            set.insert(i);
        }
    }
    if set.is_empty() {
        set.insert(rng.gen_range(0..n));
    }
    set
}

/// Seeded centered family: `1..=per_point` balls at every point of `a`,
/// radii drawn uniformly from `radii`.
pub fn random_centered_family(
    a: &PointSet,
    radii: &[Rational],
    kind: BallKind,
    per_point: usize,
    seed: u64,
) -> BallFamily {
    assert!(!radii.is_empty() && per_point >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = BallFamily::new(kind);
    for c in a.iter() {
        for _ in 0..rng.gen_range(1..=per_point) {
            let radius = radii[rng.gen_range(0..radii.len())];
            f.push(Ball::new(c, radius, kind).expect("positive radii")).expect("one kind");
        }
    }
    f
}

/// A generator invocation, either inline (`paper_ultra:10`) or as JSON
/// (`{"gen": "paper_ultrametric", "N": 10}`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "gen", rename_all = "snake_case", deny_unknown_fields)]
pub enum GenSpec {
    PaperUltrametric {
        #[serde(rename = "N")]
        n: usize,
    },
    GridSquare {
        #[serde(rename = "N")]
        n: usize,
    },
    ZeroOne {
        n: usize,
    },
    Lattice {
        dim: usize,
        side: usize,
        norm: LatticeNorm,
    },
    RandomUltrametric {
        n: usize,
        #[serde(default)]
        seed: u64,
    },
}

impl GenSpec {
    pub fn build(&self) -> Result<FiniteMetricSpace> {
        let limit = |n: usize, what: &str| -> Result<()> {
            if n == 0 || n > MAX_POINTS {
                Err(Error::PreconditionViolated(format!(
                    "{what} must be between 1 and {MAX_POINTS}, got {n}"
                )))
            } else {
                Ok(())
            }
        };
        match *self {
            GenSpec::PaperUltrametric { n } => {
                limit(n, "N")?;
                Ok(make_paper_ultrametric(n))
            }
            GenSpec::GridSquare { n } => {
                limit(n.saturating_mul(n), "N²")?;
                Ok(make_grid_square(n))
            }
            GenSpec::ZeroOne { n } => {
                limit(n, "n")?;
                Ok(make_zero_one(n))
            }
            GenSpec::Lattice { dim, side, norm } => make_lattice(dim, side, norm),
            GenSpec::RandomUltrametric { n, seed } => {
                limit(n, "n")?;
                Ok(make_random_ultrametric(n, seed))
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

impl FromStr for GenSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = |msg: &str| Error::GenSpec {
            spec: s.to_string(),
            msg: msg.to_string(),
        };
        let parts: Vec<&str> = s.split(':').collect();
        let num = |i: usize| -> Result<usize> {
            parts
                .get(i)
                .ok_or_else(|| err(&format!("missing argument {i}")))?
                .parse::<usize>()
                .map_err(|_| err(&format!("argument {i} is not a non-negative integer")))
        };
        let arity = |k: usize| -> Result<()> {
            if parts.len() == k + 1 {
                Ok(())
            } else {
                Err(err(&format!("expected {k} argument(s)")))
            }
        };
        match parts[0] {
            "paper_ultra" | "paper_ultrametric" => {
                arity(1)?;
                Ok(GenSpec::PaperUltrametric { n: num(1)? })
            }
            "grid_square" | "grid" => {
                arity(1)?;
                Ok(GenSpec::GridSquare { n: num(1)? })
            }
            "zero_one" | "discrete" => {
                arity(1)?;
                Ok(GenSpec::ZeroOne { n: num(1)? })
            }
            "lattice" => {
                arity(3)?;
                let norm = parts[3].parse().map_err(|e: String| err(&e))?;
                Ok(GenSpec::Lattice {
                    dim: num(1)?,
                    side: num(2)?,
                    norm,
                })
            }
            "random_ultra" | "random_ultrametric" => {
                if parts.len() == 2 {
                    Ok(GenSpec::RandomUltrametric { n: num(1)?, seed: 0 })
                } else {
                    arity(2)?;
                    let seed = parts[2].parse().map_err(|_| err("seed is not an integer"))?;
                    Ok(GenSpec::RandomUltrametric { n: num(1)?, seed })
                }
            }
            _ => Err(err("unknown generator")),
        }
    }
}
