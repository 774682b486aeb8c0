//! Named balls and ball families.
//!
//! A ball is its name: center, radius and kind. Two balls with the same
//! member set but different names are different balls. Member-set equality
//! is available separately through [`same_members`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::space::{BallKind, FiniteMetricSpace};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ball {
    pub center: usize,
    pub radius: Rational,
    pub kind: BallKind,
}

impl Ball {
    pub fn new(center: usize, radius: Rational, kind: BallKind) -> Result<Self> {
        if !radius.is_positive() {
            return Err(Error::NonPositiveRadius(radius));
        }
        Ok(Ball {
            center,
            radius,
            kind,
        })
    }

    pub fn open(center: usize, radius: Rational) -> Result<Self> {
        Ball::new(center, radius, BallKind::Open)
    }

    pub fn closed(center: usize, radius: Rational) -> Result<Self> {
        Ball::new(center, radius, BallKind::Closed)
    }

    /// Same center and kind, different radius.
    pub fn with_radius(&self, radius: Rational) -> Result<Self> {
        Ball::new(self.center, radius, self.kind)
    }
}

impl fmt::Debug for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            BallKind::Open => "o",
            BallKind::Closed => "cl",
        };
        write!(f, "B^{tag}({}, {})", self.center, self.radius)
    }
}

pub fn same_members(space: &FiniteMetricSpace, a: &Ball, b: &Ball) -> bool {
    space.members(a) == space.members(b)
}

/// Ordered multiset of balls of one kind.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFamily", into = "RawFamily")]
pub struct BallFamily {
    kind: BallKind,
    balls: Vec<Ball>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    kind: BallKind,
    balls: Vec<RawBall>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBall {
    center: usize,
    radius: Rational,
}

impl TryFrom<RawFamily> for BallFamily {
    type Error = Error;

    fn try_from(raw: RawFamily) -> Result<Self> {
        let balls = raw
            .balls
            .into_iter()
            .map(|b| Ball::new(b.center, b.radius, raw.kind))
            .collect::<Result<Vec<_>>>()?;
        Ok(BallFamily {
            kind: raw.kind,
            balls,
        })
    }
}

impl From<BallFamily> for RawFamily {
    fn from(f: BallFamily) -> Self {
        RawFamily {
            kind: f.kind,
            balls: f
                .balls
                .into_iter()
                .map(|b| RawBall {
                    center: b.center,
                    radius: b.radius,
                })
                .collect(),
        }
    }
}

impl BallFamily {
    pub fn new(kind: BallKind) -> Self {
        BallFamily {
            kind,
            balls: Vec::new(),
        }
    }

    pub fn from_balls(kind: BallKind, balls: Vec<Ball>) -> Result<Self> {
        let mut f = BallFamily::new(kind);
        for b in balls {
            f.push(b)?;
        }
        Ok(f)
    }

    pub fn push(&mut self, ball: Ball) -> Result<()> {
        if ball.kind != self.kind {
            return Err(Error::MixedKinds);
        }
        self.balls.push(ball);
        Ok(())
    }

    pub fn kind(&self) -> BallKind {
        self.kind
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Ball> {
        self.balls.iter()
    }

    pub fn max_radius(&self) -> Option<Rational> {
        self.balls.iter().map(|b| b.radius).max()
    }

    pub fn min_radius(&self) -> Option<Rational> {
        self.balls.iter().map(|b| b.radius).min()
    }

    /// Checks that every center is a point of `space`.
    pub fn check_in(&self, space: &FiniteMetricSpace) -> Result<()> {
        self.balls.iter().try_for_each(|b| space.check_point(b.center))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

impl<'a> IntoIterator for &'a BallFamily {
    type Item = &'a Ball;
    type IntoIter = std::slice::Iter<'a, Ball>;

    fn into_iter(self) -> Self::IntoIter {
        self.balls.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::make_paper_ultrametric;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn identity_is_the_name() {
        let x = make_paper_ultrametric(6);
        // B^cl(2, 1/2) and B^cl(1, 1/2) both have members {1, 2}
        let a = Ball::closed(1, r("1/2")).unwrap();
        let b = Ball::closed(0, r("1/2")).unwrap();
        assert_ne!(a, b);
        assert!(same_members(&x, &a, &b));
        let c = Ball::closed(1, r("3/5")).unwrap();
        assert_ne!(a, c);
        assert!(same_members(&x, &a, &c));
    }

    #[test]
    fn rejects_bad_radius_and_mixed_kinds() {
        assert!(matches!(Ball::open(0, r("0")), Err(Error::NonPositiveRadius(_))));
        assert!(Ball::open(0, r("-1")).is_err());
        let mut f = BallFamily::new(BallKind::Open);
        f.push(Ball::open(0, r("1")).unwrap()).unwrap();
        assert!(matches!(f.push(Ball::closed(0, r("1")).unwrap()), Err(Error::MixedKinds)));
        // duplicates are allowed
        f.push(Ball::open(0, r("1")).unwrap()).unwrap();
        assert_eq!(f.len(), 2);
    }

    #[test]
    fn family_json() {
        let text = r#"{"kind":"closed","balls":[{"center":2,"radius":"2/3"},{"center":0,"radius":"1"}]}"#;
        let f = BallFamily::from_json(text).unwrap();
        assert_eq!(f.balls()[0], Ball::closed(2, r("2/3")).unwrap());
        assert_eq!(serde_json::to_string(&f).unwrap(), text);
        assert!(BallFamily::from_json(r#"{"kind":"closed","balls":[{"center":0,"radius":"0"}]}"#).is_err());
    }
}
