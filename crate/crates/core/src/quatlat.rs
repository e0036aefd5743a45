//! Quaternion coordinates and the dual lattice of the Hurwitz order.
//!
//! A [`QuatCoord`] `(a, b, c, d)` stands for `a + b·i + c·j + d·k`. The dual
//! lattice is spanned by `2`, `1+i`, `1+j`, `1+k`, i.e. it consists of the
//! integral quaternions with even coordinate sum.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_integer::Roots;

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct QuatCoord {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl QuatCoord {
    pub const ZERO: QuatCoord = QuatCoord::new(0, 0, 0, 0);

    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        QuatCoord { a, b, c, d }
    }

    pub fn coords(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Reduced norm `a² + b² + c² + d²`.
    pub fn norm(&self) -> i64 {
        self.coords().iter().map(|x| x * x).sum()
    }

    pub fn conj(&self) -> Self {
        QuatCoord::new(self.a, -self.b, -self.c, -self.d)
    }

    /// Reduced trace `2a`.
    pub fn trace(&self) -> i64 {
        2 * self.a
    }

    pub fn in_dual(&self) -> bool {
        (self.a + self.b + self.c + self.d) % 2 == 0
    }

    /// Membership in the Hurwitz order itself, for a quaternion given by its
    /// doubled coordinates: all even or all odd.
    pub fn doubled_in_hurwitz(&self) -> bool {
        let parities = self.coords().map(|x| x.rem_euclid(2));
        parities.iter().all(|&p| p == parities[0])
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }

    /// Coordinatewise exact division, if every coordinate is divisible by `d`.
    pub fn div_exact(&self, d: i64) -> Option<Self> {
        self.coords().iter().all(|x| x % d == 0).then(|| QuatCoord::new(self.a / d, self.b / d, self.c / d, self.d / d))
    }

    pub fn scale(&self, d: i64) -> Self {
        QuatCoord::new(self.a * d, self.b * d, self.c * d, self.d * d)
    }
}

impl Add for QuatCoord {
    type Output = QuatCoord;
    fn add(self, o: QuatCoord) -> QuatCoord {
        QuatCoord::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl Sub for QuatCoord {
    type Output = QuatCoord;
    fn sub(self, o: QuatCoord) -> QuatCoord {
        QuatCoord::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl Neg for QuatCoord {
    type Output = QuatCoord;
    fn neg(self) -> QuatCoord {
        QuatCoord::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl fmt::Display for QuatCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.a, self.b, self.c, self.d)
    }
}

pub(crate) fn parse_ints<const K: usize>(s: &str) -> Result<[i64; K], Error> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != K {
        return Err(Error::Parse(format!("expected {K} comma-separated integers, got {s:?}")));
    }
    let mut out = [0i64; K];
    for (slot, p) in out.iter_mut().zip(&parts) {
        *slot = p.parse().map_err(|_| Error::Parse(format!("{p:?} is not an integer")))?;
    }
    Ok(out)
}

/// Parses `"a,b,c,d"`; rejects coordinates outside the dual lattice.
impl FromStr for QuatCoord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let [a, b, c, d] = parse_ints::<4>(s)?;
        let t = QuatCoord::new(a, b, c, d);
        if !t.in_dual() {
            return Err(Error::NotInDualLattice(t.to_string()));
        }
        Ok(t)
    }
}

/// Every dual-lattice vector with `norm <= bound`, lexicographic in `(a, b, c, d)`.
pub fn enumerate_dual(bound: u64) -> Vec<QuatCoord> {
    let bound = bound as i64;
    let r = bound.sqrt();
    let mut out = Vec::new();
    for a in -r..=r {
        let ra = bound - a * a;
        let rb = ra.sqrt();
        for b in -rb..=rb {
            let rc_sq = ra - b * b;
            let rc = rc_sq.sqrt();
            for c in -rc..=rc {
                let rd = (rc_sq - c * c).sqrt();
                for d in -rd..=rd {
                    let t = QuatCoord::new(a, b, c, d);
                    if t.in_dual() {
                        out.push(t);
                    }
                }
            }
        }
    }
    out
}
