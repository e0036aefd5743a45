//! Fourier indices: half-integral quaternionic hermitian matrices
//! `T = [[n, t/2], [conj(t)/2, m]]` with `t` in the dual lattice.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_integer::{Integer, Roots};

use crate::error::{Error, Result};
use crate::quatlat::{enumerate_dual, parse_ints, QuatCoord};

/// A Fourier index. The off-diagonal entry is stored doubled, as `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TMatrix {
    pub n: i64,
    pub m: i64,
    pub t: QuatCoord,
}

impl TMatrix {
    pub const ZERO: TMatrix = TMatrix { n: 0, m: 0, t: QuatCoord::ZERO };

    /// Fails unless `t` lies in the dual lattice.
    pub fn new(n: i64, m: i64, t: QuatCoord) -> Result<Self> {
        if !t.in_dual() {
            return Err(Error::NotInDualLattice(t.to_string()));
        }
        Ok(TMatrix { n, m, t })
    }

    pub fn diag(n: i64, m: i64) -> Self {
        TMatrix { n, m, t: QuatCoord::ZERO }
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }

    /// `2·det(T) = 2nm - norm(t)/2`.
    pub fn two_det(&self) -> i64 {
        2 * self.n * self.m - self.t.norm() / 2
    }

    pub fn is_psd(&self) -> bool {
        self.n >= 0
            && self.m >= 0
            && self.two_det() >= 0
            && (self.n != 0 || self.t.is_zero())
            && (self.m != 0 || self.t.is_zero())
    }

    /// Content of `T`: the largest `d` with `T/d` again a Fourier index.
    pub fn epsilon(&self) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::ZeroMatrix);
        }
        let g = self.t.coords().iter().fold(self.n.gcd(&self.m), |g, x| g.gcd(x));
        let mut best = 1;
        let mut d = 1;
        while d * d <= g {
            if g % d == 0 {
                for cand in [d, g / d] {
                    if cand > best && self.scaled_down(cand).is_some() {
                        best = cand;
                    }
                }
            }
            d += 1;
        }
        Ok(best)
    }

    /// `T/d`, if it is again a Fourier index.
    pub fn scaled_down(&self, d: i64) -> Option<TMatrix> {
        if self.n % d != 0 || self.m % d != 0 {
            return None;
        }
        let t = self.t.div_exact(d)?;
        t.in_dual().then(|| TMatrix { n: self.n / d, m: self.m / d, t })
    }

    pub fn scale(&self, d: i64) -> TMatrix {
        TMatrix { n: self.n * d, m: self.m * d, t: self.t.scale(d) }
    }

    pub fn rank(&self) -> Result<u8> {
        if !self.is_psd() {
            return Err(Error::NotPsd(*self));
        }
        Ok(if self.is_zero() {
            0
        } else if self.two_det() > 0 {
            2
        } else {
            1
        })
    }

    pub fn add(&self, o: &TMatrix) -> TMatrix {
        TMatrix { n: self.n + o.n, m: self.m + o.m, t: self.t + o.t }
    }

    pub fn sub(&self, o: &TMatrix) -> TMatrix {
        TMatrix { n: self.n - o.n, m: self.m - o.m, t: self.t - o.t }
    }
}

impl fmt::Display for TMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.n, self.m, self.t)
    }
}

/// Parses `"n,m,a,b,c,d"`.
impl FromStr for TMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let [n, m, a, b, c, d] = parse_ints::<6>(s)?;
        TMatrix::new(n, m, QuatCoord::new(a, b, c, d))
    }
}

/// All positive semidefinite indices with `0 <= n, m <= depth`, ordered by
/// `n`, then `m`, then `t` lexicographically. Includes `T = 0`.
pub fn enumerate_psd(depth: u32) -> Vec<TMatrix> {
    IndexBox::get(depth).entries().to_vec()
}

#[derive(Debug)]
struct Block {
    start: usize,
    len: usize,
    radius: i64,
    /// Dense position table over `[-radius, radius]^4`.
    slots: Vec<u32>,
}

impl Block {
    fn slot(&self, t: &QuatCoord) -> Option<usize> {
        let r = self.radius;
        let w = 2 * r + 1;
        let mut idx = 0i64;
        for x in t.coords() {
            if x.abs() > r {
                return None;
            }
            idx = idx * w + (x + r);
        }
        Some(idx as usize)
    }
}

const EMPTY: u32 = u32::MAX;

/// The truncation box `{T >= 0 : n, m <= depth}` with O(1) position lookup.
///
/// The box is closed under psd decomposition: if `T = T1 + T2` with both
/// summands psd and `T` in the box, both summands are in the box too.
#[derive(Debug)]
pub struct IndexBox {
    depth: u32,
    entries: Vec<TMatrix>,
    blocks: Vec<Block>,
}

static BOXES: OnceLock<Mutex<HashMap<u32, Arc<IndexBox>>>> = OnceLock::new();

impl IndexBox {
    /// Shared, lazily built box for `depth`.
    pub fn get(depth: u32) -> Arc<IndexBox> {
        let boxes = BOXES.get_or_init(|| Mutex::new(HashMap::new()));
        let mut boxes = boxes.lock().unwrap_or_else(|e| e.into_inner());
        boxes.entry(depth).or_insert_with(|| Arc::new(IndexBox::build(depth))).clone()
    }

    fn build(depth: u32) -> IndexBox {
        let mut entries = Vec::new();
        let mut blocks = Vec::new();
        let d = depth as i64;
        for n in 0..=d {
            for m in 0..=d {
                let start = entries.len();
                let bound = 4 * n * m;
                let ts = if n == 0 || m == 0 { vec![QuatCoord::ZERO] } else { enumerate_dual(bound as u64) };
                let radius = bound.sqrt();
                let w = (2 * radius + 1) as usize;
                let mut block = Block { start, len: ts.len(), radius, slots: vec![EMPTY; w.pow(4)] };
                for (i, t) in ts.into_iter().enumerate() {
                    let s = block.slot(&t).expect("enumerated vector lies in its radius");
                    block.slots[s] = (start + i) as u32;
                    entries.push(TMatrix { n, m, t });
                }
                blocks.push(block);
            }
        }
        IndexBox { depth, entries, blocks }
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[TMatrix] {
        &self.entries
    }

    pub fn contains(&self, t: &TMatrix) -> bool {
        self.position(t).is_some()
    }

    fn block_id(&self, n: i64, m: i64) -> Option<usize> {
        let d = self.depth as i64;
        ((0..=d).contains(&n) && (0..=d).contains(&m)).then(|| (n * (d + 1) + m) as usize)
    }

    /// Position of `t` in enumeration order, if it is in the box.
    pub fn position(&self, t: &TMatrix) -> Option<usize> {
        let block = &self.blocks[self.block_id(t.n, t.m)?];
        let pos = block.slots[block.slot(&t.t)?];
        (pos != EMPTY).then_some(pos as usize)
    }

    /// Entry range of the `(n, m)` block.
    pub fn block_range(&self, n: i64, m: i64) -> std::ops::Range<usize> {
        match self.block_id(n, m) {
            Some(id) => {
                let b = &self.blocks[id];
                b.start..b.start + b.len
            }
            None => 0..0,
        }
    }

    pub(crate) fn block_slot_lookup(&self, n: i64, m: i64, t: &QuatCoord) -> Option<usize> {
        let block = &self.blocks[self.block_id(n, m)?];
        let pos = block.slots[block.slot(t)?];
        (pos != EMPTY).then_some(pos as usize)
    }
}
