//! Coefficient rings.
//!
//! Expansions and q-series are generic over a [`Scalar`]: anything that forms
//! a commutative ring under `num_traits::Num`, can be built from small integers,
//! and can (possibly lossily) absorb an exact rational. The exact work in this
//! crate runs over [`BigRational`]; `f64`/`f32` are available for quick
//! approximate evaluation.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, NumAssignRef, NumRef, ToPrimitive};

pub trait Scalar: Clone + Num + NumRef + NumAssignRef + FromPrimitive + Debug + Send + Sync + 'static {
    /// Image of an exact rational in this ring. `None` when it has no image
    /// (e.g. a non-integral rational in an integer ring).
    fn from_rational(q: &BigRational) -> Option<Self>;

    fn from_bigint(n: &BigInt) -> Option<Self> {
        Self::from_rational(&BigRational::from_integer(n.clone()))
    }
}

impl Scalar for BigRational {
    fn from_rational(q: &BigRational) -> Option<Self> {
        Some(q.clone())
    }
}

impl Scalar for BigInt {
    fn from_rational(q: &BigRational) -> Option<Self> {
        q.is_integer().then(|| q.to_integer())
    }
}

impl Scalar for f64 {
    fn from_rational(q: &BigRational) -> Option<Self> {
        q.to_f64()
    }
}

impl Scalar for f32 {
    fn from_rational(q: &BigRational) -> Option<Self> {
        q.to_f32()
    }
}
