//! Truncated Fourier expansions of degree-2 quaternionic modular forms.
//!
//! An expansion stores one coefficient per index of an [`IndexBox`], in the
//! box's enumeration order. Since the box is closed under psd decomposition,
//! products computed inside it are exact on every retained index.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{kronecker, ord_p_unchecked, Valuation};
use crate::scalar::Scalar;
use crate::series::QSeries;
use crate::tmat::{IndexBox, TMatrix};

#[derive(Debug, Clone)]
pub struct FourierExpansion<S> {
    weight: i64,
    theta_image: bool,
    index: Arc<IndexBox>,
    coeffs: Vec<S>,
}

impl<S: PartialEq> PartialEq for FourierExpansion<S> {
    fn eq(&self, o: &Self) -> bool {
        self.weight == o.weight
            && self.theta_image == o.theta_image
            && self.index.depth() == o.index.depth()
            && self.coeffs == o.coeffs
    }
}

impl<S: Scalar> FourierExpansion<S> {
    pub fn zero(weight: i64, depth: u32) -> Self {
        let index = IndexBox::get(depth);
        let coeffs = vec![S::zero(); index.len()];
        FourierExpansion { weight, theta_image: false, index, coeffs }
    }

    /// The constant expansion `1` (weight 0).
    pub fn one(depth: u32) -> Self {
        let mut f = Self::zero(0, depth);
        f.coeffs[0] = S::one();
        f
    }

    pub fn from_fn(weight: i64, depth: u32, mut a: impl FnMut(&TMatrix) -> S) -> Self {
        let index = IndexBox::get(depth);
        let coeffs = index.entries().iter().map(&mut a).collect();
        FourierExpansion { weight, theta_image: false, index, coeffs }
    }

    pub fn try_from_fn(weight: i64, depth: u32, mut a: impl FnMut(&TMatrix) -> Result<S>) -> Result<Self> {
        let index = IndexBox::get(depth);
        let coeffs = index.entries().iter().map(&mut a).collect::<Result<_>>()?;
        Ok(FourierExpansion { weight, theta_image: false, index, coeffs })
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn depth(&self) -> u32 {
        self.index.depth()
    }

    /// Set for images of the theta operators, which are formal series rather
    /// than modular forms.
    pub fn is_theta_image(&self) -> bool {
        self.theta_image
    }

    pub fn index(&self) -> &IndexBox {
        &self.index
    }

    /// `a(f; T)`; zero for indices that are not psd, `None` outside the box.
    pub fn coeff(&self, t: &TMatrix) -> Option<S> {
        if !t.is_psd() {
            let d = self.depth() as i64;
            return (t.n <= d && t.m <= d).then(S::zero);
        }
        self.index.position(t).map(|i| self.coeffs[i].clone())
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TMatrix, &S)> {
        self.index.entries().iter().zip(&self.coeffs)
    }

    pub fn map<R: Scalar>(&self, f: impl Fn(&S) -> R) -> FourierExpansion<R> {
        FourierExpansion {
            weight: self.weight,
            theta_image: self.theta_image,
            index: self.index.clone(),
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn with_weight(mut self, weight: i64) -> Self {
        self.weight = weight;
        self
    }

    /// Restriction to a smaller box.
    pub fn truncate(&self, depth: u32) -> Self {
        if depth >= self.depth() {
            return self.clone();
        }
        let index = IndexBox::get(depth);
        let coeffs = index
            .entries()
            .iter()
            .map(|t| self.coeffs[self.index.position(t).expect("boxes are nested")].clone())
            .collect();
        FourierExpansion { weight: self.weight, theta_image: self.theta_image, index, coeffs }
    }

    fn aligned(&self, o: &Self) -> (Self, Self) {
        let d = self.depth().min(o.depth());
        (self.truncate(d), o.truncate(d))
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.weight != o.weight {
            return Err(Error::WeightMismatch(self.weight, o.weight));
        }
        let (mut f, g) = self.aligned(o);
        for (a, b) in f.coeffs.iter_mut().zip(g.coeffs) {
            *a += b;
        }
        f.theta_image |= g.theta_image;
        Ok(f)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scale(&(S::zero() - S::one())))
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut f = self.clone();
        for a in f.coeffs.iter_mut() {
            *a *= c;
        }
        f
    }

    /// Product on the common box: `a(fg; T) = sum_{T1 + T2 = T} a(f; T1) a(g; T2)`
    /// over psd summands. Target blocks are filled in parallel; each block is
    /// accumulated sequentially, so the result does not depend on scheduling.
    pub fn mul(&self, o: &Self) -> Self {
        let (f, g) = self.aligned(o);
        let index = f.index.clone();
        let d = index.depth() as i64;

        let nonzero = |h: &Self, n: i64, m: i64| -> Vec<usize> {
            index.block_range(n, m).filter(|&i| !h.coeffs[i].is_zero()).collect()
        };
        let blocks: Vec<(i64, i64)> = (0..=d).flat_map(|n| (0..=d).map(move |m| (n, m))).collect();
        let f_nz: Vec<Vec<usize>> = blocks.iter().map(|&(n, m)| nonzero(&f, n, m)).collect();
        let g_nz: Vec<Vec<usize>> = blocks.iter().map(|&(n, m)| nonzero(&g, n, m)).collect();
        let block_id = |n: i64, m: i64| (n * (d + 1) + m) as usize;
        let entries = index.entries();

        let filled: Vec<Vec<S>> = blocks
            .par_iter()
            .map(|&(n, m)| {
                let range = index.block_range(n, m);
                let mut acc = vec![S::zero(); range.len()];
                for n1 in 0..=n {
                    for m1 in 0..=m {
                        let left = &f_nz[block_id(n1, m1)];
                        let right = &g_nz[block_id(n - n1, m - m1)];
                        for &i in left {
                            let a = &f.coeffs[i];
                            for &j in right {
                                let t = entries[i].t + entries[j].t;
                                let pos = index.block_slot_lookup(n, m, &t).expect("a sum of psd indices is psd");
                                acc[pos - range.start] += a.clone() * &g.coeffs[j];
                            }
                        }
                    }
                }
                acc
            })
            .collect();

        FourierExpansion {
            weight: f.weight + g.weight,
            theta_image: f.theta_image || g.theta_image,
            index: index.clone(),
            coeffs: filled.into_iter().flatten().collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.depth());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Siegel's operator: the `q^n` coefficient is `a(f; diag(n, 0))`.
    pub fn siegel_phi(&self) -> QSeries<S> {
        let coeffs = (0..=self.depth() as i64)
            .map(|n| self.coeff(&TMatrix::diag(n, 0)).expect("diag(n, 0) is in the box"))
            .collect();
        QSeries::new(self.weight, coeffs)
    }

    /// `a(f; T) -> 2det(T) a(f; T)`.
    pub fn theta(&self) -> Self {
        self.twist(|t| t.two_det())
    }

    /// `a(f; T) -> 2det(T) chi_D(2det(T)) a(f; T)` with `chi_D` the Kronecker
    /// symbol `(D / ·)`.
    pub fn theta_chi(&self, disc: i64) -> Self {
        self.twist(|t| {
            let v = t.two_det();
            v * kronecker(disc, v) as i64
        })
    }

    fn twist(&self, factor: impl Fn(&TMatrix) -> i64) -> Self {
        let mut f = self.clone();
        for (t, a) in self.index.entries().iter().zip(f.coeffs.iter_mut()) {
            *a = S::from_i64(factor(t)).expect("scalar holds small integers") * a.clone();
        }
        f.theta_image = true;
        f
    }

    /// True when every coefficient of rank at most one vanishes.
    pub fn is_cusp(&self) -> bool {
        self.iter().all(|(t, a)| t.two_det() > 0 || a.is_zero())
    }
}

/// Outcome of a coefficientwise comparison modulo `p`.
#[derive(Debug, Clone, PartialEq)]
pub enum Congruence {
    Holds { checked: usize },
    Fails { witness: TMatrix, lhs: BigRational, rhs: BigRational },
    NotIntegral { witness: TMatrix, lhs: BigRational, rhs: BigRational },
}

impl Congruence {
    pub fn holds(&self) -> bool {
        matches!(self, Congruence::Holds { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalJson {
    pub num: String,
    pub den: String,
}

impl From<&BigRational> for RationalJson {
    fn from(q: &BigRational) -> Self {
        RationalJson { num: q.numer().to_string(), den: q.denom().to_string() }
    }
}

impl TryFrom<&RationalJson> for BigRational {
    type Error = Error;

    fn try_from(r: &RationalJson) -> Result<Self> {
        let parse = |s: &str| s.parse::<BigInt>().map_err(|_| Error::Parse(format!("{s:?} is not an integer")));
        let den = parse(&r.den)?;
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(BigRational::new(parse(&r.num)?, den))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffEntry {
    #[serde(rename = "T")]
    pub t: String,
    pub coeff: RationalJson,
}

impl FourierExpansion<BigRational> {
    /// True when no coefficient has a denominator divisible by `p`.
    pub fn is_p_integral(&self, p: u64) -> bool {
        self.coeffs.iter().all(|a| ord_p_unchecked(a, p) >= Valuation::Finite(0))
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|a| a.is_integer())
    }

    /// `f ≡ g (mod p)` on the common box. Both sides must be p-integral; the
    /// first offending index in enumeration order is returned otherwise.
    pub fn cong_mod(&self, o: &Self, p: u64) -> Congruence {
        let (f, g) = self.aligned(o);
        let zero = Valuation::Finite(0);
        let entries = f.index.entries();
        let pairs = || entries.iter().zip(f.coeffs.iter().zip(&g.coeffs));
        for (t, (a, b)) in pairs() {
            if ord_p_unchecked(a, p) < zero || ord_p_unchecked(b, p) < zero {
                return Congruence::NotIntegral { witness: *t, lhs: a.clone(), rhs: b.clone() };
            }
        }
        for (t, (a, b)) in pairs() {
            if ord_p_unchecked(&(a - b), p) < Valuation::Finite(1) {
                return Congruence::Fails { witness: *t, lhs: a.clone(), rhs: b.clone() };
            }
        }
        Congruence::Holds { checked: entries.len() }
    }

    pub fn to_entries(&self) -> Vec<CoeffEntry> {
        self.iter().map(|(t, a)| CoeffEntry { t: t.to_string(), coeff: a.into() }).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_entries())?)
    }

    /// Reads the JSON array form; indices absent from the array are zero.
    pub fn from_json(json: &str, weight: i64, depth: u32) -> Result<Self> {
        let entries: Vec<CoeffEntry> = serde_json::from_str(json)?;
        let mut f = Self::zero(weight, depth);
        for e in &entries {
            let t: TMatrix = e.t.parse()?;
            let pos = f
                .index
                .position(&t)
                .ok_or_else(|| Error::Parse(format!("index {t} is outside the depth-{depth} box")))?;
            f.coeffs[pos] = (&e.coeff).try_into()?;
        }
        Ok(f)
    }
}

impl<S: Scalar> FourierExpansion<S> {
    /// `a(f; 0)`.
    pub fn constant_term(&self) -> S {
        self.coeffs[0].clone()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

impl<S: Scalar> std::ops::Mul for FourierExpansion<S> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        FourierExpansion::mul(&self, &o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};
    use crate::series::eisenstein_q;
    use crate::Expansion;

    fn tm(s: &str) -> TMatrix {
        s.parse().unwrap()
    }

    fn sample(weight: i64, depth: u32, seed: i64) -> Expansion {
        FourierExpansion::from_fn(weight, depth, |t| {
            let c = t.t.coords();
            rat(seed + 3 * t.n - 2 * t.m + c[0] * c[1] - c[2] + 5 * c[3], 1 + (t.n + 2 * t.m) % 3)
        })
    }

    /// Product by the literal definition: for each target, scan all
    /// candidates `T1` in the box and keep psd complements.
    fn mul_by_definition(f: &Expansion, g: &Expansion) -> Expansion {
        FourierExpansion::from_fn(f.weight() + g.weight(), f.depth(), |t| {
            let mut acc = BigRational::zero();
            for (t1, a) in f.iter() {
                let t2 = t.sub(t1);
                if t2.is_psd() {
                    acc += a * g.coeff(&t2).unwrap();
                }
            }
            acc
        })
    }

    #[test]
    fn mul_matches_definition() {
        let f = sample(4, 2, 1);
        let g = sample(6, 2, -7);
        assert_eq!(f.mul(&g), mul_by_definition(&f, &g));
    }

    #[test]
    fn ring_laws() {
        let f = sample(4, 2, 1);
        let g = sample(6, 2, 2);
        let h = sample(2, 2, 3);
        assert_eq!(f.mul(&g), g.mul(&f));
        assert_eq!(f.mul(&g).mul(&h), f.mul(&g.mul(&h)));
        let zero = Expansion::zero(4, 2);
        assert_eq!(f.add(&zero).unwrap(), f);
        assert!(f.scale(&int(0)).is_zero());
        assert_eq!(f.mul(&Expansion::one(2)), f);
        assert!(matches!(f.add(&g), Err(Error::WeightMismatch(4, 6))));
    }

    #[test]
    fn constant_term_multiplies() {
        let f = sample(4, 2, 5);
        let g = sample(6, 2, 9);
        assert_eq!(f.mul(&g).constant_term(), f.constant_term() * g.constant_term());
    }

    #[test]
    fn mixed_depths_truncate() {
        let f = sample(4, 3, 1);
        let g = sample(4, 2, 1);
        let s = f.add(&g).unwrap();
        assert_eq!(s.depth(), 2);
        assert_eq!(s.coeff(&tm("1,1,1,1,0,0")), Some(f.coeff(&tm("1,1,1,1,0,0")).unwrap() * int(2)));
        assert!(f.coeff(&tm("3,3,0,0,0,0")).is_some());
        assert_eq!(s.coeff(&tm("3,3,0,0,0,0")), None);
        assert_eq!(s.coeff(&tm("1,1,2,2,0,0")), Some(int(0)));
    }

    #[test]
    fn phi_is_multiplicative() {
        let e4 = eisenstein_q::<BigRational>(4, 3).unwrap();
        let e6 = eisenstein_q::<BigRational>(6, 3).unwrap();
        let lift = |e: &QSeries<BigRational>| {
            FourierExpansion::from_fn(e.weight, 3, |t| {
                if t.m == 0 {
                    e.coeff(t.n as usize).unwrap().clone()
                } else {
                    int(t.n + t.m)
                }
            })
        };
        let (f, g) = (lift(&e4), lift(&e6));
        assert_eq!(f.siegel_phi(), e4);
        assert_eq!(f.mul(&g).siegel_phi(), e4.mul(&e6));
        assert_eq!(Expansion::one(3).siegel_phi(), QSeries::one(3));
    }

    #[test]
    fn theta_kills_low_rank() {
        let f = sample(4, 2, 1);
        let th = f.theta();
        assert!(th.is_theta_image());
        assert!(th.is_cusp());
        let t = tm("1,2,1,1,0,0");
        assert_eq!(th.coeff(&t).unwrap(), f.coeff(&t).unwrap() * int(3));
        // (-23 / 3) = (3 / 23) = 1
        assert_eq!(f.theta_chi(-23).coeff(&t).unwrap(), f.coeff(&t).unwrap() * int(3));
        let t = tm("1,3,1,1,0,0");
        let f3 = sample(4, 3, 1);
        assert_eq!(f3.theta_chi(-23).coeff(&t).unwrap(), f3.coeff(&t).unwrap() * int(-5));
    }

    #[test]
    fn congruence_verdicts() {
        let f = sample(4, 2, 1);
        assert_eq!(f.cong_mod(&f, 5), Congruence::Holds { checked: f.index().len() });
        let g = f.add(&Expansion::one(2).with_weight(4).scale(&int(5))).unwrap();
        let shifted = f.add(&Expansion::one(2).with_weight(4)).unwrap();
        let fi = f.map(|a| a.floor());
        let gi = g.map(|a| a.floor());
        assert!(fi.cong_mod(&gi, 5).holds());
        assert!(
            matches!(fi.cong_mod(&shifted.map(|a| a.floor()), 5), Congruence::Fails { witness, .. } if witness.is_zero())
        );
        let half = fi.scale(&rat(1, 5));
        assert!(matches!(half.cong_mod(&fi, 5), Congruence::NotIntegral { .. }));
    }

    #[test]
    fn json_roundtrip() {
        let f = sample(4, 2, 3);
        let json = f.to_json().unwrap();
        let back = Expansion::from_json(&json, 4, 2).unwrap();
        assert_eq!(back, f);
        let first: Vec<CoeffEntry> = serde_json::from_str(&json).unwrap();
        assert_eq!(first[0].t, "0,0,0,0,0,0");
        assert!(Expansion::from_json(r#"[{"T":"9,9,0,0,0,0","coeff":{"num":"1","den":"1"}}]"#, 4, 2).is_err());
    }

    #[test]
    fn approximate_scalars_agree() {
        let f = sample(4, 2, 1);
        let g = sample(6, 2, 4);
        let exact = f.mul(&g);
        let approx = f.map(|a| a.to_f64()).mul(&g.map(|a| a.to_f64()));
        for (x, y) in exact.coeffs().iter().zip(approx.coeffs()) {
            let x = x.to_f64();
            assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
        }
    }

    trait ToF64 {
        fn to_f64(&self) -> f64;
    }
    impl ToF64 for BigRational {
        fn to_f64(&self) -> f64 {
            num_traits::ToPrimitive::to_f64(self).unwrap()
        }
    }
}
