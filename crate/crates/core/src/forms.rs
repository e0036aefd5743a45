//! The named forms: quaternionic Eisenstein series `E_{k,H}` and their
//! rescaling `G_{k,H}`, the cusp forms `X10`, `X12`, `X14`, and the Maass-lift
//! evaluator behind all of them.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{bernoulli, divisors, int, rat, sigma};
use crate::fexp::FourierExpansion;
use crate::scalar::Scalar;
use crate::series::tau_star;
use crate::tmat::TMatrix;
use crate::Expansion;

fn check_weight(k: i64) -> Result<()> {
    if k < 4 || k % 2 != 0 {
        return Err(Error::InvalidWeight { weight: k, reason: "expected an even weight >= 4" });
    }
    Ok(())
}

fn convert<S: Scalar>(q: &BigRational) -> S {
    S::from_rational(q).expect("scalar absorbs rationals")
}

/// Maass lift of a singular series `astar` in weight `k`:
/// `a(f; T) = sum_{d | eps(T)} d^(k-1) astar(2det(T) / d^2)` for `T != 0`.
///
/// The constant term is `astar(0) * (-B_k / 2k)`, the value the divisor sum
/// takes over `d | 0` under zeta regularization. It gives `1` for `E_{k,H}`
/// and `0` whenever `astar(0) = 0`.
pub fn maass_lift<S: Scalar>(astar: impl Fn(u64) -> BigRational, k: i64, depth: u32) -> FourierExpansion<S> {
    let mut memo: HashMap<u64, BigRational> = HashMap::new();
    let mut value = |ell: u64| memo.entry(ell).or_insert_with(|| astar(ell)).clone();
    let constant = value(0) * (-bernoulli(k as usize) / int(2 * k));
    FourierExpansion::from_fn(k, depth, |t| {
        if t.is_zero() {
            return convert(&constant);
        }
        let eps = t.epsilon().expect("nonzero index") as u64;
        let det = t.two_det() as u64;
        let mut acc = BigRational::zero();
        for d in divisors(eps) {
            let a = value(det / (d * d));
            if !a.is_zero() {
                acc += a * int(BigInt::from(d).pow((k - 1) as u32));
            }
        }
        convert(&acc)
    })
}

/// `2^(k-2) - 1`.
fn mersenne_factor(k: i64) -> BigRational {
    int(BigInt::from(2).pow((k - 2) as u32) - 1)
}

fn sigma_combination(k: i64, ell: u64) -> BigRational {
    let ell = int(ell as i64);
    let two_pow = BigInt::from(2).pow((k - 2) as u32);
    int(sigma(k as u32 - 3, &ell) - two_pow * sigma(k as u32 - 3, &(ell / int(4))))
}

/// Singular series of `E_{k,H}`.
pub fn eisenstein_astar(k: i64, ell: u64) -> BigRational {
    let bk = bernoulli(k as usize);
    if ell == 0 {
        return -int(2 * k) / bk;
    }
    let factor = -int(4 * k * (k - 2)) / (mersenne_factor(k) * bk * bernoulli(k as usize - 2));
    factor * sigma_combination(k, ell)
}

/// Singular series of `G_{k,H}`.
pub fn g_astar(k: i64, ell: u64) -> BigRational {
    if ell == 0 {
        return mersenne_factor(k) * bernoulli(k as usize - 2) / int(2 * (k - 2));
    }
    sigma_combination(k, ell)
}

/// `-(2^(k-2) - 1) B_k B_{k-2} / (4k(k-2))`, the factor taking `E_{k,H}` to `G_{k,H}`.
pub fn g_normalizer(k: i64) -> BigRational {
    -(mersenne_factor(k) * bernoulli(k as usize) * bernoulli(k as usize - 2)) / int(4 * k * (k - 2))
}

pub fn eisenstein_h<S: Scalar>(k: i64, depth: u32) -> Result<FourierExpansion<S>> {
    check_weight(k)?;
    Ok(maass_lift(|ell| eisenstein_astar(k, ell), k, depth))
}

pub fn g_h<S: Scalar>(k: i64, depth: u32) -> Result<FourierExpansion<S>> {
    check_weight(k)?;
    Ok(maass_lift(|ell| g_astar(k, ell), k, depth))
}

/// Single coefficient of `E_{k,H}` without building the box.
pub fn eisenstein_h_coeff(k: i64, t: &TMatrix) -> Result<BigRational> {
    check_weight(k)?;
    maass_coeff(|ell| eisenstein_astar(k, ell), k, t)
}

/// Single coefficient of `G_{k,H}` without building the box.
pub fn g_h_coeff(k: i64, t: &TMatrix) -> Result<BigRational> {
    check_weight(k)?;
    maass_coeff(|ell| g_astar(k, ell), k, t)
}

fn maass_coeff(astar: impl Fn(u64) -> BigRational, k: i64, t: &TMatrix) -> Result<BigRational> {
    if !t.is_psd() {
        return Ok(BigRational::zero());
    }
    if t.is_zero() {
        return Ok(astar(0) * (-bernoulli(k as usize) / int(2 * k)));
    }
    let eps = t.epsilon()? as u64;
    let det = t.two_det() as u64;
    Ok(divisors(eps).into_iter().map(|d| astar(det / (d * d)) * int(BigInt::from(d).pow((k - 1) as u32))).sum())
}

/// `X10 = 17/161280 (E4 E6 - E10)`.
pub fn x10<S: Scalar>(depth: u32) -> FourierExpansion<S> {
    let e4 = eisenstein_h::<S>(4, depth).expect("valid weight");
    let e6 = eisenstein_h::<S>(6, depth).expect("valid weight");
    let e10 = eisenstein_h::<S>(10, depth).expect("valid weight");
    x10_from(&e4, &e6, &e10)
}

fn x10_from<S: Scalar>(
    e4: &FourierExpansion<S>,
    e6: &FourierExpansion<S>,
    e10: &FourierExpansion<S>,
) -> FourierExpansion<S> {
    e4.mul(e6).sub(e10).expect("weights agree").scale(&convert(&rat(17, 161_280)))
}

/// `X12 = 21421/203212800 (441/691 E4^3 + 250/691 E6^2 - E12)`.
pub fn x12<S: Scalar>(depth: u32) -> FourierExpansion<S> {
    let e4 = eisenstein_h::<S>(4, depth).expect("valid weight");
    let e6 = eisenstein_h::<S>(6, depth).expect("valid weight");
    let e12 = eisenstein_h::<S>(12, depth).expect("valid weight");
    let cubic = e4.mul(&e4).mul(&e4).scale(&convert(&rat(441, 691)));
    let square = e6.mul(&e6).scale(&convert(&rat(250, 691)));
    cubic.add(&square).and_then(|s| s.sub(&e12)).expect("weights agree").scale(&convert(&rat(21_421, 203_212_800)))
}

/// `X14 = E4 X10`.
pub fn x14<S: Scalar>(depth: u32) -> FourierExpansion<S> {
    let e4 = eisenstein_h::<S>(4, depth).expect("valid weight");
    let e6 = eisenstein_h::<S>(6, depth).expect("valid weight");
    let e10 = eisenstein_h::<S>(10, depth).expect("valid weight");
    e4.mul(&x10_from(&e4, &e6, &e10))
}

/// Closed form of `a(X14; T)` on rank-2 indices:
/// `sum_{d | eps(T)} d^13 tau*(2det(T) / d^2)`.
pub fn x14_closed(t: &TMatrix) -> Result<BigInt> {
    if t.rank()? < 2 {
        return Err(Error::RankTooSmall(*t));
    }
    let eps = t.epsilon()? as u64;
    let det = t.two_det() as u64;
    Ok(divisors(eps).into_iter().map(|d| BigInt::from(d).pow(13u32) * tau_star(det / (d * d))).sum())
}

/// Result of testing the Maass-space shape of an expansion.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MaassCheck {
    pub checked: usize,
    /// Values of `2det` for which no primitive index sits in the box, so the
    /// divisor-sum relation could not be evaluated for indices needing them.
    pub skipped_dets: Vec<u64>,
    pub violations: Vec<TMatrix>,
}

impl MaassCheck {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that coefficients depend only on `(eps(T), 2det(T))` and satisfy
/// `a(f; T) = sum_{d | eps} d^(k-1) astar(2det / d^2)` with `astar` read off
/// primitive indices.
pub fn check_maass(f: &Expansion) -> MaassCheck {
    let k = f.weight();
    let mut out = MaassCheck::default();
    let mut astar: BTreeMap<u64, BigRational> = BTreeMap::new();
    let mut by_invariants: HashMap<(i64, i64), BigRational> = HashMap::new();

    for (t, a) in f.iter().filter(|(t, _)| !t.is_zero()) {
        let eps = t.epsilon().expect("nonzero");
        match by_invariants.get(&(eps, t.two_det())) {
            Some(prev) if prev != a => out.violations.push(*t),
            Some(_) => {}
            None => {
                by_invariants.insert((eps, t.two_det()), a.clone());
            }
        }
        if eps == 1 {
            astar.entry(t.two_det() as u64).or_insert_with(|| a.clone());
        }
    }

    let mut skipped = std::collections::BTreeSet::new();
    for (t, a) in f.iter().filter(|(t, _)| !t.is_zero()) {
        let eps = t.epsilon().expect("nonzero") as u64;
        let det = t.two_det() as u64;
        let mut acc = BigRational::zero();
        let mut complete = true;
        for d in divisors(eps) {
            match astar.get(&(det / (d * d))) {
                Some(v) => acc += v * int(BigInt::from(d).pow((k - 1) as u32)),
                None => {
                    skipped.insert(det / (d * d));
                    complete = false;
                }
            }
        }
        if !complete {
            continue;
        }
        out.checked += 1;
        if &acc != a {
            out.violations.push(*t);
        }
    }
    out.skipped_dets = skipped.into_iter().collect();
    out
}

/// The literal divisor-sum relation
/// `a(f; T) = sum_{d | eps} d^(k-1) a(f; [[1, t/2d], [conj(t)/2d, nm/d^2]])`,
/// evaluated wherever every referenced index lies in the box. Returns
/// `(checked, violations)`.
pub fn check_andrianov(f: &Expansion) -> (usize, Vec<TMatrix>) {
    let k = f.weight();
    let mut checked = 0;
    let mut violations = Vec::new();
    'outer: for (t, a) in f.iter().filter(|(t, _)| !t.is_zero()) {
        let eps = t.epsilon().expect("nonzero");
        let mut acc = BigRational::zero();
        for d in divisors(eps as u64) {
            let d = d as i64;
            let reduced = TMatrix { n: 1, m: t.n * t.m / (d * d), t: t.t.div_exact(d).expect("d | eps") };
            match f.coeff(&reduced) {
                Some(v) => acc += v * int(BigInt::from(d).pow((k - 1) as u32)),
                None => continue 'outer,
            }
        }
        checked += 1;
        if &acc != a {
            violations.push(*t);
        }
    }
    (checked, violations)
}
