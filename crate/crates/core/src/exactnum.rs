//! Exact rationals and the elementary arithmetic functions the coefficient
//! formulas consume: Bernoulli numbers, divisor power sums, the Kronecker
//! symbol, p-adic valuations and primality.

use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

pub fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Exact quotient; `Err` instead of a panic when `b` is zero.
pub fn checked_div(a: &BigRational, b: &BigRational) -> Result<BigRational> {
    if b.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(a / b)
}

static BERNOULLI: OnceLock<Mutex<Vec<BigRational>>> = OnceLock::new();

/// The Bernoulli number `B_m`, with `B_1 = -1/2`.
///
/// Values are produced by the Akiyama–Tanigawa transform and memoized for the
/// life of the process.
pub fn bernoulli(m: usize) -> BigRational {
    let table = BERNOULLI.get_or_init(|| Mutex::new(Vec::new()));
    let mut table = table.lock().unwrap_or_else(|e| e.into_inner());
    if m >= table.len() {
        let upto = m.max(2 * table.len()).max(16);
        *table = akiyama_tanigawa(upto);
    }
    table[m].clone()
}

fn akiyama_tanigawa(upto: usize) -> Vec<BigRational> {
    let mut row: Vec<BigRational> = Vec::with_capacity(upto + 1);
    let mut out = Vec::with_capacity(upto + 1);
    for m in 0..=upto {
        row.push(rat(1, m as i64 + 1));
        for j in (1..=m).rev() {
            let diff = &row[j - 1] - &row[j];
            row[j - 1] = diff * int(j as i64);
        }
        out.push(row[0].clone());
    }
    // The transform yields the B_1 = +1/2 convention.
    if upto >= 1 {
        out[1] = rat(-1, 2);
    }
    out
}

/// All positive divisors of `n`, ascending. Empty for `n = 0`.
pub fn divisors(n: u64) -> Vec<u64> {
    if n == 0 {
        return Vec::new();
    }
    let mut divs = vec![1u64];
    for (p, e) in factor_u64(n) {
        let len = divs.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

/// `sigma_m(n)` for a positive integer `n`; zero for `n = 0`.
pub fn sigma_u64(m: u32, n: u64) -> BigInt {
    divisors(n).into_iter().map(|d| BigInt::from(d).pow(m)).sum()
}

/// Divisor power sum `sigma_m(ell)`, which is zero unless `ell` is a positive
/// integer. Call sites may pass `ell / 4` directly.
pub fn sigma(m: u32, ell: &BigRational) -> BigInt {
    if !ell.is_integer() || !ell.is_positive() {
        return BigInt::zero();
    }
    let n = ell.to_integer();
    match n.to_u64() {
        Some(n) => sigma_u64(m, n),
        None => {
            let mut acc = BigInt::zero();
            let root = n.sqrt();
            let mut d = BigInt::one();
            while d <= root {
                if n.is_multiple_of(&d) {
                    let e = &n / &d;
                    acc += d.clone().pow(m);
                    if e != d {
                        acc += e.pow(m);
                    }
                }
                d += 1u32;
            }
            acc
        }
    }
}

const KRONECKER_TWO: [i32; 8] = [0, 1, 0, -1, 0, -1, 0, 1];

/// The Kronecker symbol `(a / n)`, defined for every integer `n`.
pub fn kronecker(a: i64, n: i64) -> i32 {
    let (mut a, mut b) = (a as i128, n as i128);
    if b == 0 {
        return i32::from(a.abs() == 1);
    }
    if a.is_even() && b.is_even() {
        return 0;
    }
    let v = b.trailing_zeros();
    b >>= v;
    let mut k = if v % 2 == 0 { 1 } else { KRONECKER_TWO[(a & 7) as usize] };
    if b < 0 {
        b = -b;
        if a < 0 {
            k = -k;
        }
    }
    // b is odd and positive from here on.
    loop {
        if a == 0 {
            return if b == 1 { k } else { 0 };
        }
        let v = a.trailing_zeros();
        a >>= v;
        if v % 2 == 1 {
            k *= KRONECKER_TWO[(b & 7) as usize];
        }
        if a & b & 2 != 0 {
            k = -k;
        }
        let r = a.abs();
        a = b % r;
        b = r;
    }
}

/// A p-adic valuation; zero has infinite valuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

fn ord_int(n: &BigInt, p: &BigInt) -> i64 {
    debug_assert!(!n.is_zero());
    let mut v = 0;
    let mut n = n.clone();
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of an exact rational.
pub fn ord_p(x: &BigRational, p: u64) -> Result<Valuation> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(ord_p_unchecked(x, p))
}

pub(crate) fn ord_p_unchecked(x: &BigRational, p: u64) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let p = BigInt::from(p);
    Valuation::Finite(ord_int(x.numer(), &p) - ord_int(x.denom(), &p))
}

/// `x mod p` for a p-integral rational, `None` otherwise.
pub fn residue(x: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let den = x.denom().mod_floor(&pb);
    if den.is_zero() {
        return None;
    }
    let num = x.numer().mod_floor(&pb);
    let inv = den.modpow(&BigInt::from(p - 2), &pb);
    ((num * inv) % &pb).to_u64()
}

/// Symmetric residue in `(-p/2, p/2]`, handy for printing.
pub fn residue_signed(x: &BigRational, p: u64) -> Option<i64> {
    residue(x, p).map(|r| if r > p / 2 { r as i64 - p as i64 } else { r as i64 })
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin over the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization by trial division, ascending primes.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Trial-division factorization of a nonzero big integer's absolute value.
/// Divides out primes below `bound`; the remaining cofactor must be a prime
/// that fits in `u64`, otherwise the factorization is reported incomplete.
pub fn factor_bigint(n: &BigInt, bound: u64) -> Result<Vec<(BigUint, u32)>> {
    let mut n = n.magnitude().clone();
    let mut out = Vec::new();
    if n.is_zero() {
        return Err(Error::Unfactored("0".into()));
    }
    let mut p = 2u64;
    while p <= bound && BigUint::from(p) * BigUint::from(p) <= n {
        let pb = BigUint::from(p);
        if (&n % &pb).is_zero() {
            let mut e = 0;
            while (&n % &pb).is_zero() {
                n /= &pb;
                e += 1;
            }
            out.push((pb, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > BigUint::one() {
        let fully = BigUint::from(p) * BigUint::from(p) > n;
        match n.to_u64() {
            Some(c) if fully || is_prime(c) => out.push((n, 1)),
            _ => return Err(Error::Unfactored(n.to_string())),
        }
    }
    Ok(out)
}
