//! Elliptic modular forms as truncated q-expansions.

use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{bernoulli, int, rat, sigma_u64};
use crate::scalar::Scalar;

/// Number of q-terms used when a caller has no reason to pick another.
pub const DEFAULT_PREC: usize = 64;

/// `sum_{n <= prec} coeffs[n] q^n`, tagged with a weight.
#[derive(Debug, Clone, PartialEq)]
pub struct QSeries<S> {
    pub weight: i64,
    coeffs: Vec<S>,
}

impl<S: Scalar> QSeries<S> {
    pub fn new(weight: i64, coeffs: Vec<S>) -> Self {
        assert!(!coeffs.is_empty(), "a q-series keeps at least its constant term");
        QSeries { weight, coeffs }
    }

    pub fn zero(weight: i64, prec: usize) -> Self {
        QSeries { weight, coeffs: vec![S::zero(); prec + 1] }
    }

    pub fn one(prec: usize) -> Self {
        let mut s = Self::zero(0, prec);
        s.coeffs[0] = S::one();
        s
    }

    pub fn prec(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Result<&S> {
        self.coeffs.get(n).ok_or(Error::OutOfPrecision { n, prec: self.prec() })
    }

    pub fn truncate(&self, prec: usize) -> Self {
        let prec = prec.min(self.prec());
        QSeries { weight: self.weight, coeffs: self.coeffs[..=prec].to_vec() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.weight != o.weight {
            return Err(Error::WeightMismatch(self.weight, o.weight));
        }
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.clone() + b.clone()).collect();
        Ok(QSeries { weight: self.weight, coeffs })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scale(&(S::zero() - S::one())))
    }

    pub fn scale(&self, c: &S) -> Self {
        QSeries { weight: self.weight, coeffs: self.coeffs.iter().map(|a| c.clone() * a.clone()).collect() }
    }

    /// Truncated product; precision is the smaller of the two, weights add.
    pub fn mul(&self, o: &Self) -> Self {
        let prec = self.prec().min(o.prec());
        let mut coeffs = vec![S::zero(); prec + 1];
        for (i, a) in self.coeffs[..=prec].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs[..=prec - i].iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        QSeries { weight: self.weight + o.weight, coeffs }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.prec());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

fn check_eisenstein_weight(k: i64) -> Result<()> {
    if k < 4 {
        return Err(Error::InvalidWeight { weight: k, reason: "Eisenstein series need weight >= 4" });
    }
    if k % 2 != 0 {
        return Err(Error::InvalidWeight { weight: k, reason: "weight must be even" });
    }
    Ok(())
}

/// `E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n`.
pub fn eisenstein_q<S: Scalar>(k: i64, prec: usize) -> Result<QSeries<S>> {
    check_eisenstein_weight(k)?;
    let factor = -int(2 * k) / bernoulli(k as usize);
    let mut coeffs = vec![S::one()];
    for n in 1..=prec {
        let c = &factor * BigRational::from_integer(sigma_u64(k as u32 - 1, n as u64));
        coeffs.push(S::from_rational(&c).expect("scalar absorbs rationals"));
    }
    Ok(QSeries::new(k, coeffs))
}

/// `G_k = -(B_k / 2k) E_k`.
pub fn g_q(k: i64, prec: usize) -> Result<QSeries<BigRational>> {
    let e = eisenstein_q::<BigRational>(k, prec)?;
    Ok(e.scale(&(-bernoulli(k as usize) / int(2 * k))))
}

/// `Delta = q prod (1 - q^n)^24`, expanded by repeated multiplication with
/// each binomial factor.
pub fn delta_q<S: Scalar>(prec: usize) -> QSeries<S> {
    // prod_{n>=1} (1 - q^n)^24 up to q^{prec-1}
    let len = prec.max(1);
    let mut prod = vec![BigInt::zero(); len];
    prod[0] = BigInt::one();
    for n in 1..len {
        for _ in 0..24 {
            for i in (n..len).rev() {
                let below = prod[i - n].clone();
                prod[i] -= below;
            }
        }
    }
    let mut coeffs = vec![S::zero(); prec + 1];
    for (i, c) in prod.into_iter().enumerate().take(prec) {
        coeffs[i + 1] = S::from_bigint(&c).expect("scalar absorbs integers");
    }
    QSeries::new(12, coeffs)
}

/// `prod (1 - q^n)^24` through Euler's pentagonal series, squared up.
fn delta_by_pentagonal(len: usize) -> Vec<BigInt> {
    let mut eta = vec![BigInt::zero(); len];
    let mut k: i64 = 0;
    loop {
        let mut any = false;
        for g in [k * (3 * k - 1) / 2, k * (3 * k + 1) / 2] {
            if (g as usize) < len {
                any = true;
                eta[g as usize] = if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            }
        }
        if !any {
            break;
        }
        k += 1;
    }
    let mul = |x: &[BigInt], y: &[BigInt]| {
        let mut out = vec![BigInt::zero(); len];
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y[..len - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        out
    };
    let e2 = mul(&eta, &eta);
    let e4 = mul(&e2, &e2);
    let e8 = mul(&e4, &e4);
    let e16 = mul(&e8, &e8);
    mul(&e16, &e8)
}

static TAU: OnceLock<Mutex<Vec<BigInt>>> = OnceLock::new();

/// Ramanujan's `tau(n)`, memoized. `tau(0) = 0`.
pub fn tau(n: u64) -> BigInt {
    let n = n as usize;
    let table = TAU.get_or_init(|| Mutex::new(Vec::new()));
    let mut table = table.lock().unwrap_or_else(|e| e.into_inner());
    if n >= table.len() {
        let len = n.max(2 * table.len()).max(64) + 1;
        let mut t = vec![BigInt::zero()];
        t.extend(delta_by_pentagonal(len - 1));
        *table = t;
    }
    table[n].clone()
}

/// `tau*(l) = tau(l) - 2^12 tau(l/4)`, with `tau` of a non-integer equal to 0.
pub fn tau_star(ell: u64) -> BigInt {
    let mut v = tau(ell);
    if ell % 4 == 0 && ell > 0 {
        v -= BigInt::from(4096) * tau(ell / 4);
    }
    v
}

/// Exponent pairs `(a, b)` with `4a + 6b = k`, in descending `a`.
pub fn monomials(k: i64) -> Vec<(u32, u32)> {
    if k < 0 || k % 2 != 0 {
        return Vec::new();
    }
    (0..=k / 4).rev().filter(|a| (k - 4 * a) % 6 == 0).map(|a| (a as u32, ((k - 4 * a) / 6) as u32)).collect()
}

/// A polynomial in `E_4, E_6`, as `(exponents, coefficient)` pairs.
pub type E4E6Poly = Vec<((u32, u32), BigRational)>;

pub fn eval_e4_e6(poly: &E4E6Poly, weight: i64, prec: usize) -> Result<QSeries<BigRational>> {
    let e4 = eisenstein_q::<BigRational>(4, prec)?;
    let e6 = eisenstein_q::<BigRational>(6, prec)?;
    let mut acc = QSeries::zero(weight, prec);
    for ((a, b), c) in poly {
        let mut term = e4.pow(*a).mul(&e6.pow(*b)).scale(c);
        term.weight = weight;
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// Writes `f` as `sum c_{a,b} E_4^a E_6^b` by an exact linear solve on the
/// leading coefficients, then confirms the match on the full precision.
pub fn express_in_e4_e6(f: &QSeries<BigRational>) -> Result<E4E6Poly> {
    let k = f.weight;
    let monos = monomials(k);
    let dim = monos.len();
    if dim == 0 {
        return if f.is_zero() { Ok(Vec::new()) } else { Err(Error::NotInSpace { weight: k, exponent: 0 }) };
    }
    let prec = f.prec();
    if prec + 1 < dim {
        return Err(Error::OutOfPrecision { n: dim - 1, prec });
    }
    let e4 = eisenstein_q::<BigRational>(4, prec)?;
    let e6 = eisenstein_q::<BigRational>(6, prec)?;
    let basis: Vec<QSeries<BigRational>> = monos.iter().map(|&(a, b)| e4.pow(a).mul(&e6.pow(b))).collect();

    // Augmented system: rows are q-exponents 0..dim, columns are monomials.
    let mut rows: Vec<Vec<BigRational>> = (0..dim)
        .map(|r| {
            let mut row: Vec<BigRational> = basis.iter().map(|s| s.coeffs[r].clone()).collect();
            row.push(f.coeffs[r].clone());
            row
        })
        .collect();
    for col in 0..dim {
        let pivot =
            (col..dim).find(|&r| !rows[r][col].is_zero()).ok_or(Error::NotInSpace { weight: k, exponent: col })?;
        rows.swap(col, pivot);
        let inv = rat(1, 1) / rows[col][col].clone();
        for x in rows[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..dim {
            if r != col && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in col..=dim {
                    let delta = &factor * &rows[col][c];
                    rows[r][c] -= delta;
                }
            }
        }
    }
    let poly: E4E6Poly = monos.into_iter().zip(rows.into_iter().map(|r| r[dim].clone())).collect();

    let rebuilt = eval_e4_e6(&poly, k, prec)?;
    if let Some(e) = (0..=prec).find(|&i| rebuilt.coeffs[i] != f.coeffs[i]) {
        return Err(Error::NotInSpace { weight: k, exponent: e });
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{is_prime, kronecker, residue};

    #[test]
    fn eisenstein_examples() {
        let e4 = eisenstein_q::<BigRational>(4, 5).unwrap();
        assert_eq!(e4.coeff(0).unwrap(), &int(1));
        assert_eq!(e4.coeff(1).unwrap(), &int(240));
        assert_eq!(e4.coeff(2).unwrap(), &int(2160));
        let e12 = eisenstein_q::<BigRational>(12, 3).unwrap();
        assert_eq!(e12.coeff(1).unwrap(), &rat(65520, 691));
        assert!(matches!(eisenstein_q::<BigRational>(5, 3), Err(Error::InvalidWeight { .. })));
        assert!(matches!(eisenstein_q::<BigRational>(2, 3), Err(Error::InvalidWeight { .. })));
        assert!(matches!(e4.coeff(6), Err(Error::OutOfPrecision { .. })));
    }

    #[test]
    fn e12_sign() {
        // -24/B_12 = -24 * 2730 / -691 = 65520/691
        assert_eq!(-int(24) / bernoulli(12), rat(65520, 691));
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau(1), BigInt::from(1));
        assert_eq!(tau(2), BigInt::from(-24));
        assert_eq!(tau(5), BigInt::from(4830));
        assert_eq!(tau(4), BigInt::from(-1472));
        assert_eq!(tau_star(5), BigInt::from(4830));
        assert_eq!(tau_star(1), BigInt::from(1));
        assert_eq!(tau_star(4), BigInt::from(-1472 - 4096));
    }

    #[test]
    fn product_and_pentagonal_agree() {
        let slow = delta_q::<BigRational>(120);
        for n in 0..=120u64 {
            assert_eq!(slow.coeff(n as usize).unwrap(), &BigRational::from_integer(tau(n)), "tau({n})");
        }
    }

    #[test]
    fn delta_from_e4_e6() {
        // 1728 Delta = E4^3 - E6^2
        let prec = 30;
        let e4 = eisenstein_q::<BigRational>(4, prec).unwrap();
        let e6 = eisenstein_q::<BigRational>(6, prec).unwrap();
        let lhs = e4.pow(3).sub(&e6.pow(2)).unwrap();
        assert_eq!(lhs, delta_q::<BigRational>(prec).scale(&int(1728)));
    }

    #[test]
    fn tau_multiplicative() {
        for m in 1..=50u64 {
            for n in 1..=50u64 {
                if num_integer::gcd(m, n) == 1 {
                    assert_eq!(tau(m * n), tau(m) * tau(n), "tau({m}*{n})");
                }
            }
        }
    }

    #[test]
    fn tau_hecke_recursion() {
        for p in [2u64, 3, 5] {
            for n in 1..=3u32 {
                let lhs = tau(p.pow(n + 1));
                let rhs = tau(p.pow(n)) * tau(p) - BigInt::from(p).pow(11) * tau(p.pow(n - 1));
                assert_eq!(lhs, rhs, "p = {p}, n = {n}");
            }
        }
    }

    #[test]
    fn tau_vanishes_mod_23_on_nonresidues() {
        let mut seen = 0;
        for p in (2..=200u64).filter(|&p| is_prime(p)) {
            if kronecker(p as i64, 23) == -1 {
                assert_eq!(tau(p) % 23, BigInt::zero(), "tau({p})");
                seen += 1;
            }
        }
        assert!(seen > 10);
    }

    #[test]
    fn express_examples() {
        let delta = delta_q::<BigRational>(20);
        let poly = express_in_e4_e6(&delta).unwrap();
        assert_eq!(poly, vec![((3, 0), rat(1, 1728)), ((0, 2), rat(-1, 1728))]);

        let e4 = eisenstein_q::<BigRational>(4, 20).unwrap();
        assert_eq!(express_in_e4_e6(&e4).unwrap(), vec![((1, 0), int(1))]);
    }

    #[test]
    fn express_rejects_non_forms() {
        let mut bad = delta_q::<BigRational>(10);
        bad.coeffs[7] += int(1);
        assert!(matches!(express_in_e4_e6(&bad), Err(Error::NotInSpace { weight: 12, exponent: 7 })));
    }

    #[test]
    fn express_roundtrip() {
        for k in (4..=30).step_by(2) {
            let g = g_q(k, 24).unwrap();
            let poly = express_in_e4_e6(&g).unwrap();
            assert_eq!(eval_e4_e6(&poly, k, 24).unwrap(), g, "weight {k}");
        }
    }

    #[test]
    fn g12_congruent_to_delta_mod_691() {
        let g12 = g_q(12, 20).unwrap();
        let poly = express_in_e4_e6(&g12).unwrap();
        let rebuilt = eval_e4_e6(&poly, 12, 20).unwrap();
        let delta = delta_q::<BigRational>(20);
        for n in 0..=20 {
            let diff = rebuilt.coeff(n).unwrap() - delta.coeff(n).unwrap();
            assert_eq!(residue(&diff, 691), Some(0), "q^{n}");
        }
    }

    #[test]
    fn monomial_sets() {
        assert_eq!(monomials(12), vec![(3, 0), (0, 2)]);
        assert_eq!(monomials(2), vec![]);
        assert_eq!(monomials(0), vec![(0, 0)]);
        assert_eq!(monomials(14), vec![(2, 1)]);
    }

    #[test]
    fn approximate_scalars() {
        let e4 = eisenstein_q::<f64>(4, 3).unwrap();
        assert_eq!(e4.coeffs(), &[1.0, 240.0, 2160.0, 6720.0]);
    }
}
