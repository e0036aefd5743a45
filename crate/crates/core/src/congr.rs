//! Verifiers for the congruence statements on a bounded box of indices.
//!
//! Each verifier returns a [`Verdict`]: a JSON-serializable summary plus a
//! per-index log of every coefficient whose hypothesis was met.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactnum::{
    bernoulli, factor_bigint, int, is_prime, kronecker, ord_p, ord_p_unchecked, residue, sigma_u64, Valuation,
};
use crate::fexp::{Congruence, FourierExpansion, RationalJson};
use crate::forms::{eisenstein_h, g_h, g_h_coeff, x10, x14};
use crate::series::{express_in_e4_e6, E4E6Poly, QSeries, DEFAULT_PREC};
use crate::tmat::TMatrix;
use crate::Expansion;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Holds,
    Fails,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<RationalJson>,
    pub reason: String,
}

impl Witness {
    fn at(t: &TMatrix, value: &BigRational, reason: impl Into<String>) -> Self {
        Witness { t: Some(t.to_string()), value: Some(value.into()), reason: reason.into() }
    }

    fn note(reason: impl Into<String>) -> Self {
        Witness { t: None, value: None, reason: reason.into() }
    }
}

/// One checked index.
#[derive(Debug, Clone, PartialEq)]
pub struct LogEntry {
    pub t: TMatrix,
    pub two_det: i64,
    pub value: BigRational,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub theorem: String,
    pub params: BTreeMap<String, Value>,
    pub status: Status,
    pub witnesses: Vec<Witness>,
    pub checked: usize,
    #[serde(skip)]
    pub log: Vec<LogEntry>,
}

impl Verdict {
    fn new(theorem: &str, params: Value) -> Self {
        let params = match params {
            Value::Object(map) => map.into_iter().collect(),
            _ => BTreeMap::new(),
        };
        Verdict {
            theorem: theorem.into(),
            params,
            status: Status::Holds,
            witnesses: Vec::new(),
            checked: 0,
            log: Vec::new(),
        }
    }

    fn fail(&mut self, w: Witness) {
        self.status = Status::Fails;
        self.witnesses.push(w);
    }

    fn record(&mut self, t: &TMatrix, value: &BigRational, ok: bool, reason: &str) {
        self.checked += 1;
        self.log.push(LogEntry { t: *t, two_det: t.two_det(), value: value.clone(), ok });
        if !ok {
            self.fail(Witness::at(t, value, reason));
        }
    }

    fn absorb(&mut self, label: &str, c: &Congruence, p: u64) {
        match c {
            Congruence::Holds { checked } => self.checked += checked,
            Congruence::Fails { witness, lhs, rhs } => {
                self.fail(Witness::at(witness, &(lhs - rhs), format!("{label}: coefficients differ mod p")))
            }
            Congruence::NotIntegral { witness, lhs, rhs } => {
                let v = if ord_p_unchecked(lhs, p) < Valuation::Finite(0) { lhs } else { rhs };
                self.fail(Witness::at(witness, v, format!("{label}: coefficient is not p-integral")))
            }
        }
    }

    pub fn holds(&self) -> bool {
        self.status == Status::Holds
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn divisible(x: &BigRational, p: u64) -> bool {
    ord_p_unchecked(x, p) >= Valuation::Finite(1)
}

fn require_prime_at_least_5(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p < 5 {
        return Err(Error::Hypothesis(format!("p = {p} must be at least 5")));
    }
    Ok(())
}

fn require_weight(k: i64) -> Result<()> {
    if k < 4 || k % 2 != 0 {
        return Err(Error::InvalidWeight { weight: k, reason: "expected an even weight >= 4" });
    }
    Ok(())
}

/// `(2^(k-2) - 1) B_{k-2} / (k-2)`.
fn star_quantity(k: i64) -> BigRational {
    int(BigInt::from(2).pow((k - 2) as u32) - 1) * bernoulli(k as usize - 2) / int(k - 2)
}

/// `ord_p((2^(k-2)-1) B_{k-2} / (k-2)) > 0` and `ord_p(B_k / k) >= 0`.
pub fn star_condition(k: i64, p: u64) -> Result<bool> {
    require_weight(k)?;
    require_prime_at_least_5(p)?;
    let first = ord_p(&star_quantity(k), p)? > Valuation::Finite(0);
    let second = ord_p(&(bernoulli(k as usize) / int(k)), p)? >= Valuation::Finite(0);
    Ok(first && second)
}

/// All primes `p >= 5` satisfying the Ramanujan-type condition in weight `k`.
/// Candidates are the prime divisors of the numerator of the first quantity.
pub fn star_primes(k: i64) -> Result<Vec<u64>> {
    require_weight(k)?;
    let q = star_quantity(k);
    let mut out = Vec::new();
    if q.is_zero() {
        return Err(Error::Hypothesis(format!("quantity vanishes for k = {k}")));
    }
    for (prime, _) in factor_bigint(q.numer(), 10_000_000)? {
        let p = u64::try_from(&prime).map_err(|_| Error::Unfactored(prime.to_string()))?;
        if p >= 5 && star_condition(k, p)? {
            out.push(p);
        }
    }
    Ok(out)
}

/// The cusp form built for the Ramanujan-type congruence, with its certificate.
#[derive(Debug, Clone)]
pub struct ChiConstruction {
    pub chi: Expansion,
    /// `P` with `Phi(G_{k,H}) / p = P(E4, E6)`.
    pub poly: E4E6Poly,
    pub report: Verdict,
}

fn phi_precision(depth: u32) -> usize {
    (depth as usize).max(DEFAULT_PREC)
}

/// Runs the construction `chi = G_{k,H} - p P(E_{4,H}, E_{6,H})` where
/// `p P(E4, E6) = Phi(G_{k,H})`, and certifies `Phi(chi) = 0` and
/// `G_{k,H} ≡ chi (mod p)` on the box.
pub fn build_chi(k: i64, p: u64, depth: u32) -> Result<ChiConstruction> {
    if !star_condition(k, p)? {
        return Err(Error::Hypothesis(format!("p = {p} does not satisfy the condition for k = {k}")));
    }
    let mut report = Verdict::new("ramanujan", json!({ "k": k, "p": p, "depth": depth }));
    let g = g_h::<BigRational>(k, depth)?;

    // Phi(G) read from the diagonal rank-one coefficients, well past the box.
    let prec = phi_precision(depth);
    let phi_coeffs = (0..=prec as i64).map(|n| g_h_coeff(k, &TMatrix::diag(n, 0))).collect::<Result<Vec<_>>>()?;
    let phi = QSeries::new(k, phi_coeffs);
    if phi.truncate(depth as usize) != g.siegel_phi() {
        report.fail(Witness::note("box Phi disagrees with the diagonal formula"));
    }

    let f = phi.scale(&BigRational::new(1.into(), p.into()));
    if let Some(n) = f.coeffs().iter().position(|c| ord_p_unchecked(c, p) < Valuation::Finite(0)) {
        return Err(Error::NotPIntegral(format!("Phi(G_{k},H)/{p} at q^{n}")));
    }
    let poly = express_in_e4_e6(&f)?;
    for ((a, b), c) in &poly {
        if ord_p_unchecked(c, p) < Valuation::Finite(0) {
            report.fail(Witness::note(format!("coefficient of E4^{a} E6^{b} is not p-integral")));
        }
    }

    let e4 = eisenstein_h::<BigRational>(4, depth)?;
    let e6 = eisenstein_h::<BigRational>(6, depth)?;
    let mut big_f = Expansion::zero(k, depth);
    for ((a, b), c) in &poly {
        let term = e4.pow(*a).mul(&e6.pow(*b)).scale(c).with_weight(k);
        big_f = big_f.add(&term)?;
    }
    let chi = g.sub(&big_f.scale(&int(p as i64)))?;

    let phi_chi = chi.siegel_phi();
    if let Some(n) = phi_chi.coeffs().iter().position(|c| !c.is_zero()) {
        report.fail(Witness::note(format!("Phi(chi) has a nonzero q^{n} coefficient")));
    }
    report.absorb("G vs chi", &g.cong_mod(&chi, p), p);

    match (k, p) {
        (10, 17) => report.absorb("chi vs X10", &chi.cong_mod(&x10::<BigRational>(depth), p), p),
        (14, 691) => report.absorb("chi vs X14", &chi.cong_mod(&x14::<BigRational>(depth), p), p),
        _ => {}
    }
    Ok(ChiConstruction { chi, poly, report })
}

/// `E_{p-1,H} ≡ 1 (mod p)`, under `B_{p-3} ≢ 0 (mod p)`.
pub fn verify_ep_minus_one(p: u64, depth: u32) -> Result<Verdict> {
    require_prime_at_least_5(p)?;
    if residue(&bernoulli(p as usize - 3), p) == Some(0) {
        return Err(Error::Hypothesis(format!("B_{} ≡ 0 (mod {p})", p - 3)));
    }
    let e = eisenstein_h::<BigRational>(p as i64 - 1, depth)?;
    let mut v = Verdict::new("ep1", json!({ "p": p, "depth": depth }));
    for (t, a) in e.iter() {
        if t.is_zero() {
            v.record(t, a, a == &int(1), "constant term is not 1");
        } else {
            v.record(t, a, divisible(a, p), "coefficient not divisible by p");
        }
    }
    Ok(v)
}

/// `Theta(f) ≡ x (mod p)` on the common box.
pub fn verify_theta_pair(name: &str, f: &Expansion, x: &Expansion, p: u64) -> Verdict {
    let mut v = Verdict::new("theta", json!({ "form": name, "p": p, "depth": f.depth().min(x.depth()) }));
    let th = f.theta();
    for (t, a) in th.iter() {
        v.log.push(LogEntry { t: *t, two_det: t.two_det(), value: a.clone(), ok: true });
    }
    let c = th.cong_mod(x, p);
    if let Congruence::Fails { witness, .. } | Congruence::NotIntegral { witness, .. } = &c {
        if let Some(e) = v.log.iter_mut().find(|e| e.t == *witness) {
            e.ok = false;
        }
    }
    v.absorb(name, &c, p);
    v
}

/// The two worked theta congruences: `Theta(G_{4,H}) ≡ X10 (mod 5)` and
/// `Theta(G_{6,H}) ≡ X14 (mod 7)`.
pub fn verify_theta_cong(depth: u32) -> Result<Vec<Verdict>> {
    let g4 = g_h::<BigRational>(4, depth)?;
    let g6 = g_h::<BigRational>(6, depth)?;
    Ok(vec![
        verify_theta_pair("Theta(G4H) vs X10", &g4, &x10(depth), 5),
        verify_theta_pair("Theta(G6H) vs X14", &g6, &x14(depth), 7),
    ])
}

/// `a(X14; T) ≡ 0 (mod 23)` whenever `chi_{-23}(2det T) = -1`, together with
/// `Theta_{chi_{-23}}(X14) - Theta(X14) ≡ 0 (mod 23)`.
pub fn verify_mod23(depth: u32) -> Verdict {
    verify_mod23_on(&x14::<BigRational>(depth))
}

pub fn verify_mod23_on(x14: &Expansion) -> Verdict {
    let mut v = Verdict::new("mod23", json!({ "depth": x14.depth() }));
    for (t, a) in x14.iter() {
        if kronecker(-23, t.two_det()) == -1 {
            v.record(t, a, divisible(a, 23), "a(X14; T) not divisible by 23");
        }
    }
    let diff = x14.theta_chi(-23).sub(&x14.theta()).expect("same weight");
    v.absorb(
        "Theta_chi(X14) - Theta(X14)",
        &diff.cong_mod(&FourierExpansion::zero(diff.weight(), diff.depth()), 23),
        23,
    );
    v
}

/// `a(G_{k,H}; T) ≡ 0 (mod p)` for `p = 2k - 5` prime and `chi_{-p}(2det T) = -1`.
pub fn verify_cong_eis(k: i64, depth: u32) -> Result<Verdict> {
    require_weight(k)?;
    let p = (2 * k - 5) as u64;
    if !is_prime(p) {
        return Err(Error::Hypothesis(format!("2k - 5 = {p} is not prime")));
    }
    let g = g_h::<BigRational>(k, depth)?;
    let mut v = Verdict::new("congeis", json!({ "k": k, "p": p, "depth": depth }));
    for (t, a) in g.iter() {
        if kronecker(-(p as i64), t.two_det()) == -1 {
            v.record(t, a, divisible(a, p), "a(G; T) not divisible by p");
        }
    }
    Ok(v)
}

/// The Euler-criterion step behind the Eisenstein congruence:
/// `sigma_{(p-1)/2}(l) ≡ 0 (mod p)` whenever `chi_{-p}(l) = -1`, for `l <= bound`.
pub fn verify_sigma_chain(p: u64, bound: u64) -> Result<Verdict> {
    if !is_prime(p) || p < 3 {
        return Err(Error::NotPrime(p));
    }
    let mut v = Verdict::new("congeis-sigma", json!({ "p": p, "bound": bound }));
    let e = ((p - 1) / 2) as u32;
    for ell in 1..=bound {
        if kronecker(-(p as i64), ell as i64) == -1 {
            let s = int(sigma_u64(e, ell));
            v.checked += 1;
            if !divisible(&s, p) {
                v.fail(Witness {
                    t: None,
                    value: Some((&s).into()),
                    reason: format!("sigma_{e}({ell}) not divisible by p"),
                });
            }
        }
    }
    Ok(v)
}
