//! Truncated bivariate series in `1/z` and `1/u`, the second-order operator
//! annihilating the probability generating functional up to a source term,
//! and the finite summation identities behind normalisation.
//!
//! A coefficient stored at exponent pair `(a, b)` multiplies `z^(-a) u^(-b)`.
//! Exponents are tracked for `-2 <= a, b <= order`; anything pushed outside
//! that window by a shift or a derivative is dropped. Each operator term
//! moves exponents by at most two before moving them back, so output
//! coefficients with `0 <= a, b <= order - 2` are exact.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::closed_form::{p2, p_rule3, p_rule4, Rule};
use crate::error::{Error, Result};
use crate::exact_arith::{binomial, falling_ratio, hyp_terminating, int, pochhammer, Rational};

/// Lowest tracked exponent, i.e. the highest positive power `z^2` / `u^2`.
pub const MIN_EXP: i64 = -2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BivariateSeries {
    order: i64,
    coeffs: BTreeMap<(i64, i64), Rational>,
}

impl BivariateSeries {
    pub fn zero(order: u64) -> Self {
        Self {
            order: order as i64,
            coeffs: BTreeMap::new(),
        }
    }

    /// The constant series `1`.
    pub fn one(order: u64) -> Self {
        let mut s = Self::zero(order);
        s.add_term(0, 0, Rational::one());
        s
    }

    pub fn order(&self) -> u64 {
        self.order as u64
    }

    fn in_window(&self, a: i64, b: i64) -> bool {
        (MIN_EXP..=self.order).contains(&a) && (MIN_EXP..=self.order).contains(&b)
    }

    /// Adds `c z^(-a) u^(-b)`; terms outside the window are dropped.
    pub fn add_term(&mut self, a: i64, b: i64, c: Rational) {
        if c.is_zero() || !self.in_window(a, b) {
            return;
        }
        let entry = self.coeffs.entry((a, b)).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&(a, b));
        }
    }

    /// Overwrites one coefficient.
    pub fn set(&mut self, a: i64, b: i64, c: Rational) {
        self.coeffs.remove(&(a, b));
        self.add_term(a, b, c);
    }

    pub fn coeff(&self, a: i64, b: i64) -> Rational {
        self.coeffs
            .get(&(a, b))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((i64, i64), &Rational)> {
        self.coeffs.iter().map(|(k, v)| (*k, v))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn map_terms(&self, f: impl Fn(i64, i64, &Rational) -> Option<(i64, i64, Rational)>) -> Self {
        let mut out = Self::zero(self.order());
        for (&(a, b), c) in &self.coeffs {
            if let Some((na, nb, nc)) = f(a, b, c) {
                out.add_term(na, nb, nc);
            }
        }
        out
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        self.map_terms(|a, b, c| Some((a, b, c * factor)))
    }

    /// Multiplies by `z^dz u^du`; a positive power lowers the stored exponent.
    pub fn mul_monomial(&self, dz: i64, du: i64) -> Self {
        self.map_terms(|a, b, c| Some((a - dz, b - du, c.clone())))
    }

    /// `d/dz`: `z^(-a)` becomes `-a z^(-a-1)`.
    pub fn d_dz(&self) -> Self {
        self.map_terms(|a, b, c| Some((a + 1, b, c * int(-a))))
    }

    /// `d/du`: `u^(-b)` becomes `-b u^(-b-1)`.
    pub fn d_du(&self) -> Self {
        self.map_terms(|a, b, c| Some((a, b + 1, c * int(-b))))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.order = out.order.min(other.order);
        out.coeffs
            .retain(|&(a, b), _| a <= out.order && b <= out.order);
        for (&(a, b), c) in &other.coeffs {
            out.add_term(a, b, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&int(-1)))
    }
}

/// `D = (1/z + 1/u) - (1/u)(u + z(2+u)) d_z - (1+u) d_u
///      - z(z-1) d_zz - 2z(u-1) d_zu - u(u-1) d_uu`,
/// applied term by term.
pub fn apply_d(series: &BivariateSeries) -> BivariateSeries {
    let yz = series.d_dz();
    let yu = series.d_du();
    let yzz = yz.d_dz();
    let yzu = yz.d_du();
    let yuu = yu.d_du();

    let mut out = series.mul_monomial(-1, 0).add(&series.mul_monomial(0, -1));
    // (1/u)(u + 2z + zu) = 1 + 2 z/u + z
    let first = yz
        .add(&yz.mul_monomial(1, -1).scale(&int(2)))
        .add(&yz.mul_monomial(1, 0));
    out = out.sub(&first);
    out = out.sub(&yu.add(&yu.mul_monomial(0, 1)));
    out = out.sub(&yzz.mul_monomial(2, 0).sub(&yzz.mul_monomial(1, 0)));
    out = out.sub(
        &yzu.mul_monomial(1, 1)
            .sub(&yzu.mul_monomial(1, 0))
            .scale(&int(2)),
    );
    out = out.sub(&yuu.mul_monomial(0, 2).sub(&yuu.mul_monomial(0, 1)));
    out
}

fn probability_fn(rule: Rule) -> Result<fn(u64, u64, u64) -> Rational> {
    match rule {
        Rule::P2 => Ok(p2),
        Rule::RuleIII => Ok(p_rule3),
        Rule::RuleIV => Ok(p_rule4),
        other => Err(Error::UnsupportedRule(other)),
    }
}

/// `sum_{r,w <= order} p^(k)(r, w) z^(-r) u^(-w)`.
pub fn series_from_pmf(rule: Rule, k: u64, order: u64) -> Result<BivariateSeries> {
    let p = probability_fn(rule)?;
    let mut s = BivariateSeries::zero(order);
    for r in 0..=order {
        for w in 0..=order {
            s.add_term(r as i64, w as i64, p(r, w, k));
        }
    }
    Ok(s)
}

/// Same grid rescaled by `((r+w)! / (r! w!))^2`.
pub fn f_series_from_pmf(rule: Rule, k: u64, order: u64) -> Result<BivariateSeries> {
    let p = probability_fn(rule)?;
    let mut s = BivariateSeries::zero(order);
    for r in 0..=order {
        for w in 0..=order {
            let c = binomial(r + w, r as i64);
            s.add_term(r as i64, w as i64, p(r, w, k) * &c * &c);
        }
    }
    Ok(s)
}

/// Right-hand side: `(k+1)^2 v^-(k+1) - k^2 v^-k` with `v = u` for Rule III
/// and `v = z` for Rule IV.
pub fn pde_source(rule: Rule, k: u64, order: u64) -> Result<BivariateSeries> {
    let mut s = BivariateSeries::zero(order);
    let (hi, lo) = (int(((k + 1) * (k + 1)) as i64), int(-((k * k) as i64)));
    let k = k as i64;
    match rule {
        Rule::RuleIII => {
            s.add_term(0, k + 1, hi);
            s.add_term(0, k, lo);
        }
        Rule::RuleIV => {
            s.add_term(k + 1, 0, hi);
            s.add_term(k, 0, lo);
        }
        other => return Err(Error::UnsupportedRule(other)),
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub a: i64,
    pub b: i64,
    pub got: Rational,
    pub expected: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdeResidualReport {
    pub rule: Rule,
    pub k: u64,
    pub order: u64,
    /// Inclusive upper bounds `(a, b)` of the exact output window.
    pub trusted_window: (i64, i64),
    pub mismatches: Vec<Mismatch>,
}

impl PdeResidualReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

impl fmt::Display for PdeResidualReport {
    /// One line per mismatch followed by a sign grid (`+`, `-`, `.`) of the
    /// residual over the trusted window, so a systematic pattern stands out.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "rule={} k={} order={} window=0..={}x0..={} mismatches={}",
            self.rule,
            self.k,
            self.order,
            self.trusted_window.0,
            self.trusted_window.1,
            self.mismatches.len()
        )?;
        for m in &self.mismatches {
            writeln!(
                f,
                "  (a={}, b={}) got {} expected {}",
                m.a, m.b, m.got, m.expected
            )?;
        }
        if !self.mismatches.is_empty() {
            for a in MIN_EXP..=self.trusted_window.0 {
                let row: String = (MIN_EXP..=self.trusted_window.1)
                    .map(
                        |b| match self.mismatches.iter().find(|m| m.a == a && m.b == b) {
                            None => '.',
                            Some(m) if m.got > m.expected => '+',
                            Some(_) => '-',
                        },
                    )
                    .collect();
                writeln!(f, "  a={a:>3} {row}")?;
            }
        }
        Ok(())
    }
}

/// Applies the operator to `series` and compares against the rule's source.
pub fn check_pde(rule: Rule, k: u64, series: &BivariateSeries) -> Result<PdeResidualReport> {
    let order = series.order();
    let trusted = series.order - 2;
    let source = pde_source(rule, k, order)?;
    let image = apply_d(series);
    let residual = image.sub(&source);

    let mut mismatches = Vec::new();
    for ((a, b), _) in residual.iter() {
        let positive_power = a < 0 || b < 0;
        let in_trusted = (0..=trusted).contains(&a) && (0..=trusted).contains(&b);
        if positive_power || in_trusted {
            mismatches.push(Mismatch {
                a,
                b,
                got: image.coeff(a, b),
                expected: source.coeff(a, b),
            });
        }
    }
    Ok(PdeResidualReport {
        rule,
        k,
        order,
        trusted_window: (trusted, trusted),
        mismatches,
    })
}

/// Machine check that the closed-form generating functional satisfies the
/// rule's second-order equation on the trusted window.
pub fn verify_pde(rule: Rule, k: u64, order: u64) -> Result<PdeResidualReport> {
    if order < k + 3 {
        return Err(Error::WindowTooSmall {
            order,
            required: k + 3,
        });
    }
    let series = series_from_pmf(rule, k, order)?;
    check_pde(rule, k, &series)
}

fn sign(neg: bool) -> Rational {
    if neg {
        int(-1)
    } else {
        Rational::one()
    }
}

/// `sum_{n=0}^{r} (-1)^(r+n) (r+w+n)! / ((1+n) w! (r-n)! (n!)^2)
///  == ((r+w)!/(r! w!))^2 w / ((r+1)(r+w))`.
pub fn verify_identity_c1(r: u64, w: u64) -> bool {
    if r == 0 || w == 0 {
        return false;
    }
    let lhs: Rational = (0..=r)
        .map(|n| {
            let n_fact = falling_ratio(0, n);
            sign((r + n) % 2 == 1)
                * falling_ratio(r + w + n, w)
                * falling_ratio(0, r - n)
                * &n_fact
                * &n_fact
                / int((1 + n) as i64)
        })
        .sum();
    let c = binomial(r + w, r as i64);
    let rhs = &c * &c * Rational::new(BigInt::from(w), BigInt::from((r + 1) * (r + w)));
    lhs == rhs
}

/// `sum_{n=1}^{r} (-1)^n C(r+2, n+2) C(r+w+n, n-1) == (-1)^r (r+w-2)! / ((r-1)! (w-1)!)`.
pub fn verify_identity_bio2(r: u64, w: u64) -> bool {
    if r == 0 || w == 0 {
        return false;
    }
    let lhs: Rational = (1..=r)
        .map(|n| {
            sign(n % 2 == 1) * binomial(r + 2, n as i64 + 2) * binomial(r + w + n, n as i64 - 1)
        })
        .sum();
    let rhs = sign(r % 2 == 1) * binomial(r + w - 2, r as i64 - 1);
    lhs == rhs
}

/// Terminating unit-argument summation:
/// `3F2(a, b, -n; d, a+b-d-n+1; 1) == (d-a)_n (d-b)_n / ((d)_n (d-a-b)_n)`.
pub fn verify_identity_3f2_unit(a: &Rational, b: &Rational, n: u64, d: &Rational) -> Result<bool> {
    let neg_n = int(-(n as i64));
    let lower2 = a + b - d - int(n as i64) + Rational::one();
    let lhs = hyp_terminating(
        &[a.clone(), b.clone(), neg_n],
        &[d.clone(), lower2],
        &Rational::one(),
    )?;
    let den = pochhammer(d, n) * pochhammer(&(d - a - b), n);
    if den.is_zero() {
        return Err(Error::InvalidArgument(
            "right-hand Pochhammer denominator vanishes".into(),
        ));
    }
    let rhs = pochhammer(&(d - a), n) * pochhammer(&(d - b), n) / den;
    Ok(lhs == rhs)
}

/// `sum_k p_III^(k)(r, w)` rewritten through the unit-argument summation:
/// `r r! (1+r+w) / ((1+r)! (r+w)) * ((1+r)_w)^2 / ((2+r)_w (r)_w)`.
pub fn rule3_total_via_unit_3f2(r: u64, w: u64) -> Result<Rational> {
    if r == 0 {
        return Err(Error::InvalidArgument("requires r >= 1".into()));
    }
    let (ri, wi) = (r as i64, w as i64);
    let ok = verify_identity_3f2_unit(&int(1), &int(1), w, &int(2 + ri))?;
    if !ok {
        return Err(Error::InvalidArgument(format!(
            "unit-argument summation fails at r={r}, w={w}"
        )));
    }
    let rising = pochhammer(&int(1 + ri), w);
    let prefactor = int(ri) * falling_ratio(r, r + 1) * int(1 + ri + wi) / int(ri + wi);
    Ok(prefactor * &rising * &rising / (pochhammer(&int(2 + ri), w) * pochhammer(&int(ri), w)))
}
