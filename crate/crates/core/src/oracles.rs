//! Independent exact evaluators.
//!
//! [`dp_eval`] fills the total-probability recursion cell by cell from the
//! boundary rows; [`g_recursion`] and [`p_rule3_via_g`] rebuild Rule III from
//! the sum over removal sequences. Neither path calls into
//! [`crate::closed_form`].

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::closed_form::Rule;
use crate::error::{Error, Result};
use crate::exact_arith::{falling_ratio, Rational};

/// Exact table of `p^(k)(r, w)` for `0 <= r <= rmax`, `0 <= w <= wmax`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpTable {
    pub rule: Rule,
    pub k: u64,
    values: Vec<Vec<Rational>>,
}

impl DpTable {
    pub fn get(&self, r: u64, w: u64) -> &Rational {
        &self.values[r as usize][w as usize]
    }

    /// Rows indexed by `r`, columns by `w`.
    pub fn values(&self) -> &[Vec<Rational>] {
        &self.values
    }

    pub fn rmax(&self) -> u64 {
        self.values.len() as u64 - 1
    }

    pub fn wmax(&self) -> u64 {
        self.values[0].len() as u64 - 1
    }

    /// Re-checks every interior cell against its two neighbours.
    pub fn recursion_residual_is_zero(&self) -> bool {
        (1..=self.rmax()).all(|r| {
            (1..=self.wmax()).all(|w| {
                let (to_r, to_w) = step_weights(self.rule, r, w);
                let rhs = to_r * self.get(r - 1, w) + to_w * self.get(r, w - 1);
                rhs == *self.get(r, w)
            })
        })
    }

    /// Checks the boundary row and column against the rule's conventions.
    pub fn boundaries_hold(&self) -> bool {
        (0..=self.wmax()).all(|w| *self.get(0, w) == boundary(self.rule, self.k, 0, w))
            && (0..=self.rmax()).all(|r| *self.get(r, 0) == boundary(self.rule, self.k, r, 0))
    }
}

/// Weights of `p(r-1, w)` and `p(r, w-1)` after conditioning on the first removal.
fn step_weights(rule: Rule, r: u64, w: u64) -> (Rational, Rational) {
    let total = BigInt::from(r + w);
    match rule {
        Rule::P2 => (
            Rational::new(BigInt::from(r), total.clone()),
            Rational::new(BigInt::from(w), total),
        ),
        _ => {
            let sq = &total * &total;
            (
                Rational::new(BigInt::from(r * r), sq.clone()),
                Rational::new(BigInt::from(w * w + 2 * r * w), sq),
            )
        }
    }
}

fn indicator(cond: bool) -> Rational {
    if cond {
        Rational::one()
    } else {
        Rational::zero()
    }
}

/// Boundary value on the `r = 0` or `w = 0` edge.
fn boundary(rule: Rule, k: u64, r: u64, w: u64) -> Rational {
    match rule {
        // no reds: game over with all w whites left; no whites: k = 0
        Rule::P2 | Rule::RuleIII => {
            if r == 0 {
                indicator(w == k)
            } else {
                indicator(k == 0)
            }
        }
        // no whites: game over with all r reds left; no reds: k = 0
        _ => {
            if w == 0 {
                indicator(r == k)
            } else {
                indicator(k == 0)
            }
        }
    }
}

/// Fills the recursion table for one `k`, row by row.
pub fn dp_eval(rule: Rule, k: u64, rmax: u64, wmax: u64) -> Result<DpTable> {
    if !matches!(rule, Rule::P2 | Rule::RuleIII | Rule::RuleIV) {
        return Err(Error::UnsupportedRule(rule));
    }
    let (rows, cols) = (rmax as usize + 1, wmax as usize + 1);
    let mut values = vec![vec![Rational::zero(); cols]; rows];
    for r in 0..rows {
        for w in 0..cols {
            let (ru, wu) = (r as u64, w as u64);
            values[r][w] = if r == 0 || w == 0 {
                boundary(rule, k, ru, wu)
            } else {
                let (to_r, to_w) = step_weights(rule, ru, wu);
                to_r * &values[r - 1][w] + to_w * &values[r][w - 1]
            };
        }
    }
    Ok(DpTable { rule, k, values })
}

/// Integer-valued `g^(k)(r, s)`: the sum over non-increasing red counts
/// `r >= r_1 >= ... >= r_s >= 1` of `prod_i (2 r_i + k + s + 1 - i)`.
///
/// Computed from `g(r,s) = g(r-1,s) + (2r+k+s) g(r,s-1)` anchored at
/// `g(1,s) = (k+s+2)!/(k+2)!`, `g(r,1) = r(r+k+2)` and `g(r,0) = 1`.
pub fn g_recursion(k: u64, r: u64, s: u64) -> Result<BigInt> {
    if r == 0 {
        return Err(Error::InvalidArgument("g_recursion requires r >= 1".into()));
    }
    let (rows, cols) = (r as usize + 1, s as usize + 1);
    // table[r'][s'] for 1 <= r' <= r; row 0 unused
    let mut table = vec![vec![BigInt::zero(); cols]; rows];
    for rp in 1..rows {
        for sp in 0..cols {
            let (ru, su) = (rp as u64, sp as u64);
            table[rp][sp] = if sp == 0 {
                BigInt::one()
            } else if rp == 1 {
                crate::exact_arith::product_range(k + 3, k + su + 2)
            } else if sp == 1 {
                BigInt::from(ru * (ru + k + 2))
            } else {
                &table[rp - 1][sp] + BigInt::from(2 * ru + k + su) * &table[rp][sp - 1]
            };
        }
    }
    Ok(table[r as usize][s as usize].clone())
}

/// Rule III assembled as `(r!)^2 k! w! / ((r+w)!)^2 * g^(k)(r, w-k)`.
pub fn p_rule3_via_g(r: u64, w: u64, k: u64) -> Result<Rational> {
    if r == 0 || k > w {
        return Err(Error::InvalidArgument(
            "p_rule3_via_g requires r >= 1 and k <= w".into(),
        ));
    }
    let r_over = falling_ratio(r, r + w);
    let prefactor = &r_over * &r_over * falling_ratio(k, 0) * falling_ratio(w, 0);
    Ok(prefactor * Rational::from_integer(g_recursion(k, r, w - k)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::{binomial_int, frac, int, product_range};

    /// Direct enumeration of the non-increasing sequences in the definition of g.
    fn g_enumerate(k: u64, r: u64, s: u64) -> BigInt {
        fn go(k: u64, s: u64, i: u64, upper: u64) -> BigInt {
            if i > s {
                return BigInt::one();
            }
            (1..=upper)
                .map(|ri| BigInt::from(2 * ri + k + s + 1 - i) * go(k, s, i + 1, ri))
                .sum()
        }
        go(k, s, 1, r)
    }

    fn g_closed(k: u64, r: u64, s: u64) -> BigInt {
        binomial_int(r + s - 1, s as i64) * product_range(r + k + 2, r + s + k + 1)
    }

    #[test]
    fn dp_examples() {
        let t = dp_eval(Rule::RuleIII, 0, 1, 1).unwrap();
        assert_eq!(*t.get(1, 1), frac(3, 4));
        let t = dp_eval(Rule::RuleIV, 2, 2, 0).unwrap();
        assert_eq!(*t.get(2, 0), int(1));
        let t = dp_eval(Rule::P2, 1, 2, 2).unwrap();
        assert_eq!(*t.get(2, 2), frac(1, 3));
        assert!(dp_eval(Rule::P3, 0, 2, 2).is_err());
    }

    #[test]
    fn dp_rows_sum_to_one() {
        for rule in [Rule::P2, Rule::RuleIII, Rule::RuleIV] {
            let tables: Vec<_> = (0..=8).map(|k| dp_eval(rule, k, 8, 8).unwrap()).collect();
            for r in 0..=8 {
                for w in 0..=8 {
                    let total: Rational = tables.iter().map(|t| t.get(r, w).clone()).sum();
                    assert_eq!(total, int(1), "{rule} r={r} w={w}");
                }
            }
        }
    }

    #[test]
    fn dp_residual_and_boundaries() {
        for rule in [Rule::P2, Rule::RuleIII, Rule::RuleIV] {
            for k in 0..4 {
                let t = dp_eval(rule, k, 10, 9).unwrap();
                assert!(t.recursion_residual_is_zero());
                assert!(t.boundaries_hold());
                assert_eq!((t.rmax(), t.wmax()), (10, 9));
            }
        }
    }

    #[test]
    fn g_anchor_values() {
        for k in 0..6 {
            for r in 1..8 {
                assert_eq!(g_recursion(k, r, 1).unwrap(), BigInt::from(r * (r + k + 2)));
                assert_eq!(g_recursion(k, r, 0).unwrap(), BigInt::one());
            }
        }
        assert_eq!(g_recursion(0, 2, 2).unwrap(), BigInt::from(60));
        assert_eq!(g_recursion(1, 3, 2).unwrap(), BigInt::from(252));
        assert!(g_recursion(0, 0, 2).is_err());
    }

    #[test]
    fn g_matches_sequence_enumeration() {
        for k in 0..4 {
            for r in 1..6 {
                for s in 0..5 {
                    assert_eq!(
                        g_recursion(k, r, s).unwrap(),
                        g_enumerate(k, r, s),
                        "k={k} r={r} s={s}"
                    );
                }
            }
        }
    }

    #[test]
    fn g_matches_closed_form() {
        for k in 0..=10 {
            for r in 1..=20 {
                for s in 0..=20 {
                    assert_eq!(
                        g_recursion(k, r, s).unwrap(),
                        g_closed(k, r, s),
                        "k={k} r={r} s={s}"
                    );
                }
            }
        }
    }

    #[test]
    fn via_g_examples() {
        assert_eq!(p_rule3_via_g(1, 1, 0).unwrap(), frac(3, 4));
        let t = dp_eval(Rule::RuleIII, 1, 2, 3).unwrap();
        assert_eq!(p_rule3_via_g(2, 3, 1).unwrap(), *t.get(2, 3));
        for (r, w) in [(1u64, 1u64), (3, 4), (5, 2)] {
            let ansatz = falling_ratio(r, r + w) * falling_ratio(w, 0);
            assert_eq!(p_rule3_via_g(r, w, w).unwrap(), &ansatz * &ansatz);
        }
        assert!(p_rule3_via_g(0, 1, 0).is_err());
        assert!(p_rule3_via_g(2, 1, 2).is_err());
    }
}
