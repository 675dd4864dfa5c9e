//! Exact rational arithmetic and combinatorial helpers.
//!
//! Every probability and series coefficient in the crate is a [`Rational`].
//! Factorial-heavy expressions are assembled from [`falling_ratio`] so that
//! only the short product between the two arguments is ever formed.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision fraction, always in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Upper bound on the number of terms a terminating series may have.
pub const MAX_HYP_TERMS: u64 = 1_000_000;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Product `lo * (lo+1) * ... * hi`; empty (`lo > hi`) gives 1.
pub fn product_range(lo: u64, hi: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in lo..=hi {
        acc *= i;
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    product_range(1, n)
}

/// `C(n, k)`, zero outside `0 <= k <= n`.
pub fn binomial(n: u64, k: i64) -> Rational {
    Rational::from_integer(binomial_int(n, k))
}

pub(crate) fn binomial_int(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigInt::one();
    for i in 1..=k {
        // acc * (n-k+i) is always divisible by i here
        acc = acc * (n - k + i) / i;
    }
    acc
}

/// `a! / b!` as the product of the integers strictly between them.
pub fn falling_ratio(a: u64, b: u64) -> Rational {
    if a >= b {
        Rational::from_integer(product_range(b + 1, a))
    } else {
        Rational::new(BigInt::one(), product_range(a + 1, b))
    }
}

/// Rising factorial `x (x+1) ... (x+n-1)`.
pub fn pochhammer(x: &Rational, n: u64) -> Rational {
    let mut acc = Rational::one();
    let mut term = x.clone();
    for _ in 0..n {
        if term.is_zero() {
            return Rational::zero();
        }
        acc *= &term;
        term += Rational::one();
    }
    acc
}

/// Returns `Some(n)` when `x = -n` for a non-negative integer `n`.
pub fn non_positive_integer(x: &Rational) -> Option<u64> {
    if x.is_integer() && !x.is_positive() {
        let n = -x.to_integer();
        u64::try_from(n).ok()
    } else {
        None
    }
}

/// Exact value of the terminating series `pFq(upper; lower; z)`.
///
/// The series stops at `j = n` where `-n` is the largest non-positive
/// integer among `upper`. A lower parameter that hits zero at or before that
/// term is an error.
pub fn hyp_terminating(upper: &[Rational], lower: &[Rational], z: &Rational) -> Result<Rational> {
    let n = upper
        .iter()
        .filter_map(non_positive_integer)
        .min()
        .ok_or(Error::NotTerminating)?;
    if n >= MAX_HYP_TERMS {
        return Err(Error::TooManyTerms {
            terms: n + 1,
            cap: MAX_HYP_TERMS,
        });
    }
    if z.is_zero() {
        return Ok(Rational::one());
    }

    let mut sum = Rational::one();
    let mut term = Rational::one();
    for j in 0..n {
        let shift = Rational::from_integer(BigInt::from(j));
        for (index, b) in lower.iter().enumerate() {
            let factor = b + &shift;
            if factor.is_zero() {
                return Err(Error::ZeroLowerParameter { index, term: j + 1 });
            }
            term /= factor;
        }
        for a in upper {
            term *= a + &shift;
        }
        term *= z;
        term /= Rational::from_integer(BigInt::from(j + 1));
        sum += &term;
    }
    Ok(sum)
}

/// Integer square root test on a non-negative big integer.
pub(crate) fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    let root = n.sqrt();
    (&root * &root == *n).then_some(root)
}

/// `floor(sqrt(num / den))` for non-negative `num` and positive `den`.
pub(crate) fn floor_sqrt_ratio(num: &BigInt, den: &BigInt) -> BigInt {
    num.div_floor(den).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64) -> Rational {
        int(n)
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(4, 2), r(6));
        assert_eq!(binomial(5, -1), r(0));
        assert_eq!(binomial(0, 0), r(1));
        assert_eq!(binomial(3, 4), r(0));
        assert_eq!(
            binomial(60, 30),
            Rational::from_integer("118264581564861424".parse().unwrap())
        );
    }

    #[test]
    fn falling_ratio_examples() {
        assert_eq!(falling_ratio(5, 3), r(20));
        assert_eq!(falling_ratio(3, 3), r(1));
        assert_eq!(falling_ratio(3, 5), frac(1, 20));
    }

    #[test]
    fn falling_ratio_reciprocal_grid() {
        for a in 0..=200 {
            for b in (0..=200).step_by(7) {
                assert_eq!(falling_ratio(a, b) * falling_ratio(b, a), r(1));
            }
        }
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(&r(1), 4), r(24));
        assert_eq!(pochhammer(&r(-2), 4), r(0));
        assert_eq!(pochhammer(&frac(1, 2), 2), frac(3, 4));
        assert_eq!(pochhammer(&frac(7, 3), 0), r(1));
    }

    #[test]
    fn pochhammer_of_one_is_factorial() {
        for n in 0..=50 {
            assert_eq!(pochhammer(&r(1), n), Rational::from_integer(factorial(n)));
        }
    }

    #[test]
    fn hyp_two_term_sum() {
        let v = hyp_terminating(&[r(-1), r(1), r(1)], &[r(2), r(2)], &r(1)).unwrap();
        assert_eq!(v, frac(3, 4));
    }

    #[test]
    fn hyp_at_zero_argument_is_one() {
        let v = hyp_terminating(&[r(-5), r(3)], &[r(-1)], &r(0)).unwrap();
        assert_eq!(v, r(1));
    }

    #[test]
    fn hyp_with_zero_upper_is_one() {
        for z in [r(-3), frac(1, 7), r(11)] {
            let v = hyp_terminating(&[r(0), r(4), frac(1, 2)], &[r(-2), r(5)], &z).unwrap();
            assert_eq!(v, r(1));
        }
    }

    #[test]
    fn hyp_normalisation_instance() {
        // (1+r+w)/(1+r) * r/(r+w) * 3F2(1,1,-w; 2+r, 1-r-w; 1) = 1 at r=2, w=1,
        // against a brute-force sum of the Rule III pmf terms.
        let (rr, w) = (2i64, 1i64);
        let f = hyp_terminating(&[r(1), r(1), r(-w)], &[r(2 + rr), r(1 - rr - w)], &r(1)).unwrap();
        let pref = frac(1 + rr + w, 1 + rr) * frac(rr, rr + w);
        assert_eq!(&pref * &f, r(1));
        let brute: Rational = (0..=w as u64)
            .map(|k| crate::closed_form::p_rule3(rr as u64, w as u64, k))
            .sum();
        assert_eq!(pref * f, brute);
    }

    #[test]
    fn hyp_errors() {
        assert_eq!(
            hyp_terminating(&[r(1), r(2)], &[r(3)], &r(1)),
            Err(Error::NotTerminating)
        );
        // lower -1 vanishes in the j=2 denominator while the series runs to j=3
        assert_eq!(
            hyp_terminating(&[r(-3)], &[r(-1)], &r(1)),
            Err(Error::ZeroLowerParameter { index: 0, term: 2 })
        );
        // lower -m with m >= n is fine
        assert!(hyp_terminating(&[r(-2)], &[r(-2)], &r(1)).is_ok());
        assert!(matches!(
            hyp_terminating(&[r(-2_000_000)], &[r(1)], &r(1)),
            Err(Error::TooManyTerms { .. })
        ));
    }

    #[test]
    fn sqrt_helpers() {
        assert_eq!(exact_sqrt(&BigInt::from(16)), Some(BigInt::from(4)));
        assert_eq!(exact_sqrt(&BigInt::from(15)), None);
        assert_eq!(
            floor_sqrt_ratio(&BigInt::from(220), &BigInt::from(19)),
            BigInt::from(3)
        );
    }

    proptest! {
        #[test]
        fn binomial_symmetry(n in 0u64..120, k in 0i64..120) {
            prop_assume!(k as u64 <= n);
            prop_assert_eq!(binomial(n, k), binomial(n, n as i64 - k));
        }

        #[test]
        fn binomial_pascal(n in 1u64..100, k in 1i64..100) {
            prop_assert_eq!(binomial(n, k), binomial(n - 1, k - 1) + binomial(n - 1, k));
        }
    }
}
