//! Closed-form remaining-ball distributions.
//!
//! Boundary conventions are explicit integer case analysis: an empty red
//! pile under Rule III (or an empty white pile under Rule IV) means the game
//! is already over, and `k` outside the support has probability zero.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_arith::{
    exact_sqrt, falling_ratio, floor_sqrt_ratio, frac, hyp_terminating, int, Rational,
};

/// Which game is played.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    /// Plain uniform removals until the reds are gone; `k` whites remain.
    #[serde(rename = "p2")]
    P2,
    /// Replacement removals until one ball is left; is it white?
    #[serde(rename = "p3")]
    P3,
    /// Replacement removals until the reds are gone; `k` whites remain.
    #[serde(rename = "iii")]
    RuleIII,
    /// Replacement removals until the whites are gone; `k` reds remain.
    #[serde(rename = "iv")]
    RuleIV,
    /// Discard-until-colour-change game on `m` black and `n` white balls.
    #[serde(rename = "p4")]
    P4,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::P2 => "p2",
            Rule::P3 => "p3",
            Rule::RuleIII => "iii",
            Rule::RuleIV => "iv",
            Rule::P4 => "p4",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "p2" => Ok(Rule::P2),
            "p3" => Ok(Rule::P3),
            "iii" | "rule3" | "ruleiii" => Ok(Rule::RuleIII),
            "iv" | "rule4" | "ruleiv" => Ok(Rule::RuleIV),
            "p4" => Ok(Rule::P4),
            other => Err(Error::InvalidArgument(format!("unknown rule `{other}`"))),
        }
    }
}

/// Initial contents of the urn and the game played on it.
///
/// For [`Rule::P4`] `r` holds the black count `m` and `w` the white count `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UrnSpec {
    pub r: u64,
    pub w: u64,
    pub rule: Rule,
}

impl UrnSpec {
    pub fn new(r: u64, w: u64, rule: Rule) -> Self {
        Self { r, w, rule }
    }

    /// Largest possible `k` for the distribution-valued rules.
    pub fn max_k(&self) -> u64 {
        match self.rule {
            Rule::P2 | Rule::RuleIII => self.w,
            Rule::RuleIV => self.r,
            Rule::P3 | Rule::P4 => 1,
        }
    }
}

/// Exact distribution of the remaining count `k = 0..=K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PmfOverK {
    pub spec: UrnSpec,
    pub probs: Vec<Rational>,
}

impl PmfOverK {
    pub fn total(&self) -> Rational {
        self.probs.iter().sum()
    }

    /// Indices attaining the maximum probability.
    pub fn argmax(&self) -> BTreeSet<u64> {
        let Some(max) = self.probs.iter().max() else {
            return BTreeSet::new();
        };
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| *p == max)
            .map(|(k, _)| k as u64)
            .collect()
    }

    /// `sum_k probs[k] z^k`, evaluated term by term.
    pub fn eval_generating_fn(&self, z: &Rational) -> Rational {
        let mut power = Rational::one();
        let mut sum = Rational::zero();
        for p in &self.probs {
            sum += p * &power;
            power *= z;
        }
        sum
    }
}

fn delta(i: u64, j: u64) -> Rational {
    if i == j {
        Rational::one()
    } else {
        Rational::zero()
    }
}

fn ratio_u(num: u64, den: u64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Plain game: `r (r+w-k-1)! w! / ((r+w)! (w-k)!)`.
pub fn p2(r: u64, w: u64, k: u64) -> Rational {
    if r == 0 {
        return delta(w, k);
    }
    if k > w {
        return Rational::zero();
    }
    int(r as i64) * falling_ratio(r + w - k - 1, r + w) * falling_ratio(w, w - k)
}

/// Probability that the last ball left is white when every ball but one is
/// removed under the replacement mechanic.
pub fn p3_last_white(r: u64, w: u64) -> Rational {
    if r == 0 && w == 0 {
        return Rational::zero();
    }
    ratio_u(w, (w + r) * (1 + r))
}

/// Rule III: probability that `k` whites remain once the reds are exhausted.
pub fn p_rule3(r: u64, w: u64, k: u64) -> Rational {
    if r == 0 {
        return delta(w, k);
    }
    if w == 0 {
        return delta(0, k);
    }
    if k > w {
        return Rational::zero();
    }
    rule3_rescaling(r, w, k) * p2(r, w, k)
}

/// `k! r! (r+w+1) / (r+k+1)!`, the factor separating Rule III from the plain game.
pub fn rule3_rescaling(r: u64, w: u64, k: u64) -> Rational {
    falling_ratio(k, 0) * falling_ratio(r, r + k + 1) * int((r + w + 1) as i64)
}

/// Rule IV: probability that `k` reds remain once the whites are exhausted.
pub fn p_rule4(r: u64, w: u64, k: u64) -> Rational {
    if w == 0 {
        return delta(r, k);
    }
    if r == 0 {
        return delta(0, k);
    }
    if k > r {
        return Rational::zero();
    }
    int((2 * k + 1) as i64)
        * falling_ratio(r, r + k + 1)
        * falling_ratio(r + w + k, r + w)
        * int(w as i64)
        * falling_ratio(r, r - k)
        * falling_ratio(r + w - k - 1, r + w)
}

/// Full distribution over `k` for the distribution-valued rules.
pub fn pmf(spec: UrnSpec) -> Result<PmfOverK> {
    let eval: fn(u64, u64, u64) -> Rational = match spec.rule {
        Rule::P2 => p2,
        Rule::RuleIII => p_rule3,
        Rule::RuleIV => p_rule4,
        other => return Err(Error::UnsupportedRule(other)),
    };
    let probs = (0..=spec.max_k())
        .map(|k| eval(spec.r, spec.w, k))
        .collect();
    Ok(PmfOverK { spec, probs })
}

/// `r/(r+w) * 2F1(1, -w; 1-r-w; z)`.
pub fn gen_fn_p2(r: u64, w: u64, z: &Rational) -> Result<Rational> {
    if r == 0 {
        return Err(Error::InvalidArgument("gen_fn_p2 requires r >= 1".into()));
    }
    let (ri, wi) = (r as i64, w as i64);
    let f = hyp_terminating(&[int(1), int(-wi)], &[int(1 - ri - wi)], z)?;
    Ok(frac(ri, ri + wi) * f)
}

/// `(1+r+w)/(1+r) * r/(r+w) * 3F2(1, 1, -w; 2+r, 1-r-w; z)`.
pub fn gen_fn_rule3(r: u64, w: u64, z: &Rational) -> Result<Rational> {
    if r == 0 || w == 0 {
        return Err(Error::InvalidArgument(
            "gen_fn_rule3 requires r >= 1 and w >= 1".into(),
        ));
    }
    let (ri, wi) = (r as i64, w as i64);
    let f = hyp_terminating(
        &[int(1), int(1), int(-wi)],
        &[int(2 + ri), int(1 - ri - wi)],
        z,
    )?;
    Ok(frac(1 + ri + wi, 1 + ri) * frac(ri, ri + wi) * f)
}

/// Rule IV generating function as a combination of two `3F2` sums:
///
/// `w/((1+r)(r+w)) [3F2(1,-r,1+r+w; 2+r,1-r-w; z)
///   + 2r(1+r+w)/((2+r)(r+w-1)) z 3F2(2,1-r,2+r+w; 3+r,2-r-w; z)]`.
pub fn gen_fn_rule4(r: u64, w: u64, z: &Rational) -> Result<Rational> {
    if r == 0 || w == 0 {
        return Err(Error::InvalidArgument(
            "gen_fn_rule4 requires r >= 1 and w >= 1".into(),
        ));
    }
    let (ri, wi) = (r as i64, w as i64);
    let first = hyp_terminating(
        &[int(1), int(-ri), int(1 + ri + wi)],
        &[int(2 + ri), int(1 - ri - wi)],
        z,
    )?;
    let second = hyp_terminating(
        &[int(2), int(1 - ri), int(2 + ri + wi)],
        &[int(3 + ri), int(2 - ri - wi)],
        z,
    )?;
    let coeff = frac(2 * ri * (1 + ri + wi), (2 + ri) * (ri + wi - 1));
    Ok(frac(wi, (1 + ri) * (ri + wi)) * (first + coeff * z * second))
}

/// Mode of the Rule III pmf: `{w}` when there are no reds, otherwise `{0}`.
pub fn argmax_rule3(r: u64, w: u64) -> BTreeSet<u64> {
    BTreeSet::from([if r == 0 { w } else { 0 }])
}

/// Mode(s) of the Rule IV pmf.
///
/// With `k0^2 = (1+r)(r+w)/(2w-1)`, the mode is `floor(k0)` unless `k0` is an
/// integer, in which case `k0-1` and `k0` tie.
pub fn argmax_rule4(r: u64, w: u64) -> BTreeSet<u64> {
    if w == 0 {
        return BTreeSet::from([r]);
    }
    if r == 0 {
        return BTreeSet::from([0]);
    }
    if w == 1 {
        return BTreeSet::from([r]);
    }
    let num = BigInt::from(1 + r) * BigInt::from(r + w);
    let den = BigInt::from(2 * w - 1);
    let to_u64 = |x: BigInt| u64::try_from(x).expect("mode index fits in u64");
    if (&num % &den).is_zero() {
        if let Some(k0) = exact_sqrt(&(&num / &den)) {
            let k0 = to_u64(k0);
            return BTreeSet::from([k0 - 1, k0]);
        }
    }
    BTreeSet::from([to_u64(floor_sqrt_ratio(&num, &den))])
}

/// Which parameter is taken large in an asymptotic form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "large-r")]
    LargeR,
    #[serde(rename = "large-w")]
    LargeW,
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "large-r" | "larger" | "r" => Ok(Regime::LargeR),
            "large-w" | "largew" | "w" => Ok(Regime::LargeW),
            other => Err(Error::InvalidArgument(format!("unknown regime `{other}`"))),
        }
    }
}

/// Leading-order Rule III probability.
///
/// * `LargeR`: `k! (delta_0^k + w (w-1) ... (w-k+1)) / r^(2k)`, where the
///   empty product at `k = 0` counts as zero.
/// * `LargeW`: `k! r r! / (r+k+1)!`, independent of `w`.
pub fn asym_rule3(r: u64, w: u64, k: u64, regime: Regime) -> Rational {
    match regime {
        Regime::LargeR => {
            if k == 0 {
                return Rational::one();
            }
            let falling = if k > w {
                Rational::zero()
            } else {
                falling_ratio(w, w - k)
            };
            let r2k = Rational::from_integer(BigInt::from(r).pow(2 * k as u32));
            falling_ratio(k, 0) * falling / r2k
        }
        Regime::LargeW => falling_ratio(k, 0) * int(r as i64) * falling_ratio(r, r + k + 1),
    }
}

/// Leading-order Rule IV probability.
///
/// * `LargeR`: `(2k+1) w / r^2`.
/// * `LargeW`: `(2k+1) (r!)^2 / ((r-k)! (r+k+1)!)`.
pub fn asym_rule4(r: u64, w: u64, k: u64, regime: Regime) -> Rational {
    let odd = int((2 * k + 1) as i64);
    match regime {
        Regime::LargeR => odd * ratio_u(w, r * r),
        Regime::LargeW => {
            if k > r {
                return Rational::zero();
            }
            odd * falling_ratio(r, r - k) * falling_ratio(r, r + k + 1)
        }
    }
}
