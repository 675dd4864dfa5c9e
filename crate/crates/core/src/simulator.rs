//! Monte Carlo playouts of the urn games.
//!
//! The urn is two counters. A uniform draw is a single `gen_range(0..r + w)`;
//! values below `r` are red (or black in the discard game).
//!
//! Runs are split over independent ChaCha8 streams: stream `j` is
//! `ChaCha8Rng::seed_from_u64(seed)` with `set_stream(j)`. Trials are dealt
//! out evenly and the first `trials % streams` streams take one extra.
//! Per-stream counts are summed, so the merged report does not depend on
//! scheduling.

use num_traits::ToPrimitive;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::closed_form::{p3_last_white, pmf, Rule, UrnSpec};
use crate::error::{Error, Result};

pub const DEFAULT_STREAMS: u64 = 8;

/// Human-readable description of how per-stream generators are derived.
pub const STREAM_RULE: &str =
    "ChaCha8Rng::seed_from_u64(seed) then set_stream(j) for j in 0..streams; \
     stream j runs trials/streams trials plus one if j < trials % streams";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Removal {
    Red,
    White,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LastBall {
    Black,
    White,
}

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn draw_is_red<R: Rng + ?Sized>(r: u64, w: u64, rng: &mut R) -> bool {
    rng.gen_range(0..r + w) < r
}

/// One removal under the replacement mechanic: a white first draw is
/// removed, a red first draw goes back and the second draw is removed.
pub fn step_removal<R: Rng + ?Sized>(r: u64, w: u64, rng: &mut R) -> Result<Removal> {
    if r + w == 0 {
        return Err(Error::EmptyUrn);
    }
    if !draw_is_red(r, w, rng) {
        return Ok(Removal::White);
    }
    Ok(if draw_is_red(r, w, rng) {
        Removal::Red
    } else {
        Removal::White
    })
}

fn apply(removal: Removal, r: &mut u64, w: &mut u64) {
    match removal {
        Removal::Red => *r -= 1,
        Removal::White => *w -= 1,
    }
}

/// Plays one game and returns the number of balls of the surviving colour.
pub fn run_game<R: Rng + ?Sized>(spec: UrnSpec, rng: &mut R) -> Result<u64> {
    let (mut r, mut w) = (spec.r, spec.w);
    match spec.rule {
        Rule::P2 => {
            while r > 0 {
                if draw_is_red(r, w, rng) {
                    r -= 1;
                } else {
                    w -= 1;
                }
            }
            Ok(w)
        }
        Rule::RuleIII => {
            while r > 0 {
                apply(step_removal(r, w, rng)?, &mut r, &mut w);
            }
            Ok(w)
        }
        Rule::RuleIV => {
            while w > 0 {
                apply(step_removal(r, w, rng)?, &mut r, &mut w);
            }
            Ok(r)
        }
        other => Err(Error::UnsupportedRule(other)),
    }
}

/// Replacement removals until a single ball remains; `true` if it is white.
pub fn run_last_ball_white<R: Rng + ?Sized>(r: u64, w: u64, rng: &mut R) -> Result<bool> {
    let (mut r, mut w) = (r, w);
    if r + w == 0 {
        return Err(Error::EmptyUrn);
    }
    while r + w > 1 {
        apply(step_removal(r, w, rng)?, &mut r, &mut w);
    }
    Ok(w == 1)
}

/// Discard a uniform ball, then keep discarding while the colour repeats;
/// a colour change puts the ball back and starts over.
pub fn run_problem4<R: Rng + ?Sized>(m: u64, n: u64, rng: &mut R) -> Result<LastBall> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument(
            "the discard game needs m >= 1 black and n >= 1 white".into(),
        ));
    }
    let (mut black, mut white) = (m, n);
    'restart: while black + white > 1 {
        let mut black_run = draw_is_red(black, white, rng);
        if black_run {
            black -= 1;
        } else {
            white -= 1;
        }
        while black + white > 1 {
            let is_black = draw_is_red(black, white, rng);
            if is_black != black_run {
                continue 'restart;
            }
            if is_black {
                black -= 1;
            } else {
                white -= 1;
            }
            black_run = is_black;
        }
    }
    Ok(if black == 1 {
        LastBall::Black
    } else {
        LastBall::White
    })
}

/// Outcome index of one trial: `k` for distribution rules, 1 for a white
/// last ball under P3, 1 for a black last ball under P4.
fn play_once<R: Rng + ?Sized>(spec: UrnSpec, rng: &mut R) -> Result<usize> {
    Ok(match spec.rule {
        Rule::P3 => run_last_ball_white(spec.r, spec.w, rng)? as usize,
        Rule::P4 => (run_problem4(spec.r, spec.w, rng)? == LastBall::Black) as usize,
        _ => run_game(spec, rng)? as usize,
    })
}

/// Exact outcome probabilities as floats, indexed like the counts.
pub fn exact_reference(spec: UrnSpec) -> Result<Vec<f64>> {
    let to_f64 = |x: &crate::Rational| x.to_f64().unwrap_or(f64::NAN);
    match spec.rule {
        Rule::P3 => {
            let white = to_f64(&p3_last_white(spec.r, spec.w));
            Ok(vec![1.0 - white, white])
        }
        Rule::P4 => Ok(vec![0.5, 0.5]),
        _ => Ok(pmf(spec)?.probs.iter().map(to_f64).collect()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub spec: UrnSpec,
    pub trials: u64,
    pub seed: u64,
    pub streams: u64,
    pub stream_rule: String,
    pub counts: Vec<u64>,
    pub empirical: Vec<f64>,
    pub exact: Vec<f64>,
    pub max_abs_dev: f64,
}

impl SimReport {
    /// Outcomes with the largest count.
    pub fn empirical_argmax(&self) -> Vec<u64> {
        let max = self.counts.iter().copied().max().unwrap_or(0);
        (0..self.counts.len() as u64)
            .filter(|&k| self.counts[k as usize] == max)
            .collect()
    }

    pub fn deviations(&self) -> Vec<f64> {
        self.empirical
            .iter()
            .zip(&self.exact)
            .map(|(e, x)| e - x)
            .collect()
    }
}

pub fn simulate(spec: UrnSpec, trials: u64, seed: u64) -> Result<SimReport> {
    simulate_streams(spec, trials, seed, DEFAULT_STREAMS)
}

pub fn simulate_streams(spec: UrnSpec, trials: u64, seed: u64, streams: u64) -> Result<SimReport> {
    if trials == 0 || streams == 0 {
        return Err(Error::InvalidArgument(
            "trials and streams must be positive".into(),
        ));
    }
    let exact = exact_reference(spec)?;
    let width = exact.len();

    let per_stream: Vec<Vec<u64>> = (0..streams)
        .into_par_iter()
        .map(|j| {
            let n = trials / streams + u64::from(j < trials % streams);
            let mut rng = stream_rng(seed, j);
            let mut counts = vec![0u64; width];
            for _ in 0..n {
                counts[play_once(spec, &mut rng)?] += 1;
            }
            Ok(counts)
        })
        .collect::<Result<_>>()?;

    let mut counts = vec![0u64; width];
    for c in &per_stream {
        for (acc, x) in counts.iter_mut().zip(c) {
            *acc += x;
        }
    }
    let empirical: Vec<f64> = counts.iter().map(|&c| c as f64 / trials as f64).collect();
    let max_abs_dev = empirical
        .iter()
        .zip(&exact)
        .map(|(e, x)| (e - x).abs())
        .fold(0.0, f64::max);

    Ok(SimReport {
        spec,
        trials,
        seed,
        streams,
        stream_rule: STREAM_RULE.to_string(),
        counts,
        empirical,
        exact,
        max_abs_dev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    #[test]
    fn step_removal_trivial_cases() {
        let mut rng = stream_rng(1, 0);
        for _ in 0..1000 {
            assert_eq!(step_removal(0, 3, &mut rng).unwrap(), Removal::White);
            assert_eq!(step_removal(3, 0, &mut rng).unwrap(), Removal::Red);
        }
        assert_eq!(step_removal(0, 0, &mut rng), Err(Error::EmptyUrn));
    }

    #[test]
    fn step_frequencies_pass_chi_square() {
        let critical = ChiSquared::new(1.0).unwrap().inverse_cdf(1.0 - 1e-6);
        for (i, (r, w)) in [(1u64, 1u64), (3, 5), (7, 3)].into_iter().enumerate() {
            let mut rng = stream_rng(2024, i as u64);
            let n = 1_000_000u64;
            let reds = (0..n)
                .filter(|_| step_removal(r, w, &mut rng).unwrap() == Removal::Red)
                .count() as f64;
            let p = (r * r) as f64 / ((r + w) * (r + w)) as f64;
            let (e_red, e_white) = (n as f64 * p, n as f64 * (1.0 - p));
            let stat =
                (reds - e_red).powi(2) / e_red + (n as f64 - reds - e_white).powi(2) / e_white;
            assert!(stat < critical, "({r},{w}) chi2={stat} critical={critical}");
            if (r, w) == (1, 1) {
                assert!((reds / n as f64 - 0.25).abs() < 0.005);
            }
        }
    }

    #[test]
    fn run_game_trivial_cases() {
        let mut rng = stream_rng(3, 0);
        for _ in 0..100 {
            assert_eq!(
                run_game(UrnSpec::new(0, 5, Rule::RuleIII), &mut rng).unwrap(),
                5
            );
            assert_eq!(
                run_game(UrnSpec::new(4, 0, Rule::RuleIV), &mut rng).unwrap(),
                4
            );
        }
        assert!(run_game(UrnSpec::new(1, 1, Rule::P3), &mut rng).is_err());
    }

    #[test]
    fn problem4_rejects_empty_colour() {
        let mut rng = stream_rng(0, 0);
        assert!(run_problem4(1, 0, &mut rng).is_err());
        assert!(run_problem4(0, 2, &mut rng).is_err());
    }

    #[test]
    fn simulate_is_deterministic() {
        let spec = UrnSpec::new(4, 6, Rule::RuleIII);
        let a = simulate(spec, 20_001, 99).unwrap();
        let b = simulate(spec, 20_001, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.counts.iter().sum::<u64>(), 20_001);
        let c = simulate(spec, 20_001, 100).unwrap();
        assert_ne!(a.counts, c.counts);
    }

    #[test]
    fn concentrated_when_no_reds() {
        let report = simulate(UrnSpec::new(0, 4, Rule::RuleIII), 1000, 5).unwrap();
        assert_eq!(report.counts, vec![0, 0, 0, 0, 1000]);
        assert_eq!(report.max_abs_dev, 0.0);
    }

    #[test]
    fn small_rule3_game_matches() {
        let report = simulate(UrnSpec::new(1, 1, Rule::RuleIII), 200_000, 11).unwrap();
        assert!((report.empirical[0] - 0.75).abs() < 0.01);
    }

    #[test]
    fn report_invariants() {
        let report = simulate_streams(UrnSpec::new(3, 3, Rule::P2), 12_345, 7, 5).unwrap();
        assert_eq!(report.counts.iter().sum::<u64>(), 12_345);
        for (c, e) in report.counts.iter().zip(&report.empirical) {
            assert_eq!(*e, *c as f64 / 12_345.0);
        }
        let dev = report
            .deviations()
            .iter()
            .fold(0.0f64, |m, d| m.max(d.abs()));
        assert_eq!(dev, report.max_abs_dev);
    }
}
