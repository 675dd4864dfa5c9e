use num_traits::ToPrimitive;
use urnpde::closed_form::pmf;
use urnpde::simulator::{run_game, run_problem4, simulate, simulate_streams, stream_rng, LastBall};
use urnpde::{Rule, UrnSpec};

const TOL: f64 = 0.005;

#[test]
fn stream_count_does_not_break_accuracy() {
    let spec = UrnSpec::new(4, 5, Rule::RuleIV);
    for streams in [1, 3, 8, 16] {
        let report = simulate_streams(spec, 400_000, 17, streams).unwrap();
        assert_eq!(report.counts.iter().sum::<u64>(), 400_000);
        assert!(
            report.max_abs_dev < TOL,
            "streams={streams} dev={}",
            report.max_abs_dev
        );
    }
}

#[test]
fn merged_counts_equal_sum_of_single_streams() {
    let spec = UrnSpec::new(3, 3, Rule::RuleIII);
    let whole = simulate_streams(spec, 10_003, 5, 4).unwrap();
    let mut parts = vec![0u64; whole.counts.len()];
    for j in 0..4u64 {
        let n = 10_003 / 4 + u64::from(j < 10_003 % 4);
        let mut rng = stream_rng(5, j);
        for _ in 0..n {
            parts[run_game(spec, &mut rng).unwrap() as usize] += 1;
        }
    }
    assert_eq!(parts, whole.counts);
}

#[test]
fn p2_and_p3_match_exact() {
    let report = simulate(UrnSpec::new(4, 6, Rule::P2), 1_000_000, 8).unwrap();
    assert!(report.max_abs_dev < TOL);
    let report = simulate(UrnSpec::new(3, 4, Rule::P3), 1_000_000, 8).unwrap();
    assert!(report.max_abs_dev < TOL);
    assert_eq!(report.counts.len(), 2);
}

#[test]
fn discard_game_is_fair_for_small_urns() {
    let mut rng = stream_rng(77, 0);
    let n = 200_000;
    let black = (0..n)
        .filter(|_| run_problem4(2, 5, &mut rng).unwrap() == LastBall::Black)
        .count();
    assert!((black as f64 / n as f64 - 0.5).abs() < 0.01);
}

#[test]
fn exact_reference_matches_pmf_floats() {
    let spec = UrnSpec::new(5, 7, Rule::RuleIII);
    let report = simulate(spec, 1000, 1).unwrap();
    let probs: Vec<f64> = pmf(spec)
        .unwrap()
        .probs
        .iter()
        .map(|p| p.to_f64().unwrap())
        .collect();
    assert_eq!(report.exact, probs);
}
