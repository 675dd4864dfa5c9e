use std::collections::BTreeSet;
use std::fmt::Display;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use urnpde::closed_form::{
    argmax_rule3, argmax_rule4, asym_rule3, asym_rule4, gen_fn_p2, gen_fn_rule3, gen_fn_rule4, p2,
    p3_last_white, p_rule3, p_rule4, pmf,
};
use urnpde::exact_arith::{frac, int};
use urnpde::oracles::{dp_eval, p_rule3_via_g};
use urnpde::series_verify::{
    rule3_total_via_unit_3f2, verify_identity_bio2, verify_identity_c1, verify_pde,
};
use urnpde::simulator::simulate_streams;
use urnpde::{Rational, Regime, Rule, UrnSpec};

use crate::record::{OutputRecord, Row, Status};

/// Largest accepted `--kmax` for `verify pde`.
pub const KMAX_LIMIT: u64 = 12;
/// Largest accepted `--order` for `verify pde`.
pub const ORDER_LIMIT: u64 = 40;
/// Largest accepted `--rmax`, `--wmax` and `--max` for the sweeps.
pub const GRID_LIMIT: u64 = 60;

pub const SIM_TOLERANCE: f64 = 0.005;

/// A request the command cannot serve; reported with exit status 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<urnpde::Error> for UsageError {
    fn from(e: urnpde::Error) -> Self {
        UsageError(e.to_string())
    }
}

type CmdResult = Result<OutputRecord, UsageError>;

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

fn set_string(set: &BTreeSet<u64>) -> String {
    set.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}

pub fn cmd_dist(rule: Rule, r: u64, w: u64) -> CmdResult {
    let mut rec = OutputRecord::new("dist")
        .param("rule", rule)
        .param("r", r)
        .param("w", w);
    match rule {
        Rule::P3 => {
            if r + w == 0 {
                return Err(usage("p3 needs at least one ball"));
            }
            rec.rows
                .push(Row::labelled("last-white").with_exact(&p3_last_white(r, w)));
        }
        Rule::P4 => return Err(usage("p4 has no exact table; use `simulate --rule p4`")),
        _ => {
            let dist = pmf(UrnSpec::new(r, w, rule))?;
            for (k, p) in dist.probs.iter().enumerate() {
                rec.rows
                    .push(Row::labelled("p").with_k(k as u64).with_exact(p));
            }
            let total = dist.total();
            let normalised = total == int(1);
            rec.rows.push(
                Row::labelled("total")
                    .with_exact(&total)
                    .with_check(normalised, "sum over k"),
            );
            let argmax = set_string(&dist.argmax());
            rec.rows
                .push(Row::labelled("argmax").with_check(true, argmax.clone()));
            rec.note("argmax", argmax);
        }
    }
    rec.settle_status();
    Ok(rec)
}

pub struct SimulateArgs {
    pub rule: Rule,
    pub r: Option<u64>,
    pub w: Option<u64>,
    pub m: Option<u64>,
    pub n: Option<u64>,
    pub trials: u64,
    pub seed: u64,
    pub streams: u64,
}

pub fn cmd_simulate(args: &SimulateArgs) -> CmdResult {
    if args.trials == 0 || args.streams == 0 {
        return Err(usage("--trials and --streams must be positive"));
    }
    let spec = match args.rule {
        Rule::P4 => {
            let (Some(m), Some(n)) = (args.m, args.n) else {
                return Err(usage("p4 needs --m and --n"));
            };
            if m == 0 || n == 0 {
                return Err(usage("p4 needs --m >= 1 and --n >= 1"));
            }
            UrnSpec::new(m, n, Rule::P4)
        }
        rule => {
            let (Some(r), Some(w)) = (args.r, args.w) else {
                return Err(usage(format!("{rule} needs --r and --w")));
            };
            UrnSpec::new(r, w, rule)
        }
    };
    let report = simulate_streams(spec, args.trials, args.seed, args.streams)?;

    let mut rec = OutputRecord::new("simulate")
        .param("rule", spec.rule)
        .param("trials", args.trials)
        .param("seed", args.seed)
        .param("streams", args.streams);
    rec = match spec.rule {
        Rule::P4 => rec.param("m", spec.r).param("n", spec.w),
        _ => rec.param("r", spec.r).param("w", spec.w),
    };

    let exact: Vec<Rational> = match spec.rule {
        Rule::P3 => {
            let white = p3_last_white(spec.r, spec.w);
            vec![int(1) - &white, white]
        }
        Rule::P4 => vec![frac(1, 2), frac(1, 2)],
        _ => pmf(spec)?.probs,
    };
    let mut push = |label: &str, k: Option<u64>, ix: usize| {
        let dev = report.empirical[ix] - report.exact[ix];
        let mut row = Row::labelled(label).with_exact(&exact[ix]);
        row.k = k;
        row.empirical = Some(report.empirical[ix]);
        row.deviation = Some(dev);
        row.passed = Some(dev.abs() < SIM_TOLERANCE);
        rec.rows.push(row);
    };
    match spec.rule {
        Rule::P3 => push("last-white", None, 1),
        Rule::P4 => push("last-black", None, 1),
        _ => (0..exact.len()).for_each(|k| push("p", Some(k as u64), k)),
    }

    rec.note("max_abs_dev", report.max_abs_dev);
    rec.note("tolerance", SIM_TOLERANCE);
    rec.note("stream_rule", &report.stream_rule);
    rec.note(
        "counts",
        report
            .counts
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(" "),
    );
    if !matches!(spec.rule, Rule::P3 | Rule::P4) {
        rec.note(
            "empirical_argmax",
            report
                .empirical_argmax()
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(" "),
        );
    }
    rec.status = Status::from_passed(report.max_abs_dev < SIM_TOLERANCE);
    Ok(rec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Target {
    Pde,
    Oracles,
    Identities,
    Genfn,
    All,
}

pub struct VerifyArgs {
    pub target: Target,
    pub kmax: u64,
    pub order: u64,
    pub rmax: u64,
    pub wmax: u64,
    pub max: u64,
}

fn check_bound(name: &str, value: u64, lo: u64, hi: u64) -> Result<(), UsageError> {
    if (lo..=hi).contains(&value) {
        Ok(())
    } else {
        Err(usage(format!(
            "--{name} must lie in {lo}..={hi}, got {value}"
        )))
    }
}

pub fn cmd_verify(args: &VerifyArgs) -> CmdResult {
    check_bound("kmax", args.kmax, 0, KMAX_LIMIT)?;
    check_bound("order", args.order, 1, ORDER_LIMIT)?;
    check_bound("rmax", args.rmax, 1, GRID_LIMIT)?;
    check_bound("wmax", args.wmax, 1, GRID_LIMIT)?;
    check_bound("max", args.max, 1, GRID_LIMIT)?;

    let target_name = format!("{:?}", args.target).to_lowercase();
    let mut rec = OutputRecord::new("verify").param("target", &target_name);
    let t = args.target;
    if matches!(t, Target::Pde | Target::All) {
        rec = rec.param("kmax", args.kmax).param("order", args.order);
        verify_pde_rows(&mut rec, args.kmax, args.order)?;
    }
    if matches!(t, Target::Oracles | Target::All) {
        rec = rec.param("rmax", args.rmax).param("wmax", args.wmax);
        verify_oracle_rows(&mut rec, args.rmax, args.wmax)?;
    }
    if matches!(t, Target::Identities | Target::Genfn | Target::All) {
        rec = rec.param("max", args.max);
    }
    if matches!(t, Target::Identities | Target::All) {
        verify_identity_rows(&mut rec, args.max)?;
    }
    if matches!(t, Target::Genfn | Target::All) {
        verify_genfn_rows(&mut rec, args.max)?;
    }
    rec.settle_status();
    let failed = rec.rows.iter().filter(|r| r.passed == Some(false)).count();
    rec.note("checks", rec.rows.len());
    rec.note("failed", failed);
    Ok(rec)
}

fn verify_pde_rows(rec: &mut OutputRecord, kmax: u64, order: u64) -> Result<(), UsageError> {
    for rule in [Rule::RuleIII, Rule::RuleIV] {
        for k in 0..=kmax {
            let report = verify_pde(rule, k, order)?;
            let detail = if report.passed() {
                format!(
                    "residual zero on 0..={} and at positive powers",
                    report.trusted_window.0
                )
            } else {
                report.to_string().trim_end().to_string()
            };
            rec.rows.push(
                Row::labelled(format!("pde {rule}"))
                    .with_k(k)
                    .with_check(report.passed(), detail),
            );
        }
    }
    Ok(())
}

fn closed_form_of(rule: Rule) -> fn(u64, u64, u64) -> Rational {
    match rule {
        Rule::P2 => p2,
        Rule::RuleIII => p_rule3,
        _ => p_rule4,
    }
}

fn verify_oracle_rows(rec: &mut OutputRecord, rmax: u64, wmax: u64) -> Result<(), UsageError> {
    for rule in [Rule::P2, Rule::RuleIII, Rule::RuleIV] {
        let p = closed_form_of(rule);
        let mut first_bad = None;
        let mut cells = 0u64;
        for k in 0..=rmax.max(wmax) {
            let table = dp_eval(rule, k, rmax, wmax)?;
            if first_bad.is_none() && !table.recursion_residual_is_zero() {
                first_bad = Some(format!("recursion residual nonzero at k={k}"));
            }
            for r in 0..=rmax {
                for w in 0..=wmax {
                    cells += 1;
                    if first_bad.is_none() && *table.get(r, w) != p(r, w, k) {
                        first_bad = Some(format!(
                            "r={r} w={w} k={k}: dp {} closed form {}",
                            table.get(r, w),
                            p(r, w, k)
                        ));
                    }
                }
            }
        }
        push_sweep(rec, &format!("dp {rule}"), first_bad, cells);
    }

    let mut first_bad = None;
    let mut cells = 0u64;
    for r in 1..=rmax {
        for w in 0..=wmax {
            for k in 0..=w {
                cells += 1;
                let via_g = p_rule3_via_g(r, w, k)?;
                if first_bad.is_none() && via_g != p_rule3(r, w, k) {
                    first_bad = Some(format!("r={r} w={w} k={k}: sequence sum {via_g}"));
                }
            }
        }
    }
    push_sweep(rec, "sequence-sum iii", first_bad, cells);
    Ok(())
}

fn push_sweep(rec: &mut OutputRecord, label: &str, first_bad: Option<String>, cells: u64) {
    let row = match first_bad {
        None => Row::labelled(label).with_check(true, format!("{cells} cases agree")),
        Some(msg) => Row::labelled(label).with_check(false, msg),
    };
    rec.rows.push(row);
}

fn grid_check(
    rec: &mut OutputRecord,
    label: &str,
    lo: u64,
    max: u64,
    mut ok: impl FnMut(u64, u64) -> Result<bool, UsageError>,
) -> Result<(), UsageError> {
    let mut first_bad = None;
    let mut cells = 0;
    for r in lo..=max {
        for w in 1..=max {
            cells += 1;
            if first_bad.is_none() && !ok(r, w)? {
                first_bad = Some(format!("fails at r={r} w={w}"));
            }
        }
    }
    push_sweep(rec, label, first_bad, cells);
    Ok(())
}

fn verify_identity_rows(rec: &mut OutputRecord, max: u64) -> Result<(), UsageError> {
    grid_check(rec, "identity c1", 1, max, |r, w| {
        Ok(verify_identity_c1(r, w))
    })?;
    grid_check(rec, "identity bio2", 1, max, |r, w| {
        Ok(verify_identity_bio2(r, w))
    })?;
    grid_check(rec, "unit-3f2 normalisation iii", 1, max, |r, w| {
        let via = rule3_total_via_unit_3f2(r, w)?;
        let direct: Rational = (0..=w).map(|k| p_rule3(r, w, k)).sum();
        Ok(via == int(1) && direct == int(1))
    })
}

fn verify_genfn_rows(rec: &mut OutputRecord, max: u64) -> Result<(), UsageError> {
    let zs = [int(0), int(1), frac(1, 2), int(-1), int(2)];
    type GenFn = fn(u64, u64, &Rational) -> urnpde::Result<Rational>;
    for (rule, g) in [
        (Rule::P2, gen_fn_p2 as GenFn),
        (Rule::RuleIII, gen_fn_rule3),
        (Rule::RuleIV, gen_fn_rule4),
    ] {
        grid_check(rec, &format!("genfn {rule}"), 1, max, |r, w| {
            let dist = pmf(UrnSpec::new(r, w, rule))?;
            for z in &zs {
                if g(r, w, z)? != dist.eval_generating_fn(z) {
                    return Ok(false);
                }
            }
            Ok(true)
        })?;
    }
    Ok(())
}

pub fn cmd_argmax(rule: Rule, r: u64, w: u64) -> CmdResult {
    let formula = match rule {
        Rule::RuleIII => argmax_rule3(r, w),
        Rule::RuleIV => argmax_rule4(r, w),
        other => return Err(usage(format!("argmax supports iii and iv, not {other}"))),
    };
    let dist = pmf(UrnSpec::new(r, w, rule))?;
    let agrees = formula == dist.argmax();
    let mut rec = OutputRecord::new("argmax")
        .param("rule", rule)
        .param("r", r)
        .param("w", w);
    for &k in &formula {
        rec.rows.push(
            Row::labelled("argmax")
                .with_k(k)
                .with_exact(&dist.probs[k as usize])
                .with_check(agrees, "formula matches pmf maximum"),
        );
    }
    if rule == Rule::RuleIV && w >= 1 {
        let k0_sq = Rational::new(
            BigInt::from(1 + r) * BigInt::from(r + w),
            BigInt::from(2 * w - 1),
        );
        rec.note("k0_squared", &k0_sq);
        if let Some(x) = k0_sq.to_f64() {
            rec.note("k0", x.sqrt());
        }
    }
    rec.note("argmax", set_string(&formula));
    rec.settle_status();
    Ok(rec)
}

pub fn cmd_asym(rule: Rule, r: u64, w: u64, k: Option<u64>, regime: Regime) -> CmdResult {
    type Exact = fn(u64, u64, u64) -> Rational;
    type Approx = fn(u64, u64, u64, Regime) -> Rational;
    let (exact, approx): (Exact, Approx) = match rule {
        Rule::RuleIII => (p_rule3, asym_rule3),
        Rule::RuleIV => (p_rule4, asym_rule4),
        other => return Err(usage(format!("asym supports iii and iv, not {other}"))),
    };
    let ks: Vec<u64> = match k {
        Some(k) => vec![k],
        None => (0..=UrnSpec::new(r, w, rule).max_k().min(10)).collect(),
    };
    let regime_name = match regime {
        Regime::LargeR => "large-r",
        Regime::LargeW => "large-w",
    };
    let mut rec = OutputRecord::new("asym")
        .param("rule", rule)
        .param("r", r)
        .param("w", w)
        .param("regime", regime_name);
    if let Some(k) = k {
        rec = rec.param("k", k);
    }
    for k in ks {
        let p = exact(r, w, k);
        let a = approx(r, w, k, regime);
        let mut row = Row::labelled("p").with_k(k).with_exact(&p);
        row.approx = a.to_f64();
        if !a.is_positive() {
            row.detail = Some("approximation vanishes".into());
        } else {
            row.deviation = ((&p / &a) - int(1)).to_f64();
        }
        rec.rows.push(row);
    }
    Ok(rec)
}
