use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use quadwaring_core::additive::{
    cauchy_davenport_verify, cyclic_sumset, energy_multiplicativity_sweep, energy_table, green_ruzsa_verify,
    interval_counterexample, random_green_ruzsa_instance, restriction_ratio_statistic, t_count_sweep,
};
use quadwaring_core::calibration::{Calibration, CalibrationSweep};
use quadwaring_core::charsums::{
    gauss_bound_statistic, nu_hat_statistic, qr_interval_statistic, reduced_gauss_closed_form_sweep,
};
use quadwaring_core::comblemma::{
    lemma71_property_test, lemma72_property_test, local_theorem_property_test, theorem82_property_test,
    verify_base_case, BaseCaseReport, SamplerMode, BASE_CASES,
};
use quadwaring_core::exactlp::{simplex_solve, verify_certificate, LpProblem};
use quadwaring_core::majorants::{chebyshev_trend, normalization_trend, wtrick_params, TREND_MODULI, TREND_NS};
use quadwaring_core::modring::is_prime;
use quadwaring_core::{Error, Rational};

use crate::manifest::RunManifest;

pub const DEFAULT_SEED: u64 = 20_240_601;
const GAUSS_TOLERANCE: f64 = 1e-8;

/// Result of one subcommand before it is wrapped with its manifest.
pub struct Outcome {
    pub passed: bool,
    pub body: Value,
    pub summary: Vec<String>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

/// Core input errors are usage errors; anything else propagates unchanged.
pub fn is_usage_error(e: &anyhow::Error) -> bool {
    e.downcast_ref::<Error>().map_or(true, |e| {
        matches!(
            e,
            Error::InvalidInput(_)
                | Error::NotUnitSquare { .. }
                | Error::ParseRational(_)
                | Error::MalformedLp(_)
                | Error::TooManyVariables(_)
                | Error::Calibration(_)
        )
    })
}

pub fn verify_base_cases(
    m: &mut RunManifest,
    s: Option<u32>,
    n: Option<usize>,
    quick: bool,
) -> anyhow::Result<Outcome> {
    let pairs: Vec<(u32, usize)> = match (s, n) {
        (Some(s), Some(n)) => vec![(s, n)],
        (None, None) if quick => vec![(6, 3), (7, 3)],
        (None, None) => BASE_CASES.to_vec(),
        _ => bail!("--s and --n must be given together"),
    };
    let mut reports: Vec<BaseCaseReport> = Vec::new();
    let mut summary = Vec::new();
    for (s, n) in pairs {
        let r = m.timed(&format!("base-case ({s},{n})"), || verify_base_case(s, n))?;
        summary.push(format!(
            "(s={s}, n={n}): {} LPs, max optimum {} vs d={}, bounded={}, certified={}",
            r.case_count,
            r.max_value.as_ref().map_or("-".into(), Rational::to_string),
            r.threshold,
            r.all_bounded,
            r.all_certified
        ));
        for (t, v) in &r.violations {
            summary.push(format!("  violation t={t:?} optimum {v}"));
        }
        reports.push(r);
    }
    let passed = reports.iter().all(|r| r.all_bounded && r.all_certified);
    Ok(Outcome { passed, body: to_value(&reports), summary })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum PropKind {
    Lemma71,
    Lemma72,
    Local,
    Thm82,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ModeArg {
    Uniform,
    NearThreshold,
    Both,
}

impl ModeArg {
    fn modes(self) -> Vec<SamplerMode> {
        match self {
            ModeArg::Uniform => vec![SamplerMode::Uniform],
            ModeArg::NearThreshold => vec![SamplerMode::NearThreshold],
            ModeArg::Both => vec![SamplerMode::Uniform, SamplerMode::NearThreshold],
        }
    }
}

pub struct PropArgs {
    pub kind: PropKind,
    pub trials: u64,
    pub seed: u64,
    pub s: Option<u32>,
    pub n: Option<usize>,
    pub w: Option<u64>,
    pub d: Option<Rational>,
    pub mode: ModeArg,
    pub quick: bool,
}

pub fn prop_test(m: &mut RunManifest, a: &PropArgs) -> anyhow::Result<Outcome> {
    m.seed(a.seed);
    let mut reports = Vec::new();
    let mut summary = Vec::new();
    let mut failures = 0usize;
    match a.kind {
        PropKind::Lemma71 => {
            let configs: Vec<(u32, usize)> = match (a.s, a.n) {
                (Some(s), Some(n)) => vec![(s, n)],
                (None, None) if a.quick => vec![(6, 3), (7, 3), (6, 4)],
                (None, None) => BASE_CASES.iter().flat_map(|&(s, n)| [(s, n), (s, n + 1)]).collect(),
                _ => bail!("--s and --n must be given together"),
            };
            for (s, n) in configs {
                for mode in a.mode.modes() {
                    let r = m.timed(&format!("lemma71 ({s},{n}) {mode:?}"), || {
                        lemma71_property_test(s, n, a.trials, a.seed, mode)
                    })?;
                    failures += r.failures.len();
                    summary.push(format!("(s={s}, n={n}, {mode:?}): {} trials, {} failures", r.trials, r.failures.len()));
                    reports.push(to_value(&r));
                }
            }
        }
        PropKind::Lemma72 => {
            let d = a.d.clone().unwrap_or_else(|| Rational::new(1, 2));
            let ss = a.s.map_or(vec![12, 15], |s| vec![s]);
            for s in ss {
                for mode in a.mode.modes() {
                    let r = m.timed(&format!("lemma72 s={s} {mode:?}"), || {
                        lemma72_property_test(s, &d, a.trials, a.seed, mode)
                    })?;
                    failures += r.failures.len();
                    summary.push(format!("(s={s}, D={d}, {mode:?}): {} trials, {} failures", r.trials, r.failures.len()));
                    reports.push(to_value(&r));
                }
            }
        }
        PropKind::Local | PropKind::Thm82 => {
            let configs: Vec<(u64, u32)> = match (a.w, a.s) {
                (Some(w), Some(s)) => vec![(w, s)],
                (None, None) if a.kind == PropKind::Local => vec![(7, 6), (11, 5), (77, 6)],
                (None, None) if a.quick => vec![(5, 8), (35, 5)],
                (None, None) => vec![(5, 6), (5, 7), (5, 8), (35, 5), (385, 6)],
                _ => bail!("--w and --s must be given together"),
            };
            for (w, s) in configs {
                let r = m.timed(&format!("{:?} W={w} s={s}", a.kind), || {
                    if a.kind == PropKind::Local {
                        local_theorem_property_test(w, s, a.trials, a.seed)
                    } else {
                        theorem82_property_test(w, s, a.trials, a.seed)
                    }
                })?;
                failures += r.failures.len();
                summary.push(format!(
                    "(modulus={}, s={s}): {} trials x {} targets, {} failures",
                    r.modulus,
                    r.trials,
                    r.targets_per_trial,
                    r.failures.len()
                ));
                reports.push(to_value(&r));
            }
        }
    }
    Ok(Outcome { passed: failures == 0, body: Value::Array(reports), summary })
}

pub fn gauss(m: &mut RunManifest, cal: &Calibration, p_max: Option<u64>, quick: bool) -> anyhow::Result<Outcome> {
    let p_max = p_max.unwrap_or(if quick { 61 } else { 199 });
    let sweep = m.timed("closed form", || reduced_gauss_closed_form_sweep(p_max, &[1, 2, 3]));
    let (gp, nw, qp) = if quick { (31, 200, 10_000) } else { (97, 1000, 100_000) };
    let gauss_stat = m.timed("gauss bound", || gauss_bound_statistic(gp, 3));
    let nu_stat = m.timed("nu-hat", || nu_hat_statistic(nw));
    let (qr_stat, qr_p, qr_eta) = m.timed("qr intervals", || qr_interval_statistic(qp));
    let checks = [
        ("closed form", sweep.max_error <= GAUSS_TOLERANCE),
        ("gauss bound", gauss_stat <= cal.gauss_c),
        ("nu-hat", nu_stat <= cal.nu_hat_c),
        ("qr intervals", qr_stat < cal.qr_interval_c),
    ];
    let summary = vec![
        format!("closed form: {} sums (p <= {p_max}), max error {:.3e}", sweep.cases, sweep.max_error),
        format!("gauss bound (p <= {gp}): sup {gauss_stat:.4} vs C = {:.4}", cal.gauss_c),
        format!("nu-hat (W <= {nw}): sup {nu_stat:.4} vs C = {:.4}", cal.nu_hat_c),
        format!("qr intervals (p <= {qp}): sup {qr_stat:.4} at p={qr_p}, eta={qr_eta} vs C = {:.4}", cal.qr_interval_c),
    ];
    Ok(Outcome {
        passed: checks.iter().all(|c| c.1),
        body: json!({
            "closed_form": sweep,
            "tolerance": GAUSS_TOLERANCE,
            "gauss_bound": { "p_max": gp, "statistic": gauss_stat, "bound": cal.gauss_c },
            "nu_hat": { "w_max": nw, "statistic": nu_stat, "bound": cal.nu_hat_c },
            "qr_interval": { "p_max": qp, "statistic": qr_stat, "argmax": [qr_p, qr_eta], "bound": cal.qr_interval_c },
            "checks": checks.iter().map(|(k, v)| json!({ "check": k, "passed": v })).collect::<Vec<_>>(),
        }),
        summary,
    })
}

fn energy_prime_powers(quick: bool) -> Vec<(u64, u32)> {
    let primes = |hi: u64| (3..=hi).filter(|&p| is_prime(p)).collect::<Vec<_>>();
    let (a, b, c) = if quick { (23, 11, 5) } else { (47, 23, 11) };
    let mut out: Vec<(u64, u32)> = primes(a).into_iter().map(|p| (p, 1)).collect();
    out.extend(primes(b).into_iter().map(|p| (p, 2)));
    out.extend(primes(c).into_iter().map(|p| (p, 3)));
    out
}

pub fn energy(
    m: &mut RunManifest,
    cal: &Calibration,
    max_product: Option<u64>,
    csv_path: Option<&Path>,
    quick: bool,
) -> anyhow::Result<Outcome> {
    let max_product = max_product.unwrap_or(if quick { 500 } else { 2500 });
    let q_max = if quick { 500 } else { 2000 };
    let r_max = if quick { 199 } else { 499 };
    let mult = m.timed("multiplicativity", || energy_multiplicativity_sweep(max_product));
    let tcount = m.timed("t-count", || t_count_sweep(q_max));
    let restriction = m.timed("restriction", || restriction_ratio_statistic(11, r_max));
    let table = m.timed("energy table", || energy_table(&energy_prime_powers(quick)))?;
    if let Some(path) = csv_path {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(["p", "n", "S", "energy", "ratio"])?;
        for row in &table {
            w.write_record([
                row.p.to_string(),
                row.n.to_string(),
                row.s.to_string(),
                row.energy.to_string(),
                format!("{:.12}", row.ratio),
            ])?;
        }
        w.flush()?;
    }
    let passed = mult.failures.is_empty() && tcount.violations.is_empty() && restriction <= cal.restriction_k;
    let summary = vec![
        format!("multiplicativity: {} coprime pairs (product <= {max_product}), {} failures", mult.pairs, mult.failures.len()),
        format!(
            "t-count: {} prime powers <= {q_max}, {} units, max ratio {:.4}, {} violations",
            tcount.prime_powers,
            tcount.units_checked,
            tcount.max_ratio,
            tcount.violations.len()
        ),
        format!("restriction (11 <= p <= {r_max}): sup (ratio-1)p = {restriction:.4} vs K = {:.4}", cal.restriction_k),
    ];
    Ok(Outcome {
        passed,
        body: json!({
            "multiplicativity": mult,
            "t_count": tcount,
            "restriction": { "p_min": 11, "p_max": r_max, "statistic": restriction, "bound": cal.restriction_k },
            "energy_table": table,
        }),
        summary,
    })
}

fn random_cd_instance(rng: &mut ChaCha8Rng) -> (u64, Vec<Vec<u64>>) {
    let primes: Vec<u64> = (3..=101).filter(|&p| is_prime(p)).collect();
    let p = primes[rng.gen_range(0..primes.len())];
    let s = rng.gen_range(2..=5);
    let sets = (0..s)
        .map(|_| {
            let k = rng.gen_range(1..=p.min(12));
            let mut v: Vec<u64> = (0..k).map(|_| rng.gen_range(0..p)).collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    (p, sets)
}

pub struct SumsetArgs {
    pub modulus: Option<u64>,
    pub sets: Vec<Vec<u64>>,
    pub instances: Option<u64>,
    pub seed: u64,
    pub quick: bool,
}

pub fn sumset(m: &mut RunManifest, a: &SumsetArgs) -> anyhow::Result<Outcome> {
    if let Some(w) = a.modulus {
        if a.sets.is_empty() {
            bail!("--set is required with --modulus");
        }
        if w == 0 || a.sets.iter().flatten().any(|&x| x >= w) {
            bail!("set elements must lie in [0, {w})");
        }
        let bits = cyclic_sumset(&a.sets, w);
        let missing = bits.zeros();
        let cd = if is_prime(w) { Some(cauchy_davenport_verify(w, &a.sets)?) } else { None };
        let passed = cd.as_ref().map_or(true, |c| c.ok);
        return Ok(Outcome {
            passed,
            summary: vec![format!("|A_1 + ... + A_{}| = {} of {w}", a.sets.len(), bits.count_ones())],
            body: json!({ "modulus": w, "sets": a.sets, "size": bits.count_ones(), "missing": missing, "cauchy_davenport": cd }),
        });
    }
    m.seed(a.seed);
    let n = a.instances.unwrap_or(if a.quick { 200 } else { 1000 });
    let mut gr_fail = Vec::new();
    for i in 0..n {
        let inst = random_green_ruzsa_instance(a.seed, i);
        if !green_ruzsa_verify(inst.w, &inst.a, &inst.b, inst.t)?.ok {
            gr_fail.push(to_value(&inst));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut cd_fail = Vec::new();
    for _ in 0..n {
        let (p, sets) = random_cd_instance(&mut rng);
        let c = cauchy_davenport_verify(p, &sets)?;
        if !c.ok {
            cd_fail.push(json!({ "p": p, "sets": sets, "check": c }));
        }
    }
    Ok(Outcome {
        passed: gr_fail.is_empty() && cd_fail.is_empty(),
        summary: vec![
            format!("green-ruzsa: {n} instances, {} violations", gr_fail.len()),
            format!("cauchy-davenport: {n} instances, {} violations", cd_fail.len()),
        ],
        body: json!({
            "instances": n,
            "green_ruzsa_violations": gr_fail,
            "cauchy_davenport_violations": cd_fail,
        }),
    })
}

pub fn counterexample(m: &mut RunManifest, p: u64, s: u32, tau: f64) -> anyhow::Result<Outcome> {
    if !(0.0..1.0).contains(&tau) {
        bail!("tau must lie in [0, 1)");
    }
    match m.timed("construction", || interval_counterexample(p, s, tau)) {
        Ok(c) => {
            let big_enough = c.set.len() as f64 >= tau * (p + 1) as f64 / 2.0;
            let passed = big_enough && !c.missing.is_empty();
            Ok(Outcome {
                passed,
                summary: vec![format!(
                    "p={p}, s={s}: |A| = {} (density {:.4}), {} residues missed, first {:?}",
                    c.set.len(),
                    c.density,
                    c.missing.len(),
                    &c.missing[..c.missing.len().min(8)]
                )],
                body: to_value(&c),
            })
        }
        Err(Error::DensityShortfall { size, needed }) => Ok(Outcome {
            passed: false,
            summary: vec![format!("p={p}: construction reached only {size} elements, needed {needed:.1}")],
            body: json!({ "p": p, "s": s, "tau": tau, "size": size, "needed": needed }),
        }),
        Err(e) => Err(e.into()),
    }
}

pub struct MajorantArgs {
    pub csv: Option<PathBuf>,
    pub y: Option<u64>,
    pub s: u32,
    pub w_override: Option<f64>,
    pub quick: bool,
}

pub fn majorant(m: &mut RunManifest, cal: &Calibration, a: &MajorantArgs) -> anyhow::Result<Outcome> {
    let ns: Vec<u64> = if a.quick { TREND_NS[..3].to_vec() } else { TREND_NS.to_vec() };
    let mut trends = Vec::new();
    let mut summary = Vec::new();
    let mut regression_ok = true;
    for (w, b) in TREND_MODULI {
        let t = m.timed(&format!("normalization W={w}"), || normalization_trend(b, w, &ns))?;
        let devs: Vec<String> = t.rows.iter().map(|r| format!("{:.4}", r.relative_deviation)).collect();
        summary.push(format!(
            "(W={w}, b={b}) deviation along N: [{}], decreasing: {}",
            devs.join(", "),
            t.decreasing
        ));
        if let Some(last) = t.rows.iter().find(|r| r.n == 1_000_000) {
            regression_ok &= last.relative_deviation <= cal.normalization_deviation;
        }
        trends.push(t);
    }
    let (x, tol) = if a.quick { (10_000, 0.02) } else { (1_000_000, 0.005) };
    let cheb = m.timed("chebyshev", || chebyshev_trend(x))?;
    let cheb_ok = (cheb.ratio - 1.0).abs() <= tol;
    summary.push(format!("chebyshev X={x}: ratio {:.5} (tolerance {tol})", cheb.ratio));
    if let Some(path) = &a.csv {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(["W", "b", "N", "total", "relative_deviation"])?;
        for row in trends.iter().flat_map(|t| &t.rows) {
            w.write_record([
                row.big_w.to_string(),
                row.b.to_string(),
                row.n.to_string(),
                format!("{:.6}", row.total),
                format!("{:.9}", row.relative_deviation),
            ])?;
        }
        w.flush()?;
    }
    let wtrick = match a.y {
        Some(y) => Some(wtrick_params(y, a.s, a.w_override)?),
        None => None,
    };
    if let Some(p) = &wtrick {
        summary.push(format!(
            "w-trick y={}: w={:.4}, W={}, N={}, W <= ln N: {}",
            p.y, p.w, p.big_w, p.n, p.w_within_log
        ));
    }
    Ok(Outcome {
        passed: regression_ok && cheb_ok,
        body: json!({
            "trends": trends,
            "regression_bound": cal.normalization_deviation,
            "chebyshev": cheb,
            "chebyshev_tolerance": tol,
            "wtrick": wtrick,
        }),
        summary,
    })
}

pub fn lp_solve(m: &mut RunManifest, path: &Path) -> anyhow::Result<Outcome> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let problem: LpProblem = serde_json::from_str(&text).map_err(|e| Error::MalformedLp(e.to_string()))?;
    let sol = m.timed("solve", || simplex_solve(&problem));
    let verified = if sol.is_optimal() { Some(verify_certificate(&problem, &sol)?) } else { None };
    let summary = vec![format!(
        "{:?}{}{}",
        sol.status,
        sol.value.as_ref().map_or(String::new(), |v| format!(", value {v}")),
        verified.map_or(String::new(), |ok| format!(", certificate verified: {ok}"))
    )];
    Ok(Outcome {
        passed: verified.unwrap_or(true),
        body: json!({ "problem": problem, "solution": sol, "certificate_verified": verified }),
        summary,
    })
}

pub fn calibrate(m: &mut RunManifest) -> anyhow::Result<(Calibration, CalibrationSweep)> {
    let sweep = m.timed("calibration sweep", CalibrationSweep::run)?;
    Ok((sweep.freeze(), sweep))
}
