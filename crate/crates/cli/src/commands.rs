use capcont_core::assisted::{
    continuity_check, erasure_q2, erasure_qb_bounds, mutual_gap_bound, simulation_upper_bound,
    ContinuityCheck,
};
use capcont_core::capopt::{default_ensemble_size, maximize, n_copy, OptimizerSettings, Quantity};
use capcont_core::continuity::{
    af_suite, count_violations, discontinuity_demo, fannes_suite, random_pairs, verify_corollaries_at,
    verify_output_entropy_at, BoundReport, HarnessSettings, SuiteSummary, DEMO_CSV_HEADER,
};
use capcont_core::distance::{
    diamond_lower_probe, diamond_norm_with, HermitianPreservingMap, SdpOptions, SdpResult,
};
use capcont_core::entropic::{
    coherent_information, conditional_entropy, holevo_information, mutual_information,
    private_information, von_neumann_entropy,
};
use capcont_core::tol::Tolerances;
use capcont_core::{io, QuantumChannel};
use serde::Serialize;
use serde_json::Value;

use crate::args::*;
use crate::report::{to_value, CliError};
use crate::spec::parse_channel_spec;

pub struct Context {
    pub seed: u64,
    pub tol: Tolerances,
}

/// A finished command: JSON result, whether a hard check failed, and CSV
/// text for commands that produce a table.
pub struct Outcome {
    pub value: Value,
    pub violation: bool,
    pub csv: Option<String>,
}

impl Outcome {
    fn ok<T: Serialize>(result: &T) -> Result<Self, CliError> {
        Ok(Self {
            value: to_value(result)?,
            violation: false,
            csv: None,
        })
    }
}

impl Context {
    fn channel(&self, spec: &str) -> Result<QuantumChannel, CliError> {
        parse_channel_spec(spec, self.tol.psd, self.tol.tp)
    }

    fn sdp_options(&self) -> SdpOptions {
        SdpOptions {
            tol_gap: self.tol.sdp,
            ..SdpOptions::default()
        }
    }
}

fn read(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::new("io", format!("cannot read {path}: {e}")))
}

pub fn command_name(cmd: &Command) -> String {
    match cmd {
        Command::Norm(NormCmd::Diamond(_)) => "norm diamond".into(),
        Command::Entropy(_) => "entropy".into(),
        Command::Info(c) => match c {
            InfoCmd::Coherent { .. } => "info coherent".into(),
            InfoCmd::Holevo { .. } => "info holevo".into(),
            InfoCmd::Private { .. } => "info private".into(),
        },
        Command::Capacity(c) => format!("capacity {}", capacity_parts(c).0.name()),
        Command::Verify(c) => match c {
            VerifyCmd::OutputEntropy(_) => "verify output-entropy".into(),
            VerifyCmd::Corollaries(_) => "verify corollaries".into(),
            VerifyCmd::Fannes(_) => "verify fannes".into(),
            VerifyCmd::Af(_) => "verify af".into(),
        },
        Command::Demo(DemoCmd::Discontinuity { .. }) => "demo discontinuity".into(),
        Command::Assisted(AssistedCmd::Bounds(_)) => "assisted bounds".into(),
        Command::Assisted(AssistedCmd::Erasure { .. }) => "assisted erasure".into(),
    }
}

pub fn execute(ctx: &Context, cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Norm(NormCmd::Diamond(a)) => norm_diamond(ctx, a),
        Command::Entropy(a) => entropy(a),
        Command::Info(c) => info(ctx, c),
        Command::Capacity(c) => capacity(ctx, c),
        Command::Verify(VerifyCmd::OutputEntropy(a)) => verify_pairs(ctx, a, None),
        Command::Verify(VerifyCmd::Corollaries(a)) => verify_pairs(ctx, &a.pair, Some(a)),
        Command::Verify(VerifyCmd::Fannes(a)) => verify_fannes(ctx, a),
        Command::Verify(VerifyCmd::Af(a)) => verify_af(ctx, a),
        Command::Demo(DemoCmd::Discontinuity { n_max }) => demo(*n_max),
        Command::Assisted(AssistedCmd::Bounds(a)) => assisted_bounds(a),
        Command::Assisted(AssistedCmd::Erasure { p, grid }) => assisted_erasure(*p, *grid),
    }
}

#[derive(Serialize)]
struct DiamondResult<'a> {
    channel_a: &'a str,
    channel_b: &'a str,
    value: f64,
    lower_bound: f64,
    gap: f64,
    iterations: usize,
    status: capcont_core::distance::SdpStatus,
    probe_lower_bound: f64,
}

fn norm_diamond(ctx: &Context, a: &DiamondArgs) -> Result<Outcome, CliError> {
    let map = HermitianPreservingMap::from_channels(&ctx.channel(&a.channel_a)?, &ctx.channel(&a.channel_b)?)?;
    let r = diamond_norm_with(&map, &ctx.sdp_options())?;
    let probe = diamond_lower_probe(&map, a.probe_trials, ctx.seed)?;
    Outcome::ok(&DiamondResult {
        channel_a: &a.channel_a,
        channel_b: &a.channel_b,
        value: r.value,
        lower_bound: r.dual_value,
        gap: r.gap(),
        iterations: r.iterations,
        status: r.status,
        probe_lower_bound: probe,
    })
}

#[derive(Serialize)]
struct EntropyResult {
    dims: Vec<usize>,
    entropy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    conditional_entropy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mutual_information: Option<f64>,
}

fn entropy(a: &EntropyArgs) -> Result<Outcome, CliError> {
    let rho = io::parse_state(&read(&a.state)?)?;
    let (ce, mi) = match a.split {
        Some(s) => (Some(conditional_entropy(&rho, s)?), Some(mutual_information(&rho, s)?)),
        None => (None, None),
    };
    Outcome::ok(&EntropyResult {
        dims: rho.dims().to_vec(),
        entropy: von_neumann_entropy(&rho),
        conditional_entropy: ce,
        mutual_information: mi,
    })
}

#[derive(Serialize)]
struct InfoResult<'a> {
    quantity: &'static str,
    channel: &'a str,
    value: f64,
}

fn info(ctx: &Context, c: &InfoCmd) -> Result<Outcome, CliError> {
    let (quantity, channel, value) = match c {
        InfoCmd::Coherent { channel, state } => {
            let rho = io::parse_state(&read(state)?)?;
            ("coherent", channel, coherent_information(&ctx.channel(channel)?, &rho)?)
        }
        InfoCmd::Holevo { channel, ensemble } => {
            let ens = io::parse_ensemble(&read(ensemble)?)?;
            ("holevo", channel, holevo_information(&ctx.channel(channel)?, &ens)?)
        }
        InfoCmd::Private { channel, ensemble } => {
            let ens = io::parse_ensemble(&read(ensemble)?)?;
            ("private", channel, private_information(&ctx.channel(channel)?, &ens)?)
        }
    };
    Outcome::ok(&InfoResult {
        quantity,
        channel,
        value,
    })
}

fn capacity_parts(c: &CapacityCmd) -> (Quantity, &CapacityArgs) {
    match c {
        CapacityCmd::Coherent(a) => (Quantity::Coherent, a),
        CapacityCmd::Holevo(a) => (Quantity::Holevo, a),
        CapacityCmd::Private(a) => (Quantity::Private, a),
    }
}

fn capacity(ctx: &Context, c: &CapacityCmd) -> Result<Outcome, CliError> {
    let (quantity, a) = capacity_parts(c);
    let ch = ctx.channel(&a.channel)?;
    let settings = OptimizerSettings {
        restarts: a.restarts,
        iters: a.iters,
        seed: ctx.seed,
        ..OptimizerSettings::default()
    };
    if a.copies == 0 {
        return Err(CliError::bad_parameter("--copies must be at least 1"));
    }
    let d = ch.d_in().saturating_pow(a.copies as u32);
    let size = a.ensemble_size.unwrap_or_else(|| default_ensemble_size(d));
    if a.copies == 1 {
        Outcome::ok(&maximize(&ch, quantity, size, &settings)?)
    } else {
        Outcome::ok(&n_copy(&ch, a.copies, quantity, size, &settings)?)
    }
}

struct LabeledPair {
    labels: [String; 2],
    n: QuantumChannel,
    m: QuantumChannel,
    q: Option<f64>,
    index: Option<usize>,
    distance: SdpResult,
}

fn load_pairs(ctx: &Context, a: &PairArgs) -> Result<Vec<LabeledPair>, CliError> {
    match (&a.channel_a, &a.channel_b, a.random_pairs) {
        (Some(sa), Some(sb), None) => {
            let n = ctx.channel(sa)?;
            let m = ctx.channel(sb)?;
            let map = HermitianPreservingMap::from_channels(&n, &m)?;
            let distance = diamond_norm_with(&map, &ctx.sdp_options())?;
            Ok(vec![LabeledPair {
                labels: [sa.clone(), sb.clone()],
                n,
                m,
                q: None,
                index: None,
                distance,
            }])
        }
        (None, None, Some(count)) => {
            if count == 0 {
                return Err(CliError::bad_parameter("--random-pairs must be positive"));
            }
            let pairs = random_pairs(count, a.dim, a.dim, ctx.seed)?;
            Ok(pairs
                .into_iter()
                .map(|p| {
                    let tag = format!("random:seed={},pair={},dim={}", ctx.seed, p.index, a.dim);
                    LabeledPair {
                        labels: [format!("{tag},side=N"), format!("{tag},side=M")],
                        n: p.n,
                        m: p.m,
                        q: Some(p.q),
                        index: Some(p.index),
                        distance: p.distance,
                    }
                })
                .collect())
        }
        _ => Err(CliError::usage(
            "give either --channel-a and --channel-b, or --random-pairs",
        )),
    }
}

#[derive(Serialize)]
struct PairSummary {
    channels: [String; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    q: Option<f64>,
    epsilon: f64,
    distance: SdpResult,
    reports: usize,
    violations: usize,
    min_margin: f64,
}

#[derive(Serialize)]
struct VerifyResult {
    check: &'static str,
    n: usize,
    trials: usize,
    pairs: Vec<PairSummary>,
    total_reports: usize,
    violations: usize,
    min_margin: f64,
    /// Violations only, unless every report was requested.
    reports: Vec<BoundReport>,
}

fn min_margin(reports: &[BoundReport]) -> f64 {
    reports.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min)
}

fn verify_pairs(ctx: &Context, a: &PairArgs, cor: Option<&CorollaryArgs>) -> Result<Outcome, CliError> {
    if a.trials == 0 || a.n == 0 {
        return Err(CliError::bad_parameter("--trials and --n must be positive"));
    }
    let pairs = load_pairs(ctx, a)?;
    let mut summaries = Vec::with_capacity(pairs.len());
    let mut all = Vec::new();
    for p in &pairs {
        let mut settings = HarnessSettings {
            n: a.n,
            trials: a.trials,
            seed: ctx.seed,
            tol: ctx.tol.ent,
            pair: p.index,
            ..HarnessSettings::default()
        };
        let run = match cor {
            None => verify_output_entropy_at(&p.n, &p.m, &p.distance, &settings)?,
            Some(c) => {
                settings.ensemble_size = c.ensemble_size;
                settings.optimize = c.optimize.then_some(OptimizerSettings {
                    restarts: c.restarts,
                    iters: c.iters,
                    seed: ctx.seed,
                    ..OptimizerSettings::default()
                });
                verify_corollaries_at(&p.n, &p.m, &p.distance, &settings)?
            }
        };
        let reports: Vec<BoundReport> = run
            .reports
            .into_iter()
            .map(|r| r.with_channels(&p.labels[0], &p.labels[1]))
            .collect();
        summaries.push(PairSummary {
            channels: p.labels.clone(),
            q: p.q,
            epsilon: run.epsilon,
            distance: run.distance,
            reports: reports.len(),
            violations: count_violations(&reports),
            min_margin: min_margin(&reports),
        });
        all.extend(reports);
    }
    let violations = count_violations(&all);
    let result = VerifyResult {
        check: if cor.is_some() { "corollaries" } else { "output-entropy" },
        n: a.n,
        trials: a.trials,
        total_reports: all.len(),
        violations,
        min_margin: min_margin(&all),
        pairs: summaries,
        reports: if a.all_reports {
            all
        } else {
            all.into_iter().filter(|r| r.violation).collect()
        },
    };
    Ok(Outcome {
        value: to_value(&result)?,
        violation: violations > 0,
        csv: None,
    })
}

#[derive(Serialize)]
struct SuiteResult {
    check: &'static str,
    trials: usize,
    suites: Vec<SuiteSummary>,
    violations: usize,
}

fn suite_outcome(check: &'static str, trials: usize, suites: Vec<SuiteSummary>) -> Result<Outcome, CliError> {
    let violations = suites.iter().map(|s| s.violations).sum();
    Ok(Outcome {
        value: to_value(&SuiteResult {
            check,
            trials,
            suites,
            violations,
        })?,
        violation: violations > 0,
        csv: None,
    })
}

fn verify_fannes(ctx: &Context, a: &FannesArgs) -> Result<Outcome, CliError> {
    let suites = a
        .dims
        .iter()
        .map(|&d| fannes_suite(d, a.trials, ctx.seed, ctx.tol.ent).map_err(CliError::from))
        .collect::<Result<Vec<_>, _>>()?;
    suite_outcome("fannes", a.trials, suites)
}

fn parse_pair_dims(text: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::bad_parameter(format!("expected d_AxD_B, got {text:?}"));
    let (x, y) = text.split_once('x').ok_or_else(bad)?;
    Ok((x.trim().parse().map_err(|_| bad())?, y.trim().parse().map_err(|_| bad())?))
}

fn verify_af(ctx: &Context, a: &AfArgs) -> Result<Outcome, CliError> {
    let suites = a
        .dims
        .iter()
        .map(|text| {
            let (da, db) = parse_pair_dims(text)?;
            af_suite(da, db, a.trials, ctx.seed, ctx.tol.ent).map_err(CliError::from)
        })
        .collect::<Result<Vec<_>, _>>()?;
    suite_outcome("alicki-fannes", a.trials, suites)
}

#[derive(Serialize)]
struct DemoResult {
    rows: Vec<capcont_core::continuity::DemoRow>,
    consistent: bool,
}

fn demo(n_max: usize) -> Result<Outcome, CliError> {
    if n_max < 2 {
        return Err(CliError::bad_parameter("--n-max must be at least 2"));
    }
    let n_values: Vec<usize> = (2..=n_max).collect();
    let rows = discontinuity_demo(&n_values)?;
    let consistent = rows.iter().all(|r| r.consistent);
    let mut csv = String::from(DEMO_CSV_HEADER);
    csv.push('\n');
    for r in &rows {
        csv.push_str(&r.csv_row());
        csv.push('\n');
    }
    Ok(Outcome {
        value: to_value(&DemoResult { rows, consistent })?,
        violation: !consistent,
        csv: Some(csv),
    })
}

#[derive(Serialize)]
struct BoundsResult {
    q2n: f64,
    p1: f64,
    log_d: f64,
    simulation_upper_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    p2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q2m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gap_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    continuity: Option<ContinuityCheck>,
}

fn assisted_bounds(a: &BoundsArgs) -> Result<Outcome, CliError> {
    let sim = simulation_upper_bound(a.q2n, a.p1, a.logd)?;
    let q2m = a.p2.map(|_| a.q2m.unwrap_or(0.0));
    let gap_bound = match (a.p2, q2m) {
        (Some(p2), Some(q2m)) => Some(mutual_gap_bound(a.q2n, q2m, a.p1, p2, a.logd)?),
        _ => None,
    };
    let continuity = match (a.eps, a.radius) {
        (Some(eps), Some(radius)) => Some(continuity_check(eps, radius, a.logd, a.p1, a.p2.unwrap_or(0.5))?),
        _ => None,
    };
    Outcome::ok(&BoundsResult {
        q2n: a.q2n,
        p1: a.p1,
        log_d: a.logd,
        simulation_upper_bound: sim,
        p2: a.p2,
        q2m,
        gap_bound,
        continuity,
    })
}

#[derive(Serialize)]
struct ErasurePoint {
    p: f64,
    q2: f64,
    qb_lower: f64,
    qb_upper: f64,
}

fn erasure_point(p: f64) -> Result<ErasurePoint, CliError> {
    let (lo, hi) = erasure_qb_bounds(p)?;
    Ok(ErasurePoint {
        p,
        q2: erasure_q2(p)?,
        qb_lower: lo,
        qb_upper: hi,
    })
}

fn assisted_erasure(p: Option<f64>, grid: usize) -> Result<Outcome, CliError> {
    match p {
        Some(p) => Outcome::ok(&erasure_point(p)?),
        None => {
            if grid < 2 {
                return Err(CliError::bad_parameter("--grid must be at least 2"));
            }
            let points = (0..grid)
                .map(|i| erasure_point(i as f64 / (grid - 1) as f64))
                .collect::<Result<Vec<_>, _>>()?;
            Outcome::ok(&serde_json::json!({ "points": to_value(&points)? }))
        }
    }
}
