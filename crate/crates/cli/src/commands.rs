//! One function per subcommand.

use anyhow::{bail, Context, Result};
use dickman_lab::arith::Exactness;
use dickman_lab::dickman::{mertens_constant, solve_rho};
use dickman_lab::experiments::bands::{self, Band};
use dickman_lab::experiments::{
    corollary_fixed_n_check, gap_shrinks, identity_check, ks_test, mertens_ratio_table,
    totient_harmonic_ratio, williams_slope, ConvergenceRow, DenominatorCut, IdentityCheck,
    MertensVariant, TotientMode,
};
use dickman_lab::models::{
    expected_log, sample_log_bx, sample_log_values, ExponentLaw, RandomIntegerModel, DEFAULT_SEED,
};
use dickman_lab::primes::{empirical_density, SubsetSpec};
use serde::Serialize;

use crate::config::SubsetArg;
use crate::output::{CheckStatus, Emitter};
use crate::{
    Command, CutArg, DickmanCommand, ExactArg, MertensCommand, ModelArgs, OutputArgs, VariantArg,
};

pub enum Status {
    Pass,
    Fail(String),
}

pub fn run(command: Command) -> Result<Status> {
    match command {
        Command::Primes(a) => primes(a),
        Command::Dickman(DickmanCommand::Table(a)) => dickman_table(a),
        Command::Dickman(DickmanCommand::Constant(a)) => dickman_constant(a),
        Command::Mertens(MertensCommand::Ratio(a)) => mertens_ratio(a),
        Command::Identity(a) => identity(a),
        Command::PhiRatio(a) => phi_ratio(a),
        Command::Williams(a) => williams(a),
        Command::Sample(a) => sample(a),
        Command::Ks(a) => ks(a),
    }
}

fn emitter(out: OutputArgs) -> Emitter {
    Emitter { format: out.format, out: out.out }
}

fn exactness(arg: ExactArg) -> Exactness {
    match arg {
        ExactArg::Auto => Exactness::Auto,
        ExactArg::On => Exactness::Exact,
        ExactArg::Off => Exactness::Float,
    }
}

/// Emit, then turn a judged failure into exit status 2.
fn finish<R: Serialize, D: Serialize>(
    emitter: &Emitter,
    command: &str,
    status: CheckStatus,
    failure: Option<String>,
    rows: impl IntoIterator<Item = R>,
    data: D,
) -> Result<Status> {
    emitter.emit(command, status, rows, data)?;
    Ok(match (status, failure) {
        (CheckStatus::Fail, reason) => Status::Fail(reason.unwrap_or_else(|| command.to_string())),
        _ => Status::Pass,
    })
}

#[derive(Serialize)]
struct BandVerdict {
    band: Band,
    judged: bool,
    passed: Option<bool>,
}

fn verdict(band: Band, judged: bool, passed: bool) -> (CheckStatus, BandVerdict) {
    let status = match (judged, passed) {
        (false, _) => CheckStatus::Report,
        (true, true) => CheckStatus::Pass,
        (true, false) => CheckStatus::Fail,
    };
    (status, BandVerdict { band, judged, passed: judged.then_some(passed) })
}

#[derive(Serialize)]
struct PrimesRow {
    n: u64,
    count: usize,
    density: f64,
    theta: f64,
}

fn primes(a: crate::PrimesArgs) -> Result<Status> {
    let max = a.n.iter().copied().max().unwrap_or(2);
    let subset = a.subset.subset.build(a.subset.theta, max)?;
    let rows = a
        .n
        .iter()
        .map(|&n| {
            Ok(PrimesRow {
                n,
                count: subset.up_to_bound(n)?.len(),
                density: empirical_density(&subset, n)?,
                theta: subset.theta(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    #[derive(Serialize)]
    struct Data<'a> {
        subset: &'a SubsetSpec,
        rows: &'a [PrimesRow],
    }
    let data = Data { subset: subset.spec(), rows: &rows };
    finish(&emitter(a.output), "primes", CheckStatus::Report, None, &rows, data)
}

fn dickman_table(a: crate::DickmanTableArgs) -> Result<Status> {
    let sol = solve_rho(a.theta, a.xmax, a.h)?;
    let rows = sol.table();
    #[derive(Serialize)]
    struct Data<'a> {
        theta: f64,
        h: f64,
        x_max: f64,
        norm_const: f64,
        total_mass: f64,
        rows: &'a [dickman_lab::dickman::DickmanRow],
    }
    let data = Data {
        theta: sol.theta(),
        h: sol.step(),
        x_max: sol.x_max(),
        norm_const: sol.norm_const(),
        total_mass: sol.total_mass(),
        rows: &rows,
    };
    finish(&emitter(a.output), "dickman table", CheckStatus::Report, None, &rows, data)
}

#[derive(Serialize)]
struct ConstantRow {
    theta: f64,
    constant: f64,
}

fn dickman_constant(a: crate::DickmanConstantArgs) -> Result<Status> {
    let rows = a
        .theta
        .iter()
        .map(|&theta| Ok(ConstantRow { theta, constant: mertens_constant(theta)? }))
        .collect::<Result<Vec<_>>>()?;
    #[derive(Serialize)]
    struct Data<'a> {
        rows: &'a [ConstantRow],
    }
    finish(&emitter(a.output), "dickman constant", CheckStatus::Report, None, &rows, Data { rows: &rows })
}

/// `--k` must be given exactly when `needed`.
fn k_flag(k: Option<u32>, needed: bool, context: &str) -> Result<Option<u32>> {
    match (k, needed) {
        (Some(k), true) => Ok(Some(k)),
        (None, false) => Ok(None),
        (None, true) => bail!("--k is required for {context}"),
        (Some(_), false) => bail!("--k does not apply to {context}"),
    }
}

/// CSV form of a convergence row. Exact sums can run to thousands of digits,
/// so CSV carries them as floats; JSON keeps the `num/den` strings.
#[derive(Serialize)]
struct RatioRow {
    n: u64,
    lhs: f64,
    rhs: f64,
    ratio: f64,
    target: f64,
    gap: f64,
    relative_gap: f64,
}

impl From<&ConvergenceRow> for RatioRow {
    fn from(r: &ConvergenceRow) -> Self {
        RatioRow {
            n: r.n,
            lhs: r.lhs.to_f64(),
            rhs: r.rhs.to_f64(),
            ratio: r.ratio,
            target: r.target,
            gap: r.gap,
            relative_gap: r.relative_gap(),
        }
    }
}

fn mertens_ratio(a: crate::RatioArgs) -> Result<Status> {
    let label = match a.variant {
        VariantArg::Thm1i => "--variant thm1i",
        VariantArg::Thm1ii => "--variant thm1ii",
        VariantArg::Thm3 => "--variant thm3",
        VariantArg::Classic => "--variant classic",
    };
    let k = k_flag(a.k, matches!(a.variant, VariantArg::Thm1ii | VariantArg::Thm3), label)?;
    let variant = match (a.variant, k) {
        (VariantArg::Thm1i, _) => MertensVariant::Thm1i,
        (VariantArg::Thm1ii, Some(k)) => MertensVariant::Thm1ii(k),
        (VariantArg::Thm3, Some(k)) => MertensVariant::Thm3(k),
        (VariantArg::Classic, _) => MertensVariant::ClassicMertens,
        _ => unreachable!("k presence checked above"),
    };
    if variant == MertensVariant::ClassicMertens && a.subset.subset != SubsetArg::All {
        bail!("--subset must be all for --variant classic");
    }
    let cut = match a.cut {
        CutArg::N => DenominatorCut::AtN,
        CutArg::LargestPrime => DenominatorCut::AtLargestPrime,
    };
    let max = a.n.iter().copied().max().unwrap_or(2);
    let subset = a.subset.subset.build(a.subset.theta, max)?;
    let rows = mertens_ratio_table(&subset, variant, &a.n, cut, exactness(a.exact))?;

    let (band, min_n) = if variant == MertensVariant::ClassicMertens {
        (bands::CLASSIC_MERTENS, bands::CLASSIC_MIN_N)
    } else {
        (bands::RESTRICTED_MERTENS, bands::RESTRICTED_MIN_N)
    };
    let last = rows.last().context("no rows")?;
    let trend = gap_shrinks(&rows);
    let in_band = last.relative_gap() <= band.tolerance;
    let judged = last.n >= min_n && rows.len() >= 2;
    let (status, check) = verdict(band, judged, trend && in_band);
    let failure = format!(
        "relative gap {:.4} at N = {} (band {}), gap shrinking: {trend}",
        last.relative_gap(),
        last.n,
        band.tolerance
    );

    #[derive(Serialize)]
    struct Data<'a> {
        variant: MertensVariant,
        subset: &'a SubsetSpec,
        theta: f64,
        cut: DenominatorCut,
        gap_shrinks: bool,
        check: BandVerdict,
        rows: &'a [ConvergenceRow],
    }
    let data = Data {
        variant,
        subset: subset.spec(),
        theta: if variant == MertensVariant::ClassicMertens { 1.0 } else { subset.theta() },
        cut,
        gap_shrinks: trend,
        check,
        rows: &rows,
    };
    let csv_rows: Vec<RatioRow> = rows.iter().map(RatioRow::from).collect();
    finish(&emitter(a.output), "mertens ratio", status, Some(failure), csv_rows, data)
}

#[derive(Serialize)]
struct IdentityRow {
    primes: String,
    k: u32,
    terms: u64,
    lhs: String,
    rhs: String,
    equal: bool,
}

impl From<&IdentityCheck> for IdentityRow {
    fn from(c: &IdentityCheck) -> Self {
        IdentityRow {
            primes: c.primes.iter().map(u64::to_string).collect::<Vec<_>>().join(" "),
            k: c.k,
            terms: c.terms,
            lhs: c.lhs.to_string(),
            rhs: c.rhs.to_string(),
            equal: c.equal,
        }
    }
}

#[derive(Serialize)]
struct FixedNRow {
    n: u64,
    k: u32,
    ratio: f64,
    target: f64,
    relative_gap: f64,
    exact_terms: Option<u64>,
    exact_equal: Option<bool>,
}

fn identity(a: crate::IdentityArgs) -> Result<Status> {
    let out = emitter(a.output);
    if let Some(bound) = a.bound {
        if a.n.is_some() {
            bail!("--n does not apply with --bound");
        }
        let report = corollary_fixed_n_check(bound, a.k)?;
        let band = bands::FIXED_N_ASYMPTOTIC;
        let exact_ok = report.exact.as_ref().is_none_or(|c| c.equal);
        let judged = bound >= bands::FIXED_N_MIN_N;
        let in_band = report.asymptotic.relative_gap() <= band.tolerance;
        let (mut status, check) = verdict(band, judged, in_band);
        if !exact_ok {
            status = CheckStatus::Fail;
        }
        let row = FixedNRow {
            n: report.n,
            k: report.k,
            ratio: report.asymptotic.ratio,
            target: report.asymptotic.target,
            relative_gap: report.asymptotic.relative_gap(),
            exact_terms: report.exact.as_ref().map(|c| c.terms),
            exact_equal: report.exact.as_ref().map(|c| c.equal),
        };
        let failure = format!(
            "exact identity equal: {exact_ok}, asymptotic relative gap {:.4} (band {})",
            row.relative_gap, band.tolerance
        );
        #[derive(Serialize)]
        struct Data<'a> {
            report: &'a dickman_lab::experiments::FixedNReport,
            check: BandVerdict,
        }
        return finish(&out, "identity", status, Some(failure), [row], Data { report: &report, check });
    }

    let primes: Vec<u64> = match (a.primes, a.subset, a.n) {
        (Some(p), None, None) => p,
        (Some(_), _, Some(_)) => bail!("--n does not apply with --primes"),
        (None, Some(subset), Some(n)) => {
            let n = usize::try_from(n).context("--n is too large")?;
            subset.first_primes(n)?
        }
        (None, None, _) => bail!("one of --primes, --subset with --n, or --bound is required"),
        _ => bail!("--subset needs --n"),
    };
    let check = identity_check(&primes, a.k)?;
    let status = if check.equal { CheckStatus::Pass } else { CheckStatus::Fail };
    let row = IdentityRow::from(&check);
    finish(&out, "identity", status, Some("lhs != rhs".into()), [row], &check)
}

fn phi_ratio(a: crate::PhiRatioArgs) -> Result<Status> {
    let mode = if a.companion { TotientMode::AllTotient } else { TotientMode::Restricted };
    if a.companion && a.k != 2 {
        bail!("--k does not apply with --companion");
    }
    let mode_exact = exactness(a.exact);
    let rows = a
        .n
        .iter()
        .map(|&n| Ok(totient_harmonic_ratio(n, a.k, mode, mode_exact)?))
        .collect::<Result<Vec<_>>>()?;
    let band = bands::TOTIENT_RATIO;
    let judged_rows: Vec<&ConvergenceRow> =
        rows.iter().filter(|r| r.n >= bands::TOTIENT_MIN_N).collect();
    let worst = judged_rows.iter().map(|r| r.relative_gap()).fold(0.0, f64::max);
    let (status, check) = verdict(band, !judged_rows.is_empty(), worst <= band.tolerance);
    let failure = format!("relative gap {worst:.4} exceeds {}", band.tolerance);
    #[derive(Serialize)]
    struct Data<'a> {
        mode: TotientMode,
        k: Option<u32>,
        check: BandVerdict,
        rows: &'a [ConvergenceRow],
    }
    let data = Data { mode, k: (!a.companion).then_some(a.k), check, rows: &rows };
    let csv_rows: Vec<RatioRow> = rows.iter().map(RatioRow::from).collect();
    finish(&emitter(a.output), "phi-ratio", status, Some(failure), csv_rows, data)
}

fn williams(a: crate::WilliamsArgs) -> Result<Status> {
    let (l, j) = match a.subset {
        SubsetArg::All => (1, 0),
        SubsetArg::Residue { modulus, residue } => (modulus, residue),
        SubsetArg::File(_) => bail!("--subset for williams must be all or residue:L:J"),
    };
    let fit = williams_slope(l, j, &a.n)?;
    let band = bands::WILLIAMS_SLOPE;
    let off = (fit.slope - fit.target).abs();
    let (status, check) = verdict(band, true, off <= band.tolerance);
    let failure = format!("slope {:.4} is {off:.4} from {:.4}", fit.slope, fit.target);
    #[derive(Serialize)]
    struct Data<'a> {
        fit: &'a dickman_lab::experiments::WilliamsFit,
        check: BandVerdict,
    }
    finish(&emitter(a.output), "williams", status, Some(failure), &fit.points, Data { fit: &fit, check })
}

struct Built {
    model: RandomIntegerModel,
    seed: u64,
}

fn build_model(m: &ModelArgs) -> Result<Built> {
    let k = k_flag(m.k, m.model != 1, &format!("--model {}", m.model))?;
    let law = ExponentLaw::for_model(m.model, k)?;
    let n = usize::try_from(m.n).context("--n is too large")?;
    let subset = m.subset.subset.build_count(m.subset.theta, n)?;
    let model = RandomIntegerModel::new(&subset, n, law)?;
    Ok(Built { model, seed: m.seed.seed.unwrap_or(DEFAULT_SEED) })
}

#[derive(Serialize)]
struct SampleRow {
    draw_index: usize,
    log_value: f64,
    normalized_log: f64,
}

fn sample(a: crate::SampleArgs) -> Result<Status> {
    let Built { model, seed } = build_model(&a.model)?;
    let count = usize::try_from(a.samples).context("--samples is too large")?;
    let logs = if a.bx {
        sample_log_bx(&model, seed, count)?
    } else {
        sample_log_values(&model, seed, count)?
    };
    let mean = expected_log(&model);
    let rows: Vec<SampleRow> = logs
        .iter()
        .enumerate()
        .map(|(draw_index, &log_value)| SampleRow {
            draw_index,
            log_value,
            normalized_log: log_value / mean,
        })
        .collect();
    #[derive(Serialize)]
    struct Data<'a> {
        model_id: u8,
        k: Option<u32>,
        n: usize,
        theta: f64,
        seed: u64,
        bx: bool,
        expected_log: f64,
        rows: &'a [SampleRow],
    }
    let data = Data {
        model_id: model.model_id(),
        k: model.law().k(),
        n: model.n(),
        theta: model.theta(),
        seed,
        bx: a.bx,
        expected_log: mean,
        rows: &rows,
    };
    finish(&emitter(a.output), "sample", CheckStatus::Report, None, &rows, data)
}

fn ks(a: crate::KsArgs) -> Result<Status> {
    let Built { model, seed } = build_model(&a.model)?;
    let count = usize::try_from(a.samples).context("--samples is too large")?;
    let sol = solve_rho(model.theta(), a.xmax, a.h)?;
    let report = ks_test(&model, &sol, count, seed)?;
    let band = match (model.model_id(), model.law().k()) {
        (1, _) => Some(bands::KS_MODEL_1),
        (3, Some(2)) => Some(bands::KS_MODEL_3),
        _ => None,
    };
    let (status, check) = match band {
        Some(band) => {
            let (s, v) = verdict(
                band,
                model.n() >= bands::KS_MIN_PRIMES,
                report.ks_statistic < band.tolerance,
            );
            (s, Some(v))
        }
        None => (CheckStatus::Report, None),
    };
    let failure = format!("KS statistic {:.4} outside band", report.ks_statistic);
    #[derive(Serialize)]
    struct Data<'a> {
        report: &'a dickman_lab::experiments::KsReport,
        k: Option<u32>,
        check: Option<BandVerdict>,
    }
    let data = Data { report: &report, k: model.law().k(), check };
    finish(&emitter(a.output), "ks", status, Some(failure), [&report], data)
}
