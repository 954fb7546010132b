//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//!
//! Run alone with `cargo test -p dickman-lab-cli --test acceptance`.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use dickman_lab::arith::{Exactness, ExactRational};
use dickman_lab::constants::{gamma, EULER_GAMMA};
use dickman_lab::dickman::{gd_cdf, gd_mean, solve_rho, DEFAULT_STEP, DEFAULT_X_MAX};
use dickman_lab::experiments::{
    gap_shrinks, identity_check, ks_test, mertens_ratio_table, totient_harmonic_ratio,
    williams_slope, DenominatorCut, MertensVariant, TotientMode,
};
use dickman_lab::models::{
    bx_product_pmf, exponent_pmf, model_pmf, ExponentLaw, FactoredInteger, RandomIntegerModel,
    DEFAULT_SEED,
};
use dickman_lab::primes::{PrimeSubset, SubsetSpec};

type Check = Result<String, String>;

struct Criterion {
    id: u8,
    name: &'static str,
    limit: Duration,
    run: fn() -> Check,
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn r(n: i64, d: i64) -> ExactRational {
    ExactRational::new(n, d).unwrap()
}

const FIRST_PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

fn exact_identity() -> Check {
    let mut cases = 0;
    let residue = PrimeSubset::with_at_least(SubsetSpec::Residue { modulus: 4, residue: 1 }, 8)
        .map_err(err)?;
    for k in 2..=4 {
        for n in 1..=8 {
            for primes in [&FIRST_PRIMES[..n], residue.first(n).map_err(err)?] {
                let c = identity_check(primes, k).map_err(err)?;
                // Independent right-hand side: prod p/(p-1).
                let rhs: ExactRational = primes.iter().map(|&p| r(p as i64, p as i64 - 1)).product();
                ensure(c.equal && c.lhs == rhs, format!("{primes:?} k={k}: {} != {rhs}", c.lhs))?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} prime sets exact"))
}

fn vectors(n: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=max).map(move |m| {
                    let mut w = v.clone();
                    w.push(m);
                    w
                })
            })
            .collect();
    }
    out
}

fn exact_pmf() -> Check {
    let mut sums = 0;
    for k in 2..=4u32 {
        for n in 1..=8 {
            for law in [ExponentLaw::ConditionedBelowK(k), ExponentLaw::TruncatedAtKMinus1(k)] {
                let model =
                    RandomIntegerModel::from_primes(FIRST_PRIMES[..n].to_vec(), 1.0, law).map_err(err)?;
                let total: ExactRational = vectors(n, k - 1)
                    .into_iter()
                    .map(|c| model_pmf(&model, &FactoredInteger::new(c)))
                    .sum::<Result<_, _>>()
                    .map_err(err)?;
                ensure(total == ExactRational::one(), format!("{law:?} N={n}: total {total}"))?;
                sums += 1;
            }
        }
    }
    for n in 1..=4 {
        let model =
            RandomIntegerModel::from_primes(FIRST_PRIMES[..n].to_vec(), 1.0, ExponentLaw::Geometric)
                .map_err(err)?;
        for e in 0..=12u32 {
            let total: ExactRational = vectors(n, e)
                .into_iter()
                .map(|c| model_pmf(&model, &FactoredInteger::new(c)))
                .sum::<Result<_, _>>()
                .map_err(err)?;
            let expected: ExactRational = FIRST_PRIMES[..n]
                .iter()
                .map(|&p| ExactRational::one() - r(1, p as i64).pow(e as i32 + 1))
                .product();
            ensure(total == expected, format!("model 1 N={n} E={e}: {total} != {expected}"))?;
            sums += 1;
        }
    }
    Ok(format!("{sums} exact sums"))
}

fn dickman_solver() -> Check {
    let sol = solve_rho(1.0, DEFAULT_X_MAX, DEFAULT_STEP).map_err(err)?;
    let mut worst_rho = 0.0f64;
    for i in 0..=1000 {
        let x = 1.0 + i as f64 / 1000.0;
        worst_rho = worst_rho.max((sol.rho(x).map_err(err)? - (1.0 - x.ln())).abs());
    }
    ensure(worst_rho < 1e-8, format!("rho_1 error {worst_rho:e} on [1,2]"))?;
    let (mut worst_mass, mut worst_cdf, mut worst_mean) = (0.0f64, 0.0f64, 0.0f64);
    for theta in [0.25, 0.5, 1.0] {
        let sol = solve_rho(theta, DEFAULT_X_MAX, DEFAULT_STEP).map_err(err)?;
        worst_mass = worst_mass.max((sol.total_mass() - 1.0).abs());
        let one_hand = (-EULER_GAMMA * theta).exp() / gamma(theta + 1.0);
        worst_cdf = worst_cdf.max((gd_cdf(&sol, 1.0).map_err(err)? - one_hand).abs());
        worst_mean = worst_mean.max((gd_mean(&sol).map_err(err)? - theta).abs());
    }
    ensure(worst_mass < 1e-4, format!("mass error {worst_mass:e}"))?;
    ensure(worst_cdf < 1e-6, format!("cdf(1) error {worst_cdf:e}"))?;
    ensure(worst_mean < 1e-3, format!("mean error {worst_mean:e}"))?;
    Ok(format!(
        "rho {worst_rho:.1e}, mass {worst_mass:.1e}, cdf(1) {worst_cdf:.1e}, mean {worst_mean:.1e}"
    ))
}

fn classic_mertens() -> Check {
    let all = PrimeSubset::up_to(SubsetSpec::All, 100_000).map_err(err)?;
    let rows = mertens_ratio_table(
        &all,
        MertensVariant::ClassicMertens,
        &[100, 100_000],
        DenominatorCut::AtN,
        Exactness::Auto,
    )
    .map_err(err)?;
    let target = EULER_GAMMA.exp();
    let last = &rows[1];
    ensure((last.ratio - target).abs() / target < 0.05, format!("ratio {} at 10^5", last.ratio))?;
    ensure(rows[1].gap < rows[0].gap, "gap did not shrink")?;
    Ok(format!("ratio {:.4} vs {target:.4} (gap {:.2}% from {:.2}%)", last.ratio,
        100.0 * last.relative_gap(), 100.0 * rows[0].relative_gap()))
}

fn restricted_mertens() -> Check {
    let n_list = [100, 1_000, 10_000, 100_000, 1_000_000];
    let subset =
        PrimeSubset::up_to(SubsetSpec::Residue { modulus: 4, residue: 1 }, 1_000_000).map_err(err)?;
    let rows =
        mertens_ratio_table(&subset, MertensVariant::Thm1i, &n_list, DenominatorCut::AtN, Exactness::Auto)
            .map_err(err)?;
    let target = (EULER_GAMMA / 2.0).exp() * gamma(1.5);
    let gaps: Vec<f64> = rows.iter().map(|r| r.relative_gap()).collect();
    let last = rows.last().unwrap();
    ensure((last.target - target).abs() < 1e-12, "wrong target")?;
    ensure(last.relative_gap() < 0.15, format!("relative gap {:.4} at 10^6", last.relative_gap()))?;
    ensure(gap_shrinks(&rows), format!("gaps {gaps:.4?}"))?;
    ensure(gaps.windows(2).all(|w| w[1] < w[0]), format!("gap not shrinking every decade: {gaps:.4?}"))?;
    Ok(format!("ratio {:.4} vs {target:.4}, relative gaps {gaps:.4?}", last.ratio))
}

fn ks_for(n: usize, law: ExponentLaw) -> Result<f64, String> {
    let all = PrimeSubset::with_at_least(SubsetSpec::All, n).map_err(err)?;
    let model = RandomIntegerModel::new(&all, n, law).map_err(err)?;
    let sol = solve_rho(1.0, DEFAULT_X_MAX, DEFAULT_STEP).map_err(err)?;
    Ok(ks_test(&model, &sol, 10_000, DEFAULT_SEED).map_err(err)?.ks_statistic)
}

fn distributional() -> Check {
    let m1 = ks_for(10_000, ExponentLaw::Geometric)?;
    let m3 = ks_for(10_000, ExponentLaw::TruncatedAtKMinus1(2))?;
    let small = ks_for(100, ExponentLaw::Geometric)?;
    ensure(m1 < 0.05, format!("model 1 KS {m1:.4}"))?;
    ensure(m3 < 0.07, format!("model 3 KS {m3:.4}"))?;
    ensure(m1 < small, format!("KS at N=10^4 {m1:.4} not below N=10^2 {small:.4}"))?;
    Ok(format!("model 1 {m1:.4}, model 3 {m3:.4}, N=10^2 {small:.4} (seed {DEFAULT_SEED})"))
}

fn williams() -> Check {
    let n_list = [1_000, 10_000, 100_000, 1_000_000];
    let mut out = Vec::new();
    for (l, j) in [(4, 1), (3, 2)] {
        let fit = williams_slope(l, j, &n_list).map_err(err)?;
        ensure((fit.slope - 0.5).abs() <= 0.1, format!("({l},{j}) slope {:.4}", fit.slope))?;
        out.push(format!("({l},{j}) slope {:.4}", fit.slope));
    }
    Ok(out.join(", "))
}

fn totient() -> Check {
    let n = 1_000_000;
    let cases = [
        (2, TotientMode::Restricted, 1.0),
        (2, TotientMode::AllTotient, 1.9435964368207592),
        (3, TotientMode::Restricted, 1.0),
    ];
    let mut out = Vec::new();
    for (k, mode, target) in cases {
        let row = totient_harmonic_ratio(n, k, mode, Exactness::Auto).map_err(err)?;
        ensure((row.target - target).abs() < 1e-9, format!("{mode:?} target {}", row.target))?;
        ensure(
            (row.ratio - target).abs() / target < 0.10,
            format!("{mode:?} k={k} ratio {:.4} vs {target:.4}", row.ratio),
        )?;
        out.push(format!("{:.4}", row.ratio / target));
    }
    Ok(format!("ratio/target {}", out.join(", ")))
}

/// Direct pmfs of the three exponent laws, written from their definitions.
fn exponent_oracle(law: ExponentLaw, p: u64, m: u32) -> ExactRational {
    let p = p as i64;
    let geometric = |m: u32| (ExactRational::one() - r(1, p)) * r(1, p).pow(m as i32);
    match law {
        ExponentLaw::Geometric => geometric(m),
        ExponentLaw::ConditionedBelowK(k) => {
            let below: ExactRational = (0..k).map(geometric).sum();
            if m < k { &geometric(m) / &below } else { ExactRational::zero() }
        }
        ExponentLaw::TruncatedAtKMinus1(k) => match m.cmp(&(k - 1)) {
            std::cmp::Ordering::Less => geometric(m),
            std::cmp::Ordering::Equal => r(1, p).pow(m as i32),
            std::cmp::Ordering::Greater => ExactRational::zero(),
        },
    }
}

fn bx_decomposition() -> Check {
    let mut checked = 0;
    for p in [2u64, 3, 5, 7] {
        let mut laws = vec![ExponentLaw::Geometric];
        for k in 2..=6 {
            laws.push(ExponentLaw::ConditionedBelowK(k));
            laws.push(ExponentLaw::TruncatedAtKMinus1(k));
        }
        for law in laws {
            let top = law.max_exponent().unwrap_or(50).min(50);
            for m in 0..=top {
                let bx = bx_product_pmf(law, p, m).map_err(err)?;
                let t = exponent_pmf(law, p, m).map_err(err)?;
                let oracle = exponent_oracle(law, p, m);
                ensure(bx == oracle && t == oracle, format!("p={p} {law:?} m={m}: {bx} vs {oracle}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (p, law, m) triples exact"))
}

fn reproducible_cli() -> Check {
    let calls: &[&[&str]] = &[
        &["sample", "--n", "200", "--samples", "500", "--seed", "42"],
        &["sample", "--n", "200", "--samples", "500", "--model", "3", "--k", "2", "--bx", "--format", "json"],
        &["ks", "--n", "1000", "--samples", "2000", "--format", "json"],
        &["mertens", "ratio", "--subset", "residue:4:1", "--n", "100,1000,10000", "--format", "json"],
        &["dickman", "table", "--theta", "0.5", "--xmax", "6", "--h", "0.01"],
        &["phi-ratio", "--n", "1000,10000", "--companion"],
    ];
    for args in calls {
        let mut outputs = Vec::new();
        for _ in 0..2 {
            let out = Command::new(env!("CARGO_BIN_EXE_dickman-lab"))
                .args(*args)
                .output()
                .map_err(err)?;
            ensure(out.status.success(), format!("{args:?} exited {:?}", out.status.code()))?;
            outputs.push(out.stdout);
        }
        ensure(outputs[0] == outputs[1], format!("{args:?} differs between runs"))?;
    }
    Ok(format!("{} invocations byte-identical", calls.len()))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "exact identity", limit: Duration::from_secs(10), run: exact_identity },
        Criterion { id: 2, name: "exact pmf suite", limit: Duration::from_secs(10), run: exact_pmf },
        Criterion { id: 3, name: "Dickman solver", limit: Duration::from_secs(30), run: dickman_solver },
        Criterion { id: 4, name: "classical Mertens", limit: Duration::from_secs(60), run: classic_mertens },
        Criterion { id: 5, name: "restricted Mertens, theta = 1/2", limit: Duration::from_secs(300), run: restricted_mertens },
        Criterion { id: 6, name: "KS distributional convergence", limit: Duration::from_secs(120), run: distributional },
        Criterion { id: 7, name: "Williams exponent", limit: Duration::from_secs(120), run: williams },
        Criterion { id: 8, name: "totient ratios", limit: Duration::from_secs(120), run: totient },
        Criterion { id: 9, name: "B/X decomposition", limit: Duration::from_secs(1), run: bx_decomposition },
        Criterion { id: 10, name: "CLI reproducibility", limit: Duration::from_secs(300), run: reproducible_cli },
    ];
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if elapsed <= c.limit => (true, d),
            Ok(d) => (false, format!("{d}; over time limit")),
            Err(e) => (false, e),
        };
        failures += usize::from(!ok);
        println!(
            "{} [{:>2}] {:<34} {:>7.2}s / {:>3}s  {detail}",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            c.limit.as_secs(),
        );
    }
    println!("acceptance: {} of {} passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
