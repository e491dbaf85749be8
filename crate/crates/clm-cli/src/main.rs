//! The `clm` binary: tables, verification suites, and matrix oracles.
//!
//! Exit status contract: 0 all pass, 1 verification failure, 2 invalid
//! configuration, 3 enumeration budget exceeded. Identical configuration
//! and seed produce byte-identical output.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;

use clm::distributions::{distribution_table, moment, Formula};
use clm::groups::{enumerate_groups, GroupEnumeration, GroupType};
use clm::interval::rational_to_f64;
use clm::qseries::{one_minus_product, one_plus_product_inverse, t_series};
use clm::report::{
    census_csv, distribution_csv, moments_csv, render_check_lines, VerifyReport,
    SCHEMA_VERSION,
};
use clm::symp::census::{census, CensusMode, CokernelCensus};
use clm::symp::checks::infi_sum;
use clm::symp::lifted::lifted_nu_bracket_one;
use clm::symp::enumerate::DEFAULT_BUDGET;
use clm::symp::{Constraint, SimilitudeGroupSpec};
use clm::verify::{identity_suite, SuiteConfig};
use clm::{ClmError, Result};

#[derive(Parser)]
#[command(name = "clm", version, about = "Exact mu_x distributions and their matrix oracle")]
struct Cli {
    /// Worker pool size; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Report,
}

#[derive(Args)]
struct CommonNumeric {
    #[arg(long, default_value_t = 3)]
    ell: u64,
    /// Absolute tail tolerance for infinite products.
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tabulate a mass formula over all groups up to l^window.
    Table {
        #[command(flatten)]
        numeric: CommonNumeric,
        /// Closed form for the multiplier class 1 mod l^xi.
        #[arg(long, conflicts_with = "malle_u")]
        xi: Option<u32>,
        /// Malle mass at parameter u instead of a mu_x mass.
        #[arg(long)]
        malle_u: Option<u64>,
        #[arg(long, default_value_t = 3)]
        window: u32,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run the full identity suite and report PASS/FAIL per identity.
    Verify {
        #[command(flatten)]
        numeric: CommonNumeric,
        #[arg(long)]
        budget: Option<u128>,
        /// Corrupt the named identity (negative control for the suite).
        #[arg(long)]
        mutate: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Report)]
        format: Format,
    },
    /// Cokernel census of a similitude group, with predictions when available.
    Oracle {
        #[arg(long, default_value_t = 1)]
        g: usize,
        #[arg(long, default_value_t = 3)]
        ell: u64,
        #[arg(long, default_value_t = 1)]
        rho: u32,
        /// Single multiplier fiber x.
        #[arg(long, conflicts_with = "xi")]
        fiber: Option<u64>,
        /// Multiplier class 1 mod l^xi.
        #[arg(long)]
        xi: Option<u32>,
        /// Sample size; exhaustive enumeration when absent.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Truncated moment sums against their exact targets.
    Moments {
        #[command(flatten)]
        numeric: CommonNumeric,
        #[arg(long, default_value_t = 1)]
        xi: u32,
        /// Largest truncation window l^window.
        #[arg(long, default_value_t = 8)]
        window: u32,
        /// Tabulate moments of every A with |A| <= l^max_log_order.
        #[arg(long, default_value_t = 2)]
        max_log_order: u32,
    },
    /// The q-series constants behind the closed forms.
    Qseries {
        #[command(flatten)]
        numeric: CommonNumeric,
    },
}

fn tolerance_rational(tol: f64) -> Result<BigRational> {
    if !(tol > 0.0) {
        return Err(ClmError::Config(format!("tolerance must be positive, got {tol}")));
    }
    BigRational::from_float(tol)
        .ok_or_else(|| ClmError::Config(format!("tolerance {tol} is not finite")))
}

fn resolve_budget(flag: Option<u128>) -> Result<u128> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var("CLM_BUDGET") {
        Ok(s) => s
            .parse()
            .map_err(|_| ClmError::Config(format!("CLM_BUDGET is not an integer: {s}"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| ClmError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn run_table(
    out: &Option<PathBuf>,
    numeric: &CommonNumeric,
    xi: Option<u32>,
    malle_u: Option<u64>,
    window: u32,
    format: Format,
) -> Result<()> {
    let tol = tolerance_rational(numeric.tolerance)?;
    let formula = match (xi, malle_u) {
        (_, Some(u)) => Formula::Malle { u },
        (Some(x), None) => match x {
            1 | 2 => Formula::MuClosed { xi: x },
            _ => Formula::MuSeries { xi: x },
        },
        (None, None) => Formula::MuClosed { xi: 1 },
    };
    let table = distribution_table(numeric.ell, formula, window, &tol)?;
    let content = match format {
        Format::Csv => distribution_csv(&table),
        Format::Report => {
            let partial = table.partial_mass();
            let rows: Vec<serde_json::Value> = table
                .rows
                .iter()
                .map(|(a, m)| {
                    serde_json::json!({
                        "group": a.to_string(),
                        "exact_num": m.exact_part.numer().to_string(),
                        "exact_den": m.exact_part.denom().to_string(),
                        "value": m.value.to_f64(),
                        "radius": m.value.radius_f64(),
                    })
                })
                .collect();
            let doc = serde_json::json!({
                "schema_version": SCHEMA_VERSION,
                "ell": table.ell,
                "formula": table.formula,
                "window": table.window,
                "rows": rows,
                "partial_mass": partial.to_f64(),
                "partial_mass_radius": partial.radius_f64(),
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())
        }
    };
    emit(out, &content)
}

fn run_verify(
    out: &Option<PathBuf>,
    numeric: &CommonNumeric,
    budget: Option<u128>,
    mutate: Option<String>,
    format: Format,
) -> Result<bool> {
    let mut cfg = SuiteConfig::new(numeric.ell, resolve_budget(budget)?);
    cfg.mutate = mutate.clone();
    let checks = identity_suite(&cfg)?;
    let all_passed = checks.iter().all(|c| c.passed);
    let lines = render_check_lines(&checks);
    match format {
        Format::Csv => {
            let mut csv = String::from("name,passed,detail\n");
            for c in &checks {
                let _ = writeln!(csv, "{},{},\"{}\"", c.name, c.passed, c.detail);
            }
            emit(out, &csv)?;
            if out.is_some() {
                print!("{lines}");
            }
        }
        Format::Report => {
            let report = VerifyReport::new(cfg.ell, cfg.budget, mutate, &checks);
            let json = format!("{}\n", serde_json::to_string_pretty(&report).unwrap());
            emit(out, &json)?;
            if out.is_some() {
                print!("{lines}");
            }
        }
    }
    if out.is_none() {
        print!("{lines}");
    }
    Ok(all_passed)
}

/// nu^{<xi>} estimate from two sampled censuses one bracket level apart.
/// The xi-class is l times larger than the (xi+1)-class, so
/// nu = (l f_xi - f_{xi+1}) / (l - 1) in frequency terms.
fn sampled_nu(
    lo: &CokernelCensus,
    hi: &CokernelCensus,
    a: &GroupType,
    ell: u64,
) -> (f64, f64) {
    let l = ell as f64;
    let f1 = rational_to_f64(&lo.frequency(a));
    let f2 = rational_to_f64(&hi.frequency(a));
    let se1 = lo.standard_error(a);
    let se2 = hi.standard_error(a);
    let nu = (l * f1 - f2) / (l - 1.0);
    let se = ((l * se1).powi(2) + se2.powi(2)).sqrt() / (l - 1.0);
    (nu, se)
}

/// Exact nu^{<xi>} predictions over small A where the orbit sum applies.
fn nu_predictions(
    g: usize,
    ell: u64,
    rho: u32,
    xi: u32,
    budget: u128,
) -> Vec<(GroupType, BigRational)> {
    let mut out = Vec::new();
    if xi == 0 || rho <= xi {
        return out;
    }
    if rho == 2 && xi == 1 {
        // The corank-stratified lift census is exact for the cyclic
        // types at level 2 regardless of g.
        for parts in [vec![], vec![1], vec![2]] {
            let a = GroupType::new(ell, parts);
            if let Ok(v) = lifted_nu_bracket_one(g, ell, &a) {
                out.push((a, v));
            }
        }
        return out;
    }
    for a in enumerate_groups(&GroupEnumeration::new(ell, 2)) {
        if a.rank() > 2 * g || ell.pow(rho) <= ell.pow(a.max_exponent()) {
            continue;
        }
        if let Ok(v) = infi_sum(&a, g, rho, xi, budget) {
            out.push((a, v));
        }
    }
    out
}

fn run_oracle(
    out: &Option<PathBuf>,
    g: usize,
    ell: u64,
    rho: u32,
    fiber: Option<u64>,
    xi: Option<u32>,
    samples: Option<u64>,
    seed: u64,
    budget: Option<u128>,
) -> Result<()> {
    let budget = resolve_budget(budget)?;
    let constraint = match (fiber, xi) {
        (Some(x), None) => Constraint::Fiber(x),
        (None, Some(x)) => Constraint::Bracket(x),
        (None, None) => Constraint::Bracket(0),
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    let spec = SimilitudeGroupSpec::new(g, ell, rho, constraint)?;
    let mode = match samples {
        Some(n) => CensusMode::Sampled { n, seed },
        None => CensusMode::Exhaustive,
    };
    let main_census = census(&spec, mode, budget)?;
    let mut content = census_csv(&main_census);

    // Side-by-side nu comparison when the bracket pair is available.
    if let Constraint::Bracket(x) = constraint {
        if x >= 1 && x < rho {
            let predictions = nu_predictions(g, ell, rho, x, budget);
            if !predictions.is_empty() {
                let hi_spec =
                    SimilitudeGroupSpec::new(g, ell, rho, Constraint::Bracket(x + 1))?;
                let hi = census(&hi_spec, mode, budget)?;
                content.push('\n');
                content.push_str("group,nu_estimate,nu_se,nu_exact,within_3se\n");
                for (a, exact) in predictions {
                    let exact_f = rational_to_f64(&exact);
                    let (nu, se) = match mode {
                        CensusMode::Sampled { .. } => sampled_nu(&main_census, &hi, &a, ell),
                        CensusMode::Exhaustive => {
                            let lo_n = BigInt::from(main_census.count(&a))
                                - BigInt::from(hi.count(&a));
                            let lo_t = BigInt::from(main_census.total)
                                - BigInt::from(hi.total);
                            (rational_to_f64(&BigRational::new(lo_n, lo_t)), 0.0)
                        }
                    };
                    let ok = (nu - exact_f).abs() <= 3.0 * se.max(1e-12);
                    let _ = writeln!(
                        content,
                        "{a},{nu:.12e},{se:.12e},{exact_f:.12e},{ok}"
                    );
                }
            }
        }
    }
    emit(out, &content)
}

fn run_moments(
    out: &Option<PathBuf>,
    numeric: &CommonNumeric,
    xi: u32,
    window: u32,
    max_log_order: u32,
) -> Result<()> {
    let tol = tolerance_rational(numeric.tolerance)?;
    let mut reports = Vec::new();
    for a in enumerate_groups(&GroupEnumeration::new(numeric.ell, max_log_order)) {
        let start = a.log_order().max(4).min(window);
        for w in start..=window {
            reports.push(moment(&a, xi, w, &tol)?);
        }
    }
    emit(out, &moments_csv(&reports))
}

fn run_qseries(out: &Option<PathBuf>, numeric: &CommonNumeric) -> Result<()> {
    let tol = tolerance_rational(numeric.tolerance)?;
    let ell = numeric.ell;
    let trivial = one_plus_product_inverse(ell, &tol);
    let nontrivial = one_minus_product(ell, &tol);
    let series = t_series(ell, 30);
    let mut content = String::from("name,value,radius\n");
    let _ = writeln!(
        content,
        "one_plus_product_inverse,{:.12e},{:.12e}",
        trivial.to_f64(),
        trivial.radius_f64()
    );
    let _ = writeln!(
        content,
        "one_minus_nontrivial,{:.12e},{:.12e}",
        1.0 - nontrivial.to_f64(),
        nontrivial.radius_f64()
    );
    let _ = writeln!(
        content,
        "malle_u1_constant,{:.12e},{:.12e}",
        trivial.to_f64() * (ell as f64 + 1.0) / ell as f64,
        trivial.radius_f64() * (ell as f64 + 1.0) / ell as f64
    );
    let _ = writeln!(content, "t_series_30,{:.12e},0", rational_to_f64(&series));
    emit(out, &content)
}

fn dispatch(cli: &Cli) -> Result<bool> {
    match &cli.cmd {
        Cmd::Table { numeric, xi, malle_u, window, format } => {
            run_table(&cli.out, numeric, *xi, *malle_u, *window, *format)?;
            Ok(true)
        }
        Cmd::Verify { numeric, budget, mutate, format } => {
            run_verify(&cli.out, numeric, *budget, mutate.clone(), *format)
        }
        Cmd::Oracle { g, ell, rho, fiber, xi, samples, seed, budget } => {
            run_oracle(&cli.out, *g, *ell, *rho, *fiber, *xi, *samples, *seed, *budget)?;
            Ok(true)
        }
        Cmd::Moments { numeric, xi, window, max_log_order } => {
            run_moments(&cli.out, numeric, *xi, *window, *max_log_order)?;
            Ok(true)
        }
        Cmd::Qseries { numeric } => {
            run_qseries(&cli.out, numeric)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                ClmError::BudgetExceeded { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
