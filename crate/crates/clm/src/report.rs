//! Machine-readable output: CSV renderings of tables and censuses plus a
//! versioned structured report. Everything here must be byte-stable for
//! a fixed configuration, so floats are rendered with a fixed notation
//! and maps are walked in canonical order.

use std::fmt::Write as _;

use serde::Serialize;

use crate::distributions::{DistributionTable, MomentReport};
use crate::groups::GroupType;
use crate::interval::rational_to_f64;
use crate::symp::census::{CensusMode, CokernelCensus};
use crate::symp::checks::CheckReport;
use crate::symp::Constraint;

pub const SCHEMA_VERSION: u32 = 1;

fn fixed(x: f64) -> String {
    format!("{x:.12e}")
}

fn rank_l2(a: &GroupType) -> usize {
    a.rank_pow(2)
}

/// CSV for a distribution table: one row per group in canonical order,
/// then a `total` summary row carrying the partial mass.
pub fn distribution_csv(table: &DistributionTable) -> String {
    let mut out = String::new();
    out.push_str("group,rank,rank_l2,exact_num,exact_den,value,radius\n");
    for (a, mass) in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            a,
            a.rank(),
            rank_l2(a),
            mass.exact_part.numer(),
            mass.exact_part.denom(),
            fixed(mass.value.to_f64()),
            fixed(mass.value.radius_f64()),
        );
    }
    let partial = table.partial_mass();
    let _ = writeln!(
        out,
        "total,,,,,{},{}",
        fixed(partial.to_f64()),
        fixed(partial.radius_f64()),
    );
    out
}

fn constraint_label(c: &Constraint) -> String {
    match c {
        Constraint::Bracket(xi) => format!("bracket{xi}"),
        Constraint::Fiber(x) => format!("fiber{x}"),
    }
}

/// CSV for a census: group, count, total, the spec fields, and the
/// binomial standard error (blank for exhaustive runs, which are exact).
pub fn census_csv(census: &CokernelCensus) -> String {
    let spec = &census.spec;
    let sampled = matches!(census.mode, CensusMode::Sampled { .. });
    let mut out = String::new();
    out.push_str("group,count,total,g,ell,rho,constraint,se\n");
    for (a, count) in &census.counts {
        let se = if sampled { fixed(census.standard_error(a)) } else { String::new() };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            a,
            count,
            census.total,
            spec.g,
            spec.ell,
            spec.rho,
            constraint_label(&spec.constraint),
            se,
        );
    }
    out
}

pub fn moments_csv(reports: &[MomentReport]) -> String {
    let mut out = String::new();
    out.push_str("group,xi,window,value,radius,target,gap\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.group,
            r.xi,
            r.window,
            fixed(r.truncated.to_f64()),
            fixed(r.truncated.radius_f64()),
            r.target,
            fixed(rational_to_f64(&r.gap)),
        );
    }
    out
}

#[derive(Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// The structured verification report emitted next to the PASS/FAIL
/// console lines.
#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub ell: u64,
    pub budget: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mutate: Option<String>,
    pub all_passed: bool,
    pub checks: Vec<CheckRecord>,
}

impl VerifyReport {
    pub fn new(ell: u64, budget: u128, mutate: Option<String>, checks: &[CheckReport]) -> Self {
        VerifyReport {
            schema_version: SCHEMA_VERSION,
            ell,
            budget,
            mutate,
            all_passed: checks.iter().all(|c| c.passed),
            checks: checks
                .iter()
                .map(|c| CheckRecord {
                    name: c.name.clone(),
                    passed: c.passed,
                    detail: c.detail.clone(),
                })
                .collect(),
        }
    }
}

/// Console rendering: one line per identity.
pub fn render_check_lines(checks: &[CheckReport]) -> String {
    let mut out = String::new();
    for c in checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{verdict} {} ({})", c.name, c.detail);
    }
    out
}
