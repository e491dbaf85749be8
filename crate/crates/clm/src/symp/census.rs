//! Cokernel censuses: the counts N(A) = |{gamma : coker(Id - gamma) = A}|
//! over a similitude group, exhaustively or by sampling, and the derived
//! probabilities.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::error::Result;
use crate::groups::GroupType;
use crate::symp::enumerate::{check_budget, group_order, sp_elements};
use crate::symp::matrix::{cokernel_type, kernel_type, similitude_representative};
use crate::symp::sample::Sampler;
use crate::symp::SimilitudeGroupSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CensusMode {
    Exhaustive,
    Sampled { n: u64, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct CokernelCensus {
    pub spec: SimilitudeGroupSpec,
    pub mode: CensusMode,
    pub counts: BTreeMap<GroupType, u64>,
    pub total: u64,
}

impl CokernelCensus {
    pub fn count(&self, a: &GroupType) -> u64 {
        self.counts.get(a).copied().unwrap_or(0)
    }

    /// Empirical or exact probability of cokernel type A.
    pub fn frequency(&self, a: &GroupType) -> BigRational {
        BigRational::new(BigInt::from(self.count(a)), BigInt::from(self.total))
    }

    /// Binomial standard error of `frequency` in sampled mode.
    pub fn standard_error(&self, a: &GroupType) -> f64 {
        let n = self.total as f64;
        let p = self.count(a) as f64 / n;
        (p * (1.0 - p) / n).sqrt()
    }
}

/// Exhaustive census over the group; the Sp coset of each allowed
/// multiplier is scanned in parallel and the per-worker maps merged.
pub fn census_exhaustive(spec: &SimilitudeGroupSpec, budget: u128) -> Result<CokernelCensus> {
    check_budget(spec, budget)?;
    let sp = sp_elements(spec.g, spec.ell, spec.rho);
    let mut counts: BTreeMap<GroupType, u64> = BTreeMap::new();
    for x in spec.multipliers() {
        let rep = similitude_representative(x, spec.g, spec.ell, spec.rho);
        let partial = sp
            .par_iter()
            .fold(BTreeMap::<GroupType, u64>::new, |mut map, sigma| {
                *map.entry(cokernel_type(&sigma.mul(&rep))).or_insert(0) += 1;
                map
            })
            .reduce(BTreeMap::new, merge_counts);
        counts = merge_counts(counts, partial);
    }
    let total: u64 = counts.values().sum();
    debug_assert_eq!(BigInt::from(total), group_order(spec));
    Ok(CokernelCensus { spec: *spec, mode: CensusMode::Exhaustive, counts, total })
}

/// Same scan but classifying ker(Id - gamma) instead; the duality oracle.
pub fn kernel_census_exhaustive(
    spec: &SimilitudeGroupSpec,
    budget: u128,
) -> Result<CokernelCensus> {
    check_budget(spec, budget)?;
    let sp = sp_elements(spec.g, spec.ell, spec.rho);
    let mut counts: BTreeMap<GroupType, u64> = BTreeMap::new();
    for x in spec.multipliers() {
        let rep = similitude_representative(x, spec.g, spec.ell, spec.rho);
        let partial = sp
            .par_iter()
            .fold(BTreeMap::<GroupType, u64>::new, |mut map, sigma| {
                *map.entry(kernel_type(&sigma.mul(&rep))).or_insert(0) += 1;
                map
            })
            .reduce(BTreeMap::new, merge_counts);
        counts = merge_counts(counts, partial);
    }
    let total: u64 = counts.values().sum();
    Ok(CokernelCensus { spec: *spec, mode: CensusMode::Exhaustive, counts, total })
}

fn merge_counts(
    mut a: BTreeMap<GroupType, u64>,
    b: BTreeMap<GroupType, u64>,
) -> BTreeMap<GroupType, u64> {
    for (k, v) in b {
        *a.entry(k).or_insert(0) += v;
    }
    a
}

/// Monte Carlo census with n exactly-uniform draws; deterministic in
/// (seed, n) and independent of the worker count.
pub fn census_sampled(spec: &SimilitudeGroupSpec, n: u64, seed: u64) -> CokernelCensus {
    let sampler = Sampler::new(*spec, seed);
    let counts = (0..n)
        .into_par_iter()
        .fold(BTreeMap::<GroupType, u64>::new, |mut map, i| {
            *map.entry(cokernel_type(&sampler.sample(i))).or_insert(0) += 1;
            map
        })
        .reduce(BTreeMap::new, merge_counts);
    CokernelCensus {
        spec: *spec,
        mode: CensusMode::Sampled { n, seed },
        counts,
        total: n,
    }
}

pub fn census(spec: &SimilitudeGroupSpec, mode: CensusMode, budget: u128) -> Result<CokernelCensus> {
    match mode {
        CensusMode::Exhaustive => census_exhaustive(spec, budget),
        CensusMode::Sampled { n, seed } => Ok(census_sampled(spec, n, seed)),
    }
}

/// The bracket difference quotient
/// (N^<xi>(A) - N^<xi+1>(A)) / (|GSp^<xi>| - |GSp^<xi+1>|),
/// the probability of cokernel A conditioned on the multiplier lying in
/// the exact class 1 + l^xi unit.
pub fn nu_bracket(
    census_xi: &CokernelCensus,
    census_xi_plus: &CokernelCensus,
    a: &GroupType,
) -> BigRational {
    let num = BigInt::from(census_xi.count(a)) - BigInt::from(census_xi_plus.count(a));
    let den = BigInt::from(census_xi.total) - BigInt::from(census_xi_plus.total);
    BigRational::new(num, den)
}
