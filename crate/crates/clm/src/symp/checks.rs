//! Cross-verification of the matrix model against the counting layer:
//! each check pits an exhaustively enumerated (or sampled) census
//! against an independent closed-form prediction and reports PASS/FAIL.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::counting::{aut_order, lambda_count, mobius_s, surj_count};
use crate::error::{ClmError, Result};
use crate::groups::{interval, GroupType};
use crate::symp::census::{census_exhaustive, kernel_census_exhaustive, nu_bracket};
use crate::symp::enumerate::{group_order, sp_elements};
use crate::symp::matrix::{cokernel_type, standard_form, unit_inverse, RingMatrix};
use crate::symp::orbits::{
    fixed_surjection_count, orbit_count_burnside, orbit_count_formula,
    orbit_count_reduced,
};
use crate::symp::sample::Sampler;
use crate::symp::{Constraint, SimilitudeGroupSpec};

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckReport {
    fn new(name: &str, passed: bool, detail: String) -> CheckReport {
        CheckReport { name: name.to_string(), passed, detail }
    }
}

/// All subgroup types of (R_rho)^{2g}.
fn ambient_window(spec: &SimilitudeGroupSpec) -> Vec<GroupType> {
    let top = GroupType::new(spec.ell, std::iter::repeat(spec.rho).take(2 * spec.g));
    interval(&GroupType::trivial(spec.ell), &top)
}

/// N(A)/|G| = sum_B o_B S(A,B)/|Aut B| over every subgroup type B of the
/// ambient module, with orbit counts from the Burnside average.
pub fn deter_check(spec: &SimilitudeGroupSpec, budget: u128) -> Result<CheckReport> {
    let census = census_exhaustive(spec, budget)?;
    let order = group_order(spec);
    let window = ambient_window(spec);
    let orbits: Vec<BigInt> =
        window.iter().map(|b| orbit_count_burnside(&census, b)).collect();
    let mut failures = Vec::new();
    for a in &window {
        let lhs = census.frequency(a);
        let mut rhs = BigRational::zero();
        for (b, o) in window.iter().zip(&orbits) {
            let s = mobius_s(a, b).value;
            if !s.is_zero() {
                rhs += BigRational::new(o * s, aut_order(b));
            }
        }
        if lhs != rhs {
            failures.push(format!("A={a}: census {lhs} vs orbit sum {rhs}"));
        }
    }
    let detail = if failures.is_empty() {
        format!(
            "all {} types balanced over a group of order {order}",
            window.len()
        )
    } else {
        failures.join("; ")
    };
    Ok(CheckReport::new("deter", failures.is_empty(), detail))
}

/// Units with v(x - 1) exactly xi (all non-1-mod-l units for xi = 0).
fn exact_class_fibers(ell: u64, rho: u32, xi: u32) -> Vec<u64> {
    let m = ell.pow(rho);
    (1..m)
        .filter(|&x| x % ell != 0)
        .filter(|&x| {
            let d = (x + m - 1) % m;
            let val = if d == 0 {
                rho
            } else {
                (0..rho).take_while(|&k| d % ell.pow(k + 1) == 0).count() as u32
            };
            val == xi
        })
        .collect()
}

/// Every multiplier fiber within an exact class carries the same census.
pub fn subcos_check(
    g: usize,
    ell: u64,
    rho: u32,
    xi: u32,
    budget: u128,
) -> Result<CheckReport> {
    let fibers = exact_class_fibers(ell, rho, xi);
    if fibers.len() <= 1 {
        return Ok(CheckReport::new(
            "subcos",
            true,
            format!("class xi={xi} has {} fiber(s); nothing to compare", fibers.len()),
        ));
    }
    let mut reference = None;
    let mut passed = true;
    for &x in &fibers {
        let spec = SimilitudeGroupSpec::new(g, ell, rho, Constraint::Fiber(x))?;
        let census = census_exhaustive(&spec, budget)?;
        match &reference {
            None => reference = Some(census.counts),
            Some(first) => passed &= first == &census.counts,
        }
    }
    Ok(CheckReport::new(
        "subcos",
        passed,
        format!("fibers {fibers:?} at g={g}, rho={rho}, xi={xi}"),
    ))
}

/// |{f : f o gamma = f}| = |Surj(coker(Id - gamma), A)| for every group
/// element, by direct tuple enumeration.
pub fn bij_check(
    spec: &SimilitudeGroupSpec,
    a: &GroupType,
    budget: u128,
) -> Result<CheckReport> {
    let elements = crate::symp::enumerate::enumerate_group(spec, budget)?;
    let mut passed = true;
    for gamma in &elements {
        let fixed = fixed_surjection_count(gamma, a, budget)?;
        let expected = surj_count(&cokernel_type(gamma), a);
        if BigInt::from(fixed) != expected {
            passed = false;
            break;
        }
    }
    Ok(CheckReport::new(
        "bij",
        passed,
        format!("A={a} over {} group elements", elements.len()),
    ))
}

/// Fiber frequencies are stable in rho once l^rho exceeds exp A.
pub fn haar_check(
    g: usize,
    ell: u64,
    x: u64,
    rho_pairs: &[(u32, u32)],
    budget: u128,
) -> Result<CheckReport> {
    let mut passed = true;
    let mut detail = Vec::new();
    for &(rho_lo, rho_hi) in rho_pairs {
        let lo = census_exhaustive(
            &SimilitudeGroupSpec::new(g, ell, rho_lo, Constraint::Fiber(x % ell.pow(rho_lo)))?,
            budget,
        )?;
        let hi = census_exhaustive(
            &SimilitudeGroupSpec::new(g, ell, rho_hi, Constraint::Fiber(x % ell.pow(rho_hi)))?,
            budget,
        )?;
        for a in ambient_window(&lo.spec) {
            // Stability requires exp A strictly below l^rho_lo.
            if ell.pow(a.max_exponent()) >= ell.pow(rho_lo) && !a.is_trivial() {
                continue;
            }
            if lo.frequency(&a) != hi.frequency(&a) {
                passed = false;
            }
            detail.push(format!("{a}@rho {rho_lo}={rho_hi}: {}", lo.frequency(&a)));
        }
    }
    Ok(CheckReport::new("haar", passed, detail.join(", ")))
}

/// Kernel and cokernel types of Id - gamma are equidistributed.
pub fn dual2_check(spec: &SimilitudeGroupSpec, budget: u128) -> Result<CheckReport> {
    let coker = census_exhaustive(spec, budget)?;
    let ker = kernel_census_exhaustive(spec, budget)?;
    let passed = coker.counts == ker.counts;
    Ok(CheckReport::new(
        "dual2",
        passed,
        format!("{} cokernel types vs {} kernel types", coker.counts.len(), ker.counts.len()),
    ))
}

/// l o^{<xi>} - o^{<xi+1>} = (l-1)|Lambda(A/l^xi)| with exact orbit
/// counts (g taken >= rank A so the closed form applies), spot-checked
/// against reduced Burnside counts where a census is affordable.
pub fn subt_check(ell: u64, rho: u32, xi: u32, window: &[GroupType], budget: u128) -> Result<CheckReport> {
    if rho <= xi {
        return Err(ClmError::PreconditionViolated("subt needs rho > xi".into()));
    }
    let mut passed = true;
    let mut checked = 0usize;
    for a in window {
        if a.max_exponent() > rho {
            continue;
        }
        let g = a.rank().max(1);
        let o1 = orbit_count_formula(a, g, rho, xi)?.integer_value();
        let o2 = orbit_count_formula(a, g, rho, xi + 1)?.integer_value();
        let lhs = BigInt::from(ell) * &o1 - &o2;
        let rhs = (BigInt::from(ell) - 1) * lambda_count(&a.quotient_by_power(xi));
        passed &= lhs == rhs;
        // Ground the closed form in an actual orbit computation when the
        // reduced census fits the budget.
        for (o, x) in [(&o1, xi), (&o2, xi + 1)] {
            let spec = SimilitudeGroupSpec::new(g, ell, rho, Constraint::Bracket(x))?;
            if let Ok(reduced) = orbit_count_reduced(a, &spec, budget) {
                passed &= &reduced == o;
            }
        }
        checked += 1;
    }
    Ok(CheckReport::new(
        "subt",
        passed,
        format!("{checked} types at rho={rho}, xi={xi}"),
    ))
}

/// Exact orbit count for one augmented type, by formula when g covers
/// the rank and otherwise by Burnside over a reduced exhaustive census.
fn orbit_exact(
    b: &GroupType,
    g: usize,
    ell: u64,
    rho: u32,
    xi: u32,
    budget: u128,
) -> Result<BigInt> {
    if g >= b.rank() {
        return Ok(orbit_count_formula(b, g, rho, xi)?.integer_value());
    }
    let spec = SimilitudeGroupSpec::new(g, ell, rho, Constraint::Bracket(xi))?;
    orbit_count_reduced(b, &spec, budget)
}

/// The double sum expressing nu^{<xi>}(A) through orbit counts:
/// sum over same-rank covers B of A with elementary quotient,
/// sum_{i=0}^{2g-r} annulus(B + i copies of Z/l) S(B, B+i)/|Aut(B+i)|.
pub fn infi_sum(
    a: &GroupType,
    g: usize,
    rho: u32,
    xi: u32,
    budget: u128,
) -> Result<BigRational> {
    let ell = a.ell();
    if xi < 1 || rho <= xi || ell.pow(rho) <= ell.pow(a.max_exponent()) || a.rank() > 2 * g {
        return Err(ClmError::PreconditionViolated(
            "needs xi >= 1, rho > xi, l^rho > exp A, rank A <= 2g".into(),
        ));
    }
    let r = a.rank();
    let mut total = BigRational::zero();
    for b in crate::distributions::series_support(a) {
        let s_ab = mobius_s(a, &b).value;
        if s_ab.is_zero() {
            continue;
        }
        let mut inner = BigRational::zero();
        for i in 0..=(2 * g - r) {
            let bi = b.pad_elementary(i);
            let o1 = orbit_exact(&bi, g, ell, rho, xi, budget)?;
            let o2 = orbit_exact(&bi, g, ell, rho, xi + 1, budget)?;
            let annulus =
                BigRational::new(BigInt::from(ell) * o1 - o2, BigInt::from(ell - 1));
            let s_bbi = mobius_s(&b, &bi).value;
            inner += annulus * BigRational::new(s_bbi, aut_order(&bi));
        }
        total += BigRational::from_integer(s_ab) * inner;
    }
    Ok(total)
}

/// Compares the orbit-count double sum with the census difference
/// quotient (exhaustive enumeration of both bracket groups).
pub fn infi_check(
    a: &GroupType,
    g: usize,
    rho: u32,
    xi: u32,
    budget: u128,
) -> Result<CheckReport> {
    let sum = infi_sum(a, g, rho, xi, budget)?;
    let c_xi = census_exhaustive(
        &SimilitudeGroupSpec::new(g, a.ell(), rho, Constraint::Bracket(xi))?,
        budget,
    )?;
    let c_xi_plus = census_exhaustive(
        &SimilitudeGroupSpec::new(g, a.ell(), rho, Constraint::Bracket(xi + 1))?,
        budget,
    )?;
    let quotient = nu_bracket(&c_xi, &c_xi_plus, a);
    Ok(CheckReport::new(
        "infi",
        sum == quotient,
        format!("A={a}: orbit sum {sum} vs census quotient {quotient}"),
    ))
}

/// Chi-square goodness of fit of the sampler against the uniform law on
/// Sp_2g(F_l); returns (statistic, p-value).
pub fn chi_square_uniformity(
    g: usize,
    ell: u64,
    n: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    let spec = SimilitudeGroupSpec::new(g, ell, 1, Constraint::Bracket(1))?;
    let sampler = Sampler::new(spec, seed);
    let cells = sp_elements(g, ell, 1);
    let mut counts = std::collections::HashMap::new();
    for i in 0..n {
        *counts.entry(sampler.sample(i)).or_insert(0u64) += 1;
    }
    let k = cells.len();
    let expected = n as f64 / k as f64;
    let stat: f64 = cells
        .iter()
        .map(|m| {
            let obs = counts.get(m).copied().unwrap_or(0) as f64;
            (obs - expected).powi(2) / expected
        })
        .sum();
    let dist = ChiSquared::new((k - 1) as f64).expect("valid dof");
    Ok((stat, 1.0 - dist.cdf(stat)))
}

/// Conjugating the group by any invertible P is an isometry onto the
/// similitude group of the form P^T J P and leaves all cokernel types
/// unchanged; sanity check that the standard form is not load-bearing.
pub fn change_of_form_check(g: usize, ell: u64, rho: u32) -> Result<CheckReport> {
    let p = {
        // A unipotent + permutation-flavored unit matrix.
        let n = 2 * g;
        let mut m = RingMatrix::identity(g, ell, rho);
        for i in 0..n - 1 {
            m.set(i, i + 1, 1);
        }
        m
    };
    let det = p.det();
    if det % ell == 0 {
        return Err(ClmError::PreconditionViolated("conjugator must be a unit".into()));
    }
    let p_inv = p.adjugate().scale(unit_inverse(det, ell.pow(rho)));
    if !p_inv.mul(&p).is_identity() {
        return Err(ClmError::PreconditionViolated("inverse construction failed".into()));
    }
    let j = standard_form(g, ell, rho);
    let j_conj = p.transpose().mul(&j).mul(&p);
    let mut passed = true;
    for gamma in sp_elements(g, ell, rho) {
        let delta = p_inv.mul(gamma).mul(&p);
        // delta preserves the conjugated form...
        let lhs = delta.transpose().mul(&j_conj).mul(&delta);
        passed &= lhs == j_conj;
        // ...and Id - delta has the same invariant factors.
        passed &= cokernel_type(&delta) == cokernel_type(gamma);
    }
    Ok(CheckReport::new(
        "change_of_form",
        passed,
        format!("conjugated Sp_{}(Z/{}^{rho})", 2 * g, ell),
    ))
}
