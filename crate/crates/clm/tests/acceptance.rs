//! The acceptance gate: one test per criterion, each printing a single
//! PASS/FAIL line (visible under --nocapture).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use clm::counting::mobius_s;
use clm::distributions::{
    default_tolerance, malle_mass, moment, mu_mass_closed, mu_mass_series,
    normalization_report,
};
use clm::groups::{enumerate_groups, interval, GroupEnumeration, GroupType};
use clm::interval::rational_to_f64;
use clm::lattice::lattice_mobius_oracle;
use clm::qseries::{
    kuperberg_sum, one_minus_product, one_plus_product_inverse, pochhammer, t_series,
};
use clm::symp::census::{census, CensusMode, CokernelCensus};
use clm::symp::checks::{
    chi_square_uniformity, deter_check, dual2_check, haar_check, subcos_check,
};
use clm::symp::enumerate::DEFAULT_BUDGET;
use clm::symp::lifted::lifted_nu_bracket_one;
use clm::symp::orbits::{orbit_count, orbit_count_formula};
use clm::symp::{Constraint, SimilitudeGroupSpec};

fn verdict(criterion: &str, passed: bool) {
    println!("{} {criterion}", if passed { "PASS" } else { "FAIL" });
    assert!(passed, "{criterion}");
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn criterion_1_paper_constants() {
    let tol = default_tolerance();
    let trivial = one_plus_product_inverse(3, &tol).midpoint().clone();
    let positive_rank = BigRational::one() - one_minus_product(3, &tol).midpoint();
    let malle = &trivial * rat(4, 3);
    let passed = (positive_rank - rat(44, 100)).abs() <= rat(5, 1000)
        && (malle - rat(852, 1000)).abs() <= rat(1, 1000)
        && (trivial - rat(6390, 10_000)).abs() <= rat(5, 10_000);
    verdict("criterion-1 paper constants", passed);
}

#[test]
fn criterion_2_series_equals_closed_form() {
    let tol = default_tolerance();
    let mut passed = true;
    for ell in [3u64, 5] {
        for xi in [1u32, 2] {
            for a in enumerate_groups(&GroupEnumeration::new(ell, 4)) {
                let closed = mu_mass_closed(&a, xi, &tol).unwrap();
                let series = mu_mass_series(&a, xi, &tol).unwrap();
                passed &= closed.exact_part == series.exact_part;
            }
        }
    }
    verdict("criterion-2 series = closed form", passed);
}

#[test]
fn criterion_3_malle_u0_is_xi1() {
    let tol = default_tolerance();
    let mut passed = true;
    for ell in [3u64, 5] {
        for a in enumerate_groups(&GroupEnumeration::new(ell, 4)) {
            let malle = malle_mass(&a, 0, &tol);
            let closed = mu_mass_closed(&a, 1, &tol).unwrap();
            passed &= malle.exact_part == closed.exact_part;
        }
    }
    verdict("criterion-3 malle u=0 = xi=1", passed);
}

#[test]
fn criterion_4_mobius_vanishing_and_oracle() {
    let mut passed = true;
    for b in enumerate_groups(&GroupEnumeration::new(3, 5)) {
        for a in interval(&GroupType::trivial(3), &b) {
            if !a.elementary_cokernel_shape(&b) {
                passed &= mobius_s(&a, &b).value.is_zero();
            }
        }
    }
    for b in enumerate_groups(&GroupEnumeration::new(3, 4)) {
        for a in interval(&GroupType::trivial(3), &b) {
            let oracle = lattice_mobius_oracle(&a, &b, 81).unwrap();
            passed &= mobius_s(&a, &b).value == oracle;
        }
    }
    verdict("criterion-4 mobius vanishing + lattice oracle", passed);
}

#[test]
fn criterion_5_qseries() {
    let mut passed = true;
    for q in [rat(1, 3), rat(1, 5), rat(2, 7)] {
        for k in 0..=12u64 {
            passed &= kuperberg_sum(k, &q) == pochhammer(&q, &(&q * &q), k.div_ceil(2));
        }
    }
    let tol = default_tolerance();
    let gap = (t_series(3, 30) - one_plus_product_inverse(3, &tol).midpoint()).abs();
    passed &= gap <= rat(1, 1_000_000);
    verdict("criterion-5 q-series identities", passed);
}

#[test]
fn criterion_6_exhaustive_oracle() {
    let mut passed = true;
    // (a) SL2(F3) census.
    let sl2 = census(
        &SimilitudeGroupSpec::new(1, 3, 1, Constraint::Fiber(1)).unwrap(),
        CensusMode::Exhaustive,
        DEFAULT_BUDGET,
    )
    .unwrap();
    passed &= sl2.count(&GroupType::trivial(3)) == 15
        && sl2.count(&GroupType::new(3, [1])) == 8
        && sl2.count(&GroupType::new(3, [1, 1])) == 1;
    // (b) deter exact at g=1 (rho 1, 2; every xi) and g=2 (rho 1).
    for rho in 1..=2u32 {
        for xi in 0..=rho {
            let spec = SimilitudeGroupSpec::new(1, 3, rho, Constraint::Bracket(xi)).unwrap();
            passed &= deter_check(&spec, DEFAULT_BUDGET).unwrap().passed;
        }
    }
    for xi in 0..=1u32 {
        let spec = SimilitudeGroupSpec::new(2, 3, 1, Constraint::Bracket(xi)).unwrap();
        passed &= deter_check(&spec, DEFAULT_BUDGET).unwrap().passed;
    }
    // (c) cross-level stability of the trivial-cokernel frequency.
    let lifted = census(
        &SimilitudeGroupSpec::new(1, 3, 2, Constraint::Fiber(1)).unwrap(),
        CensusMode::Exhaustive,
        DEFAULT_BUDGET,
    )
    .unwrap();
    passed &= sl2.frequency(&GroupType::trivial(3)) == rat(15, 24)
        && lifted.frequency(&GroupType::trivial(3)) == rat(405, 648)
        && rat(15, 24) == rat(405, 648);
    passed &= haar_check(1, 3, 1, &[(1, 2)], DEFAULT_BUDGET).unwrap().passed;
    // (d) exact classes 4 and 7 carry identical censuses.
    passed &= subcos_check(1, 3, 2, 1, DEFAULT_BUDGET).unwrap().passed;
    // (e) kernel census = cokernel census.
    for rho in 1..=2u32 {
        let spec = SimilitudeGroupSpec::new(1, 3, rho, Constraint::Bracket(0)).unwrap();
        passed &= dual2_check(&spec, DEFAULT_BUDGET).unwrap().passed;
    }
    // (f) orbit counts against the closed formula, |A| <= 27.
    for rho in 1..=2u32 {
        for xi in 0..=rho {
            let spec = SimilitudeGroupSpec::new(1, 3, rho, Constraint::Bracket(xi)).unwrap();
            for a in enumerate_groups(&GroupEnumeration::new(3, 3)) {
                if a.max_exponent() > rho || a.rank() > 2 {
                    continue;
                }
                let o = BigRational::from_integer(
                    orbit_count(&a, &spec, DEFAULT_BUDGET).unwrap().into(),
                );
                let f = orbit_count_formula(&a, 1, rho, xi).unwrap();
                passed &= if f.exact { o == f.value } else { o <= f.value };
            }
        }
    }
    verdict("criterion-6 exhaustive oracle", passed);
}

fn sampled_nu(
    lo: &CokernelCensus,
    hi: &CokernelCensus,
    a: &GroupType,
    ell: u64,
) -> (f64, f64) {
    let l = ell as f64;
    let f1 = rational_to_f64(&lo.frequency(a));
    let f2 = rational_to_f64(&hi.frequency(a));
    let nu = (l * f1 - f2) / (l - 1.0);
    let se = ((l * lo.standard_error(a)).powi(2) + hi.standard_error(a).powi(2)).sqrt()
        / (l - 1.0);
    (nu, se)
}

#[test]
fn criterion_7_sampled_oracle() {
    let mut passed = true;
    let n = 100_000;
    let seed = 7;
    let lo = census(
        &SimilitudeGroupSpec::new(2, 3, 2, Constraint::Bracket(1)).unwrap(),
        CensusMode::Sampled { n, seed },
        DEFAULT_BUDGET,
    )
    .unwrap();
    let hi = census(
        &SimilitudeGroupSpec::new(2, 3, 2, Constraint::Bracket(2)).unwrap(),
        CensusMode::Sampled { n, seed },
        DEFAULT_BUDGET,
    )
    .unwrap();
    for a in [GroupType::trivial(3), GroupType::new(3, [1])] {
        let exact = rational_to_f64(&lifted_nu_bracket_one(2, 3, &a).unwrap());
        let (nu, se) = sampled_nu(&lo, &hi, &a, 3);
        passed &= (nu - exact).abs() <= 3.0 * se;
    }
    // Uniformity of the level-1 projection of the g=2 sampler.
    let (_, p) = chi_square_uniformity(2, 3, 600_000, seed).unwrap();
    passed &= p > 1e-3;
    verdict("criterion-7 sampled oracle", passed);
}

#[test]
fn criterion_8_moments() {
    let tol = default_tolerance();
    let mut passed = true;
    for a in [
        GroupType::new(3, [1]),
        GroupType::new(3, [2]),
        GroupType::new(3, [1, 1]),
    ] {
        for xi in [1u32, 2] {
            let mut last: Option<BigRational> = None;
            for window in 4..=8u32 {
                let r = moment(&a, xi, window, &tol).unwrap();
                if let Some(prev) = &last {
                    passed &= &r.gap <= prev;
                }
                if window == 8 {
                    passed &= r.gap <= rat(5, 100);
                }
                last = Some(r.gap);
            }
        }
    }
    verdict("criterion-8 moment convergence", passed);
}

#[test]
fn criterion_9_normalization() {
    let tol = default_tolerance();
    let mut passed = true;
    let mut last = BigRational::zero();
    for window in 4..=8u32 {
        let (_, mass) = normalization_report(3, 1, window, &tol).unwrap();
        passed &= mass.midpoint() >= &last;
        passed &= mass.upper() <= BigRational::one() + rat(1, 1_000_000_000);
        last = mass.midpoint().clone();
    }
    passed &= last >= rat(98, 100);
    verdict("criterion-9 normalization", passed);
}
