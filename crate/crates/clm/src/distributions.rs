//! The limit measures on the poset of abelian l-groups: the Cohen-Lenstra
//! baseline, the Malle mass at unit rank u, the closed forms for the
//! congruence classes xi = 1, 2, the general series form, moments, and
//! normalization diagnostics.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::counting::{aut_order, lambda_count, mobius_s, surj_count};
use crate::error::{ClmError, Result};
use crate::groups::{enumerate_groups, GroupEnumeration, GroupType};
use crate::interval::BoundedReal;
use crate::qseries::{one_minus_product, one_plus_product_inverse, pochhammer, pochhammer_q};

/// Default truncation tolerance for the infinite-product factors.
pub fn default_tolerance() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(10u64).pow(12))
}

fn ell_inv(ell: u64, e: u64) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(ell).pow(e as u32))
}

/// A probability mass split into its exact rational factor and the
/// truncated infinite-product factor.
#[derive(Debug, Clone)]
pub struct MassValue {
    pub exact_part: BigRational,
    pub product_part: BoundedReal,
    pub value: BoundedReal,
}

impl MassValue {
    fn new(exact_part: BigRational, product_part: BoundedReal) -> Self {
        let value = BoundedReal::exact(exact_part.clone()) * product_part.clone();
        MassValue { exact_part, product_part, value }
    }
}

/// Cohen-Lenstra mass: 1/|Aut A| * prod (1 - l^-i).
pub fn cl_mass(a: &GroupType, tol: &BigRational) -> MassValue {
    let exact = BigRational::one() / BigRational::from_integer(aut_order(a));
    MassValue::new(exact, one_minus_product(a.ell(), tol))
}

/// Malle mass at relative unit rank u:
/// prod_{i=u+1}^{u+r}(l^i - 1) / (l^{r(u+1)} |A|^u |Aut A|)
///   * prod_{i=u+1}^inf (1 + l^-i)^{-1}.
pub fn malle_mass(a: &GroupType, u: u64, tol: &BigRational) -> MassValue {
    let ell = a.ell();
    let r = a.rank() as u64;
    let mut numer = BigRational::one();
    for i in (u + 1)..=(u + r) {
        numer *= BigRational::from_integer(BigInt::from(ell).pow(i as u32) - 1);
    }
    let denom = BigRational::from_integer(
        BigInt::from(ell).pow((r * (u + 1)) as u32)
            * BigInt::from(a.order()).pow(u as u32)
            * aut_order(a),
    );
    // Strip the first u factors off the full inverse product exactly.
    let mut head = BigRational::one();
    for i in 1..=u {
        head *= BigRational::one() + ell_inv(ell, i);
    }
    let product = one_plus_product_inverse(ell, tol).scale(&head);
    MassValue::new(numer / denom, product)
}

/// Closed-form mass of the cokernel-type limit law in the congruence
/// class x = 1 mod l^xi; known for xi in {1, 2} only.
///
/// xi=1: l^{r(r-1)/2} (l^-1)_r / |Aut A| * prod (1 + l^-i)^{-1}
/// xi=2: l^{r(r-1)/2 + s(s-1)/2} (l^-1)_s (l^-1; l^-2)_{ceil((r-s)/2)}
///       / |Aut A| * prod (1 + l^-i)^{-1}
/// with r, s the l- and l^2-ranks of A.
pub fn mu_mass_closed(a: &GroupType, xi: u32, tol: &BigRational) -> Result<MassValue> {
    let ell = a.ell();
    let r = a.rank() as u64;
    let s = a.rank_pow(2) as u64;
    let linv = ell_inv(ell, 1);
    let exact = match xi {
        1 => {
            BigRational::from_integer(BigInt::from(ell).pow((r * r.saturating_sub(1) / 2) as u32))
                * pochhammer_q(&linv, r)
        }
        2 => {
            BigRational::from_integer(
                BigInt::from(ell)
                    .pow((r * r.saturating_sub(1) / 2 + s * s.saturating_sub(1) / 2) as u32),
            ) * pochhammer_q(&linv, s)
                * pochhammer(&linv, &ell_inv(ell, 2), (r - s).div_ceil(2))
        }
        other => return Err(ClmError::UnsupportedXi(other)),
    } / BigRational::from_integer(aut_order(a));
    Ok(MassValue::new(exact, one_plus_product_inverse(ell, tol)))
}

/// All B of the same rank as A whose generic cokernel shape over A is
/// elementary abelian: b_i - a_i in {0, 1} componentwise. Outside this
/// set the weighted Moebius terms vanish.
pub(crate) fn series_support(a: &GroupType) -> Vec<GroupType> {
    let r = a.rank();
    let mut out: Vec<GroupType> = (0..(1u32 << r))
        .map(|mask| {
            GroupType::new(
                a.ell(),
                a.parts()
                    .iter()
                    .enumerate()
                    .map(|(i, &p)| p + ((mask >> i) & 1)),
            )
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Series form of the xi-congruence mass, valid for every xi >= 1:
/// sum_B |Lambda(B / l^xi B)| S(A,B) / |Aut B| * prod (1 + l^-i)^{-1},
/// the sum running over the finite support of same-rank B above A.
pub fn mu_mass_series(a: &GroupType, xi: u32, tol: &BigRational) -> Result<MassValue> {
    if xi < 1 {
        return Err(ClmError::PreconditionViolated("xi must be >= 1".into()));
    }
    let exact = series_exact_part(a, xi, &series_support(a));
    // Guard the support restriction: a much wider same-rank scan must
    // produce the identical rational.
    let wide_window = a.log_order() + 2 * a.rank() as u32;
    let wide: Vec<GroupType> = enumerate_groups(
        &GroupEnumeration::new(a.ell(), wide_window).with_rank(a.rank()),
    );
    let wide_sum = series_exact_part(a, xi, &wide);
    if exact != wide_sum {
        return Err(ClmError::PreconditionViolated(format!(
            "series support restriction failed for {a}: {exact} vs {wide_sum}"
        )));
    }
    Ok(MassValue::new(exact, one_plus_product_inverse(a.ell(), tol)))
}

fn series_exact_part(a: &GroupType, xi: u32, support: &[GroupType]) -> BigRational {
    let mut total = BigRational::zero();
    for b in support {
        let s = mobius_s(a, b).value;
        if s.is_zero() {
            continue;
        }
        total += BigRational::new(
            lambda_count(&b.quotient_by_power(xi)) * s,
            aut_order(b),
        );
    }
    total
}

/// Truncated moment sum against an exact integer target.
#[derive(Debug, Clone)]
pub struct MomentReport {
    pub group: GroupType,
    pub xi: u32,
    pub window: u32,
    pub truncated: BoundedReal,
    pub target: BigInt,
    /// |midpoint - target|; expected to shrink as the window grows.
    pub gap: BigRational,
}

/// sum_{|B| <= l^window} |Surj(B,A)| mu(B) against the exact moment
/// |Lambda(A / l^xi A)|.
pub fn moment(a: &GroupType, xi: u32, window: u32, tol: &BigRational) -> Result<MomentReport> {
    if window < a.log_order() {
        return Err(ClmError::PreconditionViolated(format!(
            "window {window} below log order of {a}"
        )));
    }
    let mut truncated = BoundedReal::exact(BigRational::zero());
    for b in enumerate_groups(&GroupEnumeration::new(a.ell(), window)) {
        let s = surj_count(&b, a);
        if s.is_zero() {
            continue;
        }
        let mass = mass_for_xi(&b, xi, tol)?;
        truncated = truncated + mass.value.scale(&BigRational::from_integer(s));
    }
    let target = lambda_count(&a.quotient_by_power(xi));
    let gap = (truncated.midpoint() - BigRational::from_integer(target.clone())).abs();
    Ok(MomentReport { group: a.clone(), xi, window, truncated, target, gap })
}

/// Closed form when available, series otherwise.
pub fn mass_for_xi(a: &GroupType, xi: u32, tol: &BigRational) -> Result<MassValue> {
    match xi {
        1 | 2 => mu_mass_closed(a, xi, tol),
        _ => mu_mass_series(a, xi, tol),
    }
}

/// A tabulated distribution over an enumeration window.
#[derive(Debug, Clone)]
pub struct DistributionTable {
    pub ell: u64,
    pub xi: Option<u32>,
    pub window: u32,
    pub formula: String,
    pub tolerance: BigRational,
    pub rows: Vec<(GroupType, MassValue)>,
}

impl DistributionTable {
    /// Sum of the tabulated masses, as an interval.
    pub fn partial_mass(&self) -> BoundedReal {
        self.rows
            .iter()
            .fold(BoundedReal::exact(BigRational::zero()), |acc, (_, m)| {
                acc + m.value.clone()
            })
    }
}

/// Which mass formula a table tabulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formula {
    CohenLenstra,
    Malle { u: u64 },
    MuClosed { xi: u32 },
    MuSeries { xi: u32 },
}

impl Formula {
    pub fn name(&self) -> String {
        match self {
            Formula::CohenLenstra => "cohen-lenstra".into(),
            Formula::Malle { u } => format!("malle-u{u}"),
            Formula::MuClosed { xi } => format!("mu-closed-xi{xi}"),
            Formula::MuSeries { xi } => format!("mu-series-xi{xi}"),
        }
    }
}

/// Tabulates a mass formula over every group in the window; rows are
/// computed in parallel and merged back in canonical order.
pub fn distribution_table(
    ell: u64,
    formula: Formula,
    window: u32,
    tol: &BigRational,
) -> Result<DistributionTable> {
    let groups = enumerate_groups(&GroupEnumeration::new(ell, window));
    let rows: Result<Vec<(GroupType, MassValue)>> = groups
        .into_par_iter()
        .map(|a| {
            let mass = match formula {
                Formula::CohenLenstra => cl_mass(&a, tol),
                Formula::Malle { u } => malle_mass(&a, u, tol),
                Formula::MuClosed { xi } => mu_mass_closed(&a, xi, tol)?,
                Formula::MuSeries { xi } => mu_mass_series(&a, xi, tol)?,
            };
            Ok((a, mass))
        })
        .collect();
    let xi = match formula {
        Formula::MuClosed { xi } | Formula::MuSeries { xi } => Some(xi),
        _ => None,
    };
    Ok(DistributionTable {
        ell,
        xi,
        window,
        formula: formula.name(),
        tolerance: tol.clone(),
        rows: rows?,
    })
}

/// The normalization diagnostic: the closed-form table plus its partial
/// mass, which must stay within 1 plus the accumulated radius.
pub fn normalization_report(
    ell: u64,
    xi: u32,
    window: u32,
    tol: &BigRational,
) -> Result<(DistributionTable, BoundedReal)> {
    let table = distribution_table(ell, Formula::MuClosed { xi }, window, tol)?;
    let partial = table.partial_mass();
    if partial.midpoint() > &(BigRational::one() + partial.radius()) {
        return Err(ClmError::PreconditionViolated(format!(
            "partial mass exceeds 1: {partial}"
        )));
    }
    Ok((table, partial))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(parts: &[u32]) -> GroupType {
        GroupType::new(3, parts.iter().copied())
    }

    fn tol() -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(10u64).pow(9))
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn cl_mass_examples() {
        let m = cl_mass(&g(&[]), &tol());
        assert!((m.value.to_f64() - 0.5601).abs() < 1e-4);
        let m1 = cl_mass(&g(&[1]), &tol());
        assert_eq!(m1.exact_part, r(1, 2));
        assert!((m1.value.to_f64() - 0.2801).abs() < 1e-4);
        // P(l | h) at l=3 is about .44.
        assert!((1.0 - m.value.to_f64() - 0.44).abs() < 4e-3);
    }

    #[test]
    fn malle_mass_examples() {
        let m = malle_mass(&g(&[]), 1, &tol());
        assert_eq!(m.exact_part, r(1, 1));
        assert!((m.value.to_f64() - 0.852).abs() < 5e-4);
        let m0 = malle_mass(&g(&[]), 0, &tol());
        assert!((m0.value.to_f64() - 0.6390046).abs() < 1e-6);
    }

    #[test]
    fn malle_u0_equals_xi1_closed_form() {
        for a in enumerate_groups(&GroupEnumeration::new(3, 4)) {
            let malle = malle_mass(&a, 0, &tol());
            let closed = mu_mass_closed(&a, 1, &tol()).unwrap();
            assert_eq!(malle.exact_part, closed.exact_part, "a={a}");
        }
    }

    #[test]
    fn mu_closed_examples() {
        let t = mu_mass_closed(&g(&[]), 1, &tol()).unwrap();
        assert!((t.value.to_f64() - 0.6390046).abs() < 1e-6);
        let t2 = mu_mass_closed(&g(&[]), 2, &tol()).unwrap();
        assert_eq!(t2.exact_part, r(1, 1));
        let a = mu_mass_closed(&g(&[1, 1]), 1, &tol()).unwrap();
        assert_eq!(a.exact_part, r(1, 27));
        assert!((a.value.to_f64() - 0.02367).abs() < 1e-5);
        let a2 = mu_mass_closed(&g(&[1, 1]), 2, &tol()).unwrap();
        assert_eq!(a2.exact_part, r(1, 24));
        assert!((a2.value.to_f64() - 0.02663).abs() < 1e-5);
        assert!(matches!(
            mu_mass_closed(&g(&[1]), 3, &tol()),
            Err(ClmError::UnsupportedXi(3))
        ));
    }

    #[test]
    fn mu_series_examples() {
        let t = mu_mass_series(&g(&[]), 1, &tol()).unwrap();
        assert_eq!(t.exact_part, r(1, 1));
        let a = mu_mass_series(&g(&[1]), 1, &tol()).unwrap();
        assert_eq!(a.exact_part, r(1, 3));
        let a3 = mu_mass_series(&g(&[1]), 3, &tol()).unwrap();
        assert_eq!(a3.exact_part, r(1, 3));
    }

    #[test]
    fn series_matches_closed_form() {
        for ell in [3u64, 5] {
            for a in enumerate_groups(&GroupEnumeration::new(ell, 4)) {
                for xi in [1u32, 2] {
                    let series = mu_mass_series(&a, xi, &tol()).unwrap();
                    let closed = mu_mass_closed(&a, xi, &tol()).unwrap();
                    assert_eq!(
                        series.exact_part, closed.exact_part,
                        "ell={ell} a={a} xi={xi}"
                    );
                }
            }
        }
    }

    #[test]
    fn masses_nonnegative_and_trivial_dominates() {
        let trivial_mass = mu_mass_closed(&g(&[]), 1, &tol()).unwrap();
        for a in enumerate_groups(&GroupEnumeration::new(3, 5)) {
            for xi in [1u32, 2] {
                let m = mu_mass_closed(&a, xi, &tol()).unwrap();
                assert!(!m.value.upper().is_negative(), "a={a} xi={xi}");
                assert!(!m.exact_part.is_negative(), "a={a} xi={xi}");
            }
            if a.rank() > 0 {
                let m = mu_mass_closed(&a, 1, &tol()).unwrap();
                assert!(m.exact_part < trivial_mass.exact_part, "a={a}");
            }
        }
    }

    #[test]
    fn moment_examples() {
        let m = moment(&g(&[1]), 1, 8, &tol()).unwrap();
        assert_eq!(m.target, BigInt::one());
        assert!(m.gap < r(5, 100), "gap {}", m.gap);
        let t = moment(&g(&[]), 1, 6, &tol()).unwrap();
        assert_eq!(t.target, BigInt::one());
        let ab = moment(&g(&[1, 1]), 1, 6, &tol()).unwrap();
        assert_eq!(ab.target, BigInt::from(3));
        assert!(moment(&g(&[1, 1]), 1, 1, &tol()).is_err());
    }

    #[test]
    fn moment_gap_shrinks_with_window() {
        for a in [g(&[]), g(&[1]), g(&[1, 1])] {
            let start = a.log_order().max(1);
            let mut prev: Option<BigRational> = None;
            for w in start..=(start + 5) {
                let m = moment(&a, 1, w, &tol()).unwrap();
                if let Some(p) = prev {
                    assert!(m.gap <= p, "a={a} w={w}");
                }
                prev = Some(m.gap);
            }
        }
    }

    #[test]
    fn normalization_examples() {
        let (table, partial) = normalization_report(3, 1, 3, &tol()).unwrap();
        assert_eq!(table.rows.len(), 7);
        let approx = partial.to_f64();
        let expected = 0.639 + 0.213 + 0.071 + 0.0237 + 0.0237 + 0.0105;
        assert!(approx > expected && approx < 1.0, "partial {approx}");
        let (_, p0) = normalization_report(3, 1, 0, &tol()).unwrap();
        assert!((p0.to_f64() - 0.6390046).abs() < 1e-6);
        let (_, p8) = normalization_report(3, 1, 8, &tol()).unwrap();
        assert!(p8.to_f64() >= 0.98);
        // Monotone in the window.
        let mut prev = BigRational::zero();
        for w in 0..6 {
            let (_, p) = normalization_report(3, 1, w, &tol()).unwrap();
            assert!(p.midpoint() > &prev);
            prev = p.midpoint().clone();
        }
    }

    #[test]
    fn table_is_deterministic() {
        let t1 = distribution_table(3, Formula::MuClosed { xi: 1 }, 4, &tol()).unwrap();
        let t2 = distribution_table(3, Formula::MuClosed { xi: 1 }, 4, &tol()).unwrap();
        let rows1: Vec<(String, BigRational)> = t1
            .rows
            .iter()
            .map(|(a, m)| (a.to_string(), m.exact_part.clone()))
            .collect();
        let rows2: Vec<(String, BigRational)> = t2
            .rows
            .iter()
            .map(|(a, m)| (a.to_string(), m.exact_part.clone()))
            .collect();
        assert_eq!(rows1, rows2);
        // Canonical ordering of rows.
        for w in t1.rows.windows(2) {
            assert!(w[0].0 < w[1].0);
        }
    }
}
