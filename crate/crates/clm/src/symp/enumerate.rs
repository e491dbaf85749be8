//! Exhaustive enumeration of symplectic (similitude) groups over Z/l^rho.
//!
//! The symplectic group is enumerated once per (g, l, rho) by a
//! column-by-column search pruned on the inner-product constraints
//! <c_i, c_j> = J_ij, then cached; similitude groups are assembled as
//! Sp-cosets of the standard multiplier representatives.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use once_cell::sync::Lazy;

use crate::error::{ClmError, Result};
use crate::symp::matrix::{similitude_representative, standard_form, RingMatrix};
use crate::symp::SimilitudeGroupSpec;

/// Default enumeration budget: candidate matrices considered.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// |Sp_2g(Z/l^rho)| = l^{(rho-1) g (2g+1)} l^{g^2} prod (l^{2i} - 1).
pub fn sp_order(g: usize, ell: u64, rho: u32) -> BigInt {
    let l = BigInt::from(ell);
    let mut order = l.pow((rho - 1) * (g * (2 * g + 1)) as u32) * l.pow((g * g) as u32);
    for i in 1..=g {
        order *= l.pow(2 * i as u32) - 1;
    }
    order
}

/// |GL_2g(Z/l^rho)|, for the free-action orbit shortcut.
pub fn gl_order(n: usize, ell: u64, rho: u32) -> BigInt {
    let l = BigInt::from(ell);
    let mut order = l.pow((rho - 1) as u32 * (n * n) as u32);
    for i in 0..n {
        order *= l.pow(n as u32) - l.pow(i as u32);
    }
    order
}

/// Exact order of the group a spec describes.
pub fn group_order(spec: &SimilitudeGroupSpec) -> BigInt {
    sp_order(spec.g, spec.ell, spec.rho) * spec.multipliers().len()
}

/// Naive candidate count (l^rho)^{(2g)^2}; the budget contract is stated
/// against this even though the search prunes far below it.
pub fn candidate_count(spec: &SimilitudeGroupSpec) -> u128 {
    let n = (2 * spec.g) as u32;
    (spec.modulus() as u128).saturating_pow(n * n)
}

pub fn check_budget(spec: &SimilitudeGroupSpec, budget: u128) -> Result<()> {
    let needed = candidate_count(spec);
    if needed > budget {
        return Err(ClmError::BudgetExceeded { needed, budget });
    }
    Ok(())
}

static SP_CACHE: Lazy<Mutex<HashMap<(usize, u64, u32), &'static [RingMatrix]>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// The full symplectic group, sorted by row-major entries; cached and
/// leaked, since only a handful of (g, l, rho) triples are ever used.
pub fn sp_elements(g: usize, ell: u64, rho: u32) -> &'static [RingMatrix] {
    let mut cache = SP_CACHE.lock().unwrap();
    if let Some(list) = cache.get(&(g, ell, rho)) {
        return list;
    }
    let mut list = enumerate_sp(g, ell, rho);
    list.sort();
    let leaked: &'static [RingMatrix] = Box::leak(list.into_boxed_slice());
    cache.insert((g, ell, rho), leaked);
    leaked
}

fn enumerate_sp(g: usize, ell: u64, rho: u32) -> Vec<RingMatrix> {
    let n = 2 * g;
    let m = ell.pow(rho);
    let j = standard_form(g, ell, rho);
    let jr: Vec<Vec<u64>> = (0..n)
        .map(|i| (0..n).map(|k| j.get(i, k)).collect())
        .collect();
    let pairing = |u: &[u64], v: &[u64]| -> u64 {
        let mut acc: u128 = 0;
        for i in 0..n {
            for k in 0..n {
                acc += u[i] as u128 * jr[i][k] as u128 * v[k] as u128;
            }
        }
        (acc % m as u128) as u64
    };
    let mut out = Vec::new();
    let mut cols: Vec<Vec<u64>> = Vec::with_capacity(n);
    // DFS over columns; column k must satisfy <c_i, c_k> = J_ik for i < k.
    fn dfs(
        k: usize,
        n: usize,
        m: u64,
        g: usize,
        ell: u64,
        rho: u32,
        j: &RingMatrix,
        pairing: &dyn Fn(&[u64], &[u64]) -> u64,
        cols: &mut Vec<Vec<u64>>,
        out: &mut Vec<RingMatrix>,
    ) {
        if k == n {
            let mut entries = vec![0u64; n * n];
            for (cj, col) in cols.iter().enumerate() {
                for i in 0..n {
                    entries[i * n + cj] = col[i];
                }
            }
            out.push(RingMatrix::from_entries(g, ell, rho, entries));
            return;
        }
        let mut col = vec![0u64; n];
        loop {
            if (0..k).all(|i| pairing(&cols[i], &col) == j.get(i, k)) {
                cols.push(col.clone());
                dfs(k + 1, n, m, g, ell, rho, j, pairing, cols, out);
                cols.pop();
            }
            // Counter increment in base m.
            let mut done = true;
            for c in col.iter_mut() {
                *c += 1;
                if *c < m {
                    done = false;
                    break;
                }
                *c = 0;
            }
            if done {
                break;
            }
        }
    }
    dfs(0, n, m, g, ell, rho, &j, &pairing, &mut cols, &mut out);
    out
}

/// Every element of the similitude group the spec describes, in a
/// deterministic sorted order. Respects the candidate budget.
pub fn enumerate_group(spec: &SimilitudeGroupSpec, budget: u128) -> Result<Vec<RingMatrix>> {
    check_budget(spec, budget)?;
    let sp = sp_elements(spec.g, spec.ell, spec.rho);
    let mut out = Vec::with_capacity(sp.len() * spec.multipliers().len());
    for x in spec.multipliers() {
        let rep = similitude_representative(x, spec.g, spec.ell, spec.rho);
        for sigma in sp {
            out.push(sigma.mul(&rep));
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symp::matrix::multiplier;
    use crate::symp::Constraint;

    #[test]
    fn sp_order_examples() {
        assert_eq!(sp_order(1, 3, 1), BigInt::from(24));
        assert_eq!(sp_order(1, 3, 2), BigInt::from(648));
        assert_eq!(sp_order(2, 3, 1), BigInt::from(51840));
    }

    #[test]
    fn sp_enumeration_matches_order() {
        for (g, rho) in [(1usize, 1u32), (1, 2)] {
            let list = sp_elements(g, 3, rho);
            assert_eq!(BigInt::from(list.len()), sp_order(g, 3, rho));
            for gamma in list {
                assert_eq!(multiplier(gamma).unwrap(), 1);
            }
            // Sorted and duplicate-free.
            for w in list.windows(2) {
                assert!(w[0] < w[1]);
            }
        }
    }

    #[test]
    fn similitude_group_sizes() {
        let gl2 = enumerate_group(
            &SimilitudeGroupSpec::new(1, 3, 1, Constraint::Bracket(0)).unwrap(),
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert_eq!(gl2.len(), 48);
        let fiber = enumerate_group(
            &SimilitudeGroupSpec::new(1, 3, 2, Constraint::Fiber(1)).unwrap(),
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert_eq!(fiber.len(), 648);
        let xi1 = enumerate_group(
            &SimilitudeGroupSpec::new(1, 3, 2, Constraint::Bracket(1)).unwrap(),
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert_eq!(BigInt::from(xi1.len()), sp_order(1, 3, 2) * 3u32);
        for gamma in &xi1 {
            assert_eq!(multiplier(gamma).unwrap() % 3, 1);
        }
    }

    #[test]
    fn budget_contract() {
        let spec = SimilitudeGroupSpec::new(2, 3, 2, Constraint::Bracket(1)).unwrap();
        assert!(matches!(
            enumerate_group(&spec, DEFAULT_BUDGET),
            Err(ClmError::BudgetExceeded { .. })
        ));
        let ok = SimilitudeGroupSpec::new(2, 3, 1, Constraint::Bracket(1)).unwrap();
        assert!(check_budget(&ok, DEFAULT_BUDGET).is_ok());
    }

    #[test]
    fn gl_order_small() {
        assert_eq!(gl_order(2, 3, 1), BigInt::from(48));
        assert_eq!(gl_order(2, 3, 2), BigInt::from(3888));
        assert_eq!(gl_order(4, 3, 1), BigInt::from(24261120));
    }
}
