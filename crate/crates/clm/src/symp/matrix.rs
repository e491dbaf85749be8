//! Square matrices over Z/l^rho and the symplectic similitude structure:
//! the standard form J, the multiplier map, Smith-normal-form cokernel
//! classification, and brute-force kernel types.

use crate::error::{ClmError, Result};
use crate::groups::GroupType;

/// A 2g x 2g matrix over Z/l^rho, entries reduced, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingMatrix {
    pub g: usize,
    pub ell: u64,
    pub rho: u32,
    entries: Vec<u64>,
}

impl RingMatrix {
    pub fn n(&self) -> usize {
        2 * self.g
    }

    pub fn modulus(&self) -> u64 {
        self.ell.pow(self.rho)
    }

    pub fn zero(g: usize, ell: u64, rho: u32) -> Self {
        RingMatrix { g, ell, rho, entries: vec![0; 4 * g * g] }
    }

    pub fn identity(g: usize, ell: u64, rho: u32) -> Self {
        let mut m = Self::zero(g, ell, rho);
        for i in 0..m.n() {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_entries(g: usize, ell: u64, rho: u32, entries: Vec<u64>) -> Self {
        assert_eq!(entries.len(), 4 * g * g);
        let m = ell.pow(rho);
        RingMatrix { g, ell, rho, entries: entries.into_iter().map(|e| e % m).collect() }
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        let n = self.n();
        let m = self.modulus();
        self.entries[i * n + j] = v % m;
    }

    pub fn mul(&self, other: &RingMatrix) -> RingMatrix {
        let n = self.n();
        let m = self.modulus();
        let mut out = RingMatrix::zero(self.g, self.ell, self.rho);
        for i in 0..n {
            for j in 0..n {
                let mut acc: u128 = 0;
                for k in 0..n {
                    acc += self.get(i, k) as u128 * other.get(k, j) as u128;
                }
                out.set(i, j, (acc % m as u128) as u64);
            }
        }
        out
    }

    pub fn add(&self, other: &RingMatrix) -> RingMatrix {
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a = (*a + b) % self.modulus();
        }
        out
    }

    pub fn sub(&self, other: &RingMatrix) -> RingMatrix {
        let m = self.modulus();
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a = (*a + m - b) % m;
        }
        out
    }

    pub fn scale(&self, c: u64) -> RingMatrix {
        let m = self.modulus();
        let mut out = self.clone();
        for a in out.entries.iter_mut() {
            *a = ((*a as u128 * c as u128) % m as u128) as u64;
        }
        out
    }

    pub fn transpose(&self) -> RingMatrix {
        let n = self.n();
        let mut out = RingMatrix::zero(self.g, self.ell, self.rho);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Reduction mod l^k, k <= rho.
    pub fn reduce(&self, k: u32) -> RingMatrix {
        assert!(k >= 1 && k <= self.rho);
        let m = self.ell.pow(k);
        RingMatrix {
            g: self.g,
            ell: self.ell,
            rho: k,
            entries: self.entries.iter().map(|&e| e % m).collect(),
        }
    }

    /// Canonical lift to Z/l^k, k >= rho (entries unchanged).
    pub fn lift(&self, k: u32) -> RingMatrix {
        assert!(k >= self.rho);
        RingMatrix { g: self.g, ell: self.ell, rho: k, entries: self.entries.clone() }
    }

    /// Determinant mod l^rho by cofactor expansion; dimensions stay tiny.
    pub fn det(&self) -> u64 {
        fn rec(n: usize, rows: &[usize], cols: &[usize], m: &RingMatrix, modulus: u64) -> u64 {
            if n == 1 {
                return m.get(rows[0], cols[0]);
            }
            let mut acc: u64 = 0;
            let sub_rows: Vec<usize> = rows[1..].to_vec();
            for (k, &c) in cols.iter().enumerate() {
                let sub_cols: Vec<usize> =
                    cols.iter().copied().filter(|&x| x != c).collect();
                let minor = rec(n - 1, &sub_rows, &sub_cols, m, modulus);
                let term = (m.get(rows[0], c) as u128 * minor as u128 % modulus as u128) as u64;
                acc = if k % 2 == 0 {
                    (acc + term) % modulus
                } else {
                    (acc + modulus - term) % modulus
                };
            }
            acc
        }
        let n = self.n();
        let idx: Vec<usize> = (0..n).collect();
        rec(n, &idx, &idx, self, self.modulus())
    }

    /// Adjugate matrix: adj(M) M = det(M) I.
    pub fn adjugate(&self) -> RingMatrix {
        let n = self.n();
        let modulus = self.modulus();
        let mut out = RingMatrix::zero(self.g, self.ell, self.rho);
        for i in 0..n {
            for j in 0..n {
                let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
                let det = minor_det(self, &rows, &cols, modulus);
                let sign_pos = (i + j) % 2 == 0;
                out.set(i, j, if sign_pos { det } else { (modulus - det) % modulus });
            }
        }
        out
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        let n = self.n();
        let m = self.modulus();
        (0..n)
            .map(|i| {
                let mut acc: u128 = 0;
                for j in 0..n {
                    acc += self.get(i, j) as u128 * v[j] as u128;
                }
                (acc % m as u128) as u64
            })
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == RingMatrix::identity(self.g, self.ell, self.rho)
    }
}

fn minor_det(m: &RingMatrix, rows: &[usize], cols: &[usize], modulus: u64) -> u64 {
    if rows.is_empty() {
        return 1 % modulus;
    }
    let mut acc: u64 = 0;
    let sub_rows: Vec<usize> = rows[1..].to_vec();
    for (k, &c) in cols.iter().enumerate() {
        let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = minor_det(m, &sub_rows, &sub_cols, modulus);
        let term = (m.get(rows[0], c) as u128 * minor as u128 % modulus as u128) as u64;
        acc = if k % 2 == 0 {
            (acc + term) % modulus
        } else {
            (acc + modulus - term) % modulus
        };
    }
    acc
}

/// Modular inverse of a unit mod l^rho.
pub fn unit_inverse(a: u64, modulus: u64) -> u64 {
    // Extended Euclid; a is coprime to the l-power modulus.
    let (mut r0, mut r1) = (modulus as i128, (a % modulus) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    assert_eq!(r0, 1, "not a unit");
    (s0.rem_euclid(modulus as i128)) as u64
}

/// l-adic valuation capped at rho (0 maps to rho).
pub fn valuation(mut a: u64, ell: u64, rho: u32) -> u32 {
    if a == 0 {
        return rho;
    }
    let mut v = 0;
    while a % ell == 0 {
        a /= ell;
        v += 1;
    }
    v.min(rho)
}

/// The fixed hyperbolic symplectic form J = [[0, I], [-I, 0]] in the basis
/// e_1..e_g, f_1..f_g.
pub fn standard_form(g: usize, ell: u64, rho: u32) -> RingMatrix {
    let m = ell.pow(rho);
    let mut j = RingMatrix::zero(g, ell, rho);
    for i in 0..g {
        j.set(i, g + i, 1);
        j.set(g + i, i, m - 1);
    }
    j
}

/// The multiplier m with gamma^T J gamma = m J, if gamma is a similitude.
pub fn multiplier(gamma: &RingMatrix) -> Result<u64> {
    let j = standard_form(gamma.g, gamma.ell, gamma.rho);
    let form = gamma.transpose().mul(&j).mul(gamma);
    // J has a 1 at (0, g); read m off there and verify globally.
    let m = form.get(0, gamma.g);
    if m % gamma.ell == 0 {
        return Err(ClmError::NotSimilitude(format!(
            "form multiple {m} is not a unit"
        )));
    }
    if form != j.scale(m) {
        return Err(ClmError::NotSimilitude(
            "gamma^T J gamma is not a scalar multiple of J".into(),
        ));
    }
    Ok(m)
}

/// Is gamma a symplectic similitude with multiplier in the allowed set?
pub fn is_similitude(gamma: &RingMatrix) -> bool {
    multiplier(gamma).is_ok()
}

/// The standard similitude with multiplier x: e_i -> x e_i, f_i -> f_i.
pub fn similitude_representative(x: u64, g: usize, ell: u64, rho: u32) -> RingMatrix {
    let mut m = RingMatrix::identity(g, ell, rho);
    for i in 0..g {
        m.set(i, i, x);
    }
    m
}

/// The symplectic transvection x -> x + <x, v> v as a matrix, where
/// <x, v> = x^T J v. Symplectic for every v.
pub fn transvection(v: &[u64], g: usize, ell: u64, rho: u32) -> RingMatrix {
    let j = standard_form(g, ell, rho);
    let jv = j.apply(v);
    let n = 2 * g;
    let m = ell.pow(rho);
    let mut t = RingMatrix::identity(g, ell, rho);
    for i in 0..n {
        for k in 0..n {
            let cur = t.get(i, k);
            let inc = (v[i] as u128 * jv[k] as u128 % m as u128) as u64;
            t.set(i, k, (cur + inc) % m);
        }
    }
    t
}

/// Isomorphism type of coker(M) over Z/l^rho via Smith normal form:
/// pivot on a minimal-valuation entry, normalize it to a power of l,
/// eliminate its row and column, recurse.
pub fn cokernel_of(m: &RingMatrix) -> GroupType {
    let modulus = m.modulus();
    let n = m.n();
    let mut a: Vec<u64> = m.entries().to_vec();
    let mut parts: Vec<u32> = Vec::new();
    let mut size = n;
    let at = |a: &[u64], size: usize, i: usize, j: usize| a[i * size + j];
    while size > 0 {
        // Minimal-valuation pivot.
        let mut best: Option<(usize, usize, u32)> = None;
        for i in 0..size {
            for j in 0..size {
                let v = valuation(at(&a, size, i, j), m.ell, m.rho);
                if best.map_or(true, |(_, _, bv)| v < bv) {
                    best = Some((i, j, v));
                }
            }
        }
        let (pi, pj, pv) = best.unwrap();
        if pv >= m.rho {
            // Everything left is zero: each remaining row contributes a
            // full Z/l^rho summand.
            parts.extend(std::iter::repeat(m.rho).take(size));
            break;
        }
        parts.push(pv);
        // Normalize the pivot to l^pv: scale its row by the unit inverse.
        let pivot = at(&a, size, pi, pj);
        let unit = pivot / m.ell.pow(pv);
        let inv = unit_inverse(unit, modulus);
        for j in 0..size {
            let e = at(&a, size, pi, j);
            a[pi * size + j] = (e as u128 * inv as u128 % modulus as u128) as u64;
        }
        let lead = m.ell.pow(pv);
        // Eliminate the pivot column (rows) and row (columns); every
        // entry is divisible by l^pv, so the quotients are exact.
        for i in 0..size {
            if i == pi {
                continue;
            }
            let factor = at(&a, size, i, pj) / lead;
            for j in 0..size {
                let sub = (factor as u128 * at(&a, size, pi, j) as u128
                    % modulus as u128) as u64;
                let e = at(&a, size, i, j);
                a[i * size + j] = (e + modulus - sub) % modulus;
            }
        }
        // Row elimination is now implicit: after the column sweep, drop
        // the pivot row and column entirely (its row entries only affect
        // column operations, which do not change the cokernel type).
        let mut next = Vec::with_capacity((size - 1) * (size - 1));
        for i in 0..size {
            if i == pi {
                continue;
            }
            for j in 0..size {
                if j == pj {
                    continue;
                }
                next.push(at(&a, size, i, j));
            }
        }
        a = next;
        size -= 1;
    }
    GroupType::new(m.ell, parts)
}

/// coker(Id - gamma).
pub fn cokernel_type(gamma: &RingMatrix) -> GroupType {
    let id = RingMatrix::identity(gamma.g, gamma.ell, gamma.rho);
    cokernel_of(&id.sub(gamma))
}

/// ker(Id - gamma) as an abstract group, classified by brute-force
/// enumeration of solutions and their l^k-torsion counts. Deliberately
/// independent of the Smith-normal-form path.
pub fn kernel_type(gamma: &RingMatrix) -> GroupType {
    let id = RingMatrix::identity(gamma.g, gamma.ell, gamma.rho);
    let m = id.sub(gamma);
    let modulus = m.modulus();
    let n = m.n();
    let total = (modulus as u128).pow(n as u32);
    assert!(total <= 1 << 32, "kernel enumeration too large");
    let mut torsion_counts = vec![0u64; m.rho as usize + 1];
    let mut v = vec![0u64; n];
    for _ in 0..total {
        if m.apply(&v).iter().all(|&x| x == 0) {
            // Additive order of v is l^k with k = max_i (rho - val(v_i)).
            let k = v
                .iter()
                .map(|&c| m.rho - valuation(c, m.ell, m.rho))
                .max()
                .unwrap();
            torsion_counts[k as usize] += 1;
        }
        // Increment the counter vector.
        for c in v.iter_mut() {
            *c += 1;
            if *c < modulus {
                break;
            }
            *c = 0;
        }
    }
    // N_k = #elements killed by l^k; conjugate column k is log_l of the
    // ratio N_k / N_{k-1}.
    let mut conj = Vec::new();
    let mut prev = 1u64;
    let mut cum = torsion_counts[0];
    for k in 1..=m.rho {
        cum += torsion_counts[k as usize];
        let mut ratio = cum / prev;
        let mut col = 0u32;
        while ratio > 1 {
            ratio /= m.ell;
            col += 1;
        }
        conj.push(col);
        prev = cum;
    }
    let rank = conj.first().copied().unwrap_or(0);
    let parts = (1..=rank).map(|i| conj.iter().filter(|&&c| c >= i).count() as u32);
    GroupType::new(m.ell, parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(g: usize, rho: u32, entries: &[u64]) -> RingMatrix {
        RingMatrix::from_entries(g, 3, rho, entries.to_vec())
    }

    #[test]
    fn standard_form_properties() {
        let j = standard_form(1, 3, 1);
        assert_eq!(j.entries(), &[0, 1, 2, 0]);
        for (g, rho) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            let j = standard_form(g, 3, rho);
            let m = j.modulus();
            // J^2 = -Id and det J = 1 (a unit).
            let id = RingMatrix::identity(g, 3, rho);
            assert_eq!(j.mul(&j), id.scale(m - 1));
            assert_eq!(j.det(), 1);
            assert_eq!(j.transpose(), j.scale(m - 1));
        }
    }

    #[test]
    fn multiplier_examples() {
        let id = RingMatrix::identity(1, 3, 2);
        assert_eq!(multiplier(&id).unwrap(), 1);
        let d = similitude_representative(4, 1, 3, 2);
        assert_eq!(multiplier(&d).unwrap(), 4);
        // Non-invertible matrix is rejected.
        assert!(multiplier(&mat(1, 1, &[1, 1, 1, 1])).is_err());
    }

    #[test]
    fn multiplier_is_determinant_at_g1() {
        // Exhaustive over all 2x2 matrices mod 3: similitudes are exactly
        // the invertibles, with multiplier = det.
        let mut invertible = 0;
        for code in 0..81u64 {
            let e: Vec<u64> = (0..4).map(|k| (code / 3u64.pow(k)) % 3).collect();
            let m = mat(1, 1, &e);
            match multiplier(&m) {
                Ok(x) => {
                    assert_eq!(x, m.det());
                    invertible += 1;
                }
                Err(_) => assert_eq!(m.det() % 3, 0),
            }
        }
        assert_eq!(invertible, 48);
    }

    #[test]
    fn representative_is_homomorphic() {
        for x in [1u64, 2, 4, 5, 7, 8] {
            for y in [1u64, 2, 4, 5, 7, 8] {
                let rx = similitude_representative(x, 2, 3, 2);
                let ry = similitude_representative(y, 2, 3, 2);
                assert_eq!(multiplier(&rx.mul(&ry)).unwrap(), x * y % 9);
            }
        }
    }

    #[test]
    fn transvections_are_symplectic() {
        for (g, rho) in [(1, 2u32), (2, 1)] {
            let m = 3u64.pow(rho);
            let n = 2 * g;
            for code in 1..m.pow(n as u32) {
                let v: Vec<u64> = (0..n).map(|k| (code / m.pow(k as u32)) % m).collect();
                let t = transvection(&v, g, 3, rho);
                assert_eq!(multiplier(&t).unwrap(), 1);
            }
        }
    }

    #[test]
    fn adjugate_identity() {
        for code in 0..500u64 {
            let e: Vec<u64> = (0..4).map(|k| (code / 9u64.pow(k)) % 9).collect();
            let m = mat(1, 2, &e);
            let adj = m.adjugate();
            let d = m.det();
            assert_eq!(adj.mul(&m), RingMatrix::identity(1, 3, 2).scale(d));
            assert_eq!(m.mul(&adj), RingMatrix::identity(1, 3, 2).scale(d));
        }
        let m4 = RingMatrix::from_entries(
            2,
            3,
            2,
            vec![1, 2, 0, 3, 4, 1, 1, 0, 2, 2, 5, 7, 0, 1, 8, 3],
        );
        let d = m4.det();
        assert_eq!(m4.adjugate().mul(&m4), RingMatrix::identity(2, 3, 2).scale(d));
    }

    #[test]
    fn cokernel_examples() {
        // gamma = Id at rho=2: Id - gamma = 0, cokernel is all of (Z/9)^2.
        let id = RingMatrix::identity(1, 3, 2);
        assert_eq!(cokernel_type(&id).to_string(), "3^[2,2]");
        // gamma unipotent over F_3.
        let u = mat(1, 1, &[1, 1, 0, 1]);
        assert_eq!(cokernel_type(&u).to_string(), "3^[1]");
        // gamma = 2 Id: Id - gamma = -Id invertible.
        let s = RingMatrix::identity(1, 3, 1).scale(2);
        assert!(cokernel_type(&s).is_trivial());
    }

    #[test]
    fn kernel_examples() {
        let id = RingMatrix::identity(1, 3, 2);
        assert_eq!(kernel_type(&id).to_string(), "3^[2,2]");
        let u = mat(1, 1, &[1, 1, 0, 1]);
        assert_eq!(kernel_type(&u).to_string(), "3^[1]");
        let s = RingMatrix::identity(1, 3, 1).scale(2);
        assert!(kernel_type(&s).is_trivial());
    }

    #[test]
    fn snf_against_random_row_column_operations() {
        // The cokernel type must be invariant under left/right
        // multiplication by invertible matrices.
        let samples = [
            mat(1, 2, &[3, 1, 0, 6]),
            mat(1, 2, &[3, 3, 3, 3]),
            mat(1, 2, &[0, 3, 6, 0]),
            mat(2, 2, &[3, 0, 1, 2, 0, 3, 4, 8, 0, 0, 6, 3, 0, 0, 0, 0]),
        ];
        let units = [
            mat(1, 2, &[1, 1, 0, 1]),
            mat(1, 2, &[2, 1, 1, 1]),
            mat(1, 2, &[1, 0, 3, 1]),
        ];
        let units4 = [
            mat(2, 2, &[1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 1, 2, 0, 0, 0, 1]),
            mat(2, 2, &[2, 0, 0, 1, 0, 1, 3, 0, 0, 0, 1, 0, 1, 0, 0, 1]),
        ];
        for s in &samples {
            let base = cokernel_of(s);
            let us: &[RingMatrix] = if s.g == 1 { &units } else { &units4 };
            for u in us {
                assert_eq!(cokernel_of(&u.mul(s)), base);
                assert_eq!(cokernel_of(&s.mul(u)), base);
            }
        }
    }

    #[test]
    fn valuation_and_inverse() {
        assert_eq!(valuation(0, 3, 2), 2);
        assert_eq!(valuation(6, 3, 2), 1);
        assert_eq!(valuation(7, 3, 2), 0);
        for a in [1u64, 2, 4, 5, 7, 8] {
            assert_eq!(a * unit_inverse(a, 9) % 9, 1);
        }
    }
}
