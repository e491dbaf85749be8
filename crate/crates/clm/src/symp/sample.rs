//! Exactly-uniform sampling from symplectic similitude groups.
//!
//! Base level: rejection sampling in Sp_2g(F_l) with early exit on the
//! first violated column pairing. Higher levels: each element of
//! Sp(Z/l^k) has exactly l^{g(2g+1)} lifts to Sp(Z/l^{k+1}), affinely
//! parametrized by symmetric matrices mod l, so uniform lifting is a
//! uniform draw from that parameter space. A fiber is reached by right
//! multiplication with the standard multiplier representative.
//!
//! Streams are reproducible: sample i uses a dedicated RNG stream
//! derived from (seed, i), so results are independent of worker count.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::symp::matrix::{
    multiplier, similitude_representative, standard_form, unit_inverse, RingMatrix,
};
use crate::symp::SimilitudeGroupSpec;

/// Dimension of the lift parameter space: symmetric 2g x 2g matrices.
pub fn lift_dimension(g: usize) -> usize {
    g * (2 * g + 1)
}

/// The lift of gamma_hat in Sp(Z/l^k) to Sp(Z/l^{k+1}) selected by the
/// symmetric parameter s (lift_dimension(g) coefficients mod l).
///
/// With E = (gamma'^T J gamma' - J) / l^k (antisymmetric mod l) and
/// M = -E/2 + S, the lift is gamma' (I + J^{-1} M scaled by l^k); M runs
/// over solutions of M - M^T = -E exactly once per symmetric S.
pub fn sp_lift(gamma_hat: &RingMatrix, s: &[u64]) -> RingMatrix {
    let g = gamma_hat.g;
    let ell = gamma_hat.ell;
    let k = gamma_hat.rho;
    let n = 2 * g;
    assert_eq!(s.len(), lift_dimension(g));
    let step = ell.pow(k);
    let gamma = gamma_hat.lift(k + 1);
    let j = standard_form(g, ell, k + 1);
    // E = (gamma^T J gamma - J) / l^k, reduced mod l.
    let defect = gamma.transpose().mul(&j).mul(&gamma).sub(&j);
    let mut e = RingMatrix::zero(g, ell, 1);
    for i in 0..n {
        for c in 0..n {
            debug_assert_eq!(defect.get(i, c) % step, 0);
            e.set(i, c, defect.get(i, c) / step % ell);
        }
    }
    // M = -E/2 + S mod l.
    let half = unit_inverse(2, ell);
    let mut m = RingMatrix::zero(g, ell, 1);
    let mut idx = 0;
    for i in 0..n {
        for c in i..n {
            m.set(i, c, s[idx]);
            m.set(c, i, s[idx]);
            idx += 1;
        }
    }
    let minus_half = (ell - half) % ell;
    m = m.add(&e.scale(minus_half));
    // X = gamma J^{-1} M; J^{-1} = -J.
    let j1 = standard_form(g, ell, 1);
    let w = j1.scale(ell - 1).mul(&m);
    let x = gamma.reduce(1).mul(&w);
    let mut out = gamma;
    for i in 0..n {
        for c in 0..n {
            let v = (out.get(i, c) + step * x.get(i, c)) % ell.pow(k + 1);
            out.set(i, c, v);
        }
    }
    out
}

/// One uniform element of Sp_2g(F_l), by column-wise rejection: columns
/// are drawn uniformly and the matrix is rejected at the first violated
/// pairing, which is equivalent to plain rejection but exits early.
pub fn sample_sp_mod_ell(g: usize, ell: u64, rng: &mut impl Rng) -> RingMatrix {
    let n = 2 * g;
    let j = standard_form(g, ell, 1);
    'retry: loop {
        let mut cols: Vec<Vec<u64>> = Vec::with_capacity(n);
        for k in 0..n {
            let col: Vec<u64> = (0..n).map(|_| rng.gen_range(0..ell)).collect();
            for (i, prev) in cols.iter().enumerate() {
                let mut acc: u128 = 0;
                for a in 0..n {
                    for b in 0..n {
                        acc += prev[a] as u128 * j.get(a, b) as u128 * col[b] as u128;
                    }
                }
                if (acc % ell as u128) as u64 != j.get(i, k) {
                    continue 'retry;
                }
            }
            cols.push(col);
        }
        let mut entries = vec![0u64; n * n];
        for (c, col) in cols.iter().enumerate() {
            for i in 0..n {
                entries[i * n + c] = col[i];
            }
        }
        return RingMatrix::from_entries(g, ell, 1, entries);
    }
}

/// One uniform element of Sp_2g(Z/l^rho): reduce-then-lift.
pub fn sample_sp(g: usize, ell: u64, rho: u32, rng: &mut impl Rng) -> RingMatrix {
    let mut gamma = sample_sp_mod_ell(g, ell, rng);
    for _ in 1..rho {
        let s: Vec<u64> = (0..lift_dimension(g)).map(|_| rng.gen_range(0..ell)).collect();
        gamma = sp_lift(&gamma, &s);
    }
    gamma
}

/// Reproducible sampler for a similitude group spec.
#[derive(Debug, Clone)]
pub struct Sampler {
    pub spec: SimilitudeGroupSpec,
    pub seed: u64,
}

impl Sampler {
    pub fn new(spec: SimilitudeGroupSpec, seed: u64) -> Self {
        Sampler { spec, seed }
    }

    /// The i-th sample; identical for identical (seed, i).
    pub fn sample(&self, i: u64) -> RingMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(i.wrapping_add(1));
        let spec = &self.spec;
        let sigma = sample_sp(spec.g, spec.ell, spec.rho, &mut rng);
        let multipliers = spec.multipliers();
        let x = multipliers[rng.gen_range(0..multipliers.len())];
        sigma.mul(&similitude_representative(x, spec.g, spec.ell, spec.rho))
    }
}

/// Independent oracle: plain rejection at full level rho (all entries
/// uniform, accept iff symplectic). Exponentially slow in rho and g;
/// used only to validate the reduce-then-lift sampler on tiny cases.
pub fn rejection_sample_full(g: usize, ell: u64, rho: u32, rng: &mut impl Rng) -> RingMatrix {
    let n = 2 * g;
    let m = ell.pow(rho);
    loop {
        let entries: Vec<u64> = (0..n * n).map(|_| rng.gen_range(0..m)).collect();
        let gamma = RingMatrix::from_entries(g, ell, rho, entries);
        if matches!(multiplier(&gamma), Ok(1)) {
            return gamma;
        }
    }
}
