//! Orbit counting for similitude groups acting on surjection tuples.
//!
//! A surjection (R_rho)^{2g} ->> A is a 2g-tuple of elements of A (the
//! images of the standard basis) that generates A; the group acts by
//! precomposition. Orbits are counted three ways that must agree:
//! an explicit union-find partition of the tuple space, the Burnside
//! average |Fix(gamma)| = |Inj(A, ker(Id-gamma))| read off an exhaustive
//! census, and (for g >= rank A) a closed formula in terms of counts of
//! alternating forms.

use std::collections::{BTreeSet, HashMap};
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use once_cell::sync::Lazy;

use crate::counting::{inj_count, lambda_count};
use crate::error::{ClmError, Result};
use crate::groups::GroupType;
use crate::symp::census::CokernelCensus;
use crate::symp::enumerate::{gl_order, group_order, sp_order};
use crate::symp::matrix::{similitude_representative, transvection, RingMatrix};
use crate::symp::SimilitudeGroupSpec;

/// Generators: every transvection I + v (Jv)^T together with the
/// diagonal representative of each allowed multiplier. The transvection
/// closure is verified against |Sp| once per (g, l, rho) and cached.
pub fn generators(spec: &SimilitudeGroupSpec) -> Vec<RingMatrix> {
    assert!(
        transvections_generate_sp(spec.g, spec.ell, spec.rho),
        "transvections do not generate Sp_{}(Z/{}^{})",
        2 * spec.g,
        spec.ell,
        spec.rho
    );
    let n = 2 * spec.g;
    let m = spec.modulus();
    let mut out = Vec::new();
    let mut v = vec![0u64; n];
    loop {
        out.push(transvection(&v, spec.g, spec.ell, spec.rho));
        let mut done = true;
        for c in v.iter_mut() {
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
    for x in spec.multipliers() {
        out.push(similitude_representative(x, spec.g, spec.ell, spec.rho));
    }
    out
}

static GEN_CACHE: Lazy<Mutex<HashMap<(usize, u64, u32), bool>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn transvections_generate_sp(g: usize, ell: u64, rho: u32) -> bool {
    if let Some(&ok) = GEN_CACHE.lock().unwrap().get(&(g, ell, rho)) {
        return ok;
    }
    let n = 2 * g;
    let m = ell.pow(rho);
    let mut gens = Vec::new();
    let mut v = vec![0u64; n];
    loop {
        gens.push(transvection(&v, g, ell, rho));
        let mut done = true;
        for c in v.iter_mut() {
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
    // Closure from the identity.
    let mut seen: BTreeSet<RingMatrix> = BTreeSet::new();
    let mut frontier = vec![RingMatrix::identity(g, ell, rho)];
    seen.insert(frontier[0].clone());
    while let Some(x) = frontier.pop() {
        for t in &gens {
            let y = x.mul(t);
            if seen.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    let ok = BigInt::from(seen.len()) == sp_order(g, ell, rho);
    GEN_CACHE.lock().unwrap().insert((g, ell, rho), ok);
    ok
}

/// The tuple model of Hom((R_rho)^{2g}, A): states are base-mixed-radix
/// encodings of 2g elements of A.
struct TupleSpace {
    a: GroupType,
    g: usize,
    /// l^{a_i} per part, descending like the parts.
    radices: Vec<u64>,
    states: usize,
}

impl TupleSpace {
    fn new(a: &GroupType, g: usize) -> TupleSpace {
        let radices: Vec<u64> =
            a.parts().iter().map(|&p| a.ell().pow(p)).collect();
        let per_element: u128 = radices.iter().map(|&r| r as u128).product();
        let states = per_element.pow(2 * g as u32);
        TupleSpace {
            a: a.clone(),
            g,
            radices,
            states: states.to_usize().expect("tuple space exceeds usize"),
        }
    }

    /// state -> coords[slot][part].
    fn decode(&self, mut s: usize, coords: &mut [u64]) {
        for c in coords.iter_mut() {
            *c = 0;
        }
        let r = self.radices.len();
        for slot in 0..2 * self.g {
            for i in 0..r {
                let m = self.radices[i] as usize;
                coords[slot * r + i] = (s % m) as u64;
                s /= m;
            }
        }
    }

    fn encode(&self, coords: &[u64]) -> usize {
        let r = self.radices.len();
        let mut s = 0usize;
        for slot in (0..2 * self.g).rev() {
            for i in (0..r).rev() {
                s = s * self.radices[i] as usize + coords[slot * r + i] as usize;
            }
        }
        s
    }

    /// Nakayama: the tuple generates A iff its image in A/lA spans.
    fn is_surjective(&self, coords: &[u64]) -> bool {
        let ell = self.a.ell();
        let r = self.radices.len();
        let mut rows: Vec<Vec<u64>> =
            (0..2 * self.g).map(|s| coords[s * r..(s + 1) * r].iter().map(|&c| c % ell).collect()).collect();
        let mut rank = 0;
        for col in 0..r {
            if let Some(p) = (rank..rows.len()).find(|&i| rows[i][col] != 0) {
                rows.swap(rank, p);
                let inv = crate::symp::matrix::unit_inverse(rows[rank][col], ell);
                for i in 0..rows.len() {
                    if i != rank && rows[i][col] != 0 {
                        let f = (ell - rows[i][col] % ell) * inv % ell;
                        for c in col..r {
                            rows[i][c] = (rows[i][c] + f * rows[rank][c]) % ell;
                        }
                    }
                }
                rank += 1;
            }
        }
        rank == r
    }

    /// Precomposition with gamma: w_j = sum_i gamma_{ij} v_i in A.
    fn precompose(&self, gamma: &RingMatrix, coords: &[u64], out: &mut [u64]) {
        let n = 2 * self.g;
        let r = self.radices.len();
        for j in 0..n {
            for k in 0..r {
                let mut acc: u128 = 0;
                for i in 0..n {
                    acc += gamma.get(i, j) as u128 * coords[i * r + k] as u128;
                }
                out[j * r + k] = (acc % self.radices[k] as u128) as u64;
            }
        }
    }
}

/// Orbit count by explicit union-find over the surjection tuples.
/// Budget is measured in state-generator pairs.
pub fn orbit_count_enumerated(
    a: &GroupType,
    spec: &SimilitudeGroupSpec,
    budget: u128,
) -> Result<u64> {
    if BigInt::from(spec.ell).pow(spec.rho) < BigInt::from(a.ell()).pow(a.max_exponent()) {
        return Err(ClmError::PreconditionViolated(format!(
            "exp {a} exceeds the ring modulus"
        )));
    }
    if a.rank() > 2 * spec.g {
        return Ok(0);
    }
    let space = TupleSpace::new(a, spec.g);
    let gens = generators(spec);
    let needed = space.states as u128 * gens.len() as u128;
    if needed > budget {
        return Err(ClmError::BudgetExceeded { needed, budget });
    }
    let r = space.radices.len().max(1);
    let mut parent: Vec<u32> = (0..space.states as u32).collect();
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }
    let mut coords = vec![0u64; 2 * spec.g * r];
    let mut image = vec![0u64; 2 * spec.g * r];
    let mut surjective = vec![false; space.states];
    for s in 0..space.states {
        space.decode(s, &mut coords);
        if !space.is_surjective(&coords) {
            continue;
        }
        surjective[s] = true;
        for gamma in &gens {
            space.precompose(gamma, &coords, &mut image);
            let t = space.encode(&image);
            let (ra, rb) = (find(&mut parent, s as u32), find(&mut parent, t as u32));
            if ra != rb {
                parent[ra as usize] = rb;
            }
        }
    }
    let mut roots = BTreeSet::new();
    for s in 0..space.states {
        if surjective[s] {
            roots.insert(find(&mut parent, s as u32));
        }
    }
    Ok(roots.len() as u64)
}

/// Burnside: o |G| = sum_B N(B) |Inj(A, B)|, with the fixed-point count
/// |Fix(gamma)| = |Inj(A, ker(Id-gamma))| read off the cokernel census
/// (kernel and cokernel types are equidistributed).
pub fn orbit_count_burnside(census: &CokernelCensus, a: &GroupType) -> BigInt {
    let mut total = BigInt::zero();
    for (b, &n) in &census.counts {
        total += BigInt::from(n) * inj_count(a, b);
    }
    let (q, rem) = total.div_rem(&group_order(&census.spec));
    assert!(rem.is_zero(), "Burnside sum not divisible by the group order");
    q
}

/// For A = (R_rho)^{2g} the surjections are exactly GL_{2g}(Z/l^rho) and
/// the action is free, so the orbit count is the index.
pub fn orbit_count_free(spec: &SimilitudeGroupSpec) -> BigInt {
    let (q, rem) =
        gl_order(2 * spec.g, spec.ell, spec.rho).div_rem(&group_order(spec));
    assert!(rem.is_zero());
    q
}

/// Orbit count via union-find and Burnside, asserted equal.
pub fn orbit_count(
    a: &GroupType,
    spec: &SimilitudeGroupSpec,
    budget: u128,
) -> Result<u64> {
    let enumerated = orbit_count_enumerated(a, spec, budget)?;
    let census = crate::symp::census::census_exhaustive(spec, budget)?;
    let burnside = orbit_count_burnside(&census, a);
    assert_eq!(
        BigInt::from(enumerated),
        burnside,
        "orbit partition disagrees with Burnside for {a}"
    );
    Ok(enumerated)
}

/// |{f in Surj((R_rho)^{2g}, A) : f o gamma = f}|, by direct scan of the
/// tuple space.
pub fn fixed_surjection_count(
    gamma: &RingMatrix,
    a: &GroupType,
    budget: u128,
) -> Result<u64> {
    if gamma.rho < a.max_exponent() {
        return Err(ClmError::PreconditionViolated(format!(
            "exp {a} exceeds the ring modulus"
        )));
    }
    let space = TupleSpace::new(a, gamma.g);
    if space.states as u128 > budget {
        return Err(ClmError::BudgetExceeded { needed: space.states as u128, budget });
    }
    let r = space.radices.len().max(1);
    let mut coords = vec![0u64; 2 * gamma.g * r];
    let mut image = vec![0u64; 2 * gamma.g * r];
    let mut fixed = 0;
    for s in 0..space.states {
        space.decode(s, &mut coords);
        if !space.is_surjective(&coords) {
            continue;
        }
        space.precompose(gamma, &coords, &mut image);
        if image == coords {
            fixed += 1;
        }
    }
    Ok(fixed)
}

/// Orbit count through exponent reduction: maps onto A factor through
/// (R_e)^{2g} for e = exp-level of A, the group surjects onto
/// GSp^{<min(xi,e)>}(R_e), and the orbits correspond. The reduced count
/// is evaluated by Burnside over an exhaustive census at level e, which
/// is feasible even at g = 2 when A has exponent l.
pub fn orbit_count_reduced(
    a: &GroupType,
    spec: &SimilitudeGroupSpec,
    budget: u128,
) -> Result<BigInt> {
    if spec.rho < a.max_exponent() {
        return Err(ClmError::PreconditionViolated(format!(
            "exp {a} exceeds the ring modulus"
        )));
    }
    let e = a.max_exponent().max(1);
    let constraint = match spec.constraint {
        crate::symp::Constraint::Bracket(xi) => crate::symp::Constraint::Bracket(xi.min(e)),
        crate::symp::Constraint::Fiber(x) => {
            crate::symp::Constraint::Fiber(x % spec.ell.pow(e))
        }
    };
    let reduced = SimilitudeGroupSpec::new(spec.g, spec.ell, e, constraint)?;
    let census = crate::symp::census::census_exhaustive(&reduced, budget)?;
    Ok(orbit_count_burnside(&census, a))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitBound {
    /// Integral whenever exact, but the bare bound can be fractional.
    pub value: BigRational,
    /// Equality holds when g >= rank A; otherwise only an upper bound.
    pub exact: bool,
}

impl OrbitBound {
    pub fn integer_value(&self) -> BigInt {
        assert!(self.exact && self.value.is_integer());
        self.value.to_integer()
    }
}

/// Closed form l^{-(rho-xi)} |Lambda(A)| +
/// (l-1) sum_{i=0}^{rho-xi-1} l^{-(i+1)} |Lambda(A/l^{xi+i})|,
/// an upper bound for 2g >= rank A and exact for g >= rank A.
pub fn orbit_count_formula(
    a: &GroupType,
    g: usize,
    rho: u32,
    xi: u32,
) -> Result<OrbitBound> {
    if rho < xi || rho < a.max_exponent() || 2 * g < a.rank() {
        return Err(ClmError::PreconditionViolated(format!(
            "orbit formula needs rho >= xi, l^rho >= exp A, 2g >= rank A \
             (A={a}, g={g}, rho={rho}, xi={xi})"
        )));
    }
    let ell = BigInt::from(a.ell());
    let mut scaled = lambda_count(a);
    for i in 0..(rho - xi) {
        scaled += (&ell - 1)
            * ell.pow(rho - xi - i - 1)
            * lambda_count(&a.quotient_by_power(xi + i));
    }
    let value = BigRational::new(scaled, ell.pow(rho - xi));
    Ok(OrbitBound { value, exact: g >= a.rank() })
}

/// The injection-tuple model: a map A -> (R_rho)^{2g} is a tuple of one
/// image per part, the image of part i constrained to the l^{rho-a_i}
/// torsion-compatible coset; the group acts by postcomposition. Used to
/// check that injection orbits match surjection orbits on small cases.
pub fn inj_orbit_count_enumerated(
    a: &GroupType,
    spec: &SimilitudeGroupSpec,
    budget: u128,
) -> Result<u64> {
    let ell = spec.ell;
    let rho = spec.rho;
    if rho < a.max_exponent() {
        return Err(ClmError::PreconditionViolated(format!(
            "exp {a} exceeds the ring modulus"
        )));
    }
    let n = 2 * spec.g;
    let r = a.rank();
    let parts = a.parts();
    // Image of generator i is l^{rho - a_i} * (free coordinates mod l^{a_i}).
    let radices: Vec<u64> = parts.iter().map(|&p| ell.pow(p)).collect();
    let scales: Vec<u64> = parts.iter().map(|&p| ell.pow(rho - p)).collect();
    let order = a.order() as u128;
    let states_u128 = order.pow(n as u32);
    let states = states_u128
        .to_usize()
        .ok_or_else(|| ClmError::BudgetExceeded { needed: states_u128, budget })?;
    let gens = generators(spec);
    let needed = states as u128 * gens.len() as u128;
    if needed > budget {
        return Err(ClmError::BudgetExceeded { needed, budget });
    }
    let modulus = ell.pow(rho);
    // coords[i][j]: free coordinate of generator i at slot j.
    let decode = |mut s: usize, coords: &mut Vec<Vec<u64>>| {
        for row in coords.iter_mut() {
            for (j, c) in row.iter_mut().enumerate() {
                let _ = j;
                *c = 0;
            }
        }
        for i in 0..r {
            for j in 0..n {
                let m = radices[i] as usize;
                coords[i][j] = (s % m) as u64;
                s /= m;
            }
        }
    };
    let encode = |coords: &Vec<Vec<u64>>| -> usize {
        let mut s = 0usize;
        for i in (0..r).rev() {
            for j in (0..n).rev() {
                s = s * radices[i] as usize + coords[i][j] as usize;
            }
        }
        s
    };
    let is_injective = |coords: &Vec<Vec<u64>>| -> bool {
        // Brute-force: the image of A must have |A| distinct elements.
        let mut seen = BTreeSet::new();
        let mut c = vec![0u64; r];
        loop {
            let mut img = vec![0u64; n];
            for i in 0..r {
                for j in 0..n {
                    img[j] = (img[j]
                        + c[i] % radices[i] * scales[i] % modulus * coords[i][j])
                        % modulus;
                }
            }
            seen.insert(img);
            let mut done = true;
            for (i, ci) in c.iter_mut().enumerate() {
                *ci += 1;
                if *ci < radices[i] {
                    done = false;
                    break;
                }
                *ci = 0;
            }
            if done {
                break;
            }
        }
        seen.len() as u128 == order
    };
    let mut parent: Vec<u32> = (0..states as u32).collect();
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }
    let mut coords: Vec<Vec<u64>> = vec![vec![0u64; n]; r];
    let mut injective = vec![false; states];
    for s in 0..states {
        decode(s, &mut coords);
        if !is_injective(&coords) {
            continue;
        }
        injective[s] = true;
        for gamma in &gens {
            // Postcompose: each scaled image vector is mapped by gamma;
            // on the free coordinates this is multiplication mod l^{a_i}.
            let mut image: Vec<Vec<u64>> = vec![vec![0u64; n]; r];
            for i in 0..r {
                for row in 0..n {
                    let mut acc: u128 = 0;
                    for col in 0..n {
                        acc += gamma.get(row, col) as u128 * coords[i][col] as u128;
                    }
                    image[i][row] = (acc % radices[i] as u128) as u64;
                }
            }
            let t = encode(&image);
            let (ra, rb) = (find(&mut parent, s as u32), find(&mut parent, t as u32));
            if ra != rb {
                parent[ra as usize] = rb;
            }
        }
    }
    let mut roots = BTreeSet::new();
    for s in 0..states {
        if injective[s] {
            roots.insert(find(&mut parent, s as u32));
        }
    }
    Ok(roots.len() as u64)
}

/// The annulus combination (l o^{<xi>} - o^{<xi+1>}) / (l - 1), equal to
/// |Lambda(A / l^xi)| when g >= rank A.
pub fn orbit_annulus(
    o_xi: &BigInt,
    o_xi_plus: &BigInt,
    ell: u64,
) -> BigInt {
    let num = BigInt::from(ell) * o_xi - o_xi_plus;
    let (q, rem) = num.div_rem(&BigInt::from(ell - 1));
    assert!(rem.is_zero(), "orbit annulus not divisible by l - 1");
    q
}
