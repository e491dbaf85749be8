//! q-Pochhammer and q-binomial arithmetic at exact rational points, the
//! t-series whose partial sums converge to prod (1+l^-i)^-1, and
//! rigorously tail-bounded evaluations of the standard infinite products.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::interval::BoundedReal;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn ell_pow_inv(ell: u64, e: u64) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(ell).pow(e as u32))
}

/// (z; q)_i = prod_{j=0}^{i-1} (1 - q^j z); the empty product is 1.
pub fn pochhammer(z: &BigRational, q: &BigRational, i: u64) -> BigRational {
    let mut value = BigRational::one();
    let mut qj = BigRational::one();
    for _ in 0..i {
        value *= BigRational::one() - &qj * z;
        qj *= q;
    }
    value
}

/// (q)_i shorthand: (q; q)_i.
pub fn pochhammer_q(q: &BigRational, i: u64) -> BigRational {
    pochhammer(q, q, i)
}

/// Gaussian binomial (k choose m)_q at a rational point; 0 when m > k.
pub fn q_binomial(k: u64, m: u64, q: &BigRational) -> BigRational {
    if m > k {
        return BigRational::zero();
    }
    pochhammer_q(q, k) / (pochhammer_q(q, m) * pochhammer_q(q, k - m))
}

/// r_j = -1 / (l^{j(j+1)/2} (l^-1)_j), the composition weights of the
/// t-series.
pub fn t_weight(ell: u64, j: u64) -> BigRational {
    let tri = j * (j + 1) / 2;
    let denom = BigRational::from_integer(BigInt::from(ell).pow(tri as u32))
        * pochhammer_q(&ell_pow_inv(ell, 1), j);
    -BigRational::one() / denom
}

/// t_i, via the first-part recurrence t_i = sum_j r_j t_{i-j}.
pub fn t_coefficient(ell: u64, i: u64) -> BigRational {
    let mut t = vec![BigRational::one()];
    for n in 1..=i {
        let mut v = BigRational::zero();
        for j in 1..=n {
            v += t_weight(ell, j) * &t[(n - j) as usize];
        }
        t.push(v);
    }
    t.pop().unwrap()
}

/// Partial sum sum_{i=0}^n t_i; converges to prod (1+l^-i)^-1.
pub fn t_series(ell: u64, n: u64) -> BigRational {
    let mut t = vec![BigRational::one()];
    let mut total = BigRational::one();
    for m in 1..=n {
        let mut v = BigRational::zero();
        for j in 1..=m {
            v += t_weight(ell, j) * &t[(m - j) as usize];
        }
        total += &v;
        t.push(v);
    }
    total
}

/// t_i by literal enumeration of the 2^{i-1} compositions of i; oracle
/// for the recurrence.
pub fn t_coefficient_oracle(ell: u64, i: u64) -> BigRational {
    if i == 0 {
        return BigRational::one();
    }
    fn rec(ell: u64, remaining: u64, weight: &BigRational, total: &mut BigRational) {
        if remaining == 0 {
            *total += weight;
            return;
        }
        for j in 1..=remaining {
            let w = weight * t_weight(ell, j);
            rec(ell, remaining - j, &w, total);
        }
    }
    let mut total = BigRational::zero();
    rec(ell, i, &BigRational::one(), &mut total);
    total
}

/// T_i: compositions of i into triangular numbers {1, 3, 6, 10, ...}.
pub fn triangular_composition_count(i: u64) -> BigInt {
    let mut t = vec![BigInt::one()];
    for n in 1..=i {
        let mut v = BigInt::zero();
        let mut j = 1u64;
        loop {
            let tri = j * (j + 1) / 2;
            if tri > n {
                break;
            }
            v += &t[(n - tri) as usize];
            j += 1;
        }
        t.push(v);
    }
    t.pop().unwrap()
}

/// Rigorous bound on |sum_{i>n} t_i|: each composition with parts
/// j_1,...,j_m contributes at most lambda^{sum j_k(j_k+1)/2} with
/// lambda = 1/(l-1), since l^{j(j+1)/2} (l^-1)_j >= (l-1)^{j(j+1)/2}.
/// Regrouping by the triangular weight w > n gives sum_w T_w lambda^w,
/// and T_w <= (5/3)^w closes the sum geometrically (valid for l >= 3).
pub fn t_tail_bound(ell: u64, n: u64) -> BigRational {
    assert!(ell >= 3);
    let lambda = BigRational::new(BigInt::one(), BigInt::from(ell - 1));
    let cutoff = n + 60;
    let mut bound = BigRational::zero();
    let mut lw = lambda_pow(&lambda, n + 1);
    for w in (n + 1)..=cutoff {
        bound += BigRational::from_integer(triangular_composition_count(w)) * &lw;
        lw *= &lambda;
    }
    // Geometric remainder with ratio 5 lambda / 3 < 1.
    let ratio = rat(5) / rat(3) * &lambda;
    let head = pow_rat(&ratio, cutoff + 1);
    bound + head / (BigRational::one() - ratio)
}

fn lambda_pow(lambda: &BigRational, e: u64) -> BigRational {
    pow_rat(lambda, e)
}

fn pow_rat(x: &BigRational, e: u64) -> BigRational {
    let mut v = BigRational::one();
    for _ in 0..e {
        v *= x;
    }
    v
}

/// Shared truncation engine for prod_{i>=1} (1 + s*l^-i)^{s'} with
/// s, s' in {+1, -1}: evaluates N factors exactly and bounds the tail via
/// -log(1-x) <= x/(1-x) termwise, summed geometrically. The resulting
/// relative bound L/(1-L) is monotone decreasing in N.
fn truncated_product(ell: u64, tol: &BigRational, one_plus: bool, invert: bool) -> BoundedReal {
    assert!(tol.is_positive(), "tolerance must be positive");
    let ell_inv = ell_pow_inv(ell, 1);
    let mut partial = BigRational::one();
    let mut term = ell_inv.clone();
    loop {
        let factor = if one_plus {
            BigRational::one() + &term
        } else {
            BigRational::one() - &term
        };
        partial *= &factor;
        term *= &ell_inv;
        // Tail of sum_{i>n} x_i/(1-x_i) with x_i = l^-i: geometric sum
        // s = l^-(n+1)/(1-l^-1), each term inflated by 1/(1-l^-(n+1)).
        let s = &term / (BigRational::one() - &ell_inv);
        let log_bound = &s / (BigRational::one() - &term);
        if log_bound >= BigRational::one() {
            continue;
        }
        // |tail factor - 1| <= e^L - 1 <= L/(1-L).
        let rel = &log_bound / (BigRational::one() - &log_bound);
        let value = if invert {
            BigRational::one() / &partial
        } else {
            partial.clone()
        };
        let radius = value.abs() * &rel;
        if &radius <= tol {
            return BoundedReal::new(value, radius);
        }
    }
}

/// prod_{i=1}^inf (1 + l^-i)^{-1} within +-tol.
pub fn one_plus_product_inverse(ell: u64, tol: &BigRational) -> BoundedReal {
    truncated_product(ell, tol, true, true)
}

/// prod_{i=1}^inf (1 - l^-i) within +-tol.
pub fn one_minus_product(ell: u64, tol: &BigRational) -> BoundedReal {
    truncated_product(ell, tol, false, false)
}

/// sum_i (-1)^i (k choose i)_q q^i; equals (q; q^2)_{ceil(k/2)}.
pub fn kuperberg_sum(k: u64, q: &BigRational) -> BigRational {
    let mut total = BigRational::zero();
    let mut sign = BigRational::one();
    let mut qi = BigRational::one();
    for i in 0..=k {
        total += &sign * q_binomial(k, i, q) * &qi;
        sign = -sign;
        qi *= q;
    }
    total
}
