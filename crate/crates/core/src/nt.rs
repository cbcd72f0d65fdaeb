//! Small integer and rational helpers shared by every module.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut f = 3u64;
    while f.saturating_mul(f) <= n {
        if n % f == 0 {
            return false;
        }
        f += 2;
    }
    true
}

/// Primes in the closed interval `[lo, hi]`.
pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

/// Distinct prime factors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2u64;
    while f * f <= n {
        if n % f == 0 {
            out.push(f);
            while n % f == 0 {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let m = m as u128;
    let mut r = 1u128 % m;
    let mut b = b as u128 % m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r as u64
}

/// Inverse of `a` modulo the prime `p`.
pub fn inv_mod_prime(a: u64, p: u64) -> Option<u64> {
    if a % p == 0 {
        None
    } else {
        Some(pow_mod(a, p - 2, p))
    }
}

pub fn bigint_pow(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// p-adic valuation of a nonzero integer; `None` for zero.
pub fn v_p_int(x: &BigInt, p: u64) -> Option<u64> {
    if x.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut v = 0u64;
    let mut y = x.abs();
    loop {
        let (quo, rem) = y.div_rem(&pb);
        if !rem.is_zero() {
            return Some(v);
        }
        v += 1;
        y = quo;
    }
}

/// p-adic valuation of a nonzero rational; `None` for zero.
pub fn v_p(x: &Q, p: u64) -> Option<i64> {
    let n = v_p_int(x.numer(), p)?;
    let d = v_p_int(x.denom(), p).unwrap_or(0);
    Some(n as i64 - d as i64)
}

pub fn is_p_integral(x: &Q, p: u64) -> bool {
    x.is_zero() || v_p(x, p).unwrap() >= 0
}

/// Image of a p-integral rational in Z/p.
pub fn reduce_rational(x: &Q, p: u64) -> Option<u64> {
    if !is_p_integral(x, p) {
        return None;
    }
    let pb = BigInt::from(p);
    let n = x.numer().mod_floor(&pb);
    let d = x.denom().mod_floor(&pb);
    let n: u64 = n.try_into().ok()?;
    let d: u64 = d.try_into().ok()?;
    Some((n as u128 * inv_mod_prime(d, p)? as u128 % p as u128) as u64)
}

pub fn ceil_div(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    a.div_euclid(b) + i64::from(a.rem_euclid(b) != 0)
}

pub fn floor_q(x: &Q) -> BigInt {
    x.floor().to_integer()
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Binomial coefficient with the conventions used by the H-expansions:
/// `C(n, k) = 0` for `k < 0`, `C(n, 0) = 1`, and for negative `n` the
/// usual generalized value, except that `C(-1, -1) = 1`.
pub fn binom(n: i64, k: i64) -> BigInt {
    if n == -1 && k == -1 {
        return BigInt::one();
    }
    if k < 0 {
        return BigInt::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for t in 0..k {
        num *= BigInt::from(n - t);
        den *= BigInt::from(t + 1);
    }
    num / den
}

pub fn q_min(a: &Q, b: &Q) -> Q {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn q_max(a: &Q, b: &Q) -> Q {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}
