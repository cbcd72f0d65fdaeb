//! Exact arithmetic in Q(ζ_p) on the power basis `1, ζ, ..., ζ^{p-2}`, and
//! the valuation extending `ord_p` (so `ord(ζ - 1) = 1/(p-1)`).

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::nt::{v_p, v_p_int, Q};
use crate::ring::Ring;

/// A valuation in `ord_p` units, or `+∞` for zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OrdValue {
    Finite(Q),
    Infinity,
}

impl OrdValue {
    pub fn finite(&self) -> Option<&Q> {
        match self {
            OrdValue::Finite(v) => Some(v),
            OrdValue::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, OrdValue::Infinity)
    }

    /// Rescales by `1/a`, turning `ord_p` into `ord_q` for `q = p^a`.
    pub fn scaled(&self, a: u32) -> OrdValue {
        match self {
            OrdValue::Finite(v) => OrdValue::Finite(v / Q::from_integer(BigInt::from(a))),
            OrdValue::Infinity => OrdValue::Infinity,
        }
    }

    pub fn add(&self, other: &OrdValue) -> OrdValue {
        match (self, other) {
            (OrdValue::Finite(a), OrdValue::Finite(b)) => OrdValue::Finite(a + b),
            _ => OrdValue::Infinity,
        }
    }
}

impl PartialOrd for OrdValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (OrdValue::Finite(a), OrdValue::Finite(b)) => a.cmp(b),
            (OrdValue::Finite(_), OrdValue::Infinity) => Ordering::Less,
            (OrdValue::Infinity, OrdValue::Finite(_)) => Ordering::Greater,
            (OrdValue::Infinity, OrdValue::Infinity) => Ordering::Equal,
        }
    }
}

impl fmt::Display for OrdValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrdValue::Finite(v) => write!(f, "{v}"),
            OrdValue::Infinity => f.write_str("inf"),
        }
    }
}

/// An element of Q(ζ_p): `Σ c_i ζ^i` for `0 <= i <= p-2`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycloElt {
    p: u64,
    coeffs: Vec<Q>,
}

impl fmt::Debug for CycloElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycloElt(p={}, {self})", self.p)
    }
}

impl fmt::Display for CycloElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{i}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Folds a coefficient vector indexed by exponents mod p into the power
/// basis, using `ζ^{p-1} = -(1 + ζ + ... + ζ^{p-2})`.
fn fold_mod_phi<T>(mut acc: Vec<T>, p: usize) -> Vec<T>
where
    T: Clone + Zero + for<'a> core::ops::SubAssign<&'a T>,
{
    debug_assert_eq!(acc.len(), p);
    let top = acc.pop().unwrap();
    if !top.is_zero() {
        for c in acc.iter_mut() {
            *c -= &top;
        }
    }
    acc
}

fn cyclic_product<T>(a: &[T], b: &[T], p: usize) -> Vec<T>
where
    T: Clone + Zero + for<'a> core::ops::SubAssign<&'a T>,
    for<'a> &'a T: core::ops::Mul<&'a T, Output = T>,
{
    let mut acc = vec![T::zero(); p];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            let k = (i + j) % p;
            acc[k] = acc[k].clone() + x * y;
        }
    }
    fold_mod_phi(acc, p)
}

/// Image of a basis vector under ζ -> ζ^c.
fn galois_vec<T>(v: &[T], c: u64, p: usize) -> Vec<T>
where
    T: Clone + Zero + for<'a> core::ops::SubAssign<&'a T>,
{
    let mut acc = vec![T::zero(); p];
    for (i, x) in v.iter().enumerate() {
        if !x.is_zero() {
            acc[(i as u64 * c % p as u64) as usize] = x.clone();
        }
    }
    fold_mod_phi(acc, p)
}

impl CycloElt {
    fn check_prime(p: u64) -> Result<()> {
        if crate::nt::is_prime(p) {
            Ok(())
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn zero(p: u64) -> CycloElt {
        CycloElt {
            p,
            coeffs: vec![Q::zero(); (p - 1) as usize],
        }
    }

    pub fn one(p: u64) -> CycloElt {
        CycloElt::from_rational(p, Q::one())
    }

    pub fn from_rational(p: u64, r: Q) -> CycloElt {
        let mut z = CycloElt::zero(p);
        z.coeffs[0] = r;
        z
    }

    pub fn from_int(p: u64, n: i64) -> CycloElt {
        CycloElt::from_rational(p, Q::from_integer(BigInt::from(n)))
    }

    /// `ζ^e` for any integer exponent.
    pub fn zeta_pow(p: u64, e: i64) -> CycloElt {
        let mut acc = vec![Q::zero(); p as usize];
        acc[e.rem_euclid(p as i64) as usize] = Q::one();
        CycloElt {
            p,
            coeffs: fold_mod_phi(acc, p as usize),
        }
    }

    pub fn zeta(p: u64) -> CycloElt {
        CycloElt::zeta_pow(p, 1)
    }

    /// `ζ - 1`, the uniformizer.
    pub fn pi(p: u64) -> CycloElt {
        CycloElt::zeta(p).sub(&CycloElt::one(p))
    }

    pub fn from_coeffs(p: u64, coeffs: Vec<Q>) -> Result<CycloElt> {
        Self::check_prime(p)?;
        if coeffs.len() as u64 != p - 1 {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{} coefficients for Q(zeta_{p})",
                coeffs.len()
            )));
        }
        Ok(CycloElt { p, coeffs })
    }

    /// `Σ_t counts[t] ζ^t` where `counts` is indexed by residues mod p.
    pub fn from_power_sums(p: u64, counts: &[BigInt]) -> CycloElt {
        debug_assert_eq!(counts.len() as u64, p);
        let acc: Vec<Q> = counts.iter().map(|c| Q::from_integer(c.clone())).collect();
        CycloElt {
            p,
            coeffs: fold_mod_phi(acc, p as usize),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// As a rational number, if the element lies in Q.
    pub fn as_rational(&self) -> Option<&Q> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    /// Membership in Z[ζ_p], which is exactly integrality of the power-basis
    /// coefficients.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(Q::is_integer)
    }

    pub fn integer_coeffs(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }

    fn same_prime(&self, other: &CycloElt) -> Result<()> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(Error::MismatchedPrime(self.p, other.p))
        }
    }

    pub fn checked_add(&self, other: &CycloElt) -> Result<CycloElt> {
        self.same_prime(other)?;
        Ok(self.add(other))
    }

    pub fn checked_sub(&self, other: &CycloElt) -> Result<CycloElt> {
        self.same_prime(other)?;
        Ok(self.sub(other))
    }

    pub fn checked_mul(&self, other: &CycloElt) -> Result<CycloElt> {
        self.same_prime(other)?;
        Ok(self.mul(other))
    }

    /// Panics if the primes differ; see [`CycloElt::checked_add`].
    pub fn add(&self, other: &CycloElt) -> CycloElt {
        assert_eq!(self.p, other.p, "mismatched primes");
        CycloElt {
            p: self.p,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &CycloElt) -> CycloElt {
        assert_eq!(self.p, other.p, "mismatched primes");
        CycloElt {
            p: self.p,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn mul(&self, other: &CycloElt) -> CycloElt {
        assert_eq!(self.p, other.p, "mismatched primes");
        CycloElt {
            p: self.p,
            coeffs: cyclic_product(&self.coeffs, &other.coeffs, self.p as usize),
        }
    }

    pub fn neg(&self) -> CycloElt {
        CycloElt {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, r: &Q) -> CycloElt {
        CycloElt {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    pub fn pow(&self, e: u64) -> CycloElt {
        CycloField::new_unchecked(self.p).pow(self, e)
    }

    /// The automorphism ζ -> ζ^c, for c prime to p.
    pub fn galois(&self, c: u64) -> CycloElt {
        assert!(c % self.p != 0, "not an automorphism");
        CycloElt {
            p: self.p,
            coeffs: galois_vec(&self.coeffs, c % self.p, self.p as usize),
        }
    }

    /// Exact inverse, via the product of the other conjugates over the norm.
    pub fn inverse(&self) -> Option<CycloElt> {
        if self.is_zero() {
            return None;
        }
        let mut acc = CycloElt::one(self.p);
        for c in 2..self.p {
            acc = acc.mul(&self.galois(c));
        }
        let n = self.norm();
        Some(acc.scale(&(Q::one() / n)))
    }

    /// `N_{Q(ζ_p)/Q}(x)`, computed exactly on the cleared-denominator
    /// integer vector.
    pub fn norm(&self) -> Q {
        let den = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Q::from_integer(den.clone())).to_integer())
            .collect();
        let p = self.p as usize;
        let mut acc = ints.clone();
        for c in 2..self.p {
            acc = cyclic_product(&acc, &galois_vec(&ints, c, p), p);
        }
        debug_assert!(acc[1..].iter().all(Zero::is_zero));
        let den_power = num_traits::pow(den, p - 1);
        Q::new(acc[0].clone(), den_power)
    }

    /// `ord_p(x) = v_p(N(x))/(p-1)`; the extension is totally ramified.
    pub fn valuation(&self) -> OrdValue {
        if self.is_zero() {
            return OrdValue::Infinity;
        }
        let v = v_p(&self.norm(), self.p).expect("nonzero norm");
        OrdValue::Finite(Q::new(BigInt::from(v), BigInt::from(self.p - 1)))
    }
}

/// `x` as a rational number's denominator-free valuation helper: the largest
/// power of π dividing an element of Z[ζ_p], found by repeated exact division.
/// Used as an independent check of [`CycloElt::valuation`].
pub fn pi_adic_order_by_division(x: &CycloElt) -> OrdValue {
    if x.is_zero() {
        return OrdValue::Infinity;
    }
    let p = x.p;
    let den = x.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut y: Vec<BigInt> = x
        .coeffs
        .iter()
        .map(|c| (c * Q::from_integer(den.clone())).to_integer())
        .collect();
    let pb = BigInt::from(p);
    let mut count: i64 = 0;
    loop {
        // y is divisible by π = ζ - 1 iff the sum of its coefficients is 0 mod p.
        let s: BigInt = y.iter().sum();
        if !s.mod_floor(&pb).is_zero() {
            break;
        }
        // Solve y = (ζ - 1) z in the power basis. Writing y(x) = (x - 1) z(x)
        // + r with the remainder absorbed by Φ_p: synthetic division of
        // y(x) + t Φ_p(x) by (x - 1) with t chosen so the remainder vanishes.
        let n = y.len();
        let t = -&s / &pb;
        let mut poly: Vec<BigInt> = y.iter().map(|c| c + &t).collect();
        poly.push(t.clone());
        // poly has degree n = p-1; divide by (x - 1).
        let mut z = vec![BigInt::zero(); n];
        let mut carry = BigInt::zero();
        for i in (1..=n).rev() {
            carry += &poly[i];
            z[i - 1] = carry.clone();
        }
        debug_assert!((carry + &poly[0]).is_zero());
        // z has degree n-1 = p-2, already in the basis.
        y = z;
        count += 1;
    }
    let vden = v_p_int(&den, p).unwrap_or(0) as i64;
    OrdValue::Finite(Q::new(BigInt::from(count), BigInt::from(p - 1)) - Q::from_integer(BigInt::from(vden)))
}

/// Q(ζ_p) as a [`Ring`] for generic matrix algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycloField {
    p: u64,
}

impl CycloField {
    pub fn new(p: u64) -> Result<CycloField> {
        CycloElt::check_prime(p)?;
        Ok(CycloField { p })
    }

    fn new_unchecked(p: u64) -> CycloField {
        CycloField { p }
    }

    pub fn p(&self) -> u64 {
        self.p
    }
}

impl Ring for CycloField {
    type Elt = CycloElt;

    fn zero(&self) -> CycloElt {
        CycloElt::zero(self.p)
    }
    fn one(&self) -> CycloElt {
        CycloElt::one(self.p)
    }
    fn add(&self, a: &CycloElt, b: &CycloElt) -> CycloElt {
        a.add(b)
    }
    fn sub(&self, a: &CycloElt, b: &CycloElt) -> CycloElt {
        a.sub(b)
    }
    fn mul(&self, a: &CycloElt, b: &CycloElt) -> CycloElt {
        a.mul(b)
    }
    fn neg(&self, a: &CycloElt) -> CycloElt {
        a.neg()
    }
    fn is_zero(&self, a: &CycloElt) -> bool {
        a.is_zero()
    }
    fn from_int(&self, n: &BigInt) -> CycloElt {
        CycloElt::from_rational(self.p, Q::from_integer(n.clone()))
    }
}
