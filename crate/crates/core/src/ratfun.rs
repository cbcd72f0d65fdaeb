//! Rational functions in partial-fraction form
//! `f = Σ_i a_{1,i} x^i + Σ_{j>=2} Σ_i a_{j,i} (x - P_j)^{-i}` with the first
//! pole at infinity, and their reductions modulo good primes.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ff::{embedding, make_field, FieldElt, FiniteField};
use crate::nt::{is_p_integral, lcm, reduce_rational, v_p, Q};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Pole {
    Infinity,
    Finite(Q),
}

impl fmt::Display for Pole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pole::Infinity => f.write_str("inf"),
            Pole::Finite(q) => write!(f, "{q}"),
        }
    }
}

/// Raw, unvalidated description of a rational function.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FunctionSpec {
    pub ell: usize,
    pub orders: Vec<usize>,
    /// `None` selects the default placement `∞, 0, 1, 2, ...`.
    pub poles: Option<Vec<Pole>>,
    /// Entries `(j, i, a_{j,i})`, 1-based; `i = 0` denotes a constant term.
    pub coeffs: Vec<(usize, usize, Q)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoPoles,
    OrdersLength { expected: usize, found: usize },
    PolesLength { expected: usize, found: usize },
    ZeroOrder { j: usize },
    FirstPoleNotInfinity,
    InfinityRepeated { j: usize },
    DuplicatePoles { j: usize, k: usize },
    CoefficientOutOfRange { j: usize, i: usize },
    RepeatedCoefficient { j: usize, i: usize },
    ZeroLeadingCoefficient { j: usize },
    DegreeTooSmall { d: usize },
    NonzeroConstantTerm,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoPoles => f.write_str("at least one pole is required"),
            Violation::OrdersLength { expected, found } => {
                write!(f, "expected {expected} pole orders, found {found}")
            }
            Violation::PolesLength { expected, found } => {
                write!(f, "expected {expected} poles, found {found}")
            }
            Violation::ZeroOrder { j } => write!(f, "pole {j} has order 0"),
            Violation::FirstPoleNotInfinity => f.write_str("the first pole must be infinity"),
            Violation::InfinityRepeated { j } => write!(f, "pole {j} is infinity again"),
            Violation::DuplicatePoles { j, k } => write!(f, "poles {j} and {k} coincide"),
            Violation::CoefficientOutOfRange { j, i } => {
                write!(f, "coefficient a_{{{j},{i}}} is outside the pole orders")
            }
            Violation::RepeatedCoefficient { j, i } => {
                write!(f, "coefficient a_{{{j},{i}}} given twice")
            }
            Violation::ZeroLeadingCoefficient { j } => {
                write!(f, "leading coefficient of pole {j} is zero")
            }
            Violation::DegreeTooSmall { d } => {
                write!(f, "a polynomial needs degree at least 2, got {d}")
            }
            Violation::NonzeroConstantTerm => f.write_str("constant term must vanish"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BadPrimeReason {
    NotPrime,
    DividesOrder { j: usize, order: usize },
    NonIntegralCoefficient { j: usize, i: usize },
    LeadingNotUnit { j: usize },
    NonIntegralPole { j: usize },
    PolesCollide { j: usize, k: usize },
}

impl fmt::Display for BadPrimeReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BadPrimeReason::NotPrime => f.write_str("not a prime"),
            BadPrimeReason::DividesOrder { j, order } => {
                write!(f, "p divides the order d_{j} = {order}")
            }
            BadPrimeReason::NonIntegralCoefficient { j, i } => {
                write!(f, "a_{{{j},{i}}} is not p-integral")
            }
            BadPrimeReason::LeadingNotUnit { j } => {
                write!(f, "leading coefficient of pole {j} is not a p-unit")
            }
            BadPrimeReason::NonIntegralPole { j } => write!(f, "pole {j} is not p-integral"),
            BadPrimeReason::PolesCollide { j, k } => {
                write!(f, "poles {j} and {k} collide mod p")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    orders: Vec<usize>,
    poles: Vec<Pole>,
    /// `coeffs[j-1][i-1] = a_{j,i}`.
    coeffs: Vec<Vec<Q>>,
}

pub fn default_poles(ell: usize) -> Vec<Pole> {
    (0..ell)
        .map(|j| {
            if j == 0 {
                Pole::Infinity
            } else {
                Pole::Finite(Q::from_integer(BigInt::from(j as i64 - 1)))
            }
        })
        .collect()
}

/// Checks the invariants and builds the function, or lists every violation.
pub fn validate(spec: &FunctionSpec) -> core::result::Result<RationalFunction, Vec<Violation>> {
    let mut v = Vec::new();
    let ell = spec.ell;
    if ell == 0 {
        return Err(vec![Violation::NoPoles]);
    }
    if spec.orders.len() != ell {
        v.push(Violation::OrdersLength {
            expected: ell,
            found: spec.orders.len(),
        });
    }
    let poles = spec.poles.clone().unwrap_or_else(|| default_poles(ell));
    if poles.len() != ell {
        v.push(Violation::PolesLength {
            expected: ell,
            found: poles.len(),
        });
    }
    if !v.is_empty() {
        return Err(v);
    }
    for (j, &d) in spec.orders.iter().enumerate() {
        if d == 0 {
            v.push(Violation::ZeroOrder { j: j + 1 });
        }
    }
    if poles[0] != Pole::Infinity {
        v.push(Violation::FirstPoleNotInfinity);
    }
    for j in 1..ell {
        if poles[j] == Pole::Infinity {
            v.push(Violation::InfinityRepeated { j: j + 1 });
        }
        for k in 0..j {
            if poles[k] == poles[j] && poles[j] != Pole::Infinity {
                v.push(Violation::DuplicatePoles { j: k + 1, k: j + 1 });
            }
        }
    }
    let mut coeffs: Vec<Vec<Option<Q>>> = spec.orders.iter().map(|&d| vec![None; d]).collect();
    for (j, i, a) in &spec.coeffs {
        let (j, i) = (*j, *i);
        if i == 0 {
            if !a.is_zero() {
                v.push(Violation::NonzeroConstantTerm);
            }
            continue;
        }
        if j == 0 || j > ell || i > spec.orders[j - 1] {
            v.push(Violation::CoefficientOutOfRange { j, i });
            continue;
        }
        let slot = &mut coeffs[j - 1][i - 1];
        if slot.is_some() {
            v.push(Violation::RepeatedCoefficient { j, i });
        }
        *slot = Some(a.clone());
    }
    let coeffs: Vec<Vec<Q>> = coeffs
        .into_iter()
        .map(|row| row.into_iter().map(|c| c.unwrap_or_else(Q::zero)).collect())
        .collect();
    for (j, row) in coeffs.iter().enumerate() {
        if row.last().map_or(true, Zero::is_zero) {
            v.push(Violation::ZeroLeadingCoefficient { j: j + 1 });
        }
    }
    // A polynomial of degree 1 has a trivial L-function; degree 2 (d = 1) is
    // allowed even though the general theory assumes d >= 2 when ℓ = 1.
    if ell == 1 && spec.orders[0] < 2 {
        v.push(Violation::DegreeTooSmall { d: spec.orders[0] });
    }
    if v.is_empty() {
        Ok(RationalFunction {
            orders: spec.orders.clone(),
            poles,
            coeffs,
        })
    } else {
        Err(v)
    }
}

impl RationalFunction {
    /// Builds from a coefficient table `table[j-1][i-1] = a_{j,i}`.
    pub fn from_table(poles: Option<Vec<Pole>>, table: Vec<Vec<Q>>) -> Result<RationalFunction> {
        let mut spec = FunctionSpec {
            ell: table.len(),
            orders: table.iter().map(Vec::len).collect(),
            poles,
            coeffs: Vec::new(),
        };
        for (j, row) in table.iter().enumerate() {
            for (i, a) in row.iter().enumerate() {
                if !a.is_zero() {
                    spec.coeffs.push((j + 1, i + 1, a.clone()));
                }
            }
        }
        validate(&spec).map_err(Error::InvalidFunction)
    }

    /// Integer coefficient table with the default pole placement.
    pub fn from_int_table(table: &[&[i64]]) -> Result<RationalFunction> {
        let t = table
            .iter()
            .map(|row| row.iter().map(|&a| Q::from_integer(BigInt::from(a))).collect())
            .collect();
        RationalFunction::from_table(None, t)
    }

    pub fn to_spec(&self) -> FunctionSpec {
        let mut coeffs = Vec::new();
        for (j, row) in self.coeffs.iter().enumerate() {
            for (i, a) in row.iter().enumerate() {
                if !a.is_zero() {
                    coeffs.push((j + 1, i + 1, a.clone()));
                }
            }
        }
        FunctionSpec {
            ell: self.ell(),
            orders: self.orders.clone(),
            poles: Some(self.poles.clone()),
            coeffs,
        }
    }

    pub fn ell(&self) -> usize {
        self.orders.len()
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn poles(&self) -> &[Pole] {
        &self.poles
    }

    /// `a_{j,i}`, 1-based.
    pub fn coeff(&self, j: usize, i: usize) -> &Q {
        &self.coeffs[j - 1][i - 1]
    }

    pub fn table(&self) -> &[Vec<Q>] {
        &self.coeffs
    }

    /// `d = Σ d_j + ℓ - 2`, the degree of the L-function.
    pub fn degree(&self) -> usize {
        self.orders.iter().sum::<usize>() + self.ell() - 2
    }

    pub fn lcm_orders(&self) -> u64 {
        self.orders.iter().fold(1u64, |acc, &d| lcm(acc, d as u64))
    }

    /// Same coefficients, poles moved.
    pub fn with_poles(&self, poles: Vec<Pole>) -> Result<RationalFunction> {
        let mut spec = self.to_spec();
        spec.poles = Some(poles);
        validate(&spec).map_err(Error::InvalidFunction)
    }

    /// Exact value at a rational point.
    pub fn eval(&self, x: &Q) -> Result<Q> {
        let mut total = Q::zero();
        let mut power = Q::one();
        for a in &self.coeffs[0] {
            power *= x;
            total += a * &power;
        }
        for (pole, row) in self.poles.iter().zip(&self.coeffs).skip(1) {
            let Pole::Finite(pj) = pole else {
                continue;
            };
            let diff = x - pj;
            if diff.is_zero() {
                return Err(Error::PoleEvaluation);
            }
            let y = Q::one() / diff;
            let mut power = Q::one();
            for a in row {
                power *= &y;
                total += a * &power;
            }
        }
        Ok(total)
    }

    /// First failed good-reduction condition at `p`, if any.
    pub fn bad_prime_reason(&self, p: u64) -> Option<BadPrimeReason> {
        if !crate::nt::is_prime(p) {
            return Some(BadPrimeReason::NotPrime);
        }
        for (j, &d) in self.orders.iter().enumerate() {
            if d as u64 % p == 0 {
                return Some(BadPrimeReason::DividesOrder { j: j + 1, order: d });
            }
        }
        for (j, row) in self.coeffs.iter().enumerate() {
            for (i, a) in row.iter().enumerate() {
                if !is_p_integral(a, p) {
                    return Some(BadPrimeReason::NonIntegralCoefficient { j: j + 1, i: i + 1 });
                }
            }
            if v_p(row.last().unwrap(), p) != Some(0) {
                return Some(BadPrimeReason::LeadingNotUnit { j: j + 1 });
            }
        }
        let mut reduced: Vec<(usize, u64)> = Vec::new();
        for (j, pole) in self.poles.iter().enumerate() {
            if let Pole::Finite(pj) = pole {
                let Some(r) = reduce_rational(pj, p) else {
                    return Some(BadPrimeReason::NonIntegralPole { j: j + 1 });
                };
                if let Some(&(k, _)) = reduced.iter().find(|(_, s)| *s == r) {
                    return Some(BadPrimeReason::PolesCollide { j: k, k: j + 1 });
                }
                reduced.push((j + 1, r));
            }
        }
        None
    }

    pub fn is_good_prime(&self, p: u64) -> bool {
        self.bad_prime_reason(p).is_none()
    }

    pub fn describe(&self) -> String {
        use core::fmt::Write;
        let mut s = String::new();
        for (i, a) in self.coeffs[0].iter().enumerate() {
            if !a.is_zero() {
                let _ = write!(s, "{}({a})x^{}", if s.is_empty() { "" } else { " + " }, i + 1);
            }
        }
        for (pole, row) in self.poles.iter().zip(&self.coeffs).skip(1) {
            for (i, a) in row.iter().enumerate() {
                if !a.is_zero() {
                    let _ = write!(s, " + ({a})(x - {pole})^-{}", i + 1);
                }
            }
        }
        s
    }
}

/// `f mod p` over `F_{p^a}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedFunction {
    field: FiniteField,
    a: usize,
    orders: Vec<usize>,
    /// `None` marks the pole at infinity.
    poles: Vec<Option<FieldElt>>,
    coeffs: Vec<Vec<FieldElt>>,
}

pub fn reduce_mod_p(f: &RationalFunction, p: u64, a: usize) -> Result<ReducedFunction> {
    if let Some(reason) = f.bad_prime_reason(p) {
        return Err(if reason == BadPrimeReason::NotPrime {
            Error::NotPrime(p)
        } else {
            Error::BadPrime { p, reason }
        });
    }
    let field = make_field(p, a)?;
    let red = |x: &Q| field.constant(reduce_rational(x, p).expect("checked p-integral"));
    let poles = f
        .poles
        .iter()
        .map(|pole| match pole {
            Pole::Infinity => None,
            Pole::Finite(pj) => Some(red(pj)),
        })
        .collect();
    let coeffs = f.coeffs.iter().map(|row| row.iter().map(red).collect()).collect();
    Ok(ReducedFunction {
        a,
        field,
        orders: f.orders.clone(),
        poles,
        coeffs,
    })
}

impl ReducedFunction {
    /// Direct construction over `field`, bypassing the invariants of
    /// [`RationalFunction`]; used for sanity inputs such as `f = x`.
    pub fn from_parts(
        field: FiniteField,
        poles: Vec<Option<FieldElt>>,
        coeffs: Vec<Vec<FieldElt>>,
    ) -> Result<ReducedFunction> {
        if poles.len() != coeffs.len() || poles.first() != Some(&None) {
            return Err(Error::InvalidParameter("poles must start with infinity".into()));
        }
        Ok(ReducedFunction {
            a: field.degree(),
            orders: coeffs.iter().map(Vec::len).collect(),
            field,
            poles,
            coeffs,
        })
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    /// Degree of the base field over `F_p`.
    pub fn a(&self) -> usize {
        self.a
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn ell(&self) -> usize {
        self.orders.len()
    }

    pub fn degree(&self) -> usize {
        (self.orders.iter().sum::<usize>() + self.ell()).saturating_sub(2)
    }

    pub fn poles(&self) -> &[Option<FieldElt>] {
        &self.poles
    }

    pub fn coeffs(&self) -> &[Vec<FieldElt>] {
        &self.coeffs
    }

    pub fn evaluate(&self, x: &FieldElt) -> Result<FieldElt> {
        let fld = &self.field;
        let mut total = fld.zero();
        for a in self.coeffs[0].iter().rev() {
            total = fld.mul(&fld.add(&total, a), x);
        }
        for (pole, row) in self.poles.iter().zip(&self.coeffs).skip(1) {
            let Some(pj) = pole else { continue };
            let y = fld.inv(&fld.sub(x, pj)).ok_or(Error::PoleEvaluation)?;
            let mut acc = fld.zero();
            for a in row.iter().rev() {
                acc = fld.mul(&fld.add(&acc, a), &y);
            }
            total = fld.add(&total, &acc);
        }
        Ok(total)
    }

    /// The same function over an extension of the base field.
    pub fn pushforward(&self, target: &FiniteField) -> Result<ReducedFunction> {
        let emb = embedding(&self.field, target)?;
        Ok(ReducedFunction {
            field: target.clone(),
            a: self.a,
            orders: self.orders.clone(),
            poles: self.poles.iter().map(|p| p.map(|x| emb.apply(&x))).collect(),
            coeffs: self.coeffs.iter().map(|row| row.iter().map(|x| emb.apply(x)).collect()).collect(),
        })
    }

    /// The twist `c·f` for `c` in `F_p^×`.
    pub fn scaled(&self, c: u64) -> ReducedFunction {
        let c = (c % self.p()) as u32;
        let mut out = self.clone();
        for row in out.coeffs.iter_mut() {
            for a in row.iter_mut() {
                *a = self.field.scale(a, c);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nt::{q, qi};

    #[test]
    fn validation_examples() {
        let f = RationalFunction::from_int_table(&[&[1, 0, 1]]).unwrap();
        assert_eq!(f.degree(), 2);
        let g = RationalFunction::from_int_table(&[&[1], &[1]]).unwrap();
        assert_eq!(g.degree(), 2);
        let bad = RationalFunction::from_int_table(&[&[1, 0, 0]]);
        assert_eq!(
            bad,
            Err(Error::InvalidFunction(vec![Violation::ZeroLeadingCoefficient { j: 1 }]))
        );
        let spec = FunctionSpec {
            ell: 3,
            orders: vec![1, 1, 1],
            poles: Some(vec![Pole::Infinity, Pole::Finite(qi(0)), Pole::Finite(qi(0))]),
            coeffs: vec![(1, 1, qi(1)), (2, 1, qi(1)), (3, 1, qi(1)), (1, 0, qi(4))],
        };
        let errs = validate(&spec).unwrap_err();
        assert!(errs.contains(&Violation::DuplicatePoles { j: 2, k: 3 }));
        assert!(errs.contains(&Violation::NonzeroConstantTerm));
        let lin = RationalFunction::from_int_table(&[&[1]]);
        assert_eq!(lin, Err(Error::InvalidFunction(vec![Violation::DegreeTooSmall { d: 1 }])));
    }

    #[test]
    fn bad_primes() {
        let f = RationalFunction::from_int_table(&[&[1, 0, 1]]).unwrap();
        assert_eq!(
            reduce_mod_p(&f, 3, 1).unwrap_err(),
            Error::BadPrime {
                p: 3,
                reason: BadPrimeReason::DividesOrder { j: 1, order: 3 }
            }
        );
        assert!(reduce_mod_p(&f, 5, 1).is_ok());
        let g = f
            .with_poles(vec![Pole::Infinity])
            .unwrap();
        assert_eq!(g, f);
        let h = RationalFunction::from_table(
            Some(vec![Pole::Infinity, Pole::Finite(qi(0)), Pole::Finite(qi(5))]),
            vec![vec![qi(1)], vec![qi(1)], vec![qi(1)]],
        )
        .unwrap();
        assert_eq!(
            reduce_mod_p(&h, 5, 1).unwrap_err(),
            Error::BadPrime {
                p: 5,
                reason: BadPrimeReason::PolesCollide { j: 2, k: 3 }
            }
        );
        let half = RationalFunction::from_table(None, vec![vec![q(1, 2), qi(1)]]).unwrap();
        assert!(matches!(
            reduce_mod_p(&half, 2, 1),
            Err(Error::BadPrime { reason: BadPrimeReason::DividesOrder { .. }, .. })
        ));
        let third = RationalFunction::from_table(None, vec![vec![q(1, 3), qi(1)]]).unwrap();
        assert!(matches!(
            reduce_mod_p(&third, 3, 1),
            Err(Error::BadPrime { reason: BadPrimeReason::NonIntegralCoefficient { j: 1, i: 1 }, .. })
        ));
        assert_eq!(reduce_mod_p(&f, 4, 1).unwrap_err(), Error::NotPrime(4));
    }

    #[test]
    fn evaluation_examples() {
        let g = RationalFunction::from_int_table(&[&[1], &[1]]).unwrap();
        let gb = reduce_mod_p(&g, 3, 1).unwrap();
        let fld = gb.field().clone();
        assert_eq!(gb.evaluate(&fld.constant(2)).unwrap(), fld.constant(1));
        assert_eq!(gb.evaluate(&fld.zero()), Err(Error::PoleEvaluation));
        let sq = RationalFunction::from_int_table(&[&[0, 1]]).unwrap();
        let sqb = reduce_mod_p(&sq, 3, 1).unwrap();
        assert_eq!(sqb.evaluate(&fld.constant(2)).unwrap(), fld.constant(1));
    }

    #[test]
    fn reduction_commutes_with_evaluation() {
        let f = RationalFunction::from_table(
            Some(vec![Pole::Infinity, Pole::Finite(qi(0)), Pole::Finite(qi(3))]),
            vec![vec![qi(2), qi(-1), qi(1)], vec![q(1, 2), qi(3)], vec![qi(1)]],
        )
        .unwrap();
        let p = 7;
        let fb = reduce_mod_p(&f, p, 1).unwrap();
        let fld = fb.field().clone();
        for x in 0..p as i64 {
            let exact = f.eval(&qi(x));
            let reduced = fb.evaluate(&fld.constant(x as u64));
            match exact {
                Ok(v) => assert_eq!(reduced.unwrap(), fld.constant(reduce_rational(&v, p).unwrap())),
                Err(_) => assert_eq!(reduced, Err(Error::PoleEvaluation)),
            }
        }
    }

    #[test]
    fn evaluation_commutes_with_embedding() {
        let f = RationalFunction::from_int_table(&[&[1, 0, 2], &[1, 1]]).unwrap();
        let fb = reduce_mod_p(&f, 5, 1).unwrap();
        let big = make_field(5, 2).unwrap();
        let pushed = fb.pushforward(&big).unwrap();
        let emb = embedding(fb.field(), &big).unwrap();
        for x in 1..5 {
            let x = fb.field().constant(x);
            let lhs = emb.apply(&fb.evaluate(&x).unwrap());
            assert_eq!(lhs, pushed.evaluate(&emb.apply(&x)).unwrap());
        }
    }
}
