//! Exponential sums, L-functions, Artin–Schreier point counts and zeta
//! numerators, all by exhaustive enumeration with exact arithmetic.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{CycloElt, OrdValue};
use crate::error::{ensure, Error, Result};
use crate::ff::{make_field, Budget, FieldElt, FiniteField};
use crate::nt::{v_p_int, Q};
use crate::polygon::{lower_hull, Polygon};
use crate::ratfun::ReducedFunction;

#[derive(Clone, Copy)]
enum Coef {
    Const(u32),
    Full(FieldElt),
}

/// `f` specialised for repeated evaluation over one field.
struct Evaluator {
    field: FiniteField,
    poly: Vec<Coef>,
    poles: Vec<(FieldElt, Vec<Coef>)>,
}

impl Evaluator {
    fn new(f: &ReducedFunction) -> Evaluator {
        let coef = |c: &FieldElt| {
            if c.is_constant() {
                Coef::Const(c.coeff(0))
            } else {
                Coef::Full(*c)
            }
        };
        let poly = f.coeffs()[0].iter().map(coef).collect();
        let poles = f
            .poles()
            .iter()
            .zip(f.coeffs())
            .skip(1)
            .filter_map(|(pole, row)| pole.map(|pj| (pj, row.iter().map(coef).collect())))
            .collect();
        Evaluator {
            field: f.field().clone(),
            poly,
            poles,
        }
    }

    #[inline]
    fn horner(&self, coeffs: &[Coef], y: &FieldElt) -> FieldElt {
        let fld = &self.field;
        let mut acc = FieldElt::ZERO;
        for c in coeffs.iter().rev() {
            acc = match c {
                Coef::Const(0) => acc,
                Coef::Const(k) => fld.add(&acc, &fld.constant(*k as u64)),
                Coef::Full(e) => fld.add(&acc, e),
            };
            acc = fld.mul(&acc, y);
        }
        acc
    }

    /// `None` at a finite pole.
    #[inline]
    fn eval(&self, x: &FieldElt) -> Option<FieldElt> {
        let fld = &self.field;
        let mut total = self.horner(&self.poly, x);
        for (pj, row) in &self.poles {
            let y = fld.inv(&fld.sub(x, pj))?;
            total = fld.add(&total, &self.horner(row, &y));
        }
        Some(total)
    }
}

/// `counts[t] = #{x ∈ F_{q^k} non-pole : Tr(f(x)) = t}`.
pub fn trace_histogram(f: &ReducedFunction, k: usize, budget: &Budget) -> Result<Vec<u64>> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let p = f.p();
    let ext = make_field(p, f.field().degree() * k)?;
    budget.check(ext.order())?;
    let g = if k == 1 { f.clone() } else { f.pushforward(&ext)? };
    let ev = Evaluator::new(&g);
    let mut counts = vec![0u64; p as usize];
    for x in ext.enumerate(budget)? {
        if let Some(v) = ev.eval(&x) {
            counts[ext.trace(&v) as usize] += 1;
        }
    }
    Ok(counts)
}

/// `S_k = Σ_x ζ^{Tr f(x)}` over the non-pole points of `F_{q^k}`.
pub fn exp_sum(f: &ReducedFunction, k: usize, budget: &Budget) -> Result<CycloElt> {
    let counts = trace_histogram(f, k, budget)?;
    let counts: Vec<BigInt> = counts.into_iter().map(BigInt::from).collect();
    Ok(CycloElt::from_power_sums(f.p(), &counts))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LPolynomial {
    p: u64,
    a: usize,
    coeffs: Vec<CycloElt>,
}

impl LPolynomial {
    pub fn new(p: u64, a: usize, coeffs: Vec<CycloElt>) -> Result<LPolynomial> {
        if coeffs.first().map_or(true, |c| c != &CycloElt::one(p)) {
            return Err(Error::InvalidParameter("L-polynomial must start with 1".into()));
        }
        Ok(LPolynomial { p, a, coeffs })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[CycloElt] {
        &self.coeffs
    }

    pub fn coeff(&self, m: usize) -> CycloElt {
        self.coeffs.get(m).cloned().unwrap_or_else(|| CycloElt::zero(self.p))
    }

    /// `ord_q` of every coefficient.
    pub fn valuations(&self) -> Vec<OrdValue> {
        self.coeffs.iter().map(|c| c.valuation().scaled(self.a as u32)).collect()
    }
}

/// Power-series exponential of `Σ s_k T^k / k`, up to `T^n`, through
/// Newton's identity `m c_m = Σ_{k=1}^m s_k c_{m-k}`.
fn exp_of_power_sums<T, F>(sums: &[T], n: usize, one: T, combine: F) -> Vec<T>
where
    T: Clone,
    F: Fn(&[T], &[T], usize) -> T,
{
    let mut c = vec![one];
    for m in 1..=n {
        let next = combine(&sums[..m], &c, m);
        c.push(next);
    }
    c
}

/// The degree-d L-function from `S_1, ..., S_{d+1}`.
pub fn l_function(f: &ReducedFunction, budget: &Budget) -> Result<LPolynomial> {
    let p = f.p();
    let d = f.degree();
    let sums: Vec<CycloElt> = (1..=d + 1)
        .map(|k| exp_sum(f, k, budget))
        .collect::<Result<_>>()?;
    l_function_from_sums(p, f.a(), d, &sums)
}

/// Newton's identities over Q(ζ_p); checks integrality and the degree.
pub fn l_function_from_sums(p: u64, a: usize, d: usize, sums: &[CycloElt]) -> Result<LPolynomial> {
    ensure!(sums.len() > d, "need S_1..S_{} for degree {d}", d + 1);
    let c = exp_of_power_sums(sums, d + 1, CycloElt::one(p), |s, c, m| {
        let mut acc = CycloElt::zero(p);
        for k in 1..=m {
            acc = acc.add(&s[k - 1].mul(&c[m - k]));
        }
        acc.scale(&Q::new(BigInt::one(), BigInt::from(m)))
    });
    ensure!(c[d + 1].is_zero(), "coefficient of T^{} is {} (expected 0)", d + 1, c[d + 1]);
    for (m, cm) in c.iter().enumerate().take(d + 1) {
        ensure!(cm.is_integral(), "coefficient {m} = {cm} is not integral");
    }
    let mut coeffs = c;
    coeffs.truncate(d + 1);
    LPolynomial::new(p, a, coeffs)
}

/// Lower hull of `(m, ord_q c_m)`.
pub fn np_of_l(l: &LPolynomial) -> Polygon {
    let pts: Vec<(Q, Option<Q>)> = l
        .valuations()
        .into_iter()
        .enumerate()
        .map(|(m, v)| (Q::from_integer(BigInt::from(m)), v.finite().cloned()))
        .collect();
    lower_hull(&pts).expect("c_0 = 1 is finite")
}

/// `#C_f(F_{q^k})` for the curve `y^p - y = f`: `p` points over each non-pole
/// x of trace 0 plus one point over each (totally ramified) pole.
pub fn count_points(f: &ReducedFunction, k: usize, budget: &Budget) -> Result<BigInt> {
    let counts = trace_histogram(f, k, budget)?;
    Ok(BigInt::from(f.p()) * BigInt::from(counts[0]) + BigInt::from(f.ell()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZetaNumerator {
    p: u64,
    a: usize,
    coeffs: Vec<BigInt>,
}

impl ZetaNumerator {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// `P(T)` from `Z(T) = P(T)/((1-T)(1-qT))`. With at least `2g` counts all of
/// them are used; with `g <= n < 2g` the top half comes from the functional
/// equation `a_{2g-i} = q^{g-i} a_i`.
pub fn zeta_numerator_from_counts(p: u64, a: usize, two_g: usize, counts: &[BigInt]) -> Result<ZetaNumerator> {
    ensure!(two_g % 2 == 0, "odd degree {two_g}");
    let g = two_g / 2;
    ensure!(counts.len() >= g, "need at least {g} point counts");
    let q = num_traits::pow(BigInt::from(p), a);
    let n = counts.len().min(two_g);
    let mut qk = BigInt::one();
    let sums: Vec<Q> = counts[..n]
        .iter()
        .map(|nk| {
            qk *= &q;
            Q::from_integer(nk - BigInt::one() - &qk)
        })
        .collect();
    let c = exp_of_power_sums(&sums, n, Q::one(), |s, c, m| {
        let mut acc = Q::zero();
        for k in 1..=m {
            acc += &s[k - 1] * &c[m - k];
        }
        acc / Q::from_integer(BigInt::from(m))
    });
    let mut coeffs = Vec::with_capacity(two_g + 1);
    for (i, ci) in c.iter().enumerate() {
        ensure!(ci.is_integer(), "zeta coefficient {i} = {ci} is not an integer");
        coeffs.push(ci.to_integer());
    }
    if n < two_g {
        for i in n + 1..=two_g {
            let j = two_g - i;
            coeffs.push(num_traits::pow(q.clone(), g - j) * &coeffs[j]);
        }
    } else {
        for i in 0..=g {
            ensure!(
                coeffs[two_g - i] == num_traits::pow(q.clone(), g - i) * &coeffs[i],
                "functional equation fails at degree {i}"
            );
        }
    }
    Ok(ZetaNumerator { p, a, coeffs })
}

/// Twice the genus: `(p - 1) d`.
pub fn zeta_degree(f: &ReducedFunction) -> usize {
    (f.p() as usize - 1) * f.degree()
}

/// Point counts `N_1..N_n`.
pub fn point_counts(f: &ReducedFunction, n: usize, budget: &Budget) -> Result<Vec<BigInt>> {
    (1..=n).map(|k| count_points(f, k, budget)).collect()
}

/// The zeta numerator from `N_1, ..., N_g` and the functional equation.
pub fn zeta_numerator(f: &ReducedFunction, budget: &Budget) -> Result<ZetaNumerator> {
    let two_g = zeta_degree(f);
    let counts = point_counts(f, two_g / 2, budget)?;
    zeta_numerator_from_counts(f.p(), f.a(), two_g, &counts)
}

/// NP of `P` in `ord_q`, shrunk by `1/(p-1)` on both axes.
pub fn scaled_np(z: &ZetaNumerator) -> Polygon {
    let pts: Vec<(Q, Option<Q>)> = z
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let h = v_p_int(c, z.p).map(|v| Q::new(BigInt::from(v), BigInt::from(z.a)));
            (Q::from_integer(BigInt::from(i)), h)
        })
        .collect();
    lower_hull(&pts)
        .expect("P(0) = 1")
        .scaled(&Q::new(BigInt::one(), BigInt::from(z.p - 1)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistCheck {
    pub numerator: ZetaNumerator,
    /// `∏_c L(c·f, T)`, coefficients in Q(ζ_p).
    pub product: Vec<CycloElt>,
    pub holds: bool,
}

/// Compares the zeta numerator with `∏_{c ∈ F_p^×} L(c·f, T)`.
pub fn character_twist_product(f: &ReducedFunction, budget: &Budget) -> Result<TwistCheck> {
    let p = f.p();
    let mut product = vec![CycloElt::one(p)];
    for c in 1..p {
        let l = l_function(&f.scaled(c), budget)?;
        let mut next = vec![CycloElt::zero(p); product.len() + l.degree()];
        for (i, x) in product.iter().enumerate() {
            for (j, y) in l.coeffs().iter().enumerate() {
                next[i + j] = next[i + j].add(&x.mul(y));
            }
        }
        product = next;
    }
    let numerator = zeta_numerator(f, budget)?;
    let holds = product.len() == numerator.coeffs.len()
        && product.iter().zip(&numerator.coeffs).all(|(x, n)| {
            x.as_rational()
                .map_or(false, |r| r.is_integer() && &r.to_integer() == n)
        });
    Ok(TwistCheck {
        numerator,
        product,
        holds,
    })
}

/// Renders the coefficients of an L-polynomial as integer vectors in the
/// power basis. Fails only if a coefficient overflows `i64`.
pub fn integer_table(l: &LPolynomial) -> Result<Vec<Vec<i64>>> {
    l.coeffs()
        .iter()
        .map(|c| {
            c.integer_coeffs()
                .ok_or_else(|| Error::Assertion(format!("non-integral coefficient {c}")))?
                .iter()
                .map(|x| x.to_i64().ok_or_else(|| Error::Assertion("coefficient overflow".into())))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nt::{q, qi};
    use crate::polygon::{hodge_polygon, lies_above};
    use crate::ratfun::{reduce_mod_p, RationalFunction};

    fn reduced(table: &[&[i64]], p: u64) -> ReducedFunction {
        reduce_mod_p(&RationalFunction::from_int_table(table).unwrap(), p, 1).unwrap()
    }

    fn cyc(p: u64, c: &[i64]) -> CycloElt {
        CycloElt::from_coeffs(p, c.iter().map(|&x| qi(x)).collect()).unwrap()
    }

    /// Oracle for S_k: the character sum written out term by term.
    fn exp_sum_oracle(f: &ReducedFunction, k: usize) -> CycloElt {
        let p = f.p();
        let ext = make_field(p, f.a() * k).unwrap();
        let g = f.pushforward(&ext).unwrap();
        let mut total = CycloElt::zero(p);
        for x in ext.enumerate(&Budget::default()).unwrap() {
            if let Ok(v) = g.evaluate(&x) {
                total = total.add(&CycloElt::zeta_pow(p, ext.trace_by_conjugates(&v) as i64));
            }
        }
        total
    }

    #[test]
    fn exp_sum_examples() {
        let b = Budget::default();
        let sq = reduced(&[&[0, 1]], 3);
        assert_eq!(exp_sum(&sq, 1, &b).unwrap(), cyc(3, &[1, 2]));
        let inv = reduced(&[&[1], &[1]], 3);
        assert_eq!(exp_sum(&inv, 1, &b).unwrap(), CycloElt::from_int(3, -1));
        let fld = make_field(3, 1).unwrap();
        let lin = ReducedFunction::from_parts(fld.clone(), vec![None], vec![vec![fld.one()]]).unwrap();
        assert_eq!(exp_sum(&lin, 1, &b).unwrap(), CycloElt::zero(3));
        for k in 1..=3 {
            assert_eq!(exp_sum(&inv, k, &b).unwrap(), exp_sum_oracle(&inv, k));
        }
        assert!(matches!(exp_sum(&sq, 3, &Budget::new(10)), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn l_function_examples() {
        let b = Budget::default();
        let l = l_function(&reduced(&[&[0, 1]], 3), &b).unwrap();
        assert_eq!(l.coeffs(), [CycloElt::one(3), cyc(3, &[1, 2])]);
        let np = np_of_l(&l);
        assert_eq!(np.vertices(), [(qi(0), qi(0)), (qi(1), q(1, 2))]);
        assert_eq!(np, hodge_polygon(1, &[2]).unwrap());

        let inv = reduced(&[&[1], &[1]], 3);
        let l = l_function(&inv, &b).unwrap();
        assert_eq!(l.degree(), 2);
        assert_eq!(l.coeff(1), CycloElt::from_int(3, -1));
        // c_2 = (S_1^2 + S_2)/2 from the oracle sums
        let s1 = exp_sum_oracle(&inv, 1);
        let s2 = exp_sum_oracle(&inv, 2);
        assert_eq!(l.coeff(2), s1.mul(&s1).add(&s2).scale(&q(1, 2)));
    }

    #[test]
    fn residue_degree_two_halves_heights() {
        let b = Budget::default();
        let f = RationalFunction::from_int_table(&[&[0, 1]]).unwrap();
        let l1 = l_function(&reduce_mod_p(&f, 3, 1).unwrap(), &b).unwrap();
        let l2 = l_function(&reduce_mod_p(&f, 3, 2).unwrap(), &b).unwrap();
        assert_eq!(np_of_l(&l1), np_of_l(&l2));
        // the ord_p height doubles, the ord_q height does not move
        assert_eq!(l2.coeff(1).valuation(), OrdValue::Finite(qi(1)));
        assert_eq!(l2.valuations()[1], OrdValue::Finite(q(1, 2)));
    }

    #[test]
    fn point_count_examples() {
        let b = Budget::default();
        let sq = reduced(&[&[0, 1]], 3);
        assert_eq!(count_points(&sq, 1, &b).unwrap(), BigInt::from(4));
        assert_eq!(count_points(&sq, 2, &b).unwrap(), BigInt::from(16));
        let z = zeta_numerator(&sq, &b).unwrap();
        assert_eq!(z.coeffs(), [BigInt::from(1), BigInt::from(0), BigInt::from(3)]);
        assert_eq!(scaled_np(&z), hodge_polygon(1, &[2]).unwrap());
    }

    /// Brute-force count of affine solutions of y^p - y = f(x) plus pole places.
    fn brute_count(f: &ReducedFunction, k: usize) -> BigInt {
        let p = f.p();
        let ext = make_field(p, f.a() * k).unwrap();
        let g = f.pushforward(&ext).unwrap();
        let mut n = 0u64;
        let elems: Vec<FieldElt> = ext.enumerate(&Budget::default()).unwrap().collect();
        for x in &elems {
            if let Ok(v) = g.evaluate(x) {
                n += elems
                    .iter()
                    .filter(|y| ext.sub(&ext.pow(y, p as u128), y) == v)
                    .count() as u64;
            }
        }
        BigInt::from(n + f.ell() as u64)
    }

    #[test]
    fn counts_against_brute_force() {
        let b = Budget::default();
        let f = reduced(&[&[1], &[2]], 3);
        for k in 1..=3 {
            assert_eq!(count_points(&f, k, &b).unwrap(), brute_count(&f, k));
        }
    }

    #[test]
    fn functional_equation_matches_full_counts() {
        let b = Budget::default();
        for (table, p) in [(&[&[1i64, 0, 1][..]][..], 5u64), (&[&[1i64][..], &[1][..]][..], 3), (&[&[0i64, 1][..]][..], 5)] {
            let f = reduced(table, p);
            let two_g = zeta_degree(&f);
            let half = zeta_numerator(&f, &b).unwrap();
            let full = zeta_numerator_from_counts(p, 1, two_g, &point_counts(&f, two_g, &b).unwrap()).unwrap();
            assert_eq!(half, full);
            assert_eq!(half.degree(), two_g);
        }
    }

    #[test]
    fn twist_products() {
        let b = Budget::default();
        for (table, p) in [(&[&[0i64, 1][..]][..], 3u64), (&[&[1i64, 0, 1][..]][..], 5), (&[&[1i64, 0, 1][..]][..], 2)] {
            let check = character_twist_product(&reduced(table, p), &b).unwrap();
            assert!(check.holds, "p = {p}");
        }
    }

    #[test]
    fn polygons_of_small_cases() {
        let b = Budget::default();
        for (table, p) in [(&[&[1i64, 0, 1][..]][..], 5u64), (&[&[2i64, 1][..], &[1, 3][..]][..], 7), (&[&[1i64, 1, 0, 1][..]][..], 5)] {
            let f = RationalFunction::from_int_table(table).unwrap();
            let l = l_function(&reduce_mod_p(&f, p, 1).unwrap(), &b).unwrap();
            let np = np_of_l(&l);
            let d = f.degree() as i64;
            assert_eq!(np.start(), &(qi(0), qi(0)));
            assert_eq!(np.end(), &(qi(d), q(d, 2)));
            assert!(lies_above(&np, &hodge_polygon(f.ell(), f.orders()).unwrap()).unwrap());
            assert_eq!(np.slopes().reflected(), np.slopes());
        }
    }
}
