//! Weight-graded symbolic expansions of the Frobenius entries, with
//! valuation bounds, the residue matrix and permutation `σ₀`, and the
//! vertex data `(k_J, c_0, s_J)`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{ensure, Error, Result};
use crate::linalg::for_each_permutation;
use crate::nt::{binom, ceil_div, factorial, gcd, is_prime, q, qi, v_p, Q};
use crate::polygon::hodge_polygon;

/// The part of a scalar whose exact value is not tracked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Opaque {
    None,
    /// Known to have order exactly 0.
    Unit,
    /// Order at least the given value.
    AtLeast(Q),
}

/// `γ^{gamma_exp} · rational · opaque`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scalar {
    pub gamma_exp: Q,
    pub rational: Q,
    pub opaque: Opaque,
}

impl Scalar {
    pub fn one() -> Scalar {
        Scalar::rational(Q::one())
    }

    pub fn rational(r: Q) -> Scalar {
        Scalar {
            gamma_exp: Q::zero(),
            rational: r,
            opaque: Opaque::None,
        }
    }

    pub fn unit() -> Scalar {
        Scalar {
            opaque: Opaque::Unit,
            ..Scalar::one()
        }
    }

    pub fn at_least(v: Q) -> Scalar {
        Scalar {
            opaque: Opaque::AtLeast(v),
            ..Scalar::one()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero()
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        let opaque = match (&self.opaque, &other.opaque) {
            (Opaque::None, x) | (x, Opaque::None) => x.clone(),
            (Opaque::Unit, Opaque::Unit) => Opaque::Unit,
            (Opaque::Unit, Opaque::AtLeast(v)) | (Opaque::AtLeast(v), Opaque::Unit) => Opaque::AtLeast(v.clone()),
            (Opaque::AtLeast(a), Opaque::AtLeast(b)) => Opaque::AtLeast(a + b),
        };
        Scalar {
            gamma_exp: &self.gamma_exp + &other.gamma_exp,
            rational: &self.rational * &other.rational,
            opaque,
        }
    }

    fn opaque_bound(&self) -> Q {
        match &self.opaque {
            Opaque::None | Opaque::Unit => Q::zero(),
            Opaque::AtLeast(v) => v.clone(),
        }
    }

    /// Lower bound on `ord_p`; `None` for the zero scalar.
    pub fn valuation_bound(&self, p: u64) -> Option<Q> {
        let v = v_p(&self.rational, p)?;
        Some(&self.gamma_exp / qi(p as i64 - 1) + qi(v) + self.opaque_bound())
    }

    /// Exact `ord_p` when nothing opaque of unknown order is involved.
    pub fn exact_valuation(&self, p: u64) -> Option<Q> {
        match self.opaque {
            Opaque::AtLeast(_) => None,
            _ => self.valuation_bound(p),
        }
    }
}

/// `λ_m`: exactly `γ^m/m!` for `m <= p - 1`, otherwise `γ^m` times an opaque
/// p-integral number.
pub fn lambda_descriptor(m: u64, p: u64) -> Scalar {
    if m < p {
        Scalar {
            gamma_exp: qi(m as i64),
            rational: Q::new(BigInt::one(), factorial(m)),
            opaque: Opaque::None,
        }
    } else {
        Scalar {
            gamma_exp: qi(m as i64),
            rational: Q::one(),
            opaque: Opaque::AtLeast(Q::zero()),
        }
    }
}

/// Pole orders and prime; variables `A_{j,i}` are laid out pole by pole
/// with `A_{j,d_j}` first, so that the derived ordering on exponent vectors
/// is lexicographic in `A_{1,d_1}, …, A_{1,1}, A_{2,d_2}, …`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymContext {
    p: u64,
    orders: Vec<usize>,
    offsets: Vec<usize>,
}

impl SymContext {
    pub fn new(p: u64, orders: &[usize]) -> Result<SymContext> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if orders.is_empty() || orders.iter().any(|&d| d == 0) {
            return Err(Error::InvalidParameter("pole orders must be positive".into()));
        }
        let mut offsets = Vec::with_capacity(orders.len());
        let mut acc = 0;
        for &d in orders {
            offsets.push(acc);
            acc += d;
        }
        Ok(SymContext {
            p,
            orders: orders.to_vec(),
            offsets,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn ell(&self) -> usize {
        self.orders.len()
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    /// `d_j`, 1-based.
    pub fn order(&self, j: usize) -> usize {
        self.orders[j - 1]
    }

    /// `d = Σ d_j + ℓ - 2`.
    pub fn degree(&self) -> usize {
        self.orders.iter().sum::<usize>() + self.ell() - 2
    }

    pub fn num_vars(&self) -> usize {
        self.orders.iter().sum()
    }

    /// Position of `A_{j,i}` in an exponent vector.
    pub fn var_index(&self, j: usize, i: usize) -> usize {
        self.offsets[j - 1] + self.order(j) - i
    }

    fn check_pole(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.ell() {
            return Err(Error::InvalidParameter(format!("pole index {j} out of range 1..={}", self.ell())));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedMonomial {
    pub exps: Vec<u32>,
    pub weight: u64,
    pub coeff: Scalar,
}

impl GradedMonomial {
    fn new(ctx: &SymContext, exps: Vec<u32>, coeff: Scalar) -> GradedMonomial {
        let weight = weight_of(ctx, &exps);
        GradedMonomial { exps, weight, coeff }
    }
}

fn weight_of(ctx: &SymContext, exps: &[u32]) -> u64 {
    let mut w = 0u64;
    for j in 1..=ctx.ell() {
        for i in 1..=ctx.order(j) {
            w += i as u64 * exps[ctx.var_index(j, i)] as u64;
        }
    }
    w
}

/// A sum of graded monomials times `γ^{prefix}`. Monomials are merged and
/// kept in decreasing lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedPoly {
    ctx: SymContext,
    prefix: Q,
    terms: Vec<GradedMonomial>,
}

fn merge_scalars(p: u64, a: &Scalar, b: &Scalar) -> Scalar {
    if a.opaque == Opaque::None && b.opaque == Opaque::None && a.gamma_exp == b.gamma_exp {
        Scalar {
            gamma_exp: a.gamma_exp.clone(),
            rational: &a.rational + &b.rational,
            opaque: Opaque::None,
        }
    } else {
        let va = a.valuation_bound(p).expect("nonzero");
        let vb = b.valuation_bound(p).expect("nonzero");
        Scalar::at_least(core::cmp::min(va, vb))
    }
}

impl GradedPoly {
    pub fn zero(ctx: &SymContext) -> GradedPoly {
        GradedPoly {
            ctx: ctx.clone(),
            prefix: Q::zero(),
            terms: Vec::new(),
        }
    }

    pub fn constant(ctx: &SymContext, c: Scalar) -> GradedPoly {
        GradedPoly::from_terms(ctx, vec![(vec![0; ctx.num_vars()], c)])
    }

    pub fn from_terms(ctx: &SymContext, raw: Vec<(Vec<u32>, Scalar)>) -> GradedPoly {
        let mut map: BTreeMap<Vec<u32>, Scalar> = BTreeMap::new();
        for (e, c) in raw {
            if c.is_zero() {
                continue;
            }
            match map.remove(&e) {
                Some(old) => {
                    let m = merge_scalars(ctx.p, &old, &c);
                    if !m.is_zero() {
                        map.insert(e, m);
                    }
                }
                None => {
                    map.insert(e, c);
                }
            }
        }
        let terms = map
            .into_iter()
            .rev()
            .map(|(e, c)| GradedMonomial::new(ctx, e, c))
            .collect();
        GradedPoly {
            ctx: ctx.clone(),
            prefix: Q::zero(),
            terms,
        }
    }

    pub fn with_prefix(mut self, prefix: Q) -> GradedPoly {
        self.prefix = prefix;
        self
    }

    /// Exponent of the explicit `γ` factor.
    pub fn prefix(&self) -> &Q {
        &self.prefix
    }

    pub fn terms(&self) -> &[GradedMonomial] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_weight(&self) -> Option<u64> {
        self.terms.iter().map(|t| t.weight).min()
    }

    /// Minimum of the monomial bounds, including the prefix.
    pub fn valuation_bound(&self) -> Option<Q> {
        let p = self.ctx.p;
        let pre = &self.prefix / qi(p as i64 - 1);
        self.terms
            .iter()
            .filter_map(|t| t.coeff.valuation_bound(p))
            .min()
            .map(|v| v + pre)
    }

    pub fn highest_lex(&self) -> Option<&GradedMonomial> {
        self.terms.first()
    }

    pub fn mul(&self, other: &GradedPoly) -> GradedPoly {
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let e = a.exps.iter().zip(&b.exps).map(|(x, y)| x + y).collect();
                raw.push((e, a.coeff.mul(&b.coeff)));
            }
        }
        GradedPoly::from_terms(&self.ctx, raw).with_prefix(&self.prefix + &other.prefix)
    }
}

/// All `(m_1, …, m_d)` with `Σ k m_k = n`.
fn partitions(d: usize, n: usize) -> Vec<Vec<u32>> {
    fn rec(k: usize, rest: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == 0 {
            if rest == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for m in 0..=rest / k {
            cur[k - 1] = m as u32;
            rec(k - 1, rest - k * m, cur, out);
        }
        cur[k - 1] = 0;
    }
    let mut out = Vec::new();
    rec(d, n, &mut vec![0; d], &mut out);
    out
}

/// `F_{j,n} = Σ λ_{m_1}⋯λ_{m_{d_j}} A_{j,1}^{m_1}⋯A_{j,d_j}^{m_{d_j}}` over
/// `Σ k m_k = n`; zero for `n < 0`.
pub fn f_poly(ctx: &SymContext, j: usize, n: i64) -> Result<GradedPoly> {
    ctx.check_pole(j)?;
    if n < 0 {
        return Ok(GradedPoly::zero(ctx));
    }
    let d = ctx.order(j);
    let raw = partitions(d, n as usize)
        .into_iter()
        .map(|ms| {
            let mut e = vec![0u32; ctx.num_vars()];
            let mut c = Scalar::one();
            for (k, &m) in ms.iter().enumerate() {
                e[ctx.var_index(j, k + 1)] = m;
                c = c.mul(&lambda_descriptor(m as u64, ctx.p));
            }
            (e, c)
        })
        .collect();
    Ok(GradedPoly::from_terms(ctx, raw))
}

/// `⌈n/d_j⌉/(p-1)`.
pub fn f_valuation_bound(ctx: &SymContext, j: usize, n: i64) -> Q {
    if n <= 0 {
        return Q::zero();
    }
    q(ceil_div(n, ctx.order(j) as i64), ctx.p as i64 - 1)
}

/// One product of F-polynomials times a scalar, as it appears in the
/// expansion of an H or C entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HTerm {
    /// `(pole, index)` pairs, one per F factor.
    pub factors: Vec<(usize, i64)>,
    pub scalar: Scalar,
}

impl HTerm {
    /// Every monomial of `F_{j,n}` has weight `n`.
    pub fn weight(&self) -> u64 {
        self.factors.iter().map(|&(_, n)| n as u64).sum()
    }

    /// Termwise bound: the F bounds plus the scalar bound (no prefix).
    pub fn valuation_bound(&self, ctx: &SymContext) -> Option<Q> {
        let s = self.scalar.valuation_bound(ctx.p)?;
        Some(self.factors.iter().map(|&(j, n)| f_valuation_bound(ctx, j, n)).sum::<Q>() + s)
    }

    pub fn expand(&self, ctx: &SymContext) -> Result<GradedPoly> {
        let mut acc = GradedPoly::constant(ctx, self.scalar.clone());
        for &(j, n) in &self.factors {
            acc = acc.mul(&f_poly(ctx, j, n)?);
        }
        Ok(acc)
    }
}

/// `P̂_j^e`: the pole at infinity never occurs, `P̂_2 = 0`, and the other
/// poles lift to units.
fn pole_power(j: usize, e: i64) -> Option<Scalar> {
    match (j, e) {
        (_, 0) => Some(Scalar::one()),
        (2, _) => None,
        _ => Some(Scalar::unit()),
    }
}

fn int_scalar(n: BigInt) -> Option<Scalar> {
    if n.is_zero() {
        None
    } else {
        Some(Scalar::rational(Q::from_integer(n)))
    }
}

fn sign(e: i64) -> BigInt {
    if e.rem_euclid(2) == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// Which auxiliary indices an enumeration visits: all of `[0, w]`, or only
/// the shell where the largest auxiliary index equals `w + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Range {
    Window(usize),
    Shell(usize),
}

impl Range {
    fn top(self) -> usize {
        match self {
            Range::Window(w) => w,
            Range::Shell(w) => w + 1,
        }
    }

    fn keep(self, max_aux: usize) -> bool {
        match self {
            Range::Window(_) => true,
            Range::Shell(w) => max_aux == w + 1,
        }
    }
}

/// One factor choice: F index, scalar, auxiliary index for the window.
type Choice = ((usize, i64), Scalar, usize);

fn for_each_vector(len: usize, top: usize, mut f: impl FnMut(&[usize])) {
    let mut v = vec![0usize; len];
    loop {
        f(&v);
        let mut i = 0;
        while i < len && v[i] == top {
            v[i] = 0;
            i += 1;
        }
        if i == len {
            return;
        }
        v[i] += 1;
    }
}

fn validate_indices(ctx: &SymContext, j1: usize, j: usize, n: i64, i: i64) -> Result<()> {
    ctx.check_pole(j1)?;
    ctx.check_pole(j)?;
    let n_min = if j1 == 1 { 0 } else { 1 };
    let i_min = if j == 1 { 0 } else { 1 };
    if n < n_min || i < i_min {
        return Err(Error::InvalidParameter(format!(
            "indices (n, i) = ({n}, {i}) out of range for poles ({j1}, {j})"
        )));
    }
    Ok(())
}

/// The terms of `H_{J_1,J}^{N,i}` in the three local expansions, with the
/// auxiliary indices (the `n_j`, `j ≠ J_1`, and the offsets of the infinite
/// `m` sums) restricted by `range`. The index `n_{J_1}` is then fixed by the
/// constraint.
fn h_terms_in(ctx: &SymContext, j1: usize, j: usize, big_n: i64, i: i64, range: Range) -> Result<Vec<HTerm>> {
    if big_n < 0 {
        return Err(Error::InvalidParameter("negative H index".into()));
    }
    ctx.check_pole(j1)?;
    ctx.check_pole(j)?;
    let ell = ctx.ell();
    let top = range.top();
    let others: Vec<usize> = (1..=ell).filter(|&x| x != j1).collect();
    let mut out = Vec::new();
    for_each_vector(others.len(), top, |ns| {
        let sum: i64 = ns.iter().map(|&x| x as i64).sum();
        let n_j1 = if j1 == 1 {
            if j == 1 {
                big_n - i + sum
            } else {
                big_n + i + sum
            }
        } else if j == j1 {
            big_n - i + sum
        } else {
            big_n + sum
        };
        if n_j1 < 0 {
            return;
        }
        // per other pole, the list of factor choices
        let mut per_pole: Vec<Vec<Choice>> = Vec::with_capacity(others.len());
        for (idx, &jj) in others.iter().enumerate() {
            let nj = ns[idx] as i64;
            let mut choices: Vec<Choice> = Vec::new();
            if j1 == 1 {
                for m in 0..=nj {
                    let b = if jj == j {
                        binom(nj + i - 1, m + i - 1)
                    } else {
                        binom(nj - 1, m - 1)
                    };
                    if let (Some(s), Some(pp)) = (int_scalar(b), pole_power(jj, nj - m)) {
                        choices.push(((jj, m), s.mul(&pp), ns[idx]));
                    }
                }
            } else if jj == 1 {
                let n1 = nj;
                if j == 1 {
                    let lo = (n1 - i).max(0);
                    for off in 0..=top as i64 {
                        let m = lo + off;
                        let b = binom(m + i, n1);
                        if let (Some(s), Some(pp)) = (int_scalar(b), pole_power(j1, m + i - n1)) {
                            choices.push(((1, m), s.mul(&pp), (ns[idx]).max(off as usize)));
                        }
                    }
                } else {
                    for off in 0..=top as i64 {
                        let m = n1 + off;
                        let b = binom(m, n1);
                        if let (Some(s), Some(pp)) = (int_scalar(b), pole_power(j1, m - n1)) {
                            choices.push(((1, m), s.mul(&pp), (ns[idx]).max(off as usize)));
                        }
                    }
                }
            } else {
                for m in 0..=top as i64 {
                    let (b, sgn) = if jj == j {
                        (binom(nj + m + i - 1, m + i - 1), sign(m + i))
                    } else {
                        (binom(nj + m - 1, m - 1), sign(m))
                    };
                    // (P̂_jj - P̂_J1)^{-e} is a unit
                    if let Some(s) = int_scalar(b * sgn) {
                        choices.push(((jj, m), s.mul(&Scalar::unit()), (ns[idx]).max(m as usize)));
                    }
                }
            }
            per_pole.push(choices);
        }
        // cartesian product over the other poles
        let mut idx = vec![0usize; per_pole.len()];
        if per_pole.iter().any(|c| c.is_empty()) {
            return;
        }
        loop {
            let mut factors = vec![(j1, n_j1)];
            let mut scalar = Scalar::one();
            let mut max_aux = 0usize;
            for (c, &k) in per_pole.iter().zip(&idx) {
                let (f, s, aux) = &c[k];
                factors.push(*f);
                scalar = scalar.mul(s);
                max_aux = max_aux.max(*aux);
            }
            if range.keep(max_aux) {
                out.push(HTerm { factors, scalar });
            }
            let mut t = 0;
            while t < idx.len() && idx[t] + 1 == per_pole[t].len() {
                idx[t] = 0;
                t += 1;
            }
            if t == idx.len() {
                break;
            }
            idx[t] += 1;
        }
    });
    Ok(out)
}

/// Terms of `^wH_{J_1,J}^{N,i}`.
pub fn h_terms(ctx: &SymContext, j1: usize, j: usize, big_n: i64, i: i64, w: usize) -> Result<Vec<HTerm>> {
    h_terms_in(ctx, j1, j, big_n, i, Range::Window(w))
}

/// `^wH_{J_1,J}^{N,i}` as a polynomial.
pub fn h_expansion(ctx: &SymContext, j1: usize, j: usize, big_n: i64, i: i64, w: usize) -> Result<GradedPoly> {
    let mut raw = Vec::new();
    for t in h_terms(ctx, j1, j, big_n, i, w)? {
        for m in t.expand(ctx)?.terms {
            raw.push((m.exps, m.coeff));
        }
    }
    Ok(GradedPoly::from_terms(ctx, raw))
}

/// `i/d_J - n/d_{J_1}`, the exponent of the explicit `γ` factor.
pub fn gamma_prefix(ctx: &SymContext, j1: usize, j: usize, n: i64, i: i64) -> Q {
    q(i, ctx.order(j) as i64) - q(n, ctx.order(j1) as i64)
}

/// `C^{n,m}`: a unit at `m = (n-1)p + 1`, of order `>= 1` for `m <= (n-1)p`,
/// an opaque integer otherwise.
fn c_nm(n: i64, m: i64, p: i64) -> Scalar {
    if m == (n - 1) * p + 1 {
        Scalar::unit()
    } else if m <= (n - 1) * p {
        Scalar::at_least(Q::one())
    } else {
        Scalar::at_least(Q::zero())
    }
}

fn c_terms_in(ctx: &SymContext, j1: usize, j: usize, n: i64, i: i64, t: usize, range: Range) -> Result<Vec<HTerm>> {
    validate_indices(ctx, j1, j, n, i)?;
    let p = ctx.p as i64;
    if t == 0 || t as i64 > p {
        return Err(Error::InvalidParameter(format!("truncation t = {t} must lie in 1..=p")));
    }
    if j1 <= 2 {
        return h_terms_in(ctx, j1, j, n * p, i, range);
    }
    let mut out = Vec::new();
    for m in (n - 1) * p + 1..=(n - 1) * p + t as i64 {
        let head = c_nm(n, m, p).mul(&pole_power(j1, n * p - m).expect("unit pole"));
        for mut term in h_terms_in(ctx, j1, j, m, i, range)? {
            term.scalar = head.mul(&term.scalar);
            out.push(term);
        }
    }
    Ok(out)
}

/// Terms of `^tC_{J_1,J}^{n,i}` with window `w`; the `γ` prefix is separate.
pub fn c_terms(ctx: &SymContext, j1: usize, j: usize, n: i64, i: i64, t: usize, w: usize) -> Result<Vec<HTerm>> {
    c_terms_in(ctx, j1, j, n, i, t, Range::Window(w))
}

pub fn c_entry(ctx: &SymContext, j1: usize, j: usize, n: i64, i: i64, t: usize, w: usize) -> Result<GradedPoly> {
    let mut raw = Vec::new();
    for term in c_terms(ctx, j1, j, n, i, t, w)? {
        for m in term.expand(ctx)?.terms {
            raw.push((m.exps, m.coeff));
        }
    }
    Ok(GradedPoly::from_terms(ctx, raw).with_prefix(gamma_prefix(ctx, j1, j, n, i)))
}

/// `⌈(np - i)/d_{J_1}⌉/(p-1)` for `J_1 = 1, 2` and
/// `⌈((n-1)p - (i-1))/d_{J_1}⌉/(p-1)` otherwise.
pub fn diagonal_bound(ctx: &SymContext, j1: usize, n: i64, i: i64) -> Q {
    let p = ctx.p as i64;
    let x = if j1 <= 2 { n * p - i } else { (n - 1) * p - (i - 1) };
    if x <= 0 {
        return Q::zero();
    }
    q(ceil_div(x, ctx.order(j1) as i64), p - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncationKind {
    /// `C - ^pC`: the terms `m <= (n-1)p` of the `J_1 >= 3` sum.
    FullVsP,
    /// `^pC - ^tC` for the given `t`.
    PVsT(usize),
    /// `^βC - ^wK` for the given `(β, w)`.
    BetaVsK { beta: usize, w: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncationBound {
    /// Certified lower bound on the order of the dropped part; `None` when
    /// nothing is dropped.
    pub bound: Option<Q>,
    /// `(n-1)/d_{J_1} + d/(p-1)`.
    pub threshold: Q,
    pub clears: bool,
    /// Smallest admissible prime from which the bound clears the threshold,
    /// confirmed on the next [`PRIME_SCAN_CONFIRM`] admissible primes.
    pub min_prime: Option<u64>,
}

pub const PRIME_SCAN_LIMIT: u64 = 200;
pub const PRIME_SCAN_CONFIRM: usize = 5;

fn threshold(ctx: &SymContext, j1: usize, n: i64) -> Q {
    q(n - 1, ctx.order(j1) as i64) + q(ctx.degree() as i64, ctx.p as i64 - 1)
}

fn raw_bound(ctx: &SymContext, kind: TruncationKind, j1: usize, j: usize, n: i64, i: i64) -> Result<Option<Q>> {
    let p = ctx.p as i64;
    let pre = gamma_prefix(ctx, j1, j, n, i) / qi(p - 1);
    let d1 = ctx.order(j1) as i64;
    match kind {
        TruncationKind::FullVsP => {
            let mut best: Option<Q> = None;
            for m in n..=(n - 1) * p {
                let h = core::cmp::max(Q::zero(), q(m - i, d1 * (p - 1)));
                let b = &pre + Q::one() + h;
                if best.as_ref().map_or(true, |x| &b < x) {
                    best = Some(b);
                }
            }
            Ok(best)
        }
        TruncationKind::PVsT(t) => {
            if t as i64 >= p {
                return Ok(None);
            }
            let m = (n - 1) * p + t as i64 + 1;
            Ok(Some(&pre + core::cmp::max(Q::zero(), q(m - i, d1 * (p - 1)))))
        }
        TruncationKind::BetaVsK { beta, w } => {
            let beta = beta.min(p as usize);
            let terms = c_terms_in(ctx, j1, j, n, i, if j1 <= 2 { 1 } else { beta }, Range::Shell(w))?;
            Ok(terms
                .iter()
                .filter_map(|t| t.valuation_bound(ctx))
                .min()
                .map(|b| b + &pre))
        }
    }
}

/// Certified bound on what a truncation drops, computed termwise over the
/// dropped index set (for the window kind, over its innermost shell, which
/// bounds all further terms because every bound grows with the indices).
pub fn truncation_error_bound(ctx: &SymContext, kind: TruncationKind, j1: usize, j: usize, n: i64, i: i64) -> Result<TruncationBound> {
    validate_indices(ctx, j1, j, n, i)?;
    if n > ctx.order(j1) as i64 || i > ctx.order(j) as i64 {
        return Err(Error::InvalidParameter(format!("need n <= d_{j1} and i <= d_{j}")));
    }
    if j1 < 3 && !matches!(kind, TruncationKind::BetaVsK { .. }) {
        return Err(Error::InvalidParameter("the m-sum truncations concern poles J_1 >= 3".into()));
    }
    let bound = raw_bound(ctx, kind, j1, j, n, i)?;
    let thr = threshold(ctx, j1, n);
    let clears_here = bound.as_ref().map_or(true, |b| b > &thr);
    let max_d = *ctx.orders.iter().max().unwrap() as u64;
    let candidates: Vec<u64> = (2..=PRIME_SCAN_LIMIT)
        .filter(|&p| is_prime(p) && p > max_d && ctx.orders.iter().all(|&dj| gcd(p, dj as u64) == 1))
        .collect();
    let mut min_prime = None;
    let mut run = 0usize;
    for &p in &candidates {
        let c = SymContext::new(p, &ctx.orders)?;
        if clears(&c, kind, j1, j, n, i)? {
            min_prime = min_prime.or(Some(p));
            run += 1;
            if run > PRIME_SCAN_CONFIRM {
                break;
            }
        } else {
            min_prime = None;
            run = 0;
        }
    }
    Ok(TruncationBound {
        bound,
        threshold: thr,
        clears: clears_here,
        min_prime,
    })
}

fn clears(ctx: &SymContext, kind: TruncationKind, j1: usize, j: usize, n: i64, i: i64) -> Result<bool> {
    validate_indices(ctx, j1, j, n, i)?;
    Ok(match raw_bound(ctx, kind, j1, j, n, i)? {
        None => true,
        Some(b) => b > threshold(ctx, j1, n),
    })
}

/// Smallest `t <= p` for which `^tC` is within the threshold of `^pC`.
pub fn find_beta(ctx: &SymContext, j1: usize, j: usize, n: i64, i: i64) -> Result<Option<usize>> {
    for t in 1..=ctx.p as usize {
        if clears(ctx, TruncationKind::PVsT(t), j1, j, n, i)? {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// Smallest window `w <= w_max` for which `^wK` is within the threshold of `^βC`.
pub fn find_alpha(ctx: &SymContext, j1: usize, j: usize, n: i64, i: i64, beta: usize, w_max: usize) -> Result<Option<usize>> {
    for w in 0..=w_max {
        if clears(ctx, TruncationKind::BetaVsK { beta, w }, j1, j, n, i)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermData {
    pub d: usize,
    pub p: u64,
    /// `p mod d`.
    pub r: u64,
    pub n: usize,
    pub r_matrix: Vec<Vec<u64>>,
    /// `sigma0[i - 1] = σ₀(i)`, 1-based images.
    pub sigma0: Vec<usize>,
}

/// `r_{ij}`: the least nonnegative residue of `-(ip - j)` mod `d`, checked
/// against `d⌈(ri - j)/d⌉ - (ri - j)`.
pub fn r_matrix(d: usize, p: u64, n: usize) -> Result<Vec<Vec<u64>>> {
    if d == 0 || gcd(p, d as u64) != 1 {
        return Err(Error::InvalidParameter(format!("gcd(p, d) must be 1 (p = {p}, d = {d})")));
    }
    let di = d as i64;
    let r = (p % d as u64) as i64;
    let mut out = vec![vec![0u64; n]; n];
    for i in 1..=n as i64 {
        for j in 1..=n as i64 {
            let a = (-(i * p as i64 - j)).rem_euclid(di);
            let b = di * ceil_div(r * i - j, di) - (r * i - j);
            ensure!(a == b, "residue conventions disagree at ({i}, {j})");
            out[(i - 1) as usize][(j - 1) as usize] = a as u64;
        }
    }
    Ok(out)
}

/// Exponent vector `(A_d, A_{d-1}, …, A_1)` of the highest monomial of `F_x`:
/// `A_d^{⌊x/d⌋} A_{x mod d}`.
fn top_monomial(d: usize, x: i64) -> Vec<u64> {
    let mut e = vec![0u64; d];
    e[0] = (x / d as i64) as u64;
    let rem = (x % d as i64) as usize;
    if rem > 0 {
        e[d - rem] += 1;
    }
    e
}

fn sigma_monomial(d: usize, p: u64, sigma: &[usize]) -> Vec<u64> {
    let mut acc = vec![0u64; d];
    for (i, &s) in sigma.iter().enumerate() {
        let x = (i as i64 + 1) * p as i64 - s as i64;
        for (a, b) in acc.iter_mut().zip(top_monomial(d, x)) {
            *a += b;
        }
    }
    acc
}

/// Every `ip - j` must stay positive.
fn check_rows(p: u64, n: usize) -> Result<()> {
    if n as u64 >= p {
        return Err(Error::InvalidParameter(format!("need n < p (n = {n}, p = {p})")));
    }
    Ok(())
}

/// `σ₀` by trying every permutation; fails unless the maximiser is unique.
pub fn sigma0_exhaustive(d: usize, p: u64, n: usize) -> Result<Vec<usize>> {
    r_matrix(d, p, n)?;
    check_rows(p, n)?;
    if n > 8 {
        return Err(Error::InvalidParameter("exhaustive σ₀ search is limited to n <= 8".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut best: Option<(Vec<u64>, Vec<usize>)> = None;
    let mut ties = 0usize;
    for_each_permutation(n, |perm, _| {
        let sigma: Vec<usize> = perm.iter().map(|x| x + 1).collect();
        let mon = sigma_monomial(d, p, &sigma);
        match best.as_ref().map(|(b, _)| mon.cmp(b)) {
            None | Some(Ordering::Greater) => {
                best = Some((mon, sigma));
                ties = 1;
            }
            Some(Ordering::Equal) => ties += 1,
            Some(Ordering::Less) => {}
        }
    });
    ensure!(ties == 1, "highest monomial attained by {ties} permutations");
    Ok(best.unwrap().1)
}

/// Max-weight perfect assignment (Hungarian method with potentials).
fn max_weight_assignment(w: &[Vec<i128>]) -> Vec<usize> {
    let n = w.len();
    let inf = i128::MAX / 4;
    let mut u = vec![0i128; n + 1];
    let mut v = vec![0i128; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = -w[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut ans = vec![0usize; n];
    for j in 1..=n {
        if p[j] != 0 {
            ans[p[j] - 1] = j - 1;
        }
    }
    ans
}

/// `σ₀` constructively. The exponent of `A_d` in `Π_i h_{σ,i}` is a constant
/// plus `Σ_{r_{iσ(i)} ≠ 0} (r_{iσ(i)} - d)/d`, and the exponent of `A_{d-v}`
/// counts the rows with `r_{iσ(i)} = v`; encoding that lexicographic order
/// as integer weights turns the search into an assignment problem.
pub fn sigma0_assignment(d: usize, p: u64, n: usize) -> Result<Vec<usize>> {
    let r = r_matrix(d, p, n)?;
    check_rows(p, n)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let base = n as i128 + 1;
    let top = base
        .checked_pow(d as u32)
        .and_then(|b| b.checked_mul(2 * n as i128 * d as i128))
        .ok_or_else(|| Error::InvalidParameter("assignment weights overflow".into()))?;
    debug_assert!(top > 0);
    let lead = base.pow(d as u32 - 1);
    let w: Vec<Vec<i128>> = r
        .iter()
        .map(|row| {
            row.iter()
                .map(|&x| {
                    if x == 0 {
                        0
                    } else {
                        (x as i128 - d as i128) * lead + base.pow((d - 1 - x as usize) as u32)
                    }
                })
                .collect()
        })
        .collect();
    let sigma: Vec<usize> = max_weight_assignment(&w).into_iter().map(|c| c + 1).collect();
    for (i, row) in r.iter().enumerate() {
        for (k, &x) in row.iter().enumerate() {
            ensure!(x != 0 || sigma[i] == k + 1, "σ₀ misses the zero residue at ({}, {})", i + 1, k + 1);
        }
    }
    Ok(sigma)
}

/// Residue matrix and `σ₀`, the two constructions cross-checked for `n <= 6`.
pub fn perm_data(d: usize, p: u64, n: usize) -> Result<PermData> {
    let r_mat = r_matrix(d, p, n)?;
    let sigma0 = sigma0_assignment(d, p, n)?;
    if n <= 6 {
        let ex = sigma0_exhaustive(d, p, n)?;
        ensure!(ex == sigma0, "σ₀ constructions disagree: {ex:?} vs {sigma0:?}");
    }
    Ok(PermData {
        d,
        p,
        r: p % d as u64,
        n,
        r_matrix: r_mat,
        sigma0,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexData {
    pub k: usize,
    pub decomposition: Vec<usize>,
    pub c0: Q,
    pub s_values: Vec<Q>,
    pub s0: Q,
}

/// Slopes contributed by pole `J`: `i/d_J` (`1 <= i < d_J`) for `J = 1, 2`,
/// `(i-1)/d_J` (`1 <= i <= d_J`) for `J >= 3`.
fn pole_slopes(j: usize, d: usize) -> Vec<Q> {
    if j <= 2 {
        (1..d).map(|i| q(i as i64, d as i64)).collect()
    } else {
        (1..=d).map(|i| q(i as i64 - 1, d as i64)).collect()
    }
}

/// `s_J = [(p-1)k_J(k_J ± 1)/2 + Σ_i r_{J,i,σ₀(i)}]/d_J`. For `J >= 3` the
/// rows are those of `D_J^{[k_J - 1]}`.
pub fn s_value(j: usize, d: usize, k_j: usize, p: u64) -> Result<Q> {
    if k_j == 0 {
        return Ok(Q::zero());
    }
    let (size, tri) = if j <= 2 {
        (k_j, k_j * (k_j + 1) / 2)
    } else {
        (k_j - 1, k_j * (k_j - 1) / 2)
    };
    let pd = perm_data(d, p, size)?;
    let rsum: u64 = pd.sigma0.iter().enumerate().map(|(i, &s)| pd.r_matrix[i][s - 1]).sum();
    Ok(q((p as i64 - 1) * tri as i64 + rsum as i64, d as i64))
}

/// Vertex data at an interior vertex `(k, c_0)` of the slope `< 1` part of
/// the Hodge polygon, `1 <= k <= d - ℓ`. For `ℓ >= 2` the constant basis
/// vector accounts for one of the first `k` zero slopes, so `Σ k_J = k - 1`.
pub fn vertex_data(ell: usize, orders: &[usize], k: usize, p: u64) -> Result<VertexData> {
    let ctx = SymContext::new(p, orders)?;
    if ctx.ell() != ell {
        return Err(Error::InvalidParameter("ℓ does not match the pole orders".into()));
    }
    if orders.iter().any(|&dj| gcd(p, dj as u64) != 1) {
        return Err(Error::InvalidParameter(format!("p = {p} divides a pole order")));
    }
    let d = ctx.degree();
    let hp = hodge_polygon(ell, orders)?;
    let kq = qi(k as i64);
    if k == 0 || k + ell > d || !hp.is_vertex(&kq) {
        return Err(Error::NotAVertex(k));
    }
    let c0 = hp.eval(&kq).expect("inside");
    let left = {
        let v = hp.vertices();
        let pos = v.iter().position(|(x, _)| x == &kq).unwrap();
        (&v[pos].1 - &v[pos - 1].1) / (&v[pos].0 - &v[pos - 1].0)
    };
    let decomposition: Vec<usize> = (1..=ell)
        .map(|j| pole_slopes(j, orders[j - 1]).into_iter().filter(|s| s <= &left).count())
        .collect();
    let expected: usize = if ell >= 2 { k - 1 } else { k };
    ensure!(
        decomposition.iter().sum::<usize>() == expected,
        "slope provenance gives {decomposition:?}, which does not sum to {expected}"
    );
    let mut c_check = Q::zero();
    for (jdx, &kj) in decomposition.iter().enumerate() {
        let dj = orders[jdx] as i64;
        for i in 1..=kj as i64 {
            c_check += if jdx < 2 { q(i, dj) } else { q(i - 1, dj) };
        }
    }
    ensure!(c_check == c0, "c_0 from the decomposition is {c_check}, the Hodge polygon gives {c0}");
    let s_values: Vec<Q> = decomposition
        .iter()
        .enumerate()
        .map(|(jdx, &kj)| s_value(jdx + 1, orders[jdx], kj, p))
        .collect::<Result<_>>()?;
    let s0: Q = s_values.iter().sum();
    let gap = &s0 - &c0 * qi(p as i64 - 1);
    ensure!(gap >= Q::zero() && gap < kq, "s_0 - c_0(p-1) = {gap} is not in [0, {k})");
    Ok(VertexData {
        k,
        decomposition,
        c0,
        s_values,
        s0,
    })
}

/// The basis elements `Z_J^n`, `n >= 1`, ordered by
/// `φ = n/d_J` (`J <= 2`) or `(n-1)/d_J` (`J >= 3`), ties broken by pole and
/// then exponent. The constant vector is not included.
pub fn phi_basis(orders: &[usize], count: usize) -> Vec<(usize, usize)> {
    let mut all: Vec<(Q, usize, usize)> = Vec::new();
    for (jdx, &d) in orders.iter().enumerate() {
        let j = jdx + 1;
        for n in 1..=count {
            let phi = if j <= 2 { q(n as i64, d as i64) } else { q(n as i64 - 1, d as i64) };
            all.push((phi, j, n));
        }
    }
    all.sort();
    all.into_iter().take(count).map(|(_, j, n)| (j, n)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub k: usize,
    pub rows: Vec<(usize, usize)>,
    pub min_weight: u64,
    /// Every permutation reaching the minimal weight stays in the diagonal blocks.
    pub diagonal_only: bool,
    /// The minimal-weight terms match those of `Π_J D_J` permutation by permutation.
    pub bijection: bool,
    pub unique_highest: bool,
    pub highest_valuation: Option<Q>,
    /// `s_0/(p-1)` for the block sizes of the rows.
    pub expected_valuation: Q,
    pub passes: bool,
}

/// A formal term: permutation, exponent vector, coefficient.
type Formal = (Vec<usize>, Vec<u32>, Scalar);

const AUDIT_TERM_LIMIT: usize = 2_000_000;

fn expand_rows(ctx: &SymContext, sigma: &[usize], rows: &[Vec<HTerm>]) -> Result<Vec<Formal>> {
    let mut acc: Vec<(Vec<u32>, Scalar)> = vec![(vec![0; ctx.num_vars()], Scalar::one())];
    for row in rows {
        let mut next = Vec::new();
        for term in row {
            let poly = term.expand(ctx)?;
            for (e, c) in &acc {
                for m in poly.terms() {
                    let ex = e.iter().zip(&m.exps).map(|(a, b)| a + b).collect();
                    next.push((ex, c.mul(&m.coeff)));
                }
            }
            if next.len() > AUDIT_TERM_LIMIT {
                return Err(Error::BudgetExceeded {
                    size: next.len() as u128,
                    budget: AUDIT_TERM_LIMIT as u64,
                });
            }
        }
        acc = next;
    }
    Ok(acc.into_iter().map(|(e, c)| (sigma.to_vec(), e, c)).collect())
}

/// Checks the minimal-weight structure of the formal expansion of
/// `det(^pM^{[k]})` on the first `k` basis elements.
pub fn minimal_weight_audit(orders: &[usize], p: u64, k: usize) -> Result<AuditReport> {
    let ctx = SymContext::new(p, orders)?;
    if k == 0 || k > 4 || orders.iter().any(|&d| d > 4) {
        return Err(Error::InvalidParameter("audit instances need 1 <= k <= 4 and d_j <= 4".into()));
    }
    if orders.iter().any(|&d| p as usize <= d) {
        return Err(Error::InvalidParameter("the audit needs p > d_j".into()));
    }
    let rows = phi_basis(orders, k);
    let w = orders.iter().max().copied().unwrap() + 1;
    let pi = p as usize;
    // entry term lists and their minimal weights
    let mut entries: Vec<Vec<Vec<HTerm>>> = Vec::with_capacity(k);
    for &(j1, n) in &rows {
        let mut line = Vec::with_capacity(k);
        for &(j, i) in &rows {
            line.push(c_terms(&ctx, j1, j, n as i64, i as i64, pi, w)?);
        }
        entries.push(line);
    }
    let minw = |ts: &[HTerm]| ts.iter().map(HTerm::weight).min();
    let mut best: Option<u64> = None;
    let mut winners: Vec<Vec<usize>> = Vec::new();
    for_each_permutation(k, |perm, _| {
        let mut total = 0u64;
        for (r, &c) in perm.iter().enumerate() {
            match minw(&entries[r][c]) {
                Some(x) => total += x,
                None => return,
            }
        }
        match best.map(|b| total.cmp(&b)) {
            None | Some(Ordering::Less) => {
                best = Some(total);
                winners = vec![perm.to_vec()];
            }
            Some(Ordering::Equal) => winners.push(perm.to_vec()),
            Some(Ordering::Greater) => {}
        }
    });
    let min_weight = best.ok_or_else(|| Error::Assertion("every permutation vanishes".into()))?;
    let diagonal_only = winners
        .iter()
        .all(|perm| perm.iter().enumerate().all(|(r, &c)| rows[r].0 == rows[c].0));

    // formal minimal-weight terms of the audit determinant
    let mut audit: BTreeMap<(Vec<usize>, Vec<u32>), usize> = BTreeMap::new();
    let mut formal: Vec<Formal> = Vec::new();
    for perm in &winners {
        let picked: Vec<Vec<HTerm>> = perm
            .iter()
            .enumerate()
            .map(|(r, &c)| {
                let m = minw(&entries[r][c]).unwrap();
                entries[r][c].iter().filter(|t| t.weight() == m).cloned().collect()
            })
            .collect();
        for t in expand_rows(&ctx, perm, &picked)? {
            *audit.entry((t.0.clone(), t.1.clone())).or_default() += 1;
            formal.push(t);
        }
    }

    // the same from Π_J D_J, built directly from F-polynomials
    let mut target: BTreeMap<(Vec<usize>, Vec<u32>), usize> = BTreeMap::new();
    let mut block_sizes = vec![0usize; ctx.ell()];
    for &(j, _) in &rows {
        block_sizes[j - 1] += 1;
    }
    let mut block_ok = true;
    for perm in &winners {
        let mut picked = Vec::with_capacity(k);
        for (r, &c) in perm.iter().enumerate() {
            let (j, n) = rows[r];
            let (jc, i) = rows[c];
            if j != jc {
                block_ok = false;
                break;
            }
            let x = if j <= 2 {
                (n * pi) as i64 - i as i64
            } else if n == 1 && i == 1 {
                0
            } else if n >= 2 && i >= 2 {
                ((n - 1) * pi) as i64 - (i as i64 - 1)
            } else {
                -1
            };
            picked.push(vec![HTerm {
                factors: vec![(j, x)],
                scalar: Scalar::one(),
            }]);
        }
        if !block_ok {
            break;
        }
        if picked.iter().any(|t| t[0].factors[0].1 < 0) {
            continue;
        }
        for t in expand_rows(&ctx, perm, &picked)? {
            *target.entry((t.0, t.1)).or_default() += 1;
        }
    }
    let bijection = block_ok && audit == target;

    // the highest monomial and its order
    let top = formal.iter().map(|t| &t.1).max().cloned();
    let (unique_highest, highest_valuation) = match top {
        Some(e) => {
            let hits: Vec<&Formal> = formal.iter().filter(|t| t.1 == e).collect();
            let v = hits[0].2.exact_valuation(p).map(|v| {
                let sigma = &hits[0].0;
                let pre: Q = sigma
                    .iter()
                    .enumerate()
                    .map(|(r, &c)| gamma_prefix(&ctx, rows[r].0, rows[c].0, rows[r].1 as i64, rows[c].1 as i64))
                    .sum();
                v + pre / qi(p as i64 - 1)
            });
            (hits.len() == 1, v)
        }
        None => (false, None),
    };
    let mut s0 = Q::zero();
    for (jdx, &kj) in block_sizes.iter().enumerate() {
        s0 += s_value(jdx + 1, orders[jdx], kj, p)?;
    }
    let expected_valuation = s0 / qi(p as i64 - 1);
    let passes = diagonal_only && bijection && unique_highest && highest_valuation.as_ref() == Some(&expected_valuation);
    Ok(AuditReport {
        k,
        rows,
        min_weight,
        diagonal_only,
        bijection,
        unique_highest,
        highest_valuation,
        expected_valuation,
        passes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, orders: &[usize]) -> SymContext {
        SymContext::new(p, orders).unwrap()
    }

    #[test]
    fn lambda_examples() {
        let l0 = lambda_descriptor(0, 5);
        assert_eq!(l0, Scalar::one());
        assert_eq!(l0.exact_valuation(5), Some(qi(0)));
        assert_eq!(lambda_descriptor(1, 5).exact_valuation(5), Some(q(1, 4)));
        let l5 = lambda_descriptor(5, 5);
        assert_eq!(l5.exact_valuation(5), None);
        assert_eq!(l5.valuation_bound(5), Some(q(5, 4)));
    }

    #[test]
    fn f_poly_examples() {
        let c = ctx(5, &[2]);
        let f = f_poly(&c, 1, 2).unwrap();
        // λ_2 A_1² + λ_1 A_2, highest (A_2 first) leading
        assert_eq!(f.len(), 2);
        assert_eq!(f.terms()[0].exps, [1, 0]);
        assert_eq!(f.terms()[0].coeff, lambda_descriptor(1, 5));
        assert_eq!(f.terms()[1].exps, [0, 2]);
        assert_eq!(f.terms()[1].coeff, lambda_descriptor(2, 5));
        assert_eq!(f_poly(&c, 1, 0).unwrap(), GradedPoly::constant(&c, Scalar::one()));
        assert!(f_poly(&c, 1, -1).unwrap().is_zero());
    }

    #[test]
    fn f_bounds() {
        let c = ctx(7, &[2, 3]);
        assert_eq!(f_valuation_bound(&c, 1, 2), q(1, 6));
        assert_eq!(f_valuation_bound(&c, 1, 0), qi(0));
        assert_eq!(f_valuation_bound(&c, 2, 4), q(2, 6));
        for j in 1..=2 {
            for n in 0..20 {
                let f = f_poly(&c, j, n).unwrap();
                assert!(f.terms().iter().all(|t| t.weight == n as u64));
                let b = f_valuation_bound(&c, j, n);
                assert_eq!(f.valuation_bound().unwrap(), b, "j = {j}, n = {n}");
                // equality is reached by the highest monomial
                assert_eq!(f.highest_lex().unwrap().coeff.valuation_bound(7).unwrap(), b);
            }
        }
    }

    #[test]
    fn single_pole_h_is_one_term() {
        let c = ctx(5, &[3]);
        for n in 1..4 {
            for i in 0..4 {
                let t = h_terms(&c, 1, 1, n * 5, i, 3).unwrap();
                assert_eq!(t, [HTerm { factors: vec![(1, n * 5 - i)], scalar: Scalar::one() }]);
            }
        }
        let e = c_entry(&c, 1, 1, 2, 1, 5, 2).unwrap();
        assert_eq!(e.prefix(), &q(-1, 3));
        assert_eq!(e.terms(), f_poly(&c, 1, 9).unwrap().terms());
    }

    #[test]
    fn window_zero_keeps_one_vector() {
        let c = ctx(5, &[2, 2]);
        for (j, i) in [(1usize, 1i64), (2, 1)] {
            let ts = h_terms(&c, 1, j, 10, i, 0).unwrap();
            let n1 = if j == 1 { 10 - i } else { 10 + i };
            assert_eq!(ts, [HTerm { factors: vec![(1, n1), (2, 0)], scalar: Scalar::one() }]);
        }
    }

    #[test]
    fn h_bounds_respect_row_decay() {
        for orders in [&[2usize, 2][..], &[3, 2, 2][..], &[2, 1, 1][..]] {
            let c = ctx(7, orders);
            let ell = orders.len();
            for j1 in 1..=ell {
                for j in 1..=ell {
                    for big_n in [7i64, 14] {
                        for i in 1..=2 {
                            let h = h_expansion(&c, j1, j, big_n, i, 2).unwrap();
                            if let Some(b) = h.valuation_bound() {
                                let lemma = q(big_n - i, (orders[j1 - 1] * 6) as i64);
                                assert!(b >= lemma, "({j1}, {j}, {big_n}, {i}): {b} < {lemma}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn diagonal_entry_bounds() {
        let c = ctx(7, &[3, 2]);
        for j in 1..=2 {
            for n in 1..=3 {
                for i in 1..=3 {
                    let e = c_entry(&c, j, j, n, i, 7, 2).unwrap();
                    if let Some(b) = e.valuation_bound() {
                        assert!(b >= diagonal_bound(&c, j, n, i) + gamma_prefix(&c, j, j, n, i) / qi(6));
                    }
                }
            }
        }
    }

    #[test]
    fn third_pole_leading_term() {
        let c = ctx(7, &[2, 2, 3]);
        let (n, i) = (2i64, 2i64);
        let terms = c_terms(&c, 3, 3, n, i, 7, 1).unwrap();
        let minw = terms.iter().map(HTerm::weight).min().unwrap();
        assert_eq!(minw, ((n - 1) * 7 - (i - 1)) as u64);
        let lead: Vec<&HTerm> = terms.iter().filter(|t| t.weight() == minw).collect();
        assert!(lead.iter().any(|t| {
            t.factors[0] == (3, (n - 1) * 7 - (i - 1)) && t.scalar.opaque == Opaque::Unit
        }));
    }

    #[test]
    fn truncation_bounds() {
        let c = ctx(11, &[2, 2, 2]);
        let b = truncation_error_bound(&c, TruncationKind::FullVsP, 3, 1, 2, 1).unwrap();
        assert!(b.bound.unwrap() >= Q::one() + gamma_prefix(&c, 3, 1, 2, 1) / qi(10));
        assert!(truncation_error_bound(&c, TruncationKind::PVsT(1), 1, 1, 1, 1).is_err());
        let c = ctx(11, &[2, 1, 1]);
        for (j, i) in [(3usize, 1i64), (1, 1), (1, 2), (2, 1)] {
            let beta = find_beta(&c, 3, j, 1, i).unwrap().unwrap();
            // t > d d_{J_1} + i - i d_{J_1}/d_J, independent of p
            let expect = qi(5 + i) - q(i, c.order(j) as i64);
            assert_eq!(qi(beta as i64), Q::from_integer(expect.floor().to_integer() + 1), "J = {j}, i = {i}");
            let t = truncation_error_bound(&c, TruncationKind::PVsT(beta), 3, j, 1, i).unwrap();
            assert!(t.clears);
            assert!(!truncation_error_bound(&c, TruncationKind::PVsT(beta - 1), 3, j, 1, i).unwrap().clears);
            let alpha = find_alpha(&c, 3, j, 1, i, beta, 20).unwrap().unwrap();
            let k = truncation_error_bound(&c, TruncationKind::BetaVsK { beta, w: alpha }, 3, j, 1, i).unwrap();
            assert!(k.clears);
            assert!(k.min_prime.unwrap() <= 11);
        }
    }

    #[test]
    fn r_and_sigma_examples() {
        assert_eq!(r_matrix(3, 5, 2).unwrap(), [[2, 0], [0, 1]]);
        assert_eq!(sigma0_exhaustive(3, 5, 2).unwrap(), [2, 1]);
        assert_eq!(sigma0_assignment(3, 5, 2).unwrap(), [2, 1]);
        assert!(r_matrix(3, 3, 2).is_err());
    }

    #[test]
    fn sigma_constructions_agree() {
        for d in 2..=7usize {
            for p in [5u64, 7, 11, 13, 17, 19, 23] {
                if gcd(p, d as u64) != 1 {
                    continue;
                }
                for n in 1..=d.min(6).min(p as usize - 1) {
                    let pd = perm_data(d, p, n).unwrap();
                    for i in 0..n {
                        for k in 0..n {
                            if pd.r_matrix[i][k] == 0 {
                                assert_eq!(pd.sigma0[i], k + 1);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn vertex_examples() {
        let v = vertex_data(1, &[3], 1, 5).unwrap();
        assert_eq!(v.decomposition, [1]);
        assert_eq!(v.c0, q(1, 3));
        assert_eq!(v.s0, qi(2));
        assert_eq!(&v.s0 / qi(4) - &v.c0, q(2, 12));
        assert_eq!(&v.s0 - &v.c0 * qi(4), q(2, 3));
        let v = vertex_data(1, &[3], 1, 7).unwrap();
        assert_eq!(v.s0, qi(2));
        assert_eq!(&v.s0 / qi(6), v.c0);
        assert_eq!(vertex_data(1, &[2], 1, 5), Err(Error::NotAVertex(1)));
    }

    #[test]
    fn vertex_gap_bounds() {
        for orders in [&[3usize][..], &[4], &[5], &[2, 2], &[3, 2], &[2, 3, 2], &[1, 1, 3]] {
            let ell = orders.len();
            let d = orders.iter().sum::<usize>() + ell - 2;
            let hp = hodge_polygon(ell, orders).unwrap();
            for p in [7u64, 11, 13, 29, 31] {
                if orders.iter().any(|&x| gcd(p, x as u64) != 1) {
                    continue;
                }
                for k in 1..=d.saturating_sub(ell) {
                    if !hp.is_vertex(&qi(k as i64)) {
                        continue;
                    }
                    let v = vertex_data(ell, orders, k, p).unwrap();
                    let gap = &v.s0 / qi(p as i64 - 1) - &v.c0;
                    assert!(gap >= Q::zero() && gap < q(k as i64, p as i64 - 1));
                    assert!(gap <= q((d - ell) as i64, p as i64 - 1));
                }
            }
        }
    }

    #[test]
    fn audits() {
        let r = minimal_weight_audit(&[2], 5, 1).unwrap();
        assert!(r.passes, "{r:?}");
        assert_eq!(r.min_weight, 4);
        let r = minimal_weight_audit(&[2, 2], 5, 2).unwrap();
        assert!(r.passes, "{r:?}");
        assert_eq!(r.rows, [(1, 1), (2, 1)]);
        assert!(r.diagonal_only);
        for (orders, p, k) in [(&[3usize][..], 5u64, 2usize), (&[3], 7, 2), (&[2], 3, 2), (&[2, 2], 3, 3)] {
            let r = minimal_weight_audit(orders, p, k).unwrap();
            assert!(r.passes, "{orders:?} p={p} k={k}: {r:?}");
        }
    }
}
