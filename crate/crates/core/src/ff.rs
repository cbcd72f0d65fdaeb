//! Finite fields `F_{p^m}` over a deterministic modulus, with a compatible
//! system of embeddings between them.
//!
//! The modulus of `F_{p^m}` is the monic irreducible `x^m + Σ c_i x^i` with the
//! smallest index `Σ c_i p^i`. Elements are coefficient vectors over `F_p` in
//! the basis `1, t, ..., t^{m-1}`; the same index orders them canonically.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::nt::{inv_mod_prime, is_prime, prime_factors};

/// Largest supported extension degree.
pub const MAX_DEGREE: usize = 24;

/// Default cap on the number of elements a single enumeration may visit.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_elements: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_elements: DEFAULT_BUDGET,
        }
    }
}

impl Budget {
    pub fn new(max_elements: u64) -> Budget {
        Budget { max_elements }
    }

    pub fn check(&self, size: u128) -> Result<()> {
        if size > self.max_elements as u128 {
            Err(Error::BudgetExceeded {
                size,
                budget: self.max_elements,
            })
        } else {
            Ok(())
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElt {
    c: [u32; MAX_DEGREE],
}

impl FieldElt {
    pub const ZERO: FieldElt = FieldElt { c: [0; MAX_DEGREE] };

    pub fn coeff(&self, i: usize) -> u32 {
        self.c[i]
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    /// True when the element lies in the prime field.
    pub fn is_constant(&self) -> bool {
        self.c[1..].iter().all(|&x| x == 0)
    }
}

impl fmt::Debug for FieldElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.c.iter().rposition(|&x| x != 0).unwrap_or(0);
        f.debug_list().entries(&self.c[..=last]).finish()
    }
}

/// Dense polynomials over `F_p`, lowest degree first, trimmed.
mod fp {
    use alloc::vec;
    use alloc::vec::Vec;

    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        let mut out = out;
        trim(&mut out);
        out
    }

    /// Quotient and remainder; `b` must be nonzero.
    pub fn divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lead_inv = crate::nt::inv_mod_prime(b[db], p).unwrap();
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let mut quo = vec![0u64; r.len() - db];
        while r.len() >= b.len() {
            let dr = r.len() - 1;
            let t = r[dr] * lead_inv % p;
            quo[dr - db] = t;
            for (i, &bi) in b.iter().enumerate() {
                let k = dr - db + i;
                r[k] = (r[k] + (p - bi) * t) % p;
            }
            trim(&mut r);
        }
        trim(&mut quo);
        (quo, r)
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut out: Vec<u64> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut out);
        out
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let (_, r) = divrem(&x, &y, p);
            x = y;
            y = r;
        }
        x
    }

    pub fn powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = divrem(base, m, p).1;
        while e > 0 {
            if e & 1 == 1 {
                acc = divrem(&mul(&acc, &b, p), m, p).1;
            }
            e >>= 1;
            if e > 0 {
                b = divrem(&mul(&b, &b, p), m, p).1;
            }
        }
        acc
    }

    /// Rabin's test for a monic polynomial `f` of degree `m`.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let m = f.len() - 1;
        let x = vec![0u64, 1];
        // frob[i] = x^{p^i} mod f
        let mut frob = Vec::with_capacity(m + 1);
        frob.push(divrem(&x, f, p).1);
        for i in 0..m {
            let next = powmod(&frob[i], p, f, p);
            frob.push(next);
        }
        if sub(&frob[m], &frob[0], p).iter().any(|&c| c != 0) {
            return false;
        }
        for r in crate::nt::prime_factors(m as u64) {
            let h = sub(&frob[m / r as usize], &frob[0], p);
            let g = gcd(f, &h, p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct FiniteField {
    p: u32,
    m: usize,
    /// Monic, `m + 1` coefficients, lowest degree first.
    modulus: Vec<u32>,
    /// `Tr(t^i)` for `0 <= i < m`.
    trace_basis: Vec<u32>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{} mod {:?}", self.p, self.m, self.modulus)
    }
}

/// Builds `F_{p^m}` over its canonical modulus.
pub fn make_field(p: u64, m: usize) -> Result<FiniteField> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p >= 1 << 31 {
        return Err(Error::InvalidParameter(alloc::format!("prime {p} is too large")));
    }
    if m == 0 || m > MAX_DEGREE {
        return Err(Error::InvalidParameter(alloc::format!(
            "extension degree {m} outside 1..={MAX_DEGREE}"
        )));
    }
    let mut digits = vec![0u64; m];
    loop {
        let mut f = digits.clone();
        f.push(1);
        if fp::is_irreducible(&f, p) {
            let modulus = f.iter().map(|&c| c as u32).collect();
            let mut field = FiniteField {
                p: p as u32,
                m,
                modulus,
                trace_basis: Vec::new(),
            };
            field.trace_basis = field.compute_trace_basis()?;
            return Ok(field);
        }
        // next candidate in index order
        let mut i = 0;
        loop {
            if i == m {
                return Err(Error::Assertion(alloc::format!(
                    "no irreducible polynomial of degree {m} over F_{p}"
                )));
            }
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

impl FiniteField {
    pub fn p(&self) -> u64 {
        self.p as u64
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.m as u32)
    }

    pub fn zero(&self) -> FieldElt {
        FieldElt::ZERO
    }

    pub fn one(&self) -> FieldElt {
        self.constant(1)
    }

    pub fn constant(&self, c: u64) -> FieldElt {
        let mut e = FieldElt::ZERO;
        e.c[0] = (c % self.p as u64) as u32;
        e
    }

    /// The class of `t`; for the prime field (modulus `x`) this is 0.
    pub fn generator(&self) -> FieldElt {
        if self.m == 1 {
            return self.constant(self.p as u64 - self.modulus[0] as u64);
        }
        let mut e = FieldElt::ZERO;
        e.c[1] = 1;
        e
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElt> {
        if coeffs.len() > self.m {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{} coefficients for a degree-{} field",
                coeffs.len(),
                self.m
            )));
        }
        let mut e = FieldElt::ZERO;
        for (i, &c) in coeffs.iter().enumerate() {
            e.c[i] = (c % self.p as u64) as u32;
        }
        Ok(e)
    }

    pub fn coeffs(&self, x: &FieldElt) -> Vec<u64> {
        x.c[..self.m].iter().map(|&c| c as u64).collect()
    }

    /// Position of `x` in the canonical order: `Σ c_i p^i`.
    pub fn index(&self, x: &FieldElt) -> u128 {
        x.c[..self.m]
            .iter()
            .rev()
            .fold(0u128, |acc, &c| acc * self.p as u128 + c as u128)
    }

    pub fn element_at(&self, mut idx: u128) -> FieldElt {
        let mut e = FieldElt::ZERO;
        for i in 0..self.m {
            e.c[i] = (idx % self.p as u128) as u32;
            idx /= self.p as u128;
        }
        e
    }

    pub fn add(&self, a: &FieldElt, b: &FieldElt) -> FieldElt {
        let p = self.p;
        let mut e = FieldElt::ZERO;
        for i in 0..self.m {
            let s = a.c[i] + b.c[i];
            e.c[i] = if s >= p { s - p } else { s };
        }
        e
    }

    pub fn sub(&self, a: &FieldElt, b: &FieldElt) -> FieldElt {
        let p = self.p;
        let mut e = FieldElt::ZERO;
        for i in 0..self.m {
            e.c[i] = if a.c[i] >= b.c[i] { a.c[i] - b.c[i] } else { a.c[i] + p - b.c[i] };
        }
        e
    }

    pub fn neg(&self, a: &FieldElt) -> FieldElt {
        self.sub(&FieldElt::ZERO, a)
    }

    /// Multiplication by an element of the prime field.
    pub fn scale(&self, a: &FieldElt, c: u32) -> FieldElt {
        let p = self.p as u64;
        let mut e = FieldElt::ZERO;
        for i in 0..self.m {
            e.c[i] = (a.c[i] as u64 * c as u64 % p) as u32;
        }
        e
    }

    pub fn mul(&self, a: &FieldElt, b: &FieldElt) -> FieldElt {
        let p = self.p as u64;
        let m = self.m;
        if m == 1 {
            return self.constant(a.c[0] as u64 * b.c[0] as u64);
        }
        let mut t = [0u64; 2 * MAX_DEGREE];
        for i in 0..m {
            let x = a.c[i] as u64;
            if x == 0 {
                continue;
            }
            for j in 0..m {
                t[i + j] = (t[i + j] + x * b.c[j] as u64) % p;
            }
        }
        for k in (m..2 * m - 1).rev() {
            let top = t[k];
            if top == 0 {
                continue;
            }
            for i in 0..m {
                let mi = self.modulus[i] as u64;
                if mi != 0 {
                    t[k - m + i] = (t[k - m + i] + (p - mi) * top) % p;
                }
            }
        }
        let mut e = FieldElt::ZERO;
        for i in 0..m {
            e.c[i] = t[i] as u32;
        }
        e
    }

    pub fn pow(&self, a: &FieldElt, mut e: u128) -> FieldElt {
        let mut acc = self.one();
        let mut b = *a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        acc
    }

    pub fn frobenius(&self, a: &FieldElt) -> FieldElt {
        self.pow(a, self.p as u128)
    }

    /// Inverse by the extended Euclidean algorithm; `None` for zero.
    pub fn inv(&self, a: &FieldElt) -> Option<FieldElt> {
        if a.is_zero() {
            return None;
        }
        let p = self.p as u64;
        if self.m == 1 {
            return Some(self.constant(inv_mod_prime(a.c[0] as u64, p)?));
        }
        let mut r0: Vec<u64> = self.modulus.iter().map(|&c| c as u64).collect();
        let mut r1: Vec<u64> = self.coeffs(a);
        fp::trim(&mut r1);
        let mut s0: Vec<u64> = Vec::new();
        let mut s1: Vec<u64> = vec![1];
        while r1.len() > 1 {
            let (quo, rem) = fp::divrem(&r0, &r1, p);
            let s2 = fp::sub(&s0, &fp::mul(&quo, &s1, p), p);
            r0 = core::mem::replace(&mut r1, rem);
            s0 = core::mem::replace(&mut s1, s2);
        }
        let c = inv_mod_prime(r1[0], p)?;
        let mut e = FieldElt::ZERO;
        for (i, &x) in s1.iter().enumerate() {
            e.c[i] = (x * c % p) as u32;
        }
        Some(e)
    }

    pub fn div(&self, a: &FieldElt, b: &FieldElt) -> Option<FieldElt> {
        Some(self.mul(a, &self.inv(b)?))
    }

    fn compute_trace_basis(&self) -> Result<Vec<u32>> {
        let mut out = Vec::with_capacity(self.m);
        let mut power = self.one();
        let t = self.generator();
        for _ in 0..self.m {
            let mut acc = FieldElt::ZERO;
            let mut y = power;
            for _ in 0..self.m {
                acc = self.add(&acc, &y);
                y = self.frobenius(&y);
            }
            if !acc.is_constant() {
                return Err(Error::Assertion("trace left the prime field".into()));
            }
            out.push(acc.c[0]);
            power = self.mul(&power, &t);
        }
        Ok(out)
    }

    /// Absolute trace to `F_p`, computed from the traces of the basis.
    pub fn trace(&self, x: &FieldElt) -> u32 {
        let p = self.p as u64;
        let mut acc = 0u64;
        for i in 0..self.m {
            acc += x.c[i] as u64 * self.trace_basis[i] as u64 % p;
        }
        (acc % p) as u32
    }

    /// Trace as the literal sum of Frobenius conjugates.
    pub fn trace_by_conjugates(&self, x: &FieldElt) -> u32 {
        let mut acc = FieldElt::ZERO;
        let mut y = *x;
        for _ in 0..self.m {
            acc = self.add(&acc, &y);
            y = self.frobenius(&y);
        }
        acc.c[0]
    }

    pub fn enumerate(&self, budget: &Budget) -> Result<FieldIter<'_>> {
        budget.check(self.order())?;
        Ok(FieldIter {
            field: self,
            next: Some(FieldElt::ZERO),
        })
    }

    /// Evaluates the `F_p`-polynomial `coeffs` at `x`.
    pub fn eval_fp_poly(&self, coeffs: &[u64], x: &FieldElt) -> FieldElt {
        let mut acc = FieldElt::ZERO;
        for &c in coeffs.iter().rev() {
            acc = self.add(&self.mul(&acc, x), &self.constant(c));
        }
        acc
    }

    /// Image of `x` under the canonical embedding into `target`.
    pub fn embed(&self, x: &FieldElt, target: &FiniteField) -> Result<FieldElt> {
        Ok(embedding(self, target)?.apply(x))
    }
}

/// All elements in canonical order.
pub struct FieldIter<'a> {
    field: &'a FiniteField,
    next: Option<FieldElt>,
}

impl Iterator for FieldIter<'_> {
    type Item = FieldElt;

    fn next(&mut self) -> Option<FieldElt> {
        let cur = self.next?;
        let mut n = cur;
        let mut i = 0;
        loop {
            if i == self.field.m {
                self.next = None;
                break;
            }
            n.c[i] += 1;
            if n.c[i] < self.field.p {
                self.next = Some(n);
                break;
            }
            n.c[i] = 0;
            i += 1;
        }
        Some(cur)
    }
}

/// A field homomorphism `F_{p^a} -> F_{p^n}`, stored as the image of `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    source: FiniteField,
    target: FiniteField,
    image: FieldElt,
}

impl Embedding {
    pub fn source(&self) -> &FiniteField {
        &self.source
    }

    pub fn target(&self) -> &FiniteField {
        &self.target
    }

    pub fn image_of_generator(&self) -> FieldElt {
        self.image
    }

    pub fn apply(&self, x: &FieldElt) -> FieldElt {
        if x.is_constant() {
            return self.target.constant(x.c[0] as u64);
        }
        self.target.eval_fp_poly(&self.source.coeffs(x), &self.image)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Embedding) -> Result<Embedding> {
        if inner.target != self.source {
            return Err(Error::DimensionMismatch("embeddings do not compose".into()));
        }
        Ok(Embedding {
            source: inner.source.clone(),
            target: self.target.clone(),
            image: self.apply(&inner.image),
        })
    }
}

/// Basis of the fixed field of `x -> x^{p^b}` inside `field`.
fn subfield_basis(field: &FiniteField, b: usize) -> Vec<FieldElt> {
    let p = field.p as u64;
    let m = field.m;
    let e = (p as u128).pow(b as u32);
    // rows: coefficient index, cols: basis vector t^j; entries of Frob^b - id
    let mut a = vec![vec![0u64; m]; m];
    let t = field.generator();
    let mut tj = field.one();
    for j in 0..m {
        let img = field.sub(&field.pow(&tj, e), &tj);
        for (i, row) in a.iter_mut().enumerate() {
            row[j] = img.c[i] as u64;
        }
        tj = field.mul(&tj, &t);
    }
    // reduced row echelon form
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m {
        let Some(piv) = (r..m).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, piv);
        let inv = inv_mod_prime(a[r][c], p).unwrap();
        for x in a[r].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..m {
            if i != r && a[i][c] != 0 {
                let f = a[i][c];
                for k in 0..m {
                    a[i][k] = (a[i][k] + (p - f) * a[r][k]) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..m).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fcol| {
            let mut v = vec![0u64; m];
            v[fcol] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - a[row][fcol]) % p;
            }
            field.from_coeffs(&v).unwrap()
        })
        .collect()
}

/// Roots in `target` of the modulus of `F_{p^b}`, in canonical order.
fn modulus_roots(target: &FiniteField, b: usize) -> Result<Vec<FieldElt>> {
    let src = make_field(target.p as u64, b)?;
    let g: Vec<u64> = src.modulus.iter().map(|&c| c as u64).collect();
    let basis = subfield_basis(target, b);
    if basis.len() != b {
        return Err(Error::Assertion("subfield has the wrong dimension".into()));
    }
    let p = target.p as u64;
    let mut roots = Vec::new();
    let mut digits = vec![0u64; b];
    loop {
        let mut y = FieldElt::ZERO;
        for (d, v) in digits.iter().zip(&basis) {
            if *d != 0 {
                y = target.add(&y, &target.scale(v, *d as u32));
            }
        }
        if target.eval_fp_poly(&g, &y).is_zero() {
            roots.push(y);
        }
        let mut i = 0;
        loop {
            if i == b {
                roots.sort_by_key(|r| target.index(r));
                if roots.len() != b {
                    return Err(Error::Assertion("modulus does not split in the target".into()));
                }
                return Ok(roots);
            }
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// Memoizes the lattice of canonical embeddings for one prime.
struct Lattice {
    p: u64,
    fields: BTreeMap<usize, FiniteField>,
    maximal: BTreeMap<usize, Vec<(usize, FieldElt)>>,
}

impl Lattice {
    fn field(&mut self, n: usize) -> Result<FiniteField> {
        if let Some(f) = self.fields.get(&n) {
            return Ok(f.clone());
        }
        let f = make_field(self.p, n)?;
        self.fields.insert(n, f.clone());
        Ok(f)
    }

    /// Images in `F_{p^n}` of the generators of its maximal subfields
    /// `F_{p^{n/r}}`, chosen smallest-first subject to agreement on every
    /// pairwise intersection.
    fn maximal_roots(&mut self, n: usize) -> Result<Vec<(usize, FieldElt)>> {
        if let Some(r) = self.maximal.get(&n) {
            return Ok(r.clone());
        }
        let target = self.field(n)?;
        let mut chosen: Vec<(usize, FieldElt)> = Vec::new();
        for r in prime_factors(n as u64) {
            let b = n / r as usize;
            let candidates = modulus_roots(&target, b)?;
            let mut pick = None;
            'cand: for rho in candidates {
                for &(bi, rho_i) in &chosen {
                    let c = crate::nt::gcd(bi as u64, b as u64) as usize;
                    if c == 1 {
                        continue;
                    }
                    let via_i = self.generator_image(c, bi)?;
                    let via_j = self.generator_image(c, b)?;
                    let fi = self.field(bi)?;
                    let fj = self.field(b)?;
                    let lhs = target.eval_fp_poly(&fi.coeffs(&via_i), &rho_i);
                    let rhs = target.eval_fp_poly(&fj.coeffs(&via_j), &rho);
                    if lhs != rhs {
                        continue 'cand;
                    }
                }
                pick = Some(rho);
                break;
            }
            let rho = pick.ok_or_else(|| Error::Assertion("no compatible embedding".into()))?;
            chosen.push((b, rho));
        }
        self.maximal.insert(n, chosen.clone());
        Ok(chosen)
    }

    /// Image of the generator of `F_{p^a}` in `F_{p^n}`.
    fn generator_image(&mut self, a: usize, n: usize) -> Result<FieldElt> {
        let target = self.field(n)?;
        if a == n {
            return Ok(target.generator());
        }
        if a == 1 {
            return Ok(target.zero());
        }
        for (b, rho) in self.maximal_roots(n)? {
            if b % a == 0 {
                let inner = self.generator_image(a, b)?;
                let fb = self.field(b)?;
                return Ok(target.eval_fp_poly(&fb.coeffs(&inner), &rho));
            }
        }
        Err(Error::Assertion("no maximal subfield contains the source".into()))
    }
}

/// The canonical embedding `source -> target`.
pub fn embedding(source: &FiniteField, target: &FiniteField) -> Result<Embedding> {
    if source.p != target.p {
        return Err(Error::MismatchedPrime(source.p as u64, target.p as u64));
    }
    if target.m % source.m != 0 {
        return Err(Error::DegreeMismatch {
            source_degree: source.m,
            target_degree: target.m,
        });
    }
    let mut lattice = Lattice {
        p: source.p as u64,
        fields: BTreeMap::new(),
        maximal: BTreeMap::new(),
    };
    lattice.fields.insert(source.m, source.clone());
    lattice.fields.insert(target.m, target.clone());
    let image = lattice.generator_image(source.m, target.m)?;
    Ok(Embedding {
        source: source.clone(),
        target: target.clone(),
        image,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_moduli() {
        assert_eq!(make_field(3, 1).unwrap().modulus(), &[0, 1]);
        assert_eq!(make_field(3, 2).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(make_field(2, 2).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(make_field(2, 3).unwrap().modulus(), &[1, 1, 0, 1]);
        assert_eq!(make_field(4, 1), Err(Error::NotPrime(4)));
    }

    #[test]
    fn quadratic_irreducible_by_exhaustion() {
        // Oracle: x^2 + bx + c is irreducible over F_p iff it has no root.
        let p = 5u64;
        let f = make_field(p, 2).unwrap();
        let first = (0..p * p)
            .find(|&idx| {
                let (c, b) = (idx % p, idx / p);
                (0..p).all(|x| (x * x + b * x + c) % p != 0)
            })
            .unwrap();
        assert_eq!(f.modulus(), &[(first % p) as u32, (first / p) as u32, 1]);
    }

    #[test]
    fn enumeration() {
        let f3 = make_field(3, 1).unwrap();
        let all: Vec<u128> = f3.enumerate(&Budget::default()).unwrap().map(|x| f3.index(&x)).collect();
        assert_eq!(all, [0, 1, 2]);
        let f9 = make_field(3, 2).unwrap();
        assert_eq!(f9.enumerate(&Budget::default()).unwrap().count(), 9);
        let f125 = make_field(5, 3).unwrap();
        let mut seen: Vec<u128> = f125.enumerate(&Budget::default()).unwrap().map(|x| f125.index(&x)).collect();
        seen.dedup();
        assert_eq!(seen.len(), 125);
        assert!(matches!(f125.enumerate(&Budget::new(100)), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn traces() {
        let f9 = make_field(3, 2).unwrap();
        assert_eq!(f9.trace(&f9.one()), 2);
        let zeros = f9.enumerate(&Budget::default()).unwrap().filter(|x| f9.trace(x) == 0).count();
        assert_eq!(zeros, 3);
        for x in f9.enumerate(&Budget::default()).unwrap() {
            assert_eq!(f9.trace(&x), f9.trace_by_conjugates(&x));
        }
    }

    #[test]
    fn inverses() {
        for (p, m) in [(2, 4), (3, 3), (7, 2), (13, 1)] {
            let f = make_field(p, m).unwrap();
            for x in f.enumerate(&Budget::default()).unwrap().skip(1) {
                assert_eq!(f.mul(&x, &f.inv(&x).unwrap()), f.one());
            }
            assert_eq!(f.inv(&f.zero()), None);
        }
    }

    #[test]
    fn constants_land_on_frobenius_fixed_points() {
        let f3 = make_field(3, 1).unwrap();
        let f9 = make_field(3, 2).unwrap();
        let mut fixed: Vec<FieldElt> = f9
            .enumerate(&Budget::default())
            .unwrap()
            .filter(|x| f9.pow(x, 3) == *x)
            .collect();
        fixed.sort_by_key(|x| f9.index(x));
        let mut images: Vec<FieldElt> = f3
            .enumerate(&Budget::default())
            .unwrap()
            .map(|c| f3.embed(&c, &f9).unwrap())
            .collect();
        images.sort_by_key(|x| f9.index(x));
        assert_eq!(images, fixed);
    }

    #[test]
    fn tower_equals_direct() {
        for (p, a, b, n) in [(2, 2, 4, 8), (2, 2, 6, 12), (3, 1, 2, 6), (3, 2, 6, 6), (2, 3, 6, 12), (5, 2, 4, 4)] {
            let fa = make_field(p, a).unwrap();
            let fb = make_field(p, b).unwrap();
            let fnn = make_field(p, n).unwrap();
            let direct = embedding(&fa, &fnn).unwrap();
            let tower = embedding(&fb, &fnn).unwrap().compose(&embedding(&fa, &fb).unwrap()).unwrap();
            assert_eq!(direct, tower, "p={p} {a}->{b}->{n}");
            // the image of t is a root of the source modulus
            let g: Vec<u64> = fa.modulus().iter().map(|&c| c as u64).collect();
            assert!(fnn.eval_fp_poly(&g, &direct.image_of_generator()).is_zero());
        }
        let f4 = make_field(2, 2).unwrap();
        let f8 = make_field(2, 3).unwrap();
        assert!(matches!(embedding(&f4, &f8), Err(Error::DegreeMismatch { .. })));
    }
}
