//! Seeded sampling experiments: vertex bounds and convergence to the Hodge
//! polygon along primes, and a probe of the explicit non-generic point.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dworksym::vertex_data;
use crate::error::{Error, Result};
use crate::ff::Budget;
use crate::lfun::{l_function, np_of_l};
use crate::nt::{gcd, qi, Q};
use crate::polygon::{hodge_polygon, max_gap, Polygon};
use crate::ratfun::{default_poles, reduce_mod_p, Pole, RationalFunction};

/// Resampling cap when a sample has bad reduction.
pub const MAX_ATTEMPTS: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentSpec {
    pub ell: usize,
    pub orders: Vec<usize>,
    /// Coefficients are `n/m` with `|n|, m <= height`.
    pub height: u64,
    pub seed: u64,
    pub samples: usize,
    pub primes: Vec<u64>,
    /// `None` uses the default pole placement.
    pub poles: Option<Vec<Pole>>,
}

impl ExperimentSpec {
    pub fn new(orders: &[usize], primes: Vec<u64>, samples: usize, seed: u64) -> ExperimentSpec {
        ExperimentSpec {
            ell: orders.len(),
            orders: orders.to_vec(),
            height: 20,
            seed,
            samples,
            primes,
            poles: None,
        }
    }

    pub fn degree(&self) -> usize {
        self.orders.iter().sum::<usize>() + self.ell - 2
    }

    /// Primes at which every `d_j` is invertible.
    pub fn admissible(&self, p: u64) -> bool {
        crate::nt::is_prime(p) && self.orders.iter().all(|&d| gcd(p, d as u64) == 1)
    }
}

fn stream(seed: u64, sample: u64, attempt: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample.wrapping_mul(MAX_ATTEMPTS + 1).wrapping_add(attempt));
    rng
}

fn random_rational(rng: &mut ChaCha8Rng, height: u64, nonzero: bool) -> Q {
    let h = height as i64;
    loop {
        let n = rng.gen_range(-h..=h);
        let m = rng.gen_range(1..=h);
        if !nonzero || n != 0 {
            return Q::new(BigInt::from(n), BigInt::from(m));
        }
    }
}

/// Sample `sample` of the family, redrawn until it has good reduction at `p`.
/// The draw depends only on `(seed, sample, attempt)`.
pub fn sample_function(spec: &ExperimentSpec, sample: usize, p: u64) -> Result<(RationalFunction, u64)> {
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = stream(spec.seed, sample as u64, attempt);
        let table: Vec<Vec<Q>> = spec
            .orders
            .iter()
            .map(|&d| {
                (1..=d)
                    .map(|i| random_rational(&mut rng, spec.height, i == d))
                    .collect()
            })
            .collect();
        let f = RationalFunction::from_table(spec.poles.clone(), table)?;
        if f.is_good_prime(p) {
            return Ok((f, attempt));
        }
    }
    Err(Error::InvalidParameter(format!(
        "no good sample at p = {p} after {MAX_ATTEMPTS} attempts"
    )))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexRow {
    pub p: u64,
    pub sample: usize,
    pub k: usize,
    pub np_k: Q,
    pub c0: Q,
    /// `s_0/(p-1)`.
    pub upper: Q,
    pub within: bool,
    pub attained: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleRow {
    pub p: u64,
    pub sample: usize,
    pub attempts: u64,
    pub coincide: bool,
    pub max_gap: Q,
    pub np: Polygon,
    /// Violates a vertex bound; labelled after the fact.
    pub non_generic: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceTable {
    pub spec: ExperimentSpec,
    pub hodge: Polygon,
    /// HP vertices `1 <= k <= d - ℓ`.
    pub vertices: Vec<usize>,
    pub samples: Vec<SampleRow>,
    pub rows: Vec<VertexRow>,
}

impl ConvergenceTable {
    pub fn non_generic_count(&self) -> usize {
        self.samples.iter().filter(|s| s.non_generic).count()
    }

    pub fn attained_count(&self) -> usize {
        self.rows.iter().filter(|r| r.attained).count()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("p,sample,k,np_num,np_den,c0_num,c0_den,upper_num,upper_den,within,attained\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.p,
                r.sample,
                r.k,
                r.np_k.numer(),
                r.np_k.denom(),
                r.c0.numer(),
                r.c0.denom(),
                r.upper.numer(),
                r.upper.denom(),
                r.within,
                r.attained
            );
        }
        s
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "# Convergence: ℓ = {}, orders {:?}, seed {}, {} samples per prime\n",
            self.spec.ell, self.spec.orders, self.spec.seed, self.spec.samples
        );
        let _ = writeln!(s, "Hodge polygon: {:?}\n", self.hodge);
        let _ = writeln!(s, "| p | samples | NP = HP | max gap (worst) | non-generic |");
        let _ = writeln!(s, "|---|---|---|---|---|");
        let mut by_p: BTreeMap<u64, Vec<&SampleRow>> = BTreeMap::new();
        for r in &self.samples {
            by_p.entry(r.p).or_default().push(r);
        }
        for (p, rows) in &by_p {
            let worst = rows.iter().map(|r| r.max_gap.clone()).max().unwrap_or_else(Q::zero);
            let _ = writeln!(
                s,
                "| {p} | {} | {} | {worst} | {} |",
                rows.len(),
                rows.iter().filter(|r| r.coincide).count(),
                rows.iter().filter(|r| r.non_generic).count()
            );
        }
        if !self.vertices.is_empty() {
            let _ = writeln!(s, "\n| p | k | c_0 | s_0/(p-1) | NP_k values | attained |");
            let _ = writeln!(s, "|---|---|---|---|---|---|");
            let mut by_pk: BTreeMap<(u64, usize), Vec<&VertexRow>> = BTreeMap::new();
            for r in &self.rows {
                by_pk.entry((r.p, r.k)).or_default().push(r);
            }
            for ((p, k), rows) in &by_pk {
                let mut vals: Vec<Q> = rows.iter().map(|r| r.np_k.clone()).collect();
                vals.sort();
                vals.dedup();
                let list: Vec<String> = vals.iter().map(|v| format!("{v}")).collect();
                let _ = writeln!(
                    s,
                    "| {p} | {k} | {} | {} | {} | {}/{} |",
                    rows[0].c0,
                    rows[0].upper,
                    list.join(", "),
                    rows.iter().filter(|r| r.attained).count(),
                    rows.len()
                );
            }
        }
        let _ = writeln!(
            s,
            "\nNon-generic samples: {}. Upper bound attained in {} of {} vertex rows.",
            self.non_generic_count(),
            self.attained_count(),
            self.rows.len()
        );
        s
    }
}

/// HP vertices `1 <= k <= d - ℓ`.
pub fn tracked_vertices(ell: usize, orders: &[usize]) -> Result<Vec<usize>> {
    let hp = hodge_polygon(ell, orders)?;
    let d = orders.iter().sum::<usize>() + ell - 2;
    Ok((1..=d.saturating_sub(ell)).filter(|&k| hp.is_vertex(&qi(k as i64))).collect())
}

/// For every admissible prime and sample: the Newton polygon, its gap to the
/// Hodge polygon, and `c_0 <= NP_k <= s_0/(p-1)` at the tracked vertices.
pub fn run_convergence(spec: &ExperimentSpec, budget: &Budget) -> Result<ConvergenceTable> {
    let hodge = hodge_polygon(spec.ell, &spec.orders)?;
    let vertices = tracked_vertices(spec.ell, &spec.orders)?;
    let mut samples = Vec::new();
    let mut rows = Vec::new();
    for &p in &spec.primes {
        if !spec.admissible(p) {
            continue;
        }
        let data: Vec<_> = vertices
            .iter()
            .map(|&k| vertex_data(spec.ell, &spec.orders, k, p))
            .collect::<Result<_>>()?;
        for s in 0..spec.samples {
            let (f, attempts) = sample_function(spec, s, p)?;
            let np = np_of_l(&l_function(&reduce_mod_p(&f, p, 1)?, budget)?);
            let gap = max_gap(&np, &hodge)?;
            let mut non_generic = false;
            for v in &data {
                let kq = qi(v.k as i64);
                let np_k = np.eval(&kq).expect("vertex inside the polygon");
                let upper = &v.s0 / qi(p as i64 - 1);
                let within = v.c0 <= np_k && np_k <= upper;
                non_generic |= !within;
                rows.push(VertexRow {
                    p,
                    sample: s,
                    k: v.k,
                    attained: np_k == upper,
                    np_k,
                    c0: v.c0.clone(),
                    upper,
                    within,
                });
            }
            samples.push(SampleRow {
                p,
                sample: s,
                attempts,
                coincide: np == hodge,
                max_gap: gap,
                np,
                non_generic,
            });
        }
    }
    Ok(ConvergenceTable {
        spec: spec.clone(),
        hodge,
        vertices,
        samples,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeReport {
    pub p: u64,
    pub vertices: Vec<usize>,
    /// `x^{d_1} + Σ_{j>=2} (x - P_j)^{-d_j}`.
    pub special: RationalFunction,
    pub special_np: Polygon,
    /// Most frequent sampled polygon, ties to the earliest drawn.
    pub mode_np: Polygon,
    pub mode_count: usize,
    pub samples: usize,
    pub differs: bool,
    pub special_equals_hodge: bool,
}

impl ProbeReport {
    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# Non-generic probe at p = {}\n", self.p);
        let _ = writeln!(s, "Special point: {}\n", self.special.describe());
        if self.vertices.is_empty() {
            let _ = writeln!(s, "The slope-<1 part has no interior vertex; nothing to compare.");
            return s;
        }
        let _ = writeln!(s, "- NP of the special point: {:?}", self.special_np);
        let _ = writeln!(s, "- sampled mode ({}/{}): {:?}", self.mode_count, self.samples, self.mode_np);
        let _ = writeln!(s, "- differs from the mode: {}", self.differs);
        let _ = writeln!(s, "- special point has NP = HP: {}", self.special_equals_hodge);
        s
    }
}

/// NP of the explicit non-generic point against the sampled mode.
pub fn run_nongeneric_probe(spec: &ExperimentSpec, p: u64, budget: &Budget) -> Result<ProbeReport> {
    let table: Vec<Vec<Q>> = spec
        .orders
        .iter()
        .map(|&d| {
            let mut row = vec![Q::zero(); d];
            row[d - 1] = qi(1);
            row
        })
        .collect();
    let special = RationalFunction::from_table(Some(spec.poles.clone().unwrap_or_else(|| default_poles(spec.ell))), table)?;
    let vertices = tracked_vertices(spec.ell, &spec.orders)?;
    let hodge = hodge_polygon(spec.ell, &spec.orders)?;
    let special_np = np_of_l(&l_function(&reduce_mod_p(&special, p, 1)?, budget)?);
    let mut counts: Vec<(Polygon, usize)> = Vec::new();
    for s in 0..spec.samples {
        let (f, _) = sample_function(spec, s, p)?;
        let np = np_of_l(&l_function(&reduce_mod_p(&f, p, 1)?, budget)?);
        match counts.iter_mut().find(|(q, _)| q == &np) {
            Some(slot) => slot.1 += 1,
            None => counts.push((np, 1)),
        }
    }
    let (mode_np, mode_count) = counts
        .iter()
        .fold(None::<&(Polygon, usize)>, |best, c| match best {
            Some(b) if b.1 >= c.1 => Some(b),
            _ => Some(c),
        })
        .cloned()
        .ok_or(Error::EmptyInput)?;
    Ok(ProbeReport {
        p,
        differs: !vertices.is_empty() && mode_np != special_np,
        special_equals_hodge: special_np == hodge,
        vertices,
        special,
        special_np,
        mode_np,
        mode_count,
        samples: spec.samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nt::q;

    #[test]
    fn sampling_is_reproducible() {
        let spec = ExperimentSpec::new(&[3], vec![5], 4, 7);
        for s in 0..4 {
            assert_eq!(sample_function(&spec, s, 5).unwrap(), sample_function(&spec, s, 5).unwrap());
        }
        assert_ne!(sample_function(&spec, 0, 5).unwrap().0, sample_function(&spec, 1, 5).unwrap().0);
        let (f, _) = sample_function(&spec, 2, 5).unwrap();
        assert!(f.is_good_prime(5));
    }

    #[test]
    fn cubic_family() {
        let budget = Budget::default();
        let spec = ExperimentSpec::new(&[3], vec![5, 7], 6, 1);
        let t = run_convergence(&spec, &budget).unwrap();
        assert_eq!(t, run_convergence(&spec, &budget).unwrap());
        assert_eq!(t.vertices, [1]);
        assert_eq!(t.non_generic_count(), 0);
        for r in &t.rows {
            if r.p == 5 {
                assert!(r.np_k >= q(1, 3) && r.np_k <= q(1, 2));
                assert_eq!(r.upper, q(6, 12));
            } else {
                assert_eq!(r.np_k, q(1, 3));
            }
        }
        assert!(t.to_csv().starts_with("p,sample,k,"));
        assert!(t.to_markdown().contains("| 7 | 6 | 6 |"));
    }

    #[test]
    fn probes() {
        let budget = Budget::default();
        let spec = ExperimentSpec::new(&[3], vec![5], 6, 3);
        let r = run_nongeneric_probe(&spec, 5, &budget).unwrap();
        assert_eq!(r.vertices, [1]);
        assert_eq!(r.special_np.eval(&qi(1)), Some(q(1, 2)));
        let r = run_nongeneric_probe(&spec, 7, &budget).unwrap();
        assert!(r.special_equals_hodge);
        let spec = ExperimentSpec::new(&[1, 1], vec![5], 3, 3);
        let r = run_nongeneric_probe(&spec, 5, &budget).unwrap();
        assert!(r.vertices.is_empty() && !r.differs);
        assert!(r.to_markdown().contains("nothing to compare"));
    }
}
