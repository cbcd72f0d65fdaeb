use ascover_core::arith::{CycloElt, OrdValue};
use ascover_core::dworkmat::block_identity_check;
use ascover_core::experiments::{sample_function, ExperimentSpec};
use ascover_core::ff::{embedding, make_field};
use ascover_core::linalg::Matrix;
use ascover_core::nt::{q, Q};
use ascover_core::padic::teichmuller_int;
use ascover_core::polygon::{hodge_slopes, lies_above, lower_hull_heights, Polygon};
use ascover_core::ring::Rationals;
use num_bigint::BigInt;
use proptest::prelude::*;

const PRIMES: &[u64] = &[2, 3, 5, 7];

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(PRIMES)
}

fn small_q() -> impl Strategy<Value = Q> {
    (-9i64..=9, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

fn cyclo(p: u64) -> impl Strategy<Value = CycloElt> {
    prop::collection::vec(small_q(), (p - 1) as usize).prop_map(move |c| CycloElt::from_coeffs(p, c).unwrap())
}

fn cyclo_pair() -> impl Strategy<Value = (CycloElt, CycloElt)> {
    prime().prop_flat_map(|p| (cyclo(p), cyclo(p)))
}

fn ord_le(a: &OrdValue, b: &OrdValue) -> bool {
    match (a, b) {
        (_, OrdValue::Infinity) => true,
        (OrdValue::Infinity, _) => false,
        (OrdValue::Finite(x), OrdValue::Finite(y)) => x <= y,
    }
}

/// Polygons of width 4 from random heights.
fn polygon() -> impl Strategy<Value = Polygon> {
    prop::collection::vec(-6i64..=6, 4).prop_map(|h| {
        let mut hs = vec![Some(q(0, 1))];
        hs.extend(h.into_iter().map(|x| Some(q(x, 2))));
        lower_hull_heights(&hs).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn valuation_is_additive((x, y) in cyclo_pair()) {
        prop_assert_eq!(x.mul(&y).valuation(), x.valuation().add(&y.valuation()));
    }

    #[test]
    fn valuation_is_ultrametric((x, y) in cyclo_pair()) {
        let (vx, vy) = (x.valuation(), y.valuation());
        let lo = if ord_le(&vx, &vy) { vx } else { vy };
        prop_assert!(ord_le(&lo, &x.add(&y).valuation()));
    }

    #[test]
    fn norm_is_multiplicative((x, y) in cyclo_pair()) {
        prop_assert_eq!(x.mul(&y).norm(), x.norm() * y.norm());
    }

    #[test]
    fn lies_above_is_a_partial_order(a in polygon(), b in polygon(), c in polygon()) {
        prop_assert!(lies_above(&a, &a).unwrap());
        if lies_above(&a, &b).unwrap() && lies_above(&b, &a).unwrap() {
            prop_assert_eq!(&a, &b);
        }
        if lies_above(&a, &b).unwrap() && lies_above(&b, &c).unwrap() {
            prop_assert!(lies_above(&a, &c).unwrap());
        }
    }

    #[test]
    fn hull_of_a_hull_is_itself(a in polygon()) {
        let hs: Vec<Option<Q>> = (0..=4).map(|x| a.eval(&q(x, 1))).collect();
        prop_assert_eq!(lower_hull_heights(&hs).unwrap(), a);
    }

    #[test]
    fn hodge_slopes_are_symmetric(orders in prop::collection::vec(1usize..=5, 1..=3)) {
        prop_assume!(orders.len() > 1 || orders[0] >= 2);
        let s = hodge_slopes(orders.len(), &orders).unwrap();
        prop_assert_eq!(s.reflected(), s);
    }

    #[test]
    fn trace_is_linear(p in prime(), m in 1usize..=4, x in prop::collection::vec(0u64..7, 4), y in prop::collection::vec(0u64..7, 4), a in 0u64..7, b in 0u64..7) {
        let f = make_field(p, m).unwrap();
        let red = |v: &[u64]| f.from_coeffs(&v[..m].iter().map(|c| c % p).collect::<Vec<_>>()).unwrap();
        let (x, y) = (red(&x), red(&y));
        let (a, b) = ((a % p) as u32, (b % p) as u32);
        let lhs = f.trace(&f.add(&f.scale(&x, a), &f.scale(&y, b)));
        let rhs = (a as u64 * f.trace(&x) as u64 + b as u64 * f.trace(&y) as u64) % p;
        prop_assert_eq!(lhs as u64, rhs);
        prop_assert_eq!(f.trace(&x), f.trace_by_conjugates(&x));
    }

    #[test]
    fn embeddings_are_ring_maps(p in prime(), idx in any::<u64>(), jdx in any::<u64>()) {
        let small = make_field(p, 2).unwrap();
        let big = make_field(p, 4).unwrap();
        let e = embedding(&small, &big).unwrap();
        let n = (p * p) as u128;
        let x = small.element_at(idx as u128 % n);
        let y = small.element_at(jdx as u128 % n);
        prop_assert_eq!(e.apply(&small.mul(&x, &y)), big.mul(&e.apply(&x), &e.apply(&y)));
        prop_assert_eq!(e.apply(&small.add(&x, &y)), big.add(&e.apply(&x), &e.apply(&y)));
        // Tr down the tower: [F_{p^4} : F_{p^2}] = 2
        prop_assert_eq!(big.trace(&e.apply(&x)) as u64, 2 * small.trace(&x) as u64 % p);
    }

    #[test]
    fn teichmuller_is_multiplicative(p in prime(), x in 0u64..50, y in 0u64..50, n in 1u32..6) {
        let m = BigInt::from(p).pow(n);
        let tx = teichmuller_int(x, p, n);
        let ty = teichmuller_int(y, p, n);
        let txy = teichmuller_int(x * y, p, n);
        let diff = (&tx * &ty - &txy) % &m;
        prop_assert_eq!(diff, BigInt::from(0));
        // a root of x^p = x lifting x mod p
        prop_assert_eq!((tx.modpow(&BigInt::from(p), &m) - &tx) % &m, BigInt::from(0));
        prop_assert_eq!((&tx - BigInt::from(x)) % BigInt::from(p), BigInt::from(0));
    }

    #[test]
    fn block_identity_holds(n in 1usize..=3, entries in prop::collection::vec(small_q(), 36), a in 1usize..=4) {
        let ms: Vec<Matrix<Q>> = (0..a)
            .map(|t| Matrix::new(n, n, entries[t * 9..t * 9 + n * n].to_vec()).unwrap())
            .collect();
        prop_assert!(block_identity_check(&Rationals, &ms).unwrap());
    }

    #[test]
    fn sampling_is_seeded(seed in any::<u64>(), sample in 0usize..20) {
        let spec = ExperimentSpec::new(&[3], vec![5], 1, seed);
        prop_assert_eq!(sample_function(&spec, sample, 5).unwrap(), sample_function(&spec, sample, 5).unwrap());
    }
}
