//! The Ising specialization: table substitution, the fixed-point map's invariant ball and
//! contraction, and the zero-field cases.

mod support;

use std::collections::BTreeMap;

use padic_gibbs::ising::{
    fixed_point_map, homogeneous_fixed_point, ising_gibbs_report, ising_lambda, lambda_spec, Coupling,
    ExternalField, IsingSpec,
};
use padic_gibbs::model::{check_family, Normalization};
use padic_gibbs::padic::Order;
use padic_gibbs::recursion::BoundaryField;
use padic_gibbs::{Padic, TreeAddress, TreeSlice};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::random_padic;

const PRECISION: u32 = 32;

/// `J` with `|4J|_2 <= 1/16` when `p = 2`, else in the domain, and a domain `eta`.
fn spec(rng: &mut ChaCha8Rng, p: u32) -> IsingSpec {
    let j_floor = if p == 2 { 2 } else { 1 };
    let v = rng.gen_range(j_floor..=j_floor + 2);
    let j = random_padic(rng, p, v, PRECISION);
    let eta = support::fields::admissible(rng, p, PRECISION);
    IsingSpec::homogeneous(j, eta).unwrap()
}

/// A point with `|x - 1|_p <= r`, where `r = 1/p`, or `1/4` for `p = 2`.
fn near_one(rng: &mut ChaCha8Rng, p: u32) -> Padic {
    let lo = if p == 2 { 2 } else { 1 };
    let one = Padic::one(p as u64, PRECISION).unwrap();
    if rng.gen_ratio(1, 8) {
        return one;
    }
    let v = rng.gen_range(lo..=lo + 3);
    &one + &random_padic(rng, p, v, PRECISION)
}

fn primes() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![2u32, 3, 5])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn map_stays_near_one_and_contracts(p in primes(), k in 1u32..=3, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = fixed_point_map(&spec(&mut rng, p), k).unwrap();
        let one = Padic::one(p as u64, PRECISION).unwrap();
        let (x, y) = (near_one(&mut rng, p), near_one(&mut rng, p));
        let (fx, fy) = (f.apply(&x).unwrap(), f.apply(&y).unwrap());
        prop_assert!(fx.distance_order(&one).unwrap().at_least(1));
        if let Order::Exact(d) = x.distance_order(&y).unwrap() {
            prop_assert!(fx.distance_order(&fy).unwrap().at_least(d + 1));
        }
    }

    #[test]
    fn iteration_and_newton_agree(p in primes(), k in 1u32..=3, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fp = homogeneous_fixed_point(&spec(&mut rng, p), k).unwrap();
        let (a, b) = (fp.zeta.digits(), fp.solve.hensel_z.digits());
        let common = a.len().min(b.len());
        prop_assert!(common >= PRECISION as usize - 2);
        prop_assert_eq!(&a[..common], &b[..common]);
        prop_assert!(fp.map.apply(&fp.zeta).unwrap().agrees_with(&fp.zeta));
    }

    #[test]
    fn cross_combination_is_four_j(p in primes(), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = spec(&mut rng, p);
        let Coupling::Homogeneous(j) = spec.coupling().clone() else { unreachable!() };
        let t = ising_lambda(&spec, &TreeAddress::from_path(vec![1])).unwrap();
        prop_assert!(t.cross_combination().agrees_with(&j.mul_int(4)));
    }
}

#[test]
fn zero_field_fixes_one() {
    for p in [2u64, 3, 5, 7] {
        for k in 1..=3 {
            let j = Padic::from_integer(if p == 2 { 4 } else { p as i64 }, p, PRECISION).unwrap();
            let spec = IsingSpec::homogeneous(j, Padic::zero(p, PRECISION).unwrap()).unwrap();
            let fp = homogeneous_fixed_point(&spec, k).unwrap();
            assert!(fp.zeta.agrees_with(&Padic::one(p, PRECISION).unwrap()));
            assert!(fp.h_star.is_negligible());
        }
    }
}

#[test]
fn coupling_only_models_take_the_zero_field() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in [3u32, 5] {
        for k in 1..=2 {
            let slice = TreeSlice::build(k, 2).unwrap();
            let couplings: BTreeMap<TreeAddress, Padic> = slice
                .edges()
                .iter()
                .map(|e| (slice.address(e.child).clone(), random_padic(&mut rng, p, 1, PRECISION)))
                .collect();
            let spec = IsingSpec::new(
                Coupling::PerEdge(couplings),
                ExternalField::Homogeneous(Padic::zero(p as u64, PRECISION).unwrap()),
            )
            .unwrap();
            let lambda = lambda_spec(&spec, &slice).unwrap();
            let zero = BoundaryField::zero(&slice, p, PRECISION).unwrap();
            assert!(check_family(&lambda, &zero, &slice).unwrap().iter().all(|r| r.passed));

            let report = ising_gibbs_report(&spec, k, 2, 2, Normalization::Row).unwrap();
            assert!(report.unique.value && report.compatible && report.bounded.value);
        }
    }
}

#[test]
fn two_adic_report_is_unique_and_unbounded() {
    let j = Padic::from_integer(4, 2, PRECISION).unwrap();
    let eta = Padic::from_integer(4, 2, PRECISION).unwrap();
    let report = ising_gibbs_report(&IsingSpec::homogeneous(j, eta).unwrap(), 2, 2, 4, Normalization::Row).unwrap();
    assert!(report.unique.value);
    assert!(report.compatible);
    assert!(!report.bounded.value);
}
