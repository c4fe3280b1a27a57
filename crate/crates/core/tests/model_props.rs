//! Normalization, norm rigidity, Markov-chain structure and compatibility of the
//! finite-volume measures on random admissible models.

mod support;

use padic_gibbs::model::{
    check_compatibility, check_family, default_path_window, finite_volume_measure, LambdaSpec, marginal_sweep, path_matrices,
    stationary_vector, Normalization, Spin,
};
use padic_gibbs::recursion::BoundaryField;
use padic_gibbs::{NormValue, Padic, TreeSlice};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::fields;

const PRECISION: u32 = 24;

/// `(k, n)` with at most `2^10` configurations.
fn shape() -> impl Strategy<Value = (u32, usize)> {
    prop::sample::select(vec![(1u32, 0usize), (1, 1), (1, 2), (1, 3), (2, 1), (2, 2)])
}

fn any_field(rng: &mut ChaCha8Rng, p: u32, slice: &TreeSlice) -> BoundaryField {
    let values = slice.vertices().iter().map(|a| (a.clone(), fields::admissible(rng, p, PRECISION)));
    BoundaryField::from_values(p, values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn measures_are_normalized(p in prop::sample::select(vec![2u32, 3, 5]), (k, n) in shape(), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let slice = TreeSlice::build(k, n).unwrap();
        let lambda = fields::lambda(&mut rng, p, PRECISION, &slice);
        let field = any_field(&mut rng, p, &slice);
        let mu = finite_volume_measure(&lambda, &field, &slice).unwrap();
        prop_assert_eq!(mu.weights().len(), 1usize << slice.vertex_count());
        prop_assert!(mu.total().agrees_with(&Padic::one(p as u64, PRECISION).unwrap()));
    }

    #[test]
    fn odd_prime_weights_are_units(p in prop::sample::select(vec![3u32, 5, 7]), (k, n) in shape(), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let slice = TreeSlice::build(k, n).unwrap();
        let lambda = fields::lambda(&mut rng, p, PRECISION, &slice);
        let field = any_field(&mut rng, p, &slice);
        let mu = finite_volume_measure(&lambda, &field, &slice).unwrap();
        prop_assert_eq!(mu.norm_range(), Some((NormValue::Power(0), NormValue::Power(0))));
    }

    #[test]
    fn row_stochastic_with_invariant_vector(p in prop::sample::select(vec![2u32, 3, 5]), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let slice = TreeSlice::build(2, 3).unwrap();
        let lambda = fields::lambda(&mut rng, p, PRECISION, &slice);
        let field = any_field(&mut rng, p, &slice);
        let window = default_path_window(3);
        for m in path_matrices(&window, &lambda, &field, Normalization::Row).unwrap() {
            let one = Padic::one(p as u64, PRECISION).unwrap();
            prop_assert!(m.row_sum(Spin::Up).agrees_with(&one));
            prop_assert!(m.row_sum(Spin::Down).agrees_with(&one));
            let (up, down) = stationary_vector(&m).unwrap();
            prop_assert!((&up + &down).agrees_with(&one));
            for v in [Spin::Up, Spin::Down] {
                let image = &(&up * m.get(Spin::Up, v)) + &(&down * m.get(Spin::Down, v));
                let expected = if v == Spin::Up { &up } else { &down };
                prop_assert!(image.agrees_with(expected));
            }
        }
    }

    /// Along the path a homogeneous model with a constant field repeats one matrix,
    /// so the stationary vector is the same for every window.
    #[test]
    fn two_adic_marginals_grow(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let slice = TreeSlice::build(2, 4).unwrap();
        let lambda = LambdaSpec::homogeneous(fields::table(&mut rng, 2, PRECISION)).unwrap();
        let field = BoundaryField::constant(&slice, &fields::admissible(&mut rng, 2, PRECISION)).unwrap();
        let sweep = marginal_sweep(&lambda, &field, 4, Normalization::Row).unwrap();
        for m in &sweep {
            prop_assert!(m.literal_factor_min_norm.unwrap() >= NormValue::Power(2));
        }
        for pair in sweep.windows(2) {
            prop_assert!(pair[1].max_norm.unwrap() > pair[0].max_norm.unwrap());
        }
    }

    #[test]
    fn propagated_fields_are_compatible(p in prop::sample::select(vec![2u32, 3, 5]), (k, n) in shape(), seed: u64) {
        prop_assume!(n >= 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let slice = TreeSlice::build(k, n).unwrap();
        let lambda = fields::lambda(&mut rng, p, PRECISION, &slice);
        let field = fields::consistent(&mut rng, &lambda, &slice);
        prop_assert!(field.is_consistent());
        for report in check_family(&lambda, &field, &slice).unwrap() {
            prop_assert!(report.passed, "level {} failed: {:?}", report.depth, report.max_discrepancy);
        }
    }

    #[test]
    fn perturbed_fields_are_not(p in prop::sample::select(vec![3u32, 5]), (k, n) in shape(), seed: u64, pick: prop::sample::Index) {
        prop_assume!(n >= 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let slice = TreeSlice::build(k, n).unwrap();
        let lambda = fields::lambda(&mut rng, p, PRECISION, &slice);
        let field = fields::consistent(&mut rng, &lambda, &slice);
        let inner = slice.ball_count(n - 1);
        let x = slice.address(pick.index(inner)).clone();
        let delta = Padic::from_integer(p as i64, p as u64, PRECISION).unwrap();
        let bent = field.perturbed(&x, &delta).unwrap();
        let m = x.depth() + 1;
        prop_assert!(!check_compatibility(m, &lambda, &bent, &slice).unwrap().passed);
    }
}

#[test]
fn non_consistent_zero_field_fails_somewhere() {
    let p = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let slice = TreeSlice::build(2, 2).unwrap();
    let lambda = fields::lambda(&mut rng, p, PRECISION, &slice);
    let zero = BoundaryField::zero(&slice, p, PRECISION).unwrap();
    let reports = check_family(&lambda, &zero, &slice).unwrap();
    assert!(reports.iter().any(|r| !r.passed));
}
