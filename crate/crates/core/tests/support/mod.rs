//! Independent reference computations for the integration tests.
//!
//! Everything here works with exact rationals and plain modular integers, and
//! shares no code with the library beyond reading its results.

#![allow(dead_code)]

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use padic_gibbs::Padic;

pub fn big_pow(p: u32, e: u32) -> BigInt {
    BigInt::from(p).pow(e)
}

/// `v_p(n)` for nonzero `n`.
pub fn val_int(n: &BigInt, p: u32) -> i64 {
    assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    v
}

pub fn val_rat(q: &BigRational, p: u32) -> i64 {
    val_int(q.numer(), p) - val_int(q.denom(), p)
}

/// `a^-1 mod p^m` by Euler's theorem, `a` prime to `p`.
pub fn inverse_mod(a: &BigInt, p: u32, m: u32) -> BigInt {
    let modulus = big_pow(p, m);
    let phi = &modulus - &modulus / BigInt::from(p);
    let a = ((a % &modulus) + &modulus) % &modulus;
    a.modpow(&(phi - 1), &modulus)
}

/// The integer in `[0, p^m)` congruent to the p-integral rational `q`.
pub fn residue(q: &BigRational, p: u32, m: u32) -> BigInt {
    let modulus = big_pow(p, m);
    let (mut num, mut den) = (q.numer().clone(), q.denom().clone());
    let pb = BigInt::from(p);
    while (&den % &pb).is_zero() {
        assert!((&num % &pb).is_zero(), "rational is not p-integral");
        num /= &pb;
        den /= &pb;
    }
    let r = num * inverse_mod(&den, p, m) % &modulus;
    (r + &modulus) % &modulus
}

/// `sum_{n >= 0} x^n / n!` as an exact rational, truncated once every later term
/// has order at least `m`.
pub fn exp_series(x: &BigRational, p: u32, m: i64) -> BigRational {
    let mut sum = BigRational::zero();
    if x.is_zero() {
        return BigRational::one();
    }
    let v = val_rat(x, p);
    let mut term = BigRational::one();
    let mut n: u64 = 0;
    loop {
        sum += &term;
        n += 1;
        term = term * x / BigRational::from_integer(BigInt::from(n));
        // ord(x^j / j!) >= j v - (j - 1)/(p - 1) for every j >= n
        if n as i64 * v - (n as i64 - 1) / (p as i64 - 1) >= m {
            break;
        }
    }
    sum
}

/// `sum_{n >= 1} (-1)^(n+1) (x - 1)^n / n`, truncated once every later term has order `>= m`.
pub fn log_series(x: &BigRational, p: u32, m: i64) -> BigRational {
    let t = x - BigRational::one();
    if t.is_zero() {
        return BigRational::zero();
    }
    let s = val_rat(&t, p);
    assert!(s >= 1);
    let mut sum = BigRational::zero();
    let mut power = BigRational::one();
    let mut n: u64 = 1;
    loop {
        power *= &t;
        let term = &power / BigRational::from_integer(BigInt::from(n));
        if n % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
        n += 1;
        if n as i64 * s - n.ilog(p as u64) as i64 >= m {
            break;
        }
    }
    sum
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn digits_of(n: &BigInt, p: u32, count: usize) -> Vec<u32> {
    let pb = BigInt::from(p);
    let mut n = n.clone();
    (0..count)
        .map(|_| {
            let d = (&n % &pb).to_u32().unwrap();
            n /= &pb;
            d
        })
        .collect()
}

/// The library value's residue as a signed big integer.
pub fn lib_residue(x: &Padic, m: u32) -> BigInt {
    BigInt::from_biguint(Sign::Plus, x.residue(m).expect("value known to the requested precision"))
}

/// A root of the integer polynomial `f` modulo `p^m`, found digit by digit from `seed`,
/// insisting on exactly one candidate per digit.
pub fn digitwise_root(f: impl Fn(&BigInt) -> BigInt, p: u32, m: u32, seed: i64) -> BigInt {
    let mut z = BigInt::from(seed);
    for j in 1..m {
        let step = big_pow(p, j);
        let next = big_pow(p, j + 1);
        let candidates: Vec<BigInt> = (0..p)
            .map(|d| &z + BigInt::from(d) * &step)
            .filter(|c| (f(c) % &next).is_zero())
            .collect();
        assert_eq!(candidates.len(), 1, "digit {j} is not uniquely determined");
        z = candidates.into_iter().next().unwrap();
    }
    z
}

/// Breadth-first vertex list and parent->child edges of `V_n`, built from scratch.
pub fn ball(k: u32, n: usize) -> (Vec<Vec<u32>>, Vec<(usize, usize)>, Vec<usize>) {
    let mut vertices: Vec<Vec<u32>> = vec![vec![]];
    let mut edges = Vec::new();
    let mut frontier = vec![0usize];
    for depth in 1..=n {
        let mut next = Vec::new();
        for &parent in &frontier {
            let arity = if depth == 1 { k + 1 } else { k };
            for c in 1..=arity {
                let mut path = vertices[parent].clone();
                path.push(c);
                vertices.push(path);
                let child = vertices.len() - 1;
                edges.push((parent, child));
                next.push(child);
            }
        }
        frontier = next;
    }
    (vertices, edges, frontier)
}

/// Brute-force measure with integer edge weights `w[(u, v)]` (indexed `++, +-, -+, --`)
/// and boundary tilt `z^{#plus on W_n}`, reduced modulo `p^m`. Configuration bit `i`
/// set means vertex `i` carries `-1`.
pub fn brute_force_weights(k: u32, n: usize, w: [i64; 4], z: &BigInt, p: u32, m: u32) -> Vec<BigInt> {
    let (vertices, edges, boundary) = ball(k, n);
    let count = 1u64 << vertices.len();
    let index = |u: bool, v: bool| match (u, v) {
        (true, true) => 0,
        (true, false) => 1,
        (false, true) => 2,
        (false, false) => 3,
    };
    let unnormalized: Vec<BigInt> = (0..count)
        .map(|bits| {
            let up = |i: usize| bits >> i & 1 == 0;
            let mut acc = BigInt::one();
            for &(x, y) in &edges {
                acc *= w[index(up(x), up(y))];
            }
            for &b in &boundary {
                if up(b) {
                    acc *= z;
                }
            }
            acc
        })
        .collect();
    let total: BigInt = unnormalized.iter().sum();
    let modulus = big_pow(p, m);
    let inv = inverse_mod(&total, p, m);
    unnormalized.iter().map(|x| (x * &inv % &modulus + &modulus) % &modulus).collect()
}

/// Random p-adic number of the given valuation with `precision` random digits.
pub fn random_padic(rng: &mut impl rand::Rng, p: u32, valuation: i64, precision: u32) -> Padic {
    let mut digits: Vec<u32> = (0..precision).map(|_| rng.gen_range(0..p)).collect();
    digits[0] = rng.gen_range(1..p);
    Padic::from_digits(p as u64, valuation, &digits, precision).unwrap()
}

pub fn abs_big(n: &BigInt) -> BigUint {
    n.abs().to_biguint().unwrap()
}

pub mod strategies {
    use padic_gibbs::model::{LambdaSpec, LambdaTable};
    use padic_gibbs::padic::exp_domain_valuation;
    use padic_gibbs::Padic;
    use proptest::prelude::*;

    pub fn prime() -> impl Strategy<Value = u32> {
        prop::sample::select(vec![2u32, 3, 5, 7])
    }

    /// Nonzero values with valuation in `lo..=hi` and `precision` digits.
    pub fn padic(p: u32, lo: i64, hi: i64, precision: u32) -> impl Strategy<Value = Padic> {
        (lo..=hi, prop::collection::vec(0..p, precision as usize), 1..p).prop_map(move |(v, mut digits, d0)| {
            digits[0] = d0;
            Padic::from_digits(p as u64, v, &digits, precision).unwrap()
        })
    }

    /// Points of the `exp_p` domain, zero included now and then.
    pub fn admissible(p: u32, precision: u32) -> impl Strategy<Value = Padic> {
        let lo = exp_domain_valuation(p);
        prop_oneof![
            9 => padic(p, lo, lo + 3, precision),
            1 => Just(Padic::zero(p as u64, precision).unwrap()),
        ]
    }

    pub fn table(p: u32, precision: u32) -> impl Strategy<Value = LambdaTable> {
        prop::array::uniform4(admissible(p, precision)).prop_map(|[a, b, c, d]| LambdaTable::new(a, b, c, d))
    }

    pub fn lambda(p: u32, precision: u32) -> impl Strategy<Value = LambdaSpec> {
        table(p, precision).prop_map(|t| LambdaSpec::homogeneous(t).unwrap())
    }
}

pub mod fields {
    use std::collections::BTreeMap;

    use padic_gibbs::model::{LambdaSpec, LambdaTable};
    use padic_gibbs::padic::exp_domain_valuation;
    use padic_gibbs::recursion::{propagate_inward, BoundaryField};
    use padic_gibbs::{Padic, TreeAddress, TreeSlice};
    use rand::Rng;

    /// Random value of the `exp_p` domain, occasionally zero.
    pub fn admissible(rng: &mut impl Rng, p: u32, precision: u32) -> Padic {
        if rng.gen_ratio(1, 10) {
            return Padic::zero(p as u64, precision).unwrap();
        }
        let lo = exp_domain_valuation(p);
        let v = rng.gen_range(lo..=lo + 3);
        super::random_padic(rng, p, v, precision)
    }

    /// For `p = 2` the entries sit in `4 Z_2` beyond the domain, `|lambda|_2 <= 1/16`, so that
    /// fields propagated inward stay in the domain after halving.
    pub fn table(rng: &mut impl Rng, p: u32, precision: u32) -> LambdaTable {
        let mut next = || {
            if p != 2 {
                return admissible(rng, p, precision);
            }
            if rng.gen_ratio(1, 10) {
                return Padic::zero(2, precision).unwrap();
            }
            let v = rng.gen_range(4..=6);
            super::random_padic(rng, p, v, precision)
        };
        LambdaTable::new(next(), next(), next(), next())
    }

    /// Homogeneous or per-edge, with equal odds when the slice has edges.
    pub fn lambda(rng: &mut impl Rng, p: u32, precision: u32, slice: &TreeSlice) -> LambdaSpec {
        if slice.edges().is_empty() || rng.gen_bool(0.5) {
            return LambdaSpec::homogeneous(table(rng, p, precision)).unwrap();
        }
        let tables = slice
            .edges()
            .iter()
            .map(|e| (slice.address(e.child).clone(), table(rng, p, precision)))
            .collect();
        LambdaSpec::per_edge(tables).unwrap()
    }

    pub fn seed(rng: &mut impl Rng, p: u32, precision: u32, slice: &TreeSlice) -> BTreeMap<TreeAddress, Padic> {
        slice.level(slice.depth()).iter().map(|a| (a.clone(), admissible(rng, p, precision))).collect()
    }

    pub fn consistent(rng: &mut impl Rng, lambda: &LambdaSpec, slice: &TreeSlice) -> BoundaryField {
        let s = seed(rng, lambda.prime(), lambda.precision(), slice);
        propagate_inward(&s, lambda, slice).unwrap()
    }
}
