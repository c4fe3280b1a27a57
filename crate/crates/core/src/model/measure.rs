use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::lambda::{EdgeWeights, LambdaSpec, Spin};
use crate::error::{Error, PadicError, Result};
use crate::padic::{NormValue, Order, Padic};
use crate::recursion::{slice_weights, BoundaryField};
use crate::tree::{TreeAddress, TreeSlice};

/// Refusal threshold for the number of enumerated configurations.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 20;

/// Spins on `V_n` as a bitmask over the slice's dense vertex index; a set bit is `-1`.
///
/// Configuration index 0 is all `+1`, and the enumeration order is little-endian in
/// the vertex index, so the low `|V_m|` bits are the restriction to `V_m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinConfiguration {
    bits: u64,
    len: usize,
}

impl SpinConfiguration {
    pub fn from_bits(bits: u64, len: usize) -> SpinConfiguration {
        assert!(len <= 64, "at most 64 spins");
        let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
        SpinConfiguration { bits: bits & mask, len }
    }

    pub fn uniform(spin: Spin, len: usize) -> SpinConfiguration {
        let bits = if spin == Spin::Down { u64::MAX } else { 0 };
        SpinConfiguration::from_bits(bits, len)
    }

    pub fn from_spins(spins: &[Spin]) -> SpinConfiguration {
        let bits = spins
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == Spin::Down)
            .fold(0u64, |acc, (i, _)| acc | (1 << i));
        SpinConfiguration::from_bits(bits, spins.len())
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn spin(&self, index: usize) -> Spin {
        if self.bits >> index & 1 == 1 {
            Spin::Down
        } else {
            Spin::Up
        }
    }

    /// The restriction to the first `len` vertices.
    pub fn restrict(&self, len: usize) -> SpinConfiguration {
        SpinConfiguration::from_bits(self.bits, len)
    }

    pub fn assignment<'a>(&self, slice: &'a TreeSlice) -> BTreeMap<&'a TreeAddress, Spin> {
        (0..self.len).map(|i| (slice.address(i), self.spin(i))).collect()
    }
}

impl fmt::Display for SpinConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.spin(i) == Spin::Up { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl FromStr for SpinConfiguration {
    type Err = Error;

    /// A string of `+`/`-` in dense vertex order.
    fn from_str(s: &str) -> Result<SpinConfiguration> {
        let spins = s
            .chars()
            .map(|c| match c {
                '+' => Ok(Spin::Up),
                '-' => Ok(Spin::Down),
                other => Err(Error::Config(format!("spin {other:?} is not '+' or '-'"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if spins.len() > 64 {
            return Err(Error::Config("configurations are limited to 64 spins".into()));
        }
        Ok(SpinConfiguration::from_spins(&spins))
    }
}

impl Serialize for SpinConfiguration {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

fn check_covers(config: &SpinConfiguration, slice: &TreeSlice) -> Result<()> {
    if config.len() != slice.vertex_count() {
        return Err(Error::Config(format!(
            "configuration has {} spins but V_{} has {} vertices",
            config.len(),
            slice.depth(),
            slice.vertex_count()
        )));
    }
    Ok(())
}

/// `H_n(sigma) = sum over edges of lambda_{x,y}(sigma(x), sigma(y))`, `x` the parent.
pub fn hamiltonian(config: &SpinConfiguration, lambda: &LambdaSpec, slice: &TreeSlice) -> Result<Padic> {
    check_covers(config, slice)?;
    let mut total = Padic::zero(lambda.prime() as u64, lambda.precision())?;
    for e in slice.edges() {
        let table = lambda.table_for(slice.address(e.child))?;
        total = &total + table.get(config.spin(e.parent), config.spin(e.child));
    }
    Ok(total)
}

/// `H_n(sigma) + sum_{x in W_n} h_x sigma(x)`.
pub fn tilted_hamiltonian(
    config: &SpinConfiguration,
    lambda: &LambdaSpec,
    field: &BoundaryField,
    slice: &TreeSlice,
) -> Result<Padic> {
    let mut total = hamiltonian(config, lambda, slice)?;
    let boundary = field.on_level(slice, slice.depth())?;
    for (i, h) in slice.level_range(slice.depth()).zip(&boundary) {
        total = match config.spin(i) {
            Spin::Up => &total + h,
            Spin::Down => &total - h,
        };
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DomainReport {
    pub in_domain: bool,
    pub order: Order,
    pub required_order: i64,
}

/// Runtime witness that the tilted Hamiltonian lies in the `exp_p` domain.
pub fn tilted_hamiltonian_domain_check(
    config: &SpinConfiguration,
    lambda: &LambdaSpec,
    field: &BoundaryField,
    slice: &TreeSlice,
) -> Result<DomainReport> {
    let value = tilted_hamiltonian(config, lambda, field, slice)?;
    Ok(DomainReport {
        in_domain: value.in_exp_domain(),
        order: value.order(),
        required_order: crate::padic::exp_domain_valuation(lambda.prime()),
    })
}

/// `mu^(n)_h` on every configuration of `V_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteVolumeMeasure {
    depth: usize,
    vertex_count: usize,
    weights: Vec<Padic>,
    partition_function: Padic,
    boundary_field: BTreeMap<TreeAddress, Padic>,
}

impl FiniteVolumeMeasure {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Weights indexed by configuration bits.
    pub fn weights(&self) -> &[Padic] {
        &self.weights
    }

    pub fn weight(&self, config: &SpinConfiguration) -> Result<&Padic> {
        if config.len() != self.vertex_count {
            return Err(Error::Config(format!(
                "configuration has {} spins, the measure lives on {} vertices",
                config.len(),
                self.vertex_count
            )));
        }
        Ok(&self.weights[config.bits() as usize])
    }

    pub fn configurations(&self) -> impl Iterator<Item = (SpinConfiguration, &Padic)> {
        let n = self.vertex_count;
        self.weights.iter().enumerate().map(move |(i, w)| (SpinConfiguration::from_bits(i as u64, n), w))
    }

    pub fn partition_function(&self) -> &Padic {
        &self.partition_function
    }

    pub fn boundary_field(&self) -> &BTreeMap<TreeAddress, Padic> {
        &self.boundary_field
    }

    /// `sum_sigma mu(sigma)`.
    pub fn total(&self) -> Padic {
        let mut acc = self.weights[0].integer_like(0);
        for w in &self.weights {
            acc = &acc + w;
        }
        acc
    }

    /// Largest and smallest `|mu(sigma)|_p` over weights with a known norm.
    pub fn norm_range(&self) -> Option<(NormValue, NormValue)> {
        let norms = self.weights.iter().filter_map(|w| w.norm().ok());
        norms.fold(None, |acc, n| match acc {
            None => Some((n, n)),
            Some((hi, lo)) => Some((hi.max(n), lo.min(n))),
        })
    }
}

/// Exponentials of one edge term and the two boundary tilts, shared by every configuration.
struct Factors {
    edges: Vec<(usize, usize, EdgeWeights)>,
    /// `(exp_p(h_x), exp_p(-h_x))` by boundary vertex index.
    tilts: Vec<(usize, Padic, Padic)>,
}

fn factors(lambda: &LambdaSpec, field: &BoundaryField, slice: &TreeSlice) -> Result<Factors> {
    let weights = slice_weights(lambda, slice)?;
    let edges = slice
        .edges()
        .iter()
        .map(|e| (e.parent, e.child, weights[e.child].clone().expect("non-root vertex")))
        .collect();
    let depth = slice.depth();
    let boundary = field.on_level(slice, depth)?;
    let tilts = slice
        .level_range(depth)
        .zip(&boundary)
        .map(|(i, h)| {
            let at = |source: PadicError| Error::AtVertex { vertex: slice.address(i).clone(), source };
            Ok((i, h.exp().map_err(at)?, h.negated().exp().map_err(at)?))
        })
        .collect::<Result<_>>()?;
    Ok(Factors { edges, tilts })
}

/// `exp_p` of the tilted Hamiltonian, as a product of per-edge and per-vertex exponentials.
fn unnormalized_weight(bits: u64, factors: &Factors) -> Padic {
    let spin = |i: usize| if bits >> i & 1 == 1 { Spin::Down } else { Spin::Up };
    let mut acc: Option<Padic> = None;
    let mut times = |x: &Padic| {
        acc = Some(match acc.take() {
            None => x.clone(),
            Some(a) => &a * x,
        });
    };
    for (parent, child, w) in &factors.edges {
        times(w.weight(spin(*parent), spin(*child)));
    }
    for (i, up, down) in &factors.tilts {
        times(if spin(*i) == Spin::Up { up } else { down });
    }
    acc.expect("a slice has at least one vertex, so a boundary tilt")
}

/// `mu^(n)_h(sigma) = exp_p(H_n(sigma) + sum_{W_n} h_x sigma(x)) / Z_n`, `n` the slice depth.
pub fn finite_volume_measure(
    lambda: &LambdaSpec,
    field: &BoundaryField,
    slice: &TreeSlice,
) -> Result<FiniteVolumeMeasure> {
    finite_volume_measure_with_cap(lambda, field, slice, DEFAULT_ENUMERATION_CAP)
}

pub fn finite_volume_measure_with_cap(
    lambda: &LambdaSpec,
    field: &BoundaryField,
    slice: &TreeSlice,
    cap: u64,
) -> Result<FiniteVolumeMeasure> {
    let n = slice.vertex_count();
    let count: u128 = 1u128 << n.min(127);
    if n > 63 || count > cap as u128 {
        return Err(Error::Resource { what: "spin configurations", requested: count, limit: cap as u128 });
    }
    if field.prime() != lambda.prime() {
        return Err(PadicError::PrimeMismatch(lambda.prime(), field.prime()).into());
    }
    let factors = factors(lambda, field, slice)?;
    let raw: Vec<Padic> = (0..count as u64)
        .into_par_iter()
        .map(|bits| unnormalized_weight(bits, &factors))
        .collect();
    // sequential, so the reduction order is fixed
    let mut z = raw[0].integer_like(0);
    for w in &raw {
        z = &z + w;
    }
    if z.is_negligible() {
        return Err(PadicError::Indeterminate { abs_precision: z.abs_precision().unwrap_or(0) }.into());
    }
    let inverse = z.inverse()?;
    let weights = raw.par_iter().map(|w| w * &inverse).collect();
    let boundary_field = slice
        .level(slice.depth())
        .iter()
        .map(|a| (a.clone(), field.value(a).expect("checked by factors").clone()))
        .collect();
    Ok(FiniteVolumeMeasure { depth: slice.depth(), vertex_count: n, weights, partition_function: z, boundary_field })
}

/// Outcome of comparing the `W_n`-marginal of `mu^(n)` with `mu^(n-1)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompatibilityReport {
    pub depth: usize,
    pub configurations: usize,
    pub passed: bool,
    /// Largest `|discrepancy|_p` among discrepancies with significant digits.
    pub max_discrepancy: Option<NormValue>,
    pub worst_configuration: Option<SpinConfiguration>,
    /// Every discrepancy has at least this order.
    pub discrepancy_order: Order,
}

/// Checks `sum_{sigma on W_n} mu^(n)(sigma_{n-1} v sigma) = mu^(n-1)(sigma_{n-1})` for every
/// `sigma_{n-1}`, digit-exact at working precision.
pub fn check_compatibility(
    depth: usize,
    lambda: &LambdaSpec,
    field: &BoundaryField,
    slice: &TreeSlice,
) -> Result<CompatibilityReport> {
    if depth == 0 || depth > slice.depth() {
        return Err(Error::Geometry(format!(
            "compatibility needs 1 <= n <= {}, got {depth}",
            slice.depth()
        )));
    }
    let outer = TreeSlice::build(slice.order(), depth)?;
    let inner = TreeSlice::build(slice.order(), depth - 1)?;
    let big = finite_volume_measure(lambda, field, &outer)?;
    let small = finite_volume_measure(lambda, field, &inner)?;
    let m = inner.vertex_count();
    let mut marginal: Vec<Padic> = vec![small.weights[0].integer_like(0); small.weights.len()];
    for (bits, w) in big.weights.iter().enumerate() {
        let slot = &mut marginal[bits & ((1 << m) - 1)];
        *slot = &*slot + w;
    }
    let mut max_discrepancy: Option<(NormValue, SpinConfiguration)> = None;
    let mut discrepancy_order = Order::Infinite;
    for (bits, (sum, expected)) in marginal.iter().zip(&small.weights).enumerate() {
        let diff = sum.try_sub(expected)?;
        discrepancy_order = min_order(discrepancy_order, diff.order());
        if let Ok(norm @ NormValue::Power(_)) = diff.norm() {
            if max_discrepancy.as_ref().is_none_or(|(n, _)| norm > *n) {
                max_discrepancy = Some((norm, SpinConfiguration::from_bits(bits as u64, m)));
            }
        }
    }
    Ok(CompatibilityReport {
        depth,
        configurations: marginal.len(),
        passed: max_discrepancy.is_none(),
        max_discrepancy: max_discrepancy.as_ref().map(|(n, _)| *n),
        worst_configuration: max_discrepancy.map(|(_, c)| c),
        discrepancy_order,
    })
}

/// Compatibility at every adjacent level pair `(n-1, n)` with `1 <= n <= depth`.
pub fn check_family(lambda: &LambdaSpec, field: &BoundaryField, slice: &TreeSlice) -> Result<Vec<CompatibilityReport>> {
    (1..=slice.depth()).map(|n| check_compatibility(n, lambda, field, slice)).collect()
}

pub(crate) fn min_order(a: Order, b: Order) -> Order {
    match (a.lower_bound(), b.lower_bound()) {
        (None, _) => b,
        (_, None) => a,
        (Some(x), Some(y)) if x < y => a,
        (Some(x), Some(y)) if y < x => b,
        // equal bounds: an exact value is the weaker statement
        _ if a.is_exact() => a,
        _ => b,
    }
}
