//! Boundary fields and the recursion `h_x = sum_{y in S(x)} F_{x,y}(h_y)` that makes
//! the finite-volume measures compatible.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, PadicError, Result};
use crate::model::{EdgeWeights, Interaction, LambdaSpec};
use crate::padic::{
    default_iteration_cap, hensel_lift, hensel_solve, iterate_contraction, NormValue, Order, Padic,
    Polynomial,
};
use crate::tree::{TreeAddress, TreeSlice};

/// Vertex values `h_x`, grouped by level.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryField {
    #[serde(skip)]
    prime: u32,
    levels: BTreeMap<usize, BTreeMap<TreeAddress, Padic>>,
    consistent: bool,
}

impl BoundaryField {
    pub fn new(prime: u32) -> BoundaryField {
        BoundaryField { prime, levels: BTreeMap::new(), consistent: false }
    }

    /// Explicit values; admissibility is checked, consistency is not claimed.
    pub fn from_values(prime: u32, values: impl IntoIterator<Item = (TreeAddress, Padic)>) -> Result<BoundaryField> {
        let mut field = BoundaryField::new(prime);
        for (address, value) in values {
            field.insert(address, value)?;
        }
        Ok(field)
    }

    /// `h = 0` on every vertex of the slice.
    pub fn zero(slice: &TreeSlice, prime: u32, precision: u32) -> Result<BoundaryField> {
        let zero = Padic::zero(prime as u64, precision)?;
        Self::constant(slice, &zero)
    }

    /// The same value on every vertex of the slice.
    pub fn constant(slice: &TreeSlice, value: &Padic) -> Result<BoundaryField> {
        Self::from_values(value.prime(), slice.vertices().iter().map(|a| (a.clone(), value.clone())))
    }

    pub fn insert(&mut self, address: TreeAddress, value: Padic) -> Result<()> {
        if value.prime() != self.prime {
            return Err(PadicError::PrimeMismatch(self.prime, value.prime()).into());
        }
        if !value.in_exp_domain() {
            return Err(Error::Inadmissible {
                vertex: address,
                detail: format!("order {} is below the exp_p domain", value.order()),
            });
        }
        self.levels.entry(address.depth()).or_default().insert(address, value);
        Ok(())
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn value(&self, address: &TreeAddress) -> Option<&Padic> {
        self.levels.get(&address.depth())?.get(address)
    }

    pub fn level(&self, depth: usize) -> Option<&BTreeMap<TreeAddress, Padic>> {
        self.levels.get(&depth)
    }

    /// Lowest and highest level with any values.
    pub fn levels_present(&self) -> Option<(usize, usize)> {
        let lo = *self.levels.keys().next()?;
        let hi = *self.levels.keys().next_back()?;
        Some((lo, hi))
    }

    /// Whether the family was produced by the recursion (and so satisfies it exactly).
    pub fn is_consistent(&self) -> bool {
        self.consistent
    }

    pub fn values(&self) -> impl Iterator<Item = (&TreeAddress, &Padic)> {
        self.levels.values().flat_map(|l| l.iter())
    }

    /// A copy with `h_x` replaced by `h_x + delta`; no longer consistent.
    pub fn perturbed(&self, address: &TreeAddress, delta: &Padic) -> Result<BoundaryField> {
        let current = self
            .value(address)
            .ok_or_else(|| Error::Geometry(format!("field has no value at {address}")))?;
        let mut out = self.clone();
        out.insert(address.clone(), current + delta)?;
        out.consistent = false;
        Ok(out)
    }

    /// Values on the level, returned in the slice's vertex order.
    pub(crate) fn on_level(&self, slice: &TreeSlice, depth: usize) -> Result<Vec<Padic>> {
        slice
            .level(depth)
            .iter()
            .map(|a| {
                self.value(a)
                    .cloned()
                    .ok_or_else(|| Error::Config(format!("boundary field has no value at {a}")))
            })
            .collect()
    }
}

/// `F(h) = 1/2 log_p((a e^{2h} + b) / (c e^{2h} + d))`.
pub fn edge_map(h: &Padic, weights: &EdgeWeights) -> Result<Padic, PadicError> {
    let tilt = h.mul_int(2).exp()?;
    let numerator = &(&weights.a * &tilt) + &weights.b;
    let denominator = &(&weights.c * &tilt) + &weights.d;
    Ok(numerator.try_div(&denominator)?.log()?.half())
}

/// Edge weights for every edge of the slice, indexed by child vertex index.
pub(crate) fn slice_weights(lambda: &LambdaSpec, slice: &TreeSlice) -> Result<Vec<Option<EdgeWeights>>> {
    let mut out = vec![None; slice.vertex_count()];
    match lambda.interaction() {
        Interaction::Homogeneous(t) => {
            let w = EdgeWeights::from_table(t)?;
            for slot in out.iter_mut().skip(1) {
                *slot = Some(w.clone());
            }
        }
        Interaction::PerEdge(_) => {
            let weights: Vec<(usize, EdgeWeights)> = slice
                .edges()
                .par_iter()
                .map(|e| {
                    let child = slice.address(e.child);
                    let table = lambda.table_for(child)?;
                    let w = EdgeWeights::from_table(table)
                        .map_err(|source| Error::AtVertex { vertex: child.clone(), source })?;
                    Ok((e.child, w))
                })
                .collect::<Result<_>>()?;
            for (i, w) in weights {
                out[i] = Some(w);
            }
        }
    }
    Ok(out)
}

/// Solves the recursion inward from boundary values on `W_n`, `n` the slice depth.
///
/// At the root the sum runs over `k + 1` successors, elsewhere over `k`.
pub fn propagate_inward(
    seed: &BTreeMap<TreeAddress, Padic>,
    lambda: &LambdaSpec,
    slice: &TreeSlice,
) -> Result<BoundaryField> {
    let depth = slice.depth();
    let mut field = BoundaryField::new(lambda.prime());
    for address in slice.level(depth) {
        let value = seed
            .get(address)
            .ok_or_else(|| Error::Config(format!("seed has no value at boundary vertex {address}")))?;
        field.insert(address.clone(), value.clone())?;
    }
    if let Some(extra) = seed.keys().find(|a| a.depth() != depth || !slice.contains(a)) {
        return Err(Error::Config(format!("seed value at {extra} is not on the boundary level {depth}")));
    }
    let weights = slice_weights(lambda, slice)?;
    let mut below: Vec<Padic> = field.on_level(slice, depth)?;
    for m in (0..depth).rev() {
        let child_base = slice.level_range(m + 1).start;
        let values: Vec<Padic> = slice
            .level_range(m)
            .into_par_iter()
            .map(|x| {
                let vertex = slice.address(x);
                let mut acc: Option<Padic> = None;
                for y in slice.successor_indices(x) {
                    let w = weights[y].as_ref().expect("every non-root vertex has edge weights");
                    let f = edge_map(&below[y - child_base], w)
                        .map_err(|source| Error::AtVertex { vertex: vertex.clone(), source })?;
                    acc = Some(match acc {
                        None => f,
                        Some(a) => &a + &f,
                    });
                }
                Ok(acc.expect("inner vertices have successors"))
            })
            .collect::<Result<_>>()?;
        for (x, value) in slice.level_range(m).zip(&values) {
            field.insert(slice.address(x).clone(), value.clone())?;
        }
        below = values;
    }
    field.consistent = true;
    Ok(field)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UniquenessCondition {
    /// `p >= 3` and every `|lambda|_p <= 1/p`.
    ConditionI,
    /// `p = 2` and `|lambda(1,1) + lambda(-1,-1) - lambda(1,-1) - lambda(-1,1)|_2 <= 1/8`.
    ConditionII,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniquenessVerdict {
    pub condition: UniquenessCondition,
    pub prime: u32,
    /// Edge (by child address) attaining the worst witness, when per-edge.
    pub worst_edge: Option<TreeAddress>,
    /// Order of the worst witness quantity.
    pub worst_order: Order,
    pub required_order: i64,
    pub reason: String,
}

impl UniquenessVerdict {
    pub fn holds(&self) -> bool {
        self.condition != UniquenessCondition::Neither
    }
}

/// Sort key with the worst (smallest) guaranteed valuation first.
fn order_key(order: &Order) -> i64 {
    order.lower_bound().unwrap_or(i64::MAX)
}

/// Checks the sufficient conditions for at most one compatible family.
pub fn uniqueness_conditions(lambda: &LambdaSpec) -> UniquenessVerdict {
    let prime = lambda.prime();
    let (required, witnesses): (i64, Vec<(Option<TreeAddress>, Order)>) = if prime == 2 {
        let w = lambda
            .tables()
            .into_iter()
            .map(|(edge, t)| (edge.cloned(), t.cross_combination().order()))
            .collect();
        (3, w)
    } else {
        let w = lambda
            .tables()
            .into_iter()
            .flat_map(|(edge, t)| t.entries().map(|e| (edge.cloned(), e.order())))
            .collect();
        (1, w)
    };
    let (worst_edge, worst_order) = witnesses
        .into_iter()
        .min_by_key(|(_, o)| order_key(o))
        .unwrap_or((None, Order::Infinite));
    let ok = worst_order.at_least(required);
    let condition = match (ok, prime) {
        (false, _) => UniquenessCondition::Neither,
        (true, 2) => UniquenessCondition::ConditionII,
        (true, _) => UniquenessCondition::ConditionI,
    };
    let quantity = if prime == 2 { "cross combination" } else { "lambda entry" };
    let reason = format!(
        "worst {quantity} has order {worst_order}, {} {required}",
        if ok { "meeting the required" } else { "below the required" }
    );
    UniquenessVerdict { condition, prime, worst_edge, worst_order, required_order: required, reason }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ContractionStatus {
    Satisfied,
    /// Differences vanished at working precision before the inequality could be witnessed.
    Indeterminate,
    Violated,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VertexContraction {
    pub vertex: TreeAddress,
    /// `ord(h_x - s_x)`.
    pub parent_gap: Order,
    /// `ord` of the largest `|h_y - s_y|` over `y in S(x)`.
    pub child_gap: Order,
    pub status: ContractionStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContractionReport {
    pub condition: UniquenessCondition,
    /// Required `ord(h_x - s_x) - min_y ord(h_y - s_y)`; ratio `p^-gain`.
    pub required_gain: i64,
    pub vertices: Vec<VertexContraction>,
    pub violations: usize,
    pub indeterminate: usize,
    /// Smallest gain witnessed exactly; the largest observed ratio is `p^-min_observed_gain`.
    pub min_observed_gain: Option<i64>,
}

/// Checks `|h_x - s_x|_p <= r max_{y in S(x)} |h_y - s_y|_p` with `r = 1/p` (p odd) or `1/2`.
pub fn contraction_ratio_check(
    lambda: &LambdaSpec,
    field_a: &BoundaryField,
    field_b: &BoundaryField,
    slice: &TreeSlice,
) -> Result<ContractionReport> {
    let verdict = uniqueness_conditions(lambda);
    if !verdict.holds() {
        return Err(Error::Refused(format!("uniqueness hypotheses fail: {}", verdict.reason)));
    }
    let required_gain = 1;
    fn lookup<'f>(field: &'f BoundaryField, a: &TreeAddress) -> Result<&'f Padic> {
        field.value(a).ok_or_else(|| Error::Config(format!("field has no value at {a}")))
    }
    let gap = |a: &TreeAddress| -> Result<Order> {
        Ok(lookup(field_a, a)?.distance_order(lookup(field_b, a)?)?)
    };
    let mut vertices = Vec::new();
    for x in slice.vertices().iter().filter(|x| x.depth() < slice.depth()) {
        let parent_gap = gap(x)?;
        let mut exact_min: Option<i64> = None;
        let mut lower_min: Option<i64> = None;
        for y in slice.direct_successors(x)? {
            let g = gap(&y)?;
            if let Order::Exact(v) = g {
                exact_min = Some(exact_min.map_or(v, |m| m.min(v)));
            }
            if let Some(v) = g.lower_bound() {
                lower_min = Some(lower_min.map_or(v, |m| m.min(v)));
            }
        }
        let child_gap = match (exact_min, lower_min) {
            (Some(e), Some(l)) if e <= l => Order::Exact(e),
            (_, Some(l)) => Order::AtLeast(l),
            (_, None) => Order::Infinite,
        };
        let parent_lo = parent_gap.lower_bound();
        let status = match (exact_min, parent_gap) {
            (_, Order::Exact(w)) if lower_min.is_some_and(|l| w < l + required_gain) => ContractionStatus::Violated,
            (Some(e), _) if parent_lo.is_none_or(|w| w >= e + required_gain) => ContractionStatus::Satisfied,
            _ => ContractionStatus::Indeterminate,
        };
        vertices.push(VertexContraction { vertex: x.clone(), parent_gap, child_gap, status });
    }
    let violations = vertices.iter().filter(|v| v.status == ContractionStatus::Violated).count();
    let indeterminate = vertices.iter().filter(|v| v.status == ContractionStatus::Indeterminate).count();
    let min_observed_gain = vertices
        .iter()
        .filter_map(|v| match (v.parent_gap, v.child_gap) {
            (Order::Exact(w), Order::Exact(e)) => Some(w - e),
            _ => None,
        })
        .min();
    Ok(ContractionReport {
        condition: verdict.condition,
        required_gain,
        vertices,
        violations,
        indeterminate,
        min_observed_gain,
    })
}

/// Fixed point of `z -> ((a z + b) / (c z + d))^k` near 1, found two ways.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MobiusFixedPoint {
    /// From certified contraction iteration starting at 1.
    pub z: Padic,
    pub iterations: usize,
    /// From Newton lifting of `z (c z + d)^k - (a z + b)^k`.
    pub hensel_z: Padic,
    pub hensel_seed: String,
    /// `ord(z - ((a z + b)/(c z + d))^k)` with `z`'s digits taken as exact.
    pub residual: Order,
    /// `ord(z - 1)`.
    pub distance_from_one: Order,
}

pub(crate) fn solve_mobius_power(
    a: &Padic,
    b: &Padic,
    c: &Padic,
    d: &Padic,
    k: u32,
) -> Result<MobiusFixedPoint> {
    let precision = [a, b, c, d].iter().map(|x| x.precision()).min().unwrap_or(1);
    let map = |z: &Padic| -> Result<Padic, PadicError> {
        let ratio = (&(a * z) + b).try_div(&(&(c * z) + d))?;
        Ok(ratio.pow(k))
    };
    let start = a.integer_like(1).with_precision(precision);
    let fixed = iterate_contraction(map, &start, NormValue::Power(-1), default_iteration_cap(precision))?;
    let z = fixed.point;

    let z_poly = Polynomial::linear(&a.integer_like(1), &a.integer_like(0));
    let poly = z_poly
        .mul(&Polynomial::linear(c, d).pow(k))
        .sub(&Polynomial::linear(a, b).pow(k));
    let (hensel, hensel_seed) = match hensel_solve(&poly, 1) {
        Ok(root) => (root, "residue 1".to_string()),
        Err(PadicError::NoConvergence { .. }) => {
            let slope = poly.derivative().eval(&z);
            let sv = slope.valuation().ok_or_else(|| {
                Error::Internal("derivative vanishes at the iterated fixed point".into())
            })?;
            let digits = (2 * sv + 1).max(1) as u32;
            let seed = z.with_precision(digits);
            (hensel_lift(&poly, &seed)?, format!("iterate truncated to {digits} digits"))
        }
        Err(e) => return Err(e.into()),
    };
    if !z.agrees_with(&hensel.root) {
        return Err(Error::Internal(format!(
            "contraction fixed point {z} disagrees with Hensel root {}",
            hensel.root
        )));
    }
    let exact_z = z.with_precision(precision + 4);
    let residual = exact_z.distance_order(&map(&exact_z)?)?;
    let distance_from_one = z.distance_order(&z.integer_like(1))?;
    Ok(MobiusFixedPoint {
        z,
        iterations: fixed.iterations,
        hensel_z: hensel.root,
        hensel_seed,
        residual,
        distance_from_one,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TranslationInvariantSolution {
    #[serde(flatten)]
    pub fixed_point: MobiusFixedPoint,
    /// `h* = 1/2 log_p z*`; the constant field `h*` satisfies the recursion at non-root vertices.
    pub h: Padic,
}

/// Constant solution `h_x = h*` of the recursion for a homogeneous interaction,
/// via `z = ((a z + b)/(c z + d))^k` with `z = exp_p(2h)`.
pub fn translation_invariant_solve(lambda: &LambdaSpec, k: u32) -> Result<TranslationInvariantSolution> {
    let Interaction::Homogeneous(table) = lambda.interaction() else {
        return Err(Error::Config("translation-invariant solve needs a homogeneous interaction".into()));
    };
    if k == 0 {
        return Err(Error::Geometry("tree order k must be at least 1".into()));
    }
    let verdict = uniqueness_conditions(lambda);
    if !verdict.holds() {
        return Err(Error::Refused(format!("uniqueness hypotheses fail: {}", verdict.reason)));
    }
    let w = EdgeWeights::from_table(table)?;
    let fixed_point = solve_mobius_power(&w.a, &w.b, &w.c, &w.d, k)?;
    let h = fixed_point.z.log()?.half();
    Ok(TranslationInvariantSolution { fixed_point, h })
}
