use serde::Serialize;

use super::lambda::{LambdaSpec, Spin};
use super::markov::{default_path_window, marginal_from_matrices, path_matrices, Normalization};
use super::measure::finite_volume_measure;
use crate::error::{Error, Result};
use crate::padic::{NormValue, Padic};
use crate::recursion::BoundaryField;
use crate::tree::TreeSlice;

/// Windows up to this many vertices are scanned over every spin assignment.
const EXHAUSTIVE_WINDOW: usize = 13;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureNorms {
    pub depth: usize,
    pub configurations: usize,
    pub max_norm: Option<NormValue>,
    pub min_norm: Option<NormValue>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarginalNorms {
    /// Half-length `n` of the window `x_{-n} .. x_n`.
    pub n: usize,
    pub exhaustive: bool,
    pub max_norm: Option<NormValue>,
    /// Smallest entry norm among the literal-mode matrices along the window.
    pub literal_factor_min_norm: Option<NormValue>,
    /// `mu_pi` of the all-`+1` window.
    pub all_plus: Padic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub value: bool,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormProfile {
    pub prime: u32,
    pub normalization: Normalization,
    pub measures: Vec<MeasureNorms>,
    pub marginals: Vec<MarginalNorms>,
    pub bounded: Verdict,
}

fn max_min(norms: impl Iterator<Item = NormValue>) -> (Option<NormValue>, Option<NormValue>) {
    norms.fold((None, None), |(hi, lo), n| {
        (Some(hi.map_or(n, |h: NormValue| h.max(n))), Some(lo.map_or(n, |l: NormValue| l.min(n))))
    })
}

/// Norms of `mu^(n)` for `n <= n_max` and of the marginal path measures for window
/// half-lengths `1..=windows` along the default path, with a boundedness verdict.
pub fn measure_norm_profile(
    lambda: &LambdaSpec,
    field: &BoundaryField,
    slice: &TreeSlice,
    n_max: usize,
    windows: usize,
    normalization: Normalization,
) -> Result<NormProfile> {
    if n_max > slice.depth() {
        return Err(Error::Geometry(format!("n_max {n_max} exceeds the slice depth {}", slice.depth())));
    }
    let mut measures = Vec::new();
    for n in 0..=n_max {
        let sub = TreeSlice::build(slice.order(), n)?;
        let mu = finite_volume_measure(lambda, field, &sub)?;
        let (max_norm, min_norm) = max_min(mu.weights().iter().filter_map(|w| w.norm().ok()));
        measures.push(MeasureNorms { depth: n, configurations: mu.weights().len(), max_norm, min_norm });
    }

    let marginals = marginal_sweep(lambda, field, windows, normalization)?;
    let bounded = verdict(&measures, &marginals);
    Ok(NormProfile { prime: lambda.prime(), normalization, measures, marginals, bounded })
}

/// Marginal path-measure norms along the default path for half-lengths `1..=windows`.
pub fn marginal_sweep(
    lambda: &LambdaSpec,
    field: &BoundaryField,
    windows: usize,
    normalization: Normalization,
) -> Result<Vec<MarginalNorms>> {
    let mut marginals = Vec::new();
    for n in 1..=windows {
        let window = default_path_window(n);
        let matrices = path_matrices(&window, lambda, field, normalization)?;
        let literal = path_matrices(&window, lambda, field, Normalization::Literal)?;
        let (_, literal_factor_min_norm) =
            max_min(literal.iter().flat_map(|m| m.entries()).filter_map(|e| e.norm().ok()));
        let exhaustive = window.len() <= EXHAUSTIVE_WINDOW;
        let count = if exhaustive { 1u64 << window.len() } else { 1 };
        let mut norms = Vec::new();
        let mut all_plus = None;
        for bits in 0..count {
            let omega: Vec<Spin> = (0..window.len())
                .map(|i| if bits >> i & 1 == 1 { Spin::Down } else { Spin::Up })
                .collect();
            let value = marginal_from_matrices(&matrices, &omega)?;
            if let Ok(norm) = value.norm() {
                norms.push(norm);
            }
            if bits == 0 {
                all_plus = Some(value);
            }
        }
        let (max_norm, _) = max_min(norms.into_iter());
        let all_plus = all_plus.expect("the all-plus window is always evaluated");
        marginals.push(MarginalNorms { n, exhaustive, max_norm, literal_factor_min_norm, all_plus });
    }
    Ok(marginals)
}

fn verdict(measures: &[MeasureNorms], marginals: &[MarginalNorms]) -> Verdict {
    let one = NormValue::Power(0);
    let all_at_most_one = measures.iter().map(|m| m.max_norm).chain(marginals.iter().map(|m| m.max_norm))
        .all(|n| n.is_some_and(|n| n <= one));
    let seq: Vec<Option<NormValue>> = marginals.iter().map(|m| m.max_norm).collect();
    let increasing = seq.len() >= 2
        && seq.windows(2).all(|w| matches!((w[0], w[1]), (Some(a), Some(b)) if b > a));
    if all_at_most_one {
        Verdict { value: true, reason: "every computed measure and marginal value has norm at most 1".into() }
    } else if increasing {
        let last = seq.last().copied().flatten().map(|n| n.to_string()).unwrap_or_default();
        Verdict {
            value: false,
            reason: format!("marginal path-measure norms increase strictly with the window, reaching {last}"),
        }
    } else {
        Verdict { value: false, reason: "norms exceed 1 but show no strict growth; inconclusive".into() }
    }
}
