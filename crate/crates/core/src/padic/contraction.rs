use super::number::{NormValue, Order, Padic};
use crate::error::PadicError;

/// Outcome of a certified fixed-point iteration.
#[derive(Clone, Debug)]
pub struct FixedPoint {
    pub point: Padic,
    /// Number of map applications performed.
    pub iterations: usize,
    /// `ord(x_{m+1} - x_m)` for every step taken.
    pub gaps: Vec<Order>,
}

/// Default cap: the working precision plus a few spare steps.
pub fn default_iteration_cap(precision: u32) -> usize {
    precision as usize + 8
}

/// Iterates `map` from `start` until successive iterates agree through the working
/// precision, checking `|x_{m+1} - x_m| <= bound * |x_m - x_{m-1}|` at every step.
///
/// Iterates are re-padded to the precision of `start` before each application, so
/// digit loss inside `map` does not accumulate across steps.
pub fn iterate_contraction<F>(
    mut map: F,
    start: &Padic,
    bound: NormValue,
    max_iterations: usize,
) -> Result<FixedPoint, PadicError>
where
    F: FnMut(&Padic) -> Result<Padic, PadicError>,
{
    let gain = match bound {
        NormValue::Zero => None,
        NormValue::Power(e) if e < 0 => Some(-e),
        NormValue::Power(e) => {
            return Err(PadicError::Domain {
                op: "iterate_contraction",
                detail: format!("bound p^{e} is not a contraction ratio"),
            })
        }
    };
    let working = start.precision();
    let mut x = start.clone();
    let mut gaps: Vec<Order> = Vec::new();
    for step in 1..=max_iterations {
        let y = map(&x)?;
        let gap = y.distance_order(&x)?;
        if let Some(&previous) = gaps.last() {
            let shrunk = match (gain, previous, gap) {
                (_, _, Order::Infinite) => true,
                (None, _, g) => !g.is_exact(),
                // a gap that vanished at working precision is not a witness either way
                (Some(_), _, Order::AtLeast(_)) => true,
                (Some(r), Order::Exact(pv), Order::Exact(g)) => g >= pv + r,
                (Some(_), _, Order::Exact(_)) => false,
            };
            if !shrunk {
                return Err(PadicError::ContractionViolation { step, previous, current: gap, bound });
            }
        }
        gaps.push(gap);
        if !gap.is_exact() {
            return Ok(FixedPoint { point: y, iterations: step, gaps });
        }
        x = y.with_precision(working);
    }
    Err(PadicError::IterationCap(max_iterations))
}
