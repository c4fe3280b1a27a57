//! Fixed-precision p-adic numbers and the analytic tools built on them.

mod contraction;
mod hensel;
mod number;
mod series;

pub use contraction::{default_iteration_cap, iterate_contraction, FixedPoint};
pub use hensel::{hensel_lift, hensel_solve, residual_within, HenselRoot, Polynomial};
pub use number::{parse_rational, NormValue, Order, Padic, DEFAULT_PRECISION};
pub use series::{exp_domain_valuation, GUARD_DIGITS};

pub(crate) use number::is_prime;

use crate::error::PadicError;

/// The four field operations exposed as one entry point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithmeticOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Like the operator impls, but reports a result lost to cancellation as an error.
pub fn arithmetic(op: ArithmeticOp, x: &Padic, y: &Padic) -> Result<Padic, PadicError> {
    let out = match op {
        ArithmeticOp::Add => x.try_add(y)?,
        ArithmeticOp::Sub => x.try_sub(y)?,
        ArithmeticOp::Mul => x.try_mul(y)?,
        ArithmeticOp::Div => x.try_div(y)?,
    };
    if let Some(abs_precision) = out.is_vanishing().then(|| out.abs_precision()).flatten() {
        return Err(PadicError::Indeterminate { abs_precision });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_reports_cancellation() {
        let x = Padic::from_rational(5, 7, 5, 12).unwrap();
        assert!(matches!(
            arithmetic(ArithmeticOp::Add, &x, &-&x),
            Err(PadicError::Indeterminate { abs_precision: 13 })
        ));
        let y = Padic::from_integer(3, 3, 8).unwrap();
        let third = Padic::from_rational(1, 3, 3, 8).unwrap();
        let one = arithmetic(ArithmeticOp::Mul, &y, &third).unwrap();
        assert_eq!(one.digits(), vec![1, 0, 0, 0, 0, 0, 0, 0]);
        let other = Padic::from_integer(1, 5, 8).unwrap();
        assert_eq!(arithmetic(ArithmeticOp::Add, &y, &other), Err(PadicError::PrimeMismatch(3, 5)));
    }
}
