use super::number::{Order, Padic};
use crate::error::PadicError;

/// Dense univariate polynomial with p-adic coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coefficients: Vec<Padic>,
}

impl Polynomial {
    pub fn new(coefficients: Vec<Padic>) -> Polynomial {
        assert!(!coefficients.is_empty(), "polynomial needs at least one coefficient");
        let prime = coefficients[0].prime();
        assert!(coefficients.iter().all(|c| c.prime() == prime), "mixed primes");
        Polynomial { coefficients }
    }

    /// `slope * z + intercept`
    pub fn linear(slope: &Padic, intercept: &Padic) -> Polynomial {
        Polynomial::new(vec![intercept.clone(), slope.clone()])
    }

    pub fn coefficients(&self) -> &[Padic] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn prime(&self) -> u32 {
        self.coefficients[0].prime()
    }

    pub fn eval(&self, z: &Padic) -> Padic {
        let mut coeffs = self.coefficients.iter().rev();
        let mut acc = coeffs.next().expect("nonempty").clone();
        for c in coeffs {
            acc = &(&acc * z) + c;
        }
        acc
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coefficients.len() == 1 {
            return Polynomial::new(vec![self.coefficients[0].integer_like(0)]);
        }
        let coefficients = self
            .coefficients
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.mul_int(i as i64))
            .collect();
        Polynomial::new(coefficients)
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let zero = self.coefficients[0].integer_like(0);
        let mut out = vec![zero; self.coefficients.len() + other.coefficients.len() - 1];
        for (i, a) in self.coefficients.iter().enumerate() {
            for (j, b) in other.coefficients.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Polynomial::new(out)
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let n = self.coefficients.len().max(other.coefficients.len());
        let zero = self.coefficients[0].integer_like(0);
        let out = (0..n)
            .map(|i| {
                let a = self.coefficients.get(i).unwrap_or(&zero);
                let b = other.coefficients.get(i).unwrap_or(&zero);
                a - b
            })
            .collect();
        Polynomial::new(out)
    }

    pub fn pow(&self, exponent: u32) -> Polynomial {
        let mut acc = Polynomial::new(vec![self.coefficients[0].integer_like(1)]);
        for _ in 0..exponent {
            acc = acc.mul(self);
        }
        acc
    }

    /// Absolute precision to which every coefficient is known.
    pub fn abs_precision(&self) -> Option<i64> {
        self.coefficients.iter().filter_map(Padic::abs_precision).min()
    }
}

/// A root produced by Newton lifting.
#[derive(Clone, Debug)]
pub struct HenselRoot {
    pub root: Padic,
    /// `f(root)`, evaluated with the returned digits taken as exact.
    pub residual: Padic,
    pub iterations: usize,
}

const GUARD: u32 = 4;
const MAX_NEWTON_STEPS: usize = 64;

/// Lifts a root modulo p of `poly` from the integer residue `seed_residue`.
pub fn hensel_solve(poly: &Polynomial, seed_residue: u64) -> Result<HenselRoot, PadicError> {
    let precision = poly.coefficients.iter().map(Padic::precision).max().unwrap_or(1);
    let seed = Padic::from_integer(
        (seed_residue % poly.prime() as u64) as i64,
        poly.prime() as u64,
        precision,
    )?;
    hensel_lift(poly, &seed)
}

/// Newton iteration `z <- z - f(z)/f'(z)` from `seed`, which must satisfy
/// `|f(seed)|_p < |f'(seed)|_p^2`.
///
/// The returned root is accurate to the coefficient precision minus `ord f'(root)`.
pub fn hensel_lift(poly: &Polynomial, seed: &Padic) -> Result<HenselRoot, PadicError> {
    let derivative = poly.derivative();
    let residual = poly.eval(seed);
    let slope = derivative.eval(seed);
    let not_applicable = || PadicError::NoConvergence { residual: residual.order(), derivative: slope.order() };
    let slope_val = slope.valuation().ok_or_else(not_applicable)?;
    if let Some(r) = residual.order().lower_bound() {
        if r <= 2 * slope_val {
            return Err(not_applicable());
        }
    }

    let coeff_abs = poly.abs_precision().unwrap_or(seed.precision() as i64);
    let seed_val = seed.valuation().unwrap_or(0).max(0);
    let root_abs = coeff_abs - slope_val;
    if root_abs <= seed_val {
        return Err(not_applicable());
    }
    let work = (coeff_abs + slope_val) as u32 + GUARD;
    let mut z = seed.with_precision(work);
    let mut iterations = 0;
    loop {
        let fz = poly.eval(&z);
        if fz.order().at_least(coeff_abs) {
            break;
        }
        if iterations == MAX_NEWTON_STEPS {
            return Err(PadicError::IterationCap(MAX_NEWTON_STEPS));
        }
        let step = fz.try_div(&derivative.eval(&z))?;
        z = (&z - &step).with_precision(work);
        iterations += 1;
    }
    let rel = (root_abs - z.valuation().unwrap_or(0)).max(1) as u32;
    let root = z.with_precision(rel);
    let residual = poly.eval(&root.with_precision(work));
    Ok(HenselRoot { root, residual, iterations })
}

/// Residual check used by the solvers: `|f(root)|_p <= p^(-bound)`.
pub fn residual_within(residual: &Padic, bound: i64) -> bool {
    matches!(residual.order(), Order::Infinite) || residual.order().at_least(bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, p: u64, prec: u32) -> Padic {
        Padic::from_integer(n, p, prec).unwrap()
    }

    #[test]
    fn linear_root_is_immediate() {
        let poly = Polynomial::new(vec![q(-1, 5, 16), q(1, 5, 16)]);
        let root = hensel_solve(&poly, 1).unwrap();
        assert!(root.root.agrees_with(&q(1, 5, 16)));
        assert_eq!(root.iterations, 0);
    }

    #[test]
    fn inapplicable_seed_reports_orders() {
        // z^2 - 10 has no root congruent to 0 mod 3
        let poly = Polynomial::new(vec![q(-10, 3, 16), q(0, 3, 16), q(1, 3, 16)]);
        match hensel_solve(&poly, 0) {
            Err(PadicError::NoConvergence { residual, derivative }) => {
                assert_eq!(residual, Order::Exact(0));
                assert_eq!(derivative, Order::Infinite);
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn polynomial_algebra() {
        let z_plus_4 = Polynomial::linear(&q(1, 3, 8), &q(4, 3, 8));
        let squared = z_plus_4.pow(2);
        assert_eq!(squared.degree(), 2);
        let at_two = squared.eval(&q(2, 3, 8));
        assert!(at_two.agrees_with(&q(36, 3, 8)));
        let d = squared.derivative().eval(&q(2, 3, 8));
        assert!(d.agrees_with(&q(12, 3, 8)));
    }
}
