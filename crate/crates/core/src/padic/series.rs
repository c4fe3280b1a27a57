//! The p-adic exponential and logarithm as truncated power series.
//!
//! Both series are evaluated with unit arithmetic modulo `p^(target + GUARD_DIGITS)`,
//! where `target` is the absolute precision the input justifies. Terms are dropped
//! once a lower bound on their valuation reaches that modulus, so the truncation is
//! exact at the reported precision.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::number::{pow_p, split_valuation_u64, unit_inverse, Padic};
use crate::error::PadicError;

/// Extra digits carried past the target precision while summing.
pub const GUARD_DIGITS: i64 = 2;

/// Smallest valuation inside `B(0, p^(-1/(p-1)))`: 1 for odd p, 2 for p = 2.
pub fn exp_domain_valuation(prime: u32) -> i64 {
    if prime == 2 {
        2
    } else {
        1
    }
}

impl Padic {
    /// Whether `|x|_p < p^(-1/(p-1))`, the convergence ball of `exp_p`.
    pub fn in_exp_domain(&self) -> bool {
        self.order().at_least(exp_domain_valuation(self.prime()))
    }

    /// `exp_p(x) = sum_{n >= 0} x^n / n!`.
    ///
    /// The result is known to the same absolute precision as `x`, since
    /// `|exp_p(x + d) - exp_p(x)|_p = |d|_p` on the domain.
    pub fn exp(&self) -> Result<Padic, PadicError> {
        let p = self.prime();
        if !self.in_exp_domain() {
            return Err(PadicError::Domain {
                op: "exp_p",
                detail: format!("ord x = {} is below {}", self.order(), exp_domain_valuation(p)),
            });
        }
        let (valuation, unit) = match (self.valuation(), self.unit()) {
            (Some(v), Some(u)) => (v, u),
            _ => {
                return Ok(match self.abs_precision() {
                    None => self.integer_like(1),
                    Some(abs) => Padic::from_residue(p, BigUint::one(), abs, self.precision()),
                });
            }
        };
        let target = valuation + self.precision() as i64;
        let work = target + GUARD_DIGITS;
        let modulus = pow_p(p, work as u32);

        let mut acc = BigUint::one();
        let mut term_unit = BigUint::one();
        let mut term_val: i64 = 0;
        for n in 1u64.. {
            // ord(x^n / n!) >= n v - floor((n-1)/(p-1)), non-decreasing in n
            let floor = (n as i64 - 1) / (p as i64 - 1);
            if n as i64 * valuation - floor >= work {
                break;
            }
            let (nv, nu) = split_valuation_u64(n, p);
            term_unit = term_unit * unit % &modulus;
            term_unit = term_unit * unit_inverse(&BigUint::from(nu), &modulus) % &modulus;
            term_val += valuation - nv as i64;
            if term_val < work {
                acc = (acc + &term_unit * pow_p(p, term_val as u32)) % &modulus;
            }
        }
        Ok(Padic::from_residue(p, acc, target, self.precision()))
    }

    /// `log_p(x) = sum_{n >= 1} (-1)^(n+1) (x-1)^n / n` for `|x - 1|_p < 1`.
    pub fn log(&self) -> Result<Padic, PadicError> {
        let p = self.prime();
        let in_ball = self.valuation() == Some(0)
            && self.unit().is_some_and(|u| (u % p).is_one());
        if !in_ball {
            return Err(PadicError::Domain {
                op: "log_p",
                detail: "requires |x - 1|_p < 1".into(),
            });
        }
        let shifted = self - &self.integer_like(1);
        let (s, unit) = match (shifted.valuation(), shifted.unit()) {
            (Some(s), Some(u)) => (s, u.clone()),
            _ => return Ok(shifted),
        };
        let target = s + shifted.precision() as i64;
        let work = target + GUARD_DIGITS;
        let modulus = pow_p(p, work as u32);

        let mut acc = BigUint::zero();
        let mut power = BigUint::one();
        for n in 1u64.. {
            // ord((x-1)^n / n) >= n s - floor(log_p n), non-decreasing in n
            if n as i64 * s - n.ilog(p as u64) as i64 >= work {
                break;
            }
            power = power * &unit % &modulus;
            let (nv, nu) = split_valuation_u64(n, p);
            let val = n as i64 * s - nv as i64;
            if val >= work {
                continue;
            }
            let term = &power * unit_inverse(&BigUint::from(nu), &modulus) % &modulus
                * pow_p(p, val as u32)
                % &modulus;
            acc = if n % 2 == 1 {
                (acc + term) % &modulus
            } else {
                (acc + &modulus - term) % &modulus
            };
        }
        Ok(Padic::from_residue(p, acc, target, self.precision()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::NormValue;

    fn q(n: i64, d: i64, p: u64, prec: u32) -> Padic {
        Padic::from_rational(n, d, p, prec).unwrap()
    }

    #[test]
    fn exp_domain_boundary() {
        assert!(q(3, 1, 3, 8).in_exp_domain());
        assert!(!q(2, 1, 2, 8).in_exp_domain());
        assert!(q(4, 1, 2, 8).in_exp_domain());
        assert!(!q(1, 1, 5, 8).in_exp_domain());
        assert!(Padic::zero(7, 8).unwrap().in_exp_domain());
    }

    #[test]
    fn exp_of_zero_is_one() {
        let one = Padic::zero(3, 12).unwrap().exp().unwrap();
        assert_eq!(one, q(1, 1, 3, 12));
    }

    #[test]
    fn exp_rejects_outside_domain() {
        assert!(matches!(q(2, 1, 2, 8).exp(), Err(PadicError::Domain { .. })));
        assert!(matches!(q(1, 1, 3, 8).exp(), Err(PadicError::Domain { .. })));
    }

    #[test]
    fn log_of_one_vanishes() {
        let l = q(1, 1, 3, 10).log().unwrap();
        assert!(l.is_negligible());
    }

    #[test]
    fn log_rejects_outside_ball() {
        assert!(q(2, 1, 3, 8).log().is_err());
        assert!(q(3, 1, 3, 8).log().is_err());
    }

    #[test]
    fn exp_log_norms_on_a_sample() {
        let x = q(6, 7, 3, 16);
        let e = x.exp().unwrap();
        assert_eq!(e.norm().unwrap(), NormValue::Power(0));
        assert_eq!((&e - &e.integer_like(1)).norm().unwrap(), x.norm().unwrap());
        assert!(e.log().unwrap().agrees_with(&x));
    }

    #[test]
    fn two_adic_log_of_minus_one_vanishes() {
        // log_2(-1) = 0 although |-1 - 1|_2 = 1/2
        assert!(q(-1, 1, 2, 20).log().unwrap().is_negligible());
    }
}
