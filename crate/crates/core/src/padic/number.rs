use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::PadicError;

/// Relative precision used when a caller does not pick one.
pub const DEFAULT_PRECISION: u32 = 32;

/// A p-adic norm `|x|_p = p^exponent`, with a separate value for `|0|_p = 0`.
///
/// The exponent is the negated valuation, so `|10|_2 = 2^-1` has exponent `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NormValue {
    Zero,
    Power(i64),
}

impl NormValue {
    pub fn from_valuation(valuation: i64) -> Self {
        NormValue::Power(-valuation)
    }

    pub fn exponent(&self) -> Option<i64> {
        match self {
            NormValue::Zero => None,
            NormValue::Power(e) => Some(*e),
        }
    }

    /// The valuation this norm corresponds to; `None` for zero (infinite valuation).
    pub fn valuation(&self) -> Option<i64> {
        self.exponent().map(|e| -e)
    }
}

impl PartialOrd for NormValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NormValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (NormValue::Zero, NormValue::Zero) => Ordering::Equal,
            (NormValue::Zero, _) => Ordering::Less,
            (_, NormValue::Zero) => Ordering::Greater,
            (NormValue::Power(a), NormValue::Power(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for NormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormValue::Zero => write!(f, "0"),
            NormValue::Power(e) => write!(f, "p^{e}"),
        }
    }
}

impl Serialize for NormValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire {
            #[serde(skip_serializing_if = "Option::is_none")]
            exponent: Option<i64>,
            #[serde(skip_serializing_if = "std::ops::Not::not")]
            zero: bool,
        }
        let wire = match self {
            NormValue::Zero => Wire { exponent: None, zero: true },
            NormValue::Power(e) => Wire { exponent: Some(*e), zero: false },
        };
        wire.serialize(serializer)
    }
}

/// What is known about the valuation of a computed value.
///
/// `AtLeast(a)` is the state of a value that vanishes at working precision: it is
/// only known to be divisible by `p^a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Order {
    Infinite,
    Exact(i64),
    AtLeast(i64),
}

impl Order {
    /// Guaranteed lower bound on the valuation; `None` means infinite.
    pub fn lower_bound(&self) -> Option<i64> {
        match self {
            Order::Infinite => None,
            Order::Exact(v) | Order::AtLeast(v) => Some(*v),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Order::Exact(_))
    }

    /// True when the valuation is known to be at least `bound`.
    pub fn at_least(&self, bound: i64) -> bool {
        self.lower_bound().is_none_or(|v| v >= bound)
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Infinite => write!(f, "inf"),
            Order::Exact(v) => write!(f, "{v}"),
            Order::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(rename_all = "snake_case")]
        enum Wire {
            Infinite,
            Exact(i64),
            AtLeast(i64),
        }
        match *self {
            Order::Infinite => Wire::Infinite,
            Order::Exact(v) => Wire::Exact(v),
            Order::AtLeast(v) => Wire::AtLeast(v),
        }
        .serialize(serializer)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    Zero,
    /// Known only to be `O(p^abs_precision)`.
    Vanishing { abs_precision: i64 },
    /// `p^valuation * unit`, with `unit` a p-adic unit reduced modulo `p^precision`.
    Unit { valuation: i64, unit: BigUint },
}

/// A p-adic number with a tracked number of significant digits.
///
/// Nonzero values are stored as `p^valuation * u` where `u` is a unit known modulo
/// `p^precision`. Exact zero carries its precision only as context for later
/// operations (for example `exp_p(0) = 1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Padic {
    prime: u32,
    precision: u32,
    repr: Repr,
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn check_prime(p: u64) -> Result<u32, PadicError> {
    if !is_prime(p) {
        return Err(PadicError::NotPrime(p));
    }
    u32::try_from(p).map_err(|_| PadicError::NotPrime(p))
}

pub(crate) fn pow_p(p: u32, e: u32) -> BigUint {
    num_traits::pow(BigUint::from(p), e as usize)
}

/// Strips the largest power of `p` from a nonzero integer.
pub(crate) fn split_valuation(n: &BigUint, p: u32) -> (u32, BigUint) {
    debug_assert!(!n.is_zero());
    let pb = BigUint::from(p);
    let mut v = 0;
    let mut rest = n.clone();
    loop {
        let (q, r) = rest.div_rem(&pb);
        if !r.is_zero() {
            return (v, rest);
        }
        v += 1;
        rest = q;
    }
}

pub(crate) fn split_valuation_u64(mut n: u64, p: u32) -> (u32, u64) {
    debug_assert!(n != 0);
    let p = p as u64;
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    (v, n)
}

/// Inverse of a unit modulo `modulus` (a power of p).
pub(crate) fn unit_inverse(unit: &BigUint, modulus: &BigUint) -> BigUint {
    if modulus.is_one() {
        return BigUint::zero();
    }
    unit.modinv(modulus)
        .expect("p-adic units are invertible modulo powers of p")
}

fn clamp_precision(abs: i64, valuation: i64) -> u32 {
    let rel = abs - valuation;
    debug_assert!(rel >= 1);
    u32::try_from(rel).expect("precision fits in u32")
}

impl Padic {
    pub(crate) fn from_unit_unchecked(prime: u32, valuation: i64, unit: BigUint, precision: u32) -> Padic {
        debug_assert!(precision >= 1);
        let modulus = pow_p(prime, precision);
        let unit = unit % modulus;
        debug_assert!(!(&unit % prime).is_zero(), "unit part must be prime to p");
        Padic { prime, precision, repr: Repr::Unit { valuation, unit } }
    }

    pub(crate) fn vanishing(prime: u32, abs_precision: i64, context: u32) -> Padic {
        Padic { prime, precision: context.max(1), repr: Repr::Vanishing { abs_precision } }
    }

    /// Builds a value from an integer `raw` that is known modulo `p^abs_precision`.
    pub(crate) fn from_residue(prime: u32, raw: BigUint, abs_precision: i64, context: u32) -> Padic {
        Self::from_scaled_residue(prime, 0, raw, abs_precision, context)
    }

    /// `p^shift * raw`, known modulo `p^abs_precision`.
    pub(crate) fn from_scaled_residue(
        prime: u32,
        shift: i64,
        raw: BigUint,
        abs_precision: i64,
        context: u32,
    ) -> Padic {
        let width = abs_precision - shift;
        if width <= 0 {
            return Padic::vanishing(prime, abs_precision, context);
        }
        let raw = raw % pow_p(prime, width as u32);
        if raw.is_zero() {
            return Padic::vanishing(prime, abs_precision, context);
        }
        let (v, unit) = split_valuation(&raw, prime);
        let valuation = shift + v as i64;
        Padic::from_unit_unchecked(prime, valuation, unit, clamp_precision(abs_precision, valuation))
    }

    /// Exact zero.
    pub fn zero(prime: u64, precision: u32) -> Result<Padic, PadicError> {
        let prime = check_prime(prime)?;
        if precision == 0 {
            return Err(PadicError::ZeroPrecision);
        }
        Ok(Padic { prime, precision, repr: Repr::Zero })
    }

    pub fn one(prime: u64, precision: u32) -> Result<Padic, PadicError> {
        Padic::from_integer(1, prime, precision)
    }

    pub fn from_integer(n: i64, prime: u64, precision: u32) -> Result<Padic, PadicError> {
        Padic::from_rational(n, 1, prime, precision)
    }

    /// The p-adic expansion of `numerator / denominator` to `precision` significant digits.
    pub fn from_rational(
        numerator: impl Into<BigInt>,
        denominator: impl Into<BigInt>,
        prime: u64,
        precision: u32,
    ) -> Result<Padic, PadicError> {
        let numerator = numerator.into();
        let denominator = denominator.into();
        let prime = check_prime(prime)?;
        if precision == 0 {
            return Err(PadicError::ZeroPrecision);
        }
        if denominator.is_zero() {
            return Err(PadicError::ZeroDenominator);
        }
        if numerator.is_zero() {
            return Ok(Padic { prime, precision, repr: Repr::Zero });
        }
        let negative = (numerator.sign() == Sign::Minus) != (denominator.sign() == Sign::Minus);
        let (vn, n) = split_valuation(numerator.magnitude(), prime);
        let (vd, d) = split_valuation(denominator.magnitude(), prime);
        let modulus = pow_p(prime, precision);
        let mut unit = (n % &modulus) * unit_inverse(&(d % &modulus), &modulus) % &modulus;
        if negative {
            unit = (&modulus - unit) % &modulus;
        }
        Ok(Padic::from_unit_unchecked(prime, vn as i64 - vd as i64, unit, precision))
    }

    /// Builds `p^valuation * (d_0 + d_1 p + ...)` from little-endian digits.
    pub fn from_digits(
        prime: u64,
        valuation: i64,
        digits: &[u32],
        precision: u32,
    ) -> Result<Padic, PadicError> {
        let prime = check_prime(prime)?;
        if precision == 0 {
            return Err(PadicError::ZeroPrecision);
        }
        if digits.len() != precision as usize {
            return Err(PadicError::InvalidDigits(format!(
                "expected {precision} digits, got {}",
                digits.len()
            )));
        }
        if let Some(bad) = digits.iter().find(|&&d| d >= prime) {
            return Err(PadicError::InvalidDigits(format!("digit {bad} is not below {prime}")));
        }
        if digits[0] == 0 {
            return Err(PadicError::InvalidDigits("leading digit of a unit part must be nonzero".into()));
        }
        let unit = digits
            .iter()
            .rev()
            .fold(BigUint::zero(), |acc, &d| acc * prime + d);
        Ok(Padic::from_unit_unchecked(prime, valuation, unit, precision))
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    /// Relative precision (significant digits). For exact or vanishing zeros this is
    /// the precision carried as context.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Exact zero, as opposed to a value that merely vanishes at working precision.
    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero)
    }

    pub fn is_vanishing(&self) -> bool {
        matches!(self.repr, Repr::Vanishing { .. })
    }

    /// True for exact zero and for values that vanish at working precision.
    pub fn is_negligible(&self) -> bool {
        !matches!(self.repr, Repr::Unit { .. })
    }

    /// Valuation of a value with at least one significant digit.
    pub fn valuation(&self) -> Option<i64> {
        match self.repr {
            Repr::Unit { valuation, .. } => Some(valuation),
            _ => None,
        }
    }

    pub fn order(&self) -> Order {
        match self.repr {
            Repr::Zero => Order::Infinite,
            Repr::Vanishing { abs_precision } => Order::AtLeast(abs_precision),
            Repr::Unit { valuation, .. } => Order::Exact(valuation),
        }
    }

    /// `|x|_p`. A value that vanishes at working precision has no known norm.
    pub fn norm(&self) -> Result<NormValue, PadicError> {
        match self.repr {
            Repr::Zero => Ok(NormValue::Zero),
            Repr::Vanishing { abs_precision } => Err(PadicError::Indeterminate { abs_precision }),
            Repr::Unit { valuation, .. } => Ok(NormValue::from_valuation(valuation)),
        }
    }

    /// The power of p modulo which this value is known; `None` for exact zero.
    pub fn abs_precision(&self) -> Option<i64> {
        match self.repr {
            Repr::Zero => None,
            Repr::Vanishing { abs_precision } => Some(abs_precision),
            Repr::Unit { valuation, .. } => Some(valuation + self.precision as i64),
        }
    }

    pub fn unit(&self) -> Option<&BigUint> {
        match &self.repr {
            Repr::Unit { unit, .. } => Some(unit),
            _ => None,
        }
    }

    /// Little-endian base-p digits of the unit part; empty for zeros.
    pub fn digits(&self) -> Vec<u32> {
        let Repr::Unit { unit, .. } = &self.repr else {
            return Vec::new();
        };
        let p = BigUint::from(self.prime);
        let mut rest = unit.clone();
        (0..self.precision)
            .map(|_| {
                let (q, r) = rest.div_rem(&p);
                rest = q;
                r.to_u32().expect("digit below p")
            })
            .collect()
    }

    /// The integer in `[0, p^m)` congruent to this value modulo `p^m`.
    ///
    /// Requires the value to be integral and known modulo at least `p^m`.
    pub fn residue(&self, m: u32) -> Result<BigUint, PadicError> {
        match &self.repr {
            Repr::Zero => Ok(BigUint::zero()),
            Repr::Vanishing { abs_precision } => {
                if *abs_precision >= m as i64 {
                    Ok(BigUint::zero())
                } else {
                    Err(PadicError::Indeterminate { abs_precision: *abs_precision })
                }
            }
            Repr::Unit { valuation, unit } => {
                let abs = valuation + self.precision as i64;
                if *valuation < 0 {
                    return Err(PadicError::Domain {
                        op: "residue",
                        detail: format!("valuation {valuation} is negative"),
                    });
                }
                if abs < m as i64 {
                    return Err(PadicError::Indeterminate { abs_precision: abs });
                }
                if *valuation >= m as i64 {
                    return Ok(BigUint::zero());
                }
                Ok(unit * pow_p(self.prime, *valuation as u32) % pow_p(self.prime, m))
            }
        }
    }

    /// Re-expresses the value with `precision` significant digits.
    ///
    /// Truncates when shrinking. When growing, the stored representative is taken as
    /// exact and padded with zero digits; a vanishing value becomes exact zero.
    pub fn with_precision(&self, precision: u32) -> Padic {
        let precision = precision.max(1);
        match &self.repr {
            Repr::Zero => Padic { precision, ..self.clone() },
            Repr::Vanishing { abs_precision } => {
                if precision <= self.precision {
                    Padic::vanishing(self.prime, *abs_precision, precision)
                } else {
                    Padic { prime: self.prime, precision, repr: Repr::Zero }
                }
            }
            Repr::Unit { valuation, unit } => {
                Padic::from_unit_unchecked(self.prime, *valuation, unit.clone(), precision)
            }
        }
    }

    /// Same prime, an exact integer, with enough digits not to limit arithmetic with `self`.
    pub fn integer_like(&self, n: i64) -> Padic {
        Padic::from_integer(n, self.prime as u64, self.precision.max(1))
            .expect("prime already validated")
    }

    fn check_prime_match(&self, other: &Padic) -> Result<(), PadicError> {
        if self.prime != other.prime {
            return Err(PadicError::PrimeMismatch(self.prime, other.prime));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Padic) -> Result<Padic, PadicError> {
        self.check_prime_match(other)?;
        let p = self.prime;
        let context = self.precision.min(other.precision);
        Ok(match (&self.repr, &other.repr) {
            (Repr::Zero, _) => other.clone(),
            (_, Repr::Zero) => self.clone(),
            (Repr::Vanishing { abs_precision: a }, Repr::Vanishing { abs_precision: b }) => {
                Padic::vanishing(p, *a.min(b), context)
            }
            (Repr::Vanishing { abs_precision: a }, Repr::Unit { .. }) => other.absorb(*a),
            (Repr::Unit { .. }, Repr::Vanishing { abs_precision: b }) => self.absorb(*b),
            (
                Repr::Unit { valuation: v1, unit: u1 },
                Repr::Unit { valuation: v2, unit: u2 },
            ) => {
                let abs = (v1 + self.precision as i64).min(v2 + other.precision as i64);
                let low = *v1.min(v2);
                let width = (abs - low) as u32;
                let modulus = pow_p(p, width);
                let scaled = |v: i64, u: &BigUint| -> BigUint {
                    let shift = (v - low) as u32;
                    if shift >= width {
                        BigUint::zero()
                    } else {
                        u * pow_p(p, shift)
                    }
                };
                let sum = (scaled(*v1, u1) + scaled(*v2, u2)) % &modulus;
                Padic::from_scaled_residue(p, low, sum, abs, context)
            }
        })
    }

    /// Adds an `O(p^bound)` uncertainty to a nonzero value.
    fn absorb(&self, bound: i64) -> Padic {
        let Repr::Unit { valuation, unit } = &self.repr else {
            unreachable!("absorb is only called on nonzero values")
        };
        let abs = (valuation + self.precision as i64).min(bound);
        if abs <= *valuation {
            return Padic::vanishing(self.prime, abs, self.precision);
        }
        Padic::from_unit_unchecked(self.prime, *valuation, unit.clone(), clamp_precision(abs, *valuation))
    }

    pub fn try_sub(&self, other: &Padic) -> Result<Padic, PadicError> {
        self.try_add(&other.negated())
    }

    pub fn negated(&self) -> Padic {
        match &self.repr {
            Repr::Unit { valuation, unit } => {
                let modulus = pow_p(self.prime, self.precision);
                let unit = (&modulus - unit) % &modulus;
                Padic { prime: self.prime, precision: self.precision, repr: Repr::Unit { valuation: *valuation, unit } }
            }
            _ => self.clone(),
        }
    }

    pub fn try_mul(&self, other: &Padic) -> Result<Padic, PadicError> {
        self.check_prime_match(other)?;
        let p = self.prime;
        let context = self.precision.min(other.precision);
        Ok(match (&self.repr, &other.repr) {
            (Repr::Zero, _) | (_, Repr::Zero) => Padic { prime: p, precision: context, repr: Repr::Zero },
            (Repr::Vanishing { abs_precision: a }, Repr::Vanishing { abs_precision: b }) => {
                Padic::vanishing(p, a + b, context)
            }
            (Repr::Vanishing { abs_precision: a }, Repr::Unit { valuation, .. })
            | (Repr::Unit { valuation, .. }, Repr::Vanishing { abs_precision: a }) => {
                Padic::vanishing(p, a + valuation, context)
            }
            (
                Repr::Unit { valuation: v1, unit: u1 },
                Repr::Unit { valuation: v2, unit: u2 },
            ) => Padic::from_unit_unchecked(p, v1 + v2, u1 * u2, context),
        })
    }

    pub fn inverse(&self) -> Result<Padic, PadicError> {
        match &self.repr {
            Repr::Zero => Err(PadicError::DivisionByZero),
            Repr::Vanishing { abs_precision } => Err(PadicError::Indeterminate { abs_precision: *abs_precision }),
            Repr::Unit { valuation, unit } => {
                let modulus = pow_p(self.prime, self.precision);
                let inv = unit_inverse(unit, &modulus);
                Ok(Padic::from_unit_unchecked(self.prime, -valuation, inv, self.precision))
            }
        }
    }

    pub fn try_div(&self, other: &Padic) -> Result<Padic, PadicError> {
        self.check_prime_match(other)?;
        if self.is_zero() {
            other.inverse()?;
            return Ok(self.with_precision(self.precision.min(other.precision)));
        }
        self.try_mul(&other.inverse()?)
    }

    /// `x / 2`. For p = 2 this lowers the valuation by one.
    pub fn half(&self) -> Padic {
        if self.prime != 2 {
            return self.try_mul(&self.integer_like(2).inverse().expect("2 is a unit"))
                .expect("same prime");
        }
        match &self.repr {
            Repr::Zero => self.clone(),
            Repr::Vanishing { abs_precision } => Padic::vanishing(2, abs_precision - 1, self.precision),
            Repr::Unit { valuation, unit } => Padic { prime: 2, precision: self.precision, repr: Repr::Unit { valuation: valuation - 1, unit: unit.clone() } },
        }
    }

    pub fn mul_int(&self, n: i64) -> Padic {
        self.try_mul(&self.integer_like(n)).expect("same prime")
    }

    pub fn pow(&self, exponent: u32) -> Padic {
        let mut acc = self.integer_like(1);
        for _ in 0..exponent {
            acc = &acc * self;
        }
        acc
    }

    /// Equality at the common guaranteed precision.
    pub fn agrees_with(&self, other: &Padic) -> bool {
        self.prime == other.prime
            && self.try_sub(other).map(|d| d.is_negligible()).unwrap_or(false)
    }

    /// Valuation of `self - other`, as far as precision allows.
    pub fn distance_order(&self, other: &Padic) -> Result<Order, PadicError> {
        Ok(self.try_sub(other)?.order())
    }
}

impl fmt::Display for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Zero => write!(f, "0"),
            Repr::Vanishing { abs_precision } => write!(f, "O({}^{})", self.prime, abs_precision),
            Repr::Unit { valuation, .. } => {
                let digits: Vec<String> = self.digits().iter().map(|d| d.to_string()).collect();
                write!(f, "{}^{} * [{}] + O({}^{})", self.prime, valuation, digits.join(","), self.prime, valuation + self.precision as i64)
            }
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $imp:ident) => {
        impl $trait<&Padic> for &Padic {
            type Output = Padic;
            fn $method(self, rhs: &Padic) -> Padic {
                self.$imp(rhs).expect("p-adic operands must share a prime")
            }
        }
        impl $trait<Padic> for Padic {
            type Output = Padic;
            fn $method(self, rhs: Padic) -> Padic {
                (&self).$imp(&rhs).expect("p-adic operands must share a prime")
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &Padic {
    type Output = Padic;
    fn neg(self) -> Padic {
        self.negated()
    }
}

impl Neg for Padic {
    type Output = Padic;
    fn neg(self) -> Padic {
        self.negated()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PadicWire {
    p: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    zero: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    valuation: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    digits: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    precision: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    abs_precision: Option<i64>,
}

impl Serialize for Padic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let p = self.prime as u64;
        let wire = match &self.repr {
            Repr::Zero => PadicWire { p, zero: Some(true), valuation: None, digits: None, precision: None, abs_precision: None },
            Repr::Vanishing { abs_precision } => PadicWire {
                p,
                zero: Some(true),
                valuation: None,
                digits: None,
                precision: None,
                abs_precision: Some(*abs_precision),
            },
            Repr::Unit { valuation, .. } => PadicWire {
                p,
                zero: None,
                valuation: Some(*valuation),
                digits: Some(self.digits()),
                precision: Some(self.precision),
                abs_precision: None,
            },
        };
        wire.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Padic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = PadicWire::deserialize(deserializer)?;
        if wire.zero == Some(true) {
            let x = Padic::zero(wire.p, DEFAULT_PRECISION).map_err(D::Error::custom)?;
            return Ok(match wire.abs_precision {
                Some(abs) => Padic::vanishing(x.prime, abs, DEFAULT_PRECISION),
                None => x,
            });
        }
        let valuation = wire.valuation.ok_or_else(|| D::Error::missing_field("valuation"))?;
        let digits = wire.digits.ok_or_else(|| D::Error::missing_field("digits"))?;
        let precision = wire.precision.unwrap_or(digits.len() as u32);
        Padic::from_digits(wire.p, valuation, &digits, precision).map_err(D::Error::custom)
    }
}

/// Parses `"num/den"` or `"n"` into an exact integer pair.
pub fn parse_rational(text: &str) -> Result<(BigInt, BigInt), String> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| format!("bad numerator in {text:?}"))?;
    let den: BigInt = den.parse().map_err(|_| format!("bad denominator in {text:?}"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in {text:?}"));
    }
    if den.is_negative() {
        return Ok((-num, -den));
    }
    Ok((num, den))
}
