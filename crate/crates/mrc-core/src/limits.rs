//! Resource limits with exact rational arithmetic.
//!
//! Bounds like `space_constant · n^c` are evaluated without floating point:
//! `⌈a/b · n^{p/q}⌉` is found by binary search on the integer predicate
//! `(m·b)^q ≥ a^q · n^p`, computed in checked 128-bit arithmetic and
//! saturating at `u64::MAX`. The asymptotic bounds of the model are made
//! concrete by explicit constants; defaults are exponent `1/2` and constant
//! `4` everywhere, with enforcement off (record-only) unless requested.

use crate::error::MrcError;
use num::integer::gcd;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

/// A non-negative rational, kept reduced. Serialized as the string
/// `"num/den"` (or just `"num"` when the denominator is 1) so configuration
/// files never suffer float drift.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    num: u64,
    den: u64,
}

impl Rational {
    pub fn new(num: u64, den: u64) -> Result<Self, MrcError> {
        if den == 0 {
            return Err(MrcError::InvalidProgram(
                "rational with zero denominator".into(),
            ));
        }
        let g = gcd(num.max(1), den);
        Ok(Rational {
            num: num / if num == 0 { 1 } else { g },
            den: if num == 0 { 1 } else { den / g },
        })
    }

    pub fn from_integer(v: u64) -> Self {
        Rational { num: v, den: 1 }
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// Strictly less than 1.
    pub fn is_proper(&self) -> bool {
        self.num < self.den
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Rational {
    type Err = MrcError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |_| MrcError::InvalidProgram(format!("malformed rational {s:?}"));
        match s.split_once('/') {
            None => Rational::new(s.trim().parse().map_err(bad)?, 1),
            Some((a, b)) => Rational::new(
                a.trim().parse().map_err(bad)?,
                b.trim().parse().map_err(bad)?,
            ),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `⌈n^{p/q}⌉` for a non-negative rational exponent, exactly.
pub fn ceil_pow(n: u64, exponent: &Rational) -> u64 {
    ceil_mul_pow(&Rational::from_integer(1), exponent, n)
}

/// `⌈c · v⌉` for a rational constant, exactly (saturating).
pub fn ceil_mul(c: &Rational, v: u64) -> u64 {
    let prod = c.num as u128 * v as u128;
    let up = (prod + c.den as u128 - 1) / c.den as u128;
    u64::try_from(up).unwrap_or(u64::MAX)
}

/// `⌈(a/b) · n^{p/q}⌉`, exactly: the smallest `m` with `(m·b)^q ≥ a^q · n^p`,
/// found by binary search in checked 128-bit arithmetic. Saturates at
/// `u64::MAX` when the true value does not fit.
pub fn ceil_mul_pow(c: &Rational, exponent: &Rational, n: u64) -> u64 {
    let (a, b) = (c.num, c.den);
    let (p, q) = (exponent.num, exponent.den);
    if a == 0 || (n == 0 && p > 0) {
        return 0;
    }
    // rhs = a^q · n^p
    let rhs = match (a as u128)
        .checked_pow(q as u32)
        .and_then(|aq| (n as u128).checked_pow(p as u32).and_then(|np| aq.checked_mul(np)))
    {
        Some(v) => v,
        None => return u64::MAX,
    };
    // holds(m) ⇔ (m·b)^q ≥ rhs; monotone in m, overflow counts as "holds"
    // because rhs itself fits in 128 bits.
    let holds = |m: u64| -> bool {
        match (m as u128)
            .checked_mul(b as u128)
            .and_then(|mb| mb.checked_pow(q as u32))
        {
            Some(v) => v >= rhs,
            None => true,
        }
    };
    if !holds(u64::MAX) {
        return u64::MAX;
    }
    let mut lo = 0u64; // holds(lo) is false (0 fails because rhs ≥ 1 here)
    let mut hi = 1u64;
    while !holds(hi) {
        lo = hi;
        hi = hi.saturating_mul(2);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `⌈log₂ n⌉` with the convention that values 0 and 1 cost nothing.
pub fn log2_ceil(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// Number of decimal digits needed to store `v`.
pub fn decimal_digits(v: u64) -> u32 {
    if v == 0 {
        1
    } else {
        v.ilog10() + 1
    }
}

/// A one-term polynomial bound `constant · n^exponent`, evaluated at
/// `max(n, 1)` so empty inputs still have usable budgets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyBound {
    pub constant: Rational,
    pub exponent: Rational,
}

impl PolyBound {
    pub fn new(constant: Rational, exponent: Rational) -> Self {
        PolyBound { constant, exponent }
    }

    pub fn eval(&self, n: usize) -> u64 {
        ceil_mul_pow(&self.constant, &self.exponent, (n as u64).max(1))
    }
}

/// Whether exceeding a bound aborts the run or is merely recorded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Enforcement {
    Enforce,
    RecordOnly,
}

/// The concrete resource bounds of a program: per-processor space
/// `space_constant·⌈n^c⌉` bytes, per-invocation steps `time_bound(n)`,
/// per-mapper-invocation distinct keys `keys_constant·⌈n^c⌉` (with the
/// per-round total allowed the square of the key budget, and total pairs per
/// round allowed `keys_constant·n²`), and round count `round_bound(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceLimits {
    pub space_exponent: Rational,
    pub space_constant: Rational,
    pub time_bound: PolyBound,
    pub keys_constant: Rational,
    pub round_bound: PolyBound,
    pub enforcement: Enforcement,
}

impl Default for ResourceLimits {
    fn default() -> Self {
        let half = Rational::new(1, 2).unwrap();
        let four = Rational::from_integer(4);
        let one = Rational::from_integer(1);
        let zero = Rational::from_integer(0);
        ResourceLimits {
            space_exponent: half,
            space_constant: four,
            time_bound: PolyBound::new(four, one),
            keys_constant: four,
            round_bound: PolyBound::new(four, zero),
            enforcement: Enforcement::RecordOnly,
        }
    }
}

impl ResourceLimits {
    pub fn validate(&self) -> Result<(), MrcError> {
        if self.space_exponent.is_zero() || !self.space_exponent.is_proper() {
            return Err(MrcError::InvalidProgram(format!(
                "space exponent must lie strictly between 0 and 1, got {}",
                self.space_exponent
            )));
        }
        for (r, what) in [
            (self.space_constant, "space constant"),
            (self.keys_constant, "keys constant"),
            (self.time_bound.constant, "time-bound constant"),
            (self.round_bound.constant, "round-bound constant"),
        ] {
            if r.is_zero() {
                return Err(MrcError::InvalidProgram(format!(
                    "{what} must be positive"
                )));
            }
        }
        Ok(())
    }

    fn n_eff(n: usize) -> u64 {
        (n as u64).max(1)
    }

    /// Per-invocation space budget in bytes: `⌈space_constant · n^c⌉`.
    pub fn space_bytes(&self, n: usize) -> u64 {
        ceil_mul_pow(&self.space_constant, &self.space_exponent, Self::n_eff(n))
    }

    /// Per-invocation step budget: `time_bound(n)`.
    pub fn steps_per_invocation(&self, n: usize) -> u64 {
        self.time_bound.eval(n)
    }

    /// Distinct keys one mapper invocation may emit:
    /// `⌈keys_constant · ⌈n^c⌉⌉`.
    pub fn keys_per_invocation(&self, n: usize) -> u64 {
        let u = ceil_pow(Self::n_eff(n), &self.space_exponent);
        ceil_mul(&self.keys_constant, u)
    }

    /// Distinct keys a whole round may produce:
    /// `⌈keys_constant · ⌈n^c⌉²⌉`.
    pub fn keys_per_round(&self, n: usize) -> u64 {
        let u = ceil_pow(Self::n_eff(n), &self.space_exponent);
        ceil_mul(&self.keys_constant, u.saturating_mul(u))
    }

    /// Total pairs a round may carry: `⌈keys_constant · n²⌉`.
    pub fn pairs_per_round(&self, n: usize) -> u64 {
        let ne = Self::n_eff(n);
        ceil_mul(&self.keys_constant, ne.saturating_mul(ne))
    }

    /// Rounds the program may declare: `round_bound(n)`.
    pub fn rounds_allowed(&self, n: usize) -> u64 {
        self.round_bound.eval(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing_and_display_round_trip() {
        for s in ["1/2", "4", "3/4", "0", "7/3"] {
            let r: Rational = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
        let r: Rational = "6/4".parse().unwrap();
        assert_eq!(r.to_string(), "3/2");
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
    }

    #[test]
    fn ceil_pow_matches_known_values() {
        let half = Rational::new(1, 2).unwrap();
        assert_eq!(ceil_pow(4096, &half), 64);
        assert_eq!(ceil_pow(10, &half), 4); // √10 ≈ 3.16
        assert_eq!(ceil_pow(16, &half), 4);
        assert_eq!(ceil_pow(17, &half), 5);
        assert_eq!(ceil_pow(1, &half), 1);
        assert_eq!(ceil_pow(0, &half), 0);
        let three_quarters = Rational::new(3, 4).unwrap();
        assert_eq!(ceil_pow(4096, &three_quarters), 512);
        let zero = Rational::from_integer(0);
        assert_eq!(ceil_pow(77, &zero), 1);
    }

    #[test]
    fn ceil_mul_pow_agrees_with_float_on_a_grid() {
        // Exact integer evaluation must match careful float rounding
        // wherever floats are trustworthy.
        let exps = [(1u64, 2u64), (1, 4), (3, 4), (1, 1), (2, 1), (0, 1)];
        let consts = [(1u64, 1u64), (4, 1), (1, 2), (64, 1), (7, 3)];
        for &(p, q) in &exps {
            for &(a, b) in &consts {
                let e = Rational::new(p, q).unwrap();
                let c = Rational::new(a, b).unwrap();
                for n in [0u64, 1, 2, 3, 5, 10, 64, 100, 4096, 100_000] {
                    let exact = ceil_mul_pow(&c, &e, n);
                    let float = (a as f64 / b as f64) * (n as f64).powf(p as f64 / q as f64);
                    // Only check where the float is far from an integer edge.
                    if (float - float.round()).abs() > 1e-6 {
                        assert_eq!(exact, float.ceil() as u64, "c={c} e={e} n={n}");
                    } else {
                        assert!(
                            (exact as i128 - float.round() as i128).abs() <= 1,
                            "c={c} e={e} n={n}: exact={exact} float={float}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn ceil_mul_pow_saturates_instead_of_overflowing() {
        let big = Rational::from_integer(u64::MAX);
        let cubed = Rational::from_integer(3);
        assert_eq!(ceil_mul_pow(&big, &cubed, u64::MAX), u64::MAX);
    }

    #[test]
    fn log2_and_digit_helpers() {
        assert_eq!(log2_ceil(0), 0);
        assert_eq!(log2_ceil(1), 0);
        assert_eq!(log2_ceil(2), 1);
        assert_eq!(log2_ceil(3), 2);
        assert_eq!(log2_ceil(1024), 10);
        assert_eq!(log2_ceil(1025), 11);
        assert_eq!(decimal_digits(0), 1);
        assert_eq!(decimal_digits(9), 1);
        assert_eq!(decimal_digits(10), 2);
        assert_eq!(decimal_digits(4096), 4);
    }

    #[test]
    fn default_limits_validate_and_scale() {
        let l = ResourceLimits::default();
        l.validate().unwrap();
        assert_eq!(l.space_bytes(4096), 256); // 4·√4096
        assert_eq!(l.keys_per_invocation(4096), 256);
        assert_eq!(l.keys_per_round(4096), 16384); // 4·64²
        assert_eq!(l.steps_per_invocation(100), 400);
        assert_eq!(l.rounds_allowed(1_000_000), 4);
        // Empty input still gets the n = 1 budget.
        assert_eq!(l.space_bytes(0), 4);
    }

    #[test]
    fn bad_limits_are_rejected() {
        let mut l = ResourceLimits::default();
        l.space_exponent = Rational::from_integer(1);
        assert!(l.validate().is_err());
        let mut l = ResourceLimits::default();
        l.space_exponent = Rational::from_integer(0);
        assert!(l.validate().is_err());
        let mut l = ResourceLimits::default();
        l.space_constant = Rational::from_integer(0);
        assert!(l.validate().is_err());
    }

    #[test]
    fn limits_serde_round_trip() {
        let l = ResourceLimits::default();
        let json = serde_json::to_string(&l).unwrap();
        assert!(json.contains("\"1/2\""));
        let back: ResourceLimits = serde_json::from_str(&json).unwrap();
        assert_eq!(back, l);
    }
}
