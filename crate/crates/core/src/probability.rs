//! Exact rationals and the four-state probability vector.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::sequence::Symbol;

pub type Rational = BigRational;

pub fn rational(numer: i64, denom: i64) -> Rational {
    BigRational::new(numer.into(), denom.into())
}

/// Parses `"p/q"` or a bare integer. Decimal fractions are rejected.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let malformed = || Error::MalformedRational(text.to_string());
    let int = |part: &str| part.trim().parse::<BigInt>().map_err(|_| malformed());
    let (numer, denom) = match s.split_once('/') {
        Some((n, d)) => (int(n)?, int(d)?),
        None => (int(s)?, BigInt::one()),
    };
    if denom.is_zero() {
        return Err(malformed());
    }
    Ok(BigRational::new(numer, denom))
}

/// Lowest-terms `"numerator/denominator"`, always with an explicit denominator.
pub fn format_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Converts a nonnegative rational with denominator 1 to a big unsigned integer.
pub(crate) fn to_biguint(value: &BigInt) -> BigUint {
    value.to_biguint().expect("nonnegative integer")
}

fn pow10(exp: i64) -> Rational {
    let p = num_traits::pow(BigInt::from(10), exp.unsigned_abs() as usize);
    if exp >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

fn round_half_even(value: &Rational) -> BigInt {
    let floor = value.floor();
    let frac = value - &floor;
    let half = rational(1, 2);
    let base = floor.to_integer();
    if frac > half || (frac == half && base.is_odd()) {
        base + 1
    } else {
        base
    }
}

/// Decimal rendering with `digits` significant digits, rounded half-to-even.
///
/// Magnitudes in `[1e-5, 10^digits)` are written positionally, everything else
/// in `d.ddde±x` form.
pub fn to_decimal(value: &Rational, digits: usize) -> String {
    assert!(digits >= 1);
    if value.is_zero() {
        return "0".to_string();
    }
    let sign = if value.is_negative() { "-" } else { "" };
    let v = value.abs();

    let bits = v.numer().bits() as i64 - v.denom().bits() as i64;
    let mut exp = bits * 30103 / 100_000;
    while pow10(exp) > v {
        exp -= 1;
    }
    while pow10(exp + 1) <= v {
        exp += 1;
    }

    let mut mantissa = round_half_even(&(&v * pow10(digits as i64 - 1 - exp)));
    if mantissa == num_traits::pow(BigInt::from(10), digits) {
        mantissa /= 10;
        exp += 1;
    }
    let text = mantissa.to_string();
    debug_assert_eq!(text.len(), digits);

    if (-5..digits as i64).contains(&exp) {
        if exp >= 0 {
            let (int_part, frac_part) = text.split_at(exp as usize + 1);
            if frac_part.is_empty() {
                format!("{sign}{int_part}")
            } else {
                format!("{sign}{int_part}.{frac_part}")
            }
        } else {
            let zeros = "0".repeat((-exp - 1) as usize);
            format!("{sign}0.{zeros}{text}")
        }
    } else {
        let (lead, rest) = text.split_at(1);
        if rest.is_empty() {
            format!("{sign}{lead}e{exp}")
        } else {
            format!("{sign}{lead}.{rest}e{exp}")
        }
    }
}

/// `(P_a, P_b, P_c, P_d)` with exact unit sum. Zero components are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StateProbabilities {
    probs: [Rational; 4],
}

impl StateProbabilities {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Result<Self> {
        let probs = [a, b, c, d];
        for (p, name) in probs.iter().zip(['a', 'b', 'c', 'd']) {
            if p.is_negative() {
                return Err(Error::NegativeComponent {
                    component: name,
                    value: p.to_string(),
                });
            }
        }
        let total: Rational = probs.iter().sum();
        if !total.is_one() {
            return Err(Error::NotNormalized(total.to_string()));
        }
        Ok(StateProbabilities { probs })
    }

    pub fn uniform() -> Self {
        let q = rational(1, 4);
        StateProbabilities {
            probs: [q.clone(), q.clone(), q.clone(), q],
        }
    }

    /// Maximum-likelihood estimate `count / total` for each symbol.
    pub fn from_counts(counts: [u64; 4]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::InvalidQuery(
                "cannot estimate probabilities from zero symbols".into(),
            ));
        }
        let [a, b, c, d] = counts.map(|k| Rational::new(k.into(), total.into()));
        StateProbabilities::new(a, b, c, d)
    }

    pub fn p_a(&self) -> &Rational {
        &self.probs[0]
    }

    pub fn p_b(&self) -> &Rational {
        &self.probs[1]
    }

    pub fn p_c(&self) -> &Rational {
        &self.probs[2]
    }

    pub fn p_d(&self) -> &Rational {
        &self.probs[3]
    }

    pub fn get(&self, symbol: Symbol) -> &Rational {
        &self.probs[symbol.index()]
    }

    pub fn as_array(&self) -> &[Rational; 4] {
        &self.probs
    }

    /// `P_a + P_c + P_d`, the probability that a trial is not B.
    pub fn non_b(&self) -> Rational {
        &self.probs[0] + &self.probs[2] + &self.probs[3]
    }

    /// Least common denominator `D` of the four components, together with the
    /// integer weights `D * P_x`.
    pub fn integer_weights(&self) -> (BigUint, [BigUint; 4]) {
        let denom = self
            .probs
            .iter()
            .fold(BigInt::one(), |acc, p| acc.lcm(p.denom()));
        let weights = self
            .probs
            .each_ref()
            .map(|p| to_biguint(&(p.numer() * (&denom / p.denom()))));
        (to_biguint(&denom), weights)
    }
}

impl FromStr for StateProbabilities {
    type Err = Error;

    /// Four comma-separated rationals, e.g. `"1/4,1/4,1/4,1/4"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 4 {
            return Err(Error::MalformedRational(s.to_string()));
        }
        let mut values = parts.into_iter().map(parse_rational);
        let mut next = || values.next().expect("four parts");
        StateProbabilities::new(next()?, next()?, next()?, next()?)
    }
}

impl fmt::Display for StateProbabilities {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.probs.iter().map(format_rational).collect();
        write!(f, "{}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn uniform_vector_is_valid() {
        let q = rational(1, 4);
        let p = StateProbabilities::new(q.clone(), q.clone(), q.clone(), q).unwrap();
        assert_eq!(p, StateProbabilities::uniform());
    }

    #[test]
    fn two_state_degenerate_vector_is_valid() {
        let h = rational(1, 2);
        let p =
            StateProbabilities::new(h.clone(), h, Rational::zero(), Rational::zero()).unwrap();
        assert_eq!(p.non_b(), rational(1, 2));
    }

    #[test]
    fn rejects_unnormalized() {
        let q = rational(1, 4);
        let err = StateProbabilities::new(q.clone(), q.clone(), q, rational(1, 2)).unwrap_err();
        assert_eq!(err, Error::NotNormalized("5/4".into()));
    }

    #[test]
    fn rejects_negative_component() {
        let err = StateProbabilities::new(
            rational(-1, 4),
            rational(3, 4),
            rational(1, 4),
            rational(1, 4),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NegativeComponent { component: 'a', .. }));
    }

    #[test]
    fn parses_probability_strings() {
        let p: StateProbabilities = "1/6, 1/2 ,1/6,1/6".parse().unwrap();
        assert_eq!(p.p_b(), &rational(1, 2));
        assert_eq!(p.to_string(), "1/6,1/2,1/6,1/6");
        assert!("0,1,0".parse::<StateProbabilities>().is_err());
        assert!("0.25,0.25,0.25,0.25".parse::<StateProbabilities>().is_err());
        assert!("1/0,1,0,0".parse::<StateProbabilities>().is_err());
    }

    #[test]
    fn integer_weights_share_a_denominator() {
        let p: StateProbabilities = "1/6,1/2,1/6,1/6".parse().unwrap();
        let (d, w) = p.integer_weights();
        assert_eq!(d, BigUint::from(6u32));
        assert_eq!(w, [1u32, 3, 1, 1].map(BigUint::from));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&rational(27, 64), 15), "0.421875000000000");
        assert_eq!(to_decimal(&rational(1, 1), 15), "1.00000000000000");
        assert_eq!(to_decimal(&rational(1, 3), 15), "0.333333333333333");
        assert_eq!(to_decimal(&rational(2, 3), 15), "0.666666666666667");
        assert_eq!(to_decimal(&Rational::zero(), 15), "0");
        assert_eq!(to_decimal(&rational(1, 1 << 20), 15), "9.53674316406250e-7");
        assert_eq!(to_decimal(&rational(1, 100_000), 3), "0.0000100");
        // Ties go to the even neighbour.
        assert_eq!(to_decimal(&rational(125, 1000), 2), "0.12");
        assert_eq!(to_decimal(&rational(135, 1000), 2), "0.14");
        assert_eq!(to_decimal(&rational(999, 1000), 2), "1.0");
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-1000i64..1000, 1i64..1000).prop_map(|(n, d)| rational(n, d))
    }

    proptest! {
        #[test]
        fn rational_arithmetic_round_trips(a in small_rational(), b in small_rational(), c in small_rational()) {
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            if !b.is_zero() {
                prop_assert_eq!(&(&a * &b) / &b, a.clone());
            }
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
            prop_assert_eq!(parse_rational(&format_rational(&a)).unwrap(), a);
        }
    }
}
