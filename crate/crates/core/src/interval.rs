//! The map `T(x) = Mx mod 1` on `[0, 1)` and its conjugacy with the
//! one-sided full shift on `M` symbols through base-`M` expansions.
//!
//! The conjugacy is a bijection only after removing the rationals `i/M^k`
//! on the interval side and the digit streams that end in all `0`s or all
//! `M-1`s on the shift side. Pulling a digitwise quasigroup operation back
//! through it gives an operation that is undefined whenever the product
//! stream lands in the removed set.
//!
//! All arithmetic is exact.

use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quasigroup::FiniteQuasigroup;

/// An eventually periodic base-`M` digit stream `0.d_1 d_2 ...`, stored with
/// the shortest preperiod and the minimal period.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DigitReal {
    base: usize,
    preperiod: Vec<usize>,
    period: Vec<usize>,
}

impl DigitReal {
    /// Canonicalizes and validates. Streams ending in all `0`s or all
    /// `base - 1`s are rejected with [`Error::ExcludedDigits`].
    pub fn new(base: usize, mut preperiod: Vec<usize>, mut period: Vec<usize>) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidArgument(format!(
                "base must be at least 2, got {base}"
            )));
        }
        if period.is_empty() {
            return Err(Error::EmptyDigits);
        }
        if let Some(&d) = preperiod.iter().chain(&period).find(|&&d| d >= base) {
            return Err(Error::SymbolOutOfRange {
                symbol: d,
                order: base,
            });
        }
        let p = crate::symbolic::minimal_period(&period);
        period.truncate(p);
        while preperiod.last().is_some_and(|d| Some(d) == period.last()) {
            preperiod.pop();
            period.rotate_right(1);
        }
        if period.iter().all(|&d| d == 0) || period.iter().all(|&d| d == base - 1) {
            return Err(Error::ExcludedDigits);
        }
        Ok(Self {
            base,
            preperiod,
            period,
        })
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn preperiod(&self) -> &[usize] {
        &self.preperiod
    }

    pub fn period(&self) -> &[usize] {
        &self.period
    }

    /// Digit `d_{i+1}` (0-based position `i` after the point).
    pub fn digit(&self, i: usize) -> usize {
        match i.checked_sub(self.preperiod.len()) {
            None => self.preperiod[i],
            Some(j) => self.period[j % self.period.len()],
        }
    }

    /// Drops the first digit.
    pub fn shift(&self) -> Self {
        let mut pre = self.preperiod.clone();
        let mut per = self.period.clone();
        if pre.is_empty() {
            per.rotate_left(1);
        } else {
            pre.remove(0);
        }
        Self {
            base: self.base,
            preperiod: pre,
            period: per,
        }
    }
}

impl fmt::Display for DigitReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.base > 10 { "," } else { "" };
        let join = |v: &[usize]| {
            v.iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(sep)
        };
        write!(f, "0.{}({})", join(&self.preperiod), join(&self.period))
    }
}

fn big(n: usize) -> BigUint {
    BigUint::from(n)
}

/// If `x = i/M^k` for some `k >= 1`, returns the least such `k` and `i`.
pub fn null_set_witness(x: &BigRational, base: usize) -> Option<(u32, BigUint)> {
    let num = x.numer().abs().to_biguint()?;
    let den = x.denom().to_biguint()?;
    let m = big(base);
    let mut rest = den.clone();
    loop {
        let g = rest.gcd(&m);
        if g.is_one() {
            break;
        }
        rest /= g;
    }
    if !rest.is_one() {
        return None;
    }
    let mut k = 1u32;
    let mut pow = m.clone();
    while !(&pow % &den).is_zero() {
        pow *= &m;
        k += 1;
    }
    Some((k, num * pow / den))
}

/// Base-`M` expansion of `x` in `[0, 1)` by long division.
///
/// Points of the form `i/M^k` have two expansions (or one terminating in
/// zeros) and are rejected with [`Error::NullSetPoint`].
pub fn phi(x: &BigRational, base: usize) -> Result<DigitReal> {
    if base < 2 {
        return Err(Error::InvalidArgument(format!(
            "base must be at least 2, got {base}"
        )));
    }
    if x.is_negative() || *x >= BigRational::one() {
        return Err(Error::InvalidArgument(format!("{x} is not in [0, 1)")));
    }
    if let Some((k, i)) = null_set_witness(x, base) {
        return Err(Error::NullSetPoint {
            value: x.to_string(),
            base,
            k,
            i,
        });
    }
    let den = x.denom().to_biguint().expect("positive denominator");
    let m = big(base);
    let mut rem = x.numer().to_biguint().expect("nonnegative numerator");
    let mut seen: HashMap<BigUint, usize> = HashMap::new();
    let mut digits = Vec::new();
    let start = loop {
        if let Some(&pos) = seen.get(&rem) {
            break pos;
        }
        seen.insert(rem.clone(), digits.len());
        let (d, r) = (rem * &m).div_rem(&den);
        digits.push(d.to_usize().expect("digit < base"));
        rem = r;
    };
    let period = digits.split_off(start);
    DigitReal::new(base, digits, period)
}

/// Sums the geometric series: with `A` the preperiod read as an integer of
/// `k` digits and `P` the period read as an integer of `p` digits, the
/// value is `(A (M^p - 1) + P) / (M^k (M^p - 1))`.
pub fn phi_inv(d: &DigitReal) -> BigRational {
    let m = BigInt::from(d.base);
    let read = |v: &[usize]| {
        v.iter()
            .fold(BigInt::zero(), |acc, &x| acc * &m + BigInt::from(x))
    };
    let k = d.preperiod.len() as u32;
    let p = d.period.len() as u32;
    let cycle = num_traits::pow(m.clone(), p as usize) - 1;
    let numer = read(&d.preperiod) * &cycle + read(&d.period);
    let denom = num_traits::pow(m, k as usize) * cycle;
    BigRational::new(numer, denom)
}

/// `T(x) = Mx mod 1` on the digit side: the one-sided shift.
pub fn t_map(d: &DigitReal) -> DigitReal {
    d.shift()
}

/// `Mx mod 1` on the rational side.
pub fn times_base_mod_one(x: &BigRational, base: usize) -> BigRational {
    let y = x * BigRational::from_integer(BigInt::from(base));
    &y - y.floor()
}

/// `x • y = phi^{-1}(phi(x) * phi(y))` with `*` applied digit by digit.
///
/// Returns [`Error::ProductInNullSet`] when the product stream ends in all
/// `0`s or all `M-1`s; that pair lies outside the domain of the weak
/// operation.
pub fn bullet(x: &DigitReal, y: &DigitReal, op: &FiniteQuasigroup) -> Result<DigitReal> {
    if x.base != y.base {
        return Err(Error::AlphabetMismatch {
            expected: x.base,
            found: y.base,
        });
    }
    if op.order() != x.base {
        return Err(Error::OrderMismatch {
            left: x.base,
            right: op.order(),
        });
    }
    let pre_len = x.preperiod.len().max(y.preperiod.len());
    let per_len = x.period.len().lcm(&y.period.len());
    let combine = |i: usize| op.mul_raw(x.digit(i), y.digit(i));
    let pre: Vec<usize> = (0..pre_len).map(combine).collect();
    let per: Vec<usize> = (pre_len..pre_len + per_len).map(combine).collect();
    match DigitReal::new(x.base, pre.clone(), per.clone()) {
        Err(Error::ExcludedDigits) => {
            let shown = DigitReal {
                base: x.base,
                preperiod: pre,
                period: per,
            };
            Err(Error::ProductInNullSet {
                digits: shown.to_string(),
            })
        }
        other => other,
    }
}

/// A uniformly drawn fraction `a/b` with `2 <= b <= max_denominator`,
/// `0 < a < b`, redrawn until it is outside the null set.
pub fn random_admissible(rng: &mut impl Rng, base: usize, max_denominator: u64) -> BigRational {
    loop {
        let b = rng.gen_range(2..=max_denominator.max(2));
        let a = rng.gen_range(1..b);
        let x = BigRational::new(BigInt::from(a), BigInt::from(b));
        if null_set_witness(&x, base).is_none() {
            return x;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quasigroup::{build_idempotent_quasigroup, FiniteQuasigroup};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn phi_examples() {
        let third = phi(&q(1, 3), 10).unwrap();
        assert!(third.preperiod().is_empty());
        assert_eq!(third.period(), &[3]);
        assert_eq!(phi(&q(1, 3), 2).unwrap().period(), &[0, 1]);
        let sixth = phi(&q(1, 6), 10).unwrap();
        assert_eq!((sixth.preperiod(), sixth.period()), (&[1][..], &[6][..]));
        assert_eq!(phi(&q(1, 7), 10).unwrap().period(), &[1, 4, 2, 8, 5, 7]);
    }

    #[test]
    fn phi_rejects_null_set() {
        match phi(&q(1, 4), 10) {
            Err(Error::NullSetPoint { k, i, .. }) => {
                assert_eq!(k, 2);
                assert_eq!(i, BigUint::from(25u32));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            phi(&q(0, 1), 10),
            Err(Error::NullSetPoint { k: 1, .. })
        ));
        assert!(matches!(
            phi(&q(3, 8), 2),
            Err(Error::NullSetPoint { k: 3, .. })
        ));
        assert!(phi(&q(1, 1), 10).is_err());
        assert!(phi(&q(-1, 3), 10).is_err());
    }

    #[test]
    fn null_set_is_exactly_base_power_denominators() {
        for base in [2usize, 3, 6, 10] {
            for b in 1..=120i64 {
                for a in 0..b {
                    let x = q(a, b);
                    let den = x.denom().to_i64().unwrap();
                    let divides_power = (1..=8).any(|k| (base as i64).pow(k) % den == 0);
                    assert_eq!(phi(&x, base).is_err(), divides_power, "{x} base {base}");
                }
            }
        }
    }

    #[test]
    fn canonical_digit_real() {
        let d = DigitReal::new(10, vec![1, 2, 3], vec![4, 5, 3, 4, 5, 3]).unwrap();
        assert_eq!((d.preperiod(), d.period()), (&[1, 2][..], &[3, 4, 5][..]));
        assert_eq!(
            DigitReal::new(10, vec![5], vec![0]),
            Err(Error::ExcludedDigits)
        );
        assert_eq!(
            DigitReal::new(10, vec![], vec![9, 9]),
            Err(Error::ExcludedDigits)
        );
        assert!(DigitReal::new(10, vec![], vec![10]).is_err());
    }

    #[test]
    fn t_map_examples() {
        assert_eq!(
            t_map(&phi(&q(1, 3), 10).unwrap()),
            phi(&q(1, 3), 10).unwrap()
        );
        let s = t_map(&phi(&q(1, 7), 10).unwrap());
        assert_eq!(s.period(), &[4, 2, 8, 5, 7, 1]);
        assert_eq!(phi_inv(&s), q(3, 7));
    }

    #[test]
    fn bullet_examples() {
        let sum = FiniteQuasigroup::cyclic_sum(10).unwrap();
        let x = phi(&q(1, 3), 10).unwrap();
        let y = phi(&q(1, 7), 10).unwrap();
        let z = bullet(&x, &y, &sum).unwrap();
        assert_eq!(z.period(), &[4, 7, 5, 1, 8, 0]);
        assert_eq!(phi_inv(&z), q(475_180, 999_999));

        let two_thirds = phi(&q(2, 3), 10).unwrap();
        assert!(matches!(
            bullet(&x, &two_thirds, &sum),
            Err(Error::ProductInNullSet { .. })
        ));

        let wrong = FiniteQuasigroup::cyclic_sum(3).unwrap();
        assert!(matches!(
            bullet(&x, &y, &wrong),
            Err(Error::OrderMismatch { .. })
        ));
    }

    #[test]
    fn random_conjugacy_and_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let x = random_admissible(&mut rng, 10, 500);
            let d = phi(&x, 10).unwrap();
            assert_eq!(phi_inv(&d), x);
            assert_eq!(phi(&times_base_mod_one(&x, 10), 10).unwrap(), t_map(&d));
        }
    }

    #[test]
    fn random_endomorphism_identity() {
        let ops = [
            FiniteQuasigroup::cyclic_sum(10).unwrap(),
            build_idempotent_quasigroup(10).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for op in &ops {
            for _ in 0..500 {
                let x = phi(&random_admissible(&mut rng, 10, 300), 10).unwrap();
                let y = phi(&random_admissible(&mut rng, 10, 300), 10).unwrap();
                if let (Ok(xy), Ok(txy)) = (bullet(&x, &y, op), bullet(&t_map(&x), &t_map(&y), op))
                {
                    assert_eq!(t_map(&xy), txy);
                }
            }
        }
    }

    fn arb_digit_real(base: usize) -> impl Strategy<Value = DigitReal> {
        (
            prop::collection::vec(0..base, 0..4),
            prop::collection::vec(0..base, 1..5),
        )
            .prop_filter_map("excluded tail", move |(pre, per)| {
                DigitReal::new(base, pre, per).ok()
            })
    }

    proptest! {
        #[test]
        fn phi_after_phi_inv_is_identity(d in arb_digit_real(7)) {
            prop_assert_eq!(phi(&phi_inv(&d), 7).unwrap(), d);
        }

        #[test]
        fn cancelable_where_defined(x in arb_digit_real(5), y1 in arb_digit_real(5), y2 in arb_digit_real(5)) {
            let op = crate::quasigroup::build_translation_quasigroup(5).unwrap();
            if let (Ok(a), Ok(b)) = (bullet(&x, &y1, &op), bullet(&x, &y2, &op)) {
                prop_assert_eq!(a == b, y1 == y2);
            }
            if let (Ok(a), Ok(b)) = (bullet(&y1, &x, &op), bullet(&y2, &x, &op)) {
                prop_assert_eq!(a == b, y1 == y2);
            }
        }
    }
}
