//! Exact periodic-point model of full shifts and of the rotor system
//! `Y = {0..N-1}^Z x Z_B` with map `S = shift x (+1 mod B)`.
//!
//! A bi-infinite sequence of period `p` is stored as its `p` digits at
//! indices `0..p`, always reduced to the minimal period. Points are anchored:
//! the sequence `(0,1)` and its shift `(1,0)` are different points.

use std::fmt;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quasigroup::{
    build_idempotent_quasigroup, build_translation_quasigroup, FiniteQuasigroup,
};

/// Default upper bound on sampled periods.
pub const DEFAULT_MAX_PERIOD: usize = 8;

/// Smallest `d` dividing `digits.len()` with `digits[i] == digits[i % d]`.
pub fn minimal_period(digits: &[usize]) -> usize {
    let p = digits.len();
    (1..=p)
        .filter(|d| p.is_multiple_of(*d))
        .find(|&d| (d..p).all(|i| digits[i] == digits[i - d]))
        .unwrap_or(p)
}

/// A periodic point `x_i = digits[i mod p]` of the full shift on
/// `alphabet_size` symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "PointRecord")]
pub struct PeriodicPoint {
    alphabet_size: usize,
    digits: Vec<usize>,
}

#[derive(Deserialize)]
struct PointRecord {
    alphabet_size: usize,
    digits: Vec<usize>,
}

impl TryFrom<PointRecord> for PeriodicPoint {
    type Error = Error;

    fn try_from(rec: PointRecord) -> Result<Self> {
        PeriodicPoint::new(rec.alphabet_size, rec.digits)
    }
}

impl PeriodicPoint {
    pub fn new(alphabet_size: usize, digits: Vec<usize>) -> Result<Self> {
        if alphabet_size == 0 {
            return Err(Error::EmptyAlphabet);
        }
        if digits.is_empty() {
            return Err(Error::EmptyDigits);
        }
        if let Some(&d) = digits.iter().find(|&&d| d >= alphabet_size) {
            return Err(Error::SymbolOutOfRange {
                symbol: d,
                order: alphabet_size,
            });
        }
        Ok(Self::canonical(alphabet_size, digits))
    }

    fn canonical(alphabet_size: usize, mut digits: Vec<usize>) -> Self {
        let p = minimal_period(&digits);
        digits.truncate(p);
        Self {
            alphabet_size,
            digits,
        }
    }

    pub fn constant(alphabet_size: usize, digit: usize) -> Result<Self> {
        Self::new(alphabet_size, vec![digit])
    }

    /// Parses `"0121"` (one character per digit, alphabets up to 36) or
    /// `"0,12,3"` (comma separated).
    pub fn parse(alphabet_size: usize, s: &str) -> Result<Self> {
        let s = s.trim();
        let digits = if s.contains(',') {
            s.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("invalid digit {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(36)
                        .map(|d| d as usize)
                        .ok_or_else(|| Error::Parse(format!("invalid digit {c:?}")))
                })
                .collect::<Result<Vec<_>>>()?
        };
        Self::new(alphabet_size, digits)
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn digits(&self) -> &[usize] {
        &self.digits
    }

    pub fn period(&self) -> usize {
        self.digits.len()
    }

    pub fn digit_at(&self, i: i64) -> usize {
        self.digits[i.rem_euclid(self.period() as i64) as usize]
    }

    /// `len` consecutive digits from index 0; `len` must be a multiple of the
    /// period for the result to describe the same point.
    pub fn expand(&self, len: usize) -> Vec<usize> {
        (0..len).map(|i| self.digits[i % self.period()]).collect()
    }

    /// `(x_i) -> (x_{i+1})`.
    pub fn shift(&self) -> Self {
        self.shift_by(1)
    }

    pub fn shift_by(&self, k: i64) -> Self {
        let p = self.period();
        let k = k.rem_euclid(p as i64) as usize;
        let mut digits = self.digits.clone();
        digits.rotate_left(k);
        // a rotation of a primitive word is primitive
        Self {
            alphabet_size: self.alphabet_size,
            digits,
        }
    }

    /// Combines two points coordinatewise over the lcm of their periods.
    pub fn zip_with(&self, other: &Self, mut f: impl FnMut(usize, usize) -> usize) -> Self {
        let len = self.period().lcm(&other.period());
        let digits = (0..len)
            .map(|i| {
                f(
                    self.digits[i % self.period()],
                    other.digits[i % other.period()],
                )
            })
            .collect();
        Self::canonical(self.alphabet_size, digits)
    }

    /// All points of minimal period at most `max_period`.
    pub fn enumerate_up_to(alphabet_size: usize, max_period: usize) -> Vec<Self> {
        (1..=max_period)
            .flat_map(|p| {
                Self::enumerate_words(alphabet_size, p)
                    .filter(move |w| minimal_period(w) == p)
                    .map(move |w| Self {
                        alphabet_size,
                        digits: w,
                    })
            })
            .collect()
    }

    /// All points whose period divides `period`, each exactly once.
    pub fn enumerate_dividing(alphabet_size: usize, period: usize) -> Vec<Self> {
        Self::enumerate_words(alphabet_size, period)
            .map(|w| Self::canonical(alphabet_size, w))
            .collect()
    }

    fn enumerate_words(alphabet_size: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
        let total = alphabet_size.pow(len as u32);
        (0..total).map(move |mut code| {
            let mut w = vec![0; len];
            for slot in w.iter_mut().rev() {
                *slot = code % alphabet_size;
                code /= alphabet_size;
            }
            w
        })
    }

    pub(crate) fn random(rng: &mut impl Rng, alphabet_size: usize, max_period: usize) -> Self {
        let p = rng.gen_range(1..=max_period);
        let digits = (0..p).map(|_| rng.gen_range(0..alphabet_size)).collect();
        Self::canonical(alphabet_size, digits)
    }
}

impl fmt::Display for PeriodicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.alphabet_size > 10 { "," } else { "" };
        let parts: Vec<String> = self.digits.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(sep))
    }
}

/// A point of the rotor system: a sequence and a rotor position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RotorPoint {
    pub seq: PeriodicPoint,
    pub rotor: usize,
}

impl RotorPoint {
    pub fn new(seq: PeriodicPoint, rotor: usize) -> Self {
        Self { seq, rotor }
    }
}

impl fmt::Display for RotorPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.seq, self.rotor)
    }
}

/// The full shift on `N` symbols times a rotation on `B` points, carrying
/// the operation `(x, a) * (y, b) = ((x_i ~* y_i)_i, λ(a + b) mod B)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotorShiftSystem {
    alphabet_size: usize,
    rotor_size: usize,
    base_op: FiniteQuasigroup,
    rotor_lambda: usize,
}

impl RotorShiftSystem {
    pub fn new(base_op: FiniteQuasigroup, rotor_size: usize) -> Result<Self> {
        if rotor_size == 0 {
            return Err(Error::InvalidArgument("rotor size must be positive".into()));
        }
        if rotor_size.is_multiple_of(2) {
            return Err(Error::EvenRotorSize(rotor_size));
        }
        Ok(Self {
            alphabet_size: base_op.order(),
            rotor_size,
            base_op,
            rotor_lambda: rotor_size.div_ceil(2),
        })
    }

    /// Uses the translation quasigroup for odd `N` and the idempotent search
    /// result for even `N`. `N = 2` has no idempotent square and falls back
    /// to addition mod 2.
    pub fn with_default_op(alphabet_size: usize, rotor_size: usize) -> Result<Self> {
        let base_op = if alphabet_size % 2 == 1 {
            build_translation_quasigroup(alphabet_size)?
        } else if alphabet_size == 2 {
            FiniteQuasigroup::cyclic_sum(2)?
        } else {
            build_idempotent_quasigroup(alphabet_size)?
        };
        Self::new(base_op, rotor_size)
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn rotor_size(&self) -> usize {
        self.rotor_size
    }

    pub fn rotor_lambda(&self) -> usize {
        self.rotor_lambda
    }

    pub fn base_op(&self) -> &FiniteQuasigroup {
        &self.base_op
    }

    pub fn point(&self, seq: PeriodicPoint, rotor: usize) -> Result<RotorPoint> {
        let p = RotorPoint::new(seq, rotor);
        self.validate(&p)?;
        Ok(p)
    }

    pub fn validate(&self, u: &RotorPoint) -> Result<()> {
        if u.seq.alphabet_size() != self.alphabet_size {
            return Err(Error::AlphabetMismatch {
                expected: self.alphabet_size,
                found: u.seq.alphabet_size(),
            });
        }
        if u.rotor >= self.rotor_size {
            return Err(Error::SymbolOutOfRange {
                symbol: u.rotor,
                order: self.rotor_size,
            });
        }
        Ok(())
    }

    /// `S(x, a) = (shift(x), a + 1 mod B)`.
    pub fn system_map(&self, u: &RotorPoint) -> Result<RotorPoint> {
        self.validate(u)?;
        Ok(RotorPoint::new(
            u.seq.shift(),
            (u.rotor + 1) % self.rotor_size,
        ))
    }

    pub fn op_canonical(&self, u: &RotorPoint, v: &RotorPoint) -> Result<RotorPoint> {
        self.validate(u)?;
        self.validate(v)?;
        Ok(self.op_unchecked(u, v))
    }

    fn op_unchecked(&self, u: &RotorPoint, v: &RotorPoint) -> RotorPoint {
        let seq = u.seq.zip_with(&v.seq, |x, y| self.base_op.mul_raw(x, y));
        let rotor = self.rotor_lambda * (u.rotor + v.rotor) % self.rotor_size;
        RotorPoint::new(seq, rotor)
    }

    /// Topological entropy in nats. The rotor factor contributes nothing.
    pub fn entropy(&self) -> f64 {
        (self.alphabet_size as f64).ln()
    }

    /// Size of the cyclic decomposition `C_i = {0..N-1}^Z x {i}` permuted by
    /// `S` as `S(C_i) = C_{i+1 mod B}`.
    pub fn ergodic_period(&self) -> usize {
        self.rotor_size
    }

    /// Checks `S(u * v) = S(u) * S(v)`, returning the counterexample if any.
    pub fn automorphism_holds(&self, u: &RotorPoint, v: &RotorPoint) -> Option<Counterexample> {
        let shift =
            |p: &RotorPoint| RotorPoint::new(p.seq.shift(), (p.rotor + 1) % self.rotor_size);
        let lhs = shift(&self.op_unchecked(u, v));
        let rhs = self.op_unchecked(&shift(u), &shift(v));
        (lhs != rhs).then(|| Counterexample {
            u: u.clone(),
            v: v.clone(),
            lhs,
            rhs,
        })
    }

    /// Every rotor point with sequence period at most `max_period`.
    pub fn enumerate_points(&self, max_period: usize) -> Vec<RotorPoint> {
        let seqs = PeriodicPoint::enumerate_up_to(self.alphabet_size, max_period);
        seqs.iter()
            .flat_map(|s| (0..self.rotor_size).map(move |r| RotorPoint::new(s.clone(), r)))
            .collect()
    }

    /// Exhaustive automorphism check over all pairs with sequence period at
    /// most `max_period`.
    pub fn check_automorphism_exhaustive(&self, max_period: usize) -> AutomorphismReport {
        let points = self.enumerate_points(max_period);
        let failures: Vec<Counterexample> = points
            .par_iter()
            .flat_map_iter(|u| {
                points
                    .iter()
                    .filter_map(move |v| self.automorphism_holds(u, v))
            })
            .collect();
        AutomorphismReport {
            mode: CheckMode::Exhaustive,
            seed: None,
            max_period,
            trials: (points.len() * points.len()) as u64,
            failures: failures.len() as u64,
            counterexample: failures.into_iter().next(),
        }
    }

    /// Random automorphism check. Trial `t` draws from the ChaCha8 stream
    /// `t` under `seed`, so the report does not depend on scheduling.
    pub fn check_automorphism_random(
        &self,
        trials: u64,
        seed: u64,
        max_period: usize,
    ) -> Result<AutomorphismReport> {
        if trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if max_period == 0 {
            return Err(Error::InvalidArgument(
                "max period must be at least 1".into(),
            ));
        }
        let failures: Vec<Counterexample> = (0..trials)
            .into_par_iter()
            .filter_map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t);
                let u = self.random_point(&mut rng, max_period);
                let v = self.random_point(&mut rng, max_period);
                self.automorphism_holds(&u, &v)
            })
            .collect();
        Ok(AutomorphismReport {
            mode: CheckMode::Random,
            seed: Some(seed),
            max_period,
            trials,
            failures: failures.len() as u64,
            counterexample: failures.into_iter().next(),
        })
    }

    pub fn random_point(&self, rng: &mut impl Rng, max_period: usize) -> RotorPoint {
        RotorPoint::new(
            PeriodicPoint::random(rng, self.alphabet_size, max_period),
            rng.gen_range(0..self.rotor_size),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    Exhaustive,
    Random,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub u: RotorPoint,
    pub v: RotorPoint,
    pub lhs: RotorPoint,
    pub rhs: RotorPoint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AutomorphismReport {
    pub mode: CheckMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub max_period: usize,
    pub trials: u64,
    pub failures: u64,
    pub counterexample: Option<Counterexample>,
}

impl AutomorphismReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}
