//! Product shifts `Y = Y_1 x ... x Y_q` with componentwise idempotent
//! quasigroups, and the factorization of a point as a right-nested product
//! `x = x_1 * (x_2 * (... (x_{q-1} * x_q)))` with `x_k` in a section `S_k`.
//!
//! Coordinates are 0-based in code.

use std::collections::{HashMap, HashSet};

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quasigroup::{build_idempotent_quasigroup, FiniteQuasigroup};
use crate::symbolic::PeriodicPoint;

/// Default cap on the number of points in a period slice.
pub const DEFAULT_SLICE_CAP: u64 = 20_000;

fn is_excluded(p: u64) -> bool {
    p == 2 || p == 6
}

/// All multisets `p_1 <= ... <= p_q` of integers `>= 3` with product `n`
/// and no factor equal to 6. With `require_nontrivial` only `q >= 2` is
/// kept. Ordered by number of factors, then lexicographically.
pub fn admissible_factorization(n: u64, require_nontrivial: bool) -> Result<Vec<Vec<u64>>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "N must be at least 2, got {n}"
        )));
    }
    fn go(rest: u64, min: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if rest == 1 {
            out.push(cur.clone());
            return;
        }
        let mut d = min;
        while d * d <= rest {
            if rest.is_multiple_of(d) && !is_excluded(d) {
                cur.push(d);
                go(rest / d, d, cur, out);
                cur.pop();
            }
            d += 1;
        }
        if rest >= min && !is_excluded(rest) {
            cur.push(rest);
            out.push(cur.clone());
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, 2, &mut Vec::new(), &mut out);
    out.retain(|f| !require_nontrivial || f.len() >= 2);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// Componentwise product of idempotent quasigroups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductShift {
    factors: Vec<FiniteQuasigroup>,
}

impl ProductShift {
    /// Checked constructor: rejects factors 2 and 6 and builds an
    /// idempotent quasigroup for each remaining factor.
    pub fn for_factors(factors: &[usize]) -> Result<Self> {
        if factors.is_empty() || factors.contains(&0) {
            return Err(Error::InvalidFactors);
        }
        if let Some(&p) = factors.iter().find(|&&p| is_excluded(p as u64)) {
            return Err(Error::ExcludedFactor(p));
        }
        let ops = factors
            .iter()
            .map(|&p| build_idempotent_quasigroup(p))
            .collect::<Result<Vec<_>>>()?;
        Self::from_quasigroups(ops)
    }

    /// Any idempotent factors, including order 6.
    pub fn from_quasigroups(factors: Vec<FiniteQuasigroup>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidFactors);
        }
        let factors = factors
            .into_iter()
            .map(|q| {
                if q.is_idempotent() {
                    Ok(q)
                } else {
                    q.with_idempotent_flag()
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { factors })
    }

    pub fn arity(&self) -> usize {
        self.factors.len()
    }

    pub fn alphabet_sizes(&self) -> Vec<usize> {
        self.factors.iter().map(FiniteQuasigroup::order).collect()
    }

    pub fn factor(&self, k: usize) -> &FiniteQuasigroup {
        &self.factors[k]
    }

    pub fn point(&self, components: Vec<PeriodicPoint>) -> Result<ProductPoint> {
        let p = ProductPoint { components };
        self.validate(&p)?;
        Ok(p)
    }

    /// Builds a point from raw digit arrays, one per coordinate.
    pub fn point_from_digits(&self, digits: Vec<Vec<usize>>) -> Result<ProductPoint> {
        if digits.len() != self.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                found: digits.len(),
            });
        }
        let components = digits
            .into_iter()
            .zip(self.alphabet_sizes())
            .map(|(d, n)| PeriodicPoint::new(n, d))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProductPoint { components })
    }

    pub fn validate(&self, x: &ProductPoint) -> Result<()> {
        if x.components.len() != self.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                found: x.components.len(),
            });
        }
        for (c, q) in x.components.iter().zip(&self.factors) {
            self.check_alphabet(c, q.order())?;
        }
        Ok(())
    }

    fn check_alphabet(&self, p: &PeriodicPoint, expected: usize) -> Result<()> {
        if p.alphabet_size() != expected {
            return Err(Error::AlphabetMismatch {
                expected,
                found: p.alphabet_size(),
            });
        }
        Ok(())
    }

    pub fn componentwise_mul(&self, u: &ProductPoint, v: &ProductPoint) -> Result<ProductPoint> {
        self.validate(u)?;
        self.validate(v)?;
        Ok(self.mul_unchecked(u, v))
    }

    fn mul_unchecked(&self, u: &ProductPoint, v: &ProductPoint) -> ProductPoint {
        let components = u
            .components
            .iter()
            .zip(&v.components)
            .zip(&self.factors)
            .map(|((a, b), q)| a.zip_with(b, |x, y| q.mul_raw(x, y)))
            .collect();
        ProductPoint { components }
    }

    /// `x_1 * (x_2 * (... * x_q))` for any number of terms.
    pub fn right_nested_product(&self, terms: &[ProductPoint]) -> Result<ProductPoint> {
        let (last, init) = terms
            .split_last()
            .ok_or_else(|| Error::InvalidArgument("empty product".into()))?;
        self.validate(last)?;
        init.iter()
            .rev()
            .try_fold(last.clone(), |acc, t| self.componentwise_mul(t, &acc))
    }

    /// The section on coordinate `k` through the given base points, one for
    /// each `j != k` in increasing `j`.
    pub fn make_section(&self, k: usize, bases: Vec<PeriodicPoint>) -> Result<Section> {
        let q = self.arity();
        if k >= q {
            return Err(Error::CoordinateOutOfRange { k, q });
        }
        if bases.len() != q - 1 {
            return Err(Error::ArityMismatch {
                expected: q - 1,
                found: bases.len(),
            });
        }
        let mut it = bases.into_iter();
        let mut base = Vec::with_capacity(q);
        for j in 0..q {
            if j == k {
                base.push(None);
            } else {
                let z = it.next().expect("length checked");
                self.check_alphabet(&z, self.factors[j].order())?;
                base.push(Some(z));
            }
        }
        Ok(Section { k, base })
    }

    /// One section per coordinate with constant-0 bases.
    pub fn default_sections(&self) -> Vec<Section> {
        (0..self.arity())
            .map(|k| {
                let bases = (0..self.arity())
                    .filter(|&j| j != k)
                    .map(|j| {
                        PeriodicPoint::constant(self.factors[j].order(), 0).expect("order >= 1")
                    })
                    .collect();
                self.make_section(k, bases)
                    .expect("well-formed default bases")
            })
            .collect()
    }

    pub fn section_member(&self, sec: &Section, free: &PeriodicPoint) -> Result<ProductPoint> {
        self.check_alphabet(free, self.factors[sec.k].order())?;
        Ok(sec.embed(free))
    }

    /// Solves `x = x_1 * (x_2 * (... * x_q))` with `x_k` in `sections[k]`.
    ///
    /// At coordinate `j`, term `i` contributes the base digit `z_{i,j}` for
    /// `i != j` and the unknown digit for `i == j`. The known prefix terms
    /// are peeled with left division, the known suffix is multiplied out,
    /// and the unknown is recovered by one right division (or directly when
    /// `j` is the last coordinate).
    pub fn decompose(&self, x: &ProductPoint, sections: &[Section]) -> Result<Vec<ProductPoint>> {
        self.validate(x)?;
        let q = self.arity();
        if sections.len() != q {
            return Err(Error::ArityMismatch {
                expected: q,
                found: sections.len(),
            });
        }
        for (position, s) in sections.iter().enumerate() {
            if s.k != position || s.base.len() != q {
                return Err(Error::SectionOrder { position, k: s.k });
            }
        }

        let mut free = Vec::with_capacity(q);
        for j in 0..q {
            let op = &self.factors[j];
            // term i at coordinate j, None for the unknown
            let terms: Vec<Option<&PeriodicPoint>> =
                sections.iter().map(|s| s.base[j].as_ref()).collect();
            let len = terms
                .iter()
                .flatten()
                .fold(x.components[j].period(), |acc, z| acc.lcm(&z.period()));
            let target = x.components[j].expand(len);
            let digits: Vec<usize> = (0..len)
                .map(|t| {
                    let digit = |i: usize| {
                        let z = terms[i].expect("only coordinate j is unknown");
                        z.digits()[t % z.period()]
                    };
                    let mut r = target[t];
                    for i in 0..j {
                        r = op.left_div_raw(digit(i), r);
                    }
                    if j + 1 == q {
                        return r;
                    }
                    let tail = (j + 1..q - 1)
                        .rev()
                        .fold(digit(q - 1), |acc, i| op.mul_raw(digit(i), acc));
                    op.right_div_raw(r, tail)
                })
                .collect();
            free.push(PeriodicPoint::new(op.order(), digits)?);
        }
        Ok(sections
            .iter()
            .zip(&free)
            .map(|(s, f)| s.embed(f))
            .collect())
    }

    /// All points whose components have period dividing `period`, as
    /// `period`-length digit arrays. Fails if there are more than `cap`.
    fn slice_size(&self, period: usize, cap: u64) -> Result<u64> {
        let base: u64 = self.alphabet_sizes().iter().map(|&n| n as u64).product();
        let size = base
            .checked_pow(period as u32)
            .filter(|&s| s <= cap)
            .ok_or_else(|| {
                Error::ResourceLimit(format!(
                    "period-{period} slice of a {base}-symbol product exceeds cap {cap}"
                ))
            })?;
        Ok(size)
    }

    /// The closure under `*` of all shifts of the period-`period` members of
    /// `sec`, as a set of points.
    pub fn orbit_closure_slice(
        &self,
        sec: &Section,
        period: usize,
        cap: u64,
    ) -> Result<HashSet<ProductPoint>> {
        if period == 0 {
            return Err(Error::InvalidArgument("period must be positive".into()));
        }
        self.slice_size(period, cap)?;
        let mut generators = Vec::new();
        let bases_fit = sec
            .base
            .iter()
            .flatten()
            .all(|z| period.is_multiple_of(z.period()));
        if bases_fit {
            for f in PeriodicPoint::enumerate_dividing(self.factors[sec.k].order(), period) {
                let m = sec.embed(&f);
                for n in 0..period as i64 {
                    generators.push(m.shift_by(n));
                }
            }
        }
        let mut seen: HashSet<ProductPoint> = HashSet::new();
        let mut elems: Vec<ProductPoint> = Vec::new();
        for g in generators {
            if seen.insert(g.clone()) {
                elems.push(g);
            }
        }
        // elems[..done] have been multiplied against each other
        let mut done = 0;
        while done < elems.len() {
            let new = elems[done].clone();
            let mut products = Vec::new();
            for other in &elems[..=done] {
                products.push(self.mul_unchecked(&new, other));
                products.push(self.mul_unchecked(other, &new));
            }
            for p in products {
                if seen.insert(p.clone()) {
                    elems.push(p);
                }
            }
            done += 1;
        }
        Ok(seen)
    }

    /// Whether `x` lies in the period-`period` slice of the subquasigroup
    /// generated by all shifts of `sec`.
    pub fn orbit_closure_membership(
        &self,
        sec: &Section,
        period: usize,
        x: &ProductPoint,
        cap: u64,
    ) -> Result<bool> {
        self.validate(x)?;
        if period == 0 || !period.is_multiple_of(x.period()) {
            return Err(Error::PeriodMismatch {
                period: x.period(),
                slice: period,
            });
        }
        Ok(self.orbit_closure_slice(sec, period, cap)?.contains(x))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ProductPoint {
    components: Vec<PeriodicPoint>,
}

impl ProductPoint {
    pub fn components(&self) -> &[PeriodicPoint] {
        &self.components
    }

    pub fn period(&self) -> usize {
        self.components
            .iter()
            .fold(1, |acc, c| acc.lcm(&c.period()))
    }

    pub fn shift(&self) -> Self {
        self.shift_by(1)
    }

    pub fn shift_by(&self, k: i64) -> Self {
        Self {
            components: self.components.iter().map(|c| c.shift_by(k)).collect(),
        }
    }
}

/// `S_k = { x : x_j = z_{k,j} for all j != k }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Section {
    k: usize,
    base: Vec<Option<PeriodicPoint>>,
}

impl Section {
    pub fn coordinate(&self) -> usize {
        self.k
    }

    pub fn base(&self, j: usize) -> Option<&PeriodicPoint> {
        self.base.get(j).and_then(Option::as_ref)
    }

    pub fn contains(&self, x: &ProductPoint) -> bool {
        x.components.len() == self.base.len()
            && self
                .base
                .iter()
                .zip(&x.components)
                .all(|(z, c)| z.as_ref().is_none_or(|z| z == c))
    }

    fn embed(&self, free: &PeriodicPoint) -> ProductPoint {
        let components = self
            .base
            .iter()
            .map(|z| z.clone().unwrap_or_else(|| free.clone()))
            .collect();
        ProductPoint { components }
    }
}

/// How an element of a generated closure was first obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Derivation {
    Generator,
    Product(usize, usize),
}

/// A mul-closed subset of a finite quasigroup with a derivation of every
/// element from the generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Subquasigroup {
    pub order: usize,
    pub generators: Vec<usize>,
    pub elements: Vec<usize>,
    pub derivations: HashMap<usize, Derivation>,
}

impl Subquasigroup {
    pub fn contains(&self, a: usize) -> bool {
        self.derivations.contains_key(&a)
    }

    /// Checks closure under `*` and that every derivation bottoms out in
    /// generators through earlier elements.
    pub fn verify(&self, q: &FiniteQuasigroup) -> bool {
        let closed = self.elements.iter().all(|&a| {
            self.elements
                .iter()
                .all(|&b| self.contains(q.mul_raw(a, b)))
        });
        let rank: HashMap<usize, usize> = self
            .elements
            .iter()
            .enumerate()
            .map(|(i, &e)| (e, i))
            .collect();
        let derived = self.elements.iter().all(|e| match self.derivations[e] {
            Derivation::Generator => self.generators.contains(e),
            Derivation::Product(a, b) => {
                q.mul_raw(a, b) == *e && rank[&a] < rank[e] && rank[&b] < rank[e]
            }
        });
        closed && derived
    }
}

/// The least mul-closed superset of `generators`. In a finite quasigroup a
/// mul-closed subset is a subquasigroup.
pub fn generated_closure(q: &FiniteQuasigroup, generators: &[usize]) -> Result<Subquasigroup> {
    if generators.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    let mut derivations = HashMap::new();
    let mut elements = Vec::new();
    for &g in generators {
        q.mul(g, g)?;
        if derivations.insert(g, Derivation::Generator).is_none() {
            elements.push(g);
        }
    }
    let mut done = 0;
    while done < elements.len() {
        let a = elements[done];
        for i in 0..=done {
            let b = elements[i];
            for (l, r) in [(a, b), (b, a)] {
                let c = q.mul_raw(l, r);
                if let std::collections::hash_map::Entry::Vacant(e) = derivations.entry(c) {
                    e.insert(Derivation::Product(l, r));
                    elements.push(c);
                }
            }
        }
        done += 1;
    }
    let mut generators = generators.to_vec();
    generators.sort_unstable();
    generators.dedup();
    Ok(Subquasigroup {
        order: q.order(),
        generators,
        elements,
        derivations,
    })
}
