//! Finite quasigroups represented by their Latin squares.
//!
//! A [`LatinSquare`] is validated on construction: every row and every
//! column must be a permutation of `0..n`. A [`FiniteQuasigroup`] wraps a
//! square together with precomputed division tables, so multiplication and
//! both divisions are table lookups.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported order. Searches over squares are exponential, so this
/// stays at desk scale.
pub const MAX_ORDER: usize = 64;

fn check_order(n: usize) -> Result<()> {
    if n == 0 || n > MAX_ORDER {
        return Err(Error::OrderOutOfRange(n));
    }
    Ok(())
}

fn is_permutation_of(values: impl Iterator<Item = usize>, n: usize) -> bool {
    let mut seen = vec![false; n];
    for v in values {
        if v >= n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    seen.iter().all(|&s| s)
}

/// A bijection of `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        if !is_permutation_of(image.iter().copied(), n) {
            return Err(Error::NotAPermutation(n));
        }
        Ok(Self { image })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            image: (0..n).collect(),
        }
    }

    /// The translation `x -> x + 1 mod n`.
    pub fn cyclic_shift(n: usize) -> Self {
        Self {
            image: (0..n).map(|x| (x + 1) % n).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.image.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.image[x]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.image.len()];
        for (x, &y) in self.image.iter().enumerate() {
            inv[y] = x;
        }
        Self { image: inv }
    }

    /// True when the orbit of any point under the permutation is the whole
    /// set, i.e. the permutation is a single `n`-cycle.
    pub fn is_translation(&self) -> bool {
        let n = self.image.len();
        if n == 0 {
            return false;
        }
        let mut x = 0;
        for step in 1..=n {
            x = self.image[x];
            if x == 0 {
                return step == n;
            }
        }
        false
    }
}

/// An `n x n` table whose rows and columns are permutations of `0..n`.
///
/// Entry `(x, y)` is the product `x * y`. Storage is dense and row-major.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SquareRecord", into = "SquareRecord")]
pub struct LatinSquare {
    order: usize,
    cells: Vec<u8>,
}

#[derive(Serialize, Deserialize)]
struct SquareRecord {
    order: usize,
    table: Vec<Vec<usize>>,
}

impl TryFrom<SquareRecord> for LatinSquare {
    type Error = Error;

    fn try_from(rec: SquareRecord) -> Result<Self> {
        if rec.table.len() != rec.order {
            return Err(Error::NotSquare {
                row: rec.table.len(),
                len: 0,
                expected: rec.order,
            });
        }
        LatinSquare::from_rows(&rec.table)
    }
}

impl From<LatinSquare> for SquareRecord {
    fn from(sq: LatinSquare) -> Self {
        SquareRecord {
            order: sq.order,
            table: sq.rows(),
        }
    }
}

impl LatinSquare {
    /// Validates `rows` as a Latin square. Violations name the first
    /// offending row or column.
    pub fn from_rows<R: AsRef<[usize]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        check_order(n)?;
        let mut cells = Vec::with_capacity(n * n);
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::NotSquare {
                    row: r,
                    len: row.len(),
                    expected: n,
                });
            }
            for &v in row {
                if v >= n {
                    return Err(Error::SymbolOutOfRange {
                        symbol: v,
                        order: n,
                    });
                }
                cells.push(v as u8);
            }
        }
        Self::from_cells(n, cells)
    }

    pub(crate) fn from_cells(n: usize, cells: Vec<u8>) -> Result<Self> {
        check_order(n)?;
        debug_assert_eq!(cells.len(), n * n);
        for r in 0..n {
            if !is_permutation_of((0..n).map(|c| cells[r * n + c] as usize), n) {
                return Err(Error::RowNotPermutation(r));
            }
        }
        for c in 0..n {
            if !is_permutation_of((0..n).map(|r| cells[r * n + c] as usize), n) {
                return Err(Error::ColumnNotPermutation(c));
            }
        }
        Ok(Self { order: n, cells })
    }

    /// Builds the square `table[x][y] = f(x, y)` and validates it.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> usize) -> Result<Self> {
        check_order(n)?;
        let mut cells = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                let v = f(x, y);
                if v >= n {
                    return Err(Error::SymbolOutOfRange {
                        symbol: v,
                        order: n,
                    });
                }
                cells.push(v as u8);
            }
        }
        Self::from_cells(n, cells)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> usize {
        self.cells[x * self.order + y] as usize
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        (0..self.order)
            .map(|x| (0..self.order).map(|y| self.get(x, y)).collect())
            .collect()
    }

    pub fn is_idempotent(&self) -> bool {
        (0..self.order).all(|x| self.get(x, x) == x)
    }

    /// Plain-text form: `n` lines of `n` space-separated integers.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

impl FromStr for LatinSquare {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rows = s
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .enumerate()
            .map(|(i, line)| {
                line.split_whitespace()
                    .map(|tok| {
                        tok.parse::<usize>().map_err(|_| {
                            Error::Parse(format!("line {}: invalid symbol {tok:?}", i + 1))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(&rows)
    }
}

impl fmt::Debug for LatinSquare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LatinSquare")
            .field("order", &self.order)
            .field("table", &self.rows())
            .finish()
    }
}

impl fmt::Display for LatinSquare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// A quasigroup on `0..n` given by a Latin square, with both division
/// tables precomputed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "QuasigroupRecord", into = "QuasigroupRecord")]
pub struct FiniteQuasigroup {
    square: LatinSquare,
    idempotent: bool,
    automorphic_translation: Option<Permutation>,
    // left_div[x * n + z] = y with x * y = z
    left_div: Vec<u8>,
    // right_div[y * n + z] = x with x * y = z
    right_div: Vec<u8>,
}

#[derive(Serialize, Deserialize)]
struct QuasigroupRecord {
    order: usize,
    table: Vec<Vec<usize>>,
    flags: QuasigroupFlags,
}

#[derive(Serialize, Deserialize, Default)]
struct QuasigroupFlags {
    #[serde(default)]
    idempotent: bool,
    #[serde(default)]
    automorphic_translation: Option<Vec<usize>>,
}

impl TryFrom<QuasigroupRecord> for FiniteQuasigroup {
    type Error = Error;

    fn try_from(rec: QuasigroupRecord) -> Result<Self> {
        let square = LatinSquare::try_from(SquareRecord {
            order: rec.order,
            table: rec.table,
        })?;
        let mut q = FiniteQuasigroup::new(square);
        if rec.flags.idempotent {
            q = q.with_idempotent_flag()?;
        }
        if let Some(image) = rec.flags.automorphic_translation {
            let s = Permutation::new(image)?;
            if !q.is_automorphism(&s)? {
                return Err(Error::InvalidArgument(
                    "flagged translation is not an automorphism".into(),
                ));
            }
            q.automorphic_translation = Some(s);
        }
        Ok(q)
    }
}

impl From<FiniteQuasigroup> for QuasigroupRecord {
    fn from(q: FiniteQuasigroup) -> Self {
        QuasigroupRecord {
            order: q.order(),
            table: q.square.rows(),
            flags: QuasigroupFlags {
                idempotent: q.idempotent,
                automorphic_translation: q.automorphic_translation.map(|p| p.image),
            },
        }
    }
}

impl FiniteQuasigroup {
    pub fn new(square: LatinSquare) -> Self {
        let n = square.order();
        let mut left_div = vec![0u8; n * n];
        let mut right_div = vec![0u8; n * n];
        for x in 0..n {
            for y in 0..n {
                let z = square.get(x, y);
                left_div[x * n + z] = y as u8;
                right_div[y * n + z] = x as u8;
            }
        }
        Self {
            square,
            idempotent: false,
            automorphic_translation: None,
            left_div,
            right_div,
        }
    }

    /// Sets the idempotent flag after checking `x * x = x` for all `x`.
    pub fn with_idempotent_flag(mut self) -> Result<Self> {
        if let Some(x) = (0..self.order()).find(|&x| self.square.get(x, x) != x) {
            return Err(Error::NotIdempotent(x));
        }
        self.idempotent = true;
        Ok(self)
    }

    /// The group `(Z_n, +)`, which is a quasigroup for every `n`.
    pub fn cyclic_sum(n: usize) -> Result<Self> {
        LatinSquare::from_fn(n, |x, y| (x + y) % n).map(Self::new)
    }

    pub fn order(&self) -> usize {
        self.square.order()
    }

    pub fn square(&self) -> &LatinSquare {
        &self.square
    }

    pub fn is_idempotent(&self) -> bool {
        self.idempotent
    }

    pub fn automorphic_translation(&self) -> Option<&Permutation> {
        self.automorphic_translation.as_ref()
    }

    fn check(&self, s: usize) -> Result<()> {
        if s >= self.order() {
            return Err(Error::SymbolOutOfRange {
                symbol: s,
                order: self.order(),
            });
        }
        Ok(())
    }

    pub fn mul(&self, x: usize, y: usize) -> Result<usize> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.square.get(x, y))
    }

    /// The unique `y` with `x * y = z`.
    pub fn left_div(&self, x: usize, z: usize) -> Result<usize> {
        self.check(x)?;
        self.check(z)?;
        Ok(self.left_div[x * self.order() + z] as usize)
    }

    /// The unique `x` with `x * y = z`.
    pub fn right_div(&self, z: usize, y: usize) -> Result<usize> {
        self.check(z)?;
        self.check(y)?;
        Ok(self.right_div[y * self.order() + z] as usize)
    }

    // Unchecked variants for hot loops over digits already validated
    // against the order.
    #[inline]
    pub(crate) fn mul_raw(&self, x: usize, y: usize) -> usize {
        self.square.get(x, y)
    }

    #[inline]
    pub(crate) fn left_div_raw(&self, x: usize, z: usize) -> usize {
        self.left_div[x * self.order() + z] as usize
    }

    #[inline]
    pub(crate) fn right_div_raw(&self, z: usize, y: usize) -> usize {
        self.right_div[y * self.order() + z] as usize
    }

    /// Checks `f(x) * f(y) = f(x * y)` over all `n^2` pairs.
    pub fn is_automorphism(&self, f: &Permutation) -> Result<bool> {
        let n = self.order();
        if f.order() != n {
            return Err(Error::OrderMismatch {
                left: n,
                right: f.order(),
            });
        }
        Ok((0..n).all(|x| {
            (0..n).all(|y| self.mul_raw(f.apply(x), f.apply(y)) == f.apply(self.mul_raw(x, y)))
        }))
    }
}

/// The quasigroup `x * y = λ(x + y) mod n` with `λ = (n + 1) / 2`, for odd
/// `n`. The translation `x -> x + 1` is an automorphism and, since
/// `2λ ≡ 1 (mod n)`, the result is idempotent.
pub fn build_translation_quasigroup(n: usize) -> Result<FiniteQuasigroup> {
    check_order(n)?;
    if n.is_multiple_of(2) {
        return Err(Error::EvenOrderUnsupported(n));
    }
    let lambda = n.div_ceil(2);
    let square = LatinSquare::from_fn(n, |x, y| lambda * (x + y) % n)?;
    let mut q = FiniteQuasigroup::new(square).with_idempotent_flag()?;
    q.automorphic_translation = Some(Permutation::cyclic_shift(n));
    Ok(q)
}

/// Largest even order built by lexicographic search; above it the search
/// stalls (order 22 already takes minutes) and [`prolongation`] is used.
pub const LEXICOGRAPHIC_IDEMPOTENT_MAX: usize = 12;

/// An idempotent quasigroup of order `n`.
///
/// Odd orders reuse [`build_translation_quasigroup`]. Even orders up to
/// [`LEXICOGRAPHIC_IDEMPOTENT_MAX`] take the first square in lexicographic
/// backtracking order with the diagonal fixed to the identity; larger even
/// orders use [`prolongation`]. Order 2 has none.
pub fn build_idempotent_quasigroup(n: usize) -> Result<FiniteQuasigroup> {
    check_order(n)?;
    if n % 2 == 1 {
        return build_translation_quasigroup(n);
    }
    if n > LEXICOGRAPHIC_IDEMPOTENT_MAX {
        return FiniteQuasigroup::new(prolongation(n)?).with_idempotent_flag();
    }
    match crate::oracle::complete_fixed_diagonal(n) {
        crate::oracle::IdempotentSearch::Found { square, .. } => {
            FiniteQuasigroup::new(square).with_idempotent_flag()
        }
        crate::oracle::IdempotentSearch::Nonexistent(cert) => Err(Error::NoIdempotentSquare {
            n,
            nodes: cert.nodes_explored,
        }),
    }
}

/// Idempotent square of even order `n >= 4` obtained from the translation
/// square `A` of odd order `m = n - 1`.
///
/// The cells `(x, x + 1 mod m)` form a transversal of `A` off the diagonal.
/// Each of them receives the new symbol `m`, and its old value moves to the
/// new last column (same row) and the new last row (same column). The
/// corner is `m`.
pub fn prolongation(n: usize) -> Result<LatinSquare> {
    check_order(n)?;
    if n % 2 == 1 || n < 4 {
        return Err(Error::InvalidArgument(format!(
            "prolongation needs an even order >= 4, got {n}"
        )));
    }
    let m = n - 1;
    let lambda = m.div_ceil(2);
    let base = |x: usize, y: usize| lambda * (x + y) % m;
    LatinSquare::from_fn(n, |x, y| match (x == m, y == m) {
        (true, true) => m,
        (false, true) => base(x, (x + 1) % m),
        (true, false) => base((y + m - 1) % m, y),
        (false, false) if y == (x + 1) % m => m,
        (false, false) => base(x, y),
    })
}
