//! Brute-force certifiers.
//!
//! Everything here is exhaustive: enumeration of shift-automorphic
//! operation tables, the row/column sum obstruction for even orders, Latin
//! square counting and the fixed-diagonal completion search.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quasigroup::LatinSquare;

pub const MAX_AUTOMORPHIC_ORDER: usize = 8;
pub const MAX_COUNT_ORDER: usize = 5;
pub const MAX_IDEMPOTENT_SEARCH_ORDER: usize = 12;

/// The first row `a_0, ..., a_{n-1}` of an operation table for which
/// `x -> x + 1 mod n` is an automorphism. The whole table is determined by
/// it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AVector {
    entries: Vec<usize>,
}

impl AVector {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return Err(Error::OrderOutOfRange(0));
        }
        if let Some(&bad) = entries.iter().find(|&&a| a >= n) {
            return Err(Error::SymbolOutOfRange {
                symbol: bad,
                order: n,
            });
        }
        Ok(Self { entries })
    }

    pub fn order(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    /// `count` uniformly random vectors with distinct entries (permutations
    /// of `0..n`), reproducible from `seed`.
    pub fn random_distinct(n: usize, count: usize, seed: u64) -> Result<Vec<Self>> {
        if n == 0 {
            return Err(Error::OrderOutOfRange(0));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok((0..count)
            .map(|_| {
                let mut entries: Vec<usize> = (0..n).collect();
                entries.shuffle(&mut rng);
                Self { entries }
            })
            .collect())
    }

    pub fn has_distinct_entries(&self) -> bool {
        let mut seen = vec![false; self.order()];
        self.entries
            .iter()
            .all(|&a| !std::mem::replace(&mut seen[a], true))
    }
}

/// An arbitrary `n x n` operation table, not necessarily Latin.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OperationTable {
    order: usize,
    rows: Vec<Vec<usize>>,
}

impl OperationTable {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, x: usize, y: usize) -> usize {
        self.rows[x][y]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn is_latin(&self) -> bool {
        LatinSquare::from_rows(&self.rows).is_ok()
    }

    pub fn to_latin_square(&self) -> Result<LatinSquare> {
        LatinSquare::from_rows(&self.rows)
    }
}

/// `x * y = a_{(y - x) mod n} + x mod n`.
pub fn table_from_avector(a: &AVector) -> OperationTable {
    let n = a.order();
    let rows = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| (a.entries[(y + n - x) % n] + x) % n)
                .collect()
        })
        .collect();
    OperationTable { order: n, rows }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AutomorphicReport {
    pub n: usize,
    /// Candidates whose table was built and checked (distinct entries).
    pub candidates_checked: u64,
    /// All `n^n` vectors, pruned or not.
    pub candidates_total: u64,
    pub latin_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tables: Option<Vec<AVector>>,
}

/// Enumerates all `n^n` a-vectors and counts those whose table is Latin.
///
/// Vectors with a repeated entry are skipped without building their table:
/// row 0 of the table is the vector itself, so it cannot be Latin.
/// The space is split by leading entry and the parts are summed.
pub fn enumerate_automorphic(n: usize, collect: bool) -> Result<AutomorphicReport> {
    if n == 0 || n > MAX_AUTOMORPHIC_ORDER {
        return Err(Error::ResourceLimit(format!(
            "automorphic enumeration supports 1..={MAX_AUTOMORPHIC_ORDER}, got {n}"
        )));
    }
    let parts: Vec<(u64, u64, Vec<AVector>)> = (0..n)
        .into_par_iter()
        .map(|lead| {
            let mut entries = vec![0usize; n];
            entries[0] = lead;
            let mut checked = 0u64;
            let mut found = 0u64;
            let mut tables = Vec::new();
            let mut seen = vec![false; n];
            loop {
                seen.fill(false);
                let distinct = entries
                    .iter()
                    .all(|&e| !std::mem::replace(&mut seen[e], true));
                if distinct {
                    let a = AVector {
                        entries: entries.clone(),
                    };
                    checked += 1;
                    if table_from_avector(&a).is_latin() {
                        found += 1;
                        if collect {
                            tables.push(a);
                        }
                    }
                }
                // odometer over entries[1..]
                let mut i = n;
                loop {
                    if i == 1 {
                        return (checked, found, tables);
                    }
                    i -= 1;
                    entries[i] += 1;
                    if entries[i] < n {
                        break;
                    }
                    entries[i] = 0;
                }
            }
        })
        .collect();

    let mut report = AutomorphicReport {
        n,
        candidates_checked: 0,
        candidates_total: (n as u64).pow(n as u32),
        latin_count: 0,
        tables: collect.then(Vec::new),
    };
    for (checked, found, tables) in parts {
        report.candidates_checked += checked;
        report.latin_count += found;
        if let Some(all) = report.tables.as_mut() {
            all.extend(tables);
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SumReport {
    pub n: usize,
    pub a: Vec<usize>,
    /// `sum_y x * y mod n` for each row `x`.
    pub row_sums: Vec<usize>,
    /// `sum_x x * y mod n` for each column `y`.
    pub col_sums: Vec<usize>,
    pub row_sum: usize,
    pub col_sum: usize,
    /// In a Latin square every row and column sums to the same value, so
    /// `row_sum != col_sum` rules the table out.
    pub contradiction: bool,
}

/// Computes the row and column sums (mod `n`) of the automorphic table of
/// `a`, for even `n` and distinct entries. Rows all sum to `n/2` and
/// columns to `0`.
pub fn sum_contradiction_report(a: &AVector) -> Result<SumReport> {
    let n = a.order();
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("order {n} is odd")));
    }
    if !a.has_distinct_entries() {
        return Err(Error::InvalidArgument(
            "a-vector entries must be distinct".into(),
        ));
    }
    let t = table_from_avector(a);
    let row_sums: Vec<usize> = (0..n)
        .map(|x| (0..n).map(|y| t.get(x, y)).sum::<usize>() % n)
        .collect();
    let col_sums: Vec<usize> = (0..n)
        .map(|y| (0..n).map(|x| t.get(x, y)).sum::<usize>() % n)
        .collect();
    let uniform = |v: &[usize]| v.iter().all(|&s| s == v[0]);
    if !uniform(&row_sums) || !uniform(&col_sums) {
        // cannot happen for distinct entries; surfaced rather than hidden
        return Err(Error::InvalidArgument(
            "row or column sums are not uniform".into(),
        ));
    }
    let (row_sum, col_sum) = (row_sums[0], col_sums[0]);
    Ok(SumReport {
        n,
        a: a.entries.clone(),
        row_sums,
        col_sums,
        row_sum,
        col_sum,
        contradiction: row_sum != col_sum,
    })
}

/// Partial Latin square filled cell by cell with bitmask bookkeeping.
struct Grid {
    n: usize,
    cells: Vec<u8>,
    row_used: Vec<u64>,
    col_used: Vec<u64>,
    nodes: u64,
}

impl Grid {
    fn new(n: usize) -> Self {
        Self {
            n,
            cells: vec![0; n * n],
            row_used: vec![0; n],
            col_used: vec![0; n],
            nodes: 0,
        }
    }

    fn place(&mut self, r: usize, c: usize, v: usize) {
        self.cells[r * self.n + c] = v as u8;
        self.row_used[r] |= 1 << v;
        self.col_used[c] |= 1 << v;
    }

    fn clear(&mut self, r: usize, c: usize, v: usize) {
        self.row_used[r] &= !(1 << v);
        self.col_used[c] &= !(1 << v);
    }

    fn free(&self, r: usize, c: usize) -> u64 {
        let all = if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        };
        all & !(self.row_used[r] | self.col_used[c])
    }

    /// Counts completions of the cells `order[pos..]`.
    fn count(&mut self, order: &[(usize, usize)], pos: usize) -> u64 {
        self.nodes += 1;
        let Some(&(r, c)) = order.get(pos) else {
            return 1;
        };
        let mut free = self.free(r, c);
        let mut total = 0;
        while free != 0 {
            let v = free.trailing_zeros() as usize;
            free &= free - 1;
            self.place(r, c, v);
            total += self.count(order, pos + 1);
            self.clear(r, c, v);
        }
        total
    }

    /// Finds the first completion, trying symbols smallest first.
    fn first(&mut self, order: &[(usize, usize)], pos: usize) -> bool {
        self.nodes += 1;
        let Some(&(r, c)) = order.get(pos) else {
            return true;
        };
        let mut free = self.free(r, c);
        while free != 0 {
            let v = free.trailing_zeros() as usize;
            free &= free - 1;
            self.place(r, c, v);
            if self.first(order, pos + 1) {
                return true;
            }
            self.clear(r, c, v);
        }
        false
    }
}

/// Exact number of `n x n` Latin squares, by backtracking.
pub fn count_latin_squares(n: usize) -> Result<u64> {
    if n == 0 || n > MAX_COUNT_ORDER {
        return Err(Error::ResourceLimit(format!(
            "Latin square counting supports 1..={MAX_COUNT_ORDER}, got {n}"
        )));
    }
    let mut grid = Grid::new(n);
    let order: Vec<_> = (0..n).flat_map(|r| (0..n).map(move |c| (r, c))).collect();
    Ok(grid.count(&order, 0))
}

/// Record of an exhausted search tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonexistenceCertificate {
    pub n: usize,
    /// Nodes visited before every branch was closed.
    pub nodes_explored: u64,
    pub cell_order: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum IdempotentSearch {
    Found {
        square: LatinSquare,
        nodes_explored: u64,
    },
    Nonexistent(NonexistenceCertificate),
}

/// Lexicographic backtracking for a Latin square with `x * x = x`. The
/// diagonal is pre-filled and off-diagonal cells are tried in row-major
/// order, smallest symbol first.
pub(crate) fn complete_fixed_diagonal(n: usize) -> IdempotentSearch {
    let mut grid = Grid::new(n);
    for x in 0..n {
        grid.place(x, x, x);
    }
    let order: Vec<_> = (0..n)
        .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
        .collect();
    if grid.first(&order, 0) {
        let square = LatinSquare::from_cells(n, grid.cells)
            .expect("backtracking only places symbols free in their row and column");
        IdempotentSearch::Found {
            square,
            nodes_explored: grid.nodes,
        }
    } else {
        IdempotentSearch::Nonexistent(NonexistenceCertificate {
            n,
            nodes_explored: grid.nodes,
            cell_order: order,
        })
    }
}

pub fn search_idempotent(n: usize) -> Result<IdempotentSearch> {
    if n == 0 || n > MAX_IDEMPOTENT_SEARCH_ORDER {
        return Err(Error::ResourceLimit(format!(
            "idempotent search supports 1..={MAX_IDEMPOTENT_SEARCH_ORDER}, got {n}"
        )));
    }
    Ok(complete_fixed_diagonal(n))
}
