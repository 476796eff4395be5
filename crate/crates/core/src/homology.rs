//! Exact homology of finite chain complexes.
//!
//! Ranks over a field use sparse column reduction (each column is reduced
//! against stored pivots keyed by their lowest row). Integral homology uses a
//! sparse Smith normal form with a fill-minimizing pivot rule that prefers
//! unit entries.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::chain::{ChainComplex, SparseMatrix};
use crate::error::{Error, Result};
use crate::scalar::{Field, IntegerRing, CHECK_PRIMES};
use crate::with_prime_field;

/// Coefficient choice for homology.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coefficients {
    Integers,
    Rationals,
    Prime(u32),
}

impl std::str::FromStr for Coefficients {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "z" | "Z" | "integers" => Ok(Coefficients::Integers),
            "q" | "Q" | "rationals" => Ok(Coefficients::Rationals),
            other => {
                let p = other.trim_start_matches("p=").trim_start_matches("F");
                p.parse::<u32>()
                    .map(Coefficients::Prime)
                    .map_err(|_| Error::invalid(format!("unknown coefficients '{other}'")))
            }
        }
    }
}

/// Homology in one degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologySummary {
    pub degree: usize,
    pub betti: usize,
    /// Invariant factors greater than one, each dividing the next.
    #[serde(with = "decimal_vec")]
    pub torsion: Vec<BigInt>,
}

mod decimal_vec {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.parse().map_err(D::Error::custom))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyReport {
    pub coefficients: Coefficients,
    pub summaries: Vec<HomologySummary>,
    /// Set when torsion was requested but skipped because of matrix size.
    pub betti_only: bool,
    /// Degrees of boundary maps whose ranks differed between the two check
    /// primes. The larger rank is used.
    pub prime_discrepancies: Vec<usize>,
}

impl HomologyReport {
    pub fn betti(&self) -> Vec<usize> {
        self.summaries.iter().map(|s| s.betti).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyOptions {
    /// Smith normal form is attempted only when `rows + cols` of a boundary
    /// matrix is at most this.
    pub torsion_threshold: usize,
    /// Rational ranks use exact rationals up to this many nonzeros and the
    /// two check primes above it.
    pub exact_rational_nnz: usize,
    /// Highest degree reported; `None` for all degrees.
    pub max_degree: Option<usize>,
}

impl Default for HomologyOptions {
    fn default() -> Self {
        HomologyOptions {
            torsion_threshold: 20_000,
            exact_rational_nnz: 5_000,
            max_degree: None,
        }
    }
}

fn axpy<F: Field>(acc: &[(u32, F)], scale: &F, piv: &[(u32, F)]) -> Vec<(u32, F)> {
    // acc - scale * piv, both sorted by row
    let mut out = Vec::with_capacity(acc.len() + piv.len());
    let (mut i, mut j) = (0, 0);
    while i < acc.len() || j < piv.len() {
        if j == piv.len() || (i < acc.len() && acc[i].0 < piv[j].0) {
            out.push(acc[i].clone());
            i += 1;
        } else if i == acc.len() || piv[j].0 < acc[i].0 {
            out.push((piv[j].0, -(scale.clone() * piv[j].1.clone())));
            j += 1;
        } else {
            let v = acc[i].1.clone() - scale.clone() * piv[j].1.clone();
            if !v.is_zero() {
                out.push((acc[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Incremental column reduction over a field. Columns are added one at a
/// time; the rank is the number of columns that did not reduce to zero.
pub struct ColumnReducer<F: Field> {
    // pivot column keyed by its lowest row, normalized to a leading one
    pivots: BTreeMap<u32, Vec<(u32, F)>>,
    rank: usize,
}

impl<F: Field> Default for ColumnReducer<F> {
    fn default() -> Self {
        ColumnReducer {
            pivots: BTreeMap::new(),
            rank: 0,
        }
    }
}

impl<F: Field> ColumnReducer<F> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Reduces `col` against the stored pivots and returns the remainder.
    pub fn reduce(&self, mut col: Vec<(u32, F)>) -> Vec<(u32, F)> {
        while let Some((low, val)) = col.last().cloned() {
            match self.pivots.get(&low) {
                Some(p) => col = axpy(&col, &val, p),
                None => break,
            }
        }
        col
    }

    /// Adds a column; returns true when it increased the rank.
    pub fn push(&mut self, col: Vec<(u32, F)>) -> bool {
        let mut col = self.reduce(col);
        match col.last().cloned() {
            None => false,
            Some((low, val)) => {
                let inv = val.inv();
                for e in col.iter_mut() {
                    e.1 = e.1.clone() * inv.clone();
                }
                self.pivots.insert(low, col);
                self.rank += 1;
                true
            }
        }
    }

    /// True when `col` lies in the span of the pushed columns.
    pub fn contains(&self, col: Vec<(u32, F)>) -> bool {
        self.reduce(col).is_empty()
    }
}

/// Reduces an integer column into `F`, dropping entries that vanish.
pub fn to_field_column<F: Field>(col: &[(u32, i64)]) -> Vec<(u32, F)> {
    col.iter()
        .map(|&(r, v)| (r, F::from_i64(v)))
        .filter(|(_, v)| !v.is_zero())
        .collect()
}

/// Rank over `F` of an integer matrix.
pub fn rank_over<F: Field>(m: &SparseMatrix<i64>) -> usize {
    rank_of_columns::<F>(m.columns().iter().map(|c| c.as_slice()))
}

/// Rank over `F` of a set of integer columns.
pub fn rank_of_columns<'a, F: Field>(cols: impl IntoIterator<Item = &'a [(u32, i64)]>) -> usize {
    let mut red = ColumnReducer::<F>::new();
    for col in cols {
        red.push(to_field_column(col));
    }
    red.rank()
}

/// Rank over the prime field `F_p`.
pub fn rank_mod_p(m: &SparseMatrix<i64>, p: u32) -> Result<usize> {
    with_prime_field!(p, F => rank_over::<F>(m))
        .ok_or_else(|| Error::invalid(format!("prime {p} is not supported")))
}

/// Rank over the rationals together with a flag reporting whether the two
/// check primes disagreed (only possible on the modular route).
pub fn rational_rank(m: &SparseMatrix<i64>, exact_nnz: usize) -> (usize, bool) {
    if m.nnz() <= exact_nnz {
        return (rank_over::<BigRational>(m), false);
    }
    let a = rank_mod_p(m, CHECK_PRIMES[0]).expect("check prime supported");
    let b = rank_mod_p(m, CHECK_PRIMES[1]).expect("check prime supported");
    (a.max(b), a != b)
}

/// Smith normal form invariants of an integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm<T> {
    /// Positive invariant factors `d_1 | d_2 | ... | d_r`.
    pub invariant_factors: Vec<T>,
    pub rank: usize,
}

struct SnfWork<T> {
    rows: Vec<BTreeMap<u32, T>>,
    cols: Vec<BTreeSet<u32>>,
    row_alive: Vec<bool>,
}

impl<T: IntegerRing> SnfWork<T> {
    fn pick_pivot(&self) -> Option<(u32, u32)> {
        let mut best: Option<((bool, usize, T), (u32, u32))> = None;
        for (r, row) in self.rows.iter().enumerate() {
            if !self.row_alive[r] || row.is_empty() {
                continue;
            }
            for (&c, v) in row {
                let unit = v.abs().is_one();
                let cost = (row.len() - 1) * (self.cols[c as usize].len() - 1);
                let key = (!unit, cost, v.abs());
                if best.as_ref().is_none_or(|(k, _)| key < *k) {
                    let perfect = unit && cost == 0;
                    best = Some((key, (r as u32, c)));
                    if perfect {
                        return best.map(|(_, p)| p);
                    }
                }
            }
        }
        best.map(|(_, p)| p)
    }

    fn set(&mut self, r: u32, c: u32, v: T) {
        if v.is_zero() {
            self.rows[r as usize].remove(&c);
            self.cols[c as usize].remove(&r);
        } else {
            self.rows[r as usize].insert(c, v);
            self.cols[c as usize].insert(r);
        }
    }

    /// row[target] -= q * row[src]
    fn row_op(&mut self, target: u32, src: u32, q: &T) {
        let src_row: Vec<(u32, T)> = self.rows[src as usize]
            .iter()
            .map(|(c, v)| (*c, v.clone()))
            .collect();
        for (c, v) in src_row {
            let cur = self.rows[target as usize].get(&c).cloned().unwrap_or_else(T::zero);
            self.set(target, c, cur - q.clone() * v);
        }
    }

    /// col[target] -= q * col[src]
    fn col_op(&mut self, target: u32, src: u32, q: &T) {
        let src_rows: Vec<u32> = self.cols[src as usize].iter().copied().collect();
        for r in src_rows {
            let v = self.rows[r as usize][&src].clone();
            let cur = self.rows[r as usize].get(&target).cloned().unwrap_or_else(T::zero);
            self.set(r, target, cur - q.clone() * v);
        }
    }

    /// Clears the row and column of the pivot, returning the diagonal entry.
    fn eliminate(&mut self, mut pr: u32, mut pc: u32) -> T {
        loop {
            let p = self.rows[pr as usize][&pc].clone();
            let mut smaller: Option<(u32, u32)> = None;
            let others: Vec<u32> = self.cols[pc as usize].iter().copied().filter(|&r| r != pr).collect();
            for r in others {
                let v = self.rows[r as usize][&pc].clone();
                let q = v.div_floor(&p);
                self.row_op(r, pr, &q);
                if let Some(rem) = self.rows[r as usize].get(&pc) {
                    if smaller.is_none() {
                        smaller = Some((r, pc));
                    }
                    let _ = rem;
                }
            }
            if let Some(s) = smaller {
                (pr, pc) = s;
                continue;
            }
            let others: Vec<u32> = self.rows[pr as usize].keys().copied().filter(|&c| c != pc).collect();
            for c in others {
                let v = self.rows[pr as usize][&c].clone();
                let q = v.div_floor(&p);
                self.col_op(c, pc, &q);
                if self.rows[pr as usize].contains_key(&c) && smaller.is_none() {
                    smaller = Some((pr, c));
                }
            }
            match smaller {
                Some(s) => (pr, pc) = s,
                None => {
                    self.set(pr, pc, T::zero());
                    self.row_alive[pr as usize] = false;
                    return p.abs();
                }
            }
        }
    }
}

/// Smith normal form of a sparse integer matrix.
pub fn smith_normal_form<T: IntegerRing>(m: &SparseMatrix<T>) -> SmithForm<T> {
    let mut work = SnfWork {
        rows: vec![BTreeMap::new(); m.rows()],
        cols: vec![BTreeSet::new(); m.cols()],
        row_alive: vec![true; m.rows()],
    };
    for (r, c, v) in m.triplets() {
        work.set(r as u32, c as u32, v.clone());
    }
    let mut diag: Vec<T> = Vec::new();
    while let Some((r, c)) = work.pick_pivot() {
        diag.push(work.eliminate(r, c));
    }
    let rank = diag.len();
    SmithForm {
        invariant_factors: diagonal_to_invariant_factors(diag),
        rank,
    }
}

fn diagonal_to_invariant_factors<T: IntegerRing>(diag: Vec<T>) -> Vec<T> {
    let (units, mut rest): (Vec<T>, Vec<T>) = diag.into_iter().partition(|d| d.is_one());
    for i in 0..rest.len() {
        for j in i + 1..rest.len() {
            let g = rest[i].gcd(&rest[j]);
            let l = rest[i].lcm(&rest[j]);
            rest[i] = g;
            rest[j] = l;
        }
    }
    let mut out = units;
    out.extend(rest);
    out
}

fn torsion_of(factors: &[BigInt]) -> Vec<BigInt> {
    factors.iter().filter(|d| !d.is_one()).cloned().collect()
}

/// Homology of a chain complex with the given coefficients.
pub fn betti_numbers(
    cc: &ChainComplex,
    coefficients: Coefficients,
    opts: &HomologyOptions,
) -> Result<HomologyReport> {
    cc.check_d_squared()?;
    let top = cc.len();
    let report_top = opts.max_degree.map_or(top, |d| (d + 1).min(top));
    // ranks[k] = rank of boundary C_k -> C_{k-1}; only degrees 1..=report_top needed
    let mut ranks = vec![0usize; top + 1];
    let mut torsion: Vec<Vec<BigInt>> = vec![Vec::new(); top + 1];
    let mut betti_only = false;
    let mut discrepancies = Vec::new();
    for k in 1..top.min(report_top + 1) {
        let m = cc.boundary(k).expect("degree in range");
        ranks[k] = match coefficients {
            Coefficients::Prime(p) => rank_mod_p(m, p)?,
            Coefficients::Rationals => {
                let (r, bad) = rational_rank(m, opts.exact_rational_nnz);
                if bad {
                    discrepancies.push(k);
                }
                r
            }
            Coefficients::Integers => {
                if m.rows() + m.cols() <= opts.torsion_threshold {
                    let snf = smith_normal_form(&m.to_bigint());
                    torsion[k - 1] = torsion_of(&snf.invariant_factors);
                    snf.rank
                } else {
                    betti_only = true;
                    let (r, bad) = rational_rank(m, opts.exact_rational_nnz);
                    if bad {
                        discrepancies.push(k);
                    }
                    r
                }
            }
        };
    }
    let summaries = (0..report_top)
        .map(|k| HomologySummary {
            degree: k,
            betti: cc.dim(k) - ranks[k] - ranks[k + 1],
            torsion: std::mem::take(&mut torsion[k]),
        })
        .collect();
    Ok(HomologyReport {
        coefficients,
        summaries,
        betti_only,
        prime_discrepancies: discrepancies,
    })
}

/// Rational Betti numbers of a chain complex.
pub fn rational_betti(cc: &ChainComplex) -> Result<Vec<usize>> {
    Ok(betti_numbers(cc, Coefficients::Rationals, &HomologyOptions::default())?.betti())
}
