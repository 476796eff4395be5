//! Augmented Mayer–Vietoris spectral sequences of covers by subcomplexes.
//!
//! For a cover `{U_i}` of `X` with nerve `K`, the double complex has columns
//! `C_{p,q} = ⊕_{σ ∈ K^{(p)}} C_q(U_σ)` for `p >= 0` and the augmentation
//! column `C_{-1,q} = C_q(X)`. The horizontal map is `d = Σ (-1)^j d_j`
//! (inclusions `U_σ -> U_{d_j σ}`), the total differential is
//! `D = d + (-1)^p ∂`, and the filtration is by `p`.
//!
//! Page ranks come from ranks of filtered blocks of `D`:
//!
//! ```text
//! dim E^r_{p,q} = dim C_{p,q} - R(n; p-r, p) + R(n; p-r, p-1)
//!               + R(n+1; p, p+r-1) - R(n+1; p-1, p+r-1)
//! ```
//!
//! where `n = p + q` and `R(n; a, b)` is the rank of `D_n` restricted to
//! columns of filtration `<= b` and rows of filtration `> a`. Ranks are taken
//! over two large primes and compared.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chain::SparseMatrix;
use crate::config::{build_rightmost_subcomplex, build_two_tier_subcomplex, OrderedConfigComplex, Subcomplex};
use crate::error::{Error, Result};
use crate::homology::{to_field_column, ColumnReducer};
use crate::scalar::{Field, Zp, CHECK_PRIMES};
use crate::words::WordPolynomial;

type P1 = Zp<{ CHECK_PRIMES[0] }>;
type P2 = Zp<{ CHECK_PRIMES[1] }>;

/// A cover of `ambient` by subcomplexes of the same subdivided complex.
#[derive(Clone, Debug)]
pub struct Cover {
    ambient: Subcomplex,
    pieces: Vec<Subcomplex>,
    labels: Vec<u32>,
}

impl Cover {
    /// Checks that every piece lies in the ambient and that the pieces cover
    /// every simplex of it.
    pub fn new(ambient: Subcomplex, pieces: Vec<Subcomplex>, labels: Vec<u32>) -> Result<Self> {
        if labels.len() != pieces.len() {
            return Err(Error::invalid("one label per piece required"));
        }
        for (l, p) in labels.iter().zip(&pieces) {
            if !p.is_subset_of(&ambient) {
                return Err(Error::invalid(format!("piece {l} is not a subcomplex of the ambient")));
            }
        }
        let cx = ambient.complex().clone();
        for d in 0..cx.degrees() {
            for &s in ambient.simplices(d) {
                if !pieces.iter().any(|p| p.position(d, s as usize).is_some()) {
                    return Err(Error::invalid(format!(
                        "simplex {:?} is not covered",
                        cx.simplex(d, s as usize)
                    )));
                }
            }
        }
        Ok(Cover {
            ambient,
            pieces,
            labels,
        })
    }

    pub fn ambient(&self) -> &Subcomplex {
        &self.ambient
    }

    pub fn pieces(&self) -> &[Subcomplex] {
        &self.pieces
    }

    /// Label of each piece (the square that is right-most in it).
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }
}

/// Cover of the pinned right-most subcomplex by the pieces in which a free
/// square `j` is right-most among the unpinned squares.
pub fn rightmost_cover(c: &Arc<OrderedConfigComplex>, pinned: &[u32]) -> Result<Cover> {
    let ambient = build_rightmost_subcomplex(c, pinned)?;
    let free: Vec<u32> = (1..=c.n() as u32).filter(|l| !pinned.contains(l)).collect();
    let pieces = free
        .iter()
        .map(|&j| build_two_tier_subcomplex(c, &[j], pinned))
        .collect::<Result<Vec<_>>>()?;
    Cover::new(ambient, pieces, free)
}

/// One summand `C_*(U_σ)` of a column.
#[derive(Clone, Debug)]
pub struct Block {
    pub p: i64,
    /// Sorted piece indices; empty for the augmentation column.
    pub sigma: Vec<usize>,
    pub sub: Subcomplex,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DoubleComplexOptions {
    /// Negative control: flips the sign of the augmentation of one piece.
    pub flip_augmentation: Option<usize>,
}

/// The total complex of the augmented Mayer–Vietoris double complex.
#[derive(Clone, Debug)]
pub struct DoubleComplex {
    cover: Cover,
    blocks: Vec<Block>,
    block_of: HashMap<Vec<usize>, usize>,
    pmax: i64,
    // degree index t = n + 1
    offsets: Vec<Vec<usize>>,
    diff: Vec<SparseMatrix<i64>>,
}

pub fn build_double_complex(cov: &Cover) -> Result<DoubleComplex> {
    let dc = build_double_complex_with(cov, &DoubleComplexOptions::default())?;
    dc.check_d_squared()?;
    Ok(dc)
}

pub fn build_double_complex_with(cov: &Cover, opts: &DoubleComplexOptions) -> Result<DoubleComplex> {
    let k = cov.pieces.len();
    if k > 20 {
        return Err(Error::invalid("too many cover pieces"));
    }
    let mut blocks = vec![Block {
        p: -1,
        sigma: Vec::new(),
        sub: cov.ambient.clone(),
    }];
    let mut nerve: Vec<(Vec<usize>, Subcomplex)> = Vec::new();
    for mask in 1u32..(1 << k) {
        let sigma: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).collect();
        let mut m = cov.pieces[sigma[0]].mask().to_vec();
        for &i in &sigma[1..] {
            for (a, &b) in m.iter_mut().zip(cov.pieces[i].mask()) {
                *a = *a && b;
            }
        }
        let sub = Subcomplex::from_mask(cov.ambient.complex().clone(), m);
        if !sub.is_empty() {
            nerve.push((sigma, sub));
        }
    }
    nerve.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
    for (sigma, sub) in nerve {
        blocks.push(Block {
            p: sigma.len() as i64 - 1,
            sigma,
            sub,
        });
    }
    let block_of: HashMap<Vec<usize>, usize> =
        blocks.iter().enumerate().map(|(i, b)| (b.sigma.clone(), i)).collect();
    let pmax = blocks.iter().map(|b| b.p).max().unwrap_or(-1);
    let qmax = cov.ambient.complex().degrees() as i64 - 1;
    let tmax = (pmax + qmax + 1).max(0) as usize;
    let offsets: Vec<Vec<usize>> = (0..=tmax)
        .map(|t| {
            let n = t as i64 - 1;
            let mut off = vec![0usize];
            for b in &blocks {
                let q = n - b.p;
                let c = if q >= 0 { b.sub.count(q as usize) } else { 0 };
                off.push(off.last().unwrap() + c);
            }
            off
        })
        .collect();
    let cx = cov.ambient.complex();
    let mut diff = vec![SparseMatrix::zeros(0, offsets[0][blocks.len()])];
    for t in 1..=tmax {
        let n = t as i64 - 1;
        let mut columns = Vec::with_capacity(offsets[t][blocks.len()]);
        for (bi, b) in blocks.iter().enumerate() {
            let q = n - b.p;
            if q < 0 {
                continue;
            }
            let q = q as usize;
            let vsign: i64 = if b.p.rem_euclid(2) == 0 { 1 } else { -1 };
            for &s in b.sub.simplices(q) {
                let mut col: Vec<(u32, i64)> = Vec::new();
                if q >= 1 {
                    for i in 0..=q {
                        let f = cx.face(q, s as usize, i);
                        let pos = b.sub.position(q - 1, f).expect("subcomplexes are closed");
                        let sign = if i % 2 == 0 { vsign } else { -vsign };
                        col.push(((offsets[t - 1][bi] + pos) as u32, sign));
                    }
                }
                if b.p >= 0 {
                    for j in 0..b.sigma.len() {
                        let mut tau = b.sigma.clone();
                        tau.remove(j);
                        let tb = block_of[&tau];
                        let pos = blocks[tb]
                            .sub
                            .position(q, s as usize)
                            .expect("intersections lie in their faces");
                        let mut sign = if j % 2 == 0 { 1 } else { -1 };
                        if b.p == 0 && opts.flip_augmentation == Some(b.sigma[0]) {
                            sign = -sign;
                        }
                        col.push(((offsets[t - 1][tb] + pos) as u32, sign));
                    }
                }
                col.sort_unstable();
                columns.push(col);
            }
        }
        diff.push(SparseMatrix::from_columns(offsets[t - 1][blocks.len()], columns));
    }
    Ok(DoubleComplex {
        cover: cov.clone(),
        blocks,
        block_of,
        pmax,
        offsets,
        diff,
    })
}

impl DoubleComplex {
    pub fn cover(&self) -> &Cover {
        &self.cover
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Nerve simplices of dimension `p`, as sorted piece indices.
    pub fn nerve(&self, p: i64) -> Vec<&[usize]> {
        self.blocks
            .iter()
            .filter(|b| b.p == p && p >= 0)
            .map(|b| b.sigma.as_slice())
            .collect()
    }

    pub fn pmax(&self) -> i64 {
        self.pmax
    }

    /// Highest total degree.
    pub fn max_degree(&self) -> i64 {
        self.offsets.len() as i64 - 2
    }

    /// Dimension of the total complex in degree `n`.
    pub fn total_dim(&self, n: i64) -> usize {
        self.t_index(n).map_or(0, |t| self.offsets[t][self.blocks.len()])
    }

    fn t_index(&self, n: i64) -> Option<usize> {
        let t = n + 1;
        (t >= 0 && (t as usize) < self.offsets.len()).then_some(t as usize)
    }

    /// `D_n : T_n -> T_{n-1}`.
    pub fn differential(&self, n: i64) -> Option<&SparseMatrix<i64>> {
        self.t_index(n).map(|t| &self.diff[t])
    }

    pub fn dim_c(&self, p: i64, q: i64) -> usize {
        if q < 0 {
            return 0;
        }
        self.blocks
            .iter()
            .filter(|b| b.p == p)
            .map(|b| b.sub.count(q as usize))
            .sum()
    }

    /// Number of basis vectors of `T_n` with filtration `<= b`.
    fn prefix(&self, n: i64, b: i64) -> usize {
        let Some(t) = self.t_index(n) else { return 0 };
        let end = self.blocks.iter().take_while(|bl| bl.p <= b).count();
        self.offsets[t][end]
    }

    /// Global index in `T_{p+q}` of simplex `s` of block `bi`.
    pub fn index_in_total(&self, bi: usize, q: usize, s: usize) -> Option<usize> {
        let b = &self.blocks[bi];
        let t = self.t_index(b.p + q as i64)?;
        Some(self.offsets[t][bi] + b.sub.position(q, s)?)
    }

    pub fn block_index(&self, sigma: &[usize]) -> Option<usize> {
        self.block_of.get(sigma).copied()
    }

    pub fn check_d_squared(&self) -> Result<()> {
        match self.d_squared_defect()? {
            None => Ok(()),
            Some((p, q)) => Err(Error::Inconsistent(format!(
                "total differential squares to nonzero on C_{{{p},{q}}}"
            ))),
        }
    }

    /// Bidegree of the first basis vector on which `D∘D` is nonzero.
    pub fn d_squared_defect(&self) -> Result<Option<(i64, i64)>> {
        for t in 2..self.diff.len() {
            let dd = self.diff[t - 1].compose(&self.diff[t])?;
            if let Some((_, col, _)) = dd.triplets().min_by_key(|e| e.1) {
                let bi = self.offsets[t].partition_point(|&o| o <= col) - 1;
                let p = self.blocks[bi].p;
                return Ok(Some((p, t as i64 - 1 - p)));
            }
        }
        Ok(None)
    }

    fn rank_block<F: Field>(&self, n: i64, a: i64, b: i64) -> usize {
        let a = a.max(-2);
        let b = b.min(self.pmax);
        if b < -1 || a >= b || self.t_index(n).is_none() || n - 1 < -1 {
            return 0;
        }
        let cols = self.prefix(n, b);
        let cut = self.prefix(n - 1, a) as u32;
        let m = self.differential(n).expect("degree in range");
        let mut red = ColumnReducer::<F>::new();
        for col in columns_of::<F>(m, cols, cut) {
            red.push(col);
        }
        red.rank()
    }
}

/// Ranks of every page and of the differentials between them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralPages {
    pub pmax: i64,
    pub qmax: i64,
    /// `ranks[r-1][(p, q)]` for pages `r = 1..=max_page + 1` (zero entries
    /// omitted).
    pub ranks: Vec<BTreeMap<(i64, i64), usize>>,
    /// `(r, p, q)` to the rank of `d^r` leaving `(p, q)`.
    pub differentials: BTreeMap<(usize, i64, i64), usize>,
    /// Filtered ranks whose two prime computations disagreed.
    pub prime_discrepancies: usize,
    /// Where `D∘D != 0`, if anywhere; page ranks are then meaningless.
    pub defect: Option<(i64, i64)>,
}

impl SpectralPages {
    pub fn max_page(&self) -> usize {
        self.ranks.len().saturating_sub(1)
    }

    pub fn rank(&self, r: usize, p: i64, q: i64) -> usize {
        self.ranks
            .get(r.wrapping_sub(1))
            .and_then(|m| m.get(&(p, q)).copied())
            .unwrap_or(0)
    }

    pub fn differential_rank(&self, r: usize, p: i64, q: i64) -> usize {
        self.differentials.get(&(r, p, q)).copied().unwrap_or(0)
    }

    /// First page at which all differentials vanish for good.
    pub fn stable_page(&self) -> usize {
        (self.pmax + 2).max(1) as usize
    }
}

struct RankCache<'a> {
    dc: &'a DoubleComplex,
    memo: HashMap<(i64, i64, i64), usize>,
    discrepancies: usize,
}

impl RankCache<'_> {
    fn get(&mut self, n: i64, a: i64, b: i64) -> usize {
        let a = a.max(-2);
        let b = b.min(self.dc.pmax);
        if b < -1 || a >= b {
            return 0;
        }
        if let Some(&v) = self.memo.get(&(n, a, b)) {
            return v;
        }
        let r1 = self.dc.rank_block::<P1>(n, a, b);
        let r2 = self.dc.rank_block::<P2>(n, a, b);
        if r1 != r2 {
            self.discrepancies += 1;
        }
        let v = r1.max(r2);
        self.memo.insert((n, a, b), v);
        v
    }
}

/// Pages `E^1 .. E^{max_page}` (and one more, used for differential ranks).
pub fn compute_pages(dc: &DoubleComplex, max_page: usize) -> Result<SpectralPages> {
    let max_page = max_page.max(1);
    let qmax = dc.cover.ambient.complex().degrees() as i64 - 1;
    let mut cache = RankCache {
        dc,
        memo: HashMap::new(),
        discrepancies: 0,
    };
    let defect = dc.d_squared_defect()?;
    let mut ranks = Vec::new();
    for r in 1..=max_page as i64 + 1 {
        let mut page = BTreeMap::new();
        for p in -1..=dc.pmax {
            for q in 0..=qmax {
                let c = dc.dim_c(p, q);
                if c == 0 {
                    continue;
                }
                let n = p + q;
                let plus = c + cache.get(n, p - r, p - 1) + cache.get(n + 1, p, p + r - 1);
                let minus = cache.get(n, p - r, p) + cache.get(n + 1, p - 1, p + r - 1);
                let e = match plus.checked_sub(minus) {
                    Some(e) => e,
                    None if defect.is_some() => 0,
                    None => {
                        return Err(Error::Inconsistent(format!("negative page rank at r={r} ({p},{q})")))
                    }
                };
                if e > 0 {
                    page.insert((p, q), e);
                }
            }
        }
        ranks.push(page);
    }
    let mut sp = SpectralPages {
        pmax: dc.pmax,
        qmax,
        ranks,
        differentials: BTreeMap::new(),
        prime_discrepancies: cache.discrepancies,
        defect,
    };
    if defect.is_some() {
        return Ok(sp);
    }
    for r in 1..=max_page {
        for p in -1..=dc.pmax {
            for q in 0..=qmax {
                let tp = p - r as i64;
                let tq = q + r as i64 - 1;
                if tp < -1 {
                    continue;
                }
                // rank into the target = drop at the target minus what leaves it
                let drop = sp.rank(r, tp, tq).checked_sub(sp.rank(r + 1, tp, tq));
                let out_of_target = sp.differential_rank(r, tp, tq);
                let v = drop.and_then(|d| d.checked_sub(out_of_target)).ok_or_else(|| {
                    Error::Inconsistent(format!("inconsistent d^{r} ranks at ({p},{q})"))
                })?;
                if v > 0 {
                    sp.differentials.insert((r, p, q), v);
                }
            }
        }
    }
    Ok(sp)
}

/// Outcome of the collapse check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseReport {
    pub passed: bool,
    pub page: usize,
    /// First nonzero stabilized entry, if any.
    pub offending: Option<(i64, i64)>,
    pub message: String,
}

/// Verifies that every entry of the stabilized page vanishes.
pub fn check_collapse(sp: &SpectralPages) -> CollapseReport {
    let page = sp.stable_page();
    if let Some((p, q)) = sp.defect {
        return CollapseReport {
            passed: false,
            page,
            offending: Some((p, q)),
            message: format!("D∘D is nonzero on C_{{{p},{q}}}"),
        };
    }
    if sp.ranks.len() < page {
        return CollapseReport {
            passed: false,
            page: sp.ranks.len(),
            offending: None,
            message: format!("pages computed only to E^{}, need E^{page}", sp.ranks.len()),
        };
    }
    match sp.ranks[page - 1].iter().next() {
        None => CollapseReport {
            passed: true,
            page,
            offending: None,
            message: format!("E^{page} vanishes"),
        },
        Some((&(p, q), &rank)) => CollapseReport {
            passed: false,
            page,
            offending: Some((p, q)),
            message: format!("E^{page}_{{{p},{q}}} has rank {rank}"),
        },
    }
}

/// JSON report: sparse page ranks and the collapse verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub pages: Vec<PageReport>,
    pub collapse: CollapseReport,
    pub prime_discrepancies: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageReport {
    pub page: usize,
    /// `"p,q"` to rank, nonzero entries only.
    pub ranks: BTreeMap<String, usize>,
}

pub fn spectral_report(sp: &SpectralPages) -> SpectralReport {
    let pages = sp
        .ranks
        .iter()
        .enumerate()
        .take(sp.max_page())
        .map(|(i, m)| PageReport {
            page: i + 1,
            ranks: m.iter().map(|(&(p, q), &v)| (format!("{p},{q}"), v)).collect(),
        })
        .collect();
    SpectralReport {
        pages,
        collapse: check_collapse(sp),
        prime_discrepancies: sp.prime_discrepancies,
    }
}

// ---- explicit subspace route ----

fn kernel_of<F: Field>(cols: &[Vec<(u32, F)>]) -> Vec<Vec<(u32, F)>> {
    // pivot row -> (reduced column, combination of input columns)
    let mut pivots: BTreeMap<u32, (Vec<(u32, F)>, Vec<(u32, F)>)> = BTreeMap::new();
    let mut kernel = Vec::new();
    for (j, col) in cols.iter().enumerate() {
        let mut v = col.clone();
        let mut comb = vec![(j as u32, F::one())];
        while let Some((low, val)) = v.last().cloned() {
            let Some((pv, pc)) = pivots.get(&low) else { break };
            v = sub_scaled(&v, &val, pv);
            comb = sub_scaled(&comb, &val, pc);
        }
        match v.last().cloned() {
            None => kernel.push(comb),
            Some((low, val)) => {
                let inv = val.inv();
                let scale = |x: Vec<(u32, F)>| x.into_iter().map(|(r, a)| (r, a * inv.clone())).collect();
                pivots.insert(low, (scale(v), scale(comb)));
            }
        }
    }
    kernel
}

fn sub_scaled<F: Field>(a: &[(u32, F)], s: &F, b: &[(u32, F)]) -> Vec<(u32, F)> {
    let mut acc: BTreeMap<u32, F> = a.iter().cloned().collect();
    for (r, x) in b {
        let e = acc.entry(*r).or_insert_with(F::zero);
        *e = e.clone() - s.clone() * x.clone();
    }
    acc.into_iter().filter(|(_, x)| !x.is_zero()).collect()
}

fn apply<F: Field>(m: &SparseMatrix<i64>, x: &[(u32, F)]) -> Vec<(u32, F)> {
    let mut acc: BTreeMap<u32, F> = BTreeMap::new();
    for (c, a) in x {
        for &(r, v) in m.column(*c as usize) {
            let e = acc.entry(r).or_insert_with(F::zero);
            *e = e.clone() + a.clone() * F::from_i64(v);
        }
    }
    acc.into_iter().filter(|(_, x)| !x.is_zero()).collect()
}

fn span_dim<F: Field>(vs: impl IntoIterator<Item = Vec<(u32, F)>>) -> usize {
    let mut red = ColumnReducer::<F>::new();
    for v in vs {
        red.push(v);
    }
    red.rank()
}

impl DoubleComplex {
    // {x in F_b T_n : D x has no component of filtration > a}
    fn filtered_kernel<F: Field>(&self, n: i64, a: i64, b: i64) -> Vec<Vec<(u32, F)>> {
        let b = b.min(self.pmax);
        if b < -1 || self.t_index(n).is_none() {
            return Vec::new();
        }
        let cols = self.prefix(n, b);
        if n - 1 < -1 {
            return (0..cols as u32).map(|c| vec![(c, F::one())]).collect();
        }
        let cut = self.prefix(n - 1, a.max(-2)) as u32;
        let m = self.differential(n).expect("degree in range");
        let restricted: Vec<Vec<(u32, F)>> = m.columns()[..cols]
            .iter()
            .map(|c| {
                let v: Vec<(u32, i64)> = c.iter().filter(|e| e.0 >= cut).copied().collect();
                to_field_column(&v)
            })
            .collect();
        kernel_of(&restricted)
    }
}

/// Page ranks by explicit cycle and boundary subspaces (`Z^r`, `B^r`) over
/// the field `F`. Intended for small covers; used to cross-check
/// [`compute_pages`].
pub fn compute_pages_explicit<F: Field>(dc: &DoubleComplex, max_page: usize) -> Vec<BTreeMap<(i64, i64), usize>> {
    let qmax = dc.cover.ambient.complex().degrees() as i64 - 1;
    let mut out = Vec::new();
    for r in 1..=max_page.max(1) as i64 {
        let mut page = BTreeMap::new();
        for p in -1..=dc.pmax {
            for q in 0..=qmax {
                if dc.dim_c(p, q) == 0 {
                    continue;
                }
                let n = p + q;
                let z = dc.filtered_kernel::<F>(n, p - r, p);
                let z_lower = if p > -1 { dc.filtered_kernel::<F>(n, p - r, p - 1) } else { Vec::new() };
                let b: Vec<Vec<(u32, F)>> = match dc.differential(n + 1) {
                    Some(m) => dc
                        .filtered_kernel::<F>(n + 1, p, p + r - 1)
                        .iter()
                        .map(|k| apply(m, k))
                        .collect(),
                    None => Vec::new(),
                };
                let e = span_dim(z) - span_dim(z_lower.into_iter().chain(b));
                if e > 0 {
                    page.insert((p, q), e);
                }
            }
        }
        out.push(page);
    }
    out
}

// ---- explicit classes ----

fn permutation_sign(word: &[u32]) -> i64 {
    let mut sign = 1;
    for i in 0..word.len() {
        for j in i + 1..word.len() {
            if word[i] > word[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// A vertex of `U_σ` in which the labels of `word` are stacked top to bottom
/// in that order.
fn stacked_vertex(dc: &DoubleComplex, bi: usize, word: &[u32]) -> Option<usize> {
    let b = &dc.blocks[bi];
    let cx = b.sub.complex();
    b.sub.simplices(0).iter().map(|&v| v as usize).find(|&v| {
        word.windows(2).all(|w| cx.y(v, w[0]) > cx.y(v, w[1]))
    })
}

/// The chain in `C_{p,0}` representing a word polynomial on `p + 1` piece
/// labels: each word picks the component of `U_σ` with the squares stacked in
/// that order, weighted by the sign of the word as a permutation of the
/// sorted letters.
pub fn lift_word_polynomial<F: Field>(dc: &DoubleComplex, poly: &WordPolynomial) -> Result<(i64, Vec<(u32, F)>)> {
    let letters: Vec<u32> = poly.letters().into_iter().collect();
    let labels = dc.cover.labels();
    let sigma: Vec<usize> = letters
        .iter()
        .map(|l| {
            labels
                .iter()
                .position(|x| x == l)
                .ok_or_else(|| Error::invalid(format!("label {l} is not a cover piece")))
        })
        .collect::<Result<_>>()?;
    let bi = dc
        .block_index(&sigma)
        .ok_or_else(|| Error::invalid("letters do not span a nerve simplex"))?;
    let p = dc.blocks[bi].p;
    let mut acc: BTreeMap<u32, F> = BTreeMap::new();
    for (w, c) in poly.terms() {
        if w.len() != letters.len() {
            return Err(Error::invalid("polynomial is not multilinear in its letters"));
        }
        let v = stacked_vertex(dc, bi, w.letters())
            .ok_or_else(|| Error::invalid(format!("no configuration stacks the squares as {w}")))?;
        let idx = dc.index_in_total(bi, 0, v).expect("vertex in block") as u32;
        let e = acc.entry(idx).or_insert_with(F::zero);
        *e = e.clone() + F::from_i64(c * permutation_sign(w.letters()));
    }
    Ok((p, acc.into_iter().filter(|(_, x)| !x.is_zero()).collect()))
}

/// Survival of a class through the pages.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurvivalReport {
    pub p: i64,
    /// `survives[r-1]`: the class lifts to `E^r` (all `d^s`, `s < r`, vanish).
    pub survives: Vec<bool>,
    /// First page whose differential is nonzero on the class.
    pub hit_page: Option<usize>,
}

fn columns_of<F: Field>(m: &SparseMatrix<i64>, cols: usize, cut: u32) -> impl Iterator<Item = Vec<(u32, F)>> + '_ {
    m.columns()[..cols].iter().map(move |c| {
        let v: Vec<(u32, i64)> = c.iter().filter(|e| e.0 >= cut).map(|&(r, x)| (r - cut, x)).collect();
        to_field_column(&v)
    })
}

/// Tracks the class of `x0 ∈ C_{p,0}` (a vertical cycle) through the pages.
pub fn track_class<F: Field>(dc: &DoubleComplex, p: i64, x0: &[(u32, F)]) -> SurvivalReport {
    let m = dc.differential(p).expect("degree in range");
    let dx: Vec<(u32, F)> = apply(m, x0);
    let mut survives = Vec::new();
    let mut hit_page = None;
    for r in 1..=(p + 2) as usize {
        // lifts to E^r iff π_{>p-r}(D x0) ∈ π_{>p-r}(D F_{p-1})
        let cut = dc.prefix(p - 1, p - r as i64) as u32;
        let mut red = ColumnReducer::<F>::new();
        for c in columns_of::<F>(m, dc.prefix(p, p - 1), cut) {
            red.push(c);
        }
        let target: Vec<(u32, F)> = dx.iter().filter(|e| e.0 >= cut).map(|(r, x)| (r - cut, x.clone())).collect();
        let ok = red.contains(target);
        survives.push(ok);
        if !ok {
            break;
        }
    }
    // the differential d^r is nonzero exactly when the class reaches E^r but
    // not E^{r+1} and D x0 is not a boundary of lower filtration
    if let Some(last) = survives.iter().rposition(|&s| s) {
        if survives.len() > last + 1 {
            hit_page = Some(last + 1);
        } else {
            let mut red = ColumnReducer::<F>::new();
            for c in columns_of::<F>(m, dc.prefix(p, p - 1), 0) {
                red.push(c);
            }
            if !red.contains(dx.clone()) && survives.len() == (p + 2) as usize {
                hit_page = Some((p + 1) as usize);
            }
        }
    }
    SurvivalReport { p, survives, hit_page }
}

/// Tests whether `D x0 ≡ ε · target` modulo `D(F_{p-1})` for `ε = ±1`;
/// returns the sign when it does.
pub fn differential_matches<F: Field>(dc: &DoubleComplex, p: i64, x0: &[(u32, F)], target: &[(u32, F)]) -> Option<i64> {
    let m = dc.differential(p)?;
    let dx = apply(m, x0);
    let mut red = ColumnReducer::<F>::new();
    for c in columns_of::<F>(m, dc.prefix(p, p - 1), 0) {
        red.push(c);
    }
    for eps in [1i64, -1] {
        let e = F::from_i64(eps);
        let diff = sub_scaled(&dx, &e, target);
        if red.contains(diff) {
            return Some(eps);
        }
    }
    None
}

/// 1-chain of the augmentation column following a closed walk of vertices
/// (lattice coordinates), each step an edge of the subdivision.
pub fn loop_chain<F: Field>(dc: &DoubleComplex, walk: &[Vec<u32>]) -> Result<Vec<(u32, F)>> {
    let cx = dc.cover.ambient.complex();
    let base = cx.base();
    let verts: Vec<u32> = walk
        .iter()
        .map(|c| {
            base.vertex_index(c)
                .map(|v| v as u32)
                .ok_or_else(|| Error::invalid(format!("{c:?} is not a configuration")))
        })
        .collect::<Result<_>>()?;
    let mut acc: BTreeMap<u32, F> = BTreeMap::new();
    for i in 0..verts.len() {
        let (a, b) = (verts[i], verts[(i + 1) % verts.len()]);
        let (key, sign) = if a < b { ([a, b], 1) } else { ([b, a], -1) };
        let s = cx
            .index_of(&key)
            .ok_or_else(|| Error::invalid(format!("no edge between {a} and {b}")))?;
        let idx = dc
            .index_in_total(0, 1, s)
            .ok_or_else(|| Error::invalid("edge outside the ambient"))? as u32;
        let e = acc.entry(idx).or_insert_with(F::zero);
        *e = e.clone() + F::from_i64(sign);
    }
    Ok(acc.into_iter().filter(|(_, x)| !x.is_zero()).collect())
}
