//! Discrete configuration complexes `DF_n` and their order subdivision.
//!
//! A cell of `DF_n` is an ordered `n`-tuple of cells of the rectangle complex
//! whose closures are pairwise disjoint. Vertices of `DF_n` are lattice points
//! `(x_1, y_1, ..., x_n, y_n)`.
//!
//! The order subdivision triangulates every product cube by chains
//! `v_0 < v_1 < ... < v_d` of lattice vertices (componentwise order) with
//! `v_d - v_0` a 0/1 vector. Each coordinate moves at most once along such a
//! chain, so every simplex lies on one side of each hyperplane `x_a = x_b`
//! and `y_a = y_b`, and half-space regions are full subcomplexes.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chain::{ChainComplex, SparseMatrix};
use crate::error::{Error, Result};
use crate::grid::{closures_disjoint, CubicalComplex, Extent, GridCell};

/// Default cap on the number of cells (or simplices) built.
pub const DEFAULT_CELL_BUDGET: u64 = 50_000_000;

/// Version of the dump format and of cached results derived from complexes.
pub const FORMAT_VERSION: u32 = 1;

/// One cell of `DF_n`: square `i` occupies ambient cell `parts[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConfigCell {
    pub parts: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuildOptions {
    /// Highest cell dimension to build; `None` builds everything.
    pub max_dim: Option<usize>,
    pub budget: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            max_dim: None,
            budget: DEFAULT_CELL_BUDGET,
        }
    }
}

// Index of `key` in a flat array of sorted, fixed-stride records.
fn find_record(flat: &[u32], stride: usize, key: &[u32]) -> Option<usize> {
    if stride == 0 {
        return if key.is_empty() && !flat.is_empty() { Some(0) } else { None };
    }
    let count = flat.len() / stride;
    let (mut lo, mut hi) = (0usize, count);
    while lo < hi {
        let mid = (lo + hi) / 2;
        match flat[mid * stride..(mid + 1) * stride].cmp(key) {
            std::cmp::Ordering::Less => lo = mid + 1,
            std::cmp::Ordering::Greater => hi = mid,
            std::cmp::Ordering::Equal => return Some(mid),
        }
    }
    None
}

/// The cube complex `DF_n` of an ambient rectangle complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigComplex {
    ambient: CubicalComplex,
    n: usize,
    // cells[k]: flat, stride n, lexicographically sorted part tuples
    cells: Vec<Vec<u32>>,
    truncated: bool,
}

/// Builds `DF_n` of `ambient` with default options.
pub fn build_discrete_config(ambient: &CubicalComplex, n: usize) -> Result<ConfigComplex> {
    build_discrete_config_with(ambient, n, &BuildOptions::default())
}

/// Builds `DF_n` of `ambient`, optionally truncated to a skeleton.
pub fn build_discrete_config_with(
    ambient: &CubicalComplex,
    n: usize,
    opts: &BuildOptions,
) -> Result<ConfigComplex> {
    if n == 0 {
        return Err(Error::invalid("number of squares must be positive"));
    }
    let full_dim = 2 * n;
    let max_dim = opts.max_dim.map_or(full_dim, |d| d.min(full_dim));
    let mut cx = ConfigComplex {
        ambient: ambient.clone(),
        n,
        cells: vec![Vec::new(); max_dim + 1],
        truncated: max_dim < full_dim,
    };
    if n > ambient.vertex_count() {
        return Ok(cx);
    }
    let mut stack = Vec::with_capacity(n);
    let mut count = 0u64;
    cx.dfs(&mut stack, 0, max_dim, opts.budget, &mut count)?;
    while cx.cells.len() > 1 && cx.cells.last().is_some_and(Vec::is_empty) && !cx.truncated {
        cx.cells.pop();
    }
    Ok(cx)
}

impl ConfigComplex {
    fn dfs(
        &mut self,
        stack: &mut Vec<u32>,
        dim: usize,
        max_dim: usize,
        budget: u64,
        count: &mut u64,
    ) -> Result<()> {
        if stack.len() == self.n {
            *count += 1;
            if *count > budget {
                return Err(Error::BudgetExceeded { budget });
            }
            self.cells[dim].extend_from_slice(stack);
            return Ok(());
        }
        for c in 0..self.ambient.len() {
            let cell = *self.ambient.cell(c);
            if dim + cell.dim() > max_dim {
                continue;
            }
            if stack
                .iter()
                .all(|&o| closures_disjoint(&cell, self.ambient.cell(o as usize)))
            {
                stack.push(c as u32);
                self.dfs(stack, dim + cell.dim(), max_dim, budget, count)?;
                stack.pop();
            }
        }
        Ok(())
    }

    pub fn ambient(&self) -> &CubicalComplex {
        &self.ambient
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// True when cells above some dimension were not built.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    /// Number of stored degrees (top degree + 1).
    pub fn degrees(&self) -> usize {
        self.cells.len()
    }

    pub fn count(&self, k: usize) -> usize {
        self.cells.get(k).map_or(0, |c| c.len() / self.n)
    }

    pub fn total_cells(&self) -> usize {
        (0..self.degrees()).map(|k| self.count(k)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total_cells() == 0
    }

    pub fn parts(&self, k: usize, idx: usize) -> &[u32] {
        &self.cells[k][idx * self.n..(idx + 1) * self.n]
    }

    pub fn cell(&self, k: usize, idx: usize) -> ConfigCell {
        ConfigCell {
            parts: self.parts(k, idx).to_vec(),
        }
    }

    /// `(dimension, index)` of a cell given by its parts.
    pub fn index_of(&self, parts: &[u32]) -> Option<(usize, usize)> {
        if parts.len() != self.n || parts.iter().any(|&p| p as usize >= self.ambient.len()) {
            return None;
        }
        let k: usize = parts.iter().map(|&p| self.ambient.cell(p as usize).dim()).sum();
        let flat = self.cells.get(k)?;
        find_record(flat, self.n, parts).map(|i| (k, i))
    }

    /// Lattice coordinates `(x_1, y_1, ..., x_n, y_n)` of a vertex.
    pub fn vertex_coords(&self, idx: usize) -> Vec<u32> {
        self.parts(0, idx)
            .iter()
            .flat_map(|&p| {
                let c = self.ambient.cell(p as usize);
                [c.x_lo, c.y_lo]
            })
            .collect()
    }

    /// Vertex index of the configuration with the given lattice coordinates.
    pub fn vertex_index(&self, coords: &[u32]) -> Option<usize> {
        if coords.len() != 2 * self.n {
            return None;
        }
        let parts: Option<Vec<u32>> = coords
            .chunks(2)
            .map(|xy| {
                self.ambient
                    .index_of(&GridCell::vertex(xy[0], xy[1]))
                    .map(|i| i as u32)
            })
            .collect();
        find_record(self.cells.first()?, self.n, &parts?)
    }

    /// Signed codimension-1 faces, as indices into degree `k - 1`.
    pub fn faces(&self, k: usize, idx: usize) -> Vec<(usize, i64)> {
        let parts = self.parts(k, idx);
        let mut out = Vec::with_capacity(2 * k);
        let mut before = 0usize;
        let mut face = parts.to_vec();
        for i in 0..self.n {
            let p = parts[i] as usize;
            let koszul = if before.is_multiple_of(2) { 1 } else { -1 };
            for &(f, s) in self.ambient.faces(p) {
                face[i] = f as u32;
                let row = find_record(&self.cells[k - 1], self.n, &face)
                    .expect("faces of configuration cells are cells");
                out.push((row, koszul * s as i64));
            }
            face[i] = parts[i];
            before += self.ambient.cell(p).dim();
        }
        out
    }

    pub fn boundary_matrix(&self, k: usize) -> SparseMatrix<i64> {
        let columns = (0..self.count(k))
            .map(|c| {
                let mut col = self.faces(k, c);
                col.sort_unstable();
                col.into_iter().map(|(r, s)| (r as u32, s)).collect()
            })
            .collect();
        SparseMatrix::from_columns(self.count(k - 1), columns)
    }

    pub fn chain_complex(&self) -> ChainComplex {
        let dims: Vec<usize> = (0..self.degrees()).map(|k| self.count(k)).collect();
        let boundaries = (1..self.degrees()).map(|k| self.boundary_matrix(k)).collect();
        ChainComplex::new(dims, boundaries).expect("configuration boundary shapes are consistent")
    }

    /// Serializable snapshot with header, cell tables and boundary triples.
    pub fn dump(&self, w: u32, h: u32) -> ComplexDump {
        let boundaries = (1..self.degrees())
            .map(|k| {
                self.boundary_matrix(k)
                    .triplets()
                    .map(|(r, c, &v)| (r as u32, c as u32, v as i8))
                    .collect()
            })
            .collect();
        ComplexDump {
            header: DumpHeader {
                w,
                h,
                n: self.n as u32,
                subdivided: false,
                version: FORMAT_VERSION,
            },
            cells: self.cells.clone(),
            boundaries,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DumpHeader {
    pub w: u32,
    pub h: u32,
    pub n: u32,
    pub subdivided: bool,
    pub version: u32,
}

/// Cache/export format of a complex: per-degree cell tables (flat records)
/// and boundary triples `(row, col, sign)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexDump {
    pub header: DumpHeader,
    pub cells: Vec<Vec<u32>>,
    pub boundaries: Vec<Vec<(u32, u32, i8)>>,
}

impl ComplexDump {
    pub fn chain_complex(&self) -> Result<ChainComplex> {
        let stride = if self.header.subdivided { None } else { Some(self.header.n as usize) };
        let dims: Vec<usize> = self
            .cells
            .iter()
            .enumerate()
            .map(|(k, c)| c.len() / stride.unwrap_or(k + 1))
            .collect();
        if self.boundaries.len() + 1 != dims.len().max(1) {
            return Err(Error::Format("boundary count does not match degrees".into()));
        }
        let mut mats = Vec::new();
        for (k, trip) in self.boundaries.iter().enumerate() {
            let (rows, cols) = (dims[k], dims[k + 1]);
            if trip.iter().any(|&(r, c, _)| r as usize >= rows || c as usize >= cols) {
                return Err(Error::Format(format!("boundary {} entry out of range", k + 1)));
            }
            mats.push(SparseMatrix::from_triplets(
                rows,
                cols,
                trip.iter().map(|&(r, c, s)| (r as usize, c as usize, s as i64)),
            ));
        }
        ChainComplex::new(dims, mats)
    }
}

/// Axis of an order constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
}

/// `coord_axis(lo) <= coord_axis(hi)` for 1-based labels `lo`, `hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderConstraint {
    pub axis: Axis,
    pub lo: u32,
    pub hi: u32,
}

/// The order subdivision of `DF_n`.
#[derive(Clone, Debug)]
pub struct OrderedConfigComplex {
    base: ConfigComplex,
    // coords[v*2n ..]: lattice coordinates of vertex v
    coords: Vec<u32>,
    // simplices[d]: flat, stride d+1, sorted vertex tuples
    simplices: Vec<Vec<u32>>,
    // faces[d]: flat, stride d+1; entry i is the index of the face without vertex i
    faces: Vec<Vec<u32>>,
}

/// Triangulates `DF_n` by the order subdivision with the default budget.
pub fn subdivide_order(c: &ConfigComplex) -> Result<OrderedConfigComplex> {
    subdivide_order_with(c, DEFAULT_CELL_BUDGET)
}

pub fn subdivide_order_with(c: &ConfigComplex, budget: u64) -> Result<OrderedConfigComplex> {
    if c.is_truncated() {
        return Err(Error::invalid("cannot subdivide a truncated complex"));
    }
    let n = c.n();
    let nv = c.count(0);
    let mut coords = Vec::with_capacity(nv * 2 * n);
    for v in 0..nv {
        coords.extend(c.vertex_coords(v));
    }
    let mut simplices: Vec<Vec<u32>> = vec![Vec::new(); c.degrees().max(1)];
    let mut count = 0u64;
    for k in 0..c.degrees() {
        for idx in 0..c.count(k) {
            let parts = c.parts(k, idx);
            let mut lower = Vec::with_capacity(2 * n);
            let mut free = Vec::new();
            for (i, &p) in parts.iter().enumerate() {
                let cell = c.ambient().cell(p as usize);
                lower.push(cell.x_lo);
                lower.push(cell.y_lo);
                if cell.x_kind == Extent::Interval {
                    free.push(2 * i);
                }
                if cell.y_kind == Extent::Interval {
                    free.push(2 * i + 1);
                }
            }
            let v0 = c.vertex_index(&lower).expect("lower corner is a vertex") as u32;
            let mut chain = vec![v0];
            let all = (1u32 << free.len()) - 1;
            chains_of_cube(c, &free, all, &mut lower, &mut chain, &mut |ch| {
                count += 1;
                if count > budget {
                    return Err(Error::BudgetExceeded { budget });
                }
                simplices[ch.len() - 1].extend_from_slice(ch);
                Ok(())
            })?;
        }
    }
    for (d, flat) in simplices.iter_mut().enumerate() {
        let stride = d + 1;
        let mut recs: Vec<&[u32]> = flat.chunks(stride).collect();
        recs.sort_unstable();
        *flat = recs.concat();
    }
    let mut faces = vec![Vec::new()];
    for d in 1..simplices.len() {
        let stride = d + 1;
        let mut fl = Vec::with_capacity(simplices[d].len());
        let mut key = Vec::with_capacity(d);
        for s in simplices[d].chunks(stride) {
            for i in 0..stride {
                key.clear();
                key.extend(s.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v));
                let f = find_record(&simplices[d - 1], d, &key).ok_or_else(|| {
                    Error::Inconsistent("face of a subdivision simplex is missing".into())
                })?;
                fl.push(f as u32);
            }
        }
        faces.push(fl);
    }
    Ok(OrderedConfigComplex {
        base: c.clone(),
        coords,
        simplices,
        faces,
    })
}

// Enumerates chains from the current vertex to the top corner of the cube by
// choosing ordered set partitions of the remaining free coordinates.
fn chains_of_cube(
    c: &ConfigComplex,
    free: &[usize],
    remaining: u32,
    at: &mut Vec<u32>,
    chain: &mut Vec<u32>,
    emit: &mut dyn FnMut(&[u32]) -> Result<()>,
) -> Result<()> {
    if remaining == 0 {
        return emit(chain);
    }
    let mut block = remaining;
    while block != 0 {
        for (b, &coord) in free.iter().enumerate() {
            if block >> b & 1 == 1 {
                at[coord] += 1;
            }
        }
        let v = c.vertex_index(at).expect("cube corners are vertices") as u32;
        chain.push(v);
        chains_of_cube(c, free, remaining & !block, at, chain, emit)?;
        chain.pop();
        for (b, &coord) in free.iter().enumerate() {
            if block >> b & 1 == 1 {
                at[coord] -= 1;
            }
        }
        block = (block - 1) & remaining;
    }
    Ok(())
}

impl OrderedConfigComplex {
    pub fn base(&self) -> &ConfigComplex {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn degrees(&self) -> usize {
        self.simplices.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.count(0)
    }

    pub fn count(&self, d: usize) -> usize {
        self.simplices.get(d).map_or(0, |s| s.len() / (d + 1))
    }

    pub fn total_simplices(&self) -> usize {
        (0..self.degrees()).map(|d| self.count(d)).sum()
    }

    pub fn simplex(&self, d: usize, idx: usize) -> &[u32] {
        &self.simplices[d][idx * (d + 1)..(idx + 1) * (d + 1)]
    }

    /// Index of the face of simplex `(d, idx)` omitting vertex `i`.
    pub fn face(&self, d: usize, idx: usize, i: usize) -> usize {
        self.faces[d][idx * (d + 1) + i] as usize
    }

    pub fn index_of(&self, vertices: &[u32]) -> Option<usize> {
        let d = vertices.len().checked_sub(1)?;
        find_record(self.simplices.get(d)?, d + 1, vertices)
    }

    pub fn vertex_coords(&self, v: usize) -> &[u32] {
        let s = 2 * self.n();
        &self.coords[v * s..(v + 1) * s]
    }

    /// x coordinate of 1-based `label` at vertex `v`.
    pub fn x(&self, v: usize, label: u32) -> u32 {
        self.vertex_coords(v)[2 * (label as usize - 1)]
    }

    pub fn y(&self, v: usize, label: u32) -> u32 {
        self.vertex_coords(v)[2 * (label as usize - 1) + 1]
    }

    pub fn chain_complex(&self) -> ChainComplex {
        Subcomplex::full(Arc::new(self.clone())).chain_complex()
    }

    /// True when every vertex of the simplex satisfies the constraint.
    pub fn satisfies(&self, d: usize, idx: usize, con: OrderConstraint) -> bool {
        self.simplex(d, idx).iter().all(|&v| {
            let v = v as usize;
            match con.axis {
                Axis::X => self.x(v, con.lo) <= self.x(v, con.hi),
                Axis::Y => self.y(v, con.lo) <= self.y(v, con.hi),
            }
        })
    }

    /// All order constraints `a <= b` (a != b) holding on a simplex.
    pub fn region_tags(&self, d: usize, idx: usize) -> Vec<OrderConstraint> {
        let n = self.n() as u32;
        let mut out = Vec::new();
        for axis in [Axis::X, Axis::Y] {
            for lo in 1..=n {
                for hi in 1..=n {
                    let con = OrderConstraint { axis, lo, hi };
                    if lo != hi && self.satisfies(d, idx, con) {
                        out.push(con);
                    }
                }
            }
        }
        out
    }
}

fn check_labels(n: usize, labels: &[u32]) -> Result<()> {
    for (i, &l) in labels.iter().enumerate() {
        if l == 0 || l as usize > n {
            return Err(Error::invalid(format!("label {l} outside 1..={n}")));
        }
        if labels[..i].contains(&l) {
            return Err(Error::invalid(format!("label {l} repeated")));
        }
    }
    Ok(())
}

/// A full subcomplex of an order-subdivided complex, given by its vertices.
#[derive(Clone, Debug)]
pub struct Subcomplex {
    complex: Arc<OrderedConfigComplex>,
    mask: Vec<bool>,
    // selected simplex indices per dimension
    selected: Vec<Vec<u32>>,
}

impl Subcomplex {
    pub fn from_mask(complex: Arc<OrderedConfigComplex>, mask: Vec<bool>) -> Self {
        let selected = (0..complex.degrees())
            .map(|d| {
                (0..complex.count(d))
                    .filter(|&i| complex.simplex(d, i).iter().all(|&v| mask[v as usize]))
                    .map(|i| i as u32)
                    .collect()
            })
            .collect();
        Subcomplex {
            complex,
            mask,
            selected,
        }
    }

    pub fn full(complex: Arc<OrderedConfigComplex>) -> Self {
        let mask = vec![true; complex.vertex_count()];
        Subcomplex::from_mask(complex, mask)
    }

    pub fn complex(&self) -> &Arc<OrderedConfigComplex> {
        &self.complex
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.mask[v]
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Selected simplex indices of dimension `d`, ascending.
    pub fn simplices(&self, d: usize) -> &[u32] {
        self.selected.get(d).map_or(&[], Vec::as_slice)
    }

    pub fn count(&self, d: usize) -> usize {
        self.simplices(d).len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.first().is_none_or(Vec::is_empty)
    }

    /// Position of a simplex of the ambient complex within this subcomplex.
    pub fn position(&self, d: usize, idx: usize) -> Option<usize> {
        self.simplices(d).binary_search(&(idx as u32)).ok()
    }

    /// True when every simplex of `self` lies in `other`.
    pub fn is_subset_of(&self, other: &Subcomplex) -> bool {
        Arc::ptr_eq(&self.complex, &other.complex)
            && self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b)
    }

    /// Boundary `C_d -> C_{d-1}` in the bases of selected simplices.
    pub fn boundary_matrix(&self, d: usize) -> SparseMatrix<i64> {
        let cx = &self.complex;
        let columns = self
            .simplices(d)
            .iter()
            .map(|&s| {
                let mut col: Vec<(u32, i64)> = (0..=d)
                    .map(|i| {
                        let f = cx.face(d, s as usize, i);
                        let row = self.position(d - 1, f).expect("full subcomplexes are closed");
                        (row as u32, if i % 2 == 0 { 1 } else { -1 })
                    })
                    .collect();
                col.sort_unstable();
                col
            })
            .collect();
        SparseMatrix::from_columns(self.count(d - 1), columns)
    }

    pub fn chain_complex(&self) -> ChainComplex {
        let top = (0..self.selected.len())
            .rev()
            .find(|&d| self.count(d) > 0)
            .map_or(0, |d| d + 1);
        let dims: Vec<usize> = (0..top).map(|d| self.count(d)).collect();
        let boundaries = (1..top).map(|d| self.boundary_matrix(d)).collect();
        ChainComplex::new(dims, boundaries).expect("subcomplex boundary shapes are consistent")
    }

    /// Connected component id of every vertex (None outside the subcomplex).
    pub fn component_labels(&self) -> (usize, Vec<Option<usize>>) {
        let cx = &self.complex;
        let nv = cx.vertex_count();
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); nv];
        for &e in self.simplices(1) {
            let s = cx.simplex(1, e as usize);
            adj[s[0] as usize].push(s[1]);
            adj[s[1] as usize].push(s[0]);
        }
        let mut label = vec![None; nv];
        let mut next = 0;
        for start in 0..nv {
            if !self.mask[start] || label[start].is_some() {
                continue;
            }
            label[start] = Some(next);
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &u in &adj[v] {
                    if label[u as usize].is_none() {
                        label[u as usize] = Some(next);
                        queue.push_back(u as usize);
                    }
                }
            }
            next += 1;
        }
        (next, label)
    }

    pub fn component_count(&self) -> usize {
        self.component_labels().0
    }
}

/// Vertex predicate: every label `j` has `x_j <= x_{i_l}` and
/// `y_{i_l} >= y_{i_{l+1}}` along the pins.
fn rightmost_holds(cx: &OrderedConfigComplex, v: usize, pinned: &[u32], among: &[u32]) -> bool {
    pinned
        .iter()
        .all(|&i| among.iter().all(|&j| cx.x(v, j) <= cx.x(v, i)))
        && pinned.windows(2).all(|w| cx.y(v, w[0]) >= cx.y(v, w[1]))
}

fn lattice_rows(cx: &OrderedConfigComplex) -> usize {
    cx.base().ambient().height_units() as usize + 1
}

/// Subcomplex where the pinned squares are right-most and ordered top to
/// bottom.
pub fn build_rightmost_subcomplex(c: &Arc<OrderedConfigComplex>, pinned: &[u32]) -> Result<Subcomplex> {
    build_two_tier_subcomplex(c, &[], pinned)
}

/// Subcomplex where `pinned` are right-most among all squares and `free_pins`
/// are right-most among the remaining ones, each group ordered top to bottom.
pub fn build_two_tier_subcomplex(
    c: &Arc<OrderedConfigComplex>,
    free_pins: &[u32],
    pinned: &[u32],
) -> Result<Subcomplex> {
    let n = c.n();
    let all: Vec<u32> = free_pins.iter().chain(pinned).copied().collect();
    check_labels(n, &all)?;
    let nv = c.vertex_count();
    if pinned.len() > lattice_rows(c) {
        return Ok(Subcomplex::from_mask(c.clone(), vec![false; nv]));
    }
    let everyone: Vec<u32> = (1..=n as u32).collect();
    let rest: Vec<u32> = everyone.iter().copied().filter(|l| !pinned.contains(l)).collect();
    let mask = (0..nv)
        .map(|v| rightmost_holds(c, v, pinned, &everyone) && rightmost_holds(c, v, free_pins, &rest))
        .collect();
    Ok(Subcomplex::from_mask(c.clone(), mask))
}

/// Intersection of two subcomplexes of the same subdivided complex.
pub fn intersect_subcomplexes(a: &Subcomplex, b: &Subcomplex) -> Result<Subcomplex> {
    if !Arc::ptr_eq(&a.complex, &b.complex) {
        return Err(Error::invalid("subcomplexes of different complexes"));
    }
    let mask = a.mask.iter().zip(&b.mask).map(|(&x, &y)| x && y).collect();
    Ok(Subcomplex::from_mask(a.complex.clone(), mask))
}

/// Convenience: `DF_n` of the center rectangle of a `w x h` board.
pub fn config_for_board(w: u32, h: u32, n: usize, opts: &BuildOptions) -> Result<ConfigComplex> {
    if w < 2 || h < 2 {
        return Err(Error::invalid(format!("board {w}x{h} has no interior lattice cell")));
    }
    let ambient = crate::grid::build_rect_complex(w - 1, h - 1)?;
    build_discrete_config_with(&ambient, n, opts)
}

/// Subdivided `DF_n` of a `w x h` board, shared for subcomplex construction.
pub fn ordered_for_board(w: u32, h: u32, n: usize) -> Result<Arc<OrderedConfigComplex>> {
    let base = config_for_board(w, h, n, &BuildOptions::default())?;
    Ok(Arc::new(subdivide_order(&base)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_rect_complex;
    use crate::homology::rational_betti;

    fn counts(c: &ConfigComplex) -> Vec<usize> {
        (0..c.degrees()).map(|k| c.count(k)).collect()
    }

    #[test]
    fn two_squares_in_unit_rectangle() {
        let amb = build_rect_complex(1, 1).unwrap();
        let c = build_discrete_config(&amb, 2).unwrap();
        assert_eq!(counts(&c), vec![12, 16, 4]);
        let cc = c.chain_complex();
        cc.check_d_squared().unwrap();
        assert_eq!(cc.euler_characteristic(), 0);
    }

    #[test]
    fn exhaustive_pair_enumeration_oracle() {
        let amb = build_rect_complex(1, 1).unwrap();
        let mut by_dim = [0usize; 5];
        for a in amb.cells() {
            for b in amb.cells() {
                if closures_disjoint(a, b) {
                    by_dim[a.dim() + b.dim()] += 1;
                }
            }
        }
        let c = build_discrete_config(&amb, 2).unwrap();
        for k in 0..5 {
            assert_eq!(c.count(k), by_dim[k]);
        }
    }

    #[test]
    fn single_square_is_the_ambient() {
        let amb = build_rect_complex(3, 2).unwrap();
        let c = build_discrete_config(&amb, 1).unwrap();
        assert_eq!(c.chain_complex(), amb.chain_complex());
    }

    #[test]
    fn pigeonhole_gives_empty() {
        let amb = build_rect_complex(1, 1).unwrap();
        let c = build_discrete_config(&amb, 5).unwrap();
        assert!(c.is_empty());
        assert!(build_discrete_config(&amb, 0).is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let amb = build_rect_complex(3, 3).unwrap();
        let opts = BuildOptions { max_dim: None, budget: 100 };
        assert!(matches!(
            build_discrete_config_with(&amb, 2, &opts),
            Err(Error::BudgetExceeded { budget: 100 })
        ));
    }

    #[test]
    fn truncation_keeps_low_skeleton() {
        let amb = build_rect_complex(2, 2).unwrap();
        let full = build_discrete_config(&amb, 2).unwrap();
        let opts = BuildOptions { max_dim: Some(2), budget: DEFAULT_CELL_BUDGET };
        let part = build_discrete_config_with(&amb, 2, &opts).unwrap();
        assert!(part.is_truncated());
        for k in 0..=2 {
            assert_eq!(full.count(k), part.count(k));
        }
        assert_eq!(part.degrees(), 3);
        assert!(subdivide_order(&part).is_err());
    }

    #[test]
    fn cells_sorted_and_indexed() {
        let amb = build_rect_complex(2, 2).unwrap();
        let c = build_discrete_config(&amb, 2).unwrap();
        for k in 0..c.degrees() {
            for i in 0..c.count(k) {
                assert_eq!(c.index_of(c.parts(k, i)), Some((k, i)));
                if i > 0 {
                    assert!(c.parts(k, i - 1) < c.parts(k, i));
                }
            }
        }
        for v in 0..c.count(0) {
            assert_eq!(c.vertex_index(&c.vertex_coords(v)), Some(v));
        }
    }

    #[test]
    fn df2_of_unit_rectangle_is_a_circle() {
        let amb = build_rect_complex(1, 1).unwrap();
        let c = build_discrete_config(&amb, 2).unwrap();
        assert_eq!(rational_betti(&c.chain_complex()).unwrap(), vec![1, 1, 0]);
        let o = subdivide_order(&c).unwrap();
        let b = rational_betti(&o.chain_complex()).unwrap();
        assert_eq!(&b[..2], &[1, 1]);
        assert!(b[2..].iter().all(|&x| x == 0));
    }

    #[test]
    fn subdivision_of_a_single_cube_counts() {
        // one square in a 1x1 rectangle: the 2-cube gives 3 ordered partitions
        // of two coordinates, plus the edges and vertices of the boundary
        let amb = build_rect_complex(1, 1).unwrap();
        let c = build_discrete_config(&amb, 1).unwrap();
        let o = subdivide_order(&c).unwrap();
        assert_eq!(o.count(0), 4);
        assert_eq!(o.count(1), 5);
        assert_eq!(o.count(2), 2);
        assert_eq!(o.chain_complex().euler_characteristic(), 1);
    }

    #[test]
    fn halfspace_invariant() {
        let o = ordered_for_board(3, 3, 2).unwrap();
        for d in 0..o.degrees() {
            for i in 0..o.count(d) {
                for axis in [Axis::X, Axis::Y] {
                    let le = o.satisfies(d, i, OrderConstraint { axis, lo: 1, hi: 2 });
                    let ge = o.satisfies(d, i, OrderConstraint { axis, lo: 2, hi: 1 });
                    assert!(le || ge);
                }
            }
        }
    }

    #[test]
    fn empty_pins_give_everything() {
        let o = ordered_for_board(2, 2, 2).unwrap();
        let s = build_rightmost_subcomplex(&o, &[]).unwrap();
        assert_eq!(s.count(0), o.vertex_count());
        assert_eq!(s.count(1), o.count(1));
    }

    #[test]
    fn three_pins_in_three_rows_connected() {
        let o = ordered_for_board(3, 3, 3).unwrap();
        let s = build_rightmost_subcomplex(&o, &[1, 2, 3]).unwrap();
        assert!(!s.is_empty());
        assert_eq!(s.component_count(), 1);
        assert_eq!(rational_betti(&s.chain_complex()).unwrap()[0], 1);
    }

    #[test]
    fn too_many_pins_empty_and_repeats_rejected() {
        let o = ordered_for_board(3, 2, 3).unwrap();
        assert!(build_rightmost_subcomplex(&o, &[1, 2, 3]).unwrap().is_empty());
        assert!(build_rightmost_subcomplex(&o, &[1, 1]).is_err());
        assert!(build_rightmost_subcomplex(&o, &[4]).is_err());
    }

    #[test]
    fn single_pin_intersection_counts_shuffles() {
        let o = ordered_for_board(4, 3, 3).unwrap();
        let a = build_rightmost_subcomplex(&o, &[1]).unwrap();
        let b = build_rightmost_subcomplex(&o, &[2]).unwrap();
        let ab = intersect_subcomplexes(&a, &b).unwrap();
        assert_eq!(ab.component_count(), 2);
        let aa = intersect_subcomplexes(&a, &a).unwrap();
        assert_eq!(aa.mask(), a.mask());
    }

    #[test]
    fn intersection_requires_same_complex() {
        let o1 = ordered_for_board(2, 2, 2).unwrap();
        let o2 = ordered_for_board(2, 2, 2).unwrap();
        let a = build_rightmost_subcomplex(&o1, &[1]).unwrap();
        let b = build_rightmost_subcomplex(&o2, &[1]).unwrap();
        assert!(intersect_subcomplexes(&a, &b).is_err());
    }

    #[test]
    fn cover_by_rightmost_pieces_is_everything() {
        let o = ordered_for_board(3, 3, 3).unwrap();
        let pieces: Vec<Subcomplex> = (1..=3)
            .map(|j| build_rightmost_subcomplex(&o, &[j]).unwrap())
            .collect();
        for d in 0..o.degrees() {
            for i in 0..o.count(d) {
                assert!(pieces.iter().any(|p| p.position(d, i).is_some()), "simplex {d}:{i} uncovered");
            }
        }
    }

    #[test]
    fn dump_round_trips() {
        let amb = build_rect_complex(1, 1).unwrap();
        let c = build_discrete_config(&amb, 2).unwrap();
        let dump = c.dump(2, 2);
        let text = serde_json::to_string(&dump).unwrap();
        let back: ComplexDump = serde_json::from_str(&text).unwrap();
        assert_eq!(back.chain_complex().unwrap(), c.chain_complex());
    }
}
