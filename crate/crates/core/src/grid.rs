//! The cube complex structure on the rectangle of admissible square centers.
//!
//! A rectangle `R_{w,h}` of unit squares has its square centers confined to
//! a `(w-1) x (h-1)` lattice rectangle. That rectangle is tiled by unit
//! 2-cells; this module builds the resulting cube complex with a fixed
//! orientation convention: 1-cells point from lower to higher coordinate and
//! the boundary of a product cell follows the tensor sign rule with the x
//! factor first.

use serde::{Deserialize, Serialize};

use crate::chain::{ChainComplex, SparseMatrix};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Extent {
    Point,
    Interval,
}

impl Extent {
    fn dim(self) -> usize {
        match self {
            Extent::Point => 0,
            Extent::Interval => 1,
        }
    }
}

/// A cell of the lattice rectangle: a point or unit interval in each axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridCell {
    pub x_lo: u32,
    pub x_kind: Extent,
    pub y_lo: u32,
    pub y_kind: Extent,
}

impl GridCell {
    pub fn vertex(x: u32, y: u32) -> Self {
        GridCell {
            x_lo: x,
            x_kind: Extent::Point,
            y_lo: y,
            y_kind: Extent::Point,
        }
    }

    pub fn horizontal_edge(x: u32, y: u32) -> Self {
        GridCell {
            x_kind: Extent::Interval,
            ..GridCell::vertex(x, y)
        }
    }

    pub fn vertical_edge(x: u32, y: u32) -> Self {
        GridCell {
            y_kind: Extent::Interval,
            ..GridCell::vertex(x, y)
        }
    }

    pub fn square(x: u32, y: u32) -> Self {
        GridCell {
            x_kind: Extent::Interval,
            y_kind: Extent::Interval,
            ..GridCell::vertex(x, y)
        }
    }

    pub fn dim(&self) -> usize {
        self.x_kind.dim() + self.y_kind.dim()
    }

    /// Closed x-extent `[lo, hi]`.
    pub fn x_range(&self) -> (u32, u32) {
        (self.x_lo, self.x_lo + self.x_kind.dim() as u32)
    }

    /// Closed y-extent `[lo, hi]`.
    pub fn y_range(&self) -> (u32, u32) {
        (self.y_lo, self.y_lo + self.y_kind.dim() as u32)
    }
}

/// True iff the closed cells share no point.
pub fn closures_disjoint(a: &GridCell, b: &GridCell) -> bool {
    let apart = |(alo, ahi): (u32, u32), (blo, bhi): (u32, u32)| ahi < blo || bhi < alo;
    apart(a.x_range(), b.x_range()) || apart(a.y_range(), b.y_range())
}

/// The cube complex of a `width_units x height_units` lattice rectangle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubicalComplex {
    width_units: u32,
    height_units: u32,
    cells: Vec<GridCell>,
    faces: Vec<Vec<(usize, i8)>>,
}

impl CubicalComplex {
    pub fn width_units(&self) -> u32 {
        self.width_units
    }

    pub fn height_units(&self) -> u32 {
        self.height_units
    }

    pub fn cells(&self) -> &[GridCell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell(&self, idx: usize) -> &GridCell {
        &self.cells[idx]
    }

    /// Signed codimension-1 faces of a cell.
    pub fn faces(&self, idx: usize) -> &[(usize, i8)] {
        &self.faces[idx]
    }

    /// Dense index of a cell, if it lies in the rectangle.
    pub fn index_of(&self, c: &GridCell) -> Option<usize> {
        let (_, xhi) = c.x_range();
        let (_, yhi) = c.y_range();
        if xhi > self.width_units || yhi > self.height_units {
            return None;
        }
        let xs = 2 * c.x_lo + c.x_kind.dim() as u32;
        let ys = 2 * c.y_lo + c.y_kind.dim() as u32;
        Some((ys * (2 * self.width_units + 1) + xs) as usize)
    }

    pub fn vertex_count(&self) -> usize {
        ((self.width_units + 1) * (self.height_units + 1)) as usize
    }

    pub fn closures_disjoint(&self, a: usize, b: usize) -> bool {
        closures_disjoint(&self.cells[a], &self.cells[b])
    }

    /// Cellular chain complex with cells of each dimension in index order.
    pub fn chain_complex(&self) -> ChainComplex {
        let mut by_dim: Vec<Vec<usize>> = vec![Vec::new(); 3];
        let mut pos = vec![0usize; self.cells.len()];
        for (i, c) in self.cells.iter().enumerate() {
            pos[i] = by_dim[c.dim()].len();
            by_dim[c.dim()].push(i);
        }
        let dims: Vec<usize> = by_dim.iter().map(Vec::len).collect();
        let boundaries = (1..3)
            .map(|k| {
                let trip = by_dim[k].iter().enumerate().flat_map(|(col, &cell)| {
                    let pos = &pos;
                    self.faces[cell]
                        .iter()
                        .map(move |&(f, s)| (pos[f], col, s as i64))
                });
                SparseMatrix::from_triplets(dims[k - 1], dims[k], trip)
            })
            .collect();
        ChainComplex::new(dims, boundaries).expect("grid boundary shapes are consistent")
    }
}

/// Builds the cube complex of the lattice rectangle `[0, w] x [0, h]`.
pub fn build_rect_complex(width_units: u32, height_units: u32) -> Result<CubicalComplex> {
    if width_units == 0 || height_units == 0 {
        return Err(Error::invalid(format!(
            "rectangle must have positive size, got {width_units}x{height_units}"
        )));
    }
    let cols = 2 * width_units + 1;
    let rows = 2 * height_units + 1;
    let mut cells = Vec::with_capacity((cols * rows) as usize);
    for ys in 0..rows {
        for xs in 0..cols {
            let kind = |s: u32| if s.is_multiple_of(2) { Extent::Point } else { Extent::Interval };
            cells.push(GridCell {
                x_lo: xs / 2,
                x_kind: kind(xs),
                y_lo: ys / 2,
                y_kind: kind(ys),
            });
        }
    }
    let mut cx = CubicalComplex {
        width_units,
        height_units,
        cells,
        faces: Vec::new(),
    };
    let faces = cx
        .cells
        .iter()
        .map(|c| {
            let mut out = Vec::new();
            if c.x_kind == Extent::Interval {
                let hi = GridCell { x_lo: c.x_lo + 1, x_kind: Extent::Point, ..*c };
                let lo = GridCell { x_kind: Extent::Point, ..*c };
                out.push((cx.index_of(&hi).unwrap(), 1));
                out.push((cx.index_of(&lo).unwrap(), -1));
            }
            if c.y_kind == Extent::Interval {
                let s: i8 = if c.x_kind == Extent::Interval { -1 } else { 1 };
                let hi = GridCell { y_lo: c.y_lo + 1, y_kind: Extent::Point, ..*c };
                let lo = GridCell { y_kind: Extent::Point, ..*c };
                out.push((cx.index_of(&hi).unwrap(), s));
                out.push((cx.index_of(&lo).unwrap(), -s));
            }
            out
        })
        .collect();
    cx.faces = faces;
    Ok(cx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(cx: &CubicalComplex) -> [usize; 3] {
        let mut c = [0; 3];
        for cell in cx.cells() {
            c[cell.dim()] += 1;
        }
        c
    }

    #[test]
    fn unit_square_counts() {
        let cx = build_rect_complex(1, 1).unwrap();
        assert_eq!(counts(&cx), [4, 4, 1]);
        assert_eq!(cx.len(), 9);
    }

    #[test]
    fn two_by_two_counts() {
        let cx = build_rect_complex(2, 2).unwrap();
        assert_eq!(counts(&cx), [9, 12, 4]);
        assert_eq!(cx.len(), 25);
    }

    #[test]
    fn six_by_six_matches_enumeration() {
        let cx = build_rect_complex(6, 6).unwrap();
        // exhaustive: every (x_lo, kind, y_lo, kind) inside [0,6]^2
        let mut n = 0;
        for x in 0..=6u32 {
            for y in 0..=6u32 {
                for xk in [Extent::Point, Extent::Interval] {
                    for yk in [Extent::Point, Extent::Interval] {
                        let c = GridCell { x_lo: x, x_kind: xk, y_lo: y, y_kind: yk };
                        if cx.index_of(&c).is_some() {
                            n += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(n, 169);
        assert_eq!(cx.len(), 169);
    }

    #[test]
    fn zero_size_rejected() {
        assert!(matches!(build_rect_complex(0, 3), Err(Error::InvalidArgument(_))));
        assert!(build_rect_complex(2, 0).is_err());
    }

    #[test]
    fn face_counts_and_d_squared() {
        for w in 1..=8 {
            for h in 1..=8 {
                let cx = build_rect_complex(w, h).unwrap();
                assert_eq!(cx.len() as u32, (2 * w + 1) * (2 * h + 1));
                for (i, c) in cx.cells().iter().enumerate() {
                    assert_eq!(cx.faces(i).len(), 2 * c.dim());
                }
                let cc = cx.chain_complex();
                cc.check_d_squared().unwrap();
                assert_eq!(cc.euler_characteristic(), 1);
            }
        }
    }

    #[test]
    fn disjointness_examples() {
        let v00 = GridCell::vertex(0, 0);
        let v10 = GridCell::vertex(1, 0);
        let e = GridCell::horizontal_edge(0, 0);
        let e2 = GridCell::horizontal_edge(0, 2);
        assert!(closures_disjoint(&v00, &v10));
        assert!(!closures_disjoint(&v00, &e));
        assert!(closures_disjoint(&e, &e2));
    }

    #[test]
    fn disjointness_symmetric_and_irreflexive() {
        let cx = build_rect_complex(3, 3).unwrap();
        for a in 0..cx.len() {
            assert!(!cx.closures_disjoint(a, a));
            for b in 0..cx.len() {
                assert_eq!(cx.closures_disjoint(a, b), cx.closures_disjoint(b, a));
            }
        }
    }
}
