//! Sliding-square puzzles: exhaustive state graphs of labeled squares on a
//! `w x h` board of unit cells.
//!
//! Squares sit on lattice anchors (bottom-left corner) and move one cell at a
//! time into free space. Optional constraints pin a chain of unit squares to
//! the right-most column, top to bottom in the given order, and can force
//! further squares into that column.

use std::collections::VecDeque;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ConfigComplex;
use crate::error::{Error, Result};

/// Board dimensions and the side length of each square (`sides[label-1]`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Board {
    pub w: u32,
    pub h: u32,
    pub sides: Vec<u32>,
}

impl Board {
    pub fn new(w: u32, h: u32, sides: Vec<u32>) -> Result<Self> {
        if sides.contains(&0) {
            return Err(Error::invalid("side lengths must be at least 1"));
        }
        Ok(Board { w, h, sides })
    }

    /// `n` unit squares.
    pub fn unit(w: u32, h: u32, n: usize) -> Self {
        Board {
            w,
            h,
            sides: vec![1; n],
        }
    }

    pub fn n(&self) -> usize {
        self.sides.len()
    }

    pub fn side(&self, label: u32) -> u32 {
        self.sides[label as usize - 1]
    }

    fn is_unit(&self) -> bool {
        self.sides.iter().all(|&s| s == 1)
    }
}

/// Anchor `(x, y)` of each square, indexed by `label - 1`; `y` grows upward.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PuzzleState {
    pub anchors: Vec<(u32, u32)>,
}

impl PuzzleState {
    pub fn new(anchors: Vec<(u32, u32)>) -> Self {
        PuzzleState { anchors }
    }

    pub fn anchor(&self, label: u32) -> (u32, u32) {
        self.anchors[label as usize - 1]
    }

    /// Label covering each cell, row-major from the bottom row.
    pub fn occupancy(&self, board: &Board) -> Vec<Option<u32>> {
        let mut occ = vec![None; (board.w * board.h) as usize];
        for (i, &(x, y)) in self.anchors.iter().enumerate() {
            let s = board.sides[i];
            for dy in 0..s {
                for dx in 0..s {
                    let (cx, cy) = (x + dx, y + dy);
                    if cx < board.w && cy < board.h {
                        occ[(cy * board.w + cx) as usize] = Some(i as u32 + 1);
                    }
                }
            }
        }
        occ
    }

    /// The board as text, top row first, `.` for empty cells.
    pub fn render(&self, board: &Board) -> String {
        let occ = self.occupancy(board);
        let wide = board.n() >= 10;
        let mut out = String::new();
        for y in (0..board.h).rev() {
            let row: Vec<String> = (0..board.w)
                .map(|x| match occ[(y * board.w + x) as usize] {
                    Some(l) if wide => format!("{l:>2}"),
                    Some(l) => l.to_string(),
                    None if wide => " .".to_string(),
                    None => ".".to_string(),
                })
                .collect();
            out.push_str(&row.join(if wide { " " } else { "" }));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Left,
    Right,
    Up,
    Down,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Left, Direction::Right, Direction::Up, Direction::Down];

    fn step(self, (x, y): (u32, u32)) -> Option<(u32, u32)> {
        match self {
            Direction::Left => x.checked_sub(1).map(|x| (x, y)),
            Direction::Right => Some((x + 1, y)),
            Direction::Down => y.checked_sub(1).map(|y| (x, y)),
            Direction::Up => Some((x, y + 1)),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Direction::Left => "left",
            Direction::Right => "right",
            Direction::Up => "up",
            Direction::Down => "down",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub label: u32,
    pub direction: Direction,
}

/// Squares held in the right-most column.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraints {
    /// Unit squares in the right-most column, top to bottom in this order.
    pub pinned: Vec<u32>,
    /// Squares that must also touch the right edge, in any order.
    pub right_column: Vec<u32>,
}

impl Constraints {
    pub fn pinned(labels: &[u32]) -> Self {
        Constraints {
            pinned: labels.to_vec(),
            right_column: Vec::new(),
        }
    }

    fn validate(&self, board: &Board) -> Result<()> {
        let mut seen = vec![false; board.n() + 1];
        for &l in self.pinned.iter().chain(&self.right_column) {
            if l == 0 || l as usize > board.n() {
                return Err(Error::invalid(format!("label {l} out of range")));
            }
            if std::mem::replace(&mut seen[l as usize], true) {
                return Err(Error::invalid(format!("label {l} constrained twice")));
            }
        }
        if self.pinned.iter().any(|&l| board.side(l) != 1) {
            return Err(Error::invalid("pinned squares must be unit squares"));
        }
        Ok(())
    }

    fn allows(&self, board: &Board, s: &PuzzleState) -> bool {
        let at_right = |l: u32| s.anchor(l).0 + board.side(l) == board.w;
        self.pinned.iter().chain(&self.right_column).all(|&l| at_right(l))
            && self.pinned.windows(2).all(|p| s.anchor(p[0]).1 > s.anchor(p[1]).1)
    }
}

/// All placements of the squares and the unit slides between them.
#[derive(Clone, Debug)]
pub struct MoveGraph {
    board: Board,
    constraints: Constraints,
    states: Vec<PuzzleState>,
    // packed states, sorted in the same order as `states`
    keys: Vec<u128>,
    adjacency: Vec<Vec<(usize, Move)>>,
}

/// Enumerates every placement (sorted) and every slide between placements.
/// An impossible board gives an empty graph.
pub fn enumerate_states(board: &Board, constraints: &Constraints) -> Result<MoveGraph> {
    constraints.validate(board)?;
    if board.n() > 16 || board.w * board.h > 256 {
        return Err(Error::invalid("at most 16 squares on at most 256 cells"));
    }
    let mut states = Vec::new();
    let area: u64 = board.sides.iter().map(|&s| u64::from(s) * u64::from(s)).sum();
    if area <= u64::from(board.w) * u64::from(board.h) {
        let mut occ = vec![false; (board.w * board.h) as usize];
        let mut anchors = Vec::with_capacity(board.n());
        place(board, constraints, &mut occ, &mut anchors, &mut states);
    }
    states.sort();
    let keys: Vec<u128> = states.iter().map(|s| pack(board.h, &s.anchors)).collect();
    let adjacency = states
        .par_iter()
        .zip(&keys)
        .map(|(s, &key)| {
            let mut out = Vec::new();
            for label in 1..=board.n() as u32 {
                let shift = 8 * (15 - (label as usize - 1));
                for direction in Direction::ALL {
                    let Some((x, y)) = direction.step(s.anchor(label)) else { continue };
                    if x >= board.w || y >= board.h {
                        continue;
                    }
                    let code = u128::from(x * board.h + y);
                    let moved = (key & !(0xff << shift)) | code << shift;
                    if let Ok(j) = keys.binary_search(&moved) {
                        out.push((j, Move { label, direction }));
                    }
                }
            }
            out
        })
        .collect();
    Ok(MoveGraph {
        board: board.clone(),
        constraints: constraints.clone(),
        states,
        keys,
        adjacency,
    })
}

// one byte per label, label 1 most significant; the cell code x*h + y
// orders like the anchor tuple
fn pack(h: u32, anchors: &[(u32, u32)]) -> u128 {
    anchors
        .iter()
        .enumerate()
        .fold(0, |k, (i, &(x, y))| k | u128::from(x * h + y) << (8 * (15 - i)))
}

fn place(
    board: &Board,
    con: &Constraints,
    occ: &mut [bool],
    anchors: &mut Vec<(u32, u32)>,
    out: &mut Vec<PuzzleState>,
) {
    let i = anchors.len();
    if i == board.n() {
        let s = PuzzleState::new(anchors.clone());
        if con.allows(board, &s) {
            out.push(s);
        }
        return;
    }
    let side = board.sides[i];
    if side > board.w || side > board.h {
        return;
    }
    let cells = |x: u32, y: u32| (0..side).flat_map(move |dy| (0..side).map(move |dx| ((y + dy) * board.w + x + dx) as usize));
    let label = i as u32 + 1;
    let in_column = con.pinned.contains(&label) || con.right_column.contains(&label);
    for y in 0..=board.h - side {
        for x in 0..=board.w - side {
            if in_column && x + side != board.w {
                continue;
            }
            if cells(x, y).any(|c| occ[c]) {
                continue;
            }
            for c in cells(x, y) {
                occ[c] = true;
            }
            anchors.push((x, y));
            place(board, con, occ, anchors, out);
            anchors.pop();
            for c in cells(x, y) {
                occ[c] = false;
            }
        }
    }
}

impl MoveGraph {
    pub fn board(&self) -> &Board {
        &self.board
    }

    pub fn constraints(&self) -> &Constraints {
        &self.constraints
    }

    pub fn states(&self) -> &[PuzzleState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, s: &PuzzleState) -> Option<usize> {
        let ok = s.anchors.len() == self.board.n()
            && s.anchors.iter().all(|&(x, y)| x < self.board.w && y < self.board.h);
        if !ok {
            return None;
        }
        self.keys.binary_search(&pack(self.board.h, &s.anchors)).ok()
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, Move)] {
        &self.adjacency[i]
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Component id of each state and the number of components.
    pub fn components(&self) -> (usize, Vec<usize>) {
        let mut comp = vec![usize::MAX; self.len()];
        let mut count = 0;
        for start in 0..self.len() {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = count;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &(u, _) in &self.adjacency[v] {
                    if comp[u] == usize::MAX {
                        comp[u] = count;
                        queue.push_back(u);
                    }
                }
            }
            count += 1;
        }
        (count, comp)
    }

    fn require(&self, s: &PuzzleState) -> Result<usize> {
        self.index_of(s)
            .ok_or_else(|| Error::invalid(format!("state {:?} is not in the graph", s.anchors)))
    }
}

/// Number of components and their sizes, largest first.
pub fn component_count(g: &MoveGraph) -> (usize, Vec<usize>) {
    let (count, comp) = g.components();
    let mut sizes = vec![0; count];
    for c in comp {
        sizes[c] += 1;
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    (count, sizes)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// Parity of the permutation read off the board (blank as the largest
/// label) plus the taxicab distance of the blank from the bottom-right cell.
/// Requires unit squares and exactly one empty cell.
pub fn parity_class(board: &Board, s: &PuzzleState) -> Result<Parity> {
    if !board.is_unit() {
        return Err(Error::invalid("parity is defined for unit squares only"));
    }
    if board.n() + 1 != (board.w * board.h) as usize {
        return Err(Error::invalid("parity needs exactly one empty cell"));
    }
    let occ = s.occupancy(board);
    let blank_label = board.n() as u32 + 1;
    // reading order: top row first, left to right
    let mut word = Vec::with_capacity(occ.len());
    let mut blank = (0, 0);
    for y in (0..board.h).rev() {
        for x in 0..board.w {
            match occ[(y * board.w + x) as usize] {
                Some(l) => word.push(l),
                None => {
                    word.push(blank_label);
                    blank = (x, y);
                }
            }
        }
    }
    let mut inversions = 0usize;
    for i in 0..word.len() {
        for j in i + 1..word.len() {
            if word[i] > word[j] {
                inversions += 1;
            }
        }
    }
    let dist = (board.w - 1 - blank.0) + blank.1;
    Ok(if (inversions + dist as usize).is_multiple_of(2) {
        Parity::Even
    } else {
        Parity::Odd
    })
}

/// Applies one slide; errors when it leaves the board or collides.
pub fn apply_move(board: &Board, s: &PuzzleState, m: Move) -> Result<PuzzleState> {
    if m.label == 0 || m.label as usize > board.n() {
        return Err(Error::invalid(format!("label {} out of range", m.label)));
    }
    let a = m
        .direction
        .step(s.anchor(m.label))
        .ok_or_else(|| Error::invalid(format!("square {} cannot move {}", m.label, m.direction)))?;
    let side = board.side(m.label);
    if a.0 + side > board.w || a.1 + side > board.h {
        return Err(Error::invalid(format!("square {} cannot move {}", m.label, m.direction)));
    }
    let mut t = s.clone();
    t.anchors[m.label as usize - 1] = a;
    let area: usize = board.sides.iter().map(|&x| (x * x) as usize).sum();
    if t.occupancy(board).iter().flatten().count() != area {
        return Err(Error::invalid(format!("square {} collides moving {}", m.label, m.direction)));
    }
    Ok(t)
}

/// Replays a move sequence from `start`.
pub fn replay(board: &Board, start: &PuzzleState, moves: &[Move]) -> Result<PuzzleState> {
    moves.iter().try_fold(start.clone(), |s, &m| apply_move(board, &s, m))
}

/// A shortest slide sequence from `a` to `b`, or `None` when they lie in
/// different components.
pub fn find_path(g: &MoveGraph, a: &PuzzleState, b: &PuzzleState) -> Result<Option<Vec<Move>>> {
    let (ia, ib) = (g.require(a)?, g.require(b)?);
    let mut prev: Vec<Option<(usize, Move)>> = vec![None; g.len()];
    let mut seen = vec![false; g.len()];
    seen[ia] = true;
    let mut queue = VecDeque::from([ia]);
    while let Some(v) = queue.pop_front() {
        if v == ib {
            break;
        }
        for &(u, m) in g.neighbors(v) {
            if !seen[u] {
                seen[u] = true;
                prev[u] = Some((v, m));
                queue.push_back(u);
            }
        }
    }
    if !seen[ib] {
        return Ok(None);
    }
    let mut path = Vec::new();
    let mut v = ib;
    while let Some((u, m)) = prev[v] {
        path.push(m);
        v = u;
    }
    path.reverse();
    Ok(Some(path))
}

/// Whether the configurations of one `(k+1) x (k+1)` square (label 1) and
/// `n - 1` unit squares, with `pins` in the right-most column, form a
/// connected graph.
pub fn big_square_connectivity(w: u32, h: u32, k: u32, n: usize, pins: &[u32]) -> Result<bool> {
    if n == 0 {
        return Err(Error::invalid("need at least the big square"));
    }
    let mut sides = vec![1; n];
    sides[0] = k + 1;
    let g = enumerate_states(&Board::new(w, h, sides)?, &Constraints::pinned(pins))?;
    Ok(component_count(&g).0 == 1)
}

/// Checks that the vertices and edges of `c` are exactly the states and
/// slides of the unit-square graph on the matching board.
pub fn matches_skeleton(g: &MoveGraph, c: &ConfigComplex) -> Result<bool> {
    if !g.board.is_unit() || g.board.n() != c.n() {
        return Err(Error::invalid("skeleton comparison needs unit squares of the same count"));
    }
    if c.count(0) != g.len() || c.count(1) != g.edge_count() {
        return Ok(false);
    }
    let state_of = |v: usize| -> Option<usize> {
        let xy = c.vertex_coords(v);
        g.index_of(&PuzzleState::new(xy.chunks(2).map(|p| (p[0], p[1])).collect()))
    };
    let vertex_state: Vec<Option<usize>> = (0..c.count(0)).map(state_of).collect();
    if vertex_state.iter().any(Option::is_none) {
        return Ok(false);
    }
    for e in 0..c.count(1) {
        let f = c.faces(1, e);
        let [(a, _), (b, _)] = f[..] else { return Ok(false) };
        let (sa, sb) = (vertex_state[a].unwrap(), vertex_state[b].unwrap());
        if !g.neighbors(sa).iter().any(|&(u, _)| u == sb) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{config_for_board, BuildOptions};

    fn unit_graph(w: u32, h: u32, n: usize) -> MoveGraph {
        enumerate_states(&Board::unit(w, h, n), &Constraints::default()).unwrap()
    }

    fn falling(n: u64, k: u64) -> u64 {
        (n - k + 1..=n).product()
    }

    #[test]
    fn state_counts() {
        assert_eq!(unit_graph(2, 2, 3).len(), 24);
        for (w, h, n) in [(2, 2, 1), (3, 2, 3), (3, 3, 4)] {
            assert_eq!(unit_graph(w, h, n).len() as u64, falling(u64::from(w * h), n as u64));
        }
        assert_eq!(unit_graph(2, 2, 5).len(), 0);
    }

    #[test]
    fn weighted_counts() {
        let g = enumerate_states(&Board::new(3, 2, vec![2, 1]).unwrap(), &Constraints::default()).unwrap();
        assert_eq!(g.len(), 4);
        let g = enumerate_states(&Board::new(2, 2, vec![2, 1]).unwrap(), &Constraints::default()).unwrap();
        assert!(g.is_empty());
        assert!(Board::new(2, 2, vec![0]).is_err());
    }

    #[test]
    fn edges_are_symmetric() {
        let g = unit_graph(3, 2, 4);
        for i in 0..g.len() {
            for &(j, _) in g.neighbors(i) {
                assert!(g.neighbors(j).iter().any(|&(k, _)| k == i));
            }
        }
    }

    #[test]
    fn two_components_when_one_cell_is_empty() {
        let g = unit_graph(2, 2, 3);
        assert_eq!(component_count(&g), (2, vec![12, 12]));
        let (_, comp) = g.components();
        let b = g.board();
        for i in 0..g.len() {
            for j in 0..g.len() {
                let same = parity_class(b, &g.states()[i]).unwrap() == parity_class(b, &g.states()[j]).unwrap();
                assert_eq!(same, comp[i] == comp[j]);
            }
        }
        assert_eq!(component_count(&unit_graph(2, 2, 2)).0, 1);
        assert_eq!(component_count(&unit_graph(3, 2, 4)).0, 1);
        assert_eq!(component_count(&unit_graph(3, 2, 5)).0, 2);
    }

    #[test]
    fn fifteen_puzzle_classes_differ() {
        let b = Board::unit(4, 4, 15);
        let grid = |rows: [[u32; 4]; 4]| {
            let mut anchors = vec![(0, 0); 15];
            for (r, row) in rows.iter().enumerate() {
                for (x, &l) in row.iter().enumerate() {
                    if l > 0 {
                        anchors[l as usize - 1] = (x as u32, 3 - r as u32);
                    }
                }
            }
            PuzzleState::new(anchors)
        };
        let initial = grid([[1, 2, 3, 4], [5, 6, 7, 8], [9, 10, 11, 12], [13, 15, 14, 0]]);
        let target = grid([[1, 2, 3, 4], [5, 6, 7, 8], [9, 10, 11, 12], [13, 14, 15, 0]]);
        assert_ne!(parity_class(&b, &initial).unwrap(), parity_class(&b, &target).unwrap());
        let slid = apply_move(&b, &target, Move { label: 15, direction: Direction::Right }).unwrap();
        assert_eq!(parity_class(&b, &slid).unwrap(), parity_class(&b, &target).unwrap());
    }

    #[test]
    fn cyclic_arrangements_differ() {
        let b = Board::unit(2, 2, 3);
        let a = PuzzleState::new(vec![(0, 1), (1, 1), (1, 0)]);
        let c = PuzzleState::new(vec![(0, 1), (1, 0), (1, 1)]);
        assert_ne!(parity_class(&b, &a).unwrap(), parity_class(&b, &c).unwrap());
        let two_blanks = Board::unit(2, 2, 2);
        assert!(parity_class(&two_blanks, &PuzzleState::new(vec![(0, 0), (1, 0)])).is_err());
    }

    #[test]
    fn paths_replay() {
        let g = unit_graph(2, 2, 2);
        let b = g.board().clone();
        let s0 = g.states()[0].clone();
        assert_eq!(find_path(&g, &s0, &s0).unwrap(), Some(vec![]));
        for t in g.states() {
            let p = find_path(&g, &s0, t).unwrap().unwrap();
            assert_eq!(&replay(&b, &s0, &p).unwrap(), t);
        }
        let g3 = unit_graph(2, 2, 3);
        let a = PuzzleState::new(vec![(0, 1), (1, 1), (1, 0)]);
        let c = PuzzleState::new(vec![(0, 1), (1, 0), (1, 1)]);
        assert_eq!(find_path(&g3, &a, &c).unwrap(), None);
        assert!(find_path(&g3, &a, &PuzzleState::new(vec![(5, 5), (0, 0), (1, 1)])).is_err());
    }

    #[test]
    fn path_json_shape() {
        let m = Move { label: 3, direction: Direction::Up };
        assert_eq!(serde_json::to_string(&m).unwrap(), r#"{"label":3,"direction":"up"}"#);
    }

    #[test]
    fn pinned_shuffles() {
        let board = Board::unit(4, 3, 10);
        let con = Constraints {
            pinned: vec![1, 2],
            right_column: vec![3],
        };
        let g = enumerate_states(&board, &con).unwrap();
        assert_eq!(component_count(&g).0, 3);
        assert!(enumerate_states(&board, &Constraints::pinned(&[1, 1])).is_err());
    }

    #[test]
    fn big_square_cases() {
        assert!(big_square_connectivity(4, 3, 1, 6, &[2]).unwrap());
        assert_eq!(
            big_square_connectivity(3, 3, 0, 7, &[]).unwrap(),
            component_count(&unit_graph(3, 3, 7)).0 == 1
        );
        assert!(big_square_connectivity(3, 3, 0, 7, &[]).unwrap());
    }

    #[test]
    fn skeleton_of_discrete_configurations() {
        for (w, h, n) in [(2, 2, 2), (2, 2, 3), (3, 2, 2), (3, 3, 3)] {
            let g = unit_graph(w, h, n);
            let c = config_for_board(w, h, n, &BuildOptions::default()).unwrap();
            assert!(matches_skeleton(&g, &c).unwrap(), "{w}x{h} n={n}");
        }
    }
}
