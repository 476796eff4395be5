#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use sqconf_core::wheels::{bracket_to_wheels, combination_to_wheels, BracketExpr, Wheel, WheelCombination};

/// Splits `labels` into `leaves` random wheels (first spoke minimal).
pub fn random_wheels<R: Rng>(rng: &mut R, labels: &[u32], leaves: usize) -> Vec<Wheel> {
    let mut labels = labels.to_vec();
    labels.shuffle(rng);
    let mut cuts: Vec<usize> = (1..labels.len()).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(leaves - 1).collect();
    cuts.sort_unstable();
    cuts.push(labels.len());
    let mut out = Vec::new();
    let mut start = 0;
    for c in cuts {
        let mut spokes = labels[start..c].to_vec();
        let min_at = (0..spokes.len()).min_by_key(|&i| spokes[i]).unwrap();
        spokes.swap(0, min_at);
        spokes[1..].shuffle(rng);
        out.push(Wheel::new(spokes).unwrap());
        start = c;
    }
    out
}

/// A random binary bracket tree over the given leaves.
pub fn random_tree<R: Rng>(rng: &mut R, mut leaves: Vec<BracketExpr>) -> BracketExpr {
    while leaves.len() > 1 {
        let i = rng.gen_range(0..leaves.len());
        let a = leaves.swap_remove(i);
        let j = rng.gen_range(0..leaves.len());
        let b = leaves.swap_remove(j);
        leaves.push(BracketExpr::psi(a, b));
    }
    leaves.pop().unwrap()
}

pub fn random_expr<R: Rng>(rng: &mut R, labels: &[u32], leaves: usize) -> BracketExpr {
    let ws = random_wheels(rng, labels, leaves);
    random_tree(rng, ws.into_iter().map(BracketExpr::Leaf).collect())
}

/// Three disjoint random expressions on `1..=total`.
pub fn random_triple<R: Rng>(rng: &mut R, total: u32) -> [BracketExpr; 3] {
    let mut labels: Vec<u32> = (1..=total).collect();
    labels.shuffle(rng);
    let a = rng.gen_range(1..total - 1) as usize;
    let b = rng.gen_range(1..total as usize - a);
    let (x, rest) = labels.split_at(a);
    let (y, z) = rest.split_at(b);
    let mk = |rng: &mut R, s: &[u32]| {
        let leaves = rng.gen_range(1..=s.len().min(3));
        random_expr(rng, s, leaves)
    };
    [mk(rng, x), mk(rng, y), mk(rng, z)]
}

fn sign(e: usize) -> i64 {
    if e.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn scaled(c: &WheelCombination, s: i64) -> WheelCombination {
    c.iter().map(|(p, v)| (p.clone(), v * s)).collect()
}

/// `ψ(a,b) = -(-1)^{|a||b|} ψ(b,a)` with `|x|` the number of labels.
pub fn antisymmetry_holds(a: &BracketExpr, b: &BracketExpr) -> bool {
    let lhs = bracket_to_wheels(&BracketExpr::psi(a.clone(), b.clone())).unwrap();
    let rhs = bracket_to_wheels(&BracketExpr::psi(b.clone(), a.clone())).unwrap();
    lhs == scaled(&rhs, -sign(a.size() * b.size()))
}

/// Graded Jacobi identity.
pub fn jacobi_holds(a: &BracketExpr, b: &BracketExpr, c: &BracketExpr) -> bool {
    let (da, db, dc) = (a.size(), b.size(), c.size());
    let t = |x: &BracketExpr, y: &BracketExpr, z: &BracketExpr| {
        BracketExpr::psi(BracketExpr::psi(x.clone(), y.clone()), z.clone())
    };
    let terms = [
        (sign(da * dc), t(a, b, c)),
        (sign(db * da), t(b, c, a)),
        (sign(dc * db), t(c, a, b)),
    ];
    combination_to_wheels(&terms).unwrap().is_empty()
}

/// Rewrites random nodes of `e` by antisymmetry or Jacobi, returning
/// signed terms with the same value.
pub fn rewrite<R: Rng>(rng: &mut R, e: &BracketExpr) -> Vec<(i64, BracketExpr)> {
    let BracketExpr::Bracket(x, y) = e else {
        return vec![(1, e.clone())];
    };
    let (x, y) = (x.as_ref(), y.as_ref());
    match rng.gen_range(0..3) {
        0 => {
            let s = -sign(x.size() * y.size());
            rewrite_children(rng, y, x, s)
        }
        1 => match x {
            // ψ(ψ(a,b),c) = -(-1)^{|a||c|} [(-1)^{|a||b|} ψ(ψ(b,c),a) + (-1)^{|b||c|} ψ(ψ(c,a),b)]
            BracketExpr::Bracket(a, b) => {
                let (a, b, c) = (a.as_ref(), b.as_ref(), y);
                let base = -sign(a.size() * c.size());
                let t1 = BracketExpr::psi(BracketExpr::psi(b.clone(), c.clone()), a.clone());
                let t2 = BracketExpr::psi(BracketExpr::psi(c.clone(), a.clone()), b.clone());
                vec![
                    (base * sign(a.size() * b.size()), t1),
                    (base * sign(b.size() * c.size()), t2),
                ]
            }
            _ => rewrite_children(rng, x, y, 1),
        },
        _ => rewrite_children(rng, x, y, 1),
    }
}

fn rewrite_children<R: Rng>(rng: &mut R, x: &BracketExpr, y: &BracketExpr, s: i64) -> Vec<(i64, BracketExpr)> {
    let mut out = Vec::new();
    for (cx, ex) in rewrite(rng, x) {
        for (cy, ey) in rewrite(rng, y) {
            out.push((s * cx * cy, BracketExpr::psi(ex.clone(), ey)));
        }
    }
    out
}

/// `bracket_to_wheels` gives the same canonical output after a random
/// rewrite of the tree.
pub fn confluent<R: Rng>(rng: &mut R, e: &BracketExpr) -> bool {
    let direct = bracket_to_wheels(e).unwrap();
    let rewritten = rewrite(rng, e);
    combination_to_wheels(&rewritten).unwrap() == direct
}

/// `W(I)W(J) = (-1)^{(n-1)(m-1)} W(J)W(I)` after canonicalization.
pub fn product_commutation_holds(a: &Wheel, b: &Wheel) -> bool {
    use sqconf_core::wheels::WheelProduct;
    let (s1, p1) = WheelProduct::canonicalize(vec![a.clone(), b.clone()]).unwrap();
    let (s2, p2) = WheelProduct::canonicalize(vec![b.clone(), a.clone()]).unwrap();
    p1 == p2 && s1 == sign(a.degree() * b.degree()) * s2
}
