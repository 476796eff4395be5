//! Wheel bases for the homology of ordered configurations of points in the
//! plane.
//!
//! A wheel `W(i_1, ..., i_m)` with `i_1` minimal has degree `m - 1` and is
//! modeled by the left-normed Lie word `[[..[i_1, i_2]..], i_m]`; the Browder
//! bracket of two classes is the graded word bracket. Products of wheels on
//! disjoint labels are graded commutative with the sign `(-1)^{(n-1)(m-1)}`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{left_normed, lie_bracket, set_partitions, InjWord, WordPolynomial};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Wheel {
    spokes: Vec<u32>,
}

impl Wheel {
    /// A wheel; the first spoke must be the smallest label.
    pub fn new(spokes: Vec<u32>) -> Result<Self> {
        let Some(&first) = spokes.first() else {
            return Err(Error::invalid("a wheel needs at least one spoke"));
        };
        if spokes[1..].iter().any(|&s| s <= first) {
            return Err(Error::invalid(format!(
                "first spoke {first} must be smaller than the others in {spokes:?}"
            )));
        }
        WordPolynomial::from_letters(&spokes)?;
        Ok(Wheel { spokes })
    }

    pub fn spokes(&self) -> &[u32] {
        &self.spokes
    }

    pub fn size(&self) -> usize {
        self.spokes.len()
    }

    pub fn degree(&self) -> usize {
        self.spokes.len() - 1
    }

    pub fn first(&self) -> u32 {
        self.spokes[0]
    }

    /// The left-normed Lie word representing this wheel.
    pub fn lie_word(&self) -> WordPolynomial {
        left_normed(&self.spokes).expect("wheel spokes are distinct")
    }
}

impl fmt::Display for Wheel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("W(")?;
        for (i, s) in self.spokes.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str(")")
    }
}

/// A product of wheels in canonical order: sizes weakly decreasing, equal
/// sizes by strictly decreasing first spoke.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WheelProduct {
    factors: Vec<Wheel>,
}

fn canonical_before(a: &Wheel, b: &Wheel) -> bool {
    a.size() > b.size() || (a.size() == b.size() && a.first() > b.first())
}

impl WheelProduct {
    /// Sorts the factors into canonical order, returning the Koszul sign
    /// accumulated over adjacent transpositions.
    pub fn canonicalize(mut factors: Vec<Wheel>) -> Result<(i64, WheelProduct)> {
        for (i, a) in factors.iter().enumerate() {
            for b in &factors[..i] {
                if a.spokes.iter().any(|s| b.spokes.contains(s)) {
                    return Err(Error::invalid(format!("wheels {a} and {b} share a label")));
                }
            }
        }
        let mut sign = 1i64;
        for i in 1..factors.len() {
            let mut j = i;
            while j > 0 && canonical_before(&factors[j], &factors[j - 1]) {
                if factors[j].degree() % 2 == 1 && factors[j - 1].degree() % 2 == 1 {
                    sign = -sign;
                }
                factors.swap(j, j - 1);
                j -= 1;
            }
        }
        Ok((sign, WheelProduct { factors }))
    }

    pub fn factors(&self) -> &[Wheel] {
        &self.factors
    }

    pub fn degree(&self) -> usize {
        self.factors.iter().map(Wheel::degree).sum()
    }

    /// True when every factor has at least `s` spokes.
    pub fn min_size_at_least(&self, s: usize) -> bool {
        self.factors.iter().all(|w| w.size() >= s)
    }
}

impl fmt::Display for WheelProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for w in &self.factors {
            write!(f, "{w}")?;
        }
        Ok(())
    }
}

/// Integer combination of wheel products.
pub type WheelCombination = BTreeMap<WheelProduct, i64>;

fn add_to(comb: &mut WheelCombination, p: WheelProduct, c: i64) {
    let slot = comb.entry(p.clone()).or_insert(0);
    *slot += c;
    if *slot == 0 {
        comb.remove(&p);
    }
}

fn permutations(items: &[u32]) -> Vec<Vec<u32>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// All canonical wheel products on exactly `{1, ..., n}` of degree `k`.
pub fn enumerate_wheel_basis(n: u32, k: usize) -> Vec<WheelProduct> {
    if k >= n.max(1) as usize {
        return Vec::new();
    }
    let labels: Vec<u32> = (1..=n).collect();
    let blocks = n as usize - k;
    let mut out = Vec::new();
    for partition in set_partitions(&labels) {
        if partition.len() != blocks {
            continue;
        }
        let choices: Vec<Vec<Wheel>> = partition
            .iter()
            .map(|b| {
                permutations(&b[1..])
                    .into_iter()
                    .map(|p| {
                        let mut s = vec![b[0]];
                        s.extend(p);
                        Wheel { spokes: s }
                    })
                    .collect()
            })
            .collect();
        let mut idx = vec![0usize; choices.len()];
        'outer: loop {
            let factors = idx.iter().zip(&choices).map(|(&i, c)| c[i].clone()).collect();
            let (_, prod) = WheelProduct::canonicalize(factors).expect("blocks are disjoint");
            out.push(prod);
            for pos in (0..idx.len()).rev() {
                idx[pos] += 1;
                if idx[pos] < choices[pos].len() {
                    continue 'outer;
                }
                idx[pos] = 0;
            }
            break;
        }
    }
    out.sort();
    out
}

/// `e_k(1, 2, ..., n-1)`, the number of canonical wheel products of degree
/// `k` on `n` labels.
pub fn betti_fn(n: u32, k: usize) -> u64 {
    // e[j] after processing 1..=i
    let mut e = vec![0u64; k + 1];
    e[0] = 1;
    for i in 1..n as u64 {
        for j in (1..=k).rev() {
            e[j] = e[j]
                .checked_add(e[j - 1].checked_mul(i).expect("betti number overflows u64"))
                .expect("betti number overflows u64");
        }
    }
    e[k]
}

/// Sub-basis of products whose factors all have at least `r + 1` spokes.
pub fn ar_reduced_basis(n: u32, k: usize, r: usize) -> Vec<WheelProduct> {
    enumerate_wheel_basis(n, k)
        .into_iter()
        .filter(|p| p.min_size_at_least(r + 1))
        .collect()
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

/// Number of set partitions of `m` labels into `blocks` blocks, each of size
/// at least `min_size`, weighted by `prod (size - 1)!`.
pub fn weighted_partition_count(m: u64, blocks: u64, min_size: u64) -> u64 {
    if m == 0 {
        return u64::from(blocks == 0);
    }
    if blocks == 0 {
        return 0;
    }
    // the block containing the smallest label has size s
    (min_size.max(1)..=m)
        .map(|s| {
            binomial(m - 1, s - 1) * factorial(s - 1) * weighted_partition_count(m - s, blocks - 1, min_size)
        })
        .sum()
}

/// Size of the degree-`r` top homology basis on `m` letters.
pub fn top_basis_count(m: u64, r: u64) -> u64 {
    let r = r.max(2);
    (0..=m).map(|b| weighted_partition_count(m, b, r)).sum()
}

/// Predicted rank of `E^r_{p,q}` for configurations of `n` points in the
/// plane: `C(n, p+1) * |ar_reduced(n-p-1, q, r-1)| * |T^r_{p+1}|`.
pub fn er_entry_rank(n: u32, p: i64, q: usize, r: usize) -> u64 {
    if p < -1 || p + 1 > n as i64 {
        return 0;
    }
    let n = n as u64;
    let used = (p + 1) as u64;
    let rest = n - used;
    let Some(blocks) = rest.checked_sub(q as u64) else {
        return 0;
    };
    let reduced = if rest == 0 {
        u64::from(q == 0)
    } else {
        weighted_partition_count(rest, blocks, r as u64)
    };
    binomial(n, used) * reduced * top_basis_count(used, r as u64)
}

/// Expression built from wheels by Browder brackets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BracketExpr {
    Leaf(Wheel),
    Bracket(Box<BracketExpr>, Box<BracketExpr>),
}

impl BracketExpr {
    pub fn leaf(spokes: &[u32]) -> Result<Self> {
        Ok(BracketExpr::Leaf(Wheel::new(spokes.to_vec())?))
    }

    pub fn psi(a: BracketExpr, b: BracketExpr) -> Self {
        BracketExpr::Bracket(Box::new(a), Box::new(b))
    }

    /// Total number of labels in the leaves.
    pub fn size(&self) -> usize {
        match self {
            BracketExpr::Leaf(w) => w.size(),
            BracketExpr::Bracket(a, b) => a.size() + b.size(),
        }
    }

    pub fn labels(&self) -> Vec<u32> {
        match self {
            BracketExpr::Leaf(w) => w.spokes.clone(),
            BracketExpr::Bracket(a, b) => {
                let mut v = a.labels();
                v.extend(b.labels());
                v
            }
        }
    }

    /// Word-polynomial value of the expression.
    pub fn evaluate(&self) -> Result<WordPolynomial> {
        match self {
            BracketExpr::Leaf(w) => Ok(w.lie_word()),
            BracketExpr::Bracket(a, b) => lie_bracket(&a.evaluate()?, &b.evaluate()?),
        }
    }
}

impl fmt::Display for BracketExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BracketExpr::Leaf(w) => write!(f, "{w}"),
            BracketExpr::Bracket(a, b) => write!(f, "psi({a}, {b})"),
        }
    }
}

/// Rewrites a Lie word polynomial on the letter set `labels` in the wheel
/// basis, failing if it is not in the span of the wheels.
pub fn lie_word_to_wheels(poly: &WordPolynomial, labels: &[u32]) -> Result<WheelCombination> {
    let mut labels = labels.to_vec();
    labels.sort_unstable();
    let mut out = WheelCombination::new();
    if poly.is_zero() {
        return Ok(out);
    }
    let (&first, rest) = labels
        .split_first()
        .ok_or_else(|| Error::invalid("empty label set"))?;
    // the wheel W(first, s) is the only basis word polynomial containing the
    // word (first, s)
    let mut check = WordPolynomial::zero();
    for perm in permutations(rest) {
        let mut spokes = vec![first];
        spokes.extend(perm);
        let c = poly.coefficient(&InjWord::new(spokes.clone())?);
        if c != 0 {
            let w = Wheel { spokes };
            check = check.add(&w.lie_word().scale(c));
            add_to(&mut out, WheelProduct { factors: vec![w] }, c);
        }
    }
    if check != *poly {
        return Err(Error::Inconsistent(format!(
            "polynomial is not a combination of wheels on {labels:?}"
        )));
    }
    Ok(out)
}

/// Rewrites an iterated Browder bracket of wheels in the wheel basis.
pub fn bracket_to_wheels(e: &BracketExpr) -> Result<WheelCombination> {
    let labels = e.labels();
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::invalid(format!("label {l} appears in two leaves")));
        }
    }
    lie_word_to_wheels(&e.evaluate()?, &labels)
}

/// Rewrites an integer combination of bracket expressions.
pub fn combination_to_wheels(terms: &[(i64, BracketExpr)]) -> Result<WheelCombination> {
    let mut out = WheelCombination::new();
    for (c, e) in terms {
        for (p, v) in bracket_to_wheels(e)? {
            add_to(&mut out, p, c * v);
        }
    }
    Ok(out)
}

/// Text form of a wheel combination, terms in canonical order.
pub fn format_combination(comb: &WheelCombination) -> String {
    if comb.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (p, &c)) in comb.iter().enumerate() {
        let sign = if c < 0 { "-" } else { "+" };
        if i == 0 {
            if c < 0 {
                s.push('-');
            }
        } else {
            s.push_str(&format!(" {sign} "));
        }
        s.push_str(&format!("{}*{p}", c.abs()));
    }
    s
}
