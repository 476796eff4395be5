//! Injective words, the graded Lie bracket, and Lie-product bases.
//!
//! Words are duplicate-free sequences of positive labels. The boundary of a
//! word is the alternating sum of its letter deletions, with length-one words
//! mapping to the empty word (the augmentation). Lie polynomials are built
//! from the bracket `[A, B] = AB - (-1)^{|A||B|} BA`.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chain::{ChainComplex, SparseMatrix};
use crate::error::{Error, Result};

/// A word with pairwise distinct letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InjWord(Vec<u32>);

fn write_letters(f: &mut fmt::Formatter<'_>, letters: &[u32]) -> fmt::Result {
    let sep = if letters.iter().any(|&l| l >= 10) { "." } else { "" };
    for (i, l) in letters.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{l}")?;
    }
    Ok(())
}

impl InjWord {
    pub fn new(letters: Vec<u32>) -> Result<Self> {
        for (i, l) in letters.iter().enumerate() {
            if letters[..i].contains(l) {
                return Err(Error::invalid(format!("letter {l} repeated in word")));
            }
        }
        Ok(InjWord(letters))
    }

    pub fn empty() -> Self {
        InjWord(Vec::new())
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `AB`, or `None` when the words share a letter.
    pub fn concat(&self, other: &InjWord) -> Option<InjWord> {
        if self.0.iter().any(|l| other.0.contains(l)) {
            return None;
        }
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Some(InjWord(v))
    }
}

impl fmt::Display for InjWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("()");
        }
        write_letters(f, &self.0)
    }
}

/// An integer combination of injective words.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WordPolynomial {
    terms: BTreeMap<InjWord, i64>,
}

impl WordPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn word(w: InjWord) -> Self {
        Self::term(w, 1)
    }

    pub fn term(w: InjWord, coef: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(w, coef);
        p
    }

    /// The single letter `l` as a polynomial.
    pub fn letter(l: u32) -> Self {
        Self::word(InjWord(vec![l]))
    }

    pub fn from_letters(letters: &[u32]) -> Result<Self> {
        Ok(Self::word(InjWord::new(letters.to_vec())?))
    }

    pub fn add_term(&mut self, w: InjWord, coef: i64) {
        if coef == 0 {
            return;
        }
        match self.terms.entry(w) {
            Entry::Vacant(e) => {
                e.insert(coef);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coef;
                if *e.get() == 0 {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&InjWord, i64)> {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, w: &InjWord) -> i64 {
        self.terms.get(w).copied().unwrap_or(0)
    }

    /// Length of the longest word.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(InjWord::len).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut lens = self.terms.keys().map(InjWord::len);
        match lens.next() {
            None => true,
            Some(l) => lens.all(|m| m == l),
        }
    }

    /// Union of the letters appearing in any term.
    pub fn letters(&self) -> BTreeSet<u32> {
        self.terms.keys().flat_map(|w| w.0.iter().copied()).collect()
    }

    pub fn scale(&self, c: i64) -> Self {
        if c == 0 {
            return Self::zero();
        }
        WordPolynomial {
            terms: self.terms.iter().map(|(w, &v)| (w.clone(), v * c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1))
    }

    /// Concatenation product, extended bilinearly. Fails when a pair of
    /// terms shares a letter.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero();
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                let w = a
                    .concat(b)
                    .ok_or_else(|| Error::invalid(format!("words {a} and {b} share a letter")))?;
                out.add_term(w, ca * cb);
            }
        }
        Ok(out)
    }

    /// Linear extension of [`word_boundary`].
    pub fn boundary(&self) -> Self {
        let mut out = Self::zero();
        for (w, c) in self.terms() {
            for (f, s) in word_boundary(w).terms() {
                out.add_term(f.clone(), c * s);
            }
        }
        out
    }
}

impl fmt::Display for WordPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (w, c)) in self.terms().enumerate() {
            match (i, c < 0) {
                (0, false) => write!(f, "{c}*{w}")?,
                (0, true) => write!(f, "-{}*{w}", -c)?,
                (_, false) => write!(f, " + {c}*{w}")?,
                (_, true) => write!(f, " - {}*{w}", -c)?,
            }
        }
        Ok(())
    }
}

/// Alternating sum of letter deletions. A one-letter word maps to the empty
/// word; the empty word maps to zero.
pub fn word_boundary(w: &InjWord) -> WordPolynomial {
    let mut out = WordPolynomial::zero();
    for j in 0..w.len() {
        let mut v = w.0.clone();
        v.remove(j);
        out.add_term(InjWord(v), if j % 2 == 0 { 1 } else { -1 });
    }
    out
}

/// Graded bracket `[A, B] = AB - (-1)^{|A||B|} BA` of homogeneous
/// polynomials on disjoint letter sets.
pub fn lie_bracket(a: &WordPolynomial, b: &WordPolynomial) -> Result<WordPolynomial> {
    if !a.is_homogeneous() || !b.is_homogeneous() {
        return Err(Error::invalid("bracket arguments must be homogeneous"));
    }
    if !a.letters().is_disjoint(&b.letters()) {
        return Err(Error::invalid("bracket arguments share a letter"));
    }
    let sign = if (a.degree() * b.degree()).is_multiple_of(2) { -1 } else { 1 };
    Ok(a.concat(b)?.add(&b.concat(a)?.scale(sign)))
}

/// Left-normed bracket `[[..[s_0, s_1], ..], s_k]` of single letters.
pub fn left_normed(letters: &[u32]) -> Result<WordPolynomial> {
    let (first, rest) = letters
        .split_first()
        .ok_or_else(|| Error::invalid("left-normed bracket needs a letter"))?;
    let mut acc = WordPolynomial::letter(*first);
    for &l in rest {
        acc = lie_bracket(&acc, &WordPolynomial::letter(l))?;
    }
    Ok(acc)
}

/// A left-normed bracket over a letter set (a single letter when the set has
/// one element), with its word expansion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LieBasisElement {
    /// `(s_min, i_1, ..., i_k)`: the bracket `[[..[s_min, i_1]..], i_k]`.
    pub order: Vec<u32>,
    pub expansion: WordPolynomial,
}

impl LieBasisElement {
    pub fn new(order: Vec<u32>) -> Result<Self> {
        let expansion = left_normed(&order)?;
        Ok(LieBasisElement { order, expansion })
    }

    pub fn size(&self) -> usize {
        self.order.len()
    }

    pub fn letter_set(&self) -> Vec<u32> {
        let mut s = self.order.clone();
        s.sort_unstable();
        s
    }

    /// Key of the fixed total order on basis elements: block size ascending,
    /// then letter set, then the ordering tuple.
    pub fn order_key(&self) -> (usize, Vec<u32>, Vec<u32>) {
        (self.size(), self.letter_set(), self.order.clone())
    }
}

impl fmt::Display for LieBasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.order.as_slice() {
            [] => Ok(()),
            [l] => write!(f, "{l}"),
            [a, rest @ ..] => {
                for _ in 0..rest.len() {
                    f.write_str("[")?;
                }
                write!(f, "{a}")?;
                for l in rest {
                    write!(f, ",{l}]")?;
                }
                Ok(())
            }
        }
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

fn normalize_set(s: &[u32]) -> Result<Vec<u32>> {
    let mut v = s.to_vec();
    v.sort_unstable();
    v.dedup();
    if v.len() != s.len() {
        return Err(Error::invalid("label set has repeated labels"));
    }
    Ok(v)
}

/// Reutenauer's basis of the multilinear Lie polynomials on `s`: one
/// left-normed bracket anchored at `min(s)` per ordering of the rest.
pub fn reutenauer_basis(s: &[u32]) -> Result<Vec<LieBasisElement>> {
    let s = normalize_set(s)?;
    if s.len() < 2 {
        return Ok(Vec::new());
    }
    permutations(&s[1..])
        .into_iter()
        .map(|p| {
            let mut order = vec![s[0]];
            order.extend(p);
            LieBasisElement::new(order)
        })
        .collect()
}

/// All set partitions of `items`, blocks in order of their first element.
pub fn set_partitions(items: &[u32]) -> Vec<Vec<Vec<u32>>> {
    fn go(items: &[u32], i: usize, blocks: &mut Vec<Vec<u32>>, out: &mut Vec<Vec<Vec<u32>>>) {
        if i == items.len() {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(items[i]);
            go(items, i + 1, blocks, out);
            blocks[b].pop();
        }
        blocks.push(vec![items[i]]);
        go(items, i + 1, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    go(items, 0, &mut Vec::new(), &mut out);
    out
}

/// A product `P_1 P_2 ... P_m` of basis elements with `P_1 < ... < P_m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LieProduct {
    pub factors: Vec<LieBasisElement>,
    pub expansion: WordPolynomial,
}

impl LieProduct {
    /// Orders the factors by the fixed total order and multiplies them.
    pub fn new(mut factors: Vec<LieBasisElement>) -> Result<Self> {
        factors.sort_by_key(LieBasisElement::order_key);
        let mut expansion = WordPolynomial::word(InjWord::empty());
        for f in &factors {
            expansion = expansion.concat(&f.expansion)?;
        }
        Ok(LieProduct { factors, expansion })
    }

    fn key(&self) -> Vec<(usize, Vec<u32>, Vec<u32>)> {
        self.factors.iter().map(LieBasisElement::order_key).collect()
    }
}

impl fmt::Display for LieProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("()");
        }
        let sep = if self.factors.iter().any(|x| x.order.iter().any(|&l| l >= 10)) {
            "."
        } else {
            ""
        };
        for (i, x) in self.factors.iter().enumerate() {
            if i > 0 && x.size() == 1 && self.factors[i - 1].size() == 1 {
                f.write_str(sep)?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

fn products_over_partitions(t: &[u32], min_block: usize) -> Result<Vec<LieProduct>> {
    let t = normalize_set(t)?;
    let mut out = Vec::new();
    for partition in set_partitions(&t) {
        if partition.iter().any(|b| b.len() < min_block) {
            continue;
        }
        let choices: Vec<Vec<LieBasisElement>> = partition
            .iter()
            .map(|b| {
                if b.len() == 1 {
                    Ok(vec![LieBasisElement::new(b.clone())?])
                } else {
                    reutenauer_basis(b)
                }
            })
            .collect::<Result<_>>()?;
        let mut idx = vec![0usize; choices.len()];
        'outer: loop {
            let factors = idx.iter().zip(&choices).map(|(&i, c)| c[i].clone()).collect();
            out.push(LieProduct::new(factors)?);
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
    out.sort_by_key(LieProduct::key);
    Ok(out)
}

/// Basis of the span of injective words using every letter of `t` once:
/// products of Reutenauer elements and singletons over set partitions of `t`.
pub fn pi_basis(t: &[u32]) -> Result<Vec<LieProduct>> {
    if t.is_empty() {
        return Ok(vec![LieProduct::new(Vec::new())?]);
    }
    products_over_partitions(t, 1)
}

/// Union of [`pi_basis`] over all `(p+1)`-subsets of `{1, ..., n}`.
pub fn pi_basis_all(n: u32, p: usize) -> Result<Vec<LieProduct>> {
    let mut out = Vec::new();
    for subset in subsets(n, p + 1) {
        out.extend(pi_basis(&subset)?);
    }
    Ok(out)
}

/// All `k`-subsets of `{1, ..., n}` in lexicographic order.
pub fn subsets(n: u32, k: usize) -> Vec<Vec<u32>> {
    fn go(start: u32, n: u32, k: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..=n {
            cur.push(x);
            go(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, n, k, &mut Vec::new(), &mut out);
    out
}

/// Basis of the top homology of injective words on `{1, ..., m}` (r = 2) or
/// of its subspace spanned by products of Lie factors of degree at least `r`.
pub fn top_homology_basis(m: u32, r: usize) -> Result<Vec<LieProduct>> {
    if r < 2 {
        return Err(Error::invalid("factor degree bound must be at least 2"));
    }
    let letters: Vec<u32> = (1..=m).collect();
    if letters.is_empty() {
        return Ok(vec![LieProduct::new(Vec::new())?]);
    }
    products_over_partitions(&letters, r)
}

/// Augmented chain complex of injective words on `{1, ..., m}`: degree `j`
/// holds the words of length `j`, so its homology in degree `j` is the
/// reduced homology of the word complex in dimension `j - 1`.
pub fn injective_word_complex(m: u32) -> ChainComplex {
    let mut by_len: Vec<Vec<InjWord>> = vec![vec![InjWord::empty()]];
    for len in 1..=m as usize {
        let mut next = Vec::new();
        for w in &by_len[len - 1] {
            for l in 1..=m {
                if !w.0.contains(&l) {
                    let mut v = w.0.clone();
                    v.push(l);
                    next.push(InjWord(v));
                }
            }
        }
        next.sort();
        by_len.push(next);
    }
    let dims: Vec<usize> = by_len.iter().map(Vec::len).collect();
    let boundaries = (1..by_len.len())
        .map(|j| {
            let columns = by_len[j]
                .iter()
                .map(|w| {
                    let mut col: Vec<(u32, i64)> = word_boundary(w)
                        .terms()
                        .map(|(f, c)| (by_len[j - 1].binary_search(f).expect("face is a word") as u32, c))
                        .collect();
                    col.sort_unstable();
                    col
                })
                .collect();
            SparseMatrix::from_columns(dims[j - 1], columns)
        })
        .collect();
    ChainComplex::new(dims, boundaries).expect("word complex shapes are consistent")
}

/// Matrix whose columns are the given polynomials in the basis of words of
/// `support` (sorted). Fails if a polynomial uses a word outside `support`.
pub fn coefficient_matrix(polys: &[WordPolynomial], support: &[InjWord]) -> Result<SparseMatrix<i64>> {
    let columns = polys
        .iter()
        .map(|p| {
            p.terms()
                .map(|(w, c)| {
                    support
                        .binary_search(w)
                        .map(|r| (r as u32, c))
                        .map_err(|_| Error::invalid(format!("word {w} outside support")))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SparseMatrix::from_columns(support.len(), columns))
}

/// All injective words using each letter of `t` exactly once, sorted.
pub fn words_on(t: &[u32]) -> Vec<InjWord> {
    let mut v: Vec<InjWord> = permutations(t).into_iter().map(InjWord).collect();
    v.sort();
    v
}

/// Number of permutations of `m` letters without fixed points.
pub fn derangements(m: u32) -> u64 {
    let (mut a, mut b) = (1u64, 0u64);
    if m == 0 {
        return 1;
    }
    for k in 2..=m as u64 {
        let c = (k - 1) * (a + b);
        a = b;
        b = c;
    }
    b
}
