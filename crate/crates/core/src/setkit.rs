//! Subsets of `[n]` as 128-bit vectors, binomial coefficients and the
//! lexicographic order on `k`-subsets.
//!
//! Elements are 1-based: bit `i - 1` stores element `i`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{domain, resource, Result};
use crate::family::Family;

/// Largest ground set supported by the bit-vector encoding.
pub const MAX_N: usize = 128;

/// Default cap on the number of sets an enumeration may visit.
pub const DEFAULT_ENUM_BUDGET: u128 = 50_000_000;

/// Ground-set size `n` and member size `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Params {
    n: usize,
    k: usize,
}

impl Params {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return domain(format!("need 1 <= k <= n, got n={n}, k={k}"));
        }
        if n > MAX_N {
            return resource(format!("n={n} exceeds the supported width {MAX_N}"));
        }
        Ok(Params { n, k })
    }

    pub fn n(self) -> usize {
        self.n
    }

    pub fn k(self) -> usize {
        self.k
    }

    /// `C(n, k)`, the number of vertices of `KG(n, k)`.
    pub fn vertex_count(self) -> u128 {
        binom_u128(self.n, self.k)
    }

    pub(crate) fn require_kneser(self) -> Result<()> {
        if self.n < 2 * self.k {
            return domain(format!("need n >= 2k, got n={}, k={}", self.n, self.k));
        }
        Ok(())
    }
}

/// A finite subset of `[128]`, usually a `k`-set of some [`Params`].
///
/// `Ord` is the lexicographic order `A <_L B` iff the smallest element of the
/// symmetric difference lies in `A`; on sets of equal size this is the usual
/// lexicographic order of sorted tuples.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct KSet(u128);

impl KSet {
    pub const EMPTY: KSet = KSet(0);

    pub fn from_bits(bits: u128) -> Self {
        KSet(bits)
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(elements: I) -> Result<Self> {
        let mut bits = 0u128;
        for x in elements {
            if x == 0 || x > MAX_N {
                return domain(format!("element {x} outside 1..={MAX_N}"));
            }
            let b = 1u128 << (x - 1);
            if bits & b != 0 {
                return domain(format!("duplicate element {x}"));
            }
            bits |= b;
        }
        Ok(KSet(bits))
    }

    pub fn singleton(x: usize) -> Result<Self> {
        Self::from_elements([x])
    }

    /// Interval `[lo, hi]` (empty when `lo > hi`).
    pub fn interval(lo: usize, hi: usize) -> Result<Self> {
        Self::from_elements(lo..=hi)
    }

    pub fn bits(self) -> u128 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, x: usize) -> bool {
        (1..=MAX_N).contains(&x) && self.0 >> (x - 1) & 1 == 1
    }

    pub fn is_disjoint(self, other: KSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset(self, other: KSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersection(self, other: KSet) -> KSet {
        KSet(self.0 & other.0)
    }

    pub fn union(self, other: KSet) -> KSet {
        KSet(self.0 | other.0)
    }

    pub fn difference(self, other: KSet) -> KSet {
        KSet(self.0 & !other.0)
    }

    pub fn min_element(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize + 1)
    }

    pub fn max_element(self) -> Option<usize> {
        (self.0 != 0).then(|| 128 - self.0.leading_zeros() as usize)
    }

    /// Elements in increasing order.
    pub fn elements(self) -> Elements {
        Elements(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.elements().collect()
    }

    /// True if every element lies in `[n]`.
    pub fn within(self, n: usize) -> bool {
        self.max_element().map_or(true, |m| m <= n)
    }

    /// True if this is a `k`-subset of `[n]`.
    pub fn fits(self, p: Params) -> bool {
        self.len() == p.k && self.within(p.n)
    }

    /// Image under `perm`, where `perm[i - 1]` is the image of element `i`.
    pub fn relabel(self, perm: &[usize]) -> Result<KSet> {
        KSet::from_elements(self.elements().map(|x| perm.get(x - 1).copied().unwrap_or(0)))
    }
}

impl Ord for KSet {
    fn cmp(&self, other: &Self) -> Ordering {
        let diff = self.0 ^ other.0;
        if diff == 0 {
            Ordering::Equal
        } else if self.0 & (diff & diff.wrapping_neg()) != 0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

impl PartialOrd for KSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for KSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for KSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.elements().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

pub struct Elements(u128);

impl Iterator for Elements {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let x = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(x + 1)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let c = self.0.count_ones() as usize;
        (c, Some(c))
    }
}

impl ExactSizeIterator for Elements {}

fn pascal() -> &'static [Vec<u128>] {
    static TABLE: OnceLock<Vec<Vec<u128>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut rows: Vec<Vec<u128>> = Vec::with_capacity(MAX_N + 1);
        for a in 0..=MAX_N {
            let mut row = vec![0u128; a + 1];
            row[0] = 1;
            row[a] = 1;
            for b in 1..a {
                row[b] = rows[a - 1][b - 1] + rows[a - 1][b];
            }
            rows.push(row);
        }
        rows
    })
}

/// `C(a, b)` for `a <= 128` (every such value fits in 128 bits).
///
/// Panics if `a > 128`.
pub fn binom_u128(a: usize, b: usize) -> u128 {
    assert!(a <= MAX_N, "binom_u128 supports a <= {MAX_N}");
    if b > a {
        0
    } else {
        pascal()[a][b]
    }
}

/// Exact `C(a, b)` with `C(a, b) = 0` when `b < 0` or `b > a`.
///
/// A negative `a` with `b >= 0` is a domain error.
pub fn binom(a: i64, b: i64) -> Result<BigUint> {
    if b < 0 {
        return Ok(BigUint::zero());
    }
    if a < 0 {
        return domain(format!("binomial with negative top argument C({a},{b})"));
    }
    Ok(choose(a as u64, b as u64))
}

/// Exact `C(a, b)` for nonnegative arguments.
pub fn choose(a: u64, b: u64) -> BigUint {
    if b > a {
        return BigUint::zero();
    }
    if a as usize <= MAX_N {
        return BigUint::from(binom_u128(a as usize, b as usize));
    }
    let b = b.min(a - b);
    let mut acc = BigUint::one();
    for i in 0..b {
        acc *= a - i;
        acc /= i + 1;
    }
    acc
}

fn check_set(s: KSet, p: Params) -> Result<()> {
    if !s.fits(p) {
        return domain(format!("{s} is not a {}-subset of [{}]", p.k, p.n));
    }
    Ok(())
}

/// Position of `s` in the lexicographic order of all `k`-subsets of `[n]`.
pub fn lex_rank(s: KSet, p: Params) -> Result<u128> {
    check_set(s, p)?;
    let mut rank = 0u128;
    let mut prev = 0usize;
    for (i, a) in s.elements().enumerate() {
        let rest = p.k - i - 1;
        for j in prev + 1..a {
            rank += binom_u128(p.n - j, rest);
        }
        prev = a;
    }
    Ok(rank)
}

/// Inverse of [`lex_rank`].
pub fn lex_unrank(rank: u128, p: Params) -> Result<KSet> {
    let total = p.vertex_count();
    if rank >= total {
        return domain(format!("rank {rank} out of range 0..{total}"));
    }
    let mut r = rank;
    let mut bits = 0u128;
    let mut j = 1usize;
    for i in 0..p.k {
        let rest = p.k - i - 1;
        loop {
            let block = binom_u128(p.n - j, rest);
            if r < block {
                break;
            }
            r -= block;
            j += 1;
        }
        bits |= 1u128 << (j - 1);
        j += 1;
    }
    Ok(KSet(bits))
}

/// Iterator over `k`-subsets of `[n]` in lexicographic order.
#[derive(Clone, Debug)]
pub struct LexIter {
    n: usize,
    current: Vec<usize>,
    done: bool,
}

impl LexIter {
    /// Starts at the set of the given rank.
    pub fn from_rank(rank: u128, p: Params) -> Result<Self> {
        let start = lex_unrank(rank, p)?;
        Ok(LexIter {
            n: p.n,
            current: start.to_vec(),
            done: false,
        })
    }

    fn advance(&mut self) {
        let k = self.current.len();
        let n = self.n;
        let pos = (0..k).rev().find(|&i| self.current[i] < n - k + i + 1);
        match pos {
            None => self.done = true,
            Some(i) => {
                self.current[i] += 1;
                for j in i + 1..k {
                    self.current[j] = self.current[j - 1] + 1;
                }
            }
        }
    }
}

impl Iterator for LexIter {
    type Item = KSet;

    fn next(&mut self) -> Option<KSet> {
        if self.done {
            return None;
        }
        let bits = self
            .current
            .iter()
            .fold(0u128, |acc, &x| acc | 1u128 << (x - 1));
        self.advance();
        Some(KSet(bits))
    }
}

/// All `k`-subsets of `[n]` in lexicographic order.
pub fn enumerate_all(p: Params) -> Result<LexIter> {
    enumerate_all_within(p, DEFAULT_ENUM_BUDGET)
}

pub fn enumerate_all_within(p: Params, budget: u128) -> Result<LexIter> {
    let total = p.vertex_count();
    if total > budget {
        return resource(format!(
            "C({},{}) = {total} sets exceeds the enumeration budget {budget}",
            p.n, p.k
        ));
    }
    LexIter::from_rank(0, p)
}

/// The first `m` sets of the lexicographic order, `L(m)`.
pub fn lex_family(m: u128, p: Params) -> Result<Family> {
    let total = p.vertex_count();
    if m > total {
        return domain(format!("m={m} exceeds C({},{})={total}", p.n, p.k));
    }
    if m > DEFAULT_ENUM_BUDGET {
        return resource(format!("m={m} exceeds the enumeration budget"));
    }
    let members: Vec<KSet> = if m == 0 {
        Vec::new()
    } else {
        LexIter::from_rank(0, p)?.take(m as usize).collect()
    };
    Ok(Family::from_sorted_unchecked(p, members))
}

/// All `i`-subsets of the elements of `s`, as bit masks.
pub(crate) fn subsets_of_size(s: KSet, i: usize) -> Vec<u128> {
    let elems: Vec<u128> = s.elements().map(|x| 1u128 << (x - 1)).collect();
    let mut out = Vec::new();
    if i > elems.len() {
        return out;
    }
    let mut idx: Vec<usize> = (0..i).collect();
    loop {
        out.push(idx.iter().fold(0u128, |acc, &j| acc | elems[j]));
        let len = elems.len();
        let Some(pos) = (0..i).rev().find(|&t| idx[t] < len - i + t) else {
            break;
        };
        idx[pos] += 1;
        for t in pos + 1..i {
            idx[t] = idx[t - 1] + 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(xs: &[usize]) -> KSet {
        KSet::from_elements(xs.iter().copied()).unwrap()
    }

    #[test]
    fn binomial_conventions() {
        assert_eq!(binom(5, 2).unwrap(), BigUint::from(10u32));
        assert_eq!(binom(4, 5).unwrap(), BigUint::zero());
        assert_eq!(binom(7, 0).unwrap(), BigUint::one());
        assert_eq!(binom(3, -1).unwrap(), BigUint::zero());
        assert!(binom(-2, 1).is_err());
        assert_eq!(choose(200, 100).to_string(), "90548514656103281165404177077484163874504589675413336841320");
    }

    #[test]
    fn pascal_rule() {
        for a in 1..=200u64 {
            for b in 1..=a {
                assert_eq!(choose(a, b), choose(a - 1, b) + choose(a - 1, b - 1));
            }
        }
    }

    #[test]
    fn unrank_examples() {
        let p = Params::new(5, 2).unwrap();
        assert_eq!(lex_unrank(0, p).unwrap(), set(&[1, 2]));
        assert_eq!(lex_unrank(4, p).unwrap(), set(&[2, 3]));
        assert_eq!(lex_unrank(9, p).unwrap(), set(&[4, 5]));
        assert!(lex_unrank(10, p).is_err());
    }

    #[test]
    fn enumeration_counts() {
        let all: Vec<KSet> = enumerate_all(Params::new(4, 2).unwrap()).unwrap().collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], set(&[1, 2]));
        assert_eq!(all[5], set(&[3, 4]));
        assert_eq!(enumerate_all(Params::new(5, 2).unwrap()).unwrap().count(), 10);
        assert_eq!(enumerate_all(Params::new(10, 3).unwrap()).unwrap().count(), 120);
        assert!(enumerate_all(Params::new(100, 50).unwrap()).is_err());
    }

    #[test]
    fn enumeration_is_sorted_by_lex_order() {
        let p = Params::new(9, 4).unwrap();
        let all: Vec<KSet> = enumerate_all(p).unwrap().collect();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        for (r, s) in all.iter().enumerate() {
            assert_eq!(lex_rank(*s, p).unwrap(), r as u128);
        }
    }

    #[test]
    fn lex_family_examples() {
        let p = Params::new(5, 2).unwrap();
        let star = lex_family(4, p).unwrap();
        let expect: Vec<KSet> = [[1, 2], [1, 3], [1, 4], [1, 5]].iter().map(|s| set(s)).collect();
        assert_eq!(star.members(), &expect[..]);
        assert!(lex_family(0, p).unwrap().is_empty());
        let seven = lex_family(7, p).unwrap();
        let meets12: Vec<KSet> = enumerate_all(p)
            .unwrap()
            .filter(|s| !s.is_disjoint(set(&[1, 2])))
            .collect();
        assert_eq!(seven.members(), &meets12[..]);
        assert!(lex_family(11, p).is_err());
    }

    #[test]
    fn prefix_identity() {
        for n in 2..=10 {
            for k in 1..=n {
                let p = Params::new(n, k).unwrap();
                for l in 1..=n - k {
                    let m = binom_u128(n, k) - binom_u128(n - l, k);
                    let fam = lex_family(m, p).unwrap();
                    let head = KSet::interval(1, l).unwrap();
                    let expect: Vec<KSet> =
                        enumerate_all(p).unwrap().filter(|s| !s.is_disjoint(head)).collect();
                    assert_eq!(fam.members(), &expect[..], "n={n} k={k} l={l}");
                }
            }
        }
    }

    #[test]
    fn set_ops_and_display() {
        let a = set(&[1, 3, 5]);
        assert_eq!(a.to_string(), "{1,3,5}");
        assert_eq!(a.min_element(), Some(1));
        assert_eq!(a.max_element(), Some(5));
        assert!(a.contains(3) && !a.contains(2) && !a.contains(0));
        assert!(KSet::from_elements([1, 1]).is_err());
        assert!(KSet::from_elements([129]).is_err());
        assert_eq!(set(&[128]).max_element(), Some(128));
        assert_eq!(subsets_of_size(a, 2).len(), 3);
        assert_eq!(subsets_of_size(a, 0), vec![0]);
        assert!(Params::new(3, 4).is_err());
        assert!(Params::new(129, 2).is_err());
    }

    proptest! {
        #[test]
        fn rank_round_trip(n in 1usize..=40, kk in 1usize..=40, seed in any::<u64>()) {
            let k = 1 + kk % n;
            let p = Params::new(n, k).unwrap();
            let total = p.vertex_count();
            let r = (seed as u128) % total.min(1_000_000);
            let s = lex_unrank(r, p).unwrap();
            prop_assert!(s.fits(p));
            prop_assert_eq!(lex_rank(s, p).unwrap(), r);
        }

        #[test]
        fn lex_family_is_prefix(m in 0u128..56) {
            let p = Params::new(8, 3).unwrap();
            let a = lex_family(m, p).unwrap();
            let b = lex_family(m + 1, p).unwrap();
            prop_assert!(a.members().iter().all(|s| b.contains(*s)));
        }
    }
}
