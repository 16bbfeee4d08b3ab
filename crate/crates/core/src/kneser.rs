//! Statistics of the subgraph of `KG(n, k)` induced on a family.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;

use crate::error::{domain, Result};
use crate::family::Family;
use crate::par::{self, Exec};
use crate::setkit::{binom_u128, subsets_of_size, KSet, Params};
use crate::Rational;

/// Degrees of all members of a family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeProfile {
    /// `degrees[j]` belongs to `family.members()[j]`.
    pub degrees: Vec<usize>,
    pub max: usize,
    /// Lexicographically first member of maximum degree.
    pub witness: KSet,
    pub histogram: BTreeMap<usize, usize>,
}

/// `c(i)`: the largest number of members through an `i`-set, normalised by
/// `C(n - i, k - i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CProfile {
    pub i: usize,
    /// `|F(P)|` for the witness.
    pub count: usize,
    pub value: Rational,
    /// Lexicographically first `i`-set attaining the maximum.
    pub witness: KSet,
}

/// `F(P)` (members through `P` with `P` removed) and `F(P̄)` (members avoiding `P`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restriction {
    pub through: Family,
    pub avoiding: Family,
}

/// Result of the covering-number search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    pub size: usize,
    /// Lexicographically first minimum cover.
    pub witness: KSet,
    /// Set when the family was empty and `τ = 0` holds by convention.
    pub empty_family: bool,
}

fn check_compatible(f: &Family, a: KSet) -> Result<()> {
    if !a.within(f.params().n()) {
        return domain(format!("{a} is not a subset of [{}]", f.params().n()));
    }
    Ok(())
}

fn disjoint_count(members: &[KSet], a: KSet) -> usize {
    members.iter().filter(|b| b.is_disjoint(a)).count()
}

/// Number of members disjoint from `a`; `a` need not belong to `f`.
pub fn degree(f: &Family, a: KSet) -> Result<usize> {
    check_compatible(f, a)?;
    Ok(disjoint_count(f.members(), a))
}

pub fn max_degree(f: &Family) -> Result<DegreeProfile> {
    max_degree_with(f, Exec::default())
}

pub fn max_degree_with(f: &Family, exec: Exec) -> Result<DegreeProfile> {
    if f.is_empty() {
        return domain("maximum degree of an empty family");
    }
    let members = f.members();
    let degrees = par::map(exec, members, |&a| disjoint_count(members, a));
    let mut max = 0;
    let mut at = 0;
    for (j, &d) in degrees.iter().enumerate() {
        if d > max {
            max = d;
            at = j;
        }
    }
    let mut histogram = BTreeMap::new();
    for &d in &degrees {
        *histogram.entry(d).or_insert(0) += 1;
    }
    Ok(DegreeProfile {
        degrees,
        max,
        witness: members[at],
        histogram,
    })
}

/// Number of disjoint pairs in `f`.
pub fn edge_count(f: &Family) -> u64 {
    edge_count_with(f, Exec::default())
}

pub fn edge_count_with(f: &Family, exec: Exec) -> u64 {
    let m = f.members();
    par::sum_range(exec, 0..m.len(), |i| {
        let a = m[i];
        m[i + 1..].iter().filter(|b| b.is_disjoint(a)).count() as u64
    })
}

/// Number of ordered pairs `(g, h)` with `g ∈ left`, `h ∈ right` and `g ∩ h = ∅`.
pub fn cross_disjoint_pairs(left: &[KSet], right: &[KSet]) -> u64 {
    left.iter().map(|&g| disjoint_count(right, g) as u64).sum()
}

pub fn is_intersecting(f: &Family) -> bool {
    is_intersecting_with(f, Exec::default())
}

pub fn is_intersecting_with(f: &Family, exec: Exec) -> bool {
    let m = f.members();
    !par::any(exec, m, |i, &a| m[i + 1..].iter().any(|b| b.is_disjoint(a)))
}

/// `F(P̄) = {F ∈ f : F ∩ P = ∅}`.
pub fn restrict_avoiding(f: &Family, p: KSet) -> Result<Family> {
    check_compatible(f, p)?;
    if p.is_empty() {
        return domain("restriction to an empty set");
    }
    let members = f.iter().copied().filter(|s| s.is_disjoint(p)).collect();
    Ok(Family::from_sorted_unchecked(f.params(), members))
}

/// `F(P) = {F \ P : P ⊂ F ∈ f}`, a family of `(k - |P|)`-sets.
pub fn restrict_through(f: &Family, p: KSet) -> Result<Family> {
    check_compatible(f, p)?;
    let (n, k) = (f.params().n(), f.params().k());
    if p.is_empty() || p.len() >= k {
        return domain(format!("need 1 <= |P| < k, got |P|={} with k={k}", p.len()));
    }
    let params = Params::new(n, k - p.len())?;
    // Removing a common subset keeps the lexicographic order.
    let members = f
        .iter()
        .filter(|s| p.is_subset(**s))
        .map(|s| s.difference(p))
        .collect();
    Ok(Family::from_sorted_unchecked(params, members))
}

pub fn restrict(f: &Family, p: KSet) -> Result<Restriction> {
    Ok(Restriction {
        through: restrict_through(f, p)?,
        avoiding: restrict_avoiding(f, p)?,
    })
}

/// `|F(x)|` for every element; index 0 is unused.
pub fn element_counts(f: &Family) -> Vec<usize> {
    let mut counts = vec![0usize; f.params().n() + 1];
    for s in f {
        for x in s.elements() {
            counts[x] += 1;
        }
    }
    counts
}

/// `c(i)` for `1 <= i <= k`.
///
/// Only `i`-sets contained in some member can have a positive count, so the
/// scan expands the `i`-subsets of each member instead of all of `C([n], i)`.
pub fn c_profile(f: &Family, i: usize) -> Result<CProfile> {
    let p = f.params();
    if i == 0 || i > p.k() {
        return domain(format!("need 1 <= i <= k, got i={i} with k={}", p.k()));
    }
    if f.is_empty() {
        return domain("c(i) of an empty family");
    }
    let mut counts: HashMap<u128, usize> = HashMap::new();
    for s in f {
        for sub in subsets_of_size(*s, i) {
            *counts.entry(sub).or_insert(0) += 1;
        }
    }
    let (witness, count) = counts
        .into_iter()
        .map(|(b, c)| (KSet::from_bits(b), c))
        .max_by(|(a, ca), (b, cb)| ca.cmp(cb).then(b.cmp(a)))
        .expect("nonempty family has subsets");
    let denom = binom_u128(p.n() - i, p.k() - i);
    Ok(CProfile {
        i,
        count,
        value: Rational::new(BigInt::from(count), BigInt::from(denom)),
        witness,
    })
}

/// Covering number `τ(f)`: the smallest `|S|` meeting every member.
///
/// Iterative deepening over `|S|`; each round is a depth-first search that
/// adds elements in increasing order, so the first cover found at the
/// minimum size is the lexicographically first one.
pub fn covering_number(f: &Family) -> Cover {
    if f.is_empty() {
        return Cover {
            size: 0,
            witness: KSet::EMPTY,
            empty_family: true,
        };
    }
    let members: Vec<u128> = f.iter().map(|s| s.bits()).collect();
    let n = f.params().n();
    for t in 1..=n {
        if let Some(bits) = cover_dfs(&members, 0, 1, t, n) {
            return Cover {
                size: t,
                witness: KSet::from_bits(bits),
                empty_family: false,
            };
        }
    }
    unreachable!("[n] covers every nonempty k-set")
}

fn cover_dfs(uncovered: &[u128], chosen: u128, lo: usize, slots: usize, n: usize) -> Option<u128> {
    if uncovered.is_empty() {
        return Some(chosen);
    }
    if slots == 0 || lo > n {
        return None;
    }
    let allowed = !0u128 << (lo - 1);
    // Later picks only get larger, so the next pick must not exceed the
    // largest usable element of any uncovered member.
    let mut hi = n;
    let mut useful = 0u128;
    for &m in uncovered {
        let usable = m & allowed;
        if usable == 0 {
            return None;
        }
        hi = hi.min(128 - usable.leading_zeros() as usize);
        useful |= usable;
    }
    // Pairwise disjoint uncovered members each need their own element.
    let mut packed = 0u128;
    let mut need = 0usize;
    for &m in uncovered {
        let usable = m & allowed;
        if usable & packed == 0 {
            packed |= usable;
            need += 1;
            if need > slots {
                return None;
            }
        }
    }
    for e in lo..=hi {
        let b = 1u128 << (e - 1);
        if useful & b == 0 {
            continue;
        }
        let rest: Vec<u128> = uncovered.iter().copied().filter(|m| m & b == 0).collect();
        if let Some(found) = cover_dfs(&rest, chosen | b, e + 1, slots - 1, n) {
            return Some(found);
        }
    }
    None
}
