//! Families with small pairwise intersections.
//!
//! Two generators: Bernoulli sampling from a host family with rejection on
//! size and spread, and graphs of low-degree polynomials over a prime field
//! pushed into `[n]` by a seeded injection. Every output carries a spread
//! recomputed from all pairs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, precondition, resource, Result};
use crate::family::Family;
use crate::par::{self, Exec};
use crate::setkit::{KSet, LexIter, Params, DEFAULT_ENUM_BUDGET};

/// Largest number of polynomials `polynomial_spread` will enumerate.
pub const POLY_BUDGET: u64 = 1 << 20;

pub fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= x {
        if x % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Arithmetic modulo a prime `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    q: u64,
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self> {
        if !is_prime(q) {
            return domain(format!("{q} is not prime"));
        }
        if q > u32::MAX as u64 {
            return domain("modulus must fit in 32 bits");
        }
        Ok(PrimeField { q })
    }

    pub fn order(self) -> u64 {
        self.q
    }

    pub fn add(self, a: u64, b: u64) -> u64 {
        (a + b) % self.q
    }

    pub fn sub(self, a: u64, b: u64) -> u64 {
        (a + self.q - b % self.q) % self.q
    }

    pub fn mul(self, a: u64, b: u64) -> u64 {
        a * b % self.q
    }

    pub fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.q;
        a %= self.q;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by Fermat; `None` for zero.
    pub fn inv(self, a: u64) -> Option<u64> {
        (a % self.q != 0).then(|| self.pow(a, self.q - 2))
    }

    /// Horner evaluation; `coeffs[j]` multiplies `x^j`.
    pub fn eval(self, coeffs: &[u64], x: u64) -> u64 {
        coeffs.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }
}

/// Largest prime `q` with `k <= q` and `k q < n`.
pub fn spread_prime(n: usize, k: usize) -> Option<u64> {
    if k == 0 {
        return None;
    }
    let top = (n - 1) / k;
    (k..=top).rev().map(|q| q as u64).find(|&q| is_prime(q))
}

/// Largest intersection between two distinct members.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairwiseIntersection {
    pub value: usize,
    /// Lex-first pair attaining `value`; `None` when `|f| < 2`.
    pub witness: Option<(KSet, KSet)>,
}

pub fn max_pairwise_intersection(f: &Family) -> PairwiseIntersection {
    max_pairwise_intersection_with(f, Exec::default())
}

pub fn max_pairwise_intersection_with(f: &Family, exec: Exec) -> PairwiseIntersection {
    let m = f.members();
    let rows = par::map_range(exec, 0..m.len(), |i| {
        let mut best: Option<(usize, usize)> = None;
        for j in i + 1..m.len() {
            let v = m[i].intersection(m[j]).len();
            if best.is_none_or(|(b, _)| v > b) {
                best = Some((v, j));
            }
        }
        best
    });
    let mut out = PairwiseIntersection { value: 0, witness: None };
    for (i, row) in rows.into_iter().enumerate() {
        if let Some((v, j)) = row {
            if out.witness.is_none() || v > out.value {
                out = PairwiseIntersection { value: v, witness: Some((m[i], m[j])) };
            }
        }
    }
    out
}

/// Union of all pairwise intersections of distinct members.
pub fn intersection_union(f: &Family) -> KSet {
    let m = f.members();
    let mut acc = KSet::EMPTY;
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            acc = acc.union(m[i].intersection(m[j]));
        }
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpreadMode {
    MonteCarlo,
    Polynomial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpreadMeta {
    pub mode: SpreadMode,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub d: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub c: Option<u32>,
    pub spread: usize,
    /// Image of cell `(x, y)` at index `x q + y`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub phi: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub attempts: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpreadFamily {
    pub family: Family,
    pub spread: usize,
    pub meta: SpreadMeta,
}

impl SpreadFamily {
    fn certify(family: Family, mut meta: SpreadMeta) -> Self {
        let spread = max_pairwise_intersection(&family).value;
        meta.spread = spread;
        SpreadFamily { family, spread, meta }
    }
}

/// Size and spread of one rejected draw.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AttemptStat {
    pub size: usize,
    pub spread: usize,
}

#[derive(Clone, Debug)]
pub enum SpreadSample {
    Success(SpreadFamily),
    Exhausted {
        /// Closest miss: the largest-enough draw with the smallest spread.
        best: Option<SpreadFamily>,
        attempts: Vec<AttemptStat>,
        target_size: u128,
        max_spread: usize,
    },
}

fn floor_log2(k: usize) -> usize {
    (usize::BITS - 1 - k.leading_zeros()) as usize
}

/// Keeps each member of `g` independently with probability `2 k^c / |g|`
/// until the draw has at least `k^c` sets and spread at most `floor(log2 k)`.
pub fn sample_spread(g: &Family, c: u32, seed: u64, max_retries: usize) -> Result<SpreadSample> {
    let k = g.params().k();
    let target = (k as u128).checked_pow(c).filter(|t| t.checked_mul(2).is_some());
    let Some(target) = target else {
        return precondition("k^c overflows");
    };
    let size = g.len() as u128;
    if 2 * target > size {
        return precondition(format!("2k^c = {} exceeds |g| = {size}", 2 * target));
    }
    let max_spread = floor_log2(k);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attempts = Vec::new();
    let mut best: Option<SpreadFamily> = None;
    for attempt in 1..=max_retries {
        let picked: Vec<KSet> = g
            .iter()
            .copied()
            .filter(|_| (rng.gen_range(0..size)) < 2 * target)
            .collect();
        let family = Family::new(g.params(), picked)?;
        let meta = SpreadMeta {
            mode: SpreadMode::MonteCarlo,
            seed,
            q: None,
            d: None,
            c: Some(c),
            spread: 0,
            phi: None,
            attempts: Some(attempt),
        };
        let cand = SpreadFamily::certify(family, meta);
        let big_enough = cand.family.len() as u128 >= target;
        if big_enough && cand.spread <= max_spread {
            return Ok(SpreadSample::Success(cand));
        }
        attempts.push(AttemptStat { size: cand.family.len(), spread: cand.spread });
        let key = |s: &SpreadFamily| {
            let len = s.family.len();
            (len as u128 >= target, std::cmp::Reverse(s.spread), len)
        };
        if best.as_ref().is_none_or(|b| key(&cand) > key(b)) {
            best = Some(cand);
        }
    }
    Ok(SpreadSample::Exhausted { best, attempts, target_size: target, max_spread })
}

/// Graphs of all polynomials of degree at most `d` over `GF(q)` restricted
/// to `U = {0, ..., k-1}`, mapped into `[n]` by a seeded injection.
///
/// `q` is the largest prime with `k <= q` and `k q < n`. Needs `d < k`, since
/// otherwise distinct polynomials can agree on all of `U`.
pub fn polynomial_spread(p: Params, d: u32, seed: u64) -> Result<SpreadFamily> {
    let (n, k) = (p.n(), p.k());
    if d as usize >= k {
        return domain(format!("degree d={d} must be below k={k}"));
    }
    let Some(q) = spread_prime(n, k) else {
        return domain(format!("no prime q with {k} <= q and {k}q < {n}"));
    };
    let field = PrimeField::new(q)?;
    let count = (q as u128).pow(d + 1);
    if count > POLY_BUDGET as u128 {
        return resource(format!("q^(d+1) = {count} exceeds the budget {POLY_BUDGET}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ground: Vec<usize> = (1..=n).collect();
    ground.shuffle(&mut rng);
    let phi: Vec<usize> = ground[..k * q as usize].to_vec();
    let mut members = Vec::with_capacity(count as usize);
    let mut coeffs = vec![0u64; d as usize + 1];
    for idx in 0..count as u64 {
        let mut rest = idx;
        for c in coeffs.iter_mut() {
            *c = rest % q;
            rest /= q;
        }
        let mut bits = 0u128;
        for x in 0..k as u64 {
            let y = field.eval(&coeffs, x);
            bits |= 1u128 << (phi[(x * q + y) as usize] - 1);
        }
        members.push(KSet::from_bits(bits));
    }
    let family = Family::new(p, members)?;
    if family.len() as u128 != count {
        return domain("distinct polynomials produced identical sets");
    }
    let meta = SpreadMeta {
        mode: SpreadMode::Polynomial,
        seed,
        q: Some(q),
        d: Some(d),
        c: None,
        spread: 0,
        phi: Some(phi),
        attempts: None,
    };
    Ok(SpreadFamily::certify(family, meta))
}

/// Number of `k`-subsets of `[n]` meeting at least `l` members of `gprime`.
pub fn heavy_intersectors(gprime: &Family, l: usize) -> Result<u128> {
    heavy_intersectors_with(gprime, l, Exec::default())
}

pub fn heavy_intersectors_with(gprime: &Family, l: usize, exec: Exec) -> Result<u128> {
    const CHUNK: u128 = 1 << 14;
    let p = gprime.params();
    let total = p.vertex_count();
    if total > DEFAULT_ENUM_BUDGET {
        return resource(format!("C({},{}) = {total} exceeds the enumeration budget", p.n(), p.k()));
    }
    if l == 0 {
        return Ok(total);
    }
    if l > gprime.len() {
        return Ok(0);
    }
    let members = gprime.members();
    let chunks = total.div_ceil(CHUNK) as usize;
    let count = par::sum_range(exec, 0..chunks, |c| {
        let start = c as u128 * CHUNK;
        let take = CHUNK.min(total - start) as usize;
        LexIter::from_rank(start, p)
            .expect("rank below total")
            .take(take)
            .filter(|a| members.iter().filter(|b| !a.is_disjoint(**b)).take(l).count() >= l)
            .count() as u64
    });
    Ok(count as u128)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::make_star;
    use crate::setkit::enumerate_all;

    fn pr(n: usize, k: usize) -> Params {
        Params::new(n, k).unwrap()
    }

    fn brute_spread(f: &Family) -> usize {
        let m = f.members();
        let mut best = 0;
        for a in m {
            for b in m {
                if a != b {
                    best = best.max(a.to_vec().iter().filter(|x| b.contains(**x)).count());
                }
            }
        }
        best
    }

    #[test]
    fn field_axioms_sampled() {
        for q in [2u64, 3, 5, 7, 13, 31] {
            let f = PrimeField::new(q).unwrap();
            for a in 0..q {
                assert_eq!(f.add(a, f.sub(0, a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in 0..q {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(f.sub(f.add(a, b), b), a);
                }
            }
            assert_eq!(f.inv(0), None);
        }
        assert!(PrimeField::new(9).is_err());
    }

    #[test]
    fn prime_choice() {
        assert_eq!(spread_prime(16, 3), Some(5));
        assert_eq!(spread_prime(25, 3), Some(7));
        assert_eq!(spread_prime(9, 3), None);
        // k q < n, so q = 5 is excluded at n = 15.
        assert_eq!(spread_prime(15, 3), Some(3));
    }

    #[test]
    fn pairwise_examples() {
        let p = pr(9, 3);
        let f = Family::from_sets(p, &[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]).unwrap();
        let r = max_pairwise_intersection(&f);
        assert_eq!(r.value, 0);
        assert_eq!(intersection_union(&f), KSet::EMPTY);
        let star = make_star(1, pr(6, 2)).unwrap();
        assert!(intersection_union(&star).contains(1));
        let one = Family::from_sets(p, &[vec![1, 2, 3]]).unwrap();
        assert_eq!(max_pairwise_intersection(&one), PairwiseIntersection { value: 0, witness: None });
        let f = Family::from_sets(p, &[vec![1, 2, 3], vec![1, 2, 4], vec![3, 4, 5]]).unwrap();
        let r = max_pairwise_intersection_with(&f, Exec::Sequential);
        assert_eq!(r.value, 2);
        assert_eq!(r, max_pairwise_intersection_with(&f, Exec::Parallel));
        let (a, b) = r.witness.unwrap();
        assert_eq!((a.to_vec(), b.to_vec()), (vec![1, 2, 3], vec![1, 2, 4]));
    }

    #[test]
    fn polynomial_examples() {
        let s = polynomial_spread(pr(16, 3), 1, 7).unwrap();
        assert_eq!((s.family.len(), s.meta.q), (25, Some(5)));
        assert!(s.spread <= 1);
        assert_eq!(s.spread, brute_spread(&s.family));
        let s = polynomial_spread(pr(25, 3), 2, 7).unwrap();
        assert_eq!((s.family.len(), s.meta.q), (343, Some(7)));
        assert!(s.spread <= 2);
        assert!(polynomial_spread(pr(16, 3), 3, 0).is_err());
        assert!(polynomial_spread(pr(9, 3), 1, 0).is_err());
        let again = polynomial_spread(pr(25, 3), 2, 7).unwrap();
        assert_eq!(again, s);
    }

    #[test]
    fn sampling_examples() {
        let p = pr(20, 3);
        let g = Family::new(p, enumerate_all(p).unwrap()).unwrap();
        let SpreadSample::Success(s) = sample_spread(&g, 1, 11, 50).unwrap() else {
            panic!("expected success");
        };
        assert!(s.family.len() >= 3 && s.spread <= 1);
        assert_eq!(s.spread, brute_spread(&s.family));
        let SpreadSample::Success(t) = sample_spread(&g, 1, 11, 50).unwrap() else {
            panic!("expected success");
        };
        assert_eq!(s, t);
        let tiny = Family::from_sets(p, &[vec![1, 2, 3]]).unwrap();
        assert!(sample_spread(&tiny, 1, 0, 5).is_err());
    }

    #[test]
    fn exhaustion_is_reported() {
        // Any two members share {1,2,3}, above the allowed spread 2 for k = 4.
        let p = pr(12, 4);
        let g = Family::new(p, enumerate_all(p).unwrap().filter(|a| a.bits() & 7 == 7)).unwrap();
        assert_eq!(g.len(), 9);
        match sample_spread(&g, 1, 3, 20).unwrap() {
            SpreadSample::Exhausted { attempts, max_spread, target_size, best } => {
                assert_eq!((attempts.len(), max_spread, target_size), (20, 2, 4));
                let best = best.unwrap();
                assert!(best.family.len() >= 4 && best.spread == 3);
            }
            SpreadSample::Success(_) => panic!("cannot succeed"),
        }
    }

    #[test]
    fn heavy_examples() {
        let p = pr(10, 3);
        let g = Family::from_sets(p, &[vec![1, 2, 3], vec![4, 5, 6]]).unwrap();
        assert_eq!(heavy_intersectors(&g, 0).unwrap(), 120);
        assert_eq!(heavy_intersectors(&g, 3).unwrap(), 0);
        assert_eq!(heavy_intersectors(&g, 2).unwrap(), 54);
        assert_eq!(heavy_intersectors_with(&g, 1, Exec::Sequential).unwrap(), 120 - 4);
        let s = polynomial_spread(pr(16, 3), 1, 1).unwrap().family;
        let a = heavy_intersectors_with(&s, 3, Exec::Sequential).unwrap();
        let brute = enumerate_all(pr(16, 3))
            .unwrap()
            .filter(|x| s.iter().filter(|b| !x.is_disjoint(**b)).count() >= 3)
            .count() as u128;
        assert_eq!((a, heavy_intersectors_with(&s, 3, Exec::Parallel).unwrap()), (brute, brute));
    }

    #[test]
    fn intersections_only_through_union() {
        // Any set meeting two members of a spread family inside I meets them
        // through elements of I, so its I-part accounts for every such pair.
        let s = polynomial_spread(pr(16, 3), 1, 5).unwrap().family;
        let i = intersection_union(&s);
        for a in enumerate_all(pr(16, 3)).unwrap() {
            let via_i = s.iter().filter(|b| !b.intersection(i).is_disjoint(a)).count();
            let per_x: usize = a
                .intersection(i)
                .elements()
                .map(|x| s.iter().filter(|b| b.contains(x)).count())
                .sum();
            assert!(via_i <= per_x);
        }
    }
}
