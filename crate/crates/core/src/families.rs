//! Constructors for the named extremal families.
//!
//! Distinguished elements sit at fixed coordinates (`x`, `1`, `2`, intervals
//! starting at `2` or `3`); use [`Family::relabel`] to move them.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, resource, Result};
use crate::family::Family;
use crate::kneser::is_intersecting_with;
use crate::par::Exec;
use crate::setkit::{binom_u128, enumerate_all, lex_unrank, KSet, Params, DEFAULT_ENUM_BUDGET};

/// Attempts allowed when resampling for a non-intersecting random family.
pub const RESAMPLE_BUDGET: usize = 10_000;

fn filtered<P: Fn(KSet) -> bool>(p: Params, keep: P) -> Result<Family> {
    let members = enumerate_all(p)?.filter(|&s| keep(s)).collect();
    Ok(Family::from_sorted_unchecked(p, members))
}

fn check_element(x: usize, p: Params) -> Result<()> {
    if x == 0 || x > p.n() {
        return domain(format!("element {x} outside [1, {}]", p.n()));
    }
    Ok(())
}

fn check_kset(s: KSet, p: Params, what: &str) -> Result<()> {
    if !s.fits(p) {
        return domain(format!("{what} {s} is not a {}-subset of [{}]", p.k(), p.n()));
    }
    Ok(())
}

/// The star `S_x`: all `k`-sets containing `x`.
pub fn make_star(x: usize, p: Params) -> Result<Family> {
    check_element(x, p)?;
    filtered(p, |s| s.contains(x))
}

/// `S⁺ = S_x ∪ {t}` with `x ∉ t`.
pub fn make_star_plus(x: usize, t: KSet, p: Params) -> Result<Family> {
    check_element(x, p)?;
    check_kset(t, p, "extra set")?;
    if t.contains(x) {
        return domain(format!("{x} must not lie in the extra set {t}"));
    }
    filtered(p, |s| s.contains(x) || s == t)
}

/// Hilton-Milner family `H(x, f0) = {f0} ∪ {A : x ∈ A, A ∩ f0 ≠ ∅}`.
pub fn make_hilton_milner(x: usize, f0: KSet, p: Params) -> Result<Family> {
    check_element(x, p)?;
    check_kset(f0, p, "base set")?;
    if f0.contains(x) {
        return domain(format!("{x} must not lie in {f0}"));
    }
    filtered(p, |s| s == f0 || (s.contains(x) && !s.is_disjoint(f0)))
}

/// `D = H(x, f0) ∪ {fprime}` where `x ∈ fprime` and `fprime ∩ f0 = ∅`.
/// Its only edge is `{f0, fprime}`.
pub fn make_d(x: usize, f0: KSet, fprime: KSet, p: Params) -> Result<Family> {
    check_kset(fprime, p, "extra set")?;
    if !fprime.contains(x) {
        return domain(format!("{fprime} must contain {x}"));
    }
    if !fprime.is_disjoint(f0) {
        return domain(format!("{fprime} must be disjoint from {f0}"));
    }
    let hm = make_hilton_milner(x, f0, p)?;
    Family::new(p, hm.iter().copied().chain([fprime]))
}

/// `D` at canonical coordinates: `x = 1`, `f0 = [2, k+1]`, `fprime = {1} ∪ [k+2, 2k]`.
pub fn make_d_canonical(p: Params) -> Result<Family> {
    let k = p.k();
    if p.n() < 2 * k + 1 {
        return domain(format!("D needs n >= 2k+1, got n={}, k={k}", p.n()));
    }
    let f0 = KSet::interval(2, k + 1)?;
    let fprime = KSet::singleton(1)?.union(KSet::interval(k + 2, 2 * k)?);
    make_d(1, f0, fprime, p)
}

/// `E_i = {F : 1 ∈ F, F ∩ [2, k+i+1] ≠ ∅} ∪ C([2, k+i+1], k)`.
pub fn make_e(i: usize, p: Params) -> Result<Family> {
    let k = p.k();
    if i == 0 || k + i + 1 > p.n() {
        return domain(format!("E_i needs 1 <= i and k+i+1 <= n, got i={i}"));
    }
    let y = KSet::interval(2, k + i + 1)?;
    filtered(p, |s| (s.contains(1) && !s.is_disjoint(y)) || s.is_subset(y))
}

/// `W_l`: sets containing `{1,2}`, plus sets meeting `{1,2}` in one element
/// and meeting `[3, l+2]`.
pub fn make_w(l: usize, p: Params) -> Result<Family> {
    if l == 0 || l + 2 > p.n() {
        return domain(format!("W_l needs 1 <= l and l+2 <= n, got l={l}"));
    }
    let pair = KSet::interval(1, 2)?;
    let block = KSet::interval(3, l + 2)?;
    filtered(p, |s| match s.intersection(pair).len() {
        2 => true,
        1 => !s.is_disjoint(block),
        _ => false,
    })
}

/// `W'_{l'}`: sets meeting `[3, l+2]` in at least `l'` elements.
pub fn make_w_prime(l: usize, lp: usize, p: Params) -> Result<Family> {
    if l == 0 || l + 2 > p.n() {
        return domain(format!("W'_l needs 1 <= l and l+2 <= n, got l={l}"));
    }
    if lp == 0 || lp > l.min(p.k()) {
        return domain(format!("need 1 <= l' <= min(l, k), got l'={lp}"));
    }
    let block = KSet::interval(3, l + 2)?;
    filtered(p, |s| s.intersection(block).len() >= lp)
}

/// The tightness family `G_s`: sets containing `{1,2}`, plus sets meeting
/// `{1,2}` in exactly one element and `[3, s+2]` in exactly one element.
pub fn make_tightness_g(s: usize, p: Params) -> Result<Family> {
    let (n, k) = (p.n(), p.k());
    if s < 2 || s + 2 > n || k < 2 || n - s - 2 < k - 2 {
        return domain(format!(
            "G_s needs s >= 2, k >= 2, s+2 <= n and n-s-2 >= k-2, got n={n}, k={k}, s={s}"
        ));
    }
    let pair = KSet::interval(1, 2)?;
    let block = KSet::interval(3, s + 2)?;
    filtered(p, |a| match a.intersection(pair).len() {
        2 => true,
        1 => a.intersection(block).len() == 1,
        _ => false,
    })
}

/// Uniform sample of `m` distinct `k`-sets, reproducible from `seed`.
///
/// Draws `m` distinct lexicographic ranks with rand's index sampler on a
/// `ChaCha8Rng` seeded by `seed` and unranks them. With
/// `require_non_intersecting` the draw is repeated (continuing the same
/// stream) until the family has a disjoint pair.
pub fn make_random(m: usize, p: Params, seed: u64, require_non_intersecting: bool) -> Result<Family> {
    let total = p.vertex_count();
    if m as u128 > total {
        return domain(format!("m={m} exceeds C({},{})={total}", p.n(), p.k()));
    }
    if total > DEFAULT_ENUM_BUDGET {
        return resource(format!("C({},{}) exceeds the sampling budget", p.n(), p.k()));
    }
    if require_non_intersecting && (m < 2 || p.n() < 2 * p.k()) {
        return domain("no non-intersecting family exists for these parameters");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let attempts = if require_non_intersecting { RESAMPLE_BUDGET } else { 1 };
    for _ in 0..attempts {
        let members = index::sample(&mut rng, total as usize, m)
            .into_iter()
            .map(|r| lex_unrank(r as u128, p))
            .collect::<Result<Vec<_>>>()?;
        let f = Family::new(p, members)?;
        if !require_non_intersecting || !is_intersecting_with(&f, Exec::Sequential) {
            return Ok(f);
        }
    }
    resource(format!(
        "no non-intersecting sample of size {m} in {RESAMPLE_BUDGET} attempts"
    ))
}

/// Closed-form sizes of the constructions, for cross-checking.
pub mod sizes {
    use super::*;

    fn c(a: isize, b: isize) -> u128 {
        if a < 0 || b < 0 || b > a {
            0
        } else {
            binom_u128(a as usize, b as usize)
        }
    }

    pub fn star(p: Params) -> u128 {
        c(p.n() as isize - 1, p.k() as isize - 1)
    }

    pub fn hilton_milner(p: Params) -> u128 {
        let (n, k) = (p.n() as isize, p.k() as isize);
        c(n - 1, k - 1) - c(n - k - 1, k - 1) + 1
    }

    pub fn d(p: Params) -> u128 {
        hilton_milner(p) + 1
    }

    pub fn e(i: usize, p: Params) -> u128 {
        let (n, k, i) = (p.n() as isize, p.k() as isize, i as isize);
        c(n - 1, k - 1) - c(n - k - i - 1, k - 1) + c(k + i, k)
    }

    pub fn w(l: usize, p: Params) -> u128 {
        let (n, k, l) = (p.n() as isize, p.k() as isize, l as isize);
        c(n - 2, k - 2) + 2 * (c(n - 2, k - 1) - c(n - l - 2, k - 1))
    }

    pub fn w_prime(l: usize, lp: usize, p: Params) -> u128 {
        let (n, k) = (p.n() as isize, p.k());
        (lp..=l.min(k))
            .map(|j| c(l as isize, j as isize) * c(n - l as isize, (k - j) as isize))
            .sum()
    }

    pub fn tightness_g(s: usize, p: Params) -> u128 {
        let (n, k, s) = (p.n() as isize, p.k() as isize, s as isize);
        c(n - 2, k - 2) + 2 * s as u128 * c(n - s - 2, k - 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kneser::{covering_number, edge_count, is_intersecting, max_degree};

    fn set(xs: &[usize]) -> KSet {
        KSet::from_elements(xs.iter().copied()).unwrap()
    }

    fn pr(n: usize, k: usize) -> Params {
        Params::new(n, k).unwrap()
    }

    #[test]
    fn star_examples() {
        let s = make_star(1, pr(5, 2)).unwrap();
        assert_eq!(s.to_vecs(), vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![1, 5]]);
        assert_eq!(make_star(9, pr(9, 4)).unwrap().len(), 56);
        assert_eq!(edge_count(&s), 0);
        assert!(make_star(6, pr(5, 2)).is_err());
    }

    #[test]
    fn star_plus_examples() {
        for (n, k, want) in [(5, 2, 2), (6, 2, 3), (7, 3, 3)] {
            let t = KSet::interval(2, k + 1).unwrap();
            let f = make_star_plus(1, t, pr(n, k)).unwrap();
            assert_eq!(edge_count(&f), want);
            assert_eq!(max_degree(&f).unwrap().max, want as usize);
        }
        assert!(make_star_plus(1, set(&[1, 2]), pr(5, 2)).is_err());
    }

    #[test]
    fn hilton_milner_examples() {
        let h = make_hilton_milner(1, set(&[2, 3]), pr(5, 2)).unwrap();
        assert_eq!(h.to_vecs(), vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert!(is_intersecting(&h));
        let h = make_hilton_milner(1, set(&[2, 3, 4]), pr(10, 3)).unwrap();
        assert_eq!(h.len(), 22);
        assert!(make_hilton_milner(2, set(&[2, 3]), pr(5, 2)).is_err());
    }

    #[test]
    fn d_examples() {
        let d = make_d(1, set(&[2, 3]), set(&[1, 4]), pr(5, 2)).unwrap();
        assert_eq!(d.to_vecs(), vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![2, 3]]);
        assert_eq!(max_degree(&d).unwrap().max, 1);
        assert_eq!(make_d_canonical(pr(6, 2)).unwrap().len(), 4);
        let big = make_d_canonical(pr(12, 4)).unwrap();
        assert_eq!(big.len(), 165 - 35 + 2);
        assert!(big.len() >= 4 * 28);
        assert!(make_d(1, set(&[2, 3]), set(&[1, 3]), pr(5, 2)).is_err());
        assert!(make_d(1, set(&[2, 3]), set(&[4, 5]), pr(5, 2)).is_err());
    }

    #[test]
    fn e_examples() {
        let e = make_e(1, pr(6, 2)).unwrap();
        assert_eq!(
            e.to_vecs(),
            vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4], vec![3, 4]]
        );
        assert_eq!(max_degree(&e).unwrap().max, 1);
        assert_eq!(make_e(2, pr(10, 3)).unwrap().len(), 40);
        assert!(make_e(0, pr(10, 3)).is_err());
        assert!(make_e(7, pr(10, 3)).is_err());
    }

    #[test]
    fn w_examples() {
        let w = make_w(2, pr(6, 2)).unwrap();
        assert_eq!(
            w.to_vecs(),
            vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4]]
        );
        for l in 1..=4 {
            let c = covering_number(&make_w(l, pr(10, 3)).unwrap());
            assert_eq!((c.size, c.witness), (2, set(&[1, 2])));
        }
        let wp = make_w_prime(4, 3, pr(10, 3)).unwrap();
        assert_eq!(wp.len(), 4);
        assert!(wp.iter().all(|s| s.is_subset(KSet::interval(3, 6).unwrap())));
        assert!(make_w_prime(2, 3, pr(10, 3)).is_err());
    }

    #[test]
    fn tightness_examples() {
        let g = make_tightness_g(4, pr(12, 3)).unwrap();
        assert_eq!(g.len(), 58);
        assert_eq!(max_degree(&g).unwrap().max, 15);
        let g = make_tightness_g(3, pr(13, 4)).unwrap();
        assert_eq!(g.len(), 223);
        let prof = max_degree(&g).unwrap();
        assert_eq!(prof.max, 30);
        for (s, d) in g.iter().zip(&prof.degrees) {
            if s.contains(1) && s.contains(2) {
                assert_eq!(*d, 0);
            }
        }
    }

    #[test]
    fn random_examples() {
        let p = pr(6, 2);
        assert_eq!(make_random(15, p, 1, false).unwrap().len(), 15);
        assert!(is_intersecting(&make_random(1, p, 1, false).unwrap()));
        assert_eq!(make_random(7, p, 42, true).unwrap(), make_random(7, p, 42, true).unwrap());
        assert!(!is_intersecting(&make_random(3, p, 5, true).unwrap()));
        assert!(make_random(16, p, 1, false).is_err());
        assert!(make_random(1, p, 1, true).is_err());
    }

    #[test]
    fn size_formulas_on_grid() {
        for n in 2..=14 {
            for k in 1..=4.min(n) {
                let p = pr(n, k);
                assert_eq!(make_star(1, p).unwrap().len() as u128, sizes::star(p));
                if n > k {
                    let f0 = KSet::interval(2, k + 1).unwrap();
                    let hm = make_hilton_milner(1, f0, p).unwrap();
                    assert_eq!(hm.len() as u128, sizes::hilton_milner(p));
                }
                if n > 2 * k {
                    assert_eq!(make_d_canonical(p).unwrap().len() as u128, sizes::d(p));
                }
                for i in 1..=n {
                    if k + i + 1 <= n {
                        assert_eq!(make_e(i, p).unwrap().len() as u128, sizes::e(i, p));
                    }
                }
                for l in 1..=n.saturating_sub(2) {
                    assert_eq!(make_w(l, p).unwrap().len() as u128, sizes::w(l, p), "W n={n} k={k} l={l}");
                    for lp in 1..=l.min(k) {
                        assert_eq!(make_w_prime(l, lp, p).unwrap().len() as u128, sizes::w_prime(l, lp, p));
                    }
                }
                for s in 2..=n.saturating_sub(2) {
                    if k >= 2 && n - s - 2 >= k - 2 {
                        assert_eq!(make_tightness_g(s, p).unwrap().len() as u128, sizes::tightness_g(s, p));
                    }
                }
            }
        }
    }
}
