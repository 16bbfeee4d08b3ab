use crate::error::{domain, Result};
use crate::setkit::{KSet, Params};

/// A set of distinct `k`-subsets of `[n]`, kept in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Family {
    params: Params,
    members: Vec<KSet>,
}

impl Family {
    /// Validates, sorts and deduplicates `members`.
    pub fn new<I: IntoIterator<Item = KSet>>(params: Params, members: I) -> Result<Self> {
        let mut members: Vec<KSet> = members.into_iter().collect();
        if let Some(bad) = members.iter().find(|s| !s.fits(params)) {
            return domain(format!(
                "{bad} is not a {}-subset of [{}]",
                params.k(),
                params.n()
            ));
        }
        members.sort_unstable();
        members.dedup();
        Ok(Family { params, members })
    }

    /// Builds a family from explicit element lists.
    pub fn from_sets<S: AsRef<[usize]>>(params: Params, sets: &[S]) -> Result<Self> {
        let members = sets
            .iter()
            .map(|s| KSet::from_elements(s.as_ref().iter().copied()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(params, members)
    }

    pub fn empty(params: Params) -> Self {
        Family {
            params,
            members: Vec::new(),
        }
    }

    /// `members` must be sorted, distinct and fit `params`.
    pub(crate) fn from_sorted_unchecked(params: Params, members: Vec<KSet>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(members.iter().all(|s| s.fits(params)));
        Family { params, members }
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn members(&self) -> &[KSet] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, KSet> {
        self.members.iter()
    }

    pub fn contains(&self, s: KSet) -> bool {
        self.members.binary_search(&s).is_ok()
    }

    pub fn to_vecs(&self) -> Vec<Vec<usize>> {
        self.members.iter().map(|s| s.to_vec()).collect()
    }

    /// Applies a permutation of `[n]`; `perm[i - 1]` is the image of `i`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Family> {
        let n = self.params.n();
        let mut seen = vec![false; n + 1];
        if perm.len() != n || perm.iter().any(|&x| x == 0 || x > n || std::mem::replace(&mut seen[x], true)) {
            return domain(format!("not a permutation of [{n}]"));
        }
        let members = self
            .members
            .iter()
            .map(|s| s.relabel(perm))
            .collect::<Result<Vec<_>>>()?;
        Family::new(self.params, members)
    }

    /// Union of two families over the same parameters.
    pub fn union(&self, other: &Family) -> Result<Family> {
        if self.params != other.params {
            return domain("families have different parameters");
        }
        Family::new(self.params, self.members.iter().chain(&other.members).copied())
    }
}

impl<'a> IntoIterator for &'a Family {
    type Item = &'a KSet;
    type IntoIter = std::slice::Iter<'a, KSet>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}
