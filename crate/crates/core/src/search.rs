//! Exact minimization of the maximum degree or the edge count over all
//! `m`-member families, by branch and bound over the vertices of `KG(n, k)`
//! in lexicographic order.
//!
//! The vertex set must fit a `u128` adjacency mask, so `C(n, k) <= 128`.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use crate::error::{domain, resource, Result};
use crate::family::Family;
use crate::kneser::{edge_count, is_intersecting};
use crate::par::Exec;
use crate::setkit::{binom_u128, enumerate_all, lex_family, KSet, Params};

/// Environment variable overriding [`Budget::DEFAULT_NODES`].
pub const BUDGET_ENV: &str = "KNESERLAB_BUDGET_NODES";

/// Largest vertex count the engine accepts.
pub const MAX_VERTICES: u128 = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    MaxDegree,
    Edges,
}

impl Objective {
    pub fn as_str(self) -> &'static str {
        match self {
            Objective::MaxDegree => "max-degree",
            Objective::Edges => "edges",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_nodes: u64,
    pub max_time: Option<Duration>,
}

impl Budget {
    pub const DEFAULT_NODES: u64 = 200_000_000;

    /// Default budget, with the node limit taken from `KNESERLAB_BUDGET_NODES`
    /// when it parses.
    pub fn from_env() -> Self {
        let max_nodes = std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(Self::DEFAULT_NODES);
        Budget { max_nodes, max_time: None }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_nodes: Self::DEFAULT_NODES, max_time: None }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchOptions {
    /// Force the first member to contain 1. Keeps the optimum, changes which
    /// witness is found.
    pub symmetry: bool,
    pub exec: Exec,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub objective: Objective,
    pub m: usize,
    pub params: Params,
    /// `None` only when the budget ran out before any feasible family.
    pub optimum: Option<u64>,
    pub witness: Option<Family>,
    pub nodes_explored: u64,
    pub proven_optimal: bool,
    /// The witness is the first optimal family in traversal order. Only
    /// guaranteed for sequential runs.
    pub witness_traversal_first: bool,
    pub budget: Budget,
}

/// `d(m, n, k)`: the least maximum degree of a non-intersecting family of
/// `m` sets.
pub fn min_max_degree(m: usize, p: Params, budget: Budget, opts: SearchOptions) -> Result<SearchResult> {
    if m < 2 || p.n() < 2 * p.k() {
        return domain(format!(
            "no non-intersecting family of {m} sets for n={}, k={}",
            p.n(),
            p.k()
        ));
    }
    run(Objective::MaxDegree, m, p, budget, opts)
}

/// Least number of disjoint pairs among `m` sets.
pub fn min_edges(m: usize, p: Params, budget: Budget, opts: SearchOptions) -> Result<SearchResult> {
    if m == 0 {
        return domain("m must be positive");
    }
    run(Objective::Edges, m, p, budget, opts)
}

struct Engine {
    objective: Objective,
    verts: Vec<KSet>,
    adj: Vec<u128>,
    m: usize,
    /// Best value any feasible family can reach.
    floor: u64,
    /// First vertex index bound under the symmetry flag.
    first_limit: usize,
    max_nodes: u64,
    deadline: Option<Instant>,
}

struct Shared {
    incumbent: AtomicU64,
    nodes: AtomicU64,
    stop: AtomicBool,
    exhausted: AtomicBool,
}

struct Worker {
    chosen: u128,
    stack: Vec<usize>,
    /// Neighbours of each vertex among the chosen ones.
    cnt: Vec<u32>,
    cur: u64,
    best: Option<(u64, Vec<usize>)>,
    local_nodes: u64,
}

fn low_mask(i: usize) -> u128 {
    if i >= 128 {
        u128::MAX
    } else {
        (1u128 << i) - 1
    }
}

fn from_mask(start: usize) -> u128 {
    !low_mask(start)
}

impl Engine {
    fn new(objective: Objective, m: usize, p: Params, budget: Budget, symmetry: bool) -> Result<Self> {
        let total = p.vertex_count();
        if total > MAX_VERTICES {
            return resource(format!("C({},{}) = {total} vertices exceeds {MAX_VERTICES}", p.n(), p.k()));
        }
        if m as u128 > total {
            return domain(format!("m={m} exceeds C({},{})={total}", p.n(), p.k()));
        }
        let verts: Vec<KSet> = enumerate_all(p)?.collect();
        let adj = verts
            .iter()
            .map(|a| {
                verts
                    .iter()
                    .enumerate()
                    .filter(|(_, b)| a.is_disjoint(**b))
                    .fold(0u128, |acc, (j, _)| acc | 1u128 << j)
            })
            .collect();
        let floor = match objective {
            Objective::MaxDegree => 1,
            Objective::Edges => 0,
        };
        let first_limit = if symmetry {
            binom_u128(p.n() - 1, p.k() - 1) as usize
        } else {
            verts.len()
        };
        Ok(Engine {
            objective,
            verts,
            adj,
            m,
            floor,
            first_limit,
            max_nodes: budget.max_nodes,
            deadline: budget.max_time.map(|t| Instant::now() + t),
        })
    }

    fn worker(&self) -> Worker {
        Worker {
            chosen: 0,
            stack: Vec::with_capacity(self.m),
            cnt: vec![0; self.verts.len()],
            cur: 0,
            best: None,
            local_nodes: 0,
        }
    }

    fn tick(&self, sh: &Shared, w: &mut Worker) -> bool {
        w.local_nodes += 1;
        if w.local_nodes > self.max_nodes {
            sh.exhausted.store(true, Ordering::Relaxed);
            sh.stop.store(true, Ordering::Relaxed);
        } else if w.local_nodes % 1024 == 0 {
            let total = sh.nodes.fetch_add(1024, Ordering::Relaxed) + 1024;
            let late = self.deadline.is_some_and(|d| Instant::now() >= d);
            if total > self.max_nodes || late {
                sh.exhausted.store(true, Ordering::Relaxed);
                sh.stop.store(true, Ordering::Relaxed);
            }
        }
        !sh.stop.load(Ordering::Relaxed)
    }

    fn include(&self, w: &mut Worker, v: usize) {
        let c = w.cnt[v] as u64;
        let mut nb = self.adj[v];
        while nb != 0 {
            let u = nb.trailing_zeros() as usize;
            nb &= nb - 1;
            w.cnt[u] += 1;
        }
        w.chosen |= 1u128 << v;
        w.stack.push(v);
        w.cur = match self.objective {
            Objective::Edges => w.cur + c,
            Objective::MaxDegree => {
                let mut hit = self.adj[v] & w.chosen;
                let mut mx = w.cur.max(c);
                while hit != 0 {
                    let u = hit.trailing_zeros() as usize;
                    hit &= hit - 1;
                    mx = mx.max(w.cnt[u] as u64);
                }
                mx
            }
        };
    }

    fn exclude(&self, w: &mut Worker, v: usize, prev: u64) {
        let mut nb = self.adj[v];
        while nb != 0 {
            let u = nb.trailing_zeros() as usize;
            nb &= nb - 1;
            w.cnt[u] -= 1;
        }
        w.chosen &= !(1u128 << v);
        w.stack.pop();
        w.cur = prev;
    }

    fn leaf(&self, sh: &Shared, w: &mut Worker) {
        if self.objective == Objective::MaxDegree && w.cur == 0 {
            return;
        }
        let inc = sh.incumbent.load(Ordering::Relaxed);
        if w.cur < inc && w.best.as_ref().is_none_or(|(b, _)| w.cur < *b) {
            w.best = Some((w.cur, w.stack.clone()));
            sh.incumbent.fetch_min(w.cur, Ordering::Relaxed);
            if w.cur <= self.floor {
                sh.stop.store(true, Ordering::Relaxed);
            }
        }
    }

    /// Vertices at or after `start` that can still be added.
    fn candidates(&self, w: &Worker, start: usize, inc: u64) -> u128 {
        let live = from_mask(start) & low_mask(self.verts.len());
        match self.objective {
            Objective::Edges => live,
            Objective::MaxDegree => {
                let mut saturated = 0u128;
                let mut ch = w.chosen;
                while ch != 0 {
                    let u = ch.trailing_zeros() as usize;
                    ch &= ch - 1;
                    if w.cnt[u] as u64 + 1 >= inc {
                        saturated |= self.adj[u];
                    }
                }
                let mut ok = live & !saturated;
                let mut scan = ok;
                while scan != 0 {
                    let x = scan.trailing_zeros() as usize;
                    scan &= scan - 1;
                    if w.cnt[x] as u64 >= inc {
                        ok &= !(1u128 << x);
                    }
                }
                ok
            }
        }
    }

    fn edges_floor(&self, w: &Worker, cands: u128, r: usize) -> u64 {
        let mut costs: Vec<u32> = Vec::with_capacity(cands.count_ones() as usize);
        let mut scan = cands;
        while scan != 0 {
            let x = scan.trailing_zeros() as usize;
            scan &= scan - 1;
            costs.push(w.cnt[x]);
        }
        costs.sort_unstable();
        w.cur + costs.iter().take(r).map(|&c| c as u64).sum::<u64>()
    }

    fn dfs(&self, sh: &Shared, w: &mut Worker, start: usize) {
        if sh.stop.load(Ordering::Relaxed) {
            return;
        }
        let count = w.stack.len();
        if count == self.m {
            self.leaf(sh, w);
            return;
        }
        let r = self.m - count;
        let inc = sh.incumbent.load(Ordering::Relaxed);
        if w.cur >= inc {
            return;
        }
        let cands = self.candidates(w, start, inc);
        if (cands.count_ones() as usize) < r {
            return;
        }
        if self.objective == Objective::Edges && self.edges_floor(w, cands, r) >= inc {
            return;
        }
        let mut firsts = if count == 0 { cands & low_mask(self.first_limit) } else { cands };
        while firsts != 0 {
            let v = firsts.trailing_zeros() as usize;
            firsts &= firsts - 1;
            if ((cands & from_mask(v + 1)).count_ones() as usize) < r - 1 {
                return;
            }
            if !self.tick(sh, w) {
                return;
            }
            let inc = sh.incumbent.load(Ordering::Relaxed);
            let prev = w.cur;
            self.include(w, v);
            if w.cur < inc {
                self.dfs(sh, w, v + 1);
            }
            self.exclude(w, v, prev);
            if sh.stop.load(Ordering::Relaxed) {
                return;
            }
        }
    }
}

fn heuristic(objective: Objective, m: usize, p: Params) -> Option<u64> {
    let lex = lex_family(m as u128, p).ok()?;
    match objective {
        Objective::Edges => Some(edge_count(&lex)),
        Objective::MaxDegree if !is_intersecting(&lex) => {
            Some(crate::kneser::max_degree(&lex).ok()?.max as u64)
        }
        Objective::MaxDegree => None,
    }
}

fn run(objective: Objective, m: usize, p: Params, budget: Budget, opts: SearchOptions) -> Result<SearchResult> {
    let eng = Engine::new(objective, m, p, budget, opts.symmetry)?;
    // One above a known achievable value, so the first optimal family in
    // traversal order is still recorded.
    let start_inc = heuristic(objective, m, p).map_or(u64::MAX, |h| h + 1);
    let sh = Shared {
        incumbent: AtomicU64::new(start_inc),
        nodes: AtomicU64::new(0),
        stop: AtomicBool::new(false),
        exhausted: AtomicBool::new(false),
    };
    let parallel = opts.exec.is_parallel();
    let (best, nodes) = if parallel {
        split_first(&eng, &sh)
    } else {
        let mut w = eng.worker();
        eng.dfs(&sh, &mut w, 0);
        (w.best, w.local_nodes)
    };
    let exhausted = sh.exhausted.load(Ordering::Relaxed);
    let witness = best
        .as_ref()
        .map(|(_, idx)| Family::new(p, idx.iter().map(|&i| eng.verts[i])))
        .transpose()?;
    Ok(SearchResult {
        objective,
        m,
        params: p,
        optimum: best.map(|(v, _)| v),
        witness,
        nodes_explored: nodes,
        proven_optimal: !exhausted,
        witness_traversal_first: !parallel,
        budget,
    })
}

#[cfg(feature = "parallel")]
fn split_first(eng: &Engine, sh: &Shared) -> (Option<(u64, Vec<usize>)>, u64) {
    use rayon::prelude::*;
    let last = eng.first_limit.min(eng.verts.len() + 1 - eng.m);
    let results: Vec<(Option<(u64, Vec<usize>)>, u64)> = (0..last)
        .into_par_iter()
        .map(|v| {
            let mut w = eng.worker();
            if sh.stop.load(Ordering::Relaxed) {
                return (None, 0);
            }
            w.local_nodes += 1;
            eng.include(&mut w, v);
            if eng.m == 1 {
                eng.leaf(sh, &mut w);
            } else {
                eng.dfs(sh, &mut w, v + 1);
            }
            (w.best, w.local_nodes)
        })
        .collect();
    let nodes = results.iter().map(|r| r.1).sum();
    let best = results
        .into_iter()
        .filter_map(|r| r.0)
        .min_by_key(|(v, _)| *v);
    (best, nodes)
}

#[cfg(not(feature = "parallel"))]
fn split_first(eng: &Engine, sh: &Shared) -> (Option<(u64, Vec<usize>)>, u64) {
    let mut w = eng.worker();
    eng.dfs(sh, &mut w, 0);
    (w.best, w.local_nodes)
}

/// Best cover of a given size: an `S` minimizing `|F(S̄)|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverStructure {
    pub set: KSet,
    pub size: usize,
    /// Members avoiding `set`.
    pub residual: usize,
    /// `(x, |F(x)|)` for each `x` in `set`.
    pub per_element: Vec<(usize, usize)>,
}

/// Largest cover size [`find_cover_structure`] accepts.
pub const MAX_COVER_SIZE: usize = 6;

/// For each `s` from 0 to `t_max`, the lexicographically smallest `S` of size
/// `s` (drawn from elements occurring in `f`) with the fewest members
/// avoiding it. Stops early once no candidates remain.
pub fn find_cover_structure(f: &Family, t_max: usize) -> Result<Vec<CoverStructure>> {
    if t_max > MAX_COVER_SIZE {
        return resource(format!("t_max={t_max} exceeds {MAX_COVER_SIZE}"));
    }
    let support = f.iter().fold(KSet::EMPTY, |acc, a| acc.union(*a));
    let cands: Vec<usize> = support.elements().collect();
    let counts = crate::kneser::element_counts(f);
    let mut out = Vec::new();
    for s in 0..=t_max.min(cands.len()) {
        let mut best = (usize::MAX, KSet::EMPTY);
        let mut pick = Vec::with_capacity(s);
        cover_search(f.members(), &cands, 0, s, &mut pick, &mut best);
        let set = best.1;
        out.push(CoverStructure {
            set,
            size: s,
            residual: f.iter().filter(|a| a.is_disjoint(set)).count(),
            per_element: set.elements().map(|x| (x, counts[x])).collect(),
        });
    }
    Ok(out)
}

fn cover_search(
    uncovered: &[KSet],
    cands: &[usize],
    from: usize,
    s: usize,
    pick: &mut Vec<usize>,
    best: &mut (usize, KSet),
) {
    let r = s - pick.len();
    if r == 0 {
        if uncovered.len() < best.0 {
            *best = (uncovered.len(), KSet::from_elements(pick.iter().copied()).expect("valid"));
        }
        return;
    }
    if best.0 == 0 || cands.len() - from < r {
        return;
    }
    let mut gains: Vec<usize> = cands[from..]
        .iter()
        .map(|&x| uncovered.iter().filter(|a| a.contains(x)).count())
        .collect();
    gains.sort_unstable_by(|a, b| b.cmp(a));
    let reach: usize = gains[..r].iter().sum();
    if uncovered.len().saturating_sub(reach) >= best.0 {
        return;
    }
    for i in from..=cands.len() - r {
        let x = cands[i];
        let rest: Vec<KSet> = uncovered.iter().copied().filter(|a| !a.contains(x)).collect();
        pick.push(x);
        cover_search(&rest, cands, i + 1, s, pick, best);
        pick.pop();
        if best.0 == 0 {
            return;
        }
    }
}
