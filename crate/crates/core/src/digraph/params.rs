//! Exact combinatorial parameters: feedback vertex sets, cycle packings,
//! matchings, clique partitions and covers, in-dominating sets and
//! intersection models. Every solver is exhaustive and checks its size cap
//! from [`Limits`] first.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{bit, mask_to_vec, members, Digraph};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GraphParams {
    pub n: usize,
    /// Minimum feedback vertex set size.
    pub k: usize,
    /// Maximum acyclic set size.
    pub alpha: usize,
    /// Maximum number of vertex-disjoint cycles.
    pub c: usize,
    /// Maximum matching size (symmetric arc pairs).
    pub mu: usize,
    /// Minimum clique partition size.
    pub cp: usize,
    pub isolated: usize,
}

fn check_size(what: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(Error::bound(what, limit as u64, n as u64))
    } else {
        Ok(())
    }
}

pub fn params(g: &Digraph) -> Result<GraphParams> {
    params_with(g, &Limits::default())
}

pub fn params_with(g: &Digraph, limits: &Limits) -> Result<GraphParams> {
    let k = feedback_number(g, limits)?;
    Ok(GraphParams {
        n: g.n(),
        k,
        alpha: g.n() - k,
        c: cycle_packing_number(g, limits)?,
        mu: max_matching(g, limits)?.len(),
        cp: clique_partition_number(g, limits)?,
        isolated: g.isolated_vertices().len(),
    })
}

// ---------------------------------------------------------------------------
// Feedback vertex sets

/// Drops vertices of `alive` that lie on no cycle of `G[alive]` because they
/// have no in- or out-neighbour left.
fn prune_acyclic_part(g: &Digraph, mut alive: u64) -> u64 {
    loop {
        let dead = members(alive)
            .filter(|&v| g.in_mask(v) & alive == 0 || g.out_mask(v) & alive == 0)
            .fold(0u64, |acc, v| acc | bit(v));
        if dead == 0 {
            return alive;
        }
        alive &= !dead;
    }
}

/// A shortest cycle of `G[alive]`, as a vertex sequence.
pub(crate) fn shortest_cycle(g: &Digraph, alive: u64) -> Option<Vec<usize>> {
    if let Some(v) = members(alive).find(|&v| g.has_loop(v)) {
        return Some(vec![v]);
    }
    let mut best: Option<Vec<usize>> = None;
    let mut parent = vec![usize::MAX; g.n()];
    for s in members(alive) {
        let mut seen = bit(s);
        let mut frontier = vec![s];
        let mut depth = 0;
        'bfs: while !frontier.is_empty() {
            depth += 1;
            if best.as_ref().is_some_and(|b| depth >= b.len()) {
                break;
            }
            let mut next = Vec::new();
            for &u in &frontier {
                if g.out_mask(u) & bit(s) != 0 {
                    let mut cycle = vec![u];
                    let mut x = u;
                    while x != s {
                        x = parent[x];
                        cycle.push(x);
                    }
                    cycle.reverse();
                    best = Some(cycle);
                    break 'bfs;
                }
                for w in members(g.out_mask(u) & alive & !seen) {
                    seen |= bit(w);
                    parent[w] = u;
                    next.push(w);
                }
            }
            frontier = next;
        }
        if best.as_ref().is_some_and(|b| b.len() == 2) {
            break;
        }
    }
    best
}

/// A feedback vertex set of `G[alive]` of size at most `budget`.
fn fvs_within(g: &Digraph, alive: u64, budget: usize) -> Option<u64> {
    let alive = prune_acyclic_part(g, alive);
    if alive == 0 {
        return Some(0);
    }
    let loops = members(alive)
        .filter(|&v| g.has_loop(v))
        .fold(0u64, |a, v| a | bit(v));
    if loops != 0 {
        let forced = loops.count_ones() as usize;
        if forced > budget {
            return None;
        }
        return fvs_within(g, alive & !loops, budget - forced).map(|s| s | loops);
    }
    if budget == 0 {
        return None;
    }
    let cycle = shortest_cycle(g, alive)?;
    cycle
        .iter()
        .find_map(|&v| fvs_within(g, alive & !bit(v), budget - 1).map(|s| s | bit(v)))
}

pub(crate) fn min_fvs_mask(g: &Digraph) -> u64 {
    let alive = g.full();
    (0..=g.n())
        .find_map(|budget| fvs_within(g, alive, budget))
        .expect("the whole vertex set is a feedback vertex set")
}

/// A minimum feedback vertex set (the first one found by the branching
/// search; deterministic).
pub fn min_feedback_vertex_set(g: &Digraph, limits: &Limits) -> Result<Vec<usize>> {
    check_size("feedback vertex set search", g.n(), limits.fvs_vertices)?;
    Ok(mask_to_vec(min_fvs_mask(g)))
}

/// `k(G)`.
pub fn feedback_number(g: &Digraph, limits: &Limits) -> Result<usize> {
    Ok(min_feedback_vertex_set(g, limits)?.len())
}

/// Calls `f` on every `k`-subset of `cands` (as a mask) in lexicographic
/// order of positions until it returns `false`.
pub(crate) fn for_each_k_subset(cands: &[usize], k: usize, mut f: impl FnMut(u64) -> bool) {
    let m = cands.len();
    if k > m {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let mask = idx.iter().fold(0u64, |a, &i| a | bit(cands[i]));
        if !f(mask) {
            return;
        }
        let Some(pos) = (0..k).rev().find(|&p| idx[p] != p + m - k) else {
            return;
        };
        idx[pos] += 1;
        for p in pos + 1..k {
            idx[p] = idx[p - 1] + 1;
        }
    }
}

/// Every feedback vertex set of size exactly `k`, as masks in lexicographic
/// order. No caller-side cap: intended for small graphs.
pub(crate) fn fvs_masks_of_size(g: &Digraph, k: usize) -> Vec<u64> {
    let on_cycles = prune_acyclic_part(g, g.full());
    let cands = mask_to_vec(on_cycles);
    let mut out = Vec::new();
    for_each_k_subset(&cands, k, |s| {
        if g.is_acyclic_mask(on_cycles & !s) {
            out.push(s);
        }
        true
    });
    out
}

/// Whether some feedback vertex set has at most `k` vertices.
pub(crate) fn has_fvs_of_size(g: &Digraph, k: usize) -> bool {
    let on_cycles = prune_acyclic_part(g, g.full());
    let cands = mask_to_vec(on_cycles);
    if k >= cands.len() {
        return true;
    }
    let mut found = false;
    for_each_k_subset(&cands, k, |s| {
        found = g.is_acyclic_mask(on_cycles & !s);
        !found
    });
    found
}

/// All minimum feedback vertex sets, each sorted, in lexicographic order.
pub fn minimum_feedback_vertex_sets(g: &Digraph, limits: &Limits) -> Result<Vec<Vec<usize>>> {
    let k = feedback_number(g, limits)?;
    Ok(fvs_masks_of_size(g, k)
        .into_iter()
        .map(mask_to_vec)
        .collect())
}

/// All maximum acyclic sets (complements of minimum feedback vertex sets).
pub fn max_acyclic_sets(g: &Digraph, limits: &Limits) -> Result<Vec<Vec<usize>>> {
    let k = feedback_number(g, limits)?;
    let full = g.full();
    let mut sets: Vec<Vec<usize>> = fvs_masks_of_size(g, k)
        .into_iter()
        .map(|s| mask_to_vec(full & !s))
        .collect();
    sets.sort();
    Ok(sets)
}

// ---------------------------------------------------------------------------
// Cycle packing and matching

/// Cycles through `v` inside `mask` whose vertex set induces exactly the
/// cycle (no chords, no reverse arcs). Any cycle contains the vertex set of
/// such a cycle, so packings may use these alone.
fn minimal_cycles_through(g: &Digraph, v: usize, mask: u64) -> Vec<Vec<usize>> {
    if g.has_loop(v) {
        return vec![vec![v]];
    }
    let mut found = Vec::new();
    let mut path = vec![v];
    extend_minimal(g, mask, bit(v), &mut path, &mut found);
    found
}

fn extend_minimal(
    g: &Digraph,
    mask: u64,
    on_path: u64,
    path: &mut Vec<usize>,
    found: &mut Vec<Vec<usize>>,
) {
    let start = path[0];
    let last = *path.last().expect("non-empty path");
    for w in members(g.out_mask(last) & mask & !on_path) {
        if g.has_loop(w) {
            continue;
        }
        // w may touch the path only through last -> w and possibly w -> start.
        let back = g.out_mask(w) & on_path;
        let forth = g.in_mask(w) & on_path;
        if back & !bit(start) != 0 || forth & !bit(last) != 0 {
            continue;
        }
        path.push(w);
        if back & bit(start) != 0 {
            found.push(path.clone());
        } else {
            extend_minimal(g, mask, on_path | bit(w), path, found);
        }
        path.pop();
    }
}

type CycleSource = fn(&Digraph, usize, u64) -> Vec<Vec<usize>>;

fn two_cycles_through(g: &Digraph, v: usize, mask: u64) -> Vec<Vec<usize>> {
    members(g.sym_mask(v) & mask).map(|w| vec![v, w]).collect()
}

struct Packer<'a> {
    g: &'a Digraph,
    cycles: CycleSource,
    memo: HashMap<u64, usize>,
}

impl Packer<'_> {
    fn live(&self, mask: u64) -> u64 {
        prune_acyclic_part(self.g, mask)
    }

    fn best(&mut self, mask: u64) -> usize {
        let mask = self.live(mask);
        if mask == 0 {
            return 0;
        }
        if let Some(&b) = self.memo.get(&mask) {
            return b;
        }
        let v = mask.trailing_zeros() as usize;
        let mut best = self.best(mask & !bit(v));
        for cycle in (self.cycles)(self.g, v, mask) {
            let used = cycle.iter().fold(0u64, |a, &x| a | bit(x));
            best = best.max(1 + self.best(mask & !used));
        }
        self.memo.insert(mask, best);
        best
    }

    fn witness(&mut self, mask: u64) -> Vec<Vec<usize>> {
        let mut mask = self.live(mask);
        let mut out = Vec::new();
        while mask != 0 {
            let target = self.best(mask);
            let v = mask.trailing_zeros() as usize;
            let choice = (self.cycles)(self.g, v, mask).into_iter().find(|cycle| {
                let used = cycle.iter().fold(0u64, |a, &x| a | bit(x));
                1 + self.best(mask & !used) == target
            });
            match choice {
                Some(cycle) => {
                    mask &= !cycle.iter().fold(0u64, |a, &x| a | bit(x));
                    out.push(cycle);
                }
                None => mask &= !bit(v),
            }
            mask = self.live(mask);
        }
        out
    }
}

/// A maximum family of vertex-disjoint cycles, each given as a vertex
/// sequence following its arcs.
pub fn max_disjoint_cycles(g: &Digraph, limits: &Limits) -> Result<Vec<Vec<usize>>> {
    check_size("cycle packing", g.n(), limits.packing_vertices)?;
    let mut p = Packer {
        g,
        cycles: minimal_cycles_through,
        memo: HashMap::new(),
    };
    Ok(p.witness(g.full()))
}

/// `c(G)`.
pub fn cycle_packing_number(g: &Digraph, limits: &Limits) -> Result<usize> {
    check_size("cycle packing", g.n(), limits.packing_vertices)?;
    let mut p = Packer {
        g,
        cycles: minimal_cycles_through,
        memo: HashMap::new(),
    };
    Ok(p.best(g.full()))
}

/// A maximum matching: disjoint pairs `(u, v)`, `u < v`, joined by arcs in
/// both directions.
pub fn max_matching(g: &Digraph, limits: &Limits) -> Result<Vec<(usize, usize)>> {
    check_size("matching", g.n(), limits.packing_vertices)?;
    let sym = g.without_loops();
    let sym = Digraph::from_out_masks((0..g.n()).map(|v| sym.sym_mask(v)).collect());
    let mut p = Packer {
        g: &sym,
        cycles: two_cycles_through,
        memo: HashMap::new(),
    };
    Ok(p.witness(sym.full())
        .into_iter()
        .map(|c| (c[0].min(c[1]), c[0].max(c[1])))
        .collect())
}

// ---------------------------------------------------------------------------
// Cliques

/// Calls `f` with every maximal clique of the symmetric part containing `r`
/// and extended from `p`.
fn maximal_cliques(g: &Digraph, r: u64, p: u64, x: u64, f: &mut impl FnMut(u64)) {
    if p == 0 {
        if x == 0 {
            f(r);
        }
        return;
    }
    let pivot = members(p | x)
        .max_by_key(|&u| (g.sym_mask(u) & p).count_ones())
        .expect("p non-empty");
    let (mut p, mut x) = (p, x);
    for v in members(p & !g.sym_mask(pivot)) {
        let nv = g.sym_mask(v);
        maximal_cliques(g, r | bit(v), p & nv, x & nv, f);
        p &= !bit(v);
        x |= bit(v);
    }
}

/// Maximal cliques of `G[mask]` containing `v`.
fn cliques_containing(g: &Digraph, v: usize, mask: u64) -> Vec<u64> {
    let mut out = Vec::new();
    maximal_cliques(g, bit(v), g.sym_mask(v) & mask, 0, &mut |c| out.push(c));
    out
}

fn partition_cost(g: &Digraph, mask: u64, memo: &mut HashMap<u64, usize>) -> usize {
    if mask == 0 {
        return 0;
    }
    if let Some(&c) = memo.get(&mask) {
        return c;
    }
    let v = mask.trailing_zeros() as usize;
    let best = cliques_containing(g, v, mask)
        .into_iter()
        .map(|c| 1 + partition_cost(g, mask & !c, memo))
        .min()
        .expect("{v} is a clique");
    memo.insert(mask, best);
    best
}

/// `cp(G)`: minimum number of cliques (sets joined pairwise by arcs in both
/// directions) partitioning the vertex set.
pub fn clique_partition_number(g: &Digraph, limits: &Limits) -> Result<usize> {
    check_size("clique partition", g.n(), limits.packing_vertices)?;
    Ok(partition_cost(g, g.full(), &mut HashMap::new()))
}

pub fn is_vertex_full(g: &Digraph, limits: &Limits) -> Result<bool> {
    let alpha = g.n() - feedback_number(g, limits)?;
    Ok(clique_partition_number(g, limits)? == alpha)
}

fn cover_edges(g: &Digraph, covered: &mut [u64], budget: usize) -> bool {
    let uncovered = (0..g.n()).find_map(|u| {
        let rest = g.sym_mask(u) & !covered[u] & !((bit(u) << 1).wrapping_sub(1));
        (rest != 0).then(|| (u, rest.trailing_zeros() as usize))
    });
    let Some((u, w)) = uncovered else {
        return true;
    };
    if budget == 0 {
        return false;
    }
    let mut cliques = Vec::new();
    let p = g.sym_mask(u) & g.sym_mask(w);
    maximal_cliques(g, bit(u) | bit(w), p, 0, &mut |c| cliques.push(c));
    for c in cliques {
        let saved: Vec<u64> = members(c).map(|x| covered[x]).collect();
        for x in members(c) {
            covered[x] |= c & !bit(x);
        }
        if cover_edges(g, covered, budget - 1) {
            return true;
        }
        for (x, s) in members(c).zip(saved) {
            covered[x] = s;
        }
    }
    false
}

/// Whether the arcs can be covered by `alpha(G)` cliques. Only loopless
/// undirected graphs qualify.
pub fn is_edge_full(g: &Digraph, limits: &Limits) -> Result<bool> {
    check_size("clique edge cover", g.n(), limits.packing_vertices)?;
    if !g.is_undirected() || !g.is_loopless() {
        return Ok(false);
    }
    let alpha = g.n() - feedback_number(g, limits)?;
    Ok(cover_edges(g, &mut vec![0; g.n()], alpha))
}

// ---------------------------------------------------------------------------
// In-dominating sets

/// `I_k(G)` for `k = 0..=n`: the number of `k`-sets `X` such that every
/// vertex with positive in-degree is in `X` or has an in-neighbour in `X`.
pub fn in_dominating_counts(g: &Digraph, limits: &Limits) -> Result<Vec<u64>> {
    g.require_loopless()?;
    check_size("in-dominating set count", g.n(), limits.ids_vertices)?;
    let n = g.n();
    let demand = (0..n)
        .filter(|&v| g.in_degree(v) > 0)
        .fold(0u64, |a, v| a | bit(v));
    let total = 1u64 << n;
    let counts = par::fold_chunks(
        total,
        par::chunk_size(total),
        vec![0u64; n + 1],
        |range| {
            let mut counts = vec![0u64; n + 1];
            for x in range {
                let reach = members(x).fold(x, |acc, v| acc | g.out_mask(v));
                if reach & demand == demand {
                    counts[x.count_ones() as usize] += 1;
                }
            }
            counts
        },
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    );
    Ok(counts)
}

pub fn count_in_dominating_sets(g: &Digraph, k: usize, limits: &Limits) -> Result<u64> {
    Ok(in_dominating_counts(g, limits)?
        .get(k)
        .copied()
        .unwrap_or(0))
}

// ---------------------------------------------------------------------------
// Intersection models

fn assign_model(g: &Digraph, budget: usize, v: usize, used: usize, model: &mut Vec<u64>) -> bool {
    let n = g.n();
    if v == n {
        return true;
    }
    let adj = g.sym_mask(v);
    if adj == 0 {
        model.push(0);
        if assign_model(g, budget, v + 1, used, model) {
            return true;
        }
        model.pop();
        return false;
    }
    // Fresh ground elements are interchangeable, so only the lowest `t`
    // unused ones are ever introduced.
    let old = (1u64 << used) - 1;
    for t in 0..=budget - used {
        let fresh = ((1u64 << t) - 1) << used;
        let mut sub = old;
        loop {
            let set = sub | fresh;
            if set != 0 && (0..v).all(|u| (model[u] & set != 0) == (adj & bit(u) != 0)) {
                model.push(set);
                if assign_model(g, budget, v + 1, used + t, model) {
                    return true;
                }
                model.pop();
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & old;
        }
    }
    false
}

/// Subsets `X_v` of a `budget`-element ground set (as bitmasks) such that
/// distinct `u, v` are adjacent iff `X_u` and `X_v` meet, or `None`.
pub fn min_intersection_model(
    g: &Digraph,
    budget: usize,
    limits: &Limits,
) -> Result<Option<Vec<u64>>> {
    if !g.is_undirected() {
        return Err(Error::Precondition(
            "intersection models need an undirected graph".into(),
        ));
    }
    check_size("intersection model search", g.n(), limits.model_vertices)?;
    if budget > 63 {
        return Err(Error::bound(
            "intersection model ground set",
            63,
            budget as u64,
        ));
    }
    let g = g.without_loops();
    let mut model = Vec::with_capacity(g.n());
    Ok(assign_model(&g, budget, 0, 0, &mut model).then_some(model))
}

/// `epsilon(G)`: the smallest ground set admitting an intersection model.
pub fn intersection_number(g: &Digraph, limits: &Limits) -> Result<usize> {
    let edges = g.without_loops().arc_count() / 2;
    for budget in 0..=edges {
        if min_intersection_model(g, budget, limits)?.is_some() {
            return Ok(budget);
        }
    }
    unreachable!("one ground element per edge always suffices")
}
