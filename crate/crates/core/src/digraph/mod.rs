//! Directed graphs with loops, their reductions, and path counting through
//! acyclic sets.
//!
//! Vertices are `0..n` and vertex sets are stored as `u64` bitmasks, so a
//! graph has at most [`MAX_VERTICES`] vertices.

pub(crate) mod params;

pub use params::{
    clique_partition_number, count_in_dominating_sets, cycle_packing_number, feedback_number,
    in_dominating_counts, intersection_number, is_edge_full, is_vertex_full, max_acyclic_sets,
    max_disjoint_cycles, max_matching, min_feedback_vertex_set, min_intersection_model,
    minimum_feedback_vertex_sets, params, params_with, GraphParams,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_VERTICES: usize = 64;

#[inline]
pub(crate) fn bit(v: usize) -> u64 {
    1u64 << v
}

#[inline]
pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        !0
    } else {
        (1u64 << n) - 1
    }
}

/// Iterates the members of a bitmask in ascending order.
pub(crate) fn members(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let v = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(v)
        }
    })
}

pub(crate) fn mask_to_vec(mask: u64) -> Vec<usize> {
    members(mask).collect()
}

#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(into = "ArcList", try_from = "ArcList")]
pub struct Digraph {
    n: usize,
    out: Vec<u64>,
    inn: Vec<u64>,
}

/// Serialized form: vertex count plus arcs in lexicographic order.
#[derive(Serialize, Deserialize)]
struct ArcList {
    n: usize,
    arcs: Vec<(usize, usize)>,
}

impl From<Digraph> for ArcList {
    fn from(g: Digraph) -> Self {
        ArcList {
            n: g.n,
            arcs: g.arcs(),
        }
    }
}

impl TryFrom<ArcList> for Digraph {
    type Error = Error;

    fn try_from(a: ArcList) -> Result<Self> {
        Digraph::from_arcs(a.n, a.arcs)
    }
}

/// Result of a vertex-eliminating operation: the new graph plus the
/// old-to-new label map (`None` for eliminated vertices). Survivors keep
/// their relative order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduced {
    pub graph: Digraph,
    pub map: Vec<Option<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompatMode {
    Weak,
    Strong,
}

impl FromStr for CompatMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weak" => Ok(CompatMode::Weak),
            "strong" => Ok(CompatMode::Strong),
            other => Err(Error::Invalid(format!(
                "unknown compatibility mode {other:?}"
            ))),
        }
    }
}

impl fmt::Display for CompatMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompatMode::Weak => "weak",
            CompatMode::Strong => "strong",
        })
    }
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digraph(n={}", self.n)?;
        for (i, (u, v)) in self.arcs().into_iter().enumerate() {
            write!(f, "{}{u}->{v}", if i == 0 { "; " } else { ", " })?;
        }
        write!(f, ")")
    }
}

impl Digraph {
    pub fn empty(n: usize) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::bound("vertex count", MAX_VERTICES as u64, n as u64));
        }
        Ok(Digraph {
            n,
            out: vec![0; n],
            inn: vec![0; n],
        })
    }

    pub fn from_arcs<I>(n: usize, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Digraph::empty(n)?;
        for (u, v) in arcs {
            g.add_arc(u, v)?;
        }
        Ok(g)
    }

    /// Builds the graph whose out-neighbourhoods are the given masks.
    pub(crate) fn from_out_masks(out: Vec<u64>) -> Self {
        let n = out.len();
        debug_assert!(n <= MAX_VERTICES);
        let mut inn = vec![0u64; n];
        for (u, &o) in out.iter().enumerate() {
            for v in members(o) {
                inn[v] |= bit(u);
            }
        }
        Digraph { n, out, inn }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.n,
            })
        }
    }

    /// Adds `(u, v)`; returns `false` if it was already present.
    pub fn add_arc(&mut self, u: usize, v: usize) -> Result<bool> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        let fresh = self.out[u] & bit(v) == 0;
        self.out[u] |= bit(v);
        self.inn[v] |= bit(u);
        Ok(fresh)
    }

    pub fn remove_arc(&mut self, u: usize, v: usize) -> bool {
        if !self.has_arc(u, v) {
            return false;
        }
        self.out[u] &= !bit(v);
        self.inn[v] &= !bit(u);
        true
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.out[u] & bit(v) != 0
    }

    /// Arcs in lexicographic order.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| members(self.out[u]).map(move |v| (u, v)))
            .collect()
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(|m| m.count_ones() as usize).sum()
    }

    pub fn out_mask(&self, v: usize) -> u64 {
        self.out[v]
    }

    pub fn in_mask(&self, v: usize) -> u64 {
        self.inn[v]
    }

    pub fn out_neighbours(&self, v: usize) -> Vec<usize> {
        mask_to_vec(self.out[v])
    }

    pub fn in_neighbours(&self, v: usize) -> Vec<usize> {
        mask_to_vec(self.inn[v])
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.inn[v].count_ones() as usize
    }

    pub fn has_loop(&self, v: usize) -> bool {
        self.has_arc(v, v)
    }

    pub fn loops(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.has_loop(v)).collect()
    }

    pub fn is_loopless(&self) -> bool {
        (0..self.n).all(|v| !self.has_loop(v))
    }

    pub(crate) fn require_loopless(&self) -> Result<()> {
        let loops = self.loops();
        if loops.is_empty() {
            Ok(())
        } else {
            Err(Error::LoopsPresent(loops))
        }
    }

    /// Symmetric arc set.
    pub fn is_undirected(&self) -> bool {
        (0..self.n).all(|v| self.out[v] == self.inn[v])
    }

    /// Neighbours joined to `v` by arcs in both directions, `v` excluded.
    pub(crate) fn sym_mask(&self, v: usize) -> u64 {
        self.out[v] & self.inn[v] & !bit(v)
    }

    /// Vertices with no arc to or from any other vertex.
    pub fn isolated_vertices(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&v| (self.out[v] | self.inn[v]) & !bit(v) == 0)
            .collect()
    }

    pub fn is_subgraph_of(&self, other: &Digraph) -> bool {
        self.n == other.n && self.out.iter().zip(&other.out).all(|(a, b)| a & !b == 0)
    }

    /// Validates a vertex list and returns it as a mask.
    pub fn vertex_mask(&self, set: &[usize]) -> Result<u64> {
        let mut mask = 0;
        for &v in set {
            self.check_vertex(v)?;
            mask |= bit(v);
        }
        Ok(mask)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub(crate) fn full(&self) -> u64 {
        full_mask(self.n)
    }

    /// Whether `G[mask]` has no cycle (a loop counts as a cycle).
    pub(crate) fn is_acyclic_mask(&self, mask: u64) -> bool {
        self.topological_order_mask(mask).is_some()
    }

    /// Topological order of `G[mask]`, ties broken by label.
    pub(crate) fn topological_order_mask(&self, mask: u64) -> Option<Vec<usize>> {
        let mut remaining = mask;
        let mut order = Vec::with_capacity(mask.count_ones() as usize);
        while remaining != 0 {
            let source = members(remaining).find(|&v| self.inn[v] & remaining == 0)?;
            order.push(source);
            remaining &= !bit(source);
        }
        Some(order)
    }

    pub fn is_acyclic_set(&self, set: &[usize]) -> Result<bool> {
        Ok(self.is_acyclic_mask(self.vertex_mask(set)?))
    }

    pub fn is_acyclic(&self) -> bool {
        self.is_acyclic_mask(self.full())
    }

    pub(crate) fn require_acyclic(&self, set: &[usize]) -> Result<u64> {
        let mask = self.vertex_mask(set)?;
        if self.is_acyclic_mask(mask) {
            Ok(mask)
        } else {
            Err(Error::NotAcyclic {
                set: mask_to_vec(mask),
            })
        }
    }

    /// Topological order of `G[set]`, or `None` if it has a cycle.
    pub fn topological_order(&self, set: &[usize]) -> Result<Option<Vec<usize>>> {
        Ok(self.topological_order_mask(self.vertex_mask(set)?))
    }

    /// Vertices reachable from `from` by paths of length >= 1 inside `within`.
    pub(crate) fn reach_within(&self, from: usize, within: u64) -> u64 {
        let mut seen = 0u64;
        let mut frontier = self.out[from] & within;
        while frontier != 0 {
            seen |= frontier;
            let mut next = 0;
            for v in members(frontier) {
                next |= self.out[v];
            }
            frontier = next & within & !seen;
        }
        seen
    }

    /// Keeps the vertices in `keep`, relabelled by rank.
    pub(crate) fn compact(&self, keep: u64) -> Reduced {
        let mut map = vec![None; self.n];
        for (new, old) in members(keep).enumerate() {
            map[old] = Some(new);
        }
        let remap =
            |m: u64| members(m & keep).fold(0u64, |acc, v| acc | bit(map[v].expect("kept vertex")));
        let out = members(keep).map(|v| remap(self.out[v])).collect();
        Reduced {
            graph: Digraph::from_out_masks(out),
            map,
        }
    }

    /// The induced subgraph `G[set]`.
    pub fn induced(&self, set: &[usize]) -> Result<Reduced> {
        Ok(self.compact(self.vertex_mask(set)?))
    }

    /// `G \ set`.
    pub fn remove_vertices(&self, set: &[usize]) -> Result<Reduced> {
        let mask = self.vertex_mask(set)?;
        Ok(self.compact(self.full() & !mask))
    }

    pub fn add_loops(&self) -> Digraph {
        let mut g = self.clone();
        for v in 0..g.n {
            g.out[v] |= bit(v);
            g.inn[v] |= bit(v);
        }
        g
    }

    pub fn without_loops(&self) -> Digraph {
        let mut g = self.clone();
        for v in 0..g.n {
            g.out[v] &= !bit(v);
            g.inn[v] &= !bit(v);
        }
        g
    }

    /// Adds `(v,u)` for every arc `(u,v)`.
    pub fn symmetric_closure(&self) -> Digraph {
        let out = (0..self.n).map(|v| self.out[v] | self.inn[v]).collect();
        Digraph::from_out_masks(out)
    }

    /// Loopless complement of an undirected graph.
    pub fn complement(&self) -> Result<Digraph> {
        if !self.is_undirected() {
            return Err(Error::Precondition(
                "complement expects an undirected graph".into(),
            ));
        }
        let full = self.full();
        let out = (0..self.n).map(|v| full & !self.out[v] & !bit(v)).collect();
        Ok(Digraph::from_out_masks(out))
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Digraph> {
        if perm.len() != self.n {
            return Err(Error::Invalid(
                "permutation length differs from vertex count".into(),
            ));
        }
        let mut seen = 0u64;
        for &p in perm {
            self.check_vertex(p)?;
            seen |= bit(p);
        }
        if seen != self.full() {
            return Err(Error::Invalid("not a permutation".into()));
        }
        Digraph::from_arcs(
            self.n,
            self.arcs().into_iter().map(|(u, v)| (perm[u], perm[v])),
        )
    }

    /// `G^{-v}`: removes a loop-free `v` and adds `(u,w)` for every
    /// `u -> v -> w`. A looped `v` leaves the graph unchanged.
    pub fn reduce_vertex(&self, v: usize) -> Result<Reduced> {
        self.check_vertex(v)?;
        if self.has_loop(v) {
            return Ok(Reduced {
                graph: self.clone(),
                map: (0..self.n).map(Some).collect(),
            });
        }
        let mut out = self.out.clone();
        for u in members(self.inn[v]) {
            out[u] |= self.out[v];
        }
        Ok(Digraph::from_out_masks(out).compact(self.full() & !bit(v)))
    }

    /// Folds [`reduce_vertex`](Self::reduce_vertex) over `seq`, given in
    /// original labels. Vertices carrying a loop at their turn stay.
    pub fn reduce_sequence(&self, seq: &[usize]) -> Result<Reduced> {
        let mut current = Reduced {
            graph: self.clone(),
            map: (0..self.n).map(Some).collect(),
        };
        for &v in seq {
            self.check_vertex(v)?;
            let Some(local) = current.map[v] else {
                return Err(Error::Invalid(format!(
                    "vertex {v} repeated in reduction sequence"
                )));
            };
            let step = current.graph.reduce_vertex(local)?;
            for slot in current.map.iter_mut() {
                *slot = slot.and_then(|x| step.map[x]);
            }
            current.graph = step.graph;
        }
        Ok(current)
    }

    /// Whether every vertex of `seq` is loop-free when its turn comes.
    pub fn is_reduction_sequence(&self, seq: &[usize]) -> Result<bool> {
        let mut seen = 0u64;
        for &v in seq {
            self.check_vertex(v)?;
            if seen & bit(v) != 0 {
                return Ok(false);
            }
            seen |= bit(v);
        }
        let r = self.reduce_sequence(seq)?;
        Ok(r.graph.n + seq.len() == self.n)
    }

    /// `G^{-I}` for an acyclic `I`: arc `(u,w)` on `V \ I` iff `(u,w)` is an
    /// arc or some path `u -> ... -> w` has all its internal vertices in `I`.
    pub fn reduce_set(&self, set: &[usize]) -> Result<Reduced> {
        let mask = self.require_acyclic(set)?;
        let mut out = self.out.clone();
        for u in members(self.full() & !mask) {
            let inside = self.reach_within(u, mask);
            for i in members(inside) {
                out[u] |= self.out[i];
            }
        }
        Ok(Digraph::from_out_masks(out).compact(self.full() & !mask))
    }

    /// Path counts `N_I(u, w)` for every `w`, counting paths with at least
    /// one internal vertex, all internal vertices in `mask` (acyclic).
    pub(crate) fn through_counts(&self, mask: u64, u: usize) -> Result<Vec<u64>> {
        let order = self
            .topological_order_mask(mask)
            .ok_or_else(|| Error::NotAcyclic {
                set: mask_to_vec(mask),
            })?;
        let mut to_inner = vec![0u64; self.n];
        for &i in &order {
            let mut c = u64::from(self.has_arc(u, i));
            for j in members(self.inn[i] & mask) {
                c = c
                    .checked_add(to_inner[j])
                    .ok_or_else(|| Error::bound("path count", u64::MAX, u64::MAX))?;
            }
            to_inner[i] = c;
        }
        let mut counts = vec![0u64; self.n];
        for (w, slot) in counts.iter_mut().enumerate() {
            for i in members(self.inn[w] & mask) {
                *slot = slot
                    .checked_add(to_inner[i])
                    .ok_or_else(|| Error::bound("path count", u64::MAX, u64::MAX))?;
            }
        }
        Ok(counts)
    }

    /// `N_I(u, v)`: directed `u -> v` paths whose internal vertices all lie
    /// in `set`, with at least one internal vertex. `include_direct` also
    /// counts the arc `(u, v)` itself.
    pub fn path_count_through(
        &self,
        set: &[usize],
        u: usize,
        v: usize,
        include_direct: bool,
    ) -> Result<u64> {
        let mask = self.require_acyclic(set)?;
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if mask & (bit(u) | bit(v)) != 0 {
            return Err(Error::Precondition(format!(
                "endpoints {u} and {v} must lie outside the set"
            )));
        }
        let through = self.through_counts(mask, u)?[v];
        Ok(through + u64::from(include_direct && self.has_arc(u, v)))
    }

    /// Weak or strong compatibility of a non-empty acyclic set, checked over
    /// ordered pairs of distinct vertices outside it.
    pub fn compatibility(&self, set: &[usize], mode: CompatMode) -> Result<bool> {
        if set.is_empty() {
            return Err(Error::Precondition(
                "compatibility needs a non-empty set".into(),
            ));
        }
        let mask = self.require_acyclic(set)?;
        Ok(self.compatibility_mask(mask, mode))
    }

    pub(crate) fn compatibility_mask(&self, mask: u64, mode: CompatMode) -> bool {
        self.first_incompatible_pair(mask, mode).is_none()
    }

    /// First ordered pair `(u, v)` violating the condition, if any.
    pub(crate) fn first_incompatible_pair(
        &self,
        mask: u64,
        mode: CompatMode,
    ) -> Option<(usize, usize)> {
        let outside = self.full() & !mask;
        for u in members(outside) {
            let counts = self.through_counts(mask, u).expect("acyclic set");
            for v in members(outside & !bit(u)) {
                let arc = self.has_arc(u, v);
                let ok = match mode {
                    CompatMode::Strong => arc == (counts[v] >= 1),
                    CompatMode::Weak => {
                        if arc {
                            counts[v] >= 1
                        } else {
                            counts[v] != 1
                        }
                    }
                };
                if !ok {
                    return Some((u, v));
                }
            }
        }
        None
    }

    /// Disjoint union with every arc in both directions between the parts.
    /// `other`'s vertices are shifted by `self.n()`.
    pub fn bidirectional_union(&self, other: &Digraph) -> Result<Digraph> {
        let n = self.n + other.n;
        let mut g = Digraph::empty(n)?;
        for (u, v) in self.arcs() {
            g.add_arc(u, v)?;
        }
        for (u, v) in other.arcs() {
            g.add_arc(u + self.n, v + self.n)?;
        }
        for a in 0..self.n {
            for b in self.n..n {
                g.add_arc(a, b)?;
                g.add_arc(b, a)?;
            }
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_graph() -> Digraph {
        // Labels shifted to 0-based.
        Digraph::from_arcs(4, [(0, 1), (1, 0), (2, 0), (3, 0), (3, 1), (1, 2), (2, 3)]).unwrap()
    }

    #[test]
    fn reduce_vertex_matches_example() {
        let r = example_graph().reduce_vertex(3).unwrap();
        let expected = Digraph::from_arcs(3, [(0, 1), (1, 0), (2, 0), (1, 2), (2, 1)]).unwrap();
        assert_eq!(r.graph, expected);
        assert_eq!(r.map, vec![Some(0), Some(1), Some(2), None]);
    }

    #[test]
    fn reduce_set_matches_example() {
        let r = example_graph().reduce_set(&[2, 3]).unwrap();
        let expected = Digraph::from_arcs(2, [(0, 1), (1, 0), (1, 1)]).unwrap();
        assert_eq!(r.graph, expected);
    }

    #[test]
    fn looped_vertex_is_kept() {
        let g = Digraph::from_arcs(2, [(0, 0), (0, 1)]).unwrap();
        assert_eq!(g.reduce_vertex(0).unwrap().graph, g);
    }

    #[test]
    fn path_contraction() {
        let g = Digraph::from_arcs(3, [(0, 1), (1, 2)]).unwrap();
        let r = g.reduce_vertex(1).unwrap();
        assert_eq!(r.graph, Digraph::from_arcs(2, [(0, 1)]).unwrap());
    }

    #[test]
    fn empty_set_and_empty_graph() {
        let g = example_graph();
        assert_eq!(g.reduce_set(&[]).unwrap().graph, g);
        let e = Digraph::empty(0).unwrap();
        assert_eq!(e.reduce_set(&[]).unwrap().graph, e);
    }

    #[test]
    fn reduce_set_rejects_cycles() {
        let g = Digraph::from_arcs(2, [(0, 1), (1, 0)]).unwrap();
        assert!(matches!(
            g.reduce_set(&[0, 1]),
            Err(Error::NotAcyclic { .. })
        ));
        assert!(matches!(
            g.reduce_vertex(5),
            Err(Error::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn path_count_excludes_direct_arc_by_default() {
        let g = Digraph::from_arcs(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(g.path_count_through(&[1], 0, 2, false).unwrap(), 1);
        assert_eq!(g.path_count_through(&[1], 0, 2, true).unwrap(), 2);
        let h = Digraph::from_arcs(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(h.path_count_through(&[1], 0, 2, false).unwrap(), 1);
    }

    #[test]
    fn compatibility_on_triangle_free_cycle() {
        let c5 = Digraph::from_arcs(5, (0..5).flat_map(|i| [(i, (i + 1) % 5), ((i + 1) % 5, i)]))
            .unwrap();
        // {0, 2} is independent, and the edge 3-4 has no path through it.
        assert!(!c5.compatibility(&[0, 2], CompatMode::Weak).unwrap());
        assert!(c5.compatibility(&[], CompatMode::Weak).is_err());
    }

    #[test]
    fn union_of_two_singletons_is_k2() {
        let e1 = Digraph::empty(1).unwrap();
        let u = e1.bidirectional_union(&e1).unwrap();
        assert_eq!(u, Digraph::from_arcs(2, [(0, 1), (1, 0)]).unwrap());
    }

    #[test]
    fn reduction_sequence_detection() {
        let g = Digraph::from_arcs(2, [(0, 1), (1, 0)]).unwrap();
        assert!(g.is_reduction_sequence(&[0]).unwrap());
        // After removing 0, vertex 1 has a loop.
        assert!(!g.is_reduction_sequence(&[0, 1]).unwrap());
    }
}
