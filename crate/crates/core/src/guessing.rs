//! Guessing numbers. `g(G,q)` is the largest fixed-point count of a coding
//! function whose interaction graph is a subgraph of `G`; the strict variant
//! `h(G,q)` requires the interaction graph to be `G` itself.
//!
//! All values are reported as exact fixed-point counts; `log_q` appears only
//! in [`GuessingReport::value`].

use std::sync::atomic::{AtomicI64, Ordering};

use serde::{Deserialize, Serialize};

use crate::coding::{decode_state, CodingFunction};
use crate::digraph::{bit, members, params, Digraph};
use crate::error::{Error, Result};
use crate::limits::{bounded_pow, checked_pow, Limits};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GuessKind {
    /// `g(G,q)`: interaction graph contained in `G`.
    G,
    /// `h(G,q)`: interaction graph equal to `G`.
    H,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ConflictGraph,
    Exhaustive,
    IdsFormula,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuessingReport {
    pub graph: Digraph,
    pub q: u32,
    pub kind: GuessKind,
    pub method: Method,
    /// Maximum number of fixed points.
    pub max_fixed: u64,
    pub witness: Option<CodingFunction>,
}

impl GuessingReport {
    /// `log_q(max_fixed)`, for presentation.
    pub fn value(&self) -> f64 {
        (self.max_fixed as f64).ln() / f64::from(self.q).ln()
    }
}

/// Which local functions an exhaustive search may use at each vertex. All
/// of them read only in-neighbours in `G`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TableFilter {
    /// Any table: interaction graph contained in `G`.
    Any,
    /// Every in-neighbour essential: interaction graph equal to `G`.
    ExactSupport,
    /// Non-decreasing in every argument.
    NonDecreasing,
}

// ---------------------------------------------------------------------------
// Conflict graph

/// Maximum clique by greedy-colouring branch and bound over bitsets.
struct MaxClique<'a> {
    adj: &'a [Vec<u64>],
    best: Vec<usize>,
}

fn bits_of(set: &[u64]) -> impl Iterator<Item = usize> + '_ {
    set.iter()
        .enumerate()
        .flat_map(|(w, &word)| members(word).map(move |b| w * 64 + b))
}

impl MaxClique<'_> {
    fn colour_order(&self, p: &[u64]) -> (Vec<usize>, Vec<usize>) {
        let mut uncoloured = p.to_vec();
        let mut order = Vec::new();
        let mut colours = Vec::new();
        let mut colour = 0;
        while uncoloured.iter().any(|&w| w != 0) {
            colour += 1;
            let mut q = uncoloured.clone();
            loop {
                let Some(v) = bits_of(&q).next() else { break };
                uncoloured[v / 64] &= !(1u64 << (v % 64));
                q[v / 64] &= !(1u64 << (v % 64));
                for (qw, aw) in q.iter_mut().zip(&self.adj[v]) {
                    *qw &= !aw;
                }
                order.push(v);
                colours.push(colour);
            }
        }
        (order, colours)
    }

    fn expand(&mut self, r: &mut Vec<usize>, mut p: Vec<u64>) {
        let (order, colours) = self.colour_order(&p);
        for idx in (0..order.len()).rev() {
            if r.len() + colours[idx] <= self.best.len() {
                return;
            }
            let v = order[idx];
            r.push(v);
            let next: Vec<u64> = p.iter().zip(&self.adj[v]).map(|(a, b)| a & b).collect();
            if next.iter().all(|&w| w == 0) {
                if r.len() > self.best.len() {
                    self.best = r.clone();
                }
            } else {
                self.expand(r, next);
            }
            r.pop();
            p[v / 64] &= !(1u64 << (v % 64));
        }
    }
}

/// `g(G,q)` as a maximum set of pairwise compatible states. Two states are
/// compatible when no vertex sees equal in-neighbour values yet differs
/// itself, i.e. every vertex where they differ has an in-neighbour where
/// they differ.
pub fn guessing_number(g: &Digraph, q: u32, limits: &Limits) -> Result<GuessingReport> {
    check_q(q)?;
    let n = g.n();
    let total = bounded_pow(
        "conflict graph states",
        u64::from(q),
        n,
        limits.conflict_states,
    )? as usize;
    // good[d]: states differing exactly on d are compatible.
    let good: Vec<bool> = (0..1u64 << n)
        .map(|d| members(d).all(|v| g.in_mask(v) & d != 0))
        .collect();
    let states: Vec<Vec<u32>> = (0..total as u64)
        .map(|i| {
            let mut x = vec![0u32; n];
            decode_state(i, q, &mut x);
            x
        })
        .collect();
    let words = total.div_ceil(64);
    let adj: Vec<Vec<u64>> = par::map(&states, |x| {
        let mut row = vec![0u64; words];
        for (j, y) in states.iter().enumerate() {
            let d = (0..n)
                .filter(|&v| x[v] != y[v])
                .fold(0u64, |a, v| a | bit(v));
            if d != 0 && good[d as usize] {
                row[j / 64] |= 1u64 << (j % 64);
            }
        }
        row
    });
    // Translating every state by a constant preserves compatibility, so some
    // maximum clique contains the zero state.
    let mut search = MaxClique {
        adj: &adj,
        best: vec![0],
    };
    let mut r = vec![0];
    if adj[0].iter().any(|&w| w != 0) {
        search.expand(&mut r, adj[0].clone());
    }
    let clique: Vec<&Vec<u32>> = search.best.iter().map(|&i| &states[i]).collect();
    let witness = witness_from_states(g, q, &clique)?;
    Ok(GuessingReport {
        graph: g.clone(),
        q,
        kind: GuessKind::G,
        method: Method::ConflictGraph,
        max_fixed: clique.len() as u64,
        witness: Some(witness),
    })
}

/// The function on `G` reading in-neighbours that fixes each given state;
/// rows no state claims map to 0.
fn witness_from_states(g: &Digraph, q: u32, states: &[&Vec<u32>]) -> Result<CodingFunction> {
    let support: Vec<Vec<usize>> = (0..g.n()).map(|v| g.in_neighbours(v)).collect();
    let mut tables = Vec::with_capacity(g.n());
    for (v, s) in support.iter().enumerate() {
        let rows = bounded_pow("local table size", u64::from(q), s.len(), u64::MAX)? as usize;
        let mut table = vec![0u32; rows];
        for x in states {
            let row = s
                .iter()
                .fold(0usize, |a, &u| a * q as usize + x[u] as usize);
            table[row] = x[v];
        }
        tables.push(table);
    }
    CodingFunction::new(g.n(), q, support, tables)
}

fn check_q(q: u32) -> Result<()> {
    if q < 2 {
        Err(Error::Invalid(format!(
            "alphabet size must be at least 2, got {q}"
        )))
    } else {
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Exhaustive function search

fn table_passes(table: &[u32], q: usize, len: usize, filter: TableFilter) -> bool {
    let strides = (0..len).map(|j| q.pow((len - 1 - j) as u32));
    match filter {
        TableFilter::Any => true,
        TableFilter::ExactSupport => strides.into_iter().all(|stride| {
            (0..table.len())
                .filter(|&r| (r / stride) % q == 0)
                .any(|r| (1..q).any(|d| table[r + d * stride] != table[r]))
        }),
        TableFilter::NonDecreasing => strides.into_iter().all(|stride| {
            (0..table.len()).all(|r| (r / stride) % q == q - 1 || table[r] <= table[r + stride])
        }),
    }
}

/// Every table over `len` inputs passing `filter`, in lexicographic order.
fn candidate_tables(
    q: u32,
    len: usize,
    filter: TableFilter,
    limits: &Limits,
) -> Result<Vec<Vec<u32>>> {
    let rows = bounded_pow("local table size", u64::from(q), len, limits.table_space)? as usize;
    let count = bounded_pow("local table space", u64::from(q), rows, limits.table_space)?;
    let mut out = Vec::new();
    let mut table = vec![0u32; rows];
    for _ in 0..count {
        if table_passes(&table, q as usize, len, filter) {
            out.push(table.clone());
        }
        for slot in table.iter_mut().rev() {
            *slot += 1;
            if *slot < q {
                break;
            }
            *slot = 0;
        }
    }
    Ok(out)
}

struct Search<'a> {
    masks: &'a [Vec<Vec<u64>>],
    shared: &'a AtomicI64,
}

impl Search<'_> {
    /// First maximiser (in lexicographic order of choices) below `acc`.
    fn dfs(&self, v: usize, acc: &[u64], choice: &mut Vec<usize>, best: &mut (i64, Vec<usize>)) {
        if v == self.masks.len() {
            let c = acc.iter().map(|w| w.count_ones() as i64).sum::<i64>();
            if c > best.0 {
                *best = (c, choice.clone());
                self.shared.fetch_max(c, Ordering::Relaxed);
            }
            return;
        }
        let mut next = vec![0u64; acc.len()];
        for (t, mask) in self.masks[v].iter().enumerate() {
            let mut c = 0i64;
            for ((n, a), m) in next.iter_mut().zip(acc).zip(mask) {
                *n = a & m;
                c += n.count_ones() as i64;
            }
            if c <= best.0 || c < self.shared.load(Ordering::Relaxed) {
                continue;
            }
            choice.push(t);
            self.dfs(v + 1, &next, choice, best);
            choice.pop();
        }
    }
}

/// Maximum fixed-point count over all functions whose local function at
/// each vertex reads its in-neighbours in `G` and passes `filter`, with the
/// lexicographically first maximiser as witness.
pub fn exhaustive_max_fixed(
    g: &Digraph,
    q: u32,
    filter: TableFilter,
    limits: &Limits,
) -> Result<(u64, CodingFunction)> {
    check_q(q)?;
    let n = g.n();
    let support: Vec<Vec<usize>> = (0..n).map(|v| g.in_neighbours(v)).collect();
    let mut cands = Vec::with_capacity(n);
    let mut combos = 1u64;
    for s in &support {
        let c = candidate_tables(q, s.len(), filter, limits)?;
        combos = combos.saturating_mul(c.len() as u64);
        cands.push(c);
    }
    if combos > limits.function_combinations {
        return Err(Error::bound(
            "function combinations",
            limits.function_combinations,
            combos,
        ));
    }
    if cands.iter().any(|c| c.is_empty()) {
        return Err(Error::SearchFailed(format!(
            "no local function at alphabet size {q} meets the support constraint"
        )));
    }
    let total = bounded_pow("state space", u64::from(q), n, limits.max_states)? as usize;
    let words = total.div_ceil(64);
    let mut x = vec![0u32; n];
    let rows: Vec<Vec<(usize, u32)>> = (0..total)
        .map(|i| {
            decode_state(i as u64, q, &mut x);
            (0..n)
                .map(|v| {
                    let row = support[v]
                        .iter()
                        .fold(0usize, |a, &u| a * q as usize + x[u] as usize);
                    (row, x[v])
                })
                .collect()
        })
        .collect();
    let masks: Vec<Vec<Vec<u64>>> = (0..n)
        .map(|v| {
            cands[v]
                .iter()
                .map(|t| {
                    let mut m = vec![0u64; words];
                    for (i, r) in rows.iter().enumerate() {
                        if t[r[v].0] == r[v].1 {
                            m[i / 64] |= 1u64 << (i % 64);
                        }
                    }
                    m
                })
                .collect()
        })
        .collect();
    let mut all = vec![!0u64; words];
    if !total.is_multiple_of(64) {
        all[words - 1] = (1u64 << (total % 64)) - 1;
    }
    let shared = AtomicI64::new(-1);
    let search = Search {
        masks: &masks,
        shared: &shared,
    };
    let (count, choice) = if n == 0 {
        (1, Vec::new())
    } else {
        let firsts: Vec<usize> = (0..masks[0].len()).collect();
        let branches = par::map(&firsts, |&t| {
            let acc: Vec<u64> = all.iter().zip(&masks[0][t]).map(|(a, b)| a & b).collect();
            let mut best = (-1i64, Vec::new());
            let mut choice = vec![t];
            search.dfs(1, &acc, &mut choice, &mut best);
            best
        });
        branches.into_iter().fold(
            (-1i64, Vec::new()),
            |acc, b| if b.0 > acc.0 { b } else { acc },
        )
    };
    let tables = choice
        .iter()
        .enumerate()
        .map(|(v, &t)| cands[v][t].clone())
        .collect();
    let witness = CodingFunction::new(n, q, support, tables)?;
    Ok((count as u64, witness))
}

// ---------------------------------------------------------------------------
// Strict guessing number

/// Function-search size below which the loop-full formula is cross-checked
/// by exhaustive search.
const CROSS_CHECK_COMBINATIONS: u64 = 1 << 20;

fn exact_support_combinations(g: &Digraph, q: u32) -> Option<u64> {
    // Tables with every input essential are fewer than all tables; the full
    // count is a cheap upper bound.
    (0..g.n()).try_fold(1u64, |acc, v| {
        let rows = checked_pow(u64::from(q), g.in_degree(v))?;
        acc.checked_mul(checked_pow(u64::from(q), usize::try_from(rows).ok()?)?)
    })
}

/// `h(G,q)`. Loop-full graphs use the in-dominating set formula (and are
/// cross-checked exhaustively when that is cheap); other graphs need the
/// exhaustive search to fit the configured bounds.
pub fn strict_guessing_number(g: &Digraph, q: u32, limits: &Limits) -> Result<GuessingReport> {
    check_q(q)?;
    if g.n() > 0 && g.loops().len() == g.n() {
        let report = h_loops(&g.without_loops(), q, limits)?;
        if exact_support_combinations(g, q).is_some_and(|c| c <= CROSS_CHECK_COMBINATIONS) {
            let (count, _) = exhaustive_max_fixed(g, q, TableFilter::ExactSupport, limits)?;
            if count != report.max_fixed {
                return Err(Error::SearchFailed(format!(
                    "in-dominating formula gives {} but exhaustive search gives {count}",
                    report.max_fixed
                )));
            }
        }
        return Ok(report);
    }
    let (max_fixed, witness) = exhaustive_max_fixed(g, q, TableFilter::ExactSupport, limits)?;
    Ok(GuessingReport {
        graph: g.clone(),
        q,
        kind: GuessKind::H,
        method: Method::Exhaustive,
        max_fixed,
        witness: Some(witness),
    })
}

/// `h` of the graph with a loop added on every vertex of the loopless `g`:
/// `sum_k (q-1)^k I_k(g)`.
pub fn h_loops(g: &Digraph, q: u32, limits: &Limits) -> Result<GuessingReport> {
    check_q(q)?;
    let counts = params::in_dominating_counts(g, limits)?;
    let overflow = || Error::bound("fixed-point count", u64::MAX, u64::MAX);
    let mut total = 0u64;
    for (k, &c) in counts.iter().enumerate() {
        let term = checked_pow(u64::from(q - 1), k)
            .and_then(|p| p.checked_mul(c))
            .ok_or_else(overflow)?;
        total = total.checked_add(term).ok_or_else(overflow)?;
    }
    let witness = match loopfull_witness(g, q) {
        Ok(f) => Some(f),
        Err(e) if e.is_resource_bound() => None,
        Err(e) => return Err(e),
    };
    Ok(GuessingReport {
        graph: g.add_loops(),
        q,
        kind: GuessKind::H,
        method: Method::IdsFormula,
        max_fixed: total,
        witness,
    })
}

/// On the loop-full version of `g`: `x_i + 1{x_j = 0 for i and all its
/// in-neighbours j} mod q`, or `x_i` for a source. Its fixed points are the
/// states whose support is an in-dominating set.
pub fn loopfull_witness(g: &Digraph, q: u32) -> Result<CodingFunction> {
    check_q(q)?;
    g.require_loopless()?;
    let support: Vec<Vec<usize>> = (0..g.n())
        .map(|v| members(g.in_mask(v) | bit(v)).collect())
        .collect();
    let sources: Vec<bool> = (0..g.n()).map(|v| g.in_degree(v) == 0).collect();
    let inputs = support.clone();
    CodingFunction::from_local(g.n(), q, support, |v, x| {
        if sources[v] || inputs[v].iter().any(|&u| x[u] != 0) {
            x[v]
        } else {
            (x[v] + 1) % q
        }
    })
}

// ---------------------------------------------------------------------------
// Solvability

/// `g(G,q) = k(G)`.
pub fn is_solvable(g: &Digraph, q: u32, limits: &Limits) -> Result<bool> {
    let k = params::feedback_number(g, limits)?;
    let report = guessing_number(g, q, limits)?;
    Ok(checked_pow(u64::from(q), k) == Some(report.max_fixed))
}

/// `c(G) = k(G)`: solvable by routing.
pub fn is_routing_solvable(g: &Digraph, limits: &Limits) -> Result<bool> {
    Ok(params::cycle_packing_number(g, limits)? == params::feedback_number(g, limits)?)
}

/// Largest fixed-point count of a non-decreasing function with interaction
/// graph contained in `G`.
pub fn max_fixed_nondecreasing(
    g: &Digraph,
    q: u32,
    limits: &Limits,
) -> Result<(u64, CodingFunction)> {
    exhaustive_max_fixed(g, q, TableFilter::NonDecreasing, limits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn undirected(n: usize, edges: &[(usize, usize)]) -> Digraph {
        Digraph::from_arcs(n, edges.iter().flat_map(|&(a, b)| [(a, b), (b, a)])).unwrap()
    }

    fn k3() -> Digraph {
        undirected(3, &[(0, 1), (1, 2), (0, 2)])
    }

    #[test]
    fn butterfly_guessing_number() {
        let lim = Limits::default();
        let r = guessing_number(&k3(), 2, &lim).unwrap();
        assert_eq!(r.max_fixed, 4);
        let w = r.witness.unwrap();
        assert_eq!(w.count_fixed_points(&lim).unwrap(), 4);
        assert!(w.interaction_graph().is_subgraph_of(&k3()));
        assert!(is_solvable(&k3(), 2, &lim).unwrap());
        assert!(!is_routing_solvable(&k3(), &lim).unwrap());
    }

    #[test]
    fn acyclic_graph_has_one_fixed_point() {
        let g = Digraph::from_arcs(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(
            guessing_number(&g, 3, &Limits::default())
                .unwrap()
                .max_fixed,
            1
        );
    }

    #[test]
    fn conflict_graph_matches_function_search() {
        let lim = Limits::default();
        for g in [
            k3(),
            Digraph::from_arcs(3, [(0, 1), (1, 2), (2, 0), (0, 0)]).unwrap(),
        ] {
            let a = guessing_number(&g, 2, &lim).unwrap().max_fixed;
            let (b, _) = exhaustive_max_fixed(&g, 2, TableFilter::Any, &lim).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn single_loop_strict() {
        let g = Digraph::from_arcs(1, [(0, 0)]).unwrap();
        assert_eq!(
            strict_guessing_number(&g, 2, &Limits::default())
                .unwrap()
                .max_fixed,
            2
        );
    }

    #[test]
    fn looped_two_cycle_strict() {
        let g = undirected(2, &[(0, 1)]).add_loops();
        let r = strict_guessing_number(&g, 2, &Limits::default()).unwrap();
        assert_eq!(r.max_fixed, 3);
        assert_eq!(r.method, Method::IdsFormula);
    }

    #[test]
    fn h_loops_closed_forms() {
        let lim = Limits::default();
        assert_eq!(h_loops(&k3(), 2, &lim).unwrap().max_fixed, 7);
        let t3 = Digraph::from_arcs(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        assert_eq!(h_loops(&t3, 2, &lim).unwrap().max_fixed, 6);
        assert_eq!(
            h_loops(&Digraph::empty(3).unwrap(), 3, &lim)
                .unwrap()
                .max_fixed,
            27
        );
    }

    #[test]
    fn loopfull_witness_of_k3() {
        let f = loopfull_witness(&k3(), 2).unwrap();
        let fix = f.fixed_points(&Limits::default()).unwrap();
        assert_eq!(fix.len(), 7);
        assert!(!fix.contains(&[0, 0, 0]));
        assert_eq!(f.interaction_graph(), k3().add_loops());
    }

    #[test]
    fn nondecreasing_functions_miss_the_butterfly() {
        let (count, w) = max_fixed_nondecreasing(&k3(), 2, &Limits::default()).unwrap();
        assert_eq!(count, 2);
        assert!(w.is_nondecreasing());
    }

    #[test]
    fn state_cap_is_enforced() {
        let g = Digraph::empty(13).unwrap();
        assert!(guessing_number(&g, 2, &Limits::default())
            .unwrap_err()
            .is_resource_bound());
    }
}
