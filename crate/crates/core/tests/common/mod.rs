//! Shared fixtures and brute-force oracles. The oracles work from arc lists
//! and explicit enumeration only, independent of the library's solvers.
#![allow(dead_code)]

use guesslab::{CodingFunction, Digraph};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn digraph(n: usize, arcs: &[(usize, usize)]) -> Digraph {
    Digraph::from_arcs(n, arcs.iter().copied()).unwrap()
}

pub fn undirected(n: usize, edges: &[(usize, usize)]) -> Digraph {
    Digraph::from_arcs(n, edges.iter().flat_map(|&(u, v)| [(u, v), (v, u)])).unwrap()
}

pub fn random_digraph(rng: &mut ChaCha8Rng, n: usize, p: f64, loops: bool) -> Digraph {
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if (u != v || loops) && rng.gen_bool(p) {
                arcs.push((u, v));
            }
        }
    }
    digraph(n, &arcs)
}

/// Random function with supports of size at most `max_in`.
pub fn random_function(rng: &mut ChaCha8Rng, n: usize, q: u32, max_in: usize) -> CodingFunction {
    let mut support = Vec::new();
    let mut tables = Vec::new();
    for _ in 0..n {
        let size = rng.gen_range(0..=max_in.min(n));
        let mut s: Vec<usize> = (0..n).collect();
        for i in 0..n {
            let j = rng.gen_range(i..n);
            s.swap(i, j);
        }
        s.truncate(size);
        s.sort_unstable();
        let rows = (q as usize).pow(size as u32);
        tables.push((0..rows).map(|_| rng.gen_range(0..q)).collect());
        support.push(s);
    }
    CodingFunction::new(n, q, support, tables).unwrap()
}

/// All digraphs on `n` vertices (optionally with loops), by arc subsets.
pub fn all_digraphs(n: usize, loops: bool) -> Vec<Digraph> {
    let slots: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..n).map(move |v| (u, v)))
        .filter(|&(u, v)| loops || u != v)
        .collect();
    (0u64..1 << slots.len())
        .map(|m| {
            let arcs: Vec<(usize, usize)> = (0..slots.len())
                .filter(|&i| m >> i & 1 == 1)
                .map(|i| slots[i])
                .collect();
            digraph(n, &arcs)
        })
        .collect()
}

/// All loopless undirected graphs on `n` vertices.
pub fn all_undirected(n: usize) -> Vec<Digraph> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    (0u64..1 << pairs.len())
        .map(|m| {
            let edges: Vec<(usize, usize)> = (0..pairs.len())
                .filter(|&i| m >> i & 1 == 1)
                .map(|i| pairs[i])
                .collect();
            undirected(n, &edges)
        })
        .collect()
}

pub fn is_connected(g: &Digraph) -> bool {
    let n = g.n();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for (a, b) in g.arcs() {
            for (x, y) in [(a, b), (b, a)] {
                if x == u && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    seen.iter().all(|&s| s)
}

fn arc_set(g: &Digraph) -> Vec<Vec<bool>> {
    let mut m = vec![vec![false; g.n()]; g.n()];
    for (u, v) in g.arcs() {
        m[u][v] = true;
    }
    m
}

/// Acyclicity of `G[set]` by repeatedly deleting sinks.
pub fn acyclic(g: &Digraph, set: u64) -> bool {
    let a = arc_set(g);
    let mut alive: Vec<usize> = (0..g.n()).filter(|&v| set >> v & 1 == 1).collect();
    loop {
        let before = alive.len();
        let snapshot = alive.clone();
        alive.retain(|&u| snapshot.iter().any(|&v| a[u][v]));
        if alive.is_empty() {
            return true;
        }
        if alive.len() == before {
            return false;
        }
    }
}

pub fn brute_k(g: &Digraph) -> usize {
    let n = g.n();
    (0u64..1 << n)
        .filter(|&s| acyclic(g, ((1u64 << n) - 1) & !s))
        .map(|s| s.count_ones() as usize)
        .min()
        .unwrap()
}

/// Maximum acyclic sets, as sorted vertex lists, sorted.
pub fn brute_max_acyclic(g: &Digraph) -> Vec<Vec<usize>> {
    let n = g.n();
    let alpha = n - brute_k(g);
    let mut out: Vec<Vec<usize>> = (0u64..1 << n)
        .filter(|&s| s.count_ones() as usize == alpha && acyclic(g, s))
        .map(|s| (0..n).filter(|&v| s >> v & 1 == 1).collect())
        .collect();
    out.sort();
    out
}

/// Simple cycles as vertex masks.
pub fn simple_cycles(g: &Digraph) -> Vec<u64> {
    let a = arc_set(g);
    let n = g.n();
    let mut found = Vec::new();
    fn walk(a: &[Vec<bool>], start: usize, u: usize, mask: u64, found: &mut Vec<u64>) {
        for w in 0..a.len() {
            if !a[u][w] {
                continue;
            }
            if w == start {
                found.push(mask);
            } else if w > start && mask >> w & 1 == 0 {
                walk(a, start, w, mask | 1 << w, found);
            }
        }
    }
    for s in 0..n {
        walk(&a, s, s, 1 << s, &mut found);
    }
    found.sort_unstable();
    found.dedup();
    found
}

fn max_disjoint(sets: &[u64], used: u64) -> usize {
    let mut best = 0;
    for (i, &s) in sets.iter().enumerate() {
        if s & used == 0 {
            best = best.max(1 + max_disjoint(&sets[i + 1..], used | s));
        }
    }
    best
}

pub fn brute_c(g: &Digraph) -> usize {
    max_disjoint(&simple_cycles(g), 0)
}

pub fn brute_mu(g: &Digraph) -> usize {
    let edges: Vec<u64> = g
        .arcs()
        .into_iter()
        .filter(|&(u, v)| u < v && g.has_arc(v, u))
        .map(|(u, v)| 1u64 << u | 1u64 << v)
        .collect();
    max_disjoint(&edges, 0)
}

fn is_clique(g: &Digraph, s: u64) -> bool {
    (0..g.n()).all(|u| {
        s >> u & 1 == 0
            || (0..g.n()).all(|v| v == u || s >> v & 1 == 0 || (g.has_arc(u, v) && g.has_arc(v, u)))
    })
}

/// Minimum number of cliques partitioning the vertices.
pub fn brute_cp(g: &Digraph) -> usize {
    fn go(g: &Digraph, rest: u64) -> usize {
        if rest == 0 {
            return 0;
        }
        let low = rest.trailing_zeros();
        let others = rest & !(1u64 << low);
        let mut best = usize::MAX;
        let mut sub = others;
        loop {
            let c = sub | 1u64 << low;
            if is_clique(g, c) {
                best = best.min(1 + go(g, rest & !c));
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & others;
        }
        best
    }
    go(g, (1u64 << g.n()) - 1)
}

/// Number of directed `u -> v` paths with at least one internal vertex,
/// all internal vertices in `set`.
pub fn brute_paths(g: &Digraph, set: u64, u: usize, v: usize) -> u64 {
    let a = arc_set(g);
    fn walk(a: &[Vec<bool>], set: u64, x: usize, v: usize, seen: u64) -> u64 {
        let mut total = 0;
        for w in 0..a.len() {
            if !a[x][w] {
                continue;
            }
            if w == v && seen != 0 {
                total += 1;
            }
            if set >> w & 1 == 1 && seen >> w & 1 == 0 {
                total += walk(a, set, w, v, seen | 1 << w);
            }
        }
        total
    }
    walk(&a, set, u, v, 0)
}

/// Number of in-dominating sets of each size.
pub fn brute_ids(g: &Digraph) -> Vec<u64> {
    let n = g.n();
    let mut counts = vec![0u64; n + 1];
    for x in 0u64..1 << n {
        let ok = (0..n).all(|v| {
            let inn = g.in_neighbours(v);
            inn.is_empty() || x >> v & 1 == 1 || inn.iter().any(|&u| x >> u & 1 == 1)
        });
        if ok {
            counts[x.count_ones() as usize] += 1;
        }
    }
    counts
}

/// Decodes `index` into `n` base-`q` digits, most significant first.
pub fn state(index: u64, n: usize, q: u32) -> Vec<u32> {
    let mut x = vec![0u32; n];
    let mut r = index;
    for slot in x.iter_mut().rev() {
        *slot = (r % u64::from(q)) as u32;
        r /= u64::from(q);
    }
    x
}

pub fn brute_fixed_count(f: &CodingFunction) -> u64 {
    let n = f.n();
    let q = f.q();
    (0..u64::from(q).pow(n as u32))
        .filter(|&i| {
            let x = state(i, n, q);
            f.eval(&x) == x
        })
        .count() as u64
}

/// Essential-dependence graph by flipping one coordinate at a time.
pub fn brute_interaction(f: &CodingFunction) -> Digraph {
    let n = f.n();
    let q = f.q();
    let mut arcs = Vec::new();
    for i in 0..u64::from(q).pow(n as u32) {
        let x = state(i, n, q);
        let fx = f.eval(&x);
        for u in 0..n {
            for b in 0..q {
                let mut y = x.clone();
                y[u] = b;
                let fy = f.eval(&y);
                for v in 0..n {
                    if fx[v] != fy[v] {
                        arcs.push((u, v));
                    }
                }
            }
        }
    }
    digraph(n, &arcs)
}

pub fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}
