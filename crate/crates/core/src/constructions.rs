//! Explicit constructions: named graph families, solutions of cliques and
//! balanced complete bipartite graphs, strict linear solutions from strongly
//! compatible acyclic sets, and the reduction gadgets for graphs and coding
//! functions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coding::CodingFunction;
use crate::digraph::params::{max_disjoint_cycles, min_fvs_mask, shortest_cycle};
use crate::digraph::{bit, members, CompatMode, Digraph};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::linear::{inv_mod, inverse_mod_p, is_prime, LinearCodingFunction};

/// Which arcs of the `G_k` family to include where the defining conditions
/// leave a choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GkVariant {
    /// Transitive tournaments on `I` and `J \ j_k`, every `j_b -> j_k`.
    Maximal,
    /// No arcs inside `I`, a directed path `j_1 -> ... -> j_k`.
    Minimal,
}

impl FromStr for GkVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "maximal" | "max" => Ok(GkVariant::Maximal),
            "minimal" | "min" => Ok(GkVariant::Minimal),
            _ => Err(Error::Invalid(format!("unknown G_k variant {s:?}"))),
        }
    }
}

/// Named graphs and families. Labels are 0-based; the centre of a star is
/// the last vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Family {
    /// `K_n`, complete and loopless.
    Complete {
        n: usize,
    },
    /// `E_n`, no arcs.
    Empty {
        n: usize,
    },
    /// `T_n`, arcs `(i, j)` for `i < j`.
    Transitive {
        n: usize,
    },
    /// `iS_n`, arcs into the centre.
    InStar {
        n: usize,
    },
    /// `oS_n`, arcs out of the centre.
    OutStar {
        n: usize,
    },
    /// `S_n`, undirected star.
    Star {
        n: usize,
    },
    /// Undirected cycle `C_n`, `n >= 3`.
    Cycle {
        n: usize,
    },
    /// Directed cycle `0 -> 1 -> ... -> n-1 -> 0`.
    DirectedCycle {
        n: usize,
    },
    /// `K_{a,b}` with parts `0..a` and `a..a+b`.
    CompleteBipartite {
        a: usize,
        b: usize,
    },
    Grotzsch,
    Clebsch,
    /// The interaction graph of the four-variable Boolean example.
    BooleanExample,
    /// Two unicast pairs sharing a detrimental arc.
    TwoPairs,
    /// Strictly linearly solvable, not edge-full.
    SlsExample,
    /// `G_k` on `I = 0..k-1` and `J = k-1..2k-1`.
    Gk {
        k: usize,
        variant: GkVariant,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedGraph {
    pub family: Family,
    pub graph: Digraph,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::Complete { n } => write!(f, "K_{n}"),
            Family::Empty { n } => write!(f, "E_{n}"),
            Family::Transitive { n } => write!(f, "T_{n}"),
            Family::InStar { n } => write!(f, "iS_{n}"),
            Family::OutStar { n } => write!(f, "oS_{n}"),
            Family::Star { n } => write!(f, "S_{n}"),
            Family::Cycle { n } => write!(f, "C_{n}"),
            Family::DirectedCycle { n } => write!(f, "dC_{n}"),
            Family::CompleteBipartite { a, b } => write!(f, "K_{{{a},{b}}}"),
            Family::Grotzsch => write!(f, "Grotzsch"),
            Family::Clebsch => write!(f, "Clebsch"),
            Family::BooleanExample => write!(f, "boolean-example"),
            Family::TwoPairs => write!(f, "two-pairs"),
            Family::SlsExample => write!(f, "sls-example"),
            Family::Gk { k, variant } => write!(f, "G_{k} ({variant:?})"),
        }
    }
}

impl Family {
    /// Parses a family name with its numeric parameters, e.g.
    /// `("clique", [3])`, `("kab", [2, 2])`, `("gk", [3])`.
    pub fn parse(name: &str, params: &[usize]) -> Result<Family> {
        let lower = name.to_ascii_lowercase();
        let arity = |want: usize| -> Result<()> {
            if params.len() == want {
                Ok(())
            } else {
                Err(Error::Invalid(format!(
                    "family {name:?} takes {want} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        let family = match lower.as_str() {
            "k" | "kn" | "clique" | "complete" => {
                arity(1)?;
                Family::Complete { n: params[0] }
            }
            "e" | "en" | "empty" => {
                arity(1)?;
                Family::Empty { n: params[0] }
            }
            "t" | "tn" | "tournament" | "transitive" => {
                arity(1)?;
                Family::Transitive { n: params[0] }
            }
            "is" | "isn" | "instar" => {
                arity(1)?;
                Family::InStar { n: params[0] }
            }
            "os" | "osn" | "outstar" => {
                arity(1)?;
                Family::OutStar { n: params[0] }
            }
            "s" | "sn" | "star" => {
                arity(1)?;
                Family::Star { n: params[0] }
            }
            "c" | "cn" | "cycle" => {
                arity(1)?;
                Family::Cycle { n: params[0] }
            }
            "dc" | "dicycle" | "directed-cycle" => {
                arity(1)?;
                Family::DirectedCycle { n: params[0] }
            }
            "kab" | "bipartite" | "complete-bipartite" => {
                arity(2)?;
                Family::CompleteBipartite {
                    a: params[0],
                    b: params[1],
                }
            }
            "grotzsch" | "grötzsch" => {
                arity(0)?;
                Family::Grotzsch
            }
            "clebsch" => {
                arity(0)?;
                Family::Clebsch
            }
            "boolean-example" => {
                arity(0)?;
                Family::BooleanExample
            }
            "two-pairs" => {
                arity(0)?;
                Family::TwoPairs
            }
            "sls-example" => {
                arity(0)?;
                Family::SlsExample
            }
            "gk" | "g" => {
                arity(1)?;
                Family::Gk {
                    k: params[0],
                    variant: GkVariant::Maximal,
                }
            }
            "gk-min" | "gkmin" => {
                arity(1)?;
                Family::Gk {
                    k: params[0],
                    variant: GkVariant::Minimal,
                }
            }
            _ => return Err(Error::Invalid(format!("unknown graph family {name:?}"))),
        };
        Ok(family)
    }
}

fn undirected(n: usize, edges: &[(usize, usize)]) -> Result<Digraph> {
    Digraph::from_arcs(n, edges.iter().flat_map(|&(u, v)| [(u, v), (v, u)]))
}

/// Builds a named graph.
pub fn named(family: Family) -> Result<NamedGraph> {
    let graph = match family {
        Family::Complete { n } => Digraph::from_arcs(
            n,
            (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))),
        )?,
        Family::Empty { n } => Digraph::empty(n)?,
        Family::Transitive { n } => {
            Digraph::from_arcs(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))?
        }
        Family::InStar { n } | Family::OutStar { n } | Family::Star { n } => {
            if n == 0 {
                return Err(Error::Invalid("a star needs at least one vertex".into()));
            }
            let c = n - 1;
            let arcs = (0..c).flat_map(|i| match family {
                Family::InStar { .. } => vec![(i, c)],
                Family::OutStar { .. } => vec![(c, i)],
                _ => vec![(i, c), (c, i)],
            });
            Digraph::from_arcs(n, arcs)?
        }
        Family::Cycle { n } => {
            if n < 3 {
                return Err(Error::Invalid(format!(
                    "undirected cycle needs n >= 3, got {n}"
                )));
            }
            let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            undirected(n, &edges)?
        }
        Family::DirectedCycle { n } => {
            if n == 0 {
                return Err(Error::Invalid(
                    "a directed cycle needs at least one vertex".into(),
                ));
            }
            Digraph::from_arcs(n, (0..n).map(|i| (i, (i + 1) % n)))?
        }
        Family::CompleteBipartite { a, b } => {
            let edges: Vec<(usize, usize)> = (0..a)
                .flat_map(|i| (a..a + b).map(move |j| (i, j)))
                .collect();
            undirected(a + b, &edges)?
        }
        Family::Grotzsch => grotzsch()?,
        Family::Clebsch => clebsch()?,
        Family::BooleanExample => {
            Digraph::from_arcs(4, [(0, 1), (1, 0), (2, 0), (3, 0), (3, 1), (1, 2), (2, 3)])?
        }
        Family::TwoPairs => Digraph::from_arcs(4, [(0, 2), (2, 0), (1, 3), (3, 1), (0, 3)])?,
        Family::SlsExample => Digraph::from_arcs(
            5,
            [
                (0, 1),
                (0, 2),
                (2, 0),
                (0, 3),
                (3, 0),
                (4, 0),
                (1, 4),
                (2, 3),
                (3, 2),
                (2, 4),
                (4, 2),
                (3, 4),
                (4, 3),
            ],
        )?,
        Family::Gk { k, variant } => gk_family(k, variant)?,
    };
    Ok(NamedGraph { family, graph })
}

/// Outer 5-cycle `0..5`, inner vertices `5..10` (vertex `5 + i` copies the
/// neighbourhood of `i` on the outer cycle), hub `10`.
fn grotzsch() -> Result<Digraph> {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((5 + i, (i + 1) % 5));
        edges.push((5 + i, (i + 4) % 5));
        edges.push((5 + i, 10));
    }
    undirected(11, &edges)
}

/// Folded 5-cube: 4-bit words adjacent when they differ in exactly one bit
/// or in all four.
fn clebsch() -> Result<Digraph> {
    let mut edges = Vec::new();
    for u in 0..16usize {
        for v in u + 1..16 {
            let d = (u ^ v).count_ones();
            if d == 1 || d == 4 {
                edges.push((u, v));
            }
        }
    }
    undirected(16, &edges)
}

/// `G_k` with `i_a = a - 1` and `j_b = k + b - 2` (1-based `a`, `b`).
pub fn gk_family(k: usize, variant: GkVariant) -> Result<Digraph> {
    if k < 2 {
        return Err(Error::Invalid(format!("G_k needs k >= 2, got {k}")));
    }
    let i = |a: usize| a - 1;
    let j = |b: usize| k + b - 2;
    let mut arcs = Vec::new();
    match variant {
        GkVariant::Maximal => {
            for a in 1..k {
                for b in a + 1..k {
                    arcs.push((i(a), i(b)));
                }
            }
            for a in 1..k {
                for b in a + 1..=k {
                    arcs.push((j(a), j(b)));
                }
            }
        }
        GkVariant::Minimal => {
            for b in 1..k {
                arcs.push((j(b), j(b + 1)));
            }
        }
    }
    arcs.push((j(k), j(1)));
    let mut edges = vec![(i(1), j(1))];
    for a in 1..k {
        for b in 2..k {
            edges.push((i(a), j(b)));
        }
    }
    for c in 2..k {
        edges.push((i(c), j(k)));
    }
    arcs.extend(edges.iter().flat_map(|&(u, v)| [(u, v), (v, u)]));
    Digraph::from_arcs(2 * k - 1, arcs)
}

/// `f_i = -sum_{j != i} x_j` on `K_n`; its fixed points are the states
/// summing to 0.
pub fn clique_solution(n: usize, q: u32) -> Result<LinearCodingFunction> {
    if n == 0 {
        return Err(Error::Invalid("clique solution needs n >= 1".into()));
    }
    let matrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0 } else { q - 1 }).collect())
        .collect();
    LinearCodingFunction::new(q, matrix)
}

/// A function with interaction graph exactly `g` and at least `q` fixed
/// points. Vertices on a shortest cycle `c_0 -> ... -> c_{l-1}` copy their
/// predecessor, adding one when some in-neighbour is below it; every other
/// vertex takes the minimum of its in-neighbours (`q - 1` if none).
pub fn unit_witness(g: &Digraph, q: u32) -> Result<CodingFunction> {
    let cycle =
        shortest_cycle(g, g.full()).ok_or(Error::Precondition("graph is acyclic".into()))?;
    let l = cycle.len();
    let mut pred = vec![None; g.n()];
    for (t, &c) in cycle.iter().enumerate() {
        pred[c] = Some(cycle[(t + l - 1) % l]);
    }
    let support: Vec<Vec<usize>> = (0..g.n()).map(|v| g.in_neighbours(v)).collect();
    let inputs = support.clone();
    CodingFunction::from_local(g.n(), q, support, |v, x| match pred[v] {
        Some(p) if inputs[v].iter().all(|&u| x[u] >= x[p]) => x[p],
        Some(p) => (x[p] + 1) % q,
        None => inputs[v].iter().map(|&u| x[u]).min().unwrap_or(q - 1),
    })
}

/// Routing solution: vertices of a maximum packing of disjoint cycles copy
/// their predecessor on the cycle, all others are 0. Has `q^c(G)` fixed
/// points and interaction graph contained in `g`.
pub fn routing_solution(g: &Digraph, q: u32, limits: &Limits) -> Result<LinearCodingFunction> {
    let n = g.n();
    let mut matrix = vec![vec![0u32; n]; n];
    for cycle in max_disjoint_cycles(g, limits)? {
        let l = cycle.len();
        for t in 0..l {
            matrix[cycle[t]][cycle[(t + l - 1) % l]] = 1;
        }
    }
    LinearCodingFunction::new(q, matrix)
}

fn smallest_prime_from(mut p: u64) -> Result<u32> {
    loop {
        let candidate =
            u32::try_from(p).map_err(|_| Error::bound("modulus", u64::from(u32::MAX), p))?;
        if is_prime(candidate) {
            return Ok(candidate);
        }
        p += 1;
    }
}

/// Strict linear solution of a loopless graph from a strongly compatible
/// maximum acyclic set `set`, over the smallest prime exceeding every
/// `N_I(u, v)` with `u, v` outside the set:
/// `f_i = sum_{u in in(i)} x_u` on the set and
/// `f_v = (sum_{i in in(v) & I} x_i - sum_{j in in(v) \ I} N_I(j, v) x_j) / N_I(v, v)`
/// elsewhere. Reducing the set leaves the identity.
pub fn sls_construction(g: &Digraph, set: &[usize]) -> Result<LinearCodingFunction> {
    g.require_loopless()?;
    let mask = g.require_acyclic(set)?;
    if mask == 0 {
        return Err(Error::Precondition("the acyclic set is empty".into()));
    }
    let k = min_fvs_mask(g).count_ones();
    if mask.count_ones() + k != g.n() as u32 {
        return Err(Error::Precondition(format!(
            "set {set:?} is not a maximum acyclic set (k = {k})"
        )));
    }
    if let Some((u, v)) = g.first_incompatible_pair(mask, CompatMode::Strong) {
        return Err(Error::Precondition(format!(
            "set {set:?} is not strongly compatible at ({u}, {v})"
        )));
    }
    let n = g.n();
    let outside = g.full() & !mask;
    let mut counts = vec![Vec::new(); n];
    for u in members(outside) {
        counts[u] = g.through_counts(mask, u)?;
    }
    let max = members(outside)
        .flat_map(|u| members(outside).map(move |v| (u, v)))
        .map(|(u, v)| counts[u][v])
        .max()
        .unwrap_or(0);
    let q = smallest_prime_from(max + 1)?;
    let q64 = u64::from(q);
    let mut matrix = vec![vec![0u32; n]; n];
    for i in members(mask) {
        for u in members(g.in_mask(i)) {
            matrix[i][u] = 1;
        }
    }
    for v in members(outside) {
        let inv =
            inv_mod((counts[v][v] % q64) as u32, q).expect("N_I(v, v) is nonzero below a prime");
        for u in members(g.in_mask(v)) {
            matrix[v][u] = if mask & bit(u) != 0 {
                inv
            } else {
                ((q64 - counts[u][v] % q64) * u64::from(inv) % q64) as u32
            };
        }
    }
    LinearCodingFunction::new(q, matrix)
}

/// A graph containing `d` as the induced subgraph on its first `d.n()`
/// vertices, with a strongly compatible maximum acyclic set `set`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlsEmbedding {
    pub graph: Digraph,
    pub set: Vec<usize>,
    /// False when `d` has no arcs: nothing is added and `set` is empty.
    pub has_set: bool,
}

/// Every arc `(u, v)` of `d` gets `n + 1` parallel paths `u -> w -> v`, and
/// every vertex `v` of `d` a private partner `p` with `v <-> p`. The
/// partners make the vertices of `d` a minimum feedback vertex set; the
/// added vertices form the acyclic set.
pub fn embed_in_sls(d: &Digraph) -> Result<SlsEmbedding> {
    d.require_loopless()?;
    let arcs = d.arcs();
    if arcs.is_empty() {
        return Ok(SlsEmbedding {
            graph: d.clone(),
            set: Vec::new(),
            has_set: false,
        });
    }
    let n = d.n();
    let total = n + arcs.len() * (n + 1) + n;
    let mut g = Digraph::empty(total)?;
    for &(u, v) in &arcs {
        g.add_arc(u, v)?;
    }
    let mut next = n;
    for &(u, v) in &arcs {
        for _ in 0..=n {
            g.add_arc(u, next)?;
            g.add_arc(next, v)?;
            next += 1;
        }
    }
    for v in 0..n {
        g.add_arc(v, next)?;
        g.add_arc(next, v)?;
        next += 1;
    }
    Ok(SlsEmbedding {
        graph: g,
        set: (n..total).collect(),
        has_set: true,
    })
}

/// A strict linear solution of `K_{k,k}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteSolution {
    pub q: u32,
    pub m: Vec<Vec<u32>>,
    pub m_inv: Vec<Vec<u32>>,
    pub function: LinearCodingFunction,
}

/// Largest `k` accepted by [`kkk_solution`].
pub const KKK_MAX: usize = 4;

/// Over the smallest prime `q >= 3k^2`, the lexicographically first matrix
/// `M` with `M` and `M^{-1}` free of zeros; returns `x_R = x_L M`,
/// `x_L = x_R M^{-1}` on `K_{k,k}` with `L = 0..k`, `R = k..2k`.
pub fn kkk_solution(k: usize) -> Result<BipartiteSolution> {
    if k == 0 || k > KKK_MAX {
        return Err(Error::Invalid(format!(
            "kkk_solution needs 1 <= k <= {KKK_MAX}, got {k}"
        )));
    }
    let q = smallest_prime_from(3 * (k * k) as u64)?;
    let mut m = vec![vec![1u32; k]; k];
    loop {
        if let Some(m_inv) = inverse_mod_p(&m, q) {
            if m_inv.iter().flatten().all(|&a| a != 0) {
                let mut matrix = vec![vec![0u32; 2 * k]; 2 * k];
                for a in 0..k {
                    for b in 0..k {
                        matrix[k + b][a] = m[a][b];
                        matrix[a][k + b] = m_inv[b][a];
                    }
                }
                let function = LinearCodingFunction::new(q, matrix)?;
                return Ok(BipartiteSolution {
                    q,
                    m,
                    m_inv,
                    function,
                });
            }
        }
        if !next_zero_free(&mut m, q) {
            return Err(Error::SearchFailed(format!(
                "no zero-free M with zero-free inverse over Z_{q} for k = {k}"
            )));
        }
    }
}

/// Advances `m` to the next zero-free matrix in row-major lexicographic
/// order; false after the last one.
fn next_zero_free(m: &mut [Vec<u32>], q: u32) -> bool {
    for a in m.iter_mut().flatten().rev() {
        *a += 1;
        if *a < q {
            return true;
        }
        *a = 1;
    }
    false
}

/// The explicit solution of `K_{2,2}` (parts `{0, 1}`, `{2, 3}`) over an odd
/// modulus: `f_0 = (x_2 + x_3) / 2`, `f_1 = (x_2 - x_3) / 2`,
/// `f_2 = x_0 + x_1`, `f_3 = x_0 - x_1`.
pub fn k22_solution(q: u32) -> Result<LinearCodingFunction> {
    let half =
        inv_mod(2, q).ok_or_else(|| Error::Invalid(format!("2 is not invertible modulo {q}")))?;
    let neg_half = (q - half) % q;
    LinearCodingFunction::new(
        q,
        vec![
            vec![0, 0, half, half],
            vec![0, 0, half, neg_half],
            vec![1, 1, 0, 0],
            vec![1, q - 1, 0, 0],
        ],
    )
}

/// `G` on `J = 0..n` plus one subdivision vertex `w` (arcs `u -> w -> v`)
/// for each arc `(u, v)` of `d` missing from `h`, in lexicographic order, so
/// that `G[J] = h` and `G^{-I} = d`. Returns `G` and `I`.
pub fn dh_graph_construction(d: &Digraph, h: &Digraph) -> Result<(Digraph, Vec<usize>)> {
    if h.n() != d.n() || !h.is_subgraph_of(d) {
        return Err(Error::Precondition(
            "h must be a spanning subgraph of d".into(),
        ));
    }
    let n = d.n();
    let extra: Vec<(usize, usize)> = d
        .arcs()
        .into_iter()
        .filter(|&(u, v)| !h.has_arc(u, v))
        .collect();
    let mut g = Digraph::empty(n + extra.len())?;
    for (u, v) in h.arcs() {
        g.add_arc(u, v)?;
    }
    for (t, &(u, v)) in extra.iter().enumerate() {
        g.add_arc(u, n + t)?;
        g.add_arc(n + t, v)?;
    }
    Ok((g, (n..n + extra.len()).collect()))
}

/// A function on `J = 0..n` plus subdivision vertices for the arcs of `d`
/// missing from `h` and then those of `h` missing from `d`, with
/// `G(f)[J] = d` and `G(f^{-I}) = h`. Returns `f` and `I`.
///
/// Each `j` in `J` takes the minimum of `y_(u,j) = x_u + q - 1 - x_(u,j)`
/// (mod `q`) over its subdivided `d`-arcs, of `x_u` over arcs common to `d`
/// and `h`, and of the subdivision vertices of its `h`-only arcs. A
/// subdivision vertex of `(u, v)` copies `x_u`.
pub fn reduction_target_fn(
    d: &Digraph,
    h: &Digraph,
    q: u32,
) -> Result<(CodingFunction, Vec<usize>)> {
    if d.n() != h.n() {
        return Err(Error::Precondition(
            "d and h must share their vertex set".into(),
        ));
    }
    let n = d.n();
    let d_only: Vec<(usize, usize)> = d
        .arcs()
        .into_iter()
        .filter(|&(u, v)| !h.has_arc(u, v))
        .collect();
    let h_only: Vec<(usize, usize)> = h
        .arcs()
        .into_iter()
        .filter(|&(u, v)| !d.has_arc(u, v))
        .collect();
    let total = n + d_only.len() + h_only.len();
    // Per vertex of J: (u, w) pairs for subdivided d-arcs, shared in-neighbours,
    // subdivision vertices of h-only arcs.
    let mut shifted: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut plain: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut copy_of = vec![0usize; total];
    for (t, &(u, v)) in d_only.iter().enumerate() {
        shifted[v].push((u, n + t));
        copy_of[n + t] = u;
    }
    for (v, slot) in plain.iter_mut().enumerate() {
        *slot = members(d.in_mask(v) & h.in_mask(v)).collect();
    }
    for (t, &(u, v)) in h_only.iter().enumerate() {
        let w = n + d_only.len() + t;
        plain[v].push(w);
        copy_of[w] = u;
    }
    let support: Vec<Vec<usize>> = (0..total)
        .map(|v| {
            if v < n {
                let mut s: Vec<usize> = shifted[v]
                    .iter()
                    .flat_map(|&(u, w)| [u, w])
                    .chain(plain[v].iter().copied())
                    .collect();
                s.sort_unstable();
                s.dedup();
                s
            } else {
                vec![copy_of[v]]
            }
        })
        .collect();
    let f = CodingFunction::from_local(total, q, support, |v, x| {
        if v >= n {
            return x[copy_of[v]];
        }
        let ys = shifted[v].iter().map(|&(u, w)| (x[u] + q - 1 - x[w]) % q);
        ys.chain(plain[v].iter().map(|&u| x[u]))
            .min()
            .unwrap_or(q - 1)
    })?;
    Ok((f, (n..total).collect()))
}

/// A function with `G(f) = g` whose reduction by the universal vertex `v`
/// has interaction graph `h` (labelled like `g` with `v` removed).
/// `f_v = OR_i y_i` and, for `i != v` with `P = in_h(i)` and
/// `Q = in_g(i) \ v \ P`, `f_i = AND_P y_p & (y_v | OR_Q !y_q)`, where
/// `y_i = min(x_i, 1)`.
pub fn vanish_reduction_fn(g: &Digraph, v: usize, h: &Digraph, q: u32) -> Result<CodingFunction> {
    g.check_vertex(v)?;
    let n = g.n();
    let others = g.full() & !bit(v);
    if g.in_mask(v) != others || g.out_mask(v) != others {
        return Err(Error::Precondition(format!("vertex {v} is not universal")));
    }
    if (0..n).any(|i| g.in_degree(i) < 2) {
        return Err(Error::Precondition(
            "minimum in-degree must be at least 2".into(),
        ));
    }
    let rest = g.remove_vertices(&[v])?;
    if h.n() != rest.graph.n() || !h.is_subgraph_of(&rest.graph) {
        return Err(Error::Precondition(format!(
            "h must be a spanning subgraph of g without {v}"
        )));
    }
    let label: Vec<usize> = members(others).collect();
    let mut pos_mask = vec![0u64; n];
    let mut neg_mask = vec![0u64; n];
    for (hi, &i) in label.iter().enumerate() {
        let p = members(h.in_mask(hi)).fold(0u64, |acc, u| acc | bit(label[u]));
        pos_mask[i] = p;
        neg_mask[i] = g.in_mask(i) & others & !p;
    }
    let support: Vec<Vec<usize>> = (0..n).map(|i| g.in_neighbours(i)).collect();
    CodingFunction::from_local(n, q, support, |i, x| {
        let y = |u: usize| x[u] > 0;
        if i == v {
            return u32::from(members(others).any(y));
        }
        let all_pos = members(pos_mask[i]).all(y);
        let escape = y(v) || members(neg_mask[i]).any(|u| !y(u));
        u32::from(all_pos && escape)
    })
}
