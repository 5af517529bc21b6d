//! Coding functions `f: [q]^n -> [q]^n` stored as per-vertex truth tables
//! over a declared support, with interaction graphs, vertex and set
//! reductions, and fixed-point enumeration.
//!
//! The table of vertex `v` is indexed lexicographically by the values of its
//! support variables, the first support variable being the most significant
//! digit.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::digraph::{bit, mask_to_vec, Digraph, MAX_VERTICES};
use crate::error::{Error, Result};
use crate::limits::{bounded_pow, Limits};
use crate::par;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawFunction")]
pub struct CodingFunction {
    n: usize,
    q: u32,
    support: Vec<Vec<usize>>,
    tables: Vec<Vec<u32>>,
}

#[derive(Deserialize)]
struct RawFunction {
    n: usize,
    q: u32,
    support: Vec<Vec<usize>>,
    tables: Vec<Vec<u32>>,
}

impl TryFrom<RawFunction> for CodingFunction {
    type Error = Error;

    fn try_from(raw: RawFunction) -> Result<Self> {
        CodingFunction::new(raw.n, raw.q, raw.support, raw.tables)
    }
}

/// The cumulative function `F^I`: for each vertex of `I`, in topological
/// order, a table over the variables outside `I` it depends on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CumulativeFn {
    q: u32,
    order: Vec<usize>,
    support: Vec<Vec<usize>>,
    tables: Vec<Vec<u32>>,
}

/// Fixed points in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPointSet {
    pub n: usize,
    pub q: u32,
    pub states: Vec<Vec<u32>>,
}

impl FixedPointSet {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn contains(&self, x: &[u32]) -> bool {
        self.states
            .binary_search_by(|s| s.as_slice().cmp(x))
            .is_ok()
    }
}

/// Builds a table over `support` by calling `f` on a full-length state whose
/// support coordinates run through `[q]^|support|` in row order (the others
/// stay 0).
pub(crate) fn tabulate(
    n: usize,
    q: u32,
    support: &[usize],
    limit: u64,
    mut f: impl FnMut(&[u32]) -> u32,
) -> Result<Vec<u32>> {
    let rows = bounded_pow("local table size", u64::from(q), support.len(), limit)? as usize;
    let mut x = vec![0u32; n];
    let mut table = Vec::with_capacity(rows);
    for _ in 0..rows {
        table.push(f(&x));
        for &u in support.iter().rev() {
            x[u] += 1;
            if x[u] < q {
                break;
            }
            x[u] = 0;
        }
    }
    Ok(table)
}

/// Decodes `index` as an `n`-digit base-`q` state, most significant first.
pub(crate) fn decode_state(mut index: u64, q: u32, x: &mut [u32]) {
    for slot in x.iter_mut().rev() {
        *slot = (index % u64::from(q)) as u32;
        index /= u64::from(q);
    }
}

impl CodingFunction {
    pub fn new(n: usize, q: u32, support: Vec<Vec<usize>>, tables: Vec<Vec<u32>>) -> Result<Self> {
        if q < 2 {
            return Err(Error::Invalid(format!(
                "alphabet size must be at least 2, got {q}"
            )));
        }
        if n > MAX_VERTICES {
            return Err(Error::bound("dimension", MAX_VERTICES as u64, n as u64));
        }
        if support.len() != n || tables.len() != n {
            return Err(Error::Invalid(format!(
                "expected {n} supports and tables, got {} and {}",
                support.len(),
                tables.len()
            )));
        }
        for v in 0..n {
            let mut seen = 0u64;
            for &u in &support[v] {
                if u >= n {
                    return Err(Error::VertexOutOfRange { vertex: u, n });
                }
                if seen & bit(u) != 0 {
                    return Err(Error::Invalid(format!(
                        "vertex {u} repeated in support of {v}"
                    )));
                }
                seen |= bit(u);
            }
            let rows = crate::limits::checked_pow(u64::from(q), support[v].len());
            if rows != Some(tables[v].len() as u64) {
                return Err(Error::Invalid(format!(
                    "table of vertex {v} has {} rows, expected {q}^{}",
                    tables[v].len(),
                    support[v].len()
                )));
            }
            if let Some(bad) = tables[v].iter().find(|&&y| y >= q) {
                return Err(Error::Invalid(format!(
                    "table of vertex {v} contains {bad} >= {q}"
                )));
            }
        }
        Ok(CodingFunction {
            n,
            q,
            support,
            tables,
        })
    }

    /// Builds each local function from a closure over full-length states.
    pub fn from_local<F>(n: usize, q: u32, support: Vec<Vec<usize>>, f: F) -> Result<Self>
    where
        F: Fn(usize, &[u32]) -> u32,
    {
        let mut tables = Vec::with_capacity(n);
        for (v, s) in support.iter().enumerate() {
            tables.push(tabulate(n, q, s, Limits::default().table_space, |x| {
                f(v, x) % q
            })?);
        }
        CodingFunction::new(n, q, support, tables)
    }

    pub fn identity(n: usize, q: u32) -> Result<Self> {
        CodingFunction::from_local(n, q, (0..n).map(|v| vec![v]).collect(), |v, x| x[v])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn support(&self, v: usize) -> &[usize] {
        &self.support[v]
    }

    pub fn table(&self, v: usize) -> &[u32] {
        &self.tables[v]
    }

    pub fn supports(&self) -> &[Vec<usize>] {
        &self.support
    }

    pub fn tables(&self) -> &[Vec<u32>] {
        &self.tables
    }

    #[inline]
    fn row(&self, v: usize, x: &[u32]) -> usize {
        self.support[v]
            .iter()
            .fold(0usize, |acc, &u| acc * self.q as usize + x[u] as usize)
    }

    /// `f_v(x)`.
    #[inline]
    pub fn eval_local(&self, v: usize, x: &[u32]) -> u32 {
        self.tables[v][self.row(v, x)]
    }

    pub fn eval(&self, x: &[u32]) -> Vec<u32> {
        (0..self.n).map(|v| self.eval_local(v, x)).collect()
    }

    pub fn is_fixed(&self, x: &[u32]) -> bool {
        (0..self.n).all(|v| self.eval_local(v, x) == x[v])
    }

    /// Positions in `support(v)` on which `f_v` depends essentially.
    fn essential_positions(&self, v: usize) -> Vec<usize> {
        let q = self.q as usize;
        let len = self.support[v].len();
        let table = &self.tables[v];
        (0..len)
            .filter(|&j| {
                let stride = q.pow((len - 1 - j) as u32);
                (0..table.len())
                    .filter(|&r| (r / stride).is_multiple_of(q))
                    .any(|r| (1..q).any(|d| table[r + d * stride] != table[r]))
            })
            .collect()
    }

    /// Variables `f_v` depends on essentially, ascending.
    pub fn essential_support(&self, v: usize) -> Vec<usize> {
        let mut s: Vec<usize> = self
            .essential_positions(v)
            .into_iter()
            .map(|j| self.support[v][j])
            .collect();
        s.sort_unstable();
        s
    }

    /// Same function with every support sorted and reduced to its essential
    /// variables.
    pub fn canonicalize(&self) -> CodingFunction {
        let mut support = Vec::with_capacity(self.n);
        let mut tables = Vec::with_capacity(self.n);
        for v in 0..self.n {
            let s = self.essential_support(v);
            let table = tabulate(self.n, self.q, &s, u64::MAX, |x| self.eval_local(v, x))
                .expect("essential table is no larger than the declared one");
            support.push(s);
            tables.push(table);
        }
        CodingFunction {
            n: self.n,
            q: self.q,
            support,
            tables,
        }
    }

    /// `G(f)`: arc `(u, v)` iff `f_v` depends essentially on `x_u`.
    pub fn interaction_graph(&self) -> Digraph {
        let mut g = Digraph::empty(self.n).expect("dimension within bounds");
        for v in 0..self.n {
            for u in self.essential_support(v) {
                g.add_arc(u, v).expect("in range");
            }
        }
        g
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.n,
            })
        }
    }

    /// Drops the vertices of `removed`, relabelling survivors by rank, given
    /// a function that still mentions only surviving vertices.
    fn compact(self, removed: u64) -> (CodingFunction, Vec<Option<usize>>) {
        let mut map = vec![None; self.n];
        let mut next = 0;
        for (v, slot) in map.iter_mut().enumerate() {
            if removed & bit(v) == 0 {
                *slot = Some(next);
                next += 1;
            }
        }
        let mut support = Vec::with_capacity(next);
        let mut tables = Vec::with_capacity(next);
        for (v, (s, t)) in self.support.into_iter().zip(self.tables).enumerate() {
            if removed & bit(v) == 0 {
                support.push(s.into_iter().map(|u| map[u].expect("survivor")).collect());
                tables.push(t);
            }
        }
        let f = CodingFunction {
            n: next,
            q: self.q,
            support,
            tables,
        };
        (f, map)
    }

    /// `f^{-v}`. Returns `f` unchanged when `G(f)` has a loop on `v`.
    pub fn reduce_vertex(&self, v: usize) -> Result<CodingFunction> {
        Ok(self.reduce_vertex_mapped(v)?.0)
    }

    /// Like [`reduce_vertex`](Self::reduce_vertex), also returning the
    /// old-to-new label map.
    pub fn reduce_vertex_mapped(&self, v: usize) -> Result<(CodingFunction, Vec<Option<usize>>)> {
        self.check_vertex(v)?;
        let f = self.canonicalize();
        if f.support[v].contains(&v) {
            return Ok((f, (0..self.n).map(Some).collect()));
        }
        let limit = Limits::default().table_space;
        let mut support = Vec::with_capacity(f.n);
        let mut tables = Vec::with_capacity(f.n);
        let mut x = vec![0u32; f.n];
        for i in 0..f.n {
            if i == v || !f.support[i].contains(&v) {
                support.push(f.support[i].clone());
                tables.push(f.tables[i].clone());
                continue;
            }
            let mut s: Vec<usize> = f.support[i]
                .iter()
                .chain(&f.support[v])
                .copied()
                .filter(|&u| u != v)
                .collect();
            s.sort_unstable();
            s.dedup();
            let table = tabulate(f.n, f.q, &s, limit, |y| {
                x.copy_from_slice(y);
                x[v] = f.eval_local(v, y);
                f.eval_local(i, &x)
            })?;
            support.push(s);
            tables.push(table);
        }
        let reduced = CodingFunction {
            n: f.n,
            q: f.q,
            support,
            tables,
        };
        Ok(reduced.compact(bit(v)).map_first(|g| g.canonicalize()))
    }

    /// Folds [`reduce_vertex`](Self::reduce_vertex) over `seq`, given in
    /// original labels.
    pub fn reduce_sequence(&self, seq: &[usize]) -> Result<(CodingFunction, Vec<Option<usize>>)> {
        let mut f = self.canonicalize();
        let mut map: Vec<Option<usize>> = (0..self.n).map(Some).collect();
        for &v in seq {
            self.check_vertex(v)?;
            let local = map[v].ok_or_else(|| {
                Error::Invalid(format!("vertex {v} repeated in reduction sequence"))
            })?;
            let (g, step) = f.reduce_vertex_mapped(local)?;
            for slot in map.iter_mut() {
                *slot = slot.and_then(|x| step[x]);
            }
            f = g;
        }
        Ok((f, map))
    }

    fn require_acyclic(&self, set: &[usize]) -> Result<(u64, Vec<usize>)> {
        let g = self.interaction_graph();
        let mask = g.vertex_mask(set)?;
        let order = g
            .topological_order_mask(mask)
            .ok_or_else(|| Error::NotAcyclic {
                set: mask_to_vec(mask),
            })?;
        Ok((mask, order))
    }

    /// `F^I` for a set acyclic in `G(f)`.
    pub fn cumulative(&self, set: &[usize]) -> Result<CumulativeFn> {
        let (mask, order) = self.require_acyclic(set)?;
        let f = self.canonicalize();
        let limit = Limits::default().table_space;
        let mut cum = CumulativeFn {
            q: f.q,
            order: Vec::new(),
            support: Vec::new(),
            tables: Vec::new(),
        };
        let mut x = vec![0u32; f.n];
        for &i in &order {
            let s = cum.outer_support(&f.support[i], mask);
            let table = tabulate(f.n, f.q, &s, limit, |y| {
                x.copy_from_slice(y);
                cum.fill(&mut x);
                f.eval_local(i, &x)
            })?;
            cum.order.push(i);
            cum.support.push(s);
            cum.tables.push(table);
        }
        Ok(cum)
    }

    /// `f^{-I}` for a set acyclic in `G(f)`, computed through `F^I`.
    pub fn reduce_set(&self, set: &[usize]) -> Result<CodingFunction> {
        Ok(self.reduce_set_mapped(set)?.0)
    }

    pub fn reduce_set_mapped(&self, set: &[usize]) -> Result<(CodingFunction, Vec<Option<usize>>)> {
        let cum = self.cumulative(set)?;
        let mask = set.iter().fold(0u64, |a, &v| a | bit(v));
        let f = self.canonicalize();
        let limit = Limits::default().table_space;
        let mut support = Vec::with_capacity(f.n);
        let mut tables = Vec::with_capacity(f.n);
        let mut x = vec![0u32; f.n];
        for j in 0..f.n {
            if mask & bit(j) != 0 {
                support.push(Vec::new());
                tables.push(vec![0]);
                continue;
            }
            let s = cum.outer_support(&f.support[j], mask);
            let table = tabulate(f.n, f.q, &s, limit, |y| {
                x.copy_from_slice(y);
                cum.fill(&mut x);
                f.eval_local(j, &x)
            })?;
            support.push(s);
            tables.push(table);
        }
        let reduced = CodingFunction {
            n: f.n,
            q: f.q,
            support,
            tables,
        };
        Ok(reduced.compact(mask).map_first(|g| g.canonicalize()))
    }

    pub fn count_fixed_points(&self, limits: &Limits) -> Result<u64> {
        let total = bounded_pow("state space", u64::from(self.q), self.n, limits.max_states)?;
        Ok(par::fold_chunks(
            total,
            par::chunk_size(total),
            0u64,
            |range| {
                let mut x = vec![0u32; self.n];
                range
                    .filter(|&i| {
                        decode_state(i, self.q, &mut x);
                        self.is_fixed(&x)
                    })
                    .count() as u64
            },
            |a, b| a + b,
        ))
    }

    /// All fixed points. A zero-dimensional function has the empty state as
    /// its only fixed point.
    pub fn fixed_points(&self, limits: &Limits) -> Result<FixedPointSet> {
        let total = bounded_pow("state space", u64::from(self.q), self.n, limits.max_states)?;
        let states = par::fold_chunks(
            total,
            par::chunk_size(total),
            Vec::new(),
            |range| {
                let mut x = vec![0u32; self.n];
                let mut found = Vec::new();
                for i in range {
                    decode_state(i, self.q, &mut x);
                    if self.is_fixed(&x) {
                        found.push(x.clone());
                    }
                }
                found
            },
            |mut a, mut b| {
                a.append(&mut b);
                a
            },
        );
        Ok(FixedPointSet {
            n: self.n,
            q: self.q,
            states,
        })
    }

    /// Whether every local function is non-decreasing in each argument.
    pub fn is_nondecreasing(&self) -> bool {
        let q = self.q as usize;
        (0..self.n).all(|v| {
            let len = self.support[v].len();
            let t = &self.tables[v];
            (0..len).all(|j| {
                let stride = q.pow((len - 1 - j) as u32);
                (0..t.len()).all(|r| (r / stride) % q == q - 1 || t[r] <= t[r + stride])
            })
        })
    }
}

trait MapFirst<A, B> {
    fn map_first<C>(self, f: impl FnOnce(A) -> C) -> (C, B);
}

impl<A, B> MapFirst<A, B> for (A, B) {
    fn map_first<C>(self, f: impl FnOnce(A) -> C) -> (C, B) {
        (f(self.0), self.1)
    }
}

impl CumulativeFn {
    /// Vertices of `I` in the order `F^I` was built.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// The variables outside `I` that `F_i` reads.
    pub fn support_of(&self, i: usize) -> Option<&[usize]> {
        self.order
            .iter()
            .position(|&v| v == i)
            .map(|p| self.support[p].as_slice())
    }

    /// Variables outside `mask` reached from `inputs` through already
    /// computed members of `I`.
    fn outer_support(&self, inputs: &[usize], mask: u64) -> Vec<usize> {
        let mut s = 0u64;
        for &u in inputs {
            if mask & bit(u) == 0 {
                s |= bit(u);
            } else {
                let p = self
                    .order
                    .iter()
                    .position(|&v| v == u)
                    .expect("topological order");
                s |= self.support[p].iter().fold(0u64, |a, &w| a | bit(w));
            }
        }
        mask_to_vec(s)
    }

    /// Overwrites the `I` coordinates of a full-length state with `F^I`
    /// evaluated on its other coordinates.
    pub fn fill(&self, x: &mut [u32]) {
        for (p, &i) in self.order.iter().enumerate() {
            let row = self.support[p]
                .iter()
                .fold(0usize, |acc, &u| acc * self.q as usize + x[u] as usize);
            x[i] = self.tables[p][row];
        }
    }

    /// `F_i(x)` for `i` in `I`; `x` is a full-length state.
    pub fn value(&self, i: usize, x: &[u32]) -> Option<u32> {
        let mut y = x.to_vec();
        self.order.contains(&i).then(|| {
            self.fill(&mut y);
            y[i]
        })
    }
}

/// The min-net: `f_i(x) = min { x_j : j in in(i) }`, with `q - 1` for an
/// empty in-neighbourhood.
pub fn min_net(g: &Digraph, q: u32) -> Result<CodingFunction> {
    let support: Vec<Vec<usize>> = (0..g.n()).map(|v| g.in_neighbours(v)).collect();
    let inputs = support.clone();
    CodingFunction::from_local(g.n(), q, support, |v, x| {
        inputs[v].iter().map(|&u| x[u]).min().unwrap_or(q - 1)
    })
}

/// Smallest dimension among all reduced forms of `f`.
pub fn mindim(f: &CodingFunction, limits: &Limits) -> Result<usize> {
    if f.n() > limits.mindim_vertices {
        return Err(Error::bound(
            "mindim search",
            limits.mindim_vertices as u64,
            f.n() as u64,
        ));
    }
    // A function of dimension d has at most q^d fixed points, and a
    // zero-dimensional one has exactly one.
    let fixed = f.count_fixed_points(limits)?;
    let lower = match fixed {
        0 => 1,
        1 => 0,
        m => {
            let mut d = 0;
            let mut p = 1u64;
            while p < m {
                p = p.saturating_mul(u64::from(f.q()));
                d += 1;
            }
            d
        }
    };
    let start = f.canonicalize();
    let mut best = start.n();
    let mut seen: HashSet<CodingFunction> = HashSet::new();
    let mut stack = vec![start];
    while let Some(h) = stack.pop() {
        if best == lower {
            break;
        }
        if !seen.insert(h.clone()) {
            continue;
        }
        // Reducing a maximum acyclic set of G(h) reaches dimension k(G(h)).
        let g = h.interaction_graph();
        let k = crate::digraph::params::min_fvs_mask(&g).count_ones() as usize;
        best = best.min(h.n()).min(k);
        if h.n() <= best {
            continue;
        }
        for v in (0..h.n()).filter(|&v| !g.has_loop(v)) {
            let r = h.reduce_vertex(v)?;
            if !seen.contains(&r) {
                stack.push(r);
            }
        }
    }
    Ok(best)
}
