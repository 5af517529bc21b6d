//! Linear coding functions over `Z_q`, exhaustive (strict) linear guessing
//! numbers, symbolic reduction, and compatibility-based impossibility tests.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coding::{decode_state, CodingFunction};
use crate::digraph::{bit, mask_to_vec, members, params, CompatMode, Digraph};
use crate::error::{Error, Result};
use crate::limits::{bounded_pow, checked_pow, Limits};
use crate::par;

/// `f_i(x) = sum_u matrix[i][u] * x_u mod q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawLinear")]
pub struct LinearCodingFunction {
    q: u32,
    matrix: Vec<Vec<u32>>,
}

#[derive(Deserialize)]
struct RawLinear {
    q: u32,
    matrix: Vec<Vec<u32>>,
}

impl TryFrom<RawLinear> for LinearCodingFunction {
    type Error = Error;

    fn try_from(raw: RawLinear) -> Result<Self> {
        LinearCodingFunction::new(raw.q, raw.matrix)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixCount {
    pub count: u64,
    /// Dimension of the fixed-point space, for prime `q` only.
    pub dimension: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LinearMode {
    /// Coefficients in `{0} ∪ units` on arcs: interaction graph inside `G`.
    #[serde(rename = "g_L")]
    GL,
    /// Unit coefficients on every arc: interaction graph equal to `G`.
    #[serde(rename = "h_L")]
    HL,
}

impl fmt::Display for LinearMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LinearMode::GL => "g_L",
            LinearMode::HL => "h_L",
        })
    }
}

impl FromStr for LinearMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g_L" | "gL" | "g" => Ok(LinearMode::GL),
            "h_L" | "hL" | "h" => Ok(LinearMode::HL),
            other => Err(Error::Invalid(format!("unknown linear mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearReport {
    pub graph: Digraph,
    pub q: u32,
    pub mode: LinearMode,
    /// Arbitrary nonzero coefficients were allowed instead of units.
    pub relaxed: bool,
    pub max_fixed: u64,
    pub dimension: Option<usize>,
    pub witness: LinearCodingFunction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum WeakCompatVerdict {
    /// A maximum acyclic set that is not weakly compatible, with the first
    /// offending ordered pair.
    NotStrictlyLinearlySolvable {
        set: Vec<usize>,
        pair: (usize, usize),
    },
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum LinearVerdict {
    /// Every spanning subgraph keeping `k` has a maximum acyclic set that is
    /// not weakly compatible.
    NotLinearlySolvable { subgraphs_checked: u64 },
    /// A spanning subgraph with the same `k` whose maximum acyclic sets are
    /// all weakly compatible.
    Inconclusive { subgraph: Digraph },
}

pub fn is_prime(q: u32) -> bool {
    q >= 2
        && (2..)
            .take_while(|d| d * d <= q)
            .all(|d| !q.is_multiple_of(d))
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Units of `Z_q`, ascending.
pub fn units(q: u32) -> Vec<u32> {
    (1..q).filter(|&a| gcd(a, q) == 1).collect()
}

pub fn pow_mod(mut base: u64, mut exp: u64, q: u64) -> u64 {
    let mut acc = 1 % q;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % q;
        }
        base = base * base % q;
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `q`, if `a` is a unit.
pub fn inv_mod(a: u32, q: u32) -> Option<u32> {
    let (mut r0, mut r1) = (i64::from(q), i64::from(a % q));
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let k = r0 / r1;
        (r0, r1) = (r1, r0 - k * r1);
        (t0, t1) = (t1, t0 - k * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(i64::from(q)) as u32)
}

/// Rank of a square or rectangular matrix over the field `Z_p`.
pub fn rank_mod_p(rows: &[Vec<u32>], p: u32) -> usize {
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| u64::from(x % p)).collect())
        .collect();
    let p = u64::from(p);
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = pow_mod(m[rank][c], p - 2, p);
        for x in m[rank].iter_mut() {
            *x = *x * inv % p;
        }
        let pivot = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[c] != 0 {
                let factor = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot).take(cols).skip(c) {
                    *x = (*x + (p - factor) * y) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Inverse of a square matrix over the field `Z_p` by Gauss-Jordan
/// elimination, or `None` if it is singular.
pub fn inverse_mod_p(m: &[Vec<u32>], p: u32) -> Option<Vec<Vec<u32>>> {
    let n = m.len();
    let p64 = u64::from(p);
    let mut a: Vec<Vec<u64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<u64> = row.iter().map(|&x| u64::from(x % p)).collect();
            r.extend((0..n).map(|j| u64::from(i == j)));
            r
        })
        .collect();
    for c in 0..n {
        let pivot = (c..n).find(|&r| a[r][c] != 0)?;
        a.swap(c, pivot);
        let inv = pow_mod(a[c][c], p64 - 2, p64);
        for x in a[c].iter_mut() {
            *x = *x * inv % p64;
        }
        let pivot = a[c].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != c && row[c] != 0 {
                let factor = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + (p64 - factor) * y) % p64;
                }
            }
        }
    }
    Some(
        a.into_iter()
            .map(|r| r[n..].iter().map(|&x| x as u32).collect())
            .collect(),
    )
}

/// Rank over GF(2) of rows given as bitmasks.
fn rank_gf2(mut rows: Vec<u64>) -> usize {
    let mut rank = 0;
    for b in 0..64 {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r] >> b & 1 == 1) else {
            continue;
        };
        rows.swap(rank, pivot);
        for r in 0..rows.len() {
            if r != rank && rows[r] >> b & 1 == 1 {
                rows[r] ^= rows[rank];
            }
        }
        rank += 1;
    }
    rank
}

impl LinearCodingFunction {
    pub fn new(q: u32, matrix: Vec<Vec<u32>>) -> Result<Self> {
        if q < 2 {
            return Err(Error::Invalid(format!(
                "modulus must be at least 2, got {q}"
            )));
        }
        let n = matrix.len();
        if n > crate::digraph::MAX_VERTICES {
            return Err(Error::bound(
                "dimension",
                crate::digraph::MAX_VERTICES as u64,
                n as u64,
            ));
        }
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Invalid(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|&&a| a >= q) {
                return Err(Error::Invalid(format!("row {i} contains {bad} >= {q}")));
            }
        }
        Ok(LinearCodingFunction { q, matrix })
    }

    pub fn identity(n: usize, q: u32) -> Result<Self> {
        let matrix = (0..n)
            .map(|i| (0..n).map(|j| u32::from(i == j)).collect())
            .collect();
        LinearCodingFunction::new(q, matrix)
    }

    pub fn n(&self) -> usize {
        self.matrix.len()
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn matrix(&self) -> &[Vec<u32>] {
        &self.matrix
    }

    pub fn coefficient(&self, i: usize, u: usize) -> u32 {
        self.matrix[i][u]
    }

    pub fn eval(&self, x: &[u32]) -> Vec<u32> {
        let q = u64::from(self.q);
        self.matrix
            .iter()
            .map(|row| {
                (row.iter()
                    .zip(x)
                    .map(|(&a, &b)| u64::from(a) * u64::from(b))
                    .sum::<u64>()
                    % q) as u32
            })
            .collect()
    }

    /// Arc `(u, i)` for every nonzero coefficient `matrix[i][u]`.
    pub fn support_graph(&self) -> Digraph {
        let n = self.n();
        let mut g = Digraph::empty(n).expect("dimension within bounds");
        for (i, row) in self.matrix.iter().enumerate() {
            for (u, &a) in row.iter().enumerate() {
                if a != 0 {
                    g.add_arc(u, i).expect("in range");
                }
            }
        }
        g
    }

    /// Whether every nonzero coefficient is a unit.
    pub fn has_unit_coefficients(&self) -> bool {
        self.matrix
            .iter()
            .flatten()
            .all(|&a| a == 0 || gcd(a, self.q) == 1)
    }

    pub fn to_coding_function(&self) -> Result<CodingFunction> {
        let n = self.n();
        let support: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).filter(|&u| self.matrix[i][u] != 0).collect())
            .collect();
        let q = u64::from(self.q);
        CodingFunction::from_local(n, self.q, support, |i, x| {
            (self.matrix[i]
                .iter()
                .zip(x)
                .map(|(&a, &b)| u64::from(a) * u64::from(b))
                .sum::<u64>()
                % q) as u32
        })
    }

    /// `A - I` modulo `q`.
    fn minus_identity(&self) -> Vec<Vec<u32>> {
        let q = self.q;
        self.matrix
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, &a)| if i == j { (a + q - 1) % q } else { a })
                    .collect()
            })
            .collect()
    }

    /// Number of fixed points: `q^(n - rank(A - I))` for prime `q`, kernel
    /// enumeration otherwise.
    pub fn dim_fix(&self, limits: &Limits) -> Result<FixCount> {
        let n = self.n();
        if is_prime(self.q) {
            let dim = n - rank_mod_p(&self.minus_identity(), self.q);
            let count = checked_pow(u64::from(self.q), dim)
                .ok_or_else(|| Error::bound("fixed-point count", u64::MAX, u64::MAX))?;
            return Ok(FixCount {
                count,
                dimension: Some(dim),
            });
        }
        Ok(FixCount {
            count: kernel_size(&self.minus_identity(), self.q, limits)?,
            dimension: None,
        })
    }
}

/// Solutions of `M x = 0` over `Z_q` by enumeration.
fn kernel_size(m: &[Vec<u32>], q: u32, limits: &Limits) -> Result<u64> {
    let n = m.len();
    let total = bounded_pow("state space", u64::from(q), n, limits.max_states)?;
    let q64 = u64::from(q);
    Ok(par::fold_chunks(
        total,
        par::chunk_size(total),
        0u64,
        |range| {
            let mut x = vec![0u32; n];
            range
                .filter(|&i| {
                    decode_state(i, q, &mut x);
                    m.iter().all(|row| {
                        row.iter()
                            .zip(&x)
                            .map(|(&a, &b)| u64::from(a) * u64::from(b))
                            .sum::<u64>()
                            % q64
                            == 0
                    })
                })
                .count() as u64
        },
        |a, b| a + b,
    ))
}

/// Exhaustive `g_L` / `h_L`. Coefficients on arcs range over `{0} ∪ units`
/// (`g_L`) or units (`h_L`); `relaxed` allows every nonzero residue instead
/// of units. Coefficient vectors are enumerated lexicographically over the
/// arcs in row-major order (row `i` = target vertex), and the first
/// maximiser is returned.
pub fn linear_guessing(
    g: &Digraph,
    q: u32,
    mode: LinearMode,
    relaxed: bool,
    limits: &Limits,
) -> Result<LinearReport> {
    if q < 2 {
        return Err(Error::Invalid(format!(
            "modulus must be at least 2, got {q}"
        )));
    }
    let n = g.n();
    let nonzero: Vec<u32> = if relaxed { (1..q).collect() } else { units(q) };
    let allowed: Vec<u32> = match mode {
        LinearMode::GL => std::iter::once(0).chain(nonzero).collect(),
        LinearMode::HL => nonzero,
    };
    // (row, column) = (target, source).
    let slots: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| members(g.in_mask(i)).map(move |u| (i, u)))
        .collect();
    let base = allowed.len() as u64;
    let total = bounded_pow(
        "coefficient matrices",
        base,
        slots.len(),
        limits.linear_matrices,
    )?;
    let prime = is_prime(q);
    let count_of = |index: u64, m: &mut Vec<Vec<u32>>| -> Result<u64> {
        fill_matrix(index, &allowed, &slots, m, q);
        if q == 2 {
            let rows = m.iter().map(|r| {
                r.iter()
                    .enumerate()
                    .fold(0u64, |a, (j, &x)| a | (u64::from(x) << j))
            });
            let rank = rank_gf2(rows.collect());
            return Ok(1u64 << (n - rank));
        }
        if prime {
            let rank = rank_mod_p(m, q);
            return checked_pow(u64::from(q), n - rank)
                .ok_or_else(|| Error::bound("fixed-point count", u64::MAX, u64::MAX));
        }
        kernel_size(m, q, limits)
    };
    let best = par::fold_chunks(
        total,
        par::chunk_size(total),
        Ok((0u64, u64::MAX)),
        |range| {
            let mut m = vec![vec![0u32; n]; n];
            let mut best = (0u64, u64::MAX);
            for index in range {
                let c = count_of(index, &mut m)?;
                if c > best.0 {
                    best = (c, index);
                }
            }
            Ok(best)
        },
        |a: Result<(u64, u64)>, b: Result<(u64, u64)>| {
            let (a, b) = (a?, b?);
            Ok(if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                b
            } else {
                a
            })
        },
    )?;
    let mut m = vec![vec![0u32; n]; n];
    fill_matrix(best.1, &allowed, &slots, &mut m, q);
    // fill_matrix leaves A - I; undo the diagonal shift.
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = (row[i] + 1) % q;
    }
    let witness = LinearCodingFunction::new(q, m)?;
    let fix = witness.dim_fix(limits)?;
    Ok(LinearReport {
        graph: g.clone(),
        q,
        mode,
        relaxed,
        max_fixed: fix.count,
        dimension: fix.dimension,
        witness,
    })
}

/// Writes `A - I` for the coefficient vector with the given index into `m`.
fn fill_matrix(
    mut index: u64,
    allowed: &[u32],
    slots: &[(usize, usize)],
    m: &mut [Vec<u32>],
    q: u32,
) {
    for row in m.iter_mut() {
        row.iter_mut().for_each(|x| *x = 0);
    }
    let base = allowed.len() as u64;
    for &(i, u) in slots.iter().rev() {
        m[i][u] = allowed[(index % base) as usize];
        index /= base;
    }
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = (row[i] + q - 1) % q;
    }
}

/// `f^{-I}` by substituting the linear forms of `F^I`.
pub fn linear_reduce(f: &LinearCodingFunction, set: &[usize]) -> Result<LinearCodingFunction> {
    let g = f.support_graph();
    let mask = g.vertex_mask(set)?;
    let order = g
        .topological_order_mask(mask)
        .ok_or_else(|| Error::NotAcyclic {
            set: mask_to_vec(mask),
        })?;
    let n = f.n();
    let q = u64::from(f.q);
    // forms[i]: F_i as coefficients over all n variables, zero on I.
    let mut forms: Vec<Option<Vec<u64>>> = vec![None; n];
    let expand = |row: &[u32], forms: &[Option<Vec<u64>>]| -> Vec<u64> {
        let mut out = vec![0u64; n];
        for (u, &a) in row.iter().enumerate() {
            if a == 0 {
                continue;
            }
            match &forms[u] {
                Some(form) => {
                    for (o, &c) in out.iter_mut().zip(form) {
                        *o = (*o + u64::from(a) * c) % q;
                    }
                }
                None => out[u] = (out[u] + u64::from(a)) % q,
            }
        }
        out
    };
    for &i in &order {
        let form = expand(&f.matrix[i], &forms);
        forms[i] = Some(form);
    }
    let keep: Vec<usize> = (0..n).filter(|&v| mask & bit(v) == 0).collect();
    let matrix = keep
        .iter()
        .map(|&j| {
            let row = expand(&f.matrix[j], &forms);
            keep.iter().map(|&u| row[u] as u32).collect()
        })
        .collect();
    LinearCodingFunction::new(f.q, matrix)
}

/// Looks for a maximum acyclic set that is not weakly compatible; finding
/// one proves `G` is not strictly linearly solvable over any `Z_q`.
pub fn weak_compat_certificate(g: &Digraph, limits: &Limits) -> Result<WeakCompatVerdict> {
    let k = params::feedback_number(g, limits)?;
    let full = g.full();
    for s in params::fvs_masks_of_size(g, k) {
        let set = full & !s;
        if set == 0 {
            continue;
        }
        if let Some(pair) = g.first_incompatible_pair(set, CompatMode::Weak) {
            return Ok(WeakCompatVerdict::NotStrictlyLinearlySolvable {
                set: mask_to_vec(set),
                pair,
            });
        }
    }
    Ok(WeakCompatVerdict::Inconclusive)
}

/// Whether every maximum acyclic set of `h` (whose feedback number is `k`)
/// is weakly compatible.
fn passes_weak_condition(h: &Digraph, k: usize) -> bool {
    let full = h.full();
    params::fvs_masks_of_size(h, k).into_iter().all(|s| {
        let set = full & !s;
        set == 0 || h.compatibility_mask(set, CompatMode::Weak)
    })
}

struct SpanningSearch<'a> {
    g: &'a Digraph,
    arcs: Vec<(usize, usize)>,
    k: usize,
}

impl SpanningSearch<'_> {
    fn keeps_k(&self, h: &Digraph) -> bool {
        self.k == 0 || !params::has_fvs_of_size(h, self.k - 1)
    }

    /// Visits `h` and every subgraph obtained by further removing arcs with
    /// index `>= from` while keeping `k`. Returns the first subgraph that
    /// passes, with the number of subgraphs checked.
    fn dfs(&self, h: &mut Digraph, from: usize, checked: &mut u64) -> Option<Digraph> {
        *checked += 1;
        if passes_weak_condition(h, self.k) {
            return Some(h.clone());
        }
        for i in from..self.arcs.len() {
            let (u, v) = self.arcs[i];
            h.remove_arc(u, v);
            if self.keeps_k(h) {
                if let Some(found) = self.dfs(h, i + 1, checked) {
                    h.add_arc(u, v).expect("in range");
                    return Some(found);
                }
            }
            h.add_arc(u, v).expect("in range");
        }
        None
    }
}

/// Sound but incomplete test: `G` is linearly solvable only if some spanning
/// subgraph with the same feedback number is strictly linearly solvable, and
/// that requires all its maximum acyclic sets to be weakly compatible.
pub fn prove_not_linearly_solvable(g: &Digraph, limits: &Limits) -> Result<LinearVerdict> {
    let arcs = g.arcs();
    if arcs.len() > limits.spanning_arcs {
        return Err(Error::bound(
            "spanning subgraph arcs",
            limits.spanning_arcs as u64,
            arcs.len() as u64,
        ));
    }
    let k = params::feedback_number(g, limits)?;
    let search = SpanningSearch { g, arcs, k };
    if passes_weak_condition(g, k) {
        return Ok(LinearVerdict::Inconclusive {
            subgraph: g.clone(),
        });
    }
    // Branch on the first removed arc.
    let firsts: Vec<usize> = (0..search.arcs.len()).collect();
    let branches = par::map(&firsts, |&i| {
        let mut h = search.g.clone();
        let (u, v) = search.arcs[i];
        h.remove_arc(u, v);
        let mut checked = 0u64;
        let found = if search.keeps_k(&h) {
            search.dfs(&mut h, i + 1, &mut checked)
        } else {
            None
        };
        (found, checked)
    });
    let mut total = 1u64;
    for (found, checked) in branches {
        total += checked;
        if let Some(subgraph) = found {
            return Ok(LinearVerdict::Inconclusive { subgraph });
        }
    }
    Ok(LinearVerdict::NotLinearlySolvable {
        subgraphs_checked: total,
    })
}
