//! Multiple-unicast network coding instances in circuit representation and
//! their conversion to guessing digraphs.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::digraph::{Digraph, MAX_VERTICES};
use crate::error::{Error, Result};
use crate::guessing::guessing_number;
use crate::limits::Limits;

/// Nodes carry arbitrary distinct labels. Pair `i` is `(s_i, d_i)`; every
/// out-arc of a node carries the same symbol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct UnicastInstance {
    pairs: Vec<(usize, usize)>,
    intermediates: Vec<usize>,
    arcs: Vec<(usize, usize)>,
    q: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    pairs: Vec<(usize, usize)>,
    #[serde(default)]
    intermediates: Vec<usize>,
    arcs: Vec<(usize, usize)>,
    q: u32,
}

impl TryFrom<RawInstance> for UnicastInstance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        UnicastInstance::new(raw.pairs, raw.intermediates, raw.arcs, raw.q)
    }
}

impl UnicastInstance {
    /// Checks that labels are distinct, arcs join declared nodes, no arc
    /// enters a source or leaves a destination, and the network is acyclic.
    pub fn new(
        pairs: Vec<(usize, usize)>,
        intermediates: Vec<usize>,
        arcs: Vec<(usize, usize)>,
        q: u32,
    ) -> Result<Self> {
        if q < 2 {
            return Err(Error::Invalid(format!(
                "alphabet size must be at least 2, got {q}"
            )));
        }
        let vertices = pairs.len() + intermediates.len();
        if vertices > MAX_VERTICES {
            return Err(Error::bound(
                "merged vertices",
                MAX_VERTICES as u64,
                vertices as u64,
            ));
        }
        let inst = UnicastInstance {
            pairs,
            intermediates,
            arcs,
            q,
        };
        let roles = inst.roles()?;
        let mut succ: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut indeg: HashMap<usize, usize> = roles.keys().map(|&v| (v, 0)).collect();
        for &(a, b) in &inst.arcs {
            let (ra, rb) = match (roles.get(&a), roles.get(&b)) {
                (Some(&ra), Some(&rb)) => (ra, rb),
                _ => {
                    return Err(Error::Invalid(format!(
                        "arc ({a}, {b}) uses an undeclared node"
                    )))
                }
            };
            if let Role::Source(_) = rb {
                return Err(Error::Invalid(format!("arc ({a}, {b}) enters a source")));
            }
            if let Role::Destination(_) = ra {
                return Err(Error::Invalid(format!(
                    "arc ({a}, {b}) leaves a destination"
                )));
            }
            succ.entry(a).or_default().push(b);
            *indeg.get_mut(&b).expect("declared") += 1;
        }
        let mut ready: Vec<usize> = indeg
            .iter()
            .filter(|&(_, &d)| d == 0)
            .map(|(&v, _)| v)
            .collect();
        let mut visited = 0;
        while let Some(v) = ready.pop() {
            visited += 1;
            for &w in succ.get(&v).map_or(&[][..], Vec::as_slice) {
                let d = indeg.get_mut(&w).expect("declared");
                *d -= 1;
                if *d == 0 {
                    ready.push(w);
                }
            }
        }
        if visited != roles.len() {
            return Err(Error::Invalid("the network has a directed cycle".into()));
        }
        Ok(inst)
    }

    fn roles(&self) -> Result<HashMap<usize, Role>> {
        let mut roles = HashMap::new();
        let labelled = self
            .pairs
            .iter()
            .enumerate()
            .flat_map(|(i, &(s, d))| [(s, Role::Source(i)), (d, Role::Destination(i))])
            .chain(
                self.intermediates
                    .iter()
                    .enumerate()
                    .map(|(t, &v)| (v, Role::Intermediate(t))),
            );
        for (v, role) in labelled {
            if roles.insert(v, role).is_some() {
                return Err(Error::Invalid(format!("node label {v} used twice")));
            }
        }
        Ok(roles)
    }

    /// The butterfly network: `s_1 = 0`, `s_2 = 1`, `d_1 = 2`, `d_2 = 3`,
    /// intermediate `4`.
    pub fn butterfly(q: u32) -> Result<Self> {
        UnicastInstance::new(
            vec![(0, 2), (1, 3)],
            vec![4],
            vec![(0, 3), (0, 4), (1, 2), (1, 4), (4, 2), (4, 3)],
            q,
        )
    }

    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn intermediates(&self) -> &[usize] {
        &self.intermediates
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    /// Merges `s_i` and `d_i` into vertex `i`; intermediates follow in
    /// declaration order.
    pub fn to_guessing_digraph(&self) -> Result<Digraph> {
        let k = self.k();
        let vertex: HashMap<usize, usize> = self
            .roles()?
            .into_iter()
            .map(|(label, role)| {
                let v = match role {
                    Role::Source(i) | Role::Destination(i) => i,
                    Role::Intermediate(t) => k + t,
                };
                (label, v)
            })
            .collect();
        Digraph::from_arcs(
            k + self.intermediates.len(),
            self.arcs.iter().map(|&(a, b)| (vertex[&a], vertex[&b])),
        )
    }

    /// Solvable over `[q]` iff `k(G_N) = k` and `g(G_N, q) = k`.
    pub fn is_solvable(&self, limits: &Limits) -> Result<bool> {
        let g = self.to_guessing_digraph()?;
        if crate::digraph::feedback_number(&g, limits)? != self.k() {
            return Ok(false);
        }
        let report = guessing_number(&g, self.q, limits)?;
        Ok(report.max_fixed
            == crate::limits::checked_pow(u64::from(self.q), self.k()).unwrap_or(u64::MAX))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Source(usize),
    Destination(usize),
    Intermediate(usize),
}
