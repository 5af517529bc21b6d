//! Exact-search caps. Every exhaustive routine checks its input size against
//! one of these before starting, and fails with [`Error::SizeBound`] instead
//! of running for an unbounded time.

use crate::error::{Error, Result};

/// Environment variable overriding [`Limits::max_states`].
pub const MAX_STATES_ENV: &str = "GUESSLAB_MAX_STATES";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Vertex cap for feedback-vertex-set / acyclic-set searches.
    pub fvs_vertices: usize,
    /// Vertex cap for cycle packing, matching and clique partition.
    pub packing_vertices: usize,
    /// Cap on `q^n` for full state-space sweeps (fixed points, composite kernels).
    pub max_states: u64,
    /// Cap on `q^n` for the conflict graph behind `g(G,q)`.
    pub conflict_states: u64,
    /// Cap on the number of coefficient matrices in a linear search.
    pub linear_matrices: u64,
    /// Cap on the number of table combinations in an exhaustive function search.
    pub function_combinations: u64,
    /// Cap on `q^(q^indeg)` for a single local-function table space.
    pub table_space: u64,
    /// Cap on the arc count for spanning-subgraph enumeration.
    pub spanning_arcs: usize,
    /// Cap on vertex count for in-dominating set counting.
    pub ids_vertices: usize,
    /// Cap on vertex count for intersection-model search.
    pub model_vertices: usize,
    /// Cap on vertex count for the `mindim` reduction-sequence search.
    pub mindim_vertices: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            fvs_vertices: 16,
            packing_vertices: 12,
            max_states: 1 << 24,
            conflict_states: 4096,
            linear_matrices: 1 << 26,
            function_combinations: 1 << 32,
            table_space: 1 << 20,
            spanning_arcs: 22,
            ids_vertices: 20,
            model_vertices: 7,
            mindim_vertices: 12,
        }
    }
}

impl Limits {
    /// Larger graph caps for construction-verification fixtures (e.g. the
    /// 22-vertex bidirectional union with the Clebsch graph).
    pub fn extended() -> Self {
        Limits {
            fvs_vertices: 64,
            packing_vertices: 24,
            ..Limits::default()
        }
    }

    /// Defaults with `max_states` taken from `GUESSLAB_MAX_STATES` when set.
    pub fn from_env() -> Result<Self> {
        let mut limits = Limits::default();
        if let Ok(raw) = std::env::var(MAX_STATES_ENV) {
            limits.max_states = raw.trim().parse().map_err(|_| {
                Error::Invalid(format!(
                    "{MAX_STATES_ENV} must be a positive integer, got {raw:?}"
                ))
            })?;
        }
        Ok(limits)
    }
}

/// `base^exp`, or `None` on overflow.
pub(crate) fn checked_pow(base: u64, exp: usize) -> Option<u64> {
    let exp = u32::try_from(exp).ok()?;
    base.checked_pow(exp)
}

/// `base^exp` checked against `limit`.
pub(crate) fn bounded_pow(what: &'static str, base: u64, exp: usize, limit: u64) -> Result<u64> {
    match checked_pow(base, exp) {
        Some(v) if v <= limit => Ok(v),
        Some(v) => Err(Error::bound(what, limit, v)),
        None => Err(Error::bound(what, limit, u64::MAX)),
    }
}
