/// Desk-scale resource caps.
///
/// Every potentially explosive operation takes a `Limits` and returns a
/// `ResourceLimit` error instead of running away. The defaults match the
/// command-line defaults; tests occasionally tighten them to exercise the
/// error paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limits {
    /// Largest graph accepted by path search and by the reduction (vertices).
    pub max_vertices: usize,
    /// Largest node budget accepted for language enumeration and witness
    /// search.
    pub max_nodes: usize,
    /// Total number of terms that language enumeration may keep across all
    /// of its (state, size) buckets.
    pub max_bucket_terms: usize,
    /// Backtracking steps the constrained witness search may spend.
    pub max_search_steps: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_vertices: 10,
            max_nodes: 100_000,
            max_bucket_terms: 1_000_000,
            max_search_steps: 10_000_000,
        }
    }
}

impl Limits {
    pub fn with_max_vertices(mut self, cap: usize) -> Self {
        self.max_vertices = cap;
        self
    }

    pub fn with_max_nodes(mut self, cap: usize) -> Self {
        self.max_nodes = cap;
        self
    }

    pub fn with_max_bucket_terms(mut self, cap: usize) -> Self {
        self.max_bucket_terms = cap;
        self
    }

    pub fn with_max_search_steps(mut self, cap: u64) -> Self {
        self.max_search_steps = cap;
        self
    }
}
