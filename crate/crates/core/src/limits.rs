//! Size caps shared by the constructors and the exact solvers.

/// Environment variable overriding [`Limits::max_vertices`].
pub const VERTEX_CAP_ENV: &str = "SHANNON_CONE_VERTEX_CAP";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest graph that may be constructed.
    pub max_vertices: usize,
    /// Largest graph accepted by the exact independence-number search.
    pub max_alpha_vertices: usize,
    /// Largest graph accepted by the exact chromatic-number search.
    pub max_chi_vertices: usize,
    /// Largest dense matrix dimension that may be constructed.
    pub max_matrix_dim: usize,
    /// Largest dimension accepted by the exact copositivity oracle.
    pub max_copositive_dim: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_vertices: 10_000,
            max_alpha_vertices: 200,
            max_chi_vertices: 50,
            max_matrix_dim: 4_096,
            max_copositive_dim: 12,
        }
    }
}

impl Limits {
    /// Defaults, with the construction cap taken from `SHANNON_CONE_VERTEX_CAP` when set.
    pub fn from_env() -> Self {
        let mut limits = Limits::default();
        if let Some(cap) = std::env::var(VERTEX_CAP_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
        {
            limits.max_vertices = cap;
        }
        limits
    }
}
