//! Size caps shared by constructions and exhaustive searches.
//!
//! `STS_MAX_ORDER` in the environment overrides every order-type cap at once.

pub const MAX_ORDER_ENV: &str = "STS_MAX_ORDER";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest order a construction may produce.
    pub construct_order: usize,
    /// Largest order accepted by exhaustive minimum-spreading searches.
    pub search_order: usize,
    /// Largest order accepted by minimal-set enumeration and saturating scans.
    pub enumerate_order: usize,
    /// Largest projective dimension for hyperplane families.
    pub hyperplane_dim: usize,
    /// Largest `n` for the hyperplane-union partial system.
    pub section4_n: usize,
    pub extremes_dim: usize,
    pub extremes_m: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            construct_order: 1023,
            search_order: 63,
            enumerate_order: 31,
            hyperplane_dim: 10,
            section4_n: 6,
            extremes_dim: 3,
            extremes_m: 8,
        }
    }
}

impl Limits {
    pub fn from_env() -> Self {
        let mut limits = Limits::default();
        if let Some(cap) = std::env::var(MAX_ORDER_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
        {
            limits.construct_order = cap;
            limits.search_order = cap;
            limits.enumerate_order = cap;
        }
        limits
    }
}
