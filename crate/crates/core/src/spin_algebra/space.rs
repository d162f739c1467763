use crate::error::{Error, Result};

/// Largest chain accepted by [`HilbertSpace::new`].
pub const DEFAULT_MAX_SITES: usize = 14;

/// Tensor-product space of `n_sites` spin-1/2 particles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HilbertSpace {
    n_sites: usize,
    dim: usize,
}

impl HilbertSpace {
    pub fn new(n_sites: usize) -> Result<Self> {
        Self::with_max_sites(n_sites, DEFAULT_MAX_SITES)
    }

    /// Like [`HilbertSpace::new`] with a caller-chosen memory cap.
    pub fn with_max_sites(n_sites: usize, max_sites: usize) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::param("a chain needs at least one site"));
        }
        if n_sites > max_sites {
            return Err(Error::param(format!(
                "{n_sites} sites exceeds the configured maximum of {max_sites}"
            )));
        }
        if n_sites >= usize::BITS as usize {
            return Err(Error::param(format!("{n_sites} sites overflows the index type")));
        }
        Ok(HilbertSpace {
            n_sites,
            dim: 1usize << n_sites,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Bit mask selecting `site` (1-based) in a basis index.
    pub(crate) fn site_mask(&self, site: usize) -> usize {
        1usize << (self.n_sites - site)
    }

    pub(crate) fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.n_sites {
            Err(Error::SiteIndex {
                site,
                n_sites: self.n_sites,
            })
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_same(&self, other: &HilbertSpace) -> Result<()> {
        if self != other {
            Err(Error::Dimension {
                expected: self.dim,
                found: other.dim,
            })
        } else {
            Ok(())
        }
    }

    /// Eigenvalue of `S_z = 1/2 sum sigma_z` on basis state `index`.
    pub fn magnetization(&self, index: usize) -> f64 {
        let down = (index & (self.dim - 1)).count_ones() as f64;
        0.5 * (self.n_sites as f64 - 2.0 * down)
    }
}
