//! Exact computation of intersection Poincaré polynomials of moduli spaces of
//! semistable degree-0 bundles on a curve, together with the local and smooth
//! data the computation consumes.
//!
//! Everything is exact: coefficients are big integers, series are truncated
//! in `q` but never rounded.

pub mod combinat;
pub mod engine;
pub mod error;
pub mod exactpoly;
pub mod graphkernel;
pub mod localdata;
pub mod qgraded;
pub mod smoothmoduli;

pub use error::{Error, Result};
pub use exactpoly::{BiLaurentPoly, LaurentPoly};
pub use num_bigint::BigInt;

use serde::{Deserialize, Serialize};

/// Genus of the underlying curve, validated to be at least 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Genus(u32);

impl Genus {
    pub fn new(g: u32) -> Result<Self> {
        if g < 2 {
            return Err(Error::usage(format!("genus must satisfy g >= 2, got {g}")));
        }
        Ok(Genus(g))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// `g - 1`, the factor appearing in every codimension formula.
    pub fn gm1(self) -> i64 {
        self.0 as i64 - 1
    }
}

impl TryFrom<u32> for Genus {
    type Error = Error;
    fn try_from(g: u32) -> Result<Self> {
        Genus::new(g)
    }
}

impl From<Genus> for u32 {
    fn from(g: Genus) -> u32 {
        g.0
    }
}

impl std::fmt::Display for Genus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Complex dimension `(g-1) r^2 + 1` of the moduli spaces of rank `r`.
pub fn moduli_dim(r: u32, g: Genus) -> i64 {
    g.gm1() * (r as i64) * (r as i64) + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_validation() {
        assert!(Genus::new(1).unwrap_err().is_usage());
        assert!(Genus::new(0).is_err());
        assert_eq!(Genus::new(3).unwrap().gm1(), 2);
        assert!(serde_json::from_str::<Genus>("1").is_err());
        assert_eq!(serde_json::from_str::<Genus>("4").unwrap().get(), 4);
    }

    #[test]
    fn dimensions() {
        let g = Genus::new(2).unwrap();
        assert_eq!(moduli_dim(1, g), 2);
        assert_eq!(moduli_dim(2, g), 5);
    }
}
