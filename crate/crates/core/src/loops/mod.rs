//! Modules over the affine algebra induced from the Heisenberg side:
//! `phi`-imaginary Verma modules, generalized loop modules `M(lambda, V)`,
//! partial generalized loop modules, and the irreducibility probe.

mod builders;
mod data;
mod induced;
mod partial;
mod pbw;
mod probe;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{parse_scalar, scalar_serde, scalar_vec_serde, Scalar};
use crate::error::{invalid, Result};

pub use builders::{
    build_generalized_loop, build_m_phi_lambda, build_partial_loop, cross_check_phi_construction, phi_verma_label_map,
    GeneralizedLoop, PartialLoop, PhiImaginaryVerma,
};
pub use data::{InductionData, ParabolicData, PartialData, TrivialModule};
pub use induced::{check_isomorphic, InducedModule, LoopBasis, Weight};
pub use partial::{TensorBasis, TensorModule};
pub use pbw::{pbw_key, PbwKey, PbwMonomial};
pub use probe::{irreducibility_probe, replay, ProbeResult, ProbeStep};

/// `lambda` on `H = h ⊕ Cc ⊕ Cd`: values on `h_1..h_l`, the level `lambda(c)`
/// and `lambda(d)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanWeight {
    #[serde(with = "scalar_vec_serde")]
    pub h: Vec<Scalar>,
    #[serde(with = "scalar_serde")]
    pub c: Scalar,
    #[serde(with = "scalar_serde")]
    pub d: Scalar,
}

impl CartanWeight {
    pub fn new(h: Vec<Scalar>, c: Scalar, d: Scalar) -> Self {
        Self { h, c, d }
    }

    /// Reads labels `h1..hl`, `c`, `d` (missing ones are zero).
    pub fn from_labels(rank: usize, values: &BTreeMap<String, String>) -> Result<Self> {
        let mut w = Self::new(vec![Scalar::default(); rank], Scalar::default(), Scalar::default());
        for (k, v) in values {
            let x = parse_scalar(v)?;
            match k.as_str() {
                "c" => w.c = x,
                "d" => w.d = x,
                _ => {
                    let i: usize = k
                        .strip_prefix('h')
                        .and_then(|s| s.parse().ok())
                        .filter(|i| (1..=rank).contains(i))
                        .ok_or_else(|| crate::error::Error::InvalidArgument(format!("bad Cartan label {k:?}")))?;
                    w.h[i - 1] = x;
                }
            }
        }
        Ok(w)
    }

    pub fn level(&self) -> &Scalar {
        &self.c
    }

    pub(crate) fn check_rank(&self, rank: usize) -> Result<()> {
        if self.h.len() != rank {
            return invalid(format!("lambda has {} Cartan values, the algebra has rank {rank}", self.h.len()));
        }
        Ok(())
    }
}

impl fmt::Display for CartanWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h: Vec<String> = self.h.iter().map(crate::algebra::format_scalar).collect();
        write!(
            f,
            "lambda(h) = ({}), lambda(c) = {}, lambda(d) = {}",
            h.join(", "),
            crate::algebra::format_scalar(&self.c),
            crate::algebra::format_scalar(&self.d)
        )
    }
}
