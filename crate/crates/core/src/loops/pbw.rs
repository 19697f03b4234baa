//! Ordered monomials in the free generators of an induced module.

use std::fmt;

use crate::affine::{AffGen, LoopAlgebra};
use crate::algebra::scalar_to_i64;

/// Sort key of a free generator. Imaginary generators come first (they sit
/// next to the inner vector); real ones are ordered by the height of `beta`,
/// then `beta` lexicographically, then the loop power.
pub type PbwKey = (u8, i64, Vec<i64>, i64, u32);

pub fn pbw_key(alg: &LoopAlgebra, g: &AffGen) -> PbwKey {
    match *g {
        AffGen::Imag { k, i } => (0, 0, Vec::new(), k, i),
        AffGen::Real { n, .. } => {
            let root = alg.root_of(g).expect("real generator");
            let beta: Vec<i64> = root.finite.iter().map(|c| -scalar_to_i64(c).expect("integral root")).collect();
            let ht = beta.iter().sum::<i64>().abs();
            (1, ht, beta, n, 0)
        }
        AffGen::Cartan(i) => (2, 0, Vec::new(), 0, i),
        AffGen::C => (3, 0, Vec::new(), 0, 0),
        AffGen::D => (4, 0, Vec::new(), 0, 0),
    }
}

/// `z_t^{p_t} ... z_1^{p_1}` stored left to right with strictly decreasing
/// keys, so the last factor acts first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PbwMonomial(pub Vec<(AffGen, u32)>);

impl PbwMonomial {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(AffGen, u32)] {
        &self.0
    }

    /// Number of factors counted with multiplicity.
    pub fn len(&self) -> u32 {
        self.0.iter().map(|(_, p)| p).sum()
    }

    pub fn has_real(&self) -> bool {
        self.0.iter().any(|(g, _)| g.is_real())
    }

    pub fn real_part(&self) -> PbwMonomial {
        PbwMonomial(self.0.iter().filter(|(g, _)| g.is_real()).cloned().collect())
    }

    pub fn imaginary_part(&self) -> PbwMonomial {
        PbwMonomial(self.0.iter().filter(|(g, _)| !g.is_real()).cloned().collect())
    }

    /// Sum of loop powers of the factors.
    pub fn degree(&self) -> i64 {
        self.0.iter().map(|(g, p)| g.degree() * *p as i64).sum()
    }

    /// The rightmost real factor with its exponent.
    pub fn first_real(&self) -> Option<(AffGen, u32)> {
        self.0.iter().rev().find(|(g, _)| g.is_real()).cloned()
    }

    /// Builds a monomial from unordered factors.
    pub fn from_factors(alg: &LoopAlgebra, factors: impl IntoIterator<Item = (AffGen, u32)>) -> Self {
        let mut v: Vec<(AffGen, u32)> = Vec::new();
        for (g, p) in factors {
            if p == 0 {
                continue;
            }
            match v.iter_mut().find(|(h, _)| *h == g) {
                Some(e) => e.1 += p,
                None => v.push((g, p)),
            }
        }
        v.sort_by(|a, b| pbw_key(alg, &b.0).cmp(&pbw_key(alg, &a.0)));
        Self(v)
    }

    /// Generators in acting order for `z_t ... z_1`: the first entry acts
    /// first.
    pub fn acting_sequence(&self) -> Vec<AffGen> {
        let mut out = Vec::new();
        for (g, p) in self.0.iter().rev() {
            for _ in 0..*p {
                out.push(*g);
            }
        }
        out
    }
}

impl fmt::Display for PbwMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (n, (g, p)) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, " ")?;
            }
            if *p == 1 {
                write!(f, "{g}")?;
            } else {
                write!(f, "{g}^{p}")?;
            }
        }
        Ok(())
    }
}
