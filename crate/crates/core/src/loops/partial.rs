//! `N ⊗ M`: a module over `K_I` tensored with a Verma-type module over the
//! remaining modes, as a module over the whole of `L`.

use std::collections::BTreeSet;
use std::fmt;

use crate::algebra::{Label, LinComb, MultiIndex, Scalar, Truncation};
use crate::error::{invalid, Result};
use crate::heisenberg::{HGen, HeisenbergKind, HeisenbergModule};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TensorBasis<A, B> {
    pub left: A,
    pub right: B,
}

impl<A: fmt::Display, B: fmt::Display> fmt::Display for TensorBasis<A, B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ⊗ {}", self.left, self.right)
    }
}

/// Modes in `left_modes` act on the left factor, all others on the right.
#[derive(Clone, Debug)]
pub struct TensorModule<N, P> {
    left: N,
    right: P,
    left_modes: BTreeSet<Label>,
}

impl<N: HeisenbergModule, P: HeisenbergModule> TensorModule<N, P> {
    pub fn new(left: N, right: P, left_modes: BTreeSet<Label>) -> Result<Self> {
        if left.kind() != right.kind() {
            return invalid(format!("tensor factors live over {} and {}", left.kind(), right.kind()));
        }
        if left.level() != right.level() {
            return invalid("tensor factors must have the same level");
        }
        Ok(Self { left, right, left_modes })
    }

    pub fn left(&self) -> &N {
        &self.left
    }

    pub fn right(&self) -> &P {
        &self.right
    }
}

impl<N: HeisenbergModule, P: HeisenbergModule> HeisenbergModule for TensorModule<N, P> {
    type Basis = TensorBasis<N::Basis, P::Basis>;

    fn kind(&self) -> &HeisenbergKind {
        self.left.kind()
    }

    fn level(&self) -> &Scalar {
        self.left.level()
    }

    fn truncation(&self) -> &Truncation {
        self.right.truncation()
    }

    fn highest(&self) -> Self::Basis {
        TensorBasis { left: self.left.highest(), right: self.right.highest() }
    }

    fn basis(&self) -> Vec<Self::Basis> {
        let rb = self.right.basis();
        let mut out = Vec::new();
        for l in self.left.basis() {
            for r in &rb {
                out.push(TensorBasis { left: l.clone(), right: r.clone() });
            }
        }
        out
    }

    fn in_window(&self, b: &Self::Basis) -> bool {
        self.left.in_window(&b.left) && self.right.in_window(&b.right)
    }

    fn act_basis(&self, g: &HGen, b: &Self::Basis) -> Result<LinComb<Self::Basis>> {
        if *g == HGen::C {
            return Ok(LinComb::term(b.clone(), self.level().clone()));
        }
        let m = g.mode().expect("noncentral");
        if self.left_modes.contains(&m) {
            let r = b.right.clone();
            Ok(self.left.act_basis(g, &b.left)?.map_basis(|l| TensorBasis { left: l.clone(), right: r.clone() }))
        } else {
            let l = b.left.clone();
            Ok(self.right.act_basis(g, &b.right)?.map_basis(|r| TensorBasis { left: l.clone(), right: r.clone() }))
        }
    }

    fn z_infty_degree(&self, b: &Self::Basis) -> MultiIndex {
        self.left.z_infty_degree(&b.left).add(&self.right.z_infty_degree(&b.right))
    }

    fn generators(&self) -> Vec<HGen> {
        let mut g = self.left.generators();
        g.extend(self.right.generators());
        g.sort();
        g.dedup();
        g
    }

    fn is_creation(&self, g: &HGen) -> bool {
        match g.mode() {
            Some(m) if self.left_modes.contains(&m) => self.left.is_creation(g),
            _ => self.right.is_creation(g),
        }
    }
}
