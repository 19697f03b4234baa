//! What an induced module is induced from: which generators act freely and
//! how the rest act on the inner space.

use std::collections::BTreeSet;
use std::fmt;

use crate::affine::{AffGen, LoopAlgebra};
use crate::algebra::{Label, LinComb, MultiIndex, Scalar, Truncation};
use crate::error::{invalid, Result};
use crate::heisenberg::{HGen, HeisenbergKind, HeisenbergModule};
use crate::phi::PhiFunction;

use super::pbw::PbwMonomial;

pub trait InductionData {
    type Inner: Clone + Ord + fmt::Debug + fmt::Display;

    fn level(&self) -> &Scalar;
    /// Generators spanning the free (negative) part.
    fn is_free(&self, g: &AffGen) -> bool;
    /// Action on the inner space of a noncentral, non-Cartan generator that
    /// is not free.
    fn act_inner(&self, g: &AffGen, b: &Self::Inner) -> Result<LinComb<Self::Inner>>;
    /// `delta`-degree of an inner basis vector.
    fn inner_degree(&self, b: &Self::Inner) -> i64;
    /// `|k|` for the imaginary modes used by an inner basis vector.
    fn inner_occupied(&self, b: &Self::Inner) -> BTreeSet<i64>;
    /// Windowed pairs (imaginary free monomial, inner basis vector).
    fn inner_parts(&self, alg: &LoopAlgebra) -> Vec<(PbwMonomial, Self::Inner)>;
    fn describe(&self) -> String;
}

fn negative_real(g: &AffGen) -> bool {
    matches!(g, AffGen::Real { i, j, .. } if i > j)
}

/// `P = (H + L) ⊕ g_R` acting on `V`: `g_R V = 0`, `L` through `V`.
#[derive(Clone, Debug)]
pub struct ParabolicData<V> {
    pub inner: V,
}

impl<V: HeisenbergModule> InductionData for ParabolicData<V> {
    type Inner = V::Basis;

    fn level(&self) -> &Scalar {
        self.inner.level()
    }

    fn is_free(&self, g: &AffGen) -> bool {
        negative_real(g)
    }

    fn act_inner(&self, g: &AffGen, b: &V::Basis) -> Result<LinComb<V::Basis>> {
        match g.to_heisenberg() {
            Some(h) => self.inner.act_basis(&h, b),
            None if g.is_real() => Ok(LinComb::zero()),
            None => invalid(format!("{g} is not handled by the inner module")),
        }
    }

    fn inner_degree(&self, b: &V::Basis) -> i64 {
        self.inner.z_degree(b)
    }

    fn inner_occupied(&self, b: &V::Basis) -> BTreeSet<i64> {
        self.inner.occupied_modes(b).iter().map(|m| m.degree()).collect()
    }

    fn inner_parts(&self, _alg: &LoopAlgebra) -> Vec<(PbwMonomial, V::Basis)> {
        self.inner.basis().into_iter().map(|b| (PbwMonomial::empty(), b)).collect()
    }

    fn describe(&self) -> String {
        format!("parabolic induction from a module over {}", self.inner.kind())
    }
}

/// Induction from `K_I ⊕ K_phi^+ ⊕ g_R` (and `H`) acting on `N`: the
/// imaginary modes in `I` act through `N`, the `phi`-plus generators of the
/// other modes kill it, and their `phi`-minus partners are free. With `I`
/// empty and `N` trivial this is `U(g) ⊗_{U(b_phi)} C v_lambda`.
#[derive(Clone, Debug)]
pub struct PartialData<N> {
    pub inner: N,
    pub i_modes: BTreeSet<Label>,
    pub phi: PhiFunction,
    pub trunc: Truncation,
    kind: HeisenbergKind,
}

impl<N: HeisenbergModule> PartialData<N> {
    pub fn new(inner: N, i_modes: BTreeSet<Label>, phi: PhiFunction, trunc: Truncation) -> Result<Self> {
        let kind = inner.kind().clone();
        if !kind.is_loop() {
            return invalid("partial induction needs a module over the imaginary part of an affine algebra");
        }
        let data = Self { inner, i_modes, phi, trunc, kind };
        for m in data.free_modes() {
            data.kind.mode_pair(&data.phi, m)?;
        }
        Ok(data)
    }

    fn free_modes(&self) -> Vec<Label> {
        self.kind
            .modes(self.trunc.max_delta_degree)
            .into_iter()
            .filter(|m| !self.i_modes.contains(m))
            .collect()
    }

    fn mode_of(g: &AffGen) -> Option<Label> {
        match *g {
            AffGen::Imag { k, i } => Some(Label::Pair(k.abs(), i)),
            _ => None,
        }
    }
}

impl<N: HeisenbergModule> InductionData for PartialData<N> {
    type Inner = N::Basis;

    fn level(&self) -> &Scalar {
        self.inner.level()
    }

    fn is_free(&self, g: &AffGen) -> bool {
        if negative_real(g) {
            return true;
        }
        match Self::mode_of(g) {
            Some(m) if !self.i_modes.contains(&m) => match self.kind.mode_pair(&self.phi, m) {
                Ok(p) => g.to_heisenberg() == Some(p.minus),
                Err(_) => false,
            },
            _ => false,
        }
    }

    fn act_inner(&self, g: &AffGen, b: &N::Basis) -> Result<LinComb<N::Basis>> {
        if g.is_real() {
            return Ok(LinComb::zero());
        }
        match Self::mode_of(g) {
            Some(m) if self.i_modes.contains(&m) => self.inner.act_basis(&g.to_heisenberg().expect("imaginary"), b),
            Some(_) => Ok(LinComb::zero()),
            None => invalid(format!("{g} is not handled by the inner module")),
        }
    }

    fn inner_degree(&self, b: &N::Basis) -> i64 {
        self.inner.z_degree(b)
    }

    fn inner_occupied(&self, b: &N::Basis) -> BTreeSet<i64> {
        self.inner.occupied_modes(b).iter().map(|m| m.degree()).collect()
    }

    fn inner_parts(&self, alg: &LoopAlgebra) -> Vec<(PbwMonomial, N::Basis)> {
        let modes = self.free_modes();
        let mut words = Vec::new();
        fn rec(
            d: &PartialData<impl HeisenbergModule>,
            modes: &[Label],
            pos: usize,
            cur: &mut MultiIndex,
            out: &mut Vec<MultiIndex>,
        ) {
            if pos == modes.len() {
                out.push(cur.clone());
                return;
            }
            for e in 0..=d.trunc.max_exponent {
                cur.set(modes[pos], e);
                if d.trunc.admits_exponents(cur) {
                    rec(d, modes, pos + 1, cur, out);
                }
            }
            cur.set(modes[pos], 0);
        }
        rec(self, &modes, 0, &mut MultiIndex::new(), &mut words);
        let inner = self.inner.basis();
        let mut out = Vec::new();
        for k in words {
            let word = PbwMonomial::from_factors(
                alg,
                k.iter().map(|(m, e)| {
                    let p = self.kind.mode_pair(&self.phi, *m).expect("checked in new");
                    (AffGen::from_heisenberg(&p.minus).expect("loop generator"), *e as u32)
                }),
            );
            for b in &inner {
                out.push((word.clone(), b.clone()));
            }
        }
        out
    }

    fn describe(&self) -> String {
        let i: Vec<String> = self.i_modes.iter().map(|m| m.to_string()).collect();
        format!("induction from K_I + K_phi^+ with I = {{{}}}", i.join("; "))
    }
}

/// The one-dimensional module `C v` of level `a` over `Cc` alone.
#[derive(Clone, Debug)]
pub struct TrivialModule {
    kind: HeisenbergKind,
    a: Scalar,
    trunc: Truncation,
}

impl TrivialModule {
    pub fn new(kind: HeisenbergKind, a: Scalar, trunc: Truncation) -> Self {
        Self { kind, a, trunc }
    }
}

impl HeisenbergModule for TrivialModule {
    type Basis = MultiIndex;

    fn kind(&self) -> &HeisenbergKind {
        &self.kind
    }

    fn level(&self) -> &Scalar {
        &self.a
    }

    fn truncation(&self) -> &Truncation {
        &self.trunc
    }

    fn highest(&self) -> MultiIndex {
        MultiIndex::new()
    }

    fn basis(&self) -> Vec<MultiIndex> {
        vec![MultiIndex::new()]
    }

    fn in_window(&self, b: &MultiIndex) -> bool {
        b.is_zero()
    }

    fn act_basis(&self, g: &HGen, b: &MultiIndex) -> Result<LinComb<MultiIndex>> {
        if *g == HGen::C {
            return Ok(LinComb::term(b.clone(), self.a.clone()));
        }
        invalid(format!("{g} does not act on the trivial module"))
    }

    fn z_infty_degree(&self, _b: &MultiIndex) -> MultiIndex {
        MultiIndex::new()
    }

    fn generators(&self) -> Vec<HGen> {
        Vec::new()
    }

    fn is_creation(&self, _g: &HGen) -> bool {
        false
    }
}
