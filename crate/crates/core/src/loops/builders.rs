//! Constructors for the module families and the maps that compare them.

use std::collections::{BTreeMap, BTreeSet};

use crate::affine::{AffGen, LoopAlgebra};
use crate::algebra::{Label, MultiIndex, Truncation};
use crate::error::{invalid, Error, Result};
use crate::heisenberg::{HeisenbergKind, HeisenbergModule};
use crate::phi::PhiFunction;
use crate::phi_verma::PhiVermaModule;
use crate::roots::AffineType;

use super::data::{ParabolicData, PartialData, TrivialModule};
use super::induced::{check_isomorphic, InducedModule, LoopBasis, Weight};
use super::partial::{TensorBasis, TensorModule};
use super::pbw::PbwMonomial;
use super::CartanWeight;

pub type PhiImaginaryVerma = InducedModule<PartialData<TrivialModule>>;
pub type GeneralizedLoop<V> = InducedModule<ParabolicData<V>>;

/// `M_phi(lambda) = U(g) ⊗_{U(b_phi)} C v_lambda`.
pub fn build_m_phi_lambda(
    ty: AffineType,
    phi: &PhiFunction,
    lambda: CartanWeight,
    trunc: Truncation,
) -> Result<PhiImaginaryVerma> {
    let alg = LoopAlgebra::new(ty)?;
    let trivial = TrivialModule::new(HeisenbergKind::Loop(ty), lambda.c.clone(), trunc.clone());
    let data = PartialData::new(trivial, BTreeSet::new(), phi.clone(), trunc.clone())?;
    InducedModule::new(alg, data, lambda, trunc)
}

/// `M(lambda, V) = U(g) ⊗_{U(P)} V` with `g_R V = 0` and `h v = lambda(h) v`.
pub fn build_generalized_loop<V: HeisenbergModule>(
    lambda: CartanWeight,
    inner: V,
    trunc: Truncation,
) -> Result<GeneralizedLoop<V>> {
    let HeisenbergKind::Loop(ty) = inner.kind().clone() else {
        return invalid(format!("the inner module lives over {}, not over L", inner.kind()));
    };
    InducedModule::new(LoopAlgebra::new(ty)?, ParabolicData { inner }, lambda, trunc)
}

/// The `phi`-minus generator of a mode, as an affine generator.
fn minus_generator(kind: &HeisenbergKind, phi: &PhiFunction, mode: Label) -> Result<AffGen> {
    let p = kind.mode_pair(phi, mode)?;
    AffGen::from_heisenberg(&p.minus).ok_or_else(|| Error::InvalidArgument(format!("{mode} is not a loop mode")))
}

/// Moves the inner `phi`-Verma label of `M(lambda, M_phi(a))` into the word:
/// `u ⊗ prod y^k v` goes to `(u prod y^k) ⊗ v`.
pub fn phi_verma_label_map<'a>(
    alg: &'a LoopAlgebra,
    phi: &PhiFunction,
) -> impl Fn(&LoopBasis<MultiIndex>) -> LoopBasis<MultiIndex> + 'a {
    let phi = phi.clone();
    let kind = alg.heisenberg_kind();
    move |lb| fold_into_word(alg, &kind, &phi, &lb.word, &lb.inner, MultiIndex::new())
}

fn fold_into_word<B>(
    alg: &LoopAlgebra,
    kind: &HeisenbergKind,
    phi: &PhiFunction,
    word: &PbwMonomial,
    k: &MultiIndex,
    inner: B,
) -> LoopBasis<B> {
    let mut factors: Vec<(AffGen, u32)> = word.factors().to_vec();
    for (m, e) in k.iter() {
        let g = minus_generator(kind, phi, *m).expect("mode in the window");
        factors.push((g, *e as u32));
    }
    LoopBasis { word: PbwMonomial::from_factors(alg, factors), inner }
}

/// Basis-for-basis comparison of `M_phi(lambda)` with
/// `M(lambda, M_phi(a))`, including the action of every generator with
/// `|degree| <= gen_bound`.
pub fn cross_check_phi_construction(
    ty: AffineType,
    phi: &PhiFunction,
    lambda: CartanWeight,
    trunc: Truncation,
    gen_bound: i64,
) -> Result<usize> {
    let direct = build_m_phi_lambda(ty, phi, lambda.clone(), trunc.clone())?;
    let inner = PhiVermaModule::new(HeisenbergKind::Loop(ty), phi.clone(), lambda.c.clone(), trunc.clone())?;
    let induced = build_generalized_loop(lambda, inner, trunc)?;
    let alg = direct.algebra().clone();
    let gens = alg.generators(gen_bound);
    check_isomorphic(&induced, &direct, phi_verma_label_map(&alg, phi), &gens)
}

/// Both constructions of a partial generalized loop module: through
/// `V = U(L) ⊗_{U(K)} N` and directly from `N`.
pub struct PartialLoop<N: HeisenbergModule> {
    pub via_v: GeneralizedLoop<TensorModule<N, PhiVermaModule>>,
    pub direct: InducedModule<PartialData<N>>,
    pub phi: PhiFunction,
}

pub fn build_partial_loop<N: HeisenbergModule + Clone>(
    i_modes: BTreeSet<Label>,
    phi: &PhiFunction,
    n_inner: N,
    lambda: CartanWeight,
    trunc: Truncation,
) -> Result<PartialLoop<N>> {
    let kind = n_inner.kind().clone();
    if !kind.is_loop() {
        return invalid("the inner module must live over L");
    }
    if !crate::diagonal::is_diagonal(&n_inner)? {
        return Err(Error::NotDiagonal("the K_I-module is not diagonal".into()));
    }
    let verma =
        PhiVermaModule::with_excluded(kind, phi.clone(), n_inner.level().clone(), trunc.clone(), i_modes.clone())?;
    let v = TensorModule::new(n_inner.clone(), verma, i_modes.clone())?;
    let via_v = build_generalized_loop(lambda.clone(), v, trunc.clone())?;
    let data = PartialData::new(n_inner, i_modes, phi.clone(), trunc.clone())?;
    let direct = InducedModule::new(via_v.algebra().clone(), data, lambda, trunc)?;
    Ok(PartialLoop { via_v, direct, phi: phi.clone() })
}

impl<N: HeisenbergModule + Clone> PartialLoop<N> {
    /// Windowed weight dimensions of the two constructions.
    pub fn graded_dimensions(&self) -> (BTreeMap<Weight, usize>, BTreeMap<Weight, usize>) {
        (self.via_v.weight_dimensions(), self.direct.weight_dimensions())
    }

    /// Basis-level comparison including the action of generators with
    /// `|degree| <= gen_bound`.
    pub fn check_agreement(&self, gen_bound: i64) -> Result<usize> {
        let (a, b) = self.graded_dimensions();
        if a != b {
            return Err(Error::CheckFailed("the two constructions have different graded dimensions".into()));
        }
        let alg = self.direct.algebra();
        let kind = alg.heisenberg_kind();
        let map = |lb: &LoopBasis<TensorBasis<N::Basis, MultiIndex>>| {
            fold_into_word(alg, &kind, &self.phi, &lb.word, &lb.inner.right, lb.inner.left.clone())
        };
        check_isomorphic(&self.via_v, &self.direct, map, &alg.generators(gen_bound))
    }
}
