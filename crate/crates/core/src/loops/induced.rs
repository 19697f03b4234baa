//! The induced module engine: PBW straightening of `g * (u ⊗ b)`.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;

use crate::affine::{AffGen, LoopAlgebra};
use crate::algebra::{int, scalar_to_i64, LinComb, Truncation};
use crate::error::{invalid, Error, Result};
use crate::roots::q_plus_window;

use super::data::InductionData;
use super::pbw::{pbw_key, PbwMonomial};
use super::CartanWeight;

/// `u ⊗ b` with `u` an ordered monomial in the free generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LoopBasis<B> {
    pub word: PbwMonomial,
    pub inner: B,
}

impl<B: fmt::Display> fmt::Display for LoopBasis<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} ⊗ {}]", self.word, self.inner)
    }
}

/// Weight `lambda - beta + n delta`, stored as `(beta, n)` in simple-root
/// coordinates.
pub type Weight = (Vec<i64>, i64);

type Cache<B> = RefCell<BTreeMap<(AffGen, LoopBasis<B>), LinComb<LoopBasis<B>>>>;

pub struct InducedModule<D: InductionData> {
    alg: LoopAlgebra,
    data: D,
    lambda: CartanWeight,
    trunc: Truncation,
    cache: Cache<D::Inner>,
}

impl<D: InductionData> InducedModule<D> {
    pub fn new(alg: LoopAlgebra, data: D, lambda: CartanWeight, trunc: Truncation) -> Result<Self> {
        trunc.validate()?;
        lambda.check_rank(alg.rank())?;
        if lambda.c.is_zero() {
            return Err(Error::LevelZero("induced modules are built at nonzero level".into()));
        }
        if lambda.c != *data.level() {
            return invalid(format!(
                "lambda(c) = {} does not match the inner level {}",
                crate::algebra::format_scalar(&lambda.c),
                crate::algebra::format_scalar(data.level())
            ));
        }
        Ok(Self { alg, data, lambda, trunc, cache: RefCell::new(BTreeMap::new()) })
    }

    pub fn algebra(&self) -> &LoopAlgebra {
        &self.alg
    }

    pub fn data(&self) -> &D {
        &self.data
    }

    pub fn lambda(&self) -> &CartanWeight {
        &self.lambda
    }

    pub fn truncation(&self) -> &Truncation {
        &self.trunc
    }

    pub fn highest(&self, inner: D::Inner) -> LoopBasis<D::Inner> {
        LoopBasis { word: PbwMonomial::empty(), inner }
    }

    fn base_action(&self, g: &AffGen, b: &D::Inner) -> Result<LinComb<LoopBasis<D::Inner>>> {
        let wrap = |lc: LinComb<D::Inner>| lc.map_basis(|x| self.highest(x.clone()));
        let here = LoopBasis { word: PbwMonomial::empty(), inner: b.clone() };
        Ok(match *g {
            AffGen::C => LinComb::term(here, self.lambda.c.clone()),
            AffGen::D => LinComb::term(here, &self.lambda.d + int(self.data.inner_degree(b))),
            AffGen::Cartan(i) => LinComb::term(here, self.lambda.h[i as usize - 1].clone()),
            _ if self.data.is_free(g) => {
                LinComb::basis(LoopBasis { word: PbwMonomial(vec![(*g, 1)]), inner: b.clone() })
            }
            _ => wrap(self.data.act_inner(g, b)?),
        })
    }

    /// `g (u ⊗ b)` in PBW normal form. Exact and independent of the window.
    pub fn apply_basis(&self, g: &AffGen, lb: &LoopBasis<D::Inner>) -> Result<LinComb<LoopBasis<D::Inner>>> {
        self.alg.validate_gen(g)?;
        if *g == AffGen::C {
            return Ok(LinComb::term(lb.clone(), self.lambda.c.clone()));
        }
        let key = (*g, lb.clone());
        if let Some(v) = self.cache.borrow().get(&key) {
            return Ok(v.clone());
        }
        let out = self.apply_uncached(g, lb)?;
        self.cache.borrow_mut().insert(key, out.clone());
        Ok(out)
    }

    fn apply_uncached(&self, g: &AffGen, lb: &LoopBasis<D::Inner>) -> Result<LinComb<LoopBasis<D::Inner>>> {
        let Some(&(y, p)) = lb.word.0.first() else {
            return self.base_action(g, &lb.inner);
        };
        if self.data.is_free(g) {
            let (kg, ky) = (pbw_key(&self.alg, g), pbw_key(&self.alg, &y));
            if kg >= ky {
                let mut word = lb.word.clone();
                if kg == ky {
                    word.0[0].1 += 1;
                } else {
                    word.0.insert(0, (*g, 1));
                }
                return Ok(LinComb::basis(LoopBasis { word, inner: lb.inner.clone() }));
            }
        }
        // g y rest = y (g rest) + [g, y] rest
        let mut rest = lb.word.clone();
        if p == 1 {
            rest.0.remove(0);
        } else {
            rest.0[0].1 -= 1;
        }
        let rest = LoopBasis { word: rest, inner: lb.inner.clone() };
        let mut out = self.act(&y, &self.apply_basis(g, &rest)?)?;
        for (h, c) in self.alg.bracket_gen(g, &y)?.iter() {
            out.add_scaled(&self.apply_basis(h, &rest)?, c);
        }
        Ok(out)
    }

    pub fn act(&self, g: &AffGen, w: &LinComb<LoopBasis<D::Inner>>) -> Result<LinComb<LoopBasis<D::Inner>>> {
        w.map_linear(|b| self.apply_basis(g, b))
    }

    pub fn act_element(
        &self,
        x: &LinComb<AffGen>,
        w: &LinComb<LoopBasis<D::Inner>>,
    ) -> Result<LinComb<LoopBasis<D::Inner>>> {
        let mut out = LinComb::zero();
        for (g, c) in x.iter() {
            out.add_scaled(&self.act(g, w)?, c);
        }
        Ok(out)
    }

    /// Free real generators in the window: `|n| <= max_delta_degree`,
    /// `ht(beta) <= max_real_height`, in increasing PBW order.
    pub fn free_real_generators(&self) -> Vec<AffGen> {
        let mut gens: Vec<AffGen> = self
            .alg
            .generators(self.trunc.max_delta_degree)
            .into_iter()
            .filter(|g| g.is_real() && self.data.is_free(g))
            .filter(|g| self.height(g) <= self.trunc.max_real_height)
            .collect();
        gens.sort_by_key(|g| pbw_key(&self.alg, g));
        gens
    }

    fn height(&self, g: &AffGen) -> i64 {
        pbw_key(&self.alg, g).1
    }

    /// Real monomials with total height at most `max_real_height`.
    pub fn real_monomials(&self) -> Vec<PbwMonomial> {
        let gens = self.free_real_generators();
        let mut out = Vec::new();
        fn rec(
            m: &InducedModule<impl InductionData>,
            gens: &[AffGen],
            pos: usize,
            left: i64,
            cur: &mut Vec<(AffGen, u32)>,
            out: &mut Vec<PbwMonomial>,
        ) {
            if pos == gens.len() {
                let mut v = cur.clone();
                v.reverse();
                out.push(PbwMonomial(v));
                return;
            }
            let h = m.height(&gens[pos]);
            rec(m, gens, pos + 1, left, cur, out);
            let mut p = 1;
            while h * p as i64 <= left {
                cur.push((gens[pos], p));
                rec(m, gens, pos + 1, left - h * p as i64, cur, out);
                cur.pop();
                p += 1;
            }
        }
        rec(self, &gens, 0, self.trunc.max_real_height, &mut Vec::new(), &mut out);
        out
    }

    /// `beta` (sum over real factors) and the `delta`-degree of the word.
    pub fn word_weight(&self, word: &PbwMonomial) -> Weight {
        let mut beta = vec![0i64; self.alg.rank()];
        for (g, p) in word.factors() {
            if let Some(r) = self.alg.root_of(g) {
                for (b, c) in beta.iter_mut().zip(&r.finite) {
                    *b -= scalar_to_i64(c).expect("integral root") * *p as i64;
                }
            }
        }
        (beta, word.degree())
    }

    pub fn weight(&self, lb: &LoopBasis<D::Inner>) -> Weight {
        let (beta, n) = self.word_weight(&lb.word);
        (beta, n + self.data.inner_degree(&lb.inner))
    }

    pub fn in_window(&self, lb: &LoopBasis<D::Inner>) -> bool {
        let (beta, n) = self.weight(lb);
        n.abs() <= self.trunc.max_delta_degree
            && beta.iter().sum::<i64>() <= self.trunc.max_real_height
            && lb.word.real_part().factors().iter().all(|(g, _)| g.degree().abs() <= self.trunc.max_delta_degree)
    }

    /// Window basis: real monomials times inner parts, weight
    /// `|n| <= max_delta_degree`.
    pub fn basis(&self) -> Vec<LoopBasis<D::Inner>> {
        let parts = self.data.inner_parts(&self.alg);
        let mut out = Vec::new();
        for u in self.real_monomials() {
            for (imag, b) in &parts {
                let mut word = u.clone();
                word.0.extend(imag.0.iter().cloned());
                let lb = LoopBasis { word, inner: b.clone() };
                if self.weight(&lb).1.abs() <= self.trunc.max_delta_degree {
                    out.push(lb);
                }
            }
        }
        out.sort();
        out
    }

    pub fn weight_dimensions(&self) -> BTreeMap<Weight, usize> {
        let mut out = BTreeMap::new();
        for b in self.basis() {
            *out.entry(self.weight(&b)).or_insert(0) += 1;
        }
        out
    }

    /// The same table as a convolution: real monomials at `(beta, n1)` times
    /// inner parts at `n2`, summed over `n1 + n2 = n`.
    pub fn convolution_dimensions(&self) -> BTreeMap<Weight, usize> {
        let mut real: BTreeMap<Weight, usize> = BTreeMap::new();
        for u in self.real_monomials() {
            *real.entry(self.word_weight(&u)).or_insert(0) += 1;
        }
        let mut inner: BTreeMap<i64, usize> = BTreeMap::new();
        for (w, b) in self.data.inner_parts(&self.alg) {
            *inner.entry(w.degree() + self.data.inner_degree(&b)).or_insert(0) += 1;
        }
        let mut out = BTreeMap::new();
        for ((beta, n1), x) in &real {
            for (n2, y) in &inner {
                let n = n1 + n2;
                if n.abs() <= self.trunc.max_delta_degree {
                    *out.entry((beta.clone(), n)).or_insert(0) += x * y;
                }
            }
        }
        out
    }

    pub fn support(&self) -> BTreeSet<Weight> {
        self.weight_dimensions().into_keys().collect()
    }

    /// `{lambda - beta + n delta : beta in Q_+, ht(beta) <= max_real_height,
    /// |n| <= max_delta_degree}`.
    pub fn expected_support(&self) -> BTreeSet<Weight> {
        let mut out = BTreeSet::new();
        for beta in q_plus_window(self.alg.rank(), self.trunc.max_real_height) {
            for n in -self.trunc.max_delta_degree..=self.trunc.max_delta_degree {
                out.insert((beta.clone(), n));
            }
        }
        out
    }

    /// Basis vectors of a given weight.
    pub fn weight_space(&self, weight: &Weight) -> Vec<LoopBasis<D::Inner>> {
        self.basis().into_iter().filter(|b| self.weight(b) == *weight).collect()
    }

    pub fn in_strip(&self, lb: &LoopBasis<D::Inner>) -> bool {
        !lb.word.has_real()
    }

    /// Basis vectors of weight `lambda + k delta`.
    pub fn strip_basis(&self) -> Vec<LoopBasis<D::Inner>> {
        self.basis().into_iter().filter(|b| self.in_strip(b)).collect()
    }

    /// Every basis vector equals its word applied factor by factor to
    /// `1 ⊗ b`, and labels are distinct; returns the number checked.
    pub fn check_freeness(&self) -> Result<usize> {
        let basis = self.basis();
        let distinct: BTreeSet<&LoopBasis<D::Inner>> = basis.iter().collect();
        if distinct.len() != basis.len() {
            return Err(Error::CheckFailed("repeated basis label".into()));
        }
        let expected: usize = self.convolution_dimensions().values().sum();
        if expected != basis.len() {
            return Err(Error::CheckFailed(format!(
                "basis has {} vectors, the product count gives {expected}",
                basis.len()
            )));
        }
        for lb in &basis {
            let mut w = LinComb::basis(self.highest(lb.inner.clone()));
            for g in lb.word.acting_sequence() {
                w = self.act(&g, &w)?;
            }
            if w != LinComb::basis(lb.clone()) {
                return Err(Error::CheckFailed(format!("{lb} is not its own word applied to the inner vector: {w}")));
            }
        }
        Ok(basis.len())
    }

    /// `g (h w) - h (g w) = [g, h] w` for the given generators on the given
    /// vectors.
    pub fn check_representation_on(&self, gens: &[AffGen], vectors: &[LoopBasis<D::Inner>]) -> Result<usize> {
        let mut count = 0;
        for lb in vectors {
            let w = LinComb::basis(lb.clone());
            let acted: Vec<LinComb<LoopBasis<D::Inner>>> =
                gens.iter().map(|g| self.act(g, &w)).collect::<Result<_>>()?;
            for (x, g) in gens.iter().enumerate() {
                for (y, h) in gens.iter().enumerate() {
                    let lhs = self.act(g, &acted[y])?.minus(&self.act(h, &acted[x])?);
                    let rhs = self.act_element(&self.alg.bracket_gen(g, h)?, &w)?;
                    if lhs != rhs {
                        return Err(Error::CheckFailed(format!("[{g}, {h}] on {lb}: {lhs} vs {rhs}")));
                    }
                    count += 1;
                }
            }
        }
        Ok(count)
    }

    /// Every generator moves weights by its root; `d` and the Cartan part
    /// act by the weight.
    pub fn check_weights_on(&self, gens: &[AffGen], vectors: &[LoopBasis<D::Inner>]) -> Result<usize> {
        let cartan = self.alg.affine_type().finite_type().cartan_matrix();
        let mut count = 0;
        for lb in vectors {
            let (beta, n) = self.weight(lb);
            let w = LinComb::basis(lb.clone());
            let d = self.act(&AffGen::D, &w)?;
            if d != w.scale(&(&self.lambda.d + int(n))) {
                return Err(Error::CheckFailed(format!("d does not act by the weight on {lb}")));
            }
            for i in 1..=self.alg.rank() {
                let shift: i64 = (0..self.alg.rank()).map(|j| beta[j] * cartan[j][i - 1]).sum();
                let h = self.act(&AffGen::Cartan(i as u32), &w)?;
                if h != w.scale(&(&self.lambda.h[i - 1] - int(shift))) {
                    return Err(Error::CheckFailed(format!("h_{i} does not act by the weight on {lb}")));
                }
            }
            for g in gens {
                let Some(r) = self.alg.root_of(g) else { continue };
                for (img, _) in self.act(g, &w)?.iter() {
                    let (b2, n2) = self.weight(img);
                    let moved: Vec<i64> =
                        beta.iter().zip(&r.finite).map(|(b, c)| b - scalar_to_i64(c).expect("integral")).collect();
                    if b2 != moved || n2 != n + g.degree() {
                        return Err(Error::CheckFailed(format!("{g} on {lb} lands at the wrong weight: {img}")));
                    }
                }
                count += 1;
            }
        }
        Ok(count)
    }

    /// The strip is closed under `L`.
    pub fn check_strip_closure(&self, bound: i64) -> Result<usize> {
        let mut count = 0;
        for lb in self.strip_basis() {
            for g in self.alg.generators(bound).iter().filter(|g| matches!(g, AffGen::Imag { .. })) {
                for (img, _) in self.act(g, &LinComb::basis(lb.clone()))?.iter() {
                    if !self.in_strip(img) {
                        return Err(Error::CheckFailed(format!("{g} sends {lb} out of the strip")));
                    }
                }
                count += 1;
            }
        }
        Ok(count)
    }

    /// Terms of `w` grouped by weight.
    pub fn homogeneous_components(
        &self,
        w: &LinComb<LoopBasis<D::Inner>>,
    ) -> BTreeMap<Weight, LinComb<LoopBasis<D::Inner>>> {
        let mut out: BTreeMap<Weight, LinComb<LoopBasis<D::Inner>>> = BTreeMap::new();
        for (b, c) in w.iter() {
            out.entry(self.weight(b)).or_insert_with(LinComb::zero).add_term(b.clone(), c.clone());
        }
        out
    }

    pub fn cache_size(&self) -> usize {
        self.cache.borrow().len()
    }
}

/// Checks that `map` is a bijection between window bases that intertwines
/// the action of the given generators. Returns the number of basis vectors.
pub fn check_isomorphic<A: InductionData, B: InductionData>(
    m1: &InducedModule<A>,
    m2: &InducedModule<B>,
    map: impl Fn(&LoopBasis<A::Inner>) -> LoopBasis<B::Inner>,
    gens: &[AffGen],
) -> Result<usize> {
    let b1 = m1.basis();
    let image: BTreeSet<LoopBasis<B::Inner>> = b1.iter().map(&map).collect();
    let b2: BTreeSet<LoopBasis<B::Inner>> = m2.basis().into_iter().collect();
    if image.len() != b1.len() || image != b2 {
        return Err(Error::CheckFailed(format!(
            "bases do not correspond: {} vectors map onto {} of {}",
            b1.len(),
            image.len(),
            b2.len()
        )));
    }
    for lb in &b1 {
        for g in gens {
            let lhs = m1.apply_basis(g, lb)?.map_basis(&map);
            let rhs = m2.apply_basis(g, &map(lb))?;
            if lhs != rhs {
                return Err(Error::CheckFailed(format!("{g} on {lb}: {lhs} vs {rhs}")));
            }
        }
    }
    Ok(b1.len())
}
