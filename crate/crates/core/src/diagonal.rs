//! Diagonal modules: the realizations `V_{K, theta, a}`, eigenvalue
//! ladders for `T_i = x_i x_{-i}`, `Z^infty`-gradings and the window-scale
//! predicates (torsion, local finiteness, diagonality, admissibility).

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{format_scalar, int, is_integer_multiple, rank_of, LinComb, Label, MultiIndex, Scalar, Truncation};
use crate::error::{invalid, Error, Result};
use crate::heisenberg::{check_grading, HGen, HeisenbergKind, HeisenbergModule};
use crate::phi::Sign;
use crate::weyl::{analyze_orbit, OrbitDescriptor, WeightPoint};

/// `(lambda - r a, lambda + (s - 1) a)`: the coefficients in
/// `e_{-j} e_j^r w = (lambda - r a) e_j^{r-1} w` and
/// `e_j e_{-j}^s w = (lambda + (s - 1) a) e_{-j}^{s-1} w`.
pub fn eigenvalue_ladder(a: &Scalar, lambda: &Scalar, r: i64, s: i64) -> Result<(Scalar, Scalar)> {
    if r < 1 || s < 1 {
        return invalid(format!("ladder exponents must be >= 1, got r = {r}, s = {s}"));
    }
    Ok((lambda - int(r) * a, lambda + int(s - 1) * a))
}

/// `kappa` with `[x_m, x_{-m}] = kappa c` for the raising generator of mode `m`.
pub fn mode_kappa(mode: Label) -> Scalar {
    match mode {
        Label::Int(_) => Scalar::one(),
        Label::Pair(k, _) => int(k),
    }
}

fn raise(mode: Label) -> HGen {
    HGen::from_mode(mode, 1)
}

fn lower(mode: Label) -> HGen {
    HGen::from_mode(mode, -1)
}

/// The module `U(L) / B_{K, theta, a}`.
///
/// Basis labels are signed exponents: `p > 0` stands for `x_m^p v`, `p < 0`
/// for `x_{-m}^{|p|} v`. Modes outside `K` only take `p >= 0`, since
/// `x_{-m} v = 0` there.
#[derive(Clone, Debug)]
pub struct DiagonalRealization {
    kind: HeisenbergKind,
    theta: BTreeMap<Label, Scalar>,
    a: Scalar,
    trunc: Truncation,
    y_choice: BTreeMap<Label, Sign>,
    only: Option<BTreeSet<Label>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RealizationDescriptor {
    #[serde(rename = "K")]
    pub k: Vec<String>,
    pub theta: BTreeMap<String, String>,
    pub a: String,
    pub y_choice: BTreeMap<String, Sign>,
}

impl DiagonalRealization {
    /// `theta` lists the modes of `K` with their eigenvalues. `y_choice`
    /// records which generator is designated as the creation direction for
    /// each mode in `K` (default: lowering).
    pub fn new(
        kind: HeisenbergKind,
        theta: BTreeMap<Label, Scalar>,
        a: Scalar,
        trunc: Truncation,
        y_choice: BTreeMap<Label, Sign>,
    ) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::LevelZero("V_{K, theta, a} needs a != 0".into()));
        }
        trunc.validate()?;
        for m in theta.keys().chain(y_choice.keys()) {
            kind.validate_gen(&raise(*m))?;
        }
        if let Some(m) = y_choice.keys().find(|m| !theta.contains_key(m)) {
            return invalid(format!("y_choice given for mode {m} outside K"));
        }
        Ok(Self { kind, theta, a, trunc, y_choice, only: None })
    }

    /// `K` given as degrees: every mode of each degree joins `K`, all with
    /// the same `theta`.
    pub fn from_degrees(kind: HeisenbergKind, theta: &BTreeMap<i64, Scalar>, a: Scalar, trunc: Truncation) -> Result<Self> {
        let mut t = BTreeMap::new();
        for (k, th) in theta {
            for m in kind.modes(*k).into_iter().filter(|m| m.degree() == *k) {
                t.insert(m, th.clone());
            }
        }
        Self::new(kind, t, a, trunc, BTreeMap::new())
    }

    /// The same module restricted to the subalgebra spanned by the given
    /// modes and `c`; `K` must lie inside them.
    pub fn restricted_to(mut self, modes: BTreeSet<Label>) -> Result<Self> {
        if let Some(m) = self.theta.keys().find(|m| !modes.contains(m)) {
            return invalid(format!("mode {m} of K lies outside the restriction"));
        }
        self.only = Some(modes);
        Ok(self)
    }

    pub fn k_set(&self) -> BTreeSet<Label> {
        self.theta.keys().copied().collect()
    }

    pub fn theta(&self, mode: Label) -> Option<&Scalar> {
        self.theta.get(&mode)
    }

    pub fn y_choice(&self, mode: Label) -> Sign {
        self.y_choice.get(&mode).copied().unwrap_or(Sign::Minus)
    }

    /// Designated creation generator of a mode: raising outside `K`,
    /// `y_choice` inside.
    pub fn designated_creation(&self, mode: Label) -> HGen {
        if self.theta.contains_key(&mode) && self.y_choice(mode) == Sign::Minus {
            lower(mode)
        } else {
            raise(mode)
        }
    }

    pub fn descriptor(&self) -> RealizationDescriptor {
        RealizationDescriptor {
            k: self.theta.keys().map(|m| m.to_string()).collect(),
            theta: self.theta.iter().map(|(m, t)| (m.to_string(), format_scalar(t))).collect(),
            a: format_scalar(&self.a),
            y_choice: self.theta.keys().map(|m| (m.to_string(), self.y_choice(*m))).collect(),
        }
    }

    fn modes(&self) -> Vec<Label> {
        let mut modes = self.kind.modes(self.trunc.max_delta_degree);
        if let Some(only) = &self.only {
            modes.retain(|m| only.contains(m));
        }
        modes
    }

    /// Irreducible iff no `theta_m` lies in `kappa_m a Z`.
    pub fn is_irreducible(&self) -> bool {
        self.theta.iter().all(|(m, t)| !is_integer_multiple(t, &(mode_kappa(*m) * &self.a)))
    }

    /// `T_m` eigenvalue on a basis vector: `theta_m - p kappa_m a`
    /// (`theta_m = 0` outside `K`).
    pub fn eigenvalue(&self, b: &MultiIndex, mode: Label) -> Scalar {
        let th = self.theta.get(&mode).cloned().unwrap_or_else(Scalar::zero);
        th - int(b.get(&mode)) * mode_kappa(mode) * &self.a
    }

    pub fn eigenvalues(&self, b: &MultiIndex) -> BTreeMap<Label, Scalar> {
        self.modes().into_iter().map(|m| (m, self.eigenvalue(b, m))).collect()
    }

    /// For `theta_m = r kappa a`: a basis vector and a generator killing it,
    /// spanning a proper submodule. `None` when `theta_m` is generic.
    pub fn singular_witness(&self, mode: Label) -> Option<(MultiIndex, HGen)> {
        let th = self.theta.get(&mode)?;
        let q = th / (mode_kappa(mode) * &self.a);
        if !q.is_integer() {
            return None;
        }
        let r: i64 = crate::algebra::scalar_to_i64(&q)?;
        if r >= 1 {
            Some((MultiIndex::new().shifted(mode, r), lower(mode)))
        } else {
            Some((MultiIndex::new().shifted(mode, r - 1), raise(mode)))
        }
    }

    /// Basis vectors and generators where a step toward the highest vector
    /// has coefficient zero.
    pub fn vanishing_ladder_steps(&self) -> Result<Vec<(MultiIndex, HGen)>> {
        let mut out = Vec::new();
        for b in self.basis() {
            for (m, p) in b.iter() {
                let g = if *p > 0 { lower(*m) } else { raise(*m) };
                if self.act_basis(&g, &b)?.is_zero() {
                    out.push((b.clone(), g));
                }
            }
        }
        Ok(out)
    }

    /// Projects `w` onto one basis vector with the Lagrange idempotents of
    /// the `T_m`, then walks it down to `v`. Returns the isolated basis
    /// vector and the final coefficient of `v`.
    pub fn isolate_and_reduce(&self, w: &LinComb<MultiIndex>) -> Result<(MultiIndex, Scalar)> {
        if w.is_zero() {
            return invalid("cannot reduce the zero vector");
        }
        let target = w.support().last().expect("nonzero").clone();
        let mut cur = w.clone();
        let modes: BTreeSet<Label> = w.support().flat_map(|b| b.support().copied().collect::<Vec<_>>()).collect();
        for m in modes {
            let lam = self.eigenvalue(&target, m);
            let others: BTreeSet<Scalar> =
                cur.support().map(|b| self.eigenvalue(b, m)).filter(|mu| *mu != lam).collect();
            for mu in others {
                let t = self.act_unbounded(&raise(m), &self.act_unbounded(&lower(m), &cur)?)?;
                cur = t.minus(&cur.scale(&mu)).scale(&(Scalar::one() / (&lam - &mu)));
            }
        }
        if cur.support().count() != 1 {
            return Err(Error::CheckFailed(format!("projection left {cur}")));
        }
        for (m, p) in target.iter() {
            let g = if *p > 0 { lower(*m) } else { raise(*m) };
            for _ in 0..p.abs() {
                cur = self.act_unbounded(&g, &cur)?;
            }
        }
        let v = LinComb::basis(MultiIndex::new());
        match cur.proportional_to(&v) {
            Some(c) if !c.is_zero() => Ok((target, c)),
            _ => Err(Error::CheckFailed(format!("reduction of {w} ended at {cur}"))),
        }
    }
}

impl HeisenbergModule for DiagonalRealization {
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
        let modes = self.modes();
        let mut out = Vec::new();
        fn rec(
            s: &DiagonalRealization,
            modes: &[Label],
            pos: usize,
            cur: &mut MultiIndex,
            left: i64,
            out: &mut Vec<MultiIndex>,
        ) {
            if pos == modes.len() {
                out.push(cur.clone());
                return;
            }
            let m = modes[pos];
            let cap = s.trunc.max_exponent.min(left);
            let lo = if s.theta.contains_key(&m) { -cap } else { 0 };
            for p in lo..=cap {
                cur.set(m, p);
                rec(s, modes, pos + 1, cur, left - p.abs(), out);
            }
            cur.set(m, 0);
        }
        rec(self, &modes, 0, &mut MultiIndex::new(), self.trunc.max_total_degree, &mut out);
        out.sort();
        out
    }

    fn in_window(&self, b: &MultiIndex) -> bool {
        self.trunc.admits_exponents(b)
            && b.iter().all(|(m, p)| {
                m.degree() <= self.trunc.max_delta_degree
                    && (*p > 0 || self.theta.contains_key(m))
                    && self.only.as_ref().is_none_or(|o| o.contains(m))
            })
    }

    fn act_basis(&self, g: &HGen, b: &MultiIndex) -> Result<LinComb<MultiIndex>> {
        if *g == HGen::C {
            return Ok(LinComb::term(b.clone(), self.a.clone()));
        }
        self.kind.validate_gen(g)?;
        let m = g.mode().expect("noncentral");
        if self.only.as_ref().is_some_and(|o| !o.contains(&m)) {
            return invalid(format!("{g} is outside the restricted algebra"));
        }
        let p = b.get(&m);
        let kappa_a = mode_kappa(m) * &self.a;
        let theta = self.theta.get(&m);
        let up = g.degree() > 0;
        let out = match (up, p) {
            (true, p) if p >= 0 => LinComb::basis(b.shifted(m, 1)),
            (false, p) if p > 0 => {
                let th = theta.cloned().unwrap_or_else(Scalar::zero);
                LinComb::term(b.shifted(m, -1), th - int(p) * &kappa_a)
            }
            (false, 0) => match theta {
                Some(_) => LinComb::basis(b.shifted(m, -1)),
                None => LinComb::zero(),
            },
            (false, _) => LinComb::basis(b.shifted(m, -1)),
            (true, p) => {
                let th = theta.expect("negative exponents only occur in K");
                LinComb::term(b.shifted(m, 1), th + int(-p - 1) * &kappa_a)
            }
        };
        Ok(out)
    }

    fn z_infty_degree(&self, b: &MultiIndex) -> MultiIndex {
        b.clone()
    }

    fn generators(&self) -> Vec<HGen> {
        let mut gens = self.kind.generators(self.trunc.max_delta_degree);
        if let Some(only) = &self.only {
            gens.retain(|g| g.mode().is_some_and(|m| only.contains(&m)));
        }
        gens
    }

    fn is_creation(&self, g: &HGen) -> bool {
        match g.mode() {
            None => false,
            Some(m) => g.degree() > 0 || self.theta.contains_key(&m),
        }
    }
}

/// `T_m = x_m x_{-m}` applied to `w`.
pub fn apply_t<M: HeisenbergModule>(m: &M, mode: Label, w: &LinComb<M::Basis>) -> Result<LinComb<M::Basis>> {
    m.act_unbounded(&raise(mode), &m.act_unbounded(&lower(mode), w)?)
}

/// Eigenvalue of `T_mode` on `w`, or `NotDiagonal`.
pub fn t_eigenvalue<M: HeisenbergModule>(m: &M, mode: Label, w: &LinComb<M::Basis>) -> Result<Scalar> {
    apply_t(m, mode, w)?
        .proportional_to(w)
        .ok_or_else(|| Error::NotDiagonal(format!("vector is not an eigenvector of T_{mode}")))
}

fn window_modes<M: HeisenbergModule>(m: &M) -> Vec<Label> {
    let mut modes: Vec<Label> = m.generators().iter().filter_map(|g| g.mode()).collect();
    modes.sort();
    modes.dedup();
    modes
}

/// Checks the `T_m` ladder on every basis vector of the window:
/// `T R^r w = (lambda - r kappa a) R^r w`, `T L^s w = (lambda + s kappa a) L^s w`
/// and the one-step recursions of [`eigenvalue_ladder`], for `r, s` up to
/// `max_exponent`.
pub fn check_eigen_ladder<M: HeisenbergModule>(m: &M) -> Result<usize> {
    let a = m.level().clone();
    let max = m.truncation().max_exponent;
    let mut count = 0;
    for b in m.basis() {
        let w = LinComb::basis(b.clone());
        for mode in window_modes(m) {
            let ka = mode_kappa(mode) * &a;
            let lam = t_eigenvalue(m, mode, &w)?;
            let mut up = w.clone();
            let mut down = w.clone();
            for r in 1..=max {
                let prev_up = up.clone();
                let prev_down = down.clone();
                up = m.act_unbounded(&raise(mode), &up)?;
                down = m.act_unbounded(&lower(mode), &down)?;
                let (c_up, c_down) = eigenvalue_ladder(&ka, &lam, r, r)?;
                if m.act_unbounded(&lower(mode), &up)? != prev_up.scale(&c_up) {
                    return Err(Error::CheckFailed(format!("x_-{mode} x_{mode}^{r} on {b}")));
                }
                if m.act_unbounded(&raise(mode), &down)? != prev_down.scale(&c_down) {
                    return Err(Error::CheckFailed(format!("x_{mode} x_-{mode}^{r} on {b}")));
                }
                if apply_t(m, mode, &up)? != up.scale(&(&lam - int(r) * &ka)) {
                    return Err(Error::CheckFailed(format!("T_{mode} on x_{mode}^{r} {b}")));
                }
                if apply_t(m, mode, &down)? != down.scale(&(&lam + int(r) * &ka)) {
                    return Err(Error::CheckFailed(format!("T_{mode} on x_-{mode}^{r} {b}")));
                }
                count += 4;
            }
        }
    }
    Ok(count)
}

/// `[T_i, T_j] = 0` on every basis vector of the window.
pub fn check_commuting_family<M: HeisenbergModule>(m: &M) -> Result<usize> {
    let modes = window_modes(m);
    let mut count = 0;
    for b in m.basis() {
        let w = LinComb::basis(b.clone());
        for &i in &modes {
            for &j in &modes {
                let ij = apply_t(m, i, &apply_t(m, j, &w)?)?;
                let ji = apply_t(m, j, &apply_t(m, i, &w)?)?;
                if ij != ji {
                    return Err(Error::CheckFailed(format!("T_{i} and T_{j} do not commute on {b}")));
                }
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Whether some basis vector of the window is a common eigenvector of all
/// `T_m` in the window.
pub fn is_diagonal<M: HeisenbergModule>(m: &M) -> Result<bool> {
    let modes = window_modes(m);
    for b in m.basis() {
        let w = LinComb::basis(b);
        let mut ok = true;
        for &mode in &modes {
            if apply_t(m, mode, &w)?.proportional_to(&w).is_none() {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Modes `m` for which some basis vector is a `T_m` eigenvector.
pub fn torsion_modes<M: HeisenbergModule>(m: &M) -> Result<BTreeSet<Label>> {
    let mut out = BTreeSet::new();
    for mode in window_modes(m) {
        for b in m.basis() {
            let w = LinComb::basis(b);
            if apply_t(m, mode, &w)?.proportional_to(&w).is_some() {
                out.insert(mode);
                break;
            }
        }
    }
    Ok(out)
}

/// Window proxy for local finiteness: for every basis vector `w` and mode,
/// `span{T^k w : k <= steps}` stops growing before `steps`.
pub fn is_locally_finite_in_window<M: HeisenbergModule>(m: &M, steps: usize) -> Result<bool> {
    for b in m.basis() {
        for mode in window_modes(m) {
            let mut orbit = vec![LinComb::basis(b.clone())];
            for _ in 0..steps {
                let next = apply_t(m, mode, orbit.last().expect("nonempty"))?;
                orbit.push(next);
            }
            if rank_of(&orbit) > steps {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZInftyGrading<B: Ord> {
    pub degree: BTreeMap<B, MultiIndex>,
}

/// The `Z^infty`-grading generated from a designated common eigenvector
/// (the highest vector of the module): every basis vector gets its signed
/// exponent vector. Verifies that the designated vector is a common
/// eigenvector, that components are at most one-dimensional, that distinct
/// components carry distinct `T`-eigenvalue tuples, and the shift law.
pub fn z_infty_grade<M: HeisenbergModule>(m: &M) -> Result<ZInftyGrading<M::Basis>> {
    if m.level().is_zero() {
        return Err(Error::LevelZero("the Z^infty grading needs a != 0".into()));
    }
    let modes = window_modes(m);
    let v = LinComb::basis(m.highest());
    for &mode in &modes {
        t_eigenvalue(m, mode, &v)?;
    }
    let mut degree = BTreeMap::new();
    let mut seen: BTreeMap<MultiIndex, M::Basis> = BTreeMap::new();
    let mut spectra: BTreeMap<Vec<Scalar>, MultiIndex> = BTreeMap::new();
    for b in m.basis() {
        let d = m.z_infty_degree(&b);
        if let Some(other) = seen.insert(d.clone(), b.clone()) {
            return Err(Error::CheckFailed(format!("{b} and {other} share the component {d}")));
        }
        let w = LinComb::basis(b.clone());
        let spec: Vec<Scalar> = modes.iter().map(|&mode| t_eigenvalue(m, mode, &w)).collect::<Result<_>>()?;
        if let Some(other) = spectra.insert(spec, d.clone()) {
            return Err(Error::CheckFailed(format!("components {d} and {other} have equal T-eigenvalues")));
        }
        degree.insert(b, d);
    }
    check_grading(m)?;
    Ok(ZInftyGrading { degree })
}

/// `F2`: the `Z`-degree `sum_j k_j j` of each component.
pub fn compress_grading_f2<B: Ord + Clone>(g: &ZInftyGrading<B>) -> BTreeMap<B, i64> {
    g.degree.iter().map(|(b, d)| (b.clone(), crate::algebra::z_degree(d))).collect()
}

/// `F1` for the designated generator `w` of `Z`-degree `n0`:
/// `y(k) w` gets degree `n0 zeta_1 + k`.
pub fn f1_grading<M: HeisenbergModule>(m: &M, n0: i64) -> BTreeMap<M::Basis, MultiIndex> {
    let first = m.generators().iter().filter_map(|g| g.mode()).min().unwrap_or(Label::Int(1));
    m.basis()
        .into_iter()
        .map(|b| {
            let d = m.z_infty_degree(&b).shifted(first, n0);
            (b, d)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    /// Distinct sets `s(w)` over window basis vectors.
    pub omega_size: usize,
    pub maximal_elements: Vec<Vec<i64>>,
    /// `true`: the check only sees the finite window.
    pub window_proxy: bool,
}

/// `s(w) = {j : e_j w = 0}` over window basis vectors, ordered by
/// inclusion. Every chain in a finite poset is bounded; the report also
/// requires each element of `Omega` to sit below a maximal element that is
/// itself realised by a vector of the window.
pub fn admissibility_check<M: HeisenbergModule>(m: &M) -> Result<AdmissibilityReport> {
    let mut omega: BTreeSet<Vec<i64>> = BTreeSet::new();
    for b in m.basis() {
        let w = LinComb::basis(b);
        let mut s = Vec::new();
        for g in m.generators() {
            if m.act_unbounded(&g, &w)?.is_zero() {
                s.push(g.degree());
            }
        }
        s.sort_unstable();
        omega.insert(s);
    }
    let subset = |x: &Vec<i64>, y: &Vec<i64>| x.iter().all(|e| y.binary_search(e).is_ok());
    let maximal: Vec<Vec<i64>> = omega
        .iter()
        .filter(|x| !omega.iter().any(|y| y != *x && subset(x, y)))
        .cloned()
        .collect();
    let admissible = omega.iter().all(|x| maximal.iter().any(|y| subset(x, y)));
    Ok(AdmissibilityReport { admissible, omega_size: omega.len(), maximal_elements: maximal, window_proxy: true })
}

/// A torsion-free module over `H_n`: `e_i v = mu_i v` for `i > 0` with all
/// `mu_i != 0`, basis `e_{-}^k v`. No `T_i` has an eigenvector.
#[derive(Clone, Debug)]
pub struct WhittakerModule {
    kind: HeisenbergKind,
    mu: BTreeMap<i64, Scalar>,
    a: Scalar,
    trunc: Truncation,
}

impl WhittakerModule {
    pub fn new(n: usize, mu: BTreeMap<i64, Scalar>, a: Scalar, trunc: Truncation) -> Result<Self> {
        for i in 1..=n as i64 {
            if mu.get(&i).is_none_or(|x| x.is_zero()) {
                return invalid(format!("mu_{i} must be nonzero"));
            }
        }
        Ok(Self { kind: HeisenbergKind::Finite(n), mu, a, trunc })
    }
}

impl HeisenbergModule for WhittakerModule {
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
        let phi = crate::phi::PhiFunction::constant(Sign::Plus);
        crate::phi_verma::PhiVermaModule::new(self.kind.clone(), phi, self.a.clone(), self.trunc.clone())
            .map(|m| m.basis())
            .unwrap_or_default()
    }

    fn in_window(&self, b: &MultiIndex) -> bool {
        b.is_nonnegative()
            && self.trunc.admits_exponents(b)
            && b.support().all(|m| m.degree() <= self.trunc.max_delta_degree)
    }

    fn act_basis(&self, g: &HGen, b: &MultiIndex) -> Result<LinComb<MultiIndex>> {
        if *g == HGen::C {
            return Ok(LinComb::term(b.clone(), self.a.clone()));
        }
        self.kind.validate_gen(g)?;
        let m = g.mode().expect("noncentral");
        if g.degree() < 0 {
            return Ok(LinComb::basis(b.shifted(m, 1)));
        }
        let mut out = LinComb::term(b.clone(), self.mu[&g.degree()].clone());
        let e = b.get(&m);
        if e > 0 {
            out.add_term(b.shifted(m, -1), int(e) * &self.a);
        }
        Ok(out)
    }

    fn z_infty_degree(&self, b: &MultiIndex) -> MultiIndex {
        MultiIndex::from_pairs(b.iter().map(|(m, e)| (*m, -e)))
    }

    fn generators(&self) -> Vec<HGen> {
        self.kind.generators(self.trunc.max_delta_degree)
    }

    fn is_creation(&self, _g: &HGen) -> bool {
        true
    }
}

/// For an irreducible realization over `H_n` (or `H`, window modes), the
/// Weyl-algebra picture: `x_j <-> e_j`, `d_j <-> e_{-j}` with unit `-a`,
/// so `t_j = e_{-j} e_j` acts on `b` by `theta_j - (p_j + 1) a`. Returns the
/// orbit and the point attached to each basis vector.
pub fn weyl_correspondence(
    r: &DiagonalRealization,
) -> Result<(OrbitDescriptor, BTreeMap<MultiIndex, WeightPoint>)> {
    let modes = r.modes();
    if modes.iter().any(|m| !matches!(m, Label::Int(_))) {
        return invalid("the Weyl correspondence is implemented for H-type realizations");
    }
    if !r.is_irreducible() {
        return invalid("the correspondence is for irreducible realizations");
    }
    let unit = -r.a.clone();
    let point = |b: &MultiIndex| -> Result<WeightPoint> {
        let coords = modes
            .iter()
            .map(|&m| r.eigenvalue(b, m) - &r.a)
            .collect();
        WeightPoint::finite(unit.clone(), coords)
    };
    let desc = analyze_orbit(&point(&MultiIndex::new())?);
    let mut map = BTreeMap::new();
    for b in r.basis() {
        map.insert(b.clone(), point(&b)?);
    }
    Ok((desc, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ratio;
    use crate::heisenberg::check_representation;
    use crate::phi::PhiFunction;
    use crate::phi_verma::PhiVermaModule;

    fn trunc(d: i64, e: i64, t: i64) -> Truncation {
        Truncation::new(d, e, 0, t).unwrap()
    }

    fn real(theta: &[(i64, Scalar)], a: Scalar, t: Truncation) -> DiagonalRealization {
        let th = theta.iter().map(|(k, x)| (Label::Int(*k), x.clone())).collect();
        DiagonalRealization::new(HeisenbergKind::Infinite, th, a, t, BTreeMap::new()).unwrap()
    }

    #[test]
    fn ladder_function() {
        assert_eq!(eigenvalue_ladder(&int(2), &int(3), 2, 1).unwrap().0, int(-1));
        assert!(eigenvalue_ladder(&int(1), &int(0), 0, 1).is_err());
        assert_eq!(eigenvalue_ladder(&int(1), &int(5), 1, 3).unwrap(), (int(4), int(7)));
    }

    #[test]
    fn realization_examples() {
        let l = HeisenbergKind::Loop("A1^(1)".parse().unwrap());
        let th = BTreeMap::from([(Label::Pair(1, 1), ratio(1, 2))]);
        let m = DiagonalRealization::new(l.clone(), th, int(1), trunc(2, 3, 4), BTreeMap::new()).unwrap();
        assert!(m.is_irreducible());
        let v = LinComb::basis(MultiIndex::new());
        let y = m.act(&HGen::X(-1, 1), &v).unwrap();
        assert_eq!(m.act(&HGen::X(1, 1), &y).unwrap(), v.scale(&ratio(1, 2)));
        let y2 = m.act(&HGen::X(-1, 1), &y).unwrap();
        assert_eq!(m.act(&HGen::X(1, 1), &y2).unwrap(), y.scale(&ratio(3, 2)));
        assert!(m.act(&HGen::X(-2, 1), &v).unwrap().is_zero());

        let th = BTreeMap::from([(Label::Pair(1, 1), int(2))]);
        let r = DiagonalRealization::new(l.clone(), th, int(1), trunc(2, 3, 4), BTreeMap::new()).unwrap();
        assert!(!r.is_irreducible());
        assert!(matches!(
            DiagonalRealization::new(l, BTreeMap::new(), int(0), trunc(1, 1, 1), BTreeMap::new()),
            Err(Error::LevelZero(_))
        ));
    }

    #[test]
    fn representation_and_ladders() {
        let m = real(&[(1, ratio(1, 3)), (3, ratio(-5, 2))], ratio(2, 3), trunc(3, 2, 4));
        check_representation(&m).unwrap();
        check_eigen_ladder(&m).unwrap();
        check_commuting_family(&m).unwrap();
        z_infty_grade(&m).unwrap();
        assert!(m.vanishing_ladder_steps().unwrap().is_empty());
        assert!(is_diagonal(&m).unwrap());
        assert!(is_locally_finite_in_window(&m, 3).unwrap());
    }

    #[test]
    fn singular_witnesses() {
        for r in -3i64..=3 {
            let a = ratio(3, 2);
            let m = real(&[(2, int(r) * &a)], a, trunc(2, 4, 5));
            let (b, g) = m.singular_witness(Label::Int(2)).unwrap();
            assert!(m.in_window(&b));
            assert!(m.act_basis(&g, &b).unwrap().is_zero(), "r = {r}");
            assert!(!m.vanishing_ladder_steps().unwrap().is_empty());
        }
    }

    #[test]
    fn empty_k_matches_constant_phi_verma() {
        let t = trunc(3, 3, 4);
        let m = real(&[], int(2), t.clone());
        let p = PhiVermaModule::new(HeisenbergKind::Infinite, PhiFunction::constant(Sign::Minus), int(2), t).unwrap();
        assert_eq!(m.basis(), p.basis());
        for b in m.basis() {
            assert_eq!(m.z_degree(&b), p.z_degree(&b));
        }
    }

    #[test]
    fn isolation() {
        let m = real(&[(1, ratio(1, 2))], int(1), trunc(2, 3, 4));
        let w = LinComb::from_terms([
            (MultiIndex::from_tuple(&[-2]), int(3)),
            (MultiIndex::from_tuple(&[1, 1]), int(-1)),
            (MultiIndex::from_tuple(&[0, 2]), int(7)),
        ]);
        let (_, c) = m.isolate_and_reduce(&w).unwrap();
        assert!(!c.is_zero());
    }

    #[test]
    fn whittaker_is_not_diagonal() {
        let w = WhittakerModule::new(2, BTreeMap::from([(1, int(1)), (2, int(3))]), int(1), trunc(2, 2, 3)).unwrap();
        check_representation(&w).unwrap();
        assert!(!is_diagonal(&w).unwrap());
        assert!(torsion_modes(&w).unwrap().is_empty());
        assert!(matches!(z_infty_grade(&w), Err(Error::NotDiagonal(_))));
        assert!(!is_locally_finite_in_window(&w, 2).unwrap());
    }

    #[test]
    fn f1_f2() {
        let p = PhiVermaModule::new(HeisenbergKind::Infinite, PhiFunction::constant(Sign::Plus), int(1), trunc(3, 2, 3))
            .unwrap();
        let g = z_infty_grade(&p).unwrap();
        for (b, n) in compress_grading_f2(&g) {
            assert_eq!(n, p.z_degree(&b));
        }
        let f1 = f1_grading(&p, 5);
        assert_eq!(f1[&MultiIndex::new()], MultiIndex::from_tuple(&[5]));
    }

    #[test]
    fn admissibility() {
        let p = PhiVermaModule::new(HeisenbergKind::Infinite, PhiFunction::constant(Sign::Plus), int(1), trunc(2, 2, 3))
            .unwrap();
        assert!(admissibility_check(&p).unwrap().admissible);
        let m = real(&[(1, ratio(1, 2))], int(1), trunc(2, 2, 3));
        assert!(admissibility_check(&m).unwrap().admissible);
    }

    #[test]
    fn weyl_picture() {
        let m = real(&[(1, ratio(1, 2))], int(1), trunc(2, 2, 3));
        let (desc, map) = weyl_correspondence(&m).unwrap();
        assert_eq!(desc.degenerate_coords, BTreeSet::from([2]));
        for (b, pt) in &map {
            for g in m.generators() {
                for (img, _) in m.act_basis(&g, b).unwrap().iter() {
                    if let Some(q) = map.get(img) {
                        let j = g.mode().unwrap().degree() as usize;
                        let e = if g.degree() > 0 { 1 } else { -1 };
                        assert_eq!(*q, pt.sigma_shift(j, e).unwrap());
                    }
                }
            }
        }
    }
}
