//! `phi`-Verma modules over `H`, `H_n` and `L`.
//!
//! The basis vector labelled by `k` is `prod_i y_i^{k_i} v`, where `y_i` is
//! the minus-side generator of mode `i` (for example `e_{-n}` when
//! `phi(n) = +` and `e_n` when `phi(n) = -`).

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::algebra::{factorial, int, multiindex_compare, pow, LinComb, Label, MultiIndex, Scalar, Truncation};
use crate::error::{invalid, Error, Result};
use crate::heisenberg::{HGen, HeisenbergKind, HeisenbergModule, ModePair};
use crate::phi::PhiFunction;

#[derive(Clone, Debug)]
pub struct PhiVermaModule {
    kind: HeisenbergKind,
    phi: PhiFunction,
    a: Scalar,
    trunc: Truncation,
    /// Modes that are not part of the algebra (used when building the
    /// Verma factor of a partial construction).
    excluded: BTreeSet<Label>,
}

impl PhiVermaModule {
    pub fn new(kind: HeisenbergKind, phi: PhiFunction, a: Scalar, trunc: Truncation) -> Result<Self> {
        Self::with_excluded(kind, phi, a, trunc, BTreeSet::new())
    }

    pub fn with_excluded(
        kind: HeisenbergKind,
        phi: PhiFunction,
        a: Scalar,
        trunc: Truncation,
        excluded: BTreeSet<Label>,
    ) -> Result<Self> {
        trunc.validate()?;
        let m = Self { kind, phi, a, trunc, excluded };
        // phi must be defined on every mode in the window.
        for mode in m.modes() {
            m.kind.mode_pair(&m.phi, mode)?;
        }
        Ok(m)
    }

    pub fn phi(&self) -> &PhiFunction {
        &self.phi
    }

    pub fn excluded(&self) -> &BTreeSet<Label> {
        &self.excluded
    }

    /// Modes inside the window, in ascending order.
    pub fn modes(&self) -> Vec<Label> {
        self.kind
            .modes(self.trunc.max_delta_degree)
            .into_iter()
            .filter(|m| !self.excluded.contains(m))
            .collect()
    }

    pub fn pair(&self, mode: Label) -> Result<ModePair> {
        if self.excluded.contains(&mode) {
            return invalid(format!("mode {mode} is not part of this algebra"));
        }
        self.kind.mode_pair(&self.phi, mode)
    }

    /// `plus / kappa`, normalised so that `[x, y] = c` with `y` the minus
    /// generator of the same mode.
    pub fn dual_raising(&self, mode: Label) -> Result<(HGen, Scalar)> {
        let p = self.pair(mode)?;
        Ok((p.plus, Scalar::one() / p.kappa))
    }

    /// Monomials whose modes lie in the window and obey the exponent caps.
    fn enumerate(&self, modes: &[Label], filter: &dyn Fn(&MultiIndex) -> bool) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = MultiIndex::new();
        fn rec(
            modes: &[Label],
            pos: usize,
            cur: &mut MultiIndex,
            left: i64,
            cap: i64,
            out: &mut Vec<MultiIndex>,
            filter: &dyn Fn(&MultiIndex) -> bool,
        ) {
            if pos == modes.len() {
                if filter(cur) {
                    out.push(cur.clone());
                }
                return;
            }
            for e in 0..=cap.min(left) {
                cur.set(modes[pos], e);
                rec(modes, pos + 1, cur, left - e, cap, out, filter);
            }
            cur.set(modes[pos], 0);
        }
        rec(modes, 0, &mut cur, self.trunc.max_total_degree, self.trunc.max_exponent, &mut out, filter);
        out.sort();
        out
    }

    /// Basis vectors of `Z`-degree `n` inside the window.
    pub fn basis_at_degree(&self, n: i64) -> Vec<MultiIndex> {
        // Only modes whose degree can contribute are enumerated.
        self.enumerate(&self.modes(), &|k| self.z_degree(k) == n)
    }

    pub fn graded_dimensions(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for b in self.basis() {
            *out.entry(self.z_degree(&b)).or_insert(0) += 1;
        }
        out
    }

    /// For `w != 0` and `a != 0`: the largest `m` in the support of `w` and
    /// the scalar `s` with `x(m) w = s v`, where `x(m)` applies the dual
    /// raising generators with exponents `m`.
    pub fn reduce_to_highest(&self, w: &LinComb<MultiIndex>) -> Result<(MultiIndex, Scalar)> {
        if w.is_zero() {
            return invalid("reduce_to_highest needs a nonzero vector");
        }
        if self.a.is_zero() {
            return Err(Error::LevelZero("reduction to the highest vector needs a != 0".into()));
        }
        let mut top = w.support().next().expect("nonzero").clone();
        for k in w.support() {
            if multiindex_compare(k, &top)? == std::cmp::Ordering::Greater {
                top = k.clone();
            }
        }
        let mut cur = w.clone();
        for (mode, e) in top.iter() {
            let (x, scale) = self.dual_raising(*mode)?;
            for _ in 0..*e {
                cur = self.act_unbounded(&x, &cur)?.scale(&scale);
            }
        }
        let v = LinComb::basis(MultiIndex::new());
        match cur.proportional_to(&v) {
            Some(c) if !c.is_zero() => Ok((top, c)),
            _ => Err(Error::CheckFailed(format!("x({top}) w = {cur} is not a nonzero multiple of v"))),
        }
    }

    /// `N = span{ y(k) v : k != 0 }` at level zero, after checking that every
    /// window action keeps it inside.
    pub fn proper_submodule_at_level_zero(&self) -> Result<Vec<MultiIndex>> {
        if !self.a.is_zero() {
            return invalid("the proper submodule exists only at level 0");
        }
        let n: Vec<MultiIndex> = self.basis().into_iter().filter(|k| !k.is_zero()).collect();
        for k in &n {
            for g in self.generators() {
                let img = self.act_basis(&g, k)?;
                if img.support().any(|b| b.is_zero()) {
                    return Err(Error::CheckFailed(format!("{g} sends {k} to v")));
                }
            }
        }
        Ok(n)
    }

    /// Generators (in the window) killing the highest vector.
    pub fn annihilator_of_highest(&self) -> Result<BTreeSet<HGen>> {
        let v = LinComb::basis(MultiIndex::new());
        let mut out = BTreeSet::new();
        for g in self.generators() {
            if self.act_unbounded(&g, &v)?.is_zero() {
                out.insert(g);
            }
        }
        Ok(out)
    }
}

impl HeisenbergModule for PhiVermaModule {
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
        self.enumerate(&self.modes(), &|_| true)
    }

    fn in_window(&self, k: &MultiIndex) -> bool {
        k.is_nonnegative()
            && self.trunc.admits_exponents(k)
            && k.support().all(|m| m.degree() <= self.trunc.max_delta_degree && !self.excluded.contains(m))
    }

    fn act_basis(&self, g: &HGen, k: &MultiIndex) -> Result<LinComb<MultiIndex>> {
        if *g == HGen::C {
            return Ok(LinComb::term(k.clone(), self.a.clone()));
        }
        self.kind.validate_gen(g)?;
        let mode = g.mode().expect("noncentral");
        let p = self.pair(mode)?;
        if *g == p.minus {
            Ok(LinComb::basis(k.shifted(mode, 1)))
        } else {
            let e = k.get(&mode);
            if e == 0 {
                return Ok(LinComb::zero());
            }
            Ok(LinComb::term(k.shifted(mode, -1), int(e) * &p.kappa * &self.a))
        }
    }

    fn z_infty_degree(&self, k: &MultiIndex) -> MultiIndex {
        MultiIndex::from_pairs(k.iter().map(|(m, e)| {
            let dir = self.pair(*m).map(|p| p.minus.degree().signum()).unwrap_or(-1);
            (*m, dir * e)
        }))
    }

    fn generators(&self) -> Vec<HGen> {
        self.kind
            .generators(self.trunc.max_delta_degree)
            .into_iter()
            .filter(|g| !self.excluded.contains(&g.mode().expect("noncentral")))
            .collect()
    }

    fn is_creation(&self, g: &HGen) -> bool {
        g.mode().and_then(|m| self.pair(m).ok()).is_some_and(|p| p.minus == *g)
    }
}

/// `xi * prod m_i! * a^{sum m_i}`: the expected reduction coefficient.
pub fn reduction_formula(m: &MultiIndex, xi: &Scalar, a: &Scalar) -> Scalar {
    let mut c = xi.clone();
    for (_, e) in m.iter() {
        c *= factorial(*e as u64);
    }
    c * pow(a, m.total() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ratio;
    use crate::phi::Sign;

    fn trunc(d: i64, e: i64, t: i64) -> Truncation {
        Truncation::new(d, e, 0, t).unwrap()
    }

    fn h_plus(a: Scalar) -> PhiVermaModule {
        PhiVermaModule::new(HeisenbergKind::Infinite, PhiFunction::constant(Sign::Plus), a, trunc(4, 4, 5)).unwrap()
    }

    #[test]
    fn partition_dims_small() {
        let m = h_plus(int(1));
        let dims = m.graded_dimensions();
        let got: Vec<usize> = (0..=4).map(|n| dims[&-n]).collect();
        assert_eq!(got, vec![1, 1, 2, 3, 5]);
    }

    #[test]
    fn act_examples() {
        let a = ratio(3, 2);
        let m = h_plus(a.clone());
        let v = LinComb::basis(MultiIndex::new());
        assert!(m.act(&HGen::E(2), &v).unwrap().is_zero());
        let w = LinComb::basis(MultiIndex::from_tuple(&[2]));
        let got = m.act(&HGen::E(1), &w).unwrap();
        assert_eq!(got, LinComb::term(MultiIndex::from_tuple(&[1]), int(2) * &a));

        let l = PhiVermaModule::new(
            HeisenbergKind::Loop("A1^(1)".parse().unwrap()),
            PhiFunction::constant(Sign::Plus),
            int(1),
            trunc(3, 3, 3),
        )
        .unwrap();
        let y = l.act(&HGen::X(-2, 1), &LinComb::basis(MultiIndex::new())).unwrap();
        assert_eq!(l.act(&HGen::X(2, 1), &y).unwrap(), LinComb::term(MultiIndex::new(), int(2)));
    }

    #[test]
    fn overflow_is_not_zero() {
        let m = h_plus(int(1));
        let w = LinComb::basis(MultiIndex::from_tuple(&[4]));
        assert!(matches!(m.act(&HGen::E(-1), &w), Err(Error::TruncationOverflow(_))));
        assert!(!m.act_unbounded(&HGen::E(-1), &w).unwrap().is_zero());
    }

    #[test]
    fn reduction_examples() {
        let m = h_plus(int(2));
        let v = LinComb::basis(MultiIndex::new());
        assert_eq!(m.reduce_to_highest(&v).unwrap(), (MultiIndex::new(), int(1)));
        let w = LinComb::basis(MultiIndex::from_tuple(&[2, 1]));
        assert_eq!(m.reduce_to_highest(&w).unwrap().1, int(16));

        let m1 = h_plus(int(1));
        let w = LinComb::from_terms([
            (MultiIndex::from_tuple(&[1]), int(3)),
            (MultiIndex::from_tuple(&[0, 1]), int(5)),
        ]);
        let (top, c) = m1.reduce_to_highest(&w).unwrap();
        assert_eq!(top, MultiIndex::from_tuple(&[1]));
        assert_eq!(c, int(3));
    }

    #[test]
    fn reduction_errors() {
        let m = h_plus(int(1));
        assert!(matches!(m.reduce_to_highest(&LinComb::zero()), Err(Error::InvalidArgument(_))));
        let z = h_plus(int(0));
        let v = LinComb::basis(MultiIndex::new());
        assert!(matches!(z.reduce_to_highest(&v), Err(Error::LevelZero(_))));
    }

    #[test]
    fn level_zero_submodule() {
        let z = h_plus(int(0));
        let n = z.proper_submodule_at_level_zero().unwrap();
        assert!(!n.contains(&MultiIndex::new()));
        let y1 = LinComb::basis(MultiIndex::from_tuple(&[1]));
        assert!(z.act(&HGen::E(1), &y1).unwrap().is_zero());
        assert!(h_plus(int(1)).proper_submodule_at_level_zero().is_err());
    }

    #[test]
    fn representation_and_grading() {
        let phi = PhiFunction::periodic(vec![Sign::Plus, Sign::Minus]).unwrap();
        let m = PhiVermaModule::new(HeisenbergKind::Infinite, phi, ratio(-2, 3), trunc(3, 2, 3)).unwrap();
        assert!(crate::heisenberg::check_representation(&m).unwrap() > 0);
        assert!(crate::heisenberg::check_grading(&m).unwrap() > 0);

        let l = PhiVermaModule::new(
            HeisenbergKind::Loop("A2^(1)".parse().unwrap()),
            PhiFunction::constant(Sign::Plus).with(Label::Pair(1, 2), Sign::Minus).unwrap(),
            int(3),
            trunc(2, 2, 3),
        )
        .unwrap();
        crate::heisenberg::check_representation(&l).unwrap();
        crate::heisenberg::check_grading(&l).unwrap();
    }

    #[test]
    fn distinct_phi_distinct_annihilators() {
        let t = trunc(3, 2, 2);
        let p1 = PhiFunction::constant(Sign::Plus);
        let p2 = PhiFunction::from_prefix(&[Sign::Plus, Sign::Minus], Sign::Plus);
        let m1 = PhiVermaModule::new(HeisenbergKind::Infinite, p1, int(1), t.clone()).unwrap();
        let m2 = PhiVermaModule::new(HeisenbergKind::Infinite, p2, int(1), t).unwrap();
        assert_ne!(m1.annihilator_of_highest().unwrap(), m2.annihilator_of_highest().unwrap());
    }

    #[test]
    fn mixed_phi_degree_zero_grows() {
        let phi = PhiFunction::from_prefix(&[Sign::Plus, Sign::Minus], Sign::Plus);
        let dim0 = |t: Truncation| {
            PhiVermaModule::new(HeisenbergKind::Infinite, phi.clone(), int(1), t).unwrap().basis_at_degree(0).len()
        };
        assert!(dim0(trunc(2, 2, 4)) < dim0(trunc(2, 4, 8)));
    }
}
