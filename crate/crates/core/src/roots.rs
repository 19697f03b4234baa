//! Affine root data: real roots by twist, imaginary multiplicities, and
//! partitions `S` of the root system into "positive" and "negative" halves.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{int, ratio, scalar_serde, scalar_vec_serde, Scalar, Truncation};
use crate::cartan::FiniteType;
use crate::error::{invalid, Result};
use crate::phi::PhiFunction;

/// An affine type `X_N^(r)` in Kac's labelling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AffineType {
    pub label: FiniteType,
    pub twist: u8,
}

impl fmt::Display for AffineType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^({})", self.label, self.twist)
    }
}

impl std::str::FromStr for AffineType {
    type Err = crate::error::Error;

    /// Accepts `A1^(1)`, `A_1^{(1)}`, `D4^(3)` and similar spellings.
    fn from_str(s: &str) -> Result<Self> {
        let cleaned: String = s.chars().filter(|c| !"_{}() ".contains(*c)).collect();
        let Some((head, twist)) = cleaned.split_once('^') else {
            return invalid(format!("affine type needs a twist, e.g. A1^(1): {s:?}"));
        };
        let twist: u8 = twist.parse().map_err(|_| crate::error::Error::InvalidArgument(format!("bad twist in {s:?}")))?;
        AffineType::new(head.parse()?, twist)
    }
}

impl AffineType {
    pub fn new(label: FiniteType, twist: u8) -> Result<Self> {
        let t = Self { label, twist };
        t.validate()?;
        Ok(t)
    }

    pub fn untwisted(label: FiniteType) -> Self {
        Self { label, twist: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        use FiniteType::*;
        let ok = match (self.label, self.twist) {
            (C(1), _) => false,
            (l, 1) => l.validate().is_ok(),
            (A(n), 2) => n >= 2,
            (D(n), 2) => n >= 3,
            (E(6), 2) => true,
            (D(4), 3) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            invalid(format!("no affine algebra of type {self}"))
        }
    }

    pub fn is_a2l2(&self) -> bool {
        matches!(self.label, FiniteType::A(n) if self.twist == 2 && n % 2 == 0)
    }

    /// The finite root system underlying the real roots.
    pub fn finite_type(&self) -> FiniteType {
        use FiniteType::*;
        match (self.label, self.twist) {
            (l, 1) => l,
            (A(n), 2) if n % 2 == 0 => C(n / 2),
            (A(n), 2) => C((n + 1) / 2),
            (D(n), 2) => B(n - 1),
            (E(6), 2) => F4,
            (D(4), 3) => G2,
            (l, _) => l,
        }
    }

    pub fn finite_rank(&self) -> usize {
        self.finite_type().rank()
    }

    /// `d_k = dim g_{k delta}`.
    pub fn imaginary_multiplicity(&self, k: i64) -> Result<usize> {
        if k == 0 {
            return invalid("imaginary multiplicity is undefined at k = 0");
        }
        let l = self.finite_rank();
        let r = self.twist as i64;
        if r == 1 || self.is_a2l2() || k % r == 0 {
            Ok(l)
        } else {
            Ok((self.label.rank() - l) / (self.twist as usize - 1))
        }
    }

    /// All real roots (both signs of the finite part) with `|delta| <= bound`.
    pub fn real_roots(&self, bound: i64) -> Vec<Root> {
        let ft = self.finite_type();
        let b = int(bound);
        let mut out = BTreeSet::new();
        let r = self.twist as i64;
        for alpha in ft.positive_roots() {
            let long = ft.is_long(&alpha);
            let step = match (self.twist, long) {
                (1, _) | (_, false) => 1,
                _ if self.is_a2l2() => 2,
                _ => r,
            };
            for sign in [1i64, -1] {
                let fin: Vec<Scalar> = alpha.iter().map(|&c| int(sign * c)).collect();
                for n in -bound..=bound {
                    if n % step == 0 {
                        out.insert(Root::new(fin.clone(), int(n)));
                    }
                }
                if self.is_a2l2() && long {
                    let half: Vec<Scalar> = alpha.iter().map(|&c| ratio(sign * c, 2)).collect();
                    for m in -2 * bound..=2 * bound {
                        let d = ratio(m, 2);
                        if m % 2 != 0 && d.abs() <= b {
                            out.insert(Root::new(half.clone(), d));
                        }
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    /// Real roots `alpha + n delta` with `alpha` positive in the finite
    /// system (for half roots, `alpha` the positive long root).
    pub fn positive_real_roots(&self, trunc: &Truncation) -> Vec<Root> {
        self.real_roots(trunc.max_delta_degree)
            .into_iter()
            .filter(|r| r.finite_is_positive())
            .collect()
    }

    /// Every root with `|delta| <= bound`, imaginary ones included once each.
    pub fn roots(&self, bound: i64) -> BTreeSet<Root> {
        let mut out: BTreeSet<Root> = self.real_roots(bound).into_iter().collect();
        for n in -bound..=bound {
            if n != 0 {
                out.insert(Root::imaginary(self.finite_rank(), n));
            }
        }
        out
    }

    /// The partition `Delta_+`: real roots with positive `delta`, or zero
    /// `delta` and positive finite part, plus `n delta` for `n > 0`.
    pub fn standard_positive(&self, bound: i64) -> RootPartition {
        let plus = self
            .roots(bound)
            .into_iter()
            .filter(|r| r.delta.is_positive() || (r.delta.is_zero() && r.finite_is_positive()))
            .collect();
        RootPartition::new(*self, bound, plus)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Root {
    #[serde(rename = "finite_part", with = "scalar_vec_serde")]
    pub finite: Vec<Scalar>,
    #[serde(with = "scalar_serde")]
    pub delta: Scalar,
}

impl Root {
    pub fn new(finite: Vec<Scalar>, delta: Scalar) -> Self {
        Self { finite, delta }
    }

    pub fn imaginary(rank: usize, n: i64) -> Self {
        Self::new(vec![Scalar::zero(); rank], int(n))
    }

    pub fn from_ints(finite: &[i64], delta: i64) -> Self {
        Self::new(finite.iter().map(|&c| int(c)).collect(), int(delta))
    }

    pub fn is_imaginary(&self) -> bool {
        self.finite.iter().all(Zero::is_zero) && !self.delta.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.finite.iter().all(Zero::is_zero) && self.delta.is_zero()
    }

    /// First nonzero finite coefficient is positive.
    pub fn finite_is_positive(&self) -> bool {
        self.finite.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_positive())
    }

    pub fn height(&self) -> Scalar {
        self.finite.iter().fold(Scalar::zero(), |acc, c| acc + c)
    }

    pub fn add(&self, other: &Root) -> Root {
        Root::new(
            self.finite.iter().zip(&other.finite).map(|(a, b)| a + b).collect(),
            &self.delta + &other.delta,
        )
    }

    pub fn neg(&self) -> Root {
        Root::new(self.finite.iter().map(|c| -c).collect(), -&self.delta)
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fin: Vec<String> = self.finite.iter().map(crate::algebra::format_scalar).collect();
        write!(f, "({}; {})", fin.join(","), crate::algebra::format_scalar(&self.delta))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootPartition {
    pub ty: AffineType,
    /// Roots are enumerated with `|delta| <= window`.
    pub window: i64,
    pub plus: BTreeSet<Root>,
    pub minus: BTreeSet<Root>,
}

impl RootPartition {
    pub fn new(ty: AffineType, window: i64, plus: BTreeSet<Root>) -> Self {
        let minus = plus.iter().map(Root::neg).collect();
        Self { ty, window, plus, minus }
    }

    /// `S ∩ (-S) = ∅` and `S ∪ (-S)` is every root in the window.
    pub fn check_partition(&self) -> Result<()> {
        if let Some(r) = self.plus.iter().find(|r| self.minus.contains(r)) {
            return Err(crate::error::Error::CheckFailed(format!("{r} lies in both S and -S")));
        }
        for r in self.ty.roots(self.window) {
            if !self.plus.contains(&r) && !self.minus.contains(&r) {
                return Err(crate::error::Error::CheckFailed(format!("{r} lies in neither S nor -S")));
            }
        }
        for r in self.plus.iter() {
            if r.delta.abs() > int(self.window) {
                return invalid(format!("{r} lies outside the window"));
            }
        }
        Ok(())
    }

    /// Swaps `r` from `S` to `-S`.
    pub fn swapped(&self, r: &Root) -> Self {
        let mut plus = self.plus.clone();
        if plus.remove(r) {
            plus.insert(r.neg());
        }
        Self::new(self.ty, self.window, plus)
    }
}

/// Which sums count when testing closedness.
///
/// `RootSum` is the literal condition on the root set. `Subalgebra` ignores
/// sums of two imaginary roots: their root spaces bracket into the centre,
/// so `H ⊕ g_S` is a subalgebra whenever the remaining sums stay in `S`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Closure {
    RootSum,
    Subalgebra,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureReport {
    pub closed: bool,
    pub pairs_checked: usize,
    pub witness: Option<(Root, Root)>,
}

pub fn is_closed_partition(p: &RootPartition, trunc: &Truncation, mode: Closure) -> ClosureReport {
    let bound = trunc.max_delta_degree.min(p.window);
    let b = int(bound);
    let all = p.ty.roots(2 * bound);
    let inside: Vec<&Root> = p.plus.iter().filter(|r| r.delta.abs() <= b).collect();
    let mut pairs_checked = 0;
    for (i, x) in inside.iter().enumerate() {
        for y in &inside[i..] {
            if mode == Closure::Subalgebra && x.is_imaginary() && y.is_imaginary() {
                continue;
            }
            let s = x.add(y);
            if s.delta.abs() > b || !all.contains(&s) {
                continue;
            }
            pairs_checked += 1;
            if !p.plus.contains(&s) {
                return ClosureReport {
                    closed: false,
                    pairs_checked,
                    witness: Some(((*x).clone(), (*y).clone())),
                };
            }
        }
    }
    ClosureReport { closed: true, pairs_checked, witness: None }
}

/// `S_phi`: positive real roots together with `n delta` for `phi(n) = +`
/// and `-m delta` for `phi(m) = -`.
pub fn build_s_phi(ty: &AffineType, phi: &PhiFunction, trunc: &Truncation) -> Result<RootPartition> {
    let mut plus: BTreeSet<Root> = ty.positive_real_roots(trunc).into_iter().collect();
    for n in 1..=trunc.max_delta_degree {
        let sign = if phi.at(n)?.is_plus() { 1 } else { -1 };
        plus.insert(Root::imaginary(ty.finite_rank(), sign * n));
    }
    Ok(RootPartition::new(*ty, trunc.max_delta_degree, plus))
}

/// Nonnegative integer combinations `beta` of simple roots with
/// `ht(beta) <= max_height`, the window onto `Q_+`.
pub fn q_plus_window(rank: usize, max_height: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![0i64; rank]];
    let mut frontier = vec![vec![0i64; rank]];
    for _ in 0..max_height {
        let mut next = BTreeSet::new();
        for v in &frontier {
            for i in 0..rank {
                let mut w = v.clone();
                w[i] += 1;
                next.insert(w);
            }
        }
        frontier = next.into_iter().collect();
        out.extend(frontier.iter().cloned());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phi::Sign;
    use num_traits::One;

    fn one_half() -> Scalar {
        Scalar::one() / int(2)
    }

    fn ty(s: &str) -> AffineType {
        s.parse().unwrap()
    }

    fn trunc(n: i64) -> Truncation {
        Truncation::new(n, 3, 3, 6).unwrap()
    }

    #[test]
    fn a1_counts() {
        let a1 = ty("A1^(1)");
        assert_eq!(a1.positive_real_roots(&trunc(1)).len(), 3);
        for n in 1..=6 {
            assert_eq!(a1.positive_real_roots(&trunc(n)).len() as i64, 2 * n + 1);
        }
    }

    #[test]
    fn untwisted_counts_scale_with_finite_roots() {
        for s in ["A2^(1)", "B3^(1)", "C2^(1)", "D4^(1)", "G2^(1)", "F4^(1)", "E6^(1)"] {
            let t = ty(s);
            let fin = t.finite_type().positive_roots().len() as i64;
            for n in 0..=2 {
                let tr = Truncation { max_delta_degree: n, ..trunc(1) };
                assert_eq!(t.positive_real_roots(&tr).len() as i64, fin * (2 * n + 1), "{s}");
            }
        }
    }

    #[test]
    fn a22_has_half_roots() {
        let t = ty("A2^(2)");
        assert!(t.is_a2l2());
        let roots = t.positive_real_roots(&trunc(1));
        let half = Root::new(vec![one_half()], one_half());
        assert!(roots.contains(&half));
        // alpha + 2n delta only for even delta coefficients.
        assert!(!roots.contains(&Root::from_ints(&[1], 1)));
        assert!(roots.contains(&Root::from_ints(&[1], 0)));
    }

    #[test]
    fn twisted_long_roots_step_by_r() {
        let t = ty("D4^(3)");
        assert_eq!(t.finite_type(), FiniteType::G2);
        let ft = t.finite_type();
        let roots = t.positive_real_roots(&trunc(3));
        for r in &roots {
            let coeffs: Vec<i64> = r.finite.iter().map(|c| c.to_integer().try_into().unwrap()).collect();
            if ft.is_long(&coeffs) {
                assert_eq!(r.delta.to_integer() % num_bigint::BigInt::from(3), 0.into());
            }
        }
        // 3 short roots x 7 values + 3 long roots x 3 values.
        assert_eq!(roots.len(), 3 * 7 + 3 * 3);
    }

    #[test]
    fn multiplicities() {
        assert_eq!(ty("A1^(1)").imaginary_multiplicity(5).unwrap(), 1);
        assert_eq!(ty("A2^(1)").imaginary_multiplicity(-3).unwrap(), 2);
        assert!(ty("A1^(1)").imaginary_multiplicity(0).is_err());
        let d43 = ty("D4^(3)");
        assert_eq!(d43.imaginary_multiplicity(3).unwrap(), 2);
        assert_eq!(d43.imaginary_multiplicity(1).unwrap(), 1);
        let a52 = ty("A5^(2)");
        assert_eq!(a52.imaginary_multiplicity(2).unwrap(), 3);
        assert_eq!(a52.imaginary_multiplicity(1).unwrap(), 2);
        assert_eq!(ty("E6^(2)").imaginary_multiplicity(1).unwrap(), 2);
        assert_eq!(ty("D5^(2)").imaginary_multiplicity(3).unwrap(), 1);
        assert_eq!(ty("A4^(2)").imaginary_multiplicity(3).unwrap(), 2);
    }

    #[test]
    fn rejects_bad_types() {
        assert!("E7^(2)".parse::<AffineType>().is_err());
        assert!("A1^(2)".parse::<AffineType>().is_err());
        assert!("D5^(3)".parse::<AffineType>().is_err());
        assert!("A1".parse::<AffineType>().is_err());
        assert_eq!("A_1^{(1)}".parse::<AffineType>().unwrap(), ty("A1^(1)"));
    }

    #[test]
    fn standard_partition_is_closed_and_swap_is_not() {
        let a1 = ty("A1^(1)");
        let p = a1.standard_positive(4);
        p.check_partition().unwrap();
        assert!(is_closed_partition(&p, &trunc(4), Closure::RootSum).closed);
        let bad = p.swapped(&Root::from_ints(&[1], 1));
        bad.check_partition().unwrap();
        let rep = is_closed_partition(&bad, &trunc(4), Closure::RootSum);
        assert!(!rep.closed);
        let (x, y) = rep.witness.unwrap();
        assert!(!bad.plus.contains(&x.add(&y)));
    }

    #[test]
    fn s_phi_shapes() {
        let a1 = ty("A1^(1)");
        let plus = build_s_phi(&a1, &PhiFunction::constant(Sign::Plus), &trunc(3)).unwrap();
        let natural: BTreeSet<Root> = a1
            .roots(3)
            .into_iter()
            .filter(|r| r.finite_is_positive() || (r.is_imaginary() && r.delta.is_positive()))
            .collect();
        assert_eq!(plus.plus, natural);

        let phi = PhiFunction::from_prefix(&[Sign::Minus], Sign::Plus);
        let s = build_s_phi(&a1, &phi, &trunc(3)).unwrap();
        s.check_partition().unwrap();
        assert!(s.plus.contains(&Root::imaginary(1, -1)));
        assert!(!s.plus.contains(&Root::imaginary(1, 1)));
    }

    #[test]
    fn mixed_s_phi_fails_literal_closure_only_on_imaginary_pairs() {
        let a1 = ty("A1^(1)");
        let phi = PhiFunction::from_prefix(&[Sign::Minus], Sign::Plus);
        let s = build_s_phi(&a1, &phi, &trunc(4)).unwrap();
        let lit = is_closed_partition(&s, &trunc(4), Closure::RootSum);
        assert!(!lit.closed);
        let (x, y) = lit.witness.unwrap();
        assert!(x.is_imaginary() && y.is_imaginary());
        assert!(is_closed_partition(&s, &trunc(4), Closure::Subalgebra).closed);
    }

    #[test]
    fn q_plus_counts() {
        // Compositions into rank parts: C(h + r - 1, r - 1) per height.
        assert_eq!(q_plus_window(1, 3).len(), 4);
        assert_eq!(q_plus_window(2, 2).len(), 1 + 2 + 3);
    }
}
