//! Exact scalars, sparse multi-indices and formal linear combinations.
//!
//! Everything downstream is built on three value types:
//!
//! * [`Scalar`]: an arbitrary precision rational. Straightening produces
//!   factorials and powers of the level, so fixed-width integers are not an
//!   option.
//! * [`MultiIndex`]: a finitely supported map from [`Label`] to nonzero
//!   integers. Used both for exponent vectors of monomials and for
//!   `Z^infinity` degrees.
//! * [`LinComb`]: a finite formal sum of basis labels with nonzero scalar
//!   coefficients. Zero coefficients are dropped eagerly so that equality of
//!   module elements is structural.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

/// `p/q` as an exact rational. Panics if `q == 0`.
pub fn ratio(p: i64, q: i64) -> Scalar {
    Scalar::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p"`, `"-p"` or `"p/q"`. Floats are rejected.
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::InvalidArgument(format!("not a rational: {s:?}")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let q = parse_int(q)?;
            if q.is_zero() {
                return invalid(format!("zero denominator in {s:?}"));
            }
            Ok(Scalar::new(parse_int(p)?, q))
        }
        None => Ok(Scalar::from_integer(parse_int(s)?)),
    }
}

pub fn format_scalar(x: &Scalar) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Integer value of `x` when it is an integer that fits in `i64`.
pub fn scalar_to_i64(x: &Scalar) -> Option<i64> {
    if x.is_integer() {
        x.numer().to_i64()
    } else {
        None
    }
}

pub fn is_integer_multiple(x: &Scalar, unit: &Scalar) -> bool {
    !unit.is_zero() && (x / unit).is_integer()
}

pub fn factorial(n: u64) -> Scalar {
    (1..=n).fold(Scalar::one(), |acc, k| acc * int(k as i64))
}

/// Serde adapter: rationals cross serialization boundaries as strings.
pub mod scalar_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Scalar, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_scalar(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Scalar, D::Error> {
        let raw = String::deserialize(d)?;
        parse_scalar(&raw).map_err(serde::de::Error::custom)
    }
}

pub mod scalar_vec_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Scalar], s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = xs.iter().map(format_scalar).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Scalar>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_scalar(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Generator labels: either a plain integer `n` or a pair `(k, i)` for the
/// `i`-th basis vector of the `k`-th imaginary root space.
///
/// Ordering is derived: all `Int` labels precede all `Pair` labels, and pairs
/// compare by degree first and multiplicity index second.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Int(i64),
    Pair(i64, u32),
}

impl Label {
    /// The `delta`-degree carried by the label.
    pub fn degree(&self) -> i64 {
        match *self {
            Label::Int(n) => n,
            Label::Pair(k, _) => k,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Int(n) => write!(f, "{n}"),
            Label::Pair(k, i) => write!(f, "{k},{i}"),
        }
    }
}

impl std::str::FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let bad = || Error::InvalidArgument(format!("bad label {s:?}"));
        match s.split_once(',') {
            Some((k, i)) => Ok(Label::Pair(
                k.trim().parse().map_err(|_| bad())?,
                i.trim().parse().map_err(|_| bad())?,
            )),
            None => Ok(Label::Int(s.parse().map_err(|_| bad())?)),
        }
    }
}

impl Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// Finitely supported integer vector indexed by labels. No zero entries are
/// ever stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(BTreeMap<Label, i64>);

impl MultiIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unit(label: Label) -> Self {
        let mut m = Self::new();
        m.set(label, 1);
        m
    }

    /// Builds `(k_1, k_2, ...)` over integer labels `1, 2, ...`.
    pub fn from_tuple(entries: &[i64]) -> Self {
        let mut m = Self::new();
        for (pos, &k) in entries.iter().enumerate() {
            m.set(Label::Int(pos as i64 + 1), k);
        }
        m
    }

    pub fn from_pairs(entries: impl IntoIterator<Item = (Label, i64)>) -> Self {
        let mut m = Self::new();
        for (l, k) in entries {
            m.add_at(l, k);
        }
        m
    }

    pub fn get(&self, label: &Label) -> i64 {
        self.0.get(label).copied().unwrap_or(0)
    }

    pub fn set(&mut self, label: Label, value: i64) {
        if value == 0 {
            self.0.remove(&label);
        } else {
            self.0.insert(label, value);
        }
    }

    pub fn add_at(&mut self, label: Label, delta: i64) {
        let v = self.get(&label) + delta;
        self.set(label, v);
    }

    pub fn shifted(&self, label: Label, delta: i64) -> Self {
        let mut m = self.clone();
        m.add_at(label, delta);
        m
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, &i64)> {
        self.0.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Label> {
        self.0.keys()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of absolute values of the entries.
    pub fn total(&self) -> i64 {
        self.0.values().map(|v| v.abs()).sum()
    }

    pub fn max_abs_entry(&self) -> i64 {
        self.0.values().map(|v| v.abs()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut m = self.clone();
        for (l, k) in other.iter() {
            m.add_at(*l, *k);
        }
        m
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut m = self.clone();
        for (l, k) in other.iter() {
            m.add_at(*l, -*k);
        }
        m
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.values().all(|&v| v >= 0)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, (l, k)) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}:{k}")?;
        }
        write!(f, "}}")
    }
}

/// The order used to pick the "largest tuple": `k < l` iff for the first
/// label `s` (ascending) where they differ, `k_s < l_s`.
pub fn multiindex_compare(k: &MultiIndex, l: &MultiIndex) -> Result<Ordering> {
    if !k.is_nonnegative() || !l.is_nonnegative() {
        return invalid("multiindex_compare requires nonnegative entries");
    }
    let mut labels: Vec<&Label> = k.support().chain(l.support()).collect();
    labels.sort();
    labels.dedup();
    for s in labels {
        match k.get(s).cmp(&l.get(s)) {
            Ordering::Equal => continue,
            other => return Ok(other),
        }
    }
    Ok(Ordering::Equal)
}

/// `sum_j k_j * j`, with pair labels `(k, i)` contributing their degree `k`.
pub fn z_degree(k: &MultiIndex) -> i64 {
    k.iter().map(|(l, e)| l.degree() * e).sum()
}

/// Finite formal linear combination with canonical (zero-free) storage.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinComb<B: Ord> {
    terms: BTreeMap<B, Scalar>,
}

impl<B: Ord> Default for LinComb<B> {
    fn default() -> Self {
        Self { terms: BTreeMap::new() }
    }
}

impl<B: Ord + Clone> LinComb<B> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(b: B) -> Self {
        Self::term(b, Scalar::one())
    }

    pub fn term(b: B, c: Scalar) -> Self {
        let mut out = Self::zero();
        out.add_term(b, c);
        out
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (B, Scalar)>) -> Self {
        let mut out = Self::zero();
        for (b, c) in terms {
            out.add_term(b, c);
        }
        out
    }

    pub fn add_term(&mut self, b: B, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(b) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (b, x) in &other.terms {
            self.add_term(b.clone(), x * c);
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (b, x) in &other.terms {
            self.add_term(b.clone(), x.clone());
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &-Scalar::one());
        out
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(b, x)| (b.clone(), x * c)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Scalar::one())
    }

    pub fn coeff(&self, b: &B) -> Scalar {
        self.terms.get(b).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&B, &Scalar)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &B> {
        self.terms.keys()
    }

    /// Applies a linear map given on basis elements.
    pub fn map_linear<C: Ord + Clone>(
        &self,
        mut f: impl FnMut(&B) -> Result<LinComb<C>>,
    ) -> Result<LinComb<C>> {
        let mut out = LinComb::zero();
        for (b, x) in &self.terms {
            out.add_scaled(&f(b)?, x);
        }
        Ok(out)
    }

    /// Relabels basis elements (the map must be injective for the result to
    /// be meaningful; collisions are summed).
    pub fn map_basis<C: Ord + Clone>(&self, mut f: impl FnMut(&B) -> C) -> LinComb<C> {
        LinComb::from_terms(self.terms.iter().map(|(b, x)| (f(b), x.clone())))
    }

    /// When `self = c * other` for a scalar `c` returns `Some(c)`.
    pub fn proportional_to(&self, other: &Self) -> Option<Scalar> {
        if other.is_zero() {
            return if self.is_zero() { Some(Scalar::zero()) } else { None };
        }
        let (b0, x0) = other.terms.iter().next()?;
        let c = self.coeff(b0) / x0;
        if *self == other.scale(&c) {
            Some(c)
        } else {
            None
        }
    }
}

impl<B: Ord + Clone + fmt::Display> fmt::Display for LinComb<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (b, x)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})*{}", format_scalar(x), b)?;
        }
        Ok(())
    }
}

/// Rank of a finite family of vectors, by exact elimination.
pub fn rank_of<B: Ord + Clone>(vectors: &[LinComb<B>]) -> usize {
    let mut pivots: Vec<(B, LinComb<B>)> = Vec::new();
    for v in vectors {
        let mut cur = v.clone();
        for (p, row) in &pivots {
            let c = cur.coeff(p);
            if !c.is_zero() {
                cur.add_scaled(row, &-c);
            }
        }
        let lead = cur.iter().next().map(|(b, x)| (b.clone(), x.clone()));
        if let Some((b, x)) = lead {
            let row = cur.scale(&(Scalar::one() / x));
            for (_, other) in pivots.iter_mut() {
                let c = other.coeff(&b);
                if !c.is_zero() {
                    other.add_scaled(&row, &-c);
                }
            }
            pivots.push((b, row));
        }
    }
    pivots.len()
}

/// Finite window onto the infinite-dimensional objects.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    /// Bound on `|n|` for `n*delta` components and generator degrees.
    pub max_delta_degree: i64,
    /// Per-generator exponent cap.
    pub max_exponent: i64,
    /// Cap on the height of the finite root part.
    pub max_real_height: i64,
    /// Cap on the sum of (absolute) exponents.
    pub max_total_degree: i64,
}

impl Truncation {
    pub fn new(
        max_delta_degree: i64,
        max_exponent: i64,
        max_real_height: i64,
        max_total_degree: i64,
    ) -> Result<Self> {
        let t = Self { max_delta_degree, max_exponent, max_real_height, max_total_degree };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_delta_degree < 1 || self.max_exponent < 1 || self.max_total_degree < 1 {
            return invalid(format!("truncation bounds must be >= 1: {self:?}"));
        }
        if self.max_real_height < 0 {
            return invalid("max_real_height must be >= 0");
        }
        Ok(())
    }

    /// Whether an exponent vector fits the exponent and total-degree caps.
    pub fn admits_exponents(&self, k: &MultiIndex) -> bool {
        k.max_abs_entry() <= self.max_exponent && k.total() <= self.max_total_degree
    }
}

pub(crate) fn pow(x: &Scalar, e: u64) -> Scalar {
    (0..e).fold(Scalar::one(), |acc, _| acc * x)
}


#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn compare_examples() {
        let a = MultiIndex::from_tuple(&[1, 0, 2]);
        assert_eq!(multiindex_compare(&a, &a).unwrap(), Ordering::Equal);
        let b = MultiIndex::from_tuple(&[1, 2]);
        let c = MultiIndex::from_tuple(&[1, 3]);
        assert_eq!(multiindex_compare(&b, &c).unwrap(), Ordering::Less);
        let d = MultiIndex::from_tuple(&[0, 5]);
        let e = MultiIndex::from_tuple(&[1, 0]);
        assert_eq!(multiindex_compare(&d, &e).unwrap(), Ordering::Less);
    }

    #[test]
    fn compare_rejects_negative_entries() {
        let a = MultiIndex::from_tuple(&[1, -1]);
        let b = MultiIndex::from_tuple(&[1]);
        assert!(matches!(multiindex_compare(&a, &b), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn z_degree_examples() {
        assert_eq!(z_degree(&MultiIndex::new()), 0);
        let k = MultiIndex::from_pairs([(Label::Int(1), 2), (Label::Int(3), 1)]);
        assert_eq!(z_degree(&k), 5);
        let k = MultiIndex::from_pairs([(Label::Int(1), 1), (Label::Int(2), -2)]);
        assert_eq!(z_degree(&k), -3);
    }

    #[test]
    fn no_zero_entries_stored() {
        let mut m = MultiIndex::unit(Label::Int(2));
        m.add_at(Label::Int(2), -1);
        assert!(m.is_zero());
        assert_eq!(m, MultiIndex::new());

        let mut lc = LinComb::basis(1u32);
        lc.add_term(1, -int(1));
        assert!(lc.is_zero());
        assert_eq!(lc, LinComb::zero());
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_scalar("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse_scalar("-4").unwrap(), int(-4));
        assert!(parse_scalar("1.5").is_err());
        assert!(parse_scalar("1/0").is_err());
        assert_eq!(format_scalar(&ratio(-2, 4)), "-1/2");
        assert_eq!(format_scalar(&int(7)), "7");
        assert_eq!("3,2".parse::<Label>().unwrap(), Label::Pair(3, 2));
        assert_eq!("(3, 2)".parse::<Label>().unwrap(), Label::Pair(3, 2));
        assert_eq!("-5".parse::<Label>().unwrap(), Label::Int(-5));
    }

    #[test]
    fn rank_examples() {
        let v = |xs: &[(u32, i64)]| LinComb::from_terms(xs.iter().map(|&(b, c)| (b, int(c))));
        assert_eq!(rank_of::<u32>(&[]), 0);
        assert_eq!(rank_of(&[v(&[(1, 1), (2, 1)]), v(&[(1, 2), (2, 2)])]), 1);
        assert_eq!(rank_of(&[v(&[(1, 1), (2, 1)]), v(&[(2, 1)]), v(&[(1, 1)])]), 2);
        assert_eq!(rank_of(&[v(&[(1, 1)]), v(&[(2, 1)]), v(&[(3, 1), (1, 5)])]), 3);
    }

    #[test]
    fn truncation_validation() {
        assert!(Truncation::new(1, 1, 0, 1).is_ok());
        assert!(Truncation::new(0, 1, 0, 1).is_err());
        assert!(Truncation::new(1, 1, -1, 1).is_err());
    }

    /// Exhaustive: strict total order on all tuples with entries <= 3 and
    /// length <= 4.
    #[test]
    fn compare_is_strict_total_order() {
        let mut all = Vec::new();
        for len in 0..=4usize {
            let mut cur = vec![0i64; len];
            loop {
                all.push(MultiIndex::from_tuple(&cur));
                let mut pos = 0;
                while pos < len && cur[pos] == 3 {
                    cur[pos] = 0;
                    pos += 1;
                }
                if pos == len {
                    break;
                }
                cur[pos] += 1;
            }
        }
        all.sort();
        all.dedup();
        let cmp = |a: &MultiIndex, b: &MultiIndex| multiindex_compare(a, b).unwrap();
        for a in &all {
            for b in &all {
                let ab = cmp(a, b);
                assert_eq!(ab, cmp(b, a).reverse());
                assert_eq!(ab == Ordering::Equal, a == b);
            }
        }
        // Transitivity via sorting consistency: a sorted list must be pairwise ordered.
        let mut sorted = all.clone();
        sorted.sort_by(cmp);
        for i in 0..sorted.len() {
            for j in i + 1..sorted.len() {
                assert_eq!(cmp(&sorted[i], &sorted[j]), Ordering::Less);
            }
        }
    }

    fn arb_scalar() -> impl Strategy<Value = Scalar> {
        (-1000i64..1000, 1i64..200).prop_map(|(p, q)| ratio(p, q))
    }

    fn arb_index() -> impl Strategy<Value = MultiIndex> {
        proptest::collection::btree_map(-6i64..=6, -4i64..=4, 0..5).prop_map(|m| {
            MultiIndex::from_pairs(m.into_iter().filter(|(l, _)| *l != 0).map(|(l, k)| (Label::Int(l), k)))
        })
    }

    proptest! {
        #[test]
        fn scalar_round_trips(x in arb_scalar(), y in arb_scalar()) {
            prop_assert_eq!(&(&x + &y) - &y, x.clone());
            if !y.is_zero() {
                prop_assert_eq!(&(&x * &y) / &y, x);
            }
        }

        #[test]
        fn z_degree_is_additive(k in arb_index(), l in arb_index()) {
            prop_assert_eq!(z_degree(&k.add(&l)), z_degree(&k) + z_degree(&l));
        }

        #[test]
        fn scalar_string_round_trip(x in arb_scalar()) {
            prop_assert_eq!(parse_scalar(&format_scalar(&x)).unwrap(), x);
        }
    }
}
