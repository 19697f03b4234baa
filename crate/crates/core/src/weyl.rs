//! Weight modules over the Weyl algebras `A_n` (and `A_infty`).
//!
//! A weight is a point `c = (c_i)` of `Max D`, `D = C[t_1, t_2, ...]`,
//! `t_i = d_i x_i`. The shift `sigma_i` moves `c_i` to `c_i + a`, which is
//! the direction in which `x_i` moves weights when `[d_i, x_i] = a`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{format_scalar, int, is_integer_multiple, parse_scalar, LinComb, Scalar};
use crate::error::{invalid, Error, Result};

/// A point of `Max D` with finitely many coordinates differing from a
/// default value. For finite `n` the default is `0` and only indices
/// `1..=n` exist.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawPoint", into = "RawPoint")]
pub struct WeightPoint {
    n: Option<usize>,
    a: Scalar,
    default: Scalar,
    coords: BTreeMap<usize, Scalar>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawPoint {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    a: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    default: Option<String>,
    coords: BTreeMap<usize, String>,
}

impl TryFrom<RawPoint> for WeightPoint {
    type Error = String;

    fn try_from(raw: RawPoint) -> std::result::Result<Self, String> {
        let parse = |s: &str| parse_scalar(s).map_err(|e| e.to_string());
        let coords = raw
            .coords
            .iter()
            .map(|(i, c)| Ok((*i, parse(c)?)))
            .collect::<std::result::Result<BTreeMap<_, _>, String>>()?;
        let default = match &raw.default {
            Some(d) => parse(d)?,
            None => Scalar::zero(),
        };
        WeightPoint::new(raw.n, parse(&raw.a)?, default, coords).map_err(|e| e.to_string())
    }
}

impl From<WeightPoint> for RawPoint {
    fn from(p: WeightPoint) -> Self {
        RawPoint {
            n: p.n,
            a: format_scalar(&p.a),
            default: if p.n.is_none() { Some(format_scalar(&p.default)) } else { None },
            coords: p.coords.iter().map(|(i, c)| (*i, format_scalar(c))).collect(),
        }
    }
}

impl fmt::Display for WeightPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.n {
            Some(n) => {
                let cs: Vec<String> = (1..=n).map(|i| format_scalar(&self.coord(i))).collect();
                write!(f, "({})", cs.join(", "))
            }
            None => {
                let cs: Vec<String> = self.coords.iter().map(|(i, c)| format!("{i}:{}", format_scalar(c))).collect();
                write!(f, "({}; else {})", cs.join(", "), format_scalar(&self.default))
            }
        }
    }
}

impl WeightPoint {
    pub fn new(n: Option<usize>, a: Scalar, default: Scalar, coords: BTreeMap<usize, Scalar>) -> Result<Self> {
        if a.is_zero() {
            return invalid("the shift unit a must be nonzero");
        }
        if n.is_some() && !default.is_zero() {
            return invalid("finite-rank points have no default coordinate");
        }
        let mut p = Self { n, a, default, coords: BTreeMap::new() };
        for (i, c) in coords {
            p.check_index(i)?;
            p.set(i, c);
        }
        Ok(p)
    }

    /// Point of `A_n` with the given coordinates.
    pub fn finite(a: Scalar, coords: Vec<Scalar>) -> Result<Self> {
        let n = coords.len();
        Self::new(Some(n), a, Scalar::zero(), coords.into_iter().enumerate().map(|(i, c)| (i + 1, c)).collect())
    }

    fn check_index(&self, i: usize) -> Result<()> {
        match self.n {
            _ if i == 0 => invalid("coordinates are indexed from 1"),
            Some(n) if i > n => invalid(format!("coordinate {i} out of range 1..={n}")),
            _ => Ok(()),
        }
    }

    fn set(&mut self, i: usize, c: Scalar) {
        if c == self.default {
            self.coords.remove(&i);
        } else {
            self.coords.insert(i, c);
        }
    }

    pub fn n(&self) -> Option<usize> {
        self.n
    }

    pub fn a(&self) -> &Scalar {
        &self.a
    }

    pub fn default_value(&self) -> &Scalar {
        &self.default
    }

    pub fn coord(&self, i: usize) -> Scalar {
        self.coords.get(&i).cloned().unwrap_or_else(|| self.default.clone())
    }

    pub fn listed(&self) -> impl Iterator<Item = &usize> {
        self.coords.keys()
    }

    pub fn with_coord(&self, i: usize, c: Scalar) -> Result<Self> {
        self.check_index(i)?;
        let mut p = self.clone();
        p.set(i, c);
        Ok(p)
    }

    /// `sigma_i^e`: `c_i -> c_i + e a`.
    pub fn sigma_shift(&self, i: usize, e: i64) -> Result<Self> {
        self.with_coord(i, self.coord(i) + int(e) * &self.a)
    }

    /// Coordinates `i` with `c_i = 0` among `indices`.
    pub fn breaks_in(&self, indices: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
        indices.into_iter().filter(|&i| self.coord(i).is_zero()).collect()
    }

    /// All breaks; fails if there are infinitely many.
    pub fn breaks(&self) -> Result<BTreeSet<usize>> {
        match self.n {
            Some(n) => Ok(self.breaks_in(1..=n)),
            None if self.default.is_zero() => invalid("every unlisted coordinate is a break"),
            None => Ok(self.breaks_in(self.coords.keys().copied())),
        }
    }

    fn degenerate_value(&self, c: &Scalar) -> bool {
        is_integer_multiple(c, &self.a)
    }

    /// `a * frac(c / a)`, the representative of `c + aZ` in `a[0, 1)`.
    fn reduce(&self, c: &Scalar) -> Scalar {
        let q = c / &self.a;
        let fl = q.numer().div_floor(q.denom());
        (q - Scalar::from_integer(fl)) * &self.a
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitDescriptor {
    pub representative: WeightPoint,
    /// Listed (or, for finite rank, all) coordinates with `c_i / a` integral.
    pub degenerate_coords: BTreeSet<usize>,
    /// For infinite rank: whether every unlisted coordinate is degenerate.
    pub default_degenerate: bool,
    pub maximal_break: Option<WeightPoint>,
}

impl OrbitDescriptor {
    pub fn is_degenerate(&self) -> bool {
        !self.degenerate_coords.is_empty() || self.default_degenerate
    }

    pub fn is_admissible(&self) -> bool {
        self.maximal_break.is_some()
    }

    pub fn is_degenerate_coord(&self, i: usize) -> bool {
        self.degenerate_coords.contains(&i) || (self.default_degenerate && !self.representative.coords.contains_key(&i))
    }

    /// Degenerate coordinates among the window's coordinates.
    pub fn degenerate_in(&self, window: &Window) -> Vec<usize> {
        window.coords.iter().copied().filter(|&i| self.is_degenerate_coord(i)).collect()
    }
}

pub fn analyze_orbit(pt: &WeightPoint) -> OrbitDescriptor {
    let indices: Vec<usize> = match pt.n {
        Some(n) => (1..=n).collect(),
        None => pt.coords.keys().copied().collect(),
    };
    let degenerate_coords: BTreeSet<usize> =
        indices.iter().copied().filter(|&i| pt.degenerate_value(&pt.coord(i))).collect();
    let default_degenerate = pt.n.is_none() && pt.degenerate_value(&pt.default);
    // Infinitely many coordinates at a nonzero multiple of a cannot all be
    // moved to 0 by finitely supported shifts.
    let maximal_break = if default_degenerate && !pt.default.is_zero() {
        None
    } else {
        let mut m = pt.clone();
        for &i in &indices {
            let c = pt.coord(i);
            let target = if degenerate_coords.contains(&i) {
                Scalar::zero()
            } else if pt.n.is_none() && pt.degenerate_value(&(&c - &pt.default)) {
                pt.default.clone()
            } else {
                pt.reduce(&c)
            };
            m.set(i, target);
        }
        Some(m)
    };
    OrbitDescriptor { representative: pt.clone(), degenerate_coords, default_degenerate, maximal_break }
}

/// Finite window onto an orbit: coordinates allowed to move, and how far.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub coords: Vec<usize>,
    pub radius: i64,
}

impl Window {
    pub fn new(coords: Vec<usize>, radius: i64) -> Result<Self> {
        if radius < 0 {
            return invalid("window radius must be nonnegative");
        }
        let mut coords = coords;
        coords.sort_unstable();
        coords.dedup();
        if coords.contains(&0) {
            return invalid("coordinates are indexed from 1");
        }
        Ok(Self { coords, radius })
    }

    pub fn first(n: usize, radius: i64) -> Self {
        Self { coords: (1..=n).collect(), radius }
    }
}

fn require_break(desc: &OrbitDescriptor) -> Result<&WeightPoint> {
    desc.maximal_break
        .as_ref()
        .ok_or_else(|| Error::NotAdmissible(format!("orbit of {} has no maximal break", desc.representative)))
}

/// `B_O`: the maximal break shifted once along any subset of the degenerate
/// window coordinates.
pub fn enumerate_b_o(desc: &OrbitDescriptor, window: &Window) -> Result<Vec<WeightPoint>> {
    let m = require_break(desc)?;
    let deg = desc.degenerate_in(window);
    let mut out = Vec::with_capacity(1 << deg.len());
    for mask in 0u64..(1u64 << deg.len()) {
        let mut p = m.clone();
        for (bit, &j) in deg.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                p = p.sigma_shift(j, 1)?;
            }
        }
        out.push(p);
    }
    Ok(out)
}

/// `delta_j` for each degenerate window coordinate, if `p` lies in `B_O`.
fn deltas_of(p: &WeightPoint, desc: &OrbitDescriptor, window: &Window) -> Result<BTreeMap<usize, bool>> {
    let m = require_break(desc)?;
    let deg = desc.degenerate_in(window);
    let mut deltas = BTreeMap::new();
    let mut expected = m.clone();
    for &j in &deg {
        let c = p.coord(j);
        let d = if c.is_zero() {
            false
        } else if c == *p.a() {
            true
        } else {
            return invalid(format!("{p} is not in B_O: coordinate {j} is neither 0 nor a"));
        };
        deltas.insert(j, d);
        expected = expected.with_coord(j, c)?;
    }
    if expected != *p {
        return invalid(format!("{p} is not in B_O"));
    }
    Ok(deltas)
}

/// The module `S(O, p)` (or `S(O)` for a nondegenerate orbit, `p` the
/// maximal break) restricted to a window.
#[derive(Clone, Debug)]
pub struct SopModule {
    pub orbit: OrbitDescriptor,
    pub p: WeightPoint,
    pub window: Window,
    deltas: BTreeMap<usize, bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WeylGen {
    X(usize),
    D(usize),
}

impl fmt::Display for WeylGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeylGen::X(i) => write!(f, "x_{i}"),
            WeylGen::D(i) => write!(f, "d_{i}"),
        }
    }
}

impl SopModule {
    pub fn new(orbit: &OrbitDescriptor, p: WeightPoint, window: &Window) -> Result<Self> {
        let deltas = deltas_of(&p, orbit, window)?;
        Ok(Self { orbit: orbit.clone(), p, window: window.clone(), deltas })
    }

    pub fn deltas(&self) -> &BTreeMap<usize, bool> {
        &self.deltas
    }

    /// Whether `q` lies in `O_p`, ignoring the window radius.
    pub fn in_support(&self, q: &WeightPoint) -> bool {
        let a = self.p.a();
        let mut idx: BTreeSet<usize> = self.window.coords.iter().copied().collect();
        idx.extend(q.listed().copied());
        idx.extend(self.p.listed().copied());
        idx.into_iter().all(|j| {
            let qj = q.coord(j);
            let pj = self.p.coord(j);
            if !self.window.coords.contains(&j) {
                return qj == pj;
            }
            match self.deltas.get(&j) {
                Some(false) => is_integer_multiple(&qj, a) && (&qj / a) <= Scalar::zero(),
                Some(true) => is_integer_multiple(&qj, a) && (&qj / a) >= Scalar::one(),
                None => is_integer_multiple(&(qj - pj), a),
            }
        })
    }

    /// Within the radius: degenerate coordinates at most `radius` steps
    /// from the cone tip, others at most `radius` steps from `p`.
    pub fn in_window(&self, q: &WeightPoint) -> bool {
        let r = int(self.window.radius);
        self.in_support(q)
            && self.window.coords.iter().all(|&j| {
                let steps = (q.coord(j) - self.p.coord(j)) / self.p.a();
                steps <= r && -steps <= r
            })
    }

    /// `O_p` inside the window.
    pub fn support(&self) -> Vec<WeightPoint> {
        let mut pts = vec![self.p.clone()];
        for &j in &self.window.coords {
            let steps: Vec<i64> = match self.deltas.get(&j) {
                Some(false) => (-self.window.radius..=0).collect(),
                Some(true) => (0..=self.window.radius).collect(),
                None => (-self.window.radius..=self.window.radius).collect(),
            };
            pts = pts
                .into_iter()
                .flat_map(|q| steps.iter().map(move |&s| q.sigma_shift(j, s).expect("window index")).collect::<Vec<_>>())
                .collect();
        }
        pts.sort();
        pts
    }

    /// Basis vector `1 + n` is labelled by the point `n`.
    pub fn act_unbounded(&self, g: WeylGen, q: &WeightPoint) -> Result<LinComb<WeightPoint>> {
        let (i, e) = match g {
            WeylGen::X(i) => (i, 1),
            WeylGen::D(i) => (i, -1),
        };
        if !self.window.coords.contains(&i) {
            return invalid(format!("{g} acts outside the window coordinates"));
        }
        let target = q.sigma_shift(i, e)?;
        if !self.in_support(&target) {
            return Ok(LinComb::zero());
        }
        let coeff = match g {
            WeylGen::X(_) => Scalar::one(),
            WeylGen::D(_) => target.coord(i),
        };
        Ok(LinComb::term(target, coeff))
    }

    pub fn act_weyl(&self, g: WeylGen, q: &WeightPoint) -> Result<LinComb<WeightPoint>> {
        let out = self.act_unbounded(g, q)?;
        if let Some(t) = out.support().find(|t| !self.in_window(t)) {
            return Err(Error::TruncationOverflow(format!("{g} sends {q} to {t}, outside the window")));
        }
        Ok(out)
    }

    pub fn generators(&self) -> Vec<WeylGen> {
        self.window.coords.iter().flat_map(|&i| [WeylGen::X(i), WeylGen::D(i)]).collect()
    }

    fn compose(&self, word: &[WeylGen], q: &WeightPoint) -> Result<LinComb<WeightPoint>> {
        let mut cur = LinComb::basis(q.clone());
        for g in word.iter().rev() {
            cur = cur.map_linear(|b| self.act_unbounded(*g, b))?;
        }
        Ok(cur)
    }

    /// `[d_i, x_j] = delta_ij a`, `[x_i, x_j] = [d_i, d_j] = 0`, `t_i` acting
    /// by the weight, on every basis vector of the window.
    pub fn check_relations(&self) -> Result<usize> {
        let gens = self.generators();
        let mut count = 0;
        for q in self.support() {
            let w = LinComb::basis(q.clone());
            for &g in &gens {
                for &h in &gens {
                    let lhs = self.compose(&[g, h], &q)?.minus(&self.compose(&[h, g], &q)?);
                    let expected = match (g, h) {
                        (WeylGen::D(i), WeylGen::X(j)) if i == j => w.scale(self.p.a()),
                        (WeylGen::X(i), WeylGen::D(j)) if i == j => w.scale(&-self.p.a()),
                        _ => LinComb::zero(),
                    };
                    if lhs != expected {
                        return Err(Error::CheckFailed(format!("[{g}, {h}] on {q}: got {lhs}, expected {expected}")));
                    }
                    count += 1;
                }
            }
            for &i in &self.window.coords {
                let t = self.compose(&[WeylGen::D(i), WeylGen::X(i)], &q)?;
                if t != w.scale(&q.coord(i)) {
                    return Err(Error::CheckFailed(format!("t_{i} does not act on {q} by its weight")));
                }
            }
        }
        Ok(count)
    }

    /// `x_i V_m ⊆ V_{sigma_i(m)}` and `d_i V_m ⊆ V_{sigma_i^{-1}(m)}`.
    pub fn check_weight_propagation(&self) -> Result<usize> {
        let mut count = 0;
        for q in self.support() {
            for &i in &self.window.coords {
                for (g, e) in [(WeylGen::X(i), 1), (WeylGen::D(i), -1)] {
                    let img = self.act_unbounded(g, &q)?;
                    let expected = q.sigma_shift(i, e)?;
                    for (t, _) in img.iter() {
                        for &j in &self.window.coords {
                            let tj = self.compose(&[WeylGen::D(j), WeylGen::X(j)], t)?;
                            if tj != LinComb::term(t.clone(), expected.coord(j)) {
                                return Err(Error::CheckFailed(format!("{g} on {q}: wrong weight")));
                            }
                        }
                        count += 1;
                    }
                }
            }
        }
        Ok(count)
    }

    /// Generators that kill a basis vector, as `(point, generator)` pairs.
    pub fn annihilations(&self) -> Result<Vec<(WeightPoint, WeylGen)>> {
        let mut out = Vec::new();
        for q in self.support() {
            for g in self.generators() {
                if self.act_unbounded(g, &q)?.is_zero() {
                    out.push((q.clone(), g));
                }
            }
        }
        Ok(out)
    }

    /// Every annihilation happens at a cone tip: `x_j` at `c_j = 0` when
    /// `delta_j = 0`, `d_j` at `c_j = a` when `delta_j = 1`, and the tips do
    /// annihilate.
    pub fn check_break_annihilation(&self) -> Result<usize> {
        let a = self.p.a().clone();
        let ann = self.annihilations()?;
        for (q, g) in &ann {
            let ok = match *g {
                WeylGen::X(j) => self.deltas.get(&j) == Some(&false) && q.coord(j).is_zero(),
                WeylGen::D(j) => self.deltas.get(&j) == Some(&true) && q.coord(j) == a,
            };
            if !ok {
                return Err(Error::CheckFailed(format!("{g} kills {q} away from a cone tip")));
            }
        }
        for q in self.support() {
            for (&j, &d) in &self.deltas {
                let tip = if d { q.coord(j) == a } else { q.coord(j).is_zero() };
                let g = if d { WeylGen::D(j) } else { WeylGen::X(j) };
                if tip && !ann.contains(&(q.clone(), g)) {
                    return Err(Error::CheckFailed(format!("{g} does not kill the tip {q}")));
                }
            }
        }
        Ok(ann.len())
    }

    /// Points reachable from `q` by nonzero generator steps that stay
    /// inside the window.
    pub fn reachable_from(&self, q: &WeightPoint) -> Result<BTreeSet<WeightPoint>> {
        let mut seen = BTreeSet::from([q.clone()]);
        let mut stack = vec![q.clone()];
        while let Some(cur) = stack.pop() {
            for g in self.generators() {
                for (t, _) in self.act_unbounded(g, &cur)?.iter() {
                    if self.in_window(t) && seen.insert(t.clone()) {
                        stack.push(t.clone());
                    }
                }
            }
        }
        Ok(seen)
    }

    /// Every basis vector generates the whole windowed support.
    pub fn check_irreducible_in_window(&self) -> Result<usize> {
        let support: BTreeSet<WeightPoint> = self.support().into_iter().collect();
        for q in &support {
            let r = self.reachable_from(q)?;
            if r != support {
                return Err(Error::CheckFailed(format!("{q} generates only {} of {} weights", r.len(), support.len())));
            }
        }
        Ok(support.len())
    }
}

/// The irreducible admissible weight modules with support in the orbit:
/// one `S(O)` for a nondegenerate orbit, else `S(O, p)` for `p` in `B_O`.
pub fn classify(desc: &OrbitDescriptor, window: &Window) -> Result<Vec<SopModule>> {
    enumerate_b_o(desc, window)?.into_iter().map(|p| SopModule::new(desc, p, window)).collect()
}

/// Pairs of classifier outputs whose windowed supports intersect.
pub fn overlapping_supports(mods: &[SopModule]) -> Vec<(usize, usize)> {
    let sets: Vec<BTreeSet<WeightPoint>> = mods.iter().map(|m| m.support().into_iter().collect()).collect();
    let mut out = Vec::new();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            if !sets[i].is_disjoint(&sets[j]) {
                out.push((i, j));
            }
        }
    }
    out
}
