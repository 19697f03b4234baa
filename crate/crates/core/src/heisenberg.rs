//! Heisenberg algebras `H_n`, `H` and the imaginary-root algebra `L` of an
//! affine type, plus the module interface shared by every module over them.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;

use crate::algebra::{int, LinComb, Label, MultiIndex, Scalar, Truncation};
use crate::error::{invalid, Error, Result};
use crate::phi::{PhiFunction, Sign};
use crate::roots::AffineType;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum HeisenbergKind {
    /// `H_n`: generators `e_i`, `1 <= |i| <= n`.
    Finite(usize),
    /// `H`: generators `e_i` for all nonzero `i`.
    Infinite,
    /// `L`: generators `x_{k,i}`, `i <= d_|k|`.
    Loop(AffineType),
}

impl fmt::Display for HeisenbergKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeisenbergKind::Finite(n) => write!(f, "H_{n}"),
            HeisenbergKind::Infinite => write!(f, "H"),
            HeisenbergKind::Loop(t) => write!(f, "L({t})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HGen {
    C,
    E(i64),
    X(i64, u32),
}

impl fmt::Display for HGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HGen::C => write!(f, "c"),
            HGen::E(i) => write!(f, "e({i})"),
            HGen::X(k, i) => write!(f, "x({k},{i})"),
        }
    }
}

impl std::str::FromStr for HGen {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("bad generator {s:?}"));
        if s == "c" {
            return Ok(HGen::C);
        }
        let inner = |p: &str| s.strip_prefix(p).and_then(|r| r.strip_suffix(')'));
        if let Some(i) = inner("e(") {
            return Ok(HGen::E(i.trim().parse().map_err(|_| bad())?));
        }
        if let Some(body) = inner("x(") {
            let (k, i) = body.split_once(',').ok_or_else(bad)?;
            return Ok(HGen::X(k.trim().parse().map_err(|_| bad())?, i.trim().parse().map_err(|_| bad())?));
        }
        Err(bad())
    }
}

impl HGen {
    /// `delta`-degree of the generator (`0` for `c`).
    pub fn degree(&self) -> i64 {
        match *self {
            HGen::C => 0,
            HGen::E(i) => i,
            HGen::X(k, _) => k,
        }
    }

    /// The mode label `|i|` or `(|k|, i)` shared by a generator and its
    /// partner of opposite degree.
    pub fn mode(&self) -> Option<Label> {
        match *self {
            HGen::C => None,
            HGen::E(i) => Some(Label::Int(i.abs())),
            HGen::X(k, i) => Some(Label::Pair(k.abs(), i)),
        }
    }

    /// Generator of the given mode and direction (`+1` raises degree).
    pub fn from_mode(mode: Label, direction: i64) -> HGen {
        match mode {
            Label::Int(n) => HGen::E(direction.signum() * n),
            Label::Pair(k, i) => HGen::X(direction.signum() * k, i),
        }
    }

    pub fn partner(&self) -> HGen {
        match *self {
            HGen::C => HGen::C,
            HGen::E(i) => HGen::E(-i),
            HGen::X(k, i) => HGen::X(-k, i),
        }
    }
}

impl HeisenbergKind {
    pub fn is_loop(&self) -> bool {
        matches!(self, HeisenbergKind::Loop(_))
    }

    pub fn validate_gen(&self, g: &HGen) -> Result<()> {
        let ok = match (self, *g) {
            (_, HGen::C) => true,
            (HeisenbergKind::Finite(n), HGen::E(i)) => i != 0 && i.unsigned_abs() as usize <= *n,
            (HeisenbergKind::Infinite, HGen::E(i)) => i != 0,
            (HeisenbergKind::Loop(t), HGen::X(k, i)) => {
                k != 0 && i >= 1 && (i as usize) <= t.imaginary_multiplicity(k)?
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            invalid(format!("generator {g} does not belong to {self}"))
        }
    }

    /// Mode labels with degree in `1..=bound`.
    pub fn modes(&self, bound: i64) -> Vec<Label> {
        match self {
            HeisenbergKind::Finite(n) => (1..=bound.min(*n as i64)).map(Label::Int).collect(),
            HeisenbergKind::Infinite => (1..=bound).map(Label::Int).collect(),
            HeisenbergKind::Loop(t) => (1..=bound)
                .flat_map(|k| {
                    let d = t.imaginary_multiplicity(k).unwrap_or(0) as u32;
                    (1..=d).map(move |i| Label::Pair(k, i))
                })
                .collect(),
        }
    }

    /// Noncentral generators with `|degree| <= bound`.
    pub fn generators(&self, bound: i64) -> Vec<HGen> {
        let mut out = Vec::new();
        for m in self.modes(bound) {
            out.push(HGen::from_mode(m, -1));
            out.push(HGen::from_mode(m, 1));
        }
        out.sort();
        out
    }

    /// `[u, v]` for generators, as a multiple of `c`.
    pub fn bracket_gen(&self, u: &HGen, v: &HGen) -> Result<Scalar> {
        self.validate_gen(u)?;
        self.validate_gen(v)?;
        Ok(match (*u, *v) {
            (HGen::E(i), HGen::E(j)) if i == -j => int(i.signum()),
            (HGen::X(k, i), HGen::X(l, j)) if k == -l && i == j => int(k),
            _ => Scalar::zero(),
        })
    }

    /// Bilinear bracket of two elements.
    pub fn bracket(&self, u: &LinComb<HGen>, v: &LinComb<HGen>) -> Result<LinComb<HGen>> {
        let mut out = LinComb::zero();
        for (g, x) in u.iter() {
            for (h, y) in v.iter() {
                let c = self.bracket_gen(g, h)?;
                out.add_term(HGen::C, c * x * y);
            }
        }
        Ok(out)
    }

    /// The plus-side generator of a mode under `phi`, its minus-side partner,
    /// and `kappa` with `[plus, minus] = kappa c`.
    pub fn mode_pair(&self, phi: &PhiFunction, mode: Label) -> Result<ModePair> {
        let sign = phi.eval(mode)?;
        let up = HGen::from_mode(mode, 1);
        let (plus, minus) = match sign {
            Sign::Plus => (up, up.partner()),
            Sign::Minus => (up.partner(), up),
        };
        let kappa = self.bracket_gen(&plus, &minus)?;
        Ok(ModePair { mode, plus, minus, kappa })
    }

    /// `(L_phi^-, L_phi^+)` restricted to `|degree| <= bound`.
    pub fn phi_triangular_split(&self, phi: &PhiFunction, bound: i64) -> Result<(Vec<HGen>, Vec<HGen>)> {
        let mut minus = Vec::new();
        let mut plus = Vec::new();
        for m in self.modes(bound) {
            let p = self.mode_pair(phi, m)?;
            minus.push(p.minus);
            plus.push(p.plus);
        }
        minus.sort();
        plus.sort();
        Ok((minus, plus))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModePair {
    pub mode: Label,
    pub plus: HGen,
    pub minus: HGen,
    pub kappa: Scalar,
}

/// A truncated module over a Heisenberg algebra.
///
/// `act_basis` is exact and never consults the truncation; `act` applies it
/// and reports `TruncationOverflow` if the result leaves the window.
pub trait HeisenbergModule {
    type Basis: Ord + Clone + fmt::Debug + fmt::Display;

    fn kind(&self) -> &HeisenbergKind;
    fn level(&self) -> &Scalar;
    fn truncation(&self) -> &Truncation;
    fn highest(&self) -> Self::Basis;
    fn basis(&self) -> Vec<Self::Basis>;
    fn in_window(&self, b: &Self::Basis) -> bool;
    fn act_basis(&self, g: &HGen, b: &Self::Basis) -> Result<LinComb<Self::Basis>>;
    /// Signed exponent vector: raising generators count `+`, lowering `-`.
    fn z_infty_degree(&self, b: &Self::Basis) -> MultiIndex;
    /// Noncentral generators that act inside the window.
    fn generators(&self) -> Vec<HGen>;
    /// Whether `g` creates from the highest vector rather than killing it.
    fn is_creation(&self, g: &HGen) -> bool;

    fn z_degree(&self, b: &Self::Basis) -> i64 {
        crate::algebra::z_degree(&self.z_infty_degree(b))
    }

    fn occupied_modes(&self, b: &Self::Basis) -> BTreeSet<Label> {
        self.z_infty_degree(b).support().copied().collect()
    }

    fn act_unbounded(&self, g: &HGen, w: &LinComb<Self::Basis>) -> Result<LinComb<Self::Basis>> {
        w.map_linear(|b| self.act_basis(g, b))
    }

    fn act(&self, g: &HGen, w: &LinComb<Self::Basis>) -> Result<LinComb<Self::Basis>> {
        let out = self.act_unbounded(g, w)?;
        if let Some(b) = out.support().find(|b| !self.in_window(b)) {
            return Err(Error::TruncationOverflow(format!("{g} sends the vector to {b}, outside the window")));
        }
        Ok(out)
    }

    /// Applies a word of generators right to left (`word[0]` acts last).
    fn act_word(&self, word: &[HGen], w: &LinComb<Self::Basis>) -> Result<LinComb<Self::Basis>> {
        let mut cur = w.clone();
        for g in word.iter().rev() {
            cur = self.act_unbounded(g, &cur)?;
        }
        Ok(cur)
    }
}

/// Checks `g(h w) - h(g w) = [g, h] w` for all generator pairs and basis
/// vectors in the window. Returns the number of identities checked.
pub fn check_representation<M: HeisenbergModule>(m: &M) -> Result<usize> {
    let gens = m.generators();
    let mut count = 0;
    for b in m.basis() {
        let w = LinComb::basis(b.clone());
        for g in &gens {
            let gw = m.act_unbounded(g, &w)?;
            for h in &gens {
                let lhs = m.act_unbounded(g, &m.act_unbounded(h, &w)?)?.minus(&m.act_unbounded(h, &gw)?);
                let rhs = w.scale(&(m.kind().bracket_gen(g, h)? * m.level()));
                if lhs != rhs {
                    return Err(Error::CheckFailed(format!(
                        "[{g}, {h}] on {b}: got {lhs}, expected {rhs}"
                    )));
                }
                count += 1;
            }
        }
        let cw = m.act_unbounded(&HGen::C, &w)?;
        if cw != w.scale(m.level()) {
            return Err(Error::CheckFailed(format!("c does not act by the level on {b}")));
        }
    }
    Ok(count)
}

/// Checks that every generator shifts the `Z^infty` degree by its own
/// signed unit vector, and the `Z` degree by its degree.
pub fn check_grading<M: HeisenbergModule>(m: &M) -> Result<usize> {
    let mut count = 0;
    for b in m.basis() {
        let d = m.z_infty_degree(&b);
        for g in m.generators() {
            let shift = MultiIndex::unit(g.mode().expect("noncentral")).clone();
            let expected = if g.degree() > 0 { d.add(&shift) } else { d.sub(&shift) };
            for (img, _) in m.act_basis(&g, &b)?.iter() {
                if m.z_infty_degree(img) != expected {
                    return Err(Error::CheckFailed(format!("{g} on {b} lands in the wrong degree: {img}")));
                }
                if m.z_degree(img) != m.z_degree(&b) + g.degree() {
                    return Err(Error::CheckFailed(format!("{g} on {b} breaks the Z-grading")));
                }
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Exhaustive antisymmetry and Jacobi check on generators with
/// `|degree| <= bound` (and `c`).
pub fn check_bracket_laws(kind: &HeisenbergKind, bound: i64) -> Result<usize> {
    let mut gens = kind.generators(bound);
    gens.push(HGen::C);
    let mut count = 0;
    let b = |x: &LinComb<HGen>, y: &LinComb<HGen>| kind.bracket(x, y);
    for u in &gens {
        let lu = LinComb::basis(*u);
        for v in &gens {
            let lv = LinComb::basis(*v);
            let uv = b(&lu, &lv)?;
            if uv != b(&lv, &lu)?.neg() {
                return Err(Error::CheckFailed(format!("antisymmetry fails for {u}, {v}")));
            }
            for w in &gens {
                let lw = LinComb::basis(*w);
                let jac = b(&lu, &b(&lv, &lw)?)?
                    .plus(&b(&lv, &b(&lw, &lu)?)?)
                    .plus(&b(&lw, &b(&lu, &lv)?)?);
                if !jac.is_zero() {
                    return Err(Error::CheckFailed(format!("Jacobi fails for {u}, {v}, {w}")));
                }
                count += 1;
            }
        }
    }
    Ok(count)
}
