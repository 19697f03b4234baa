//! The untwisted affine algebra of type `A_l^(1)` in its loop realization
//! `sl_{l+1} ⊗ C[t, t^-1] ⊕ Cc ⊕ Cd`.
//!
//! The invariant form is `(x, y) = tr(xy)`, so `(h_i, h_j)` is the Cartan
//! matrix. Imaginary generators use the dual pair `x_{k,i} = h_i ⊗ t^k`
//! (`k > 0`) and `x_{k,i} = h_i^* ⊗ t^k` (`k < 0`), with `(h_i, h_j^*) =
//! delta_ij`; then `[x_{k,i}, x_{-k,j}] = delta_ij k c`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{int, scalar_to_i64, LinComb, Scalar};
use crate::cartan::FiniteType;
use crate::error::{invalid, Error, Result};
use crate::heisenberg::{HGen, HeisenbergKind};
use crate::phi::PhiFunction;
use crate::roots::{AffineType, Root};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AffGen {
    /// `E_ij ⊗ t^n` with `i != j` (matrix indices from 1).
    Real { i: u32, j: u32, n: i64 },
    /// `x_{k,i}`, `k != 0`.
    Imag { k: i64, i: u32 },
    /// `h_i ⊗ 1`.
    Cartan(u32),
    C,
    D,
}

impl fmt::Display for AffGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AffGen::Real { i, j, n } => write!(f, "E({i},{j};{n})"),
            AffGen::Imag { k, i } => write!(f, "x({k},{i})"),
            AffGen::Cartan(i) => write!(f, "h({i})"),
            AffGen::C => write!(f, "c"),
            AffGen::D => write!(f, "d"),
        }
    }
}

impl std::str::FromStr for AffGen {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("bad affine generator {s:?}"));
        match s {
            "c" => return Ok(AffGen::C),
            "d" => return Ok(AffGen::D),
            _ => {}
        }
        let body = |p: &str| s.strip_prefix(p).and_then(|r| r.strip_suffix(')'));
        let num = |x: &str| x.trim().parse::<i64>().map_err(|_| bad());
        if let Some(b) = body("E(") {
            let (ij, n) = b.split_once(';').ok_or_else(bad)?;
            let (i, j) = ij.split_once(',').ok_or_else(bad)?;
            return Ok(AffGen::Real { i: num(i)? as u32, j: num(j)? as u32, n: num(n)? });
        }
        if let Some(b) = body("x(") {
            let (k, i) = b.split_once(',').ok_or_else(bad)?;
            return Ok(AffGen::Imag { k: num(k)?, i: num(i)? as u32 });
        }
        if let Some(b) = body("h(") {
            return Ok(AffGen::Cartan(num(b)? as u32));
        }
        Err(bad())
    }
}

impl Serialize for AffGen {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for AffGen {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl AffGen {
    /// `delta`-degree.
    pub fn degree(&self) -> i64 {
        match *self {
            AffGen::Real { n, .. } => n,
            AffGen::Imag { k, .. } => k,
            _ => 0,
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, AffGen::Real { .. })
    }

    /// The matching Heisenberg generator of `L`.
    pub fn to_heisenberg(&self) -> Option<HGen> {
        match *self {
            AffGen::Imag { k, i } => Some(HGen::X(k, i)),
            AffGen::C => Some(HGen::C),
            _ => None,
        }
    }

    pub fn from_heisenberg(g: &HGen) -> Option<AffGen> {
        match *g {
            HGen::X(k, i) => Some(AffGen::Imag { k, i }),
            HGen::C => Some(AffGen::C),
            HGen::E(_) => None,
        }
    }
}

type Matrix = BTreeMap<(u32, u32), Scalar>;

fn mat_add(m: &mut Matrix, key: (u32, u32), c: Scalar) {
    if c.is_zero() {
        return;
    }
    let e = m.entry(key).or_insert_with(Scalar::zero);
    *e += c;
    if e.is_zero() {
        m.remove(&key);
    }
}

/// Structure constants for `A_l^(1)`.
#[derive(Clone, Debug)]
pub struct LoopAlgebra {
    ty: AffineType,
    /// Matrix size `l + 1`.
    size: u32,
    cartan: Vec<Vec<i64>>,
    cartan_inv: Vec<Vec<Scalar>>,
}

impl LoopAlgebra {
    pub fn new(ty: AffineType) -> Result<Self> {
        let FiniteType::A(l) = ty.label else {
            return invalid(format!("structure constants are only provided for A_l^(1), not {ty}"));
        };
        if ty.twist != 1 {
            return invalid(format!("structure constants are only provided for untwisted types, not {ty}"));
        }
        let size = l as u32 + 1;
        let cartan = ty.finite_type().cartan_matrix();
        let n = size as i64;
        let cartan_inv: Vec<Vec<Scalar>> = (1..=l as i64)
            .map(|i| (1..=l as i64).map(|j| int(i.min(j) * (n - i.max(j))) / int(n)).collect())
            .collect();
        let alg = Self { ty, size, cartan, cartan_inv };
        alg.check_dual_basis()?;
        Ok(alg)
    }

    pub fn sl2() -> Self {
        Self::new("A1^(1)".parse().expect("valid type")).expect("A1^(1) is supported")
    }

    pub fn affine_type(&self) -> AffineType {
        self.ty
    }

    pub fn rank(&self) -> usize {
        self.size as usize - 1
    }

    pub fn heisenberg_kind(&self) -> HeisenbergKind {
        HeisenbergKind::Loop(self.ty)
    }

    pub fn validate_gen(&self, g: &AffGen) -> Result<()> {
        let l = self.rank() as u32;
        let ok = match *g {
            AffGen::Real { i, j, .. } => i != j && (1..=self.size).contains(&i) && (1..=self.size).contains(&j),
            AffGen::Imag { k, i } => k != 0 && (1..=l).contains(&i),
            AffGen::Cartan(i) => (1..=l).contains(&i),
            AffGen::C | AffGen::D => true,
        };
        if ok {
            Ok(())
        } else {
            invalid(format!("{g} is not a generator of {}", self.ty))
        }
    }

    fn h_matrix(i: u32) -> Matrix {
        BTreeMap::from([((i, i), Scalar::one()), ((i + 1, i + 1), -Scalar::one())])
    }

    /// The `sl` part and the loop power.
    fn to_matrix(&self, g: &AffGen) -> Option<(Matrix, i64)> {
        match *g {
            AffGen::Real { i, j, n } => Some((BTreeMap::from([((i, j), Scalar::one())]), n)),
            AffGen::Cartan(i) => Some((Self::h_matrix(i), 0)),
            AffGen::Imag { k, i } if k > 0 => Some((Self::h_matrix(i), k)),
            AffGen::Imag { k, i } => {
                let mut m = Matrix::new();
                for l in 1..=self.rank() as u32 {
                    for (key, c) in Self::h_matrix(l) {
                        mat_add(&mut m, key, c * &self.cartan_inv[i as usize - 1][l as usize - 1]);
                    }
                }
                Some((m, k))
            }
            AffGen::C | AffGen::D => None,
        }
    }

    /// Expands a traceless matrix at loop power `p` in the generator basis.
    fn from_matrix(&self, m: &Matrix, p: i64) -> LinComb<AffGen> {
        let mut out = LinComb::zero();
        let mut diag = vec![Scalar::zero(); self.size as usize + 1];
        for (&(r, c), x) in m {
            if r == c {
                diag[r as usize] = x.clone();
            } else {
                out.add_term(AffGen::Real { i: r, j: c, n: p }, x.clone());
            }
        }
        let mut acc = Scalar::zero();
        for l in 1..=self.rank() as u32 {
            acc += &diag[l as usize];
            if acc.is_zero() {
                continue;
            }
            match p.signum() {
                0 => out.add_term(AffGen::Cartan(l), acc.clone()),
                1 => out.add_term(AffGen::Imag { k: p, i: l }, acc.clone()),
                _ => {
                    // h_l = sum_j (h_l, h_j) h_j^*.
                    for j in 1..=self.rank() as u32 {
                        let a = self.cartan[l as usize - 1][j as usize - 1];
                        out.add_term(AffGen::Imag { k: p, i: j }, &acc * int(a));
                    }
                }
            }
        }
        out
    }

    fn commutator(x: &Matrix, y: &Matrix) -> (Matrix, Scalar) {
        let mut out = Matrix::new();
        let mut trace = Scalar::zero();
        for (&(a, b), u) in x {
            for (&(c, d), v) in y {
                if b == c {
                    mat_add(&mut out, (a, d), u * v);
                    if a == d {
                        trace += u * v;
                    }
                }
                if d == a {
                    mat_add(&mut out, (c, b), -(u * v));
                }
            }
        }
        (out, trace)
    }

    /// `[x ⊗ t^m, y ⊗ t^n] = [x, y] ⊗ t^{m+n} + m delta_{m,-n} tr(xy) c`,
    /// `[d, g] = deg(g) g`, `c` central.
    pub fn bracket_gen(&self, x: &AffGen, y: &AffGen) -> Result<LinComb<AffGen>> {
        self.validate_gen(x)?;
        self.validate_gen(y)?;
        match (x, y) {
            (AffGen::C, _) | (_, AffGen::C) | (AffGen::D, AffGen::D) => Ok(LinComb::zero()),
            (AffGen::D, g) => Ok(LinComb::term(*g, int(g.degree()))),
            (g, AffGen::D) => Ok(LinComb::term(*g, int(-g.degree()))),
            _ => {
                let (mx, m) = self.to_matrix(x).expect("noncentral");
                let (my, n) = self.to_matrix(y).expect("noncentral");
                let (br, trace) = Self::commutator(&mx, &my);
                let mut out = self.from_matrix(&br, m + n);
                if m + n == 0 {
                    out.add_term(AffGen::C, int(m) * trace);
                }
                Ok(out)
            }
        }
    }

    pub fn bracket(&self, u: &LinComb<AffGen>, v: &LinComb<AffGen>) -> Result<LinComb<AffGen>> {
        let mut out = LinComb::zero();
        for (g, x) in u.iter() {
            for (h, y) in v.iter() {
                out.add_scaled(&self.bracket_gen(g, h)?, &(x * y));
            }
        }
        Ok(out)
    }

    /// Asserts `[x_{k,i}, x_{-k,j}] = delta_ij k c`.
    fn check_dual_basis(&self) -> Result<()> {
        for i in 1..=self.rank() as u32 {
            for j in 1..=self.rank() as u32 {
                let br = self.bracket_gen(&AffGen::Imag { k: 2, i }, &AffGen::Imag { k: -2, i: j })?;
                let want = if i == j { LinComb::term(AffGen::C, int(2)) } else { LinComb::zero() };
                if br != want {
                    return Err(Error::CheckFailed(format!("dual basis relation fails for ({i}, {j}): {br}")));
                }
            }
        }
        Ok(())
    }

    /// Finite part of the root of `E_ij` in simple-root coordinates.
    fn real_finite(&self, i: u32, j: u32) -> Vec<i64> {
        let mut v = vec![0i64; self.rank()];
        let (lo, hi, s) = if i < j { (i, j, 1) } else { (j, i, -1) };
        for t in lo..hi {
            v[t as usize - 1] = s;
        }
        v
    }

    /// Root of a generator; `None` for the Cartan part.
    pub fn root_of(&self, g: &AffGen) -> Option<Root> {
        match *g {
            AffGen::Real { i, j, n } => Some(Root::from_ints(&self.real_finite(i, j), n)),
            AffGen::Imag { k, .. } => Some(Root::imaginary(self.rank(), k)),
            _ => None,
        }
    }

    /// Basis of `g_alpha`; empty when `alpha` is not a root.
    pub fn root_space_basis(&self, root: &Root) -> Vec<AffGen> {
        if root.finite.len() != self.rank() {
            return Vec::new();
        }
        let Some(n) = scalar_to_i64(&root.delta) else {
            return Vec::new();
        };
        let Some(fin) = root.finite.iter().map(scalar_to_i64).collect::<Option<Vec<i64>>>() else {
            return Vec::new();
        };
        if fin.iter().all(|&c| c == 0) {
            if n == 0 {
                return Vec::new();
            }
            return (1..=self.rank() as u32).map(|i| AffGen::Imag { k: n, i }).collect();
        }
        for i in 1..=self.size {
            for j in 1..=self.size {
                if i != j && self.real_finite(i, j) == fin {
                    return vec![AffGen::Real { i, j, n }];
                }
            }
        }
        Vec::new()
    }

    /// Root vectors and imaginary generators with `|degree| <= bound`, then
    /// the Cartan part, `c` and `d`.
    pub fn generators(&self, bound: i64) -> Vec<AffGen> {
        let mut out = Vec::new();
        for n in -bound..=bound {
            for i in 1..=self.size {
                for j in 1..=self.size {
                    if i != j {
                        out.push(AffGen::Real { i, j, n });
                    }
                }
            }
            if n != 0 {
                for i in 1..=self.rank() as u32 {
                    out.push(AffGen::Imag { k: n, i });
                }
            }
        }
        for i in 1..=self.rank() as u32 {
            out.push(AffGen::Cartan(i));
        }
        out.push(AffGen::C);
        out.push(AffGen::D);
        out
    }

    /// Antisymmetry and Jacobi on all generator pairs and triples with
    /// `|degree| <= bound`.
    pub fn check_bracket_laws(&self, bound: i64) -> Result<usize> {
        let gens = self.generators(bound);
        self.check_bracket_laws_on(&gens, &gens, &gens)
    }

    pub fn check_bracket_laws_on(&self, xs: &[AffGen], ys: &[AffGen], zs: &[AffGen]) -> Result<usize> {
        let mut count = 0;
        let mut table: BTreeMap<(AffGen, AffGen), LinComb<AffGen>> = BTreeMap::new();
        let mut br = |a: &AffGen, b: &AffGen| -> Result<LinComb<AffGen>> {
            if let Some(v) = table.get(&(*a, *b)) {
                return Ok(v.clone());
            }
            let v = self.bracket_gen(a, b)?;
            table.insert((*a, *b), v.clone());
            Ok(v)
        };
        for x in xs {
            for y in ys {
                if br(x, y)? != br(y, x)?.neg() {
                    return Err(Error::CheckFailed(format!("antisymmetry fails for {x}, {y}")));
                }
                count += 1;
            }
        }
        for x in xs {
            for y in ys {
                let xy = br(x, y)?;
                for z in zs {
                    let mut total = LinComb::zero();
                    for (w, c) in xy.iter() {
                        total.add_scaled(&br(w, z)?, c);
                    }
                    let yz = br(y, z)?;
                    for (w, c) in yz.iter() {
                        total.add_scaled(&br(w, x)?, c);
                    }
                    let zx = br(z, x)?;
                    for (w, c) in zx.iter() {
                        total.add_scaled(&br(w, y)?, c);
                    }
                    if !total.is_zero() {
                        return Err(Error::CheckFailed(format!("Jacobi fails for {x}, {y}, {z}: {total}")));
                    }
                    count += 1;
                }
            }
        }
        Ok(count)
    }

    /// `[g_alpha, g_beta] ⊆ g_{alpha+beta}` (the Cartan part and `c` when
    /// the sum vanishes).
    pub fn check_root_grading(&self, bound: i64) -> Result<usize> {
        let gens = self.generators(bound);
        let mut count = 0;
        for x in &gens {
            for y in &gens {
                let (Some(rx), Some(ry)) = (self.root_of(x), self.root_of(y)) else { continue };
                let sum = rx.add(&ry);
                for (g, _) in self.bracket_gen(x, y)?.iter() {
                    let ok = match self.root_of(g) {
                        Some(r) => r == sum,
                        None => sum.is_zero(),
                    };
                    if !ok {
                        return Err(Error::CheckFailed(format!("[{x}, {y}] has the term {g} outside g_{sum}")));
                    }
                }
                count += 1;
            }
        }
        Ok(count)
    }

    /// The imaginary generators bracket exactly as the abstract `L`.
    pub fn check_heisenberg_consistency(&self, bound: i64) -> Result<usize> {
        let kind = self.heisenberg_kind();
        let mut count = 0;
        for g in kind.generators(bound) {
            for h in kind.generators(bound) {
                let want = LinComb::term(AffGen::C, kind.bracket_gen(&g, &h)?);
                let got = self.bracket_gen(
                    &AffGen::from_heisenberg(&g).expect("loop generator"),
                    &AffGen::from_heisenberg(&h).expect("loop generator"),
                )?;
                if got != want {
                    return Err(Error::CheckFailed(format!("[{g}, {h}] = {got} in the loop algebra")));
                }
                count += 1;
            }
        }
        Ok(count)
    }

    /// `b_phi = H ⊕ g_{S_phi}` and `g_{-S_phi}` restricted to the window.
    /// The sign of `x_{k,i}` is read from `phi` at the label `(k, i)`.
    pub fn borel(&self, phi: &PhiFunction, bound: i64) -> Result<GeneratorSplit> {
        let kind = self.heisenberg_kind();
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for g in self.generators(bound) {
            match g {
                AffGen::Real { i, j, .. } => {
                    if i < j {
                        plus.push(g)
                    } else {
                        minus.push(g)
                    }
                }
                AffGen::Imag { k, i } if k > 0 => {
                    let p = kind.mode_pair(phi, crate::algebra::Label::Pair(k, i))?;
                    plus.push(AffGen::from_heisenberg(&p.plus).expect("loop generator"));
                    minus.push(AffGen::from_heisenberg(&p.minus).expect("loop generator"));
                }
                _ => {}
            }
        }
        Ok(GeneratorSplit::new(self.cartan_part(), plus, minus))
    }

    /// `P = (H + L) ⊕ g_R` with `R` the real roots of positive finite part,
    /// and `g_{-R}`.
    pub fn parabolic(&self, bound: i64) -> GeneratorSplit {
        let mut levi = self.cartan_part();
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for g in self.generators(bound) {
            match g {
                AffGen::Real { i, j, .. } if i < j => plus.push(g),
                AffGen::Real { .. } => minus.push(g),
                AffGen::Imag { .. } => levi.push(g),
                _ => {}
            }
        }
        GeneratorSplit::new(levi, plus, minus)
    }

    fn cartan_part(&self) -> Vec<AffGen> {
        let mut h: Vec<AffGen> = (1..=self.rank() as u32).map(AffGen::Cartan).collect();
        h.push(AffGen::C);
        h.push(AffGen::D);
        h
    }

    /// Checks that `levi ⊕ plus` and `minus ⊕ Cc` are closed under the
    /// bracket, ignoring terms beyond the window, and that the lists are
    /// disjoint.
    pub fn check_split(&self, s: &GeneratorSplit, bound: i64) -> Result<usize> {
        let levi: BTreeSet<AffGen> = s.levi.iter().copied().collect();
        let plus: BTreeSet<AffGen> = s.plus.iter().copied().collect();
        let minus: BTreeSet<AffGen> = s.minus.iter().copied().collect();
        if levi.iter().chain(&plus).any(|g| minus.contains(g)) || levi.iter().any(|g| plus.contains(g)) {
            return Err(Error::CheckFailed("generator lists overlap".into()));
        }
        let upper: BTreeSet<AffGen> = levi.union(&plus).copied().collect();
        let mut lower = minus.clone();
        lower.insert(AffGen::C);
        let mut count = 0;
        for set in [&upper, &lower] {
            for x in set {
                for y in set {
                    for (g, _) in self.bracket_gen(x, y)?.iter() {
                        if g.degree().abs() <= bound && !set.contains(g) {
                            return Err(Error::CheckFailed(format!("[{x}, {y}] leaves the subalgebra through {g}")));
                        }
                    }
                    count += 1;
                }
            }
        }
        Ok(count)
    }
}

/// Generator lists for a triangular-type decomposition: the Levi (or
/// Cartan) part, the positive side and the negative side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorSplit {
    pub levi: Vec<AffGen>,
    pub plus: Vec<AffGen>,
    pub minus: Vec<AffGen>,
}

impl GeneratorSplit {
    fn new(mut levi: Vec<AffGen>, mut plus: Vec<AffGen>, mut minus: Vec<AffGen>) -> Self {
        levi.sort();
        plus.sort();
        minus.sort();
        Self { levi, plus, minus }
    }
}
