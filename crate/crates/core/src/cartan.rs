//! Finite root systems, generated from symmetric Gram matrices.
//!
//! Simple roots follow Bourbaki numbering. Gram entries are scaled so every
//! entry is an integer (short roots of `B`, `C`, `F`, `G` have norm 2, long
//! roots norm 4 or 6).

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FiniteType {
    A(usize),
    B(usize),
    C(usize),
    D(usize),
    E(usize),
    F4,
    G2,
}

impl fmt::Display for FiniteType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiniteType::A(n) => write!(f, "A{n}"),
            FiniteType::B(n) => write!(f, "B{n}"),
            FiniteType::C(n) => write!(f, "C{n}"),
            FiniteType::D(n) => write!(f, "D{n}"),
            FiniteType::E(n) => write!(f, "E{n}"),
            FiniteType::F4 => write!(f, "F4"),
            FiniteType::G2 => write!(f, "G2"),
        }
    }
}

impl std::str::FromStr for FiniteType {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().replace('_', "");
        let (head, tail) = s.split_at(1.min(s.len()));
        let rank: usize = match tail.parse() {
            Ok(r) => r,
            Err(_) => return invalid(format!("bad finite type {s:?}")),
        };
        let t = match (head, rank) {
            ("A", n) => FiniteType::A(n),
            ("B", n) => FiniteType::B(n),
            ("C", n) => FiniteType::C(n),
            ("D", n) => FiniteType::D(n),
            ("E", n) => FiniteType::E(n),
            ("F", 4) => FiniteType::F4,
            ("G", 2) => FiniteType::G2,
            _ => return invalid(format!("bad finite type {s:?}")),
        };
        t.validate()?;
        Ok(t)
    }
}

impl FiniteType {
    /// `C1` is admitted because it appears as the finite part of `A2^(2)`.
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            FiniteType::A(n) => n >= 1,
            FiniteType::B(n) => n >= 2,
            FiniteType::C(n) => n >= 1,
            FiniteType::D(n) => n >= 3,
            FiniteType::E(n) => (6..=8).contains(&n),
            FiniteType::F4 | FiniteType::G2 => true,
        };
        if ok {
            Ok(())
        } else {
            invalid(format!("unsupported finite type {self}"))
        }
    }

    pub fn rank(&self) -> usize {
        match *self {
            FiniteType::A(n)
            | FiniteType::B(n)
            | FiniteType::C(n)
            | FiniteType::D(n)
            | FiniteType::E(n) => n,
            FiniteType::F4 => 4,
            FiniteType::G2 => 2,
        }
    }

    /// Symmetric, integer-scaled Gram matrix of the simple roots.
    pub fn gram(&self) -> Vec<Vec<i64>> {
        let n = self.rank();
        let mut g = vec![vec![0i64; n]; n];
        let link = |g: &mut Vec<Vec<i64>>, i: usize, j: usize, v: i64| {
            g[i][j] = v;
            g[j][i] = v;
        };
        match *self {
            FiniteType::A(_) | FiniteType::D(_) | FiniteType::E(_) => {
                for i in 0..n {
                    g[i][i] = 2;
                }
                match *self {
                    FiniteType::A(_) => {
                        for i in 0..n - 1 {
                            link(&mut g, i, i + 1, -1);
                        }
                    }
                    FiniteType::D(_) => {
                        for i in 0..n - 2 {
                            link(&mut g, i, i + 1, -1);
                        }
                        link(&mut g, n - 3, n - 1, -1);
                    }
                    _ => {
                        // E: chain 1-3-4-5-...-n with 2 attached to 4.
                        link(&mut g, 0, 2, -1);
                        link(&mut g, 1, 3, -1);
                        for i in 2..n - 1 {
                            link(&mut g, i, i + 1, -1);
                        }
                    }
                }
            }
            FiniteType::B(_) => {
                for i in 0..n {
                    g[i][i] = 4;
                }
                g[n - 1][n - 1] = 2;
                for i in 0..n - 1 {
                    link(&mut g, i, i + 1, -2);
                }
            }
            FiniteType::C(_) => {
                for i in 0..n {
                    g[i][i] = 2;
                }
                g[n - 1][n - 1] = 4;
                for i in 0..n.saturating_sub(2) {
                    link(&mut g, i, i + 1, -1);
                }
                if n >= 2 {
                    link(&mut g, n - 2, n - 1, -2);
                }
            }
            FiniteType::F4 => {
                g[0][0] = 4;
                g[1][1] = 4;
                g[2][2] = 2;
                g[3][3] = 2;
                link(&mut g, 0, 1, -2);
                link(&mut g, 1, 2, -2);
                link(&mut g, 2, 3, -1);
            }
            FiniteType::G2 => {
                g[0][0] = 2;
                g[1][1] = 6;
                link(&mut g, 0, 1, -3);
            }
        }
        g
    }

    /// Cartan matrix `a_ij = 2 (a_i, a_j) / (a_i, a_i)`.
    pub fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        let g = self.gram();
        let n = g.len();
        (0..n)
            .map(|i| (0..n).map(|j| 2 * g[i][j] / g[i][i]).collect())
            .collect()
    }

    pub fn inner(&self, x: &[i64], y: &[i64]) -> i64 {
        let g = self.gram();
        let mut s = 0;
        for i in 0..x.len() {
            for j in 0..y.len() {
                s += x[i] * g[i][j] * y[j];
            }
        }
        s
    }

    /// Positive roots in simple-root coordinates, sorted by height then
    /// lexicographically.
    pub fn positive_roots(&self) -> Vec<Vec<i64>> {
        let n = self.rank();
        let g = self.gram();
        let mut all: BTreeSet<Vec<i64>> = BTreeSet::new();
        let mut layer: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                let mut v = vec![0; n];
                v[i] = 1;
                v
            })
            .collect();
        all.extend(layer.iter().cloned());
        while !layer.is_empty() {
            let mut next = BTreeSet::new();
            for beta in &layer {
                for i in 0..n {
                    // q: how far down the i-string through beta goes.
                    let mut q = 0;
                    let mut probe = beta.clone();
                    loop {
                        probe[i] -= 1;
                        if all.contains(&probe) {
                            q += 1;
                        } else {
                            break;
                        }
                    }
                    let pairing: i64 = (0..n).map(|j| beta[j] * g[j][i]).sum::<i64>() * 2 / g[i][i];
                    let p = q - pairing;
                    if p > 0 {
                        let mut up = beta.clone();
                        up[i] += 1;
                        if !all.contains(&up) {
                            next.insert(up);
                        }
                    }
                }
            }
            all.extend(next.iter().cloned());
            layer = next.into_iter().collect();
        }
        let mut out: Vec<Vec<i64>> = all.into_iter().collect();
        out.sort_by_key(|r| (r.iter().sum::<i64>(), r.clone()));
        out
    }

    pub fn norm(&self, root: &[i64]) -> i64 {
        self.inner(root, root)
    }

    /// Largest root norm; roots of this norm are long. In simply laced types
    /// every root is long.
    pub fn long_norm(&self) -> i64 {
        self.gram().iter().enumerate().map(|(i, r)| r[i]).max().unwrap_or(2)
    }

    pub fn is_long(&self, root: &[i64]) -> bool {
        self.norm(root) == self.long_norm()
    }
}
