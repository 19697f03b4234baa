//! Sign functions `phi: N -> {+, -}` and their refinements on pairs `(k, i)`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::Label;
use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn is_plus(self) -> bool {
        self == Sign::Plus
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.is_plus() { "+" } else { "-" })
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match String::deserialize(d)?.trim() {
            "+" => Ok(Sign::Plus),
            "-" => Ok(Sign::Minus),
            other => Err(serde::de::Error::custom(format!("bad sign {other:?}"))),
        }
    }
}

/// An eventually periodic sign function.
///
/// Lookup order: explicit exceptions, then the periodic pattern (if any),
/// then the default. A pair label `(k, i)` without its own exception
/// falls back to the value at `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPhi", into = "RawPhi")]
pub struct PhiFunction {
    exceptions: BTreeMap<Label, Sign>,
    default: Sign,
    pattern: Option<Vec<Sign>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawPhi {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    exceptions: BTreeMap<Label, Sign>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    default: Option<Sign>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    period: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pattern: Option<Vec<Sign>>,
}

impl TryFrom<RawPhi> for PhiFunction {
    type Error = String;

    fn try_from(raw: RawPhi) -> std::result::Result<Self, String> {
        if let (Some(p), Some(pat)) = (raw.period, &raw.pattern) {
            if p != pat.len() {
                return Err(format!("period {p} does not match pattern length {}", pat.len()));
            }
        }
        if raw.period.is_some() && raw.pattern.is_none() {
            return Err("period given without pattern".into());
        }
        let mut phi = PhiFunction {
            exceptions: BTreeMap::new(),
            default: raw.default.unwrap_or(Sign::Plus),
            pattern: None,
        };
        if let Some(pat) = raw.pattern {
            phi = phi.with_pattern(pat).map_err(|e| e.to_string())?;
        }
        for (l, s) in raw.exceptions {
            phi = phi.with(l, s).map_err(|e| e.to_string())?;
        }
        Ok(phi)
    }
}

impl From<PhiFunction> for RawPhi {
    fn from(phi: PhiFunction) -> Self {
        RawPhi {
            exceptions: phi.exceptions,
            default: if phi.pattern.is_some() { None } else { Some(phi.default) },
            period: phi.pattern.as_ref().map(|p| p.len()),
            pattern: phi.pattern,
        }
    }
}

impl PhiFunction {
    pub fn constant(sign: Sign) -> Self {
        Self { exceptions: BTreeMap::new(), default: sign, pattern: None }
    }

    pub fn periodic(pattern: Vec<Sign>) -> Result<Self> {
        Self::constant(Sign::Plus).with_pattern(pattern)
    }

    /// Builds `phi` on `1..=values.len()` from the given list, constant
    /// `default` afterwards.
    pub fn from_prefix(values: &[Sign], default: Sign) -> Self {
        let mut phi = Self::constant(default);
        for (pos, &s) in values.iter().enumerate() {
            if s != default {
                phi.exceptions.insert(Label::Int(pos as i64 + 1), s);
            }
        }
        phi
    }

    pub fn with_pattern(mut self, pattern: Vec<Sign>) -> Result<Self> {
        if pattern.is_empty() {
            return invalid("empty periodic pattern");
        }
        self.pattern = Some(pattern);
        Ok(self)
    }

    pub fn with(mut self, label: Label, sign: Sign) -> Result<Self> {
        match label {
            Label::Int(n) if n >= 1 => {}
            Label::Pair(k, i) if k >= 1 && i >= 1 => {}
            _ => return invalid(format!("phi is defined on positive labels only, got {label}")),
        }
        self.exceptions.insert(label, sign);
        Ok(self)
    }

    pub fn eval(&self, label: Label) -> Result<Sign> {
        if let Some(s) = self.exceptions.get(&label) {
            return Ok(*s);
        }
        match label {
            Label::Int(n) if n >= 1 => Ok(match &self.pattern {
                Some(p) => p[((n - 1) as usize) % p.len()],
                None => self.default,
            }),
            Label::Pair(k, i) if k >= 1 && i >= 1 => self.eval(Label::Int(k)),
            _ => invalid(format!("phi is undefined at {label}")),
        }
    }

    pub fn at(&self, n: i64) -> Result<Sign> {
        self.eval(Label::Int(n))
    }

    /// True when `phi` takes a single value on `1..=bound` (pairs included).
    pub fn is_constant_up_to(&self, bound: i64) -> bool {
        let first = self.at(1).ok();
        (1..=bound).all(|n| self.at(n).ok() == first)
            && self
                .exceptions
                .iter()
                .filter(|(l, _)| l.degree() <= bound)
                .all(|(_, s)| Some(*s) == first)
    }
}

impl Default for PhiFunction {
    fn default() -> Self {
        Self::constant(Sign::Plus)
    }
}
