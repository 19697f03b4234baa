//! Constructive descent from a vector of an induced module to a nonzero
//! vector of the strip `⊕_k M_{lambda + k delta}` inside the submodule it
//! generates.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::affine::AffGen;
use crate::algebra::LinComb;
use crate::roots::Root;
use crate::error::{invalid, Error, Result};

use super::data::InductionData;
use super::induced::{InducedModule, LoopBasis, Weight};
use super::pbw::pbw_key;

/// One descent step: `x in g_{beta - m delta}` was applied, against the
/// head factor `z_{beta, head_n}`; the bracket lands in degree
/// `head_n - m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeStep {
    pub beta: Vec<i64>,
    pub head_n: i64,
    pub head_exponent: u32,
    pub m: i64,
    pub generator: AffGen,
    /// Whether `m` met both avoidance conditions.
    pub avoiding: bool,
}

#[derive(Clone, Debug)]
pub struct ProbeResult<B: Ord + Clone> {
    /// The homogeneous component the descent started from.
    pub start: LinComb<LoopBasis<B>>,
    pub start_weight: Weight,
    pub steps: Vec<ProbeStep>,
    pub strip_element: LinComb<LoopBasis<B>>,
}

fn scan_order(bound: i64) -> impl Iterator<Item = i64> {
    (0..=bound).flat_map(|r| if r == 0 { vec![0] } else { vec![r, -r] })
}

/// Runs the descent. A non-homogeneous `w` is split by weight and the
/// component of smallest weight is used.
pub fn irreducibility_probe<D: InductionData>(
    m: &InducedModule<D>,
    w: &LinComb<LoopBasis<D::Inner>>,
    m_search_bound: i64,
) -> Result<ProbeResult<D::Inner>> {
    if w.is_zero() {
        return invalid("the probe needs a nonzero vector");
    }
    let (start_weight, start) = m.homogeneous_components(w).into_iter().next().expect("nonzero");
    let mut cur = start.clone();
    let mut steps = Vec::new();
    while cur.support().any(|b| !m.in_strip(b)) {
        let step = descend(m, &cur, m_search_bound)?;
        cur = m.act(&step.generator, &cur)?;
        steps.push(step);
    }
    Ok(ProbeResult { start, start_weight, steps, strip_element: cur })
}

fn descend<D: InductionData>(
    m: &InducedModule<D>,
    w: &LinComb<LoopBasis<D::Inner>>,
    bound: i64,
) -> Result<ProbeStep> {
    let alg = m.algebra();
    // Head: smallest first real factor, then smallest exponent.
    let (head, p) = w
        .support()
        .filter_map(|b| b.word.first_real())
        .min_by_key(|(g, p)| {
            let (_, ht, beta, _, _) = pbw_key(alg, g);
            (ht, beta, *p)
        })
        .expect("a term outside the strip");
    let (_, _, beta, head_n, _) = pbw_key(alg, &head);
    let mut occupied = BTreeSet::new();
    for b in w.support() {
        occupied.extend(m.data().inner_occupied(&b.inner));
        for (g, _) in b.word.factors() {
            if let AffGen::Imag { k, .. } = g {
                occupied.insert(k.abs());
            }
        }
    }
    let root_of = |mm: i64| Root::from_ints(&beta, -mm);
    let candidates: Vec<(i64, bool)> = {
        let avoid = |mm: i64| {
            let k = head_n - mm;
            k != 0 && !occupied.contains(&k.abs())
        };
        let mut c: Vec<(i64, bool)> = scan_order(bound).filter(|&mm| avoid(mm)).map(|mm| (mm, true)).collect();
        c.extend(scan_order(bound).filter(|&mm| !avoid(mm)).map(|mm| (mm, false)));
        c
    };
    for (mm, avoiding) in candidates {
        let Some(&x) = alg.root_space_basis(&root_of(mm)).first() else { continue };
        if !m.act(&x, w)?.is_zero() {
            return Ok(ProbeStep { beta, head_n, head_exponent: p, m: mm, generator: x, avoiding });
        }
    }
    Err(Error::ProbeInconclusive(format!(
        "no m with |m| <= {bound} gives a nonzero image for the head root {beta:?}"
    )))
}

/// Applies the recorded generators to `w` and checks that the result is
/// the recorded strip element.
pub fn replay<D: InductionData>(m: &InducedModule<D>, result: &ProbeResult<D::Inner>) -> Result<LinComb<LoopBasis<D::Inner>>> {
    let mut cur = result.start.clone();
    for s in &result.steps {
        cur = m.act(&s.generator, &cur)?;
        if cur.is_zero() {
            return Err(Error::CheckFailed(format!("replay reached zero at {}", s.generator)));
        }
    }
    if cur != result.strip_element {
        return Err(Error::CheckFailed("replay does not reproduce the strip element".into()));
    }
    if cur.support().any(|b| !m.in_strip(b)) {
        return Err(Error::CheckFailed("the recorded element is not in the strip".into()));
    }
    Ok(cur)
}
