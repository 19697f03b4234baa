//! One function per task. Each fills an [`Outcome`].

use std::collections::{BTreeMap, BTreeSet};

use loopmod_core::affine::LoopAlgebra;
use loopmod_core::algebra::{format_scalar, int, ratio};
use loopmod_core::diagonal::{
    self, admissibility_check, check_commuting_family, check_eigen_ladder, compress_grading_f2, z_infty_grade,
    DiagonalRealization,
};
use loopmod_core::heisenberg::{check_bracket_laws, check_grading, check_representation, HeisenbergKind, HeisenbergModule};
use loopmod_core::loops::{
    build_generalized_loop, build_m_phi_lambda, build_partial_loop, cross_check_phi_construction,
    irreducibility_probe, replay, CartanWeight, InducedModule, InductionData, LoopBasis, TrivialModule, Weight,
};
use loopmod_core::phi::Sign;
use loopmod_core::phi_verma::{reduction_formula, PhiVermaModule};
use loopmod_core::roots::{build_s_phi, is_closed_partition, AffineType, Closure};
use loopmod_core::weyl::{analyze_orbit, classify, overlapping_supports, WeightPoint, Window};
use loopmod_core::{Error, Label, LinComb, Result, Scalar, Truncation};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{parse_theta, Algebra, JobConfig, Task};
use crate::report::{DimRow, Outcome};

pub fn run(cfg: &JobConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    match cfg.task {
        Task::RootSystem => root_system(cfg, &mut out)?,
        Task::PhiVerma => phi_verma(cfg, &mut out)?,
        Task::WeylClassify => weyl_classify(cfg, &mut out)?,
        Task::Realization => realization(cfg, &mut out)?,
        Task::LoopModule => loop_module(cfg, &mut out)?,
        Task::PartialLoop => partial_loop(cfg, &mut out)?,
        Task::Verify => verify(cfg, &mut out)?,
        Task::Probe => probe(cfg, &mut out)?,
    }
    Ok(out)
}

/// `lambda` from the config, with `c` defaulting to the level.
pub fn lambda(cfg: &JobConfig, ty: &AffineType) -> Result<CartanWeight> {
    let mut labels = cfg.lambda.clone();
    labels.entry("c".into()).or_insert_with(|| cfg.level_a.clone());
    let w = CartanWeight::from_labels(ty.finite_rank(), &labels)?;
    if w.c != cfg.level()? {
        return Err(Error::InvalidArgument(format!(
            "lambda(c) = {} disagrees with level_a = {}",
            format_scalar(&w.c),
            cfg.level_a
        )));
    }
    Ok(w)
}

fn dims_table(dims: &BTreeMap<Weight, usize>) -> Vec<DimRow> {
    dims.iter().map(|((beta, n), d)| DimRow::new(beta, *n, *d)).collect()
}

fn degree_table(dims: &BTreeMap<i64, usize>) -> Vec<DimRow> {
    dims.iter().map(|(n, d)| DimRow::new(&[], *n, *d)).collect()
}

fn weight_str(w: &Weight) -> String {
    let beta: Vec<String> = w.0.iter().map(|c| c.to_string()).collect();
    format!("({}; {})", beta.join(";"), w.1)
}

fn root_system(cfg: &JobConfig, out: &mut Outcome) -> Result<()> {
    let ty = cfg.algebra()?.affine()?;
    let t = &cfg.truncation;
    let s = build_s_phi(&ty, &cfg.phi, t)?;
    let mult: Vec<usize> = (1..=t.max_delta_degree).map(|k| ty.imaginary_multiplicity(k)).collect::<Result<_>>()?;
    let reals = ty.positive_real_roots(t);
    out.result("affine_type", ty.to_string());
    out.result("finite_rank", ty.finite_rank());
    out.result("imaginary_multiplicities", mult);
    out.result("positive_real_roots", reals.iter().map(|r| r.to_string()).collect::<Vec<_>>());
    out.result("s_phi_plus", s.plus.iter().map(|r| r.to_string()).collect::<Vec<_>>());
    let literal = is_closed_partition(&s, t, Closure::RootSum);
    out.result(
        "s_phi_root_sum_closure",
        json!({
            "closed": literal.closed,
            "pairs_checked": literal.pairs_checked,
            "witness": literal.witness.as_ref().map(|(x, y)| format!("{x} + {y}")),
        }),
    );
    out.check("s_phi_partition", || s.check_partition().map(|_| s.plus.len()))?;
    out.check("s_phi_subalgebra_closed", || {
        let r = is_closed_partition(&s, t, Closure::Subalgebra);
        match r.witness {
            None => Ok(r.pairs_checked),
            Some((x, y)) => Err(Error::CheckFailed(format!("{x} + {y} leaves S_phi"))),
        }
    })?;
    let std = ty.standard_positive(t.max_delta_degree);
    out.check("standard_partition", || std.check_partition().map(|_| std.plus.len()))?;
    Ok(())
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct PhiVermaParams {
    /// Monomials up to this total degree are checked against the reduction
    /// formula (default: the truncation's `max_total_degree`).
    reduction_degree: Option<i64>,
}

fn phi_verma(cfg: &JobConfig, out: &mut Outcome) -> Result<()> {
    let p: PhiVermaParams = cfg.params()?;
    let kind = cfg.algebra()?.heisenberg();
    let m = PhiVermaModule::new(kind, cfg.phi.clone(), cfg.level()?, cfg.truncation.clone())?;
    phi_verma_checks(&m, p.reduction_degree, out)?;
    out.table("graded_dimensions", degree_table(&m.graded_dimensions()));
    Ok(())
}

fn phi_verma_checks(m: &PhiVermaModule, reduction_degree: Option<i64>, out: &mut Outcome) -> Result<()> {
    out.result("basis_size", m.basis().len());
    out.result(
        "annihilator_of_highest",
        m.annihilator_of_highest()?.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
    );
    out.check("phi_verma_representation", || check_representation(m))?;
    out.check("phi_verma_grading", || check_grading(m))?;
    if m.level().is_zero() {
        let n = m.proper_submodule_at_level_zero();
        if let Ok(n) = &n {
            out.result("level_zero_submodule_size", n.len());
        }
        out.check("level_zero_submodule_closed", || n.map(|n| n.len()))?;
        return Ok(());
    }
    let bound = reduction_degree.unwrap_or(m.truncation().max_total_degree);
    out.check("reduction_formula", || {
        let mut count = 0;
        for k in m.basis().into_iter().filter(|k| k.total() <= bound) {
            let (top, c) = m.reduce_to_highest(&LinComb::basis(k.clone()))?;
            let expected = reduction_formula(&k, &int(1), m.level());
            if top != k || c != expected {
                return Err(Error::CheckFailed(format!(
                    "monomial {k}: reduced to {top} with {}, expected {}",
                    format_scalar(&c),
                    format_scalar(&expected)
                )));
            }
            count += 1;
        }
        Ok(count)
    })?;
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeylParams {
    point: WeightPoint,
    #[serde(default)]
    window_coords: Option<Vec<usize>>,
    #[serde(default = "default_radius")]
    radius: i64,
}

fn default_radius() -> i64 {
    2
}

impl Default for WeylParams {
    fn default() -> Self {
        let pt = WeightPoint::finite(int(1), vec![int(0), ratio(1, 2)]).expect("valid point");
        Self { point: pt, window_coords: None, radius: default_radius() }
    }
}

fn weyl_classify(cfg: &JobConfig, out: &mut Outcome) -> Result<()> {
    let p: WeylParams = cfg.params()?;
    let coords = match (&p.window_coords, p.point.n()) {
        (Some(c), _) => c.clone(),
        (None, Some(n)) => (1..=n).collect(),
        (None, None) => p.point.listed().copied().collect(),
    };
    let window = Window::new(coords, p.radius)?;
    weyl_suite(&p.point, &window, out)
}

fn weyl_suite(point: &WeightPoint, window: &Window, out: &mut Outcome) -> Result<()> {
    let desc = analyze_orbit(point);
    out.result("orbit", &desc);
    let s = desc.degenerate_in(window).len();
    let classes = match classify(&desc, window) {
        Ok(c) => c,
        Err(e @ Error::NotAdmissible(_)) => {
            out.check("classification", || Err(e))?;
            return Ok(());
        }
        Err(e) => return Err(e),
    };
    out.result("degenerate_in_window", s);
    out.result(
        "classes",
        classes
            .iter()
            .map(|m| json!({"p": m.p.to_string(), "support_size": m.support().len()}))
            .collect::<Vec<_>>(),
    );
    out.expect("classification_count", classes.len() == 1usize << s, || {
        format!("{} classes for {s} degenerate coordinates", classes.len())
    })?;
    let overlaps = overlapping_supports(&classes);
    out.expect("disjoint_supports", overlaps.is_empty(), || format!("overlapping pairs {overlaps:?}"))?;
    for (idx, m) in classes.iter().enumerate() {
        out.check(&format!("class_{idx}_relations"), || m.check_relations())?;
        out.check(&format!("class_{idx}_weight_propagation"), || m.check_weight_propagation())?;
        out.check(&format!("class_{idx}_break_annihilation"), || m.check_break_annihilation())?;
        out.check(&format!("class_{idx}_irreducible_in_window"), || m.check_irreducible_in_window())?;
    }
    Ok(())
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RealizationParams {
    /// Modes of `K` with their eigenvalues.
    theta: BTreeMap<Label, String>,
    y_choice: BTreeMap<Label, Sign>,
    /// Restrict the module to these modes.
    restrict: Option<Vec<Label>>,
}

impl RealizationParams {
    fn build(&self, kind: HeisenbergKind, a: Scalar, trunc: &Truncation) -> Result<DiagonalRealization> {
        let r = DiagonalRealization::new(kind, parse_theta(&self.theta)?, a, trunc.clone(), self.y_choice.clone())?;
        match &self.restrict {
            Some(modes) => r.restricted_to(modes.iter().copied().collect()),
            None => Ok(r),
        }
    }
}

fn realization(cfg: &JobConfig, out: &mut Outcome) -> Result<()> {
    let p: RealizationParams = cfg.params()?;
    let r = p.build(cfg.algebra()?.heisenberg(), cfg.level()?, &cfg.truncation)?;
    realization_suite(&r, out)
}

fn realization_suite(r: &DiagonalRealization, out: &mut Outcome) -> Result<()> {
    out.result("descriptor", r.descriptor());
    out.result("irreducible", r.is_irreducible());
    out.result("basis_size", r.basis().len());
    let witnesses: BTreeMap<String, String> = r
        .k_set()
        .into_iter()
        .filter_map(|m| r.singular_witness(m).map(|(b, g)| (m.to_string(), format!("{g} kills {b}"))))
        .collect();
    out.result("singular_witnesses", witnesses);
    let vanishing = r.vanishing_ladder_steps()?;
    out.result(
        "vanishing_ladder_steps",
        vanishing.iter().map(|(b, g)| format!("{g} on {b}")).collect::<Vec<_>>(),
    );
    out.check("realization_representation", || check_representation(r))?;
    out.check("realization_grading", || check_grading(r))?;
    out.check("eigenvalue_ladder", || check_eigen_ladder(r))?;
    out.check("commuting_family", || check_commuting_family(r))?;
    out.check("diagonal", || {
        if diagonal::is_diagonal(r)? {
            Ok(1)
        } else {
            Err(Error::NotDiagonal("no common eigenvector".into()))
        }
    })?;
    out.check("z_infty_grading", || z_infty_grade(r).map(|g| g.degree.len()))?;
    let adm = admissibility_check(r)?;
    out.result("admissibility", &adm);
    if let Ok((orbit, points)) = diagonal::weyl_correspondence(r) {
        out.result("weyl_orbit", &orbit);
        out.result("weyl_points", points.len());
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Inner {
    /// `M_phi(lambda)`, induced from the Borel subalgebra.
    #[default]
    PhiImaginary,
    /// `M(lambda, M_phi(a))`.
    PhiVerma,
    /// `M(lambda, V_{K, theta, a})`.
    Realization,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct LoopParams {
    inner: Inner,
    theta: BTreeMap<Label, String>,
    y_choice: BTreeMap<Label, Sign>,
    gen_bound: i64,
    /// How many basis vectors the representation check visits.
    sample: usize,
}

impl Default for LoopParams {
    fn default() -> Self {
        Self { inner: Inner::default(), theta: BTreeMap::new(), y_choice: BTreeMap::new(), gen_bound: 1, sample: 40 }
    }
}

impl LoopParams {
    fn realization(&self, ty: AffineType, a: Scalar, t: &Truncation) -> Result<DiagonalRealization> {
        DiagonalRealization::new(HeisenbergKind::Loop(ty), parse_theta(&self.theta)?, a, t.clone(), self.y_choice.clone())
    }
}

fn loop_module(cfg: &JobConfig, out: &mut Outcome) -> Result<()> {
    let p: LoopParams = cfg.params()?;
    let ty = cfg.algebra()?.affine()?;
    let lam = lambda(cfg, &ty)?;
    let t = cfg.truncation.clone();
    out.result("inner", p.inner);
    match p.inner {
        Inner::PhiImaginary => loop_suite(&build_m_phi_lambda(ty, &cfg.phi, lam, t)?, &p, out),
        Inner::PhiVerma => {
            let v = PhiVermaModule::new(HeisenbergKind::Loop(ty), cfg.phi.clone(), lam.c.clone(), t.clone())?;
            loop_suite(&build_generalized_loop(lam.clone(), v, t.clone())?, &p, out)?;
            out.check("cross_construction", || cross_check_phi_construction(ty, &cfg.phi, lam, t, p.gen_bound))
        }
        Inner::Realization => {
            let v = p.realization(ty, lam.c.clone(), &t)?;
            out.result("realization", v.descriptor());
            loop_suite(&build_generalized_loop(lam, v, t)?, &p, out)
        }
    }
}

fn loop_suite<D: InductionData>(m: &InducedModule<D>, p: &LoopParams, out: &mut Outcome) -> Result<()> {
    out.result("inner_data", m.data().describe());
    out.result("lambda", m.lambda().to_string());
    let basis = m.basis();
    out.result("basis_size", basis.len());
    let gens = m.algebra().generators(p.gen_bound);
    out.check("freeness", || m.check_freeness())?;
    out.check("representation", || m.check_representation_on(&gens, &basis[..basis.len().min(p.sample)]))?;
    out.check("weights", || m.check_weights_on(&gens, &basis))?;
    out.check("strip_closure", || m.check_strip_closure(p.gen_bound))?;
    let dims = m.weight_dimensions();
    let conv = m.convolution_dimensions();
    out.expect("dimensions_match_pbw_count", dims == conv, || {
        let bad: Vec<String> = conv
            .iter()
            .filter(|(w, d)| dims.get(*w) != Some(*d))
            .map(|(w, d)| format!("{}: {:?} vs {d}", weight_str(w), dims.get(w)))
            .collect();
        bad.join(", ")
    })?;
    let support = m.support();
    let expected = m.expected_support();
    out.result("support_size", support.len());
    out.result("expected_support_size", expected.len());
    out.result(
        "missing_from_support",
        expected.difference(&support).map(weight_str).collect::<Vec<_>>(),
    );
    out.expect("support_within_formula", support.is_subset(&expected), || {
        let extra: Vec<String> = support.difference(&expected).map(weight_str).collect();
        format!("weights outside the formula: {}", extra.join(", "))
    })?;
    out.table("weight_dimensions", dims_table(&dims));
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct PartialParams {
    i_modes: Vec<Label>,
    theta: BTreeMap<Label, String>,
    gen_bound: i64,
}

impl Default for PartialParams {
    fn default() -> Self {
        Self { i_modes: Vec::new(), theta: BTreeMap::new(), gen_bound: 1 }
    }
}

fn partial_loop(cfg: &JobConfig, out: &mut Outcome) -> Result<()> {
    let p: PartialParams = cfg.params()?;
    let ty = cfg.algebra()?.affine()?;
    let lam = lambda(cfg, &ty)?;
    let t = cfg.truncation.clone();
    let kind = HeisenbergKind::Loop(ty);
    let i: BTreeSet<Label> = p.i_modes.iter().copied().collect();
    out.result("i_modes", i.iter().map(|l| l.to_string()).collect::<Vec<_>>());
    if i.is_empty() {
        let n = TrivialModule::new(kind, lam.c.clone(), t.clone());
        let pl = build_partial_loop(i, &cfg.phi, n, lam, t)?;
        out.check("double_construction", || pl.check_agreement(p.gen_bound))?;
        let (a, b) = pl.graded_dimensions();
        out.table("via_v", dims_table(&a));
        out.table("direct", dims_table(&b));
    } else {
        let n = DiagonalRealization::new(kind, parse_theta(&p.theta)?, lam.c.clone(), t.clone(), BTreeMap::new())?
            .restricted_to(i.clone())?;
        out.result("inner", n.descriptor());
        let pl = build_partial_loop(i, &cfg.phi, n, lam, t)?;
        out.check("double_construction", || pl.check_agreement(p.gen_bound))?;
        let (a, b) = pl.graded_dimensions();
        out.table("via_v", dims_table(&a));
        out.table("direct", dims_table(&b));
    }
    Ok(())
}

fn verify(cfg: &JobConfig, out: &mut Outcome) -> Result<()> {
    let alg = cfg.algebra()?;
    let kind = alg.heisenberg();
    let a = cfg.level()?;
    let t = cfg.truncation.clone();
    let bound = t.max_delta_degree.min(5);
    out.check("heisenberg_bracket_laws", || check_bracket_laws(&kind, bound))?;

    let m = PhiVermaModule::new(kind.clone(), cfg.phi.clone(), a.clone(), t.clone())?;
    phi_verma_checks(&m, None, out)?;
    out.table("phi_verma_graded_dimensions", degree_table(&m.graded_dimensions()));

    if !a.is_zero() {
        let r = generic_realization(&kind, &a, &t)?;
        realization_suite(&r, out)?;
        if let Ok(g) = z_infty_grade(&m) {
            let f2 = compress_grading_f2(&g);
            out.expect("f2_compression", f2.iter().all(|(b, d)| *d == m.z_degree(b)), || {
                "F2 differs from the Z-grading".into()
            })?;
        }
    }

    match alg {
        Algebra::Finite(_) | Algebra::Infinite if !a.is_zero() => {
            let pt = WeightPoint::finite(a.clone(), vec![int(0), a.clone() / int(2)])?;
            weyl_suite(&pt, &Window::first(2, 2), out)?;
        }
        Algebra::Affine(ty) => {
            if let Ok(la) = LoopAlgebra::new(ty) {
                out.check("affine_bracket_laws", || la.check_bracket_laws(1))?;
                out.check("affine_root_grading", || la.check_root_grading(2))?;
                out.check("affine_heisenberg_consistency", || la.check_heisenberg_consistency(t.max_delta_degree))?;
                let split = la.borel(&cfg.phi, 2)?;
                out.check("borel_split", || la.check_split(&split, 2))?;
                if !a.is_zero() {
                    let lam = lambda(cfg, &ty)?;
                    let mphi = build_m_phi_lambda(ty, &cfg.phi, lam.clone(), t.clone())?;
                    loop_suite(&mphi, &LoopParams::default(), out)?;
                    out.check("cross_construction", || cross_check_phi_construction(ty, &cfg.phi, lam, t.clone(), 1))?;
                }
            } else {
                out.result("loop_algebra", "structure constants are available for A_l^(1) only");
            }
            root_system(cfg, out)?;
        }
        _ => {}
    }
    Ok(())
}

/// A realization with every mode of degree 1 and 2 in `K` and
/// `theta = kappa a / 2`, which is never in `kappa a Z`.
fn generic_realization(kind: &HeisenbergKind, a: &Scalar, t: &Truncation) -> Result<DiagonalRealization> {
    let theta: BTreeMap<Label, Scalar> = kind
        .modes(t.max_delta_degree.min(2))
        .into_iter()
        .map(|m| (m, diagonal::mode_kappa(m) * a / int(2)))
        .collect();
    DiagonalRealization::new(kind.clone(), theta, a.clone(), t.clone(), BTreeMap::new())
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ProbeParams {
    inner: Inner,
    theta: BTreeMap<Label, String>,
    y_choice: BTreeMap<Label, Sign>,
    count: usize,
    search_bound: i64,
}

impl Default for ProbeParams {
    fn default() -> Self {
        Self {
            inner: Inner::default(),
            theta: BTreeMap::new(),
            y_choice: BTreeMap::new(),
            count: 10,
            search_bound: 20,
        }
    }
}

/// A random nonzero homogeneous vector, off the strip when the window allows.
pub fn random_homogeneous<D: InductionData>(
    m: &InducedModule<D>,
    rng: &mut ChaCha8Rng,
) -> LinComb<LoopBasis<D::Inner>> {
    let dims = m.weight_dimensions();
    let off: Vec<&Weight> = dims.keys().filter(|(beta, _)| beta.iter().any(|c| *c != 0)).collect();
    let pool: Vec<&Weight> = if off.is_empty() { dims.keys().collect() } else { off };
    let w = pool[rng.gen_range(0..pool.len())];
    let space = m.weight_space(w);
    loop {
        let v = LinComb::from_terms(space.iter().map(|b| (b.clone(), int(rng.gen_range(-3..=3)))));
        if !v.is_zero() {
            return v;
        }
    }
}

/// Probes `count` random vectors and replays each transcript.
pub fn probe_suite<D: InductionData>(
    m: &InducedModule<D>,
    count: usize,
    search_bound: i64,
    rng: &mut ChaCha8Rng,
    out: &mut Outcome,
) -> Result<()> {
    let mut transcripts = Vec::new();
    let mut steps_total = 0;
    let outcome = (|| {
        for idx in 0..count {
            let w = random_homogeneous(m, rng);
            let r = irreducibility_probe(m, &w, search_bound)?;
            if replay(m, &r)? != r.strip_element {
                return Err(Error::CheckFailed(format!("replay of probe {idx} on {w} reached a different vector")));
            }
            if r.strip_element.is_zero() || r.strip_element.support().any(|b| !m.in_strip(b)) {
                return Err(Error::CheckFailed(format!("probe {idx} on {w} did not end at a nonzero strip vector")));
            }
            steps_total += r.steps.len();
            transcripts.push(json!({
                "start": r.start.to_string(),
                "start_weight": weight_str(&r.start_weight),
                "steps": r.steps,
                "strip_element": r.strip_element.to_string(),
            }));
        }
        Ok(count)
    })();
    out.result("transcripts", transcripts);
    out.result("steps_total", steps_total);
    out.check("probe", || outcome)
}

fn probe(cfg: &JobConfig, out: &mut Outcome) -> Result<()> {
    let p: ProbeParams = cfg.params()?;
    let ty = cfg.algebra()?.affine()?;
    let lam = lambda(cfg, &ty)?;
    let t = cfg.truncation.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    out.result("inner", p.inner);
    match p.inner {
        Inner::PhiImaginary => {
            let m = build_m_phi_lambda(ty, &cfg.phi, lam, t)?;
            probe_suite(&m, p.count, p.search_bound, &mut rng, out)
        }
        Inner::PhiVerma => {
            let v = PhiVermaModule::new(HeisenbergKind::Loop(ty), cfg.phi.clone(), lam.c.clone(), t.clone())?;
            let m = build_generalized_loop(lam, v, t)?;
            probe_suite(&m, p.count, p.search_bound, &mut rng, out)
        }
        Inner::Realization => {
            let lp = LoopParams { theta: p.theta.clone(), y_choice: p.y_choice.clone(), ..LoopParams::default() };
            let v = lp.realization(ty, lam.c.clone(), &t)?;
            let m = build_generalized_loop(lam, v, t)?;
            probe_suite(&m, p.count, p.search_bound, &mut rng, out)
        }
    }
}
