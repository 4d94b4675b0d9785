//! Subgroup membership oracles, empirical quasiconvexity, and the derived
//! kernel / equalizer / fixed-subgroup / centralizer pipelines.
//!
//! A subgroup is represented purely as a membership test over an ambient
//! model.  All geometry — distance to the subgroup, subgroup balls — is
//! derived from the test by breadth-first search in the ambient word metric,
//! so the answers are independent of the automaton machinery the oracles
//! are used to measure.

use crate::constructions::{induced_structure, product_structure, ConstructionError};
use crate::fsa::{difference, union, Automaton, ConvolutionAlphabet, Word};
use crate::groups::{DistanceOracle, Element, GroupError, GroupKind, GroupModel};
use crate::homs::GroupHomomorphism;
use crate::report::{CheckReport, Witness};
use crate::structures::{AutomaticStructure, EquivalenceMode, StructureError, SweepOptions};
use serde::Serialize;
use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Node budget for any single distance search.
const SEARCH_BUDGET: usize = 200_000;
/// Node cap for ball enumerations inside pipelines.
const BALL_CAP: usize = 500_000;

#[derive(Debug, Error)]
pub enum SubgroupError {
    /// A pipeline was called on mismatched or unsuitable inputs.
    #[error("pipeline precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Hom(#[from] crate::homs::HomError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
}

/// A subgroup of an ambient model, given by a membership test.
///
/// Distances discovered by [`distance_to`](Self::distance_to) are cached, so
/// one oracle should be reused across a whole sweep.
pub struct SubgroupOracle {
    ambient: GroupModel,
    name: String,
    test: Box<dyn Fn(&Element) -> bool>,
    /// Exact distances discovered by earlier searches.
    found: RefCell<BTreeMap<Element, u32>>,
    /// Largest cap at which a search from this element found nothing.
    missed: RefCell<BTreeMap<Element, u32>>,
}

/// Distinct non-identity marked images: the steps of the ambient metric.
fn step_images(model: &GroupModel) -> Vec<Element> {
    let id = model.identity();
    let mut out: Vec<Element> = Vec::new();
    for s in model.alphabet().symbols() {
        let img = model.evaluate_symbol(s);
        if *img != id && !out.contains(img) {
            out.push(img.clone());
        }
    }
    out
}

impl SubgroupOracle {
    pub fn new(
        ambient: GroupModel,
        name: impl Into<String>,
        test: impl Fn(&Element) -> bool + 'static,
    ) -> Self {
        SubgroupOracle {
            ambient,
            name: name.into(),
            test: Box::new(test),
            found: RefCell::new(BTreeMap::new()),
            missed: RefCell::new(BTreeMap::new()),
        }
    }

    /// The whole group as a subgroup of itself.
    pub fn whole(ambient: GroupModel) -> Self {
        SubgroupOracle::new(ambient, "G", |_| true)
    }

    /// The trivial subgroup.
    pub fn trivial(ambient: GroupModel) -> Self {
        let id = ambient.identity();
        SubgroupOracle::new(ambient, "1", move |e| *e == id)
    }

    /// The cyclic subgroup generated by `g`, materialized up to `max_power`.
    /// Membership outside that range of powers answers `false`.
    pub fn cyclic(ambient: GroupModel, g: &Element, max_power: u32) -> Self {
        let mut members: BTreeSet<Element> = BTreeSet::new();
        let mut fwd = ambient.identity();
        let mut bwd = ambient.identity();
        let ginv = ambient.invert(g);
        for _ in 0..=max_power {
            members.insert(fwd.clone());
            members.insert(bwd.clone());
            fwd = ambient.multiply(&fwd, g);
            bwd = ambient.multiply(&bwd, &ginv);
        }
        let name = format!("⟨{}⟩", ambient.render_element(g));
        SubgroupOracle::new(ambient, name, move |e| members.contains(e))
    }

    /// The kernel of a homomorphism, by direct evaluation.
    pub fn kernel_of(phi: &GroupHomomorphism) -> Self {
        let phi = phi.clone();
        let id = phi.target().identity();
        SubgroupOracle::new(phi.source().clone(), "ker", move |e| {
            phi.apply(e).map(|i| i == id).unwrap_or(false)
        })
    }

    /// The equalizer `{x : xφ = xψ}` of two homomorphisms with the same
    /// source and target.
    pub fn equalizer_of(
        phi: &GroupHomomorphism,
        psi: &GroupHomomorphism,
    ) -> Result<Self, SubgroupError> {
        if phi.source() != psi.source() || phi.target() != psi.target() {
            return Err(SubgroupError::Precondition(
                "equalizer needs two homomorphisms with the same source and target".into(),
            ));
        }
        let (phi, psi) = (phi.clone(), psi.clone());
        Ok(SubgroupOracle::new(
            phi.source().clone(),
            "eq",
            move |e| match (phi.apply(e), psi.apply(e)) {
                (Ok(a), Ok(b)) => a == b,
                _ => false,
            },
        ))
    }

    /// The fixed subgroup `{x : xφ = x}` of an endomorphism.
    pub fn fixed_of(phi: &GroupHomomorphism) -> Result<Self, SubgroupError> {
        if phi.source() != phi.target() {
            return Err(SubgroupError::Precondition(
                "fixed subgroup needs an endomorphism".into(),
            ));
        }
        let phi = phi.clone();
        Ok(SubgroupOracle::new(phi.source().clone(), "fix", move |e| {
            phi.apply(e).map(|i| i == *e).unwrap_or(false)
        }))
    }

    /// The centralizer of a finite set of elements.
    pub fn centralizer_of(ambient: GroupModel, elements: &[Element]) -> Self {
        let us: Vec<Element> = elements.to_vec();
        let rendered: Vec<String> = us.iter().map(|u| ambient.render_element(u)).collect();
        let name = format!("C({})", rendered.join(","));
        let m = ambient.clone();
        SubgroupOracle::new(ambient, name, move |e| {
            us.iter().all(|u| m.multiply(e, u) == m.multiply(u, e))
        })
    }

    /// The image of a homomorphism, materialized over the source ball of the
    /// given radius.  Membership outside the materialized image answers
    /// `false`, so pick the radius generously for the sweep at hand.
    pub fn image_of(phi: &GroupHomomorphism, radius: u32) -> Result<Self, SubgroupError> {
        let oracle = DistanceOracle::new(phi.source());
        let mut members: BTreeSet<Element> = BTreeSet::new();
        for (e, _) in oracle.ball(radius, BALL_CAP)? {
            members.insert(phi.apply(&e)?);
        }
        let name = format!("im(≤{radius})");
        Ok(SubgroupOracle::new(phi.target().clone(), name, move |e| {
            members.contains(e)
        }))
    }

    /// The graph `{(x, xφ)}` inside a product-of-convolution model whose left
    /// factor is φ's source and whose right factor evaluates in φ's target.
    pub fn graph_of(ambient: &GroupModel, phi: &GroupHomomorphism) -> Result<Self, SubgroupError> {
        require_product(ambient)?;
        let phi = phi.clone();
        Ok(SubgroupOracle::new(
            ambient.clone(),
            "graph",
            move |e| match e {
                Element::Pair(l, r) => phi.apply(l).map(|i| i == **r).unwrap_or(false),
                _ => false,
            },
        ))
    }

    /// The left factor `G × {1}` of a product model.
    pub fn left_factor(ambient: &GroupModel) -> Result<Self, SubgroupError> {
        let (_, kr) = require_product(ambient)?;
        let idr = kr.identity();
        Ok(SubgroupOracle::new(ambient.clone(), "G×{1}", move |e| {
            matches!(e, Element::Pair(_, r) if **r == idr)
        }))
    }

    /// The diagonal `{(x, x)}` of a product model.
    pub fn diagonal(ambient: &GroupModel) -> Result<Self, SubgroupError> {
        require_product(ambient)?;
        Ok(SubgroupOracle::new(ambient.clone(), "Δ", |e| {
            matches!(e, Element::Pair(l, r) if l == r)
        }))
    }

    /// Intersection of two oracles over the same ambient model.
    pub fn intersection(self, other: SubgroupOracle) -> Result<Self, SubgroupError> {
        if self.ambient != other.ambient {
            return Err(SubgroupError::Precondition(
                "intersection needs subgroups of the same ambient model".into(),
            ));
        }
        let name = format!("{}∩{}", self.name, other.name);
        let (ta, tb) = (self.test, other.test);
        Ok(SubgroupOracle::new(self.ambient, name, move |e| {
            ta(e) && tb(e)
        }))
    }

    pub fn ambient(&self) -> &GroupModel {
        &self.ambient
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn contains(&self, e: &Element) -> bool {
        (self.test)(e)
    }

    /// Distance from `x` to the subgroup in the ambient word metric:
    /// breadth-first search from `x`, testing membership at every node,
    /// giving up past `cap` (or when the node budget is hit).
    pub fn distance_to(&self, x: &Element, cap: u32) -> Option<u32> {
        if self.contains(x) {
            return Some(0);
        }
        if let Some(&d) = self.found.borrow().get(x) {
            return (d <= cap).then_some(d);
        }
        if let Some(&c) = self.missed.borrow().get(x) {
            if cap <= c {
                return None;
            }
        }
        let steps = step_images(&self.ambient);
        let mut visited: BTreeSet<Element> = BTreeSet::new();
        visited.insert(x.clone());
        let mut frontier = vec![x.clone()];
        let mut truncated = false;
        for d in 1..=cap {
            let mut next = Vec::new();
            'layer: for p in &frontier {
                for s in &steps {
                    let q = self.ambient.multiply(p, s);
                    if !visited.insert(q.clone()) {
                        continue;
                    }
                    if self.contains(&q) {
                        self.found.borrow_mut().insert(x.clone(), d);
                        return Some(d);
                    }
                    next.push(q);
                    if visited.len() > SEARCH_BUDGET {
                        truncated = true;
                        break 'layer;
                    }
                }
            }
            if truncated || next.is_empty() {
                break;
            }
            frontier = next;
        }
        if !truncated {
            let mut missed = self.missed.borrow_mut();
            let best = missed.entry(x.clone()).or_insert(0);
            *best = (*best).max(cap);
        }
        None
    }

    /// The subgroup's intersection with the ambient ball, in ascending
    /// distance order.
    pub fn ball(&self, radius: u32, node_cap: usize) -> Result<Vec<Element>, GroupError> {
        let oracle = DistanceOracle::new(&self.ambient);
        Ok(oracle
            .ball(radius, node_cap)?
            .into_iter()
            .filter(|(e, _)| self.contains(e))
            .map(|(e, _)| e)
            .collect())
    }
}

fn require_product(ambient: &GroupModel) -> Result<(GroupKind, GroupKind), SubgroupError> {
    match ambient.kind() {
        GroupKind::Product(l, r) => Ok(((**l).clone(), (**r).clone())),
        _ => Err(SubgroupError::Precondition(
            "this subgroup lives in a product model".into(),
        )),
    }
}

/// Worst prefix-point distance to `h` over every word of `s`'s language (up
/// to `max_len`) that ends inside `h`.  A constant bound is the empirical
/// quasiconvexity constant; growth across the trace window is a failure.
pub fn quasiconvexity(
    s: &AutomaticStructure,
    h: &SubgroupOracle,
    max_len: usize,
) -> Result<CheckReport, StructureError> {
    if h.ambient() != s.group() {
        return Err(StructureError::Unsupported(
            "the subgroup oracle is over a different model than the structure".into(),
        ));
    }
    let probes: Vec<Word> = s
        .words_up_to(max_len)?
        .into_iter()
        .filter(|w| h.contains(&s.group().evaluate(w)))
        .collect();
    quasiconvexity_over(s, h, &probes, max_len)
}

/// Core sweep over an explicit probe set (words of `s`'s language whose
/// endpoints lie in `h`).  Pipelines that cannot afford to enumerate a whole
/// product language call this with probes built by endpoint pairing.
pub(crate) fn quasiconvexity_over(
    s: &AutomaticStructure,
    h: &SubgroupOracle,
    probes: &[Word],
    max_len: usize,
) -> Result<CheckReport, StructureError> {
    struct Worst {
        value: u32,
        word: String,
        prefix: u32,
        point: String,
    }
    let model = s.group();
    let name = format!("quasiconvexity[{}]", h.name());
    let cap = (max_len + 2) as u32;
    let mut best_at = vec![0u32; max_len + 1];
    let mut worst: Option<Worst> = None;
    let mut capped = false;
    for w in probes {
        debug_assert!(s.accepts(w), "probe words must be accepted");
        debug_assert!(h.contains(&model.evaluate(w)), "probe endpoints must lie in the subgroup");
        let t = s.trace(w);
        let bucket = w.len().min(max_len);
        for n in 0..=w.len() {
            let d = match h.distance_to(t.point(n), cap) {
                Some(d) => d,
                None => {
                    capped = true;
                    cap + 1
                }
            };
            best_at[bucket] = best_at[bucket].max(d);
            if worst.as_ref().map_or(d > 0, |b| d > b.value) {
                worst = Some(Worst {
                    value: d,
                    word: model.render_word(w),
                    prefix: n as u32,
                    point: model.render_element(t.point(n)),
                });
            }
        }
    }

    // The sweep reads every probe from the identity.  Distances are
    // left-invariant, so translating a probe by a subgroup element cannot
    // change any measured distance; spot-check that on a few translates
    // rather than assuming it.
    let mut translates_checked = 0usize;
    if let Some(w) = probes.first() {
        let sample: Vec<Element> = h
            .ball(2, 10_000)
            .unwrap_or_default()
            .into_iter()
            .filter(|e| *e != model.identity())
            .take(2)
            .collect();
        let t = s.trace(w);
        for hh in &sample {
            for n in (0..=w.len()).step_by((w.len() / 3).max(1)) {
                let moved = model.multiply(hh, t.point(n));
                assert_eq!(
                    h.distance_to(&moved, cap),
                    h.distance_to(t.point(n), cap),
                    "translating by a subgroup element must preserve the distance"
                );
                translates_checked += 1;
            }
        }
    }

    let trace = crate::structures::checks::prefix_max_trace(&best_at, max_len);
    let value = trace.points.last().map_or(0.0, |&(_, v)| v);
    let mut report = if trace.looks_divergent() {
        let b = worst.expect("a divergent trace implies a nonzero distance");
        CheckReport::failure(
            &name,
            Witness::SubgroupPoint {
                word: b.word,
                prefix: b.prefix,
                point: b.point,
                distance: b.value as f64,
            },
        )
    } else {
        CheckReport::constant(&name, value, max_len as u32)
    };
    report = report.with_trace(trace).with_note(format!(
        "{} qualifying words measured to length {max_len}; basepoint translation invariance spot-checked on {translates_checked} points",
        probes.len()
    ));
    if capped {
        report = report.with_note(format!(
            "distance cap {cap} was hit; capped values are lower bounds"
        ));
    }
    Ok(report)
}

/// Outcome of a subgroup pipeline: the subgroup's ball as explicit elements
/// plus the quasiconvexity evidence for its embedded copy.
#[derive(Clone, Debug, Serialize)]
pub struct SubgroupReport {
    pub subgroup: String,
    pub ball_radius: u32,
    pub ball: Vec<String>,
    pub quasiconvexity: CheckReport,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub auxiliary: Vec<CheckReport>,
}

/// Replace the structure's spellings of the identity by the empty word (the
/// kernel pipeline needs the second factor to spell `1` as `ε` and nothing
/// else).  Returns the possibly rebuilt structure and whether it changed.
fn normalize_identity_rep(
    s: AutomaticStructure,
    bound: usize,
) -> Result<(AutomaticStructure, bool), StructureError> {
    let id = s.group().identity();
    let reps = s.representatives_of(&id, bound)?;
    if reps.len() == 1 && reps[0].is_empty() {
        return Ok((s, false));
    }
    let alpha = s.group().alphabet().clone();
    let mut lang = s.language().clone();
    for w in reps.iter().filter(|w| !w.is_empty()) {
        lang = difference(&lang, &Automaton::literal(alpha.clone(), w))?;
    }
    lang = union(&lang, &Automaton::epsilon_language(alpha))?.minimize()?;
    let name = format!("{}+ε", s.name());
    let rebuilt = AutomaticStructure::new(name, s.group().clone(), lang)?;
    Ok((rebuilt, true))
}

/// Probe words `u ⋄ v` of a product structure, built by pairing each word
/// `u` of the left structure with the right structure's spellings of
/// `relate(uπ)`; pairs are kept when their endpoint lies in `h`.
fn paired_probes(
    left: &AutomaticStructure,
    right: &AutomaticStructure,
    prod: &AutomaticStructure,
    h: &SubgroupOracle,
    max_len: usize,
    relate: impl Fn(&Element) -> Option<Element>,
) -> Result<Vec<Word>, SubgroupError> {
    let ca = ConvolutionAlphabet::new(left.group().alphabet(), right.group().alphabet())
        .map_err(|e| StructureError::Fsa(e.into()))?;
    debug_assert_eq!(ca.alphabet(), prod.group().alphabet());
    let mut probes = Vec::new();
    for u in left.words_up_to(max_len)? {
        let gu = left.group().evaluate(&u);
        let Some(target) = relate(&gu) else { continue };
        for v in right.representatives_of(&target, max_len)? {
            let w = ca.convolve_words(&u, &v);
            if w.len() <= max_len
                && h.contains(&prod.group().evaluate(&w))
            {
                probes.push(w);
            }
        }
    }
    Ok(probes)
}

/// Kernel pipeline: present `Ker(φ)` as the subgroup `(G×{1}) ∩ graph(φ)`
/// of the product of `s1` with the structure induced along φ, measure its
/// quasiconvexity (and that of the two subgroups it intersects), and list
/// the kernel ball.
pub fn kernel_pipeline(
    phi: &GroupHomomorphism,
    s1: &AutomaticStructure,
    max_len: usize,
) -> Result<SubgroupReport, SubgroupError> {
    if phi.source() != s1.group() {
        return Err(SubgroupError::Precondition(
            "the structure must present the homomorphism's source".into(),
        ));
    }
    let (induced, induced_report) = induced_structure(s1, phi, max_len)?;
    let (induced, normalized) = normalize_identity_rep(induced, max_len)?;
    let prod = product_structure(s1, &induced)?;

    let graph = SubgroupOracle::graph_of(prod.group(), phi)?;
    let factor = SubgroupOracle::left_factor(prod.group())?;
    let kernel_graph = SubgroupOracle::graph_of(prod.group(), phi)?
        .intersection(SubgroupOracle::left_factor(prod.group())?)?;

    let id2 = induced.group().identity();
    let probes_kernel = paired_probes(s1, &induced, &prod, &kernel_graph, max_len, |g| {
        phi.apply(g).ok().filter(|i| *i == id2).map(|_| id2.clone())
    })?;
    let probes_graph =
        paired_probes(s1, &induced, &prod, &graph, max_len, |g| phi.apply(g).ok())?;
    let probes_factor =
        paired_probes(s1, &induced, &prod, &factor, max_len, |_| Some(id2.clone()))?;

    let mut q = quasiconvexity_over(&prod, &kernel_graph, &probes_kernel, max_len)?;
    if normalized {
        q = q.with_note("the induced structure was rebuilt to spell the identity as ε");
    }
    let q_graph = quasiconvexity_over(&prod, &graph, &probes_graph, max_len)?;
    let q_factor = quasiconvexity_over(&prod, &factor, &probes_factor, max_len)?;

    let ker = SubgroupOracle::kernel_of(phi);
    let ball = ker.ball(max_len as u32, BALL_CAP)?;
    Ok(SubgroupReport {
        subgroup: "kernel".into(),
        ball_radius: max_len as u32,
        ball: ball.iter().map(|e| s1.group().render_element(e)).collect(),
        quasiconvexity: q,
        auxiliary: vec![q_graph, q_factor, induced_report],
    })
}

/// Equalizer pipeline: present `Eq(φ,ψ)` inside the product of the target
/// structure with itself as `Δ ∩ {(xφ, xψ)}`, measure quasiconvexity of the
/// intersection (and of the diagonal alone), and list the equalizer ball.
pub fn equalizer_pipeline(
    phi: &GroupHomomorphism,
    psi: &GroupHomomorphism,
    s2: &AutomaticStructure,
    max_len: usize,
) -> Result<SubgroupReport, SubgroupError> {
    if phi.source() != psi.source() || phi.target() != psi.target() {
        return Err(SubgroupError::Precondition(
            "equalizer needs two homomorphisms with the same source and target".into(),
        ));
    }
    if s2.group() != phi.target() {
        return Err(SubgroupError::Precondition(
            "the structure must present the homomorphisms' target".into(),
        ));
    }
    let prod = product_structure(s2, s2)?;
    let diag = SubgroupOracle::diagonal(prod.group())?;

    // The image-of-(φ,ψ) subgroup {(xφ, xψ)}.  When either map is the
    // identity the test is direct; otherwise it is materialized over the
    // source ball.
    let (himg, himg_note) = if phi.is_identity() {
        (SubgroupOracle::graph_of(prod.group(), psi)?, None)
    } else if psi.is_identity() {
        let phi2 = phi.clone();
        let oracle = SubgroupOracle::new(prod.group().clone(), "graphᵀ", move |e| match e {
            Element::Pair(l, r) => phi2.apply(r).map(|i| i == **l).unwrap_or(false),
            _ => false,
        });
        (oracle, None)
    } else {
        let src = DistanceOracle::new(phi.source());
        let mut members: BTreeSet<Element> = BTreeSet::new();
        for (x, _) in src.ball(max_len as u32, BALL_CAP)? {
            members.insert(Element::Pair(
                Box::new(phi.apply(&x)?),
                Box::new(psi.apply(&x)?),
            ));
        }
        let oracle = SubgroupOracle::new(prod.group().clone(), "im(φ,ψ)", move |e| {
            members.contains(e)
        });
        let note = format!(
            "the image subgroup was materialized over the source ball of radius {max_len}"
        );
        (oracle, Some(note))
    };
    let delta_h = SubgroupOracle::diagonal(prod.group())?.intersection(himg)?;

    let same_endpoint = |g: &Element| Some(g.clone());
    let probes = paired_probes(s2, s2, &prod, &delta_h, max_len, same_endpoint)?;
    let probes_diag = paired_probes(s2, s2, &prod, &diag, max_len, same_endpoint)?;

    let mut q = quasiconvexity_over(&prod, &delta_h, &probes, max_len)?;
    if let Some(n) = himg_note {
        q = q.with_note(n);
    }
    let q_diag = quasiconvexity_over(&prod, &diag, &probes_diag, max_len)?;

    let eq = SubgroupOracle::equalizer_of(phi, psi)?;
    let ball = eq.ball(max_len as u32, BALL_CAP)?;
    Ok(SubgroupReport {
        subgroup: "equalizer".into(),
        ball_radius: max_len as u32,
        ball: ball
            .iter()
            .map(|e| phi.source().render_element(e))
            .collect(),
        quasiconvexity: q,
        auxiliary: vec![q_diag],
    })
}

/// Fixed-subgroup pipeline: the equalizer of the identity and φ, plus a
/// direct sweep of `Fix(φ)` inside the base structure (where unbounded
/// growth shows without product overhead) and a trivial self-equivalence
/// check of the structure.
pub fn fixed_pipeline(
    phi: &GroupHomomorphism,
    s: &AutomaticStructure,
    max_len: usize,
) -> Result<SubgroupReport, SubgroupError> {
    if phi.source() != phi.target() {
        return Err(SubgroupError::Precondition(
            "fixed subgroup needs an endomorphism".into(),
        ));
    }
    let id_hom = GroupHomomorphism::identity(s.group());
    let mut rep = equalizer_pipeline(&id_hom, phi, s, max_len)?;
    rep.subgroup = "fixed".into();

    let fix = SubgroupOracle::fixed_of(phi)?;
    let mut q_base = quasiconvexity(s, &fix, max_len)?;
    q_base.check = format!("{}[base]", q_base.check);
    rep.auxiliary.push(q_base);

    let eq_opts = SweepOptions::to_length(max_len.min(6));
    let mut self_eq = s.equivalence_check(s, EquivalenceMode::Synchronous, &eq_opts)?;
    self_eq.check = format!("{}[s=s]", self_eq.check);
    rep.auxiliary.push(self_eq);
    Ok(rep)
}

/// Centralizer pipeline: verify the two-sided fellow-traveller precondition,
/// then measure quasiconvexity of `C(U)` directly in the structure and
/// intersect the fixed balls of the inner automorphisms λ_u.
pub fn centralizer_pipeline(
    s: &AutomaticStructure,
    elements: &[Element],
    max_len: usize,
) -> Result<SubgroupReport, SubgroupError> {
    let pre_opts = SweepOptions::to_length(max_len.min(6));
    let mut pre = s.ft_check(&pre_opts, true)?;
    pre.check = format!("{}[precondition]", pre.check);
    if !pre.is_constant() {
        return Err(SubgroupError::Precondition(format!(
            "the two-sided fellow-traveller check failed at length {}; the centralizer argument needs it",
            pre_opts.max_len
        )));
    }

    let model = s.group().clone();
    let cent = SubgroupOracle::centralizer_of(model.clone(), elements);
    let q = quasiconvexity(s, &cent, max_len)?;
    let direct_ball = cent.ball(max_len as u32, BALL_CAP)?;

    // The centralizer of U is the intersection of the fixed subgroups of the
    // inner automorphisms λ_u; report each fixed pipeline and build the ball
    // as the intersection of their balls.
    let mut aux = vec![pre];
    let mut ball: Option<BTreeSet<Element>> = None;
    for u in elements {
        let lam = GroupHomomorphism::inner(&model, u)?;
        let fixed = fixed_pipeline(&lam, s, max_len.min(5))?;
        let mut fq = fixed.quasiconvexity;
        fq.check = format!("{}[λ_{}]", fq.check, model.render_element(u));
        aux.push(fq);
        let fix_ball: BTreeSet<Element> = SubgroupOracle::fixed_of(&lam)?
            .ball(max_len as u32, BALL_CAP)?
            .into_iter()
            .collect();
        ball = Some(match ball {
            None => fix_ball,
            Some(b) => b.intersection(&fix_ball).cloned().collect(),
        });
    }
    let ball: Vec<Element> = match ball {
        Some(b) => {
            let direct: BTreeSet<Element> = direct_ball.iter().cloned().collect();
            assert_eq!(
                b, direct,
                "the intersection of fixed balls must equal the directly tested centralizer ball"
            );
            direct_ball
        }
        // Empty U: the centralizer is the whole group.
        None => direct_ball,
    };

    Ok(SubgroupReport {
        subgroup: "centralizer".into(),
        ball_radius: max_len as u32,
        ball: ball.iter().map(|e| model.render_element(e)).collect(),
        quasiconvexity: q,
        auxiliary: aux,
    })
}
