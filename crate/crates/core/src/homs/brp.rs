//! Bounded-reduction sweeps: do image paths of accepted words stay within a
//! bounded distance of accepted representatives of their image elements?
//!
//! Three variants are measured, all exhaustively over a length window:
//!
//! * plain ([`GroupHomomorphism::check_brp`]): Hausdorff distance between the
//!   image of a word's path and the path of any target-language word with the
//!   same image endpoint;
//! * synchronous ([`GroupHomomorphism::check_sync_brp`]): the same pairs, but
//!   compared index-by-index (clamped past the end);
//! * fellow-traveller transfer ([`GroupHomomorphism::check_ft_brp`]): does a
//!   `p`-fellow-travelling concatenation triple map to a `q`-fellow-travelling
//!   triple of representatives, for some `q` independent of the triple?
//!
//! The basepoint is fixed at the identity: the oracle distance is constructed
//! left-invariant, so constants measured at 1 are the constants everywhere
//! (a sampled assertion of this reduction lives in the tests).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::fsa::{Symbol, Word};
use crate::groups::{DistanceOracle, Element, GroupKind, GroupModel};
use crate::report::{CheckReport, Witness};
use crate::structures::checks::prefix_max_trace;
use crate::structures::{AutomaticStructure, StructureError, SweepOptions};

use super::{GroupHomomorphism, HomError};

/// Which bounded-reduction property a report refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BrpVariant {
    Brp,
    SyncBrp,
    FtBrp,
}

/// Outcome of a bounded-reduction sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BrpReport {
    pub variant: BrpVariant,
    /// The input fellow-traveller constant (fellow-traveller variant only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(flatten)]
    pub report: CheckReport,
}

impl BrpReport {
    pub fn is_constant(&self) -> bool {
        self.report.is_constant()
    }

    pub fn constant_value(&self) -> Option<f64> {
        self.report.constant_value()
    }
}

/// Bounded search for target-language representatives of a given element.
///
/// The language is determinized once; per element a breadth-first word
/// enumeration runs over the automaton, pruned by the oracle distance to the
/// goal, and collects accepted words up to the minimal representative length
/// plus the structure's measured length-difference window.
struct CandidateIndex<'a> {
    model: &'a GroupModel,
    oracle: DistanceOracle<'a>,
    delta: Vec<BTreeMap<Symbol, usize>>,
    finals: Vec<bool>,
    initial: usize,
    empty_language: bool,
    /// Collect representatives this much longer than the shortest one.
    window: usize,
    /// Absolute length fallback when the metric-guided bound finds nothing.
    hard_depth: usize,
    max_candidates: usize,
    node_budget: usize,
    cache: BTreeMap<Element, Vec<Word>>,
    truncated: bool,
    notes: Vec<String>,
}

impl<'a> CandidateIndex<'a> {
    fn new(
        s2: &'a AutomaticStructure,
        max_len: usize,
        hard_depth: usize,
        max_candidates: usize,
    ) -> Result<Self, HomError> {
        let dfa = s2
            .language()
            .determinize()
            .map_err(StructureError::from)?
            .trim();
        let empty_language = dfa.num_states() == 0;
        let mut delta = vec![BTreeMap::new(); dfa.num_states().max(1)];
        for (q, s, r) in dfa.transition_list() {
            delta[q].insert(s, r);
        }
        let finals = (0..dfa.num_states().max(1))
            .map(|q| !empty_language && dfa.is_final(q))
            .collect();
        let mut notes = Vec::new();
        let ld = s2.length_difference_check(&SweepOptions::to_length(max_len))?;
        let window = match ld.constant_value() {
            Some(v) => v as usize,
            None => {
                notes.push(
                    "target length-difference constant did not stabilize; \
                     collecting representatives within window 4"
                        .to_string(),
                );
                4
            }
        };
        Ok(CandidateIndex {
            model: s2.group(),
            oracle: DistanceOracle::new(s2.group()),
            delta,
            finals,
            initial: if empty_language { 0 } else { dfa.initial() },
            empty_language,
            window,
            hard_depth,
            max_candidates,
            node_budget: 200_000,
            cache: BTreeMap::new(),
            truncated: false,
            notes,
        })
    }

    /// Accepted words evaluating to `g`, shortest first (memoized).
    fn candidates(&mut self, g: &Element) -> Vec<Word> {
        if let Some(hit) = self.cache.get(g) {
            return hit.clone();
        }
        let found = if self.empty_language {
            Vec::new()
        } else {
            let tight = self
                .oracle
                .distance_from_identity(g, self.hard_depth as u32 + 1)
                .map(|d| d as usize + self.window + 2);
            match tight {
                Some(t) if t < self.hard_depth => {
                    let out = self.search(g, t);
                    if out.is_empty() {
                        self.search(g, self.hard_depth)
                    } else {
                        out
                    }
                }
                _ => self.search(g, self.hard_depth),
            }
        };
        self.cache.insert(g.clone(), found.clone());
        found
    }

    fn search(&mut self, g: &Element, depth_bound: usize) -> Vec<Word> {
        let cap = depth_bound as u32 + 1;
        let mut out: Vec<Word> = Vec::new();
        let mut found_min: Option<usize> = None;
        let mut frontier: Vec<(usize, Element, Word)> =
            vec![(self.initial, self.model.identity(), Word::new())];
        let mut budget = self.node_budget;
        let mut depth = 0usize;
        while !frontier.is_empty() {
            for (q, h, w) in &frontier {
                if self.finals[*q] && h == g {
                    found_min.get_or_insert(w.len());
                    if out.len() < self.max_candidates {
                        out.push(w.clone());
                    } else {
                        self.truncated = true;
                    }
                }
            }
            let limit = match found_min {
                Some(m) => depth_bound.min(m + self.window),
                None => depth_bound,
            };
            if depth >= limit {
                break;
            }
            let remaining = (limit - depth - 1) as u32;
            let mut next = Vec::new();
            'expand: for (q, h, w) in frontier {
                for (&s, &r) in &self.delta[q] {
                    if budget == 0 {
                        self.truncated = true;
                        break 'expand;
                    }
                    budget -= 1;
                    let h2 = self.model.multiply(&h, self.model.evaluate_symbol(s));
                    if matches!(self.oracle.distance(&h2, g, cap), Some(d) if d <= remaining) {
                        let mut w2 = w.clone();
                        w2.push(s);
                        next.push((r, h2, w2));
                    }
                }
            }
            frontier = next;
            depth += 1;
        }
        out
    }

    fn take_notes(&mut self, skipped: usize) -> Vec<String> {
        let mut notes = std::mem::take(&mut self.notes);
        if self.truncated {
            notes.push(
                "representative search hit its node or candidate budget; \
                 constants are lower bounds"
                    .to_string(),
            );
        }
        if skipped > 0 {
            notes.push(format!(
                "{skipped} source words skipped: no target representative \
                 found within the search depth"
            ));
        }
        notes
    }
}

/// Largest synchronized-index distance between two point paths (clamped at
/// their ends), together with the index realizing it.
fn sync_gap(oracle: &DistanceOracle, a: &[Element], b: &[Element], cap: u32) -> (u32, u32) {
    let top = a.len().max(b.len()) - 1;
    let mut best = (0u32, 0u32);
    for n in 0..=top {
        let x = &a[n.min(a.len() - 1)];
        let y = &b[n.min(b.len() - 1)];
        let d = oracle.distance(x, y, cap).unwrap_or(cap + 1);
        if d > best.0 {
            best = (d, n as u32);
        }
    }
    best
}

/// One directed half of the Hausdorff distance between point sets: the
/// worst-served point of `from` and its distance to the set `to`.
fn sup_inf(oracle: &DistanceOracle, from: &[Element], to: &[Element], cap: u32) -> (u32, u32) {
    let mut best = (0u32, 0u32);
    for (i, x) in from.iter().enumerate() {
        let d = to
            .iter()
            .filter_map(|y| oracle.distance(x, y, cap))
            .min()
            .unwrap_or(cap + 1);
        if d > best.0 {
            best = (d, i as u32);
        }
    }
    best
}

/// Prefix path of the concatenation of two already-traced paths.
fn concat_path(model: &GroupModel, p1: &[Element], p2: &[Element]) -> Vec<Element> {
    let e1 = p1.last().expect("paths contain their base point").clone();
    let mut out = p1.to_vec();
    for q in &p2[1..] {
        out.push(model.multiply(&e1, q));
    }
    out
}

fn verdict_report(
    check: &str,
    best_at: &[u32],
    max_bound: usize,
    worst: Option<(u32, Witness)>,
    notes: Vec<String>,
) -> CheckReport {
    let trace = prefix_max_trace(best_at, max_bound);
    let value = best_at.iter().copied().max().unwrap_or(0);
    let mut report = if trace.looks_divergent() {
        let witness = worst
            .map(|(_, w)| w)
            .unwrap_or(Witness::Note { note: "no witness recorded".into() });
        CheckReport::failure(check, witness)
    } else {
        CheckReport::constant(check, value as f64, max_bound as u32)
    }
    .with_trace(trace);
    for n in notes {
        report = report.with_note(n);
    }
    report
}

impl GroupHomomorphism {
    fn validate_structures(
        &self,
        s1: &AutomaticStructure,
        s2: &AutomaticStructure,
    ) -> Result<(), HomError> {
        if s1.group() != self.source() {
            return Err(HomError::ModelMismatch(format!(
                "structure {:?} is not over the source model",
                s1.name()
            )));
        }
        if s2.group() != self.target() {
            return Err(HomError::ModelMismatch(format!(
                "structure {:?} is not over the target model",
                s2.name()
            )));
        }
        Ok(())
    }

    fn search_depth(&self, max_len: usize, extra: usize) -> usize {
        let v = self.displacement(32).max(1) as usize;
        max_len * v + extra + 4
    }

    /// Hausdorff variant: for every source word `α` up to `max_len` and every
    /// target word `β` representing the image of `α`'s endpoint, measure the
    /// Hausdorff distance between the image of `α`'s path and `β`'s path.
    pub fn check_brp(
        &self,
        s1: &AutomaticStructure,
        s2: &AutomaticStructure,
        max_len: usize,
    ) -> Result<BrpReport, HomError> {
        self.validate_structures(s1, s2)?;
        let words = s1.words_up_to(max_len)?;
        let mut index = CandidateIndex::new(s2, max_len, self.search_depth(max_len, 0), 64)?;
        let oracle = DistanceOracle::new(s2.group());
        let cap = 2 * index.hard_depth as u32 + 8;
        let mut best_at = vec![0u32; max_len + 1];
        let mut worst: Option<(u32, Witness)> = None;
        let mut skipped = 0usize;
        for alpha in &words {
            let image_points = self.image_path(alpha);
            let g = image_points.last().unwrap().clone();
            let candidates = index.candidates(&g);
            if candidates.is_empty() {
                skipped += 1;
                continue;
            }
            for beta in &candidates {
                let bpath = s2.trace(beta);
                let fwd = sup_inf(&oracle, &image_points, bpath.points(), cap);
                let bwd = sup_inf(&oracle, bpath.points(), &image_points, cap);
                let (value, at) = fwd.max(bwd);
                best_at[alpha.len()] = best_at[alpha.len()].max(value);
                if worst.as_ref().is_none_or(|(v, _)| value > *v) {
                    worst = Some((
                        value,
                        Witness::WordPair {
                            left: self.source().render_word(alpha),
                            right: s2.group().render_word(beta),
                            offset: String::new(),
                            prefix: at,
                            distance: value as f64,
                        },
                    ));
                }
            }
        }
        let notes = index.take_notes(skipped);
        Ok(BrpReport {
            variant: BrpVariant::Brp,
            p: None,
            report: verdict_report("brp", &best_at, max_len, worst, notes),
        })
    }

    /// Synchronous variant: the same pairs as [`check_brp`], compared
    /// index-by-index along the two paths (shorter path clamped at its end).
    ///
    /// [`check_brp`]: GroupHomomorphism::check_brp
    pub fn check_sync_brp(
        &self,
        s1: &AutomaticStructure,
        s2: &AutomaticStructure,
        max_len: usize,
    ) -> Result<BrpReport, HomError> {
        self.validate_structures(s1, s2)?;
        let words = s1.words_up_to(max_len)?;
        let mut index = CandidateIndex::new(s2, max_len, self.search_depth(max_len, 0), 64)?;
        let oracle = DistanceOracle::new(s2.group());
        let cap = 2 * index.hard_depth as u32 + 8;
        let mut best_at = vec![0u32; max_len + 1];
        let mut worst: Option<(u32, Witness)> = None;
        let mut skipped = 0usize;
        for alpha in &words {
            let image_points = self.image_path(alpha);
            let g = image_points.last().unwrap().clone();
            let candidates = index.candidates(&g);
            if candidates.is_empty() {
                skipped += 1;
                continue;
            }
            for beta in &candidates {
                let bpath = s2.trace(beta);
                let (value, at) = sync_gap(&oracle, &image_points, bpath.points(), cap);
                best_at[alpha.len()] = best_at[alpha.len()].max(value);
                if worst.as_ref().is_none_or(|(v, _)| value > *v) {
                    worst = Some((
                        value,
                        Witness::WordPair {
                            left: self.source().render_word(alpha),
                            right: s2.group().render_word(beta),
                            offset: String::new(),
                            prefix: at,
                            distance: value as f64,
                        },
                    ));
                }
            }
        }
        let notes = index.take_notes(skipped);
        Ok(BrpReport {
            variant: BrpVariant::SyncBrp,
            p: None,
            report: verdict_report("sync-brp", &best_at, max_len, worst, notes),
        })
    }

    /// Fellow-traveller transfer: for every triple `u₁, u₂, u₃` of source
    /// words such that the concatenation `u₁u₂` and `u₃` fellow-travel
    /// within `p` *and end at the same element*, measure how far apart
    /// representative triples of the images travel.  Reports the largest
    /// such gap `q`, or divergence.
    ///
    /// "Fellow travel" is read here as meeting fellow travel (equal
    /// endpoints); a note records the interpretation.
    pub fn check_ft_brp(
        &self,
        s1: &AutomaticStructure,
        s2: &AutomaticStructure,
        p: u32,
        max_len: usize,
    ) -> Result<BrpReport, HomError> {
        self.validate_structures(s1, s2)?;
        let words = s1.words_up_to(max_len)?;
        let src_model = self.source();
        let src_oracle = DistanceOracle::new(src_model);
        let mut index = CandidateIndex::new(s2, max_len, self.search_depth(2 * max_len, 0), 8)?;
        let tgt_oracle = DistanceOracle::new(s2.group());
        let cap = 2 * index.hard_depth as u32 + 8;
        let src_cap = 2 * max_len as u32 + 8;

        // Trace every source word once and index by endpoint.
        let traced: Vec<(Vec<Element>, Element)> = words
            .iter()
            .map(|w| {
                let t = s1.trace(w);
                let end = t.endpoint().clone();
                (t.points().to_vec(), end)
            })
            .collect();
        let mut by_endpoint: BTreeMap<&Element, Vec<usize>> = BTreeMap::new();
        for (i, (_, end)) in traced.iter().enumerate() {
            by_endpoint.entry(end).or_default().push(i);
        }

        let mut best_at = vec![0u32; 2 * max_len + 1];
        let mut worst: Option<(u32, Witness)> = None;
        let mut skipped = 0usize;
        for (i1, u1) in words.iter().enumerate() {
            for (i2, u2) in words.iter().enumerate() {
                let cpath = concat_path(src_model, &traced[i1].0, &traced[i2].0);
                let end = cpath.last().unwrap();
                let Some(thirds) = by_endpoint.get(end) else {
                    continue;
                };
                for &i3 in thirds {
                    let (gap, _) = sync_gap(&src_oracle, &cpath, &traced[i3].0, src_cap);
                    if gap > p {
                        continue;
                    }
                    let u3 = &words[i3];
                    let c1 = index.candidates(&self.apply_word(u1));
                    let c2 = index.candidates(&self.apply_word(u2));
                    let c3 = index.candidates(&self.apply_word(u3));
                    if c1.is_empty() || c2.is_empty() || c3.is_empty() {
                        skipped += 1;
                        continue;
                    }
                    let bucket = (u1.len() + u2.len()).max(u3.len());
                    for w1 in &c1 {
                        let p1 = s2.trace(w1);
                        for w2 in &c2 {
                            let p2 = s2.trace(w2);
                            let ipath = concat_path(s2.group(), p1.points(), p2.points());
                            for w3 in &c3 {
                                let p3 = s2.trace(w3);
                                let (q, at) = sync_gap(&tgt_oracle, &ipath, p3.points(), cap);
                                best_at[bucket] = best_at[bucket].max(q);
                                if worst.as_ref().is_none_or(|(v, _)| q > *v) {
                                    worst = Some((
                                        q,
                                        Witness::TriplePair {
                                            source: [
                                                src_model.render_word(u1),
                                                src_model.render_word(u2),
                                                src_model.render_word(u3),
                                            ],
                                            image: [
                                                s2.group().render_word(w1),
                                                s2.group().render_word(w2),
                                                s2.group().render_word(w3),
                                            ],
                                            prefix: at,
                                            distance: q as f64,
                                        },
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
        let mut notes = index.take_notes(skipped);
        notes.push(
            "fellow travel is interpreted as meeting fellow travel \
             (equal endpoints required)"
                .to_string(),
        );
        Ok(BrpReport {
            variant: BrpVariant::FtBrp,
            p: Some(p),
            report: verdict_report("ft-brp", &best_at, 2 * max_len, worst, notes),
        })
    }

    /// Gromov-product transfer on free models: over all ball pairs whose
    /// directions split immediately (product 0), how long do the image
    /// directions travel together?  Growth across radii signals failure of
    /// the hyperbolic form of bounded reduction.
    pub fn gromov_brp_check(&self, radius: usize) -> Result<CheckReport, HomError> {
        let free = |m: &GroupModel| matches!(m.kind(), GroupKind::Free { .. });
        if !free(self.source()) || !free(self.target()) {
            return Err(HomError::Unsupported(
                "the Gromov-product transfer check needs free source and target".into(),
            ));
        }
        let src_oracle = DistanceOracle::new(self.source());
        let tgt_oracle = DistanceOracle::new(self.target());
        let ball = src_oracle.ball(radius as u32, 2_000_000)?;
        let v = self.displacement(32).max(1);
        let cap = 2 * (radius as u32) * v + 8;
        let mut best_at = vec![0u32; radius + 1];
        let mut worst: Option<(u32, Witness)> = None;
        let mut images: Vec<Element> = Vec::with_capacity(ball.len());
        for (u, _) in &ball {
            images.push(self.apply(u)?);
        }
        for (i, (u, du)) in ball.iter().enumerate() {
            for (j, (v_el, dv)) in ball.iter().enumerate() {
                if src_oracle.gromov_product(u, v_el, cap) != Some(0.0) {
                    continue;
                }
                let gp = tgt_oracle
                    .gromov_product(&images[i], &images[j], cap)
                    .unwrap_or(cap as f64);
                let value = gp.ceil() as u32;
                let bucket = (*du).max(*dv) as usize;
                best_at[bucket] = best_at[bucket].max(value);
                if worst.as_ref().is_none_or(|(w, _)| value > *w) {
                    worst = Some((
                        value,
                        Witness::WordPair {
                            left: self.source().render_element(u),
                            right: self.source().render_element(v_el),
                            offset: String::new(),
                            prefix: 0,
                            distance: gp,
                        },
                    ));
                }
            }
        }
        let report = verdict_report(
            "gromov-brp",
            &best_at,
            radius,
            worst,
            vec![
                "pairs with source product 0; value is the image product; \
                 witness words are the source pair"
                    .to_string(),
            ],
        );
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::super::hom_of;
    use super::*;
    use crate::groups::word_of;

    fn z_structure() -> AutomaticStructure {
        let z = GroupModel::free_abelian(1).unwrap();
        AutomaticStructure::shortlex("z", z).unwrap()
    }

    fn f2_structure() -> AutomaticStructure {
        let f2 = GroupModel::free(2).unwrap();
        AutomaticStructure::shortlex("f2", f2).unwrap()
    }

    #[test]
    fn identity_sync_constant_is_zero() {
        let s = z_structure();
        let id = GroupHomomorphism::identity(s.group());
        let r = id.check_sync_brp(&s, &s, 6).unwrap();
        assert!(r.is_constant(), "{r:?}");
        assert_eq!(r.constant_value(), Some(0.0));
        assert_eq!(r.variant, BrpVariant::SyncBrp);
    }

    #[test]
    fn doubling_on_z_fails_synchronously_with_linear_trace() {
        let s = z_structure();
        let phi = hom_of(s.group(), s.group(), &[("a", "aa")]);
        let r = phi.check_sync_brp(&s, &s, 8).unwrap();
        assert!(!r.is_constant(), "{r:?}");
        assert_eq!(
            r.report.growth_trace.points,
            vec![(2, 2.0), (4, 4.0), (6, 6.0), (8, 8.0)]
        );
        let Some(Witness::WordPair { distance, .. }) = r.report.witness() else {
            panic!("expected a word-pair witness: {r:?}");
        };
        assert_eq!(*distance, 8.0);
    }

    #[test]
    fn doubling_on_z_keeps_plain_hausdorff_bounded() {
        // The image path only ever hits even points, but the even points are
        // 1-dense along the representative, so the unsynchronized distance
        // stays at 1 even though the synchronous variant diverges.
        let s = z_structure();
        let phi = hom_of(s.group(), s.group(), &[("a", "aa")]);
        let r = phi.check_brp(&s, &s, 8).unwrap();
        assert!(r.is_constant(), "{r:?}");
        assert_eq!(r.constant_value(), Some(1.0));
    }

    #[test]
    fn sync_constant_dominates_plain_constant() {
        let s = f2_structure();
        let a = s.group().evaluate_str("a").unwrap();
        let la = GroupHomomorphism::inner(s.group(), &a).unwrap();
        let plain = la.check_brp(&s, &s, 3).unwrap().constant_value().unwrap();
        let sync = la.check_sync_brp(&s, &s, 3).unwrap().constant_value().unwrap();
        assert!(sync >= plain, "sync {sync} < plain {plain}");
    }

    #[test]
    fn conjugation_on_f2_is_synchronously_bounded() {
        let s = f2_structure();
        let a = s.group().evaluate_str("a").unwrap();
        let la = GroupHomomorphism::inner(s.group(), &a).unwrap();
        let r = la.check_sync_brp(&s, &s, 4).unwrap();
        assert!(r.is_constant(), "{r:?}");
        let v = r.constant_value().unwrap();
        assert!((1.0..=3.0).contains(&v), "unexpected constant {v}");
    }

    #[test]
    fn coordinate_projection_on_z2_blocks_is_exact() {
        let z = GroupModel::free_abelian(1).unwrap();
        let z_b = GroupModel::free_abelian_marked(1, &[("b", vec![1]), ("B", vec![-1])]).unwrap();
        let zz = GroupModel::product_union(&z, &z_b).unwrap();
        let s = AutomaticStructure::shortlex("zz", zz).unwrap();
        let proj = hom_of(s.group(), s.group(), &[("a", "a"), ("b", "")]);
        let plain = proj.check_brp(&s, &s, 6).unwrap();
        assert!(plain.is_constant(), "{plain:?}");
        assert_eq!(plain.constant_value(), Some(0.0));
        let sync = proj.check_sync_brp(&s, &s, 6).unwrap();
        assert_eq!(sync.constant_value(), Some(0.0));
    }

    #[test]
    fn ft_transfer_for_identity_returns_p() {
        let s = z_structure();
        let id = GroupHomomorphism::identity(s.group());
        let r = id.check_ft_brp(&s, &s, 1, 4).unwrap();
        assert!(r.is_constant(), "{r:?}");
        assert_eq!(r.constant_value(), Some(1.0));
        assert_eq!(r.p, Some(1));
    }

    #[test]
    fn ft_transfer_for_conjugation_at_p0() {
        let s = f2_structure();
        let a = s.group().evaluate_str("a").unwrap();
        let la = GroupHomomorphism::inner(s.group(), &a).unwrap();
        let r = la.check_ft_brp(&s, &s, 0, 3).unwrap();
        assert!(r.is_constant(), "{r:?}");
        assert_eq!(r.constant_value(), Some(2.0));
        assert!(r
            .report
            .notes
            .iter()
            .any(|n| n.contains("meeting fellow travel")));
    }

    #[test]
    fn doubling_on_z_transfers_fellow_travellers_boundedly() {
        // Representatives of doubled endpoints stay aligned up to a constant:
        // the fellow-traveller transfer is bounded even though the
        // synchronous comparison against the *same* element diverges.
        let s = z_structure();
        let phi = hom_of(s.group(), s.group(), &[("a", "aa")]);
        let r = phi.check_ft_brp(&s, &s, 1, 4).unwrap();
        assert!(r.is_constant(), "{r:?}");
    }

    #[test]
    fn gromov_transfer_identity_is_zero() {
        let f2 = GroupModel::free(2).unwrap();
        let id = GroupHomomorphism::identity(&f2);
        let r = id.gromov_brp_check(4).unwrap();
        assert!(r.is_constant(), "{r:?}");
        assert_eq!(r.constant_value(), Some(0.0));
    }

    #[test]
    fn gromov_transfer_conjugation_is_one() {
        let f2 = GroupModel::free(2).unwrap();
        let a = f2.evaluate_str("a").unwrap();
        let la = GroupHomomorphism::inner(&f2, &a).unwrap();
        let r = la.gromov_brp_check(3).unwrap();
        assert!(r.is_constant(), "{r:?}");
        assert_eq!(r.constant_value(), Some(1.0));
    }

    #[test]
    fn gromov_transfer_detects_collapse() {
        // a↦a, b↦a folds the two directions together: (abⁿ⁻¹, bⁿ) splits at
        // its first letter but both images are aⁿ, so the image product is n.
        let f2 = GroupModel::free(2).unwrap();
        let phi = hom_of(&f2, &f2, &[("a", "a"), ("b", "a")]);
        let r = phi.gromov_brp_check(4).unwrap();
        assert!(!r.is_constant(), "{r:?}");
        assert_eq!(
            r.growth_trace.points,
            vec![(1, 1.0), (2, 2.0), (3, 3.0), (4, 4.0)]
        );
    }

    #[test]
    fn gromov_transfer_requires_free_models() {
        let z = GroupModel::free_abelian(1).unwrap();
        let id = GroupHomomorphism::identity(&z);
        assert!(matches!(id.gromov_brp_check(3), Err(HomError::Unsupported(_))));
    }

    #[test]
    fn constants_measured_at_identity_hold_at_sampled_basepoints() {
        // The quantifier over basepoints collapses because the oracle metric
        // is left-invariant by construction: d(xφ·u, xφ·v) = d(u, v).
        let s = f2_structure();
        let model = s.group();
        let a = model.evaluate_str("a").unwrap();
        let la = GroupHomomorphism::inner(model, &a).unwrap();
        let oracle = DistanceOracle::new(model);
        for x in ["ab", "BAb", "aaB"] {
            let x = model.evaluate_str(x).unwrap();
            let xphi = la.apply(&x).unwrap();
            for alpha in ["bA", "aab", "Bba"] {
                let alpha = word_of(model, alpha);
                let img = la.image_path(&alpha);
                let beta = word_of(model, "ba");
                let bpath = s.trace(&beta);
                for n in 0..=alpha.len().max(beta.len()) {
                    let u = &img[n.min(img.len() - 1)];
                    let v = bpath.point(n);
                    let shifted_u = model.multiply(&xphi, u);
                    let shifted_v = model.multiply(&xphi, v);
                    assert_eq!(
                        oracle.distance(&shifted_u, &shifted_v, 64),
                        oracle.distance(u, v, 64)
                    );
                }
            }
        }
    }
}
