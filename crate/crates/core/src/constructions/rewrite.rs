//! Rewriting accepted words into subgroup letters.
//!
//! Given a structure for a group `G` and a quasiconvex subgroup `H`, the
//! accepted words whose endpoints lie in `H` can be rewritten letter by
//! letter over a new alphabet of `H`-elements: each prefix of such a word is
//! shadowed by a subgroup element within the quasiconvexity constant `k`,
//! and the step between consecutive shadows is a subgroup element spelled by
//! at most `2k+1` ambient letters.  The shadows can be chosen by a *finite*
//! transducer because connector updates do not depend on the prefix read so
//! far: when `w·g ∈ H`, a next connector `g′` is valid exactly when
//! `g⁻¹·a·g′` evaluates into `H`.  Picking the shortlex-least valid
//! connector at every step makes the choice canonical, and the empty
//! connector is automatically chosen at a word's end whenever the endpoint
//! itself lies in `H`.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::fsa::{state_cap, Alphabet, Automaton, FsaError, Symbol, Word};
use crate::groups::{DistanceOracle, Element, GroupModel, PathTrace};
use crate::report::{CheckReport, GrowthTrace, Witness};
use crate::structures::checks::prefix_max_trace;
use crate::structures::{AutomaticStructure, SweepOptions};
use crate::subgroups::{quasiconvexity, SubgroupOracle};

use super::ConstructionError;

/// Node budget for ambient balls during distance comparisons.
const BALL_CAP: usize = 500_000;

/// A letter-to-letter rewriting of `{w accepted : w ends in H}` into words
/// over an alphabet of subgroup elements, together with the marked model
/// that gives those letters their meaning.
pub struct RewriteSystem {
    source: String,
    ambient: GroupModel,
    h: SubgroupOracle,
    k: u32,
    quasiconvexity: CheckReport,
    /// Subgroup letters as words over the ambient alphabet (closed under
    /// formal inversion, shortlex order).
    letters: Vec<Word>,
    /// The subgroup with the letters as its marked generators.  Distances in
    /// this model are honest letter counts (no metric shortcut).
    b_model: GroupModel,
    /// Accepted ambient words with subgroup endpoints (the rewriting domain).
    domain: Automaton,
    /// The rewritten language over the letter alphabet, minimized.
    image: Automaton,
    start: usize,
    /// `(domain state, ambient letter) → (next state, subgroup letter)`.
    step: HashMap<(usize, Symbol), (usize, Symbol)>,
    notes: Vec<String>,
}

impl RewriteSystem {
    /// Build the rewriting for `h` inside `s`.  The quasiconvexity sweep to
    /// `max_len` supplies the connector length bound `k`; a sweep failure
    /// rejects the construction.
    pub fn build(
        s: &AutomaticStructure,
        h: SubgroupOracle,
        max_len: usize,
    ) -> Result<RewriteSystem, ConstructionError> {
        if h.ambient() != s.group() {
            return Err(ConstructionError::Mismatch(
                "the subgroup must live in the structure's group".into(),
            ));
        }
        let ambient = s.group().clone();
        let alphabet = ambient.alphabet().clone();
        if !alphabet.has_involution() {
            return Err(ConstructionError::Unsupported(
                "rewriting needs a formal-inverse pairing on the ambient alphabet".into(),
            ));
        }

        let qc = quasiconvexity(s, &h, max_len)?;
        if !qc.is_constant() {
            return Err(ConstructionError::NotQuasiconvex(Box::new(qc)));
        }
        let k = qc.constant_value().unwrap_or(0.0).ceil() as u32;

        // Candidate connectors: every word of length at most k, in shortlex
        // order, so the first valid candidate is always canonical.
        let mut candidates: Vec<(Word, Element)> = vec![(Word::new(), ambient.identity())];
        let mut layer: Vec<Word> = vec![Word::new()];
        for _ in 0..k {
            let mut next: Vec<Word> = Vec::new();
            for w in &layer {
                for sym in alphabet.symbols() {
                    let mut w2 = w.clone();
                    w2.push(sym);
                    next.push(w2);
                }
            }
            candidates.extend(next.iter().map(|w| (w.clone(), ambient.evaluate(w))));
            layer = next;
        }

        let cap = state_cap();
        let det = s.language().determinize_capped(cap)?.trim();
        let mut dstep: HashMap<(usize, Symbol), usize> = HashMap::new();
        for (q, a, q2) in det.transition_list() {
            dstep.insert((q, a), q2);
        }

        // Breadth-first product of the language automaton with the connector
        // choices.  Every reachable state carries the canonical connector
        // word for its prefix class.
        let mut memo: HashMap<(Word, Symbol), Option<Word>> = HashMap::new();
        let mut ids: HashMap<(usize, Word), usize> = HashMap::new();
        let mut states: Vec<(usize, Word)> = vec![(det.initial(), Word::new())];
        ids.insert(states[0].clone(), 0);
        let mut edges: Vec<(usize, Symbol, usize, Word)> = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let (q, g) = states[i].clone();
            for a in alphabet.symbols() {
                let Some(&q2) = dstep.get(&(q, a)) else { continue };
                let Some(g2) = choose(&mut memo, &candidates, &ambient, &h, &g, a) else {
                    continue;
                };
                let mut emitted = alphabet
                    .inverse_word(&g)
                    .expect("involution checked above");
                emitted.push(a);
                emitted.extend_from_slice(&g2);
                debug_assert!(emitted.len() as u32 <= 2 * k + 1);
                let key = (q2, g2);
                let j = match ids.get(&key) {
                    Some(&j) => j,
                    None => {
                        let j = states.len();
                        if j >= cap {
                            return Err(ConstructionError::Fsa(FsaError::StateCapExceeded {
                                cap,
                                during: "subgroup rewriting",
                            }));
                        }
                        ids.insert(key.clone(), j);
                        states.push(key);
                        queue.push_back(j);
                        j
                    }
                };
                edges.push((i, a, j, emitted));
            }
        }

        // Prune states that cannot reach an accepting configuration (final
        // language state with the empty connector); the start state stays so
        // the automata remain well-formed even over an empty domain.
        let mut keep = vec![false; states.len()];
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); states.len()];
        for &(f, _, t, _) in &edges {
            rev[t].push(f);
        }
        let mut queue: VecDeque<usize> = VecDeque::new();
        for (i, (q, g)) in states.iter().enumerate() {
            if det.is_final(*q) && g.is_empty() {
                keep[i] = true;
                queue.push_back(i);
            }
        }
        while let Some(i) = queue.pop_front() {
            for &p in &rev[i] {
                if !keep[p] {
                    keep[p] = true;
                    queue.push_back(p);
                }
            }
        }
        keep[0] = true;
        let mut new_id = vec![usize::MAX; states.len()];
        let mut n_new = 0usize;
        for (i, kept) in keep.iter().enumerate() {
            if *kept {
                new_id[i] = n_new;
                n_new += 1;
            }
        }

        // Letters: the words emitted on surviving transitions, closed under
        // formal inversion.
        let mut letter_set: BTreeSet<Word> = BTreeSet::new();
        for (f, _, t, w) in &edges {
            if keep[*f] && keep[*t] {
                letter_set.insert(w.clone());
                letter_set.insert(alphabet.inverse_word(w).expect("involution checked above"));
            }
        }
        let mut letters: Vec<Word> = letter_set.into_iter().collect();
        letters.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
        let letter_index: HashMap<Word, Symbol> =
            letters.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();

        let mut b_alphabet =
            Alphabet::new(letters.iter().map(|w| alphabet.render(w))).map_err(FsaError::from)?;
        let pairs: Vec<(usize, usize)> = letters
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let inv = alphabet.inverse_word(w).expect("involution checked above");
                (i, letter_index[&inv])
            })
            .collect();
        b_alphabet.set_involution_pairs(&pairs).map_err(FsaError::from)?;
        let b_images: Vec<Element> = letters.iter().map(|w| ambient.evaluate(w)).collect();
        let b_model = GroupModel::custom(ambient.kind().clone(), b_alphabet.clone(), b_images)?
            .without_metric_shortcut();

        let finals: Vec<usize> = (0..states.len())
            .filter(|&i| keep[i] && det.is_final(states[i].0) && states[i].1.is_empty())
            .map(|i| new_id[i])
            .collect();
        let mut a_edges: Vec<(usize, Symbol, usize)> = Vec::new();
        let mut b_edges: Vec<(usize, Symbol, usize)> = Vec::new();
        let mut step: HashMap<(usize, Symbol), (usize, Symbol)> = HashMap::new();
        for (f, a, t, w) in &edges {
            if keep[*f] && keep[*t] {
                let b = letter_index[w];
                a_edges.push((new_id[*f], *a, new_id[*t]));
                b_edges.push((new_id[*f], b, new_id[*t]));
                step.insert((new_id[*f], *a), (new_id[*t], b));
            }
        }
        let domain = Automaton::from_parts(alphabet.clone(), n_new, new_id[0], &finals, &a_edges)?;
        let image = Automaton::from_parts(b_alphabet, n_new, new_id[0], &finals, &b_edges)?
            .minimize()?;

        let notes = vec![
            format!(
                "quasiconvexity constant {k}; {} candidate connectors per step",
                candidates.len()
            ),
            format!(
                "{} subgroup letters over {} rewriting states ({} before pruning)",
                letters.len(),
                n_new,
                states.len()
            ),
            format!(
                "connector validity verified by sweeps to length {max_len}; a larger true constant would shrink the domain"
            ),
        ];
        Ok(RewriteSystem {
            source: s.name().to_string(),
            ambient,
            h,
            k,
            quasiconvexity: qc,
            letters,
            b_model,
            domain,
            image,
            start: new_id[0],
            step,
            notes,
        })
    }

    /// The connector length bound (the measured quasiconvexity constant).
    pub fn constant(&self) -> u32 {
        self.k
    }

    pub fn subgroup(&self) -> &SubgroupOracle {
        &self.h
    }

    pub fn quasiconvexity_report(&self) -> &CheckReport {
        &self.quasiconvexity
    }

    /// Subgroup letters as words over the ambient alphabet.
    pub fn letters(&self) -> &[Word] {
        &self.letters
    }

    /// The subgroup marked by its letters (distances are letter counts).
    pub fn subgroup_model(&self) -> &GroupModel {
        &self.b_model
    }

    /// Accepted ambient words with subgroup endpoints.
    pub fn domain(&self) -> &Automaton {
        &self.domain
    }

    /// The rewritten language over the letter alphabet.
    pub fn rewritten_language(&self) -> &Automaton {
        &self.image
    }

    /// The rewritten language coupled with the letter-marked model.
    pub fn rewritten_structure(&self) -> Result<AutomaticStructure, ConstructionError> {
        Ok(AutomaticStructure::new(
            format!("{}″", self.source),
            self.b_model.clone(),
            self.image.clone(),
        )?)
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    /// Rewrite one accepted word with subgroup endpoint; the output has the
    /// same length and spells the same element (through the letter marking).
    pub fn rewrite_word(&self, w: &[Symbol]) -> Result<Word, ConstructionError> {
        let mut cur = self.start;
        let mut out = Word::with_capacity(w.len());
        for (i, &a) in w.iter().enumerate() {
            match self.step.get(&(cur, a)) {
                Some(&(next, b)) => {
                    cur = next;
                    out.push(b);
                }
                None => {
                    return Err(ConstructionError::OutsideDomain(format!(
                        "{} stalls after {i} letters",
                        self.ambient.render_word(w)
                    )))
                }
            }
        }
        if !self.domain.is_final(cur) {
            return Err(ConstructionError::OutsideDomain(format!(
                "{} is not an accepted word ending in the subgroup",
                self.ambient.render_word(w)
            )));
        }
        debug_assert_eq!(self.ambient.evaluate(w), self.b_model.evaluate(&out));
        Ok(out)
    }

    /// Compare the subgroup's two metrics on `H ∩ ball(max_radius)`: letter
    /// distance against ambient distance.  Verifies the ambient distance is
    /// at most `(2k+1)` times the letter distance on every pair and reports
    /// the worst ratio the other way (the distortion of the embedding).
    pub fn sandwich_constants(&self, max_radius: u32) -> Result<CheckReport, ConstructionError> {
        let name = "subgroup-distortion";
        let oracle = DistanceOracle::new(&self.ambient);
        let b_oracle = DistanceOracle::new(&self.b_model);
        let stretch = 2 * self.k + 1;
        let cap_a = 2 * max_radius + 2;
        let cap_b = stretch * 2 * max_radius + 4;
        let points: Vec<Element> = oracle
            .ball(max_radius, BALL_CAP)?
            .into_iter()
            .filter(|(e, _)| self.h.contains(e))
            .map(|(e, _)| e)
            .collect();

        let mut best = vec![0.0f64; max_radius as usize + 1];
        let mut pairs = 0usize;
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                let (x, y) = (&points[i], &points[j]);
                let Some(da) = oracle.distance(x, y, cap_a) else { continue };
                let Some(db) = b_oracle.distance(x, y, cap_b) else {
                    return Ok(CheckReport::failure(
                        name,
                        Witness::Element {
                            element: self.ambient.render_element(y),
                            note: format!(
                                "not reachable from {} within {cap_b} subgroup letters",
                                self.ambient.render_element(x)
                            ),
                        },
                    )
                    .with_note(format!(
                        "{} subgroup elements within radius {max_radius}",
                        points.len()
                    )));
                };
                pairs += 1;
                if da > stretch * db {
                    return Ok(CheckReport::failure(
                        name,
                        Witness::Note {
                            note: format!(
                                "ambient distance {da} between {} and {} exceeds (2k+1)·{db} = {}",
                                self.ambient.render_element(x),
                                self.ambient.render_element(y),
                                stretch * db
                            ),
                        },
                    ));
                }
                if da > 0 {
                    let slot = da.min(max_radius) as usize;
                    let r = f64::from(db) / f64::from(da);
                    if r > best[slot] {
                        best[slot] = r;
                    }
                }
            }
        }

        let mut acc = Vec::with_capacity(best.len());
        let mut run = 0.0f64;
        for &v in &best {
            run = run.max(v);
            acc.push(run);
        }
        let trace = GrowthTrace::new(
            GrowthTrace::ladder(max_radius)
                .into_iter()
                .map(|b| (b, acc[(b as usize).min(acc.len() - 1)]))
                .collect(),
        );
        let value = trace.points.last().map_or(0.0, |&(_, v)| v);
        let report = if trace.looks_divergent() {
            CheckReport::failure(
                name,
                Witness::Note {
                    note: format!(
                        "letter distance keeps growing against ambient distance (ratio {value:.2} at radius {max_radius})"
                    ),
                },
            )
            .with_trace(trace)
        } else {
            CheckReport::constant(name, value, max_radius).with_trace(trace)
        };
        Ok(report
            .with_note(format!(
                "{} subgroup elements within radius {max_radius}; {pairs} pairs compared",
                points.len()
            ))
            .with_note(format!(
                "ambient distance bounded by (2k+1) = {stretch} letter-lengths on every pair"
            )))
    }

    /// Fellow-traveller sweep over the mixed alphabet: the domain words and
    /// their rewrites are read side by side in the merged marking, and every
    /// pair with endpoints at most one merged generator apart is walked in
    /// step.  Bounded gaps mean the rewriting preserves the geometry.
    pub fn mixed_ft_check(&self, max_len: usize) -> Result<CheckReport, ConstructionError> {
        let name = "ft-constant[mixed]";
        let (merged, amap, bmap) =
            Alphabet::merged(self.ambient.alphabet(), self.b_model.alphabet())
                .map_err(FsaError::from)?;
        let mut images: Vec<Option<Element>> = vec![None; merged.len()];
        for (s, &t) in amap.iter().enumerate() {
            images[t] = Some(self.ambient.evaluate_symbol(s).clone());
        }
        for (s, &t) in bmap.iter().enumerate() {
            let img = self.b_model.evaluate_symbol(s);
            match &images[t] {
                Some(e) if e != img => {
                    return Err(ConstructionError::Mismatch(format!(
                        "label {} means different elements in the two alphabets",
                        merged.label(t)
                    )))
                }
                _ => images[t] = Some(img.clone()),
            }
        }
        let images: Vec<Element> = images.into_iter().map(Option::unwrap).collect();
        let mixed = GroupModel::custom(self.ambient.kind().clone(), merged, images)?
            .without_metric_shortcut();
        let oracle = DistanceOracle::new(&mixed);
        let opts = SweepOptions::to_length(max_len);

        let originals = self.domain.enumerate(max_len)?;
        let mut word_set: BTreeSet<Word> = BTreeSet::new();
        for w in &originals {
            word_set.insert(w.iter().map(|&s| amap[s]).collect());
            let rw = self.rewrite_word(w)?;
            word_set.insert(rw.iter().map(|&s| bmap[s]).collect());
        }
        let words: Vec<Word> = word_set.into_iter().collect();
        let id = mixed.identity();
        let endpoints: Vec<Element> = words.iter().map(|w| mixed.evaluate(w)).collect();
        let mut index: HashMap<&Element, Vec<usize>> = HashMap::new();
        for (i, e) in endpoints.iter().enumerate() {
            index.entry(e).or_default().push(i);
        }
        let mut offsets: Vec<Element> = vec![id.clone()];
        for s in mixed.alphabet().symbols() {
            let img = mixed.evaluate_symbol(s);
            if !offsets.contains(img) {
                offsets.push(img.clone());
            }
        }

        let mut best_at = vec![0u32; max_len + 1];
        let mut best: Option<(String, String, u32, u32)> = None;
        let mut pairs = 0usize;
        let mut capped = false;
        for (ui, u) in words.iter().enumerate() {
            let tu = PathTrace::from_word(&mixed, &id, u);
            for y in &offsets {
                let target = mixed.multiply(&endpoints[ui], y);
                let Some(cands) = index.get(&target) else { continue };
                for &vi in cands {
                    if vi == ui && y.is_identity() {
                        continue;
                    }
                    pairs += 1;
                    let v = &words[vi];
                    let tv = PathTrace::from_word(&mixed, &id, v);
                    let steps = u.len().max(v.len());
                    let mut m = 0u32;
                    let mut arg = 0u32;
                    for n in 0..=steps {
                        let d = match oracle.distance(tu.point(n), tv.point(n), opts.cap) {
                            Some(d) => d,
                            None => {
                                capped = true;
                                opts.cap + 1
                            }
                        };
                        if d > m {
                            m = d;
                            arg = n as u32;
                        }
                    }
                    let bucket = steps.min(max_len);
                    best_at[bucket] = best_at[bucket].max(m);
                    if best.as_ref().map_or(true, |b| m > b.3) {
                        best = Some((
                            mixed.render_word(u),
                            mixed.render_word(v),
                            arg,
                            m,
                        ));
                    }
                }
            }
        }

        let trace = prefix_max_trace(&best_at, max_len);
        let value = trace.points.last().map_or(0.0, |&(_, v)| v);
        let mut report = if trace.looks_divergent() {
            let (left, right, prefix, m) = best.expect("divergent trace implies a pair");
            CheckReport::failure(
                name,
                Witness::WordPair {
                    left,
                    right,
                    offset: String::new(),
                    prefix,
                    distance: m as f64,
                },
            )
        } else {
            CheckReport::constant(name, value, max_len as u32)
        };
        report = report.with_trace(trace).with_note(format!(
            "{} words ({} domain words with their rewrites) paired to length {max_len}; {pairs} pairs walked",
            words.len(),
            originals.len()
        ));
        if capped {
            report = report.with_note(format!(
                "distance cap {} was hit; capped values are lower bounds",
                opts.cap
            ));
        }
        Ok(report)
    }
}

/// Shortlex-least connector `g′` with `g⁻¹·a·g′` in the subgroup, memoized
/// per `(g, a)`.
fn choose(
    memo: &mut HashMap<(Word, Symbol), Option<Word>>,
    candidates: &[(Word, Element)],
    ambient: &GroupModel,
    h: &SubgroupOracle,
    g: &Word,
    a: Symbol,
) -> Option<Word> {
    if let Some(ans) = memo.get(&(g.clone(), a)) {
        return ans.clone();
    }
    let g_inv = ambient.invert(&ambient.evaluate(g));
    let prefix = ambient.multiply(&g_inv, ambient.evaluate_symbol(a));
    let ans = candidates
        .iter()
        .find(|(_, e)| h.contains(&ambient.multiply(&prefix, e)))
        .map(|(w, _)| w.clone());
    memo.insert((g.clone(), a), ans.clone());
    ans
}

#[cfg(test)]
mod tests {
    use super::super::product_structure;
    use super::*;
    use crate::groups::word_of;

    fn f2_shortlex() -> AutomaticStructure {
        AutomaticStructure::shortlex("f2", GroupModel::free(2).unwrap()).unwrap()
    }

    fn diagonal_system() -> RewriteSystem {
        let z = GroupModel::free_abelian(1).unwrap();
        let s1 = AutomaticStructure::shortlex("z", z.clone()).unwrap();
        let s2 = AutomaticStructure::shortlex("z", z).unwrap();
        let prod = product_structure(&s1, &s2).unwrap();
        let h = SubgroupOracle::diagonal(prod.group()).unwrap();
        RewriteSystem::build(&prod, h, 8).unwrap()
    }

    #[test]
    fn powers_of_a_need_no_connectors() {
        let s = f2_shortlex();
        let a = s.group().evaluate_str("a").unwrap();
        let h = SubgroupOracle::cyclic(s.group().clone(), &a, 64);
        let r = RewriteSystem::build(&s, h, 6).unwrap();
        assert_eq!(r.constant(), 0);
        assert_eq!(
            r.subgroup_model().alphabet().labels(),
            &["a".to_string(), "A".to_string()]
        );
        let w = word_of(s.group(), "aaa");
        let out = r.rewrite_word(&w).unwrap();
        assert_eq!(out.len(), 3);
        assert_eq!(r.subgroup_model().render_word(&out), "aaa");
        assert!(r.domain().accepts(&word_of(s.group(), "AA")));
        assert!(!r.domain().accepts(&word_of(s.group(), "ab")));
    }

    #[test]
    fn whole_group_rewrites_through_the_same_letters() {
        let s = f2_shortlex();
        let h = SubgroupOracle::whole(s.group().clone());
        let r = RewriteSystem::build(&s, h, 5).unwrap();
        assert_eq!(r.constant(), 0);
        assert_eq!(
            r.subgroup_model().alphabet().labels(),
            s.group().alphabet().labels()
        );
        let w = word_of(s.group(), "abA");
        let out = r.rewrite_word(&w).unwrap();
        assert_eq!(r.subgroup_model().render_word(&out), "abA");
    }

    #[test]
    fn diagonal_of_the_square_keeps_word_length() {
        let r = diagonal_system();
        assert_eq!(r.constant(), 0);
        assert_eq!(
            r.subgroup_model().alphabet().labels(),
            &["(a,a)".to_string(), "(A,A)".to_string()]
        );
        let w = r.domain().alphabet().parse_word("(a,a) (a,a)").unwrap();
        let out = r.rewrite_word(&w).unwrap();
        assert_eq!(out.len(), w.len());
        assert_eq!(r.subgroup_model().render_word(&out), "(a,a) (a,a)");
    }

    #[test]
    fn words_outside_the_domain_are_rejected() {
        let s = f2_shortlex();
        let a = s.group().evaluate_str("a").unwrap();
        let h = SubgroupOracle::cyclic(s.group().clone(), &a, 64);
        let r = RewriteSystem::build(&s, h, 5).unwrap();
        let w = word_of(s.group(), "ab");
        assert!(matches!(
            r.rewrite_word(&w),
            Err(ConstructionError::OutsideDomain(_))
        ));
    }

    #[test]
    fn non_quasiconvex_subgroups_are_rejected() {
        // Over the language of all words of Z, the trivial subgroup fails:
        // words like aⁿAⁿ return to it while their prefixes wander off.
        let m = GroupModel::free_abelian(1).unwrap();
        let lang = Automaton::all_words(m.alphabet().clone());
        let s = AutomaticStructure::new("z-all", m.clone(), lang).unwrap();
        let h = SubgroupOracle::trivial(m);
        match RewriteSystem::build(&s, h, 8) {
            Err(ConstructionError::NotQuasiconvex(report)) => {
                assert!(!report.is_constant());
            }
            other => panic!("expected a quasiconvexity rejection, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn cyclic_subgroup_has_no_distortion() {
        let s = f2_shortlex();
        let a = s.group().evaluate_str("a").unwrap();
        let h = SubgroupOracle::cyclic(s.group().clone(), &a, 64);
        let r = RewriteSystem::build(&s, h, 5).unwrap();
        let rep = r.sandwich_constants(4).unwrap();
        assert_eq!(rep.constant_value(), Some(1.0), "{rep:?}");
    }

    #[test]
    fn diagonal_distortion_matches_the_product_metric() {
        // A diagonal letter moves both coordinates at once, and the product
        // metric is the component maximum, so the ratio stays one.
        let r = diagonal_system();
        let rep = r.sandwich_constants(5).unwrap();
        assert_eq!(rep.constant_value(), Some(1.0), "{rep:?}");
    }

    #[test]
    fn mixed_reading_of_cyclic_rewrites_stays_close() {
        let s = f2_shortlex();
        let a = s.group().evaluate_str("a").unwrap();
        let h = SubgroupOracle::cyclic(s.group().clone(), &a, 64);
        let r = RewriteSystem::build(&s, h, 6).unwrap();
        let rep = r.mixed_ft_check(8).unwrap();
        assert_eq!(rep.constant_value(), Some(1.0), "{rep:?}");
    }

    #[test]
    fn mixed_reading_of_the_diagonal_is_finite() {
        let r = diagonal_system();
        let rep = r.mixed_ft_check(6).unwrap();
        assert!(rep.is_constant(), "{rep:?}");
        assert_eq!(rep.constant_value(), Some(1.0), "{rep:?}");
    }
}
