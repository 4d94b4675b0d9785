//! Empirical sweeps over one structure's language.
//!
//! Every check enumerates accepted words up to a length bound, measures a
//! candidate constant, and tracks how the measurement grows with the bound.
//! A constant that keeps growing across the trace window is reported as a
//! failure together with a witness, following the divergence rule of
//! [`GrowthTrace::looks_divergent`].

use super::{AutomaticStructure, StructureError};
use crate::groups::{DistanceOracle, Element, PathTrace};
use crate::report::{CheckReport, GrowthTrace, Witness};

/// Bounds for a sweep.
#[derive(Clone, Copy, Debug)]
pub struct SweepOptions {
    /// Longest accepted words included.
    pub max_len: usize,
    /// Cap for individual distance searches; distances that exceed it are
    /// recorded as `cap + 1` (a lower bound).
    pub cap: u32,
}

impl SweepOptions {
    /// Defaults: cap comfortably above any distance two words of this
    /// length can realise.
    pub fn to_length(max_len: usize) -> Self {
        SweepOptions {
            max_len,
            cap: (2 * max_len + 8) as u32,
        }
    }
}

/// Offset elements used to enumerate nearby endpoints: the identity plus
/// each distinct marked image, labelled for witnesses.
fn offset_set(model: &crate::groups::GroupModel) -> Vec<(Element, String)> {
    let mut out: Vec<(Element, String)> = vec![(model.identity(), String::new())];
    for s in model.alphabet().symbols() {
        let img = model.evaluate_symbol(s);
        if !out.iter().any(|(e, _)| e == img) {
            out.push((img.clone(), model.alphabet().label(s).to_string()));
        }
    }
    out
}

struct PairRecord {
    value: u32,
    left: String,
    right: String,
    offset: String,
    prefix: u32,
}

/// Turn per-length maxima into a prefix-max growth trace on the ladder.
pub(crate) fn prefix_max_trace(best_at: &[u32], max_bound: usize) -> GrowthTrace {
    let mut acc = Vec::with_capacity(best_at.len());
    let mut run = 0u32;
    for &v in best_at {
        run = run.max(v);
        acc.push(run);
    }
    let points = GrowthTrace::ladder(max_bound as u32)
        .into_iter()
        .map(|b| (b, acc[(b as usize).min(acc.len() - 1)] as f64))
        .collect();
    GrowthTrace::new(points)
}

impl AutomaticStructure {
    /// Fellow-traveller sweep.  For every pair of accepted words whose
    /// endpoints differ by at most one marked generator (on the right; also
    /// on the left when `biauto` is set), measure how far apart the two
    /// paths get when read in step.  Reports the largest gap seen, or a
    /// divergence failure when the gap keeps growing with word length.
    pub fn ft_check(&self, opts: &SweepOptions, biauto: bool) -> Result<CheckReport, StructureError> {
        let model = self.group();
        let oracle = self.oracle();
        let id = model.identity();
        let ys = offset_set(model);
        let xs: Vec<(Element, String)> = if biauto {
            ys.clone()
        } else {
            vec![(id.clone(), String::new())]
        };
        let name = if biauto {
            "ft-constant[biautomatic]"
        } else {
            "ft-constant[synchronous]"
        };

        let (best_at, best, pairs, capped) =
            self.with_words(opts.max_len, |words, index| {
                let endpoints: Vec<Element> =
                    words.iter().map(|w| model.evaluate(w)).collect();
                let mut best_at = vec![0u32; opts.max_len + 1];
                let mut best: Option<PairRecord> = None;
                let mut pairs = 0usize;
                let mut capped = false;
                for (ui, u) in words.iter().enumerate() {
                    let tu = PathTrace::from_word(model, &id, u);
                    for (x, xl) in &xs {
                        let mut shifted: Option<PathTrace> = None;
                        let ex = model.multiply(x, &endpoints[ui]);
                        for (y, _) in &ys {
                            let target = model.multiply(&ex, y);
                            let Some(cands) = index.get(&target) else {
                                continue;
                            };
                            for &vi in cands {
                                if vi == ui && x.is_identity() && y.is_identity() {
                                    continue;
                                }
                                pairs += 1;
                                let v = &words[vi];
                                let tv = PathTrace::from_word(model, &id, v);
                                let tu_eff: &PathTrace = if x.is_identity() {
                                    &tu
                                } else {
                                    shifted.get_or_insert_with(|| {
                                        PathTrace::from_word(model, x, u)
                                    })
                                };
                                let steps = u.len().max(v.len());
                                let mut m = 0u32;
                                let mut arg = 0u32;
                                for n in 0..=steps {
                                    let d = match oracle.distance(
                                        tu_eff.point(n),
                                        tv.point(n),
                                        opts.cap,
                                    ) {
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
                                let bucket = u.len().max(v.len());
                                best_at[bucket] = best_at[bucket].max(m);
                                if best.as_ref().map_or(true, |b| m > b.value) {
                                    best = Some(PairRecord {
                                        value: m,
                                        left: model.render_word(u),
                                        right: model.render_word(v),
                                        offset: xl.clone(),
                                        prefix: arg,
                                    });
                                }
                            }
                        }
                    }
                }
                (best_at, best, pairs, capped)
            })?;

        let trace = prefix_max_trace(&best_at, opts.max_len);
        let value = trace.points.last().map_or(0.0, |&(_, v)| v);
        let mut report = if trace.looks_divergent() {
            let b = best.expect("divergent trace implies at least one pair");
            CheckReport::failure(
                name,
                Witness::WordPair {
                    left: b.left,
                    right: b.right,
                    offset: b.offset,
                    prefix: b.prefix,
                    distance: b.value as f64,
                },
            )
        } else {
            CheckReport::constant(name, value, opts.max_len as u32)
        };
        report = report
            .with_trace(trace)
            .with_note(format!("{pairs} adjacent word pairs measured to length {}", opts.max_len));
        if capped {
            report = report.with_note(format!(
                "distance cap {} was hit; capped values are lower bounds",
                opts.cap
            ));
        }
        Ok(report)
    }

    /// Asynchronous fellow-traveller sweep: same pair enumeration as
    /// [`ft_check`](Self::ft_check) without offsets, but paths may idle —
    /// each pair is scored by the best monotone alignment of the two paths
    /// (the bottleneck distance over the alignment grid).
    pub fn async_ft_check(&self, opts: &SweepOptions) -> Result<CheckReport, StructureError> {
        let model = self.group();
        let oracle = self.oracle();
        let id = model.identity();
        let ys = offset_set(model);
        let name = "ft-constant[asynchronous]";

        let (best_at, best, pairs) = self.with_words(opts.max_len, |words, index| {
            let endpoints: Vec<Element> = words.iter().map(|w| model.evaluate(w)).collect();
            let mut best_at = vec![0u32; opts.max_len + 1];
            let mut best: Option<PairRecord> = None;
            let mut pairs = 0usize;
            for (ui, u) in words.iter().enumerate() {
                let tu = PathTrace::from_word(model, &id, u);
                for (y, _) in &ys {
                    let target = model.multiply(&endpoints[ui], y);
                    let Some(cands) = index.get(&target) else {
                        continue;
                    };
                    for &vi in cands {
                        if vi == ui && y.is_identity() {
                            continue;
                        }
                        pairs += 1;
                        let tv = PathTrace::from_word(model, &id, &words[vi]);
                        let (m, arg) = async_bottleneck(&oracle, &tu, &tv, opts.cap);
                        let bucket = u.len().max(words[vi].len());
                        best_at[bucket] = best_at[bucket].max(m);
                        if best.as_ref().map_or(true, |b| m > b.value) {
                            best = Some(PairRecord {
                                value: m,
                                left: model.render_word(u),
                                right: model.render_word(&words[vi]),
                                offset: String::new(),
                                prefix: arg,
                            });
                        }
                    }
                }
            }
            (best_at, best, pairs)
        })?;

        let trace = prefix_max_trace(&best_at, opts.max_len);
        let value = trace.points.last().map_or(0.0, |&(_, v)| v);
        let report = if trace.looks_divergent() {
            let b = best.expect("divergent trace implies at least one pair");
            CheckReport::failure(
                name,
                Witness::WordPair {
                    left: b.left,
                    right: b.right,
                    offset: b.offset,
                    prefix: b.prefix,
                    distance: b.value as f64,
                },
            )
        } else {
            CheckReport::constant(name, value, opts.max_len as u32)
        };
        Ok(report
            .with_trace(trace)
            .with_note(format!("{pairs} adjacent word pairs aligned to length {}", opts.max_len)))
    }

    /// Departure sweep: over all accepted words, the minimum distance
    /// between two prefix points a given gap apart.  A structure departs
    /// when this minimum grows with the gap; a word that loops back close
    /// to an earlier prefix point is a failure witness.
    pub fn departure_check(&self, opts: &SweepOptions) -> Result<CheckReport, StructureError> {
        let model = self.group();
        let oracle = self.oracle();
        let id = model.identity();
        let max_gap = opts.max_len;
        let name = "departure";

        let (min_at, args, longest) = self.with_words(opts.max_len, |words, _| {
            let mut min_at = vec![u32::MAX; max_gap + 1];
            let mut args: Vec<Option<(String, u32)>> = vec![None; max_gap + 1];
            let mut longest = 0usize;
            for w in words {
                longest = longest.max(w.len());
                let t = PathTrace::from_word(model, &id, w);
                for s in 0..w.len() {
                    for e in (s + 1)..=w.len() {
                        let gap = e - s;
                        let d = oracle
                            .distance(t.point(s), t.point(e), opts.cap)
                            .unwrap_or(opts.cap + 1);
                        if d < min_at[gap] {
                            min_at[gap] = d;
                            args[gap] = Some((model.render_word(w), s as u32));
                        }
                    }
                }
            }
            (min_at, args, longest)
        })?;

        let top = longest.min(max_gap);
        if top == 0 {
            return Ok(CheckReport::constant(name, 0.0, 0)
                .with_note("language has no non-empty words within the bound"));
        }
        let points: Vec<(u32, f64)> = GrowthTrace::ladder(top as u32)
            .into_iter()
            .map(|b| (b, min_at[b as usize] as f64))
            .collect();
        let trace = GrowthTrace::new(points);
        let bounded = longest < opts.max_len;
        let report = if trace.looks_divergent() || bounded {
            let value = trace.points.last().map_or(0.0, |&(_, v)| v);
            let mut r = CheckReport::constant(name, value, top as u32).with_trace(trace);
            if bounded {
                r = r.with_note(format!(
                    "language is bounded (longest word {longest}); departure holds vacuously past it"
                ));
            }
            r
        } else {
            let (word, start) = args[top].clone().expect("top gap was sampled");
            CheckReport::failure(
                name,
                Witness::DeparturePoint {
                    word,
                    start,
                    gap: top as u32,
                    distance: min_at[top] as f64,
                },
            )
            .with_trace(trace)
        };
        Ok(report)
    }

    /// Largest length difference between accepted words whose endpoints are
    /// equal or one marked generator apart, plus a sampled verification
    /// that length differences are controlled linearly by distance.
    pub fn length_difference_check(
        &self,
        opts: &SweepOptions,
    ) -> Result<CheckReport, StructureError> {
        let model = self.group();
        let oracle = self.oracle();
        let ys = offset_set(model);
        let name = "length-difference";

        let (best_at, best, pairs) = self.with_words(opts.max_len, |words, index| {
            let endpoints: Vec<Element> = words.iter().map(|w| model.evaluate(w)).collect();
            let mut best_at = vec![0u32; opts.max_len + 1];
            let mut best: Option<PairRecord> = None;
            let mut pairs = 0usize;
            for (ui, u) in words.iter().enumerate() {
                for (y, _) in &ys {
                    let target = model.multiply(&endpoints[ui], y);
                    let Some(cands) = index.get(&target) else {
                        continue;
                    };
                    for &vi in cands {
                        if vi == ui && y.is_identity() {
                            continue;
                        }
                        pairs += 1;
                        let diff = u.len().abs_diff(words[vi].len()) as u32;
                        let bucket = u.len().max(words[vi].len());
                        best_at[bucket] = best_at[bucket].max(diff);
                        if best.as_ref().map_or(true, |b| diff > b.value) {
                            best = Some(PairRecord {
                                value: diff,
                                left: model.render_word(u),
                                right: model.render_word(&words[vi]),
                                offset: String::new(),
                                prefix: 0,
                            });
                        }
                    }
                }
            }
            (best_at, best, pairs)
        })?;

        let trace = prefix_max_trace(&best_at, opts.max_len);
        let k = trace.points.last().map_or(0.0, |&(_, v)| v);
        if trace.looks_divergent() {
            let b = best.expect("divergent trace implies at least one pair");
            return Ok(CheckReport::failure(
                name,
                Witness::WordPair {
                    left: b.left,
                    right: b.right,
                    offset: b.offset,
                    prefix: b.prefix,
                    distance: b.value as f64,
                },
            )
            .with_trace(trace)
            .with_note(format!("{pairs} adjacent word pairs measured")));
        }

        // Sampled corollary: along a geodesic between any two endpoints the
        // length can shift by at most k per step, so |len(u) - len(v)| must
        // be at most k·max(1, d) for arbitrary pairs.
        let violation = self.with_words(opts.max_len, |words, _| {
            let endpoints: Vec<Element> = words.iter().map(|w| model.evaluate(w)).collect();
            let stride = (words.len() * words.len() / 20_000).max(1);
            let mut checked = 0usize;
            let mut violation: Option<PairRecord> = None;
            'outer: for ui in (0..words.len()).step_by(stride.min(words.len()).max(1)) {
                for vi in (ui + 1..words.len()).step_by(stride) {
                    let Some(d) =
                        oracle.distance(&endpoints[ui], &endpoints[vi], opts.cap)
                    else {
                        continue;
                    };
                    checked += 1;
                    let diff = words[ui].len().abs_diff(words[vi].len()) as f64;
                    if diff > k * f64::from(d.max(1)) {
                        violation = Some(PairRecord {
                            value: d,
                            left: model.render_word(&words[ui]),
                            right: model.render_word(&words[vi]),
                            offset: String::new(),
                            prefix: 0,
                        });
                        break 'outer;
                    }
                }
            }
            (checked, violation)
        })?;
        let (checked, violation) = violation;
        if let Some(v) = violation {
            return Ok(CheckReport::failure(
                name,
                Witness::WordPair {
                    left: v.left,
                    right: v.right,
                    offset: v.offset,
                    prefix: v.prefix,
                    distance: v.value as f64,
                },
            )
            .with_note("length difference exceeds the linear bound over distance"));
        }
        Ok(CheckReport::constant(name, k, opts.max_len as u32)
            .with_trace(trace)
            .with_note(format!(
                "{pairs} adjacent pairs measured; linear bound sampled on {checked} arbitrary pairs"
            )))
    }

    /// Does every group element in a ball have an accepted spelling, and how
    /// much longer than the distance may the shortest one be?
    pub fn rational_section_check(
        &self,
        radius: u32,
        opts: &SweepOptions,
    ) -> Result<CheckReport, StructureError> {
        let model = self.group();
        let oracle = self.oracle();
        let name = "rational-section";
        let ball = oracle.ball(radius, 500_000)?;
        let effective_len = opts.max_len.max(radius as usize);
        let mut slack_at = vec![0u32; radius as usize + 1];
        for (e, d) in &ball {
            match self.first_representative(e, effective_len)? {
                Some(rep) => {
                    let slack = (rep.len() as u32).saturating_sub(*d);
                    slack_at[*d as usize] = slack_at[*d as usize].max(slack);
                }
                None => {
                    return Ok(CheckReport::failure(
                        name,
                        Witness::Element {
                            element: model.render_element(e),
                            note: format!(
                                "no accepted spelling within length {effective_len}"
                            ),
                        },
                    )
                    .with_note(format!("ball of radius {radius}: {} elements", ball.len())));
                }
            }
        }
        let trace = prefix_max_trace(&slack_at, radius as usize);
        let value = trace.points.last().map_or(0.0, |&(_, v)| v);
        let mut report = CheckReport::constant(name, value, radius)
            .with_trace(trace.clone())
            .with_note(format!(
                "all {} elements within radius {radius} have representatives (spelled within length {effective_len})",
                ball.len()
            ));
        if trace.looks_divergent() {
            report = report.with_note("representative slack is still growing with the radius");
        }
        Ok(report)
    }
}

/// Best monotone alignment of two paths, scored by its largest point
/// distance; returns the score and the left index where the optimal
/// alignment is forced to its bottleneck.
pub(super) fn async_bottleneck(
    oracle: &DistanceOracle<'_>,
    tu: &PathTrace,
    tv: &PathTrace,
    cap: u32,
) -> (u32, u32) {
    let n = tu.len();
    let m = tv.len();
    let dist = |i: usize, j: usize| {
        oracle
            .distance(tu.point(i), tv.point(j), cap)
            .unwrap_or(cap + 1)
    };
    let mut b = vec![vec![0u32; m + 1]; n + 1];
    for i in 0..=n {
        for j in 0..=m {
            let d = dist(i, j);
            let reach = if i == 0 && j == 0 {
                0
            } else {
                let mut r = u32::MAX;
                if i > 0 {
                    r = r.min(b[i - 1][j]);
                }
                if j > 0 {
                    r = r.min(b[i][j - 1]);
                }
                if i > 0 && j > 0 {
                    r = r.min(b[i - 1][j - 1]);
                }
                r
            };
            b[i][j] = d.max(reach);
        }
    }
    // Recover a witness cell: walk back along minimal predecessors and note
    // where the distance equals the bottleneck.
    let score = b[n][m];
    let (mut i, mut j) = (n, m);
    let mut arg = 0u32;
    loop {
        if dist(i, j) == score {
            arg = i as u32;
        }
        if i == 0 && j == 0 {
            break;
        }
        let mut next = (i, j);
        let mut bestv = u32::MAX;
        if i > 0 && b[i - 1][j] < bestv {
            bestv = b[i - 1][j];
            next = (i - 1, j);
        }
        if j > 0 && b[i][j - 1] < bestv {
            bestv = b[i][j - 1];
            next = (i, j - 1);
        }
        if i > 0 && j > 0 && b[i - 1][j - 1] <= bestv {
            next = (i - 1, j - 1);
        }
        (i, j) = next;
    }
    (score, arg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsa::{star, union, Automaton};
    use crate::groups::{word_of, GroupModel};

    fn z_structure() -> AutomaticStructure {
        AutomaticStructure::shortlex("z", GroupModel::free_abelian(1).unwrap()).unwrap()
    }

    #[test]
    fn z_shortlex_has_ft_constant_one() {
        let s = z_structure();
        let r = s.ft_check(&SweepOptions::to_length(8), false).unwrap();
        assert_eq!(r.constant_value(), Some(1.0));
    }

    #[test]
    fn f2_shortlex_has_ft_constant_one() {
        let m = GroupModel::free(2).unwrap();
        let s = AutomaticStructure::shortlex("f2", m).unwrap();
        let r = s.ft_check(&SweepOptions::to_length(6), false).unwrap();
        // Representatives are unique, so adjacent pairs share a prefix and
        // differ by at most the final letter.
        assert_eq!(r.constant_value(), Some(1.0));
    }

    #[test]
    fn doubling_language_fails_sync_ft() {
        // L = all words over {a, A} (many spellings per element, including
        // badly detouring ones) — the sweep must detect growth.
        let m = GroupModel::free_abelian(1).unwrap();
        let lang = Automaton::all_words(m.alphabet().clone());
        let s = AutomaticStructure::new("z-all", m, lang).unwrap();
        let r = s.ft_check(&SweepOptions::to_length(8), false).unwrap();
        assert!(!r.is_constant(), "detouring spellings must diverge: {r:?}");
    }

    #[test]
    fn async_alignment_forgives_pacing() {
        // a* ∪ (aAa)*: the second family reaches +k in 3k letters, pacing
        // 1/3 as fast but staying within distance 1 of the straight path
        // under the best alignment.
        let m = GroupModel::free_abelian(1).unwrap();
        let a = m.alphabet().clone();
        let straight = star(&Automaton::literal(a.clone(), &word_of(&m, "a"))).unwrap();
        let slow = star(&Automaton::literal(a.clone(), &word_of(&m, "aAa"))).unwrap();
        let lang = union(&straight, &slow).unwrap();
        let s = AutomaticStructure::new("paced", m, lang).unwrap();

        let sync = s.ft_check(&SweepOptions::to_length(12), false).unwrap();
        assert!(!sync.is_constant(), "sync reading should diverge: {sync:?}");

        let asy = s.async_ft_check(&SweepOptions::to_length(12)).unwrap();
        assert_eq!(asy.constant_value(), Some(1.0), "{asy:?}");
    }

    #[test]
    fn departure_diverges_for_geodesics_and_fails_for_loops() {
        let m = GroupModel::free(2).unwrap();
        let s = AutomaticStructure::shortlex("f2", m).unwrap();
        let r = s.departure_check(&SweepOptions::to_length(8)).unwrap();
        assert!(r.is_constant(), "geodesics depart: {r:?}");

        let m = GroupModel::free(1).unwrap();
        let loops = star(&Automaton::literal(m.alphabet().clone(), &word_of(&m, "aA"))).unwrap();
        let s = AutomaticStructure::new("loops", m, loops).unwrap();
        let r = s.departure_check(&SweepOptions::to_length(8)).unwrap();
        assert!(!r.is_constant());
        match r.witness() {
            Some(Witness::DeparturePoint { distance, .. }) => assert_eq!(*distance, 0.0),
            w => panic!("expected a departure witness, got {w:?}"),
        }
    }

    #[test]
    fn length_difference_of_shortlex_is_small() {
        let s = z_structure();
        let r = s.length_difference_check(&SweepOptions::to_length(8)).unwrap();
        assert_eq!(r.constant_value(), Some(1.0));
    }

    #[test]
    fn rational_section_covers_and_reports_slack() {
        let s = z_structure();
        let r = s.rational_section_check(6, &SweepOptions::to_length(6)).unwrap();
        assert_eq!(r.constant_value(), Some(0.0), "{r:?}");

        // A language missing an element: a* only covers one side of Z.
        let m = GroupModel::free_abelian(1).unwrap();
        let lang = star(&Automaton::literal(m.alphabet().clone(), &word_of(&m, "a"))).unwrap();
        let s = AutomaticStructure::new("half", m, lang).unwrap();
        let r = s.rational_section_check(3, &SweepOptions::to_length(6)).unwrap();
        assert!(!r.is_constant());
        assert!(matches!(r.witness(), Some(Witness::Element { .. })));
    }
}
