//! Word metrics on marked Cayley graphs.
//!
//! The distance from `x` to `y` is the length of the shortest path
//! `x → x·s̄₁ → … → x·s̄₁⋯s̄ₙ = y` whose steps multiply by images of marked
//! symbols.  Queries go through an exact evaluator when the marking is a
//! recognised standard one, and otherwise through an incremental
//! breadth-first search from the identity (using left-invariance:
//! `d(x,y) = d(1, x⁻¹y)`).

use super::{Element, FreeLetter, GroupError, GroupKind, GroupModel};
use crate::fsa::Symbol;
use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};

/// Closed-form distance evaluator for standard markings.
#[derive(Clone, Debug, PartialEq)]
pub enum MetricShortcut {
    /// Free group marked with exactly the signed letters: distance is the
    /// length of the reduced quotient word.
    FreeStd,
    /// Free abelian group marked with exactly the signed unit vectors:
    /// distance is the L1 norm of the difference.
    AbelianStd,
    /// Finite group: precomputed distance from the identity to every
    /// element (`u32::MAX` where the marking does not reach).
    FiniteDist(Vec<u32>),
    /// Product marked by the disjoint union of factor markings: distances
    /// add across the factors.
    SumPair(Box<MetricShortcut>, Box<MetricShortcut>),
    /// Product marked by the padded-pair alphabet of the factor markings:
    /// distance is the maximum across the factors.
    MaxPair(Box<MetricShortcut>, Box<MetricShortcut>),
}

pub(crate) fn shortcut_distance(
    sc: &MetricShortcut,
    kind: &GroupKind,
    x: &Element,
    y: &Element,
) -> Option<u64> {
    match (sc, kind, x, y) {
        (MetricShortcut::FreeStd, GroupKind::Free { .. }, Element::Free(u), Element::Free(v)) => {
            let mut p = 0;
            while p < u.len() && p < v.len() && u[p] == v[p] {
                p += 1;
            }
            Some((u.len() + v.len() - 2 * p) as u64)
        }
        (
            MetricShortcut::AbelianStd,
            GroupKind::FreeAbelian { .. },
            Element::Abelian(u),
            Element::Abelian(v),
        ) => Some(u.iter().zip(v.iter()).map(|(a, b)| a.abs_diff(*b)).sum()),
        (
            MetricShortcut::FiniteDist(d),
            GroupKind::Finite(t),
            Element::Finite(a),
            Element::Finite(b),
        ) => {
            let z = t.mul(t.inv(*a), *b);
            let v = d[z as usize];
            (v != u32::MAX).then_some(v as u64)
        }
        (
            MetricShortcut::SumPair(s1, s2),
            GroupKind::Product(k1, k2),
            Element::Pair(x1, y1),
            Element::Pair(x2, y2),
        ) => Some(shortcut_distance(s1, k1, x1, x2)? + shortcut_distance(s2, k2, y1, y2)?),
        (
            MetricShortcut::MaxPair(s1, s2),
            GroupKind::Product(k1, k2),
            Element::Pair(x1, y1),
            Element::Pair(x2, y2),
        ) => Some(
            shortcut_distance(s1, k1, x1, x2)?.max(shortcut_distance(s2, k2, y1, y2)?),
        ),
        _ => panic!("metric shortcut does not match the group model"),
    }
}

/// Recognise markings whose word metric has a closed form.
pub(crate) fn detect_shortcut(kind: &GroupKind, images: &[Element]) -> Option<MetricShortcut> {
    match kind {
        GroupKind::Free { rank } => {
            if images.len() != 2 * rank {
                return None;
            }
            let mut expected: BTreeSet<FreeLetter> =
                (1..=*rank as FreeLetter).flat_map(|l| [l, -l]).collect();
            for img in images {
                let Element::Free(w) = img else { return None };
                if w.len() != 1 || !expected.remove(&w[0]) {
                    return None;
                }
            }
            Some(MetricShortcut::FreeStd)
        }
        GroupKind::FreeAbelian { rank } => {
            if images.len() != 2 * rank {
                return None;
            }
            let mut expected: BTreeSet<(usize, i64)> =
                (0..*rank).flat_map(|i| [(i, 1), (i, -1)]).collect();
            for img in images {
                let Element::Abelian(v) = img else { return None };
                let nz: Vec<(usize, i64)> = v
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| x != 0)
                    .map(|(i, &x)| (i, x))
                    .collect();
                if nz.len() != 1 || !expected.remove(&nz[0]) {
                    return None;
                }
            }
            Some(MetricShortcut::AbelianStd)
        }
        GroupKind::Finite(t) => {
            let n = t.order();
            let mut dist = vec![u32::MAX; n];
            dist[0] = 0;
            let mut frontier = vec![0u32];
            while !frontier.is_empty() {
                let mut next = Vec::new();
                for &g in &frontier {
                    for img in images {
                        let Element::Finite(s) = img else { return None };
                        let h = t.mul(g, *s);
                        if dist[h as usize] == u32::MAX {
                            dist[h as usize] = dist[g as usize] + 1;
                            next.push(h);
                        }
                    }
                }
                frontier = next;
            }
            Some(MetricShortcut::FiniteDist(dist))
        }
        // Product shortcuts are attached by the product constructors, which
        // know how the marking was assembled; anything else falls back to
        // breadth-first search.
        _ => None,
    }
}

struct Bfs {
    dist: HashMap<Element, u32>,
    /// Discovery order; together with `dist` this lists each ball layer by
    /// layer deterministically.
    order: Vec<Element>,
    frontier: Vec<Element>,
    done: u32,
}

/// Incremental distance queries against one model.  The breadth-first layers
/// grown for one query are reused by later ones.
pub struct DistanceOracle<'m> {
    model: &'m GroupModel,
    steps: Vec<Element>,
    state: RefCell<Bfs>,
}

impl<'m> DistanceOracle<'m> {
    pub fn new(model: &'m GroupModel) -> Self {
        let mut steps: Vec<Element> = Vec::new();
        for img in model.images() {
            if img.is_identity() || steps.contains(img) {
                continue;
            }
            steps.push(img.clone());
        }
        let id = model.identity();
        let state = Bfs {
            dist: HashMap::from([(id.clone(), 0)]),
            order: vec![id.clone()],
            frontier: vec![id],
            done: 0,
        };
        DistanceOracle {
            model,
            steps,
            state: RefCell::new(state),
        }
    }

    pub fn model(&self) -> &GroupModel {
        self.model
    }

    fn expand_layer(&self, bfs: &mut Bfs) {
        let frontier = std::mem::take(&mut bfs.frontier);
        let mut next = Vec::new();
        for g in &frontier {
            for s in &self.steps {
                let h = self.model.multiply(g, s);
                if !bfs.dist.contains_key(&h) {
                    bfs.dist.insert(h.clone(), bfs.done + 1);
                    bfs.order.push(h.clone());
                    next.push(h);
                }
            }
        }
        bfs.frontier = next;
        bfs.done += 1;
    }

    /// Distance from `x` to `y`, or `None` when it exceeds `cap`.
    pub fn distance(&self, x: &Element, y: &Element, cap: u32) -> Option<u32> {
        if let Some(sc) = self.model.shortcut() {
            let d = shortcut_distance(sc, self.model.kind(), x, y)?;
            return (d <= cap as u64).then_some(d as u32);
        }
        let z = self.model.multiply(&self.model.invert(x), y);
        let mut bfs = self.state.borrow_mut();
        loop {
            if let Some(&d) = bfs.dist.get(&z) {
                return (d <= cap).then_some(d);
            }
            if bfs.done >= cap || bfs.frontier.is_empty() {
                return None;
            }
            self.expand_layer(&mut bfs);
        }
    }

    /// Distance from the identity.
    pub fn distance_from_identity(&self, x: &Element, cap: u32) -> Option<u32> {
        self.distance(&self.model.identity(), x, cap)
    }

    /// All elements within `radius` of the identity, with their distances,
    /// in deterministic discovery order.  Fails if more than `node_cap`
    /// elements would be enumerated.
    pub fn ball(&self, radius: u32, node_cap: usize) -> Result<Vec<(Element, u32)>, GroupError> {
        let mut bfs = self.state.borrow_mut();
        if bfs.order.len() > node_cap {
            return Err(GroupError::BallCapExceeded { cap: node_cap });
        }
        while bfs.done < radius && !bfs.frontier.is_empty() {
            self.expand_layer(&mut bfs);
            if bfs.order.len() > node_cap {
                return Err(GroupError::BallCapExceeded { cap: node_cap });
            }
        }
        Ok(bfs
            .order
            .iter()
            .map(|e| (e.clone(), bfs.dist[e]))
            .filter(|(_, d)| *d <= radius)
            .collect())
    }

    /// Inner-product form `((x|y) = (d(1,x) + d(1,y) − d(x,y)) / 2)` used to
    /// quantify how long two directions travel together.
    pub fn gromov_product(&self, x: &Element, y: &Element, cap: u32) -> Option<f64> {
        let dx = self.distance_from_identity(x, cap)? as f64;
        let dy = self.distance_from_identity(y, cap)? as f64;
        let dxy = self.distance(x, y, cap)? as f64;
        Some((dx + dy - dxy) / 2.0)
    }
}

/// One-shot distance query; builds a throwaway oracle.
pub fn geodesic_distance(
    model: &GroupModel,
    x: &Element,
    y: &Element,
    cap: u32,
) -> Option<u32> {
    DistanceOracle::new(model).distance(x, y, cap)
}

/// How far apart two markings of the same group are: the largest distance,
/// in either model, of the other model's marked images from the identity.
/// The metrics are then mutually Lipschitz with this constant.
pub fn compare_generating_sets(
    a: &GroupModel,
    b: &GroupModel,
    cap: u32,
) -> Result<u32, GroupError> {
    if a.kind() != b.kind() {
        return Err(GroupError::KindMismatch);
    }
    let oa = DistanceOracle::new(a);
    let ob = DistanceOracle::new(b);
    let mut best = 0;
    for img in a.images() {
        let d = ob
            .distance_from_identity(img, cap)
            .ok_or(GroupError::ExceedsCap { cap })?;
        best = best.max(d);
    }
    for img in b.images() {
        let d = oa
            .distance_from_identity(img, cap)
            .ok_or(GroupError::ExceedsCap { cap })?;
        best = best.max(d);
    }
    Ok(best)
}

/// The points a word traces through the group: `point(n)` is the base times
/// the image of the length-`n` prefix, clamped at the full word.
#[derive(Clone, Debug, PartialEq)]
pub struct PathTrace {
    points: Vec<Element>,
}

impl PathTrace {
    pub fn from_word(model: &GroupModel, base: &Element, w: &[Symbol]) -> Self {
        PathTrace {
            points: super::prefix_elements(model, base, w),
        }
    }

    /// Wrap an explicit, non-empty point sequence (e.g. an image path under
    /// a homomorphism).
    pub fn from_points(points: Vec<Element>) -> Self {
        assert!(!points.is_empty(), "a trace needs at least its base point");
        PathTrace { points }
    }

    /// Prefix endpoint after `n` letters (clamped to the word length).
    pub fn point(&self, n: usize) -> &Element {
        &self.points[n.min(self.points.len() - 1)]
    }

    pub fn endpoint(&self) -> &Element {
        self.points.last().expect("trace always has a base point")
    }

    /// Length of the traced word.
    pub fn len(&self) -> usize {
        self.points.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.points.len() == 1
    }

    pub fn points(&self) -> &[Element] {
        &self.points
    }
}

#[cfg(test)]
mod tests {
    use super::super::{word_of, GroupModel, VfGenerator, VfPresentation};
    use super::*;

    fn f2() -> GroupModel {
        GroupModel::free(2).unwrap()
    }

    #[test]
    fn free_shortcut_matches_search() {
        let fast = f2();
        let slow = f2().without_metric_shortcut();
        assert!(fast.has_exact_metric());
        assert!(!slow.has_exact_metric());
        let of = DistanceOracle::new(&fast);
        let os = DistanceOracle::new(&slow);
        let words = ["", "a", "ab", "aB", "abA", "ba", "aa", "abab", "BAba"];
        for u in words {
            for v in words {
                let x = fast.evaluate_str(u).unwrap();
                let y = fast.evaluate_str(v).unwrap();
                let df = of.distance(&x, &y, 20);
                let ds = os.distance(&x, &y, 20);
                assert_eq!(df, ds, "distance mismatch on ({u}, {v})");
                // The alphabet is closed under inversion, so the directed
                // metric is symmetric.
                assert_eq!(df, of.distance(&y, &x, 20));
            }
        }
    }

    #[test]
    fn free_ball_sizes() {
        let m = f2();
        let o = DistanceOracle::new(&m);
        for (r, expect) in [(0u32, 1usize), (1, 5), (2, 17), (3, 53)] {
            let ball = o.ball(r, 100_000).unwrap();
            assert_eq!(ball.len(), expect, "ball of radius {r}");
            assert!(ball.iter().all(|(_, d)| *d <= r));
        }
        assert!(matches!(
            DistanceOracle::new(&m).ball(5, 10),
            Err(GroupError::BallCapExceeded { .. })
        ));
    }

    #[test]
    fn one_sided_marking_gives_directed_distances() {
        let z = GroupModel::free_abelian_marked(
            1,
            &[("a", vec![1]), ("A", vec![-1]), ("a2", vec![2])],
        )
        .unwrap();
        let o = DistanceOracle::new(&z);
        let at = |n: i64| Element::Abelian(vec![n]);
        assert_eq!(o.distance(&at(0), &at(4), 10), Some(2)); // a2·a2
        assert_eq!(o.distance(&at(0), &at(3), 10), Some(2)); // a2·a
        assert_eq!(o.distance(&at(0), &at(1), 10), Some(1));
        assert_eq!(o.distance(&at(4), &at(0), 10), Some(4)); // only A steps down
        assert_eq!(o.distance(&at(4), &at(8), 10), Some(2)); // left-invariance
        assert_eq!(o.distance(&at(0), &at(-3), 10), Some(3));
    }

    #[test]
    fn abelian_shortcut_matches_search() {
        let fast = GroupModel::free_abelian(2).unwrap();
        let slow = fast.clone().without_metric_shortcut();
        let of = DistanceOracle::new(&fast);
        let os = DistanceOracle::new(&slow);
        for x in -2i64..=2 {
            for y in -2i64..=2 {
                let e = Element::Abelian(vec![x, y]);
                let d = of.distance_from_identity(&e, 10);
                assert_eq!(d, os.distance_from_identity(&e, 10));
                assert_eq!(d, Some((x.unsigned_abs() + y.unsigned_abs()) as u32));
            }
        }
    }

    #[test]
    fn finite_subset_marking_is_directed() {
        // Z/3 marked only with g1.
        let rows = vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]];
        let full = GroupModel::finite(&rows, None).unwrap();
        let table = match full.kind() {
            super::super::GroupKind::Finite(t) => t.clone(),
            _ => unreachable!(),
        };
        let alphabet = crate::fsa::Alphabet::new(["g1"]).unwrap();
        let m = GroupModel::custom(
            super::super::GroupKind::Finite(table),
            alphabet,
            vec![Element::Finite(1)],
        )
        .unwrap();
        assert!(m.has_exact_metric());
        let o = DistanceOracle::new(&m);
        assert_eq!(o.distance(&Element::Finite(0), &Element::Finite(2), 10), Some(2));
        assert_eq!(o.distance(&Element::Finite(2), &Element::Finite(0), 10), Some(1));
        let slow = m.clone().without_metric_shortcut();
        let os = DistanceOracle::new(&slow);
        assert_eq!(os.distance(&Element::Finite(0), &Element::Finite(2), 10), Some(2));
        assert_eq!(os.distance(&Element::Finite(2), &Element::Finite(0), 10), Some(1));
    }

    #[test]
    fn product_metrics_add_or_max() {
        let z1 = GroupModel::free_abelian(1).unwrap();
        let z2 =
            GroupModel::free_abelian_marked(1, &[("t", vec![1]), ("T", vec![-1])]).unwrap();
        let target = Element::Pair(
            Box::new(Element::Abelian(vec![2])),
            Box::new(Element::Abelian(vec![3])),
        );

        let union = GroupModel::product_union(&z1, &z2).unwrap();
        let ou = DistanceOracle::new(&union);
        assert_eq!(ou.distance_from_identity(&target, 20), Some(5));

        let conv = GroupModel::product_convolution(&z1, &z2).unwrap();
        let oc = DistanceOracle::new(&conv);
        assert_eq!(oc.distance_from_identity(&target, 20), Some(3));

        // Breadth-first search agrees with both closed forms.
        for m in [union, conv] {
            let expect = DistanceOracle::new(&m).distance_from_identity(&target, 20);
            let slow = m.clone().without_metric_shortcut();
            assert_eq!(DistanceOracle::new(&slow).distance_from_identity(&target, 20), expect);
        }
    }

    #[test]
    fn dihedral_model_distances() {
        let pres = VfPresentation::new(
            1,
            vec!["b".to_string()],
            vec![
                (1, VfGenerator::Free(1), vec![-1], 1),
                (1, VfGenerator::Free(-1), vec![1], 1),
                (1, VfGenerator::Coset(1), vec![], 0),
            ],
        )
        .unwrap();
        let m = GroupModel::by_finite(pres).unwrap();
        assert_eq!(m.alphabet().len(), 3); // a, A, b
        assert!(m.alphabet().has_involution()); // b is self-inverse
        let o = DistanceOracle::new(&m);
        let eval = |s: &str| m.evaluate(&word_of(&m, s));
        // The word bab evaluates to a⁻¹, one step away.
        assert_eq!(eval("bab"), m.evaluate_str("A").unwrap());
        assert_eq!(o.distance_from_identity(&eval("bab"), 10), Some(1));
        assert_eq!(o.distance_from_identity(&eval("aab"), 10), Some(3));
        assert_eq!(o.distance_from_identity(&eval("b"), 10), Some(1));
    }

    #[test]
    fn gromov_product_measures_shared_prefix() {
        let m = f2();
        let o = DistanceOracle::new(&m);
        let u = m.evaluate_str("ab").unwrap();
        let v = m.evaluate_str("aB").unwrap();
        assert_eq!(o.gromov_product(&u, &v, 10), Some(1.0));
        let w = m.evaluate_str("Ab").unwrap();
        assert_eq!(o.gromov_product(&u, &w, 10), Some(0.0));
    }

    #[test]
    fn generating_set_comparison() {
        let std = GroupModel::free_abelian(1).unwrap();
        let marked = GroupModel::free_abelian_marked(
            1,
            &[("a", vec![1]), ("A", vec![-1]), ("a2", vec![2])],
        )
        .unwrap();
        assert_eq!(compare_generating_sets(&std, &marked, 10).unwrap(), 2);
        let f = f2();
        assert!(matches!(
            compare_generating_sets(&std, &f, 10),
            Err(GroupError::KindMismatch)
        ));
    }

    #[test]
    fn path_trace_clamps() {
        let m = f2();
        let w = word_of(&m, "abA");
        let t = PathTrace::from_word(&m, &m.identity(), &w);
        assert_eq!(t.len(), 3);
        assert_eq!(t.point(0), &m.identity());
        assert_eq!(t.point(2), &m.evaluate_str("ab").unwrap());
        assert_eq!(t.point(99), t.endpoint());
        assert_eq!(t.endpoint(), &m.evaluate_str("abA").unwrap());
    }
}
